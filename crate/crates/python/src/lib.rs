//! Python bindings for `shotladder`.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use shotladder::evaluation as ev;
use shotladder::features::{self as ft, FeatureConfig, FeatureSetId};
use shotladder::ladder::{self as ld, QualityWindow, RqCurve, STEPS_KBPS};
use shotladder::media::{self, SourceRef};
use shotladder::regression as rg;
use shotladder::types::{Codec, EncodeJob, EncoderSetting, Resolution};
use shotladder::video::read_raw_yuv;
use shotladder::vif;

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_codec(name: &str) -> PyResult<Codec> {
    name.parse().map_err(|_| value_err(format!("unknown codec `{name}`")))
}

fn resolution(wh: (u32, u32)) -> Resolution {
    Resolution::new(wh.0, wh.1)
}

fn samples(x: Vec<Vec<f64>>, y: Vec<f64>, names: Option<Vec<String>>) -> PyResult<rg::Samples> {
    let d = x.first().map_or(0, Vec::len);
    if x.len() != y.len() || x.iter().any(|r| r.len() != d) {
        return Err(value_err("x must be a rectangular matrix with one row per target"));
    }
    let names = names.unwrap_or_else(|| (0..d).map(|i| format!("x{i}")).collect());
    if names.len() != d {
        return Err(value_err("one name per feature column is required"));
    }
    Ok(rg::Samples::new(names, x, y))
}

fn steps_or_default(steps: Option<Vec<f64>>) -> Vec<f64> {
    steps.unwrap_or_else(|| STEPS_KBPS.to_vec())
}

/// One encoded rendition.
#[pyclass(name = "RqPoint", from_py_object)]
#[derive(Clone)]
pub struct PyRqPoint {
    inner: shotladder::types::RqPoint,
}

#[pymethods]
impl PyRqPoint {
    #[new]
    #[pyo3(signature = (width, height, crf, bitrate, quality, video_id = "v".to_string(), codec = "synthetic", preset = "default".to_string()))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        width: u32,
        height: u32,
        crf: i32,
        bitrate: f64,
        quality: f64,
        video_id: String,
        codec: &str,
        preset: String,
    ) -> PyResult<Self> {
        if !(bitrate > 0.0) || !(0.0..=100.0).contains(&quality) {
            return Err(value_err("bitrate must be positive and quality within [0, 100]"));
        }
        Ok(Self {
            inner: shotladder::types::RqPoint {
                job: EncodeJob {
                    video_id,
                    codec: parse_codec(codec)?,
                    preset,
                    width,
                    height,
                    crf,
                },
                bitrate,
                quality,
            },
        })
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.job.width
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.job.height
    }

    #[getter]
    fn crf(&self) -> i32 {
        self.inner.job.crf
    }

    #[getter]
    fn bitrate(&self) -> f64 {
        self.inner.bitrate
    }

    #[getter]
    fn quality(&self) -> f64 {
        self.inner.quality
    }

    #[getter]
    fn video_id(&self) -> String {
        self.inner.job.video_id.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "RqPoint({}x{}, crf={}, bitrate={:.3}, quality={:.3})",
            self.inner.job.width, self.inner.job.height, self.inner.job.crf, self.inner.bitrate, self.inner.quality
        )
    }
}

fn curve(points: &[PyRqPoint]) -> RqCurve {
    let mut pts: Vec<_> = points.iter().map(|p| p.inner.clone()).collect();
    pts.sort_by(|a, b| a.bitrate.total_cmp(&b.bitrate));
    RqCurve { points: pts }
}

fn wrap_points(c: RqCurve) -> Vec<PyRqPoint> {
    c.points.into_iter().map(|inner| PyRqPoint { inner }).collect()
}

/// Per-frame-type mean QP and bitrate; -1 marks an absent field.
#[pyclass(name = "CompressionStats", from_py_object)]
#[derive(Clone)]
pub struct PyCompressionStats {
    inner: shotladder::types::CompressionStats,
}

#[pymethods]
impl PyCompressionStats {
    #[new]
    fn new(qp_i: f64, qp_p: f64, qp_b: f64, br_i: f64, br_p: f64, br_b: f64) -> PyResult<Self> {
        let inner = shotladder::types::CompressionStats::from_array([qp_i, qp_p, qp_b, br_i, br_p, br_b]);
        if !inner.is_valid() {
            return Err(value_err("each field must be -1 or non-negative"));
        }
        Ok(Self { inner })
    }

    #[staticmethod]
    fn absent() -> Self {
        Self {
            inner: shotladder::types::CompressionStats::absent(),
        }
    }

    /// `[qp_i, qp_p, qp_b, br_i, br_p, br_b]`.
    fn to_list(&self) -> Vec<f64> {
        self.inner.to_array().to_vec()
    }

    fn render_x265_log(&self, counts: [usize; 3]) -> String {
        media::render_x265_log(&self.inner, counts)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("CompressionStats({:?})", self.inner.to_array())
    }
}

/// Ordered (bitrate step, resolution) pairs.
#[pyclass(name = "BitrateLadder", from_py_object)]
#[derive(Clone)]
pub struct PyBitrateLadder {
    inner: ld::BitrateLadder,
}

#[pymethods]
impl PyBitrateLadder {
    #[new]
    fn new(steps: Vec<f64>, resolutions: Vec<(u32, u32)>) -> PyResult<Self> {
        if steps.len() != resolutions.len() {
            return Err(value_err("steps and resolutions differ in length"));
        }
        let res: Vec<Resolution> = resolutions.into_iter().map(resolution).collect();
        Ok(Self {
            inner: ld::BitrateLadder::from_parts(&steps, &res),
        })
    }

    fn bitrates(&self) -> Vec<f64> {
        self.inner.bitrates()
    }

    fn resolutions(&self) -> Vec<(u32, u32)> {
        self.inner.resolutions().iter().map(|r| (r.width, r.height)).collect()
    }

    fn is_monotone(&self) -> bool {
        self.inner.is_monotone()
    }

    /// The ladder after top-down then bottom-up resolution correction.
    fn corrected(&self) -> Self {
        Self {
            inner: ld::top_bottom_correction(&self.inner),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.steps.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let parts: Vec<String> = self
            .inner
            .steps
            .iter()
            .map(|s| format!("{}:{}", s.bitrate_kbps, s.resolution))
            .collect();
        format!("BitrateLadder([{}])", parts.join(", "))
    }
}

/// Extra-Trees regressor.
#[pyclass(name = "ForestModel")]
pub struct PyForestModel {
    inner: rg::ForestModel,
}

#[pymethods]
impl PyForestModel {
    #[staticmethod]
    #[pyo3(signature = (x, y, names = None, n_trees = 100, min_samples_leaf = 2, max_features = 1.0, seed = 0))]
    fn train(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        names: Option<Vec<String>>,
        n_trees: usize,
        min_samples_leaf: usize,
        max_features: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let hp = rg::Hyperparams {
            n_trees,
            min_samples_leaf,
            max_features,
            seed,
        };
        let inner = rg::ForestModel::train(&samples(x, y, names)?, &hp).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn predict(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        self.inner.predict_many(&rows).map_err(value_err)
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names.clone()
    }

    #[getter]
    fn importances(&self) -> Vec<f64> {
        self.inner.importances.clone()
    }

    fn to_json(&self) -> String {
        rg::io::to_json(&self.inner)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: rg::io::from_json(text).map_err(value_err)?,
        })
    }
}

/// Upper-left convex hull of RQ points in (log bitrate, quality).
#[pyfunction]
#[pyo3(signature = (points, qmin = 20.0, qmax = 99.9))]
fn convex_hull(points: Vec<PyRqPoint>, qmin: f64, qmax: f64) -> PyResult<Vec<PyRqPoint>> {
    let pts: Vec<_> = points.into_iter().map(|p| p.inner).collect();
    let hull = ld::convex_hull(&pts, QualityWindow { min: qmin, max: qmax }).map_err(value_err)?;
    Ok(wrap_points(hull))
}

/// Ladder read off the hull of `points` at each step.
#[pyfunction]
#[pyo3(signature = (points, steps = None, qmin = 20.0, qmax = 99.9))]
fn hull_ladder(points: Vec<PyRqPoint>, steps: Option<Vec<f64>>, qmin: f64, qmax: f64) -> PyResult<PyBitrateLadder> {
    let pts: Vec<_> = points.into_iter().map(|p| p.inner).collect();
    let hull = ld::convex_hull(&pts, QualityWindow { min: qmin, max: qmax }).map_err(value_err)?;
    Ok(PyBitrateLadder {
        inner: ld::hull_ladder(&hull, &steps_or_default(steps)).map_err(value_err)?,
    })
}

/// The bundled fixed ladder expanded over `steps`.
#[pyfunction]
#[pyo3(signature = (steps = None))]
fn fixed_ladder(steps: Option<Vec<f64>>) -> PyResult<PyBitrateLadder> {
    Ok(PyBitrateLadder {
        inner: ld::fixed_ladder(&ld::FixedLadderTable::builtin(), &steps_or_default(steps)).map_err(value_err)?,
    })
}

/// Ladder from predicted curves, given as `{(w, h): [(bitrate, quality), ...]}`.
#[pyfunction]
#[pyo3(signature = (curves, steps = None))]
fn ladder_from_predictions(curves: Vec<((u32, u32), Vec<(f64, f64)>)>, steps: Option<Vec<f64>>) -> PyResult<PyBitrateLadder> {
    let curves: Vec<ld::PredictedCurve> = curves
        .into_iter()
        .map(|(wh, points)| ld::PredictedCurve {
            resolution: resolution(wh),
            points,
        })
        .collect();
    Ok(PyBitrateLadder {
        inner: ld::ladder_from_predictions(&curves, &steps_or_default(steps)).map_err(value_err)?,
    })
}

/// Percent bitrate difference of `test` against `reference` at equal quality.
#[pyfunction]
fn bd_rate(reference: Vec<PyRqPoint>, test: Vec<PyRqPoint>) -> PyResult<f64> {
    Ok(ev::bd_rate(&curve(&reference), &curve(&test)).map_err(value_err)?.value)
}

/// Mean quality difference of `test` over `reference` at equal log-rate.
#[pyfunction]
fn bd_quality(reference: Vec<PyRqPoint>, test: Vec<PyRqPoint>) -> PyResult<f64> {
    Ok(ev::bd_quality(&curve(&reference), &curve(&test)).map_err(value_err)?.value)
}

/// Seeded k-fold rounds as dicts with `train`, `validation` and `test` ids.
#[pyfunction]
#[pyo3(signature = (ids, k = 5, seed = 0))]
fn kfold_split(py: Python<'_>, ids: Vec<String>, k: usize, seed: u64) -> PyResult<Vec<Py<PyAny>>> {
    let plan = ev::kfold_split(&ids, k, seed).map_err(value_err)?;
    plan.rounds
        .into_iter()
        .map(|r| {
            let d = pyo3::types::PyDict::new(py);
            d.set_item("train", r.train)?;
            d.set_item("validation", r.validation)?;
            d.set_item("test", r.test)?;
            Ok(d.into_any().unbind())
        })
        .collect()
}

/// Jobs as `(video_id, width, height, crf)` in execution order.
#[pyfunction]
fn plan_encode_grid(
    videos: Vec<String>,
    codec: &str,
    preset: &str,
    resolutions: Vec<(u32, u32)>,
    crfs: Vec<i32>,
) -> PyResult<Vec<(String, u32, u32, i32)>> {
    let setting = EncoderSetting::new(parse_codec(codec)?, preset);
    let res: Vec<Resolution> = resolutions.into_iter().map(resolution).collect();
    let jobs = media::plan_encode_grid(&videos, &setting, &res, &crfs).map_err(value_err)?;
    Ok(jobs.into_iter().map(|j| (j.video_id, j.width, j.height, j.crf)).collect())
}

#[pyfunction]
fn parse_x265_log(text: &str) -> PyResult<PyCompressionStats> {
    Ok(PyCompressionStats {
        inner: media::parse_x265_log(text).map_err(value_err)?,
    })
}

/// Source features of a raw YUV file as `(names, values)`. `set_id` is
/// `LLF1`, `LLF2` (needs `bitrate`) or `VIFF`; `target` is `None` for
/// native resolution.
#[pyfunction]
#[pyo3(signature = (path, width, height, set_id, pix_fmt = "yuv420p", frame_limit = 64, bitrate = None, target = None))]
#[allow(clippy::too_many_arguments)]
fn extract_features(
    path: PathBuf,
    width: u32,
    height: u32,
    set_id: &str,
    pix_fmt: &str,
    frame_limit: usize,
    bitrate: Option<f64>,
    target: Option<(u32, u32)>,
) -> PyResult<(Vec<String>, Vec<f64>)> {
    let set: FeatureSetId = set_id.parse().map_err(value_err)?;
    let src = SourceRef {
        video_id: "py".into(),
        path,
        width,
        height,
        fps: 30.0,
        pix_fmt: pix_fmt.into(),
        frame_limit,
    };
    let fmt = src.raw_format().map_err(value_err)?;
    let video = read_raw_yuv(&src.path, fmt, Some(frame_limit)).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let cfg = FeatureConfig {
        target: target.map(resolution),
        ..FeatureConfig::native()
    };
    let fv = match set {
        FeatureSetId::Viff => vif::vif_features(&video, &cfg),
        other => ft::extract_llf(&video, other, bitrate, &cfg),
    }
    .map_err(value_err)?;
    Ok((fv.names, fv.values))
}

/// Indices of the `target_count` features kept by recursive elimination.
#[pyfunction]
#[pyo3(signature = (x, y, target_count, n_trees = 50, seed = 0))]
fn rfe_select(x: Vec<Vec<f64>>, y: Vec<f64>, target_count: usize, n_trees: usize, seed: u64) -> PyResult<Vec<usize>> {
    let hp = rg::Hyperparams {
        n_trees,
        seed,
        ..rg::Hyperparams::default()
    };
    rg::rfe_select(&samples(x, y, None)?, target_count, &hp).map_err(value_err)
}

/// Adds every class and function to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRqPoint>()?;
    m.add_class::<PyCompressionStats>()?;
    m.add_class::<PyBitrateLadder>()?;
    m.add_class::<PyForestModel>()?;
    m.add_function(wrap_pyfunction!(convex_hull, m)?)?;
    m.add_function(wrap_pyfunction!(hull_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(ladder_from_predictions, m)?)?;
    m.add_function(wrap_pyfunction!(bd_rate, m)?)?;
    m.add_function(wrap_pyfunction!(bd_quality, m)?)?;
    m.add_function(wrap_pyfunction!(kfold_split, m)?)?;
    m.add_function(wrap_pyfunction!(plan_encode_grid, m)?)?;
    m.add_function(wrap_pyfunction!(parse_x265_log, m)?)?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(rfe_select, m)?)?;
    m.add("STEPS_KBPS", STEPS_KBPS.to_vec())?;
    Ok(())
}

#[pymodule]
fn shotladder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_steps() {
        assert_eq!(steps_or_default(None), STEPS_KBPS.to_vec());
        assert_eq!(steps_or_default(Some(vec![1.0])), vec![1.0]);
    }

    #[test]
    fn codec_names() {
        assert_eq!(parse_codec("x265").unwrap(), Codec::X265);
        assert!(parse_codec("h264").is_err());
    }

    #[test]
    fn curve_is_sorted_by_bitrate() {
        let p = |b: f64| PyRqPoint::new(1920, 1080, 30, b, 50.0, "v".into(), "synthetic", "default".into()).unwrap();
        let c = curve(&[p(900.0), p(100.0), p(400.0)]);
        assert_eq!(c.bitrates(), vec![100.0, 400.0, 900.0]);
    }
}
