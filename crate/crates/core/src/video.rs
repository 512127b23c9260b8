//! Planar YUV frames, a raw `.yuv` reader/writer and Lanczos resampling.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::types::Resolution;

/// Lanczos kernel half-width used for every resampling pass.
pub const LANCZOS_TAPS: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum VideoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported pixel format `{0}`")]
    PixelFormat(String),
    #[error("unsupported bit depth {0}")]
    BitDepth(u8),
    #[error("file holds no complete frame")]
    NoFrames,
    #[error("frame dimensions {width}x{height} incompatible with {format:?}")]
    Dimensions {
        width: usize,
        height: usize,
        format: ChromaFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChromaFormat {
    Yuv420,
    Yuv422,
    Yuv444,
}

impl ChromaFormat {
    /// Horizontal and vertical subsampling shifts.
    pub fn shifts(&self) -> (usize, usize) {
        match self {
            ChromaFormat::Yuv420 => (1, 1),
            ChromaFormat::Yuv422 => (1, 0),
            ChromaFormat::Yuv444 => (0, 0),
        }
    }

    pub fn chroma_dims(&self, width: usize, height: usize) -> (usize, usize) {
        let (sx, sy) = self.shifts();
        ((width + (1 << sx) - 1) >> sx, (height + (1 << sy) - 1) >> sy)
    }

    /// Parses ffmpeg-style pixel format names, returning the bit depth too.
    pub fn from_pix_fmt(pix_fmt: &str) -> Result<(Self, u8), VideoError> {
        let p = pix_fmt.trim().to_ascii_lowercase();
        let (base, depth) = match p.strip_suffix("le") {
            Some(stripped) => {
                let idx = stripped
                    .rfind('p')
                    .ok_or_else(|| VideoError::PixelFormat(pix_fmt.to_string()))?;
                let depth: u8 = stripped[idx + 1..]
                    .parse()
                    .map_err(|_| VideoError::PixelFormat(pix_fmt.to_string()))?;
                (&stripped[..idx + 1], depth)
            }
            None => (p.as_str(), 8),
        };
        let format = match base {
            "yuv420p" => ChromaFormat::Yuv420,
            "yuv422p" => ChromaFormat::Yuv422,
            "yuv444p" => ChromaFormat::Yuv444,
            _ => return Err(VideoError::PixelFormat(pix_fmt.to_string())),
        };
        Ok((format, depth))
    }
}

/// A single image plane of normalized samples, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane data length mismatch");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Element-wise `self - other`.
    pub fn diff(&self, other: &Plane) -> Plane {
        assert_eq!((self.width, self.height), (other.width, other.height));
        Plane::new(
            self.width,
            self.height,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn resize(&self, width: usize, height: usize) -> Plane {
        lanczos_resize(self, width, height)
    }
}

/// One decoded frame with samples normalized to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FrameYuv {
    pub y: Plane,
    pub u: Plane,
    pub v: Plane,
    pub format: ChromaFormat,
    pub bit_depth: u8,
}

impl FrameYuv {
    pub fn new(y: Plane, u: Plane, v: Plane, format: ChromaFormat, bit_depth: u8) -> Result<Self, VideoError> {
        let (cw, ch) = format.chroma_dims(y.width, y.height);
        if (u.width, u.height) != (cw, ch) || (v.width, v.height) != (cw, ch) {
            return Err(VideoError::Dimensions {
                width: y.width,
                height: y.height,
                format,
            });
        }
        Ok(Self {
            y,
            u,
            v,
            format,
            bit_depth,
        })
    }

    /// Luma-only convenience constructor with neutral chroma.
    pub fn from_luma(y: Plane, format: ChromaFormat) -> Self {
        let (cw, ch) = format.chroma_dims(y.width, y.height);
        Self {
            u: Plane::filled(cw, ch, 0.5),
            v: Plane::filled(cw, ch, 0.5),
            y,
            format,
            bit_depth: 8,
        }
    }

    pub fn width(&self) -> usize {
        self.y.width
    }

    pub fn height(&self) -> usize {
        self.y.height
    }

    /// Resizes luma to `target` and chroma to the matching subsampled size.
    pub fn resized(&self, target: Resolution) -> FrameYuv {
        let (w, h) = (target.width as usize, target.height as usize);
        let (cw, ch) = self.format.chroma_dims(w, h);
        FrameYuv {
            y: self.y.resize(w, h),
            u: self.u.resize(cw, ch),
            v: self.v.resize(cw, ch),
            format: self.format,
            bit_depth: self.bit_depth,
        }
    }
}

/// A clip as an ordered list of frames.
pub type Video = Vec<FrameYuv>;

/// Resizes every frame of a clip, or returns it unchanged when `target` is
/// `None` or already matches.
pub fn resize_video(video: &[FrameYuv], target: Option<Resolution>) -> Video {
    match target {
        Some(t) => video
            .iter()
            .map(|f| {
                if f.width() == t.width as usize && f.height() == t.height as usize {
                    f.clone()
                } else {
                    f.resized(t)
                }
            })
            .collect(),
        None => video.to_vec(),
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn lanczos(x: f64, a: f64) -> f64 {
    if x.abs() >= a {
        0.0
    } else {
        sinc(x) * sinc(x / a)
    }
}

/// Per-output-sample taps: (first input index, anchor index, normalized weights).
struct Taps {
    start: Vec<usize>,
    anchor: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

fn lanczos_taps(input: usize, output: usize) -> Taps {
    let a = LANCZOS_TAPS as f64;
    let scale = input as f64 / output as f64;
    // widen the kernel when downsampling so it low-passes
    let support_scale = scale.max(1.0);
    let radius = a * support_scale;
    let mut start = Vec::with_capacity(output);
    let mut anchor = Vec::with_capacity(output);
    let mut weights = Vec::with_capacity(output);
    for o in 0..output {
        let center = (o as f64 + 0.5) * scale - 0.5;
        let lo = (center - radius).floor().max(0.0) as usize;
        let hi = ((center + radius).ceil() as usize).min(input - 1);
        let mut w: Vec<f64> = (lo..=hi)
            .map(|i| lanczos((i as f64 - center) / support_scale, a))
            .collect();
        let sum: f64 = w.iter().sum();
        if sum.abs() < 1e-12 {
            w.iter_mut().for_each(|v| *v = 0.0);
            let nearest = center.round().clamp(0.0, (input - 1) as f64) as usize;
            w[nearest - lo] = 1.0;
        } else {
            w.iter_mut().for_each(|v| *v /= sum);
        }
        start.push(lo);
        anchor.push(center.round().clamp(lo as f64, hi as f64) as usize);
        weights.push(w);
    }
    Taps {
        start,
        anchor,
        weights,
    }
}

/// Applies taps along one line. The sum is taken relative to an anchor
/// sample so a constant line maps to exactly the same constant.
#[inline]
fn apply_taps(line: &[f64], taps: &Taps, o: usize) -> f64 {
    let base = line[taps.anchor[o]];
    let s = taps.start[o];
    let mut acc = 0.0;
    for (k, w) in taps.weights[o].iter().enumerate() {
        acc += w * (line[s + k] - base);
    }
    base + acc
}

/// Separable Lanczos (a = 3) resampling. Same-size input is returned as is.
pub fn lanczos_resize(src: &Plane, width: usize, height: usize) -> Plane {
    if src.width == width && src.height == height {
        return src.clone();
    }
    assert!(width > 0 && height > 0 && src.width > 0 && src.height > 0);
    let hx = lanczos_taps(src.width, width);
    let mut tmp = vec![0.0; width * src.height];
    for y in 0..src.height {
        let line = src.row(y);
        for x in 0..width {
            tmp[y * width + x] = apply_taps(line, &hx, x);
        }
    }
    let vy = lanczos_taps(src.height, height);
    let mut out = vec![0.0; width * height];
    let mut column = vec![0.0; src.height];
    for x in 0..width {
        for (y, c) in column.iter_mut().enumerate() {
            *c = tmp[y * width + x];
        }
        for y in 0..height {
            out[y * width + x] = apply_taps(&column, &vy, y);
        }
    }
    Plane::new(width, height, out)
}

/// Geometry of a raw planar YUV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawFormat {
    pub width: usize,
    pub height: usize,
    pub chroma: ChromaFormat,
    pub bit_depth: u8,
}

impl RawFormat {
    fn bytes_per_sample(&self) -> usize {
        if self.bit_depth > 8 {
            2
        } else {
            1
        }
    }

    pub fn frame_bytes(&self) -> usize {
        let (cw, ch) = self.chroma.chroma_dims(self.width, self.height);
        (self.width * self.height + 2 * cw * ch) * self.bytes_per_sample()
    }
}

fn decode_plane(bytes: &[u8], width: usize, height: usize, bit_depth: u8) -> Plane {
    let max = ((1u32 << bit_depth) - 1) as f64;
    let data = if bit_depth > 8 {
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as f64 / max)
            .collect()
    } else {
        bytes.iter().map(|&b| b as f64 / max).collect()
    };
    Plane::new(width, height, data)
}

/// Reads up to `frame_limit` frames of 8- or 10/12/16-bit little-endian
/// planar YUV.
pub fn read_raw_yuv(path: &Path, format: RawFormat, frame_limit: Option<usize>) -> Result<Video, VideoError> {
    if format.bit_depth == 0 || format.bit_depth > 16 {
        return Err(VideoError::BitDepth(format.bit_depth));
    }
    let io_err = |source| VideoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut reader = BufReader::new(File::open(path).map_err(io_err)?);
    let (cw, ch) = format.chroma.chroma_dims(format.width, format.height);
    let bps = format.bytes_per_sample();
    let mut buf = vec![0u8; format.frame_bytes()];
    let mut frames = Vec::new();
    loop {
        if frame_limit.is_some_and(|n| frames.len() >= n) {
            break;
        }
        match reader.read_exact(&mut buf) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(io_err(e)),
        }
        let ysz = format.width * format.height * bps;
        let csz = cw * ch * bps;
        let y = decode_plane(&buf[..ysz], format.width, format.height, format.bit_depth);
        let u = decode_plane(&buf[ysz..ysz + csz], cw, ch, format.bit_depth);
        let v = decode_plane(&buf[ysz + csz..], cw, ch, format.bit_depth);
        frames.push(FrameYuv {
            y,
            u,
            v,
            format: format.chroma,
            bit_depth: format.bit_depth,
        });
    }
    if frames.is_empty() {
        return Err(VideoError::NoFrames);
    }
    Ok(frames)
}

/// Writes frames as raw planar YUV at the frames' bit depth.
pub fn write_raw_yuv(path: &Path, video: &[FrameYuv]) -> Result<(), VideoError> {
    let io_err = |source| VideoError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for frame in video {
        let max = ((1u32 << frame.bit_depth) - 1) as f64;
        for plane in [&frame.y, &frame.u, &frame.v] {
            for &s in &plane.data {
                let q = (s.clamp(0.0, 1.0) * max).round() as u16;
                if frame.bit_depth > 8 {
                    w.write_all(&q.to_le_bytes()).map_err(io_err)?;
                } else {
                    w.write_all(&[q as u8]).map_err(io_err)?;
                }
            }
        }
    }
    w.flush().map_err(io_err)
}
