use std::ffi::CString;

use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "shotladder_py").unwrap();
        shotladder_py::register(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("sl", m).unwrap();
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn hull_and_bd() {
    run(r#"
pts = [sl.RqPoint(1920, 1080, c, 5000.0 / (1 + c), 40 + 1.5 * (50 - c)) for c in range(14, 51, 4)]
hull = sl.convex_hull(pts)
assert 0 < len(hull) <= len(pts)
assert all(a.bitrate < b.bitrate for a, b in zip(hull, hull[1:]))
assert abs(sl.bd_rate(hull, hull)) < 1e-9
up = [sl.RqPoint(p.width, p.height, p.crf, p.bitrate * 1.1, p.quality) for p in hull]
assert abs(sl.bd_rate(hull, up) - 10.0) < 1e-6
ladder = sl.hull_ladder(pts)
assert len(ladder) == len(sl.STEPS_KBPS)
assert ladder.is_monotone()
"#);
}

#[test]
fn ladders_and_folds() {
    run(r#"
fixed = sl.fixed_ladder()
assert fixed.is_monotone()
raw = sl.BitrateLadder([100.0, 200.0, 300.0], [(1920, 1080), (960, 540), (3840, 2160)])
fixed_once = raw.corrected()
assert fixed_once.is_monotone() and fixed_once.corrected() == fixed_once
rounds = sl.kfold_split([f"v{i}" for i in range(217)], 5, 0)
tested = sorted(i for r in rounds for i in r["test"])
assert len(tested) == 217 and len(set(tested)) == 217
jobs = sl.plan_encode_grid(["a"], "x265", "veryfast",
    [(3840, 2160), (2560, 1440), (1920, 1080), (1280, 720), (960, 540)], list(range(14, 51, 2)))
assert len(jobs) == 95
"#);
}

#[test]
fn regressor_and_parsers() {
    run(r#"
import random
rng = random.Random(0)
x = [[rng.random() for _ in range(3)] for _ in range(80)]
y = [2.0 * r[0] for r in x]
m = sl.ForestModel.train(x, y, n_trees=10)
assert sl.ForestModel.from_json(m.to_json()).to_json() == m.to_json()
assert len(m.predict(x[:5])) == 5
assert m.importances.index(max(m.importances)) == 0
s = sl.CompressionStats(21.5, 24.1, -1.0, 9050.1, 3100.4, -1.0)
assert sl.parse_x265_log(s.render_x265_log([1, 63, 0])) == s
try:
    sl.RqPoint(1920, 1080, 30, -1.0, 50.0)
    raise AssertionError("negative bitrate accepted")
except ValueError:
    pass
"#);
}
