"""Smoke test for the shotladder Python extension.

Build the extension first:

    cargo build --release -p shotladder-py --features extension-module

then run `python3 python/smoke_test.py`. An installed `shotladder_py` is used
when present; otherwise the freshly built library under target/ is loaded.
"""

import importlib.machinery
import importlib.util
import os
import random
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import shotladder_py

        return shotladder_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("libshotladder_py.so", "libshotladder_py.dylib", "shotladder_py.dll"):
            lib = ROOT / "target" / profile / name
            if lib.exists():
                suffix = importlib.machinery.EXTENSION_SUFFIXES[0]
                tmp = Path(tempfile.mkdtemp()) / f"shotladder_py{suffix}"
                shutil.copy(lib, tmp)
                spec = importlib.util.spec_from_file_location("shotladder_py", tmp)
                module = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(module)
                return module
    sys.exit("shotladder_py not built; see the module docstring")


def main():
    sl = load()
    rng = random.Random(7)

    resolutions = [(3840, 2160), (2560, 1440), (1920, 1080), (1280, 720), (960, 540)]
    points = []
    for k, (w, h) in enumerate(resolutions):
        for crf in range(14, 51, 2):
            rate = (6000.0 - 1000.0 * k) * 2 ** (-(crf - 14) / 6)
            quality = min(99.0, 100.0 - k * 3 - 0.9 * (crf - 14))
            points.append(sl.RqPoint(w, h, crf, rate, max(quality, 1.0)))
    hull = sl.convex_hull(points)
    ladder = sl.hull_ladder(points)
    print(f"hull points: {len(hull)}; ladder: {ladder}")
    assert ladder.is_monotone()
    assert abs(sl.bd_rate(hull, hull)) < 1e-9

    fixed = sl.fixed_ladder()
    print(f"fixed ladder steps: {len(fixed)}")

    x = [[rng.random() for _ in range(4)] for _ in range(100)]
    y = [3.0 * r[2] + r[0] for r in x]
    model = sl.ForestModel.train(x, y, n_trees=20, seed=1)
    print(f"importances: {[round(v, 3) for v in model.importances]}")
    assert model.importances.index(max(model.importances)) == 2
    assert sl.rfe_select(x, y, 1, n_trees=20) == [2]

    stats = sl.parse_x265_log(
        "x265 [info]: frame I:      1, Avg QP:21.50  kb/s: 9050.11\n"
        "x265 [info]: frame P:     63, Avg QP:24.10  kb/s: 3100.42\n"
    )
    print(f"x265 stats: {stats.to_list()}")
    assert stats.to_list()[2] == -1.0

    rounds = sl.kfold_split([f"v{i}" for i in range(30)], 5, 0)
    assert sorted(i for r in rounds for i in r["test"]) == sorted(f"v{i}" for i in range(30))

    with tempfile.TemporaryDirectory() as d:
        w, h, frames = 64, 64, 2
        raw = bytearray()
        for t in range(frames):
            raw += bytes(((x * 3 + y * 5 + t * 7) % 256) for y in range(h) for x in range(w))
            raw += bytes([128]) * (w * h // 2)
        path = os.path.join(d, "clip.yuv")
        with open(path, "wb") as f:
            f.write(raw)
        names, values = sl.extract_features(path, w, h, "LLF1")
        print(f"LLF1 features: {len(values)}")
        assert len(names) == len(values) == 93

    print("smoke test passed")


if __name__ == "__main__":
    main()
