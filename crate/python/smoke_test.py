"""Smoke test for the `fcsw` Python extension.

Build first:  cargo build -p fcsw-python --release
Run:          python3 python/smoke_test.py [path/to/libfcsw.so]
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load(explicit=None):
    candidates = [pathlib.Path(explicit)] if explicit else [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libfcsw.so", "libfcsw.dylib", "fcsw.dll")
    ]
    lib = next((c for c in candidates if c.exists()), None)
    if lib is None:
        sys.exit("extension not found; run `cargo build -p fcsw-python --release`")
    # the import system wants the module name as the file stem
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / ("fcsw.pyd" if lib.suffix == ".dll" else "fcsw.so")
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("fcsw", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    fcsw = load(sys.argv[1] if len(sys.argv) > 1 else None)
    print("fcsw", fcsw.__version__)

    k4 = fcsw.Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    assert k4.clustering() == 1.0 and k4.avg_path_length() == 1.0
    star = fcsw.Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert star.clustering() == 0.0 and star.avg_path_length() == 1.5
    assert fcsw.Graph(3).avg_path_length() is None
    assert fcsw.Graph.from_adjacency(star.adjacency()) == star

    sc = fcsw.generate_er(60, 0.1, 7)
    a = fcsw.coupling(sc, 0.5, 1.0)
    assert close(a.spectral_radius(), 0.5, 1e-8)
    corr = fcsw.asymptotic_correlation(a)
    assert all(close(corr[i][i], 1.0) for i in range(60))
    assert fcsw.transitivity_violations(corr) == []

    series = fcsw.simulate(a, 500, seed=3)
    assert len(series) == 60 and len(series[0]) == 500
    assert series == fcsw.simulate(a, 500, seed=3)
    sample = fcsw.pearson(series)
    assert close(sample[5][5], 1.0)

    fc = fcsw.binarize(corr, 0.1, tie_seed=1)
    assert fc.edge_count == round(0.1 * 60 * 59 / 2)
    null = fcsw.null_graph(fc, seed=2)
    assert null.edge_count == fc.edge_count
    ms = fcsw.null_graph(fc, seed=2, model="maslov_sneppen")
    assert ms.degrees() == fc.degrees()
    sw = fcsw.small_world(fc, null)
    assert close(sw["sigma"], sw["gamma"] / sw["lambda"])
    assert fcsw.small_world(fc, fc)["sigma"] == 1.0

    p, above, below = fcsw.sign_test([2.0] * 10)
    assert (above, below) == (10, 0) and close(p, 2 / 1024)
    t, df, _ = fcsw.t_test([1.0, 2.0, 3.0], 0.0)
    assert close(t, 2 * math.sqrt(3)) and df == 2

    grid = fcsw.default_density_grid()
    assert len(grid) == 24 and grid[0] == 1.0

    record = fcsw.run_cell(100, 0.1, 2.0, 0.1, 0.1, 0, 1, t_len=300)
    assert record["status"] == "ok", record
    assert record == fcsw.run_cell(100, 0.1, 2.0, 0.1, 0.1, 0, 1, t_len=300)
    print("demo-like cell: gamma={gamma:.3f} lambda={lambda:.3f} sigma={sigma:.3f}".format(**record))

    try:
        fcsw.coupling(fcsw.Graph(3), 0.5, 0.0)
    except (ValueError, RuntimeError) as e:
        print("degenerate coupling rejected:", e)
    else:
        raise AssertionError("empty SC with alpha=0 must fail")
    try:
        fcsw.binarize(corr, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("density 1.5 must fail")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
