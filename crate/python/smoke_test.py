#!/usr/bin/env python3
"""Smoke test for the _maxdiv extension module.

Builds nothing itself: run `cargo build --release -p maxdiv-py` first.
The script copies the freshest cdylib next to itself as `_maxdiv.so`
and exercises the main types end to end.
"""

import math
import shutil
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "lib_maxdiv.so",
        ROOT / "target" / "debug" / "lib_maxdiv.so",
        ROOT / "target" / "release" / "lib_maxdiv.dylib",
        ROOT / "target" / "debug" / "lib_maxdiv.dylib",
    ]
    built = [p for p in candidates if p.exists()]
    if built:
        newest = max(built, key=lambda p: p.stat().st_mtime)
        target = HERE / "_maxdiv.so"
        if not target.exists() or target.stat().st_mtime < newest.stat().st_mtime:
            shutil.copy2(newest, target)
    if not (HERE / "_maxdiv.so").exists():
        sys.exit(
            "no built extension found; run `cargo build --release -p maxdiv-py` first"
        )
    sys.path.insert(0, str(HERE))
    import _maxdiv

    return _maxdiv


def main():
    mx = load_module()

    # Line instance 0, 1, 3: the classic single-swap example.
    d = mx.DistanceMatrix.from_points([[0.0], [1.0], [3.0]], "euclidean")
    assert d.n == 3
    assert d.get(0, 2) == 3.0
    holds, witness = d.verify_negative_type()
    assert holds and witness is None

    m = mx.Matroid.uniform(3, 2)
    assert m.rank == 2
    result = mx.run_local_search(d, m)
    assert result["set"] == [0, 2]
    assert abs(result["value"] - 3.0) < 1e-12
    opt_set, opt_value = mx.brute_force(d, m)
    assert opt_set == [0, 2] and opt_value == 3.0
    assert mx.greedy_baseline(d, m) == [0, 2]
    assert mx.dispersion_value(d, [0, 1, 2]) == 6.0
    assert mx.cross_sum(d, [0, 1], [1, 2]) == 6.0
    assert mx.default_iterations(10) == 22

    # A matrix that is not of negative type; the witness must certify it.
    bad = mx.DistanceMatrix.from_entries(
        [
            [0.0, 3.0, 1.0, 1.0],
            [3.0, 0.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 3.0],
            [1.0, 1.0, 3.0, 0.0],
        ]
    )
    holds, witness = bad.verify_negative_type()
    assert not holds
    assert abs(sum(witness)) < 1e-9
    quad = sum(
        witness[i] * witness[j] * bad.get(i, j) for i in range(4) for j in range(4)
    )
    assert quad > 0.0

    # Matroid intersection: edges of a 2x2 bipartite graph, rows x columns.
    rows = mx.Matroid.partition(4, [[0, 1], [2, 3]], [1, 1])
    cols = mx.Matroid.partition(4, [[0, 2], [1, 3]], [1, 1])
    inter = mx.Intersection(rows, cols)
    assert inter.k_common == 2
    dm = mx.DistanceMatrix.from_points(
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0]], "euclidean"
    )
    res = mx.run_intersection_local_search(dm, inter, p=2)
    assert inter.is_common_independent(res["set"])
    _, bf_value = mx.brute_force_intersection(dm, inter)
    assert res["value"] <= bf_value + 1e-9

    schedule = mx.ptas_schedule(0.5, 10)
    assert schedule["mode"] == "enumerate"
    assert schedule["p"] == 25

    # Submodular objectives: curvature and decomposition.
    lin = mx.Submodular.linear([0.1, 0.2, 0.3])
    assert lin.curvature == 0.0
    cov = mx.Submodular.coverage(2, [[0, 1]])
    assert cov.curvature == 1.0
    exp = mx.Submodular.explicit(2, [0.0, 2.0, 1.0, 2.5])
    assert abs(exp.curvature - 0.5) < 1e-12
    assert exp.decompose() == [1.5, 0.5]

    # Combined objective on the line instance with weights (5, 0, 0):
    # g-OPT is {0, 2} with value 8; the local optimum must reach at least
    # (1 - lambda_d * 4/k) * 8 = 2.
    f = mx.Submodular.linear([5.0, 0.0, 0.0])
    combined = mx.run_combined_local_search(d, m, f)
    assert combined["potential"] == "linear-exact"
    opt = mx.brute_force_combined(d, m, f)
    assert opt["g"] == 8.0
    assert math.isclose(opt["lambda_d"], 3.0 / 8.0)
    assert combined["value"] >= (1.0 - opt["lambda_d"] * 2.0) * opt["g"] - 1e-9

    print("smoke test passed")


if __name__ == "__main__":
    main()
