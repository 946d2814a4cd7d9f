"""Smoke test for the qfilter Python extension.

Build first with `cargo build -p qfilter-py` (add `--release` for speed),
then run `python3 python/smoke_test.py`.
"""

import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    for profile in ("release", "debug"):
        lib = os.path.join(ROOT, "target", profile, "libqfilter_py.so")
        if os.path.exists(lib):
            break
    else:
        sys.exit("libqfilter_py.so not found; run `cargo build -p qfilter-py` first")
    tmp = tempfile.mkdtemp(prefix="qfilter-smoke-")
    shutil.copy(lib, os.path.join(tmp, "qfilter.so"))
    sys.path.insert(0, tmp)
    import qfilter

    return qfilter


def main():
    qf = load()

    rho = qf.rho_xt(0.63, 0.05)
    assert (rho.dim_a, rho.dim_b) == (3, 3)
    ppt, _ = rho.ppt()
    assert ppt

    phi = qf.Witness("choi-phi:A")
    detected, margin = phi.detect(rho)
    assert not detected and margin > 0

    filt = qf.LocalFilter.resolve("choi-example")
    filtered, yield_ = filt.apply(rho)
    detected, margin = phi.detect(filtered)
    assert detected and margin < 0
    assert 0 < yield_ <= filt.yield_bound()

    state, prob = qf.protocol_analytic(filt, rho)
    diff = max(abs(a - b) for ra, rb in zip(state.matrix(), filtered.matrix()) for a, b in zip(ra, rb))
    assert diff < 1e-10

    run = qf.run_protocol(filt, rho, 2000, 7)
    assert run["shots"] == 2000 and run["accepted"] <= 2000
    assert abs(run["acceptance_rate"] - prob) < 0.05

    third = [[1 / 3 if i == j else 0 for j in range(3)] for i in range(3)]
    _, p = qf.postselect_diag([1.0, 0.625, 0.625], third)
    assert abs(p - 0.59375) < 1e-15

    p = qf.build_projector([0.6, 1.0])
    assert len(p) == 4 and abs(p[0][2] - (0.6 * 0.4) ** 0.5) < 1e-15

    bell = qf.bell_state()
    assert qf.schmidt_rank(2, 2, [1, 0, 0, 1]) == 2
    assert not bell.ppt()[0]

    rows = qf.scan_window(0.05, 0.61, 0.65, 5, "choi-phi:A", filt)
    assert all(r[1] >= -1e-10 and r[2] < -1e-10 for r in rows)

    try:
        qf.rho_xt(0.5, -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative t accepted")

    same = qf.DensityOperator.from_json(rho.to_json())
    assert same.matrix() == rho.matrix()

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
