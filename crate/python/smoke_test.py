"""Smoke test for the weylap_py extension module.

Build the module first, then run this script from the repository root:

    cargo build --release -p weylap-py
    python3 python/smoke_test.py
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    for profile in ("release", "debug"):
        so = REPO / "target" / profile / "libweylap_py.so"
        if so.exists():
            stage = Path(tempfile.mkdtemp(prefix="weylap-py-"))
            shutil.copy(so, stage / "weylap_py.so")
            sys.path.insert(0, str(stage))
            import weylap_py

            return weylap_py
    raise SystemExit("build the extension first: cargo build -p weylap-py")


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    w = load_module()

    step = w.Signal.paper_step()
    assert step.dim == 1
    assert step.eval(0.25) == [1.0]
    assert step.eval(0.75) == [0.0]

    est = w.stepanov_norm(step, p=1.0, l=1.0, scan=(-5.0, 5.0, 0.01))
    approx(est["value"], 0.5, 1e-9)

    sine = w.Signal.sine()
    est = w.weyl_norm(sine, p=2.0, scan=(-5.0, 5.0, 0.5))
    approx(est["value"], 1.0 / math.sqrt(2.0), 1e-3)
    assert est["converged"]

    f_prim = w.Signal.paper_primitive()
    approx(f_prim.eval(10.0)[0], 0.5, 1e-9)
    d = w.stepanov_distance(f_prim, f_prim.shift(5.0), p=1.0, l=100.0, scan=(-12.0, 2.0, 0.5))
    approx(d["value"], 0.025, 3e-3)

    cls = w.classify(sine, eps=0.5, p=2.0, tau_max=25.0, scan=(-5.0, 5.0, 0.5))
    assert cls["label"] == "bohr", cls["label"]

    sol = w.solve_linear(step, t=1.0, a=-1.0, tail_tol=1e-6)
    approx(sol["value"][0], (math.sqrt(math.e) - 1.0) * math.exp(-1.0), 1e-4)

    semi = w.solve_semilinear(sine, t_start=0.0, t_end=5.0, a=-1.0, coupling=0.25, dt=0.0625)
    assert semi["picard"]["iterations"] >= 2
    assert all(r2 <= r1 for r1, r2 in zip(semi["picard"]["residuals"], semi["picard"]["residuals"][1:]))

    spec = {"kind": "scale", "params": {"factor": 2.0}, "children": [{"kind": "paper_step"}]}
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(spec, fh)
        path = fh.name
    doubled = w.Signal.from_json(path)
    assert doubled.eval(0.25) == [2.0]

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
