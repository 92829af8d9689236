"""Import the extension module straight from the build tree and poke the
main entry points."""

import json
import math
import os
import sys
import tempfile

sys.path.insert(0, sys.argv[1])
import _srlab  # noqa: E402


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


approx(_srlab.eval_expr("x1^2 + sin(x3)", 2.0, 0.0, 0.0), 4.0)
approx(_srlab.eval_expr("pi", 0.0, 0.0, 0.0), math.pi)
assert isinstance(_srlab.parse("x1*(x2 + 1)"), str)

e = _srlab.reeb("heisenberg-flat", [0.2, 0.1, -0.3])
approx(e[0], 0.0)
approx(e[1], 0.0)
approx(e[2], -1.0)

assert "reeb" in _srlab.commands()
assert "frenet-search" in _srlab.commands()

rep = _srlab.closure_search(2, 1, seed=1, restarts=20)
assert rep["converged"], rep
assert rep["verified_defect"] < 1e-6
assert rep["frame_length"] > 2 * math.pi - 1e-6

with tempfile.TemporaryDirectory() as tmp:
    cfg = os.path.join(tmp, "config.json")
    with open(cfg, "w") as f:
        json.dump({"structure": "heisenberg-flat"}, f)
    out = os.path.join(tmp, "out")
    assert _srlab.run("reeb", cfg, out) == 0
    with open(os.path.join(out, "report.json")) as f:
        report = json.load(f)
    assert report["structure"] == "heisenberg-flat"
    assert _srlab.run("no-such-command", cfg, out) == 2

print("python smoke ok")
