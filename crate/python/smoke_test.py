"""Smoke test for the eklab_py extension module.

Build and install first:

    pip install --no-build-isolation ./crates/py
"""

import json
import math

import eklab_py as ek


def main():
    sf = ek.StateFunctions.qhd(2.0, 0.1)
    assert sf.pressure(2.0) == 4.0
    k, _ = sf.capillarity_k(2.0)
    assert abs(k - 0.125) < 1e-15
    mu, mu_p = sf.mu_of_rho(1.0)
    assert abs(mu_p - 0.5) < 1e-15

    try:
        ek.StateFunctions(1.0, 0.0, 1.0, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("gamma = 1 must be rejected")

    solver = ek.EkSolver(sf, 128, 0.05)
    m0 = solver.mass()
    solver.advance_to(0.05)
    assert abs(solver.mass() - m0) < 1e-12 * m0
    assert len(solver.rho()) == 128 and min(solver.rho()) > 0

    assert abs(ek.s_max(-1.0) - 0.5) < 1e-15

    ledger = json.loads(ek.check_identities(seed=0, count=10))
    assert not ledger["failures"] and ledger["checks"] > 0

    gn = json.loads(ek.gn_check(1, -1.0, draws=5))
    assert gn["max_ratio"] == 1.0

    summary = json.loads(ek.simulate("run.preset = constant\nrun.epsilon = 0.1\ngrid.cells = 64\n"))
    assert summary["dist"]["l1"] == 0.0
    assert math.isfinite(summary["gronwall"]["c_fit"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
