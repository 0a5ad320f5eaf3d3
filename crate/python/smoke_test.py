"""Smoke test for the mixprofile extension module.

Build first, e.g. `maturin develop -m crates/py/Cargo.toml`, or
`cargo build --release -p mixprofile-py --features extension-module`
and point MIXPROFILE_LIB_DIR at a directory holding mixprofile.so.
"""

import math
import os
import sys

lib_dir = os.environ.get("MIXPROFILE_LIB_DIR")
if lib_dir:
    sys.path.insert(0, lib_dir)

import mixprofile as mp


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    # hypercube n = 1: one lazy step mixes exactly
    assert close(mp.hypercube_tv(1, 0), 0.5)
    assert close(mp.hypercube_tv(1, 3), 0.0)
    assert close(mp.hypercube_tv(3, 0), 7 / 8)

    # the m = 1 urn is the hypercube
    for t in range(12):
        assert close(mp.ehrenfest_tv(6, 1, t), mp.hypercube_tv(6, t))

    p = mp.hypercube_point(256, 0.0)
    assert p.sandwich_holds(1e-9), p
    assert close(p.limit_value, mp.gaussian_limit(0.0))
    assert close(mp.gaussian_limit(0.0), 2 * (0.5 * (1 + math.erf(1 / (2 * math.sqrt(2))))) - 1)

    g = mp.GibbsModel(8, 7, 0.25)
    assert g.n == 15
    q = g.profile_point(1.0, 6)
    assert q.sandwich_holds(1e-9), q
    assert close(q.exact_tv, g.exact_tv(q.t))

    k = mp.kcycle_point(10, 2, 0.0, 10)
    assert close(k.exact_tv, mp.kcycle_tv(10, 2, k.t))
    assert k.sandwich_holds(1e-12)

    rows = mp.verify("krawtchouk", 1)
    assert rows and all(r[4] for r in rows), rows

    a = mp.simulate_kcycle(9, 3, 4, 42, 20000)
    b = mp.simulate_kcycle(9, 3, 4, 42, 20000)
    assert a == b and sum(a) == 20000
    counts = mp.simulate_ehrenfest(4, 2, 1, 7, 20000)
    law = [1 / 3, 2 / 3, 0, 0, 0]
    stat, dof, pval, passed = mp.chi_square(counts, law)
    assert passed, (stat, dof, pval)

    try:
        mp.simulate_ehrenfest(4, 2, 1, 7, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("zero trajectories accepted")

    print("python smoke test: ok (%s)" % mp.RNG_ALGORITHM)


if __name__ == "__main__":
    main()
