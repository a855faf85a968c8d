"""Smoke tests for the python bindings: the core operations round trip and a
few exact identities hold through the language boundary."""

import math
import sys

import blpp


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol * (1.0 + max(abs(a), abs(b)))


def test_environment_roundtrip():
    grid = blpp.GridSpec(x0=0.0, delta=0.5, num_cells=12, anchor_index=0)
    env = blpp.Environment.generate(7, 0, 3, grid)
    assert env.value(0, 0) == 0.0
    again = blpp.Environment.generate(7, 0, 3, grid)
    assert env.value(2, 7) == again.value(2, 7)

    blob = env.dumps()
    back = blpp.Environment.loads(blob)
    assert back.value(1, 5) == env.value(1, 5)


def test_identity_injection():
    grid = blpp.GridSpec(x0=0.0, delta=0.5, num_cells=12, anchor_index=0)
    ident = blpp.Environment.from_function(0, 3, grid, lambda line, x: x)
    # Telescoping: the maximum energy is the spatial displacement.
    assert approx(blpp.last_passage(ident, 1, 0, 9, 3), 4.0)
    path = blpp.geodesic(ident, 1, 0, 9, 3)
    assert path.jumps == [1, 1, 1]  # leftmost ties


def test_dp_against_oracle():
    grid = blpp.GridSpec(x0=0.0, delta=1.0, num_cells=6, anchor_index=0)
    env = blpp.Environment.generate(11, 0, 2, grid)
    dp = blpp.multi_last_passage(env, [0, 1], 0, [4, 6], 2)
    bf = blpp.brute_force_multi(env, [0, 1], 0, [4, 6], 2)
    assert approx(dp, bf)


def test_scaled_weights_and_ensembles():
    n = 8
    delta = blpp.experiment_delta(n, 1.0, 0.05)
    grid = blpp.experiment_grid(n, 0.0, 1.0, 0.0, 0.0, -0.6, 0.6, delta)
    env = blpp.Environment.generate(7, 0, n, grid)
    triple = blpp.CompatibleTriple(n, 0.0, 1.0)

    w, x_used, y_used = blpp.polymer_weight(env, triple, 0.0, 0.0)
    assert math.isfinite(w)
    assert abs(x_used) < 0.1 and abs(y_used) < 0.1

    ens = blpp.forward_ensemble(env, triple, 0.0, 2, [-0.4, 0.0, 0.4])
    for s in range(3):
        pair = blpp.multi_polymer_weight(
            env, triple, [0.0, 0.0], [ens.domain[s], ens.domain[s]]
        )
        assert approx(ens.value(1, s) + ens.value(2, s), pair)
        assert ens.value(1, s) >= ens.value(2, s) - 1e-9

    nr = blpp.normalize_ensemble(ens)
    assert approx(nr.value(1, 1), ens.value(1, 1))  # t12 = 1
    assert "curve_index,z,value" in ens.csv()


def test_events_and_fit():
    n = 8
    delta = blpp.experiment_delta(n, 1.0, 0.05)
    grid = blpp.experiment_grid(n, 0.0, 1.0, -0.3, 0.3, -0.3, 0.3, delta)
    env = blpp.Environment.generate(3, 0, n, grid)
    triple = blpp.CompatibleTriple(n, 0.0, 1.0)

    assert blpp.near_poly(env, triple, 2, 0.0, 0.0, 1e6)
    assert blpp.near_poly(env, triple, 1, 0.0, 0.0, 0.0)
    assert blpp.max_disjoint(env, triple, -0.2, 0.2, -0.2, 0.2, k_max=1) == 1
    assert blpp.poly_dev_reg(env, triple, 0.0, 0.0, 0.5, 1e9)
    x = blpp.fluc_statistic(env, triple, 0.0, 0.0, 0.5)
    assert math.isfinite(x)

    fit = blpp.fit_exponent([(1.0, 1.0), (2.0, 8.0), (4.0, 64.0)], log_log=True)
    assert approx(fit.slope, 3.0)

    try:
        blpp.CompatibleTriple(8, 0.1, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("off-mesh triple should raise")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok  {test.__name__}")
    print(f"{len(tests)} python smoke tests passed (blpp {blpp.__version__})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
