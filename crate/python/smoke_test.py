"""Smoke test for the normeq_py extension module.

Build and install with `pip install ./crates/python` (or `maturin develop`
inside crates/python), then run `python python/smoke_test.py`.
"""

import math

import normeq_py as nq


def check_closed_form():
    # A = 2I, b = (0.5): x = (1 - sqrt(0.5)), mu = x.
    p = nq.Problem.dense([[0.0]], [0.5])
    exact = 1.0 - math.sqrt(0.5)
    for solver in ["fp", "rfpi", "newton", "sda"]:
        r = p.solve(solver)
        assert r.converged, (solver, r)
        assert abs(r.mu - exact) < 1e-14, (solver, r.mu)
        assert len(r.residual_history) == r.iterations


def check_random_instances():
    for p in [nq.Problem.example1(60, seed=3), nq.Problem.example2(40, seed=4)]:
        mu_star = p.mu_star()
        for solver in ["rfpi", "newton", "sda"]:
            r = p.solve(solver)
            assert r.converged, (p, solver, r)
            assert abs(r.mu - mu_star) < 1e-12
            assert p.residual(r.x) < 1e-13
        back = nq.Problem.from_json(p.to_json())
        assert back.a == p.a and back.b == p.b
        assert p.verify_bound(1e-8, 3, 7)["passed"]


def check_laplacian():
    l = [
        [3.0, -1.0, -1.0, -1.0],
        [-1.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 2.0, -1.0],
        [-1.0, 0.0, -1.0, 2.0],
    ]
    out = nq.laplacian_sqrt(l)
    s = out["root"]
    sq = [[sum(s[i][k] * s[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
    assert max(abs(sq[i][j] - l[i][j]) for i in range(4) for j in range(4)) < 1e-12
    assert max(abs(a - b) for a, b in zip(out["x"].x, out["y"])) < 1e-9


def check_symbol_sqrt_and_errors():
    lo, g = nq.symbol_sqrt(-1, [0.1, 0.2, 0.1])
    assert lo <= -1 and all(c >= -1e-15 for c in g)
    try:
        nq.Problem.dense([[0.0]], [2.0])
    except nq.NormeqError:
        pass
    else:
        raise AssertionError("invalid problem accepted")


if __name__ == "__main__":
    check_closed_form()
    check_random_instances()
    check_laplacian()
    check_symbol_sqrt_and_errors()
    print("normeq_py smoke test passed")
