"""Smoke test for the structrand_py extension module."""

import math

import structrand_py as sr


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    p = sr.F2Polynomial(4, [[0, 1], [2]])
    f = sr.CubeFunction.code(p)
    assert f.n == 4 and len(f) == 16
    assert close(f.gowers_norm(3), 1.0)
    assert sr.inverse_100(f, 3) == p

    chi = sr.CubeFunction.character(5, 9)
    coeffs = chi.walsh_hadamard()
    assert close(coeffs[9], 1.0) and close(sum(abs(c) for c in coeffs), 1.0)
    assert close(chi.gowers_norm_u2_fft(), chi.gowers_norm(2))

    out = sr.inverse_99(f, 3)
    assert out["outcome"] == "recovered", out["outcome"]

    a = sr.CubeFunction.character(3, 1).values
    b = sr.CubeFunction.character(3, 6).values
    mixed = sr.CubeFunction(3, [(x + y) / math.sqrt(2) for x, y in zip(a, b)])
    dec = sr.decompose(mixed, 0.5, mode="weak")
    assert len(dec["structured_atoms"]) == 2, dec["structured_atoms"]

    xi0 = 0b101101
    points = [x for x in range(64) if bin(x & xi0).count("1") % 2 == 0]
    rep = sr.arithmetic_regularize(6, points, 0.25)
    assert rep["codimension"] == 1 and xi0 in rep["structured_characters"]

    edges = [(u, v) for u in range(8) for v in range(8, 16)]
    weak = sr.weak_regularize(16, edges, 0.25)
    assert len(weak["atoms"]) >= 1 and weak["residual_level"]["found"] <= 0.25
    part = sr.szemeredi_regularize(32, sr.gnp(32, 0.5, 7), 0.5, 2, mode="sampled", seed=7)
    assert part["parts"]

    e = sr.conditional_expectation([1.0, 3.0, 2.0, 4.0], [0, 0, 1, 1])
    assert all(close(a, b) for a, b in zip(e, [2.0, 2.0, 3.0, 3.0]))
    assert sr.level_set_factor([0.1, 0.6, 1.1], 0.5, 0.0) == [0, 1, 2]

    dec = sr.strong_factor_decompose([0.0, 0.0, 1.0, 1.0], [[0, 0, 1, 1]], 0.25)
    assert all(close(a, b) for a, b in zip(dec["f_str"]["values"], [0.0, 0.0, 1.0, 1.0]))
    assert dec["error_norm"] <= 0.25

    demo = sr.sparse_demo(n=1024, seed=3)
    assert demo["passed"], demo
    print("smoke test ok")


if __name__ == "__main__":
    main()
