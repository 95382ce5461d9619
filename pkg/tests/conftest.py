import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def assert_multiset_close(left, right, tol=1e-8):
    """Match two complex multisets greedily by nearest neighbour."""
    left = list(np.asarray(left, dtype=complex))
    right = list(np.asarray(right, dtype=complex))
    assert len(left) == len(right)
    for value in left:
        gaps = [abs(value - other) for other in right]
        best = int(np.argmin(gaps))
        assert gaps[best] <= tol, f"no partner for {value} within {tol} (closest {gaps[best]})"
        right.pop(best)


def pair_equation_rows(a, b, companion, offset, c):
    """Operator rows and right-hand sides of the four (v, u) identities, in
    the stacked unknown [vec(v); vec(u)] with column-stacking vectorization.

    Returns a dict key -> (rows, rhs) reusable for solving any two of them
    jointly.
    """
    n, m = a.shape[0], b.shape[0]
    id_n, id_m = np.eye(n), np.eye(m)
    id_nm = np.eye(n * m)
    a2, a3 = a @ a, a @ a @ a
    b2, b3 = b @ b, b @ b @ b
    vec = lambda x: np.asarray(x).reshape(-1, order="F")
    pair_sum = np.linalg.inv(a) @ c @ np.linalg.inv(b)
    return {
        "av_ub": (np.hstack([np.kron(id_m, a), np.kron(b.T, id_n)]), vec(companion)),
        "au_vb": (np.hstack([np.kron(b.T, id_n), np.kron(id_m, a)]), vec(companion + offset)),
        "u_plus_v": (np.hstack([id_nm, id_nm]), vec(pair_sum)),
        "cubic": (np.hstack([np.kron(id_m, a3) + np.kron(b.T, a2),
                             np.kron(b3.T, id_n) + np.kron(b2.T, a)]),
                  np.zeros(n * m, dtype=complex)),
    }


def pair_equation_residuals(a, b, companion, offset, c, u, v):
    """Residuals of the four identities for a concrete (u, v)."""
    pair_sum = np.linalg.inv(a) @ c @ np.linalg.inv(b)
    return {
        "av_ub": np.linalg.norm(a @ v + u @ b - companion),
        "au_vb": np.linalg.norm(a @ u + v @ b - (companion + offset)),
        "u_plus_v": np.linalg.norm(u + v - pair_sum),
        "cubic": np.linalg.norm(a @ a @ a @ v + a @ a @ v @ b + u @ b @ b @ b + a @ u @ b @ b),
    }
