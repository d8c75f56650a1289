import numpy as np
import pytest

from loccdist import families, kspace, states

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _sphere_points_2(params):
    t, p = params
    return np.column_stack([np.cos(t), np.sin(t) * np.exp(1j * p)])


def _sphere_points_3(params):
    t1, t2, p1, p2 = params
    s1 = np.sin(t1)
    return np.column_stack([
        np.cos(t1),
        s1 * np.cos(t2) * np.exp(1j * p1),
        s1 * np.sin(t2) * np.exp(1j * p2),
    ])


def grid_oracle_min_residual(ops, rounds=5):
    """Independent brute-force check that the forms have a common zero.

    Scans >= 10^6 grid points of an explicit parametrization of the unit
    sphere in C^2 or C^3, then zooms the grid around the incumbent. Shares
    nothing with the production solver beyond numpy.
    """
    d = ops[0].shape[0]
    if d == 2:
        bounds = [(0.0, np.pi / 2), (0.0, 2 * np.pi)]
        counts0, counts_zoom = [1024, 1024], [96, 96]
        embed = _sphere_points_2
    elif d == 3:
        bounds = [(0.0, np.pi / 2), (0.0, np.pi / 2),
                  (0.0, 2 * np.pi), (0.0, 2 * np.pi)]
        counts0, counts_zoom = [32, 32, 32, 32], [14, 14, 14, 14]
        embed = _sphere_points_3
    else:
        raise ValueError("oracle supports d in {2, 3} only")
    orig = list(bounds)
    counts = counts0
    best = np.inf
    best_params = None
    for _ in range(rounds):
        axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(bounds, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = [m.ravel() for m in mesh]
        zs = embed(flat)
        resid_sq = np.zeros(zs.shape[0])
        for a in ops:
            vals = np.einsum("nd,de,ne->n", zs.conj(), a, zs).real
            resid_sq += vals**2
        idx = int(np.argmin(resid_sq))
        if resid_sq[idx] < best:
            best = resid_sq[idx]
            best_params = [f[idx] for f in flat]
        new_bounds = []
        for (lo, hi), n, (olo, ohi), c in zip(bounds, counts, orig, best_params):
            h = (hi - lo) / (n - 1)
            new_bounds.append((max(olo, c - 2 * h), min(ohi, c + 2 * h)))
        bounds = new_bounds
        counts = counts_zoom
    return float(np.sqrt(best))


def origin_in_hull(points, tol):
    """Nonnegative-least-squares membership test for the origin."""
    from scipy.optimize import nnls

    pts = np.asarray(points, dtype=float)
    a = np.vstack([pts.T, np.ones(pts.shape[0])])
    b = np.zeros(pts.shape[1] + 1)
    b[-1] = 1.0
    _, resid = nnls(a, b)
    return resid <= tol


def random_traceless_hermitian(dim, rng, norm=1.0):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = 0.5 * (m + m.conj().T)
    h -= (np.trace(h).real / dim) * np.eye(dim)
    return norm * h / np.linalg.norm(h)


def random_orthonormal_states(dim, count, rng):
    m = rng.standard_normal((dim, count)) + 1j * rng.standard_normal((dim, count))
    q, _ = np.linalg.qr(m)
    return q[:, :count].T.copy()


def random_family(dim_a, dim_b, count, rng, labels=None):
    vecs = random_orthonormal_states(dim_a * dim_b, count, rng)
    return states.make_family(dim_a, dim_b, vecs, labels)


def family_pipeline(family, rank_tol=kspace.DEFAULT_RANK_TOL):
    rep = states.operator_rep(family)
    return rep, kspace.build_kspace(rep, rank_tol=rank_tol)


def random_n3_family(rng, probs=None):
    """Random family on C^4 (x) C^4 whose operator space has dimension 3.

    Three coefficient matrices V C^j D W share the singular values in D;
    the cross products W* D C^k D W (k = 1, 2) span exactly the three
    traceless Hermitian directions carried by the shifted diagonals.
    """
    if probs is None:
        raw = rng.uniform(0.5, 2.0, size=4)
        probs = np.sort(raw / raw.sum())[::-1]
    d_mat = np.diag(np.sqrt(probs)).astype(np.complex128)
    shift = np.zeros((4, 4), dtype=np.complex128)
    for j in range(4):
        shift[(j + 1) % 4, j] = 1.0
    v, _ = np.linalg.qr(rng.standard_normal((4, 4))
                        + 1j * rng.standard_normal((4, 4)))
    w, _ = np.linalg.qr(rng.standard_normal((4, 4))
                        + 1j * rng.standard_normal((4, 4)))
    vecs = [
        states.from_operator(v @ np.linalg.matrix_power(shift, j) @ d_mat @ w)
        for j in range(3)
    ]
    return states.make_family(4, 4, vecs)


@pytest.fixture
def bell_pair():
    return families.bell_pair()


@pytest.fixture
def three_bells():
    return families.three_bells()


@pytest.fixture
def product_pair():
    return families.product_pair()


@pytest.fixture
def profile_family():
    return families.profile_family()
