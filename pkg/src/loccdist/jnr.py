"""Joint numerical range machinery and the constructive zero-vector finder.

For traceless Hermitian operators (A_1 .. A_N) on C^d the joint numerical
range is the set of tuples (<z, A_1 z>, .., <z, A_N z>) over unit vectors
z. For N <= 2 it is convex for every d (Toeplitz-Hausdorff), and for
N = 3 it is convex once d >= 3; in both regimes tracelessness forces the
origin into the range, so a unit vector making every quadratic form vanish
exists. :func:`find_zero_vector` actually produces one:

* N = 1: balance one positive against one negative eigenvector.
* N = 2: pack the pair into a single complex form B = A_1 + i A_2,
  whose diagonal sums to ~0 in any basis; pick at most three diagonal
  entries whose convex hull contains the origin (Caratheodory), then
  chain at most two 2x2 target solves to steer the form to zero.
* N = 3: damped Gauss-Newton on the unit sphere for the residual
  sum-of-squares, multi-started from Haar-random vectors (plus one warm
  start from the N = 2 construction); convexity guarantees the global
  minimum is zero, so the search only certifies, never gambles.

All searches are deterministic given the supplied generator; the default
is a fresh ``default_rng(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import (
    NoConvergence,
    NotHermitian,
    NotUnit,
    PreconditionViolated,
    SearchFailed,
    TargetOutsideRange,
)

DEFAULT_ZERO_TOL = 1e-10
DEFAULT_STARTS = 32
DEFAULT_MAX_ITER = 200
TRACE_TOL = 1e-9


@dataclass(frozen=True)
class ZeroVectorResult:
    """A certified common zero of the quadratic forms.

    ``residual`` is sqrt(sum_i <z, A_i z>^2); ``method`` records which
    constructive path produced the vector: one of ``dim1-trace``,
    ``eig-pair``, ``caratheodory-2``, ``optimize-3``.
    """

    vector: np.ndarray
    residual: float
    method: str


def _validated_ops(a_list, herm_tol=1e-10):
    ops = [np.asarray(a, dtype=np.complex128) for a in a_list]
    if not ops:
        return ops, 0
    d = ops[0].shape[0]
    for a in ops:
        if a.shape != (d, d):
            raise PreconditionViolated("operators must share a square shape")
        defect = numerics.hermiticity_defect(a)
        if defect > herm_tol:
            raise NotHermitian(f"operator defect {defect:.3e} exceeds {herm_tol:.1e}")
    return ops, d


def forms(a_list, z) -> np.ndarray:
    """Quadratic forms <z, A_i z> (real parts) without validation."""
    return np.array([np.vdot(z, a @ z).real for a in a_list])


def residual_norm(a_list, z) -> float:
    q = forms(a_list, z)
    return float(np.sqrt(q @ q))


def evaluate_point(a_list, z, unit_tol: float = 1e-10) -> np.ndarray:
    """Joint-numerical-range point of a unit vector."""
    ops, d = _validated_ops(a_list)
    z = np.asarray(z, dtype=np.complex128)
    if ops and z.shape != (d,):
        raise PreconditionViolated("vector dimension does not match operators")
    norm = np.linalg.norm(z)
    if abs(norm - 1.0) > unit_tol:
        raise NotUnit(f"|z| = {norm!r} is not 1 within {unit_tol:.1e}")
    return forms(ops, z)


def sample_range(a_list, subspace_basis, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    """``count`` range points of Haar-random unit vectors in a subspace.

    Returns an array of shape (count, N), one point per row.
    """
    ops, d = _validated_ops(a_list)
    basis = np.asarray(subspace_basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[1] != d:
        raise PreconditionViolated("subspace basis must be rows in C^d")
    gram = basis.conj() @ basis.T
    if np.max(np.abs(gram - np.eye(basis.shape[0]))) > 1e-10:
        raise PreconditionViolated("subspace basis is not orthonormal")
    if count == 0:
        return np.empty((0, len(ops)))
    r = basis.shape[0]
    coeff = rng.standard_normal((count, r)) + 1j * rng.standard_normal((count, r))
    coeff /= np.linalg.norm(coeff, axis=1, keepdims=True)
    zs = coeff @ basis
    out = np.empty((count, len(ops)))
    for i, a in enumerate(ops):
        out[:, i] = np.einsum("nd,de,ne->n", zs.conj(), a, zs).real
    return out


# ---------------------------------------------------------------------------
# Caratheodory selection in the plane
# ---------------------------------------------------------------------------

def _pair_weight(p, q):
    """Best lambda in [0,1] minimizing |lambda p + (1-lambda) q|."""
    diff = p - q
    denom = diff @ diff
    if denom == 0.0:
        return 0.5
    lam = float(np.clip(-(q @ diff) / denom, 0.0, 1.0))
    return lam


def _segment_distance(p, q):
    lam = _pair_weight(p, q)
    point = lam * p + (1.0 - lam) * q
    return float(np.linalg.norm(point))


def caratheodory_select(points):
    """Indices (at most 3) whose convex hull contains the origin.

    ``points`` is an (n, 2) array of plane points that sum to ~0. Returns
    ``(indices, weights)`` with weights >= 0 summing to one and
    ``|sum_j weights[j] * points[indices[j]]|`` at the rounding level.
    If every point is ~0 the first index is returned alone.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise PreconditionViolated("expected a nonempty (n, 2) point array")
    n = pts.shape[0]
    norms = np.linalg.norm(pts, axis=1)
    scale = float(norms.max())
    if scale == 0.0:
        return [0], np.array([1.0])
    total = float(np.linalg.norm(pts.sum(axis=0)))
    if total > 1e-6 * norms.sum():
        raise PreconditionViolated(
            f"points sum to {total:.3e}, not ~0; origin may be outside the hull"
        )
    k = int(np.argmin(norms))
    if norms[k] <= 1e-12 * scale:
        return [k], np.array([1.0])

    # The uniform weights 1/n express 0 as a convex combination (up to the
    # tiny input sum); peel points off via affine dependencies until at
    # most three carry weight.
    lam = np.full(n, 1.0 / n)
    support = list(range(n))
    while len(support) > 3:
        sub = support[:4]
        m = np.vstack([pts[sub, 0], pts[sub, 1], np.ones(4)])
        _, _, vh = np.linalg.svd(m)
        mu = vh[-1]
        if np.max(mu) <= 0.0:
            mu = -mu
        ratios = [lam[sub[i]] / mu[i] for i in range(4) if mu[i] > 0.0]
        positions = [i for i in range(4) if mu[i] > 0.0]
        t = min(ratios)
        kill = positions[int(np.argmin(ratios))]
        for i in range(4):
            lam[sub[i]] -= t * mu[i]
        lam[sub[kill]] = 0.0
        np.clip(lam, 0.0, None, out=lam)
        support = [i for i in support if lam[i] > 0.0]
    if not support:  # all weight peeled away: points were degenerate
        return [k], np.array([1.0])

    # Re-solve the weights on the final support for an exact hit.
    best = None
    for i in support:
        cand = ([i], np.array([1.0]), norms[i])
        if best is None or cand[2] < best[2]:
            best = cand
    for ai in range(len(support)):
        for bi in range(ai + 1, len(support)):
            i, j = support[ai], support[bi]
            w = _pair_weight(pts[i], pts[j])
            resid = float(np.linalg.norm(w * pts[i] + (1 - w) * pts[j]))
            if resid < best[2]:
                best = ([i, j], np.array([w, 1 - w]), resid)
    if len(support) == 3:
        m = np.vstack([pts[support, 0], pts[support, 1], np.ones(3)])
        try:
            w3 = np.linalg.solve(m, np.array([0.0, 0.0, 1.0]))
        except np.linalg.LinAlgError:
            w3 = None
        if w3 is not None and np.min(w3) > -1e-9:
            w3 = np.clip(w3, 0.0, None)
            w3 /= w3.sum()
            resid = float(np.linalg.norm(w3 @ pts[support]))
            if resid < best[2]:
                best = (list(support), w3, resid)
    idx, weights, resid = best
    if resid > 1e-10 * scale:
        raise PreconditionViolated(
            f"no convex combination hits the origin (best {resid:.3e})"
        )
    return idx, weights


# ---------------------------------------------------------------------------
# 2x2 target solver
# ---------------------------------------------------------------------------

def _range_membership_defect(b2, w):
    """How far w sits outside the elliptical range of a 2x2 matrix (0 if in)."""
    eigs = np.linalg.eigvals(b2)
    center = eigs.sum() / 2.0
    focus = (eigs[0] - eigs[1]) / 2.0
    spread = float(np.vdot(b2, b2).real - np.abs(eigs[0]) ** 2 - np.abs(eigs[1]) ** 2)
    semi_minor = np.sqrt(max(spread, 0.0)) / 2.0
    semi_major = np.sqrt(semi_minor**2 + np.abs(focus) ** 2)
    theta = np.angle(focus) if np.abs(focus) > 0 else 0.0
    u = (complex(w) - center) * np.exp(-1j * theta)
    # Distance proxy: inflate both axes until the point fits.
    lo, hi = 0.0, abs(u) + 1.0
    if (u.real / max(semi_major, 1e-300)) ** 2 + (
        u.imag / max(semi_minor, 1e-300)
    ) ** 2 <= 1.0:
        return 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        a = semi_major + mid
        b = semi_minor + mid
        if (u.real / a) ** 2 + (u.imag / b) ** 2 <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def _form_2x2(b2, t, phi):
    c = np.exp(1j * phi) * b2[0, 1] + np.exp(-1j * phi) * b2[1, 0]
    return (
        b2[0, 0] * np.cos(t) ** 2
        + b2[1, 1] * np.sin(t) ** 2
        + 0.5 * np.sin(2 * t) * c
    )


def _newton_2x2(b2, w, t, phi, iters=60):
    best = (t, phi, abs(_form_2x2(b2, t, phi) - w))
    lam = 1e-12
    for _ in range(iters):
        t, phi, err = best
        if err == 0.0:
            break
        v = _form_2x2(b2, t, phi)
        f = np.array([(v - w).real, (v - w).imag])
        c = np.exp(1j * phi) * b2[0, 1] + np.exp(-1j * phi) * b2[1, 0]
        dt = np.sin(2 * t) * (b2[1, 1] - b2[0, 0]) + np.cos(2 * t) * c
        dphi = 0.5 * np.sin(2 * t) * 1j * (
            np.exp(1j * phi) * b2[0, 1] - np.exp(-1j * phi) * b2[1, 0]
        )
        jac = np.array([[dt.real, dphi.real], [dt.imag, dphi.imag]])
        improved = False
        for _ in range(10):
            try:
                step = np.linalg.solve(jac.T @ jac + lam * np.eye(2), -jac.T @ f)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            t_new, phi_new = t + step[0], phi + step[1]
            err_new = abs(_form_2x2(b2, t_new, phi_new) - w)
            if err_new < err:
                best = (t_new, phi_new, err_new)
                lam = max(lam / 5.0, 1e-14)
                improved = True
                break
            lam *= 10.0
        if not improved:
            break
    return best


def solve_2x2_target(b2, w):
    """Unit z in C^2 with <z, b2 z> = w, for w inside the numerical range.

    Deterministic: a 64x64 grid over the parametrization
    z = (cos t, sin t e^{i phi}) seeds a damped 2-variable Newton solve;
    grid refinement around the incumbent handles boundary targets where
    the Jacobian degenerates.
    """
    b2 = np.asarray(b2, dtype=np.complex128)
    if b2.shape != (2, 2):
        raise PreconditionViolated("expected a 2x2 matrix")
    w = complex(w)
    fro = max(1.0, float(np.linalg.norm(b2)))
    if _range_membership_defect(b2, w) > 1e-9 * fro:
        raise TargetOutsideRange(
            f"target {w!r} lies outside the numerical range of the 2x2 block"
        )
    target_tol = 1e-10 * fro

    t_lo, t_hi = 0.0, np.pi / 2.0
    p_lo, p_hi = 0.0, 2.0 * np.pi
    grid_n = 64
    best = None
    for _ in range(7):
        ts = np.linspace(t_lo, t_hi, grid_n)
        ps = np.linspace(p_lo, p_hi, grid_n, endpoint=False)
        tg, pg = np.meshgrid(ts, ps, indexing="ij")
        c = np.exp(1j * pg) * b2[0, 1] + np.exp(-1j * pg) * b2[1, 0]
        vals = (
            b2[0, 0] * np.cos(tg) ** 2
            + b2[1, 1] * np.sin(tg) ** 2
            + 0.5 * np.sin(2 * tg) * c
        )
        errs = np.abs(vals - w)
        it, ip = np.unravel_index(np.argmin(errs), errs.shape)
        if best is None or errs[it, ip] < best[2]:
            best = (float(tg[it, ip]), float(pg[it, ip]), float(errs[it, ip]))
        best = min(
            [best, _newton_2x2(b2, w, best[0], best[1])], key=lambda r: r[2]
        )
        if best[2] <= target_tol * 1e-2:
            break
        # Zoom on the incumbent; phases wrap so only t needs clamping.
        span_t = (t_hi - t_lo) / grid_n
        span_p = (p_hi - p_lo) / grid_n
        t_lo = max(0.0, best[0] - 2 * span_t)
        t_hi = min(np.pi / 2.0, best[0] + 2 * span_t)
        p_lo = best[1] - 2 * span_p
        p_hi = best[1] + 2 * span_p
        grid_n = 32
    t, phi, err = best
    if err > target_tol:
        raise NoConvergence(
            f"2x2 target solve stalled at error {err:.3e} (target {target_tol:.1e})"
        )
    return np.array([np.cos(t), np.sin(t) * np.exp(1j * phi)])


# ---------------------------------------------------------------------------
# Zero-vector construction
# ---------------------------------------------------------------------------

def _zero_one_op(a):
    values, vectors = numerics.hermitian_eig(a)
    j = int(np.argmin(np.abs(values)))
    if abs(values[j]) <= 1e-12:
        return vectors[:, j].copy()
    pos, neg = values[0], values[-1]
    if pos <= 0.0 or neg >= 0.0:
        # One-signed spectrum: only possible when every eigenvalue is at
        # the trace-noise level, so the flattest eigenvector is optimal.
        return vectors[:, j].copy()
    theta = np.arctan(np.sqrt(pos / abs(neg)))
    return np.cos(theta) * vectors[:, 0] + np.sin(theta) * vectors[:, -1]


def _zero_two_ops(a1, a2):
    d = a1.shape[0]
    b = a1 + 1j * a2
    diag = np.diagonal(b)
    pts = np.column_stack([diag.real, diag.imag])
    idx, weights = caratheodory_select(pts)
    if len(idx) == 1:
        z = np.zeros(d, dtype=np.complex128)
        z[idx[0]] = 1.0
        return z
    if len(idx) == 2:
        i, j = idx
        y = solve_2x2_target(b[np.ix_([i, j], [i, j])], 0.0)
        z = np.zeros(d, dtype=np.complex128)
        z[i], z[j] = y
        return z
    # Three support points: combine the pair whose segment passes nearest
    # the origin into an intermediate target, then finish on a 2x2 block.
    support = list(idx)
    lam = {i: float(weights[k]) for k, i in enumerate(support)}
    pairs = [
        (support[0], support[1]),
        (support[0], support[2]),
        (support[1], support[2]),
    ]
    dists = [_segment_distance(pts[i], pts[j]) for i, j in pairs]
    order = sorted(range(3), key=lambda k: (dists[k], k))
    for k in order:
        i, j = pairs[k]
        t = next(s for s in support if s not in (i, j))
        lam_ij = lam[i] + lam[j]
        if lam_ij <= 1e-14:
            z = np.zeros(d, dtype=np.complex128)
            z[t] = 1.0
            return z
        w_mid = (lam[i] * diag[i] + lam[j] * diag[j]) / lam_ij
        y2 = solve_2x2_target(b[np.ix_([i, j], [i, j])], w_mid)
        y = np.zeros(d, dtype=np.complex128)
        y[i], y[j] = y2
        achieved = complex(np.vdot(y, b @ y))
        block = np.array(
            [
                [achieved, complex(np.conj(y) @ b[:, t])],
                [complex((b @ y)[t]), complex(b[t, t])],
            ]
        )
        try:
            coeff = solve_2x2_target(block, 0.0)
        except (TargetOutsideRange, NoConvergence):
            continue  # try the next pair ordering
        z = coeff[0] * y
        z[t] += coeff[1]
        return z
    raise SearchFailed("segment splitting failed on every pair ordering")


def _real_form(a):
    """Real symmetric 2d x 2d matrix with x^T H x = <z, a z> for z=u+iv."""
    ar, ai = a.real, a.imag
    top = np.hstack([ar, -ai])
    bot = np.hstack([ai, ar])
    return np.vstack([top, bot])


def _lm_on_sphere(h_list, x0, max_iter, ftol):
    """Damped Gauss-Newton for sum_i (x^T H_i x)^2 on the unit sphere."""
    x = x0 / np.linalg.norm(x0)
    hx = [h @ x for h in h_list]
    q = np.array([x @ v for v in hx])
    f = float(q @ q)
    lam = 1e-6
    for _ in range(max_iter):
        if f <= ftol:
            break
        jrows = 2.0 * np.array(hx)
        jrows -= np.outer(jrows @ x, x)  # tangent projection
        gram = jrows @ jrows.T
        improved = False
        for _ in range(14):
            try:
                alpha = np.linalg.solve(
                    gram + lam * np.eye(len(h_list)), -q
                )
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            x_new = x + jrows.T @ alpha
            x_new /= np.linalg.norm(x_new)
            hx_new = [h @ x_new for h in h_list]
            q_new = np.array([x_new @ v for v in hx_new])
            f_new = float(q_new @ q_new)
            if f_new < f:
                x, hx, q, f = x_new, hx_new, q_new, f_new
                lam = max(lam / 5.0, 1e-14)
                improved = True
                break
            lam *= 10.0
        if not improved:
            break
    return x, f


def _complex_from_real(x, d):
    return x[:d] + 1j * x[d:]


def _polish(ops, z, zero_tol, max_iter=60):
    """A few certifying Gauss-Newton steps; never worsens the candidate."""
    if not ops:
        return z, 0.0
    d = ops[0].shape[0]
    h_list = [_real_form(a) for a in ops]
    x0 = np.concatenate([z.real, z.imag])
    ftol = min(1e-28, (0.01 * zero_tol) ** 2)
    x, f = _lm_on_sphere(h_list, x0, max_iter, ftol)
    z_new = _complex_from_real(x, d)
    if residual_norm(ops, z_new) <= residual_norm(ops, z):
        z = z_new
    return z, residual_norm(ops, z)


def _zero_three_ops(ops, zero_tol, rng, starts, max_iter):
    d = ops[0].shape[0]
    h_list = [_real_form(a) for a in ops]
    ftol = (0.01 * zero_tol) ** 2
    # Warm start: exact zero of the first two forms.
    warm = _zero_two_ops(ops[0], ops[1])
    candidates = [np.concatenate([warm.real, warm.imag])]
    for _ in range(starts):
        z = numerics.random_unit_vector(d, rng)
        candidates.append(np.concatenate([z.real, z.imag]))
    best_x, best_f = None, np.inf
    for x0 in candidates:
        x, f = _lm_on_sphere(h_list, x0, max_iter, ftol)
        if f < best_f:
            best_x, best_f = x, f
        if best_f <= ftol:
            break
    return _complex_from_real(best_x, d)


def find_zero_vector(a_list, zero_tol: float = DEFAULT_ZERO_TOL,
                     rng: np.random.Generator | None = None, *,
                     starts: int = DEFAULT_STARTS,
                     max_iter: int = DEFAULT_MAX_ITER) -> ZeroVectorResult:
    """Unit z with <z, A_i z> = 0 for all i, certified to ``zero_tol``.

    Accepts at most three traceless Hermitian operators on a common C^d;
    for three operators d >= 3 is required (the convexity regime). On a
    one-dimensional space the basis vector is returned as-is: its residual
    equals the trace defect, which the precondition already bounds.
    """
    ops, d = _validated_ops(a_list)
    n = len(ops)
    if n > 3:
        raise PreconditionViolated(f"at most 3 operators supported, got {n}")
    for i, a in enumerate(ops):
        tr = abs(complex(np.trace(a)))
        if tr > TRACE_TOL:
            raise PreconditionViolated(
                f"operator {i} has |trace| = {tr:.3e} > {TRACE_TOL:.1e}"
            )
    if n == 3 and d < 3:
        raise PreconditionViolated(
            "three operators need a space of dimension >= 3"
        )
    if rng is None:
        rng = np.random.default_rng(0)

    if n == 0 or d == 1:
        z = np.zeros(max(d, 1), dtype=np.complex128)
        z[0] = 1.0
        return ZeroVectorResult(z, residual_norm(ops, z), "dim1-trace")
    if n == 1:
        z, method = _zero_one_op(ops[0]), "eig-pair"
    elif n == 2:
        z, method = _zero_two_ops(ops[0], ops[1]), "caratheodory-2"
    else:
        z, method = _zero_three_ops(ops, zero_tol, rng, starts, max_iter), "optimize-3"
    z = z / np.linalg.norm(z)
    z, resid = _polish(ops, z, zero_tol)
    if resid > zero_tol:
        raise SearchFailed(
            f"zero-vector residual {resid:.3e} exceeds {zero_tol:.1e} "
            f"(method {method})",
            best_vector=z,
            best_residual=resid,
        )
    return ZeroVectorResult(z, resid, method)
