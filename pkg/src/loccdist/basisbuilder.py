"""Deflation loop constructing the distinguishing basis of H_B.

Given traceless Hermitian operators (A_1 .. A_N), N <= 3, the loop finds a
unit vector annihilating every quadratic form, restricts the operators to
its orthogonal complement (where the compressed traces are still ~0, so
the same argument applies), and repeats. For N <= 2 this exhausts the
whole space; for N = 3 convexity needs dimension >= 3, so the loop stops
with a 2-dimensional remainder whose vectors carry no zero guarantee.
Those "error slots" are placed FIRST in the returned ordering (indices
1..N_p), matching the convention that the guaranteed vectors are the ones
with index k > N_p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jnr, numerics
from .errors import PreconditionViolated, SearchFailed

FINAL_DIM1_TOL = 1e-9


@dataclass(frozen=True)
class DistinguishingBasis:
    """Ordered orthonormal basis with error slots up front.

    ``vectors`` has one basis vector per row; rows 0..error_slots-1 are the
    unguaranteed slots, every later row k satisfies <g_k, A_i g_k> ~ 0.
    ``residuals[k]`` is sqrt(sum_i <g_k, A_i g_k>^2) evaluated in ambient
    coordinates.
    """

    vectors: np.ndarray  # (d_B, d_B), rows g_1 .. g_{d_B}
    error_slots: int
    residuals: np.ndarray  # (d_B,)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class BasisReport:
    max_zero_residual: float
    gram_deviation: float
    tol: float
    passed: bool


def compress(a_list, complement_basis) -> list[np.ndarray]:
    """Restrict each operator to the span of an orthonormal vector set.

    ``complement_basis`` holds the spanning vectors as rows; the result is
    one r x r Hermitian matrix per operator with entries <b_j, A b_k>.
    """
    basis = np.asarray(complement_basis, dtype=np.complex128)
    if basis.ndim == 1:
        basis = basis[None, :]
    out = []
    for a in a_list:
        small = basis.conj() @ np.asarray(a, dtype=np.complex128) @ basis.T
        out.append(0.5 * (small + small.conj().T))
    return out


def _deflate(columns: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the complement of z inside span(columns).

    ``z`` is expressed in the column coordinates (length r); the result has
    r - 1 columns.
    """
    r = columns.shape[1]
    seed = np.concatenate([z[:, None], np.eye(r, dtype=np.complex128)], axis=1)
    q, _ = np.linalg.qr(seed)
    return columns @ q[:, 1:r]


def build_distinguishing_basis(a_list, d_b: int, n_p: int,
                               zero_tol: float = jnr.DEFAULT_ZERO_TOL,
                               rng: np.random.Generator | None = None, *,
                               best_effort: bool = False,
                               starts: int = jnr.DEFAULT_STARTS,
                               max_iter: int = jnr.DEFAULT_MAX_ITER
                               ) -> DistinguishingBasis:
    """Run the deflation loop until only the error slots remain.

    Preconditions (unless ``best_effort``): N <= 3 with N_p = 0 for
    N <= 2 and N_p = 2 for N = 3. ``best_effort=True`` lifts the N <= 3
    cap and drives the sum-of-squares optimizer on all N forms with no
    existence guarantee; a failed search surfaces as :class:`SearchFailed`
    with the partial basis attached.
    """
    ops = [np.asarray(a, dtype=np.complex128) for a in a_list]
    n = len(ops)
    if not best_effort:
        if n > 3:
            raise PreconditionViolated(
                f"no zero-vector guarantee exists for N = {n} operators"
            )
        expected_np = 0 if n <= 2 else 2
        if n_p != expected_np:
            raise PreconditionViolated(
                f"N = {n} requires N_p = {expected_np}, got {n_p}"
            )
    if n_p < 0 or n_p > d_b:
        raise PreconditionViolated("error slot count outside 0..d_B")
    for a in ops:
        if a.shape != (d_b, d_b):
            raise PreconditionViolated("operator shape does not match d_B")
    if rng is None:
        rng = np.random.default_rng(0)

    if n == 0:
        eye = np.eye(d_b, dtype=np.complex128)
        return DistinguishingBasis(eye, 0, np.zeros(d_b))

    columns = np.eye(d_b, dtype=np.complex128)
    zero_vectors: list[np.ndarray] = []
    while columns.shape[1] > n_p:
        r = columns.shape[1]
        if r == 1 and n <= 2:
            # Compressed traces telescope to ~0, so on a line the single
            # vector already annihilates every form; assert, don't solve.
            g = columns[:, 0]
            resid = jnr.residual_norm(ops, g)
            if resid > FINAL_DIM1_TOL:
                raise SearchFailed(
                    f"final one-dimensional residual {resid:.3e} exceeds "
                    f"{FINAL_DIM1_TOL:.1e}; deflation accumulated too much error",
                    best_vector=g,
                    best_residual=resid,
                    partial_basis=np.array(zero_vectors),
                )
            zero_vectors.append(g)
            columns = columns[:, :0]
            break
        compressed = compress(ops, columns.T)
        try:
            if best_effort and n > 3:
                result = _best_effort_zero(compressed, zero_tol, rng,
                                           starts, max_iter)
            else:
                result = jnr.find_zero_vector(compressed, zero_tol, rng,
                                              starts=starts, max_iter=max_iter)
        except SearchFailed as exc:
            exc.partial_basis = np.array(zero_vectors)
            raise
        g = columns @ result.vector
        for prev in zero_vectors:  # bound drift against accepted vectors
            g = g - np.vdot(prev, g) * prev
        g = g / np.linalg.norm(g)
        zero_vectors.append(g)
        columns = _deflate(columns, result.vector)

    slots = [columns[:, j] for j in range(columns.shape[1])]
    rows = np.array(slots + zero_vectors)
    residuals = np.array([jnr.residual_norm(ops, g) for g in rows])
    return DistinguishingBasis(rows, len(slots), residuals)


def _best_effort_zero(compressed, zero_tol, rng, starts, max_iter):
    """Optimizer-only search used above N = 3; no existence guarantee."""
    d = compressed[0].shape[0]
    h_list = [jnr._real_form(a) for a in compressed]
    ftol = (0.01 * zero_tol) ** 2
    best_x, best_f = None, np.inf
    for _ in range(starts + 1):
        z0 = numerics.random_unit_vector(d, rng)
        x0 = np.concatenate([z0.real, z0.imag])
        x, f = jnr._lm_on_sphere(h_list, x0, max_iter, ftol)
        if f < best_f:
            best_x, best_f = x, f
        if best_f <= ftol:
            break
    z = jnr._complex_from_real(best_x, d)
    z /= np.linalg.norm(z)
    resid = jnr.residual_norm(compressed, z)
    if resid > zero_tol:
        raise SearchFailed(
            f"best-effort search stalled at residual {resid:.3e}",
            best_vector=z,
            best_residual=resid,
        )
    return jnr.ZeroVectorResult(z, resid, "optimize-3")


def verify_basis(a_list, basis: DistinguishingBasis,
                 tol: float = 1e-9) -> BasisReport:
    """Re-check the zero property (k > N_p) and orthonormality."""
    rows = basis.vectors
    gram = rows.conj() @ rows.T
    gram_dev = float(np.max(np.abs(gram - np.eye(rows.shape[0]))))
    max_resid = 0.0
    for k in range(basis.error_slots, rows.shape[0]):
        for a in a_list:
            max_resid = max(max_resid, abs(float(np.vdot(rows[k], a @ rows[k]).real)))
    passed = max_resid <= tol and gram_dev <= 1e-10
    return BasisReport(max_resid, gram_dev, tol, passed)
