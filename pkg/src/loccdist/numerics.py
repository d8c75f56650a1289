"""Dense complex linear-algebra kernel.

Vectors are 1-d ``complex128`` numpy arrays, matrices 2-d. Eigen- and
singular-value decompositions are delegated to LAPACK via numpy but wrapped
so that the ordering convention (descending), the validation errors, and
the residual guarantees required by the rest of the pipeline live in one
place. All functions are pure; randomness enters only through an explicit
``numpy.random.Generator``.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence, NotHermitian, ShapeMismatch

HERMITICITY_TOL = 1e-10
DEFAULT_RANK_TOL = 1e-8


def _as_complex(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("non-finite entries")
    return arr


def hermiticity_defect(a) -> float:
    """Largest entrywise deviation |A - A*|."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hermitian_eig(a, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(values, vectors)`` with eigenvectors as columns, so that
    ``a @ vectors[:, j] == values[j] * vectors[:, j]``.
    """
    a = _as_complex(a)
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"symmetry defect {defect:.3e} exceeds {tol:.1e}")
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    # eigh returns ascending order; the package convention is descending.
    return values[::-1].copy(), vectors[:, ::-1].copy()


def svd(x):
    """Thin SVD with ``x = left @ diag(singulars) @ right.conj().T``.

    Singular values come back descending and nonnegative.
    """
    x = _as_complex(x)
    if x.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {x.shape}")
    try:
        u, s, vh = np.linalg.svd(x, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return u, s, vh.conj().T


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(A* B); also the plain inner product
    when the arguments are vectors."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def _orthonormalize(items, rank_tol):
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Returns ``(kept, rank, residual_norms)`` where ``residual_norms[i]`` is
    the norm of item ``i`` after projecting out the basis accepted so far.
    The drop threshold is ``rank_tol`` times the largest input norm.
    """
    arrays = [np.asarray(v, dtype=np.complex128) for v in items]
    if not arrays:
        raise ValueError("empty input")
    shape = arrays[0].shape
    for v in arrays:
        if v.shape != shape:
            raise ShapeMismatch("inputs do not share a common shape")
    scale = max(float(np.linalg.norm(v)) for v in arrays)
    threshold = rank_tol * scale
    basis: list[np.ndarray] = []
    residuals: list[float] = []
    for v in arrays:
        w = v.copy()
        for _ in range(2):  # second pass controls cancellation error
            for q in basis:
                w = w - np.vdot(q, w) * q
        norm = float(np.linalg.norm(w))
        residuals.append(norm)
        if norm >= threshold and norm > 0.0:
            basis.append(w / norm)
    return basis, len(basis), residuals


def gram_schmidt(items, rank_tol: float = DEFAULT_RANK_TOL):
    """Orthonormalize a list of vectors or matrices.

    Works under the standard inner product for vectors and the
    Hilbert-Schmidt one for matrices. Inputs whose residual after
    projection falls below ``rank_tol`` times the largest input norm are
    dropped. Returns ``(orthonormal_list, rank)``.
    """
    basis, rank, _ = _orthonormalize(items, rank_tol)
    return basis, rank


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform unit vector on the complex sphere of dimension ``dim``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    while True:
        z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        norm = np.linalg.norm(z)
        if norm > 1e-12:  # redraw on the measure-zero degenerate draw
            return z / norm
