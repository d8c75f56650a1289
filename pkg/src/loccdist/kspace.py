"""Traceless Hermitian operator space attached to a state family.

For a family with operator representation (X_1 .. X_M) the relevant space
is the real span of the symmetrized cross products

    X_m* X_l + X_l* X_m      and      i (X_m* X_l - X_l* X_m),   m != l,

acting on H_B. Because the states are orthonormal every generator is
traceless, so the span is a real vector space of traceless Hermitian
matrices of dimension N <= M(M-1). A vector g with <g, A_i g> = 0 for a
basis (A_1 .. A_N) of this span is exactly a vector for which Alice's
conditional states X_l g are pairwise orthogonal; that equivalence is what
the rest of the pipeline builds on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import PreconditionViolated
from .states import OperatorRep

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class KSpaceBasis:
    """HS-orthonormal basis of the traceless Hermitian span.

    ``near_threshold_residuals`` records Gram-Schmidt residual norms that
    fell within a factor 10 of the drop threshold (relative to it); a
    nonempty list means the computed dimension is numerically fragile.
    """

    dim_n: int
    operators: tuple[np.ndarray, ...]  # N Hermitian traceless d_B x d_B
    generator_count: int
    near_threshold_residuals: tuple[float, ...] = ()


def gram_operators(rep: OperatorRep) -> np.ndarray:
    """All M x M cross products G[m, l] = X_m* X_l, each d_B x d_B."""
    m = rep.size
    table = np.empty((m, m, rep.dim_b, rep.dim_b), dtype=np.complex128)
    for a in range(m):
        xa = rep.matrices[a].conj().T
        for b in range(m):
            table[a, b] = xa @ rep.matrices[b]
    return table


def _raw_generators(rep: OperatorRep) -> list[np.ndarray]:
    gens = []
    table = gram_operators(rep)
    for m in range(rep.size):
        for l in range(m + 1, rep.size):
            g_ml, g_lm = table[m, l], table[l, m]
            gens.append(g_ml + g_lm)
            gens.append(1j * (g_ml - g_lm))
    return gens


def _project_traceless_hermitian(a: np.ndarray) -> np.ndarray:
    # Generators are traceless Hermitian in exact arithmetic; this kills
    # the O(ortho_tol) dirt inherited from imperfect input orthonormality.
    h = 0.5 * (a + a.conj().T)
    d = h.shape[0]
    return h - (np.trace(h).real / d) * np.eye(d)


def build_kspace(rep: OperatorRep, rank_tol: float = DEFAULT_RANK_TOL) -> KSpaceBasis:
    """HS-orthonormal basis of the real span of the M(M-1) generators.

    ``rank_tol`` is relative to the largest generator HS-norm; generators
    whose residual after projection drops below it do not contribute to
    the dimension. N = 0 (all generators vanish) is a valid outcome.
    """
    if rep.size < 2:
        raise PreconditionViolated("need at least two states")
    gens = [_project_traceless_hermitian(g) for g in _raw_generators(rep)]
    scale = max(float(np.linalg.norm(g)) for g in gens)
    if scale == 0.0:
        return KSpaceBasis(0, (), len(gens))
    basis, rank, residuals = numerics._orthonormalize(gens, rank_tol)
    # Coefficients are real for Hermitian inputs, so the span stays
    # Hermitian; re-project to keep the invariants at machine precision.
    basis = tuple(_project_traceless_hermitian(q) for q in basis)
    threshold = rank_tol * scale
    near = tuple(
        r / threshold for r in residuals
        if threshold * 0.1 <= r <= threshold * 10.0
    )
    return KSpaceBasis(rank, basis, len(gens), near)


@dataclass(frozen=True)
class TracelessReport:
    trace_defects: tuple[float, ...]
    hermiticity_defects: tuple[float, ...]
    tol: float
    passed: bool


def verify_traceless(basis: KSpaceBasis, tol: float = 1e-10) -> TracelessReport:
    """Per-operator |Tr A_i| and Hermiticity defects, pass/fail at ``tol``."""
    traces = tuple(float(abs(np.trace(a))) for a in basis.operators)
    herms = tuple(numerics.hermiticity_defect(a) for a in basis.operators)
    passed = all(t <= tol for t in traces) and all(h <= tol for h in herms)
    return TracelessReport(traces, herms, tol, passed)
