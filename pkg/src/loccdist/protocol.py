"""Two-round measure-and-tell protocol compiled from a distinguishing basis.

Bob measures his subsystem in the conjugated basis {J g_k} and announces
the outcome k. Writing xi_k^l = X_l g_k, the state conditioned on outcome
k and true state l collapses Alice's side to xi_k^l; whenever k is past
the error slots these conditional vectors are pairwise orthogonal across
l, so Alice's projective measurement onto their normalized versions
identifies the state with certainty. Outcomes k inside the error slots
(k <= N_p) carry no such guarantee and are declared INCONCLUSIVE.

The probability of landing in an error slot when the true state is l is
sum_{k <= N_p} |X_l g_k|^2, which never exceeds the sum of the N_p largest
Schmidt coefficients of state l; one minus the worst such sum is the
a-priori success bound reported alongside the per-protocol figure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .basisbuilder import DistinguishingBasis
from .errors import BasisNotVerified, DimensionMismatch, ParseError, PreconditionViolated
from .states import OperatorRep, SchmidtProfile, StateFamily, conjugate_J

INCONCLUSIVE = "INCONCLUSIVE"
DEFAULT_SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class Protocol:
    """Compiled protocol: Bob's basis, Alice's branches, decision map."""

    dim_a: int
    dim_b: int
    error_slots: int
    bob_basis: np.ndarray  # (d_B, d_B), row k = J g_k
    branches: tuple[tuple[tuple[str, np.ndarray], ...], ...]  # per k
    meta: dict = field(default_factory=dict)

    @property
    def g_basis(self) -> np.ndarray:
        """The underlying distinguishing vectors g_k = J(bob basis)."""
        return np.conj(self.bob_basis)

    def decision(self, k: int, branch: int | None) -> str:
        """Verdict for Bob outcome ``k`` (0-based) and Alice branch index.

        ``branch=None`` stands for Alice's remainder outcome.
        """
        if k < self.error_slots or branch is None:
            return INCONCLUSIVE
        return self.branches[k][branch][0]


@dataclass(frozen=True)
class BoundReport:
    """Error masses and the success bounds they imply.

    ``schmidt_mass[l]`` sums the N_p largest Schmidt coefficients of state
    l (an upper bound for any protocol of this shape); ``error_mass[l]``
    is the compiled protocol's actual error-slot mass, present only once a
    protocol exists.
    """

    n_p: int
    labels: tuple[str, ...]
    schmidt_mass: np.ndarray
    error_mass: np.ndarray | None = None

    @property
    def schmidt_bound(self) -> float:
        return 1.0 - float(self.schmidt_mass.max()) if self.schmidt_mass.size else 1.0

    @property
    def protocol_bound(self) -> float | None:
        if self.error_mass is None:
            return None
        return 1.0 - float(self.error_mass.max())


def discrimination_bound(profile: SchmidtProfile, n_p: int) -> BoundReport:
    """Success bound 1 - max_l (sum of the n_p largest coefficients of l)."""
    if n_p < 0 or n_p > profile.probabilities.shape[1]:
        raise PreconditionViolated(
            f"n_p = {n_p} outside 0..min(d_A, d_B) = {profile.probabilities.shape[1]}"
        )
    return BoundReport(n_p, profile.labels, profile.top_sum(n_p))


def error_mass(rep: OperatorRep, basis: DistinguishingBasis,
               n_p: int) -> np.ndarray:
    """Per-state probability of landing in the first ``n_p`` slots."""
    masses = np.zeros(rep.size)
    for k in range(n_p):
        g = basis.vectors[k]
        for l, x in enumerate(rep.matrices):
            masses[l] += float(np.linalg.norm(x @ g) ** 2)
    return masses


def compile_protocol(family: StateFamily, rep: OperatorRep,
                     basis: DistinguishingBasis,
                     support_tol: float = DEFAULT_SUPPORT_TOL,
                     meta: dict | None = None) -> Protocol:
    """Assemble the measurement description from a verified basis.

    Verification is structural: the basis must be orthonormal, its
    recorded zero-property residuals must hold, and the conditional
    vectors within every guaranteed slot must come out orthogonal. Any
    failure raises :class:`BasisNotVerified` since the protocol's
    zero-misidentification property depends on it.
    """
    d_b = family.dim_b
    if basis.vectors.shape != (d_b, d_b):
        raise DimensionMismatch("basis does not match the family's d_B")
    gram_dev = float(np.max(np.abs(
        basis.vectors.conj() @ basis.vectors.T - np.eye(d_b)
    )))
    if gram_dev > 1e-10:
        raise BasisNotVerified(f"basis Gram deviation {gram_dev:.3e}")
    if basis.error_slots < d_b:
        worst = float(np.max(basis.residuals[basis.error_slots:]))
        if worst > 1e-8:
            raise BasisNotVerified(
                f"zero-slot residual {worst:.3e} exceeds 1e-8"
            )

    bob = np.array([conjugate_J(g) for g in basis.vectors])
    branches: list[tuple[tuple[str, np.ndarray], ...]] = []
    for k in range(d_b):
        if k < basis.error_slots:
            branches.append(())
            continue
        g = basis.vectors[k]
        entries = []
        for l, x in enumerate(rep.matrices):
            xi = x @ g
            norm = float(np.linalg.norm(xi))
            if norm > support_tol:
                entries.append((family.labels[l], xi / norm))
        for a in range(len(entries)):
            for b in range(a + 1, len(entries)):
                overlap = abs(complex(np.vdot(entries[a][1], entries[b][1])))
                if overlap > 1e-8:
                    raise BasisNotVerified(
                        f"conditional vectors for outcome {k + 1} overlap "
                        f"({entries[a][0]} vs {entries[b][0]}: {overlap:.3e})"
                    )
        branches.append(tuple(entries))
    return Protocol(family.dim_a, d_b, basis.error_slots, bob,
                    tuple(branches), dict(meta or {}))


def bound_report(rep: OperatorRep, profile: SchmidtProfile,
                 basis: DistinguishingBasis) -> BoundReport:
    """Combined report: Schmidt bound plus the compiled protocol's masses."""
    n_p = basis.error_slots
    schmidt = discrimination_bound(profile, n_p)
    return BoundReport(n_p, profile.labels, schmidt.schmidt_mass,
                       error_mass(rep, basis, n_p))


def protocol_to_json_dict(proto: Protocol) -> dict:
    """Serialize to the protocol file schema (1-based outcome keys)."""

    def vec(v):
        return [[float(c.real), float(c.imag)] for c in v]

    return {
        "dim_a": proto.dim_a,
        "dim_b": proto.dim_b,
        "n_p": proto.error_slots,
        "bob_basis": [vec(row) for row in proto.bob_basis],
        "branches": {
            str(k + 1): [
                {"label": label, "vector": vec(v)} for label, v in proto.branches[k]
            ]
            for k in range(proto.dim_b)
        },
        "meta": proto.meta,
    }


def _parse_vector(raw, length, where):
    if not isinstance(raw, list) or len(raw) != length:
        raise ParseError(f"{where}: expected {length} [re, im] pairs")
    out = np.empty(length, dtype=np.complex128)
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{where}[{i}]: expected [re, im]")
        out[i] = complex(pair[0], pair[1])
    return out


def load_protocol(source) -> Protocol:
    """Load a protocol file produced by :func:`protocol_to_json_dict`."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    try:
        dim_a = int(doc["dim_a"])
        dim_b = int(doc["dim_b"])
        n_p = int(doc["n_p"])
        raw_bob = doc["bob_basis"]
        raw_branches = doc["branches"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed field: {exc}") from exc
    if not isinstance(raw_bob, list) or len(raw_bob) != dim_b:
        raise ParseError("'bob_basis' must list d_B vectors")
    bob = np.stack([
        _parse_vector(v, dim_b, f"bob_basis[{k}]") for k, v in enumerate(raw_bob)
    ])
    branches = []
    for k in range(dim_b):
        raw = raw_branches.get(str(k + 1), [])
        entries = []
        for j, item in enumerate(raw):
            if not isinstance(item, dict) or "label" not in item or "vector" not in item:
                raise ParseError(f"branches[{k + 1}][{j}]: expected label/vector")
            entries.append((
                str(item["label"]),
                _parse_vector(item["vector"], dim_a, f"branches[{k + 1}][{j}]"),
            ))
        branches.append(tuple(entries))
    return Protocol(dim_a, dim_b, n_p, bob, tuple(branches),
                    dict(doc.get("meta", {})))
