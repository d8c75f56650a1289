"""Bipartite state families and their operator representation.

A family of M orthonormal pure states lives on C^{d_A} (x) C^{d_B}.
Amplitudes are stored A-major: the coefficient of |a>(x)|b> sits at flat
index ``a * d_B + b``. The reference basis of the B factor is fixed to the
computational basis; complex conjugation J is entrywise conjugation in
that basis.

Each state psi corresponds one-to-one with a d_A x d_B matrix X through
``X[a, b] = psi[a * d_B + b]``, so that psi is recovered by summing
``(X f_b) (x) f_b`` over the B basis. Under this correspondence state
overlaps become trace inner products: ``Tr(X_m* X_l) = <psi_m, psi_l>``,
and the squared singular values of X are the state's Schmidt coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatch, NotOrthonormal, ParseError

DEFAULT_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class StateFamily:
    """M validated orthonormal states on C^{d_A} (x) C^{d_B}."""

    dim_a: int
    dim_b: int
    states: np.ndarray  # (M, d_A * d_B) complex amplitudes, A-major
    labels: tuple[str, ...]
    ortho_tol: float = DEFAULT_ORTHO_TOL
    reorthonormalized: bool = False

    @property
    def size(self) -> int:
        return self.states.shape[0]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown state label {label!r}") from None


@dataclass(frozen=True)
class OperatorRep:
    """The matrices X_l associated with each state of a family."""

    dim_a: int
    dim_b: int
    matrices: tuple[np.ndarray, ...]  # M matrices, each d_A x d_B
    labels: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.matrices)


@dataclass(frozen=True)
class SchmidtProfile:
    """Per-state Schmidt coefficients, each row descending and summing to 1."""

    probabilities: np.ndarray  # (M, min(d_A, d_B))
    labels: tuple[str, ...]

    def top_sum(self, count: int) -> np.ndarray:
        """Per-state sum of the ``count`` largest coefficients."""
        return self.probabilities[:, :count].sum(axis=1)


def to_operator(psi, dim_a: int, dim_b: int) -> np.ndarray:
    """Reshape a bipartite amplitude vector into its d_A x d_B matrix."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (dim_a * dim_b,):
        raise DimensionMismatch(
            f"state has {psi.shape[0] if psi.ndim == 1 else psi.shape} "
            f"amplitudes, expected {dim_a * dim_b}"
        )
    return psi.reshape(dim_a, dim_b).copy()


def from_operator(x) -> np.ndarray:
    """Inverse of :func:`to_operator`: flatten a matrix back to amplitudes."""
    return np.asarray(x, dtype=np.complex128).ravel().copy()


def conjugate_J(v) -> np.ndarray:
    """Entrywise complex conjugation (the antilinear isometry J on H_B)."""
    return np.conj(np.asarray(v, dtype=np.complex128))


def operator_rep(family: StateFamily) -> OperatorRep:
    """Operator representation X_l of every state in the family."""
    mats = tuple(
        to_operator(psi, family.dim_a, family.dim_b) for psi in family.states
    )
    return OperatorRep(family.dim_a, family.dim_b, mats, family.labels)


def schmidt_profile(family: StateFamily) -> SchmidtProfile:
    """Squared singular values of each X_l, descending."""
    rep = operator_rep(family)
    probs = np.empty((family.size, min(family.dim_a, family.dim_b)))
    for l, x in enumerate(rep.matrices):
        _, s, _ = numerics.svd(x)
        probs[l] = s**2
    return SchmidtProfile(probs, family.labels)


def _check_orthonormal(states: np.ndarray, tol: float, labels) -> None:
    gram = states.conj() @ states.T
    defect = np.abs(gram - np.eye(states.shape[0]))
    worst = np.unravel_index(np.argmax(defect), defect.shape)
    if defect[worst] > tol:
        m, l = worst
        overlap = float(np.abs(gram[m, l]))
        raise NotOrthonormal(
            f"states {labels[m]!r} and {labels[l]!r} violate orthonormality: "
            f"|<psi_{m + 1}, psi_{l + 1}>| = {overlap:.6g} "
            f"(Gram defect {float(defect[worst]):.3e} > {tol:.1e})",
            pair=(int(m), int(l)),
            overlap=overlap,
        )


def make_family(dim_a, dim_b, states, labels=None, ortho_tol=DEFAULT_ORTHO_TOL,
                reorthonormalize=False) -> StateFamily:
    """Validate raw amplitudes into a :class:`StateFamily`.

    With ``reorthonormalize=True`` a Gram-Schmidt pass is applied to the
    states before validation, and the returned family records that it
    happened. Without it, families failing ``ortho_tol`` are rejected.
    """
    if dim_a < 1 or dim_b < 1:
        raise DimensionMismatch("dimensions must be >= 1")
    arr = np.asarray(states, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[1] != dim_a * dim_b:
        raise DimensionMismatch(
            f"states array has shape {arr.shape}, expected (M, {dim_a * dim_b})"
        )
    if arr.shape[0] < 2:
        raise DimensionMismatch("a family needs at least two states")
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ParseError("non-finite amplitude in state family")
    if labels is None:
        labels = tuple(f"psi_{l + 1}" for l in range(arr.shape[0]))
    else:
        labels = tuple(str(s) for s in labels)
        if len(labels) != arr.shape[0]:
            raise DimensionMismatch("label count does not match state count")
        if len(set(labels)) != len(labels):
            raise ParseError("state labels must be unique")
    if reorthonormalize:
        basis, rank = numerics.gram_schmidt(list(arr), rank_tol=1e-12)
        if rank != arr.shape[0]:
            raise NotOrthonormal(
                "family is numerically degenerate: reorthonormalization "
                f"kept only {rank} of {arr.shape[0]} states"
            )
        arr = np.asarray(basis)
    _check_orthonormal(arr, ortho_tol, labels)
    return StateFamily(int(dim_a), int(dim_b), arr.copy(), labels,
                       float(ortho_tol), bool(reorthonormalize))


def _parse_amplitudes(raw, length, where):
    if not isinstance(raw, list) or len(raw) != length:
        raise ParseError(f"{where}: expected {length} [re, im] amplitude pairs")
    out = np.empty(length, dtype=np.complex128)
    for i, pair in enumerate(raw):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(c, (int, float)) for c in pair)):
            raise ParseError(f"{where}, amplitude {i}: expected [re, im]")
        out[i] = complex(pair[0], pair[1])
    return out


def load_family(source, ortho_tol=DEFAULT_ORTHO_TOL,
                reorthonormalize=False) -> StateFamily:
    """Load and validate a state family from a JSON document.

    ``source`` may be bytes, a str, or a readable file object. Expected
    schema::

        {"dim_a": int, "dim_b": int,
         "states": [[[re, im], ...], ...],   # A-major amplitude order
         "labels": ["name", ...]}            # optional

    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    try:
        dim_a = int(doc["dim_a"])
        dim_b = int(doc["dim_b"])
        raw_states = doc["states"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"missing or malformed field: {exc}") from exc
    if dim_a < 1 or dim_b < 1:
        raise DimensionMismatch("dim_a and dim_b must be >= 1")
    if not isinstance(raw_states, list) or len(raw_states) < 2:
        raise ParseError("'states' must list at least two states")
    states = np.stack([
        _parse_amplitudes(s, dim_a * dim_b, f"state {i}")
        for i, s in enumerate(raw_states)
    ])
    labels = doc.get("labels")
    if labels is not None and (
        not isinstance(labels, list) or not all(isinstance(s, str) for s in labels)
    ):
        raise ParseError("'labels' must be a list of strings")
    return make_family(dim_a, dim_b, states, labels, ortho_tol,
                       reorthonormalize)


def family_to_json_dict(family: StateFamily) -> dict:
    """Serialize a family back to the state-file schema."""
    return {
        "dim_a": family.dim_a,
        "dim_b": family.dim_b,
        "states": [
            [[float(c.real), float(c.imag)] for c in psi]
            for psi in family.states
        ],
        "labels": list(family.labels),
    }
