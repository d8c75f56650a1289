"""Monte Carlo execution of a compiled protocol and its exact outcome law.

The two measurement rounds have a closed-form joint distribution: Bob's
outcome k occurs with probability |X_l g_k|^2 and, conditioned on it,
Alice's branch m fires with the squared overlap of her conditional state
against the branch vector. Simulation therefore samples the exact joint
law by inverse CDF instead of collapsing state vectors; the analytic path
is itself tested, so nothing is lost and runs are cheap and reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, PreconditionViolated
from .protocol import INCONCLUSIVE, Protocol
from .states import StateFamily, to_operator


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact joint law over (Bob outcome, verdict) for one true state."""

    outcomes: tuple[tuple[int, str], ...]  # (k, verdict) pairs, 0-based k
    probabilities: np.ndarray

    def verdict_probabilities(self) -> dict[str, float]:
        agg: dict[str, float] = {}
        for (_, verdict), p in zip(self.outcomes, self.probabilities):
            agg[verdict] = agg.get(verdict, 0.0) + float(p)
        return agg


@dataclass(frozen=True)
class SimulationStats:
    trials: int
    verdicts: dict[str, int]
    success_rate: float
    misid_rate: float
    inconclusive_rate: float
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "verdicts": dict(self.verdicts),
            "success_rate": self.success_rate,
            "misid_rate": self.misid_rate,
            "inconclusive_rate": self.inconclusive_rate,
            "seed": self.seed,
        }


def _check_compatible(proto: Protocol, family: StateFamily) -> None:
    if (proto.dim_a, proto.dim_b) != (family.dim_a, family.dim_b):
        raise DimensionMismatch(
            f"protocol is for {proto.dim_a}x{proto.dim_b}, family is "
            f"{family.dim_a}x{family.dim_b}"
        )


def outcome_distribution(proto: Protocol, family: StateFamily,
                         true_index: int) -> OutcomeDistribution:
    """Exact probabilities over (k, verdict) when the true state is l."""
    _check_compatible(proto, family)
    if not 0 <= true_index < family.size:
        raise DimensionMismatch(f"state index {true_index} out of range")
    x = to_operator(family.states[true_index], family.dim_a, family.dim_b)
    outcomes: list[tuple[int, str]] = []
    probs: list[float] = []
    for k in range(proto.dim_b):
        g = np.conj(proto.bob_basis[k])
        xi = x @ g
        p_k = float(np.linalg.norm(xi) ** 2)
        if k < proto.error_slots:
            outcomes.append((k, INCONCLUSIVE))
            probs.append(p_k)
            continue
        claimed = 0.0
        for label, branch_vec in proto.branches[k]:
            p_branch = float(abs(complex(np.vdot(branch_vec, xi))) ** 2)
            outcomes.append((k, label))
            probs.append(p_branch)
            claimed += p_branch
        # Alice's remainder projector; zero up to numerical leakage.
        outcomes.append((k, INCONCLUSIVE))
        probs.append(max(p_k - claimed, 0.0))
    arr = np.array(probs)
    total = float(arr.sum())
    if abs(total - 1.0) > 1e-10:
        raise DimensionMismatch(
            f"outcome law sums to {total!r}; protocol and family disagree"
        )
    return OutcomeDistribution(tuple(outcomes), arr)


def simulate(proto: Protocol, family: StateFamily, true_index: int,
             trials: int, seed: int = 0) -> SimulationStats:
    """Sample the exact outcome law ``trials`` times, i.i.d. given ``seed``."""
    if trials < 1:
        raise PreconditionViolated("trials must be >= 1")
    dist = outcome_distribution(proto, family, true_index)
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(dist.probabilities)
    cdf[-1] = max(cdf[-1], 1.0)  # guard the last bin against rounding
    draws = np.searchsorted(cdf, rng.random(trials), side="right")
    counts: dict[str, int] = {label: 0 for label in family.labels}
    counts[INCONCLUSIVE] = 0
    for idx in draws:
        verdict = dist.outcomes[int(idx)][1]
        counts[verdict] = counts.get(verdict, 0) + 1
    true_label = family.labels[true_index]
    success = counts.get(true_label, 0)
    inconclusive = counts[INCONCLUSIVE]
    misid = trials - success - inconclusive
    return SimulationStats(
        trials=trials,
        verdicts=counts,
        success_rate=success / trials,
        misid_rate=misid / trials,
        inconclusive_rate=inconclusive / trials,
        seed=seed,
    )
