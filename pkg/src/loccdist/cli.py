"""Command-line entry point wiring the discrimination pipeline.

Subcommands: ``analyze`` (family diagnostics and success bound),
``compile`` (build and write a protocol file), ``simulate`` (Monte Carlo
runs of a protocol), ``bound`` (Schmidt bound for a chosen error-slot
count), and ``jnr-sample`` (CSV point cloud of the joint numerical range).

Exit codes: 0 success, 2 invalid input, 3 unsupported regime (operator
space too large, or empty where the command needs it), 4 internal search
failure. All output is deterministic given identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import basisbuilder, jnr, kspace, protocol, simulator, states
from .errors import LoccdistError, SearchFailed

DEFAULT_RANK_TOL = kspace.DEFAULT_RANK_TOL
DEFAULT_SUPPORT_TOL = protocol.DEFAULT_SUPPORT_TOL


@dataclass(frozen=True)
class AnalysisReport:
    """What ``analyze`` prints: dimensions, operator-space size, the
    applicable guarantee tier, and the success bound it implies."""

    dim_a: int
    dim_b: int
    m: int
    n: int
    generator_count: int
    theorem: str  # "2.1" (deterministic), "2.2" (conclusive), "none"
    n_p: int | None
    schmidt_bound: float | None
    error_masses: dict[str, float] | None
    tolerances: dict
    warnings: list[str]

    def to_json_dict(self) -> dict:
        return {
            "dim_a": self.dim_a,
            "dim_b": self.dim_b,
            "m": self.m,
            "n": self.n,
            "generator_count": self.generator_count,
            "theorem": self.theorem,
            "n_p": self.n_p,
            "schmidt_bound": self.schmidt_bound,
            "error_masses": self.error_masses,
            "tolerances": self.tolerances,
            "warnings": self.warnings,
        }


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _tolerances(args) -> dict:
    return {
        "zero_tol": args.tol,
        "ortho_tol": args.ortho_tol,
        "rank_tol": DEFAULT_RANK_TOL,
        "support_tol": DEFAULT_SUPPORT_TOL,
    }


def _load_family(args) -> states.StateFamily:
    with open(args.states, "rb") as handle:
        return states.load_family(handle, ortho_tol=args.ortho_tol,
                                  reorthonormalize=args.reorthonormalize)


def _regime(n: int) -> tuple[str, int | None]:
    if n <= 2:
        return "2.1", 0
    if n == 3:
        return "2.2", 2
    return "none", None


def _family_analysis(args):
    family = _load_family(args)
    rep = states.operator_rep(family)
    basis = kspace.build_kspace(rep, rank_tol=DEFAULT_RANK_TOL)
    profile = states.schmidt_profile(family)
    return family, rep, basis, profile


def _analysis_warnings(family, basis) -> list[str]:
    warnings = []
    if family.reorthonormalized:
        warnings.append("input states were reorthonormalized before analysis")
    if basis.near_threshold_residuals:
        ratios = ", ".join(f"{r:.2f}" for r in basis.near_threshold_residuals)
        warnings.append(
            "operator-space dimension is numerically fragile: Gram-Schmidt "
            f"residuals within 10x of the rank threshold (ratios {ratios})"
        )
    return warnings


def cmd_analyze(args) -> int:
    family, rep, basis, profile = _family_analysis(args)
    theorem, n_p = _regime(basis.dim_n)
    if n_p is None:
        bound_value = None
    else:
        bound_value = protocol.discrimination_bound(profile, n_p).schmidt_bound
    warnings = _analysis_warnings(family, basis)
    if theorem == "none":
        warnings.append(
            f"operator space has dimension {basis.dim_n} > 3: no "
            "distinguishability guarantee applies; compile requires "
            "--best-effort and offers no success bound"
        )
    report = AnalysisReport(
        dim_a=family.dim_a,
        dim_b=family.dim_b,
        m=family.size,
        n=basis.dim_n,
        generator_count=basis.generator_count,
        theorem=theorem,
        n_p=n_p,
        schmidt_bound=bound_value,
        error_masses=None,
        tolerances=_tolerances(args),
        warnings=warnings,
    )
    _emit(report.to_json_dict())
    return 0


def cmd_compile(args) -> int:
    family, rep, kbasis, profile = _family_analysis(args)
    theorem, n_p = _regime(kbasis.dim_n)
    if theorem == "none" and not args.best_effort:
        sys.stderr.write(
            f"error: operator space has dimension {kbasis.dim_n} > 3; no "
            "guarantee exists. Rerun with --best-effort to try the "
            "unguaranteed optimizer.\n"
        )
        return 3
    if n_p is None:
        n_p = 2  # best-effort mirrors the three-operator regime
    rng = np.random.default_rng(args.seed)
    dbasis = basisbuilder.build_distinguishing_basis(
        kbasis.operators, family.dim_b, n_p, zero_tol=args.tol, rng=rng,
        best_effort=args.best_effort,
    )
    meta = {
        "seed": args.seed,
        "tolerances": _tolerances(args),
        "best_effort": bool(args.best_effort and theorem == "none"),
    }
    proto = protocol.compile_protocol(family, rep, dbasis,
                                      support_tol=DEFAULT_SUPPORT_TOL,
                                      meta=meta)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(json.dumps(protocol.protocol_to_json_dict(proto),
                                indent=2, sort_keys=True) + "\n")
    report = protocol.bound_report(rep, profile, dbasis)
    check = basisbuilder.verify_basis(kbasis.operators, dbasis, tol=1e-9)
    summary = {
        "out": args.out,
        "n": kbasis.dim_n,
        "n_p": dbasis.error_slots,
        "theorem": theorem,
        "error_masses": {
            label: float(mass)
            for label, mass in zip(report.labels, report.error_mass)
        },
        "schmidt_bound": report.schmidt_bound if theorem != "none" else None,
        "protocol_bound": report.protocol_bound,
        "max_zero_residual": check.max_zero_residual,
        "gram_deviation": check.gram_deviation,
        "verified": check.passed,
        "warnings": _analysis_warnings(family, kbasis),
    }
    _emit(summary)
    return 0


def cmd_simulate(args) -> int:
    with open(args.protocol, "rb") as handle:
        proto = protocol.load_protocol(handle)
    family = _load_family(args)
    try:
        true_index = family.index_of(args.true_state)
    except KeyError:
        sys.stderr.write(
            f"error: unknown state label {args.true_state!r}; family has "
            f"{', '.join(family.labels)}\n"
        )
        return 2
    if args.trials < 1:
        sys.stderr.write("error: --trials must be >= 1\n")
        return 2
    stats = simulator.simulate(proto, family, true_index, args.trials,
                               seed=args.seed)
    _emit(stats.to_json_dict())
    return 0


def cmd_bound(args) -> int:
    family = _load_family(args)
    profile = states.schmidt_profile(family)
    if args.np < 0 or args.np > min(family.dim_a, family.dim_b):
        sys.stderr.write(
            f"error: --np must lie in 0..{min(family.dim_a, family.dim_b)}\n"
        )
        return 2
    report = protocol.discrimination_bound(profile, args.np)
    _emit({
        "n_p": args.np,
        "schmidt_profiles": {
            label: [float(p) for p in row]
            for label, row in zip(profile.labels, profile.probabilities)
        },
        "bound": report.schmidt_bound,
    })
    return 0


def cmd_jnr_sample(args) -> int:
    family, rep, basis, _ = _family_analysis(args)
    if basis.dim_n == 0:
        sys.stderr.write(
            "error: the operator space is zero-dimensional; there is no "
            "numerical range to sample\n"
        )
        return 3
    rng = np.random.default_rng(args.seed)
    full = np.eye(family.dim_b, dtype=np.complex128)
    points = jnr.sample_range(basis.operators, full, args.samples, rng)
    lines = [",".join(f"x{i + 1}" for i in range(basis.dim_n))]
    for row in points:
        lines.append(",".join(f"{v:.17g}" for v in row))
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=jnr.DEFAULT_ZERO_TOL,
                        help="zero-vector residual tolerance (default 1e-10)")
    common.add_argument("--ortho-tol", type=float, default=states.DEFAULT_ORTHO_TOL,
                        help="family orthonormality tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for every randomized step (default 0)")
    common.add_argument("--reorthonormalize", action="store_true",
                        help="Gram-Schmidt the input states instead of rejecting "
                             "a near-orthonormal family")
    common.add_argument("--best-effort", action="store_true",
                        help="allow compiling families whose operator space has "
                             "dimension > 3 (no success guarantee)")

    parser = argparse.ArgumentParser(
        prog="loccdist",
        description="LOCC discrimination of orthonormal bipartite pure states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common],
                       help="report operator-space dimension and success bound")
    p.add_argument("states", help="state family JSON file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compile", parents=[common],
                       help="build a protocol file from a state family")
    p.add_argument("states", help="state family JSON file")
    p.add_argument("-o", "--out", required=True, help="protocol output path")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", parents=[common],
                       help="Monte Carlo runs of a compiled protocol")
    p.add_argument("protocol", help="protocol JSON file")
    p.add_argument("states", help="state family JSON file")
    p.add_argument("--true-state", required=True,
                   help="label of the state actually prepared")
    p.add_argument("--trials", type=int, default=10000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", parents=[common],
                       help="Schmidt profile and success bound for a slot count")
    p.add_argument("states", help="state family JSON file")
    p.add_argument("--np", type=int, required=True, dest="np",
                   help="number of error slots")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("jnr-sample", parents=[common],
                       help="sample the joint numerical range to CSV")
    p.add_argument("states", help="state family JSON file")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("-o", "--out", default=None,
                   help="CSV output path (default: stdout)")
    p.set_defaults(func=cmd_jnr_sample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SearchFailed as exc:
        sys.stderr.write(f"error: internal search failure: {exc}\n")
        if exc.best_residual is not None:
            sys.stderr.write(
                f"  best candidate residual: {exc.best_residual:.6e}\n"
            )
        if exc.partial_basis is not None and len(exc.partial_basis):
            sys.stderr.write(
                f"  partial basis of {len(exc.partial_basis)} vector(s) found "
                "before the failure\n"
            )
        return 4
    except (LoccdistError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
