"""Command-line surface: verify codes, sweep fidelity curves, check bounds,
average over misestimated damping, run one-shot recoveries, dump codes.

Exit codes: 0 success (and verification passed), 1 verification-negative,
2 usage / IO / schema errors.  All randomness sits behind ``--seed``;
identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .channels import ad_code_channel, apply_channel
from .codes import (QuantumCode, bare_qubit_code, build_bosonic_code,
                    build_family_code, build_literature_41_code,
                    build_two_qutrit_code, code_to_document, load_code)
from .errors import AdqecError, ChiZero
from .fidelity import (RobustnessConfig, curves_to_csv, fidelity_curve,
                       robust_entanglement_fidelity)
from .hamming import check_bound, reports_to_csv, reports_to_json, verify_family_optimality
from .recovery import correct_state, standard_recovery
from .verifier import (DEFAULT_GAMMA_SAMPLES, ad_grouped_channel,
                       check_theorem1, check_theoremS2)

#: Parameter tuples quoted as the family's sample combinations.
SAMPLE_TUPLES = ((3, 1, 1), (5, 1, 2), (7, 2, 1), (7, 1, 3), (11, 2, 2), (15, 3, 1))

BUILTIN_LABELS = ("31", "51", "41", "qutrit2", "bare")


class UsageError(Exception):
    pass


# =============================================================================
# Argument parsing helpers
# =============================================================================

def parse_family(text: str) -> tuple:
    """Accept 'k=1,t=2' or '1,2'."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise UsageError(f"family spec needs two entries, got {text!r}")
    values = {}
    for pos, part in enumerate(parts):
        if "=" in part:
            key, _, val = part.partition("=")
            values[key.strip()] = val.strip()
        else:
            values["kt"[pos]] = part
    try:
        return int(values["k"]), int(values["t"])
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad family spec {text!r}") from exc


def parse_angle(text: str) -> float:
    """Accept plain floats and pi expressions like 'pi', 'pi/2', '3pi/4'."""
    text = text.strip().lower()
    if "pi" in text:
        head, _, tail = text.partition("pi")
        factor = float(head) if head not in ("", "+", "-") else (-1.0 if head == "-" else 1.0)
        divisor = float(tail.lstrip("/")) if tail else 1.0
        return factor * math.pi / divisor
    return float(text)


def parse_gamma_grid(text: str) -> list:
    """'start:stop:count' (inclusive endpoints) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"gamma grid spec must be start:stop:count, got {text!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError("gamma grid count must be >= 1")
        grid = [start] if count == 1 else list(np.linspace(start, stop, count))
    else:
        grid = [float(p) for p in text.split(",") if p.strip()]
    if not grid or min(grid) < 0.0 or max(grid) > 1.0:
        raise UsageError("gamma grid must be nonempty and within [0, 1]")
    return [float(g) for g in grid]


def resolve_code(selector: str) -> tuple:
    """Map a code selector to (QuantumCode, recovery_kind, label).

    Selectors: builtin labels 31 / 51 / 41 / qutrit2 / bare with an optional
    -prob / -petz / -none suffix, 'family:k,t', 'bosonic:t,qp', or a path to
    a JSON code document.
    """
    recovery = "probabilistic"
    base = selector
    for suffix, kind in (("-prob", "probabilistic"), ("-petz", "petz"), ("-none", "none")):
        if selector.endswith(suffix):
            base, recovery = selector[: -len(suffix)], kind
            break
    if base == "31":
        code = build_family_code(1, 1)
    elif base == "51":
        code = build_family_code(1, 2)
    elif base == "41":
        code = build_literature_41_code()
    elif base == "qutrit2":
        code = build_two_qutrit_code()
    elif base == "bare":
        code = bare_qubit_code()
        if not selector.endswith(("-prob", "-petz")):
            recovery = "none"
    elif base.startswith("family:"):
        k, t = parse_family(base.split(":", 1)[1])
        code = build_family_code(k, t)
    elif base.startswith("bosonic:"):
        parts = base.split(":", 1)[1].split(",")
        if len(parts) != 2:
            raise UsageError(f"bosonic spec needs t,qp, got {base!r}")
        code = build_bosonic_code(1, 2, int(parts[0]), int(parts[1]))
    elif base.endswith(".json"):
        with open(base, encoding="utf-8") as fh:
            code = load_code(json.load(fh))
    else:
        raise UsageError(f"unknown code selector {selector!r}")
    return code, recovery, selector


def _load_selected_code(args) -> QuantumCode:
    chosen = [x for x in (getattr(args, "family", None), getattr(args, "builtin", None),
                          getattr(args, "code", None)) if x]
    if len(chosen) != 1:
        raise UsageError("choose exactly one of --family / --builtin / --code")
    if getattr(args, "family", None):
        return build_family_code(*parse_family(args.family))
    if getattr(args, "builtin", None):
        code, _, _ = resolve_code(args.builtin)
        return code
    with open(args.code, encoding="utf-8") as fh:
        return load_code(json.load(fh))


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# =============================================================================
# Subcommands
# =============================================================================

def cmd_verify(args) -> int:
    code = _load_selected_code(args)
    orders = ([int(x) for x in args.orders.split(",")] if args.orders
              else list(range((code.correctable_order or 1) + 1)))
    gammas = (parse_gamma_grid(args.gammas) if args.gammas
              else list(DEFAULT_GAMMA_SAMPLES))
    t = max(orders)
    check = check_theorem1 if args.condition == "theorem1" else check_theoremS2

    def factory(gamma):
        channel, grouping = ad_grouped_channel(code, t=t)(gamma)
        keep = {a: grouping.members[a] for a in orders if a in grouping.members}
        grouping_sel = type(grouping)(sorted(keep), keep)
        return channel, grouping_sel

    try:
        report = check(code, factory, gammas=gammas, tol=args.tol,
                       chi_floor=args.chi_floor)
    except ChiZero as exc:
        _emit(json.dumps({"passed": False, "condition": args.condition,
                          "chi_zero": str(exc)}, indent=2), args.output)
        return 1
    _emit(report.to_json(), args.output)
    return 0 if report.passed else 1


METRIC_ALIASES = {
    "ent": "entanglement", "entanglement": "entanglement",
    "state": "state",
    "worst": "worst_case", "worst_case": "worst_case",
    "success": "success_prob", "success_prob": "success_prob",
    "robust": "robust_entanglement", "robust_entanglement": "robust_entanglement",
}


def cmd_fidelity(args) -> int:
    gammas = parse_gamma_grid(args.gammas)
    theta = parse_angle(args.theta)
    phi = parse_angle(args.phi)
    metric = METRIC_ALIASES[args.metric]
    curves = []
    for selector in args.codes.split(","):
        code, recovery_kind, label = resolve_code(selector.strip())
        cfg = RobustnessConfig(sigma=args.sigma, seed=args.seed) \
            if metric == "robust_entanglement" else None
        curve = fidelity_curve(code, metric, gammas,
                               recovery_kind=recovery_kind,
                               theta=theta, phi=phi, sigma=args.sigma, cfg=cfg)
        curve.code_label = label
        curves.append(curve)
    _emit(curves_to_csv(curves), args.output)
    return 0


def cmd_bounds(args) -> int:
    if args.family_optimality:
        reports = verify_family_optimality(args.family_optimality)
    else:
        tuples = []
        if args.tuples:
            for chunk in args.tuples.split(";"):
                parts = [int(x) for x in chunk.split(",")]
                if len(parts) != 3:
                    raise UsageError(f"bound tuple needs n,k,t, got {chunk!r}")
                tuples.append(tuple(parts))
        else:
            tuples = list(SAMPLE_TUPLES)
        reports = [check_bound(n, k, t, q_p=args.qp, q_l=args.ql)
                   for (n, k, t) in tuples]
    text = (reports_to_json(reports) if args.format == "json"
            else reports_to_csv(reports))
    _emit(text, args.output)
    return 0


def cmd_robustness(args) -> int:
    code, _, label = resolve_code(args.code)
    gammas = parse_gamma_grid(args.gammas)
    sigmas = [float(s) for s in args.sigmas.split(",")]
    if not sigmas:
        raise UsageError("sigma list must be nonempty")
    lines = ["gamma,sigma,value,code"]
    for gamma in gammas:
        for sigma in sigmas:
            cfg = RobustnessConfig(sigma=sigma, rule=args.rule, nodes=args.nodes,
                                   shots=args.shots, seed=args.seed)
            value = robust_entanglement_fidelity(code, gamma, cfg)
            lines.append(f"{gamma:.17g},{sigma:.17g},{value:.17g},{label}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_recover(args) -> int:
    code, _, label = resolve_code(args.code)
    with open(args.state, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "coeffs" not in doc:
        raise UsageError("state document must be an object with a 'coeffs' field")
    coeffs = np.array([complex(re, im) for re, im in doc["coeffs"]])
    norm = np.linalg.norm(coeffs)
    if norm < 1e-12:
        raise UsageError("state coefficients are all zero")
    coeffs = coeffs / norm
    psi = code.encode(coeffs)
    channel, _ = ad_code_channel(code.q_p, code.n, args.gamma)
    noisy = apply_channel(channel, np.outer(psi, np.conj(psi)))
    plan = standard_recovery(code, args.gamma)
    recovered, p_success, p_abort = correct_state(plan, noisy)
    cw = code.codeword_matrix
    logical = np.conj(cw) @ recovered @ cw.T
    fidelity = float(np.real(np.conj(psi) @ recovered @ psi) / p_success)
    _emit(json.dumps({
        "code": label,
        "gamma": args.gamma,
        "p_success": p_success,
        "p_abort": p_abort,
        "fidelity": fidelity,
        "recovered_logical": [[[float(z.real), float(z.imag)] for z in row]
                              for row in logical],
    }, indent=2), args.output)
    return 0


def cmd_dump_code(args) -> int:
    code = _load_selected_code(args)
    _emit(json.dumps(code_to_document(code), indent=2), args.output)
    return 0


# =============================================================================
# Parser
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adqec",
        description="Amplitude-damping code workbench: verification, "
                    "probabilistic recovery, fidelity curves, packing bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_code_choice(p):
        p.add_argument("--family", help="family code spec, e.g. k=1,t=1")
        p.add_argument("--builtin", help=f"builtin label: {', '.join(BUILTIN_LABELS)}")
        p.add_argument("--code", help="path to a JSON code document")

    p = sub.add_parser("verify", help="check the grouped correction conditions")
    add_code_choice(p)
    p.add_argument("--orders", help="comma list of damping orders, e.g. 0,1")
    p.add_argument("--condition", choices=["theorem1", "theoremS2"],
                   default="theorem1")
    p.add_argument("--gammas", help="gamma samples (list or start:stop:count)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--chi-floor", type=float, default=1e-12)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fidelity", help="sweep a fidelity metric over gamma")
    p.add_argument("--codes", required=True,
                   help="comma list of selectors, e.g. 31,bare,41-petz")
    p.add_argument("--metric", default="ent", choices=sorted(METRIC_ALIASES),
                   help="ent | state | worst | success | robust")
    p.add_argument("--gammas", required=True, help="start:stop:count or list")
    p.add_argument("--theta", default="0")
    p.add_argument("--phi", default="0")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("bounds", help="evaluate the packing inequality")
    p.add_argument("--tuples", help="semicolon list of n,k,t tuples")
    p.add_argument("--qp", type=int, default=2)
    p.add_argument("--ql", type=int, default=2)
    p.add_argument("--family-optimality", type=int, metavar="T_MAX",
                   help="check saturation of the [2t+1,1] family up to T_MAX")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("robustness", help="average fidelity over misestimated gamma")
    p.add_argument("--code", default="31")
    p.add_argument("--gammas", required=True)
    p.add_argument("--sigmas", required=True, help="comma list of sigma values")
    p.add_argument("--nodes", type=int, default=129)
    p.add_argument("--rule", choices=["gauss_legendre", "monte_carlo"],
                   default="gauss_legendre")
    p.add_argument("--shots", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("recover", help="one-shot noisy encode/recover round trip")
    p.add_argument("--code", default="31")
    p.add_argument("--state", required=True,
                   help="JSON file with logical 'coeffs': [[re, im], ...]")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("dump-code", help="emit a code as a JSON document")
    add_code_choice(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dump_code)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AdqecError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
