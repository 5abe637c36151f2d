"""Command line front end.

    surfbundle ring FILE       basis sizes, structure constants, indeterminates
    surfbundle verify FILE     duality, commutativity, associativity, lift covariance
    surfbundle johnson FILE    quotient and C* utilities on the supplied lifts
    surfbundle torus FILE      mapping-torus triple forms per generator
    surfbundle fibering FILE   uniqueness verdict, second-fiber class

Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.
"""

import argparse
import json
import sys

import numpy as np

from . import bundle_ring, exterior, fibering, mapping_torus
from .bundle_ring import build_ring
from .errors import (
    DimensionError,
    GenusError,
    InconsistentData,
    IndeterminateContribution,
    IndeterminatePairing,
    NonSymplecticError,
    NotEquivalent,
    NotInImage,
    PrimitivityViolation,
    ProblemFileError,
)
from .problem import load_problem

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

INPUT_ERRORS = (ProblemFileError, DimensionError, GenusError, NonSymplecticError, InconsistentData, OSError)


def plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dump_report(report):
    return json.dumps(plain(report), sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------ ring


def cmd_ring(problem, args):
    data = problem.bundle_data()
    ring = build_ring(data)
    constants = [
        [left, right, target, "?" if val is None else val]
        for left, right, target, val in ring.structure_constants()
    ]
    indeterminate = [list(t) for t in ring.indeterminate_constants()]
    report = {
        "command": "ring",
        "genus_fiber": problem.genus_fiber,
        "genus_base": problem.genus_base,
        "johnson_kernel": ring.johnson_kernel,
        "e_param": ring.e_param,
        "ranks": {str(k): ring.rank(k) for k in range(5)},
        "basis": {str(k): list(ring.labels[k]) for k in range(5)},
        "structure_constants": constants,
        "indeterminate": indeterminate,
    }
    if not ring.fiber_coefficient_mask.any():
        report["fiber_coefficients"] = ring.fiber_coefficients
    lines = [f"bundle ring  g={problem.genus_fiber} h={problem.genus_base}  kernel={ring.johnson_kernel}"]
    lines.append("degree  rank")
    lines += [f"{k:>6}  {ring.rank(k):>4}" for k in range(4, -1, -1)]
    lines.append(f"structure constants: {len(constants)} nonzero or unknown")
    lines.append(f"indeterminate: {len(indeterminate)}")
    for left, right, target in indeterminate:
        lines.append(f"  {left} . {right} -> {target}: ?")
    return report, lines, EXIT_OK


# ------------------------------------------------------------------ verify


def _check(name, status, detail):
    return {"name": name, "status": status, "detail": detail}


def _unimodularity_check(ring):
    try:
        dets = bundle_ring.unimodularity_report(ring)
    except IndeterminatePairing as exc:
        return _check("duality_unimodularity", "skipped", f"IndeterminatePairing: {exc}")
    ok = all(abs(d) == 1 for d in dets.values())
    return _check("duality_unimodularity", "pass" if ok else "fail", {str(k): d for k, d in dets.items()})


def _sampled_associativity(ring, rng, per_degree=6):
    """Associativity on random index subsets for each degree triple."""
    bad = 0
    for p in range(5):
        for q in range(5):
            for r in range(5):
                if p + q + r < 8 or p + q < 4 or q + r < 4:
                    continue
                ip, iq, ir = (
                    np.sort(rng.choice(ring.rank(k), size=min(per_degree, ring.rank(k)), replace=False))
                    for k in (p, q, r)
                )
                a = ring.table(p, q)
                b = ring.table(p + q - 4, r)
                c = ring.table(q, r)
                d = ring.table(p, q + r - 4)
                left = bundle_ring.masked_einsum(
                    "ija,akl->ijkl",
                    tuple(x[np.ix_(ip, iq)] for x in a),
                    tuple(x[:, ir] for x in b),
                )
                right = bundle_ring.masked_einsum(
                    "jka,ial->ijkl",
                    tuple(x[np.ix_(iq, ir)] for x in c),
                    tuple(x[ip] for x in d),
                )
                known = ~(left[1] | right[1])
                bad += int((known & (left[0] != right[0])).sum())
    return bad


def _lift_covariance(problem, data, ring, rng, random_trials):
    perturbations = []
    if any(g.tau_alt is not None for g in problem.generators):
        rows = []
        for gen in problem.generators:
            if gen.tau_alt is None:
                rows.append(np.zeros(data.fiber.rank, dtype=np.int64))
                continue
            model = mapping_torus.TorusModel(data.fiber, gen.tau)
            try:
                rows.append(mapping_torus.recalibrate(model, gen.tau_alt, gen.tau))
            except NotEquivalent:
                return _check(
                    "lift_covariance",
                    "fail",
                    f"tau_alt of {gen.label} is not tau + C*(k) for any integral k",
                )
        perturbations.append(("tau_alt", np.array(rows)))
    for t in range(random_trials):
        perturbations.append((f"random_{t}", rng.integers(-2, 3, size=(data.base.rank, data.fiber.rank))))

    for name, k_rows in perturbations:
        bad = bundle_ring.lift_covariance_failures(data, k_rows, ring)
        if bad:
            return _check("lift_covariance", "fail", f"perturbation {name}: {len(bad)} quadruple products moved wrongly")
    return _check("lift_covariance", "pass", f"{len(perturbations)} perturbations")


def cmd_verify(problem, args):
    data = problem.bundle_data()
    ring = build_ring(data)
    rng = np.random.default_rng(args.seed)
    checks = [_unimodularity_check(ring)]

    gc = bundle_ring.graded_commutativity_failures(ring)
    checks.append(_check("graded_commutativity", "fail" if gc else "pass", f"{len(gc)} violations"))

    if max(problem.genus_fiber, problem.genus_base) <= args.max_genus:
        assoc = len(bundle_ring.associativity_failures(ring))
        mode = "exhaustive"
    else:
        assoc = _sampled_associativity(ring, rng)
        mode = f"sampled (seed {args.seed})"
    checks.append(_check("associativity", "fail" if assoc else "pass", f"{assoc} violations, {mode}"))

    checks.append(_lift_covariance(problem, data, ring, rng, random_trials=3))

    code = EXIT_FAIL if any(c["status"] == "fail" for c in checks) else EXIT_OK
    report = {
        "command": "verify",
        "genus_fiber": problem.genus_fiber,
        "genus_base": problem.genus_base,
        "seed": args.seed,
        "checks": checks,
        "passed": code == EXIT_OK,
    }
    lines = [f"{c['name']:<24} {c['status']:<8} {c['detail'] if isinstance(c['detail'], str) else ''}" for c in checks]
    return report, lines, code


# ------------------------------------------------------------------ johnson


def cmd_johnson(problem, args):
    problem.check_symplectic()
    lat = problem.fiber
    info = exterior.quotient_info(lat.genus)
    report = {
        "command": "johnson",
        "genus_fiber": lat.genus,
        "quotient_rank": info.rank,
        "elementary_divisors": list(info.elementary_divisors),
        "contraction_scalar_on_omega": exterior.contraction_scalar_on_omega(lat),
        "generators": [],
    }
    lines = [
        f"wedge^3 H / H at g={lat.genus}: rank {info.rank}, torsion {list(info.torsion) or 'none'}",
        f"C(x ^ omega) = {report['contraction_scalar_on_omega']} x",
    ]
    code = EXIT_OK
    for gen in problem.generators:
        if gen.tau is None:
            continue
        rep = exterior.quotient_reduce(lat, gen.tau)
        entry = {
            "generator": gen.label,
            "representative": list(rep.representative),
            "zero_in_quotient": rep.is_zero,
            "contraction": exterior.contraction(lat, gen.tau),
        }
        status = "zero" if rep.is_zero else "nonzero"
        if gen.tau_alt is not None:
            try:
                alpha = exterior.solve_cstar(lat, gen.tau_alt - gen.tau)
                entry["tau_alt_difference"] = alpha
                status += f", tau_alt = tau + C*({alpha.tolist()})"
            except NotInImage:
                entry["tau_alt_difference"] = None
                status += ", tau_alt NOT equivalent"
                code = EXIT_FAIL
        report["generators"].append(entry)
        lines.append(f"{gen.label}: class {status}")
    return report, lines, code


# ------------------------------------------------------------------ torus


def _h2_label(lat, i):
    return "[F]" if i == 0 else f"Sigma_{lat.labels[i - 1]}"


def cmd_torus(problem, args):
    problem.check_symplectic()
    problem.require_torelli()
    lat = problem.fiber
    report = {"command": "torus", "genus_fiber": lat.genus, "generators": []}
    lines = []
    code = EXIT_OK
    for gen in problem.generators:
        if gen.tau is None:
            continue
        model = mapping_torus.TorusModel(lat, gen.tau)
        t = mapping_torus.intersection_tensor(model)
        alternating = bool(
            np.array_equal(t, -t.transpose(1, 0, 2)) and np.array_equal(t, -t.transpose(0, 2, 1))
        )
        entries = [
            [_h2_label(lat, i), _h2_label(lat, j), _h2_label(lat, k), int(t[i, j, k])]
            for i, j, k in np.argwhere(t)
            if i < j < k
        ]
        item = {"generator": gen.label, "alternating": alternating, "entries": entries}
        if not alternating:
            code = EXIT_FAIL
        if gen.tau_alt is not None:
            try:
                item["recalibration"] = mapping_torus.recalibrate(model, gen.tau_alt, gen.tau)
            except NotEquivalent:
                item["recalibration"] = None
                code = EXIT_FAIL
        report["generators"].append(item)
        lines.append(f"{gen.label}: {len(entries)} independent nonzero triple products, alternating={alternating}")
    return report, lines, code


# ------------------------------------------------------------------ fibering


def cmd_fibering(problem, args):
    problem.check_symplectic()
    mono = problem.monodromy()
    verdict = fibering.uniqueness_verdict(mono, problem.second_fibering)
    report = {"command": "fibering", "verdict": verdict.as_dict()}
    lines = [f"verdict: {verdict.tag}"]
    for c in verdict.report:
        flag = "" if c.status == "holds" else f"  [{c.status}]"
        lines.append(f"  {c.name} = {c.value}  ({c.source}){flag}")
    if verdict.tag == fibering.KERNEL_RIGIDITY and not verdict.violated:
        lines.append("[F2] = C; deg(p1 x p2) = 1; g = h; E = B1 x B2 if a second fibering exists")
    code = EXIT_FAIL if verdict.violated else EXIT_OK
    return report, lines, code


COMMANDS = {
    "ring": cmd_ring,
    "verify": cmd_verify,
    "johnson": cmd_johnson,
    "torus": cmd_torus,
    "fibering": cmd_fibering,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem file (JSON)")
    common.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    common.add_argument("--max-genus", type=int, default=3, help="largest genus checked exhaustively")
    parser = argparse.ArgumentParser(prog="surfbundle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.replace("cmd_", ""))
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        problem = load_problem(args.file)
        report, lines, code = COMMANDS[args.command](problem, args)
    except PrimitivityViolation as exc:
        print(f"error: PrimitivityViolation: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except IndeterminateContribution as exc:
        print(f"error: IndeterminateContribution: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print("\n".join(lines))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(dump_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
