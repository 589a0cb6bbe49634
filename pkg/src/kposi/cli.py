"""Command-line front end.

Subcommands cover compounds, wedges, sign-regularity classification,
k-diagonal stability certificates, the principal-minor necessary
screens, cyclic matrix construction/analysis, nonlinear simulation, and
wedge-trajectory Lyapunov runs.  Matrices travel as JSON documents
{"rows", "cols", "data", optional "scale": "p/q"}; trajectory output is
CSV with 17-significant-digit floats.

Exit codes: 0 success, 1 negative verdict, 2 usage error, 3 numeric or
capacity error.  KPOSI_TOL overrides the default tolerance when --tol
is not given.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

import numpy as np

from .compound import mult_compound, wedge
from .cyclic import CyclicSpec, analyze_cyclic, build_cyclic
from .errors import CapacityError, DomainError, NumericError, PreconditionError
from .matcore import pd_tol, zero_tol
from .nonlinear import (
    NonlinearSystem,
    ScalarMap,
    export_trajectory_csv,
    lyapunov_decrement_report,
    simulate,
    wedge_trajectory,
)
from .signreg import NONE, classify_sign_regularity
from .stability import (
    CertificationFailure,
    cayley,
    certify_k_diag_stability,
    is_schur,
    necessary_ct_diag,
    necessary_dt_diag,
    solve_top_compound_diagonal,
    stein_holds,
)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------------------
# JSON ingestion / emission


def _load_json(path: str):
    with open(path, "rb") as fh:
        raw = fh.read()
    return json.loads(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()


def parse_matrix_document(doc) -> np.ndarray:
    """Decode {"rows", "cols", "data", optional "scale": "p/q"}."""
    if not isinstance(doc, dict):
        raise DomainError("matrix document must be a JSON object")
    for key in ("rows", "cols", "data"):
        if key not in doc:
            raise DomainError(f"matrix document is missing the {key!r} field")
    arr = np.asarray(doc["data"], dtype=float)
    if arr.ndim != 2 or arr.shape != (int(doc["rows"]), int(doc["cols"])):
        raise DomainError(
            f"data has shape {arr.shape}, expected ({doc['rows']}, {doc['cols']})"
        )
    scale = doc.get("scale")
    if scale is not None:
        try:
            frac = Fraction(str(scale))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"scale {scale!r} is not a valid p/q rational") from exc
        arr = arr * frac.numerator / frac.denominator
    return arr


def matrix_document(arr: np.ndarray) -> dict:
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": [[float(v) for v in row] for row in arr],
    }


def _load_matrix(path: str) -> tuple[np.ndarray, str]:
    doc, digest = _load_json(path)
    if isinstance(doc, dict) and "data" in doc and "rows" not in doc:
        # plain vector file {"data": [...]}; treat as a single column
        vec = np.asarray(doc["data"], dtype=float)
        if vec.ndim != 1:
            raise DomainError("vector document 'data' must be a flat list")
        return vec[:, None], digest
    return parse_matrix_document(doc), digest


def _parse_scalar_map(obj) -> ScalarMap:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("each map must be an object with a 'kind' field")
    kind = str(obj["kind"]).lower()
    if kind == "identity":
        return ScalarMap.identity()
    if kind == "linear":
        if "c" not in obj:
            raise DomainError("linear map needs a gain field 'c'")
        return ScalarMap.linear(obj["c"])
    if kind == "power":
        if "p" not in obj:
            raise DomainError("power map needs an exponent field 'p'")
        return ScalarMap.power(obj["p"])
    if kind == "table":
        if "points" not in obj:
            raise DomainError("table map needs a 'points' list of [z, phi] pairs")
        return ScalarMap.table(obj["points"])
    raise DomainError(f"unknown map kind {obj['kind']!r}")


def _load_system(path: str) -> tuple[NonlinearSystem, str]:
    doc, digest = _load_json(path)
    if not isinstance(doc, dict):
        raise DomainError("system document must be a JSON object")
    for key in ("A", "maps", "domain"):
        if key not in doc:
            raise DomainError(f"system document is missing the {key!r} field")
    A = parse_matrix_document(doc["A"])
    maps = tuple(_parse_scalar_map(m) for m in doc["maps"])
    domain = tuple(float(v) for v in doc["domain"])
    if len(domain) != 2:
        raise DomainError("domain must be a [lo, hi] pair")
    validate = bool(doc.get("validate", True))
    return NonlinearSystem(A, maps, domain, validate=validate), digest


def _report(command: str, digest: str, verdicts: dict, tolerances: dict) -> dict:
    return {
        "command": command,
        "inputs_digest": digest,
        "verdicts": verdicts,
        "tolerances": tolerances,
    }


def _emit(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _witness_dict(w) -> dict:
    return {
        "rows": list(w.rows.indices),
        "cols": list(w.cols.indices),
        "value": w.value,
    }


# ---------------------------------------------------------------------------
# subcommands


def _cmd_compound(args) -> int:
    A, _ = _load_matrix(args.infile)
    _emit(matrix_document(mult_compound(A, args.k)))
    return EXIT_OK


def _cmd_wedge(args) -> int:
    M, _ = _load_matrix(args.infile)
    wv = wedge([M[:, j] for j in range(M.shape[1])])
    _emit({"n": wv.n, "k": wv.k, "coords": [float(v) for v in wv.coords]})
    return EXIT_OK


def _cmd_classify(args) -> int:
    A, digest = _load_matrix(args.infile)
    sc = classify_sign_regularity(A, args.k, args.tol)
    verdicts = {
        "k": sc.k,
        "verdict": sc.verdict,
        "signature": sc.signature,
        "witness_min": _witness_dict(sc.witness_min),
        "witness_conflict": (
            [_witness_dict(w) for w in sc.witness_conflict] if sc.witness_conflict else None
        ),
    }
    _emit(_report("classify", digest, verdicts, {"zero_tol": zero_tol(args.tol)}))
    return EXIT_VERDICT if sc.verdict == NONE else EXIT_OK


def _cmd_certify(args) -> int:
    A, digest = _load_matrix(args.infile)
    result = certify_k_diag_stability(A, args.k, args.tol)
    tolerances = {"zero_tol": zero_tol(args.tol), "pd_tol": pd_tol()}
    if isinstance(result, CertificationFailure):
        verdicts = {
            "certified": False,
            "failure": result.reason,
            "k": result.k,
            "r": result.r,
            "witness": _witness_dict(result.witness) if result.witness else None,
            "compound_spectral_radius": result.compound_spectral_radius,
        }
        _emit(_report("certify", digest, verdicts, tolerances))
        return EXIT_VERDICT
    verdicts = {
        "certified": True,
        "k": result.k,
        "r": result.r,
        "d": [float(v) for v in result.d],
        "xi": [float(v) for v in result.xi],
        "z": [float(v) for v in result.z],
        "stein_margin": result.stein_margin,
        "compound_spectral_radius": result.compound_spectral_radius,
        "sign_flipped": result.sign_flipped,
        "xi_gap": result.xi_gap,
        "z_gap": result.z_gap,
    }
    _emit(_report("certify", digest, verdicts, tolerances))
    return EXIT_OK


def _cmd_dlf_recover(args) -> int:
    D, _ = _load_matrix(args.infile)
    if 1 in D.shape and D.shape[0] != D.shape[1]:
        D = D.ravel()  # accept a single row/column of diagonal entries
    p = solve_top_compound_diagonal(D)
    _emit(matrix_document(np.diag(p)))
    return EXIT_OK


def _cmd_cayley(args) -> int:
    A, _ = _load_matrix(args.infile)
    _emit(matrix_document(cayley(A)))
    return EXIT_OK


def _cmd_check_necessary(args) -> int:
    A, digest = _load_matrix(args.infile)
    tol = 0.0 if args.tol is None else args.tol
    rep = necessary_dt_diag(A, tol) if args.mode == "dt" else necessary_ct_diag(A, tol)
    verdicts = {
        "passed": rep.passed,
        "transform_used": rep.transform_used,
        "witness": (
            {"kappa": list(rep.failing_minor[0].indices), "value": rep.failing_minor[1]}
            if rep.failing_minor
            else None
        ),
    }
    _emit(_report("check-necessary", digest, verdicts, {"minor_tol": tol}))
    return EXIT_OK if rep.passed else EXIT_VERDICT


def _cmd_cyclic(args) -> int:
    spec = CyclicSpec(n=len(args.alphas), alphas=args.alphas, betas=args.betas, ell=args.ell)
    digest = hashlib.sha256(
        repr((spec.alphas, spec.betas, spec.ell)).encode()
    ).hexdigest()
    if not args.analyze:
        _emit(matrix_document(build_cyclic(spec)))
        return EXIT_OK
    analysis = analyze_cyclic(spec, args.tol)
    sc = analysis.sign_class_at_ell
    verdicts = {
        "sign_class_at_ell": {
            "verdict": sc.verdict,
            "signature": sc.signature,
            "witness_min": _witness_dict(sc.witness_min),
        },
        "ell_diag_stable": analysis.ell_diag_stable,
        "compound_rho": analysis.compound_rho,
        "diag_stable_if_odd": analysis.diag_stable_if_odd,
        "nonneg_entrywise": analysis.nonneg_entrywise,
    }
    _emit(_report("cyclic", digest, verdicts, {"zero_tol": zero_tol(args.tol)}))
    return EXIT_OK if analysis.ell_diag_stable else EXIT_VERDICT


def _cmd_simulate(args) -> int:
    sys_, _ = _load_system(args.system)
    res = simulate(sys_, np.asarray(args.x0, dtype=float), args.steps)
    writer_rows = res.states
    out = sys.stdout
    out.write("j," + ",".join(f"x{i + 1}" for i in range(sys_.n)) + "\n")
    for j, row in enumerate(writer_rows):
        out.write(str(j) + "," + ",".join(f"{v:.17g}" for v in row) + "\n")
    if res.exit_step is not None:
        sys.stderr.write(
            f"trajectory left the state domain at step {res.exit_step}; output truncated\n"
        )
    return EXIT_OK


def _cmd_wedge_sim(args) -> int:
    sys_, digest = _load_system(args.system)
    inits_mat, _ = _load_matrix(args.initials)
    if inits_mat.shape[1] != args.k:
        raise DomainError(
            f"initials file has {inits_mat.shape[1]} columns, expected k={args.k}"
        )
    initials = [inits_mat[:, j] for j in range(args.k)]
    cert_info = None
    if args.certify:
        result = certify_k_diag_stability(sys_.A, args.k, args.tol)
        if isinstance(result, CertificationFailure):
            sys.stderr.write(
                json.dumps(
                    _report(
                        "wedge-sim",
                        digest,
                        {"certified": False, "failure": result.reason},
                        {"zero_tol": zero_tol(args.tol)},
                    )
                )
                + "\n"
            )
            return EXIT_VERDICT
        d = result.d
        cert_info = {
            "stein_margin": result.stein_margin,
            "compound_spectral_radius": result.compound_spectral_radius,
        }
    else:
        d = np.ones(mult_compound(sys_.A, args.k).shape[0])
    traj = wedge_trajectory(sys_, args.k, initials, d, args.steps, tol=args.tol)
    export_trajectory_csv(traj, sys.stdout, include_states=args.include_states)
    rep = lyapunov_decrement_report(traj, args.tol)
    verdicts = {
        "monotone": rep.monotone,
        "worst_increase": rep.worst_increase,
        "strict_ok": rep.strict_ok,
        "v_increase_steps": list(traj.v_increase_steps),
        "exit_step": traj.exit_step,
        "d_used": [float(v) for v in traj.d_used],
        "certificate": cert_info,
    }
    sys.stderr.write(
        json.dumps(_report("wedge-sim", digest, verdicts, {"zero_tol": zero_tol(args.tol)}))
        + "\n"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# bundled worked-example regressions


def _check(results: list, label: str, ok: bool, detail: str = "") -> None:
    results.append(ok)
    line = f"{'PASS' if ok else 'FAIL'} {label}"
    if detail and not ok:
        line += f" ({detail})"
    print(line)


def _cmd_paper_examples(_args) -> int:
    results: list[bool] = []

    # 1: mixed-sign 3x3, Schur and strongly 2-positive, yet no diagonal
    # Lyapunov function (first principal-minor witness of the transform).
    A1 = np.array([[-4.0, -2.0, 1.0], [1.0, -3.0, -5.0], [7.0, 1.0, -2.0]]) / 7.0
    _check(results, "ex1 schur", is_schur(A1).ok)
    sc = classify_sign_regularity(A1, 2)
    _check(results, "ex1 strictly sign-regular order 2, signature +1",
           sc.verdict == "SSR" and sc.signature == 1)
    rep = necessary_dt_diag(A1)
    ok = (
        not rep.passed
        and rep.failing_minor is not None
        and rep.failing_minor[0].indices == (1, 3)
        and abs(rep.failing_minor[1] - (-8.0 / 461.0)) <= 1e-9
    )
    _check(results, "ex1 dt necessary screen fails at {1,3} = -8/461", ok,
           f"got {rep.failing_minor}")

    # 2: continuous-time screen counterpart.
    A2 = np.array([[-21.0, 11.0, -14.0], [18.0, -19.0, 37.0], [-49.0, 21.0, -33.0]])
    rep = necessary_ct_diag(A2)
    ok = (
        not rep.passed
        and rep.failing_minor is not None
        and rep.failing_minor[0].indices == (2, 3)
        and abs(rep.failing_minor[1] - (-150.0)) <= 1e-9
    )
    _check(results, "ex2 ct necessary screen fails at {2,3} = -150", ok,
           f"got {rep.failing_minor}")

    # 3: certificate at order 2 plus recovery of a full diagonal Lyapunov
    # matrix from the top-order compound equation.
    A3 = np.array([[-4.0, -2.0, 0.0], [0.0, -3.0, -5.0], [7.0, 0.0, -2.0]]) / 8.0
    _check(results, "ex3 schur", is_schur(A3).ok)
    sc = classify_sign_regularity(A3, 2)
    _check(results, "ex3 strictly sign-regular order 2, signature +1",
           sc.verdict == "SSR" and sc.signature == 1)
    d_ref = np.array([23.0 / 21.0, 13.0 / 8.0, 7.0 / 13.0])
    _check(results, "ex3 reference D satisfies the compound Stein inequality",
           stein_holds(mult_compound(A3, 2), d_ref).ok)
    p = solve_top_compound_diagonal(d_ref)
    p_ref = np.array([np.sqrt(3887.0 / 1176.0), np.sqrt(184.0 / 507.0), np.sqrt(147.0 / 184.0)])
    _check(results, "ex3 top-compound recovery matches closed-form P",
           bool(np.max(np.abs(p - p_ref)) <= 1e-12))
    _check(results, "ex3 recovered P is a diagonal Lyapunov matrix for A",
           stein_holds(A3, p).ok)

    # 4: unstable cyclic matrix whose order-2 compound is Schur; wedge
    # Lyapunov function decreases along squared-map trajectories.
    A4 = np.array([[0.1, 1.9, 0.0], [0.0, 0.05, 1.95], [-0.01, 0.0, 2.01]])
    rho = is_schur(A4).spectral_radius
    _check(results, "ex4 spectral radius 2", abs(rho - 2.0) <= 1e-9, f"rho={rho!r}")
    M = mult_compound(A4, 2)
    _check(results, "ex4 order-2 compound nonnegative and schur",
           float(np.min(M)) >= -1e-12 and is_schur(M).ok)
    cert = certify_k_diag_stability(A4, 2)
    certified = not isinstance(cert, CertificationFailure)
    _check(results, "ex4 order-2 certificate", certified)
    if certified:
        sys4 = NonlinearSystem(A4, tuple(ScalarMap.power(2) for _ in range(3)), (-0.5, 0.5))
        a1 = 0.5 * np.ones(3)
        a2 = np.array([-0.5, 0.5, 0.4])
        traj = wedge_trajectory(sys4, 2, [a1, a2], cert.d, 5)
        diffs = np.diff(traj.v_series[1:6])
        _check(results, "ex4 V strictly decreasing over steps 1..5",
               bool(np.all(diffs < -1e-12)), f"diffs={diffs}")
        ok = True
        for a in (a1, a2):
            res = simulate(sys4, a, 20)
            ok = ok and res.exit_step is None
        _check(results, "ex4 trajectories stay in the state box for 20 steps", ok)

    print(f"{sum(results)}/{len(results)} checks passed")
    return EXIT_OK if all(results) else EXIT_VERDICT


# ---------------------------------------------------------------------------
# parser / dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kposi",
        description="Compound matrices, sign-regularity, and k-diagonal stability tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p):
        p.add_argument("--tol", type=float, default=None, help="tolerance override")

    p = sub.add_parser("compound", help="k-th multiplicative compound of a matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("-k", type=int, required=True)
    p.set_defaults(func=_cmd_compound)

    p = sub.add_parser("wedge", help="wedge product of the columns of a matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_wedge)

    p = sub.add_parser("classify", help="sign-regularity classification at order k")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("-k", type=int, required=True)
    add_tol(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("certify", help="diagonal Stein certificate for the k-th compound")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("-k", type=int, required=True)
    add_tol(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("dlf-recover", help="solve P^(n-1) = D for a positive diagonal P")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_dlf_recover)

    p = sub.add_parser("cayley", help="the transform -(A+I)(A-I)^{-1}")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_cayley)

    p = sub.add_parser("check-necessary", help="principal-minor necessary screens")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=("dt", "ct"), required=True)
    add_tol(p)
    p.set_defaults(func=_cmd_check_necessary)

    p = sub.add_parser("cyclic", help="build or analyze a cyclic chain matrix")
    p.add_argument("--alphas", type=float, nargs="+", required=True)
    p.add_argument("--betas", type=float, nargs="+", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--analyze", action="store_true")
    add_tol(p)
    p.set_defaults(func=_cmd_cyclic)

    p = sub.add_parser("simulate", help="iterate x(j+1) = A phi(x(j)), CSV states out")
    p.add_argument("--system", required=True)
    p.add_argument("--x0", type=float, nargs="+", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("wedge-sim", help="wedge trajectory with Lyapunov series, CSV j,V out")
    p.add_argument("--system", required=True)
    p.add_argument("--initials", required=True, help="matrix JSON whose columns are the k starts")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--certify", action="store_true", help="derive D from a compound certificate")
    p.add_argument("--include-states", action="store_true")
    add_tol(p)
    p.set_defaults(func=_cmd_wedge_sim)

    p = sub.add_parser("paper-examples", help="run the bundled worked-example regressions")
    p.set_defaults(func=_cmd_paper_examples)

    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else int(exc.code)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error: malformed JSON: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (DomainError, PreconditionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (CapacityError, NumericError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
