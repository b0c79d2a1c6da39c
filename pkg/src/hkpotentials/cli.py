"""Command-line interface: ``hkpot potential | generate | verify``.

Exit codes: 0 success, 1 a property suite failed, 2 the input could not be
parsed (or names an invalid partition), 3 the matrix is not a nilpotent
element of the claimed algebra, 4 a potential method failed or methods
disagree beyond the check tolerance.

All randomness comes from ``--seed`` (default 0), so identical invocations
give byte-identical ``--json`` output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .lie import (
    AlgebraKind,
    BilinearForm,
    CanonicalFiberParams,
    Family,
    FormKind,
    JordanType,
    MembershipError,
    OrbitElement,
    PartitionError,
    canonical_fiber,
    jordan_representative,
    jordan_type_of,
    random_compact_conjugate,
    random_orbit_element,
    to_standard_form,
    validate,
)
from .linalg import DEFAULT_TOL, Tolerances
from .potentials import compute_all
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_SUITE = 1
EXIT_PARSE = 2
EXIT_MEMBERSHIP = 3
EXIT_METHODS = 4


class InputError(ValueError):
    """Malformed command-line or document input."""


# --- documents ------------------------------------------------------------


def _num(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return _num(obj)
    return obj


def dumps(doc) -> str:
    """Deterministic JSON; floats are written with round-trip precision."""
    return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"


def _form_name(elem: OrbitElement) -> str:
    return elem.form.kind.value


def matrix_document(elem: OrbitElement, jordan: JordanType | None = None, fiber: CanonicalFiberParams | None = None) -> dict:
    doc = {
        "n": elem.n,
        "algebra": elem.family.value,
        "form": _form_name(elem),
        "entries": [[_num(z) for z in row] for row in np.asarray(elem.matrix)],
    }
    if jordan is not None:
        doc["jordan_type"] = list(jordan.parts)
    if fiber is not None:
        doc["fiber"] = _fiber_doc(fiber)
    return doc


def _fiber_doc(p: CanonicalFiberParams) -> dict:
    out = {"a": _num(p.a), "b": _num(p.b)}
    out["v"] = _num(p.v) if p.w is None else [_num(t) for t in p.v]
    if p.w is not None:
        out["w"] = [_num(t) for t in p.w]
    return out


def _complex_from_doc(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise InputError(f"expected a number or [re, im] pair, got {v!r}")


def _fiber_from_doc(doc) -> CanonicalFiberParams:
    try:
        v = doc["v"]
        vv = [_complex_from_doc(t) for t in v] if isinstance(v, list) and v and isinstance(v[0], list) else _complex_from_doc(v)
        w = [_complex_from_doc(t) for t in doc["w"]] if "w" in doc else None
        return CanonicalFiberParams(_complex_from_doc(doc["a"]), _complex_from_doc(doc["b"]), vv, w)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad fiber block: {exc}") from exc


def read_matrix_document(text: str):
    """Parse a matrix document; returns ``(element, claimed type, fiber)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("matrix document must be a JSON object")
    try:
        n = int(doc["n"])
        family = Family(doc["algebra"])
        rows = doc["entries"]
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"matrix document needs n, algebra and entries: {exc}") from exc
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise InputError(f"entries must be an {n}x{n} array")
    mat = np.array([[_complex_from_doc(z) for z in row] for row in rows], dtype=complex)
    try:
        alg = AlgebraKind(family, n)
        form_name = doc.get("form")
        if form_name is None:
            form = None
        else:
            kind = FormKind(form_name)
            if kind is FormKind.EXPLICIT:
                raise InputError("explicit forms are not supported in documents")
            form = BilinearForm(n, kind)
        elem = OrbitElement(mat, alg, form)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc
    jordan = None
    if doc.get("jordan_type") is not None:
        jordan = JordanType(tuple(int(p) for p in doc["jordan_type"]))
    fiber = _fiber_from_doc(doc["fiber"]) if doc.get("fiber") is not None else None
    return elem, jordan, fiber


# --- argument helpers -----------------------------------------------------


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse number {text!r}") from exc


def _parse_list(text: str) -> list[complex]:
    return [_parse_complex(t) for t in text.split(",") if t.strip()]


def parse_fiber(text: str) -> CanonicalFiberParams:
    """``a=1,b=0,v=1`` or ``a=1,b=0,v=1:0:2,w=0:1:1`` (vector entries split by ``:``)."""
    fields = {}
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"fiber entry {item!r} is not key=value")
        key = key.strip()
        if key not in ("a", "b", "v", "w"):
            raise InputError(f"unknown fiber parameter {key!r}")
        parts = [_parse_complex(t) for t in value.split(":")]
        fields[key] = parts[0] if len(parts) == 1 else tuple(parts)
    try:
        return CanonicalFiberParams(fields.get("a", 0), fields.get("b", 0), fields.get("v", 0), fields.get("w"))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad fiber parameters: {exc}") from exc


def _tolerances(args) -> Tolerances:
    if args.tol is None:
        return DEFAULT_TOL
    try:
        return Tolerances(check_tol=float(args.tol))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _build_element(args):
    """Element, claimed Jordan type and fibre parameters from the flags."""
    if getattr(args, "file", None):
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {args.file}: {exc}") from exc
        return read_matrix_document(text)

    if getattr(args, "regular_sl3", None):
        vals = _parse_list(args.regular_sl3)
        if len(vals) != 3:
            raise InputError("--regular-sl3 takes three entries a,b,c")
        a, b, c = vals
        mat = np.array([[0, a, b], [0, 0, c], [0, 0, 0]], dtype=complex)
        return OrbitElement(mat, AlgebraKind(Family.SL, 3)), None, None

    if args.algebra is None:
        raise InputError("give --file, --regular-sl3, or --algebra with --jordan or --fiber")
    family = Family(args.algebra)

    if args.fiber:
        if family is not Family.SO:
            raise InputError("--fiber applies to so(n)")
        params = parse_fiber(args.fiber)
        base = 7 if params.w is None else 11
        n = args.n if args.n is not None else base
        try:
            elem = canonical_fiber(params, padding=n - base)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        jordan = JordanType.parse(args.jordan) if args.jordan else None
        return elem, jordan, params

    if not args.jordan:
        raise InputError("--jordan is required with --algebra")
    jt = JordanType.parse(args.jordan)
    n = args.n if args.n is not None else jt.n
    alg = AlgebraKind(family, n)
    jt.check(alg)
    scales = _parse_list(args.params) if args.params else None
    if args.generic:
        elem = random_orbit_element(jt, alg, seed=args.seed)
    else:
        form = None if family is not Family.SO else "identity"
        try:
            elem = jordan_representative(jt, alg, form=form, scales=scales)
        except ValueError as exc:
            if isinstance(exc, PartitionError):
                raise
            raise InputError(str(exc)) from exc
    if args.random:
        elem = random_compact_conjugate(elem, seed=args.seed)
    return elem, jt, None


# --- commands -------------------------------------------------------------


def _report_document(report, elem_in: OrbitElement, claimed, fiber, args, tol) -> dict:
    methods = {}
    for name, res in report.methods.items():
        entry = {"rho": res.rho, "status": res.status}
        if res.detail:
            entry["detail"] = res.detail
        methods[name] = entry
    inv = report.invariants
    doc = {
        "input": {
            "algebra": elem_in.family.value,
            "n": elem_in.n,
            "form": _form_name(elem_in),
            "claimed_jordan_type": list(claimed.parts) if claimed is not None else None,
            "fiber": _fiber_doc(fiber) if fiber is not None else None,
            "seed": args.seed,
            "check_tol": tol.check_tol,
        },
        "jordan_type": list(report.jordan_type.parts),
        "methods": methods,
        "rho": report.rho,
        "invariants": {"c1": inv.c1, "c2": inv.c2, "c21": inv.c21, "kappa": inv.kappa},
        "spectrum": report.spectrum.as_list(),
        "lift_spectrum": report.lift_spectrum.as_list() if report.lift_spectrum is not None else None,
        "max_pairwise_deviation": report.max_pairwise_deviation,
        "oracle": None,
        "flags": list(report.flags),
    }
    if report.oracle is not None:
        o = report.oracle
        doc["oracle"] = {
            "r2": o.r2,
            "rho": o.rho,
            "residual": o.residual,
            "seed": o.seed,
            "iterations": o.iterations,
            "restarts": o.restarts,
            "converged": o.converged,
        }
    return doc


def _print_report(doc: dict, out):
    inp = doc["input"]
    out.write(f"{inp['algebra']}({inp['n']}), Jordan type {tuple(doc['jordan_type'])}\n")
    inv = doc["invariants"]
    out.write(f"  c1 = {inv['c1']:.12g}  c2 = {inv['c2']:.12g}  c21 = {inv['c21']:.12g}  kappa = {inv['kappa']}\n")
    top = max((abs(mu) for mu, _ in doc["spectrum"]), default=0.0)
    # show the rounding-level zero group as 0
    shown = [(0.0 if abs(mu) <= 1e-12 * top else mu, k) for mu, k in doc["spectrum"]]
    out.write(f"  spec(X*X): {', '.join(f'{mu:.10g} x{k}' for mu, k in shown)}\n")
    out.write(f"  {'method':<12} {'rho':>22}  status\n")
    for name, m in doc["methods"].items():
        rho = "-" if m["rho"] is None else f"{m['rho']:.15g}"
        line = f"  {name:<12} {rho:>22}  {m['status']}"
        if m.get("detail"):
            line += f" ({m['detail']})"
        out.write(line + "\n")
    if doc["oracle"] is not None:
        o = doc["oracle"]
        out.write(f"  oracle residual {o['residual']:.3e}, {o['iterations']} iterations, {o['restarts']} restarts\n")
    out.write(f"  max pairwise deviation {doc['max_pairwise_deviation']:.3e}\n")
    if doc["flags"]:
        out.write(f"  flags: {', '.join(doc['flags'])}\n")


def cmd_potential(args, out) -> int:
    tol = _tolerances(args)
    elem, claimed, fiber = _build_element(args)
    report = compute_all(elem, tol, oracle=args.oracle, seed=args.seed, jordan=claimed, fiber=fiber, max_restarts=args.restarts)
    doc = _report_document(report, elem, claimed, fiber, args, tol)
    ok = report.all_ok and report.max_pairwise_deviation <= tol.check_tol
    doc["status"] = "ok" if ok else "disagreement"
    if args.json:
        out.write(dumps(doc))
    else:
        _print_report(doc, out)
    return EXIT_OK if ok or args.lenient else EXIT_METHODS


def cmd_generate(args, out) -> int:
    elem, jt, fiber = _build_element(args)
    if elem.family is Family.SO and elem.form.kind is FormKind.ANTIDIAGONAL and args.form != "antidiagonal":
        elem = to_standard_form(elem)
    rep = validate(elem)
    if not rep.passed:
        raise MembershipError(f"generated matrix failed validation: {rep.describe()}")
    if jt is None:
        jt = jordan_type_of(elem.matrix)
    out.write(dumps(matrix_document(elem, jt, fiber)))
    return EXIT_OK


def cmd_verify(args, out) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(name, args.count, args.seed) for name in names]
    if args.json:
        out.write(
            dumps(
                {
                    "seed": args.seed,
                    "suites": {
                        r.name: {
                            "count": r.count,
                            "passed": r.passed,
                            "worst": r.worst,
                            "tolerance": r.tolerance,
                            "failures": r.failures,
                        }
                        for r in results
                    },
                }
            )
        )
    else:
        for r in results:
            out.write(r.summary() + "\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_SUITE


# --- entry point ----------------------------------------------------------


def _add_input_flags(p: argparse.ArgumentParser):
    p.add_argument("--file", help="matrix document (JSON) to read")
    p.add_argument("--algebra", choices=[f.value for f in Family])
    p.add_argument("--jordan", help="partition, e.g. 3,2,2 or 3,2^2,1^4")
    p.add_argument("--n", type=int, help="matrix size (default: size of the partition or fibre)")
    p.add_argument("--params", help="scale of each non-trivial Jordan block, comma separated")
    p.add_argument("--fiber", help="canonical fibre parameters, e.g. a=1,b=0,v=1 or a=1,b=0,v=1:0:0,w=0:1:0")
    p.add_argument("--generic", action="store_true", help="conjugate by exp of a random complex algebra element")
    p.add_argument("--random", action="store_true", help="conjugate by a Haar-random compact group element")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hkpot", description="HyperKähler potentials of nilpotent orbits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potential", help="compute the potential by every applicable method")
    _add_input_flags(p)
    p.add_argument("--regular-sl3", dest="regular_sl3", help="entries a,b,c of [[0,a,b],[0,0,c],[0,0,0]]")
    p.add_argument("--oracle", action="store_true", help="also solve the moment-map equations numerically")
    p.add_argument("--restarts", type=int, default=8, help="oracle restarts")
    p.add_argument("--tol", type=float, help="check tolerance for agreement between methods")
    p.add_argument("--json", action="store_true")
    p.add_argument("--lenient", action="store_true", help="exit 0 even if methods disagree")
    p.set_defaults(func=cmd_potential)

    g = sub.add_parser("generate", help="emit a matrix document")
    _add_input_flags(g)
    g.add_argument("--form", choices=["identity", "antidiagonal"], default="identity", help="so(n) convention of the output")
    g.set_defaults(func=cmd_generate, json=True, regular_sl3=None)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", default="all", choices=["all"] + list(SUITES))
    v.add_argument("--count", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return parser


def _fail(args, out, err, code: int, kind: str, message: str) -> int:
    if getattr(args, "json", False):
        out.write(dumps({"error": {"kind": kind, "message": message, "exit_code": code}}))
    err.write(f"hkpot: {kind}: {message}\n")
    return code


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_PARSE
    try:
        return args.func(args, out)
    except MembershipError as exc:
        return _fail(args, out, err, EXIT_MEMBERSHIP, "membership", str(exc))
    except (InputError, PartitionError) as exc:
        return _fail(args, out, err, EXIT_PARSE, "parse", str(exc))
    except ValueError as exc:
        return _fail(args, out, err, EXIT_PARSE, "parse", str(exc))


def run():
    sys.exit(main())
