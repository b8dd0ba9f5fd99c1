"""Command-line client for the qmahler service.

Runs every operation in process by default; with --server it becomes a thin
HTTP client against a running service, rendering the same response models.
Exit codes: 0 success, 2 usage error, 3 domain error, 4 indeterminate
comparison.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Callable, Optional

from pydantic import BaseModel, ValidationError

from .errors import DomainError, IndeterminateComparisonError, QmahlerError
from .service import handlers
from .service.schemas import (
    ElementRequest,
    FieldInfoRequest,
    FieldInfoResponse,
    HeightResponse,
    IdealFactorRequest,
    IdealFactorResponse,
    IdealRefineRequest,
    IdealRefineResponse,
    MeasureResponse,
    PowerReplaceRequest,
    PowerReplaceResponse,
    ReplaceRequest,
    ReplaceResponse,
    TMetricRequest,
    TMetricResponse,
    VerifyRequest,
    VerifyResponse,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_INDETERMINATE = 4

_ENDPOINTS = {
    "field_info": ("/field/info", handlers.field_info, FieldInfoResponse),
    "element_height": ("/element/height", handlers.element_height, HeightResponse),
    "element_measure": ("/element/measure", handlers.element_measure, MeasureResponse),
    "ideal_factor": ("/ideal/factor", handlers.ideal_factor, IdealFactorResponse),
    "ideal_refine": ("/ideal/refine", handlers.ideal_refine, IdealRefineResponse),
    "replace": ("/replace", handlers.do_replace, ReplaceResponse),
    "power_replace": ("/power-replace", handlers.do_power_replace, PowerReplaceResponse),
    "tmetric": ("/tmetric", handlers.do_tmetric, TMetricResponse),
    "verify": ("/verify", handlers.do_verify, VerifyResponse),
}


def _field_spec(text: str):
    if text.strip().upper() == "Q":
        return "Q"
    try:
        return int(text)
    except ValueError as exc:
        raise DomainError(f"field spec must be an integer d or 'Q', got {text!r}") from exc


def _dispatch(op: str, request: BaseModel, server: Optional[str]) -> BaseModel:
    path, handler, response_model = _ENDPOINTS[op]
    if server is None:
        return handler(request)
    import httpx

    resp = httpx.post(
        server.rstrip("/") + path,
        json=request.model_dump(mode="json", by_alias=True),
        timeout=600.0,
    )
    if resp.status_code == 409:
        raise IndeterminateComparisonError(resp.json()["error"]["message"])
    if resp.status_code >= 400:
        try:
            message = resp.json()["error"]["message"]
        except Exception:
            message = resp.text
        raise DomainError(message)
    return response_model.model_validate(resp.json())


# -- table rendering ----------------------------------------------------------


def _fmt_value(v) -> str:
    if v.exact_form:
        return f"{v.exact_form} = {v.decimal}"
    return f"{v.decimal} (enclosure [{v.interval_lo}, {v.interval_hi}])"


def _render_field_info(r: FieldInfoResponse) -> str:
    ug = r.unit_group
    lines = [
        f"field: {r.field}" + (f"   d: {r.d}" if r.d is not None else ""),
        f"discriminant: {r.discriminant}   signature: {r.signature}   ring: {r.ring}",
        f"unit group: rank {ug.rank}, torsion order {ug.torsion_order}"
        + (f", fundamental unit {ug.fundamental_unit}" if ug.fundamental_unit else ""),
        f"balanced: {str(r.balance.balanced).lower()}   criterion_holds: {str(r.balance.criterion_holds).lower()}"
        + (f"   witness: {r.balance.witness}" if r.balance.witness else ""),
        f"class: Minkowski bound {r.class_info.minkowski_bound}, "
        f"class_number_one: {str(r.class_info.class_number_one).lower()}"
        + (
            f", class_number: {r.class_info.class_number}"
            if r.class_info.class_number is not None
            else ""
        )
        + (
            f", nonprincipal witness: {r.class_info.nonprincipal_witness}"
            if r.class_info.nonprincipal_witness
            else ""
        ),
    ]
    return "\n".join(lines)


def _render_height(r: HeightResponse) -> str:
    return f"h({r.element}) over {r.field}: {_fmt_value(r.value)}"


def _render_measure(r: MeasureResponse) -> str:
    return (
        f"m_{{{r.base_field}}}({r.element}) = [K(a):K]*h = "
        f"{r.relative_degree} * h({r.element}): {_fmt_value(r.value)}"
    )


def _render_ideal_factor(r: IdealFactorResponse) -> str:
    lines = [f"ideal {r.ideal} of {r.field}, norm {r.norm}"]
    for f in r.factors:
        lines.append(
            f"  {f.prime}^{f.exponent}   (norm {f.residue_norm}, {f.split_type})"
        )
    if not r.factors:
        lines.append("  (unit ideal)")
    return "\n".join(lines)


def _render_ideal_refine(r: IdealRefineResponse) -> str:
    lines = [f"refine {r.ideal} against {len(r.parts)} parts over {r.field}:"]
    for i, (ideal, norm, contains) in enumerate(
        zip(r.refined, r.refined_norms, r.containments)
    ):
        lines.append(f"  I_{i + 1} = {ideal}   norm {norm}   J_{i + 1} inside: {contains}")
    lines.append(f"product equals ideal: {r.product_equals_ideal}")
    return "\n".join(lines)


def _render_replace(r: ReplaceResponse) -> str:
    lines = [
        f"alpha = {r.alpha} over {r.field}",
        f"gamma0 (unit) = {r.gamma0}",
    ]
    for i, g in enumerate(r.gammas):
        cert = r.certificates[i]
        lines.append(
            f"  gamma_{i + 1} = {g}   h = {_fmt_value(cert.height)}   "
            f"<= {_fmt_value(cert.bound)}   [{'exact' if cert.exact else 'interval'}]"
        )
    lines.append(f"certified: {str(r.certified).lower()}")
    return "\n".join(lines)


def _render_power_replace(r: PowerReplaceResponse) -> str:
    lines = [
        f"alpha = {r.alpha}, lambda = {r.lam}",
        f"gamma0^lambda (unit) = {r.gamma0_lambda}",
    ]
    for i, g in enumerate(r.gamma_lambda_values):
        cert = r.certificates[i]
        lines.append(
            f"  gamma_{i + 1}^lambda = {g}   h = {_fmt_value(cert.height)}   "
            f"<= lambda * m: {_fmt_value(cert.bound)}"
        )
    lines.append(f"certified: {str(r.certified).lower()}")
    return "\n".join(lines)


def _render_tmetric(r: TMetricResponse) -> str:
    lines = [f"alpha = {r.alpha} over {r.field}"]
    for entry in r.results:
        lines.append(f"t = {entry.t}: {_fmt_value(entry.value)}")
        if entry.factors:
            lines.append(f"  attained by: {' * '.join(entry.factors)}")
            if entry.unit_factor not in (None, "1"):
                lines.append(f"  unit factor: {entry.unit_factor}")
        else:
            lines.append("  attained by the empty factorization (torsion input)")
        ties = entry.certificate.get("tie_candidates")
        if ties:
            lines.append(f"  ties: {ties}")
    return "\n".join(lines)


def _render_verify(r: VerifyResponse) -> str:
    status = "PASS" if r.passed else "FAIL"
    lines = [
        f"suite {r.suite}: {status} ({r.checked} checks in {r.elapsed_seconds}s)"
    ]
    for f in r.failures[:20]:
        lines.append(f"  FAIL: {f}")
    if len(r.failures) > 20:
        lines.append(f"  ... and {len(r.failures) - 20} more")
    return "\n".join(lines)


_RENDERERS: dict[type, Callable] = {
    FieldInfoResponse: _render_field_info,
    HeightResponse: _render_height,
    MeasureResponse: _render_measure,
    IdealFactorResponse: _render_ideal_factor,
    IdealRefineResponse: _render_ideal_refine,
    ReplaceResponse: _render_replace,
    PowerReplaceResponse: _render_power_replace,
    TMetricResponse: _render_tmetric,
    VerifyResponse: _render_verify,
}


def _emit(response: BaseModel, output: str):
    if output == "json":
        print(response.model_dump_json(indent=2, by_alias=True))
    else:
        print(_RENDERERS[type(response)](response))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmahler",
        description="Exact heights, balancedness and t-metric Mahler measures "
        "for quadratic number fields.",
    )
    parser.add_argument(
        "--output",
        "-o",
        choices=("table", "json"),
        default="table",
        help="output format (default: table)",
    )
    parser.add_argument(
        "--precision-bits",
        type=int,
        default=int(os.environ.get("QMAHLER_PRECISION_BITS", "128")),
        help="working precision in bits (default 128, env QMAHLER_PRECISION_BITS)",
    )
    parser.add_argument(
        "--tie-tolerance", type=float, default=1e-12, help="tie tolerance (default 1e-12)"
    )
    parser.add_argument(
        "--server",
        default=os.environ.get("QMAHLER_SERVER"),
        help="base URL of a running qmahler service; default runs in process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_field = sub.add_parser("field", help="field-level information")
    field_sub = p_field.add_subparsers(dest="subcommand", required=True)
    p_info = field_sub.add_parser("info", help="discriminant, units, balance, class data")
    p_info.add_argument("-d", required=True, help="squarefree integer d, or Q")

    p_elem = sub.add_parser("element", help="element-level computations")
    elem_sub = p_elem.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        ("height", "Weil height h(x)"),
        ("measure", "Mahler measure over the base field"),
    ):
        p = elem_sub.add_parser(name, help=help_text)
        p.add_argument("-d", required=True, help="base field: squarefree d or Q")
        p.add_argument("-x", required=True, help="element expression")

    p_ideal = sub.add_parser("ideal", help="ideal factorization and refinement")
    ideal_sub = p_ideal.add_subparsers(dest="subcommand", required=True)
    p_if = ideal_sub.add_parser("factor", help="factor an ideal into prime ideals")
    p_if.add_argument("-d", required=True)
    p_if.add_argument("--ideal", required=True, help="`[a, b+c*w]` or `(g)`/(g1, g2)")
    p_ir = ideal_sub.add_parser("refine", help="refine I against parts J_1..J_N")
    p_ir.add_argument("-d", required=True)
    p_ir.add_argument("--ideal", required=True)
    p_ir.add_argument(
        "--part",
        action="append",
        default=[],
        help="one part ideal (repeatable); or use --parts with ';' separators",
    )
    p_ir.add_argument("--parts", help="';'-separated list of part ideals")

    p_rep = sub.add_parser("replace", help="height-reducing replacement (class number 1)")
    p_rep.add_argument("-d", required=True)
    p_rep.add_argument("--alpha", required=True)
    p_rep.add_argument("--factors", required=True, help="comma-separated factor list")

    p_prep = sub.add_parser("power-replace", help="lambda-power replacement")
    p_prep.add_argument("-d", required=True)
    p_prep.add_argument("--lambda", dest="lam", type=int, required=True)
    p_prep.add_argument("--alpha", required=True)
    p_prep.add_argument("--factors", required=True)

    p_tm = sub.add_parser("tmetric", help="t-metric Mahler measure")
    p_tm.add_argument("-d", required=True)
    p_tm.add_argument("--alpha", required=True)
    p_tm.add_argument("--t", required=True, help="comma-separated t values (e.g. 1,2,inf)")

    p_ver = sub.add_parser("verify", help="run a property suite")
    p_ver.add_argument("--suite", required=True)
    p_ver.add_argument("--instances", type=int)
    p_ver.add_argument("--seed", type=int, default=0)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8787)

    return parser


def _build_request(args) -> tuple[str, BaseModel]:
    common = {
        "precision_bits": args.precision_bits,
        "tie_tolerance": args.tie_tolerance,
    }
    if args.command == "field":
        return "field_info", FieldInfoRequest(field=_field_spec(args.d), **common)
    if args.command == "element":
        req = ElementRequest(field=_field_spec(args.d), expr=args.x, **common)
        return f"element_{args.subcommand}", req
    if args.command == "ideal" and args.subcommand == "factor":
        return "ideal_factor", IdealFactorRequest(
            field=_field_spec(args.d), ideal=args.ideal, **common
        )
    if args.command == "ideal" and args.subcommand == "refine":
        parts = list(args.part)
        if args.parts:
            parts.extend(p.strip() for p in args.parts.split(";") if p.strip())
        if not parts:
            raise DomainError("refine needs at least one part (--part/--parts)")
        return "ideal_refine", IdealRefineRequest(
            field=_field_spec(args.d), ideal=args.ideal, parts=parts, **common
        )
    if args.command == "replace":
        return "replace", ReplaceRequest(
            field=_field_spec(args.d),
            alpha=args.alpha,
            factors=[f.strip() for f in args.factors.split(",") if f.strip()],
            **common,
        )
    if args.command == "power-replace":
        return "power_replace", PowerReplaceRequest(
            field=_field_spec(args.d),
            lam=args.lam,
            alpha=args.alpha,
            factors=[f.strip() for f in args.factors.split(",") if f.strip()],
            **common,
        )
    if args.command == "tmetric":
        return "tmetric", TMetricRequest(
            field=_field_spec(args.d),
            alpha=args.alpha,
            ts=[t.strip() for t in args.t.split(",") if t.strip()],
            **common,
        )
    if args.command == "verify":
        return "verify", VerifyRequest(
            suite=args.suite, instances=args.instances, seed=args.seed
        )
    raise DomainError(f"unhandled command {args.command}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK
    try:
        op, request = _build_request(args)
        response = _dispatch(op, request, args.server)
    except IndeterminateComparisonError as exc:
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (DomainError, ZeroDivisionError, QmahlerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValidationError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(response, args.output)
    if type(response) is VerifyResponse and not response.passed:
        return 1
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
