"""Command-line front end: one verb per library operation, JSON in, canonical
JSON out.

Exit codes: 0 success, 1 verification failure (an invariant of the input
data is violated), 2 malformed input, 3 precision error.  Errors are
reported as a machine-readable object on standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import serialize as ser
from .blocks import LatticeData, TorusData, abelian_from_ap, lattice_block, tate, torus_block
from .errors import (
    DomainError,
    FCrystalsError,
    IncompatibleRingsError,
    InvalidActionError,
    InvalidExtensionDataError,
    InvalidSimplicialError,
    InvalidTraceError,
    MalformedInputError,
    PrecisionError,
    ShapeError,
    SingularFrobeniusError,
    UnsupportedCharacteristicError,
    UnsupportedInputError,
)
from .onemotive import (
    MotiveCrystal,
    assemble,
    cartier_dual,
    pair,
    torsion_height,
    tdr_dimension,
    verify_motive,
)
from .semilinear import newton_slopes, tensor, twisted_dual, verify
from .simplicial import cocharacter_group, div0_lattice, h1_weight_ledger, picard_skeleton
from .witt import dp_exp, dp_log, frobenius, frobenius_inverse, teichmuller, with_precision

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_MALFORMED = 2
EXIT_PRECISION = 3

_MALFORMED = (
    MalformedInputError,
    ShapeError,
    IncompatibleRingsError,
    UnsupportedCharacteristicError,
    UnsupportedInputError,
)
_INVARIANT = (
    InvalidExtensionDataError,
    InvalidSimplicialError,
    InvalidTraceError,
    InvalidActionError,
    DomainError,
    SingularFrobeniusError,
)


class VerificationFailure(FCrystalsError):
    """Raised by handlers when a report comes back negative."""

    code = "verification-failed"

    def __init__(self, message: str, doc):
        super().__init__(message)
        self.doc = doc


def _load(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise MalformedInputError(f"no such file: {path}", code="missing-file")
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON in {path}: {exc}", code="bad-json")


def _ring(args) -> "ser.RingParams":
    if args.ring is None:
        raise MalformedInputError("this verb requires --ring", code="missing-ring")
    params = ser.ring_from_doc(_load(args.ring))
    if args.precision is not None:
        params = with_precision(params, args.precision)
    return params


def _doc_ring(args, doc):
    if args.ring is not None:
        return _ring(args)
    params = ser.ring_from_doc(ser._need(doc, "ring", dict))
    if args.precision is not None:
        params = with_precision(params, args.precision)
    return params


# --- handlers: each takes (args, doc) and returns a JSON-able object ---------


def _h_witt_eval(args, doc):
    params = _doc_ring(args, doc) if "ring" in doc else _ring(args)
    op = ser._need(doc, "op", str)
    raw_args = doc.get("args", [])
    elems = [ser.elem_from_doc(x, params) for x in raw_args]

    def arity(k):
        if len(elems) != k:
            raise MalformedInputError(f"op {op!r} needs {k} argument(s)", code="bad-arity")

    if op == "add":
        arity(2)
        result = elems[0] + elems[1]
    elif op == "sub":
        arity(2)
        result = elems[0] - elems[1]
    elif op == "mul":
        arity(2)
        result = elems[0] * elems[1]
    elif op == "neg":
        arity(1)
        result = -elems[0]
    elif op == "inv":
        arity(1)
        result = elems[0].inverse()
    elif op == "frobenius":
        arity(1)
        result = frobenius(elems[0])
    elif op == "frobenius-inv":
        arity(1)
        result = frobenius_inverse(elems[0])
    elif op == "teichmuller":
        arity(1)
        result = teichmuller(params, elems[0])
    elif op == "exp":
        arity(1)
        result = dp_exp(elems[0])
    elif op == "log":
        arity(1)
        result = dp_log(elems[0])
    else:
        raise MalformedInputError(f"unknown witt op {op!r}", code="unknown-op")
    return {"result": ser.elem_to_doc(result)}


def _module(args, doc):
    params = ser.ring_from_doc(ser._need(doc, "ring", dict)) if args.ring is None else _ring(args)
    if args.precision is not None:
        params = with_precision(params, args.precision)
    return ser.module_from_doc(doc, params)


def _h_crystal_verify(args, doc):
    rep = verify(_module(args, doc))
    out = ser.verify_report_to_doc(rep)
    if not rep.ok:
        raise VerificationFailure(f"invariant violated: {rep.first_failure.name}", out)
    return out


def _h_crystal_slopes(args, doc):
    return ser.slopes_to_doc(newton_slopes(_module(args, doc)))


def _h_crystal_dual(args, doc):
    return ser.module_to_doc(twisted_dual(_module(args, doc)))


def _h_crystal_tensor(args, doc):
    left = ser.module_from_doc(ser._need(doc, "left", dict))
    right = ser.module_from_doc(ser._need(doc, "right", dict))
    return ser.module_to_doc(tensor(left, right))


def _h_crystal_twist(args, doc):
    params = _ring(args)
    kind = ser._need(doc, "kind", str)
    if kind == "tate":
        m = doc.get("m", 1)
        if not isinstance(m, int):
            raise MalformedInputError("twist exponent must be an integer", code="bad-type")
        module = tate(m, params)
    elif kind == "lattice":
        sigma = ser._int_matrix_from_doc(ser._need(doc, "sigma", list), "sigma")
        module = lattice_block(LatticeData(len(sigma), sigma), params)
    elif kind == "torus":
        sigma = ser._int_matrix_from_doc(ser._need(doc, "sigma", list), "sigma")
        module = torus_block(TorusData(len(sigma), sigma), params)
    elif kind == "abelian":
        module = abelian_from_ap(ser._need(doc, "ap", int), params).crystal
    else:
        raise MalformedInputError(f"unknown block kind {kind!r}", code="unknown-op")
    return ser.module_to_doc(module)


def _motive(args, doc):
    params = None if args.ring is None else _ring(args)
    spec = ser.motive_from_doc(doc, params)
    if args.precision is not None and args.ring is None:
        spec = ser.motive_from_doc(doc, with_precision(spec.params, args.precision))
    return spec


def _h_motive_assemble(args, doc):
    mc = assemble(_motive(args, doc))
    return {"module": ser.module_to_doc(mc.module), "label": mc.provenance.label}


def _h_motive_verify(args, doc):
    spec = _motive(args, doc)
    if "module" in doc and doc["module"] is not None:
        module = ser.module_from_doc(doc["module"], spec.params)
        mc = MotiveCrystal(module, spec)
    else:
        mc = assemble(spec)
    rep = verify_motive(mc)
    out = ser.motive_report_to_doc(rep)
    if not rep.ok:
        raise VerificationFailure(f"items failed: {','.join(rep.failed())}", out)
    return out


def _h_motive_dual(args, doc):
    return ser.motive_to_doc(cartier_dual(_motive(args, doc)))


def _h_motive_pair(args, doc):
    spec = _motive(args, doc)
    mc = assemble(spec)
    dual = assemble(cartier_dual(spec))
    pairing = pair(mc, dual)
    out = ser.pairing_to_doc(pairing)
    if not pairing.ok:
        raise VerificationFailure("pairing diagnostics failed", out)
    return out


def _h_motive_height(args, doc):
    spec = _motive(args, doc)
    height, exponent = torsion_height(spec, args.n)
    return {
        "height": height,
        "order_exponent": exponent,
        "tdr_dimension": tdr_dimension(spec),
    }


def _h_simplicial_cochar(args, doc):
    rank, basis = cocharacter_group(ser.simplicial_from_doc(doc))
    return {"rank": rank, "basis": basis}


def _h_simplicial_div0(args, doc):
    rank, basis = div0_lattice(ser.divisor_from_doc(doc))
    return {"rank": rank, "basis": basis}


def _h_picard_skeleton(args, doc):
    params = _ring(args)
    simp = ser.simplicial_from_doc(ser._need(doc, "simplicial", dict))
    div = ser.divisor_from_doc(ser._need(doc, "divisor", dict))
    g = doc.get("g", 0)
    if not isinstance(g, int):
        raise MalformedInputError("g must be an integer", code="bad-type")
    skeleton, spec = picard_skeleton(simp, div, g, params)
    return {"skeleton": ser.skeleton_to_doc(skeleton), "spec": ser.motive_to_doc(spec)}


def _h_h1_ledger(args, doc):
    params = _ring(args)
    sk = ser.skeleton_from_doc(doc)
    ledger = h1_weight_ledger(sk, params)
    out = ser.ledger_to_doc(ledger)
    if not ledger.consistent:
        raise VerificationFailure("ledger total disagrees with the assembled rank", out)
    return out


_HANDLERS = {
    "witt-eval": _h_witt_eval,
    "crystal-verify": _h_crystal_verify,
    "crystal-slopes": _h_crystal_slopes,
    "crystal-dual": _h_crystal_dual,
    "crystal-twist": _h_crystal_twist,
    "crystal-tensor": _h_crystal_tensor,
    "motive-assemble": _h_motive_assemble,
    "motive-verify": _h_motive_verify,
    "motive-dual": _h_motive_dual,
    "motive-pair": _h_motive_pair,
    "motive-height": _h_motive_height,
    "simplicial-cochar": _h_simplicial_cochar,
    "simplicial-div0": _h_simplicial_div0,
    "picard-skeleton": _h_picard_skeleton,
    "h1-ledger": _h_h1_ledger,
}


def _classify(exc: Exception) -> int:
    if isinstance(exc, VerificationFailure):
        return EXIT_VERIFICATION
    if isinstance(exc, PrecisionError):
        return EXIT_PRECISION
    if isinstance(exc, _MALFORMED):
        return EXIT_MALFORMED
    if isinstance(exc, _INVARIANT):
        return EXIT_VERIFICATION
    raise exc


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fcrystals",
        description="Exact filtered-module and motive-realization toolbox over truncated Witt rings.",
    )
    parser.add_argument("verb", choices=sorted(_HANDLERS))
    parser.add_argument("--ring", help="ring parameter document", default=None)
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        default=[],
        help="input document (repeatable for batch verification)",
    )
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--precision", type=int, default=None, help="override the Witt length n")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for batch inputs")
    parser.add_argument("--n", type=int, default=1, help="torsion level for motive-height")
    args = parser.parse_args(argv)

    handler = _HANDLERS[args.verb]
    if not args.inputs:
        parser.error("at least one --in document is required")

    def run_one(path: str):
        return handler(args, _load(path))

    def run_guarded(path: str) -> dict:
        try:
            return {"ok": True, "report": run_one(path)}
        except VerificationFailure as exc:
            return {"ok": False, "report": exc.doc}

    try:
        if len(args.inputs) == 1:
            result = run_one(args.inputs[0])
            _emit(ser.canonical_dumps(result), args.out)
            return EXIT_OK
        # batch verification over independent input files
        workers = max(1, args.jobs)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(run_guarded, args.inputs))
            results = dict(zip(args.inputs, reports))
        else:
            results = {path: run_guarded(path) for path in args.inputs}
        _emit(ser.canonical_dumps(results), args.out)
        return EXIT_OK if all(r["ok"] for r in results.values()) else EXIT_VERIFICATION
    except VerificationFailure as exc:
        _emit(ser.canonical_dumps(exc.doc), args.out)
        sys.stderr.write(ser.canonical_dumps({"code": exc.code, "message": str(exc)}))
        return EXIT_VERIFICATION
    except FCrystalsError as exc:
        status = _classify(exc)
        sys.stderr.write(ser.canonical_dumps({"code": exc.code, "message": str(exc)}))
        return status


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
