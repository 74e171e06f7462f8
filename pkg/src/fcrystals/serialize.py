"""JSON document codecs with a canonical byte form.

All documents are plain JSON with sorted keys, compact separators and exact
integers or rational strings (never floats), so golden files are stable
across runs and platforms.  Element serialization: a list of a integers in
[0, p^n); matrices: row-major nested lists of element serializations.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .blocks import AbelianBlock, LatticeData, TorusData, abelian_from_ap
from .errors import MalformedInputError
from .onemotive import MotiveReport, OneMotiveSpec, PairingMatrix
from .semilinear import FilteredFModule, SlopeProfile, VerifyReport, wmat, WMat
from .simplicial import DivisorPresentation, H1Ledger, PicardSkeleton, SimplicialComponents
from .witt import RingParams, WittElem

__all__ = [
    "canonical_dumps",
    "ring_to_doc",
    "ring_from_doc",
    "elem_to_doc",
    "elem_from_doc",
    "wmat_to_doc",
    "wmat_from_doc",
    "module_to_doc",
    "module_from_doc",
    "slopes_to_doc",
    "motive_to_doc",
    "motive_from_doc",
    "simplicial_from_doc",
    "divisor_from_doc",
    "skeleton_to_doc",
    "skeleton_from_doc",
    "verify_report_to_doc",
    "motive_report_to_doc",
    "pairing_to_doc",
    "ledger_to_doc",
]


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _need(doc: dict, key: str, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise MalformedInputError(f"missing field {key!r}", code="missing-field")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise MalformedInputError(f"field {key!r} has the wrong type", code="bad-type")
    return val


def ring_to_doc(params: RingParams) -> dict:
    doc = {"p": params.p, "n": params.n, "a": params.a}
    if params.modulus is not None:
        doc["modulus"] = list(params.modulus)
    return doc


def ring_from_doc(doc: dict) -> RingParams:
    p = _need(doc, "p", int)
    n = _need(doc, "n", int)
    a = doc.get("a", 1)
    if not isinstance(a, int):
        raise MalformedInputError("field 'a' has the wrong type", code="bad-type")
    modulus = doc.get("modulus")
    if modulus is not None:
        if not isinstance(modulus, list) or not all(isinstance(c, int) for c in modulus):
            raise MalformedInputError("modulus must be a list of integers", code="bad-modulus")
        modulus = tuple(modulus)
    return RingParams(p, n, a, modulus)


def elem_to_doc(x: WittElem) -> list[int]:
    return list(x.coords)


def elem_from_doc(doc, params: RingParams) -> WittElem:
    if isinstance(doc, int):
        return params.from_int(doc)
    if not isinstance(doc, list) or not all(isinstance(c, int) for c in doc):
        raise MalformedInputError("element must be a list of integers", code="bad-element")
    return params.elem(doc)


def wmat_to_doc(m: WMat) -> list[list[list[int]]]:
    return [[elem_to_doc(x) for x in row] for row in m]


def wmat_from_doc(doc, params: RingParams) -> WMat:
    if not isinstance(doc, list) or not all(isinstance(row, list) for row in doc):
        raise MalformedInputError("matrix must be a nested list", code="bad-matrix")
    return wmat(params, [[elem_from_doc(x, params) for x in row] for row in doc])


def module_to_doc(m: FilteredFModule) -> dict:
    return {
        "ring": ring_to_doc(m.params),
        "rank": m.rank,
        "weights": list(m.weights),
        "F": wmat_to_doc(m.f_mat),
        "V": wmat_to_doc(m.v_mat) if m.v_mat is not None else None,
        "level": m.level,
    }


def module_from_doc(doc: dict, params: RingParams | None = None) -> FilteredFModule:
    if params is None:
        params = ring_from_doc(_need(doc, "ring", dict))
    rank = _need(doc, "rank", int)
    weights = _need(doc, "weights", list)
    f = wmat_from_doc(_need(doc, "F"), params)
    vdoc = doc.get("V")
    v = wmat_from_doc(vdoc, params) if vdoc is not None else None
    level = doc.get("level", 1)
    if not isinstance(level, int):
        raise MalformedInputError("level must be an integer", code="bad-type")
    return FilteredFModule(params, rank, tuple(weights), f, v, level)


def slopes_to_doc(profile: SlopeProfile) -> dict:
    return {
        "slopes": [
            {"slope": str(Fraction(s)), "mult": mult} for s, mult in profile.pairs
        ]
    }


def _int_matrix_from_doc(doc, what: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(doc, list) or not all(
        isinstance(row, list) and all(isinstance(x, int) for x in row) for row in doc
    ):
        raise MalformedInputError(f"{what} must be a nested integer list", code="bad-matrix")
    return tuple(tuple(row) for row in doc)


def motive_to_doc(s: OneMotiveSpec) -> dict:
    if s.abelian.dim == 0:
        abelian_doc = None
    else:
        abelian_doc = {"crystal": module_to_doc(s.abelian.crystal)}
    return {
        "ring": ring_to_doc(s.params),
        "lattice": {"rank": s.lattice.rank, "sigma": [list(r) for r in s.lattice.sigma_action]},
        "torus": {"rank": s.torus.rank, "sigma": [list(r) for r in s.torus.sigma_action]},
        "abelian": abelian_doc,
        "ext": {
            "AT": wmat_to_doc(s.ext_at),
            "XA": wmat_to_doc(s.ext_xa),
            "XT": wmat_to_doc(s.ext_xt),
        },
        "label": s.label,
    }


def _lattice_from_doc(doc: dict, cls):
    rank = _need(doc, "rank", int)
    sigma = doc.get("sigma")
    if sigma is None:
        return cls.trivial(rank)
    return cls(rank, _int_matrix_from_doc(sigma, "sigma"))


def motive_from_doc(doc: dict, params: RingParams | None = None) -> OneMotiveSpec:
    if params is None:
        params = ring_from_doc(_need(doc, "ring", dict))
    lattice = _lattice_from_doc(_need(doc, "lattice", dict), LatticeData)
    torus = _lattice_from_doc(_need(doc, "torus", dict), TorusData)
    abelian_doc = doc.get("abelian")
    if abelian_doc is None:
        abelian = AbelianBlock.empty(params)
    elif "ap" in abelian_doc:
        ap = abelian_doc["ap"]
        if not isinstance(ap, int):
            raise MalformedInputError("abelian trace must be an integer", code="bad-type")
        abelian = abelian_from_ap(ap, params)
    elif "crystal" in abelian_doc:
        abelian = AbelianBlock.from_module(module_from_doc(abelian_doc["crystal"], params))
    else:
        raise MalformedInputError("abelian block needs 'ap' or 'crystal'", code="missing-field")
    ext = doc.get("ext") or {}
    g2 = 2 * abelian.dim
    rT, rX = torus.rank, lattice.rank

    def ext_block(key: str, rows: int, cols: int) -> WMat:
        sub = ext.get(key)
        if sub is None or rows == 0 or cols == 0:
            return wmat(params, [[params.zero()] * cols for _ in range(rows)])
        return wmat_from_doc(sub, params)

    return OneMotiveSpec(
        params,
        lattice,
        torus,
        abelian,
        ext_block("AT", rT, g2),
        ext_block("XA", g2, rX),
        ext_block("XT", rT, rX),
        label=str(doc.get("label", "")),
    )


def simplicial_from_doc(doc: dict) -> SimplicialComponents:
    counts = _need(doc, "counts", list)
    faces = _need(doc, "faces", dict)
    if not all(isinstance(c, int) for c in counts):
        raise MalformedInputError("counts must be integers", code="bad-type")
    levels = len(counts) - 1
    face_maps = []
    for j in range(1, levels + 1):
        key = str(j)
        level = faces.get(key)
        if level is None:
            raise MalformedInputError(f"faces missing level {key!r}", code="missing-field")
        if not isinstance(level, list) or not all(
            isinstance(fmap, list) and all(isinstance(x, int) for x in fmap) for fmap in level
        ):
            raise MalformedInputError(f"faces[{key!r}] must be integer lists", code="bad-type")
        face_maps.append(tuple(tuple(fmap) for fmap in level))
    return SimplicialComponents(tuple(counts), tuple(face_maps))


def divisor_from_doc(doc: dict) -> DivisorPresentation:
    m = _need(doc, "m", int)
    return DivisorPresentation(
        m,
        _int_matrix_from_doc(doc.get("P0", []), "P0"),
        _int_matrix_from_doc(doc.get("P1", []), "P1"),
        _int_matrix_from_doc(doc.get("NS", []), "NS"),
    )


def skeleton_to_doc(sk: PicardSkeleton) -> dict:
    return {
        "lattice_rank": sk.lattice_rank,
        "torus_rank": sk.torus_rank,
        "g": sk.abelian_dim,
    }


def skeleton_from_doc(doc: dict) -> PicardSkeleton:
    return PicardSkeleton(
        _need(doc, "lattice_rank", int),
        _need(doc, "torus_rank", int),
        _need(doc, "g", int),
    )


def verify_report_to_doc(rep: VerifyReport) -> dict:
    return {
        "ok": rep.ok,
        "checks": [
            {"name": c.name, "ok": c.ok, "detail": c.detail} for c in rep.checks
        ],
    }


def motive_report_to_doc(rep: MotiveReport) -> dict:
    return {
        "ok": rep.ok,
        "items": [{"item": key, "ok": ok, "detail": detail} for key, ok, detail in rep.items],
        "graded_ranks": {
            "gr0": rep.graded_ranks[0],
            "gr-1": rep.graded_ranks[1],
            "gr-2": rep.graded_ranks[2],
        },
    }


def pairing_to_doc(p: PairingMatrix) -> dict:
    return {
        "gram": wmat_to_doc(p.gram),
        "perfect": p.perfect,
        "weight_orthogonal": p.weight_orthogonal,
        "frobenius_compatible": p.frobenius_compatible,
        "verschiebung_compatible": p.verschiebung_compatible,
        "ok": p.ok,
    }


def ledger_to_doc(ledger: H1Ledger) -> dict:
    return {
        "gr0": ledger.gr0,
        "gr1": ledger.gr1,
        "gr2": ledger.gr2,
        "total": ledger.total,
        "crystal_rank": ledger.crystal_rank,
        "consistent": ledger.consistent,
    }
