"""JSON payloads: one encoder/decoder pair per on-disk type.

Decoders validate structure before touching arithmetic and reject
anything that cannot round-trip: a field must carry the canonical
modulus, a flat's basis must already be in reduced row echelon form,
polynomial terms must be homogeneous of the stated degree.  All
decode failures raise UsageError so the CLI maps them to exit code 2.
"""

import dataclasses
import json
from typing import Any, Dict, List, Optional, Tuple

from . import audit as au
from . import constructions as cs
from . import geometry as geo
from . import hermitian as hm
from . import poly as hp
from .errors import HVLabError, UsageError
from .field import Field, field_create

# --------------------------------------------------------------- validation


def _need(obj: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(obj, dict):
        raise UsageError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise UsageError(f"{where}: missing key {key!r}")
    val = obj[key]
    if kind is int and isinstance(val, bool):
        raise UsageError(f"{where}: key {key!r} must be an integer")
    if not isinstance(val, kind):
        raise UsageError(
            f"{where}: key {key!r} must be {kind.__name__}, got {type(val).__name__}"
        )
    return val


def _int_list(val: Any, where: str) -> List[int]:
    if not isinstance(val, list) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in val
    ):
        raise UsageError(f"{where}: expected a list of integers")
    return [int(v) for v in val]


# -------------------------------------------------------------------- field


def field_to_json(fld: Field) -> Dict[str, Any]:
    return {"p": fld.p, "k": fld.k, "modulus": list(fld.modulus)}


def field_from_json(obj: Any) -> Field:
    p = _need(obj, "p", int, "field")
    k = _need(obj, "k", int, "field")
    modulus = _int_list(_need(obj, "modulus", list, "field"), "field.modulus")
    fld = field_create(p, k)
    if tuple(modulus) != fld.modulus:
        raise UsageError(
            f"field: modulus {modulus} is not the canonical modulus "
            f"{list(fld.modulus)} for F_{p}^{k}"
        )
    return fld


# --------------------------------------------------------------------- flat


def flat_to_json(x: geo.Flat) -> Dict[str, Any]:
    return {"dim": x.dim, "basis": [list(row) for row in x.basis]}


def flat_from_json(obj: Any, fld: Field) -> geo.Flat:
    dim = _need(obj, "dim", int, "flat")
    basis = _need(obj, "basis", list, "flat")
    rows = [_int_list(row, "flat.basis") for row in basis]
    if not rows:
        raise UsageError("flat: empty basis")
    for row in rows:
        for c in row:
            if not 0 <= c < fld.size:
                raise UsageError(f"flat: coefficient {c} outside F_{fld.size}")
    flat = geo.flat_from_rows(fld, rows)
    if flat.basis != tuple(tuple(r) for r in rows):
        raise UsageError("flat: basis is not in reduced row echelon form")
    if flat.dim != dim:
        raise UsageError(f"flat: stated dim {dim} but basis spans dim {flat.dim}")
    return flat


# --------------------------------------------------------------- polynomial


def poly_to_json(f: hp.HomogeneousPoly) -> Dict[str, Any]:
    return {
        "field": field_to_json(f.field),
        "nvars": f.nvars,
        "degree": f.degree,
        "terms": [
            {"exps": list(e), "coeff": c} for e, c in f.sorted_terms()
        ],
    }


def poly_from_json(obj: Any) -> hp.HomogeneousPoly:
    fld = field_from_json(_need(obj, "field", dict, "polynomial"))
    nvars = _need(obj, "nvars", int, "polynomial")
    degree = _need(obj, "degree", int, "polynomial")
    raw = _need(obj, "terms", list, "polynomial")
    terms: Dict[Tuple[int, ...], int] = {}
    for item in raw:
        exps = tuple(_int_list(_need(item, "exps", list, "term"), "term.exps"))
        coeff = _need(item, "coeff", int, "term")
        if not 0 <= coeff < fld.size:
            raise UsageError(f"term: coefficient {coeff} outside F_{fld.size}")
        if exps in terms:
            raise UsageError(f"term: duplicate exponent vector {list(exps)}")
        terms[exps] = coeff
    try:
        return hp.HomogeneousPoly(fld, nvars, degree, terms)
    except HVLabError as exc:
        raise UsageError(f"polynomial: {exc}") from exc


# ----------------------------------------------------------- hermitian form


def hermitian_to_json(h: hm.HermitianForm) -> Dict[str, Any]:
    return {
        "field": field_to_json(h.field),
        "m": h.m,
        "matrix": [list(row) for row in h.A],
    }


def hermitian_from_json(obj: Any) -> hm.HermitianForm:
    fld = field_from_json(_need(obj, "field", dict, "hermitian"))
    m = _need(obj, "m", int, "hermitian")
    matrix = [
        _int_list(row, "hermitian.matrix")
        for row in _need(obj, "matrix", list, "hermitian")
    ]
    try:
        h = hm.HermitianForm(fld, matrix)
    except HVLabError as exc:
        raise UsageError(f"hermitian: {exc}") from exc
    if h.m != m:
        raise UsageError(f"hermitian: stated m {m} but matrix has m {h.m}")
    return h


# -------------------------------------------------------------- certificate


def certificate_to_json(cert: cs.ExtremalCertificate) -> Dict[str, Any]:
    return {
        "kind": cert.kind,
        "q": cert.q,
        "d": cert.d,
        "m": cert.m,
        "claimed_count": cert.claimed_count,
        "components": [flat_to_json(x) for x in cert.components],
    }


def certificate_from_json(obj: Any, fld: Field) -> cs.ExtremalCertificate:
    return cs.ExtremalCertificate(
        kind=_need(obj, "kind", str, "certificate"),
        q=_need(obj, "q", int, "certificate"),
        d=_need(obj, "d", int, "certificate"),
        m=_need(obj, "m", int, "certificate"),
        claimed_count=_need(obj, "claimed_count", int, "certificate"),
        components=[
            flat_from_json(x, fld)
            for x in _need(obj, "components", list, "certificate")
        ],
    )


def construction_document(
    f: hp.HomogeneousPoly, cert: Optional[cs.ExtremalCertificate]
) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"polynomial": poly_to_json(f)}
    if cert is not None:
        doc["certificate"] = certificate_to_json(cert)
    return doc


def polynomial_from_document(obj: Any) -> hp.HomogeneousPoly:
    """Accept either a bare polynomial or a construction document."""
    if isinstance(obj, dict) and "polynomial" in obj:
        return poly_from_json(obj["polynomial"])
    return poly_from_json(obj)


# ------------------------------------------------------------------ reports


def predicates_to_json(p: au.StructuralPredicates) -> Dict[str, Any]:
    return {
        "contains_hyperplane": p.contains_hyperplane,
        "contains_plane": p.contains_plane,
        "contains_generator": p.contains_generator,
        "max_generators_in_one_plane": p.max_generators_in_one_plane,
        "contains_tangent_line": p.contains_tangent_line,
        "witnesses": {k: flat_to_json(v) for k, v in sorted(p.witnesses.items())},
    }


def audit_report_to_json(rep: au.AuditReport) -> Dict[str, Any]:
    return {
        "q": rep.q,
        "d": rep.d,
        "m": rep.m,
        "intersection_count": rep.intersection_count,
        "predicates": predicates_to_json(rep.predicates),
        "applicable_bounds": [dataclasses.asdict(b) for b in rep.applicable_bounds],
        "conjecture_bound": (
            None
            if rep.conjecture_bound is None
            else dataclasses.asdict(rep.conjecture_bound)
        ),
        "violations": list(rep.violations),
        "findings": list(rep.findings),
    }


def sampling_report_to_json(rep: au.SamplingReport) -> Dict[str, Any]:
    return {
        "q": rep.q,
        "d": rep.d,
        "m": rep.m,
        "mode": rep.mode,
        "n": rep.n,
        "seed": rep.seed,
        "max_count": rep.max_count,
        "margin_histogram": [list(pair) for pair in rep.margin_histogram],
        "identities": [],
        "bounds": [dict(b) for b in rep.bounds],
        "violations": list(rep.violations),
        "findings": list(rep.findings),
        "elapsed_ms": rep.elapsed_ms,
    }


# --------------------------------------------------------------------- io


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def read_document(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def write_document(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
