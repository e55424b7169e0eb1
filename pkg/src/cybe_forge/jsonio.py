"""Versioned JSON serialization for all on-disk formats.

Every document carries a ``schema`` field; loaders reject unknown names or
versions.  Scalars are decimal strings "p/q" (plain "p" for integers).
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .averaging import ConfAveOp, HomogeneousSpec
from .conformal import ConfElem
from .cybe import LaurentOp
from .errors import SchemaError
from .liealg import LieAlgebra, RootDatum, RootSubsystem, from_structure
from .qlinalg import QMat, QVec

LIE_SCHEMA = "lie-algebra.v1"
ROOT_SCHEMA = "root-datum.v1"
CONF_ELEM_SCHEMA = "conf-elem.v1"
CONF_AVE_SCHEMA = "conf-ave-op.v1"
HOMOG_SCHEMA = "homog-spec.v1"
LAURENT_SCHEMA = "laurent-op.v1"
REPORT_SCHEMA = "report.v1"


def _frac(s: Any) -> Fraction:
    try:
        return Fraction(str(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational scalar {s!r}: {exc}")


def _fstr(f: Fraction) -> str:
    return str(Fraction(f))


def _vec_to_json(v: QVec) -> list[str]:
    return [_fstr(x) for x in v.fractions()]


def _vec_from_json(data: Any) -> QVec:
    return QVec.from_fractions([_frac(x) for x in data])


def _mat_to_json(m: QMat) -> list[list[str]]:
    return [[_fstr(x) for x in row] for row in m.fractions()]


def _mat_from_json(data: Any) -> QMat:
    return QMat.from_fractions([[_frac(x) for x in row] for row in data])


def _expect_schema(doc: Any, schema: str) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError("document is not a JSON object")
    found = doc.get("schema")
    if found != schema:
        raise SchemaError(f"expected schema {schema!r}, found {found!r}")
    return doc


def algebra_to_json(g: LieAlgebra) -> dict:
    structure = []
    for (i, j), vec in sorted(g.products.items()):
        entries = [[k, _fstr(vec[k])] for k in vec.nonzero_indices()]
        structure.append([i, j, entries])
    return {
        "schema": LIE_SCHEMA,
        "dim": g.dim,
        "labels": list(g.labels),
        "structure": structure,
    }


def algebra_from_json(doc: Any) -> LieAlgebra:
    doc = _expect_schema(doc, LIE_SCHEMA)
    try:
        dim = int(doc["dim"])
        labels = [str(l) for l in doc["labels"]]
        products = {}
        for i, j, entries in doc["structure"]:
            coords = [Fraction(0)] * dim
            for k, c in entries:
                coords[int(k)] = _frac(c)
            products[(int(i), int(j))] = QVec.from_fractions(coords)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SchemaError(f"malformed {LIE_SCHEMA} document: {exc}")
    return from_structure(dim, labels, products)


def root_datum_to_json(rd: RootDatum) -> dict:
    return {
        "schema": ROOT_SCHEMA,
        "dim": rd.algebra.dim,
        "cartan": [_vec_to_json(h) for h in rd.cartan],
        "roots": [[_fstr(x) for x in r] for r in rd.roots],
        "rootvecs": [_vec_to_json(v) for v in rd.root_vectors],
        "coroots": [_vec_to_json(v) for v in rd.coroots],
    }


def root_datum_from_json(doc: Any, algebra: LieAlgebra) -> RootDatum:
    doc = _expect_schema(doc, ROOT_SCHEMA)
    try:
        if int(doc["dim"]) != algebra.dim:
            raise SchemaError("root datum dimension differs from the algebra")
        cartan = tuple(_vec_from_json(h) for h in doc["cartan"])
        roots = tuple(tuple(_frac(x) for x in r) for r in doc["roots"])
        rootvecs = tuple(_vec_from_json(v) for v in doc["rootvecs"])
        coroots = tuple(_vec_from_json(v) for v in doc["coroots"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {ROOT_SCHEMA} document: {exc}")
    if not len(roots) == len(rootvecs) == len(coroots):
        raise SchemaError("root lists have inconsistent lengths")
    return RootDatum(algebra, cartan, roots, rootvecs, coroots)


def conf_elem_to_json(x: ConfElem) -> dict:
    return {
        "schema": CONF_ELEM_SCHEMA,
        "terms": [[k, _vec_to_json(v)] for k, v in x.terms],
    }


def conf_elem_from_json(doc: Any, dim: int) -> ConfElem:
    doc = _expect_schema(doc, CONF_ELEM_SCHEMA)
    try:
        terms = [(int(k), _vec_from_json(v)) for k, v in doc["terms"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {CONF_ELEM_SCHEMA} document: {exc}")
    return ConfElem(dim, terms)


def conf_ave_to_json(fam: ConfAveOp) -> dict:
    return {
        "schema": CONF_AVE_SCHEMA,
        "N": fam.N,
        "family": [_mat_to_json(m) for m in fam.family],
    }


def conf_ave_from_json(doc: Any) -> ConfAveOp:
    doc = _expect_schema(doc, CONF_AVE_SCHEMA)
    try:
        family = [_mat_from_json(m) for m in doc["family"]]
        stated = int(doc["N"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {CONF_AVE_SCHEMA} document: {exc}")
    fam = ConfAveOp.make(family)
    if fam.N != stated:
        raise SchemaError(f"stated degree {stated} differs from family degree {fam.N}")
    return fam


def homog_spec_to_json(spec: HomogeneousSpec) -> dict:
    return {
        "schema": HOMOG_SCHEMA,
        "subsystem": list(spec.subsystem.members),
        "components": [list(c) for c in spec.subsystem.components],
        "xi": {str(k): _fstr(v) for k, v in sorted(spec.xi.items())},
        "hperp": [_mat_to_json(m) for m in spec.hperp_family],
    }


def homog_spec_from_json(doc: Any) -> HomogeneousSpec:
    doc = _expect_schema(doc, HOMOG_SCHEMA)
    try:
        members = tuple(int(i) for i in doc["subsystem"])
        components = tuple(tuple(int(i) for i in c) for c in doc["components"])
        xi = {int(k): _frac(v) for k, v in doc["xi"].items()}
        hperp = tuple(_mat_from_json(m) for m in doc["hperp"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {HOMOG_SCHEMA} document: {exc}")
    return HomogeneousSpec(RootSubsystem(members, components), xi, hperp)


def laurent_to_json(p: LaurentOp) -> dict:
    return {
        "schema": LAURENT_SCHEMA,
        "dim": p.dim if not p.is_zero() else 0,
        "coeffs": [[k, _mat_to_json(m)] for k, m in p.coeffs],
    }


def laurent_from_json(doc: Any) -> LaurentOp:
    doc = _expect_schema(doc, LAURENT_SCHEMA)
    try:
        coeffs = {int(k): _mat_from_json(m) for k, m in doc["coeffs"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed {LAURENT_SCHEMA} document: {exc}")
    return LaurentOp.make(coeffs)


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}")


def dump_json(path: str, doc: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
