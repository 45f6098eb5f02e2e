"""Text format for groups and constructions.

A group file looks like::

    REGAFF v1
    FIELD 2 1 0,1
    DIM 3
    # anything after '#' is ignored
    FAMILY example2_n3q2
    SPLIT 2 1
    D 1
    QF 0,1;0,0
    W 1
    GEN 1,1,0,0;0,1,1,0;0,0,1,1;0,0,0,1
    ELEM ...

Matrices list rows separated by ``;`` and entries by ``,``.  An element of
GF(p^ell) is written ``c0.c1...`` (coefficients of 1, x, x^2, ...), a
rational as ``num/den``.  FAMILY, SPLIT, D, QF and W describe a
construction; GEN and ELEM lines carry explicit matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .affine import AffineElem
from .construct import RegularSubgroupDesc
from .errors import FormatError, RegaffError
from .field import parse_field_header
from .linalg import decode_matrix, encode_matrix
from .quadform import SubspaceBasis, builtin, with_kernel

VERSION = "REGAFF v1"


@dataclass
class GroupFile:
    field: Any
    n: int
    desc: RegularSubgroupDesc | None = None
    gens: list[AffineElem] = dc_field(default_factory=list)
    elems: list[AffineElem] = dc_field(default_factory=list)


def _vec(field: Any, xs: Iterable[Any]) -> str:
    return ",".join(field.encode(x) for x in xs)


def dump_group(field: Any, n: int, desc: RegularSubgroupDesc | None = None,
               gens: Iterable[AffineElem] = (), elems: Iterable[AffineElem] = (),
               comments: Iterable[str] = ()) -> str:
    lines = [VERSION, field.header(), f"DIM {n}"]
    lines += [f"# {c}" for c in comments]
    if desc is not None:
        lines += [
            f"FAMILY {desc.kind}",
            f"SPLIT {desc.m} {desc.k}",
            f"D {_vec(field, desc.d)}",
            f"QF {encode_matrix(desc.Q.U)}",
        ]
        lines += [f"W {_vec(field, v)}" for v in desc.W.vectors]
    lines += [f"GEN {encode_matrix(g.mat)}" for g in gens]
    lines += [f"ELEM {encode_matrix(g.mat)}" for g in elems]
    return "\n".join(lines) + "\n"


def write_group(path: str | Path, *args: Any, **kwargs: Any) -> None:
    Path(path).write_text(dump_group(*args, **kwargs))


def _elem(field: Any, n: int, text: str, no: int) -> AffineElem:
    mat = decode_matrix(field, text)
    if mat.shape != (n + 1, n + 1):
        raise FormatError(f"matrix of shape {mat.shape}, expected {(n + 1, n + 1)}", no)
    try:
        return AffineElem(mat)
    except (ValueError, RegaffError) as exc:
        raise FormatError(f"not an affine matrix: {exc}", no) from None


def parse_group(text: str) -> GroupFile:
    lines = text.splitlines()
    if not lines or lines[0].strip() != VERSION:
        raise FormatError(f"first line must be {VERSION!r}", 1)
    field = None
    n = None
    spec: dict[str, Any] = {"W": []}
    gens: list[AffineElem] = []
    elems: list[AffineElem] = []
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if tag == "FIELD":
                field = parse_field_header(line)
                continue
            if field is None:
                raise FormatError("FIELD must come before data", no)
            if tag == "DIM":
                n = int(rest)
                if n < 1:
                    raise FormatError("DIM must be positive", no)
            elif n is None:
                raise FormatError("DIM must come before data", no)
            elif tag == "FAMILY":
                spec["kind"] = rest
            elif tag == "SPLIT":
                m, k = (int(x) for x in rest.split())
                spec["split"] = (m, k)
            elif tag == "D":
                spec["d"] = [field.decode(x) for x in rest.split(",")]
            elif tag == "QF":
                spec["U"] = decode_matrix(field, rest)
            elif tag == "W":
                spec["W"].append([field.decode(x) for x in rest.split(",")])
            elif tag == "GEN":
                gens.append(_elem(field, n, rest, no))
            elif tag == "ELEM":
                elems.append(_elem(field, n, rest, no))
            else:
                raise FormatError(f"unknown directive {tag!r}", no)
        except FormatError as exc:
            if exc.line is None:
                raise FormatError(str(exc), no) from None
            raise
        except ValueError as exc:
            raise FormatError(f"malformed {tag} line: {exc}", no) from None
    if field is None or n is None:
        raise FormatError("missing FIELD or DIM line")
    desc = _desc_from_spec(field, n, spec) if "kind" in spec else None
    return GroupFile(field, n, desc, gens, elems)


def _desc_from_spec(field: Any, n: int, spec: dict[str, Any]) -> RegularSubgroupDesc:
    try:
        Q, psi, m, k = builtin(spec["kind"], field, n)
    except (ValueError, RegaffError) as exc:
        raise FormatError(f"FAMILY {spec['kind']}: {exc}") from None
    if spec.get("split", (m, k)) != (m, k):
        raise FormatError(f"SPLIT {spec['split']} disagrees with family split {(m, k)}")
    if "U" in spec and not np.array_equal(spec["U"].a, Q.U.a):
        raise FormatError("QF does not match the family's quadratic form")
    d = spec.get("d", [field.one] + [field.zero] * (k - 1))
    try:
        W = SubspaceBasis(field, k, spec["W"])
        return RegularSubgroupDesc(field, n, m, k, d, Q, with_kernel(psi, W), spec["kind"])
    except (ValueError, RegaffError) as exc:
        raise FormatError(f"bad construction parameters: {exc}") from None


def read_group(path: str | Path) -> GroupFile:
    return parse_group(Path(path).read_text())
