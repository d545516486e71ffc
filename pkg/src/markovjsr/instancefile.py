"""Instance files: the on-disk JSON format consumed and produced by the CLI.

A file is a JSON object with keys ``dimension`` (d), ``field`` ("real" or
"complex"), ``matrices`` (N matrices, each either d rows of d entries or a
flat row-major list of d*d entries; a complex entry is a [re, im] pair),
and exactly one of ``omega`` (N x N 0/1 rows) or ``kstep``
({"k": order, "allowed": list of (k+1)-tuples}).  Unknown top-level keys
are ignored, which lets reports that carry extra metadata round-trip as
instances.

Structural problems (wrong JSON shape, missing keys) raise
InstanceParseError; value problems (non-binary transitions, size
mismatches, non-finite entries) surface as ValidationError from the core
constructors.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from markovjsr.core import MatrixSet, TransitionMatrix, validate_instance
from markovjsr.kstep import KStepConstraint

__all__ = [
    "InstanceParseError",
    "Instance",
    "parse_instance",
    "load_instance",
    "instance_document",
    "render_document",
    "document_digest",
    "sig12",
]


class InstanceParseError(ValueError):
    """The file is not structurally a valid instance document."""


@dataclass(frozen=True, eq=False)
class Instance:
    """A parsed and validated instance file."""

    matrices: MatrixSet
    omega: TransitionMatrix | None
    kstep: KStepConstraint | None
    digest: str


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _parse_entry(raw, where: str) -> complex:
    if _is_number(raw):
        return complex(raw, 0.0)
    if isinstance(raw, list) and len(raw) == 2 and all(_is_number(v) for v in raw):
        return complex(raw[0], raw[1])
    raise InstanceParseError(f"{where}: entry must be a number or a [re, im] pair")


def _looks_like_entry(raw) -> bool:
    return _is_number(raw) or (
        isinstance(raw, list) and len(raw) == 2 and all(_is_number(v) for v in raw)
    )


def _parse_matrix(raw, dim: int, where: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise InstanceParseError(f"{where}: matrix must be a list")
    nested = (
        len(raw) == dim
        and all(
            isinstance(row, list)
            and len(row) == dim
            and all(_looks_like_entry(e) for e in row)
            for row in raw
        )
    )
    if nested:
        rows = raw
    elif len(raw) == dim * dim and all(_looks_like_entry(e) for e in raw):
        rows = [raw[r * dim : (r + 1) * dim] for r in range(dim)]  # flat row-major
    else:
        raise InstanceParseError(
            f"{where}: expected {dim} rows of {dim} entries or a flat "
            f"row-major list of {dim * dim} entries"
        )
    out = np.empty((dim, dim), dtype=np.complex128)
    for r, row in enumerate(rows):
        for c, entry in enumerate(row):
            out[r, c] = _parse_entry(entry, f"{where} row {r + 1} column {c + 1}")
    return out


def parse_instance(text: str) -> Instance:
    """Parse an instance document from JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceParseError("top level must be a JSON object")
    for key in ("dimension", "field", "matrices"):
        if key not in data:
            raise InstanceParseError(f"missing required key {key!r}")
    has_omega = "omega" in data and data["omega"] is not None
    has_kstep = "kstep" in data and data["kstep"] is not None
    if has_omega == has_kstep:
        raise InstanceParseError("exactly one of 'omega' and 'kstep' must be present")
    dim = data["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InstanceParseError(f"'dimension' must be a positive integer, got {dim!r}")
    field = data["field"]
    if field not in ("real", "complex"):
        raise InstanceParseError(f"'field' must be 'real' or 'complex', got {field!r}")
    raw_matrices = data["matrices"]
    if not isinstance(raw_matrices, list) or not raw_matrices:
        raise InstanceParseError("'matrices' must be a nonempty list")
    parsed = tuple(
        _parse_matrix(m, dim, f"matrix {pos}")
        for pos, m in enumerate(raw_matrices, start=1)
    )
    # core rejects stray imaginary parts when the declared field is real
    matrices = MatrixSet(dim=dim, members=parsed, field_tag=field)

    omega = None
    kstep = None
    if has_omega:
        raw_omega = data["omega"]
        if not isinstance(raw_omega, list) or not all(
            isinstance(row, list) and all(_is_number(v) for v in row)
            for row in raw_omega
        ):
            raise InstanceParseError("'omega' must be a list of rows of numbers")
        if any(len(row) != len(raw_omega) for row in raw_omega):
            raise InstanceParseError("'omega' must be square: every row as long as the row count")
        omega = TransitionMatrix.from_rows(raw_omega)
        validate_instance(matrices, omega)
    else:
        raw_kstep = data["kstep"]
        if not isinstance(raw_kstep, dict):
            raise InstanceParseError("'kstep' must be an object")
        for key in ("k", "allowed"):
            if key not in raw_kstep:
                raise InstanceParseError(f"'kstep' is missing key {key!r}")
        order = raw_kstep["k"]
        if not isinstance(order, int) or isinstance(order, bool):
            raise InstanceParseError(f"'kstep.k' must be an integer, got {order!r}")
        raw_allowed = raw_kstep["allowed"]
        if not isinstance(raw_allowed, list) or not all(
            isinstance(t, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in t)
            for t in raw_allowed
        ):
            raise InstanceParseError("'kstep.allowed' must be a list of integer tuples")
        kstep = KStepConstraint(
            base_alphabet=matrices.size,
            k=order,
            allowed=frozenset(tuple(t) for t in raw_allowed),
        )

    digest = document_digest(
        instance_document(matrices, omega=omega, kstep=kstep, rounded=False)
    )
    return Instance(matrices=matrices, omega=omega, kstep=kstep, digest=digest)


def load_instance(path) -> Instance:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InstanceParseError(f"cannot read instance file {path}: {exc}") from exc
    return parse_instance(text)


def sig12(x: float) -> float:
    """Round to 12 significant digits; fixed formatting keeps reports stable."""
    return float(f"{x:.12g}")


def _entry_out(value: complex, field: str, rounded: bool):
    conv = sig12 if rounded else float
    if field == "complex":
        return [conv(value.real), conv(value.imag)]
    return conv(value.real)


def _matrix_out(arr: np.ndarray, field: str, rounded: bool):
    return [
        [_entry_out(complex(arr[r, c]), field, rounded) for c in range(arr.shape[1])]
        for r in range(arr.shape[0])
    ]


def instance_document(
    matrices: MatrixSet,
    omega: TransitionMatrix | None = None,
    kstep: KStepConstraint | None = None,
    extra: dict | None = None,
    rounded: bool = True,
) -> dict:
    """Instance as a JSON-ready dict; ``extra`` keys are appended verbatim."""
    doc = {
        "dimension": matrices.dim,
        "field": matrices.field_tag,
        "matrices": [_matrix_out(m, matrices.field_tag, rounded) for m in matrices.members],
    }
    if omega is not None:
        doc["omega"] = [[int(v) for v in row] for row in omega.entries]
    if kstep is not None:
        doc["kstep"] = {
            "k": kstep.k,
            "allowed": sorted(list(t) for t in kstep.allowed),
        }
    if extra:
        doc.update(extra)
    return doc


def render_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def document_digest(doc: dict) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
