"""Text file formats.

Code specifications and experiment configurations are JSON documents.  A
code specification looks like::

    {
      "label": "optional name",
      "field_p": 5,
      "A": [[0]], "B": [[1, 2]], "C": [[4]], "D": [[1, 3]],
      "generator": {"P": [[[1], [4, 1]]], "Q": [[[3], [0, 1]], [[1], []]]}
    }

Matrices are lists of integer rows.  For ``delta = 0`` give ``A``, ``B``
and ``C`` as ``[]``.  The optional ``generator`` is either ``{"P", "Q"}`` or
``{"G", "row_permutation"}``, with every entry a coefficient list (lowest
degree first); when present the realization is checked against it.

Symbol sequences are whitespace-separated integers.  The first non-comment
line is the header ``p n k T``; it is followed by ``T + 1`` rows of ``n``
entries ``y_t`` then ``u_t``.  Message files use the header ``p k T`` and
rows of ``k`` entries.  Lines starting with ``#`` are comments; writers put
the run manifest there.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import SpecError
from .gf import Field, FPolyMatrix, is_prime
from .system import ConvCode, PolyGenerator, SymbolSeq, new_conv_code, verify_realization

BUNDLED = ("f5_example", "f2_example")
BUNDLED_PREFIX = "bundled:"


def bundled_path(name: str):
    if name not in BUNDLED:
        raise SpecError(name, "name", f"no bundled code {name!r}; choose from {', '.join(BUNDLED)}")
    return resources.files("rhdecode").joinpath("data").joinpath(f"{name}.code")


def read_text(source: str | Path) -> tuple[str, str]:
    """Return ``(display name, text)`` for a path or a ``bundled:NAME`` reference."""
    s = str(source)
    if s.startswith(BUNDLED_PREFIX):
        return s, bundled_path(s[len(BUNDLED_PREFIX) :]).read_text()
    try:
        return s, Path(s).read_text()
    except OSError as exc:
        raise SpecError(s, "file", exc.strerror or str(exc)) from exc


def _parse_json(name: str, text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(name, f"line {exc.lineno}, column {exc.colno}", exc.msg) from exc


def _int_matrix(name: str, key: str, value: Any) -> list[list[int]]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise SpecError(name, key, "expected a list of integer rows")
    for i, row in enumerate(value):
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, int):
                raise SpecError(name, f"{key}[{i}][{j}]", f"expected an integer, got {v!r}")
    return value


def _poly_matrix(name: str, key: str, value: Any, field: Field) -> FPolyMatrix:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise SpecError(name, key, "expected a non-empty list of rows of coefficient lists")
    for i, row in enumerate(value):
        for j, e in enumerate(row):
            if not isinstance(e, list) or any(isinstance(c, bool) or not isinstance(c, int) for c in e):
                raise SpecError(name, f"{key}[{i}][{j}]", "expected a list of integer coefficients")
    try:
        return FPolyMatrix(field, value)
    except ValueError as exc:
        raise SpecError(name, key, str(exc)) from exc


def code_from_dict(d: Any, name: str = "<code>") -> tuple[ConvCode, PolyGenerator | None]:
    if not isinstance(d, dict):
        raise SpecError(name, "document", "expected a JSON object")
    if "field_p" not in d:
        raise SpecError(name, "field_p", "missing")
    p = d["field_p"]
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise SpecError(name, "field_p", f"expected a prime, got {p!r}")
    mats = {}
    for key in ("A", "B", "C", "D"):
        if key not in d:
            raise SpecError(name, key, "missing")
        mats[key] = _int_matrix(name, key, d[key])
    label = d.get("label", "")
    if not isinstance(label, str):
        raise SpecError(name, "label", "expected a string")
    try:
        code = new_conv_code(mats["A"], mats["B"], mats["C"], mats["D"], p, label)
    except ValueError as exc:
        raise SpecError(name, "A/B/C/D", str(exc)) from exc
    gen = None
    if d.get("generator") is not None:
        gen = _generator(name, d["generator"], code.field)
        try:
            ok = verify_realization(code, gen)
        except ValueError as exc:
            raise SpecError(name, "generator", str(exc)) from exc
        if not ok:
            raise SpecError(name, "generator", "the realization (A, B, C, D) does not realize P(z) Q(z)^-1")
    return code, gen


def _generator(name: str, g: Any, field: Field) -> PolyGenerator:
    if not isinstance(g, dict):
        raise SpecError(name, "generator", "expected an object")
    try:
        if "G" in g:
            perm = g.get("row_permutation")
            return PolyGenerator(_poly_matrix(name, "generator.G", g["G"], field), None if perm is None else tuple(perm))
        if "P" in g and "Q" in g:
            P = _poly_matrix(name, "generator.P", g["P"], field)
            Q = _poly_matrix(name, "generator.Q", g["Q"], field)
            return PolyGenerator.from_parts(P, Q)
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(name, "generator", str(exc)) from exc
    raise SpecError(name, "generator", "expected keys P and Q, or G with optional row_permutation")


def code_to_dict(code: ConvCode) -> dict[str, Any]:
    out: dict[str, Any] = {"field_p": code.p}
    if code.label:
        out["label"] = code.label
    for key, m in (("A", code.A), ("B", code.B), ("C", code.C), ("D", code.D)):
        out[key] = m.tolist() if m.rows and m.cols else []
    return out


def load_code(source: str | Path) -> tuple[ConvCode, PolyGenerator | None]:
    name, text = read_text(source)
    return code_from_dict(_parse_json(name, text), name)


def load_json(source: str | Path) -> Any:
    name, text = read_text(source)
    return _parse_json(name, text)


# ---------------------------------------------------------------------------
# integer-table files


def _data_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s and not s.startswith("#"):
            out.append((lineno, s.split()))
    return out


def _ints(name: str, lineno: int, fields: Sequence[str]) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError as exc:
        raise SpecError(name, f"line {lineno}", f"expected integers: {exc}") from exc


def _parse_table(name: str, text: str, header_names: Sequence[str]) -> tuple[list[int], list[list[int]]]:
    lines = _data_lines(text)
    if not lines:
        raise SpecError(name, "line 1", f"missing header '{' '.join(header_names)}'")
    lineno, head = lines[0]
    if len(head) != len(header_names):
        raise SpecError(name, f"line {lineno}", f"header must be '{' '.join(header_names)}'")
    header = _ints(name, lineno, head)
    p, width, T = header[0], header[1], header[-1]
    if not is_prime(p):
        raise SpecError(name, f"line {lineno}", f"p = {p} is not prime")
    if T < -1:
        raise SpecError(name, f"line {lineno}", f"T = {T} must be >= -1")
    rows = []
    for ln, fields in lines[1:]:
        vals = _ints(name, ln, fields)
        if len(vals) != width:
            raise SpecError(name, f"line {ln}", f"expected {width} entries, got {len(vals)}")
        bad = [v for v in vals if not 0 <= v < p]
        if bad:
            raise SpecError(name, f"line {ln}", f"entry {bad[0]} outside [0, {p})")
        rows.append(vals)
    if len(rows) != T + 1:
        raise SpecError(name, "body", f"header promises {T + 1} rows, found {len(rows)}")
    return header, rows


def parse_sequence(text: str, name: str = "<sequence>") -> tuple[SymbolSeq, int]:
    """Parse a sequence file; returns the sequence and ``n - k``."""
    (p, n, k, _), rows = _parse_table(name, text, ("p", "n", "k", "T"))
    if not 0 < k < n:
        raise SpecError(name, "header", f"need 0 < k < n, got n={n}, k={k}")
    return SymbolSeq.from_symbols(Field(p), rows, n - k), n - k


def parse_messages(text: str, name: str = "<messages>") -> tuple[Field, list[list[int]]]:
    (p, _, _), rows = _parse_table(name, text, ("p", "k", "T"))
    return Field(p), rows


def _comment_block(manifest: dict[str, Any] | None) -> str:
    if manifest is None:
        return ""
    return "# manifest: " + json.dumps(manifest, sort_keys=True) + "\n"


def format_sequence(seq: SymbolSeq, manifest: dict[str, Any] | None = None) -> str:
    r = len(seq.y[0]) if len(seq) else 0
    k = len(seq.u[0]) if len(seq) else 0
    lines = [f"{seq.field.p} {r + k} {k} {len(seq) - 1}"]
    lines += [" ".join(str(v) for v in s) for s in seq.symbols()]
    return _comment_block(manifest) + "\n".join(lines) + "\n"


def format_messages(field: Field, u: Sequence[Sequence[int]], k: int, manifest: dict[str, Any] | None = None) -> str:
    lines = [f"{field.p} {k} {len(u) - 1}"] + [" ".join(str(v) for v in row) for row in u]
    return _comment_block(manifest) + "\n".join(lines) + "\n"


def check_sequence_for_code(code: ConvCode, seq: SymbolSeq, r: int, name: str) -> None:
    if seq.field != code.field:
        raise SpecError(name, "header", f"field GF({seq.field.p}) does not match the code's GF({code.p})")
    if len(seq) and (r != code.n - code.k or len(seq.u[0]) != code.k):
        raise SpecError(name, "header", f"symbols split as ({r}, {len(seq.u[0])}), code needs ({code.n - code.k}, {code.k})")


def read_manifest_line(text: str) -> dict[str, Any] | None:
    for line in text.splitlines():
        if line.startswith("# manifest: "):
            return json.loads(line[len("# manifest: ") :])
    return None
