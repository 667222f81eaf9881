"""Text formats: complex numbers, matrix CSV, zero-set CSV, flat key=value configs.

Floats are written with 17 significant digits so every value round-trips
exactly; complex numbers are written as "a+bi" / "a-bi".
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .zerofind import ZeroSet

ZEROS_HEADER = ("re", "im", "multiplicity")


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{format_float(z.real)}{sign}{format_float(abs(z.imag))}i"


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a-bi", "bi", "i", "-i", plain reals (j is accepted for i)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    s = s.replace("I", "i").replace("J", "j")
    # a bare unit ("i", "-i", "2-i") needs an explicit coefficient for complex()
    s = re.sub(r"(^|[+\-])([ij])$", r"\g<1>1j", s)
    s = s.replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"not a complex number: {text!r}") from None


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(part) for part in text.split(",") if part.strip()]


# -- matrices -----------------------------------------------------------------

def format_matrix(B) -> str:
    B = np.asarray(B, dtype=complex)
    lines = [f"# n={B.shape[0]}"]
    lines += [",".join(format_complex(z) for z in row) for row in B]
    return "\n".join(lines) + "\n"


def write_matrix(path, B) -> None:
    Path(path).write_text(format_matrix(B))


def read_matrix(path) -> np.ndarray:
    """Matrix CSV: header "# n=<dim>", then one row per line of "a+bi" entries."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {path}: {exc.strerror}") from None
    if not lines or not re.fullmatch(r"#\s*n\s*=\s*\d+\s*", lines[0]):
        raise ConfigError(f"{path}:1: expected header '# n=<dim>'")
    n = int(lines[0].split("=")[1])
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            row = [parse_complex(cell) for cell in next(csv.reader([line]))]
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        if len(row) != n:
            raise ConfigError(f"{path}:{lineno}: expected {n} entries, got {len(row)}")
        rows.append(row)
    if len(rows) != n or n < 1:
        raise ConfigError(f"{path}: header says n={n} but found {len(rows)} rows")
    return np.array(rows, dtype=complex)


# -- zero sets ------------------------------------------------------------------

def format_zeros(zeros: ZeroSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ZEROS_HEADER)
    for z, m in zeros:
        writer.writerow([format_float(z.real), format_float(z.imag), m])
    return buf.getvalue()


def parse_zeros(text: str, source: str = "<zeros>") -> ZeroSet:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != ZEROS_HEADER:
        raise ConfigError(f"{source}:1: expected header 're,im,multiplicity'")
    entries = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            if len(row) != 3:
                raise ValueError(f"expected 3 fields, got {len(row)}")
            re_, im_, mult = float(row[0]), float(row[1]), row[2].strip()
            if not mult.isdigit() or int(mult) < 1:
                raise ValueError(f"multiplicity must be a positive integer, got {mult!r}")
            entries.append((complex(re_, im_), int(mult)))
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    try:
        return ZeroSet(tuple(entries))
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def read_zeros(path) -> ZeroSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read zeros file {path}: {exc.strerror}") from None
    return parse_zeros(text, str(path))


# -- JSON and configs -----------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return format_complex(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_json(obj) -> str:
    """Stable JSON: sorted keys, shortest round-trip floats, non-finite floats as strings."""
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment, dashes in keys become underscores."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    out: dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out
