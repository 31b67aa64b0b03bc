"""Canonical JSON/CSV emission: exactness and byte-stability over compactness.

Exact integers travel as decimal strings (explicitly unlimited precision);
floats use repr (shortest round-trip form); keys are sorted and separators
fixed so identical data always serializes to identical bytes.  Writes are
atomic: temp file in the target directory, then rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path


def int_str(n: int) -> str:
    return str(int(n))


def parse_int(s) -> int:
    if isinstance(s, int):
        return s
    if isinstance(s, str) and (s.lstrip("-").isdigit()):
        return int(s)
    raise ValueError(f"expected a decimal integer string, got {s!r}")


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, str):
        return Fraction(s)
    raise ValueError(f"expected a fraction string, got {s!r}")


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ": "),
                      indent=1, ensure_ascii=True) + "\n"


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def write_json(path, obj) -> Path:
    return atomic_write_text(path, canonical_dumps(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
