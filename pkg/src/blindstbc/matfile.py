"""Plain-text complex matrix files.

One matrix row per line, whitespace-separated tokens in Python complex
literal form ("re+imj", e.g. ``-0.25+1.5j``).  Values are written with 17
significant digits, which round-trips IEEE doubles exactly.  Blank lines
are ignored.
"""

from __future__ import annotations

import re

import numpy as np

_TOKEN = re.compile(r"\S+")


class MatrixParseError(ValueError):
    """Malformed matrix file; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def dumps(a: np.ndarray) -> str:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return "\n".join(" ".join(format_complex(z) for z in row) for row in a) + "\n"


def loads(text: str) -> np.ndarray:
    rows = []
    width = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for match in _TOKEN.finditer(line):
            column = match.start() + 1
            token = match.group()
            try:
                value = complex(token)
            except ValueError:
                raise MatrixParseError(
                    f"cannot parse {token!r} as a complex number", line_no, column
                ) from None
            if not (np.isfinite(value.real) and np.isfinite(value.imag)):
                raise MatrixParseError(
                    f"non-finite value {token!r}", line_no, column
                )
            row.append(value)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixParseError(
                f"expected {width} values in this row, found {len(row)}",
                line_no,
                1,
            )
        rows.append(row)
    if not rows:
        raise MatrixParseError("file contains no matrix rows", 1, 1)
    return np.array(rows, dtype=np.complex128)


def write_matrix(path, a: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(a))


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())
