"""Finite semigroups as Cayley tables.

Elements are numbered 1..n on every public surface; ``CayleyTable.array``
exposes a 0-based numpy view for vectorised work.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from glsg.errors import (
    EntryOutOfRange,
    GroupInvalid,
    InvalidFamily,
    NotAssociative,
    NotSquare,
)

__all__ = [
    "CayleyTable",
    "FamilySpec",
    "validate_table",
    "make_null",
    "make_left_zero",
    "make_right_zero",
    "make_rectangular_band",
    "make_cyclic_group",
    "make_constant_image",
    "make_brandt",
    "brandt_index",
    "transpose",
    "relabel",
    "canonical_form",
    "is_cancellative",
    "is_group",
    "parse_family",
    "build_family",
    "parse_table",
    "format_table_text",
    "table_to_json",
]


@dataclass(frozen=True)
class CayleyTable:
    """Multiplication table; ``entries[i-1][j-1]`` is the index of s_i * s_j.

    Instances built directly are trusted; use :func:`validate_table` for
    untrusted input.
    """

    entries: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def product(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]

    @cached_property
    def array(self) -> np.ndarray:
        """Read-only 0-based ``(n, n)`` array of the table."""
        arr = np.asarray(self.entries, dtype=np.int64).reshape(self.n, self.n) - 1
        arr.setflags(write=False)
        return arr

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "CayleyTable":
        """Wrap a 0-based integer array without validation."""
        arr = np.asarray(arr)
        return cls(tuple(tuple(int(v) + 1 for v in row) for row in arr))

    def rows(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def __str__(self) -> str:
        return format_table_text(self)


def _associativity_witness(arr: np.ndarray) -> tuple[int, int, int] | None:
    # lhs[i, j, k] = (ij)k and rhs[i, j, k] = i(jk)
    lhs = arr[arr]
    rhs = arr[:, arr]
    bad = np.argwhere(lhs != rhs)
    if len(bad) == 0:
        return None
    i, j, k = (int(x) + 1 for x in bad[0])
    return i, j, k


def validate_table(raw: Sequence[Sequence[int]]) -> CayleyTable:
    """Check shape, range and associativity of ``raw`` (1-based entries).

    Associativity is checked over all n^3 triples; the reported witness is
    the first failing ``(i, j, k)`` in row-major order.
    """
    rows = [list(row) for row in raw]
    n = len(rows)
    if n == 0:
        raise NotSquare(rows=0)
    for i, row in enumerate(rows, start=1):
        if len(row) != n:
            raise NotSquare(row=i, length=len(row), expected=n)
    for i, row in enumerate(rows, start=1):
        for j, value in enumerate(row, start=1):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise EntryOutOfRange(i=i, j=j, value=value)
            if not 1 <= value <= n:
                raise EntryOutOfRange(i=i, j=j, value=value)
    table = CayleyTable(tuple(tuple(int(v) for v in row) for row in rows))
    witness = _associativity_witness(table.array)
    if witness is not None:
        i, j, k = witness
        raise NotAssociative(i=i, j=j, k=k)
    return table


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _require_positive(**values: int) -> None:
    for name, value in values.items():
        if not isinstance(value, (int, np.integer)) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


def make_null(n: int) -> CayleyTable:
    """Null semigroup of order n; element n is the zero."""
    _require_positive(n=n)
    return make_constant_image(n, n)


def make_constant_image(n: int, c: int) -> CayleyTable:
    """Semigroup with every product equal to ``c``."""
    _require_positive(n=n)
    if not 1 <= c <= n:
        raise ValueError(f"target element c={c} outside 1..{n}")
    return CayleyTable(tuple((c,) * n for _ in range(n)))


def make_rectangular_band(p: int, q: int) -> CayleyTable:
    """Rectangular band L x R with |L| = p, |R| = q.

    Element (a, b) has index (a-1)*q + b, and (a, b)(c, d) = (a, d).
    """
    _require_positive(p=p, q=q)
    pairs = [(a, b) for a in range(p) for b in range(q)]
    return CayleyTable(
        tuple(tuple(a * q + d + 1 for (_, d) in pairs) for (a, _) in pairs)
    )


def make_left_zero(n: int) -> CayleyTable:
    return make_rectangular_band(n, 1)


def make_right_zero(n: int) -> CayleyTable:
    return make_rectangular_band(1, n)


def make_cyclic_group(n: int) -> CayleyTable:
    _require_positive(n=n)
    return CayleyTable(tuple(tuple((i + j) % n + 1 for j in range(n)) for i in range(n)))


def is_cancellative(t: CayleyTable) -> bool:
    """True iff every row and column is a permutation of 1..n."""
    arr = t.array
    full = np.arange(t.n)
    return bool(
        all(np.array_equal(np.sort(row), full) for row in arr)
        and all(np.array_equal(np.sort(col), full) for col in arr.T)
    )


def _identity_element(t: CayleyTable) -> int | None:
    arr = t.array
    full = np.arange(t.n)
    for e in range(t.n):
        if np.array_equal(arr[e], full) and np.array_equal(arr[:, e], full):
            return e + 1
    return None


def is_group(t: CayleyTable) -> bool:
    """Associative Latin square with a two-sided identity."""
    if _associativity_witness(t.array) is not None:
        return False
    return is_cancellative(t) and _identity_element(t) is not None


def brandt_index(i: int, g: int, j: int, m: int, n: int) -> int:
    """Table index of the nonzero Brandt element (i, g, j); the zero is 1."""
    return 1 + ((i - 1) * m + (g - 1)) * n + j


def make_brandt(group: CayleyTable, index_size: int) -> CayleyTable:
    """Brandt semigroup B0(G, I) with |I| = ``index_size``.

    Order is 1 + m*n^2. Element 1 is the zero; the nonzero triple (i, g, j)
    sits at :func:`brandt_index`. (i,g,j)(k,h,l) = (i, gh, l) when j = k,
    and the zero otherwise.
    """
    _require_positive(index_size=index_size)
    if not is_group(group):
        raise GroupInvalid(order=group.n)
    m, n = group.n, index_size
    order = 1 + m * n * n
    rows = [[1] * order for _ in range(order)]
    triples = [(i, g, j) for i in range(1, n + 1) for g in range(1, m + 1) for j in range(1, n + 1)]
    for i, g, j in triples:
        left = brandt_index(i, g, j, m, n) - 1
        for k, h, l in triples:
            if j == k:
                rows[left][brandt_index(k, h, l, m, n) - 1] = brandt_index(
                    i, group.product(g, h), l, m, n
                )
    return CayleyTable(tuple(tuple(row) for row in rows))


# ---------------------------------------------------------------------------
# Relabelling and canonical forms
# ---------------------------------------------------------------------------


def transpose(t: CayleyTable) -> CayleyTable:
    """Opposite semigroup: x *' y = y * x."""
    return CayleyTable(tuple(zip(*t.entries)))


def relabel(t: CayleyTable, perm: Sequence[int]) -> CayleyTable:
    """Apply the element bijection a -> perm[a-1] (1-based) to ``t``."""
    p = np.asarray(perm, dtype=np.int64) - 1
    if sorted(p.tolist()) != list(range(t.n)):
        raise ValueError("perm must be a permutation of 1..n")
    out = np.empty_like(t.array)
    out[np.ix_(p, p)] = p[t.array]
    return CayleyTable.from_array(out)


@lru_cache(maxsize=None)
def _permutations(n: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    inverses = np.argsort(perms, axis=1)
    return perms, inverses


def orbit(arr: np.ndarray) -> np.ndarray:
    """All relabellings of ``arr`` and its transpose, flattened.

    ``arr`` is 0-based ``(n, n)``; the result has shape ``(2 * n!, n * n)``
    with 0-based entries, first the relabellings of ``arr`` then those of
    its transpose.
    """
    arr = np.asarray(arr, dtype=np.int64)
    n = arr.shape[0]
    perms, inverses = _permutations(n)
    count = len(perms)
    out = []
    for base in (arr, arr.T):
        # relabelled[x][y] = perm[base[inv[x]][inv[y]]]
        idx = base[inverses[:, :, None], inverses[:, None, :]].reshape(count, n * n)
        out.append(np.take_along_axis(perms, idx, axis=1))
    return np.concatenate(out)


def lexmin_row(rows: np.ndarray) -> np.ndarray:
    """Lexicographically smallest row of a 2-D array."""
    candidates = rows
    for col in range(rows.shape[1]):
        column = candidates[:, col]
        candidates = candidates[column == column.min()]
        if len(candidates) == 1:
            break
    return candidates[0]


def canonical_array(arr: np.ndarray) -> np.ndarray:
    """0-based flattened canonical form of a 0-based table."""
    return lexmin_row(orbit(arr))


def canonical_form(t: CayleyTable) -> CayleyTable:
    """Lexicographically minimal table over all relabellings of t and t^T.

    Two tables share a canonical form iff they are isomorphic or
    anti-isomorphic. Brute force over n! permutations, meant for n <= 6.
    """
    flat = canonical_array(t.array)
    return CayleyTable.from_array(flat.reshape(t.n, t.n))


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

FAMILY_KINDS = (
    "null",
    "left-zero",
    "right-zero",
    "rectangular-band",
    "cyclic-group",
    "constant-image",
    "brandt",
)

FAMILY_GRAMMAR = (
    "null:N | leftzero:N | rightzero:N | band:PxQ | cyclic:N | "
    "const:N[:C] | brandt:cyclic:M:N"
)


@dataclass(frozen=True)
class FamilySpec:
    """A named family instance.

    ``params`` by kind: null/left-zero/right-zero/cyclic-group ``(n,)``;
    rectangular-band ``(p, q)``; constant-image ``(n, c)``; brandt
    ``(m, n)`` with structure group Z_m and index set of size n.
    """

    kind: str
    params: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InvalidFamily(kind=self.kind)
        arity = {"rectangular-band": 2, "constant-image": 2, "brandt": 2}.get(self.kind, 1)
        if len(self.params) != arity or any(p < 1 for p in self.params):
            raise InvalidFamily(kind=self.kind, params=",".join(map(str, self.params)))
        if self.kind == "constant-image" and self.params[1] > self.params[0]:
            raise InvalidFamily(kind=self.kind, params=",".join(map(str, self.params)))

    @property
    def order(self) -> int:
        if self.kind == "rectangular-band":
            return self.params[0] * self.params[1]
        if self.kind == "brandt":
            m, n = self.params
            return 1 + m * n * n
        return self.params[0]

    def __str__(self) -> str:
        p = self.params
        return {
            "null": lambda: f"null:{p[0]}",
            "left-zero": lambda: f"leftzero:{p[0]}",
            "right-zero": lambda: f"rightzero:{p[0]}",
            "rectangular-band": lambda: f"band:{p[0]}x{p[1]}",
            "cyclic-group": lambda: f"cyclic:{p[0]}",
            "constant-image": lambda: f"const:{p[0]}:{p[1]}",
            "brandt": lambda: f"brandt:cyclic:{p[0]}:{p[1]}",
        }[self.kind]()


_FAMILY_PATTERNS = [
    (re.compile(r"null:(\d+)"), "null"),
    (re.compile(r"leftzero:(\d+)"), "left-zero"),
    (re.compile(r"rightzero:(\d+)"), "right-zero"),
    (re.compile(r"band:(\d+)x(\d+)"), "rectangular-band"),
    (re.compile(r"cyclic:(\d+)"), "cyclic-group"),
    (re.compile(r"const:(\d+)(?::(\d+))?"), "constant-image"),
    (re.compile(r"brandt:cyclic:(\d+):(\d+)"), "brandt"),
]


def parse_family(text: str) -> FamilySpec:
    """Parse a family string such as ``band:2x3`` or ``const:4:2``.

    ``const:N`` without a target means ``const:N:N`` (the null semigroup).
    """
    text = text.strip()
    for pattern, kind in _FAMILY_PATTERNS:
        match = pattern.fullmatch(text)
        if match:
            params = [int(g) for g in match.groups() if g is not None]
            if kind == "constant-image" and len(params) == 1:
                params.append(params[0])
            return FamilySpec(kind, tuple(params))
    raise InvalidFamily(spec=text)


def build_family(spec: FamilySpec | str) -> CayleyTable:
    if isinstance(spec, str):
        spec = parse_family(spec)
    p = spec.params
    if spec.kind == "null":
        return make_null(p[0])
    if spec.kind == "left-zero":
        return make_left_zero(p[0])
    if spec.kind == "right-zero":
        return make_right_zero(p[0])
    if spec.kind == "rectangular-band":
        return make_rectangular_band(p[0], p[1])
    if spec.kind == "cyclic-group":
        return make_cyclic_group(p[0])
    if spec.kind == "constant-image":
        return make_constant_image(p[0], p[1])
    return make_brandt(make_cyclic_group(p[0]), p[1])


# ---------------------------------------------------------------------------
# Text and JSON formats
# ---------------------------------------------------------------------------


def format_table_text(t: CayleyTable) -> str:
    """Line 1 is n, then n lines of space-separated entries."""
    lines = [str(t.n)] + [" ".join(map(str, row)) for row in t.entries]
    return "\n".join(lines) + "\n"


def table_to_json(t: CayleyTable) -> str:
    return json.dumps({"n": t.n, "table": t.rows()}, sort_keys=True)


def _parse_int_grid(lines: Iterable[str]) -> list[list[int]]:
    grid = []
    for line in lines:
        try:
            grid.append([int(tok) for tok in line.split()])
        except ValueError as exc:
            raise NotSquare(reason="non-integer-token") from exc
    return grid


def parse_table(text: str) -> CayleyTable:
    """Parse and validate a table in text or JSON format (auto-detected)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
            n, grid = int(doc["n"]), doc["table"]
        except (ValueError, KeyError, TypeError) as exc:
            raise NotSquare(reason="malformed-json") from exc
        if len(grid) != n:
            raise NotSquare(declared=n, rows=len(grid))
        return validate_table(grid)
    lines = [line for line in stripped.splitlines() if line.strip()]
    if not lines:
        raise NotSquare(rows=0)
    header = lines[0].split()
    if len(header) != 1 or not header[0].isdigit():
        raise NotSquare(reason="missing-order-line")
    n = int(header[0])
    grid = _parse_int_grid(lines[1:])
    if len(grid) != n:
        raise NotSquare(declared=n, rows=len(grid))
    return validate_table(grid)
