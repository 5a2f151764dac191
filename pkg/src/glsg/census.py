"""Exhaustive census of small semigroups and regular Γ(S).

Labeled semigroups are enumerated by depth-first cell assignment in
row-major order with incremental associativity pruning. Classes are taken
up to isomorphism and anti-isomorphism through :func:`canonical_form`.
"""

from __future__ import annotations

import itertools
import logging
import os
import struct
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np

from glsg.errors import CheckpointError, OrderTooLarge
from glsg.invariants import is_regular_glsg
from glsg.semigroup import CayleyTable, canonical_array, lexmin_row, orbit

log = logging.getLogger(__name__)

MAX_DEFAULT_ORDER = 5
MAX_ORDER = 6
# orbits are cached while deduplicating up to this order; above it the
# cache would hold every labeled table
ORBIT_CACHE_MAX_ORDER = 5


@dataclass(frozen=True)
class CensusRow:
    order: int
    labeled_total: int
    canonical_total: int
    regular_count: int

    @property
    def percentage(self) -> float:
        return 100.0 * self.regular_count / self.canonical_total

    def formatted_percentage(self) -> str:
        """One decimal at or above 1%, two below."""
        pct = self.percentage
        return f"{pct:.1f}" if pct >= 1 else f"{pct:.2f}"


def check_order(n: int, allow_order_6: bool = False) -> None:
    if n < 1:
        raise ValueError("order must be positive")
    limit = MAX_ORDER if allow_order_6 else MAX_DEFAULT_ORDER
    if n > limit:
        raise OrderTooLarge(order=n, limit=limit)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


def _propagate(
    t: list[int],
    n: int,
    pos: int,
    where: list[list[int]],
    forced: list[int],
    trail: list[int],
) -> bool:
    """Check and propagate every associativity triple that reads cell ``pos``.

    Cells before ``pos`` are assigned, later ones hold -1; ``where[w]``
    lists the assigned cells holding value w. A triple (a, b, c) reads
    cells ab, bc, (ab)c and a(bc). Once ab and bc are known and one side
    is known, the other side's cell is forced to the same value; a clash
    between two forcings, or between two known sides, returns False.
    Newly forced cells are pushed onto ``trail`` for undo.
    """
    i, j = divmod(pos, n)
    v = t[pos]

    def force(cell: int, value: int) -> bool:
        current = forced[cell]
        if current < 0:
            forced[cell] = value
            trail.append(cell)
            return True
        return current == value

    # cell is ab: (ij)c = vc against i(jc)
    for c in range(n):
        y = t[j * n + c]
        if y < 0:
            continue
        left, right = v * n + c, i * n + y
        lhs, rhs = t[left], t[right]
        if lhs >= 0:
            if rhs >= 0:
                if lhs != rhs:
                    return False
            elif not force(right, lhs):
                return False
        elif rhs >= 0 and not force(left, rhs):
            return False
    # cell is bc: (ai)j against a(ij) = av
    for a in range(n):
        x = t[a * n + i]
        if x < 0:
            continue
        left, right = x * n + j, a * n + v
        lhs, rhs = t[left], t[right]
        if lhs >= 0:
            if rhs >= 0:
                if lhs != rhs:
                    return False
            elif not force(right, lhs):
                return False
        elif rhs >= 0 and not force(left, rhs):
            return False
    # cell is (ab)c with ab = i, c = j: lhs = v against a(bj)
    for idx in where[i]:
        a, b = divmod(idx, n)
        y = t[b * n + j]
        if y < 0:
            continue
        right = a * n + y
        rhs = t[right]
        if rhs >= 0:
            if rhs != v:
                return False
        elif not force(right, v):
            return False
    # cell is a(bc) with a = i, bc = j: rhs = v against (ib)c
    for idx in where[j]:
        b, c = divmod(idx, n)
        x = t[i * n + b]
        if x < 0:
            continue
        left = x * n + c
        lhs = t[left]
        if lhs >= 0:
            if lhs != v:
                return False
        elif not force(left, v):
            return False
    return True


def _extend(
    t: list[int],
    n: int,
    pos: int,
    stop: int,
    visit: Callable[[list[int]], None],
    where: list[list[int]],
    forced: list[int],
    trail: list[int],
) -> None:
    if pos == stop:
        visit(t)
        return
    choices = range(n) if forced[pos] < 0 else (forced[pos],)
    for value in choices:
        t[pos] = value
        cells = where[value]
        cells.append(pos)
        mark = len(trail)
        if _propagate(t, n, pos, where, forced, trail):
            _extend(t, n, pos + 1, stop, visit, where, forced, trail)
        for cell in trail[mark:]:
            forced[cell] = -1
        del trail[mark:]
        cells.pop()
    t[pos] = -1


def _search(t: list[int], n: int, stop: int, visit: Callable[[list[int]], None]) -> None:
    """Complete the assigned prefix of ``t`` up to cell ``stop``, visiting leaves.

    The prefix is replayed through the propagator so forced cells are
    rebuilt; an inconsistent prefix visits nothing.
    """
    pos = 0
    while pos < len(t) and t[pos] >= 0:
        pos += 1
    prefix = t[:pos]
    t[:pos] = [-1] * pos
    where: list[list[int]] = [[] for _ in range(n)]
    forced = [-1] * (n * n)
    trail: list[int] = []
    for idx, value in enumerate(prefix):
        if forced[idx] >= 0 and forced[idx] != value:
            return
        t[idx] = value
        where[value].append(idx)
        if not _propagate(t, n, idx, where, forced, trail):
            return
    _extend(t, n, pos, stop, visit, where, forced, trail)


def first_row_prefixes(n: int) -> list[tuple[int, ...]]:
    """Assignments of row 1 that survive pruning, in enumeration order."""
    out: list[tuple[int, ...]] = []
    _search([-1] * (n * n), n, n, lambda cells: out.append(tuple(cells[:n])))
    return out


def enumerate_subtree(n: int, prefix: tuple[int, ...], visit: Callable[[list[int]], None]) -> None:
    """Visit every associative table whose first row is ``prefix`` (0-based)."""
    _search(list(prefix) + [-1] * (n * n - len(prefix)), n, n * n, visit)


def enumerate_labeled(
    n: int,
    visit: Callable[[CayleyTable], None] | None = None,
    *,
    allow_order_6: bool = False,
) -> int:
    """Visit every associative n x n table once; return how many there are.

    ``visit`` receives a :class:`CayleyTable`. Tables arrive in
    lexicographic order of their entries.
    """
    check_order(n, allow_order_6)
    count = 0

    def on_leaf(cells: list[int]) -> None:
        nonlocal count
        count += 1
        if visit is not None:
            visit(CayleyTable(tuple(tuple(v + 1 for v in cells[r * n:(r + 1) * n]) for r in range(n))))

    _search([-1] * (n * n), n, n * n, on_leaf)
    return count


def brute_force_labeled(n: int) -> Iterator[CayleyTable]:
    """Every associative table by scanning all n^(n^2) grids. Tiny n only."""
    for cells in itertools.product(range(n), repeat=n * n):
        arr = np.array(cells, dtype=np.int64).reshape(n, n)
        if np.array_equal(arr[arr], arr[:, arr]):
            yield CayleyTable.from_array(arr)


# ---------------------------------------------------------------------------
# Deduplication
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _transpositions(n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for a, b in itertools.combinations(range(n), 2):
        perm = list(range(n))
        perm[a], perm[b] = b, a
        out.append(tuple(perm))
    return tuple(out)


def _relabel_is_smaller(cells: list[int], n: int, perm: tuple[int, ...], flip: bool) -> bool:
    """Is the table relabelled by ``perm`` (and transposed if ``flip``) lex-smaller?

    ``perm`` must be an involution, so it is its own inverse.
    """
    for x in range(n):
        px = perm[x]
        for y in range(n):
            py = perm[y]
            new = perm[cells[py * n + px]] if flip else perm[cells[px * n + py]]
            old = cells[x * n + y]
            if new != old:
                return new < old
    return False


def is_lex_minimal(cells: list[int], n: int) -> bool:
    """True iff the 0-based flat table is the canonical form of its class.

    Cheap necessary conditions go first: every finite semigroup has an
    idempotent, so the minimum starts with 0; no single transposition or
    the transpose may lower it. Survivors get the full orbit comparison.
    """
    if cells[0] != 0:
        return False
    identity = tuple(range(n))
    if _relabel_is_smaller(cells, n, identity, True):
        return False
    for perm in _transpositions(n):
        if _relabel_is_smaller(cells, n, perm, False) or _relabel_is_smaller(cells, n, perm, True):
            return False
    arr = np.array(cells, dtype=np.int64).reshape(n, n)
    return bool(np.array_equal(canonical_array(arr), arr.ravel()))


@dataclass
class ClassCollector:
    """Collects canonical encodings (0-based flat bytes) of visited tables.

    ``orbit-cache`` canonicalises the first table seen from each class and
    remembers the whole orbit; ``lex-min`` keeps a table only if it is its
    own canonical form, using no memory beyond the classes themselves.
    """

    n: int
    strategy: str = "orbit-cache"
    labeled: int = 0
    classes: set[bytes] = field(default_factory=set)
    _seen: set[bytes] = field(default_factory=set, repr=False)

    def __call__(self, cells: list[int]) -> None:
        self.labeled += 1
        if self.strategy == "lex-min":
            if is_lex_minimal(cells, self.n):
                self.classes.add(bytes(cells))
            return
        key = bytes(cells)
        if key in self._seen:
            return
        members = orbit(np.frombuffer(key, dtype=np.uint8).reshape(self.n, self.n)).astype(np.uint8)
        self.classes.add(lexmin_row(members).tobytes())
        self._seen.update(row.tobytes() for row in members)


def default_strategy(n: int) -> str:
    return "orbit-cache" if n <= ORBIT_CACHE_MAX_ORDER else "lex-min"


def _collect_subtree(args: tuple[int, tuple[int, ...], str]) -> tuple[int, set[bytes]]:
    n, prefix, strategy = args
    collector = ClassCollector(n, strategy)
    enumerate_subtree(n, prefix, collector)
    return collector.labeled, collector.classes


def _table_from_code(code: bytes, n: int) -> CayleyTable:
    return CayleyTable.from_array(np.frombuffer(code, dtype=np.uint8).reshape(n, n))


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

CHECKPOINT_MAGIC = b"GLSG"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sBBIQI")


def _pack_code(code: bytes) -> bytes:
    # two 4-bit entries per byte, high nibble first
    padded = code + (b"\x00" if len(code) % 2 else b"")
    return bytes((padded[k] << 4) | padded[k + 1] for k in range(0, len(padded), 2))


def _unpack_code(packed: bytes, cells: int) -> bytes:
    out = bytearray()
    for byte in packed:
        out.append(byte >> 4)
        out.append(byte & 0x0F)
    return bytes(out[:cells])


def write_checkpoint(path: str, n: int, next_prefix: int, labeled: int, classes: set[bytes]) -> None:
    """Atomically write the resumable census state.

    Layout (little endian): magic ``GLSG``, version byte, order byte,
    uint32 index of the next unfinished first-row subtree, uint64 labeled
    count, uint32 class count, then each canonical table packed as
    ceil(n^2 / 2) bytes of 4-bit 0-based entries, sorted.
    """
    body = b"".join(_pack_code(code) for code in sorted(classes))
    header = _HEADER.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, n, next_prefix, labeled, len(classes))
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".glsg-ckpt-")
    with os.fdopen(fd, "wb") as fh:
        fh.write(header + body)
    # mkstemp creates 0600 files; match an ordinary file
    os.chmod(tmp, 0o644)
    os.replace(tmp, path)


def read_checkpoint(path: str) -> tuple[int, int, int, set[bytes]]:
    """Return ``(n, next_prefix, labeled, classes)`` from a checkpoint file."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise CheckpointError(path=path, reason="truncated")
    magic, version, n, next_prefix, labeled, count = _HEADER.unpack_from(data)
    if magic != CHECKPOINT_MAGIC or version != CHECKPOINT_VERSION:
        raise CheckpointError(path=path, reason="bad-header")
    width = (n * n + 1) // 2
    body = data[_HEADER.size:]
    if len(body) != width * count:
        raise CheckpointError(path=path, reason="truncated")
    classes = {_unpack_code(body[k * width:(k + 1) * width], n * n) for k in range(count)}
    return n, next_prefix, labeled, classes


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CensusResult:
    row: CensusRow
    classes: tuple[CayleyTable, ...]
    regular: tuple[tuple[CayleyTable, int], ...]


def run_census(
    n: int,
    *,
    allow_order_6: bool = False,
    workers: int = 1,
    checkpoint: str | None = None,
    stop_after: int | None = None,
    progress: Callable[[int, int], None] | None = None,
    strategy: str | None = None,
    checkpoint_interval: float = 30.0,
) -> CensusResult | None:
    """Enumerate, deduplicate and test regularity for order ``n``.

    The search splits into independent subtrees, one per surviving first
    row. With ``checkpoint`` set, state is saved after a finished subtree
    whenever ``checkpoint_interval`` seconds have passed since the last
    save, and always at the end of the run; an existing file is resumed. ``stop_after`` ends the run after that many
    new subtrees and returns None (used to exercise resumption).
    ``strategy`` picks the :class:`ClassCollector` deduplication mode;
    worker processes default to ``lex-min`` since it keeps no shared state.
    """
    check_order(n, allow_order_6)
    prefixes = first_row_prefixes(n)
    start, labeled, classes = 0, 0, set()
    if checkpoint and os.path.exists(checkpoint):
        saved_n, start, labeled, classes = read_checkpoint(checkpoint)
        if saved_n != n:
            raise CheckpointError(path=checkpoint, reason=f"order-{saved_n}-not-{n}")
        log.info("resuming order %d at subtree %d/%d", n, start, len(prefixes))

    todo = list(range(start, len(prefixes)))
    if stop_after is not None:
        todo = todo[:stop_after]
    parallel = workers > 1 and len(todo) > 1
    strategy = strategy or ("lex-min" if parallel else default_strategy(n))
    jobs = [(n, prefixes[k], strategy) for k in todo]
    last_save = time.monotonic()

    def absorb(k: int, result: tuple[int, set[bytes]]) -> None:
        nonlocal labeled, last_save
        labeled += result[0]
        classes.update(result[1])
        now = time.monotonic()
        if checkpoint and (k == todo[-1] or now - last_save >= checkpoint_interval):
            write_checkpoint(checkpoint, n, k + 1, labeled, classes)
            last_save = now
        if progress:
            progress(k + 1, len(prefixes))

    if parallel:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for k, result in zip(todo, pool.map(_collect_subtree, jobs)):
                absorb(k, result)
    else:
        # one shared orbit cache across subtrees is much cheaper than
        # rebuilding it per subtree
        collector = ClassCollector(n, strategy)
        for k, job in zip(todo, jobs):
            before = collector.labeled
            collector.classes = set()
            enumerate_subtree(n, job[1], collector)
            absorb(k, (collector.labeled - before, collector.classes))

    if start + len(todo) < len(prefixes):
        return None

    tables = tuple(_table_from_code(code, n) for code in sorted(classes))
    regular = []
    for table in tables:
        ok, degrees = is_regular_glsg(table)
        if ok:
            regular.append((table, degrees[0]))
    row = CensusRow(
        order=n,
        labeled_total=labeled,
        canonical_total=len(tables),
        regular_count=len(regular),
    )
    return CensusResult(row=row, classes=tables, regular=tuple(regular))


def census(n: int, **kwargs) -> CensusRow:
    result = run_census(n, **kwargs)
    assert result is not None
    return result.row


def regular_witnesses(n: int, **kwargs) -> list[tuple[CayleyTable, int]]:
    """Canonical tables with regular Γ(S), lexicographic, with their degree."""
    result = run_census(n, **kwargs)
    assert result is not None
    return list(result.regular)


def census_report(max_order: int, **kwargs) -> list[CensusRow]:
    return [census(n, **kwargs) for n in range(1, max_order + 1)]


def format_report(rows: list[CensusRow], fmt: str = "text") -> str:
    if fmt == "csv":
        lines = ["order,total,regular,percentage"]
        lines += [
            f"{r.order},{r.canonical_total},{r.regular_count},{r.formatted_percentage()}"
            for r in rows
        ]
        return "\n".join(lines) + "\n"
    header = f"{'Order':>5}  {'Labeled':>9}  {'Total':>7}  {'Regular':>7}  {'Percentage':>10}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.order:>5}  {r.labeled_total:>9}  {r.canonical_total:>7}  "
            f"{r.regular_count:>7}  {r.formatted_percentage():>10}"
        )
    return "\n".join(lines) + "\n"


def spot_check_canonical(n: int, samples: int, seed: int = 0) -> int:
    """Re-canonicalise randomly relabelled (and maybe transposed) tables.

    Draws ``samples`` labeled tables of order ``n`` with replacement and
    asserts each keeps its canonical form. Returns the number checked.
    """
    from glsg.semigroup import canonical_form, relabel, transpose

    tables: list[CayleyTable] = []
    enumerate_labeled(n, tables.append, allow_order_6=True)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        t = tables[int(rng.integers(len(tables)))]
        moved = relabel(t, (rng.permutation(n) + 1).tolist())
        if rng.integers(2):
            moved = transpose(moved)
        if canonical_form(moved) != canonical_form(t):
            raise AssertionError(f"canonical form not invariant for {t.entries}")
    return samples
