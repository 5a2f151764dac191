"""Counting invariants and the closed-form degree of Γ(S).

For the vertex at cell (i, j) with product k:

* ``ns[k]`` counts ordered pairs whose product is k,
* ``nr[i, j]`` counts t != s_j with s_i t = s_k,
* ``nc[i, j]`` counts t != s_i with t s_j = s_k,
* ``q = ns[k] - 2 nr - 2 nc`` and ``deg = 2n - 3 + q``.

All arrays are 0-based numpy arrays; element k lives at ``ns[k - 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from glsg.errors import UnsupportedFamily
from glsg.semigroup import CayleyTable, FamilySpec, build_family, parse_family


@dataclass(frozen=True)
class InvariantSet:
    n: int
    ns: np.ndarray
    nr: np.ndarray
    nc: np.ndarray
    q: np.ndarray
    deg: np.ndarray

    @property
    def degree_set(self) -> list[int]:
        return sorted({int(d) for d in self.deg.ravel()})

    @property
    def regular(self) -> bool:
        return len(self.degree_set) == 1


def compute_invariants(t: CayleyTable) -> InvariantSet:
    """Fill every invariant in a single O(n^2) pass over the table.

    ``rowcount[i, k]`` and ``colcount[j, k]`` count occurrences of k in row i
    and column j; subtracting the cell itself gives N_R and N_C.
    """
    arr = t.array
    n = t.n
    rows = np.repeat(np.arange(n), n)
    cols = np.tile(np.arange(n), n)
    prods = arr.ravel()

    ns = np.bincount(prods, minlength=n)
    rowcount = np.bincount(rows * n + prods, minlength=n * n).reshape(n, n)
    colcount = np.bincount(cols * n + prods, minlength=n * n).reshape(n, n)

    nr = (rowcount[rows, prods] - 1).reshape(n, n)
    nc = (colcount[cols, prods] - 1).reshape(n, n)
    q = ns[arr] - 2 * nr - 2 * nc
    deg = 2 * n - 3 + q
    return InvariantSet(n=n, ns=ns, nr=nr, nc=nc, q=q, deg=deg)


def is_regular_glsg(t: CayleyTable) -> tuple[bool, list[int]]:
    """Regular iff Q (equivalently the degree) is constant over all cells."""
    inv = compute_invariants(t)
    degrees = inv.degree_set
    return len(degrees) == 1, degrees


def delta_obstruction(t: CayleyTable) -> tuple[int, bool]:
    """Spread of factorisation counts and whether it rules out regularity.

    Only elements that occur as products are considered. Since
    ``0 <= 2 nr + 2 nc <= 4(n - 1)``, a spread above ``4(n - 1)`` forces Q to
    vary. ``blocked`` implies non-regular; the converse does not hold.
    """
    inv = compute_invariants(t)
    occurring = inv.ns[inv.ns > 0]
    delta = int(occurring.max() - occurring.min())
    return delta, delta > 4 * (t.n - 1)


def brandt_closed_forms(m: int, n: int) -> dict[str, int]:
    """Factorisation counts of B0(G, I) with |G| = m, |I| = n."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    ns_nonzero = m * n
    ns_zero = (1 + m * n * n) ** 2 - m * m * n**3
    delta = 1 + 2 * m * n * n - m * n + m * m * n**3 * (n - 1)
    return {"ns_nonzero": ns_nonzero, "ns_zero": ns_zero, "delta": delta}


def family_closed_form_degree(spec: FamilySpec | str) -> int | None:
    """Predicted constant degree for a family, or None when not regular.

    Brandt semigroups with a single index are groups with a zero adjoined;
    no closed form exists, so the answer comes from the invariants.
    """
    if isinstance(spec, str):
        spec = parse_family(spec)
    p = spec.params
    if spec.kind == "cyclic-group":
        return 3 * p[0] - 3
    if spec.kind in ("null", "constant-image"):
        return (p[0] - 1) ** 2
    if spec.kind in ("rectangular-band", "left-zero", "right-zero"):
        if spec.kind == "left-zero":
            rows, cols = p[0], 1
        elif spec.kind == "right-zero":
            rows, cols = 1, p[0]
        else:
            rows, cols = p
        size = rows * cols
        return 2 * size - 3 + size - 2 * (rows - 1) - 2 * (cols - 1)
    if spec.kind == "brandt":
        if p[1] > 1:
            return None
        regular, degrees = is_regular_glsg(build_family(spec))
        return degrees[0] if regular else None
    raise UnsupportedFamily(kind=spec.kind)
