"""Adjacency spectra and graph energy.

Eigenvalues come from a cyclic Jacobi solver written here; numpy is used
only for array arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from glsg.errors import NonSymmetric, NoConvergence
from glsg.graph import GlsgGraph, connected_components

OFF_DIAGONAL_TOL = 1e-10
MAX_SWEEPS = 100
CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]
    clusters: tuple[tuple[float, int], ...]
    energy: float

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    def as_dict(self) -> dict:
        return {
            "clusters": [[_clean(value), mult] for value, mult in self.clusters],
            "energy": self.energy,
        }


def _clean(value: float, digits: int = 9) -> float:
    rounded = round(value, digits)
    return 0.0 if rounded == 0 else rounded


def eigenvalues_symmetric(
    matrix, tol: float = OFF_DIAGONAL_TOL, max_sweeps: int = MAX_SWEEPS
) -> list[float]:
    """All eigenvalues of a real symmetric matrix, ascending.

    Cyclic Jacobi: each sweep visits every (p, q) with p < q and applies the
    rotation that zeroes a[p, q]. Stops once the off-diagonal Frobenius
    norm drops below ``tol``. The input is not modified.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetric(shape="x".join(map(str, a.shape)))
    if not np.array_equal(a, a.T):
        raise NonSymmetric(shape=f"{a.shape[0]}x{a.shape[1]}")
    size = a.shape[0]

    upper = np.triu_indices(size, k=1)

    def off_norm() -> float:
        # summed directly: subtracting the diagonal from the full norm cancels
        return math.sqrt(2.0 * float(np.sum(a[upper] ** 2)))

    for _ in range(max_sweeps):
        off = off_norm()
        if off < tol:
            return sorted(np.diag(a).tolist())
        # skip rotations that are negligible relative to the current sweep
        threshold = off / (size * size) * 1e-3
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if abs(apq) <= threshold:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    if off_norm() < tol:
        return sorted(np.diag(a).tolist())
    raise NoConvergence(sweeps=max_sweeps, off_norm=f"{off_norm():.3e}")


def cluster_eigenvalues(
    values, tol: float = CLUSTER_TOL
) -> tuple[tuple[float, int], ...]:
    """Group sorted values into (mean, multiplicity) runs of gaps <= tol."""
    clusters: list[list[float]] = []
    for value in sorted(values):
        if clusters and value - clusters[-1][-1] <= tol:
            clusters[-1].append(value)
        else:
            clusters.append([value])
    return tuple((sum(run) / len(run), len(run)) for run in clusters)


def _energy(values) -> float:
    return float(f"{sum(abs(v) for v in values):.12g}")


def matrix_spectrum(matrix, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    values = eigenvalues_symmetric(matrix)
    return Spectrum(
        eigenvalues=tuple(values),
        clusters=cluster_eigenvalues(values, cluster_tol),
        energy=_energy(values),
    )


def spectrum(g: GlsgGraph, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    return matrix_spectrum(g.adjacency.astype(np.float64), cluster_tol)


def null_spectrum_closed_form(n: int) -> Spectrum:
    """Spectrum of K_n x K_n: products of the K_n eigenvalues n-1 and -1."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Spectrum(eigenvalues=(0.0,), clusters=((0.0, 1),), energy=0.0)
    d = n - 1
    values = [float(d * d)] + [float(-d)] * (2 * d) + [1.0] * (d * d)
    values.sort()
    return Spectrum(
        eigenvalues=tuple(values),
        clusters=cluster_eigenvalues(values),
        energy=float(4 * d * d),
    )


def block_spectra(g: GlsgGraph, cluster_tol: float = CLUSTER_TOL) -> list[Spectrum]:
    """One spectrum per connected component, in component order."""
    out = []
    for members in connected_components(g):
        block = g.adjacency[np.ix_(members, members)].astype(np.float64)
        out.append(matrix_spectrum(block, cluster_tol))
    return out


def l_class_cross_edges(g: GlsgGraph, q: int) -> int:
    """Edges joining vertices whose left factors lie in different L-classes.

    For a rectangular band built with ``make_rectangular_band(p, q)`` the
    L-class of element e is ``(e - 1) // q``. A block-diagonal split by
    L-class would make this zero.
    """
    cls = np.array([(v.i - 1) // q for v in g.vertices])
    cross = g.adjacency & (cls[:, None] != cls[None, :])
    return int(cross.sum()) // 2
