"""Fuzzy witness complexes as exact edge-birth filtrations with flag expansion.

For witnesses W and landmarks L, a witness w supports landmark l at scale
epsilon when ||w - l|| <= n(w) + epsilon, where n(w) is the distance from w
to its nearest landmark.  A landmark pair {i, j} enters the complex at the
smallest epsilon at which one witness supports both ends, which gives the
closed-form birth value

    birth(i, j) = min over w of ( max(||w - l_i||, ||w - l_j||) - n(w) ).

Higher simplices are filled in flag-style: a simplex is present exactly when
all its edges are, with filtration value the largest edge birth.  Computing
births exactly makes every epsilon queryable instead of sampling a grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .embed import PointCloud
from .landmarks import LandmarkSet, save_landmarks


class ResourceLimitError(RuntimeError):
    """The expansion would exceed the configured simplex budget."""


def _as_points(obj) -> np.ndarray:
    if isinstance(obj, PointCloud):
        return obj.points
    if isinstance(obj, LandmarkSet):
        return obj.coords
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d array of points")
    return arr


@dataclass
class DistanceMatrix:
    """All witness-to-landmark distances plus each witness's nearest-landmark distance."""

    entries: np.ndarray
    nearest: np.ndarray

    @property
    def n_witnesses(self) -> int:
        return self.entries.shape[0]

    @property
    def n_landmarks(self) -> int:
        return self.entries.shape[1]


@dataclass
class EdgeFiltration:
    """Exact birth scales for vertices and edges over landmark indices.

    births is a symmetric (ell, ell) array with +inf on the diagonal and at
    absent edges; witness[i, j] is the index of the lowest witness achieving
    the birth (-1 where absent or not applicable).
    """

    vertex_birth: np.ndarray
    births: np.ndarray
    witness: np.ndarray | None = None

    def __post_init__(self):
        self.vertex_birth = np.asarray(self.vertex_birth, dtype=np.float64)
        self.births = np.asarray(self.births, dtype=np.float64)
        ell = self.vertex_birth.size
        if self.births.shape != (ell, ell):
            raise ValueError("births must be square and match vertex_birth")

    @property
    def n_vertices(self) -> int:
        return self.vertex_birth.size

    def edge_birth(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("an edge needs two distinct vertices")
        return float(self.births[i, j])

    def edge_list(self, max_value: float | None = None):
        """Yield (i, j, birth) with i < j for every present edge, sorted by (i, j)."""
        iu, ju = np.triu_indices(self.n_vertices, k=1)
        vals = self.births[iu, ju]
        keep = np.isfinite(vals)
        if max_value is not None:
            keep &= vals <= max_value
        return list(zip(iu[keep].tolist(), ju[keep].tolist(), vals[keep].tolist()))


@dataclass
class FlagFiltration:
    """Simplices up to dim_cap with filtration values, sorted by (value, dim, vertices).

    When built with ``max_value`` set, the filtration is truncated at that
    scale: barcode queries at epsilon <= max_value are exact, and intervals
    still open there report death = +inf.
    """

    simplices: list
    dim_cap: int
    max_value: float | None = None
    _values: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._values is None:
            self._values = np.array([v for _, v in self.simplices], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.simplices)

    def counts_by_dim(self) -> dict:
        out: dict[int, int] = {}
        for verts, _ in self.simplices:
            d = len(verts) - 1
            out[d] = out.get(d, 0) + 1
        return out


def distance_matrix(witnesses, landmarks) -> DistanceMatrix:
    """Euclidean distances from every witness to every landmark."""
    W = _as_points(witnesses)
    L = _as_points(landmarks)
    if W.shape[1] != L.shape[1]:
        raise ValueError(f"dimension mismatch: witnesses are {W.shape[1]}-d, landmarks {L.shape[1]}-d")
    if W.shape[0] == 0 or L.shape[0] == 0:
        raise ValueError("witnesses and landmarks must be nonempty")
    entries = cdist(W, L)
    return DistanceMatrix(entries=entries, nearest=entries.min(axis=1))


def edge_births(dm: DistanceMatrix, row_block: int = 32) -> EdgeFiltration:
    """Exact vertex and edge birth scales from a distance matrix.

    vertex_birth[j] = min over w of (d(w, j) - n(w)) and
    births[i, j]    = min over w of (max(d(w, i), d(w, j)) - n(w)),
    with the lowest witness index achieving each edge minimum recorded.
    Work is blocked over landmark rows to bound peak memory.
    """
    excess = dm.entries - dm.nearest[:, None]
    n_l = excess.shape[1]
    vertex_birth = excess.min(axis=0)

    births = np.full((n_l, n_l), np.inf)
    witness = np.full((n_l, n_l), -1, dtype=np.int64)
    if n_l == 1:
        return EdgeFiltration(vertex_birth, births, witness)

    # row-major over landmarks: excess_t[j] is contiguous per landmark
    excess_t = np.ascontiguousarray(excess.T)
    del excess
    for j in range(n_l - 1):
        base = excess_t[j]
        for start in range(j + 1, n_l, row_block):
            stop = min(start + row_block, n_l)
            pm = np.maximum(excess_t[start:stop], base)
            w_idx = pm.argmin(axis=1)  # first (lowest) witness achieving the min
            vals = pm[np.arange(stop - start), w_idx]
            births[j, start:stop] = vals
            births[start:stop, j] = vals
            witness[j, start:stop] = w_idx
            witness[start:stop, j] = w_idx
    return EdgeFiltration(vertex_birth, births, witness)


def flag_expand(
    ef: EdgeFiltration,
    dim_cap: int = 3,
    max_value: float | None = None,
    max_simplices: int = 100_000_000,
) -> FlagFiltration:
    """Expand an edge filtration into its clique (flag) filtration up to dim_cap.

    A clique's value is the largest birth among its edges.  ``max_value``
    truncates the filtration at that scale; ``max_simplices`` bounds the
    total count and raises ResourceLimitError when exceeded.
    """
    if dim_cap < 1:
        raise ValueError("dim_cap must be at least 1")
    ell = ef.n_vertices
    births = ef.births
    vb = ef.vertex_birth

    simplices: list[tuple[tuple[int, ...], float]] = []
    for v in range(ell):
        value = float(vb[v])
        if max_value is not None and value > max_value:
            continue
        simplices.append(((v,), value))

    edges = ef.edge_list(max_value)
    if len(simplices) + len(edges) > max_simplices:
        raise ResourceLimitError(
            f"vertex and edge count {len(simplices) + len(edges)} exceeds budget {max_simplices}"
        )

    # neighbors with higher index, as bitmasks, over edges below the cap
    nbr = [0] * ell
    for i, j, _ in edges:
        nbr[i] |= 1 << j

    count = len(simplices) + len(edges)
    births_rows = [births[v] for v in range(ell)]

    def grow(simplex: tuple, value: float, cand: int):
        nonlocal count
        while cand:
            lowbit = cand & -cand
            u = lowbit.bit_length() - 1
            cand ^= lowbit
            val = value
            for w in simplex:
                b = births_rows[w][u]
                if b > val:
                    val = b
            child = simplex + (u,)
            count += 1
            if count > max_simplices:
                raise ResourceLimitError(f"simplex count exceeds budget {max_simplices}")
            simplices.append((child, float(val)))
            if len(child) <= dim_cap:
                grow(child, val, cand & nbr[u])

    for i, j, bij in edges:
        simplices.append(((i, j), float(bij)))
        if dim_cap >= 2:
            grow((i, j), float(bij), nbr[i] & nbr[j])

    simplices.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return FlagFiltration(simplices=simplices, dim_cap=dim_cap, max_value=max_value)


def complex_at(ff: FlagFiltration, epsilon: float) -> list:
    """The simplex list at a fixed scale: every simplex with value <= epsilon."""
    if ff.max_value is not None and epsilon > ff.max_value:
        raise ValueError(f"epsilon {epsilon} exceeds the filtration cap {ff.max_value}")
    k = int(np.searchsorted(ff._values, epsilon, side="right"))
    return ff.simplices[:k]


def skeleton_export(ff: FlagFiltration, epsilon: float, landmarks: LandmarkSet, edges_path, landmarks_path=None) -> int:
    """Write the 1-skeleton at a scale: an edge CSV (i, j, birth) plus the landmark table.

    Returns the number of edges written; files are header-only when the
    complex has no edges at this scale.  The landmark table is skipped when
    ``landmarks_path`` is None (e.g. when the caller already has one).
    """
    wrote = 0
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write("i,j,birth\n")
        for verts, value in complex_at(ff, epsilon):
            if len(verts) == 2:
                fh.write(f"{verts[0]},{verts[1]},{value!r}\n")
                wrote += 1
    if landmarks_path is not None:
        save_landmarks(landmarks, landmarks_path)
    return wrote


def save_filtration(ff: FlagFiltration, path) -> None:
    """Write the filtration as a JSON array of {vertices, value}, canonically sorted."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("[\n")
        last = len(ff.simplices) - 1
        for pos, (verts, value) in enumerate(ff.simplices):
            row = json.dumps({"vertices": list(verts), "value": value})
            fh.write(row)
            fh.write(",\n" if pos != last else "\n")
        fh.write("]\n")


def load_filtration(path) -> FlagFiltration:
    """Read a filtration JSON array; dim_cap is inferred from the largest simplex."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected a JSON array of simplices")
    simplices = []
    for entry in raw:
        verts = tuple(int(v) for v in entry["vertices"])
        simplices.append((verts, float(entry["value"])))
    if not simplices:
        raise ValueError(f"{path}: filtration is empty")
    dim_cap = max(1, max(len(v) - 1 for v, _ in simplices))
    return FlagFiltration(simplices=simplices, dim_cap=dim_cap, max_value=None)


__all__ = [
    "DistanceMatrix",
    "EdgeFiltration",
    "FlagFiltration",
    "ResourceLimitError",
    "complex_at",
    "distance_matrix",
    "edge_births",
    "flag_expand",
    "load_filtration",
    "save_filtration",
    "skeleton_export",
]
