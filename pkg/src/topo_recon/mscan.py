"""Embedding-dimension sweep: edge existence across m, lifespans, and the
lifespan-derived filtration.

All reconstructions are anchored at m_max, so every dimension shares one
time-index set and one landmark index set, and lower-dimensional clouds are
exact coordinate prefixes of higher ones.  The scale grows with dimension as
epsilon(m) = xi * bbox_diameter(W_m), keeping the relative scale fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import bbox_diameter, delay_embed, project
from .landmarks import LandmarkSet, select_evenly_spaced
from .persistence import Barcode, persistent_homology
from .signal import ScalarSeries
from .witness import EdgeFiltration, FlagFiltration, distance_matrix, edge_births, flag_expand


@dataclass
class DimensionSweep:
    """Edge filtrations and existence sets for m = 1..m_max at a fixed xi."""

    m_max: int
    xi: float
    tau_steps: int
    every: int
    landmarks: LandmarkSet
    diameters: list
    epsilons: list
    per_m: list
    existence: np.ndarray  # (ell, ell) bitmask; bit (m-1) set when the edge exists at m

    @property
    def ell(self) -> int:
        return self.landmarks.ell


@dataclass
class DmFiltration:
    """Nested edge sets by lifespan, with their flag filtration and barcode.

    Level k holds every edge with lifespan >= k; the filtration value of an
    edge is m_max - lifespan, so long-lived edges enter first.
    """

    m_max: int
    levels: dict
    filtration: FlagFiltration
    barcode: Barcode


def sweep(series: ScalarSeries, tau_steps: int, xi: float, every: int, m_max: int) -> DimensionSweep:
    """Run the dimension sweep for m = 1..m_max.

    Landmarks are chosen once, evenly spaced on the anchored m_max cloud;
    their coordinates at lower m are exact prefixes.  For each m the exact
    edge filtration is computed and thresholded at epsilon(m) = xi * diam(W_m).
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    cloud = delay_embed(series, m_max, tau_steps, m_anchor=m_max)
    lms = select_evenly_spaced(cloud, every)
    ell = lms.ell

    diameters: list[float] = []
    epsilons: list[float] = []
    per_m: list[EdgeFiltration] = []
    existence = np.zeros((ell, ell), dtype=np.uint32)
    for m in range(1, m_max + 1):
        w_m = project(cloud, m)
        dm = distance_matrix(w_m.points, lms.coords[:, :m])
        ef = edge_births(dm)
        del dm
        diam = bbox_diameter(w_m)
        eps = xi * diam
        diameters.append(diam)
        epsilons.append(eps)
        per_m.append(ef)
        existence |= (ef.births <= eps).astype(np.uint32) << (m - 1)
    return DimensionSweep(
        m_max=m_max,
        xi=xi,
        tau_steps=tau_steps,
        every=every,
        landmarks=lms,
        diameters=diameters,
        epsilons=epsilons,
        per_m=per_m,
        existence=existence,
    )


def lifespan(ms, m_max: int | None = None) -> int:
    """Length of the longest contiguous run in a set of dimension values.

    An edge alive on {2} has lifespan 1; alive on {2} and {5, 6, 7} it has
    lifespan 3; never alive, 0.
    """
    values = sorted(set(int(m) for m in ms))
    if m_max is not None and values and values[-1] > m_max:
        raise ValueError(f"dimension value {values[-1]} exceeds m_max={m_max}")
    best = run = 0
    prev = None
    for m in values:
        run = run + 1 if prev is not None and m == prev + 1 else 1
        best = max(best, run)
        prev = m
    return best


def lifespan_matrix(sw: DimensionSweep) -> np.ndarray:
    """Per-edge lifespans as an (ell, ell) integer matrix (diagonal 0)."""
    run = np.zeros_like(sw.existence, dtype=np.int64)
    best = np.zeros_like(run)
    for m in range(1, sw.m_max + 1):
        bit = ((sw.existence >> (m - 1)) & 1).astype(np.int64)
        run = (run + bit) * bit
        np.maximum(best, run, out=best)
    np.fill_diagonal(best, 0)
    return best


def existence_set(sw: DimensionSweep, i: int, j: int) -> list[int]:
    """The sorted list of dimensions at which edge (i, j) exists."""
    mask = int(sw.existence[i, j])
    return [m for m in range(1, sw.m_max + 1) if mask >> (m - 1) & 1]


def _runs(mask: int, m_max: int) -> list[tuple[int, int]]:
    """Maximal runs of consecutive set dimensions, as half-open [start, end)."""
    runs = []
    m = 1
    while m <= m_max:
        if mask >> (m - 1) & 1:
            start = m
            while m <= m_max and mask >> (m - 1) & 1:
                m += 1
            runs.append((start, m))
        else:
            m += 1
    return runs


def dimension_barcode(sw: DimensionSweep, landmark: int) -> list[tuple[int, int, int, bool]]:
    """Bars over the dimension axis for one landmark's edges.

    Returns (partner, m_birth, m_death, alive_at_max) with half-open
    [m_birth, m_death) runs; an edge alive on {2} gives [2, 3).
    """
    if not 0 <= landmark < sw.ell:
        raise ValueError(f"landmark index {landmark} out of range")
    bars = []
    for j in range(sw.ell):
        if j == landmark:
            continue
        for start, end in _runs(int(sw.existence[landmark, j]), sw.m_max):
            bars.append((j, start, end, end == sw.m_max + 1))
    bars.sort(key=lambda b: (b[1], b[2], b[0]))
    return bars


def dm_filtration(sw: DimensionSweep, dim_cap: int = 2) -> DmFiltration:
    """Filter edges by lifespan: level k keeps edges with lifespan >= k.

    Levels are nested by construction and verified here; reusing
    value = m_max - lifespan turns the nesting into an ordinary filtration,
    so the standard reduction applies unchanged.
    """
    ls = lifespan_matrix(sw)
    levels: dict[int, list[tuple[int, int]]] = {}
    iu, ju = np.triu_indices(sw.ell, k=1)
    for k in range(1, sw.m_max + 1):
        keep = ls[iu, ju] >= k
        levels[k] = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    levels[sw.m_max + 1] = []
    for k in range(2, sw.m_max + 2):
        if not set(levels[k]) <= set(levels[k - 1]):
            raise AssertionError("lifespan levels failed to nest")

    births = np.full((sw.ell, sw.ell), np.inf)
    alive = ls >= 1
    births[alive] = sw.m_max - ls[alive]
    np.fill_diagonal(births, np.inf)
    ef = EdgeFiltration(vertex_birth=np.zeros(sw.ell), births=births, witness=None)
    ff = flag_expand(ef, dim_cap=dim_cap)
    bc = persistent_homology(ff)
    return DmFiltration(m_max=sw.m_max, levels=levels, filtration=ff, barcode=bc)


def save_lifespan_csv(matrix: np.ndarray, path) -> None:
    """Write the lifespan matrix as plain comma-separated integer rows."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(",".join(str(int(v)) for v in row))
            fh.write("\n")


def load_lifespan_csv(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            text = line.strip()
            if text:
                rows.append([int(v) for v in text.split(",")])
    return np.array(rows, dtype=np.int64)


def save_existence_csv(sw: DimensionSweep, path) -> None:
    """Write edge existence bitmasks as CSV i,j,mask (i < j, nonzero masks only)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("i,j,mask\n")
        iu, ju = np.triu_indices(sw.ell, k=1)
        masks = sw.existence[iu, ju]
        for i, j, mask in zip(iu.tolist(), ju.tolist(), masks.tolist()):
            if mask:
                fh.write(f"{i},{j},{mask}\n")


def save_dimension_barcode_csv(sw: DimensionSweep, landmark: int, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("partner,m_birth,m_death,alive_at_max\n")
        for partner, m_birth, m_death, alive in dimension_barcode(sw, landmark):
            fh.write(f"{partner},{m_birth},{m_death},{int(alive)}\n")


__all__ = [
    "DimensionSweep",
    "DmFiltration",
    "dimension_barcode",
    "dm_filtration",
    "existence_set",
    "lifespan",
    "lifespan_matrix",
    "load_lifespan_csv",
    "save_dimension_barcode_csv",
    "save_existence_csv",
    "save_lifespan_csv",
    "sweep",
]
