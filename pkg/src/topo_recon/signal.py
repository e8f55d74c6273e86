"""Lorenz trajectory generation, scalar measurement, noise injection, and series I/O.

The integrator is a classical fixed-step RK4 written in plain Python floats so
that results are bit-reproducible across platforms.  Noise uses NumPy's PCG64
generator (``numpy.random.default_rng``), which has a fixed, documented stream
for a given seed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

DEFAULT_IC = (1.0, 1.0, 1.0)
DEFAULT_DT = 0.001
DEFAULT_TRANSIENT = 10_000

_COORD_NAMES = {"x": 0, "y": 1, "z": 2}


class IntegrationError(RuntimeError):
    """Integration left the finite floating-point range."""

    def __init__(self, step: int):
        super().__init__(f"non-finite state at integration step {step}")
        self.step = step


class SeriesFormatError(ValueError):
    """A series or cloud file failed to parse; carries the 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}: line {line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


@dataclass(frozen=True)
class OdeParams:
    """Lorenz parameters; defaults are the classical chaotic values."""

    r: float = 28.0
    b: float = 8.0 / 3.0
    sigma: float = 10.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.r, self.b, self.sigma)):
            raise ValueError("ODE parameters must be finite")


@dataclass
class Trajectory:
    """A (n_steps, d) array of states sampled every ``dt`` time units."""

    points: np.ndarray
    dt: float

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError("trajectory points must be a 2-d array")
        if not self.dt > 0:
            raise ValueError("dt must be positive")

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass
class ScalarSeries:
    """A scalar time series with a fixed sampling interval."""

    values: np.ndarray
    sample_interval: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise ValueError("series values must be a 1-d array")
        if not self.sample_interval > 0:
            raise ValueError("sample_interval must be positive")
        if self.values.size and not np.isfinite(self.values).all():
            raise ValueError("series values must be finite")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MeasurementFn:
    """Scalar measurement of a trajectory: a coordinate index or a name (x/y/z)."""

    selector: int | str = "x"

    def index_for(self, d: int) -> int:
        if isinstance(self.selector, str):
            if self.selector not in _COORD_NAMES:
                raise ValueError(f"unknown coordinate name {self.selector!r}")
            idx = _COORD_NAMES[self.selector]
        else:
            idx = int(self.selector)
        if not 0 <= idx < d:
            raise ValueError(f"coordinate index {idx} out of range for dimension {d}")
        return idx


def integrate_lorenz(
    params: OdeParams = OdeParams(),
    ic=DEFAULT_IC,
    dt: float = DEFAULT_DT,
    n_steps: int = 100_000,
    transient_steps: int = DEFAULT_TRANSIENT,
) -> Trajectory:
    """Integrate the Lorenz equations with classical fixed-step RK4.

    Returns ``n_steps`` states; point ``i`` is the state after
    ``transient_steps + i + 1`` RK4 steps from ``ic``, so the transient is
    discarded and every returned point is the result of a full step.

    Raises
    ------
    IntegrationError
        If the state leaves the finite range; the exception records the
        0-based step index at which this happened.
    """
    if len(ic) != 3:
        raise ValueError("Lorenz initial condition must have three components")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if transient_steps < 0:
        raise ValueError("transient_steps must be nonnegative")

    r, b, s = params.r, params.b, params.sigma
    x, y, z = (float(c) for c in ic)
    if not all(math.isfinite(c) for c in (x, y, z)):
        raise ValueError("initial condition must be finite")

    out = np.empty((n_steps, 3), dtype=np.float64)
    h = dt
    total = transient_steps + n_steps
    for i in range(total):
        k1x = s * (y - x)
        k1y = x * (r - z) - y
        k1z = x * y - b * z

        ax = x + 0.5 * h * k1x
        ay = y + 0.5 * h * k1y
        az = z + 0.5 * h * k1z
        k2x = s * (ay - ax)
        k2y = ax * (r - az) - ay
        k2z = ax * ay - b * az

        ax = x + 0.5 * h * k2x
        ay = y + 0.5 * h * k2y
        az = z + 0.5 * h * k2z
        k3x = s * (ay - ax)
        k3y = ax * (r - az) - ay
        k3z = ax * ay - b * az

        ax = x + h * k3x
        ay = y + h * k3y
        az = z + h * k3z
        k4x = s * (ay - ax)
        k4y = ax * (r - az) - ay
        k4z = ax * ay - b * az

        x += h * (k1x + 2.0 * (k2x + k3x) + k4x) / 6.0
        y += h * (k1y + 2.0 * (k2y + k3y) + k4y) / 6.0
        z += h * (k1z + 2.0 * (k2z + k3z) + k4z) / 6.0

        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)):
            raise IntegrationError(i)
        if i >= transient_steps:
            row = out[i - transient_steps]
            row[0] = x
            row[1] = y
            row[2] = z
    return Trajectory(out, dt)


def observe(traj: Trajectory, h: MeasurementFn | int | str = "x") -> ScalarSeries:
    """Apply a scalar measurement to a trajectory, preserving the sampling interval."""
    if not isinstance(h, MeasurementFn):
        h = MeasurementFn(h)
    idx = h.index_for(traj.d)
    return ScalarSeries(traj.points[:, idx].copy(), traj.dt)


def add_uniform_noise(series: ScalarSeries, nu: float, seed: int) -> ScalarSeries:
    """Add i.i.d. uniform noise drawn from [-nu/2, nu/2] to every sample.

    ``nu = 0`` returns an exact copy.  The draw uses PCG64 with the given
    seed, so output is reproducible across runs and platforms.
    """
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    if nu == 0:
        return ScalarSeries(series.values.copy(), series.sample_interval)
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-nu / 2.0, nu / 2.0, size=len(series))
    return ScalarSeries(series.values + noise, series.sample_interval)


_HEADER_RE = re.compile(r"^#\s*T=([^\s]+)\s*$")


def save_series(series: ScalarSeries, path) -> None:
    """Write a series file: ``# T=<interval>`` header, then one value per line.

    Values are written with ``repr`` (shortest round-trip form), so a
    save/load cycle reproduces every float bit-exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# T={series.sample_interval!r}\n")
        for v in series.values:
            fh.write(repr(float(v)))
            fh.write("\n")


def load_series(path, format: str = "native", sample_interval: float | None = None) -> ScalarSeries:
    """Read a series file.

    ``format="native"`` expects the ``# T=`` header format written by
    :func:`save_series`.  ``format="csv"`` expects a single ``x`` column and
    takes the sampling interval from ``sample_interval`` (default 1.0).
    """
    if format == "csv":
        return _load_series_csv(path, 1.0 if sample_interval is None else sample_interval)
    if format != "native":
        raise ValueError(f"unknown series format {format!r}")

    values = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise SeriesFormatError(path, 1, "empty file, expected '# T=<float>' header")
        m = _HEADER_RE.match(first.strip())
        if m is None:
            raise SeriesFormatError(path, 1, "expected '# T=<float>' header")
        try:
            interval = float(m.group(1))
        except ValueError:
            raise SeriesFormatError(path, 1, f"bad sampling interval {m.group(1)!r}") from None
        for line_no, line in enumerate(fh, start=2):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise SeriesFormatError(path, line_no, f"not a number: {text!r}") from None
            if not math.isfinite(v):
                raise SeriesFormatError(path, line_no, f"non-finite value: {text!r}")
            values.append(v)
    if interval <= 0:
        raise SeriesFormatError(path, 1, f"sampling interval must be positive, got {interval}")
    return ScalarSeries(np.array(values, dtype=np.float64), interval)


def _load_series_csv(path, sample_interval: float) -> ScalarSeries:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise SeriesFormatError(path, 1, "empty file, expected 'x' header")
        if header.strip() != "x":
            raise SeriesFormatError(path, 1, f"expected header 'x', got {header.strip()!r}")
        for line_no, line in enumerate(fh, start=2):
            text = line.strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise SeriesFormatError(path, line_no, f"not a number: {text!r}") from None
            if not math.isfinite(v):
                raise SeriesFormatError(path, line_no, f"non-finite value: {text!r}")
            values.append(v)
    return ScalarSeries(np.array(values, dtype=np.float64), sample_interval)


def save_trajectory(traj: Trajectory, path) -> None:
    """Write a trajectory as a point-cloud CSV (t, c0, ..., c{d-1})."""
    with open(path, "w", encoding="utf-8") as fh:
        cols = ",".join(f"c{k}" for k in range(traj.d))
        fh.write(f"t,{cols}\n")
        for t, row in enumerate(traj.points):
            fh.write(str(t))
            for v in row:
                fh.write(",")
                fh.write(repr(float(v)))
            fh.write("\n")


__all__ = [
    "DEFAULT_DT",
    "DEFAULT_IC",
    "DEFAULT_TRANSIENT",
    "IntegrationError",
    "MeasurementFn",
    "OdeParams",
    "ScalarSeries",
    "SeriesFormatError",
    "Trajectory",
    "add_uniform_noise",
    "integrate_lorenz",
    "load_series",
    "observe",
    "save_series",
    "save_trajectory",
]
