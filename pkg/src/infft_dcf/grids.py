"""Nonequispaced sampling geometries in [-1/2, 1/2)^2 (and d-D test grids).

Polar-type grids use signed radii and ``T`` angles ``pi t / T`` for
``t = -T/2, ..., T/2 - 1``:

* ``polar``: radii ``r / R`` for ``r = -R/2, ..., R/2 - 1`` (inside the disk
  of radius 1/2).
* ``modified_polar``: the same radial spacing continued up to ``sqrt(2)/2``
  so that the square's corners are covered; nodes outside the square are
  dropped.
* ``log_modified_polar``: as ``modified_polar`` with the radii redistributed
  by an exponential map, so that rings crowd towards the origin.
* ``spiral``: Archimedean spiral with ``R`` turns and ``T`` nodes per turn.

Exact duplicates (the origin on every ray) are removed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier_core import SamplingSet, wrap

__all__ = ["GridSpec", "generate", "KINDS", "LOG_RATE"]

KINDS = ("spiral", "polar", "modified_polar", "log_modified_polar", "equispaced", "jittered")

#: Ratio parameter of the log-polar radius map; outer ring spacing is
#: ``exp(LOG_RATE)`` times the innermost one.
LOG_RATE = 1.0

_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Parameters of a generated grid.

    ``T`` defaults to ``2 R``.  ``d`` only applies to the equispaced and
    jittered kinds; ``jitter`` is the displacement amplitude as a fraction of
    the grid spacing.
    """

    kind: str
    R: int
    T: int | None = None
    d: int = 2
    jitter: float = 0.5
    seed: int = 0
    log_rate: float = LOG_RATE

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown grid kind {self.kind!r}; expected one of {KINDS}")
        if self.R < 2:
            raise ValueError("R must be at least 2")
        if self.T is None:
            object.__setattr__(self, "T", 2 * self.R)
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if self.kind not in ("equispaced", "jittered") and self.d != 2:
            raise ValueError(f"{self.kind} grids are two-dimensional")


def _angles(T):
    return np.pi * (np.arange(T) - T // 2) / T


def _rays(radii, T):
    theta = _angles(T)
    r = np.asarray(radii)[:, None]
    return np.stack([(r * np.cos(theta)).ravel(), (r * np.sin(theta)).ravel()], axis=-1)


def _extended_radii(R):
    # radial lattice r/R continued until it covers the corner radius sqrt(2)/2
    half = math.ceil(math.sqrt(2) * R / 2)
    return (np.arange(2 * half) - half) / R


def _log_radii(R, rate):
    lin = _extended_radii(R)
    top = np.abs(lin).max()
    u = np.abs(lin) / top
    return np.sign(lin) * top * np.expm1(rate * u) / math.expm1(rate)


def _inside_square(points):
    return np.all(np.abs(points) <= 0.5 + _EDGE_TOL, axis=1)


def _unique(points):
    # keep first occurrences in generation order
    _, first = np.unique(points, axis=0, return_index=True)
    return points[np.sort(first)]


def generate(spec: GridSpec) -> SamplingSet:
    """Generate the nodes described by ``spec``."""
    R, T = spec.R, spec.T
    if spec.kind == "equispaced":
        axis = np.arange(R) / R - 0.5
        grids = np.meshgrid(*([axis] * spec.d), indexing="ij")
        return SamplingSet(np.stack([g.ravel() for g in grids], axis=-1))
    if spec.kind == "jittered":
        rng = np.random.default_rng(spec.seed)
        axis = np.arange(R) / R - 0.5
        grids = np.meshgrid(*([axis] * spec.d), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        pts = pts + spec.jitter / R * (rng.random(pts.shape) - 0.5)
        return SamplingSet(pts)
    if spec.kind == "spiral":
        tau = np.arange(T * R) / (T * R)
        rho, phi = tau / 2, 2 * np.pi * R * tau
        pts = np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=-1)
    elif spec.kind == "polar":
        pts = _rays((np.arange(R) - R // 2) / R, T)
    elif spec.kind == "modified_polar":
        pts = _rays(_extended_radii(R), T)
    else:
        pts = _rays(_log_radii(R, spec.log_rate), T)
    pts = wrap(pts[_inside_square(pts)])
    return SamplingSet(_unique(pts))
