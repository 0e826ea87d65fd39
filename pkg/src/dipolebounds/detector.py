"""Pixelated detector geometries.

Two detector shapes are supported: a square planar array at ``z = Z``
(forward ``Z > 0`` or backward ``Z < 0``) and a spherical cap centred on the
scatterer.  Grids are deterministic pure functions of their arguments, carry
exact per-pixel areas, and store their construction parameters so that
:func:`refine` can rebuild the same geometry at doubled linear resolution
for convergence checks.

The planar transverse coordinates use a sinh stretching ``s = |Z| sinh(xi)``
with uniform ``xi`` cell edges: pixels are small near the axis (where the
detected pattern varies on the scale of ``|Z|``) and grow toward the rim.
The edge resolution also tracks the Fresnel-zone scale ``~ lambda / |Z|`` so
interference fringes in the far zone stay resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PixelGrid",
    "planar_solid_angle",
    "half_width_for_solid_angle",
    "cap_solid_angle",
    "theta_for_solid_angle",
    "planar_grid",
    "hemisphere_grid",
    "refine",
    "solid_angle_sum",
]

# resolution targets for the planar map: at least _AXIAL_SAMPLES cells per
# unit of xi (feature scale |Z| near the axis), and at least _ZONE_SAMPLES
# cells per Fresnel-zone scale lambda at the rim scale of the stretching
_AXIAL_SAMPLES = 12
_ZONE_SAMPLES = 36


@dataclass(frozen=True, eq=False)
class PixelGrid:
    """A set of detector pixels: centers, outward normals, exact areas."""

    positions: np.ndarray
    normals: np.ndarray
    areas: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        nrm = np.atleast_2d(np.asarray(self.normals, dtype=float))
        areas = np.atleast_1d(np.asarray(self.areas, dtype=float))
        if pos.shape != nrm.shape or pos.shape[0] != areas.shape[0]:
            raise ValueError("positions, normals and areas sizes disagree")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "areas", areas)

    @property
    def size(self) -> int:
        return self.areas.size


# ---------------------------------------------------------------------------
# solid angles
# ---------------------------------------------------------------------------

def planar_solid_angle(half_width: float, distance: float) -> float:
    """Solid angle subtended by a square of half-width ``a`` at distance ``z``.

    Uses the closed form ``4 arctan(a^2 / (|z| sqrt(2 a^2 + z^2)))``.
    """
    if half_width <= 0:
        raise ValueError(f"half_width must be positive, got {half_width}")
    z = abs(distance)
    if z == 0:
        raise ValueError("detector plane cannot contain the scatterer (z = 0)")
    a2 = half_width**2
    return 4.0 * math.atan(a2 / (z * math.sqrt(2.0 * a2 + z * z)))


def half_width_for_solid_angle(solid_angle: float, distance: float) -> float:
    """Half-width of the square plate subtending ``solid_angle`` at ``|z|``.

    Closed-form inverse of :func:`planar_solid_angle`: with
    ``x = tan(solid_angle / 4)`` the squared aspect ratio is
    ``(a/z)^2 = x^2 + x sqrt(x^2 + 1)``.  Valid for ``0 < solid_angle < 2 pi``
    (a plate covers at most a half space).
    """
    if not 0.0 < solid_angle < 2.0 * math.pi:
        raise ValueError(
            f"planar solid angle must lie in (0, 2 pi), got {solid_angle}")
    z = abs(distance)
    if z == 0:
        raise ValueError("detector plane cannot contain the scatterer (z = 0)")
    x = math.tan(0.25 * solid_angle)
    u = x * x + x * math.hypot(x, 1.0)
    return z * math.sqrt(u)


def cap_solid_angle(theta_max: float) -> float:
    """Solid angle of a polar cap of opening angle ``theta_max``."""
    if not 0.0 < theta_max <= math.pi:
        raise ValueError(f"theta_max must lie in (0, pi], got {theta_max}")
    return 2.0 * math.pi * (1.0 - math.cos(theta_max))


def theta_for_solid_angle(solid_angle: float) -> float:
    """Opening angle of the polar cap subtending ``solid_angle``."""
    if not 0.0 < solid_angle <= 4.0 * math.pi:
        raise ValueError(
            f"cap solid angle must lie in (0, 4 pi], got {solid_angle}")
    return math.acos(1.0 - solid_angle / (2.0 * math.pi))


# ---------------------------------------------------------------------------
# grid builders
# ---------------------------------------------------------------------------

def planar_grid(distance: float, solid_angle: float, refinement: int = 1,
                wavelength: float = 2.0 * math.pi) -> PixelGrid:
    """Square planar detector at ``z = distance`` (signed), normal ``+z``.

    The plate half-width is fixed by the requested solid angle.  Transverse
    pixel edges follow ``s = |Z| sinh(xi)`` with uniform ``xi``; the outermost
    edges land exactly on ``+-a`` so pixel areas tile the plate exactly.
    ``refinement`` doubles the linear pixel density per unit.
    """
    if refinement < 1 or int(refinement) != refinement:
        raise ValueError(f"refinement must be a positive integer, got {refinement}")
    z = float(distance)
    az = abs(z)
    a = half_width_for_solid_angle(solid_angle, az)
    xi_max = math.asinh(a / az)
    dxi = min(1.0 / _AXIAL_SAMPLES, wavelength / (_ZONE_SAMPLES * az)) / refinement
    half_cells = max(2, math.ceil(xi_max / dxi))
    edges = az * np.sinh(np.linspace(-xi_max, xi_max, 2 * half_cells + 1))
    edges[0], edges[-1] = -a, a
    centers = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)

    xc, yc = np.meshgrid(centers, centers, indexing="ij")
    positions = np.column_stack([
        xc.ravel(), yc.ravel(), np.full(xc.size, z)])
    areas = np.outer(widths, widths).ravel()
    normals = np.zeros_like(positions)
    normals[:, 2] = 1.0
    meta = {
        "kind": "planar",
        "distance": z,
        "solid_angle": float(solid_angle),
        "half_width": a,
        "refinement": int(refinement),
        "wavelength": float(wavelength),
        "cells_per_axis": 2 * half_cells,
    }
    return PixelGrid(positions, normals, areas, meta)


def hemisphere_grid(radius: float, solid_angle: float, refinement: int = 1,
                    wavelength: float = 2.0 * math.pi) -> PixelGrid:
    """Spherical-cap detector of the given radius around the forward axis.

    Pixels are equal-solid-angle cells, uniform in ``cos(theta)`` and ``phi``;
    normals point radially outward and areas sum to ``radius^2 * solid_angle``
    exactly.  The polar resolution tracks the radial interference scale
    (fringes are uniform in ``cos(theta)`` for a sphere centred on the
    source), the azimuthal one the smooth dipole pattern.
    """
    if refinement < 1 or int(refinement) != refinement:
        raise ValueError(f"refinement must be a positive integer, got {refinement}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    theta_max = theta_for_solid_angle(solid_angle)
    cos_min = math.cos(theta_max)
    zones = radius * (1.0 - cos_min) / wavelength
    n_theta = refinement * max(48, math.ceil(6.0 * zones))
    n_phi = refinement * 48

    cos_edges = np.linspace(cos_min, 1.0, n_theta + 1)
    phi_edges = np.linspace(0.0, 2.0 * math.pi, n_phi + 1)
    cos_c = 0.5 * (cos_edges[:-1] + cos_edges[1:])
    phi_c = 0.5 * (phi_edges[:-1] + phi_edges[1:])
    d_cos = np.diff(cos_edges)
    d_phi = np.diff(phi_edges)

    cth, ph = np.meshgrid(cos_c, phi_c, indexing="ij")
    sth = np.sqrt(1.0 - cth**2)
    e_r = np.column_stack([
        (sth * np.cos(ph)).ravel(),
        (sth * np.sin(ph)).ravel(),
        cth.ravel(),
    ])
    positions = radius * e_r
    areas = (radius**2 * np.outer(d_cos, d_phi)).ravel()
    meta = {
        "kind": "hemisphere",
        "radius": float(radius),
        "solid_angle": float(solid_angle),
        "refinement": int(refinement),
        "wavelength": float(wavelength),
        "n_theta": n_theta,
        "n_phi": n_phi,
    }
    return PixelGrid(positions, e_r, areas, meta)


def refine(grid: PixelGrid) -> PixelGrid:
    """Rebuild a grid at twice the linear pixel density (4x the pixels)."""
    meta = grid.meta
    kind = meta.get("kind")
    if kind == "planar":
        return planar_grid(meta["distance"], meta["solid_angle"],
                           refinement=2 * meta["refinement"],
                           wavelength=meta["wavelength"])
    if kind == "hemisphere":
        return hemisphere_grid(meta["radius"], meta["solid_angle"],
                               refinement=2 * meta["refinement"],
                               wavelength=meta["wavelength"])
    raise ValueError(f"cannot refine grid of kind {kind!r}")


def solid_angle_sum(grid: PixelGrid, origin=(0.0, 0.0, 0.0)) -> float:
    """Discrete solid angle: sum of projected pixel areas over distance^2."""
    rel = grid.positions - np.asarray(origin, dtype=float)
    r = np.linalg.norm(rel, axis=-1)
    proj = np.sum(rel * grid.normals, axis=-1) / r
    return float(np.sum(grid.areas * np.abs(proj) / r**2))
