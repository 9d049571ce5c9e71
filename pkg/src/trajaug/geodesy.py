"""Spherical-earth distance, bearing and destination primitives.

The array functions (:func:`haversine`, :func:`destination`, :func:`bearing`)
broadcast over numpy inputs and are what the strategies use; the
:class:`GeoPoint` wrappers are convenience for scalar callers. Degrees at the
boundary, radians inside.
"""

from __future__ import annotations

import numpy as np

from trajaug.core import GeoPoint
from trajaug.errors import DegenerateBearing

EARTH_RADIUS_M = 6_371_000.0


def haversine(lat1, lon1, lat2, lon2):
    """Great-circle distance in meters."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    # difference taken in degrees first: exact for nearby points
    dphi = np.radians(np.subtract(lat2, lat1))
    dlam = np.radians(np.subtract(lon2, lon1))
    a = np.sin(dphi / 2) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlam / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def normalize_lon(lon):
    lon = np.asarray(lon, dtype=np.float64)
    out_of_range = (lon > 180.0) | (lon < -180.0)
    if np.any(out_of_range):
        lon = np.where(out_of_range, (lon + 180.0) % 360.0 - 180.0, lon)
    return lon


def destination(lat, lon, bearing_deg, distance_m):
    """Point reached from (lat, lon) after ``distance_m`` along ``bearing_deg``.

    Latitude and longitude offsets are computed directly rather than by
    re-deriving absolute coordinates, which keeps sub-meter displacements
    accurate to the resolution of the stored coordinates.

    Returns:
        ``(lat, lon)`` arrays; longitude normalized to [-180, 180].
    """
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    phi1 = np.radians(lat)
    theta = np.radians(bearing_deg)
    delta = np.asarray(distance_m, dtype=np.float64) / EARTH_RADIUS_M

    sin_phi1 = np.sin(phi1)
    cos_phi1 = np.cos(phi1)
    sin_delta = np.sin(delta)
    # sin(phi2) - sin(phi1), free of cancellation
    dsin = cos_phi1 * sin_delta * np.cos(theta) - 2.0 * sin_phi1 * np.sin(delta / 2) ** 2
    phi2 = np.arcsin(np.clip(sin_phi1 + dsin, -1.0, 1.0))
    half_sum_cos = np.cos((phi1 + phi2) / 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = dsin / (2.0 * half_sum_cos)
    dphi = np.where(half_sum_cos > 1e-15, 2.0 * np.arcsin(np.clip(ratio, -1.0, 1.0)), phi2 - phi1)
    phi2 = phi1 + dphi
    dlam = np.arctan2(
        np.sin(theta) * sin_delta * cos_phi1,
        np.cos(delta) - sin_phi1 * np.sin(phi2),
    )
    new_lat = np.clip(lat + np.degrees(dphi), -90.0, 90.0)
    new_lon = normalize_lon(lon + np.degrees(dlam))
    return new_lat, new_lon


def _coordinate_ulp_m(lat, lon):
    """Largest ground spacing (m) between adjacent float64 coordinates here."""
    ns = np.radians(np.spacing(np.abs(lat))) * EARTH_RADIUS_M
    ew = np.radians(np.spacing(np.abs(lon))) * EARTH_RADIUS_M * np.cos(np.radians(lat))
    return np.maximum(ns, ew)


# candidate turns per side in each refinement round
_REFINE_ROUNDS = (8, 64, 256)


def destination_on_circle(lat, lon, bearing_deg, radius_m, rtol=2.5e-10):
    """Like :func:`destination`, but lands on the circle of ``radius_m`` to
    within ``rtol`` where float64 coordinates allow it.

    Rounding the result to representable degrees leaves up to ~2e-9 m of
    radial error, which is large relative to sub-meter radii. Points that
    miss are retried at slightly turned bearings; the turn grows like
    sqrt(ulp / r), at most a few hundredths of a degree for a 0.1 m radius,
    and the candidate nearest the circle wins (smallest turn on ties).
    """
    lat = np.asarray(lat, dtype=np.float64)
    lon = np.asarray(lon, dtype=np.float64)
    shape = np.broadcast(lat, lon, bearing_deg, radius_m).shape
    lat, lon, theta, r = (np.broadcast_to(np.asarray(a, dtype=np.float64), shape).ravel()
                          for a in (lat, lon, bearing_deg, radius_m))
    new_lat, new_lon = destination(lat, lon, theta, r)
    err = np.abs(haversine(lat, lon, new_lat, new_lon) - r)
    for half in _REFINE_ROUNDS:
        bad = np.flatnonzero((err > rtol * r) & (r > 0))
        if bad.size == 0:
            break
        # turns ordered +1, -1, +2, -2, ... so argmin prefers small ones
        j = np.arange(1, 2 * half + 1)
        steps = np.where(j % 2, (j + 1) // 2, -(j // 2)) / half
        ulp = _coordinate_ulp_m(lat[bad], lon[bad])
        span = np.degrees(4.0 * np.sqrt(2.0 * ulp / r[bad]))
        cand_theta = theta[bad, None] + span[:, None] * steps[None, :]
        la, lo = destination(lat[bad, None], lon[bad, None], cand_theta, r[bad, None])
        cand_err = np.abs(haversine(lat[bad, None], lon[bad, None], la, lo) - r[bad, None])
        best = np.argmin(cand_err, axis=1)
        rows = np.arange(bad.size)
        better = cand_err[rows, best] < err[bad]
        idx = bad[better]
        new_lat[idx] = la[rows, best][better]
        new_lon[idx] = lo[rows, best][better]
        err[idx] = cand_err[rows, best][better]
    return new_lat.reshape(shape), new_lon.reshape(shape)


def bearing(lat1, lon1, lat2, lon2):
    """Forward azimuth in degrees, normalized to [0, 360)."""
    phi1 = np.radians(lat1)
    phi2 = np.radians(lat2)
    dlam = np.radians(np.subtract(lon2, lon1))
    x = np.sin(dlam) * np.cos(phi2)
    y = np.cos(phi1) * np.sin(phi2) - np.sin(phi1) * np.cos(phi2) * np.cos(dlam)
    deg = np.degrees(np.arctan2(x, y)) % 360.0
    # -tiny % 360 rounds to 360.0
    return np.where(deg >= 360.0, 0.0, deg)


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    return float(haversine(a.lat, a.lon, b.lat, b.lon))


def destination_point(origin: GeoPoint, bearing_deg: float, distance_m: float) -> GeoPoint:
    if distance_m < 0:
        raise ValueError("distance must be non-negative")
    lat, lon = destination(origin.lat, origin.lon, bearing_deg, distance_m)
    return GeoPoint(float(lat), float(lon))


def initial_bearing(a: GeoPoint, b: GeoPoint) -> float:
    if a.lat == b.lat and (a.lon == b.lon or abs(a.lat) == 90.0):
        raise DegenerateBearing()
    return float(bearing(a.lat, a.lon, b.lat, b.lon))
