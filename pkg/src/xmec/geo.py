"""Great-circle geometry on a spherical Earth model.

Distances are used only to band location-substitution candidates at the
scale of tens to thousands of kilometers, so a sphere of mean radius
6371.0 km is sufficient.
"""

from __future__ import annotations

import math

from .exceptions import InvalidCoordinate

EARTH_RADIUS_KM = 6371.0

Coordinate = tuple[float, float]  # (latitude, longitude) in degrees


def check_coordinates(lat: float, lon: float) -> None:
    """Require latitude in [-90, 90] and longitude in (-180, 180]."""
    if not (math.isfinite(lat) and -90.0 <= lat <= 90.0):
        raise InvalidCoordinate(f"latitude out of range: {lat!r}")
    if not (math.isfinite(lon) and -180.0 < lon <= 180.0):
        raise InvalidCoordinate(f"longitude out of range: {lon!r}")


def haversine_km(a: Coordinate, b: Coordinate) -> float:
    """Great-circle distance in kilometers between two (lat, lon) points.

    Symmetric by construction; the square root argument is clamped so
    antipodal points cannot produce a domain error.
    """
    lat1, lon1 = a
    lat2, lon2 = b
    check_coordinates(lat1, lon1)
    check_coordinates(lat2, lon2)

    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)

    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    h = min(1.0, max(0.0, h))
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))
