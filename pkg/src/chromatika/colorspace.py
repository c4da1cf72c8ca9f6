"""sRGB <-> CIE L*a*b* conversion (D65 reference white) and the CIE76 color
difference.

The white point is taken as the image of (255,255,255) under the sRGB->XYZ
matrix, so pure white maps to exactly L*=100, a*=b*=0.
"""

import math
from typing import NamedTuple

import numpy as np


class LabColor(NamedTuple):
    L: float
    a: float
    b: float


# sRGB primaries, D65, 2-degree observer (IEC 61966-2-1 derivation).
_RGB_TO_XYZ = np.array(
    [
        [0.41239079926595934, 0.357584339383878, 0.1804807884018343],
        [0.21263900587151027, 0.715168678767756, 0.07219231536073371],
        [0.01933081871559182, 0.11919477979462598, 0.9505321522496607],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE = _RGB_TO_XYZ.sum(axis=1)  # XYZ of linear RGB (1,1,1)

_DELTA = 6.0 / 29.0
_DELTA3 = _DELTA**3
_KAPPA = 1.0 / (3.0 * _DELTA**2)


def _check_rgb(rgb) -> tuple[float, float, float]:
    r, g, b = rgb
    for v in (r, g, b):
        if not 0 <= v <= 255:
            raise ValueError(f"channel value {v} outside [0, 255]")
    return float(r), float(g), float(b)


def _linearize(c: float) -> float:
    c /= 255.0
    if c <= 0.04045:
        return c / 12.92
    return ((c + 0.055) / 1.055) ** 2.4


def _delinearize(c: float) -> float:
    if c <= 0.0031308:
        c *= 12.92
    else:
        c = 1.055 * c ** (1.0 / 2.4) - 0.055
    return c * 255.0


def _f(t: float) -> float:
    if t > _DELTA3:
        return t ** (1.0 / 3.0)
    return _KAPPA * t + 4.0 / 29.0


def _finv(u: float) -> float:
    if u > _DELTA:
        return u**3
    return (u - 4.0 / 29.0) / _KAPPA


def srgb_to_lab(rgb) -> LabColor:
    """Convert an sRGB triple (0-255 per channel) to L*a*b*."""
    r, g, b = _check_rgb(rgb)
    lin = np.array([_linearize(r), _linearize(g), _linearize(b)])
    xyz = _RGB_TO_XYZ @ lin
    fx, fy, fz = (_f(v) for v in xyz / _WHITE)
    return LabColor(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_srgb(lab) -> tuple[float, float, float]:
    """Inverse of srgb_to_lab. Out-of-gamut results are clipped to [0, 255]."""
    L, a, b = lab
    fy = (L + 16.0) / 116.0
    fx = fy + a / 500.0
    fz = fy - b / 200.0
    xyz = np.array([_finv(fx), _finv(fy), _finv(fz)]) * _WHITE
    lin = _XYZ_TO_RGB @ xyz
    out = tuple(min(255.0, max(0.0, _delinearize(v))) for v in lin)
    return out


def delta_e(p, q) -> float:
    """CIE76 color difference: Euclidean distance in L*a*b*."""
    d0 = p[0] - q[0]
    d1 = p[1] - q[1]
    d2 = p[2] - q[2]
    return math.sqrt(d0 * d0 + d1 * d1 + d2 * d2)


def srgb_to_lab_array(rgb: np.ndarray) -> np.ndarray:
    """Vectorized srgb_to_lab over an (..., 3) array of 0-255 values."""
    px = np.asarray(rgb, dtype=np.float64)
    if px.shape[-1] != 3:
        raise ValueError("expected trailing dimension of 3 (RGB)")
    if px.min() < 0 or px.max() > 255:
        raise ValueError("channel values outside [0, 255]")
    c = px / 255.0
    lin = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = lin @ _RGB_TO_XYZ.T / _WHITE
    f = np.where(xyz > _DELTA3, np.cbrt(xyz), _KAPPA * xyz + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab
