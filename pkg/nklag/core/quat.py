"""Quaternion algebra on numpy arrays.

A quaternion is an array whose last axis has length 4, ordered (w, x, y, z).
An imaginary quaternion is an array whose last axis has length 3, read as
x·i + y·j + z·k. Every function broadcasts over the leading axes.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])

# Below this angle qexp_im switches to the Taylor branch of sin|α|/|α|.
_SMALL_ANGLE = 1e-6


def as_quat(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1] != 4:
        raise DomainError(f"quaternion arrays need a trailing axis of 4, got {a.shape}")
    return a


def as_im(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1] != 3:
        raise DomainError(f"imaginary quaternion arrays need a trailing axis of 3, got {a.shape}")
    return a


def embed_im(alpha) -> np.ndarray:
    """Return the quaternion 0 + α."""
    alpha = as_im(alpha)
    return np.concatenate([np.zeros(alpha.shape[:-1] + (1,)), alpha], axis=-1)


def im_part(a) -> np.ndarray:
    return as_quat(a)[..., 1:]


def re_part(a) -> np.ndarray:
    return as_quat(a)[..., 0]


def qmul(a, b) -> np.ndarray:
    """Hamilton product a·b."""
    a = as_quat(a)
    b = as_quat(b)

    w0, x0, y0, z0 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    w1, x1, y1, z1 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]

    w = w0 * w1 - x0 * x1 - y0 * y1 - z0 * z1
    x = w0 * x1 + x0 * w1 + y0 * z1 - z0 * y1
    y = w0 * y1 + y0 * w1 + z0 * x1 - x0 * z1
    z = w0 * z1 + z0 * w1 + x0 * y1 - y0 * x1
    return np.stack([w, x, y, z], axis=-1)


def qconj(a) -> np.ndarray:
    a = as_quat(a)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm(a) -> np.ndarray:
    return np.linalg.norm(as_quat(a), axis=-1)


def qinner(a, b) -> np.ndarray:
    """Euclidean inner product of R⁴."""
    return np.sum(as_quat(a) * as_quat(b), axis=-1)


def qinv(a) -> np.ndarray:
    a = as_quat(a)
    norm2 = np.sum(a * a, axis=-1)
    if np.any(norm2 == 0.0):
        raise DomainError("cannot invert a zero quaternion")
    return qconj(a) / norm2[..., None]


def qnormalize(a) -> np.ndarray:
    a = as_quat(a)
    return a / qnorm(a)[..., None]


def imcross(alpha, beta) -> np.ndarray:
    """Cross product of imaginary quaternions, equal to ½(αβ − βα)."""
    return np.cross(as_im(alpha), as_im(beta))


def imdot(alpha, beta) -> np.ndarray:
    return np.sum(as_im(alpha) * as_im(beta), axis=-1)


def qexp_im(alpha) -> np.ndarray:
    """Exponential of an imaginary quaternion: cos|α| + sin|α|/|α|·α."""
    alpha = as_im(alpha)
    angle = np.linalg.norm(alpha, axis=-1)
    small = angle < _SMALL_ANGLE
    safe = np.where(small, 1.0, angle)
    sinc = np.where(small, 1.0 - angle**2 / 6.0, np.sin(safe) / safe)
    return np.concatenate([np.cos(angle)[..., None], sinc[..., None] * alpha], axis=-1)


def conjugate_by(x, v) -> np.ndarray:
    """Return x·v·x⁻¹ for a unit quaternion x."""
    x = as_quat(x)
    return qmul(qmul(x, as_quat(v)), qconj(x))


def random_unit(rng: np.random.Generator, size: int | tuple = ()) -> np.ndarray:
    size = (size,) if isinstance(size, int) else tuple(size)
    return qnormalize(rng.normal(size=size + (4,)))
