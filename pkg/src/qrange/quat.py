"""Quaternion arithmetic, similarity classes and upper complex representatives.

Quaternions are stored as ``(a0, a1, a2, a3)`` on the basis ``{1, i, j, k}``.
Besides the scalar :class:`Quaternion` value type, this module exposes a few
vectorized helpers (``qmul``, ``qconj``) that act on float arrays whose last
axis has length 4; the matrix and sampling code is built on those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_EPS = 1e-9


# ---------------------------------------------------------------------------
# array-level helpers
# ---------------------------------------------------------------------------

def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of broadcastable arrays of shape ``(..., 4)``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p0, p1, p2, p3 = np.moveaxis(p, -1, 0)
    q0, q1, q2, q3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
            p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
            p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
            p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
        ],
        axis=-1,
    )


def qconj(q: np.ndarray) -> np.ndarray:
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1.0
    return q


def upper_points(values: np.ndarray) -> np.ndarray:
    """Map quaternion values ``(..., 4)`` to bild points ``(..., 2)`` = (q_r, |q_v|)."""
    values = np.asarray(values, dtype=float)
    return np.stack([values[..., 0], np.linalg.norm(values[..., 1:], axis=-1)], axis=-1)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    @classmethod
    def from_array(cls, arr: Iterable[float]) -> Quaternion:
        a = [float(v) for v in arr]
        if len(a) != 4:
            raise ValueError(f"a quaternion needs 4 coefficients, got {len(a)}")
        return cls(*a)

    @classmethod
    def from_complex(cls, z: complex) -> Quaternion:
        return cls(z.real, z.imag, 0.0, 0.0)

    def to_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3], dtype=float)

    def to_list(self) -> list[float]:
        """JSON form ``[a0, a1, a2, a3]``."""
        return [self.a0, self.a1, self.a2, self.a3]

    @property
    def real(self) -> float:
        return self.a0

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3], dtype=float)

    @property
    def vector_norm(self) -> float:
        return math.sqrt(self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3)

    def conjugate(self) -> Quaternion:
        return Quaternion(self.a0, -self.a1, -self.a2, -self.a3)

    def norm2(self) -> float:
        return self.a0 * self.a0 + self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def is_pure(self, eps: float = 0.0) -> bool:
        return abs(self.a0) <= eps

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.a0 + other.a0, self.a1 + other.a1,
                          self.a2 + other.a2, self.a3 + other.a3)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.a0 - other.a0, self.a1 - other.a1,
                          self.a2 - other.a2, self.a3 - other.a3)

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return hamilton_product(self, other)
        s = float(other)
        return Quaternion(self.a0 * s, self.a1 * s, self.a2 * s, self.a3 * s)

    def __rmul__(self, other):
        s = float(other)
        return Quaternion(self.a0 * s, self.a1 * s, self.a2 * s, self.a3 * s)

    def __truediv__(self, other) -> Quaternion:
        s = float(other)
        return Quaternion(self.a0 / s, self.a1 / s, self.a2 / s, self.a3 / s)

    def isclose(self, other: Quaternion, eps: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.to_array() - other.to_array()) <= eps))

    def __repr__(self) -> str:
        return f"Quaternion({self.a0!r}, {self.a1!r}, {self.a2!r}, {self.a3!r})"


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class SimilarityClass:
    """The class ``[q]``, determined by the real part and the vector norm."""

    real_part: float
    vector_norm: float

    def __post_init__(self):
        if self.vector_norm < 0:
            raise ValueError("vector_norm must be nonnegative")

    def matches(self, q: Quaternion, eps: float = DEFAULT_EPS) -> bool:
        return (abs(q.real - self.real_part) <= eps
                and abs(q.vector_norm - self.vector_norm) <= eps)


@dataclass(frozen=True)
class UpperPoint:
    """A point ``x + y i`` of the closed upper half plane, stored as (x, y)."""

    x: float
    y: float

    def __post_init__(self):
        if self.y < 0:
            raise ValueError(f"UpperPoint needs y >= 0, got {self.y}")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def hamilton_product(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion(*qmul(p.to_array(), q.to_array()))


def similarity_class(q: Quaternion) -> SimilarityClass:
    return SimilarityClass(q.real, q.vector_norm)


def similar(p: Quaternion, q: Quaternion, eps: float = 0.0) -> bool:
    """True iff ``p`` and ``q`` have equal real parts and equal vector norms.

    With the default ``eps=0`` the comparison is exact (up to the rounding of
    the vector norms themselves); sampled values should pass ``eps>0``.
    """
    if eps == 0.0:
        # compare squared norms to avoid sqrt rounding
        pv = p.a1 * p.a1 + p.a2 * p.a2 + p.a3 * p.a3
        qv = q.a1 * q.a1 + q.a2 * q.a2 + q.a3 * q.a3
        return p.a0 == q.a0 and pv == qv
    return abs(p.a0 - q.a0) <= eps and abs(p.vector_norm - q.vector_norm) <= eps


def upper_representative(q: Quaternion) -> UpperPoint:
    """The unique element of ``[q]`` in span{1, i} with nonnegative i-part."""
    return UpperPoint(q.real, q.vector_norm)


def rotate_to_slice(p: UpperPoint | Sequence[float], u: Quaternion,
                    eps: float = 1e-12) -> Quaternion:
    """Return ``p.x + p.y * u``, the element of span{1, u}+ matching ``p``."""
    if not isinstance(p, UpperPoint):
        p = UpperPoint(float(p[0]), float(p[1]))
    if abs(u.a0) > eps:
        raise ValueError("slice direction must be a pure quaternion")
    if abs(u.norm() - 1.0) > eps:
        raise ValueError("slice direction must have unit norm")
    return Quaternion(p.x, p.y * u.a1, p.y * u.a2, p.y * u.a3)


def aligning_rotation(v: np.ndarray, target: np.ndarray | None = None) -> np.ndarray:
    """Unit quaternion ``s`` (array) with ``s* v s`` parallel to ``target``.

    ``v`` and ``target`` are 3-vectors (pure parts). ``target`` defaults to i.
    Used to move a quaternion inside its similarity class.
    """
    v = np.asarray(v, dtype=float)
    t = np.array([1.0, 0.0, 0.0]) if target is None else np.asarray(target, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return np.array([1.0, 0.0, 0.0, 0.0])
    a = v / nv
    b = t / np.linalg.norm(t)
    # s* a s = b  <=>  s b s* = a, i.e. s is the rotation taking b to a
    c = float(np.dot(b, a))
    axis = np.cross(b, a)
    if c < -1.0 + 1e-12:
        # antiparallel: rotate by pi about any axis orthogonal to b
        trial = np.array([0.0, 1.0, 0.0]) if abs(b[1]) < 0.9 else np.array([0.0, 0.0, 1.0])
        axis = np.cross(b, trial)
        axis /= np.linalg.norm(axis)
        return np.concatenate([[0.0], axis])
    s = np.concatenate([[1.0 + c], axis])
    return s / np.linalg.norm(s)
