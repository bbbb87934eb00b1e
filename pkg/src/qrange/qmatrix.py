"""Quaternionic matrices.

A :class:`QMatrix` wraps an ``(n, n, 4)`` float array. Vectors in H^n are
``(n, 4)`` arrays. Eigen-decompositions go through the complex adjoint

    q = z1 + z2 j   |->   [[z1, z2], [-conj(z2), conj(z1)]]

extended blockwise, ``A = A1 + A2 j -> [[A1, A2], [-conj(A2), conj(A1)]]``.
Under that map a column vector ``v = v1 + v2 j`` corresponds to the complex
vector ``(v1, -conj(v2))``, and ``A v = v lam`` (``lam`` complex) is the same
statement as ``adjoint(A) xi = lam xi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quat import Quaternion, qconj, qmul

SKEW_TOL = 1e-10
ADJOINT_TOL = 1e-10


class EmptyRealPart(ValueError):
    """Raised when W(A) provably contains no real number (1x1 nonreal input)."""


@dataclass(frozen=True, eq=False)
class QMatrix:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 3 or e.shape[0] != e.shape[1] or e.shape[2] != 4:
            raise ValueError(f"expected an (n, n, 4) array, got shape {e.shape}")
        if e.shape[0] < 1:
            raise ValueError("matrix dimension must be at least 1")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_components(cls, a0, a1=None, a2=None, a3=None) -> QMatrix:
        a0 = np.asarray(a0, dtype=float)
        parts = [a0] + [np.zeros_like(a0) if a is None else np.asarray(a, dtype=float)
                        for a in (a1, a2, a3)]
        return cls(np.stack(parts, axis=-1))

    @classmethod
    def from_complex(cls, z) -> QMatrix:
        z = np.asarray(z, dtype=complex)
        return cls.from_components(z.real, z.imag)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls.from_components(np.eye(n))

    @classmethod
    def from_json(cls, obj: dict) -> QMatrix:
        if not isinstance(obj, dict) or "entries" not in obj:
            raise ValueError("matrix JSON must be an object with an 'entries' field")
        entries = np.asarray(obj["entries"], dtype=float)
        if entries.ndim != 3 or entries.shape[-1] != 4:
            raise ValueError("'entries' must be an n x n grid of [a0, a1, a2, a3]")
        if "n" in obj and int(obj["n"]) != entries.shape[0]:
            raise ValueError(f"'n'={obj['n']} does not match entries of size {entries.shape[0]}")
        return cls(entries)

    def to_json(self) -> dict:
        return {"n": self.n, "entries": self.entries.tolist()}

    # -- algebra ------------------------------------------------------------

    def __getitem__(self, idx) -> Quaternion:
        r, c = idx
        return Quaternion.from_array(self.entries[r, c])

    def adjoint(self) -> QMatrix:
        """Conjugate transpose ``A*``."""
        return QMatrix(qconj(np.swapaxes(self.entries, 0, 1)))

    def __add__(self, other: QMatrix) -> QMatrix:
        return QMatrix(self.entries + other.entries)

    def __sub__(self, other: QMatrix) -> QMatrix:
        return QMatrix(self.entries - other.entries)

    def scale(self, s: float) -> QMatrix:
        return QMatrix(self.entries * s)

    def __matmul__(self, other: QMatrix) -> QMatrix:
        prod = qmul(self.entries[:, :, None, :], other.entries[None, :, :, :])
        return QMatrix(prod.sum(axis=1))

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Matrix-vector product ``A x`` for ``x`` of shape ``(n, 4)``."""
        x = np.asarray(x, dtype=float)
        return qmul(self.entries, x[None, :, :]).sum(axis=1)

    def allclose(self, other: QMatrix, eps: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - other.entries), initial=0.0) <= eps)

    def is_hermitian(self, eps: float = SKEW_TOL) -> bool:
        return self.allclose(self.adjoint(), eps)

    def is_skew_hermitian(self, eps: float = SKEW_TOL) -> bool:
        return self.allclose(self.adjoint().scale(-1.0), eps)

    def quadratic_forms(self) -> np.ndarray:
        """Real symmetric matrices ``Q[k]`` with ``x^T Q[k] x = (x* A x)_k``.

        ``x`` is flattened from ``(n, 4)`` to ``4n`` real coordinates.
        """
        n = self.n
        basis = np.eye(4)
        left = qmul(qconj(basis)[None, None, :, :], self.entries[:, :, None, :])   # (l, m, c, 4)
        full = qmul(left[:, :, :, None, :], basis[None, None, None, :, :])          # (l, m, c, d, 4)
        full = np.transpose(full, (0, 2, 1, 3, 4)).reshape(4 * n, 4 * n, 4)
        full = np.moveaxis(full, -1, 0)
        return 0.5 * (full + np.swapaxes(full, 1, 2))


def form_value(A: QMatrix, x: np.ndarray) -> np.ndarray:
    """``x* A x`` as a length-4 array (no normalization check)."""
    x = np.asarray(x, dtype=float)
    return qmul(qconj(x), A.apply(x)).sum(axis=0)


def vector_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(x, dtype=float)))


# ---------------------------------------------------------------------------
# hermitian / skew split
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianSkewSplit:
    H: QMatrix
    S: QMatrix


def hermitian_skew_split(A: QMatrix) -> HermitianSkewSplit:
    As = A.adjoint()
    return HermitianSkewSplit(H=(A + As).scale(0.5), S=(A - As).scale(0.5))


# ---------------------------------------------------------------------------
# complex adjoint
# ---------------------------------------------------------------------------

def complex_adjoint(A: QMatrix) -> np.ndarray:
    e = A.entries
    a1 = e[..., 0] + 1j * e[..., 1]
    a2 = e[..., 2] + 1j * e[..., 3]
    return np.block([[a1, a2], [-a2.conj(), a1.conj()]])


def from_complex_adjoint(X: np.ndarray, eps: float = ADJOINT_TOL) -> QMatrix:
    """Inverse of :func:`complex_adjoint`; rejects matrices outside its image."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got shape {X.shape}")
    n = X.shape[0] // 2
    a1, a2 = X[:n, :n], X[:n, n:]
    b1, b2 = X[n:, :n], X[n:, n:]
    err = max(np.max(np.abs(b2 - a1.conj()), initial=0.0),
              np.max(np.abs(b1 + a2.conj()), initial=0.0))
    if err > eps:
        raise ValueError(f"matrix is not a complex adjoint (block mismatch {err:.3g})")
    return QMatrix(np.stack([a1.real, a1.imag, a2.real, a2.imag], axis=-1))


def vector_to_complex(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    v1 = v[:, 0] + 1j * v[:, 1]
    v2 = v[:, 2] + 1j * v[:, 3]
    return np.concatenate([v1, -v2.conj()])


def vector_from_complex(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=complex)
    n = xi.shape[0] // 2
    v1 = xi[:n]
    v2 = -xi[n:].conj()
    return np.stack([v1.real, v1.imag, v2.real, v2.imag], axis=-1)


# ---------------------------------------------------------------------------
# skew diagonalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SkewDiagonalization:
    U: QMatrix
    s: list[Quaternion]

    @property
    def moduli(self) -> np.ndarray:
        return np.array([q.a1 for q in self.s])


def _normalize_phase(xi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    # deterministic representative: first non-negligible component real positive
    idx = int(np.argmax(np.abs(xi) > tol * np.max(np.abs(xi))))
    z = xi[idx]
    return xi * (abs(z) / z)


def _qinner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Quaternionic inner product ``u* v`` of two ``(n, 4)`` vectors."""
    return qmul(qconj(u), v).sum(axis=0)


def diagonalize_skew(S: QMatrix, eps: float = SKEW_TOL) -> SkewDiagonalization:
    """Unitary ``U`` with ``U* S U = diag(s_1, ..., s_n)``, ``s_l = mu_l i``.

    The ``mu_l`` are nonnegative and sorted in descending order. Columns come
    from eigenvectors of the complex adjoint for eigenvalues ``i mu`` with
    ``mu >= 0``; repeated (in particular zero) eigenvalues are completed by a
    quaternionic Gram-Schmidt pass.
    """
    if not S.is_skew_hermitian(eps):
        raise ValueError("diagonalize_skew needs a skew-hermitian matrix")
    n = S.n
    chi = complex_adjoint(S)
    # chi is skew-hermitian, so -i chi is hermitian with real spectrum mu
    mu, vecs = np.linalg.eigh(-1j * chi)
    order = np.argsort(-mu, kind="stable")
    cols: list[np.ndarray] = []
    mus: list[float] = []
    for idx in order:
        if len(cols) == n:
            break
        v = vector_from_complex(_normalize_phase(vecs[:, idx]))
        for u in cols:
            v = v - qmul(u, _qinner(u, v)[None, :])
        nv = np.linalg.norm(v)
        if nv < 1e-6:
            continue
        cols.append(v / nv)
        mus.append(max(float(mu[idx]), 0.0))
    U = QMatrix(np.stack(cols, axis=1))
    s = [Quaternion(0.0, m, 0.0, 0.0) for m in mus]
    return SkewDiagonalization(U=U, s=s)


# ---------------------------------------------------------------------------
# a real point of W(A)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealPoint:
    x: np.ndarray
    value: float
    beta: float | None
    imag_residual: float

    def __iter__(self):
        # allows ``x, r = real_point(A)``
        yield self.x
        yield self.value


def real_point(A: QMatrix, tol: float = 1e-12) -> RealPoint:
    """Construct a unit ``x`` with ``x* A x`` real.

    Split ``A`` into hermitian and skew parts, diagonalize the skew part,
    and mix the two largest skew eigenvalues (one sent to the upper, the
    other to the lower half plane) so the skew contribution cancels.
    """
    n = A.n
    if n == 1:
        q = A[0, 0]
        if q.vector_norm > tol:
            raise EmptyRealPart("W∩ℝ empty for 1×1 nonreal input")
        return RealPoint(np.array([[1.0, 0.0, 0.0, 0.0]]), q.real, None, 0.0)

    split = hermitian_skew_split(A)
    diag = diagonalize_skew(split.S)
    mu1, mu2 = diag.s[0].a1, diag.s[1].a1
    scale = max(1.0, float(np.max(np.abs(A.entries))))
    if mu1 <= tol * scale:
        x = np.zeros((n, 4))
        x[0, 0] = 1.0
        val = form_value(A, x)
        return RealPoint(x, float(val[0]), None, float(np.linalg.norm(val[1:])))

    # q1 = s1 = mu1 i (z1 = 1), q2 = j* s2 j = -mu2 i (z2 = j)
    beta = mu2 / (mu1 + mu2)
    y = np.zeros((n, 4))
    y[0, 0] = np.sqrt(beta)
    y[1, 2] = np.sqrt(1.0 - beta)
    x = diag.U.apply(y)
    x /= np.linalg.norm(x)
    val = form_value(A, x)
    return RealPoint(x, float(val[0]), float(beta), float(np.linalg.norm(val[1:])))
