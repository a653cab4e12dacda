"""The space of k-vectors over E^m_s with its induced inner product.

Basis k-vectors e_I (I a strictly increasing tuple of 1-based axis indices)
are mutually orthogonal, with self-product equal to the product of the
coordinate metric weights over I.  On decomposable elements the induced
product is det(<X_i, Y_j>).  Coefficients are stored densely over the
lexicographically ordered multi-indices; this ordering is part of the
report format and must not change.

Only grades 1-3 are supported: the Gauss map of a surface is a 2-vector,
and one wedge with a 1-vector is the highest grade the Laplacian formulas
need.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .minkowski import Signature

MAX_GRADE = 3


@lru_cache(maxsize=None)
def multi_indices(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All strictly increasing k-tuples over 1..m, lexicographically ordered."""
    return tuple(combinations(range(1, m + 1), k))


@lru_cache(maxsize=None)
def _index_positions(m: int, k: int) -> dict[tuple[int, ...], int]:
    return {idx: pos for pos, idx in enumerate(multi_indices(m, k))}


def basis_weight(sig: Signature, idx: tuple[int, ...]) -> float:
    """Self-inner-product of the basis k-vector e_idx (product of axis weights)."""
    return float(np.prod([sig.weights[i - 1] for i in idx]))


@lru_cache(maxsize=None)
def _weights_vector(sig: Signature, k: int) -> np.ndarray:
    return np.array([basis_weight(sig, idx) for idx in multi_indices(sig.dim, k)])


@dataclass(frozen=True)
class InducedSpace:
    """Dimension N and index S of the k-vector space over E^m_s."""

    dim: int
    index: int


def lambda_index(m: int, s: int, n: int) -> InducedSpace:
    """Dimension and index of the space of n-vectors over E^m_s.

    A basis n-vector is negative exactly when it contains an odd number of
    time-like axes.
    """
    if not (0 <= s <= m):
        raise ValueError(f"index must lie in [0, {m}], got {s}")
    if not (1 <= n <= m):
        raise ValueError(f"grade must lie in [1, {m}], got {n}")
    neg = sum(1 for idx in multi_indices(m, n) if sum(1 for i in idx if i <= s) % 2 == 1)
    return InducedSpace(dim=comb(m, n), index=neg)


class KVector:
    """Dense k-vector: grade, signature and one coefficient per multi-index."""

    __slots__ = ("grade", "signature", "coeffs")

    def __init__(self, grade: int, signature: Signature, coeffs):
        if not 1 <= grade <= MAX_GRADE:
            raise ValueError(f"grade must be in 1..{MAX_GRADE}, got {grade}")
        coeffs = np.asarray(coeffs, dtype=float)
        want = comb(signature.dim, grade)
        if coeffs.shape != (want,):
            raise ValueError(f"expected {want} coefficients for grade {grade}, got {coeffs.shape}")
        self.grade = grade
        self.signature = signature
        self.coeffs = coeffs

    @classmethod
    def zero(cls, grade: int, signature: Signature) -> "KVector":
        return cls(grade, signature, np.zeros(comb(signature.dim, grade)))

    @classmethod
    def from_vector(cls, signature: Signature, v) -> "KVector":
        return cls(1, signature, np.asarray(v, dtype=float))

    def indices(self) -> tuple[tuple[int, ...], ...]:
        return multi_indices(self.signature.dim, self.grade)

    def coefficient(self, idx: tuple[int, ...]) -> float:
        return float(self.coeffs[_index_positions(self.signature.dim, self.grade)[idx]])

    def _like(self, other: "KVector"):
        if not isinstance(other, KVector):
            raise TypeError("expected a KVector")
        if other.grade != self.grade or other.signature != self.signature:
            raise ValueError("grade or signature mismatch")

    def __add__(self, other: "KVector") -> "KVector":
        self._like(other)
        return KVector(self.grade, self.signature, self.coeffs + other.coeffs)

    def __sub__(self, other: "KVector") -> "KVector":
        self._like(other)
        return KVector(self.grade, self.signature, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "KVector":
        return KVector(self.grade, self.signature, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "KVector":
        return KVector(self.grade, self.signature, -self.coeffs)

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector (not the induced product)."""
        return float(np.linalg.norm(self.coeffs))

    def __repr__(self):
        terms = [
            f"{c:+.6g}*e{''.join(map(str, idx))}"
            for idx, c in zip(self.indices(), self.coeffs)
            if c != 0.0
        ]
        return f"KVector({' '.join(terms) or '0'})"


def wedge(sig: Signature, u, v) -> KVector:
    """Wedge product of two 1-vectors; coefficient on (i,j), i<j, is u_i v_j - u_j v_i."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (sig.dim,) or v.shape != (sig.dim,):
        raise ValueError("signature mismatch: wedge factors must have dim components")
    out = np.array([u[i - 1] * v[j - 1] - u[j - 1] * v[i - 1] for i, j in multi_indices(sig.dim, 2)])
    return KVector(2, sig, out)


def wedge_ext(a: KVector, v) -> KVector:
    """Wedge a k-vector with a 1-vector (multilinear alternating extension)."""
    sig = a.signature
    v = np.asarray(v, dtype=float)
    if v.shape != (sig.dim,):
        raise ValueError("signature mismatch: 1-vector factor has wrong dimension")
    k = a.grade
    if k + 1 > MAX_GRADE or k + 1 > sig.dim:
        raise ValueError(f"grade overflow: cannot wedge grade {k} with a vector")
    pos = _index_positions(sig.dim, k + 1)
    out = np.zeros(comb(sig.dim, k + 1))
    for i_pos, idx in enumerate(multi_indices(sig.dim, k)):
        c = a.coeffs[i_pos]
        if c == 0.0:
            continue
        for p in range(1, sig.dim + 1):
            if p in idx:
                continue
            sign = (-1) ** sum(1 for q in idx if q > p)
            out[pos[tuple(sorted(idx + (p,)))]] += sign * c * v[p - 1]
    return KVector(k + 1, sig, out)


def induced_inner(a: KVector, b: KVector) -> float:
    """Induced inner product; equals det(<X_i,Y_j>) on decomposables."""
    if a.grade != b.grade or a.signature != b.signature:
        raise ValueError("grade or signature mismatch")
    w = _weights_vector(a.signature, a.grade)
    return float((w * a.coeffs * b.coeffs).sum())
