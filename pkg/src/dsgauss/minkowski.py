"""Indefinite (semi-Euclidean) linear algebra in E^m_s.

The metric of E^m_s weights the first ``s`` coordinates with -1 and the
remaining ``m - s`` with +1, so for s = 1 the first axis is the time-like
one.  Vectors are plain 1-d numpy arrays; the signature travels separately.
Inner products over batches are supported along the last axis.

Gram-Schmidt in an indefinite metric is only defined away from the light
cone: a pivot whose self-inner-product is tiny relative to its size means
the construction is about to divide by (nearly) zero, and every quantity
derived from such a frame is garbage.  Those pivots raise
:class:`DegenerateFrame` instead of continuing silently.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Pivots with |<p,p>| below this times ||p||_1^2 are treated as light-like
# (degenerate) during orthonormalization.
PIVOT_RTOL = 1e-10


class DegenerateFrame(Exception):
    """A Gram-Schmidt pivot was light-like or numerically zero."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"degenerate (light-like or zero) pivot at index {index}")


class CausalCharacter(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class Signature:
    """Dimension and index of a semi-Euclidean space E^m_s."""

    dim: int
    index: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be positive, got {self.dim}")
        if not 0 <= self.index <= self.dim:
            raise ValueError(f"index must lie in [0, {self.dim}], got {self.index}")

    @cached_property
    def weights(self) -> np.ndarray:
        """Metric weights per coordinate: -1 for the first ``index`` axes, +1 after."""
        w = np.ones(self.dim)
        w[: self.index] = -1.0
        return w


E5_1 = Signature(5, 1)


def _check_vec(sig: Signature, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != sig.dim:
        raise ValueError(
            f"signature mismatch: vector has {v.shape[-1]} components, signature expects {sig.dim}"
        )
    return v


def inner(sig: Signature, u, v) -> float | np.ndarray:
    """Semi-Euclidean inner product; batched along the last axis."""
    u = _check_vec(sig, u)
    v = _check_vec(sig, v)
    return ((u * v) * sig.weights).sum(axis=-1)


def sq_norm(sig: Signature, v) -> float | np.ndarray:
    return inner(sig, v, v)


def causal_character(sig: Signature, v, tol: float = 0.0) -> CausalCharacter:
    """Classify ``v`` as space-, time- or light-like.

    The light-like band is |<v,v>| <= tol * (1 + ||v||_1^2); the zero vector
    is classified space-like by convention.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    v = _check_vec(sig, v)
    n = float(inner(sig, v, v))
    l1 = float(np.abs(v).sum())
    if l1 == 0.0:
        return CausalCharacter.SPACELIKE
    if abs(n) <= tol * (1.0 + l1 * l1) or n == 0.0:
        return CausalCharacter.LIGHTLIKE
    return CausalCharacter.TIMELIKE if n < 0 else CausalCharacter.SPACELIKE


def _reject(sig: Signature, v: np.ndarray, frame: list[np.ndarray], signs: list[float]) -> np.ndarray:
    """Component of v orthogonal to an already-orthonormal (+-1) frame."""
    r = v.astype(float, copy=True)
    for f, s in zip(frame, signs):
        r -= s * inner(sig, r, f) * f
    return r


def _pivot_degenerate(sig: Signature, r: np.ndarray, ref_l1: float) -> bool:
    """A pivot is degenerate when its rejection is negligible relative to the
    input vector (linear dependence) or its self-inner-product is tiny
    relative to its own size (light-like)."""
    l1 = float(np.abs(r).sum())
    if l1 <= PIVOT_RTOL * max(ref_l1, 1.0):
        return True
    return abs(float(inner(sig, r, r))) < PIVOT_RTOL * l1 * l1


def gram_schmidt(sig: Signature, vectors) -> tuple[list[np.ndarray], list[int]]:
    """Orthonormalize ``vectors``; returns (frame, signs) with <f_i,f_j> = signs_i * delta_ij.

    Raises DegenerateFrame (with the failing index) if a pivot is light-like
    or numerically zero; this covers linearly dependent input as well.
    """
    frame: list[np.ndarray] = []
    signs: list[int] = []
    for i, v in enumerate(vectors):
        v = _check_vec(sig, v)
        r = _reject(sig, v, frame, signs)
        if _pivot_degenerate(sig, r, float(np.abs(v).sum())):
            raise DegenerateFrame(i)
        n = float(inner(sig, r, r))
        frame.append(r / np.sqrt(abs(n)))
        signs.append(1 if n > 0 else -1)
    return frame, signs


def completion_order(sig: Signature, partial: list[np.ndarray], signs: list[float]) -> list[int]:
    """Coordinate axes sorted by descending magnitude of their rejection from ``partial``.

    Deterministic: ties are broken by axis index.  This is the candidate
    order used when extending a partial orthonormal frame to a full basis.
    """
    norms = []
    for a in range(sig.dim):
        axis = np.zeros(sig.dim)
        axis[a] = 1.0
        r = _reject(sig, axis, partial, signs)
        norms.append(float(np.linalg.norm(r)))
    order = sorted(range(sig.dim), key=lambda a: (-norms[a], a))
    return order


def complete_frame(sig: Signature, partial) -> list[np.ndarray]:
    """Extend an orthonormal (+-1) set to a full orthonormal basis of E^m_s.

    Candidate coordinate axes are tried in fixed descending order of
    rejected-component magnitude; axes whose rejection is degenerate are
    skipped.  The completed basis is re-oriented (by flipping the last added
    vector) so that the full basis has positive determinant.  Returns only
    the added vectors.
    """
    partial = [_check_vec(sig, p) for p in partial]
    signs = [float(inner(sig, p, p)) for p in partial]
    for i, (p, s) in enumerate(zip(partial, signs)):
        if abs(abs(s) - 1.0) > 1e-8:
            raise ValueError(f"partial frame vector {i} is not unit (+-1): <p,p>={s}")
    signs = [1.0 if s > 0 else -1.0 for s in signs]

    frame = list(partial)
    fsigns = list(signs)
    added: list[np.ndarray] = []
    for a in completion_order(sig, partial, signs):
        if len(frame) == sig.dim:
            break
        axis = np.zeros(sig.dim)
        axis[a] = 1.0
        r = _reject(sig, axis, frame, fsigns)
        if _pivot_degenerate(sig, r, 1.0):
            continue
        n = float(inner(sig, r, r))
        f = r / np.sqrt(abs(n))
        frame.append(f)
        fsigns.append(1.0 if n > 0 else -1.0)
        added.append(f)
    if len(frame) < sig.dim:
        raise DegenerateFrame(len(frame), "no coordinate axis completes the frame non-degenerately")
    if added and np.linalg.det(np.stack(frame)) < 0:
        added[-1] = -added[-1]
        frame[-1] = -frame[-1]
    return added
