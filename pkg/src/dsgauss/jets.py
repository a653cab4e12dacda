"""Order-3 truncated bivariate jets: exact-to-roundoff partial derivatives.

A :class:`Jet2` carries the value of a scalar function of (u, v) together
with all partial derivatives through total order 3, in the slot order

    value, d_u, d_v, d_uu, d_uv, d_vv, d_uuu, d_uuv, d_uvv, d_vvv.

Slots live along the *last* axis of a numpy array, so a jet can hold one
point (shape ``(10,)``) or a whole batch of points (shape ``(n, 10)``);
all arithmetic broadcasts over the leading axes.

Differentiating a jet (:meth:`Jet2.d_du` / :meth:`Jet2.d_dv`) shifts the
slots down one order and zero-fills the vacated third-order slots.  The
result is therefore only trustworthy through order 2, and each further
shift loses one more order.  Callers must budget orders accordingly; the
geometry pipeline needs at most two shifts after products of first
derivatives, which order 3 covers exactly.

A finite-difference oracle (:func:`fd_oracle`) builds the same ten slots
from central differences, as an independent verification channel.
"""

from __future__ import annotations

import numpy as np

DEGREES = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3))
SLOT = {deg: k for k, deg in enumerate(DEGREES)}
NSLOTS = len(DEGREES)

SLOT_NAMES = ("value", "du", "dv", "duu", "duv", "dvv", "duuu", "duuv", "duvv", "dvvv")


def _binom(n, k):
    from math import comb

    return comb(n, k)


def _build_mul_table():
    """For each output slot (i,j): terms (slot_a, slot_b, C(i,a)*C(j,b)) over a<=i, b<=j."""
    table = []
    for (i, j) in DEGREES:
        terms = []
        for a in range(i + 1):
            for b in range(j + 1):
                terms.append((SLOT[(a, b)], SLOT[(i - a, j - b)], float(_binom(i, a) * _binom(j, b))))
        table.append(tuple(terms))
    return tuple(table)


_MUL = _build_mul_table()

# d/du maps slot (i,j) -> (i+1,j); third-order targets fall off the jet.
_SHIFT_U = tuple(SLOT.get((i + 1, j)) for (i, j) in DEGREES)
_SHIFT_V = tuple(SLOT.get((i, j + 1)) for (i, j) in DEGREES)


class Singularity(Exception):
    """Jet evaluation hit a domain violation (division by zero, log of a
    non-positive value, ...)."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(message if location is None else f"{message} [{location}]")


class Jet2:
    """Truncated Taylor data of a scalar function of (u, v), order 3."""

    __slots__ = ("d",)

    def __init__(self, data):
        d = np.asarray(data, dtype=float)
        if d.shape[-1] != NSLOTS:
            raise ValueError(f"jet data must have {NSLOTS} slots along the last axis")
        self.d = d

    # -- construction ---------------------------------------------------
    @classmethod
    def constant(cls, value) -> "Jet2":
        value = np.asarray(value, dtype=float)
        d = np.zeros(value.shape + (NSLOTS,))
        d[..., 0] = value
        return cls(d)

    @classmethod
    def variable(cls, value, axis: str) -> "Jet2":
        """Seed jet of the coordinate itself: unit first derivative along ``axis``."""
        if axis not in ("u", "v"):
            raise ValueError("axis must be 'u' or 'v'")
        value = np.asarray(value, dtype=float)
        d = np.zeros(value.shape + (NSLOTS,))
        d[..., 0] = value
        d[..., 1 if axis == "u" else 2] = 1.0
        return cls(d)

    # -- slot access ----------------------------------------------------
    @property
    def value(self):
        return self.d[..., 0]

    def slot(self, name: str):
        return self.d[..., SLOT_NAMES.index(name)]

    def __getattr__(self, name):
        # du, dv, duu, ... as read-only attributes
        if name in SLOT_NAMES:
            return self.d[..., SLOT_NAMES.index(name)]
        raise AttributeError(name)

    @property
    def shape(self):
        return self.d.shape[:-1]

    # -- differentiation (order-lowering shift) -------------------------
    def _shift(self, targets) -> "Jet2":
        out = np.zeros(np.broadcast_shapes(self.shape) + (NSLOTS,))
        for k, src in enumerate(targets):
            if src is not None:
                out[..., k] = self.d[..., src]
        return Jet2(out)

    def d_du(self) -> "Jet2":
        """Jet of the u-derivative; valid one order lower than the input."""
        return self._shift(_SHIFT_U)

    def d_dv(self) -> "Jet2":
        """Jet of the v-derivative; valid one order lower than the input."""
        return self._shift(_SHIFT_V)

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other)

    def __add__(self, other):
        return Jet2(self.d + self._coerce(other).d)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet2(self.d - self._coerce(other).d)

    def __rsub__(self, other):
        return Jet2(self._coerce(other).d - self.d)

    def __neg__(self):
        return Jet2(-self.d)

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.d, other.d
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        out = np.zeros(shape + (NSLOTS,))
        for k, terms in enumerate(_MUL):
            acc = out[..., k]
            for sa, sb, c in terms:
                acc += c * a[..., sa] * b[..., sb]
        return Jet2(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * _reciprocal(other)

    def __rtruediv__(self, other):
        return self._coerce(other) * _reciprocal(self)

    def __pow__(self, p):
        return jet_pow_const(self, p)

    def __repr__(self):
        if self.shape == ():
            slots = ", ".join(f"{n}={v:.6g}" for n, v in zip(SLOT_NAMES, self.d))
            return f"Jet2({slots})"
        return f"Jet2(shape={self.shape})"


def _guard(ok, message: str):
    """Scalar jets raise Singularity on a violated domain; batched jets let
    the offending lanes run to nan and the caller's validity mask catches
    them."""
    ok = np.asarray(ok)
    if ok.ndim == 0:
        if not bool(ok):
            raise Singularity(message)
        return
    # batched: nothing to do here; callers pass pre-nan'ed values through


def _masked(value, ok):
    """nan out lanes that violate a domain restriction (batched mode)."""
    ok = np.asarray(ok)
    if ok.ndim == 0:
        return value
    return np.where(ok, value, np.nan)


def _compose(jet: Jet2, coeffs) -> "Jet2":
    """Apply a univariate series sum_k c_k * (g - g0)^k (k = 0..3) to a jet.

    ``coeffs`` are Taylor *coefficients* (derivatives divided by k!) of the
    outer function at the jet's value.
    """
    delta = Jet2(jet.d.copy())
    delta.d[..., 0] = 0.0
    c0, c1, c2, c3 = coeffs
    return ((Jet2.constant(c3) * delta + c2) * delta + c1) * delta + c0


def _reciprocal(jet: Jet2) -> Jet2:
    g0 = jet.value
    _guard(g0 != 0.0, "division by zero value")
    with np.errstate(divide="ignore", invalid="ignore"):
        g0 = _masked(g0, g0 != 0.0)
        inv = 1.0 / g0
        return _compose(jet, (inv, -(inv**2), inv**3, -(inv**4)))


def jet_sin(jet: Jet2) -> Jet2:
    s, c = np.sin(jet.value), np.cos(jet.value)
    return _compose(jet, (s, c, -s / 2.0, -c / 6.0))


def jet_cos(jet: Jet2) -> Jet2:
    s, c = np.sin(jet.value), np.cos(jet.value)
    return _compose(jet, (c, -s, -c / 2.0, s / 6.0))


def jet_tan(jet: Jet2) -> Jet2:
    c = np.cos(jet.value)
    _guard(np.abs(c) > 1e-300, "tan at a pole")
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.tan(_masked(jet.value, np.abs(c) > 1e-300))
        q = 1.0 + t * t
        return _compose(jet, (t, q, t * q, q * (1.0 + 3.0 * t * t) / 3.0))


def jet_sinh(jet: Jet2) -> Jet2:
    s, c = np.sinh(jet.value), np.cosh(jet.value)
    return _compose(jet, (s, c, s / 2.0, c / 6.0))


def jet_cosh(jet: Jet2) -> Jet2:
    s, c = np.sinh(jet.value), np.cosh(jet.value)
    return _compose(jet, (c, s, c / 2.0, s / 6.0))


def jet_tanh(jet: Jet2) -> Jet2:
    t = np.tanh(jet.value)
    q = 1.0 - t * t
    return _compose(jet, (t, q, -t * q, -q * (1.0 - 3.0 * t * t) / 3.0))


def jet_exp(jet: Jet2) -> Jet2:
    e = np.exp(jet.value)
    return _compose(jet, (e, e, e / 2.0, e / 6.0))


def jet_ln(jet: Jet2) -> Jet2:
    g0 = jet.value
    _guard(g0 > 0.0, "ln of a non-positive value")
    with np.errstate(divide="ignore", invalid="ignore"):
        g0 = _masked(g0, np.asarray(g0) > 0.0)
        inv = 1.0 / g0
        return _compose(jet, (np.log(g0), inv, -(inv**2) / 2.0, inv**3 / 3.0))


def jet_sqrt(jet: Jet2) -> Jet2:
    g0 = jet.value
    _guard(g0 > 0.0, "sqrt of a non-positive value")
    with np.errstate(divide="ignore", invalid="ignore"):
        g0 = _masked(g0, np.asarray(g0) > 0.0)
        s = np.sqrt(g0)
        return _compose(jet, (s, 0.5 / s, -1.0 / (8.0 * s * g0), 1.0 / (16.0 * s * g0 * g0)))


def jet_pow_const(jet: Jet2, p) -> Jet2:
    """jet ** p for a constant exponent.

    Integer p (|p| <= 1000) is lowered to repeated multiplication, which is
    exact for polynomial data and places no sign restriction on the base.
    Non-integer p requires a positive base.
    """
    p = float(p)
    if p == round(p) and abs(p) <= 1000:
        n = int(round(p))
        if n == 0:
            return Jet2.constant(np.ones(np.broadcast_shapes(jet.shape)))
        base = jet if n > 0 else _reciprocal(jet)
        n = abs(n)
        result = None
        power = base
        while n:
            if n & 1:
                result = power if result is None else result * power
            n >>= 1
            if n:
                power = power * power
        return result
    g0 = jet.value
    _guard(g0 > 0.0, "non-integer power of a non-positive base")
    with np.errstate(divide="ignore", invalid="ignore"):
        g0 = _masked(g0, np.asarray(g0) > 0.0)
        f0 = g0**p
        return _compose(
            jet,
            (
                f0,
                p * g0 ** (p - 1),
                p * (p - 1) * g0 ** (p - 2) / 2.0,
                p * (p - 1) * (p - 2) * g0 ** (p - 3) / 6.0,
            ),
        )


JET_FUNCS = {
    "sin": jet_sin,
    "cos": jet_cos,
    "tan": jet_tan,
    "sinh": jet_sinh,
    "cosh": jet_cosh,
    "tanh": jet_tanh,
    "exp": jet_exp,
    "ln": jet_ln,
    "sqrt": jet_sqrt,
}


def jet_arith(a: Jet2, b: Jet2, op: str) -> Jet2:
    """Binary jet arithmetic: op is one of '+', '-', '*', '/'."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def fd_oracle(f, u0, v0, h: float = 1e-3, richardson: bool = False) -> Jet2:
    """Approximate jet of ``f`` at (u0, v0) from central differences.

    ``f`` must be evaluable on the 7x7 stencil (offsets up to 3h in each
    direction) around the point and accept array arguments if u0/v0 are
    arrays.  All slots are O(h^2) accurate; with ``richardson=True`` the
    first- and second-order slots are refined to O(h^4) by extrapolating
    the h and 2h estimates.
    """
    u0 = np.asarray(u0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def F(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = np.asarray(f(u0 + i * h, v0 + j * h), dtype=float)
        return cache[(i, j)]

    def slots_at(step):
        du = (F(step, 0) - F(-step, 0)) / (2 * step * h)
        dv = (F(0, step) - F(0, -step)) / (2 * step * h)
        duu = (F(step, 0) - 2 * F(0, 0) + F(-step, 0)) / (step * h) ** 2
        dvv = (F(0, step) - 2 * F(0, 0) + F(0, -step)) / (step * h) ** 2
        duv = (F(step, step) - F(step, -step) - F(-step, step) + F(-step, -step)) / (
            4 * (step * h) ** 2
        )
        return du, dv, duu, duv, dvv

    du, dv, duu, duv, dvv = slots_at(1)
    if richardson:
        du2, dv2, duu2, duv2, dvv2 = slots_at(2)
        du = (4 * du - du2) / 3
        dv = (4 * dv - dv2) / 3
        duu = (4 * duu - duu2) / 3
        duv = (4 * duv - duv2) / 3
        dvv = (4 * dvv - dvv2) / 3

    h3 = h**3
    duuu = (F(2, 0) - 2 * F(1, 0) + 2 * F(-1, 0) - F(-2, 0)) / (2 * h3)
    dvvv = (F(0, 2) - 2 * F(0, 1) + 2 * F(0, -1) - F(0, -2)) / (2 * h3)
    duuv = (F(1, 1) - F(1, -1) - 2 * F(0, 1) + 2 * F(0, -1) + F(-1, 1) - F(-1, -1)) / (2 * h3)
    duvv = (F(1, 1) + F(1, -1) - 2 * F(1, 0) - F(-1, 1) - F(-1, -1) + 2 * F(-1, 0)) / (2 * h3)

    d = np.stack(
        [np.broadcast_to(np.asarray(s, dtype=float), np.broadcast_shapes(u0.shape, v0.shape))
         for s in (F(0, 0), du, dv, duu, duv, dvv, duuu, duuv, duvv, dvvv)],
        axis=-1,
    )
    return Jet2(d)
