"""Per-point geometry of space-like surfaces in the de Sitter space-time
S^4_1(1) inside E^5_1.

Conventions (fixed once, validated by the cross-checks in the test suite):

* frame order (e1, e2, e3, e4, x) with Gram matrix diag(1, 1, -1, 1, 1):
  e1, e2 span the tangent plane (Gram-Schmidt on x_u, x_v), e3 is the
  time-like normal, e4 the space-like normal, and the position x is the
  unit normal of S^4_1(1) in E^5_1;
* the basis (e1, e2, e3, e4, x) is positively oriented;
* the normal-frame completion tries coordinate axes in descending order of
  their rejection from span{x, e1, e2}; the choice ("plan") is frozen at a
  reference point and replayed at every grid point of a run so the frame
  field stays smooth;
* curvature tensors use R(X,Y) = D_X D_Y - D_Y D_X - D_[X,Y];
* the Laplacian is the geometer's positive one, -div grad, so the
  coordinate functions of a unit 2-sphere satisfy lap x = 2 x.

Everything is computed from order-3 jets of the parametrization, batched
over all sample points at once; the ``*_at`` wrappers expose single-point
results and raise descriptive errors for invalid points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dsl import SurfaceSpec, eval_value, sample_grid
from .jets import Jet2, fd_oracle
from .minkowski import PIVOT_RTOL, DegenerateFrame, Signature, completion_order, inner

MEMBERSHIP_TOL = 1e-9
# frame orthogonality: exact-to-roundoff with jets; O(h^2) against the
# position vector with finite differences
ORTHO_TOL = {"jet": 1e-9, "fd": 1e-4}

EPS_FRAME = (1.0, 1.0, -1.0, 1.0, 1.0)  # signs of (e1, e2, e3, e4, x)


class GeometryError(Exception):
    pass


class NotInDeSitter(GeometryError):
    pass


class NotSpacelike(GeometryError):
    pass


class FrameDiscontinuity(GeometryError):
    pass


_REASON_EXC = {
    "NotInDeSitter": NotInDeSitter,
    "NotSpacelike": NotSpacelike,
    "DegenerateFrame": lambda msg: DegenerateFrame(-1, msg),
    "FrameDiscontinuity": FrameDiscontinuity,
    "NonFinite": GeometryError,
}


# --- jet-vector helpers ---------------------------------------------------


def jv_inner(weights, a: list[Jet2], b: list[Jet2]) -> Jet2:
    acc = None
    for w, x, y in zip(weights, a, b):
        term = x * y
        if w < 0:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def jv_values(a: list[Jet2]) -> np.ndarray:
    return np.stack([c.value for c in a], axis=0)


def _jv_combine(scalars_and_vecs) -> list[Jet2]:
    """sum_k s_k * V_k for (scalar jet, jet vector) pairs."""
    out = None
    for s, vec in scalars_and_vecs:
        term = [s * c for c in vec]
        out = term if out is None else [o + t for o, t in zip(out, term)]
    return out


def _vals_inner(weights, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Indefinite inner product of value vectors of shape (m, n)."""
    return (a * b * np.asarray(weights)[:, None]).sum(axis=0)


@dataclass(frozen=True)
class CompletionPlan:
    """Frozen normal-frame completion: which axes, which pivot signs, and
    the orientation fixes chosen at the reference point."""

    axes: tuple[int, int]
    pivot_signs: tuple[float, float]
    timelike_first: bool
    flip_e4: bool


@dataclass
class FrameField:
    """Adapted frames and metric data at a batch of sample points."""

    spec: SurfaceSpec
    mode: str
    u: np.ndarray
    v: np.ndarray
    x: list[Jet2]
    e: list[list[Jet2]] | None  # [e1, e2, e3, e4]
    coef: list[tuple[Jet2, Jet2]] | None  # (a_i, b_i) with e_i = a_i d/du + b_i d/dv
    Ej: Jet2
    Fj: Jet2
    Gj: Jet2
    detg: Jet2
    plan: CompletionPlan | None
    valid: np.ndarray
    reasons: list[str | None]
    membership_defect: np.ndarray
    gram_defect: np.ndarray | None

    @property
    def npoints(self) -> int:
        return self.u.shape[0]

    def dbar(self, i: int, vec: list[Jet2]) -> list[Jet2]:
        """Ambient directional derivative of a jet-vector field along e_i (i = 0 or 1)."""
        a, b = self.coef[i]
        return [a * c.d_du() + b * c.d_dv() for c in vec]

    def edir(self, i: int, f: Jet2) -> np.ndarray:
        """Value of the derivation e_i applied to a scalar jet field."""
        a, b = self.coef[i]
        return a.value * f.du + b.value * f.dv

    def normal_project_values(self, w: np.ndarray) -> np.ndarray:
        """Project value vectors (5, n) onto span{e3, e4}."""
        e3 = jv_values(self.e[2])
        e4 = jv_values(self.e[3])
        wts = self.spec.signature.weights
        c3 = _vals_inner(wts, w, e3)
        c4 = _vals_inner(wts, w, e4)
        return -c3[None, :] * e3 + c4[None, :] * e4


def _component_jets(spec: SurfaceSpec, U, V, mode: str, fd_step: float) -> list[Jet2]:
    if mode == "jet":
        return spec.component_jets(U, V)
    if mode == "fd":
        jets = []
        for comp in spec.components:
            f = lambda uu, vv, _c=comp: eval_value(_c, uu, vv, spec.params)
            jets.append(fd_oracle(f, U, V, h=fd_step))
        return jets
    raise ValueError(f"unknown differentiation mode {mode!r}")


def build_frames(
    spec: SurfaceSpec,
    U=None,
    V=None,
    mode: str = "jet",
    fd_step: float = 1e-3,
    membership_tol: float = MEMBERSHIP_TOL,
    plan: CompletionPlan | None = None,
) -> FrameField:
    """Construct adapted frames at a batch of points (default: the spec grid).

    Points failing any validity check (de Sitter membership, space-likeness,
    frame degeneracy, non-finite data) are masked with a per-point reason
    rather than failing the batch.
    """
    if (spec.signature.dim, spec.signature.index) != (5, 1):
        raise GeometryError("surface geometry requires ambient signature (dim, index) = (5, 1)")
    sig = spec.signature
    if U is None or V is None:
        U, V = sample_grid(spec)
    U = np.atleast_1d(np.asarray(U, dtype=float))
    V = np.atleast_1d(np.asarray(V, dtype=float))
    n = U.shape[0]
    wts = sig.weights

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = _component_jets(spec, U, V, mode, fd_step)
        xu = [c.d_du() for c in x]
        xv = [c.d_dv() for c in x]

        member = np.abs(jv_inner(wts, x, x).value - 1.0)
        reasons: list[str | None] = [None] * n
        valid = np.isfinite(member) & (member <= membership_tol)
        for i in np.nonzero(~valid)[0]:
            reasons[i] = "NotInDeSitter"

        Ej = jv_inner(wts, xu, xu)
        Fj = jv_inner(wts, xu, xv)
        Gj = jv_inner(wts, xv, xv)
        detg = Ej * Gj - Fj * Fj
        spacelike = (Ej.value > 0) & (detg.value > 0)
        for i in np.nonzero(valid & ~spacelike)[0]:
            reasons[i] = "NotSpacelike"
        valid &= spacelike

        if not valid.any():
            return FrameField(
                spec, mode, U, V, x, None, None, Ej, Fj, Gj, detg, None, valid, reasons,
                member, None,
            )

        from .jets import jet_sqrt

        sqrtE = jet_sqrt(Ej)
        a1 = 1.0 / sqrtE
        b1 = Jet2.constant(np.zeros(n))
        e1 = [a1 * c for c in xu]
        cF = Fj / Ej
        w = [cv - cF * cu for cu, cv in zip(xu, xv)]
        Wj = jv_inner(wts, w, w)
        sqrtW = jet_sqrt(Wj)
        b2 = 1.0 / sqrtW
        a2 = -cF * b2
        e2 = [b2 * c for c in w]

        # freeze the completion plan at the first valid point
        if plan is None:
            plan = _choose_plan(sig, x, e1, e2, valid, reasons)
        if plan is None:
            return FrameField(
                spec, mode, U, V, x, None, None, Ej, Fj, Gj, detg, None,
                np.zeros(n, dtype=bool), reasons, member, None,
            )

        e3, e4, pivot_ok = _replay_plan(sig, plan, x, e1, e2)
        for i in np.nonzero(valid & ~pivot_ok)[0]:
            reasons[i] = "DegenerateFrame"
        valid &= pivot_ok

        frames = [e1, e2, e3, e4, x]
        gram_defect = _gram_defect(wts, frames)
        finite = np.isfinite(gram_defect)
        ortho = finite & (gram_defect <= ORTHO_TOL)
        for i in np.nonzero(valid & ~finite)[0]:
            reasons[i] = "NonFinite"
        for i in np.nonzero(valid & finite & ~ortho)[0]:
            reasons[i] = "FrameDiscontinuity"
        valid &= ortho

    return FrameField(
        spec=spec,
        mode=mode,
        u=U,
        v=V,
        x=x,
        e=[e1, e2, e3, e4],
        coef=[(a1, b1), (a2, b2)],
        Ej=Ej,
        Fj=Fj,
        Gj=Gj,
        detg=detg,
        plan=plan,
        valid=valid,
        reasons=reasons,
        membership_defect=member,
        gram_defect=gram_defect,
    )


def _choose_plan(sig, x, e1, e2, valid, reasons) -> CompletionPlan | None:
    """Pick completion axes / signs / orientation at the first valid point."""
    for ref in np.nonzero(valid)[0]:
        partial = [jv_values(vec)[:, ref] for vec in (x, e1, e2)]
        if not all(np.isfinite(p).all() for p in partial):
            continue
        signs = [1.0, 1.0, 1.0]
        frame = list(partial)
        fsigns = list(signs)
        chosen: list[tuple[int, float]] = []
        for a in completion_order(sig, partial, signs):
            if len(chosen) == 2:
                break
            axis = np.zeros(sig.dim)
            axis[a] = 1.0
            r = axis.copy()
            for f, s in zip(frame, fsigns):
                r -= s * inner(sig, r, f) * f
            l1 = float(np.abs(r).sum())
            nrm = float(inner(sig, r, r))
            if l1 <= PIVOT_RTOL or abs(nrm) < PIVOT_RTOL * l1 * l1:
                continue
            s = 1.0 if nrm > 0 else -1.0
            frame.append(r / np.sqrt(abs(nrm)))
            fsigns.append(s)
            chosen.append((a, s))
        if len(chosen) != 2:
            reasons[ref] = "DegenerateFrame"
            continue
        (k1, s1), (k2, s2) = chosen
        timelike_first = s1 < 0
        f1, f2 = frame[3], frame[4]
        e3v, e4v = (f1, f2) if timelike_first else (f2, f1)
        det = np.linalg.det(np.stack([partial[1], partial[2], e3v, e4v, partial[0]]))
        return CompletionPlan(
            axes=(k1, k2), pivot_signs=(s1, s2), timelike_first=timelike_first,
            flip_e4=det < 0,
        )
    return None


def _replay_plan(sig, plan: CompletionPlan, x, e1, e2):
    """Re-run the frozen completion in jet arithmetic at every point."""
    from .jets import jet_sqrt

    wts = sig.weights
    n = x[0].value.shape[0]
    base = [(x, 1.0), (e1, 1.0), (e2, 1.0)]
    pivot_ok = np.ones(n, dtype=bool)

    def reject(axis_idx, extra):
        vec = [Jet2.constant(np.full(n, 1.0 if c == axis_idx else 0.0)) for c in range(sig.dim)]
        for b, s in base + extra:
            coef = jv_inner(wts, vec, b)
            if s < 0:
                coef = -coef
            vec = [c - coef * bc for c, bc in zip(vec, b)]
        return vec

    def normalize(vec, sign):
        nonlocal pivot_ok
        nrm = jv_inner(wts, vec, vec)
        l1 = np.abs(jv_values(vec)).sum(axis=0)
        ok = np.isfinite(nrm.value) & (l1 > PIVOT_RTOL) & (np.abs(nrm.value) >= PIVOT_RTOL * l1 * l1)
        ok &= (np.sign(nrm.value) == sign)
        pivot_ok &= ok
        mag = jet_sqrt(nrm if sign > 0 else -nrm)
        return [c / mag for c in vec], ok

    (k1, k2) = plan.axes
    (s1, s2) = plan.pivot_signs
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        f1, _ = normalize(reject(k1, []), s1)
        f2, _ = normalize(reject(k2, [(f1, s1)]), s2)
        e3, e4 = (f1, f2) if plan.timelike_first else (f2, f1)
        if plan.flip_e4:
            e4 = [-c for c in e4]
    return e3, e4, pivot_ok


def _gram_defect(wts, frames) -> np.ndarray:
    vals = [jv_values(f) for f in frames]
    target = EPS_FRAME
    n = vals[0].shape[1]
    defect = np.zeros(n)
    for i in range(5):
        for j in range(i, 5):
            g = _vals_inner(wts, vals[i], vals[j])
            want = target[i] if i == j else 0.0
            defect = np.maximum(defect, np.abs(g - want))
    return defect


# --- shape data ------------------------------------------------------------


@dataclass
class ShapeField:
    """Second-order data of the surface inside S^4_1(1), batched."""

    h_vals: dict  # (i,j) -> (5, n) second fundamental form values
    h_jets: dict  # (i,j) -> list[Jet2]
    s: dict  # (alpha, i, j) -> Jet2, alpha in (3, 4): <Dbar_{e_i} e_j, e_alpha>
    H_jets: list[Jet2]
    H_vals: np.ndarray  # (5, n)
    HH: np.ndarray  # <H, H>
    K: np.ndarray  # Gauss curvature via the curvature-one ambient relation
    om12: list[Jet2]  # connection form on the tangent frame, per direction
    om34: list[Jet2]  # normal connection form, per direction
    RD: np.ndarray  # <R^D(e1,e2)e3, e4>
    DH: list[np.ndarray]  # [D_{e1}H, D_{e2}H] as (5, n)
    A3: np.ndarray  # (2, 2, n) shape operator along e3
    A4: np.ndarray
    h_sym_defect: np.ndarray


def shape_fields(ff: FrameField) -> ShapeField:
    sig = ff.spec.signature
    wts = sig.weights
    e1, e2, e3, e4 = ff.e
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        de = {}
        for i, _ in ((0, e1), (1, e2)):
            for j, ej in ((0, e1), (1, e2)):
                de[(i, j)] = ff.dbar(i, ej)

        s: dict = {}
        for (i, j), d in de.items():
            s[(3, i, j)] = jv_inner(wts, d, e3)
            s[(4, i, j)] = jv_inner(wts, d, e4)

        h_jets = {}
        for (i, j) in ((0, 0), (0, 1), (1, 1)):
            h_jets[(i, j)] = _jv_combine([(-s[(3, i, j)], e3), (s[(4, i, j)], e4)])
        h_vals = {k: jv_values(vecs) for k, vecs in h_jets.items()}

        sym = _jv_combine([(-s[(3, 1, 0)], e3), (s[(4, 1, 0)], e4)])
        h_sym_defect = np.linalg.norm(h_vals[(0, 1)] - jv_values(sym), axis=0)

        H_jets = [(a + b) * 0.5 for a, b in zip(h_jets[(0, 0)], h_jets[(1, 1)])]
        H_vals = jv_values(H_jets)
        H3 = 0.5 * (s[(3, 0, 0)].value + s[(3, 1, 1)].value)
        H4 = 0.5 * (s[(4, 0, 0)].value + s[(4, 1, 1)].value)
        HH = -H3 * H3 + H4 * H4

        def minor(alpha):
            return (
                s[(alpha, 0, 0)].value * s[(alpha, 1, 1)].value
                - s[(alpha, 0, 1)].value ** 2
            )

        K = 1.0 - minor(3) + minor(4)

        om12 = [jv_inner(wts, ff.dbar(i, e1), e2) for i in (0, 1)]
        om34 = [jv_inner(wts, ff.dbar(i, e3), e4) for i in (0, 1)]
        RD = (
            ff.edir(0, om34[1])
            - ff.edir(1, om34[0])
            + om12[0].value * om34[0].value
            + om12[1].value * om34[1].value
        )

        DH = []
        for i in (0, 1):
            d = jv_values(ff.dbar(i, H_jets))
            DH.append(ff.normal_project_values(d))

        A3 = np.empty((2, 2, ff.npoints))
        A4 = np.empty((2, 2, ff.npoints))
        for i in (0, 1):
            for j in (0, 1):
                key = (min(i, j), max(i, j))
                A3[i, j] = s[(3,) + key].value
                A4[i, j] = s[(4,) + key].value

    return ShapeField(
        h_vals=h_vals, h_jets=h_jets, s=s, H_jets=H_jets, H_vals=H_vals, HH=HH, K=K,
        om12=om12, om34=om34, RD=RD, DH=DH, A3=A3, A4=A4, h_sym_defect=h_sym_defect,
    )


@dataclass
class AmbientField:
    """Second-order data of the surface as a codimension-3 submanifold of
    E^5_1, normal frame (e3, e4, x) with signs (-1, +1, +1)."""

    shat: dict  # (a, i, j) -> Jet2 for a in (3, 4, 5)
    hhat_vals: dict  # (i,j) -> (5, n)
    Hhat_jets: list[Jet2]
    Hhat_vals: np.ndarray
    hnorm2: np.ndarray  # squared norm of the ambient second fundamental form
    omhat: dict  # (a, b) -> [Jet2, Jet2] connection forms, a < b in (3,4,5)
    RDhat: dict  # (a, b) -> (n,)
    DHhat: list[np.ndarray]


_AMB_EPS = {3: -1.0, 4: 1.0, 5: 1.0}
_AMB_PAIRS = ((3, 4), (3, 5), (4, 5))


def ambient_fields(ff: FrameField) -> AmbientField:
    sig = ff.spec.signature
    wts = sig.weights
    e1, e2, e3, e4 = ff.e
    fnorm = {3: e3, 4: e4, 5: ff.x}
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        de = {(i, j): ff.dbar(i, [e1, e2][j]) for i in (0, 1) for j in (0, 1)}
        shat = {}
        for (i, j), d in de.items():
            for a in (3, 4, 5):
                shat[(a, i, j)] = jv_inner(wts, d, fnorm[a])

        hhat_jets = {}
        for (i, j) in ((0, 0), (0, 1), (1, 1)):
            hhat_jets[(i, j)] = _jv_combine(
                [(_AMB_EPS[a] * shat[(a, i, j)], fnorm[a]) for a in (3, 4, 5)]
            )
        hhat_vals = {k: jv_values(v) for k, v in hhat_jets.items()}

        Hhat_jets = [(a + b) * 0.5 for a, b in zip(hhat_jets[(0, 0)], hhat_jets[(1, 1)])]
        Hhat_vals = jv_values(Hhat_jets)

        hnorm2 = 0.0
        for (i, j) in ((0, 0), (0, 1), (1, 0), (1, 1)):
            key = (min(i, j), max(i, j))
            for a in (3, 4, 5):
                hnorm2 = hnorm2 + _AMB_EPS[a] * shat[(a,) + key].value ** 2

        omhat = {}
        for (a, b) in _AMB_PAIRS:
            omhat[(a, b)] = [jv_inner(wts, ff.dbar(i, fnorm[a]), fnorm[b]) for i in (0, 1)]

        om12 = [jv_inner(wts, ff.dbar(i, e1), e2) for i in (0, 1)]

        def om_val(a, b, i):
            if a == b:
                return 0.0
            if a < b:
                return omhat[(a, b)][i].value
            return -omhat[(b, a)][i].value

        RDhat = {}
        for (a, b) in _AMB_PAIRS:
            f = omhat[(a, b)]
            val = (
                ff.edir(0, f[1])
                - ff.edir(1, f[0])
                + om12[0].value * f[0].value
                + om12[1].value * f[1].value
            )
            for c in (3, 4, 5):
                if c in (a, b):
                    continue
                val = val + _AMB_EPS[c] * (om_val(a, c, 0) * om_val(c, b, 1) - om_val(a, c, 1) * om_val(c, b, 0))
            RDhat[(a, b)] = val

        DHhat = []
        for i in (0, 1):
            d = jv_values(ff.dbar(i, Hhat_jets))
            out = np.zeros_like(d)
            for a in (3, 4, 5):
                fa = jv_values(fnorm[a])
                coef = _vals_inner(wts, d, fa)
                out += _AMB_EPS[a] * coef[None, :] * fa
            DHhat.append(out)

    return AmbientField(
        shat=shat, hhat_vals=hhat_vals, Hhat_jets=Hhat_jets, Hhat_vals=Hhat_vals,
        hnorm2=hnorm2, omhat=omhat, RDhat=RDhat, DHhat=DHhat,
    )


def codazzi_field(ff: FrameField, sf: ShapeField | None = None) -> np.ndarray:
    """Residual of the Codazzi identity (should vanish for any surface)."""
    if sf is None:
        sf = shape_fields(ff)
    wts = ff.spec.signature.weights
    e1, e2 = ff.e[0], ff.e[1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        nabla = {}
        for i in (0, 1):
            for j in (0, 1):
                d = ff.dbar(i, [e1, e2][j])
                nabla[(i, j)] = (
                    jv_inner(wts, d, e1).value,
                    jv_inner(wts, d, e2).value,
                )

        def h_of(cvec, z):
            c1, c2 = cvec
            key1 = (min(0, z), max(0, z))
            key2 = (min(1, z), max(1, z))
            return c1[None, :] * sf.h_vals[key1] + c2[None, :] * sf.h_vals[key2]

        def side(xdir, ydir, z):
            hyz = sf.h_jets[(min(ydir, z), max(ydir, z))]
            dcov = ff.normal_project_values(jv_values(ff.dbar(xdir, hyz)))
            return dcov - h_of(nabla[(xdir, ydir)], z) - h_of(nabla[(xdir, z)], ydir)

        res = np.zeros(ff.npoints)
        for z in (0, 1):
            diff = side(0, 1, z) - side(1, 0, z)
            res = np.maximum(res, np.linalg.norm(diff, axis=0))
    return res


def brioschi_field(ff: FrameField) -> np.ndarray:
    """Gauss curvature from the first fundamental form alone."""
    E, F, G = ff.Ej, ff.Fj, ff.Gj

    def det3(a, b, c, d, e, f, g, h, i):
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        m1 = det3(
            -0.5 * E.dvv + F.duv - 0.5 * G.duu, 0.5 * E.du, F.du - 0.5 * E.dv,
            F.dv - 0.5 * G.du, E.value, F.value,
            0.5 * G.dv, F.value, G.value,
        )
        m2 = det3(
            0.0, 0.5 * E.dv, 0.5 * G.du,
            0.5 * E.dv, E.value, F.value,
            0.5 * G.du, F.value, G.value,
        )
        return (m1 - m2) / ff.detg.value**2


def laplace_beltrami(ff: FrameField, phi: Jet2) -> np.ndarray:
    """Positive Laplacian (-div grad) of a scalar jet field, point values."""
    from .jets import jet_sqrt

    E, F, G, detg = ff.Ej, ff.Fj, ff.Gj, ff.detg
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        w = jet_sqrt(detg)
        pu, pv = phi.d_du(), phi.d_dv()
        gu = (G * pu - F * pv) / detg
        gv = (E * pv - F * pu) / detg
        div = (w * gu).d_du().value + (w * gv).d_dv().value
        return -div / w.value


# --- scalar wrappers --------------------------------------------------------


@dataclass
class FramedPoint:
    """Adapted frame and metric data at a single parameter point."""

    u: float
    v: float
    x: np.ndarray
    jets: list[Jet2]
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    g: np.ndarray
    eps: tuple = EPS_FRAME
    _field: FrameField | None = field(default=None, repr=False)


@dataclass
class ShapeData:
    """Second-order data of the surface in S^4_1(1) at one point."""

    h: dict  # (i, j) -> (5,) for (1,1),(1,2),(2,2) in 0-based keys
    H: np.ndarray
    K: float
    omega12: tuple[float, float]
    omega34: tuple[float, float]
    RD: float
    DH: tuple[np.ndarray, np.ndarray]
    A3: np.ndarray
    A4: np.ndarray


@dataclass
class AmbientShapeData:
    """Second-order data of the surface in E^5_1 at one point."""

    hhat: dict
    Hhat: np.ndarray
    RDhat: dict  # (a, b) -> float over pairs of (e3, e4, x)
    DHhat: tuple[np.ndarray, np.ndarray]
    hnorm2: float


def _field_at(spec: SurfaceSpec, u0: float, v0: float, mode: str, fd_step: float) -> FrameField:
    ff = build_frames(spec, np.array([u0]), np.array([v0]), mode=mode, fd_step=fd_step)
    if not ff.valid[0]:
        reason = ff.reasons[0] or "NonFinite"
        exc = _REASON_EXC[reason]
        if reason == "NotInDeSitter":
            raise NotInDeSitter(
                f"|<x,x>-1| = {ff.membership_defect[0]:.3e} at (u,v)=({u0},{v0})"
            )
        if reason == "DegenerateFrame":
            raise DegenerateFrame(-1, f"degenerate frame at (u,v)=({u0},{v0})")
        raise exc(f"{reason} at (u,v)=({u0},{v0})")
    return ff


def frame_at(spec: SurfaceSpec, u0: float, v0: float, mode: str = "jet", fd_step: float = 1e-3) -> FramedPoint:
    """Adapted frame at one interior parameter point."""
    ff = _field_at(spec, u0, v0, mode, fd_step)
    e1, e2, e3, e4 = (jv_values(vec)[:, 0] for vec in ff.e)
    g = np.array([[ff.Ej.value[0], ff.Fj.value[0]], [ff.Fj.value[0], ff.Gj.value[0]]])
    return FramedPoint(
        u=u0, v=v0, x=jv_values(ff.x)[:, 0], jets=ff.x, e1=e1, e2=e2, e3=e3, e4=e4,
        g=g, _field=ff,
    )


def shape_at(p: FramedPoint) -> ShapeData:
    ff = p._field
    sf = shape_fields(ff)
    return ShapeData(
        h={k: v[:, 0] for k, v in sf.h_vals.items()},
        H=sf.H_vals[:, 0],
        K=float(sf.K[0]),
        omega12=(float(sf.om12[0].value[0]), float(sf.om12[1].value[0])),
        omega34=(float(sf.om34[0].value[0]), float(sf.om34[1].value[0])),
        RD=float(sf.RD[0]),
        DH=(sf.DH[0][:, 0], sf.DH[1][:, 0]),
        A3=sf.A3[:, :, 0],
        A4=sf.A4[:, :, 0],
    )


def ambient_shape_at(p: FramedPoint) -> AmbientShapeData:
    ff = p._field
    af = ambient_fields(ff)
    return AmbientShapeData(
        hhat={k: v[:, 0] for k, v in af.hhat_vals.items()},
        Hhat=af.Hhat_vals[:, 0],
        RDhat={k: float(v[0]) for k, v in af.RDhat.items()},
        DHhat=(af.DHhat[0][:, 0], af.DHhat[1][:, 0]),
        hnorm2=float(af.hnorm2[0]),
    )


def codazzi_residual(spec: SurfaceSpec, u0: float, v0: float, mode: str = "jet") -> float:
    ff = _field_at(spec, u0, v0, mode, 1e-3)
    return float(codazzi_field(ff)[0])


def gauss_curvature_brioschi(spec: SurfaceSpec, u0: float, v0: float, mode: str = "jet") -> float:
    ff = _field_at(spec, u0, v0, mode, 1e-3)
    return float(brioschi_field(ff)[0])


# --- hypersphere-slice probe -------------------------------------------------


@dataclass
class ProbeReport:
    """Diagnostics for the field xi = <c0,x> x - c0 over the sample set.

    All quantities are maxima / statistics over the valid sample points;
    the probe measures and reports, it never asserts.
    """

    c0: np.ndarray
    tangency_max: float  # max |<c0, e_i>|
    pairing_mean: float  # mean of <x, c0>
    pairing_std: float  # std of <x, c0>
    parallelism_max: float  # max ||D_X xi||
    shape_defect_max: float  # max ||A_xi + <c0,x> I||
    xi_norm_mean: float  # mean of <xi, xi>
    xi_norm_std: float
    n_valid: int


def sphere_intersection_probe(
    spec: SurfaceSpec, c0, U=None, V=None, mode: str = "jet"
) -> ProbeReport:
    c0 = np.asarray(c0, dtype=float)
    if c0.shape != (spec.signature.dim,) or not np.any(c0):
        raise ValueError("c0 must be a non-zero ambient vector")
    ff = build_frames(spec, U, V, mode=mode)
    if ff.e is None or not ff.valid.any():
        raise GeometryError("no valid sample points for the probe")
    sf = shape_fields(ff)
    wts = spec.signature.weights
    m = ff.valid

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        c0_jets = [Jet2.constant(np.full(ff.npoints, c)) for c in c0]
        kj = jv_inner(wts, ff.x, c0_jets)
        k = kj.value

        e1v, e2v = jv_values(ff.e[0]), jv_values(ff.e[1])
        tang = np.maximum(
            np.abs(_vals_inner(wts, e1v, c0[:, None] * np.ones(ff.npoints))),
            np.abs(_vals_inner(wts, e2v, c0[:, None] * np.ones(ff.npoints))),
        )

        xi_jets = [kj * xc - c for xc, c in zip(ff.x, c0_jets)]
        xi_vals = jv_values(xi_jets)
        xi_norm = _vals_inner(wts, xi_vals, xi_vals)

        par = np.zeros(ff.npoints)
        for i in (0, 1):
            dxi = ff.normal_project_values(jv_values(ff.dbar(i, xi_jets)))
            par = np.maximum(par, np.linalg.norm(dxi, axis=0))

        shape_def = np.zeros(ff.npoints)
        axi = np.empty((2, 2, ff.npoints))
        for i in (0, 1):
            for j in (0, 1):
                key = (min(i, j), max(i, j))
                axi[i, j] = _vals_inner(wts, sf.h_vals[key], xi_vals)
        axi[0, 0] += k
        axi[1, 1] += k
        shape_def = np.sqrt((axi**2).sum(axis=(0, 1)))

    return ProbeReport(
        c0=c0,
        tangency_max=float(tang[m].max()),
        pairing_mean=float(k[m].mean()),
        pairing_std=float(k[m].std()),
        parallelism_max=float(par[m].max()),
        shape_defect_max=float(shape_def[m].max()),
        xi_norm_mean=float(xi_norm[m].mean()),
        xi_norm_std=float(xi_norm[m].std()),
        n_valid=int(m.sum()),
    )
