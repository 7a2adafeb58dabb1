"""Relative normalization, shape operator and curvature functions of a hypersurface in R^4.

Everything here works on batched jets: one call processes every point of a
sampling grid. Matrix-valued results are numpy arrays of shape
``(*batch, 3, 3)``; vector values have a trailing axis of length 4. Mixed
tensors are stored with the lower index first, so ``Bmix[..., i, j]`` is the
component B_i^j in ``d_i y = -B_i^j d_j x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import jets
from .cubic import solve_depressed
from .errors import (
    DegenerateImmersion,
    SingularMetric,
    SingularRelativeMetric,
    SingularThirdForm,
    VanishingGaussCurvature,
    ZeroSupport,
)
from .expr import Expression, eval_jet, parse
from .jets import Jet, VecJet

RANK_TOL = 1e-12
KTILDE_TOL = 1e-10
SUPPORT_TOL = 1e-10
RADIUS_TOL = 1e-12


def _raise_at(mask, exc, points):
    """Raise ``exc`` tagged with the first batch point where ``mask`` holds."""
    mask = np.asarray(mask)
    if not np.any(mask):
        return
    if points is not None and mask.ndim:
        k = np.unravel_index(np.argmax(mask), mask.shape)
        exc.point = np.asarray(points)[(slice(None),) + k]
    elif points is not None:
        exc.point = np.asarray(points)
    raise exc


# --- normalization modes -----------------------------------------------------

@dataclass(frozen=True)
class NormalizationMode:
    """How the support function q is chosen.

    ``kind`` is ``"euclidean"`` (q = 1), ``"equiaffine"`` (q = |K~|^(1/5)) or
    ``"custom"`` (q given by an expression in u1, u2, u3).
    """

    kind: str
    q: Optional[Expression] = None
    q_source: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("euclidean", "equiaffine", "custom"):
            raise ValueError(f"unknown normalization mode {self.kind!r}")
        if self.kind == "custom" and self.q is None:
            raise ValueError("custom normalization needs a q expression")

    @classmethod
    def euclidean(cls):
        return cls("euclidean")

    @classmethod
    def equiaffine(cls):
        return cls("equiaffine")

    @classmethod
    def custom(cls, q):
        if isinstance(q, str):
            return cls("custom", parse(q), q)
        return cls("custom", q)

    def describe(self):
        if self.kind == "custom":
            return {"mode": "custom", "q": self.q_source}
        return {"mode": self.kind}


# --- linear algebra usable on jets and arrays alike --------------------------

def det3(m):
    """Determinant of a 3x3 nested sequence (entries may be jets)."""
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def _inverse3(m):
    det = det3(m)
    cof = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    inv_det = 1.0 / det
    return [[cof[j][i] * inv_det for j in range(3)] for i in range(3)], det


def cross4(v1, v2, v3):
    """Vector product in R^4: ``<cross4(v1, v2, v3), w> = det[v1 v2 v3 w]``.

    Accepts VecJets or arrays with a trailing axis of length 4.
    """
    if all(isinstance(v, VecJet) for v in (v1, v2, v3)):
        comps = _cross4_components(v1, v2, v3)
        return VecJet(comps)
    v1, v2, v3 = (np.asarray(v, dtype=float) for v in (v1, v2, v3))
    comps = _cross4_components(*(np.moveaxis(v, -1, 0) for v in (v1, v2, v3)))
    return np.stack(comps, axis=-1)


def _cross4_components(v1, v2, v3):
    out = []
    for k in range(4):
        rows = [i for i in range(4) if i != k]
        minor = det3([[v1[i], v2[i], v3[i]] for i in rows])
        out.append(minor if k % 2 == 1 else -minor)
    return out


def _matrix_values(m):
    return np.stack([np.stack([e.value for e in row], axis=-1) for row in m], axis=-2)


# --- curvature functions ------------------------------------------------------

@dataclass
class CurvatureSet:
    """Relative mean curvature functions and principal data (batched arrays).

    ``kappas`` are sorted descending; entries are NaN where the shape
    operator has a non-real eigenvalue pair (``real`` is False there).
    ``radii`` are NaN where the corresponding curvature vanishes.
    """

    H: np.ndarray
    H2: np.ndarray
    K: np.ndarray
    kappas: np.ndarray
    radii: np.ndarray
    real: np.ndarray

    @property
    def complex_eigenvalues(self):
        return ~self.real

    def at(self, k):
        return CurvatureSet(self.H[k], self.H2[k], self.K[k], self.kappas[k], self.radii[k], self.real[k])


def second_symmetric(m):
    """Sum of the principal 2x2 minors of a (batched) 3x3 matrix."""
    m = np.asarray(m)
    return (
        m[..., 0, 0] * m[..., 1, 1] + m[..., 1, 1] * m[..., 2, 2] + m[..., 2, 2] * m[..., 0, 0]
        - m[..., 0, 1] * m[..., 1, 0] - m[..., 1, 2] * m[..., 2, 1] - m[..., 0, 2] * m[..., 2, 0]
    )


def _radii(kappas):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(np.abs(kappas) > RADIUS_TOL, 1.0 / kappas, np.nan)


def curvature_functions(Bmix):
    """H, H2, K and the relative principal curvatures of a mixed shape operator."""
    Bmix = np.asarray(Bmix, dtype=float)
    H = np.trace(Bmix, axis1=-2, axis2=-1) / 3
    H2 = second_symmetric(Bmix) / 3
    K = np.linalg.det(Bmix)
    # the traceless part keeps p and q of the depressed cubic free of
    # cancellation, so (near-)umbilic points resolve to full precision
    M = Bmix - H[..., None, None] * np.eye(3)
    scale = np.max(np.abs(Bmix), axis=(-2, -1))
    t, real = solve_depressed(second_symmetric(M), -np.linalg.det(M), scale=scale)
    kappas = t + H[..., None]
    return CurvatureSet(H, H2, K, kappas, _radii(kappas), real)


def curvature_set(H, H2, K, kappas):
    """Assemble a CurvatureSet from given functions and principal curvatures."""
    kappas = np.asarray(kappas, dtype=float)
    return CurvatureSet(np.asarray(H, float), np.asarray(H2, float), np.asarray(K, float),
                        kappas, _radii(kappas), ~np.any(np.isnan(kappas), axis=-1))


# --- the frame pipeline -------------------------------------------------------

def unit_normal(x, orientation=1):
    """Unit normal jet ``orientation * cross4(d1 x, d2 x, d3 x) / |...|``."""
    dx = [x.diff(i) for i in range(3)]
    n = cross4(*dx)
    norm2 = n.dot(n)
    _raise_at(np.sqrt(np.abs(norm2.value)) < RANK_TOL,
              DegenerateImmersion("tangent vectors d_i x are linearly dependent"), x.base_point)
    return n * (np.asarray(orientation, dtype=float) / jets.sqrt(norm2))


@dataclass
class FundamentalForms:
    g: list
    h: list
    III: list
    Ktilde: Jet

    @property
    def g_values(self):
        return _matrix_values(self.g)

    @property
    def h_values(self):
        return _matrix_values(self.h)

    @property
    def III_values(self):
        return _matrix_values(self.III)


def fundamental_forms(x, xi):
    """First, second and third fundamental forms and the Gauss curvature, as jets."""
    dx = [x.diff(i) for i in range(3)]
    dxi = [xi.diff(i) for i in range(3)]
    g = [[dx[i].dot(dx[j]) for j in range(3)] for i in range(3)]
    h = [[dx[i].diff(j).dot(xi) for j in range(3)] for i in range(3)]
    III = [[dxi[i].dot(dxi[j]) for j in range(3)] for i in range(3)]
    det_g = det3(g)
    _raise_at(det_g.value < RANK_TOL, SingularMetric("first fundamental form is singular"), x.base_point)
    Ktilde = det3(h) / det_g
    _raise_at(np.abs(Ktilde.value) < KTILDE_TOL,
              VanishingGaussCurvature("Gauss curvature vanishes"), x.base_point)
    return FundamentalForms(g, h, III, Ktilde)


def support_function(mode, Ktilde, point=None, order=jets.DEFAULT_ORDER):
    """Support function q as a jet for the given normalization mode."""
    point = Ktilde.base_point if point is None else point
    if mode.kind == "euclidean":
        q = Jet.constant(np.ones(Ktilde.batch_shape), order, point)
    elif mode.kind == "equiaffine":
        q = jets.absolute(Ktilde) ** (1.0 / 5.0)
    else:
        q = eval_jet(mode.q, point, order)
    _raise_at(np.abs(q.value) < SUPPORT_TOL, ZeroSupport("support function q vanishes"), point)
    return q


def relative_normal(xi, q, III):
    """Relative normalization ``y = III^(ij) d_i q d_j xi + q xi``.

    The tangential part is the Beltrami operator of q against the unit
    normal; it is the unique choice making every ``d_i y`` tangent.
    """
    inv, det = _inverse3(III)
    _raise_at(np.abs(det.value) < RANK_TOL, SingularThirdForm("third fundamental form is singular"),
              xi.base_point)
    if q.is_constant():
        return xi * q.value
    dq = [q.diff(i) for i in range(3)]
    dxi = [xi.diff(j) for j in range(3)]
    y = xi * q
    for j in range(3):
        c = inv[0][j] * dq[0] + inv[1][j] * dq[1] + inv[2][j] * dq[2]
        y = y + dxi[j] * c
    return y


def relative_b_forms(x, y, X, h, q):
    """Relative metric G, B-form and mixed shape operator B_i^j.

    ``h`` and ``q`` are point values (arrays). B_i^j comes from a least-squares
    solve of the Weingarten equations against the tangent frame; the
    index-raised ``B G^-1`` is returned alongside as an independent path.
    """
    q = np.asarray(q, dtype=float)
    G = np.asarray(h) / q[..., None, None]
    detG = np.linalg.det(G)
    _raise_at(np.abs(detG) < RANK_TOL, SingularRelativeMetric("relative metric is singular"), x.base_point)
    tangent = np.stack([x.diff(i).value for i in range(3)], axis=-2)
    dy = np.stack([y.diff(i).value for i in range(3)], axis=-2)
    dX = np.stack([X.diff(i).value for i in range(3)], axis=-2)
    B = dy @ np.swapaxes(dX, -1, -2)
    Bmix = -dy @ np.linalg.pinv(tangent)
    Bmix_raised = B @ np.linalg.inv(G)
    return G, B, Bmix, Bmix_raised


@dataclass
class RelativeFrame:
    """Relative geometry of a hypersurface at a batch of parameter points."""

    x: VecJet
    xi_jet: VecJet
    q_jet: Jet
    y: VecJet
    X: VecJet
    g: np.ndarray
    h: np.ndarray
    III: np.ndarray
    G: np.ndarray
    B: np.ndarray
    Bmix: np.ndarray
    Bmix_raised: np.ndarray
    Ktilde: np.ndarray
    orientation: np.ndarray
    curvatures: CurvatureSet

    @property
    def xi(self):
        return self.xi_jet.value

    @property
    def q(self):
        return self.q_jet.value

    @property
    def points(self):
        return self.x.base_point

    @property
    def tangent(self):
        return np.stack([self.x.diff(i).value for i in range(3)], axis=-2)

    @property
    def dy(self):
        return np.stack([self.y.diff(i).value for i in range(3)], axis=-2)


def build_frame(x, mode=None, orientation=1, y=None):
    """Run the full pipeline on the immersion jet ``x``.

    Either ``mode`` (support function -> relative normal) or an explicit
    relative normalization ``y`` must be given; the latter re-normalizes a
    hypersurface by an existing field, as for relatively parallel ones.
    """
    if (mode is None) == (y is None):
        raise ValueError("give exactly one of mode or y")
    xi = unit_normal(x, orientation)
    ff = fundamental_forms(x, xi)
    if y is None:
        q = support_function(mode, ff.Ktilde, x.base_point, x.order)
        y = relative_normal(xi, q, ff.III)
    else:
        q = xi.dot(y)
        _raise_at(np.abs(q.value) < SUPPORT_TOL, ZeroSupport("support function q vanishes"), x.base_point)
    X = xi / q
    h = ff.h_values
    G, B, Bmix, Bmix_raised = relative_b_forms(x, y, X, h, q.value)
    return RelativeFrame(
        x=x, xi_jet=xi, q_jet=q, y=y, X=X,
        g=ff.g_values, h=h, III=ff.III_values, G=G, B=B, Bmix=Bmix, Bmix_raised=Bmix_raised,
        Ktilde=ff.Ktilde.value,
        orientation=np.broadcast_to(np.asarray(orientation, dtype=float), q.batch_shape),
        curvatures=curvature_functions(Bmix),
    )


def euclidean_shape_operator(frame):
    """Classical shape operator h_i^j = h_ik g^kj."""
    return frame.h @ np.linalg.inv(frame.g)


def auto_orientation(x):
    """Orientation (+1/-1) making the second fundamental form positive at ``x``.

    Definite forms decide directly; for indefinite ones the sign of the
    Euclidean mean curvature is used (+1 on a tie).
    """
    xi = unit_normal(x, 1)
    dx = [x.diff(i) for i in range(3)]
    g = np.array([[dx[i].dot(dx[j]).value for j in range(3)] for i in range(3)], dtype=float)
    h = np.array([[dx[i].diff(j).dot(xi).value for j in range(3)] for i in range(3)], dtype=float)
    g = np.moveaxis(g, (0, 1), (-2, -1)).reshape(-1, 3, 3)[0]
    h = np.moveaxis(h, (0, 1), (-2, -1)).reshape(-1, 3, 3)[0]
    ev = np.linalg.eigvals(np.linalg.solve(g, h)).real
    if np.all(ev > 0):
        return 1
    if np.all(ev < 0):
        return -1
    return -1 if ev.sum() < 0 else 1


def frame_residuals(frame, per_point=False):
    """Violation of each frame law: maxima over the batch, or per-point arrays."""
    T = frame.tangent
    dy = frame.dy
    xi = frame.xi
    X = frame.X.value
    y = frame.y.value
    q = frame.q
    nb = len(frame.q_jet.batch_shape)
    hess = np.stack([np.stack([frame.x.diff(i).diff(j).value for j in range(3)], axis=-2)
                     for i in range(3)], axis=-3)
    dxi = np.stack([frame.xi_jet.diff(i).value for i in range(3)], axis=-2)

    def mx(a):
        a = np.abs(np.asarray(a))
        a = a.reshape(a.shape[:nb] + (-1,)).max(axis=-1) if a.ndim > nb else a
        return a if per_point else float(np.max(a))

    return {
        "xi_tangent": mx(np.einsum("...k,...ik->...i", xi, T)),
        "xi_unit": mx(np.linalg.norm(xi, axis=-1) - 1),
        "h_relation": mx(frame.h + np.einsum("...ik,...jk->...ij", T, dxi)),
        "conormal_tangent": mx(np.einsum("...k,...ik->...i", X, T)),
        "conormal_y": mx(np.einsum("...k,...k->...", X, y) - 1),
        "conormal_xi": mx(X - xi / q[..., None]),
        "y_tangency": mx(np.einsum("...ik,...k->...i", dy, xi)),
        "weingarten": mx(dy + frame.Bmix @ T),
        "b_symmetry": mx(frame.B - np.swapaxes(frame.B, -1, -2)),
        "mixed_consistency": mx(frame.Bmix - frame.Bmix_raised),
        "g_relation": mx(np.einsum("...ijk,...k->...ij", hess, X) - frame.G),
    }
