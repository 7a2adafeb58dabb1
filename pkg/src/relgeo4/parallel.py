"""Relatively parallel hypersurfaces x + mu*y and their starred curvature data."""

from __future__ import annotations

import numpy as np

from .errors import OffsetSingular, StarPrincipalUndefined, ZeroRelativeCurvature
from .frame import CurvatureSet, _radii, build_frame, curvature_functions

A_TOL = 1e-10
ZERO_K_TOL = 1e-14


def offset_jet(x, y, mu):
    """Position jet of the relatively parallel hypersurface at relative distance ``mu``."""
    return x + y * float(mu)


def _first_bad(mask, points):
    if points is None or not np.ndim(mask):
        return None
    k = np.unravel_index(np.argmax(mask), np.shape(mask))
    return np.asarray(points)[(slice(None),) + k]


def a_of_mu(curv, mu, check=True, points=None):
    """A(mu) = -mu^3 K + 3 mu^2 H2 - 3 mu H + 1, the offset Jacobian factor."""
    A = -mu ** 3 * curv.K + 3 * mu ** 2 * curv.H2 - 3 * mu * curv.H + 1
    if check:
        bad = np.abs(A) < A_TOL
        if np.any(bad):
            raise OffsetSingular(f"A({mu!r}) vanishes: mu is a relative focal distance",
                                 _first_bad(bad, points))
    return A


def a_factored(curv, mu):
    """A(mu) = -K (mu - R1)(mu - R2)(mu - R3); needs K != 0 and real radii."""
    R = curv.radii
    return -curv.K * np.prod(mu - R, axis=-1)


def star_shape_operator(Bmix, K, mu, points=None):
    """Mixed shape operator of the parallel hypersurface, component by component."""
    b = np.asarray(Bmix, dtype=float)
    K = np.asarray(K, dtype=float)

    def B(i, j):
        return b[..., i - 1, j - 1]

    H = (B(1, 1) + B(2, 2) + B(3, 3)) / 3
    H2 = (B(1, 1) * B(2, 2) + B(2, 2) * B(3, 3) + B(3, 3) * B(1, 1)
          - B(1, 2) * B(2, 1) - B(2, 3) * B(3, 2) - B(1, 3) * B(3, 1)) / 3
    A = -mu ** 3 * K + 3 * mu ** 2 * H2 - 3 * mu * H + 1
    bad = np.abs(A) < A_TOL
    if np.any(bad):
        raise OffsetSingular(f"A({mu!r}) vanishes: mu is a relative focal distance", _first_bad(bad, points))
    m2K = mu ** 2 * K
    s = np.empty(b.shape)
    s[..., 0, 0] = B(1, 1) - mu * (B(1, 1) * B(2, 2) + B(1, 1) * B(3, 3) - B(2, 1) * B(1, 2) - B(3, 1) * B(1, 3)) + m2K
    s[..., 0, 1] = B(1, 2) + mu * (B(1, 3) * B(3, 2) - B(1, 2) * B(3, 3))
    s[..., 0, 2] = B(1, 3) + mu * (B(1, 2) * B(2, 3) - B(1, 3) * B(2, 2))
    s[..., 1, 0] = B(2, 1) + mu * (B(2, 3) * B(3, 1) - B(2, 1) * B(3, 3))
    s[..., 1, 1] = B(2, 2) - mu * (B(1, 1) * B(2, 2) + B(2, 2) * B(3, 3) - B(2, 3) * B(3, 2) - B(1, 2) * B(2, 1)) + m2K
    s[..., 1, 2] = B(2, 3) + mu * (B(2, 1) * B(1, 3) - B(2, 3) * B(1, 1))
    s[..., 2, 0] = B(3, 1) + mu * (B(3, 2) * B(2, 1) - B(3, 1) * B(2, 2))
    s[..., 2, 1] = B(3, 2) + mu * (B(3, 1) * B(1, 2) - B(3, 2) * B(1, 1))
    s[..., 2, 2] = B(3, 3) - mu * (B(1, 1) * B(3, 3) + B(2, 2) * B(3, 3) - B(1, 3) * B(3, 1) - B(2, 3) * B(3, 2)) + m2K
    return s / A[..., None, None]


def star_shape_operator_solve(Bmix, mu):
    """Reference path: solve B = B* (I - mu B) for B*."""
    b = np.asarray(Bmix, dtype=float)
    M = np.eye(3) - mu * b
    return np.swapaxes(np.linalg.solve(np.swapaxes(M, -1, -2), np.swapaxes(b, -1, -2)), -1, -2)


def star_curvatures(curv, mu, points=None):
    """Curvature functions of the parallel hypersurface at relative distance ``mu``."""
    A = a_of_mu(curv, mu, points=points)
    K = curv.K / A
    H2 = (-mu * curv.K + curv.H2) / A
    H = (mu ** 2 * curv.K - 2 * mu * curv.H2 + curv.H) / A
    denom = 1 - mu * curv.kappas
    bad = np.abs(denom) < A_TOL
    if np.any(bad):
        raise StarPrincipalUndefined(f"some kappa_i equals 1/mu for mu={mu!r}")
    with np.errstate(invalid="ignore"):
        kappas = curv.kappas / denom
    # kappa -> kappa/(1 - mu kappa) is increasing on each branch but can reorder across the pole
    kappas = -np.sort(-kappas, axis=-1)
    return CurvatureSet(H, H2, K, kappas, _radii(kappas), curv.real.copy())


def star_radii(curv, mu):
    """R_i* = R_i - mu, in the same order as ``curv.radii``."""
    return curv.radii - mu


def invariant_J(curv):
    """(H2^2 - K H) / K^2, unchanged across the parallel family."""
    K = np.asarray(curv.K)
    if np.any(np.abs(K) < ZERO_K_TOL):
        raise ZeroRelativeCurvature("relative curvature K vanishes")
    return (curv.H2 ** 2 - K * curv.H) / K ** 2


def mu_from_ratio(curv, curv_star):
    """Relative distance recovered as H2/K - H2*/K*."""
    if np.any(np.abs(curv.K) < ZERO_K_TOL) or np.any(np.abs(curv_star.K) < ZERO_K_TOL):
        raise ZeroRelativeCurvature("relative curvature K vanishes")
    return curv.H2 / curv.K - curv_star.H2 / curv_star.K


def peterson_check(x, y, mu):
    """Per-point size of the part of d_i x_mu normal to the original tangent space."""
    T = np.stack([x.diff(i).value for i in range(3)], axis=-2)
    xm = offset_jet(x, y, mu)
    Tm = np.stack([xm.diff(i).value for i in range(3)], axis=-2)
    proj = Tm @ np.linalg.pinv(T) @ T
    return np.max(np.linalg.norm(Tm - proj, axis=-1), axis=-1)


def recompute_star(frame, mu):
    """Rebuild the frame of the parallel hypersurface from scratch.

    The position jet x + mu*y is run through the whole pipeline with y kept
    as its relative normalization; the unit normal is flipped by sign(A) so
    that the support function stays continuous in mu.
    """
    A = np.linalg.det(np.eye(3) - mu * frame.Bmix)
    bad = np.abs(A) < A_TOL
    if np.any(bad):
        raise OffsetSingular(f"A({mu!r}) vanishes: mu is a relative focal distance",
                             _first_bad(bad, frame.points))
    xm = offset_jet(frame.x, frame.y, mu)
    return build_frame(xm, y=frame.y, orientation=frame.orientation * np.sign(A))


def shared_quantities_check(frame, frame_star, mu=None):
    """Deviations of the quantities a parallel hypersurface shares with the original.

    Compares the relative image (y itself), support function, conormal and
    B-form; with ``mu`` given, also the relations II* = II - mu q B and
    G* = G - mu B.
    """
    def mx(a):
        return float(np.max(np.abs(a)))

    out = {
        "relative_image": mx(frame_star.y.value - frame.y.value),
        "support_function": mx(frame_star.q - frame.q),
        "conormal": mx(frame_star.X.value - frame.X.value),
        "b_form": mx(frame_star.B - frame.B),
    }
    if mu is not None:
        q = frame.q[..., None, None]
        out["second_form_shift"] = mx(frame_star.h - (frame.h - mu * q * frame.B))
        out["relative_metric_shift"] = mx(frame_star.G - (frame.G - mu * frame.B))
    return out


def star_from_recompute(frame, mu):
    """Starred curvature functions from the rebuilt frame (reference path)."""
    return curvature_functions(recompute_star(frame, mu).Bmix)
