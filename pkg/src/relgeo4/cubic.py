"""Real roots of cubic equations, vectorised over numpy arrays."""

from __future__ import annotations

import numpy as np


def solve_depressed(p, q, imag_tol=1e-9, scale=None):
    """Roots of ``t^3 + p t + q = 0``.

    Uses the trigonometric form when all three roots are real and Cardano's
    formula otherwise. A complex pair whose imaginary part is below
    ``imag_tol`` (relative to the root scale) is treated as a real double
    root; noise on a triple root would otherwise flip it to complex.

    ``scale`` is the magnitude of the data p and q were computed from (so p
    carries rounding of order eps*scale^2 and q of order eps*scale^3); a
    discriminant within that noise is treated as zero, i.e. a double root.

    Returns ``(roots, real)``: roots of shape ``(*batch, 3)`` sorted descending
    (non-real roots are NaN) and a boolean mask of points with three real roots.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p, q = np.broadcast_arrays(p, q)
    roots = np.full(p.shape + (3,), np.nan)
    real = np.ones(p.shape, dtype=bool)

    disc = (q / 2) ** 2 + (p / 3) ** 3
    # a double root makes disc vanish; rounding noise must not push it to Cardano
    if scale is None:
        scale = np.maximum(np.sqrt(np.abs(p)), np.cbrt(np.abs(q)))
    scale = np.broadcast_to(np.asarray(scale, dtype=float), p.shape)
    eps = np.finfo(float).eps
    noise = 64 * eps * (np.abs(q) / 2 * scale ** 3 + p * p / 9 * scale ** 2)
    triple = (np.abs(p) <= 64 * eps * scale ** 2) & (np.abs(q) <= 64 * eps * scale ** 3)
    roots[triple] = 0.0
    trig = (disc <= noise) & (p < 0) & ~triple
    if np.any(trig):
        pt, qt = p[trig], q[trig]
        m = 2 * np.sqrt(-pt / 3)
        with np.errstate(invalid="ignore", divide="ignore"):
            arg = np.nan_to_num(np.clip(3 * qt / (pt * m), -1.0, 1.0))
        theta = np.arccos(arg) / 3
        k = np.arange(3)
        roots[trig] = m[:, None] * np.cos(theta[:, None] - 2 * np.pi * k / 3)

    card = ~trig & ~triple
    if np.any(card):
        pc, qc = p[card], q[card]
        s = np.sqrt(np.maximum(disc[card], 0.0))
        u = np.cbrt(-qc / 2 + s)
        v = np.cbrt(-qc / 2 - s)
        t0 = u + v
        pair_re = -t0 / 2
        pair_im = np.sqrt(3) / 2 * np.abs(u - v)
        scale = np.maximum(np.maximum(np.abs(t0), np.sqrt(np.abs(pc))), 1e-300)
        ok = pair_im <= imag_tol * np.maximum(scale, 1.0)
        r = np.stack([t0, np.where(ok, pair_re, np.nan), np.where(ok, pair_re, np.nan)], axis=-1)
        roots[card] = r
        real[card] = ok

    roots = -np.sort(-roots, axis=-1)  # NaNs sort last
    return roots, real


def solve_cubic(a, b, c, d, imag_tol=1e-9):
    """Real roots of ``a x^3 + b x^2 + c x + d = 0`` (``a != 0``)."""
    a = np.asarray(a, dtype=float)
    b, c, d = (np.asarray(v, dtype=float) / a for v in (b, c, d))
    shift = b / 3
    p = c - b * b / 3
    q = 2 * b ** 3 / 27 - b * c / 3 + d
    scale = np.maximum.reduce([np.abs(b), np.sqrt(np.abs(c)), np.cbrt(np.abs(d))])
    t, real = solve_depressed(p, q, imag_tol, scale)
    return t - shift[..., None], real
