"""Closed-form relative distances of the Bonnet-type theorems and their verification.

When two of the curvature functions H, H2, K of a relatively normalized
hypersurface are constant, each routine below produces a relative distance
mu at which the parallel hypersurface has a predicted constant curvature
function. :func:`verify_bonnet` checks those predictions on sampled data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DegenerateW,
    NoRealRoot,
    NothingApplicable,
    PreconditionViolated,
    ZeroRelativeCurvature,
    ZeroRoot,
)
from .parallel import a_of_mu, star_curvatures

CONSTANT_TOL = 1e-6
VERIFY_TOL = 1e-5
A_GUARD = 1e-6
SPREAD_FLOOR = 1e-8
ZERO_K_GUARD = 1e-14
# boundary cases such as K^2 = H2^3 only hold up to rounding of the inputs
ROUND_SLACK = 16 * np.finfo(float).eps

PROPOSITIONS = (
    "P6_1", "P6_3a", "P6_3b", "P6_3b_remark", "P6_5a", "P6_5b", "P6_5c", "Minimal_5b", "H2Zero_Prop5_1",
)


@dataclass(frozen=True)
class BonnetCandidate:
    proposition: str
    label: str
    mu: float
    predicted_field: str
    predicted_value: float
    W: Optional[float] = None
    residual: float = 0.0

    def as_dict(self):
        return {
            "proposition": self.proposition,
            "label": self.label,
            "mu": self.mu,
            "predicted_field": self.predicted_field,
            "predicted_value": self.predicted_value,
            "W": self.W,
            "certificate_residual": self.residual,
        }


def _gate(value, scale, slack):
    # admit values a hair below zero when slack > 0 (measured boundary cases)
    if value >= 0:
        return value
    if slack > 0 and value >= -slack * max(scale, 1e-300):
        return 0.0
    return None


def _nonzero(name, v):
    if v == 0 or not math.isfinite(v):
        raise PreconditionViolated(f"{name} must be nonzero")


def poly_p61(mu, H2, K):
    return 2 * mu ** 3 * K - 3 * mu ** 2 * H2 + 1


def poly_p63a(mu, H, K):
    return 2 * mu ** 3 * K - 3 * mu * H + 1


def poly_p63b(mu, H, K):
    return mu ** 3 * K - 3 * mu * H + 2


def poly_p1(mu, H, H2):
    return 3 * mu ** 2 * H2 - 3 * mu * H + 1


def poly_p2(mu, H, H2):
    return 2 * mu ** 2 * H2 - 3 * mu * H + 1


def poly_p3(mu, H, H2):
    return mu ** 2 * H2 - 2 * mu * H + 1


def mu1(H2, K, slack=ROUND_SLACK):
    """Real root of 2 mu^3 K - 3 mu^2 H2 + 1; the parallel at mu1 has H* = -1/(3 mu1)."""
    H2, K = float(H2), float(K)
    _nonzero("K", K)
    rad = _gate(K * K - H2 ** 3, max(K * K, abs(H2) ** 3), slack)
    if rad is None:
        raise PreconditionViolated(f"K^2 >= H2^3 fails (K={K!r}, H2={H2!r})")
    W = float(np.cbrt(2 * K * K - H2 ** 3 + 2 * abs(K) * math.sqrt(rad)))
    if abs(W) < 1e-12:
        raise DegenerateW("W vanishes in the mu1 formula")
    mu = -(W + H2 * (H2 / W - 1)) / (2 * K)
    return BonnetCandidate("P6_1", "mu1", mu, "H", -1 / (3 * mu), W, abs(poly_p61(mu, H2, K)))


def mu2(H, K, slack=ROUND_SLACK):
    """Real root of 2 mu^3 K - 3 mu H + 1; the parallel at mu2 has H2* = 1/(3 mu2^2)."""
    H, K = float(H), float(K)
    _nonzero("K", K)
    rad = _gate(K ** 3 * (K - 2 * H ** 3), max(K ** 4, abs(K ** 3 * H ** 3)), slack)
    if rad is None:
        raise PreconditionViolated(f"K(K - 2H^3) >= 0 fails (K={K!r}, H={H!r})")
    W = float(np.cbrt(K * K + math.sqrt(rad)))
    if abs(W) < 1e-12:
        raise DegenerateW("W vanishes in the mu2 formula")
    mu = -H / (np.cbrt(2.0) * W) - W / (np.cbrt(4.0) * K)
    return BonnetCandidate("P6_3a", "mu2", float(mu), "H2", 1 / (3 * mu * mu), W, abs(poly_p63a(mu, H, K)))


def mu3(H, K, slack=ROUND_SLACK):
    """Real root of mu^3 K - 3 mu H + 2; the parallel at mu3 has H* = -2/(3 mu3)."""
    H, K = float(H), float(K)
    _nonzero("K", K)
    rad = _gate(K ** 3 * (K - H ** 3), max(K ** 4, abs(K ** 3 * H ** 3)), slack)
    if rad is None:
        raise PreconditionViolated(f"K(K - H^3) >= 0 fails (K={K!r}, H={H!r})")
    W = float(np.cbrt(K * K + math.sqrt(rad)))
    if abs(W) < 1e-12:
        raise DegenerateW("W vanishes in the mu3 formula")
    mu = -H / W - W / K
    return BonnetCandidate("P6_3b", "mu3", float(mu), "H", -2 / (3 * mu), W, abs(poly_p63b(mu, H, K)))


def mu3_double_root(H, K, slack=ROUND_SLACK):
    """Second distance mu = 1/H when K = H^3 (double root of mu^3 K - 3 mu H + 2); H* = -2H/3."""
    H, K = float(H), float(K)
    _nonzero("H", H)
    _nonzero("K", K)
    if abs(K - H ** 3) > max(slack, 0.0) * max(abs(K), abs(H) ** 3):
        raise PreconditionViolated(f"K = H^3 fails (K={K!r}, H={H!r})")
    mu = 1 / H
    return BonnetCandidate("P6_3b_remark", "mu3'", mu, "H", -2 / (3 * mu), None, abs(poly_p63b(mu, H, K)))


def _pair(prop, labels, field_name, predict, a, disc, denom, poly, H, H2):
    out = []
    for sign, label in zip((-1, 1), labels):
        mu = (a + sign * disc) / denom
        if mu == 0:
            raise ZeroRoot(f"{label} vanishes")
        out.append(BonnetCandidate(prop, label, mu, field_name, predict(mu), None, abs(poly(mu, H, H2))))
    return out


def mu45(H, H2, slack=ROUND_SLACK):
    """Roots of 3 mu^2 H2 - 3 mu H + 1; parallels there have K* = -1/mu^3."""
    H, H2 = float(H), float(H2)
    _nonzero("H2", H2)
    rad = _gate(3 * H * H - 4 * H2, max(3 * H * H, 4 * abs(H2)), slack)
    if rad is None:
        raise PreconditionViolated(f"3H^2 >= 4H2 fails (H={H!r}, H2={H2!r})")
    return _pair("P6_5a", ("mu4", "mu5"), "K", lambda m: -1 / m ** 3,
                 3 * H, math.sqrt(3) * math.sqrt(rad), 6 * H2, poly_p1, H, H2)


def mu67(H, H2, slack=ROUND_SLACK):
    """Roots of 2 mu^2 H2 - 3 mu H + 1; parallels there have H2* = 1/mu^2."""
    H, H2 = float(H), float(H2)
    _nonzero("H2", H2)
    rad = _gate(9 * H * H - 8 * H2, max(9 * H * H, 8 * abs(H2)), slack)
    if rad is None:
        raise PreconditionViolated(f"9H^2 >= 8H2 fails (H={H!r}, H2={H2!r})")
    return _pair("P6_5b", ("mu6", "mu7"), "H2", lambda m: 1 / m ** 2,
                 3 * H, math.sqrt(rad), 4 * H2, poly_p2, H, H2)


def mu89(H, H2, slack=ROUND_SLACK):
    """Roots of mu^2 H2 - 2 mu H + 1; parallels there have H* = -1/mu."""
    H, H2 = float(H), float(H2)
    _nonzero("H2", H2)
    rad = _gate(H * H - H2, max(H * H, abs(H2)), slack)
    if rad is None:
        raise PreconditionViolated(f"H^2 >= H2 fails (H={H!r}, H2={H2!r})")
    return _pair("P6_5c", ("mu8", "mu9"), "H", lambda m: -1 / m,
                 H, math.sqrt(rad), H2, poly_p3, H, H2)


def mu_4_to_9(H, H2, slack=ROUND_SLACK, errors=None):
    """All of mu4..mu9 whose preconditions hold.

    Violations are appended to ``errors`` when a list is given; if no pair
    qualifies the first violation is raised.
    """
    found, failures = [], []
    for fn in (mu45, mu67, mu89):
        try:
            found.extend(fn(H, H2, slack))
        except (PreconditionViolated, ZeroRoot) as exc:
            failures.append((fn.__name__, exc))
    if errors is not None:
        errors.extend(failures)
    if not found:
        raise failures[0][1]
    return found


def minimal_parallel_mus(H, H2, K, slack=ROUND_SLACK):
    """Distances at which the parallel hypersurface is relatively minimal (H* = 0).

    These are the nonzero roots of mu^2 K - 2 mu H2 + H.
    """
    H, H2, K = float(H), float(H2), float(K)
    if K == 0:
        if H2 == 0:
            raise NoRealRoot("mu^2 K - 2 mu H2 + H has no root with K = H2 = 0")
        roots = [H / (2 * H2)]
    else:
        rad = _gate(H2 * H2 - K * H, max(H2 * H2, abs(K * H)), slack)
        if rad is None:
            raise NoRealRoot(f"H2^2 - K H < 0 (H={H!r}, H2={H2!r}, K={K!r})")
        s = math.sqrt(rad)
        roots = [(H2 - s) / K] if s == 0 else [(H2 - s) / K, (H2 + s) / K]
    roots = [r for r in roots if r != 0]
    if not roots:
        raise NoRealRoot("only the trivial distance mu = 0")
    return roots


def h2_vanishing_mu(H2, K):
    """Unique distance H2/K where the second relative mean curvature vanishes (None if H2 = 0)."""
    H2, K = float(H2), float(K)
    if K == 0:
        raise ZeroRelativeCurvature("relative curvature K vanishes")
    if H2 == 0:
        return None
    return H2 / K


# --- verification on sampled data ---------------------------------------------

@dataclass
class ConstancyReport:
    field: str
    mean: float
    max_abs_deviation: float
    relative_spread: float
    tolerance: float

    @property
    def verdict(self):
        return bool(self.relative_spread <= self.tolerance)

    def as_dict(self):
        return {
            "field": self.field,
            "mean": self.mean,
            "max_abs_deviation": self.max_abs_deviation,
            "relative_spread": self.relative_spread,
            "tolerance": self.tolerance,
            "constant": self.verdict,
        }


def constancy(name, values, tol=CONSTANT_TOL):
    """Constancy statistics; the mean is a sequential exact-sum reduction."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        return ConstancyReport(name, float("nan"), float("inf"), float("inf"), tol)
    mean = math.fsum(v.tolist()) / v.size
    dev = float(np.max(np.abs(v - mean)))
    spread = float(v.max() - v.min()) / max(abs(mean), SPREAD_FLOOR)
    return ConstancyReport(name, mean, dev, spread, tol)


@dataclass
class BonnetResult:
    candidate: BonnetCandidate
    status: str  # "verified" | "failed" | "offset_singular"
    min_abs_A: float
    measured: Optional[ConstancyReport] = None
    deviation: Optional[float] = None

    def as_dict(self):
        d = self.candidate.as_dict()
        d.update({
            "status": self.status,
            "min_abs_A": self.min_abs_A,
            "measured": None if self.measured is None else self.measured.as_dict(),
            "deviation_from_prediction": self.deviation,
        })
        return d


@dataclass
class BonnetReport:
    constancy: dict
    results: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def as_dict(self):
        return {
            "constancy": {k: v.as_dict() for k, v in self.constancy.items()},
            "candidates": [r.as_dict() for r in self.results],
            "not_applicable": [{"proposition": p, "reason": str(e)} for p, e in self.skipped],
        }


def _check_candidate(curv, cand, verify_tol, a_guard):
    A = a_of_mu(curv, cand.mu, check=False)
    min_a = float(np.min(np.abs(A)))
    if min_a < a_guard:
        return BonnetResult(cand, "offset_singular", min_a)
    star = star_curvatures(curv, cand.mu)
    values = {"H": star.H, "H2": star.H2, "K": star.K}[cand.predicted_field]
    rep = constancy(cand.predicted_field + "*", values, verify_tol)
    dev = float(np.max(np.abs(values - cand.predicted_value)))
    ok = rep.verdict and dev <= verify_tol * max(1.0, abs(cand.predicted_value))
    return BonnetResult(cand, "verified" if ok else "failed", min_a, rep, dev)


def verify_bonnet(curv, tol=CONSTANT_TOL, verify_tol=VERIFY_TOL, a_guard=A_GUARD):
    """Find every applicable Bonnet-type statement for sampled curvatures and test it.

    ``curv`` holds H, H2, K over a sampling grid. Functions whose relative
    spread is within ``tol`` count as constant; candidate distances are
    computed from grid means and the predicted starred function is checked
    for constancy and value at ``verify_tol``.
    """
    stats = {name: constancy(name, getattr(curv, name), tol) for name in ("H", "H2", "K")}
    const = {k for k, r in stats.items() if r.verdict}
    H, H2, K = (stats[k].mean for k in ("H", "H2", "K"))
    report = BonnetReport(stats)
    cands = []

    def attempt(prop, fn, *args):
        try:
            out = fn(*args, slack=tol)
        except (PreconditionViolated, DegenerateW, ZeroRoot, NoRealRoot) as exc:
            report.skipped.append((prop, exc))
            return
        cands.extend(out if isinstance(out, list) else [out])

    if {"K", "H2"} <= const:
        attempt("P6_1", mu1, H2, K)
    if {"K", "H"} <= const:
        attempt("P6_3a", mu2, H, K)
        attempt("P6_3b", mu3, H, K)
        if K != 0 and H != 0 and abs(K - H ** 3) <= tol * max(abs(K), abs(H) ** 3):
            attempt("P6_3b_remark", mu3_double_root, H, K)
    if {"H2", "H"} <= const:
        attempt("P6_5a", mu45, H, H2)
        attempt("P6_5b", mu67, H, H2)
        attempt("P6_5c", mu89, H, H2)

    nonzero_K = bool(np.all(np.abs(curv.K) > ZERO_K_GUARD))
    if nonzero_K:
        ratio = constancy("H2/K", curv.H2 / curv.K, tol)
        report.constancy["H2/K"] = ratio
        if ratio.verdict:
            mu = ratio.mean
            if abs(mu) > SPREAD_FLOOR:
                cands.append(BonnetCandidate("H2Zero_Prop5_1", "c", mu, "H2", 0.0, None,
                                             abs(mu * K - H2) if "K" in const and "H2" in const else 0.0))
            else:
                report.skipped.append(("H2Zero_Prop5_1", NoRealRoot("H2 = 0: no parallel with H2* = 0")))
        disc = curv.H2 ** 2 - curv.K * curv.H
        scale = np.maximum(curv.H2 ** 2, np.abs(curv.K * curv.H))
        if np.all(disc >= -tol * np.maximum(scale, 1e-300)):
            s = np.sqrt(np.maximum(disc, 0.0))
            for sign, label in ((-1, "c1"), (1, "c2")):
                c = constancy(f"minimal_{label}", (curv.H2 + sign * s) / curv.K, tol)
                report.constancy[f"minimal_{label}"] = c
                if c.verdict and abs(c.mean) > SPREAD_FLOOR:
                    m = c.mean
                    if any(x.proposition == "Minimal_5b" and abs(x.mu - m) <= tol * max(1, abs(m)) for x in cands):
                        continue
                    res = abs(m * m * K - 2 * m * H2 + H) if const >= {"H", "H2", "K"} else 0.0
                    cands.append(BonnetCandidate("Minimal_5b", label, m, "H", 0.0, None, res))
        else:
            report.skipped.append(("Minimal_5b", NoRealRoot("H2^2 - K H < 0 somewhere on the grid")))

    if len(const) < 2 and not any(c.proposition in ("H2Zero_Prop5_1", "Minimal_5b") for c in cands):
        raise NothingApplicable(
            "no two of H, H2, K are constant: "
            + ", ".join(f"{k} spread {stats[k].relative_spread:.3g}" for k in ("H", "H2", "K"))
        )
    report.results = [_check_candidate(curv, c, verify_tol, a_guard) for c in cands]
    return report

