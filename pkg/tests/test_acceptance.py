"""Acceptance suite: twelve criteria, one printed PASS/FAIL line each.

Run under pytest, or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import MODES, SURFACES, ellipsoid, sphere  # noqa: E402

from relgeo4 import bonnet as bn  # noqa: E402
from relgeo4.commands import identity_residuals, sample_mus  # noqa: E402
from relgeo4.errors import (  # noqa: E402
    OffsetSingular,
    PreconditionViolated,
    ValidationError,
    VanishingGaussCurvature,
    ZeroSupport,
)
from relgeo4.expr import eval_jet, evaluate, parse  # noqa: E402
from relgeo4.frame import NormalizationMode, frame_residuals  # noqa: E402
from relgeo4.parallel import (  # noqa: E402
    a_of_mu,
    invariant_J,
    mu_from_ratio,
    peterson_check,
    recompute_star,
    star_curvatures,
)
from relgeo4.surface import load_spec  # noqa: E402

GRID = (7, 7, 7)


def _spread(v):
    v = np.asarray(v, dtype=float)
    return float(v.max() - v.min()) / max(abs(float(v.mean())), 1e-300)


def _ellipsoid_mus(curv, count=20):
    return sample_mus(curv, count=count, seed=4, bound=0.2, a_floor=1e-3)


def sphere_reduction():
    worst_spread = worst_err = 0.0
    for r in (0.5, 1.0, 2.0):
        c = sphere(r, grid=GRID).frame().curvatures
        for f, want in (("H", 1 / r), ("H2", 1 / r ** 2), ("K", 1 / r ** 3)):
            v = getattr(c, f)
            worst_spread = max(worst_spread, _spread(v))
            worst_err = max(worst_err, float(np.max(np.abs(v - want))))
    ok = worst_spread <= 1e-7 and worst_err <= 1e-6
    return ok, f"max spread {worst_spread:.2e} (<= 1e-7), max error {worst_err:.2e} (<= 1e-6)"


def constant_support_sphere():
    r = 1.0
    kappa_err = radius_err = 0.0
    for c in (0.5, 2.0):
        frame = sphere(r, NormalizationMode.custom(repr(c)), grid=GRID).frame()
        kappa_err = max(kappa_err, float(np.max(np.abs(frame.curvatures.kappas - c))))
        for mu in (0.2, -0.3, 0.35):
            star = recompute_star(frame, mu)
            want = r - mu * c
            by_position = np.linalg.norm(star.x.value, axis=-1)
            by_curvature = c / star.curvatures.kappas
            radius_err = max(radius_err, float(np.max(np.abs(by_position - want))),
                             float(np.max(np.abs(by_curvature - want))))
    ok = kappa_err <= 1e-6 and radius_err <= 1e-6
    return ok, f"kappa error {kappa_err:.2e}, parallel radius error {radius_err:.2e} (both <= 1e-6)"


def star_transform_equivalence():
    frame = sphere(1.0, grid=GRID).frame()
    curv = frame.curvatures
    A = a_of_mu(curv, 0.5)
    closed = star_curvatures(curv, 0.5)
    rebuilt = recompute_star(frame, 0.5).curvatures
    want = {"K": 8.0, "H2": 4.0, "H": 2.0}
    closed_err = max(float(np.max(np.abs(getattr(closed, f) - v))) for f, v in want.items())
    path_err = max(float(np.max(np.abs(getattr(closed, f) - getattr(rebuilt, f)))) for f in want)
    a_err = float(np.max(np.abs(A - 0.125)))
    ok = closed_err <= 1e-9 and a_err <= 1e-12 and path_err <= 1e-6
    return ok, f"A error {a_err:.2e}, closed-form error {closed_err:.2e}, recompute discrepancy {path_err:.2e} (<= 1e-6)"


def pointwise_identities():
    curv = ellipsoid(grid=GRID).frame().curvatures
    mus = _ellipsoid_mus(curv)
    worst = 0.0
    for mu in mus:
        s = star_curvatures(curv, mu)
        for _, lhs, rhs in identity_residuals(curv, s, mu):
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    unit = sphere(1.0, grid=(1, 1, 1)).frame().curvatures
    spot = {label: (float(lhs[0]), float(rhs[0]))
            for label, lhs, rhs in identity_residuals(unit, star_curvatures(unit, 0.5), 0.5)}
    s70, s30 = spot["A(1+mu^3K*)"], spot["A(1-3mu^2H2*)"]
    spot_ok = all(abs(v - 0.25) <= 1e-12 for v in s70) and all(abs(v + 0.25) <= 1e-12 for v in s30)
    ok = len(mus) == 20 and worst <= 1e-8 and spot_ok
    return ok, (f"{len(mus)} distances, max residual {worst:.2e} (<= 1e-8); "
                f"spot values {s70[0]:.6g}/{s70[1]:.6g} and {s30[0]:.6g}/{s30[1]:.6g}")


def j_invariance():
    curv = ellipsoid(grid=GRID).frame().curvatures
    J = invariant_J(curv)
    drift = max(float(np.max(np.abs(invariant_J(star_curvatures(curv, mu)) - J))) for mu in _ellipsoid_mus(curv))
    return drift <= 1e-6, f"max per-point drift {drift:.2e} (<= 1e-6)"


def mu_recovery():
    worst = 0.0
    specs = [ellipsoid(grid=GRID)] + [sphere(r, grid=GRID) for r in (0.5, 1.0, 2.0)]
    for spec in specs:
        curv = spec.frame().curvatures
        for mu in _ellipsoid_mus(curv):
            worst = max(worst, float(np.max(np.abs(mu_from_ratio(curv, star_curvatures(curv, mu)) - mu))))
    return worst <= 1e-8, f"max round-trip error {worst:.2e} (<= 1e-8)"


def bonnet_sphere_two():
    spec = sphere(2.0, grid=GRID)
    frame = spec.frame()
    report = bn.verify_bonnet(frame.curvatures)
    (res,) = [r for r in report.results if r.candidate.proposition == "P6_1"]
    mu1 = res.candidate.mu
    cert = abs(bn.poly_p61(mu1, 0.25, 0.125))
    rebuilt = recompute_star(frame, mu1).curvatures.H
    measured = float(np.mean(rebuilt))
    spread = _spread(rebuilt)
    ok = (abs(mu1 + 1) <= 1e-9 and cert <= 1e-9 and res.status == "verified"
          and abs(measured - 1 / 3) <= 1e-7 and spread <= 1e-7)
    return ok, (f"mu1 = {mu1:.12g}, |P(mu1)| = {cert:.1e}, measured H* = {measured:.12g}, "
                f"spread {spread:.1e} (<= 1e-7)")


def boundary_closed_forms():
    worst = 0.0
    for H in (1.0, 0.5, 2.0, -1.3):
        cbrtK = np.cbrt(H ** 3)
        checks = []
        c = bn.mu2(H, 2 * H ** 3)
        checks += [(c.mu, -1 / H), (c.predicted_value, H * H / 3)]
        c = bn.mu3(H, H ** 3)
        checks += [(c.mu, -2 / H), (c.predicted_value, H / 3)]
        for c in bn.mu45(H, 3 * H * H / 4):
            checks += [(c.mu, 2 / (3 * H)), (c.predicted_value, -27 * H ** 3 / 8)]
        for c in bn.mu67(H, 9 * H * H / 8):
            checks += [(c.mu, 2 / (3 * H)), (c.predicted_value, 9 * H * H / 4)]
        for c in bn.mu89(H, H * H):
            checks += [(c.mu, 1 / H), (c.predicted_value, -H)]
        K = H ** 3
        c = bn.mu1(cbrtK ** 2, K)
        checks += [(c.mu, -1 / (2 * cbrtK)), (c.predicted_value, 2 * cbrtK / 3)]
        worst = max([worst] + [abs(a - b) for a, b in checks])
    return worst <= 1e-10, f"six boundary cases at H in (1, 0.5, 2, -1.3), max deviation {worst:.2e} (<= 1e-10)"


def root_certificates():
    rng = np.random.default_rng(2024)
    worst, returned, violations, wrong = 0.0, 0, 0, 0
    for _ in range(10_000):
        H, H2, K = rng.uniform(-3, 3, size=3)
        if min(abs(H2), abs(K)) < 0.05:
            H2 += math.copysign(0.05, H2)
            K += math.copysign(0.05, K)
        cases = [
            (bn.mu1, (H2, K), K * K >= H2 ** 3, lambda m: bn.poly_p61(m, H2, K)),
            (bn.mu2, (H, K), K * (K - 2 * H ** 3) >= 0, lambda m: bn.poly_p63a(m, H, K)),
            (bn.mu3, (H, K), K * (K - H ** 3) >= 0, lambda m: bn.poly_p63b(m, H, K)),
            (bn.mu45, (H, H2), 3 * H * H >= 4 * H2, lambda m: bn.poly_p1(m, H, H2)),
            (bn.mu67, (H, H2), 9 * H * H >= 8 * H2, lambda m: bn.poly_p2(m, H, H2)),
            (bn.mu89, (H, H2), H * H >= H2, lambda m: bn.poly_p3(m, H, H2)),
        ]
        for fn, args, admissible, poly in cases:
            try:
                out = fn(*args)
            except PreconditionViolated:
                violations += 1
                wrong += admissible
                continue
            wrong += not admissible
            for c in out if isinstance(out, list) else [out]:
                worst = max(worst, abs(poly(c.mu)))
                returned += 1
    ok = worst <= 1e-9 and wrong == 0
    return ok, (f"{returned} roots, max |P(mu)| {worst:.2e} (<= 1e-9); "
                f"{violations} precondition violations, {wrong} misclassified")


def frame_laws():
    worst = {}
    specs = [sphere(r, MODES[m], grid=GRID) for r in (0.5, 1.0, 2.0) for m in MODES]
    specs += [ellipsoid(mode=MODES[m], grid=GRID) for m in MODES]
    keep = ("weingarten", "conormal_tangent", "conormal_y", "conormal_xi", "b_symmetry", "y_tangency")
    for spec in specs:
        frame = spec.frame()
        res = frame_residuals(frame)
        for k in keep:
            worst[k] = max(worst.get(k, 0.0), res[k])
        for mu in (0.1, -0.2):
            worst["peterson"] = max(worst.get("peterson", 0.0), float(peterson_check(frame.x, frame.y, mu).max()))
    top = max(worst.values())
    return top <= 1e-7, "max residual " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (<= 1e-7)"


JET_CORPUS = [
    "sin(u1)*cos(u2) + u3", "exp(u1 - 0.5*u2)*u3", "log(2 + u1*u2 + u3^2)", "tan(0.3*u1 + 0.2*u2*u3)",
    "sqrt(3 + u1 + u2*u2 + sin(u3))", "cbrt(2 + u1*u3)", "sinh(u1*u2) + cosh(u3 - u1)",
    "abs(u1 - 3)*u2", "(1 + u1^2 + u2^2)^(-1.5)*u3", "exp(sin(u1)*cos(u2 + u3))",
]


def _fd(f, p, mi, h=1e-3):
    w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12 * h)
    w2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * h * h)
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    axes = [i for i, k in enumerate(mi) for _ in range(k)]
    E = np.eye(3)
    if len(axes) == 1:
        return sum(w * f(p + d * E[axes[0]]) for w, d in zip(w1, offs))
    a, b = axes
    if a == b:
        return sum(w * f(p + d * E[a]) for w, d in zip(w2, offs))
    return sum(wi * wj * f(p + di * E[a] + dj * E[b]) for wi, di in zip(w1, offs) for wj, dj in zip(w1, offs))


def jet_engine():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.6, 0.6, size=(3, 4))
    multis = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1)]
    worst = 0.0
    for src in JET_CORPUS:
        e = parse(src)
        j = eval_jet(e, pts)
        for k in range(pts.shape[1]):
            p = pts[:, k]
            for mi in multis:
                exact = float(j.derivative(mi)[k])
                fd = _fd(lambda q: float(evaluate(e, q)), p, mi)
                worst = max(worst, abs(fd - exact) / max(1.0, abs(exact)))
    return worst <= 1e-7, f"{len(JET_CORPUS)} expressions, max relative error {worst:.2e} (<= 1e-7)"


def negative_controls():
    outcomes = []
    frame = sphere(1.0, grid=GRID).frame()
    try:
        a_of_mu(frame.curvatures, 1.0, points=frame.points)
        outcomes.append("focal: no error")
    except OffsetSingular:
        outcomes.append("focal: OffsetSingular")
    for name, want in (("flat.surf", VanishingGaussCurvature), ("zero_support.surf", ZeroSupport)):
        try:
            load_spec(SURFACES / name)
            outcomes.append(f"{name}: no error")
        except ValidationError as exc:
            outcomes.append(f"{name}: {type(exc.cause).__name__}" if isinstance(exc.cause, want)
                            else f"{name}: wrong {exc.check}")
    ok = outcomes == ["focal: OffsetSingular", "flat.surf: VanishingGaussCurvature", "zero_support.surf: ZeroSupport"]
    return ok, "; ".join(outcomes)


CRITERIA = [
    (1, "sphere reduction", sphere_reduction),
    (2, "constant-q sphere", constant_support_sphere),
    (3, "star-transform equivalence", star_transform_equivalence),
    (4, "pointwise identities", pointwise_identities),
    (5, "J invariance", j_invariance),
    (6, "mu recovery", mu_recovery),
    (7, "Bonnet verification, sphere r=2", bonnet_sphere_two),
    (8, "boundary-case closed forms", boundary_closed_forms),
    (9, "root certificates", root_certificates),
    (10, "frame laws", frame_laws),
    (11, "jet engine", jet_engine),
    (12, "negative controls", negative_controls),
]


def _line(number, title, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(number, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        failures += not ok
        print(_line(number, title, ok, detail))
    sys.exit(1 if failures else 0)
