"""The analyze / parallel / bonnet / roots / verify commands, returning report dicts."""

from __future__ import annotations

import numpy as np

from . import bonnet as bn
from .errors import (
    DegenerateW,
    NoRealRoot,
    NothingApplicable,
    PreconditionViolated,
    RelGeoError,
    ZeroRelativeCurvature,
    ZeroRoot,
)
from .frame import curvature_functions, euclidean_shape_operator, frame_residuals
from .parallel import (
    a_factored,
    a_of_mu,
    invariant_J,
    mu_from_ratio,
    peterson_check,
    recompute_star,
    shared_quantities_check,
    star_curvatures,
    star_radii,
    star_shape_operator,
    star_shape_operator_solve,
)
from .report import SCHEMA

FRAME_TOL = 1e-7
CURVATURE_TOL = 1e-7
EUCLIDEAN_TOL = 1e-8
IDENTITY_TOL = 1e-8
STAR_MATRIX_TOL = 1e-9
PATH_TOL = 1e-6
SHARED_TOL = 1e-6
INVARIANT_TOL = 1e-6
MU_RECOVERY_TOL = 1e-8
PETERSON_TOL = 1e-8
CLOSING_TOL = 1e-6
MU_RANGE = 0.3
MU_A_FLOOR = 1e-3
VERIFY_SEED = 20240601


def _base(command, spec, grid):
    return {
        "schema": SCHEMA,
        "command": command,
        "surface": None if spec is None else spec.describe(),
        "grid": None if grid is None else list(grid),
        "points": [],
        "summary": {},
        "candidates": [],
    }


def _curv_record(curv, k):
    return {
        "H": curv.H[k],
        "H2": curv.H2[k],
        "K": curv.K[k],
        "kappa": list(curv.kappas[k]),
        "R": list(curv.radii[k]),
        "real_eigenvalues": bool(curv.real[k]),
    }


def _rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def _max(a):
    a = np.asarray(a, dtype=float)
    return float(np.nanmax(a)) if a.size else 0.0


def cmd_analyze(spec, grid=None, tol=bn.CONSTANT_TOL):
    """Curvature functions at every grid point, with frame residuals and constancy."""
    spec = spec if grid is None else spec.with_grid(grid)
    points = spec.grid_points()
    frame = spec.frame(points=points)
    curv = frame.curvatures
    per_point = frame_residuals(frame, per_point=True)
    report = _base("analyze", spec, spec.grid)
    for k in range(points.shape[1]):
        rec = {"u": list(points[:, k])}
        rec.update(_curv_record(curv, k))
        rec["q"] = frame.q[k]
        rec["Ktilde"] = frame.Ktilde[k]
        rec["residuals"] = {name: v[k] for name, v in per_point.items()}
        report["points"].append(rec)
    report["summary"] = {
        "orientation": int(frame.orientation.flat[0]),
        "constancy": {n: bn.constancy(n, getattr(curv, n), tol).as_dict() for n in ("H", "H2", "K")},
        "max_residuals": {name: _max(v) for name, v in per_point.items()},
        "complex_eigenvalue_points": int(np.count_nonzero(~curv.real)),
    }
    return report


def cmd_parallel(spec, mu, grid=None):
    """Starred curvature functions at relative distance ``mu`` by two paths."""
    spec = spec if grid is None else spec.with_grid(grid)
    points = spec.grid_points()
    frame = spec.frame(order=spec.parallel_order(), points=points)
    curv = frame.curvatures
    A = a_of_mu(curv, mu, points=points)
    closed = star_curvatures(curv, mu, points=points)
    frame_star = recompute_star(frame, mu)
    rebuilt = frame_star.curvatures
    peterson = peterson_check(frame.x, frame.y, mu)
    shared = shared_quantities_check(frame, frame_star, mu)
    discrepancy = np.max(np.stack([
        np.abs(closed.H - rebuilt.H), np.abs(closed.H2 - rebuilt.H2), np.abs(closed.K - rebuilt.K),
    ]), axis=0)
    nonzero_K = np.all(np.abs(curv.K) > bn.ZERO_K_GUARD) and np.all(np.abs(closed.K) > bn.ZERO_K_GUARD)
    J = invariant_J(curv) if nonzero_K else np.full(curv.H.shape, np.nan)
    J_star = invariant_J(closed) if nonzero_K else np.full(curv.H.shape, np.nan)
    mu_rec = mu_from_ratio(curv, closed) if nonzero_K else np.full(curv.H.shape, np.nan)

    report = _base("parallel", spec, spec.grid)
    report["mu"] = float(mu)
    for k in range(points.shape[1]):
        report["points"].append({
            "u": list(points[:, k]),
            "A": A[k],
            "original": _curv_record(curv, k),
            "star": _curv_record(closed, k),
            "star_recomputed": {"H": rebuilt.H[k], "H2": rebuilt.H2[k], "K": rebuilt.K[k]},
            "path_discrepancy": discrepancy[k],
            "peterson_residual": peterson[k],
            "J": J[k],
            "J_star": J_star[k],
            "mu_recovered": mu_rec[k],
        })
    report["summary"] = {
        "mu": float(mu),
        "min_abs_A": float(np.min(np.abs(A))),
        "max_path_discrepancy": _max(discrepancy),
        "max_peterson_residual": _max(peterson),
        "max_J_drift": _max(np.abs(J_star - J)) if nonzero_K else None,
        "max_mu_recovery_error": _max(np.abs(mu_rec - mu)) if nonzero_K else None,
        "shared_quantities": shared,
    }
    return report


def cmd_bonnet(spec, grid=None, tol=bn.CONSTANT_TOL, verify_tol=bn.VERIFY_TOL):
    """Applicable Bonnet-type statements with predicted vs measured constants."""
    spec = spec if grid is None else spec.with_grid(grid)
    frame = spec.frame()
    report = _base("bonnet", spec, spec.grid)
    try:
        result = bn.verify_bonnet(frame.curvatures, tol=tol, verify_tol=verify_tol)
    except NothingApplicable as exc:
        stats = {n: bn.constancy(n, getattr(frame.curvatures, n), tol) for n in ("H", "H2", "K")}
        report["summary"] = {
            "outcome": "nothing_applicable",
            "reason": str(exc),
            "constancy": {k: v.as_dict() for k, v in stats.items()},
        }
        return report
    d = result.as_dict()
    report["candidates"] = d["candidates"]
    statuses = [c["status"] for c in d["candidates"]]
    report["summary"] = {
        "outcome": "applicable",
        "constancy": d["constancy"],
        "not_applicable": d["not_applicable"],
        "verified": statuses.count("verified"),
        "failed": statuses.count("failed"),
        "offset_singular": statuses.count("offset_singular"),
    }
    return report


def cmd_roots(H=None, H2=None, K=None):
    """Evaluate every closed-form relative distance the given values allow."""
    report = _base("roots", None, None)
    report["inputs"] = {"H": H, "H2": H2, "K": K}
    cands, errors = [], []

    def attempt(prop, fn, *args):
        if any(a is None for a in args):
            errors.append({"proposition": prop, "error": "MissingInput",
                           "message": "needs " + ", ".join(n for n, a in zip(_ARGNAMES[prop], args) if a is None)})
            return
        try:
            out = fn(*args)
        except (PreconditionViolated, DegenerateW, ZeroRoot, NoRealRoot, ZeroRelativeCurvature) as exc:
            errors.append({"proposition": prop, "error": type(exc).__name__, "message": str(exc)})
            return
        for c in (out if isinstance(out, list) else [out]):
            cands.append(c.as_dict() if hasattr(c, "as_dict") else c)

    attempt("P6_1", bn.mu1, H2, K)
    attempt("P6_3a", bn.mu2, H, K)
    attempt("P6_3b", bn.mu3, H, K)
    if H is not None and K is not None and H != 0 and K == H ** 3:
        attempt("P6_3b_remark", bn.mu3_double_root, H, K)
    attempt("P6_5a", bn.mu45, H, H2)
    attempt("P6_5b", bn.mu67, H, H2)
    attempt("P6_5c", bn.mu89, H, H2)

    def minimal(h, h2, k):
        return [{"proposition": "Minimal_5b", "label": f"c{i + 1}", "mu": m, "predicted_field": "H",
                 "predicted_value": 0.0, "W": None,
                 "certificate_residual": abs(m * m * k - 2 * m * h2 + h)}
                for i, m in enumerate(bn.minimal_parallel_mus(h, h2, k))]

    def h2zero(h2, k):
        m = bn.h2_vanishing_mu(h2, k)
        if m is None:
            raise NoRealRoot("H2 = 0: no parallel hypersurface with H2* = 0")
        return {"proposition": "H2Zero_Prop5_1", "label": "c", "mu": m, "predicted_field": "H2",
                "predicted_value": 0.0, "W": None, "certificate_residual": abs(-m * k + h2)}

    attempt("Minimal_5b", minimal, H, H2, K)
    attempt("H2Zero_Prop5_1", h2zero, H2, K)
    report["candidates"] = cands
    report["summary"] = {"candidates": len(cands), "errors": errors}
    return report


_ARGNAMES = {
    "P6_1": ("H2", "K"),
    "P6_3a": ("H", "K"),
    "P6_3b": ("H", "K"),
    "P6_3b_remark": ("H", "K"),
    "P6_5a": ("H", "H2"),
    "P6_5b": ("H", "H2"),
    "P6_5c": ("H", "H2"),
    "Minimal_5b": ("H", "H2", "K"),
    "H2Zero_Prop5_1": ("H2", "K"),
}


def sample_mus(curv, count=5, seed=VERIFY_SEED, bound=MU_RANGE, a_floor=MU_A_FLOOR):
    """Deterministic nonzero distances in [-bound, bound] with |A| > a_floor on the grid."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(1000 * count):
        if len(out) == count:
            break
        mu = float(rng.uniform(-bound, bound))
        if abs(mu) < 1e-3:
            continue
        if np.min(np.abs(a_of_mu(curv, mu, check=False))) > a_floor:
            out.append(mu)
    return out


def _closing_identity(c, s):
    """Both sides of the mu-free relation between original and starred functions,
    plus the magnitude of the largest expanded term (the cancellation scale)."""
    lhs_terms = [
        c.K ** 3 * s.K * s.H2 ** 2,
        3 * c.K * s.K ** 2 * s.H2 * s.H * c.H2 ** 2,
        -3 * c.K ** 2 * s.K ** 2 * s.H2 * s.H * c.H,
        -c.K ** 3 * s.H2 ** 3 * s.H,
    ]
    rhs_terms = [
        2 * s.K ** 3 * c.H2 ** 3 * s.H,
        s.K ** 3 * c.K * c.H2 ** 2,
        -3 * s.K ** 3 * c.K * c.H2 * c.H * s.H,
        s.K ** 3 * c.K ** 2 * s.H,
        -s.K ** 3 * c.K ** 2 * c.H,
    ]
    scale = np.max(np.abs(np.stack(lhs_terms + rhs_terms)), axis=0)
    return sum(lhs_terms), sum(rhs_terms), scale


def verify_checks(spec, grid=None, mus=None):
    """Run the invariant suite on one surface; returns a list of check dicts."""
    spec = spec if grid is None else spec.with_grid(grid)
    checks = []

    def check(name, value, tol):
        value = float(value)
        checks.append({"name": name, "value": value, "tolerance": tol,
                       "passed": bool(np.isfinite(value) and value <= tol)})

    frame = spec.frame(order=spec.parallel_order())
    curv = frame.curvatures

    for name, v in frame_residuals(frame).items():
        check(f"frame.{name}", v, FRAME_TOL)

    # orientation convention: the classical shape operator has nonnegative
    # trace at the domain centre (auto orientation picks exactly this sign)
    center = spec.jets(spec.center())
    from .frame import auto_orientation
    check("frame.weingarten_sign", 0.0 if auto_orientation(center) == int(frame.orientation.flat[0]) else 1.0, 0.5)

    real = curv.real
    if np.any(real):
        k = curv.kappas[real]
        check("curvature.H_from_kappas", _max(_rel_err(curv.H[real], k.mean(axis=-1))), CURVATURE_TOL)
        check("curvature.H2_from_kappas", _max(_rel_err(
            curv.H2[real], (k[:, 0] * k[:, 1] + k[:, 1] * k[:, 2] + k[:, 2] * k[:, 0]) / 3)), CURVATURE_TOL)
        check("curvature.K_from_kappas", _max(_rel_err(curv.K[real], np.prod(k, axis=-1))), CURVATURE_TOL)
        ok = real & np.all(np.isfinite(curv.radii), axis=-1) & (np.abs(curv.K) > bn.ZERO_K_GUARD)
        if np.any(ok):
            check("curvature.radii_sum", _max(_rel_err(np.sum(curv.radii[ok], axis=-1),
                                                       3 * curv.H2[ok] / curv.K[ok])), CURVATURE_TOL)
    check("curvature.real_eigenvalues", float(np.count_nonzero(~real)), 0.0)

    if spec.normalization.kind == "euclidean":
        check("euclidean.y_equals_xi", _max(np.abs(frame.y.value - frame.xi)), EUCLIDEAN_TOL)
        check("euclidean.G_equals_h", _max(np.abs(frame.G - frame.h)), EUCLIDEAN_TOL)
        eig = np.sort(np.linalg.eigvals(euclidean_shape_operator(frame)).real, axis=-1)[..., ::-1]
        check("euclidean.principal_curvatures", _max(np.abs(eig - curv.kappas)), EUCLIDEAN_TOL)

    mus = sample_mus(curv) if mus is None else mus
    check("parallel.sampled_distances", 0.0 if mus else 1.0, 0.5)
    nonzero_K = bool(np.all(np.abs(curv.K) > bn.ZERO_K_GUARD))
    for mu in mus:
        tag = f"parallel[mu={mu:.6f}]"
        A = a_of_mu(curv, mu)
        check(f"{tag}.A_determinant", _max(_rel_err(A, np.linalg.det(np.eye(3) - mu * frame.Bmix))), IDENTITY_TOL)
        if nonzero_K and np.all(real):
            check(f"{tag}.A_factored", _max(_rel_err(A, a_factored(curv, mu))), IDENTITY_TOL)
        sm = star_shape_operator(frame.Bmix, curv.K, mu)
        check(f"{tag}.star_matrix_vs_solve",
              _max(np.abs(sm - star_shape_operator_solve(frame.Bmix, mu)) / np.maximum(1, np.abs(sm))),
              STAR_MATRIX_TOL)
        s = star_curvatures(curv, mu)
        from_matrix = curvature_functions(sm)
        check(f"{tag}.star_functions_vs_matrix", max(
            _max(_rel_err(s.H, from_matrix.H)), _max(_rel_err(s.H2, from_matrix.H2)),
            _max(_rel_err(s.K, from_matrix.K))), IDENTITY_TOL)
        if np.all(real):
            check(f"{tag}.star_principal", _max(_rel_err(s.kappas, from_matrix.kappas)), PATH_TOL)
            check(f"{tag}.star_radii", _max(np.abs(np.sort(star_radii(curv, mu), axis=-1)
                                                 - np.sort(s.radii, axis=-1))), PATH_TOL)
        for label, lhs, rhs in identity_residuals(curv, s, mu):
            check(f"{tag}.identity_{label}", _max(_rel_err(lhs, rhs)), IDENTITY_TOL)
        fs = recompute_star(frame, mu)
        r = fs.curvatures
        check(f"{tag}.recompute_vs_closed_form", max(
            _max(_rel_err(s.H, r.H)), _max(_rel_err(s.H2, r.H2)), _max(_rel_err(s.K, r.K))), PATH_TOL)
        for name, v in shared_quantities_check(frame, fs, mu).items():
            check(f"{tag}.shared_{name}", v, SHARED_TOL)
        check(f"{tag}.peterson", _max(peterson_check(frame.x, frame.y, mu)), PETERSON_TOL)
        if nonzero_K:
            check(f"{tag}.J_invariance", _max(np.abs(invariant_J(s) - invariant_J(curv))), INVARIANT_TOL)
            check(f"{tag}.mu_recovery", _max(np.abs(mu_from_ratio(curv, s) - mu)), MU_RECOVERY_TOL)
            lhs, rhs, scale = _closing_identity(curv, s)
            check(f"{tag}.closing_identity", _max(np.abs(lhs - rhs) / scale), CLOSING_TOL)
        for mu2 in mus[:2]:
            if np.min(np.abs(a_of_mu(s, mu2, check=False))) > MU_A_FLOOR:
                twice = star_curvatures(s, mu2)
                once = star_curvatures(curv, mu + mu2)
                check(f"{tag}.semigroup[{mu2:.6f}]", max(
                    _max(_rel_err(twice.H, once.H)), _max(_rel_err(twice.H2, once.H2)),
                    _max(_rel_err(twice.K, once.K))), IDENTITY_TOL)
    return checks


def identity_residuals(curv, star, mu):
    """Both sides of the six pointwise identities linking A(mu) and starred functions."""
    A = a_of_mu(curv, mu, check=False)
    H, H2, K = curv.H, curv.H2, curv.K
    return [
        ("A(1+3muH*)", A * (1 + 3 * mu * star.H), 2 * mu ** 3 * K - 3 * mu ** 2 * H2 + 1),
        ("A(1-3mu^2H2*)", A * (1 - 3 * mu ** 2 * star.H2), 2 * mu ** 3 * K - 3 * mu * H + 1),
        ("A(2+3muH*)", A * (2 + 3 * mu * star.H), mu ** 3 * K - 3 * mu * H + 2),
        ("A(1+mu^3K*)", A * (1 + mu ** 3 * star.K), 3 * mu ** 2 * H2 - 3 * mu * H + 1),
        ("A(1-mu^2H2*)", A * (1 - mu ** 2 * star.H2), 2 * mu ** 2 * H2 - 3 * mu * H + 1),
        ("A(1+muH*)", A * (1 + mu * star.H), mu ** 2 * H2 - 2 * mu * H + 1),
    ]


def cmd_verify(spec, grid=None):
    spec = spec if grid is None else spec.with_grid(grid)
    report = _base("verify", spec, spec.grid)
    try:
        checks = verify_checks(spec)
    except RelGeoError as exc:
        checks = [{"name": f"error.{type(exc).__name__}", "value": float("nan"), "tolerance": 0.0,
                   "passed": False, "message": str(exc)}]
    failed = [c["name"] for c in checks if not c["passed"]]
    report["checks"] = checks
    report["summary"] = {"checks": len(checks), "failed": len(failed), "failed_names": failed,
                         "all_passed": not failed}
    return report
