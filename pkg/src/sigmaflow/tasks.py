"""Task orchestration: run a verification suite, write artifacts, build a report.

A task failure in one check is recorded in its row and never aborts the rest
of the report.  Reports are byte-identical for identical config + seed.
"""

import json
import os
from pathlib import Path

import numpy as np

from . import geometry as geo
from . import hadamard as had
from . import rgflow, wick
from .config import RunConfig
from .report import CheckRow, Report, build_report, config_digest, write_csv

TASKS = ("flow", "hadamard", "wick-check", "renorm-check", "report-all")

_DEFAULT_SEGMENTS = {
    "sphere": (np.array([1.2, 0.4]), np.array([1.42, 0.62])),
    "torus": (np.array([0.5, 0.5]), np.array([1.0, 0.9])),
    "flat": (np.array([0.5, 0.5]), np.array([1.0, 0.9])),
    "hyperbolic": (np.array([0.0, 1.5]), np.array([0.25, 1.68])),
}

_CLUSTER_OFFSETS = np.array([
    [0.0, 0.0], [0.16, 0.1], [0.08, 0.22], [-0.12, 0.14], [-0.08, -0.12],
    [0.2, -0.06], [-0.18, 0.02], [0.04, -0.2], [0.12, 0.18],
])


def output_root(override=None):
    if override:
        return Path(override)
    env = os.environ.get("SIGMAFLOW_OUT")
    if env:
        return Path(env)
    return Path("out")


def run_task(cfg: RunConfig, task, out_dir=None, seed=None, tag=None):
    """Execute a named suite; returns (Report, run_directory)."""
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}; choose from {TASKS}")
    seed = cfg.seed if seed is None else int(seed)
    run_tag = tag or config_digest(cfg, seed)[:12]
    run_dir = output_root(out_dir) / task / run_tag
    run_dir.mkdir(parents=True, exist_ok=True)

    if task == "report-all":
        rows, artifacts = [], []
        for sub in ("flow", "hadamard", "wick-check", "renorm-check"):
            sub_rows, sub_art = _run_suite(sub, cfg, seed, run_dir)
            rows.extend(sub_rows)
            artifacts.extend(sub_art)
    else:
        rows, artifacts = _run_suite(task, cfg, seed, run_dir)

    # reports carry run-relative artifact names so identical configs produce
    # byte-identical reports regardless of the output root
    rel_artifacts = [Path(a).name for a in artifacts]
    report = build_report(task, cfg, seed, rows, rel_artifacts)
    (run_dir / "report.json").write_text(report.to_json())
    return report, run_dir


def _run_suite(task, cfg, seed, run_dir):
    fn = {"flow": _flow_suite, "hadamard": _hadamard_suite,
          "wick-check": _wick_suite, "renorm-check": _renorm_suite}[task]
    try:
        return fn(cfg, seed, run_dir)
    except Exception as exc:  # pragma: no cover - defensive
        row = CheckRow(check=f"{task}.setup", detail="suite construction",
                       value=float("nan"), tolerance=None, passed=False,
                       error=f"{type(exc).__name__}: {exc}")
        return [row], []


def _row(check, detail, value, tol):
    return CheckRow(check=check, detail=detail, value=float(value),
                    tolerance=tol, passed=bool(value < tol))


# ---------------------------------------------------------------------------
# flow


def _flow_suite(cfg, seed, run_dir):
    family_id = cfg.flow.family or cfg.background.m_family
    kind = family_id.split(":")[0]
    nu, dt, tau_end = cfg.flow.nu, cfg.flow.dt, cfg.flow.tau_end

    if kind == "torus":
        dim = int(family_id.split(":")[1]) if ":" in family_id else 2
        gm = rgflow.GridMetric.from_function(lambda x: np.eye(dim),
                                             cfg.flow.grid_n, dim)
        state = rgflow.CouplingState(gm, nu=nu)
    else:
        state = rgflow.CouplingState.from_family(family_id, nu=nu)
    traj = rgflow.ricci_flow_integrate(state, tau_end, dt,
                                       record_every=cfg.flow.record_every)

    dim = traj.snapshots[0].shape[0]
    csv_path = write_csv(run_dir / "trajectory.csv", traj.header(dim), traj.rows())

    taus = np.array(traj.taus)
    rows = []
    if kind in ("sphere", "hyperbolic"):
        r0 = float(family_id.split(":")[1]) if ":" in family_id else 1.0
        ref = traj.snapshots[0] / (r0 * r0)
        measured = np.array([s[0, 0] / ref[0, 0] for s in traj.snapshots])
        exact = rgflow.closed_form_radius_squared(kind, r0, nu, taus)
        dev = float(np.max(np.abs(measured - exact)))
        sign = "-" if kind == "sphere" else "+"
        rows.append(_row(f"flow.{kind}-closed-form",
                         f"max |r^2(tau) {sign} 2 nu^2 tau - r0^2| on the "
                         f"constant-curvature flow", dev, 1e-8))
    else:
        drift = float(max(np.max(np.abs(s - traj.snapshots[0]))
                          for s in traj.snapshots))
        rows.append(_row("flow.flat-fixed-point",
                         "max metric drift of the flat flow", drift, 1e-12))
    rows.append(_row("flow.positivity",
                     "negative part of the smallest metric eigenvalue",
                     max(0.0, -min(traj.min_eigenvalues)), 1e-12))
    return rows, [csv_path]


# ---------------------------------------------------------------------------
# hadamard


def _background(cfg):
    return cfg.background.build()


def _segment(cfg):
    kind = cfg.background.sigma_family.split(":")[0]
    x0, x1 = _DEFAULT_SEGMENTS[kind]
    if cfg.hadamard.x0 is not None:
        x0 = np.asarray(cfg.hadamard.x0, dtype=float)
    if cfg.hadamard.x1 is not None:
        x1 = np.asarray(cfg.hadamard.x1, dtype=float)
    return x0, x1


def _hadamard_suite(cfg, seed, run_dir):
    b = _background(cfg)
    x0, x1 = _segment(cfg)
    samples = cfg.discretization.geodesic_samples
    geod = geo.geodesic_solve(b.gamma, x0, x1, chart=b.sigma.chart,
                              samples=samples)
    syn = geo.synge_data(b.gamma, geod, world=geo.synge.background_world(b))
    exp = had.build_expansion(b, geod, order=cfg.hadamard.order,
                              ell_H=cfg.hadamard.ell_H,
                              syn=syn, stencil_h=cfg.discretization.stencil_h)

    rows = []
    g_sharp = b.g.inverse(b.psi.at(exp.base_point))
    rows.append(_row("hadamard.leading-coincidence",
                     "max |V_0 at coincidence - inverse target metric|",
                     float(np.max(np.abs(exp.coeffs[0].coincidence - g_sharp))),
                     1e-8))
    tol = {0: 1e-7}
    for n, coeff in enumerate(exp.coeffs):
        res = had.transport_residual(b, geod, coeff)
        rows.append(_row(f"hadamard.transport-residual-V{n}",
                         f"max back-substitution residual of the order-{n} "
                         f"transport equation", float(res.max()),
                         tol.get(n, 1e-6)))

    for lam in cfg.hadamard.lambdas:
        exp_l = had.rescaled_expansion(exp, lam)
        d0 = float(np.max(np.abs(exp_l.coeffs[0].samples - exp.coeffs[0].samples)))
        rows.append(_row(f"hadamard.scale-invariance-V0[{lam:g}]",
                         "max |V_0(scaled) - V_0|", d0, 1e-9))
        if exp.order >= 1:
            d1 = float(np.max(np.abs(exp_l.coeffs[1].samples
                                     - lam * lam * exp.coeffs[1].samples)))
            rows.append(_row(f"hadamard.scale-covariance-V1[{lam:g}]",
                             "max |V_1(scaled) - lambda^2 V_1|", d1, 1e-6))
        kres, cres = had.scaling_shift_check(exp, lam, exp_lam=exp_l)
        rows.append(_row(f"hadamard.kernel-shift[{lam:g}]",
                         "max |H(scaled) - H + 2 log(lambda) sum V_n sigma^n|",
                         kres, 1e-6))
        rows.append(_row(f"hadamard.coincidence-shift[{lam:g}]",
                         "coincidence part shift minus -2 log(lambda) g^sharp",
                         cres, 1e-12))

    header = ["path_parameter", "sigma"]
    for n in range(exp.order + 1):
        header += [f"V{n}_{a}{c}" for a in range(b.dim_target)
                   for c in range(b.dim_target)]
    data_rows = []
    for i, tau in enumerate(exp.taus):
        row = [float(tau), float(exp.sigma_path[i])]
        for coeff in exp.coeffs:
            row += [float(v) for v in coeff.samples[i].reshape(-1)]
        data_rows.append(row)
    csv_path = write_csv(run_dir / "expansion.csv", header, data_rows)
    return rows, [csv_path]


# ---------------------------------------------------------------------------
# wick


def _cluster(cfg, b):
    kind = cfg.background.sigma_family.split(":")[0]
    center = _DEFAULT_SEGMENTS[kind][0]
    n = cfg.discretization.quadrature_points
    pts = [center + off for off in _CLUSTER_OFFSETS[:n]]
    weights = np.full(n, 0.05)
    return pts, weights


def _build_kernels(cfg, b):
    pts, weights = _cluster(cfg, b)
    d = b.dim_target
    ws = had.separable_w_smooth(
        b, [0.2 * np.eye(d), 0.1 * np.eye(d) + 0.05 * np.ones((d, d))],
        [(1.0, 0.0, 0.3), (0.0, 1.0, 1.1)])
    # a reference length near the typical point separation keeps the kernel
    # blocks at order one, which keeps the exact algebraic identities at
    # machine precision in the presence of degree-4 contractions
    P = had.build_discrete_parametrix(b, pts, weights, order=0, w_smooth=ws,
                                      ell_H=0.3)
    Pt = P.with_w_coincide(P.w_coincide + 0.4 * np.eye(d)[None, :, :],
                           smooth_off_diagonal=lambda p, q: 0.4 * np.eye(d))
    return pts, weights, P, Pt


def _rand_monomial(rng, n_points, dim, max_degree):
    k = int(rng.integers(0, max_degree + 1))
    i = int(rng.integers(0, n_points))
    if k == 0:
        return wick.monomial(0, i, rng.normal(scale=0.1))
    return wick.monomial(k, i, wick.symmetrize(rng.normal(scale=0.1, size=(dim,) * k)))


def _wick_suite(cfg, seed, run_dir):
    b = _background(cfg)
    pts, weights, P, Pt = _build_kernels(cfg, b)
    d = b.dim_target
    n_points = len(pts)
    rng = np.random.default_rng(seed)
    cases = cfg.wick.cases

    comm = assoc = 0.0
    for _ in range(cases):
        f = _rand_monomial(rng, n_points, d, 4)
        g = _rand_monomial(rng, n_points, d, 4)
        comm = max(comm, wick.star_product(f, g, P).max_abs_difference(
            wick.star_product(g, f, P)))
        h = _rand_monomial(rng, n_points, d, 4)
        f3 = _rand_monomial(rng, n_points, d, 4)
        g3 = _rand_monomial(rng, n_points, d, 4)
        assoc = max(assoc, wick.star_product(
            wick.star_product(f3, g3, P), h, P).max_abs_difference(
            wick.star_product(f3, wick.star_product(g3, h, P), P)))
    rows = [
        _row("wick.star-commutativity",
             f"max |F*G - G*F| over {cases} random monomial pairs", comm, 1e-11),
        _row("wick.star-associativity",
             f"max |(F*G)*H - F*(G*H)| over {cases} random triples", assoc, 1e-11),
    ]

    morph = coc = invl = 0.0
    for _ in range(max(cases // 2, 5)):
        f = _rand_monomial(rng, n_points, d, 3)
        g = _rand_monomial(rng, n_points, d, 3)
        lhs = wick.alpha_map(wick.star_product(f, g, Pt), P, Pt)
        rhs = wick.star_product(wick.alpha_map(f, P, Pt),
                                wick.alpha_map(g, P, Pt), P)
        morph = max(morph, lhs.max_abs_difference(rhs))
        f4 = _rand_monomial(rng, n_points, d, 4)
        Pq = P.with_w_coincide(P.w_coincide - 0.25 * np.eye(d)[None, :, :])
        coc = max(coc, wick.alpha_map(wick.alpha_map(f4, Pq, Pt), P, Pq)
                  .max_abs_difference(wick.alpha_map(f4, P, Pt)))
        fc = _rand_monomial(rng, n_points, d, 3)
        gc = _rand_monomial(rng, n_points, d, 3)
        invl = max(invl, wick.involution(wick.star_product(fc, gc, P))
                   .max_abs_difference(wick.star_product(
                       wick.involution(fc), wick.involution(gc), P)))
    rows += [
        _row("wick.alpha-morphism",
             "max |alpha(F * G) - alpha(F) * alpha(G)|", morph, 1e-11),
        _row("wick.alpha-cocycle",
             "max |alpha_P^Q alpha_Q^R - alpha_P^R| on random functionals",
             coc, 1e-12),
        _row("wick.alpha-identity", "max |alpha_P^P F - F|",
             _alpha_id(rng, n_points, d, P), 1e-15),
        _row("wick.involution",
             "max |(F*G)^* - F^* * G^*| with conjugated coefficients", invl, 1e-12),
    ]

    fam = wick.HadamardWickFamily(b)
    dcw = 0.0
    for k in range(1, cfg.wick.k_max + 1):
        omega = {int(rng.integers(0, n_points)):
                 wick.symmetrize(rng.normal(size=(d,) * k))}
        p1 = {i: rng.normal(size=d) for i in range(n_points)}
        p2 = {i: rng.normal(size=d) for i in range(n_points)}
        dcw = max(dcw, wick.derivative_condition_check(fam, k, omega, P, p1, p2))
    rows.append(_row("wick.derivative-condition",
                     f"max residual of the lowering rule for k <= {cfg.wick.k_max}",
                     dcw, 1e-10))

    zero = {i: np.zeros(d) for i in range(n_points)}
    om3 = {0: wick.symmetrize(rng.normal(size=(d,) * 3))}
    om4 = {0: wick.symmetrize(rng.normal(size=(d,) * 4))}
    odd = abs(fam.power(3, om3, P, zero))
    w0 = P.w_coincide[0]
    even = abs(fam.power(4, om4, P, zero)
               - 3.0 * np.einsum("ab,cd,abcd->", w0, w0, om4[0]))
    rows.append(_row("wick.odd-vacuum", "vacuum value of an odd power", odd, 1e-14))
    rows.append(_row("wick.even-vacuum",
                     "4th-power vacuum minus the 3-pairing contraction", even, 1e-12))

    phi = {i: rng.normal(size=d) for i in range(n_points)}
    om2 = {1: wick.symmetrize(rng.normal(size=(d, d)))}
    elem = wick.AlgebraElement.from_power(fam, 2, om2)
    rows.append(_row("wick.equivariance",
                     "power at P vs the transported power from another kernel",
                     wick.equivariance_check(elem, P, Pt, phi), 1e-10))

    P_reg = had.DiscreteParametrix(P.points, P.areas * 1.7, P.kernel,
                                   P.w_coincide,
                                   P.diag_reg + 0.31 * np.eye(d)[None, :, :],
                                   P.ell_H)
    reg_dev = abs(fam.power(4, om4, P, zero) - fam.power(4, om4, P_reg, zero))
    rows.append(_row("wick.diagonal-convention-independence",
                     "vacuum value change under a different cell regularisation",
                     reg_dev, 1e-14))

    lam, mu = 1.7, 2.3
    shift_two = fam.scaled(lam).scaled(mu).shift_log
    shift_once = np.log(lam) + np.log(mu)
    rows.append(_row("wick.scaling-composition",
                     "additivity defect of composed scalings",
                     abs(shift_two - shift_once), 1e-15))

    coeff_report = {}
    for kappa in (-1.0, 0.3):
        inject = {2: {i: kappa * fam.g_sharp(P.points[i]) for i in range(n_points)}}
        fam_b = wick.DeformedWickFamily(fam, inject)
        rec = wick.classify_ambiguities(fam, fam_b, P, min(cfg.wick.k_max, 4), d,
                                        probe_P=Pt)
        dev = max(float(np.max(np.abs(rec[2][i] - inject[2][i])))
                  for i in range(n_points))
        rows.append(_row(f"wick.ambiguity-round-trip[{kappa:g}]",
                         "recovered rank-2 coefficient minus the injected one",
                         dev, 1e-10))
        coeff_report[f"injected_{kappa:g}"] = {
            str(i): [[float(v) for v in row] for row in rec[2][i].real]
            for i in range(n_points)}
    lam_s = 2.0
    rec = wick.classify_ambiguities(fam, fam.scaled(lam_s), P, 2, d, probe_P=Pt)
    dev = max(float(np.max(np.abs(rec[2][i] + 2.0 * np.log(lam_s)
                                  * fam.g_sharp(P.points[i]))))
              for i in range(n_points))
    rows.append(_row("wick.scaled-family-coefficient",
                     "recovered coefficient minus -2 log(lambda) g^sharp", dev, 1e-10))
    coeff_report["scaled_2"] = {
        str(i): [[float(v) for v in row] for row in rec[2][i].real]
        for i in range(n_points)}

    sample = fam.functional(2, om2, P)
    artifacts = []
    func_path = run_dir / "sample_functional.json"
    func_path.write_text(json.dumps(sample.to_dict(), sort_keys=True, indent=2) + "\n")
    artifacts.append(func_path)
    amb_path = run_dir / "ambiguity_coefficients.json"
    amb_path.write_text(json.dumps(coeff_report, sort_keys=True, indent=2) + "\n")
    artifacts.append(amb_path)
    return rows, artifacts


def _alpha_id(rng, n_points, d, P):
    f = _rand_monomial(rng, n_points, d, 4)
    return wick.alpha_map(f, P, P).max_abs_difference(f)


# ---------------------------------------------------------------------------
# renorm


def _renorm_suite(cfg, seed, run_dir):
    b = _background(cfg)
    pts, weights = _cluster(cfg, b)
    quad = geo.SigmaQuadrature(np.array(pts), weights)
    d = b.dim_target
    P = had.build_discrete_parametrix(
        b, pts, weights, order=0,
        w_smooth=had.constant_w_smooth(0.3 * np.eye(d)))
    fam = wick.HadamardWickFamily(b)
    rng = np.random.default_rng(seed)
    f_values = 0.5 + rng.random(len(pts))
    phi = {i: rng.normal(size=d, scale=0.3) for i in range(len(pts))}

    rows = []
    json_rows = []
    for lam in cfg.renorm.lambdas:
        out = rgflow.renormalization_identity_check(
            b, quad, f_values, fam, cfg.renorm.nu, lam, P, phi)
        json_rows.append({"lambda": float(lam), "nu": float(cfg.renorm.nu),
                          "lhs": out["lhs"], "rhs": out["rhs"],
                          "residual": out["residual"]})
        rows.append(_row(f"renorm.scale-identity[{lam:g}]",
                         "interaction from the rescaled powers vs the "
                         "renormalised-metric form", out["residual"], 1e-8))

    path = run_dir / "identity_checks.json"
    path.write_text(json.dumps(json_rows, sort_keys=True, indent=2) + "\n")
    return rows, [path]
