"""Check suites behind the command-line subcommands.

Each suite takes a :class:`~qdlab.config.RunConfig` and returns a
:class:`~qdlab.report.Report` whose checks carry the pass/fail verdicts.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .config import FLAGSHIP, ConfigError, RunConfig, grid_parameters, random_parameters
from .contour import ContourPath, Tolerances, integrate_path, circle
from .cover import (
    CoverCycle,
    all_periods,
    build_cover,
    elliptic_oracle,
    homology_cycles,
    period,
    second_kind_periods,
    tau_pairing,
    tau_pairing_homogeneity_value,
    tau_pairing_residue_value,
)
from .fd import central, richardson
from .goldman import GeomLoop, default_pair_suite, verify_goldman
from .loops import sausage, stadium
from .monodromy import (
    SchroedingerData,
    keyhole_loops,
    monodromy_and_derivatives,
    phi_transfer,
    psi_monodromy,
    puncture_monodromies,
    schwarzian_of_ratio,
    third_order_residual,
)
from .report import Check, Report, check_below, check_close, encode
from .sphere import HeunParameters, heun_Q
from .symplectic import (
    ChartPoint,
    chart_from_heun,
    check_form_equality,
    check_generating_function,
    check_potential,
    convergence_table,
    cotangent_pairing_check,
)
from .symplectic import period_jacobian as chart_jacobian
from .variational import _periods_at, period_jacobian, period_jacobian_analytic, variational_table

__all__ = [
    "DEFAULT_CHART_N5",
    "conventions",
    "monodromy_suite",
    "periods_suite",
    "goldman_suite",
    "symplectic_suite",
    "variational_suite",
    "engine_gates",
    "tolerance_halving",
    "fd_order_table",
]

DEFAULT_CHART_N5 = ChartPoint((1.0 + 0.3j, 0.7 - 0.2j), (cmath.log(-0.8 + 0.9j), cmath.log(2.1 - 0.7j)))

SCHWARZIAN_C = 2
THIRD_ORDER_NOTE = ("Lambda_zzz = 4 u Lambda_z + 2 u_z Lambda with u = S_v / (2 Q) - 1; "
                "the opposite sign of u leaves an O(1) residual")
PRODUCT_ORDER = ("T(g2) T(g1) for g1 then g2; T_inf T_m ... T_1 = I with finite punctures "
                 "counterclockwise from the direction of infinity")


def conventions(kappa=None, nu_sign=None, potential_sign=None) -> dict:
    return {
        "kappa_norm": kappa,
        "nu_sign": nu_sign,
        "potential_sign": potential_sign,
        "schwarzian_c": SCHWARZIAN_C,
        "product_order": PRODUCT_ORDER,
        "third_order_equation": THIRD_ORDER_NOTE,
        "poisson_tm": "{mu, t} = t (1 - t) / (4 pi i)",
        "intersection_basis": "integer, a_i o b_j = delta_ij",
    }


def _tol(cfg: RunConfig, default: float = 1e-12) -> Tolerances:
    t = cfg.tol if cfg.tol is not None else default
    return Tolerances(abs_tol=t, rel_tol=t)


def _model_params(cfg: RunConfig) -> HeunParameters:
    if cfg.punctures is not None or cfg.chart_p is not None:
        raise ConfigError("this command needs the four-puncture (t, mu) model")
    return cfg.heun()


# --------------------------------------------------------------------------
# monodromy
# --------------------------------------------------------------------------


def _monodromy_checks(rep: Report, data: SchroedingerData, tag: str, basepoint, tol) -> dict:
    m = puncture_monodromies(data, basepoint, tol)
    rep.add(check_below(f"{tag} product residual", m.product_residual, 1e-7))
    rep.add(check_below(f"{tag} max |det M - 1|", max(m.det_residuals), 1e-8))
    rep.add(check_below(f"{tag} max |tr M - 2|", max(m.trace_residuals), 1e-7))
    cond = float(np.finfo(float).eps * np.prod([np.linalg.norm(M, 2) for M in m.matrices]))
    return {"rounding_scale": cond, "basepoint": m.basepoint, "order": list(m.order), "matrices": list(m.matrices),
            "product_residual": m.product_residual, "det_residuals": m.det_residuals,
            "trace_residuals": m.trace_residuals}


def monodromy_suite(cfg: RunConfig) -> Report:
    """Local monodromies, their product relation, and optional user loops and grid."""
    rep = Report("monodromy", cfg.to_dict(), conventions())
    tol = _tol(cfg)
    rep.start("total")
    Q = cfg.quaddiff()
    data = SchroedingerData(Q)
    rep.results["point"] = _monodromy_checks(rep, data, "point", cfg.basepoint, tol)
    if cfg.punctures is None and cfg.chart_p is None and not Q.is_zero:
        _, loops = keyhole_loops(Q.base.punctures, rep.results["point"]["basepoint"])
        gauge = []
        for L in loops:
            pm = psi_monodromy(data, L.path, tol)
            gauge.append({"loop": L.label, "factor": pm["factor"], "sheet_flip": pm["sheet_flip"],
                          "gauge_residual": pm["gauge_residual"]})
        rep.add(check_below("point Psi gauge relation", max(g["gauge_residual"] for g in gauge), 1e-7))
        rep.results["psi"] = gauge
    if cfg.loops:
        rows = []
        for k, loop in enumerate(cfg.loops):
            M = phi_transfer(data, loop, tol)
            rows.append({"loop": k, "matrix": M, "trace": complex(np.trace(M)),
                         "det_residual": abs(np.linalg.det(M) - 1)})
            rep.add(check_below(f"loop {k} |det M - 1|", rows[-1]["det_residual"], 1e-8))
        rep.results["loops"] = rows
    if cfg.grid is not None:
        rep.start("grid")
        grid = []
        for k, p in enumerate(grid_parameters(*cfg.grid)):
            d = SchroedingerData(heun_Q(p))
            res = _monodromy_checks(rep, d, f"grid[{k}]", None, tol)
            grid.append({"t": p.t, "mu": p.mu, "product_residual": res["product_residual"],
                         "max_det_residual": max(res["det_residuals"]),
                         "max_trace_residual": max(res["trace_residuals"]),
                         "rounding_scale": res["rounding_scale"]})
        rep.results["grid"] = grid
        rep.stop("grid")
    rep.stop("total")
    return rep


# --------------------------------------------------------------------------
# periods
# --------------------------------------------------------------------------


def _sign_match(a: complex, b: complex) -> tuple[complex, int]:
    """(b or -b, sign) closest to a."""
    return (b, 1) if abs(a - b) <= abs(a + b) else (-b, -1)


def _deformed_cycles(cover, basis) -> list[CoverCycle]:
    """Representatives of the basis cycles with shrunk tubes, same orientation."""
    order = list(basis.cuts.order)
    g = basis.genus
    out = []
    for i, c in enumerate(basis.a):
        pts = order[2 * i: 2 * i + 2]
        r = min(abs(c.path.start - p) for p in pts)
        path = stadium(pts[0], pts[1], 0.6 * r)
        if path.winding_number(pts[0]) != c.path.winding_number(pts[0]):
            path = path.reversed()
        out.append(CoverCycle(path, cover.w_principal(path.start), c.label + "'"))
    for i, c in enumerate(basis.b):
        chain = order[2 * i + 1: 2 * g + 1]
        r = min(abs(c.path.start - p) for p in chain)
        path = sausage(chain, 0.75 * r)
        if path.winding_number(chain[0]) != c.path.winding_number(chain[0]):
            path = path.reversed()
        out.append(CoverCycle(path, cover.w_principal(path.start), c.label + "'"))
    return out


def _tau_checks(rep: Report, tag: str, cover, basis, tol, n: int) -> dict:
    pd = all_periods(cover, basis, tol)
    sk = second_kind_periods(cover, basis, tol)
    tau = tau_pairing(pd, sk)
    homog = tau_pairing_homogeneity_value(n, 0)
    n_poles = cover.Q.base.n
    oracle = tau_pairing_residue_value(n_poles, n_poles - 4)
    rep.add(check_close(f"{tag} tau pairing = (2 pi i / 3)(n - 5)", tau, homog, 1e-6))
    rep.add(check_close(f"{tag} tau pairing = residue value", tau, oracle, 1e-6,
                        note="-2 pi i (3 n_poles / 4 - 5 n_zeros / 12), simple poles at every puncture"))
    return {"A": pd.A, "B": pd.B, "A_tilde": sk.A_tilde, "B_tilde": sk.B_tilde, "tau": tau,
            "tau_homogeneity_value": homog, "tau_residue_value": oracle}


def _homotopy_check(rep: Report, tag: str, cover, basis, tol, P) -> list:
    Pd = []
    for c, p0 in zip(_deformed_cycles(cover, basis), P):
        pd, s = _sign_match(p0, period(cover, c, tol))
        Pd.append(pd)
    rep.add(check_close(f"{tag} homotopy invariance (up to deck sign)", Pd, P, 1e-9, relative=True))
    return Pd


def periods_suite(cfg: RunConfig) -> Report:
    """Period engine: elliptic oracle, scaling, Wronskian, homotopy and the tau pairing."""
    rep = Report("periods", cfg.to_dict(), conventions())
    tol = _tol(cfg)
    rep.start("total")
    if cfg.n == 4 and cfg.punctures is None and cfg.chart_p is None:
        params = cfg.heun()
        Q = heun_Q(params)
        cover = build_cover(Q)
        basis = homology_cycles(cover, tol=tol)
        pj = period_jacobian(params, basis, tol)
        P = pj.periods
        g = basis.genus
        A, B = P[0], P[g]
        o1, o2 = elliptic_oracle(params.t, params.mu)
        cand = []
        for x, y in ((o1, o2), (o2, o1)):
            mA, _ = _sign_match(A, x)
            mB, _ = _sign_match(B, y)
            cand.append((max(abs(A - mA), abs(B - mB)), mA, mB))
        _, mA, mB = min(cand, key=lambda r: r[0])
        rep.add(check_close("AGM oracle (up to sign)", [A, B], [mA, mB], 1e-9, relative=True))
        P4 = _periods_at(HeunParameters(params.t, 4 * params.mu), basis, tol)
        rep.add(check_close("sqrt(mu) scaling P(4 mu) = 2 P(mu)", P4, 2 * P, 1e-9, relative=True))
        rep.add(check_close("d P / d t against integral of v / (2 (x - t))", pj.J,
                            period_jacobian_analytic(params, basis, tol), 1e-8, relative=True))
        W0 = (A * pj.J[g, 0] - B * pj.J[0, 0]) * params.t * (1 - params.t) / params.mu
        delta = 0.05 * min(abs(params.t), abs(1 - params.t))
        Ws = []
        for k in range(3):
            t = params.t + delta * cmath.exp(2j * math.pi * k / 3)
            pk = period_jacobian(HeunParameters(t, params.mu), basis, tol)
            Ws.append((pk.periods[0] * pk.J[g, 0] - pk.periods[g] * pk.J[0, 0]) * t * (1 - t) / params.mu)
        rep.add(check_close("Picard-Fuchs Wronskian constancy", Ws, [W0] * len(Ws), 1e-6, relative=True,
                            note="(A B_t - B A_t) t (1 - t) / mu"))
        Pd = _homotopy_check(rep, "n=4", cover, basis, tol, P)
        rep.results.update({"periods": P, "oracle": [mA, mB], "periods_4mu": P4, "wronskian": W0,
                            "wronskian_nearby": Ws, "deformed_periods": Pd, "jacobian": pj.J})
        rep.results["tau"] = _tau_checks(rep, "n=4", cover, basis, tol, 4)
    else:
        Q = DEFAULT_CHART_N5.quaddiff() if (cfg.punctures is None and cfg.chart_p is None) else cfg.quaddiff()
        cover = build_cover(Q)
        basis = homology_cycles(cover, tol=tol)
        n = Q.base.n
        P = np.array([period(cover, c, tol) for c in basis.cycles])
        Pd = _homotopy_check(rep, f"n={n}", cover, basis, tol, P)
        rep.results.update({"n": n, "genus": basis.genus, "intersection": basis.intersection,
                            "periods": P, "deformed_periods": Pd})
        rep.results["tau"] = _tau_checks(rep, f"n={n}", cover, basis, tol, n)
    rep.stop("total")
    return rep


# --------------------------------------------------------------------------
# Goldman bracket
# --------------------------------------------------------------------------


def _measure_kappa(params: HeunParameters, tol=None) -> tuple[complex, int]:
    jac = chart_jacobian(chart_from_heun(params), tol=tol)
    return check_form_equality(jac).kappa, check_potential(jac)["sign"]


def goldman_suite(cfg: RunConfig, kappa: complex | None = None) -> Report:
    """Bracket of trace functions on the flagship point and seeded random draws."""
    params = _model_params(cfg)
    tol = None if cfg.tol is None else _tol(cfg)
    rep = Report("verify-goldman", cfg.to_dict(), conventions())
    rep.start("total")
    if kappa is None:
        rep.start("kappa")
        kappa, _ = _measure_kappa(params)
        rep.stop("kappa")
    rep.conventions["kappa_norm"] = kappa
    points = [params] + random_parameters(cfg.random_draws, cfg.seed)
    out = []
    nu_signs = []
    for k, p in enumerate(points):
        tag = "point" if k == 0 else f"draw[{k}]"
        pairs, ci = default_pair_suite(p)
        if k == 0 and cfg.loops:
            clear = 1e-3
            user = [GeomLoop(L, clear, f"user{j}") for j, L in enumerate(cfg.loops)]
            pairs += [(f"user {j} | {j + 1}", user[j], user[j + 1]) for j in range(0, len(user) - 1, 2)]
        cal, reps = verify_goldman(p, pairs, ci, kappa, strict=False, tol=tol)
        nu_signs.append(cal.sign)
        best = min(abs(cal.lhs - cal.rhs_plus), abs(cal.lhs + cal.rhs_plus))
        rep.add(check_below(f"{tag} sign calibration on {cal.pair}", best, 1e-6,
                            note=f"LHS / RHS(nu=+1) = {cal.ratio.real:.12g}{cal.ratio.imag:+.3g}i"))
        for r in reps:
            rep.add(check_close(f"{tag} {r.pair}: LHS = RHS", r.lhs_tm, r.rhs, 1e-6))
            rep.add(check_below(f"{tag} {r.pair}: two-chart LHS agreement", r.chart_rel_err, 1e-5))
        out.append({"t": p.t, "mu": p.mu, "calibration": cal.to_dict(), "pairs": [r.to_dict() for r in reps]})
    rep.conventions["nu_sign"] = nu_signs[0]
    rep.results["points"] = out
    rep.stop("total")
    return rep


# --------------------------------------------------------------------------
# symplectic structure
# --------------------------------------------------------------------------


def symplectic_suite(cfg: RunConfig, convergence: bool = True) -> Report:
    """Form equality, potential, generating function and cotangent pairing on n = 4 and n = 5 charts.

    kappa_norm and the potential sign are fitted on the first chart and frozen.
    """
    tol = _tol(cfg)
    rep = Report("symplectic-check", cfg.to_dict(), conventions())
    rep.start("total")
    charts: list[tuple[str, ChartPoint, float, bool]] = []
    want4 = "n" not in cfg.explicit or cfg.n == 4
    want5 = "n" not in cfg.explicit or cfg.n == 5
    if cfg.chart_p is not None:
        ch = ChartPoint(tuple(cfg.chart_p), tuple(cfg.chart_q))
        charts.append((f"n={ch.n}", ch, 1e-6 if ch.n == 4 else 1e-5, True))
    else:
        if want4:
            charts.append(("n=4", chart_from_heun(_model_params(cfg)), 1e-6, True))
            charts.append(("n=4 draw", chart_from_heun(random_parameters(1, cfg.seed)[0]), 1e-6, False))
        if want5:
            charts.append(("n=5", DEFAULT_CHART_N5, 1e-5, True))
    if not charts:
        raise ConfigError("symplectic-check supports n = 4 and n = 5")
    kappa0 = sign0 = None
    kappas, results = [], []
    for tag, ch, eps, full in charts:
        rep.start(tag)
        jac = chart_jacobian(ch, tol=tol)
        form = check_form_equality(jac)
        pot = check_potential(jac)
        if kappa0 is None:
            kappa0, sign0 = form.kappa, pot["sign"]
        kappas.append(form.kappa)
        frozen = float(np.max(np.abs(kappa0 * form.omega_pulled - form.omega_can)))
        rep.add(check_below(f"{tag} |kappa J^T Omega J - Omega_can|", frozen, eps))
        rep.add(check_below(f"{tag} potential identity", pot["max_residual"], eps,
                            note=f"measured sign {pot['sign']}, frozen sign {sign0}"))
        rep.add(_sign_check(f"{tag} potential sign matches frozen", pot["sign"], sign0))
        res = {"chart": tag, "p": ch.p, "q": ch.q, "periods": jac.periods, "jacobian": jac.J,
               "form": form.to_dict(), "form_residual_frozen_kappa": frozen, "potential": pot}
        if full:
            gen = check_generating_function(jac, seed=cfg.seed, sign=sign0, tol=tol)
            rep.add(check_below(f"{tag} generating function dG = 2 A dB - sign p dq", gen["generating_residual"], eps))
            rep.add(check_below(f"{tag} Leibniz dG = A dB + B dA", gen["leibniz_residual"], eps))
            cot = cotangent_pairing_check(jac, tol)
            rep.add(check_below(f"{tag} cotangent pairing dq/dP = c int Q_k / v", cot["relative_residual"], eps))
            res.update({"generating_function": gen, "cotangent_pairing": cot})
            if convergence and ch.n == 4:
                table = convergence_table(ch, tol=tol)
                rep.add(check_below(f"{tag} FD convergence order >= 2 (2 - min order)",
                                    max(0.0, 2 - min(r["order"] for r in table[1:])), 0.1,
                                    note="orders " + ", ".join(f"{r['order']:.3f}" for r in table[1:])))
                res["convergence"] = table
        results.append(res)
        rep.stop(tag)
    spread = max(abs(k - kappa0) for k in kappas)
    rep.add(check_below("kappa_norm constant across charts", spread, 1e-6))
    rep.conventions.update({"kappa_norm": kappa0, "potential_sign": sign0})
    rep.results["charts"] = results
    rep.results["kappa_norm_integer_basis_expectation"] = {"expected": 1.0, "measured": kappa0,
                                                           "matches": abs(kappa0 - 1) < 1e-6}
    rep.stop("total")
    return rep


def _sign_check(name: str, a: int, b: int) -> Check:
    return Check(name, a, b, float(abs(a - b)), 0.5, a == b)


# --------------------------------------------------------------------------
# variational formulas
# --------------------------------------------------------------------------


def _dM_fd(params: HeunParameters, loop: ContourPath, tol, h: float = 1e-4):
    rec: list = []
    monodromy_and_derivatives(params, loop, tol, record=rec)
    ft = lambda t: monodromy_and_derivatives(HeunParameters(t, params.mu), loop, tol, mesh=rec)[0]
    fm = lambda m: monodromy_and_derivatives(HeunParameters(params.t, m), loop, tol, mesh=rec)[0]
    return richardson(ft, params.t, h).value, richardson(fm, params.mu, h).value


def variational_suite(cfg: RunConfig, probe: complex = 0.5 + 0.5j, table: bool = True,
                      gates: bool = True) -> Report:
    """Variational formulas, the third-order equation and the dual-pipeline tables."""
    params = _model_params(cfg)
    tol = _tol(cfg)
    fd_tol = _tol(cfg, 1e-13)
    rep = Report("variational-check", cfg.to_dict(), conventions())
    rep.start("total")
    Q = heun_Q(params)
    _, loops = keyhole_loops(Q.base.punctures, cfg.basepoint)
    rows = []
    for L in loops:
        M, Mt, Mm = monodromy_and_derivatives(params, L.path, fd_tol)
        ft, fm = _dM_fd(params, L.path, fd_tol)
        rep.add(check_close(f"dM/dt loop {L.label}", Mt, ft, 1e-6, relative=True))
        rep.add(check_close(f"dM/dmu loop {L.label}", Mm, fm, 1e-6, relative=True))
        rows.append({"loop": L.label, "dM_dt": Mt, "dM_dt_fd": ft, "dM_dmu": Mm, "dM_dmu_fd": fm})
    rep.results["dM"] = rows
    third = third_order_residual(Q, probe, 1.0, h=0.01)
    rep.add(check_below("Lambda third-order residual", third["residual"], 1e-6,
                        note=f"sixth-order differences, h = {third['h']}"))
    flipped = third_order_residual(Q, probe, 1.0, h=0.01, sign=-1)
    sch = schwarzian_of_ratio(Q, probe, h=0.005)
    rep.add(check_below(f"Schwarzian of ratio = {SCHWARZIAN_C} Q", sch["residuals"][SCHWARZIAN_C], 1e-6))
    rep.results.update({"third_order": third, "third_order_opposite_u": flipped, "schwarzian": sch})
    if table:
        rep.start("table")
        vt = variational_table(params, probe, loops[1].path, tol)
        for r in vt:
            if r.path_class_met:
                rep.add(check_below(f"{r.quantity} [{r.cycle}] vs constrained FD", r.discrepancy, 1e-4))
        rep.results["table"] = [r.to_dict() for r in vt]
        rep.stop("table")
    if gates:
        rep.start("gates")
        g = engine_gates(params, cfg.seed)
        rep.extend(g["checks"])
        rep.results["gates"] = {k: v for k, v in g.items() if k != "checks"}
        rep.stop("gates")
    rep.stop("total")
    return rep


# --------------------------------------------------------------------------
# engine quality gates
# --------------------------------------------------------------------------


def tolerance_halving(tols=(1e-6, 5e-7, 2.5e-7, 1.25e-7)) -> list[dict]:
    """Global error of analytic test problems as abs_tol and rel_tol are halved.

    Problems: y' = y around the unit circle (exact y = 1 on return) and
    y' = i y / x around the unit circle (exact y = e^{-2 pi}).
    """
    problems = [
        ("exp around circle", lambda x, y: y, 1.0 + 0j),
        ("power around circle", lambda x, y: 1j * y / x, cmath.exp(-2 * math.pi)),
    ]
    loop = circle(0j, 1.0)
    rows = []
    for name, f, exact in problems:
        errs = []
        for t in tols:
            y = integrate_path(lambda x, y, f=f: np.array([f(x, y[0])]), np.array([1 + 0j]), loop,
                               Tolerances(abs_tol=t, rel_tol=t))
            errs.append(abs(complex(y[0]) - exact))
        ratios = [a / b for a, b in zip(errs[:-1], errs[1:])]
        rows.append({"problem": name, "tolerances": list(tols), "errors": errs, "ratios": ratios})
    return rows


def fd_order_table(params: HeunParameters, steps=(4e-2, 2e-2, 1e-2), tol=None) -> list[dict]:
    """Plain central differences of the periods in t against the analytic t-derivative."""
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    Q = heun_Q(params)
    basis = homology_cycles(build_cover(Q), tol=tol)
    exact = period_jacobian_analytic(params, basis, tol)[:, 0]
    records = [[] for _ in basis.cycles]
    _periods_at(params, basis, tol, records=records)
    rows = []
    for h in steps:
        d = central(lambda t: _periods_at(HeunParameters(t, params.mu), basis, tol, meshes=records), params.t, h)
        rows.append({"step": h, "error": float(np.max(np.abs(d - exact)))})
    for a, b in zip(rows[:-1], rows[1:]):
        b["order"] = math.log(a["error"] / b["error"]) / math.log(a["step"] / b["step"])
    return rows


def engine_gates(params: HeunParameters = FLAGSHIP, seed: int = 0) -> dict:
    checks = []
    fd = fd_order_table(params)
    worst = min(r["order"] for r in fd[1:])
    checks.append(Check("FD convergence order under step halving", worst, 2.0, max(0.0, 2.0 - worst),
                        0.1, worst >= 1.9))
    th = tolerance_halving()
    gain = min(min(r["ratios"]) for r in th)
    checks.append(Check("integrator tolerance halving gain >= 4", gain, 4.0, max(0.0, 4.0 - gain), 0.0,
                        gain >= 4.0, note="local error per unit length is controlled"))
    a = encode([(p.t, p.mu) for p in random_parameters(3, seed)])
    b = encode([(p.t, p.mu) for p in random_parameters(3, seed)])
    x0, loops = keyhole_loops(heun_Q(params).base.punctures)
    m1 = phi_transfer(SchroedingerData(heun_Q(params)), loops[0].path)
    m2 = phi_transfer(SchroedingerData(heun_Q(params)), loops[0].path)
    same = a == b and bool(np.array_equal(m1, m2))
    checks.append(Check("determinism under fixed seed", same, True, 0.0 if same else 1.0, 0.5, same))
    return {"checks": checks, "fd_order": fd, "tolerance_halving": th}
