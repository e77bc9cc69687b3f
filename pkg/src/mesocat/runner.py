"""Scenario engines: turn one configuration into a time series of observables.

Each grid time yields one :class:`TimeSeriesRow` with the damping factors,
the four conditional probabilities and eta, the eigenvalue pairs of both
conditioned densities, purities, occupations and the recurrence flag.
Times are reported in units of t_c = 1/gamma.

Eigenvalue columns: when the two field labels are an antipodal pair (case A
at phi = pi) lam_plus/lam_minus are assigned by eigenvector parity, i.e. the
|alpha> + |-alpha> branch is "plus" even when it carries the smaller
eigenvalue, matching the closed-form pair.  Otherwise the labels are only
defined up to ordering and the columns hold the descending values.

Independent grid times are evaluated concurrently (thread pool; results are
assembled in grid order, so output bytes do not depend on scheduling).  The
brute-force engine steps sequentially because each grid point continues the
previous integration.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import bath as bathmod
from . import coherent, fock, lindblad
from . import protocol as proto
from .config import ScenarioConfig, apply_sweep_value
from .errors import InvalidArgumentError

ROW_FIELDS = (
    "t",
    "gamma_a",
    "gamma_b_abs",
    "gamma_b_arg",
    "p_ee",
    "p_eg",
    "p_ge",
    "p_gg",
    "eta",
    "lam_e_plus",
    "lam_e_minus",
    "lam_g_plus",
    "lam_g_minus",
    "purity_e",
    "purity_g",
    "defect_e",
    "defect_g",
    "n_field",
    "n_bath",
    "recurrence_warning",
)

_MAX_WORKERS = 8


@dataclass(frozen=True)
class TimeSeriesRow:
    t: float
    gamma_a: float
    gamma_b_abs: float
    gamma_b_arg: float
    p_ee: float
    p_eg: float
    p_ge: float
    p_gg: float
    eta: float
    lam_e_plus: float
    lam_e_minus: float
    lam_g_plus: float
    lam_g_minus: float
    purity_e: float
    purity_g: float
    defect_e: float
    defect_g: float
    n_field: float
    n_bath: float
    recurrence_warning: bool

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in ROW_FIELDS}


def scenario_params(cfg: ScenarioConfig) -> proto.ProtocolParams:
    case = proto.ProtocolCase.CASE_A if cfg.case == "a" else proto.ProtocolCase.CASE_B
    return proto.ProtocolParams(case, cfg.alpha0, cfg.phi)


def time_grid(cfg: ScenarioConfig) -> np.ndarray:
    """Grid in units of t_c, from 0 to t_max_over_tc inclusive."""
    return np.linspace(0.0, cfg.time.t_max_over_tc, cfg.time.points)


def _labels_antipodal(labels) -> bool:
    if len(labels) != 2:
        return False
    scale = max(1.0, abs(labels[0]), abs(labels[1]))
    return abs(labels[0] + labels[1]) < 1e-9 * scale


def _assign_from_spectrum(spec: coherent.Spectrum) -> tuple[float, float]:
    lams = list(spec.eigenvalues) + [0.0, 0.0]
    if _labels_antipodal(spec.labels):
        plus = minus = None
        for lam, vec in zip(spec.eigenvalues, spec.eigenvectors):
            even_parity = (vec[0] * vec[1].conjugate()).real >= 0.0
            if even_parity and plus is None:
                plus = lam
            elif not even_parity and minus is None:
                minus = lam
        if plus is not None and minus is not None:
            return plus, minus
    return lams[0], lams[1]


def _pair_diagnostics(state: coherent.FieldBathSuperposition) -> tuple[float, complex]:
    """(gamma_a, gamma_b) of a prepared/evolved state; trivial for one branch."""
    if len(state.branches) == 1:
        return 1.0, 1.0 + 0.0j
    return bathmod.gamma_a(state), bathmod.gamma_b(state)


def _microscopic_rows(cfg: ScenarioConfig, params: proto.ProtocolParams) -> list[TimeSeriesRow]:
    spec = bathmod.discretize_flat_band(
        cfg.bath.gamma, cfg.bath.modes, cfg.bath.half_bandwidth
    )
    state_e = proto.prepare(params, proto.DetectionOutcome.E)
    state_g = proto.prepare(params, proto.DetectionOutcome.G)
    t_c = 1.0 / cfg.bath.gamma

    def compute(t_tc: float) -> TimeSeriesRow:
        t = t_tc * t_c
        se = bathmod.evolve(state_e, spec, t)
        sg = bathmod.evolve(state_g, spec, t)
        rho_e = coherent.reduce(se)
        rho_g = coherent.reduce(sg)
        rec = proto.conditional_probabilities(rho_e, rho_g, params)
        lam_e = _assign_from_spectrum(coherent.eigenvalues(rho_e))
        lam_g = _assign_from_spectrum(coherent.eigenvalues(rho_g))
        pur_e, pur_g = coherent.purity(rho_e), coherent.purity(rho_g)
        g_a, g_b = _pair_diagnostics(se)
        n_field, n_bath = coherent.occupations(se)
        return TimeSeriesRow(
            t=t_tc,
            gamma_a=g_a,
            gamma_b_abs=abs(g_b),
            gamma_b_arg=math.atan2(g_b.imag, g_b.real),
            p_ee=rec.p_ee,
            p_eg=rec.p_eg,
            p_ge=rec.p_ge,
            p_gg=rec.p_gg,
            eta=rec.eta,
            lam_e_plus=lam_e[0],
            lam_e_minus=lam_e[1],
            lam_g_plus=lam_g[0],
            lam_g_minus=lam_g[1],
            purity_e=pur_e,
            purity_g=pur_g,
            defect_e=1.0 - pur_e,
            defect_g=1.0 - pur_g,
            n_field=n_field,
            n_bath=n_bath,
            recurrence_warning=bool(t > bathmod.RECURRENCE_FRACTION * spec.recurrence_time),
        )

    grid = time_grid(cfg)
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, len(grid))) as pool:
        return list(pool.map(compute, grid))


def _master_rows(cfg: ScenarioConfig, params: proto.ProtocolParams) -> list[TimeSeriesRow]:
    mp = lindblad.MasterParams(cfg.master.gamma)
    state_e = proto.prepare(params, proto.DetectionOutcome.E)
    state_g = proto.prepare(params, proto.DetectionOutcome.G)
    labels0 = [br.field for br in state_e.branches]
    t_c = 1.0 / cfg.master.gamma
    n_field_0 = coherent.mean_photon(coherent.reduce(state_e))

    def compute(t_tc: float) -> TimeSeriesRow:
        t = t_tc * t_c
        rho_e = lindblad.me_reduce(state_e, mp, t)
        rho_g = lindblad.me_reduce(state_g, mp, t)
        rec = proto.conditional_probabilities(rho_e, rho_g, params)
        lam_e = _assign_from_spectrum(coherent.eigenvalues(rho_e))
        lam_g = _assign_from_spectrum(coherent.eigenvalues(rho_g))
        pur_e, pur_g = coherent.purity(rho_e), coherent.purity(rho_g)
        if len(labels0) == 1:
            g_a, g_b = 1.0, 1.0 + 0.0j
        else:
            l0_t = lindblad.me_amplitude(labels0[0], mp, t)
            l1_t = lindblad.me_amplitude(labels0[1], mp, t)
            g_a = abs(coherent.overlap(l1_t, l0_t))
            g_b = lindblad.me_dyad_factor(labels0[0], labels0[1], mp, t)
        n_field = coherent.mean_photon(rho_e)
        return TimeSeriesRow(
            t=t_tc,
            gamma_a=g_a,
            gamma_b_abs=abs(g_b),
            gamma_b_arg=math.atan2(g_b.imag, g_b.real),
            p_ee=rec.p_ee,
            p_eg=rec.p_eg,
            p_ge=rec.p_ge,
            p_gg=rec.p_gg,
            eta=rec.eta,
            lam_e_plus=lam_e[0],
            lam_e_minus=lam_e[1],
            lam_g_plus=lam_g[0],
            lam_g_minus=lam_g[1],
            purity_e=pur_e,
            purity_g=pur_g,
            defect_e=1.0 - pur_e,
            defect_g=1.0 - pur_g,
            n_field=n_field,
            n_bath=n_field_0 - n_field,
            recurrence_warning=False,
        )

    grid = time_grid(cfg)
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, len(grid))) as pool:
        return list(pool.map(compute, grid))


def _fock_assign(matrix: np.ndarray, labels_t, n_max: int) -> tuple[float, float]:
    lams, vecs = np.linalg.eigh(matrix)
    order = np.argsort(lams, kind="stable")[::-1]
    lams, vecs = lams[order], vecs[:, order]
    top = [float(min(max(l, 0.0), 1.0)) for l in lams[:2]]
    if len(top) < 2:
        top += [0.0]
    if _labels_antipodal(labels_t):
        signs = 1.0 - 2.0 * (np.arange(n_max + 1) % 2)
        parity0 = float(np.sum(signs * np.abs(vecs[:, 0]) ** 2))
        parity1 = float(np.sum(signs * np.abs(vecs[:, 1]) ** 2))
        if parity0 < 0.0 <= parity1:
            return top[1], top[0]
    return top[0], top[1]


def _fock_gamma_b(matrix, labels_t, weights) -> complex:
    vecs = [fock.coherent_to_fock(l, matrix.shape[0] - 1).amplitudes for l in labels_t]
    proj = np.array([[v1.conj() @ matrix @ v2 for v2 in vecs] for v1 in vecs])
    s = coherent.gram(labels_t).entries
    if np.linalg.eigvalsh(s).min() < coherent.GRAM_FLOOR:
        return complex("nan")
    s_inv = np.linalg.inv(s)
    coeff = s_inv @ proj @ s_inv
    return complex(coeff[0, 1] / (weights[0] * weights[1].conjugate()))


def _fock_rows(cfg: ScenarioConfig, params: proto.ProtocolParams) -> list[TimeSeriesRow]:
    gamma = cfg.master.gamma
    n_max = cfg.fock.n_max
    state_e = proto.prepare(params, proto.DetectionOutcome.E)
    state_g = proto.prepare(params, proto.DetectionOutcome.G)
    rho_e = fock.density_from_vector(fock.superposition_vector(state_e, n_max)).matrix
    rho_g = fock.density_from_vector(fock.superposition_vector(state_g, n_max)).matrix
    labels0 = [br.field for br in state_e.branches]
    weights_e = [br.weight for br in state_e.branches]
    t_c = 1.0 / gamma
    n_field_0 = fock.fock_mean_photon(fock.FockDensity(n_max, rho_e.copy()))
    mp_ops = {
        out: proto.measurement_product(params, out)
        for out in (proto.DetectionOutcome.E, proto.DetectionOutcome.G)
    }

    rows = []
    grid = time_grid(cfg)
    prev_t = 0.0
    for t_tc in grid:
        t = t_tc * t_c
        step = t - prev_t
        if step > 0.0:
            rho_e = fock.lindblad_evolve(rho_e, gamma, step, cfg.fock.dt * t_c)
            rho_g = fock.lindblad_evolve(rho_g, gamma, step, cfg.fock.dt * t_c)
        prev_t = t
        de = fock.FockDensity(n_max, rho_e.copy())
        dg = fock.FockDensity(n_max, rho_g.copy())
        p_ee = fock.fock_measure(mp_ops[proto.DetectionOutcome.E], de).real
        p_eg = fock.fock_measure(mp_ops[proto.DetectionOutcome.G], de).real
        p_ge = fock.fock_measure(mp_ops[proto.DetectionOutcome.E], dg).real
        p_gg = fock.fock_measure(mp_ops[proto.DetectionOutcome.G], dg).real
        rec = proto.CorrelationRecord(
            p_ee=min(max(p_ee, 0.0), 1.0),
            p_eg=min(max(p_eg, 0.0), 1.0),
            p_ge=min(max(p_ge, 0.0), 1.0),
            p_gg=min(max(p_gg, 0.0), 1.0),
            eta=p_ee - p_ge,
        )
        decay = math.exp(-0.5 * gamma * t)
        labels_t = [l * decay for l in labels0]
        lam_e = _fock_assign(rho_e, labels_t, n_max)
        lam_g = _fock_assign(rho_g, labels_t, n_max)
        pur_e, pur_g = fock.fock_purity(de), fock.fock_purity(dg)
        if len(labels0) == 1:
            g_a, g_b = 1.0, 1.0 + 0.0j
        else:
            g_a = abs(coherent.overlap(labels_t[1], labels_t[0]))
            g_b = _fock_gamma_b(rho_e, labels_t, weights_e)
        n_field = fock.fock_mean_photon(de)
        rows.append(
            TimeSeriesRow(
                t=t_tc,
                gamma_a=g_a,
                gamma_b_abs=abs(g_b),
                gamma_b_arg=math.atan2(g_b.imag, g_b.real),
                p_ee=rec.p_ee,
                p_eg=rec.p_eg,
                p_ge=rec.p_ge,
                p_gg=rec.p_gg,
                eta=rec.eta,
                lam_e_plus=lam_e[0],
                lam_e_minus=lam_e[1],
                lam_g_plus=lam_g[0],
                lam_g_minus=lam_g[1],
                purity_e=pur_e,
                purity_g=pur_g,
                defect_e=1.0 - pur_e,
                defect_g=1.0 - pur_g,
                n_field=n_field,
                n_bath=n_field_0 - n_field,
                recurrence_warning=False,
            )
        )
    return rows


def run_scenario(cfg: ScenarioConfig) -> list[TimeSeriesRow]:
    """Full time series of one scenario with its configured engine."""
    params = scenario_params(cfg)
    if cfg.engine == "microscopic":
        return _microscopic_rows(cfg, params)
    if cfg.engine == "master":
        return _master_rows(cfg, params)
    if cfg.engine == "fock":
        return _fock_rows(cfg, params)
    raise InvalidArgumentError(f"unknown engine {cfg.engine!r}")


# ---------------------------------------------------------------------------
# compare and sweep drivers

#: log-spaced early-time grid (units of t_c) for the short-time defect slopes
SLOPE_GRID = np.logspace(-3.0, -2.0, 9)


def _defect_slope_microscopic(cfg: ScenarioConfig, params) -> float:
    spec = bathmod.discretize_flat_band(
        cfg.bath.gamma, cfg.bath.modes, cfg.bath.half_bandwidth
    )
    state_e = proto.prepare(params, proto.DetectionOutcome.E)
    t_c = 1.0 / cfg.bath.gamma
    defects = [
        coherent.idempotency_defect(coherent.reduce(bathmod.evolve(state_e, spec, t * t_c)))
        for t in SLOPE_GRID
    ]
    return float(np.polyfit(np.log(SLOPE_GRID), np.log(defects), 1)[0])


def _defect_slope_master(cfg: ScenarioConfig, params) -> float:
    mp = lindblad.MasterParams(cfg.master.gamma)
    state_e = proto.prepare(params, proto.DetectionOutcome.E)
    t_c = 1.0 / cfg.master.gamma
    defects = [
        coherent.idempotency_defect(lindblad.me_reduce(state_e, mp, t * t_c))
        for t in SLOPE_GRID
    ]
    return float(np.polyfit(np.log(SLOPE_GRID), np.log(defects), 1)[0])


def run_compare(cfg: ScenarioConfig) -> tuple[list[TimeSeriesRow], list[TimeSeriesRow], dict]:
    """Run the microscopic and master engines on one scenario, plus a summary.

    The summary reports the largest |eta_micro - eta_master| over the grid
    and the fitted log-log short-time slopes of defect_e for both engines on
    the dedicated grid t/t_c in [1e-3, 1e-2] (quadratic vs linear onset).
    """
    params = scenario_params(cfg)
    rows_micro = _microscopic_rows(replace(cfg, engine="microscopic"), params)
    rows_master = _master_rows(replace(cfg, engine="master"), params)
    max_gap = max(
        abs(a.eta - b.eta) for a, b in zip(rows_micro, rows_master)
    )
    summary = {
        "max_abs_eta_gap": max_gap,
        "defect_slope_micro": _defect_slope_microscopic(cfg, params),
        "defect_slope_master": _defect_slope_master(cfg, params),
        "slope_grid_t_over_tc": [float(SLOPE_GRID[0]), float(SLOPE_GRID[-1])],
        "grid_points": cfg.time.points,
        "t_max_over_tc": cfg.time.t_max_over_tc,
    }
    return rows_micro, rows_master, summary


def run_sweep(
    cfg: ScenarioConfig, param: str, values: list[float]
) -> list[tuple[float, list[TimeSeriesRow]]]:
    """One scenario per swept value, computed concurrently, ordered by value."""
    ordered = sorted(values)
    configs = [apply_sweep_value(cfg, param, v) for v in ordered]
    with ThreadPoolExecutor(max_workers=min(_MAX_WORKERS, len(configs))) as pool:
        results = list(pool.map(run_scenario, configs))
    return list(zip(ordered, results))
