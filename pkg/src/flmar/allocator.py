"""Joint allocation of transmit power, bandwidth, CPU frequency and frame
resolution for synchronous federated rounds.

The solver runs a block-coordinate descent around an epigraph variable: for
a candidate round-time budget tau the communication subproblem is solved in
closed form (FDMA: minimum-energy bandwidth split via one multiplier
bisection with a Lambert-W inversion; NOMA: per-channel power fixed point),
CPU frequencies follow by deadline inversion, and tau itself is located by
golden-section search.  Frame resolutions then improve through exact
per-device coordinate moves, and the outer loop repeats until the objective
stops improving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from .accounting import (
    Allocation,
    Scenario,
    SystemMetrics,
    Weights,
    objective,
    system_metrics,
)
from .channel import ChannelPairing
from .compute import detection_accuracy
from .scenario import ScenarioValidationError

_LN2 = math.log(2.0)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

MAX_OUTER_ITERATIONS = 50
OUTER_REL_TOL = 1e-6
GOLDEN_TOL_FRACTION = 1e-4
_ROOT_ITERS = 80          # per-device scalar root bisections
_MULTIPLIER_ITERS = 48    # log-space bisection on the bandwidth price
_FLOOR_ITERS = 54         # bandwidth inversion when power sits at p_min
_RESPLIT_ITERS = 54       # compute/upload time split bisection
_INNER_ALTERNATIONS = 8   # comm solve <-> time resplit rounds per budget
_INNER_REL_TOL = 1e-7


class InfeasibleBudgetError(ValueError):
    """The round-time budget cannot be met within the power/bandwidth limits."""


class InfeasibleScenarioError(RuntimeError):
    """No round-time budget satisfies the power and bandwidth limits."""


@dataclass
class SolveReport:
    """Result of one solver run.

    ``objective_trace`` records the best objective seen after each outer
    iteration, so it is non-increasing by construction.
    """

    allocation: Allocation
    metrics: SystemMetrics
    objective: float
    outer_iterations: int
    converged: bool
    objective_trace: list


class _Env:
    """Scenario unpacked into flat arrays, indexed by device position."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        dev = scenario.devices
        self.n = len(dev)
        self.ids = [d.id for d in dev]
        self.g = np.array([d.gain for d in dev], dtype=float)
        self.pmin = np.array([d.p_min for d in dev], dtype=float)
        self.pmax = np.array([d.p_max for d in dev], dtype=float)
        self.fmin = np.array([d.f_min for d in dev], dtype=float)
        self.fmax = np.array([d.f_max for d in dev], dtype=float)
        self.kappa = np.array([d.kappa for d in dev], dtype=float)
        self.cpp = np.array([d.cycles_per_pixel for d in dev], dtype=float)
        self.frames = np.array([d.dataset_frames for d in dev], dtype=float)
        self.res_sets = [np.array(d.resolutions, dtype=int) for d in dev]
        self.min_res = np.array([d.resolutions[0] for d in dev], dtype=int)
        self.iters = float(scenario.local_iterations)
        self.rounds = float(scenario.global_rounds)
        self.s = float(scenario.model_size_bits)
        self.noise = float(scenario.noise_psd)
        self.bw = float(scenario.total_bandwidth_hz)
        self.scheme = scenario.scheme
        self.acc_model = scenario.accuracy_model
        if self.scheme == "noma":
            order = sorted(range(self.n), key=lambda k: (-self.g[k], self.ids[k]))
            n_ch = scenario.n_channels
            self.strong = np.array(order[:n_ch], dtype=int)
            self.weak = np.array(order[n_ch:][::-1], dtype=int)
            self.channel_bw = self.bw / n_ch
            self.pairing = ChannelPairing(
                channels=tuple(
                    (self.ids[s], self.ids[w])
                    for s, w in zip(self.strong, self.weak)
                ),
                channel_bandwidth_hz=self.channel_bw,
            )

    def use_pairing(self, pairing: ChannelPairing) -> None:
        pos = {uid: k for k, uid in enumerate(self.ids)}
        self.strong = np.array([pos[s] for s, _ in pairing.channels], dtype=int)
        self.weak = np.array([pos[w] for _, w in pairing.channels], dtype=int)
        self.channel_bw = pairing.channel_bandwidth_hz
        self.pairing = pairing

    def round_cycles(self, resolution_px) -> np.ndarray:
        r = np.asarray(resolution_px, dtype=float)
        return self.iters * self.cpp * r * r * self.frames

    def accuracy(self, resolution_px) -> np.ndarray:
        return np.atleast_1d(
            np.asarray(detection_accuracy(resolution_px, self.acc_model), dtype=float)
        )

    def comm_solve(self, deadlines):
        if self.scheme == "fdma":
            return _fdma_comm_solve(self, deadlines)
        return _noma_comm_solve(self, deadlines)

    def comm_feasible(self, deadlines) -> bool:
        if self.scheme == "fdma":
            return _fdma_min_bandwidth(self, deadlines) is not None
        return _noma_comm_solve(self, deadlines) is not None


def _u_from_k(k: np.ndarray) -> np.ndarray:
    """Solve (2**u - 1) / u = k for u > 0; k must exceed ln 2.

    The left side rises from ln 2 (u -> 0) to infinity, so the spectral
    efficiency u is unique.  Bisection with bracket doubling; 80 rounds pin
    the root to float precision.
    """
    lo = np.full_like(k, 1e-12)
    hi = np.full_like(k, 64.0)
    with np.errstate(over="ignore"):
        for _ in range(13):
            grow = np.expm1(hi * _LN2) / hi < k
            if not grow.any():
                break
            hi = np.where(grow, hi * 2.0, hi)
        for _ in range(_ROOT_ITERS):
            mid = 0.5 * (lo + hi)
            low_side = np.expm1(mid * _LN2) / mid < k
            lo = np.where(low_side, mid, lo)
            hi = np.where(low_side, hi, mid)
    return 0.5 * (lo + hi)


def _fdma_min_bandwidth(env: _Env, deadlines):
    """Per-device bandwidth floors at full power, or None when infeasible.

    A device transmitting at p_max with bandwidth below its floor cannot
    meet its deadline; a split is feasible iff the floors fit into B.
    """
    rho = env.s / deadlines
    k_max = env.g * env.pmax / (env.noise * rho)
    if np.any(k_max <= _LN2 * (1.0 + 1e-12)):
        return None
    b_floor = rho / _u_from_k(k_max)
    if float(b_floor.sum()) > env.bw:
        return None
    return b_floor


def _floor_marginal(env: _Env, b, g, pmin):
    """-dE/db for a device pinned at its power floor p_min."""
    x = g * pmin / (env.noise * b)
    rate = b * np.log1p(x) / _LN2
    drate = np.log1p(x) / _LN2 - x / ((1.0 + x) * _LN2)
    return pmin * env.s * drate / (rate * rate)


def _fdma_comm_solve(env: _Env, deadlines):
    """Minimum-energy powers and bandwidth split meeting per-device deadlines.

    For a deadline-binding device the energy E(b) = p_req(b) * d is convex
    and decreasing in bandwidth, with marginal -dE/db equal to

        v1(b) = (d N0 / g) * ((u ln2 - 1) 2**u + 1),   u = rho / b,

    which a Lambert-W evaluation inverts in closed form.  Once p_req drops
    to p_min the power pins there and the marginal switches to the flatter
    v2 curve handled by `_floor_marginal`.  Equalising marginals across
    devices via one bisection on the bandwidth price lambda yields the
    optimal split; leftover bandwidth is then spread proportionally, which
    can only reduce energy further.

    Returns ``(power, bandwidth, comm_time, comm_energy)`` or None when the
    deadlines cannot be met.
    """
    d = np.asarray(deadlines, dtype=float)
    rho = env.s / d
    b_floor = _fdma_min_bandwidth(env, d)
    if b_floor is None:
        return None

    k_min = env.g * env.pmin / (env.noise * rho)
    b_kink = np.full(env.n, np.inf)
    kinked = k_min > _LN2 * (1.0 + 1e-9)
    if kinked.any():
        b_kink[kinked] = rho[kinked] / _u_from_k(k_min[kinked])
    b_kink = np.maximum(b_kink, b_floor)
    b_cap = np.minimum(b_kink, env.bw)

    def split_at(lam: float) -> np.ndarray:
        c = lam * env.g / (d * env.noise) - 1.0
        u = (np.real(lambertw(c / math.e)) + 1.0) / _LN2
        with np.errstate(divide="ignore"):
            b1 = np.where(u > 0.0, rho / u, np.inf)
        b = np.clip(b1, b_floor, b_cap)
        floored = (b1 > b_kink) & (b_kink < env.bw)
        if floored.any():
            b[floored] = _floor_split(env, lam, floored, b_kink)
        return b

    def _floor_split(env, lam, mask, b_kink):
        g = env.g[mask]
        pmin = env.pmin[mask]
        lo = b_kink[mask]
        hi = np.full(lo.shape, env.bw)
        for _ in range(_FLOOR_ITERS):
            mid = 0.5 * (lo + hi)
            keep = _floor_marginal(env, mid, g, pmin) >= lam
            lo = np.where(keep, mid, lo)
            hi = np.where(keep, hi, mid)
        return lo

    # Price bracket: the marginal at the bandwidth floor is the highest any
    # device will pay, so demand at lam_hi shrinks to the floors and fits.
    u_floor = rho / b_floor
    with np.errstate(over="ignore"):
        v1_floor = (d * env.noise / env.g) * (
            (u_floor * _LN2 - 1.0) * np.exp2(u_floor) + 1.0
        )
    lam_hi = float(np.minimum(v1_floor, 1e300).max())
    lam_lo = lam_hi * 1e-40
    if float(split_at(lam_lo).sum()) > env.bw:
        for _ in range(_MULTIPLIER_ITERS):
            lam_mid = math.sqrt(lam_lo * lam_hi)
            if float(split_at(lam_mid).sum()) > env.bw:
                lam_lo = lam_mid
            else:
                lam_hi = lam_mid
        b = split_at(lam_hi)
    else:
        b = split_at(lam_lo)
    total = float(b.sum())
    if total < env.bw:
        b = b * (env.bw / total)

    p_req = (env.noise * b / env.g) * np.expm1(rho * _LN2 / b)
    p = np.clip(p_req, env.pmin, env.pmax)
    rate = b * np.log1p(env.g * p / (env.noise * b)) / _LN2
    t = env.s / rate
    return p, b, t, p * t


def _noma_comm_solve(env: _Env, deadlines):
    """Minimum-energy per-channel powers meeting both users' deadlines.

    Both the weak user's rate and the strong user's rate rise with the
    user's own power, and the strong user sees the weak signal as noise, so
    the cheapest feasible point is the componentwise-smallest one: set the
    weak power to exactly meet its deadline (or its floor), then the strong
    power given that interference.

    Returns ``(power, None, comm_time, comm_energy)`` or None.
    """
    d = np.asarray(deadlines, dtype=float)
    s_idx, w_idx = env.strong, env.weak
    bc = env.channel_bw
    noise = env.noise * bc
    with np.errstate(over="ignore"):
        need_w = np.expm1(env.s / d[w_idx] * _LN2 / bc)
        p_w = np.maximum(noise * need_w / env.g[w_idx], env.pmin[w_idx])
        if np.any(p_w > env.pmax[w_idx] * (1.0 + 1e-12)):
            return None
        need_s = np.expm1(env.s / d[s_idx] * _LN2 / bc)
        p_s = np.maximum(
            (env.g[w_idx] * p_w + noise) * need_s / env.g[s_idx],
            env.pmin[s_idx],
        )
    if np.any(p_s > env.pmax[s_idx] * (1.0 + 1e-12)):
        return None
    p = np.empty(env.n, dtype=float)
    p[w_idx] = np.clip(p_w, env.pmin[w_idx], env.pmax[w_idx])
    p[s_idx] = np.clip(p_s, env.pmin[s_idx], env.pmax[s_idx])
    rate = np.empty(env.n, dtype=float)
    rate[w_idx] = bc * np.log1p(env.g[w_idx] * p[w_idx] / noise) / _LN2
    rate[s_idx] = (
        bc
        * np.log1p(env.g[s_idx] * p[s_idx] / (env.g[w_idx] * p[w_idx] + noise))
        / _LN2
    )
    t = env.s / rate
    return p, None, t, p * t


@dataclass
class _Budget:
    """Continuous variables fitted to one round-time budget tau."""

    value: float
    tau: float
    power: np.ndarray
    bandwidth: np.ndarray | None
    cpu: np.ndarray
    comm_time: np.ndarray
    comm_energy: np.ndarray


def _comm_marginal(c, x):
    """-dE/dd for a deadline-binding upload: E(d) = c d (2**x - 1), x ~ 1/d.

    Equals c ((x ln2 - 1) 2**x + 1), positive and decreasing in d, so the
    total per-device energy (compute plus upload) is convex in the split.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        out = c * ((x * _LN2 - 1.0) * np.exp2(x) + 1.0)
    return out


def _split_bisect(tau, two_k_cyc3, comm_marginal_at, d_lo, d_hi):
    """Minimise kappa cyc^3/(tau-d)^2 + E_com(d) over d in [d_lo, d_hi].

    The derivative 2 kappa cyc^3/(tau-d)^3 - comm_marginal(d) is increasing
    (both energies are convex), so sign bisection lands on the minimiser and
    collapses to the binding bound when the sign never flips.
    """
    lo = np.minimum(d_lo, d_hi)
    hi = d_hi
    for _ in range(_RESPLIT_ITERS):
        mid = 0.5 * (lo + hi)
        rising = two_k_cyc3 / (tau - mid) ** 3 >= comm_marginal_at(mid)
        hi = np.where(rising, mid, hi)
        lo = np.where(rising, lo, mid)
    return 0.5 * (lo + hi)


def _fdma_resplit(env: _Env, tau: float, cyc, b):
    """Per-device upload deadlines balancing CPU and transmit energy at fixed b."""
    c = env.noise * b / env.g
    a = env.s / b
    snr_max = env.g * env.pmax / (env.noise * b)
    d_feas = env.s / (b * np.log1p(snr_max) / _LN2)
    d_hi = tau - cyc / env.fmax
    d_lo = np.maximum(tau - cyc / env.fmin, d_feas)
    pinned = env.pmin > 0.0
    if pinned.any():
        snr_min = env.g * env.pmin / (env.noise * b)
        d_pin = env.s / (b * np.log1p(snr_min) / _LN2)
        d_hi = np.where(pinned, np.minimum(d_hi, np.maximum(d_pin, d_lo)), d_hi)
    return _split_bisect(
        tau,
        2.0 * env.kappa * cyc**3,
        lambda d: _comm_marginal(c, a / d),
        d_lo,
        d_hi,
    )


def _noma_resplit(env: _Env, tau: float, cyc, deadlines):
    """One weak-then-strong pass of per-channel deadline rebalancing.

    The weak user's power raises the interference the strong user must
    overcome, so the weak split also prices d_s A_s g_w / g_s extra joules
    per watt of weak power; both half-steps stay 1-D convex.
    """
    s_idx, w_idx = env.strong, env.weak
    bc = env.channel_bw
    noise = env.noise * bc
    d = deadlines.copy()

    def bounds(idx, denom):
        rate_max = bc * np.log1p(env.g[idx] * env.pmax[idx] / denom) / _LN2
        d_feas = env.s / rate_max
        d_hi = tau - cyc[idx] / env.fmax[idx]
        d_lo = np.maximum(tau - cyc[idx] / env.fmin[idx], d_feas)
        pinned = env.pmin[idx] > 0.0
        if pinned.any():
            rate_min = bc * np.log1p(env.g[idx] * env.pmin[idx] / denom) / _LN2
            d_pin = env.s / rate_min
            d_hi = np.where(pinned, np.minimum(d_hi, np.maximum(d_pin, d_lo)), d_hi)
        return d_lo, d_hi

    # weak half-step: account for the interference cost on the strong user
    c_w = noise / env.g[w_idx]
    with np.errstate(over="ignore"):
        a_s = np.expm1(env.s * _LN2 / (bc * d[s_idx]))
    k_cross = d[s_idx] * a_s * env.g[w_idx] / env.g[s_idx]
    x_of = lambda dd: env.s / (bc * dd)  # noqa: E731

    def weak_marginal(dd):
        x = x_of(dd)
        with np.errstate(over="ignore", invalid="ignore"):
            dpw = c_w * np.exp2(x) * _LN2 * x / dd
        return _comm_marginal(c_w, x) + k_cross * dpw

    d_lo, d_hi = bounds(w_idx, noise)
    d[w_idx] = _split_bisect(
        tau, 2.0 * env.kappa[w_idx] * cyc[w_idx] ** 3, weak_marginal, d_lo, d_hi
    )

    # strong half-step against the updated weak interference
    with np.errstate(over="ignore"):
        p_w = np.maximum(
            c_w * np.expm1(env.s * _LN2 / (bc * d[w_idx])), env.pmin[w_idx]
        )
    denom_s = env.g[w_idx] * p_w + noise
    c_s = denom_s / env.g[s_idx]
    d_lo, d_hi = bounds(s_idx, denom_s)
    d[s_idx] = _split_bisect(
        tau,
        2.0 * env.kappa[s_idx] * cyc[s_idx] ** 3,
        lambda dd: _comm_marginal(c_s, x_of(dd)),
        d_lo,
        d_hi,
    )
    return d


def _budget_config(env: _Env, weights: Weights, tau: float, cyc, t_floor, loss_term):
    """Fit powers, bandwidths and frequencies to budget tau; None if impossible.

    Starts from full-speed compute (largest upload deadlines), then
    alternates two exact blocks until the modelled energy stalls: re-split
    the shared bandwidth / channel powers for the current deadlines, and
    re-split each device's time between compute and upload for the current
    bandwidth (1-D convex, handled by `_split_bisect`).  Finally the CPUs
    slow to exactly fill tau minus the achieved upload time.
    """
    d = tau - t_floor
    if np.any(d <= 0.0):
        return None
    sol = env.comm_solve(d)
    if sol is None:
        return None
    p, b, t_com, e_com = sol
    energy = math.inf
    for _ in range(_INNER_ALTERNATIONS):
        if env.scheme == "fdma":
            d_new = _fdma_resplit(env, tau, cyc, b)
        else:
            d_new = _noma_resplit(env, tau, cyc, d)
        sol_new = env.comm_solve(d_new)
        if sol_new is None:
            break
        d = d_new
        p, b, t_com, e_com = sol_new
        model = float(
            (env.kappa * cyc**3 / (tau - d) ** 2 + e_com).sum()
        )
        if energy - model <= _INNER_REL_TOL * abs(energy):
            energy = model
            break
        energy = model
    f = np.clip(cyc / (tau - t_com), env.fmin, env.fmax)
    e_cmp = env.kappa * cyc * f * f
    value = (
        weights.w1 * env.rounds * float((e_cmp + e_com).sum())
        + weights.w2 * env.rounds * tau
        + loss_term
    )
    return _Budget(value, tau, p, b, f, t_com, e_com)


def _continuous_solve(env: _Env, weights: Weights, resolution_px) -> _Budget:
    """Best continuous variables for fixed resolutions via a search over tau."""
    cyc = env.round_cycles(resolution_px)
    t_floor = cyc / env.fmax
    base = float(t_floor.max())
    loss_term = weights.w3 * float((1.0 - env.accuracy(resolution_px)).sum())

    def feasible(tau: float) -> bool:
        return tau > base and env.comm_feasible(tau - t_floor)

    step = env.n * env.s / env.bw + 1e-9
    for _ in range(80):
        if feasible(base + step):
            break
        step *= 2.0
    else:
        raise InfeasibleScenarioError(
            "no round-time budget satisfies the power and bandwidth limits"
        )
    lo, hi = base, base + step
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    tau_lo = hi

    best: list = [math.inf, None]

    def evaluate(tau: float) -> float:
        cfg = _budget_config(env, weights, tau, cyc, t_floor, loss_term)
        if cfg is None:
            return math.inf
        if cfg.value < best[0]:
            best[0] = cfg.value
            best[1] = cfg
        return cfg.value

    # Three-point bracket: march doubling steps until the value stops
    # falling; the minimum then lies within the last three probes.  The
    # march grid is anchored at the compute floor, not at tau_lo, so two
    # scenarios that differ only in constraints slack at the optimum (say a
    # higher power cap that never binds) probe identical budgets and return
    # bit-identical solutions.
    h = max(step, 0.05 * max(base, 1e-12))
    k0 = 0
    while base + h * (2.0**k0) <= tau_lo and k0 < 200:
        k0 += 1
    points = [(tau_lo, evaluate(tau_lo))]
    for k in range(k0, k0 + 48):
        x = base + h * (2.0**k)
        v = evaluate(x)
        prev_v = points[-1][1]
        points.append((x, v))
        if not v < prev_v - max(1e-12, 1e-9 * abs(prev_v)):
            break
    a = points[-3][0] if len(points) >= 3 else points[0][0]
    b = points[-1][0]
    tol = GOLDEN_TOL_FRACTION * (b - a)
    c = b - _INVPHI * (b - a)
    d_pt = a + _INVPHI * (b - a)
    fc, fd = evaluate(c), evaluate(d_pt)
    while (b - a) > tol:
        if fc <= fd:
            b, d_pt, fd = d_pt, c, fc
            c = b - _INVPHI * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d_pt, fd
            d_pt = a + _INVPHI * (b - a)
            fd = evaluate(d_pt)
    if best[1] is None:
        raise InfeasibleScenarioError(
            "no round-time budget satisfies the power and bandwidth limits"
        )
    return best[1]


def _sweep_core(env: _Env, weights: Weights, resolution_px, cpu_hz, t_com, e_com):
    """One pass of exact per-device resolution moves at fixed communication.

    Each device scans its resolution menu; a candidate's CPU frequency fills
    the current round time exactly (clipped to the device's range), and the
    candidate objective is the true objective of the resulting state, so
    every applied move is non-increasing.
    """
    w1g = weights.w1 * env.rounds
    w2g = weights.w2 * env.rounds
    r_out = np.asarray(resolution_px, dtype=int).copy()
    f_out = np.asarray(cpu_hz, dtype=float).copy()
    cyc = env.round_cycles(r_out)
    t_cmp = cyc / f_out
    e_cmp = env.kappa * cyc * f_out * f_out
    t_tot = t_cmp + t_com
    e_sum = float((e_cmp + e_com).sum())
    loss = 1.0 - env.accuracy(r_out)
    loss_sum = float(loss.sum())
    tau = float(t_tot.max())
    for n in range(env.n):
        cand = env.res_sets[n]
        cyc_c = env.iters * env.cpp[n] * cand.astype(float) ** 2 * env.frames[n]
        slack = tau - t_com[n]
        if slack <= 0.0:
            continue
        f_c = np.clip(cyc_c / slack, env.fmin[n], env.fmax[n])
        t_c = cyc_c / f_c
        e_c = env.kappa[n] * cyc_c * f_c * f_c
        hold = t_tot[n]
        t_tot[n] = -math.inf
        others = float(t_tot.max())
        t_tot[n] = hold
        round_c = np.maximum(others, t_com[n] + t_c)
        loss_c = 1.0 - env.accuracy(cand)
        j_c = (
            w1g * (e_sum - e_cmp[n] + e_c)
            + w2g * round_c
            + weights.w3 * (loss_sum - loss[n] + loss_c)
        )
        k = int(np.argmin(j_c))
        r_out[n] = int(cand[k])
        f_out[n] = float(f_c[k])
        e_sum += float(e_c[k]) - float(e_cmp[n])
        e_cmp[n] = e_c[k]
        loss_sum += float(loss_c[k]) - float(loss[n])
        loss[n] = loss_c[k]
        t_tot[n] = t_com[n] + t_c[k]
        tau = float(t_tot.max())
    return r_out, f_out


def _assemble(env: _Env, power, bandwidth, cpu_hz, resolution_px) -> Allocation:
    return Allocation(
        power_w=np.clip(power, env.pmin, env.pmax),
        cpu_hz=np.clip(cpu_hz, env.fmin, env.fmax),
        resolution_px=np.asarray(resolution_px, dtype=int),
        bandwidth_hz=None if bandwidth is None else np.asarray(bandwidth, dtype=float),
        pairing=env.pairing if env.scheme == "noma" else None,
    )


def _check_scenario(scenario: Scenario) -> None:
    errors = scenario.validate()
    if errors:
        raise ScenarioValidationError(errors)


def optimize(
    scenario: Scenario,
    weights: Weights,
    *,
    max_outer_iterations: int = MAX_OUTER_ITERATIONS,
    rel_tol: float = OUTER_REL_TOL,
) -> SolveReport:
    """Jointly allocate power, bandwidth, CPU frequency and resolution.

    Deterministic: equal inputs give identical reports.  Raises
    :class:`InfeasibleScenarioError` when no round-time budget works at all.
    """
    _check_scenario(scenario)
    env = _Env(scenario)
    r = env.min_res.copy()
    best = None
    trace: list = []
    prev = math.inf
    converged = False
    iterations = 0
    for _ in range(max_outer_iterations):
        iterations += 1
        cfg = _continuous_solve(env, weights, r)
        r_new, f_new = _sweep_core(
            env, weights, r, cfg.cpu, cfg.comm_time, cfg.comm_energy
        )
        alloc = _assemble(env, cfg.power, cfg.bandwidth, f_new, r_new)
        metrics = system_metrics(scenario, alloc)
        value = objective(weights, metrics)
        if best is None or value < best[0]:
            best = (value, alloc, metrics)
        trace.append(best[0])
        if math.isfinite(prev) and prev - value <= rel_tol * max(abs(prev), 1e-30):
            converged = True
            break
        prev = value
        r = r_new
    value, alloc, metrics = best
    return SolveReport(
        allocation=alloc,
        metrics=metrics,
        objective=value,
        outer_iterations=iterations,
        converged=converged,
        objective_trace=trace,
    )


def random_baseline(scenario: Scenario, weights: Weights, seed: int) -> SolveReport:
    """Feasible reference point: uniform random powers and frequencies,
    minimum resolutions, equal FDMA split.

    Only the per-device knobs are randomised; NOMA keeps the scheme's
    gain-sorted pairing, the same one the joint solver uses.  Draw order is
    fixed (powers, then frequencies), so a given seed always produces the
    same allocation, and the identical draws land on both schemes when the
    device populations match.
    """
    _check_scenario(scenario)
    env = _Env(scenario)
    rng = np.random.default_rng(seed)
    p = rng.uniform(env.pmin, env.pmax)
    f = rng.uniform(env.fmin, env.fmax)
    r = env.min_res.copy()
    if scenario.scheme == "fdma":
        alloc = Allocation(
            power_w=p,
            cpu_hz=f,
            resolution_px=r,
            bandwidth_hz=np.full(env.n, env.bw / env.n),
        )
    else:
        alloc = Allocation(
            power_w=p, cpu_hz=f, resolution_px=r, pairing=env.pairing
        )
    metrics = system_metrics(scenario, alloc)
    value = objective(weights, metrics)
    return SolveReport(
        allocation=alloc,
        metrics=metrics,
        objective=value,
        outer_iterations=0,
        converged=True,
        objective_trace=[value],
    )


def solve_comm_subproblem_fdma(
    scenario: Scenario,
    weights: Weights,
    cpu_hz,
    resolution_px,
    round_time_budget: float,
):
    """Minimum-energy powers and bandwidth split for fixed f, r and budget.

    The deadline-binding power is the unique energy minimiser for any
    positive energy weight, so ``weights`` does not change the argmin; it is
    part of the signature for symmetry with the other subproblems.  Raises
    :class:`InfeasibleBudgetError` when the budget cannot be met even at
    p_max with all bandwidth.
    """
    _check_scenario(scenario)
    if scenario.scheme != "fdma":
        raise ValueError("scenario scheme must be 'fdma'")
    env = _Env(scenario)
    deadlines = _comm_deadlines(env, cpu_hz, resolution_px, round_time_budget)
    sol = _fdma_comm_solve(env, deadlines)
    if sol is None:
        raise InfeasibleBudgetError(
            f"deadlines unreachable within p_max and {env.bw} Hz total bandwidth"
        )
    p, b, _, _ = sol
    return np.clip(p, env.pmin, env.pmax), b


def solve_comm_subproblem_noma(
    scenario: Scenario,
    weights: Weights,
    pairing: ChannelPairing,
    cpu_hz,
    resolution_px,
    round_time_budget: float,
):
    """Minimum-energy per-channel powers for fixed pairing, f, r and budget."""
    _check_scenario(scenario)
    if scenario.scheme != "noma":
        raise ValueError("scenario scheme must be 'noma'")
    env = _Env(scenario)
    env.use_pairing(pairing)
    deadlines = _comm_deadlines(env, cpu_hz, resolution_px, round_time_budget)
    sol = _noma_comm_solve(env, deadlines)
    if sol is None:
        raise InfeasibleBudgetError("deadlines unreachable within the power limits")
    p = sol[0]
    return np.clip(p, env.pmin, env.pmax)


def _comm_deadlines(env: _Env, cpu_hz, resolution_px, round_time_budget: float):
    cyc = env.round_cycles(resolution_px)
    t_cmp = cyc / np.asarray(cpu_hz, dtype=float)
    deadlines = round_time_budget - t_cmp
    if np.any(deadlines <= 0.0):
        stuck = [env.ids[k] for k in np.nonzero(deadlines <= 0.0)[0]]
        raise InfeasibleBudgetError(
            f"compute alone exceeds the budget for devices {stuck}"
        )
    return deadlines


def solve_cpu_frequencies(
    scenario: Scenario,
    weights: Weights,
    round_time_budget: float,
    comm_time_s,
    resolution_px,
):
    """Energy-optimal CPU frequencies under a round-time budget.

    Compute energy rises with f while the deadline needs f at least
    cycles / (budget - comm_time), so the optimum is that quotient clipped
    into [f_min, f_max].  Raises :class:`InfeasibleBudgetError`, naming the
    devices, when even f_max cannot meet the budget.
    """
    _check_scenario(scenario)
    env = _Env(scenario)
    t_com = np.asarray(comm_time_s, dtype=float)
    slack = round_time_budget - t_com
    cyc = env.round_cycles(resolution_px)
    bad = slack <= 0.0
    needed = np.full(env.n, math.inf)
    np.divide(cyc, slack, out=needed, where=~bad)
    bad |= needed > env.fmax * (1.0 + 1e-9)
    if np.any(bad):
        stuck = [env.ids[k] for k in np.nonzero(bad)[0]]
        raise InfeasibleBudgetError(
            f"budget {round_time_budget} unreachable even at f_max for devices {stuck}"
        )
    return np.clip(needed, env.fmin, env.fmax)


def sweep_resolutions(
    scenario: Scenario, weights: Weights, allocation: Allocation
) -> np.ndarray:
    """Exact coordinate-descent pass over per-device frame resolutions.

    Devices are visited in position order; each picks the resolution (with
    its CPU frequency refitted to the current round time) that minimises the
    full objective, ties going to the smaller resolution.  The returned
    resolutions never increase the objective.
    """
    _check_scenario(scenario)
    env = _Env(scenario)
    if allocation.pairing is not None:
        env.use_pairing(allocation.pairing)
    metrics = system_metrics(scenario, allocation)
    r_new, _ = _sweep_core(
        env,
        weights,
        allocation.resolution_px,
        allocation.cpu_hz,
        metrics.comm_time_s,
        metrics.comm_energy_j,
    )
    return r_new
