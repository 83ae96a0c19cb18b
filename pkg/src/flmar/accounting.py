"""Synchronous federated-round accounting.

Given a scenario and a resource allocation, compute per-device compute and
upload costs, the synchronous round time (slowest device), campaign totals
across global rounds, and the scalarised objective

    J = w1 * E_total + w2 * T_total + w3 * sum_n (1 - A(r_n)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelPairing,
    InfeasibleLinkError,
    LinkParams,
    comm_energy,
    comm_time,
    fdma_rate,
    noma_channel_rates,
)
from .compute import (
    AccuracyModel,
    DeviceProfile,
    comp_energy,
    comp_time,
    cycles_per_frame,
    detection_accuracy,
)

SCHEMES = ("fdma", "noma")


@dataclass(frozen=True)
class Weights:
    """Non-negative objective weights for energy, time and accuracy loss."""

    w1: float
    w2: float
    w3: float = 0.5

    def __post_init__(self):
        if self.w1 < 0.0 or self.w2 < 0.0 or self.w3 < 0.0:
            raise ValueError("weights must be non-negative")


@dataclass
class Scenario:
    """One federated-learning deployment: devices plus shared system knobs."""

    devices: list
    total_bandwidth_hz: float = 20e6
    noise_psd: float = 3.98e-21        # W/Hz (about -174 dBm/Hz)
    model_size_bits: float = 1e6
    global_rounds: int = 100
    local_iterations: int = 10
    scheme: str = "fdma"
    n_channels: int | None = None      # NOMA only; 2 users per channel
    accuracy_model: AccuracyModel = field(default_factory=AccuracyModel)

    @property
    def n_devices(self) -> int:
        return len(self.devices)

    def validate(self) -> list:
        """Collect every violated constraint instead of stopping at the first."""
        errors = []
        if not self.devices:
            errors.append("scenario: needs at least one device")
        ids = [d.id for d in self.devices]
        if len(set(ids)) != len(ids):
            errors.append("scenario: device ids must be unique")
        for dev in self.devices:
            errors.extend(dev.validate())
        if self.total_bandwidth_hz <= 0.0:
            errors.append(
                f"scenario: total_bandwidth_hz must be positive, "
                f"got {self.total_bandwidth_hz}"
            )
        if self.noise_psd <= 0.0:
            errors.append(f"scenario: noise_psd must be positive, got {self.noise_psd}")
        if self.model_size_bits <= 0.0:
            errors.append(
                f"scenario: model_size_bits must be positive, got {self.model_size_bits}"
            )
        if self.global_rounds < 1:
            errors.append(
                f"scenario: global_rounds must be at least 1, got {self.global_rounds}"
            )
        if self.local_iterations < 1:
            errors.append(
                f"scenario: local_iterations must be at least 1, "
                f"got {self.local_iterations}"
            )
        if self.scheme not in SCHEMES:
            errors.append(f"scenario: scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.scheme == "noma":
            n = len(self.devices)
            if self.n_channels is None:
                errors.append("scenario: NOMA needs n_channels")
            elif n != 2 * self.n_channels:
                errors.append(
                    f"scenario: NOMA multiplexes 2 users per channel, so "
                    f"{self.n_channels} channels need {2 * self.n_channels} "
                    f"devices, got {n}"
                )
        return errors

    def device_index(self) -> dict:
        """Map device id to its position in the device list."""
        return {d.id: k for k, d in enumerate(self.devices)}


@dataclass
class Allocation:
    """Per-device decision variables, indexed like ``scenario.devices``.

    FDMA allocations carry ``bandwidth_hz``; NOMA allocations carry a
    ``pairing`` (all channels share one width).
    """

    power_w: np.ndarray
    cpu_hz: np.ndarray
    resolution_px: np.ndarray
    bandwidth_hz: np.ndarray | None = None
    pairing: ChannelPairing | None = None

    def __post_init__(self):
        self.power_w = np.asarray(self.power_w, dtype=float)
        self.cpu_hz = np.asarray(self.cpu_hz, dtype=float)
        self.resolution_px = np.asarray(self.resolution_px, dtype=int)
        if self.bandwidth_hz is not None:
            self.bandwidth_hz = np.asarray(self.bandwidth_hz, dtype=float)

    def validate(self, scenario: Scenario, rel_tol: float = 1e-9) -> list:
        """Check bounds and structure against the scenario; returns violations."""
        errors = []
        n = scenario.n_devices
        for name in ("power_w", "cpu_hz", "resolution_px"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                errors.append(f"allocation: {name} must have shape ({n},), got {arr.shape}")
        if errors:
            return errors
        for k, dev in enumerate(scenario.devices):
            slack_p = rel_tol * max(dev.p_max, 1.0)
            if not dev.p_min - slack_p <= self.power_w[k] <= dev.p_max + slack_p:
                errors.append(
                    f"device {dev.id}: power {self.power_w[k]} outside "
                    f"[{dev.p_min}, {dev.p_max}]"
                )
            slack_f = rel_tol * dev.f_max
            if not dev.f_min - slack_f <= self.cpu_hz[k] <= dev.f_max + slack_f:
                errors.append(
                    f"device {dev.id}: cpu_hz {self.cpu_hz[k]} outside "
                    f"[{dev.f_min}, {dev.f_max}]"
                )
            if int(self.resolution_px[k]) not in dev.resolutions:
                errors.append(
                    f"device {dev.id}: resolution {int(self.resolution_px[k])} not in "
                    f"its menu {dev.resolutions}"
                )
        if scenario.scheme == "fdma":
            if self.bandwidth_hz is None:
                errors.append("allocation: FDMA needs bandwidth_hz")
            else:
                if self.bandwidth_hz.shape != (n,):
                    errors.append(
                        f"allocation: bandwidth_hz must have shape ({n},), "
                        f"got {self.bandwidth_hz.shape}"
                    )
                elif np.any(self.bandwidth_hz < 0.0):
                    errors.append("allocation: bandwidths must be non-negative")
                else:
                    total = float(self.bandwidth_hz.sum())
                    if total > scenario.total_bandwidth_hz * (1.0 + rel_tol):
                        errors.append(
                            f"allocation: bandwidth sum {total} exceeds "
                            f"{scenario.total_bandwidth_hz}"
                        )
        else:
            if self.pairing is None:
                errors.append("allocation: NOMA needs a pairing")
            else:
                idx = scenario.device_index()
                ids = self.pairing.user_ids
                if sorted(ids) != sorted(idx.keys()):
                    errors.append("allocation: pairing must cover every device exactly once")
                else:
                    expected = scenario.total_bandwidth_hz / len(self.pairing.channels)
                    if abs(self.pairing.channel_bandwidth_hz - expected) > rel_tol * expected:
                        errors.append(
                            f"allocation: channel width {self.pairing.channel_bandwidth_hz} "
                            f"inconsistent with total bandwidth (expected {expected})"
                        )
                    for s_id, w_id in self.pairing.channels:
                        g_s = scenario.devices[idx[s_id]].gain
                        g_w = scenario.devices[idx[w_id]].gain
                        if g_s < g_w:
                            errors.append(
                                f"allocation: pair ({s_id}, {w_id}) lists the weaker "
                                f"user first"
                            )
        return errors


@dataclass
class SystemMetrics:
    """Costs of one configuration: per-device arrays plus campaign totals."""

    comp_time_s: np.ndarray
    comp_energy_j: np.ndarray
    comm_time_s: np.ndarray
    comm_energy_j: np.ndarray
    round_time_s: float
    total_time_s: float
    total_energy_j: float
    accuracy: np.ndarray
    accuracy_loss: float

    @property
    def mean_accuracy(self) -> float:
        return float(self.accuracy.mean())


def uplink_rates(scenario: Scenario, allocation: Allocation) -> np.ndarray:
    """Per-device uplink rate in bit/s under the scenario's access scheme."""
    gains = np.array([d.gain for d in scenario.devices])
    if scenario.scheme == "fdma":
        if allocation.bandwidth_hz is None:
            raise ValueError("FDMA allocation is missing bandwidth_hz")
        link = LinkParams(gain=gains, noise_psd=scenario.noise_psd)
        return np.asarray(
            fdma_rate(allocation.bandwidth_hz, allocation.power_w, link)
        )
    if allocation.pairing is None:
        raise ValueError("NOMA allocation is missing a pairing")
    idx = scenario.device_index()
    strong = np.array([idx[s] for s, _ in allocation.pairing.channels])
    weak = np.array([idx[w] for _, w in allocation.pairing.channels])
    rate_s, rate_w = noma_channel_rates(
        allocation.pairing.channel_bandwidth_hz,
        (gains[strong], allocation.power_w[strong]),
        (gains[weak], allocation.power_w[weak]),
        scenario.noise_psd,
    )
    rates = np.empty(scenario.n_devices, dtype=float)
    rates[strong] = rate_s
    rates[weak] = rate_w
    return rates


def _per_device_costs(scenario: Scenario, allocation: Allocation):
    devices = scenario.devices
    cpp = np.array([d.cycles_per_pixel for d in devices])
    frames = np.array([d.dataset_frames for d in devices], dtype=float)
    kappa = np.array([d.kappa for d in devices])
    cyc = cycles_per_frame(allocation.resolution_px, cpp)
    t_cmp = comp_time(scenario.local_iterations, cyc, frames, allocation.cpu_hz)
    e_cmp = comp_energy(kappa, scenario.local_iterations, cyc, frames, allocation.cpu_hz)
    rates = uplink_rates(scenario, allocation)
    t_com = comm_time(scenario.model_size_bits, rates)
    e_com = comm_energy(allocation.power_w, t_com)
    return (
        np.atleast_1d(np.asarray(t_cmp, dtype=float)),
        np.atleast_1d(np.asarray(e_cmp, dtype=float)),
        np.atleast_1d(np.asarray(t_com, dtype=float)),
        np.atleast_1d(np.asarray(e_com, dtype=float)),
    )


def device_round_cost(scenario: Scenario, allocation: Allocation, index: int):
    """One device's per-round costs: (comp_time, comp_energy, comm_time, comm_energy).

    Raises :class:`InfeasibleLinkError` when the device's uplink rate is zero
    (for instance zero power or zero bandwidth under FDMA).
    """
    t_cmp, e_cmp, t_com, e_com = _per_device_costs(scenario, allocation)
    return (
        float(t_cmp[index]),
        float(e_cmp[index]),
        float(t_com[index]),
        float(e_com[index]),
    )


def system_metrics(scenario: Scenario, allocation: Allocation) -> SystemMetrics:
    """Evaluate one allocation: per-device costs, round time, campaign totals.

    The round is synchronous, so its duration is the slowest device's
    compute-plus-upload time; totals scale with the number of global rounds.
    """
    t_cmp, e_cmp, t_com, e_com = _per_device_costs(scenario, allocation)
    acc = np.atleast_1d(
        np.asarray(
            detection_accuracy(allocation.resolution_px, scenario.accuracy_model),
            dtype=float,
        )
    )
    round_time = float((t_cmp + t_com).max())
    rounds = scenario.global_rounds
    return SystemMetrics(
        comp_time_s=t_cmp,
        comp_energy_j=e_cmp,
        comm_time_s=t_com,
        comm_energy_j=e_com,
        round_time_s=round_time,
        total_time_s=rounds * round_time,
        total_energy_j=rounds * float((e_cmp + e_com).sum()),
        accuracy=acc,
        accuracy_loss=float((1.0 - acc).sum()),
    )


def objective(weights: Weights, metrics: SystemMetrics) -> float:
    """Scalarised cost: w1 * energy + w2 * time + w3 * accuracy loss."""
    return (
        weights.w1 * metrics.total_energy_j
        + weights.w2 * metrics.total_time_s
        + weights.w3 * metrics.accuracy_loss
    )
