"""Shared builders for the test suite.

Most tests want a small hand-made scenario with known numbers rather than a
randomly generated one, so the factories here keep every constant explicit.
"""

import numpy as np

from flmar import (
    Allocation,
    DeviceProfile,
    Scenario,
    pair_users,
)

RESOLUTIONS = (100, 200, 300, 400, 500)


def make_device(id=0, gain=1e-9, frames=100, **kw):
    params = dict(
        cycles_per_pixel=737.0,
        kappa=1e-28,
        f_min=1e8,
        f_max=2e9,
        p_min=0.0,
        p_max=0.2,
        resolutions=RESOLUTIONS,
    )
    params.update(kw)
    return DeviceProfile(id=id, gain=gain, dataset_frames=frames, **params)


def make_scenario(gains, scheme="fdma", frames=None, bandwidth=20e6, rounds=10,
                  iterations=5, model_bits=2e6, **device_kw):
    if frames is None:
        frames = [100] * len(gains)
    devices = [
        make_device(id=i, gain=g, frames=fr, **device_kw)
        for i, (g, fr) in enumerate(zip(gains, frames))
    ]
    n_channels = len(gains) // 2 if scheme == "noma" else None
    return Scenario(
        devices=devices,
        total_bandwidth_hz=bandwidth,
        model_size_bits=model_bits,
        global_rounds=rounds,
        local_iterations=iterations,
        scheme=scheme,
        n_channels=n_channels,
    )


def equal_split_alloc(scn, power=0.1, cpu=1e9, resolution=400):
    """Feasible allocation: equal bandwidth split or deterministic pairing."""
    n = scn.n_devices
    power_w = np.full(n, power)
    cpu_hz = np.full(n, cpu)
    res = np.full(n, resolution)
    if scn.scheme == "fdma":
        bw = np.full(n, scn.total_bandwidth_hz / n)
        return Allocation(power_w=power_w, cpu_hz=cpu_hz, resolution_px=res,
                          bandwidth_hz=bw, pairing=None)
    gains = [d.gain for d in scn.devices]
    pairing = pair_users(gains, scn.n_channels, scn.total_bandwidth_hz)
    return Allocation(power_w=power_w, cpu_hz=cpu_hz, resolution_px=res,
                      bandwidth_hz=None, pairing=pairing)
