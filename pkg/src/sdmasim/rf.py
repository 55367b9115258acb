"""
Radio model: node placement, path loss, Rayleigh MIMO-OFDM channels and
channel-estimation noise.

Array conventions used across the package:

    true_channels   (K, K, N_C, N_A, N_A), indexed [rx_link, tx_link]
    pathloss_gains  (K, K), same indexing
    vectors         (..., N_A), leading axes are subcarriers
"""

from dataclasses import dataclass, field

import numpy as np


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


@dataclass(frozen=True)
class SimParams:
    """Physical-layer and deployment constants.

    Powers are linear milliwatts; ``noise_var_mw`` is per subcarrier.
    """

    n_antennas: int = 4
    n_subcarriers: int = 64
    bandwidth_hz: float = 20e6
    guard_fraction: float = 0.25
    tx_power_mw: float = float(dbm_to_mw(25.0))
    noise_var_mw: float = float(dbm_to_mw(-113.0))
    pathloss_exponent: float = 3.0
    ref_distance_m: float = 1.0
    wavelength_m: float = 0.125
    area_m: tuple = (200.0, 200.0)

    def __post_init__(self):
        if self.n_antennas < 1 or self.n_subcarriers < 1:
            raise ValueError("n_antennas and n_subcarriers must be >= 1")
        if not 0.0 <= self.guard_fraction < 1.0:
            raise ValueError(f"guard_fraction must lie in [0, 1), got {self.guard_fraction}")
        for name in ("bandwidth_hz", "tx_power_mw", "noise_var_mw",
                     "ref_distance_m", "wavelength_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if len(self.area_m) != 2 or min(self.area_m) <= 0:
            raise ValueError(f"area_m must be two positive side lengths, got {self.area_m}")

    def tx_scale(self, gain):
        """Amplitude factor sqrt(P_T * G / N_C) applied to every channel."""
        return np.sqrt(self.tx_power_mw * np.asarray(gain) / self.n_subcarriers)


@dataclass(frozen=True)
class Topology:
    tx_positions: np.ndarray  # (K, 2) metres
    rx_positions: np.ndarray  # (K, 2) metres
    access_order: np.ndarray  # (K,) 0-based link indices, first accessor first

    @property
    def k(self) -> int:
        return len(self.tx_positions)

    @property
    def links(self):
        return list(zip(map(tuple, self.tx_positions), map(tuple, self.rx_positions)))


@dataclass(frozen=True)
class ChannelSet:
    """Fading matrices and path-loss gains for every directed link pair.

    ``noise_seed`` fixes the estimation-noise stream; every call to
    :meth:`noise_rng` restarts it, so different MAC schemes evaluated on
    the same ChannelSet draw identical noise sequences.
    """

    true_channels: np.ndarray
    pathloss_gains: np.ndarray
    est_noise_var: float
    noise_seed: np.random.SeedSequence = field(repr=False)

    @property
    def k(self) -> int:
        return self.true_channels.shape[0]

    def noise_rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.noise_seed))

    def effective(self, rx, tx, w_t, params):
        """True effective channel sqrt(P_T G/N_C) H w_t for pair (rx, tx)."""
        h = self.true_channels[rx, tx]
        return params.tx_scale(self.pathloss_gains[rx, tx]) * np.einsum("...ij,...j->...i", h, w_t)


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def generate_topology(k: int, params: SimParams, rng: np.random.Generator) -> Topology:
    if k < 1:
        raise ValueError(f"link count must be >= 1, got {k}")
    side = np.asarray(params.area_m, dtype=float)
    pts = rng.uniform(0.0, 1.0, size=(k, 2, 2)) * side
    return Topology(tx_positions=pts[:, 0], rx_positions=pts[:, 1],
                    access_order=np.arange(k))


def path_loss(distance_m, params: SimParams):
    """Simplified path-loss gain (lambda / 4 pi d0)^2 (d0 / d)^gamma.

    Distances below the reference distance are clamped to it.
    """
    d = np.asarray(distance_m, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("distance must be positive")
    d = np.maximum(d, params.ref_distance_m)
    k0 = (params.wavelength_m / (4.0 * np.pi * params.ref_distance_m)) ** 2
    return k0 * (params.ref_distance_m / d) ** params.pathloss_exponent


def generate_channels(topology: Topology, params: SimParams, sigma_c2: float,
                      rng: np.random.Generator) -> ChannelSet:
    if sigma_c2 < 0:
        raise ValueError("estimation noise variance must be >= 0")
    k, na, nc = topology.k, params.n_antennas, params.n_subcarriers
    h = complex_normal(rng, (k, k, nc, na, na))
    dist = np.linalg.norm(topology.rx_positions[:, None, :] - topology.tx_positions[None, :, :], axis=-1)
    # coincident nodes fall under the d0 clamp
    gains = path_loss(np.maximum(dist, 1e-12), params)
    noise_seed = np.random.SeedSequence(int(rng.integers(0, 2**63)))
    return ChannelSet(true_channels=h, pathloss_gains=gains,
                      est_noise_var=float(sigma_c2), noise_seed=noise_seed)


def _perturb(x, sigma_c2, rng):
    if sigma_c2 < 0:
        raise ValueError("estimation noise variance must be >= 0")
    x = np.asarray(x)
    if sigma_c2 == 0:
        return x
    return x + np.sqrt(sigma_c2) * complex_normal(rng, x.shape)


def noisy_effective_channel(h_rec, sigma_c2: float, rng: np.random.Generator):
    """Receiver-side estimate of an effective channel, h_rec + sqrt(sigma_c2) z."""
    return _perturb(h_rec, sigma_c2, rng)


def noisy_intf_column(column, sigma_c2: float, rng: np.random.Generator):
    """Transmitter-side estimate of one interference column; independent draw."""
    return _perturb(column, sigma_c2, rng)


def noisy_channel_matrix(h, gain, params: SimParams, sigma_c2: float, rng: np.random.Generator):
    """Estimate of an unscaled fading matrix.

    Noise of variance ``sigma_c2`` is added on the sqrt(P_T G/N_C) scale and
    mapped back, i.e. each column is what a unit-vector sounding at full
    power would yield.
    """
    if sigma_c2 == 0:
        return np.asarray(h)
    scale = params.tx_scale(gain)
    return h + (np.sqrt(sigma_c2) / scale) * complex_normal(rng, np.shape(h))
