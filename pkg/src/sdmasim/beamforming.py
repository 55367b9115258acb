"""
Per-subcarrier beam computations.

Every kernel broadcasts over leading axes, so a stack of N_C subcarriers
is handled in one call: vectors are ``(..., N_A)``, matrices
``(..., N_A, N_A)`` and column sets ``(..., N_A, m)``.
"""

from dataclasses import dataclass

import numpy as np

from .rf import SimParams

UNIT_TOL = 1e-6


@dataclass(frozen=True)
class CandidateBasis:
    """Orthonormal TX candidates that leave earlier receivers undisturbed.

    Columns are ordered by non-increasing interference energy, so the last
    column is the plain beamnulling vector.
    """

    columns: np.ndarray       # (..., N_A, N_A - Q + 1)
    eigen_values: np.ndarray  # (..., N_A - Q + 1), non-increasing


@dataclass(frozen=True)
class StreamVectors:
    tx_matrix: np.ndarray        # (..., N_A, S)
    rx_matrix: np.ndarray        # (..., N_A, S)
    singular_values: np.ndarray  # (..., S), non-increasing

    @property
    def n_streams(self) -> int:
        return self.tx_matrix.shape[-1]

    def leading(self, n_streams: int) -> "StreamVectors":
        """The ``n_streams`` strongest eigen-modes."""
        return StreamVectors(self.tx_matrix[..., :n_streams], self.rx_matrix[..., :n_streams],
                             self.singular_values[..., :n_streams])


def hermitian(a):
    return np.conj(np.swapaxes(a, -1, -2))


def _matvec(a, x):
    return np.einsum("...ij,...j->...i", a, x)


def _vdot(a, b):
    """Batched a^H b over the last axis."""
    return np.einsum("...i,...i->...", np.conj(a), b)


def normalize(v):
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0) or not np.all(np.isfinite(n)):
        raise ValueError("cannot normalize a zero or non-finite vector")
    return v / n


def fix_phase(v, axis=-1):
    """Rotate so the largest-magnitude component is real and positive."""
    v = np.asarray(v)
    idx = np.expand_dims(np.argmax(np.abs(v), axis=axis), axis)
    pivot = np.take_along_axis(v, idx, axis=axis)
    mag = np.abs(pivot)
    rot = np.where(mag > 0, np.conj(pivot) / np.where(mag > 0, mag, 1.0), 1.0)
    return v * rot


def _check_unit(w, what):
    n = np.linalg.norm(w, axis=-1)
    if np.any(np.abs(n - 1.0) > UNIT_TOL):
        raise ValueError(f"{what} must have unit norm (got norms up to {np.max(np.abs(n - 1.0)) + 1:.6g})")


def as_columns(vectors, n_antennas):
    """Stack a list of ``(..., N_A)`` vectors into ``(..., N_A, m)``.

    Arrays already shaped ``(..., N_A, m)`` pass through.  An empty list gives
    a ``(N_A, 0)`` array.
    """
    if isinstance(vectors, np.ndarray):
        if vectors.shape[-2] != n_antennas:
            raise ValueError(f"expected columns of length {n_antennas}, got shape {vectors.shape}")
        return vectors
    if len(vectors) == 0:
        return np.zeros((n_antennas, 0), dtype=complex)
    return np.stack([np.asarray(v) for v in vectors], axis=-1)


def effective_channel(h, gain, params: SimParams, w_t):
    """Received spatial signature sqrt(P_T G/N_C) H w_t of a beamformed TX."""
    _check_unit(w_t, "TX vector")
    return params.tx_scale(gain) * _matvec(h, w_t)


def intf_column(h, gain, params: SimParams, w_r):
    """Column of the interference matrix seen by a new transmitter:
    {sqrt(P_T G/N_C) w_r^H H}^H = sqrt(P_T G/N_C) H^H w_r."""
    _check_unit(w_r, "RX vector")
    return params.tx_scale(gain) * _matvec(hermitian(h), w_r)


def _ascending_eigh(cols):
    gram = cols @ hermitian(cols)
    return np.linalg.eigh(gram)


def tx_beamnull(intf_columns, n_antennas: int):
    """TX vector with the least energy towards earlier receivers.

    With no earlier links the first antenna is used alone (omni pattern).
    """
    cols = as_columns(intf_columns, n_antennas)
    if cols.shape[-1] == 0:
        w = np.zeros(cols.shape[:-1], dtype=complex)
        w[..., 0] = 1.0
        return w
    _, vecs = _ascending_eigh(cols)
    return fix_phase(vecs[..., :, 0])


def candidate_basis(intf_columns, n_antennas: int) -> CandidateBasis:
    cols = as_columns(intf_columns, n_antennas)
    m = cols.shape[-1]
    if m >= n_antennas:
        raise ValueError(
            f"TX beamforming needs fewer than {n_antennas} earlier links, got {m}")
    lead = cols.shape[:-2]
    if m == 0:
        eye = np.broadcast_to(np.eye(n_antennas, dtype=complex), lead + (n_antennas, n_antennas))
        return CandidateBasis(eye.copy(), np.zeros(lead + (n_antennas,)))
    vals, vecs = _ascending_eigh(cols)
    keep = n_antennas - m
    # reverse to non-increasing order, matching U(:, Q..N_A)
    basis = fix_phase(vecs[..., :, :keep][..., ::-1], axis=-2)
    return CandidateBasis(basis, vals[..., :keep][..., ::-1])


def mmse_covariance(interferers, noise_var: float, n_antennas: int):
    """sum_q h_q h_q^H + noise_var I for interferer columns ``(..., N_A, m)``."""
    if not noise_var > 0:
        raise ValueError("noise variance must be positive")
    cols = as_columns(interferers, n_antennas)
    return cols @ hermitian(cols) + noise_var * np.eye(n_antennas)


def _check_covariance(c):
    if not np.allclose(c, hermitian(c), rtol=1e-10, atol=1e-12 * np.max(np.abs(c))):
        raise ValueError("covariance must be Hermitian")
    try:
        np.linalg.cholesky(c)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance must be positive definite") from exc


def beamform_objective(w_t, h_desired, gain, params: SimParams, c_mmse):
    """MMSE post-processing SNR obtained with TX vector ``w_t``:
    (P_T G/N_C) (H w)^H C^-1 (H w)."""
    hw = _matvec(h_desired, w_t)
    val = _vdot(hw, np.linalg.solve(c_mmse, hw[..., None])[..., 0])
    return params.tx_power_mw * gain / params.n_subcarriers * val.real


def tx_beamform(basis: CandidateBasis, h_desired, gain, params: SimParams, c_mmse):
    """Best unit combination of the candidate columns for the desired link.

    Maximizes the MMSE post-processing SNR over ``W = U D`` by taking D as
    the principal eigenvector of (H U)^H C^-1 (H U).
    """
    u = basis.columns
    if u.shape[-1] == 0:
        raise ValueError("candidate basis is empty")
    _check_covariance(c_mmse)
    hu = h_desired @ u
    m = hermitian(hu) @ np.linalg.solve(c_mmse, hu)
    m = 0.5 * (m + hermitian(m)) * (params.tx_power_mw * gain / params.n_subcarriers)
    _, vecs = np.linalg.eigh(m)
    d = vecs[..., :, -1]
    return fix_phase(normalize(_matvec(u, d)))


def rx_zf(b):
    """Zero-forcing RX vector; column 0 of ``b`` is the desired signature.

    Computes N{B (B^H B)^+ e_1}.  Since B (B^H B)^+ = (B^+)^H this is the
    conjugated first row of the pseudoinverse of B, which avoids squaring
    the condition number.
    """
    b = np.asarray(b)
    if b.shape[-1] < 1:
        raise ValueError("B needs at least the desired column")
    if np.any(np.all(b == 0, axis=(-2, -1))):
        raise ValueError("degenerate input: B is all zeros")
    w = np.conj(np.linalg.pinv(b, rcond=1e-12)[..., 0, :])
    try:
        return normalize(w)
    except ValueError as exc:
        raise ValueError("degenerate input: desired signature lies in the interference span") from exc


def rx_mmse(h_desired, interferers, noise_var: float):
    """N{C^-1 h} with C built from the listed interferers plus white noise."""
    h = np.asarray(h_desired)
    c = mmse_covariance(interferers, noise_var, h.shape[-1])
    return normalize(np.linalg.solve(c, h[..., None])[..., 0])


def rx_ummse(h_desired, all_other, noise_var: float):
    """MMSE receiver whose covariance covers every other concurrent link."""
    return rx_mmse(h_desired, all_other, noise_var)


def svd_link_vectors(h, gain, params: SimParams, n_streams: int) -> StreamVectors:
    """Eigen-mode vectors for ``n_streams`` parallel streams over one link.

    ``gain`` and ``params`` only fix the per-stream power P_T/(N_C S), which
    the PPSNR evaluation applies; the vectors are those of ``h`` itself.
    """
    na = np.shape(h)[-1]
    if not 1 <= n_streams <= min(np.shape(h)[-2:]):
        raise ValueError(f"stream count must be in 1..{na}, got {n_streams}")
    u, s, vh = np.linalg.svd(h)
    v = hermitian(vh)[..., :, :n_streams]
    u = u[..., :, :n_streams]
    # pin each V column's phase and carry it to U so u^H H v stays real
    v_fixed = fix_phase(v, axis=-2)
    idx = np.argmax(np.abs(v), axis=-2)[..., None, :]
    pivot = np.take_along_axis(v, idx, axis=-2)
    rot = np.conj(pivot) / np.abs(pivot)
    return StreamVectors(tx_matrix=v_fixed, rx_matrix=u * rot, singular_values=s[..., :n_streams])
