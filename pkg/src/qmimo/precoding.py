"""Zero-forcing precoding with an exact power constraint."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SingularChannel", "ZfPrecoder", "zf_precoder", "wishart_trace", "diag_of_gram"]

# Channels whose Gram matrix is worse conditioned than this are treated
# as rank deficient rather than inverted.
CONDITION_LIMIT = 1e12


class SingularChannel(Exception):
    """Raised when a channel matrix is too ill conditioned to invert."""


@dataclass(frozen=True)
class ZfPrecoder:
    """Zero-forcing precoder for one channel realization.

    ``matrix`` is the (N, M) precoding matrix, ``gain`` the scalar c such
    that the composite channel equals c times the identity, and ``power``
    the transmit budget the precoder was normalized to.
    """

    matrix: np.ndarray
    gain: float
    power: float


def _gram_eigenvalues(channel: np.ndarray) -> np.ndarray:
    """Eigenvalues of H H^H, with a conditioning guard."""
    channel = np.asarray(channel)
    if channel.ndim != 2:
        raise ValueError(f"channel must be a 2-d array, got shape {channel.shape}")
    m, n = channel.shape
    if m > n:
        raise SingularChannel(f"channel with {m} users and {n} antennas cannot have full row rank")
    gram = channel @ channel.conj().T
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= 0 or eigs[-1] / eigs[0] > CONDITION_LIMIT:
        raise SingularChannel(
            f"channel Gram matrix is numerically rank deficient "
            f"(eigenvalue range [{eigs[0]:.3e}, {eigs[-1]:.3e}])"
        )
    return eigs


def wishart_trace(channel: np.ndarray) -> float:
    """Trace of the inverse Gram matrix, tr{(H H^H)^{-1}}.

    For i.i.d. unit-variance complex Gaussian entries this concentrates
    around M / (N - M) as the array grows at fixed load.
    """
    return float(np.sum(1.0 / _gram_eigenvalues(channel)))


def zf_precoder(channel: np.ndarray, total_power: float) -> ZfPrecoder:
    """Build the zero-forcing precoder c H^H (H H^H)^{-1}.

    The scalar c is chosen so that tr{P P^H} equals ``total_power``
    exactly for this realization, which makes the composite channel
    H P equal to c I_M with no residual inter-user interference.

    Raises
    ------
    SingularChannel
        If the Gram matrix fails the conditioning guard.
    """
    if total_power <= 0:
        raise ValueError(f"total_power must be positive, got {total_power!r}")
    channel = np.asarray(channel, dtype=complex)
    trace_inv = float(np.sum(1.0 / _gram_eigenvalues(channel)))
    gain = float(np.sqrt(total_power / trace_inv))
    gram = channel @ channel.conj().T
    matrix = gain * np.linalg.solve(gram, channel).conj().T
    return ZfPrecoder(matrix=matrix, gain=gain, power=float(total_power))


def diag_of_gram(precoder: ZfPrecoder) -> np.ndarray:
    """Per-antenna transmit powers diag(P P^H), a length-N real vector.

    Sums to the power budget exactly; for large arrays the entries
    flatten toward power / N, which is what justifies modeling the
    transmit covariance diagonal as uniform in the closed forms.
    """
    return np.sum(np.abs(precoder.matrix) ** 2, axis=1)
