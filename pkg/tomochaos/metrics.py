"""
Information Metrics
===================
Fidelity, collective Fisher information, covariance-spectrum entropy,
error-ellipsoid volume and the asymptotic (time-averaged) inverse
covariance of a repeated Floquet map.

All logarithms are natural. With sigma = 0 the noise-scaled quantities are
reported in units where sigma^2 = 1.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Union

import numpy as np
from scipy.linalg import eigh, pinvh, schur
from scipy.stats import entropy as shannon_entropy

from .floquet import FloquetMap
from .spin import DensityMatrix, OperatorBasis, SeedLike, as_generator, make_gellmann_basis
from .state import DimensionMismatchError, NoInformationError

if TYPE_CHECKING:
    from .tomography import CovarianceSummary

logger = logging.getLogger(__name__)

DEGENERATE_PHASE_TOL = 1e-10
NONZERO_TERM_RTOL = 1e-10


@dataclass(frozen=True)
class MetricsPoint:
    """Information gained after n kicks"""
    n: int
    fidelity: float
    entropy: float
    fisher: float
    log_inv_volume: float
    rank: int
    trace_inv_c: float = 0.0
    log_det: float = 0.0
    fidelity_sem: float = 0.0
    hs_error: float = 0.0


def _noise_variance(sigma: float) -> float:
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    return sigma * sigma if sigma > 0 else 1.0


def _measured(cov: "CovarianceSummary") -> np.ndarray:
    if cov.rank < 1:
        raise NoInformationError("Covariance has an empty measured subspace")
    return cov.eigenvalues[:cov.rank]


def fidelity(psi_true: Union[np.ndarray, DensityMatrix], rho_est: Union[DensityMatrix, np.ndarray]) -> float:
    """
    F = <psi| rho |psi>

    Args:
        psi_true: Normalised state vector, or a pure DensityMatrix
        rho_est: Estimated density matrix

    Raises:
        ValueError: for a mixed or unnormalised target
    """
    if isinstance(psi_true, DensityMatrix):
        psi = psi_true.state_vector()
    else:
        psi = np.asarray(psi_true, dtype=complex)
        if psi.ndim != 1:
            raise ValueError("Target state must be a vector or a pure DensityMatrix")
        if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
            raise ValueError(f"Target state is not normalised (norm {np.linalg.norm(psi):.6f})")
    rho = rho_est.rho if isinstance(rho_est, DensityMatrix) else np.asarray(rho_est)
    if rho.shape != (len(psi), len(psi)):
        raise DimensionMismatchError(f"rho has shape {rho.shape}, state has dimension {len(psi)}")
    return float(np.real(np.vdot(psi, rho @ psi)))


def hilbert_schmidt_error(rho_true: Union[DensityMatrix, np.ndarray], rho_est: Union[DensityMatrix, np.ndarray]) -> float:
    """Tr[(rho_true - rho_est)^2], the squared Bloch-vector error"""
    a = rho_true.rho if isinstance(rho_true, DensityMatrix) else np.asarray(rho_true)
    b = rho_est.rho if isinstance(rho_est, DensityMatrix) else np.asarray(rho_est)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Shapes {a.shape} and {b.shape} differ")
    diff = a - b
    return float(np.real(np.vdot(diff, diff)))


def spectrum_entropy(values: np.ndarray) -> float:
    """Shannon entropy (nats) of a non-negative spectrum after normalising it to unit sum"""
    v = np.clip(np.asarray(values, dtype=float), 0.0, None)
    if v.size == 0 or v.sum() <= 0:
        raise NoInformationError("Spectrum has no positive weight")
    return float(shannon_entropy(v))


def covariance_entropy(cov: "CovarianceSummary") -> float:
    """Entropy of the normalised eigenvalues of the inverse covariance on the measured subspace"""
    return spectrum_entropy(_measured(cov))


def collective_fisher(cov: "CovarianceSummary", sigma: float) -> float:
    """1 / Tr(C) with C = sigma^2 (O^T O)^+ restricted to the measured subspace"""
    return float(1.0 / (_noise_variance(sigma) * np.sum(1.0 / _measured(cov))))


def log_inverse_volume(cov: "CovarianceSummary", sigma: float) -> float:
    """-1/2 log det C = 1/2 sum_k ln(lambda_k / sigma^2) over measured directions"""
    return float(0.5 * np.sum(np.log(_measured(cov) / _noise_variance(sigma))))


def amgm_log_volume_bound(cov: "CovarianceSummary", sigma: float) -> float:
    """(rank / 2) ln(Tr / (rank sigma^2)), an upper bound on log_inverse_volume"""
    measured = _measured(cov)
    rank = len(measured)
    return float(0.5 * rank * np.log(measured.sum() / (rank * _noise_variance(sigma))))


@dataclass(frozen=True)
class CramerRaoReport:
    """Monte Carlo covariance of the linear ML estimator against sigma^2 (O^T O)^+"""
    empirical: np.ndarray = field(repr=False)
    predicted: np.ndarray = field(repr=False)
    relative_error: float
    n_trials: int


def cramer_rao_monte_carlo(
    otilde: np.ndarray,
    r_true: np.ndarray,
    sigma: float,
    n_trials: int = 2000,
    seed: SeedLike = None,
) -> CramerRaoReport:
    """
    Sample the unconstrained estimator over noise draws

    The estimator is unbiased on the measured subspace, so its covariance should
    reproduce the pseudo-inverse covariance up to Monte Carlo error.
    """
    if sigma <= 0:
        raise ValueError("Monte Carlo covariance needs sigma > 0")
    if n_trials < 2:
        raise ValueError(f"Need at least two trials, got {n_trials}")
    otilde = np.asarray(otilde, dtype=float)
    r_true = np.asarray(r_true, dtype=float)
    if otilde.shape[1] != r_true.shape[0]:
        raise DimensionMismatchError(f"Record has {otilde.shape[1]} columns, state has {r_true.shape[0]} components")

    rng = as_generator(seed)
    gram_pinv = pinvh(otilde.T @ otilde, rtol=1e-10)
    clean = otilde @ r_true
    records = clean[None, :] + sigma * rng.standard_normal((n_trials, otilde.shape[0]))
    estimates = records @ otilde @ gram_pinv
    empirical = np.cov(estimates, rowvar=False)
    predicted = sigma * sigma * gram_pinv
    error = float(np.linalg.norm(empirical - predicted) / np.linalg.norm(predicted))
    return CramerRaoReport(empirical=empirical, predicted=predicted, relative_error=error, n_trials=n_trials)


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Time-averaged inverse covariance per kick of a repeated map"""
    spectrum: np.ndarray = field(repr=False)
    entropy: float
    predicted_gram: np.ndarray = field(repr=False)
    n_nonzero_terms: int
    degenerate: bool
    parities: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.spectrum > NONZERO_TERM_RTOL * self.spectrum.max()))


def _phase_clusters(phases: np.ndarray, tol: float) -> list:
    """Group indices whose eigenphases lie within tol on the unit circle"""
    order = np.argsort(phases)
    clusters = [[order[0]]]
    for prev, idx in zip(order[:-1], order[1:]):
        if phases[idx] - phases[prev] < tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    # wrap-around between -pi and pi
    if len(clusters) > 1 and phases[order[0]] + 2 * np.pi - phases[order[-1]] < tol:
        clusters[0].extend(clusters.pop())
    return clusters


def asymptotic_inv_covariance(
    fmap: FloquetMap,
    O0: Optional[np.ndarray] = None,
    basis: Optional[OperatorBasis] = None,
    R: Optional[np.ndarray] = None,
) -> AsymptoticPrediction:
    """
    Large-n limit of (O^T O) / n for O_i = (U^dagger)^i O_0 U^i

    In the eigenbasis {|k>} of U the oscillating cross terms average out, leaving

        sum_{j != k} |<j|O_0|k>|^2 b_jk b_jk^dagger + v v^T

    with (b_jk)_alpha = <k|E_alpha|j> and v the coefficients of O_0 dephased in
    that eigenbasis. Degenerate eigenphases are merged into the dephased part
    and the result is flagged, because equal phase gaps between distinct pairs
    are not resolved.

    Args:
        fmap: Floquet map
        O0: Measured observable, Jz of the map's system by default
        basis: Operator basis, Gell-Mann of dimension d by default
        R: Parity operator; when given, eigenvectors inside degenerate clusters are
           rotated onto its eigenstates and their parities are reported
    """
    d = fmap.d
    if O0 is None:
        if fmap.system is None:
            raise ValueError("No observable given and the map carries no spin system")
        O0 = fmap.system.Jz
    O0 = np.asarray(O0, dtype=complex)
    if O0.shape != (d, d):
        raise DimensionMismatchError(f"Observable has shape {O0.shape}, map has dimension {d}")
    basis = basis or make_gellmann_basis(d)
    if basis.d != d:
        raise DimensionMismatchError(f"Basis dimension {basis.d} does not match map dimension {d}")

    T, V = schur(fmap.U, output="complex")
    phases = np.angle(np.diagonal(T))
    clusters = _phase_clusters(phases, DEGENERATE_PHASE_TOL)
    degenerate = any(len(c) > 1 for c in clusters)

    parities = None
    if R is not None:
        R = np.asarray(R, dtype=complex)
        for cluster in clusters:
            if len(cluster) > 1:
                block = V[:, cluster]
                w, rot = eigh(0.5 * (block.conj().T @ R @ block + (block.conj().T @ R @ block).conj().T))
                V[:, cluster] = block @ rot
        parities = np.real(np.einsum("ik,ij,jk->k", V.conj(), R, V))

    if degenerate:
        message = (
            f"Floquet operator has degenerate eigenphases (spacing < {DEGENERATE_PHASE_TOL:g}); "
            "asymptotic prediction is unreliable"
        )
        warnings.warn(message, RuntimeWarning, stacklevel=2)
        logger.warning(message)

    label = np.empty(d, dtype=int)
    for c_idx, cluster in enumerate(clusters):
        label[cluster] = c_idx
    same_cluster = label[:, None] == label[None, :]

    O_eig = V.conj().T @ O0 @ V
    # E'_alpha = V^dagger E_alpha V, so (b_jk)_alpha = E'_alpha[k, j]
    rotated = np.matmul(np.matmul(V.conj().T[None, :, :], basis.elements), V[None, :, :])
    B = rotated.transpose(0, 2, 1).reshape(basis.size, d * d)

    weights = np.abs(O_eig) ** 2
    oscillating = np.where(same_cluster, 0.0, weights).reshape(d * d)
    gram = np.real((B * oscillating) @ B.conj().T)

    dephased = np.where(same_cluster, O_eig, 0.0)
    v = np.real(B @ dephased.reshape(d * d))
    gram = gram + np.outer(v, v)
    gram = 0.5 * (gram + gram.T)

    scale = np.abs(O_eig).max()
    n_nonzero = int(np.count_nonzero(np.abs(O_eig) > NONZERO_TERM_RTOL * scale)) if scale > 0 else 0

    spectrum = np.clip(eigh(gram, eigvals_only=True)[::-1], 0.0, None)
    if spectrum.sum() <= 0:
        raise NoInformationError("Observable has no component in the operator basis")
    spectrum = spectrum / spectrum.sum()
    # below-threshold entries are roundoff of exactly-zero directions
    spectrum[spectrum < NONZERO_TERM_RTOL * spectrum[0]] = 0.0
    spectrum = spectrum / spectrum.sum()

    return AsymptoticPrediction(
        spectrum=spectrum,
        entropy=spectrum_entropy(spectrum),
        predicted_gram=gram,
        n_nonzero_terms=n_nonzero,
        degenerate=degenerate,
        parities=parities,
    )
