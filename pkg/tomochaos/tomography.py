"""
Tomography Engine
=================
Simulated continuous-measurement records, linear maximum-likelihood
inversion with a Moore-Penrose pseudo-inverse, and projection of the
estimate onto the physical state space.

The record model is

    M_i = Tr(O_i rho_0) + sigma W_i,   W_i ~ N(0, 1)

and with rho_0 = I/d + sum_alpha r_alpha E_alpha the signal is linear in r
through the matrix (O~)_{i alpha} = Tr(O_i E_alpha).
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.linalg import eigh

from .ensembles import sample_unitary
from .floquet import (
    FloquetMap,
    ObservableSequence,
    heisenberg_sequence,
    kicked_top_no_tr,
    kicked_top_tr,
    per_step_haar_sequence,
    sampled_map,
)
from .metrics import (
    MetricsPoint,
    collective_fisher,
    covariance_entropy,
    fidelity,
    hilbert_schmidt_error,
    log_inverse_volume,
)
from .spin import (
    BlochVector,
    DensityMatrix,
    OperatorBasis,
    SeedLike,
    SpinSystem,
    as_generator,
    bloch_pack,
    make_gellmann_basis,
    make_spin_system,
)
from .state import DimensionMismatchError, DynamicsKind, DynamicsSpec, EnsembleKind, KickRow, NoInformationError

logger = logging.getLogger(__name__)

PINV_RTOL = 1e-10
KICK_COLUMNS = [
    "curve", "n", "fidelity", "fidelity_sem", "entropy", "fisher",
    "trace_invC", "rank", "log_det", "hs_error",
]


@dataclass(frozen=True)
class MeasurementRecord:
    """Noisy record of one state under one observable sequence"""
    M: np.ndarray = field(repr=False)
    Otilde: np.ndarray = field(repr=False)
    sigma: float
    seed: Optional[int] = None
    offsets: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.M.shape[0] != self.Otilde.shape[0]:
            raise DimensionMismatchError(
                f"Record has {self.M.shape[0]} values but {self.Otilde.shape[0]} observable rows"
            )

    def __len__(self) -> int:
        return self.M.shape[0]

    @property
    def signal(self) -> np.ndarray:
        """Record with the identity part Tr(O_i)/d removed"""
        return self.M if self.offsets is None else self.M - self.offsets


@dataclass(frozen=True)
class CovarianceSummary:
    """Inverse covariance O~^T O~ (sigma-scaled) and its spectrum"""
    invC: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    rank: int
    threshold: float

    @classmethod
    def from_gram(cls, gram: np.ndarray, rtol: float = PINV_RTOL) -> "CovarianceSummary":
        gram = 0.5 * (gram + gram.T)
        w, v = eigh(gram)
        w, v = w[::-1], v[:, ::-1]
        threshold = rtol * max(w[0], 0.0)
        rank = int(np.count_nonzero(w > threshold)) if w[0] > 0 else 0
        return cls(invC=gram, eigenvalues=w, eigenvectors=v, rank=rank, threshold=threshold)

    @property
    def trace(self) -> float:
        return float(np.trace(self.invC))

    @property
    def log_det(self) -> float:
        """log det of invC restricted to the measured subspace"""
        if self.rank == 0:
            return float("-inf")
        return float(np.sum(np.log(self.eigenvalues[:self.rank])))

    def pseudo_inverse(self) -> np.ndarray:
        """(O~^T O~)^+ with eigenvalues below the threshold dropped"""
        vr = self.eigenvectors[:, :self.rank]
        return (vr / self.eigenvalues[:self.rank]) @ vr.T


@dataclass(frozen=True)
class ReconstructionResult:
    """Unconstrained and physical estimates of one state"""
    r_ml: BlochVector
    rho_physical: DensityMatrix
    fidelity: float


def observable_matrix(seq: ObservableSequence, basis: OperatorBasis) -> np.ndarray:
    """n x (d^2-1) real matrix of Tr(O_i E_alpha)"""
    if seq.d != basis.d:
        raise DimensionMismatchError(f"Observables have dimension {seq.d}, basis has {basis.d}")
    return basis.coefficients(seq.O_list)


def _as_density(rho0: Union[DensityMatrix, np.ndarray]) -> DensityMatrix:
    if isinstance(rho0, DensityMatrix):
        return rho0
    arr = np.asarray(rho0)
    if arr.ndim == 1:
        return DensityMatrix.from_state_vector(arr)
    return DensityMatrix(rho=arr)


def simulate_record(
    seq: ObservableSequence,
    rho0: Union[DensityMatrix, np.ndarray],
    basis: OperatorBasis,
    sigma: float = 0.0,
    seed: SeedLike = None,
    otilde: Optional[np.ndarray] = None,
) -> MeasurementRecord:
    """
    M_i = Tr(O_i rho_0) + sigma w_i

    Args:
        seq: Heisenberg observables
        rho0: True state (density matrix or state vector)
        basis: Operator basis for the O~ rows
        sigma: Noise standard deviation, >= 0
        seed: Noise RNG seed
        otilde: Precomputed observable_matrix(seq, basis)
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    state = _as_density(rho0)
    if state.d != seq.d:
        raise DimensionMismatchError(f"State has dimension {state.d}, observables have {seq.d}")
    Otilde = observable_matrix(seq, basis) if otilde is None else otilde
    clean = np.real(np.einsum("nij,ji->n", seq.O_list, state.rho))
    offsets = np.real(np.einsum("nii->n", seq.O_list)) / seq.d
    M = clean
    if sigma > 0:
        M = clean + sigma * as_generator(seed).standard_normal(len(seq))
    return MeasurementRecord(
        M=M,
        Otilde=Otilde,
        sigma=float(sigma),
        seed=seed if isinstance(seed, int) else None,
        offsets=offsets,
    )


def invert_record(rec: MeasurementRecord, rtol: float = PINV_RTOL) -> Tuple[BlochVector, CovarianceSummary]:
    """
    r_ML = (O~^T O~)^+ O~^T M

    Raises:
        NoInformationError: if every row of O~ vanishes
    """
    if len(rec) == 0:
        raise ValueError("Measurement record is empty")
    if not np.any(rec.Otilde):
        raise NoInformationError("Measurement record resolves no operator direction")
    cov = CovarianceSummary.from_gram(rec.Otilde.T @ rec.Otilde, rtol)
    r = cov.pseudo_inverse() @ (rec.Otilde.T @ rec.signal)
    return BlochVector(r=r), cov


def project_spectrum_to_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto {p >= 0, sum p = 1}"""
    v = np.asarray(values, dtype=float)
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u) - 1.0
    k = np.arange(1, len(u) + 1)
    rho = np.nonzero(u - cumulative / k > 0)[0][-1]
    theta = cumulative[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_to_physical(r_ml: Union[BlochVector, np.ndarray], basis: OperatorBasis) -> DensityMatrix:
    """
    Closest density matrix in Frobenius norm with the eigenvectors of rho_ML held fixed

    The spectrum of rho_ML = I/d + sum r_alpha E_alpha is projected onto the
    probability simplex.
    """
    rho_ml = bloch_pack(r_ml, basis).rho
    w, v = eigh(0.5 * (rho_ml + rho_ml.conj().T))
    p = project_spectrum_to_simplex(w)
    rho = (v * p) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho=rho, physical=True)


class CumulativeInverter:
    """
    Running O~^T O~ and O~^T M for a batch of states sharing one observable sequence

    Each kick adds one row, so the Gram matrix is a sum of rank-one updates.
    """

    def __init__(self, size: int, n_states: int = 1, rtol: float = PINV_RTOL):
        self.size = size
        self.n_states = n_states
        self.rtol = rtol
        self.gram = np.zeros((size, size))
        self.projections = np.zeros((size, n_states))
        self.n = 0

    def update(self, row: np.ndarray, values: Union[float, np.ndarray]) -> None:
        """Add one kick: O~ row and the record value for each state"""
        row = np.asarray(row, dtype=float)
        if row.shape != (self.size,):
            raise DimensionMismatchError(f"Row of length {row.shape} does not match size {self.size}")
        self.gram += np.outer(row, row)
        self.projections += np.outer(row, np.broadcast_to(values, (self.n_states,)))
        self.n += 1

    def summary(self) -> CovarianceSummary:
        if self.n == 0 or not np.any(self.gram):
            raise NoInformationError("No informative kicks accumulated yet")
        return CovarianceSummary.from_gram(self.gram, self.rtol)

    def estimates(self, cov: Optional[CovarianceSummary] = None) -> np.ndarray:
        """Unconstrained Bloch vectors, shape (n_states, size)"""
        cov = cov or self.summary()
        pinv = cov.pseudo_inverse()
        # one matvec per state keeps each estimate independent of the batch layout
        return np.stack([pinv @ self.projections[:, s] for s in range(self.n_states)])


def build_floquet_map(spec: DynamicsSpec, system: SpinSystem, seed: SeedLike = None) -> FloquetMap:
    """Fixed one-period unitary for every dynamics kind except HaarPerStep"""
    kind = DynamicsKind(spec.kind)
    if kind == DynamicsKind.KICKED_TOP_TR:
        return kicked_top_tr(system, spec.alpha, spec.lam)
    if kind == DynamicsKind.KICKED_TOP_NO_TR:
        return kicked_top_no_tr(system, spec.no_tr_params, spec.no_tr_convention)
    if kind == DynamicsKind.HAAR_PER_STEP:
        raise ValueError("HaarPerStep draws a new unitary every kick; there is no single Floquet map")
    return sampled_map(sample_unitary(EnsembleKind(kind.value), system, seed), system)


def sequence_seed(seed: int) -> np.random.SeedSequence:
    """Stream that draws the Floquet operator or per-step unitaries of a run"""
    return np.random.SeedSequence([seed, 0])


def build_observable_sequence(
    spec: DynamicsSpec,
    system: SpinSystem,
    n: int,
    seed: SeedLike = None,
    O0: Optional[np.ndarray] = None,
) -> ObservableSequence:
    """Heisenberg observables for n kicks of the given dynamics"""
    if DynamicsKind(spec.kind) == DynamicsKind.HAAR_PER_STEP:
        return per_step_haar_sequence(system, O0, n, seed)
    return heisenberg_sequence(build_floquet_map(spec, system, seed), O0, n)


@dataclass
class TomographyRun:
    """Per-kick information metrics for one dynamics spec over a batch of states"""
    label: str
    n_values: np.ndarray
    metrics: List[MetricsPoint]
    fidelities: np.ndarray = field(repr=False)
    results: List[ReconstructionResult] = field(default_factory=list, repr=False)
    covariance: Optional[CovarianceSummary] = field(default=None, repr=False)

    @property
    def final(self) -> MetricsPoint:
        return self.metrics[-1]

    def to_frame(self) -> pd.DataFrame:
        rows: List[KickRow] = [{
            "curve": self.label,
            "n": point.n,
            "fidelity": point.fidelity,
            "fidelity_sem": point.fidelity_sem,
            "entropy": point.entropy,
            "fisher": point.fisher,
            "trace_invC": point.trace_inv_c,
            "rank": point.rank,
            "log_det": point.log_det,
            "hs_error": point.hs_error,
        } for point in self.metrics]
        return pd.DataFrame(rows, columns=KICK_COLUMNS)


def evaluation_points(n_kicks: int, every: int = 1) -> np.ndarray:
    """Kick counts at which metrics are evaluated; always ends with n_kicks"""
    if n_kicks < 1 or every < 1:
        raise ValueError(f"n_kicks and evaluate_every must be >= 1, got {n_kicks}, {every}")
    points = set(range(every, n_kicks + 1, every))
    points.add(n_kicks)
    return np.array(sorted(points), dtype=int)


def run_tomography(
    spec: DynamicsSpec,
    states: Sequence[Union[np.ndarray, DensityMatrix]],
    n_kicks: int,
    sigma: float = 0.0,
    seed: int = 0,
    evaluate_every: int = 1,
    O0: Optional[np.ndarray] = None,
    basis: Optional[OperatorBasis] = None,
    label: Optional[str] = None,
) -> TomographyRun:
    """
    Reconstruct every state at each evaluated kick count

    The observable sequence is drawn from SeedSequence([seed, 0]); the noise
    of state s from SeedSequence([seed, 1, s]). Results therefore depend only
    on the arguments, never on how states are batched.

    Args:
        spec: Dynamics driving the measured observable
        states: Pure target states (vectors or pure DensityMatrix)
        n_kicks: Record length
        sigma: Noise standard deviation
        seed: Integer seed for this run
        evaluate_every: Metric stride in kicks
        O0: Initial observable, Jz by default
        basis: Operator basis, Gell-Mann by default
        label: Curve label, spec.label by default
    """
    if len(states) == 0:
        raise ValueError("Need at least one state")
    system = make_spin_system(spec.j)
    basis = basis or make_gellmann_basis(system.d)
    seq = build_observable_sequence(spec, system, n_kicks, sequence_seed(seed), O0)
    Otilde = observable_matrix(seq, basis)

    targets = [_as_density(s) for s in states]
    vectors = [t.state_vector() for t in targets]
    records = [
        simulate_record(seq, t, basis, sigma, np.random.SeedSequence([seed, 1, idx]), otilde=Otilde)
        for idx, t in enumerate(targets)
    ]
    signals = np.stack([rec.signal for rec in records], axis=1)

    inverter = CumulativeInverter(basis.size, len(targets))
    eval_points = set(evaluation_points(n_kicks, evaluate_every).tolist())
    metrics: List[MetricsPoint] = []
    fidelity_rows = []
    results: List[ReconstructionResult] = []
    cov = None

    for i in range(n_kicks):
        inverter.update(Otilde[i], signals[i])
        n = i + 1
        if n not in eval_points or not np.any(inverter.gram):
            continue
        cov = inverter.summary()
        estimates = inverter.estimates(cov)
        results = []
        for psi, target, r in zip(vectors, targets, estimates):
            rho = project_to_physical(r, basis)
            results.append(ReconstructionResult(r_ml=BlochVector(r=r), rho_physical=rho, fidelity=fidelity(psi, rho)))
        fids = np.array([res.fidelity for res in results])
        hs = np.mean([hilbert_schmidt_error(t, res.rho_physical) for t, res in zip(targets, results)])
        sem = float(fids.std(ddof=1) / np.sqrt(len(fids))) if len(fids) > 1 else 0.0
        metrics.append(MetricsPoint(
            n=n,
            fidelity=float(fids.mean()),
            entropy=covariance_entropy(cov),
            fisher=collective_fisher(cov, sigma),
            log_inv_volume=log_inverse_volume(cov, sigma),
            rank=cov.rank,
            trace_inv_c=cov.trace,
            log_det=cov.log_det,
            fidelity_sem=sem,
            hs_error=float(hs),
        ))
        fidelity_rows.append(fids)
        logger.debug("%s n=%d rank=%d entropy=%.4f fidelity=%.4f", spec.label, n, cov.rank, metrics[-1].entropy, metrics[-1].fidelity)

    if not metrics:
        raise NoInformationError(f"{spec.label}: record carried no information at any evaluated kick")
    logger.info(
        "%s: %d kicks, %d states, final rank %d, entropy %.4f, fidelity %.4f",
        label or spec.label, n_kicks, len(targets), metrics[-1].rank, metrics[-1].entropy, metrics[-1].fidelity,
    )
    return TomographyRun(
        label=label or spec.label,
        n_values=np.array([p.n for p in metrics], dtype=int),
        metrics=metrics,
        fidelities=np.stack(fidelity_rows),
        results=results,
        covariance=cov,
    )
