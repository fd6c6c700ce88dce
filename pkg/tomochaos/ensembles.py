r"""
Random Matrix Ensembles
=======================
Samplers for the circular ensembles used as models of chaotic Floquet
operators, and the closed-form entropy predictions for each symmetry class.

=============== ================================== ============================
kind            matrix drawn                       closed-form entropy (nats)
=============== ================================== ============================
CUE             Haar on U(d)                       ln(d^2-1) - c
COE             W W^T, W Haar                      ln(d^2-1) - c
ParityBlockCOE  independent COE blocks on R = +-1  ln((d^2-1)/2) - c
HaarPerStep     fresh Haar unitary every kick      ln(d^2-1)
=============== ================================== ============================

with c = 0.729637 = 2 - euler_gamma - ln 2.

The closed forms treat every matrix element of the measured observable as
real and drop its diagonal in the eigenbasis of U. dephased_entropy_prediction
keeps both: CUE elements are complex (deficit 1 - euler_gamma) and the
diagonal carries a share 1/(d+1) (CUE) or 2/(d+2) (COE) of Tr O^2 along a
single direction. At d = 21 that gives 5.547 (CUE) and 5.144 (COE).
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh

from .spin import SeedLike, SpinSystem, as_generator, rotation_operator
from .state import EnsembleKind

logger = logging.getLogger(__name__)

WOOTTERS_OFFSET = 0.729637
PARITY_CLUSTER_TOL = 1e-8


def wootters_offset() -> float:
    """2 - euler_gamma - ln 2, the entropy deficit of a random real unit vector"""
    return 2.0 - np.euler_gamma - np.log(2.0)


@dataclass(frozen=True)
class EnsembleSpec:
    """Which random unitary source drives the dynamics"""
    kind: EnsembleKind
    d: int
    block_sizes: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if self.d < 2:
            raise ValueError(f"Ensemble dimension must be >= 2, got {self.d}")
        if self.kind == EnsembleKind.PARITY_BLOCK_COE:
            if self.block_sizes is None:
                if self.d % 2 == 0:
                    raise ValueError("Parity blocks need odd d (integer spin)")
                object.__setattr__(self, "block_sizes", ((self.d + 1) // 2, (self.d - 1) // 2))
            a, b = self.block_sizes
            if a <= 0 or b <= 0 or a + b != self.d:
                raise ValueError(f"Block sizes {self.block_sizes} must be positive and sum to {self.d}")


def _haar(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    # QR is unique only up to phases; fixing diag(R) > 0 makes Q Haar distributed
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def _coe(n: int, rng: np.random.Generator) -> np.ndarray:
    w = _haar(n, rng)
    return w @ w.T


def sample_haar(d: int, seed: SeedLike = None) -> np.ndarray:
    """
    Haar (CUE) unitary from the QR decomposition of a complex Ginibre matrix

    Args:
        d: Matrix dimension, >= 2
        seed: int, SeedSequence or Generator
    """
    if d < 2:
        raise ValueError(f"Need d >= 2, got {d}")
    return _haar(d, as_generator(seed))


def sample_coe(d: int, seed: SeedLike = None) -> np.ndarray:
    """COE unitary U = W W^T with W Haar; U is symmetric"""
    if d < 2:
        raise ValueError(f"Need d >= 2, got {d}")
    return _coe(d, as_generator(seed))


def parity_eigenbasis(system: SpinSystem) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal eigenvectors of R = exp(-i pi Jx)

    Returns:
        (minus, plus): d x a and d x (d-a) matrices spanning the R = -1 and R = +1 eigenspaces
    """
    if not system.is_integer:
        raise ValueError("Parity eigenspaces with eigenvalues +-1 need integer j")
    R = rotation_operator(system, "x", np.pi)
    w, v = eigh(0.5 * (R + R.conj().T))
    if np.max(np.abs(np.abs(w) - 1.0)) > PARITY_CLUSTER_TOL:
        raise ValueError("Parity operator eigenvalues do not cluster at +-1")
    minus = v[:, w < 0]
    plus = v[:, w > 0]
    # re-orthonormalise each degenerate block
    minus, _ = np.linalg.qr(minus)
    plus, _ = np.linalg.qr(plus)
    return minus, plus


def sample_parity_block_coe(system: SpinSystem, seed: SeedLike = None) -> np.ndarray:
    """
    COE matrix that commutes with the parity operator

    Independent COE blocks are drawn on the R = -1 and R = +1 eigenspaces
    and assembled in the standard basis.
    """
    spec = EnsembleSpec(kind=EnsembleKind.PARITY_BLOCK_COE, d=system.d)
    minus, plus = parity_eigenbasis(system)
    if sorted((minus.shape[1], plus.shape[1]), reverse=True) != sorted(spec.block_sizes, reverse=True):
        raise ValueError(
            f"Parity eigenspace dimensions ({minus.shape[1]}, {plus.shape[1]}) "
            f"do not match block sizes {spec.block_sizes}"
        )
    rng = as_generator(seed)
    block_minus = _coe(minus.shape[1], rng)
    block_plus = _coe(plus.shape[1], rng)
    return minus @ block_minus @ minus.conj().T + plus @ block_plus @ plus.conj().T


def sample_unitary(kind: EnsembleKind, system: SpinSystem, seed: SeedLike = None) -> np.ndarray:
    """Draw one fixed Floquet operator from a circular ensemble"""
    kind = EnsembleKind(kind)
    if kind == EnsembleKind.CUE:
        return sample_haar(system.d, seed)
    if kind == EnsembleKind.COE:
        return sample_coe(system.d, seed)
    if kind == EnsembleKind.PARITY_BLOCK_COE:
        return sample_parity_block_coe(system, seed)
    raise ValueError(f"{kind.value} does not define a single Floquet operator")


def wootters_entropy_prediction(kind: EnsembleKind, d: int) -> float:
    """
    Expected asymptotic entropy of the normalised inverse-covariance spectrum

    Args:
        kind: Symmetry class of the driving dynamics
        d: Hilbert-space dimension

    Returns:
        Entropy in nats
    """
    if d < 2:
        raise ValueError(f"Need d >= 2, got {d}")
    kind = EnsembleKind(kind)
    D = d * d - 1
    if kind == EnsembleKind.PARITY_BLOCK_COE:
        return float(np.log(D / 2.0) - WOOTTERS_OFFSET)
    if kind in (EnsembleKind.CUE, EnsembleKind.COE):
        return float(np.log(D) - WOOTTERS_OFFSET)
    if kind == EnsembleKind.HAAR_PER_STEP:
        return float(np.log(D))
    raise ValueError(f"No entropy prediction for {kind}")


def dephased_entropy_prediction(kind: EnsembleKind, d: int) -> float:
    """
    Expected asymptotic entropy with the eigenvector statistics of each ensemble

    Each off-diagonal weight |O_jk|^2 fills two directions. Its distribution
    is exponential for complex eigenvectors (CUE) and chi-square with one
    degree of freedom for real ones (COE). The diagonal of O in the eigenbasis
    of U collapses onto one dephased direction. Parity blocks have no
    diagonal, so that row equals the closed form.

    Args:
        kind: Symmetry class of the driving dynamics
        d: Hilbert-space dimension

    Returns:
        Entropy in nats
    """
    if d < 2:
        raise ValueError(f"Need d >= 2, got {d}")
    kind = EnsembleKind(kind)
    if kind in (EnsembleKind.PARITY_BLOCK_COE, EnsembleKind.HAAR_PER_STEP):
        return wootters_entropy_prediction(kind, d)
    if kind == EnsembleKind.CUE:
        share, deficit = d / (d + 1.0), 1.0 - np.euler_gamma
    else:
        share, deficit = d / (d + 2.0), wootters_offset()
    # mean off-diagonal weight is share * Tr O^2 / (d (d - 1))
    effective = d * (d - 1.0) / share
    return float(share * (np.log(effective) - deficit) - (1.0 - share) * np.log(1.0 - share))
