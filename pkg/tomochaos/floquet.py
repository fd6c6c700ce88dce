"""
Floquet Dynamics
Kicked-top Floquet operators, symmetry operators and Heisenberg observables
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Union

import numpy as np

from .ensembles import sample_haar
from .spin import (
    SeedLike,
    SpinSystem,
    as_generator,
    hermiticity_residual,
    matrix_exponential_hermitian_generator,
    rotation_operator,
)

logger = logging.getLogger(__name__)

NO_TR_PARAM_NAMES = ("lambda_1", "lambda_2", "lambda_3", "alpha_1", "alpha_2", "alpha_3")
NO_TR_CONVENTIONS = ("kicked_top", "literal")
SWAP_REVERSAL_TOL = 1e-8


class MapKind(str, Enum):
    """Origin of a Floquet operator"""
    KICKED_TOP_TR = "KickedTopTR"
    KICKED_TOP_NO_TR = "KickedTopNoTR"
    SAMPLED_UNITARY = "SampledUnitary"


@dataclass(frozen=True)
class FloquetMap:
    """One-period unitary U together with how it was built"""
    U: np.ndarray = field(repr=False)
    kind: MapKind
    params: Dict[str, float] = field(default_factory=dict)
    system: Optional[SpinSystem] = field(default=None, repr=False)

    @property
    def d(self) -> int:
        return self.U.shape[0]

    def unitarity_residual(self) -> float:
        """||U^dagger U - I||_F"""
        return float(np.linalg.norm(self.U.conj().T @ self.U - np.eye(self.d)))


@dataclass(frozen=True)
class ObservableSequence:
    """Heisenberg observables O_i = (U^dagger)^i O_0 U^i for i = 1..n"""
    O_list: np.ndarray = field(repr=False)
    O0: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.O_list.shape[0]

    @property
    def d(self) -> int:
        return self.O0.shape[0]

    def hs_norms(self) -> np.ndarray:
        """Tr(O_i^2) for each kick"""
        return np.real(np.einsum("nij,nji->n", self.O_list, self.O_list))


def kicked_top_tr(system: SpinSystem, alpha: float, lam: float) -> FloquetMap:
    """
    Time-reversal invariant kicked top U = exp(-i lam Jz^2 / 2j) exp(-i alpha Jx)

    Args:
        system: Spin system
        alpha: Precession angle about x
        lam: Kick strength (chaoticity parameter)
    """
    kick = matrix_exponential_hermitian_generator(system.Jz @ system.Jz / (2.0 * system.j), lam)
    precession = rotation_operator(system, "x", alpha)
    return FloquetMap(
        U=kick @ precession,
        kind=MapKind.KICKED_TOP_TR,
        params={"alpha": float(alpha), "lambda": float(lam)},
        system=system,
    )


def _no_tr_params(params: Union[Sequence[float], Mapping[str, float]]) -> Dict[str, float]:
    if isinstance(params, Mapping):
        missing = [name for name in NO_TR_PARAM_NAMES if name not in params]
        if missing:
            raise ValueError(f"Missing non-TR kicked top parameters: {missing}")
        return {name: float(params[name]) for name in NO_TR_PARAM_NAMES}
    values = list(params)
    if len(values) != 6:
        raise ValueError(f"Non-TR kicked top needs six parameters, got {len(values)}")
    return dict(zip(NO_TR_PARAM_NAMES, map(float, values)))


def kicked_top_no_tr(
    system: SpinSystem,
    params: Union[Sequence[float], Mapping[str, float]],
    convention: str = "kicked_top",
) -> FloquetMap:
    """
    Kicked top without time-reversal symmetry

    U = exp(-i q1 Jx^2 - i a1 Jx) exp(-i q2 Jy^2 - i a2 Jy) exp(-i q3 Jz^2 - i a3 Jz)

    With convention 'kicked_top' q_i = lambda_i / 2j. With 'literal' q_1 = q_2 = 1,
    lambda_1 and lambda_2 only contribute global phases, and q_3 = lambda_3.

    Args:
        system: Spin system
        params: (lambda_1, lambda_2, lambda_3, alpha_1, alpha_2, alpha_3) or a mapping
        convention: Quadratic normalisation, 'kicked_top' or 'literal'
    """
    if convention not in NO_TR_CONVENTIONS:
        raise ValueError(f"Unknown convention '{convention}', expected one of {NO_TR_CONVENTIONS}")
    p = _no_tr_params(params)
    U = np.eye(system.d, dtype=complex)
    for i, axis in enumerate("xyz", start=1):
        J = system.axis(axis)
        lam, alpha = p[f"lambda_{i}"], p[f"alpha_{i}"]
        if convention == "kicked_top":
            generator = lam * (J @ J) / (2.0 * system.j) + alpha * J
            factor = matrix_exponential_hermitian_generator(generator, 1.0)
        elif axis == "z":
            generator = lam * (J @ J) + alpha * J
            factor = matrix_exponential_hermitian_generator(generator, 1.0)
        else:
            generator = J @ J + alpha * J
            factor = np.exp(-1j * lam) * matrix_exponential_hermitian_generator(generator, 1.0)
        U = U @ factor
    fmap = FloquetMap(U=U, kind=MapKind.KICKED_TOP_NO_TR, params=p, system=system)
    if swap_reversal_residual(fmap) < SWAP_REVERSAL_TOL:
        logger.warning(
            "Non-TR kicked top with matching x and z factors keeps an antiunitary symmetry; "
            "its statistics follow the COE, not the CUE"
        )
    return fmap


def sampled_map(U: np.ndarray, system: Optional[SpinSystem] = None, **params: float) -> FloquetMap:
    """Wrap an ensemble draw as a FloquetMap"""
    return FloquetMap(U=np.asarray(U, dtype=complex), kind=MapKind.SAMPLED_UNITARY, params=dict(params), system=system)


def time_reversal_check(fmap: FloquetMap, alpha: float, system: Optional[SpinSystem] = None) -> float:
    """
    Residual of T U T^-1 = U^dagger for T = exp(i alpha Jx) K

    Jx is real in the standard basis, so T U T^-1 = exp(i alpha Jx) conj(U) exp(-i alpha Jx).
    """
    system = system or fmap.system
    if system is None:
        raise ValueError("time_reversal_check needs the spin system the map was built from")
    rot = rotation_operator(system, "x", -alpha)
    reversed_map = rot @ fmap.U.conj() @ rot.conj().T
    return float(np.linalg.norm(reversed_map - fmap.U.conj().T))


def swap_reversal_residual(fmap: FloquetMap, system: Optional[SpinSystem] = None) -> float:
    """
    Residual of A U A^-1 = U^dagger for A = P K, P a pi rotation about (x + z)/sqrt 2

    P swaps Jx and Jz and flips Jy, so a non-TR kicked top whose first and
    third factors share their parameters is mapped onto its own inverse.
    """
    system = system or fmap.system
    if system is None:
        raise ValueError("swap_reversal_residual needs the spin system the map was built from")
    P = matrix_exponential_hermitian_generator((system.Jx + system.Jz) / np.sqrt(2.0), np.pi)
    mirrored = P @ fmap.U.conj() @ P.conj().T
    return float(np.linalg.norm(mirrored - fmap.U.conj().T))


def parity_operator(system: SpinSystem) -> np.ndarray:
    """R = exp(-i pi Jx)"""
    return rotation_operator(system, "x", np.pi)


def _check_observable(O0: np.ndarray, d: int) -> np.ndarray:
    O0 = np.asarray(O0, dtype=complex)
    if O0.shape != (d, d):
        raise ValueError(f"Observable has shape {O0.shape}, expected ({d}, {d})")
    if hermiticity_residual(O0) > 1e-10:
        raise ValueError("Observable must be Hermitian")
    return O0


def heisenberg_sequence(fmap: FloquetMap, O0: Optional[np.ndarray] = None, n: int = 1) -> ObservableSequence:
    """
    O_i = U^dagger O_{i-1} U for i = 1..n (iterated conjugation, no matrix powers)

    Args:
        fmap: Floquet map applied every kick
        O0: Initial observable, Jz of the map's spin system by default
        n: Number of kicks, >= 1
    """
    if n < 1:
        raise ValueError(f"Kick count must be >= 1, got {n}")
    if O0 is None:
        if fmap.system is None:
            raise ValueError("No observable given and the map carries no spin system")
        O0 = fmap.system.Jz
    O0 = _check_observable(O0, fmap.d)

    U = fmap.U
    Udag = U.conj().T
    out = np.empty((n, fmap.d, fmap.d), dtype=complex)
    current = O0
    for i in range(n):
        current = Udag @ current @ U
        current = 0.5 * (current + current.conj().T)
        out[i] = current
    return ObservableSequence(O_list=out, O0=O0)


def per_step_haar_sequence(
    system: SpinSystem,
    O0: Optional[np.ndarray] = None,
    n: int = 1,
    seed: SeedLike = None,
) -> ObservableSequence:
    """
    O_i = V_i^dagger O_{i-1} V_i with an independent Haar unitary V_i each kick

    The i-th observable is conjugated by the cumulative product V_1 V_2 ... V_i.
    """
    if n < 1:
        raise ValueError(f"Kick count must be >= 1, got {n}")
    O0 = _check_observable(system.Jz if O0 is None else O0, system.d)
    rng = as_generator(seed)
    out = np.empty((n, system.d, system.d), dtype=complex)
    current = O0
    for i in range(n):
        V = sample_haar(system.d, rng)
        current = V.conj().T @ current @ V
        current = 0.5 * (current + current.conj().T)
        out[i] = current
    logger.debug("Built per-step Haar sequence of %d kicks (d=%d)", n, system.d)
    return ObservableSequence(O_list=out, O0=O0)
