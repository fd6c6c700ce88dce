"""
Spin Algebra
============
Angular-momentum operators, the generalized Gell-Mann operator basis,
density matrices and Bloch-vector coordinates for a single spin-j.

Every other module builds on the conventions fixed here:

- standard basis ordered m = j, j-1, ..., -j so |j,j> is the first vector
- basis elements ordered symmetric pairs, antisymmetric pairs, diagonals
- unitaries built from Hermitian generators by eigendecomposition
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np
from scipy.linalg import eigh

from .state import DimensionMismatchError

SeedLike = Optional[Union[int, np.random.Generator, np.random.SeedSequence]]

HERMITIAN_TOL = 1e-10


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Normalise an int / SeedSequence / Generator into a Generator"""
    return np.random.default_rng(seed)


def hermiticity_residual(matrix: np.ndarray) -> float:
    """Frobenius norm of H - H^dagger"""
    return float(np.linalg.norm(matrix - matrix.conj().T))


@dataclass(frozen=True)
class SpinSystem:
    """Spin-j angular momentum operators in units of hbar = 1"""
    j: float
    d: int
    Jx: np.ndarray = field(repr=False)
    Jy: np.ndarray = field(repr=False)
    Jz: np.ndarray = field(repr=False)

    @property
    def operators(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.Jx, self.Jy, self.Jz

    @property
    def is_integer(self) -> bool:
        return self.d % 2 == 1

    def axis(self, name: str) -> np.ndarray:
        """Operator for axis 'x', 'y' or 'z'"""
        try:
            return {"x": self.Jx, "y": self.Jy, "z": self.Jz}[name]
        except KeyError:
            raise ValueError(f"Unknown axis '{name}', expected x, y or z") from None

    def commutator_residual(self) -> float:
        """Largest Frobenius residual of [J_i, J_j] = i eps_ijk J_k"""
        residuals = [
            self.Jx @ self.Jy - self.Jy @ self.Jx - 1j * self.Jz,
            self.Jy @ self.Jz - self.Jz @ self.Jy - 1j * self.Jx,
            self.Jz @ self.Jx - self.Jx @ self.Jz - 1j * self.Jy,
        ]
        return max(float(np.linalg.norm(r)) for r in residuals)


def make_spin_system(j: float) -> SpinSystem:
    """
    Build Jx, Jy, Jz for spin j from the ladder operator J+

    Args:
        j: Spin quantum number, 2j must be a non-negative integer

    Returns:
        SpinSystem with dense complex operators
    """
    two_j = 2.0 * j
    if j < 0 or abs(two_j - round(two_j)) > 1e-12:
        raise ValueError(f"j must be a non-negative integer or half-integer, got {j}")
    j = round(two_j) / 2.0
    m = np.arange(j, -j - 1, -1)
    d = len(m)

    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)); with descending m it sits on the superdiagonal
    jplus = np.diag(np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0)), k=1).astype(complex)
    jminus = jplus.conj().T

    Jx = 0.5 * (jplus + jminus)
    Jy = -0.5j * (jplus - jminus)
    Jz = np.diag(m).astype(complex)
    return SpinSystem(j=j, d=d, Jx=Jx, Jy=Jy, Jz=Jz)


@dataclass(frozen=True)
class OperatorBasis:
    """Orthonormal traceless Hermitian basis {E_alpha} of su(d)"""
    elements: np.ndarray = field(repr=False)

    @property
    def d(self) -> int:
        return self.elements.shape[1]

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def __len__(self) -> int:
        return self.size

    @cached_property
    def _dual(self) -> np.ndarray:
        # Tr(O E_a) = sum_ij O_ij (E_a)_ji = vec(O) . vec(E_a^T)
        return self.elements.transpose(0, 2, 1).reshape(self.size, self.d * self.d)

    def gram(self) -> np.ndarray:
        """Hilbert-Schmidt Gram matrix Tr(E_a E_b)"""
        return np.real(self._dual.conj() @ self._dual.T)

    def coefficients(self, operators: np.ndarray) -> np.ndarray:
        """
        Real expansion coefficients Tr(O E_alpha)

        Args:
            operators: One (d, d) Hermitian matrix or a stack (n, d, d)

        Returns:
            Array of shape (D,) or (n, D)
        """
        ops = np.asarray(operators)
        if ops.shape[-2:] != (self.d, self.d):
            raise DimensionMismatchError(
                f"Operator of shape {ops.shape[-2:]} does not match basis dimension {self.d}"
            )
        flat = ops.reshape(-1, self.d * self.d)
        coeffs = np.real(flat @ self._dual.T)
        return coeffs[0] if ops.ndim == 2 else coeffs

    def combine(self, r: np.ndarray) -> np.ndarray:
        """Operator sum_alpha r_alpha E_alpha"""
        r = np.asarray(r, dtype=float)
        if r.shape[-1] != self.size:
            raise DimensionMismatchError(f"Bloch vector of length {r.shape[-1]} does not match basis size {self.size}")
        return np.tensordot(r, self.elements, axes=([-1], [0]))


def make_gellmann_basis(d: int) -> OperatorBasis:
    """
    Generalized Gell-Mann matrices normalised to Tr(E_a E_b) = delta_ab

    Order: (d^2-d)/2 symmetric pairs (row-major), (d^2-d)/2 antisymmetric
    pairs (row-major), d-1 diagonal generators.
    """
    if d < 2:
        raise ValueError(f"Operator basis needs d >= 2, got {d}")
    pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
    elements = np.zeros((d * d - 1, d, d), dtype=complex)
    s = 1.0 / np.sqrt(2.0)

    idx = 0
    for a, b in pairs:
        elements[idx, a, b] = s
        elements[idx, b, a] = s
        idx += 1
    for a, b in pairs:
        elements[idx, a, b] = -1j * s
        elements[idx, b, a] = 1j * s
        idx += 1
    for level in range(1, d):
        diag = np.zeros(d)
        diag[:level] = 1.0
        diag[level] = -float(level)
        elements[idx] = np.diag(diag / np.sqrt(level * (level + 1.0)))
        idx += 1

    return OperatorBasis(elements=elements)


@dataclass(frozen=True)
class DensityMatrix:
    """d x d density operator; `physical` marks a positivity-checked state"""
    rho: np.ndarray = field(repr=False)
    physical: bool = False

    def __post_init__(self):
        if self.physical:
            self.validate()

    @property
    def d(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def from_state_vector(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(rho=np.outer(psi, psi.conj()), physical=True)

    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def eigenvalues(self) -> np.ndarray:
        return eigh(0.5 * (self.rho + self.rho.conj().T), eigvals_only=True)

    def state_vector(self, tol: float = 1e-9) -> np.ndarray:
        """Leading eigenvector; only defined for pure states"""
        if abs(self.purity() - 1.0) > tol:
            raise ValueError(f"State is mixed (purity {self.purity():.6f}); no state vector")
        w, v = eigh(0.5 * (self.rho + self.rho.conj().T))
        return v[:, -1]

    def validate(self, tol: float = 1e-12, positivity_tol: float = 1e-10) -> None:
        """Raise ValueError unless Hermitian, unit trace and positive"""
        if hermiticity_residual(self.rho) > tol * max(1, self.d):
            raise ValueError("Density matrix is not Hermitian")
        if abs(np.trace(self.rho) - 1.0) > tol * max(1, self.d):
            raise ValueError(f"Density matrix trace is {np.real(np.trace(self.rho)):.3e}, expected 1")
        if self.eigenvalues().min() < -positivity_tol:
            raise ValueError("Density matrix has negative eigenvalues")


@dataclass(frozen=True)
class BlochVector:
    """Generalized Bloch vector r_alpha = Tr(rho E_alpha)"""
    r: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.r)

    def norm_squared(self) -> float:
        return float(np.dot(self.r, self.r))


def bloch_expand(rho: Union[DensityMatrix, np.ndarray], basis: OperatorBasis) -> BlochVector:
    """r_alpha = Tr(rho E_alpha), the inverse of bloch_pack"""
    matrix = rho.rho if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if matrix.shape != (basis.d, basis.d):
        raise DimensionMismatchError(f"rho has shape {matrix.shape}, basis expects ({basis.d}, {basis.d})")
    return BlochVector(r=basis.coefficients(matrix))


def bloch_pack(r: Union[BlochVector, np.ndarray], basis: OperatorBasis) -> DensityMatrix:
    """rho = I/d + sum_alpha r_alpha E_alpha (no positivity check)"""
    vector = r.r if isinstance(r, BlochVector) else np.asarray(r, dtype=float)
    rho = np.eye(basis.d, dtype=complex) / basis.d + basis.combine(vector)
    return DensityMatrix(rho=rho)


def matrix_exponential_hermitian_generator(H: np.ndarray, t: float) -> np.ndarray:
    """
    U = exp(-i H t) via the eigendecomposition of Hermitian H

    Raises:
        ValueError: if H deviates from Hermitian by more than 1e-10
    """
    H = np.asarray(H)
    if hermiticity_residual(H) > HERMITIAN_TOL:
        raise ValueError(f"Generator is not Hermitian (residual {hermiticity_residual(H):.2e})")
    w, v = eigh(0.5 * (H + H.conj().T))
    phases = np.exp(-1j * w * t)
    return (v * phases) @ v.conj().T


def rotation_operator(system: SpinSystem, axis: str, angle: float) -> np.ndarray:
    """exp(-i angle J_axis)"""
    return matrix_exponential_hermitian_generator(system.axis(axis), angle)


def random_state_vector(d: int, seed: SeedLike = None) -> np.ndarray:
    """Haar-random pure state: normalised vector of iid complex Gaussians"""
    if d < 2:
        raise ValueError(f"Need d >= 2, got {d}")
    rng = as_generator(seed)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_pure_state(d: int, seed: SeedLike = None) -> DensityMatrix:
    """Haar-random pure density matrix |psi><psi|"""
    return DensityMatrix.from_state_vector(random_state_vector(d, seed))


def spin_coherent_vector(system: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """exp(-i phi Jz) exp(-i theta Jy) |j,j>"""
    highest = np.zeros(system.d, dtype=complex)
    highest[0] = 1.0
    return rotation_operator(system, "z", phi) @ (rotation_operator(system, "y", theta) @ highest)


def spin_coherent_state(system: SpinSystem, theta: float, phi: float) -> DensityMatrix:
    """Spin coherent state pointing along (sin t cos p, sin t sin p, cos t)"""
    return DensityMatrix.from_state_vector(spin_coherent_vector(system, theta, phi))


def expectation(operator: np.ndarray, state: Union[DensityMatrix, np.ndarray]) -> float:
    """Real expectation value for a density matrix or a state vector"""
    if isinstance(state, DensityMatrix):
        return float(np.real(np.trace(operator @ state.rho)))
    psi = np.asarray(state)
    return float(np.real(np.vdot(psi, operator @ psi)))
