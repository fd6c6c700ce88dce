"""
Classical Kicked Top
Stroboscopic map on the unit sphere and phase-portrait data
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from .floquet import FloquetMap, MapKind
from .spin import SeedLike, SpinSystem, as_generator, expectation, spin_coherent_vector

logger = logging.getLogger(__name__)

UNIT_NORM_TOL = 1e-9
PORTRAIT_COLUMNS = ["traj_id", "step", "Y", "Z"]


@dataclass(frozen=True)
class SpherePoint:
    """Unit spin direction (X, Y, Z) = <J>/j"""
    X: float
    Y: float
    Z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> "SpherePoint":
        x, y, z = (float(v) for v in values)
        return cls(X=x, Y=y, Z=z)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpherePoint":
        """Polar angle theta from +z, azimuth phi from +x"""
        return cls(
            X=float(np.sin(theta) * np.cos(phi)),
            Y=float(np.sin(theta) * np.sin(phi)),
            Z=float(np.cos(theta)),
        )

    @property
    def angles(self) -> tuple:
        """(theta, phi) of this point"""
        return float(np.arccos(np.clip(self.Z, -1.0, 1.0))), float(np.arctan2(self.Y, self.X))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def _kick_array(points: np.ndarray, alpha: float, lam: float) -> np.ndarray:
    """Vectorised map on an (..., 3) array of unit vectors"""
    X, Y, Z = points[..., 0], points[..., 1], points[..., 2]
    ca, sa = np.cos(alpha), np.sin(alpha)
    # precession about x
    Y1 = Y * ca - Z * sa
    Z1 = Y * sa + Z * ca
    # torsion about z by an angle proportional to the new Z
    phi = lam * Z1
    cp, sp = np.cos(phi), np.sin(phi)
    X2 = X * cp - Y1 * sp
    Y2 = X * sp + Y1 * cp
    return np.stack([X2, Y2, Z1], axis=-1)


def classical_kick_map(p: SpherePoint, alpha: float, lam: float) -> SpherePoint:
    """
    One period of the classical kicked top

    Rotates about x by alpha, then about z by lam * Z'. The sign convention is the
    one obtained from the Heisenberg evolution of <J>/j under kicked_top_tr.

    Raises:
        ValueError: if the input deviates from unit norm by more than 1e-9
    """
    if abs(p.norm() - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"SpherePoint must have unit norm, got {p.norm():.12f}")
    return SpherePoint.from_array(_kick_array(p.as_array(), alpha, lam))


def classical_trajectory(p0: SpherePoint, alpha: float, lam: float, n_steps: int) -> np.ndarray:
    """(n_steps + 1) x 3 array of iterates, starting with p0"""
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    if abs(p0.norm() - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"SpherePoint must have unit norm, got {p0.norm():.12f}")
    out = np.empty((n_steps + 1, 3))
    out[0] = p0.as_array()
    for step in range(n_steps):
        out[step + 1] = _kick_array(out[step], alpha, lam)
    return out


def random_sphere_points(n: int, seed: SeedLike = None) -> np.ndarray:
    """n points uniform in area on the unit sphere, shape (n, 3)"""
    if n < 1:
        raise ValueError(f"Need n >= 1, got {n}")
    rng = as_generator(seed)
    z = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    rho = np.sqrt(1.0 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def phase_portrait(
    alpha: float,
    lam: float,
    n_traj: int = 50,
    n_steps: int = 500,
    seed: SeedLike = None,
) -> pd.DataFrame:
    """
    Stroboscopic section of the southern (X < 0) hemisphere

    Args:
        alpha: Precession angle
        lam: Kick strength
        n_traj: Number of random initial points
        n_steps: Kicks per trajectory
        seed: RNG seed for the initial points

    Returns:
        DataFrame with columns traj_id, step, Y, Z for every iterate with X < 0
    """
    if n_traj < 1 or n_steps < 1:
        raise ValueError(f"n_traj and n_steps must be >= 1, got {n_traj}, {n_steps}")
    points = random_sphere_points(n_traj, seed)
    history = np.empty((n_steps, n_traj, 3))
    current = points
    # all trajectories advance together
    for step in range(n_steps):
        current = _kick_array(current, alpha, lam)
        history[step] = current

    steps, trajs = np.nonzero(history[..., 0] < 0)
    frame = pd.DataFrame({
        "traj_id": trajs.astype(int),
        "step": steps.astype(int) + 1,
        "Y": history[steps, trajs, 1],
        "Z": history[steps, trajs, 2],
    })
    frame = frame.sort_values(["traj_id", "step"], kind="stable").reset_index(drop=True)
    logger.debug("Phase portrait alpha=%s lambda=%s: %d points", alpha, lam, len(frame))
    return frame[PORTRAIT_COLUMNS]


def portrait_grid_coverage(portrait: pd.DataFrame, bins: int = 20) -> float:
    """
    Fraction of (Y, Z) grid cells inside the unit disk visited by at least one point

    A cell counts as inside when its centre lies in the disk.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    edges = np.linspace(-1.0, 1.0, bins + 1)
    centres = 0.5 * (edges[:-1] + edges[1:])
    cy, cz = np.meshgrid(centres, centres, indexing="ij")
    inside = cy ** 2 + cz ** 2 <= 1.0
    if portrait.empty:
        return 0.0
    counts, _, _ = np.histogram2d(portrait["Y"], portrait["Z"], bins=[edges, edges])
    visited = (counts > 0) & inside
    return float(visited.sum() / inside.sum())


def portrait_curve_scatter(portrait: pd.DataFrame, transient: int = 50, window: int = 7) -> pd.Series:
    """
    Per-trajectory RMS radial scatter about a smoothed closed curve

    Points after the transient are ordered by their angle about the trajectory
    centroid; the radius is smoothed with a circular rolling median and the RMS
    residual is reported. Regular trajectories lying on invariant curves give
    small values; chaotic ones fill an area and give large values.

    Returns:
        Series indexed by traj_id
    """
    results = {}
    for traj_id, group in portrait[portrait["step"] > transient].groupby("traj_id"):
        if len(group) < window:
            continue
        y = group["Y"].to_numpy()
        z = group["Z"].to_numpy()
        dy, dz = y - y.mean(), z - z.mean()
        order = np.argsort(np.arctan2(dz, dy))
        radius = np.hypot(dy, dz)[order]
        half = window // 2
        padded = pd.Series(np.concatenate([radius[-half:], radius, radius[:half]]))
        smooth = padded.rolling(window, center=True).median().to_numpy()[half:half + len(radius)]
        results[traj_id] = float(np.sqrt(np.mean((radius - smooth) ** 2)))
    return pd.Series(results, name="scatter", dtype=float)


def correspondence_check(
    system: SpinSystem,
    fmap: FloquetMap,
    p0: SpherePoint,
    n: int,
    alpha: Optional[float] = None,
    lam: Optional[float] = None,
) -> float:
    """
    Largest distance between <J>/j of an evolved coherent state and the classical orbit

    Args:
        system: Spin system of the map (large j recommended)
        fmap: Time-reversal invariant kicked top
        p0: Centre of the initial spin coherent state
        n: Number of kicks compared
        alpha, lam: Override the map parameters for the classical side

    Returns:
        max over steps 0..n of ||<J>/j - p_classical||
    """
    if fmap.kind != MapKind.KICKED_TOP_TR and (alpha is None or lam is None):
        raise ValueError("correspondence_check needs a kicked_top_tr map or explicit alpha and lambda")
    alpha = fmap.params["alpha"] if alpha is None else alpha
    lam = fmap.params["lambda"] if lam is None else lam

    theta, phi = p0.angles
    psi = spin_coherent_vector(system, theta, phi)
    classical = classical_trajectory(p0, alpha, lam, n)
    deviation = 0.0
    for step in range(n + 1):
        if step > 0:
            psi = fmap.U @ psi
        quantum = np.array([expectation(J, psi) for J in system.operators]) / system.j
        deviation = max(deviation, float(np.linalg.norm(quantum - classical[step])))
    return deviation
