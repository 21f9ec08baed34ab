"""Shared physical types: mode parameters, Gaussian moment states, and
linear canonical transformations (LCTs) of the two-mode phase space."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Default tolerances; structural checks (LCT constraints, symplectic
# positivity) use 1e-10, exact symmetries 1e-12.
STRUCTURAL_TOL = 1e-10
SYMMETRY_TOL = 1e-12

#: Quadrature labels in canonical ordering.
QUADRATURES = ("x1", "p1", "x2", "p2")


def symplectic_form() -> np.ndarray:
    """The 4x4 symplectic form for the (x1, p1, x2, p2) ordering."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((4, 4))
    out[:2, :2] = j
    out[2:, 2:] = j
    return out


@dataclass(frozen=True)
class PhysicalConstants:
    """Simulation constants; dimensionless units with hbar configurable."""

    hbar: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")


@dataclass(frozen=True)
class ModeParams:
    """One harmonic mode: mass, angular frequency, damping rate."""

    mass: float
    omega: float
    kappa: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative, got {self.kappa}")


@dataclass(frozen=True)
class TwoModeSystem:
    """Two uncoupled damped modes plus shared constants."""

    mode1: ModeParams
    mode2: ModeParams
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    @property
    def modes(self) -> tuple[ModeParams, ModeParams]:
        return (self.mode1, self.mode2)


@dataclass(frozen=True)
class MomentState:
    """Gaussian state summary: mean vector and symmetrized covariance
    matrix, both in (x1, p1, x2, p2) ordering.

    The covariance convention is the symmetrized central second moment
    <{A,B}>/2 - <A><B>, which is real-symmetric by construction.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (4,):
            raise ValueError(f"mean must be a 4-vector, got shape {mean.shape}")
        if cov.shape != (4, 4):
            raise ValueError(f"cov must be 4x4, got shape {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
            raise ValueError("cov is not symmetric within 1e-12")
        if np.any(np.diag(cov) <= 0):
            raise ValueError("cov diagonal entries must be strictly positive")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)


def symplectic_defect(state: MomentState, hbar: float = 1.0) -> float:
    """Minimum eigenvalue of cov + (i*hbar/2)*Omega.

    Non-negative (up to numerical floor) for any physical Gaussian state.
    """
    m = state.cov + 0.5j * hbar * symplectic_form()
    return float(np.min(np.linalg.eigvalsh(m)))


def assert_physical(state: MomentState, hbar: float = 1.0,
                    floor: float = -STRUCTURAL_TOL) -> None:
    """Raise ValueError if the state violates symplectic positivity."""
    defect = symplectic_defect(state, hbar)
    if defect < floor:
        raise ValueError(
            f"state violates symplectic positivity: min eigenvalue {defect:g}")


def vacuum_state(system: TwoModeSystem) -> MomentState:
    """Ground-state moments: zero mean, cov = diag(hbar/2mw, m hbar w/2)
    per mode, no cross correlations."""
    hbar = system.constants.hbar
    diag = []
    for mode in system.modes:
        diag.append(hbar / (2.0 * mode.mass * mode.omega))
        diag.append(mode.mass * hbar * mode.omega / 2.0)
    return MomentState(mean=np.zeros(4), cov=np.diag(diag))


@dataclass(frozen=True)
class Lct:
    """Linear canonical transformation mixing positions with positions and
    momenta with momenta.

    M rows are the position coefficients (alpha, beta); N rows the momentum
    coefficients (gamma, delta). Canonicity requires M @ N.T == I, i.e.
    N = inv(M.T).
    """

    M: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.M, dtype=float)
        n = np.asarray(self.N, dtype=float)
        if m.shape != (2, 2) or n.shape != (2, 2):
            raise ValueError("M and N must be 2x2 matrices")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(n))):
            raise ValueError("M and N must be finite")
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "N", n)

    @property
    def alpha(self) -> np.ndarray:
        return self.M[0]

    @property
    def beta(self) -> np.ndarray:
        return self.M[1]

    @property
    def gamma(self) -> np.ndarray:
        return self.N[0]

    @property
    def delta(self) -> np.ndarray:
        return self.N[1]


def validate_lct(lct: Lct, tol: float = STRUCTURAL_TOL) -> list[str]:
    """Check the four canonicity constraints; returns a list of violation
    messages with residuals (empty when the transform is valid)."""
    violations = []
    residual = lct.M @ lct.N.T - np.eye(2)
    labels = (("sum alpha_i gamma_i - 1", "sum alpha_i delta_i"),
              ("sum beta_i gamma_i", "sum beta_i delta_i - 1"))
    for i in range(2):
        for j in range(2):
            r = residual[i, j]
            if abs(r) > tol:
                violations.append(f"{labels[i][j]} = {r:.3e}")
    det = float(np.linalg.det(lct.M))
    if abs(det) <= 1e-12:
        violations.append(f"det(M) = {det:.3e} is singular")
    return violations


def lct_from_position_block(M: np.ndarray) -> Lct:
    """Build a valid Lct from its position block alone, with N = inv(M.T)."""
    m = np.asarray(M, dtype=float)
    if m.shape != (2, 2):
        raise ValueError("position block must be 2x2")
    det = float(np.linalg.det(m))
    if abs(det) <= 1e-12:
        raise ValueError(f"position block is singular: det = {det:.3e}")
    return Lct(M=m, N=np.linalg.inv(m.T))
