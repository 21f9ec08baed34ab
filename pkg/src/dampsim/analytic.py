"""Closed-form moment evolution under two independent amplitude damping
channels (interaction picture, zero temperature)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MomentState, TwoModeSystem, vacuum_state

_OBS_INDEX = {"x1": 0, "p1": 1, "x2": 2, "p2": 3}


@dataclass(frozen=True)
class DampingMap:
    """Per-mode decay factors e^{-kappa t} at a fixed time."""

    e1: float
    e2: float
    t: float

    @classmethod
    def at_time(cls, system: TwoModeSystem, t: float) -> "DampingMap":
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        return cls(e1=float(np.exp(-system.mode1.kappa * t)),
                   e2=float(np.exp(-system.mode2.kappa * t)),
                   t=float(t))

    @property
    def diagonal(self) -> np.ndarray:
        """The decay factors expanded over (x1, p1, x2, p2)."""
        return np.array([self.e1, self.e1, self.e2, self.e2])


def evolve_state(state0: MomentState, system: TwoModeSystem,
                 t: float) -> MomentState:
    """Evolve a moment state for time t.

    Means scale by e^{-kappa_i t}; the covariance relaxes toward the
    vacuum covariance as E C E + (I - E^2) C_vac with E the diagonal decay
    map. The cross blocks thereby decay by e^{-(kappa_1+kappa_2) t}, which
    is the closed-form covariance decay of the two independent channels.
    The intra-mode xp decay follows from the uniform e^{-2 kappa t} scaling
    of all bilinears (a^2, a^dag^2, a^dag a) in the Heisenberg picture.
    """
    e = DampingMap.at_time(system, t).diagonal
    cov_vac = vacuum_state(system).cov
    mean = e * state0.mean
    cov = np.outer(e, e) * state0.cov + np.diag((1.0 - e ** 2)) @ cov_vac
    return MomentState(mean=mean, cov=cov)


def asymptotic_state(system: TwoModeSystem) -> MomentState:
    """The t -> infinity fixed point: the two-mode vacuum.

    Requires both damping rates strictly positive; an undamped mode keeps
    its initial second moments forever and has no unique asymptote.
    """
    for label, mode in (("mode1", system.mode1), ("mode2", system.mode2)):
        if mode.kappa == 0:
            raise ValueError(f"{label} is undamped (kappa = 0): "
                             "no unique asymptotic state")
    return vacuum_state(system)


def uncertainty_product(state: MomentState, mode_index: int) -> float:
    """Delta x * Delta p for mode 1 or 2 from the covariance diagonal."""
    if mode_index not in (1, 2):
        raise ValueError(f"mode_index must be 1 or 2, got {mode_index}")
    i = 2 * (mode_index - 1)
    return float(np.sqrt(state.cov[i, i] * state.cov[i + 1, i + 1]))


def cross_covariance(state: MomentState, obs1: str, obs2: str) -> float:
    """Covariance between a mode-1 and a mode-2 quadrature.

    The observables commute, so the symmetrized entry equals the plain
    covariance function <A1 A2> - <A1><A2>.
    """
    if obs1 not in ("x1", "p1"):
        raise ValueError(f"obs1 must be x1 or p1, got {obs1!r}")
    if obs2 not in ("x2", "p2"):
        raise ValueError(f"obs2 must be x2 or p2, got {obs2!r}")
    return float(state.cov[_OBS_INDEX[obs1], _OBS_INDEX[obs2]])
