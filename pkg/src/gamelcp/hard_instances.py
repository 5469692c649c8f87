"""A family of games whose LCPs have provably bad conditioning.

The instance on n >= 3 states gives every state to the maximizer and two
deterministic actions per state.  States 0 and 1 are anchors with a pair of
identical self-loops costing +1 and -1; every other state either jumps to
anchor 0 (slot 0) or to anchor 1 (slot 1), both at cost ``a``.

With sigma = all slot 0 and tau = all slot 1, the LCP matrix is

    M = I + beta (E2 - E1),      beta = gamma / (1 - gamma),

where E1 / E2 carry a single 1 per tail row in column 0 / 1.  M does not
depend on ``a``; the cost vector does, and picking ``a`` tunes which
conditioning measure the tau-column costs witness:

* a = gamma/(1-gamma): c_tau certifies kappa >= (n-2)/8 (gamma/(1-gamma))^2 - 1/4,
* a = sqrt(2/(n-2)):   c_tau is an exact eigenvector of (M + M^T)/2 with
  eigenvalue 1 - gamma sqrt(n-2) / (sqrt(2) (1-gamma)),
* a = 2 gamma/(1-gamma): c_tau/||c_tau|| pins theta below
  (1-gamma)^2 / ((2 gamma)^2 (n-2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import PLAYER_MAX, Action, Game, State
from .lcp import Partition

__all__ = [
    "A_MODES",
    "HardFamilyForms",
    "HardInstanceSpec",
    "build_hard_instance",
    "closed_forms",
    "predicted_eig_ub",
    "predicted_kappa_lb",
    "predicted_theta_ub",
]

A_MODES = ("kappa", "eigenvalue", "theta", "custom")


@dataclass(frozen=True)
class HardInstanceSpec:
    n: int
    gamma: float
    a_mode: str = "kappa"
    a: float | None = None

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"the hard family needs n >= 3, got n={self.n}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie strictly in (0, 1), got {self.gamma}")
        if self.a_mode not in A_MODES:
            raise ValueError(f"a_mode must be one of {A_MODES}, got {self.a_mode!r}")
        if self.a_mode == "custom" and self.a is None:
            raise ValueError("a_mode 'custom' needs an explicit a")

    def resolve_a(self):
        if self.a_mode == "kappa":
            return self.gamma / (1.0 - self.gamma)
        if self.a_mode == "eigenvalue":
            return math.sqrt(2.0 / (self.n - 2))
        if self.a_mode == "theta":
            return 2.0 * self.gamma / (1.0 - self.gamma)
        return float(self.a)


def build_hard_instance(spec):
    """Returns (game, partition) with sigma = all slot 0, tau = all slot 1."""
    a = spec.resolve_a()
    states = []
    for i in range(spec.n):
        if i == 0:
            act = Action(cost=1.0, dist=((0, 1.0),))
            states.append(State(owner=PLAYER_MAX, actions=(act, act)))
        elif i == 1:
            act = Action(cost=-1.0, dist=((1, 1.0),))
            states.append(State(owner=PLAYER_MAX, actions=(act, act)))
        else:
            to_zero = Action(cost=a, dist=((0, 1.0),))
            to_one = Action(cost=a, dist=((1, 1.0),))
            states.append(State(owner=PLAYER_MAX, actions=(to_zero, to_one)))
    game = Game(gamma=spec.gamma, states=tuple(states))
    partition = Partition(sigma=(0,) * spec.n, tau=(1,) * spec.n)
    return game, partition


@dataclass
class HardFamilyForms:
    """Closed forms under tau: costs, values, M c_tau, and the products
    c_tau * (M c_tau) that witness the conditioning bounds."""

    a: float
    beta: float
    c_tau: np.ndarray
    v_tau: np.ndarray
    image: np.ndarray
    products: np.ndarray


def closed_forms(spec):
    n = spec.n
    a = spec.resolve_a()
    beta = spec.gamma / (1.0 - spec.gamma)

    c_tau = np.full(n, a)
    c_tau[0] = 1.0
    c_tau[1] = -1.0

    v_tau = np.full(n, a - beta)
    v_tau[0] = 1.0 + beta
    v_tau[1] = -(1.0 + beta)

    image = np.full(n, a - 2.0 * beta)
    image[0] = 1.0
    image[1] = -1.0

    products = c_tau * image
    return HardFamilyForms(
        a=a, beta=beta, c_tau=c_tau, v_tau=v_tau, image=image, products=products
    )


def _beta(gamma):
    return gamma / (1.0 - gamma)


def predicted_kappa_lb(n, gamma):
    """kappa certified by c_tau in kappa mode; raw value, negative means
    the certificate is vacuous at that size."""
    if n < 3:
        raise ValueError(f"the hard family needs n >= 3, got n={n}")
    return (n - 2) / 8.0 * _beta(gamma) ** 2 - 0.25


def predicted_eig_ub(n, gamma):
    """Exact smallest-witnessed eigenvalue of (M + M^T)/2: eigenvector c_tau
    in eigenvalue mode."""
    if n < 3:
        raise ValueError(f"the hard family needs n >= 3, got n={n}")
    return 1.0 - gamma * math.sqrt(n - 2) / (math.sqrt(2.0) * (1.0 - gamma))


def predicted_theta_ub(n, gamma):
    """Upper fence for theta from the theta-mode witness c_tau/||c_tau||."""
    if n < 3:
        raise ValueError(f"the hard family needs n >= 3, got n={n}")
    return (1.0 - gamma) ** 2 / ((2.0 * gamma) ** 2 * (n - 2))
