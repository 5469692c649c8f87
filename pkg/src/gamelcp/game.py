"""Core model for discounted two-player turn-based stochastic games.

A game is a finite set of states, each owned by player 1 (the minimizer) or
player 2 (the maximizer), a finite action set per state, and a discount
factor gamma in (0, 1).  An action has a cost and a sparse probability
distribution over successor states.  A strategy profile picks one action
slot per state; its value vector is the unique solution of

    (I - gamma * P_profile) v = c_profile.

An action's reduced cost against a value vector v is
``cost + gamma * P_action . v - v[source]``.  A profile is optimal exactly
when every player-1 action has reduced cost >= 0 and every player-2 action
has reduced cost <= 0 (up to tolerance).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "Action",
    "Game",
    "GameValidationError",
    "MatrixRep",
    "PLAYER_MAX",
    "PLAYER_MIN",
    "State",
    "as_profile",
    "game_from_dict",
    "game_to_dict",
    "is_optimal",
    "load_game",
    "markov_step_distribution",
    "matrix_representation",
    "reduced_costs",
    "restrict",
    "save_game",
    "validate_game",
    "value_vector",
]

PLAYER_MIN = 1
PLAYER_MAX = 2

DIST_MASS_TOL = 1e-12


class GameValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Action:
    cost: float
    dist: tuple  # ((state index, probability), ...)


@dataclass(frozen=True)
class State:
    owner: int
    actions: tuple


@dataclass(frozen=True)
class Game:
    gamma: float
    states: tuple

    @property
    def n_states(self):
        return len(self.states)

    @property
    def n_actions(self):
        return sum(len(s.actions) for s in self.states)


def validate_game(obj):
    """Validate ``obj`` (a Game or a parsed JSON dict) and return a Game.

    Checks: gamma strictly inside (0, 1); at least one state; at least one
    action per state; owner in {1, 2}; distribution targets in range with
    nonnegative mass summing to 1 within 1e-12.  Distributions are never
    renormalized; off-by-more-than-tolerance mass is an error.
    """
    if isinstance(obj, Game):
        raw = game_to_dict(obj)
    elif isinstance(obj, dict):
        raw = obj
    else:
        raise GameValidationError(f"expected dict or Game, got {type(obj).__name__}")

    try:
        gamma = float(raw["gamma"])
        raw_states = raw["states"]
    except (KeyError, TypeError, ValueError) as exc:
        raise GameValidationError(f"malformed game object: {exc}") from exc
    if not (0.0 < gamma < 1.0):
        raise GameValidationError(f"discount out of range: gamma must lie strictly in (0, 1), got {gamma}")
    n = len(raw_states)
    if n == 0:
        raise GameValidationError("game has no states")

    states = []
    for i, rs in enumerate(raw_states):
        try:
            owner = int(rs["owner"])
            raw_actions = rs["actions"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GameValidationError(f"state {i}: malformed entry: {exc}") from exc
        if owner not in (PLAYER_MIN, PLAYER_MAX):
            raise GameValidationError(f"state {i}: owner must be 1 or 2, got {owner}")
        if len(raw_actions) == 0:
            raise GameValidationError(f"state {i}: no actions")
        actions = []
        for a, ra in enumerate(raw_actions):
            try:
                cost = float(ra["cost"])
                dist = [(int(j), float(p)) for j, p in ra["dist"]]
            except (KeyError, TypeError, ValueError) as exc:
                raise GameValidationError(
                    f"state {i} action {a}: malformed entry: {exc}"
                ) from exc
            if not np.isfinite(cost):
                raise GameValidationError(f"state {i} action {a}: non-finite cost")
            mass = 0.0
            for j, p in dist:
                if not 0 <= j < n:
                    raise GameValidationError(
                        f"state {i} action {a}: target {j} out of range [0, {n})"
                    )
                if not np.isfinite(p) or p < 0.0:
                    raise GameValidationError(
                        f"state {i} action {a}: bad probability {p}"
                    )
                mass += p
            if abs(mass - 1.0) > DIST_MASS_TOL:
                raise GameValidationError(
                    f"state {i} action {a}: distribution sum {mass!r} not within "
                    f"{DIST_MASS_TOL} of 1"
                )
            actions.append(Action(cost=cost, dist=tuple(dist)))
        states.append(State(owner=owner, actions=tuple(actions)))
    return Game(gamma=gamma, states=tuple(states))


def game_to_dict(game):
    return {
        "gamma": game.gamma,
        "states": [
            {
                "owner": s.owner,
                "actions": [
                    {"cost": a.cost, "dist": [[j, p] for j, p in a.dist]}
                    for a in s.actions
                ],
            }
            for s in game.states
        ],
    }


def game_from_dict(raw):
    return validate_game(raw)


def load_game(path):
    with open(path, "r", encoding="utf-8") as fh:
        return validate_game(json.load(fh))


def save_game(game, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(game_to_dict(game), fh, indent=2)
        fh.write("\n")


@dataclass
class MatrixRep:
    """Dense matrix view of a game.

    p is the (m, n) row-stochastic action transition matrix, costs the
    (m,) cost vector, source the (m, n) one-hot matrix mapping each action
    row to its source state, and ownership_signs the (n,) vector with -1
    on player-1 states and +1 on player-2 states.  offsets[i]:offsets[i+1]
    slices the action rows of state i; state_of_action maps rows back.
    """

    gamma: float
    p: np.ndarray
    costs: np.ndarray
    source: np.ndarray
    ownership_signs: np.ndarray
    offsets: np.ndarray
    state_of_action: np.ndarray
    owners: np.ndarray

    @property
    def n(self):
        return self.p.shape[1]

    @property
    def m(self):
        return self.p.shape[0]

    def ownership_matrix(self):
        return np.diag(self.ownership_signs.astype(np.float64))


def matrix_representation(game):
    n = game.n_states
    m = game.n_actions
    p = np.zeros((m, n))
    costs = np.empty(m)
    source = np.zeros((m, n))
    offsets = np.zeros(n + 1, dtype=np.int64)
    state_of_action = np.empty(m, dtype=np.int64)
    owners = np.empty(n, dtype=np.int64)
    row = 0
    for i, s in enumerate(game.states):
        owners[i] = s.owner
        offsets[i] = row
        for a in s.actions:
            costs[row] = a.cost
            source[row, i] = 1.0
            for j, prob in a.dist:
                p[row, j] += prob
            state_of_action[row] = i
            row += 1
    offsets[n] = row
    signs = np.where(owners == PLAYER_MIN, -1.0, 1.0)
    return MatrixRep(
        gamma=game.gamma,
        p=p,
        costs=costs,
        source=source,
        ownership_signs=signs,
        offsets=offsets,
        state_of_action=state_of_action,
        owners=owners,
    )


def as_profile(game, choice):
    """Normalize a per-state action slot sequence, checking bounds."""
    arr = np.asarray(choice, dtype=np.int64)
    if arr.shape != (game.n_states,):
        raise GameValidationError(
            f"profile length {arr.shape} does not match {game.n_states} states"
        )
    for i, s in enumerate(game.states):
        if not 0 <= arr[i] < len(s.actions):
            raise GameValidationError(
                f"profile slot {arr[i]} out of range at state {i} "
                f"({len(s.actions)} actions)"
            )
    return arr


def _profile_rows(rep, choice):
    return rep.offsets[:-1] + np.asarray(choice, dtype=np.int64)


def _restrict_rep(rep, choice):
    rows = _profile_rows(rep, choice)
    return rep.p[rows], rep.costs[rows]


def restrict(game, profile):
    """Rows of (P, c) chosen by the profile: the (n, n) P_profile and (n,) c."""
    rep = game if isinstance(game, MatrixRep) else matrix_representation(game)
    choice = profile if isinstance(game, MatrixRep) else as_profile(game, profile)
    return _restrict_rep(rep, choice)


def value_vector(game, profile):
    """Solve (I - gamma P_profile) v = c_profile for the profile's values."""
    rep = game if isinstance(game, MatrixRep) else matrix_representation(game)
    choice = profile if isinstance(game, MatrixRep) else as_profile(game, profile)
    p_sel, c_sel = _restrict_rep(rep, choice)
    a = np.eye(rep.n) - rep.gamma * p_sel
    return _kernels.solve(a, c_sel)


def reduced_costs(game, profile, values=None):
    """Reduced cost of every action against the profile's value vector."""
    rep = game if isinstance(game, MatrixRep) else matrix_representation(game)
    choice = profile if isinstance(game, MatrixRep) else as_profile(game, profile)
    if values is None:
        values = value_vector(rep, choice)
    return rep.costs + rep.gamma * (rep.p @ values) - values[rep.state_of_action]


def is_optimal(game, profile, tol=1e-9):
    """Check the profile's optimality; returns (verdict, violating rows).

    Player-1 actions must have reduced cost >= -tol, player-2 actions
    <= tol.  Violating rows are global action indices.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    rep = game if isinstance(game, MatrixRep) else matrix_representation(game)
    choice = profile if isinstance(game, MatrixRep) else as_profile(game, profile)
    rc = reduced_costs(rep, choice)
    owner_of_action = rep.owners[rep.state_of_action]
    bad_min = (owner_of_action == PLAYER_MIN) & (rc < -tol)
    bad_max = (owner_of_action == PLAYER_MAX) & (rc > tol)
    violations = np.flatnonzero(bad_min | bad_max)
    return violations.size == 0, violations


def markov_step_distribution(p_sigma, start, t):
    """Row distribution after t steps of the chain p_sigma from ``start``."""
    p_sigma = np.asarray(p_sigma, dtype=np.float64)
    n = p_sigma.shape[0]
    if not 0 <= start < n:
        raise ValueError(f"start state {start} out of range")
    if t < 0 or int(t) != t:
        raise ValueError(f"step count must be a nonnegative integer, got {t}")
    dist = np.zeros(n)
    dist[start] = 1.0
    for _ in range(int(t)):
        dist = dist @ p_sigma
    return dist
