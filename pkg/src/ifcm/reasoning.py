"""Cognitive-map reasoning engines.

Two update rules share this module: the classic real-valued map step and the
intuitionistic step that propagates membership and non-membership separately.
Membership evidence accumulates as a probabilistic OR over weighted incoming
activations; non-membership evidence multiplies, so unsupported concepts decay
toward confident zero. A squashing transfer function keeps both degrees in
range; its inverse recovers the pre-squash hesitancy of a converged state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ifs import VALIDITY_TOL, IFValue, InvalidValueError

_TRANSFER_KINDS = ("sigmoid", "tanh", "identity")


class ModeMismatchError(ValueError):
    """State and weight dimensions (or value modes) do not agree."""


class OutOfImageError(ArithmeticError):
    """A degree lies outside the transfer function's reachable range."""


@dataclass(frozen=True)
class TransferFunction:
    """Monotone squashing map applied after evidence accumulation.

    kind: "sigmoid" (with steepness `lam`), "tanh", or "identity".
    """
    kind: str = "tanh"
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in _TRANSFER_KINDS:
            raise ValueError(f"unknown transfer kind {self.kind!r}")
        if self.kind == "sigmoid" and not self.lam > 0:
            raise ValueError("sigmoid steepness must be positive")

    def __call__(self, x):
        if self.kind == "sigmoid":
            return 1.0 / (1.0 + np.exp(-self.lam * np.asarray(x, dtype=float)))
        if self.kind == "tanh":
            return np.tanh(x)
        return np.asarray(x, dtype=float) if np.ndim(x) else float(x)

    def inverse(self, y):
        if self.kind == "sigmoid":
            y = np.asarray(y, dtype=float)
            return np.log(y / (1.0 - y)) / self.lam
        if self.kind == "tanh":
            return np.arctanh(y)
        return np.asarray(y, dtype=float) if np.ndim(y) else float(y)

    def image(self) -> tuple[float, float]:
        """Reachable output interval for inputs in [0, 1]."""
        return float(self(0.0)), float(self(1.0))


@dataclass
class IFState:
    """Concept activations as parallel membership/non-membership vectors."""
    mu: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=float)
        if self.mu.shape != self.gamma.shape or self.mu.ndim != 1:
            raise ModeMismatchError("mu and gamma must be equal-length vectors")
        bad = ((self.mu < -VALIDITY_TOL) | (self.mu > 1 + VALIDITY_TOL)
               | (self.gamma < -VALIDITY_TOL) | (self.gamma > 1 + VALIDITY_TOL)
               | (self.mu + self.gamma > 1 + VALIDITY_TOL))
        if bad.any():
            i = int(np.argmax(bad))
            raise InvalidValueError(
                f"invalid pair <{self.mu[i]}, {self.gamma[i]}> at concept {i}")

    def __len__(self):
        return self.mu.size

    def as_pairs(self) -> list[IFValue]:
        return [IFValue(float(m), float(g)) for m, g in zip(self.mu, self.gamma)]


@dataclass
class WeightMatrix:
    """Directed influence weights; entry [j, i] is the edge from j into i."""
    w_mu: np.ndarray
    w_gamma: np.ndarray

    def __post_init__(self):
        self.w_mu = np.asarray(self.w_mu, dtype=float)
        self.w_gamma = np.asarray(self.w_gamma, dtype=float)
        if (self.w_mu.ndim != 2 or self.w_mu.shape[0] != self.w_mu.shape[1]
                or self.w_mu.shape != self.w_gamma.shape):
            raise ModeMismatchError("weights must be two square matrices of "
                                    "matching size")
        if ((self.w_mu < -VALIDITY_TOL).any()
                or (self.w_gamma < -VALIDITY_TOL).any()
                or (self.w_mu + self.w_gamma > 1 + VALIDITY_TOL).any()):
            raise InvalidValueError("weight entries must be valid pairs")

    @property
    def n(self) -> int:
        return self.w_mu.shape[0]


@dataclass
class ReasoningConfig:
    epsilon: float = 1e-5
    max_iters: int = 100
    f_mu: TransferFunction = field(default_factory=TransferFunction)
    f_gamma: TransferFunction = field(default_factory=TransferFunction)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class ReasoningResult:
    """Full state trajectory plus convergence bookkeeping.

    `states[0]` is the initial state; `iterations == len(states) - 1`.
    `diagnostics` counts pair renormalizations performed after the transfer.
    """
    states: list[IFState]
    converged: bool
    iterations: int
    diagnostics: dict

    @property
    def final(self) -> IFState:
        return self.states[-1]


def fcm_step(activations, weights, transfer: TransferFunction) -> np.ndarray:
    """One real-valued map update: A_i' = f(A_i + sum_{j != i} A_j w[j, i])."""
    a = np.asarray(activations, dtype=float)
    w = np.asarray(weights, dtype=float)
    if a.ndim != 1 or w.shape != (a.size, a.size):
        raise ModeMismatchError(f"weights {w.shape} do not fit "
                                f"{a.size} activations")
    incoming = w.T @ a - np.diag(w) * a  # self loops excluded
    return np.asarray(transfer(a + incoming), dtype=float)


def sigma_accumulate(memberships, weights) -> float:
    """Probabilistic-OR fold of weighted membership contributions.

    Equals 1 - prod_j (1 - v_j * w_j); an empty contribution list yields 0.
    Order of contributions is irrelevant.
    """
    v = np.asarray(memberships, dtype=float)
    w = np.asarray(weights, dtype=float)
    if v.shape != w.shape:
        raise ModeMismatchError("memberships and weights must align")
    if v.size == 0:
        return 0.0
    return float(1.0 - np.prod(1.0 - v * w))


def ifcm_step(state: IFState, weights: WeightMatrix, f_mu: TransferFunction,
              f_gamma: TransferFunction, diagnostics: dict | None = None) -> IFState:
    """One intuitionistic update of every concept.

    Membership rises toward 1 by the accumulated positive evidence:
        mu_i' = F_mu(mu_i + (1 - mu_i) * sigma_i)
    with sigma_i the probabilistic OR over incoming mu_j * w_mu[j, i].
    Non-membership multiplies through every other concept:
        gamma_i' = F_gamma(gamma_i * prod_{j != i} (gamma_j + w_gamma[j, i]
                                                    - gamma_j * w_gamma[j, i]))
    Pairs that overshoot mu' + gamma' > 1 keep mu' and shrink gamma'; each
    such repair increments diagnostics["renormalized_pairs"].
    """
    n = len(state)
    if weights.n != n:
        raise ModeMismatchError(f"{weights.n}x{weights.n} weights do not fit "
                                f"{n} concepts")
    contrib = 1.0 - state.mu[:, None] * weights.w_mu
    np.fill_diagonal(contrib, 1.0)
    sigma = 1.0 - np.prod(contrib, axis=0)
    mu_next = np.asarray(f_mu(state.mu + (1.0 - state.mu) * sigma), dtype=float)

    factors = (state.gamma[:, None] + weights.w_gamma
               - state.gamma[:, None] * weights.w_gamma)
    np.fill_diagonal(factors, 1.0)
    gamma_next = np.asarray(f_gamma(state.gamma * np.prod(factors, axis=0)),
                            dtype=float)

    over = mu_next + gamma_next > 1.0
    if over.any():
        gamma_next = np.where(over, 1.0 - mu_next, gamma_next)
        if diagnostics is not None:
            diagnostics["renormalized_pairs"] = (
                diagnostics.get("renormalized_pairs", 0) + int(over.sum()))
    return IFState(mu_next, gamma_next)


def run_reasoning(initial: IFState, weights: WeightMatrix,
                  config: ReasoningConfig | None = None) -> ReasoningResult:
    """Iterate the intuitionistic step to a fixed point or the step budget.

    Convergence requires BOTH degree vectors to move less than epsilon in
    max norm over one iteration.
    """
    cfg = config or ReasoningConfig()
    diagnostics: dict = {}
    states = [initial]
    converged = False
    for _ in range(cfg.max_iters):
        nxt = ifcm_step(states[-1], weights, cfg.f_mu, cfg.f_gamma, diagnostics)
        prev = states[-1]
        states.append(nxt)
        if (np.max(np.abs(nxt.mu - prev.mu)) < cfg.epsilon
                and np.max(np.abs(nxt.gamma - prev.gamma)) < cfg.epsilon):
            converged = True
            break
    return ReasoningResult(states=states, converged=converged,
                           iterations=len(states) - 1, diagnostics=diagnostics)


def real_hesitancy(mu: float, gamma: float, f_mu: TransferFunction,
                   f_gamma: TransferFunction, tol: float = 1e-9,
                   diagnostics: dict | None = None) -> float:
    """Hesitancy of a converged pair measured before the transfer squash.

    Inverts each transfer on its own degree: h = 1 - F_mu^-1(mu)
    - F_gamma^-1(gamma). Degrees more than `tol` outside the reachable range
    raise OutOfImageError; results are clamped to [0, 1] (counted in
    diagnostics["hesitancy_clamps"] when supplied).
    """
    xs = []
    for value, fn in ((float(mu), f_mu), (float(gamma), f_gamma)):
        lo, hi = fn.image()
        if value < lo - tol or value > hi + tol:
            raise OutOfImageError(f"{value} outside transfer image "
                                  f"[{lo}, {hi}]")
        xs.append(float(fn.inverse(min(max(value, lo), hi))))
    h = 1.0 - xs[0] - xs[1]
    if h < 0.0 or h > 1.0:
        if diagnostics is not None:
            diagnostics["hesitancy_clamps"] = (
                diagnostics.get("hesitancy_clamps", 0) + 1)
        h = min(max(h, 0.0), 1.0)
    return h
