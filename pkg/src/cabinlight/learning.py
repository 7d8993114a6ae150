"""Reward, dual Q-tables and online adaptation of the fuzzy parameters.

A user correction turns into a negative reward stored in one of two
Q-tables ("too bright" / "too dark"), and the resulting error signal
shifts rule consequents and Gaussian means by gradient descent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fuzzy import (
    OUTPUT_LEVELS,
    FiringVector,
    InputState,
    clamp_input,
    firing_strengths,
    membership,
    rule_count,
)

BRIGHT, DARK, NONE = "bright", "dark", "none"

_EQUAL_TOL = 1e-9


@dataclass
class LearnerConfig:
    eta_k: float = 0.1        # consequent learning rate
    eta_m: float = 0.002      # MF mean learning rate
    eta_q: float = 0.1        # Q-table learning rate
    gamma: float = 0.1        # discount factor
    epsilon_bias: float = 5.0  # reward sharpness

    def __post_init__(self):
        if min(self.eta_k, self.eta_m, self.eta_q) <= 0:
            raise ValueError("learning rates must be positive")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        if self.epsilon_bias <= 0:
            raise ValueError("epsilon_bias must be positive")


@dataclass
class QTablePair:
    bright: np.ndarray
    dark: np.ndarray

    @classmethod
    def zeros(cls, states: int = 180, actions: int = 9):
        return cls(np.zeros((states, actions)), np.zeros((states, actions)))

    def table(self, name: str) -> np.ndarray:
        return self.bright if name == BRIGHT else self.dark


@dataclass
class FeedbackEvent:
    suggested: float
    target: float
    state: InputState

    def __post_init__(self):
        for v in (self.suggested, self.target):
            if not 0.0 <= v <= 100.0:
                raise ValueError("intensities must lie in [0, 100]")


@dataclass
class AdaptationDelta:
    reward: float
    td_error: float
    table_used: str
    k_deltas: dict = field(default_factory=dict)     # rule id -> delta
    m_deltas: dict = field(default_factory=dict)     # (var, mf idx) -> delta


def reward(suggested: float, target: float, epsilon_bias: float):
    """Reward for a correction, and which Q-table it addresses.

    Always <= 0; magnitude follows -(2/pi)*arctan(eps*|difference|).
    """
    diff = suggested - target
    if abs(diff) <= _EQUAL_TOL:
        return 0.0, NONE
    r = -(2.0 / math.pi) * math.atan(epsilon_bias * abs(diff))
    return r, (BRIGHT if diff > 0 else DARK)


def state_index(x: InputState, variables) -> int:
    """Q-table row: mixed-radix code of the per-variable argmax MF."""
    x = clamp_input(x, variables)
    idx = 0
    for value, var in zip(x.as_tuple(), variables):
        degrees = [membership(value, mf) for mf in var.mfs]
        best = max(range(len(degrees)), key=lambda i: (degrees[i], -i))
        idx = idx * len(var.mfs) + best
    return idx


def action_index(intensity: float) -> int:
    """Nearest of the nine output levels; exact midpoints round down."""
    if not 0.0 <= intensity <= 100.0:
        raise ValueError("intensity out of range")
    return int(math.ceil(intensity / 12.5 - 0.5))


def td_update(tables: QTablePair, event: FeedbackEvent, cfg: LearnerConfig,
              variables):
    """Temporal-difference update of the selected Q-table.

    Returns (td_error, table_used).  When suggested == target no table is
    written and the error is zero.
    """
    r, which = reward(event.suggested, event.target, cfg.epsilon_bias)
    if which == NONE:
        return 0.0, NONE
    s = state_index(event.state, variables)
    a = action_index(event.suggested)
    q = tables.table(which)
    value = np.max(q[s])
    delta = r + cfg.gamma * value - q[s, a]
    q[s, a] += cfg.eta_q * delta
    return float(delta), which


def adapt_parameters(rules, variables, firing: FiringVector, td_error: float,
                     q_value: float, x: InputState, cfg: LearnerConfig) -> AdaptationDelta:
    """Gradient step on rule consequents and Gaussian means.

    ``q_value`` is the Q-table cell read before the TD write; it stands in
    for the Q surface in the mean-update factor.  Consequents clamp to
    [0, 100]; singleton MFs and all sigmas are never touched.
    """
    delta = AdaptationDelta(reward=0.0, td_error=td_error, table_used=NONE)
    if td_error == 0.0:
        return delta
    x = clamp_input(x, variables)
    values = x.as_tuple()
    total_w = firing.total
    m_accum = {}
    for rule in rules:
        w = firing.weights[rule.id]
        if w <= 0.0:
            continue
        wn = firing.normalized[rule.id]
        dk = cfg.eta_k * td_error * wn
        new_k = min(100.0, max(0.0, rule.k + dk))
        delta.k_deltas[rule.id] = new_k - rule.k
        factor = td_error * (rule.k - q_value) / total_w * w
        for i, a in enumerate(rule.antecedent):
            mf = variables[i].mfs[a]
            if not mf.adaptable:
                continue
            grad = factor * (values[i] - mf.mean) / (mf.sigma ** 2)
            key = (variables[i].name, a)
            m_accum[key] = m_accum.get(key, 0.0) + cfg.eta_m * grad
    for rid, dk in delta.k_deltas.items():
        rules[rid].k += dk
    for (vname, a), dm in m_accum.items():
        var = next(v for v in variables if v.name == vname)
        mf = var.mfs[a]
        # Means saturate at the variable domain, mirroring input clamping;
        # without this an adversarial feedback sequence can run a mean off
        # to infinity (the (x - m)/sigma^2 factor grows with the drift).
        new_mean = min(var.domain[1], max(var.domain[0], mf.mean + dm))
        delta.m_deltas[(vname, a)] = new_mean - mf.mean
        mf.mean = new_mean
    return delta


def adaptation_step(rules, variables, tables: QTablePair,
                    event: FeedbackEvent, cfg: LearnerConfig) -> AdaptationDelta:
    """One full feedback cycle: reward, TD update, parameter adaptation.

    Mutates rules, variables and tables in place and returns the record of
    what changed.  The parameter step is driven by the undamped error
    r + gamma*V so that repeated identical corrections keep moving the
    output; the stored TD error still follows the damped table form.
    """
    r, which = reward(event.suggested, event.target, cfg.epsilon_bias)
    if which == NONE:
        return AdaptationDelta(reward=0.0, td_error=0.0, table_used=NONE)
    firing = firing_strengths(event.state, rules, variables)
    s = state_index(event.state, variables)
    a = action_index(event.suggested)
    q_value = float(tables.table(which)[s, a])
    value = float(np.max(tables.table(which)[s]))
    td_error, _ = td_update(tables, event, cfg, variables)
    drive = r + cfg.gamma * value
    if which == DARK:
        drive = -drive       # raise intensity when the output was too dark
    delta = adapt_parameters(rules, variables, firing, drive, q_value,
                             event.state, cfg)
    delta.reward = r
    delta.td_error = td_error
    delta.table_used = which
    return delta
