"""Relative-entropy and Lyapunov diagnostics along trajectories.

For a positive stationary state vbar, the weighted entropy
H(v) = sum_i vbar_i^2 Hker(v_i/vbar_i) obeys

    dH/dt = -D(v) + (1/K) sum_i vbar_i Hker'(v_i/vbar_i) Gamma_i v_i,

where Gamma_i = Psi_i(vbar) - Psi_i(v) and D couples genotype pairs through
the mutation rates. The identity holds for symmetric mutation; D is a true
dissipation (nonnegative) for convex kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricMutation,
    KernelMismatch,
    NonPositiveReference,
    NotStationaryReference,
    TooFewSamples,
    WrongInteractionKind,
    ZeroReference,
)
from .model import Model, UniformLinear, interaction_values, mutation_symmetric
from .dynamics import Trajectory
from .equilibrium import residual

_STATIONARY_TOL = 1e-8


@dataclass(frozen=True)
class EntropyKernel:
    """Polynomial kernel s -> sum_k coeffs[k] s^k, evaluated by Horner."""

    kind: str
    coeffs: np.ndarray

    @classmethod
    def linear(cls) -> "EntropyKernel":
        return cls(kind="linear", coeffs=np.array([0.0, 1.0]))

    @classmethod
    def quadratic(cls) -> "EntropyKernel":
        return cls(kind="quadratic", coeffs=np.array([0.0, 0.0, 1.0]))

    @classmethod
    def polynomial(cls, coeffs) -> "EntropyKernel":
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise KernelMismatch("polynomial kernels need a nonempty coefficient vector")
        return cls(kind="polynomial", coeffs=coeffs.copy())

    def value(self, s):
        out = np.zeros_like(np.asarray(s, dtype=float))
        for c in self.coeffs[::-1]:
            out = out * s + c
        return out

    def deriv(self, s):
        out = np.zeros_like(np.asarray(s, dtype=float))
        n = self.coeffs.size
        for k in range(n - 1, 0, -1):
            out = out * s + k * self.coeffs[k]
        return out


@dataclass(frozen=True)
class EntropyReport:
    h_value: float
    d_value: float
    gamma_term: float
    analytic_dt: float


@dataclass(frozen=True)
class Decomposition:
    lambda_coef: float
    h: np.ndarray
    e_h: float
    beta: float
    f_value: float


def _check_reference(v_bar: np.ndarray) -> None:
    if np.any(v_bar <= 0.0):
        raise NonPositiveReference("reference state must be strictly positive")


def entropy_value(v, v_bar, kernel: EntropyKernel) -> float:
    v = np.asarray(v, dtype=float)
    v_bar = np.asarray(v_bar, dtype=float)
    _check_reference(v_bar)
    return float(np.sum(v_bar**2 * kernel.value(v / v_bar)))


def dissipation(model: Model, v, v_bar, kernel: EntropyKernel) -> EntropyReport:
    """Entropy, dissipation, pressure term, and the analytic time derivative."""
    v = np.asarray(v, dtype=float)
    v_bar = np.asarray(v_bar, dtype=float)
    _check_reference(v_bar)
    if not mutation_symmetric(model):
        raise AsymmetricMutation("the entropy identity needs symmetric mutation rates")
    if residual(model, v_bar) > _STATIONARY_TOL:
        raise NotStationaryReference("reference state is not stationary")

    s = v / v_bar
    hs = kernel.value(s)
    hp = kernel.deriv(s)
    weights = model.mu * np.outer(v_bar, v_bar)
    d_value = float(
        np.sum(weights * (hs[None, :] - hs[:, None]))
        + np.sum(weights * (hp[:, None] * (s[:, None] - s[None, :])))
    )
    gamma = interaction_values(model, v_bar) - interaction_values(model, v)
    gamma_term = float(np.sum(v_bar * hp * gamma * v) / model.big_k)
    h_value = float(np.sum(v_bar**2 * hs))
    return EntropyReport(
        h_value=h_value,
        d_value=d_value,
        gamma_term=gamma_term,
        analytic_dt=-d_value + gamma_term,
    )


def _nonuniform_slope(t0, t1, t2, f0, f1, f2):
    """Three-point first derivative at the middle node of an uneven grid."""
    h1 = t1 - t0
    h2 = t2 - t1
    return (
        -f0 * h2 / (h1 * (h1 + h2))
        + f1 * (h2 - h1) / (h1 * h2)
        + f2 * h1 / (h2 * (h1 + h2))
    )


def identity_residual(model: Model, trajectory: Trajectory, v_bar, kernel: EntropyKernel) -> float:
    """Worst normalized gap between measured and analytic entropy slopes."""
    times = trajectory.times
    states = trajectory.states
    if times.size < 100:
        raise TooFewSamples(f"need at least 100 recorded samples, got {times.size}")
    reports = [dissipation(model, states[k], v_bar, kernel) for k in range(times.size)]
    h_vals = np.array([rep.h_value for rep in reports])
    worst = 0.0
    for k in range(1, times.size - 1):
        fd = _nonuniform_slope(
            times[k - 1], times[k], times[k + 1], h_vals[k - 1], h_vals[k], h_vals[k + 1]
        )
        gap = abs(fd - reports[k].analytic_dt) / max(1.0, abs(h_vals[k]))
        worst = max(worst, gap)
    return worst


def decompose(v, v_bar) -> Decomposition:
    """Split v into its component along vbar and the orthogonal remainder."""
    v = np.asarray(v, dtype=float)
    v_bar = np.asarray(v_bar, dtype=float)
    denom = float(v_bar @ v_bar)
    if denom == 0.0:
        raise ZeroReference("reference state is zero")
    lam = float(v @ v_bar) / denom
    h = v - lam * v_bar
    e_v = float(v @ v)
    beta = float(v @ v_bar)
    f_value = math.log(e_v / beta**2) if beta != 0.0 and e_v > 0.0 else math.inf
    return Decomposition(lambda_coef=lam, h=h, e_h=float(h @ h), beta=beta, f_value=f_value)


def lyapunov_descent(model: Model, trajectory: Trajectory, v_bar):
    """F = log(E(v)/beta^2) at each sample with its analytic derivative.

    Valid for uniform interactions with symmetric mutation; the derivative
    is -(1/E(v)) sum_ij mu_ij vbar_i vbar_j (v_j/vbar_j - v_i/vbar_i)^2.
    """
    if not isinstance(model.interaction, UniformLinear):
        raise WrongInteractionKind("the descent identity needs a uniform interaction")
    if not mutation_symmetric(model):
        raise AsymmetricMutation("the descent identity needs symmetric mutation rates")
    v_bar = np.asarray(v_bar, dtype=float)
    _check_reference(v_bar)
    weights = model.mu * np.outer(v_bar, v_bar)
    f_values = np.empty(trajectory.times.size)
    df_values = np.empty(trajectory.times.size)
    for k, v in enumerate(trajectory.states):
        dec = decompose(v, v_bar)
        f_values[k] = dec.f_value
        s = v / v_bar
        e_v = float(v @ v)
        df_values[k] = (
            -float(np.sum(weights * (s[None, :] - s[:, None]) ** 2)) / e_v if e_v > 0 else 0.0
        )
    return f_values, df_values


def log_energy_slopes(trajectory: Trajectory, v_bar):
    """Centered slopes of log(E(h)/beta^2) at interior sample times.

    Uses plain two-point central differences so each slope is a mean-value
    of the true derivative over the bracketing window.
    """
    v_bar = np.asarray(v_bar, dtype=float)
    times = trajectory.times
    vals = np.empty(times.size)
    for k, v in enumerate(trajectory.states):
        dec = decompose(v, v_bar)
        vals[k] = (
            math.log(dec.e_h / dec.beta**2) if dec.e_h > 0.0 and dec.beta != 0.0 else -math.inf
        )
    interior = slice(1, times.size - 1)
    slopes = (vals[2:] - vals[:-2]) / (times[2:] - times[:-2])
    return times[interior], slopes
