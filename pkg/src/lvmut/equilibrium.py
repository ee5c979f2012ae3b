"""Positive stationary states.

Two routes: exact scaling of the dominant eigenvector when every genotype
feels the same pressure (uniform linear family), and a continuation from
that anchor for heterogeneous pressures, solving each stage by damped
Newton and accepting it only when the fixed-point map of the stage moves
the iterate by at most inner_tol. Stationarity means
(R+M) v = diag(Psi(v)) v / K.

The continuation map T(v) = (R+M)^{-1}[Psi_s(v) v / K] itself is radially
repelling at its fixed points (along the equilibrium ray it reduces to
m -> m^2), so it serves as the convergence certificate, never as the
update rule.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    Hypothesis3Violated,
    InnerNoConvergence,
    LeftAprioriBox,
    NonPositivePerron,
    WrongInteractionKind,
)
from .linalg import _lu_factor, _lu_solve, perron_eigenpair, solve_linear, symmetric_spectrum
from .model import (
    CrowdingLinear,
    Model,
    Perturbed,
    UniformLinear,
    growth_mutation_matrix,
    interaction_gradient,
    interaction_values,
    mutation_symmetric,
    rhs,
    validate,
)


class Method(Enum):
    PerronScaling = "perron"
    Homotopy = "homotopy"


@dataclass(frozen=True)
class HomotopyConfig:
    s_steps: int = 21
    inner_tol: float = 1e-12
    max_inner: int = 10_000
    damping: float = 0.5
    box_lo: float | None = None
    box_hi: float | None = None


@dataclass(frozen=True)
class EquilibriumResult:
    v_bar: np.ndarray
    alpha_bar: float | None
    lambda_p: float
    residual: float
    method: Method
    homotopy_path: list = field(default_factory=list)  # (s, v, residual) checkpoints


def residual(model: Model, v) -> float:
    """Max-norm of the vector field at v."""
    return float(np.max(np.abs(rhs(model, np.asarray(v, dtype=float)))))


def _uniform_pressure(model: Model, v: np.ndarray) -> float:
    """The shared pressure value Psi_1(v) for uniform interactions."""
    return float(interaction_values(model, v)[0])


def _scale_to_pressure(model: Model, direction: np.ndarray, target: float) -> np.ndarray:
    """Find m > 0 with Psi_1(m * direction) = target for increasing Psi_1."""
    inter = model.interaction
    if isinstance(inter, UniformLinear):
        return (target / float(inter.a @ direction)) * direction

    def shared(m: float) -> float:
        return _uniform_pressure(model, m * direction)

    hi = 1.0
    for _ in range(200):
        if shared(hi) >= target:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if shared(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) * direction


def equilibrium_uniform(model: Model) -> EquilibriumResult:
    """Positive equilibrium by dominant-eigenvector scaling (uniform pressures)."""
    inter = model.interaction
    if not isinstance(inter, UniformLinear):
        raise WrongInteractionKind("eigenvector scaling applies to uniform interactions")
    per = perron_eigenpair(growth_mutation_matrix(model))
    if per.lambda_p <= 0.0:
        raise NonPositivePerron(f"dominant growth exponent {per.lambda_p:g} is not positive")
    alpha_bar = model.big_k * per.lambda_p
    v_bar = _scale_to_pressure(model, per.v_p, alpha_bar)
    return EquilibriumResult(
        v_bar=v_bar,
        alpha_bar=alpha_bar,
        lambda_p=per.lambda_p,
        residual=residual(model, v_bar),
        method=Method.PerronScaling,
        homotopy_path=[],
    )


def _pressure_bounds(model: Model) -> tuple[float, float, float]:
    """(cmin, kmax, off): global linear sandwich for every Psi_i of the family."""
    inter = model.interaction
    if isinstance(inter, UniformLinear):
        return float(np.min(inter.a)), float(np.max(inter.a)), 0.0
    if isinstance(inter, CrowdingLinear):
        coeff = inter.alpha * model.r[None, :]
        return float(np.min(coeff)), float(np.max(coeff)), 0.0
    if isinstance(inter, Perturbed):
        off = float(inter.eps * np.max(np.abs(inter.amp), initial=0.0))
        return float(np.min(inter.base.a)), float(np.max(inter.base.a)), off
    raise WrongInteractionKind(f"unknown interaction {type(inter).__name__}")


def _apriori_box(model: Model, config: HomotopyConfig) -> tuple[float, float]:
    """Bounds on the total population of any continuation fixed point.

    Sandwiching the shared quadratic form of R+M between its extreme
    eigenvalues and the pressures between their global linear bounds gives
    computable total-population bounds; a wide fallback box is used (and
    flagged) when the perturbation offset swallows the lower bound.
    """
    if config.box_lo is not None and config.box_hi is not None:
        return float(config.box_lo), float(config.box_hi)
    a = growth_mutation_matrix(model)
    spec = symmetric_spectrum(0.5 * (a + a.T))
    lmax = float(spec.eigenvalues[0])
    lmin = float(spec.eigenvalues[-1])
    cmin, kmax, off = _pressure_bounds(model)
    big_k = model.big_k
    if lmin <= 0.0 or cmin <= 0.0 or big_k * lmin <= off:
        warnings.warn("no computable population bounds; using the wide fallback box")
        return 1e-6 * big_k, 1e3 * big_k
    lo = 0.5 * (big_k * lmin - off) / kmax
    hi = 2.0 * (big_k * lmax + off) / cmin
    return lo, hi


def _in_box(v: np.ndarray, lo: float, hi: float) -> bool:
    total = float(v.sum())
    return bool(np.min(v) >= 0.0 and lo <= total <= hi)


def _stage_solve(
    model: Model,
    a: np.ndarray,
    lu,
    s: float,
    v: np.ndarray,
    config: HomotopyConfig,
    box_lo: float,
    box_hi: float,
) -> np.ndarray:
    """Drive the stage-s stationarity residual to zero by damped Newton.

    Acceptance is certified with the stage fixed-point map: the stage is
    done only when ||T(v) - v||_inf <= inner_tol.
    """
    big_k = model.big_k

    def stage_pressure(x: np.ndarray) -> np.ndarray:
        psi = interaction_values(model, x)
        return s * psi + (1.0 - s) * psi[0]

    for _ in range(config.max_inner):
        psi_s = stage_pressure(v)
        tv = _lu_solve(lu, psi_s * v / big_k)
        if float(np.max(np.abs(tv - v))) <= config.inner_tol:
            return v
        g = a @ v - psi_s * v / big_k
        g_norm = float(np.max(np.abs(g)))
        grad = interaction_gradient(model, v)
        grad_s = s * grad + (1.0 - s) * np.broadcast_to(grad[0], grad.shape)
        jac = a - np.diag(psi_s) / big_k - (v[:, None] * grad_s) / big_k
        step = solve_linear(jac, -g)
        t = 1.0
        accepted = False
        for _ in range(60):
            cand = v + t * step
            if np.min(cand) > 0.0 and _in_box(cand, box_lo, box_hi):
                cand_psi = stage_pressure(cand)
                cand_norm = float(np.max(np.abs(a @ cand - cand_psi * cand / big_k)))
                if cand_norm < g_norm:
                    v = cand
                    accepted = True
                    break
            t *= config.damping
        if not accepted:
            probe = v + 1e-8 * step
            if not (np.min(probe) > 0.0 and _in_box(probe, box_lo, box_hi)):
                raise LeftAprioriBox(s)
            raise InnerNoConvergence(s)
    raise InnerNoConvergence(s)


def equilibrium_homotopy(model: Model, config: HomotopyConfig | None = None) -> EquilibriumResult:
    """Continuation from the shared-pressure anchor to the full pressure map.

    The pressure map is slid from Psi_1 (applied to every genotype) to the
    genuine Psi along s in [0, 1]; each stage is solved by damped Newton on
    G_s(v) = (R+M)v - Psi^s(v) v / K warm-started from the previous stage,
    accepted only when the stage map T(v) = (R+M)^{-1}[Psi^s(v) v / K]
    moves v by at most inner_tol, and the final stage is polished by Newton
    on the full stationarity equation.
    """
    config = config or HomotopyConfig()
    report = validate(model)
    if mutation_symmetric(model):
        if not report.h3_half:
            raise Hypothesis3Violated("mutation outflow must stay within r/2")
    elif not report.h4_third:
        raise Hypothesis3Violated(
            "asymmetric mutation requires symmetrized outflow within r/3"
        )

    a = growth_mutation_matrix(model)
    lu = _lu_factor(a)
    box_lo, box_hi = _apriori_box(model, config)
    big_k = model.big_k

    per = perron_eigenpair(a)
    if per.lambda_p <= 0.0:
        raise NonPositivePerron(f"dominant growth exponent {per.lambda_p:g} is not positive")
    v = _scale_to_pressure(model, per.v_p, big_k * per.lambda_p)
    if not _in_box(v, box_lo, box_hi):
        raise LeftAprioriBox(0.0)
    path = [(0.0, v.copy(), residual(model, v))]

    s_values = np.linspace(0.0, 1.0, config.s_steps)
    for s in s_values[1:]:
        v = _stage_solve(model, a, lu, float(s), v, config, box_lo, box_hi)
        path.append((float(s), v.copy(), residual(model, v)))

    v = _newton_polish(model, a, v)
    if not _in_box(v, box_lo, box_hi):
        raise LeftAprioriBox(1.0)
    path[-1] = (1.0, v.copy(), residual(model, v))

    return EquilibriumResult(
        v_bar=v,
        alpha_bar=None,
        lambda_p=per.lambda_p,
        residual=residual(model, v),
        method=Method.Homotopy,
        homotopy_path=path,
    )


def _newton_polish(model: Model, a: np.ndarray, v: np.ndarray, max_iter: int = 50) -> np.ndarray:
    big_k = model.big_k
    scale = max(1.0, float(np.max(np.abs(v))))
    for _ in range(max_iter):
        psi = interaction_values(model, v)
        g = a @ v - psi * v / big_k
        if float(np.max(np.abs(g))) <= 1e-15 * scale:
            break
        jac = a - np.diag(psi) / big_k - (v[:, None] * interaction_gradient(model, v)) / big_k
        step = solve_linear(jac, -g)
        t = 1.0
        cand = v + step
        for _ in range(40):
            if np.min(cand) > 0.0:
                break
            t *= 0.5
            cand = v + t * step
        v = cand
        if float(np.max(np.abs(t * step))) <= 1e-15 * scale:
            break
    return v
