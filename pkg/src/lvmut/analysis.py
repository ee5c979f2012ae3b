"""Spectral gaps, convergence-rate fits, basin experiments, perturbation sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricMutation,
    InsufficientTail,
    KernelMismatch,
    NonPositiveReference,
    OutOfTheoremScope,
)
from .dynamics import Trajectory, integrate
from .entropy import decompose
from .equilibrium import EquilibriumResult, equilibrium_homotopy, equilibrium_uniform
from .linalg import symmetric_spectrum
from .model import (
    CrowdingLinear,
    Model,
    Perturbed,
    UniformLinear,
    build_model,
    mutation_symmetric,
    perturbed,
    uniform_linear,
    validate,
)

_EH_FLOOR = 1e-28


@dataclass(frozen=True)
class SpectralGapReport:
    c1: float
    eigenvalues: np.ndarray  # ascending
    kernel_vector: np.ndarray
    d_matrix: np.ndarray
    m_tilde: np.ndarray


@dataclass(frozen=True)
class RateReport:
    fitted_rate_eh: float
    fitted_rate_sup: float
    r_squared: float
    predicted_c1: float | None
    window: tuple[float, float]
    n_points: int


@dataclass(frozen=True)
class StabilityReport:
    converged: bool
    max_pairwise_gap: float
    max_equilibrium_gap: float
    attractor: np.ndarray
    endpoints: np.ndarray
    n_samples: int
    t_end: float
    tol: float
    seed: int
    in_scope: bool


@dataclass(frozen=True)
class PerturbationRow:
    eps: float
    v_bar: np.ndarray | None
    l1_distance: float | None
    ratio: float | None
    sigma: float
    failed: bool = False
    error: str | None = None


@dataclass(frozen=True)
class PerturbationTable:
    rows: list = field(default_factory=list)


def spectral_gap(model: Model, v_bar) -> SpectralGapReport:
    """Second-smallest eigenvalue of D - M~ built from mu and the equilibrium.

    D_ii = (1/vbar_i) sum_j mu_ij vbar_j and M~ is the off-diagonal mutation
    matrix; the kernel is the vbar direction and the next eigenvalue bounds
    the decay rate of orthogonal perturbation energy.
    """
    if not mutation_symmetric(model):
        raise AsymmetricMutation("spectral gap requires symmetric mutation rates")
    v_bar = np.asarray(v_bar, dtype=float)
    if np.any(v_bar <= 0.0):
        raise NonPositiveReference("equilibrium must be strictly positive")
    d_diag = (model.mu @ v_bar) / v_bar
    d_matrix = np.diag(d_diag)
    m_tilde = model.mu.copy()
    a = d_matrix - m_tilde
    spec = symmetric_spectrum(a)
    eigenvalues = spec.eigenvalues[::-1].copy()
    vectors = spec.eigenvectors[:, ::-1]
    scale = max(1.0, float(np.max(np.abs(a))))
    if abs(eigenvalues[0]) > 1e-10 * scale:
        raise KernelMismatch(f"smallest eigenvalue {eigenvalues[0]:g} is not zero")
    kern = vectors[:, 0]
    ref = v_bar / float(np.linalg.norm(v_bar))
    if float(kern @ ref) < 0.0:
        kern = -kern
    if float(np.max(np.abs(kern - ref))) > 1e-8:
        raise KernelMismatch("kernel eigenvector does not align with the equilibrium")
    c1 = float(eigenvalues[1]) if model.n > 1 else math.inf
    return SpectralGapReport(
        c1=c1,
        eigenvalues=eigenvalues,
        kernel_vector=kern,
        d_matrix=d_matrix,
        m_tilde=m_tilde,
    )


def convergence_rate(
    trajectory: Trajectory,
    v_bar,
    tail_fraction: float = 0.5,
    predicted_c1: float | None = None,
) -> RateReport:
    """Log-linear decay fit of the orthogonal energy over the trailing window."""
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail_fraction must lie in (0, 1]")
    v_bar = np.asarray(v_bar, dtype=float)
    times = trajectory.times
    span = times[-1] - times[0]
    cutoff = times[-1] - tail_fraction * span

    ts, e_hs, sups = [], [], []
    for t, v in zip(times, trajectory.states):
        if t < cutoff:
            continue
        dec = decompose(v, v_bar)
        if dec.e_h <= _EH_FLOOR:
            continue
        ts.append(t)
        e_hs.append(dec.e_h)
        sups.append(float(np.max(np.abs(v - v_bar))))
    if len(ts) < 20:
        raise InsufficientTail(f"only {len(ts)} usable tail samples")

    ts = np.asarray(ts)
    log_eh = np.log(np.asarray(e_hs))
    slope_eh, r_squared = _least_squares_line(ts, log_eh)
    sups = np.asarray(sups)
    good = sups > 0.0
    if int(np.sum(good)) >= 2:
        slope_sup, _ = _least_squares_line(ts[good], np.log(sups[good]))
    else:
        slope_sup = 0.0
    return RateReport(
        fitted_rate_eh=slope_eh,
        fitted_rate_sup=slope_sup,
        r_squared=r_squared,
        predicted_c1=predicted_c1,
        window=(float(ts[0]), float(ts[-1])),
        n_points=int(ts.size),
    )


def _least_squares_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ ym) / sxx if sxx > 0 else 0.0
    fit = slope * xm
    ss_res = float(np.sum((ym - fit) ** 2))
    ss_tot = float(ym @ ym)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return slope, r2


def _theorem_scope(model: Model) -> bool:
    """Basin-of-attraction statements cover uniform and perturbed pressures."""
    inter = model.interaction
    if isinstance(inter, UniformLinear):
        return True
    if isinstance(inter, Perturbed):
        return validate(model).h1_monotone
    if isinstance(inter, CrowdingLinear):
        rows = inter.alpha * model.r[None, :]
        return bool(np.allclose(rows, rows[0], rtol=1e-12, atol=0.0))
    return False


def _solve_equilibrium(model: Model) -> EquilibriumResult:
    if isinstance(model.interaction, UniformLinear):
        return equilibrium_uniform(model)
    return equilibrium_homotopy(model)


def global_stability_experiment(
    model: Model,
    n_samples: int,
    seed: int,
    t_end: float,
    tol: float,
    force: bool = False,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> StabilityReport:
    """Integrate a batch of random starts and compare endpoints pairwise
    and against the solver equilibrium."""
    in_scope = _theorem_scope(model)
    if not in_scope and not force:
        raise OutOfTheoremScope(
            "heterogeneous pressures are outside the convergence statements; "
            "pass force to run anyway"
        )
    rng = np.random.default_rng(seed)
    starts = rng.uniform(0.0, 2.0 * model.big_k, size=(n_samples, model.n))
    for i in range(n_samples):
        while not np.any(starts[i] > 0.0):
            starts[i] = rng.uniform(0.0, 2.0 * model.big_k, size=model.n)

    eq = _solve_equilibrium(model)
    endpoints = np.empty_like(starts)
    for i in range(n_samples):
        traj = integrate(model, starts[i], t_end, rtol=rtol, atol=atol,
                         record_every=t_end)
        endpoints[i] = traj.states[-1]

    max_pair = 0.0
    for i in range(n_samples):
        for j in range(i + 1, n_samples):
            max_pair = max(max_pair, float(np.max(np.abs(endpoints[i] - endpoints[j]))))
    max_eq = float(np.max(np.abs(endpoints - eq.v_bar[None, :])))
    return StabilityReport(
        converged=bool(max_pair <= tol and max_eq <= tol),
        max_pairwise_gap=max_pair,
        max_equilibrium_gap=max_eq,
        attractor=eq.v_bar,
        endpoints=endpoints,
        n_samples=n_samples,
        t_end=float(t_end),
        tol=float(tol),
        seed=int(seed),
        in_scope=in_scope,
    )


def perturbation_sweep(base_model: Model, amp, w, eps_grid) -> PerturbationTable:
    """Equilibrium displacement under growing tanh perturbations of the pressure.

    The base row (eps = 0) uses the eigenvector-scaling equilibrium; each
    perturbed row solves by continuation and records the l1 displacement,
    its ratio to sqrt(eps), and the uniform pressure shift sigma.
    """
    if not isinstance(base_model.interaction, UniformLinear):
        raise OutOfTheoremScope("the sweep perturbs a uniform linear base")
    amp = np.asarray(amp, dtype=float)
    w = np.asarray(w, dtype=float)
    eps_grid = [float(e) for e in eps_grid]
    if any(e <= 0.0 for e in eps_grid) or sorted(eps_grid) != eps_grid:
        raise ValueError("eps_grid must be positive and ascending")

    base_eq = equilibrium_uniform(base_model)
    v0 = base_eq.v_bar
    amp_sup = float(np.max(np.abs(amp), initial=0.0))
    rows = [
        PerturbationRow(
            eps=0.0, v_bar=v0.copy(), l1_distance=0.0, ratio=None, sigma=0.0
        )
    ]
    for eps in eps_grid:
        sigma = eps * amp_sup
        try:
            pert_model = build_model(
                base_model.n,
                base_model.r,
                base_model.big_k,
                base_model.mu,
                perturbed(uniform_linear(base_model.interaction.a), eps, amp, w),
            )
            rep = validate(pert_model)
            if not rep.h1_monotone:
                raise OutOfTheoremScope("perturbation too large for monotone pressures")
            eq = equilibrium_homotopy(pert_model)
            dist = float(np.sum(np.abs(eq.v_bar - v0)))
            rows.append(
                PerturbationRow(
                    eps=eps,
                    v_bar=eq.v_bar,
                    l1_distance=dist,
                    ratio=dist / math.sqrt(eps),
                    sigma=sigma,
                )
            )
        except Exception as exc:  # noqa: BLE001 - row-level isolation
            rows.append(
                PerturbationRow(
                    eps=eps,
                    v_bar=None,
                    l1_distance=None,
                    ratio=None,
                    sigma=sigma,
                    failed=True,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return PerturbationTable(rows=rows)
