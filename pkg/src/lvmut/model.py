"""Genotype competition models with mutation.

A model couples per-genotype growth rates r, a carrying capacity K, a
nonnegative mutation-rate matrix mu (zero diagonal), and a competitive
pressure map Psi drawn from a closed family of interaction kinds. The
governing vector field is

    dv_i/dt = v_i (r_i - Psi_i(v) / K) + sum_j mu_ij (v_j - v_i).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeMutation,
    NonPositiveRate,
    WrongInteractionKind,
)
from .linalg import is_irreducible

_ROWSUM_ZERO_ATOL = 1e-12


@dataclass(frozen=True)
class UniformLinear:
    """Psi_i(v) = sum_j a_j v_j, identical for every genotype."""

    a: np.ndarray


@dataclass(frozen=True)
class CrowdingLinear:
    """Psi_i(v) = sum_j alpha_ij r_j v_j, growth-weighted crowding."""

    alpha: np.ndarray


@dataclass(frozen=True)
class Perturbed:
    """A uniform linear base plus eps * amp_i * tanh(<w_i, v>)."""

    base: UniformLinear
    eps: float
    amp: np.ndarray
    w: np.ndarray


Interaction = UniformLinear | CrowdingLinear | Perturbed


@dataclass(frozen=True)
class Model:
    n: int
    r: np.ndarray
    big_k: float
    mu: np.ndarray
    interaction: Interaction


@dataclass(frozen=True)
class CoercivityParams:
    c_low: np.ndarray    # per-genotype lower linear coefficients
    k_exponents: np.ndarray
    r_ball: float
    kappa: np.ndarray    # per-genotype Lipschitz bounds on the unit l1 ball


@dataclass(frozen=True)
class HypothesisReport:
    h1_positivity: bool
    h1_symmetry: bool
    h1_irreducible: bool
    h1_monotone: bool
    h2_coercive: bool
    h3_half: bool
    h4_third: bool
    details: dict = field(default_factory=dict)


def _lock(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def offdiagonal_mutation(full: np.ndarray) -> np.ndarray:
    """Strip the diagonal from a mutation matrix whose rows sum to zero.

    Matrices of this shape arise when diagonal loss terms are stored
    explicitly; the off-diagonal part carries the same dynamics once the
    diagonal is folded into the outflow sum, which requires each original
    row to sum to zero.
    """
    full = np.asarray(full, dtype=float)
    rowsums = full.sum(axis=1)
    scale = max(1.0, float(np.max(np.abs(full), initial=0.0)))
    if np.max(np.abs(rowsums), initial=0.0) > _ROWSUM_ZERO_ATOL * scale:
        raise NegativeMutation(
            "matrix rows must sum to zero to absorb the diagonal; got row sums "
            f"{rowsums.tolist()}"
        )
    mu = full.copy()
    np.fill_diagonal(mu, 0.0)
    return mu


def point_mutation_matrix(n_loci: int, rate: float) -> np.ndarray:
    """Off-diagonal mutation rates between the 2**n_loci binary genotypes.

    Entry (i, j) is rate**d * (1-rate)**(L-d) - [d==0 correction] with d the
    Hamming distance; rows of the full matrix (with diagonal (1-rate)**L - 1)
    sum to zero, so the off-diagonal part is returned directly.
    """
    if not (0.0 < rate < 1.0):
        raise NonPositiveRate("point mutation rate must lie in (0, 1)")
    size = 2 ** n_loci
    full = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            d = bin(i ^ j).count("1")
            full[i, j] = rate ** d * (1.0 - rate) ** (n_loci - d)
    full -= np.eye(size)
    return offdiagonal_mutation(full)


def uniform_linear(a) -> UniformLinear:
    a = _lock(a)
    if a.ndim != 1:
        raise DimensionMismatch("a must be a vector")
    if np.any(a <= 0.0):
        raise NonPositiveRate("uniform interaction weights must be positive")
    return UniformLinear(a=a)


def crowding_linear(alpha) -> CrowdingLinear:
    alpha = _lock(alpha)
    if alpha.ndim != 2 or alpha.shape[0] != alpha.shape[1]:
        raise DimensionMismatch("alpha must be a square matrix")
    if np.any(alpha < 0.0):
        raise NegativeMutation("crowding coefficients must be nonnegative")
    return CrowdingLinear(alpha=alpha)


def perturbed(base: UniformLinear, eps: float, amp, w) -> Perturbed:
    if not isinstance(base, UniformLinear):
        raise WrongInteractionKind("perturbed interactions take a uniform linear base")
    eps = float(eps)
    if eps < 0.0:
        raise NonPositiveRate("eps must be nonnegative")
    amp = _lock(amp)
    w = _lock(w)
    if amp.ndim != 1 or w.ndim != 2:
        raise DimensionMismatch("amp must be a vector and w a matrix")
    if w.shape != (amp.shape[0], amp.shape[0]):
        raise DimensionMismatch("w must be square with amp's length")
    return Perturbed(base=base, eps=eps, amp=amp, w=w)


def build_model(n: int, r, big_k: float, mu, interaction: Interaction) -> Model:
    """Validate shapes and signs, canonicalize, and freeze a Model."""
    n = int(n)
    if n < 1:
        raise DimensionMismatch("n must be at least 1")
    r = _lock(r)
    if r.shape != (n,):
        raise DimensionMismatch(f"r must have shape ({n},)")
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
        raise NonPositiveRate("growth rates must be positive and finite")
    big_k = float(big_k)
    if not np.isfinite(big_k) or big_k <= 0.0:
        raise NonPositiveRate("carrying capacity must be positive and finite")
    mu_arr = np.array(mu, dtype=float)
    if mu_arr.shape != (n, n):
        raise DimensionMismatch(f"mu must have shape ({n}, {n})")
    if np.any(~np.isfinite(mu_arr)):
        raise NegativeMutation("mutation rates must be finite")
    diag = np.diag(mu_arr)
    if np.any(diag != 0.0):
        mu_arr = offdiagonal_mutation(mu_arr)
    if np.any(mu_arr < 0.0):
        raise NegativeMutation("mutation rates must be nonnegative")
    mu_arr = _lock(mu_arr)

    if isinstance(interaction, UniformLinear):
        interaction = uniform_linear(interaction.a)
        if interaction.a.shape != (n,):
            raise DimensionMismatch("interaction weight vector has wrong length")
    elif isinstance(interaction, CrowdingLinear):
        interaction = crowding_linear(interaction.alpha)
        if interaction.alpha.shape != (n, n):
            raise DimensionMismatch("crowding matrix has wrong shape")
    elif isinstance(interaction, Perturbed):
        base = uniform_linear(interaction.base.a)
        interaction = perturbed(base, interaction.eps, interaction.amp, interaction.w)
        if base.a.shape != (n,) or interaction.amp.shape != (n,):
            raise DimensionMismatch("perturbation arrays have wrong length")
    else:
        raise WrongInteractionKind(f"unknown interaction {type(interaction).__name__}")

    return Model(n=n, r=r, big_k=big_k, mu=mu_arr, interaction=interaction)


def interaction_values(model: Model, v: np.ndarray) -> np.ndarray:
    """Psi(v), one competitive pressure value per genotype."""
    v = np.asarray(v, dtype=float)
    inter = model.interaction
    if isinstance(inter, UniformLinear):
        return np.full(model.n, float(inter.a @ v))
    if isinstance(inter, CrowdingLinear):
        return inter.alpha @ (model.r * v)
    if isinstance(inter, Perturbed):
        base = float(inter.base.a @ v)
        return base + inter.eps * inter.amp * np.tanh(inter.w @ v)
    raise WrongInteractionKind(f"unknown interaction {type(inter).__name__}")


def interaction_gradient(model: Model, v: np.ndarray) -> np.ndarray:
    """Jacobian of Psi at v, row i = grad of Psi_i."""
    v = np.asarray(v, dtype=float)
    inter = model.interaction
    if isinstance(inter, UniformLinear):
        return np.tile(inter.a, (model.n, 1))
    if isinstance(inter, CrowdingLinear):
        return inter.alpha * model.r[None, :]
    if isinstance(inter, Perturbed):
        th = np.tanh(inter.w @ v)
        return np.tile(inter.base.a, (model.n, 1)) + (
            inter.eps * (inter.amp * (1.0 - th * th))[:, None] * inter.w
        )
    raise WrongInteractionKind(f"unknown interaction {type(inter).__name__}")


def rhs(model: Model, v: np.ndarray) -> np.ndarray:
    """The vector field v_i (r_i - Psi_i(v)/K) + sum_j mu_ij (v_j - v_i)."""
    v = np.asarray(v, dtype=float)
    psi = interaction_values(model, v)
    return v * (model.r - psi / model.big_k) + model.mu @ v - model.mu.sum(axis=1) * v


def growth_mutation_matrix(model: Model) -> np.ndarray:
    """R + M: growth on the diagonal plus mutation in-rates minus outflow."""
    m = model.mu - np.diag(model.mu.sum(axis=1))
    return np.diag(model.r) + m


def mutation_symmetric(model: Model, tol: float = 1e-12) -> bool:
    mu = model.mu
    scale = max(1.0, float(np.max(np.abs(mu), initial=0.0)))
    return float(np.max(np.abs(mu - mu.T), initial=0.0)) <= tol * scale


def is_fitness_weighted(model: Model) -> bool:
    """Uniform linear interaction whose weights equal the growth rates."""
    inter = model.interaction
    return isinstance(inter, UniformLinear) and bool(
        np.allclose(inter.a, model.r, rtol=1e-12, atol=0.0)
    )


def coercivity_params(model: Model) -> CoercivityParams | None:
    """Linear coercivity data for the closed interaction family, or None.

    For the linear kinds Psi_i(v) >= c_i * sum_j v_j holds globally with
    c_i the smallest per-row coefficient; the tanh perturbation costs a
    bounded offset, absorbed by doubling the ball radius.
    """
    inter = model.interaction
    n = model.n
    if isinstance(inter, UniformLinear):
        c = np.full(n, float(np.min(inter.a)))
        kappa = np.full(n, float(np.max(inter.a)))
        r_ball = 1.0
    elif isinstance(inter, CrowdingLinear):
        coeff = inter.alpha * model.r[None, :]
        c = coeff.min(axis=1)
        kappa = coeff.max(axis=1)
        if np.any(c <= 0.0):
            return None
        r_ball = 1.0
    elif isinstance(inter, Perturbed):
        a_min = float(np.min(inter.base.a))
        off = inter.eps * np.abs(inter.amp)
        c = np.full(n, a_min / 2.0)
        kappa = np.max(inter.base.a) + off * np.max(np.abs(inter.w), axis=1, initial=0.0)
        r_ball = max(1.0, float(np.max(2.0 * off / a_min, initial=0.0)))
    else:
        return None
    return CoercivityParams(
        c_low=c,
        k_exponents=np.ones(n),
        r_ball=float(r_ball),
        kappa=np.asarray(kappa, dtype=float),
    )


def validate(model: Model) -> HypothesisReport:
    """Check the standing hypotheses; pure and idempotent."""
    details: dict[str, str] = {}
    mu = model.mu

    h1_pos = bool(np.all(model.r > 0.0) and np.all(mu >= 0.0) and model.big_k > 0.0)
    details["h1_positivity"] = "r > 0, mu >= 0, K > 0" if h1_pos else "sign violation"

    h1_sym = mutation_symmetric(model)
    details["h1_symmetry"] = "mu symmetric" if h1_sym else "mu is not symmetric"

    h1_irr = is_irreducible(mu)
    details["h1_irreducible"] = (
        "mutation graph strongly connected" if h1_irr else "mutation graph disconnected"
    )

    inter = model.interaction
    if isinstance(inter, (UniformLinear, CrowdingLinear)):
        grad = interaction_gradient(model, np.zeros(model.n))
        h1_mono = bool(np.all(grad >= 0.0))
        details["h1_monotone"] = "linear coefficients nonnegative" if h1_mono else (
            "negative linear coefficient"
        )
    else:
        bound = inter.eps * float(
            np.max(np.abs(inter.amp) * np.max(np.abs(inter.w), axis=1), initial=0.0)
        )
        a_min = float(np.min(inter.base.a))
        h1_mono = bool(a_min > bound)
        details["h1_monotone"] = (
            f"min a = {a_min:g} dominates perturbation slope bound {bound:g}"
            if h1_mono
            else f"unverified: perturbation slope bound {bound:g} reaches min a = {a_min:g}"
        )

    coer = coercivity_params(model)
    h2 = coer is not None
    details["h2_coercive"] = (
        f"linear growth with radius {coer.r_ball:g}" if coer else "no positive lower coefficient"
    )

    out = mu.sum(axis=1)
    h3 = bool(np.all(out <= model.r / 2.0 + 1e-15))
    details["h3_half"] = "mutation outflow within r/2" if h3 else "mutation outflow exceeds r/2"

    sym_out = 0.5 * (mu + mu.T).sum(axis=1)
    h4 = bool(np.all(sym_out <= model.r / 3.0 + 1e-15))
    details["h4_third"] = (
        "symmetrized outflow within r/3" if h4 else "symmetrized outflow exceeds r/3"
    )

    return HypothesisReport(
        h1_positivity=h1_pos,
        h1_symmetry=h1_sym,
        h1_irreducible=h1_irr,
        h1_monotone=h1_mono,
        h2_coercive=h2,
        h3_half=h3,
        h4_third=h4,
        details=details,
    )
