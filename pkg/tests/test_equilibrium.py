"""Equilibrium solvers against closed-form oracles and cross-checks."""
import math

import numpy as np
import pytest

from lvmut.equilibrium import (
    HomotopyConfig,
    Method,
    equilibrium_homotopy,
    equilibrium_uniform,
    residual,
)
from lvmut.errors import Hypothesis3Violated, WrongInteractionKind
from lvmut.model import build_model, crowding_linear, uniform_linear
from lvmut.presets import get_preset, preset_names


def _fit2asym_oracle():
    # A = [[0.9, 0.1], [0.1, 1.9]]; dominant root of its characteristic
    # polynomial and the matching eigenvector direction (1, rho)
    lam = (2.8 + math.sqrt(1.04)) / 2.0
    rho = (lam - 0.9) / 0.1
    v_bar = np.array([1.0, rho]) / (1.0 + rho)
    return lam, v_bar


def test_fit2asym_closed_form():
    preset = get_preset("fit2asym")
    lam, v_oracle = _fit2asym_oracle()
    eq = equilibrium_uniform(preset.model)
    assert eq.lambda_p == pytest.approx(lam, abs=1e-12)
    assert eq.alpha_bar == pytest.approx(lam, abs=1e-12)  # K = 1
    assert np.max(np.abs(eq.v_bar - v_oracle)) < 1e-12
    assert eq.residual <= 1e-12
    assert float(np.sum(eq.v_bar)) == pytest.approx(1.0, abs=1e-12)
    assert eq.method is Method.PerronScaling


def test_sym2_and_mut4_equilibria():
    eq2 = equilibrium_uniform(get_preset("sym2").model)
    assert np.max(np.abs(eq2.v_bar - 5.0)) < 1e-10
    assert eq2.lambda_p == pytest.approx(1.0, abs=1e-12)
    assert eq2.alpha_bar == pytest.approx(10.0, abs=1e-10)
    eq4 = equilibrium_uniform(get_preset("mut4").model)
    assert np.max(np.abs(eq4.v_bar - 25.0)) < 1e-9
    assert eq4.alpha_bar == pytest.approx(100.0, abs=1e-8)


def test_residual_definition():
    model = get_preset("sym2").model
    assert residual(model, np.zeros(2)) == 0.0
    assert residual(model, np.array([5.0, 5.0])) <= 1e-14
    assert residual(model, np.array([6.0, 4.0])) > 1e-3


def test_every_preset_equilibrium_is_positive():
    for name in preset_names():
        model = get_preset(name).model
        eq = equilibrium_homotopy(model)
        assert float(np.min(eq.v_bar)) > 0.0
        assert eq.residual <= 1e-10


def test_homotopy_agrees_with_eigenvector_scaling():
    for name in ("sym2", "fit2asym", "mut4"):
        model = get_preset(name).model
        direct = equilibrium_uniform(model)
        cont = equilibrium_homotopy(model)
        assert np.max(np.abs(direct.v_bar - cont.v_bar)) < 1e-8
        assert cont.method is Method.Homotopy
        assert cont.alpha_bar is None


def test_homotopy_path_shape():
    eq = equilibrium_homotopy(get_preset("crowd3").model)
    s_vals = [s for s, _, _ in eq.homotopy_path]
    assert s_vals[0] == 0.0
    assert s_vals[-1] == 1.0
    assert all(b > a for a, b in zip(s_vals, s_vals[1:]))
    assert len(s_vals) == HomotopyConfig().s_steps
    for _, v, _ in eq.homotopy_path:
        assert np.all(v > 0)
    assert eq.homotopy_path[-1][2] <= 1e-10


def test_trivial_crowding_matches_uniform():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = 3
        r = rng.uniform(0.5, 2.0, size=n)
        big_k = float(rng.uniform(1.0, 50.0))
        mu = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                mu[i, j] = mu[j, i] = rng.uniform(0.01, 0.05)
        crowd = build_model(n, r, big_k, mu, crowding_linear(np.ones((n, n))))
        flat = build_model(n, r, big_k, mu, uniform_linear(r))
        eq_c = equilibrium_homotopy(crowd)
        eq_u = equilibrium_uniform(flat)
        assert np.max(np.abs(eq_c.v_bar - eq_u.v_bar)) < 1e-8 * big_k


def test_perturbed_equilibrium():
    preset = get_preset("pert2")
    eq = equilibrium_homotopy(preset.model)
    assert np.all(eq.v_bar > 0)
    assert eq.residual <= 1e-10
    # eps = 1e-3 nudges the flat equilibrium by O(eps * K) at most
    assert np.max(np.abs(eq.v_bar - 5.0)) < 0.1


def test_outflow_gate():
    model = build_model(
        2, [1.0, 1.0], 10.0, [[0.0, 0.6], [0.6, 0.0]], uniform_linear([1.0, 1.0])
    )
    with pytest.raises(Hypothesis3Violated):
        equilibrium_homotopy(model)


def test_asymmetric_mutation_solves_under_tighter_outflow():
    mu = [[0.0, 0.05], [0.08, 0.0]]
    model = build_model(2, [1.0, 1.0], 10.0, mu, uniform_linear([1.0, 1.0]))
    direct = equilibrium_uniform(model)
    cont = equilibrium_homotopy(model)
    assert np.max(np.abs(direct.v_bar - cont.v_bar)) < 1e-8
    assert cont.residual <= 1e-10


def test_eigenvector_scaling_rejects_state_dependent_pressures():
    crowd = get_preset("crowd3")
    with pytest.raises(WrongInteractionKind):
        equilibrium_uniform(crowd.model)
