import numpy as np
import pytest

from nonharmonic.errors import ConfigurationError, EllipticityError, PicardDivergenceError
from nonharmonic.evolve import (EvolutionProblem, energy_check, residual, solve_ivp,
                                uniqueness_probe)
from nonharmonic.model import ModelSpec, build_model
from nonharmonic.symbols import Symbol, make_symbol


def neg_laplace_symbol():
    return Symbol(fn=lambda x, xi, lam, br: np.full_like(x, -(br**2), dtype=complex),
                  order=2.0, name="-bracket^2")


def dissipative_problem(model, scheme="crank_nicolson", steps=200, T=0.1, forcing=None):
    return EvolutionProblem(symbol_factory=lambda t: neg_laplace_symbol(),
                            u0=model.u_row(1), T=T, steps=steps, scheme=scheme,
                            forcing=forcing, order_m=2.0)


def exact_final_coeffs(model, T):
    c = np.zeros(len(model.indices), dtype=complex)
    c[model.N + 1] = np.exp(-float(model.bracket_val(1)) ** 2 * T)
    return c


def test_closed_form_decay_crank_nicolson(torus):
    prob = dissipative_problem(torus, steps=400)
    traj = solve_ivp(torus, prob)
    err = np.linalg.norm(traj.coeffs[-1] - exact_final_coeffs(torus, 0.1))
    assert err <= 1e-5
    assert np.all(np.diff(traj.norms) <= 1e-14)  # dissipative decay


@pytest.mark.parametrize("scheme,expected", [("crank_nicolson", 2.0), ("backward_euler", 1.0)])
def test_convergence_orders(torus, scheme, expected):
    steps_list = (50, 100, 200, 400)
    errs = []
    for steps in steps_list:
        traj = solve_ivp(torus, dissipative_problem(torus, scheme=scheme, steps=steps))
        errs.append(np.linalg.norm(traj.coeffs[-1] - exact_final_coeffs(torus, 0.1)))
    slope = -np.polyfit(np.log2(steps_list), np.log2(errs), 1)[0]
    assert slope == pytest.approx(expected, abs=0.2)


def test_zero_generator_keeps_state(torus):
    zero = make_symbol("constant", value=0.0)
    prob = EvolutionProblem(symbol_factory=lambda t: zero, u0=torus.u_row(1), T=1.0,
                            steps=50, scheme="crank_nicolson", order_m=2.0,
                            ellipticity_gate="off")
    traj = solve_ivp(torus, prob)
    assert np.max(np.abs(traj.coeffs - traj.coeffs[0][None, :])) <= 1e-13
    assert np.max(residual(torus, prob, traj)) <= 1e-13
    rep = energy_check(torus, prob, traj)
    assert rep.C == pytest.approx(1.0, abs=1e-12)
    assert rep.violations == 0


def test_pure_forcing_integration(torus):
    zero = make_symbol("constant", value=0.0)
    prob = EvolutionProblem(symbol_factory=lambda t: zero,
                            u0=np.zeros(torus.Q, dtype=complex), T=1.0, steps=100,
                            scheme="crank_nicolson", forcing=lambda t: torus.u_row(1),
                            order_m=2.0, ellipticity_gate="off")
    traj = solve_ivp(torus, prob)
    expected = np.zeros(33, dtype=complex)
    expected[torus.N + 1] = 1.0  # v(T) = T * u_1 with T = 1
    np.testing.assert_allclose(traj.coeffs[-1], expected, atol=1e-12)


def test_picard_agrees_with_crank_nicolson_where_it_contracts():
    m = build_model(ModelSpec(kind="torus_derivative", N=1, Q=32))
    pp = dissipative_problem(m, scheme="picard", steps=400)
    pc = dissipative_problem(m, scheme="crank_nicolson", steps=400)
    tp, tc = solve_ivp(m, pp), solve_ivp(m, pc)
    assert tp.picard_iterations < 50
    assert np.max(np.abs(tp.coeffs - tc.coeffs)) <= 1e-6


def test_picard_divergence_guard_on_stiff_window(torus):
    # max |symbol| * T ~ 1000 here: the fixed-point iteration amplifies
    # top-mode roundoff faster than the factorial gain for 50 iterations
    with pytest.raises(PicardDivergenceError):
        solve_ivp(torus, dissipative_problem(torus, scheme="picard", steps=100))


def test_dissipativity_gate(torus):
    growth = Symbol(fn=lambda x, xi, lam, br: np.full_like(x, br**2, dtype=complex),
                    order=2.0, name="+bracket^2")
    prob = EvolutionProblem(symbol_factory=lambda t: growth, u0=torus.u_row(1), T=0.1,
                            steps=10, scheme="crank_nicolson", order_m=2.0)
    with pytest.raises(EllipticityError):
        solve_ivp(torus, prob)
    # the literal sign reading accepts the same generator
    prob_lit = EvolutionProblem(symbol_factory=lambda t: growth, u0=torus.u_row(1), T=0.1,
                                steps=10, scheme="crank_nicolson", order_m=2.0,
                                ellipticity_gate="literal")
    traj = solve_ivp(torus, prob_lit)
    assert np.all(np.isfinite(traj.norms))


def test_scheme_validation(torus):
    prob = dissipative_problem(torus)
    prob.scheme = "leapfrog"
    with pytest.raises(ConfigurationError):
        solve_ivp(torus, prob)


def test_energy_bound_with_forcing_and_time_dependence(torus):
    def K_t(t):
        amp = -(1.0 + 0.3 * np.cos(2 * np.pi * t))
        return Symbol(fn=lambda x, xi, lam, br, A=amp: A * br**2 + 0.1 * np.exp(2j * np.pi * x),
                      order=2.0, name="K(t)")

    prob = EvolutionProblem(symbol_factory=K_t, u0=torus.u_row(1), T=0.5, steps=200,
                            scheme="crank_nicolson", forcing=lambda t: torus.u_row(2),
                            order_m=2.0)
    traj = solve_ivp(torus, prob)
    rep = energy_check(torus, prob, traj)
    assert rep.violations == 0 and rep.passed
    assert rep.C_prime >= 0.0


def test_uniqueness_probe(torus):
    prob = dissipative_problem(torus, steps=100)
    rep = uniqueness_probe(torus, prob, scale=1e-6, seed=3)
    assert rep.bitwise_identical
    assert rep.homogeneous_max_norm <= 1e-12
    assert np.all(rep.ratio <= rep.envelope * (1 + 1e-6) + 1e-9)
    assert rep.passed


def test_residual_orders(torus):
    med = {}
    for steps in (200, 400):
        prob = dissipative_problem(torus, steps=steps)
        med[steps] = np.median(residual(torus, prob, solve_ivp(torus, prob)))
    assert med[200] / med[400] == pytest.approx(4.0, rel=0.2)
    medb = {}
    for steps in (200, 400):
        prob = dissipative_problem(torus, scheme="backward_euler", steps=steps)
        medb[steps] = np.median(residual(torus, prob, solve_ivp(torus, prob)))
    assert medb[200] / medb[400] == pytest.approx(2.0, rel=0.2)
