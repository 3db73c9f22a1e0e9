"""Parabolic Cauchy problems on the truncated model.

Solves d/dt v = K(t) v + f with v(0) = u0 in coefficient space, where K(t)
is given through a (possibly time-dependent) symbol factory.  Admissible
problems are dissipative: -Re(symbol of K) must pass the Garding
positivity precheck at sampled times.  The literal sign reading (printed
hypothesis: +Re K elliptic) is exposed for experimentation, and the gate
can be switched off entirely for unit-scale problems like K = 0.

Schemes: Crank-Nicolson (order 2, forcing sampled at half-steps),
backward Euler (order 1), and Picard iteration of the integral equation
(trapezoid quadrature, fixed point to 1e-10).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .analysis import garding_estimate
from .errors import ConfigurationError, EllipticityError, PicardDivergenceError, SpectrumProximityError
from .model import ModelProblem
from .quantize import galerkin_matrix
from .symbols import Symbol
from .transform import coefficient_gram, fourier

SCHEMES = ("crank_nicolson", "backward_euler", "picard")
GATES = ("dissipative", "literal", "off")


@dataclass
class EvolutionProblem:
    """Data of the Cauchy problem: generator symbol factory, forcing,
    initial value, horizon, step count, scheme."""

    symbol_factory: Callable[[float], Symbol]
    u0: np.ndarray
    T: float
    steps: int
    scheme: str = "crank_nicolson"
    forcing: Optional[Callable[[float], np.ndarray]] = None
    order_m: float = 2.0
    ellipticity_gate: str = "dissipative"

    def validate(self, model: ModelProblem):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.ellipticity_gate not in GATES:
            raise ConfigurationError(f"unknown gate {self.ellipticity_gate!r}")
        if self.T <= 0 or self.steps < 1:
            raise ConfigurationError("need T > 0 and steps >= 1")
        if self.ellipticity_gate == "off":
            return
        sign = -1.0 if self.ellipticity_gate == "dissipative" else +1.0
        for t in (0.0, self.T / 2.0, self.T):
            sym = self.symbol_factory(t)
            tab = sign * sym.table(model, 0).real
            br = model.bracket_val(model.indices)
            if np.min(tab / (br**self.order_m)[:, None]) <= 0:
                raise EllipticityError(
                    f"generator fails the {self.ellipticity_gate} ellipticity gate at t={t:g}")


@dataclass
class Trajectory:
    times: np.ndarray
    coeffs: np.ndarray      # (steps+1, 2N+1)
    norms: np.ndarray       # per-step L2 norms in the sequence geometry
    scheme: str
    picard_iterations: int = 0


def _norms_of(model: ModelProblem, coeffs: np.ndarray, gram: np.ndarray) -> np.ndarray:
    vals = np.einsum("ki,ij,kj->k", coeffs.conj(), gram, coeffs, optimize=True)
    return np.sqrt(np.maximum(vals.real, 0.0))


def _solve(Amat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(Amat)
    if not np.isfinite(cond) or cond > 1e12:
        raise SpectrumProximityError(f"time-step system has condition estimate {cond:.3e}")
    return np.linalg.solve(Amat, rhs)


def solve_ivp(model: ModelProblem, prob: EvolutionProblem) -> Trajectory:
    """Integrate the problem and return the coefficient trajectory."""
    prob.validate(model)
    n = len(model.indices)
    dt = prob.T / prob.steps
    times = np.linspace(0.0, prob.T, prob.steps + 1)
    gram = coefficient_gram(model)
    eye = np.eye(n)

    def mat(t: float) -> np.ndarray:
        return galerkin_matrix(model, prob.symbol_factory(t)).matrix

    def fhat(t: float) -> np.ndarray:
        if prob.forcing is None:
            return np.zeros(n, dtype=complex)
        return fourier(model, prob.forcing(t)).values

    coeffs = np.zeros((prob.steps + 1, n), dtype=complex)
    coeffs[0] = fourier(model, prob.u0).values
    iterations = 0

    if prob.scheme == "crank_nicolson":
        for k in range(prob.steps):
            M0 = mat(times[k])
            M1 = mat(times[k + 1])
            rhs = (eye + 0.5 * dt * M0) @ coeffs[k] + dt * fhat(times[k] + 0.5 * dt)
            coeffs[k + 1] = _solve(eye - 0.5 * dt * M1, rhs)
    elif prob.scheme == "backward_euler":
        for k in range(prob.steps):
            M1 = mat(times[k + 1])
            rhs = coeffs[k] + dt * fhat(times[k + 1])
            coeffs[k + 1] = _solve(eye - dt * M1, rhs)
    else:  # picard
        mats = np.stack([mat(t) for t in times])
        fs = np.stack([fhat(t) for t in times])
        cur = np.tile(coeffs[0], (prob.steps + 1, 1)).astype(complex)
        prev_res = np.inf
        growths = 0
        for it in range(1, 51):
            rhs = np.einsum("kij,kj->ki", mats, cur) + fs
            integ = np.zeros_like(cur)
            increments = 0.5 * dt * (rhs[:-1] + rhs[1:])
            integ[1:] = np.cumsum(increments, axis=0)
            new = coeffs[0][None, :] + integ
            res = float(np.max(np.abs(new - cur)))
            cur = new
            iterations = it
            if res < 1e-10:
                break
            if res > prev_res:
                growths += 1
                if growths >= 5:
                    raise PicardDivergenceError(
                        f"Picard residual grew {growths} consecutive iterations (last {res:.3e})")
            else:
                growths = 0
            prev_res = res
        coeffs = cur

    norms = _norms_of(model, coeffs, gram)
    return Trajectory(times=times, coeffs=coeffs, norms=norms, scheme=prob.scheme,
                      picard_iterations=iterations)


@dataclass
class EnergyReport:
    C: float
    C2: float
    C_prime: float
    forcing_integral: float
    margins: np.ndarray
    violations: int
    passed: bool


def energy_check(model: ModelProblem, prob: EvolutionProblem, traj: Trajectory,
                 seed: int = 0) -> EnergyReport:
    """Verify ||v(t)||^2 <= C ||u0||^2 + C'(T) int_0^T ||f||^2.

    C = exp(2 C2 T) with C2 the Garding constant of -Re K at sampled
    times (Gronwall); C' is fitted as the tightest constant over the
    trajectory and the margins are reported per step.
    """
    C2 = 0.0
    if prob.ellipticity_gate != "literal":
        for t in (0.0, prob.T / 2.0, prob.T):
            sym = prob.symbol_factory(t)
            neg = Symbol.from_table(model, -sym.table(model, 0), 0,
                                    order=prob.order_m, name=f"-K({t:g})")
            try:
                rep = garding_estimate(model, neg, prob.order_m, trials=50, seed=seed)
                C2 = max(C2, rep.C2)
            except EllipticityError:
                C2 = max(C2, 0.0)
    C = float(np.exp(2.0 * C2 * prob.T))

    if prob.forcing is None:
        forcing_sq = np.zeros_like(traj.times)
    else:
        forcing_sq = np.array([
            float(np.real(model.quad(np.abs(prob.forcing(t)) ** 2)))
            for t in traj.times])
    fint = float(np.trapezoid(forcing_sq, traj.times))

    u0_sq = traj.norms[0] ** 2
    lhs = traj.norms**2
    if fint > 1e-300:
        C_prime = float(max(0.0, np.max((lhs - C * u0_sq) / fint)))
    else:
        C_prime = 0.0
    bound = C * u0_sq + C_prime * fint
    margins = bound - lhs
    tol = 1e-9 * max(1.0, float(np.max(lhs)))
    violations = int(np.sum(margins < -tol))
    return EnergyReport(C=C, C2=C2, C_prime=C_prime, forcing_integral=fint,
                        margins=margins, violations=violations,
                        passed=bool(violations == 0))


@dataclass
class UniquenessReport:
    bitwise_identical: bool
    homogeneous_max_norm: float
    ratio: np.ndarray
    envelope: np.ndarray
    passed: bool


def uniqueness_probe(model: ModelProblem, prob: EvolutionProblem, scale: float = 1e-6,
                     seed: int = 0) -> UniquenessReport:
    """Determinism and uniqueness diagnostics.

    Two identical solves must agree bitwise; the homogeneous difference
    problem (zero data) must stay at zero; a perturbed initial value must
    stay inside the Gronwall envelope exp(C2 t) relative to its size.
    """
    t1 = solve_ivp(model, prob)
    t2 = solve_ivp(model, prob)
    bitwise = bool(np.array_equal(t1.coeffs, t2.coeffs))

    hom = EvolutionProblem(symbol_factory=prob.symbol_factory,
                           u0=np.zeros(model.Q, dtype=complex),
                           T=prob.T, steps=prob.steps, scheme=prob.scheme,
                           forcing=None, order_m=prob.order_m,
                           ellipticity_gate=prob.ellipticity_gate)
    hom_traj = solve_ivp(model, hom)
    hom_max = float(np.max(hom_traj.norms))

    rng = np.random.default_rng(seed)
    bump = rng.standard_normal(model.Q) + 1j * rng.standard_normal(model.Q)
    pert = EvolutionProblem(symbol_factory=prob.symbol_factory,
                            u0=prob.u0 + scale * bump,
                            T=prob.T, steps=prob.steps, scheme=prob.scheme,
                            forcing=prob.forcing, order_m=prob.order_m,
                            ellipticity_gate=prob.ellipticity_gate)
    t3 = solve_ivp(model, pert)
    gram = coefficient_gram(model)
    diff = _norms_of(model, t3.coeffs - t1.coeffs, gram)
    bump_norm = _norms_of(model, (fourier(model, bump).values)[None, :], gram)[0]
    ratio = diff / (scale * max(bump_norm, 1e-300))

    rep = energy_check(model, prob, t1, seed=seed)
    envelope = np.exp(rep.C2 * t1.times)
    passed = bool(bitwise and hom_max <= 1e-12
                  and np.all(ratio <= envelope * (1.0 + 1e-6) + 1e-9))
    return UniquenessReport(bitwise_identical=bitwise, homogeneous_max_norm=hom_max,
                            ratio=ratio, envelope=envelope, passed=passed)


def residual(model: ModelProblem, prob: EvolutionProblem, traj: Trajectory) -> np.ndarray:
    """Central-difference defect || d/dt v - (K v + f) || at interior steps."""
    dt = traj.times[1] - traj.times[0]
    gram = coefficient_gram(model)
    out = []
    for k in range(1, prob.steps):
        t = traj.times[k]
        M = galerkin_matrix(model, prob.symbol_factory(t)).matrix
        fh = (fourier(model, prob.forcing(t)).values if prob.forcing is not None
              else np.zeros(len(model.indices), dtype=complex))
        defect = (traj.coeffs[k + 1] - traj.coeffs[k - 1]) / (2.0 * dt) - (M @ traj.coeffs[k] + fh)
        out.append(_norms_of(model, defect[None, :], gram)[0])
    return np.array(out)
