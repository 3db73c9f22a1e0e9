"""Lower bounds and L2 estimates: Garding constants, the epsilon-
interpolation inequality, Hilbert-Schmidt and operator norms of truncated
sections.

The Garding estimator is empirical by design: it draws seeded random
coefficient vectors, evaluates the quadratic form Re(Au, u) directly on
the grid, and fits the largest C1 in (0, 1/C0] together with the smallest
C2 >= 0 such that

    Re(Au, u) >= C1 ||u||_{H^{m/2}}^2 - C2 ||u||_{L2}^2

holds on every trial.  The squared Sobolev term is used throughout (the
inequality is dimensionally consistent only in that form).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import EllipticityError, ConfigurationError
from .model import ModelProblem, ModelSpec, build_model
from .quantize import galerkin_matrix, kernel, op_apply_coeff
from .symbols import Symbol
from .transform import CoeffVector, coefficient_gram, inverse


@dataclass
class GardingReport:
    C0: float
    C1: float
    C2: float
    quad_forms: np.ndarray      # per-trial Re(Au, u)
    sobolev_sq: np.ndarray      # per-trial ||u||^2_{H^{m/2}}
    l2_sq: np.ndarray           # per-trial ||u||^2_{L2}
    violations: int
    verdict: bool
    sweep: list = field(default_factory=list)


def garding_estimate(model: ModelProblem, a: Symbol, m: float, trials: int = 200,
                     seed: int = 0, c1_grid: int = 257) -> GardingReport:
    """Estimate Garding constants for the real-part symbol of a.

    Raises EllipticityError when A = Re a fails the positivity precheck
    |<xi>^m A^-1| <= C0 on the sampled window.
    """
    tab = a.table(model, 0)
    A_tab = tab.real
    br = model.bracket_val(model.indices)
    weighted = A_tab / (br**m)[:, None]
    if np.min(weighted) <= 0:
        raise EllipticityError("real-part symbol is not positive elliptic on the window")
    C0 = float(1.0 / np.min(weighted))

    rng = np.random.default_rng(seed)
    n = len(model.indices)
    quad_forms = np.empty(trials)
    sob_sq = np.empty(trials)
    l2_sq = np.empty(trials)
    sob_weights = br**m
    for t in range(trials):
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c /= np.linalg.norm(c)
        cv = CoeffVector(c, tag="L")
        u = inverse(model, cv)
        Au = op_apply_coeff(model, a, cv)
        quad_forms[t] = float(np.real(model.quad(Au * np.conj(u))))
        # grid-quadrature Sobolev/L2 norms through the starred pairing
        fstar = (model.u.conj() * model.w) @ u
        sob_sq[t] = float(np.real(np.sum(sob_weights * c * np.conj(fstar))))
        l2_sq[t] = float(np.real(model.quad(np.abs(u) ** 2)))

    c1_values = np.linspace(1.0 / C0 / c1_grid, 1.0 / C0, c1_grid)
    sweep = []
    for c1 in c1_values:
        deficit = (c1 * sob_sq - quad_forms) / l2_sq
        sweep.append((float(c1), float(max(0.0, np.max(deficit)))))
    C1, C2 = sweep[-1]

    margins = quad_forms - C1 * sob_sq + C2 * l2_sq
    violations = int(np.sum(margins < -1e-9 * np.maximum(1.0, np.abs(quad_forms))))
    return GardingReport(C0=C0, C1=C1, C2=C2, quad_forms=quad_forms, sobolev_sq=sob_sq,
                         l2_sq=l2_sq, violations=violations,
                         verdict=bool(violations == 0), sweep=sweep)


def interpolation_constant(model: ModelProblem, s: float, t: float, eps: float,
                           trials: int = 100, seed: int = 0) -> float:
    """Smallest discrete constant with ||u||_t^2 <= eps ||u||_s^2 + C ||u||_{L2}^2.

    C = max over the window of (<xi>^{2t} - eps <xi>^{2s}), floored at 0;
    the inequality is then validated on random coefficient vectors.
    """
    if eps <= 0:
        raise ConfigurationError("interpolation requires eps > 0")
    if not ((s >= t >= 0) or (s < 0 and t < 0)):
        raise ConfigurationError(f"interpolation requires s >= t >= 0 or s, t < 0; got s={s}, t={t}")
    br = model.bracket_val(model.indices)
    C = float(max(0.0, np.max(br ** (2 * t) - eps * br ** (2 * s))))

    rng = np.random.default_rng(seed)
    n = len(model.indices)
    for _ in range(trials):
        c2 = np.abs(rng.standard_normal(n) + 1j * rng.standard_normal(n)) ** 2
        lhs = float(np.sum(br ** (2 * t) * c2))
        rhs = eps * float(np.sum(br ** (2 * s) * c2)) + C * float(np.sum(c2))
        if lhs > rhs * (1 + 1e-12):
            raise EllipticityError("interpolation inequality violated; fitted constant inconsistent")
    return C


def hilbert_schmidt_norm(model: ModelProblem, a: Symbol) -> float:
    """Hilbert-Schmidt norm of the kernel, by grid quadrature in both slots."""
    K = kernel(model, a).values
    return float(np.sqrt(np.real(np.einsum("i,ij,j->", model.w, np.abs(K) ** 2, model.w))))


def l2_operator_norm(model_or_spec, a: Symbol, truncations: Sequence[int]) -> np.ndarray:
    """Largest singular value of the Galerkin section at each truncation.

    For non-self-adjoint models the norm is taken in the sequence-space
    geometry: the generalized problem M^H G M x = s^2 G x with G the
    coefficient Gram matrix.  Truncations must be ascending; each one
    rebuilds the model with a proportionally enlarged grid.
    """
    truncations = list(truncations)
    if truncations != sorted(truncations):
        raise ConfigurationError("truncations must be ascending")
    spec0 = model_or_spec.spec if isinstance(model_or_spec, ModelProblem) else model_or_spec
    norms = []
    for N in truncations:
        Q = max(spec0.Q, 4 * (2 * N + 1))
        spec = ModelSpec(kind=spec0.kind, N=N, Q=Q, h=spec0.h, m=spec0.m)
        sub = build_model(spec)
        M = galerkin_matrix(sub, a).matrix
        G = coefficient_gram(sub)
        if np.allclose(G, np.eye(G.shape[0]), atol=1e-12):
            norms.append(float(np.linalg.norm(M, 2)))
        else:
            B = M.conj().T @ G @ M
            vals = scipy.linalg.eigh(B, G, eigvals_only=True)
            norms.append(float(np.sqrt(max(vals.max(), 0.0))))
    return np.array(norms)
