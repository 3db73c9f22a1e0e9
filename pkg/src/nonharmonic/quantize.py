"""Quantization, symbol extraction, kernels, Galerkin matrices, calculus.

The quantization rule is Af(x) = sum_xi u_xi(x) a(x, xi) fhat(xi); its
inverse is symbol extraction sigma_A(x, xi) = u_xi(x)^-1 (A u_xi)(x),
which requires the eigenfunctions to stay away from zero.  On the
truncated window these two are exact inverses of each other because the
discrete transform reproduces coefficients of basis functions exactly.

Composition and adjoint are implemented as truncated asymptotic
expansions in the difference operators; the exact finite-section operator
(a product or conjugate transpose of Galerkin matrices, re-extracted as a
symbol) serves as the independent oracle.  Finite sections corrupt the
outermost modes, so comparisons are meaningful on the inner half-window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ShapeError, WindowExhaustedError, WZViolationError
from .model import ModelProblem
from .symbols import (AdmissibleFamily, DEFAULT_MARGIN, Symbol, apply_D,
                      apply_Delta, apply_Delta_star, default_family)
from .transform import CoeffVector, fourier, inverse


@dataclass
class GalerkinMatrix:
    """Finite section M[eta, xi] = fourier(Op(a) u_xi)(eta)."""

    matrix: np.ndarray
    provenance: str = ""

    def apply(self, c: CoeffVector) -> CoeffVector:
        if len(c) != self.matrix.shape[1]:
            raise ShapeError(f"coefficient length {len(c)} does not match matrix {self.matrix.shape}")
        return CoeffVector(self.matrix @ c.values, tag=c.tag)


@dataclass
class KernelTable:
    """Samples K(x_i, y_j) of the Schwartz kernel on the grid."""

    values: np.ndarray
    provenance: str = ""


def op_apply(model: ModelProblem, sym: Symbol, f: np.ndarray) -> np.ndarray:
    """Apply Op(a) to a grid function through the quantization sum."""
    fhat = fourier(model, f)
    tab = sym.table(model, 0)
    return np.einsum("k,kx,kx->x", fhat.values, tab, model.u, optimize=True)


def op_apply_coeff(model: ModelProblem, sym: Symbol, c: CoeffVector) -> np.ndarray:
    """Apply Op(a) directly to coefficients (skips one forward transform)."""
    tab = sym.table(model, 0)
    return np.einsum("k,kx,kx->x", c.values, tab, model.u, optimize=True)


def extract_symbol(model: ModelProblem, apply: Callable[[np.ndarray], np.ndarray],
                   margin: int = 0, order: float = 0.0, rho: float = 1.0,
                   delta: float = 0.0, name: str = "extracted") -> Symbol:
    """Recover the symbol of an operator from its action on eigenfunctions."""
    M = model.N + margin
    rows = []
    for xi in range(-M, M + 1):
        u = model.u_row(xi)
        if np.min(np.abs(u)) < 1e-12:
            raise WZViolationError(f"|u_{xi}| falls below 1e-12 on the grid; cannot divide")
        rows.append(apply(u) / u)
    return Symbol.from_table(model, np.stack(rows), margin, order=order, rho=rho,
                             delta=delta, name=name)


def symbol_of_matrix(model: ModelProblem, M: np.ndarray, order: float = 0.0,
                     rho: float = 1.0, delta: float = 0.0,
                     name: str = "matrix") -> Symbol:
    """Symbol of the operator defined by a finite-section matrix in the
    u-basis: sigma(x, xi) = u_xi(x)^-1 sum_eta M[eta, xi] u_eta(x)."""
    if np.min(np.abs(model.u)) < 1e-12:
        raise WZViolationError("|u| falls below 1e-12 on the grid; cannot divide")
    tab = (M.T @ model.u) / model.u
    return Symbol.from_table(model, tab, 0, order=order, rho=rho, delta=delta, name=name)


def symbol_of_matrix_star(model: ModelProblem, M_star: np.ndarray, order: float = 0.0,
                          name: str = "matrix*") -> Symbol:
    """Symbol against the v-basis: tau(x, xi) = v_xi(x)^-1 sum_eta M*[eta, xi] v_eta(x)."""
    if np.min(np.abs(model.v)) < 1e-12:
        raise WZViolationError("|v| falls below 1e-12 on the grid; cannot divide")
    tab = (M_star.T @ model.v) / model.v
    return Symbol.from_table(model, tab, 0, order=order, name=name)


def kernel(model: ModelProblem, sym: Symbol) -> KernelTable:
    """Schwartz kernel K(x, y) = sum_xi u_xi(x) a(x, xi) conj(v_xi(y))."""
    tab = sym.table(model, 0)
    K = np.einsum("kx,kx,ky->xy", model.u, tab, model.v.conj(), optimize=True)
    return KernelTable(values=K, provenance=sym.name)


def kernel_apply(model: ModelProblem, K: KernelTable, f: np.ndarray) -> np.ndarray:
    """Apply an operator through its kernel: g(x) = quad_y K(x, y) f(y)."""
    f = np.asarray(f)
    if f.shape != (model.Q,):
        raise ShapeError(f"grid function has shape {f.shape}, expected ({model.Q},)")
    return K.values @ (model.w * f)


def galerkin_matrix(model: ModelProblem, sym: Symbol) -> GalerkinMatrix:
    """Matrix of Op(a) in the biorthogonal basis."""
    tab = sym.table(model, 0)
    M = np.einsum("ey,y,ky,ky->ek", model.v.conj(), model.w, model.u, tab, optimize=True)
    return GalerkinMatrix(matrix=M, provenance=sym.name)


def adjoint_galerkin(model: ModelProblem, M: GalerkinMatrix) -> np.ndarray:
    """v-basis matrix of the adjoint operator: the conjugate transpose."""
    return M.matrix.conj().T


def compose_symbols(model: ModelProblem, a: Symbol, b: Symbol, terms: int,
                    family: Optional[AdmissibleFamily] = None) -> Symbol:
    """Truncated composition expansion
    sigma^(terms) = sum_{alpha < terms} (1/alpha!) (Delta^alpha a)(D^(alpha) b)."""
    if terms < 1:
        raise WindowExhaustedError("composition expansion needs terms >= 1")
    family = family or default_family()
    avail_a = a.available_margin(model)
    margin_a = DEFAULT_MARGIN if avail_a is None else avail_a
    out_margin = margin_a - (terms - 1)
    if out_margin < 0:
        raise WindowExhaustedError(
            f"composition with terms={terms} exhausts margin {margin_a} of {a.name!r}")

    total = np.zeros((2 * (model.N + out_margin) + 1, model.Q), dtype=complex)
    for alpha in range(terms):
        da = apply_Delta(model, a, alpha, family)
        db = apply_D(model, b, alpha, family)
        term = da.table(model, out_margin) * db.table(model, out_margin)
        total += term / math.factorial(alpha)
    return Symbol.from_table(model, total, out_margin, order=a.order + b.order,
                             rho=min(a.rho, b.rho), delta=max(a.delta, b.delta),
                             name=f"({a.name} o {b.name})[{terms}]")


def adjoint_symbol(model: ModelProblem, a: Symbol, terms: int,
                   family_tilde: Optional[AdmissibleFamily] = None) -> Symbol:
    """Truncated adjoint expansion
    tau^(terms) = sum_{alpha < terms} (1/alpha!) Delta~^alpha D^(alpha) conj(a)."""
    if terms < 1:
        raise WindowExhaustedError("adjoint expansion needs terms >= 1")
    if family_tilde is None:
        family_tilde = default_family().conjugate()
    family = family_tilde.conjugate()  # direct family, for the D transform

    avail = a.available_margin(model)
    margin = DEFAULT_MARGIN if avail is None else avail
    out_margin = margin - (terms - 1)
    if out_margin < 0:
        raise WindowExhaustedError(
            f"adjoint with terms={terms} exhausts margin {margin} of {a.name!r}")

    conj_a = Symbol.from_table(model, np.conj(a.table(model, margin)), margin,
                               order=a.order, rho=a.rho, delta=a.delta,
                               name=f"conj[{a.name}]")
    total = np.zeros((2 * (model.N + out_margin) + 1, model.Q), dtype=complex)
    for alpha in range(terms):
        work = apply_D(model, conj_a, alpha, family)
        work = apply_Delta_star(model, work, alpha, family_tilde)
        total += work.table(model, out_margin) / math.factorial(alpha)
    return Symbol.from_table(model, total, out_margin, order=a.order, rho=a.rho,
                             delta=a.delta, name=f"adj[{a.name}][{terms}]")


def inner_window(model: ModelProblem, fraction: float = 0.5) -> np.ndarray:
    """Boolean mask of the inner part of the index window, |xi| <= N * fraction."""
    return np.abs(model.indices) <= model.N * fraction


def composition_oracle(model: ModelProblem, a: Symbol, b: Symbol) -> Symbol:
    """Exact finite-section composition: product of Galerkin matrices,
    re-extracted as a symbol."""
    Ma = galerkin_matrix(model, a).matrix
    Mb = galerkin_matrix(model, b).matrix
    return symbol_of_matrix(model, Ma @ Mb, order=a.order + b.order,
                            name=f"oracle({a.name} o {b.name})")


def adjoint_oracle(model: ModelProblem, a: Symbol) -> Symbol:
    """Exact finite-section adjoint: conjugate transpose of the Galerkin
    matrix, extracted against the v-basis."""
    M = galerkin_matrix(model, a)
    return symbol_of_matrix_star(model, adjoint_galerkin(model, M), order=a.order,
                                 name=f"oracle(adj {a.name})")


def band_limited(model: ModelProblem, rng: np.random.Generator) -> np.ndarray:
    """A random band-limited grid function (coefficients ~ complex normal)."""
    c = rng.standard_normal(len(model.indices)) + 1j * rng.standard_normal(len(model.indices))
    return inverse(model, CoeffVector(c, tag="L"))
