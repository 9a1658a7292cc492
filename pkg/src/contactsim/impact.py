"""Instantaneous velocity and momentum jumps at the switching surface.

The post-impact state is determined by two continuity requirements at
the boundary point, not by a restitution coefficient:

  * tangential momentum:  dL/dqdot . v  (resp. p . v) is unchanged for
    every v tangent to the surface, so the momentum jump is parallel to
    grad h;
  * energy:  E_L (resp. H) is unchanged.

Position, action z, and time pass through untouched. For a quadratic
kinetic energy these conditions have exactly two roots, the identity and
the elastic reflection; the resolvers always select the reflecting root,
and report the tangential and energy residuals of whatever they return.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import (
    ContactStateH,
    ContactStateL,
    HamiltonianSpec,
    SystemSpec,
    evaluate_partials,
    lagrangian_energy,
)
from .errors import (
    ConvergedToIdentity,
    DegenerateNormal,
    GrazingContact,
    NoConvergence,
    SingularMassMatrix,
)

__all__ = [
    "SwitchingSurface",
    "ImpactResult",
    "resolve_impact_natural",
    "resolve_impact_newton",
    "resolve_impact_hamiltonian",
    "tangent_basis",
]

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SwitchingSurface:
    """Boundary h(q) = 0 of the admissible region h >= 0.

    ``h`` maps a configuration to a scalar; ``grad_h`` returns its
    gradient, which must not vanish near the boundary.
    """

    h: Callable[[np.ndarray], float]
    grad_h: Callable[[np.ndarray], np.ndarray]

    def value(self, q: np.ndarray) -> float:
        return float(self.h(q))

    def gradient(self, q: np.ndarray) -> np.ndarray:
        g = np.asarray(self.grad_h(q), dtype=float)
        return g


@dataclass(frozen=True)
class ImpactResult:
    """Resolved impact: post state, impulse multiplier, and the
    independently evaluated (tangential, energy) residuals."""

    state_plus: Union[ContactStateL, ContactStateH]
    lam: float
    residual_tangential: float
    residual_energy: float

    @property
    def residuals(self) -> tuple:
        return (self.residual_tangential, self.residual_energy)


def tangent_basis(grad: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space ker(grad) as columns.

    Built from a single Householder reflection of the unit normal, so the
    basis is deterministic. Shape (n, n-1); empty for n = 1.
    """
    n = grad.size
    u = grad / float(np.linalg.norm(grad))
    w = u.copy()
    w[0] += 1.0 if u[0] >= 0.0 else -1.0
    P = np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w)
    return P[:, 1:]


def _check_boundary(surface: SwitchingSurface, q: np.ndarray, boundary_tol: float):
    hval = surface.value(q)
    if abs(hval) > boundary_tol:
        raise ValueError(
            f"state is not on the switching surface (h={hval:.3e}, tol={boundary_tol:.1e})"
        )
    g = surface.gradient(q)
    gn = float(np.linalg.norm(g))
    if gn <= 1e-12:
        raise DegenerateNormal(f"grad h vanishes at the impact point q={q}")
    return g


def _lagrangian_residuals(sys: SystemSpec, s_minus: ContactStateL,
                          s_plus: ContactStateL, g: np.ndarray) -> tuple:
    p_minus = evaluate_partials(sys, s_minus).dL_dv
    p_plus = evaluate_partials(sys, s_plus).dL_dv
    T = tangent_basis(g)
    p_scale = max(1.0, float(np.max(np.abs(p_minus))))
    if T.shape[1] > 0:
        r_tan = float(np.max(np.abs((p_plus - p_minus) @ T))) / p_scale
    else:
        r_tan = 0.0
    e_minus = lagrangian_energy(sys, s_minus)
    e_plus = lagrangian_energy(sys, s_plus)
    r_en = abs(e_plus - e_minus) / max(1.0, abs(e_minus))
    return r_tan, r_en


def resolve_impact_natural(sys: SystemSpec, s_minus: ContactStateL,
                           surface: SwitchingSurface,
                           boundary_tol: float = 1e-9,
                           grazing_threshold: float = 1e-9) -> ImpactResult:
    """Closed-form elastic impact for natural-form (quadratic kinetic) systems.

    qdot_plus = qdot_minus + lam * Minv grad h with
    lam = -2 (grad h . qdot_minus) / (grad h . Minv grad h), the nonzero
    root of the energy condition. q, z, t are unchanged.
    """
    if sys.natural is None:
        raise ValueError("resolve_impact_natural requires natural-form data")
    sys.check_state(s_minus)
    g = _check_boundary(surface, s_minus.q, boundary_tol)
    vn = float(g @ s_minus.qdot)
    if vn >= -grazing_threshold:
        raise GrazingContact(
            f"normal velocity {vn:.3e} is not approaching the boundary"
        )
    M = sys.natural.mass_matrix(s_minus.q)
    try:
        minv_g = np.linalg.solve(M, g)
    except np.linalg.LinAlgError as e:
        raise SingularMassMatrix(f"mass matrix singular at q={s_minus.q}") from e
    lam = -2.0 * vn / float(g @ minv_g)
    qdot_plus = s_minus.qdot + lam * minv_g
    s_plus = ContactStateL(q=s_minus.q, qdot=qdot_plus, z=s_minus.z, t=s_minus.t)
    r_tan, r_en = _lagrangian_residuals(sys, s_minus, s_plus, g)
    return ImpactResult(state_plus=s_plus, lam=lam,
                        residual_tangential=r_tan, residual_energy=r_en)


def resolve_impact_newton(sys: SystemSpec, s_minus: ContactStateL,
                          surface: SwitchingSurface,
                          boundary_tol: float = 1e-9,
                          grazing_threshold: float = 1e-9,
                          max_iter: int = 50, tol: float = 1e-12) -> ImpactResult:
    """General impact resolution by Newton iteration.

    Solves the n+1 unknowns (qdot_plus, lam) from the momentum-jump
    ansatz dL/dqdot(q, qdot_plus, z) - dL/dqdot(q, qdot_minus, z) =
    lam grad h together with the energy match, seeded from the
    quadratic-case formula built on the velocity Hessian. A solve that
    lands back on the identity root is reported as ConvergedToIdentity,
    never silently accepted.
    """
    sys.check_state(s_minus)
    g = _check_boundary(surface, s_minus.q, boundary_tol)
    vn = float(g @ s_minus.qdot)
    if vn >= -grazing_threshold:
        raise GrazingContact(
            f"normal velocity {vn:.3e} is not approaching the boundary"
        )
    q, z, t = s_minus.q, s_minus.z, s_minus.t
    d_minus = evaluate_partials(sys, s_minus)
    p_minus = d_minus.dL_dv
    e_minus = lagrangian_energy(sys, s_minus)
    scale = max(1.0, float(np.max(np.abs(p_minus))), abs(e_minus))

    # quadratic-case seed with W as the effective mass matrix
    w_inv_g = np.linalg.solve(d_minus.W, g)
    lam = -2.0 * vn / float(g @ w_inv_g)
    v = s_minus.qdot + lam * w_inv_g

    n = sys.n
    converged = False
    for _ in range(max_iter):
        s_trial = ContactStateL(q=q, qdot=v, z=z, t=t)
        d = evaluate_partials(sys, s_trial)
        F = np.empty(n + 1)
        F[:n] = d.dL_dv - p_minus - lam * g
        F[n] = lagrangian_energy(sys, s_trial) - e_minus
        if float(np.max(np.abs(F))) <= tol * scale:
            converged = True
            break
        J = np.zeros((n + 1, n + 1))
        J[:n, :n] = d.W
        J[:n, n] = -g
        J[n, :n] = d.W @ v   # dE/dqdot
        delta = np.linalg.solve(J, -F)
        v = v + delta[:n]
        lam = lam + delta[n]
    if not converged:
        raise NoConvergence(f"impact Newton solve stalled after {max_iter} iterations")

    vn_plus = float(g @ v)
    if not vn_plus > 0.0:
        if float(np.max(np.abs(v - s_minus.qdot))) <= 1e-8 * max(1.0, float(np.max(np.abs(s_minus.qdot)))):
            raise ConvergedToIdentity("impact solve found only the trivial root")
        raise NoConvergence(
            f"impact solve did not reverse the normal velocity (got {vn_plus:.3e})"
        )
    s_plus = ContactStateL(q=q, qdot=v, z=z, t=t)
    r_tan, r_en = _lagrangian_residuals(sys, s_minus, s_plus, g)
    return ImpactResult(state_plus=s_plus, lam=lam,
                        residual_tangential=r_tan, residual_energy=r_en)


def resolve_impact_hamiltonian(sys: HamiltonianSpec, surface: SwitchingSurface,
                               s_minus: ContactStateH,
                               boundary_tol: float = 1e-9,
                               grazing_threshold: float = 1e-9,
                               max_iter: int = 50, tol: float = 1e-12) -> ImpactResult:
    """Momentum-side impact: p_plus = p_minus + lam grad h with H unchanged.

    Systems carrying an inverse-metric evaluator get the closed-form
    multiplier; otherwise the nontrivial root of the scalar energy
    equation is found by Newton from a curvature-based seed.
    """
    sys.check_state(s_minus)
    g = _check_boundary(surface, s_minus.q, boundary_tol)
    q, z, t = s_minus.q, s_minus.z, s_minus.t
    p_minus = s_minus.p
    vn = float(g @ sys.grad_p(q, p_minus, z))
    if vn >= -grazing_threshold:
        raise GrazingContact(
            f"normal velocity {vn:.3e} is not approaching the boundary"
        )
    H_minus = sys.value(q, p_minus, z)

    if sys.minv is not None:
        Minv = np.asarray(sys.minv(q), dtype=float)
        lam = -2.0 * float(g @ (Minv @ p_minus)) / float(g @ (Minv @ g))
    else:
        def root_fn(lmb: float) -> float:
            return sys.value(q, p_minus + lmb * g, z) - H_minus

        # curvature of H along grad h gives the quadratic-case root estimate
        eps = _EPS ** 0.25 * (1.0 + float(np.max(np.abs(p_minus)))) / (
            1.0 + float(np.max(np.abs(g))))
        curv = (root_fn(eps) + root_fn(-eps)) / (eps * eps)
        if curv == 0.0:
            raise NoConvergence("energy is flat along grad h; no reflecting root")
        lam = -2.0 * vn / curv
        scale = max(1.0, abs(H_minus))
        converged = False
        for _ in range(max_iter):
            r = root_fn(lam)
            if abs(r) <= tol * scale:
                converged = True
                break
            slope = float(g @ sys.grad_p(q, p_minus + lam * g, z))
            if slope == 0.0:
                break
            lam = lam - r / slope
        if not converged:
            raise NoConvergence(f"impact Newton solve stalled after {max_iter} iterations")

    p_plus = p_minus + lam * g
    vn_plus = float(g @ sys.grad_p(q, p_plus, z))
    if not vn_plus > 0.0:
        raise ConvergedToIdentity("impact solve found only the trivial root")
    s_plus = ContactStateH(q=q, p=p_plus, z=z, t=t)
    T = tangent_basis(g)
    p_scale = max(1.0, float(np.max(np.abs(p_minus))))
    r_tan = float(np.max(np.abs((p_plus - p_minus) @ T))) / p_scale if T.shape[1] else 0.0
    H_plus = sys.value(q, p_plus, z)
    r_en = abs(H_plus - H_minus) / max(1.0, abs(H_minus))
    return ImpactResult(state_plus=s_plus, lam=lam,
                        residual_tangential=r_tan, residual_energy=r_en)
