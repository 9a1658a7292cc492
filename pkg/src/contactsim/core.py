"""States, system descriptions, and the smooth dissipative dynamics.

An action-dependent Lagrangian L(q, qdot, z) depends on the accumulated
action z in addition to position and velocity, and its trajectories solve
the Herglotz equations

    dL/dq_i - d/dt (dL/dqdot_i) + (dL/dqdot_i)(dL/dz) = 0,    zdot = L,

which reduce to the Euler-Lagrange equations when dL/dz = 0. The extra
term produces dissipation: for L = 1/2 qdot^T M qdot - V(q) - gamma z it
is -gamma * M qdot, linear drag. On the dual side, a contact Hamiltonian
H(q, p, z) generates

    qdot = dH/dp,   pdot = -dH/dq - p dH/dz,   zdot = p . dH/dp - H.

Both vector fields are exposed here as first-order right-hand sides on
(q, qdot, z) and (q, p, z), together with the energy, the Legendre
transform connecting the two pictures, and a finite-difference fallback
for systems that do not supply analytic partial derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NonFiniteValue,
    SingularHessian,
    SingularMassMatrix,
)

__all__ = [
    "ContactStateL",
    "ContactStateH",
    "NaturalForm",
    "SystemSpec",
    "HamiltonianSpec",
    "DerivativeBundle",
    "lagrangian_energy",
    "herglotz_rhs",
    "hamiltonian_rhs",
    "legendre_forward",
    "legendre_inverse",
    "finite_difference_partials",
    "hamiltonian_from_lagrangian",
    "natural_lagrangian_system",
]

# Step scales for the finite-difference fallback. First derivatives use the
# classic eps^(1/3) central-difference step; second derivatives need the
# larger eps^(1/4) step or roundoff in the difference quotient dominates.
_EPS = float(np.finfo(float).eps)
_FD_STEP_1 = _EPS ** (1.0 / 3.0)
_FD_STEP_2 = _EPS ** 0.25

# Relative determinant gate for Hessian regularity.
_REG_TOL = 1e-10


def _as_locked_vector(x, name: str) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue(f"{name} contains non-finite entries: {v}")
    v.flags.writeable = False
    return v


def _finite_scalar(x, name: str) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise NonFiniteValue(f"{name} is not finite: {x}")
    return x


@dataclass(frozen=True)
class ContactStateL:
    """Lagrangian-side state (q, qdot, z, t).

    z is the accumulated action, carried as a first-class coordinate;
    t is physical time. Instances are immutable values.
    """

    q: np.ndarray
    qdot: np.ndarray
    z: float
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", _as_locked_vector(self.q, "q"))
        object.__setattr__(self, "qdot", _as_locked_vector(self.qdot, "qdot"))
        object.__setattr__(self, "z", _finite_scalar(self.z, "z"))
        object.__setattr__(self, "t", _finite_scalar(self.t, "t"))
        if self.q.size != self.qdot.size:
            raise DimensionMismatch(
                f"q has length {self.q.size} but qdot has length {self.qdot.size}"
            )

    @property
    def n(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        """Flat phase vector [q, qdot, z] used by the integrator."""
        return np.concatenate([self.q, self.qdot, [self.z]])

    @classmethod
    def from_vector(cls, y: np.ndarray, n: int, t: float = 0.0) -> "ContactStateL":
        return cls(q=y[:n], qdot=y[n : 2 * n], z=float(y[2 * n]), t=t)


@dataclass(frozen=True)
class ContactStateH:
    """Hamiltonian-side state (q, p, z, t) in Darboux coordinates."""

    q: np.ndarray
    p: np.ndarray
    z: float
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", _as_locked_vector(self.q, "q"))
        object.__setattr__(self, "p", _as_locked_vector(self.p, "p"))
        object.__setattr__(self, "z", _finite_scalar(self.z, "z"))
        object.__setattr__(self, "t", _finite_scalar(self.t, "t"))
        if self.q.size != self.p.size:
            raise DimensionMismatch(
                f"q has length {self.q.size} but p has length {self.p.size}"
            )

    @property
    def n(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, [self.z]])

    @classmethod
    def from_vector(cls, y: np.ndarray, n: int, t: float = 0.0) -> "ContactStateH":
        return cls(q=y[:n], p=y[n : 2 * n], z=float(y[2 * n]), t=t)


@dataclass(frozen=True)
class NaturalForm:
    """Mechanical data for L = 1/2 qdot^T M(q) qdot - V(q) - gamma z.

    mass may be a constant (n, n) array or a callable q -> (n, n) array.
    potential and grad_potential default to zero. gamma has units 1/time.
    """

    mass: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]
    gamma: float = 0.0
    potential: Optional[Callable[[np.ndarray], float]] = None
    grad_potential: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def mass_matrix(self, q: np.ndarray) -> np.ndarray:
        if callable(self.mass):
            return np.asarray(self.mass(q), dtype=float)
        return np.asarray(self.mass, dtype=float)

    @property
    def constant_mass(self) -> bool:
        return not callable(self.mass)

    def potential_value(self, q: np.ndarray) -> float:
        return 0.0 if self.potential is None else float(self.potential(q))


@dataclass(frozen=True)
class SystemSpec:
    """An action-dependent Lagrangian system.

    The Lagrangian evaluator is mandatory. Partial-derivative evaluators
    are optional; any that are missing are filled in by central finite
    differences of the Lagrangian. ``natural`` carries the mechanical
    decomposition when the system has one, unlocking closed-form impact
    resolution and Legendre inversion.

    Partial-derivative conventions (all evaluators take (q, qdot, z)):
      d2L_dvdv[i, j] = d^2 L / dqdot_i dqdot_j      (the Hessian W)
      d2L_dqdv[i, j] = d^2 L / dq_j dqdot_i
      d2L_dzdv[i]    = d^2 L / dz dqdot_i
    """

    n: int
    lagrangian: Callable[[np.ndarray, np.ndarray, float], float]
    dL_dq: Optional[Callable] = None
    dL_dv: Optional[Callable] = None
    dL_dz: Optional[Callable] = None
    d2L_dvdv: Optional[Callable] = None
    d2L_dqdv: Optional[Callable] = None
    d2L_dzdv: Optional[Callable] = None
    natural: Optional[NaturalForm] = None

    def __post_init__(self):
        if self.n < 1:
            raise DimensionMismatch(f"configuration dimension must be >= 1, got {self.n}")

    def check_state(self, s: ContactStateL) -> None:
        if s.n != self.n:
            raise DimensionMismatch(
                f"state has dimension {s.n}, system expects {self.n}"
            )

    def value(self, q: np.ndarray, qdot: np.ndarray, z: float) -> float:
        val = float(self.lagrangian(q, qdot, z))
        if not np.isfinite(val):
            raise NonFiniteValue(f"Lagrangian is not finite at q={q}, qdot={qdot}, z={z}")
        return val


@dataclass(frozen=True)
class HamiltonianSpec:
    """A contact Hamiltonian system H(q, p, z) with optional partials.

    Missing partials fall back to central finite differences. ``minv``
    and ``gamma`` are optional mechanical metadata (inverse mass matrix
    evaluator and dissipation coefficient) attached when the system is
    derived from a natural-form Lagrangian; the impact resolver uses them
    for closed-form impulse computation.
    """

    n: int
    hamiltonian: Callable[[np.ndarray, np.ndarray, float], float]
    dH_dq: Optional[Callable] = None
    dH_dp: Optional[Callable] = None
    dH_dz: Optional[Callable] = None
    minv: Optional[Callable[[np.ndarray], np.ndarray]] = None
    gamma: Optional[float] = None

    def check_state(self, s: ContactStateH) -> None:
        if s.n != self.n:
            raise DimensionMismatch(
                f"state has dimension {s.n}, system expects {self.n}"
            )

    def value(self, q: np.ndarray, p: np.ndarray, z: float) -> float:
        val = float(self.hamiltonian(q, p, z))
        if not np.isfinite(val):
            raise NonFiniteValue(f"Hamiltonian is not finite at q={q}, p={p}, z={z}")
        return val

    def grad_q(self, q, p, z) -> np.ndarray:
        if self.dH_dq is not None:
            return np.asarray(self.dH_dq(q, p, z), dtype=float)
        return _fd_gradient(lambda qq: self.hamiltonian(qq, p, z), q)

    def grad_p(self, q, p, z) -> np.ndarray:
        if self.dH_dp is not None:
            return np.asarray(self.dH_dp(q, p, z), dtype=float)
        return _fd_gradient(lambda pp: self.hamiltonian(q, pp, z), p)

    def grad_z(self, q, p, z) -> float:
        if self.dH_dz is not None:
            return float(self.dH_dz(q, p, z))
        return _fd_scalar_derivative(lambda zz: self.hamiltonian(q, p, zz), z)


@dataclass(frozen=True)
class DerivativeBundle:
    """All partial derivatives of L needed by the dynamics at one state."""

    dL_dq: np.ndarray
    dL_dv: np.ndarray
    dL_dz: float
    W: np.ndarray           # d2L/dv dv, symmetric
    d2L_dqdv: np.ndarray    # [i, j] = d2L/dq_j dv_i
    d2L_dzdv: np.ndarray    # [i] = d2L/dz dv_i


# ---------------------------------------------------------------------------
# finite differences


def _fd_gradient(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    g = np.empty(x.size)
    for i in range(x.size):
        h = _FD_STEP_1 * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (float(f(xp)) - float(f(xm))) / (2.0 * h)
    if not np.all(np.isfinite(g)):
        raise NonFiniteValue("finite-difference gradient sampled a non-finite value")
    return g


def _fd_scalar_derivative(f: Callable[[float], float], x: float) -> float:
    h = _FD_STEP_1 * max(1.0, abs(x))
    d = (float(f(x + h)) - float(f(x - h))) / (2.0 * h)
    if not np.isfinite(d):
        raise NonFiniteValue("finite-difference derivative sampled a non-finite value")
    return d


def _fd_hessian(f: Callable[[np.ndarray], float], x: np.ndarray) -> np.ndarray:
    n = x.size
    W = np.empty((n, n))
    f0 = float(f(x))
    hs = [_FD_STEP_2 * max(1.0, abs(x[i])) for i in range(n)]
    for i in range(n):
        hi = hs[i]
        xp = x.copy()
        xm = x.copy()
        xp[i] += hi
        xm[i] -= hi
        W[i, i] = (float(f(xp)) - 2.0 * f0 + float(f(xm))) / (hi * hi)
        for j in range(i + 1, n):
            hj = hs[j]
            xpp = x.copy()
            xpm = x.copy()
            xmp = x.copy()
            xmm = x.copy()
            xpp[i] += hi; xpp[j] += hj
            xpm[i] += hi; xpm[j] -= hj
            xmp[i] -= hi; xmp[j] += hj
            xmm[i] -= hi; xmm[j] -= hj
            W[i, j] = W[j, i] = (
                float(f(xpp)) - float(f(xpm)) - float(f(xmp)) + float(f(xmm))
            ) / (4.0 * hi * hj)
    if not np.all(np.isfinite(W)):
        raise NonFiniteValue("finite-difference Hessian sampled a non-finite value")
    return 0.5 * (W + W.T)


def _fd_cross(f2: Callable[[np.ndarray, np.ndarray], float],
              x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cross second derivatives d2 f / dx_j dy_i as an (len(y), len(x)) array."""
    out = np.empty((y.size, x.size))
    for i in range(y.size):
        hi = _FD_STEP_2 * max(1.0, abs(y[i]))
        for j in range(x.size):
            hj = _FD_STEP_2 * max(1.0, abs(x[j]))
            xp = x.copy(); xp[j] += hj
            xm = x.copy(); xm[j] -= hj
            yp = y.copy(); yp[i] += hi
            ym = y.copy(); ym[i] -= hi
            out[i, j] = (
                float(f2(xp, yp)) - float(f2(xp, ym))
                - float(f2(xm, yp)) + float(f2(xm, ym))
            ) / (4.0 * hi * hj)
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue("finite-difference cross derivative sampled a non-finite value")
    return out


def finite_difference_partials(sys: SystemSpec, s: ContactStateL) -> DerivativeBundle:
    """Evaluate every partial derivative of L at s by central differences.

    First derivatives use step eps^(1/3) * max(1, |coordinate|); second
    derivatives use eps^(1/4) scaling. The Hessian is symmetrized.
    """
    sys.check_state(s)
    q, v, z = s.q, s.qdot, s.z
    L = sys.lagrangian
    dq = _fd_gradient(lambda qq: L(qq, v, z), q)
    dv = _fd_gradient(lambda vv: L(q, vv, z), v)
    dz = _fd_scalar_derivative(lambda zz: L(q, v, zz), z)
    W = _fd_hessian(lambda vv: L(q, vv, z), v)
    dqdv = _fd_cross(lambda qq, vv: L(qq, vv, z), q, v)
    zvec = np.array([z])
    dzdv = _fd_cross(lambda zz, vv: L(q, vv, float(zz[0])), zvec, v).reshape(v.size)
    return DerivativeBundle(dL_dq=dq, dL_dv=dv, dL_dz=dz, W=W,
                            d2L_dqdv=dqdv, d2L_dzdv=dzdv)


def evaluate_partials(sys: SystemSpec, s: ContactStateL) -> DerivativeBundle:
    """Analytic partials where supplied, finite differences for the rest."""
    sys.check_state(s)
    needs_fd = any(
        f is None
        for f in (sys.dL_dq, sys.dL_dv, sys.dL_dz,
                  sys.d2L_dvdv, sys.d2L_dqdv, sys.d2L_dzdv)
    )
    fd = finite_difference_partials(sys, s) if needs_fd else None
    q, v, z = s.q, s.qdot, s.z

    def pick(fn, fallback):
        return fallback if fn is None else fn(q, v, z)

    dq = np.asarray(pick(sys.dL_dq, fd.dL_dq if fd else None), dtype=float)
    dv = np.asarray(pick(sys.dL_dv, fd.dL_dv if fd else None), dtype=float)
    dz = float(pick(sys.dL_dz, fd.dL_dz if fd else None))
    W = np.asarray(pick(sys.d2L_dvdv, fd.W if fd else None), dtype=float)
    dqdv = np.asarray(pick(sys.d2L_dqdv, fd.d2L_dqdv if fd else None), dtype=float)
    dzdv = np.asarray(pick(sys.d2L_dzdv, fd.d2L_dzdv if fd else None), dtype=float)
    for arr, name in ((dq, "dL_dq"), (dv, "dL_dv"), (W, "W"),
                      (dqdv, "d2L_dqdv"), (dzdv, "d2L_dzdv")):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"{name} is not finite at the evaluated state")
    return DerivativeBundle(dL_dq=dq, dL_dv=dv, dL_dz=dz, W=W,
                            d2L_dqdv=dqdv, d2L_dzdv=dzdv)


# ---------------------------------------------------------------------------
# operations


def lagrangian_energy(sys: SystemSpec, s: ContactStateL) -> float:
    """Energy E = qdot . dL/dqdot - L.

    For a natural-form system this equals kinetic + potential + gamma z.
    """
    sys.check_state(s)
    d = evaluate_partials(sys, s)
    return float(s.qdot @ d.dL_dv - sys.value(s.q, s.qdot, s.z))


def _solve_regular(W: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Dense LU solve gated by a relative determinant check."""
    scale = max(1.0, float(np.max(np.abs(W))))
    det = float(np.linalg.det(W))
    if abs(det) <= _REG_TOL * scale ** W.shape[0]:
        raise SingularHessian(
            f"velocity Hessian is numerically singular (det={det:.3e}, scale={scale:.3e})"
        )
    return np.linalg.solve(W, rhs)


def herglotz_rhs(sys: SystemSpec, s: ContactStateL):
    """First-order right-hand side of the Herglotz equations at s.

    Returns (qdot, qddot, zdot) where the acceleration solves

        W qddot = dL/dq - (d2L/dq dv) qdot - (d2L/dz dv) L + (dL/dz) dL/dv

    by a dense linear solve, and zdot = L. Raises SingularHessian when
    the velocity Hessian fails the regularity gate.
    """
    sys.check_state(s)
    d = evaluate_partials(sys, s)
    Lval = sys.value(s.q, s.qdot, s.z)
    rhs = d.dL_dq - d.d2L_dqdv @ s.qdot - d.d2L_dzdv * Lval + d.dL_dz * d.dL_dv
    qddot = _solve_regular(d.W, rhs)
    return s.qdot.copy(), qddot, Lval


def hamiltonian_rhs(sys: HamiltonianSpec, s: ContactStateH):
    """Contact Hamiltonian vector field at s.

    Returns (qdot, pdot, zdot) = (dH/dp, -dH/dq - p dH/dz, p . dH/dp - H).
    """
    sys.check_state(s)
    q, p, z = s.q, s.p, s.z
    Hp = sys.grad_p(q, p, z)
    Hq = sys.grad_q(q, p, z)
    Hz = sys.grad_z(q, p, z)
    H = sys.value(q, p, z)
    if not (np.all(np.isfinite(Hp)) and np.all(np.isfinite(Hq)) and np.isfinite(Hz)):
        raise NonFiniteValue("Hamiltonian partials are not finite at the evaluated state")
    return Hp, -Hq - p * Hz, float(p @ Hp - H)


def legendre_forward(sys: SystemSpec, s: ContactStateL) -> ContactStateH:
    """Legendre transform (q, qdot, z) -> (q, dL/dqdot, z); t is copied."""
    sys.check_state(s)
    d = evaluate_partials(sys, s)
    return ContactStateH(q=s.q, p=d.dL_dv, z=s.z, t=s.t)


def legendre_inverse(sys: SystemSpec, s: ContactStateH,
                     max_iter: int = 50, tol: float = 1e-12) -> ContactStateL:
    """Invert the Legendre transform: recover qdot with dL/dqdot = p.

    Natural-form systems invert the mass matrix directly; otherwise a
    Newton iteration seeded at qdot = p runs until the residual max-norm
    drops below tol (raises NoConvergence after max_iter).
    """
    if s.q.size != sys.n:
        raise DimensionMismatch(f"state has dimension {s.q.size}, system expects {sys.n}")
    if sys.natural is not None:
        M = sys.natural.mass_matrix(s.q)
        try:
            qdot = np.linalg.solve(M, s.p)
        except np.linalg.LinAlgError as e:
            raise SingularMassMatrix(f"mass matrix singular at q={s.q}") from e
        return ContactStateL(q=s.q, qdot=qdot, z=s.z, t=s.t)

    qdot = s.p.copy()
    scale = float(np.max(np.abs(s.p))) if s.p.size else 0.0
    threshold = max(tol, 32.0 * _EPS * scale)
    for _ in range(max_iter):
        trial = ContactStateL(q=s.q, qdot=qdot, z=s.z, t=s.t)
        d = evaluate_partials(sys, trial)
        resid = d.dL_dv - s.p
        if float(np.max(np.abs(resid))) <= threshold:
            return trial
        qdot = qdot - _solve_regular(d.W, resid)
    raise NoConvergence(
        f"Legendre inversion did not converge in {max_iter} Newton iterations"
    )


def hamiltonian_from_lagrangian(sys: SystemSpec) -> HamiltonianSpec:
    """Build the dual contact Hamiltonian H = E_L after Legendre inversion.

    The partials use the exact transform identities dH/dp = qdot,
    dH/dq = -dL/dq and dH/dz = -dL/dz, each evaluated at the recovered
    velocity. Natural-form systems with constant mass and a supplied
    potential gradient get fully closed-form evaluators.
    """
    nat = sys.natural
    if nat is not None and nat.constant_mass:
        M = nat.mass_matrix(np.zeros(sys.n))
        try:
            Minv = np.linalg.inv(M)
        except np.linalg.LinAlgError as e:
            raise SingularMassMatrix("constant mass matrix is singular") from e
        gamma = nat.gamma

        def H(q, p, z):
            return 0.5 * float(p @ (Minv @ p)) + nat.potential_value(q) + gamma * z

        def dH_dq(q, p, z):
            if nat.grad_potential is not None:
                return np.asarray(nat.grad_potential(q), dtype=float)
            if nat.potential is None:
                return np.zeros(sys.n)
            return _fd_gradient(lambda qq: nat.potential_value(qq), q)

        return HamiltonianSpec(
            n=sys.n,
            hamiltonian=H,
            dH_dq=dH_dq,
            dH_dp=lambda q, p, z: Minv @ p,
            dH_dz=lambda q, p, z: gamma,
            minv=lambda q: Minv,
            gamma=gamma,
        )

    def H(q, p, z):
        sl = legendre_inverse(sys, ContactStateH(q=q, p=p, z=z))
        return lagrangian_energy(sys, sl)

    def dH_dq(q, p, z):
        sl = legendre_inverse(sys, ContactStateH(q=q, p=p, z=z))
        return -evaluate_partials(sys, sl).dL_dq

    def dH_dp(q, p, z):
        return legendre_inverse(sys, ContactStateH(q=q, p=p, z=z)).qdot

    def dH_dz(q, p, z):
        sl = legendre_inverse(sys, ContactStateH(q=q, p=p, z=z))
        return -evaluate_partials(sys, sl).dL_dz

    minv = None
    if nat is not None:
        def minv(q, _nat=nat):
            return np.linalg.inv(_nat.mass_matrix(q))

    return HamiltonianSpec(n=sys.n, hamiltonian=H, dH_dq=dH_dq, dH_dp=dH_dp,
                           dH_dz=dH_dz, minv=minv,
                           gamma=None if nat is None else nat.gamma)


def natural_lagrangian_system(n: int, mass, gamma: float = 0.0,
                              potential=None, grad_potential=None) -> SystemSpec:
    """SystemSpec for L = 1/2 qdot^T M(q) qdot - V(q) - gamma z.

    Constant mass plus an available potential gradient yields fully
    analytic partials; a configuration-dependent mass keeps the assembled
    Lagrangian and relies on the finite-difference fallback for the
    q-derivatives it cannot form in closed form.
    """
    nat = NaturalForm(mass=mass, gamma=gamma, potential=potential,
                      grad_potential=grad_potential)

    def L(q, qdot, z):
        M = nat.mass_matrix(q)
        return 0.5 * float(qdot @ (M @ qdot)) - nat.potential_value(q) - gamma * z

    if nat.constant_mass:
        M0 = np.array(nat.mass_matrix(np.zeros(n)), dtype=float)
        if M0.shape != (n, n):
            raise DimensionMismatch(f"mass matrix has shape {M0.shape}, expected ({n}, {n})")

        def dL_dq(q, qdot, z):
            if potential is None:
                return np.zeros(n)
            if grad_potential is not None:
                return -np.asarray(grad_potential(q), dtype=float)
            return -_fd_gradient(lambda qq: nat.potential_value(qq), q)

        return SystemSpec(
            n=n,
            lagrangian=L,
            dL_dq=dL_dq,
            dL_dv=lambda q, qdot, z: M0 @ qdot,
            dL_dz=lambda q, qdot, z: -gamma,
            d2L_dvdv=lambda q, qdot, z: M0,
            d2L_dqdv=lambda q, qdot, z: np.zeros((n, n)),
            d2L_dzdv=lambda q, qdot, z: np.zeros(n),
            natural=nat,
        )

    return SystemSpec(n=n, lagrangian=L, natural=nat)
