"""Adaptive explicit Runge-Kutta integration with dense output and events.

The stepper is the Dormand-Prince 5(4) embedded pair: the 5th-order
solution is propagated, the embedded 4th-order solution drives step-size
control, and each accepted step carries the standard quartic interpolant
so the state can be evaluated anywhere inside the step. The choice is
fixed (no runtime solver selection) so a given configuration reproduces
its output bit for bit.

Event handling localizes the first interior-to-exterior crossing of a
switching surface h(q) = 0 (admissible region h > 0) on the dense
interpolant with a bisection-safeguarded secant, then projects the state
exactly onto the surface along the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    ExteriorState,
    GrazingContact,
    MaxStepsExceeded,
    NoConvergence,
    NonFiniteValue,
    NoSignChange,
    StepSizeUnderflow,
)

__all__ = [
    "StepperConfig",
    "EventConfig",
    "DenseSegment",
    "EventHit",
    "SmoothRun",
    "step",
    "integrate_until_event",
    "locate_event",
]

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b - bhat: weights for the embedded error estimate.
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])
# Weights of the quartic dense-output correction term.
_D = np.array([
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ORDER_EXP = -1.0 / 5.0

# Interior checkpoints per accepted step for event sign monitoring.
_N_CHECK = 16

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class StepperConfig:
    rtol: float = 1e-10
    atol: float = 1e-10
    h_init: float = 1e-3
    h_max: float = 1.0
    max_steps: int = 1_000_000

    def __post_init__(self):
        for name in ("rtol", "atol", "h_init", "h_max"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"StepperConfig.{name} must be > 0")
        if self.max_steps < 1:
            raise ValueError("StepperConfig.max_steps must be >= 1")


@dataclass(frozen=True)
class EventConfig:
    t_tol: float = 1e-12
    h_tol: float = 1e-12
    direction: int = -1           # only interior -> exterior (h decreasing)
    grazing_threshold: float = 1e-9
    arm_threshold: float = 1e-9   # guard re-arms once h exceeds this

    def __post_init__(self):
        for name in ("t_tol", "h_tol", "grazing_threshold", "arm_threshold"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"EventConfig.{name} must be > 0")
        if self.direction != -1:
            raise ValueError("only direction=-1 (decreasing h) is supported")


class DenseSegment:
    """Quartic interpolant over one accepted step, possibly truncated.

    The interpolant is built on the full step [t_base, t_base + h_step];
    the valid window [t0, t1] may end earlier when an event cut the step
    short. Evaluation at exactly t0 or t1 returns the stored endpoint
    states, so knot evaluations reproduce them bit for bit.
    """

    __slots__ = ("t_base", "h_step", "t0", "t1", "y0", "y1",
                 "_r2", "_r3", "_r4", "_r5")

    def __init__(self, t_base, h_step, y_start, y_end, f_start, f_end, k_weighted):
        self.t_base = float(t_base)
        self.h_step = float(h_step)
        self.t0 = float(t_base)
        self.t1 = float(t_base + h_step)
        self.y0 = np.array(y_start, dtype=float)
        self.y1 = np.array(y_end, dtype=float)
        r2 = self.y1 - self.y0
        r3 = self.h_step * f_start - r2
        r4 = r2 - self.h_step * f_end - r3
        self._r2 = r2
        self._r3 = r3
        self._r4 = r4
        self._r5 = self.h_step * k_weighted

    def _theta(self, t: float) -> float:
        return (t - self.t_base) / self.h_step

    def eval(self, t: float) -> np.ndarray:
        if t == self.t0:
            return self.y0.copy()
        if t == self.t1:
            return self.y1.copy()
        th = self._theta(t)
        om = 1.0 - th
        return self.y0 + th * (self._r2 + om * (self._r3 + th * (self._r4 + om * self._r5)))

    def eval_derivative(self, t: float) -> np.ndarray:
        """Time derivative of the interpolant (used for grazing tests)."""
        th = self._theta(t)
        d = (self._r2
             + (1.0 - 2.0 * th) * self._r3
             + (2.0 * th - 3.0 * th * th) * self._r4
             + (2.0 * th - 6.0 * th * th + 4.0 * th ** 3) * self._r5)
        return d / self.h_step

    def truncated(self, t_end: float, y_end: np.ndarray) -> "DenseSegment":
        """Copy of this segment whose valid window stops at t_end."""
        seg = DenseSegment.__new__(DenseSegment)
        seg.t_base = self.t_base
        seg.h_step = self.h_step
        seg.t0 = self.t0
        seg.t1 = float(t_end)
        seg.y0 = self.y0
        seg.y1 = np.array(y_end, dtype=float)
        seg._r2 = self._r2
        seg._r3 = self._r3
        seg._r4 = self._r4
        seg._r5 = self._r5
        return seg


def _error_ratio(err: np.ndarray, y0: np.ndarray, y1: np.ndarray,
                 cfg: StepperConfig) -> float:
    """Componentwise |error| / (atol + rtol max(|y0|, |y1|)), max over components."""
    scale = cfg.atol + cfg.rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.abs(err) / scale))


def step(rhs: Callable, t: float, y: np.ndarray, cfg: StepperConfig,
         h_try: Optional[float] = None, f0: Optional[np.ndarray] = None):
    """One accepted Dormand-Prince 5(4) step with error control.

    Attempts h_try (default cfg.h_init), shrinking on rejection until the
    componentwise local error estimate passes atol + rtol * |state|.

    Returns (t_new, y_new, segment, h_accepted, h_next, f_new); f_new is
    the derivative at the new state (FSAL), reusable as the next f0.
    """
    y = np.asarray(y, dtype=float)
    if f0 is None:
        f0 = np.asarray(rhs(t, y), dtype=float)
    if not np.all(np.isfinite(f0)):
        raise NonFiniteValue(f"right-hand side is not finite at t={t}")
    h = float(h_try if h_try is not None else cfg.h_init)
    h = min(h, cfg.h_max)
    k = np.empty((7, y.size))
    k[0] = f0
    while True:
        if h < 16.0 * _EPS * max(1.0, abs(t)):
            raise StepSizeUnderflow(f"step size underflow at t={t} (h={h:.3e})")
        for i in range(1, 7):
            yi = y + h * sum(a * k[j] for j, a in enumerate(_A[i]))
            k[i] = rhs(t + _C[i] * h, yi)
        y1 = y + h * (_B @ k)
        if not np.all(np.isfinite(y1)):
            h *= 0.5
            continue
        err = h * (_E @ k)
        ratio = _error_ratio(err, y, y1, cfg)
        if ratio <= 1.0:
            break
        factor = max(_MIN_FACTOR, _SAFETY * ratio ** _ORDER_EXP)
        h *= factor
    if ratio == 0.0:
        factor = _MAX_FACTOR
    else:
        factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * ratio ** _ORDER_EXP))
    h_next = min(cfg.h_max, h * factor)
    f_new = k[6].copy()  # FSAL: stage 7 is rhs at (t + h, y1)
    seg = DenseSegment(t, h, y, y1, k[0], f_new, _D @ k)
    return t + h, y1, seg, h, h_next, f_new


@dataclass(frozen=True)
class EventHit:
    """A localized surface crossing: time, state (projected onto h = 0),
    and the normal speed dh/dt at the hit."""

    t: float
    y: np.ndarray
    hdot: float


@dataclass
class SmoothRun:
    """One smooth flow phase: dense segments from t0 until an event or the
    horizon. ``hit`` is None when the horizon was reached."""

    t0: float
    t1: float
    y0: np.ndarray
    y1: np.ndarray
    segments: list
    hit: Optional[EventHit]
    n_steps: int


def _project_to_surface(q: np.ndarray, surface) -> np.ndarray:
    """Single Newton step moving q onto h = 0 along grad h."""
    g = surface.gradient(q)
    return q - (surface.value(q) / float(g @ g)) * g


def locate_event(segment: DenseSegment, surface, ev: EventConfig,
                 n_q: Optional[int] = None,
                 bracket: Optional[tuple] = None,
                 max_iter: int = 200) -> EventHit:
    """Localize the first h(q) = 0 crossing inside a dense segment.

    Scans checkpoints for a sign change (h > 0 before, h <= 0 after)
    unless a bracket is supplied, then refines with a bisection-
    safeguarded secant until both |h| <= h_tol and the bracket width is
    below t_tol. Raises NoSignChange when h never leaves the admissible
    side, and GrazingContact when the crossing is tangential
    (|dh/dt| below the grazing threshold).
    """
    def h_at(t: float) -> float:
        y = segment.eval(t)
        q = y[:n_q] if n_q is not None else y
        return float(surface.value(q))

    if bracket is None:
        ts = np.linspace(segment.t0, segment.t1, _N_CHECK + 1)
        vals = [h_at(t) for t in ts]
        found = None
        for i in range(1, len(ts)):
            if vals[i - 1] > 0.0 >= vals[i]:
                found = (float(ts[i - 1]), float(ts[i]))
                break
        if found is None:
            raise NoSignChange("h(q) does not cross zero on this segment")
        a, b = found
    else:
        a, b = float(bracket[0]), float(bracket[1])
    fa, fb = h_at(a), h_at(b)
    if not (fa > 0.0 >= fb):
        raise NoSignChange(f"bracket does not straddle the surface: h={fa:.3e}, {fb:.3e}")

    t_root, f_root = b, fb
    converged = False
    for it in range(max_iter):
        if (b - a) <= ev.t_tol and abs(f_root) <= ev.h_tol:
            converged = True
            break
        # secant candidate on even iterations, forced bisection on odd ones
        # so the bracket provably shrinks (plain regula falsi can stagnate)
        t_mid = 0.5 * (a + b)
        t_sec = t_mid
        if it % 2 == 0 and fb != fa:
            cand = b - fb * (b - a) / (fb - fa)
            if a < cand < b:
                t_sec = cand
        if t_sec <= a or t_sec >= b:
            # bracket is at the spacing floor of double precision
            converged = True
            break
        f_sec = h_at(t_sec)
        if f_sec > 0.0:
            a, fa = t_sec, f_sec
        else:
            b, fb = t_sec, f_sec
        t_root, f_root = b, fb
    if not converged:
        raise NoConvergence("event localization exceeded its iteration budget")

    y_root = segment.eval(t_root)
    q = y_root[:n_q] if n_q is not None else y_root
    ydot = segment.eval_derivative(t_root)
    qdot = ydot[:n_q] if n_q is not None else ydot
    hdot = float(surface.gradient(q) @ qdot)
    if abs(hdot) < ev.grazing_threshold:
        raise GrazingContact(
            f"tangential boundary encounter at t={t_root} (dh/dt={hdot:.3e})"
        )
    # only interior -> exterior crossings are events
    if hdot > 0.0:
        raise NoSignChange("crossing has increasing h; not an exit event")
    q_proj = _project_to_surface(q, surface)
    y_hit = y_root.copy()
    if n_q is not None:
        y_hit[:n_q] = q_proj
    else:
        y_hit = q_proj
    return EventHit(t=float(t_root), y=y_hit, hdot=hdot)


def integrate_until_event(rhs: Callable, t0: float, y0: np.ndarray, t_final: float,
                          surface=None, cfg: Optional[StepperConfig] = None,
                          ev: Optional[EventConfig] = None,
                          n_q: Optional[int] = None,
                          armed: bool = True) -> SmoothRun:
    """Integrate the smooth flow until the surface fires or t_final.

    With surface=None this is plain adaptive integration to t_final.
    ``n_q`` gives the length of the leading configuration block of the
    state vector (h and grad h see only q). ``armed=False`` starts with
    the guard disarmed, for resuming just after an impact; it re-arms
    once h(q) exceeds the arm threshold.

    The start state must be strictly interior (h > 0) when armed;
    exterior states are a hard error, never clamped.
    """
    cfg = cfg or StepperConfig()
    ev = ev or EventConfig()
    y = np.asarray(y0, dtype=float)
    t = float(t0)

    def h_of(yv: np.ndarray) -> float:
        q = yv[:n_q] if n_q is not None else yv
        return float(surface.value(q))

    if surface is not None and armed and h_of(y) <= 0.0:
        raise ExteriorState(
            f"start state is not strictly interior (h={h_of(y):.3e} at t={t})"
        )

    segments: list = []
    f_curr = np.asarray(rhs(t, y), dtype=float)
    h_try = min(cfg.h_init, max(t_final - t, _EPS))
    steps = 0
    while t < t_final:
        if steps >= cfg.max_steps:
            raise MaxStepsExceeded(f"exceeded {cfg.max_steps} steps at t={t}")
        h_try = min(h_try, t_final - t)
        t_new, y_new, seg, _, h_next, f_new = step(rhs, t, y, cfg, h_try, f_curr)
        steps += 1
        if abs(t_final - t_new) <= 4.0 * _EPS * max(1.0, abs(t_final)):
            # snap onto the horizon; the mismatch is below step roundoff
            t_new = t_final
            seg.t1 = t_final
        if surface is not None:
            ts = np.linspace(seg.t0, seg.t1, _N_CHECK + 1)
            hs = [h_of(seg.eval(tc)) for tc in ts]
            start = 0
            if not armed:
                for i, hv in enumerate(hs):
                    if hv > ev.arm_threshold:
                        armed = True
                        start = i
                        break
            if armed:
                bracket = None
                for i in range(max(start, 1), len(ts)):
                    if hs[i - 1] > 0.0 >= hs[i]:
                        bracket = (float(ts[i - 1]), float(ts[i]))
                        break
                if bracket is not None:
                    hit = locate_event(seg, surface, ev, n_q=n_q, bracket=bracket)
                    segments.append(seg.truncated(hit.t, hit.y))
                    return SmoothRun(t0=float(t0), t1=hit.t, y0=np.asarray(y0, float),
                                     y1=hit.y.copy(), segments=segments, hit=hit,
                                     n_steps=steps)
        segments.append(seg)
        t, y, f_curr, h_try = t_new, y_new, f_new, h_next
    return SmoothRun(t0=float(t0), t1=t, y0=np.asarray(y0, float), y1=y.copy(),
                     segments=segments, hit=None, n_steps=steps)
