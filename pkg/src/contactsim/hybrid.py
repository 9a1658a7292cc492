"""Flow -> guard -> reset orchestration and trajectory records.

A hybrid system here is a smooth contact flow (Lagrangian or Hamiltonian)
on the interior of an admissible region, a switching surface h(q) = 0,
and an impact resolver applied whenever the flow reaches the surface
moving outward. ``simulate`` alternates smooth integration with impact
resolution and records every piece: dense segments for later sampling
and one event record per impact with both one-sided limits.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .core import (
    ContactStateH,
    ContactStateL,
    HamiltonianSpec,
    SystemSpec,
    hamiltonian_rhs,
    herglotz_rhs,
)
from .errors import (
    ContactSimError,
    ExteriorState,
    GrazingContact,
    TimeOutOfRange,
)
from .impact import (
    ImpactResult,
    SwitchingSurface,
    resolve_impact_hamiltonian,
    resolve_impact_natural,
    resolve_impact_newton,
)
from .integrate import EventConfig, StepperConfig, integrate_until_event

__all__ = [
    "HybridSystem",
    "ImpactEvent",
    "TrajectorySegment",
    "HybridTrajectory",
    "SampleTable",
    "simulate",
    "sample",
    "COMPLETED",
    "ZENO_SUSPECTED",
    "GRAZING_STOP",
    "EVENT_BUDGET_EXHAUSTED",
]

COMPLETED = "Completed"
ZENO_SUSPECTED = "ZenoSuspected"
GRAZING_STOP = "GrazingStop"
EVENT_BUDGET_EXHAUSTED = "EventBudgetExhausted"

# Zeno guard: this many consecutive events, each within 100 * t_tol of the
# previous one, stop the run.
_ZENO_STREAK = 50
_ZENO_GAP_FACTOR = 100.0

FLAG_FLOW = 0
FLAG_PRE_IMPACT = 1
FLAG_POST_IMPACT = 2


@dataclass(frozen=True)
class HybridSystem:
    """Dynamics + switching surface + impact resolver selection.

    ``resolver`` is one of "natural", "newton", "hamiltonian", or a
    callable (dynamics, state_minus, surface) -> ImpactResult for
    experiments that need a nonstandard reset.
    """

    dynamics: Union[SystemSpec, HamiltonianSpec]
    surface: SwitchingSurface
    resolver: Union[str, Callable] = "natural"

    @property
    def formulation(self) -> str:
        return "lagrangian" if isinstance(self.dynamics, SystemSpec) else "hamiltonian"

    @property
    def n(self) -> int:
        return self.dynamics.n

    def state_from_vector(self, y: np.ndarray, t: float):
        if self.formulation == "lagrangian":
            return ContactStateL.from_vector(y, self.n, t)
        return ContactStateH.from_vector(y, self.n, t)

    def rhs(self) -> Callable:
        n = self.n
        if self.formulation == "lagrangian":
            sys = self.dynamics

            def f(t, y):
                s = ContactStateL.from_vector(y, n, t)
                qdot, qddot, zdot = herglotz_rhs(sys, s)
                return np.concatenate([qdot, qddot, [zdot]])
        else:
            sys = self.dynamics

            def f(t, y):
                s = ContactStateH.from_vector(y, n, t)
                qdot, pdot, zdot = hamiltonian_rhs(sys, s)
                return np.concatenate([qdot, pdot, [zdot]])
        return f

    def resolve(self, state_minus, ev: EventConfig) -> ImpactResult:
        if callable(self.resolver):
            return self.resolver(self.dynamics, state_minus, self.surface)
        if self.resolver == "natural":
            return resolve_impact_natural(self.dynamics, state_minus, self.surface,
                                          grazing_threshold=ev.grazing_threshold)
        if self.resolver == "newton":
            return resolve_impact_newton(self.dynamics, state_minus, self.surface,
                                         grazing_threshold=ev.grazing_threshold)
        if self.resolver == "hamiltonian":
            return resolve_impact_hamiltonian(self.dynamics, self.surface, state_minus,
                                              grazing_threshold=ev.grazing_threshold)
        raise ValueError(f"unknown impact resolver {self.resolver!r}")


@dataclass(frozen=True)
class ImpactEvent:
    """One impact: time, location, both one-sided limits, multiplier,
    and the resolver's residuals."""

    index: int
    t: float
    q: np.ndarray
    state_minus: Union[ContactStateL, ContactStateH]
    state_plus: Union[ContactStateL, ContactStateH]
    lam: float
    residual_tangential: float
    residual_energy: float


@dataclass
class TrajectorySegment:
    """One smooth flow phase with its dense interpolants."""

    t0: float
    t1: float
    y0: np.ndarray
    y1: np.ndarray
    dense: list

    def eval(self, t: float) -> np.ndarray:
        if t == self.t0:
            return self.y0.copy()
        if t == self.t1:
            return self.y1.copy()
        knots = [d.t0 for d in self.dense]
        i = bisect.bisect_right(knots, t) - 1
        i = min(max(i, 0), len(self.dense) - 1)
        return self.dense[i].eval(t)


@dataclass
class HybridTrajectory:
    """Ordered smooth segments separated by impact events."""

    formulation: str
    n: int
    segments: List[TrajectorySegment] = field(default_factory=list)
    events: List[ImpactEvent] = field(default_factory=list)
    status: str = COMPLETED

    @property
    def t0(self) -> float:
        return self.segments[0].t0

    @property
    def t_end(self) -> float:
        return self.segments[-1].t1

    def state_at(self, t: float, side: int = +1):
        """State vector at time t; ``side`` picks the limit at event times
        (-1 pre-impact, +1 post-impact)."""
        if not self.segments:
            raise TimeOutOfRange("trajectory is empty")
        if t < self.t0 or t > self.t_end:
            raise TimeOutOfRange(
                f"t={t} outside trajectory span [{self.t0}, {self.t_end}]"
            )
        starts = [seg.t0 for seg in self.segments]
        i = bisect.bisect_right(starts, t) - 1
        i = max(i, 0)
        if side < 0 and i > 0 and t == self.segments[i].t0:
            i -= 1
        return self.segments[i].eval(t)

    def sample(self, times: Sequence[float]) -> "SampleTable":
        return sample(self, times)


@dataclass
class SampleTable:
    """Sampled states: one row per time, two rows (both limits) at event
    times. ``flags`` is 0 for flow samples, 1 pre-impact, 2 post-impact."""

    times: np.ndarray
    states: np.ndarray
    flags: np.ndarray


def sample(traj: HybridTrajectory, times: Sequence[float]) -> SampleTable:
    """Evaluate the trajectory at the requested times from dense segments.

    At an event time both one-sided limits are reported, pre before post.
    Raises TimeOutOfRange for times outside the trajectory span.
    """
    event_times = {ev.t: ev for ev in traj.events}
    rows_t, rows_y, rows_f = [], [], []
    for t in np.asarray(times, dtype=float).reshape(-1):
        ev = event_times.get(float(t))
        if ev is not None:
            rows_t.append(t)
            rows_y.append(ev.state_minus.as_vector())
            rows_f.append(FLAG_PRE_IMPACT)
            rows_t.append(t)
            rows_y.append(ev.state_plus.as_vector())
            rows_f.append(FLAG_POST_IMPACT)
        else:
            rows_t.append(t)
            rows_y.append(traj.state_at(float(t)))
            rows_f.append(FLAG_FLOW)
    return SampleTable(times=np.array(rows_t),
                       states=np.array(rows_y),
                       flags=np.array(rows_f, dtype=np.int8))


def simulate(hs: HybridSystem, s0, t_final: float,
             cfg: Optional[StepperConfig] = None,
             ev: Optional[EventConfig] = None,
             max_events: int = 10 ** 6) -> HybridTrajectory:
    """Run the hybrid loop from s0 until t_final or a terminal condition.

    The start state must be strictly interior. Returns the trajectory
    with status Completed, ZenoSuspected, GrazingStop, or
    EventBudgetExhausted. Integrator and impact errors propagate,
    annotated with the index of the event being processed.
    """
    cfg = cfg or StepperConfig()
    ev = ev or EventConfig()
    expected = ContactStateL if hs.formulation == "lagrangian" else ContactStateH
    if not isinstance(s0, expected):
        raise TypeError(
            f"initial state must be {expected.__name__} for the "
            f"{hs.formulation} formulation"
        )
    hs.dynamics.check_state(s0)
    if hs.surface.value(s0.q) <= 0.0:
        raise ExteriorState(
            f"initial state must be strictly interior (h={hs.surface.value(s0.q):.3e})"
        )
    if not t_final > s0.t:
        raise ValueError(f"t_final={t_final} must exceed the start time {s0.t}")

    rhs = hs.rhs()
    traj = HybridTrajectory(formulation=hs.formulation, n=hs.n)
    t = float(s0.t)
    y = s0.as_vector()
    armed = True
    zeno_streak = 0

    while True:
        try:
            run = integrate_until_event(rhs, t, y, t_final, hs.surface, cfg, ev,
                                        n_q=hs.n, armed=armed)
        except GrazingContact:
            traj.status = GRAZING_STOP
            return traj
        except ContactSimError as e:
            raise type(e)(f"{e} [flow phase after event {len(traj.events)}]") from e
        traj.segments.append(TrajectorySegment(
            t0=run.t0, t1=run.t1, y0=run.y0, y1=run.y1, dense=run.segments))
        if run.hit is None:
            traj.status = COMPLETED
            return traj

        state_minus = hs.state_from_vector(run.hit.y, run.hit.t)
        try:
            result = hs.resolve(state_minus, ev)
        except GrazingContact:
            traj.status = GRAZING_STOP
            return traj
        except ContactSimError as e:
            raise type(e)(f"{e} [impact event {len(traj.events)}]") from e

        event = ImpactEvent(
            index=len(traj.events),
            t=run.hit.t,
            q=state_minus.q,
            state_minus=state_minus,
            state_plus=result.state_plus,
            lam=result.lam,
            residual_tangential=result.residual_tangential,
            residual_energy=result.residual_energy,
        )
        if traj.events and (event.t - traj.events[-1].t) < _ZENO_GAP_FACTOR * ev.t_tol:
            zeno_streak += 1
        else:
            zeno_streak = 1
        traj.events.append(event)
        if zeno_streak >= _ZENO_STREAK:
            traj.status = ZENO_SUSPECTED
            return traj
        if len(traj.events) >= max_events:
            traj.status = EVENT_BUDGET_EXHAUSTED
            return traj

        t = run.hit.t
        y = result.state_plus.as_vector()
        armed = False
