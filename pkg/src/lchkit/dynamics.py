"""Hamiltonian flows, chord search by shooting, and numerical oracles.

This is the only module that touches floating point. Flows use fixed-step
fourth-order Runge-Kutta with the sign convention that makes q move along
dH/dp (so the free Hamiltonian |p|^2/2 gives qdot = p), chords are found by
shooting a batch of initial conditions and refining target crossings by
time bisection, and rational bounds are converted to floats with one-ulp
upward rounding so a bound can never be accidentally tightened.

The chord search is a verifier, not a prover: found=False never
contradicts an existence theorem, it only says this grid and horizon did
not exhibit a chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BoundCheck",
    "ChordMissing",
    "ChordResult",
    "Custom",
    "EmptySample",
    "FiberSegment",
    "Free",
    "HamiltonianDef",
    "HitZeroSection",
    "HomogeneousContact",
    "Mechanical",
    "MomentumShell",
    "NoConvergence",
    "NonFinite",
    "PhasePoint",
    "SeparationSampling",
    "ShootingGrid",
    "TimePeriodic",
    "Trajectory",
    "conformal_factor_track",
    "delta_separation",
    "find_chord",
    "integrate",
    "jacobi_length",
    "maupertuis_chord",
    "verify_bound",
]

BISECTION_TOL = 1e-9


class NonFinite(RuntimeError):
    """A trajectory left the representable range."""


class EmptySample(ValueError):
    """A region produced no sample points."""


class ChordMissing(ValueError):
    """verify_bound needs a found chord."""


class NoConvergence(RuntimeError):
    """Path descent did not converge within its iteration cap."""


class HitZeroSection(RuntimeError):
    """A lifted trajectory fell below the momentum floor."""


@dataclass(frozen=True)
class PhasePoint:
    """A point (p, q) in phase space; both are finite n-vectors, n >= 1."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if p.ndim != 1 or p.shape != q.shape or p.size < 1:
            raise ValueError("p and q must be 1-d vectors of equal positive length")
        if not (np.isfinite(p).all() and np.isfinite(q).all()):
            raise ValueError("phase point coordinates must be finite")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.p.size


@dataclass(frozen=True)
class Trajectory:
    """RK4 samples: times (m,), momenta p (m, n), positions q (m, n)."""

    times: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def point(self, idx: int) -> PhasePoint:
        return PhasePoint(self.p[idx], self.q[idx])


# ----------------------------------------------------------------------
# Hamiltonians


class HamiltonianDef:
    """Base contract: value and gradients, vectorized over leading axes."""

    time_dependent = False

    def value(self, t: float, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grads(self, t, p, q) -> tuple[np.ndarray, np.ndarray]:
        """Return (dH/dp, dH/dq), each shaped like p."""
        raise NotImplementedError


@dataclass(frozen=True)
class Free(HamiltonianDef):
    """Kinetic energy |p|^2 / 2."""

    n: int = 2

    def value(self, t, p, q):
        return 0.5 * np.sum(np.asarray(p) ** 2, axis=-1)

    def grads(self, t, p, q):
        return np.asarray(p, dtype=float), np.zeros_like(np.asarray(q, dtype=float))


def _fd_grad(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(x)
    for axis in range(x.shape[-1]):
        shift = np.zeros(x.shape[-1])
        shift[axis] = h
        out[..., axis] = (f(x + shift) - f(x - shift)) / (2.0 * h)
    return out


@dataclass(frozen=True)
class Mechanical(HamiltonianDef):
    """H = |p|^2 / 2 + U(q), with analytic or finite-difference dU."""

    potential: Callable[[np.ndarray], np.ndarray]
    grad_potential: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-6

    def value(self, t, p, q):
        return 0.5 * np.sum(np.asarray(p) ** 2, axis=-1) + self.potential(np.asarray(q))

    def grads(self, t, p, q):
        q = np.asarray(q, dtype=float)
        if self.grad_potential is not None:
            du = self.grad_potential(q)
        else:
            du = _fd_grad(self.potential, q, self.fd_step)
        return np.asarray(p, dtype=float), du


@dataclass(frozen=True)
class HomogeneousContact(HamiltonianDef):
    """The 1-homogeneous lift H(P, q) = |P| * h(P/|P|, q).

    h is evaluated on unit momenta; gradients are central finite
    differences of the full lift, so any smooth h works unmodified.
    """

    h: Callable[[np.ndarray, np.ndarray], np.ndarray]
    fd_step: float = 1e-6

    def value(self, t, p, q):
        p = np.asarray(p, dtype=float)
        norms = np.linalg.norm(p, axis=-1)
        safe = np.where(norms > 0, norms, 1.0)
        return norms * self.h(p / safe[..., None], np.asarray(q, dtype=float))

    def grads(self, t, p, q):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        dp = _fd_grad(lambda pp: self.value(t, pp, q), p, self.fd_step)
        dq = _fd_grad(lambda qq: self.value(t, p, qq), q, self.fd_step)
        return dp, dq


@dataclass(frozen=True)
class TimePeriodic(HamiltonianDef):
    """base + perturbation(t, q), period 1 in t.

    dpert_dt is the analytic time derivative, used only by callers that
    need sup |dH/dt| (the flow itself never differentiates in t).
    """

    base: HamiltonianDef
    perturbation: Callable[[float, np.ndarray], np.ndarray]
    grad_perturbation: Callable[[float, np.ndarray], np.ndarray] | None = None
    dpert_dt: Callable[[float, np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-6
    time_dependent = True

    def value(self, t, p, q):
        q = np.asarray(q, dtype=float)
        return self.base.value(t, p, q) + self.perturbation(t, q)

    def grads(self, t, p, q):
        q = np.asarray(q, dtype=float)
        dp, dq = self.base.grads(t, p, q)
        if self.grad_perturbation is not None:
            dq = dq + self.grad_perturbation(t, q)
        else:
            dq = dq + _fd_grad(lambda qq: self.perturbation(t, qq), q, self.fd_step)
        return dp, dq


# ----------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class FiberSegment:
    """Momentum window over a single base point: {(p, x) : s_lo <= |p| <= s_hi}."""

    x: tuple[float, ...]
    s_lo: float
    s_hi: float

    def __post_init__(self) -> None:
        if not 0 < self.s_lo <= self.s_hi:
            raise ValueError("need 0 < s_lo <= s_hi")

    def distance(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        x = np.asarray(self.x)
        dq = np.linalg.norm(np.asarray(q) - x, axis=-1)
        norms = np.linalg.norm(np.asarray(p), axis=-1)
        shortfall = np.maximum(0.0, np.maximum(self.s_lo - norms, norms - self.s_hi))
        return np.hypot(dq, shortfall)

    def crossing(self, p, q, qdot, pdot) -> np.ndarray:
        """Zero at closest approach of the base point: d/dt |q - x|^2 / 2."""
        return np.sum((np.asarray(q) - np.asarray(self.x)) * qdot, axis=-1)


@dataclass(frozen=True)
class MomentumShell:
    """The level set {|p| = s} over every base point."""

    s: float

    def __post_init__(self) -> None:
        if self.s <= 0:
            raise ValueError("shell radius must be positive")

    def distance(self, p, q) -> np.ndarray:
        return np.abs(np.linalg.norm(np.asarray(p), axis=-1) - self.s)

    def crossing(self, p, q, qdot, pdot) -> np.ndarray:
        return np.linalg.norm(np.asarray(p), axis=-1) - self.s


@dataclass(frozen=True)
class Custom:
    """User-defined region: membership predicate plus distance estimator.

    No smooth crossing function is assumed; the search brackets local
    minima of the distance estimator instead. Sources must supply explicit
    launch samples.
    """

    predicate: Callable[[PhasePoint], bool]
    distance_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    samples: tuple[PhasePoint, ...] = ()

    def distance(self, p, q) -> np.ndarray:
        return self.distance_fn(np.asarray(p), np.asarray(q))

    crossing = None


RegionDef = FiberSegment | MomentumShell | Custom


# ----------------------------------------------------------------------
# integration


def _rhs(H: HamiltonianDef, t: float, p: np.ndarray, q: np.ndarray):
    dp, dq = H.grads(t, p, q)
    return dp, -dq  # (qdot, pdot)


def _rk4_step(H: HamiltonianDef, t: float, p, q, dt: float):
    k1q, k1p = _rhs(H, t, p, q)
    k2q, k2p = _rhs(H, t + dt / 2, p + dt / 2 * k1p, q + dt / 2 * k1q)
    k3q, k3p = _rhs(H, t + dt / 2, p + dt / 2 * k2p, q + dt / 2 * k2q)
    k4q, k4p = _rhs(H, t + dt, p + dt * k3p, q + dt * k3q)
    return (
        p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p),
        q + dt / 6 * (k1q + 2 * k2q + 2 * k3q + k4q),
    )


def _time_grid(t0: float, t1: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    span = t1 - t0
    n = max(1, math.ceil(abs(span) / step - 1e-12))
    return np.linspace(t0, t1, n + 1)


def integrate(
    H: HamiltonianDef, x0: PhasePoint, t0: float, t1: float, step: float
) -> Trajectory:
    """Fixed-step RK4 samples of the flow from t0 to t1 (either direction)."""
    times = _time_grid(t0, t1, step)
    m = times.size
    ps = np.empty((m, x0.n))
    qs = np.empty((m, x0.n))
    ps[0], qs[0] = x0.p, x0.q
    for k in range(m - 1):
        ps[k + 1], qs[k + 1] = _rk4_step(
            H, times[k], ps[k], qs[k], times[k + 1] - times[k]
        )
        if not (np.isfinite(ps[k + 1]).all() and np.isfinite(qs[k + 1]).all()):
            raise NonFinite(f"state left the finite range at t = {times[k + 1]:.6g}")
    return Trajectory(times, ps, qs)


# ----------------------------------------------------------------------
# separation


@dataclass(frozen=True)
class SeparationSampling:
    """Sampling density for region extrema: a box of base points, momentum
    directions, radii across a fiber window, and time slices for periodic
    Hamiltonians."""

    q_center: tuple[float, ...]
    q_halfwidth: tuple[float, ...]
    q_per_axis: int = 41
    directions: int = 64
    radii: int = 9
    t_samples: int = 1


def _direction_set(n: int, count: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        angles = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    rng = np.random.default_rng(20260819)
    vecs = rng.normal(size=(count, n))
    return vecs / np.linalg.norm(vecs, axis=-1, keepdims=True)


def _region_samples(region: RegionDef, sampling: SeparationSampling):
    """(p, q) sample arrays covering the region within the sampling window."""
    if isinstance(region, MomentumShell):
        center = np.asarray(sampling.q_center, dtype=float)
        half = np.asarray(sampling.q_halfwidth, dtype=float)
        axes = [
            np.linspace(c - h, c + h, sampling.q_per_axis)
            for c, h in zip(center, half)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        qs = np.stack([m.ravel() for m in mesh], axis=-1)
        dirs = _direction_set(center.size, sampling.directions)
        p = (region.s * dirs)[None, :, :] * np.ones((qs.shape[0], 1, 1))
        q = qs[:, None, :] * np.ones((1, dirs.shape[0], 1))
        return p.reshape(-1, center.size), q.reshape(-1, center.size)
    if isinstance(region, FiberSegment):
        x = np.asarray(region.x, dtype=float)
        dirs = _direction_set(x.size, sampling.directions)
        radii = np.linspace(region.s_lo, region.s_hi, max(2, sampling.radii))
        if region.s_lo == region.s_hi:
            radii = np.array([region.s_lo])
        p = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, x.size)
        q = np.broadcast_to(x, p.shape).copy()
        return p, q
    if isinstance(region, Custom):
        if not region.samples:
            raise EmptySample("custom region supplies no samples")
        p = np.stack([pt.p for pt in region.samples])
        q = np.stack([pt.q for pt in region.samples])
        return p, q
    raise TypeError(f"unknown region kind {type(region).__name__}")


def delta_separation(
    H: HamiltonianDef,
    Y0: RegionDef,
    Y1: RegionDef,
    sampling: SeparationSampling,
) -> float:
    """Sampled inf over Y1 of H minus sup over Y0 of H.

    For time-dependent H the extrema include a grid of time slices over
    one period. Accuracy is the caller's sampling density.
    """
    p0, q0 = _region_samples(Y0, sampling)
    p1, q1 = _region_samples(Y1, sampling)
    if p0.size == 0 or p1.size == 0:
        raise EmptySample("empty region sample")
    times = (
        np.linspace(0.0, 1.0, sampling.t_samples, endpoint=False)
        if H.time_dependent
        else np.array([0.0])
    )
    sup0 = max(float(np.max(H.value(t, p0, q0))) for t in times)
    inf1 = min(float(np.min(H.value(t, p1, q1))) for t in times)
    return inf1 - sup0


# ----------------------------------------------------------------------
# chord search


@dataclass(frozen=True)
class ShootingGrid:
    """Launch grid: radii across the source window, momentum directions,
    and start times across one period for time-dependent Hamiltonians."""

    radii: int = 9
    angles: int = 181
    t0_samples: int = 1
    seed: int = 0


@dataclass(frozen=True)
class ChordResult:
    found: bool
    start: PhasePoint | None
    t0: float
    T: float
    end_residual: float
    trajectory: Trajectory | None
    message: str = ""


def _launch_states(source: RegionDef, grid: ShootingGrid):
    if isinstance(source, FiberSegment):
        x = np.asarray(source.x, dtype=float)
        if source.s_lo == source.s_hi:
            radii = np.array([source.s_lo])
        else:
            radii = np.linspace(source.s_lo, source.s_hi, grid.radii)
        if x.size == 2:
            dirs = _direction_set(2, grid.angles)
        else:
            rng = np.random.default_rng(grid.seed)
            vecs = rng.normal(size=(grid.angles, x.size))
            dirs = vecs / np.linalg.norm(vecs, axis=-1, keepdims=True)
        p = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, x.size)
        q = np.broadcast_to(x, p.shape).copy()
        return p, q
    if isinstance(source, Custom):
        if not source.samples:
            raise EmptySample("custom source supplies no launch samples")
        p = np.stack([pt.p for pt in source.samples])
        q = np.stack([pt.q for pt in source.samples])
        return p, q
    raise TypeError(
        "chord search launches from FiberSegment or Custom sources; shells "
        "have no canonical sample grid"
    )


def _regions_disjoint(source: RegionDef, target: RegionDef) -> bool:
    if isinstance(source, FiberSegment) and isinstance(target, FiberSegment):
        if np.allclose(source.x, target.x):
            return source.s_hi < target.s_lo or target.s_hi < source.s_lo
        return True
    if isinstance(source, MomentumShell) and isinstance(target, MomentumShell):
        return source.s != target.s
    return True  # mixed kinds: trust the caller


def _crossing_values(target, t, p, q, H):
    qdot, pdot = _rhs(H, t, p, q)
    return target.crossing(p, q, qdot, pdot)


def _bisect_hit(H, target, t_lo: float, p0, q0, dt: float, c_lo):
    """Refine one bracketed crossing inside [t_lo, t_lo + dt].

    Probes integrate a single RK4 step of size tau from the stored state,
    which keeps the local error at O(dt^5) while bisecting to BISECTION_TOL.
    """

    def state_at(tau: float):
        if tau == 0.0:
            return p0, q0
        return _rk4_step(H, t_lo, p0, q0, tau)

    lo, hi = 0.0, dt
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        pm, qm = state_at(mid)
        cm = float(_crossing_values(target, t_lo + mid, pm, qm, H))
        if (cm < 0) == (c_lo < 0) and cm != 0.0:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    pm, qm = state_at(tau)
    return tau, pm, qm


def _minimize_distance(H, target, t_lo: float, p0, q0, dt: float):
    """Golden-section search for the distance minimum inside [t_lo, t_lo + dt].

    Used for Custom targets, which provide a distance estimator but no
    smooth crossing function.
    """
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def dist_at(tau: float) -> float:
        if tau == 0.0:
            pm, qm = p0, q0
        else:
            pm, qm = _rk4_step(H, t_lo, p0, q0, tau)
        return float(target.distance(pm, qm))

    lo, hi = 0.0, dt
    a = hi - inv_phi * (hi - lo)
    b = lo + inv_phi * (hi - lo)
    fa, fb = dist_at(a), dist_at(b)
    while hi - lo > BISECTION_TOL:
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = hi - inv_phi * (hi - lo)
            fa = dist_at(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + inv_phi * (hi - lo)
            fb = dist_at(b)
    tau = 0.5 * (lo + hi)
    pm, qm = (p0, q0) if tau == 0.0 else _rk4_step(H, t_lo, p0, q0, tau)
    return tau, pm, qm


def find_chord(
    H: HamiltonianDef,
    source: RegionDef,
    target: RegionDef,
    horizon: float,
    grid: ShootingGrid,
    tol: float,
    step: float = 1e-3,
) -> ChordResult:
    """Shoot a batch from the source and report the shortest verified hit.

    A hit is a bisection-refined crossing whose distance to the target is
    at most tol. Results are merged by (T, start-time index, grid index),
    so repeated runs are identical. found=False reports the best residual
    the sweep saw; it means "search exhausted", never "no chord exists".
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if not _regions_disjoint(source, target):
        raise ValueError("source and target regions must be disjoint")
    p_init, q_init = _launch_states(source, grid)
    m = p_init.shape[0]
    t0_list = (
        np.linspace(0.0, 1.0, grid.t0_samples, endpoint=False)
        if H.time_dependent
        else np.array([0.0])
    )

    best: tuple[float, int, int] | None = None  # (T, t0 index, traj index)
    best_state: tuple[np.ndarray, np.ndarray, float, float] | None = None
    best_residual = math.inf
    best_residual_idx = (0, 0)

    n_steps = max(1, math.ceil(horizon / step - 1e-12))
    dt = horizon / n_steps
    refine_window = 10.0 * tol
    smooth = target.crossing is not None

    for t0_idx, t0 in enumerate(t0_list):
        p, q = p_init.copy(), q_init.copy()
        d_prev = target.distance(p, q)
        if smooth:
            c_prev = _crossing_values(target, t0, p, q, H)
        else:
            c_prev = np.full(m, -1.0)  # pretend approaching, so early dips bracket
        hit_this_t0 = None
        for k in range(n_steps):
            t_k = t0 + k * dt
            p_prev, q_prev = p, q
            p, q = _rk4_step(H, t_k, p, q, dt)
            if not np.isfinite(p).all() or not np.isfinite(q).all():
                bad = ~(np.isfinite(p).all(axis=-1) & np.isfinite(q).all(axis=-1))
                p = p.copy()
                q = q.copy()
                p[bad], q[bad] = p_prev[bad], q_prev[bad]  # freeze blown-up rows
            d_now = target.distance(p, q)
            if smooth:
                c_now = _crossing_values(target, t_k + dt, p, q, H)
            else:
                c_now = d_now - d_prev
            step_min = float(np.min(d_now))
            if step_min < best_residual:
                idx = int(np.argmin(d_now))
                best_residual = step_min
                best_residual_idx = (t0_idx, idx)
            flips = np.nonzero(
                ((c_prev < 0) != (c_now < 0)) | (c_prev == 0.0)
            )[0]
            candidates = [
                i for i in flips
                if min(d_prev[i], d_now[i]) <= refine_window
                or min(d_prev[i], d_now[i]) <= 2.0 * step_min + tol
            ]
            resolved = []
            for i in candidates:
                if smooth:
                    tau, pm, qm = _bisect_hit(
                        H, target, t_k, p_prev[i], q_prev[i], dt, float(c_prev[i])
                    )
                else:
                    tau, pm, qm = _minimize_distance(
                        H, target, t_k, p_prev[i], q_prev[i], dt
                    )
                residual = float(target.distance(pm, qm))
                if residual < best_residual:
                    best_residual = residual
                    best_residual_idx = (t0_idx, int(i))
                if residual <= tol:
                    resolved.append((k * dt + tau, int(i), pm, qm, residual))
            if resolved:
                resolved.sort(key=lambda r: (r[0], r[1]))
                T, i, pm, qm, residual = resolved[0]
                hit_this_t0 = (T, i, pm, qm, residual)
                break
            c_prev, d_prev = c_now, d_now
        if hit_this_t0 is not None:
            T, i, pm, qm, residual = hit_this_t0
            key = (T, t0_idx, i)
            if best is None or key < best:
                best = key
                best_state = (p_init[i], q_init[i], residual, t0)

    if best is None:
        t0_idx, idx = best_residual_idx
        return ChordResult(
            found=False,
            start=PhasePoint(p_init[idx], q_init[idx]),
            t0=float(t0_list[t0_idx]),
            T=math.inf,
            end_residual=best_residual,
            trajectory=None,
            message=(
                f"search exhausted: {m} starts x {len(t0_list)} start times, "
                f"horizon {horizon:g}, step {dt:g}; best residual "
                f"{best_residual:.3e}"
            ),
        )

    T, t0_idx, i = best
    p_start, q_start, residual, best_t0 = best_state
    start = PhasePoint(p_start, q_start)
    trajectory = integrate(H, start, best_t0, best_t0 + T, step)
    return ChordResult(
        found=True,
        start=start,
        t0=float(best_t0),
        T=T,
        end_residual=residual,
        trajectory=trajectory,
        message=f"hit with residual {residual:.3e}",
    )


# ----------------------------------------------------------------------
# bound verification


@dataclass(frozen=True)
class BoundCheck:
    passed: bool
    T: float
    bound: float
    slack: float


def _float_up(value: Fraction | float) -> float:
    """Convert a rational bound to float, rounding one ulp toward +inf.

    Python's Fraction-to-float conversion rounds to nearest, which could
    round a bound down; nudging up keeps the comparison conservative.
    """
    f = float(value)
    return math.nextafter(f, math.inf)


def verify_bound(result: ChordResult, bound: Fraction | float, slack: float = 0.0) -> BoundCheck:
    """Pass iff the found chord's time-length is at most bound*(1+slack)."""
    if not result.found:
        raise ChordMissing("no chord to verify; the search reported " + result.message)
    limit = _float_up(bound) * (1.0 + slack)
    return BoundCheck(
        passed=result.T <= limit,
        T=result.T,
        bound=_float_up(bound),
        slack=slack,
    )


# ----------------------------------------------------------------------
# fixed-energy chords via path descent


def jacobi_length(
    U: Callable[[np.ndarray], np.ndarray], C: float, path: np.ndarray
) -> float:
    """Discrete conformal length sum sqrt(2 (C - U(mid))) |dx| along a path."""
    mids = 0.5 * (path[1:] + path[:-1])
    seglens = np.linalg.norm(np.diff(path, axis=0), axis=-1)
    speeds2 = 2.0 * (C - np.asarray(U(mids), dtype=float))
    if np.any(speeds2 <= 0):
        raise ValueError("energy level must exceed the potential along the path")
    return float(np.sum(np.sqrt(speeds2) * seglens))


def maupertuis_chord(
    U: Callable[[np.ndarray], np.ndarray],
    C: float,
    x0: Sequence[float],
    x1: Sequence[float],
    nodes: int = 33,
    maxiter: int = 2000,
) -> ChordResult:
    """Fixed-energy chord from x0 to x1 by minimizing the conformal length.

    Descends the discretized length functional from the straight segment
    (interior nodes free, endpoints pinned), then lifts the minimizing path
    to the energy level {H = C} by |p| = sqrt(2 (C - U)) along the tangent.
    The time-length is the sum of segment length over speed.
    """
    from scipy.optimize import minimize

    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    n = x0.size
    if nodes < 3:
        raise ValueError("need at least 3 path nodes")
    straight = np.linspace(x0, x1, nodes)
    if np.any(2.0 * (C - np.asarray(U(straight), dtype=float)) <= 0):
        raise ValueError("energy level must exceed the potential near the segment")

    def objective(flat: np.ndarray) -> float:
        path = np.vstack([x0, flat.reshape(nodes - 2, n), x1])
        return jacobi_length(U, C, path)

    res = minimize(
        objective,
        straight[1:-1].ravel(),
        method="L-BFGS-B",
        # maxfun must outrun maxiter: the finite-difference gradient costs
        # dim+1 evaluations per iteration.
        options={
            "maxiter": maxiter,
            "maxfun": maxiter * (straight[1:-1].size + 2),
            "ftol": 1e-12,
            "gtol": 1e-9,
        },
    )
    if not res.success and res.status != 1:  # status 1: iteration cap
        raise NoConvergence(res.message)
    if not res.success:
        raise NoConvergence(f"no convergence after {maxiter} iterations")
    path = np.vstack([x0, res.x.reshape(nodes - 2, n), x1])

    mids = 0.5 * (path[1:] + path[:-1])
    seglens = np.linalg.norm(np.diff(path, axis=0), axis=-1)
    speeds = np.sqrt(2.0 * (C - np.asarray(U(mids), dtype=float)))
    T = float(np.sum(seglens / speeds))

    # Lift: momentum along the tangent with |p| = speed at each node.
    tangents = np.empty_like(path)
    tangents[0] = path[1] - path[0]
    tangents[-1] = path[-1] - path[-2]
    tangents[1:-1] = path[2:] - path[:-2]
    tangents /= np.linalg.norm(tangents, axis=-1, keepdims=True)
    node_speeds = np.sqrt(2.0 * (C - np.asarray(U(path), dtype=float)))
    momenta = node_speeds[:, None] * tangents
    times = np.concatenate([[0.0], np.cumsum(seglens / speeds)])
    return ChordResult(
        found=True,
        start=PhasePoint(momenta[0], path[0]),
        t0=0.0,
        T=T,
        end_residual=0.0,
        trajectory=Trajectory(times, momenta, path),
        message=f"path descent: {res.nit} iterations, length {res.fun:.9g}",
    )


# ----------------------------------------------------------------------
# conformal factor of lifted contact flows


def conformal_factor_track(
    h: HomogeneousContact,
    starts: Sequence[PhasePoint],
    horizon: float,
    step: float,
    floor: float = 1e-9,
) -> float:
    """Max of |P(t)| / |P(0)| over the given unit-momentum starts.

    Raises HitZeroSection if any trajectory's momentum falls below the
    floor, where the homogeneous lift stops being meaningful.
    """
    if not starts:
        raise EmptySample("no start points")
    worst = 0.0
    for pt in starts:
        traj = integrate(h, pt, 0.0, horizon, step)
        norms = np.linalg.norm(traj.p, axis=-1)
        if float(np.min(norms)) < floor:
            raise HitZeroSection(
                f"momentum fell below {floor:g} along a tracked trajectory"
            )
        worst = max(worst, float(np.max(norms) / norms[0]))
    return worst
