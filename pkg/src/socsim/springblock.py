"""Driven spring-block quake lattice in its quasi-static cellular-automaton
form: blocks on an L x L grid carry a scalar pulling force, loaded uniformly
by the plate; a block at or above the failure threshold slips, resets, and
hands fraction alpha of its force to each of its 4 neighbors. Open boundaries
dissipate the transfer that would leave the grid.

Slip-to-zero is the default for determinism; an optional uniform residual in
[0, sigma) can be enabled per state. The quasi-static (extremal) drive
advances the plate exactly until the weakest block fails.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, DivergenceError, DomainError
from .events import CascadeEvent, quake_magnitude
from .rng import Rng, xo_random

DEFAULT_SWEEP_CAP = 10_000_000
DEFAULT_RATE_SCALE = 0.001


@njit(cache=True)
def _grow_i(arr):
    out = np.empty(arr.size * 2, np.int64)
    out[: arr.size] = arr
    return out


@njit(cache=True)
def _grow_f(arr):
    out = np.empty(arr.size * 2, np.float64)
    out[: arr.size] = arr
    return out


@njit(cache=True)
def _relax_force(ff, side, f_th, alpha, residual_sigma, rng_state, cand, n_cand, cap):
    """Relax a flat float64 force grid in place.

    Parallel sweeps: all blocks at/above threshold at sweep start slip
    together; each records its pre-slip force, resets (to 0 or a random
    residual), then transfers alpha * force to each in-grid neighbor.
    Returns slipped flat indices + released forces in sweep order (CSR via
    step_ends), distinct-site count, dissipated boundary transfer, and a
    divergence flag.
    """
    n_sites = side * side
    cur = np.empty(n_sites, np.int64)
    nxt = np.empty(n_sites, np.int64)
    in_next = np.zeros(n_sites, np.uint8)
    slipped = np.zeros(n_sites, np.uint8)
    n_cur = n_cand
    for i in range(n_cand):
        cur[i] = cand[i]
    top_sites = np.empty(1024, np.int64)
    released = np.empty(1024, np.float64)
    step_ends = np.empty(256, np.int64)
    n_top = 0
    n_steps = 0
    area = 0
    boundary_loss = 0.0
    diverged = False
    while n_cur > 0:
        n_unst = 0
        for i in range(n_cur):
            s = cur[i]
            in_next[s] = 0
            if ff[s] >= f_th:
                cur[n_unst] = s
                n_unst += 1
        if n_unst == 0:
            break
        if n_steps >= cap:
            diverged = True
            break
        cur[:n_unst] = np.sort(cur[:n_unst])
        while n_top + n_unst > top_sites.size:
            top_sites = _grow_i(top_sites)
            released = _grow_f(released)
        if n_steps >= step_ends.size:
            step_ends = _grow_i(step_ends)
        # Capture pre-slip forces and reset before any transfer lands.
        for i in range(n_unst):
            s = cur[i]
            released[n_top + i] = ff[s]
            if residual_sigma > 0.0:
                ff[s] = residual_sigma * xo_random(rng_state)
            else:
                ff[s] = 0.0
            if slipped[s] == 0:
                slipped[s] = 1
                area += 1
        n_nxt = 0
        for i in range(n_unst):
            s = cur[i]
            give = alpha * released[n_top + i]
            top_sites[n_top + i] = s
            if in_next[s] == 0:
                in_next[s] = 1
                nxt[n_nxt] = s
                n_nxt += 1
            r = s // side
            c = s - r * side
            if r > 0:
                t = s - side
                ff[t] += give
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += give
            if r < side - 1:
                t = s + side
                ff[t] += give
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += give
            if c > 0:
                t = s - 1
                ff[t] += give
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += give
            if c < side - 1:
                t = s + 1
                ff[t] += give
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += give
        n_top += n_unst
        step_ends[n_steps] = n_top
        n_steps += 1
        tmp = cur
        cur = nxt
        nxt = tmp
        n_cur = n_nxt
    return (top_sites[:n_top].copy(), released[:n_top].copy(),
            step_ends[:n_steps].copy(), area, boundary_loss, diverged)


@dataclass
class SpringBlockState:
    """L x L block lattice; F in units of the failure threshold F_th = 1.

    Stable between operations: 0 <= F < F_th everywhere. alpha <= 0.25 keeps
    the 4-neighbor transfer at most conservative; at exactly 0.25 an interior
    slip redistributes its full force.
    """

    L: int
    F: np.ndarray
    alpha: float
    rng: Rng
    F_th: float = 1.0
    plate_rate: float = 0.0
    rate_scale: float = DEFAULT_RATE_SCALE
    residual_sigma: float = 0.0
    last_drive: tuple = (0.0, 0.0)
    next_event_id: int = 0
    sweep_cap: int = DEFAULT_SWEEP_CAP


def new_springblock(L: int, alpha: float = 0.25, seed: int = 0,
                    residual_sigma: float = 0.0,
                    rate_scale: float = DEFAULT_RATE_SCALE) -> SpringBlockState:
    if L < 2:
        raise ConfigError(f"lattice side must be >= 2, got {L}")
    if not (0.0 < alpha <= 0.25):
        raise ConfigError(f"alpha must be in (0, 0.25], got {alpha}")
    if not (0.0 <= residual_sigma < 1.0):
        raise ConfigError(f"residual sigma must be in [0, 1), got {residual_sigma}")
    rng = Rng(seed)
    F = np.empty((L, L), dtype=np.float64)
    for r in range(L):
        for c in range(L):
            F[r, c] = rng.random()
    return SpringBlockState(L=L, F=F, alpha=alpha, rng=rng,
                            residual_sigma=residual_sigma, rate_scale=rate_scale)


def _quake_event(state: SpringBlockState, top_sites, released, step_ends, area,
                 boundary_loss, diverged, record_steps: bool) -> CascadeEvent:
    if diverged:
        raise DivergenceError(
            f"slip cascade exceeded {state.sweep_cap} sweeps at alpha={state.alpha}"
        )
    size = int(top_sites.size)
    side = state.L
    bounds = np.concatenate((np.zeros(1, dtype=np.int64), step_ends))
    step_sizes = np.diff(bounds).tolist()
    moment = float(released.sum())
    steps = []
    if record_steps:
        for k in range(len(step_sizes)):
            lo, hi = bounds[k], bounds[k + 1]
            steps.append([((int(s) // side, int(s) % side), float(rel))
                          for s, rel in zip(top_sites[lo:hi], released[lo:hi])])
    ev = CascadeEvent(
        event_id=state.next_event_id,
        trigger_site=None,
        size=size,
        area=int(area),
        duration=len(step_sizes),
        boundary_loss=float(boundary_loss),
        magnitude=quake_magnitude(moment, state.F_th),
        steps=steps,
        steps_recorded=record_steps,
        step_sizes=step_sizes,
        moment=moment,
    )
    if size:
        first = int(top_sites[bounds[0]])
        ev.trigger_site = (first // side, first % side)
    state.next_event_id += 1
    return ev


def _load_and_relax(state: SpringBlockState, dF: float, stamp: int | None,
                    record_steps: bool) -> CascadeEvent:
    ff = state.F.reshape(-1)
    if dF > 0.0:
        ff += dF
    if stamp is not None:
        ff[stamp] = state.F_th
    cand = np.flatnonzero(ff >= state.F_th).astype(np.int64)
    out = _relax_force(ff, state.L, state.F_th, state.alpha, state.residual_sigma,
                       state.rng.state_array, cand, cand.size, state.sweep_cap)
    return _quake_event(state, *out, record_steps=record_steps)


def load_step(state: SpringBlockState, dF: float, record_steps: bool = True) -> CascadeEvent:
    """Pull every block by dF (uniform plate loading), then relax."""
    if not math.isfinite(dF) or dF < 0.0:
        raise DomainError(f"load increment must be finite and >= 0, got {dF}")
    return _load_and_relax(state, float(dF), None, record_steps)


def drive_extremal(state: SpringBlockState, record_steps: bool = True) -> CascadeEvent:
    """Quasi-static drive: advance the plate exactly until the weakest block
    fails. Equivalent to load_step with dF = F_th - max(F); the maximal block
    is pinned to the threshold to make the seed slip robust to rounding.
    """
    ff = state.F.reshape(-1)
    idx = int(np.argmax(ff))
    dF = state.F_th - float(ff[idx])
    return _load_and_relax(state, dF, idx, record_steps)


def set_plate_rate(state: SpringBlockState, v: tuple) -> float:
    """Map a 2D drive vector to a scalar plate rate: rate_scale * |v|.

    Only the magnitude affects dynamics; the direction is kept on the state
    for display purposes.
    """
    x, y = float(v[0]), float(v[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"drive vector must be finite, got {v}")
    state.last_drive = (x, y)
    state.plate_rate = state.rate_scale * math.hypot(x, y)
    return state.plate_rate


def is_stable(state: SpringBlockState) -> bool:
    return bool((state.F < state.F_th).all() and (state.F >= 0.0).all())


def total_force(state: SpringBlockState) -> float:
    return float(state.F.sum())


def snapshot_springblock(state: SpringBlockState) -> str:
    """Portable text snapshot: header line, then row-major decimal forces."""
    lines = [f"springblock {state.L} {state.alpha!r}"]
    for row in state.F:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
