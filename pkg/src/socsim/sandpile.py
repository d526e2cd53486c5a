"""Grain-pile criticality models: the 2D threshold sandpile and the 1D
slope-threshold (Oslo-style) pile driven from one end.

Both relax by parallel sweeps: every currently supercritical site topples
once per sweep, which defines the event duration. Boundaries are open; grains
pushed off-lattice are dissipated and accounted as boundary loss. The 2D
model's final state is independent of toppling order, so the parallel choice
is purely a duration convention.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, DivergenceError, DomainError
from .events import CascadeEvent, pile_magnitude
from .rng import Rng, xo_next, _U64

DEFAULT_SWEEP_CAP = 10_000_000


@njit(cache=True)
def _grow(arr):
    out = np.empty(arr.size * 2, arr.dtype)
    out[: arr.size] = arr
    return out


@njit(cache=True)
def _relax_grid(zf, height, width, z_c, cand, n_cand, cap):
    """Relax a flat int64 grid in place.

    cand[:n_cand] are unique flat indices that may be supercritical; only
    sites reachable from them can topple. Returns the toppled flat indices in
    sweep order (CSR via step_ends), the distinct-site count, grains lost at
    the boundary, and a divergence flag.
    """
    n_sites = height * width
    cur = np.empty(n_sites, np.int64)
    nxt = np.empty(n_sites, np.int64)
    in_next = np.zeros(n_sites, np.uint8)
    toppled = np.zeros(n_sites, np.uint8)
    n_cur = n_cand
    for i in range(n_cand):
        cur[i] = cand[i]
    top_sites = np.empty(1024, np.int64)
    step_ends = np.empty(256, np.int64)
    n_top = 0
    n_steps = 0
    area = 0
    boundary_loss = 0
    diverged = False
    while n_cur > 0:
        # Filter candidates against pre-sweep heights; clears dedupe flags.
        n_unst = 0
        for i in range(n_cur):
            s = cur[i]
            in_next[s] = 0
            if zf[s] >= z_c:
                cur[n_unst] = s
                n_unst += 1
        if n_unst == 0:
            break
        if n_steps >= cap:
            diverged = True
            break
        cur[:n_unst] = np.sort(cur[:n_unst])
        while n_top + n_unst > top_sites.size:
            top_sites = _grow(top_sites)
        if n_steps >= step_ends.size:
            step_ends = _grow(step_ends)
        n_nxt = 0
        for i in range(n_unst):
            s = cur[i]
            zf[s] -= z_c
            top_sites[n_top] = s
            n_top += 1
            if toppled[s] == 0:
                toppled[s] = 1
                area += 1
            if in_next[s] == 0:
                in_next[s] = 1
                nxt[n_nxt] = s
                n_nxt += 1
            r = s // width
            c = s - r * width
            if r > 0:
                t = s - width
                zf[t] += 1
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += 1
            if r < height - 1:
                t = s + width
                zf[t] += 1
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += 1
            if c > 0:
                t = s - 1
                zf[t] += 1
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += 1
            if c < width - 1:
                t = s + 1
                zf[t] += 1
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
            else:
                boundary_loss += 1
        step_ends[n_steps] = n_top
        n_steps += 1
        tmp = cur
        cur = nxt
        nxt = tmp
        n_cur = n_nxt
    return top_sites[:n_top].copy(), step_ends[:n_steps].copy(), area, boundary_loss, diverged


@njit(cache=True)
def _relax_oslo(h, s_c, rng_state, cand, n_cand, cap):
    """Relax the 1D pile in place: while slope(i) > s_c[i], move one grain
    from column i to i+1 (off the open right edge at the last column) and
    redraw s_c[i] uniformly from {1, 2}. Parallel sweeps, columns in
    ascending order within a sweep (fixes the RNG consumption order).
    """
    length = h.size
    cur = np.empty(length, np.int64)
    nxt = np.empty(length, np.int64)
    in_next = np.zeros(length, np.uint8)
    toppled = np.zeros(length, np.uint8)
    n_cur = n_cand
    for i in range(n_cand):
        cur[i] = cand[i]
    top_sites = np.empty(256, np.int64)
    step_ends = np.empty(256, np.int64)
    n_top = 0
    n_steps = 0
    area = 0
    boundary_loss = 0
    diverged = False
    while n_cur > 0:
        n_unst = 0
        for i in range(n_cur):
            s = cur[i]
            in_next[s] = 0
            right = h[s + 1] if s + 1 < length else 0
            if h[s] - right > s_c[s]:
                cur[n_unst] = s
                n_unst += 1
        if n_unst == 0:
            break
        if n_steps >= cap:
            diverged = True
            break
        cur[:n_unst] = np.sort(cur[:n_unst])
        while n_top + n_unst > top_sites.size:
            top_sites = _grow(top_sites)
        if n_steps >= step_ends.size:
            step_ends = _grow(step_ends)
        n_nxt = 0
        for i in range(n_unst):
            s = cur[i]
            h[s] -= 1
            if s + 1 < length:
                h[s + 1] += 1
            else:
                boundary_loss += 1
            s_c[s] = np.int64(1) + np.int64(xo_next(rng_state) & _U64(1))
            top_sites[n_top] = s
            n_top += 1
            if toppled[s] == 0:
                toppled[s] = 1
                area += 1
            lo = s - 1 if s > 0 else 0
            hi = s + 1 if s + 1 < length else s
            for t in range(lo, hi + 1):
                if in_next[t] == 0:
                    in_next[t] = 1
                    nxt[n_nxt] = t
                    n_nxt += 1
        step_ends[n_steps] = n_top
        n_steps += 1
        tmp = cur
        cur = nxt
        nxt = tmp
        n_cur = n_nxt
    return top_sites[:n_top].copy(), step_ends[:n_steps].copy(), area, boundary_loss, diverged


@dataclass
class SandpileState:
    """2D grid of integer grain counts with toppling threshold z_c.

    Stable between operations: every site satisfies z < z_c. total_grains
    tracks sum(z) exactly. At z_c == 4 (the default, matching the 2D
    coordination number) toppling is conservative in the bulk and per-event
    grain balance is exact: grains_before + 1 == grains_after + boundary_loss.
    """

    width: int
    height: int
    z_c: int
    z: np.ndarray
    rng: Rng
    total_grains: int = 0
    next_event_id: int = 0
    sweep_cap: int = DEFAULT_SWEEP_CAP


@dataclass
class OsloPileState:
    """1D pile of column heights h with quenched random critical slopes.

    Stable between operations: h[i] - h[i+1] <= s_c[i] everywhere, with
    h[length] == 0 at the open right edge. Driven only at column 0; grains
    leave only past the last column.
    """

    length: int
    h: np.ndarray
    s_c: np.ndarray
    rng: Rng
    next_event_id: int = 0
    sweep_cap: int = DEFAULT_SWEEP_CAP


def new_sandpile(width: int, height: int, z_c: int = 4, seed: int = 0) -> SandpileState:
    if width < 1 or height < 1:
        raise ConfigError(f"grid dimensions must be >= 1, got {width}x{height}")
    if z_c < 1:
        raise ConfigError(f"toppling threshold must be >= 1, got {z_c}")
    z = np.zeros((height, width), dtype=np.int64)
    return SandpileState(width=width, height=height, z_c=z_c, z=z, rng=Rng(seed))


def new_oslo(length: int, seed: int = 0) -> OsloPileState:
    if length < 1:
        raise ConfigError(f"pile length must be >= 1, got {length}")
    rng = Rng(seed)
    h = np.zeros(length, dtype=np.int64)
    s_c = np.empty(length, dtype=np.int64)
    for i in range(length):
        s_c[i] = 1 + rng.randbelow(2)
    return OsloPileState(length=length, h=h, s_c=s_c, rng=rng)


def _grid_event(state: SandpileState, trigger, top_sites, step_ends, area,
                boundary_loss, diverged, record_steps: bool) -> CascadeEvent:
    if diverged:
        raise DivergenceError(
            f"relaxation exceeded {state.sweep_cap} sweeps; "
            f"check z_c={state.z_c} against the neighbor count and boundaries"
        )
    size = int(top_sites.size)
    width = state.width
    bounds = np.concatenate((np.zeros(1, dtype=np.int64), step_ends))
    step_sizes = np.diff(bounds).tolist()
    steps = []
    if record_steps:
        released = state.z_c
        for k in range(len(step_sizes)):
            chunk = top_sites[bounds[k]:bounds[k + 1]]
            steps.append([((int(s) // width, int(s) % width), released) for s in chunk])
    state.total_grains -= int(boundary_loss)
    ev = CascadeEvent(
        event_id=state.next_event_id,
        trigger_site=trigger,
        size=size,
        area=int(area),
        duration=len(step_sizes),
        boundary_loss=int(boundary_loss),
        magnitude=pile_magnitude(size),
        steps=steps,
        steps_recorded=record_steps,
        step_sizes=step_sizes,
    )
    state.next_event_id += 1
    return ev


def add_grain(state: SandpileState, site: tuple, record_steps: bool = True) -> CascadeEvent:
    """Drop one grain at `site` = (row, col) and relax to stability."""
    r, c = site
    if not (0 <= r < state.height and 0 <= c < state.width):
        raise DomainError(f"site {site} outside {state.height}x{state.width} grid")
    state.z[r, c] += 1
    state.total_grains += 1
    zf = state.z.reshape(-1)
    cand = np.array([r * state.width + c], dtype=np.int64)
    out = _relax_grid(zf, state.height, state.width, state.z_c, cand, 1, state.sweep_cap)
    return _grid_event(state, (int(r), int(c)), *out, record_steps=record_steps)


def drive_sandpile(state: SandpileState, n: int, record_steps: bool = True) -> list:
    """Add n grains at uniformly random sites (row drawn first, then column)."""
    if n < 0:
        raise DomainError(f"grain count must be >= 0, got {n}")
    events = []
    for _ in range(n):
        r = state.rng.randbelow(state.height)
        c = state.rng.randbelow(state.width)
        events.append(add_grain(state, (r, c), record_steps=record_steps))
    return events


def _oslo_event(state: OsloPileState, top_sites, step_ends, area, boundary_loss,
                diverged, record_steps: bool) -> CascadeEvent:
    if diverged:
        raise DivergenceError(f"pile relaxation exceeded {state.sweep_cap} sweeps")
    size = int(top_sites.size)
    bounds = np.concatenate((np.zeros(1, dtype=np.int64), step_ends))
    step_sizes = np.diff(bounds).tolist()
    steps = []
    if record_steps:
        for k in range(len(step_sizes)):
            chunk = top_sites[bounds[k]:bounds[k + 1]]
            steps.append([((int(s),), 1) for s in chunk])
    ev = CascadeEvent(
        event_id=state.next_event_id,
        trigger_site=(0,),
        size=size,
        area=int(area),
        duration=len(step_sizes),
        boundary_loss=int(boundary_loss),
        magnitude=pile_magnitude(size),
        steps=steps,
        steps_recorded=record_steps,
        step_sizes=step_sizes,
    )
    state.next_event_id += 1
    return ev


def add_grain_oslo(state: OsloPileState, record_steps: bool = True) -> CascadeEvent:
    """Drop one grain on column 0 and relax to stability."""
    state.h[0] += 1
    cand = np.array([0], dtype=np.int64)
    out = _relax_oslo(state.h, state.s_c, state.rng.state_array, cand, 1, state.sweep_cap)
    return _oslo_event(state, *out, record_steps=record_steps)


def drive_oslo(state: OsloPileState, n: int, record_steps: bool = True) -> list:
    if n < 0:
        raise DomainError(f"grain count must be >= 0, got {n}")
    return [add_grain_oslo(state, record_steps=record_steps) for _ in range(n)]


def relax(state, record_steps: bool = True) -> CascadeEvent:
    """Relax an arbitrarily prepared (bounded-supercritical) state to stability."""
    if isinstance(state, SandpileState):
        zf = state.z.reshape(-1)
        cand = np.flatnonzero(zf >= state.z_c).astype(np.int64)
        # Callers may have edited z directly; resync the grain ledger first.
        state.total_grains = int(state.z.sum())
        out = _relax_grid(zf, state.height, state.width, state.z_c, cand,
                          cand.size, state.sweep_cap)
        return _grid_event(state, None, *out, record_steps=record_steps)
    if isinstance(state, OsloPileState):
        right = np.concatenate((state.h[1:], np.zeros(1, dtype=np.int64)))
        cand = np.flatnonzero(state.h - right > state.s_c).astype(np.int64)
        out = _relax_oslo(state.h, state.s_c, state.rng.state_array, cand,
                          cand.size, state.sweep_cap)
        ev = _oslo_event(state, *out, record_steps=record_steps)
        ev.trigger_site = None
        return ev
    raise DomainError(f"relax does not handle {type(state).__name__}")


def is_stable(state) -> bool:
    if isinstance(state, SandpileState):
        return bool((state.z < state.z_c).all())
    right = np.concatenate((state.h[1:], np.zeros(1, dtype=np.int64)))
    return bool((state.h - right <= state.s_c).all())


def snapshot_sandpile(state: SandpileState) -> str:
    """Portable text snapshot: header line, then row-major integer rows."""
    lines = [f"sandpile {state.width} {state.height} {state.z_c}"]
    for row in state.z:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def snapshot_oslo(state: OsloPileState) -> str:
    lines = [f"oslo {state.length}", " ".join(str(int(v)) for v in state.h)]
    return "\n".join(lines) + "\n"


def parse_snapshot(text: str) -> np.ndarray:
    """Parse a grid snapshot back into an integer array (tests and tooling)."""
    lines = [ln for ln in text.strip().split("\n") if ln]
    header = lines[0].split()
    if header[0] == "sandpile":
        width, height = int(header[1]), int(header[2])
        grid = np.array([[int(v) for v in ln.split()] for ln in lines[1:]], dtype=np.int64)
        if grid.shape != (height, width):
            raise ConfigError(f"snapshot body {grid.shape} does not match header")
        return grid
    if header[0] == "oslo":
        return np.array([int(v) for v in lines[1].split()], dtype=np.int64)
    raise ConfigError(f"unknown snapshot header {header[0]!r}")
