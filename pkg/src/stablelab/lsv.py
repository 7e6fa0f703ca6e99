"""Intermittent interval maps with an indifferent fixed point at 0.

The map family on [0,1], parametrized by gamma in [0,1):

    T(x) = (2^gamma x^gamma + 1) x   for x < 1/2
    T(x) = 2x - 1                    for x >= 1/2

has a unique a.c. invariant probability measure whose density behaves
like x^(-gamma) near 0 and is bounded away from zero elsewhere.  This
module provides the map, orbit drivers, equilibrium sampling, and the
first-return (induced) system on Y = [1/2, 1], including the backward
ladder x_j of left-branch preimages of 1/2 that organizes return times.

Point convention: x = 1/2 is assigned to the right branch (T(1/2) = 0);
the choice is measure zero and only matters for exact-dyadic starts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

POLE_HIT_DISTANCE = 1e-300  # closer approaches are treated as landing on a pole
DEFAULT_RETURN_CAP = 10 ** 9
DEFAULT_BURN_IN = 10 ** 4


@dataclass(frozen=True)
class LsvMap:
    """Immutable descriptor of one intermittent map."""

    gamma: float

    def __post_init__(self):
        g = float(self.gamma)
        if not (0.0 <= g < 1.0):
            raise ValueError(f"gamma must lie in [0, 1), got {g}")


@dataclass(frozen=True)
class IntervalState:
    x: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0):
            raise ValueError(f"interval state must lie in [0, 1], got {self.x}")


@dataclass(frozen=True)
class InducedPartition:
    """Backward ladder of the first-return system on Y = [1/2, 1].

    x_ladder[j] = x_j, the j-th left-branch preimage of 1/2 (x_0 = 1/2),
    strictly decreasing toward 0.  y_ladder[j-1] = y_j = (1 + x_{j-1})/2,
    so T(y_j) = x_{j-1}.  The cell with return time exactly j is
    C_j = (y_j, y_{j-1}) with y_0 = 1; their lengths sum to 1 - y_J,
    which increases to 1/2 as the depth J grows.
    """

    gamma: float
    x_ladder: np.ndarray = field(repr=False)
    y_ladder: np.ndarray = field(repr=False)

    @property
    def depth(self) -> int:
        return len(self.y_ladder)

    def cell(self, j: int) -> tuple[float, float]:
        """Open interval (y_j, y_{j-1}) of points with first return time j."""
        if not 1 <= j <= self.depth:
            raise ValueError(f"cell index must be in 1..{self.depth}")
        hi = 1.0 if j == 1 else self.y_ladder[j - 2]
        return (self.y_ladder[j - 1], hi)

    def cell_lengths(self) -> np.ndarray:
        edges = np.concatenate(([1.0], self.y_ladder))
        return edges[:-1] - edges[1:]


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@nb.njit(cache=True, inline="always")
def _step(x, gamma, c):
    if x < 0.5:
        return (c * x ** gamma + 1.0) * x
    return 2.0 * x - 1.0


@nb.njit(cache=True)
def _iterate(x, gamma, n):
    c = 2.0 ** gamma
    for _ in range(n):
        x = _step(x, gamma, c)
    return x


@nb.njit(cache=True)
def _burn_in_batch(xs, gamma, n):
    c = 2.0 ** gamma
    out = np.empty_like(xs)
    for i in range(xs.shape[0]):
        x = xs[i]
        for _ in range(n):
            x = _step(x, gamma, c)
        out[i] = x
    return out


@nb.njit(cache=True)
def _first_return(x, gamma, cap):
    """Least k >= 1 with T^k(x) in [1/2, 1]; (-1, x) if cap is exceeded."""
    c = 2.0 ** gamma
    for k in range(1, cap + 1):
        x = _step(x, gamma, c)
        if x >= 0.5:
            return k, x
    return -1, x


@nb.njit(cache=True)
def _collect_returns(y, gamma, count, cap):
    """Successive first-return times along the induced orbit started at y."""
    out = np.empty(count, dtype=np.int64)
    c = 2.0 ** gamma
    for i in range(count):
        r = 0
        while True:
            y = _step(y, gamma, c)
            r += 1
            if y >= 0.5:
                break
            if r >= cap:
                out[i] = -1
                return out, y
        out[i] = r
    return out, y


@nb.njit(cache=True, inline="always")
def _phi_interval(x, locs, coefs, p, shift):
    v = shift
    dmin = 1.0
    for i in range(locs.shape[0]):
        d = abs(x - locs[i])
        if d < dmin:
            dmin = d
        v += coefs[i] * d ** (-p)
    return v, dmin


@nb.njit(cache=True)
def _birkhoff_prefix_grid(x, gamma, locs, coefs, p, shift, grid):
    """S(n) = sum_{j=1..n} phi(T^j x) recorded at each n in grid.

    Returns (sums, min pole distance seen).  grid must be ascending.
    """
    c = 2.0 ** gamma
    out = np.empty(grid.shape[0], dtype=np.float64)
    s = 0.0
    g = 0
    dmin_all = 1.0
    nmax = grid[-1]
    for j in range(1, nmax + 1):
        x = _step(x, gamma, c)
        v, dmin = _phi_interval(x, locs, coefs, p, shift)
        if dmin < dmin_all:
            dmin_all = dmin
        s += v
        if j == grid[g]:
            out[g] = s
            g += 1
    return out, dmin_all


@nb.njit(cache=True)
def _induced_prefix_grid(y, gamma, locs, coefs, p, shift, grid, cap):
    """Sums of the induced observable over m = grid[k] induced steps.

    The induced observable is the excursion sum Phi(y) = sum_{t<R} phi(T^t y);
    the driver accumulates sum_{j=1..m} Phi(F^j y).  Also returns the total
    number of raw steps consumed and the min pole distance.
    """
    c = 2.0 ** gamma
    out = np.empty(grid.shape[0], dtype=np.float64)
    s = 0.0
    g = 0
    raw = 0
    dmin_all = 1.0
    mmax = grid[-1]
    for j in range(1, mmax + 1):
        # one induced step: advance to the next visit of Y, summing phi en route
        exc = 0.0
        r = 0
        while True:
            y = _step(y, gamma, c)
            v, dmin = _phi_interval(y, locs, coefs, p, shift)
            if dmin < dmin_all:
                dmin_all = dmin
            exc += v
            r += 1
            if y >= 0.5:
                break
            if r >= cap:
                out[g:] = np.nan
                return out, raw, dmin_all
        raw += r
        s += exc
        if j == grid[g]:
            out[g] = s
            g += 1
    return out, raw, dmin_all


@nb.njit(cache=True)
def _induced_values(y, gamma, locs, coefs, p, shift, count, cap):
    """phi evaluated at successive induced-map images F^j(y), j = 1..count.

    For poles inside Y this is the heavy-tailed observable of the induced
    system (the excursion spends all intermediate time outside Y where the
    restricted observable vanishes).
    """
    c = 2.0 ** gamma
    out = np.empty(count, dtype=np.float64)
    for j in range(count):
        r = 0
        while True:
            y = _step(y, gamma, c)
            r += 1
            if y >= 0.5:
                break
            if r >= cap:
                out[j:] = np.nan
                return out, y
        v, _ = _phi_interval(y, locs, coefs, p, shift)
        out[j] = v
    return out, y


@nb.njit(cache=True)
def _mean_phi(x, gamma, locs, coefs, p, shift, n):
    c = 2.0 ** gamma
    s = 0.0
    for _ in range(n):
        x = _step(x, gamma, c)
        v, _ = _phi_interval(x, locs, coefs, p, shift)
        s += v
    return s / n


@nb.njit(cache=True)
def _mean_phi_induced(y, gamma, locs, coefs, p, shift, n, cap):
    c = 2.0 ** gamma
    s = 0.0
    for _ in range(n):
        r = 0
        while True:
            y = _step(y, gamma, c)
            r += 1
            if y >= 0.5:
                break
            if r >= cap:
                return np.nan
        v, _ = _phi_interval(y, locs, coefs, p, shift)
        s += v
    return s / n


@nb.njit(cache=True)
def _maxabs_prefix_grid(y, gamma, locs, coefs, p, shift, center, grid, cap):
    """Running max of |sum_{i<=j} (phi(F^i y) - center)| sampled at grid."""
    c = 2.0 ** gamma
    out = np.empty(grid.shape[0], dtype=np.float64)
    s = 0.0
    m = 0.0
    g = 0
    mmax = grid[-1]
    for j in range(1, mmax + 1):
        r = 0
        while True:
            y = _step(y, gamma, c)
            r += 1
            if y >= 0.5:
                break
            if r >= cap:
                out[g:] = np.nan
                return out
        v, _ = _phi_interval(y, locs, coefs, p, shift)
        s += v - center
        a = abs(s)
        if a > m:
            m = a
        if j == grid[g]:
            out[g] = m
            g += 1
    return out


@nb.njit(cache=True)
def _occupation_fraction(x, gamma, n):
    """Fraction of the orbit T^j x, j=1..n, that lands in Y = [1/2, 1]."""
    c = 2.0 ** gamma
    hits = 0
    for _ in range(n):
        x = _step(x, gamma, c)
        if x >= 0.5:
            hits += 1
    return hits / n


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def lsv_apply(m: LsvMap, x: float) -> float:
    """One application of the map; total on [0,1]."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"state out of range: {x}")
    if x < 0.5:
        return (2.0 ** m.gamma * x ** m.gamma + 1.0) * x
    return 2.0 * x - 1.0


def lsv_orbit(m: LsvMap, x0: float, n: int, accumulator=None):
    """Stream the orbit x0 -> T x0 -> ... -> T^n x0.

    The accumulator (if given) is called on each of the n successive
    images and its values are summed; per-step storage is never kept.
    Returns (final_state, total).
    """
    if n < 1:
        raise ValueError("orbit length must be >= 1")
    x = x0
    total = 0.0
    if accumulator is None:
        x = _iterate(x, m.gamma, n)
    else:
        for _ in range(n):
            x = lsv_apply(m, x)
            total += accumulator(x)
    return x, total


def first_return(m: LsvMap, x: float, cap: int = DEFAULT_RETURN_CAP):
    """First return to Y = [1/2, 1]: least R >= 1 with T^R(x) in Y.

    Raises RuntimeError when the iteration cap is exceeded, which signals
    an orbit stagnating near 0 in floating point rather than looping
    forever.
    """
    if not (0.5 <= x <= 1.0):
        raise ValueError(f"first_return requires a state in [1/2, 1], got {x}")
    r, xp = _first_return(x, m.gamma, cap)
    if r < 0:
        raise RuntimeError(
            f"no return to [1/2, 1] within {cap} iterations (start {x})"
        )
    return r, xp


def _left_branch_preimage(gamma: float, target: float, tol: float = 1e-14) -> float:
    """Solve (2^gamma t^gamma + 1) t = target on (0, target).

    The left branch is smooth and strictly increasing, so bisection is
    guaranteed; a few Newton polish steps tighten to absolute tol.
    """
    c = 2.0 ** gamma
    f = lambda t: (c * t ** gamma + 1.0) * t - target
    lo, hi = 0.0, target
    if f(hi) < 0:
        raise RuntimeError(f"failed to bracket preimage of {target}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    t = 0.5 * (lo + hi)
    for _ in range(4):
        df = c * (gamma + 1.0) * t ** gamma + 1.0
        t_new = t - f(t) / df
        if lo <= t_new <= hi:
            t = t_new
    return t


def build_partition(m: LsvMap, depth: int) -> InducedPartition:
    """Backward ladder x_j = T_1^{-j}(1/2) and the return-time cells on Y."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if m.gamma == 0.0:
        # doubling map: exact dyadic ladder
        x = 0.5 ** np.arange(1, depth + 2)
        xl = x * 1.0
        xl[0] = 0.5
    else:
        xl = np.empty(depth + 1)
        xl[0] = 0.5
        for j in range(1, depth + 1):
            xl[j] = _left_branch_preimage(m.gamma, xl[j - 1])
    yl = (1.0 + xl[:-1]) / 2.0  # y_j = (1 + x_{j-1}) / 2, right branch is linear
    return InducedPartition(gamma=m.gamma, x_ladder=xl, y_ladder=yl)


def equilibrium_sample(m: LsvMap, rng: np.random.Generator,
                       burn_in: int = DEFAULT_BURN_IN, size=None):
    """Draw approximately invariant states: uniform start, burn_in iterates.

    burn_in = 0 returns the uniform draw itself.
    """
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if size is None:
        x = float(rng.random())
        return _iterate(x, m.gamma, burn_in) if burn_in else x
    xs = rng.random(size)
    if burn_in:
        xs = _burn_in_batch(xs, m.gamma, burn_in)
    return xs


def collect_returns(m: LsvMap, y0: float, count: int,
                    cap: int = DEFAULT_RETURN_CAP) -> np.ndarray:
    """count successive first-return times along the induced orbit from y0."""
    if not (0.5 <= y0 <= 1.0):
        raise ValueError("start must lie in [1/2, 1]")
    out, _ = _collect_returns(y0, m.gamma, count, cap)
    if out[-1] < 0 or np.any(out < 0):
        raise RuntimeError("return-time cap exceeded while collecting returns")
    return out


def measure_of_Y(m: LsvMap, seed_state: float = None, n: int = 10 ** 7,
                 x0: float = 0.4142135623730951) -> float:
    """Occupation estimate of mu([1/2, 1]) from a long orbit (Kac's view)."""
    start = x0 if seed_state is None else seed_state
    start = _iterate(start, m.gamma, 1000)
    return _occupation_fraction(start, m.gamma, n)
