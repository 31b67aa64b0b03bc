"""Truncated Fourier calculus for analytic torus maps.

A FourierMap stores, for each of its components, the complex coefficients
f_hat(l) over the centered box |l|_sup <= n_max, representing

    f(x) = sum_l f_hat(l) exp(2 pi i l . x),      x in T^d.

Real-valued maps satisfy f_hat(-l) = conj(f_hat(l)); all operations preserve
that symmetry up to a few ulp and `hermitian_defect` measures it.

Norms follow the sliced-domain convention: each lattice mode carries the
weight exp(2 pi w(l)) with w(l) = max over directions beta of
delta_beta |beta . l|.  With constant radii this equals the classical
analytic norm sum |f_hat(l)| exp(2 pi delta |l|_2) exactly (the maximizing
direction is l/|l|_2, so the implementation uses the closed form rather than
a literal grid augmentation).  Vector-valued maps report the max over
components, with per-component values retained.

Composition f(x + h(x)) has two independent routes: the primary path samples
on a uniform grid of (4 n_max)^d points (nonuniform trig evaluation is
factorized per axis) and re-expands by FFT, reporting the coefficient mass
that lands beyond n_max as "spill"; the oracle path sums the Taylor series
sum_t (d^t f) h^t / t! and refuses outside its convergence radius.
Near-identity inversion likewise: a vectorized fixed-point sweep on the grid
against the telescoping difference series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractionFailure, OracleDivergence
from .reports import VerificationReport
from .schedule import DirectionGrid

TWO_PI = 2 * math.pi


class FourierMap:
    """Truncated Fourier coefficients of a map T^d -> C^components.

    coeffs has shape (components,) + (2 n_max + 1,) * d with axis index i
    holding mode i - n_max.  Instances are immutable by convention; `info`
    carries producer metadata (composition spill, inversion residuals).
    """

    __slots__ = ("d", "n_max", "coeffs", "info")

    def __init__(self, d: int, n_max: int, coeffs: np.ndarray, info=None):
        expected = (2 * n_max + 1,) * d
        if coeffs.ndim != d + 1 or coeffs.shape[1:] != expected:
            raise ValueError(f"coefficient shape {coeffs.shape} does not match "
                             f"d={d}, n_max={n_max}")
        self.d = d
        self.n_max = n_max
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        self.info = dict(info) if info else {}

    # -- construction ------------------------------------------------------

    @classmethod
    def zeros(cls, d: int, n_max: int, components: int | None = None):
        components = d if components is None else components
        return cls(d, n_max, np.zeros((components,) + (2 * n_max + 1,) * d,
                                       dtype=np.complex128))

    @classmethod
    def from_modes(cls, d: int, n_max: int, modes: dict,
                   components: int | None = None, hermitian: bool = True):
        """Build from {lattice vector: coefficient vector (or scalar)}.

        With hermitian=True (the default) the conjugate modes are filled in,
        so the result represents a real-valued map.
        """
        components = d if components is None else components
        out = cls.zeros(d, n_max, components)
        for l, val in modes.items():
            vec = np.broadcast_to(np.asarray(val, dtype=np.complex128),
                                  (components,))
            idx = tuple(int(c) + n_max for c in l)
            out.coeffs[(slice(None),) + idx] += vec
            if hermitian and any(c != 0 for c in l):
                conj_idx = tuple(-int(c) + n_max for c in l)
                out.coeffs[(slice(None),) + conj_idx] += np.conj(vec)
        return out

    @classmethod
    def constant(cls, d: int, n_max: int, value, components: int | None = None):
        components = d if components is None else components
        out = cls.zeros(d, n_max, components)
        out.coeffs[(slice(None),) + (n_max,) * d] = \
            np.broadcast_to(np.asarray(value, dtype=np.complex128), (components,))
        return out

    # -- basic access ------------------------------------------------------

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def mode(self, l) -> np.ndarray:
        idx = tuple(int(c) + self.n_max for c in l)
        return self.coeffs[(slice(None),) + idx]

    def mean(self) -> np.ndarray:
        return self.mode((0,) * self.d)

    def component(self, j: int) -> "FourierMap":
        return FourierMap(self.d, self.n_max, self.coeffs[j:j + 1])

    def modes(self):
        """(lattice vector, coefficient vector) over nonzero modes, sorted by
        (|l|_sup, lexicographic) for reproducible summation."""
        nz = np.argwhere(np.any(self.coeffs != 0, axis=0))
        entries = [tuple(int(i) - self.n_max for i in idx) for idx in nz]
        entries.sort(key=lambda l: (max(abs(c) for c in l), l))
        for l in entries:
            yield l, self.mode(l)

    # -- arithmetic --------------------------------------------------------

    def _binary(self, other, op):
        if not isinstance(other, FourierMap):
            raise TypeError("expected a FourierMap")
        if (self.d, self.components) != (other.d, other.components):
            raise ValueError("incompatible maps")
        n = max(self.n_max, other.n_max)
        a = pad_truncation(self, n).coeffs
        b = pad_truncation(other, n).coeffs
        return FourierMap(self.d, n, op(a, b))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def scaled(self, factor) -> "FourierMap":
        return FourierMap(self.d, self.n_max, self.coeffs * factor)

    # -- analysis ----------------------------------------------------------

    def l1_norm(self) -> float:
        """Unweighted coefficient norm: max over components of sum |f_hat|."""
        return float(np.abs(self.coeffs).sum(axis=tuple(range(1, self.d + 1))).max())

    def hermitian_defect(self) -> float:
        flipped = self.coeffs
        for ax in range(1, self.d + 1):
            flipped = np.flip(flipped, axis=ax)
        return float(np.abs(self.coeffs - np.conj(flipped)).max())

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Values at arbitrary points; shape (components, P).

        points: (P, d).  Factorized per axis: cost O(P (2 n_max + 1) ...)
        instead of O(P modes).
        """
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.d:
            raise ValueError("point dimension mismatch")
        phases = [_phase_matrix(pts[:, ax], self.n_max) for ax in range(self.d)]
        if self.d == 1:
            return self.coeffs @ phases[0]
        if self.d == 2:
            # (c, a, b) @ (b, p) -> (c, a, p), then contract axis a against
            # the first-axis phases; matmul dispatches to BLAS
            tmp = self.coeffs @ phases[1]
            return (tmp * phases[0][None]).sum(axis=1)
        raise NotImplementedError("evaluation implemented for d <= 2")


def retruncate(f: FourierMap, n_max: int) -> FourierMap:
    """View f at an arbitrary truncation: pad with zeros or drop the outer
    modes (an exact head extraction when shrinking)."""
    if n_max == f.n_max:
        return f
    if n_max > f.n_max:
        return pad_truncation(f, n_max)
    offset = f.n_max - n_max
    sl = (slice(None),) + (slice(offset, offset + 2 * n_max + 1),) * f.d
    return FourierMap(f.d, n_max, f.coeffs[sl])


def _phase_matrix(x: np.ndarray, n_max: int) -> np.ndarray:
    """exp(2 pi i m x_p) for m = -n_max..n_max: one exp row, then cumulative
    products (complex exp is ~50x costlier than a complex multiply)."""
    base = np.exp(2j * np.pi * x)
    out = np.empty((2 * n_max + 1, x.size), dtype=np.complex128)
    out[n_max] = 1.0
    for m in range(1, n_max + 1):
        out[n_max + m] = out[n_max + m - 1] * base
    out[:n_max] = np.conj(out[n_max + 1:][::-1])
    return out


def pad_truncation(f: FourierMap, n_max: int) -> FourierMap:
    """Same map viewed at a larger truncation (zero padding)."""
    if n_max == f.n_max:
        return f
    if n_max < f.n_max:
        raise ValueError("use truncate_split to shrink the truncation")
    out = FourierMap.zeros(f.d, n_max, f.components)
    offset = n_max - f.n_max
    sl = (slice(None),) + (slice(offset, offset + 2 * f.n_max + 1),) * f.d
    out.coeffs[sl] = f.coeffs
    return out


# ---------------------------------------------------------------------------
# sliced domains and norms


@dataclass(frozen=True)
class SlicedDomain:
    """Union of direction-indexed analyticity slices with radii per grid
    direction; `constant_radius` marks the classical strip, for which the
    per-mode weight has the exact closed form delta |l|_2."""

    grid: DirectionGrid
    radii: tuple
    constant_radius: float | None = None

    def __post_init__(self):
        if len(self.radii) != len(self.grid):
            raise ValueError("one radius per grid direction required")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")

    @classmethod
    def constant(cls, d: int, delta: float, grid: DirectionGrid | None = None):
        if grid is None:
            grid = DirectionGrid.pair() if d == 1 else DirectionGrid.circle(64)
        return cls(grid=grid, radii=(float(delta),) * len(grid),
                   constant_radius=float(delta))

    @classmethod
    def from_schedule_column(cls, sched, n: int):
        radii = tuple(float(v) for v in sched.values[n])
        return cls(grid=sched.grid, radii=radii)

    def min_radius(self) -> float:
        return min(self.radii)

    def weight(self, l) -> float:
        """w(l) = sup over the domain's directions of delta_beta |beta . l|."""
        if self.constant_radius is not None:
            return self.constant_radius * math.hypot(*(float(c) for c in l))
        best = 0.0
        for r, d in zip(self.radii, self.grid.directions):
            dot = abs(math.fsum(float(b) * int(c) for b, c in zip(d, l)))
            best = max(best, float(r) * dot)
        return best


@dataclass
class NormReport:
    value: float
    per_component: tuple
    detail: list = field(default_factory=list)  # (l, weight, |coef|) rows

    def __float__(self):
        return float(self.value)


def norm_xi(f: FourierMap, domain: SlicedDomain,
            keep_detail: bool = False) -> NormReport:
    """Weighted coefficient norm sum_l |f_hat(l)| exp(2 pi w(l)).

    Per component, summed in sorted mode order for reproducibility; the
    report's value is the max over components.
    """
    if not keep_detail:
        idx = np.arange(-f.n_max, f.n_max + 1, dtype=np.float64)
        if domain.constant_radius is not None:
            if f.d == 1:
                w = np.abs(idx) * domain.constant_radius
            else:
                w = np.hypot(idx[:, None], idx[None, :]) * domain.constant_radius
        else:
            dirs = np.asarray(domain.grid.directions, dtype=np.float64)
            radii = np.asarray(domain.radii, dtype=np.float64)
            if f.d == 1:
                dots = np.abs(dirs[:, :1] * idx[None, :])       # (G, M)
                w = (radii[:, None] * dots).max(axis=0)
            else:
                lx = np.repeat(idx, idx.size)
                ly = np.tile(idx, idx.size)
                dots = np.abs(dirs @ np.vstack([lx, ly]))       # (G, M*M)
                w = (radii[:, None] * dots).max(axis=0).reshape(idx.size, idx.size)
        weights = np.exp(TWO_PI * w)
        per = tuple(float((np.abs(f.coeffs[j]) * weights).sum())
                    for j in range(f.components))
        return NormReport(value=max(per) if per else 0.0, per_component=per)
    totals = [[] for _ in range(f.components)]
    detail = []
    for l, vec in f.modes():
        w = domain.weight(l)
        factor = math.exp(TWO_PI * w)
        mags = np.abs(vec)
        for j in range(f.components):
            if mags[j] != 0:
                totals[j].append(mags[j] * factor)
        if keep_detail:
            detail.append((l, w, float(mags.max())))
    per = tuple(math.fsum(t) for t in totals)
    return NormReport(value=max(per) if per else 0.0, per_component=per,
                      detail=detail)


def seminorm_beta(f: FourierMap, beta, delta_bar) -> float:
    """Directional seminorm sum_l |f_hat(l)| exp(2 pi delta_bar |beta . l|);
    max over components."""
    if delta_bar < 0:
        raise ValueError("delta_bar must be >= 0")
    totals = [[] for _ in range(f.components)]
    for l, vec in f.modes():
        dot = abs(math.fsum(float(b) * int(c) for b, c in zip(beta, l)))
        factor = math.exp(TWO_PI * float(delta_bar) * dot)
        mags = np.abs(vec)
        for j in range(f.components):
            if mags[j] != 0:
                totals[j].append(mags[j] * factor)
    return max((math.fsum(t) for t in totals), default=0.0)


def truncate_split(f: FourierMap, N: int):
    """Exact coefficient partition (head, tail): head holds |l|_sup <= N."""
    if N > f.n_max:
        raise ValueError("N exceeds the stored truncation")
    if N < 0:
        raise ValueError("N must be >= 0")
    mask = _ball_mask(f.d, f.n_max, N)
    head = FourierMap(f.d, f.n_max, np.where(mask, f.coeffs, 0))
    tail = FourierMap(f.d, f.n_max, np.where(mask, 0, f.coeffs))
    return head, tail


def _ball_mask(d: int, n_max: int, N: int) -> np.ndarray:
    idx = np.abs(np.arange(-n_max, n_max + 1))
    if d == 1:
        sup = idx
    elif d == 2:
        sup = np.maximum(idx[:, None], idx[None, :])
    else:
        raise NotImplementedError
    return (sup <= N)[None]


def multiply(f: FourierMap, g: FourierMap) -> FourierMap:
    """Coefficient convolution of scalar maps; output truncation doubles."""
    if f.components != 1 or g.components != 1:
        raise ValueError("multiply expects scalar (single component) maps")
    if f.d != g.d:
        raise ValueError("dimension mismatch")
    n_out = f.n_max + g.n_max
    a, b = f.coeffs[0], g.coeffs[0]
    if f.d == 1:
        conv = np.convolve(a, b)
    else:
        conv = _convolve2d(a, b)
    return FourierMap(f.d, n_out, conv[None])


def _convolve2d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0] - 1,
                    a.shape[1] + b.shape[1] - 1), dtype=np.complex128)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = a[i, j]
            if v != 0:
                out[i:i + b.shape[0], j:j + b.shape[1]] += v * b
    return out


def derivative(f: FourierMap, j: int) -> FourierMap:
    """Coefficient-wise 2 pi i l_j multiplier (derivative in the j-th angle,
    1-based)."""
    if not 1 <= j <= f.d:
        raise ValueError(f"axis {j} out of range for d={f.d}")
    idx = np.arange(-f.n_max, f.n_max + 1)
    shape = [1] * (f.d + 1)
    shape[j] = 2 * f.n_max + 1
    factor = (2j * np.pi * idx).reshape(shape)
    return FourierMap(f.d, f.n_max, f.coeffs * factor)


# ---------------------------------------------------------------------------
# sampling grid, composition, inversion


def _sample_points(d: int, m: int) -> np.ndarray:
    xs = np.arange(m) / m
    if d == 1:
        return xs[:, None]
    g1, g2 = np.meshgrid(xs, xs, indexing="ij")
    return np.column_stack([g1.ravel(), g2.ravel()])


def _grid_size(n_max: int, oversample: int = 4) -> int:
    return max(oversample * n_max, 8)


def _reexpand(values: np.ndarray, d: int, m: int, n_max: int,
                   components: int):
    """FFT re-expansion of grid samples; returns (map, spill).

    spill is the recovered coefficient mass in the aliasing-safe band
    n_max < |l| <= m/2 - 1 (max over components): the part of the
    composition that does not fit the stored truncation.
    """
    freqs = np.fft.fftfreq(m, d=1.0 / m).astype(int)
    if d == 1:
        sup = np.abs(freqs)
    else:
        sup = np.maximum(np.abs(freqs)[:, None], np.abs(freqs)[None, :])
    keep = sup <= n_max
    band = (sup > n_max) & (sup <= m // 2 - 1)
    out = FourierMap.zeros(d, n_max, components)
    spill = 0.0
    order = np.argsort(freqs)
    for c in range(components):
        fc = np.fft.fftn(values[c].reshape((m,) * d)) / m ** d
        spill = max(spill, float(np.abs(fc[band]).sum()))
        kept = np.where(keep, fc, 0)
        if d == 1:
            centered = kept[order]
        else:
            centered = kept[np.ix_(order, order)]
        lo = m // 2 - n_max  # freqs sorted ascend: -m/2 .. m/2-1
        sl = tuple([slice(lo, lo + 2 * n_max + 1)] * d)
        out.coeffs[c] = centered[sl]
    return out, spill


def compose_shift(f: FourierMap, h: FourierMap, method: str = "grid",
                  series_tol: float = 1e-16, max_order: int = 40) -> FourierMap:
    """x -> f(x + h(x)), re-expanded to f's truncation.

    method "grid": sample on the (4 n_max)^d uniform grid, evaluate the
    shifted points exactly (trig polynomial), FFT back; the coefficient mass
    beyond the truncation is reported in info["spill"].  method "series":
    the Taylor oracle sum_t d^t f h^t / t!, independent of the grid path;
    raises OracleDivergence outside |2 pi n_max| ||h||_l1 < 1.
    """
    if f.d != h.d or h.components != f.d:
        raise ValueError("shift must be a d-component map on the same torus")
    if method == "series":
        return _compose_series(f, h, series_tol, max_order)
    if method != "grid":
        raise ValueError(f"unknown method {method!r}")
    m = _grid_size(max(f.n_max, h.n_max))
    pts = _sample_points(f.d, m)
    shift = h.evaluate(pts)
    shift_imag = float(np.abs(shift.imag).max())
    shifted = pts + shift.real.T
    vals = f.evaluate(shifted)
    herm = (f.hermitian_defect() <= 1e-9 * max(f.l1_norm(), 1.0)
            and h.hermitian_defect() <= 1e-9 * max(h.l1_norm(), 1.0))
    if herm:
        vals = vals.real
    out, spill = _reexpand(np.asarray(vals, dtype=np.complex128),
                                f.d, m, f.n_max, f.components)
    out.info["spill"] = spill
    out.info["shift_imag"] = shift_imag
    out.info["path"] = "grid"
    return out


def _compose_series(f: FourierMap, h: FourierMap, tol: float,
                    max_order: int) -> FourierMap:
    # translations are exact and do not count against the radius
    h0 = h.mean()
    if np.abs(h0).max() > 0:
        f = translate(f, h0.real)
        h = h - FourierMap.constant(h.d, h.n_max, h0, components=h.components)
    radius = TWO_PI * f.n_max * h.l1_norm()
    if radius >= 1.0:
        raise OracleDivergence(
            f"series composition needs 2 pi n_max ||h|| < 1, got {radius:.3g}")
    scale = max(f.l1_norm(), 1e-300)
    n_work = f.n_max + 6 * max(1, h.n_max)
    total = pad_truncation(f, n_work)
    frontier = {(0,) * f.d: f}
    # memoized powers of the shift components, already capped at n_work
    pow_cache = {(ax, 0): None for ax in range(f.d)}

    def h_power(ax: int, k: int):
        key = (ax, k)
        if key not in pow_cache:
            lower = h_power(ax, k - 1)
            base = h.component(ax)
            nxt = base if lower is None else retruncate(multiply(lower, base),
                                                        min(k * h.n_max, n_work))
            pow_cache[key] = nxt
        return pow_cache[key]

    for order in range(1, max_order + 1):
        new_frontier = {}
        for t, base in frontier.items():
            for ax in range(f.d):
                t_next = list(t)
                t_next[ax] += 1
                t_next = tuple(t_next)
                if t_next not in new_frontier:
                    new_frontier[t_next] = derivative(base, ax + 1)
        contribution = 0.0
        for t, term in new_frontier.items():
            prod = term
            denom = 1.0
            for ax, power in enumerate(t):
                denom *= math.factorial(power)
                if power:
                    prod = _vector_times_scalar(prod, h_power(ax, power))
            piece = retruncate(prod.scaled(1.0 / denom), n_work)
            total = total + piece
            contribution += piece.l1_norm()
        frontier = new_frontier
        if contribution < tol * scale:
            break
    else:
        raise OracleDivergence(
            f"series composition did not converge within {max_order} orders")
    out = retruncate(total, f.n_max)
    out.info["path"] = "series"
    return out


def _vector_times_scalar(vec_map: FourierMap, scalar_map: FourierMap) -> FourierMap:
    """Multiply every component of vec_map by a scalar map (convolution)."""
    comps = []
    for j in range(vec_map.components):
        comps.append(multiply(FourierMap(vec_map.d, vec_map.n_max,
                                         vec_map.coeffs[j:j + 1]), scalar_map))
    n_out = comps[0].n_max
    out = FourierMap.zeros(vec_map.d, n_out, vec_map.components)
    for j, c in enumerate(comps):
        out.coeffs[j] = c.coeffs[0]
    return out


def translate(f: FourierMap, v) -> FourierMap:
    """f(x + v) for a constant shift: coefficients pick up e^(2 pi i l . v)."""
    v = np.asarray(v, dtype=np.float64).reshape(f.d)
    idx = np.arange(-f.n_max, f.n_max + 1)
    if f.d == 1:
        phase = np.exp(2j * np.pi * idx * v[0])[None]
    else:
        phase = np.exp(2j * np.pi * (idx[:, None] * v[0] + idx[None, :] * v[1]))[None]
    return FourierMap(f.d, f.n_max, f.coeffs * phase)


def invert_near_identity(h: FourierMap, tol: float = 1e-14,
                         max_sweeps: int = 80) -> FourierMap:
    """Correction g with (id - h + g) o (id + h) = id.

    Primary path: solve y + h(y) = x for every grid point by the damped-free
    fixed-point sweep y <- x - h(y) (all points vectorized), then re-expand
    g(x) = y(x) - x + h(x)... note g is defined on the *target* side:
    (id + h)^(-1)(w) = w - h(w) + g(w), so g(w) = y(w) - w + h(w) with
    y(w) the preimage of w.  Requires the contraction guard
    2 pi n_max ||h||_l1 < 1/2 and each sweep to cut the residual in half.

    info carries the final residual, sweep count and re-expansion spill.
    The series oracle is `invert_series`.
    """
    if h.hermitian_defect() > 1e-9 * max(h.l1_norm(), 1.0):
        raise ValueError("inversion expects a real-representing shift")
    guard = TWO_PI * h.n_max * (h - FourierMap.constant(
        h.d, h.n_max, h.mean(), components=h.components)).l1_norm()
    if guard >= 0.5:
        raise ContractionFailure(
            f"inversion guard 2 pi n_max ||h - mean|| = {guard:.3g} >= 1/2")
    m = _grid_size(h.n_max)
    w = _sample_points(h.d, m)          # target points
    y = w - h.evaluate(w).real.T        # first sweep from y0 = w
    residual = None
    for sweep in range(max_sweeps):
        hy = h.evaluate(y).real.T
        res = np.abs(y + hy - w).max()
        if residual is not None and res > 0.5 * residual and res > tol:
            raise ContractionFailure(
                f"fixed-point sweep stalled: residual {res:.3g} after "
                f"{sweep} sweeps (previous {residual:.3g})")
        residual = res
        if res < tol:
            break
        y = w - hy
    g_vals = (y - w + h.evaluate(w).real.T).T
    out, spill = _reexpand(np.asarray(g_vals, dtype=np.complex128),
                                h.d, m, h.n_max, h.components)
    out.info.update(residual=float(residual), sweeps=sweep + 1, spill=spill,
                    path="grid")
    return out


def invert_series(h: FourierMap, tol: float = 1e-16,
                  max_terms: int = 60) -> FourierMap:
    """Series oracle for the inversion correction.

    With w_0 = h o (id + h) - h and w_k = w_{k-1} o (id + h) - w_{k-1},
    the defining identity g(z + h(z)) = w_0(z) unrolls to the alternating
    sum g = sum_k (-1)^k w_k: each unroll step rewrites w_k(z) as
    w_k(w) - w_{k+1}(z) at the target point w = z + h(z).  Compositions use
    the Taylor path, so this route never touches the sampling grid.
    """
    w_k = _compose_series(h, h, tol, 40) - h
    total = w_k
    sign = 1.0
    for _ in range(max_terms):
        if w_k.l1_norm() < tol * max(h.l1_norm(), 1e-300):
            break
        w_k = _compose_series(w_k, h, tol, 40) - w_k
        sign = -sign
        total = total + w_k.scaled(sign)
    else:
        raise OracleDivergence("inversion series did not converge")
    total.info["path"] = "series"
    return total


# ---------------------------------------------------------------------------
# remainder split


def remainder_split_check(f: FourierMap, domain: SlicedDomain,
                          shrunk: SlicedDomain, N: int) -> VerificationReport:
    """Tail seminorm transfer between nested sliced domains.

    For each grid direction beta with shrunk radius db < delta_beta, checks

        |R_N f_beta|_db <= e^(-(delta_beta - db) N / 2) |R_N f_beta|_delta
                           + e^(-delta N / 4) ||R_N f||_delta,

    delta = min radius of `domain`; all three quantities are evaluated from
    the stored coefficients.  Preconditions (shrunk <= original,
    |delta - db| < delta/4) are validated into the report header.
    """
    if domain.grid is not shrunk.grid and domain.grid.directions != shrunk.grid.directions:
        raise ValueError("domains must share the direction grid")
    _, tail = truncate_split(f, N)
    delta = domain.min_radius()
    rep = VerificationReport("remainder split", {
        "N": N, "delta": delta, "tail_modes": int(np.count_nonzero(tail.coeffs)),
    })
    const_domain = SlicedDomain.constant(f.d, delta, grid=domain.grid)
    tail_norm = norm_xi(tail, const_domain).value
    for i, beta in enumerate(domain.grid.directions):
        db = float(shrunk.radii[i])
        dbeta = float(domain.radii[i])
        ok_pre = db <= dbeta and abs(delta - db) < delta / 4
        lhs = seminorm_beta(tail, beta, db)
        rhs = (math.exp(-(dbeta - db) * N / 2) * seminorm_beta(tail, beta, dbeta)
               + math.exp(-delta * N / 4) * tail_norm)
        rep.add("tail_transfer", f"direction {i}", lhs <= rhs * (1 + 1e-12),
                margin=f"lhs = {lhs:.6g}, rhs = {rhs:.6g}",
                note="" if ok_pre else "precondition |delta - db| < delta/4 not met")
    return rep


# ---------------------------------------------------------------------------
# serialization


MAP_FORMAT = "kamtorus.fourier_map.v1"


def map_to_jsonable(f: FourierMap) -> dict:
    """Canonical JSON form: (l, re, im) triples per component, modes sorted
    by (|l|_sup, lexicographic); floats as repr for byte-stable round trips."""
    modes = []
    for l, vec in f.modes():
        modes.append([list(l),
                      [[float(v.real), float(v.imag)] for v in vec]])
    return {
        "format": MAP_FORMAT,
        "d": f.d,
        "n_max": f.n_max,
        "components": f.components,
        "modes": modes,
    }


def map_from_jsonable(data: dict) -> FourierMap:
    from .errors import SchemaMismatch

    if data.get("format") != MAP_FORMAT:
        raise SchemaMismatch(
            f"expected format {MAP_FORMAT!r}, got {data.get('format')!r}")
    out = FourierMap.zeros(int(data["d"]), int(data["n_max"]),
                           int(data["components"]))
    for l, vec in data["modes"]:
        idx = tuple(int(c) + out.n_max for c in l)
        out.coeffs[(slice(None),) + idx] = [complex(re, im) for re, im in vec]
    return out


def norm_detail_csv(f: FourierMap, domain: SlicedDomain) -> str:
    """CSV of the per-mode norm contributions: one row per stored mode with
    its weight exponent and per-component magnitudes."""
    import csv as _csv
    import io as _io

    buf = _io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(["mode", "weight", "factor"]
                    + [f"abs_component_{j}" for j in range(f.components)])
    for l, vec in f.modes():
        w = domain.weight(l)
        writer.writerow([" ".join(str(c) for c in l), repr(w),
                         repr(math.exp(TWO_PI * w))]
                        + [repr(float(abs(v))) for v in vec])
    return buf.getvalue()
