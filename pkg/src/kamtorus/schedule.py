"""Direction-resolved analyticity-loss schedules.

At dyadic scale 2^n each direction beta on the unit sphere carries a radius
delta[beta][n].  Advancing one stage solves, for every lattice mode l in the
stage's range, the largest delta <= delta[beta][n] with

    exp(2 pi |beta.l| delta) * g(c, n, l) / ||alpha.l||
        <= max over the grid of exp(2 pi |beta'.l| delta[beta'][n]),

then takes the minimum over a shrinking beta-neighborhood.  The cutoff g
damps modes below scale 2^n by exp(-2^n c_n) and vanishes above 2^(n+1).
Both constraint ranges are implemented:

* "full_range": modes 0 < |l| <= 2^(n+1), neighborhood radius exp(-2^n c_n);
* "annulus":    modes 2^n < |l| <= 2^(n+1), neighborhood radius
                C1 2^(dn) exp(-2^n c_n), and the stage result is shrunk by
                the factor (1 - c_{n+1}).

The per-mode solve is the closed form delta* = log(M ||alpha.l|| / g) /
(2 pi |beta.l|): the left side is monotone and invertible in delta, so this
is exact to round-off (a bisection oracle cross-checks it in the tests).

The continuous sphere is a finite grid: the neighborhood minimum always
includes the immediate grid ring, and the first stage whose true radius
falls below one grid spacing is recorded as `first_unreliable_stage`
(raised as GridTooCoarse in strict mode).  For d = 1 the two-point grid
{+1, -1} is the exact sphere, so no stage is ever unreliable.

Headline statistic: inf over beta and n of delta[beta][n]; a positive value
is the finite-depth evidence that the weight choice controls every scanned
scale.  Negative deltas are kept (not clamped): a schedule diving through
zero is exactly the divergence evidence the non-summable case produces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp

from .diophantine import nearest_int_distance, omega_min, omega_min_1d, sup_norm
from .errors import GridTooCoarse, ResonanceDetected, ZeroVector
from .precision import to_mpf
from .reports import VerificationReport

TWO_PI = 2 * math.pi


# ---------------------------------------------------------------------------
# grids, weights, cutoff


@dataclass(frozen=True)
class DirectionGrid:
    """Finite set of unit directions covering the sphere S^(d-1).

    d = 1: the exact two-point sphere {+1, -1} (spacing 0).
    d = 2: `count` uniformly spaced angles; spacing is the chord between
    neighboring directions, which bounds the covering gap.
    """

    dimension: int
    directions: tuple
    angles: tuple
    spacing: float

    @classmethod
    def pair(cls) -> "DirectionGrid":
        return cls(dimension=1, directions=((1.0,), (-1.0,)),
                   angles=(0.0, math.pi), spacing=0.0)

    @classmethod
    def circle(cls, count: int) -> "DirectionGrid":
        if count < 4:
            raise ValueError("circle grid needs at least 4 directions")
        angles = tuple(2 * math.pi * k / count for k in range(count))
        dirs = tuple((math.cos(a), math.sin(a)) for a in angles)
        spacing = math.dist(dirs[0], dirs[1])
        return cls(dimension=2, directions=dirs, angles=angles, spacing=spacing)

    def __len__(self):
        return len(self.directions)

    def neighbors(self, index: int, radius: float) -> list:
        """Grid indices within chord distance < radius of directions[index];
        always contains the index itself and its immediate ring."""
        base = self.directions[index]
        out = []
        for j, d in enumerate(self.directions):
            if j == index or math.dist(base, d) < max(radius, self.spacing * 1.0000001):
                out.append(j)
        return out


@dataclass(frozen=True)
class WeightSequence:
    """Damping weights c_n plus the schedule parameters (C, N, gothic_d).

    delta[beta][n] = gothic_d for n <= N; c must cover every stage the
    schedule will touch (n_max + 1 entries are consumed by the shrink
    factor of the annulus variant).
    """

    c: tuple
    C: float = 1.0
    N: int = 0
    gothic_d: float = 1.0

    def __post_init__(self):
        if any(x < 0 for x in self.c):
            raise ValueError("weights must be nonnegative")
        if self.N < 0 or self.gothic_d <= 0:
            raise ValueError("need N >= 0 and gothic_d > 0")

    def partial_sum(self):
        return mpmath.fsum(self.c)


def cutoff_weight(weights: WeightSequence, n: int, l) -> float:
    """Scale cutoff: 1 on the annulus 2^n < |l| <= 2^(n+1), exp(-2^n c_n)
    for 0 < |l| <= 2^n, 0 beyond."""
    if n < 0:
        raise ValueError("n must be >= 0")
    norm = sup_norm(l)
    if norm == 0:
        raise ZeroVector("cutoff weight is undefined at l = 0")
    if norm > 1 << (n + 1):
        return 0.0
    if norm > 1 << n:
        return 1.0
    return mpmath.exp(-(1 << n) * to_mpf(weights.c[n]))


def phi_weight(l, beta, delta):
    """Mode growth factor exp(2 pi |beta.l| delta).

    Uses the plain inner product |beta.l|, not its distance to the nearest
    integer: the two readings coexist upstream, and the solver manipulates
    exp(2 pi delta |l|_2 cos(angle)) which requires the former.  Every
    report header states this choice.
    """
    if min(len(l), len(beta)) != max(len(l), len(beta)):
        raise ValueError("dimension mismatch")
    dot = abs(math.fsum(float(b) * int(c) for b, c in zip(beta, l)))
    return mpmath.exp(TWO_PI * dot * to_mpf(delta))


PHI_NOTE = "phi uses |beta.l| (plain inner product), not nearest-integer distance"


# ---------------------------------------------------------------------------
# divisor oracles


class DivisorOracle:
    """||alpha.l|| with resonance detection; exact on rational vectors.

    Real vectors are evaluated as mpf at the working precision.  log_inv(l)
    returns log(1/||alpha.l||) as a float (the solver works in log scale, so
    double precision suffices even when the divisor itself underflows a
    double, as Liouville-type vectors arrange).
    """

    def __init__(self, alpha):
        self.alpha = tuple(alpha)
        self.dimension = len(self.alpha)
        self.exact = all(isinstance(a, (Fraction, int)) for a in self.alpha)
        # plain-float input gets plain-float evaluation (the solver works in
        # log scale where double precision is ample); mpf entries keep the
        # working-precision route
        self.float_mode = (not self.exact
                           and all(isinstance(a, float) for a in self.alpha))
        self._cache = {}

    def distance(self, l):
        key = tuple(l)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.exact:
            s = sum(a * c for a, c in zip(self.alpha, key))
            dist = nearest_int_distance(s)
            if dist == 0:
                raise ResonanceDetected(f"alpha . {key} is an exact integer",
                                        lattice_vector=key)
        elif self.float_mode:
            s = math.fsum(a * c for a, c in zip(self.alpha, key))
            dist = abs(s - round(s))
            if dist < 1e-13:
                raise ResonanceDetected(
                    f"||alpha . {key}|| vanishes at double precision",
                    lattice_vector=key)
        else:
            s = mpmath.fsum(to_mpf(a) * c for a, c in zip(self.alpha, key))
            dist = nearest_int_distance(s)
            if dist < mpmath.ldexp(1, -(mp.prec - 16)):
                raise ResonanceDetected(
                    f"||alpha . {key}|| vanishes at working precision",
                    lattice_vector=key)
        self._cache[key] = dist
        return dist

    def log_inv(self, l) -> float:
        dist = self.distance(l)
        if isinstance(dist, Fraction):
            return (_log10_int(dist.denominator) - _log10_int(dist.numerator)) * math.log(10)
        if isinstance(dist, float):
            return -math.log(dist)
        return float(-mpmath.log(dist))


def _log10_int(n: int) -> float:
    """log10 of a positive integer, safe for million-bit values."""
    shift = max(n.bit_length() - 64, 0)
    return math.log10(n >> shift) + shift * math.log10(2)


def _stage_modes(dimension: int, n: int, variant: str):
    """Canonical (sign-normalized) lattice modes of stage n."""
    hi = 1 << (n + 1)
    lo = (1 << n) + 1 if variant == "annulus" else 1
    if dimension == 1:
        for v in range(lo, hi + 1):
            yield (v,)
        return
    for l1 in range(0, hi + 1):
        start = 1 if l1 == 0 else -hi
        for l2 in range(start, hi + 1):
            if max(abs(l1), abs(l2)) < lo or (l1 == 0 and l2 <= 0):
                continue
            yield (l1, l2)


# ---------------------------------------------------------------------------
# the schedule


@dataclass
class DeltaSchedule:
    grid: DirectionGrid
    variant: str
    weights: WeightSequence
    values: list                  # values[n][i]: stage n, grid direction i
    argmins: list                 # argmins[n][i]: binding mode or None
    first_unreliable_stage: int | None = None
    collapsed_stage: int | None = None
    notes: dict = field(default_factory=dict)

    def stages(self) -> int:
        return len(self.values)

    def delta(self, beta_index: int, n: int) -> float:
        return self.values[n][beta_index]

    def inf_delta(self) -> float:
        return min(min(row) for row in self.values)

    def headline(self) -> dict:
        return {
            "variant": self.variant,
            "stages": self.stages(),
            "grid_size": len(self.grid),
            "inf_delta": float(self.inf_delta()),
            "first_unreliable_stage": self.first_unreliable_stage,
            "collapsed_stage": self.collapsed_stage,
            "phi_convention": PHI_NOTE,
        }

    def csv_rows(self):
        """Rows (stage, beta_angle, delta, argmin_l1, argmin_l2, variant)."""
        for n, row in enumerate(self.values):
            for i, val in enumerate(row):
                arg = self.argmins[n][i]
                l1 = arg[0] if arg else ""
                l2 = (arg[1] if len(arg) > 1 else 0) if arg else ""
                yield (n, repr(self.grid.angles[i]), repr(float(val)), l1, l2,
                       self.variant)


def delta_schedule(alpha, grid: DirectionGrid, weights: WeightSequence,
                   n_max: int, variant: str = "full_range", c1: float = 1.0,
                   strict_grid: bool = False) -> DeltaSchedule:
    """Run the stage recursion from the flat start up to stage n_max.

    Stages 0..N hold gothic_d; each later stage applies the per-mode solve
    and the neighborhood minimum.  See the module docstring for the two
    variants.  Raises ResonanceDetected on a vanishing divisor inside the
    scanned range and GridTooCoarse in strict mode once the neighborhood
    radius undercuts the grid spacing.
    """
    if variant not in ("full_range", "annulus"):
        raise ValueError(f"unknown variant {variant!r}")
    if len(weights.c) < n_max + 2:
        raise ValueError(f"need at least {n_max + 2} weights for n_max={n_max}")
    if variant == "annulus" and any(float(c) >= 1 for c in weights.c[weights.N:n_max + 2]):
        raise ValueError("the annulus variant's (1 - c_{n+1}) shrink needs "
                         "weights below 1 over the active stages")
    oracle = DivisorOracle(alpha)
    if oracle.dimension != grid.dimension:
        raise ValueError("alpha dimension does not match the grid")
    G = len(grid)
    start = float(weights.gothic_d)

    values = [[start] * G for _ in range(min(weights.N, n_max) + 1)]
    argmins = [[None] * G for _ in range(len(values))]
    sched = DeltaSchedule(grid=grid, variant=variant, weights=weights,
                          values=values, argmins=argmins)
    dirs = [tuple(float(x) for x in d) for d in grid.directions]

    for n in range(weights.N, n_max):
        merged, merged_arg, collapsed, radius = advance_stage(
            oracle, grid, weights, values[n], n, variant, c1)
        if collapsed:
            sched.collapsed_stage = n + 1
            break
        if grid.spacing > 0 and radius < grid.spacing and \
                sched.first_unreliable_stage is None:
            sched.first_unreliable_stage = n + 1
            if strict_grid:
                raise GridTooCoarse(
                    f"neighborhood radius {radius:.3g} fell below the grid "
                    f"spacing {grid.spacing:.3g} at stage {n + 1}",
                    last_reliable_stage=n)
        values.append(merged)
        argmins.append(merged_arg)
    return sched


def advance_stage(oracle: DivisorOracle, grid: DirectionGrid,
                  weights: WeightSequence, prev, n: int,
                  variant: str = "full_range", c1: float = 1.0):
    """One stage of the recursion from the stage-n values `prev`.

    Returns (values_{n+1}, binding modes, collapsed, neighborhood radius).
    `collapsed` reports a mode orthogonal to some grid direction whose
    constraint no delta can satisfy (possible only deep in the divergent
    regime).
    """
    G = len(grid)
    dirs = [tuple(float(x) for x in d) for d in grid.directions]
    damping = (1 << n) * float(weights.c[n])    # -log of the inner cutoff
    new = [float(v) for v in prev]
    binding = [None] * G
    collapsed = False
    for l in _stage_modes(grid.dimension, n, variant):
        log_inv = oracle.log_inv(l)
        g_log = -damping if sup_norm(l) <= (1 << n) else 0.0
        # snap float-noise inner products to exact orthogonality, otherwise a
        # 1e-16 dot turns an infeasible orthogonal constraint into a cap of
        # absurd magnitude
        ortho = 1e-12 * math.hypot(*(float(c) for c in l))
        dots = [abs(math.fsum(b * c for b, c in zip(d, l))) for d in dirs]
        dots = [0.0 if v < ortho else v for v in dots]
        log_m = max(TWO_PI * float(prev[i]) * dots[i] for i in range(G))
        budget = log_m - log_inv - g_log        # log(M ||alpha.l|| / g)
        for i in range(G):
            if dots[i] == 0.0:
                if budget < 0:
                    collapsed = True
                continue
            cap = budget / (TWO_PI * dots[i])
            if cap < new[i]:
                new[i] = cap
                binding[i] = l
    radius = math.exp(-damping)
    if variant == "annulus":
        radius *= c1 * 2.0 ** (grid.dimension * n)
    merged = []
    merged_arg = []
    for i in range(G):
        js = grid.neighbors(i, radius)
        j_best = min(js, key=lambda j: new[j])
        merged.append(new[j_best])
        merged_arg.append(binding[j_best])
    if variant == "annulus":
        # min keeps stage monotonicity exact even once deltas go negative
        shrink = 1.0 - float(weights.c[n + 1])
        merged = [min(v * shrink, v) for v in merged]
    return merged, merged_arg, collapsed, radius


# ---------------------------------------------------------------------------
# weight adjustment and the epsilon ledger


def adjust_weights(weights: WeightSequence, C1: float, d: int):
    """Absorb a per-stage geometric factor C1 * 2^(nd) into the weights.

    Returns (adjusted, report): adjusted_c[n] = c[n] + 2^-n log(C1 2^(2nd)).
    The report records the first stage N1 from which C1 2^(nd) e^(-2^n c'_n)
    < e^(-2^n c_n) holds through the stored range, and both partial sums
    (the adjustment preserves summability: the added tail is geometric).
    """
    if C1 <= 0:
        raise ValueError("C1 must be positive")
    adj = tuple(float(c) + math.log(C1 * 2.0 ** (2 * n * d)) / (1 << n)
                for n, c in enumerate(weights.c))
    adjusted = WeightSequence(c=adj, C=weights.C, N=weights.N,
                              gothic_d=weights.gothic_d)
    rep = VerificationReport("weight adjustment", {
        "C1": C1, "dimension": d, "stages": len(adj)})
    holds_from = None
    for n in range(len(adj)):
        lhs = C1 * 2.0 ** (n * d) * math.exp(-(1 << n) * adj[n])
        rhs = math.exp(-(1 << n) * float(weights.c[n]))
        if lhs < rhs:
            if holds_from is None:
                holds_from = n
        else:
            holds_from = None
    rep.add("dominates_from", "stored range", holds_from is not None,
            margin=f"N1 = {holds_from}")
    rep.add("summable", "stored range", None,
            margin=f"sum c = {mpmath.nstr(weights.partial_sum(), 8)}, "
                   f"sum adjusted = {mpmath.nstr(adjusted.partial_sum(), 8)}")
    return adjusted, rep


@dataclass(frozen=True)
class EpsilonLedger:
    """Per-stage error budget driven by the weight sequence.

    values[n+1] = e^(-2^n (c_n + c_{n+1})) values[n]
                  + C e^(2^n c_n) 2^(3(n-1)d) values[n-1]^2,
    with the flat start values[0..N] = eps0 (and eps_{-1} read as eps0).
    first_dominance_failure is the first stage where
    eps_n e^(-2^n c_n) > C 2^(3(n-1)d) eps_{n-1}^2 fails, or None.
    """

    values: tuple
    C: float
    d: int
    first_dominance_failure: int | None


def epsilon_ledger(eps0, weights: WeightSequence, d: int,
                   n_max: int) -> EpsilonLedger:
    if eps0 < 0:
        raise ValueError("eps0 must be nonnegative")
    eps0 = to_mpf(eps0)
    C = to_mpf(weights.C)
    start = min(weights.N, n_max)
    values = [eps0] * (start + 1)
    for n in range(start, n_max):
        prev = values[n - 1] if n >= 1 else eps0
        c_n = to_mpf(weights.c[n])
        c_n1 = to_mpf(weights.c[n + 1])
        quad = C * mpmath.exp((1 << n) * c_n) * mpmath.mpf(2) ** (3 * (n - 1) * d) * prev ** 2
        values.append(mpmath.exp(-(1 << n) * (c_n + c_n1)) * values[n] + quad)
    failure = None
    for n in range(1, len(values)):
        lhs = values[n] * mpmath.exp(-(1 << n) * to_mpf(weights.c[n]))
        rhs = C * mpmath.mpf(2) ** (3 * (n - 1) * d) * values[n - 1] ** 2
        if not lhs > rhs and values[n] != 0:
            failure = n
            break
    return EpsilonLedger(values=tuple(values), C=float(weights.C), d=d,
                         first_dominance_failure=failure)


# ---------------------------------------------------------------------------
# weight recipes


def dyadic_weight_recipe(alpha, n_max: int, records: list | None = None,
                         gothic_d: float = 1.0, N: int = 0) -> WeightSequence:
    """c_n = 2 pi 2^-n log(1/Omega(2^n)): the damping that turns the
    dyadic small-divisor profile of alpha into inner-mode harmlessness."""
    recs = []
    from .diophantine import bryuno_partial_sum
    bryuno_partial_sum(alpha, n_max + 2, records=recs)
    c = []
    for n in range(n_max + 2):
        rec = recs[n - 1] if n >= 1 else None
        if rec is None:
            # stage 0 uses the unit ball
            rec = omega_min(alpha, 1)
        c.append(float(TWO_PI * mpmath.log(1 / rec.value_mpf()) / (1 << n)))
    if records is not None:
        records.extend(recs)
    return WeightSequence(c=tuple(c), N=N, gothic_d=gothic_d)


def construction_weights(state, n_max: int, C: float = 1.0,
                         scan_cap: int = 256,
                         gothic_d: float = 1.0) -> WeightSequence:
    """Three-term stage weights tailored to a constructed vector.

    c_n = C / (t_k (4n - log qt)^2) + C / (t_k (|4n - log qt_next| + 1)^2)
          + 2^-n log(1/k_n),

    where qt = q_tilde(l(n)) for the deepest level with q_tilde <= 2^n,
    t_k is that level's twist bracket value, and k_n is the smallest
    divisor among modes |l| <= 2^n not parallel to nu(l(n)) (scanned on the
    deepest approximant, radius capped at scan_cap).  Stages below the
    first scale carry only the k_n term.
    """
    from .construction import _exact_scan, alpha_approx

    alpha = alpha_approx(state)
    c = []
    for n in range(n_max + 2):
        scale = 1 << n
        l_of_n = None
        for l in range(state.level):
            if state.q_tilde[l] <= scale:
                l_of_n = l
        term = 0.0
        if l_of_n is not None:
            data = state.direction(l_of_n)
            log_qt = _log10_int(data.q_tilde) * math.log(10)
            term += float(C) / (data.t_n * (4 * n - log_qt) ** 2)
            if l_of_n + 1 <= state.level - 1 or l_of_n + 1 <= state.level:
                try:
                    nxt = state.direction(l_of_n + 1)
                    log_next = _log10_int(nxt.q_tilde) * math.log(10)
                    term += float(C) / (data.t_n * (abs(4 * n - log_next) + 1) ** 2)
                except ValueError:
                    pass
            nu = data.nu
            k_min, _ = _exact_scan(alpha, min(scale, scan_cap),
                                   skip_parallel_to=nu)
            if k_min is not None and k_min > 0:
                log_inv = (_log10_int(k_min.denominator)
                           - _log10_int(k_min.numerator)) * math.log(10)
                term += max(log_inv, 0.0) / scale
        else:
            rec = omega_min(alpha, min(scale, scan_cap))
            term += max(float(mpmath.log(1 / rec.value_mpf())), 0.0) / scale
        c.append(term)
    return WeightSequence(c=tuple(c), C=float(C), N=0, gothic_d=gothic_d)


# ---------------------------------------------------------------------------
# one-dimensional analysis


def _independent_stage_caps(oracle: DivisorOracle, grid: DirectionGrid,
                            weights: WeightSequence, prev, n: int,
                            variant: str):
    """Re-derive the stage caps with mpf primitives on the raw distances
    (no shared log cache), as an independent per-mode solve."""
    G = len(grid)
    caps = [to_mpf(float(p)) for p in prev]
    with mpmath.workprec(128):
        damping = mpmath.mpf(1 << n) * to_mpf(float(weights.c[n]))
        for l in _stage_modes(grid.dimension, n, variant):
            dist = to_mpf(oracle.distance(l)) if not isinstance(oracle.distance(l), Fraction) \
                else mpmath.mpf(oracle.distance(l).numerator) / oracle.distance(l).denominator
            g_log = -damping if sup_norm(l) <= (1 << n) else mpmath.mpf(0)
            dots = [abs(mpmath.fsum(to_mpf(b) * c for b, c in zip(d, l)))
                    for d in grid.directions]
            log_m = max(2 * mpmath.pi * to_mpf(float(prev[i])) * dots[i]
                        for i in range(G))
            budget = log_m + mpmath.log(dist) - g_log
            for i in range(G):
                if dots[i] == 0:
                    continue
                cap = budget / (2 * mpmath.pi * dots[i])
                if cap < caps[i]:
                    caps[i] = cap
    return caps


def _bisect_mode_cap(dist, g_log: float, log_m: float, dot: float,
                     hi: float, lo: float = -64.0) -> float:
    """Largest delta <= hi with exp(2 pi dot delta) g / dist <= M, found by
    bisection on the raw inequality (mpf exponentials, no log inversion)."""
    dist = to_mpf(dist) if not isinstance(dist, Fraction) else \
        mpmath.mpf(dist.numerator) / dist.denominator
    m_val = mpmath.exp(to_mpf(log_m))
    g_val = mpmath.exp(to_mpf(g_log))

    def feasible(delta):
        return mpmath.exp(2 * mpmath.pi * dot * to_mpf(delta)) * g_val <= m_val * dist

    if feasible(hi):
        return hi
    if not feasible(lo):
        return lo
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def dimension_one_weights(alpha_1d, depth: int, gothic_d: float = 1.0,
                     records: list | None = None) -> WeightSequence:
    """The d = 1 weight recipe c_n = 2 pi 2^-n log(1/Omega(2^n))."""
    return dyadic_weight_recipe(alpha_1d, depth, records=records,
                                gothic_d=gothic_d)


def dimension_one_check(alpha_1d, depth: int, gothic_d: float = 1.0,
                   dual_path_cap: int = 12):
    """One-dimensional consistency suite.

    Runs the two-point-grid schedule with the dyadic weight recipe and
    checks, per stage n < depth:

    * budget_dual_path: the stage budget 2^-(n+1) log(1/Omega(2^(n+1)))
      computed from the exhaustive scan agrees with the convergent-based
      fast path to 1e-12 relative;
    * drop_within_budget: the realized drop delta_n - delta_{n+1} never
      exceeds the budget (+1e-15);
    * inner_modes_inactive: the binding mode is never an inner mode
      (the damping makes g/||alpha.l|| <= 1 below scale 2^n);
    * two_point_symmetry: delta_{+1,n} == delta_{-1,n} exactly;
    * caps_dual_path / binding_bisection: the closed-form stage caps agree
      with an independent mpf re-derivation (1e-12) and with a bisection
      solve of the binding mode's raw inequality (1e-10); these mode-loop
      re-derivations run up to stage dual_path_cap.

    Returns (report, details) where details carries the schedule, the
    budgets, and the reference schedule that drops by exactly the budget.
    """
    x = alpha_1d[0] if isinstance(alpha_1d, (tuple, list)) else alpha_1d
    alpha = (x,)
    records = []
    weights = dimension_one_weights(alpha, depth, gothic_d=gothic_d,
                               records=records)
    grid = DirectionGrid.pair()
    sched = delta_schedule(alpha, grid, weights, depth, variant="full_range")
    rep = VerificationReport("one-dimensional schedule checks", {
        "depth": depth, "gothic_d": gothic_d, "phi_convention": PHI_NOTE,
        "weights": "c_n = 2 pi 2^-n log(1/Omega(2^n))"})
    oracle = DivisorOracle(alpha)

    budgets = []
    for n in range(depth):
        scan = records[n]                       # Omega(2^(n+1)) record
        budget = mpmath.log(1 / scan.value_mpf()) / (1 << (n + 1))
        budgets.append(budget)
        fast = omega_min_1d(alpha, 1 << (n + 1))
        fast_budget = mpmath.log(1 / fast.value_mpf()) / (1 << (n + 1))
        rel = abs(budget - fast_budget) / budget if budget != 0 else mpmath.mpf(0)
        rep.add("budget_dual_path", f"stage {n}", bool(rel <= 1e-12),
                margin=mpmath.nstr(rel, 4))

    for n in range(min(depth, sched.stages() - 1)):
        drop = sched.values[n][0] - sched.values[n + 1][0]
        ok = drop <= float(budgets[n]) + 1e-15
        rep.add("drop_within_budget", f"stage {n}", bool(ok),
                margin=f"drop = {drop!r}, budget = {mpmath.nstr(budgets[n], 12)}")
        arg = sched.argmins[n + 1][0]
        rep.add("inner_modes_inactive", f"stage {n}",
                arg is None or sup_norm(arg) > (1 << n),
                margin=f"binding mode = {arg}")
        rep.add("two_point_symmetry", f"stage {n}",
                sched.values[n + 1][0] == sched.values[n + 1][1])

        if n >= dual_path_cap:
            continue
        caps = _independent_stage_caps(oracle, grid, weights,
                                       sched.values[n], n, "full_range")
        merged = min(caps)                      # two-point neighborhood
        got = sched.values[n + 1][0]
        rep.add("caps_dual_path", f"stage {n}",
                bool(abs(merged - got) <= 1e-12 * max(1.0, abs(got))),
                margin=mpmath.nstr(abs(merged - got), 4))
        if arg is not None:
            dist = oracle.distance(arg)
            g_log = -(1 << n) * float(weights.c[n]) if sup_norm(arg) <= (1 << n) else 0.0
            log_m = TWO_PI * float(sched.values[n][0]) * abs(arg[0])
            bis = _bisect_mode_cap(dist, g_log, log_m, abs(arg[0]),
                                   hi=float(sched.values[n][0]))
            rep.add("binding_bisection", f"stage {n}",
                    bool(abs(bis - got) <= 1e-10 * max(1.0, abs(got))),
                    margin=mpmath.nstr(abs(float(bis) - got), 4))

    reference = [float(gothic_d)]
    for b in budgets:
        reference.append(reference[-1] - float(b))
    details = {
        "schedule": sched,
        "budgets": budgets,
        "reference": reference,
        "inf_delta": sched.inf_delta(),
        "cumulative_budget": float(mpmath.fsum(budgets)),
    }
    return rep, details


# ---------------------------------------------------------------------------
# classification


@dataclass
class ClassificationReport:
    dimension: int
    depth: int
    bryuno_partial_sum: float
    bryuno_terms: list
    headline: dict
    dimension_one_consistent: bool | None
    label: str = "finite-depth evidence, not a proof"

    def to_jsonable(self) -> dict:
        return {
            "dimension": self.dimension,
            "depth": self.depth,
            "bryuno_partial_sum": self.bryuno_partial_sum,
            "bryuno_terms": self.bryuno_terms,
            "schedule": self.headline,
            "dimension_one_consistent": self.dimension_one_consistent,
            "label": self.label,
        }


def classify(alpha, depth: int = 8, weights: WeightSequence | None = None,
             grid: DirectionGrid | None = None, variant: str = "full_range",
             c1: float = 1.0) -> ClassificationReport:
    """Finite-depth arithmetic profile of a frequency vector.

    Combines the dyadic Bryuno partial sum with a schedule run; for d = 1
    the one-dimensional consistency flag compares the two verdicts (both are
    evidence at depth, never a proof).  Propagates ResonanceDetected and,
    in strict grid mode, GridTooCoarse.
    """
    alpha = tuple(alpha)
    d = len(alpha)
    records = []
    if weights is None:
        weights = dyadic_weight_recipe(alpha, depth, records=records)
    else:
        from .diophantine import bryuno_partial_sum
        bryuno_partial_sum(alpha, depth + 2, records=records)
    if grid is None:
        grid = DirectionGrid.pair() if d == 1 else DirectionGrid.circle(64)
    sched = delta_schedule(alpha, grid, weights, depth, variant=variant, c1=c1)
    terms = []
    total = mpmath.mpf(0)
    for k, rec in enumerate(records[:depth], start=1):
        term = mpmath.log(1 / rec.value_mpf()) / (1 << k)
        total += term
        terms.append(float(term))
    consistent = None
    if d == 1:
        consistent = bool(sched.inf_delta() > 0)
    return ClassificationReport(
        dimension=d,
        depth=depth,
        bryuno_partial_sum=float(total),
        bryuno_terms=terms,
        headline=sched.headline(),
        dimension_one_consistent=consistent,
    )
