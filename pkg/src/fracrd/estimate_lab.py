"""Numerical verification of a-priori estimates and the exponent ladder.

Covers the time-integrated v-function and its ratio coefficient b, Holder
seminorm estimation, the Stroock-Varopoulos and fractional
Gagliardo-Nirenberg inequalities, L^2 maximal regularity of the fractional
heat operator, space-time / weak-norm reports, and the duality-bootstrap
exponent recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EllOutOfRange,
    EmptyTrajectory,
    GammaOutOfRange,
    NonUniformTimeGrid,
    P0TooSmall,
    QOutOfRange,
    RhoInadmissible,
    TooFewSlices,
    ZeroField,
)
from .mild_solver import Trajectory
from .spectral_core import Field, FracPower, frac_power, integral, lp_norm


# ----------------------------------------------------------------------
# v-function and b-coefficient
# ----------------------------------------------------------------------

B_DEFINED_REL_TOL = 1e-12  # nodes with sum u_i below this x scale are 0/0


@dataclass
class VDiagnostics:
    grid: object
    times: list
    v: list  # Field values per time (time integral of sum d_i u_i)
    b: list  # ratio sum u_i / sum d_i u_i, NaN where undefined
    b_defined: list  # boolean masks
    b_bounds_ok: bool
    b_min: float
    b_max: float
    holder: dict = field(default_factory=dict)


def accumulate_v(traj: Trajectory, d) -> VDiagnostics:
    """Trapezoidal time integral v of sum_i d_i u_i, plus the b ratio."""
    if not traj.states:
        raise EmptyTrajectory("trajectory has no states")
    d = np.asarray(d, dtype=float)
    times = list(traj.times)
    integrand = [np.tensordot(d, s, axes=(0, 0)) for s in traj.states]
    sums = [np.sum(s, axis=0) for s in traj.states]

    scale = max(max(float(np.max(np.abs(s))) for s in sums), 1e-300)
    thresh = B_DEFINED_REL_TOL * scale

    v = [np.zeros(traj.grid.shape)]
    for k in range(1, len(times)):
        dt = times[k] - times[k - 1]
        v.append(v[-1] + 0.5 * dt * (integrand[k] + integrand[k - 1]))

    b, masks = [], []
    bmin, bmax = math.inf, -math.inf
    for su, sdu in zip(sums, integrand):
        defined = su > thresh
        ratio = np.full(traj.grid.shape, np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[defined] = su[defined] / sdu[defined]
        b.append(ratio)
        masks.append(defined)
        if defined.any():
            bmin = min(bmin, float(ratio[defined].min()))
            bmax = max(bmax, float(ratio[defined].max()))

    lo, hi = 1.0 / max(d), 1.0 / min(d)
    tol = 1e-9 * hi
    ok = (bmin == math.inf) or (bmin >= lo - tol and bmax <= hi + tol)
    return VDiagnostics(
        grid=traj.grid,
        times=times,
        v=v,
        b=b,
        b_defined=masks,
        b_bounds_ok=bool(ok),
        b_min=bmin,
        b_max=bmax,
    )


ALL_PAIRS_NODE_LIMIT = 4096
RANDOM_PAIR_COUNT = 100_000
MAX_HOLDER_SLICES = 16


def _wrapped_distance(grid, idx_a, idx_b):
    """Periodic Euclidean distance between two flat node index arrays."""
    h = grid.spacing
    L = grid.extent
    n = grid.points_per_axis
    a = np.unravel_index(idx_a, grid.shape)
    b = np.unravel_index(idx_b, grid.shape)
    d2 = np.zeros(np.shape(idx_a))
    for ax in range(grid.dims):
        dx = np.abs(a[ax] - b[ax]) * h
        dx = np.minimum(dx, L - dx)
        d2 += dx * dx
    return np.sqrt(d2)


def holder_seminorm(vtraj: VDiagnostics, gamma: float, seed: int = 0):
    """Empirical parabolic Holder seminorms of v at exponent gamma.

    Returns (space, parabolic): the spatial part maximises
    |v(x,t)-v(y,t)| / dist(x,y)^gamma over node pairs, the parabolic part
    |v(x,t)-v(x,s)| / |t-s|^(gamma/2) over time pairs at fixed nodes.
    """
    if not (0.0 < gamma < 1.0):
        raise GammaOutOfRange(f"gamma must lie in (0,1), got {gamma}")
    if len(vtraj.times) < 2:
        raise TooFewSlices("need at least 2 time slices")
    grid = vtraj.grid
    nn = grid.node_count

    stride = max(1, len(vtraj.times) // MAX_HOLDER_SLICES)
    picks = list(range(0, len(vtraj.times), stride))
    if picks[-1] != len(vtraj.times) - 1:
        picks.append(len(vtraj.times) - 1)

    if nn <= ALL_PAIRS_NODE_LIMIT:
        ia, ib = np.triu_indices(nn, k=1)
    else:
        rng = np.random.default_rng(seed)
        ia = rng.integers(0, nn, RANDOM_PAIR_COUNT)
        ib = rng.integers(0, nn, RANDOM_PAIR_COUNT)
        keep = ia != ib
        ia, ib = ia[keep], ib[keep]
    dist = _wrapped_distance(grid, ia, ib) ** gamma

    space = 0.0
    for k in picks:
        flat = vtraj.v[k].ravel()
        space = max(space, float(np.max(np.abs(flat[ia] - flat[ib]) / dist)))

    parabolic = 0.0
    for i, ki in enumerate(picks):
        for kj in picks[i + 1:]:
            dtpow = abs(vtraj.times[kj] - vtraj.times[ki]) ** (gamma / 2.0)
            if dtpow == 0.0:
                continue
            diff = float(np.max(np.abs(vtraj.v[kj] - vtraj.v[ki])))
            parabolic = max(parabolic, diff / dtpow)

    vtraj.holder[gamma] = (space, parabolic)
    return space, parabolic


# ----------------------------------------------------------------------
# Functional inequalities
# ----------------------------------------------------------------------

def stroock_varopoulos_gap(v: Field, alpha: float, ell: float) -> float:
    """int |v|^(l-2) v (-Dl)^a v dx - 4(l-1)/l^2 * int |(-Dl)^(a/2) |v|^(l/2)|^2 dx."""
    if ell <= 1:
        raise EllOutOfRange(f"ell must exceed 1, got {ell}")
    lhs_integrand = np.abs(v.values) ** (ell - 2.0) * v.values
    lhs = integral(Field(v.grid, lhs_integrand * frac_power(v, FracPower(alpha)).values))
    # signed power |v|^(l/2 - 1) v: equals |v|^(l/2) on the nonnegative cone
    # and makes the l = 2 case collapse to Parseval equality for signed v too
    half = frac_power(
        Field(v.grid, np.abs(v.values) ** (ell / 2.0 - 1.0) * v.values),
        FracPower(alpha / 2.0),
    )
    rhs = integral(Field(v.grid, half.values**2))
    return lhs - (4.0 * (ell - 1.0) / ell**2) * rhs


def gn_theta(dims: int, alpha: float, q: float) -> float:
    """Interpolation exponent theta = (2 a q - N(q-2)) / (2 a q)."""
    return (2.0 * alpha * q - dims * (q - 2.0)) / (2.0 * alpha * q)


def critical_exponent(dims: int, alpha: float) -> float:
    """Fractional Sobolev exponent 2N/(N-2a), infinite when a >= N/2."""
    if alpha >= dims / 2.0:
        return math.inf
    return 2.0 * dims / (dims - 2.0 * alpha)


def gn_ratio(v: Field, alpha: float, q: float) -> float:
    """||v||_q / (||v||_2^theta ||(-Dl)^(a/2) v||_2^(1-theta))."""
    crit = critical_exponent(v.grid.dims, alpha)
    if not (2.0 < q < crit):
        raise QOutOfRange(f"need 2 < q < {crit}, got {q}")
    if not np.any(v.values):
        raise ZeroField("Gagliardo-Nirenberg ratio undefined for v == 0")
    theta = gn_theta(v.grid.dims, alpha, q)
    num = lp_norm(v, q)
    l2 = lp_norm(v, 2)
    half = lp_norm(frac_power(v, FracPower(alpha / 2.0)), 2)
    return num / (l2**theta * half ** (1.0 - theta))


# ----------------------------------------------------------------------
# Maximal regularity
# ----------------------------------------------------------------------

def maximal_reg_ratio(f_traj, times, alpha: float, mu: float, grid) -> float:
    """||(-Dl)^a u||_{L2(Q)} / ||f||_{L2(Q)} for u solving the forced
    fractional heat equation with zero initial datum.

    Each Fourier mode is a scalar linear ODE advanced with the exponential
    trapezoidal rule (exact for forcings linear in t between grid points).
    Returns 0 by convention for identically zero forcing.
    """
    times = np.asarray(times, dtype=float)
    if len(times) < 2:
        raise NonUniformTimeGrid("need at least two time points")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise NonUniformTimeGrid("time grid must be uniform")
    dt = float(dts[0])

    f = np.asarray(f_traj, dtype=float)
    if f.shape != (len(times),) + grid.shape:
        raise ValueError("f_traj must have shape (nt, *grid.shape)")
    if not np.any(f):
        return 0.0

    lam = grid.wavenumbers_squared() ** alpha
    z = mu * dt * lam
    E = np.exp(-z)
    small = z < 1e-5
    with np.errstate(divide="ignore", invalid="ignore"):
        phi1 = -np.expm1(-z) / z
        phi2 = (z + np.expm1(-z)) / z**2
    phi1[small] = 1.0 - z[small] / 2.0 + z[small] ** 2 / 6.0
    phi2[small] = 0.5 - z[small] / 6.0 + z[small] ** 2 / 24.0

    fhat = np.stack([np.fft.rfftn(fk) for fk in f])
    uhat = np.zeros_like(fhat[0])
    gsq = []  # ||(-Dl)^a u(t_k)||_2^2 via Parseval-free physical evaluation
    vol = grid.cell_volume

    def g_norm_sq(uh):
        gvals = np.fft.irfftn(lam * uh, s=grid.shape, axes=range(grid.dims))
        return float(vol * np.sum(gvals**2))

    gsq.append(g_norm_sq(uhat))
    for k in range(len(times) - 1):
        uhat = E * uhat + dt * ((phi1 - phi2) * fhat[k] + phi2 * fhat[k + 1])
        gsq.append(g_norm_sq(uhat))

    w = np.full(len(times), dt)
    w[0] = w[-1] = 0.5 * dt  # trapezoidal time quadrature
    num = math.sqrt(float(np.dot(w, gsq)))
    den = math.sqrt(float(np.dot(w, [vol * np.sum(fk**2) for fk in f])))
    return num / den


def solve_forced_mode(times, lam: float, mu: float, fhat) -> np.ndarray:
    """Scalar-mode discrete solve used by maximal_reg_ratio, exposed for the
    closed-form oracle comparison."""
    times = np.asarray(times, dtype=float)
    dt = float(times[1] - times[0])
    z = mu * dt * lam
    if z < 1e-5:
        E = math.exp(-z)
        phi1 = 1.0 - z / 2.0 + z**2 / 6.0
        phi2 = 0.5 - z / 6.0 + z**2 / 24.0
    else:
        E = math.exp(-z)
        phi1 = -math.expm1(-z) / z
        phi2 = (z + math.expm1(-z)) / z**2
    u = np.zeros(len(times))
    for k in range(len(times) - 1):
        u[k + 1] = E * u[k] + dt * ((phi1 - phi2) * fhat[k] + phi2 * fhat[k + 1])
    return u


# ----------------------------------------------------------------------
# Norm reports
# ----------------------------------------------------------------------

WEAK_NORM_LEVELS = 64


@dataclass
class NormReport:
    p_list: list
    spacetime: dict  # (species, p) -> L^p(Q) norm
    windowed_sup: list  # per unit window: max_i sup_x u_i
    weak_p: float | None
    weak_norms: list | None  # per species
    frac_half_sup: list | None  # sup_t ||(-Dl)^(a/2) u_i||_inf per species
    frac_v_sup: float | None  # sup_t ||(-Dl)^a v||_inf


def _time_weights(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if len(t) == 1:
        return np.array([1.0])
    w = np.zeros(len(t))
    w[:-1] += 0.5 * np.diff(t)
    w[1:] += 0.5 * np.diff(t)
    return w


def norm_report(traj: Trajectory, p_list, weak_p=None, alpha=None, d=None) -> NormReport:
    """Space-time norms, windowed sup-norms, weak norm, fractional sups."""
    if not traj.states:
        raise EmptyTrajectory("trajectory has no states")
    grid = traj.grid
    vol = grid.cell_volume
    m = traj.states[0].shape[0]
    w = _time_weights(traj.times)

    spacetime = {}
    for p in p_list:
        for i in range(m):
            if math.isinf(p):
                val = max(float(np.max(np.abs(s[i]))) for s in traj.states)
            else:
                acc = sum(
                    wk * vol * float(np.sum(np.abs(s[i]) ** p))
                    for wk, s in zip(w, traj.states)
                )
                val = acc ** (1.0 / p)
            spacetime[(i, p)] = val

    # windowed sup over unit windows, from step-resolved diagnostics
    horizon = traj.step_times[-1]
    nwin = max(1, int(math.floor(horizon + 1e-9)))
    wins = [0.0] * nwin
    for t, dg in zip(traj.step_times, traj.step_diagnostics):
        k = min(int(t), nwin - 1)
        wins[k] = max(wins[k], max(dg.sup_value))

    weak_norms = None
    if weak_p is not None:
        weak_norms = []
        for i in range(m):
            sup = max(float(np.max(np.abs(s[i]))) for s in traj.states)
            if sup == 0.0:
                weak_norms.append(0.0)
                continue
            levels = np.geomspace(1e-6 * sup, sup, WEAK_NORM_LEVELS)
            best = 0.0
            for lam in levels:
                meas = sum(
                    wk * vol * float(np.sum(np.abs(s[i]) >= lam))
                    for wk, s in zip(w, traj.states)
                )
                best = max(best, lam * meas ** (1.0 / weak_p))
            weak_norms.append(best)

    frac_half_sup = None
    frac_v_sup = None
    if alpha is not None:
        half = FracPower(alpha / 2.0)
        frac_half_sup = [
            max(
                float(np.max(np.abs(frac_power(Field(grid, s[i]), half).values)))
                for s in traj.states
            )
            for i in range(m)
        ]
        if d is not None:
            vd = accumulate_v(traj, d)
            full = FracPower(alpha)
            frac_v_sup = max(
                float(np.max(np.abs(frac_power(Field(grid, vk), full).values)))
                for vk in vd.v
            )

    return NormReport(
        p_list=list(p_list),
        spacetime=spacetime,
        windowed_sup=wins,
        weak_p=weak_p,
        weak_norms=weak_norms,
        frac_half_sup=frac_half_sup,
        frac_v_sup=frac_v_sup,
    )


# ----------------------------------------------------------------------
# Duality-bootstrap exponent ladder
# ----------------------------------------------------------------------

LADDER_MAX_STEPS = 100


@dataclass
class ExponentLadder:
    dims: int
    alpha: float
    rho: float
    p0: float
    eps_star: float
    rho_max: float
    threshold: float
    sequence: list
    termination_index: int | None  # None means no termination in 100 steps
    diverged: bool


def rho_admissible_max(dims: int, alpha: float, eps_star: float = 0.0) -> float:
    """Admissibility cap min{1 + 2a(2+eps)/(N+2a), 2}."""
    return min(1.0 + 2.0 * alpha * (2.0 + eps_star) / (dims + 2.0 * alpha), 2.0)


def q_hat(dims: int, alpha: float, p: float) -> float:
    """Largest regularisation target exponent for L^p forcing.

    p=1 and p=(N+2a)/2a return open suprema ((N+2a)/N and +inf); above the
    critical value every finite exponent (and inf) is reachable.
    """
    crit = (dims + 2.0 * alpha) / (2.0 * alpha)
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return (dims + 2.0 * alpha) / dims
    if p < crit:
        return (dims + 2.0 * alpha) * p / (dims + 2.0 * alpha - 2.0 * p * alpha)
    return math.inf


def duality_ladder(dims: int, alpha: float, rho: float, p0: float, eps_star: float = 0.0) -> ExponentLadder:
    """Iterate p_{n+1} = (N+2a) p_n / (rho (N+2a) - 2a p_n) until the
    sequence clears the threshold (N+2a)/(2a rho)."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    if rho < 1.0:
        raise RhoInadmissible(f"rho must be >= 1, got {rho}")
    if eps_star < 0.0:
        raise ValueError("eps_star must be >= 0")
    rmax = rho_admissible_max(dims, alpha, eps_star)
    if rho > rmax + 1e-12:
        raise RhoInadmissible(f"rho = {rho} exceeds the admissible cap {rmax:.6g}")
    if p0 < 2.0:
        raise P0TooSmall(f"improved duality requires p0 >= 2, got {p0}")

    total = dims + 2.0 * alpha
    threshold = total / (2.0 * alpha * rho)
    seq = [float(p0)]
    term = None
    diverged = False
    if seq[0] >= threshold:
        term = 0
    else:
        for n in range(LADDER_MAX_STEPS):
            denom = rho * total - 2.0 * alpha * seq[-1]
            if denom <= 0.0:
                term = len(seq) - 1  # already past the usable range
                break
            seq.append(total * seq[-1] / denom)
            if seq[-1] >= threshold:
                term = len(seq) - 1
                break
        else:
            diverged = True

    return ExponentLadder(
        dims=dims,
        alpha=alpha,
        rho=rho,
        p0=float(p0),
        eps_star=eps_star,
        rho_max=rmax,
        threshold=threshold,
        sequence=seq,
        termination_index=term,
        diverged=diverged,
    )
