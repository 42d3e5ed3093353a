"""Mild solutions by Picard fixed-point iteration on the Duhamel window.

Each window of length dt advances the stacked species state with an
exponential (phi1/phi2) trapezoidal rule: the diffusion semigroup is applied
exactly as a Fourier multiplier, and the Duhamel integral of the reaction
term is approximated by its exponential trapezoidal weights, which is exact
for forcings linear in time.  The fixed point of the resulting map is found
by Picard iteration in the relative sup norm; a diverging window is retried
with a halved step.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeInitialData, NonFiniteInput, PicardDivergence
from .rds_model import ReactionModel
from .spectral_core import Field, Grid, make_grid


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    horizon: float
    alpha: float = 0.5
    picard_tol: float = 1e-10
    picard_max: int = 50
    dealias: bool = True
    blowup_factor: float = 1e6  # threshold = factor * initial sup-norm
    store_every: int = 1
    max_halvings: int = 45

    def __post_init__(self):
        if self.dt <= 0 or self.horizon <= 0 or self.dt > self.horizon:
            raise ValueError("need 0 < dt <= horizon")
        if self.picard_max < 2:
            raise ValueError("picard_max must be >= 2")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")


@dataclass
class StepDiagnostics:
    picard_iterations: int
    residual: float
    min_value: list  # per species
    sup_value: list  # per species
    total_mass: list  # per species


@dataclass
class Trajectory:
    grid: Grid
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)  # stacked (m, ...) arrays
    diagnostics: list = field(default_factory=list)
    blowup_time: float | None = None

    # step-resolved records (kept even when states are thinned)
    step_times: list = field(default_factory=list)
    step_diagnostics: list = field(default_factory=list)


def _diag(grid: Grid, u: np.ndarray) -> StepDiagnostics:
    vol = grid.cell_volume
    return StepDiagnostics(
        picard_iterations=0,
        residual=0.0,
        min_value=[float(ui.min()) for ui in u],
        sup_value=[float(np.abs(ui).max()) for ui in u],
        total_mass=[float(vol * ui.sum()) for ui in u],
    )


def _dealias_mask(grid: Grid) -> np.ndarray:
    """2/3-rule mask on the rfftn spectral layout."""
    n = grid.points_per_axis
    cut = n // 3
    full = np.abs(np.fft.fftfreq(n) * n)
    half = np.abs(np.fft.rfftfreq(n) * n)
    axes = [full] * (grid.dims - 1) + [half]
    mesh = np.meshgrid(*axes, indexing="ij")
    mask = np.ones(mesh[0].shape, dtype=bool)
    for a in mesh:
        mask &= a <= cut
    return mask


class _Stepper:
    """Precomputed multipliers for one (grid, model, alpha, dt) combination."""

    def __init__(self, grid: Grid, model: ReactionModel, alpha: float, dealias: bool):
        self.grid = grid
        self.model = model
        self.alpha = alpha
        self.lam = grid.wavenumbers_squared() ** alpha  # |xi|^(2 alpha)
        self.mask = _dealias_mask(grid) if dealias else None
        self._cache = {}

    def weights(self, dt: float):
        try:
            return self._cache[dt]
        except KeyError:
            pass
        E, phi1, phi2 = [], [], []
        for d in self.model.d:
            z = d * dt * self.lam
            e = np.exp(-z)
            small = z < 1e-5
            with np.errstate(divide="ignore", invalid="ignore"):
                p1 = -np.expm1(-z) / z
                p2 = (z + np.expm1(-z)) / z**2
            p1[small] = 1.0 - z[small] / 2.0 + z[small] ** 2 / 6.0
            p2[small] = 0.5 - z[small] / 6.0 + z[small] ** 2 / 24.0
            E.append(e)
            phi1.append(p1)
            phi2.append(p2)
        w = (np.stack(E), np.stack(phi1), np.stack(phi2))
        if len(self._cache) < 64:
            self._cache[dt] = w
        return w

    def _rates_hat(self, u: np.ndarray, t: float) -> np.ndarray:
        f = np.asarray(self.model.f(u, t), dtype=float)
        fhat = np.stack([np.fft.rfftn(fi) for fi in f])
        if self.mask is not None:
            fhat *= self.mask
        return fhat

    def step(self, u: np.ndarray, t: float, dt: float, tol: float, max_iter: int):
        """One Duhamel window; returns (u_next, iterations, residual)."""
        shape = self.grid.shape
        axes = range(self.grid.dims)
        E, phi1, phi2 = self.weights(dt)
        uhat = np.stack([np.fft.rfftn(ui) for ui in u])
        fhat_n = self._rates_hat(u, t)
        base = E * uhat + dt * (phi1 - phi2) * fhat_n

        # exponential-Euler predictor
        w = np.stack(
            [np.fft.irfftn(E[i] * uhat[i] + dt * phi1[i] * fhat_n[i], s=shape, axes=axes)
             for i in range(len(u))]
        )
        scale = max(float(np.max(np.abs(u))), 1e-300)
        prev_res = np.inf
        for it in range(1, max_iter + 1):
            fhat_w = self._rates_hat(w, t + dt)
            w_new = np.stack(
                [np.fft.irfftn(base[i] + dt * phi2[i] * fhat_w[i], s=shape, axes=axes)
                 for i in range(len(u))]
            )
            if not np.all(np.isfinite(w_new)):
                raise PicardDivergence(f"non-finite iterate at t={t:.6g}, dt={dt:.3g}")
            res = float(np.max(np.abs(w_new - w))) / max(scale, float(np.max(np.abs(w_new))))
            w = w_new
            if res < tol:
                return w, it, res
            prev_res = res
        raise PicardDivergence(
            f"no contraction to {tol:.1e} within {max_iter} iterations at "
            f"t={t:.6g} (last residual {prev_res:.3g}); dt likely too large"
        )


def solve_mild(model: ReactionModel, u0, cfg: SolverConfig) -> Trajectory:
    """Advance the system on [0, horizon]; returns a (possibly truncated)
    Trajectory when the blow-up threshold is exceeded."""
    u = np.stack([np.asarray(f.values if isinstance(f, Field) else f, dtype=float)
                  for f in u0])
    if u.shape[0] != model.m:
        raise ValueError(f"expected {model.m} species, got {u.shape[0]}")
    if not np.all(np.isfinite(u)):
        raise NonFiniteInput("initial data contains NaN/Inf")
    if np.min(u) < 0:
        raise NegativeInitialData(f"negative initial value {np.min(u):.3g}")

    # recover the grid from the first Field, else require explicit grid
    if isinstance(u0[0], Field):
        grid = u0[0].grid
    else:
        raise TypeError("u0 must be a sequence of Fields")

    threshold = cfg.blowup_factor * max(
        sum(float(np.max(np.abs(ui))) for ui in u), 1e-300
    )
    stepper = _Stepper(grid, model, cfg.alpha, cfg.dealias)

    traj = Trajectory(grid=grid)
    traj.times.append(0.0)
    traj.states.append(u.copy())
    traj.diagnostics.append(_diag(grid, u))
    traj.step_times.append(0.0)
    traj.step_diagnostics.append(traj.diagnostics[0])

    t = 0.0
    dt_cur = cfg.dt
    halvings = 0
    steps_since_store = 0
    eps = 1e-12 * cfg.horizon
    while t < cfg.horizon - eps:
        dt_step = min(dt_cur, cfg.horizon - t)
        try:
            u_next, iters, res = stepper.step(
                u, t, dt_step, cfg.picard_tol, cfg.picard_max
            )
        except PicardDivergence:
            if halvings >= cfg.max_halvings:
                raise
            dt_cur /= 2.0
            halvings += 1
            continue
        t += dt_step
        u = u_next
        d = _diag(grid, u)
        d.picard_iterations = iters
        d.residual = res
        traj.step_times.append(t)
        traj.step_diagnostics.append(d)
        steps_since_store += 1
        if steps_since_store >= cfg.store_every or t >= cfg.horizon - eps:
            traj.times.append(t)
            traj.states.append(u.copy())
            traj.diagnostics.append(d)
            steps_since_store = 0
        if sum(d.sup_value) > threshold:
            traj.blowup_time = t
            break
    return traj


def detect_blowup(traj: Trajectory, threshold: float):
    """First recorded time where sum_i ||u_i||_inf exceeds threshold, or None."""
    for t, d in zip(traj.step_times, traj.step_diagnostics):
        if sum(d.sup_value) > threshold:
            return t
    return None


# ----------------------------------------------------------------------
# Checkpoint I/O: CSV state dump with a grid header, resumable.
# ----------------------------------------------------------------------

def save_checkpoint(path, grid: Grid, time: float, state: np.ndarray):
    state = np.asarray(state)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dims", grid.dims])
        w.writerow(["points_per_axis", grid.points_per_axis])
        w.writerow(["extent", repr(grid.extent)])
        w.writerow(["time", repr(float(time))])
        w.writerow(["species", state.shape[0]])
        w.writerow([f"u{i}" for i in range(state.shape[0])])
        flat = state.reshape(state.shape[0], -1)
        for row in flat.T:
            w.writerow([repr(float(x)) for x in row])


def load_checkpoint(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        dims = int(next(r)[1])
        n = int(next(r)[1])
        extent = float(next(r)[1])
        time = float(next(r)[1])
        m = int(next(r)[1])
        next(r)  # column header
        data = np.array([[float(x) for x in row] for row in r])
    grid = make_grid(dims, extent, n)
    state = data.T.reshape((m,) + grid.shape)
    return grid, time, state
