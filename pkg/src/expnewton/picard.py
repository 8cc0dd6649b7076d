"""Fixed-point construction of the axis solution near r = 0.

The operator

    (T u)(r) = int_0^r f^{-1}( (1/s) int_0^s t g(u'(t)) dt ) ds

only reads ``u'``, so the iteration carries the slope as its unknown, sampled
at Gauss nodes of a panel grid on [0, R], and recovers ``u`` by quadrature.
Norms are the C^1 norm ``sup|u| + sup|u'|`` over edges and nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BadConfig, BadEpsilon, InnerOverflow, NoConvergence
from .model import M0, M1, flux_inverse, momentum_flux, momentum_flux_prime, pressure_gain, pressure_gain_prime
from .quadrature import PanelGrid
from .radial import RadialProfile


class RadiusChoice(NamedTuple):
    R: float
    m2: float
    L_finv: float
    L_g: float


@dataclass(frozen=True)
class PicardConfig:
    epsilon: float = 0.2
    R: float | None = None  # None: the provable bound from choose_radius
    quad_nodes: int = 8
    panels: int = 64
    max_iter: int = 100
    conv_tol: float = 1e-12
    override_radius: bool = False

    def resolve(self) -> tuple[float, RadiusChoice]:
        choice = choose_radius(self.epsilon)
        if self.quad_nodes < 2 or self.panels < 1 or self.max_iter < 1 or not self.conv_tol > 0:
            raise BadConfig("quad_nodes >= 2, panels >= 1, max_iter >= 1 and conv_tol > 0 are required")
        R = choice.R if self.R is None else float(self.R)
        if not R > 0:
            raise BadConfig(f"R must be positive, got {R!r}")
        if R > choice.R and not self.override_radius:
            raise BadConfig(f"R={R!r} exceeds the contraction bound {choice.R!r}; pass override_radius to force it")
        return R, choice


@dataclass
class PicardReport:
    iterations: int
    diffs: list[float]
    observed_ratio: float
    final: RadialProfile
    radius: RadiusChoice
    fixed_point_residual: float = float("nan")
    grid: PanelGrid | None = field(default=None, repr=False)


def choose_radius(epsilon: float, samples: int = 100_001) -> RadiusChoice:
    """Interval radius for which T maps the epsilon-ball into itself and contracts.

    ``m2 = f(epsilon/2)``; the Lipschitz constants are maxima of the closed-form
    derivatives over a dense sample plus the endpoints.  The inverse flux is
    measured over its actual argument range [-m2, m2], i.e. over slopes in
    [-epsilon/2, epsilon/2].
    """
    if not (0.0 < epsilon < M0):
        raise BadEpsilon(f"epsilon must lie in (0, 1/sqrt(3)), got {epsilon!r}")
    half = 0.5 * epsilon
    xs = np.concatenate([np.linspace(-half, half, samples), [-half, half]])
    m2 = float(momentum_flux(half))
    L_finv = float(np.max(1.0 / momentum_flux_prime(xs)))
    L_g = float(np.max(np.abs(pressure_gain_prime(xs))))
    L = L_finv * L_g
    R = min(2.0 * m2, 1.0 / np.sqrt(L), 1.0 / (2.0 * L), 1.0 - 1e-9)
    return RadiusChoice(float(R), m2, L_finv, L_g)


def make_grid(config: PicardConfig) -> PanelGrid:
    R, _ = config.resolve()
    return PanelGrid(0.0, R, config.panels, config.quad_nodes)


def c1_norm(u, p) -> float:
    return float(np.max(np.abs(u)) + np.max(np.abs(p)))


def _apply(grid: PanelGrid, p_nodes: np.ndarray, m2: float | None):
    """One application of T to node slopes; returns edge/node values of Tu and (Tu)'."""
    integrand = grid.nodes * pressure_gain(p_nodes)
    inner_edges, inner_nodes = grid.cumulative(integrand)
    avg_nodes = inner_nodes / grid.nodes
    avg_edges = np.zeros_like(inner_edges)
    avg_edges[1:] = inner_edges[1:] / grid.edges[1:]
    peak = max(np.max(np.abs(avg_nodes)), np.max(np.abs(avg_edges)))
    bound = M1 if m2 is None else m2 * (1.0 + 1e-12)
    if peak > bound:
        raise InnerOverflow(f"inner average {peak!r} exceeds {bound!r}")
    v_nodes = flux_inverse(avg_nodes)
    v_edges = flux_inverse(avg_edges)
    u_edges, u_nodes = grid.cumulative(v_nodes)
    return u_edges, u_nodes, v_edges, v_nodes


def _profile(grid: PanelGrid, u_edges, u_nodes, v_edges, v_nodes) -> RadialProfile:
    def dense(r):
        return (float(grid.integrate_to(v_nodes, u_edges, r)), float(grid.interpolate(v_nodes, r)))

    return RadialProfile(grid.points, grid.split(u_edges, u_nodes), grid.split(v_edges, v_nodes),
                         "picard", dense=dense)


def _node_slopes(u: RadialProfile, grid: PanelGrid) -> np.ndarray:
    if u.r.shape == grid.points.shape and np.allclose(u.r, grid.points, rtol=0, atol=1e-15):
        _, p_nodes = grid.unmerge(np.asarray(u.p, dtype=float))
        return p_nodes
    return np.array([u.evaluate(r)[1] for r in grid.nodes.ravel()]).reshape(grid.nodes.shape)


def apply_T(u: RadialProfile, config: PicardConfig = PicardConfig(), grid: PanelGrid | None = None) -> RadialProfile:
    """``T u`` sampled on the Picard grid, with its derivative channel."""
    R, choice = config.resolve()
    grid = grid or PanelGrid(0.0, R, config.panels, config.quad_nodes)
    m2 = None if config.override_radius and R > choice.R else choice.m2
    return _profile(grid, *_apply(grid, _node_slopes(u, grid), m2))


def picard_solve(config: PicardConfig = PicardConfig()) -> PicardReport:
    """Iterate ``u_{k+1} = T u_k`` from ``u_0 = 0`` until the C^1 step is below ``conv_tol``."""
    R, choice = config.resolve()
    grid = PanelGrid(0.0, R, config.panels, config.quad_nodes)
    m2 = None if R > choice.R else choice.m2
    u_e, u_n = np.zeros(grid.panels + 1), np.zeros(grid.nodes.shape)
    v_e, v_n = np.zeros_like(u_e), np.zeros_like(u_n)
    diffs: list[float] = []
    for k in range(1, config.max_iter + 1):
        nu_e, nu_n, nv_e, nv_n = _apply(grid, v_n, m2)
        d = c1_norm(np.concatenate([nu_e - u_e, (nu_n - u_n).ravel()]),
                    np.concatenate([nv_e - v_e, (nv_n - v_n).ravel()]))
        diffs.append(d)
        u_e, u_n, v_e, v_n = nu_e, nu_n, nv_e, nv_n
        if d < config.conv_tol:
            break
    else:
        raise NoConvergence(f"no convergence after {config.max_iter} iterations; last step {diffs[-1]!r}")
    ratios = [b / a for a, b in zip(diffs[:-1], diffs[1:]) if a > 0]
    t_e, t_n, tv_e, tv_n = _apply(grid, v_n, m2)
    resid = c1_norm(np.concatenate([t_e - u_e, (t_n - u_n).ravel()]),
                    np.concatenate([tv_e - v_e, (tv_n - v_n).ravel()]))
    return PicardReport(iterations=k, diffs=diffs, observed_ratio=max(ratios) if ratios else 0.0,
                        final=_profile(grid, u_e, u_n, v_e, v_n), radius=choice._replace(R=R),
                        fixed_point_residual=resid, grid=grid)


def random_ball_profile(grid: PanelGrid, epsilon: float, rng: np.random.Generator, modes: int = 6) -> RadialProfile:
    """Random smooth profile with C^1 norm at most ``epsilon`` on ``grid``."""
    R = grid.b
    k = np.arange(1, modes + 1)
    amp = rng.normal(size=modes) / k
    phase = rng.uniform(0, 2 * np.pi, size=modes)

    def slope(t):
        return np.sin(np.multiply.outer(t, k) * np.pi / R + phase) @ amp

    p_nodes = slope(grid.nodes)
    u_edges, u_nodes = grid.cumulative(p_nodes, start=rng.normal())
    p = grid.split(slope(grid.edges), p_nodes)
    u = grid.split(u_edges, u_nodes)
    scale = rng.uniform(0.05, 1.0) * epsilon / c1_norm(u, p)
    return RadialProfile(grid.points, u * scale, p * scale, "random")


def contraction_ratios(config: PicardConfig, pairs: int = 20, seed: int = 0) -> np.ndarray:
    """``||Tu - Tw|| / ||u - w||`` for random pairs in the epsilon-ball."""
    rng = np.random.default_rng(seed)
    grid = make_grid(config)
    out = []
    for _ in range(pairs):
        u = random_ball_profile(grid, config.epsilon, rng)
        w = random_ball_profile(grid, config.epsilon, rng)
        Tu, Tw = apply_T(u, config, grid), apply_T(w, config, grid)
        out.append(c1_norm(Tu.u - Tw.u, Tu.p - Tw.p) / c1_norm(u.u - w.u, u.p - w.p))
    return np.array(out)
