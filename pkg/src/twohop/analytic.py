"""Stochastic-geometry evaluation of the two-hop success probabilities.

The first hop is exact for a Poisson field of interferers under Rayleigh
fading.  The second hop follows the usual cluster approximation: each
source's forwarding set is treated as an independent inhomogeneous Poisson
process whose (isotropic) intensity depends on the selection rule.

Every intensity here is a radial function, so the interference functional
of a cluster seen from a receiver reduces to a kernel ``B(s, rho)`` of the
signal distance ``s`` and the receiver-to-cluster distance ``rho``::

    B(s, rho) = int_0^inf r * beta(s, r) * A(r, rho) dr
    A(r, rho) = int_0^{2 pi} D(|r e_phi + rho e_0|) dphi

where ``D`` is the radial cluster intensity.  ``A`` does not depend on
``s`` and is tabulated once per evaluation; everything else is fixed-node
Gauss-Legendre quadrature on panels chosen from the length scales of
``D`` and of the path loss.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, special

from .geometry import ParameterError, PathLossModel, path_loss
from .policies import (AllTransmit, CenterBaseline, DistanceThinning, RssThinning,
                       Sectorized, SelectionPolicy)


class UnsupportedPolicy(ParameterError):
    pass


class BudgetExceeded(RuntimeError):
    """The P2 pipeline hit its evaluation budget before converging."""

    def __init__(self, message, partial=None, achieved_tolerance=None):
        super().__init__(message)
        self.partial = partial
        self.achieved_tolerance = achieved_tolerance


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy and resolution knobs of the analytic engine.

    ``panels_per_cluster`` sets the uniform panel width as
    ``cluster_radius / panels_per_cluster``; ``cluster_radius`` is where
    the cluster intensity falls below ``truncation`` times its peak.
    ``far_factor`` places the end of the tabulated interference kernel at
    ``far_factor`` times the largest interference length scale.
    """

    rel_tol: float = 1e-6
    p2_rel_tol: float = 1e-3
    truncation: float = 1e-9
    gauss_order: int = 8
    panels_per_cluster: int = 16
    angular_octaves: int = 14
    radial_octaves: int = 24
    far_factor: float = 8.0
    table_size: int = 2049
    max_refinements: int = 3
    max_evaluations: int = 2_000_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.p2_rel_tol > 0 and 0 < self.truncation < 1):
            raise ParameterError("tolerances must be positive")
        if self.gauss_order < 2 or self.panels_per_cluster < 1:
            raise ParameterError("resolution parameters must be positive")

    def refined(self) -> QuadratureConfig:
        return QuadratureConfig(
            self.rel_tol, self.p2_rel_tol, self.truncation, self.gauss_order,
            2 * self.panels_per_cluster, self.angular_octaves + 2, self.radial_octaves + 2,
            self.far_factor * 1.5, 2 * self.table_size - 1, self.max_refinements,
            self.max_evaluations)


DEFAULT_QUAD = QuadratureConfig()


# "oriented": the tagged source's own forwarding set keeps its direction
# toward the destination; "averaged": it is replaced by the orientation
# average used for every other cluster.
OWN_CLUSTER_MODES = ("oriented", "averaged")


@dataclass(frozen=True)
class AnalyticInputs:
    lambda_s: float
    lambda_r: float
    R: float
    T: float = 3.0
    alpha: float = 4.0
    bounded: bool = False
    policy: SelectionPolicy = field(default_factory=AllTransmit)
    own_cluster: str = "oriented"

    def __post_init__(self):
        if self.own_cluster not in OWN_CLUSTER_MODES:
            raise ParameterError(f"own_cluster must be one of {OWN_CLUSTER_MODES}")
        if not (self.lambda_s >= 0 and self.lambda_r >= 0):
            raise ParameterError("densities must be non-negative")
        if not self.R > 0:
            raise ParameterError(f"R must be positive, got {self.R}")
        if not self.T > 0:
            raise ParameterError(f"T must be positive, got {self.T}")
        if isinstance(self.policy, CenterBaseline) or not self.policy.analytic:
            raise UnsupportedPolicy("the center-relay baseline has no analytic model; "
                                    "use the simulator")
        PathLossModel(self.alpha, self.bounded)

    @property
    def model(self) -> PathLossModel:
        return PathLossModel(self.alpha, self.bounded)


# -- quadrature helpers --------------------------------------------------------

def gauss_panels(breaks, order):
    """Gauss-Legendre nodes and weights on consecutive panels ``breaks[i], breaks[i+1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    b = np.asarray(breaks, dtype=float)
    a, c = b[:-1, None], b[1:, None]
    half = 0.5 * (c - a)
    nodes = (a + half * (x + 1)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _geometric_breaks(top, octaves):
    """``0, top*2**-octaves, ..., top/2, top``."""
    return np.concatenate([[0.0], top * 2.0 ** -np.arange(octaves, -1, -1)])


def _uniform_breaks(lo, hi, width):
    if hi <= lo:
        return np.array([lo])
    n = max(1, int(math.ceil((hi - lo) / width)))
    return np.linspace(lo, hi, n + 1)


# -- link level ------------------------------------------------------------------

def beta(x_dist, y_dist, T, model: PathLossModel):
    """``1 / (1 + g(x) / (T g(y)))``: outage contribution of one interferer.

    ``x_dist`` is the signal distance and ``y_dist`` the interferer distance.
    """
    gx = np.asarray(path_loss(model, x_dist))
    gy = np.asarray(path_loss(model, y_dist))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 / (1.0 + gx / (T * gy))
    return out if out.ndim else float(out)


def beta_integral_closed_form(d, T, alpha):
    """``pi d^2 T^(2/alpha) Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)`` (unbounded power law)."""
    k = 2.0 / alpha
    return math.pi * d * d * T ** k * special.gamma(1 + k) * special.gamma(1 - k)


def _interference_scale(d, T, model):
    """Interferer distance at which ``beta(d, .) = 1/2``."""
    g = path_loss(model, d)
    if np.isinf(g):
        return 0.0
    return float(model.inverse(g / T))


def beta_integral(d, T, model: PathLossModel, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``int_{R^2} beta(d, |y|) dy`` by adaptive quadrature in polar coordinates."""
    if not d > 0:
        raise ParameterError("d must be positive")
    gd = path_loss(model, d)
    scale = _interference_scale(d, T, model)

    def f(r):
        return 2 * math.pi * r / (1.0 + gd / (T * path_loss(model, r)))

    tol = min(quad.rel_tol, 1e-6) * 1e-3
    pieces = [(0.0, scale), (scale, 4 * scale)]
    if model.bounded and 1.0 < 4 * scale:
        pieces = [(0.0, min(1.0, scale)), (min(1.0, scale), scale), (scale, 4 * scale)]
    total = 0.0
    for a, b in pieces:
        if b > a:
            total += integrate.quad(f, a, b, epsabs=0, epsrel=tol, limit=200)[0]
    total += integrate.quad(f, 4 * scale, np.inf, epsabs=0, epsrel=tol, limit=200)[0]
    return total


class BetaIntegralTable:
    """Vectorised ``beta_integral(d, T)`` for arrays of ``d`` and (optionally) ``T``.

    For the pure power law ``int beta = K d^2 T^(2/alpha)`` by a change of
    variables, with ``K`` computed once by quadrature.  The capped model
    has no such scaling and is integrated point by point.
    """

    def __init__(self, model: PathLossModel, quad: QuadratureConfig = DEFAULT_QUAD):
        self.model = model
        self.quad = quad
        if not model.bounded:
            self.unit = beta_integral(1.0, 1.0, model, quad)

    def __call__(self, d, T):
        d = np.asarray(d, dtype=float)
        T = np.broadcast_to(np.asarray(T, dtype=float), d.shape)
        if not self.model.bounded:
            with np.errstate(invalid="ignore"):
                return self.unit * d * d * T ** (2.0 / self.model.alpha)
        out = np.empty(d.shape)
        for idx in np.ndindex(d.shape):
            out[idx] = beta_integral(d[idx], T[idx], self.model, self.quad) if d[idx] > 0 else 0.0
        return out


def p_success(d, inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD):
    """Probability that a receiver at distance ``d`` decodes a source while all sources transmit."""
    table = BetaIntegralTable(inputs.model, quad)
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 0):
        raise ParameterError("distance must be non-negative")
    out = np.exp(-inputs.lambda_s * table(d_arr, inputs.T))
    out = np.where(d_arr == 0, 1.0, out)
    return out if out.ndim else float(out)


def p1(inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    return p_success(inputs.R, inputs, quad)


# -- cluster intensity -------------------------------------------------------------

def _distance_weight(d, R, epsilon, order=8, octaves=14):
    """Angle average of ``exp(-2 eps |z - R e_nu| / R)`` over ``nu`` for ``|z| = d``."""
    d = np.asarray(d, dtype=float)
    if epsilon == 0:
        return np.ones_like(d)
    nu, w = gauss_panels(_geometric_breaks(math.pi, octaves), order)
    dist = np.sqrt(np.maximum(
        (d[..., None] - R) ** 2 + 4 * d[..., None] * R * np.sin(nu / 2) ** 2, 0.0))
    return np.exp(-2 * epsilon * dist / R) @ w / math.pi


class ClusterIntensity:
    """Radial intensity ``D(d)`` of one source's forwarding set, ``d`` = distance to the source."""

    def __init__(self, inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD):
        self.inputs = inputs
        self.quad = quad
        self.model = inputs.model
        self.table = BetaIntegralTable(self.model, quad)

    def __call__(self, d):
        """Exact evaluation (no tabulation)."""
        inp = self.inputs
        pol = inp.policy
        d = np.asarray(d, dtype=float)
        lam_s, lam_r, T = inp.lambda_s, inp.lambda_r, inp.T
        if isinstance(pol, RssThinning) and pol.delta > 0:
            g = np.asarray(path_loss(self.model, d), dtype=float)
            t_eff = T + pol.delta * g
            with np.errstate(invalid="ignore", over="ignore"):
                expo = np.where(np.isinf(g), np.inf, lam_s * self.table(d, np.where(np.isinf(g), T, t_eff)))
                val = lam_r * (1 + T) * np.exp(-expo) / (1 + t_eff)
            return np.where(np.isinf(g), 0.0, val)
        p = np.exp(-lam_s * self.table(d, T))
        p = np.where(d == 0, 1.0, p)
        if isinstance(pol, Sectorized):
            return (pol.theta / math.pi) * lam_r * p
        if isinstance(pol, DistanceThinning):
            return lam_r * p * _distance_weight(d, inp.R, pol.epsilon)
        return lam_r * p

    @cached_property
    def radius(self) -> float:
        """Distance beyond which ``D`` stays below ``truncation`` times its peak."""
        if self.inputs.lambda_s == 0:
            raise ParameterError("clusters are unbounded without source interference (lambda_s = 0)")
        r = 1.0 / math.sqrt(self.inputs.lambda_s * max(self.table(np.array(1.0), self.inputs.T), 1e-12))
        if isinstance(self.inputs.policy, DistanceThinning):
            r = max(r, self.inputs.R)
        for _ in range(60):
            grid = np.linspace(0, r, 257)
            vals = self(grid)
            peak = vals.max()
            if peak == 0 or vals[-1] <= self.quad.truncation * peak and vals[-64:].max() <= self.quad.truncation * peak:
                return r
            r *= 2.0
        raise RuntimeError("cluster intensity does not decay")

    @cached_property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.radius, self.quad.table_size)

    @cached_property
    def values(self) -> np.ndarray:
        return self(self.grid)

    def interp(self, d):
        """Tabulated ``D`` (linear interpolation, zero beyond the truncation radius)."""
        return np.interp(d, self.grid, self.values, right=0.0)

    @cached_property
    def mean_size(self) -> float:
        """Expected number of forwarding relays per source, ``int D``."""
        x, w = gauss_panels(_uniform_breaks(0, self.radius, self.radius / self.quad.panels_per_cluster),
                            self.quad.gauss_order)
        return float(2 * math.pi * np.sum(w * x * self(x)))


def _sector_breaks(r, R, theta):
    """Angles on the circle of radius ``r`` about ``(R, 0)`` where the sector edge is crossed.

    Angles are measured from the direction pointing back at the origin.
    """
    out = []
    disc = r * r - (R * math.sin(theta)) ** 2
    if disc < 0:
        return out
    for t in (R * math.cos(theta) - math.sqrt(disc), R * math.cos(theta) + math.sqrt(disc)):
        if t > 0:
            out.append(math.atan2(t * math.sin(theta), R - t * math.cos(theta)))
    return out


def delta_oriented(z, inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD):
    """Forwarding-set intensity of a source at the origin whose destination is ``(R, 0)``."""
    z = np.asarray(z, dtype=float)
    d = np.hypot(z[..., 0], z[..., 1])
    pol = inputs.policy
    if isinstance(pol, Sectorized):
        base = ClusterIntensity(_with_policy(inputs, AllTransmit()), quad)(d)
        ang = np.abs(np.arctan2(z[..., 1], z[..., 0]))
        out = np.where(ang < pol.theta, base, 0.0)
    elif isinstance(pol, DistanceThinning):
        base = ClusterIntensity(_with_policy(inputs, AllTransmit()), quad)(d)
        to_dest = np.hypot(z[..., 0] - inputs.R, z[..., 1])
        out = base * np.exp(-2 * pol.epsilon * to_dest / inputs.R)
    else:
        out = ClusterIntensity(inputs, quad)(d)
    return out if np.ndim(out) else float(out)


def _with_policy(inputs, policy):
    return AnalyticInputs(inputs.lambda_s, inputs.lambda_r, inputs.R, inputs.T,
                          inputs.alpha, inputs.bounded, policy, inputs.own_cluster)


def delta_tilde(z, inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD):
    """Intensity of a source-at-origin's forwarding set at point(s) ``z``."""
    z = np.asarray(z, dtype=float)
    d = np.hypot(z[..., 0], z[..., 1])
    out = ClusterIntensity(inputs, quad)(d)
    return out if np.ndim(out) else float(out)


# -- second hop -------------------------------------------------------------------

class SecondHop:
    """Tabulated pieces of the second-hop success probability for one parameter point."""

    def __init__(self, inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD):
        self.inputs = inputs
        self.quad = quad
        self.model = inputs.model
        self.D = ClusterIntensity(inputs, quad)
        self.evaluations = 0

    @cached_property
    def width(self) -> float:
        return self.D.radius / self.quad.panels_per_cluster

    def _charge(self, n):
        self.evaluations += int(n)
        if self.evaluations > self.quad.max_evaluations:
            raise BudgetExceeded(
                f"evaluation budget of {self.quad.max_evaluations} exceeded")

    def angular_average(self, r, rho):
        """``A(r, rho) = int_0^{2 pi} D(|r e_phi + rho e_0|) dphi`` for matching arrays."""
        phi, w = gauss_panels(_geometric_breaks(math.pi, self.quad.angular_octaves),
                              self.quad.gauss_order)
        r = np.asarray(r, dtype=float)[..., None]
        rho = np.asarray(rho, dtype=float)[..., None]
        dist = np.sqrt((r - rho) ** 2 + 4 * r * rho * np.sin(phi / 2) ** 2)
        self._charge(dist.size)
        return 2.0 * (self.D.interp(dist) @ w)

    def signal_range(self):
        R, a = self.inputs.R, self.D.radius
        return max(0.0, R - a), R + a

    @cached_property
    def s_nodes(self):
        lo, hi = self.signal_range()
        breaks = _uniform_breaks(lo, hi, self.width)
        if lo == 0.0:
            breaks = np.concatenate([_geometric_breaks(breaks[1], self.quad.radial_octaves)[:-1],
                                     breaks[1:]])
        return gauss_panels(breaks, self.quad.gauss_order)

    def interference_scale(self, s):
        return _interference_scale(s, self.inputs.T, self.model)

    @cached_property
    def rho_max(self) -> float:
        s_hi = self.signal_range()[1]
        return (max(self.inputs.R + 2 * self.D.radius,
                    self.quad.far_factor * max(self.interference_scale(s_hi), self.D.radius))
                + self.D.radius)

    @cached_property
    def rho_nodes(self):
        near = self.inputs.R + 2 * self.D.radius
        breaks = _uniform_breaks(0.0, near, self.width)
        if self.rho_max > near:
            n = max(1, int(math.ceil(math.log(self.rho_max / near) / math.log(1.25))))
            breaks = np.concatenate([breaks, near * (self.rho_max / near) ** (np.arange(1, n + 1) / n)])
        return gauss_panels(breaks, self.quad.gauss_order)

    @cached_property
    def r_nodes(self):
        top = self.rho_max + self.D.radius
        uni = _uniform_breaks(self.width, top, self.width)
        breaks = np.concatenate([_geometric_breaks(self.width, self.quad.radial_octaves)[:-1], uni])
        return gauss_panels(breaks, self.quad.gauss_order)

    def kernel_columns(self, rho):
        """``A(r_i, rho_j)`` on the radial nodes for each ``rho_j``; zero outside the band."""
        r, _ = self.r_nodes
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        a = self.D.radius
        out = np.zeros((len(r), len(rho)))
        for j, p in enumerate(rho):
            band = np.flatnonzero(np.abs(r - p) <= a)
            if len(band):
                out[band, j] = self.angular_average(r[band], np.full(len(band), p))
        return out

    def weight_matrix(self, s):
        """``w_i r_i beta(s, r_i)`` so that ``B(s, rho) = W(s) @ A(:, rho)``."""
        r, w = self.r_nodes
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return w * r * beta(s[:, None], r[None, :], self.inputs.T, self.model)

    def kernel(self, s, rho):
        """Interference functional ``B(s, rho)`` of one cluster whose source is ``rho`` away."""
        return self.weight_matrix(s) @ self.kernel_columns(rho)

    def _far_tail(self, s):
        """``int_{|xi| > rho_max} 1 - exp(-B)`` using ``B ~ mean_size * beta`` far from the cluster."""
        nbar = self.D.mean_size
        T, model = self.inputs.T, self.model

        def f(rho):
            return 2 * math.pi * rho * -math.expm1(-nbar * beta(si, rho, T, model))

        out = np.empty(len(s))
        for k, si in enumerate(s):
            out[k] = integrate.quad(f, self.rho_max, np.inf, epsabs=0, epsrel=1e-8, limit=200)[0]
        return out

    @cached_property
    def base(self) -> ClusterIntensity:
        """Unthinned decode intensity, the starting point of the oriented rules."""
        return ClusterIntensity(_with_policy(self.inputs, AllTransmit()), self.quad)

    def own_angular(self, r):
        """Angular integral of the tagged cluster's intensity on circles of radius ``r`` about the destination."""
        inp, pol = self.inputs, self.inputs.policy
        r = np.asarray(r, dtype=float)
        if inp.own_cluster == "averaged" or not isinstance(pol, (Sectorized, DistanceThinning)):
            return self.angular_average(r, np.full(len(r), inp.R))
        if isinstance(pol, DistanceThinning):
            # the thinning weight only depends on the distance to the destination
            base = self.base
            phi, w = gauss_panels(_geometric_breaks(math.pi, self.quad.angular_octaves),
                                  self.quad.gauss_order)
            dist = np.sqrt((r[:, None] - inp.R) ** 2 + 4 * r[:, None] * inp.R * np.sin(phi / 2) ** 2)
            self._charge(dist.size)
            return 2.0 * np.exp(-2 * pol.epsilon * r / inp.R) * (base.interp(dist) @ w)
        out = np.zeros(len(r))
        if pol.theta == 0:
            return out
        geo = _geometric_breaks(math.pi, self.quad.angular_octaves)
        for k, rk in enumerate(r):
            if abs(rk - inp.R) > self.base.radius:
                continue
            breaks = np.unique(np.concatenate([geo, _sector_breaks(rk, inp.R, pol.theta)]))
            psi, w = gauss_panels(breaks, self.quad.gauss_order)
            x = inp.R - rk * np.cos(psi)
            y = rk * np.sin(psi)
            inside = np.abs(np.arctan2(y, x)) < pol.theta
            self._charge(len(psi))
            out[k] = 2.0 * np.sum(w * inside * self.base.interp(np.hypot(x, y)))
        return out

    def evaluate(self):
        """Return ``(P2, details)`` for this resolution."""
        inp = self.inputs
        s, ws = self.s_nodes
        rho, wr = self.rho_nodes
        r, _ = self.r_nodes
        W = self.weight_matrix(s)
        B_far = W @ self.kernel_columns(rho)
        own = np.zeros(len(r))
        band = np.flatnonzero(np.abs(r - inp.R) <= self.D.radius)
        own[band] = self.own_angular(r[band])
        B_own = W @ own
        Q = (-np.expm1(-B_far)) @ (2 * math.pi * wr * rho) + self._far_tail(s)
        M = self.own_angular(s)
        E = np.exp(-B_own - inp.lambda_s * Q)
        value = float(np.sum(ws * s * M * E))
        return value, {"own": B_own, "Q": Q, "M": M, "s": s}


def beta_tilde(z, xi, inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """``int beta(|z|, |y|) D(|y + xi|) dy``: interference functional of the cluster of a source at ``-xi``."""
    if inputs.lambda_r == 0:
        return 0.0
    s = float(np.hypot(*np.asarray(z, dtype=float)))
    rho = float(np.hypot(*np.asarray(xi, dtype=float)))
    hop = SecondHop(inputs, quad)
    if rho > hop.rho_max:
        # outside the tabulated range the kernel nodes are extended for this point
        hop.__dict__["rho_max"] = rho + hop.D.radius
    return float(hop.kernel([s], [rho])[0, 0])


@dataclass(frozen=True)
class AnalyticResult:
    P1: float
    P2: float
    Ps: float
    mean_cluster_size: float
    achieved_tolerance: float
    evaluations: int


def evaluate(inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD) -> AnalyticResult:
    """P1, P2 and the composed Ps, refining the grids until P2 settles.

    Each refinement halves the panel width and extends the truncation; the
    loop stops once two successive values agree to ``quad.p2_rel_tol``.
    With ``max_refinements=0`` a single pass is returned and
    ``achieved_tolerance`` is ``nan``.
    """
    P1 = p1(inputs, quad)
    if inputs.lambda_r == 0:
        return AnalyticResult(P1, 0.0, P1, 0.0, 0.0, 0)
    q = quad
    prev = None
    evals = 0
    err = float("inf")
    nbar = float("nan")
    for level in range(quad.max_refinements + 1):
        hop = SecondHop(inputs, q)
        try:
            val, _ = hop.evaluate()
        except BudgetExceeded as exc:
            exc.partial = prev
            exc.achieved_tolerance = err
            raise
        evals += hop.evaluations
        nbar = hop.D.mean_size
        if prev is not None:
            err = abs(val - prev) / max(abs(val), 1e-300)
            if err <= quad.p2_rel_tol:
                prev = val
                break
        prev = val
        if quad.max_refinements == 0:
            # single evaluation requested; accuracy is not verified
            err = float("nan")
            break
        q = q.refined()
    else:
        raise BudgetExceeded(
            f"P2 did not converge to {quad.p2_rel_tol:g} within {quad.max_refinements} refinements",
            partial=prev, achieved_tolerance=err)
    P2 = prev
    if P2 > 1 or P2 < 0:
        if min(abs(P2 - 1), abs(P2)) > quad.p2_rel_tol:
            warnings.warn(f"P2 = {P2:.6g} clamped to [0, 1]", stacklevel=2)
        P2 = min(max(P2, 0.0), 1.0)
    return AnalyticResult(P1, P2, 1 - (1 - P1) * (1 - P2), nbar, err, evals)


def p2(inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    return evaluate(inputs, quad).P2


def ps_composed(inputs: AnalyticInputs, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    return evaluate(inputs, quad).Ps
