"""Budgeted adversarial posteriors on the two-arm instance.

Both constructions reweight the exact Gaussian posterior over the two arm
coordinates while keeping the divergence to it below a chosen budget:

* the sampling adversary squashes the region where the better arm wins by a
  factor ``1/r`` and boosts the complementary region, so one posterior draw
  prefers the worse arm with probability at least ``1 - 1/r`` forever;
* the quantile adversary reweights the conditional law of the second
  coordinate around the level-``gamma`` quantile of the first marginal, which
  it leaves exactly intact, so the worse arm's quantile index always wins.

Episodes feed the reweighted law to the matching policy, account regret, and
certify the per-step divergence numerically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, optimize, special

from .environments import RegretTrace
from .linalg import ConfidenceParams, beta, rls_init, rls_update
from .normal import norm_cdf, norm_pdf, norm_ppf
from .posterior import GaussianPosterior

_DEGENERACY_BAND = 1e-6
_MAX_PROPOSALS = 1_000_000
_HERMITE_NODES = 96

_GH_X, _GH_W = np.polynomial.hermite.hermgauss(_HERMITE_NODES)
_GH_X_COARSE, _GH_W_COARSE = np.polynomial.hermite.hermgauss(_HERMITE_NODES // 2)
_GH_NORM = 1.0 / math.sqrt(math.pi)


class Construction(str, enum.Enum):
    TS_REGION_REWEIGHT = "ts_region_reweight"
    BUCB_CONDITIONAL_REWEIGHT = "bucb_conditional_reweight"


class DegenerateRegionError(RuntimeError):
    """Raised when region-restricted rejection sampling stalls."""


@dataclass(frozen=True)
class AdversarialPosteriorPair:
    """An exact two-dimensional posterior plus its budgeted reweighting.

    ``f_t`` is the exact-posterior mass of the region where the second
    coordinate wins (sampling construction); ``b_t`` the level-``gamma``
    quantile of the first marginal (quantile construction).
    """

    pi: GaussianPosterior
    construction: Construction
    r: float
    f_t: float | None = None
    b_t: float | None = None
    gamma: float | None = None

    def moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Mean and full covariance of the exact posterior."""
        cov_shape = self.pi.cov if self.pi.cov.ndim == 2 else np.diag(self.pi.cov)
        return self.pi.mean, self.pi.scale**2 * cov_shape


def _diff_law(pi: GaussianPosterior) -> tuple[float, float]:
    """Mean and sd of ``x1 - x2`` under the posterior."""
    cov_shape = pi.cov if pi.cov.ndim == 2 else np.diag(pi.cov)
    var = pi.scale**2 * float(cov_shape[0, 0] - 2.0 * cov_shape[0, 1] + cov_shape[1, 1])
    return float(pi.mean[0] - pi.mean[1]), math.sqrt(max(var, 0.0))


def region_mass_second_wins(pi: GaussianPosterior) -> float:
    """Exact posterior mass of ``{x1 < x2}`` via the closed-form difference law."""
    gap, sd = _diff_law(pi)
    if sd == 0.0:
        return 0.0 if gap >= 0.0 else 1.0
    return float(norm_cdf(-gap / sd))


def wrap_ts(pi: GaussianPosterior, r: float) -> AdversarialPosteriorPair:
    if pi.dim != 2:
        raise ValueError("construction lives on the two-arm coordinates")
    if r < 1.0:
        raise ValueError("reweighting factor must be at least 1")
    return AdversarialPosteriorPair(
        pi=pi,
        construction=Construction.TS_REGION_REWEIGHT,
        r=float(r),
        f_t=region_mass_second_wins(pi),
    )


def wrap_bucb(pi: GaussianPosterior, r: float, gamma: float) -> AdversarialPosteriorPair:
    if pi.dim != 2:
        raise ValueError("construction lives on the two-arm coordinates")
    if r < 1.0:
        raise ValueError("reweighting factor must be at least 1")
    if not (0.0 < gamma < 1.0):
        raise ValueError("gamma must lie in (0, 1)")
    mean, cov = pi.mean, pi.cov if pi.cov.ndim == 2 else np.diag(pi.cov)
    sd1 = pi.scale * math.sqrt(float(cov[0, 0]))
    b_t = float(mean[0]) + sd1 * norm_ppf(gamma)
    return AdversarialPosteriorPair(
        pi=pi,
        construction=Construction.BUCB_CONDITIONAL_REWEIGHT,
        r=float(r),
        b_t=b_t,
        gamma=float(gamma),
    )


def choose_r(alpha: float, epsilon: float, gamma: float | None = None, cap: float = 1e6) -> float:
    """Midpoint of the feasible reweighting interval for a given budget.

    The interval is ``(1, (eps a (a-1) + 1)^(1/(a-1)))`` for ``a != 1`` (upper
    endpoint replaced by ``cap`` when the base is non-positive) and
    ``(1, e^eps)`` for ``a = 1``; the quantile construction raises the lower
    endpoint to ``1 / gamma`` and rejects budgets that cannot clear it.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    lower = 1.0 if gamma is None else 1.0 / gamma
    if alpha == 1.0:
        upper = math.exp(epsilon)
    else:
        base = epsilon * alpha * (alpha - 1.0) + 1.0
        if base <= 0.0:  # unbounded regime, only reachable for alpha in (0, 1)
            return max(cap, lower + 1.0)
        upper = base ** (1.0 / (alpha - 1.0))
    if upper <= lower:
        if alpha == 1.0:
            threshold = -math.log(gamma)
        else:
            threshold = (gamma ** (1.0 - alpha) - 1.0) / (alpha * (alpha - 1.0))
        raise ValueError(
            f"budget epsilon={epsilon} infeasible for gamma={gamma}; "
            f"needs epsilon > {threshold:.6g}"
        )
    return 0.5 * (lower + min(upper, cap))


def _sample_region(
    pi: GaussianPosterior, second_wins: bool, rng: np.random.Generator
) -> np.ndarray:
    proposals = 0
    while proposals < _MAX_PROPOSALS:
        batch = pi.sample(rng, size=128)
        proposals += batch.shape[0]
        mask = batch[:, 0] < batch[:, 1] if second_wins else batch[:, 0] >= batch[:, 1]
        if np.any(mask):
            return batch[np.argmax(mask)]
    raise DegenerateRegionError(
        "region-restricted sampling stalled; the region mass is numerically pinned"
    )


def ts_adversary_sample(pair: AdversarialPosteriorPair, rng: np.random.Generator) -> np.ndarray:
    """One draw from the region-reweighted law.

    The winning region keeps mass ``(1/r)(1 - f_t)``; the complementary region
    absorbs the rest. Sampling restricts the exact posterior to the selected
    region by rejection; when the region mass is pinned at 0 or 1 the draw
    short-circuits to the dominant region (the episode is already decided).
    """
    if pair.construction is not Construction.TS_REGION_REWEIGHT:
        raise ValueError("pair was not built for the sampling adversary")
    f = pair.f_t
    if f < _DEGENERACY_BAND:
        return _sample_region(pair.pi, second_wins=False, rng=rng)
    if f > 1.0 - _DEGENERACY_BAND:
        return _sample_region(pair.pi, second_wins=True, rng=rng)
    mass_first_wins = (1.0 - f) / pair.r
    second = rng.random() >= mass_first_wins
    return _sample_region(pair.pi, second_wins=second, rng=rng)


def _gaussian_mass_below_quad(z0: float) -> tuple[float, float]:
    """Standard-normal lower-tail mass by adaptive quadrature."""
    if z0 <= -38.0:
        return 0.0, 1e-300
    lo = max(-38.0, z0 - 24.0)
    val, err = integrate.quad(lambda z: float(norm_pdf(z)), lo, z0, epsabs=1e-12, limit=200)
    return val, err


def ts_divergence(
    pair: AdversarialPosteriorPair, alpha: float, quadrature: bool = True
) -> tuple[float, float]:
    """Certified divergence of the region reweighting and its error estimate.

    The cross integral collapses to region masses; the only numeric quantity
    is the winning-region mass, integrated from the difference law when
    ``quadrature`` is set and taken from the closed form otherwise.
    """
    gap, sd = _diff_law(pair.pi)
    if quadrature and sd > 0.0:
        f, f_err = _gaussian_mass_below_quad(-gap / sd)
    else:
        f, f_err = pair.f_t, 0.0

    def value_at(mass: float) -> float:
        mass = min(max(mass, 0.0), 1.0)
        r = pair.r
        boost = (1.0 - (1.0 - mass) / r) / mass if mass > 0.0 else 1.0
        if alpha == 1.0:
            return math.log(1.0 / boost) * mass + math.log(r) * (1.0 - mass)
        lifted = boost ** (1.0 - alpha) * mass
        cross = lifted + r ** (alpha - 1.0) * (1.0 - mass)
        return (cross - 1.0) / (alpha * (alpha - 1.0))

    center = value_at(f)
    spread = max(abs(value_at(f + f_err) - center), abs(value_at(f - f_err) - center))
    return center, spread


def analytic_budget_bound(r: float, alpha: float) -> float:
    """Divergence bound both constructions satisfy: ``(r^(a-1) - 1)/(a(a-1))``
    for ``a != 1`` and ``log r`` at the KL order."""
    if alpha == 1.0:
        return math.log(r)
    return (r ** (alpha - 1.0) - 1.0) / (alpha * (alpha - 1.0))


def _conditional_law(pair: AdversarialPosteriorPair) -> tuple[float, float, float, float, float]:
    """Marginal of x1 and the conditional slope/sd of x2 given x1."""
    mean, cov = pair.moments()
    m1, m2 = float(mean[0]), float(mean[1])
    sd1 = math.sqrt(float(cov[0, 0]))
    slope = float(cov[0, 1] / cov[0, 0])
    cond_var = float(cov[1, 1] - cov[0, 1] ** 2 / cov[0, 0])
    return m1, m2, sd1, slope, math.sqrt(max(cond_var, 1e-300))


def _cut_log_survival(pair: AdversarialPosteriorPair, x1: np.ndarray) -> np.ndarray:
    """log P(x2 > b_t | x1) per node; log-space keeps the deep tail exact."""
    m1, m2, _, slope, cond_sd = _conditional_law(pair)
    mu = m2 + slope * (x1 - m1)
    return special.log_ndtr(-(pair.b_t - mu) / cond_sd)


def _bucb_cdf_from_nodes(
    pair: AdversarialPosteriorPair, value: float, x1: np.ndarray
) -> np.ndarray:
    """Per-node conditional CDF of x2 under the reweighting, evaluated so that
    the boosted band above the cut never suffers catastrophic cancellation:
    the boosted mass is (r-1+S_b)/r * (1 - S_v/S_b) with the S_b ratio taken
    in log space."""
    m1, m2, _, slope, cond_sd = _conditional_law(pair)
    mu = m2 + slope * (x1 - m1)
    r = pair.r
    log_sf_cut = _cut_log_survival(pair, x1)
    sf_cut = np.exp(log_sf_cut)
    if value <= pair.b_t:
        f_val = norm_cdf((value - mu) / cond_sd)
        return f_val / r
    log_sf_val = special.log_ndtr(-(value - mu) / cond_sd)
    boosted_mass = (r - 1.0 + sf_cut) / r * (-np.expm1(log_sf_val - log_sf_cut))
    return (1.0 - sf_cut) / r + boosted_mass


def bucb_second_marginal_cdf(pair: AdversarialPosteriorPair, value: float) -> float:
    """CDF of the second coordinate under the conditional reweighting,
    integrated over the first marginal with Gauss-Hermite nodes."""
    m1, _, sd1, _, _ = _conditional_law(pair)
    x1 = m1 + math.sqrt(2.0) * sd1 * _GH_X
    return float(np.dot(_GH_W, _bucb_cdf_from_nodes(pair, value, x1)) * _GH_NORM)


def bucb_adversary_quantiles(
    pair: AdversarialPosteriorPair, gamma: float
) -> tuple[float, float]:
    """Quantiles of the two arm values under the reweighted law.

    The first marginal is preserved by construction, so the first quantile is
    the recorded cut exactly; the second is root-found on the reweighted
    marginal CDF (above the cut whenever the squashed mass stays below gamma,
    which the feasible reweighting factor guarantees).
    """
    if pair.construction is not Construction.BUCB_CONDITIONAL_REWEIGHT:
        raise ValueError("pair was not built for the quantile adversary")
    if abs(gamma - pair.gamma) > 1e-12:
        raise ValueError("gamma must match the construction level")
    _, cov = pair.moments()
    m1, m2, sd1, slope, cond_sd = _conditional_law(pair)
    sd2 = math.sqrt(float(cov[1, 1]))
    b = pair.b_t

    at_cut = bucb_second_marginal_cdf(pair, b)
    if at_cut < gamma:
        width = cond_sd + sd2 + abs(slope) * sd1
        lo, hi = b, b + 0.5 * width
        while bucb_second_marginal_cdf(pair, hi) < gamma:
            lo = hi
            hi += width
            width *= 2.0
    else:
        width = 4.0 * sd2
        lo, hi = m2 - 9.0 * sd2, b
        while bucb_second_marginal_cdf(pair, lo) > gamma:
            lo -= width
            width *= 2.0
    second = optimize.brentq(
        lambda v: bucb_second_marginal_cdf(pair, v) - gamma,
        lo,
        hi,
        xtol=1e-14 * max(abs(b), sd2, 1.0),
        rtol=8.9e-16,
    )
    return b, float(second)


def bucb_divergence(pair: AdversarialPosteriorPair, alpha: float) -> tuple[float, float]:
    """Certified divergence of the conditional reweighting via quadrature over
    the first coordinate; the error estimate compares two node counts.

    The boosted-region term ``w^(1-a) * S_b`` is evaluated as
    ``((r-1+S_b)/r)^(1-a) * S_b^a`` so it degrades to zero instead of
    overflowing when the cut sits deep in the conditional tail.
    """

    def value(x: np.ndarray, w: np.ndarray) -> float:
        m1, _, sd1, _, _ = _conditional_law(pair)
        x1 = m1 + math.sqrt(2.0) * sd1 * x
        log_sf = _cut_log_survival(pair, x1)
        sf = np.exp(log_sf)
        r = pair.r
        if alpha == 1.0:
            # S_b * log(1/w) with w = (r-1+S_b)/(r S_b); the S_b log is taken
            # from the stable log-survival values.
            squashed = math.log(r) * (1.0 - sf)
            boosted = sf * (math.log(r) + log_sf - np.log(r - 1.0 + sf))
            return float(np.dot(w, squashed + boosted) / math.sqrt(math.pi))
        lifted = ((r - 1.0 + sf) / r) ** (1.0 - alpha) * np.exp(alpha * log_sf)
        inner = r ** (alpha - 1.0) * (1.0 - sf) + lifted
        cross = float(np.dot(w, inner) / math.sqrt(math.pi))
        return (cross - 1.0) / (alpha * (alpha - 1.0))

    coarse = value(_GH_X_COARSE, _GH_W_COARSE)
    fine = value(_GH_X, _GH_W)
    return fine, abs(fine - coarse)


@dataclass(frozen=True)
class AdversarialEpisode:
    """One adversarial run: regret trace, per-step certificates, parameters."""

    trace: RegretTrace
    divergences: np.ndarray
    chosen: np.ndarray
    r: float
    alpha: float
    epsilon: float
    analytic_bound: float
    policy: str


def run_adversarial_episode(
    policy: str,
    mu: tuple[float, float],
    alpha: float,
    epsilon: float,
    horizon: int,
    rng: np.random.Generator,
    gamma: float = 0.9,
    r: float | None = None,
    confidence: ConfidenceParams | None = None,
    noise_sd: float = 0.5,
    certify: bool = True,
) -> AdversarialEpisode:
    """Run one policy against its adversarial construction on the fixed
    two-arm instance with ground truth ``mu``.

    ``r=1`` is the exact-inference control (no reweighting, zero budget).
    The per-step certificate is the quadrature divergence between the exact
    posterior and its reweighting; disable with ``certify=False``.
    """
    if policy not in ("lints", "linbucb"):
        raise ValueError("policy must be 'lints' or 'linbucb'")
    mu1, mu2 = float(mu[0]), float(mu[1])
    if not mu1 > mu2:
        raise ValueError("the first arm must be strictly better")
    if confidence is None:
        confidence = ConfidenceParams(
            nu=noise_sd if noise_sd > 0 else 0.5,
            lam=1.0,
            s_bound=math.hypot(mu1, mu2),
            delta=0.05,
        )
    if r is None:
        r = choose_r(alpha, epsilon, gamma if policy == "linbucb" else None)

    arms = np.eye(2)
    theta = np.array([mu1, mu2])
    state = rls_init(2, confidence.lam)
    gap = mu1 - mu2

    inst = np.zeros(horizon)
    divs = np.zeros(horizon)
    chosen = np.zeros(horizon, dtype=np.int64)
    for t in range(horizon):
        if policy == "lints":
            delta_prime = confidence.delta / (4.0 * horizon)
            scale = beta(replace(confidence, delta=delta_prime), state.step, 2)
        else:
            scale = beta(confidence, state.step, 2)
        pi = GaussianPosterior(state.estimate, scale, state.design_inv)

        if policy == "lints":
            if r > 1.0:
                pair = wrap_ts(pi, r)
                draw = ts_adversary_sample(pair, rng)
                if certify:
                    divs[t] = ts_divergence(pair, alpha)[0]
            else:
                draw = pi.sample(rng)
            idx = 0 if draw[0] >= draw[1] else 1
        else:
            if r > 1.0:
                pair = wrap_bucb(pi, r, gamma)
                q1, q2 = bucb_adversary_quantiles(pair, gamma)
                if certify:
                    divs[t] = bucb_divergence(pair, alpha)[0]
            else:
                q1 = pi.arm_value_quantile(arms[0], gamma)
                q2 = pi.arm_value_quantile(arms[1], gamma)
            idx = 0 if q1 >= q2 else 1

        chosen[t] = idx
        inst[t] = 0.0 if idx == 0 else gap
        observed = float(theta[idx])
        if noise_sd > 0.0:
            observed += noise_sd * float(rng.standard_normal())
        state = rls_update(state, arms[idx], observed)

    return AdversarialEpisode(
        trace=RegretTrace.from_instantaneous(inst),
        divergences=divs,
        chosen=chosen,
        r=float(r),
        alpha=float(alpha),
        epsilon=float(epsilon),
        analytic_bound=analytic_budget_bound(r, alpha) if r > 1.0 else 0.0,
        policy=policy,
    )
