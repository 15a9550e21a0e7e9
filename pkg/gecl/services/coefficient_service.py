# gecl/services/coefficient_service.py
"""
Construction of shape functions, scale sets, bump profiles and
perturbations, assembled into a Coefficient.

Every admissibility window is checked here, so the rest of the package
can assume consistent parameters.
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..config import AppConfig, BumpConfig, CoefficientConfig, Family, PerturbationKind
from ..domain.coefficient import Coefficient
from ..domain.perturbation import BumpProfile, PerturbationKindTag, PerturbationProfile
from ..domain.scales import ScaleSet
from ..domain.shape import ShapeFunction
from ..logging_config import get_logger

logger = get_logger('coefficient_service')


class ShapeParameterError(Exception):
    """Raised for shape parameters outside their family's range."""
    pass


class AdmissibilityError(Exception):
    """Raised when scale or sequence parameters leave the admissibility window."""
    pass


# -- shapes -----------------------------------------------------------------

def make_shape(family: Family, params: Optional[Dict[str, float]] = None, m_max: int = 4) -> ShapeFunction:
    """
    Build λ(t) for one of the analytic families.

    Args:
        family: polynomial, suprapolynomial, exponential or constant
        params: ``p`` (polynomial) or ``alpha`` (suprapolynomial)
        m_max: Highest derivative order served by the jet oracle

    Returns:
        ShapeFunction

    Raises:
        ShapeParameterError: If p <= 0 or alpha is not in (0, 1)
    """
    params = params or {}
    family = Family(family)
    if family == Family.POLYNOMIAL:
        p = float(params.get('p', 2.0))
        if p <= 0:
            raise ShapeParameterError(f"polynomial shape needs p > 0, got p={p}")
        return ShapeFunction(family, p=p, m_max=m_max)
    if family == Family.SUPRAPOLYNOMIAL:
        alpha = float(params.get('alpha', 0.5))
        if not 0.0 < alpha < 1.0:
            raise ShapeParameterError(f"suprapolynomial shape needs 0 < alpha < 1, got alpha={alpha}")
        return ShapeFunction(family, alpha=alpha, m_max=m_max, regular_from=1.0)
    return ShapeFunction(family, m_max=m_max)


# -- scales -----------------------------------------------------------------

def lower_xi_exponent(family: Family, m: int, p: float = 0.0, q: float = 0.0,
                      alpha: float = 0.0, beta: float = 0.0, a: float = 0.0) -> float:
    """
    Smallest admissible Ξ parameter for a given m.

    polynomial: r_m = 1 − p + q + (p − q)/m
    suprapolynomial: γ_m = −β + (β − α + 1)/m
    exponential: b_m = a − 1 + (1 − a)/m
    """
    if family == Family.POLYNOMIAL:
        return 1.0 - p + q + (p - q) / m
    if family == Family.SUPRAPOLYNOMIAL:
        return -beta + (beta - alpha + 1.0) / m
    if family == Family.EXPONENTIAL:
        return a - 1.0 + (1.0 - a) / m
    return 1.0


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise AdmissibilityError(message)


def make_scale_set(shape: ShapeFunction, cfg: CoefficientConfig) -> ScaleSet:
    """
    Build Θ and Ξ for ``shape`` from the family parameters in ``cfg``.

    Args:
        shape: The shape function the scales belong to
        cfg: Coefficient configuration (q/r, beta/gamma or a/b, m, N)

    Returns:
        ScaleSet

    Raises:
        AdmissibilityError: Naming the violated inequality
    """
    m = int(cfg.m)
    _require(m >= 1, f"m >= 1 violated (m={m})")
    _require(cfg.N > 0, f"N > 0 violated (N={cfg.N})")
    eps = 1e-12

    if shape.family == Family.POLYNOMIAL:
        p, q = shape.p, cfg.q
        _require(0.0 <= q < p, f"0 <= q < p violated (q={q}, p={p})")
        r_m = lower_xi_exponent(Family.POLYNOMIAL, m, p=p, q=q)
        r = r_m if cfg.r is None else cfg.r
        _require(r_m - eps <= r <= 1.0 + eps, f"r_m <= r <= 1 violated (r={r}, r_m={r_m:.6g})")
        theta_exp = 1.0 + q if cfg.theta_exponent is None else cfg.theta_exponent
        return ScaleSet(
            family=shape.family, m=m, N=cfg.N,
            theta_exponent=theta_exp, xi_exponent=r,
            params={'p': p, 'q': q, 'r': r, 'r_m': r_m, 'theta_exponent': theta_exp},
        )

    if shape.family == Family.SUPRAPOLYNOMIAL:
        alpha, beta = shape.alpha, cfg.beta
        _require(beta > alpha - 1.0, f"beta > alpha - 1 violated (beta={beta}, alpha={alpha})")
        g_m = lower_xi_exponent(Family.SUPRAPOLYNOMIAL, m, alpha=alpha, beta=beta)
        gamma = g_m if cfg.gamma is None else cfg.gamma
        _require(
            g_m - eps <= gamma <= 1.0 - alpha + eps,
            f"gamma_m <= gamma <= 1 - alpha violated (gamma={gamma}, gamma_m={g_m:.6g}, 1-alpha={1 - alpha:g})",
        )
        return ScaleSet(
            family=shape.family, m=m, N=cfg.N,
            xi_exponent=gamma, alpha=alpha, beta=beta,
            params={'alpha': alpha, 'beta': beta, 'gamma': gamma, 'gamma_m': g_m},
        )

    if shape.family == Family.EXPONENTIAL:
        a = cfg.a
        _require(a < 1.0, f"a < 1 violated (a={a})")
        b_m = lower_xi_exponent(Family.EXPONENTIAL, m, a=a)
        b = b_m if cfg.b is None else cfg.b
        _require(b_m - eps <= b <= 0.0 + eps, f"b_m <= b <= 0 violated (b={b}, b_m={b_m:.6g})")
        return ScaleSet(
            family=shape.family, m=m, N=cfg.N,
            theta_rate=a, xi_rate=b,
            params={'a': a, 'b': b, 'b_m': b_m},
        )

    # constant control family: Θ = Λ = 1 + t, Ξ = 1 + t
    return ScaleSet(family=shape.family, m=m, N=cfg.N, theta_exponent=1.0, xi_exponent=1.0,
                    params={'theta_exponent': 1.0})


# -- bump -------------------------------------------------------------------

def make_bump(smoothness_order: int = 4, plateau_lo: float = 0.1, plateau_hi: float = 0.9) -> BumpProfile:
    """
    Plateau bump ψ normalised to ∫₀¹ |ψ| = 1/2.

    Args:
        smoothness_order: Derivatives served by the jet oracle (>= 2)
        plateau_lo: Left end of the plateau
        plateau_hi: Right end of the plateau

    Returns:
        BumpProfile with plateau value c < 1

    Raises:
        ShapeParameterError: On order < 2 or an empty plateau
    """
    if smoothness_order < 2:
        raise ShapeParameterError(f"bump smoothness_order must be >= 2, got {smoothness_order}")
    if not 0.0 < plateau_lo < plateau_hi < 1.0:
        raise ShapeParameterError(f"plateau must satisfy 0 < lo < hi < 1, got [{plateau_lo}, {plateau_hi}]")
    unit = BumpProfile(scale=1.0, plateau_lo=plateau_lo, plateau_hi=plateau_hi,
                       smoothness_order=smoothness_order)
    mass = integrate.quad(unit.shape_scalar, 0.0, 1.0, points=[plateau_lo, plateau_hi],
                          epsabs=0.0, epsrel=1e-13, limit=200)[0]
    scale = 0.5 / mass
    if not scale < 1.0:
        raise ShapeParameterError(f"plateau mass {mass:.6g} too small: bump would reach {scale:.6g} >= 1")
    logger.debug(f"bump: plateau mass {mass:.12g}, scale {scale:.12g}")
    return BumpProfile(scale=scale, plateau_lo=plateau_lo, plateau_hi=plateau_hi,
                       smoothness_order=smoothness_order)


def make_bump_from_config(cfg: BumpConfig) -> BumpProfile:
    return make_bump(cfg.smoothness_order, cfg.plateau_lo, cfg.plateau_hi)


# -- sequences ----------------------------------------------------------------

def admissible_sequences(shape: ShapeFunction, scales: ScaleSet, j_max: int
                         ) -> Tuple[List[float], List[float], List[float]]:
    """(t_j, δ_j, η_j) for j = 1..j_max."""
    js = np.arange(1, j_max + 1, dtype=float)
    params = scales.params or {}
    if shape.family == Family.POLYNOMIAL:
        p, q, r = shape.p, params['q'], params['r']
        t = 2.0 ** js
        delta = 2.0 ** (js * r - 1.0)
        eta = 2.0 ** (js * (1.0 + q - p - r))
    elif shape.family == Family.SUPRAPOLYNOMIAL:
        alpha, beta, gamma = shape.alpha, params['beta'], params['gamma']
        t = js ** (1.0 / alpha)
        delta = js ** (gamma / alpha)
        eta = js ** (-(beta + gamma) / alpha)
    elif shape.family == Family.EXPONENTIAL:
        a, b = params['a'], params['b']
        t = js.copy()
        delta = np.exp(b * js)
        eta = np.exp(js * (a - b - 1.0))
    else:
        raise AdmissibilityError("the constant family has no perturbation sequences")
    return t.tolist(), delta.tolist(), eta.tolist()


def counterexample_sequences(shape: ShapeFunction, scales: ScaleSet, epsilon: float,
                             sigma: float, j_max: int) -> Tuple[List[float], List[float], List[int]]:
    """(t_j, δ_j, ν_j) for j = 1..j_max."""
    js = np.arange(1, j_max + 1, dtype=float)
    params = scales.params or {}
    if shape.family == Family.POLYNOMIAL:
        p, q = shape.p, params['q']
        t = sigma ** js
        delta = sigma ** (js * (q - p + 1.0) - 1.0)
        nu = np.ceil(sigma ** (js * epsilon * (p - q)))
    elif shape.family == Family.SUPRAPOLYNOMIAL:
        alpha, beta = shape.alpha, params['beta']
        t = js ** (1.0 / alpha)
        delta = js ** (-beta / alpha)
        nu = np.ceil(js ** (epsilon * (beta - alpha + 1.0) / alpha))
    elif shape.family == Family.EXPONENTIAL:
        a = params['a']
        t = sigma * js
        delta = np.exp(sigma * js * (a - 1.0))
        nu = np.ceil(np.exp(sigma * js * epsilon * (1.0 - a)))
    else:
        raise AdmissibilityError("the constant family has no perturbation sequences")
    return t.tolist(), delta.tolist(), [int(v) for v in nu]


def _check_packets(t_seq: Sequence[float], delta_seq: Sequence[float]) -> None:
    for i in range(len(t_seq) - 1):
        gap = t_seq[i + 1] - t_seq[i]
        _require(delta_seq[i] <= gap, f"delta_j <= t_(j+1) - t_j violated at j={i + 1} "
                                      f"(delta={delta_seq[i]:.6g}, gap={gap:.6g})")
    _require(all(d > 0 for d in delta_seq), "delta_j > 0 violated")


def make_admissible_perturbation(
    shape: ShapeFunction,
    scales: ScaleSet,
    bump: BumpProfile,
    j_max: int = 12,
    overrides: Optional[CoefficientConfig] = None,
) -> PerturbationProfile:
    """
    ω = 1 + η_j ψ((t − t_j)/δ_j) on the packets [t_j, t_j + δ_j].

    Raises:
        AdmissibilityError: If some η_j > 1 or δ_j > t_{j+1} − t_j
    """
    t_seq, delta_seq, eta_seq = admissible_sequences(shape, scales, j_max)
    if overrides is not None:
        t_seq = overrides.t_seq or t_seq
        delta_seq = overrides.delta_seq or delta_seq
        eta_seq = overrides.eta_seq or eta_seq
    for j, eta in enumerate(eta_seq, start=1):
        _require(0.0 <= eta <= 1.0 + 1e-12, f"eta_j <= 1 violated at j={j} (eta={eta:.6g})")
    _check_packets(t_seq, delta_seq)
    return PerturbationProfile(
        kind=PerturbationKindTag.ADMISSIBLE,
        t_seq=tuple(t_seq), delta_seq=tuple(delta_seq), eta_seq=tuple(eta_seq),
        bump=bump,
    )


def make_counterexample_perturbation(
    shape: ShapeFunction,
    scales: ScaleSet,
    bump: BumpProfile,
    epsilon: float,
    sigma: float = 2.0,
    j_max: int = 12,
    overrides: Optional[CoefficientConfig] = None,
) -> PerturbationProfile:
    """
    ω = 1 + b(ν_j (t − t_j)/δ_j) on the packets, with b the 1-periodic ψ.

    Raises:
        AdmissibilityError: If ε <= 0, σ is out of range or packets overlap
    """
    _require(epsilon > 0, f"epsilon > 0 violated (epsilon={epsilon})")
    if shape.family == Family.POLYNOMIAL:
        _require(sigma > 1.0, f"sigma > 1 violated (sigma={sigma})")
    elif shape.family == Family.EXPONENTIAL:
        _require(sigma > 0.0, f"sigma > 0 violated (sigma={sigma})")
    t_seq, delta_seq, nu_seq = counterexample_sequences(shape, scales, epsilon, sigma, j_max)
    if overrides is not None:
        t_seq = overrides.t_seq or t_seq
        delta_seq = overrides.delta_seq or delta_seq
        nu_seq = overrides.nu_seq or nu_seq
    _require(all(n >= 1 for n in nu_seq), "nu_j >= 1 violated")
    _check_packets(t_seq, delta_seq)
    return PerturbationProfile(
        kind=PerturbationKindTag.COUNTEREXAMPLE,
        t_seq=tuple(t_seq), delta_seq=tuple(delta_seq), nu_seq=tuple(int(n) for n in nu_seq),
        bump=bump, epsilon=epsilon, sigma=sigma,
    )


class CoefficientService:
    """
    Builds the coefficient described by an AppConfig.

    Usage:
        coef = CoefficientService(config).build()
    """

    def __init__(self, config: AppConfig):
        self.config = config

    def shape(self) -> ShapeFunction:
        cfg = self.config.coefficient
        return make_shape(cfg.family, {'p': cfg.p, 'alpha': cfg.alpha}, m_max=cfg.m_max)

    def build(self) -> Coefficient:
        """Assemble shape, scales and perturbation."""
        cfg = self.config.coefficient
        shape = self.shape()
        scales = make_scale_set(shape, cfg)

        if cfg.perturbation == PerturbationKind.NONE or cfg.family == Family.CONSTANT:
            perturbation = PerturbationProfile.identity()
        else:
            bump = make_bump_from_config(cfg.bump)
            if cfg.perturbation == PerturbationKind.ADMISSIBLE:
                perturbation = make_admissible_perturbation(shape, scales, bump, cfg.j_max, overrides=cfg)
            else:
                perturbation = make_counterexample_perturbation(
                    shape, scales, bump, cfg.epsilon, cfg.sigma, cfg.j_max, overrides=cfg,
                )
        coef = Coefficient(shape=shape, scales=scales, perturbation=perturbation)
        logger.info(f"Coefficient: {coef.describe()} (m={scales.m}, N={scales.N:g})")
        return coef


def build_coefficient(config: AppConfig) -> Coefficient:
    """Shortcut for ``CoefficientService(config).build()``."""
    return CoefficientService(config).build()


def hypothesis_ratios(coef: Coefficient) -> List[Dict[str, float]]:
    """δ_jλ(t_j)/Λ(t_j) and λ(t_j+δ_j)/λ(t_j) per packet."""
    rows = []
    shape = coef.shape
    pert = coef.perturbation
    for i, (start, end) in enumerate(pert.packets):
        lam0 = float(shape.eval(start))
        rows.append({
            'j': pert.first_index + i,
            'delta_lambda_over_Lambda': pert.delta_seq[i] * lam0 / float(shape.primitive(start)),
            'lambda_ratio': math.exp(float(shape.log_value(end) - shape.log_value(start))),
        })
    return rows

