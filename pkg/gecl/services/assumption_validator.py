# gecl/services/assumption_validator.py
"""
Numerical certification of a coefficient against the structural assumptions.

    (A1)   λ' ≈ λ²/Λ and |λ''| ≲ λ³/Λ²
    (A1+)  t√λ ≲ Λ
    (A2)   0 < c1 ≤ ω ≤ c2
    (A3)   ∫₀ᵗ λ|ω − 1| ≲ Θ ≪ Λ
    (A4)   |d_t^k a| ≲ λΞ^{−k}, k = 1..m, with λΞ ≳ Θ
    (A4')  |d_t^k a| ≲ λ(λ/Θ·(Θ/Λ)^{1/m})^k
    (A4'') |d_t^k a| ≲ λ(λ/Θ·(Θ/Λ)^ε)^k for the configured ε
    (A5)   ∫_t^∞ λ^{1−m}Ξ^{−m} ≲ Θ^{1−m}
    (A5')  Λ^ε ≲ Θ

Every "≲" becomes a supremum over a sample grid, judged by
``sup_verdict``. Ratios are formed in log space (λ overflows long before
the ratios do) and derivatives come from jets of λ(s)/λ(t)·ω(s), which
are exactly d_t^k a/λ.
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..config import AppConfig
from ..domain.coefficient import Coefficient
from ..domain.perturbation import PerturbationKindTag
from ..domain.reports import (
    CheckReport,
    ValidationReport,
    Verdict,
    combine,
    inf_verdict,
    last_decade_mask,
    sup_verdict,
)
from ..domain.scales import ScaleSet
from ..logging_config import get_logger
from ..utils.grids import geometric_time_grid
from ..utils.timing import timed

logger = get_logger('assumption_validator')

QUAD_RTOL = 1e-8
STATUS_ICONS = {Verdict.PASS: "✅", Verdict.MARGINAL: "⚠️", Verdict.FAIL: "❌"}


class SymbolVariant(str, Enum):
    """Which right-hand side the symbol estimates are checked against."""
    A4 = "A4"
    A4_PRIME = "A4prime"
    A4_DOUBLE_PRIME = "A4doubleprime"


def packet_grids(coef: Coefficient, per_period: int, t_max: float) -> List[np.ndarray]:
    """
    Equispaced samples inside every packet below ``t_max``.

    Counterexample packets hold ν_j periods of the bump and get
    ``per_period`` samples per period, admissible packets get one period's worth.
    """
    pert = coef.perturbation
    grids = []
    for i, (start, end) in enumerate(pert.packets):
        if start >= t_max:
            break
        periods = pert.nu_seq[i] if pert.kind == PerturbationKindTag.COUNTEREXAMPLE else 1
        grids.append(np.linspace(start, min(end, t_max), per_period * periods + 1))
    return grids


def stabilisation_integral(coef: Coefficient, t: np.ndarray) -> Tuple[np.ndarray, List[float]]:
    """
    S(t) = ∫₀ᵗ λ|ω − 1| at the sorted points ``t``.

    ω = 1 outside the packets, so only packets contribute. Inside a packet
    the integral is accumulated by adaptive quadrature between consecutive
    nodes (sample points and, for counterexamples, period boundaries).

    Returns:
        (S at t, full integral of every packet reached)
    """
    t = np.asarray(t, dtype=float)
    shape = coef.shape
    pert = coef.perturbation
    S = np.zeros_like(t)
    if pert.is_identity:
        return S, []

    def integrand(s: float) -> float:
        return shape.value(s) * abs(pert.value(s) - 1.0)

    total = 0.0
    masses: List[float] = []
    for i, (start, end) in enumerate(pert.packets):
        if start >= t[-1]:
            break
        stop = min(end, t[-1])
        nodes = [start, stop]
        if pert.kind == PerturbationKindTag.COUNTEREXAMPLE:
            nu = pert.nu_seq[i]
            nodes.extend(start + (end - start) * np.arange(1, nu) / nu)
        nodes.extend(t[(t > start) & (t < stop)])
        nodes = np.unique(np.clip(nodes, start, stop))
        pieces = [
            integrate.quad(integrand, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=100)[0]
            for a, b in zip(nodes[:-1], nodes[1:])
        ]
        cumulative = total + np.concatenate([[0.0], np.cumsum(pieces)])
        inside = (t >= start) & (t <= stop)
        S[inside] = np.interp(t[inside], nodes, cumulative)
        total = float(cumulative[-1])
        S[t > stop] = total
        if stop == end:
            masses.append(total - float(cumulative[0]))
    return S, masses


def _status_line(report: CheckReport) -> str:
    return f"{STATUS_ICONS[report.status]} {report.name}: {report.status.value.upper()}"


class AssumptionValidator:
    """
    Runs the assumption checks for one configuration.

    Usage:
        validator = AssumptionValidator(config)
        report = validator.validate(coef)
        report.status('A4doubleprime')
    """

    def __init__(self, config: AppConfig):
        self.config = config
        self.grid_cfg = config.grid
        self.settings = config.validator

    # -- grid ----------------------------------------------------------------

    def horizon(self, coef: Coefficient) -> float:
        return coef.shape.safe_horizon(self.grid_cfg.t_max)

    def build_grid(self, coef: Coefficient, with_packets: bool = True) -> np.ndarray:
        """Geometric grid on [0, horizon] refined inside every packet."""
        T = self.horizon(coef)
        base = geometric_time_grid(T, self.grid_cfg.points_per_decade)
        if not with_packets:
            return base
        return np.unique(np.concatenate(
            [base] + packet_grids(coef, self.grid_cfg.packet_points, T)
        ))

    def grid_spec(self, coef: Coefficient, grid: np.ndarray) -> Dict[str, Any]:
        return {
            't_max': self.grid_cfg.t_max,
            'horizon': float(grid[-1]),
            'points_per_decade': self.grid_cfg.points_per_decade,
            'packet_points': self.grid_cfg.packet_points,
            'size': int(grid.size),
            'regular_from': coef.shape.regular_from,
        }

    def _regular(self, coef: Coefficient, grid: np.ndarray) -> np.ndarray:
        """Grid points where λ has finite derivatives."""
        r = coef.shape.regular_from
        return grid if r <= 0.0 else grid[grid >= r]

    # -- (A1), (A1+), (A2) ---------------------------------------------------

    @timed("check (A1), (A1+), (A2)")
    def check_a1_a1plus_a2(self, coef: Coefficient, grid: Optional[np.ndarray] = None) -> ValidationReport:
        """
        Shape bounds (A1), the additional bound (A1+) and the ω bounds (A2).

        Args:
            coef: Coefficient to certify
            grid: Strictly increasing sample times (default: ``build_grid``)

        Returns:
            ValidationReport with checks 'A1', 'A1plus' and 'A2'
        """
        grid = self.build_grid(coef) if grid is None else np.asarray(grid, dtype=float)
        shape = coef.shape
        report = ValidationReport(grid=self.grid_spec(coef, grid))

        t = self._regular(coef, grid)
        lj = shape.log_jet(t, 2)
        l1 = lj.derivative_value(1)
        l2 = lj.derivative_value(2)
        log_ratio = shape.log_primitive(t) - shape.log_value(t)   # log Λ/λ
        first = l1 * np.exp(log_ratio)
        second = np.abs(l2 + l1 * l1) * np.exp(2.0 * log_ratio)

        upper, upper_info = sup_verdict(t, first)
        lower, lower_info = inf_verdict(t, first)
        curvature, curvature_info = sup_verdict(t, second)
        a1 = CheckReport(
            name='A1',
            status=combine([upper, lower, curvature]),
            metrics={
                'ratio_sup': upper_info.get('sup'),
                'ratio_inf': lower_info.get('inf'),
                'ratio_sup_t': upper_info.get('worst_t'),
                'ratio_inf_t': lower_info.get('worst_t'),
                'curvature_sup': curvature_info.get('sup'),
                'curvature_sup_t': curvature_info.get('worst_t'),
            },
            rows=[
                {'t': float(ti), 'lambda_prime_ratio': float(r1), 'lambda_second_ratio': float(r2)}
                for ti, r1, r2 in zip(t, first, second)
            ],
        )
        if shape.regular_from > 0:
            a1.notes.append(f"λ derivatives sampled on t >= {shape.regular_from:g}")
        report.add(a1)

        positive = grid > 0
        plus = np.zeros_like(grid)
        plus[positive] = np.exp(
            np.log(grid[positive]) + 0.5 * shape.log_value(grid[positive]) - shape.log_primitive(grid[positive])
        )
        verdict, info = sup_verdict(grid, plus)
        report.add(CheckReport(
            name='A1plus',
            status=verdict,
            metrics={'sup': info.get('sup'), 'worst_t': info.get('worst_t')},
        ))

        omega = coef.perturbation.eval(grid)
        c1, c2 = float(np.min(omega)), float(np.max(omega))
        lo, hi = coef.perturbation.bounds()
        ok = np.isfinite(c1) and np.isfinite(c2) and c1 > 0.0
        report.add(CheckReport(
            name='A2',
            status=Verdict.PASS if ok else Verdict.FAIL,
            metrics={'c1': c1, 'c2': c2, 'c1_bound': lo, 'c2_bound': hi},
        ))

        for name in ('A1', 'A1plus', 'A2'):
            logger.info(_status_line(report.checks[name]))
        return report

    # -- (A3) ----------------------------------------------------------------

    @timed("check (A3)")
    def check_a3(self, coef: Coefficient, scales: Optional[ScaleSet] = None,
                 grid: Optional[np.ndarray] = None) -> ValidationReport:
        """
        Stabilisation ∫₀ᵗ λ|ω − 1| ≲ Θ ≪ Λ.

        Passes when sup S/Θ is finite with a stable tail and Θ/Λ is
        non-increasing over the last decade while dropping at least by half.
        """
        scales = scales or coef.scales
        grid = self.build_grid(coef) if grid is None else np.asarray(grid, dtype=float)
        report = ValidationReport(grid=self.grid_spec(coef, grid))

        S, masses = stabilisation_integral(coef, grid)
        log_theta = scales.log_theta(grid)
        stab = S * np.exp(-log_theta)
        theta_lambda = np.exp(log_theta - coef.shape.log_primitive(grid))

        stab_verdict, stab_info = sup_verdict(grid, stab)

        tail = last_decade_mask(grid)
        tail_values = theta_lambda[tail]
        steps = np.diff(tail_values)
        non_increasing = bool(np.all(steps <= 1e-12 * np.abs(tail_values[1:])))
        drop = float(tail_values[-1] / tail_values[0]) if tail_values.size > 1 else 1.0
        if not non_increasing:
            decay_verdict = Verdict.FAIL
        elif drop <= 0.5:
            decay_verdict = Verdict.PASS
        else:
            decay_verdict = Verdict.MARGINAL

        a3 = CheckReport(
            name='A3',
            status=combine([stab_verdict, decay_verdict]),
            metrics={
                'constant': stab_info.get('sup'),
                'worst_t': stab_info.get('worst_t'),
                'theta_over_lambda_sup': float(np.max(theta_lambda)),
                'theta_over_lambda_end': float(theta_lambda[-1]),
                'tail_drop': drop,
                'packet_integrals': masses,
            },
            rows=[
                {'t': float(ti), 'S': float(si), 'S_over_theta': float(ri), 'theta_over_lambda': float(qi)}
                for ti, si, ri, qi in zip(grid, S, stab, theta_lambda)
            ],
        )
        if decay_verdict != Verdict.PASS:
            a3.notes.append(f"Θ/Λ over the last decade: non-increasing={non_increasing}, drop={drop:.3g}")
        report.add(a3)
        logger.info(_status_line(a3))
        return report

    # -- (A4) family and (A5) ------------------------------------------------

    def _symbol_weights(self, coef: Coefficient, scales: ScaleSet, t: np.ndarray,
                        variant: SymbolVariant) -> np.ndarray:
        """log of the per-derivative factor w with rhs = λ·w^{−k}."""
        if variant == SymbolVariant.A4:
            return np.log(scales.xi(t))
        log_theta = scales.log_theta(t)
        log_lam = coef.shape.log_value(t)
        log_big = coef.shape.log_primitive(t)
        power = 1.0 / scales.m if variant == SymbolVariant.A4_PRIME else self.settings.a4_epsilon
        return log_theta - log_lam + power * (log_big - log_theta)

    def _symbol_check(self, coef: Coefficient, scales: ScaleSet, grid: np.ndarray,
                      variant: SymbolVariant) -> CheckReport:
        orders = scales.m if variant != SymbolVariant.A4_DOUBLE_PRIME else coef.m_max
        if coef.m_max < scales.m:
            msg = f"derivative oracle serves {coef.m_max} derivatives, m={scales.m} needed"
            logger.error(f"❌ {variant.value}: {msg}")
            return CheckReport(name=variant.value, status=Verdict.FAIL, notes=[msg])

        t = self._regular(coef, grid)
        relative = coef.shape.relative_jet(t, orders) * coef.perturbation.jet(t, orders)
        log_w = self._symbol_weights(coef, scales, t, variant)
        packets = [
            (start, end) for start, end in coef.perturbation.packets if start < t[-1]
        ]

        verdicts: List[Verdict] = []
        constants: Dict[int, float] = {}
        worst: Dict[int, float] = {}
        rows: List[Dict[str, float]] = []
        witness: Optional[Dict[str, Any]] = None
        for k in range(1, orders + 1):
            with np.errstate(over='ignore'):
                ratio = np.abs(relative.derivative_value(k)) * np.exp(k * log_w)
            packet_sups = [
                float(np.max(ratio[(t >= start) & (t <= end)]))
                for start, end in packets if np.any((t >= start) & (t <= end))
            ]
            verdict, info = sup_verdict(t, ratio, packet_sups or None)
            verdicts.append(verdict)
            constants[k] = info.get('sup')
            worst[k] = info.get('worst_t')
            if verdict == Verdict.FAIL and witness is None and 'witness' in info:
                witness = {'k': k, 'kind': info['witness'],
                           'packet_sups': info.get('packet_sups', info.get('decade_sups'))}
            rows.extend({'t': float(ti), 'k': k, 'ratio': float(ri)} for ti, ri in zip(t, ratio))

        metrics: Dict[str, Any] = {'constants': constants, 'worst_t': worst, 'orders': orders}
        if variant == SymbolVariant.A4_DOUBLE_PRIME:
            metrics['epsilon'] = self.settings.a4_epsilon
        if variant == SymbolVariant.A4:
            # λΞ ≳ Θ
            lower = np.exp(coef.shape.log_value(t) + np.log(scales.xi(t)) - scales.log_theta(t))
            verdict, info = inf_verdict(t, lower)
            verdicts.append(verdict)
            metrics['lambda_xi_over_theta_inf'] = info.get('inf')
        if witness is not None:
            metrics['growth_witness'] = witness

        report = CheckReport(name=variant.value, status=combine(verdicts), metrics=metrics, rows=rows)
        if witness is not None:
            report.notes.append(f"growth along {witness['kind']}s for k={witness['k']}")
        return report

    def _a5_check(self, coef: Coefficient, scales: ScaleSet) -> CheckReport:
        """
        ∫_t^∞ λ^{1−m}Ξ^{−m} / Θ^{1−m}(t).

        The integral is truncated at the horizon T; the tail beyond T uses
        the log-log decay rate μ of the integrand over the last grid step,
        ∫_T^∞ f ≈ f(T)(1+T)/(μ−1).
        """
        m = scales.m
        t = self.build_grid(coef, with_packets=False)
        shape = coef.shape

        def g(s):
            return (1.0 - m) * shape.log_value(s) - m * np.log(scales.xi(s))

        gt = g(t)
        mu = -(gt[-1] - gt[-2]) / (math.log1p(t[-1]) - math.log1p(t[-2]))
        if not mu > 1.0:
            msg = f"integrand decays like (1+t)^(-{mu:.3g}); not integrable"
            return CheckReport(name='A5', status=Verdict.FAIL, metrics={'decay_rate': float(mu)}, notes=[msg])

        R = np.empty_like(t)
        R[-1] = (1.0 + t[-1]) / (mu - 1.0)
        for i in range(t.size - 2, -1, -1):
            g0 = gt[i]
            piece = integrate.quad(lambda s: math.exp(float(g(s)) - g0), t[i], t[i + 1],
                                   epsabs=0.0, epsrel=QUAD_RTOL, limit=100)[0]
            R[i] = piece + math.exp(gt[i + 1] - g0) * R[i + 1]
        ratio = R * np.exp(gt - (1.0 - m) * scales.log_theta(t))
        tail_share = float(R[-1] * math.exp(gt[-1] - gt[0]) / R[0]) if R[0] > 0 else float('nan')

        verdict, info = sup_verdict(t, ratio)
        return CheckReport(
            name='A5',
            status=verdict,
            metrics={
                'constant': info.get('sup'),
                'worst_t': info.get('worst_t'),
                'decay_rate': float(mu),
                'tail_share': tail_share,
            },
            rows=[{'t': float(ti), 'ratio': float(ri)} for ti, ri in zip(t, ratio)],
        )

    def _a5prime_check(self, coef: Coefficient, scales: ScaleSet) -> CheckReport:
        """Λ^ε ≲ Θ for the configured ε, with the largest exponent the horizon allows."""
        eps = self.settings.a5prime_epsilon
        t = self.build_grid(coef, with_packets=False)
        log_big = coef.shape.log_primitive(t)
        log_theta = scales.log_theta(t)
        verdict, info = sup_verdict(t, np.exp(eps * log_big - log_theta))
        exponent = float(log_theta[-1] / log_big[-1]) if log_big[-1] > 0 else float('nan')
        return CheckReport(
            name='A5prime',
            status=verdict,
            metrics={'epsilon': eps, 'constant': info.get('sup'),
                     'worst_t': info.get('worst_t'), 'exponent_at_horizon': exponent},
        )

    @timed("check (A4), (A5)")
    def check_a4_a5(self, coef: Coefficient, scales: Optional[ScaleSet] = None,
                    grid: Optional[np.ndarray] = None,
                    variant: SymbolVariant = SymbolVariant.A4) -> ValidationReport:
        """
        Symbol estimates for k = 1..m and the matching integrability condition.

        (A4) is paired with (A5); (A4') and (A4'') with (A5'). (A4'') is
        checked for every derivative the oracle serves.

        Args:
            coef: Coefficient to certify
            scales: Scale set (default: the coefficient's own)
            grid: Sample times (default: ``build_grid``)
            variant: Which symbol estimate to check

        Returns:
            ValidationReport with the variant's check and 'A5' or 'A5prime'
        """
        variant = SymbolVariant(variant)
        scales = scales or coef.scales
        grid = self.build_grid(coef) if grid is None else np.asarray(grid, dtype=float)
        report = ValidationReport(grid=self.grid_spec(coef, grid))

        report.add(self._symbol_check(coef, scales, grid, variant))
        if variant == SymbolVariant.A4:
            report.add(self._a5_check(coef, scales))
        else:
            report.add(self._a5prime_check(coef, scales))

        for check in report.checks.values():
            logger.info(_status_line(check))
            if 'growth_witness' in check.metrics:
                logger.warning(f"⚠️  {check.name}: {check.notes[-1]}")
        return report

    # -- all -----------------------------------------------------------------

    def validate(self, coef: Coefficient, variants: Optional[Sequence[str]] = None) -> ValidationReport:
        """All checks on one shared grid."""
        grid = self.build_grid(coef)
        logger.info(f"Validating {coef.describe()} on {grid.size} points up to t={grid[-1]:g}")
        report = self.check_a1_a1plus_a2(coef, grid)
        report.merge(self.check_a3(coef, grid=grid))
        for variant in (variants or self.settings.variants):
            report.merge(self.check_a4_a5(coef, grid=grid, variant=SymbolVariant(variant)))
        return report
