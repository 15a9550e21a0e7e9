# gecl/services/floquet_service.py
"""
Periodic Hill system and the counterexample experiments built on it.

Inside a counterexample packet the speed is λ(t_j)(1 + b(ν_j(t − t_j)/δ_j))
up to a slowly varying factor. In the rescaled time s = ν_j(t − t_j)/δ_j
the energy system becomes

    D_s X = B(s, λ̃) X,    B = [[0, λ̃], [λ̃(1 + b(s))², 0]],    λ̃ = δ_jλ(t_j)|ξ|/ν_j,

with b the 1-periodisation of the bump. Its monodromy X(λ̃) = X(1, λ̃)
has det X = 1; an instability interval of λ̃ (largest eigenvalue modulus
μ > 1) makes E(t_j + δ_j, t_j, ξ) grow like μ^{ν_j}.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..config import AppConfig, Family
from ..domain.coefficient import Coefficient
from ..domain.floquet import AmplificationRun, BlowupReport, InstabilityInterval, MonodromyResult
from ..domain.perturbation import BumpProfile, PerturbationKindTag
from ..domain.reports import CheckReport, Verdict
from ..logging_config import get_logger
from ..utils.linalg import det2, eigenvalues2, spectral_norm
from ..utils.timing import timed
from .coefficient_service import counterexample_sequences
from .integrator import DormandPrince45
from .propagator_service import PropagatorService

logger = get_logger('floquet_service')

DET_LIMIT = 1e-10
RECIPROCITY_LIMIT = 1e-9
BAND_EDGE = 1e-9       # |tr X| this close to 2 is not judged by the dichotomy check


class NoInstabilityFoundError(Exception):
    """Raised when no unstable λ̃ exists in the search range; widen the range."""
    pass


def hill_rhs(bump: BumpProfile, lambda_tildes: np.ndarray) -> Callable[[float, np.ndarray], np.ndarray]:
    """f(s, X) = iB(s, λ̃)X for a stack of λ̃ values, X of shape (n, 2, 2)."""
    ilt = 1j * np.asarray(lambda_tildes, dtype=float)[:, None]

    def f(s: float, X: np.ndarray) -> np.ndarray:
        w = 1.0 + bump.periodic_value(s)
        out = np.empty_like(X)
        out[:, 0] = ilt * X[:, 1]
        out[:, 1] = (ilt * w * w) * X[:, 0]
        return out

    return f


class FloquetService:
    """
    Hill monodromy, instability search and the packet amplification runs.

    Usage:
        floquet = FloquetService(config)
        interval = floquet.find_instability_interval(bump)
        runs = floquet.amplification_experiment(coef, interval)
    """

    def __init__(self, config: AppConfig, propagator: Optional[PropagatorService] = None):
        self.config = config
        self.settings = config.floquet
        self.counterexample = config.counterexample
        self.propagator = propagator or PropagatorService(config)

    # -- monodromy -----------------------------------------------------------

    def _map(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
        threads = max(1, int(self.config.threads))
        if threads == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))

    def _solve_periods(self, bump: BumpProfile, lambda_tildes: np.ndarray,
                       periods: Sequence[float]) -> np.ndarray:
        """X(s, λ̃) at the given s values, shape (len(periods), n, 2, 2)."""
        solver = DormandPrince45(self.config.integrator, self.settings.tol)
        lt_max = float(np.max(lambda_tildes))
        w_max = 1.0 + max(bump.bounds()[1], 0.0)
        cap = self.config.integrator.period_fraction * 2.0 * math.pi / (lt_max * w_max + 1.0)
        y0 = np.broadcast_to(np.eye(2, dtype=complex), (len(lambda_tildes), 2, 2)).copy()
        result = solver.solve(hill_rhs(bump, lambda_tildes), y0, 0.0, periods, step_cap=lambda s: cap)
        return result.states * np.exp(result.log_scale)[..., None, None]

    def _result(self, lambda_tilde: float, X: np.ndarray) -> MonodromyResult:
        eig = eigenvalues2(X)
        det_error = float(abs(det2(X) - 1.0))
        if det_error > DET_LIMIT:
            logger.warning(f"⚠️ det X({lambda_tilde:.6g}) deviates from 1 by {det_error:.2e}")
        return MonodromyResult(
            lambda_tilde=float(lambda_tilde),
            X=X,
            eigenvalues=eig,
            unstable=bool(np.max(np.abs(eig)) > 1.0 + self.settings.margin),
            det_error=det_error,
        )

    def monodromies(self, bump: BumpProfile, lambda_tildes: Sequence[float]) -> List[MonodromyResult]:
        """X(λ̃) for many λ̃; chunks run in the thread pool."""
        lts = np.atleast_1d(np.asarray(lambda_tildes, dtype=float))
        if np.any(lts <= 0):
            raise ValueError("λ̃ must be positive")
        threads = max(1, int(self.config.threads))
        chunks = [c for c in np.array_split(np.arange(lts.size), min(threads, lts.size)) if c.size]
        blocks = self._map(lambda idx: self._solve_periods(bump, lts[idx], [1.0])[0], chunks)
        X = np.concatenate(blocks, axis=0)
        return [self._result(lt, X[i]) for i, lt in enumerate(lts)]

    def hill_monodromy(self, bump: BumpProfile, lambda_tilde: float) -> MonodromyResult:
        """
        Monodromy of the Hill system over one period.

        Args:
            bump: Bump profile ψ; the system uses its periodisation b
            lambda_tilde: λ̃ > 0

        Returns:
            MonodromyResult; unstable iff max |eigenvalue| > 1 + margin
        """
        return self.monodromies(bump, [lambda_tilde])[0]

    @timed("Hill sweep", log_level="INFO")
    def sweep(self, bump: BumpProfile, lo: Optional[float] = None, hi: Optional[float] = None,
              points: Optional[int] = None) -> List[MonodromyResult]:
        """Monodromies on an equispaced λ̃ grid in [lo, hi]."""
        lo = self.settings.search_lo if lo is None else lo
        hi = self.settings.search_hi if hi is None else hi
        points = points or self.settings.sweep_points
        return self.monodromies(bump, np.linspace(lo, hi, points))

    def sweep_report(self, results: Sequence[MonodromyResult]) -> CheckReport:
        """det X = 1, μ₁μ₂ = 1 and the trace dichotomy over a sweep."""
        det_err = max(r.det_error for r in results)
        reciprocity = max(float(abs(r.eigenvalues[0] * r.eigenvalues[1] - 1.0)) for r in results)
        mismatches = 0
        trace_imag = 0.0
        for r in results:
            tr = r.trace
            trace_imag = max(trace_imag, abs(tr.imag))
            if abs(abs(tr.real) - 2.0) < BAND_EDGE:
                continue
            if (abs(tr.real) <= 2.0) == r.unstable:
                mismatches += 1
        ok = det_err <= DET_LIMIT and reciprocity <= RECIPROCITY_LIMIT and mismatches == 0
        report = CheckReport(
            name='hill_sweep',
            status=Verdict.PASS if ok else Verdict.FAIL,
            metrics={
                'points': len(results),
                'unstable_points': sum(r.unstable for r in results),
                'det_error': det_err,
                'reciprocity_error': reciprocity,
                'dichotomy_mismatches': mismatches,
                'trace_imag_max': trace_imag,
            },
            rows=[r.to_row() for r in results],
        )
        logger.info(f"📊 Hill sweep: {report.metrics['unstable_points']}/{len(results)} unstable, "
                    f"det err {det_err:.2e}, reciprocity {reciprocity:.2e}")
        return report

    def power_consistency(self, bump: BumpProfile, lambda_tilde: float, n_max: int = 10) -> CheckReport:
        """
        X(λ̃)ⁿ against one integration over [0, n], compared in log-norm.

        The error is |log‖Xⁿ‖ − log‖X(n)‖| / max(1, |log‖X(n)‖|).
        """
        X = self.hill_monodromy(bump, lambda_tilde).X
        direct = self._solve_periods(bump, np.array([lambda_tilde]), np.arange(1, n_max + 1, dtype=float))
        rows = []
        power = np.eye(2, dtype=complex)
        worst = 0.0
        for n in range(1, n_max + 1):
            power = power @ X
            a = math.log(float(spectral_norm(power)))
            b = math.log(float(spectral_norm(direct[n - 1, 0])))
            err = abs(a - b) / max(1.0, abs(b))
            worst = max(worst, err)
            rows.append({'n': n, 'log_norm_power': a, 'log_norm_direct': b, 'rel_error': err})
        return CheckReport(
            name='monodromy_power',
            status=Verdict.PASS if worst <= 1e-6 else Verdict.FAIL,
            metrics={'lambda_tilde': lambda_tilde, 'n_max': n_max, 'max_rel_error': worst},
            rows=rows,
        )

    # -- instability interval ------------------------------------------------

    def _excess(self, bump: BumpProfile, lambda_tilde: float) -> float:
        return self.hill_monodromy(bump, lambda_tilde).max_modulus - (1.0 + self.settings.margin)

    @timed("instability search", log_level="INFO")
    def find_instability_interval(
        self,
        bump: BumpProfile,
        search_range: Optional[Tuple[float, float]] = None,
        refine_tol: Optional[float] = None,
    ) -> InstabilityInterval:
        """
        Widest unstable λ̃ interval, shrunk on both sides.

        Scans max|μ| − (1 + margin) on a grid, refines every sign change
        with brentq, shrinks the widest interval by ``shrink`` of its width
        per side and records the smallest max|μ| over the interior test points.

        Args:
            bump: Bump profile ψ
            search_range: (lo, hi) of λ̃ (default from config)
            refine_tol: Endpoint tolerance (default from config)

        Returns:
            InstabilityInterval with mu_min > 1

        Raises:
            NoInstabilityFoundError: If no λ̃ in range is unstable
        """
        lo, hi = search_range or (self.settings.search_lo, self.settings.search_hi)
        xtol = refine_tol or self.settings.refine_tol
        grid = np.arange(lo, hi + 0.5 * self.settings.scan_step, self.settings.scan_step)
        excess = np.array([r.max_modulus for r in self.monodromies(bump, grid)]) - (1.0 + self.settings.margin)
        unstable = excess > 0

        if not np.any(unstable):
            raise NoInstabilityFoundError(
                f"no unstable λ̃ in [{lo:g}, {hi:g}] (largest modulus excess {float(np.max(excess)):.2e})"
            )

        def edge(i: int) -> float:
            # sign change between grid[i] and grid[i+1]
            return optimize.brentq(lambda x: self._excess(bump, x), grid[i], grid[i + 1], xtol=xtol)

        intervals: List[Tuple[float, float]] = []
        i = 0
        while i < grid.size:
            if not unstable[i]:
                i += 1
                continue
            start = i
            while i + 1 < grid.size and unstable[i + 1]:
                i += 1
            left = grid[0] if start == 0 else edge(start - 1)
            right = grid[-1] if i == grid.size - 1 else edge(i)
            intervals.append((left, right))
            i += 1
        logger.info(f"Found {len(intervals)} instability interval(s) in [{lo:g}, {hi:g}]")

        for raw_lo, raw_hi in sorted(intervals, key=lambda iv: iv[0] - iv[1]):
            width = raw_hi - raw_lo
            s_lo = raw_lo + self.settings.shrink * width
            s_hi = raw_hi - self.settings.shrink * width
            tests = self.monodromies(bump, np.linspace(s_lo, s_hi, self.settings.test_points))
            mu_min = min(r.max_modulus for r in tests)
            if mu_min <= 1.0:
                continue
            mid = self.hill_monodromy(bump, 0.5 * (s_lo + s_hi))
            interval = InstabilityInterval(
                lo=float(s_lo), hi=float(s_hi), mu_min=float(mu_min),
                raw_lo=float(raw_lo), raw_hi=float(raw_hi), phase_class=mid.phase_class,
            )
            logger.info(f"✅ Instability interval [{s_lo:.6g}, {s_hi:.6g}], μ_min={mu_min:.6g}, "
                        f"eigenvalues {mid.phase_class.value}")
            return interval
        raise NoInstabilityFoundError("no interval keeps a modulus above 1 after shrinking")

    # -- packet frequencies --------------------------------------------------

    @staticmethod
    def lambda_tilde_scale(coef: Coefficient, j: int) -> float:
        """δ_jλ(t_j)/ν_j, so that λ̃ = scale·|ξ|."""
        pert = coef.perturbation
        i = pert.index_of(j)
        return pert.delta_seq[i] * coef.shape.value(pert.t_seq[i]) / pert.nu_seq[i]

    def omega_j_frequencies(self, interval: InstabilityInterval, coef: Coefficient, j: int,
                            count: Optional[int] = None) -> np.ndarray:
        """
        ``count`` equispaced frequencies of Ω_j = {ξ : δ_jλ(t_j)ξ/ν_j ∈ interval}.

        count = 1 gives the midpoint frequency.
        """
        count = count or self.counterexample.xi_count
        if interval.width <= 0:
            return np.empty(0)
        scale = self.lambda_tilde_scale(coef, j)
        return np.linspace(interval.lo / scale, interval.hi / scale, count + 2)[1:-1]

    # -- amplification -------------------------------------------------------

    def _packet_propagator(self, coef: Coefficient, j: int, xis: np.ndarray
                           ) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
        """
        E(t_j+δ_j, t_j, ξ) as a product of per-period propagators.

        The product is renormalised by its largest entry after each period.

        Returns:
            (scaled matrices (n, 2, 2), log factors (n,), per-period Y_j(k+1,k))
        """
        pert = coef.perturbation
        i = pert.index_of(j)
        start, length, nu = pert.t_seq[i], pert.delta_seq[i], pert.nu_seq[i]
        if not self.counterexample.measure_periods:
            samples = self.propagator.integrate_many(coef, xis, start, [start + length])
            return samples.entries[0], samples.log_scale[0], []

        edges = start + length * np.arange(nu + 1) / nu
        product = np.broadcast_to(np.eye(2, dtype=complex), (xis.size, 2, 2)).copy()
        log_scale = np.zeros(xis.size)
        periods = []
        for a, b in zip(edges[:-1], edges[1:]):
            samples = self.propagator.integrate_many(coef, xis, float(a), [float(b)])
            Y = samples.entries[0] * np.exp(samples.log_scale[0])[:, None, None]
            periods.append(Y)
            product = Y @ product
            big = np.max(np.abs(product).reshape(xis.size, -1), axis=1)
            product /= big[:, None, None]
            log_scale += np.log(big)
        return product, log_scale, periods

    @timed("amplification experiment", log_level="INFO")
    def amplification_experiment(
        self,
        coef: Coefficient,
        interval: InstabilityInterval,
        j_list: Optional[Sequence[int]] = None,
        count: Optional[int] = None,
    ) -> List[AmplificationRun]:
        """
        E(t_j+δ_j, t_j, ξ) for ξ ∈ Ω_j against the predicted growth μ^{ν_j}/2.

        Args:
            coef: Counterexample coefficient
            interval: Shrunk instability interval; μ = mu_min
            j_list: Packet indices (default from config, limited to existing packets)
            count: Frequencies per packet

        Returns:
            One AmplificationRun per packet
        """
        pert = coef.perturbation
        if pert.kind != PerturbationKindTag.COUNTEREXAMPLE:
            raise ValueError("the amplification experiment needs a counterexample perturbation")
        j_list = j_list or self.counterexample.j_list
        last = pert.first_index + len(pert.t_seq) - 1
        log_mu = math.log(interval.mu_min)
        shape = coef.shape

        runs = []
        for j in j_list:
            if not pert.first_index <= j <= last:
                logger.warning(f"⚠️ packet j={j} not generated (j_max={last}); skipped")
                continue
            xis = self.omega_j_frequencies(interval, coef, j, count)
            if xis.size == 0:
                continue
            i = pert.index_of(j)
            start, end = pert.packet_for(j)
            nu = pert.nu_seq[i]
            scaled, log_scale, periods = self._packet_propagator(coef, j, xis)

            log_modulus = np.log(np.abs(eigenvalues2(scaled)[:, 0])) + log_scale
            log_energy = 2.0 * (np.log(spectral_norm(scaled)) + log_scale)
            log_lambda_step = float(shape.log_value(end) - shape.log_value(start))

            deviation = spread = None
            if periods:
                lts = xis * self.lambda_tilde_scale(coef, j)
                X = np.stack([m.X for m in self.monodromies(pert.bump, lts)])
                deviation = np.max([spectral_norm(Y - X) for Y in periods], axis=0)
                spread = np.max([spectral_norm(Y - periods[0]) for Y in periods], axis=0)

            run = AmplificationRun(
                j=j,
                nu=nu,
                xis=xis,
                lambda_tildes=xis * self.lambda_tilde_scale(coef, j),
                log_modulus=log_modulus,
                log_bound=nu * log_mu - math.log(2.0),
                log_energy_gain=log_energy,
                log_normalised_energy=log_energy - log_lambda_step,
                hypothesis_ratio=float(pert.delta_seq[i] * shape.value(start) / shape.primitive(start)),
                period_deviation=deviation,
                period_spread=spread,
            )
            icon = "✅" if run.passed else "❌"
            logger.info(f"{icon} packet j={j}: ν={nu}, log|μ_max| ∈ [{float(np.min(log_modulus)):.3f}, "
                        f"{float(np.max(log_modulus)):.3f}], bound {run.log_bound:.3f}")
            runs.append(run)
        return runs

    def amplification_report(self, runs: Sequence[AmplificationRun]) -> CheckReport:
        """
        First packet from which every later packet meets μ^{ν_j}/2 and
        beats the admissible ceiling. Passes when such a packet exists.
        """
        ceiling = self.counterexample.admissible_ceiling
        threshold = None
        for k in range(len(runs)):
            if all(run.passed and run.beats_ceiling(ceiling) for run in runs[k:]):
                threshold = runs[k].j
                break
        passing = [run for run in runs if run.passed]
        beats = all(run.beats_ceiling(ceiling) for run in passing)
        rates = [float(np.min(run.growth_rate)) for run in passing]
        metrics: Dict[str, Any] = {
            'j_threshold': threshold,
            'passing_packets': [run.j for run in passing],
            'min_growth_rate': min(rates) if rates else float('nan'),
            'beats_admissible_ceiling': beats,
            'admissible_ceiling': ceiling,
        }
        deviations = [float(np.max(run.period_deviation)) for run in runs if run.period_deviation is not None]
        if deviations:
            metrics['period_deviation'] = {run.j: float(np.max(run.period_deviation))
                                           for run in runs if run.period_deviation is not None}
            metrics['hypothesis_ratio'] = {run.j: run.hypothesis_ratio for run in runs}
        status = Verdict.PASS if threshold is not None else Verdict.FAIL
        rows = [row for run in runs for row in run.to_rows()]
        return CheckReport(name='amplification', status=status, metrics=metrics, rows=rows)

    # -- blow-up condition ---------------------------------------------------

    def blowup_condition(self, coef: Coefficient, interval: InstabilityInterval,
                         j_max: Optional[int] = None) -> BlowupReport:
        """
        log s_j with s_j = (δ_j²/ν_j²)λ²(t_j)·S^j·exp(2cΣ_{ℓ<j}ν_ℓ − 2ν_j log μ).

        A contradiction with the uniform energy bound is certified when
        log s_j decreases over the last four indices and has dropped by
        more than 10 below its maximum.
        """
        pert = coef.perturbation
        j_max = j_max or self.counterexample.blowup_j_max
        shape = coef.shape
        t_seq, delta_seq, nu_seq = counterexample_sequences(
            shape, coef.scales, pert.epsilon, pert.sigma, j_max,
        )
        log_mu = math.log(interval.mu_min)
        c = pert.bump.log_derivative_sup()
        log_steps = [
            float(shape.log_value(t + d) - shape.log_value(t)) for t, d in zip(t_seq, delta_seq)
        ]
        log_S = max(log_steps)

        js, log_terms = [], []
        nu_sum = 0.0
        for index, (t, d, nu) in enumerate(zip(t_seq, delta_seq, nu_seq)):
            j = index + 1
            term = (2.0 * math.log(d) - 2.0 * math.log(nu) + 2.0 * float(shape.log_value(t))
                    + j * log_S + 2.0 * c * nu_sum - 2.0 * nu * log_mu)
            js.append(j)
            log_terms.append(term)
            nu_sum += nu

        tail = np.asarray(log_terms[-4:])
        decreasing = bool(tail.size >= 2 and np.all(np.diff(tail) < 0))
        tends_to_zero = bool(log_terms[-1] < max(log_terms) - 10.0 and log_terms[-1] < 0.0)

        criterion = None
        params = coef.scales.params or {}
        if shape.family == Family.POLYNOMIAL:
            criterion = c / (pert.sigma ** (pert.epsilon * (shape.p - params['q'])) - 1.0)
        elif shape.family == Family.EXPONENTIAL:
            criterion = c / (math.exp(pert.sigma * pert.epsilon * (1.0 - params['a'])) - 1.0)

        report = BlowupReport(
            j=js, log_terms=log_terms, c=c, log_mu=log_mu, S=math.exp(log_S),
            criterion=criterion, decreasing=decreasing, tends_to_zero=tends_to_zero,
            extra={'criterion_holds': criterion is not None and criterion < log_mu,
                   'sigma': pert.sigma, 'epsilon': pert.epsilon},
        )
        icon = "✅" if report.contradiction else "⚠️"
        logger.info(f"{icon} blow-up sequence: decreasing={decreasing}, tends_to_zero={tends_to_zero}, "
                    f"criterion={criterion if criterion is None else round(criterion, 6)} vs log μ={log_mu:.6g}")
        return report
