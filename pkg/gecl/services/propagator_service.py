# gecl/services/propagator_service.py
"""
Fundamental solutions E(t,s,ξ) of ∂_tV = iA(t,ξ)V and the zone-wise
verification runs built on them.

Integrations of one frequency batch share a single adaptive step
sequence; independent batches are spread over a thread pool. The
suprapolynomial family has λ'/λ → ∞ at t = 0, so the part of a path
below ``shape.regular_from`` is integrated in the balanced unknowns
W = (|ξ|û, D_tû) and converted with E_V = diag(λ(t),1)·E_W·diag(1/λ(s),1).
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from ..config import AppConfig, PropagatorTask
from ..domain.coefficient import Coefficient
from ..domain.propagator import PropagatorMatrix, PropagatorSamples, SystemForm, SystemMatrix
from ..domain.reports import (
    CheckReport,
    EntryBoundReport,
    StabilisationReport,
    TwoSidedReport,
    Verdict,
    running_max_drift,
)
from ..domain.scales import ScaleSet
from ..domain.shape import ShapeFunction
from ..logging_config import get_logger
from ..utils.grids import geometric_time_grid, log_frequency_grid, merge_breakpoints
from ..utils.linalg import det2, inverse2, singular_values, spectral_norm
from ..utils.timing import timed
from .integrator import DormandPrince45, IntegrationError
from .zone_service import ZoneService

logger = get_logger('propagator_service')

TOL_RANGE = (1e-12, 1e-4)
GAUSS_NODES = 16


class LiouvilleError(Exception):
    """Raised when det E(t,s,ξ) drifts away from λ(t)/λ(s)."""
    pass


class SeriesTruncationError(Exception):
    """Raised when the Peano-Baker series has not converged after the requested terms."""
    pass


@dataclass
class _Run:
    entries: np.ndarray     # (T, n, 2, 2)
    log_scale: np.ndarray   # (T, n)
    steps: int = 0
    rejected: int = 0
    max_error: float = 0.0


@lru_cache(maxsize=8)
def legendre_integration(q: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes x, weights w and the matrix S with
    S[i, j] = ∫_{-1}^{x_i} ℓ_j, ℓ_j the Lagrange basis on the nodes.

    Expanding ℓ_j in Legendre polynomials is exact at the nodes, and
    ∫_{-1}^{x} P_n = (P_{n+1} − P_{n−1})/(2n+1).
    """
    x, w = special.roots_legendre(q)
    P = np.array([special.eval_legendre(n, x) for n in range(q + 1)])
    integrals = np.empty((q, q))
    integrals[0] = x + 1.0
    for n in range(1, q):
        integrals[n] = (P[n + 1] - P[n - 1]) / (2 * n + 1)
    weights = (2 * np.arange(q) + 1) / 2.0
    S = (integrals.T * weights) @ (P[:q] * w)
    return x, w, S


class PropagatorService:
    """
    Integrate and verify fundamental solutions for one configuration.

    Usage:
        service = PropagatorService(config)
        E = service.integrate(coef, xi=1.0, s=0.0, t=3.0)
        report = service.verify_hyp_zone(coef)
    """

    def __init__(self, config: AppConfig):
        self.config = config
        self.settings = config.propagator

    # -- plumbing ------------------------------------------------------------

    def _check_tol(self, tol: Optional[float]) -> float:
        tol = float(self.settings.tol if tol is None else tol)
        lo, hi = TOL_RANGE
        if not lo <= tol <= hi:
            raise IntegrationError(f"tolerance {tol:g} outside [{lo:g}, {hi:g}]")
        return tol

    def _map(self, fn: Callable[[Any], Any], items: Sequence[Any]) -> List[Any]:
        """Apply fn to every item, in a thread pool when configured; order is kept."""
        threads = max(1, int(self.config.threads))
        if threads == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))

    def _run_form(self, coef: Coefficient, xis: np.ndarray, s: float, times: np.ndarray,
                  tol: float, form: SystemForm) -> _Run:
        system = SystemMatrix(coef, form)
        solver = DormandPrince45(self.config.integrator, tol)
        fraction = self.config.integrator.period_fraction
        xi_max = float(np.max(xis))

        def cap(t: float) -> float:
            return fraction * 2.0 * math.pi / (coef.value(t) * xi_max + 1.0)

        y0 = np.broadcast_to(np.eye(2, dtype=complex), (len(xis), 2, 2)).copy()
        result = solver.solve(system.rhs(xis), y0, s, times, step_cap=cap,
                              breakpoints=coef.breakpoints())
        entries = result.states
        if form == SystemForm.BALANCED and entries.size:
            entries[..., 0, :] *= coef.shape.eval(times)[:, None, None]
            entries[..., :, 0] /= coef.shape.value(s)
        return _Run(entries, result.log_scale, result.steps, result.rejected, result.max_error)

    def _run_path(self, coef: Coefficient, xis: np.ndarray, s: float, times: np.ndarray,
                  tol: float) -> _Run:
        r = coef.shape.regular_from
        end = float(times[-1]) if times.size else s
        if r <= 0.0 or min(s, end) >= r:
            return self._run_form(coef, xis, s, times, tol, SystemForm.ENERGY)
        if max(s, end) <= r:
            return self._run_form(coef, xis, s, times, tol, SystemForm.BALANCED)

        # the path crosses regular_from: split there and compose
        if s < r:
            first, second = SystemForm.BALANCED, SystemForm.ENERGY
        else:
            first, second = SystemForm.ENERGY, SystemForm.BALANCED
        direction = 1.0 if end >= s else -1.0
        head_mask = direction * (times - r) <= 0.0
        head = self._run_form(coef, xis, s, np.append(times[head_mask], r), tol, first)
        tail = self._run_form(coef, xis, r, times[~head_mask], tol, second)
        at_r, log_r = head.entries[-1], head.log_scale[-1]
        return _Run(
            entries=np.concatenate([head.entries[:-1], tail.entries @ at_r[None]]),
            log_scale=np.concatenate([head.log_scale[:-1], tail.log_scale + log_r[None]]),
            steps=head.steps + tail.steps,
            rejected=head.rejected + tail.rejected,
            max_error=max(head.max_error, tail.max_error),
        )

    def liouville_errors(self, shape: ShapeFunction, s: float, times: np.ndarray,
                         entries: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
        """|det E / (λ(t)/λ(s)) − 1| for every sample, shape (T, n)."""
        expected = shape.log_value(times) - float(shape.log_value(s))
        with np.errstate(over='ignore', invalid='ignore'):
            scaled = det2(entries) * np.exp(2.0 * log_scale - expected[:, None])
        return np.abs(scaled - 1.0)

    def _assert_liouville(self, coef: Coefficient, samples: PropagatorSamples, tol: float) -> float:
        if samples.times.size == 0:
            return 0.0
        errors = self.liouville_errors(coef.shape, samples.s, samples.times,
                                       samples.entries, samples.log_scale)
        worst = float(np.max(errors)) if np.all(np.isfinite(errors)) else math.inf
        limit = max(self.config.integrator.liouville_tol, 100.0 * tol)
        if worst > limit:
            i_t, i_xi = np.unravel_index(int(np.nanargmax(np.where(np.isfinite(errors), errors, np.inf))),
                                         errors.shape)
            message = (f"det E deviates from λ(t)/λ(s) by {worst:.3e} "
                       f"at t={samples.times[i_t]:.6g}, xi={samples.xis[i_xi]:.6g} (limit {limit:.1e})")
            if self.config.integrator.assert_liouville:
                raise LiouvilleError(message)
            logger.warning(f"⚠️ {message}")
        return worst

    # -- integration ---------------------------------------------------------

    def integrate_many(
        self,
        coef: Coefficient,
        xis: Sequence[float],
        s: float,
        times: Sequence[float],
        tol: Optional[float] = None,
    ) -> PropagatorSamples:
        """
        E(t_i, s, ξ_k) for a batch of frequencies.

        Args:
            coef: Speed coefficient
            xis: Frequencies |ξ| > 0
            s: Initial time >= 0
            times: Output times >= 0, monotone away from s
            tol: Integrator tolerance in [1e-12, 1e-4]

        Returns:
            PropagatorSamples with entries of shape (T, n, 2, 2)

        Raises:
            IntegrationError: On unreachable tolerance or non-finite solutions
            LiouvilleError: If the determinant check fails while asserting
        """
        tol = self._check_tol(tol)
        xis = np.atleast_1d(np.asarray(xis, dtype=float))
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if s < 0 or np.any(times < 0):
            raise ValueError("propagators are defined for s, t >= 0")
        if np.any(xis <= 0):
            raise ValueError("frequencies must be positive")

        threads = max(1, int(self.config.threads))
        chunks = [c for c in np.array_split(np.arange(len(xis)), min(threads, len(xis))) if c.size]
        runs = self._map(lambda idx: self._run_path(coef, xis[idx], s, times, tol), chunks)
        samples = PropagatorSamples(
            s=float(s),
            times=times,
            xis=xis,
            entries=np.concatenate([run.entries for run in runs], axis=1),
            log_scale=np.concatenate([run.log_scale for run in runs], axis=1),
            steps_taken=sum(run.steps for run in runs),
            rejected_steps=sum(run.rejected for run in runs),
            est_local_error=max(run.max_error for run in runs),
        )
        if np.any(samples.log_scale > 0):
            logger.warning(
                f"⚠️ propagator renormalised above {self.config.integrator.renormalize_above:g} "
                f"(max log factor {float(np.max(samples.log_scale)):.1f})"
            )
        samples.meta['det_err'] = self._assert_liouville(coef, samples, tol)
        return samples

    def integrate(self, coef: Coefficient, xi: float, s: float, t: float,
                  tol: Optional[float] = None) -> PropagatorMatrix:
        """
        E(t,s,ξ) for one frequency; t < s integrates backwards.

        Returns:
            PropagatorMatrix (exactly I when t == s)
        """
        self._check_tol(tol)
        if t == s:
            return PropagatorMatrix.identity(float(s), float(xi))
        return self.integrate_many(coef, [xi], s, [t], tol).at(0, 0)

    def run_tasks(self, coef: Coefficient, tasks: Sequence[PropagatorTask]) -> List[Dict[str, float]]:
        """Batch manifest: one CSV row per (s, t, ξ, tol) task."""
        def one(task: PropagatorTask) -> Dict[str, float]:
            E = self.integrate(coef, task.xi, task.s, task.t, task.tol)
            log_lt = float(coef.shape.log_value(task.t))
            log_ls = float(coef.shape.log_value(task.s))
            row = E.to_row(log_expected_det=log_lt - log_ls)
            row['tol'] = task.tol
            row['ratio'] = math.exp(E.log_norm + 0.5 * (log_ls - log_lt))
            return row

        return self._map(one, list(tasks))

    def check_cocycle(self, coef: Coefficient, xi: float, s: float, r: float, t: float,
                      tol: Optional[float] = None, limit: float = 1e-7) -> CheckReport:
        """Composed vs direct propagator and E(s,t)·E(t,s) = I."""
        E_ts = self.integrate(coef, xi, s, t, tol).matrix
        E_tr = self.integrate(coef, xi, r, t, tol).matrix
        E_rs = self.integrate(coef, xi, s, r, tol).matrix
        E_st = self.integrate(coef, xi, t, s, tol).matrix
        cocycle = float(spectral_norm(E_tr @ E_rs - E_ts) / spectral_norm(E_ts))
        inverse = float(spectral_norm(E_st @ E_ts - np.eye(2)))
        status = Verdict.PASS if max(cocycle, inverse) <= limit else Verdict.FAIL
        return CheckReport(
            name='cocycle',
            status=status,
            metrics={'xi': xi, 's': s, 'r': r, 't': t, 'cocycle_error': cocycle, 'inverse_error': inverse},
        )

    @timed("Liouville survey", log_level="INFO")
    def liouville_survey(self, coef: Coefficient, xis: Optional[Sequence[float]] = None,
                         t_max: Optional[float] = None) -> CheckReport:
        """
        |det E(t,s,ξ) − λ(t)/λ(s)|/(λ(t)/λ(s)) over all zones.

        Starts at s = 0, t⁽¹⁾ and t⁽²⁾ of every frequency and samples a
        geometric grid up to the horizon.
        """
        xis = np.asarray(xis if xis is not None else self._configured_frequencies(), dtype=float)
        T = coef.shape.safe_horizon(float(t_max if t_max is not None else self.settings.t_max))
        zones = ZoneService(coef)
        limit = max(self.config.integrator.liouville_tol, 100.0 * self.settings.tol)
        jobs = []
        for xi in xis:
            b = zones.boundaries(xi)
            for s in sorted({0.0, b.t1_or_zero, b.t2_or_zero}):
                if s < T:
                    jobs.append((float(xi), float(s)))

        def run(job: Tuple[float, float]) -> List[Dict[str, float]]:
            xi, s = job
            times = geometric_time_grid(T, self.settings.points_per_decade, t_min=s)[1:]
            samples = self.integrate_many(coef, [xi], s, times)
            errors = self.liouville_errors(coef.shape, s, times, samples.entries, samples.log_scale)[:, 0]
            return [{'xi': xi, 's': s, 't': float(t), 'det_err': float(e)} for t, e in zip(times, errors)]

        notes = []
        try:
            rows = [row for part in self._map(run, jobs) for row in part]
        except LiouvilleError as e:
            return CheckReport(name='liouville', status=Verdict.FAIL,
                               metrics={'limit': limit, 'samples': 0}, notes=[str(e)])
        worst = max((row['det_err'] for row in rows), default=0.0)
        if len(rows) < 500:
            notes.append(f"only {len(rows)} samples; widen xi_count or points_per_decade for a denser survey")
        report = CheckReport(
            name='liouville',
            status=Verdict.PASS if worst < limit else Verdict.FAIL,
            metrics={'max_det_err': worst, 'samples': len(rows), 'limit': limit},
            rows=rows,
            notes=notes,
        )
        logger.info(f"{'✅' if report.passed else '❌'} Liouville: {len(rows)} samples, max error {worst:.2e}")
        return report

    @timed("oracle equivalence", log_level="INFO")
    def check_oracle(self, coef: Coefficient, count: int = 50, rng: Optional[np.random.Generator] = None,
                     max_start: float = 20.0, max_length: float = 2.0, limit: float = 1e-8) -> CheckReport:
        """
        Adaptive integration against the Peano-Baker oracle on random short intervals.

        The error is ‖E_rk − E_pb‖/max(1, ‖E_pb‖) in the spectral norm; the
        integrator runs at 1e-12 for this comparison.
        """
        rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        lo, hi = math.log(self.settings.xi_min), math.log(self.settings.xi_max)
        T = coef.shape.safe_horizon(max_start + max_length)
        jobs = []
        for _ in range(count):
            s = float(rng.uniform(0.0, max(T - max_length, 0.0)))
            t = s + float(rng.uniform(0.05, max_length))
            jobs.append((math.exp(float(rng.uniform(lo, hi))), s, t))

        def run(job: Tuple[float, float, float]) -> Dict[str, float]:
            xi, s, t = job
            E = self.integrate(coef, xi, s, t, tol=1e-12).matrix
            P = self.peano_baker_oracle(coef, xi, s, t).matrix
            scale = max(1.0, float(spectral_norm(P)))
            return {'xi': xi, 's': s, 't': t, 'error': float(spectral_norm(E - P)) / scale}

        rows = self._map(run, jobs)
        worst = max(row['error'] for row in rows)
        report = CheckReport(
            name='oracle',
            status=Verdict.PASS if worst <= limit else Verdict.FAIL,
            metrics={'max_error': worst, 'intervals': count, 'limit': limit},
            rows=rows,
        )
        logger.info(f"{'✅' if report.passed else '❌'} oracle equivalence: max error {worst:.2e} "
                    f"over {count} intervals")
        return report

    # -- Peano-Baker oracle --------------------------------------------------

    def peano_baker_oracle(
        self,
        coef: Coefficient,
        xi: float,
        s: float,
        t: float,
        terms: Optional[int] = None,
        substeps: Optional[int] = None,
    ) -> PropagatorMatrix:
        """
        E(t,s,ξ) from the truncated Peano-Baker series, one series per substep.

        Each substep keeps ∫‖A‖ below θ with θ^terms/terms! ≈ 1e-11, never
        crosses a breakpoint of the coefficient, and evaluates the nested
        integrals by spectral integration on 16 Gauss-Legendre nodes.

        Args:
            coef: Speed coefficient
            xi: Frequency |ξ| > 0
            s: Initial time
            t: Final time
            terms: Series terms per substep (>= 4); defaults to the config value
            substeps: Minimum number of substeps

        Returns:
            PropagatorMatrix computed without the Runge-Kutta path

        Raises:
            SeriesTruncationError: If the last term of a substep exceeds
                1e-10 of the partial sum
        """
        terms = int(terms if terms is not None else self.settings.peano_baker_terms)
        if terms < 4:
            raise ValueError(f"Peano-Baker oracle needs at least 4 terms, got {terms}")
        if t == s:
            return PropagatorMatrix.identity(float(s), float(xi))

        form = SystemForm.BALANCED if coef.shape.regular_from > 0 else SystemForm.ENERGY
        system = SystemMatrix(coef, form)
        x, w, S = legendre_integration(GAUSS_NODES)
        theta = min(0.5, (1e-11 * math.factorial(terms)) ** (1.0 / terms))
        direction = 1.0 if t > s else -1.0
        h_floor = abs(t - s) / substeps if substeps else math.inf

        def norm_at(u: float) -> float:
            return float(spectral_norm(system.matrix(u, xi)[0]))

        E = np.eye(2, dtype=complex)
        count = 0
        worst = 0.0
        u = float(s)
        stops = list(merge_breakpoints(s, t, coef.breakpoints())) + [float(t)]
        for stop in stops:
            while direction * (stop - u) > 0:
                remaining = abs(stop - u)
                h = min(remaining, h_floor, self._packet_scale(coef, u + direction * 1e-12 * max(1.0, abs(u))))
                a_norm = norm_at(u)
                if a_norm * h > theta:
                    h = theta / a_norm
                for _ in range(30):
                    nodes = u + 0.5 * (x + 1.0) * direction * h
                    peak = max(norm_at(v) for v in nodes)
                    if peak * h <= theta * 1.0001:
                        break
                    h = theta / peak
                landing = h >= remaining * (1.0 - 1e-12)
                step = direction * (remaining if landing else h)
                block, rel = self._series_block(system, xi, u, step, terms, x, w, S)
                E = block @ E
                worst = max(worst, rel)
                count += 1
                u = stop if landing else u + step

        if form == SystemForm.BALANCED:
            E[0, :] *= coef.shape.value(t)
            E[:, 0] /= coef.shape.value(s)
        return PropagatorMatrix(entries=E, s=float(s), t=float(t), xi=float(xi),
                                steps_taken=count, est_local_error=worst)

    @staticmethod
    def _packet_scale(coef: Coefficient, u: float) -> float:
        """Substep cap inside a packet: an eighth of one bump period."""
        pert = coef.perturbation
        if pert.is_identity:
            return math.inf
        for i, (start, end) in enumerate(pert.packets):
            if start <= u < end:
                periods = pert.nu_seq[i] if pert.nu_seq else 1
                return (end - start) / (8.0 * max(periods, 1))
        return math.inf

    @staticmethod
    def _series_block(system: SystemMatrix, xi: float, u0: float, h: float, terms: int,
                      x: np.ndarray, w: np.ndarray, S: np.ndarray) -> Tuple[np.ndarray, float]:
        nodes = u0 + 0.5 * (x + 1.0) * h
        iA = 1j * np.stack([system.matrix(v, xi)[0] for v in nodes])
        half = 0.5 * h
        P = np.broadcast_to(np.eye(2, dtype=complex), (len(x), 2, 2)).copy()
        total = np.eye(2, dtype=complex)
        last = np.zeros((2, 2), dtype=complex)
        for _ in range(terms):
            G = iA @ P
            last = half * np.einsum('j,jab->ab', w, G)
            P = half * np.einsum('ij,jab->iab', S, G)
            total = total + last
        rel = float(spectral_norm(last) / spectral_norm(total))
        if rel > 1e-10:
            raise SeriesTruncationError(
                f"last of {terms} terms has relative size {rel:.2e} on [{u0:.6g}, {u0 + h:.6g}]"
            )
        return total, rel

    # -- frequency windows ---------------------------------------------------

    def auto_frequencies(self, coef: Coefficient, log_scale_T: float, T: float, N: float) -> np.ndarray:
        """
        Frequencies with scale(T)|ξ| ≥ 2N and, where possible, Λ(T)|ξ| within the phase budget.
        """
        log_lo = math.log(2.0 * N) - log_scale_T
        log_hi = math.log(self.settings.phase_budget) - float(coef.shape.log_primitive(T))
        if log_hi <= log_lo:
            logger.warning(
                f"⚠️ zone window exceeds the phase budget at T={T:g}; using the single frequency "
                f"{math.exp(log_lo):.3e}"
            )
            return np.array([math.exp(log_lo)])
        return np.exp(np.linspace(log_lo, log_hi, self.settings.xi_count))

    def _configured_frequencies(self) -> np.ndarray:
        return log_frequency_grid(self.settings.xi_min, self.settings.xi_max, self.settings.xi_count)

    # -- two-sided checks ----------------------------------------------------

    def _two_sided(
        self,
        name: str,
        coef: Coefficient,
        xis: np.ndarray,
        starts: Sequence[float],
        T: float,
        t_grid: Optional[Sequence[float]],
        constant: float,
    ) -> TwoSidedReport:
        shape = coef.shape
        ladders = []
        for s_k in starts:
            if t_grid is None:
                ladder = geometric_time_grid(T, self.settings.points_per_decade, t_min=s_k)
            else:
                later = [float(v) for v in t_grid if v > s_k]
                ladder = np.array([s_k] + later)
            ladders.append(ladder)

        s0 = float(min(starts))
        union = np.unique(np.concatenate(ladders + [np.asarray(starts, dtype=float)]))
        samples = self.integrate_many(coef, xis, s0, union)

        rows: List[Dict[str, float]] = []
        all_ratios: List[np.ndarray] = []
        drift = 0.0
        for k, (xi, s_k, ladder) in enumerate(zip(xis, starts, ladders)):
            if ladder.size < 2:
                continue
            i_s = int(np.searchsorted(union, s_k))
            idx = np.searchsorted(union, ladder)
            M = samples.entries[idx, k] @ inverse2(samples.entries[i_s, k])[None]
            L = samples.log_scale[idx, k] - samples.log_scale[i_s, k]
            sigma_max, sigma_min = singular_values(M)
            lt = shape.log_value(ladder)
            ls = float(shape.log_value(s_k))
            with np.errstate(divide='ignore'):
                forward = np.exp(np.log(sigma_max) + L + 0.5 * (ls - lt))
                reverse = np.exp(-(np.log(sigma_min) + L) + 0.5 * (lt - ls))
            drift = max(drift, running_max_drift(ladder, forward), running_max_drift(ladder, reverse))
            all_ratios.extend([forward, reverse])
            for t, f, b in zip(ladder, forward, reverse):
                rows.append({'xi': float(xi), 's': float(s_k), 't': float(t),
                             'ratio': float(f), 'ratio_reversed': float(b)})

        if not all_ratios:
            return TwoSidedReport(name=name, status=Verdict.MARGINAL,
                                  notes=["no frequency has a non-trivial ladder"], constant=constant)

        ratios = np.concatenate(all_ratios)
        finite = bool(np.all(np.isfinite(ratios)))
        lo = float(np.min(ratios)) if finite else float('nan')
        hi = float(np.max(ratios)) if finite else float('inf')
        notes = []
        if not finite:
            status = Verdict.FAIL
            notes.append("non-finite ratio")
        elif lo < 1.0 / constant or hi > constant:
            status = Verdict.FAIL
            notes.append(f"ratio range [{lo:.3g}, {hi:.3g}] leaves [1/{constant:g}, {constant:g}]")
        elif drift >= self.settings.drift_limit:
            status = Verdict.MARGINAL
            notes.append(f"running max still grows by {100 * drift:.1f}% over the last decade")
            logger.warning(f"⚠️ {name}: marginal, last-decade drift {drift:.3f}")
        else:
            status = Verdict.PASS
        logger.info(f"📊 {name}: ratio in [{lo:.4g}, {hi:.4g}], drift {drift:.3g} → {status.value}")
        return TwoSidedReport(
            name=name,
            status=status,
            metrics={'frequencies': len(xis), 'T': T, 'steps': samples.steps_taken,
                     'det_err': samples.meta.get('det_err', 0.0)},
            rows=rows,
            notes=notes,
            min_ratio=lo,
            max_ratio=hi,
            constant=constant,
            drift=drift,
        )

    @timed("verify_lambda_two_sided", log_level="INFO")
    def verify_lambda_two_sided(
        self,
        shape: ShapeFunction,
        scales: ScaleSet,
        xi_grid: Optional[Sequence[float]] = None,
        t_grid: Optional[Sequence[float]] = None,
        N: Optional[float] = None,
        t_max: Optional[float] = None,
    ) -> TwoSidedReport:
        """
        ‖E_λ(t,s,ξ)‖·√(λ(s)/λ(t)) in both orders of s and t, for s, t ≥ t_ξ⁽¹⁾ and ω ≡ 1.
        """
        coef = Coefficient(shape=shape, scales=scales)
        N = float(N if N is not None else scales.N)
        T = shape.safe_horizon(float(t_max if t_max is not None else self.settings.t_max))
        zones = ZoneService(coef, N)
        xis = (np.asarray(xi_grid, dtype=float) if xi_grid is not None
               else self.auto_frequencies(coef, float(shape.log_primitive(T)), T, N))
        starts = [zones.boundaries(xi).t1_or_zero for xi in xis]
        return self._two_sided('lambda_two_sided', coef, xis, starts, T, t_grid,
                               self.settings.two_sided_constant)

    @timed("verify_hyp_zone", log_level="INFO")
    def verify_hyp_zone(
        self,
        coef: Coefficient,
        xi_grid: Optional[Sequence[float]] = None,
        t_grid: Optional[Sequence[float]] = None,
        N: Optional[float] = None,
        t_max: Optional[float] = None,
    ) -> TwoSidedReport:
        """
        The same ratio statistic for the full coefficient in Z_hyp(N), t, s ≥ t_ξ⁽²⁾.
        """
        N = float(N if N is not None else coef.scales.N)
        T = coef.shape.safe_horizon(float(t_max if t_max is not None else self.settings.t_max))
        zones = ZoneService(coef, N)
        xis = (np.asarray(xi_grid, dtype=float) if xi_grid is not None
               else self.auto_frequencies(coef, float(coef.scales.log_theta(T)), T, N))
        starts = [zones.boundaries(xi).t2_or_zero for xi in xis]
        return self._two_sided('hyp_zone', coef, xis, starts, T, t_grid, self.settings.hyp_constant)

    # -- pseudo-differential zone --------------------------------------------

    @timed("verify_pd_zone", log_level="INFO")
    def verify_pd_zone(
        self,
        coef: Coefficient,
        xi_grid: Optional[Sequence[float]] = None,
        N: Optional[float] = None,
    ) -> EntryBoundReport:
        """
        Entrywise bounds for E(t,s,ξ), 0 ≤ t ≤ s = t_ξ⁽¹⁾, and for its inverse.

        Backward form:  |E₁₁|, |E₂₁| ≲ λ(t)/λ(s),  |E₁₂| ≲ λ(t)(s−t)/Λ(s),  |E₂₂| ≲ 1.
        Forward form (inverse, Cramer):  |F₁₁| ≲ λ(s)/λ(t),  |F₁₂| ≲ λ(s)(s−t)/Λ(s),
        |F₂₁|, |F₂₂| ≲ 1.

        Returns:
            EntryBoundReport with the smallest admissible constant per entry
        """
        N = float(N if N is not None else coef.scales.N)
        zones = ZoneService(coef, N)
        xis = np.asarray(xi_grid if xi_grid is not None else self._configured_frequencies(), dtype=float)
        shape = coef.shape

        jobs = [(xi, zones.boundaries(xi).t1) for xi in xis]
        jobs = [(xi, s) for xi, s in jobs if s is not None and s > 0]

        def run(job: Tuple[float, float]) -> List[Dict[str, float]]:
            xi, s = job
            times = geometric_time_grid(s, self.settings.points_per_decade * 2, t_min=0.0)[::-1]
            samples = self.integrate_many(coef, [xi], s, times)
            E = samples.entries[:, 0] * np.exp(samples.log_scale[:, 0])[:, None, None]
            F = inverse2(E)
            lam_ratio = np.exp(shape.log_value(times) - float(shape.log_value(s)))
            gap = (s - times) / float(shape.primitive(s))
            out = []
            for i, t in enumerate(times):
                out.append({
                    'xi': float(xi), 's': float(s), 't': float(t),
                    'E11': abs(E[i, 0, 0]) / lam_ratio[i],
                    'E12': abs(E[i, 0, 1]) / (lam_ratio[i] * gap[i] * shape.value(s)) if gap[i] > 0 else 0.0,
                    'E21': abs(E[i, 1, 0]) / lam_ratio[i],
                    'E22': abs(E[i, 1, 1]),
                    'F11': abs(F[i, 0, 0]) * lam_ratio[i],
                    'F12': abs(F[i, 0, 1]) / (gap[i] * shape.value(s)) if gap[i] > 0 else 0.0,
                    'F21': abs(F[i, 1, 0]),
                    'F22': abs(F[i, 1, 1]),
                })
            return out

        rows = [row for chunk in self._map(run, jobs) for row in chunk]
        if not rows:
            return EntryBoundReport(name='pd_zone', status=Verdict.MARGINAL,
                                    notes=["no frequency has a non-empty pseudo-differential zone"])

        backward = {key: max(r[f'E{key}'] for r in rows) for key in ('11', '12', '21', '22')}
        forward = {key: max(r[f'F{key}'] for r in rows) for key in ('11', '12', '21', '22')}
        constants = list(backward.values()) + list(forward.values())
        notes = []
        if not all(np.isfinite(c) for c in constants):
            status = Verdict.FAIL
            notes.append("non-finite entry ratio")
        elif max(constants) > self.settings.pd_constant:
            status = Verdict.MARGINAL
            notes.append(f"largest entry constant {max(constants):.3g} exceeds {self.settings.pd_constant:g}")
        else:
            status = Verdict.PASS
        return EntryBoundReport(
            name='pd_zone', status=status, metrics={'frequencies': len(jobs)},
            rows=rows, notes=notes, backward=backward, forward=forward,
        )

    # -- intermediate zone ---------------------------------------------------

    @timed("verify_int_zone", log_level="INFO")
    def verify_int_zone(
        self,
        coef: Coefficient,
        xi_grid: Optional[Sequence[float]] = None,
        N: Optional[float] = None,
        det_limit: float = 1e-7,
    ) -> StabilisationReport:
        """
        Q(t) = E_λ(t⁽¹⁾, t)·E(t, t⁽¹⁾) over t⁽¹⁾ ≤ t ≤ t⁽²⁾.

        det Q = 1 (both determinants are λ(t)/λ(t⁽¹⁾)); log sup ‖Q‖ is set
        against |ξ|∫λ|ω² − 1| over the zone.
        """
        N = float(N if N is not None else coef.scales.N)
        zones = ZoneService(coef, N)
        xis = np.asarray(xi_grid if xi_grid is not None else self._configured_frequencies(), dtype=float)
        base = coef.lambda_only()

        jobs = []
        for xi in xis:
            b = zones.boundaries(xi)
            if b.has_gap:
                jobs.append((float(xi), b.t1_or_zero, b.t2_or_zero))

        def run(job: Tuple[float, float, float]) -> List[Dict[str, float]]:
            xi, t1, t2 = job
            times = geometric_time_grid(t2, self.settings.points_per_decade * 2, t_min=t1)
            full = self.integrate_many(coef, [xi], t1, times)
            free = self.integrate_many(base, [xi], t1, times)
            Q = inverse2(free.entries[:, 0]) @ full.entries[:, 0]
            L = full.log_scale[:, 0] - free.log_scale[:, 0]
            sigma_max, sigma_min = singular_values(Q)
            det_q = det2(Q) * np.exp(2.0 * L)
            forcing = xi * self._omega_defect(coef, t1, t2)
            return [
                {'xi': xi, 't1': t1, 't2': t2, 't': float(t),
                 'norm_q': float(smax * math.exp(li)), 'norm_q_inverse': float(math.exp(-li) / smin),
                 'det_q': float(abs(dq)), 'det_error': float(abs(dq - 1.0)), 'forcing': forcing}
                for t, smax, smin, li, dq in zip(times, sigma_max, sigma_min, L, det_q)
            ]

        rows = [row for chunk in self._map(run, jobs) for row in chunk]
        if not rows:
            return StabilisationReport(name='int_zone', status=Verdict.PASS, sup_q=1.0, sup_q_inverse=1.0,
                                       det_error=0.0, notes=["intermediate zone empty on the grid"])

        sup_q = max(r['norm_q'] for r in rows)
        sup_q_inverse = max(r['norm_q_inverse'] for r in rows)
        det_error = max(r['det_error'] for r in rows)
        limit = max(det_limit, 1000.0 * self.settings.tol)
        finite = all(np.isfinite(v) for v in (sup_q, sup_q_inverse, det_error))
        notes = []
        if not finite:
            status = Verdict.FAIL
            notes.append("non-finite stabilisation factor")
        elif det_error > limit:
            status = Verdict.FAIL
            notes.append(f"det Q deviates from 1 by {det_error:.2e}")
        else:
            status = Verdict.PASS
        worst_forcing = max(r['forcing'] for r in rows)
        return StabilisationReport(
            name='int_zone',
            status=status,
            metrics={'frequencies': len(jobs), 'log_sup_q': math.log(sup_q) if sup_q > 0 else float('nan'),
                     'max_forcing': worst_forcing},
            rows=rows,
            notes=notes,
            sup_q=sup_q,
            sup_q_inverse=sup_q_inverse,
            det_error=det_error,
        )

    @staticmethod
    def _omega_defect(coef: Coefficient, t1: float, t2: float) -> float:
        """∫_{t1}^{t2} λ|ω² − 1| dt."""
        if not coef.has_perturbation:
            return 0.0
        inside = [p for p in coef.breakpoints() if t1 < p < t2]
        value, _ = sp_integrate.quad(
            lambda u: coef.shape.value(u) * abs(coef.perturbation.value(u) ** 2 - 1.0),
            t1, t2, points=inside or None, limit=400,
        )
        return float(value)
