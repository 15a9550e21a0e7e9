# gecl/services/diagonalizer_service.py
"""
Diagonalization hierarchy in the hyperbolic zone.

The zero step conjugates A(t,ξ) with M(t) = (1/ω)[[1, −1], [ω, ω]], giving

    τ₁± = ±a|ξ| − i·a'/(2a),    R₁ = i·antidiag(β̄₁, β₁),    β₁ = a'/(2a).

Each further step solves [D_k, N^(k)] + R_k = 0 and forms
D_{k+1} + R_{k+1} = D_k − (I + N^(k))⁻¹(D_tN^(k) − R_kN^(k)). The whole
recursion runs on Taylor jets, so every level carries the exact time
derivatives it needs, one order fewer per step. The imaginary parts obey

    Im τ_k± = −a'/(2a) + Σ_{j<k} ∂_t d_j / (2(d_j − 1)),

and ∫ ∂_t d_j/(2(d_j − 1)) telescopes to ½·log((1 − d_j(t))/(1 − d_j(s))).
"""
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as sp_integrate

from ..config import AppConfig
from ..domain.coefficient import Coefficient
from ..domain.diagonalizer import DiagonalizerState, SymbolClassTag
from ..domain.reports import CheckReport, Verdict, combine, sup_verdict
from ..domain.scales import ScaleSet
from ..domain.shape import ShapeFunction
from ..logging_config import get_logger
from ..utils.grids import log_frequency_grid, refine_with_packets
from ..utils.jets import Jet
from ..utils.linalg import inverse2, singular_values, spectral_norm
from .propagator_service import PropagatorService
from .zone_service import ZoneService, boundary

logger = get_logger('diagonalizer_service')

SamplePoints = List[Tuple[float, np.ndarray]]


class ZoneConstantTooSmallError(Exception):
    """Raised when |d_k| ≥ 1 somewhere, so I + N^(k) is not invertible; raise N."""
    pass


class DerivativeBudgetError(Exception):
    """Raised when the jets of a level carry no derivative for the next step."""
    pass


def transform_m(omega) -> np.ndarray:
    """M(t) = (1/ω)[[1, −1], [ω, ω]] stacked over the points."""
    omega = np.asarray(omega, dtype=float)
    M = np.empty(omega.shape + (2, 2), dtype=complex)
    M[..., 0, 0] = 1.0 / omega
    M[..., 0, 1] = -1.0 / omega
    M[..., 1, 0] = 1.0
    M[..., 1, 1] = 1.0
    return M


class DiagonalizerService:
    """
    Build and check the hierarchy for one configuration.

    Usage:
        diag = DiagonalizerService(config)
        states = diag.hierarchy(coef, t, xi, k_max=3)
        report = diag.check_imaginary_parts(coef)
    """

    def __init__(self, config: AppConfig):
        self.config = config
        self.settings = config.diagonalizer

    # -- steps ---------------------------------------------------------------

    def step0(self, coef: Coefficient, t, xi, order: Optional[int] = None) -> DiagonalizerState:
        """
        Level 1 after conjugation with M(t).

        Args:
            coef: Speed coefficient (a > 0 at the points)
            t: Sample times
            xi: Frequencies, broadcast against t
            order: Jet order of a; defaults to the coefficient's oracle order

        Returns:
            DiagonalizerState with jets of order ``order − 1``
        """
        order = coef.m_max if order is None else int(order)
        if order < 1:
            raise DerivativeBudgetError("the zero step needs at least one derivative of a")
        t, xi = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(xi, dtype=float))
        a = coef.jet(t, order)
        beta = a.log().derivative() * 0.5
        a_xi = a.truncate(order - 1) * xi
        damping = beta * (-1j)
        return DiagonalizerState(
            level=1,
            t=t,
            xi=xi,
            tau_plus=a_xi + damping,
            tau_minus=-a_xi + damping,
            beta=beta * (1.0 + 0.0j),
            cumulative=np.broadcast_to(np.eye(2, dtype=complex), t.shape + (2, 2)).copy(),
            im_tau_terms=np.zeros(t.shape),
            h_residual=np.zeros(t.shape),
        )

    def step_k(self, state: DiagonalizerState) -> DiagonalizerState:
        """
        One diagonalization step: level k → level k + 1.

        Raises:
            DerivativeBudgetError: If the level-k jets have order 0
            ZoneConstantTooSmallError: If |d_k| ≥ 1 at some point
        """
        k = state.level
        if state.budget < 1:
            raise DerivativeBudgetError(
                f"level {k} carries no derivative; level {k + 1} needs a higher oracle order"
            )
        delta = state.delta
        d = state.d_jet()
        d_abs = np.abs(d.value)
        worst = float(np.max(d_abs)) if d_abs.size else 0.0
        if worst >= 1.0:
            i = np.unravel_index(int(np.argmax(d_abs)), d_abs.shape)
            raise ZoneConstantTooSmallError(
                f"|d_{k}| = {worst:.3g} at t={float(state.t[i]):.6g}, xi={float(state.xi[i]):.6g}; raise N"
            )
        if worst > self.settings.warn_threshold:
            logger.warning(f"⚠️ |d_{k}| reaches {worst:.3f} (> {self.settings.warn_threshold:g})")

        beta = state.beta
        n12 = (beta.conj() / delta) * (-1j)
        n21 = (beta / delta) * 1j
        b11 = beta * beta.conj() / delta
        b12 = n12.derivative() * (-1j)
        b21 = n21.derivative() * (-1j)
        one_minus_d = 1.0 - d
        c11 = (b11 - n12 * b21) / one_minus_d
        c22 = (-b11 - n21 * b12) / one_minus_d
        c12 = (b12 + n12 * b11) / one_minus_d
        c21 = (b21 - n21 * b11) / one_minus_d

        step = np.eye(2, dtype=complex) + state.n_matrix()
        d_prime = d.derivative().value
        return DiagonalizerState(
            level=k + 1,
            t=state.t,
            xi=state.xi,
            tau_plus=state.tau_plus - c11,
            tau_minus=state.tau_minus - c22,
            beta=c21 * 1j,
            cumulative=state.cumulative @ step,
            im_tau_terms=state.im_tau_terms + d_prime / (2.0 * (d.value - 1.0)),
            h_residual=np.abs(c12.value + np.conj(c21.value)),
        )

    def hierarchy(self, coef: Coefficient, t, xi, k_max: int,
                  order: Optional[int] = None) -> List[DiagonalizerState]:
        """States for levels 1..k_max."""
        if k_max < 1:
            raise ValueError("k_max must be >= 1")
        if k_max > coef.scales.m:
            logger.debug(f"levels above m={coef.scales.m} leave the controlled symbol classes")
        states = [self.step0(coef, t, xi, order)]
        while len(states) < k_max:
            states.append(self.step_k(states[-1]))
        return states

    # -- sampling ------------------------------------------------------------

    def sample_points(self, coef: Coefficient, N: Optional[float] = None,
                      t_max: Optional[float] = None) -> SamplePoints:
        """
        Per frequency, a packet-refined geometric ladder in Z_hyp(N) up to the horizon.
        """
        zones = ZoneService(coef, N)
        T = coef.shape.safe_horizon(float(t_max if t_max is not None else self.config.grid.t_max))
        xis = log_frequency_grid(self.config.propagator.xi_min, self.config.propagator.xi_max,
                                 self.settings.xi_count)
        floor = coef.shape.regular_from * (1.0 + 1e-9)
        points: SamplePoints = []
        for xi in xis:
            s = max(zones.boundaries(xi).t2_or_zero, floor)
            if s >= T:
                continue
            ladder = np.geomspace(1.0 + s, 1.0 + T, self.settings.sample_count) - 1.0
            ladder[0], ladder[-1] = s, T
            ladder = refine_with_packets(ladder, coef.perturbation.packets, self.config.grid.packet_points)
            points.append((float(xi), ladder))
        return points

    def level_rows(self, states: Sequence[DiagonalizerState]) -> List[Dict[str, float]]:
        """Flat per-level rows (t, xi, Re/Im τ±, |β|, d) for CSV export."""
        rows = []
        for state in states:
            cols = state.to_rows()
            for i in range(np.size(cols['t'])):
                rows.append({key: float(np.ravel(val)[i]) for key, val in cols.items()})
        return rows

    # -- checks ----------------------------------------------------------------

    def check_imaginary_parts(self, coef: Coefficient, k_max: Optional[int] = None,
                              points: Optional[SamplePoints] = None, tol: float = 1e-8) -> CheckReport:
        """
        Im τ_k± against the closed-form sum, equality of both imaginary
        parts, reality of δ_k, the telescoping identity and the two-sided
        bound exp(−∫Im τ_k)/√(λ(t)/λ(s)) ∈ [1/C, C].
        """
        k_max = int(k_max or self.settings.k_max)
        points = points if points is not None else self.sample_points(coef)
        constant = self.config.propagator.two_sided_constant
        metrics: Dict[str, float] = {'k_max': k_max}
        rows: List[Dict[str, float]] = []
        worst = {'closed_form': 0.0, 'equal_parts': 0.0, 'delta_real': 0.0, 'first_level': 0.0}
        ratio_lo, ratio_hi = math.inf, 0.0

        for xi, t in points:
            states = self.hierarchy(coef, t, xi, k_max)
            damping = states[0].beta.value.real
            scale = np.maximum(np.abs(damping), 1e-300)

            # first level against the separate logarithmic derivatives of λ and ω
            lam_part = coef.shape.log_jet(t, 1).derivative_value(1)
            om = coef.perturbation.jet(t, 1)
            om_part = om.derivative_value(1) / om.value
            separate = -0.5 * (lam_part + om_part)
            first = np.abs(states[0].tau_plus.value.imag - separate) / np.maximum(np.abs(separate), 1e-300)
            worst['first_level'] = max(worst['first_level'], float(np.max(np.where(scale > 1e-300, first, 0.0))))

            ratio = np.sqrt(coef.perturbation.eval(t) / coef.perturbation.eval(t[0]))
            for state in states:
                closed = -damping + state.im_tau_terms
                im_p = state.tau_plus.value.imag
                im_m = state.tau_minus.value.imag
                delta = state.delta.value
                worst['closed_form'] = max(worst['closed_form'], float(np.max(np.abs(im_p - closed) / scale)))
                worst['equal_parts'] = max(worst['equal_parts'], float(np.max(np.abs(im_p - im_m) / scale)))
                worst['delta_real'] = max(worst['delta_real'],
                                          float(np.max(np.abs(delta.imag) / np.abs(delta.real))))
            for state in states[:-1]:
                d = state.d
                ratio = ratio * np.sqrt((1.0 - d[0]) / (1.0 - d))
            ratio_lo = min(ratio_lo, float(np.min(ratio)))
            ratio_hi = max(ratio_hi, float(np.max(ratio)))
            for ti, r in zip(t, ratio):
                rows.append({'xi': xi, 't': float(ti), 'two_sided_ratio': float(r)})

        telescoping = self._telescoping_error(coef, points, k_max) if k_max > 1 and points else 0.0
        metrics.update(worst)
        metrics.update({'telescoping': telescoping, 'min_ratio': ratio_lo, 'max_ratio': ratio_hi})

        notes = []
        if worst['closed_form'] > tol:
            notes.append(f"Im τ deviates from the closed-form sum by {worst['closed_form']:.2e}")
        if worst['equal_parts'] > tol:
            notes.append("Im τ⁺ and Im τ⁻ differ")
        if worst['delta_real'] > 1e-9:
            notes.append("δ_k has an imaginary part")
        if worst['first_level'] > 1e-10:
            notes.append("first level disagrees with −λ'/2λ − ω'/2ω")
        if telescoping > 1e-7:
            notes.append(f"telescoping identity off by {telescoping:.2e}")
        if points and (ratio_lo < 1.0 / constant or ratio_hi > constant):
            notes.append(f"exp(−∫Im τ)/√(λ(t)/λ(s)) leaves [1/{constant:g}, {constant:g}]")
        status = Verdict.FAIL if notes else Verdict.PASS
        if not points:
            status = Verdict.MARGINAL
            notes.append("no sample point lies in the hyperbolic zone")
        return CheckReport(name='imaginary_parts', status=status, metrics=metrics, rows=rows, notes=notes)

    def _d_term(self, coef: Coefficient, u: float, xi: float, level: int) -> float:
        """∂_t d_j/(2(d_j − 1)) at one point, j = level."""
        state = self.hierarchy(coef, np.array([u]), xi, level)[-1]
        d = state.d_jet()
        return float(d.derivative().value[0] / (2.0 * (d.value[0] - 1.0)))

    def _telescoping_error(self, coef: Coefficient, points: SamplePoints, k_max: int) -> float:
        """|∫_s^t ∂d_j/(2(d_j − 1)) − ½ log((1 − d_j(t))/(1 − d_j(s)))| on the first ladder."""
        xi, t = points[0]
        s, end = float(t[0]), float(t[min(len(t) - 1, len(t) // 2)])
        inside = [p for p in coef.breakpoints() if s < p < end]
        worst = 0.0
        for level in range(1, k_max):
            if self.hierarchy(coef, np.array([s]), xi, level)[-1].budget < 1:
                break
            value, _ = sp_integrate.quad(lambda u: self._d_term(coef, u, xi, level), s, end,
                                         points=inside or None, limit=400, epsabs=1e-14, epsrel=1e-11)
            d_s = self.hierarchy(coef, np.array([s]), xi, level)[-1].d[0]
            d_t = self.hierarchy(coef, np.array([end]), xi, level)[-1].d[0]
            expected = 0.5 * math.log((1.0 - d_t) / (1.0 - d_s))
            worst = max(worst, abs(value - expected) / max(abs(expected), 1e-12))
        return worst

    def check_symbol_decay(self, coef: Coefficient, k_max: Optional[int] = None,
                           points: Optional[SamplePoints] = None) -> CheckReport:
        """
        sup |β_k|·(|ξ|λ)^{k−1}·Ξ^k per level, the eigenvalue separation
        |δ_k|/(2a|ξ|) and the integrability statistic ∫|β_m| against (Θ(t⁽²⁾)|ξ|)^{1−m}.
        """
        k_max = int(k_max or self.settings.k_max)
        m = coef.scales.m
        levels = max(k_max, m)
        points = points if points is not None else self.sample_points(coef)
        packets = coef.perturbation.packets
        N = coef.scales.N

        rows: List[Dict[str, float]] = []
        sups = {k: 0.0 for k in range(1, levels + 1)}
        separation = {k: math.inf for k in range(1, levels + 1)}
        integrability = 0.0
        verdicts = []
        for xi, t in points:
            states = self.hierarchy(coef, t, xi, levels)
            log_lam = coef.shape.log_value(t)
            log_Xi = np.log(coef.scales.xi(t))
            a = coef.eval(t)
            for state in states:
                k = state.level
                tag = SymbolClassTag.remainder_class(k, m)
                abs_beta = np.abs(state.beta.value)
                with np.errstate(divide='ignore'):
                    log_w = np.log(abs_beta) - tag.m1 * math.log(xi) - tag.m2 * log_lam + tag.m3 * log_Xi
                weighted = np.exp(log_w)
                sep = np.abs(state.delta.value) / (2.0 * a * xi)
                separation[k] = min(separation[k], float(np.min(sep)))
                if k <= k_max:
                    sups[k] = max(sups[k], float(np.max(weighted)))
                    packet_sups = [float(np.max(weighted[(t >= lo) & (t <= hi)]))
                                   for lo, hi in packets if np.any((t >= lo) & (t <= hi))]
                    verdict, _ = sup_verdict(t, weighted, packet_sups or None)
                    verdicts.append(verdict)
                    for ti, w, sv in zip(t, weighted, sep):
                        rows.append({'k': k, 'xi': xi, 't': float(ti), 'weighted_beta': float(w),
                                     'separation': float(sv), 'class': tag.describe()})
                if k == m:
                    total = float(sp_integrate.trapezoid(abs_beta, t))
                    reference = (math.exp(float(coef.scales.log_theta(t[0]))) * xi) ** (1 - m)
                    integrability = max(integrability, total / reference)

        status = combine(verdicts) if verdicts else Verdict.MARGINAL
        if status == Verdict.MARGINAL:
            logger.warning("⚠️ symbol decay: marginal verdict")
        metrics: Dict[str, float] = {f'sup_k{k}': v for k, v in sups.items() if k <= k_max}
        metrics.update({f'separation_k{k}': v for k, v in separation.items()})
        metrics.update({
            f'separation_constant_k{k}': (1.0 - v) * N / k for k, v in separation.items() if np.isfinite(v)
        })
        per_level = [v for key, v in metrics.items() if key.startswith('separation_constant_k')]
        if per_level:
            metrics['separation_constant_max'] = max(per_level)
        metrics['integrability'] = integrability
        metrics['m'] = m
        return CheckReport(name='symbol_decay', status=status, metrics=metrics, rows=rows)

    # -- identities ------------------------------------------------------------

    def operator_identity_residual(self, coef: Coefficient, t, xi, level: int = 1,
                                   frequency: float = 1.3) -> float:
        """
        Relative size of (D_t − D_k − R_k)(I + N)f − (I + N)(D_t − D_{k+1} − R_{k+1})f
        for the test vector f = (e^{ict}, 1 + t²).

        Time derivatives come from the jets, or from central differences of
        step ``fd_step·Ξ(t)`` when ``use_finite_differences`` is set.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        states = self.hierarchy(coef, t, xi, level + 1)
        cur, nxt = states[level - 1], states[level]
        n = cur.budget
        tj = Jet.variable(t, n)
        f1 = (tj * (1j * frequency)).exp()
        f2 = tj * tj + 1.0

        n12 = (cur.beta.conj() / cur.delta) * (-1j)
        n21 = (cur.beta / cur.delta) * 1j
        g1 = f1 + n12 * f2
        g2 = n21 * f1 + f2

        if self.settings.use_finite_differences:
            h = self.settings.fd_step * coef.scales.xi(t)
            dg1, dg2 = self._fd_dt_g(coef, t, xi, level, h, frequency)
        else:
            dg1 = g1.derivative().value * (-1j)
            dg2 = g2.derivative().value * (-1j)

        bp, bm = cur.beta.value, np.conj(cur.beta.value)
        left1 = dg1 - cur.tau_plus.value * g1.value - 1j * bm * g2.value
        left2 = dg2 - cur.tau_minus.value * g2.value - 1j * bp * g1.value

        df1 = f1.derivative().value * (-1j)
        df2 = f2.derivative().value * (-1j)
        np_, nm = nxt.beta.value, np.conj(nxt.beta.value)
        h1 = df1 - nxt.tau_plus.value * f1.value - 1j * nm * f2.value
        h2 = df2 - nxt.tau_minus.value * f2.value - 1j * np_ * f1.value
        right1 = h1 + n12.value * h2
        right2 = n21.value * h1 + h2

        residual = np.hypot(np.abs(left1 - right1), np.abs(left2 - right2))
        magnitude = (np.abs(dg1) + np.abs(dg2)
                     + np.abs(cur.tau_plus.value) * (np.abs(g1.value) + np.abs(g2.value)))
        return float(np.max(residual / magnitude))

    def check_operator_identity(self, coef: Coefficient, k_max: Optional[int] = None,
                                points: Optional[SamplePoints] = None, limit: float = 1e-6) -> CheckReport:
        """Largest operator-identity residual over the sample ladders and levels below k_max."""
        k_max = int(k_max or self.settings.k_max)
        points = points if points is not None else self.sample_points(coef)
        rows: List[Dict[str, float]] = []
        worst = 0.0
        for xi, t in points:
            for level in range(1, k_max):
                residual = self.operator_identity_residual(coef, t, xi, level)
                worst = max(worst, residual)
                rows.append({'xi': xi, 'level': float(level), 'residual': residual})

        metrics: Dict[str, float] = {'max_residual': worst, 'limit': limit, 'k_max': k_max}
        notes = []
        if not rows:
            notes.append("no level pair or no hyperbolic-zone sample")
            status = Verdict.MARGINAL
        elif worst > limit:
            notes.append(f"residual {worst:.2e} above {limit:g}")
            status = Verdict.FAIL
        else:
            status = Verdict.PASS
        return CheckReport(name='operator_identity', status=status, metrics=metrics, rows=rows, notes=notes)

    def _fd_dt_g(self, coef: Coefficient, t: np.ndarray, xi: float, level: int,
                 h: np.ndarray, frequency: float) -> Tuple[np.ndarray, np.ndarray]:
        def g_at(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            state = self.hierarchy(coef, u, xi, level)[-1]
            N = state.n_matrix()
            f1 = np.exp(1j * frequency * u)
            f2 = 1.0 + u * u
            return f1 + N[..., 0, 1] * f2, N[..., 1, 0] * f1 + f2

        plus1, plus2 = g_at(t + h)
        minus1, minus2 = g_at(t - h)
        return (-1j * (plus1 - minus1) / (2.0 * h), -1j * (plus2 - minus2) / (2.0 * h))

    # -- links to the propagator -----------------------------------------------

    def _ladder(self, coef: Coefficient, xi: float, s: float, count: int) -> np.ndarray:
        """Geometric ladder from s to the horizon, kept inside the phase budget."""
        T = coef.shape.safe_horizon(self.config.grid.t_max)
        budget_end = boundary(lambda u: float(coef.shape.log_primitive(u)), xi,
                              self.config.propagator.phase_budget)
        if budget_end is not None:
            T = min(T, budget_end)
        T = max(T, s * 1.5 + 1.0)
        ladder = np.geomspace(1.0 + s, 1.0 + T, count) - 1.0
        ladder[0] = s
        return ladder

    def _log_damping(self, coef: Coefficient, states_t: Sequence[DiagonalizerState],
                     states_s: Sequence[DiagonalizerState], k: int) -> np.ndarray:
        """−∫_s^t Im τ_k from the closed form."""
        out = 0.5 * np.log(coef.eval(states_t[0].t) / coef.eval(states_s[0].t))
        for j in range(k - 1):
            d_t = states_t[j].d
            d_s = states_s[j].d
            out = out - 0.5 * np.log((1.0 - d_t) / (1.0 - d_s))
        return out

    def propagator_consistency(self, coef: Coefficient, xi: float, k: Optional[int] = None,
                               t_samples: Optional[Sequence[float]] = None,
                               slack: float = 1e-6) -> CheckReport:
        """
        ‖E(t,s,ξ)‖ between the bounds of the factorisation
        E = M N_k Ẽ Q (M N_k)⁻¹(s): ‖Ẽ‖ = exp(−∫Im τ_k), ‖Q^{±1}‖ ≤ exp(∫|β_k|).
        """
        k = int(k or self.settings.k_max)
        zones = ZoneService(coef)
        s = max(zones.boundaries(xi).t2_or_zero, coef.shape.regular_from * (1.0 + 1e-9))
        ladder = (np.asarray(t_samples, dtype=float) if t_samples is not None
                  else self._ladder(coef, xi, s, self.settings.sample_count // 4 + 2))
        s = float(ladder[0])
        samples = PropagatorService(self.config).integrate_many(coef, [xi], s, ladder)
        log_norm = samples.log_norms()[:, 0]

        states_t = self.hierarchy(coef, ladder, xi, k)
        states_s = self.hierarchy(coef, np.array([s]), xi, k)
        MN_t = transform_m(coef.perturbation.eval(ladder)) @ states_t[-1].cumulative
        MN_s = transform_m(coef.perturbation.eval(np.array([s]))) @ states_s[-1].cumulative
        big_t, small_t = singular_values(MN_t)
        big_s, small_s = singular_values(MN_s)
        log_e = self._log_damping(coef, states_t, states_s, k)

        inside = coef.breakpoints()
        beta_integral = np.zeros_like(ladder)
        for i in range(1, len(ladder)):
            lo, hi = ladder[i - 1], ladder[i]
            pts = [p for p in inside if lo < p < hi]
            piece, _ = sp_integrate.quad(
                lambda u: float(np.abs(self.hierarchy(coef, np.array([u]), xi, k)[-1].beta.value[0])),
                lo, hi, points=pts or None, limit=200,
            )
            beta_integral[i] = beta_integral[i - 1] + piece

        upper = np.log(big_t) + log_e + beta_integral - np.log(small_s[0])
        lower = np.log(small_t) + log_e - beta_integral - np.log(big_s[0])
        inside_band = (log_norm <= upper + slack) & (log_norm >= lower - slack)
        rows = [
            {'xi': xi, 's': s, 't': float(t), 'log_norm': float(ln), 'lower': float(lo), 'upper': float(up),
             'log_damping': float(le), 'beta_integral': float(bi)}
            for t, ln, lo, up, le, bi in zip(ladder, log_norm, lower, upper, log_e, beta_integral)
        ]
        status = Verdict.PASS if bool(np.all(inside_band)) else Verdict.FAIL
        return CheckReport(
            name='propagator_consistency',
            status=status,
            metrics={'xi': xi, 'k': k, 'max_beta_integral': float(beta_integral[-1]),
                     'violations': int(np.sum(~inside_band))},
            rows=rows,
        )

    def q_convergence(self, shape: ShapeFunction, scales: ScaleSet, xi: float,
                      t_ladder: Optional[Sequence[float]] = None) -> CheckReport:
        """
        Q(t) = Ẽ(t,s)⁻¹ N_λ(t)⁻¹ M⁻¹ E_λ(t,s) M N_λ(s) for ω ≡ 1, where
        N_λ = I + N^(1) and Ẽ solves D_t − D_2. Reports
        ‖Q(t) − Q(T)‖·Λ(t)|ξ| along the ladder; boundedness means
        Q(t) − Q(∞) = O(1/(Λ(t)|ξ|)).
        """
        coef = Coefficient(shape=shape, scales=scales)
        zones = ZoneService(coef)
        s = max(zones.boundaries(xi).t1_or_zero, shape.regular_from * (1.0 + 1e-9))
        ladder = (np.asarray(t_ladder, dtype=float) if t_ladder is not None
                  else self._ladder(coef, xi, s, self.config.propagator.points_per_decade * 3))
        s = float(ladder[0])
        samples = PropagatorService(self.config).integrate_many(coef, [xi], s, ladder)

        states_t = self.hierarchy(coef, ladder, xi, 2)
        states_s = self.hierarchy(coef, np.array([s]), xi, 2)
        M = transform_m(np.ones(1))[0]
        N_t = np.eye(2) + states_t[0].n_matrix()
        N_s = np.eye(2) + states_s[0].n_matrix()[0]

        # ∫ (Re τ₂⁺ − λ|ξ|); the minus branch carries the opposite correction
        correction = np.zeros_like(ladder)
        for i in range(1, len(ladder)):
            piece, _ = sp_integrate.quad(
                lambda u: float(self.hierarchy(coef, np.array([u]), xi, 2)[1].tau_plus.value[0].real
                                - shape.value(u) * xi),
                ladder[i - 1], ladder[i], limit=200,
            )
            correction[i] = correction[i - 1] + piece
        phase = xi * (shape.primitive(ladder) - float(shape.primitive(s))) + correction
        growth = 0.5 * (shape.log_value(ladder) - float(shape.log_value(s))) \
            - 0.5 * np.log((1.0 - states_t[0].d) / (1.0 - states_s[0].d[0]))

        core = inverse2(N_t) @ (inverse2(M) @ samples.entries[:, 0] @ M @ N_s)
        weight = np.exp(samples.log_scale[:, 0] - growth)
        Q = np.empty_like(core)
        Q[:, 0, :] = core[:, 0, :] * (np.exp(-1j * phase) * weight)[:, None]
        Q[:, 1, :] = core[:, 1, :] * (np.exp(1j * phase) * weight)[:, None]

        scaled = spectral_norm(Q[:-1] - Q[-1][None]) * shape.primitive(ladder[:-1]) * xi
        verdict, info = sup_verdict(ladder[:-1], scaled)
        rows = [{'xi': xi, 't': float(t), 'scaled_gap': float(v), 'norm_q': float(nq)}
                for t, v, nq in zip(ladder[:-1], scaled, spectral_norm(Q[:-1]))]
        return CheckReport(
            name='q_convergence',
            status=verdict,
            metrics={'xi': xi, 's': s, 'T': float(ladder[-1]), 'sup_scaled_gap': info.get('sup'),
                     'norm_q_limit': float(spectral_norm(Q[-1]))},
            rows=rows,
        )
