//! Time evolution of the Camassa-Holm equation
//!
//! ```text
//! u_t + 2κ u_x + 3 u u_x - u_txx = 2 u_x u_xx + u u_xxx
//! ```
//!
//! and of its generalization with a spatial coefficient `F(x)`
//!
//! ```text
//! F'(x) u + u_t + [3u + 2F(x)] u_x - u_txx = 2 u_x u_xx + u u_xxx.
//! ```
//!
//! Both are advanced in momentum form: with `m = u - u_xx`,
//! `m_t = -(u m_x + 2 u_x m + 2F u_x + F' u)` and `u_t = (1 - ∂²)⁻¹ m_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, max_abs_diff, FieldState, Grid1D, Spectrum};

/// Default fraction of the resolved band kept by the dealiasing filter.
pub const TWO_THIRDS: f64 = 2.0 / 3.0;

/// Equation coefficient and solver knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct CHParams {
    grid: Grid1D,
    coeff: Vec<f64>,
    dcoeff: Vec<f64>,
    classic: bool,
    kappa: f64,
    /// Fraction of modes kept when filtering quadratic products; `None` disables
    /// the filter.
    pub dealias: Option<f64>,
    /// Advective stability constant `C` in `dt <= C dx / max|u|`.
    pub cfl: f64,
}

impl CHParams {
    /// Constant coefficient `κ` (the classical equation).
    pub fn classic(grid: Grid1D, kappa: f64) -> Self {
        Self {
            grid,
            coeff: vec![kappa; grid.n()],
            dcoeff: vec![0.0; grid.n()],
            classic: true,
            kappa,
            dealias: Some(TWO_THIRDS),
            cfl: 1.0,
        }
    }

    /// Sampled coefficient `F(x_j)`. When `derivative` is `None` it is derived
    /// spectrally; when supplied it must agree with the spectral derivative to
    /// `1e-8`.
    pub fn generalized(grid: Grid1D, coeff: Vec<f64>, derivative: Option<Vec<f64>>) -> Result<Self> {
        let field = FieldState::new(grid, coeff, 0.0)?;
        field.check_finite("CHParams::generalized")?;
        let spectral_derivative = spectral::deriv(&field, 1)?.into_values();
        let dcoeff = match derivative {
            None => spectral_derivative,
            Some(d) => {
                if d.len() != grid.n() {
                    return Err(Error::LengthMismatch {
                        context: "CHParams::generalized",
                        expected: grid.n(),
                        got: d.len(),
                    });
                }
                spectral::check_finite(&d, "CHParams::generalized")?;
                let gap = max_abs_diff(&d, &spectral_derivative);
                if gap > 1e-8 {
                    return Err(Error::Inconsistent {
                        context: "supplied F' against spectral derivative of F",
                        gap,
                        tolerance: 1e-8,
                    });
                }
                d
            }
        };
        Ok(Self {
            grid,
            coeff: field.into_values(),
            dcoeff,
            classic: false,
            kappa: f64::NAN,
            dealias: Some(TWO_THIRDS),
            cfl: 1.0,
        })
    }

    pub fn with_dealias(mut self, dealias: Option<f64>) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn is_classic(&self) -> bool {
        self.classic
    }

    /// `κ` for classic parameters.
    pub fn kappa(&self) -> Option<f64> {
        self.classic.then_some(self.kappa)
    }

    pub fn coefficient(&self) -> &[f64] {
        &self.coeff
    }

    pub fn coefficient_derivative(&self) -> &[f64] {
        &self.dcoeff
    }
}

/// Conserved-quantity and slope diagnostics at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    /// `∫ m dx`
    pub m0: f64,
    /// `½∫(u² + u_x²) dx`
    pub energy: f64,
    /// `½∫(u³ + u u_x² + 2κu²) dx`, classic runs only.
    pub h3: Option<f64>,
    pub min_slope: f64,
    pub max_abs_u: f64,
}

pub fn diagnostics(u: &FieldState, params: &CHParams) -> Result<DiagnosticRecord> {
    u.check_finite("diagnostics")?;
    let grid = u.grid();
    let s = Spectrum::from_field(u);
    let ux = s.derivative(1);
    let uxx = s.derivative(2);
    let v = u.values();
    let m: Vec<f64> = v.iter().zip(&uxx).map(|(a, b)| a - b).collect();
    let e: Vec<f64> = v.iter().zip(&ux).map(|(a, b)| 0.5 * (a * a + b * b)).collect();
    let h3 = params.kappa().map(|kappa| {
        let h: Vec<f64> = v
            .iter()
            .zip(&ux)
            .map(|(a, b)| 0.5 * (a * a * a + a * b * b + 2.0 * kappa * a * a))
            .collect();
        spectral::integrate_values(grid, &h)
    });
    Ok(DiagnosticRecord {
        t: u.time,
        m0: spectral::integrate_values(grid, &m),
        energy: spectral::integrate_values(grid, &e),
        h3,
        min_slope: ux.iter().copied().fold(f64::INFINITY, f64::min),
        max_abs_u: u.max_abs(),
    })
}

fn momentum_rhs(u: &FieldState, params: &CHParams, context: &'static str) -> Result<FieldState> {
    if u.grid() != params.grid() {
        return Err(Error::GridMismatch(context));
    }
    u.check_finite(context)?;
    let grid = *u.grid();
    let mut s = Spectrum::from_field(u);
    if let Some(fraction) = params.dealias {
        s.truncate(fraction);
    }
    let uu = s.derivative(0);
    let ux = s.derivative(1);
    let uxx = s.derivative(2);
    let uxxx = s.derivative(3);

    let mut mt = vec![0.0; grid.n()];
    for j in 0..grid.n() {
        let m = uu[j] - uxx[j];
        let mx = ux[j] - uxxx[j];
        let transport = uu[j] * mx + 2.0 * ux[j] * m;
        mt[j] = if params.classic {
            -(transport + 2.0 * params.kappa * ux[j])
        } else {
            -(transport + 2.0 * params.coeff[j] * ux[j] + params.dcoeff[j] * uu[j])
        };
    }

    let mut r = Spectrum::of(grid, &mt);
    if let Some(fraction) = params.dealias {
        r.truncate(fraction);
    }
    r.apply(|j| {
        let k = grid.wavenumber(j);
        (1.0 / (1.0 + k * k)).into()
    });
    let ut = r.to_values();
    if let Some(index) = ut.iter().position(|v| !v.is_finite()) {
        return Err(Error::BlowUp {
            time: u.time,
            reason: format!("non-finite u_t at node {index}"),
            last_good: Some(Box::new(u.clone())),
        });
    }
    u.with_values(ut)
}

/// `u_t` of the classical equation. Requires classic parameters.
pub fn ch_rhs(u: &FieldState, params: &CHParams) -> Result<FieldState> {
    if !params.classic {
        return Err(Error::InvalidArgument(
            "ch_rhs needs a constant coefficient; use gch_rhs".into(),
        ));
    }
    momentum_rhs(u, params, "ch_rhs")
}

/// `u_t` of the generalized equation with coefficient `F(x)`.
pub fn gch_rhs(u: &FieldState, params: &CHParams) -> Result<FieldState> {
    momentum_rhs(u, params, "gch_rhs")
}

fn rhs(u: &FieldState, params: &CHParams) -> Result<FieldState> {
    momentum_rhs(u, params, "rhs")
}

/// Raised when `dt` exceeds the advective bound `C dx / max|u|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityWarning {
    pub time: f64,
    pub dt: f64,
    pub bound: f64,
}

pub fn stability_bound(u: &FieldState, cfl: f64) -> f64 {
    let umax = u.max_abs();
    if umax == 0.0 {
        f64::INFINITY
    } else {
        cfl * u.grid().dx() / umax
    }
}

#[derive(Clone, Debug)]
pub struct StepOutput {
    pub state: FieldState,
    pub warning: Option<StabilityWarning>,
}

/// One classical fourth-order Runge-Kutta step.
pub fn step_rk4(u: &FieldState, dt: f64, params: &CHParams) -> Result<StepOutput> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let bound = stability_bound(u, params.cfl);
    let warning = (dt > bound).then_some(StabilityWarning {
        time: u.time,
        dt,
        bound,
    });

    let stage = |base: &FieldState, k: &FieldState, h: f64| -> Result<FieldState> {
        let mut s = base.zip_with(k, |a, b| a + h * b)?;
        s.time = base.time + h;
        Ok(s)
    };
    let blow_up = |e: Error| match e {
        Error::BlowUp { time, reason, .. } => Error::BlowUp {
            time,
            reason,
            last_good: Some(Box::new(u.clone())),
        },
        Error::NonFinite { index, .. } => Error::BlowUp {
            time: u.time,
            reason: format!("non-finite stage value at node {index}"),
            last_good: Some(Box::new(u.clone())),
        },
        other => other,
    };

    let k1 = rhs(u, params).map_err(blow_up)?;
    let k2 = rhs(&stage(u, &k1, 0.5 * dt)?, params).map_err(blow_up)?;
    let k3 = rhs(&stage(u, &k2, 0.5 * dt)?, params).map_err(blow_up)?;
    let k4 = rhs(&stage(u, &k3, dt)?, params).map_err(blow_up)?;

    let values: Vec<f64> = (0..u.values().len())
        .map(|j| {
            u.values()[j]
                + dt / 6.0
                    * (k1.values()[j] + 2.0 * k2.values()[j] + 2.0 * k3.values()[j] + k4.values()[j])
        })
        .collect();
    let mut state = u.with_values(values)?;
    state.time = u.time + dt;
    state.check_finite("step_rk4").map_err(blow_up)?;
    Ok(StepOutput { state, warning })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Stopped early because `min u_x` fell below the configured threshold.
    SlopeThreshold { time: f64, min_slope: f64 },
    BlowUp { time: f64, reason: String },
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub trajectory: Vec<FieldState>,
    pub diagnostics: Vec<DiagnosticRecord>,
    pub warnings: Vec<StabilityWarning>,
    pub termination: Termination,
}

impl Simulation {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn last(&self) -> &FieldState {
        self.trajectory.last().expect("trajectory holds the initial state")
    }
}

/// Evolve `u0` for `round(t_final / dt)` steps, recording state and diagnostics
/// every `record_every` steps and at the final step.
pub fn simulate(
    u0: &FieldState,
    params: &CHParams,
    dt: f64,
    t_final: f64,
    record_every: usize,
) -> Result<Simulation> {
    simulate_until(u0, params, dt, t_final, record_every, None)
}

/// As [`simulate`], optionally stopping at the first record whose minimum slope
/// is below `stop_below_slope`.
pub fn simulate_until(
    u0: &FieldState,
    params: &CHParams,
    dt: f64,
    t_final: f64,
    record_every: usize,
    stop_below_slope: Option<f64>,
) -> Result<Simulation> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if record_every == 0 {
        return Err(Error::InvalidArgument("record_every must be >= 1".into()));
    }
    if u0.grid() != params.grid() {
        return Err(Error::GridMismatch("simulate"));
    }
    u0.check_finite("simulate")?;

    let steps = (t_final / dt).round().max(1.0) as usize;
    let t0 = u0.time;
    let mut sim = Simulation {
        trajectory: vec![u0.clone()],
        diagnostics: vec![diagnostics(u0, params)?],
        warnings: Vec::new(),
        termination: Termination::Completed,
    };
    let mut u = u0.clone();
    for step in 1..=steps {
        match step_rk4(&u, dt, params) {
            Ok(out) => {
                if let Some(w) = out.warning {
                    sim.warnings.push(w);
                }
                u = out.state;
                // time from the step count, not accumulated sums
                u.time = t0 + step as f64 * dt;
            }
            Err(Error::BlowUp { time, reason, .. }) => {
                sim.termination = Termination::BlowUp { time, reason };
                if sim.trajectory.last().map(|s| s.time) != Some(u.time) {
                    sim.diagnostics.push(diagnostics(&u, params)?);
                    sim.trajectory.push(u);
                }
                return Ok(sim);
            }
            Err(e) => return Err(e),
        }
        if step % record_every == 0 || step == steps {
            let rec = diagnostics(&u, params)?;
            sim.diagnostics.push(rec);
            sim.trajectory.push(u.clone());
            if let Some(threshold) = stop_below_slope {
                if rec.min_slope < threshold {
                    sim.termination = Termination::SlopeThreshold {
                        time: rec.t,
                        min_slope: rec.min_slope,
                    };
                    return Ok(sim);
                }
            }
        }
    }
    Ok(sim)
}

/// First record time with `min_slope < threshold`.
pub fn detect_breaking(records: &[DiagnosticRecord], threshold: f64) -> Option<f64> {
    records.iter().find(|r| r.min_slope < threshold).map(|r| r.t)
}

/// Linear phase speed `2κ / (1 + k²)`.
pub fn dispersion_speed(kappa: f64, k: f64) -> f64 {
    2.0 * kappa / (1.0 + k * k)
}

/// Phase angle of Fourier mode `mode` (positive integer) of a field, i.e. the
/// `θ` in `u ≈ A cos(k x + θ)`.
pub fn mode_phase(u: &FieldState, mode: usize) -> f64 {
    let s = Spectrum::from_field(u);
    s.coeffs()[mode].arg()
}

/// Position of the largest sample within periodic distance `half_window` of
/// `near`, refined by a parabola through the neighbouring samples. The result
/// is wrapped into `[0, L)`.
pub fn locate_peak(u: &FieldState, near: f64, half_window: f64) -> Option<f64> {
    let grid = *u.grid();
    let (n, l, dx) = (grid.n(), grid.length(), grid.dx());
    let v = u.values();
    let mut best: Option<(usize, f64)> = None;
    for (j, &value) in v.iter().enumerate() {
        let mut d = grid.node(j) - near;
        d -= l * (d / l).round();
        if d.abs() <= half_window && best.is_none_or(|(_, b)| value > b) {
            best = Some((j, value));
        }
    }
    let (j, b) = best?;
    let a = v[(j + n - 1) % n];
    let c = v[(j + 1) % n];
    let curvature = a - 2.0 * b + c;
    let offset = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    Some(grid.wrap(grid.node(j) + offset * dx))
}

/// Largest relative deviation of a diagnostic from its first record.
pub fn max_relative_drift(
    records: &[DiagnosticRecord],
    select: impl Fn(&DiagnosticRecord) -> Option<f64>,
) -> Option<f64> {
    let first = select(records.first()?)?;
    let scale = first.abs().max(f64::MIN_POSITIVE);
    records
        .iter()
        .filter_map(&select)
        .map(|v| (v - first).abs() / scale)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{deriv, helmholtz_map};
    use std::f64::consts::PI;

    fn box_2pi(n: usize) -> Grid1D {
        Grid1D::new(2.0 * PI, n).unwrap()
    }

    fn smooth(grid: Grid1D) -> FieldState {
        FieldState::from_fn(grid, 0.0, |x| 0.4 * x.sin() + 0.2 * (2.0 * x + 0.3).cos() + 0.1)
    }

    #[test]
    fn constant_state_is_steady() {
        let g = box_2pi(32);
        let u = FieldState::constant(g, 0.8, 0.0);
        for kappa in [0.0, 0.5, -1.2] {
            let ut = ch_rhs(&u, &CHParams::classic(g, kappa)).unwrap();
            assert!(ut.max_abs() < 1e-14);
        }
    }

    #[test]
    fn ch_rhs_rejects_generalized_params() {
        let g = box_2pi(16);
        let p = CHParams::generalized(g, vec![0.3; 16], None).unwrap();
        assert!(ch_rhs(&FieldState::zeros(g, 0.0), &p).is_err());
    }

    #[test]
    fn linearized_mode_propagates_at_dispersion_speed() {
        let g = box_2pi(64);
        let a = 1e-6;
        let u = FieldState::from_fn(g, 0.0, |x| a * x.cos());
        let ut = ch_rhs(&u, &CHParams::classic(g, 0.5)).unwrap();
        let expected = g.sample(|x| 0.5 * a * x.sin());
        let err = max_abs_diff(ut.values(), &expected);
        assert!(err <= 1e-4 * 0.5 * a, "err {err:e}");
    }

    #[test]
    fn generalized_rhs_for_constant_state() {
        // m_t = -c F', so u_t = -c (1 - ∂²)⁻¹ cos x = -(c/2) cos x.
        let g = box_2pi(64);
        let c = 0.7;
        let p = CHParams::generalized(g, g.sample(f64::sin), Some(g.sample(f64::cos))).unwrap();
        let ut = gch_rhs(&FieldState::constant(g, c, 0.0), &p).unwrap();
        assert!(max_abs_diff(ut.values(), &g.sample(|x| -0.5 * c * x.cos())) < 1e-13);
        let zero = gch_rhs(&FieldState::zeros(g, 0.0), &p).unwrap();
        assert!(zero.max_abs() == 0.0);
    }

    #[test]
    fn generalized_params_check_supplied_derivative() {
        let g = box_2pi(32);
        let bad = CHParams::generalized(g, g.sample(f64::sin), Some(g.sample(|x| 1.01 * x.cos())));
        assert!(matches!(bad, Err(Error::Inconsistent { .. })));
    }

    #[test]
    fn momentum_form_matches_direct_equation() {
        let g = Grid1D::new(40.0, 256).unwrap();
        let k0 = 2.0 * PI / 40.0;
        let kappa = 0.4;
        let p = CHParams::classic(g, kappa);
        let u = FieldState::from_fn(g, 0.0, |x| {
            0.4 * (k0 * x).sin() + 0.3 * (3.0 * k0 * x + 0.3).cos() - 0.2 * (7.0 * k0 * x).sin()
        });
        let ut = ch_rhs(&u, &p).unwrap();

        let s = Spectrum::from_field(&u);
        let (ux, uxx, uxxx) = (s.derivative(1), s.derivative(2), s.derivative(3));
        let v = u.values();
        let m_t = helmholtz_map(&ut).unwrap();
        let utxx = deriv(&ut, 2).unwrap();
        let mut momentum_gap = 0.0_f64;
        let mut residual = 0.0_f64;
        for j in 0..g.n() {
            let m = v[j] - uxx[j];
            let mx = ux[j] - uxxx[j];
            let expected = -(v[j] * mx + 2.0 * ux[j] * m + 2.0 * kappa * ux[j]);
            momentum_gap = momentum_gap.max((m_t.values()[j] - expected).abs());
            let r = ut.values()[j] + 2.0 * kappa * ux[j] + 3.0 * v[j] * ux[j] - utxx.values()[j]
                - 2.0 * ux[j] * uxx[j]
                - v[j] * uxxx[j];
            residual = residual.max(r.abs());
        }
        assert!(momentum_gap <= 1e-11, "{momentum_gap:e}");
        assert!(residual <= 1e-9, "{residual:e}");
    }

    #[test]
    fn zero_state_steps_to_zero() {
        let g = box_2pi(32);
        let out = step_rk4(&FieldState::zeros(g, 1.0), 0.01, &CHParams::classic(g, 0.5)).unwrap();
        assert_eq!(out.state.max_abs(), 0.0);
        assert!((out.state.time - 1.01).abs() < 1e-15);
        assert!(out.warning.is_none());
    }

    #[test]
    fn step_flags_stability_violation() {
        let g = box_2pi(32);
        let u = FieldState::constant(g, 2.0, 0.0);
        let out = step_rk4(&u, 1.0, &CHParams::classic(g, 0.0)).unwrap();
        let w = out.warning.expect("dt above bound");
        assert!((w.bound - g.dx() / 2.0).abs() < 1e-15);
        assert!(step_rk4(&u, 0.0, &CHParams::classic(g, 0.0)).is_err());
    }

    #[test]
    fn one_step_error_is_fifth_order() {
        let g = box_2pi(64);
        let p = CHParams::classic(g, 0.3);
        let u = smooth(g);
        let dt = 0.08;
        let reference = {
            let mut s = u.clone();
            for _ in 0..8 {
                s = step_rk4(&s, dt / 8.0, &p).unwrap().state;
            }
            s
        };
        let err = |h: f64| {
            let mut s = u.clone();
            let steps = (dt / h).round() as usize;
            for _ in 0..steps {
                s = step_rk4(&s, h, &p).unwrap().state;
            }
            max_abs_diff(s.values(), reference.values())
        };
        // error of a single step of size dt vs two steps of dt/2 against the dt/8 reference
        let e1 = err(dt);
        let e2 = err(dt / 2.0);
        let ratio = e1 / e2;
        // global error over a fixed interval is order 4 (16x); one step of dt
        // against two of dt/2 combines order-5 local error, ratio between 16 and 32
        assert!(ratio > 14.0 && ratio < 40.0, "ratio {ratio}");
    }

    #[test]
    fn linear_wave_returns_after_one_period() {
        let g = box_2pi(64);
        let a = 1e-6;
        let kappa = 0.5;
        let u0 = FieldState::from_fn(g, 0.0, |x| a * x.cos());
        let period = 2.0 * PI * 2.0 / (2.0 * kappa);
        let dt = period / 4000.0;
        let sim = simulate(&u0, &CHParams::classic(g, kappa), dt, period, 4000).unwrap();
        let err = max_abs_diff(sim.last().values(), u0.values());
        assert!(err <= 1e-3 * a, "err {err:e}");
    }

    #[test]
    fn simulate_records_and_is_deterministic() {
        let g = box_2pi(32);
        let p = CHParams::classic(g, 0.2);
        let u0 = smooth(g);
        let a = simulate(&u0, &p, 0.01, 0.25, 10).unwrap();
        let b = simulate(&u0, &p, 0.01, 0.25, 10).unwrap();
        assert_eq!(a.diagnostics, b.diagnostics);
        assert_eq!(a.trajectory, b.trajectory);
        // steps 0, 10, 20, 25
        let times: Vec<f64> = a.diagnostics.iter().map(|r| r.t).collect();
        assert_eq!(times.len(), 4);
        assert!((times[3] - 0.25).abs() < 1e-14);
        let c = FieldState::constant(g, 0.3, 0.0);
        let sc = simulate(&c, &p, 0.01, 0.1, 1).unwrap();
        assert!(sc.trajectory.iter().all(|s| max_abs_diff(s.values(), c.values()) < 1e-14));
    }

    #[test]
    fn blow_up_is_reported_with_last_state() {
        let g = box_2pi(16);
        let p = CHParams::classic(g, 0.0);
        let u0 = FieldState::from_fn(g, 0.0, |x| 1e150 * x.sin());
        let sim = simulate(&u0, &p, 0.1, 1.0, 1).unwrap();
        assert!(matches!(sim.termination, Termination::BlowUp { .. }));
        assert!(sim.last().values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn breaking_detection_on_records() {
        let rec = |t: f64, s: f64| DiagnosticRecord {
            t,
            m0: 0.0,
            energy: 1.0,
            h3: None,
            min_slope: s,
            max_abs_u: 1.0,
        };
        let recs = vec![rec(0.0, -1.0), rec(1.0, -5.0), rec(2.0, -20.0), rec(3.0, -50.0)];
        assert_eq!(detect_breaking(&recs, -10.0), Some(2.0));
        assert_eq!(detect_breaking(&recs, f64::NEG_INFINITY), None);
        assert_eq!(detect_breaking(&[], -10.0), None);
    }

    #[test]
    fn dispersion_relation() {
        assert_eq!(dispersion_speed(0.0, 3.0), 0.0);
        assert!((dispersion_speed(0.5, 1.0) - 0.5).abs() < 1e-15);
        let speeds: Vec<f64> = (0..20).map(|k| dispersion_speed(0.5, k as f64)).collect();
        assert!(speeds.windows(2).all(|w| w[1] < w[0]));
    }
}
