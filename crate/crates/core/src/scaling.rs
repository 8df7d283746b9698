//! Shallow-water scaling: nondimensionalization, amplitude scaling, removal
//! of the shallowness parameter, the `κ` formulas, and the linearized
//! background flows with a residual verifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spectral::{deriv, FieldState, Grid1D, TrigInterpolant};

/// Dimensional inputs in SI units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Gravity, m/s².
    pub g: f64,
    /// Mean depth, m.
    pub h0: f64,
    /// Wave amplitude, m.
    pub a: f64,
    /// Wavelength, m.
    pub lambda: f64,
    /// Constant vorticity, 1/s.
    #[serde(default)]
    pub omega0: f64,
    /// Dimensionless background current.
    #[serde(default)]
    pub c0: f64,
    /// Density, kg/m³.
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Atmospheric pressure, Pa.
    #[serde(default = "default_p0")]
    pub p0: f64,
}

fn default_rho() -> f64 {
    1000.0
}

fn default_p0() -> f64 {
    101_325.0
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g", self.g),
            ("h0", self.h0),
            ("a", self.a),
            ("lambda", self.lambda),
            ("rho", self.rho),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("omega0", self.omega0), ("c0", self.c0), ("p0", self.p0)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Horizontal velocity scale `√(g h₀)`.
    pub fn wave_speed(&self) -> f64 {
        (self.g * self.h0).sqrt()
    }

    /// Nondimensional shear strength `ω₀√(g h₀)/g`.
    pub fn shear_strength(&self) -> f64 {
        self.omega0 * self.wave_speed() / self.g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    /// Amplitude parameter `a/h₀`.
    pub eps: f64,
    /// Shallowness parameter `h₀/λ`.
    pub delta: f64,
}

pub fn scale_params(p: &PhysicalParams) -> Result<ScaleParams> {
    p.validate()?;
    Ok(ScaleParams {
        eps: p.a / p.h0,
        delta: p.h0 / p.lambda,
    })
}

/// Which set of variables a [`Sample`] is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Dimensional,
    Nondimensional,
    /// Nondimensional with `u, v, p` divided by `ε`.
    AmplitudeScaled,
    /// Amplitude-scaled with `x, t, v` rescaled so `δ²` becomes `ε`.
    ShallownessRemoved,
}

/// Point values of the water-wave variables. In the dimensional phase
/// `pressure` is the full pressure; afterwards it is the dynamic part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub phase: Phase,
    pub x: f64,
    pub z: f64,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub eta: f64,
    pub pressure: f64,
}

/// First derivatives of `u`, `v` and `p` at a sample point, in the same
/// variables as the sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub sample: Sample,
    /// `(u_t, u_x, u_z)`
    pub du: [f64; 3],
    /// `(v_t, v_x, v_z)`
    pub dv: [f64; 3],
    /// `(p_x, p_z)`
    pub dp: [f64; 2],
}

fn expect_phase(s: &Sample, phase: Phase) -> Result<()> {
    if s.phase != phase {
        return Err(Error::InvalidArgument(format!(
            "sample is in the {:?} phase, expected {:?}",
            s.phase, phase
        )));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Dimensional to nondimensional variables.
pub fn nondim_map(p: &PhysicalParams, s: &Sample) -> Result<Sample> {
    p.validate()?;
    expect_phase(s, Phase::Dimensional)?;
    let c = p.wave_speed();
    let z = s.z / p.h0;
    let rgh = p.rho * p.g * p.h0;
    Ok(Sample {
        phase: Phase::Nondimensional,
        x: s.x / p.lambda,
        z,
        t: s.t * c / p.lambda,
        u: s.u / c,
        v: s.v * p.lambda / (p.h0 * c),
        eta: s.eta / p.a,
        pressure: (s.pressure - p.p0 - rgh * (1.0 - z)) / rgh,
    })
}

/// Inverse of [`nondim_map`].
pub fn redim(p: &PhysicalParams, s: &Sample) -> Result<Sample> {
    p.validate()?;
    expect_phase(s, Phase::Nondimensional)?;
    let c = p.wave_speed();
    let rgh = p.rho * p.g * p.h0;
    Ok(Sample {
        phase: Phase::Dimensional,
        x: s.x * p.lambda,
        z: s.z * p.h0,
        t: s.t * p.lambda / c,
        u: s.u * c,
        v: s.v * p.h0 * c / p.lambda,
        eta: s.eta * p.a,
        pressure: p.p0 + rgh * (1.0 - s.z) + rgh * s.pressure,
    })
}

/// Divide `u, v, p` by `ε`.
pub fn eps_scale(s: &Sample, eps: f64) -> Result<Sample> {
    positive("eps", eps)?;
    expect_phase(s, Phase::Nondimensional)?;
    Ok(Sample {
        phase: Phase::AmplitudeScaled,
        u: s.u / eps,
        v: s.v / eps,
        pressure: s.pressure / eps,
        ..*s
    })
}

/// Inverse of [`eps_scale`].
pub fn eps_unscale(s: &Sample, eps: f64) -> Result<Sample> {
    positive("eps", eps)?;
    expect_phase(s, Phase::AmplitudeScaled)?;
    Ok(Sample {
        phase: Phase::Nondimensional,
        u: s.u * eps,
        v: s.v * eps,
        pressure: s.pressure * eps,
        ..*s
    })
}

/// Stretch factor `√ε/δ` applied to `x` and `t`.
pub fn stretch(eps: f64, delta: f64) -> f64 {
    eps.sqrt() / delta
}

/// `x, t ↦ (√ε/δ) x, t` and `v ↦ (δ/√ε) v`.
pub fn delta_removal(s: &Sample, eps: f64, delta: f64) -> Result<Sample> {
    positive("eps", eps)?;
    positive("delta", delta)?;
    expect_phase(s, Phase::AmplitudeScaled)?;
    let k = stretch(eps, delta);
    Ok(Sample {
        phase: Phase::ShallownessRemoved,
        x: s.x * k,
        t: s.t * k,
        v: s.v / k,
        ..*s
    })
}

/// Inverse of [`delta_removal`].
pub fn delta_restore(s: &Sample, eps: f64, delta: f64) -> Result<Sample> {
    positive("eps", eps)?;
    positive("delta", delta)?;
    expect_phase(s, Phase::ShallownessRemoved)?;
    let k = stretch(eps, delta);
    Ok(Sample {
        phase: Phase::AmplitudeScaled,
        x: s.x / k,
        t: s.t / k,
        v: s.v * k,
        ..*s
    })
}

/// Dimensional sample through all three maps.
pub fn to_model_variables(p: &PhysicalParams, s: &Sample) -> Result<Sample> {
    let sp = scale_params(p)?;
    delta_removal(&eps_scale(&nondim_map(p, s)?, sp.eps)?, sp.eps, sp.delta)
}

/// Inverse of [`to_model_variables`].
pub fn from_model_variables(p: &PhysicalParams, s: &Sample) -> Result<Sample> {
    let sp = scale_params(p)?;
    redim(p, &eps_unscale(&delta_restore(s, sp.eps, sp.delta)?, sp.eps)?)
}

/// Carry a jet through the next map of the pipeline.
pub fn advance_jet(p: &PhysicalParams, jet: &Jet) -> Result<Jet> {
    let sp = scale_params(p)?;
    let (du, dv, dp) = (jet.du, jet.dv, jet.dp);
    match jet.sample.phase {
        Phase::Dimensional => {
            let c = p.wave_speed();
            let (l, h) = (p.lambda, p.h0);
            let rg = p.rho * p.g;
            Ok(Jet {
                sample: nondim_map(p, &jet.sample)?,
                du: [du[0] * l / (p.g * h), du[1] * l / c, du[2] * h / c],
                dv: [dv[0] * l * l / (p.g * h * h), dv[1] * l * l / (h * c), dv[2] * l / c],
                dp: [dp[0] * l / (rg * h), (dp[1] + rg) / rg],
            })
        }
        Phase::Nondimensional => {
            let e = sp.eps;
            Ok(Jet {
                sample: eps_scale(&jet.sample, e)?,
                du: du.map(|d| d / e),
                dv: dv.map(|d| d / e),
                dp: dp.map(|d| d / e),
            })
        }
        Phase::AmplitudeScaled => {
            let k = stretch(sp.eps, sp.delta);
            Ok(Jet {
                sample: delta_removal(&jet.sample, sp.eps, sp.delta)?,
                du: [du[0] / k, du[1] / k, du[2]],
                dv: [dv[0] / (k * k), dv[1] / (k * k), dv[2] / k],
                dp: [dp[0] / k, dp[1]],
            })
        }
        Phase::ShallownessRemoved => Err(Error::InvalidArgument(
            "jet is already in the final phase of the pipeline".into(),
        )),
    }
}

/// Residuals of the horizontal momentum, vertical momentum and mass
/// equations in the jet's own variables.
pub fn euler_residuals(p: &PhysicalParams, jet: &Jet) -> Result<[f64; 3]> {
    let sp = scale_params(p)?;
    let s = &jet.sample;
    let (du, dv, dp) = (jet.du, jet.dv, jet.dp);
    let adv_u = s.u * du[1] + s.v * du[2];
    let adv_v = s.u * dv[1] + s.v * dv[2];
    let mass = du[1] + dv[2];
    let (e, d2) = (sp.eps, sp.delta * sp.delta);
    Ok(match s.phase {
        Phase::Dimensional => [
            du[0] + adv_u + dp[0] / p.rho,
            dv[0] + adv_v + dp[1] / p.rho + p.g,
            mass,
        ],
        Phase::Nondimensional => [du[0] + adv_u + dp[0], d2 * (dv[0] + adv_v) + dp[1], mass],
        Phase::AmplitudeScaled => [du[0] + e * adv_u + dp[0], d2 * (dv[0] + e * adv_v) + dp[1], mass],
        Phase::ShallownessRemoved => [du[0] + e * adv_u + dp[0], e * (dv[0] + e * adv_v) + dp[1], mass],
    })
}

/// Factors `f` with `R_dimensional = f · R_phase` for each equation.
pub fn residual_factors(p: &PhysicalParams, phase: Phase) -> Result<[f64; 3]> {
    let sp = scale_params(p)?;
    let c = p.wave_speed();
    let base = [p.g * p.h0 / p.lambda, p.g, c / p.lambda];
    let k = stretch(sp.eps, sp.delta);
    Ok(match phase {
        Phase::Dimensional => [1.0; 3],
        Phase::Nondimensional => base,
        Phase::AmplitudeScaled => base.map(|f| f * sp.eps),
        Phase::ShallownessRemoved => [base[0] * sp.eps * k, base[1] * sp.eps, base[2] * sp.eps * k],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Irrotational,
    Shear,
    Arbitrary,
}

/// `κ = c₀` for irrotational flow and `κ = ω₀√(g h₀)/g + c₀` for constant
/// vorticity. The arbitrary regime yields a coefficient function instead.
pub fn compute_kappa(regime: Regime, p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    match regime {
        Regime::Irrotational => Ok(p.c0),
        Regime::Shear => Ok(p.shear_strength() + p.c0),
        Regime::Arbitrary => Err(Error::InvalidArgument(
            "the arbitrary-vorticity regime has a coefficient F(x), not a scalar kappa".into(),
        )),
    }
}

/// Right-moving surface profile `f` with `η(x, t) = f(x − t)`.
#[derive(Clone, Debug)]
pub enum Profile {
    /// `A sin(k ξ + phase)`.
    Sine { amplitude: f64, wavenumber: f64, phase: f64 },
    /// Gaussian bump of the given width repeated with `period`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
        period: f64,
    },
    /// Trigonometric interpolant of periodic samples.
    Sampled(TrigInterpolant),
}

impl Profile {
    pub fn samples(grid: &Grid1D, values: &[f64]) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                context: "profile samples",
                expected: grid.n(),
                got: values.len(),
            });
        }
        crate::spectral::check_finite(values, "profile samples")?;
        Ok(Profile::Sampled(TrigInterpolant::new(grid, values)))
    }

    /// `f^{(order)}(ξ)` for `order ≤ 3`.
    pub fn eval(&self, xi: f64, order: u32) -> f64 {
        match self {
            Profile::Sine {
                amplitude,
                wavenumber,
                phase,
            } => {
                let arg = wavenumber * xi + phase;
                let k = wavenumber.powi(order as i32);
                amplitude
                    * k
                    * match order % 4 {
                        0 => arg.sin(),
                        1 => arg.cos(),
                        2 => -arg.sin(),
                        _ => -arg.cos(),
                    }
            }
            Profile::Gaussian {
                amplitude,
                center,
                width,
                period,
            } => {
                let mut r = xi - center;
                r -= period * (r / period).round();
                (-3..=3)
                    .map(|image| {
                        let d = (r - image as f64 * period) / width;
                        let g = (-d * d).exp();
                        let poly = match order {
                            0 => 1.0,
                            1 => -2.0 * d,
                            2 => 4.0 * d * d - 2.0,
                            _ => -8.0 * d * d * d + 12.0 * d,
                        };
                        amplitude * poly * g / width.powi(order as i32)
                    })
                    .sum()
            }
            Profile::Sampled(interp) => interp.eval_derivative(xi, order),
        }
    }
}

/// The function `𝓕(x, z)` of the arbitrary-vorticity regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurrentProfile {
    /// `𝓕 = c₀`.
    Uniform { c0: f64 },
    /// `𝓕 = c₀ + s z`.
    Linear { c0: f64, slope: f64 },
    /// `𝓕 = c₀ + A sin(k x) cos(π m z)`.
    Modal {
        c0: f64,
        amplitude: f64,
        wavenumber: f64,
        vertical_mode: u32,
    },
}

impl CurrentProfile {
    pub fn value(&self, x: f64, z: f64) -> f64 {
        match *self {
            CurrentProfile::Uniform { c0 } => c0,
            CurrentProfile::Linear { c0, slope } => c0 + slope * z,
            CurrentProfile::Modal {
                c0,
                amplitude,
                wavenumber,
                vertical_mode,
            } => c0 + amplitude * (wavenumber * x).sin() * (std::f64::consts::PI * vertical_mode as f64 * z).cos(),
        }
    }

    /// `𝓕_x(x, z)`.
    pub fn slope_x(&self, x: f64, z: f64) -> f64 {
        match *self {
            CurrentProfile::Uniform { .. } | CurrentProfile::Linear { .. } => 0.0,
            CurrentProfile::Modal {
                amplitude,
                wavenumber,
                vertical_mode,
                ..
            } => {
                amplitude
                    * wavenumber
                    * (wavenumber * x).cos()
                    * (std::f64::consts::PI * vertical_mode as f64 * z).cos()
            }
        }
    }

    /// Surface value `F(x) = 𝓕(x, 1)` and its derivative.
    pub fn surface(&self, x: f64) -> (f64, f64) {
        (self.value(x, 1.0), self.slope_x(x, 1.0))
    }
}

/// Gauss-Legendre order for the `z` integral defining `𝓖`.
pub const VERTICAL_QUADRATURE_NODES: usize = 32;
/// Largest tolerated `|𝓖(x, 1) − 𝓖(x, 0)|`.
pub const CLOSURE_TOLERANCE: f64 = 1e-8;

/// Linearized background flow: surface profile, regime and parameters.
#[derive(Clone, Debug)]
pub struct LinearModel {
    regime: Regime,
    profile: Profile,
    params: PhysicalParams,
    current: Option<CurrentProfile>,
    rule: (Vec<f64>, Vec<f64>),
    drop_z_factor: bool,
}

/// `(η, u, v, p)` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSample {
    pub eta: f64,
    pub u: f64,
    pub v: f64,
    pub pressure: f64,
}

impl LinearModel {
    /// `current` is required for the arbitrary regime and rejected otherwise.
    pub fn new(regime: Regime, profile: Profile, params: PhysicalParams, current: Option<CurrentProfile>) -> Result<Self> {
        params.validate()?;
        match (regime, current.is_some()) {
            (Regime::Arbitrary, false) => {
                return Err(Error::InvalidArgument("the arbitrary regime needs a current profile".into()))
            }
            (Regime::Irrotational | Regime::Shear, true) => {
                return Err(Error::InvalidArgument(format!(
                    "a current profile is only meaningful in the arbitrary regime, not {regime:?}"
                )))
            }
            _ => {}
        }
        Ok(Self {
            regime,
            profile,
            params,
            current,
            rule: gauss_legendre(VERTICAL_QUADRATURE_NODES),
            drop_z_factor: false,
        })
    }

    /// Negative control: replace `v = −z η_x` by `−η_x`.
    pub fn with_corrupted_vertical_velocity(mut self) -> Self {
        self.drop_z_factor = true;
        self
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// `𝓖(x, z) = ∫₀^z 𝓕_x(x, s) ds`, zero for the other regimes.
    pub fn g_function(&self, x: f64, z: f64) -> f64 {
        match &self.current {
            None => 0.0,
            Some(c) => {
                let part: f64 = self
                    .rule
                    .0
                    .iter()
                    .zip(&self.rule.1)
                    .map(|(&s, &w)| w * c.slope_x(x, 0.5 * z * (s + 1.0)))
                    .sum();
                0.5 * z * part
            }
        }
    }

    /// Sample without the range and closure checks.
    fn eval(&self, x: f64, z: f64, t: f64) -> LinearSample {
        let xi = x - t;
        let eta = self.profile.eval(xi, 0);
        let eta_x = self.profile.eval(xi, 1);
        let vz = if self.drop_z_factor { 1.0 } else { z };
        let (u, v) = match (self.regime, &self.current) {
            (Regime::Irrotational, _) => (eta + self.params.c0, -vz * eta_x),
            (Regime::Shear, _) => (eta + self.params.shear_strength() * z + self.params.c0, -vz * eta_x),
            (Regime::Arbitrary, Some(c)) => (eta + c.value(x, z), -vz * eta_x - self.g_function(x, z)),
            (Regime::Arbitrary, None) => unreachable!("validated in LinearModel::new"),
        };
        LinearSample {
            eta,
            u,
            v,
            pressure: eta,
        }
    }

    /// `(η, u, v, p)` at `(x, z, t)` with `0 ≤ z ≤ 1`.
    pub fn sample(&self, x: f64, z: f64, t: f64) -> Result<LinearSample> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidArgument(format!("z = {z} lies outside [0, 1]")));
        }
        if self.current.is_some() {
            let gap = self.g_function(x, 1.0).abs();
            if !(gap <= CLOSURE_TOLERANCE) {
                return Err(Error::Constraint(format!(
                    "G(x, 1) - G(x, 0) = {gap:e} at x = {x}; the current profile is incompatible with the bed and surface conditions"
                )));
            }
        }
        Ok(self.eval(x, z, t))
    }
}

/// Largest absolute residual of each equation of the linear system over the
/// sampled points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearResiduals {
    /// `u_t + p_x`
    pub momentum: f64,
    /// `p_z`
    pub hydrostatic: f64,
    /// `u_x + v_z`
    pub mass: f64,
    /// `v − η_t` at `z = 1`
    pub surface_kinematic: f64,
    /// `p − η` at `z = 1`
    pub surface_pressure: f64,
    /// `v` at `z = 0`
    pub bed: f64,
    /// `η_tt − η_xx`
    pub wave_equation: f64,
}

impl LinearResiduals {
    pub fn max(&self) -> f64 {
        [
            self.momentum,
            self.hydrostatic,
            self.mass,
            self.surface_kinematic,
            self.surface_pressure,
            self.bed,
            self.wave_equation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

// 4th-order central difference in z.
const DZ: f64 = 1e-3;

fn z_derivative(f: impl Fn(f64) -> f64, z: f64) -> f64 {
    (f(z - 2.0 * DZ) - 8.0 * f(z - DZ) + 8.0 * f(z + DZ) - f(z + 2.0 * DZ)) / (12.0 * DZ)
}

/// Evaluate the residuals of the linear system on `x ∈ grid`, `nz` uniform
/// levels in `[0, 1]` and the given times. `x` derivatives are spectral, `t`
/// derivatives analytic and `z` derivatives 4th-order differences.
pub fn verify_linear_system(model: &LinearModel, grid: &Grid1D, nz: usize, times: &[f64]) -> Result<LinearResiduals> {
    if nz < 2 {
        return Err(Error::InvalidArgument(format!("need at least two z levels, got {nz}")));
    }
    if times.is_empty() {
        return Err(Error::InvalidArgument("need at least one time".into()));
    }
    let xs = grid.nodes();
    let mut r = LinearResiduals::default();
    let bump = |slot: &mut f64, v: f64| {
        if !(v.abs() <= *slot) {
            *slot = v.abs();
        }
    };
    for &t in times {
        let eta = FieldState::new(*grid, xs.iter().map(|&x| model.profile.eval(x - t, 0)).collect(), t)?;
        let eta_x = deriv(&eta, 1)?;
        let eta_xx = deriv(&eta, 2)?;
        for (j, &x) in xs.iter().enumerate() {
            let xi = x - t;
            let eta_t = -model.profile.eval(xi, 1);
            let eta_tt = model.profile.eval(xi, 2);
            bump(&mut r.wave_equation, eta_tt - eta_xx.values()[j]);
            // p = η at every depth, so p_x = η_x
            bump(&mut r.momentum, eta_t + eta_x.values()[j]);
            let top = model.sample(x, 1.0, t)?;
            bump(&mut r.surface_kinematic, top.v - eta_t);
            bump(&mut r.surface_pressure, top.pressure - top.eta);
            bump(&mut r.bed, model.sample(x, 0.0, t)?.v);
        }
        for level in 0..nz {
            let z = level as f64 / (nz - 1) as f64;
            let mut u = Vec::with_capacity(xs.len());
            for &x in &xs {
                u.push(model.sample(x, z, t)?.u);
            }
            let u_x = deriv(&FieldState::new(*grid, u, t)?, 1)?;
            for (j, &x) in xs.iter().enumerate() {
                let v_z = z_derivative(|s| model.eval(x, s, t).v, z);
                let p_z = z_derivative(|s| model.eval(x, s, t).pressure, z);
                bump(&mut r.mass, u_x.values()[j] + v_z);
                bump(&mut r.hydrostatic, p_z);
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn physical() -> PhysicalParams {
        PhysicalParams {
            g: 9.81,
            h0: 2.0,
            a: 0.2,
            lambda: 40.0,
            omega0: 0.3,
            c0: 0.7,
            rho: 1025.0,
            p0: 101_325.0,
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn scale_params_are_ratios() {
        let p = PhysicalParams {
            a: 0.1,
            h0: 1.0,
            lambda: 10.0,
            ..physical()
        };
        let s = scale_params(&p).unwrap();
        assert!((s.eps - 0.1).abs() < 1e-15 && (s.delta - 0.1).abs() < 1e-15);
        let bad = PhysicalParams { h0: 0.0, ..p };
        assert!(scale_params(&bad).is_err());
    }

    #[test]
    fn still_water_has_zero_dynamic_pressure() {
        let p = physical();
        let z = 0.6;
        let s = Sample {
            phase: Phase::Dimensional,
            x: 3.0,
            z,
            t: 1.0,
            u: 0.0,
            v: 0.0,
            eta: 0.0,
            pressure: p.p0 + p.rho * p.g * (p.h0 - z),
        };
        let nd = nondim_map(&p, &s).unwrap();
        assert!(nd.pressure.abs() < 1e-12);
        assert!((nondim_map(&p, &Sample { x: p.lambda, ..s }).unwrap().x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maps_reject_wrong_phase() {
        let p = physical();
        let s = Sample {
            phase: Phase::Nondimensional,
            x: 0.0,
            z: 0.0,
            t: 0.0,
            u: 0.0,
            v: 0.0,
            eta: 0.0,
            pressure: 0.0,
        };
        assert!(nondim_map(&p, &s).is_err());
        assert!(delta_removal(&s, 0.1, 0.1).is_err());
        assert!(eps_scale(&s, 0.0).is_err());
    }

    #[test]
    fn eps_scaling_divides_velocities() {
        let s = Sample {
            phase: Phase::Nondimensional,
            x: 0.0,
            z: 0.5,
            t: 0.0,
            u: 0.02,
            v: 0.01,
            eta: 0.3,
            pressure: 0.004,
        };
        let scaled = eps_scale(&s, 0.1).unwrap();
        assert!((scaled.u - 0.2).abs() < 1e-15);
        assert_eq!(scaled.eta, s.eta);
        assert_eq!(eps_scale(&s, 1.0).unwrap().u, s.u);
        let back = eps_unscale(&scaled, 0.1).unwrap();
        assert!(rel(back.u, s.u) < 1e-15 && rel(back.pressure, s.pressure) < 1e-15);
    }

    #[test]
    fn delta_removal_is_identity_when_eps_is_delta_squared() {
        let s = Sample {
            phase: Phase::AmplitudeScaled,
            x: 1.3,
            z: 0.5,
            t: 0.7,
            u: 0.2,
            v: 0.1,
            eta: 0.3,
            pressure: 0.4,
        };
        let d = delta_removal(&s, 0.04, 0.2).unwrap();
        assert!(rel(d.x, s.x) < 1e-15 && rel(d.t, s.t) < 1e-15 && rel(d.v, s.v) < 1e-15);
    }

    #[test]
    fn pipeline_round_trip() {
        let p = physical();
        let s = Sample {
            phase: Phase::Dimensional,
            x: 13.7,
            z: 1.3,
            t: 4.2,
            u: 0.31,
            v: -0.07,
            eta: 0.12,
            pressure: 1.2e5,
        };
        let fwd = to_model_variables(&p, &s).unwrap();
        assert_eq!(fwd.phase, Phase::ShallownessRemoved);
        let back = from_model_variables(&p, &fwd).unwrap();
        for (a, b) in [
            (back.x, s.x),
            (back.z, s.z),
            (back.t, s.t),
            (back.u, s.u),
            (back.v, s.v),
            (back.eta, s.eta),
            (back.pressure, s.pressure),
        ] {
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn residuals_transform_by_known_factors() {
        let p = physical();
        let jet = Jet {
            sample: Sample {
                phase: Phase::Dimensional,
                x: 5.0,
                z: 0.8,
                t: 2.0,
                u: 0.4,
                v: -0.05,
                eta: 0.1,
                pressure: 1.1e5,
            },
            du: [0.03, -0.02, 0.11],
            dv: [0.004, 0.002, 0.02],
            dp: [-35.0, -9900.0],
        };
        let dim = euler_residuals(&p, &jet).unwrap();
        let mut cur = jet;
        for _ in 0..3 {
            cur = advance_jet(&p, &cur).unwrap();
            let r = euler_residuals(&p, &cur).unwrap();
            let f = residual_factors(&p, cur.sample.phase).unwrap();
            for i in 0..3 {
                assert!((f[i] * r[i] - dim[i]).abs() <= 1e-10 * dim[i].abs().max(1.0), "{:?} eq {i}", cur.sample.phase);
            }
        }
        assert!(advance_jet(&p, &cur).is_err());
    }

    #[test]
    fn kappa_formulas() {
        let p = PhysicalParams { c0: 1.5, ..physical() };
        assert_eq!(compute_kappa(Regime::Irrotational, &p).unwrap(), 1.5);
        let still = PhysicalParams { omega0: 0.0, ..p };
        assert_eq!(compute_kappa(Regime::Shear, &still).unwrap(), 1.5);
        let (g, h0) = (9.8, 0.4);
        let root = PhysicalParams {
            g,
            h0,
            omega0: -1.5 * g / (g * h0).sqrt(),
            ..p
        };
        assert!(compute_kappa(Regime::Shear, &root).unwrap().abs() < 1e-14);
        assert!(compute_kappa(Regime::Arbitrary, &p).is_err());
        // affine in ω₀ with slope √(g h₀)/g
        let k1 = compute_kappa(Regime::Shear, &PhysicalParams { omega0: 1.0, ..p }).unwrap();
        let k2 = compute_kappa(Regime::Shear, &PhysicalParams { omega0: 2.0, ..p }).unwrap();
        assert!((k2 - k1 - p.wave_speed() / p.g).abs() < 1e-15);
    }

    fn sine() -> Profile {
        Profile::Sine {
            amplitude: 0.1,
            wavenumber: 1.0,
            phase: 0.0,
        }
    }

    #[test]
    fn linear_samples_reduce_correctly() {
        let p = physical();
        let flat = LinearModel::new(
            Regime::Irrotational,
            Profile::Sine {
                amplitude: 0.0,
                wavenumber: 1.0,
                phase: 0.0,
            },
            p,
            None,
        )
        .unwrap();
        let s = flat.sample(0.4, 0.5, 1.0).unwrap();
        assert_eq!((s.eta, s.u, s.v), (0.0, p.c0, 0.0));

        let shear = LinearModel::new(Regime::Shear, sine(), p, None).unwrap();
        let irr = LinearModel::new(Regime::Irrotational, sine(), p, None).unwrap();
        assert_eq!(shear.sample(0.3, 0.0, 0.2).unwrap(), irr.sample(0.3, 0.0, 0.2).unwrap());

        let arb = LinearModel::new(Regime::Arbitrary, sine(), p, Some(CurrentProfile::Uniform { c0: p.c0 })).unwrap();
        for &(x, z, t) in &[(0.1, 0.2, 0.3), (2.0, 1.0, 5.0), (4.0, 0.0, -1.0)] {
            assert_eq!(arb.sample(x, z, t).unwrap(), irr.sample(x, z, t).unwrap());
        }
        assert!(irr.sample(0.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn closure_violation_is_rejected() {
        let bad = CurrentProfile::Modal {
            c0: 0.5,
            amplitude: 0.2,
            wavenumber: 1.0,
            vertical_mode: 0,
        };
        let m = LinearModel::new(Regime::Arbitrary, sine(), physical(), Some(bad)).unwrap();
        assert!(matches!(m.sample(0.0, 0.5, 0.0), Err(Error::Constraint(_))));
        assert!(LinearModel::new(Regime::Arbitrary, sine(), physical(), None).is_err());
        assert!(LinearModel::new(Regime::Shear, sine(), physical(), Some(bad)).is_err());
    }

    #[test]
    fn g_function_integrates_the_slope() {
        let c = CurrentProfile::Modal {
            c0: 0.5,
            amplitude: 0.2,
            wavenumber: 1.0,
            vertical_mode: 2,
        };
        let m = LinearModel::new(Regime::Arbitrary, sine(), physical(), Some(c)).unwrap();
        let (x, z) = (0.7_f64, 0.35_f64);
        let exact = 0.2 * x.cos() * (2.0 * PI * z).sin() / (2.0 * PI);
        assert!((m.g_function(x, z) - exact).abs() < 1e-14);
    }

    #[test]
    fn linear_residuals_vanish_for_every_regime() {
        let grid = Grid1D::new(2.0 * PI, 64).unwrap();
        let times = [0.0, 0.4, 1.3];
        let current = CurrentProfile::Modal {
            c0: 0.7,
            amplitude: 0.3,
            wavenumber: 2.0,
            vertical_mode: 1,
        };
        for (regime, c) in [
            (Regime::Irrotational, None),
            (Regime::Shear, None),
            (Regime::Arbitrary, Some(current)),
        ] {
            let m = LinearModel::new(regime, sine(), physical(), c).unwrap();
            let r = verify_linear_system(&m, &grid, 9, &times).unwrap();
            assert!(r.max() < 1e-10, "{regime:?}: {r:?}");
            let bad = m.with_corrupted_vertical_velocity();
            let r = verify_linear_system(&bad, &grid, 9, &times).unwrap();
            assert!(r.mass > 1e-2, "{regime:?}: {r:?}");
        }
    }

    #[test]
    fn gaussian_profile_derivatives() {
        let prof = Profile::Gaussian {
            amplitude: 0.2,
            center: 1.0,
            width: 0.5,
            period: 2.0 * PI,
        };
        let h = 1e-4;
        for &xi in &[0.3, 1.0, 2.5, 7.0] {
            for order in 0..3 {
                let fd = (prof.eval(xi + h, order) - prof.eval(xi - h, order)) / (2.0 * h);
                assert!((fd - prof.eval(xi, order + 1)).abs() < 1e-6, "order {order} at {xi}");
            }
        }
        assert!((prof.eval(1.0, 0) - prof.eval(1.0 + 2.0 * PI, 0)).abs() < 1e-14);
    }
}
