//! Verification suites shared by the `verify-*` and `scale` commands.

use std::f64::consts::PI;

use chlab::scaling::{
    compute_kappa, from_model_variables, to_model_variables, verify_linear_system, CurrentProfile, LinearModel,
    LinearResiduals, Phase, PhysicalParams, Profile, Regime, Sample,
};
use chlab::spectral::{deriv, max_abs_diff, TrigInterpolant};
use chlab::variational::*;
use chlab::{FieldState, Grid1D};
use rand::Rng;
use serde::Serialize;

use crate::config::{LinearConfig, OffsetConfig};
use crate::error::Result;

/// Tolerances of the variation-formula oracles: inverse, velocity, gradient.
pub const FORMULA_TOLERANCES: [f64; 3] = [1e-5, 1e-5, 1e-4];
pub const INVARIANCE_TOLERANCE: f64 = 1e-8;
pub const LINEAR_TOLERANCE: f64 = 1e-8;
pub const NEGATIVE_CONTROL_FLOOR: f64 = 1e-2;
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-12;
/// Step of the central differences in the formula oracles.
pub const ORACLE_EPS: f64 = 1e-5;

/// `γ(t, x) = x + 0.15 sin(x + t) + 0.08 t² cos 2x + 0.3 t` on `[0, 1]`.
pub fn reference_path(grid: Grid1D, steps: usize) -> Result<DiffeoPath> {
    Ok(DiffeoPath::from_fn(grid, 0.0, 1.0, steps, |t, x| {
        0.15 * (x + t).sin() + 0.08 * t * t * (2.0 * x).cos() + 0.3 * t
    })?)
}

/// `φ = sin⁴(πt) (0.3 cos x + 0.2 sin(3x − t))`.
pub fn reference_perturbation(grid: Grid1D, steps: usize) -> Result<Perturbation> {
    Ok(Perturbation::enveloped(grid, 0.0, 1.0, steps, 4, |t, x| {
        0.3 * x.cos() + 0.2 * (3.0 * x - t).sin()
    })?)
}

pub fn action_offset(grid: &Grid1D, offset: &OffsetConfig, physical: &PhysicalParams) -> Result<ActionOffset> {
    Ok(match *offset {
        OffsetConfig::Zero => ActionOffset::Zero,
        OffsetConfig::Constant { c0 } => ActionOffset::Constant(c0),
        OffsetConfig::Shear => ActionOffset::shear(physical)?,
        OffsetConfig::Field { mean, amplitude } => {
            ActionOffset::field(grid, grid.sample(|x| mean + amplitude * x.sin()))?
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityRow {
    pub offset: String,
    pub steps: usize,
    pub report: IdentityReport,
    /// `log₂(gap_{m/2} / gap_m)` relative to the previous resolution.
    pub order: Option<f64>,
}

/// Identity check for one offset at each time resolution.
pub fn identity_table(n: usize, steps: &[usize], label: &str, offset_of: impl Fn(&Grid1D) -> Result<ActionOffset>) -> Result<Vec<IdentityRow>> {
    let grid = Grid1D::new(2.0 * PI, n)?;
    let offset = offset_of(&grid)?;
    let mut rows: Vec<IdentityRow> = Vec::with_capacity(steps.len());
    for &m in steps {
        let report = identity_check(&reference_path(grid, m)?, &reference_perturbation(grid, m)?, &offset)?;
        let order = rows.last().map(|prev| (prev.report.gap / report.gap).log2());
        rows.push(IdentityRow {
            offset: label.to_string(),
            steps: m,
            report,
            order,
        });
    }
    Ok(rows)
}

/// Random displacement with four modes of amplitude below 0.05.
pub fn random_displacement(grid: Grid1D, rng: &mut impl Rng) -> Vec<f64> {
    let modes: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)))
        .collect();
    grid.sample(|x| {
        modes
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let k = (j + 1) as f64;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })
}

fn random_field(grid: Grid1D, rng: &mut impl Rng) -> Vec<f64> {
    let (a, b, c) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    grid.sample(|x| a * x.cos() + b * (2.0 * x).sin() + c)
}

fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + s * b).collect()
}

fn central(plus: &[f64], minus: &[f64], eps: f64) -> Vec<f64> {
    plus.iter().zip(minus).map(|(p, m)| (p - m) / (2.0 * eps)).collect()
}

// (γ_t + εφ_t) ∘ (γ + εφ)⁻¹ at the nodes.
fn perturbed_velocity(grid: Grid1D, disp: &[f64], gt: &[f64], phi: &[f64], phit: &[f64], eps: f64) -> Result<FieldState> {
    let inv = invert(&DiscreteDiffeo::from_displacement(grid, axpy(disp, eps, phi))?)?;
    let rate = TrigInterpolant::new(&grid, &axpy(gt, eps, phit));
    Ok(FieldState::from_fn(grid, 0.0, |x| rate.eval(inv.eval(x))))
}

/// Worst disagreement of each variation formula with its finite-difference
/// oracle: `[inverse, velocity, gradient]`.
pub fn formula_oracles(n: usize, pairs: usize, rng: &mut impl Rng) -> Result<[f64; 3]> {
    let grid = Grid1D::new(2.0 * PI, n)?;
    let eps = ORACLE_EPS;
    let mut worst = [0.0f64; 3];
    for _ in 0..pairs {
        let disp = random_displacement(grid, rng);
        let gamma = DiscreteDiffeo::from_displacement(grid, disp.clone())?;
        let gt = random_field(grid, rng);
        let phi = random_field(grid, rng);
        let phit = random_field(grid, rng);

        let inverse = |s: f64| -> Result<Vec<f64>> {
            let d = DiscreteDiffeo::from_displacement(grid, axpy(&disp, s, &phi))?;
            Ok(invert(&d)?.displacement().to_vec())
        };
        let fd = central(&inverse(eps)?, &inverse(-eps)?, eps);
        worst[0] = worst[0].max(max_abs_diff(variation_inverse(&gamma, &phi)?.values(), &fd));

        let plus = perturbed_velocity(grid, &disp, &gt, &phi, &phit, eps)?;
        let minus = perturbed_velocity(grid, &disp, &gt, &phi, &phit, -eps)?;
        let fd = central(plus.values(), minus.values(), eps);
        worst[1] = worst[1].max(max_abs_diff(variation_velocity(&gamma, &gt, &phi, &phit)?.values(), &fd));

        let fd = central(deriv(&plus, 1)?.values(), deriv(&minus, 1)?.values(), eps);
        let gradient = variation_velocity_gradient(&gamma, &gt, &phi, &phit)?;
        worst[2] = worst[2].max(max_abs_diff(gradient.values(), &fd));
    }
    Ok(worst)
}

/// Largest change of the action of the reference path under right
/// composition with random diffeomorphisms.
pub fn right_invariance(n: usize, trials: usize, offset: &ActionOffset, rng: &mut impl Rng) -> Result<f64> {
    let grid = Grid1D::new(2.0 * PI, n)?;
    let path = reference_path(grid, 16)?;
    let base = discrete_action(&path, offset)?;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let psi = DiscreteDiffeo::from_displacement(grid, random_displacement(grid, rng))?;
        let moved = discrete_action(&path.right_compose(&psi)?, offset)?;
        worst = worst.max((moved - base).abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearRow {
    pub case: String,
    pub residuals: LinearResiduals,
    pub max: f64,
    pub passed: bool,
}

/// Residuals of the linear solutions in the three regimes and of the
/// corrupted negative control.
pub fn linear_suite(config: &LinearConfig, physical: &PhysicalParams) -> Result<Vec<LinearRow>> {
    let k = config.wavenumber;
    let grid = Grid1D::new(2.0 * PI / k, config.n)?;
    let profile = || Profile::Sine {
        amplitude: config.amplitude,
        wavenumber: k,
        phase: config.phase,
    };
    let current = config.current.unwrap_or(CurrentProfile::Modal {
        c0: physical.c0,
        amplitude: 0.05,
        wavenumber: k,
        vertical_mode: 1,
    });
    let cases = [
        ("irrotational", LinearModel::new(Regime::Irrotational, profile(), *physical, None)?),
        ("shear", LinearModel::new(Regime::Shear, profile(), *physical, None)?),
        ("arbitrary", LinearModel::new(Regime::Arbitrary, profile(), *physical, Some(current))?),
        (
            "corrupted",
            LinearModel::new(Regime::Irrotational, profile(), *physical, None)?.with_corrupted_vertical_velocity(),
        ),
    ];
    cases
        .into_iter()
        .map(|(case, model)| {
            let residuals = verify_linear_system(&model, &grid, config.nz, &config.times)?;
            let max = residuals.max();
            let passed = if case == "corrupted" {
                max >= NEGATIVE_CONTROL_FLOOR
            } else {
                max <= LINEAR_TOLERANCE
            };
            Ok(LinearRow {
                case: case.to_string(),
                residuals,
                max,
                passed,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleReport {
    pub eps: f64,
    pub delta: f64,
    pub stretch: f64,
    pub wave_speed: f64,
    pub kappa_irrotational: f64,
    pub kappa_shear: f64,
    pub sample: Sample,
    pub model_sample: Sample,
    /// Largest relative error of the dimensional → model → dimensional round trip.
    pub round_trip_error: f64,
    pub round_trip_passed: bool,
}

/// A representative dimensional sample for the parameters.
pub fn dimensional_sample(p: &PhysicalParams) -> Sample {
    let c = p.wave_speed();
    let z = 0.4 * p.h0;
    Sample {
        phase: Phase::Dimensional,
        x: 0.3 * p.lambda,
        z,
        t: 0.7 * p.lambda / c,
        u: 0.12 * c,
        v: -0.03 * c,
        eta: 0.6 * p.a,
        pressure: p.p0 + p.rho * p.g * (p.h0 - z) + 0.1 * p.rho * p.g * p.a,
    }
}

pub fn relative_error(a: &Sample, b: &Sample) -> f64 {
    let pairs = [
        (a.x, b.x),
        (a.z, b.z),
        (a.t, b.t),
        (a.u, b.u),
        (a.v, b.v),
        (a.eta, b.eta),
        (a.pressure, b.pressure),
    ];
    pairs
        .iter()
        .map(|(x, y)| (x - y).abs() / x.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

pub fn scale_report(p: &PhysicalParams) -> Result<ScaleReport> {
    let sp = chlab::scaling::scale_params(p)?;
    let sample = dimensional_sample(p);
    let model_sample = to_model_variables(p, &sample)?;
    let back = from_model_variables(p, &model_sample)?;
    let round_trip_error = relative_error(&sample, &back);
    Ok(ScaleReport {
        eps: sp.eps,
        delta: sp.delta,
        stretch: chlab::scaling::stretch(sp.eps, sp.delta),
        wave_speed: p.wave_speed(),
        kappa_irrotational: compute_kappa(Regime::Irrotational, p)?,
        kappa_shear: compute_kappa(Regime::Shear, p)?,
        sample,
        model_sample,
        round_trip_error,
        round_trip_passed: round_trip_error <= ROUND_TRIP_TOLERANCE,
    })
}
