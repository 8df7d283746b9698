//! Right-invariant action on paths, its Gateaux derivative, and the
//! Euler-Lagrange residual it should pair with.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{compute_kappa, CurrentProfile, PhysicalParams, Regime};
use crate::spectral::{check_finite, integrate_values, FieldState, Grid1D, Spectrum};

use super::formulas::{compose_field, eulerian_velocity, inverse_points};
use super::path::{time_derivative, DiffeoPath, Perturbation};

/// The function `c(x)` added to the Eulerian velocity in the action.
#[derive(Clone, Debug, PartialEq)]
pub enum ActionOffset {
    Zero,
    Constant(f64),
    /// Samples of `c` and `c'` on the path grid.
    Field { values: Vec<f64>, derivative: Vec<f64> },
}

impl ActionOffset {
    /// `c = c₀`.
    pub fn irrotational(p: &PhysicalParams) -> Result<Self> {
        Ok(ActionOffset::Constant(compute_kappa(Regime::Irrotational, p)?))
    }

    /// `c = ω₀√(g h₀)/g + c₀`.
    pub fn shear(p: &PhysicalParams) -> Result<Self> {
        Ok(ActionOffset::Constant(compute_kappa(Regime::Shear, p)?))
    }

    /// `c(x) = 𝓕(x, 1)` with its exact derivative.
    pub fn from_current(grid: &Grid1D, current: &CurrentProfile) -> Self {
        ActionOffset::Field {
            values: grid.sample(|x| current.surface(x).0),
            derivative: grid.sample(|x| current.surface(x).1),
        }
    }

    /// Sampled `c` with a spectral derivative.
    pub fn field(grid: &Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                context: "action offset",
                expected: grid.n(),
                got: values.len(),
            });
        }
        check_finite(&values, "action offset")?;
        let derivative = Spectrum::of(*grid, &values).derivative(1);
        Ok(ActionOffset::Field { values, derivative })
    }

    /// `(c, c')` on the grid.
    pub fn sampled(&self, grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = grid.n();
        match self {
            ActionOffset::Zero => Ok((vec![0.0; n], vec![0.0; n])),
            ActionOffset::Constant(c) => Ok((vec![*c; n], vec![0.0; n])),
            ActionOffset::Field { values, derivative } => {
                if values.len() != n || derivative.len() != n {
                    return Err(Error::LengthMismatch {
                        context: "action offset",
                        expected: n,
                        got: values.len().min(derivative.len()),
                    });
                }
                Ok((values.clone(), derivative.clone()))
            }
        }
    }
}

// Trapezoid weights in time.
fn time_weight(k: usize, m: usize, dt: f64) -> f64 {
    if k == 0 || k == m {
        0.5 * dt
    } else {
        dt
    }
}

/// `½ ∫₀ᵀ ∫ [(u + c)² + u_x²] dx dt` with `u = γ_t ∘ γ⁻¹`; trapezoid rule in
/// both variables.
pub fn discrete_action(path: &DiffeoPath, offset: &ActionOffset) -> Result<f64> {
    let grid = *path.grid();
    let (c, _) = offset.sampled(&grid)?;
    let m = path.steps();
    let mut total = 0.0;
    for k in 0..=m {
        let u = eulerian_velocity(path, k)?;
        let ux = Spectrum::from_field(&u).derivative(1);
        let density: Vec<f64> = (0..grid.n())
            .map(|j| {
                let s = u.values()[j] + c[j];
                s * s + ux[j] * ux[j]
            })
            .collect();
        total += time_weight(k, m, path.dt()) * integrate_values(&grid, &density);
    }
    Ok(0.5 * total)
}

/// Default step of the central difference in [`gateaux_action`].
pub const GATEAUX_EPS: f64 = 1e-5;
const MAX_HALVINGS: u32 = 4;
const ROUNDING_FACTOR: f64 = 16.0;

/// A finite-difference derivative with its own error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateauxEstimate {
    pub value: f64,
    /// `|Richardson value − D(ε/2)|` plus a cancellation bound `∝ ε_mach |a| / ε`.
    pub error: f64,
    /// Step actually used after any halving.
    pub eps: f64,
}

/// `d/dε a(γ + εφ)` at `ε = 0` by central differences at `ε` and `ε/2`
/// combined by Richardson extrapolation. If `γ ± εφ` leaves the group the
/// step is halved, at most four times.
pub fn gateaux_action(path: &DiffeoPath, pert: &Perturbation, offset: &ActionOffset) -> Result<GateauxEstimate> {
    gateaux_action_with(path, pert, offset, GATEAUX_EPS)
}

pub fn gateaux_action_with(
    path: &DiffeoPath,
    pert: &Perturbation,
    offset: &ActionOffset,
    eps: f64,
) -> Result<GateauxEstimate> {
    path.check_compatible(pert)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("difference step must be positive, got {eps}")));
    }
    if pert.is_zero() {
        return Ok(GateauxEstimate { value: 0.0, error: 0.0, eps });
    }
    // difference quotient and the largest action magnitude seen
    let central = |e: f64| -> Result<(f64, f64)> {
        let plus = discrete_action(&path.perturbed(pert, e)?, offset)?;
        let minus = discrete_action(&path.perturbed(pert, -e)?, offset)?;
        Ok(((plus - minus) / (2.0 * e), plus.abs().max(minus.abs())))
    };
    let mut e = eps;
    let mut halvings = 0;
    loop {
        match central(e).and_then(|d1| Ok((d1, central(0.5 * e)?))) {
            Ok(((d1, a1), (d2, a2))) => {
                let value = (4.0 * d2 - d1) / 3.0;
                let rounding = ROUNDING_FACTOR * f64::EPSILON * a1.max(a2) / e;
                return Ok(GateauxEstimate {
                    value,
                    error: (value - d2).abs() + rounding,
                    eps: e,
                });
            }
            Err(Error::NotMonotone { .. }) if halvings < MAX_HALVINGS => {
                e *= 0.5;
                halvings += 1;
            }
            Err(err) => return Err(err),
        }
    }
}

/// `R[u] = u_t + 3uu_x + 2c u_x + c'u − u_txx − 2u_x u_xx − u u_xxx` at
/// every slice of a uniformly spaced time series.
pub fn el_residual(u_path: &[FieldState], offset: &ActionOffset) -> Result<Vec<FieldState>> {
    if u_path.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "the residual needs at least 5 time slices, got {}",
            u_path.len()
        )));
    }
    let grid = *u_path[0].grid();
    if u_path.iter().any(|u| *u.grid() != grid) {
        return Err(Error::GridMismatch("el_residual"));
    }
    let dt = u_path[1].time - u_path[0].time;
    let uniform = u_path
        .windows(2)
        .all(|w| ((w[1].time - w[0].time) - dt).abs() <= 1e-9 * dt.abs().max(1e-300));
    if !(dt > 0.0) || !uniform {
        return Err(Error::InvalidArgument("time slices must be increasing and uniformly spaced".into()));
    }
    let (c, dc) = offset.sampled(&grid)?;
    let series: Vec<&[f64]> = u_path.iter().map(|u| u.values()).collect();
    u_path
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let ut = time_derivative(&series, k, dt)?;
            let utxx = Spectrum::of(grid, &ut).derivative(2);
            let s = Spectrum::from_field(u);
            let (ux, uxx, uxxx) = (s.derivative(1), s.derivative(2), s.derivative(3));
            let v = u.values();
            let r = (0..grid.n())
                .map(|j| {
                    ut[j] + 3.0 * v[j] * ux[j] + 2.0 * c[j] * ux[j] + dc[j] * v[j]
                        - utxx[j]
                        - 2.0 * ux[j] * uxx[j]
                        - v[j] * uxxx[j]
                })
                .collect();
            FieldState::new(grid, r, u.time)
        })
        .collect()
}

/// `−∫₀ᵀ ∫ (φ ∘ γ⁻¹) R[u] dx dt` with `u` the Eulerian velocity of the path.
pub fn el_pairing(path: &DiffeoPath, pert: &Perturbation, offset: &ActionOffset) -> Result<f64> {
    path.check_compatible(pert)?;
    let grid = *path.grid();
    let m = path.steps();
    let mut velocities = Vec::with_capacity(m + 1);
    let mut weights = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let gamma = path.slice(k);
        let points = inverse_points(gamma)?;
        velocities.push(FieldState::new(grid, compose_field(&grid, &path.velocity(k)?, &points), path.time(k))?);
        weights.push(compose_field(&grid, pert.slice(k), &points));
    }
    let residual = el_residual(&velocities, offset)?;
    let mut total = 0.0;
    for k in 0..=m {
        let prod: Vec<f64> = weights[k].iter().zip(residual[k].values()).map(|(w, r)| w * r).collect();
        total += time_weight(k, m, path.dt()) * integrate_values(&grid, &prod);
    }
    Ok(-total)
}

/// Comparison of the Gateaux derivative of the action with the pairing of
/// the perturbation against the Euler-Lagrange residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// Gateaux derivative of the action.
    pub lhs: f64,
    /// `−∬ (φ∘γ⁻¹) R[u]`.
    pub rhs: f64,
    pub gap: f64,
    /// Both sides recomputed with every other time slice.
    pub lhs_coarse: f64,
    pub rhs_coarse: f64,
    /// Richardson error of the finite difference.
    pub fd_error: f64,
    /// Discretization error estimate the gap is held to.
    pub estimate: f64,
    pub passed: bool,
}

/// Evaluate both sides of the first-variation identity. The error estimate
/// assumes fourth-order convergence in time: each side contributes
/// `|v_m − v_{m/2}|/15`, plus the finite-difference error and a rounding
/// floor. The path needs an even number of steps, at least 16.
pub fn identity_check(path: &DiffeoPath, pert: &Perturbation, offset: &ActionOffset) -> Result<IdentityReport> {
    let m = path.steps();
    if !m.is_multiple_of(2) || m < 16 {
        return Err(Error::InvalidArgument(format!(
            "identity check needs an even number of steps, at least 16; got {m}"
        )));
    }
    let g = gateaux_action(path, pert, offset)?;
    let rhs = el_pairing(path, pert, offset)?;
    let (coarse_path, coarse_pert) = (path.subsample(2)?, pert.subsample(2)?);
    let lhs_coarse = gateaux_action(&coarse_path, &coarse_pert, offset)?.value;
    let rhs_coarse = el_pairing(&coarse_path, &coarse_pert, offset)?;
    let rounding = 1e-11 * (1.0 + g.value.abs() + rhs.abs());
    let estimate = g.error + (g.value - lhs_coarse).abs() / 15.0 + (rhs - rhs_coarse).abs() / 15.0 + rounding;
    let gap = (g.value - rhs).abs();
    Ok(IdentityReport {
        lhs: g.value,
        rhs,
        gap,
        lhs_coarse,
        rhs_coarse,
        fd_error: g.error,
        estimate,
        passed: gap <= estimate,
    })
}
