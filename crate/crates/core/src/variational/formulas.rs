//! Eulerian velocity of a path and the first variations of `γ⁻¹`,
//! `γ_t ∘ γ⁻¹` and `∂_x(γ_t ∘ γ⁻¹)`.

use crate::error::{Error, Result};
use crate::spectral::{max_abs_diff, FieldState, Grid1D, Spectrum, TrigInterpolant};

use super::diffeo::DiscreteDiffeo;
use super::path::DiffeoPath;

/// Largest tolerated disagreement between the two forms of the velocity
/// variation.
pub const FORM_AGREEMENT: f64 = 1e-7;

/// Points `γ⁻¹(x_j)`.
pub(crate) fn inverse_points(gamma: &DiscreteDiffeo) -> Result<Vec<f64>> {
    let grid = gamma.grid();
    Ok(gamma
        .inverse_offsets()?
        .into_iter()
        .enumerate()
        .map(|(j, e)| grid.node(j) + e)
        .collect())
}

/// Samples of the trigonometric interpolant of `values` at `points`.
pub(crate) fn compose_field(grid: &Grid1D, values: &[f64], points: &[f64]) -> Vec<f64> {
    let interp = TrigInterpolant::new(grid, values);
    points.iter().map(|&y| interp.eval(y)).collect()
}

fn check_len(grid: &Grid1D, v: &[f64], context: &'static str) -> Result<()> {
    if v.len() != grid.n() {
        return Err(Error::LengthMismatch {
            context,
            expected: grid.n(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `u = γ_t ∘ γ⁻¹` at slice `k`.
pub fn eulerian_velocity(path: &DiffeoPath, k: usize) -> Result<FieldState> {
    let gamma = path.slice(k);
    let grid = *gamma.grid();
    let points = inverse_points(gamma)?;
    let u = compose_field(&grid, &path.velocity(k)?, &points);
    FieldState::new(grid, u, path.time(k))
}

/// `d/dε|₀ (γ + εφ)⁻¹ = −(φ ∘ γ⁻¹)/(γ_x ∘ γ⁻¹)`.
pub fn variation_inverse(gamma: &DiscreteDiffeo, phi: &[f64]) -> Result<FieldState> {
    let grid = *gamma.grid();
    check_len(&grid, phi, "variation_inverse")?;
    let points = inverse_points(gamma)?;
    let ev = gamma.evaluator();
    let w = compose_field(&grid, phi, &points);
    let out = w
        .iter()
        .zip(&points)
        .enumerate()
        .map(|(index, (w, &y))| {
            let slope = ev.slope(y);
            if !(slope > 0.0) {
                return Err(Error::NotMonotone { index, slope });
            }
            Ok(-w / slope)
        })
        .collect::<Result<Vec<_>>>()?;
    FieldState::new(grid, out, 0.0)
}

// Fields shared by the velocity variations.
struct Composed {
    grid: Grid1D,
    /// γ_t ∘ γ⁻¹
    u: Vec<f64>,
    /// φ ∘ γ⁻¹
    w: Vec<f64>,
    /// φ_t ∘ γ⁻¹
    wt: Vec<f64>,
    points: Vec<f64>,
}

fn composed(gamma: &DiscreteDiffeo, gamma_t: &[f64], phi: &[f64], phi_t: &[f64]) -> Result<Composed> {
    let grid = *gamma.grid();
    for (v, ctx) in [(gamma_t, "gamma_t"), (phi, "phi"), (phi_t, "phi_t")] {
        check_len(&grid, v, ctx)?;
    }
    let points = inverse_points(gamma)?;
    Ok(Composed {
        grid,
        u: compose_field(&grid, gamma_t, &points),
        w: compose_field(&grid, phi, &points),
        wt: compose_field(&grid, phi_t, &points),
        points,
    })
}

/// `d/dε|₀ (γ_t + εφ_t) ∘ (γ + εφ)⁻¹ = φ_t∘γ⁻¹ − (φ∘γ⁻¹) ∂_x(γ_t∘γ⁻¹)`.
///
/// Also evaluates the transport form `∂_t(φ∘γ⁻¹) + u ∂_x(φ∘γ⁻¹) − (φ∘γ⁻¹) u_x`
/// and fails if the two disagree by more than [`FORM_AGREEMENT`].
pub fn variation_velocity(gamma: &DiscreteDiffeo, gamma_t: &[f64], phi: &[f64], phi_t: &[f64]) -> Result<FieldState> {
    let c = composed(gamma, gamma_t, phi, phi_t)?;
    let ux = Spectrum::of(c.grid, &c.u).derivative(1);
    let direct: Vec<f64> = (0..c.grid.n()).map(|j| c.wt[j] - c.w[j] * ux[j]).collect();

    // ∂_t(φ∘γ⁻¹) = φ_t∘γ⁻¹ − (φ_x∘γ⁻¹) u / (γ_x∘γ⁻¹)
    let ev = gamma.evaluator();
    let phi_interp = TrigInterpolant::new(&c.grid, phi);
    let wx = Spectrum::of(c.grid, &c.w).derivative(1);
    let transport: Vec<f64> = (0..c.grid.n())
        .map(|j| {
            let y = c.points[j];
            let wt = c.wt[j] - phi_interp.eval_derivative(y, 1) * c.u[j] / ev.slope(y);
            wt + c.u[j] * wx[j] - c.w[j] * ux[j]
        })
        .collect();
    let gap = max_abs_diff(&direct, &transport);
    if !(gap <= FORM_AGREEMENT) {
        return Err(Error::Inconsistent {
            context: "variation_velocity",
            gap,
            tolerance: FORM_AGREEMENT,
        });
    }
    FieldState::new(c.grid, direct, 0.0)
}

/// `d/dε|₀ ∂_x[(γ_t + εφ_t) ∘ (γ + εφ)⁻¹]
///  = ∂_x(φ_t∘γ⁻¹) − ∂_x(γ_t∘γ⁻¹) ∂_x(φ∘γ⁻¹) − (φ∘γ⁻¹) ∂_x²(γ_t∘γ⁻¹)`.
pub fn variation_velocity_gradient(
    gamma: &DiscreteDiffeo,
    gamma_t: &[f64],
    phi: &[f64],
    phi_t: &[f64],
) -> Result<FieldState> {
    let c = composed(gamma, gamma_t, phi, phi_t)?;
    let su = Spectrum::of(c.grid, &c.u);
    let (ux, uxx) = (su.derivative(1), su.derivative(2));
    let wx = Spectrum::of(c.grid, &c.w).derivative(1);
    let wtx = Spectrum::of(c.grid, &c.wt).derivative(1);
    let out = (0..c.grid.n()).map(|j| wtx[j] - ux[j] * wx[j] - c.w[j] * uxx[j]).collect();
    FieldState::new(c.grid, out, 0.0)
}
