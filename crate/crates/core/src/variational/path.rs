//! Time-discretized paths of diffeomorphisms and their perturbations.

use std::f64::consts::PI;

use crate::dynamics::{gch_rhs, CHParams};
use crate::error::{Error, Result};
use crate::spectral::{FieldState, Grid1D, TrigInterpolant};

use super::diffeo::{compose, DiscreteDiffeo, Interpolation};

/// Fewest time steps a path may have.
pub const MIN_STEPS: usize = 8;

const CENTRED: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const FIRST: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const SECOND: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];

/// Fourth-order time derivative at slice `k` of a uniformly spaced series,
/// one-sided near the ends. Needs at least five slices.
pub fn time_derivative(series: &[&[f64]], k: usize, dt: f64) -> Result<Vec<f64>> {
    let m = series.len();
    if m < 5 {
        return Err(Error::InvalidArgument(format!(
            "fourth-order time differences need at least 5 slices, got {m}"
        )));
    }
    if k >= m {
        return Err(Error::InvalidArgument(format!("slice {k} out of range 0..{m}")));
    }
    let (start, weights, sign) = match k {
        0 => (0, FIRST, 1.0),
        1 => (0, SECOND, 1.0),
        _ if k == m - 1 => (m - 5, reversed(FIRST), -1.0),
        _ if k == m - 2 => (m - 5, reversed(SECOND), -1.0),
        _ => (k - 2, CENTRED, 1.0),
    };
    let n = series[0].len();
    let scale = sign / (12.0 * dt);
    let mut out = vec![0.0; n];
    for (offset, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(series[start + offset]) {
            *o += w * v;
        }
    }
    out.iter_mut().for_each(|o| *o *= scale);
    Ok(out)
}

fn reversed(w: [f64; 5]) -> [f64; 5] {
    [w[4], w[3], w[2], w[1], w[0]]
}

fn check_steps(m: usize, dt: f64) -> Result<()> {
    if m < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "a path needs at least {MIN_STEPS} time steps, got {m}"
        )));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    Ok(())
}

/// `γ(t_k, ·)` at `t_k = t0 + k dt`, `k = 0..=m`.
#[derive(Clone, Debug)]
pub struct DiffeoPath {
    grid: Grid1D,
    t0: f64,
    dt: f64,
    slices: Vec<DiscreteDiffeo>,
}

impl DiffeoPath {
    pub fn new(t0: f64, dt: f64, slices: Vec<DiscreteDiffeo>) -> Result<Self> {
        check_steps(slices.len().saturating_sub(1), dt)?;
        let grid = *slices[0].grid();
        if slices.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch("diffeomorphism path"));
        }
        Ok(Self { grid, t0, dt, slices })
    }

    /// Path with displacement `f(t, x)` on `[t0, t1]` split into `m` steps.
    pub fn from_fn(grid: Grid1D, t0: f64, t1: f64, m: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let dt = (t1 - t0) / m as f64;
        check_steps(m, dt)?;
        let slices = (0..=m)
            .map(|k| {
                let t = t0 + k as f64 * dt;
                DiscreteDiffeo::from_fn(grid, |x| f(t, x))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(t0, dt, slices)
    }

    /// Lagrangian flow `γ_t = u ∘ γ`, `γ(0) = id`, of the solution of the
    /// (generalized) equation started from `u0`. Both are advanced together
    /// by RK4 with `substeps` steps per slice. Returns the path and the
    /// solution at the slice times.
    pub fn from_flow(
        u0: &FieldState,
        params: &CHParams,
        t_final: f64,
        m: usize,
        substeps: usize,
    ) -> Result<(Self, Vec<FieldState>)> {
        let grid = *u0.grid();
        let dt = t_final / m as f64;
        check_steps(m, dt)?;
        if substeps == 0 {
            return Err(Error::InvalidArgument("substeps must be at least 1".into()));
        }
        let h = dt / substeps as f64;
        let nodes = grid.nodes();
        let flow = |u: &FieldState, d: &[f64]| -> Result<(FieldState, Vec<f64>)> {
            let ut = gch_rhs(u, params)?;
            let interp = TrigInterpolant::new(&grid, u.values());
            let dt = nodes.iter().zip(d).map(|(x, d)| interp.eval(x + d)).collect();
            Ok((ut, dt))
        };
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + s * b).collect() };

        let mut u = u0.clone();
        let mut d = vec![0.0; grid.n()];
        let mut slices = vec![DiscreteDiffeo::identity(grid)];
        let mut states = vec![u.clone()];
        for k in 0..m {
            for _ in 0..substeps {
                let (k1u, k1d) = flow(&u, &d)?;
                let u2 = u.with_values(axpy(u.values(), 0.5 * h, k1u.values()))?;
                let (k2u, k2d) = flow(&u2, &axpy(&d, 0.5 * h, &k1d))?;
                let u3 = u.with_values(axpy(u.values(), 0.5 * h, k2u.values()))?;
                let (k3u, k3d) = flow(&u3, &axpy(&d, 0.5 * h, &k2d))?;
                let u4 = u.with_values(axpy(u.values(), h, k3u.values()))?;
                let (k4u, k4d) = flow(&u4, &axpy(&d, h, &k3d))?;
                let combine = |y: &[f64], a: &[f64], b: &[f64], c: &[f64], e: &[f64]| -> Vec<f64> {
                    (0..y.len())
                        .map(|j| y[j] + h / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + e[j]))
                        .collect()
                };
                let next = combine(u.values(), k1u.values(), k2u.values(), k3u.values(), k4u.values());
                d = combine(&d, &k1d, &k2d, &k3d, &k4d);
                u = u.with_values(next)?;
            }
            let t = u0.time + (k + 1) as f64 * dt;
            u.time = t;
            slices.push(DiscreteDiffeo::from_displacement(grid, d.clone())?);
            states.push(u.clone());
        }
        Ok((Self::new(u0.time, dt, slices)?, states))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Number of time steps.
    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.steps() as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn slice(&self, k: usize) -> &DiscreteDiffeo {
        &self.slices[k]
    }

    pub fn slices(&self) -> &[DiscreteDiffeo] {
        &self.slices
    }

    /// `γ_t(t_k, x_j)`.
    pub fn velocity(&self, k: usize) -> Result<Vec<f64>> {
        let series: Vec<&[f64]> = self.slices.iter().map(|s| s.displacement()).collect();
        time_derivative(&series, k, self.dt)
    }

    /// Every slice evaluated with the given interpolation.
    pub fn with_interpolation(&self, method: Interpolation) -> Result<Self> {
        let slices = self
            .slices
            .iter()
            .map(|s| s.clone().with_interpolation(method))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.t0, self.dt, slices)
    }

    /// `γ(t, ·) ∘ ψ` for a fixed `ψ`.
    pub fn right_compose(&self, psi: &DiscreteDiffeo) -> Result<Self> {
        let slices = self.slices.iter().map(|s| compose(s, psi)).collect::<Result<Vec<_>>>()?;
        Self::new(self.t0, self.dt, slices)
    }

    /// `γ + ε φ`.
    pub fn perturbed(&self, pert: &Perturbation, eps: f64) -> Result<Self> {
        self.check_compatible(pert)?;
        let slices = self
            .slices
            .iter()
            .zip(&pert.slices)
            .map(|(s, phi)| {
                let disp = s.displacement().iter().zip(phi).map(|(d, p)| d + eps * p).collect();
                DiscreteDiffeo::with_method(self.grid, disp, s.interpolation())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.t0, self.dt, slices)
    }

    /// Every `stride`-th slice.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        let slices = subsample(&self.slices, stride)?;
        Self::new(self.t0, self.dt * stride as f64, slices)
    }

    pub(crate) fn check_compatible(&self, pert: &Perturbation) -> Result<()> {
        if pert.grid != self.grid {
            return Err(Error::GridMismatch("path and perturbation"));
        }
        if pert.slices.len() != self.slices.len() {
            return Err(Error::LengthMismatch {
                context: "perturbation slices",
                expected: self.slices.len(),
                got: pert.slices.len(),
            });
        }
        let scale = self.dt.abs().max(pert.dt.abs());
        if (pert.dt - self.dt).abs() > 1e-12 * scale || (pert.t0 - self.t0).abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidArgument("path and perturbation use different time grids".into()));
        }
        Ok(())
    }
}

fn subsample<T: Clone>(items: &[T], stride: usize) -> Result<Vec<T>> {
    if stride == 0 || !(items.len() - 1).is_multiple_of(stride) {
        return Err(Error::InvalidArgument(format!(
            "cannot take every {stride}-th of {} steps",
            items.len() - 1
        )));
    }
    Ok(items.iter().step_by(stride).cloned().collect())
}

/// Displacement field `φ(t_k, x_j)` vanishing at both ends of the path.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    grid: Grid1D,
    t0: f64,
    dt: f64,
    slices: Vec<Vec<f64>>,
}

impl Perturbation {
    pub fn new(grid: Grid1D, t0: f64, dt: f64, slices: Vec<Vec<f64>>) -> Result<Self> {
        check_steps(slices.len().saturating_sub(1), dt)?;
        for s in &slices {
            if s.len() != grid.n() {
                return Err(Error::LengthMismatch {
                    context: "perturbation slice",
                    expected: grid.n(),
                    got: s.len(),
                });
            }
            crate::spectral::check_finite(s, "perturbation")?;
        }
        for end in [0, slices.len() - 1] {
            if slices[end].iter().any(|v| *v != 0.0) {
                return Err(Error::Constraint(format!(
                    "perturbation must vanish at both ends of the path; slice {end} does not"
                )));
            }
        }
        Ok(Self { grid, t0, dt, slices })
    }

    /// `φ(t, x) = sin^power(π (t − t0)/(t1 − t0)) f(t, x)`, exactly zero at
    /// both ends. Higher powers make `φ` vanish to higher order there.
    pub fn enveloped(
        grid: Grid1D,
        t0: f64,
        t1: f64,
        m: usize,
        power: i32,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let dt = (t1 - t0) / m as f64;
        check_steps(m, dt)?;
        let slices = (0..=m)
            .map(|k| {
                if k == 0 || k == m {
                    return vec![0.0; grid.n()];
                }
                let t = t0 + k as f64 * dt;
                let env = (PI * k as f64 / m as f64).sin().powi(power);
                grid.sample(|x| env * f(t, x))
            })
            .collect();
        Self::new(grid, t0, dt, slices)
    }

    pub fn zero_like(path: &DiffeoPath) -> Self {
        Self {
            grid: path.grid,
            t0: path.t0,
            dt: path.dt,
            slices: vec![vec![0.0; path.grid.n()]; path.slices.len()],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn steps(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        &self.slices[k]
    }

    /// `φ_t(t_k, x_j)`.
    pub fn rate(&self, k: usize) -> Result<Vec<f64>> {
        let series: Vec<&[f64]> = self.slices.iter().map(|s| s.as_slice()).collect();
        time_derivative(&series, k, self.dt)
    }

    pub fn subsample(&self, stride: usize) -> Result<Self> {
        Self::new(self.grid, self.t0, self.dt * stride as f64, subsample(&self.slices, stride)?)
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.iter().all(|v| *v == 0.0))
    }
}
