//! Orientation-preserving diffeomorphisms of the circle stored as periodic
//! displacements `d(x) = γ(x) − x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{check_finite, Grid1D, Spectrum, TrigInterpolant};

/// How a diffeomorphism is evaluated between grid nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Trigonometric interpolation of the displacement.
    #[default]
    Spectral,
    /// Slope-limited periodic cubic Hermite interpolation of `γ`.
    MonotoneCubic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDiffeo {
    grid: Grid1D,
    disp: Vec<f64>,
    method: Interpolation,
}

impl DiscreteDiffeo {
    pub fn identity(grid: Grid1D) -> Self {
        Self {
            grid,
            disp: vec![0.0; grid.n()],
            method: Interpolation::Spectral,
        }
    }

    pub fn from_displacement(grid: Grid1D, disp: Vec<f64>) -> Result<Self> {
        Self::with_method(grid, disp, Interpolation::Spectral)
    }

    pub fn from_fn(grid: Grid1D, displacement: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_displacement(grid, grid.sample(displacement))
    }

    pub fn with_method(grid: Grid1D, disp: Vec<f64>, method: Interpolation) -> Result<Self> {
        if disp.len() != grid.n() {
            return Err(Error::LengthMismatch {
                context: "diffeomorphism displacement",
                expected: grid.n(),
                got: disp.len(),
            });
        }
        check_finite(&disp, "diffeomorphism displacement")?;
        let d = Self { grid, disp, method };
        d.check_monotone()?;
        Ok(d)
    }

    /// Same map, different off-grid evaluation.
    pub fn with_interpolation(mut self, method: Interpolation) -> Result<Self> {
        self.method = method;
        self.check_monotone()?;
        Ok(self)
    }

    fn check_monotone(&self) -> Result<()> {
        let n = self.grid.n();
        let dx = self.grid.dx();
        for j in 0..n {
            let next = if j + 1 == n {
                self.disp[0] + self.grid.length()
            } else {
                self.disp[j + 1] + dx
            };
            let slope = (next - self.disp[j]) / dx;
            if !(slope > 0.0) {
                return Err(Error::NotMonotone { index: j, slope });
            }
        }
        if self.method == Interpolation::Spectral {
            let slope = Spectrum::of(self.grid, &self.disp).derivative(1);
            if let Some((index, s)) = slope.iter().map(|s| 1.0 + s).enumerate().find(|(_, s)| !(*s > 0.0)) {
                return Err(Error::NotMonotone { index, slope: s });
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn displacement(&self) -> &[f64] {
        &self.disp
    }

    pub fn interpolation(&self) -> Interpolation {
        self.method
    }

    /// `γ(x_j)`.
    pub fn values(&self) -> Vec<f64> {
        self.disp.iter().enumerate().map(|(j, d)| self.grid.node(j) + d).collect()
    }

    pub fn evaluator(&self) -> Evaluator {
        match self.method {
            Interpolation::Spectral => Evaluator::Spectral(TrigInterpolant::new(&self.grid, &self.disp)),
            Interpolation::MonotoneCubic => Evaluator::Cubic(Pchip::new(&self.grid, &self.disp)),
        }
    }

    /// `γ(x)` at an arbitrary point.
    pub fn eval(&self, x: f64) -> f64 {
        x + self.evaluator().displacement(x)
    }

    /// Offsets `y_j − x_j` of the points with `γ(y_j) = x_j`.
    pub(crate) fn inverse_offsets(&self) -> Result<Vec<f64>> {
        let ev = self.evaluator();
        let mut out = Vec::with_capacity(self.grid.n());
        for j in 0..self.grid.n() {
            let x = self.grid.node(j);
            out.push(solve_offset(&ev, x, -self.disp[j], j)?);
        }
        Ok(out)
    }
}

/// Off-grid evaluator of a [`DiscreteDiffeo`].
#[derive(Clone, Debug)]
pub enum Evaluator {
    Spectral(TrigInterpolant),
    Cubic(Pchip),
}

impl Evaluator {
    pub fn displacement(&self, x: f64) -> f64 {
        match self {
            Evaluator::Spectral(t) => t.eval(x),
            Evaluator::Cubic(c) => c.eval(x) - x,
        }
    }

    /// `γ'(x)`.
    pub fn slope(&self, x: f64) -> f64 {
        match self {
            Evaluator::Spectral(t) => 1.0 + t.eval_derivative(x, 1),
            Evaluator::Cubic(c) => c.slope(x),
        }
    }
}

// Newton iteration for `e + d(x + e) = 0`, continued until the update stops
// shrinking so the offset is accurate to rounding.
fn solve_offset(ev: &Evaluator, x: f64, guess: f64, index: usize) -> Result<f64> {
    let mut e = guess;
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let slope = ev.slope(x + e);
        if !(slope > 0.0) {
            return Err(Error::NotMonotone { index, slope });
        }
        let step = (e + ev.displacement(x + e)) / slope;
        e -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) || step.abs() >= last_step {
            break;
        }
        last_step = step.abs();
    }
    let residual = (e + ev.displacement(x + e)).abs();
    if !(residual <= 1e-12) {
        return Err(Error::Inconsistent {
            context: "diffeomorphism inversion",
            gap: residual,
            tolerance: 1e-12,
        });
    }
    Ok(e)
}

/// `a ∘ b`.
pub fn compose(a: &DiscreteDiffeo, b: &DiscreteDiffeo) -> Result<DiscreteDiffeo> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch("compose"));
    }
    let ev = a.evaluator();
    let disp = b
        .disp
        .iter()
        .enumerate()
        .map(|(j, &db)| db + ev.displacement(a.grid.node(j) + db))
        .collect();
    DiscreteDiffeo::with_method(a.grid, disp, a.method)
}

/// `a⁻¹`, by Newton's method at every node.
pub fn invert(a: &DiscreteDiffeo) -> Result<DiscreteDiffeo> {
    DiscreteDiffeo::with_method(a.grid, a.inverse_offsets()?, a.method)
}

/// Periodic monotone cubic Hermite interpolant of `γ` with harmonic-mean
/// slopes.
#[derive(Clone, Debug)]
pub struct Pchip {
    length: f64,
    dx: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    fn new(grid: &Grid1D, disp: &[f64]) -> Self {
        let n = grid.n();
        let dx = grid.dx();
        let values: Vec<f64> = disp.iter().enumerate().map(|(j, d)| grid.node(j) + d).collect();
        let secant = |j: usize| {
            let next = if j + 1 == n { values[0] + grid.length() } else { values[j + 1] };
            (next - values[j]) / dx
        };
        let slopes = (0..n)
            .map(|j| {
                let (a, b) = (secant((j + n - 1) % n), secant(j));
                if a > 0.0 && b > 0.0 {
                    2.0 / (1.0 / a + 1.0 / b)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            length: grid.length(),
            dx,
            values,
            slopes,
        }
    }

    // Cell index, local coordinate in [0, 1), and the number of periods
    // to add back.
    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.values.len();
        let periods = (x / self.length).floor();
        let r = x - periods * self.length;
        let j = ((r / self.dx).floor() as usize).min(n - 1);
        let s = (r - j as f64 * self.dx) / self.dx;
        (j, s, periods)
    }

    fn ends(&self, j: usize) -> (f64, f64, f64, f64) {
        let n = self.values.len();
        let (y1, m1) = if j + 1 == n {
            (self.values[0] + self.length, self.slopes[0])
        } else {
            (self.values[j + 1], self.slopes[j + 1])
        };
        (self.values[j], y1, self.slopes[j], m1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (j, s, periods) = self.locate(x);
        let (y0, y1, m0, m1) = self.ends(j);
        let h = self.dx;
        let (s2, s3) = (s * s, s * s * s);
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1;
        v + periods * self.length
    }

    pub fn slope(&self, x: f64) -> f64 {
        let (j, s, _) = self.locate(x);
        let (y0, y1, m0, m1) = self.ends(j);
        let h = self.dx;
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * y0 + (-6.0 * s2 + 6.0 * s) * y1) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (3.0 * s2 - 2.0 * s) * m1
    }
}
