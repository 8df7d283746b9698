//! Periodic grids, Fourier differentiation and the Helmholtz operator `1 - d²/dx²`.
//!
//! All transforms are plain complex FFTs of real data. FFT plans are cached per
//! thread, so every function here is safe to call from worker threads without
//! coordination.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, L)` with `n` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    length: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n must be even and >= 8, got {n}")));
        }
        Ok(Self { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed integer mode number of FFT bin `j`, in `-n/2+1 ..= n/2`.
    pub fn mode(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Wavenumber `2 pi mode / L` of FFT bin `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode(j) as f64 / self.length
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.n / 2
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|j| f(self.node(j))).collect()
    }

    /// Reduce `x` into `[0, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let r = x.rem_euclid(self.length);
        if r >= self.length {
            0.0
        } else {
            r
        }
    }
}

/// Real field samples on a grid at time `time`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    grid: Grid1D,
    values: Vec<f64>,
    pub time: f64,
}

impl FieldState {
    pub fn new(grid: Grid1D, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                context: "FieldState::new",
                expected: grid.n(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn(grid: Grid1D, time: f64, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: grid.sample(f),
            grid,
            time,
        }
    }

    pub fn constant(grid: Grid1D, c: f64, time: f64) -> Self {
        Self {
            values: vec![c; grid.n()],
            grid,
            time,
        }
    }

    pub fn zeros(grid: Grid1D, time: f64) -> Self {
        Self::constant(grid, 0.0, time)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same grid and time, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid, values, self.time)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            time: self.time,
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &FieldState, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("FieldState::zip_with"));
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            time: self.time,
        })
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        check_finite(&self.values, context)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    /// Circular shift by `shift` nodes: `out[j] = values[j - shift]`.
    pub fn shifted(&self, shift: usize) -> Self {
        let n = self.values.len();
        let s = shift % n;
        let mut values = Vec::with_capacity(n);
        values.extend_from_slice(&self.values[n - s..]);
        values.extend_from_slice(&self.values[..n - s]);
        Self {
            grid: self.grid,
            values,
            time: self.time,
        }
    }
}

pub(crate) fn check_finite(values: &[f64], context: &'static str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { context, index }),
        None => Ok(()),
    }
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

type PlanCache = HashMap<usize, Arc<Plans>>;

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, PlanCache)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> Arc<Plans> {
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        if let Some(p) = cache.get(&n) {
            return p.clone();
        }
        let p = Arc::new(Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        });
        cache.insert(n, p.clone());
        p
    })
}

/// Unnormalized forward DFT of real samples.
pub fn forward(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plans(values.len()).forward.process(&mut buf);
    buf
}

/// Inverse DFT (normalized by `1/n`), keeping the real part.
pub fn inverse(mut coeffs: Vec<Complex64>) -> Vec<f64> {
    let n = coeffs.len();
    plans(n).inverse.process(&mut coeffs);
    let scale = 1.0 / n as f64;
    coeffs.into_iter().map(|c| c.re * scale).collect()
}

/// Fourier coefficients of a field together with its grid.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid1D,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(grid: Grid1D, values: &[f64]) -> Self {
        Self {
            grid,
            coeffs: forward(values),
        }
    }

    pub fn from_field(f: &FieldState) -> Self {
        Self::of(*f.grid(), f.values())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Zero every mode with `|mode| > fraction * n/2`. `fraction = 2/3` is the
    /// classical dealiasing rule for quadratic products.
    pub fn truncate(&mut self, fraction: f64) {
        let cutoff = fraction * (self.grid.n() / 2) as f64;
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            if self.grid.mode(j).unsigned_abs() as f64 > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Multiply mode `j` by `mult(j)`.
    pub fn apply(&mut self, mult: impl Fn(usize) -> Complex64) {
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            *c *= mult(j);
        }
    }

    pub fn to_values(&self) -> Vec<f64> {
        inverse(self.coeffs.clone())
    }

    /// Samples of the `order`-th derivative.
    pub fn derivative(&self, order: u32) -> Vec<f64> {
        if order == 0 {
            return self.to_values();
        }
        let grid = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| c * derivative_multiplier(&grid, j, order))
            .collect();
        inverse(coeffs)
    }

    pub fn interpolant(&self) -> TrigInterpolant {
        TrigInterpolant::from_spectrum(self)
    }
}

/// `(i k_j)^order`, with the Nyquist bin dropped for odd orders so odd
/// derivatives stay real and skew-symmetric.
pub fn derivative_multiplier(grid: &Grid1D, j: usize, order: u32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if grid.is_nyquist(j) && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, grid.wavenumber(j)).powu(order)
}

/// Spectral derivative of order 1..=4.
pub fn deriv(f: &FieldState, order: u32) -> Result<FieldState> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "derivative order must be in 1..=4, got {order}"
        )));
    }
    f.check_finite("deriv")?;
    let values = Spectrum::from_field(f).derivative(order);
    f.with_values(values)
}

/// `m = u - u_xx`.
pub fn helmholtz_map(u: &FieldState) -> Result<FieldState> {
    u.check_finite("helmholtz_map")?;
    let mut s = Spectrum::from_field(u);
    let grid = *u.grid();
    s.apply(|j| {
        let k = grid.wavenumber(j);
        Complex64::new(1.0 + k * k, 0.0)
    });
    u.with_values(s.to_values())
}

/// Inverse of `1 - d²/dx²`, the Fourier multiplier `1 / (1 + k²)`.
pub fn helmholtz_invert(m: &FieldState) -> Result<FieldState> {
    m.check_finite("helmholtz_invert")?;
    m.with_values(helmholtz_invert_values(m.grid(), m.values()))
}

pub(crate) fn helmholtz_invert_values(grid: &Grid1D, values: &[f64]) -> Vec<f64> {
    let mut s = Spectrum::of(*grid, values);
    s.apply(|j| {
        let k = grid.wavenumber(j);
        Complex64::new(1.0 / (1.0 + k * k), 0.0)
    });
    s.to_values()
}

/// Trapezoidal quadrature over one period.
pub fn integrate(f: &FieldState) -> Result<f64> {
    f.check_finite("integrate")?;
    Ok(integrate_values(f.grid(), f.values()))
}

pub fn integrate_values(grid: &Grid1D, values: &[f64]) -> f64 {
    grid.dx() * values.iter().sum::<f64>()
}

/// Band-limited trigonometric interpolant of periodic samples, evaluable at
/// arbitrary points. Reproduces the samples exactly at the nodes.
#[derive(Clone, Debug)]
pub struct TrigInterpolant {
    length: f64,
    n: usize,
    // Normalized coefficients for modes 0..=n/2; Nyquist halved into a cosine.
    half: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(grid: &Grid1D, values: &[f64]) -> Self {
        Self::from_spectrum(&Spectrum::of(*grid, values))
    }

    pub fn from_spectrum(s: &Spectrum) -> Self {
        let n = s.grid.n();
        let scale = 1.0 / n as f64;
        let half = (0..=n / 2)
            .map(|j| {
                let c = s.coeffs[j] * scale;
                if j == 0 || j == n / 2 {
                    // real parts only; the Nyquist bin becomes c_N cos(k_N x)
                    Complex64::new(c.re, 0.0)
                } else {
                    c * 2.0
                }
            })
            .collect();
        Self {
            length: s.grid.length(),
            n,
            half,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivative(x, 0)
    }

    /// `order`-th derivative of the interpolant at `x`. The Nyquist cosine is
    /// dropped for odd orders, matching [`derivative_multiplier`] at the nodes.
    pub fn eval_derivative(&self, x: f64, order: u32) -> f64 {
        let base = 2.0 * PI / self.length;
        let rot = Complex64::from_polar(1.0, base * x);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = if order == 0 { self.half[0].re } else { 0.0 };
        let top = self.n / 2;
        for j in 1..=top {
            z *= rot;
            if j % 32 == 0 {
                z = Complex64::from_polar(1.0, base * j as f64 * x);
            }
            if j == top && order % 2 == 1 {
                break;
            }
            let mult = Complex64::new(0.0, base * j as f64).powu(order);
            acc += (self.half[j] * mult * z).re;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64, n: usize) -> Grid1D {
        Grid1D::new(l, n).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(1.0, 6).is_err());
        assert!(Grid1D::new(1.0, 9).is_err());
        assert!(Grid1D::new(0.0, 16).is_err());
        assert!(Grid1D::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn derivative_of_fundamental_mode() {
        let l = 3.0;
        let g = grid(l, 64);
        let k = 2.0 * PI / l;
        let f = FieldState::from_fn(g, 0.0, |x| (k * x).sin());
        let df = deriv(&f, 1).unwrap();
        let exact = g.sample(|x| k * (k * x).cos());
        assert!(max_abs_diff(df.values(), &exact) <= 1e-12 * k);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid(5.0, 32);
        let f = FieldState::constant(g, 2.5, 1.0);
        for order in 1..=4 {
            let d = deriv(&f, order).unwrap();
            assert!(d.max_abs() < 1e-13);
            assert_eq!(d.time, 1.0);
        }
    }

    #[test]
    fn non_finite_input_reports_index() {
        let g = grid(1.0, 16);
        let mut v = vec![0.0; 16];
        v[5] = f64::NAN;
        let f = FieldState::new(g, v, 0.0).unwrap();
        match deriv(&f, 1) {
            Err(Error::NonFinite { index, .. }) => assert_eq!(index, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(deriv(&FieldState::zeros(g, 0.0), 5).is_err());
    }

    #[test]
    fn helmholtz_on_eigenfunction_and_constant() {
        let l = 2.0 * PI;
        let g = grid(l, 32);
        let u = FieldState::from_fn(g, 0.0, |x| x.cos());
        let m = helmholtz_map(&u).unwrap();
        assert!(max_abs_diff(m.values(), &g.sample(|x| 2.0 * x.cos())) < 1e-13);
        let back = helmholtz_invert(&m).unwrap();
        assert!(max_abs_diff(back.values(), u.values()) < 1e-14);
        let c = FieldState::constant(g, 0.7, 0.0);
        assert!(max_abs_diff(helmholtz_map(&c).unwrap().values(), c.values()) < 1e-14);
        assert!(max_abs_diff(helmholtz_invert(&c).unwrap().values(), c.values()) < 1e-14);
    }

    #[test]
    fn periodic_green_function_from_spike() {
        // (1 - d²)G = delta on a box of length L has the closed form
        // G(d) = cosh(d - L/2) / (2 sinh(L/2)) for d in [0, L].
        let l = 8.0;
        let g = grid(l, 1024);
        let mut v = vec![0.0; g.n()];
        v[0] = 1.0 / g.dx();
        let m = FieldState::new(g, v, 0.0).unwrap();
        let green = helmholtz_invert(&m).unwrap();
        let closed = |d: f64| (d - l / 2.0).cosh() / (2.0 * (l / 2.0).sinh());
        // resolved points: at least one unit away from the spike
        let skip = (1.0 / g.dx()).ceil() as usize;
        for j in (skip..g.n() - skip).step_by(7) {
            let exact = closed(g.node(j));
            let rel = (green.values()[j] - exact).abs() / exact;
            assert!(rel <= 1e-6, "j = {j}: rel err {rel:e}");
        }
    }

    #[test]
    fn trapezoid_rule() {
        let g = grid(2.0 * PI, 32);
        let c = FieldState::constant(g, 1.5, 0.0);
        assert!((integrate(&c).unwrap() - 3.0 * PI).abs() < 1e-13);
        let s = FieldState::from_fn(g, 0.0, |x| x.sin());
        assert!(integrate(&s).unwrap().abs() <= 1e-14);
        let s2 = FieldState::from_fn(g, 0.0, |x| x.sin().powi(2));
        assert!((integrate(&s2).unwrap() - PI).abs() <= 1e-12);
    }

    #[test]
    fn spectral_convergence_of_exp_sin() {
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| {
                let g = grid(2.0 * PI, n);
                let f = FieldState::from_fn(g, 0.0, |x| x.sin().exp());
                let d = deriv(&f, 1).unwrap();
                max_abs_diff(d.values(), &g.sample(|x| x.cos() * x.sin().exp()))
            })
            .collect();
        // faster than any fixed power: the observed order itself increases
        let p1 = (errs[0] / errs[1]).log2();
        assert!(p1 > 8.0, "{errs:?}");
        assert!(errs[2] < 1e-13, "{errs:?}");
    }

    #[test]
    fn shift_moves_samples_right() {
        let g = grid(1.0, 8);
        let f = FieldState::new(g, (0..8).map(|j| j as f64).collect(), 0.0).unwrap();
        assert_eq!(f.shifted(2).values(), &[6.0, 7.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn interpolant_matches_nodes_and_derivatives() {
        let g = grid(2.0 * PI, 32);
        let vals = g.sample(|x| (x.sin() * 0.3).exp() + 0.2 * (3.0 * x).cos());
        let it = TrigInterpolant::new(&g, &vals);
        for (j, v) in vals.iter().enumerate() {
            assert!((it.eval(g.node(j)) - v).abs() < 1e-13);
        }
        let s = Spectrum::of(g, &vals);
        let d1 = s.derivative(1);
        let d2 = s.derivative(2);
        for j in 0..g.n() {
            assert!((it.eval_derivative(g.node(j), 1) - d1[j]).abs() < 1e-12);
            assert!((it.eval_derivative(g.node(j), 2) - d2[j]).abs() < 1e-11);
        }
        let x: f64 = 1.2345;
        let exact = (x.sin() * 0.3).exp() + 0.2 * (3.0 * x).cos();
        assert!((it.eval(x) - exact).abs() < 1e-12);
    }
}
