//! Named initial conditions and coefficient profiles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::CHParams;
use crate::error::{Error, Result};
use crate::spectral::{inverse, FieldState, Grid1D};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Constant {
        value: f64,
    },
    /// Periodized `A exp(-((x - c)/w)²)`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `A sin(2π mode x / L + phase)`.
    Sine {
        amplitude: f64,
        mode: u32,
        #[serde(default)]
        phase: f64,
    },
    /// Periodic peakons `Σ 2 p_i G(x - q_i)` convolved with a Gaussian of
    /// standard deviation `width`.
    MollifiedPeakons {
        positions: Vec<f64>,
        momenta: Vec<f64>,
        width: f64,
    },
}

impl InitialCondition {
    pub fn sample(&self, grid: &Grid1D) -> Result<FieldState> {
        let l = grid.length();
        match self {
            InitialCondition::Constant { value } => Ok(FieldState::constant(*grid, *value, 0.0)),
            InitialCondition::Gaussian {
                amplitude,
                center,
                width,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidArgument(format!("gaussian width must be positive, got {width}")));
                }
                Ok(FieldState::from_fn(*grid, 0.0, |x| {
                    (-3..=3)
                        .map(|image| {
                            let d = (x - center - image as f64 * l) / width;
                            amplitude * (-d * d).exp()
                        })
                        .sum()
                }))
            }
            InitialCondition::Sine {
                amplitude,
                mode,
                phase,
            } => {
                let k = 2.0 * PI * *mode as f64 / l;
                Ok(FieldState::from_fn(*grid, 0.0, |x| amplitude * (k * x + phase).sin()))
            }
            InitialCondition::MollifiedPeakons {
                positions,
                momenta,
                width,
            } => mollified_peakons(grid, positions, momenta, *width),
        }
    }
}

/// Periodic peakon train smoothed by a Gaussian kernel, built mode by mode:
/// `c_k = Σ_i 2 p_i e^{-i k q_i} e^{-σ²k²/2} / (L (1 + k²))`.
pub fn mollified_peakons(grid: &Grid1D, positions: &[f64], momenta: &[f64], width: f64) -> Result<FieldState> {
    if positions.len() != momenta.len() || positions.is_empty() {
        return Err(Error::InvalidArgument(
            "peakon positions and momenta must be non-empty and of equal length".into(),
        ));
    }
    if width < 4.0 * grid.dx() {
        return Err(Error::InvalidArgument(format!(
            "mollifier width {width} is below 4 dx = {}",
            4.0 * grid.dx()
        )));
    }
    let n = grid.n();
    let l = grid.length();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|j| {
            let k = grid.wavenumber(j);
            let envelope = (-0.5 * width * width * k * k).exp() / (l * (1.0 + k * k));
            let c: Complex64 = positions
                .iter()
                .zip(momenta)
                .map(|(&q, &p)| Complex64::from_polar(2.0 * p * envelope, -k * q))
                .sum();
            let c = c * n as f64;
            if grid.is_nyquist(j) {
                Complex64::new(c.re, 0.0)
            } else {
                c
            }
        })
        .collect();
    FieldState::new(*grid, inverse(coeffs), 0.0)
}

/// Equation coefficient: constant `κ`, or a sinusoidal `F(x)` with its exact
/// derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Coefficient {
    Constant {
        kappa: f64,
    },
    /// `F(x) = mean + amplitude sin(2π mode x / L + phase)`.
    Sine {
        mean: f64,
        amplitude: f64,
        mode: u32,
        #[serde(default)]
        phase: f64,
    },
}

impl Coefficient {
    pub fn params(&self, grid: &Grid1D) -> Result<CHParams> {
        match *self {
            Coefficient::Constant { kappa } => Ok(CHParams::classic(*grid, kappa)),
            Coefficient::Sine {
                mean,
                amplitude,
                mode,
                phase,
            } => {
                let k = 2.0 * PI * mode as f64 / grid.length();
                CHParams::generalized(
                    *grid,
                    grid.sample(|x| mean + amplitude * (k * x + phase).sin()),
                    Some(grid.sample(|x| amplitude * k * (k * x + phase).cos())),
                )
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peakon::{peakon_field, Domain, PeakonState};
    use crate::spectral::max_abs_diff;

    #[test]
    fn mollified_peakons_converge_to_peakons() {
        let grid = Grid1D::new(40.0, 1024).unwrap();
        let q = vec![10.0, 22.0];
        let p = vec![1.0, 0.5];
        let exact = peakon_field(
            &PeakonState::new(q.clone(), p.clone(), 0.0, Domain::Periodic { length: 40.0 }).unwrap(),
            &grid,
        )
        .unwrap();
        let wide = mollified_peakons(&grid, &q, &p, 0.4).unwrap();
        let narrow = mollified_peakons(&grid, &q, &p, 0.2).unwrap();
        let e_wide = max_abs_diff(wide.values(), exact.values());
        let e_narrow = max_abs_diff(narrow.values(), exact.values());
        assert!(e_narrow < e_wide && e_narrow < 0.2, "{e_narrow} {e_wide}");
        assert!(mollified_peakons(&grid, &q, &p, grid.dx()).is_err());
    }

    #[test]
    fn gaussian_is_periodized() {
        let g = Grid1D::new(40.0, 64).unwrap();
        let ic = InitialCondition::Gaussian {
            amplitude: 1.0,
            center: 0.0,
            width: 3.0,
        };
        let u = ic.sample(&g).unwrap();
        assert!((u.values()[0] - 1.0).abs() < 1e-12);
        // symmetric about the wrapped centre
        for j in 1..32 {
            assert!((u.values()[j] - u.values()[64 - j]).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_coefficient_has_exact_derivative() {
        let g = Grid1D::new(2.0 * PI, 64).unwrap();
        let p = Coefficient::Sine {
            mean: 0.5,
            amplitude: 0.2,
            mode: 1,
            phase: 0.0,
        }
        .params(&g)
        .unwrap();
        assert!(!p.is_classic());
        assert!(max_abs_diff(p.coefficient_derivative(), &g.sample(|x| 0.2 * x.cos())) < 1e-15);
        assert!(Coefficient::Constant { kappa: 0.3 }.params(&g).unwrap().is_classic());
    }
}
