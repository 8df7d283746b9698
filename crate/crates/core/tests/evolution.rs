use std::f64::consts::PI;

use chlab::dynamics::*;
use chlab::initial::{mollified_peakons, InitialCondition};
use chlab::peakon::{simulate_peakons_recorded, Domain, PeakonState};
use chlab::spectral::{deriv, helmholtz_invert, max_abs_diff};
use chlab::{FieldState, Grid1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(grid: Grid1D, rng: &mut ChaCha8Rng) -> FieldState {
    let k0 = 2.0 * PI / grid.length();
    let coeffs: Vec<(f64, f64)> = (1..=12)
        .map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
        .collect();
    FieldState::from_fn(grid, 0.0, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, (a, b))| {
                let k = k0 * (j + 1) as f64;
                (a * (k * x).cos() + b * (k * x).sin()) / (j + 1) as f64
            })
            .sum()
    })
}

#[test]
fn generalized_rhs_reduces_to_classic() {
    let g = Grid1D::new(40.0, 256).unwrap();
    let kappa = 0.35;
    let classic = CHParams::classic(g, kappa);
    let general = CHParams::generalized(g, vec![kappa; 256], None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let u = random_field(g, &mut rng);
        let a = ch_rhs(&u, &classic).unwrap();
        let b = gch_rhs(&u, &general).unwrap();
        assert!(max_abs_diff(a.values(), b.values()) <= 1e-13);
    }
}

#[test]
fn linearized_rhs_of_a_small_cosine() {
    let g = Grid1D::new(2.0 * PI, 64).unwrap();
    let a = 1e-6;
    let u = FieldState::from_fn(g, 0.0, |x| a * x.cos());
    let ut = ch_rhs(&u, &CHParams::classic(g, 0.5)).unwrap();
    let expect = g.sample(|x| 0.5 * a * x.sin());
    assert!(max_abs_diff(ut.values(), &expect) <= 1e-4 * 0.5 * a);
}

#[test]
fn generalized_rhs_of_constant_state() {
    let g = Grid1D::new(2.0 * PI, 64).unwrap();
    let f = CHParams::generalized(g, g.sample(|x| x.sin()), Some(g.sample(|x| x.cos()))).unwrap();
    let c = 0.8;
    let ut = gch_rhs(&FieldState::constant(g, c, 0.0), &f).unwrap();
    assert!(max_abs_diff(ut.values(), &g.sample(|x| -0.5 * c * x.cos())) < 1e-14);
    // same thing through the Helmholtz inverse of -c F'
    let direct = helmholtz_invert(&FieldState::from_fn(g, 0.0, |x| -c * x.cos())).unwrap();
    assert!(max_abs_diff(ut.values(), direct.values()) < 1e-14);
    assert_eq!(gch_rhs(&FieldState::zeros(g, 0.0), &f).unwrap().max_abs(), 0.0);
}

#[test]
fn mollified_peakon_approaches_travelling_wave() {
    // away from the crest u_t + c u_x -> 0 as the mollifier narrows
    let errors: Vec<f64> = [1024, 2048, 4096]
        .iter()
        .map(|&n| {
            let g = Grid1D::new(40.0, n).unwrap();
            let u = mollified_peakons(&g, &[20.0], &[1.0], 4.0 * g.dx()).unwrap();
            let ut = ch_rhs(&u, &CHParams::classic(g, 0.0)).unwrap();
            let ux = deriv(&u, 1).unwrap();
            (0..n)
                .filter(|&j| (g.node(j) - 20.0).abs() > 1.0)
                .map(|j| (ut.values()[j] + ux.values()[j]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errors[2] < 1e-2, "{errors:?}");
    assert!(errors[0] / errors[1] > 1.8 && errors[1] / errors[2] > 1.8, "{errors:?}");
}

#[test]
fn smooth_bump_conserves_invariants() {
    let g = Grid1D::new(40.0, 256).unwrap();
    let u0 = InitialCondition::Gaussian {
        amplitude: 0.5,
        center: 20.0,
        width: 3.0,
    }
    .sample(&g)
    .unwrap();
    let sim = simulate(&u0, &CHParams::classic(g, 0.0), 1e-3, 10.0, 500).unwrap();
    assert!(sim.completed());
    let drift = |f: fn(&DiagnosticRecord) -> Option<f64>| max_relative_drift(&sim.diagnostics, f).unwrap();
    assert!(drift(|r| Some(r.m0)) <= 1e-12);
    assert!(drift(|r| Some(r.energy)) <= 1e-8);
    assert!(drift(|r| r.h3) <= 1e-6);
}

#[test]
fn evolution_commutes_with_grid_shifts() {
    let g = Grid1D::new(40.0, 128).unwrap();
    let u0 = InitialCondition::Gaussian {
        amplitude: 0.6,
        center: 15.0,
        width: 2.5,
    }
    .sample(&g)
    .unwrap();
    let p = CHParams::classic(g, 0.2);
    let a = simulate(&u0, &p, 2e-3, 1.0, 500).unwrap();
    let b = simulate(&u0.shifted(17), &p, 2e-3, 1.0, 500).unwrap();
    let shifted = a.last().shifted(17);
    assert!(max_abs_diff(shifted.values(), b.last().values()) <= 1e-10);
}

#[test]
fn constant_state_stays_constant() {
    let g = Grid1D::new(40.0, 64).unwrap();
    let u0 = FieldState::constant(g, 0.7, 0.0);
    let sim = simulate(&u0, &CHParams::classic(g, 0.4), 1e-2, 1.0, 10).unwrap();
    assert!(sim.trajectory.iter().all(|u| u.values() == u0.values()));
}

fn breaking_time(amplitude: f64) -> Option<f64> {
    let g = Grid1D::new(2.0 * PI, 1024).unwrap();
    let u0 = FieldState::from_fn(g, 0.0, |x| -amplitude * x.sin());
    let sim = simulate_until(&u0, &CHParams::classic(g, 0.0), 1e-3, 3.0, 1, Some(-10.0)).unwrap();
    detect_breaking(&sim.diagnostics, -10.0)
}

#[test]
fn steeper_data_breaks_sooner() {
    let times: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&a| breaking_time(a).unwrap()).collect();
    assert!(times[0] > times[1] && times[1] > times[2], "{times:?}");
}

#[test]
fn gentle_or_sentinel_runs_do_not_break() {
    let g = Grid1D::new(40.0, 128).unwrap();
    let u0 = FieldState::from_fn(g, 0.0, |x| 0.1 * (2.0 * PI * x / 40.0).sin());
    let sim = simulate(&u0, &CHParams::classic(g, 0.0), 1e-2, 1.0, 1).unwrap();
    assert_eq!(detect_breaking(&sim.diagnostics, -10.0), None);
    assert_eq!(detect_breaking(&sim.diagnostics, f64::NEG_INFINITY), None);
    assert_eq!(detect_breaking(&[], -1.0), None);
}

#[test]
fn dispersion_speed_examples() {
    assert_eq!(dispersion_speed(0.0, 3.0), 0.0);
    assert_eq!(dispersion_speed(0.5, 1.0), 0.5);
    let speeds: Vec<f64> = (0..20).map(|k| dispersion_speed(0.5, k as f64)).collect();
    assert!(speeds.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn mollified_pair_follows_peakon_ode() {
    let l = 40.0;
    let g = Grid1D::new(l, 1024).unwrap();
    let (q, p) = (vec![8.0, 14.0], vec![0.3, 0.15]);
    let dt = 2e-3;
    let u0 = mollified_peakons(&g, &q, &p, 4.0 * g.dx()).unwrap();
    let sim = simulate(&u0, &CHParams::classic(g, 0.0), dt, 5.0, 50).unwrap();
    let s0 = PeakonState::new(q, p, 0.0, Domain::Periodic { length: l }).unwrap();
    let run = simulate_peakons_recorded(&s0, dt, 5.0, 50).unwrap();
    assert_eq!(sim.trajectory.len(), run.trajectory.len());
    let mut worst: f64 = 0.0;
    for (u, s) in sim.trajectory.iter().zip(&run.trajectory) {
        for &qi in &s.q {
            let x = locate_peak(u, qi, 3.0).unwrap();
            let mut d = x - qi;
            d -= l * (d / l).round();
            worst = worst.max(d.abs());
        }
    }
    assert!(worst <= 2.0 * g.dx(), "worst gap {} dx", worst / g.dx());
}
