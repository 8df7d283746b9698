//! N-peakon dynamics for `κ = 0`.
//!
//! The field `u(x) = Σ 2 p_i G(x - q_i)` evolves through the canonical system
//! generated by `H = Σ_ij p_i p_j G(q_i - q_j)`, where `G` is the Green's
//! function of `1 - ∂²` on the line or on a periodic box. With this scaling a
//! single line peakon is `u = c e^{-|x - ct|}` with `p = c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{FieldState, Grid1D};

/// Pairwise separations below this are treated as a collision.
pub const COLLISION_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Line,
    Periodic { length: f64 },
}

impl Domain {
    /// Signed separation reduced to `[0, L)` on the box; unchanged on the line.
    fn reduce(&self, x: f64) -> f64 {
        match *self {
            Domain::Line => x,
            Domain::Periodic { length } => x.rem_euclid(length),
        }
    }

    fn distance(&self, x: f64) -> f64 {
        match *self {
            Domain::Line => x.abs(),
            Domain::Periodic { length } => {
                let r = x.rem_euclid(length);
                r.min(length - r)
            }
        }
    }
}

/// Green's function of `1 - ∂²`: `½ e^{-|x|}` on the line,
/// `cosh(|x|_L - L/2) / (2 sinh(L/2))` on a box of length `L`.
pub fn green(x: f64, domain: Domain) -> f64 {
    match domain {
        Domain::Line => 0.5 * (-x.abs()).exp(),
        Domain::Periodic { length } => {
            let half = 0.5 * length;
            let a = half - domain.distance(x);
            // cosh(a) / (2 sinh(half)) without overflow for large boxes
            0.5 * ((a - half).exp() + (-a - half).exp()) / (1.0 - (-2.0 * half).exp())
        }
    }
}

/// `G'(x)`, taking the symmetric value 0 at the kink.
pub fn green_slope(x: f64, domain: Domain) -> f64 {
    match domain {
        Domain::Line => {
            if x == 0.0 {
                0.0
            } else {
                -0.5 * x.signum() * (-x.abs()).exp()
            }
        }
        Domain::Periodic { length } => {
            let r = domain.reduce(x);
            if r == 0.0 {
                return 0.0;
            }
            let half = 0.5 * length;
            let a = r - half;
            0.5 * a.signum() * ((a.abs() - half).exp() - (-a.abs() - half).exp())
                / (1.0 - (-2.0 * half).exp())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakonState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
    pub domain: Domain,
}

impl PeakonState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, t: f64, domain: Domain) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidArgument("need at least one peakon".into()));
        }
        if q.len() != p.len() {
            return Err(Error::LengthMismatch {
                context: "PeakonState::new",
                expected: q.len(),
                got: p.len(),
            });
        }
        if let Domain::Periodic { length } = domain {
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::InvalidArgument(format!("box length must be positive, got {length}")));
            }
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) || !t.is_finite() {
            return Err(Error::InvalidArgument("peakon state must be finite".into()));
        }
        let s = Self { q, p, t, domain };
        s.check_separation()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn total_momentum(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Momenta negated; evolving this forward is evolving the original backward.
    pub fn reversed(&self) -> Self {
        Self {
            q: self.q.clone(),
            p: self.p.iter().map(|v| -v).collect(),
            t: self.t,
            domain: self.domain,
        }
    }

    /// Smallest pairwise distance and the pair attaining it.
    pub fn min_separation(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..self.q.len() {
            for j in i + 1..self.q.len() {
                let d = self.domain.distance(self.q[i] - self.q[j]);
                if best.is_none_or(|b| d < b.2) {
                    best = Some((i, j, d));
                }
            }
        }
        best
    }

    fn check_separation(&self) -> Result<()> {
        match self.min_separation() {
            Some((i, j, distance)) if distance < COLLISION_GUARD => Err(Error::Collision {
                i,
                j,
                distance,
                time: self.t,
            }),
            _ => Ok(()),
        }
    }
}

/// `u(x_j) = Σ 2 p_i G(x_j - q_i)`. A periodic state must live on a box of the
/// grid's length; line states are evaluated at the node coordinates directly.
pub fn peakon_field(s: &PeakonState, grid: &Grid1D) -> Result<FieldState> {
    if let Domain::Periodic { length } = s.domain {
        if (length - grid.length()).abs() > 1e-12 * length {
            return Err(Error::InvalidArgument(format!(
                "peakon box length {length} does not match grid length {}",
                grid.length()
            )));
        }
    }
    let values = grid.sample(|x| peakon_profile(s, x));
    FieldState::new(*grid, values, s.t)
}

/// `u(x)` of the peakon superposition at an arbitrary point.
pub fn peakon_profile(s: &PeakonState, x: f64) -> f64 {
    s.q.iter().zip(&s.p).map(|(&q, &p)| 2.0 * p * green(x - q, s.domain)).sum()
}

/// `u_x(x)`, valid away from the peaks.
pub fn peakon_profile_slope(s: &PeakonState, x: f64) -> f64 {
    s.q.iter().zip(&s.p).map(|(&q, &p)| 2.0 * p * green_slope(x - q, s.domain)).sum()
}

pub fn peakon_hamiltonian(s: &PeakonState) -> f64 {
    let mut h = 0.0;
    for i in 0..s.len() {
        for j in 0..s.len() {
            h += s.p[i] * s.p[j] * green(s.q[i] - s.q[j], s.domain);
        }
    }
    h
}

/// `(dq/dt, dp/dt)` of the canonical system.
pub fn peakon_rhs(s: &PeakonState) -> Result<(Vec<f64>, Vec<f64>)> {
    s.check_separation()?;
    let n = s.len();
    let mut dq = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for i in 0..n {
        let mut vel = 0.0;
        let mut force = 0.0;
        for j in 0..n {
            let d = s.q[i] - s.q[j];
            vel += s.p[j] * green(d, s.domain);
            force += s.p[j] * green_slope(d, s.domain);
        }
        dq[i] = 2.0 * vel;
        dp[i] = -2.0 * s.p[i] * force;
    }
    Ok((dq, dp))
}

/// Where and when the collision guard stopped a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collision {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub time: f64,
}

#[derive(Clone, Debug)]
pub struct PeakonRun {
    pub trajectory: Vec<PeakonState>,
    /// `(t, H)` at every recorded state.
    pub hamiltonian: Vec<(f64, f64)>,
    /// Set when the run stopped at the collision guard.
    pub collision: Option<Collision>,
}

impl PeakonRun {
    pub fn last(&self) -> &PeakonState {
        self.trajectory.last().expect("trajectory holds the initial state")
    }

    pub fn max_relative_energy_drift(&self) -> f64 {
        let h0 = self.hamiltonian[0].1;
        self.hamiltonian
            .iter()
            .map(|&(_, h)| (h - h0).abs() / h0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

fn advance(s: &PeakonState, dq: &[f64], dp: &[f64], h: f64) -> PeakonState {
    PeakonState {
        q: s.q.iter().zip(dq).map(|(a, b)| a + h * b).collect(),
        p: s.p.iter().zip(dp).map(|(a, b)| a + h * b).collect(),
        t: s.t + h,
        domain: s.domain,
    }
}

/// One classical RK4 step.
pub fn peakon_step(s: &PeakonState, dt: f64) -> Result<PeakonState> {
    let (q1, p1) = peakon_rhs(s)?;
    let (q2, p2) = peakon_rhs(&advance(s, &q1, &p1, 0.5 * dt))?;
    let (q3, p3) = peakon_rhs(&advance(s, &q2, &p2, 0.5 * dt))?;
    let (q4, p4) = peakon_rhs(&advance(s, &q3, &p3, dt))?;
    let combine = |a: &[f64], k1: &[f64], k2: &[f64], k3: &[f64], k4: &[f64]| -> Vec<f64> {
        (0..a.len())
            .map(|i| a[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    };
    let next = PeakonState {
        q: combine(&s.q, &q1, &q2, &q3, &q4),
        p: combine(&s.p, &p1, &p2, &p3, &p4),
        t: s.t + dt,
        domain: s.domain,
    };
    next.check_separation()?;
    // a fixed step can jump across a collision without landing inside the guard
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let before = s.q[i] - s.q[j];
            let after = next.q[i] - next.q[j];
            if before.signum() != after.signum() || !after.is_finite() {
                return Err(Error::Collision {
                    i,
                    j,
                    distance: s.domain.distance(before),
                    time: s.t,
                });
            }
        }
    }
    Ok(next)
}

pub fn simulate_peakons(s0: &PeakonState, dt: f64, t_final: f64) -> Result<PeakonRun> {
    simulate_peakons_recorded(s0, dt, t_final, 1)
}

/// RK4 over `round(t_final / dt)` steps, recording every `record_every` steps
/// and the final state. A collision ends the run early and is reported in
/// [`PeakonRun::collision`].
pub fn simulate_peakons_recorded(
    s0: &PeakonState,
    dt: f64,
    t_final: f64,
    record_every: usize,
) -> Result<PeakonRun> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid final time {t_final}")));
    }
    if record_every == 0 {
        return Err(Error::InvalidArgument("record_every must be >= 1".into()));
    }
    s0.check_separation()?;
    let steps = (t_final / dt).round() as usize;
    let mut run = PeakonRun {
        trajectory: vec![s0.clone()],
        hamiltonian: vec![(s0.t, peakon_hamiltonian(s0))],
        collision: None,
    };
    let mut s = s0.clone();
    for step in 1..=steps {
        match peakon_step(&s, dt) {
            Ok(mut next) => {
                next.t = s0.t + step as f64 * dt;
                s = next;
            }
            Err(Error::Collision { i, j, distance, time }) => {
                if run.last().t != s.t {
                    run.hamiltonian.push((s.t, peakon_hamiltonian(&s)));
                    run.trajectory.push(s);
                }
                run.collision = Some(Collision { i, j, distance, time });
                return Ok(run);
            }
            Err(e) => return Err(e),
        }
        if step % record_every == 0 || step == steps {
            run.hamiltonian.push((s.t, peakon_hamiltonian(&s)));
            run.trajectory.push(s.clone());
        }
    }
    Ok(run)
}
