//! Numerical check of the variational derivation: diffeomorphisms of the
//! circle, paths and perturbations, the variation formulas, the
//! right-invariant action, and the identity between its first variation and
//! the Euler-Lagrange residual.

mod action;
mod diffeo;
mod formulas;
mod path;

pub use action::{
    discrete_action, el_pairing, el_residual, gateaux_action, gateaux_action_with, identity_check, ActionOffset,
    GateauxEstimate, IdentityReport, GATEAUX_EPS,
};
pub use diffeo::{compose, invert, DiscreteDiffeo, Evaluator, Interpolation, Pchip};
pub use formulas::{eulerian_velocity, variation_inverse, variation_velocity, variation_velocity_gradient, FORM_AGREEMENT};
pub use path::{time_derivative, DiffeoPath, Perturbation, MIN_STEPS};
