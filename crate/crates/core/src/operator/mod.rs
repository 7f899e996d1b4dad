//! Discrete Dirichlet forms, Rayleigh quotients and eigensolvers.

mod eigen;
mod envelope;
mod field;
mod form;
mod potential;

pub use eigen::{
    count_below, k_smallest, max_iterations, residual_bound, smallest_eigenpair, smallest_eigenpair_from,
    Eigenpair, DEFAULT_TOL,
};
pub use envelope::{Envelope, Inertia};
pub use field::Field;
pub use form::{assemble, DiscreteForm};
pub use potential::Potential;

use crate::error::Result;

/// `a_V(u)` for a field supported in the form's mask.
pub fn form_energy(form: &DiscreteForm, u: &Field) -> Result<f64> {
    form.form_energy(u)
}

/// Rayleigh quotient `R_V(u)`.
pub fn rayleigh(form: &DiscreteForm, u: &Field) -> Result<f64> {
    form.rayleigh(u)
}
