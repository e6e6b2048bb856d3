//! Numerical laboratory for the Fučik spectrum of the self-similar heat
//! operator `Lu = −Δu − ½ x·∇u` on the Gaussian-weighted space `L²_K`,
//! `K(x) = e^{|x|²/4}`.

pub mod eigen;
pub mod error;
pub mod functional;
pub mod hermite;
pub mod io;
pub mod minimax;
pub mod nonlinear;
pub mod operator;
pub mod weighted;

pub use error::{FucikError, Result};
pub use functional::{
    constrained_grad, fucik_residual, identity_suite, tilde_i_p, CriticalCandidate, FucikPoint, IdentityReport,
};
pub use operator::{closed_form_spectrum, verify_spectrum, DiscreteOperator, EigenSystem, SpectrumReport};
pub use weighted::{
    inner_product_k, negative_part, positive_part, sphere_project, x_seminorm_sq, Backend, Discretization, FieldSample,
    SpherePoint,
};
