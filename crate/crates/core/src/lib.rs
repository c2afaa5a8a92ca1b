//! Propagators for non-autonomous linear evolution equations ẋ = A(t)x.
//!
//! The crate builds the frozen-coefficient products
//! U_n(t,s) = e^{A(t_n)(t−t_n)}···e^{A(s_n)(s_n⁺−s)} on partitions of [0,T],
//! certifies their graph-norm stability bounds through the variation
//! functional V(s,t), evaluates Dyson series for A₀ + B(t), and ships the
//! models used to probe where Lipschitz regularity in time stops being enough:
//! Weierstrass-modulated matrix families and translation groups perturbed by
//! kinked or nowhere-differentiable potentials.
//!
//! ```
//! use evopagator::models::MatrixFamily;
//! use evopagator::product::Propagator;
//! use evopagator::state::{NormKind, StateVector};
//!
//! let family = MatrixFamily::pauli_linear(1.0);
//! let y = StateVector::basis(2, 0, NormKind::Euclidean);
//! let u = Propagator::dyadic(&family, 8).unwrap();
//! let x = u.apply(1.0, 0.0, &y).unwrap();
//! assert!((x.norm() - 1.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod dyson;
pub mod error;
pub mod experiments;
pub mod family;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod partition;
pub mod product;
pub mod record;
pub mod state;
pub mod variation;

pub use error::{Error, Result};
pub use family::{graph_norm, op_norm_y_to_x, stability_constant, BoundedPerturbation, FamilyKind, GeneratorFamily};
pub use partition::{locate, Located, Partition};
pub use product::{build_propagator, observed_order, refine_until, Propagator};
pub use record::ExperimentRecord;
pub use state::{NormKind, StateVector};
pub use variation::{VariationFunctional, VariationMode};
