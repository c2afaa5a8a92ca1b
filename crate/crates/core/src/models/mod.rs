//! Concrete generator families: skew-Hermitian matrices, the spectral
//! translation group, and translation-covariant potentials on the circle.

pub mod covariant;
pub mod matrix;
pub mod potential;
pub mod spectral;

pub use covariant::{
    make_covariant_perturbation, CompositeFamily, CovariantPerturbation, MultiplicationFamily,
    ScalarPerturbation,
};
pub use matrix::{make_matrix_family, random_hermitian, random_state, sigma_x, sigma_z, MatrixFamily, Modulation};
pub use potential::{lipschitz_hat, modulus_of_continuity, weierstrass, Phase, PotentialShape, PotentialSpec};
pub use spectral::{make_translation_group, TranslationGroup};
