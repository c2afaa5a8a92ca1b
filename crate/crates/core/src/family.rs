//! Generator families t ↦ A(t) and the norms built from them.
//!
//! Every family generates, at each frozen time, a strongly continuous group
//! with the common growth bound ‖e^{A(t)τ}‖ ≤ e^{ω|τ|}. The renormed graph
//! norm ‖y‖_t = ‖(A(t) − (ω+1))y‖ and the (Y,X) / (X,Y) operator norms with
//! Y carrying ‖·‖_0 are computed here, either mode-wise for diagonal models
//! or by dense factorisation up to [`DENSE_LIMIT`](crate::linalg::DENSE_LIMIT).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, DENSE_LIMIT};
use crate::state::{NormKind, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Matrix,
    SpectralShift,
    ShiftedMultiplication,
    Composite,
}

/// Basis in which a diagonal model is diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Grid samples (pointwise multiplication).
    Grid,
    /// Unitary discrete Fourier basis.
    Fourier,
}

#[derive(Debug, Clone)]
pub struct Diagonal {
    pub basis: Basis,
    pub symbol: Vec<Complex64>,
}

pub trait GeneratorFamily: Send + Sync {
    fn dimension(&self) -> usize;

    /// Growth exponent ω ≥ 0.
    fn omega(&self) -> f64;

    fn horizon(&self) -> f64;

    fn kind(&self) -> FamilyKind;

    fn norm_kind(&self) -> NormKind;

    /// Lipschitz constant of t ↦ A(t) in the (Y,X) norm, when known in closed form.
    fn lipschitz_constant(&self) -> Option<f64> {
        None
    }

    /// A(t)y
    fn generator_action(&self, t: f64, y: &StateVector) -> StateVector;

    /// e^{A(t)τ}y for any real τ.
    fn frozen_exp(&self, t: f64, tau: f64, y: &StateVector) -> StateVector;

    /// (A(t) − (ω+1))⁻¹x
    fn shifted_inverse(&self, t: f64, x: &StateVector) -> StateVector;

    /// Diagonal form of A(t), for models that have one.
    fn diagonal(&self, _t: f64) -> Option<Diagonal> {
        None
    }

    /// Dense matrix of A(t); defaults to assembling it from `generator_action`.
    fn dense_generator(&self, t: f64) -> Result<CMatrix> {
        let n = self.dimension();
        if n > DENSE_LIMIT {
            return Err(Error::DenseUnavailable(n));
        }
        Ok(linalg::dense_from_action(n, self.norm_kind(), |e| {
            self.generator_action(t, e)
        }))
    }

    /// A vector in this family's space.
    fn vector(&self, entries: Vec<Complex64>) -> Result<StateVector> {
        if entries.len() != self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, got {}",
                self.dimension(),
                entries.len()
            )));
        }
        StateVector::new(entries, self.norm_kind())
    }
}

/// Shift used by the renormed graph norm: A̲(t) = A(t) − (ω+1).
pub fn shift(family: &(impl GeneratorFamily + ?Sized)) -> f64 {
    family.omega() + 1.0
}

pub fn check_time<F: GeneratorFamily + ?Sized>(family: &F, t: f64) -> Result<()> {
    let horizon = family.horizon();
    if (0.0..=horizon).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfHorizon { t, horizon })
    }
}

/// ‖y‖_t = ‖(A(t) − (ω+1))y‖ in y's norm.
pub fn graph_norm<F: GeneratorFamily + ?Sized>(family: &F, t: f64, y: &StateVector) -> f64 {
    let mut ay = family.generator_action(t, y);
    ay.axpy(Complex64::new(-shift(family), 0.0), y);
    ay.norm()
}

fn shifted_dense<F: GeneratorFamily + ?Sized>(family: &F, t: f64) -> Result<CMatrix> {
    let mut m = family.dense_generator(t)?;
    let sigma = Complex64::new(shift(family), 0.0);
    for i in 0..m.nrows() {
        m[(i, i)] -= sigma;
    }
    Ok(m)
}

fn invert(m: CMatrix) -> Result<CMatrix> {
    m.try_inverse()
        .ok_or_else(|| Error::InvalidModel("shifted generator is singular".into()))
}

/// Mode-wise pair of symbols in a common basis, if both are diagonal there and
/// the basis change is an isometry for the family's norm.
fn diagonal_pair<F: GeneratorFamily + ?Sized>(
    family: &F,
    t: f64,
    s: f64,
) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let a = family.diagonal(t)?;
    let b = family.diagonal(s)?;
    if a.basis != b.basis {
        return None;
    }
    if a.basis == Basis::Fourier && family.norm_kind() != NormKind::Euclidean {
        return None;
    }
    Some((a.symbol, b.symbol))
}

/// ‖(A(t) − A(s))·A̲(0)⁻¹‖, the (Y,X) norm of A(t) − A(s) with Y = (D, ‖·‖_0).
pub fn op_norm_y_to_x<F: GeneratorFamily + ?Sized>(family: &F, t: f64, s: f64) -> Result<f64> {
    check_time(family, t)?;
    check_time(family, s)?;
    if t == s {
        return Ok(0.0);
    }
    let sigma = shift(family);
    if let Some((at, as_)) = diagonal_pair(family, t, s) {
        let a0 = family.diagonal(0.0).map(|d| d.symbol);
        if let Some(a0) = a0 {
            return Ok(at
                .iter()
                .zip(&as_)
                .zip(&a0)
                .map(|((x, y), z)| (x - y).norm() / (z - sigma).norm())
                .fold(0.0, f64::max));
        }
    }
    let diff = family.dense_generator(t)? - family.dense_generator(s)?;
    let inv0 = invert(shifted_dense(family, 0.0)?)?;
    Ok(linalg::operator_norm(&(diff * inv0), family.norm_kind()))
}

/// ‖A̲(s)⁻¹‖_{X,Y} = ‖A̲(0)·A̲(s)⁻¹‖.
pub fn inverse_norm_x_to_y<F: GeneratorFamily + ?Sized>(family: &F, s: f64) -> Result<f64> {
    check_time(family, s)?;
    let sigma = shift(family);
    if let Some((as_, a0)) = diagonal_pair(family, s, 0.0) {
        return Ok(as_
            .iter()
            .zip(&a0)
            .map(|(x, z)| (z - sigma).norm() / (x - sigma).norm())
            .fold(0.0, f64::max));
    }
    let m: DMatrix<Complex64> = shifted_dense(family, 0.0)? * invert(shifted_dense(family, s)?)?;
    Ok(linalg::operator_norm(&m, family.norm_kind()))
}

/// Sampled C = sup_s ‖A̲(s)⁻¹‖_{X,Y} over s_j = jT/samples, j = 0..=samples.
///
/// Doubling `samples` refines the sample set, so the result never decreases.
pub fn stability_constant<F: GeneratorFamily + ?Sized>(family: &F, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("samples must be >= 2, got {samples}")));
    }
    let horizon = family.horizon();
    let mut c = 0.0f64;
    for j in 0..=samples {
        let s = if j == samples { horizon } else { horizon * j as f64 / samples as f64 };
        c = c.max(inverse_norm_x_to_y(family, s)?);
    }
    Ok(c)
}

/// A bounded, strongly continuous τ ↦ B(τ) perturbing a free group.
pub trait BoundedPerturbation: Send + Sync {
    fn dimension(&self) -> usize;

    /// B(t)y
    fn apply(&self, t: f64, y: &StateVector) -> StateVector;

    /// sup_τ ‖B(τ)‖ in the X-norm.
    fn sup_norm(&self) -> f64;

    /// Bound on the growth rate ±B contributes to e^{(A₀+B)τ}; defaults to `sup_norm`.
    fn growth(&self) -> f64 {
        self.sup_norm()
    }

    /// B₀ with B(t) = e^{A₀t}B₀e^{−A₀t}, for perturbations covariant under the
    /// free group they are paired with.
    fn covariant_base(&self) -> Option<CMatrix> {
        None
    }
}
