//! Skew-Hermitian matrix families A(t) = i(H₀ + m(t)H₁).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::family::{shift, FamilyKind, GeneratorFamily};
use crate::linalg::{self, CMatrix};
use crate::models::potential::weierstrass;
use crate::state::{NormKind, StateVector};

/// Scalar time modulation m(t).
#[derive(Clone)]
pub enum Modulation {
    Zero,
    /// m(t) = slope·t
    Linear { slope: f64 },
    /// m(t) = W_α(frequency·t) with a finite series depth.
    Weierstrass { alpha: f64, depth: u32, frequency: f64 },
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lipschitz: Option<f64>,
    },
}

impl fmt::Debug for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Zero => write!(f, "Zero"),
            Modulation::Linear { slope } => write!(f, "Linear {{ slope: {slope} }}"),
            Modulation::Weierstrass { alpha, depth, frequency } => write!(
                f,
                "Weierstrass {{ alpha: {alpha}, depth: {depth}, frequency: {frequency} }}"
            ),
            Modulation::Custom { lipschitz, .. } => write!(f, "Custom {{ lipschitz: {lipschitz:?} }}"),
        }
    }
}

impl Modulation {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Modulation::Zero => 0.0,
            Modulation::Linear { slope } => slope * t,
            Modulation::Weierstrass { alpha, depth, frequency } => weierstrass(*alpha, *depth, frequency * t),
            Modulation::Custom { f, .. } => f(t),
        }
    }

    /// Known Lipschitz constant. The truncated Weierstrass series stands in for
    /// its Hölder limit, so it reports none.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Modulation::Zero => Some(0.0),
            Modulation::Linear { slope } => Some(slope.abs()),
            Modulation::Weierstrass { .. } => None,
            Modulation::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Modulation::Zero => "m=0".into(),
            Modulation::Linear { slope } => format!("m={slope}*t"),
            Modulation::Weierstrass { alpha, depth, frequency } => {
                format!("m=W(alpha={alpha};depth={depth};{frequency}*t)")
            }
            Modulation::Custom { .. } => "m=custom".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixFamily {
    h0: CMatrix,
    h1: CMatrix,
    modulation: Modulation,
    horizon: f64,
    lipschitz: Option<f64>,
}

pub fn make_matrix_family(h0: CMatrix, h1: CMatrix, modulation: Modulation, horizon: f64) -> Result<MatrixFamily> {
    MatrixFamily::new(h0, h1, modulation, horizon)
}

impl MatrixFamily {
    pub fn new(h0: CMatrix, h1: CMatrix, modulation: Modulation, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidModel(format!("horizon must be positive, got {horizon}")));
        }
        if h0.shape() != h1.shape() || !h0.is_square() || h0.nrows() == 0 {
            return Err(Error::InvalidModel("H0 and H1 must be square of equal size".into()));
        }
        if !linalg::is_hermitian(&h0, 1e-12) || !linalg::is_hermitian(&h1, 1e-12) {
            return Err(Error::InvalidModel("H0 and H1 must be Hermitian".into()));
        }
        let mut family = Self {
            h0,
            h1,
            modulation,
            horizon,
            lipschitz: None,
        };
        family.lipschitz = match family.modulation.lipschitz() {
            Some(0.0) => Some(0.0),
            Some(lm) => {
                // ‖iH₁·A̲(0)⁻¹‖ scaled by Lip(m)
                let inv0 = family
                    .shifted(0.0)
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidModel("shifted generator is singular".into()))?;
                Some(lm * linalg::spectral_norm(&(&family.h1 * inv0)))
            }
            None => None,
        };
        Ok(family)
    }

    /// Constant family A ≡ iH.
    pub fn constant(h: CMatrix, horizon: f64) -> Result<Self> {
        let n = h.nrows();
        Self::new(h, CMatrix::zeros(n, n), Modulation::Zero, horizon)
    }

    /// i(σ_z + t·σ_x) on [0, horizon].
    pub fn pauli_linear(horizon: f64) -> Self {
        Self::new(sigma_z(), sigma_x(), Modulation::Linear { slope: 1.0 }, horizon)
            .expect("Pauli matrices are Hermitian")
    }

    /// i(H₀ + tH₁) with random Hermitian H₀, H₁ of size `dim`.
    pub fn random_linear<R: Rng + ?Sized>(dim: usize, horizon: f64, rng: &mut R) -> Self {
        let h0 = random_hermitian(dim, rng);
        let h1 = random_hermitian(dim, rng);
        Self::new(h0, h1, Modulation::Linear { slope: 1.0 }, horizon).expect("random Hermitian input")
    }

    pub fn modulation(&self) -> &Modulation {
        &self.modulation
    }

    /// H₀ + m(t)H₁
    pub fn hamiltonian(&self, t: f64) -> CMatrix {
        let m = self.modulation.eval(t);
        if m == 0.0 {
            self.h0.clone()
        } else {
            &self.h0 + &self.h1 * Complex64::new(m, 0.0)
        }
    }

    fn shifted(&self, t: f64) -> CMatrix {
        let mut a = self.hamiltonian(t) * Complex64::i();
        let sigma = Complex64::new(shift(self), 0.0);
        for i in 0..a.nrows() {
            a[(i, i)] -= sigma;
        }
        a
    }

    /// e^{A(t)τ} as a matrix.
    pub fn frozen_matrix(&self, t: f64, tau: f64) -> CMatrix {
        linalg::hermitian_phase_exp(&self.hamiltonian(t), tau)
    }

    pub fn describe(&self) -> String {
        format!("matrix(dim={};{};T={})", self.h0.nrows(), self.modulation.describe(), self.horizon)
    }
}

impl GeneratorFamily for MatrixFamily {
    fn dimension(&self) -> usize {
        self.h0.nrows()
    }

    fn omega(&self) -> f64 {
        0.0
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::Matrix
    }

    fn norm_kind(&self) -> NormKind {
        NormKind::Euclidean
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        self.lipschitz
    }

    fn generator_action(&self, t: f64, y: &StateVector) -> StateVector {
        linalg::mat_vec(&self.hamiltonian(t), y).scale(Complex64::i())
    }

    fn frozen_exp(&self, t: f64, tau: f64, y: &StateVector) -> StateVector {
        if tau == 0.0 {
            return y.clone();
        }
        linalg::mat_vec(&self.frozen_matrix(t, tau), y)
    }

    fn shifted_inverse(&self, t: f64, x: &StateVector) -> StateVector {
        let lu = self.shifted(t).lu();
        let rhs = nalgebra::DVector::from_column_slice(x.entries());
        let sol = lu.solve(&rhs).expect("A(t) - (omega+1) is invertible for skew-Hermitian A(t)");
        StateVector::from_raw(sol.iter().copied().collect(), x.kind())
    }

    fn dense_generator(&self, t: f64) -> Result<CMatrix> {
        Ok(self.hamiltonian(t) * Complex64::i())
    }
}

pub fn sigma_x() -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[o, l, l, o])
}

pub fn sigma_z() -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[l, o, o, -l])
}

/// Hermitian matrix with entries drawn uniformly from [−1, 1] (+ i[−1, 1] off the diagonal).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Random vector with entries uniform in the unit square.
pub fn random_state<R: Rng + ?Sized>(dim: usize, kind: NormKind, rng: &mut R) -> StateVector {
    let entries = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_raw(entries, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_non_hermitian() {
        let mut h = sigma_x();
        h[(0, 1)] = Complex64::new(2.0, 0.0);
        assert!(MatrixFamily::new(h, sigma_z(), Modulation::Zero, 1.0).is_err());
    }

    #[test]
    fn generator_is_skew_and_exponential_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = MatrixFamily::random_linear(5, 1.0, &mut rng);
        for &t in &[0.0, 0.3, 1.0] {
            let a = fam.dense_generator(t).unwrap();
            assert!((&a + a.adjoint()).norm() < 1e-13);
            let u = fam.frozen_matrix(t, 0.7);
            assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_modulation_is_constant() {
        let fam = MatrixFamily::new(sigma_z(), sigma_x(), Modulation::Zero, 2.0).unwrap();
        assert_eq!(fam.hamiltonian(0.0), fam.hamiltonian(1.7));
        assert_eq!(fam.lipschitz_constant(), Some(0.0));
    }

    #[test]
    fn pauli_lipschitz_constant() {
        // ‖σ_x (iσ_z − 1)⁻¹‖ = 1/√2 since both diagonal entries have modulus √2
        let fam = MatrixFamily::pauli_linear(1.0);
        let l = fam.lipschitz_constant().unwrap();
        assert!((l - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn shifted_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fam = MatrixFamily::random_linear(4, 1.0, &mut rng);
        let x = random_state(4, NormKind::Euclidean, &mut rng);
        let y = fam.shifted_inverse(0.4, &x);
        let mut back = fam.generator_action(0.4, &y);
        back.axpy(Complex64::new(-1.0, 0.0), &y);
        assert!(back.distance(&x) < 1e-13 * x.norm());
    }
}
