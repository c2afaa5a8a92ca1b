//! Perturbations B(t) and composite families A(t) = A₀ + B(t).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::{DVector, Dyn, LU};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{
    shift, Basis, BoundedPerturbation, Diagonal, FamilyKind, GeneratorFamily,
};
use crate::linalg::{self, CMatrix, DENSE_LIMIT};
use crate::models::potential::PotentialSpec;
use crate::models::spectral::TranslationGroup;
use crate::state::{NormKind, StateVector};

/// B(t) = β·1.
#[derive(Debug, Clone, Copy)]
pub struct ScalarPerturbation {
    pub dimension: usize,
    pub value: Complex64,
}

impl BoundedPerturbation for ScalarPerturbation {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn apply(&self, _t: f64, y: &StateVector) -> StateVector {
        y.scale(self.value)
    }

    fn sup_norm(&self) -> f64 {
        self.value.norm()
    }

    fn growth(&self) -> f64 {
        self.value.re.abs()
    }

    fn covariant_base(&self) -> Option<CMatrix> {
        Some(CMatrix::identity(self.dimension, self.dimension) * self.value)
    }
}

/// B(t) = e^{A₀t}·diag(f)·e^{−A₀t} for the translation group A₀.
///
/// For t a multiple of the grid spacing this is multiplication by f(ξ+t)
/// on the grid; in between it is the spectral conjugate, so the
/// interaction-picture generator e^{−A₀τ}B(τ)e^{A₀τ} is exactly diag(f).
#[derive(Debug, Clone)]
pub struct CovariantPerturbation {
    group: TranslationGroup,
    potential: PotentialSpec,
    samples: Vec<Complex64>,
}

pub fn make_covariant_perturbation(group: &TranslationGroup, potential: PotentialSpec) -> Result<CovariantPerturbation> {
    CovariantPerturbation::new(group.clone(), potential)
}

impl CovariantPerturbation {
    pub fn new(group: TranslationGroup, potential: PotentialSpec) -> Result<Self> {
        potential.validate(group.half_period())?;
        let samples = potential.sample(group.len(), group.half_period());
        Ok(Self {
            group,
            potential,
            samples,
        })
    }

    pub fn group(&self) -> &TranslationGroup {
        &self.group
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// Grid samples of f.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// e^{Bτ}y = e^{f τ}·y pointwise (B = B(0)).
    pub fn exp_base(&self, tau: f64, y: &StateVector) -> StateVector {
        y.map(|j, z| z * (self.samples[j] * tau).exp())
    }
}

impl BoundedPerturbation for CovariantPerturbation {
    fn dimension(&self) -> usize {
        self.group.len()
    }

    fn apply(&self, t: f64, y: &StateVector) -> StateVector {
        if let Some(m) = self.group.whole_cells(t) {
            let n = self.samples.len() as i64;
            return y.map(|j, z| z * self.samples[(j as i64 + m).rem_euclid(n) as usize]);
        }
        let back = self.group.translate(-t, y.entries());
        let mult: Vec<Complex64> = back.iter().zip(&self.samples).map(|(a, f)| a * f).collect();
        StateVector::from_raw(self.group.translate(t, &mult), y.kind())
    }

    fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn growth(&self) -> f64 {
        self.samples.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
    }

    fn covariant_base(&self) -> Option<CMatrix> {
        let n = self.samples.len();
        let mut b = CMatrix::zeros(n, n);
        for (j, f) in self.samples.iter().enumerate() {
            b[(j, j)] = *f;
        }
        Some(b)
    }
}

/// A(t) = multiplication by f(ξ_j + t), evaluated pointwise from the
/// continuous potential. Diagonal on the grid; e^{A(t)τ} = e^{f(ξ+t)τ}.
#[derive(Debug, Clone)]
pub struct MultiplicationFamily {
    grid: Vec<f64>,
    half_period: f64,
    depth: u32,
    potential: PotentialSpec,
    horizon: f64,
    norm: NormKind,
    omega: f64,
}

impl MultiplicationFamily {
    pub fn new(n: usize, half_period: f64, potential: PotentialSpec, horizon: f64, norm: NormKind) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModel(format!("grid size must be >= 2, got {n}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidModel(format!("horizon must be positive, got {horizon}")));
        }
        potential.validate(half_period)?;
        let dx = 2.0 * half_period / n as f64;
        let grid: Vec<f64> = (0..n).map(|j| -half_period + j as f64 * dx).collect();
        let depth = potential.depth_for_grid(n, half_period).unwrap_or(0);
        let omega = match potential.shape {
            crate::models::potential::PotentialShape::Weierstrass { alpha, .. } => match potential.phase {
                crate::models::potential::Phase::Real => {
                    potential.amplitude.abs() * crate::models::potential::weierstrass_sup(alpha, depth)
                }
                crate::models::potential::Phase::Imaginary => 0.0,
            },
            _ => match potential.phase {
                crate::models::potential::Phase::Real => potential.amplitude.abs(),
                crate::models::potential::Phase::Imaginary => 0.0,
            },
        };
        Ok(Self {
            grid,
            half_period,
            depth,
            potential,
            horizon,
            norm,
            omega,
        })
    }

    pub fn symbol(&self, t: f64) -> Vec<Complex64> {
        self.grid
            .iter()
            .map(|&x| self.potential.eval_with_depth(x + t, self.half_period, self.depth))
            .collect()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

impl GeneratorFamily for MultiplicationFamily {
    fn dimension(&self) -> usize {
        self.grid.len()
    }

    fn omega(&self) -> f64 {
        self.omega
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::ShiftedMultiplication
    }

    fn norm_kind(&self) -> NormKind {
        self.norm
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        // ‖(A(t)−A(s))A̲(0)⁻¹‖ ≤ Lip(f)|t−s|·max_j 1/|f(ξ_j) − σ|
        let lip = self.potential.lipschitz()?;
        let sigma = shift(self);
        let worst = self
            .symbol(0.0)
            .iter()
            .map(|f| 1.0 / (f - sigma).norm())
            .fold(0.0, f64::max);
        Some(lip * worst)
    }

    fn generator_action(&self, t: f64, y: &StateVector) -> StateVector {
        let sym = self.symbol(t);
        y.map(|j, z| z * sym[j])
    }

    fn frozen_exp(&self, t: f64, tau: f64, y: &StateVector) -> StateVector {
        let sym = self.symbol(t);
        y.map(|j, z| z * (sym[j] * tau).exp())
    }

    fn shifted_inverse(&self, t: f64, x: &StateVector) -> StateVector {
        let sym = self.symbol(t);
        let sigma = shift(self);
        x.map(|j, z| z / (sym[j] - sigma))
    }

    fn diagonal(&self, t: f64) -> Option<Diagonal> {
        Some(Diagonal {
            basis: Basis::Grid,
            symbol: self.symbol(t),
        })
    }
}

enum ExpEngine {
    /// K = iH with H Hermitian: e^{Kτ} = V·diag(e^{iλτ})·V*.
    Unitary { vectors: CMatrix, values: Vec<f64> },
    /// General K, exponentials cached per τ.
    General { k: CMatrix, cache: Mutex<HashMap<u64, Arc<CMatrix>>> },
}

struct CovariantEngine {
    exp: ExpEngine,
    shifted_lu: LU<Complex64, Dyn, Dyn>,
}

impl CovariantEngine {
    const CACHE_CAP: usize = 512;

    fn new(k: CMatrix, sigma: f64) -> Self {
        let mut shifted = k.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] -= Complex64::new(sigma, 0.0);
        }
        let h = &k * Complex64::new(0.0, -1.0);
        let exp = if linalg::is_hermitian(&h, 1e-12) {
            let eig = h.symmetric_eigen();
            ExpEngine::Unitary {
                vectors: eig.eigenvectors,
                values: eig.eigenvalues.iter().copied().collect(),
            }
        } else {
            ExpEngine::General {
                k,
                cache: Mutex::new(HashMap::new()),
            }
        };
        Self {
            exp,
            shifted_lu: shifted.lu(),
        }
    }

    fn apply_exp(&self, tau: f64, y: &StateVector) -> StateVector {
        match &self.exp {
            ExpEngine::Unitary { vectors, values } => {
                let v = DVector::from_column_slice(y.entries());
                let mut c = vectors.adjoint() * v;
                for (z, l) in c.iter_mut().zip(values) {
                    *z *= Complex64::from_polar(1.0, l * tau);
                }
                let out = vectors * c;
                StateVector::from_raw(out.iter().copied().collect(), y.kind())
            }
            ExpEngine::General { k, cache } => {
                let key = tau.to_bits();
                let cached = cache.lock().unwrap().get(&key).cloned();
                let m = match cached {
                    Some(m) => m,
                    None => {
                        let m = Arc::new((k * Complex64::new(tau, 0.0)).exp());
                        let mut c = cache.lock().unwrap();
                        if c.len() >= Self::CACHE_CAP {
                            c.clear();
                        }
                        c.insert(key, m.clone());
                        m
                    }
                };
                linalg::mat_vec(&m, y)
            }
        }
    }

    fn solve_shifted(&self, x: &StateVector) -> StateVector {
        let rhs = DVector::from_column_slice(x.entries());
        let sol = self.shifted_lu.solve(&rhs).expect("shift lies outside the spectrum bound");
        StateVector::from_raw(sol.iter().copied().collect(), x.kind())
    }
}

/// A(t) = A₀ + B(t) with A₀ a constant group generator and B bounded.
///
/// When B is covariant (B(t) = e^{A₀t}B₀e^{−A₀t}) the frozen exponentials are
/// e^{A₀t}·e^{(A₀+B₀)τ}·e^{−A₀t}, so only the single matrix A₀+B₀ is ever
/// exponentiated. Otherwise A(t) is assembled densely per call.
pub struct CompositeFamily {
    free: Arc<dyn GeneratorFamily>,
    perturbation: Arc<dyn BoundedPerturbation>,
    horizon: f64,
    engine: Option<CovariantEngine>,
    label: String,
}

impl fmt::Debug for CompositeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeFamily")
            .field("dimension", &self.free.dimension())
            .field("horizon", &self.horizon)
            .field("covariant", &self.engine.is_some())
            .field("label", &self.label)
            .finish()
    }
}

impl CompositeFamily {
    pub fn new(
        free: Arc<dyn GeneratorFamily>,
        perturbation: Arc<dyn BoundedPerturbation>,
        horizon: f64,
    ) -> Result<Self> {
        let n = free.dimension();
        if perturbation.dimension() != n {
            return Err(Error::InvalidModel(format!(
                "perturbation dimension {} does not match free group dimension {n}",
                perturbation.dimension()
            )));
        }
        if n > DENSE_LIMIT {
            return Err(Error::DenseUnavailable(n));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidModel(format!("horizon must be positive, got {horizon}")));
        }
        let sigma = free.omega() + perturbation.growth() + 1.0;
        let engine = match perturbation.covariant_base() {
            Some(b0) => Some(CovariantEngine::new(free.dense_generator(0.0)? + b0, sigma)),
            None => None,
        };
        Ok(Self {
            free,
            perturbation,
            horizon,
            engine,
            label: String::from("composite"),
        })
    }

    /// Example-1/2 structure: translation group plus covariant potential.
    pub fn covariant(group: TranslationGroup, potential: PotentialSpec, horizon: f64) -> Result<Self> {
        let label = format!(
            "covariant(N={};L={};{:?};amp={};{:?};T={horizon})",
            group.len(),
            group.half_period(),
            potential.shape,
            potential.amplitude,
            potential.phase
        );
        let b = CovariantPerturbation::new(group.clone(), potential)?;
        let mut fam = Self::new(Arc::new(group), Arc::new(b), horizon)?;
        fam.label = label;
        Ok(fam)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn free(&self) -> &dyn GeneratorFamily {
        self.free.as_ref()
    }

    pub fn perturbation(&self) -> &dyn BoundedPerturbation {
        self.perturbation.as_ref()
    }

    pub fn is_covariant(&self) -> bool {
        self.engine.is_some()
    }

    /// e^{A₀t}e^{B₀t}y, the closed-form candidate U(t,0)y for covariant B.
    pub fn closed_form(&self, t: f64, y: &StateVector) -> Result<StateVector> {
        let b0 = self
            .perturbation
            .covariant_base()
            .ok_or_else(|| Error::InvalidModel("closed form needs a covariant perturbation".into()))?;
        let eb = (b0 * Complex64::new(t, 0.0)).exp();
        Ok(self.free.frozen_exp(0.0, t, &linalg::mat_vec(&eb, y)))
    }
}

impl GeneratorFamily for CompositeFamily {
    fn dimension(&self) -> usize {
        self.free.dimension()
    }

    fn omega(&self) -> f64 {
        self.free.omega() + self.perturbation.growth()
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::Composite
    }

    fn norm_kind(&self) -> NormKind {
        self.free.norm_kind()
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        None
    }

    fn generator_action(&self, t: f64, y: &StateVector) -> StateVector {
        self.free.generator_action(0.0, y).add(&self.perturbation.apply(t, y))
    }

    fn frozen_exp(&self, t: f64, tau: f64, y: &StateVector) -> StateVector {
        if tau == 0.0 {
            return y.clone();
        }
        match &self.engine {
            Some(engine) => {
                let back = self.free.frozen_exp(0.0, -t, y);
                let evolved = engine.apply_exp(tau, &back);
                self.free.frozen_exp(0.0, t, &evolved)
            }
            None => {
                let a = self.dense_generator(t).expect("dimension checked at construction");
                linalg::mat_vec(&(a * Complex64::new(tau, 0.0)).exp(), y)
            }
        }
    }

    fn shifted_inverse(&self, t: f64, x: &StateVector) -> StateVector {
        match &self.engine {
            Some(engine) => {
                let back = self.free.frozen_exp(0.0, -t, x);
                let solved = engine.solve_shifted(&back);
                self.free.frozen_exp(0.0, t, &solved)
            }
            None => {
                let mut a = self.dense_generator(t).expect("dimension checked at construction");
                let sigma = Complex64::new(shift(self), 0.0);
                for i in 0..a.nrows() {
                    a[(i, i)] -= sigma;
                }
                let sol = a
                    .lu()
                    .solve(&DVector::from_column_slice(x.entries()))
                    .expect("shift lies outside the spectrum bound");
                StateVector::from_raw(sol.iter().copied().collect(), x.kind())
            }
        }
    }
}
