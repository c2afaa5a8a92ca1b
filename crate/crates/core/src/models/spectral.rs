//! Translation group on a periodic grid, realised by Fourier phases.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::family::{Basis, Diagonal, FamilyKind, GeneratorFamily};
use crate::state::{NormKind, StateVector};

/// e^{A₀t}x(ξ) = x(ξ+t) on N points of the circle [−L, L).
///
/// Mode k (integer, −N/2 ≤ k < N/2) is multiplied by e^{iπkt/L}; translation
/// by one grid cell is an exact cyclic index shift.
#[derive(Clone)]
pub struct TranslationGroup {
    n: usize,
    half_period: f64,
    horizon: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TranslationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TranslationGroup")
            .field("n", &self.n)
            .field("half_period", &self.half_period)
            .field("horizon", &self.horizon)
            .finish()
    }
}

pub fn make_translation_group(n: usize, half_period: f64) -> Result<TranslationGroup> {
    TranslationGroup::new(n, half_period)
}

impl TranslationGroup {
    pub fn new(n: usize, half_period: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidModel(format!("grid size must be a power of two >= 2, got {n}")));
        }
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(Error::InvalidModel(format!("half period must be positive, got {half_period}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            half_period,
            horizon: 1.0,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    /// Horizon T used when the group is viewed as a constant generator family.
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.n as f64
    }

    /// ξ_j = −L + j·dx
    pub fn grid(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n).map(|j| -self.half_period + j as f64 * dx).collect()
    }

    /// Integer mode number of FFT bin j.
    pub fn mode(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Generator symbol iπk/L per FFT bin.
    pub fn symbol(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|j| Complex64::new(0.0, PI * self.mode(j) as f64 / self.half_period))
            .collect()
    }

    /// Grid samples of the single Fourier mode e^{iπkξ/L}.
    pub fn plane_wave(&self, k: i64) -> StateVector {
        let entries = self
            .grid()
            .iter()
            .map(|&x| Complex64::from_polar(1.0, PI * k as f64 * x / self.half_period))
            .collect();
        StateVector::from_raw(entries, NormKind::Euclidean)
    }

    /// Applies a Fourier multiplier given per FFT bin.
    pub fn fourier_multiply(&self, data: &[Complex64], multiplier: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        assert_eq!(data.len(), self.n, "grid size mismatch");
        let mut buf = data.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (j, z) in buf.iter_mut().enumerate() {
            *z *= multiplier(j) * scale;
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Cyclic shift count if t is an integer number of cells.
    pub(crate) fn whole_cells(&self, t: f64) -> Option<i64> {
        let cells = t / self.spacing();
        let r = cells.round();
        if (cells - r).abs() <= 1e-12 * r.abs().max(1.0) {
            Some(r as i64)
        } else {
            None
        }
    }

    /// x ↦ x(· + t)
    pub fn translate(&self, t: f64, data: &[Complex64]) -> Vec<Complex64> {
        if t == 0.0 {
            return data.to_vec();
        }
        if let Some(m) = self.whole_cells(t) {
            let n = self.n as i64;
            return (0..n)
                .map(|j| data[(j + m).rem_euclid(n) as usize])
                .collect();
        }
        let w = PI * t / self.half_period;
        self.fourier_multiply(data, |j| Complex64::from_polar(1.0, w * self.mode(j) as f64))
    }

    /// Spectral derivative d/dξ.
    pub fn derivative(&self, data: &[Complex64]) -> Vec<Complex64> {
        let sym = self.symbol();
        self.fourier_multiply(data, |j| sym[j])
    }
}

impl GeneratorFamily for TranslationGroup {
    fn dimension(&self) -> usize {
        self.n
    }

    fn omega(&self) -> f64 {
        0.0
    }

    fn horizon(&self) -> f64 {
        self.horizon
    }

    fn kind(&self) -> FamilyKind {
        FamilyKind::SpectralShift
    }

    fn norm_kind(&self) -> NormKind {
        NormKind::Euclidean
    }

    fn lipschitz_constant(&self) -> Option<f64> {
        Some(0.0)
    }

    fn generator_action(&self, _t: f64, y: &StateVector) -> StateVector {
        StateVector::from_raw(self.derivative(y.entries()), y.kind())
    }

    fn frozen_exp(&self, _t: f64, tau: f64, y: &StateVector) -> StateVector {
        StateVector::from_raw(self.translate(tau, y.entries()), y.kind())
    }

    fn shifted_inverse(&self, _t: f64, x: &StateVector) -> StateVector {
        let sym = self.symbol();
        let inv: Vec<Complex64> = sym.iter().map(|s| 1.0 / (s - 1.0)).collect();
        StateVector::from_raw(self.fourier_multiply(x.entries(), |j| inv[j]), x.kind())
    }

    fn diagonal(&self, _t: f64) -> Option<Diagonal> {
        Some(Diagonal {
            basis: Basis::Fourier,
            symbol: self.symbol(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(TranslationGroup::new(12, PI).is_err());
        assert!(TranslationGroup::new(1, PI).is_err());
        assert!(TranslationGroup::new(16, 0.0).is_err());
    }

    #[test]
    fn plane_wave_is_eigenfunction() {
        let g = TranslationGroup::new(32, PI).unwrap();
        let x = g.plane_wave(1);
        let t = 0.377;
        let got = g.translate(t, x.entries());
        let phase = Complex64::from_polar(1.0, PI * t / PI);
        let want: Vec<Complex64> = x.entries().iter().map(|z| z * phase).collect();
        assert!(max_diff(&got, &want) < 1e-13);
    }

    #[test]
    fn identity_and_full_period() {
        let g = TranslationGroup::new(64, 2.5).unwrap();
        let data: Vec<Complex64> = (0..64).map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos())).collect();
        assert_eq!(g.translate(0.0, &data), data);
        let full = g.fourier_multiply(&data, |j| {
            Complex64::from_polar(1.0, PI * 2.0 * 2.5 * g.mode(j) as f64 / 2.5)
        });
        assert!(max_diff(&full, &data) < 1e-12);
    }

    #[test]
    fn one_cell_is_cyclic_shift() {
        let g = TranslationGroup::new(16, PI).unwrap();
        let data: Vec<Complex64> = (0..16).map(|j| Complex64::new(j as f64, -(j as f64))).collect();
        let dx = g.spacing();
        // force the spectral route by nudging away from the exact cell check
        let spectral = g.fourier_multiply(&data, |j| {
            Complex64::from_polar(1.0, PI * dx * g.mode(j) as f64 / PI)
        });
        let shifted = g.translate(dx, &data);
        assert_eq!(shifted[0], data[1]);
        assert_eq!(shifted[15], data[0]);
        assert!(max_diff(&spectral, &shifted) < 1e-12);
    }

    #[test]
    fn isometry_and_group_law() {
        let g = TranslationGroup::new(64, PI).unwrap();
        let data: Vec<Complex64> = (0..64).map(|j| Complex64::new((j as f64 * 0.7).sin(), 0.1 * j as f64)).collect();
        let y = StateVector::new(data, NormKind::Euclidean).unwrap();
        let a = g.frozen_exp(0.0, 0.31, &y);
        assert!((a.norm() - y.norm()).abs() <= 1e-12 * y.norm());
        let ab = g.frozen_exp(0.0, 0.52, &a);
        let direct = g.frozen_exp(0.0, 0.83, &y);
        assert!(ab.distance(&direct) <= 1e-12 * y.norm());
    }

    #[test]
    fn band_limited_translation_is_pointwise() {
        let g = TranslationGroup::new(32, PI).unwrap();
        let f = |x: f64| Complex64::new((3.0 * x).cos() + 0.5 * (x).sin(), (2.0 * x).sin());
        let data: Vec<Complex64> = g.grid().iter().map(|&x| f(x)).collect();
        let t = 0.123;
        let got = g.translate(t, &data);
        let want: Vec<Complex64> = g.grid().iter().map(|&x| f(x + t)).collect();
        assert!(max_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn shifted_inverse_inverts() {
        let g = TranslationGroup::new(16, PI).unwrap();
        let y = g.plane_wave(3).add(&g.plane_wave(-2));
        let x = g.shifted_inverse(0.0, &y);
        let mut back = g.generator_action(0.0, &x);
        back.axpy(Complex64::new(-1.0, 0.0), &x);
        assert!(back.distance(&y) < 1e-12 * y.norm());
    }
}
