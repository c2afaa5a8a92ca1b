//! Potentials on the circle of circumference 2L.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Σ_{n=1}^{depth} 2^{-αn} cos(2ⁿξ). With α = 1 this is the classical
/// lacunary series Σ 2^{-n} cos(2ⁿξ).
pub fn weierstrass(alpha: f64, depth: u32, xi: f64) -> f64 {
    let mut total = 0.0;
    let mut freq = 1.0f64;
    for n in 1..=depth {
        freq *= 2.0;
        total += (-alpha * n as f64).exp2() * (freq * xi).cos();
    }
    total
}

/// Σ_{n=1}^{depth} 2^{-αn}, the value of the series at ξ = 0 and its sup.
pub fn weierstrass_sup(alpha: f64, depth: u32) -> f64 {
    (1..=depth).map(|n| (-alpha * n as f64).exp2()).sum()
}

/// Piecewise-linear ramp periodised to [−L, L): 0 on [−L, 0], ξ on [0, 1],
/// 1 on [1, L−1], and L − ξ on [L−1, L]. Lipschitz with constant 1.
pub fn lipschitz_hat(half_period: f64, xi: f64) -> f64 {
    let l = half_period;
    let x = (xi + l).rem_euclid(2.0 * l) - l;
    if x <= 0.0 {
        0.0
    } else if x <= 1.0 {
        x
    } else if x <= l - 1.0 {
        1.0
    } else {
        l - x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialShape {
    LipschitzHat,
    /// `depth: None` ties the series depth to the grid's Nyquist frequency.
    Weierstrass { alpha: f64, depth: Option<u32> },
    Constant,
}

/// Whether the multiplier is the real potential f or the skew i·g.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    #[default]
    Real,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub shape: PotentialShape,
    pub amplitude: f64,
    pub phase: Phase,
}

impl PotentialSpec {
    /// The kink potential of the sup-norm counterexample.
    pub fn hat() -> Self {
        Self {
            shape: PotentialShape::LipschitzHat,
            amplitude: 1.0,
            phase: Phase::Real,
        }
    }

    /// i·W_α with grid-tied depth, skew-adjoint multiplier.
    pub fn weierstrass(alpha: f64) -> Self {
        Self {
            shape: PotentialShape::Weierstrass { alpha, depth: None },
            amplitude: 1.0,
            phase: Phase::Imaginary,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            shape: PotentialShape::Constant,
            amplitude: value,
            phase: Phase::Real,
        }
    }

    pub fn validate(&self, half_period: f64) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidModel("non-finite amplitude".into()));
        }
        match self.shape {
            PotentialShape::LipschitzHat if half_period < 2.0 => Err(Error::InvalidModel(format!(
                "hat potential needs L >= 2, got {half_period}"
            ))),
            PotentialShape::Weierstrass { alpha, depth } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::InvalidModel(format!("alpha must lie in (0,1], got {alpha}")));
                }
                if depth == Some(0) {
                    return Err(Error::InvalidModel("series depth must be >= 1".into()));
                }
                let periods = half_period / PI;
                if (periods - periods.round()).abs() > 1e-9 || periods.round() < 1.0 {
                    return Err(Error::InvalidModel(format!(
                        "Weierstrass potential needs L to be a multiple of pi, got {half_period}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Series depth used on a grid of `n` points: 2^depth ≤ Nyquist = πN/(2L).
    pub fn depth_for_grid(&self, n: usize, half_period: f64) -> Option<u32> {
        match self.shape {
            PotentialShape::Weierstrass { depth: Some(d), .. } => Some(d),
            PotentialShape::Weierstrass { depth: None, .. } => {
                let nyquist = PI * n as f64 / (2.0 * half_period);
                Some((nyquist.log2().floor() as u32).max(1))
            }
            _ => None,
        }
    }

    fn real_profile(&self, xi: f64, half_period: f64, depth: u32) -> f64 {
        match self.shape {
            PotentialShape::LipschitzHat => lipschitz_hat(half_period, xi),
            PotentialShape::Weierstrass { alpha, .. } => weierstrass(alpha, depth, xi),
            PotentialShape::Constant => 1.0,
        }
    }

    /// Value at ξ with an explicit series depth (ignored for non-series shapes).
    pub fn eval_with_depth(&self, xi: f64, half_period: f64, depth: u32) -> Complex64 {
        let g = self.amplitude * self.real_profile(xi, half_period, depth);
        match self.phase {
            Phase::Real => Complex64::new(g, 0.0),
            Phase::Imaginary => Complex64::new(0.0, g),
        }
    }

    /// Samples on ξ_j = −L + j·2L/n.
    pub fn sample(&self, n: usize, half_period: f64) -> Vec<Complex64> {
        let depth = self.depth_for_grid(n, half_period).unwrap_or(0);
        let dx = 2.0 * half_period / n as f64;
        (0..n)
            .map(|j| self.eval_with_depth(-half_period + j as f64 * dx, half_period, depth))
            .collect()
    }

    /// Lipschitz constant of ξ ↦ f(ξ), when it is a genuine constant of the model.
    pub fn lipschitz(&self) -> Option<f64> {
        match self.shape {
            PotentialShape::LipschitzHat => Some(self.amplitude.abs()),
            PotentialShape::Constant => Some(0.0),
            PotentialShape::Weierstrass { .. } => None,
        }
    }
}

/// sup over the sample points of |f(ξ+δ) − f(ξ)|, with `samples` points per period.
pub fn modulus_of_continuity(
    pot: &PotentialSpec,
    half_period: f64,
    depth: u32,
    delta: f64,
    samples: usize,
) -> f64 {
    let dx = 2.0 * half_period / samples as f64;
    (0..samples)
        .map(|j| {
            let xi = -half_period + j as f64 * dx;
            (pot.eval_with_depth(xi + delta, half_period, depth)
                - pot.eval_with_depth(xi, half_period, depth))
            .norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::observed_order;

    #[test]
    fn weierstrass_examples() {
        let v = weierstrass(1.0, 20, 0.0);
        assert!((v - (1.0 - 2f64.powi(-20))).abs() < 1e-15);
        let v = weierstrass(1.0, 40, PI);
        assert!((v - (1.0 - 2f64.powi(-40))).abs() < 1e-12);
        let xi = 0.37;
        assert!((weierstrass(0.6, 1, xi) - 2f64.powf(-0.6) * (2.0 * xi).cos()).abs() < 1e-15);
        assert!((weierstrass_sup(1.0, 20) - weierstrass(1.0, 20, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn hat_examples() {
        let l = PI;
        assert_eq!(lipschitz_hat(l, 0.5), 0.5);
        assert_eq!(lipschitz_hat(l, -0.5), 0.0);
        assert_eq!(lipschitz_hat(l, -0.5 + 2.0 * l), 0.0);
        assert_eq!(lipschitz_hat(l, 2.0), 1.0);
        assert!((lipschitz_hat(l, l - 0.25) - 0.25).abs() < 1e-15);
        let n = 20_000;
        let pts: Vec<f64> = (0..n).map(|j| -3.0 * l + 6.0 * l * j as f64 / n as f64).collect();
        for w in pts.windows(2) {
            let d = (lipschitz_hat(l, w[1]) - lipschitz_hat(l, w[0])).abs();
            assert!(d <= (w[1] - w[0]) * (1.0 + 1e-12));
        }
        for &x in &pts {
            let v = lipschitz_hat(l, x);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn grid_tied_depth() {
        let p = PotentialSpec::weierstrass(1.0);
        assert_eq!(p.depth_for_grid(1024, PI), Some(9));
        assert_eq!(p.depth_for_grid(8192, PI), Some(12));
        assert!(p.validate(PI).is_ok());
        assert!(p.validate(3.0).is_err());
        assert!(PotentialSpec::hat().validate(1.5).is_err());
    }

    #[test]
    fn sampled_phases() {
        let s = PotentialSpec::weierstrass(1.0).sample(16, PI);
        assert!(s.iter().all(|z| z.re == 0.0));
        let s = PotentialSpec::hat().sample(16, PI);
        assert!(s.iter().all(|z| z.im == 0.0));
    }

    fn fitted_modulus_slope(pot: &PotentialSpec, depth: u32) -> f64 {
        let meshes: Vec<f64> = (4..=14).map(|k| 2f64.powi(-k)).collect();
        let mods: Vec<f64> = meshes
            .iter()
            .map(|&d| modulus_of_continuity(pot, PI, depth, d, 1 << 12))
            .collect();
        observed_order(&meshes, &mods).unwrap()
    }

    #[test]
    fn modulus_of_continuity_slopes() {
        let hat = fitted_modulus_slope(&PotentialSpec::hat(), 0);
        assert!((hat - 1.0).abs() < 0.05, "hat slope {hat}");
        for alpha in [0.5, 0.75] {
            let w = PotentialSpec {
                shape: PotentialShape::Weierstrass { alpha, depth: Some(30) },
                amplitude: 1.0,
                phase: Phase::Real,
            };
            let slope = fitted_modulus_slope(&w, 30);
            assert!((slope - alpha).abs() < 0.1, "alpha {alpha}: slope {slope}");
        }
    }
}
