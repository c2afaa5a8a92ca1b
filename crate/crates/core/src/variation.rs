//! Scaled total variation V(s,t) of τ ↦ A(τ) in the (Y,X) operator norm.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::family::{op_norm_y_to_x, stability_constant, GeneratorFamily};

/// Relative tolerance for the doubling refinement in sampled mode.
pub const DEFAULT_RTOL: f64 = 1e-6;
/// Maximum number of doublings in sampled mode.
pub const DEFAULT_MAX_DOUBLINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariationMode {
    /// V(s,t) = C·L·|t − s|.
    ExactLipschitz { lipschitz: f64 },
    /// C times the telescoped sum over uniform partitions of [s,t], doubled
    /// until two successive doublings agree to `rtol`.
    SampledSup { rtol: f64, max_doublings: u32 },
}

#[derive(Debug)]
pub struct VariationFunctional {
    constant: f64,
    mode: VariationMode,
    cache: Mutex<HashMap<(u64, u64), f64>>,
}

impl VariationFunctional {
    pub fn new(constant: f64, mode: VariationMode) -> Result<Self> {
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "stability constant must be positive, got {constant}"
            )));
        }
        match mode {
            VariationMode::ExactLipschitz { lipschitz } if !(lipschitz >= 0.0) => {
                return Err(Error::InvalidArgument(format!("negative Lipschitz constant {lipschitz}")))
            }
            VariationMode::SampledSup { rtol, .. } if !(rtol > 0.0) => {
                return Err(Error::InvalidArgument(format!("rtol must be positive, got {rtol}")))
            }
            _ => {}
        }
        Ok(Self {
            constant,
            mode,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Sampled-sup functional with the family's stability constant.
    pub fn sampled<F: GeneratorFamily + ?Sized>(family: &F, samples: usize) -> Result<Self> {
        Self::new(
            stability_constant(family, samples)?,
            VariationMode::SampledSup {
                rtol: DEFAULT_RTOL,
                max_doublings: DEFAULT_MAX_DOUBLINGS,
            },
        )
    }

    /// Lipschitz shortcut, using the family's closed-form constant.
    pub fn lipschitz<F: GeneratorFamily + ?Sized>(family: &F, samples: usize) -> Result<Self> {
        let lipschitz = family.lipschitz_constant().ok_or_else(|| {
            Error::InvalidModel("family has no closed-form Lipschitz constant".into())
        })?;
        Self::new(
            stability_constant(family, samples)?,
            VariationMode::ExactLipschitz { lipschitz },
        )
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn mode(&self) -> VariationMode {
        self.mode
    }

    pub fn variation<F: GeneratorFamily + ?Sized>(&self, family: &F, s: f64, t: f64) -> Result<f64> {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        if lo == hi {
            return Ok(0.0);
        }
        match self.mode {
            VariationMode::ExactLipschitz { lipschitz } => {
                crate::family::check_time(family, lo)?;
                crate::family::check_time(family, hi)?;
                Ok(self.constant * lipschitz * (hi - lo))
            }
            VariationMode::SampledSup { rtol, max_doublings } => {
                let key = (lo.to_bits(), hi.to_bits());
                if let Some(v) = self.cache.lock().unwrap().get(&key) {
                    return Ok(*v);
                }
                let v = self.constant * refined_variation(family, lo, hi, rtol, max_doublings)?;
                self.cache.lock().unwrap().insert(key, v);
                Ok(v)
            }
        }
    }
}

/// Σ ‖A(τ_i) − A(τ_{i-1})‖_{Y,X} over a uniform partition of [lo, hi] with `cells` cells.
pub fn telescoped_sum<F: GeneratorFamily + ?Sized>(
    family: &F,
    lo: f64,
    hi: f64,
    cells: usize,
) -> Result<f64> {
    let node = |i: usize| if i == cells { hi } else { lo + (hi - lo) * i as f64 / cells as f64 };
    let mut total = 0.0;
    for i in 1..=cells {
        total += op_norm_y_to_x(family, node(i), node(i - 1))?;
    }
    Ok(total)
}

/// Doubles until two successive doublings each change the sum by at most
/// `rtol`; a single agreement can be an aliasing accident on dyadic nodes.
fn refined_variation<F: GeneratorFamily + ?Sized>(
    family: &F,
    lo: f64,
    hi: f64,
    rtol: f64,
    max_doublings: u32,
) -> Result<f64> {
    let mut previous = telescoped_sum(family, lo, hi, 1)?;
    let mut agreed = 0;
    for level in 1..=max_doublings {
        let current = telescoped_sum(family, lo, hi, 1usize << level)?;
        if (current - previous).abs() <= rtol * current.abs().max(f64::MIN_POSITIVE) {
            agreed += 1;
            if agreed == 2 {
                return Ok(current);
            }
        } else {
            agreed = 0;
        }
        if level == max_doublings {
            return Err(Error::RefinementFailure {
                levels: max_doublings,
                previous,
                last: current,
            });
        }
        previous = current;
    }
    // max_doublings == 0: a single cell is all that was asked for
    Ok(previous)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::models::matrix::{sigma_x, sigma_z, MatrixFamily, Modulation};

    fn sampled(c: f64) -> VariationFunctional {
        VariationFunctional::new(c, VariationMode::SampledSup { rtol: DEFAULT_RTOL, max_doublings: DEFAULT_MAX_DOUBLINGS })
            .unwrap()
    }

    fn weierstrass_family() -> MatrixFamily {
        let m = Modulation::Weierstrass { alpha: 0.5, depth: 12, frequency: 2.0 * std::f64::consts::PI };
        MatrixFamily::new(sigma_z(), sigma_x(), m, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(VariationFunctional::new(0.0, VariationMode::ExactLipschitz { lipschitz: 1.0 }).is_err());
        assert!(VariationFunctional::new(1.0, VariationMode::ExactLipschitz { lipschitz: -1.0 }).is_err());
        assert!(VariationFunctional::new(1.0, VariationMode::SampledSup { rtol: 0.0, max_doublings: 3 }).is_err());
        assert!(VariationFunctional::lipschitz(&weierstrass_family(), 4).is_err());
    }

    #[test]
    fn lipschitz_mode_is_c_l_times_length() {
        let vf = VariationFunctional::new(2.0, VariationMode::ExactLipschitz { lipschitz: 3.0 }).unwrap();
        let fam = MatrixFamily::pauli_linear(1.0);
        assert!((vf.variation(&fam, 0.25, 0.75).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(vf.variation(&fam, 0.4, 0.4).unwrap(), 0.0);
        assert!(vf.variation(&fam, 0.0, 2.0).is_err());
    }

    #[test]
    fn linear_family_telescopes_exactly() {
        let fam = MatrixFamily::pauli_linear(1.0);
        let per_unit = op_norm_y_to_x(&fam, 1.0, 0.0).unwrap();
        for cells in [1, 2, 7, 64] {
            assert!((telescoped_sum(&fam, 0.2, 0.9, cells).unwrap() - 0.7 * per_unit).abs() < 1e-14);
        }
        let vf = sampled(1.5);
        assert!((vf.variation(&fam, 0.9, 0.2).unwrap() - 1.5 * 0.7 * per_unit).abs() < 1e-14);
    }

    #[test]
    fn rough_family_variation_grows_under_refinement() {
        let fam = weierstrass_family();
        let secant = op_norm_y_to_x(&fam, 0.1, 0.0).unwrap();
        let sums: Vec<f64> = (0..=12).map(|k| telescoped_sum(&fam, 0.0, 0.1, 1 << k).unwrap()).collect();
        // coarse nodes only see a monotone stretch; refinement never loses variation
        assert!(sums.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-14)), "{sums:?}");
        assert!(sums[3..].windows(2).all(|w| w[1] > w[0]), "{sums:?}");
        assert!(sums[12] > 10.0 * secant);
    }

    #[test]
    fn non_convergent_refinement_reports_last_values() {
        let fam = weierstrass_family();
        let vf = VariationFunctional::new(1.0, VariationMode::SampledSup { rtol: 1e-12, max_doublings: 4 }).unwrap();
        match vf.variation(&fam, 0.0, 1.0) {
            Err(Error::RefinementFailure { levels, previous, last }) => {
                assert_eq!(levels, 4);
                assert!(last > previous);
            }
            other => panic!("expected refinement failure, got {other:?}"),
        }
    }

    #[test]
    fn dyadic_aliasing_does_not_stop_refinement() {
        // W(2πt) takes the same value at t = 0, 1/2, 1, so one and two cells both sum to 0
        let fam = weierstrass_family();
        assert_eq!(telescoped_sum(&fam, 0.0, 1.0, 1).unwrap(), 0.0);
        assert_eq!(telescoped_sum(&fam, 0.0, 1.0, 2).unwrap(), 0.0);
        let vf = VariationFunctional::new(1.0, VariationMode::SampledSup { rtol: 1e-6, max_doublings: 12 }).unwrap();
        match vf.variation(&fam, 0.0, 1.0) {
            Ok(v) => assert!(v > 10.0, "{v}"),
            Err(Error::RefinementFailure { last, .. }) => assert!(last > 10.0, "{last}"),
            Err(e) => panic!("{e}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn additive_symmetric_monotone(seed in 0u64..200, a in 0.0f64..1.0, b in 0.0f64..1.0, frac in 0.05f64..0.95) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = MatrixFamily::random_linear(3, 1.0, &mut rng);
            let vf = sampled(1.0);
            let (s, t) = if a < b { (a, b) } else { (b, a) };
            let r = s + frac * (t - s);
            let whole = vf.variation(&fam, s, t).unwrap();
            let split = vf.variation(&fam, s, r).unwrap() + vf.variation(&fam, r, t).unwrap();
            prop_assert!((whole - split).abs() <= 1e-6 * whole.max(1e-300) + 1e-15);
            prop_assert_eq!(whole, vf.variation(&fam, t, s).unwrap());
            prop_assert!(vf.variation(&fam, s, r).unwrap() <= whole + 1e-15);
        }
    }
}
