//! Frozen-coefficient product approximants U_n(t,s).
//!
//! On every cell [t_i, t_{i+1}) the generator is frozen at its left endpoint,
//! so U_n(t,s) is the exact propagator of the piecewise-constant family
//! τ ↦ A(τ_n). For t < s the factors are reversed and their durations negated,
//! which inverts U_n(s,t) exactly because each frozen exponential is a group.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{check_time, graph_norm, GeneratorFamily};
use crate::partition::Partition;
use crate::state::StateVector;
use crate::variation::VariationFunctional;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// One frozen exponential e^{A(freeze)·duration}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub freeze: f64,
    pub duration: f64,
}

pub struct Propagator<'a, F: GeneratorFamily + ?Sized> {
    family: &'a F,
    partition: Partition,
}

pub fn build_propagator<F: GeneratorFamily + ?Sized>(family: &F, partition: Partition) -> Result<Propagator<'_, F>> {
    Propagator::new(family, partition)
}

impl<'a, F: GeneratorFamily + ?Sized> Propagator<'a, F> {
    pub fn new(family: &'a F, partition: Partition) -> Result<Self> {
        let (p, f) = (partition.horizon(), family.horizon());
        if (p - f).abs() > 1e-12 * f.max(1.0) {
            return Err(Error::HorizonMismatch { partition: p, family: f });
        }
        Ok(Self { family, partition })
    }

    /// Uniform dyadic partition with 2^level cells.
    pub fn dyadic(family: &'a F, level: u32) -> Result<Self> {
        Self::new(family, Partition::dyadic(family.horizon(), level)?)
    }

    pub fn family(&self) -> &'a F {
        self.family
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn direction(t: f64, s: f64) -> Direction {
        if t >= s {
            Direction::Forward
        } else {
            Direction::Inverse
        }
    }

    /// Factors of U_n(t,s) in application order (rightmost first).
    pub fn factors(&self, t: f64, s: f64) -> Result<Vec<Factor>> {
        check_time(self.family, t)?;
        check_time(self.family, s)?;
        if t == s {
            return Ok(Vec::new());
        }
        if t < s {
            return Ok(self
                .factors(s, t)?
                .into_iter()
                .rev()
                .map(|f| Factor {
                    freeze: f.freeze,
                    duration: -f.duration,
                })
                .collect());
        }
        let pts = self.partition.points();
        let i = self.partition.locate(s)?.index;
        let j = self.partition.locate(t)?.index;
        let mut out = Vec::with_capacity(j - i + 1);
        if i == j {
            out.push(Factor {
                freeze: pts[i],
                duration: t - s,
            });
            return Ok(out);
        }
        out.push(Factor {
            freeze: pts[i],
            duration: pts[i + 1] - s,
        });
        for k in (i + 1)..j {
            out.push(Factor {
                freeze: pts[k],
                duration: pts[k + 1] - pts[k],
            });
        }
        if t > pts[j] {
            out.push(Factor {
                freeze: pts[j],
                duration: t - pts[j],
            });
        }
        Ok(out)
    }

    /// U_n(t,s)y
    pub fn apply(&self, t: f64, s: f64, y: &StateVector) -> Result<StateVector> {
        let mut x = y.clone();
        for f in self.factors(t, s)? {
            if f.duration != 0.0 {
                x = self.family.frozen_exp(f.freeze, f.duration, &x);
            }
        }
        Ok(x)
    }

    /// ‖U(t,r)U(r,s)y − U(t,s)y‖
    pub fn cocycle_check(&self, t: f64, r: f64, s: f64, y: &StateVector) -> Result<f64> {
        let two_step = self.apply(t, r, &self.apply(r, s, y)?)?;
        Ok(two_step.distance(&self.apply(t, s, y)?))
    }
}

pub fn apply<F: GeneratorFamily + ?Sized>(prop: &Propagator<'_, F>, t: f64, s: f64, y: &StateVector) -> Result<StateVector> {
    prop.apply(t, s, y)
}

pub fn cocycle_check<F: GeneratorFamily + ?Sized>(
    prop: &Propagator<'_, F>,
    t: f64,
    r: f64,
    s: f64,
    y: &StateVector,
) -> Result<f64> {
    prop.cocycle_check(t, r, s, y)
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub result: StateVector,
    /// Level of the accepted iterate (2^levels cells).
    pub levels: u32,
    /// ‖U_k y − U_{k−1} y‖ for k = 1..=levels.
    pub cauchy_errors: Vec<f64>,
}

/// Dyadic refinement until successive iterates differ by less than `tol`.
pub fn refine_until<F: GeneratorFamily + ?Sized>(
    family: &F,
    t: f64,
    s: f64,
    y: &StateVector,
    tol: f64,
    max_levels: u32,
) -> Result<Refinement> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if max_levels < 2 {
        return Err(Error::InvalidArgument(format!("max_levels must be >= 2, got {max_levels}")));
    }
    let mut previous = Propagator::dyadic(family, 0)?.apply(t, s, y)?;
    let mut cauchy_errors = Vec::new();
    for level in 1..=max_levels {
        let current = Propagator::dyadic(family, level)?.apply(t, s, y)?;
        let diff = current.distance(&previous);
        cauchy_errors.push(diff);
        if diff < tol {
            return Ok(Refinement {
                result: current,
                levels: level,
                cauchy_errors,
            });
        }
        previous = current;
    }
    Err(Error::ConvergenceFailure {
        tol,
        levels: max_levels,
        cauchy_errors,
    })
}

/// Least-squares slope of log(error) against log(mesh).
pub fn observed_order(meshes: &[f64], errors: &[f64]) -> Result<f64> {
    if meshes.len() != errors.len() || meshes.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need equally many (>= 2) meshes and errors, got {} and {}",
            meshes.len(),
            errors.len()
        )));
    }
    if let Some(bad) = meshes.iter().chain(errors).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("non-positive entry {bad}")));
    }
    if meshes.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("meshes must be strictly decreasing".into()));
    }
    let n = meshes.len() as f64;
    let xs: Vec<f64> = meshes.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub const SLACK: f64 = 1e-9;

    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + Self::SLACK),
        }
    }

    /// lhs/rhs, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

/// ‖y‖_t ≤ e^{V(t,s)}‖y‖_s
pub fn norm_equivalence_check<F: GeneratorFamily + ?Sized>(
    family: &F,
    vf: &VariationFunctional,
    t: f64,
    s: f64,
    y: &StateVector,
) -> Result<BoundCheck> {
    check_time(family, t)?;
    check_time(family, s)?;
    let v = vf.variation(family, s, t)?;
    Ok(BoundCheck::new(graph_norm(family, t, y), v.exp() * graph_norm(family, s, y)))
}

/// ‖U_n(t,s)y‖_t ≤ e^{V(t,s)+2V(s,s_n)+ω(t−s)}‖y‖_s for t > s.
pub fn graph_norm_bound_check<F: GeneratorFamily + ?Sized>(
    prop: &Propagator<'_, F>,
    vf: &VariationFunctional,
    t: f64,
    s: f64,
    y: &StateVector,
) -> Result<BoundCheck> {
    if !(t > s) {
        return Err(Error::InvalidArgument(format!("bound check needs t > s, got t={t}, s={s}")));
    }
    let family = prop.family();
    let s_n = prop.partition().locate(s)?.t_n;
    let exponent = vf.variation(family, s, t)? + 2.0 * vf.variation(family, s_n, s)? + family.omega() * (t - s);
    let lhs = graph_norm(family, t, &prop.apply(t, s, y)?);
    Ok(BoundCheck::new(lhs, exponent.exp() * graph_norm(family, s, y)))
}

/// Limit version: ‖U(t,s)y‖_t ≤ e^{V(t,s)+ω|t−s|}‖y‖_s, with `evolved` = U(t,s)y
/// supplied by an independent solver.
pub fn limit_bound_check<F: GeneratorFamily + ?Sized>(
    family: &F,
    vf: &VariationFunctional,
    t: f64,
    s: f64,
    y: &StateVector,
    evolved: &StateVector,
) -> Result<BoundCheck> {
    check_time(family, t)?;
    check_time(family, s)?;
    let exponent = vf.variation(family, s, t)? + family.omega() * (t - s).abs();
    Ok(BoundCheck::new(
        graph_norm(family, t, evolved),
        exponent.exp() * graph_norm(family, s, y),
    ))
}

/// ‖(U(t+h,s)y − U(t,s)y)/h − A(t)U(t,s)y‖
pub fn derivative_residual<F: GeneratorFamily + ?Sized>(
    prop: &Propagator<'_, F>,
    t: f64,
    s: f64,
    h: f64,
    y: &StateVector,
) -> Result<f64> {
    let base = prop.apply(t, s, y)?;
    let ahead = prop.apply(t + h, s, y)?;
    let mut quotient = ahead.sub(&base).scale(Complex64::new(1.0 / h, 0.0));
    quotient.axpy(Complex64::new(-1.0, 0.0), &prop.family().generator_action(t, &base));
    Ok(quotient.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::models::matrix::{random_state, sigma_x, sigma_z, MatrixFamily, Modulation};
    use crate::state::NormKind;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e0() -> StateVector {
        StateVector::basis(2, 0, NormKind::Euclidean)
    }

    #[test]
    fn constant_family_is_single_exponential() {
        let fam = MatrixFamily::constant(sigma_z(), 1.0).unwrap();
        let want = linalg::mat_vec(&fam.frozen_matrix(0.0, 0.6), &e0());
        for level in [0, 1, 3, 7] {
            let prop = Propagator::dyadic(&fam, level).unwrap();
            let got = prop.apply(0.8, 0.2, &e0()).unwrap();
            assert!(got.distance(&want) < 1e-13);
        }
    }

    #[test]
    fn single_cell_freezes_at_zero() {
        let fam = MatrixFamily::pauli_linear(1.0);
        let prop = Propagator::new(&fam, Partition::uniform(1.0, 1).unwrap()).unwrap();
        let got = prop.apply(0.7, 0.0, &e0()).unwrap();
        let want = fam.frozen_exp(0.0, 0.7, &e0());
        assert!(got.distance(&want) < 1e-15);
    }

    #[test]
    fn two_cell_factors() {
        let fam = MatrixFamily::pauli_linear(2.0);
        let prop = Propagator::new(&fam, Partition::new(vec![0.0, 1.0, 2.0]).unwrap()).unwrap();
        let f = prop.factors(1.5, 0.5).unwrap();
        assert_eq!(
            f,
            vec![
                Factor { freeze: 0.0, duration: 0.5 },
                Factor { freeze: 1.0, duration: 0.5 }
            ]
        );
        let got = prop.apply(1.5, 0.5, &e0()).unwrap();
        let want = fam.frozen_exp(1.0, 0.5, &fam.frozen_exp(0.0, 0.5, &e0()));
        assert!(got.distance(&want) < 1e-15);
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let fam = MatrixFamily::pauli_linear(1.0);
        let err = Propagator::new(&fam, Partition::uniform(2.0, 4).unwrap()).err();
        assert!(matches!(err, Some(Error::HorizonMismatch { .. })));
        let prop = Propagator::dyadic(&fam, 2).unwrap();
        assert!(matches!(prop.apply(1.5, 0.0, &e0()), Err(Error::OutOfHorizon { .. })));
    }

    #[test]
    fn identity_at_equal_times() {
        let fam = MatrixFamily::pauli_linear(1.0);
        let prop = Propagator::dyadic(&fam, 3).unwrap();
        assert_eq!(prop.apply(0.4, 0.4, &e0()).unwrap(), e0());
    }

    #[test]
    fn refine_constant_and_infinite_tol() {
        let fam = MatrixFamily::constant(sigma_x(), 1.0).unwrap();
        let r = refine_until(&fam, 1.0, 0.0, &e0(), 1e-12, 8).unwrap();
        assert_eq!(r.levels, 1);
        assert!(r.cauchy_errors[0] < 1e-14);

        let lin = MatrixFamily::pauli_linear(1.0);
        let r = refine_until(&lin, 1.0, 0.0, &e0(), f64::INFINITY, 8).unwrap();
        assert_eq!(r.levels, 1);
        let direct = Propagator::dyadic(&lin, 1).unwrap().apply(1.0, 0.0, &e0()).unwrap();
        assert_eq!(r.result, direct);
    }

    #[test]
    fn refine_halves_on_lipschitz_family() {
        let fam = MatrixFamily::pauli_linear(1.0);
        let err = refine_until(&fam, 1.0, 0.0, &e0(), 1e-30, 10).unwrap_err();
        let Error::ConvergenceFailure { cauchy_errors, .. } = err else {
            panic!("expected a convergence failure");
        };
        for w in cauchy_errors[5..].windows(2) {
            let ratio = w[1] / w[0];
            assert!((ratio - 0.5).abs() <= 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn observed_order_examples() {
        assert!((observed_order(&[0.1, 0.05], &[1e-2, 5e-3]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(observed_order(&[0.1, 0.05], &[3.0, 3.0]).unwrap(), 0.0);
        let o = observed_order(&[0.1, 0.05, 0.025], &[1e-2, 5e-3, 2.5e-3]).unwrap();
        assert!((o - 1.0).abs() < 1e-12);
        assert!(observed_order(&[0.1, 0.05], &[0.0, 1.0]).is_err());
        assert!(observed_order(&[0.05, 0.1], &[1.0, 1.0]).is_err());
        assert!(observed_order(&[0.1], &[1.0]).is_err());
    }

    #[test]
    fn constant_bound_reduces_to_quasi_contraction() {
        let fam = MatrixFamily::constant(sigma_z(), 1.0).unwrap();
        let vf = VariationFunctional::lipschitz(&fam, 4).unwrap();
        let prop = Propagator::dyadic(&fam, 3).unwrap();
        let y = StateVector::new(
            vec![Complex64::new(0.3, -0.2), Complex64::new(1.0, 0.5)],
            NormKind::Euclidean,
        )
        .unwrap();
        let check = graph_norm_bound_check(&prop, &vf, 0.9, 0.1, &y).unwrap();
        assert!(check.holds);
        assert!((check.lhs - check.rhs).abs() < 1e-12 * check.rhs);
    }

    #[test]
    fn derivative_residual_on_constant_family() {
        // e^{Ah}: residual ≈ h‖A²y‖/2
        let fam = MatrixFamily::constant(sigma_z(), 1.0).unwrap();
        let prop = Propagator::dyadic(&fam, 0).unwrap();
        let h = 1e-4;
        let r = derivative_residual(&prop, 0.5, 0.0, h, &e0()).unwrap();
        assert!((r - h / 2.0).abs() < 1e-3 * h);
    }

    #[test]
    fn weierstrass_modulated_family_propagates_unitarily() {
        let fam = MatrixFamily::new(
            sigma_z(),
            sigma_x(),
            Modulation::Weierstrass {
                alpha: 0.5,
                depth: 12,
                frequency: 1.0,
            },
            1.0,
        )
        .unwrap();
        let prop = Propagator::dyadic(&fam, 6).unwrap();
        let z = prop.apply(1.0, 0.0, &e0()).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn inverse_and_cocycle(seed in 0u64..1000, level in 1u32..7, a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = MatrixFamily::random_linear(4, 1.0, &mut rng);
            let y = random_state(4, NormKind::Euclidean, &mut rng);
            let prop = Propagator::dyadic(&fam, level).unwrap();
            let fwd = prop.apply(a, b, &y).unwrap();
            prop_assert!((fwd.norm() - y.norm()).abs() <= 1e-12 * y.norm());
            let back = prop.apply(b, a, &fwd).unwrap();
            prop_assert!(back.distance(&y) <= 1e-10 * y.norm());
            prop_assert!(prop.cocycle_check(a, c, b, &y).unwrap() <= 1e-12 * y.norm());
        }

        #[test]
        fn step_two_bound(seed in 0u64..1000, level in 0u32..6, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let (t, s) = if a > b { (a, b) } else { (b, a) };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let fam = MatrixFamily::random_linear(4, 1.0, &mut rng);
            let y = random_state(4, NormKind::Euclidean, &mut rng);
            let vf = VariationFunctional::lipschitz(&fam, 64).unwrap();
            let prop = Propagator::dyadic(&fam, level).unwrap();
            let check = graph_norm_bound_check(&prop, &vf, t, s, &y).unwrap();
            prop_assert!(check.holds, "ratio {}", check.ratio());
            prop_assert!(norm_equivalence_check(&fam, &vf, t, s, &y).unwrap().holds);
        }
    }
}
