//! Interaction-picture Dyson series for A(t) = A₀ + B(t).
//!
//! With B̃(τ) = e^{−A₀τ}B(τ)e^{A₀τ} the interaction-picture state solves the
//! Volterra equation w(t) = x + ∫_s^t B̃(τ)w(τ)dτ, x = e^{−A₀s}y. Its K-th
//! Picard iterate is the order-K partial sum of the series; the physical
//! propagator candidate is e^{A₀t}w_K(t).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{BoundedPerturbation, GeneratorFamily};
use crate::models::covariant::CompositeFamily;
use crate::product::Propagator;
use crate::record::ExperimentRecord;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    #[default]
    Trapezoid,
    /// Never evaluates the integrand at cell endpoints.
    Midpoint,
    /// Cumulative composite Simpson, fourth order.
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DysonConfig {
    pub order: usize,
    pub nodes_per_unit: usize,
    pub rule: QuadratureRule,
}

impl Default for DysonConfig {
    fn default() -> Self {
        Self {
            order: 12,
            nodes_per_unit: 2048,
            rule: QuadratureRule::Trapezoid,
        }
    }
}

impl DysonConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_unit < 2 {
            return Err(Error::InvalidArgument(format!(
                "nodes_per_unit must be >= 2, got {}",
                self.nodes_per_unit
            )));
        }
        Ok(())
    }

    fn cells(&self, interval: f64) -> usize {
        ((self.nodes_per_unit as f64 * interval).ceil() as usize).max(2)
    }
}

/// B̃(τ)y = e^{−A₀τ}B(τ)e^{A₀τ}y
pub fn interaction_generator<A, B>(a0: &A, b: &B, tau: f64, y: &StateVector) -> StateVector
where
    A: GeneratorFamily + ?Sized,
    B: BoundedPerturbation + ?Sized,
{
    let forward = a0.frozen_exp(0.0, tau, y);
    a0.frozen_exp(0.0, -tau, &b.apply(tau, &forward))
}

/// Interaction-picture values w_0(t), …, w_K(t).
pub fn picard_iterates<A, B>(a0: &A, b: &B, t: f64, s: f64, y: &StateVector, cfg: &DysonConfig) -> Result<Vec<StateVector>>
where
    A: GeneratorFamily + ?Sized,
    B: BoundedPerturbation + ?Sized,
{
    cfg.validate()?;
    if t < s {
        return Err(Error::InvalidArgument(format!("Dyson series needs t >= s, got t={t}, s={s}")));
    }
    let x = a0.frozen_exp(0.0, -s, y);
    let mut finals = vec![x.clone()];
    if cfg.order == 0 || t == s {
        finals.resize(cfg.order + 1, x);
        return Ok(finals);
    }
    let m = cfg.cells(t - s);
    let h = (t - s) / m as f64;
    let node = |j: usize| if j == m { t } else { s + h * j as f64 };
    let zero = StateVector::zeros(x.len(), x.kind());

    match cfg.rule {
        QuadratureRule::Midpoint => {
            let mids: Vec<f64> = (0..m).map(|j| s + h * (j as f64 + 0.5)).collect();
            let mut w_mid = vec![x.clone(); m];
            for _ in 0..cfg.order {
                let g: Vec<StateVector> = mids
                    .iter()
                    .zip(&w_mid)
                    .map(|(&tau, w)| interaction_generator(a0, b, tau, w))
                    .collect();
                let mut acc = x.clone();
                for (j, gj) in g.iter().enumerate() {
                    let mut at_mid = acc.clone();
                    at_mid.axpy(Complex64::new(0.5 * h, 0.0), gj);
                    w_mid[j] = at_mid;
                    acc.axpy(Complex64::new(h, 0.0), gj);
                }
                finals.push(acc);
            }
        }
        QuadratureRule::Trapezoid | QuadratureRule::Simpson => {
            let mut w = vec![x.clone(); m + 1];
            for _ in 0..cfg.order {
                let g: Vec<StateVector> = (0..=m).map(|j| interaction_generator(a0, b, node(j), &w[j])).collect();
                let integral = cumulative_integral(&g, h, cfg.rule, &zero);
                for (wj, ij) in w.iter_mut().zip(&integral) {
                    *wj = x.add(ij);
                }
                finals.push(w[m].clone());
            }
        }
    }
    Ok(finals)
}

fn cumulative_integral(g: &[StateVector], h: f64, rule: QuadratureRule, zero: &StateVector) -> Vec<StateVector> {
    let m = g.len() - 1;
    let mut out = vec![zero.clone(); m + 1];
    let c = |v: f64| Complex64::new(v, 0.0);
    match rule {
        QuadratureRule::Trapezoid => {
            for j in 1..=m {
                let mut next = out[j - 1].clone();
                next.axpy(c(0.5 * h), &g[j - 1]);
                next.axpy(c(0.5 * h), &g[j]);
                out[j] = next;
            }
        }
        QuadratureRule::Simpson => {
            // I_1 from the quadratic through g_0, g_1, g_2; then Simpson over pairs.
            let mut first = zero.clone();
            first.axpy(c(5.0 * h / 12.0), &g[0]);
            first.axpy(c(8.0 * h / 12.0), &g[1]);
            first.axpy(c(-h / 12.0), &g[2]);
            out[1] = first;
            for j in 2..=m {
                let mut next = out[j - 2].clone();
                next.axpy(c(h / 3.0), &g[j - 2]);
                next.axpy(c(4.0 * h / 3.0), &g[j - 1]);
                next.axpy(c(h / 3.0), &g[j]);
                out[j] = next;
            }
        }
        QuadratureRule::Midpoint => unreachable!("midpoint uses its own staggered grid"),
    }
    out
}

/// e^{A₀t}w_K(t): the order-K Dyson approximation to U(t,s)y.
pub fn dyson_propagate<A, B>(a0: &A, b: &B, t: f64, s: f64, y: &StateVector, cfg: &DysonConfig) -> Result<StateVector>
where
    A: GeneratorFamily + ?Sized,
    B: BoundedPerturbation + ?Sized,
{
    let iterates = picard_iterates(a0, b, t, s, y, cfg)?;
    let w = iterates.last().expect("at least the zeroth iterate");
    Ok(a0.frozen_exp(0.0, t, w))
}

/// e^{ωI}(bI)^{K+1}/(K+1)!·e^{bI}
pub fn truncation_bound(b_sup: f64, interval: f64, order: usize, omega: f64) -> f64 {
    let bi = b_sup * interval;
    let mut term = 1.0f64;
    for j in 1..=(order + 1) {
        term *= bi / j as f64;
    }
    (omega * interval + bi).exp() * term
}

/// Per-level distance between U_n(t,s)y on dyadic partitions and the Dyson evaluation.
pub fn dyson_vs_product(
    family: &CompositeFamily,
    t: f64,
    s: f64,
    y: &StateVector,
    cfg: &DysonConfig,
    levels: &[u32],
) -> Result<Vec<ExperimentRecord>> {
    let dyson = dyson_propagate(family.free(), family.perturbation(), t, s, y, cfg)?;
    let provenance = format!(
        "{};t={t};s={s};K={};nodes={};rule={:?}",
        family.label(),
        cfg.order,
        cfg.nodes_per_unit,
        cfg.rule
    );
    let scale = y.norm().max(f64::MIN_POSITIVE);
    levels
        .iter()
        .map(|&level| {
            let prop = Propagator::dyadic(family, level)?;
            let product = prop.apply(t, s, y)?;
            let mesh = prop.partition().mesh();
            ExperimentRecord::new(
                "dyson-compare",
                level as i64,
                mesh,
                "dyson-product-distance",
                product.distance(&dyson) / scale,
                provenance.clone(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::covariant::{CovariantPerturbation, ScalarPerturbation};
    use crate::models::matrix::{random_state, sigma_z, MatrixFamily};
    use crate::models::potential::PotentialSpec;
    use crate::models::spectral::TranslationGroup;
    use crate::state::NormKind;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn scalar(beta: f64) -> ScalarPerturbation {
        ScalarPerturbation {
            dimension: 2,
            value: Complex64::new(0.0, beta),
        }
    }

    fn cfg(order: usize, rule: QuadratureRule) -> DysonConfig {
        DysonConfig {
            order,
            nodes_per_unit: 256,
            rule,
        }
    }

    #[test]
    fn truncation_bound_examples() {
        assert!((truncation_bound(1.0, 1.0, 4, 0.0) - std::f64::consts::E / 120.0).abs() < 1e-15);
        assert_eq!(truncation_bound(0.0, 1.0, 0, 0.0), 0.0);
        assert_eq!(truncation_bound(0.0, 3.0, 7, 1.0), 0.0);
        assert_eq!(truncation_bound(1.0, 1.0, 400, 0.0), 0.0);
    }

    #[test]
    fn order_zero_is_free_evolution() {
        let a0 = MatrixFamily::constant(sigma_z(), 2.0).unwrap();
        let y = StateVector::from_real(&[0.6, 0.8], NormKind::Euclidean).unwrap();
        let got = dyson_propagate(&a0, &scalar(1.0), 1.5, 0.25, &y, &cfg(0, QuadratureRule::Trapezoid)).unwrap();
        let want = a0.frozen_exp(0.0, 1.25, &y);
        assert!(got.distance(&want) < 1e-14);
    }

    #[test]
    fn zero_free_group_gives_bare_perturbation() {
        let a0 = MatrixFamily::constant(crate::linalg::CMatrix::zeros(2, 2), 1.0).unwrap();
        let y = StateVector::from_real(&[1.0, -2.0], NormKind::Euclidean).unwrap();
        let b = scalar(0.7);
        assert_eq!(interaction_generator(&a0, &b, 0.4, &y), b.apply(0.4, &y));
    }

    #[test]
    fn scalar_partial_sums_are_taylor_polynomials() {
        let a0 = MatrixFamily::constant(sigma_z(), 1.0).unwrap();
        let y = StateVector::basis(2, 0, NormKind::Euclidean);
        let beta = 0.8;
        for rule in [QuadratureRule::Trapezoid, QuadratureRule::Midpoint, QuadratureRule::Simpson] {
            let iterates = picard_iterates(&a0, &scalar(beta), 1.0, 0.0, &y, &cfg(6, rule)).unwrap();
            let mut taylor = Complex64::new(0.0, 0.0);
            let mut term = Complex64::new(1.0, 0.0);
            for (k, w) in iterates.iter().enumerate() {
                taylor += term;
                term *= Complex64::new(0.0, beta) / (k + 1) as f64;
                let tol = if rule == QuadratureRule::Simpson { 1e-10 } else { 1e-5 };
                assert!((w[0] - taylor).norm() < tol, "{rule:?} k={k}");
                assert_eq!(w[1], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn trapezoid_refinement_is_second_order() {
        let g = TranslationGroup::new(32, PI).unwrap();
        let b = CovariantPerturbation::new(g.clone(), PotentialSpec::weierstrass(1.0)).unwrap();
        let y = g.plane_wave(1);
        let run = |nodes| {
            let c = DysonConfig {
                order: 4,
                nodes_per_unit: nodes,
                rule: QuadratureRule::Trapezoid,
            };
            dyson_propagate(&g, &b, 1.0, 0.0, &y, &c).unwrap()
        };
        let (r1, r2, r3) = (run(32), run(64), run(128));
        let (d1, d2) = (r1.distance(&r2), r2.distance(&r3));
        let order = (d1 / d2).log2();
        assert!(order >= 1.8, "observed quadrature order {order}");
    }

    #[test]
    fn covariant_interaction_generator_is_constant() {
        let g = TranslationGroup::new(64, PI).unwrap();
        let b = CovariantPerturbation::new(g.clone(), PotentialSpec::hat()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y = random_state(64, NormKind::Euclidean, &mut rng);
        let b0 = b.apply(0.0, &y);
        for &tau in &[0.05, 0.5, 0.93] {
            assert!(interaction_generator(&g, &b, tau, &y).distance(&b0) < 1e-10 * y.norm());
        }
    }

    #[test]
    fn rejects_backward_interval() {
        let a0 = MatrixFamily::constant(sigma_z(), 1.0).unwrap();
        let y = StateVector::basis(2, 0, NormKind::Euclidean);
        assert!(dyson_propagate(&a0, &scalar(1.0), 0.2, 0.5, &y, &DysonConfig::default()).is_err());
    }

    #[test]
    fn zero_perturbation_matches_product() {
        let g = TranslationGroup::new(16, PI).unwrap();
        let fam = CompositeFamily::covariant(g.clone(), PotentialSpec::constant(0.0), 1.0).unwrap();
        let recs = dyson_vs_product(&fam, 0.8, 0.1, &g.plane_wave(2), &cfg(3, QuadratureRule::Trapezoid), &[0, 3]).unwrap();
        assert!(recs.iter().all(|r| r.value <= 1e-12));
    }
}
