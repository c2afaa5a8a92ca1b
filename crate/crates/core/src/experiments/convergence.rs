//! Product-formula error against the ODE oracle, observed order, and the
//! finite-difference derivative check d/dt U(t,s)y = A(t)U(t,s)y.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ConvergeModel, SuiteConfig};
use super::{decreasing, json_f64, thread_pool, StudyKind, StudyOutcome};
use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::models::matrix::{sigma_z, MatrixFamily};
use crate::ode::{oracle_propagate, OdeOptions};
use crate::product::{derivative_residual, observed_order, Propagator};
use crate::state::{NormKind, StateVector};

/// Errors within this multiple of the oracle tolerance are indistinguishable
/// from exact.
const ORACLE_RESOLUTION: f64 = 10.0;

pub fn run_convergence(suite: &SuiteConfig) -> Result<StudyOutcome> {
    let cfg = &suite.converge;
    let family = match cfg.model {
        ConvergeModel::PauliLinear => MatrixFamily::pauli_linear(cfg.horizon),
        ConvergeModel::Constant => MatrixFamily::constant(sigma_z(), cfg.horizon)?,
        ConvergeModel::RandomLinear => {
            let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
            MatrixFamily::random_linear(cfg.dimension, cfg.horizon, &mut rng)
        }
    };
    let provenance = format!("{};oracle=dopri5(tol={:e})", family.describe(), cfg.oracle_tol);
    let y = StateVector::basis(family.dimension(), 0, NormKind::Euclidean);
    let ny = y.norm();

    let oracle = oracle_propagate(&family, cfg.t, cfg.s, &y, OdeOptions::with_tol(cfg.oracle_tol))
        .map_err(|e| Error::Integration(format!("convergence oracle failed: {e}")))?;

    let pool = thread_pool()?;
    let levels: Vec<u32> = (cfg.min_level..=cfg.max_level).collect();
    let errors: Vec<Result<(f64, f64)>> = pool.install(|| {
        levels
            .par_iter()
            .map(|&level| {
                let prop = Propagator::dyadic(&family, level)?;
                let err = prop.apply(cfg.t, cfg.s, &y)?.distance(&oracle) / ny;
                Ok((prop.partition().mesh(), err))
            })
            .collect()
    });

    let mut out = StudyOutcome::new(StudyKind::Converge);
    let (mut meshes, mut errs) = (Vec::new(), Vec::new());
    for (&level, r) in levels.iter().zip(errors) {
        let (mesh, err) = r?;
        out.record(level as i64, mesh, "error", err, &provenance)?;
        meshes.push(mesh);
        errs.push(err);
    }

    if errs.iter().all(|&e| e <= ORACLE_RESOLUTION * cfg.oracle_tol) {
        out.flag("observed-order", "exact");
        out.check("first-order convergence", true, format!("all errors within the oracle resolution {:e}", ORACLE_RESOLUTION * cfg.oracle_tol), None);
    } else {
        let order = observed_order(&meshes, &errs)?;
        let idx = out.record(-1, 0.0, "observed-order", order, &provenance)?;
        let ratio = errs[errs.len() - 1] / errs[0];
        out.record(-1, 0.0, "error-reduction", ratio, &provenance)?;
        let [lo, hi] = cfg.order_band;
        out.check(
            "first-order convergence",
            (lo..=hi).contains(&order),
            format!("observed order {order} (band [{lo}, {hi}])"),
            (!(lo..=hi).contains(&order)).then_some(idx),
        );
        out.flag("observed-order", json_f64(order));
        out.flag("error-reduction", json_f64(ratio));
    }

    // Derivative check at a fixed fine partition.
    let prop = Propagator::dyadic(&family, cfg.derivative_level)?;
    let steps: Vec<f64> = (cfg.derivative_min_exp..=cfg.derivative_max_exp)
        .map(|k| 0.5f64.powi(k as i32))
        .collect();
    let residuals: Vec<Result<f64>> = pool.install(|| {
        steps
            .par_iter()
            .map(|&h| derivative_residual(&prop, cfg.derivative_time, cfg.s.min(cfg.derivative_time), h, &y))
            .collect()
    });
    let mut res = Vec::new();
    for (k, (&h, r)) in (cfg.derivative_min_exp..).zip(steps.iter().zip(residuals)) {
        let r = r? / ny;
        out.record(k as i64, h, "derivative-residual", r, &provenance)?;
        res.push(r);
    }
    // difference quotients carry roundoff of order ε/h
    let roundoff = 64.0 * f64::EPSILON / steps.last().copied().unwrap_or(1.0);
    let shrinking = decreasing(&res) || res.iter().all(|&r| r <= roundoff);
    out.check(
        "derivative residual vanishes with h",
        shrinking,
        format!("residuals {res:?}"),
        None,
    );
    if res.iter().all(|&r| r > 0.0) {
        out.flag("derivative-order", json_f64(observed_order(&steps, &res)?));
    }
    Ok(out)
}
