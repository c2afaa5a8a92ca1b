//! Dyson series against the product formula, and truncation certification
//! for a scalar perturbation where the series is the exponential's Taylor sum.

use num_complex::Complex64;

use super::config::SuiteConfig;
use super::{decreasing, json_f64, StudyKind, StudyOutcome};
use crate::dyson::{dyson_propagate, dyson_vs_product, truncation_bound, DysonConfig};
use crate::error::Result;
use crate::family::GeneratorFamily;
use crate::models::covariant::{CompositeFamily, ScalarPerturbation};
use crate::models::spectral::TranslationGroup;

/// Grid of the free group in the scalar certification.
const SCALAR_GRID: usize = 16;

pub fn run_dyson_compare(suite: &SuiteConfig) -> Result<StudyOutcome> {
    let cfg = &suite.dyson;
    let mut out = StudyOutcome::new(StudyKind::DysonCompare);

    let group = TranslationGroup::new(cfg.grid_size, cfg.half_period)?;
    let y = group.plane_wave(1);
    let family = CompositeFamily::covariant(group, cfg.potential, cfg.t)?;
    let levels: Vec<u32> = (cfg.min_level..=cfg.max_level).collect();
    let dcfg = cfg.dyson();
    let recs = dyson_vs_product(&family, cfg.t, cfg.s, &y, &dcfg, &levels)?;
    let distances: Vec<f64> = recs.iter().map(|r| r.value).collect();
    for r in recs {
        out.push(r);
    }
    let exact = distances.iter().all(|&d| d <= 1e-12);
    out.check(
        "inter-method distance decreases",
        exact || decreasing(&distances),
        format!("distances {distances:?}"),
        None,
    );

    // Scalar B = iβ over a free translation group: U(t,0) = e^{iβt}e^{A₀t}.
    let free = TranslationGroup::new(SCALAR_GRID, cfg.half_period)?.with_horizon(cfg.scalar_interval);
    let b = ScalarPerturbation {
        dimension: SCALAR_GRID,
        value: Complex64::new(0.0, cfg.scalar_beta),
    };
    let x = free.plane_wave(1);
    let interval = cfg.scalar_interval;
    let exact_state = free
        .frozen_exp(0.0, interval, &x)
        .scale(Complex64::from_polar(1.0, cfg.scalar_beta * interval));
    let provenance = format!("scalar(beta={};N={SCALAR_GRID};interval={interval};{:?})", cfg.scalar_beta, cfg.rule);
    let mut errors = Vec::new();
    let mut all_within = true;
    let mut worst = None;
    for k in 1..=cfg.max_truncation_order {
        let kc = DysonConfig { order: k, ..dcfg };
        let approx = dyson_propagate(&free, &b, interval, 0.0, &x, &kc)?;
        let err = approx.distance(&exact_state) / x.norm();
        let bound = truncation_bound(cfg.scalar_beta.abs(), interval, k, 0.0);
        let idx = out.record(k as i64, 0.0, "truncation-error", err, &provenance)?;
        out.record(k as i64, 0.0, "truncation-bound", bound, &provenance)?;
        if err > bound {
            all_within = false;
            worst.get_or_insert(idx);
        }
        errors.push(err);
    }
    out.check(
        "truncation error within bound",
        all_within,
        format!("errors {errors:?}"),
        worst,
    );
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    out.flag("truncation-factorial-decay", decreasing(&ratios));
    if let Some(last) = distances.last() {
        out.flag("final-inter-method-distance", json_f64(*last));
    }
    Ok(out)
}
