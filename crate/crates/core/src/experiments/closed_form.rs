//! Product formula and Dyson series against U(t,0) = e^{A₀t}e^{Bt} on the
//! translation-covariant model.

use super::config::SuiteConfig;
use super::{decreasing, json_f64, StudyKind, StudyOutcome};
use crate::dyson::dyson_propagate;
use crate::error::Result;
use crate::models::covariant::CompositeFamily;
use crate::models::spectral::TranslationGroup;
use crate::product::Propagator;

const EXACT: f64 = 1e-12;

pub fn run_closed_form(suite: &SuiteConfig) -> Result<StudyOutcome> {
    let cfg = &suite.closed_form;
    let mut out = StudyOutcome::new(StudyKind::ClosedForm);
    let group = TranslationGroup::new(cfg.grid_size, cfg.half_period)?;
    let y = group.plane_wave(1);
    let horizon = if cfg.t > 0.0 { cfg.t } else { 1.0 };
    let family = CompositeFamily::covariant(group, cfg.potential, horizon)?;
    let closed = family.closed_form(cfg.t, &y)?;
    let ny = y.norm();
    let provenance = format!("{};closed-form oracle", family.label());

    let mut distances = Vec::new();
    for level in cfg.min_level..=cfg.max_level {
        let prop = Propagator::dyadic(&family, level)?;
        let d = prop.apply(cfg.t, 0.0, &y)?.distance(&closed) / ny;
        out.record(level as i64, prop.partition().mesh(), "product-distance", d, &provenance)?;
        distances.push(d);
    }
    let exact = distances.iter().all(|&d| d <= EXACT);
    let ratios: Vec<f64> = distances.windows(2).map(|w| w[1] / w[0]).collect();
    if !exact {
        for (level, r) in (cfg.min_level + 1..).zip(&ratios) {
            out.record(level as i64, 0.0, "product-ratio", *r, &provenance)?;
        }
    }
    out.check(
        "product formula approaches closed form",
        exact || decreasing(&distances),
        format!("distances {distances:?}"),
        None,
    );

    let dyson = dyson_propagate(family.free(), family.perturbation(), cfg.t, 0.0, &y, &cfg.dyson())?;
    let dd = dyson.distance(&closed) / ny;
    let idx = out.record(-1, 0.0, "dyson-distance", dd, &format!("{provenance};K={};nodes={};{:?}", cfg.order, cfg.nodes_per_unit, cfg.rule))?;
    out.check(
        "Dyson evaluation matches closed form",
        dd <= cfg.dyson_tol,
        format!("distance {dd:e} (tol {:e})", cfg.dyson_tol),
        (dd > cfg.dyson_tol).then_some(idx),
    );

    let [lo, hi] = cfg.ratio_band;
    out.flag("product-exact", exact);
    out.flag("product-ratios-in-band", !exact && ratios.iter().all(|r| (lo..=hi).contains(r)));
    out.flag("dyson-distance", json_f64(dd));
    Ok(out)
}
