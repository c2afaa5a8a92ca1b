//! Evolution-system axioms, quasi-contractivity and the graph-norm bounds,
//! sampled over fixed models and a campaign of random Lipschitz families.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{InvariantsConfig, SuiteConfig};
use super::{json_f64, thread_pool, StudyKind, StudyOutcome};
use crate::error::Result;
use crate::family::{graph_norm, GeneratorFamily};
use crate::models::covariant::CompositeFamily;
use crate::models::matrix::{random_hermitian, random_state, sigma_z, MatrixFamily};
use crate::models::potential::PotentialSpec;
use crate::models::spectral::TranslationGroup;
use crate::ode::{oracle_propagate, OdeOptions};
use crate::product::{graph_norm_bound_check, limit_bound_check, norm_equivalence_check, Propagator};
use crate::variation::VariationFunctional;

struct Case {
    name: String,
    family: Box<dyn GeneratorFamily>,
    samples: usize,
    /// Lipschitz families get the Step-1/2/4 bounds.
    bounds: bool,
    stream: u64,
}

struct Row {
    level: i64,
    mesh: f64,
    metric: &'static str,
    value: f64,
}

struct CaseResult {
    rows: Vec<Row>,
    /// Per level: sup of ‖U_n(t,s)y‖_0/‖y‖_0 over this case's samples.
    y_sup: Vec<f64>,
}

fn cases(cfg: &InvariantsConfig, seed: u64) -> Result<Vec<Case>> {
    let horizon = cfg.horizon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h8 = random_hermitian(8, &mut rng);
    let group = TranslationGroup::new(cfg.covariant_grid, PI)?;
    let mut out = vec![
        Case {
            name: format!("constant(sigma_z;T={horizon})"),
            family: Box::new(MatrixFamily::constant(sigma_z(), horizon)?),
            samples: cfg.fixed_samples,
            bounds: true,
            stream: 1,
        },
        Case {
            name: format!("constant(random-hermitian-8;T={horizon})"),
            family: Box::new(MatrixFamily::constant(h8, horizon)?),
            samples: cfg.fixed_samples,
            bounds: true,
            stream: 2,
        },
        Case {
            name: format!("pauli-linear(T={horizon})"),
            family: Box::new(MatrixFamily::pauli_linear(horizon)),
            samples: cfg.fixed_samples,
            bounds: true,
            stream: 3,
        },
        Case {
            name: format!("covariant-hat(N={};T={horizon})", cfg.covariant_grid),
            family: Box::new(CompositeFamily::covariant(group, PotentialSpec::hat(), horizon)?),
            samples: cfg.fixed_samples,
            bounds: false,
            stream: 4,
        },
    ];
    for i in 0..cfg.families {
        let mut frng = ChaCha8Rng::seed_from_u64(seed);
        frng.set_stream(1000 + i as u64);
        out.push(Case {
            name: format!("random-linear(dim={};family={i};T={horizon})", cfg.dimension),
            family: Box::new(MatrixFamily::random_linear(cfg.dimension, horizon, &mut frng)),
            samples: cfg.samples,
            bounds: true,
            stream: 1000 + i as u64,
        });
    }
    Ok(out)
}

fn run_case(case: &Case, cfg: &InvariantsConfig, seed: u64) -> Result<CaseResult> {
    let fam = case.family.as_ref();
    let horizon = fam.horizon();
    let omega = fam.omega();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case.stream);
    rng.set_word_pos(1 << 20);

    let vf = if case.bounds {
        Some(VariationFunctional::lipschitz(fam, cfg.stability_samples)?)
    } else {
        None
    };
    let levels: Vec<u32> = (cfg.min_level..=cfg.max_level).collect();
    let props = levels
        .iter()
        .map(|&l| Propagator::dyadic(fam, l))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut y_sup = vec![0.0f64; levels.len()];

    for _ in 0..case.samples {
        let a = rng.random_range(0.0..=horizon);
        let b = rng.random_range(0.0..=horizon);
        let (t, s) = if a >= b { (a, b) } else { (b, a) };
        let r_free = rng.random_range(0.0..=horizon);
        let r_frac: f64 = rng.random_range(0.0..1.0);
        let y = random_state(fam.dimension(), fam.norm_kind(), &mut rng);
        let ny = y.norm();

        for (li, prop) in props.iter().enumerate() {
            let level = levels[li] as i64;
            let mesh = prop.partition().mesh();
            let mut row = |metric: &'static str, value: f64| rows.push(Row { level, mesh, metric, value });

            let pts = prop.partition().points();
            let r = pts[((r_frac * pts.len() as f64) as usize).min(pts.len() - 1)];

            row("identity-residual", prop.apply(s, s, &y)?.distance(&y) / ny);
            row("cocycle-residual", prop.cocycle_check(t, r, s, &y)? / ny);
            row("cocycle-residual", prop.cocycle_check(s, r, t, &y)? / ny);
            row("cocycle-offgrid", prop.cocycle_check(t, r_free, s, &y)? / ny);

            let fwd = prop.apply(t, s, &y)?;
            let back = prop.apply(s, t, &fwd)?;
            row("inverse-residual", back.distance(&y) / ny);
            let growth = (omega * (t - s)).exp();
            row("contraction-excess", fwd.norm() / (growth * ny) - 1.0);
            let bwd = prop.apply(s, t, &y)?;
            row("contraction-excess", bwd.norm() / (growth * ny) - 1.0);
            if omega == 0.0 {
                row("unitarity-defect", (fwd.norm() - ny).abs() / ny);
                row("unitarity-defect", (bwd.norm() - ny).abs() / ny);
            }

            if let Some(vf) = &vf {
                row("step1-ratio", norm_equivalence_check(fam, vf, t, s, &y)?.ratio());
                if t > s {
                    row("step2-ratio", graph_norm_bound_check(prop, vf, t, s, &y)?.ratio());
                    // ‖U y‖_0 ≤ e^{V(0,t)}·e^{V(t,s)+2V(s,s_n)+ω(t−s)}·e^{V(s,0)}‖y‖_0
                    let s_n = prop.partition().locate(s)?.t_n;
                    let exponent = vf.variation(fam, 0.0, t)?
                        + vf.variation(fam, s, t)?
                        + 2.0 * vf.variation(fam, s_n, s)?
                        + vf.variation(fam, 0.0, s)?
                        + omega * (t - s);
                    let ratio = graph_norm(fam, 0.0, &fwd) / graph_norm(fam, 0.0, &y);
                    y_sup[li] = y_sup[li].max(ratio);
                    row("y-bound-ratio", ratio / exponent.exp());
                }
            }
        }

        if let Some(vf) = &vf {
            if t > s {
                let limit = oracle_propagate(fam, t, s, &y, OdeOptions::with_tol(cfg.oracle_tol))?;
                let check = limit_bound_check(fam, vf, t, s, &y, &limit)?;
                rows.push(Row {
                    level: -1,
                    mesh: 0.0,
                    metric: "step4-ratio",
                    value: check.ratio(),
                });
            }
        }
    }
    Ok(CaseResult { rows, y_sup })
}

pub fn run_invariants(suite: &SuiteConfig) -> Result<StudyOutcome> {
    let cfg = &suite.invariants;
    let cases = cases(cfg, suite.seed)?;
    let pool = thread_pool()?;
    let results: Vec<Result<CaseResult>> =
        pool.install(|| cases.par_iter().map(|c| run_case(c, cfg, suite.seed)).collect());

    let mut out = StudyOutcome::new(StudyKind::Invariants);
    let levels = (cfg.max_level - cfg.min_level + 1) as usize;
    let mut y_sup = vec![0.0f64; levels];
    for (case, result) in cases.iter().zip(results) {
        let result = result?;
        for row in result.rows {
            out.record(row.level, row.mesh, row.metric, row.value, &case.name)?;
        }
        for (m, v) in y_sup.iter_mut().zip(&result.y_sup) {
            *m = m.max(*v);
        }
    }

    out.check_max("identity", "identity-residual", 0.0);
    out.check_max("cocycle at partition points", "cocycle-residual", cfg.cocycle_tol);
    out.check_max("inverse consistency", "inverse-residual", cfg.inverse_tol);
    out.check_max("quasi-contractivity", "contraction-excess", cfg.contraction_tol);
    out.check_max("unitarity", "unitarity-defect", cfg.contraction_tol);
    out.check_max("step-1 norm equivalence", "step1-ratio", 1.0 + cfg.bound_slack);
    out.check_max("step-2 graph-norm bound", "step2-ratio", 1.0 + cfg.bound_slack);
    out.check_max("step-4 limit bound", "step4-ratio", 1.0 + cfg.bound_slack);
    out.check_max("uniform Y-bound", "y-bound-ratio", 1.0 + cfg.bound_slack);

    // the sampled sup settles as the partition refines; growth is measured level to level
    let growth = y_sup.windows(2).map(|w| w[1] / w[0]).fold(1.0f64, f64::max);
    for (i, &m) in y_sup.iter().enumerate() {
        let level = cfg.min_level as i64 + i as i64;
        let mesh = cfg.horizon * 0.5f64.powi(level as i32);
        out.record(level, mesh, "y-sup", m, "all Lipschitz cases")?;
    }
    out.check(
        "no Y-growth under refinement",
        growth <= 1.0 + cfg.y_growth_tol,
        format!("largest level-to-level ratio {growth}; sups {y_sup:?}"),
        None,
    );
    out.flag("y-sup-growth", json_f64(growth));
    out.flag("cases", cases.len());
    Ok(out)
}
