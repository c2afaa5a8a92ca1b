//! Suite configuration: one JSON object with a section per study.
//!
//! Every key has a default and unknown keys are rejected. Dotted overrides
//! (`converge.max_level=12`) are applied to the JSON form before it is
//! deserialised, so they go through exactly the same validation.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dyson::{DysonConfig, QuadratureRule};
use crate::error::{Error, Result};
use crate::models::potential::PotentialSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub output_dir: String,
    pub invariants: InvariantsConfig,
    pub converge: ConvergeConfig,
    pub dyson: DysonCompareConfig,
    pub regularity: RegularityConfig,
    pub escape: EscapeConfig,
    pub closed_form: ClosedFormConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            output_dir: "results".into(),
            invariants: InvariantsConfig::default(),
            converge: ConvergeConfig::default(),
            dyson: DysonCompareConfig::default(),
            regularity: RegularityConfig::default(),
            escape: EscapeConfig::default(),
            closed_form: ClosedFormConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvariantsConfig {
    /// Random Lipschitz matrix families i(H₀ + tH₁).
    pub families: usize,
    pub dimension: usize,
    /// Random (t, r, s, y) draws per random family.
    pub samples: usize,
    /// Draws for each fixed model (constant, Pauli, covariant).
    pub fixed_samples: usize,
    pub min_level: u32,
    pub max_level: u32,
    pub horizon: f64,
    pub stability_samples: usize,
    pub oracle_tol: f64,
    /// Grid size of the covariant hat model.
    pub covariant_grid: usize,
    pub cocycle_tol: f64,
    pub inverse_tol: f64,
    pub contraction_tol: f64,
    pub bound_slack: f64,
    pub y_growth_tol: f64,
}

impl Default for InvariantsConfig {
    fn default() -> Self {
        Self {
            families: 50,
            dimension: 4,
            samples: 4,
            fixed_samples: 100,
            min_level: 4,
            max_level: 8,
            horizon: 1.0,
            stability_samples: 64,
            oracle_tol: 1e-12,
            covariant_grid: 32,
            cocycle_tol: 1e-12,
            inverse_tol: 1e-10,
            contraction_tol: 1e-10,
            bound_slack: 1e-9,
            y_growth_tol: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergeModel {
    /// i(σ_z + tσ_x)
    PauliLinear,
    /// iσ_z
    Constant,
    /// i(H₀ + tH₁) with random Hermitian H₀, H₁
    RandomLinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergeConfig {
    pub model: ConvergeModel,
    pub dimension: usize,
    pub horizon: f64,
    pub t: f64,
    pub s: f64,
    pub min_level: u32,
    pub max_level: u32,
    pub oracle_tol: f64,
    pub order_band: [f64; 2],
    /// Partition level at which the derivative check is run.
    pub derivative_level: u32,
    pub derivative_time: f64,
    /// Difference steps h = 2^−k for k in this range.
    pub derivative_min_exp: u32,
    pub derivative_max_exp: u32,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            model: ConvergeModel::PauliLinear,
            dimension: 4,
            horizon: 1.0,
            t: 1.0,
            s: 0.0,
            min_level: 4,
            max_level: 10,
            oracle_tol: 1e-12,
            order_band: [0.85, 1.15],
            derivative_level: 16,
            derivative_time: 0.5,
            derivative_min_exp: 4,
            derivative_max_exp: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DysonCompareConfig {
    pub grid_size: usize,
    pub half_period: f64,
    pub potential: PotentialSpec,
    pub t: f64,
    pub s: f64,
    pub order: usize,
    pub nodes_per_unit: usize,
    pub rule: QuadratureRule,
    pub min_level: u32,
    pub max_level: u32,
    /// Scalar perturbation iβ used for the truncation certification.
    pub scalar_beta: f64,
    pub scalar_interval: f64,
    pub max_truncation_order: usize,
}

impl Default for DysonCompareConfig {
    fn default() -> Self {
        Self {
            grid_size: 128,
            half_period: PI,
            potential: PotentialSpec::hat(),
            t: 1.0,
            s: 0.0,
            order: 12,
            nodes_per_unit: 2048,
            rule: QuadratureRule::Simpson,
            min_level: 3,
            max_level: 9,
            scalar_beta: 1.0,
            scalar_interval: 1.0,
            max_truncation_order: 8,
        }
    }
}

impl DysonCompareConfig {
    pub fn dyson(&self) -> DysonConfig {
        DysonConfig {
            order: self.order,
            nodes_per_unit: self.nodes_per_unit,
            rule: self.rule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularityConfig {
    pub alphas: Vec<f64>,
    pub include_lipschitz: bool,
    pub include_zero: bool,
    pub depth: u32,
    /// m(t) = W_α(frequency·t)
    pub frequency: f64,
    pub reference_cells: usize,
    pub min_level: u32,
    pub max_level: u32,
    pub t: f64,
}

impl Default for RegularityConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.25, 0.5, 0.75],
            include_lipschitz: true,
            include_zero: true,
            depth: 14,
            frequency: 2.0 * PI,
            reference_cells: 3 << 18,
            min_level: 4,
            max_level: 10,
            t: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EscapeConfig {
    /// Grid sizes N = 2^k for k in this range.
    pub min_grid_exp: u32,
    pub max_grid_exp: u32,
    pub half_period: f64,
    pub alpha: f64,
    pub t: f64,
    /// Initial datum e^{iπkξ/L}.
    pub mode: i64,
    pub growth_doublings: usize,
    pub growth_threshold: f64,
    pub saturation_tol: f64,
    pub jump_fraction: f64,
    pub norm_tol: f64,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        Self {
            min_grid_exp: 8,
            max_grid_exp: 13,
            half_period: PI,
            alpha: 1.0,
            t: 1.0,
            mode: 1,
            growth_doublings: 3,
            growth_threshold: 1.3,
            saturation_tol: 0.1,
            jump_fraction: 0.5,
            norm_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClosedFormConfig {
    pub grid_size: usize,
    pub half_period: f64,
    pub potential: PotentialSpec,
    pub t: f64,
    pub min_level: u32,
    pub max_level: u32,
    pub order: usize,
    pub nodes_per_unit: usize,
    pub rule: QuadratureRule,
    pub ratio_band: [f64; 2],
    pub dyson_tol: f64,
}

impl Default for ClosedFormConfig {
    fn default() -> Self {
        Self {
            grid_size: 256,
            half_period: PI,
            potential: PotentialSpec::hat(),
            t: 1.0,
            min_level: 4,
            max_level: 9,
            order: 12,
            nodes_per_unit: 2048,
            rule: QuadratureRule::Simpson,
            ratio_band: [0.4, 0.65],
            dyson_tol: 1e-8,
        }
    }
}

impl ClosedFormConfig {
    pub fn dyson(&self) -> DysonConfig {
        DysonConfig {
            order: self.order,
            nodes_per_unit: self.nodes_per_unit,
            rule: self.rule,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn level_range(name: &str, lo: u32, hi: u32) -> Result<()> {
    if lo > hi || hi > 30 {
        return Err(Error::Config(format!("{name}: empty or oversized level range {lo}..={hi}")));
    }
    Ok(())
}

fn in_horizon(name: &str, v: f64, horizon: f64) -> Result<()> {
    if (0.0..=horizon).contains(&v) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {v} lies outside [0, {horizon}]")))
    }
}

impl SuiteConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` (or the defaults when `None`) and applies `key=value` overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        // Fill defaults first so overrides can address any documented key.
        let base: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        value = serde_json::to_value(&base).expect("config serialises");
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        Self::from_value(value)
    }

    pub fn validate(&self) -> Result<()> {
        let i = &self.invariants;
        if i.dimension == 0 || i.samples == 0 || i.fixed_samples == 0 {
            return Err(Error::Config("invariants: dimension and sample counts must be positive".into()));
        }
        level_range("invariants", i.min_level, i.max_level)?;
        positive("invariants.horizon", i.horizon)?;
        for (n, v) in [
            ("invariants.oracle_tol", i.oracle_tol),
            ("invariants.cocycle_tol", i.cocycle_tol),
            ("invariants.inverse_tol", i.inverse_tol),
            ("invariants.contraction_tol", i.contraction_tol),
            ("invariants.bound_slack", i.bound_slack),
            ("invariants.y_growth_tol", i.y_growth_tol),
        ] {
            positive(n, v)?;
        }
        if i.stability_samples < 2 {
            return Err(Error::Config("invariants.stability_samples must be >= 2".into()));
        }
        if !i.covariant_grid.is_power_of_two() || i.covariant_grid < 2 || i.covariant_grid > 512 {
            return Err(Error::Config("invariants.covariant_grid must be a power of two in [2, 512]".into()));
        }

        let c = &self.converge;
        positive("converge.horizon", c.horizon)?;
        positive("converge.oracle_tol", c.oracle_tol)?;
        level_range("converge", c.min_level, c.max_level)?;
        if c.max_level - c.min_level < 1 {
            return Err(Error::Config("converge needs at least two levels".into()));
        }
        in_horizon("converge.t", c.t, c.horizon)?;
        in_horizon("converge.s", c.s, c.horizon)?;
        in_horizon("converge.derivative_time", c.derivative_time, c.horizon)?;
        if c.derivative_time + 0.5f64.powi(c.derivative_min_exp as i32) > c.horizon {
            return Err(Error::Config("converge.derivative_time + largest step exceeds the horizon".into()));
        }
        level_range("converge.derivative", c.derivative_min_exp, c.derivative_max_exp)?;
        if c.order_band[0] > c.order_band[1] {
            return Err(Error::Config("converge.order_band is empty".into()));
        }
        if c.model == ConvergeModel::RandomLinear && c.dimension == 0 {
            return Err(Error::Config("converge.dimension must be positive".into()));
        }

        let d = &self.dyson;
        positive("dyson.half_period", d.half_period)?;
        d.potential.validate(d.half_period).map_err(|e| Error::Config(format!("dyson.potential: {e}")))?;
        level_range("dyson", d.min_level, d.max_level)?;
        positive("dyson.t", d.t)?;
        in_horizon("dyson.s", d.s, d.t)?;
        if !d.grid_size.is_power_of_two() || d.grid_size > 512 || d.grid_size < 2 {
            return Err(Error::Config("dyson.grid_size must be a power of two in [2, 512]".into()));
        }
        if d.nodes_per_unit < 2 {
            return Err(Error::Config("dyson.nodes_per_unit must be >= 2".into()));
        }
        positive("dyson.scalar_interval", d.scalar_interval)?;

        let r = &self.regularity;
        for &a in &r.alphas {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::Config(format!("regularity.alphas: {a} not in (0,1]")));
            }
        }
        if r.alphas.is_empty() && !r.include_lipschitz && !r.include_zero {
            return Err(Error::Config("regularity: nothing to sweep".into()));
        }
        if r.depth == 0 {
            return Err(Error::Config("regularity.depth must be >= 1".into()));
        }
        positive("regularity.frequency", r.frequency)?;
        positive("regularity.t", r.t)?;
        level_range("regularity", r.min_level, r.max_level)?;
        if r.max_level == r.min_level {
            return Err(Error::Config("regularity needs at least two levels".into()));
        }
        if r.reference_cells <= 1 << r.max_level {
            return Err(Error::Config("regularity.reference_cells must exceed the finest level".into()));
        }

        let e = &self.escape;
        if e.min_grid_exp < 3 || e.min_grid_exp >= e.max_grid_exp || e.max_grid_exp > 22 {
            return Err(Error::Config("escape: need 3 <= min_grid_exp < max_grid_exp <= 22".into()));
        }
        if !(e.alpha > 0.0 && e.alpha <= 1.0) {
            return Err(Error::Config(format!("escape.alpha {} not in (0,1]", e.alpha)));
        }
        positive("escape.half_period", e.half_period)?;
        PotentialSpec::hat()
            .validate(e.half_period)
            .and(PotentialSpec::weierstrass(e.alpha).validate(e.half_period))
            .map_err(|err| Error::Config(format!("escape.half_period: {err}")))?;
        for (n, v) in [
            ("escape.growth_threshold", e.growth_threshold),
            ("escape.saturation_tol", e.saturation_tol),
            ("escape.jump_fraction", e.jump_fraction),
            ("escape.norm_tol", e.norm_tol),
        ] {
            positive(n, v)?;
        }
        if e.growth_doublings == 0 || e.growth_doublings > (e.max_grid_exp - e.min_grid_exp) as usize {
            return Err(Error::Config("escape.growth_doublings must fit in the grid range".into()));
        }

        let f = &self.closed_form;
        positive("closed_form.half_period", f.half_period)?;
        f.potential
            .validate(f.half_period)
            .map_err(|e| Error::Config(format!("closed_form.potential: {e}")))?;
        if !f.grid_size.is_power_of_two() || f.grid_size > 512 || f.grid_size < 2 {
            return Err(Error::Config("closed_form.grid_size must be a power of two in [2, 512]".into()));
        }
        if !(f.t >= 0.0 && f.t.is_finite()) {
            return Err(Error::Config("closed_form.t must be >= 0".into()));
        }
        level_range("closed_form", f.min_level, f.max_level)?;
        if f.nodes_per_unit < 2 {
            return Err(Error::Config("closed_form.nodes_per_unit must be >= 2".into()));
        }
        positive("closed_form.dyson_tol", f.dyson_tol)?;
        Ok(())
    }
}

/// Sets `a.b.c=value` on an existing key; the value is parsed as JSON and
/// falls back to a plain string.
pub fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{item}' is not key=value")))?;
    let mut node = root;
    for key in path.split('.') {
        node = node
            .as_object_mut()
            .and_then(|m| m.get_mut(key))
            .ok_or_else(|| Error::Config(format!("unknown config key '{path}'")))?;
    }
    *node = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(SuiteConfig::from_json_str("{}").unwrap(), SuiteConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(SuiteConfig::from_json_str(r#"{"sede": 1}"#).is_err());
        assert!(SuiteConfig::from_json_str(r#"{"converge": {"levels": 3}}"#).is_err());
        assert!(SuiteConfig::load(None, &["converge.levels=3".into()]).is_err());
    }

    #[test]
    fn overrides_apply_and_validate() {
        let cfg = SuiteConfig::load(None, &["converge.max_level=8".into(), "dyson.rule=midpoint".into()]).unwrap();
        assert_eq!(cfg.converge.max_level, 8);
        assert_eq!(cfg.dyson.rule, QuadratureRule::Midpoint);
        assert!(SuiteConfig::load(None, &["escape.alpha=1.5".into()]).is_err());
        assert!(SuiteConfig::load(None, &["seed".into()]).is_err());
    }

    #[test]
    fn nested_potential_override() {
        let cfg = SuiteConfig::load(None, &[r#"closed_form.potential={"shape":{"kind":"constant"},"amplitude":0.5,"phase":"real"}"#.into()])
            .unwrap();
        assert_eq!(cfg.closed_form.potential, PotentialSpec::constant(0.5));
    }

    #[test]
    fn defaults_round_trip() {
        let text = serde_json::to_string_pretty(&SuiteConfig::default()).unwrap();
        assert_eq!(SuiteConfig::from_json_str(&text).unwrap(), SuiteConfig::default());
    }
}
