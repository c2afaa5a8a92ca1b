//! Translation-covariant perturbation B(t) = e^{A₀t}Be^{−A₀t} of the
//! translation group, where U(t,0) = e^{A₀t}e^{Bt}. The product formula
//! converges to it at first order; the Dyson series matches it to quadrature
//! accuracy.

use std::f64::consts::PI;

use evopagator::dyson::{dyson_propagate, truncation_bound, DysonConfig, QuadratureRule};
use evopagator::models::{CompositeFamily, PotentialSpec, TranslationGroup};
use evopagator::Propagator;

fn main() -> evopagator::Result<()> {
    let group = TranslationGroup::new(256, PI)?;
    let y = group.plane_wave(1);
    let family = CompositeFamily::covariant(group, PotentialSpec::hat(), 1.0)?;
    let exact = family.closed_form(1.0, &y)?;

    let mut previous = None;
    for level in 4..=9 {
        let d = Propagator::dyadic(&family, level)?.apply(1.0, 0.0, &y)?.distance(&exact) / y.norm();
        match previous {
            Some(p) => println!("level {level}: distance {d:.3e}, ratio {:.4}", d / p),
            None => println!("level {level}: distance {d:.3e}"),
        }
        previous = Some(d);
    }

    for rule in [QuadratureRule::Trapezoid, QuadratureRule::Simpson] {
        let cfg = DysonConfig { order: 12, nodes_per_unit: 2048, rule };
        let d = dyson_propagate(family.free(), family.perturbation(), 1.0, 0.0, &y, &cfg)?.distance(&exact) / y.norm();
        println!("Dyson K=12 {rule:?}: distance {d:.3e}");
    }
    println!("truncation bound for ‖B‖=1 on [0,1], K=12: {:.3e}", truncation_bound(1.0, 1.0, 12, 0.0));
    Ok(())
}
