//! The periodic translation group as a constant generator family: spectral
//! shifts, the group law, and the resolvent at the shift ω + 1.

use std::f64::consts::PI;

use evopagator::models::TranslationGroup;
use evopagator::GeneratorFamily;

fn main() -> evopagator::Result<()> {
    let g = TranslationGroup::new(64, PI)?;
    let y = g.plane_wave(3);

    // e^{A₀τ}e^{iπkξ/L} = e^{iπkτ/L}e^{iπkξ/L}
    let shifted = g.frozen_exp(0.0, 0.4, &y);
    let expected = y.scale(num_complex::Complex64::from_polar(1.0, 3.0 * 0.4));
    println!("plane-wave shift error {:.2e}", shifted.distance(&expected));

    let composed = g.frozen_exp(0.0, 0.3, &g.frozen_exp(0.0, 0.1, &y));
    println!("group law error {:.2e}", composed.distance(&shifted));
    println!("isometry defect {:.2e}", (shifted.norm() - y.norm()).abs());

    let x = g.shifted_inverse(0.0, &y);
    let back = g.generator_action(0.0, &x).sub(&x.scale((g.omega() + 1.0).into()));
    println!("(A₀ − 1)(A₀ − 1)⁻¹y − y = {:.2e}", back.distance(&y));
    Ok(())
}
