//! Grid indicators for states leaving the generator domain: a kinked
//! multiplier keeps the derivative energy bounded with a jump at the kink,
//! while a Weierstrass phase makes it grow with resolution.

use std::f64::consts::PI;

use evopagator::experiments::{derivative_energy, derivative_jump};
use evopagator::models::{PotentialSpec, TranslationGroup};
use num_complex::Complex64;

fn main() -> evopagator::Result<()> {
    let hat = PotentialSpec::hat();
    let weier = PotentialSpec::weierstrass(1.0);
    println!("{:>6} {:>10} {:>10} {:>10}", "N", "kink E", "kink jump", "weier E");
    for k in 8..=13 {
        let n = 1usize << k;
        let group = TranslationGroup::new(n, PI)?;
        let dx = group.spacing();
        let y = group.plane_wave(1);
        let kick = |p: &[Complex64]| -> Vec<Complex64> { p.iter().zip(y.entries()).map(|(p, v)| p.exp() * v).collect() };
        let z1 = kick(&hat.sample(n, PI));
        let z2 = kick(&weier.sample(n, PI));
        println!(
            "{n:>6} {:>10.4} {:>10.4} {:>10.4}",
            derivative_energy(&z1, dx),
            derivative_jump(&z1, dx),
            derivative_energy(&z2, dx)
        );
    }
    Ok(())
}
