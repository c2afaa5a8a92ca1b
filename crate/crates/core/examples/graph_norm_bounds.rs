//! Graph-norm estimates on a random 4×4 family: norm equivalence between
//! times, the bound on the discrete propagator, and the limit bound with the
//! limit supplied by an ODE solve.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use evopagator::models::{random_state, MatrixFamily};
use evopagator::ode::{oracle_propagate, OdeOptions};
use evopagator::product::{graph_norm_bound_check, limit_bound_check, norm_equivalence_check};
use evopagator::{stability_constant, NormKind, Propagator, VariationFunctional};

fn main() -> evopagator::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let family = MatrixFamily::random_linear(4, 1.0, &mut rng);
    let y = random_state(4, NormKind::Euclidean, &mut rng);
    let vf = VariationFunctional::lipschitz(&family, 64)?;
    println!("stability constant C ≈ {:.4}", stability_constant(&family, 64)?);
    println!("V(0,1) = {:.4}", vf.variation(&family, 0.0, 1.0)?);

    let (s, t) = (0.2, 0.9);
    let step1 = norm_equivalence_check(&family, &vf, t, s, &y)?;
    println!("‖y‖_t ≤ e^V ‖y‖_s: {:.6} ≤ {:.6}", step1.lhs, step1.rhs);
    for level in [2, 4, 6, 8] {
        let prop = Propagator::dyadic(&family, level)?;
        let b = graph_norm_bound_check(&prop, &vf, t, s, &y)?;
        println!("level {level}: ‖U_n y‖_t / bound = {:.6}", b.ratio());
    }
    let exact = oracle_propagate(&family, t, s, &y, OdeOptions::default())?;
    let limit = limit_bound_check(&family, &vf, t, s, &y, &exact)?;
    println!("limit: ‖U y‖_t / bound = {:.6} (holds: {})", limit.ratio(), limit.holds);
    Ok(())
}
