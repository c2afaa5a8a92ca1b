//! Frozen-coefficient product formula for A(t) = i(σ_z + tσ_x): convergence
//! against an adaptive ODE solution and the Cauchy-difference stopping rule.

use evopagator::models::MatrixFamily;
use evopagator::ode::{oracle_propagate, OdeOptions};
use evopagator::{observed_order, refine_until, NormKind, Propagator, StateVector};

fn main() -> evopagator::Result<()> {
    let family = MatrixFamily::pauli_linear(1.0);
    let y = StateVector::basis(2, 0, NormKind::Euclidean);
    let exact = oracle_propagate(&family, 1.0, 0.0, &y, OdeOptions::with_tol(1e-12))?;

    let (mut meshes, mut errors) = (Vec::new(), Vec::new());
    println!("{:>5} {:>12} {:>12}", "level", "mesh", "error");
    for level in 4..=10 {
        let prop = Propagator::dyadic(&family, level)?;
        let err = prop.apply(1.0, 0.0, &y)?.distance(&exact);
        println!("{level:>5} {:>12.3e} {err:>12.3e}", prop.partition().mesh());
        meshes.push(prop.partition().mesh());
        errors.push(err);
    }
    println!("observed order {:.4}", observed_order(&meshes, &errors)?);

    let refined = refine_until(&family, 1.0, 0.0, &y, 1e-4, 20)?;
    println!(
        "Cauchy differences fell below 1e-4 at level {}: {:?}",
        refined.levels,
        refined.cauchy_errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>()
    );

    // U(t,r)U(r,s) = U(t,s) whenever r is a partition point
    let prop = Propagator::dyadic(&family, 6)?;
    println!("cocycle residual {:.2e}", prop.cocycle_check(0.9, 0.5, 0.1, &y)?);
    Ok(())
}
