//! Adaptive Dormand–Prince 5(4) integrator for complex linear systems,
//! used as an independent reference for the product formula.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::state::StateVector;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 10_000_000,
        }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self::with_tol(1e-12)
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub y: Vec<Complex64>,
    pub steps: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates y' = f(t, y) from t0 to t1 (either direction).
pub fn integrate<F>(f: F, t0: f64, t1: f64, y0: &[Complex64], opts: OdeOptions) -> Result<OdeSolution>
where
    F: Fn(f64, &[Complex64]) -> Vec<Complex64>,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidArgument("ODE tolerances must be positive".into()));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    if t0 == t1 {
        return Ok(OdeSolution { y, steps: 0, rejected: 0 });
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut h = 0.01 * span * opts.rtol.powf(0.2).max(1e-3);
    let mut k: Vec<Vec<Complex64>> = vec![Vec::new(); 7];
    k[0] = f(t, &y);
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut stage = vec![Complex64::new(0.0, 0.0); n];

    while (t1 - t) * dir > 0.0 {
        if steps + rejected >= opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let last = h >= (t1 - t).abs();
        let hs = if last { t1 - t } else { dir * h };
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        acc += kj[i] * (hs * A[s][j]);
                    }
                }
                stage[i] = acc;
            }
            k[s] = f(t + C[s] * hs, &stage);
        }
        // stage 7 is the 5th-order solution (FSAL)
        let mut err = 0.0f64;
        for i in 0..n {
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                e += k[s][i] * ((B5[s] - B4[s]) * hs);
            }
            let scale = opts.atol + opts.rtol * y[i].norm().max(stage[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error estimate at t = {t}")));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y.copy_from_slice(&stage);
            k[0] = k[6].clone();
            steps += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = hs.abs() * factor;
        if h < 1e-14 * span {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
    }
    Ok(OdeSolution { y, steps, rejected })
}

/// U(t,s)y by integrating ẋ = A(τ)x from s to t.
pub fn oracle_propagate<F: GeneratorFamily + ?Sized>(
    family: &F,
    t: f64,
    s: f64,
    y: &StateVector,
    opts: OdeOptions,
) -> Result<StateVector> {
    crate::family::check_time(family, t)?;
    crate::family::check_time(family, s)?;
    let kind = y.kind();
    let rhs = |tau: f64, x: &[Complex64]| {
        let v = StateVector::from_raw(x.to_vec(), kind);
        family.generator_action(tau.clamp(0.0, family.horizon()), &v).into_entries()
    };
    let sol = integrate(rhs, s, t, y.entries(), opts)?;
    StateVector::new(sol.y, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_exponential_both_directions() {
        let lam = Complex64::new(-0.3, 2.0);
        let f = |_t: f64, y: &[Complex64]| vec![lam * y[0]];
        let y0 = [Complex64::new(1.0, 0.0)];
        let fwd = integrate(f, 0.0, 2.0, &y0, OdeOptions::with_tol(1e-12)).unwrap();
        assert!((fwd.y[0] - (lam * 2.0).exp()).norm() < 1e-10);
        let back = integrate(f, 2.0, 0.5, &fwd.y, OdeOptions::with_tol(1e-12)).unwrap();
        assert!((back.y[0] - (lam * 0.5).exp()).norm() < 1e-10);
    }

    #[test]
    fn time_dependent_scalar() {
        // y' = i t y  =>  y = e^{i t²/2}
        let f = |t: f64, y: &[Complex64]| vec![Complex64::new(0.0, t) * y[0]];
        let sol = integrate(f, 0.0, 3.0, &[Complex64::new(1.0, 0.0)], OdeOptions::with_tol(1e-12)).unwrap();
        assert!((sol.y[0] - Complex64::from_polar(1.0, 4.5)).norm() < 1e-10);
    }

    #[test]
    fn zero_span_is_identity() {
        let f = |_t: f64, y: &[Complex64]| y.to_vec();
        let y0 = [Complex64::new(0.5, -1.0)];
        assert_eq!(integrate(f, 1.0, 1.0, &y0, OdeOptions::default()).unwrap().y, y0.to_vec());
    }
}
