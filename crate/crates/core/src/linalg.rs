//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::state::{NormKind, StateVector};

pub type CMatrix = DMatrix<Complex64>;

/// Largest dimension for which operator norms are computed by dense factorisation.
pub const DENSE_LIMIT: usize = 512;

pub fn mat_vec(m: &CMatrix, y: &StateVector) -> StateVector {
    assert_eq!(m.ncols(), y.len(), "matrix/vector dimension mismatch");
    let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for (j, &yj) in y.entries().iter().enumerate() {
        if yj == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, &mij) in out.iter_mut().zip(m.column(j).iter()) {
            *o += mij * yj;
        }
    }
    StateVector::from_raw(out, y.kind())
}

/// Induced operator norm of `m` for the given vector norm: largest singular
/// value for Euclidean, maximal absolute row sum for the max norm.
pub fn operator_norm(m: &CMatrix, kind: NormKind) -> f64 {
    match kind {
        NormKind::Euclidean => spectral_norm(m),
        NormKind::Max => (0..m.nrows())
            .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max),
    }
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol * scale))
}

/// e^{iHτ} for Hermitian H by unitary diagonalisation.
pub fn hermitian_phase_exp(h: &CMatrix, tau: f64) -> CMatrix {
    if h.nrows() == 2 {
        return phase_exp_2x2(h, tau);
    }
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| Complex64::from_polar(1.0, l * tau))
        .collect();
    let mut vd = v.clone();
    for (j, p) in phases.iter().enumerate() {
        for z in vd.column_mut(j).iter_mut() {
            *z *= p;
        }
    }
    vd * v.adjoint()
}

/// Closed form for 2×2 Hermitian H = a·1 + b·σ:
/// e^{iHτ} = e^{iaτ}(cos(|b|τ)·1 + i·sin(|b|τ)·(b·σ)/|b|).
fn phase_exp_2x2(h: &CMatrix, tau: f64) -> CMatrix {
    let a = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let bz = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let off = h[(0, 1)]; // bx - i by
    let r = (bz * bz + off.norm_sqr()).sqrt();
    let c = (r * tau).cos();
    // sin(rτ)/r, continuous at r = 0
    let s = if r * tau.abs() < 1e-8 {
        tau * (1.0 - (r * tau).powi(2) / 6.0)
    } else {
        (r * tau).sin() / r
    };
    let i = Complex64::i();
    let g = Complex64::from_polar(1.0, a * tau);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            g * (c + i * s * bz),
            g * i * s * off,
            g * i * s * off.conj(),
            g * (c - i * s * bz),
        ],
    )
}

/// Dense matrix of a linear action, built column by column.
pub fn dense_from_action(
    dim: usize,
    kind: NormKind,
    action: impl Fn(&StateVector) -> StateVector,
) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = action(&StateVector::basis(dim, j, kind));
        for (i, z) in col.entries().iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_matches_general_path() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.7, -0.2), c(0.7, 0.2), c(-1.1, 0.0)]);
        let fast = phase_exp_2x2(&h, 0.83);
        let eig = h.clone().symmetric_eigen();
        let mut d = CMatrix::zeros(2, 2);
        for k in 0..2 {
            d[(k, k)] = Complex64::from_polar(1.0, eig.eigenvalues[k] * 0.83);
        }
        let slow = &eig.eigenvectors * d * eig.eigenvectors.adjoint();
        assert!((fast - slow).norm() < 1e-14);
    }

    #[test]
    fn phase_exp_is_unitary_and_group() {
        let h = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(i as f64 * 0.5, 0.0)
            } else if i < j {
                c(0.1 * (i + j) as f64, 0.05 * j as f64)
            } else {
                c(0.1 * (i + j) as f64, -0.05 * i as f64)
            }
        });
        assert!(is_hermitian(&h, 1e-14));
        let u = hermitian_phase_exp(&h, 0.4);
        let id = CMatrix::identity(4, 4);
        assert!((u.adjoint() * &u - &id).norm() < 1e-13);
        let uu = hermitian_phase_exp(&h, 0.15) * hermitian_phase_exp(&h, 0.25);
        assert!((uu - u).norm() < 1e-13);
    }

    #[test]
    fn operator_norms() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0), c(0.0, 0.0)]);
        assert!((operator_norm(&m, NormKind::Max) - 3.0).abs() < 1e-15);
        // singular values of [[1,-2],[3i,0]]: M*M = [[10, -2],[-2, 4]]
        let expect = (7.0f64 + 13f64.sqrt()).sqrt();
        assert!((operator_norm(&m, NormKind::Euclidean) - expect).abs() < 1e-13);
    }
}
