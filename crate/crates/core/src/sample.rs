//! Seeded random matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::matcore::{c, hermitian_part, r, trace, CMatrix, CVector, C64};

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian (`E|z|² = 1`).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    c(normal(rng) * s, normal(rng) * s)
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

pub fn complex_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    hermitian_part(&ginibre(n, rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, rng).qr();
    let (mut q, rr) = qr.unpack();
    for j in 0..n {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { r(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Wishart-type positive semidefinite matrix.
pub fn psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    (&g * g.adjoint()).unscale(n as f64)
}

/// Random positive definite density matrix with trace one.
pub fn density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let p = psd(n, rng) + CMatrix::identity(n, n).scale(0.05);
    let t = trace(&p).re;
    p.unscale(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{dist, min_eig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..7 {
            let u = unitary(n, &mut rng);
            assert!(dist(&(u.adjoint() * &u), &CMatrix::identity(n, n)) < 1e-12);
        }
    }

    #[test]
    fn density_is_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = density(4, &mut rng);
        assert!((trace(&p).re - 1.0).abs() < 1e-14);
        assert!(min_eig(&p) > 0.0);
    }
}
