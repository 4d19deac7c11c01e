//! Sampled Markov tests on amplified order intervals.
//!
//! An element of `M_n ⊗ A` is an `nN × nN` matrix whose `(i, j)` block of
//! size `N × N` lies in `A`. The amplified interval is
//! `[0, (I_n ⊗ ρ)^{1/2}]`.

use rand::Rng;

use super::WeightedAlgebra;
use crate::matcore::{
    hermitian_part, hermitian_residual, herm_fn, min_eig, r, tensor, CMatrix, Tolerance,
};
use crate::par::Exec;
use crate::{sample, Result};

/// Sample budget and seed for a randomized check.
#[derive(Clone, Copy, Debug)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Sampling {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}

#[derive(Clone, Debug)]
pub struct MarkovVerdict {
    pub pass: bool,
    /// Smallest interval margin of an image; negative values are violations.
    pub worst_margin: f64,
    pub samples: usize,
    /// Interval element whose image has the worst margin.
    pub witness: Option<CMatrix>,
}

/// `(I_n ⊗ ρ)^{1/2}`.
pub fn amplified_bound(w: &WeightedAlgebra, n: usize) -> CMatrix {
    tensor(&CMatrix::identity(n, n), &w.rho_power(0.5))
}

/// `(I_n ⊗ S)(x)` for `S` acting on the coordinates of `A`.
pub fn amplified_apply(w: &WeightedAlgebra, s: &CMatrix, n: usize, x: &CMatrix) -> CMatrix {
    let m = w.matrix_dim();
    let layout = w.layout();
    let mut out = CMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let block = x.view((i * m, j * m), (m, m)).into_owned();
            let img = layout.to_matrix(&(s * layout.from_matrix(&block)));
            out.view_mut((i * m, j * m), (m, m)).copy_from(&img);
        }
    }
    out
}

/// Random Hermitian element of `M_n ⊗ A`.
pub fn amplified_hermitian<R: Rng + ?Sized>(w: &WeightedAlgebra, n: usize, rng: &mut R) -> CMatrix {
    let m = w.matrix_dim();
    let layout = w.layout();
    let mut out = CMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let block = layout.to_matrix(&sample::complex_vector(w.dim(), rng));
            out.view_mut((i * m, j * m), (m, m)).copy_from(&block);
        }
    }
    hermitian_part(&out)
}

/// Rank-one projection of `M_n ⊗ A` supported in a single block of `A`.
fn block_rank_one<R: Rng + ?Sized>(w: &WeightedAlgebra, n: usize, rng: &mut R) -> CMatrix {
    let blocks = w.blocks();
    let k = rng.random_range(0..blocks.len());
    let (off, size) = (w.layout().block_offset(k), blocks[k]);
    let m = w.matrix_dim();
    let mut v = crate::matcore::CVector::zeros(n * m);
    for i in 0..n {
        for a in 0..size {
            v[i * m + off + a] = sample::complex_normal(rng);
        }
    }
    let v = v.unscale(v.norm());
    &v * v.adjoint()
}

/// Interval element for trial `index`. Trials cycle through images
/// `i^(2)(a)` of random `0 ⪯ a ⪯ 1`, of random spectral projections, of
/// rank-one projections inside one block, and eigenvalue-clipped Hermitians
/// in `[0, λ_min(B)]`.
fn interval_sample<R: Rng + ?Sized>(w: &WeightedAlgebra, n: usize, index: usize, rng: &mut R) -> CMatrix {
    let q = tensor(&CMatrix::identity(n, n), &w.rho_power(0.25));
    let embed = |a: &CMatrix| hermitian_part(&(&q * a * &q));
    match index % 4 {
        0 => {
            let h = amplified_hermitian(w, n, rng);
            embed(&herm_fn(&h, |l| r((0.5 + 0.5 * l).clamp(0.0, 1.0))))
        }
        1 => {
            let h = amplified_hermitian(w, n, rng);
            embed(&herm_fn(&h, |l| r(if l > 0.0 { 1.0 } else { 0.0 })))
        }
        2 => embed(&block_rank_one(w, n, rng)),
        _ => {
            let top = min_eig(&amplified_bound(w, n));
            let h = amplified_hermitian(w, n, rng);
            herm_fn(&h, |l| r((top * (0.5 + 0.5 * l)).clamp(0.0, top)))
        }
    }
}

/// Compact rendering of a witness matrix for error messages and reports.
pub fn witness_string(x: &CMatrix) -> String {
    let rows: Vec<String> = x
        .row_iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn margin(x: &CMatrix, bound: &CMatrix) -> f64 {
    min_eig(x).min(min_eig(&(bound - x))) - hermitian_residual(x)
}

/// Sampled test that `I_n ⊗ S` leaves `[0, (I_n ⊗ ρ)^{1/2}]` invariant.
///
/// This is evidence, not a certificate: a pass only says no sampled element
/// left the interval by more than `tol.spectral_slack`.
pub fn is_n_markov_l2(
    w: &WeightedAlgebra,
    s: &CMatrix,
    n: usize,
    sampling: &Sampling,
    tol: &Tolerance,
) -> Result<MarkovVerdict> {
    let d = w.dim();
    if s.shape() != (d, d) {
        return Err(crate::Error::DimensionMismatch(format!(
            "operator is {}x{}, L² has dimension {d}",
            s.nrows(),
            s.ncols()
        )));
    }
    if n == 0 {
        return Err(crate::Error::PreconditionFailed("n must be at least 1".into()));
    }
    let bound = amplified_bound(w, n);
    let results = sampling.exec.trials(sampling.seed, sampling.samples, |i, rng| {
        let x = interval_sample(w, n, i, rng);
        let m = margin(&amplified_apply(w, s, n, &x), &bound);
        (m, x)
    });
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (m, x) in results {
        if m < worst {
            worst = m;
            witness = Some(x);
        }
    }
    Ok(MarkovVerdict {
        pass: worst >= -tol.spectral_slack,
        worst_margin: worst,
        samples: sampling.samples,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{hilbert_implementation, random_kms_markov};
    use super::*;
    use crate::matcore::dist;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m2() -> WeightedAlgebra {
        WeightedAlgebra::diagonal(vec![2], &[2.0 / 3.0, 1.0 / 3.0], &Tolerance::default()).unwrap()
    }

    #[test]
    fn samples_lie_in_interval() {
        let w = WeightedAlgebra::diagonal(vec![2, 1], &[0.5, 0.3, 0.2], &Tolerance::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 1..=3 {
            let bound = amplified_bound(&w, n);
            for i in 0..40 {
                let x = interval_sample(&w, n, i, &mut rng);
                assert!(margin(&x, &bound) > -1e-12, "n={n} i={i}");
            }
        }
    }

    #[test]
    fn identity_and_state_expectation_are_markov() {
        let w = m2();
        let tol = Tolerance::default();
        let d = w.dim();
        let sampling = Sampling::new(60, 1);
        for n in 1..=3 {
            assert!(is_n_markov_l2(&w, &CMatrix::identity(d, d), n, &sampling, &tol).unwrap().pass);
        }
        let s = hilbert_implementation(&w, &w.state_expectation());
        assert!(is_n_markov_l2(&w, &s, 2, &sampling, &tol).unwrap().pass);
    }

    #[test]
    fn transpose_is_positive_but_not_two_markov() {
        let w = m2();
        let tol = Tolerance::default();
        let s = hilbert_implementation(&w, &w.transpose_map());
        let sampling = Sampling::new(80, 2);
        assert!(is_n_markov_l2(&w, &s, 1, &sampling, &tol).unwrap().pass);
        let v = is_n_markov_l2(&w, &s, 2, &sampling, &tol).unwrap();
        assert!(!v.pass);
        let x = v.witness.unwrap();
        assert!(margin(&x, &amplified_bound(&w, 2)) > -1e-12);
        assert!(margin(&amplified_apply(&w, &s, 2, &x), &amplified_bound(&w, 2)) < -1e-3);
    }

    #[test]
    fn kms_symmetric_cp_maps_are_completely_markov() {
        let w = WeightedAlgebra::diagonal(vec![2, 1], &[0.5, 0.3, 0.2], &Tolerance::default()).unwrap();
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = hilbert_implementation(&w, &random_kms_markov(&w, &mut rng, &tol).unwrap());
        for n in 1..=3 {
            assert!(is_n_markov_l2(&w, &s, n, &Sampling::new(60, n as u64), &tol).unwrap().pass);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let w = m2();
        let tol = Tolerance::default();
        let s = hilbert_implementation(&w, &w.transpose_map());
        let a = is_n_markov_l2(&w, &s, 2, &Sampling::new(30, 3).with_exec(Exec::Sequential), &tol).unwrap();
        let b = is_n_markov_l2(&w, &s, 2, &Sampling::new(30, 3).with_exec(Exec::Parallel), &tol).unwrap();
        assert_eq!(a.worst_margin, b.worst_margin);
        assert!(dist(&a.witness.unwrap(), &b.witness.unwrap()) == 0.0);
    }
}
