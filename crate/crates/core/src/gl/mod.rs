//! Non-tracial weighted matrix algebras.
//!
//! `A = ⊕ M_{n_k}` carries the faithful state `φ = Tr(ρ ·)`. The space
//! `L²(A)` is realised as `A` itself with the Hilbert–Schmidt inner product,
//! so the matrix-unit coordinates of a matrix are its `L²` coordinates. An
//! operator on `L²` and a linear map on `A` are both `d × d` coordinate
//! matrices; which one is meant is fixed by the function.

mod dirichlet;
mod markov;
mod reconstruct;
mod sauvageot;

pub use dirichlet::{dirichlet_check, DirichletVerdict, QuadraticForm};
pub use markov::{
    amplified_apply, amplified_bound, amplified_hermitian, is_n_markov_l2, witness_string, MarkovVerdict,
    Sampling,
};
pub use reconstruct::{reconstruct_algebra_operator, Reconstruction};
pub use sauvageot::{sauvageot_synthesize, IntervalSpec, Synthesis};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::layout::BlockLayout;
use crate::matcore::{
    c, dist, frac_power, hermitian_residual, herm_fn, max_abs, min_eig, r, trace, CMatrix, Tolerance,
    C64,
};
use crate::{sample, Error, Result};

/// Smallest eigenvalue of `ρ` accepted at construction.
pub const MIN_RHO_EIGENVALUE: f64 = 1e-8;

/// Linear map on the algebra, as a coordinate matrix.
pub type Superoperator = CMatrix;

#[derive(Clone, Debug)]
pub struct WeightedAlgebra {
    layout: BlockLayout,
    rho: CMatrix,
    rho_quarter: CMatrix,
    rho_neg_quarter: CMatrix,
}

impl WeightedAlgebra {
    pub fn new(blocks: Vec<usize>, rho: CMatrix, tol: &Tolerance) -> Result<Self> {
        let layout = BlockLayout::new(blocks)?;
        let n = layout.matrix_dim();
        if rho.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "rho is {}x{}, algebra acts on C^{n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let violation = layout.block_violation(&rho);
        if violation > tol.structural {
            return Err(Error::BlockViolation { residual: violation });
        }
        let herm = hermitian_residual(&rho);
        if herm > tol.structural {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = trace(&rho);
        if (tr - 1.0).norm() > tol.structural {
            return Err(Error::PreconditionFailed(format!("Tr(rho) = {tr}, expected 1")));
        }
        let lo = min_eig(&rho);
        if lo < MIN_RHO_EIGENVALUE {
            return Err(Error::SingularRho { min: lo });
        }
        let rho_quarter = frac_power(&rho, 0.25, tol)?;
        let rho_neg_quarter = frac_power(&rho, -0.25, tol)?;
        Ok(Self {
            layout,
            rho,
            rho_quarter,
            rho_neg_quarter,
        })
    }

    /// `ρ = diag(eigenvalues)` on `blocks`.
    pub fn diagonal(blocks: Vec<usize>, eigenvalues: &[f64], tol: &Tolerance) -> Result<Self> {
        Self::new(blocks, crate::matcore::diag(eigenvalues), tol)
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn blocks(&self) -> &[usize] {
        self.layout.blocks()
    }

    /// Linear dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// Size of the matrices, `Σ n_k`.
    pub fn matrix_dim(&self) -> usize {
        self.layout.matrix_dim()
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    /// `ρ^α`; exponents `±1/4` are cached.
    pub fn rho_power(&self, alpha: f64) -> CMatrix {
        if alpha == 0.25 {
            return self.rho_quarter.clone();
        }
        if alpha == -0.25 {
            return self.rho_neg_quarter.clone();
        }
        herm_fn(&self.rho, |l| r(l.powf(alpha)))
    }

    /// `ρ^{it}`.
    pub fn rho_it(&self, t: f64) -> CMatrix {
        herm_fn(&self.rho, |l| C64::from_polar(1.0, t * l.ln()))
    }

    pub fn state(&self, a: &CMatrix) -> C64 {
        trace(&(&self.rho * a))
    }

    /// Coordinate matrix of `x ↦ ρ^α x ρ^α`.
    pub fn conjugation(&self, alpha: f64) -> Superoperator {
        let p = self.rho_power(alpha);
        self.layout.sandwich(&p, &p)
    }

    /// Modular automorphism `σ_t(a) = ρ^{it} a ρ^{-it}`.
    pub fn modular_automorphism(&self, t: f64) -> Superoperator {
        self.layout.sandwich(&self.rho_it(t), &self.rho_it(-t))
    }

    /// `a ↦ φ(a)·1`.
    pub fn state_expectation(&self) -> Superoperator {
        let d = self.dim();
        let unit = self.layout.unit();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            let phi = self.state(&self.layout.matrix_unit(j));
            out.set_column(j, &(&unit * phi));
        }
        out
    }

    /// Conditional expectation onto the diagonal matrices.
    pub fn diagonal_expectation(&self) -> Superoperator {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            let (_, a, b) = self.layout.entry(i);
            if a == b {
                out[(i, i)] = c(1.0, 0.0);
            }
        }
        out
    }

    /// Transpose map `a ↦ aᵀ` in every block.
    pub fn transpose_map(&self) -> Superoperator {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            let (k, a, b) = self.layout.entry(i);
            out[(self.layout.index(k, b, a), i)] = c(1.0, 0.0);
        }
        out
    }

    fn checked(&self, a: &CMatrix, tol: f64) -> Result<()> {
        let n = self.matrix_dim();
        if a.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {n}x{n} matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let v = self.layout.block_violation(a);
        if v > tol {
            return Err(Error::BlockViolation { residual: v });
        }
        Ok(())
    }

    /// Applies a superoperator to a matrix of the algebra.
    pub fn apply(&self, t: &Superoperator, a: &CMatrix) -> CMatrix {
        self.layout.to_matrix(&(t * self.layout.from_matrix(a)))
    }
}

/// Weighted algebra description: `{"blocks": [2, 1], "rho": [[re, im], ...]}`
/// with `rho` listing the block entries in matrix-unit order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedAlgebraSpec {
    pub blocks: Vec<usize>,
    pub rho: Vec<(f64, f64)>,
}

impl WeightedAlgebraSpec {
    pub fn build(&self, tol: &Tolerance) -> Result<WeightedAlgebra> {
        let layout = BlockLayout::new(self.blocks.clone())?;
        if self.rho.len() != layout.dim() {
            return Err(Error::Parse(format!(
                "`rho` has {} entries, expected {}",
                self.rho.len(),
                layout.dim()
            )));
        }
        let coords = crate::matcore::CVector::from_iterator(
            layout.dim(),
            self.rho.iter().map(|&(re, im)| c(re, im)),
        );
        WeightedAlgebra::new(self.blocks.clone(), layout.to_matrix(&coords), tol)
    }
}

/// Element of `L^p(A)` realised as a matrix.
#[derive(Clone, Debug)]
pub struct LpElement {
    pub p: f64,
    pub value: CMatrix,
}

impl LpElement {
    /// `(Tr|x|^p)^{1/p}`, or the operator norm for `p = ∞`.
    pub fn norm(&self) -> f64 {
        if self.p.is_infinite() {
            return crate::matcore::op_norm(&self.value);
        }
        // singular values of x are square roots of the eigenvalues of x*x
        let (vals, _) = crate::matcore::herm_eig_unchecked(&(self.value.adjoint() * &self.value));
        vals.iter().map(|v| v.max(0.0).powf(self.p / 2.0)).sum::<f64>().powf(1.0 / self.p)
    }
}

/// `i^(p)(a) = ρ^{1/2p} a ρ^{1/2p}`; `p = ∞` gives `a`.
pub fn embed_i(w: &WeightedAlgebra, p: f64, a: &CMatrix, tol: &Tolerance) -> Result<LpElement> {
    if !(p >= 1.0) {
        return Err(Error::PreconditionFailed(format!("embed_i needs p ≥ 1, got {p}")));
    }
    w.checked(a, tol.structural)?;
    let s = w.rho_power(1.0 / (2.0 * p));
    Ok(LpElement {
        p,
        value: &s * a * &s,
    })
}

/// `j^(q)(a) = a ρ^{1/q}`; `q = ∞` gives `a`.
pub fn embed_j(w: &WeightedAlgebra, q: f64, a: &CMatrix, tol: &Tolerance) -> Result<LpElement> {
    if !(q >= 2.0) {
        return Err(Error::PreconditionFailed(format!("embed_j needs q ≥ 2, got {q}")));
    }
    w.checked(a, tol.structural)?;
    Ok(LpElement {
        p: q,
        value: a * w.rho_power(1.0 / q),
    })
}

/// Membership of `x` in `[0, ρ^{1/p}]`.
pub fn order_interval_membership(w: &WeightedAlgebra, p: f64, x: &CMatrix, tol: &Tolerance) -> bool {
    interval_margin(w, p, x) >= -tol.spectral_slack
}

/// `min(λ_min(x), λ_min(ρ^{1/p} − x))` minus the Hermitian defect of `x`.
pub fn interval_margin(w: &WeightedAlgebra, p: f64, x: &CMatrix) -> f64 {
    let upper = w.rho_power(1.0 / p);
    min_eig(x).min(min_eig(&(upper - x))) - hermitian_residual(x)
}

/// Checks `Tr(T(a) ρ^{1/2} b ρ^{1/2}) = Tr(ρ^{1/2} a ρ^{1/2} T(b))` on all
/// pairs of matrix units. Returns the verdict and the largest residual.
pub fn is_kms_symmetric(w: &WeightedAlgebra, t: &Superoperator, tol: &Tolerance) -> (bool, f64) {
    let residual = kms_residual(w, t);
    (residual <= tol.structural * (1.0 + max_abs(t)), residual)
}

pub fn kms_residual(w: &WeightedAlgebra, t: &Superoperator) -> f64 {
    let d = w.dim();
    let half = w.conjugation(0.5);
    let images: Vec<CMatrix> = (0..d).map(|i| w.layout.to_matrix(&t.column(i).into_owned())).collect();
    let weighted: Vec<CMatrix> = (0..d).map(|i| w.layout.to_matrix(&half.column(i).into_owned())).collect();
    let mut worst: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            let lhs = trace(&(&images[a] * &weighted[b]));
            let rhs = trace(&(&weighted[a] * &images[b]));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// `S = D_{1/4} T D_{-1/4}` with `D_α(x) = ρ^α x ρ^α`.
pub fn hilbert_implementation(w: &WeightedAlgebra, t: &Superoperator) -> CMatrix {
    w.conjugation(0.25) * t * w.conjugation(-0.25)
}

/// Inverse of [`hilbert_implementation`].
pub fn algebra_operator(w: &WeightedAlgebra, s: &CMatrix) -> Superoperator {
    w.conjugation(-0.25) * s * w.conjugation(0.25)
}

/// KMS adjoint `T♮ = D_{-1/2} T^† D_{1/2}`, characterised by
/// `Tr(T(a)* ρ^{1/2} b ρ^{1/2}) = Tr(a* ρ^{1/2} T♮(b) ρ^{1/2})`.
pub fn kms_adjoint(w: &WeightedAlgebra, t: &Superoperator) -> Superoperator {
    w.conjugation(-0.5) * t.adjoint() * w.conjugation(0.5)
}

/// `(T + T♮)/2`.
pub fn kms_symmetrize(w: &WeightedAlgebra, t: &Superoperator) -> Superoperator {
    (t + kms_adjoint(w, t)).scale(0.5)
}

/// Random unital completely positive `φ`-preserving map on `w`.
///
/// Kraus operators on `C^N` are normalised by operator Sinkhorn scaling to
/// `Σ K*K = 1` and `Σ K ρ K* = ρ`, then compressed to the block diagonal.
pub fn random_markov<R: Rng + ?Sized>(w: &WeightedAlgebra, kraus: usize, rng: &mut R, tol: &Tolerance) -> Result<Superoperator> {
    let n = w.matrix_dim();
    let mut ks: Vec<CMatrix> = (0..kraus.max(1)).map(|_| sample::ginibre(n, rng)).collect();
    let rho_half = w.rho_power(0.5);
    let eye = CMatrix::identity(n, n);
    let mut err = f64::INFINITY;
    for _ in 0..tol.dykstra_max_iter {
        let x: CMatrix = ks.iter().map(|k| k.adjoint() * k).sum();
        let x_inv_half = frac_power(&crate::matcore::hermitian_part(&x), -0.5, tol)?;
        for k in ks.iter_mut() {
            *k = &*k * &x_inv_half;
        }
        let y: CMatrix = ks.iter().map(|k| k * w.rho() * k.adjoint()).sum();
        let y_inv_half = frac_power(&crate::matcore::hermitian_part(&y), -0.5, tol)?;
        let left = &rho_half * y_inv_half;
        for k in ks.iter_mut() {
            *k = &left * &*k;
        }
        let x: CMatrix = ks.iter().map(|k| k.adjoint() * k).sum();
        err = dist(&x, &eye);
        if err < 1e-14 {
            break;
        }
    }
    if err > 1e-12 {
        return Err(Error::NoConvergence {
            iterations: tol.dykstra_max_iter,
            residual: err,
        });
    }
    let d = w.dim();
    let mut out = CMatrix::zeros(d, d);
    for j in 0..d {
        let e = w.layout.matrix_unit(j);
        let img: CMatrix = ks.iter().map(|k| k.adjoint() * &e * k).sum();
        out.set_column(j, &w.layout.from_matrix(&img));
    }
    Ok(out)
}

/// Random KMS-symmetric unital completely positive map: the half-sum of a
/// random Markov map and its KMS adjoint.
pub fn random_kms_markov<R: Rng + ?Sized>(w: &WeightedAlgebra, rng: &mut R, tol: &Tolerance) -> Result<Superoperator> {
    Ok(kms_symmetrize(w, &random_markov(w, 3, rng, tol)?))
}

/// Random element of the algebra with standard complex Gaussian coordinates.
pub fn random_element<R: Rng + ?Sized>(w: &WeightedAlgebra, rng: &mut R) -> CMatrix {
    w.layout.to_matrix(&sample::complex_vector(w.dim(), rng))
}

/// Random element `a` of the algebra with `0 ⪯ a ⪯ 1`.
pub fn random_unit_interval<R: Rng + ?Sized>(w: &WeightedAlgebra, rng: &mut R) -> CMatrix {
    let h = crate::matcore::hermitian_part(&random_element(w, rng));
    herm_fn(&h, |l| r((0.5 + 0.5 * l).clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{diag, hermitian_part, op_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m2() -> WeightedAlgebra {
        WeightedAlgebra::diagonal(vec![2], &[2.0 / 3.0, 1.0 / 3.0], &Tolerance::default()).unwrap()
    }

    fn m2c() -> WeightedAlgebra {
        WeightedAlgebra::diagonal(vec![2, 1], &[0.5, 0.3, 0.2], &Tolerance::default()).unwrap()
    }

    fn rotated_m2c(seed: u64) -> WeightedAlgebra {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sample::unitary(2, &mut rng);
        let block = &u * diag(&[0.5, 0.3]) * u.adjoint();
        let rho = crate::matcore::direct_sum(&[block, diag(&[0.2])]);
        WeightedAlgebra::new(vec![2, 1], rho, &Tolerance::default()).unwrap()
    }

    #[test]
    fn construction_rejects_bad_rho() {
        let tol = Tolerance::default();
        assert!(matches!(
            WeightedAlgebra::diagonal(vec![2], &[1.0, 0.0], &tol),
            Err(Error::SingularRho { .. })
        ));
        let mut rho = diag(&[0.5, 0.3, 0.2]);
        rho[(0, 2)] = c(0.01, 0.0);
        rho[(2, 0)] = c(0.01, 0.0);
        assert!(matches!(
            WeightedAlgebra::new(vec![2, 1], rho, &tol),
            Err(Error::BlockViolation { .. })
        ));
        assert!(WeightedAlgebra::diagonal(vec![2], &[0.5, 0.6], &tol).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let spec: WeightedAlgebraSpec =
            serde_json::from_str(r#"{"blocks":[2,1],"rho":[[0.5,0],[0,0],[0,0],[0.3,0],[0.2,0]]}"#).unwrap();
        let w = spec.build(&Tolerance::default()).unwrap();
        assert!(dist(w.rho(), &diag(&[0.5, 0.3, 0.2])) < 1e-15);
    }

    #[test]
    fn embeddings_of_unit() {
        let w = m2();
        let tol = Tolerance::default();
        let one = CMatrix::identity(2, 2);
        let i2 = embed_i(&w, 2.0, &one, &tol).unwrap();
        assert!(dist(&i2.value, &diag(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()])) < 1e-14);
        let i1 = embed_i(&w, 1.0, &one, &tol).unwrap();
        assert!((trace(&i1.value) - 1.0).norm() < 1e-14);
        assert!((i1.norm() - 1.0).abs() < 1e-12);
        let j2 = embed_j(&w, 2.0, &one, &tol).unwrap();
        assert!(dist(&j2.value, &i2.value) < 1e-14);
        let mut off = CMatrix::zeros(2, 2);
        off[(0, 1)] = c(1.0, 0.0);
        let w3 = m2c();
        let mut bad = CMatrix::zeros(3, 3);
        bad[(0, 2)] = c(1.0, 0.0);
        assert!(matches!(embed_i(&w3, 2.0, &bad, &tol), Err(Error::BlockViolation { .. })));
        assert!(embed_i(&w, 0.5, &off, &tol).is_err());
        assert!(embed_j(&w, 1.5, &off, &tol).is_err());
    }

    #[test]
    fn pairing_independent_of_conjugate_exponents() {
        let w = rotated_m2c(3);
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = sample::psd(3, &mut rng);
            let a = w.layout().to_matrix(&w.layout().from_matrix(&a));
            let b = w.layout().to_matrix(&w.layout().from_matrix(&sample::psd(3, &mut rng)));
            let pair = |p: f64, q: f64| {
                let x = embed_i(&w, p, &a, &tol).unwrap().value;
                let y = embed_i(&w, q, &b, &tol).unwrap().value;
                trace(&(x * y))
            };
            let base = pair(1.0, f64::INFINITY);
            assert!((pair(2.0, 2.0) - base).norm() < 1e-10);
            assert!((pair(4.0, 4.0 / 3.0) - base).norm() < 1e-10);
            assert!((pair(f64::INFINITY, 1.0) - base).norm() < 1e-10);
        }
    }

    #[test]
    fn factorization_and_gns_identities() {
        let w = rotated_m2c(5);
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_element(&w, &mut rng);
        let b = random_element(&w, &mut rng);
        let cc = random_element(&w, &mut rng);
        for p in [1.0, 2.0, 3.5] {
            let lhs = embed_i(&w, p, &(a.adjoint() * &b), &tol).unwrap().value;
            let ja = embed_j(&w, 2.0 * p, &a, &tol).unwrap().value;
            let jb = embed_j(&w, 2.0 * p, &b, &tol).unwrap().value;
            assert!(dist(&lhs, &(ja.adjoint() * jb)) < 1e-10);
        }
        // i^(2)(a) is ∇^{1/4} applied to the GNS vector aρ^{1/2}
        let gns = &a * w.rho_power(0.5);
        let nabla_quarter = w.rho_power(0.25) * &gns * w.rho_power(-0.25);
        assert!(dist(&nabla_quarter, &embed_i(&w, 2.0, &a, &tol).unwrap().value) < 1e-12);
        // x ↦ tr(x i^(1)(b*c)) equals ⟨x Jη(b), Jη(c)⟩ with Jη(b) = ρ^{1/2} b*
        let i1 = embed_i(&w, 1.0, &(b.adjoint() * &cc), &tol).unwrap().value;
        let jb = w.rho_power(0.5) * b.adjoint();
        let jc = w.rho_power(0.5) * cc.adjoint();
        for k in 0..w.dim() {
            let x = w.layout().matrix_unit(k);
            let lhs = trace(&(&x * &i1));
            let rhs = trace(&(&x * &jb * jc.adjoint()));
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn modular_covariance() {
        let w = rotated_m2c(9);
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_element(&w, &mut rng);
        for t in [-1.3, 0.4, 2.0] {
            let u = w.rho_it(t);
            let sigma = &u * &a * u.adjoint();
            for p in [1.0, 2.0, 5.0] {
                let lhs = embed_i(&w, p, &sigma, &tol).unwrap().value;
                let rhs = &u * embed_i(&w, p, &a, &tol).unwrap().value * u.adjoint();
                assert!(dist(&lhs, &rhs) < 1e-10);
            }
            let x = sample::ginibre(3, &mut rng);
            assert!((trace(&(&u * &x * u.adjoint())) - trace(&x)).norm() < 1e-12);
        }
    }

    #[test]
    fn interval_membership() {
        let w = rotated_m2c(1);
        let tol = Tolerance::default();
        for p in [1.0, 2.0, 3.0] {
            let top = w.rho_power(1.0 / p);
            assert!(order_interval_membership(&w, p, &top.scale(0.5), &tol));
            let over = &top + CMatrix::identity(3, 3).scale(1e-3);
            assert!(!order_interval_membership(&w, p, &over, &tol));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = random_unit_interval(&w, &mut rng);
            let x = embed_i(&w, 2.0, &a, &tol).unwrap().value;
            assert!(order_interval_membership(&w, 2.0, &x, &tol));
        }
    }

    #[test]
    fn kms_symmetry_examples() {
        let w = m2();
        let tol = Tolerance::default();
        let d = w.dim();
        assert!(is_kms_symmetric(&w, &CMatrix::identity(d, d), &tol).0);
        assert!(is_kms_symmetric(&w, &w.state_expectation(), &tol).0);
        assert!(is_kms_symmetric(&w, &w.diagonal_expectation(), &tol).0);
        // the modular group is an isometric group on L², not a symmetric map
        let (sym, res) = is_kms_symmetric(&w, &w.modular_automorphism(0.7), &tol);
        assert!(!sym && res > 1e-2);
        let s = hilbert_implementation(&w, &w.modular_automorphism(0.7));
        let d_eye = CMatrix::identity(d, d);
        assert!(dist(&(s.adjoint() * &s), &d_eye) < 1e-12);
        let mut u = CMatrix::zeros(2, 2);
        u[(0, 1)] = c(1.0, 0.0);
        u[(1, 0)] = c(1.0, 0.0);
        let left = w.layout().sandwich(&u, &CMatrix::identity(2, 2));
        assert!(!is_kms_symmetric(&w, &left, &tol).0);
    }

    #[test]
    fn symmetry_equals_self_adjoint_implementation() {
        let w = rotated_m2c(21);
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let t = random_kms_markov(&w, &mut rng, &tol).unwrap();
            let s = hilbert_implementation(&w, &t);
            assert!(is_kms_symmetric(&w, &t, &tol).0);
            assert!(hermitian_residual(&s) < 1e-10);
            assert!(dist(&algebra_operator(&w, &s), &t) < 1e-10);
            let raw = random_markov(&w, 2, &mut rng, &tol).unwrap();
            assert!(!is_kms_symmetric(&w, &raw, &tol).0);
            assert!(hermitian_residual(&hilbert_implementation(&w, &raw)) > 1e-6);
        }
    }

    #[test]
    fn random_markov_maps_are_unital_states_preserving_cp() {
        let w = rotated_m2c(13);
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = random_kms_markov(&w, &mut rng, &tol).unwrap();
        let one = CMatrix::identity(3, 3);
        assert!(dist(&w.apply(&t, &one), &one) < 1e-10);
        for _ in 0..10 {
            let a = random_element(&w, &mut rng);
            assert!((w.state(&w.apply(&t, &a)) - w.state(&a)).norm() < 1e-10);
            let pos = &a * a.adjoint();
            assert!(min_eig(&w.apply(&t, &pos)) > -1e-10);
            let h = hermitian_part(&a);
            assert!(op_norm(&w.apply(&t, &h)) <= op_norm(&h) + 1e-10);
        }
    }
}
