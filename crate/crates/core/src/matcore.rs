//! Dense complex linear algebra shared by every other module.
//!
//! Everything here operates on small dense matrices (dimension well below a
//! few hundred). Hermitian inputs go through an eigendecomposition; the
//! remaining general-purpose routines (matrix exponential of non-normal
//! matrices, SVD based null spaces) are thin wrappers over `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Residual policy used by every check in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Bound on identity residuals (max-abs entry differences).
    pub structural: f64,
    /// Eigenvalues down to `-spectral_slack` count as non-negative.
    pub spectral_slack: f64,
    pub dykstra_tol: f64,
    pub dykstra_max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            structural: 1e-10,
            spectral_slack: 1e-9,
            dykstra_tol: 1e-10,
            dykstra_max_iter: 10_000,
        }
    }
}

impl Tolerance {
    pub fn new(
        structural: f64,
        spectral_slack: f64,
        dykstra_tol: f64,
        dykstra_max_iter: usize,
    ) -> Result<Self> {
        let t = Self {
            structural,
            spectral_slack,
            dykstra_tol,
            dykstra_max_iter,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.structural, self.spectral_slack, self.dykstra_tol]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
            && self.dykstra_max_iter > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::PreconditionFailed(format!(
                "tolerance fields must be strictly positive: {self:?}"
            )))
        }
    }

    pub fn with_structural(mut self, structural: f64) -> Self {
        self.structural = structural;
        self
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-abs distance between two matrices of equal shape.
pub fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn dist_vec(a: &CVector, b: &CVector) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_residual(h: &CMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    dist(h, &h.adjoint())
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().sum()
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Tr(a b*)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order, with the columns of the
/// unitary in the matching order.
pub fn herm_eig(h: &CMatrix, tol: &Tolerance) -> Result<(Vec<f64>, CMatrix)> {
    let res = hermitian_residual(h);
    if res > tol.structural * h.nrows().max(1) as f64 * (1.0 + max_abs(h)) {
        return Err(Error::NotHermitian { residual: res });
    }
    Ok(herm_eig_unchecked(h))
}

/// Same as [`herm_eig`] but symmetrizes the input instead of validating it.
pub fn herm_eig_unchecked(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let h = hermitian_part(h);
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    if !eig.eigenvalues.iter().all(|v| v.is_finite()) {
        return herm_eig_real_embedding(&h);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut u = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, u)
}

fn real_embedding(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Fallback for inputs on which the complex QR iteration returns non-finite
/// values. `[[Re H, -Im H], [Im H, Re H]]` carries every eigenvalue of `H`
/// twice, with eigenvectors `(u, v)` for `u + iv`.
fn herm_eig_real_embedding(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let eig = nalgebra::SymmetricEigen::new(real_embedding(h));
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut values = Vec::with_capacity(n);
    let mut u = CMatrix::zeros(n, n);
    for &k in &order {
        if values.len() == n {
            break;
        }
        let col = eig.eigenvectors.column(k);
        let mut z = CVector::from_fn(n, |i, _| C64::new(col[i], col[i + n]));
        for j in 0..values.len() {
            let prev = u.column(j).into_owned();
            let c = prev.dotc(&z);
            z -= prev * c;
        }
        let norm = z.norm();
        if norm > 0.5 {
            u.set_column(values.len(), &z.unscale(norm));
            values.push(eig.eigenvalues[k]);
        }
    }
    (values, u)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eig(h: &CMatrix) -> f64 {
    if h.nrows() == 0 {
        return 0.0;
    }
    let h = hermitian_part(h);
    let vals = nalgebra::SymmetricEigen::new(h.clone()).eigenvalues;
    if vals.iter().all(|v| v.is_finite()) {
        return vals.iter().cloned().fold(f64::INFINITY, f64::min);
    }
    nalgebra::SymmetricEigen::new(real_embedding(&h)).eigenvalues.min()
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn herm_fn(h: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (vals, u) = herm_eig_unchecked(h);
    let mut scaled = u.clone();
    for (j, v) in vals.iter().enumerate() {
        let fv = f(*v);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fv;
        }
    }
    &scaled * u.adjoint()
}

/// `P^α` for positive semidefinite `P`, with eigenvalues clipped at zero
/// and powers taken on the support only.
pub fn frac_power(p: &CMatrix, alpha: f64, tol: &Tolerance) -> Result<CMatrix> {
    let (vals, _) = herm_eig(p, tol)?;
    let lo = vals.last().cloned().unwrap_or(0.0);
    if lo < -tol.spectral_slack {
        return Err(Error::NegativeEigenvalue { min: lo });
    }
    if alpha < 0.0 && lo <= tol.spectral_slack {
        return Err(Error::SingularForNegativePower { min: lo });
    }
    let slack = tol.spectral_slack;
    Ok(herm_fn(p, |l| {
        if l <= slack {
            ZERO
        } else {
            r(l.powf(alpha))
        }
    }))
}

/// Matrix square root of a positive semidefinite matrix.
pub fn sqrtm_psd(p: &CMatrix) -> CMatrix {
    herm_fn(p, |l| r(l.max(0.0).sqrt()))
}

/// Logarithm of a positive definite matrix.
pub fn logm_pd(p: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let (vals, _) = herm_eig(p, tol)?;
    let lo = vals.last().cloned().unwrap_or(1.0);
    if lo <= 0.0 {
        return Err(Error::NegativeEigenvalue { min: lo });
    }
    Ok(herm_fn(p, |l| r(l.ln())))
}

/// `exp(t M)`.
///
/// Normal inputs are split into commuting Hermitian and skew-Hermitian parts
/// and exponentiated spectrally; everything else goes through Padé scaling
/// and squaring.
pub fn expm(m: &CMatrix, t: f64, tol: &Tolerance) -> CMatrix {
    assert!(m.is_square(), "expm needs a square matrix");
    let n = m.nrows();
    if n == 0 || t == 0.0 {
        return CMatrix::identity(n, n);
    }
    let tm = m.scale(t);
    let scale = 1.0 + max_abs(&tm);
    let adj = tm.adjoint();
    let normality = dist(&(&tm * &adj), &(&adj * &tm));
    if normality <= tol.structural * scale * scale {
        let herm = hermitian_part(&tm);
        let skew = (&tm - &adj).scale(0.5);
        // skew = i K with K Hermitian
        let k = skew.map(|z| z * -I);
        let e1 = herm_fn(&herm, |l| r(l.exp()));
        let e2 = herm_fn(&k, |l| C64::from_polar(1.0, l));
        return e1 * e2;
    }
    tm.exp()
}

/// Kronecker product, left factor on the first leg.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// Which tensor leg a slice map contracts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leg {
    First,
    Second,
}

/// `(μ⊗id)(T)` or `(id⊗μ)(T)` for an operator `T` on `V⊗W`.
///
/// `weights` represents the functional `μ(X) = Σ_ij weights[(i,j)] X[(i,j)]`
/// on operators of the sliced leg.
pub fn apply_functional_leg(
    t: &CMatrix,
    dims: (usize, usize),
    leg: Leg,
    weights: &CMatrix,
) -> Result<CMatrix> {
    let (dv, dw) = dims;
    if t.nrows() != dv * dw || t.ncols() != dv * dw {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}",
            t.nrows(),
            t.ncols(),
            dv * dw
        )));
    }
    match leg {
        Leg::First => {
            if weights.shape() != (dv, dv) {
                return Err(Error::DimensionMismatch("functional on first leg".into()));
            }
            let mut out = CMatrix::zeros(dw, dw);
            for i in 0..dv {
                for j in 0..dv {
                    let w = weights[(i, j)];
                    if w == ZERO {
                        continue;
                    }
                    out += t.view((i * dw, j * dw), (dw, dw)) * w;
                }
            }
            Ok(out)
        }
        Leg::Second => {
            if weights.shape() != (dw, dw) {
                return Err(Error::DimensionMismatch("functional on second leg".into()));
            }
            let mut out = CMatrix::zeros(dv, dv);
            for a in 0..dv {
                for b in 0..dv {
                    let block = t.view((a * dw, b * dw), (dw, dw));
                    out[(a, b)] = block.iter().zip(weights.iter()).map(|(x, w)| x * w).sum();
                }
            }
            Ok(out)
        }
    }
}

/// Contracts one leg of a vector in `V⊗W` against a covector.
pub fn slice_vector_leg(
    v: &CVector,
    dims: (usize, usize),
    leg: Leg,
    covector: &CVector,
) -> Result<CVector> {
    let (dv, dw) = dims;
    if v.len() != dv * dw {
        return Err(Error::DimensionMismatch(format!(
            "vector has length {}, expected {}",
            v.len(),
            dv * dw
        )));
    }
    match leg {
        Leg::First => {
            if covector.len() != dv {
                return Err(Error::DimensionMismatch("covector on first leg".into()));
            }
            Ok(CVector::from_fn(dw, |j, _| {
                (0..dv).map(|i| covector[i] * v[i * dw + j]).sum()
            }))
        }
        Leg::Second => {
            if covector.len() != dw {
                return Err(Error::DimensionMismatch("covector on second leg".into()));
            }
            Ok(CVector::from_fn(dv, |i, _| {
                (0..dw).map(|j| covector[j] * v[i * dw + j]).sum()
            }))
        }
    }
}

/// Slices every column of a linear map `X → V⊗W`, giving a map `X → W`
/// (first leg contracted) or `X → V` (second leg contracted).
pub fn slice_map_leg(
    map: &CMatrix,
    dims: (usize, usize),
    leg: Leg,
    covector: &CVector,
) -> Result<CMatrix> {
    let out_dim = match leg {
        Leg::First => dims.1,
        Leg::Second => dims.0,
    };
    let mut out = CMatrix::zeros(out_dim, map.ncols());
    for k in 0..map.ncols() {
        let col = slice_vector_leg(&map.column(k).into_owned(), dims, leg, covector)?;
        out.set_column(k, &col);
    }
    Ok(out)
}

/// Projection of a Hermitian matrix onto the PSD cone.
pub fn clip_psd(h: &CMatrix) -> CMatrix {
    herm_fn(h, |l| r(l.max(0.0)))
}

/// Result of a nearest-point projection onto an order interval.
#[derive(Clone, Debug)]
pub struct Projection {
    pub point: CMatrix,
    pub iterations: usize,
    pub increment: f64,
}

/// Nearest point (Hilbert–Schmidt norm) of the order interval `[0, B]`
/// to the Hermitian matrix `ξ`, by Dykstra's alternating projections with
/// correction terms between `{x ⪰ 0}` and `{x ⪯ B}`.
pub fn dykstra_project(xi: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Projection> {
    if xi.shape() != b.shape() || !xi.is_square() {
        return Err(Error::DimensionMismatch("dykstra: ξ and B must share a square shape".into()));
    }
    let lo = min_eig(b);
    if lo <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "dykstra: B must be positive definite (min eigenvalue {lo:e})"
        )));
    }
    let b = hermitian_part(b);
    let mut x = hermitian_part(xi);
    let n = x.nrows();
    let mut p = CMatrix::zeros(n, n);
    let mut q = CMatrix::zeros(n, n);
    let mut increment = f64::INFINITY;
    for it in 1..=tol.dykstra_max_iter {
        let y = clip_psd(&(&x + &p));
        p = &x + &p - &y;
        let z = &y + &q;
        let x_next = &b - clip_psd(&(&b - &z));
        q = &z - &x_next;
        increment = frobenius(&(&x_next - &x)).max(frobenius(&(&y - &x_next)));
        x = x_next;
        if increment <= tol.dykstra_tol {
            return Ok(Projection {
                point: hermitian_part(&x),
                iterations: it,
                increment,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: tol.dykstra_max_iter,
        residual: increment,
    })
}

/// Orthonormal basis (columns) of the null space of `m`.
pub fn nullspace(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    // pad so the thin SVD returns a full right factor
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), m.shape()).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * smax.max(1.0);
    let keep: Vec<usize> = (0..cols)
        .filter(|&i| svd.singular_values[i] <= cut)
        .collect();
    let mut out = CMatrix::zeros(cols, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        let row = v_t.row(i).adjoint();
        out.set_column(j, &row);
    }
    out
}

/// Least-squares solution of `a x = b`.
pub fn lstsq(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-13)
        .map_err(|e| Error::PreconditionFailed(format!("least squares: {e}")))
}

/// Real block-diagonal direct sum.
pub fn direct_sum(parts: &[CMatrix]) -> CMatrix {
    let n: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut off = 0;
    for p in parts {
        out.view_mut((off, off), p.shape()).copy_from(p);
        off += p.nrows();
    }
    out
}

/// `diag(values)` as a complex matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|v| r(*v)),
    ))
}

/// Swap of the two legs on `C^a ⊗ C^b` as a permutation matrix.
pub fn flip(a: usize, b: usize) -> CMatrix {
    let mut out = CMatrix::zeros(a * b, a * b);
    for i in 0..a {
        for j in 0..b {
            out[(j * a + i, i * b + j)] = ONE;
        }
    }
    out
}

/// Applies a two-leg operator on legs `(l1, l2)` of `(C^d)^{⊗3}` to every
/// column of `x`. Legs are 0-based; the operator's first factor acts on `l1`.
pub fn apply_two_leg(op: &CMatrix, d: usize, legs: (usize, usize), x: &CMatrix) -> CMatrix {
    let (l1, l2) = legs;
    assert!(l1 != l2 && l1 < 3 && l2 < 3);
    let l3 = 3 - l1 - l2;
    let stride = |leg: usize| d.pow(2 - leg as u32);
    let (s1, s2, s3) = (stride(l1), stride(l2), stride(l3));
    let mut out = CMatrix::zeros(x.nrows(), x.ncols());
    for col in 0..x.ncols() {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let row_out = i * s1 + j * s2 + k * s3;
                    let mut acc = ZERO;
                    for a in 0..d {
                        for b in 0..d {
                            let w = op[(i * d + j, a * d + b)];
                            if w != ZERO {
                                acc += w * x[(a * s1 + b * s2 + k * s3, col)];
                            }
                        }
                    }
                    out[(row_out, col)] = acc;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn herm_eig_diagonal() {
        let (vals, u) = herm_eig(&diag(&[2.0, 1.0]), &tol()).unwrap();
        assert_eq!(vals, vec![2.0, 1.0]);
        assert!(dist(&u.map(|z| r(z.norm())), &CMatrix::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn herm_eig_pauli_x() {
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let (vals, u) = herm_eig(&x, &tol()).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] + 1.0).abs() < 1e-14);
        // every entry of the eigenbasis has modulus 1/sqrt 2
        for z in u.iter() {
            assert!((z.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(herm_eig(&m, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn herm_eig_reconstructs_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = 2 + trial % 15;
            let h = sample::hermitian(n, &mut rng);
            let (vals, u) = herm_eig(&h, &tol()).unwrap();
            let rec = &u * diag(&vals) * u.adjoint();
            assert!(dist(&rec, &h) < 1e-10, "n={n}");
            assert!(dist(&(u.adjoint() * &u), &CMatrix::identity(n, n)) < 1e-10);
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn real_embedding_matches_complex_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..30 {
            let n = 2 + trial % 9;
            let h = sample::hermitian(n, &mut rng);
            let (want, _) = herm_eig_unchecked(&h);
            let (vals, u) = herm_eig_real_embedding(&h);
            assert!(want.iter().zip(&vals).all(|(a, b)| (a - b).abs() < 1e-10));
            assert!(dist(&(&u * diag(&vals) * u.adjoint()), &h) < 1e-10);
            assert!(dist(&(u.adjoint() * &u), &CMatrix::identity(n, n)) < 1e-10);
        }
    }

    // 24x24 image matrix on which the complex QR iteration returned NaN.
    #[test]
    fn eig_survives_nonfinite_qr() {
        let raw: Vec<(f64, f64)> = serde_json::from_str(include_str!("../tests/data/eig_nonfinite.json")).unwrap();
        let h = CMatrix::from_iterator(24, 24, raw.into_iter().map(|(re, im)| C64::new(re, im)));
        let h = hermitian_part(&h);
        let (vals, u) = herm_eig_unchecked(&h);
        assert!(vals.iter().all(|v| v.is_finite()));
        assert!(dist(&(&u * diag(&vals) * u.adjoint()), &h) < 1e-10);
        assert!(min_eig(&h).is_finite());
        assert!((min_eig(&h) - vals[23]).abs() < 1e-10);
    }

    #[test]
    fn frac_power_examples() {
        let p = frac_power(&diag(&[4.0, 1.0]), 0.5, &tol()).unwrap();
        assert!(dist(&p, &diag(&[2.0, 1.0])) < 1e-14);
        let q = frac_power(&diag(&[2.0 / 3.0, 1.0 / 3.0]), 0.25, &tol()).unwrap();
        let want = diag(&[(2.0f64 / 3.0).powf(0.25), (1.0f64 / 3.0).powf(0.25)]);
        assert!(dist(&q, &want) < 1e-14);
    }

    #[test]
    fn frac_power_zero_is_support_projection() {
        let p = diag(&[0.5, 0.0, 2.0]);
        let s = frac_power(&p, 0.0, &tol()).unwrap();
        assert!(dist(&s, &diag(&[1.0, 0.0, 1.0])) < 1e-14);
        assert!(dist(&frac_power(&p, 1.0, &tol()).unwrap(), &p) < 1e-14);
    }

    #[test]
    fn frac_power_errors() {
        assert!(matches!(
            frac_power(&diag(&[1.0, -0.1]), 0.5, &tol()),
            Err(Error::NegativeEigenvalue { .. })
        ));
        assert!(matches!(
            frac_power(&diag(&[1.0, 0.0]), -0.25, &tol()),
            Err(Error::SingularForNegativePower { .. })
        ));
    }

    #[test]
    fn frac_power_square_root_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..8 {
            let p = sample::psd(n, &mut rng);
            let s = frac_power(&p, 0.5, &tol()).unwrap();
            assert!(dist(&(&s * &s), &p) < 1e-9);
        }
    }

    #[test]
    fn frac_power_additive_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..7 {
            let p = sample::psd(n, &mut rng) + CMatrix::identity(n, n).scale(0.1);
            for (a, b) in [(0.25, 0.5), (-0.25, 1.0), (0.3, -0.1)] {
                let lhs = frac_power(&p, a, &tol()).unwrap() * frac_power(&p, b, &tol()).unwrap();
                let rhs = frac_power(&p, a + b, &tol()).unwrap();
                assert!(dist(&lhs, &rhs) < 1e-9);
            }
        }
    }

    #[test]
    fn expm_examples() {
        let z = CMatrix::zeros(3, 3);
        assert!(dist(&expm(&z, 2.5, &tol()), &CMatrix::identity(3, 3)) < 1e-15);
        let m = diag(&[-1.0, -2.0]);
        let want = diag(&[(-1.0f64).exp(), (-2.0f64).exp()]);
        assert!(dist(&expm(&m, 1.0, &tol()), &want) < 1e-14);
    }

    #[test]
    fn expm_semigroup_law_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = sample::ginibre(4, &mut rng);
            let lhs = expm(&m, 0.3, &tol()) * expm(&m, 0.7, &tol());
            assert!(dist(&lhs, &expm(&m, 1.0, &tol())) < 1e-10);
        }
    }

    #[test]
    fn expm_normal_matches_pade() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = sample::unitary(5, &mut rng);
        let d = CMatrix::from_diagonal(&CVector::from_fn(5, |i, _| c(-(i as f64), i as f64 * 0.7)));
        let m = &u * d * u.adjoint();
        let spectral = expm(&m, 0.9, &tol());
        let pade = m.scale(0.9).exp();
        assert!(dist(&spectral, &pade) < 1e-11);
    }

    #[test]
    fn tensor_and_slices() {
        let t = tensor(&CMatrix::identity(2, 2), &diag(&[1.0, 2.0]));
        assert!(dist(&t, &diag(&[1.0, 2.0, 1.0, 2.0])) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = sample::ginibre(2, &mut rng);
        let b = sample::ginibre(3, &mut rng);
        let w = sample::ginibre(2, &mut rng);
        let mu_a: C64 = a.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
        let out = apply_functional_leg(&tensor(&a, &b), (2, 3), Leg::First, &w).unwrap();
        assert!(dist(&out, &(&b * mu_a)) < 1e-13);

        let w2 = sample::ginibre(3, &mut rng);
        let mu_b: C64 = b.iter().zip(w2.iter()).map(|(x, y)| x * y).sum();
        let out = apply_functional_leg(&tensor(&a, &b), (2, 3), Leg::Second, &w2).unwrap();
        assert!(dist(&out, &(&a * mu_b)) < 1e-13);

        assert!(matches!(
            apply_functional_leg(&tensor(&a, &b), (3, 3), Leg::First, &w),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn flip_swaps_legs() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = sample::ginibre(2, &mut rng);
        let b = sample::ginibre(3, &mut rng);
        let f = flip(2, 3);
        let lhs = &f * tensor(&a, &b) * f.adjoint();
        assert!(dist(&lhs, &tensor(&b, &a)) < 1e-13);
    }

    #[test]
    fn two_leg_application_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = 2;
        let op = sample::ginibre(4, &mut rng);
        let id = CMatrix::identity(8, 8);
        let w12 = apply_two_leg(&op, d, (0, 1), &id);
        assert!(dist(&w12, &tensor(&op, &CMatrix::identity(2, 2))) < 1e-13);
        let w23 = apply_two_leg(&op, d, (1, 2), &id);
        assert!(dist(&w23, &tensor(&CMatrix::identity(2, 2), &op)) < 1e-13);
        // legs (0,2) via conjugation with the swap of legs 2 and 3
        let s23 = tensor(&CMatrix::identity(2, 2), &flip(2, 2));
        let w13 = apply_two_leg(&op, d, (0, 2), &id);
        let want = &s23 * tensor(&op, &CMatrix::identity(2, 2)) * &s23;
        assert!(dist(&w13, &want) < 1e-13);
    }

    #[test]
    fn dykstra_fixed_point() {
        let b = diag(&[1.0, 0.5]);
        let xi = diag(&[0.3, 0.2]);
        let p = dykstra_project(&xi, &b, &tol()).unwrap();
        assert!(dist(&p.point, &xi) < 1e-12);
    }

    #[test]
    fn dykstra_commuting_clip() {
        let b = diag(&[(2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()]);
        let xi = diag(&[1.0, -0.2]);
        let p = dykstra_project(&xi, &b, &tol()).unwrap();
        assert!(dist(&p.point, &diag(&[(2.0f64 / 3.0).sqrt(), 0.0])) < 1e-9);
    }

    #[test]
    fn dykstra_commuting_random_matches_clipping() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let u = sample::unitary(3, &mut rng);
            let bd = [0.3, 0.7, 1.1];
            let xd: Vec<f64> = (0..3).map(|_| sample::normal(&mut rng)).collect();
            let b = &u * diag(&bd) * u.adjoint();
            let xi = &u * diag(&xd) * u.adjoint();
            let clipped: Vec<f64> = xd.iter().zip(bd).map(|(x, b)| x.clamp(0.0, b)).collect();
            let want = &u * diag(&clipped) * u.adjoint();
            let p = dykstra_project(&xi, &b, &tol()).unwrap();
            assert!(dist(&p.point, &want) < 1e-9);
        }
    }

    #[test]
    fn dykstra_rejects_singular_bound() {
        let r = dykstra_project(&diag(&[1.0, 1.0]), &diag(&[1.0, 0.0]), &tol());
        assert!(matches!(r, Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn nullspace_of_rank_deficient() {
        let m = CMatrix::from_row_slice(2, 3, &[ONE, ONE, ZERO, ZERO, ZERO, ONE]);
        let n = nullspace(&m, 1e-12);
        assert_eq!(n.ncols(), 1);
        assert!(max_abs(&(&m * &n)) < 1e-12);
    }
}
