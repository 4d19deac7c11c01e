//! Block-diagonal algebras `A = ⊕_k M_{n_k}` and their matrix-unit bases.
//!
//! Elements are stored as coordinate vectors of length `d = Σ n_k²` in the
//! basis of matrix units, ordered block-major and row-major inside a block.
//! The concrete realisation is the block-diagonal `N × N` matrix with
//! `N = Σ n_k`. Matrix units are orthonormal for `⟨x, y⟩ = Tr(x y*)`, so the
//! coordinate vector of `x` doubles as its Hilbert–Schmidt coordinates.

use serde::{Deserialize, Serialize};

use crate::matcore::{max_abs, CMatrix, CVector, ONE, ZERO};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct BlockLayout {
    blocks: Vec<usize>,
    coord_offsets: Vec<usize>,
    matrix_offsets: Vec<usize>,
}

impl TryFrom<Vec<usize>> for BlockLayout {
    type Error = Error;
    fn try_from(blocks: Vec<usize>) -> Result<Self> {
        Self::new(blocks)
    }
}

impl From<BlockLayout> for Vec<usize> {
    fn from(l: BlockLayout) -> Self {
        l.blocks
    }
}

impl BlockLayout {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::ShapeError(format!(
                "block sizes must be positive and non-empty, got {blocks:?}"
            )));
        }
        let mut coord_offsets = Vec::with_capacity(blocks.len());
        let mut matrix_offsets = Vec::with_capacity(blocks.len());
        let (mut c, mut m) = (0, 0);
        for &n in &blocks {
            coord_offsets.push(c);
            matrix_offsets.push(m);
            c += n * n;
            m += n;
        }
        Ok(Self {
            blocks,
            coord_offsets,
            matrix_offsets,
        })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Linear dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Size `Σ n_k` of the concrete block-diagonal matrices.
    pub fn matrix_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn block_offset(&self, k: usize) -> usize {
        self.matrix_offsets[k]
    }

    pub fn coord_offset(&self, k: usize) -> usize {
        self.coord_offsets[k]
    }

    /// Coordinate index of the matrix unit `e^k_{ab}`.
    pub fn index(&self, k: usize, a: usize, b: usize) -> usize {
        let n = self.blocks[k];
        debug_assert!(a < n && b < n);
        self.coord_offsets[k] + a * n + b
    }

    /// Inverse of [`index`](Self::index): `(block, row, column)`.
    pub fn entry(&self, i: usize) -> (usize, usize, usize) {
        let k = match self.coord_offsets.binary_search(&i) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        let n = self.blocks[k];
        let r = i - self.coord_offsets[k];
        (k, r / n, r % n)
    }

    /// Position of `e_i` inside the `N × N` realisation.
    pub fn position(&self, i: usize) -> (usize, usize) {
        let (k, a, b) = self.entry(i);
        (self.matrix_offsets[k] + a, self.matrix_offsets[k] + b)
    }

    pub fn to_matrix(&self, x: &CVector) -> CMatrix {
        let n = self.matrix_dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in x.iter().enumerate() {
            let (r, c) = self.position(i);
            m[(r, c)] = *v;
        }
        m
    }

    /// Block-diagonal part of `m` in coordinates; off-block entries are dropped.
    pub fn from_matrix(&self, m: &CMatrix) -> CVector {
        CVector::from_fn(self.dim(), |i, _| {
            let (r, c) = self.position(i);
            m[(r, c)]
        })
    }

    /// Largest entry of `m` outside the diagonal blocks.
    pub fn block_violation(&self, m: &CMatrix) -> f64 {
        let back = self.to_matrix(&self.from_matrix(m));
        max_abs(&(m - back))
    }

    /// Coordinates of a block-diagonal matrix, rejecting off-block entries.
    pub fn coords_checked(&self, m: &CMatrix, tol: f64) -> Result<CVector> {
        let n = self.matrix_dim();
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n}, got {:?}",
                m.shape()
            )));
        }
        let v = self.block_violation(m);
        if v > tol {
            return Err(Error::BlockViolation { residual: v });
        }
        Ok(self.from_matrix(m))
    }

    pub fn matrix_unit(&self, i: usize) -> CMatrix {
        let n = self.matrix_dim();
        let mut m = CMatrix::zeros(n, n);
        m[self.position(i)] = ONE;
        m
    }

    pub fn unit(&self) -> CVector {
        self.from_matrix(&CMatrix::identity(self.matrix_dim(), self.matrix_dim()))
    }

    /// Central projection onto block `k`, in coordinates.
    pub fn block_projection(&self, k: usize) -> CVector {
        let mut v = CVector::zeros(self.dim());
        for a in 0..self.blocks[k] {
            v[self.index(k, a, a)] = ONE;
        }
        v
    }

    /// Structure constants: column `i·d + j` holds the coordinates of `e_i e_j`.
    pub fn mult_tensor(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d * d);
        for i in 0..d {
            let (k, a, b) = self.entry(i);
            for c in 0..self.blocks[k] {
                let j = self.index(k, b, c);
                m[(self.index(k, a, c), i * d + j)] = ONE;
            }
        }
        m
    }

    /// Matrix of the conjugate-linear involution: `x* = star · conj(x)`.
    pub fn star_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            let (k, a, b) = self.entry(i);
            m[(self.index(k, b, a), i)] = ONE;
        }
        m
    }

    /// Coordinate matrix of the linear map `x ↦ l x r` (`l`, `r` block-diagonal).
    pub fn sandwich(&self, l: &CMatrix, r: &CMatrix) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            let img = l * self.matrix_unit(j) * r;
            out.set_column(j, &self.from_matrix(&img));
        }
        out
    }

    /// Coordinate matrix of left multiplication by `x`.
    pub fn left_mult(&self, x: &CVector) -> CMatrix {
        let n = self.matrix_dim();
        self.sandwich(&self.to_matrix(x), &CMatrix::identity(n, n))
    }

    pub fn right_mult(&self, x: &CVector) -> CMatrix {
        let n = self.matrix_dim();
        self.sandwich(&CMatrix::identity(n, n), &self.to_matrix(x))
    }

    /// Realises an element of `A ⊗ A` (coordinates `i·d + j` for `e_i ⊗ e_j`)
    /// as an `N² × N²` matrix, left leg most significant.
    pub fn tensor_to_matrix(&self, x: &CVector) -> CMatrix {
        let d = self.dim();
        let n = self.matrix_dim();
        let mut m = CMatrix::zeros(n * n, n * n);
        for i in 0..d {
            let (ri, ci) = self.position(i);
            for j in 0..d {
                let (rj, cj) = self.position(j);
                m[(ri * n + rj, ci * n + cj)] = x[i * d + j];
            }
        }
        m
    }

    pub fn tensor_from_matrix(&self, m: &CMatrix) -> CVector {
        let d = self.dim();
        let n = self.matrix_dim();
        let mut x = CVector::zeros(d * d);
        for i in 0..d {
            let (ri, ci) = self.position(i);
            for j in 0..d {
                let (rj, cj) = self.position(j);
                x[i * d + j] = m[(ri * n + rj, ci * n + cj)];
            }
        }
        x
    }

    /// Off-block mass of an `N² × N²` matrix relative to `A ⊗ A`.
    pub fn tensor_block_violation(&self, m: &CMatrix) -> f64 {
        max_abs(&(m - self.tensor_to_matrix(&self.tensor_from_matrix(m))))
    }

    /// Block-diagonal `N × N` matrix with the given blocks.
    pub fn assemble(&self, parts: &[CMatrix]) -> Result<CMatrix> {
        if parts.len() != self.blocks.len()
            || parts.iter().zip(&self.blocks).any(|(p, n)| p.shape() != (*n, *n))
        {
            return Err(Error::ShapeError("block shapes do not match the layout".into()));
        }
        let n = self.matrix_dim();
        let mut m = CMatrix::from_element(n, n, ZERO);
        for (k, p) in parts.iter().enumerate() {
            let o = self.matrix_offsets[k];
            m.view_mut((o, o), p.shape()).copy_from(p);
        }
        Ok(m)
    }

    /// Diagonal block `k` of an `N × N` matrix.
    pub fn block(&self, m: &CMatrix, k: usize) -> CMatrix {
        let o = self.matrix_offsets[k];
        let n = self.blocks[k];
        m.view((o, o), (n, n)).into_owned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::dist;

    #[test]
    fn indices_roundtrip() {
        let l = BlockLayout::new(vec![1, 1, 2, 3]).unwrap();
        assert_eq!(l.dim(), 15);
        assert_eq!(l.matrix_dim(), 7);
        for i in 0..l.dim() {
            let (k, a, b) = l.entry(i);
            assert_eq!(l.index(k, a, b), i);
        }
        assert_eq!(l.entry(2), (2, 0, 0));
        assert_eq!(l.position(5), (3, 3));
    }

    #[test]
    fn rejects_empty_blocks() {
        assert!(BlockLayout::new(vec![]).is_err());
        assert!(BlockLayout::new(vec![2, 0]).is_err());
    }

    #[test]
    fn mult_tensor_matches_matrix_product() {
        let l = BlockLayout::new(vec![2, 1]).unwrap();
        let d = l.dim();
        let m = l.mult_tensor();
        for i in 0..d {
            for j in 0..d {
                let prod = l.matrix_unit(i) * l.matrix_unit(j);
                let col = m.column(i * d + j).into_owned();
                assert!(dist(&l.to_matrix(&col), &prod) < 1e-15);
            }
        }
    }

    #[test]
    fn tensor_realisation_roundtrip() {
        let l = BlockLayout::new(vec![1, 2]).unwrap();
        let d = l.dim();
        let x = CVector::from_fn(d * d, |i, _| crate::matcore::c(i as f64, -(i as f64) / 3.0));
        let m = l.tensor_to_matrix(&x);
        assert!(crate::matcore::dist_vec(&l.tensor_from_matrix(&m), &x) < 1e-15);
        let a = CVector::from_fn(d, |i, _| crate::matcore::r(i as f64 + 1.0));
        let b = CVector::from_fn(d, |i, _| crate::matcore::r(2.0 - i as f64));
        let kron = l.to_matrix(&a).kronecker(&l.to_matrix(&b));
        assert!(dist(&l.tensor_to_matrix(&a.kronecker(&b)), &kron) < 1e-15);
    }

    #[test]
    fn block_violation_detects_off_block_entries() {
        let l = BlockLayout::new(vec![1, 1]).unwrap();
        let mut m = CMatrix::identity(2, 2);
        assert_eq!(l.block_violation(&m), 0.0);
        m[(0, 1)] = ONE;
        assert_eq!(l.block_violation(&m), 1.0);
        assert!(matches!(
            l.coords_checked(&m, 1e-12),
            Err(Error::BlockViolation { .. })
        ));
    }
}
