//! GNS representation of the Haar state and the multiplicative unitary.
//!
//! `L²(A, h)` is realised as `A` with the Hilbert–Schmidt inner product via
//! `η(a) = a ρ^{1/2}`, where `ρ` is the Haar density. Operators on `L²` are
//! `d × d` matrices in the orthonormal matrix-unit basis.

use rand::Rng;

use super::FiniteQuantumGroup;
use crate::layout::BlockLayout;
use crate::matcore::{
    apply_functional_leg, apply_two_leg, dist, dist_vec, expm, flip, frac_power, hermitian_part, lstsq, max_abs,
    nullspace, CMatrix, CVector, Leg, Tolerance, I, ZERO,
};
use crate::sample;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Gns {
    pub layout: BlockLayout,
    /// Haar density.
    pub rho: CMatrix,
    /// Coordinates of `a` to coordinates of `η(a)`.
    pub eta: CMatrix,
    pub eta_inv: CMatrix,
    /// `⟨e_i, e_j⟩ = h(e_j* e_i)`.
    pub gram: CMatrix,
}

impl Gns {
    pub fn new(g: &FiniteQuantumGroup, tol: &Tolerance) -> Result<Self> {
        let rho = g.haar_density();
        let n = rho.nrows();
        let id = CMatrix::identity(n, n);
        let half = frac_power(&rho, 0.5, tol)?;
        let half_inv = frac_power(&rho, -0.5, tol).map_err(|_| Error::SingularRho {
            min: crate::matcore::min_eig(&rho),
        })?;
        let d = g.dim();
        let gram = CMatrix::from_fn(d, d, |i, j| {
            g.haar_of(&g.product(&g.adjoint(&g.basis(j)), &g.basis(i)))
        });
        Ok(Self {
            eta: g.layout.sandwich(&id, &half),
            eta_inv: g.layout.sandwich(&id, &half_inv),
            layout: g.layout.clone(),
            rho,
            gram,
        })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    /// `η(a)` in orthonormal coordinates.
    pub fn vector(&self, a: &CVector) -> CVector {
        &self.eta * a
    }

    /// Left multiplication by `x` on `L²`.
    pub fn left_action(&self, x: &CVector) -> CMatrix {
        &self.eta * self.layout.left_mult(x) * &self.eta_inv
    }

    /// Modular conjugation `a ρ^{1/2} ↦ ρ^{1/2} a*` (conjugate-linear: apply to `conj(ξ)`).
    pub fn modular_conjugation(&self) -> CMatrix {
        self.layout.star_matrix()
    }

    /// GNS implementation `η(x) ↦ η(T x)` of a map given in coordinates.
    pub fn implement(&self, t: &CMatrix) -> CMatrix {
        &self.eta * t * &self.eta_inv
    }

    /// Inverse of [`implement`](Self::implement).
    pub fn unimplement(&self, op: &CMatrix) -> CMatrix {
        &self.eta_inv * op * &self.eta
    }

    /// Solves `left_action(x) = op` in the least-squares sense; returns `x`
    /// and the residual (zero iff `op` lies in the left regular image).
    pub fn extract_left(&self, op: &CMatrix) -> (CVector, f64) {
        let d = self.dim();
        let mut design = CMatrix::zeros(d * d, d);
        for k in 0..d {
            let mut e = CVector::zeros(d);
            e[k] = crate::matcore::ONE;
            let l = self.left_action(&e);
            design.set_column(k, &CVector::from_column_slice(l.as_slice()));
        }
        let rhs = CMatrix::from_column_slice(d * d, 1, op.as_slice());
        let x = lstsq(&design, &rhs).expect("left regular representation is faithful");
        let x = x.column(0).into_owned();
        let res = dist(&self.left_action(&x), op);
        (x, res)
    }
}

/// The unitary `W` on `L² ⊗ L²` with `Δ(x) = W*(1⊗x)W`, where
/// `W*(η(a)⊗η(b)) = (η⊗η)(Δ(b)(a⊗1))`.
#[derive(Clone, Debug)]
pub struct MultiplicativeUnitary {
    pub w: CMatrix,
    pub w_star: CMatrix,
    /// `W* = Σ_k left_action(e_k) ⊗ legs[k]`.
    pub legs: Vec<CMatrix>,
    /// Residual of that decomposition (zero iff `W* ∈ L^∞(G) ⊗ B(L²)`).
    pub leg_residual: f64,
    d: usize,
}

impl MultiplicativeUnitary {
    pub fn new(g: &FiniteQuantumGroup, gns: &Gns, tol: &Tolerance) -> Result<Self> {
        let d = g.dim();
        let mut m = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            let a1 = g.basis(a).kronecker(&g.unit);
            for b in 0..d {
                let col = g.tensor_product(&g.delta(&g.basis(b)), &a1);
                m.set_column(a * d + b, &col);
            }
        }
        let ee = gns.eta.kronecker(&gns.eta);
        let ee_inv = gns.eta_inv.kronecker(&gns.eta_inv);
        let w_star = &ee * m * &ee_inv;
        let w = w_star.adjoint();
        let unitarity = dist(&(&w * &w_star), &CMatrix::identity(d * d, d * d));
        if unitarity > tol.structural * 100.0 {
            return Err(Error::NotUnitary { residual: unitarity });
        }

        // W*[(i,j),(i',j')] = Σ_k L_k[i,i'] Y_k[j,j']
        let mut design = CMatrix::zeros(d * d, d);
        let lk: Vec<CMatrix> = (0..d).map(|k| gns.left_action(&g.basis(k))).collect();
        for (k, l) in lk.iter().enumerate() {
            for i in 0..d {
                for ip in 0..d {
                    design[(i * d + ip, k)] = l[(i, ip)];
                }
            }
        }
        let mut rhs = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for ip in 0..d {
                for j in 0..d {
                    for jp in 0..d {
                        rhs[(i * d + ip, j * d + jp)] = w_star[(i * d + j, ip * d + jp)];
                    }
                }
            }
        }
        let coeffs = lstsq(&design, &rhs)?;
        let legs: Vec<CMatrix> = (0..d)
            .map(|k| CMatrix::from_fn(d, d, |j, jp| coeffs[(k, j * d + jp)]))
            .collect();
        let mut recon = CMatrix::zeros(d * d, d * d);
        for (l, y) in lk.iter().zip(&legs) {
            recon += l.kronecker(y);
        }
        let leg_residual = dist(&recon, &w_star);
        Ok(Self {
            w,
            w_star,
            legs,
            leg_residual,
            d,
        })
    }

    pub fn unitarity_residual(&self) -> f64 {
        let n = self.d * self.d;
        dist(&(&self.w * &self.w_star), &CMatrix::identity(n, n))
            .max(dist(&(&self.w_star * &self.w), &CMatrix::identity(n, n)))
    }

    /// `max_x ‖W*(1⊗x)W − (π⊗π)Δ(x)‖` over the matrix units.
    pub fn coproduct_residual(&self, g: &FiniteQuantumGroup, gns: &Gns) -> f64 {
        let d = self.d;
        let id = CMatrix::identity(d, d);
        let lk: Vec<CMatrix> = (0..d).map(|k| gns.left_action(&g.basis(k))).collect();
        let mut worst: f64 = 0.0;
        for x in 0..d {
            let lhs = &self.w_star * id.kronecker(&lk[x]) * &self.w;
            let dx = g.delta(&g.basis(x));
            let mut rhs = CMatrix::zeros(d * d, d * d);
            for i in 0..d {
                for j in 0..d {
                    let c = dx[i * d + j];
                    if c != ZERO {
                        rhs += lk[i].kronecker(&lk[j]) * c;
                    }
                }
            }
            worst = worst.max(dist(&lhs, &rhs));
        }
        worst
    }

    /// `‖W₁₂W₁₃W₂₃ − W₂₃W₁₂‖`.
    pub fn pentagon_residual(&self) -> f64 {
        pentagon(&self.w, self.d)
    }

    /// `(μ⊗id)(W*)` for a functional `μ` on `A` (coefficients on matrix units).
    pub fn slice_first(&self, mu: &CVector) -> CMatrix {
        let mut out = CMatrix::zeros(self.d, self.d);
        for (k, y) in self.legs.iter().enumerate() {
            out += y * mu[k];
        }
        out
    }

    /// `(id⊗ω)(op)` for `op ∈ {W, W*, ...}` and `ω(T) = Σ weights_ij T_ij`.
    pub fn slice_second(&self, op: &CMatrix, weights: &CMatrix) -> Result<CMatrix> {
        apply_functional_leg(op, (self.d, self.d), Leg::Second, weights)
    }

    /// `Ŵ = σ W* σ`.
    pub fn hat(&self) -> CMatrix {
        let s = flip(self.d, self.d);
        &s * &self.w_star * &s
    }

    /// Residual of `S((id⊗ω)(W)) = (id⊗ω)(W*)`; both slices must be left
    /// multiplication operators, whose symbols are compared.
    pub fn antipode_slice_residual(&self, g: &FiniteQuantumGroup, gns: &Gns, weights: &CMatrix) -> Result<f64> {
        let (x, rx) = gns.extract_left(&self.slice_second(&self.w, weights)?);
        let (y, ry) = gns.extract_left(&self.slice_second(&self.w_star, weights)?);
        Ok(dist_vec(&(&g.antipode * x), &y).max(rx).max(ry))
    }

    /// Residual of `Ŵ*(1⊗y)Ŵ = (ŷ⊗ŷ)Δ̂(y)` on the generators `y = legs[k]`,
    /// where `legs[k]` represents the dual basis functional `f_k` and
    /// `Δ̂(f_k)(x⊗y) = f_k(xy)`.
    pub fn dual_coproduct_residual(&self, g: &FiniteQuantumGroup) -> f64 {
        let d = self.d;
        let hat = self.hat();
        let hat_star = hat.adjoint();
        let id = CMatrix::identity(d, d);
        let mut worst: f64 = 0.0;
        for k in 0..d {
            let lhs = &hat_star * id.kronecker(&self.legs[k]) * &hat;
            let mut rhs = CMatrix::zeros(d * d, d * d);
            for a in 0..d {
                for b in 0..d {
                    let c = g.mult[(k, a * d + b)];
                    if c != ZERO {
                        rhs += self.legs[a].kronecker(&self.legs[b]) * c;
                    }
                }
            }
            worst = worst.max(dist(&lhs, &rhs));
        }
        worst
    }

    /// Orthonormal-ish basis of the commutant of `span{legs}` (the dual
    /// algebra acting on `L²`).
    pub fn dual_commutant(&self) -> Vec<CMatrix> {
        let d = self.d;
        let id = CMatrix::identity(d, d);
        let mut sys = CMatrix::zeros(self.legs.len() * d * d, d * d);
        for (k, y) in self.legs.iter().enumerate() {
            // vec(ZY − YZ) = (Yᵀ⊗I − I⊗Y) vec Z   (column-major vec)
            let block = y.transpose().kronecker(&id) - id.kronecker(y);
            sys.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(&block);
        }
        let ns = nullspace(&sys, 1e-9);
        (0..ns.ncols())
            .map(|j| CMatrix::from_column_slice(d, d, ns.column(j).as_slice()))
            .collect()
    }

    /// Largest commutator of `op` with the commutant basis.
    pub fn commutant_residual(&self, op: &CMatrix, commutant: &[CMatrix]) -> f64 {
        commutant
            .iter()
            .map(|z| max_abs(&(op * z - z * op)))
            .fold(0.0, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// `W₁₂W₁₃W₂₃ − W₂₃W₁₂` on `(C^d)^{⊗3}`.
pub fn pentagon(w: &CMatrix, d: usize) -> f64 {
    let n = d * d * d;
    let id = CMatrix::identity(n, n);
    let w23 = apply_two_leg(w, d, (1, 2), &id);
    let lhs = apply_two_leg(w, d, (0, 1), &apply_two_leg(w, d, (0, 2), &w23));
    let rhs = apply_two_leg(w, d, (1, 2), &apply_two_leg(w, d, (0, 1), &id));
    dist(&lhs, &rhs)
}

/// Random unitary `exp(iH)` with `H` Hermitian in the span of `basis`
/// (which must be closed under adjoints).
pub fn random_unitary_in<R: Rng + ?Sized>(basis: &[CMatrix], rng: &mut R, tol: &Tolerance) -> CMatrix {
    let d = basis.first().map(|b| b.nrows()).unwrap_or(0);
    let mut h = CMatrix::zeros(d, d);
    for b in basis {
        h += b * sample::complex_normal(rng);
    }
    let h = hermitian_part(&h);
    expm(&h.map(|z| z * I), 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::builtin;
    use crate::matcore::r;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(name: &str) -> (FiniteQuantumGroup, Gns, MultiplicativeUnitary) {
        let tol = Tolerance::default();
        let g = builtin(name).unwrap();
        let gns = Gns::new(&g, &tol).unwrap();
        let w = MultiplicativeUnitary::new(&g, &gns, &tol).unwrap();
        (g, gns, w)
    }

    #[test]
    fn z2_unitary_is_regular_permutation() {
        let (g, gns, w) = setup("function_algebra:Z2");
        // every entry is 0 or 1 in modulus and each row has one nonzero
        for i in 0..4 {
            let nz = (0..4).filter(|&j| w.w[(i, j)].norm() > 1e-12).count();
            assert_eq!(nz, 1);
        }
        assert!(w.coproduct_residual(&g, &gns) < 1e-12);
    }

    #[test]
    fn implements_coproduct_and_pentagon() {
        for name in ["group_algebra:S3", "kac_paljutkin", "function_algebra:Z3"] {
            let (g, gns, w) = setup(name);
            assert!(w.unitarity_residual() < 1e-12, "{name}");
            assert!(w.coproduct_residual(&g, &gns) < 1e-12, "{name}");
            assert!(w.pentagon_residual() < 1e-12, "{name}");
            assert!(w.leg_residual < 1e-12, "{name}");
        }
    }

    #[test]
    fn antipode_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for name in ["kac_paljutkin", "group_algebra:D4"] {
            let (g, gns, w) = setup(name);
            for _ in 0..5 {
                let om = sample::ginibre(g.dim(), &mut rng);
                assert!(w.antipode_slice_residual(&g, &gns, &om).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn hat_implements_dual_coproduct() {
        for name in ["kac_paljutkin", "group_algebra:S3", "function_algebra:S3"] {
            let (g, _, w) = setup(name);
            assert!(w.dual_coproduct_residual(&g) < 1e-12, "{name}: {:e}", w.dual_coproduct_residual(&g));
        }
    }

    #[test]
    fn commutant_of_dual_algebra() {
        let (g, gns, w) = setup("kac_paljutkin");
        let comm = w.dual_commutant();
        assert_eq!(comm.len(), g.dim());
        // right multiplications commute with the dual algebra? check that the
        // commutant commutes with every leg
        for y in &w.legs {
            assert!(w.commutant_residual(y, &comm) < 1e-10);
        }
        let _ = gns;
        let u = random_unitary_in(&comm, &mut ChaCha8Rng::seed_from_u64(1), &Tolerance::default());
        assert!(dist(&(u.adjoint() * &u), &CMatrix::identity(g.dim(), g.dim())) < 1e-12);
    }

    #[test]
    fn extract_left_recovers_symbol() {
        let (g, gns, _) = setup("kac_paljutkin");
        let x = CVector::from_fn(g.dim(), |i, _| r(i as f64 - 2.5));
        let (y, res) = gns.extract_left(&gns.left_action(&x));
        assert!(res < 1e-12 && dist_vec(&x, &y) < 1e-12);
        // a non-member (the flip of legs in the M2 block) is detected
        let mut op = CMatrix::identity(g.dim(), g.dim());
        op.swap_rows(4, 7);
        assert!(gns.extract_left(&op).1 > 0.1);
    }
}
