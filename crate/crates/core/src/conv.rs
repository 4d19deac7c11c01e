//! Functionals on a finite quantum group, convolution, and the convolution
//! operators `L_μ = (id⊗μ)Δ`, `R_μ = (μ⊗id)Δ` with their Hilbert space
//! implementations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gl::{self, WeightedAlgebra};
use crate::hopf::{FiniteQuantumGroup, Gns, MultiplicativeUnitary};
use crate::matcore::{
    c, dist, dist_vec, hermitian_residual, max_abs, min_eig, op_norm, trace_norm, CMatrix, CVector, Tolerance,
    C64, ZERO,
};
use crate::{sample, Error, Result};

/// Linear functional `μ(x) = Σ_i coords_i x_i` on the matrix-unit basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    pub coords: CVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Functional {
    pub fn new(coords: CVector) -> Self {
        Self { coords }
    }

    pub fn counit(g: &FiniteQuantumGroup) -> Self {
        Self::new(g.counit.clone())
    }

    pub fn haar(g: &FiniteQuantumGroup) -> Self {
        Self::new(g.haar.clone())
    }

    pub fn eval(&self, x: &CVector) -> C64 {
        crate::hopf::pair(&self.coords, x)
    }

    /// Functional with prescribed values on the named basis of `g`.
    pub fn from_named(g: &FiniteQuantumGroup, values: &[C64]) -> Result<Self> {
        let named = g
            .named
            .as_ref()
            .ok_or_else(|| Error::PreconditionFailed(format!("{} has no named basis", g.name)))?;
        let d = g.dim();
        if values.len() != d {
            return Err(Error::DimensionMismatch(format!("{} values for dimension {d}", values.len())));
        }
        let f = CVector::from_column_slice(values);
        let inv = named
            .coords
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::PreconditionFailed("named basis is singular".into()))?;
        Ok(Self::new(inv * f))
    }

    /// Values on the named basis of `g`.
    pub fn named_values(&self, g: &FiniteQuantumGroup) -> Option<CVector> {
        g.named.as_ref().map(|n| n.coords.transpose() * &self.coords)
    }

    /// `μ(x) = Σ_k Tr(D_k x_k)`; `density` is block-compressed first.
    pub fn from_density(g: &FiniteQuantumGroup, density: &CMatrix) -> Self {
        let d = g.dim();
        let coords = CVector::from_fn(d, |i, _| {
            let (r, col) = g.layout.position(i);
            density[(col, r)]
        });
        Self::new(coords)
    }

    /// Block-diagonal `D` with `μ(x) = Tr(D x)`.
    pub fn density(&self, g: &FiniteQuantumGroup) -> CMatrix {
        let n = g.layout.matrix_dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..g.dim() {
            let (r, col) = g.layout.position(i);
            out[(col, r)] = self.coords[i];
        }
        out
    }

    /// `μ̄(x) = conj(μ(x*))`.
    pub fn bar(&self, g: &FiniteQuantumGroup) -> Self {
        Self::new(g.star.adjoint() * self.coords.conjugate())
    }

    /// `μ^♯(x) = conj(μ(S(x*)))`.
    pub fn sharp(&self, g: &FiniteQuantumGroup) -> Self {
        Self::new((&g.antipode * &g.star).adjoint() * self.coords.conjugate())
    }

    /// `μ∘S` (the unitary antipode of a finite quantum group is `S`).
    pub fn compose_antipode(&self, g: &FiniteQuantumGroup) -> Self {
        Self::new(g.antipode.transpose() * &self.coords)
    }

    /// `[μ(e_i* e_j)]`.
    pub fn gram(&self, g: &FiniteQuantumGroup) -> CMatrix {
        let d = g.dim();
        CMatrix::from_fn(d, d, |i, j| self.eval(&g.product(&g.adjoint(&g.basis(i)), &g.basis(j))))
    }

    pub fn is_hermitian(&self, g: &FiniteQuantumGroup, tol: &Tolerance) -> bool {
        dist_vec(&self.bar(g).coords, &self.coords) <= tol.structural * (1.0 + crate::matcore::max_abs_vec(&self.coords))
    }

    pub fn is_positive(&self, g: &FiniteQuantumGroup, tol: &Tolerance) -> bool {
        let gram = self.gram(g);
        hermitian_residual(&gram) <= tol.structural * (1.0 + max_abs(&gram))
            && min_eig(&gram) >= -tol.spectral_slack * (1.0 + max_abs(&gram))
    }

    pub fn is_state(&self, g: &FiniteQuantumGroup, tol: &Tolerance) -> bool {
        self.is_positive(g, tol) && (self.eval(&g.unit) - 1.0).norm() <= tol.structural
    }

    /// `‖μ‖ = Σ_k ‖D_k‖₁`, the norm dual to the operator norm.
    pub fn norm(&self, g: &FiniteQuantumGroup) -> f64 {
        let density = self.density(g);
        (0..g.layout.blocks().len())
            .map(|k| trace_norm(&g.layout.block(&density, k)))
            .sum()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.coords - &other.coords)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(&self.coords * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.coords + &other.coords)
    }
}

/// Random state: a random density compressed to the blocks.
pub fn random_state<R: Rng + ?Sized>(g: &FiniteQuantumGroup, rng: &mut R) -> Functional {
    let n = g.layout.matrix_dim();
    let d = sample::density(n, rng);
    let compressed = g.layout.to_matrix(&g.layout.from_matrix(&d));
    Functional::from_density(g, &compressed)
}

/// Random functional with complex Gaussian coordinates.
pub fn random_functional<R: Rng + ?Sized>(g: &FiniteQuantumGroup, rng: &mut R) -> Functional {
    Functional::new(sample::complex_vector(g.dim(), rng))
}

/// `{"coords": [[re, im], ...]}` against the matrix-unit basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalSpec {
    pub coords: Vec<(f64, f64)>,
}

impl FunctionalSpec {
    pub fn build(&self, g: &FiniteQuantumGroup) -> Result<Functional> {
        if self.coords.len() != g.dim() {
            return Err(Error::Parse(format!(
                "functional has {} coordinates, expected {}",
                self.coords.len(),
                g.dim()
            )));
        }
        Ok(Functional::new(CVector::from_iterator(
            g.dim(),
            self.coords.iter().map(|&(re, im)| c(re, im)),
        )))
    }
}

/// `μ ⋆ ν = (μ⊗ν)∘Δ`.
pub fn convolve(g: &FiniteQuantumGroup, mu: &Functional, nu: &Functional) -> Functional {
    Functional::new(g.coproduct.transpose() * mu.coords.kronecker(&nu.coords))
}

/// `R_μ = (μ⊗id)Δ`.
pub fn right_conv_op(g: &FiniteQuantumGroup, mu: &Functional) -> CMatrix {
    let d = g.dim();
    CMatrix::from_fn(d, d, |j, k| {
        (0..d).map(|i| mu.coords[i] * g.coproduct[(i * d + j, k)]).sum()
    })
}

/// `L_μ = (id⊗μ)Δ`.
pub fn left_conv_op(g: &FiniteQuantumGroup, mu: &Functional) -> CMatrix {
    let d = g.dim();
    CMatrix::from_fn(d, d, |i, k| {
        (0..d).map(|j| mu.coords[j] * g.coproduct[(i * d + j, k)]).sum()
    })
}

pub fn conv_op(g: &FiniteQuantumGroup, mu: &Functional, side: Side) -> CMatrix {
    match side {
        Side::Left => left_conv_op(g, mu),
        Side::Right => right_conv_op(g, mu),
    }
}

/// Blockwise Choi test: `T` is completely positive iff for every block `k`,
/// `Σ_{ab} E_ab ⊗ T(e_{k,ab})` is positive semidefinite.
pub fn choi_margin(g: &FiniteQuantumGroup, t: &CMatrix) -> f64 {
    let layout = &g.layout;
    let n = layout.matrix_dim();
    let mut worst = f64::INFINITY;
    for (k, &size) in layout.blocks().iter().enumerate() {
        let mut choi = CMatrix::zeros(size * n, size * n);
        for a in 0..size {
            for b in 0..size {
                let img = layout.to_matrix(&t.column(layout.index(k, a, b)).into_owned());
                choi.view_mut((a * n, b * n), (n, n)).copy_from(&img);
            }
        }
        let margin = min_eig(&choi) - hermitian_residual(&choi);
        worst = worst.min(margin / (1.0 + max_abs(&choi)));
    }
    worst
}

pub fn is_completely_positive(g: &FiniteQuantumGroup, t: &CMatrix, tol: &Tolerance) -> bool {
    choi_margin(g, t) >= -tol.spectral_slack
}

/// `η(x) ↦ η(T x)` for `T = R_μ` or `L_μ`.
pub fn gns_implementation(g: &FiniteQuantumGroup, gns: &Gns, mu: &Functional, side: Side) -> CMatrix {
    gns.implement(&conv_op(g, mu, side))
}

/// The Haar state as a weighted algebra.
pub fn haar_weighted(g: &FiniteQuantumGroup, tol: &Tolerance) -> Result<WeightedAlgebra> {
    WeightedAlgebra::new(g.layout.blocks().to_vec(), g.haar_density(), tol)
}

/// `i^(2)(x) ↦ i^(2)(T x)` for `T = R_μ` or `L_μ`, through the weighted
/// algebra of the Haar state.
pub fn kms_implementation(g: &FiniteQuantumGroup, w: &WeightedAlgebra, mu: &Functional, side: Side) -> CMatrix {
    gl::hilbert_implementation(w, &conv_op(g, mu, side))
}

/// Symmetry flags of a functional, each computed on its own route.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Symmetry {
    /// Bilinear KMS identity for `R_μ` against the Haar density.
    pub kms_symmetric: bool,
    /// Self-adjointness of the GNS implementation of `R_μ`.
    pub gns_symmetric: bool,
    /// `μ = μ∘S`.
    pub r_invariant: bool,
    /// `μ^♯ = μ`.
    pub sharp_selfadjoint: bool,
    pub kms_residual: f64,
    pub gns_residual: f64,
    pub r_residual: f64,
    pub sharp_residual: f64,
}

pub fn check_symmetry(g: &FiniteQuantumGroup, mu: &Functional, tol: &Tolerance) -> Result<Symmetry> {
    let w = haar_weighted(g, tol)?;
    let gns = Gns::new(g, tol)?;
    let r = right_conv_op(g, mu);
    let scale = 1.0 + crate::matcore::max_abs_vec(&mu.coords);
    let (_, kms_residual) = gl::is_kms_symmetric(&w, &r, tol);
    let gns_residual = hermitian_residual(&gns.implement(&r));
    let r_residual = dist_vec(&mu.compose_antipode(g).coords, &mu.coords);
    let sharp_residual = dist_vec(&mu.sharp(g).coords, &mu.coords);
    let ok = |x: f64| x <= tol.structural * scale;
    Ok(Symmetry {
        kms_symmetric: ok(kms_residual),
        gns_symmetric: ok(gns_residual),
        r_invariant: ok(r_residual),
        sharp_selfadjoint: ok(sharp_residual),
        kms_residual,
        gns_residual,
        r_residual,
        sharp_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Closeness {
    /// `‖R̃_μ − 1‖` on `L²`.
    pub operator_distance: f64,
    pub delta: f64,
    /// `‖μ − ε‖`.
    pub functional_distance: f64,
    /// `2√(2δ)/(1 − √(2δ))`.
    pub bound: f64,
    pub pass: bool,
}

/// Compares `‖μ − ε‖` with the bound implied by `‖R̃_μ − 1‖ ≤ δ`.
pub fn closeness_bound_check(g: &FiniteQuantumGroup, mu: &Functional, delta: f64, tol: &Tolerance) -> Result<Closeness> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::PreconditionFailed(format!("δ = {delta} must lie in [0, 1/2)")));
    }
    let w = haar_weighted(g, tol)?;
    let d = g.dim();
    let op = kms_implementation(g, &w, mu, Side::Right);
    let operator_distance = op_norm(&(op - CMatrix::identity(d, d)));
    if operator_distance > delta + tol.structural {
        return Err(Error::PreconditionFailed(format!(
            "‖R̃_μ − 1‖ = {operator_distance:e} exceeds δ = {delta:e}"
        )));
    }
    let functional_distance = mu.sub(&Functional::counit(g)).norm(g);
    let s = (2.0 * delta).sqrt();
    let bound = 2.0 * s / (1.0 - s);
    Ok(Closeness {
        operator_distance,
        delta,
        functional_distance,
        bound,
        pass: functional_distance <= bound + tol.structural,
    })
}

/// Matrix of `μ ↦ vec(R_μ)`; its rank is `d` iff `μ ↦ R_μ` is injective.
pub fn right_conv_design(g: &FiniteQuantumGroup) -> CMatrix {
    let d = g.dim();
    let mut out = CMatrix::zeros(d * d, d);
    for i in 0..d {
        let r = right_conv_op(g, &Functional::new(g.basis(i)));
        out.set_column(i, &CVector::from_column_slice(r.as_slice()));
    }
    out
}

/// Basis of the maps commuting with every `L_ω`.
pub fn left_commutant(g: &FiniteQuantumGroup) -> Vec<CMatrix> {
    let d = g.dim();
    let id = CMatrix::identity(d, d);
    let mut sys = CMatrix::zeros(d * d * d, d * d);
    for k in 0..d {
        let l = left_conv_op(g, &Functional::new(g.basis(k)));
        let block = l.transpose().kronecker(&id) - id.kronecker(&l);
        sys.view_mut((k * d * d, 0), (d * d, d * d)).copy_from(&block);
    }
    let ns = crate::matcore::nullspace(&sys, 1e-10);
    (0..ns.ncols())
        .map(|j| CMatrix::from_column_slice(d, d, ns.column(j).as_slice()))
        .collect()
}

/// Residual of `R̃_μ = (μ⊗id)(W*)`.
pub fn gns_formula_residual(g: &FiniteQuantumGroup, gns: &Gns, w: &MultiplicativeUnitary, mu: &Functional) -> f64 {
    dist(&gns_implementation(g, gns, mu, Side::Right), &w.slice_first(&mu.coords))
}

/// Residual of `Δ∘R_μ = (R_μ⊗id)∘Δ`.
pub fn intertwining_residual(g: &FiniteQuantumGroup, mu: &Functional) -> f64 {
    let r = right_conv_op(g, mu);
    let d = g.dim();
    let lhs = &g.coproduct * &r;
    let rhs = r.kronecker(&CMatrix::identity(d, d)) * &g.coproduct;
    dist(&lhs, &rhs)
}

pub fn zero_functional(g: &FiniteQuantumGroup) -> Functional {
    Functional::new(CVector::from_element(g.dim(), ZERO))
}
