//! Finite quantum groups: finite-dimensional Hopf *-algebras with a faithful
//! Haar state, stored in the matrix-unit basis of `⊕_k M_{n_k}`.
//!
//! Coordinates follow [`BlockLayout`]. Linear maps are matrices acting on
//! coordinate vectors; elements of `A ⊗ A` use index `i·d + j` for
//! `e_i ⊗ e_j`. Functionals (counit, Haar state) are coefficient vectors:
//! `φ(x) = Σ φ_i x_i`.

mod construct;
mod dual;
pub mod groups;
pub mod json;
mod unitary;

pub use construct::{function_algebra, group_algebra, kac_paljutkin, solve_haar, AbstractHopf};
pub use dual::{double_dual_map, dual, dual_of_function_algebra_map, isomorphism_residual};
pub use groups::{FiniteGroup, BUILTIN_GROUPS};
pub use unitary::{random_unitary_in, Gns, MultiplicativeUnitary};

use crate::layout::BlockLayout;
use crate::matcore::{dist, dist_vec, flip, min_eig, CMatrix, CVector, Tolerance, C64};
use crate::report::{Entry, VerificationReport};
use crate::{Error, Result};

/// Named elements (group elements, dual basis functionals) in matrix-unit
/// coordinates: column `i` is the element labelled `labels[i]`.
#[derive(Clone, Debug)]
pub struct NamedBasis {
    pub labels: Vec<String>,
    pub coords: CMatrix,
}

#[derive(Clone, Debug)]
pub struct FiniteQuantumGroup {
    pub name: String,
    pub layout: BlockLayout,
    /// `d × d²`; column `i·d + j` holds `e_i e_j`.
    pub mult: CMatrix,
    /// `x* = star · conj(x)`.
    pub star: CMatrix,
    pub unit: CVector,
    /// `d² × d`; column `k` holds `Δ(e_k)`.
    pub coproduct: CMatrix,
    pub counit: CVector,
    pub antipode: CMatrix,
    pub haar: CVector,
    pub named: Option<NamedBasis>,
}

/// `φ(x) = Σ φ_i x_i`.
pub fn pair(phi: &CVector, x: &CVector) -> C64 {
    phi.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

/// Row vector of a functional, for composing with coordinate matrices.
pub fn row(phi: &CVector) -> CMatrix {
    CMatrix::from_row_slice(1, phi.len(), phi.as_slice())
}

impl FiniteQuantumGroup {
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn validate_shapes(&self) -> Result<()> {
        let d = self.dim();
        let checks = [
            ("mult", self.mult.shape(), (d, d * d)),
            ("star", self.star.shape(), (d, d)),
            ("unit", self.unit.shape(), (d, 1)),
            ("coproduct", self.coproduct.shape(), (d * d, d)),
            ("counit", self.counit.shape(), (d, 1)),
            ("antipode", self.antipode.shape(), (d, d)),
            ("haar", self.haar.shape(), (d, 1)),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::ShapeError(format!(
                    "{name} has shape {got:?}, expected {want:?} for dimension {d}"
                )));
            }
        }
        if let Some(nb) = &self.named {
            if nb.coords.shape() != (d, nb.labels.len()) {
                return Err(Error::ShapeError("named basis shape".into()));
            }
        }
        Ok(())
    }

    pub fn product(&self, x: &CVector, y: &CVector) -> CVector {
        &self.mult * x.kronecker(y)
    }

    pub fn adjoint(&self, x: &CVector) -> CVector {
        &self.star * x.map(|z| z.conj())
    }

    pub fn delta(&self, x: &CVector) -> CVector {
        &self.coproduct * x
    }

    pub fn counit_of(&self, x: &CVector) -> C64 {
        pair(&self.counit, x)
    }

    pub fn haar_of(&self, x: &CVector) -> C64 {
        pair(&self.haar, x)
    }

    pub fn basis(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim());
        v[i] = crate::matcore::ONE;
        v
    }

    /// Product in `A ⊗ A`.
    pub fn tensor_product(&self, x: &CVector, y: &CVector) -> CVector {
        let d = self.dim();
        // z[(i,k),(j,l)] = x_{ij} y_{kl}
        let mut z = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let xij = x[i * d + j];
                if xij == crate::matcore::ZERO {
                    continue;
                }
                for k in 0..d {
                    for l in 0..d {
                        z[(i * d + k, j * d + l)] = xij * y[k * d + l];
                    }
                }
            }
        }
        let out = &self.mult * z * self.mult.transpose();
        CVector::from_iterator(d * d, (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).map(|(a, b)| out[(a, b)]))
    }

    pub fn tensor_adjoint(&self, x: &CVector) -> CVector {
        self.star.kronecker(&self.star) * x.map(|z| z.conj())
    }

    /// Coordinate matrix of `y ↦ x y`.
    pub fn left_regular(&self, x: &CVector) -> CMatrix {
        let d = self.dim();
        &self.mult * x.kronecker(&CMatrix::identity(d, d))
    }

    /// Coordinate matrix of `y ↦ y x`.
    pub fn right_regular(&self, x: &CVector) -> CMatrix {
        let d = self.dim();
        &self.mult * CMatrix::identity(d, d).kronecker(x)
    }

    /// `[h(e_i* e_j)]`, positive definite iff `h` is faithful.
    pub fn haar_gram(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| {
            self.haar_of(&self.product(&self.adjoint(&self.basis(i)), &self.basis(j)))
        })
    }

    /// Density `ρ` of the Haar state: `h(x) = Tr(ρ x)`.
    pub fn haar_density(&self) -> CMatrix {
        let n = self.layout.matrix_dim();
        let mut rho = CMatrix::zeros(n, n);
        for i in 0..self.dim() {
            let (r, c) = self.layout.position(i);
            rho[(c, r)] = self.haar[i];
        }
        rho
    }

    pub fn commutativity_residual(&self) -> f64 {
        let d = self.dim();
        dist(&self.mult, &(&self.mult * flip(d, d)))
    }

    pub fn cocommutativity_residual(&self) -> f64 {
        let d = self.dim();
        dist(&self.coproduct, &(flip(d, d) * &self.coproduct))
    }

    /// Coordinates of `x ∈ A` in the named basis, when present.
    pub fn named_coords(&self, x: &CVector) -> Option<CVector> {
        let nb = self.named.as_ref()?;
        nb.coords.clone().lu().solve(x)
    }
}

struct Axioms<'a> {
    report: VerificationReport,
    tol: f64,
    name: &'a str,
}

impl Axioms<'_> {
    fn push(&mut self, check: &str, anchor: &str, residual: f64) {
        self.report.push(
            Entry::new("hopf", check, anchor, residual, self.tol).param("group", self.name),
        );
    }
}

/// Residual of every Hopf *-algebra and Haar-state identity.
pub fn check_axioms(g: &FiniteQuantumGroup, tol: &Tolerance) -> Result<VerificationReport> {
    g.validate_shapes()?;
    let d = g.dim();
    let id = CMatrix::identity(d, d);
    let mut ax = Axioms {
        report: VerificationReport::new(),
        tol: tol.structural,
        name: &g.name,
    };

    let basis_res = dist(&g.mult, &g.layout.mult_tensor())
        .max(dist(&g.star, &g.layout.star_matrix()))
        .max(dist_vec(&g.unit, &g.layout.unit()));
    ax.push("matrix_unit_basis", "structure constants of ⊕ M_n in matrix units", basis_res);

    let lhs = &g.mult * g.mult.kronecker(&id);
    let rhs = &g.mult * id.kronecker(&g.mult);
    ax.push("associativity", "(xy)z = x(yz)", dist(&lhs, &rhs));

    let left_unit = &g.mult * g.unit.kronecker(&id);
    let right_unit = &g.mult * id.kronecker(&g.unit);
    ax.push("unit", "1x = x = x1", dist(&left_unit, &id).max(dist(&right_unit, &id)));

    let star_inv = dist(&(&g.star * g.star.map(|z| z.conj())), &id);
    let mut star_anti: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let (ei, ej) = (g.basis(i), g.basis(j));
            let l = g.adjoint(&g.product(&ei, &ej));
            let r = g.product(&g.adjoint(&ej), &g.adjoint(&ei));
            star_anti = star_anti.max(dist_vec(&l, &r));
        }
    }
    ax.push("star_involution", "x** = x", star_inv);
    ax.push("star_antimultiplicative", "(xy)* = y* x*", star_anti);

    let coassoc_l = g.coproduct.kronecker(&id) * &g.coproduct;
    let coassoc_r = id.kronecker(&g.coproduct) * &g.coproduct;
    ax.push("coassociativity", "(Δ⊗id)Δ = (id⊗Δ)Δ", dist(&coassoc_l, &coassoc_r));

    let mut delta_mult: f64 = 0.0;
    let mut delta_star: f64 = 0.0;
    for i in 0..d {
        let di = g.delta(&g.basis(i));
        for j in 0..d {
            let dj = g.delta(&g.basis(j));
            let l = g.delta(&g.product(&g.basis(i), &g.basis(j)));
            delta_mult = delta_mult.max(dist_vec(&l, &g.tensor_product(&di, &dj)));
        }
        let l = g.delta(&g.adjoint(&g.basis(i)));
        delta_star = delta_star.max(dist_vec(&l, &g.tensor_adjoint(&di)));
    }
    ax.push("coproduct_multiplicative", "Δ(xy) = Δ(x)Δ(y)", delta_mult);
    ax.push("coproduct_unital", "Δ(1) = 1⊗1", dist_vec(&g.delta(&g.unit), &g.unit.kronecker(&g.unit)));
    ax.push("coproduct_star", "Δ(x*) = Δ(x)*", delta_star);

    let eps = row(&g.counit);
    let counit_l = eps.kronecker(&id) * &g.coproduct;
    let counit_r = id.kronecker(&eps) * &g.coproduct;
    ax.push("counit_law", "(ε⊗id)Δ = id = (id⊗ε)Δ", dist(&counit_l, &id).max(dist(&counit_r, &id)));
    let mut eps_char: f64 = (g.counit_of(&g.unit) - 1.0).norm();
    for i in 0..d {
        for j in 0..d {
            let l = g.counit_of(&g.product(&g.basis(i), &g.basis(j)));
            eps_char = eps_char.max((l - g.counit[i] * g.counit[j]).norm());
        }
        let s = g.counit_of(&g.adjoint(&g.basis(i)));
        eps_char = eps_char.max((s - g.counit[i].conj()).norm());
    }
    ax.push("counit_character", "ε(xy) = ε(x)ε(y), ε(x*) = conj ε(x)", eps_char);

    let unit_eps = &g.unit * &eps;
    let anti_l = &g.mult * g.antipode.kronecker(&id) * &g.coproduct;
    let anti_r = &g.mult * id.kronecker(&g.antipode) * &g.coproduct;
    ax.push("antipode_law", "m(S⊗id)Δ = 1ε = m(id⊗S)Δ", dist(&anti_l, &unit_eps).max(dist(&anti_r, &unit_eps)));

    let h = row(&g.haar);
    let mut herm: f64 = 0.0;
    for i in 0..d {
        let s = g.haar_of(&g.adjoint(&g.basis(i)));
        herm = herm.max((s - g.haar[i].conj()).norm());
    }
    ax.push("haar_normalized", "h(1) = 1, h(x*) = conj h(x)", herm.max((g.haar_of(&g.unit) - 1.0).norm()));
    let gram_min = min_eig(&g.haar_gram());
    ax.report.push(
        Entry::new("hopf", "haar_faithful", "h(x*x) > 0 for x ≠ 0", (-gram_min).max(0.0), tol.structural)
            .with_pass(gram_min > tol.structural)
            .param("group", &g.name)
            .witness(format!("min eigenvalue of Gram matrix {gram_min:.3e}")),
    );
    let inv_l = h.kronecker(&id) * &g.coproduct;
    let inv_r = id.kronecker(&h) * &g.coproduct;
    let target = &g.unit * &h;
    ax.push("haar_left_invariance", "(h⊗id)Δ(x) = h(x)1", dist(&inv_l, &target));
    ax.push("haar_right_invariance", "(id⊗h)Δ(x) = h(x)1", dist(&inv_r, &target));

    let mut trace_res: f64 = 0.0;
    let mut s_anti: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let (ei, ej) = (g.basis(i), g.basis(j));
            let xy = g.product(&ei, &ej);
            let yx = g.product(&ej, &ei);
            trace_res = trace_res.max((g.haar_of(&xy) - g.haar_of(&yx)).norm());
            let l = &g.antipode * &xy;
            let r = g.product(&(&g.antipode * &ej), &(&g.antipode * &ei));
            s_anti = s_anti.max(dist_vec(&l, &r));
        }
    }
    ax.push("haar_tracial", "h(xy) = h(yx)", trace_res);
    ax.push("antipode_involutive", "S² = id", dist(&(&g.antipode * &g.antipode), &id));
    ax.push("haar_antipode_invariant", "h∘S = h", dist(&(&h * &g.antipode), &h));
    let s_star = dist(&(&g.antipode * &g.star), &(&g.star * g.antipode.map(|z| z.conj())));
    ax.push("antipode_anti_automorphism", "S(xy) = S(y)S(x), S(x*) = S(x)*", s_anti.max(s_star));
    let lhs = &g.coproduct * &g.antipode;
    let rhs = flip(d, d) * g.antipode.kronecker(&g.antipode) * &g.coproduct;
    ax.push("coproduct_antipode_flip", "Δ∘S = σ∘(S⊗S)∘Δ", dist(&lhs, &rhs));

    Ok(ax.report)
}

/// Largest residual of the report produced by [`check_axioms`], ignoring the
/// faithfulness entry (which is a margin, not an identity).
pub fn axiom_residual(report: &VerificationReport) -> f64 {
    report
        .entries
        .iter()
        .filter(|e| e.check != "haar_faithful")
        .map(|e| e.residual)
        .fold(0.0, f64::max)
}

/// Resolves `function_algebra:<G>`, `group_algebra:<G>` and `kac_paljutkin`.
pub fn builtin(name: &str) -> Result<FiniteQuantumGroup> {
    if name == "kac_paljutkin" {
        return kac_paljutkin();
    }
    if let Some(g) = name.strip_prefix("function_algebra:") {
        return function_algebra(&FiniteGroup::builtin(g)?);
    }
    if let Some(g) = name.strip_prefix("group_algebra:") {
        return group_algebra(&FiniteGroup::builtin(g)?, 0);
    }
    Err(Error::UnknownBuiltin(name.to_string()))
}

/// Every builtin quantum group name, in a fixed order.
pub fn builtin_names() -> Vec<String> {
    let mut out = Vec::new();
    for g in BUILTIN_GROUPS {
        out.push(format!("function_algebra:{g}"));
        out.push(format!("group_algebra:{g}"));
    }
    out.push("kac_paljutkin".to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn all_builtins_pass_axioms() {
        for name in builtin_names() {
            let g = builtin(&name).unwrap();
            let rep = check_axioms(&g, &tol()).unwrap();
            let failed: Vec<_> = rep.failures().map(|e| format!("{} residual {:e}", e.check, e.residual)).collect();
            assert!(failed.is_empty(), "{name}: {failed:?}");
        }
    }

    #[test]
    fn z2_residuals_are_exact() {
        let g = builtin("function_algebra:Z2").unwrap();
        assert!(axiom_residual(&check_axioms(&g, &tol()).unwrap()) < 1e-14);
    }

    #[test]
    fn block_structures() {
        for (name, blocks) in [
            ("group_algebra:S3", vec![1, 1, 2]),
            ("group_algebra:D4", vec![1, 1, 1, 1, 2]),
            ("group_algebra:Q8", vec![1, 1, 1, 1, 2]),
            ("group_algebra:Z3", vec![1, 1, 1]),
            ("kac_paljutkin", vec![1, 1, 1, 1, 2]),
        ] {
            assert_eq!(builtin(name).unwrap().layout.blocks(), blocks.as_slice(), "{name}");
        }
    }

    #[test]
    fn perturbed_coproduct_fails_coassociativity() {
        let mut g = builtin("function_algebra:Z2").unwrap();
        g.coproduct[(1, 0)] += crate::matcore::r(1e-3);
        let rep = check_axioms(&g, &tol()).unwrap();
        let e = rep.get("coassociativity").unwrap();
        assert!(!e.pass);
        assert!(e.residual > 5e-4 && e.residual < 5e-3, "{}", e.residual);
    }

    #[test]
    fn shape_errors() {
        let mut g = builtin("function_algebra:Z2").unwrap();
        g.haar = CVector::zeros(3);
        assert!(matches!(check_axioms(&g, &tol()), Err(Error::ShapeError(_))));
    }

    #[test]
    fn kac_paljutkin_is_genuinely_quantum() {
        let g = kac_paljutkin().unwrap();
        assert!(g.commutativity_residual() > 0.1);
        assert!(g.cocommutativity_residual() > 0.1);
    }

    #[test]
    fn group_algebra_plancherel_trace() {
        let g = builtin("group_algebra:S3").unwrap();
        let nb = g.named.as_ref().unwrap();
        for k in 0..6 {
            let v = g.haar_of(&nb.coords.column(k).into_owned());
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((v - crate::matcore::r(want)).norm() < 1e-12);
        }
    }
}
