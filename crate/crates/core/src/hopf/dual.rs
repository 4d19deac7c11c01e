//! Duality of finite quantum groups.
//!
//! The dual is built on the space of functionals with convolution as
//! product, `μ*(x) = conj μ(S(x)*)` as involution and the transpose of the
//! multiplication as coproduct, then realised in matrix units like any other
//! abstract Hopf *-algebra.

use super::construct::{group_algebra_abstract, realize, AbstractHopf};
use super::{function_algebra, row, FiniteGroup, FiniteQuantumGroup};
use crate::matcore::{dist, dist_vec, CMatrix};
use crate::{Error, Result};

/// Hopf data of the dual in the basis `f_i` dual to the matrix units of `g`.
pub fn dual_abstract(g: &FiniteQuantumGroup) -> AbstractHopf {
    let d = g.dim();
    let labels = match &g.named {
        Some(nb) if nb.labels.len() == d && nb.coords == CMatrix::identity(d, d) => {
            nb.labels.iter().map(|l| format!("ev[{l}]")).collect()
        }
        _ => (0..d).map(|i| format!("f{i}")).collect(),
    };
    AbstractHopf {
        name: format!("dual({})", g.name),
        labels,
        // (f_a ⋆ f_b)(e_k) = Δ(e_k)_{(a,b)}
        mult: g.coproduct.transpose(),
        star: g.antipode.transpose() * g.star.adjoint(),
        unit: g.counit.clone(),
        coproduct: g.mult.transpose(),
        counit: g.unit.clone(),
        antipode: g.antipode.transpose(),
    }
}

/// The dual quantum group, in matrix units. Its named basis holds the
/// functionals `f_i` dual to the matrix units of `g`.
pub fn dual(g: &FiniteQuantumGroup) -> Result<FiniteQuantumGroup> {
    g.validate_shapes()?;
    realize(&dual_abstract(g), 0)
}

fn named_inverse(g: &FiniteQuantumGroup) -> Result<CMatrix> {
    let nb = g.named.as_ref().ok_or_else(|| Error::PreconditionFailed(format!("{} has no named basis", g.name)))?;
    nb.coords
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::PreconditionFailed("named basis is singular".into()))
}

/// Double dual together with the canonical evaluation map `x ↦ (μ ↦ μ(x))`
/// written as a matrix from coordinates of `g` to coordinates of the double
/// dual.
pub fn double_dual_map(g: &FiniteQuantumGroup) -> Result<(FiniteQuantumGroup, CMatrix)> {
    let gd = dual(g)?;
    let gdd = dual(&gd)?;
    let p_hat = named_inverse(&gd)?;
    let n_hat_hat = &gdd.named.as_ref().expect("realized groups carry a named basis").coords;
    let phi = n_hat_hat * p_hat.transpose();
    Ok((gdd, phi))
}

/// `dual(C(G))` and `C[G]` with the map sending the evaluation functional at
/// `g` to `λ_g`.
pub fn dual_of_function_algebra_map(
    group: &FiniteGroup,
) -> Result<(FiniteQuantumGroup, FiniteQuantumGroup, CMatrix)> {
    let fd = dual(&function_algebra(group)?)?;
    let ga = realize(&group_algebra_abstract(group), 0)?;
    let phi = &ga.named.as_ref().expect("named").coords * named_inverse(&fd)?;
    Ok((fd, ga, phi))
}

/// Largest violation of `Φ` being a Hopf *-isomorphism preserving the Haar
/// state (all structure maps compared after transport by `Φ`).
pub fn isomorphism_residual(g: &FiniteQuantumGroup, h: &FiniteQuantumGroup, phi: &CMatrix) -> f64 {
    let d = g.dim();
    if h.dim() != d || phi.shape() != (d, d) {
        return f64::INFINITY;
    }
    let pp = phi.kronecker(phi);
    let mult = dist(&(phi * &g.mult), &(&h.mult * &pp));
    let star = dist(&(phi * &g.star), &(&h.star * phi.map(|z| z.conj())));
    let unit = dist_vec(&(phi * &g.unit), &h.unit);
    let delta = dist(&(&pp * &g.coproduct), &(&h.coproduct * phi));
    let counit = dist(&row(&g.counit), &(row(&h.counit) * phi));
    let antipode = dist(&(phi * &g.antipode), &(&h.antipode * phi));
    let haar = dist(&row(&g.haar), &(row(&h.haar) * phi));
    [mult, star, unit, delta, counit, antipode, haar]
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{axiom_residual, builtin, builtin_names, check_axioms, BUILTIN_GROUPS};
    use crate::matcore::Tolerance;

    #[test]
    fn duals_satisfy_axioms() {
        for name in ["function_algebra:S3", "group_algebra:D4", "kac_paljutkin"] {
            let gd = dual(&builtin(name).unwrap()).unwrap();
            let res = axiom_residual(&check_axioms(&gd, &Tolerance::default()).unwrap());
            assert!(res < 1e-10, "{name}: {res:e}");
        }
    }

    #[test]
    fn double_dual_is_canonically_isomorphic() {
        for name in builtin_names() {
            let g = builtin(&name).unwrap();
            let (gdd, phi) = double_dual_map(&g).unwrap();
            let res = isomorphism_residual(&g, &gdd, &phi);
            assert!(res < 1e-8, "{name}: {res:e}");
        }
    }

    #[test]
    fn dual_of_function_algebra_is_group_algebra() {
        for name in BUILTIN_GROUPS {
            let group = FiniteGroup::builtin(name).unwrap();
            let (fd, ga, phi) = dual_of_function_algebra_map(&group).unwrap();
            let res = isomorphism_residual(&fd, &ga, &phi);
            assert!(res < 1e-8, "{name}: {res:e}");
        }
    }

    #[test]
    fn wrong_map_is_rejected() {
        let g = builtin("kac_paljutkin").unwrap();
        let (gdd, phi) = double_dual_map(&g).unwrap();
        let mut bad = phi.clone();
        bad.swap_columns(1, 2);
        assert!(isomorphism_residual(&g, &gdd, &bad) > 0.1);
    }
}
