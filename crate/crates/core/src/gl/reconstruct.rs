//! Recovering an algebra map from a symmetric Markov operator on `L²`.

use super::markov::{is_n_markov_l2, witness_string, MarkovVerdict, Sampling};
use super::{algebra_operator, hilbert_implementation, random_element, Superoperator, WeightedAlgebra};
use crate::matcore::{dist, hermitian_residual, max_abs, min_eig, op_norm, CMatrix, Tolerance};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Reconstruction {
    /// `T(a) = ρ^{-1/4} S(ρ^{1/4} a ρ^{1/4}) ρ^{-1/4}`.
    pub t: Superoperator,
    /// `‖T‖ = ‖T(1)‖`, valid for positive maps.
    pub norm: f64,
    /// Largest `‖T(u)‖` over sampled unitaries; a lower bound for `‖T‖`.
    pub sampled_norm: f64,
    /// Smallest eigenvalue of `T(a)` over sampled positive `a` of norm one.
    pub positivity_margin: f64,
    pub roundtrip: f64,
    pub markov: MarkovVerdict,
}

/// Inverts [`hilbert_implementation`] for a self-adjoint 2-Markov `S` and
/// certifies that the result is a positive contraction.
pub fn reconstruct_algebra_operator(
    w: &WeightedAlgebra,
    s: &CMatrix,
    sampling: &Sampling,
    tol: &Tolerance,
) -> Result<Reconstruction> {
    let d = w.dim();
    if s.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!("operator must be {d}x{d}")));
    }
    let herm = hermitian_residual(s);
    if herm > tol.structural * (1.0 + max_abs(s)) {
        return Err(Error::NotSymmetric { residual: herm });
    }
    let markov = is_n_markov_l2(w, s, 2, sampling, tol)?;
    if !markov.pass {
        return Err(Error::NotTwoMarkov {
            witness: markov.witness.as_ref().map(witness_string).unwrap_or_default(),
        });
    }
    let t = algebra_operator(w, s);
    let roundtrip = dist(&hilbert_implementation(w, &t), s);

    let n = w.matrix_dim();
    let layout = w.layout();
    let checks = sampling.exec.trials(sampling.seed ^ 0x9e37, sampling.samples, |i, rng| {
        let a = random_element(w, rng);
        let pos = if i % 2 == 0 {
            &a * a.adjoint()
        } else {
            // rank one inside a block
            let v = a.column(0).into_owned();
            layout.to_matrix(&layout.from_matrix(&(&v * v.adjoint())))
        };
        let pos = pos.unscale(op_norm(&pos).max(1e-300));
        let pos_margin = min_eig(&w.apply(&t, &pos));
        let h = crate::matcore::hermitian_part(&a);
        let u = crate::matcore::herm_fn(&h, |l| crate::matcore::C64::from_polar(1.0, l));
        (pos_margin, op_norm(&w.apply(&t, &u)))
    });
    let positivity_margin = checks.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let sampled_norm = checks.iter().map(|c| c.1).fold(0.0, f64::max);
    let norm = op_norm(&w.apply(&t, &CMatrix::identity(n, n)));
    if norm > 1.0 + tol.spectral_slack || sampled_norm > 1.0 + tol.spectral_slack {
        return Err(Error::NormViolation {
            norm: norm.max(sampled_norm),
        });
    }
    if positivity_margin < -tol.spectral_slack {
        return Err(Error::PreconditionFailed(format!(
            "reconstructed map is not positive (margin {positivity_margin:e})"
        )));
    }
    Ok(Reconstruction {
        t,
        norm,
        sampled_norm,
        positivity_margin,
        roundtrip,
        markov,
    })
}

#[cfg(test)]
mod tests {
    use super::super::random_kms_markov;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m2() -> WeightedAlgebra {
        WeightedAlgebra::diagonal(vec![2], &[2.0 / 3.0, 1.0 / 3.0], &Tolerance::default()).unwrap()
    }

    #[test]
    fn identity_reconstructs_to_identity() {
        let w = m2();
        let eye = CMatrix::identity(4, 4);
        let rec = reconstruct_algebra_operator(&w, &eye, &Sampling::new(20, 0), &Tolerance::default()).unwrap();
        assert!(dist(&rec.t, &eye) < 1e-12);
        assert!((rec.norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_expectation_roundtrip() {
        let w = m2();
        let e = w.diagonal_expectation();
        let s = hilbert_implementation(&w, &e);
        let rec = reconstruct_algebra_operator(&w, &s, &Sampling::new(40, 1), &Tolerance::default()).unwrap();
        assert!(dist(&rec.t, &e) < 1e-10);
        assert!(rec.roundtrip < 1e-10);
    }

    #[test]
    fn random_kms_markov_roundtrip() {
        let tol = Tolerance::default();
        let w = WeightedAlgebra::diagonal(vec![2, 1], &[0.5, 0.3, 0.2], &tol).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for case in 0..4 {
            let t = random_kms_markov(&w, &mut rng, &tol).unwrap();
            let s = hilbert_implementation(&w, &t);
            let rec = reconstruct_algebra_operator(&w, &s, &Sampling::new(40, case), &tol).unwrap();
            assert!(dist(&rec.t, &t) < 1e-9);
            assert!(rec.roundtrip < 1e-9);
            assert!(rec.norm <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn rejects_transpose_and_non_symmetric() {
        let w = m2();
        let tol = Tolerance::default();
        let s = hilbert_implementation(&w, &w.transpose_map());
        assert!(matches!(
            reconstruct_algebra_operator(&w, &s, &Sampling::new(80, 2), &tol),
            Err(Error::NotTwoMarkov { .. })
        ));
        let skew = hilbert_implementation(&w, &w.modular_automorphism(0.7));
        assert!(matches!(
            reconstruct_algebra_operator(&w, &skew, &Sampling::new(10, 2), &tol),
            Err(Error::NotSymmetric { .. })
        ));
    }
}
