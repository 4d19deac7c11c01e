//! Semigroups synthesised from sequences of symmetric Markov operators.
//!
//! The construction runs in two stages. A subsequence `(T_{k_j})` with
//! `‖T_{k_j} − 1‖ ≤ 2^{-j}` gives `Δ = Σ_j (1 − T_{k_j})` and the commuting
//! resolvents `ρ_α = (1 + αΔ)^{-1}`. The same selection applied to
//! `(ρ_{2^{-j}})_j` gives the generator `Δ' = Σ_j (1 − ρ_{2^{-j}})`, and the
//! output is `S_t = e^{-tΔ'}`.

use super::markov::{is_n_markov_l2, witness_string, MarkovVerdict, Sampling};
use super::WeightedAlgebra;
use crate::matcore::{hermitian_part, hermitian_residual, herm_fn, max_abs, op_norm, r, CMatrix, Tolerance};
use crate::{Error, Result};

/// Amplified order interval `[0, (I_n ⊗ ρ)^{1/2}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntervalSpec {
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    /// Indices of the input operators kept by the summability selection.
    pub selected: Vec<usize>,
    /// `Δ = Σ_j (1 − T_{k_j})`.
    pub resolvent_generator: CMatrix,
    /// `Δ' = Σ_j (1 − ρ_{2^{-j}})`.
    pub generator: CMatrix,
    /// `‖(1 + Δ_J)^{-1} − (1 + Δ_{J-1})^{-1}‖` for the last selected term.
    pub stabilization: f64,
    pub samples: Vec<(f64, CMatrix)>,
    pub semigroup_residual: f64,
    pub self_adjoint_residual: f64,
    pub max_norm: f64,
    /// Markov verdict for every `(t, interval)` pair.
    pub markov: Vec<(f64, IntervalSpec, MarkovVerdict)>,
}

impl Synthesis {
    pub fn at(&self, t: f64) -> CMatrix {
        semigroup(&self.generator, t)
    }
}

fn semigroup(generator: &CMatrix, t: f64) -> CMatrix {
    herm_fn(generator, |l| r((-t * l).exp()))
}

fn resolvent(delta: &CMatrix, alpha: f64) -> CMatrix {
    herm_fn(delta, |l| r(1.0 / (1.0 + alpha * l)))
}

pub fn sauvageot_synthesize(
    w: &WeightedAlgebra,
    t_seq: &[CMatrix],
    intervals: &[IntervalSpec],
    t_grid: &[f64],
    sampling: &Sampling,
    tol: &Tolerance,
) -> Result<Synthesis> {
    let d = w.dim();
    let eye = CMatrix::identity(d, d);
    if t_seq.is_empty() {
        return Err(Error::SequenceNotContractive("empty sequence".into()));
    }
    let mut gaps = Vec::with_capacity(t_seq.len());
    for (k, t) in t_seq.iter().enumerate() {
        if t.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("T_{} must be {d}x{d}", k + 1)));
        }
        let herm = hermitian_residual(t);
        if herm > tol.structural * (1.0 + max_abs(t)) {
            return Err(Error::SequenceNotContractive(format!(
                "T_{} is not self-adjoint (residual {herm:e})",
                k + 1
            )));
        }
        let norm = op_norm(t);
        if norm > 1.0 + tol.spectral_slack {
            return Err(Error::SequenceNotContractive(format!("‖T_{}‖ = {norm}", k + 1)));
        }
        for spec in intervals {
            let v = is_n_markov_l2(w, t, spec.n, sampling, tol)?;
            if !v.pass {
                return Err(Error::IntervalViolation {
                    witness: format!(
                        "T_{} at n = {}: {}",
                        k + 1,
                        spec.n,
                        v.witness.as_ref().map(witness_string).unwrap_or_default()
                    ),
                });
            }
        }
        gaps.push(op_norm(&(t - &eye)));
    }
    // heuristic convergence to the identity: the tail may not drift away
    let half = gaps.len() / 2;
    if half > 0 {
        let head = gaps[..half].iter().cloned().fold(0.0, f64::max);
        let tail = gaps[half..].iter().cloned().fold(0.0, f64::max);
        if tail > head + tol.structural {
            return Err(Error::SequenceNotContractive(format!(
                "‖T_k − 1‖ grows along the sequence ({head:e} → {tail:e})"
            )));
        }
    }

    let mut selected = Vec::new();
    let mut threshold = 0.5;
    for (k, gap) in gaps.iter().enumerate() {
        if *gap <= threshold {
            selected.push(k);
            threshold *= 0.5;
        }
    }
    let mut delta = CMatrix::zeros(d, d);
    let mut previous = resolvent(&delta, 1.0);
    let mut stabilization = 0.0;
    for &k in &selected {
        delta += &eye - &t_seq[k];
        delta = hermitian_part(&delta);
        let current = resolvent(&delta, 1.0);
        stabilization = op_norm(&(&current - &previous));
        previous = current;
    }

    let mut generator = CMatrix::zeros(d, d);
    let mut alpha = 0.5;
    for _ in 0..200 {
        let term = &eye - resolvent(&delta, alpha);
        let size = op_norm(&term);
        generator += term;
        if size <= tol.structural * 1e-2 {
            break;
        }
        alpha *= 0.5;
    }
    let generator = hermitian_part(&generator);

    let samples: Vec<(f64, CMatrix)> = t_grid.iter().map(|&t| (t, semigroup(&generator, t))).collect();
    let mut semigroup_residual: f64 = 0.0;
    for (t, st) in &samples {
        for (s, ss) in &samples {
            let direct = semigroup(&generator, t + s);
            semigroup_residual = semigroup_residual.max(crate::matcore::dist(&(st * ss), &direct));
        }
    }
    let self_adjoint_residual = samples.iter().map(|(_, s)| hermitian_residual(s)).fold(0.0, f64::max);
    let max_norm = samples.iter().map(|(_, s)| op_norm(s)).fold(0.0, f64::max);
    if max_norm > 1.0 + tol.spectral_slack {
        return Err(Error::NormViolation { norm: max_norm });
    }
    let mut markov = Vec::new();
    for (t, st) in &samples {
        for spec in intervals {
            let v = is_n_markov_l2(w, st, spec.n, sampling, tol)?;
            if !v.pass {
                return Err(Error::IntervalViolation {
                    witness: format!(
                        "S_{t} at n = {}: {}",
                        spec.n,
                        v.witness.as_ref().map(witness_string).unwrap_or_default()
                    ),
                });
            }
            markov.push((*t, *spec, v));
        }
    }
    Ok(Synthesis {
        selected,
        resolvent_generator: delta,
        generator,
        stabilization,
        samples,
        semigroup_residual,
        self_adjoint_residual,
        max_norm,
        markov,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{hilbert_implementation, random_kms_markov};
    use super::*;
    use crate::matcore::{dist, expm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const GRID: [f64; 6] = [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0];

    fn m2() -> WeightedAlgebra {
        WeightedAlgebra::diagonal(vec![2], &[2.0 / 3.0, 1.0 / 3.0], &Tolerance::default()).unwrap()
    }

    #[test]
    fn constant_identity_sequence() {
        let w = m2();
        let tol = Tolerance::default();
        let seq = vec![CMatrix::identity(4, 4); 8];
        let out = sauvageot_synthesize(&w, &seq, &[IntervalSpec { n: 1 }], &GRID, &Sampling::new(10, 0), &tol).unwrap();
        for (_, s) in &out.samples {
            assert!(dist(s, &CMatrix::identity(4, 4)) < 1e-14);
        }
    }

    #[test]
    fn commuting_heat_sequence_recovers_exponential() {
        let w = WeightedAlgebra::diagonal(vec![2, 1], &[0.5, 0.3, 0.2], &Tolerance::default()).unwrap();
        let tol = Tolerance::default();
        let d = w.dim();
        let g = CMatrix::identity(d, d) - hilbert_implementation(&w, &w.state_expectation());
        let seq: Vec<CMatrix> = (1..=64).map(|k| expm(&g, -1.0 / k as f64, &tol)).collect();
        let out = sauvageot_synthesize(&w, &seq, &[IntervalSpec { n: 2 }], &GRID, &Sampling::new(20, 1), &tol).unwrap();
        assert!(out.semigroup_residual < 1e-10);
        // calibrate c on t = 1 and compare on the whole grid
        let s1 = out.at(1.0);
        let v = g.column(1).into_owned();
        let v = v.unscale(v.norm());
        let c = -v.dotc(&(&s1 * &v)).re.ln();
        assert!(c > 0.0);
        for &t in &GRID {
            assert!(dist(&out.at(t), &expm(&g, -c * t, &tol)) < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn non_commuting_pair_stays_markov() {
        let w = m2();
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t1 = hilbert_implementation(&w, &w.diagonal_expectation());
        let t2 = hilbert_implementation(&w, &random_kms_markov(&w, &mut rng, &tol).unwrap());
        assert!(dist(&(&t1 * &t2), &(&t2 * &t1)) > 1e-3);
        let eye = CMatrix::identity(4, 4);
        let seq: Vec<CMatrix> = (1..=32)
            .map(|n| {
                let x = 1.0 / n as f64;
                let t = if n % 2 == 0 { &t1 } else { &t2 };
                eye.scale(1.0 - x) + t.scale(x)
            })
            .collect();
        let out = sauvageot_synthesize(&w, &seq, &[IntervalSpec { n: 2 }], &GRID, &Sampling::new(40, 5), &tol).unwrap();
        assert!(out.self_adjoint_residual < 1e-12);
        assert!(out.max_norm <= 1.0 + 1e-12);
        assert!(out.semigroup_residual < 1e-10);
        assert!(out.markov.iter().all(|(_, _, v)| v.pass));
    }

    #[test]
    fn rejects_bad_sequences() {
        let w = m2();
        let tol = Tolerance::default();
        let sampling = Sampling::new(40, 2);
        let grow = vec![CMatrix::identity(4, 4).scale(1.5)];
        assert!(matches!(
            sauvageot_synthesize(&w, &grow, &[], &GRID, &sampling, &tol),
            Err(Error::SequenceNotContractive(_))
        ));
        let transpose = hilbert_implementation(&w, &w.transpose_map());
        assert!(matches!(
            sauvageot_synthesize(&w, &[transpose], &[IntervalSpec { n: 2 }], &GRID, &sampling, &tol),
            Err(Error::IntervalViolation { .. })
        ));
    }
}
