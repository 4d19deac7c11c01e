//! Quadratic forms on `L²` and the sampled Dirichlet property.

use rand::Rng;

use super::markov::{amplified_bound, amplified_hermitian, Sampling};
use super::WeightedAlgebra;
use crate::matcore::{dykstra_project, hermitian_residual, min_eig, CMatrix, Tolerance};
use crate::{Error, Result};

/// `Q(ζ) = ⟨A ζ, ζ⟩` for a positive semidefinite `A` on `L²`.
#[derive(Clone, Debug)]
pub struct QuadraticForm {
    a: CMatrix,
}

impl QuadraticForm {
    pub fn new(a: CMatrix, tol: &Tolerance) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::ShapeError("quadratic form matrix must be square".into()));
        }
        let herm = hermitian_residual(&a);
        if herm > tol.structural * (1.0 + crate::matcore::max_abs(&a)) {
            return Err(Error::NotHermitian { residual: herm });
        }
        let lo = min_eig(&a);
        if lo < -tol.spectral_slack * (1.0 + crate::matcore::max_abs(&a)) {
            return Err(Error::NegativeEigenvalue { min: lo });
        }
        Ok(Self {
            a: crate::matcore::hermitian_part(&a),
        })
    }

    pub fn zero(d: usize) -> Self {
        Self { a: CMatrix::zeros(d, d) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn eval(&self, zeta: &crate::matcore::CVector) -> f64 {
        zeta.dotc(&(&self.a * zeta)).re
    }

    /// `Q^(n)(ζ) = Σ_{ij} Q(ζ_ij)` for `ζ ∈ M_n ⊗ L²`.
    pub fn eval_amplified(&self, w: &WeightedAlgebra, n: usize, zeta: &CMatrix) -> f64 {
        let m = w.matrix_dim();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let block = zeta.view((i * m, j * m), (m, m)).into_owned();
                total += self.eval(&w.layout().from_matrix(&block));
            }
        }
        total
    }
}

#[derive(Clone, Debug)]
pub struct DirichletVerdict {
    pub pass: bool,
    /// Smallest `Q^(n)(ξ) − Q^(n)(π ξ)` over the samples.
    pub worst_margin: f64,
    pub samples: usize,
    pub witness: Option<CMatrix>,
}

fn dirichlet_sample<R: Rng + ?Sized>(w: &WeightedAlgebra, n: usize, index: usize, rng: &mut R) -> CMatrix {
    let scale = [0.2, 1.0, 4.0][index % 3];
    let h = amplified_hermitian(w, n, rng).scale(scale);
    if index % 2 == 0 {
        // centred on the interval so that only part of the spectrum is clipped
        h + amplified_bound(w, n).scale(0.5)
    } else {
        h
    }
}

/// Sampled check of `Q^(n)(π ξ) ≤ Q^(n)(ξ)` with `π` the nearest-point
/// projection onto `[0, (I_n ⊗ ρ)^{1/2}]`.
pub fn dirichlet_check(
    w: &WeightedAlgebra,
    q: &QuadraticForm,
    n: usize,
    sampling: &Sampling,
    tol: &Tolerance,
) -> Result<DirichletVerdict> {
    let d = w.dim();
    if q.a.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "form is {}x{}, L² has dimension {d}",
            q.a.nrows(),
            q.a.ncols()
        )));
    }
    let bound = amplified_bound(w, n);
    let results = sampling.exec.trials(sampling.seed, sampling.samples, |i, rng| -> Result<(f64, f64, CMatrix)> {
        let xi = dirichlet_sample(w, n, i, rng);
        let projected = dykstra_project(&xi, &bound, tol)?.point;
        let before = q.eval_amplified(w, n, &xi);
        let after = q.eval_amplified(w, n, &projected);
        Ok((before - after, before, xi))
    });
    let mut worst = f64::INFINITY;
    let mut pass = true;
    let mut witness = None;
    for res in results {
        let (m, before, xi) = res?;
        if m < -tol.spectral_slack * (1.0 + before) {
            pass = false;
        }
        if m < worst {
            worst = m;
            witness = Some(xi);
        }
    }
    Ok(DirichletVerdict {
        pass,
        worst_margin: worst,
        samples: sampling.samples,
        witness,
    })
}
