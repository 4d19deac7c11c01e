//! Constructors: function algebras, group algebras, the Kac–Paljutkin
//! algebra, and the decomposition of an abstract finite Hopf *-algebra into
//! matrix blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{pair, FiniteGroup, FiniteQuantumGroup, NamedBasis};
use crate::layout::BlockLayout;
use crate::matcore::{c, dist, dist_vec, herm_eig_unchecked, hermitian_part, nullspace, r, CMatrix, CVector, C64, I, ONE, ZERO};
use crate::sample;
use crate::{Error, Result};

/// Hopf *-algebra data in an arbitrary basis (no block structure assumed).
#[derive(Clone, Debug)]
pub struct AbstractHopf {
    pub name: String,
    pub labels: Vec<String>,
    pub mult: CMatrix,
    pub star: CMatrix,
    pub unit: CVector,
    pub coproduct: CMatrix,
    pub counit: CVector,
    pub antipode: CMatrix,
}

impl AbstractHopf {
    fn dim(&self) -> usize {
        self.unit.len()
    }

    fn product(&self, x: &CVector, y: &CVector) -> CVector {
        &self.mult * x.kronecker(y)
    }

    fn adjoint(&self, x: &CVector) -> CVector {
        &self.star * x.map(|z| z.conj())
    }

    fn left_regular(&self, x: &CVector) -> CMatrix {
        let d = self.dim();
        &self.mult * x.kronecker(&CMatrix::identity(d, d))
    }

    /// Spectral projection of a self-adjoint `y` for the eigenvalue `lam`,
    /// as a polynomial in `y` with unit `p`.
    fn spectral_projection(&self, y: &CVector, p: &CVector, lam: f64, others: &[f64]) -> CVector {
        let mut q = p.clone();
        for &mu in others {
            let factor = (y - p * r(mu)).unscale(lam - mu);
            q = self.product(&q, &factor);
        }
        // the interpolation loses digits when eigenvalues are close; q is a
        // polynomial in y, so purifying it stays in the algebra y generates
        for _ in 0..4 {
            q = (&q + self.adjoint(&q)).unscale(2.0);
            let q2 = self.product(&q, &q);
            q = &q2 * r(3.0) - self.product(&q2, &q) * r(2.0);
        }
        q
    }
}

/// Solves the left- and right-invariance equations for a functional with
/// `h(1) = 1`.
pub fn solve_haar(unit: &CVector, coproduct: &CMatrix) -> Result<CVector> {
    let d = unit.len();
    let mut sys = CMatrix::zeros(2 * d * d, d);
    for k in 0..d {
        for j in 0..d {
            // (h⊗id)Δ(e_k) in slot j, and (id⊗h)Δ(e_k) in slot j
            let rl = k * d + j;
            let rr = d * d + k * d + j;
            for i in 0..d {
                sys[(rl, i)] += coproduct[(i * d + j, k)];
                sys[(rr, i)] += coproduct[(j * d + i, k)];
            }
            sys[(rl, k)] -= unit[j];
            sys[(rr, k)] -= unit[j];
        }
    }
    let ns = nullspace(&sys, 1e-9);
    if ns.ncols() != 1 {
        return Err(Error::AxiomFailure {
            axiom: format!("Haar invariance has a {}-dimensional solution space", ns.ncols()),
            residual: f64::NAN,
        });
    }
    let h = ns.column(0).into_owned();
    let norm = pair(&h, unit);
    if norm.norm() < 1e-12 {
        return Err(Error::AxiomFailure {
            axiom: "invariant functional vanishes on the unit".into(),
            residual: norm.norm(),
        });
    }
    Ok(h.map(|z| z / norm))
}

/// Splits sorted (descending) eigenvalues into clusters separated by more
/// than `gap`; returns cluster means and sizes.
fn clusters(values: &[f64], gap: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > gap {
            let chunk = &values[start..i];
            out.push((chunk.iter().sum::<f64>() / chunk.len() as f64, chunk.len()));
            start = i;
        }
    }
    out
}

/// Realises an abstract Hopf *-algebra in the matrix-unit basis of its
/// Wedderburn decomposition.
///
/// The Haar state is solved from the invariance equations; central
/// projections come from the spectrum of a random self-adjoint central
/// element and matrix units from a random self-adjoint element of each block.
/// `seed` only affects the choice of matrix units, i.e. the result up to an
/// inner automorphism.
pub fn realize(abs: &AbstractHopf, seed: u64) -> Result<FiniteQuantumGroup> {
    let d = abs.dim();
    let haar = solve_haar(&abs.unit, &abs.coproduct)?;
    let gram = CMatrix::from_fn(d, d, |i, j| {
        let mut ei = CVector::zeros(d);
        let mut ej = CVector::zeros(d);
        ei[i] = ONE;
        ej[j] = ONE;
        pair(&haar, &abs.product(&abs.adjoint(&ei), &ej))
    });
    let (gvals, gvecs) = herm_eig_unchecked(&gram);
    if gvals.last().cloned().unwrap_or(0.0) <= 1e-10 {
        return Err(Error::AxiomFailure {
            axiom: "Haar state is not faithful".into(),
            residual: gvals.last().cloned().unwrap_or(0.0),
        });
    }
    // K^{1/2} L_a K^{-1/2} is a *-representation on C^d with the standard inner product
    let sq = &gvecs * CMatrix::from_diagonal(&CVector::from_iterator(d, gvals.iter().map(|v| r(v.sqrt())))) * gvecs.adjoint();
    let sq_inv = &gvecs * CMatrix::from_diagonal(&CVector::from_iterator(d, gvals.iter().map(|v| r(1.0 / v.sqrt())))) * gvecs.adjoint();
    let rep = |x: &CVector| hermitian_part(&(&sq * abs.left_regular(x) * &sq_inv));
    let trace_of = |x: &CVector| -> f64 {
        let l = abs.left_regular(x);
        (0..d).map(|i| l[(i, i)].re).sum()
    };

    // centre: z with e_i z = z e_i for all i
    let mut comm = CMatrix::zeros(d * d, d);
    for i in 0..d {
        for j in 0..d {
            for a in 0..d {
                comm[(i * d + a, j)] = abs.mult[(a, i * d + j)] - abs.mult[(a, j * d + i)];
            }
        }
    }
    let centre = nullspace(&comm, 1e-9);
    let m = centre.ncols();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut central: Option<Vec<CVector>> = None;
    for _ in 0..20 {
        let coeffs = sample::complex_vector(m, &mut rng);
        let w = &centre * coeffs;
        let y = &w + abs.adjoint(&w);
        let (vals, _) = herm_eig_unchecked(&rep(&y));
        let spread = vals.first().cloned().unwrap_or(0.0) - vals.last().cloned().unwrap_or(0.0);
        let cl = clusters(&vals, 1e-6 * (1.0 + spread));
        if cl.len() != m {
            continue;
        }
        let means: Vec<f64> = cl.iter().map(|c| c.0).collect();
        let projections: Vec<CVector> = means
            .iter()
            .map(|&lam| {
                let others: Vec<f64> = means.iter().cloned().filter(|&x| x != lam).collect();
                abs.spectral_projection(&y, &abs.unit, lam, &others)
            })
            .collect();
        central = Some(projections);
        break;
    }
    let central = central.ok_or_else(|| Error::AxiomFailure {
        axiom: "could not separate the minimal central projections".into(),
        residual: f64::NAN,
    })?;

    struct Block {
        p: CVector,
        n: usize,
        counit: bool,
    }
    let mut blocks: Vec<Block> = Vec::with_capacity(m);
    for p in central {
        let n = (trace_of(&p).max(0.0).sqrt()).round() as usize;
        if n == 0 || ((n * n) as f64 - trace_of(&p)).abs() > 1e-6 {
            return Err(Error::AxiomFailure {
                axiom: "central projection of non-square rank".into(),
                residual: trace_of(&p),
            });
        }
        let counit = (pair(&abs.counit, &p) - ONE).norm() < 1e-6;
        blocks.push(Block { p, n, counit });
    }
    // counit block first, then by size (stable)
    blocks.sort_by_key(|b| (!b.counit, b.n));
    let layout = BlockLayout::new(blocks.iter().map(|b| b.n).collect())?;

    let mut p_mat = CMatrix::zeros(d, d);
    for (k, b) in blocks.iter().enumerate() {
        let n = b.n;
        if n == 1 {
            p_mat.set_column(layout.index(k, 0, 0), &b.p);
            continue;
        }
        let units = matrix_units(abs, &b.p, n, &haar, &rep, &mut rng)?;
        for a in 0..n {
            for bb in 0..n {
                p_mat.set_column(layout.index(k, a, bb), &units[a][bb]);
            }
        }
    }
    let p_inv = p_mat.clone().try_inverse().ok_or_else(|| Error::AxiomFailure {
        axiom: "matrix units are linearly dependent".into(),
        residual: f64::NAN,
    })?;

    let mult = &p_inv * &abs.mult * p_mat.kronecker(&p_mat);
    let star = &p_inv * &abs.star * p_mat.map(|z| z.conj());
    let unit = &p_inv * &abs.unit;
    let res = dist(&mult, &layout.mult_tensor())
        .max(dist(&star, &layout.star_matrix()))
        .max(dist_vec(&unit, &layout.unit()));
    if res > 1e-8 {
        return Err(Error::AxiomFailure {
            axiom: "matrix-unit decomposition".into(),
            residual: res,
        });
    }
    let coproduct = p_inv.kronecker(&p_inv) * &abs.coproduct * &p_mat;
    let counit = p_mat.transpose() * &abs.counit;
    let antipode = &p_inv * &abs.antipode * &p_mat;
    let haar = p_mat.transpose() * &haar;
    Ok(FiniteQuantumGroup {
        name: abs.name.clone(),
        mult: layout.mult_tensor(),
        star: layout.star_matrix(),
        unit: layout.unit(),
        layout,
        coproduct,
        counit,
        antipode,
        haar,
        named: Some(NamedBasis {
            labels: abs.labels.clone(),
            coords: p_inv,
        }),
    })
}

/// Matrix units `e_{ab}` of the block with central support `p` (size `n`).
fn matrix_units(
    abs: &AbstractHopf,
    p: &CVector,
    n: usize,
    haar: &CVector,
    rep: &impl Fn(&CVector) -> CMatrix,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<CVector>>> {
    let d = abs.dim();
    for _ in 0..20 {
        let v = sample::complex_vector(d, rng);
        let v = &v + abs.adjoint(&v);
        let y = abs.product(&abs.product(p, &v), p);
        let norm = crate::matcore::op_norm(&rep(&y));
        let shift = 1.0 + 2.0 * norm;
        let y = &y + p * r(shift);
        let (vals, _) = herm_eig_unchecked(&rep(&y));
        let inside: Vec<f64> = vals.into_iter().filter(|&v| v > 0.5).collect();
        let cl = clusters(&inside, 1e-6 * (1.0 + norm));
        if cl.len() != n {
            continue;
        }
        let means: Vec<f64> = cl.iter().map(|c| c.0).collect();
        let qs: Vec<CVector> = means
            .iter()
            .map(|&lam| {
                let others: Vec<f64> = means.iter().cloned().filter(|&x| x != lam).collect();
                abs.spectral_projection(&y, p, lam, &others)
            })
            .collect();
        let h_q1 = pair(haar, &qs[0]).re;
        let rnd = sample::complex_vector(d, rng);
        let mut first_row = vec![qs[0].clone()];
        for q in qs.iter().skip(1) {
            let v = abs.product(&abs.product(&qs[0], &rnd), q);
            let vv = pair(haar, &abs.product(&v, &abs.adjoint(&v))).re;
            if vv <= 1e-12 {
                return Err(Error::AxiomFailure {
                    axiom: "degenerate matrix unit".into(),
                    residual: vv,
                });
            }
            first_row.push(v.unscale((vv / h_q1).sqrt()));
        }
        let col: Vec<CVector> = first_row.iter().map(|e| abs.adjoint(e)).collect();
        let units = (0..n)
            .map(|a| (0..n).map(|b| abs.product(&col[a], &first_row[b])).collect())
            .collect();
        return Ok(units);
    }
    Err(Error::AxiomFailure {
        axiom: "could not split a matrix block into minimal projections".into(),
        residual: f64::NAN,
    })
}

/// `C(G)`: functions on `G`, pointwise product, `Δδ_g = Σ_{st=g} δ_s⊗δ_t`.
pub fn function_algebra(g: &FiniteGroup) -> Result<FiniteQuantumGroup> {
    let n = g.order();
    let layout = BlockLayout::new(vec![1; n])?;
    let mut coproduct = CMatrix::zeros(n * n, n);
    let mut antipode = CMatrix::zeros(n, n);
    for s in 0..n {
        for t in 0..n {
            coproduct[(s * n + t, g.mul(s, t))] = ONE;
        }
        antipode[(g.inv(s), s)] = ONE;
    }
    let mut counit = CVector::zeros(n);
    counit[0] = ONE;
    Ok(FiniteQuantumGroup {
        name: format!("function_algebra:{}", g.name),
        mult: layout.mult_tensor(),
        star: layout.star_matrix(),
        unit: layout.unit(),
        coproduct,
        counit,
        antipode,
        haar: CVector::from_element(n, r(1.0 / n as f64)),
        named: Some(NamedBasis {
            labels: g.labels.iter().map(|l| format!("δ_{l}")).collect(),
            coords: CMatrix::identity(n, n),
        }),
        layout,
    })
}

/// `C[G]` in the basis `λ_g`, before block decomposition.
pub fn group_algebra_abstract(g: &FiniteGroup) -> AbstractHopf {
    let n = g.order();
    let mut mult = CMatrix::zeros(n, n * n);
    let mut star = CMatrix::zeros(n, n);
    let mut coproduct = CMatrix::zeros(n * n, n);
    for a in 0..n {
        for b in 0..n {
            mult[(g.mul(a, b), a * n + b)] = ONE;
        }
        star[(g.inv(a), a)] = ONE;
        coproduct[(a * n + a, a)] = ONE;
    }
    let mut unit = CVector::zeros(n);
    unit[0] = ONE;
    AbstractHopf {
        name: format!("group_algebra:{}", g.name),
        labels: g.labels.iter().map(|l| format!("λ_{l}")).collect(),
        mult,
        antipode: star.clone(),
        star,
        unit,
        coproduct,
        counit: CVector::from_element(n, ONE),
    }
}

/// `C[G]` with `Δλ_g = λ_g⊗λ_g`, realised in matrix units. The named basis
/// holds the `λ_g`.
pub fn group_algebra(g: &FiniteGroup, seed: u64) -> Result<FiniteQuantumGroup> {
    realize(&group_algebra_abstract(g), seed)
}

/// The 8-dimensional Kac–Paljutkin quantum group on `C⊕C⊕C⊕C⊕M_2`.
///
/// The Haar state is solved from the invariance equations rather than
/// entered by hand.
pub fn kac_paljutkin() -> Result<FiniteQuantumGroup> {
    let layout = BlockLayout::new(vec![1, 1, 1, 1, 2])?;
    let d = layout.dim();
    let (e1, e2, e3, e4) = (0, 1, 2, 3);
    let (a11, a12, a21, a22) = (4, 5, 6, 7);
    let h = r(0.5);
    let ih = c(0.0, 0.5);
    let terms: [Vec<(usize, usize, C64)>; 8] = [
        vec![
            (e1, e1, ONE), (e2, e2, ONE), (e3, e3, ONE), (e4, e4, ONE),
            (a11, a11, h), (a12, a12, h), (a21, a21, h), (a22, a22, h),
        ],
        vec![
            (e1, e2, ONE), (e2, e1, ONE), (e3, e4, ONE), (e4, e3, ONE),
            (a11, a22, h), (a22, a11, h), (a21, a12, ih), (a12, a21, -ih),
        ],
        vec![
            (e1, e3, ONE), (e3, e1, ONE), (e2, e4, ONE), (e4, e2, ONE),
            (a11, a22, h), (a22, a11, h), (a21, a12, -ih), (a12, a21, ih),
        ],
        vec![
            (e1, e4, ONE), (e4, e1, ONE), (e2, e3, ONE), (e3, e2, ONE),
            (a11, a11, h), (a22, a22, h), (a12, a12, -h), (a21, a21, -h),
        ],
        vec![
            (e1, a11, ONE), (a11, e1, ONE), (e2, a22, ONE), (a22, e2, ONE),
            (e3, a22, ONE), (a22, e3, ONE), (e4, a11, ONE), (a11, e4, ONE),
        ],
        vec![
            (e1, a12, ONE), (a12, e1, ONE), (e2, a21, I), (a21, e2, -I),
            (e3, a21, -I), (a21, e3, I), (e4, a12, -ONE), (a12, e4, -ONE),
        ],
        vec![
            (e1, a21, ONE), (a21, e1, ONE), (e2, a12, -I), (a12, e2, I),
            (e3, a12, I), (a12, e3, -I), (e4, a21, -ONE), (a21, e4, -ONE),
        ],
        vec![
            (e1, a22, ONE), (a22, e1, ONE), (e2, a11, ONE), (a11, e2, ONE),
            (e3, a11, ONE), (a11, e3, ONE), (e4, a22, ONE), (a22, e4, ONE),
        ],
    ];
    let mut coproduct = CMatrix::zeros(d * d, d);
    for (k, list) in terms.iter().enumerate() {
        for &(i, j, v) in list {
            coproduct[(i * d + j, k)] += v;
        }
    }
    let mut counit = CVector::zeros(d);
    counit[e1] = ONE;
    let mut antipode = CMatrix::identity(d, d);
    antipode[(a12, a12)] = ZERO;
    antipode[(a21, a21)] = ZERO;
    antipode[(a21, a12)] = ONE;
    antipode[(a12, a21)] = ONE;
    let mult = layout.mult_tensor();
    let unit = layout.unit();
    let haar = solve_haar(&unit, &coproduct)?;
    let labels = ["e1", "e2", "e3", "e4", "a11", "a12", "a21", "a22"].map(String::from).to_vec();
    Ok(FiniteQuantumGroup {
        name: "kac_paljutkin".into(),
        star: layout.star_matrix(),
        mult,
        unit,
        coproduct,
        counit,
        antipode,
        haar,
        named: Some(NamedBasis {
            labels,
            coords: CMatrix::identity(d, d),
        }),
        layout,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::{axiom_residual, check_axioms};
    use crate::matcore::Tolerance;

    #[test]
    fn z2_function_algebra_formulas() {
        let g = function_algebra(&FiniteGroup::cyclic(2).unwrap()).unwrap();
        // Δδ_e = δ_e⊗δ_e + δ_g⊗δ_g
        let col = g.coproduct.column(0);
        assert_eq!(col[0], ONE);
        assert_eq!(col[3], ONE);
        assert_eq!(col[1], ZERO);
        assert_eq!(g.haar, CVector::from_element(2, r(0.5)));
    }

    #[test]
    fn trivial_group() {
        let g = function_algebra(&FiniteGroup::cyclic(1).unwrap()).unwrap();
        assert_eq!(g.dim(), 1);
        assert!(axiom_residual(&check_axioms(&g, &Tolerance::default()).unwrap()) < 1e-15);
    }

    #[test]
    fn z2_group_algebra_idempotents() {
        let g = group_algebra(&FiniteGroup::cyclic(2).unwrap(), 0).unwrap();
        assert_eq!(g.layout.blocks(), &[1, 1]);
        // λ_e = 1, λ_g = p_0 − p_1 with the counit block first
        let nb = g.named.as_ref().unwrap();
        let lg = nb.coords.column(1);
        assert!((lg[0] - ONE).norm() < 1e-12 && (lg[1] + ONE).norm() < 1e-12);
    }

    #[test]
    fn haar_solver_matches_counting_measure() {
        let g = function_algebra(&FiniteGroup::symmetric3().unwrap()).unwrap();
        let h = solve_haar(&g.unit, &g.coproduct).unwrap();
        assert!(dist_vec(&h, &g.haar) < 1e-12);
    }

    #[test]
    fn kac_paljutkin_haar_values() {
        let g = kac_paljutkin().unwrap();
        for i in 0..4 {
            assert!((g.haar[i] - r(0.125)).norm() < 1e-12);
        }
        assert!((g.haar[4] - r(0.25)).norm() < 1e-12);
        assert!((g.haar[7] - r(0.25)).norm() < 1e-12);
        assert!(g.haar[5].norm() < 1e-12 && g.haar[6].norm() < 1e-12);
    }

    #[test]
    fn clusters_split_on_gaps() {
        let cl = clusters(&[3.0, 3.0, 1.0, 1.0 - 1e-12, -2.0], 1e-6);
        assert_eq!(cl.len(), 3);
        assert_eq!(cl[1].1, 2);
    }
}
