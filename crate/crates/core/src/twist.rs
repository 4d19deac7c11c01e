//! 2-cocycles `Ω ∈ A ⊗ A`, twisted coproducts `Δ_Ω = ΩΔ(·)Ω*`, and the
//! transport of convolution semigroups to the twisted quantum group.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{DMatrix, DVector, Dyn, Owned};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conv::{choi_margin, convolve, haar_weighted, Functional};
use crate::hopf::{axiom_residual, check_axioms, row, FiniteGroup, FiniteQuantumGroup};
use crate::layout::BlockLayout;
use crate::matcore::{c, dist, dist_vec, herm_eig_unchecked, herm_fn, max_abs, r, CMatrix, CVector, Tolerance, C64, I};
use crate::report::{Entry, VerificationReport};
use crate::semigrp::{evolve, semigroup_operator, ConvolutionSemigroup};
use crate::{gl, sample, Error, Result};

const MODULE: &str = "twist";

#[derive(Clone, Debug)]
pub struct TwoCocycle {
    /// Coordinates in `A ⊗ A` (index `i·d + j`).
    pub omega: CVector,
    /// `(ε⊗id)(Ω) = (id⊗ε)(Ω) = 1`.
    pub normalized: bool,
}

impl TwoCocycle {
    pub fn new(g: &FiniteQuantumGroup, omega: CVector, tol: &Tolerance) -> Result<Self> {
        let d = g.dim();
        if omega.len() != d * d {
            return Err(Error::DimensionMismatch(format!("Ω needs {} coordinates", d * d)));
        }
        let normalized = normalization_residual(g, &omega) <= tol.structural;
        Ok(Self { omega, normalized })
    }

    pub fn identity(g: &FiniteQuantumGroup) -> Self {
        Self {
            omega: g.unit.kronecker(&g.unit),
            normalized: true,
        }
    }
}

/// An element of `A ⊗ A ⊗ A` as its blocks `M_a ⊗ M_b ⊗ M_c`, indexed by
/// the block triple.
fn triple_blocks(layout: &BlockLayout, x: &CVector) -> Vec<CMatrix> {
    let d = layout.dim();
    let sizes = layout.blocks();
    let nb = sizes.len();
    let mut out: Vec<CMatrix> = (0..nb * nb * nb)
        .map(|t| {
            let n = sizes[t / (nb * nb)] * sizes[(t / nb) % nb] * sizes[t % nb];
            CMatrix::zeros(n, n)
        })
        .collect();
    let entries: Vec<_> = (0..d).map(|i| layout.entry(i)).collect();
    for (idx, &v) in x.iter().enumerate() {
        if v == C64::new(0.0, 0.0) {
            continue;
        }
        let (p, q, s) = (entries[idx / (d * d)], entries[(idx / d) % d], entries[idx % d]);
        let (nq, ns) = (sizes[q.0], sizes[s.0]);
        let t = (p.0 * nb + q.0) * nb + s.0;
        out[t][((p.1 * nq + q.1) * ns + s.1, (p.2 * nq + q.2) * ns + s.2)] = v;
    }
    out
}

fn blockwise_product(a: &[CMatrix], b: &[CMatrix]) -> Vec<CMatrix> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn slice_counit(g: &FiniteQuantumGroup, omega: &CVector) -> (CVector, CVector) {
    let d = g.dim();
    let id = CMatrix::identity(d, d);
    let eps = row(&g.counit);
    (eps.kronecker(&id) * omega, id.kronecker(&eps) * omega)
}

fn normalization_residual(g: &FiniteQuantumGroup, omega: &CVector) -> f64 {
    let (left, right) = slice_counit(g, omega);
    dist_vec(&left, &g.unit).max(dist_vec(&right, &g.unit))
}

pub fn unitarity_residual(g: &FiniteQuantumGroup, omega: &CVector) -> f64 {
    let m = g.layout.tensor_to_matrix(omega);
    let id = CMatrix::identity(m.nrows(), m.ncols());
    dist(&(m.adjoint() * &m), &id).max(dist(&(&m * m.adjoint()), &id))
}

/// `‖(1⊗Ω)(id⊗Δ)(Ω) − (Ω⊗1)(Δ⊗id)(Ω)‖`.
pub fn cocycle_residual(g: &FiniteQuantumGroup, omega: &CVector) -> f64 {
    let d = g.dim();
    let id = CMatrix::identity(d, d);
    let l = &g.layout;
    let one_omega = triple_blocks(l, &g.unit.kronecker(omega));
    let omega_one = triple_blocks(l, &omega.kronecker(&g.unit));
    let right_delta = triple_blocks(l, &(id.kronecker(&g.coproduct) * omega));
    let left_delta = triple_blocks(l, &(g.coproduct.kronecker(&id) * omega));
    let lhs = blockwise_product(&one_omega, &right_delta);
    let rhs = blockwise_product(&omega_one, &left_delta);
    lhs.iter().zip(&rhs).map(|(x, y)| dist(x, y)).fold(0.0, f64::max)
}

/// Multiplies `Ω` by the unimodular scalar that normalizes it, if one exists.
/// Returns the cocycle and the scalar applied.
pub fn normalize_cocycle(g: &FiniteQuantumGroup, omega: &CVector, tol: &Tolerance) -> Result<(TwoCocycle, C64)> {
    let (left, right) = slice_counit(g, omega);
    let scalar = g.counit_of(&left);
    let scale_res = dist_vec(&left, &(&g.unit * scalar)).max(dist_vec(&right, &(&g.unit * scalar)));
    if scale_res > tol.structural || (scalar.norm() - 1.0).abs() > tol.structural {
        return Err(Error::PreconditionFailed(format!(
            "(ε⊗id)(Ω) is not a unimodular multiple of 1 (residual {scale_res:e})"
        )));
    }
    let fixed = omega * scalar.conj();
    Ok((TwoCocycle::new(g, fixed, tol)?, scalar.conj()))
}

/// Result of the heuristic search for `U` with `Ω = (U⊗U)Δ(U*)`.
#[derive(Clone, Debug)]
pub struct TrivialityProbe {
    pub residual: f64,
    /// Whether some restart reached `residual < threshold`.
    pub trivialized: bool,
    pub threshold: f64,
    pub restarts: usize,
    pub seed: u64,
    pub unitary: CMatrix,
}

/// Hermitian elements of `A` from `d` real parameters, one per real degree
/// of freedom of each block.
fn hermitian_from_params(layout: &BlockLayout, p: &[f64]) -> CMatrix {
    let n = layout.matrix_dim();
    let mut h = CMatrix::zeros(n, n);
    let mut it = p.iter();
    for (k, &size) in layout.blocks().iter().enumerate() {
        let o = layout.block_offset(k);
        for a in 0..size {
            h[(o + a, o + a)] = r(*it.next().expect("parameter count"));
            for b in a + 1..size {
                let z = c(*it.next().expect("parameter count"), *it.next().expect("parameter count"));
                h[(o + a, o + b)] = z;
                h[(o + b, o + a)] = z.conj();
            }
        }
    }
    h
}

/// `(U⊗U)Δ(U*)` in coordinates, for a unitary `U` given as a matrix.
pub fn coboundary(g: &FiniteQuantumGroup, u: &CMatrix) -> CVector {
    let l = &g.layout;
    let uu = u.kronecker(u);
    let delta = l.tensor_to_matrix(&g.delta(&l.from_matrix(&u.adjoint())));
    l.tensor_from_matrix(&(uu * delta))
}

struct ProbeProblem<'a> {
    g: &'a FiniteQuantumGroup,
    target: &'a CVector,
    params: DVector<f64>,
}

impl ProbeProblem<'_> {
    fn unitary(&self, p: &[f64]) -> CMatrix {
        herm_fn(&hermitian_from_params(&self.g.layout, p), |x| C64::from_polar(1.0, x))
    }

    fn residual_at(&self, p: &[f64]) -> DVector<f64> {
        let diff = coboundary(self.g, &self.unitary(p)) - self.target;
        let m = diff.len();
        DVector::from_fn(2 * m, |i, _| if i < m { diff[i].re } else { diff[i - m].im })
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for ProbeProblem<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.params.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.params.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(self.residual_at(self.params.as_slice()))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let h = 1e-7;
        let p = self.params.as_slice().to_vec();
        let cols: Vec<DVector<f64>> = (0..p.len())
            .map(|j| {
                let mut plus = p.clone();
                let mut minus = p.clone();
                plus[j] += h;
                minus[j] -= h;
                (self.residual_at(&plus) - self.residual_at(&minus)) / (2.0 * h)
            })
            .collect();
        Some(DMatrix::from_columns(&cols))
    }
}

/// Searches for `U` with `(U⊗U)Δ(U*) = Ω` by Levenberg–Marquardt from
/// `restarts` random starting points. Failure to trivialize is evidence of
/// non-triviality, not a proof.
pub fn triviality_probe(g: &FiniteQuantumGroup, omega: &CVector, restarts: usize, seed: u64) -> TrivialityProbe {
    let threshold = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = g.dim();
    let mut best = (f64::INFINITY, CMatrix::identity(g.layout.matrix_dim(), g.layout.matrix_dim()));
    for attempt in 0..restarts.max(1) {
        let start = if attempt == 0 {
            DVector::zeros(d)
        } else {
            DVector::from_fn(d, |_, _| sample::uniform(&mut rng, -std::f64::consts::PI, std::f64::consts::PI))
        };
        let problem = ProbeProblem {
            g,
            target: omega,
            params: start,
        };
        let (solved, _) = LevenbergMarquardt::new().with_patience(200).minimize(problem);
        let u = solved.unitary(solved.params.as_slice());
        let res = dist_vec(&coboundary(g, &u), omega);
        if res < best.0 {
            best = (res, u);
        }
        if best.0 < threshold {
            break;
        }
    }
    TrivialityProbe {
        residual: best.0,
        trivialized: best.0 < threshold,
        threshold,
        restarts,
        seed,
        unitary: best.1,
    }
}

#[derive(Clone, Debug)]
pub struct CocycleCheck {
    pub report: VerificationReport,
    pub probe: Option<TrivialityProbe>,
}

/// Options for the triviality probe; `restarts = 0` skips it.
#[derive(Clone, Copy, Debug)]
pub struct ProbeOptions {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { restarts: 12, seed: 0 }
    }
}

/// Unitarity, cocycle identity and normalization residuals. The triviality
/// probe result is attached separately and never affects `report.pass()`.
pub fn check_cocycle(g: &FiniteQuantumGroup, omega: &CVector, probe: ProbeOptions, tol: &Tolerance) -> Result<CocycleCheck> {
    let d = g.dim();
    if omega.len() != d * d {
        return Err(Error::DimensionMismatch(format!("Ω needs {} coordinates", d * d)));
    }
    let mut report = VerificationReport::new();
    let block = g.layout.tensor_block_violation(&g.layout.tensor_to_matrix(omega));
    let e = |check: &str, anchor: &str, res: f64| Entry::new(MODULE, check, anchor, res, tol.structural).param("group", &g.name);
    report.push(e("cocycle.in_tensor_square", "Ω ∈ A ⊗ A", block));
    report.push(e("cocycle.unitary", "Ω*Ω = ΩΩ* = 1", unitarity_residual(g, omega)));
    report.push(e("cocycle.identity", "(1⊗Ω)(id⊗Δ)(Ω) = (Ω⊗1)(Δ⊗id)(Ω)", cocycle_residual(g, omega)));
    report.push(e("cocycle.normalized", "(ε⊗id)(Ω) = (id⊗ε)(Ω) = 1", normalization_residual(g, omega)));
    let probe = (probe.restarts > 0).then(|| triviality_probe(g, omega, probe.restarts, probe.seed));
    Ok(CocycleCheck { report, probe })
}

/// Characters of an abelian subgroup `H`, as value tables over `subgroup`
/// (in the given order), sorted lexicographically by their phases in
/// `[0, 2π)`; the trivial character comes first.
pub fn subgroup_characters(group: &FiniteGroup, subgroup: &[usize]) -> Result<Vec<Vec<C64>>> {
    if !group.is_subgroup(subgroup) {
        return Err(Error::PreconditionFailed(format!("{subgroup:?} is not a subgroup of {}", group.name)));
    }
    if !group.commute_within(subgroup) {
        return Err(Error::NotAbelian);
    }
    let n = subgroup.len();
    let pos = |x: usize| subgroup.iter().position(|&y| y == x).expect("closed subgroup");
    // a generic Hermitian combination of the regular representation has the
    // characters as eigenvectors, with distinct eigenvalues
    let mut y = CMatrix::zeros(n, n);
    for (a, &h) in subgroup.iter().enumerate() {
        let weight = C64::from_polar(1.0 + 0.37 * a as f64, 0.91 * (a as f64 + 1.0).sqrt());
        for (b, &x) in subgroup.iter().enumerate() {
            y[(pos(group.mul(h, x)), b)] += weight;
        }
    }
    let y = &y + y.adjoint();
    let (_, vecs) = herm_eig_unchecked(&y);
    let e = pos(0);
    let mut chars: Vec<Vec<C64>> = (0..n)
        .map(|k| {
            let v = vecs.column(k);
            let scale = v[e];
            (0..n).map(|i| (v[i] / scale).conj()).collect()
        })
        .collect();
    for chi in &chars {
        for (a, &h) in subgroup.iter().enumerate() {
            for (b, &x) in subgroup.iter().enumerate() {
                if (chi[pos(group.mul(h, x))] - chi[a] * chi[b]).norm() > 1e-8 {
                    return Err(Error::PreconditionFailed("character extraction failed; eigenvalues collide".into()));
                }
            }
        }
    }
    let phase = |z: &C64| {
        let a = z.arg().rem_euclid(std::f64::consts::TAU);
        if (a - std::f64::consts::TAU).abs() < 1e-9 {
            0.0
        } else {
            (a * 1e8).round()
        }
    };
    chars.sort_by(|p, q| {
        let kp: Vec<f64> = p.iter().map(phase).collect();
        let kq: Vec<f64> = q.iter().map(phase).collect();
        kp.partial_cmp(&kq).expect("finite phases")
    });
    Ok(chars)
}

/// JSON form `{"subgroup": [...], "k": [[[re, im], ...], ...]}` with rows and
/// columns in the order of [`subgroup_characters`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BicharacterSpec {
    pub subgroup: Vec<usize>,
    pub k: Vec<Vec<(f64, f64)>>,
}

impl BicharacterSpec {
    pub fn table(&self) -> Vec<Vec<C64>> {
        self.k.iter().map(|row| row.iter().map(|&(a, b)| c(a, b)).collect()).collect()
    }
}

/// `Ω = Σ k(χ, χ') p_χ ⊗ p_χ'` with `p_χ = |H|⁻¹ Σ_h conj χ(h) λ_h`, the
/// image of `k ∈ C(Ĥ × Ĥ)` in `C[Γ] ⊗ C[Γ]`.
pub fn bicharacter_cocycle(
    g: &FiniteQuantumGroup,
    group: &FiniteGroup,
    subgroup: &[usize],
    k: &[Vec<C64>],
    tol: &Tolerance,
) -> Result<TwoCocycle> {
    let named = g
        .named
        .as_ref()
        .filter(|nb| nb.labels.len() == group.order() && nb.labels.iter().all(|l| l.starts_with("λ_")))
        .ok_or_else(|| Error::PreconditionFailed(format!("{} is not the group algebra of {}", g.name, group.name)))?;
    let chars = subgroup_characters(group, subgroup)?;
    let n = chars.len();
    if k.len() != n || k.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!("k must be a {n}×{n} table over the dual of H")));
    }
    // multiplication table of Ĥ
    let find = |v: &[C64]| {
        chars
            .iter()
            .position(|chi| chi.iter().zip(v).all(|(a, b)| (a - b).norm() < 1e-8))
            .expect("characters form a group")
    };
    let prod: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| find(&chars[a].iter().zip(&chars[b]).map(|(x, y)| x * y).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let mut bad: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            bad = bad.max((k[a][b].norm() - 1.0).abs());
            for cc in 0..n {
                bad = bad.max((k[prod[a][b]][cc] - k[a][cc] * k[b][cc]).norm());
                bad = bad.max((k[a][prod[b][cc]] - k[a][b] * k[a][cc]).norm());
            }
        }
    }
    if bad > tol.structural {
        return Err(Error::NotBicharacter { residual: bad });
    }
    let d = g.dim();
    let projections: Vec<CVector> = chars
        .iter()
        .map(|chi| {
            let mut p = CVector::zeros(d);
            for (a, &h) in subgroup.iter().enumerate() {
                p += named.coords.column(h) * (chi[a].conj() / n as f64);
            }
            p
        })
        .collect();
    let mut omega = CVector::zeros(d * d);
    for a in 0..n {
        for b in 0..n {
            omega += projections[a].kronecker(&projections[b]) * k[a][b];
        }
    }
    TwoCocycle::new(g, omega, tol)
}

/// `k(χ, χ') = ζ^{a₁ b₂}` with `ζ = e^{2πi/p}` on `Ĥ ≅ Z_p × Z_p`, where
/// `χ = χ₁^{a₁} χ₂^{a₂}` for the first non-trivial character `χ₁` of
/// [`subgroup_characters`] and the first character `χ₂` outside `⟨χ₁⟩`.
pub fn rank_two_bicharacter(group: &FiniteGroup, subgroup: &[usize], p: usize) -> Result<Vec<Vec<C64>>> {
    let chars = subgroup_characters(group, subgroup)?;
    let not_rank_two = || Error::PreconditionFailed(format!("dual of the subgroup is not Z{p} × Z{p}"));
    if p < 2 || chars.len() != p * p {
        return Err(not_rank_two());
    }
    let power = |chi: &[C64], k: usize| chi.iter().map(|z| z.powu(k as u32)).collect::<Vec<_>>();
    let same = |x: &[C64], y: &[C64]| x.iter().zip(y).all(|(u, v)| (u - v).norm() < 1e-8);
    let c1 = &chars[1];
    let c2 = chars
        .iter()
        .find(|chi| (0..p).all(|k| !same(chi, &power(c1, k))))
        .ok_or_else(not_rank_two)?;
    let coords: Vec<(usize, usize)> = chars
        .iter()
        .map(|chi| {
            (0..p * p)
                .map(|x| (x / p, x % p))
                .find(|&(a1, a2)| {
                    let prod: Vec<C64> = power(c1, a1).iter().zip(power(c2, a2)).map(|(u, v)| u * v).collect();
                    same(chi, &prod)
                })
                .ok_or_else(not_rank_two)
        })
        .collect::<Result<_>>()?;
    let zeta = C64::from_polar(1.0, std::f64::consts::TAU / p as f64);
    Ok(coords
        .iter()
        .map(|&(a1, _)| coords.iter().map(|&(_, b2)| zeta.powu(((a1 * b2) % p) as u32)).collect())
        .collect())
}

/// `G_Ω`: the same algebra with `Δ_Ω = ΩΔ(·)Ω*`, antipode
/// `S_Ω = U S(·) U⁻¹` for `U = m(id⊗S)(Ω)`, and the Haar state re-solved
/// from the invariance equations. Every Hopf axiom is re-verified.
pub fn twist(g: &FiniteQuantumGroup, cocycle: &TwoCocycle, tol: &Tolerance) -> Result<FiniteQuantumGroup> {
    let omega = &cocycle.omega;
    let pre = unitarity_residual(g, omega).max(cocycle_residual(g, omega));
    if pre > tol.structural {
        return Err(Error::PreconditionFailed(format!("Ω is not a unitary 2-cocycle (residual {pre:e})")));
    }
    if !cocycle.normalized {
        return Err(Error::PreconditionFailed("Ω is not normalized".into()));
    }
    let d = g.dim();
    let l = &g.layout;
    let om = l.tensor_to_matrix(omega);
    let om_star = om.adjoint();
    let mut coproduct = CMatrix::zeros(d * d, d);
    for k in 0..d {
        let dk = l.tensor_to_matrix(&g.coproduct.column(k).into_owned());
        coproduct.set_column(k, &l.tensor_from_matrix(&(&om * dk * &om_star)));
    }
    let u = &g.mult * CMatrix::identity(d, d).kronecker(&g.antipode) * omega;
    let u_mat = l.to_matrix(&u);
    let u_inv = u_mat
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::AxiomFailure {
            axiom: "m(id⊗S)(Ω) is not invertible".into(),
            residual: f64::NAN,
        })?;
    let antipode = l.sandwich(&u_mat, &u_inv) * &g.antipode;
    let haar = crate::hopf::solve_haar(&g.unit, &coproduct)?;
    let out = FiniteQuantumGroup {
        name: format!("{}~Ω", g.name),
        layout: g.layout.clone(),
        mult: g.mult.clone(),
        star: g.star.clone(),
        unit: g.unit.clone(),
        coproduct,
        counit: g.counit.clone(),
        antipode,
        haar,
        named: g.named.clone(),
    };
    let report = check_axioms(&out, tol)?;
    if let Some(bad) = report.failures().next() {
        return Err(Error::AxiomFailure {
            axiom: bad.check.clone(),
            residual: bad.residual,
        });
    }
    debug_assert!(axiom_residual(&report) <= tol.structural);
    Ok(out)
}

/// `(Δ_Ω⊗id)Δ_Ω` against `(id⊗Δ_Ω)Δ_Ω`, from the coproduct alone.
pub fn coassociativity_residual(g: &FiniteQuantumGroup) -> f64 {
    let d = g.dim();
    let id = CMatrix::identity(d, d);
    dist(&(g.coproduct.kronecker(&id) * &g.coproduct), &(id.kronecker(&g.coproduct) * &g.coproduct))
}

/// Checks `(T_t⊗id)(Ω) = Ω` on the grid, then that `T_t` intertwines
/// `Δ_Ω`, and that `μ̃_t = ε∘T_t` is a convolution semigroup of states of the
/// twisted group implementing `T_t`.
pub fn twisted_semigroup_transport(
    g: &FiniteQuantumGroup,
    cocycle: &TwoCocycle,
    sg: &ConvolutionSemigroup,
    t_grid: &[f64],
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let d = g.dim();
    let id = CMatrix::identity(d, d);
    let omega = &cocycle.omega;
    let scale = 1.0 + max_abs(&sg.generator_r);
    let mut report = VerificationReport::new();
    let ops: Vec<(f64, CMatrix)> = t_grid.iter().map(|&t| (t, semigroup_operator(sg, t, tol))).collect();
    let mut hyp: f64 = 0.0;
    for (t, tt) in &ops {
        let res = dist_vec(&(tt.kronecker(&id) * omega), omega);
        if res > tol.structural * scale {
            return Err(Error::HypothesisFailed { t: *t, residual: res });
        }
        hyp = hyp.max(res);
    }
    let e = |check: &str, anchor: &str, res: f64, bound: f64| Entry::new(MODULE, check, anchor, res, bound).param("group", &g.name);
    report.push(e("transport.hypothesis", "(T_t⊗id)(Ω) = Ω", hyp, tol.structural * scale));

    let gt = twist(g, cocycle, tol)?;
    let mut intertwine: f64 = 0.0;
    let mut states: f64 = 0.0;
    let mut implements: f64 = 0.0;
    let mut cp = f64::INFINITY;
    let mut unital: f64 = 0.0;
    let mut law: f64 = 0.0;
    let mut tilde = Vec::new();
    for (t, tt) in &ops {
        intertwine = intertwine.max(dist(&(&gt.coproduct * tt), &(tt.kronecker(&id) * &gt.coproduct)));
        let mu = Functional::new(tt.transpose() * &gt.counit);
        let gram_min = crate::matcore::min_eig(&mu.gram(&gt));
        states = states.max((-gram_min).max(0.0)).max((mu.eval(&gt.unit) - 1.0).norm());
        implements = implements.max(dist(&crate::conv::right_conv_op(&gt, &mu), tt));
        cp = cp.min(choi_margin(&gt, tt));
        unital = unital.max(dist_vec(&(tt * &gt.unit), &gt.unit));
        tilde.push((*t, mu));
    }
    for (t, mt) in &tilde {
        for (s, ms) in &tilde {
            let target = Functional::new(semigroup_operator(sg, t + s, tol).transpose() * &gt.counit);
            law = law.max(dist_vec(&convolve(&gt, mt, ms).coords, &target.coords));
        }
    }
    let cyc = 1e-9;
    report.push(e("transport.intertwining", "Δ_Ω∘T_t = (T_t⊗id)∘Δ_Ω", intertwine, cyc));
    report.push(e("transport.states", "ε∘T_t is a state", states, tol.spectral_slack));
    report.push(e("transport.implements", "T_t = (μ̃_t⊗id)Δ_Ω", implements, cyc));
    report.push(e("transport.semigroup_law", "μ̃_t ⋆_Ω μ̃_s = μ̃_{t+s}", law, cyc));
    report.push(e("transport.complete_positivity", "T_t completely positive", (-cp).max(0.0), tol.spectral_slack));
    report.push(e("transport.unital", "T_t(1) = 1", unital, cyc));
    let axioms = axiom_residual(&check_axioms(&gt, tol)?);
    report.push(e("transport.twisted_axioms", "G_Ω satisfies the Hopf axioms", axioms, tol.structural));

    // agreement with the untwisted semigroup on the shared algebra
    let mut untwisted: f64 = 0.0;
    for (t, mu) in &tilde {
        untwisted = untwisted.max(dist_vec(&mu.coords, &evolve(g, sg, *t, tol)?.coords));
    }
    report.push(e("transport.same_states", "μ̃_t = μ_t", untwisted, cyc));

    let haar_gap = dist_vec(&gt.haar, &g.haar);
    let haar_equal = haar_gap <= tol.structural;
    report.push(
        Entry::flag(MODULE, "transport.haar_preserved", "h_Ω = h", true)
            .param("residual", format!("{haar_gap:e}"))
            .param("equal", haar_equal),
    );
    if haar_equal {
        let w = haar_weighted(&gt, tol)?;
        let mut kms: f64 = 0.0;
        let mut kms_before: f64 = 0.0;
        let w0 = haar_weighted(g, tol)?;
        for (_, tt) in &ops {
            kms = kms.max(gl::kms_residual(&w, tt));
            kms_before = kms_before.max(gl::kms_residual(&w0, tt));
        }
        // symmetric before the twist ⇒ symmetric after
        report.push(
            e("transport.kms_preserved", "KMS symmetry survives the twist", if kms_before <= cyc { kms } else { 0.0 }, cyc)
                .param("kms_before", format!("{kms_before:e}")),
        );
    }
    Ok(report)
}

/// `exp(iH)` for a random Hermitian `H ∈ A` of the given scale.
pub fn random_unitary(g: &FiniteQuantumGroup, scale: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let p: Vec<f64> = (0..g.dim()).map(|_| scale * sample::normal(rng)).collect();
    let h = hermitian_from_params(&g.layout, &p);
    herm_fn(&h, |x| (I * x).exp())
}
