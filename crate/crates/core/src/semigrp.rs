//! Generating functionals, convolution semigroups `μ_t = exp_⋆(tγ)`, the
//! induced Markov semigroups on the algebra and on `L²`, and their Dirichlet
//! forms.

use serde::{Deserialize, Serialize};

use crate::conv::{
    check_symmetry, choi_margin, convolve, haar_weighted, right_conv_op, Functional, FunctionalSpec,
};
use crate::gl::{self, QuadraticForm, Sampling, WeightedAlgebra};
use crate::hopf::{FiniteGroup, FiniteQuantumGroup, Gns, MultiplicativeUnitary};
use crate::matcore::{
    dist, dist_vec, expm, hermitian_part, hermitian_residual, logm_pd, max_abs, max_abs_vec, min_eig, r, CMatrix,
    CVector, Tolerance, ONE,
};
use crate::report::{Entry, VerificationReport};
use crate::{Error, Result};

pub const DEFAULT_T_GRID: [f64; 6] = [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0];

const MODULE: &str = "semigrp";

/// How to build a generating functional.
#[derive(Clone, Debug)]
pub enum GeneratorSpec {
    /// `γ = λ(ω − ε)`.
    FromState { omega: Functional, rate: f64 },
    /// `γ(λ_g) = −θ(g)` on a group algebra.
    FromCnd { theta: Vec<f64> },
    Raw(Functional),
}

/// JSON form: `{"kind": "from_state", "omega": [[re, im], ...], "rate": 1.0}`,
/// `{"kind": "from_cnd", "theta": [...]}` or `{"kind": "raw", "coords": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpecJson {
    FromState { omega: Vec<(f64, f64)>, rate: f64 },
    FromCnd { theta: Vec<f64> },
    Raw { coords: Vec<(f64, f64)> },
}

impl GeneratorSpecJson {
    pub fn build(&self, g: &FiniteQuantumGroup) -> Result<GeneratorSpec> {
        Ok(match self {
            Self::FromState { omega, rate } => GeneratorSpec::FromState {
                omega: FunctionalSpec { coords: omega.clone() }.build(g)?,
                rate: *rate,
            },
            Self::FromCnd { theta } => GeneratorSpec::FromCnd { theta: theta.clone() },
            Self::Raw { coords } => GeneratorSpec::Raw(FunctionalSpec { coords: coords.clone() }.build(g)?),
        })
    }
}

#[derive(Clone, Debug)]
pub struct GeneratingFunctional {
    pub gamma: Functional,
    /// Whether the input was already invariant under the antipode.
    pub was_symmetric: bool,
}

/// Block carrying the counit, which is a character and hence lives on a
/// one-dimensional block.
fn counit_block(g: &FiniteQuantumGroup) -> Result<usize> {
    for (k, &size) in g.layout.blocks().iter().enumerate() {
        if size == 1 && (g.counit[g.layout.index(k, 0, 0)] - ONE).norm() < 1e-9 {
            return Ok(k);
        }
    }
    Err(Error::PreconditionFailed("counit is not supported on a one-dimensional block".into()))
}

/// Smallest eigenvalue of the density of `γ` off the counit block, with the
/// minimizing rank-one element.
///
/// `ker ε ∩ A₊` consists of the positive elements vanishing on the counit
/// block, so `γ` is conditionally positive exactly when its density is
/// positive semidefinite on every other block.
pub fn conditional_positivity_margin(g: &FiniteQuantumGroup, gamma: &Functional) -> Result<(f64, CMatrix)> {
    let k0 = counit_block(g)?;
    let density = gamma.density(g);
    let n = g.layout.matrix_dim();
    let mut worst = f64::INFINITY;
    let mut witness = CMatrix::zeros(n, n);
    for k in 0..g.layout.blocks().len() {
        if k == k0 {
            continue;
        }
        let block = hermitian_part(&g.layout.block(&density, k));
        let (vals, vecs) = crate::matcore::herm_eig_unchecked(&block);
        let lo = *vals.last().expect("non-empty block");
        if lo < worst {
            worst = lo;
            let v = vecs.column(vals.len() - 1).into_owned();
            let off = g.layout.block_offset(k);
            witness = CMatrix::zeros(n, n);
            witness.view_mut((off, off), (v.len(), v.len())).copy_from(&(&v * v.adjoint()));
        }
    }
    Ok((worst, witness))
}

pub fn make_generating_functional(
    g: &FiniteQuantumGroup,
    spec: &GeneratorSpec,
    symmetrize: bool,
    tol: &Tolerance,
) -> Result<GeneratingFunctional> {
    let gamma = match spec {
        GeneratorSpec::FromState { omega, rate } => {
            if !omega.is_state(g, tol) {
                return Err(Error::PreconditionFailed("ω is not a state".into()));
            }
            if *rate < 0.0 {
                return Err(Error::PreconditionFailed(format!("rate {rate} is negative")));
            }
            omega.sub(&Functional::counit(g)).scale(r(*rate))
        }
        GeneratorSpec::FromCnd { theta } => {
            let is_group_algebra = g
                .named
                .as_ref()
                .is_some_and(|n| n.labels.iter().all(|l| l.starts_with("λ_")));
            if !is_group_algebra {
                return Err(Error::PreconditionFailed(format!("{} is not a group algebra", g.name)));
            }
            if theta.first().is_none_or(|t| t.abs() > tol.structural) {
                return Err(Error::PreconditionFailed("θ(e) must be 0".into()));
            }
            let values: Vec<_> = theta.iter().map(|t| r(-t)).collect();
            Functional::from_named(g, &values)?
        }
        GeneratorSpec::Raw(f) => f.clone(),
    };
    let mirrored = gamma.compose_antipode(g);
    let was_symmetric = dist_vec(&mirrored.coords, &gamma.coords) <= tol.structural * (1.0 + max_abs_vec(&gamma.coords));
    let gamma = if symmetrize {
        gamma.add(&mirrored).scale(r(0.5))
    } else {
        gamma
    };
    validate_generator(g, &gamma, tol)?;
    Ok(GeneratingFunctional { gamma, was_symmetric })
}

/// Hermitian, `γ(1) = 0`, conditionally positive.
pub fn validate_generator(g: &FiniteQuantumGroup, gamma: &Functional, tol: &Tolerance) -> Result<()> {
    let scale = 1.0 + max_abs_vec(&gamma.coords);
    if !gamma.is_hermitian(g, tol) {
        return Err(Error::NotConditionallyPositive {
            witness: "γ is not hermitian".into(),
        });
    }
    let at_one = gamma.eval(&g.unit).norm();
    if at_one > tol.structural * scale {
        return Err(Error::NotConditionallyPositive {
            witness: format!("γ(1) = {at_one:e}"),
        });
    }
    let (margin, witness) = conditional_positivity_margin(g, gamma)?;
    if margin < -tol.spectral_slack * scale {
        return Err(Error::NotConditionallyPositive {
            witness: format!("γ(x) = {margin:e} for x = {}", gl::witness_string(&witness)),
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ConvolutionSemigroup {
    pub gamma: GeneratingFunctional,
    /// `L_γ = (id⊗γ)Δ`.
    pub generator_l: CMatrix,
    /// `R_γ = (γ⊗id)Δ`.
    pub generator_r: CMatrix,
}

impl ConvolutionSemigroup {
    pub fn new(g: &FiniteQuantumGroup, gamma: GeneratingFunctional) -> Self {
        let generator_l = crate::conv::left_conv_op(g, &gamma.gamma);
        let generator_r = right_conv_op(g, &gamma.gamma);
        Self {
            gamma,
            generator_l,
            generator_r,
        }
    }
}

/// `μ_t = ε∘exp(t L_γ)`.
pub fn evolve(g: &FiniteQuantumGroup, sg: &ConvolutionSemigroup, t: f64, tol: &Tolerance) -> Result<Functional> {
    if t < 0.0 {
        return Err(Error::PreconditionFailed(format!("t = {t} is negative")));
    }
    Ok(Functional::new(expm(&sg.generator_l, t, tol).transpose() * &g.counit))
}

/// `μ_t` by the convolution exponential series, evaluated at `t/2^k` with
/// `t‖γ‖/2^k ≤ 1/2` and squared back by repeated convolution.
pub fn evolve_series(g: &FiniteQuantumGroup, gamma: &Functional, t: f64, tol: &Tolerance) -> Result<Functional> {
    if t < 0.0 {
        return Err(Error::PreconditionFailed(format!("t = {t} is negative")));
    }
    let size = gamma.norm(g).max(max_abs_vec(&gamma.coords));
    let mut k = 0;
    while t * size / f64::from(1u32 << k.min(30)) > 0.5 && k < 60 {
        k += 1;
    }
    let s = t / 2f64.powi(k);
    let eps = Functional::counit(g);
    let mut sum = eps.clone();
    let mut term = eps;
    let max_terms = 200;
    let mut converged = false;
    for n in 1..=max_terms {
        term = convolve(g, &term, gamma).scale(r(s / n as f64));
        sum = sum.add(&term);
        if max_abs_vec(&term.coords) <= tol.structural * 1e-6 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesDivergence { terms: max_terms });
    }
    for _ in 0..k {
        sum = convolve(g, &sum, &sum);
    }
    Ok(sum)
}

/// `T_t = exp(t R_γ) = R_{μ_t}`.
pub fn semigroup_operator(sg: &ConvolutionSemigroup, t: f64, tol: &Tolerance) -> CMatrix {
    expm(&sg.generator_r, t, tol)
}

/// Generator `A` of the `L²` semigroup and its form `Q(ζ) = ⟨Aζ, ζ⟩`.
#[derive(Clone, Debug)]
pub struct DirichletForm {
    pub a: CMatrix,
    pub form: QuadraticForm,
}

/// `A = −R̃_γ`, the negative KMS implementation of `R_γ`.
pub fn dirichlet_form_of(g: &FiniteQuantumGroup, sg: &ConvolutionSemigroup, tol: &Tolerance) -> Result<DirichletForm> {
    let sym = check_symmetry(g, &sg.gamma.gamma, tol)?;
    if !sym.r_invariant {
        return Err(Error::NotSymmetric { residual: sym.r_residual });
    }
    let w = haar_weighted(g, tol)?;
    let a = -gl::hilbert_implementation(&w, &sg.generator_r);
    let form = QuadraticForm::new(a.clone(), tol)?;
    Ok(DirichletForm { a, form })
}

/// `−γ((ω_ζ⊗id)(Ŵ))`, the form evaluated through the multiplicative unitary.
pub fn form_via_unitary(
    gamma: &Functional,
    gns: &Gns,
    w: &MultiplicativeUnitary,
    zeta: &CVector,
) -> Result<(f64, f64)> {
    let d = gns.dim();
    let weights = CMatrix::from_fn(d, d, |i, j| zeta[i].conj() * zeta[j]);
    let slice = crate::matcore::apply_functional_leg(&w.hat(), (d, d), crate::matcore::Leg::First, &weights)?;
    let (x, residual) = gns.extract_left(&slice);
    Ok((-gamma.eval(&x).re, residual))
}

/// Converts an `L²` generator back to the generating functional:
/// `R_γ = −(implementation)^{-1}(A)` and `γ = ε∘R_γ`.
pub fn generator_from_l2(g: &FiniteQuantumGroup, w: &WeightedAlgebra, a: &CMatrix) -> Functional {
    let r_gamma = -gl::algebra_operator(w, a);
    Functional::new(r_gamma.transpose() * &g.counit)
}

/// Starting point of a correspondence cycle.
#[derive(Clone, Debug)]
pub enum CorrespondenceInput {
    Semigroup(GeneratingFunctional),
    /// Samples `(t, S_t)` of a symmetric Markov semigroup on `L²`.
    L2Samples(Vec<(f64, CMatrix)>),
    Form(QuadraticForm),
}

/// Options for [`correspondence_roundtrip`].
#[derive(Clone, Debug)]
pub struct CycleOptions {
    pub t_grid: Vec<f64>,
    pub markov_levels: Vec<usize>,
    pub sampling: Sampling,
    /// Number of random unitaries from the commutant of the dual algebra.
    pub commutant_unitaries: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self {
            t_grid: DEFAULT_T_GRID.to_vec(),
            markov_levels: vec![1, 2],
            sampling: Sampling::new(40, 0),
            commutant_unitaries: 4,
        }
    }
}

struct Context {
    w: WeightedAlgebra,
    mu: MultiplicativeUnitary,
    commutant: Vec<CMatrix>,
}

fn context(g: &FiniteQuantumGroup, tol: &Tolerance) -> Result<Context> {
    let gns = Gns::new(g, tol)?;
    let mu = MultiplicativeUnitary::new(g, &gns, tol)?;
    let commutant = mu.dual_commutant();
    Ok(Context {
        w: haar_weighted(g, tol)?,
        mu,
        commutant,
    })
}

/// Generator of `L²` samples: `A = −log(S_t)/t` at the first positive grid
/// time, with the remaining samples checked against `e^{−tA}`.
fn generator_from_samples(samples: &[(f64, CMatrix)], tol: &Tolerance) -> Result<(CMatrix, f64)> {
    let (t0, s0) = samples
        .iter()
        .find(|(t, _)| *t > 0.0)
        .ok_or_else(|| Error::PreconditionFailed("L² samples need a positive time".into()))?;
    let a = -logm_pd(&hermitian_part(s0), tol)?.unscale(*t0);
    let mut residual: f64 = 0.0;
    for (t, s) in samples {
        residual = residual.max(dist(&expm(&a, -t, tol), s));
    }
    Ok((hermitian_part(&a), residual))
}

/// Runs `(1) γ → (2) T_t → (3) S_t → (4) Q → (1)` from any starting node and
/// reports every predicate along the way together with the residual of the
/// recovered object against the input.
pub fn correspondence_roundtrip(
    g: &FiniteQuantumGroup,
    input: &CorrespondenceInput,
    opts: &CycleOptions,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let ctx = context(g, tol)?;
    let mut report = VerificationReport::new();
    let cyc = 1e-8;
    let entry = |check: &str, anchor: &str, res: f64, bound: f64| {
        Entry::new(MODULE, check, anchor, res, bound).param("group", &g.name)
    };

    // reach node (1)
    let (gamma, start) = match input {
        CorrespondenceInput::Semigroup(gf) => (gf.gamma.clone(), "semigroup"),
        CorrespondenceInput::L2Samples(samples) => {
            for (t, s) in samples {
                let member = ctx.mu.commutant_residual(s, &ctx.commutant);
                if member > 1e-8 {
                    return Err(Error::ClassificationFailure {
                        step: "(3)".into(),
                        predicate: format!("S_{t} belongs to the dual algebra"),
                        residual: member,
                    });
                }
                let herm = hermitian_residual(s);
                if herm > 1e-8 {
                    return Err(Error::ClassificationFailure {
                        step: "(3)".into(),
                        predicate: format!("S_{t} is self-adjoint"),
                        residual: herm,
                    });
                }
            }
            let (a, fit) = generator_from_samples(samples, tol)?;
            if fit > 1e-8 {
                return Err(Error::ClassificationFailure {
                    step: "(3)".into(),
                    predicate: "samples form a semigroup e^{-tA}".into(),
                    residual: fit,
                });
            }
            (generator_from_l2(g, &ctx.w, &a), "l2")
        }
        CorrespondenceInput::Form(q) => {
            let member = ctx.mu.commutant_residual(q.matrix(), &ctx.commutant);
            if member > 1e-8 {
                return Err(Error::ClassificationFailure {
                    step: "(4)".into(),
                    predicate: "form is invariant under the commutant of the dual algebra".into(),
                    residual: member,
                });
            }
            (generator_from_l2(g, &ctx.w, q.matrix()), "form")
        }
    };
    let gf = GeneratingFunctional {
        was_symmetric: true,
        gamma: gamma.clone(),
    };
    if let Err(e) = validate_generator(g, &gamma, tol) {
        return Err(Error::ClassificationFailure {
            step: "(1)".into(),
            predicate: format!("generating functional: {e}"),
            residual: conditional_positivity_margin(g, &gamma).map(|m| -m.0).unwrap_or(f64::NAN),
        });
    }
    let sym = check_symmetry(g, &gamma, tol)?;
    report.push(entry("cycle.r_invariance", "γ = γ∘R", sym.r_residual, tol.structural).param("start", start));
    let sg = ConvolutionSemigroup::new(g, gf);

    // (1) → (2)
    let mut states: f64 = 0.0;
    let mut law: f64 = 0.0;
    let mut r_match: f64 = 0.0;
    let mut cp: f64 = f64::INFINITY;
    let mut unital: f64 = 0.0;
    for &t in &opts.t_grid {
        let mu_t = evolve(g, &sg, t, tol)?;
        let gram_min = min_eig(&mu_t.gram(g));
        states = states.max((-gram_min).max(0.0)).max((mu_t.eval(&g.unit) - 1.0).norm());
        let tt = semigroup_operator(&sg, t, tol);
        r_match = r_match.max(dist(&tt, &right_conv_op(g, &mu_t)));
        cp = cp.min(choi_margin(g, &tt));
        unital = unital.max(dist_vec(&(&tt * &g.unit), &g.unit));
        for &s in &opts.t_grid {
            let lhs = convolve(g, &mu_t, &evolve(g, &sg, s, tol)?);
            law = law.max(dist_vec(&lhs.coords, &evolve(g, &sg, t + s, tol)?.coords));
        }
    }
    report.push(entry("cycle.states", "μ_t is a state", states, tol.spectral_slack));
    report.push(entry("cycle.semigroup_law", "μ_t ⋆ μ_s = μ_{t+s}", law, 1e-10));
    report.push(entry("cycle.operator_semigroup", "exp(tR_γ) = R_{μ_t}", r_match, cyc));
    report.push(entry("cycle.complete_positivity", "T_t completely positive", (-cp).max(0.0), tol.spectral_slack));
    report.push(entry("cycle.unital", "T_t(1) = 1", unital, cyc));

    // (2) → (3)
    let mut member: f64 = 0.0;
    let mut self_adj: f64 = 0.0;
    let mut markov_margin = f64::INFINITY;
    let mut l2_samples = Vec::new();
    let mut rng = crate::par::trial_rng(opts.sampling.seed, 7);
    let unitaries: Vec<CMatrix> = (0..opts.commutant_unitaries)
        .map(|_| crate::hopf::random_unitary_in(&ctx.commutant, &mut rng, tol))
        .collect();
    let mut unitary_comm: f64 = 0.0;
    for &t in &opts.t_grid {
        let st = gl::hilbert_implementation(&ctx.w, &semigroup_operator(&sg, t, tol));
        member = member.max(ctx.mu.commutant_residual(&st, &ctx.commutant));
        self_adj = self_adj.max(hermitian_residual(&st));
        for u in &unitaries {
            unitary_comm = unitary_comm.max(max_abs(&(&st * u - u * &st)));
        }
        for &n in &opts.markov_levels {
            let v = gl::is_n_markov_l2(&ctx.w, &st, n, &opts.sampling, tol)?;
            markov_margin = markov_margin.min(v.worst_margin);
        }
        l2_samples.push((t, st));
    }
    report.push(entry("cycle.dual_membership", "S_t commutes with the commutant of the dual algebra", member, 1e-10));
    report.push(entry("cycle.commutant_unitaries", "[S_t, u] = 0 for sampled commutant unitaries", unitary_comm, 1e-10));
    report.push(entry("cycle.self_adjoint", "S_t = S_t*", self_adj, cyc));
    report.push(
        entry("cycle.markov", "S_t preserves amplified order intervals", (-markov_margin).max(0.0), tol.spectral_slack)
            .param("levels", format!("{:?}", opts.markov_levels))
            .param("samples", opts.sampling.samples)
            .param("seed", opts.sampling.seed),
    );

    // (3) → (4)
    let (a, fit) = generator_from_samples(&l2_samples, tol)?;
    let direct = -gl::hilbert_implementation(&ctx.w, &sg.generator_r);
    report.push(entry("cycle.generator_fit", "S_t = e^{-tA}", fit.max(dist(&a, &direct)), cyc));
    let q = QuadraticForm::new(a.clone(), tol)?;
    let mut dir_margin = f64::INFINITY;
    for &n in &opts.markov_levels {
        let v = gl::dirichlet_check(&ctx.w, &q, n, &opts.sampling, tol)?;
        dir_margin = dir_margin.min(v.worst_margin);
    }
    report.push(
        entry("cycle.dirichlet", "Q∘π ≤ Q on amplified intervals", (-dir_margin).max(0.0), tol.spectral_slack)
            .param("levels", format!("{:?}", opts.markov_levels)),
    );

    // (4) → (1)
    let recovered = generator_from_l2(g, &ctx.w, &a);
    let back = dist_vec(&recovered.coords, &gamma.coords);
    let input_residual = match input {
        CorrespondenceInput::Semigroup(_) => back,
        CorrespondenceInput::L2Samples(samples) => samples
            .iter()
            .map(|(t, s)| dist(&gl::hilbert_implementation(&ctx.w, &semigroup_operator(&sg, *t, tol)), s))
            .fold(back, f64::max),
        CorrespondenceInput::Form(q0) => dist(&a, q0.matrix()).max(back),
    };
    report.push(entry("cycle.roundtrip", "recovered object equals the input", input_residual, cyc).param("start", start));
    Ok(report)
}

/// Verdict of [`schonberg_check`].
#[derive(Clone, Debug, Serialize)]
pub struct Schoenberg {
    pub pass: bool,
    /// Smallest eigenvalue of `[e^{−tθ(g_i⁻¹g_j)}]` over the grid.
    pub psd_margin: f64,
    /// Largest eigenvalue of `[θ(g_i⁻¹g_j)]` on mean-zero vectors.
    pub cnd_margin: f64,
    /// Whether the two routes agree.
    pub consistent: bool,
}

/// Positive definiteness of `e^{−tθ}` on the grid, compared with
/// conditional negative definiteness of `θ`.
pub fn schonberg_check(group: &FiniteGroup, theta: &[f64], t_grid: &[f64], tol: &Tolerance) -> Result<Schoenberg> {
    let n = group.order();
    if theta.len() != n {
        return Err(Error::DimensionMismatch(format!("θ has {} values for a group of order {n}", theta.len())));
    }
    if theta[0].abs() > tol.structural {
        return Err(Error::PreconditionFailed("θ(e) must be 0".into()));
    }
    for a in 0..n {
        if (theta[a] - theta[group.inv(a)]).abs() > tol.structural {
            return Err(Error::PreconditionFailed(format!("θ is not inversion-symmetric at {}", group.labels[a])));
        }
    }
    let kernel = |f: &dyn Fn(f64) -> f64| CMatrix::from_fn(n, n, |i, j| r(f(theta[group.mul(group.inv(i), j)])));
    let mut psd_margin = f64::INFINITY;
    for &t in t_grid {
        let m = kernel(&|x| (-t * x).exp());
        psd_margin = psd_margin.min(min_eig(&m));
    }
    let big = kernel(&|x| x);
    let centering = CMatrix::identity(n, n) - CMatrix::from_element(n, n, r(1.0 / n as f64));
    let cnd_margin = -min_eig(&-(&centering * big * &centering));
    let psd = psd_margin >= -tol.spectral_slack;
    let cnd = cnd_margin <= tol.spectral_slack;
    Ok(Schoenberg {
        pass: psd,
        psd_margin,
        cnd_margin,
        consistent: psd == cnd || t_grid.iter().all(|t| *t == 0.0),
    })
}

/// Permutation-character length on `S3`: `θ(g) = 3 − #fixed points`.
pub fn permutation_length(group: &FiniteGroup) -> Vec<f64> {
    // index 0 is the identity; elements act on {0, 1, 2} by their labels
    group
        .labels
        .iter()
        .map(|l| match l.len() {
            1 => 0.0,
            4 => 2.0,
            _ => 3.0,
        })
        .collect()
}
