//! One function per subcommand. Each returns a serializable body, the CSV
//! rows for `--csv`, and whether every check passed.

use rayon::prelude::*;
use serde::Serialize;
use ttokit::conjugation::Conjugation;
use ttokit::inner::ComplexJson;
use ttokit::linalg::{CMat, CVec};
use ttokit::moebius::Crofoot;
use ttokit::random;
use ttokit::singular_limits::{trace_rows, Lemma5Report, TraceRow};
use ttokit::tto::{sarason_residual, theorem_check, ModelOperator, TheoremReport, TtoSpace};
use ttokit::{
    AtomicMeasure, BlaschkeProduct, Complex64, InnerFunction, InnerSpec, ModelSpace,
    QuadratureGrid, RationalFunction, Tolerances,
};

use crate::input::TrigSymbol;

/// Minimum ratio between the smallest non-member and the largest member
/// Sarason residual.
pub const SARASON_GAP: f64 = 1e3;

pub struct Context {
    pub grid_size: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

pub struct Outcome<B, R> {
    pub body: B,
    pub rows: Vec<R>,
    pub passed: bool,
}

pub type CmdResult<B, R> = ttokit::Result<Outcome<B, R>>;

fn spec(u: &BlaschkeProduct) -> InnerSpec {
    InnerFunction::Blaschke(u.clone()).to_spec()
}

fn zeros_label(u: &BlaschkeProduct) -> String {
    u.zeros()
        .iter()
        .map(|z| format!("{}{:+}i", z.re, z.im))
        .collect::<Vec<_>>()
        .join(" ")
}

/// A matrix as rows of `[re, im]` pairs.
fn matrix_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn random_tto<'a>(t: &TtoSpace<'a>, seed: u64) -> ModelOperator<'a> {
    let mut rng = random::rng(seed);
    t.combination(&random::complex_gaussian_vector(&mut rng, t.dim()))
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct ConjugationDefects {
    pub unitarity: f64,
    pub symmetry: f64,
    pub involution: f64,
}

#[derive(Serialize)]
pub struct BasisBody {
    pub u: InnerSpec,
    pub dim: usize,
    /// `‖G - I‖_F` for the sampled Gram matrix.
    pub gram_defect: f64,
    /// `max_k ‖P_{K_u}(u χ^k)‖`, which vanishes when the basis is orthogonal to `uH²`.
    pub uh2_leakage: f64,
    pub conjugation: ConjugationDefects,
    pub ku0_dim: usize,
    /// `max_g ‖(I - P_{K_u}) χ g‖` over the basis of `K_u^0`.
    pub ku0_shift_leakage: f64,
}

#[derive(Serialize)]
pub struct BasisRow {
    pub k: usize,
    pub zero_re: f64,
    pub zero_im: f64,
    pub norm: f64,
    pub value_at_0_re: f64,
    pub value_at_0_im: f64,
}

pub fn basis(ctx: &Context, u: BlaschkeProduct) -> CmdResult<BasisBody, BasisRow> {
    let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
    let n = s.dim();
    let gram_defect = (s.gram() - CMat::identity(n, n)).norm();
    let uh2_leakage = (0..n)
        .map(|k| {
            let samples = CVec::from_iterator(
                s.grid_size(),
                s.grid().nodes().iter().zip(s.u_samples().iter()).map(|(z, v)| v * z.powu(k as u32)),
            );
            s.coordinates(&samples).map(|c| c.norm())
        })
        .collect::<ttokit::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let c = Conjugation::new(&s);
    let conjugation = ConjugationDefects {
        unitarity: c.unitarity_defect(),
        symmetry: c.symmetry_defect(),
        involution: c.involution_defect(),
    };
    let g = s.ku0_basis();
    let chi = s.grid().sample(|z| z);
    let mut ku0_shift_leakage: f64 = 0.0;
    for j in 0..g.ncols() {
        let shifted = s.vector(g.column(j).into_owned())?.samples().component_mul(&chi);
        let back = s.project(&shifted)?.samples();
        ku0_shift_leakage = ku0_shift_leakage.max(s.grid().norm(&(back - shifted)));
    }
    let at_zero = s.basis_at(Complex64::new(0.0, 0.0));
    let rows = (0..n)
        .map(|k| BasisRow {
            k,
            zero_re: u.zeros()[k].re,
            zero_im: u.zeros()[k].im,
            norm: s.grid().norm(&s.basis_samples().column(k).into_owned()),
            value_at_0_re: at_zero[k].re,
            value_at_0_im: at_zero[k].im,
        })
        .collect();
    let t = ctx.tol.identity;
    let passed = gram_defect < t
        && uh2_leakage < t
        && conjugation.unitarity < t
        && conjugation.symmetry < t
        && conjugation.involution < t
        && ku0_shift_leakage < t;
    Ok(Outcome {
        body: BasisBody {
            u: spec(&u),
            dim: n,
            gram_defect,
            uh2_leakage,
            conjugation,
            ku0_dim: g.ncols(),
            ku0_shift_leakage,
        },
        rows,
        passed,
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct TtoBody {
    pub u: InnerSpec,
    pub symbol: SymbolJson,
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub sarason_residual: f64,
    pub membership_distance: f64,
    pub c_symmetry_residual: f64,
    pub tto_space_dim: usize,
}

#[derive(Serialize)]
pub struct SymbolJson {
    pub analytic: Vec<ComplexJson>,
    pub coanalytic: Vec<ComplexJson>,
}

#[derive(Serialize)]
pub struct MatrixRow {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

pub fn tto(ctx: &Context, u: BlaschkeProduct, symbol: TrigSymbol) -> CmdResult<TtoBody, MatrixRow> {
    let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
    let samples = s.grid().sample(|z| symbol.eval(z));
    let op = ModelOperator::from_symbol(&s, &samples)?;
    let t = TtoSpace::new(&s, &ctx.tol)?;
    let sarason = sarason_residual(&op);
    let membership = t.membership_distance(&op)?;
    let symmetry = Conjugation::new(&s).symmetry_residual(op.matrix());
    let m = op.matrix();
    let rows = (0..m.nrows())
        .flat_map(|i| {
            (0..m.ncols()).map(move |j| MatrixRow {
                row: i,
                col: j,
                re: m[(i, j)].re,
                im: m[(i, j)].im,
            })
        })
        .collect();
    Ok(Outcome {
        passed: sarason < ctx.tol.sarason && membership < ctx.tol.membership && symmetry < ctx.tol.identity,
        body: TtoBody {
            u: spec(&u),
            symbol: SymbolJson {
                analytic: symbol.analytic.clone(),
                coanalytic: symbol.coanalytic.clone(),
            },
            matrix: matrix_json(m),
            sarason_residual: sarason,
            membership_distance: membership,
            c_symmetry_residual: symmetry,
            tto_space_dim: t.dim(),
        },
        rows,
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct SarasonBody {
    pub u: InnerSpec,
    pub trials: usize,
    pub max_member_residual: f64,
    pub min_nonmember_residual: f64,
    pub gap: f64,
    pub required_gap: f64,
    pub disagreements: usize,
    pub rows: Vec<SarasonRow>,
}

#[derive(Clone, Serialize)]
pub struct SarasonRow {
    pub trial: usize,
    /// `member` for a random element of `T_u`, `random` for a Gaussian matrix.
    pub kind: &'static str,
    pub membership_distance: f64,
    pub sarason_residual: f64,
    /// Ground truth: distance below the membership tolerance.
    pub is_member: bool,
    /// Verdict of the Sarason criterion.
    pub sarason_member: bool,
}

pub fn sarason(ctx: &Context, u: BlaschkeProduct, trials: usize) -> CmdResult<SarasonBody, SarasonRow> {
    let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
    let t = TtoSpace::new(&s, &ctx.tol)?;
    let n = s.dim();
    let rows: Vec<SarasonRow> = (0..trials)
        .into_par_iter()
        .map(|trial| -> ttokit::Result<[SarasonRow; 2]> {
            let mut rng = random::rng(ctx.seed.wrapping_add(trial as u64));
            let member = t.combination(&random::complex_gaussian_vector(&mut rng, t.dim()));
            let other = ModelOperator::new(&s, random::complex_gaussian_matrix(&mut rng, n, n))?;
            let row = |kind, op: &ModelOperator<'_>| -> ttokit::Result<SarasonRow> {
                let d = t.membership_distance(op)?;
                let r = sarason_residual(op);
                Ok(SarasonRow {
                    trial,
                    kind,
                    membership_distance: d,
                    sarason_residual: r,
                    is_member: d < ctx.tol.membership,
                    sarason_member: r < ctx.tol.sarason,
                })
            };
            Ok([row("member", &member)?, row("random", &other)?])
        })
        .collect::<ttokit::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let max_member = rows.iter().filter(|r| r.is_member).map(|r| r.sarason_residual).fold(0.0, f64::max);
    let min_other = rows
        .iter()
        .filter(|r| !r.is_member)
        .map(|r| r.sarason_residual)
        .fold(f64::INFINITY, f64::min);
    let gap = min_other / max_member.max(f64::MIN_POSITIVE);
    let disagreements = rows.iter().filter(|r| r.is_member != r.sarason_member).count();
    let has_both = rows.iter().any(|r| r.is_member) && rows.iter().any(|r| !r.is_member);
    Ok(Outcome {
        passed: disagreements == 0 && (!has_both || gap >= SARASON_GAP),
        body: SarasonBody {
            u: spec(&u),
            trials,
            max_member_residual: max_member,
            min_nonmember_residual: min_other,
            gap,
            required_gap: SARASON_GAP,
            disagreements,
            rows: rows.clone(),
        },
        rows,
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct TheoremBody {
    pub u: InnerSpec,
    pub a: ComplexJson,
    #[serde(flatten)]
    pub report: TheoremReport,
    pub degree: usize,
    pub expected_dim: usize,
    pub degree_check: bool,
}

#[derive(Clone, Serialize)]
pub struct TheoremRow {
    pub trial: usize,
    pub zero_index: usize,
    pub a_re: f64,
    pub a_im: f64,
    pub zeros: String,
    #[serde(rename = "dim_S")]
    pub dim_s: usize,
    #[serde(rename = "dim_T")]
    pub dim_t: usize,
    pub projector_distance: f64,
    pub sarason_max_residual: f64,
    pub passed: bool,
}

fn theorem_row(trial: usize, k: usize, u: &BlaschkeProduct, r: &TheoremReport, passed: bool) -> TheoremRow {
    TheoremRow {
        trial,
        zero_index: k,
        a_re: u.zeros()[k].re,
        a_im: u.zeros()[k].im,
        zeros: zeros_label(u),
        dim_s: r.dim_s,
        dim_t: r.dim_t,
        projector_distance: r.projector_distance,
        sarason_max_residual: r.sarason_max_residual,
        passed,
    }
}

pub fn theorem(
    ctx: &Context,
    u: BlaschkeProduct,
    a: Complex64,
    degree_check: bool,
) -> CmdResult<TheoremBody, TheoremRow> {
    let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
    let report = theorem_check(&s, a, &ctx.tol)?;
    let n = u.degree();
    let mut passed = report.dim_s == report.dim_t
        && report.projector_distance < ctx.tol.subspace
        && report.sarason_max_residual < ctx.tol.sarason;
    if degree_check {
        passed &= report.passes(n, &ctx.tol);
    }
    let k = u
        .zeros()
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - a).norm().total_cmp(&(y.1 - a).norm()))
        .map_or(0, |p| p.0);
    Ok(Outcome {
        rows: vec![theorem_row(0, k, &u, &report, passed)],
        body: TheoremBody {
            u: spec(&u),
            a: a.into(),
            report,
            degree: n,
            expected_dim: 2 * n - 1,
            degree_check,
        },
        passed,
    })
}

#[derive(Serialize)]
pub struct TheoremTrialsBody {
    pub degree: usize,
    pub trials: usize,
    pub max_modulus: f64,
    pub checks: usize,
    pub failures: usize,
    pub max_projector_distance: f64,
    pub rows: Vec<TheoremRow>,
}

/// Random products of one degree; every fifth has a repeated zero.
pub fn theorem_trials(
    ctx: &Context,
    degree: usize,
    trials: usize,
    max_modulus: f64,
) -> CmdResult<TheoremTrialsBody, TheoremRow> {
    let rows: Vec<TheoremRow> = (0..trials)
        .into_par_iter()
        .map(|trial| -> ttokit::Result<Vec<TheoremRow>> {
            let mut rng = random::rng(ctx.seed.wrapping_add(trial as u64));
            let u = if trial % 5 == 4 && degree >= 2 {
                random::blaschke_with_repeats(&mut rng, degree, max_modulus)
            } else {
                random::blaschke(&mut rng, degree, max_modulus)
            };
            let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
            (0..degree)
                .map(|k| {
                    let r = theorem_check(&s, u.zeros()[k], &ctx.tol)?;
                    let ok = r.passes(degree, &ctx.tol);
                    Ok(theorem_row(trial, k, &u, &r, ok))
                })
                .collect()
        })
        .collect::<ttokit::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let failures = rows.iter().filter(|r| !r.passed).count();
    Ok(Outcome {
        passed: failures == 0,
        body: TheoremTrialsBody {
            degree,
            trials,
            max_modulus,
            checks: rows.len(),
            failures,
            max_projector_distance: rows.iter().map(|r| r.projector_distance).fold(0.0, f64::max),
            rows: rows.clone(),
        },
        rows,
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct DivisorsBody {
    pub u: InnerSpec,
    /// Coefficients of the random TTO in the orthonormal basis of `T_u`.
    pub tto_seed: u64,
    pub checked: usize,
    pub max_residual: f64,
    pub rows: Vec<DivisorRow>,
}

#[derive(Clone, Serialize)]
pub struct DivisorRow {
    pub zeros: String,
    pub degree: usize,
    pub symmetry_residual: f64,
    pub passed: bool,
}

pub fn divisors(ctx: &Context, u: BlaschkeProduct, list: Vec<BlaschkeProduct>) -> CmdResult<DivisorsBody, DivisorRow> {
    let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
    let t = TtoSpace::new(&s, &ctx.tol)?;
    let a = random_tto(&t, ctx.seed);
    let rows: Vec<DivisorRow> = list
        .par_iter()
        .filter(|v| v.degree() > 0)
        .map(|v| -> ttokit::Result<DivisorRow> {
            let vs = ModelSpace::new(v.clone(), ctx.grid_size)?;
            let b = a.compress(&vs)?;
            let r = Conjugation::new(&vs).symmetry_residual(b.matrix());
            Ok(DivisorRow {
                zeros: zeros_label(v),
                degree: v.degree(),
                symmetry_residual: r,
                passed: r < ctx.tol.symmetry,
            })
        })
        .collect::<ttokit::Result<_>>()?;
    Ok(Outcome {
        passed: rows.iter().all(|r| r.passed),
        body: DivisorsBody {
            u: spec(&u),
            tto_seed: ctx.seed,
            checked: rows.len(),
            max_residual: rows.iter().map(|r| r.symmetry_residual).fold(0.0, f64::max),
            rows: rows.clone(),
        },
        rows,
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct CrofootBody {
    pub u: InnerSpec,
    pub a: ComplexJson,
    pub target: InnerSpec,
    pub unitarity: f64,
    pub intertwining: f64,
    pub transport: f64,
    pub dim_source: usize,
    pub dim_target: usize,
}

#[derive(Serialize)]
pub struct CrofootRow {
    pub a_re: f64,
    pub a_im: f64,
    pub zeros: String,
    pub target_zeros: String,
    pub unitarity: f64,
    pub intertwining: f64,
    pub transport: f64,
    pub dim_source: usize,
    pub dim_target: usize,
}

pub fn crofoot(ctx: &Context, u: BlaschkeProduct, a: Complex64) -> CmdResult<CrofootBody, CrofootRow> {
    let s = ModelSpace::new(u.clone(), ctx.grid_size)?;
    let om = Crofoot::new(&s, a)?;
    let r = om.report(&ctx.tol)?;
    let row = CrofootRow {
        a_re: a.re,
        a_im: a.im,
        zeros: zeros_label(&u),
        target_zeros: zeros_label(om.target().u()),
        unitarity: r.unitarity,
        intertwining: r.intertwining,
        transport: r.transport,
        dim_source: r.dim_source,
        dim_target: r.dim_target,
    };
    Ok(Outcome {
        passed: r.passes(ctx.tol.subspace),
        rows: vec![row],
        body: CrofootBody {
            u: spec(&u),
            a: a.into(),
            target: spec(om.target().u()),
            unitarity: r.unitarity,
            intertwining: r.intertwining,
            transport: r.transport,
            dim_source: r.dim_source,
            dim_target: r.dim_target,
        },
    })
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
pub struct Lemma5Body {
    pub nu: InnerSpec,
    #[serde(flatten)]
    pub report: Lemma5Report,
}

pub fn lemma5(
    ctx: &Context,
    nu: AtomicMeasure,
    eta: f64,
    max_n: usize,
    g: RationalFunction,
) -> CmdResult<Lemma5Body, TraceRow> {
    let grid = QuadratureGrid::new(ctx.grid_size)?;
    let (report, seq) = Lemma5Report::run(&nu, eta, max_n, &g, &grid)?;
    let rows = trace_rows(&seq, &report);
    let spec = InnerFunction::Singular(ttokit::SingularInner::new(nu)).to_spec();
    Ok(Outcome {
        passed: report.passed(),
        body: Lemma5Body { nu: spec, report },
        rows,
    })
}
