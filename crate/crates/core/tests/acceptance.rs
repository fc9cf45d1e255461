//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p ttokit-core --test acceptance`.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use ttokit::conjugation::{lemma1_residual, Conjugation};
use ttokit::moebius::Crofoot;
use ttokit::random::{self, TestRng};
use ttokit::singular_limits::{Lemma5Report, RationalFunction};
use ttokit::tto::{sarason_residual, theorem_check, ModelOperator, TheoremReport, TtoSpace};
use ttokit::{Atom, AtomicMeasure, BlaschkeProduct, ModelSpace, QuadratureGrid, Tolerances};

const GRID: usize = 2048;
const SEED: u64 = 42;

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn trial_rng(suite: u64, degree: usize, trial: usize) -> TestRng {
    random::rng(SEED ^ (suite << 48) ^ ((degree as u64) << 32) ^ trial as u64)
}

/// Products for the theorem suite: every fifth trial has a repeated zero.
fn theorem_product(degree: usize, trial: usize) -> BlaschkeProduct {
    let mut rng = trial_rng(1, degree, trial);
    if trial % 5 == 4 {
        random::blaschke_with_repeats(&mut rng, degree, 0.9)
    } else {
        random::blaschke(&mut rng, degree, 0.9)
    }
}

// ---------------------------------------------------------------------------

fn theorem_suite(grid: usize) -> Vec<(usize, usize, usize, Result<TheoremReport, ttokit::Error>)> {
    let tol = Tolerances::default();
    let jobs: Vec<(usize, usize)> = (2..=6).flat_map(|n| (0..25).map(move |t| (n, t))).collect();
    jobs.par_iter()
        .flat_map_iter(|&(n, t)| {
            let u = theorem_product(n, t);
            let space = ModelSpace::new(u.clone(), grid).unwrap();
            (0..n)
                .map(|k| (n, t, k, theorem_check(&space, u.zeros()[k], &tol)))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let results = theorem_suite(GRID);
    let elapsed = start.elapsed().as_secs_f64();
    let mut failures = Vec::new();
    let mut worst_distance: f64 = 0.0;
    for (n, t, k, r) in &results {
        match r {
            Ok(rep) => {
                worst_distance = worst_distance.max(rep.projector_distance);
                if rep.dim_s != 2 * n - 1 || rep.dim_t != 2 * n - 1 || rep.projector_distance >= 1e-7 {
                    failures.push(format!("n={n} trial={t} zero={k}: {rep:?}"));
                }
            }
            Err(e) => failures.push(format!("n={n} trial={t} zero={k}: {e}")),
        }
    }
    Outcome {
        name: "1 two-symmetry space equals T_u (n=2..6, 25 products, every zero)",
        passed: failures.is_empty() && elapsed < 60.0,
        detail: format!(
            "{} checks, {} failures, max projector distance {worst_distance:.2e} (< 1e-7), {elapsed:.1}s (< 60s){}",
            results.len(),
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    }
}

// ---------------------------------------------------------------------------

struct SarasonRow {
    member: bool,
    distance: f64,
    residual: f64,
}

fn sarason_suite(grid: usize) -> Vec<SarasonRow> {
    let tol = Tolerances::default();
    (2..=6usize)
        .into_par_iter()
        .flat_map_iter(|n| {
            let mut rng = trial_rng(2, n, 0);
            let u = random::blaschke(&mut rng, n, 0.9);
            let space = ModelSpace::new(u, grid).unwrap();
            let t = TtoSpace::new(&space, &tol).unwrap();
            let mut rows = Vec::new();
            for i in 0..40 {
                let op = if i < 20 {
                    let c = random::complex_gaussian_vector(&mut rng, t.dim());
                    t.combination(&c)
                } else {
                    ModelOperator::new(&space, random::complex_gaussian_matrix(&mut rng, n, n)).unwrap()
                };
                let distance = t.membership_distance(&op).unwrap();
                rows.push(SarasonRow {
                    member: distance < tol.membership,
                    distance,
                    residual: sarason_residual(&op),
                });
            }
            rows
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let rows = sarason_suite(GRID);
    let members: Vec<&SarasonRow> = rows.iter().filter(|r| r.member).collect();
    let others: Vec<&SarasonRow> = rows.iter().filter(|r| !r.member).collect();
    let max_member = members.iter().map(|r| r.residual).fold(0.0, f64::max);
    let min_other = others.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    let min_distance = others.iter().map(|r| r.distance).fold(f64::INFINITY, f64::min);
    let exact = rows.iter().all(|r| (r.residual < 1e-9) == r.member);
    let gap = min_other / max_member.max(f64::MIN_POSITIVE);
    Outcome {
        name: "2 Sarason residual separates T_u members (n=2..6, 20+20 operators)",
        passed: exact && gap >= 1e3 && members.len() == 100 && others.len() == 100,
        detail: format!(
            "{} members (max residual {max_member:.2e}), {} non-members (min residual {min_other:.2e}, min distance {min_distance:.2e}), gap {gap:.2e} (>= 1e3)",
            members.len(),
            others.len()
        ),
    }
}

// ---------------------------------------------------------------------------

fn lemma1_suite(grid_size: usize) -> Vec<f64> {
    let grid = QuadratureGrid::new(grid_size).unwrap();
    (0..50)
        .map(|t| {
            let mut rng = trial_rng(3, 0, t);
            let n = rng.random_range(1..=6);
            let u = random::blaschke(&mut rng, n, 0.9);
            let divisors = u.divisors();
            let v = &divisors[rng.random_range(0..divisors.len())];
            let f = random::rational_samples(&mut rng, &grid, 3);
            lemma1_residual(&grid, &u, v, &f).unwrap()
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let res = lemma1_suite(GRID);
    let worst = res.iter().copied().fold(0.0, f64::max);
    Outcome {
        name: "3 C_u C_{u/v} f = v f (50 random triples)",
        passed: worst < 1e-10,
        detail: format!("max pointwise residual {worst:.2e} (< 1e-10)"),
    }
}

// ---------------------------------------------------------------------------

fn crofoot_suite(grid: usize) -> Vec<Result<ttokit::CrofootReport, ttokit::Error>> {
    let tol = Tolerances::default();
    let jobs: Vec<(usize, usize)> = (1..=5).flat_map(|n| (0..10).map(move |t| (n, t))).collect();
    jobs.par_iter()
        .map(|&(n, t)| {
            let mut rng = trial_rng(4, n, t);
            let u = random::blaschke(&mut rng, n, 0.9);
            let a = random::point_in_disc(&mut rng, 0.7);
            let space = ModelSpace::new(u, grid)?;
            Crofoot::new(&space, a)?.report(&tol)
        })
        .collect()
}

fn criterion_4() -> Outcome {
    let res = crofoot_suite(GRID);
    let mut worst = [0.0f64; 3];
    let mut errors = 0;
    let mut dims_ok = true;
    for r in &res {
        match r {
            Ok(r) => {
                worst[0] = worst[0].max(r.unitarity);
                worst[1] = worst[1].max(r.intertwining);
                worst[2] = worst[2].max(r.transport);
                dims_ok &= r.dim_source == r.dim_target;
            }
            Err(_) => errors += 1,
        }
    }
    Outcome {
        name: "4 omega_a unitary, intertwines C_u, transports T_u (n=1..5, 10 trials, |a|<=0.7)",
        passed: errors == 0 && dims_ok && worst.iter().all(|&w| w < 1e-7),
        detail: format!(
            "max unitarity {:.2e}, intertwining {:.2e}, transport {:.2e} (each < 1e-7), {errors} errors",
            worst[0], worst[1], worst[2]
        ),
    }
}

// ---------------------------------------------------------------------------

/// `(degree, divisor degree, residual)` for every non-constant divisor.
fn divisor_suite(grid: usize) -> Vec<(usize, usize, f64)> {
    let tol = Tolerances::default();
    let jobs: Vec<(usize, usize)> = (1..=5).flat_map(|n| (0..5).map(move |t| (n, t))).collect();
    jobs.par_iter()
        .flat_map_iter(|&(n, t)| {
            let mut rng = trial_rng(5, n, t);
            let u = if n >= 2 && t == 4 {
                random::blaschke_with_repeats(&mut rng, n, 0.9)
            } else {
                random::blaschke(&mut rng, n, 0.9)
            };
            let space = ModelSpace::new(u.clone(), grid).unwrap();
            let tto = TtoSpace::new(&space, &tol).unwrap();
            let a = tto.combination(&random::complex_gaussian_vector(&mut rng, tto.dim()));
            u.divisors()
                .into_iter()
                .filter(|v| v.degree() > 0)
                .map(|v| {
                    let vs = ModelSpace::new(v.clone(), grid).unwrap();
                    let b = a.compress(&vs).unwrap();
                    let r = Conjugation::new(&vs).symmetry_residual(b.matrix());
                    (n, v.degree(), r)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let res = divisor_suite(GRID);
    let elapsed = start.elapsed().as_secs_f64();
    let worst = res.iter().map(|r| r.2).fold(0.0, f64::max);
    Outcome {
        name: "5 every divisor compression of a TTO is C_v-symmetric (n<=5, all divisors)",
        passed: worst < 1e-9 && elapsed < 30.0,
        detail: format!(
            "{} compressions, max residual {worst:.2e} (< 1e-9), {elapsed:.1}s (< 30s)",
            res.len()
        ),
    }
}

// ---------------------------------------------------------------------------

/// `(label, ν, η)`: η is an atom of ν.
fn measures() -> Vec<(&'static str, AtomicMeasure, f64)> {
    vec![
        (
            "single atom",
            AtomicMeasure::new(vec![Atom { angle: 0.0, weight: 1.0 }]).unwrap(),
            0.0,
        ),
        (
            "three atoms",
            AtomicMeasure::new(vec![
                Atom { angle: 0.0, weight: 1.0 },
                Atom { angle: TAU / 3.0, weight: 0.5 },
                Atom { angle: 2.0 * TAU / 3.0, weight: 0.25 },
            ])
            .unwrap(),
            TAU / 3.0,
        ),
    ]
}

fn criterion_6() -> Vec<Outcome> {
    let grid = QuadratureGrid::new(GRID).unwrap();
    let mut out = Vec::new();
    for (label, nu, eta) in measures() {
        let (rep, _) = Lemma5Report::run(&nu, eta, 400, &RationalFunction::one(), &grid).unwrap();
        let fmt_range = |r: Option<(f64, f64)>| {
            r.map(|(a, b)| format!("[{a:.3}, {b:.3}]")).unwrap_or_else(|| "n/a".into())
        };
        let pw_bad = rep
            .pointwise
            .points
            .iter()
            .filter(|p| p.slope.is_some_and(|s| (s + 0.5).abs() > 0.1))
            .count();
        let ratio_bad = rep
            .ratio
            .points
            .iter()
            .filter(|p| p.slope.is_some_and(|s| (s + 0.5).abs() > 0.1))
            .count();
        out.push(Outcome {
            name: "6a decay slopes of pointwise and ratio errors in -0.5 +- 0.1 (n in [25,400])",
            passed: rep.pointwise.slopes_ok == Some(true) && rep.ratio.slopes_ok == Some(true),
            detail: format!(
                "{label}: pointwise slopes {} ({pw_bad}/256 outside), ratio slopes {} ({ratio_bad}/256 outside)",
                fmt_range(rep.pointwise.slope_range),
                fmt_range(rep.ratio.slope_range)
            ),
        });
        out.push(Outcome {
            name: "6b uniform bound |z-eta||e-1|/mass <= 6e^{3 nu(T)} + 1",
            passed: rep.uniform.passed,
            detail: format!(
                "{label}: statistic {:.4} <= bound {:.4}",
                rep.uniform.statistic, rep.uniform.bound
            ),
        });
        out.push(Outcome {
            name: "6c weak-convergence targets (z+eta)g(z) within 5 mass_N (g = 1)",
            passed: rep.weak.pointwise_ok && rep.weak.norms_bounded,
            detail: format!(
                "{label}: max error {:.4e} vs threshold {:.4e} ({}/256 points over), sup norm {:.3} <= {:.3}",
                rep.weak.max_pointwise_error,
                rep.weak.pointwise_threshold,
                rep.weak.pointwise_failures,
                rep.weak.sup_norm,
                rep.weak.norm_bound
            ),
        });
    }
    out
}

// ---------------------------------------------------------------------------

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let a = theorem_suite(GRID);
    let b = theorem_suite(2 * GRID);
    let mut dim_changes = 0;
    let mut max_delta: f64 = 0.0;
    for (x, y) in a.iter().zip(&b) {
        match (&x.3, &y.3) {
            (Ok(p), Ok(q)) => {
                dim_changes += usize::from(p.dim_s != q.dim_s || p.dim_t != q.dim_t);
                max_delta = max_delta
                    .max((p.projector_distance - q.projector_distance).abs())
                    .max((p.sarason_max_residual - q.sarason_max_residual).abs());
            }
            (Err(_), Err(_)) => {}
            _ => dim_changes += 1,
        }
    }
    ok &= dim_changes == 0 && max_delta < 1e-9;
    notes.push(format!("theorem: {dim_changes} decision changes, max delta {max_delta:.1e}"));

    let a = sarason_suite(GRID);
    let b = sarason_suite(2 * GRID);
    let flips = a.iter().zip(&b).filter(|(p, q)| p.member != q.member).count();
    let delta = a
        .iter()
        .zip(&b)
        .filter(|(p, _)| p.member)
        .map(|(p, q)| (p.residual - q.residual).abs().max((p.distance - q.distance).abs()))
        .fold(0.0, f64::max);
    let rel = a
        .iter()
        .zip(&b)
        .filter(|(p, _)| !p.member)
        .map(|(p, q)| (p.residual - q.residual).abs())
        .fold(0.0, f64::max);
    ok &= flips == 0 && delta < 1e-9 && rel < 1e-9;
    notes.push(format!("sarason: {flips} flips, member delta {delta:.1e}, non-member delta {rel:.1e}"));

    let d = lemma1_suite(GRID)
        .iter()
        .zip(lemma1_suite(2 * GRID))
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    ok &= d < 1e-9;
    notes.push(format!("lemma1: delta {d:.1e}"));

    let d = crofoot_suite(GRID)
        .iter()
        .zip(crofoot_suite(2 * GRID))
        .map(|(p, q)| match (p, q) {
            (Ok(p), Ok(q)) => (p.unitarity - q.unitarity)
                .abs()
                .max((p.intertwining - q.intertwining).abs())
                .max((p.transport - q.transport).abs()),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    ok &= d < 1e-9;
    notes.push(format!("crofoot: delta {d:.1e}"));

    let d = divisor_suite(GRID)
        .iter()
        .zip(divisor_suite(2 * GRID))
        .map(|(p, q)| (p.2 - q.2).abs())
        .fold(0.0, f64::max);
    ok &= d < 1e-9;
    notes.push(format!("divisors: delta {d:.1e}"));

    let mut d: f64 = 0.0;
    for (_, nu, eta) in measures() {
        let g1 = QuadratureGrid::new(GRID).unwrap();
        let g2 = QuadratureGrid::new(2 * GRID).unwrap();
        let (p, _) = Lemma5Report::run(&nu, eta, 400, &RationalFunction::one(), &g1).unwrap();
        let (q, _) = Lemma5Report::run(&nu, eta, 400, &RationalFunction::one(), &g2).unwrap();
        d = d
            .max((p.pointwise.max_final_error - q.pointwise.max_final_error).abs())
            .max((p.ratio.max_final_error - q.ratio.max_final_error).abs())
            .max((p.uniform.statistic - q.uniform.statistic).abs())
            .max((p.weak.max_pointwise_error - q.weak.max_pointwise_error).abs());
    }
    ok &= d < 1e-9;
    notes.push(format!("lemma5 residuals: delta {d:.1e}"));

    Outcome {
        name: "7 doubling the grid moves residuals < 1e-9 and no decisions",
        passed: ok,
        detail: notes.join("; "),
    }
}

fn main() -> ExitCode {
    // cargo passes harness flags such as --nocapture; none apply here
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut outcomes = Vec::new();
    let run = |id: &str| filter.as_deref().is_none_or(|f| id.contains(f));
    if run("criterion_1") {
        outcomes.push(criterion_1());
    }
    if run("criterion_2") {
        outcomes.push(criterion_2());
    }
    if run("criterion_3") {
        outcomes.push(criterion_3());
    }
    if run("criterion_4") {
        outcomes.push(criterion_4());
    }
    if run("criterion_5") {
        outcomes.push(criterion_5());
    }
    if run("criterion_6") {
        outcomes.extend(criterion_6());
    }
    if run("criterion_7") {
        outcomes.push(criterion_7());
    }
    let mut failed = 0;
    for o in &outcomes {
        println!("[{}] {}\n       {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
