//! Shrinking-arc measures `μ_n ≤ ν` for an atomic measure `ν` and the
//! convergence diagnostics for `e_{μ_n}`.
//!
//! For the closed arc `I_n` of normalized length `1/n` centred at an atom
//! `η` of `ν`, `dμ_n = √(|I_n|/ν(I_n)) · 1_{I_n} dν`, so that
//! `μ_n(T) = √(|I_n| ν(I_n))`. Since `η` is an atom, `ν(I_n)/|I_n| ≥ w_η n`.
//!
//! Checks (all evaluated on fixed point sets):
//! * pointwise: `e_{μ_n}(z) → 1`;
//! * ratio: `(e_{μ_n}(z) - 1)/μ_n(T) → (z + η)/(z - η)`;
//! * uniform: `sup |z - η| |e_{μ_n}(z) - 1| / μ_n(T)` stays below
//!   `6 e^{3ν(T)} + 1`;
//! * weak: `h_n = (e_{μ_n} - 1)/μ_n(T) · (χ - η) g` has bounded `H²` norms
//!   and converges pointwise to `(χ + η) g`, hence weakly.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner::{angular_distance, Atom, AtomicMeasure, SingularInner, DEFAULT_ATOM_CUTOFF};
use crate::modelspace::QuadratureGrid;

/// Radii of the standard disc sample grid.
pub const RADII: [f64; 8] = [0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.95];
/// Angles per radius in the standard grid.
pub const ANGLES: usize = 32;
/// Radius of the near-boundary ring used only by the uniform bound.
pub const BOUNDARY_RING: f64 = 0.999;
/// Index window for decay-rate fits.
pub const SLOPE_WINDOW: (usize, usize) = (25, 400);

/// The standard grid: 8 radii × 32 equispaced angles.
pub fn disc_grid() -> Vec<Complex64> {
    RADII
        .iter()
        .flat_map(|&r| (0..ANGLES).map(move |k| Complex64::from_polar(r, TAU * k as f64 / ANGLES as f64)))
        .collect()
}

/// Standard grid, the `0.999` ring, and a patch approaching `η`.
pub fn dense_grid(eta: f64) -> Vec<Complex64> {
    let mut pts = disc_grid();
    pts.extend((0..ANGLES).map(|k| Complex64::from_polar(BOUNDARY_RING, TAU * k as f64 / ANGLES as f64)));
    for r in [0.99, 0.995, BOUNDARY_RING] {
        for d in [0.0, 1e-3, -1e-3, 1e-2, -1e-2, 0.1, -0.1] {
            pts.push(Complex64::from_polar(r, eta + d));
        }
    }
    pts
}

/// `e^w - 1` without cancellation for small `w`.
fn expm1(w: Complex64) -> Complex64 {
    let (s, c) = w.im.sin_cos();
    let half = (0.5 * w.im).sin();
    Complex64::new(w.re.exp_m1() * c - 2.0 * half * half, w.re.exp() * s)
}

/// `e_μ(z) - 1` for `|z| < 1`.
fn e_minus_one(mu: &AtomicMeasure, z: Complex64) -> Complex64 {
    let h: Complex64 = mu
        .atoms()
        .iter()
        .map(|a| {
            let zeta = Complex64::from_polar(1.0, a.angle);
            a.weight * (zeta + z) / (zeta - z)
        })
        .sum();
    expm1(-h)
}

/// One term of the arc sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcItem {
    pub n: usize,
    pub center: f64,
    /// Angular half-width `π/n` (normalized length `1/n`).
    pub half_width: f64,
    pub length: f64,
    /// `ν(I_n)`.
    pub arc_mass: f64,
    pub mu: AtomicMeasure,
    /// `μ_n(T)`.
    pub mass: f64,
}

/// `I_n` and `μ_n` for `n = 1..=max_n`.
pub fn build_sequence(nu: &AtomicMeasure, eta: f64, max_n: usize) -> Result<Vec<ArcItem>> {
    let center = nu.atom_at(eta).ok_or(Error::NotAnAtom(eta))?.angle;
    if max_n == 0 {
        return Err(Error::InvalidMeasure("max_n must be at least 1".into()));
    }
    (1..=max_n)
        .map(|n| {
            let length = 1.0 / n as f64;
            let half_width = PI * length;
            let inside: Vec<Atom> = nu
                .atoms()
                .iter()
                .copied()
                .filter(|a| angular_distance(a.angle, center) <= half_width)
                .collect();
            let arc_mass: f64 = inside.iter().map(|a| a.weight).sum();
            let scale = (length / arc_mass).sqrt();
            let mu = AtomicMeasure::new(
                inside
                    .into_iter()
                    .map(|a| Atom {
                        angle: a.angle,
                        weight: a.weight * scale,
                    })
                    .collect(),
            )?;
            Ok(ArcItem {
                n,
                center,
                half_width,
                length,
                arc_mass,
                mass: mu.total_mass(),
                mu,
            })
        })
        .collect()
}

/// Least-squares slope of `log err` against `log n` over the window.
pub fn loglog_slope(ns: &[usize], errs: &[f64], window: (usize, usize)) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(errs)
        .filter(|(n, e)| **n >= window.0 && **n <= window.1 && **e > 0.0 && e.is_finite())
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// First index from which a trace is non-increasing to the end.
fn monotone_from(ns: &[usize], errs: &[f64]) -> usize {
    let mut start = errs.len().saturating_sub(1);
    while start > 0 && errs[start - 1] >= errs[start] {
        start -= 1;
    }
    ns.get(start).copied().unwrap_or(1)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub re: f64,
    pub im: f64,
    pub final_error: f64,
    pub threshold: f64,
    /// Smallest `n₀` with the error non-increasing on `n₀..=N`.
    pub monotone_from: usize,
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointwiseReport {
    pub max_n: usize,
    pub final_mass: f64,
    pub max_final_error: f64,
    pub z0_final_error: f64,
    pub slope_window: (usize, usize),
    /// Slopes of every point with a full window, as `(min, max)`.
    pub slope_range: Option<(f64, f64)>,
    /// Whether every fitted slope lies in `-0.5 ± 0.1`.
    pub slopes_ok: Option<bool>,
    /// Whether every final error is below its threshold.
    pub passed: bool,
    pub points: Vec<PointSummary>,
}

fn slope_summary(slopes: impl Iterator<Item = Option<f64>>) -> (Option<(f64, f64)>, Option<bool>) {
    let s: Vec<f64> = slopes.flatten().collect();
    if s.is_empty() {
        return (None, None);
    }
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (Some((lo, hi)), Some(lo >= -0.6 && hi <= -0.4))
}

fn window_for(seq: &[ArcItem]) -> Option<(usize, usize)> {
    let n_max = seq.last()?.n;
    (n_max >= SLOPE_WINDOW.1).then_some(SLOPE_WINDOW)
}

/// `|e_{μ_n}(z) - 1|` over the sequence. The final value at `z` must stay
/// below `10 · μ_N(T) · max(1, |(η+z)/(η-z)|)`, the first-order size of the
/// error at `z`.
pub fn pointwise_limit_check(seq: &[ArcItem], zs: &[Complex64]) -> PointwiseReport {
    let ns: Vec<usize> = seq.iter().map(|it| it.n).collect();
    let last = seq.last().expect("non-empty sequence");
    let eta = Complex64::from_polar(1.0, last.center);
    let window = window_for(seq);
    let points: Vec<PointSummary> = zs
        .iter()
        .map(|&z| {
            let errs: Vec<f64> = seq.iter().map(|it| e_minus_one(&it.mu, z).norm()).collect();
            let q = ((eta + z) / (eta - z)).norm();
            PointSummary {
                re: z.re,
                im: z.im,
                final_error: *errs.last().unwrap(),
                threshold: 10.0 * last.mass * q.max(1.0),
                monotone_from: monotone_from(&ns, &errs),
                slope: window.and_then(|w| loglog_slope(&ns, &errs, w)),
            }
        })
        .collect();
    let (slope_range, slopes_ok) = slope_summary(points.iter().map(|p| p.slope));
    PointwiseReport {
        max_n: last.n,
        final_mass: last.mass,
        max_final_error: points.iter().map(|p| p.final_error).fold(0.0, f64::max),
        z0_final_error: e_minus_one(&last.mu, Complex64::new(0.0, 0.0)).norm(),
        slope_window: SLOPE_WINDOW,
        slope_range,
        slopes_ok,
        passed: points.iter().all(|p| p.final_error <= p.threshold),
        points,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub max_n: usize,
    pub final_mass: f64,
    /// `max_z |(e_{μ_N}(z)-1)/μ_N(T) - (z+η)/(z-η)|`.
    pub max_final_error: f64,
    /// The same, divided by `μ_N(T)`.
    pub max_final_error_over_mass: f64,
    pub slope_window: (usize, usize),
    pub slope_range: Option<(f64, f64)>,
    pub slopes_ok: Option<bool>,
    pub points: Vec<PointSummary>,
}

fn ratio_error(item: &ArcItem, eta: Complex64, z: Complex64) -> f64 {
    (e_minus_one(&item.mu, z) / item.mass - (z + eta) / (z - eta)).norm()
}

pub fn ratio_limit_check(seq: &[ArcItem], zs: &[Complex64]) -> RatioReport {
    let ns: Vec<usize> = seq.iter().map(|it| it.n).collect();
    let last = seq.last().expect("non-empty sequence");
    let eta = Complex64::from_polar(1.0, last.center);
    let window = window_for(seq);
    let points: Vec<PointSummary> = zs
        .iter()
        .map(|&z| {
            let errs: Vec<f64> = seq.iter().map(|it| ratio_error(it, eta, z)).collect();
            PointSummary {
                re: z.re,
                im: z.im,
                final_error: *errs.last().unwrap(),
                threshold: f64::INFINITY,
                monotone_from: monotone_from(&ns, &errs),
                slope: window.and_then(|w| loglog_slope(&ns, &errs, w)),
            }
        })
        .collect();
    let max_final_error = points.iter().map(|p| p.final_error).fold(0.0, f64::max);
    let (slope_range, slopes_ok) = slope_summary(points.iter().map(|p| p.slope));
    RatioReport {
        max_n: last.n,
        final_mass: last.mass,
        max_final_error,
        max_final_error_over_mass: max_final_error / last.mass,
        slope_window: SLOPE_WINDOW,
        slope_range,
        slopes_ok,
        points,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformReport {
    /// `sup_{z, n} |z-η| |e_{μ_n}(z)-1| / μ_n(T)`.
    pub statistic: f64,
    /// `6 e^{3ν(T)} + 1`.
    pub bound: f64,
    /// `20 √(|I_N| / ν(I_N))`, the estimate for `|z - η| < 10/N`.
    pub near_field: f64,
    /// Per-`n` supremum over the grid.
    pub per_n: Vec<f64>,
    pub passed: bool,
}

pub fn uniform_bound_statistic(item: &ArcItem, eta: Complex64, z: Complex64) -> f64 {
    (z - eta).norm() * e_minus_one(&item.mu, z).norm() / item.mass
}

pub fn uniform_bound_check(seq: &[ArcItem], nu: &AtomicMeasure, zs: &[Complex64]) -> UniformReport {
    let last = seq.last().expect("non-empty sequence");
    let eta = Complex64::from_polar(1.0, last.center);
    let per_n: Vec<f64> = seq
        .iter()
        .map(|it| {
            zs.iter()
                .map(|&z| uniform_bound_statistic(it, eta, z))
                .fold(0.0, f64::max)
        })
        .collect();
    let statistic = per_n.iter().copied().fold(0.0, f64::max);
    let bound = 6.0 * (3.0 * nu.total_mass()).exp() + 1.0;
    UniformReport {
        statistic,
        bound,
        near_field: 20.0 * (last.length / last.arc_mass).sqrt(),
        per_n,
        passed: statistic <= bound,
    }
}

/// `scale · Π (z - zeros) / Π (1 - z/poles)`, with every pole off the closed
/// disc.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    scale: Complex64,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl RationalFunction {
    pub fn one() -> Self {
        Self {
            scale: Complex64::new(1.0, 0.0),
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn new(scale: Complex64, zeros: Vec<Complex64>, poles: Vec<Complex64>) -> Result<Self> {
        if let Some(p) = poles.iter().find(|p| p.norm().is_nan() || p.norm() <= 1.0) {
            return Err(Error::Parse {
                field: "poles".into(),
                message: format!("pole {p} is not outside the closed disc"),
            });
        }
        Ok(Self { scale, zeros, poles })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let num: Complex64 = self.zeros.iter().map(|&a| z - a).product();
        let den: Complex64 = self.poles.iter().map(|&p| one - z / p).product();
        self.scale * num / den
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakReport {
    /// Grid `H²` norms of `h_n`, `n = 1..=N`.
    pub norms: Vec<f64>,
    pub sup_norm: f64,
    /// `2 (6 e^{3ν(T)} + 1) ‖g‖`.
    pub norm_bound: f64,
    pub g_norm: f64,
    /// `max_z |h_N(z) - (z + η) g(z)|`.
    pub max_pointwise_error: f64,
    /// `5 μ_N(T)`.
    pub pointwise_threshold: f64,
    /// Number of sample points whose error exceeds the threshold.
    pub pointwise_failures: usize,
    /// `|‖e_{μ_N}(χ-η)g‖ - ‖(χ-η)g‖|` on the grid.
    pub norm_contrast: f64,
    /// `max_z |e_{μ_N}(z)(z-η)g(z) - (z-η)g(z)|`.
    pub norm_contrast_pointwise: f64,
    /// Grid nodes dropped near the atoms of `μ_N`.
    pub deleted_nodes: usize,
    pub norms_bounded: bool,
    pub pointwise_ok: bool,
}

/// Boundary values of `e_μ`, with nodes within the atom cutoff dropped.
/// Returns the kept node indices and values.
fn boundary_values(mu: &AtomicMeasure, grid: &QuadratureGrid) -> Vec<(usize, Complex64)> {
    let e = SingularInner::new(mu.clone()).with_atom_cutoff(DEFAULT_ATOM_CUTOFF);
    (0..grid.size())
        .filter_map(|m| e.boundary_eval(grid.angle(m)).ok().map(|v| (m, v)))
        .collect()
}

pub fn weak_convergence_check(
    seq: &[ArcItem],
    nu: &AtomicMeasure,
    g: &RationalFunction,
    zs: &[Complex64],
    grid: &QuadratureGrid,
) -> WeakReport {
    let last = seq.last().expect("non-empty sequence");
    let eta = Complex64::from_polar(1.0, last.center);
    let nodes = grid.nodes();
    let base: Vec<Complex64> = nodes.iter().map(|&z| (z - eta) * g.eval(z)).collect();
    let g_norm = (nodes.iter().map(|&z| g.eval(z).norm_sqr()).sum::<f64>() / grid.size() as f64).sqrt();

    let norms: Vec<f64> = seq
        .iter()
        .map(|it| {
            let kept = boundary_values(&it.mu, grid);
            let s: f64 = kept
                .iter()
                .map(|&(m, e)| ((e - 1.0) / it.mass * base[m]).norm_sqr())
                .sum();
            (s / kept.len() as f64).sqrt()
        })
        .collect();
    let sup_norm = norms.iter().copied().fold(0.0, f64::max);
    let norm_bound = 2.0 * (6.0 * (3.0 * nu.total_mass()).exp() + 1.0) * g_norm;

    let threshold = 5.0 * last.mass;
    let errs: Vec<f64> = zs
        .iter()
        .map(|&z| {
            let h = e_minus_one(&last.mu, z) / last.mass * (z - eta) * g.eval(z);
            (h - (z + eta) * g.eval(z)).norm()
        })
        .collect();

    let kept = boundary_values(&last.mu, grid);
    let k = kept.len() as f64;
    let with_e = (kept.iter().map(|&(m, e)| (e * base[m]).norm_sqr()).sum::<f64>() / k).sqrt();
    let without = (kept.iter().map(|&(m, _)| base[m].norm_sqr()).sum::<f64>() / k).sqrt();
    let contrast_pointwise = zs
        .iter()
        .map(|&z| (e_minus_one(&last.mu, z) * (z - eta) * g.eval(z)).norm())
        .fold(0.0, f64::max);

    WeakReport {
        sup_norm,
        norm_bound,
        g_norm,
        max_pointwise_error: errs.iter().copied().fold(0.0, f64::max),
        pointwise_threshold: threshold,
        pointwise_failures: errs.iter().filter(|&&e| e > threshold).count(),
        norm_contrast: (with_e - without).abs(),
        norm_contrast_pointwise: contrast_pointwise,
        deleted_nodes: grid.size() - kept.len(),
        norms_bounded: sup_norm <= norm_bound,
        pointwise_ok: errs.iter().all(|&e| e <= threshold),
        norms,
    }
}

/// Everything the `lemma5` command reports.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma5Report {
    pub eta: f64,
    pub max_n: usize,
    pub total_mass: f64,
    pub pointwise: PointwiseReport,
    pub ratio: RatioReport,
    pub uniform: UniformReport,
    pub weak: WeakReport,
}

impl Lemma5Report {
    pub fn run(
        nu: &AtomicMeasure,
        eta: f64,
        max_n: usize,
        g: &RationalFunction,
        grid: &QuadratureGrid,
    ) -> Result<(Self, Vec<ArcItem>)> {
        let seq = build_sequence(nu, eta, max_n)?;
        let center = seq[0].center;
        let zs = disc_grid();
        let report = Self {
            eta: center,
            max_n,
            total_mass: nu.total_mass(),
            pointwise: pointwise_limit_check(&seq, &zs),
            ratio: ratio_limit_check(&seq, &zs),
            uniform: uniform_bound_check(&seq, nu, &dense_grid(center)),
            weak: weak_convergence_check(&seq, nu, g, &zs, grid),
        };
        Ok((report, seq))
    }

    /// Every assertion that has enough data to be evaluated.
    pub fn passed(&self) -> bool {
        self.pointwise.passed
            && self.pointwise.slopes_ok.unwrap_or(true)
            && self.ratio.slopes_ok.unwrap_or(true)
            && self.uniform.passed
            && self.weak.norms_bounded
            && self.weak.pointwise_ok
    }
}

/// One CSV row per `n`.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub arc_mass: f64,
    pub mass: f64,
    pub z0_error: f64,
    pub max_pointwise_error: f64,
    pub max_ratio_error: f64,
    pub uniform_sup: f64,
    pub h_norm: f64,
}

pub fn trace_rows(seq: &[ArcItem], report: &Lemma5Report) -> Vec<TraceRow> {
    let zs = disc_grid();
    let eta = Complex64::from_polar(1.0, report.eta);
    seq.iter()
        .enumerate()
        .map(|(i, it)| TraceRow {
            n: it.n,
            arc_mass: it.arc_mass,
            mass: it.mass,
            z0_error: e_minus_one(&it.mu, Complex64::new(0.0, 0.0)).norm(),
            max_pointwise_error: zs
                .iter()
                .map(|&z| e_minus_one(&it.mu, z).norm())
                .fold(0.0, f64::max),
            max_ratio_error: zs
                .iter()
                .map(|&z| ratio_error(it, eta, z))
                .fold(0.0, f64::max),
            uniform_sup: report.uniform.per_n[i],
            h_norm: report.weak.norms[i],
        })
        .collect()
}
