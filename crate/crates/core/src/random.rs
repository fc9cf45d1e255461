//! Seeded generators for test inputs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::inner::BlaschkeProduct;
use crate::linalg::{CMat, CVec};
use crate::modelspace::QuadratureGrid;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// A point uniformly distributed in the disc of radius `r`.
pub fn point_in_disc<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex64 {
    let rho = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, TAU * rng.random::<f64>())
}

/// Random product of the given degree with zero moduli at most `max_modulus`.
pub fn blaschke<R: Rng + ?Sized>(rng: &mut R, degree: usize, max_modulus: f64) -> BlaschkeProduct {
    let zeros = (0..degree).map(|_| point_in_disc(rng, max_modulus)).collect();
    BlaschkeProduct::new(zeros).expect("zeros drawn inside the guard")
}

/// Like [`blaschke`], but at least one zero is repeated (degree ≥ 2).
pub fn blaschke_with_repeats<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    max_modulus: f64,
) -> BlaschkeProduct {
    assert!(degree >= 2);
    let distinct = rng.random_range(1..degree);
    let pool: Vec<Complex64> = (0..distinct).map(|_| point_in_disc(rng, max_modulus)).collect();
    let mut zeros = pool.clone();
    zeros.push(pool[0]);
    while zeros.len() < degree {
        zeros.push(pool[rng.random_range(0..pool.len())]);
    }
    BlaschkeProduct::new(zeros).expect("zeros drawn inside the guard")
}

/// Samples of a random rational `L²` function
/// `Σ c_k/(1 - conj(b_k) z) + Σ d_k/(1 - b_k conj(z))`, poles off the closed disc.
pub fn rational_samples<R: Rng + ?Sized>(rng: &mut R, grid: &QuadratureGrid, terms: usize) -> CVec {
    let one = Complex64::new(1.0, 0.0);
    let params: Vec<(Complex64, Complex64, Complex64)> = (0..terms)
        .map(|_| (point_in_disc(rng, 0.8), complex_gaussian(rng), complex_gaussian(rng)))
        .collect();
    grid.sample(|z| {
        params
            .iter()
            .map(|&(b, c, d)| c / (one - b.conj() * z) + d / (one - b * z.conj()))
            .sum()
    })
}

/// Samples of a random analytic rational function (poles off the closed disc).
pub fn analytic_rational_samples<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &QuadratureGrid,
    terms: usize,
) -> CVec {
    let one = Complex64::new(1.0, 0.0);
    let params: Vec<(Complex64, Complex64)> = (0..terms)
        .map(|_| (point_in_disc(rng, 0.8), complex_gaussian(rng)))
        .collect();
    grid.sample(|z| params.iter().map(|&(b, c)| c / (one - b.conj() * z)).sum())
}
