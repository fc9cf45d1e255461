//! The model space `K_u = H² ⊖ uH²` for a finite Blaschke product `u`.
//!
//! Functions are stored by their samples on a uniform boundary grid and all
//! `L²(T)` inner products are computed with the trapezoid rule. For rational
//! functions whose poles stay off the closed disc the rule converges
//! geometrically in the grid size.
//!
//! The basis is the Takenaka–Malmquist system
//! `γ_k(z) = √(1-|a_k|²)/(1 - conj(a_k) z) · Π_{j<k} b_{a_j}(z)`
//! in the canonical zero order, so for a prefix divisor `v` of `u` the
//! inclusion `K_v ⊂ K_u` is a coordinate inclusion.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{blaschke_factor, BlaschkeProduct};
use crate::linalg::{CMat, CVec};

pub const DEFAULT_GRID_SIZE: usize = 2048;

/// Minimum number of grid nodes per zero.
pub const NODES_PER_ZERO: usize = 32;

/// `M` equispaced nodes on the unit circle, each with weight `1/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    nodes: Vec<Complex64>,
}

impl QuadratureGrid {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid {
                size,
                reason: "must be a power of two".into(),
            });
        }
        let nodes = (0..size)
            .map(|m| Complex64::from_polar(1.0, TAU * m as f64 / size as f64))
            .collect();
        Ok(Self { nodes })
    }

    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn angle(&self, m: usize) -> f64 {
        TAU * m as f64 / self.size() as f64
    }

    /// Samples of `f` at the nodes.
    pub fn sample(&self, f: impl Fn(Complex64) -> Complex64) -> CVec {
        CVec::from_iterator(self.size(), self.nodes.iter().map(|&z| f(z)))
    }

    /// `⟨f, g⟩ = (1/M) Σ f(ζ_m) conj(g(ζ_m))`.
    pub fn inner(&self, f: &CVec, g: &CVec) -> Complex64 {
        g.dotc(f) / self.size() as f64
    }

    pub fn norm(&self, f: &CVec) -> f64 {
        (f.norm_squared() / self.size() as f64).sqrt()
    }
}

/// `K_u` together with its sampled orthonormal basis.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    u: BlaschkeProduct,
    grid: QuadratureGrid,
    /// `M × n`; column `k` holds the samples of `γ_k`.
    basis: CMat,
    u_samples: CVec,
}

impl ModelSpace {
    pub fn new(u: BlaschkeProduct, grid_size: usize) -> Result<Self> {
        let n = u.degree();
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        let grid = QuadratureGrid::new(grid_size)?;
        if grid_size < NODES_PER_ZERO * n {
            return Err(Error::InvalidGrid {
                size: grid_size,
                reason: format!("need at least {} nodes for degree {n}", NODES_PER_ZERO * n),
            });
        }
        let mut basis = CMat::zeros(grid_size, n);
        for (m, &z) in grid.nodes().iter().enumerate() {
            for (k, g) in takenaka_malmquist(u.zeros(), z).into_iter().enumerate() {
                basis[(m, k)] = g;
            }
        }
        let u_samples = grid.sample(|z| u.eval(z));
        Ok(Self {
            u,
            grid,
            basis,
            u_samples,
        })
    }

    pub fn u(&self) -> &BlaschkeProduct {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.degree()
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn grid_size(&self) -> usize {
        self.grid.size()
    }

    /// Boundary samples of the basis, one column per basis function.
    pub fn basis_samples(&self) -> &CMat {
        &self.basis
    }

    pub fn u_samples(&self) -> &CVec {
        &self.u_samples
    }

    /// Same inner function and the same grid.
    pub fn same_as(&self, other: &ModelSpace) -> bool {
        std::ptr::eq(self, other) || (self.u == other.u && self.grid_size() == other.grid_size())
    }

    /// Values `γ_k(z)` of every basis function at a point of the closed disc.
    pub fn basis_at(&self, z: Complex64) -> CVec {
        CVec::from_vec(takenaka_malmquist(self.u.zeros(), z))
    }

    /// Coordinates `⟨samples, γ_k⟩` without wrapping.
    pub fn coordinates(&self, samples: &CVec) -> Result<CVec> {
        if samples.len() != self.grid_size() {
            return Err(Error::LengthMismatch {
                expected: self.grid_size(),
                found: samples.len(),
            });
        }
        Ok(self.basis.ad_mul(samples).unscale(self.grid_size() as f64))
    }

    /// Orthogonal projection `P_{K_u}` of a sampled boundary function.
    pub fn project(&self, samples: &CVec) -> Result<ModelVector<'_>> {
        Ok(ModelVector {
            coeffs: self.coordinates(samples)?,
            space: self,
        })
    }

    /// Coordinates of the grid function `samples` for every column, i.e.
    /// `G* S / M` for an `M × k` sample matrix.
    pub fn coordinates_of_columns(&self, samples: &CMat) -> CMat {
        self.basis.ad_mul(samples).unscale(self.grid_size() as f64)
    }

    pub fn vector(&self, coeffs: CVec) -> Result<ModelVector<'_>> {
        if coeffs.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                found: coeffs.len(),
            });
        }
        Ok(ModelVector {
            coeffs,
            space: self,
        })
    }

    /// The `k`-th basis vector.
    pub fn basis_vector(&self, k: usize) -> ModelVector<'_> {
        let mut coeffs = CVec::zeros(self.dim());
        coeffs[k] = Complex64::new(1.0, 0.0);
        ModelVector {
            coeffs,
            space: self,
        }
    }

    /// Gram matrix of the sampled basis.
    pub fn gram(&self) -> CMat {
        self.basis.ad_mul(&self.basis).unscale(self.grid_size() as f64)
    }

    /// `k_w(z) = (1 - conj(u(w)) u(z)) / (1 - conj(w) z)`, sampled and projected.
    pub fn reproducing_kernel(&self, w: Complex64) -> Result<ModelVector<'_>> {
        if w.norm().is_nan() || w.norm() >= 1.0 {
            return Err(Error::OutsideDisc { re: w.re, im: w.im });
        }
        let uw = self.u.eval(w).conj();
        let one = Complex64::new(1.0, 0.0);
        let samples = CVec::from_iterator(
            self.grid_size(),
            self.grid
                .nodes()
                .iter()
                .zip(self.u_samples.iter())
                .map(|(&z, &uz)| (one - uw * uz) / (one - w.conj() * z)),
        );
        self.project(&samples)
    }

    /// Coordinates (as a unit vector) of the direction `S*u = conj(χ)(u - u(0))`
    /// that spans `K_u ⊖ K_u^0`.
    pub fn backward_shift_of_u(&self) -> CVec {
        let u0 = self.u.eval(Complex64::new(0.0, 0.0));
        let samples = CVec::from_iterator(
            self.grid_size(),
            self.grid
                .nodes()
                .iter()
                .zip(self.u_samples.iter())
                .map(|(&z, &uz)| z.conj() * (uz - u0)),
        );
        let s = self.basis.ad_mul(&samples).unscale(self.grid_size() as f64);
        let norm = s.norm();
        s / Complex64::new(norm, 0.0)
    }

    /// Orthonormal basis of `K_u^0 = {g ∈ K_u : χg ∈ K_u}` as the columns of an
    /// `n × (n-1)` coordinate matrix.
    pub fn ku0_basis(&self) -> CMat {
        orthogonal_complement_of_unit(&self.backward_shift_of_u())
    }

    /// Isometric embedding `K_v → K_u` in coordinates: `E_{kj} = ⟨γ^v_j, γ^u_k⟩`.
    pub fn embedding(&self, v_space: &ModelSpace) -> Result<CMat> {
        if !v_space.u.divides(&self.u) {
            return Err(Error::NotADivisor);
        }
        if v_space.grid_size() != self.grid_size() {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.coordinates_of_columns(&v_space.basis))
    }

    /// [`ModelSpace::embedding`] for a divisor given by its zeros. The
    /// constant divisor yields an `n × 0` matrix.
    pub fn embed(&self, v: &BlaschkeProduct) -> Result<CMat> {
        if !v.divides(&self.u) {
            return Err(Error::NotADivisor);
        }
        if v.degree() == 0 {
            return Ok(CMat::zeros(self.dim(), 0));
        }
        let v_space = ModelSpace::new(v.clone(), self.grid_size())?;
        self.embedding(&v_space)
    }
}

/// Values of the Takenaka–Malmquist functions for the ordered zeros at `z`.
fn takenaka_malmquist(zeros: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut prefix = one;
    zeros
        .iter()
        .map(|&a| {
            let g = prefix * (1.0 - a.norm_sqr()).sqrt() / (one - a.conj() * z);
            prefix *= blaschke_factor(a, z);
            g
        })
        .collect()
}

/// Columns 2..n of the Householder reflector that maps the unit vector `s`
/// onto a multiple of `e_1`: an orthonormal basis of `s^⊥`.
fn orthogonal_complement_of_unit(s: &CVec) -> CMat {
    let n = s.len();
    let s0 = s[0];
    let alpha = if s0.norm() > 0.0 {
        -s0 / s0.norm()
    } else {
        Complex64::new(-1.0, 0.0)
    };
    let mut w = s.clone();
    w[0] -= alpha;
    let wn = w.norm_squared();
    let mut h = CMat::identity(n, n);
    if wn > 0.0 {
        h -= &w * w.adjoint() * Complex64::new(2.0 / wn, 0.0);
    }
    h.columns(1, n - 1).into_owned()
}

/// An element of a [`ModelSpace`], in basis coordinates.
#[derive(Debug, Clone)]
pub struct ModelVector<'a> {
    coeffs: CVec,
    space: &'a ModelSpace,
}

impl<'a> ModelVector<'a> {
    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CVec {
        self.coeffs
    }

    pub fn space(&self) -> &'a ModelSpace {
        self.space
    }

    pub fn samples(&self) -> CVec {
        &self.space.basis * &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// `⟨self, other⟩`.
    pub fn inner(&self, other: &ModelVector<'_>) -> Result<Complex64> {
        if !self.space.same_as(other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(other.coeffs.dotc(&self.coeffs))
    }

    /// Point evaluation through the basis functions.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.space.basis_at(z).dot(&self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn space(zeros: &[Complex64]) -> ModelSpace {
        ModelSpace::new(BlaschkeProduct::new(zeros.to_vec()).unwrap(), DEFAULT_GRID_SIZE).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            ModelSpace::new(BlaschkeProduct::one(), 2048).unwrap_err(),
            Error::DegreeZero
        );
        assert!(matches!(
            ModelSpace::new(BlaschkeProduct::monomial(3), 64),
            Err(Error::InvalidGrid { .. })
        ));
        assert!(matches!(QuadratureGrid::new(1000), Err(Error::InvalidGrid { .. })));
    }

    #[test]
    fn chi_squared_basis_is_monomials() {
        let s = space(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let z = c(0.3, 0.2);
        let b = s.basis_at(z);
        assert!((b[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((b[1] - z).norm() < 1e-15);
        assert!((s.gram() - CMat::identity(2, 2)).norm() < 1e-13);
    }

    #[test]
    fn single_zero_basis() {
        let s = space(&[c(0.5, 0.0)]);
        assert_eq!(s.dim(), 1);
        let z = c(-0.1, 0.4);
        let expected = (3f64.sqrt() / 2.0) / (c(1.0, 0.0) - 0.5 * z);
        assert!((s.basis_at(z)[0] - expected).norm() < 1e-15);
        assert!((s.gram()[(0, 0)].re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn projection_examples() {
        let s = space(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let first = s.basis_samples().column(0).into_owned();
        let p = s.project(&first).unwrap();
        assert!((p.coeffs() - CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).norm() < 1e-13);

        let chi3 = s.grid().sample(|z| z * z * z);
        assert!(s.project(&chi3).unwrap().norm() < 1e-13);

        assert!(matches!(
            s.project(&CVec::zeros(17)),
            Err(Error::LengthMismatch { expected: 2048, found: 17 })
        ));
    }

    #[test]
    fn u_times_polynomial_projects_to_zero() {
        let s = space(&[c(0.4, 0.1), c(-0.3, 0.5), c(0.0, -0.6)]);
        let samples = CVec::from_iterator(
            s.grid_size(),
            s.grid()
                .nodes()
                .iter()
                .zip(s.u_samples().iter())
                .map(|(&z, &u)| u * (c(1.0, -2.0) + c(0.5, 0.0) * z * z)),
        );
        assert!(s.project(&samples).unwrap().norm() < 1e-10);
    }

    #[test]
    fn kernel_examples() {
        let s = space(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let k0 = s.reproducing_kernel(c(0.0, 0.0)).unwrap();
        assert!((k0.coeffs() - CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).norm() < 1e-13);
        assert!(s.reproducing_kernel(c(1.0, 0.0)).is_err());

        // at a zero of u the kernel is the Szegő kernel
        let w = c(0.3, -0.4);
        let s = space(&[w, c(0.1, 0.1)]);
        let k = s.reproducing_kernel(w).unwrap();
        let z = c(0.2, 0.5);
        let szego = c(1.0, 0.0) / (c(1.0, 0.0) - w.conj() * z);
        assert!((k.eval(z) - szego).norm() < 1e-12);
    }

    #[test]
    fn ku0_examples() {
        let s = space(&[c(0.0, 0.0), c(0.0, 0.0)]);
        let q = s.ku0_basis();
        assert_eq!(q.ncols(), 1);
        assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-13);
        assert!(q[(1, 0)].norm() < 1e-13);

        let s = space(&[c(0.0, 0.0)]);
        assert_eq!(s.ku0_basis().ncols(), 0);

        let s = space(&[c(0.5, 0.0), c(-0.5, 0.0)]);
        let q = s.ku0_basis();
        let chi = s.grid().sample(|z| z);
        for j in 0..q.ncols() {
            let g = s.vector(q.column(j).into_owned()).unwrap();
            let shifted = g.samples().component_mul(&chi);
            let back = s.project(&shifted).unwrap().samples();
            assert!(s.grid().norm(&(back - &shifted)) < 1e-9);
        }
    }

    #[test]
    fn embedding_examples() {
        let u = BlaschkeProduct::monomial(2);
        let s = ModelSpace::new(u.clone(), 2048).unwrap();
        let e = s.embed(&BlaschkeProduct::monomial(1)).unwrap();
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-13 && e[(1, 0)].norm() < 1e-13);
        let e = s.embed(&u).unwrap();
        assert!((e - CMat::identity(2, 2)).norm() < 1e-13);
        assert_eq!(
            s.embed(&BlaschkeProduct::factor(c(0.5, 0.0)).unwrap()),
            Err(Error::NotADivisor)
        );
        assert_eq!(s.embed(&BlaschkeProduct::one()).unwrap().ncols(), 0);
    }
}
