//! The unitary `ω_a : K_u → K_{u∘b_a}`,
//! `ω_a f = √(1-|a|²)/(1 - conj(a) χ) · f∘b_a`.

use num_complex::Complex64;
use serde::Serialize;

use crate::conjugation::Conjugation;
use crate::error::{Error, Result};
use crate::inner::{blaschke_factor, BlaschkeProduct, ZERO_GUARD};
use crate::linalg::{self, CMat};
use crate::modelspace::ModelSpace;
use crate::tolerances::Tolerances;
use crate::tto::TtoSpace;

/// `u∘b_a` as a Blaschke product.
///
/// Each factor satisfies `b_α∘b_a = c · b_β` with `β = b_{-a}(α)` and the
/// unimodular constant `c = (1 + α conj(a)) / (1 + conj(α) a)`; the constants
/// are collected into the phase of the result.
pub fn compose_with_automorphism(u: &BlaschkeProduct, a: Complex64) -> Result<BlaschkeProduct> {
    check_parameter(a)?;
    let one = Complex64::new(1.0, 0.0);
    let mut phase = u.phase();
    let zeros = u
        .zeros()
        .iter()
        .map(|&alpha| {
            phase *= (one + alpha * a.conj()) / (one + alpha.conj() * a);
            blaschke_factor(-a, alpha)
        })
        .collect();
    BlaschkeProduct::with_phase(zeros, phase)
}

fn check_parameter(a: Complex64) -> Result<()> {
    if a.norm().is_nan() || a.norm() >= 1.0 - ZERO_GUARD {
        return Err(Error::OutsideDisc { re: a.re, im: a.im });
    }
    Ok(())
}

fn same_zero_multiset(x: &[Complex64], y: &[Complex64], tol: f64) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut used = vec![false; y.len()];
    x.iter().all(|p| {
        match y
            .iter()
            .enumerate()
            .find(|(i, q)| !used[*i] && (**q - *p).norm() <= tol)
        {
            Some((i, _)) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

/// `W_{kj} = ⟨ω_a γ^u_j, γ^{u∘b_a}_k⟩`, computed on the target grid.
pub fn omega_matrix(space_u: &ModelSpace, a: Complex64, target: &ModelSpace) -> Result<CMat> {
    check_parameter(a)?;
    let expected = compose_with_automorphism(space_u.u(), a)?;
    if target.grid_size() != space_u.grid_size()
        || !same_zero_multiset(expected.zeros(), target.u().zeros(), 1e-9)
    {
        return Err(Error::TargetMismatch);
    }
    let one = Complex64::new(1.0, 0.0);
    let scale = (1.0 - a.norm_sqr()).sqrt();
    let n = space_u.dim();
    let grid = target.grid();
    let mut images = CMat::zeros(grid.size(), n);
    for (m, &z) in grid.nodes().iter().enumerate() {
        let prefactor = scale / (one - a.conj() * z);
        let values = space_u.basis_at(blaschke_factor(a, z));
        for j in 0..n {
            images[(m, j)] = prefactor * values[j];
        }
    }
    Ok(target.coordinates_of_columns(&images))
}

/// The three residuals of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrofootReport {
    /// `‖W* W - I‖_F`.
    pub unitarity: f64,
    /// `‖W J_u - J_{u∘b_a} conj(W)‖_F`.
    pub intertwining: f64,
    /// Projector distance between `W T_u W*` and `T_{u∘b_a}`.
    pub transport: f64,
    pub dim_source: usize,
    pub dim_target: usize,
}

impl CrofootReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.unitarity < tol
            && self.intertwining < tol
            && self.transport < tol
            && self.dim_source == self.dim_target
    }
}

/// `ω_a` for one `(u, a)`, with the target space built alongside.
#[derive(Debug, Clone)]
pub struct Crofoot<'a> {
    source: &'a ModelSpace,
    target: ModelSpace,
    w: CMat,
}

impl<'a> Crofoot<'a> {
    pub fn new(source: &'a ModelSpace, a: Complex64) -> Result<Self> {
        let composed = compose_with_automorphism(source.u(), a)?;
        let target = ModelSpace::new(composed, source.grid_size())?;
        let w = omega_matrix(source, a, &target)?;
        Ok(Self { source, target, w })
    }

    pub fn matrix(&self) -> &CMat {
        &self.w
    }

    pub fn target(&self) -> &ModelSpace {
        &self.target
    }

    pub fn unitarity_residual(&self) -> f64 {
        linalg::isometry_defect(&self.w)
    }

    pub fn intertwining_residual(&self) -> f64 {
        let ju = Conjugation::new(self.source);
        let jt = Conjugation::new(&self.target);
        (&self.w * ju.matrix() - jt.matrix() * linalg::conj(&self.w)).norm()
    }

    /// Returns the projector distance and both dimensions.
    pub fn transport_residual(&self, tol: &Tolerances) -> Result<(f64, usize, usize)> {
        let ts = TtoSpace::new(self.source, tol)?;
        let tt = TtoSpace::new(&self.target, tol)?;
        let n = self.source.dim();
        let mut moved = CMat::zeros(n * n, ts.dim());
        for k in 0..ts.dim() {
            let t = ts.element(k);
            let image = &self.w * t.matrix() * self.w.adjoint();
            moved.set_column(k, &linalg::vectorize(&image));
        }
        let q = linalg::orthonormal_range(&moved, tol.rank)?;
        Ok((linalg::projector_distance(&q, tt.basis()), ts.dim(), tt.dim()))
    }

    pub fn report(&self, tol: &Tolerances) -> Result<CrofootReport> {
        let (transport, dim_source, dim_target) = self.transport_residual(tol)?;
        Ok(CrofootReport {
            unitarity: self.unitarity_residual(),
            intertwining: self.intertwining_residual(),
            transport,
            dim_source,
            dim_target,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelspace::DEFAULT_GRID_SIZE;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn composition_matches_pointwise() {
        let u = BlaschkeProduct::new(vec![c(0.2, 0.3), c(-0.5, 0.1), c(0.0, -0.7)]).unwrap();
        let a = c(0.3, -0.4);
        let v = compose_with_automorphism(&u, a).unwrap();
        for z in [c(0.0, 0.0), c(0.5, 0.5), c(-0.9, 0.1), Complex64::from_polar(1.0, 2.0)] {
            assert!((v.eval(z) - u.eval(blaschke_factor(a, z))).norm() < 1e-13);
        }
    }

    #[test]
    fn identity_at_origin() {
        let s = ModelSpace::new(
            BlaschkeProduct::new(vec![c(0.2, 0.3), c(-0.5, 0.1)]).unwrap(),
            DEFAULT_GRID_SIZE,
        )
        .unwrap();
        let om = Crofoot::new(&s, c(0.0, 0.0)).unwrap();
        assert!((om.matrix() - CMat::identity(2, 2)).norm() < 1e-12);
        let r = om.report(&Tolerances::default()).unwrap();
        assert!(r.intertwining < 1e-12 && r.transport < 1e-10);
    }

    #[test]
    fn one_dimensional_case() {
        let s = ModelSpace::new(BlaschkeProduct::monomial(1), DEFAULT_GRID_SIZE).unwrap();
        let om = Crofoot::new(&s, c(0.5, 0.0)).unwrap();
        assert!((om.target().u().zeros()[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((om.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_target() {
        let s = ModelSpace::new(BlaschkeProduct::monomial(2), DEFAULT_GRID_SIZE).unwrap();
        assert_eq!(
            omega_matrix(&s, c(0.3, 0.0), &s).unwrap_err(),
            Error::TargetMismatch
        );
    }
}
