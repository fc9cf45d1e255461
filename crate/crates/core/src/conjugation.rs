//! The conjugation `C_u f = u · conj(χ f)` on `K_u`.
//!
//! `C_u` is antilinear, so it is stored as the matrix `J` with
//! `C_u x = J · conj(x)` in basis coordinates. `C_u` is an isometric
//! involution exactly when `J` is unitary and symmetric.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::inner::BlaschkeProduct;
use crate::linalg::{self, CMat, CVec};
use crate::modelspace::{ModelSpace, ModelVector, QuadratureGrid};
use crate::random;
use crate::tto::ModelOperator;

/// Grid form of `g ↦ w · conj(χ g)` for an inner function `w` sampled on
/// the same grid.
pub fn conjugate_samples(grid: &QuadratureGrid, w: &CVec, g: &CVec) -> CVec {
    CVec::from_iterator(
        grid.size(),
        grid.nodes()
            .iter()
            .zip(w.iter().zip(g.iter()))
            .map(|(&z, (&wz, &gz))| wz * (z * gz).conj()),
    )
}

#[derive(Debug, Clone)]
pub struct Conjugation<'a> {
    j: CMat,
    space: &'a ModelSpace,
}

impl<'a> Conjugation<'a> {
    /// `J_{kj} = ⟨C_u γ_j, γ_k⟩`, with `C_u γ_j` formed on the grid.
    pub fn new(space: &'a ModelSpace) -> Self {
        let grid = space.grid();
        let basis = space.basis_samples();
        let mut images = CMat::zeros(grid.size(), space.dim());
        for k in 0..space.dim() {
            let col = basis.column(k).into_owned();
            images.set_column(k, &conjugate_samples(grid, space.u_samples(), &col));
        }
        Self {
            j: space.coordinates_of_columns(&images),
            space,
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.j
    }

    pub fn space(&self) -> &'a ModelSpace {
        self.space
    }

    pub fn apply_coeffs(&self, x: &CVec) -> CVec {
        &self.j * linalg::conj_vec(x)
    }

    pub fn apply(&self, f: &ModelVector<'_>) -> Result<ModelVector<'a>> {
        if !self.space.same_as(f.space()) {
            return Err(Error::SpaceMismatch);
        }
        self.space.vector(self.apply_coeffs(f.coeffs()))
    }

    /// `‖J J* - I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.j)
    }

    /// `‖J - Jᵀ‖_F`.
    pub fn symmetry_defect(&self) -> f64 {
        (&self.j - self.j.transpose()).norm()
    }

    /// `‖J conj(J) - I‖_F`, the matrix form of `C ∘ C = I`.
    pub fn involution_defect(&self) -> f64 {
        let n = self.j.nrows();
        (&self.j * linalg::conj(&self.j) - CMat::identity(n, n)).norm()
    }

    /// Matrix of `C A C` for a linear `A`: `J conj(A) conj(J)`.
    pub fn sandwich(&self, a: &CMat) -> CMat {
        &self.j * linalg::conj(a) * linalg::conj(&self.j)
    }

    /// `‖A* - J conj(A) conj(J)‖_F`.
    pub fn symmetry_residual(&self, a: &CMat) -> f64 {
        (a.adjoint() - self.sandwich(a)).norm()
    }

    /// `(A + C A* C) / 2`, which is always `C`-symmetric.
    pub fn symmetrize(&self, a: &CMat) -> CMat {
        (a + self.sandwich(&a.adjoint())) * Complex64::new(0.5, 0.0)
    }

    /// Matrix identity test, cross-checked through the quadratic form on
    /// ten seeded random vectors.
    pub fn is_symmetric(&self, op: &ModelOperator<'_>, tol: f64) -> Result<SymmetryCheck> {
        if op.matrix().nrows() != self.j.nrows() || op.matrix().ncols() != self.j.ncols() {
            return Err(Error::LengthMismatch {
                expected: self.j.nrows(),
                found: op.matrix().nrows(),
            });
        }
        if !self.space.same_as(op.space()) {
            return Err(Error::SpaceMismatch);
        }
        let a = op.matrix();
        let residual = self.symmetry_residual(a);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut form_residual: f64 = 0.0;
        for _ in 0..10 {
            let x = random::complex_gaussian_vector(&mut rng, a.nrows());
            let cx = self.apply_coeffs(&x);
            let q = x.dotc(&(a * &x));
            let qc = cx.dotc(&(a * &cx));
            form_residual = form_residual.max((q - qc).norm() / x.norm_squared().max(1e-300));
        }
        Ok(SymmetryCheck {
            residual,
            form_residual,
            symmetric: residual <= tol,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SymmetryCheck {
    /// `‖A* - C A C‖_F`.
    pub residual: f64,
    /// Largest `|Q_A(f) - Q_A(Cf)| / ‖f‖²` over the random probes.
    pub form_residual: f64,
    pub symmetric: bool,
}

/// Largest pointwise deviation of `C_u(C_{u/v} f)` from `v f` on the grid.
pub fn lemma1_residual(
    grid: &QuadratureGrid,
    u: &BlaschkeProduct,
    v: &BlaschkeProduct,
    f: &CVec,
) -> Result<f64> {
    if f.len() != grid.size() {
        return Err(Error::LengthMismatch {
            expected: grid.size(),
            found: f.len(),
        });
    }
    let w = u.quotient(v)?;
    let u_s = grid.sample(|z| u.eval(z));
    let w_s = grid.sample(|z| w.eval(z));
    let v_s = grid.sample(|z| v.eval(z));
    let lhs = conjugate_samples(grid, &u_s, &conjugate_samples(grid, &w_s, f));
    Ok((lhs - v_s.component_mul(f))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}
