//! Truncated Toeplitz operators on `K_u`.
//!
//! Three independent descriptions of `T_u` live here:
//!
//! * the span of the compressions of `χ^0..χ^{n-1}` and `conj(χ)^1..conj(χ)^{n-1}`
//!   ([`TtoSpace`]), used as ground truth through the Frobenius distance;
//! * Sarason's criterion `Q_A(f) = Q_A(Sf)` on `K_u^0` ([`sarason_residual`]);
//! * the two-symmetry description: `A` is `C_u`-symmetric and
//!   `Q_A(C_{u/b_a} f) = Q_A(f)` on `K_{u/b_a}` ([`ConstraintSpace`]).
//!
//! [`theorem_check`] compares the last one against the first.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::conjugation::Conjugation;
use crate::error::{Error, Result};
use crate::inner::BlaschkeProduct;
use crate::linalg::{self, CMat, CVec};
use crate::modelspace::{ModelSpace, ModelVector};
use crate::tolerances::Tolerances;

/// A linear operator on `K_u`, as a matrix in the basis of its space.
#[derive(Debug, Clone)]
pub struct ModelOperator<'a> {
    matrix: CMat,
    space: &'a ModelSpace,
}

impl<'a> ModelOperator<'a> {
    pub fn new(space: &'a ModelSpace, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { matrix, space })
    }

    /// `A f = P_{K_u}(φ f)`: `A_{kj} = ⟨φ γ_j, γ_k⟩` on the grid.
    pub fn from_symbol(space: &'a ModelSpace, symbol: &CVec) -> Result<Self> {
        if symbol.len() != space.grid_size() {
            return Err(Error::LengthMismatch {
                expected: space.grid_size(),
                found: symbol.len(),
            });
        }
        let g = space.basis_samples();
        let mut weighted = g.clone();
        for (mut row, &phi) in weighted.row_iter_mut().zip(symbol.iter()) {
            row *= phi;
        }
        Ok(Self {
            matrix: space.coordinates_of_columns(&weighted),
            space,
        })
    }

    /// The compressed shift `S_u`, the TTO with symbol `χ`.
    pub fn compressed_shift(space: &'a ModelSpace) -> Self {
        let chi = space.grid().sample(|z| z);
        Self::from_symbol(space, &chi).expect("symbol sampled on the space grid")
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn space(&self) -> &'a ModelSpace {
        self.space
    }

    pub fn apply(&self, f: &ModelVector<'_>) -> Result<ModelVector<'a>> {
        if !self.space.same_as(f.space()) {
            return Err(Error::SpaceMismatch);
        }
        self.space.vector(&self.matrix * f.coeffs())
    }

    /// `Q_A(f) = ⟨A f, f⟩`.
    pub fn quadratic_form(&self, f: &ModelVector<'_>) -> Result<Complex64> {
        self.apply(f)?.inner(f)
    }

    /// `P_v A|K_v` on the divisor space `v_space`.
    pub fn compress<'b>(&self, v_space: &'b ModelSpace) -> Result<ModelOperator<'b>> {
        let e = self.space.embedding(v_space)?;
        Ok(ModelOperator {
            matrix: e.adjoint() * &self.matrix * e,
            space: v_space,
        })
    }
}

/// `max_{i,j} |⟨A S g_i, S g_j⟩ - ⟨A g_i, g_j⟩|` over an orthonormal basis of
/// `K_u^0`. Zero exactly on `T_u`.
pub fn sarason_residual(op: &ModelOperator<'_>) -> f64 {
    let space = op.space();
    let g = space.ku0_basis();
    if g.ncols() == 0 {
        return 0.0;
    }
    let shift = ModelOperator::compressed_shift(space);
    let sg = shift.matrix() * &g;
    let a = op.matrix();
    let lhs = sg.adjoint() * a * &sg;
    let rhs = g.adjoint() * a * &g;
    linalg::max_abs(&(lhs - rhs))
}

/// `T_u` as the span of a fixed family of symbol compressions.
#[derive(Debug, Clone)]
pub struct TtoSpace<'a> {
    space: &'a ModelSpace,
    spanning: Vec<CMat>,
    /// Orthonormal basis of `vec(T_u)` (columns of length `n²`).
    basis: CMat,
}

impl<'a> TtoSpace<'a> {
    pub fn new(space: &'a ModelSpace, tol: &Tolerances) -> Result<Self> {
        let n = space.dim();
        let grid = space.grid();
        let mut spanning = Vec::with_capacity(2 * n - 1);
        for k in 0..n as i32 {
            let phi = grid.sample(|z| z.powi(k));
            spanning.push(ModelOperator::from_symbol(space, &phi)?.into_matrix());
        }
        for k in 1..n as i32 {
            let phi = grid.sample(|z| z.conj().powi(k));
            spanning.push(ModelOperator::from_symbol(space, &phi)?.into_matrix());
        }
        let mut stacked = CMat::zeros(n * n, spanning.len());
        for (j, m) in spanning.iter().enumerate() {
            stacked.set_column(j, &linalg::vectorize(m));
        }
        let basis = linalg::orthonormal_range(&stacked, tol.rank)?;
        Ok(Self {
            space,
            spanning,
            basis,
        })
    }

    pub fn space(&self) -> &'a ModelSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn spanning_family(&self) -> &[CMat] {
        &self.spanning
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// The `k`-th orthonormal basis element as an operator.
    pub fn element(&self, k: usize) -> ModelOperator<'a> {
        ModelOperator {
            matrix: linalg::unvectorize(&self.basis.column(k).into_owned(), self.space.dim()),
            space: self.space,
        }
    }

    /// Linear combination of the orthonormal basis.
    pub fn combination(&self, coeffs: &CVec) -> ModelOperator<'a> {
        ModelOperator {
            matrix: linalg::unvectorize(&(&self.basis * coeffs), self.space.dim()),
            space: self.space,
        }
    }

    /// Frobenius-orthogonal projector `Π` onto `vec(T_u)`.
    pub fn projector(&self) -> CMat {
        linalg::projector(&self.basis)
    }

    pub fn project(&self, op: &ModelOperator<'_>) -> Result<ModelOperator<'a>> {
        self.check(op)?;
        let x = linalg::vectorize(op.matrix());
        let p = &self.basis * self.basis.ad_mul(&x);
        Ok(ModelOperator {
            matrix: linalg::unvectorize(&p, self.space.dim()),
            space: self.space,
        })
    }

    /// `‖A - Π(A)‖_F`.
    pub fn membership_distance(&self, op: &ModelOperator<'_>) -> Result<f64> {
        self.check(op)?;
        Ok(linalg::distance_to_span(&self.basis, &linalg::vectorize(op.matrix())))
    }

    fn check(&self, op: &ModelOperator<'_>) -> Result<()> {
        if op.matrix().nrows() != self.space.dim() {
            return Err(Error::LengthMismatch {
                expected: self.space.dim(),
                found: op.matrix().nrows(),
            });
        }
        if !self.space.same_as(op.space()) {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }
}

/// Operators satisfying both symmetry conditions for a zero `a` of `u`.
#[derive(Debug, Clone)]
pub struct ConstraintSpace {
    /// Orthonormal basis of `vec(S)` (columns of length `n²`).
    pub basis: CMat,
    /// Dimension of the solution set over the reals.
    pub real_nullity: usize,
    /// Number of real equations in the assembled system.
    pub equations: usize,
    /// Smallest kept over largest discarded singular value.
    pub gap: f64,
}

impl ConstraintSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// `u(a) = 0` to 1e-9; returns the nearest stored zero so that divisor
/// matching works at [`crate::inner::ZERO_MATCH_TOL`].
pub(crate) fn locate_zero(u: &BlaschkeProduct, a: Complex64) -> Result<Complex64> {
    let nearest = u
        .zeros()
        .iter()
        .copied()
        .min_by(|x, y| (*x - a).norm().total_cmp(&(*y - a).norm()));
    match nearest {
        Some(z) if a.norm() < 1.0 && u.eval(a).norm() <= 1e-9 => Ok(z),
        _ => Err(Error::NotAZero { re: a.re, im: a.im }),
    }
}

/// Solves for `S = {A : A* = C_u A C_u, and Q_A(C_{u/b_a} f) = Q_A(f) for f ∈ K_{u/b_a}}`.
///
/// Both families are assembled as real-linear equations on the `2n²` real
/// parameters `(Re vec A, Im vec A)`; the null space comes from an SVD with the
/// gap rule of [`linalg::gapped_rank`].
pub fn symmetry_constraint_space(
    space: &ModelSpace,
    a: Complex64,
    tol: &Tolerances,
) -> Result<ConstraintSpace> {
    let u = space.u();
    let a = locate_zero(u, a)?;
    let n = space.dim();
    let cu = Conjugation::new(space);

    // K_{u/b_a} inside K_u, with its own conjugation carried over
    let w = u.quotient(&BlaschkeProduct::factor(a)?)?;
    let (f, cf) = if w.degree() == 0 {
        (CMat::zeros(n, 0), CMat::zeros(n, 0))
    } else {
        let w_space = ModelSpace::new(w, space.grid_size())?;
        let e = space.embedding(&w_space)?;
        let cw = Conjugation::new(&w_space);
        let cf = &e * cw.matrix();
        (e, cf)
    };
    let m = f.ncols();

    let residuals = |x: &CMat| -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n * n + m * m);
        let r1 = x.adjoint() - cu.sandwich(x);
        out.extend(r1.iter().copied());
        if m > 0 {
            let r2 = (cf.adjoint() * x * &cf).transpose() - f.adjoint() * x * &f;
            out.extend(r2.iter().copied());
        }
        out
    };

    let unknowns = 2 * n * n;
    let equations = 2 * (n * n + m * m);
    let mut system = DMatrix::<f64>::zeros(equations, unknowns);
    for p in 0..unknowns {
        let mut x = CMat::zeros(n, n);
        let idx = p % (n * n);
        x[(idx % n, idx / n)] = if p < n * n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let r = residuals(&x);
        for (q, z) in r.iter().enumerate() {
            system[(q, p)] = z.re;
            system[(r.len() + q, p)] = z.im;
        }
    }

    let ns = linalg::real_null_space(&system, tol.rank)?;
    let real_nullity = ns.basis.ncols();
    if real_nullity % 2 != 0 {
        return Err(Error::OddNullity(real_nullity));
    }
    let mut candidates = CMat::zeros(n * n, real_nullity);
    for k in 0..real_nullity {
        let col = ns.basis.column(k);
        for i in 0..n * n {
            candidates[(i, k)] = Complex64::new(col[i], col[n * n + i]);
        }
    }
    let basis = linalg::orthonormal_range(&candidates, tol.rank)?;
    if basis.ncols() * 2 != real_nullity {
        return Err(Error::OddNullity(real_nullity));
    }
    Ok(ConstraintSpace {
        basis,
        real_nullity,
        equations,
        gap: linalg::spectral_gap(&ns.singular_values, ns.rank),
    })
}

/// Outcome of comparing the two-symmetry space with `T_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremReport {
    #[serde(rename = "dim_S")]
    pub dim_s: usize,
    #[serde(rename = "dim_T")]
    pub dim_t: usize,
    pub projector_distance: f64,
    /// Largest Sarason residual over the orthonormal basis of `S`.
    pub sarason_max_residual: f64,
    /// Spectral gap of the constraint system (kept/discarded).
    pub constraint_gap: f64,
}

impl TheoremReport {
    pub fn passes(&self, n: usize, tol: &Tolerances) -> bool {
        self.dim_s == 2 * n - 1
            && self.dim_t == 2 * n - 1
            && self.projector_distance < tol.subspace
            && self.sarason_max_residual < tol.sarason
    }
}

/// Builds `S` for the zero `a` and `T_u`, and compares them.
pub fn theorem_check(space: &ModelSpace, a: Complex64, tol: &Tolerances) -> Result<TheoremReport> {
    let s = symmetry_constraint_space(space, a, tol)?;
    let t = TtoSpace::new(space, tol)?;
    let n = space.dim();
    let sarason_max_residual = (0..s.dim())
        .map(|k| {
            let op = ModelOperator {
                matrix: linalg::unvectorize(&s.basis.column(k).into_owned(), n),
                space,
            };
            sarason_residual(&op)
        })
        .fold(0.0, f64::max);
    Ok(TheoremReport {
        dim_s: s.dim(),
        dim_t: t.dim(),
        projector_distance: linalg::projector_distance(&s.basis, t.basis()),
        sarason_max_residual,
        constraint_gap: s.gap,
    })
}

/// Residuals of both symmetry conditions for a given operator, for the
/// one-sided check `T_u ⊂ S`.
pub fn symmetry_residuals(op: &ModelOperator<'_>, a: Complex64) -> Result<(f64, f64)> {
    let space = op.space();
    let u = space.u();
    let a = locate_zero(u, a)?;
    let cu = Conjugation::new(space);
    let x = op.matrix();
    let r1 = cu.symmetry_residual(x);
    let w = u.quotient(&BlaschkeProduct::factor(a)?)?;
    if w.degree() == 0 {
        return Ok((r1, 0.0));
    }
    let w_space = ModelSpace::new(w, space.grid_size())?;
    let e = space.embedding(&w_space)?;
    let cf = &e * Conjugation::new(&w_space).matrix();
    let r2 = (cf.adjoint() * x * &cf).transpose() - e.adjoint() * x * &e;
    Ok((r1, linalg::max_abs(&r2)))
}
