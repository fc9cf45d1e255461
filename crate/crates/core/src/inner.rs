//! Inner functions: finite Blaschke products and atomic singular inner
//! functions.
//!
//! A [`BlaschkeProduct`] keeps its zeros in canonical order: sorted by
//! modulus, then by angle in `[0, 2π)`, ties broken by insertion order. The
//! order fixes the basis of the associated model space, so divisor chains and
//! "prefix" divisors are reproducible.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Zeros must satisfy `|a| < 1 - ZERO_GUARD`.
pub const ZERO_GUARD: f64 = 1e-9;

/// Tolerance used when matching zeros between two products.
pub const ZERO_MATCH_TOL: f64 = 1e-12;

/// Default exclusion radius around atoms for boundary evaluation.
pub const DEFAULT_ATOM_CUTOFF: f64 = 1e-6;

fn angle_of(z: Complex64) -> f64 {
    let t = z.im.atan2(z.re);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

fn canonical_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| angle_of(*a).total_cmp(&angle_of(*b)))
}

/// The Blaschke factor `b_a(z) = (z - a) / (1 - conj(a) z)`.
#[inline]
pub fn blaschke_factor(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// A finite Blaschke product `c · Π b_{a_k}` with unimodular constant `c`.
///
/// The constant defaults to 1. It only matters for evaluation and for the
/// conjugation `C_u`; the model space `K_u` does not depend on it.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    phase: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        Self::with_phase(zeros, Complex64::new(1.0, 0.0))
    }

    pub fn with_phase(mut zeros: Vec<Complex64>, phase: Complex64) -> Result<Self> {
        for (index, z) in zeros.iter().enumerate() {
            let modulus = z.norm();
            if !modulus.is_finite() || modulus >= 1.0 - ZERO_GUARD {
                return Err(Error::ZeroTooCloseToBoundary {
                    index,
                    modulus,
                    guard: ZERO_GUARD,
                });
            }
        }
        let r = phase.norm();
        if !r.is_finite() || (r - 1.0).abs() > 1e-12 {
            return Err(Error::Parse {
                field: "phase".into(),
                message: format!("must be unimodular, has modulus {r}"),
            });
        }
        // stable: equal keys keep insertion order
        zeros.sort_by(canonical_cmp);
        Ok(Self {
            zeros,
            phase: phase / r,
        })
    }

    /// The constant function 1.
    pub fn one() -> Self {
        Self {
            zeros: Vec::new(),
            phase: Complex64::new(1.0, 0.0),
        }
    }

    /// `χ^k`, the product with a `k`-fold zero at the origin.
    pub fn monomial(k: usize) -> Self {
        Self {
            zeros: vec![Complex64::new(0.0, 0.0); k],
            phase: Complex64::new(1.0, 0.0),
        }
    }

    /// The single factor `b_a`.
    pub fn factor(a: Complex64) -> Result<Self> {
        Self::new(vec![a])
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.phase, |acc, &a| acc * blaschke_factor(a, z))
    }

    /// Whether the zero multiset of `self` is contained in that of `u`.
    pub fn divides(&self, u: &BlaschkeProduct) -> bool {
        self.match_in(u).is_some()
    }

    /// Indices into `u.zeros` matched by the zeros of `self`, if every zero
    /// finds a distinct partner.
    fn match_in(&self, u: &BlaschkeProduct) -> Option<Vec<usize>> {
        let mut used = vec![false; u.zeros.len()];
        let mut picked = Vec::with_capacity(self.zeros.len());
        for v in &self.zeros {
            let hit = u
                .zeros
                .iter()
                .enumerate()
                .find(|(i, a)| !used[*i] && (**a - *v).norm() <= ZERO_MATCH_TOL)
                .map(|(i, _)| i)?;
            used[hit] = true;
            picked.push(hit);
        }
        Some(picked)
    }

    /// `self / v`: the zeros of `self` with those of `v` removed.
    pub fn quotient(&self, v: &BlaschkeProduct) -> Result<BlaschkeProduct> {
        let picked = v.match_in(self).ok_or(Error::NotADivisor)?;
        let zeros = self
            .zeros
            .iter()
            .enumerate()
            .filter(|(i, _)| !picked.contains(i))
            .map(|(_, a)| *a)
            .collect();
        // already canonical: a subsequence of a sorted list
        Ok(BlaschkeProduct {
            zeros,
            phase: self.phase / v.phase,
        })
    }

    /// Every divisor with unit constant, one per distinct zero sub-multiset,
    /// including the constant 1 and `self` (with its zeros).
    pub fn divisors(&self) -> Vec<BlaschkeProduct> {
        // group equal zeros so sub-multisets are enumerated without repeats
        let mut groups: Vec<(Complex64, usize)> = Vec::new();
        for &a in &self.zeros {
            match groups
                .iter_mut()
                .find(|(b, _)| (*b - a).norm() <= ZERO_MATCH_TOL)
            {
                Some(g) => g.1 += 1,
                None => groups.push((a, 1)),
            }
        }
        let mut out = vec![Vec::new()];
        for (a, mult) in groups {
            let mut next = Vec::with_capacity(out.len() * (mult + 1));
            for base in &out {
                for k in 0..=mult {
                    let mut z: Vec<Complex64> = base.clone();
                    z.extend(std::iter::repeat_n(a, k));
                    next.push(z);
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|mut zeros| {
                zeros.sort_by(canonical_cmp);
                BlaschkeProduct {
                    zeros,
                    phase: Complex64::new(1.0, 0.0),
                }
            })
            .collect()
    }
}

/// One atom of an [`AtomicMeasure`]: a point mass `weight` at `e^{i angle}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

/// Angular distance on the circle, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// A finite positive atomic measure on the circle, in normalized arclength
/// units (the whole circle has length 1).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    total_mass: f64,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for (i, atom) in atoms.into_iter().enumerate() {
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atoms[{i}].weight must be positive and finite, got {}",
                    atom.weight
                )));
            }
            if !atom.angle.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atoms[{i}].angle must be finite"
                )));
            }
            let angle = atom.angle.rem_euclid(TAU);
            if let Some(j) = out
                .iter()
                .position(|b| angular_distance(b.angle, angle) < 1e-12)
            {
                return Err(Error::InvalidMeasure(format!(
                    "atoms[{i}] duplicates the angle of atoms[{j}]"
                )));
            }
            out.push(Atom {
                angle,
                weight: atom.weight,
            });
        }
        let total_mass = out.iter().map(|a| a.weight).sum();
        Ok(Self {
            atoms: out,
            total_mass,
        })
    }

    pub fn empty() -> Self {
        Self {
            atoms: Vec::new(),
            total_mass: 0.0,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Weight of the atom at `angle`, if there is one (matched to 1e-12).
    pub fn atom_at(&self, angle: f64) -> Option<Atom> {
        self.atoms
            .iter()
            .copied()
            .find(|a| angular_distance(a.angle, angle) < 1e-12)
    }

    /// Mass of the closed arc of angular half-width `half_width` centred at
    /// `center`.
    pub fn arc_mass(&self, center: f64, half_width: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| angular_distance(a.angle, center) <= half_width)
            .map(|a| a.weight)
            .sum()
    }
}

/// The singular inner function `e_ν` of an atomic measure `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularInner {
    measure: AtomicMeasure,
    atom_cutoff: f64,
}

impl SingularInner {
    pub fn new(measure: AtomicMeasure) -> Self {
        Self {
            measure,
            atom_cutoff: DEFAULT_ATOM_CUTOFF,
        }
    }

    pub fn with_atom_cutoff(mut self, cutoff: f64) -> Self {
        self.atom_cutoff = cutoff;
        self
    }

    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }

    /// Herglotz integral `Σ w_j (ζ_j + z)/(ζ_j - z)`, written as
    /// `ν(T) + Σ 2 w_j z / (ζ_j - z)` so that `z = 0` gives `ν(T)` exactly.
    fn herglotz(&self, z: Complex64) -> Complex64 {
        let tail: Complex64 = self
            .measure
            .atoms
            .iter()
            .map(|a| {
                let zeta = Complex64::from_polar(1.0, a.angle);
                2.0 * a.weight * z / (zeta - z)
            })
            .sum();
        Complex64::new(self.measure.total_mass, 0.0) + tail
    }

    /// Evaluation inside the open disc.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm().is_nan() || z.norm() >= 1.0 {
            return Err(Error::OutsideDisc { re: z.re, im: z.im });
        }
        Ok((-self.herglotz(z)).exp())
    }

    /// Boundary value at `e^{iθ}`. For `ζ = e^{iθ}`,
    /// `(ζ_j + ζ)/(ζ_j - ζ) = -i cot((θ_j - θ)/2)`, so the value is
    /// `exp(i Σ w_j cot((θ_j - θ)/2))`.
    pub fn boundary_eval(&self, theta: f64) -> Result<Complex64> {
        let mut phase = 0.0;
        for a in &self.measure.atoms {
            if angular_distance(a.angle, theta) <= self.atom_cutoff {
                return Err(Error::NearAtom {
                    angle: theta,
                    atom: a.angle,
                    cutoff: self.atom_cutoff,
                });
            }
            phase += a.weight / (0.5 * (a.angle - theta)).tan();
        }
        Ok(Complex64::from_polar(1.0, phase))
    }
}

/// An inner function as read from JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerFunction {
    Blaschke(BlaschkeProduct),
    Singular(SingularInner),
}

impl InnerFunction {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            InnerFunction::Blaschke(b) => {
                if z.norm() > 1.0 {
                    return Err(Error::OutsideDisc { re: z.re, im: z.im });
                }
                Ok(b.eval(z))
            }
            InnerFunction::Singular(s) => s.eval(z),
        }
    }

    pub fn as_blaschke(&self) -> Option<&BlaschkeProduct> {
        match self {
            InnerFunction::Blaschke(b) => Some(b),
            InnerFunction::Singular(_) => None,
        }
    }

    /// Parses the JSON wire form. Errors name the offending field, e.g.
    /// `zeros[1].im`.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            field: "<root>".into(),
            message: e.to_string(),
        })?;
        let kind = value
            .as_object_mut()
            .and_then(|o| o.remove("type"))
            .ok_or_else(|| Error::Parse {
                field: "type".into(),
                message: "missing".into(),
            })?;
        let spec = match kind.as_str() {
            Some("blaschke") => {
                let b: BlaschkeJson = from_value(value)?;
                InnerSpec::Blaschke {
                    zeros: b.zeros,
                    phase: b.phase,
                }
            }
            Some("singular") => {
                let s: SingularJson = from_value(value)?;
                InnerSpec::Singular { atoms: s.atoms }
            }
            _ => {
                return Err(Error::Parse {
                    field: "type".into(),
                    message: format!("expected \"blaschke\" or \"singular\", got {kind}"),
                })
            }
        };
        spec.try_into()
    }

    pub fn to_spec(&self) -> InnerSpec {
        match self {
            InnerFunction::Blaschke(b) => InnerSpec::Blaschke {
                zeros: b.zeros.iter().map(|&z| z.into()).collect(),
                phase: (b.phase != Complex64::new(1.0, 0.0)).then(|| b.phase.into()),
            },
            InnerFunction::Singular(s) => InnerSpec::Singular {
                atoms: s.measure.atoms.clone(),
            },
        }
    }
}

/// `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let message = e.inner().to_string();
        let field = match message.strip_prefix("missing field `") {
            Some(rest) if path == "." => rest.trim_end_matches('`').to_string(),
            _ if path == "." => "<root>".to_string(),
            _ => path,
        };
        Error::Parse { field, message }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlaschkeJson {
    zeros: Vec<ComplexJson>,
    #[serde(default)]
    phase: Option<ComplexJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingularJson {
    atoms: Vec<Atom>,
}

/// Wire form of an inner function.
///
/// ```json
/// {"type":"blaschke","zeros":[{"re":0.5,"im":0.0}]}
/// {"type":"singular","atoms":[{"angle":0.0,"weight":1.0}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InnerSpec {
    Blaschke {
        zeros: Vec<ComplexJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<ComplexJson>,
    },
    Singular {
        atoms: Vec<Atom>,
    },
}

impl TryFrom<InnerSpec> for InnerFunction {
    type Error = Error;

    fn try_from(spec: InnerSpec) -> Result<Self> {
        match spec {
            InnerSpec::Blaschke { zeros, phase } => {
                let zeros: Vec<Complex64> = zeros.into_iter().map(Into::into).collect();
                let phase = phase.map_or(Complex64::new(1.0, 0.0), Into::into);
                BlaschkeProduct::with_phase(zeros, phase)
                    .map(InnerFunction::Blaschke)
                    .map_err(|e| match e {
                        Error::ZeroTooCloseToBoundary { index, modulus, .. } => Error::Parse {
                            field: format!("zeros[{index}]"),
                            message: format!("modulus {modulus} is not below 1 - {ZERO_GUARD}"),
                        },
                        other => other,
                    })
            }
            InnerSpec::Singular { atoms } => AtomicMeasure::new(atoms)
                .map(|m| InnerFunction::Singular(SingularInner::new(m)))
                .map_err(|e| match e {
                    Error::InvalidMeasure(msg) => {
                        let field = msg.split_whitespace().next().unwrap_or("atoms").to_string();
                        Error::Parse {
                            field,
                            message: msg,
                        }
                    }
                    other => other,
                }),
        }
    }
}
