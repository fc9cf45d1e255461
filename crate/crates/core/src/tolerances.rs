use serde::Serialize;

/// Every threshold used by the checks, kept in one place so reports can
/// record them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative singular-value threshold for rank and null-space decisions.
    pub rank: f64,
    /// Matrix identities such as `J J* = I` or `E* E = I`.
    pub identity: f64,
    /// Sarason residual below which an operator counts as a TTO.
    pub sarason: f64,
    /// C-symmetry residual accepted for compressions to divisor spaces.
    pub symmetry: f64,
    /// Frobenius distance to `T_u` below which an operator counts as a TTO.
    pub membership: f64,
    /// Projector distance below which two subspaces are declared equal.
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-8,
            identity: 1e-10,
            sarason: 1e-9,
            symmetry: 1e-9,
            membership: 1e-7,
            subspace: 1e-7,
        }
    }
}
