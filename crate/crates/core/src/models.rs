//! The model potentials shipped with the crate: bundled spec files and
//! builders for the delta models.

use crate::error::{Result, ScatterError};
use crate::linalg::RMat;
use crate::potential::{PotentialSpec, ValidatedPotential};

/// Names and contents of the spec files under `specs/`.
pub const BUNDLED: [(&str, &str); 7] = [
    ("single_delta", include_str!("../specs/single_delta.json")),
    ("single_delta_halfbound", include_str!("../specs/single_delta_halfbound.json")),
    ("double_delta_a0_95", include_str!("../specs/double_delta_a0_95.json")),
    ("double_delta_a1_00", include_str!("../specs/double_delta_a1_00.json")),
    ("double_delta_a1_05", include_str!("../specs/double_delta_a1_05.json")),
    ("barrier", include_str!("../specs/barrier.json")),
    ("free", include_str!("../specs/free.json")),
];

pub fn bundled(name: &str) -> Result<ValidatedPotential> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ScatterError::InvalidArgument(format!("no bundled spec named {name}")))?;
    PotentialSpec::from_json_str(text)?.validate()
}

pub fn all_bundled() -> Result<Vec<(&'static str, ValidatedPotential)>> {
    BUNDLED.iter().map(|(n, _)| Ok((*n, bundled(n)?))).collect()
}

/// `λ = diag(−1/2, −1)` on the left and `λ̃ = [[−6, −2], [−2, −1]]` on the right.
pub fn coupled_pair() -> (RMat, RMat) {
    (
        RMat::from_row_slice(2, 2, &[-0.5, 0.0, 0.0, -1.0]),
        RMat::from_row_slice(2, 2, &[-6.0, -2.0, -2.0, -1.0]),
    )
}

pub fn single_delta(lambda: RMat, range: f64) -> Result<ValidatedPotential> {
    PotentialSpec::new(lambda.nrows(), range).with_delta(0.0, lambda).validate()
}

/// `δ(x + a)λ + δ(x − a)λ̃` with the range equal to `a`.
pub fn double_delta(lambda: RMat, lambda_t: RMat, a: f64) -> Result<ValidatedPotential> {
    PotentialSpec::new(lambda.nrows(), a)
        .with_delta(-a, lambda)
        .with_delta(a, lambda_t)
        .validate()
}

/// The coupled pair at half-separation `a`.
pub fn coupled_double_delta(a: f64) -> Result<ValidatedPotential> {
    let (l, lt) = coupled_pair();
    double_delta(l, lt, a)
}

/// Constant matrix `v` on `[−R, R]`.
pub fn constant_block(v: RMat, range: f64) -> Result<ValidatedPotential> {
    PotentialSpec::new(v.nrows(), range)
        .with_segment(-range, range, v)
        .validate()
}
