//! Finite-range matrix potentials.
//!
//! A [`PotentialSpec`] is a declarative description of a real symmetric
//! `N×N` potential that vanishes for `|x| > R`. It is built from
//! piecewise-constant segments and delta-function terms, or alternatively
//! from a sampled evaluator. [`validate`] normalizes a spec into a
//! [`ValidatedPotential`], which every solver in the crate consumes.

use std::fmt;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::linalg::{max_asymmetry, RMat};

/// Absolute tolerance on `|M_ij - M_ji|` for user-supplied matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Pointwise evaluator for a general potential.
pub type Evaluator = Arc<dyn Fn(f64) -> RMat + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub matrix: RMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTerm {
    pub position: f64,
    pub strength: RMat,
}

/// A general potential given by an evaluator. `step` is the preferred
/// integration step.
#[derive(Clone)]
pub struct SampledPotential {
    pub step: f64,
    pub evaluator: Evaluator,
}

impl fmt::Debug for SampledPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledPotential")
            .field("step", &self.step)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub struct PotentialSpec {
    pub channels: usize,
    pub range: f64,
    pub segments: Vec<Segment>,
    pub deltas: Vec<DeltaTerm>,
    pub sampled: Option<SampledPotential>,
}

impl PotentialSpec {
    pub fn new(channels: usize, range: f64) -> Self {
        PotentialSpec {
            channels,
            range,
            segments: Vec::new(),
            deltas: Vec::new(),
            sampled: None,
        }
    }

    pub fn with_segment(mut self, lo: f64, hi: f64, matrix: RMat) -> Self {
        self.segments.push(Segment { lo, hi, matrix });
        self
    }

    pub fn with_delta(mut self, position: f64, strength: RMat) -> Self {
        self.deltas.push(DeltaTerm { position, strength });
        self
    }

    pub fn with_sampled<F>(mut self, step: f64, evaluator: F) -> Self
    where
        F: Fn(f64) -> RMat + Send + Sync + 'static,
    {
        self.sampled = Some(SampledPotential {
            step,
            evaluator: Arc::new(evaluator),
        });
        self
    }

    pub fn validate(self) -> Result<ValidatedPotential> {
        validate(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)
            .map_err(|e| ScatterError::InvalidPotential(format!("spec parse error: {e}")))?;
        file.into_spec()
    }

    pub fn to_json_string(&self) -> Result<String> {
        if self.sampled.is_some() {
            return Err(ScatterError::InvalidPotential(
                "sampled potentials have no file representation".into(),
            ));
        }
        let file = SpecFile {
            channels: self.channels,
            range: self.range,
            segments: self
                .segments
                .iter()
                .map(|s| SegmentFile {
                    lo: s.lo,
                    hi: s.hi,
                    matrix: rows_of(&s.matrix),
                })
                .collect(),
            deltas: self
                .deltas
                .iter()
                .map(|d| DeltaFile {
                    pos: d.position,
                    matrix: rows_of(&d.strength),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| ScatterError::Io(e.to_string()))
    }
}

/// A spec whose invariants have been checked: symmetric matrices, support
/// inside `[-R, R]`, sorted non-overlapping segments.
#[derive(Clone, Debug)]
pub struct ValidatedPotential(PotentialSpec);

impl ValidatedPotential {
    pub fn spec(&self) -> &PotentialSpec {
        &self.0
    }

    pub fn channels(&self) -> usize {
        self.0.channels
    }

    pub fn range(&self) -> f64 {
        self.0.range
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0.segments
    }

    pub fn deltas(&self) -> &[DeltaTerm] {
        &self.0.deltas
    }

    pub fn sampled(&self) -> Option<&SampledPotential> {
        self.0.sampled.as_ref()
    }

    pub fn evaluate(&self, x: f64) -> RMat {
        evaluate(self, x)
    }

    /// Every constant strength matrix (segment values and delta strengths).
    pub fn strength_matrices(&self) -> impl Iterator<Item = &RMat> {
        self.0
            .segments
            .iter()
            .map(|s| &s.matrix)
            .chain(self.0.deltas.iter().map(|d| &d.strength))
    }

    /// Shift the whole potential by `d`, widening the range to cover the
    /// shifted support.
    pub fn translated(&self, d: f64) -> Result<ValidatedPotential> {
        if self.0.sampled.is_some() {
            return Err(ScatterError::InvalidPotential(
                "translation of sampled potentials is not supported".into(),
            ));
        }
        let mut spec = self.0.clone();
        spec.range = self.0.range + d.abs();
        for s in &mut spec.segments {
            s.lo += d;
            s.hi += d;
        }
        for t in &mut spec.deltas {
            t.position += d;
        }
        validate(spec)
    }

    pub fn into_inner(self) -> PotentialSpec {
        self.0
    }
}

pub fn validate(mut spec: PotentialSpec) -> Result<ValidatedPotential> {
    let n = spec.channels;
    let r = spec.range;
    if n == 0 {
        return Err(ScatterError::InvalidPotential("channels must be positive".into()));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(ScatterError::InvalidPotential(format!(
            "range must be a positive finite number, got {r}"
        )));
    }
    if spec.sampled.is_some() && !(spec.segments.is_empty() && spec.deltas.is_empty()) {
        return Err(ScatterError::InvalidPotential(
            "a sampled potential cannot be mixed with segments or deltas".into(),
        ));
    }

    for (i, s) in spec.segments.iter().enumerate() {
        let which = format!("segment {i}");
        check_matrix(&which, &s.matrix, n)?;
        if !(s.lo.is_finite() && s.hi.is_finite() && s.lo < s.hi) {
            return Err(ScatterError::InvalidPotential(format!(
                "{which} has an empty or non-finite interval [{}, {})",
                s.lo, s.hi
            )));
        }
        for p in [s.lo, s.hi] {
            if p < -r || p > r {
                return Err(ScatterError::SupportOutsideRange {
                    what: which.clone(),
                    position: p,
                    range: r,
                });
            }
        }
    }
    for (i, d) in spec.deltas.iter().enumerate() {
        let which = format!("delta {i}");
        check_matrix(&which, &d.strength, n)?;
        if !d.position.is_finite() || d.position < -r || d.position > r {
            return Err(ScatterError::SupportOutsideRange {
                what: which,
                position: d.position,
                range: r,
            });
        }
    }

    spec.segments
        .sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("finite bounds"));
    for w in spec.segments.windows(2) {
        if w[1].lo < w[0].hi {
            return Err(ScatterError::OverlappingSegments {
                a_lo: w[0].lo,
                a_hi: w[0].hi,
                b_lo: w[1].lo,
                b_hi: w[1].hi,
            });
        }
    }
    spec.deltas
        .sort_by(|a, b| a.position.partial_cmp(&b.position).expect("finite positions"));

    if let Some(sampled) = &spec.sampled {
        if !(sampled.step.is_finite() && sampled.step > 0.0) {
            return Err(ScatterError::InvalidPotential(format!(
                "sampled step must be positive, got {}",
                sampled.step
            )));
        }
        // Spot-check the evaluator on a coarse grid.
        for i in 0..=32 {
            let x = -r + 2.0 * r * i as f64 / 32.0;
            check_matrix(&format!("sampled V({x})"), &(sampled.evaluator)(x), n)?;
        }
    }

    Ok(ValidatedPotential(spec))
}

fn check_matrix(which: &str, m: &RMat, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(ScatterError::DimensionMismatch {
            what: which.to_string(),
            expected: n,
            found: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(ScatterError::InvalidPotential(format!(
            "{which} has non-finite entries"
        )));
    }
    let (asym, row, col) = max_asymmetry(m);
    if asym > SYMMETRY_TOL {
        return Err(ScatterError::NonSymmetricMatrix {
            which: which.to_string(),
            row,
            col,
            asymmetry: asym,
        });
    }
    Ok(())
}

/// Pointwise value of the potential excluding delta terms. Segments own
/// the half-open interval `[lo, hi)`.
pub fn evaluate(pot: &ValidatedPotential, x: f64) -> RMat {
    let n = pot.channels();
    let r = pot.range();
    if !(x.abs() <= r) {
        return RMat::zeros(n, n);
    }
    if let Some(s) = pot.sampled() {
        return (s.evaluator)(x);
    }
    let mut out = RMat::zeros(n, n);
    for s in pot.segments() {
        if s.lo <= x && x < s.hi {
            out += &s.matrix;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityClass {
    Even,
    None,
}

/// Decide whether `V(-x) = V(x)`, by sampling the regular part at
/// `n_samples` mirrored points and matching deltas pairwise.
pub fn classify_parity(pot: &ValidatedPotential, n_samples: usize) -> ParityClass {
    let r = pot.range();
    let n_samples = n_samples.max(1);
    let boundaries: Vec<f64> = pot
        .segments()
        .iter()
        .flat_map(|s| [s.lo, s.hi, -s.lo, -s.hi])
        .collect();
    // Golden-ratio offsets keep the sample points off round-number boundaries.
    let offset = 0.5 * (5f64.sqrt() - 1.0);
    for i in 0..n_samples {
        let mut x = r * (i as f64 + offset) / n_samples as f64;
        if boundaries.iter().any(|b| (b - x).abs() < 1e-12) {
            x += 1e-9 * r;
        }
        let diff = (evaluate(pot, x) - evaluate(pot, -x)).amax();
        if diff > SYMMETRY_TOL {
            return ParityClass::None;
        }
    }

    // Merge deltas sharing a position, then require a mirror partner for each.
    let mut merged: Vec<(f64, RMat)> = Vec::new();
    for d in pot.deltas() {
        match merged
            .iter_mut()
            .find(|(p, _)| (p - d.position).abs() <= 1e-12)
        {
            Some((_, m)) => *m += &d.strength,
            None => merged.push((d.position, d.strength.clone())),
        }
    }
    for (p, m) in &merged {
        let mirrored = merged
            .iter()
            .find(|(q, _)| (q + p).abs() <= 1e-12)
            .map(|(_, mm)| (mm - m).amax() <= SYMMETRY_TOL)
            .unwrap_or(false);
        if !mirrored {
            return ParityClass::None;
        }
    }
    ParityClass::Even
}

/// Orthogonal eigen-decomposition `M = U diag(d) Uᵀ` of a real symmetric
/// matrix. Eigenvalues are ordered by descending magnitude, negative first
/// on ties; each eigenvector is signed so its largest entry is positive.
pub fn orthogonal_diagonalize(m: &RMat) -> Result<(RMat, Vec<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(ScatterError::ConvergenceFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (da, db) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        db.abs()
            .partial_cmp(&da.abs())
            .unwrap()
            .then(da.partial_cmp(&db).unwrap())
    });
    let mut u = RMat::zeros(n, n);
    let mut d = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let lead = v.iamax();
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        u.set_column(col, &v);
        d.push(eig.eigenvalues[src]);
    }
    Ok((u, d))
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    channels: usize,
    range: f64,
    #[serde(default)]
    segments: Vec<SegmentFile>,
    #[serde(default)]
    deltas: Vec<DeltaFile>,
}

#[derive(Serialize, Deserialize)]
struct SegmentFile {
    lo: f64,
    hi: f64,
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct DeltaFile {
    pos: f64,
    matrix: Vec<Vec<f64>>,
}

impl SpecFile {
    fn into_spec(self) -> Result<PotentialSpec> {
        let mut spec = PotentialSpec::new(self.channels, self.range);
        for (i, s) in self.segments.into_iter().enumerate() {
            let m = matrix_from_rows(&format!("segment {i}"), &s.matrix, self.channels)?;
            spec = spec.with_segment(s.lo, s.hi, m);
        }
        for (i, d) in self.deltas.into_iter().enumerate() {
            let m = matrix_from_rows(&format!("delta {i}"), &d.matrix, self.channels)?;
            spec = spec.with_delta(d.pos, m);
        }
        Ok(spec)
    }
}

fn matrix_from_rows(which: &str, rows: &[Vec<f64>], n: usize) -> Result<RMat> {
    if rows.len() != n {
        return Err(ScatterError::DimensionMismatch {
            what: which.to_string(),
            expected: n,
            found: rows.len(),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(ScatterError::DimensionMismatch {
            what: which.to_string(),
            expected: n,
            found: bad.len(),
        });
    }
    Ok(RMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}
