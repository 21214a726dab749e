//! Peaks-and-valleys surfaces and the flows they induce on flat simplices.
//!
//! A peak set names unit cubes of `Z^n`. Piling cubes up in the direction of
//! the negative diagonal fills the solid upward-closed under every axis:
//! cube `p` belongs to the solid when `p >= q` componentwise for some peak
//! `q`. Looking along the diagonal, every tile of the hyperplane sees the
//! solid's lowest covering cube, and the facet through which the sight line
//! enters that cube is a slant simplex. The map from tiles to those surface
//! simplices is the vector field; following it downward and recording when
//! the gradient changes yields the binary derivative code of the trajectory.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{flat_class, Dim, FlatClass, Gradient, Monomial, OrderedSimplex};

#[derive(Debug, Error)]
pub enum FlowError {
    /// No surface simplex lies over the requested tile. Not produced by the
    /// upward-closed solid of a non-empty peak set, which covers every tile;
    /// retained for interface stability.
    #[error("flat simplex {0} is not covered by the surface")]
    NotCovered(String),
    /// The field value at step `step` is not one of the two gradients
    /// permitted by the smoothness condition; the peak set is degenerate.
    #[error("smoothness violation at step {step}: field value {found} not permitted")]
    SmoothnessViolation { step: usize, found: String },
    #[error("peak set must be non-empty")]
    EmptyPeaks,
    #[error("peak set dimension mismatch")]
    DimensionMismatch,
    #[error("bad peak line {line}: {reason}")]
    BadPeakLine { line: usize, reason: String },
}

/// Non-empty, dimension-consistent list of peak cubes.
#[derive(Debug, Clone)]
pub struct PeakSet {
    dim: Dim,
    peaks: Vec<Monomial>,
}

impl PeakSet {
    pub fn new(peaks: Vec<Monomial>) -> Result<PeakSet, FlowError> {
        let dim = peaks.first().ok_or(FlowError::EmptyPeaks)?.dim();
        if peaks.iter().any(|p| p.dim() != dim) {
            return Err(FlowError::DimensionMismatch);
        }
        Ok(PeakSet { dim, peaks })
    }

    /// Parse the peak-set text format: one monomial per line as
    /// space-separated signed integer exponents; `#` starts a comment.
    pub fn parse(text: &str, dim: Dim) -> Result<PeakSet, FlowError> {
        let mut peaks = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let exps: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
            let exps =
                exps.map_err(|e| FlowError::BadPeakLine { line: idx + 1, reason: e.to_string() })?;
            if exps.len() != dim.n() {
                return Err(FlowError::BadPeakLine {
                    line: idx + 1,
                    reason: format!("expected {} exponents, found {}", dim.n(), exps.len()),
                });
            }
            peaks.push(Monomial::new(dim, &exps));
        }
        PeakSet::new(peaks)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn peaks(&self) -> &[Monomial] {
        &self.peaks
    }

    /// Smallest diagonal level `t` such that `base + t·(1,...,1)` lies in
    /// the solid, i.e. dominates some peak componentwise.
    fn entry_level(&self, base: &Monomial) -> i64 {
        self.peaks
            .iter()
            .map(|q| {
                q.exps()
                    .iter()
                    .zip(base.exps())
                    .map(|(&qe, &be)| qe - be)
                    .max()
                    .expect("non-empty exponents")
            })
            .min()
            .expect("non-empty peaks")
    }
}

/// The vector field induced by a peak set, with per-instance memoization of
/// tile lookups behind a mutex so shared instances stay safe to read from
/// multiple threads.
pub struct VectorField {
    peaks: PeakSet,
    memo: Mutex<HashMap<FlatClass, OrderedSimplex>>,
}

impl VectorField {
    pub fn new(peaks: PeakSet) -> VectorField {
        VectorField { peaks, memo: Mutex::new(HashMap::new()) }
    }

    pub fn peaks(&self) -> &PeakSet {
        &self.peaks
    }

    /// The surface simplex over `tile`.
    pub fn value(&self, tile: &FlatClass) -> Result<OrderedSimplex, FlowError> {
        if let Some(hit) = self.memo.lock().unwrap().get(tile) {
            return Ok(*hit);
        }
        let s = surface_simplex(&self.peaks, tile)?;
        self.memo.lock().unwrap().insert(*tile, s);
        Ok(s)
    }
}

/// The slant simplex on the surface of the peaks-and-valleys solid over
/// `tile`: among the fiber members whose base cube belongs to the solid,
/// the one of minimal diagonal height. The n fiber positions have pairwise
/// distinct heights modulo n, so the minimum is unique and the field is
/// deterministic.
pub fn surface_simplex(peaks: &PeakSet, tile: &FlatClass) -> Result<OrderedSimplex, FlowError> {
    if peaks.dim() != tile.dim() {
        return Err(FlowError::DimensionMismatch);
    }
    let n = tile.dim().n() as i64;
    let mut best: Option<(i64, OrderedSimplex)> = None;
    for member in tile.fiber(0) {
        let t = peaks.entry_level(&member.base());
        let height = member.base().degree() + n * t;
        if best.is_none_or(|(h, _)| height < h) {
            best = Some((height, member.shift_diag(t)));
        }
    }
    best.map(|(_, s)| s).ok_or_else(|| FlowError::NotCovered(tile.key()))
}

/// One trajectory step: the tile visited, the gradient the field assumes
/// there, and the surface simplex realizing it.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryStep {
    pub flat: FlatClass,
    pub gradient: Gradient,
    pub surface: OrderedSimplex,
}

/// A traced flow line over the tiling.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
    pub closed: bool,
    pub truncated: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Line-oriented record for step `i`:
    /// `index <tab> flat key <tab> gradient <tab> derivative`.
    pub fn step_line(&self, i: usize, code: &DerivativeCode) -> String {
        let step = &self.steps[i];
        let grad = step
            .gradient
            .letter()
            .map(|c| c.to_string())
            .unwrap_or_else(|| step.gradient.to_string());
        format!("{}\t{}\t{}\t{}", i, step.flat.key(), grad, code.values[i])
    }

    pub fn records(&self, code: &DerivativeCode) -> Vec<StepRecord> {
        self.steps
            .iter()
            .zip(&code.values)
            .enumerate()
            .map(|(i, (s, d))| StepRecord {
                step: i,
                flat_class: s.flat.key(),
                gradient: s.gradient.to_string(),
                gradient_letter: s.gradient.letter(),
                derivative: d.to_char(),
            })
            .collect()
    }
}

/// Machine-readable form of one trajectory step.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub flat_class: String,
    pub gradient: String,
    pub gradient_letter: Option<char>,
    pub derivative: char,
}

/// Trace the field from `start`, moving downward first and never
/// backtracking, until the starting (tile, gradient) pair recurs or
/// `max_steps` tiles have been visited.
pub fn trace(
    peaks: &PeakSet,
    start: &FlatClass,
    max_steps: usize,
) -> Result<Trajectory, FlowError> {
    assert!(max_steps >= 1);
    let field = VectorField::new(peaks.clone());
    let first = field.value(start)?;
    let mut steps =
        vec![TrajectoryStep { flat: *start, gradient: first.gradient(), surface: first }];
    let mut prev_tile: Option<FlatClass> = None;
    let mut cur = first;

    while steps.len() < max_steps {
        let here = flat_class(&cur);
        let down = flat_class(&cur.forward_successors().0);
        let up = flat_class(&cur.backward_predecessors().0);
        let (next_tile, permitted) = match prev_tile {
            Some(p) if p == down => (up, cur.backward_gradients()),
            Some(p) if p == up => (down, cur.forward_gradients()),
            None => (down, cur.forward_gradients()),
            Some(_) => unreachable!("previous tile is always an adjacent tile"),
        };
        let next = field.value(&next_tile)?;
        let g = next.gradient();
        if g != permitted.0 && g != permitted.1 {
            return Err(FlowError::SmoothnessViolation { step: steps.len(), found: g.to_string() });
        }
        if next_tile == steps[0].flat && g == steps[0].gradient {
            return Ok(Trajectory { steps, closed: true, truncated: false });
        }
        steps.push(TrajectoryStep { flat: next_tile, gradient: g, surface: next });
        prev_tile = Some(here);
        cur = next;
    }
    Ok(Trajectory { steps, closed: false, truncated: true })
}

/// Binary value of the derivative code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Derivative {
    U,
    D,
}

impl Derivative {
    pub fn flip(self) -> Derivative {
        match self {
            Derivative::U => Derivative::D,
            Derivative::D => Derivative::U,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Derivative::U => 'U',
            Derivative::D => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Derivative> {
        match c {
            'U' | 'u' => Some(Derivative::U),
            'D' | 'd' => Some(Derivative::D),
            _ => None,
        }
    }
}

impl fmt::Display for Derivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// The second-derivative sequence along a trajectory: one value per step,
/// flipping exactly when the gradient changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeCode {
    pub values: Vec<Derivative>,
}

impl fmt::Display for DerivativeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.values {
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

/// Compute the derivative code of `t` with the given initial value.
pub fn derivative_code(t: &Trajectory, initial: Derivative) -> DerivativeCode {
    assert!(!t.steps.is_empty(), "trajectory must be non-empty");
    let mut values = Vec::with_capacity(t.steps.len());
    values.push(initial);
    for w in t.steps.windows(2) {
        let prev = *values.last().unwrap();
        values.push(if w[1].gradient == w[0].gradient { prev } else { prev.flip() });
    }
    DerivativeCode { values }
}
