//! Entanglement regions on fixed-`c3` slices and cross-strategy comparison.

use std::collections::HashMap;
use std::io::{self, Write};

use thiserror::Error;

use crate::physics::sp_entangled;
use crate::sweep::{grid_key, Axis, SweepRecord};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("slice c3 = {c3} is incomplete: {missing} of {expected} grid points missing (first: {first})")]
    IncompleteSlice { c3: f64, missing: usize, expected: usize, first: String },
    #[error("mask dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("record sets have different keys: {0}")]
    KeyMismatch(String),
    #[error("no records to compare")]
    Empty,
}

/// Boolean matrix indexed `[c1 index][c2 index]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize) -> Self {
        Mask { rows, cols, cells: vec![false; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Mask::new(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[i * self.cols + j] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskKind {
    Numeric,
    StationaryPhase,
}

/// One `c3` slice of the parameter grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub c3: f64,
    pub c1_axis: Vec<f64>,
    pub c2_axis: Vec<f64>,
    pub c1_step: f64,
    pub c2_step: f64,
    /// `|X| − E > 0`.
    pub numeric_mask: Mask,
    /// `c1 < 2 |sin c2|`.
    pub sp_mask: Mask,
    /// `|X| − E`, unclamped, `[c1][c2]`.
    pub signed_n: Vec<Vec<f64>>,
    /// `| |X| − E | ≤ err_E + err_X`: the sign is not resolved by the
    /// integration error.
    pub boundary_uncertain: Mask,
}

impl RegionGrid {
    pub fn mask(&self, kind: MaskKind) -> &Mask {
        match kind {
            MaskKind::Numeric => &self.numeric_mask,
            MaskKind::StationaryPhase => &self.sp_mask,
        }
    }
}

/// Builds the region maps for slice `c3` from sweep records covering the
/// full `c1 × c2` product.
pub fn extract_region(records: &[SweepRecord], c1: &Axis, c2: &Axis, c3: f64) -> Result<RegionGrid, AnalysisError> {
    let by_key: HashMap<String, &SweepRecord> = records.iter().map(|r| (r.key(), r)).collect();
    let (c1_axis, c2_axis) = (c1.values(), c2.values());
    let (rows, cols) = (c1_axis.len(), c2_axis.len());

    let mut numeric_mask = Mask::new(rows, cols);
    let mut boundary_uncertain = Mask::new(rows, cols);
    let mut signed_n = vec![vec![0.0; cols]; rows];
    let mut missing = Vec::new();
    for (i, &a) in c1_axis.iter().enumerate() {
        for (j, &b) in c2_axis.iter().enumerate() {
            let key = grid_key(a, b, c3);
            let Some(rec) = by_key.get(&key) else {
                missing.push(key);
                continue;
            };
            let s = rec.signed_n();
            signed_n[i][j] = s;
            numeric_mask.set(i, j, s > 0.0);
            boundary_uncertain.set(i, j, s.abs() <= rec.err_e + rec.err_x);
        }
    }
    if let Some(first) = missing.first() {
        return Err(AnalysisError::IncompleteSlice {
            c3,
            missing: missing.len(),
            expected: rows * cols,
            first: first.clone(),
        });
    }
    let sp_mask = Mask::from_fn(rows, cols, |i, j| sp_entangled(c1_axis[i], c2_axis[j]));
    Ok(RegionGrid {
        c3,
        c1_step: c1.step,
        c2_step: c2.step,
        c1_axis,
        c2_axis,
        numeric_mask,
        sp_mask,
        signed_n,
        boundary_uncertain,
    })
}

/// Axis reconstructed from the distinct values present in a slice.
pub fn axis_from_values(values: &[f64]) -> Option<Axis> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| grid_key(*a, 0.0, 0.0) == grid_key(*b, 0.0, 0.0));
    match v.as_slice() {
        [] => None,
        [only] => Some(Axis::single(*only)),
        [first, .., last] => Some(Axis::new(*first, *last, (last - first) / (v.len() - 1) as f64)),
    }
}

/// The `c1` and `c2` axes spanned by records at `c3`.
pub fn slice_axes(records: &[SweepRecord], c3: f64) -> Option<(Axis, Axis)> {
    let target = grid_key(0.0, 0.0, c3);
    let slice: Vec<&SweepRecord> = records.iter().filter(|r| grid_key(0.0, 0.0, r.c3) == target).collect();
    let c1: Vec<f64> = slice.iter().map(|r| r.c1).collect();
    let c2: Vec<f64> = slice.iter().map(|r| r.c2).collect();
    Some((axis_from_values(&c1)?, axis_from_values(&c2)?))
}

/// Number of selected cells times the cell area.
pub fn region_area(r: &RegionGrid, kind: MaskKind) -> f64 {
    r.mask(kind).count() as f64 * r.c1_step * r.c2_step
}

/// Jaccard index `|a ∧ b| / |a ∨ b|`; 1 when both are empty.
pub fn region_similarity(a: &Mask, b: &Mask) -> Result<f64, AnalysisError> {
    if a.dims() != b.dims() {
        return Err(AnalysisError::DimensionMismatch(a.dims(), b.dims()));
    }
    let (mut both, mut either) = (0usize, 0usize);
    for (&x, &y) in a.cells.iter().zip(&b.cells) {
        both += usize::from(x && y);
        either += usize::from(x || y);
    }
    Ok(if either == 0 { 1.0 } else { both as f64 / either as f64 })
}

/// Largest per-point discrepancies between two runs over the same grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyDiff {
    /// `max | |X_a| − |X_b| | / max(|X_a|, |X_b|, tiny)`.
    pub max_rel_diff_x: f64,
    /// Same normalization applied to the signed `|X| − E`.
    pub max_rel_diff_n: f64,
    /// Point attaining `max_rel_diff_x`.
    pub worst_point: (f64, f64, f64),
    /// Point attaining `max_rel_diff_n`.
    pub worst_point_n: (f64, f64, f64),
    pub n_compared: usize,
}

/// Guards the relative differences against zero denominators.
pub const TINY: f64 = 1e-300;

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(TINY)
}

/// Compares two record sets point by point.
pub fn compare_strategies(a: &[SweepRecord], b: &[SweepRecord]) -> Result<StrategyDiff, AnalysisError> {
    let b_by_key: HashMap<String, &SweepRecord> = b.iter().map(|r| (r.key(), r)).collect();
    if a.len() != b.len() || b_by_key.len() != b.len() {
        return Err(AnalysisError::KeyMismatch(format!("{} vs {} records", a.len(), b.len())));
    }
    let mut sorted: Vec<&SweepRecord> = a.iter().collect();
    sorted.sort_by(|p, q| (p.c3, p.c2, p.c1).partial_cmp(&(q.c3, q.c2, q.c1)).unwrap());

    let mut diff = StrategyDiff {
        max_rel_diff_x: 0.0,
        max_rel_diff_n: 0.0,
        worst_point: (0.0, 0.0, 0.0),
        worst_point_n: (0.0, 0.0, 0.0),
        n_compared: 0,
    };
    for ra in sorted {
        let key = ra.key();
        let rb = b_by_key.get(&key).ok_or_else(|| AnalysisError::KeyMismatch(format!("{key} missing from second set")))?;
        let dx = rel_diff(ra.x_abs(), rb.x_abs());
        let dn = rel_diff(ra.signed_n(), rb.signed_n());
        let point = (ra.c1, ra.c2, ra.c3);
        if diff.n_compared == 0 || dx > diff.max_rel_diff_x {
            diff.max_rel_diff_x = dx;
            diff.worst_point = point;
        }
        if diff.n_compared == 0 || dn > diff.max_rel_diff_n {
            diff.max_rel_diff_n = dn;
            diff.worst_point_n = point;
        }
        diff.n_compared += 1;
    }
    if diff.n_compared == 0 {
        return Err(AnalysisError::Empty);
    }
    Ok(diff)
}

pub const REGION_CSV_HEADER: &str = "c1,c2,c3,signed_N,numeric,sp,boundary_uncertain";

/// Writes the region as CSV, `c1` varying fastest.
pub fn write_region_csv<W: Write>(r: &RegionGrid, out: &mut W) -> io::Result<()> {
    writeln!(out, "{REGION_CSV_HEADER}")?;
    for (j, &c2) in r.c2_axis.iter().enumerate() {
        for (i, &c1) in r.c1_axis.iter().enumerate() {
            writeln!(
                out,
                "{c1:.16e},{c2:.16e},{:.16e},{:.16e},{},{},{}",
                r.c3,
                r.signed_n[i][j],
                u8::from(r.numeric_mask.get(i, j)),
                u8::from(r.sp_mask.get(i, j)),
                u8::from(r.boundary_uncertain.get(i, j)),
            )?;
        }
    }
    Ok(())
}
