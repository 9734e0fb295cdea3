//! Bayesian search grid: per-cell target-presence belief and the entropy
//! quantities derived from it.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::sensor_model::{DetectionRates, SensorModel};

/// Beliefs are kept away from 0 and 1 so later measurements can still move them.
pub const BELIEF_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex {
    pub col: usize,
    pub row: usize,
}

impl CellIndex {
    pub const fn new(col: usize, row: usize) -> Self {
        Self { col, row }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesUpdate {
    pub posterior: f64,
    /// Set when the evidence had zero total probability and the prior was kept.
    pub degenerate: bool,
}

fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::ProbabilityDomain(p))
    }
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Binary Shannon entropy in bits.
pub fn cell_entropy(p: f64) -> Result<f64> {
    let p = check_probability(p)?;
    Ok(entropy_unchecked(p))
}

#[inline]
pub(crate) fn entropy_unchecked(p: f64) -> f64 {
    -plogp(p) - plogp(1.0 - p)
}

/// Posterior P(X|z) given P(z|X) and P(z|¬X) for the observed measurement `z`.
pub fn bayes_update(prior: f64, given_present: f64, given_absent: f64) -> Result<BayesUpdate> {
    check_probability(prior)?;
    check_probability(given_present)?;
    check_probability(given_absent)?;
    Ok(bayes_unchecked(prior, given_present, given_absent))
}

#[inline]
fn bayes_unchecked(prior: f64, given_present: f64, given_absent: f64) -> BayesUpdate {
    let evidence = given_present * prior + given_absent * (1.0 - prior);
    if evidence <= 0.0 {
        return BayesUpdate {
            posterior: prior,
            degenerate: true,
        };
    }
    if given_present == given_absent {
        return BayesUpdate {
            posterior: prior,
            degenerate: false,
        };
    }
    BayesUpdate {
        posterior: (given_present * prior / evidence).clamp(0.0, 1.0),
        degenerate: false,
    }
}

/// The measurement the confidence-threshold rule assumes for a cell.
#[inline]
pub fn assumed_measurement(p_old: f64, confidence_threshold: f64) -> Measurement {
    if p_old >= confidence_threshold {
        Measurement::Positive
    } else {
        Measurement::Negative
    }
}

/// Posterior after observing `z` with the given detection rates.
#[inline]
pub fn posterior_for(p_old: f64, rates: &DetectionRates, z: Measurement) -> BayesUpdate {
    match z {
        Measurement::Positive => bayes_unchecked(p_old, rates.tpr, rates.fpr),
        Measurement::Negative => bayes_unchecked(p_old, rates.fnr, rates.tnr),
    }
}

/// Entropy reduction for the measurement assumed by the confidence-threshold
/// rule. Negative values (the assumed measurement raised entropy) are returned
/// unchanged.
pub fn expected_entropy_reduction(
    p_old: f64,
    rates: &DetectionRates,
    confidence_threshold: f64,
) -> Result<f64> {
    check_probability(p_old)?;
    for p in [rates.tpr, rates.fpr, rates.tnr, rates.fnr, confidence_threshold] {
        check_probability(p)?;
    }
    Ok(expected_reduction_unchecked(p_old, rates, confidence_threshold).0)
}

/// Returns (ΔH, posterior) without input validation.
#[inline]
pub(crate) fn expected_reduction_unchecked(
    p_old: f64,
    rates: &DetectionRates,
    confidence_threshold: f64,
) -> (f64, f64) {
    let z = assumed_measurement(p_old, confidence_threshold);
    let post = posterior_for(p_old, rates, z).posterior;
    (entropy_unchecked(p_old) - entropy_unchecked(post), post)
}

pub fn percent_entropy_reduction(h0: f64, ht: f64) -> Result<f64> {
    if !(h0 > 0.0) {
        return Err(Error::EntropyDomain(h0));
    }
    Ok(100.0 * (h0 - ht) / h0)
}

/// Uniform 2-D grid of target-presence probabilities, row-major with row 0
/// at the lowest y.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefGrid {
    origin: Point2,
    cell_size: f64,
    n_cols: usize,
    n_rows: usize,
    cells: Vec<f64>,
}

impl BeliefGrid {
    pub fn uniform(
        origin: Point2,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        p: f64,
    ) -> Result<Self> {
        Self::from_cells(origin, cell_size, n_cols, n_rows, vec![p; n_cols * n_rows])
    }

    pub fn from_cells(
        origin: Point2,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        cells: Vec<f64>,
    ) -> Result<Self> {
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::InvalidGrid("dimensions must be positive".into()));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidGrid(format!("cell size {cell_size}")));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if cells.len() != n_cols * n_rows {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells, got {}",
                n_cols * n_rows,
                cells.len()
            )));
        }
        for &p in &cells {
            check_probability(p)?;
        }
        Ok(Self {
            origin,
            cell_size,
            n_cols,
            n_rows,
            cells,
        })
    }

    /// Rectangular high-prior patches over a flat background.
    pub fn random_patchy<R: Rng + ?Sized>(
        origin: Point2,
        cell_size: f64,
        n_cols: usize,
        n_rows: usize,
        layout: &PatchLayout,
        rng: &mut R,
    ) -> Result<Self> {
        let mut grid = Self::uniform(origin, cell_size, n_cols, n_rows, layout.background)?;
        let max_size = layout.max_size_cells.max(1);
        let min_size = layout.min_size_cells.clamp(1, max_size);
        for _ in 0..layout.count {
            let w = rng.random_range(min_size..=max_size).min(n_cols);
            let h = rng.random_range(min_size..=max_size).min(n_rows);
            let c0 = rng.random_range(0..=n_cols - w);
            let r0 = rng.random_range(0..=n_rows - h);
            let p = if layout.p_max > layout.p_min {
                rng.random_range(layout.p_min..=layout.p_max)
            } else {
                layout.p_min
            };
            check_probability(p)?;
            for row in r0..r0 + h {
                for col in c0..c0 + w {
                    grid.cells[row * n_cols + col] = p;
                }
            }
        }
        Ok(grid)
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn width(&self) -> f64 {
        self.n_cols as f64 * self.cell_size
    }

    pub fn height(&self) -> f64 {
        self.n_rows as f64 * self.cell_size
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.col < self.n_cols && cell.row < self.n_rows
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        let lx = p.x - self.origin.x;
        let ly = p.y - self.origin.y;
        (0.0..=self.width()).contains(&lx) && (0.0..=self.height()).contains(&ly)
    }

    fn offset(&self, cell: CellIndex) -> Result<usize> {
        if self.contains(cell) {
            Ok(cell.row * self.n_cols + cell.col)
        } else {
            Err(Error::OutOfBounds(cell))
        }
    }

    pub fn get(&self, cell: CellIndex) -> Result<f64> {
        Ok(self.cells[self.offset(cell)?])
    }

    /// Writes `p` clamped to `[BELIEF_EPSILON, 1 - BELIEF_EPSILON]`.
    pub fn set(&mut self, cell: CellIndex, p: f64) -> Result<()> {
        check_probability(p)?;
        let i = self.offset(cell)?;
        self.cells[i] = p.clamp(BELIEF_EPSILON, 1.0 - BELIEF_EPSILON);
        Ok(())
    }

    pub fn cell_center(&self, cell: CellIndex) -> Point2 {
        Point2::new(
            self.origin.x + (cell.col as f64 + 0.5) * self.cell_size,
            self.origin.y + (cell.row as f64 + 0.5) * self.cell_size,
        )
    }

    /// The cell containing `p`, if any. Points on the max edges belong to the last cell.
    pub fn cell_at(&self, p: Point2) -> Option<CellIndex> {
        if !self.contains_point(p) {
            return None;
        }
        let col = (((p.x - self.origin.x) / self.cell_size).floor() as usize).min(self.n_cols - 1);
        let row = (((p.y - self.origin.y) / self.cell_size).floor() as usize).min(self.n_rows - 1);
        Some(CellIndex::new(col, row))
    }

    pub fn indices(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.n_rows).flat_map(move |row| (0..self.n_cols).map(move |col| CellIndex::new(col, row)))
    }

    pub fn total_entropy(&self) -> f64 {
        self.cells.iter().map(|&p| entropy_unchecked(p)).sum()
    }

    /// Replaces the cell's belief with the Bayes posterior for measurement `z`
    /// taken at slant range `range_m`.
    pub fn apply_measurement(
        &mut self,
        cell: CellIndex,
        range_m: f64,
        model: &SensorModel,
        z: Measurement,
    ) -> Result<f64> {
        let i = self.offset(cell)?;
        let rates = model.rates_at_range(range_m);
        if rates.is_uninformative() {
            return Ok(self.cells[i]);
        }
        let post = posterior_for(self.cells[i], &rates, z).posterior;
        self.cells[i] = post.clamp(BELIEF_EPSILON, 1.0 - BELIEF_EPSILON);
        Ok(self.cells[i])
    }

    /// Applies the confidence-threshold expected update; when `clamp_nonnegative`
    /// is set, updates that would raise the cell's entropy are skipped.
    /// Returns the entropy removed from the cell.
    pub fn apply_expected(
        &mut self,
        cell: CellIndex,
        rates: &DetectionRates,
        confidence_threshold: f64,
        clamp_nonnegative: bool,
    ) -> Result<f64> {
        let i = self.offset(cell)?;
        Ok(self.apply_expected_at(i, rates, confidence_threshold, clamp_nonnegative))
    }

    #[inline]
    pub(crate) fn apply_expected_at(
        &mut self,
        i: usize,
        rates: &DetectionRates,
        confidence_threshold: f64,
        clamp_nonnegative: bool,
    ) -> f64 {
        if rates.is_uninformative() {
            return 0.0;
        }
        let p_old = self.cells[i];
        let h_old = entropy_unchecked(p_old);
        let (_, post) = expected_reduction_unchecked(p_old, rates, confidence_threshold);
        let post = post.clamp(BELIEF_EPSILON, 1.0 - BELIEF_EPSILON);
        let dh = h_old - entropy_unchecked(post);
        if clamp_nonnegative && dh <= 0.0 {
            return 0.0;
        }
        self.cells[i] = post;
        dh
    }

    pub(crate) fn linear_index(&self, cell: CellIndex) -> usize {
        cell.row * self.n_cols + cell.col
    }

    /// Parses the prior-map text format: a header line
    /// `n_cols n_rows cell_size origin_x origin_y` followed by `n_rows` lines of
    /// `n_cols` probabilities, row 0 first. `#` starts a comment.
    pub fn parse_prior(text: &str) -> Result<Self> {
        const WHAT: &str = "prior map";
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            what: WHAT,
            line: 0,
            message: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                what: WHAT,
                line: hline,
                message: format!("header needs 5 fields, found {}", fields.len()),
            });
        }
        let bad = |line, m: String| Error::Parse {
            what: WHAT,
            line,
            message: m,
        };
        let n_cols: usize = fields[0].parse().map_err(|e| bad(hline, format!("n_cols: {e}")))?;
        let n_rows: usize = fields[1].parse().map_err(|e| bad(hline, format!("n_rows: {e}")))?;
        let nums: Vec<f64> = fields[2..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(hline, e.to_string()))?;

        let mut cells = Vec::with_capacity(n_cols * n_rows);
        let mut rows = 0;
        for (line, body) in lines {
            let row: Vec<f64> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(line, e.to_string()))?;
            if row.len() != n_cols {
                return Err(bad(line, format!("expected {n_cols} values, found {}", row.len())));
            }
            if let Some(p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(bad(line, format!("probability {p} outside [0, 1]")));
            }
            cells.extend(row);
            rows += 1;
        }
        if rows != n_rows {
            return Err(bad(hline, format!("header declares {n_rows} rows, found {rows}")));
        }
        Self::from_cells(Point2::new(nums[1], nums[2]), nums[0], n_cols, n_rows, cells)
    }

    pub fn to_prior_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# n_cols n_rows cell_size origin_x origin_y");
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            self.n_cols, self.n_rows, self.cell_size, self.origin.x, self.origin.y
        );
        for row in self.cells.chunks(self.n_cols) {
            let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn load_prior(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_prior(&text)
    }

    pub fn save_prior(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_prior_text()).map_err(|e| Error::io(path, e))
    }
}

/// Random rectangular patch placement used by scenario generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PatchLayout {
    pub background: f64,
    pub count: usize,
    pub min_size_cells: usize,
    pub max_size_cells: usize,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for PatchLayout {
    fn default() -> Self {
        Self {
            background: 0.001,
            count: 6,
            min_size_cells: 3,
            max_size_cells: 8,
            p_min: 0.8,
            p_max: 0.95,
        }
    }
}
