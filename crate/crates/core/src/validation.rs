//! Criterion-validity statistics.
//!
//! Estimates from different sources are rescaled to the unit interval and
//! compared with Lin's concordance correlation coefficient, which factors
//! into Pearson's r times a bias-correction term `C_b` that penalizes
//! location and scale shifts.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcordanceResult {
    pub rho_c: f64,
    pub pearson: f64,
    pub bias_correction: f64,
    /// Pairwise-complete observation count.
    pub n: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    /// Population standard deviations.
    pub sd_x: f64,
    pub sd_y: f64,
}

impl ConcordanceResult {
    /// Location shift relative to the scale, `(mean_x - mean_y) / sqrt(sd_x sd_y)`.
    pub fn location_shift(&self) -> f64 {
        (self.mean_x - self.mean_y) / libm::sqrt(self.sd_x * self.sd_y)
    }

    /// Builds a result from summary moments, e.g. a published table row.
    /// The interval is Lin's asymptotic one at 95%.
    pub fn from_moments(
        pearson: f64,
        mean_x: f64,
        mean_y: f64,
        sd_x: f64,
        sd_y: f64,
        n: usize,
    ) -> Result<Self> {
        if !(sd_x > 0.0 && sd_y > 0.0) {
            return Err(Error::ZeroVariance);
        }
        let d = mean_x - mean_y;
        let cb = 2.0 * sd_x * sd_y / (sd_x * sd_x + sd_y * sd_y + d * d);
        let mut r = ConcordanceResult {
            rho_c: pearson * cb,
            pearson,
            bias_correction: cb,
            n,
            ci_low: -1.0,
            ci_high: 1.0,
            mean_x,
            mean_y,
            sd_x,
            sd_y,
        };
        if n >= 4 {
            let (lo, hi) = ccc_ci(&r, 0.95)?;
            r.ci_low = lo;
            r.ci_high = hi;
        }
        Ok(r)
    }
}

/// Keeps the positions where both values are present.
pub fn pairwise_complete(x: &[Option<f64>], y: &[Option<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    Ok(x.iter()
        .zip(y)
        .filter_map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => Some((*a, *b)),
            _ => None,
        })
        .unzip())
}

struct Moments {
    mean_x: f64,
    mean_y: f64,
    var_x: f64,
    var_y: f64,
    cov: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Result<Moments> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations { needed: 3, got: x.len() });
    }
    let n = x.len() as f64;
    let mean_x = stats::mean(x);
    let mean_y = stats::mean(y);
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    let mut cov = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        var_x += dx * dx;
        var_y += dy * dy;
        cov += dx * dy;
    }
    let m = Moments { mean_x, mean_y, var_x: var_x / n, var_y: var_y / n, cov: cov / n };
    if !(m.var_x > 0.0 && m.var_y > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(m)
}

/// Pearson's product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let m = moments(x, y)?;
    Ok((m.cov / libm::sqrt(m.var_x * m.var_y)).clamp(-1.0, 1.0))
}

/// Lin's concordance correlation with population moments and a 95% Lin
/// asymptotic interval. With exactly three observations the interval is
/// the uninformative `[-1, 1]`.
pub fn ccc(x: &[f64], y: &[f64]) -> Result<ConcordanceResult> {
    let m = moments(x, y)?;
    let rho = (m.cov / libm::sqrt(m.var_x * m.var_y)).clamp(-1.0, 1.0);
    let d = m.mean_x - m.mean_y;
    let cb = 2.0 * libm::sqrt(m.var_x * m.var_y) / (m.var_x + m.var_y + d * d);
    let mut r = ConcordanceResult {
        rho_c: rho * cb,
        pearson: rho,
        bias_correction: cb,
        n: x.len(),
        ci_low: -1.0,
        ci_high: 1.0,
        mean_x: m.mean_x,
        mean_y: m.mean_y,
        sd_x: libm::sqrt(m.var_x),
        sd_y: libm::sqrt(m.var_y),
    };
    if r.n >= 4 {
        let (lo, hi) = ccc_ci(&r, 0.95)?;
        r.ci_low = lo;
        r.ci_high = hi;
    }
    Ok(r)
}

/// Asymptotic interval on the Fisher z scale, `atanh(rho_c)`, with Lin's
/// (1989) variance, mapped back with `tanh`.
///
/// Lin's variance is written with `C_b = rho_c / rho` substituted so that
/// it stays finite when `rho` is zero.
pub fn ccc_ci(result: &ConcordanceResult, level: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside [0, 1)")));
    }
    if result.n < 4 {
        return Err(Error::TooFewObservations { needed: 4, got: result.n });
    }
    let rc = result.rho_c;
    if rc.abs() >= 1.0 {
        return Ok((rc, rc));
    }
    let rho = result.pearson;
    let cb = result.bias_correction;
    let u = result.location_shift();
    let u2 = u * u;
    let one_minus = 1.0 - rc * rc;
    let var = ((1.0 - rho * rho) * cb * cb / one_minus
        + 2.0 * rc * rc * cb * (1.0 - rc) * u2 / (one_minus * one_minus)
        - rc * rc * cb * cb * u2 * u2 / (2.0 * one_minus * one_minus))
        / (result.n as f64 - 2.0);
    let se = libm::sqrt(var.max(0.0));
    let z = libm::atanh(rc);
    let q = stats::normal_quantile(0.5 + level / 2.0);
    let lo = libm::tanh(z - q * se);
    let hi = libm::tanh(z + q * se);
    Ok((lo.min(rc), hi.max(rc)))
}

/// Percentile bootstrap interval for `rho_c` over resampled pairs.
/// Resamples with zero variance in either vector are skipped.
pub fn bootstrap_ccc_ci(
    x: &[f64],
    y: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside [0, 1)")));
    }
    let point = ccc(x, y)?.rho_c;
    let n = x.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(resamples);
    let mut bx = alloc::vec![0.0; n];
    let mut by = alloc::vec![0.0; n];
    for _ in 0..resamples {
        for i in 0..n {
            let j = rng.gen_range(0..n);
            bx[i] = x[j];
            by[i] = y[j];
        }
        if let Ok(r) = ccc(&bx, &by) {
            draws.push(r.rho_c);
        }
    }
    if draws.is_empty() {
        return Err(Error::ZeroVariance);
    }
    draws.sort_by(f64::total_cmp);
    let lo = percentile(&draws, (1.0 - level) / 2.0);
    let hi = percentile(&draws, (1.0 + level) / 2.0);
    Ok((lo.min(point), hi.max(point)))
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = libm::ceil(pos) as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CiMethod {
    #[default]
    Asymptotic,
    Bootstrap { resamples: usize, seed: u64 },
}

impl CiMethod {
    pub const DEFAULT_RESAMPLES: usize = 1000;
}

/// [`ccc`] with a chosen interval method at `level`.
pub fn ccc_with(x: &[f64], y: &[f64], level: f64, method: CiMethod) -> Result<ConcordanceResult> {
    let mut r = ccc(x, y)?;
    let (lo, hi) = match method {
        CiMethod::Asymptotic if r.n < 4 => (-1.0, 1.0),
        CiMethod::Asymptotic => ccc_ci(&r, level)?,
        CiMethod::Bootstrap { resamples, seed } => bootstrap_ccc_ci(x, y, resamples, level, seed)?,
    };
    r.ci_low = lo;
    r.ci_high = hi;
    Ok(r)
}

/// Declared bounds of a source's scale, or `Empirical` to use the observed
/// extremes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Declared { min: f64, max: f64 },
    Empirical,
}

/// Grouping for empirical unit rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RescaleMode {
    /// Extremes over the whole dimension ("wd").
    WholeDimension,
    /// Extremes within each country ("pc").
    PerCountry,
}

impl RescaleMode {
    pub const ALL: [RescaleMode; 2] = [RescaleMode::WholeDimension, RescaleMode::PerCountry];

    pub fn as_str(self) -> &'static str {
        match self {
            RescaleMode::WholeDimension => "wd",
            RescaleMode::PerCountry => "pc",
        }
    }
}

impl fmt::Display for RescaleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for RescaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wd" => Ok(RescaleMode::WholeDimension),
            "pc" => Ok(RescaleMode::PerCountry),
            other => Err(Error::InvalidArgument(format!("unknown rescale mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowKey {
    pub party: String,
    pub country: String,
    pub dimension: String,
}

impl RowKey {
    pub fn new(party: impl Into<String>, country: impl Into<String>, dimension: impl Into<String>) -> Self {
        RowKey { party: party.into(), country: country.into(), dimension: dimension.into() }
    }
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.party, self.country, self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub scale: Scale,
    pub values: Vec<Option<f64>>,
}

/// Party-level estimates from several sources, one column per source.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimateTable {
    keys: Vec<RowKey>,
    index: BTreeMap<RowKey, usize>,
    columns: Vec<Column>,
}

impl EstimateTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_row(&mut self, key: RowKey) -> Result<usize> {
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateKey(format!("{key}")));
        }
        let i = self.keys.len();
        self.index.insert(key.clone(), i);
        self.keys.push(key);
        for c in self.columns.iter_mut() {
            c.values.push(None);
        }
        Ok(i)
    }

    pub fn add_column(&mut self, name: impl Into<String>, scale: Scale) -> Result<usize> {
        let name = name.into();
        if self.columns.iter().any(|c| c.name == name) {
            return Err(Error::DuplicateKey(format!("column `{name}`")));
        }
        self.columns.push(Column { name, scale, values: alloc::vec![None; self.keys.len()] });
        Ok(self.columns.len() - 1)
    }

    pub fn set(&mut self, key: &RowKey, column: &str, value: Option<f64>) -> Result<()> {
        let row = *self.index.get(key).ok_or_else(|| Error::DuplicateKey(format!("unknown row {key}")))?;
        let col = self.column_index(column)?;
        self.columns[col].values[row] = value;
        Ok(())
    }

    pub fn get(&self, key: &RowKey, column: &str) -> Option<f64> {
        let row = *self.index.get(key)?;
        let col = self.column_index(column).ok()?;
        self.columns[col].values[row]
    }

    pub fn keys(&self) -> &[RowKey] {
        &self.keys
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.keys.len()
    }

    fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        Ok(&self.columns[self.column_index(name)?])
    }

    /// Rows of one dimension, all columns kept.
    pub fn filter_dimension(&self, dimension: &str) -> EstimateTable {
        let rows: Vec<usize> =
            (0..self.keys.len()).filter(|&i| self.keys[i].dimension == dimension).collect();
        let keys: Vec<RowKey> = rows.iter().map(|&i| self.keys[i].clone()).collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                scale: c.scale,
                values: rows.iter().map(|&i| c.values[i]).collect(),
            })
            .collect();
        EstimateTable { keys, index, columns }
    }

    pub fn dimensions(&self) -> Vec<String> {
        let mut dims: Vec<String> = self.keys.iter().map(|k| k.dimension.clone()).collect();
        dims.sort();
        dims.dedup();
        dims
    }
}

/// Maps a column to `[0, 1]` with `(value - min) / (max - min)`.
///
/// Declared scales use their bounds regardless of `mode`. Empirical columns
/// use the observed extremes per dimension (`WholeDimension`) or per
/// dimension and country (`PerCountry`). Missing values stay missing.
pub fn rescale_unit(
    table: &EstimateTable,
    column: &str,
    mode: RescaleMode,
) -> Result<Vec<Option<f64>>> {
    let col = table.column(column)?;
    match col.scale {
        Scale::Declared { min, max } => {
            if !(max > min) {
                return Err(Error::ConstantGroup(format!("{column} declared [{min}, {max}]")));
            }
            Ok(col.values.iter().map(|v| v.map(|v| (v - min) / (max - min))).collect())
        }
        Scale::Empirical => {
            let group_of = |k: &RowKey| -> String {
                match mode {
                    RescaleMode::WholeDimension => k.dimension.clone(),
                    RescaleMode::PerCountry => format!("{}/{}", k.dimension, k.country),
                }
            };
            let mut bounds: BTreeMap<String, (f64, f64)> = BTreeMap::new();
            for (k, v) in table.keys.iter().zip(&col.values) {
                if let Some(v) = v.filter(|v| v.is_finite()) {
                    let b = bounds.entry(group_of(k)).or_insert((v, v));
                    b.0 = b.0.min(v);
                    b.1 = b.1.max(v);
                }
            }
            for (g, (lo, hi)) in &bounds {
                if lo == hi {
                    return Err(Error::ConstantGroup(format!("{column} in {g}")));
                }
            }
            Ok(table
                .keys
                .iter()
                .zip(&col.values)
                .map(|(k, v)| {
                    let v = v.filter(|v| v.is_finite())?;
                    let (lo, hi) = bounds[&group_of(k)];
                    Some((v - lo) / (hi - lo))
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub first: String,
    pub second: String,
    pub result: ConcordanceResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePair {
    pub benchmark: String,
    pub result: ConcordanceResult,
    /// Upper confidence bound strictly above every benchmark-pair CCC.
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub candidate: String,
    pub mode: RescaleMode,
    pub candidate_pairs: Vec<CandidatePair>,
    pub benchmark_pairs: Vec<PairResult>,
    /// Largest benchmark-vs-benchmark CCC point estimate.
    pub threshold: f64,
}

impl BenchmarkReport {
    pub fn all_pass(&self) -> bool {
        self.candidate_pairs.iter().all(|p| p.passes)
    }

    pub fn any_pass(&self) -> bool {
        self.candidate_pairs.iter().any(|p| p.passes)
    }
}

fn concordance_of(
    a: &[Option<f64>],
    b: &[Option<f64>],
    level: f64,
    method: CiMethod,
) -> Result<ConcordanceResult> {
    let (x, y) = pairwise_complete(a, b)?;
    ccc_with(&x, &y, level, method)
}

/// Compares a candidate column against each benchmark and the benchmarks
/// against each other, after unit rescaling in `mode`.
pub fn benchmark_matrix(
    table: &EstimateTable,
    candidate: &str,
    benchmarks: &[&str],
    mode: RescaleMode,
    level: f64,
    method: CiMethod,
) -> Result<BenchmarkReport> {
    if benchmarks.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 benchmark columns, got {}",
            benchmarks.len()
        )));
    }
    let cand = rescale_unit(table, candidate, mode)?;
    let bench: Vec<Vec<Option<f64>>> =
        benchmarks.iter().map(|b| rescale_unit(table, b, mode)).collect::<Result<_>>()?;

    let mut benchmark_pairs = Vec::new();
    for i in 0..benchmarks.len() {
        for j in i + 1..benchmarks.len() {
            benchmark_pairs.push(PairResult {
                first: benchmarks[i].to_owned(),
                second: benchmarks[j].to_owned(),
                result: concordance_of(&bench[i], &bench[j], level, method)?,
            });
        }
    }
    let threshold = benchmark_pairs
        .iter()
        .map(|p| p.result.rho_c)
        .fold(f64::NEG_INFINITY, f64::max);
    let candidate_pairs = benchmarks
        .iter()
        .zip(&bench)
        .map(|(name, b)| {
            let result = concordance_of(&cand, b, level, method)?;
            Ok(CandidatePair {
                benchmark: (*name).to_owned(),
                passes: result.ci_high > threshold,
                result,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkReport {
        candidate: candidate.to_owned(),
        mode,
        candidate_pairs,
        benchmark_pairs,
        threshold,
    })
}

/// One run's estimate for one document.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: String,
    pub document: String,
    pub dimension: String,
    pub score: f64,
}

/// One external source's score for one party.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalRecord {
    pub party: String,
    pub country: String,
    pub dimension: String,
    pub source: String,
    pub score: f64,
}

/// Document id to `(party, country)` mapping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Crosswalk {
    entries: BTreeMap<String, (String, String)>,
}

impl Crosswalk {
    pub fn new() -> Self {
        Self::default()
    }

    /// Repeating an identical entry is fine; remapping a document is not.
    pub fn insert(
        &mut self,
        document: impl Into<String>,
        party: impl Into<String>,
        country: impl Into<String>,
    ) -> Result<()> {
        let document = document.into();
        let value = (party.into(), country.into());
        match self.entries.get(&document) {
            Some(existing) if *existing != value => Err(Error::AmbiguousCrosswalk(document)),
            _ => {
                self.entries.insert(document, value);
                Ok(())
            }
        }
    }

    pub fn get(&self, document: &str) -> Option<(&str, &str)> {
        self.entries.get(document).map(|(p, c)| (p.as_str(), c.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub table: EstimateTable,
    /// Run documents without a crosswalk entry, deduplicated.
    pub uncovered: Vec<String>,
}

/// Left-joins external sources onto the crosswalked run estimates.
///
/// Rows come from the runs, sorted by key; run columns come first in order
/// of appearance and are empirical-scale, external columns follow with the
/// scale from `scales` (empirical when absent).
pub fn merge_estimates(
    runs: &[RunRecord],
    external: &[ExternalRecord],
    crosswalk: &Crosswalk,
    scales: &BTreeMap<String, Scale>,
) -> Result<MergeOutcome> {
    let mut run_names: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(RowKey, &str), f64> = BTreeMap::new();
    let mut uncovered: Vec<String> = Vec::new();
    for r in runs {
        if !run_names.contains(&r.run.as_str()) {
            run_names.push(&r.run);
        }
        let Some((party, country)) = crosswalk.get(&r.document) else {
            if !uncovered.contains(&r.document) {
                uncovered.push(r.document.clone());
            }
            continue;
        };
        let key = RowKey::new(party, country, r.dimension.as_str());
        if cells.insert((key.clone(), r.run.as_str()), r.score).is_some() {
            return Err(Error::DuplicateKey(format!("{key} in run `{}`", r.run)));
        }
    }

    let mut table = EstimateTable::new();
    for name in &run_names {
        table.add_column(*name, Scale::Empirical)?;
    }
    let mut keys: Vec<&RowKey> = cells.keys().map(|(k, _)| k).collect();
    keys.dedup();
    for k in keys {
        table.add_row(k.clone())?;
    }
    for ((key, run), score) in &cells {
        table.set(key, run, Some(*score))?;
    }

    let mut seen_external: BTreeMap<(RowKey, &str), ()> = BTreeMap::new();
    for e in external {
        if table.column_index(&e.source).is_err() {
            let scale = scales.get(&e.source).copied().unwrap_or(Scale::Empirical);
            table.add_column(e.source.as_str(), scale)?;
        }
        let key = RowKey::new(e.party.as_str(), e.country.as_str(), e.dimension.as_str());
        if seen_external.insert((key.clone(), e.source.as_str()), ()).is_some() {
            return Err(Error::DuplicateKey(format!("{key} in source `{}`", e.source)));
        }
        if table.index.contains_key(&key) {
            table.set(&key, &e.source, Some(e.score))?;
        }
    }
    Ok(MergeOutcome { table, uncovered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_rational::Ratio;
    use proptest::prelude::{prop, prop_assert, prop_assert_eq, proptest};

    #[test]
    fn pearson_basics() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(pearson(&x, &x).unwrap(), 1.0);
        assert_abs_diff_eq!(pearson(&x, &[2.0, 4.0, 6.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&x, &[3.0, 2.0, 1.0]).unwrap(), -1.0, epsilon = 1e-15);
        assert_eq!(pearson(&x, &[1.0, 1.0, 1.0]), Err(Error::ZeroVariance));
        assert!(matches!(pearson(&x[..2], &x[..2]), Err(Error::TooFewObservations { .. })));
    }

    #[test]
    fn ccc_basics() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = ccc(&x, &x).unwrap();
        assert_eq!((r.rho_c, r.bias_correction), (1.0, 1.0));
        assert_eq!((r.ci_low, r.ci_high), (1.0, 1.0));

        let r = ccc(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap();
        assert_abs_diff_eq!(r.rho_c, 4.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.bias_correction, 4.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.pearson, 1.0, epsilon = 1e-15);
        assert_eq!((r.ci_low, r.ci_high), (-1.0, 1.0));
    }

    #[test]
    fn ccc_ci_limits() {
        let r = ConcordanceResult::from_moments(0.0, 0.0, 0.0, 1.0, 1.0, 500).unwrap();
        let (lo, hi) = ccc_ci(&r, 0.95).unwrap();
        assert_abs_diff_eq!(lo, -hi, epsilon = 1e-15);
        assert!(hi > 0.0);
        let r = ConcordanceResult::from_moments(0.6, 0.3, 0.1, 1.0, 1.2, 50).unwrap();
        assert_eq!(ccc_ci(&r, 0.0).unwrap(), (r.rho_c, r.rho_c));
        assert!(ccc_ci(&r, 1.0).is_err());
    }

    #[test]
    fn tabled_row_reproduces() {
        // rho = 0.687, C_b = 0.907, n = 133 with equal SDs.
        let u = libm::sqrt(2.0 / 0.907 - 2.0);
        let r = ConcordanceResult::from_moments(0.687, u, 0.0, 1.0, 1.0, 133).unwrap();
        assert_abs_diff_eq!(r.rho_c, 0.623, epsilon = 6e-4);
        assert_abs_diff_eq!(r.ci_low, 0.527, epsilon = 0.01);
        assert_abs_diff_eq!(r.ci_high, 0.704, epsilon = 0.01);
    }

    #[test]
    fn bootstrap_is_seeded() {
        let x: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v * 0.9 + libm::sin(*v) * 3.0).collect();
        let a = bootstrap_ccc_ci(&x, &y, 500, 0.95, 7).unwrap();
        let b = bootstrap_ccc_ci(&x, &y, 500, 0.95, 7).unwrap();
        assert_eq!(a, b);
        let point = ccc(&x, &y).unwrap().rho_c;
        assert!(a.0 <= point && point <= a.1);
        let r = ccc_with(&x, &y, 0.95, CiMethod::Bootstrap { resamples: 500, seed: 7 }).unwrap();
        assert_eq!((r.ci_low, r.ci_high), a);
    }

    fn table_with(values: &[(&str, &str, f64)], scale: Scale) -> EstimateTable {
        let mut t = EstimateTable::new();
        t.add_column("ws", scale).unwrap();
        for (party, country, v) in values {
            let k = RowKey::new(*party, *country, "lr");
            t.add_row(k.clone()).unwrap();
            t.set(&k, "ws", Some(*v)).unwrap();
        }
        t
    }

    #[test]
    fn rescale_modes() {
        let t = table_with(&[("a", "X", -2.09), ("b", "X", 10.0), ("c", "Y", 22.45)], Scale::Empirical);
        let r = rescale_unit(&t, "ws", RescaleMode::WholeDimension).unwrap();
        assert_eq!(r[0], Some(0.0));
        assert_eq!(r[2], Some(1.0));

        let t = table_with(&[("a", "X", 0.0), ("b", "X", 5.0), ("c", "X", 10.0)], Scale::Declared { min: 0.0, max: 10.0 });
        let r = rescale_unit(&t, "ws", RescaleMode::PerCountry).unwrap();
        assert_eq!(r, [Some(0.0), Some(0.5), Some(1.0)]);

        let t = table_with(&[("a", "X", 0.0), ("b", "X", 10.0), ("c", "Y", 5.0), ("d", "Y", 15.0)], Scale::Empirical);
        let r = rescale_unit(&t, "ws", RescaleMode::PerCountry).unwrap();
        assert_eq!(r, [Some(0.0), Some(1.0), Some(0.0), Some(1.0)]);
        let r = rescale_unit(&t, "ws", RescaleMode::WholeDimension).unwrap();
        assert_eq!(r[2], Some(1.0 / 3.0));

        let t = table_with(&[("a", "X", 1.0), ("b", "X", 1.0), ("c", "Y", 5.0), ("d", "Y", 6.0)], Scale::Empirical);
        assert_eq!(
            rescale_unit(&t, "ws", RescaleMode::PerCountry),
            Err(Error::ConstantGroup("ws in lr/X".into()))
        );
    }

    fn bench_table(cols: &[(&str, Vec<f64>)]) -> EstimateTable {
        let mut t = EstimateTable::new();
        for (name, _) in cols {
            t.add_column(*name, Scale::Empirical).unwrap();
        }
        for i in 0..cols[0].1.len() {
            let k = RowKey::new(format!("p{i}"), "X", "lr");
            t.add_row(k.clone()).unwrap();
            for (name, v) in cols {
                t.set(&k, name, Some(v[i])).unwrap();
            }
        }
        t
    }

    #[test]
    fn benchmark_identical_candidate_passes() {
        let b1: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let b2: Vec<f64> = b1.iter().map(|v| v + libm::sin(*v) * 2.0).collect();
        let b3: Vec<f64> = b1.iter().map(|v| v + libm::cos(*v * 1.3) * 2.5).collect();
        let t = bench_table(&[("cand", b1.clone()), ("b1", b1), ("b2", b2), ("b3", b3)]);
        let rep = benchmark_matrix(&t, "cand", &["b1", "b2", "b3"], RescaleMode::WholeDimension, 0.95, CiMethod::Asymptotic).unwrap();
        assert_eq!(rep.benchmark_pairs.len(), 3);
        assert_eq!(rep.candidate_pairs[0].result.rho_c, 1.0);
        assert!(rep.candidate_pairs[0].passes);
        assert!(rep.any_pass());
        assert!(benchmark_matrix(&t, "cand", &["b1"], RescaleMode::WholeDimension, 0.95, CiMethod::Asymptotic).is_err());
    }

    #[test]
    fn merge_join_semantics() {
        let mut cw = Crosswalk::new();
        for (d, p) in [("d1", "p1"), ("d2", "p2"), ("d3", "p3")] {
            cw.insert(d, p, "NL").unwrap();
        }
        cw.insert("d1", "p1", "NL").unwrap();
        assert_eq!(cw.insert("d1", "p9", "NL"), Err(Error::AmbiguousCrosswalk("d1".into())));

        let mut runs = Vec::new();
        for run in ["lbg", "mv"] {
            for (i, d) in ["d1", "d2", "d3"].iter().enumerate() {
                runs.push(RunRecord { run: run.into(), document: (*d).into(), dimension: "eu".into(), score: i as f64 });
            }
        }
        let external: Vec<ExternalRecord> = ["p1", "p2"]
            .iter()
            .map(|p| ExternalRecord { party: (*p).into(), country: "NL".into(), dimension: "eu".into(), source: "CHES".into(), score: 3.0 })
            .collect();
        let out = merge_estimates(&runs, &external, &cw, &BTreeMap::new()).unwrap();
        assert_eq!(out.table.n_rows(), 3);
        assert_eq!(out.table.columns().len(), 3);
        assert_eq!(out.table.get(&RowKey::new("p3", "NL", "eu"), "CHES"), None);
        assert_eq!(out.table.get(&RowKey::new("p3", "NL", "eu"), "mv"), Some(2.0));

        runs.push(RunRecord { run: "lbg".into(), document: "d1".into(), dimension: "eu".into(), score: 0.0 });
        assert!(matches!(merge_estimates(&runs, &external, &cw, &BTreeMap::new()), Err(Error::DuplicateKey(_))));

        let runs = [RunRecord { run: "lbg".into(), document: "dx".into(), dimension: "eu".into(), score: 0.0 }];
        let out = merge_estimates(&runs, &[], &cw, &BTreeMap::new()).unwrap();
        assert_eq!(out.uncovered, ["dx"]);
    }

    fn rational_ccc(x: &[i64], y: &[i64]) -> f64 {
        // 2 s_xy / (s_x^2 + s_y^2 + (mx - my)^2), all with 1/n moments, exact.
        let n = Ratio::from_integer(x.len() as i128);
        let mx = Ratio::from_integer(x.iter().map(|&v| v as i128).sum::<i128>()) / n;
        let my = Ratio::from_integer(y.iter().map(|&v| v as i128).sum::<i128>()) / n;
        let mut sxx = Ratio::from_integer(0);
        let mut syy = Ratio::from_integer(0);
        let mut sxy = Ratio::from_integer(0);
        for (&a, &b) in x.iter().zip(y) {
            let dx = Ratio::from_integer(a as i128) - mx;
            let dy = Ratio::from_integer(b as i128) - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        let num = Ratio::from_integer(2) * sxy / n;
        let den = sxx / n + syy / n + (mx - my) * (mx - my);
        let r = num / den;
        *r.numer() as f64 / *r.denom() as f64
    }

    proptest! {
        #[test]
        fn ccc_matches_rational_oracle(pairs in prop::collection::vec((-50i64..50, -50i64..50), 3..=6)) {
            let x: Vec<i64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<i64> = pairs.iter().map(|p| p.1).collect();
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            if let Ok(r) = ccc(&xf, &yf) {
                prop_assert!((r.rho_c - rational_ccc(&x, &y)).abs() < 1e-12);
                prop_assert!((r.rho_c - r.pearson * r.bias_correction).abs() < 1e-9);
                prop_assert!(r.bias_correction > 0.0 && r.bias_correction <= 1.0);
                prop_assert!(r.rho_c.abs() <= r.pearson.abs() + 1e-15);
                prop_assert!(r.ci_low <= r.rho_c && r.rho_c <= r.ci_high);
            }
        }

        #[test]
        fn ccc_symmetry_and_affine(xs in prop::collection::vec(-10.0f64..10.0, 5..20), seed in 0u64..1000,
                                   a in -5.0f64..5.0, b in 0.1f64..5.0, shift in 0.5f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ys: Vec<f64> = xs.iter().map(|v| v + rng.gen_range(-3.0..3.0)).collect();
            if let (Ok(r1), Ok(r2)) = (ccc(&xs, &ys), ccc(&ys, &xs)) {
                prop_assert!((r1.rho_c - r2.rho_c).abs() < 1e-12);
                let xa: Vec<f64> = xs.iter().map(|v| a + b * v).collect();
                let ya: Vec<f64> = ys.iter().map(|v| a + b * v).collect();
                let r3 = ccc(&xa, &ya).unwrap();
                prop_assert!((r1.rho_c - r3.rho_c).abs() < 1e-9);
            }
            if let Ok(r) = ccc(&xs, &xs) {
                prop_assert_eq!(r.rho_c, 1.0);
                let shifted: Vec<f64> = xs.iter().map(|v| v + shift).collect();
                prop_assert!(ccc(&xs, &shifted).unwrap().rho_c < 1.0);
            }
        }
    }
}
