//! Long-format tables for external plotting, read back from a run's output.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::{self, CsvIn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Word frequencies and scores of the virgin texts.
    WordscoreDistribution,
    /// Candidate concordances with the benchmark-pair thresholds.
    CccDotplot,
    /// Count and McFadden R² per fitted model.
    FitBars,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::WordscoreDistribution, PlotKind::CccDotplot, PlotKind::FitBars];

    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::WordscoreDistribution => "wordscore-distribution",
            PlotKind::CccDotplot => "ccc-dotplot",
            PlotKind::FitBars => "fit-bars",
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown plot kind `{s}`")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct PlotFilter {
    /// Only this document (wordscore-distribution).
    pub document: Option<String>,
}

/// Writes `kind` as CSV to `sink`, with `#` lines documenting the columns.
/// `from` is a run directory, or a single cell directory for word scores.
/// Returns the number of data rows.
pub fn emit_plot_data<W: Write>(from: &Path, kind: PlotKind, filter: &PlotFilter, sink: W) -> Result<usize> {
    let (doc, header, rows) = match kind {
        PlotKind::WordscoreDistribution => wordscore_rows(from, filter)?,
        PlotKind::CccDotplot => dotplot_rows(from)?,
        PlotKind::FitBars => fit_rows(from)?,
    };
    let mut sink = sink;
    let path = PathBuf::from("<plot output>");
    writeln!(sink, "# {kind}: one observation per row").map_err(|e| Error::io(&path, e))?;
    for line in doc {
        writeln!(sink, "# {line}").map_err(|e| Error::io(&path, e))?;
    }
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header).map_err(|e| Error::csv(&path, e))?;
    for r in &rows {
        w.write_record(r).map_err(|e| Error::csv(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(rows.len())
}

type Table = (Vec<&'static str>, Vec<&'static str>, Vec<Vec<String>>);

fn find_files(dir: &Path, name: &str, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            find_files(&p, name, found)?;
        } else if p.file_name().is_some_and(|f| f == name) {
            found.push(p);
        }
    }
    Ok(())
}

fn wordscore_rows(from: &Path, filter: &PlotFilter) -> Result<Table> {
    let files = if from.join("words.csv").is_file() {
        vec![from.join("words.csv")]
    } else {
        let mut found = Vec::new();
        let cells = from.join("cells");
        if cells.is_dir() {
            find_files(&cells, "words.csv", &mut found)?;
        }
        found
    };
    if files.is_empty() {
        return Err(Error::Config(format!("no words.csv under {}", from.display())));
    }
    let mut rows = Vec::new();
    for f in &files {
        let cell = f
            .parent()
            .and_then(|p| p.strip_prefix(from).ok())
            .map(|p| p.to_string_lossy().replace('\\', "/"))
            .filter(|p| !p.is_empty())
            .unwrap_or_else(|| ".".to_owned());
        let csv = CsvIn::read(f, &["document", "word", "freq", "score"])?;
        let c: Vec<usize> = ["document", "word", "freq", "score"].iter().map(|h| csv.col(h)).collect();
        for r in &csv.rows {
            if filter.document.as_deref().is_some_and(|d| d != &r[c[0]]) {
                continue;
            }
            rows.push(vec![cell.clone(), r[c[0]].to_owned(), r[c[1]].to_owned(), r[c[2]].to_owned(), r[c[3]].to_owned()]);
        }
    }
    Ok((
        vec![
            "cell: output directory of the scoring cell",
            "document: virgin text id",
            "word, freq: distinct word and its count in the document",
            "score: word score, empty when the word has none",
        ],
        vec!["cell", "document", "word", "freq", "score"],
        rows,
    ))
}

fn dotplot_rows(from: &Path) -> Result<Table> {
    let mut rows = Vec::new();
    let pairs = from.join("benchmark_pairs.csv");
    if pairs.is_file() {
        let csv = CsvIn::read(&pairs, &["dimension", "rescale", "first", "second", "rho_c", "ci_low", "ci_high"])?;
        for r in &csv.rows {
            let g = |h: &str| r[csv.col(h)].to_owned();
            rows.push(vec![
                g("dimension"),
                g("rescale"),
                "threshold".to_owned(),
                format!("{}/{}", g("first"), g("second")),
                g("rho_c"),
                g("ci_low"),
                g("ci_high"),
            ]);
        }
    }
    for l in io::read_report(&from.join("summary.csv"))? {
        rows.push(vec![
            l.dimension,
            l.rescale,
            "candidate".to_owned(),
            format!("{}/{}/{} vs {}", l.reference, l.variant, l.transformation, l.benchmark),
            io::fmt_float(l.rho_c),
            io::fmt_float(l.ci_low),
            io::fmt_float(l.ci_high),
        ]);
    }
    Ok((
        vec![
            "dimension, rescale: validation group",
            "role: threshold (benchmark vs benchmark) or candidate (run vs benchmark)",
            "label: the compared pair",
            "rho_c, ci_low, ci_high: concordance and its confidence interval",
        ],
        vec!["dimension", "rescale", "role", "label", "rho_c", "ci_low", "ci_high"],
        rows,
    ))
}

fn fit_rows(from: &Path) -> Result<Table> {
    let path = [from.join("fits").join("fit_stats.csv"), from.join("fit_stats.csv")]
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| Error::Config(format!("no fit_stats.csv under {}", from.display())))?;
    let csv = CsvIn::read(&path, &["model", "n", "count_r2", "mcfadden_r2", "bic"])?;
    let rows = csv
        .rows
        .iter()
        .map(|r| ["model", "n", "count_r2", "mcfadden_r2", "bic"].iter().map(|h| r[csv.col(h)].to_owned()).collect())
        .collect();
    Ok((
        vec![
            "model: estimate source used as predictors (null = intercept only)",
            "n: parties in the fit",
            "count_r2: share of correct class predictions",
            "mcfadden_r2: 1 - lnL/lnL(null), empty when undefined",
            "bic: -2 lnL + k ln n",
        ],
        vec!["model", "n", "count_r2", "mcfadden_r2", "bic"],
        rows,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip() {
        for k in PlotKind::ALL {
            assert_eq!(k.as_str().parse::<PlotKind>().unwrap(), k);
        }
        assert!("histogram".parse::<PlotKind>().is_err());
    }
}
