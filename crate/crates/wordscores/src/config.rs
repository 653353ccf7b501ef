//! Run configuration: flat `key = value` lines with repeatable section
//! blocks for the grid axes that carry files.
//!
//! ```text
//! out = results
//! seed = 7
//! dimensions = econ, eu
//! variants = total, cooccur
//! transforms = lbg, mv
//!
//! [country GB]
//! reference = gb/reference.csv
//! virgin = gb/virgin.csv
//!
//! [source BL]
//! scores = bl_scores.csv
//! anchor.GB.econ = gb-lab, gb-con
//!
//! [benchmark CHES]
//! file = external.csv
//! scale = 0, 10
//!
//! [construct]
//! labels = groups.csv
//! dimensions = econ, eu
//! ```
//!
//! Relative paths resolve against the config file's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use wordscores_core::corpus::PreprocessConfig;
use wordscores_core::scaling::{FrequencyBasis, TransformKind, Variant};
use wordscores_core::validation::{CiMethod, RescaleMode, Scale};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CountrySpec {
    pub name: String,
    pub reference: PathBuf,
    pub virgin: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub name: String,
    pub scores: PathBuf,
    /// MV anchors per `(country, dimension)`; unlisted cells use the
    /// reference texts with the lowest and highest score.
    pub anchors: BTreeMap<(String, String), (String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub name: String,
    pub file: PathBuf,
    pub scale: Scale,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructSpec {
    /// CSV `party_id,class_label`.
    pub labels: PathBuf,
    pub dimensions: Vec<String>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub out: PathBuf,
    pub seed: u64,
    pub dimensions: Vec<String>,
    pub variants: Vec<Variant>,
    pub transforms: Vec<TransformKind>,
    pub rescale: Vec<RescaleMode>,
    pub preprocess: PreprocessConfig,
    pub frequency: FrequencyBasis,
    pub level: f64,
    /// Bootstrap resamples for concordance intervals; 0 selects the
    /// asymptotic interval.
    pub bootstrap: usize,
    pub crosswalk: Option<PathBuf>,
    pub countries: Vec<CountrySpec>,
    pub sources: Vec<SourceSpec>,
    pub benchmarks: Vec<BenchmarkSpec>,
    pub construct: Option<ConstructSpec>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let sections = split_sections(text)?;
        let mut cfg = RunConfig {
            out: base.join("wordscores-out"),
            seed: 0,
            dimensions: Vec::new(),
            variants: Variant::ALL.to_vec(),
            transforms: vec![TransformKind::Lbg, TransformKind::Mv],
            rescale: vec![RescaleMode::WholeDimension, RescaleMode::PerCountry],
            preprocess: PreprocessConfig::default(),
            frequency: FrequencyBasis::Relative,
            level: 0.95,
            bootstrap: 0,
            crosswalk: None,
            countries: Vec::new(),
            sources: Vec::new(),
            benchmarks: Vec::new(),
            construct: None,
        };
        for s in sections {
            let mut s = s;
            match (s.kind.as_str(), s.name.as_deref()) {
                ("", None) => cfg.globals(&mut s, base)?,
                ("country", Some(name)) => {
                    let name = name.to_owned();
                    cfg.countries.push(CountrySpec {
                        reference: base.join(s.required("reference")?),
                        virgin: base.join(s.required("virgin")?),
                        name,
                    });
                }
                ("source", Some(name)) => {
                    let name = name.to_owned();
                    let scores = base.join(s.required("scores")?);
                    let mut anchors = BTreeMap::new();
                    for key in s.keys_with_prefix("anchor.") {
                        let value = s.take(&key).expect("key listed");
                        let cell: Vec<&str> = key["anchor.".len()..].splitn(2, '.').collect();
                        let pair = list(&value);
                        match (&cell[..], &pair[..]) {
                            ([c, d], [a, b]) => {
                                anchors.insert((c.to_string(), d.to_string()), (a.clone(), b.clone()));
                            }
                            _ => {
                                return Err(Error::Config(format!(
                                    "`{key}` must be `anchor.<country>.<dimension> = <doc>, <doc>`"
                                )))
                            }
                        }
                    }
                    cfg.sources.push(SourceSpec { name, scores, anchors });
                }
                ("benchmark", Some(name)) => {
                    let name = name.to_owned();
                    let file = base.join(s.required("file")?);
                    let scale = match s.take("scale") {
                        None => Scale::Empirical,
                        Some(v) if v == "empirical" => Scale::Empirical,
                        Some(v) => match list(&v)[..] {
                            [ref lo, ref hi] => Scale::Declared { min: number(lo, "scale")?, max: number(hi, "scale")? },
                            _ => return Err(Error::Config(format!("scale `{v}` must be `min, max` or `empirical`"))),
                        },
                    };
                    cfg.benchmarks.push(BenchmarkSpec { name, file, scale });
                }
                ("construct", None) => {
                    cfg.construct = Some(ConstructSpec {
                        labels: base.join(s.required("labels")?),
                        dimensions: s.take("dimensions").map(|v| list(&v)).unwrap_or_default(),
                        tolerance: s.parsed("tolerance")?.unwrap_or(1e-8),
                        max_iterations: s.parsed("max_iterations")?.unwrap_or(100),
                    });
                }
                (kind, name) => {
                    return Err(Error::Config(format!(
                        "line {}: unknown section [{kind}{}]",
                        s.line,
                        name.map(|n| format!(" {n}")).unwrap_or_default()
                    )))
                }
            }
            s.finish()?;
        }
        if let Some(c) = cfg.construct.as_mut() {
            if c.dimensions.is_empty() {
                c.dimensions = cfg.dimensions.clone();
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn globals(&mut self, s: &mut Section, base: &Path) -> Result<()> {
        if let Some(v) = s.take("out") {
            self.out = base.join(v);
        }
        if let Some(v) = s.parsed("seed")? {
            self.seed = v;
        }
        if let Some(v) = s.take("dimensions") {
            self.dimensions = list(&v);
        }
        if let Some(v) = s.take("variants") {
            self.variants = parse_list(&v, "variants")?;
        }
        if let Some(v) = s.take("transforms") {
            self.transforms = parse_list(&v, "transforms")?;
        }
        if let Some(v) = s.take("rescale") {
            self.rescale = parse_list(&v, "rescale")?;
        }
        if let Some(v) = s.parsed("top_k")? {
            self.preprocess.top_k_stopwords = v;
        }
        if let Some(v) = s.parsed("strip_numbers")? {
            self.preprocess.strip_numbers = v;
        }
        if let Some(v) = s.parsed("strip_currency")? {
            self.preprocess.strip_currency = v;
        }
        if let Some(v) = s.parsed("stemming")? {
            self.preprocess.stemming = v;
        }
        self.preprocess.min_doc_fraction = s.parsed("min_doc_fraction")?;
        self.preprocess.max_doc_fraction = s.parsed("max_doc_fraction")?;
        if let Some(v) = s.take("frequency") {
            self.frequency = match v.as_str() {
                "relative" => FrequencyBasis::Relative,
                "raw" => FrequencyBasis::Raw,
                _ => return Err(Error::Config(format!("frequency `{v}` must be `relative` or `raw`"))),
            };
        }
        if let Some(v) = s.parsed("level")? {
            self.level = v;
        }
        if let Some(v) = s.parsed("bootstrap")? {
            self.bootstrap = v;
        }
        if let Some(v) = s.take("crosswalk") {
            self.crosswalk = Some(base.join(v));
        }
        Ok(())
    }

    fn check(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.countries.is_empty() {
            return fail("no [country] section".into());
        }
        if self.sources.is_empty() {
            return fail("no [source] section".into());
        }
        if self.dimensions.is_empty() {
            return fail("`dimensions` is empty".into());
        }
        if self.variants.is_empty() || self.transforms.is_empty() || self.rescale.is_empty() {
            return fail("`variants`, `transforms` and `rescale` need at least one entry".into());
        }
        if !(0.0..1.0).contains(&self.level) {
            return fail(format!("level {} must lie in [0, 1)", self.level));
        }
        for (what, names) in [
            ("country", self.countries.iter().map(|c| &c.name).collect::<Vec<_>>()),
            ("source", self.sources.iter().map(|c| &c.name).collect()),
            ("benchmark", self.benchmarks.iter().map(|c| &c.name).collect()),
            ("dimension", self.dimensions.iter().collect()),
        ] {
            let mut sorted = names.clone();
            sorted.sort();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return fail(format!("{what} `{}` listed twice", w[0]));
            }
        }
        self.preprocess.validate()?;
        Ok(())
    }

    /// The CI method for concordance intervals, seeded by `seed`.
    pub fn ci_method(&self, seed: u64) -> CiMethod {
        if self.bootstrap == 0 {
            CiMethod::Asymptotic
        } else {
            CiMethod::Bootstrap { resamples: self.bootstrap, seed }
        }
    }

    /// Every input file named by the config.
    pub fn input_files(&self) -> Vec<&Path> {
        let mut files: Vec<&Path> = Vec::new();
        for c in &self.countries {
            files.push(&c.reference);
            files.push(&c.virgin);
        }
        files.extend(self.sources.iter().map(|s| s.scores.as_path()));
        files.extend(self.benchmarks.iter().map(|b| b.file.as_path()));
        files.extend(self.crosswalk.as_deref());
        files.extend(self.construct.as_ref().map(|c| c.labels.as_path()));
        files
    }
}

fn list(value: &str) -> Vec<String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    list(value)
        .iter()
        .map(|v| v.parse().map_err(|_| Error::Config(format!("`{key}`: unknown entry `{v}`"))))
        .collect()
}

fn number(value: &str, key: &str) -> Result<f64> {
    value.parse().map_err(|_| Error::Config(format!("`{key}`: `{value}` is not a number")))
}

struct Section {
    kind: String,
    name: Option<String>,
    line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| {
            Error::Config(format!(
                "line {}: [{} {}] needs `{key}`",
                self.line,
                self.kind,
                self.name.as_deref().unwrap_or("")
            ))
        })
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        let Some((line, v)) = self.entries.remove(key) else { return Ok(None) };
        v.parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("line {line}: cannot parse `{key} = {v}`")))
    }

    fn keys_with_prefix(&self, prefix: &str) -> Vec<String> {
        self.entries.keys().filter(|k| k.starts_with(prefix)).cloned().collect()
    }

    fn finish(self) -> Result<()> {
        match self.entries.iter().min_by_key(|(_, (line, _))| *line) {
            Some((key, (line, _))) => Err(Error::Config(format!("line {line}: unknown key `{key}`"))),
            None => Ok(()),
        }
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections =
        vec![Section { kind: String::new(), name: None, line: 0, entries: BTreeMap::new() }];
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {n}: unterminated section header")))?;
            let mut parts = inner.split_whitespace();
            let kind = parts.next().unwrap_or_default().to_owned();
            let name = parts.next().map(str::to_owned);
            if parts.next().is_some() {
                return Err(Error::Config(format!("line {n}: section names cannot contain spaces")));
            }
            sections.push(Section { kind, name, line: n, entries: BTreeMap::new() });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {n}: expected `key = value`")))?;
        let key = key.trim().to_owned();
        let current = sections.last_mut().expect("global section always present");
        if current.entries.insert(key.clone(), (n, value.trim().to_owned())).is_some() {
            return Err(Error::Config(format!("line {n}: `{key}` set twice in one section")));
        }
    }
    Ok(sections)
}
