//! Seeded synthetic studies: generated manifestos, reference scores,
//! benchmark surveys and group labels, plus a run config tying them
//! together. Used by the tests and handy for trying the tool end to end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub countries: usize,
    pub dimensions: usize,
    pub reference_docs: usize,
    pub virgin_docs: usize,
    /// Content words; a fixed block of function words comes on top.
    pub vocabulary: usize,
    pub doc_length: usize,
    pub benchmarks: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            countries: 3,
            dimensions: 2,
            reference_docs: 5,
            virgin_docs: 8,
            vocabulary: 300,
            doc_length: 1500,
            benchmarks: 3,
            seed: 1,
        }
    }
}

const FUNCTION_WORDS: [&str; 12] =
    ["the", "and", "of", "to", "in", "we", "a", "for", "will", "our", "is", "that"];

const DIMENSION_NAMES: [&str; 4] = ["econ", "social", "eu", "lr"];

fn dimension_name(i: usize) -> String {
    DIMENSION_NAMES.get(i).map_or_else(|| format!("dim{}", i + 1), |s| (*s).to_owned())
}

/// Unique lowercase pseudo-word for index `i`.
fn content_word(i: usize) -> String {
    const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut w = String::new();
    let mut n = i;
    loop {
        w.push_str(ONSETS[n % 12]);
        n /= 12;
        w.push_str(VOWELS[n % 5]);
        n /= 5;
        if n == 0 {
            break;
        }
        n -= 1;
    }
    w.push('x');
    w
}

struct Party {
    id: String,
    position: Vec<f64>,
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        io::create_dir(dir)?;
    }
    io::write_text(path, text)
}

fn text(rng: &mut ChaCha8Rng, words: &[String], sampler: &WeightedIndex<f64>, length: usize) -> String {
    let mut s = String::new();
    for i in 0..length {
        if i > 0 {
            s.push(if i % 17 == 0 { '.' } else { ' ' });
            if i % 17 == 0 {
                s.push(' ');
            }
        }
        if i % 97 == 50 {
            let _ = write!(s, "{} ", rng.gen_range(1990..2030));
        }
        s.push_str(&words[sampler.sample(rng)]);
    }
    s.push_str(".\n");
    s
}

/// Writes a complete study into `dir` and returns the path of its run
/// config. Output is a pure function of `spec`.
pub fn write_study(dir: &Path, spec: &SynthSpec) -> Result<PathBuf> {
    if spec.countries == 0 || spec.dimensions == 0 || spec.reference_docs < 2 || spec.virgin_docs < 2 {
        return Err(Error::Config("synthetic study needs ≥1 country and dimension, ≥2 texts per role".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dims: Vec<String> = (0..spec.dimensions).map(dimension_name).collect();
    let mut words: Vec<String> = FUNCTION_WORDS.iter().map(|w| (*w).to_owned()).collect();
    let loadings: Vec<Vec<f64>> = (0..spec.vocabulary)
        .map(|_| (0..spec.dimensions).map(|_| rng.gen_range(-1.5..1.5)).collect())
        .collect();
    words.extend((0..spec.vocabulary).map(content_word));

    let weights = |pos: &[f64]| -> WeightedIndex<f64> {
        let mut w: Vec<f64> = vec![12.0; FUNCTION_WORDS.len()];
        w.extend(loadings.iter().map(|l| {
            let eta: f64 = l.iter().zip(pos).map(|(a, b)| a * b).sum();
            (1.2 * eta).exp()
        }));
        WeightedIndex::new(w).expect("positive weights")
    };

    let mut config = String::new();
    let _ = writeln!(config, "seed = {}", spec.seed);
    let _ = writeln!(config, "dimensions = {}", dims.join(", "));
    let _ = writeln!(config, "variants = total, cooccur");
    let _ = writeln!(config, "transforms = lbg, mv");
    let _ = writeln!(config, "rescale = wd, pc");
    let _ = writeln!(config, "top_k = {}", FUNCTION_WORDS.len());
    let _ = writeln!(config, "out = out");
    let _ = writeln!(config, "crosswalk = crosswalk.csv");

    let mut scores = String::from("doc_id,dimension,score\n");
    let mut external = String::from("party_id,country,dimension,source,score\n");
    let mut crosswalk = String::from("doc_id,party_id,country\n");
    let mut groups = String::from("party_id,class_label\n");

    for c in 0..spec.countries {
        let country = format!("C{}", c + 1);
        let mut ref_manifest = String::from("id,label,country,year,path\n");
        let mut vir_manifest = String::from("id,label,country,year,path\n");
        let position = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..spec.dimensions).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let reference: Vec<Party> = (0..spec.reference_docs)
            .map(|i| Party { id: format!("{country}-r{}", i + 1), position: position(&mut rng) })
            .collect();
        let virgin: Vec<Party> = (0..spec.virgin_docs)
            .map(|i| Party { id: format!("{country}-p{}", i + 1), position: position(&mut rng) })
            .collect();

        for p in &reference {
            let file = format!("{country}/texts/{}.txt", p.id);
            let body = text(&mut rng, &words, &weights(&p.position), spec.doc_length);
            write(&dir.join(&file), &body)?;
            let _ = writeln!(ref_manifest, "{},{} 2004,{country},2004,texts/{}.txt", p.id, p.id, p.id);
            for (d, name) in dims.iter().enumerate() {
                let noise: f64 = rng.gen_range(-0.3..0.3);
                let _ = writeln!(scores, "{},{name},{}", p.id, io::fmt_float(10.0 + 10.0 * p.position[d] + noise));
            }
        }
        for p in &virgin {
            let doc = format!("{}-2009", p.id);
            let file = format!("{country}/texts/{doc}.txt");
            let body = text(&mut rng, &words, &weights(&p.position), spec.doc_length);
            write(&dir.join(&file), &body)?;
            let _ = writeln!(vir_manifest, "{doc},{} 2009,{country},2009,texts/{doc}.txt", p.id);
            let _ = writeln!(crosswalk, "{doc},{},{country}", p.id);
            for b in 0..spec.benchmarks {
                for (d, name) in dims.iter().enumerate() {
                    let spread = 0.4 + 0.3 * b as f64;
                    let noise: f64 = rng.gen_range(-spread..spread);
                    let score = (5.0 + 5.0 * p.position[d] + noise).clamp(0.0, 10.0);
                    let _ = writeln!(external, "{},{country},{name},B{},{}", p.id, b + 1, io::fmt_float(score));
                }
            }
            let label = match (p.position[0] >= 0.0, p.position.get(1).is_some_and(|&x| x >= 0.0)) {
                (false, false) => "G1",
                (false, true) => "G2",
                (true, false) => "G3",
                (true, true) => "G4",
            };
            let _ = writeln!(groups, "{},{label}", p.id);
        }
        write(&dir.join(&country).join("reference.csv"), &ref_manifest)?;
        write(&dir.join(&country).join("virgin.csv"), &vir_manifest)?;
        let _ = writeln!(config, "\n[country {country}]\nreference = {country}/reference.csv\nvirgin = {country}/virgin.csv");
    }

    write(&dir.join("scores.csv"), &scores)?;
    write(&dir.join("crosswalk.csv"), &crosswalk)?;
    let _ = writeln!(config, "\n[source EXP]\nscores = scores.csv");
    if spec.benchmarks > 0 {
        write(&dir.join("external.csv"), &external)?;
        for b in 0..spec.benchmarks {
            let _ = writeln!(config, "\n[benchmark B{}]\nfile = external.csv\nscale = 0, 10", b + 1);
        }
        write(&dir.join("groups.csv"), &groups)?;
        let _ = writeln!(config, "\n[construct]\nlabels = groups.csv");
    }
    let path = dir.join("study.conf");
    write(&path, &config)?;
    Ok(path)
}
