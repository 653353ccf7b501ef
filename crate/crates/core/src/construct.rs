//! Multinomial logit for construct-validity checks.
//!
//! Class 0 is the reference class with its linear predictor fixed at zero;
//! every other class gets an intercept plus one coefficient per feature.
//! Fitting is Newton-Raphson on the log-likelihood with step halving, so
//! the log-likelihood never decreases between iterations.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    parties: Vec<String>,
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    feature_names: Vec<String>,
}

impl DesignMatrix {
    /// `labels` are 0-based indices into `class_names`.
    pub fn new(
        parties: Vec<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = parties.len();
        if features.len() != n || labels.len() != n {
            return Err(Error::LengthMismatch { left: n, right: features.len().min(labels.len()) });
        }
        if class_names.len() < 2 {
            return Err(Error::InvalidArgument("need at least 2 classes".to_owned()));
        }
        let m = feature_names.len();
        for row in &features {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite predictor".to_owned()));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidArgument(format!("class index {bad} out of range")));
        }
        let mut present = alloc::vec![false; class_names.len()];
        for &l in &labels {
            present[l] = true;
        }
        if present.iter().filter(|&&p| p).count() < 2 {
            return Err(Error::InvalidArgument("fewer than 2 classes present".to_owned()));
        }
        Ok(DesignMatrix { parties, features, labels, class_names, feature_names })
    }

    /// Builds a design from labelled rows with listwise deletion of rows
    /// that miss any predictor. Classes are taken from `class_names` when
    /// given, otherwise the sorted distinct labels. Returns the design and
    /// the number of dropped rows.
    pub fn from_rows(
        rows: &[(String, String, Vec<Option<f64>>)],
        feature_names: Vec<String>,
        class_names: Option<Vec<String>>,
    ) -> Result<(Self, usize)> {
        let class_names = match class_names {
            Some(c) => c,
            None => {
                let mut c: Vec<String> = rows.iter().map(|r| r.1.clone()).collect();
                c.sort();
                c.dedup();
                c
            }
        };
        let mut parties = Vec::new();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut dropped = 0;
        for (party, label, values) in rows {
            let complete: Option<Vec<f64>> = values.iter().copied().collect();
            let Some(x) = complete else {
                dropped += 1;
                continue;
            };
            let class = class_names
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown class `{label}`")))?;
            parties.push(party.clone());
            features.push(x);
            labels.push(class);
        }
        Ok((DesignMatrix::new(parties, features, labels, class_names, feature_names)?, dropped))
    }

    pub fn n(&self) -> usize {
        self.parties.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Same rows, only the listed feature columns.
    pub fn select_features(&self, columns: &[usize]) -> Result<Self> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.n_features()) {
            return Err(Error::DimensionMismatch { expected: self.n_features(), got: bad + 1 });
        }
        Ok(DesignMatrix {
            parties: self.parties.clone(),
            features: self.features.iter().map(|r| columns.iter().map(|&c| r[c]).collect()).collect(),
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            feature_names: columns.iter().map(|&c| self.feature_names[c].clone()).collect(),
        })
    }

    /// Same rows without predictors, for the null model.
    pub fn intercept_only(&self) -> Self {
        self.select_features(&[]).expect("empty selection is always valid")
    }

    /// Keeps the rows whose party is listed, in the listed order.
    pub fn select_parties<S: AsRef<str>>(&self, parties: &[S]) -> Result<Self> {
        let idx: Vec<usize> = parties
            .iter()
            .map(|p| {
                self.parties
                    .iter()
                    .position(|q| q == p.as_ref())
                    .ok_or_else(|| Error::UnknownDocument(p.as_ref().to_owned()))
            })
            .collect::<Result<_>>()?;
        DesignMatrix::new(
            idx.iter().map(|&i| self.parties[i].clone()).collect(),
            idx.iter().map(|&i| self.features[i].clone()).collect(),
            idx.iter().map(|&i| self.labels[i]).collect(),
            self.class_names.clone(),
            self.feature_names.clone(),
        )
    }

    fn row_with_intercept(&self, i: usize) -> impl Iterator<Item = f64> + Clone + '_ {
        core::iter::once(1.0).chain(self.features[i].iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Convergence threshold on the gradient max-norm.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Coefficients are clamped to `[-clamp, clamp]`; hitting the bound
    /// signals separation.
    pub clamp: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tolerance: 1e-8, max_iterations: 100, clamp: 30.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    /// `(J - 1)` rows of `[intercept, feature_1, ..]`, one per non-reference class.
    pub coefficients: Vec<Vec<f64>>,
    pub log_likelihood: f64,
    pub n: usize,
    /// Free parameters, intercepts included.
    pub k: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Some coefficient sits at the clamp bound.
    pub separation: bool,
    /// A ridge term was needed for at least one Newton step.
    pub ridge_damped: bool,
    /// Log-likelihood after each accepted iterate, starting at the origin.
    pub trace: Vec<f64>,
}

impl ModelFit {
    pub fn n_classes(&self) -> usize {
        self.coefficients.len() + 1
    }

    pub fn n_features(&self) -> usize {
        self.coefficients.first().map_or(0, |r| r.len() - 1)
    }

    /// Coefficients in the flat layout used by [`log_likelihood`] and [`gradient`].
    pub fn flat(&self) -> Vec<f64> {
        self.coefficients.iter().flatten().copied().collect()
    }
}

fn n_params(data: &DesignMatrix) -> usize {
    (data.n_classes() - 1) * (data.n_features() + 1)
}

/// Class probabilities for one row given the flat parameter vector.
fn row_probabilities(x: impl Iterator<Item = f64> + Clone, theta: &[f64], classes: usize, out: &mut [f64]) {
    let width = theta.len() / (classes - 1);
    out[0] = 0.0;
    for j in 1..classes {
        let beta = &theta[(j - 1) * width..j * width];
        out[j] = x.clone().zip(beta).map(|(a, b)| a * b).sum();
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for p in out.iter_mut() {
        *p = libm::exp(*p - max);
        sum += *p;
    }
    for p in out.iter_mut() {
        *p /= sum;
    }
}

/// Log-likelihood at a flat parameter vector.
pub fn log_likelihood(data: &DesignMatrix, theta: &[f64]) -> f64 {
    let classes = data.n_classes();
    let width = data.n_features() + 1;
    let mut eta = alloc::vec![0.0; classes];
    let mut total = 0.0;
    for i in 0..data.n() {
        eta[0] = 0.0;
        for j in 1..classes {
            let beta = &theta[(j - 1) * width..j * width];
            eta[j] = data.row_with_intercept(i).zip(beta).map(|(a, b)| a * b).sum();
        }
        let max = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + libm::log(eta.iter().map(|e| libm::exp(e - max)).sum::<f64>());
        total += eta[data.labels[i]] - lse;
    }
    total
}

/// Analytic gradient of [`log_likelihood`].
pub fn gradient(data: &DesignMatrix, theta: &[f64]) -> Vec<f64> {
    let classes = data.n_classes();
    let width = data.n_features() + 1;
    let mut g = alloc::vec![0.0; theta.len()];
    let mut p = alloc::vec![0.0; classes];
    for i in 0..data.n() {
        row_probabilities(data.row_with_intercept(i), theta, classes, &mut p);
        for j in 1..classes {
            let resid = if data.labels[i] == j { 1.0 } else { 0.0 } - p[j];
            for (f, x) in data.row_with_intercept(i).enumerate() {
                g[(j - 1) * width + f] += resid * x;
            }
        }
    }
    g
}

/// Negative Hessian of the log-likelihood (positive semidefinite), row-major.
fn information(data: &DesignMatrix, theta: &[f64]) -> Vec<f64> {
    let classes = data.n_classes();
    let width = data.n_features() + 1;
    let dim = theta.len();
    let mut h = alloc::vec![0.0; dim * dim];
    let mut p = alloc::vec![0.0; classes];
    let mut x = alloc::vec![0.0; width];
    for i in 0..data.n() {
        row_probabilities(data.row_with_intercept(i), theta, classes, &mut p);
        for (slot, v) in x.iter_mut().zip(data.row_with_intercept(i)) {
            *slot = v;
        }
        for j in 1..classes {
            for k in 1..classes {
                let w = p[j] * (if j == k { 1.0 } else { 0.0 } - p[k]);
                if w == 0.0 {
                    continue;
                }
                for f in 0..width {
                    let row = (j - 1) * width + f;
                    for g in 0..width {
                        h[row * dim + (k - 1) * width + g] += w * x[f] * x[g];
                    }
                }
            }
        }
    }
    h
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Maximum-likelihood fit by Newton-Raphson from the origin.
///
/// Convergence needs both the gradient max-norm below `tolerance` and a
/// vanishing step; under separation the gradient can fall below tolerance
/// while coefficients still run off, so iteration continues until they hit
/// the clamp.
pub fn fit_multinomial(data: &DesignMatrix, options: FitOptions) -> Result<ModelFit> {
    let dim = n_params(data);
    let mut theta = alloc::vec![0.0; dim];
    let mut ll = log_likelihood(data, &theta);
    let mut trace = alloc::vec![ll];
    let mut last_step = 0.0;
    let mut ridge_damped = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        let g = gradient(data, &theta);
        if max_abs(&g) < options.tolerance && last_step < 1e-6 {
            break;
        }
        iterations += 1;
        let h = information(data, &theta);
        let Some((delta, ridge)) = linalg::damped_solve(&h, &g) else {
            break;
        };
        ridge_damped |= ridge > 0.0;

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let cand: Vec<f64> = theta
                .iter()
                .zip(&delta)
                .map(|(t, d)| (t + step * d).clamp(-options.clamp, options.clamp))
                .collect();
            let cand_ll = log_likelihood(data, &cand);
            if cand_ll >= ll {
                accepted = Some((cand, cand_ll));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            break;
        };
        last_step = theta.iter().zip(&next).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        theta = next;
        ll = next_ll;
        trace.push(ll);
        if last_step == 0.0 && max_abs(&g) < options.tolerance {
            break;
        }
    }

    let converged = max_abs(&gradient(data, &theta)) < options.tolerance;
    let separation = theta.iter().any(|t| t.abs() >= options.clamp);
    let width = data.n_features() + 1;
    Ok(ModelFit {
        coefficients: theta.chunks(width).map(<[f64]>::to_vec).collect(),
        log_likelihood: ll,
        n: data.n(),
        k: dim,
        converged,
        iterations,
        separation,
        ridge_damped,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub probabilities: Vec<f64>,
    /// Argmax class, lowest index on ties.
    pub class: usize,
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in p.iter().enumerate() {
        if v > p[best] {
            best = j;
        }
    }
    best
}

pub fn predict(model: &ModelFit, rows: &[Vec<f64>]) -> Result<Vec<Prediction>> {
    let m = model.n_features();
    let classes = model.n_classes();
    let theta = model.flat();
    rows.iter()
        .map(|row| {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            let mut p = alloc::vec![0.0; classes];
            let x = core::iter::once(1.0).chain(row.iter().copied());
            row_probabilities(x, &theta, classes, &mut p);
            Ok(Prediction { class: argmax(&p), probabilities: p })
        })
        .collect()
}

/// Share of rows whose predicted class equals the observed class.
pub fn count_r2(model: &ModelFit, data: &DesignMatrix) -> Result<f64> {
    let preds = predict(model, data.features())?;
    let hits = preds.iter().zip(data.labels()).filter(|(p, &l)| p.class == l).count();
    Ok(hits as f64 / data.n() as f64)
}

/// `1 - lnL(model) / lnL(null)`.
pub fn mcfadden_r2(model: &ModelFit, null: &ModelFit) -> Result<f64> {
    if model.n != null.n {
        return Err(Error::NotComparable { first: model.n, second: null.n });
    }
    if null.log_likelihood == 0.0 {
        return Err(Error::DegenerateNull);
    }
    Ok(1.0 - model.log_likelihood / null.log_likelihood)
}

/// `-2 lnL + k ln n`.
pub fn bic(model: &ModelFit) -> f64 {
    -2.0 * model.log_likelihood + model.k as f64 * libm::log(model.n as f64)
}

/// Strength of evidence for a BIC difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Evidence {
    /// |ΔBIC| ≤ 2
    Weak,
    /// 2 < |ΔBIC| ≤ 6
    Positive,
    /// 6 < |ΔBIC| ≤ 10
    Strong,
    /// |ΔBIC| > 10
    VeryStrong,
}

impl Evidence {
    pub fn from_delta(delta: f64) -> Self {
        let d = delta.abs();
        if d <= 2.0 {
            Evidence::Weak
        } else if d <= 6.0 {
            Evidence::Positive
        } else if d <= 10.0 {
            Evidence::Strong
        } else {
            Evidence::VeryStrong
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Evidence::Weak => "weak",
            Evidence::Positive => "positive",
            Evidence::Strong => "strong",
            Evidence::VeryStrong => "very strong",
        }
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    pub bic_first: f64,
    pub bic_second: f64,
    /// `bic_second - bic_first`.
    pub delta: f64,
    /// Label of the model with the lower BIC.
    pub favored: String,
    pub evidence: Evidence,
}

/// Pairwise BIC differences for fits on identical rows.
pub fn compare_models(fits: &[ModelFit], labels: &[&str]) -> Result<Vec<Comparison>> {
    if fits.len() != labels.len() {
        return Err(Error::LengthMismatch { left: fits.len(), right: labels.len() });
    }
    if let Some(bad) = fits.iter().find(|f| f.n != fits[0].n) {
        return Err(Error::NotComparable { first: fits[0].n, second: bad.n });
    }
    let bics: Vec<f64> = fits.iter().map(bic).collect();
    let mut out = Vec::new();
    for i in 0..fits.len() {
        for j in i + 1..fits.len() {
            let delta = bics[j] - bics[i];
            out.push(Comparison {
                first: labels[i].to_owned(),
                second: labels[j].to_owned(),
                bic_first: bics[i],
                bic_second: bics[j],
                delta,
                favored: if delta < 0.0 { labels[j] } else { labels[i] }.to_owned(),
                evidence: Evidence::from_delta(delta),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design(features: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> DesignMatrix {
        let m = features.first().map_or(0, Vec::len);
        DesignMatrix::new(
            (0..labels.len()).map(|i| format!("p{i}")).collect(),
            features,
            labels,
            (0..classes).map(|j| format!("c{j}")).collect(),
            (0..m).map(|f| format!("x{f}")).collect(),
        )
        .unwrap()
    }

    fn seeded(n: usize, m: usize, classes: usize, seed: u64) -> DesignMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let beta: Vec<Vec<f64>> =
            (1..classes).map(|_| (0..=m).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
        let mut feats = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut eta = vec![0.0];
            for b in &beta {
                eta.push(b[0] + x.iter().zip(&b[1..]).map(|(a, c)| a * c).sum::<f64>());
            }
            let max = eta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = eta.iter().map(|e| libm::exp(e - max)).collect();
            let s: f64 = w.iter().sum();
            let u = rng.gen_range(0.0..s);
            let mut acc = 0.0;
            let mut label = classes - 1;
            for (j, wj) in w.iter().enumerate() {
                acc += wj;
                if u < acc {
                    label = j;
                    break;
                }
            }
            // every class shows up at least once
            labels.push(if i < classes { i } else { label });
            feats.push(x);
        }
        design(feats, labels, classes)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = seeded(60, 3, 4, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let theta: Vec<f64> = (0..n_params(&data)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = gradient(&data, &theta);
            for i in 0..theta.len() {
                let mut up = theta.clone();
                let mut dn = theta.clone();
                up[i] += 1e-5;
                dn[i] -= 1e-5;
                let fd = (log_likelihood(&data, &up) - log_likelihood(&data, &dn)) / 2e-5;
                let rel = (fd - g[i]).abs() / g[i].abs().max(1e-8);
                assert!(rel < 1e-4, "param {i}: fd {fd} vs analytic {}", g[i]);
            }
        }
    }

    #[test]
    fn intercept_only_matches_frequencies() {
        let labels = [vec![0; 5], vec![1; 3], vec![2; 2]].concat();
        let data = design(vec![vec![]; 10], labels, 3);
        let fit = fit_multinomial(&data, FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert_eq!(fit.k, 2);
        let p = &predict(&fit, &[vec![]]).unwrap()[0];
        assert_abs_diff_eq!(p.probabilities[0], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(p.probabilities[1], 0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(p.probabilities[2], 0.2, epsilon = 1e-9);
        assert_eq!(count_r2(&fit, &data).unwrap(), 0.5);
        assert_eq!(mcfadden_r2(&fit, &fit).unwrap(), 0.0);
    }

    #[test]
    fn separable_data_is_flagged() {
        let feats = [vec![vec![-1.0]; 10], vec![vec![1.0]; 10]].concat();
        let labels = [vec![0; 10], vec![1; 10]].concat();
        let data = design(feats, labels, 2);
        let fit = fit_multinomial(&data, FitOptions::default()).unwrap();
        assert!(fit.separation);
        assert!(fit.coefficients[0][1].abs() <= 30.0);
        assert_eq!(count_r2(&fit, &data).unwrap(), 1.0);
        let p = &predict(&fit, &[vec![-1.0]]).unwrap()[0];
        assert!(p.probabilities[0] > 0.99);
        let null = fit_multinomial(&data.intercept_only(), FitOptions::default()).unwrap();
        let r2 = mcfadden_r2(&fit, &null).unwrap();
        assert!(r2 > 0.999 && r2 < 1.0);
    }

    #[test]
    fn loglik_trace_is_monotone() {
        let data = seeded(80, 2, 3, 3);
        let fit = fit_multinomial(&data, FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.trace.windows(2).all(|w| w[1] >= w[0]));
        assert!(fit.log_likelihood <= 0.0);
    }

    #[test]
    fn uniform_prediction_ties_to_first_class() {
        let fit = ModelFit {
            coefficients: vec![vec![0.0]; 3],
            log_likelihood: -1.0,
            n: 4,
            k: 3,
            converged: true,
            iterations: 0,
            separation: false,
            ridge_damped: false,
            trace: vec![],
        };
        let p = &predict(&fit, &[vec![]]).unwrap()[0];
        assert!(p.probabilities.iter().all(|&q| q == 0.25));
        assert_eq!(p.class, 0);
        let data = design(vec![vec![]; 4], vec![0, 1, 2, 3], 4);
        assert_eq!(count_r2(&fit, &data).unwrap(), 0.25);
        assert!(matches!(predict(&fit, &[vec![1.0]]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bic_and_categories() {
        let mut fit = ModelFit {
            coefficients: vec![vec![0.0, 0.0, 0.0]],
            log_likelihood: -10.0,
            n: 50,
            k: 3,
            converged: true,
            iterations: 1,
            separation: false,
            ridge_damped: false,
            trace: vec![],
        };
        assert_abs_diff_eq!(bic(&fit), 20.0 + 3.0 * libm::log(50.0), epsilon = 1e-12);
        assert_abs_diff_eq!(bic(&fit), 31.7361, epsilon = 1e-4);
        let mut bigger = fit.clone();
        bigger.k = 4;
        assert_abs_diff_eq!(bic(&bigger) - bic(&fit), libm::log(50.0), epsilon = 1e-12);
        fit.k = 0;
        assert_eq!(bic(&fit), 20.0);

        assert_eq!(Evidence::from_delta(0.0), Evidence::Weak);
        assert_eq!(Evidence::from_delta(7.0), Evidence::Strong);
        assert_eq!(Evidence::from_delta(-12.0), Evidence::VeryStrong);

        let mut other = bigger.clone();
        other.n = 40;
        assert!(matches!(
            compare_models(&[bigger.clone(), other], &["a", "b"]),
            Err(Error::NotComparable { .. })
        ));
    }

    #[test]
    fn mcfadden_direct_and_degenerate() {
        let mk = |ll: f64| ModelFit {
            coefficients: vec![vec![0.0]],
            log_likelihood: ll,
            n: 10,
            k: 1,
            converged: true,
            iterations: 0,
            separation: false,
            ridge_damped: false,
            trace: vec![],
        };
        assert_eq!(mcfadden_r2(&mk(-50.0), &mk(-100.0)).unwrap(), 0.5);
        assert_eq!(mcfadden_r2(&mk(0.0), &mk(0.0)), Err(Error::DegenerateNull));
    }

    #[test]
    fn independent_labels_have_low_pseudo_r2() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 400;
        let feats: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let mut labels: Vec<usize> = (0..n).map(|i| i % 4).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            labels.swap(i, j);
        }
        let data = design(feats, labels, 4);
        let fit = fit_multinomial(&data, FitOptions::default()).unwrap();
        let null = fit_multinomial(&data.intercept_only(), FitOptions::default()).unwrap();
        let r2 = mcfadden_r2(&fit, &null).unwrap();
        assert!((0.0..0.05).contains(&r2), "{r2}");
    }

    #[test]
    fn adding_predictor_never_lowers_loglik() {
        let data = seeded(120, 3, 3, 9);
        let small = data.select_features(&[0, 1]).unwrap();
        let a = fit_multinomial(&small, FitOptions::default()).unwrap();
        let b = fit_multinomial(&data, FitOptions::default()).unwrap();
        assert!(b.log_likelihood >= a.log_likelihood - 1e-9);
    }

    #[test]
    fn label_permutation_keeps_fit_statistics() {
        let data = seeded(150, 2, 3, 21);
        let perm = [2usize, 0, 1];
        let relabeled = DesignMatrix::new(
            data.parties().to_vec(),
            data.features().to_vec(),
            data.labels().iter().map(|&l| perm[l]).collect(),
            data.class_names().to_vec(),
            data.feature_names().to_vec(),
        )
        .unwrap();
        let a = fit_multinomial(&data, FitOptions::default()).unwrap();
        let b = fit_multinomial(&relabeled, FitOptions::default()).unwrap();
        assert_abs_diff_eq!(a.log_likelihood, b.log_likelihood, epsilon = 1e-8);
        assert_abs_diff_eq!(bic(&a), bic(&b), epsilon = 1e-7);
        assert_eq!(count_r2(&a, &data).unwrap(), count_r2(&b, &relabeled).unwrap());
    }

    #[test]
    fn listwise_deletion() {
        let rows = vec![
            ("a".to_owned(), "x".to_owned(), vec![Some(1.0)]),
            ("b".to_owned(), "y".to_owned(), vec![None]),
            ("c".to_owned(), "y".to_owned(), vec![Some(2.0)]),
        ];
        let (d, dropped) = DesignMatrix::from_rows(&rows, vec!["f".into()], None).unwrap();
        assert_eq!((d.n(), dropped), (2, 1));
        assert_eq!(d.class_names(), ["x", "y"]);
    }
}
