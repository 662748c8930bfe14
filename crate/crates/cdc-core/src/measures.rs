//! The dependence statistics: the copula dependence coefficient and the
//! baselines it is compared against (raw-ACE on scalar reductions, the
//! randomized dependence coefficient, a chi-squared contingency statistic,
//! and absolute Pearson correlation).

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ace::{ace_fit, AceConfig};
use crate::ecdf::{copula_transform, CopulaVector};
use crate::error::{CdcError, Result};
use crate::linalg::{largest_singular_value, symmetric_eigen};
use crate::matrix::SampleMatrix;
use crate::rng::RandomStream;

/// A named statistic value with optional permutation p-value and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub name: &'static str,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl MeasureResult {
    fn new(name: &'static str, statistic: f64) -> Self {
        MeasureResult {
            name,
            statistic,
            p_value: None,
            metadata: BTreeMap::new(),
        }
    }

    fn tag(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}

/// Copula dependence coefficient: maximal correlation between the joint-ECDF
/// transforms of the two sets. Degenerate inputs (all ties on either side)
/// yield statistic 0 with a diagnostic flag instead of an error, so
/// replication loops never abort.
pub fn cdc(x: &SampleMatrix, y: &SampleMatrix, config: &AceConfig) -> Result<MeasureResult> {
    check_paired(x, y)?;
    let w = copula_transform(x)?;
    let v = copula_transform(y)?;
    match ace_fit(w.values(), v.values(), config) {
        Ok(fit) => Ok(MeasureResult::new("cdc", fit.r)
            .tag("iterations", fit.iterations)
            .tag("converged", fit.converged)),
        Err(CdcError::DegenerateInput(what)) => {
            Ok(MeasureResult::new("cdc", 0.0).tag("degenerate", what))
        }
        Err(e) => Err(e),
    }
}

/// Raw-ACE baseline: maximal correlation between per-set scalar reductions
/// (row means) of the untransformed data. This stands in for the paper's
/// multivariate ACE run, which the bivariate iteration cannot express.
pub fn ace_baseline(x: &SampleMatrix, y: &SampleMatrix, config: &AceConfig) -> Result<MeasureResult> {
    check_paired(x, y)?;
    let u = x.row_means();
    let z = y.row_means();
    match ace_fit(&u, &z, config) {
        Ok(fit) => Ok(MeasureResult::new("ace", fit.r)
            .tag("iterations", fit.iterations)
            .tag("converged", fit.converged)
            .tag("reduction", "row-mean")),
        Err(CdcError::DegenerateInput(what)) => {
            Ok(MeasureResult::new("ace", 0.0).tag("degenerate", what))
        }
        Err(e) => Err(e),
    }
}

/// Randomized dependence coefficient configuration.
///
/// Copula scores are mapped to angles on [0, 2pi] and projected through
/// Gaussian weights with variance `scale` plus uniform phases, one sinusoid
/// per projection. `ridge` regularizes the canonical-correlation step as a
/// relative eigenvalue cutoff: feature directions with variance below
/// `ridge * lambda_max` are discarded before whitening, mirroring the rank
/// truncation of the reference implementation's QR step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdcConfig {
    pub feature_count: usize,
    pub scale: f64,
    pub ridge: f64,
    pub stream: RandomStream,
}

impl RdcConfig {
    pub fn new(stream: RandomStream) -> Self {
        RdcConfig {
            feature_count: 20,
            scale: 1.0 / 6.0,
            ridge: 1e-12,
            stream,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.feature_count < 1 {
            return Err(CdcError::InvalidConfig("feature_count must be at least 1"));
        }
        if !(self.scale > 0.0) {
            return Err(CdcError::InvalidConfig("scale must be positive"));
        }
        if !(self.ridge > 0.0) {
            return Err(CdcError::InvalidConfig("ridge must be positive"));
        }
        Ok(())
    }
}

/// Randomized dependence coefficient: largest canonical correlation between
/// random sinusoidal features of the per-column ECDF transforms.
pub fn rdc(x: &SampleMatrix, y: &SampleMatrix, config: &RdcConfig) -> Result<MeasureResult> {
    config.validate()?;
    check_paired(x, y)?;
    let n = x.n_rows();
    if n <= 2 * config.feature_count {
        return Err(CdcError::DegenerateInput(
            "rdc needs n > 2k samples for a stable canonical correlation",
        ));
    }
    let mut rng = config.stream.rng();
    let fx = sinusoid_features(x, config, &mut rng);
    let fy = sinusoid_features(y, config, &mut rng);
    let (ux, mx) = whiten_columns(fx, n, config.feature_count, config.ridge);
    let (uy, my) = whiten_columns(fy, n, config.feature_count, config.ridge);
    if mx == 0 || my == 0 {
        return Err(CdcError::Numeric(
            "feature covariance collapsed below the ridge cutoff",
        ));
    }
    let statistic = canonical_correlation(&ux, mx, &uy, my, n);
    Ok(MeasureResult::new("rdc", statistic)
        .tag("feature_count", config.feature_count)
        .tag("scale", config.scale)
        .tag("ridge", config.ridge)
        .tag("kept_dims_x", mx)
        .tag("kept_dims_y", my)
        .tag("feature_map", "sin(2*pi*ecdf * w + phase), w ~ N(0, scale)"))
}

/// Chi-squared contingency statistic over equal-width bins of two copula
/// score vectors; tends to a chi-squared with (k-1)^2 degrees of freedom
/// under independence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chi2Config {
    pub bins_per_axis: usize,
}

impl Default for Chi2Config {
    fn default() -> Self {
        Chi2Config { bins_per_axis: 5 }
    }
}

pub fn chi2_statistic(w: &CopulaVector, v: &CopulaVector, config: &Chi2Config) -> Result<MeasureResult> {
    if config.bins_per_axis < 2 {
        return Err(CdcError::InvalidConfig("bins_per_axis must be at least 2"));
    }
    if w.len() != v.len() {
        return Err(CdcError::LengthMismatch {
            left: w.len(),
            right: v.len(),
        });
    }
    if w.is_empty() {
        return Err(CdcError::EmptyInput);
    }
    let k = config.bins_per_axis;
    let n = w.len();
    let w_cells: Vec<usize> = w.values().iter().map(|&u| bin_index(u, k)).collect();
    let v_cells: Vec<usize> = v.values().iter().map(|&u| bin_index(u, k)).collect();
    let (statistic, empty_marginals) = chi2_from_cells(&w_cells, &v_cells, k);
    let mut result = MeasureResult::new("chi2", statistic)
        .tag("df", (k - 1) * (k - 1))
        .tag("bins_per_axis", k);
    if k * k > n {
        result = result.tag("sparse_bins", "true");
    }
    if empty_marginals > 0 {
        result = result.tag("empty_marginals", empty_marginals);
    }
    Ok(result)
}

// right-closed equal-width bins of (0, 1]; zero maps into the first cell
fn bin_index(u: f64, k: usize) -> usize {
    if u <= 0.0 {
        return 0;
    }
    let cell = (u * k as f64).ceil() as usize;
    cell.saturating_sub(1).min(k - 1)
}

fn chi2_from_cells(w_cells: &[usize], v_cells: &[usize], k: usize) -> (f64, usize) {
    let n = w_cells.len() as f64;
    let mut counts = vec![0u64; k * k];
    for (&a, &b) in w_cells.iter().zip(v_cells) {
        counts[a * k + b] += 1;
    }
    let mut row_tot = vec![0u64; k];
    let mut col_tot = vec![0u64; k];
    for a in 0..k {
        for b in 0..k {
            row_tot[a] += counts[a * k + b];
            col_tot[b] += counts[a * k + b];
        }
    }
    let mut statistic = 0.0;
    for a in 0..k {
        for b in 0..k {
            let expected = row_tot[a] as f64 * col_tot[b] as f64 / n;
            if expected > 0.0 {
                let diff = counts[a * k + b] as f64 - expected;
                statistic += diff * diff / expected;
            }
        }
    }
    let empty = row_tot.iter().filter(|&&t| t == 0).count()
        + col_tot.iter().filter(|&&t| t == 0).count();
    (statistic, empty)
}

/// Absolute sample Pearson correlation of two scalar samples; constant input
/// yields statistic 0 with a flag.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<MeasureResult> {
    if x.len() != y.len() {
        return Err(CdcError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(CdcError::DegenerateInput("pearson needs n >= 2"));
    }
    match abs_correlation(x, y) {
        Some(r) => Ok(MeasureResult::new("pearson", r)),
        None => Ok(MeasureResult::new("pearson", 0.0).tag("constant_input", "true")),
    }
}

/// Pearson baseline for variable sets: the maximum absolute pairwise
/// correlation across coordinate pairs.
pub fn pearson_matrices(x: &SampleMatrix, y: &SampleMatrix) -> Result<MeasureResult> {
    check_paired(x, y)?;
    if x.n_rows() < 2 {
        return Err(CdcError::DegenerateInput("pearson needs n >= 2"));
    }
    let mut best: Option<f64> = None;
    for i in 0..x.n_cols() {
        let xi = x.column(i);
        for j in 0..y.n_cols() {
            if let Some(r) = abs_correlation(&xi, &y.column(j)) {
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
    }
    match best {
        Some(r) => Ok(MeasureResult::new("pearson", r)),
        None => Ok(MeasureResult::new("pearson", 0.0).tag("constant_input", "true")),
    }
}

fn abs_correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).abs().min(1.0))
}

fn check_paired(x: &SampleMatrix, y: &SampleMatrix) -> Result<()> {
    if x.n_rows() != y.n_rows() {
        return Err(CdcError::LengthMismatch {
            left: x.n_rows(),
            right: y.n_rows(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// RDC internals
// ---------------------------------------------------------------------------

// n x k row-major sinusoid features of the per-column ECDF scores
fn sinusoid_features<R: Rng>(data: &SampleMatrix, config: &RdcConfig, rng: &mut R) -> Vec<f64> {
    let n = data.n_rows();
    let d = data.n_cols();
    let k = config.feature_count;
    let sd = config.scale.sqrt();
    let tau = 2.0 * core::f64::consts::PI;

    // angles: per-column ECDF mapped onto [0, 2pi]
    let mut angles = vec![0.0; n * d];
    for j in 0..d {
        let col = data.column(j);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("finite"));
        let mut i = 0;
        while i < n {
            let mut hi = i;
            while hi + 1 < n && col[order[hi + 1]] == col[order[i]] {
                hi += 1;
            }
            let score = (hi + 1) as f64 / n as f64;
            for t in i..=hi {
                angles[order[t] * d + j] = tau * score;
            }
            i = hi + 1;
        }
    }

    // weights over (d + 1) inputs (angles plus intercept), then phases
    let mut weights = vec![0.0; (d + 1) * k];
    for w in weights.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *w = sd * z;
    }
    let mut phases = vec![0.0; k];
    for p in phases.iter_mut() {
        *p = (rng.random::<f64>() * 2.0 - 1.0) * core::f64::consts::PI;
    }

    let mut features = vec![0.0; n * k];
    for i in 0..n {
        for f in 0..k {
            let mut proj = weights[d * k + f]; // intercept row
            for j in 0..d {
                proj += angles[i * d + j] * weights[j * k + f];
            }
            features[i * k + f] = (proj + phases[f]).sin();
        }
    }
    features
}

// Center columns, eigendecompose the covariance, drop directions below
// ridge * lambda_max, and return the whitened n x m basis (orthonormal
// columns).
fn whiten_columns(mut features: Vec<f64>, n: usize, k: usize, ridge: f64) -> (Vec<f64>, usize) {
    for f in 0..k {
        let mean = (0..n).map(|i| features[i * k + f]).sum::<f64>() / n as f64;
        for i in 0..n {
            features[i * k + f] -= mean;
        }
    }
    let mut cov = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let mut s = 0.0;
            for i in 0..n {
                s += features[i * k + a] * features[i * k + b];
            }
            s /= n as f64;
            cov[a * k + b] = s;
            cov[b * k + a] = s;
        }
    }
    let (eigenvalues, vectors) = symmetric_eigen(&cov, k);
    let lambda_max = eigenvalues.iter().copied().fold(0.0f64, f64::max);
    if lambda_max <= 0.0 {
        return (Vec::new(), 0);
    }
    let kept: Vec<usize> = (0..k)
        .filter(|&i| eigenvalues[i] >= ridge * lambda_max && eigenvalues[i] > 0.0)
        .collect();
    let m = kept.len();
    let mut basis = vec![0.0; n * m];
    for (t, &e) in kept.iter().enumerate() {
        let norm = (n as f64 * eigenvalues[e]).sqrt();
        for i in 0..n {
            let mut s = 0.0;
            for f in 0..k {
                s += features[i * k + f] * vectors[f * k + e];
            }
            basis[i * m + t] = s / norm;
        }
    }
    (basis, m)
}

// Largest singular value of Ux^T Uy for whitened bases; clamped into [0, 1].
fn canonical_correlation(ux: &[f64], mx: usize, uy: &[f64], my: usize, n: usize) -> f64 {
    let mut cross = vec![0.0; mx * my];
    for a in 0..mx {
        for b in 0..my {
            let mut s = 0.0;
            for i in 0..n {
                s += ux[i * mx + a] * uy[i * my + b];
            }
            cross[a * my + b] = s;
        }
    }
    largest_singular_value(&cross, mx, my).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Measure registry and permutation-ready preparation
// ---------------------------------------------------------------------------

/// The measures the experiment harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Cdc,
    AceBaseline,
    Rdc,
    Chi2,
    Pearson,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Cdc => "cdc",
            Measure::AceBaseline => "ace",
            Measure::Rdc => "rdc",
            Measure::Chi2 => "chi2",
            Measure::Pearson => "pearson",
        }
    }

    pub fn parse(name: &str) -> Option<Measure> {
        match name {
            "cdc" => Some(Measure::Cdc),
            "ace" => Some(Measure::AceBaseline),
            "rdc" => Some(Measure::Rdc),
            "chi2" => Some(Measure::Chi2),
            "pearson" => Some(Measure::Pearson),
            _ => None,
        }
    }

    pub fn all() -> [Measure; 5] {
        [
            Measure::Cdc,
            Measure::AceBaseline,
            Measure::Rdc,
            Measure::Chi2,
            Measure::Pearson,
        ]
    }

    /// One-shot evaluation on a pair of sample sets.
    pub fn evaluate(
        self,
        x: &SampleMatrix,
        y: &SampleMatrix,
        params: &MeasureParams,
        stream: &RandomStream,
    ) -> Result<MeasureResult> {
        match self {
            Measure::Cdc => cdc(x, y, &params.ace),
            Measure::AceBaseline => ace_baseline(x, y, &params.ace),
            Measure::Rdc => rdc(x, y, &params.rdc_config(*stream)),
            Measure::Chi2 => {
                check_paired(x, y)?;
                let w = copula_transform(x)?;
                let v = copula_transform(y)?;
                chi2_statistic(&w, &v, &Chi2Config { bins_per_axis: params.chi2_bins })
            }
            Measure::Pearson => pearson_matrices(x, y),
        }
    }
}

/// Shared statistic parameters used by the harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    pub ace: AceConfig,
    pub rdc_feature_count: usize,
    pub rdc_scale: f64,
    pub rdc_ridge: f64,
    pub chi2_bins: usize,
}

impl Default for MeasureParams {
    fn default() -> Self {
        MeasureParams {
            ace: AceConfig::default(),
            rdc_feature_count: 20,
            rdc_scale: 1.0 / 6.0,
            rdc_ridge: 1e-12,
            chi2_bins: 5,
        }
    }
}

impl MeasureParams {
    fn rdc_config(&self, stream: RandomStream) -> RdcConfig {
        RdcConfig {
            feature_count: self.rdc_feature_count,
            scale: self.rdc_scale,
            ridge: self.rdc_ridge,
            stream,
        }
    }
}

/// A measure bound to a fixed (x, y) pair, ready to be re-evaluated under row
/// permutations of y.
///
/// All transforms that commute with row permutation (ECDF scores, random
/// features, whitened bases, bin cells) are computed once; each permutation
/// only re-runs the part of the statistic that actually changes. The value at
/// the identity permutation equals the one-shot evaluation.
pub struct PreparedMeasure {
    inner: PreparedInner,
}

enum PreparedInner {
    Ace {
        u: Vec<f64>,
        z: Vec<f64>,
        config: AceConfig,
    },
    Rdc {
        ux: Vec<f64>,
        mx: usize,
        uy: Vec<f64>,
        my: usize,
        n: usize,
    },
    Chi2 {
        w_cells: Vec<usize>,
        v_cells: Vec<usize>,
        bins: usize,
    },
    Pearson {
        x_cols: Vec<Vec<f64>>,
        y_cols: Vec<Vec<f64>>,
    },
}

impl Measure {
    pub fn prepare(
        self,
        x: &SampleMatrix,
        y: &SampleMatrix,
        params: &MeasureParams,
        stream: &RandomStream,
    ) -> Result<PreparedMeasure> {
        check_paired(x, y)?;
        let inner = match self {
            Measure::Cdc => PreparedInner::Ace {
                u: copula_transform(x)?.values().to_vec(),
                z: copula_transform(y)?.values().to_vec(),
                config: params.ace,
            },
            Measure::AceBaseline => PreparedInner::Ace {
                u: x.row_means(),
                z: y.row_means(),
                config: params.ace,
            },
            Measure::Rdc => {
                let config = params.rdc_config(*stream);
                config.validate()?;
                let n = x.n_rows();
                if n <= 2 * config.feature_count {
                    return Err(CdcError::DegenerateInput(
                        "rdc needs n > 2k samples for a stable canonical correlation",
                    ));
                }
                let mut rng = config.stream.rng();
                let fx = sinusoid_features(x, &config, &mut rng);
                let fy = sinusoid_features(y, &config, &mut rng);
                let (ux, mx) = whiten_columns(fx, n, config.feature_count, config.ridge);
                let (uy, my) = whiten_columns(fy, n, config.feature_count, config.ridge);
                PreparedInner::Rdc { ux, mx, uy, my, n }
            }
            Measure::Chi2 => {
                let k = params.chi2_bins;
                if k < 2 {
                    return Err(CdcError::InvalidConfig("bins_per_axis must be at least 2"));
                }
                let w = copula_transform(x)?;
                let v = copula_transform(y)?;
                PreparedInner::Chi2 {
                    w_cells: w.values().iter().map(|&u| bin_index(u, k)).collect(),
                    v_cells: v.values().iter().map(|&u| bin_index(u, k)).collect(),
                    bins: k,
                }
            }
            Measure::Pearson => PreparedInner::Pearson {
                x_cols: (0..x.n_cols()).map(|j| x.column(j)).collect(),
                y_cols: (0..y.n_cols()).map(|j| y.column(j)).collect(),
            },
        };
        Ok(PreparedMeasure { inner })
    }
}

impl PreparedMeasure {
    /// Statistic under an optional row permutation of the y side.
    pub fn statistic(&self, permutation: Option<&[usize]>) -> Result<f64> {
        match &self.inner {
            PreparedInner::Ace { u, z, config } => {
                let permuted;
                let z_view: &[f64] = match permutation {
                    Some(p) => {
                        permuted = apply_permutation(z, p);
                        &permuted
                    }
                    None => z,
                };
                Ok(ace_fit(u, z_view, config)?.r)
            }
            PreparedInner::Rdc { ux, mx, uy, my, n } => {
                if *mx == 0 || *my == 0 {
                    return Ok(0.0);
                }
                let permuted;
                let uy_view: &[f64] = match permutation {
                    Some(p) => {
                        let mut buf = vec![0.0; uy.len()];
                        for (i, &src) in p.iter().enumerate() {
                            buf[i * my..(i + 1) * my]
                                .copy_from_slice(&uy[src * my..(src + 1) * my]);
                        }
                        permuted = buf;
                        &permuted
                    }
                    None => uy,
                };
                Ok(canonical_correlation(ux, *mx, uy_view, *my, *n))
            }
            PreparedInner::Chi2 { w_cells, v_cells, bins } => {
                let permuted;
                let v_view: &[usize] = match permutation {
                    Some(p) => {
                        permuted = p.iter().map(|&i| v_cells[i]).collect::<Vec<_>>();
                        &permuted
                    }
                    None => v_cells,
                };
                Ok(chi2_from_cells(w_cells, v_view, *bins).0)
            }
            PreparedInner::Pearson { x_cols, y_cols } => {
                let mut best: Option<f64> = None;
                for xc in x_cols {
                    for yc in y_cols {
                        let permuted;
                        let y_view: &[f64] = match permutation {
                            Some(p) => {
                                permuted = apply_permutation(yc, p);
                                &permuted
                            }
                            None => yc,
                        };
                        if let Some(r) = abs_correlation(xc, y_view) {
                            best = Some(best.map_or(r, |b: f64| b.max(r)));
                        }
                    }
                }
                Ok(best.unwrap_or(0.0))
            }
        }
    }
}

fn apply_permutation(v: &[f64], p: &[usize]) -> Vec<f64> {
    p.iter().map(|&i| v[i]).collect()
}
