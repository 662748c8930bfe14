//! Experiment drivers: permutation-power grids over the synthetic models, the
//! independence (null-distribution) study, and raw null-statistic sampling.
//!
//! Every replication owns a stream keyed by (model, level, rep), never by
//! worker thread, so output is byte-identical for any `--threads` value.

use anyhow::{bail, Result};
use rayon::prelude::*;

use cdc_core::measures::{Measure, MeasureParams};
use cdc_core::permutation::{permutation_pvalue, PermutationConfig};
use cdc_core::rng::{replication_stream, RandomStream};
use cdc_core::synthetic::{gen_dataset, ModelId, NoiseSpec};
use cdc_core::SampleMatrix;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::csv::format_f64;

// sub-stream tags within one replication
const TAG_DATA: u64 = 10;
const TAG_TEST_BASE: u64 = 100;

pub const NOISE_LO: f64 = 1.0 / 30.0;
pub const NOISE_HI: f64 = 3.0;

/// Equally spaced noise variances from 1/30 to 3 inclusive.
pub fn noise_grid(levels: usize) -> Vec<f64> {
    if levels == 1 {
        return vec![NOISE_LO];
    }
    (0..levels)
        .map(|i| NOISE_LO + i as f64 * (NOISE_HI - NOISE_LO) / (levels - 1) as f64)
        .collect()
}

#[derive(Debug, Clone)]
pub struct PowerConfig {
    pub models: Vec<ModelId>,
    pub measures: Vec<Measure>,
    pub reps: usize,
    pub n: usize,
    pub noise_levels: usize,
    pub permutations: usize,
    pub alpha: f64,
    pub seed: u64,
    pub params: MeasureParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub model: ModelId,
    pub measure: Measure,
    pub noise_variance: f64,
    pub power: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone)]
pub struct PowerGrid {
    pub rows: Vec<PowerRow>,
    pub config: PowerConfig,
}

/// Rejection rate of each measure's permutation test across the
/// models x noise-levels x replications grid.
pub fn power_curve(config: &PowerConfig) -> Result<PowerGrid> {
    if config.reps < 1 {
        bail!("reps must be at least 1");
    }
    if config.models.is_empty() || config.measures.is_empty() {
        bail!("at least one model and one measure are required");
    }
    let grid = noise_grid(config.noise_levels);
    let perm = PermutationConfig {
        permutations: config.permutations,
        alpha: config.alpha,
    };
    perm.validate().map_err(|e| anyhow::anyhow!("{e}"))?;

    struct Task {
        model_idx: usize,
        level_idx: usize,
        rep: u64,
    }
    let mut tasks = Vec::with_capacity(config.models.len() * grid.len() * config.reps);
    for model_idx in 0..config.models.len() {
        for level_idx in 0..grid.len() {
            for rep in 0..config.reps {
                tasks.push(Task {
                    model_idx,
                    level_idx,
                    rep: rep as u64,
                });
            }
        }
    }

    let rejections: Vec<Vec<bool>> = tasks
        .par_iter()
        .map(|task| {
            let model = config.models[task.model_idx];
            let variance = grid[task.level_idx];
            let stream =
                replication_stream(config.seed, model.name(), task.level_idx as u64, task.rep);
            let noise = NoiseSpec::new(variance).expect("grid variance is valid");
            let (x, y) = gen_dataset(model, config.n, &noise, &stream.child(TAG_DATA))
                .expect("synthetic generation is infallible for valid configs");
            config
                .measures
                .iter()
                .enumerate()
                .map(|(m_idx, &measure)| {
                    let test_stream = stream.child(TAG_TEST_BASE + m_idx as u64);
                    match permutation_pvalue(&x, &y, measure, &config.params, &perm, &test_stream)
                    {
                        Ok(test) => test.p_value <= config.alpha,
                        Err(_) => false,
                    }
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for (model_idx, &model) in config.models.iter().enumerate() {
        for (m_idx, &measure) in config.measures.iter().enumerate() {
            for (level_idx, &variance) in grid.iter().enumerate() {
                let base = (model_idx * grid.len() + level_idx) * config.reps;
                let hits = (0..config.reps)
                    .filter(|&rep| rejections[base + rep][m_idx])
                    .count();
                let power = hits as f64 / config.reps as f64;
                let stderr = (power * (1.0 - power) / config.reps as f64).sqrt();
                rows.push(PowerRow {
                    model,
                    measure,
                    noise_variance: variance,
                    power,
                    stderr,
                });
            }
        }
    }
    Ok(PowerGrid {
        rows,
        config: config.clone(),
    })
}

impl PowerGrid {
    /// CSV with the stable header
    /// `model,measure,noise_variance,power,stderr,reps,n,B,alpha,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,measure,noise_variance,power,stderr,reps,n,B,alpha,seed\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.model.name(),
                row.measure.name(),
                format_f64(row.noise_variance),
                format_f64(row.power),
                format_f64(row.stderr),
                self.config.reps,
                self.config.n,
                self.config.permutations,
                format_f64(self.config.alpha),
                self.config.seed,
            ));
        }
        out
    }

    /// Mean power over the noise grid for one (model, measure).
    pub fn mean_power(&self, model: ModelId, measure: Measure) -> f64 {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.model == model && r.measure == measure)
            .map(|r| r.power)
            .collect();
        values.iter().sum::<f64>() / values.len() as f64
    }

    /// Power values for one (model, measure) in noise-grid order.
    pub fn curve(&self, model: ModelId, measure: Measure) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.model == model && r.measure == measure)
            .map(|r| (r.noise_variance, r.power))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceRow {
    pub measure: &'static str,
    pub mean: f64,
    pub variance: f64,
}

/// Null study on independent standard normal scalars: per-replication EDC and
/// RDC values, summarized by mean and sample variance.
pub fn independence_study(
    reps: usize,
    n: usize,
    seed: u64,
    params: &MeasureParams,
) -> Result<Vec<IndependenceRow>> {
    if reps < 2 {
        bail!("independence study needs reps >= 2");
    }
    let samples: Vec<(f64, f64)> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let stream = replication_stream(seed, "independence", 0, rep);
            let (x, y) = independent_normal_pair(n, &stream);
            let edc = Measure::Cdc
                .evaluate(&x, &y, params, &stream.child(3))
                .map(|r| r.statistic)
                .unwrap_or(0.0);
            let rdc = Measure::Rdc
                .evaluate(&x, &y, params, &stream.child(4))
                .map(|r| r.statistic)
                .unwrap_or(0.0);
            (edc, rdc)
        })
        .collect();

    let edc: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let rdc: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(vec![
        summarize("edc", &edc),
        summarize("rdc", &rdc),
    ])
}

fn summarize(measure: &'static str, values: &[f64]) -> IndependenceRow {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    IndependenceRow {
        measure,
        mean,
        variance,
    }
}

pub fn independence_csv(rows: &[IndependenceRow], reps: usize, n: usize, seed: u64) -> String {
    let mut out = String::from("measure,mean,variance,reps,n,seed\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.measure,
            format_f64(row.mean),
            format_f64(row.variance),
            reps,
            n,
            seed,
        ));
    }
    out
}

/// Null-statistic sample for diagnostics: one statistic per replication on
/// independent standard normal scalars.
pub fn null_sim(
    measure: Measure,
    reps: usize,
    n: usize,
    seed: u64,
    params: &MeasureParams,
) -> Result<Vec<f64>> {
    if reps < 1 {
        bail!("null-sim needs reps >= 1");
    }
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let stream = replication_stream(seed, "null-sim", 0, rep);
            let (x, y) = independent_normal_pair(n, &stream);
            measure
                .evaluate(&x, &y, params, &stream.child(3))
                .map(|r| r.statistic)
                .unwrap_or(0.0)
        })
        .collect())
}

pub fn null_sim_csv(values: &[f64]) -> String {
    let mut out = String::from("rep,statistic\n");
    for (rep, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", rep, format_f64(v)));
    }
    out
}

fn independent_normal_pair(n: usize, stream: &RandomStream) -> (SampleMatrix, SampleMatrix) {
    let mut rng_x = stream.child(1).rng();
    let mut rng_y = stream.child(2).rng();
    let x: Vec<f64> = (0..n).map(|_| rng_x.sample(StandardNormal)).collect();
    let y: Vec<f64> = (0..n).map(|_| rng_y.sample(StandardNormal)).collect();
    (
        SampleMatrix::from_column(x).expect("normal draws are finite"),
        SampleMatrix::from_column(y).expect("normal draws are finite"),
    )
}
