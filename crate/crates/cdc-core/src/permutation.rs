//! Permutation-test calibration: the distribution-free way to compare
//! heterogeneous statistics at a common significance level.

use rand::seq::SliceRandom;

use alloc::vec::Vec;

use crate::error::{CdcError, Result};
use crate::matrix::SampleMatrix;
use crate::measures::{Measure, MeasureParams};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationConfig {
    /// Number of row permutations of y.
    pub permutations: usize,
    /// Significance level used by power studies.
    pub alpha: f64,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig {
            permutations: 200,
            alpha: 0.05,
        }
    }
}

impl PermutationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.permutations < 1 {
            return Err(CdcError::InvalidConfig("permutations must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CdcError::InvalidConfig("alpha must be in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTest {
    /// (1 + #{permuted >= observed}) / (permutations + 1); always in (0, 1].
    pub p_value: f64,
    pub observed: f64,
    pub exceedances: usize,
    /// Permutations whose statistic failed and was scored as 0.
    pub failed_permutations: usize,
}

// stream tags for the independent sub-draws of one test
const TAG_MEASURE: u64 = 1;
const TAG_SHUFFLE: u64 = 2;

/// Permutation p-value of `measure` on the pair (x, y).
///
/// A failing statistic on any permutation scores 0 for that permutation and
/// is counted in `failed_permutations`; the test itself never aborts once the
/// inputs have passed shape validation.
pub fn permutation_pvalue(
    x: &SampleMatrix,
    y: &SampleMatrix,
    measure: Measure,
    params: &MeasureParams,
    config: &PermutationConfig,
    stream: &RandomStream,
) -> Result<PermutationTest> {
    config.validate()?;
    if x.n_rows() != y.n_rows() {
        return Err(CdcError::LengthMismatch {
            left: x.n_rows(),
            right: y.n_rows(),
        });
    }
    let prepared = measure.prepare(x, y, params, &stream.child(TAG_MEASURE))?;
    let mut failed = 0usize;
    let observed = match prepared.statistic(None) {
        Ok(s) => s,
        Err(_) => {
            failed += 1;
            0.0
        }
    };

    let n = x.n_rows();
    let mut rng = stream.child(TAG_SHUFFLE).rng();
    let mut indices: Vec<usize> = (0..n).collect();
    let mut exceedances = 0usize;
    for _ in 0..config.permutations {
        indices.shuffle(&mut rng);
        let statistic = match prepared.statistic(Some(&indices)) {
            Ok(s) => s,
            Err(_) => {
                failed += 1;
                0.0
            }
        };
        if statistic >= observed {
            exceedances += 1;
        }
    }
    let p_value = (1 + exceedances) as f64 / (config.permutations + 1) as f64;
    Ok(PermutationTest {
        p_value,
        observed,
        exceedances,
        failed_permutations: failed,
    })
}
