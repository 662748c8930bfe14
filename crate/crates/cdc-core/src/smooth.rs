//! Scatterplot smoothers estimating E[z | u], the inner step of the ACE
//! iteration.
//!
//! The default is a symmetric k-nearest-neighbor running mean over the
//! u-ordering: deterministic, rank-equivariant (it sees only the ordering and
//! tie pattern of `u`), and cheap. Friedman's variable-span supersmoother is
//! available behind the config for closer agreement with the classic ACE
//! implementation; it uses the u-values themselves for its local linear fits.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CdcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    RunningMean,
    SuperSmoother,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherConfig {
    /// Window width as a fraction of the sample size.
    pub span: f64,
    /// Floor on the window size.
    pub min_window: usize,
    pub kind: SmootherKind,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig {
            span: 0.3,
            min_window: 2,
            kind: SmootherKind::RunningMean,
        }
    }
}

impl SmootherConfig {
    pub fn supersmoother() -> Self {
        SmootherConfig {
            kind: SmootherKind::SuperSmoother,
            ..SmootherConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.span > 0.0 && self.span <= 1.0) {
            return Err(CdcError::InvalidConfig("span must be in (0, 1]"));
        }
        if self.min_window < 1 {
            return Err(CdcError::InvalidConfig("min_window must be at least 1"));
        }
        Ok(())
    }

    fn window(&self, n: usize) -> usize {
        let w = (self.span * n as f64).round() as usize;
        w.max(self.min_window).min(n)
    }
}

/// Smooth `z` against `u`; entry i of the result is the window mean around
/// u_i in u-order. Exact ties in `u` share one window, so the output is
/// unchanged under any strictly increasing transform of `u` and permutes
/// jointly with the sample.
pub fn smooth_conditional_mean(u: &[f64], z: &[f64], config: &SmootherConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if u.len() != z.len() {
        return Err(CdcError::LengthMismatch {
            left: u.len(),
            right: z.len(),
        });
    }
    if u.len() < 2 {
        return Err(CdcError::DegenerateInput("smoother needs n >= 2"));
    }
    let plan = SmoothPlan::new(u)?;
    Ok(plan.apply(z, config))
}

/// Precomputed u-ordering shared across repeated smooths against the same
/// variable (the ACE loop re-smooths dozens of times).
pub(crate) struct SmoothPlan {
    /// sorted position -> original index (stable in input order on ties)
    order: Vec<usize>,
    /// per sorted position: first and last position of its tie group
    group_lo: Vec<usize>,
    group_hi: Vec<usize>,
    u_sorted: Vec<f64>,
}

impl SmoothPlan {
    pub(crate) fn new(u: &[f64]) -> Result<Self> {
        let n = u.len();
        for (i, v) in u.iter().enumerate() {
            if !v.is_finite() {
                return Err(CdcError::NonFinite { row: i, col: 0 });
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| u[a].partial_cmp(&u[b]).expect("finite"));
        let u_sorted: Vec<f64> = order.iter().map(|&i| u[i]).collect();
        let mut group_lo = vec![0usize; n];
        let mut group_hi = vec![0usize; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && u_sorted[j + 1] == u_sorted[i] {
                j += 1;
            }
            for k in i..=j {
                group_lo[k] = i;
                group_hi[k] = j;
            }
            i = j + 1;
        }
        Ok(SmoothPlan {
            order,
            group_lo,
            group_hi,
            u_sorted,
        })
    }

    pub(crate) fn apply(&self, z: &[f64], config: &SmootherConfig) -> Vec<f64> {
        match config.kind {
            SmootherKind::RunningMean => self.running_mean(z, config.window(z.len())),
            SmootherKind::SuperSmoother => self.supersmoother(z, config.min_window),
        }
    }

    fn gather(&self, z: &[f64]) -> Vec<f64> {
        self.order.iter().map(|&i| z[i]).collect()
    }

    fn scatter(&self, smoothed_sorted: Vec<f64>) -> Vec<f64> {
        let mut out = vec![0.0; smoothed_sorted.len()];
        for (pos, &idx) in self.order.iter().enumerate() {
            out[idx] = smoothed_sorted[pos];
        }
        out
    }

    // Window around sorted position t: the tie group of t plus h neighbors on
    // each side, with the edges snapped outward to whole tie groups. Windows
    // built from whole groups make the output independent of the input order
    // within ties, which is what joint-permutation equivariance requires.
    #[inline]
    fn window_bounds(&self, t: usize, h: usize, n: usize) -> (usize, usize) {
        let lo = self.group_lo[t].saturating_sub(h);
        let hi = (self.group_hi[t] + h).min(n - 1);
        (self.group_lo[lo], self.group_hi[hi])
    }

    fn running_mean(&self, z: &[f64], w: usize) -> Vec<f64> {
        let zs = self.gather(z);
        let out = self.running_mean_sorted(&zs, w);
        self.scatter(out)
    }

    // Friedman's variable-span smoother: three fixed spans with local linear
    // fits, cross-validated absolute residuals select the span pointwise, and
    // the final curve interpolates between the bracketing span estimates.
    fn supersmoother(&self, z: &[f64], min_window: usize) -> Vec<f64> {
        const SPANS: [f64; 3] = [0.05, 0.2, 0.5];
        const MID: usize = 1;
        let n = z.len();
        let zs = self.gather(z);
        let u = &self.u_sorted;

        let mut fits = Vec::with_capacity(SPANS.len());
        let mut residuals = Vec::with_capacity(SPANS.len());
        for span in SPANS {
            let w = ((span * n as f64).round() as usize)
                .max(min_window)
                .max(2)
                .min(n);
            let (fit, resid) = self.local_linear(u, &zs, w);
            fits.push(fit);
            residuals.push(resid);
        }

        let mid_w = ((SPANS[MID] * n as f64).round() as usize)
            .max(min_window)
            .max(2)
            .min(n);
        let smoothed_resid: Vec<Vec<f64>> = residuals
            .iter()
            .map(|r| self.running_mean_sorted(r, mid_w))
            .collect();

        let mut chosen = vec![SPANS[0]; n];
        for t in 0..n {
            let mut best = 0;
            for s in 1..SPANS.len() {
                if smoothed_resid[s][t] < smoothed_resid[best][t] {
                    best = s;
                }
            }
            chosen[t] = SPANS[best];
        }
        let span_curve = self.running_mean_sorted(&chosen, mid_w);

        let mut out = vec![0.0; n];
        for t in 0..n {
            let s = span_curve[t].clamp(SPANS[0], SPANS[SPANS.len() - 1]);
            let mut k = 0;
            while k + 2 < SPANS.len() && s > SPANS[k + 1] {
                k += 1;
            }
            let f = (s - SPANS[k]) / (SPANS[k + 1] - SPANS[k]);
            out[t] = (1.0 - f) * fits[k][t] + f * fits[k + 1][t];
        }
        self.scatter(out)
    }

    // running mean over already-sorted values (tie groups still shared)
    fn running_mean_sorted(&self, zs: &[f64], w: usize) -> Vec<f64> {
        let n = zs.len();
        if w >= n {
            let mean = zs.iter().sum::<f64>() / n as f64;
            return vec![mean; n];
        }
        let h = w / 2;
        let mut prefix = vec![0.0; n + 1];
        for (t, &v) in zs.iter().enumerate() {
            prefix[t + 1] = prefix[t] + v;
        }
        let mut out = vec![0.0; n];
        for t in 0..n {
            let (lo, hi) = self.window_bounds(t, h, n);
            out[t] = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1) as f64;
        }
        out
    }

    // Local linear fit in sorted space plus leave-one-out absolute residuals.
    fn local_linear(&self, u: &[f64], zs: &[f64], w: usize) -> (Vec<f64>, Vec<f64>) {
        let n = zs.len();
        let h = w / 2;
        let mut pu = vec![0.0; n + 1];
        let mut pz = vec![0.0; n + 1];
        let mut puu = vec![0.0; n + 1];
        let mut puz = vec![0.0; n + 1];
        for t in 0..n {
            pu[t + 1] = pu[t] + u[t];
            pz[t + 1] = pz[t] + zs[t];
            puu[t + 1] = puu[t] + u[t] * u[t];
            puz[t + 1] = puz[t] + u[t] * zs[t];
        }
        let mut fit = vec![0.0; n];
        let mut resid = vec![0.0; n];
        for t in 0..n {
            let (lo, hi) = if w >= n {
                (0, n - 1)
            } else {
                self.window_bounds(t, h, n)
            };
            let cnt = (hi - lo + 1) as f64;
            let su = pu[hi + 1] - pu[lo];
            let sz = pz[hi + 1] - pz[lo];
            let suu = puu[hi + 1] - puu[lo];
            let suz = puz[hi + 1] - puz[lo];
            let mean_u = su / cnt;
            let mean_z = sz / cnt;
            let var_u = suu - su * mean_u;
            let cov_uz = suz - su * mean_z;
            let beta = if var_u > 1e-12 * suu.abs().max(1.0) {
                cov_uz / var_u
            } else {
                0.0
            };
            let du = u[t] - mean_u;
            fit[t] = mean_z + beta * du;
            let leverage = 1.0 / cnt
                + if var_u > 1e-12 * suu.abs().max(1.0) {
                    du * du / var_u
                } else {
                    0.0
                };
            let denom = 1.0 - leverage;
            resid[t] = if denom > 1e-10 {
                ((zs[t] - fit[t]) / denom).abs()
            } else {
                (zs[t] - fit[t]).abs()
            };
        }
        (fit, resid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::split_stream;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn cfg(span: f64, min_window: usize) -> SmootherConfig {
        SmootherConfig {
            span,
            min_window,
            kind: SmootherKind::RunningMean,
        }
    }

    // brute-force window-mean oracle mirroring the contract directly
    fn oracle(u: &[f64], z: &[f64], w: usize) -> Vec<f64> {
        let n = u.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap());
        if w >= n {
            let mean = z.iter().sum::<f64>() / n as f64;
            return vec![mean; n];
        }
        let h = w / 2;
        let tie_lo = |pos: usize| {
            let mut p = pos;
            while p > 0 && u[order[p - 1]] == u[order[pos]] {
                p -= 1;
            }
            p
        };
        let tie_hi = |pos: usize| {
            let mut p = pos;
            while p + 1 < n && u[order[p + 1]] == u[order[pos]] {
                p += 1;
            }
            p
        };
        let mut out = vec![0.0; n];
        for (pos, &idx) in order.iter().enumerate() {
            let lo = tie_lo(tie_lo(pos).saturating_sub(h));
            let hi = tie_hi((tie_hi(pos) + h).min(n - 1));
            let vals: Vec<f64> = (lo..=hi).map(|t| z[order[t]]).collect();
            out[idx] = vals.iter().sum::<f64>() / vals.len() as f64;
        }
        out
    }

    #[test]
    fn constant_is_fixed_point() {
        let u = [3.0, 1.0, 2.0, 5.0, 4.0];
        let z = [7.5; 5];
        let out = smooth_conditional_mean(&u, &z, &cfg(0.5, 2)).unwrap();
        assert_eq!(out, vec![7.5; 5]);
    }

    #[test]
    fn full_window_gives_global_mean() {
        let u = [1.0, 2.0, 3.0, 4.0];
        let z = [1.0, 2.0, 3.0, 10.0];
        let out = smooth_conditional_mean(&u, &z, &cfg(1.0, 2)).unwrap();
        assert_eq!(out, vec![4.0; 4]);
    }

    #[test]
    fn hand_computed_truncated_windows() {
        // w = 3: windows {1,2}, {1,2,3}, {2,3,4}, {3,4,5}, {4,5}
        let u = [1.0, 2.0, 3.0, 4.0, 5.0];
        let z = [1.0, 2.0, 3.0, 4.0, 5.0];
        let out = smooth_conditional_mean(&u, &z, &cfg(0.6, 2)).unwrap();
        assert_eq!(out, vec![1.5, 2.0, 3.0, 4.0, 4.5]);
        assert_eq!(oracle(&u, &z, 3), out);
    }

    #[test]
    fn matches_oracle_on_random_data_with_ties() {
        let mut rng = split_stream(21, 0).rng();
        for trial in 0..20 {
            let n = 30 + trial;
            let u: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 6.0).floor()).collect();
            let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let c = cfg(0.25, 2);
            let got = smooth_conditional_mean(&u, &z, &c).unwrap();
            let want = oracle(&u, &z, c.window(n));
            for (a, b) in got.iter().zip(&want) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rank_equivariance() {
        let mut rng = split_stream(22, 0).rng();
        let n = 60;
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let c = cfg(0.3, 2);
        let base = smooth_conditional_mean(&u, &z, &c).unwrap();
        let mapped: Vec<f64> = u.iter().map(|&v| (v * 3.0).exp()).collect();
        assert_eq!(base, smooth_conditional_mean(&mapped, &z, &c).unwrap());
    }

    #[test]
    fn joint_permutation_permutes_output() {
        let mut rng = split_stream(23, 0).rng();
        let n = 40;
        // duplicate u values so tie handling is exercised
        let u: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 8.0).floor()).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let c = cfg(0.3, 2);
        let base = smooth_conditional_mean(&u, &z, &c).unwrap();
        let perm: Vec<usize> = {
            use rand::seq::SliceRandom;
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        };
        let up: Vec<f64> = perm.iter().map(|&i| u[i]).collect();
        let zp: Vec<f64> = perm.iter().map(|&i| z[i]).collect();
        let out = smooth_conditional_mean(&up, &zp, &c).unwrap();
        // windows hold the same value multisets but sum in permuted order,
        // so equality is up to float associativity
        for (pos, &i) in perm.iter().enumerate() {
            assert_abs_diff_eq!(out[pos], base[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn mean_preserved_within_boundary_bound() {
        let mut rng = split_stream(24, 0).rng();
        let n = 200;
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let c = cfg(0.1, 2); // w = 20
        let out = smooth_conditional_mean(&u, &z, &c).unwrap();
        let mean_z = z.iter().sum::<f64>() / n as f64;
        let mean_out = out.iter().sum::<f64>() / n as f64;
        let max_abs = z.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let bound = max_abs * c.window(n) as f64 / n as f64;
        assert!((mean_out - mean_z).abs() <= bound);
    }

    #[test]
    fn variance_never_increases() {
        let mut rng = split_stream(25, 0).rng();
        for _ in 0..20 {
            let n = 100;
            let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 10.0).collect();
            let out = smooth_conditional_mean(&u, &z, &cfg(0.2, 2)).unwrap();
            let var = |v: &[f64]| {
                let m = v.iter().sum::<f64>() / v.len() as f64;
                v.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
            };
            assert!(var(&out) <= var(&z) + 1e-12);
        }
    }

    #[test]
    fn error_contracts() {
        assert!(matches!(
            smooth_conditional_mean(&[1.0, 2.0], &[1.0], &cfg(0.3, 2)).unwrap_err(),
            CdcError::LengthMismatch { .. }
        ));
        assert!(matches!(
            smooth_conditional_mean(&[1.0], &[1.0], &cfg(0.3, 2)).unwrap_err(),
            CdcError::DegenerateInput(_)
        ));
        assert!(smooth_conditional_mean(&[1.0, 2.0], &[1.0, 2.0], &cfg(0.0, 2)).is_err());
        assert!(smooth_conditional_mean(&[1.0, 2.0], &[1.0, 2.0], &cfg(0.3, 0)).is_err());
    }

    #[test]
    fn supersmoother_recovers_constants_and_lines() {
        let mut rng = split_stream(26, 0).rng();
        let n = 150;
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let c = SmootherConfig::supersmoother();

        let z = vec![2.5; n];
        let out = smooth_conditional_mean(&u, &z, &c).unwrap();
        for v in &out {
            assert_abs_diff_eq!(v, &2.5, epsilon = 1e-9);
        }

        // exact linear signal is reproduced by local linear fits
        let z: Vec<f64> = u.iter().map(|&v| 3.0 * v - 1.0).collect();
        let out = smooth_conditional_mean(&u, &z, &c).unwrap();
        for (a, b) in out.iter().zip(&z) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn supersmoother_tracks_high_frequency_better_than_wide_mean() {
        let mut rng = split_stream(27, 0).rng();
        let n = 300;
        let mut u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let z: Vec<f64> = u.iter().map(|&v| (16.0 * core::f64::consts::PI * v).sin()).collect();
        let ss = smooth_conditional_mean(&u, &z, &SmootherConfig::supersmoother()).unwrap();
        let rm = smooth_conditional_mean(&u, &z, &cfg(0.3, 2)).unwrap();
        let sse = |fit: &[f64]| fit.iter().zip(&z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        assert!(sse(&ss) < 0.5 * sse(&rm));
    }
}
