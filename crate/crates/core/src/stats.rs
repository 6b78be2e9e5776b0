//! Paired significance testing: the two-sided Wilcoxon signed-rank test
//! (exact enumeration for small samples, normal approximation with tie
//! and continuity corrections otherwise) and medians.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("empty input")]
    EmptyInput,
    #[error("paired samples differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Largest number of non-zero differences for which the exact
/// enumeration branch is used.
pub const EXACT_CUTOFF: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// W = min(W+, W-).
    pub statistic: f64,
    pub p_two_sided: f64,
    /// Number of pairs remaining after dropping zero differences.
    pub n_nonzero: usize,
    pub exact: bool,
}

/// Mid-ranks of absolute differences (ties share the average rank).
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0; // ranks are 1-based
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero
/// differences are dropped.
pub fn wilcoxon_signed_rank(xs: &[f64], ys: &[f64]) -> Result<WilcoxonResult, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    let diffs: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = midranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);

    let (p, exact) = if n <= EXACT_CUTOFF {
        (exact_two_sided_p(&ranks, w), true)
    } else {
        (normal_two_sided_p(&ranks, w), false)
    };
    Ok(WilcoxonResult {
        statistic: w,
        p_two_sided: p.min(1.0),
        n_nonzero: n,
        exact,
    })
}

/// Exact p by enumerating all 2^n sign assignments: the null
/// distribution of W+ is symmetric, so the two-sided p is
/// P(W+ <= w) + P(W+ >= total - w).
fn exact_two_sided_p(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len();
    let total: f64 = ranks.iter().sum();
    let mut low = 0u64;
    let mut high = 0u64;
    let count = 1u64 << n;
    for mask in 0..count {
        let mut w_plus = 0.0;
        for (i, r) in ranks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                w_plus += r;
            }
        }
        if w_plus <= w + 1e-9 {
            low += 1;
        }
        if w_plus >= total - w - 1e-9 {
            high += 1;
        }
    }
    (low + high) as f64 / count as f64
}

/// Normal approximation with tie correction and continuity correction.
fn normal_two_sided_p(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // tie correction: subtract sum(t^3 - t)/48 over tie groups
    let mut sorted = ranks.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    if var <= 0.0 {
        return 1.0;
    }
    let z = (w - mean + 0.5) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * normal.cdf(z)).min(1.0)
}

/// Middle element, or the mean of the two middle elements.
pub fn median(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn medians() {
        assert_eq!(median(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.5);
        assert_eq!(median(&[5.0]).unwrap(), 5.0);
        assert_eq!(median(&[]), Err(StatsError::EmptyInput));
    }

    #[test]
    fn all_zero_differences_error() {
        let xs = [1.0, 2.0, 3.0];
        assert_eq!(
            wilcoxon_signed_rank(&xs, &xs),
            Err(StatsError::AllZeroDifferences)
        );
    }

    #[test]
    fn all_positive_distinct_exact_p() {
        let xs = [2.0, 4.0, 6.0, 8.0, 10.0];
        let ys = [1.0, 1.0, 1.0, 1.0, 1.0];
        let r = wilcoxon_signed_rank(&xs, &ys).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.exact);
        assert!((r.p_two_sided - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(5..25);
            let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
            let a = wilcoxon_signed_rank(&xs, &ys).unwrap();
            let b = wilcoxon_signed_rank(&ys, &xs).unwrap();
            assert_eq!(a.statistic, b.statistic);
            assert!((a.p_two_sided - b.p_two_sided).abs() < 1e-12);
            assert!(a.p_two_sided > 0.0 && a.p_two_sided <= 1.0);
        }
    }

    #[test]
    fn scale_invariance() {
        let xs = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0];
        let ys = [2.0, 2.0, 3.0, 3.0, 2.0, 1.0, 2.0];
        let a = wilcoxon_signed_rank(&xs, &ys).unwrap();
        let xs2: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y + 7.0 * (x - y)).collect();
        let b = wilcoxon_signed_rank(&xs2, &ys).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.p_two_sided, b.p_two_sided);
    }

    #[test]
    fn exact_and_normal_agree_in_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 12..=15 {
            for _ in 0..5 {
                let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
                let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
                let diffs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
                let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
                let ranks = midranks(&abs);
                let w_plus: f64 = diffs
                    .iter()
                    .zip(&ranks)
                    .filter(|(d, _)| **d > 0.0)
                    .map(|(_, r)| r)
                    .sum();
                let total: f64 = ranks.iter().sum();
                let w = w_plus.min(total - w_plus);
                let pe = exact_two_sided_p(&ranks, w);
                let pn = normal_two_sided_p(&ranks, w);
                assert!((pe - pn).abs() < 0.02, "n={n}: exact {pe} vs normal {pn}");
            }
        }
    }

    #[test]
    fn normal_branch_matches_monte_carlo_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 20;
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..8.0)).collect();
        let r = wilcoxon_signed_rank(&xs, &ys).unwrap();
        assert!(!r.exact);

        let diffs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
        let ranks = midranks(&abs);
        let total: f64 = ranks.iter().sum();

        let samples = 1_000_000;
        let mut extreme = 0u64;
        for _ in 0..samples {
            let mut w_plus = 0.0;
            for r in &ranks {
                if rng.gen_bool(0.5) {
                    w_plus += r;
                }
            }
            let w = w_plus.min(total - w_plus);
            if w <= r.statistic + 1e-9 {
                extreme += 1;
            }
        }
        let mc = extreme as f64 / samples as f64;
        assert!(
            (mc - r.p_two_sided).abs() < 0.015,
            "monte-carlo {mc} vs normal {}",
            r.p_two_sided
        );
    }

    #[test]
    fn exact_cutoff_respected() {
        let xs: Vec<f64> = (0..16).map(|i| i as f64 + 1.0).collect();
        let ys = vec![0.0; 16];
        assert!(!wilcoxon_signed_rank(&xs, &ys).unwrap().exact);
        assert!(wilcoxon_signed_rank(&xs[..15], &ys[..15]).unwrap().exact);
    }
}
