//! Location tests against a reference value and simple summaries.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::factorial::ln_binomial;

/// Largest `n` for which binomial tails are summed as exact integers.
const EXACT_SIGN_TEST_MAX_N: u64 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignTest {
    pub p_value: f64,
    /// Values strictly above the reference.
    pub above: usize,
    /// Values strictly below the reference.
    pub below: usize,
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // exact: c * (n - i) is divisible by (i + 1)
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c
}

/// `P(X <= k)` for `X ~ Binomial(n, 1/2)`.
fn half_binomial_cdf(n: u64, k: u64) -> f64 {
    if k >= n {
        return 1.0;
    }
    if n <= EXACT_SIGN_TEST_MAX_N {
        let count: u128 = (0..=k).map(|i| binomial_u128(n, i)).sum();
        // dividing by a power of two is exact
        count as f64 / 2f64.powi(n as i32)
    } else {
        let ln2 = std::f64::consts::LN_2;
        (0..=k)
            .map(|i| (ln_binomial(n, i) - n as f64 * ln2).exp())
            .sum::<f64>()
            .min(1.0)
    }
}

/// Exact two-sided sign test of `median == reference`.
///
/// Values equal to the reference are dropped. With `k` values above out of
/// `n` remaining, `p = min(1, 2 min(P(X <= k), P(X >= k)))`,
/// `X ~ Binomial(n, 1/2)`. `None` when every value equals the reference.
pub fn sign_test(values: &[f64], reference: f64) -> Option<SignTest> {
    let above = values.iter().filter(|&&v| v > reference).count();
    let below = values.iter().filter(|&&v| v < reference).count();
    let n = (above + below) as u64;
    if n == 0 {
        return None;
    }
    let k = above as u64;
    let lower = half_binomial_cdf(n, k);
    // P(X >= k) = P(X <= n - k) by symmetry
    let upper = half_binomial_cdf(n, n - k);
    Some(SignTest {
        p_value: (2.0 * lower.min(upper)).min(1.0),
        above,
        below,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Two-sided one-sample t-test of `mean == reference`, with the p-value
/// from the Student t survival function (regularized incomplete beta).
/// `None` for fewer than two values or zero variance.
pub fn t_test_one_sample(values: &[f64], reference: f64) -> Option<TTest> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return None;
    }
    let df = (n - 1) as f64;
    let t = (mean - reference) / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Some(TTest { t, df, p_value })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct IndexSummary {
    pub count: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// Sample standard deviation, `(count - 1)`-normalized.
    pub std: Option<f64>,
}

/// Summary of `values` in their given order.
pub fn summarize(values: &[f64]) -> IndexSummary {
    let count = values.len();
    if count == 0 {
        return IndexSummary::default();
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if count % 2 == 1 {
        sorted[count / 2]
    } else {
        0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
    };
    let std = (count >= 2).then(|| {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    });
    IndexSummary {
        count,
        mean: Some(mean),
        median: Some(median),
        std,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_test_examples() {
        let all_above = [1.5; 20];
        let r = sign_test(&all_above, 1.0).unwrap();
        assert_eq!(r.p_value, 2.0 * 2f64.powi(-20));
        assert!((r.p_value - 1.907e-6).abs() < 1e-9);
        assert_eq!(r.above, 20);

        let balanced: Vec<f64> = (0..20)
            .map(|i| if i % 2 == 0 { 2.0 } else { 0.5 })
            .collect();
        assert_eq!(sign_test(&balanced, 1.0).unwrap().p_value, 1.0);

        assert_eq!(sign_test(&[3.0], 1.0).unwrap().p_value, 1.0);
        assert!(sign_test(&[1.0, 1.0], 1.0).is_none());
        // ties with the reference are dropped
        assert_eq!(sign_test(&[1.0, 2.0], 1.0).unwrap().p_value, 1.0);
    }

    #[test]
    fn sign_test_large_n_uses_log_space() {
        let values: Vec<f64> = (0..200).map(|i| if i < 130 { 2.0 } else { 0.0 }).collect();
        let p = sign_test(&values, 1.0).unwrap().p_value;
        assert!(p > 0.0 && p < 1e-4, "{p}");
        let balanced: Vec<f64> = (0..200).map(|i| if i < 100 { 2.0 } else { 0.0 }).collect();
        assert_eq!(sign_test(&balanced, 1.0).unwrap().p_value, 1.0);
    }

    #[test]
    fn t_test_examples() {
        let symmetric = [0.5, 1.5, 0.8, 1.2];
        let r = t_test_one_sample(&symmetric, 1.0).unwrap();
        assert!(r.t.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-9);

        let r = t_test_one_sample(&[2.0, 2.1, 1.9, 2.05], 1.0).unwrap();
        assert!((r.t - 23.71).abs() < 0.01, "t = {}", r.t);
        // two-sided 0.001 critical value at 3 d.o.f. is 12.924
        assert!(r.p_value < 0.001);

        assert!(t_test_one_sample(&[2.0, 2.0], 1.0).is_none());
        assert!(t_test_one_sample(&[2.0], 1.0).is_none());
    }

    #[test]
    fn t_test_matches_closed_forms() {
        // df = 1 is Cauchy: p = 1 - (2/pi) atan|t|
        let r = t_test_one_sample(&[1.0, 3.0], 0.0).unwrap();
        let cauchy = 1.0 - 2.0 / std::f64::consts::PI * r.t.abs().atan();
        assert!((r.p_value - cauchy).abs() < 1e-10);
        // df = 2: p = 1 - |t| / sqrt(2 + t^2)
        let r = t_test_one_sample(&[1.0, 2.0, 4.0], 0.5).unwrap();
        let closed = 1.0 - r.t.abs() / (2.0 + r.t * r.t).sqrt();
        assert!((r.p_value - closed).abs() < 1e-10);
    }

    #[test]
    fn summary_values() {
        let s = summarize(&[3.0, 1.0, 2.0, 10.0]);
        assert_eq!(s.count, 4);
        assert_eq!(s.mean, Some(4.0));
        assert_eq!(s.median, Some(2.5));
        assert!((s.std.unwrap() - (50.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(summarize(&[]), IndexSummary::default());
        assert_eq!(summarize(&[7.0]).std, None);
    }
}
