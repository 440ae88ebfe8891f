//! Deterministic summation, certified intervals, and small numeric helpers.
//!
//! Every norm in this crate is reproducible bit-for-bit across runs and
//! thread counts. The rule: parallel stages only *produce* per-item values
//! in index order; all floating-point reductions go through [`pairwise_sum`],
//! which uses a fixed binary tree independent of the worker count.

/// Pairwise (cascade) summation with a fixed recursion tree.
///
/// Error grows like O(log n · eps) instead of O(n · eps) for sequential
/// accumulation, and the result depends only on the slice contents.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const SEQ_CUTOFF: usize = 32;
    if xs.len() <= SEQ_CUTOFF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `max` over a slice, empty slices give 0 (all aggregated quantities here
/// are nonnegative).
pub fn max_or_zero(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0_f64, |a, &b| a.max(b))
}

/// A certified bracket `[lower, upper]` for a quantity that is not computed
/// exactly. `lower == upper` when an exact route (enumeration) was used.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CertInterval {
    pub lower: f64,
    pub upper: f64,
}

impl CertInterval {
    pub fn new(lower: f64, upper: f64) -> Self {
        CertInterval { lower, upper }
    }

    pub fn exact(v: f64) -> Self {
        CertInterval { lower: v, upper: v }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }

    /// Interval for `sqrt(a^2 + b^2)`-style aggregation of squared intervals.
    pub fn l2_aggregate(intervals: &[CertInterval]) -> CertInterval {
        let lo: Vec<f64> = intervals.iter().map(|i| i.lower * i.lower).collect();
        let up: Vec<f64> = intervals.iter().map(|i| i.upper * i.upper).collect();
        CertInterval {
            lower: pairwise_sum(&lo).sqrt(),
            upper: pairwise_sum(&up).sqrt(),
        }
    }

    pub fn scale(&self, c: f64) -> CertInterval {
        CertInterval {
            lower: self.lower * c,
            upper: self.upper * c,
        }
    }
}

/// Gamma function via the Lanczos approximation (g = 7, n = 9).
///
/// Used only for the Riesz-potential Fourier symbol; relative accuracy is
/// ~1e-13 on the arguments that occur (positive, moderate).
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + G + 0.5;
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx = pairwise_sum(x);
    let sy = pairwise_sum(y);
    let sxx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let den = n * pairwise_sum(&sxx) - sx * sx;
    let slope = (n * pairwise_sum(&sxy) - sx * sy) / den;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64) * 0.1).collect();
        let naive: f64 = xs.iter().sum();
        assert_relative_eq!(pairwise_sum(&xs), naive, max_relative = 1e-14);
    }

    #[test]
    fn gamma_known_values() {
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-12);
    }

    #[test]
    fn fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (a, b) = linear_fit(&x, &y);
        assert_relative_eq!(a, 2.0, max_relative = 1e-12);
        assert_relative_eq!(b, -1.0, epsilon = 1e-12);
    }
}
