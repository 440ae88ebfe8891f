//! Decay functions with table-based certification, the sequence norms
//! v_Psi / t_Psi, exact K-functionals for weighted-l1 pairs, extrapolation
//! suprema, and the counterexample sequence generators.
//!
//! Decays are tabulated on 0..=N_max; every "sup over N" is explicitly
//! finite with the truncation recorded. Certification flags are table
//! conventions: admissibility compares the partial-sum ratio at N_max
//! against the half-table ratio (a growing ratio fails), doubling takes the
//! worst Psi(cN)/Psi(N) over the table.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// A positive decreasing decay function tabulated on 0..=N_max, with
/// certification flags and constants.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Decay {
    table: Vec<f64>,
    pub admissible: bool,
    /// max over N of sum_{r<=N} (2^r Psi(r))^2 / (2^N Psi(N))^2
    pub admissible_constant: f64,
    pub doubling: bool,
    /// min over N of Psi(ceil(cN)) / Psi(N) for the configured c
    pub doubling_constant: f64,
    pub doubling_factor: f64,
    /// Psi(N_max) / Psi(0); the vanishing flag compares it to 1/2
    pub tail_ratio: f64,
}

impl Decay {
    pub fn n_max(&self) -> usize {
        self.table.len() - 1
    }

    pub fn at(&self, n: usize) -> f64 {
        self.table[n.min(self.table.len() - 1)]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// The table heads towards zero (tail below half of the initial value).
    pub fn vanishing(&self) -> bool {
        self.tail_ratio < 0.5
    }

    /// Power decay Psi(t) = t^{-beta} with Psi(0) := Psi(1).
    pub fn power(beta: f64, n_max: usize) -> Result<Decay> {
        decay_certify(
            &(0..=n_max).map(|t| (t.max(1) as f64).powf(-beta)).collect::<Vec<_>>(),
            2.0,
        )
    }

    /// Psi(t) = (1+t)^{-beta}.
    pub fn shifted_power(beta: f64, n_max: usize) -> Result<Decay> {
        decay_certify(
            &(0..=n_max).map(|t| (1.0 + t as f64).powf(-beta)).collect::<Vec<_>>(),
            2.0,
        )
    }

    /// Psi(t) = 2^{-ct}.
    pub fn exponential(c: f64, n_max: usize) -> Result<Decay> {
        decay_certify(&(0..=n_max).map(|t| (-c * t as f64).exp2()).collect::<Vec<_>>(), 2.0)
    }

    /// Two-column CSV `N,psi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,psi\n");
        for (n, v) in self.table.iter().enumerate() {
            out.push_str(&format!("{n},{v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Decay> {
        let mut vals = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (ln == 0 && line.starts_with('N')) {
                continue;
            }
            let mut parts = line.split(',');
            let _n = parts.next();
            let v: f64 = parts
                .next()
                .ok_or_else(|| Error::input(format!("decay CSV line {} malformed", ln + 1)))?
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("decay CSV line {} malformed", ln + 1)))?;
            vals.push(v);
        }
        decay_certify(&vals, 2.0)
    }
}

/// Certify a tabulated decay: strict positivity and monotonicity are
/// rejected outright; admissibility and doubling become recorded flags.
pub fn decay_certify(values: &[f64], doubling_factor: f64) -> Result<Decay> {
    if values.len() < 3 {
        return Err(Error::input("decay table needs at least 3 entries"));
    }
    if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::input("decay must be strictly positive and finite"));
    }
    for w in values.windows(2) {
        if w[1] > w[0] + 1e-15 * w[0].abs() {
            return Err(Error::input("decay must be non-increasing"));
        }
    }
    let n_max = values.len() - 1;
    // admissibility: partial sums of (2^r Psi(r))^2 against the last term
    let mut ratios = Vec::with_capacity(values.len());
    let mut acc = 0.0f64;
    for (r, &v) in values.iter().enumerate() {
        let t = ((r as f64).exp2() * v).powi(2);
        acc += t;
        ratios.push(acc / t);
    }
    let admissible_constant = ratios.iter().cloned().fold(0.0f64, f64::max);
    let half = ratios[n_max / 2];
    let admissible = ratios[n_max] <= 1.5 * half + 1e-12;

    let c = doubling_factor;
    let mut doubling_constant = f64::INFINITY;
    for n in 1..=n_max {
        let m = (c * n as f64).ceil() as usize;
        if m > n_max {
            break;
        }
        doubling_constant = doubling_constant.min(values[m] / values[n]);
    }
    if !doubling_constant.is_finite() {
        doubling_constant = 1.0;
    }
    // doubling fails when the ratio keeps shrinking along the table
    let early = {
        let n = 2.max(1);
        let m = (c * n as f64).ceil() as usize;
        if m <= n_max {
            values[m] / values[n]
        } else {
            1.0
        }
    };
    let doubling = doubling_constant >= 0.5 * early && doubling_constant > 0.0;

    Ok(Decay {
        tail_ratio: values[n_max] / values[0],
        table: values.to_vec(),
        admissible,
        admissible_constant,
        doubling,
        doubling_constant,
        doubling_factor: c,
    })
}

/// Per-scale coefficient data: entry k holds the coefficients of scale k
/// (a single entry for scalar sequences, a field of them for wavelet data).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSequence {
    pub scales: Vec<Vec<f64>>,
}

impl BlockSequence {
    pub fn scalar(entries: Vec<f64>) -> Self {
        BlockSequence { scales: entries.into_iter().map(|v| vec![v]).collect() }
    }

    pub fn j_max(&self) -> usize {
        self.scales.len().saturating_sub(1)
    }

    fn sup_at(&self, k: usize) -> f64 {
        self.scales[k].iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    fn sum_sq_at(&self, k: usize) -> f64 {
        let terms: Vec<f64> = self.scales[k].iter().map(|&v| v * v).collect();
        pairwise_sum(&terms)
    }
}

/// v_Psi sequence norm: sup_N Psi(N)^{-2} sum_{k>=N} 2^{-2k} sup_l |lambda_{kl}|.
pub fn vpsi_seq(lambda: &BlockSequence, psi: &Decay) -> f64 {
    let top = lambda.scales.len();
    let mut best = 0.0f64;
    for n in 0..top.min(psi.n_max() + 1) {
        let terms: Vec<f64> =
            (n..top).map(|k| (-(2.0 * k as f64)).exp2() * lambda.sup_at(k)).collect();
        best = best.max(pairwise_sum(&terms) / (psi.at(n) * psi.at(n)));
    }
    best
}

/// t_Psi sequence norm:
/// [ sup_N Psi(N)^{-2} sum_{k>=N} 2^{k(-2-n)} sum_l |lambda_{kl}|^2 ]^{1/2}.
pub fn tpsi_seq(lambda: &BlockSequence, psi: &Decay, n_dim: usize) -> f64 {
    let top = lambda.scales.len();
    let mut best = 0.0f64;
    for n in 0..top.min(psi.n_max() + 1) {
        let terms: Vec<f64> = (n..top)
            .map(|k| (k as f64 * (-2.0 - n_dim as f64)).exp2() * lambda.sum_sq_at(k))
            .collect();
        best = best.max(pairwise_sum(&terms) / (psi.at(n) * psi.at(n)));
    }
    best.sqrt()
}

/// Exact K-functional for a weighted-l1 pair: the coordinatewise optimal
/// splitting gives K(t) = sum_j min(w0_j, t w1_j) a_j.
pub fn k_functional(t: f64, a: &[f64], w0: &[f64], w1: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::parameter("K-functional needs t > 0"));
    }
    if a.len() > w0.len() || a.len() > w1.len() {
        return Err(Error::input("weight sequences shorter than the data"));
    }
    if w0.iter().chain(w1).any(|&w| !(w > 0.0)) {
        return Err(Error::parameter("weights must be positive"));
    }
    let terms: Vec<f64> =
        a.iter().enumerate().map(|(j, &aj)| w0[j].min(t * w1[j]) * aj.abs()).collect();
    Ok(pairwise_sum(&terms))
}

/// Extrapolation norm: sup_{N=0..N_max} K(2^{-2N}, a; 2^{-2j}, 2^{sj}) / Psi(N)^2.
pub fn extrapolation_norm(a: &[f64], psi: &Decay, s: f64) -> Result<f64> {
    let w0: Vec<f64> = (0..a.len()).map(|j| (-(2.0 * j as f64)).exp2()).collect();
    let w1: Vec<f64> = (0..a.len()).map(|j| (s * j as f64).exp2()).collect();
    let mut best = 0.0f64;
    for n in 0..=psi.n_max() {
        let t = (-(2.0 * n as f64)).exp2();
        best = best.max(k_functional(t, a, &w0, &w1)? / (psi.at(n) * psi.at(n)));
    }
    Ok(best)
}

/// Embedding test for the tail condition sum_{j>=N} Phi(j) <= C Psi(N)^2.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EmbeddingCheck {
    pub holds: bool,
    /// max_N sum_{j>=N} Phi(j) / Psi(N)^2 over the table
    pub constant: f64,
    /// the series sum Phi(j) shows no sign of converging on the table
    pub divergent_series: bool,
}

pub fn embedding_5_2_check(phi: &Decay, psi: &Decay) -> EmbeddingCheck {
    let n_max = phi.n_max().min(psi.n_max());
    // tails of Phi
    let mut tail = vec![0.0f64; n_max + 2];
    for n in (0..=n_max).rev() {
        tail[n] = tail[n + 1] + phi.at(n);
    }
    let mut constant = 0.0f64;
    for n in 0..=n_max {
        constant = constant.max(tail[n] / (psi.at(n) * psi.at(n)));
    }
    // divergence detection on dyadic windows: for sum j^{-a} the increment
    // over [W, 2W] relative to [W/2, W] tends to 2^{1-a}, which crosses 1
    // exactly at the convergence boundary a = 1; flag at ratio >= 0.9
    let q1 = n_max / 4;
    let half = n_max / 2;
    let inc_lo = tail[q1] - tail[half];
    let inc_hi = tail[half] - tail[n_max + 1];
    let divergent_series = inc_lo > 0.0 && inc_hi >= 0.9 * inc_lo;
    // the constant must also be stable along the table, not still growing
    let mut half_constant = 0.0f64;
    for n in 0..=half {
        half_constant = half_constant.max((tail[n] - tail[half + 1]) / (psi.at(n) * psi.at(n)));
    }
    let growing = constant > 1.5 * half_constant + 1e-12;
    EmbeddingCheck { holds: !divergent_series && !growing, constant, divergent_series }
}

/// The telescoping sequence of the first counterexample: lambda_{N,0} =
/// 2^{2N} c_N with c_k = (Psi(k)^2 - Psi(k+1)^2)^{1/2}, Psi(N_max+1) := 0.
pub fn example_9_1(psi: &Decay) -> BlockSequence {
    let n_max = psi.n_max();
    let entries: Vec<f64> = (0..=n_max)
        .map(|k| {
            let cur = psi.at(k) * psi.at(k);
            let next = if k == n_max { 0.0 } else { psi.at(k + 1) * psi.at(k + 1) };
            (2.0 * k as f64).exp2() * (cur - next).max(0.0).sqrt()
        })
        .collect();
    BlockSequence::scalar(entries)
}

/// Bounded-but-not-square-summable data at scale zero: a window of ones of
/// the given width.
pub fn example_9_2(width: usize) -> BlockSequence {
    BlockSequence { scales: vec![vec![1.0; width.max(1)]] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn certify_power_decay() {
        let d = Decay::shifted_power(0.5, 64).unwrap();
        assert!(d.admissible);
        assert!(d.doubling);
        assert!(d.vanishing());
    }

    #[test]
    fn certify_flags_fast_exponential() {
        // 2^{-t}: partial-sum ratio grows like N + 1
        let d = Decay::exponential(1.0, 64).unwrap();
        assert!(!d.admissible);
        assert!(d.admissible_constant > 30.0);
        assert!(!d.doubling);
    }

    #[test]
    fn slow_exponential_is_admissible_but_not_doubling() {
        // 2^{-2t/3}: 2^r Psi(r) still grows geometrically
        let d = Decay::exponential(2.0 / 3.0, 64).unwrap();
        assert!(d.admissible);
        assert!(!d.doubling);
    }

    #[test]
    fn table_one_decay_is_certified() {
        // Psi(t) = t^{(1-alpha)/2} at alpha = 2, Psi(0) = Psi(1)
        let d = Decay::power(0.5, 64).unwrap();
        assert!(d.admissible && d.doubling);
    }

    #[test]
    fn non_monotone_rejected() {
        assert!(decay_certify(&[1.0, 0.5, 0.7, 0.3], 2.0).is_err());
        assert!(decay_certify(&[1.0, 0.5, 0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn vpsi_single_entry() {
        let psi = Decay::shifted_power(0.5, 16).unwrap();
        let lambda = BlockSequence::scalar(vec![1.0]);
        assert_relative_eq!(
            vpsi_seq(&lambda, &psi),
            1.0 / (psi.at(0) * psi.at(0)),
            max_relative = 1e-12
        );
    }

    #[test]
    fn example_9_1_telescopes_exactly() {
        let psi = Decay::shifted_power(1.0, 64).unwrap();
        let lambda = example_9_1(&psi);
        // t-norm telescopes to exactly 1 at n = 2
        assert_relative_eq!(tpsi_seq(&lambda, &psi, 2), 1.0, epsilon = 1e-10);
        // v-ratios grow without bound
        let ratio_at = |n: usize| {
            let tail: f64 = (n..=64)
                .map(|k| (-(2.0 * k as f64)).exp2() * lambda.scales[k][0])
                .sum();
            tail / (psi.at(n) * psi.at(n))
        };
        assert!(ratio_at(32) > 5.0 * ratio_at(4));
    }

    #[test]
    fn example_9_2_window_behavior() {
        let psi = Decay::shifted_power(0.5, 16).unwrap();
        let narrow = example_9_2(4);
        let wide = example_9_2(1024);
        // v-norm ignores the width, t-norm grows like sqrt(width)
        assert_relative_eq!(vpsi_seq(&narrow, &psi), vpsi_seq(&wide, &psi), max_relative = 1e-12);
        let t_n = tpsi_seq(&narrow, &psi, 2);
        let t_w = tpsi_seq(&wide, &psi, 2);
        assert_relative_eq!(t_w / t_n, (1024.0f64 / 4.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn k_functional_examples() {
        // single coordinate: K(t) = min(1, t)
        let w0: Vec<f64> = (0..4).map(|j| (-(2.0 * j as f64)).exp2()).collect();
        let w1 = vec![1.0; 4];
        let a = [1.0, 0.0, 0.0, 0.0];
        assert_relative_eq!(k_functional(0.3, &a, &w0, &w1).unwrap(), 0.3);
        assert_relative_eq!(k_functional(2.0, &a, &w0, &w1).unwrap(), 1.0);
        // two coordinates at t = 1/2: 1/2 + 1/4
        let a = [1.0, 1.0];
        assert_relative_eq!(k_functional(0.5, &a, &w0, &w1).unwrap(), 0.75);
    }

    #[test]
    fn k_functional_endpoint_bounds() {
        let w0: Vec<f64> = (0..6).map(|j| (-(2.0 * j as f64)).exp2()).collect();
        let w1: Vec<f64> = vec![1.0; 6];
        let a = [0.3, 1.2, 0.0, 2.0, 0.7, 0.1];
        for &t in &[0.01, 0.3, 1.0, 7.0] {
            let k = k_functional(t, &a, &w0, &w1).unwrap();
            let e0: f64 = a.iter().enumerate().map(|(j, &x)| w0[j] * x).sum();
            let e1: f64 = a.iter().enumerate().map(|(j, &x)| w1[j] * x).sum();
            assert!(k <= e0.min(t * e1) + 1e-12);
        }
    }

    #[test]
    fn k_functional_concavity_samples() {
        let w0: Vec<f64> = (0..5).map(|j| (-(2.0 * j as f64)).exp2()).collect();
        let w1: Vec<f64> = (0..5).map(|j| (0.5 * j as f64).exp2()).collect();
        let a = [1.0, 0.5, 2.0, 0.25, 0.8];
        let ts: Vec<f64> = (1..40).map(|i| i as f64 * 0.05).collect();
        let ks: Vec<f64> = ts.iter().map(|&t| k_functional(t, &a, &w0, &w1).unwrap()).collect();
        for i in 1..ks.len() {
            // non-decreasing in t, K(t)/t non-increasing
            assert!(ks[i] >= ks[i - 1] - 1e-12);
            assert!(ks[i] / ts[i] <= ks[i - 1] / ts[i - 1] + 1e-12);
        }
    }

    #[test]
    fn extrapolation_single_coordinate_closed_form() {
        let psi = Decay::shifted_power(0.5, 32).unwrap();
        let kk = 5usize;
        let mut a = vec![0.0; 16];
        a[kk] = 1.0;
        let got = extrapolation_norm(&a, &psi, 0.0).unwrap();
        let expect = (0..=32)
            .map(|n| {
                (-(2.0 * kk as f64)).exp2().min((-(2.0 * n as f64)).exp2())
                    / (psi.at(n) * psi.at(n))
            })
            .fold(0.0f64, f64::max);
        assert_relative_eq!(got, expect, max_relative = 1e-12);
    }

    #[test]
    fn embedding_check_cases() {
        // Phi = 2^{-j}, Psi = 2^{-N/2}: holds, constant about 2
        let phi = Decay::exponential(1.0, 48).unwrap();
        let psi = Decay::exponential(0.5, 48).unwrap();
        let r = embedding_5_2_check(&phi, &psi);
        assert!(r.holds);
        assert!(r.constant > 1.5 && r.constant < 2.5, "constant = {}", r.constant);

        // Phi = j^{-alpha}, alpha in (0,1]: divergent, flagged
        let phi = Decay::power(0.7, 256).unwrap();
        let psi = Decay::power(0.5, 256).unwrap();
        let r = embedding_5_2_check(&phi, &psi);
        assert!(r.divergent_series);
        assert!(!r.holds);
    }

    #[test]
    fn decay_csv_roundtrip() {
        let d = Decay::shifted_power(1.0, 8).unwrap();
        let csv = d.to_csv();
        let back = Decay::from_csv(&csv).unwrap();
        for n in 0..=8 {
            assert_relative_eq!(d.at(n), back.at(n), max_relative = 1e-12);
        }
    }
}
