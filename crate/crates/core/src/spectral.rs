//! Littlewood-Paley blocks on the padded torus, Besov norms, the V_Psi and
//! T_Psi function norms with their Fourier characterization, Nikolskii
//! ratios, and an orthonormal Haar transform used for scaling probes.
//!
//! The multiplier family is a fixed polynomial spline profile, so the
//! partition of unity is exact on the frequency grid and reproducible. All
//! suprema over the scale index N are truncated at the resolution-imposed
//! j_max and the truncation is flagged in the output.

use crate::error::{Error, Result};
use crate::grid::{DyadicCube, GridFunction};
use crate::numeric::pairwise_sum;
use crate::seq::Decay;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Smooth cutoff: 1 on [0,1], 0 on [2,inf), quintic smoothstep between.
fn profile(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        let u = t - 1.0;
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// phi_j on the frequency grid: phi_0 = profile(rho), and
/// phi_j = profile(rho/2^j) - profile(rho/2^{j-1}) for j >= 1.
fn phi(j: usize, rho: f64) -> f64 {
    if j == 0 {
        profile(rho)
    } else {
        profile(rho / (j as f64).exp2()) - profile(rho / ((j - 1) as f64).exp2())
    }
}

/// Littlewood-Paley decomposition of f embedded centrally in a torus of
/// `factor` units per side (factor >= 2 so the support never wraps into
/// itself through the smooth multipliers).
#[derive(Debug)]
pub struct LPDecomposition {
    pub n: usize,
    pub j_grid: usize,
    pub factor: usize,
    /// grid points per torus side
    pub side: usize,
    pub j_max: usize,
    /// spatial blocks Delta_j f on the torus grid
    pub blocks: Vec<Vec<f64>>,
    /// per-block L-infinity norms
    pub linf: Vec<f64>,
    /// per-block squared L^2 norms over the torus
    pub l2_sq: Vec<f64>,
    /// Fourier coefficients of the embedded f (c_k with basis e^{2 pi i k x / S})
    coeffs: Vec<Complex64>,
    /// |xi| per coefficient (angular frequency)
    rho: Vec<f64>,
    /// multiplier profile descriptor, reported alongside norms
    pub profile: &'static str,
}

/// Angular frequency magnitudes and FFT helpers on the torus grid.
fn fft2_all(data: &mut [Complex64], side: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft =
        if inverse { planner.plan_fft_inverse(side) } else { planner.plan_fft_forward(side) };
    match n {
        1 => fft.process(data),
        2 => {
            for row in data.chunks_exact_mut(side) {
                fft.process(row);
            }
            for i in 0..side {
                for j in (i + 1)..side {
                    data.swap(i * side + j, j * side + i);
                }
            }
            for row in data.chunks_exact_mut(side) {
                fft.process(row);
            }
            for i in 0..side {
                for j in (i + 1)..side {
                    data.swap(i * side + j, j * side + i);
                }
            }
        }
        _ => unreachable!(),
    }
}

/// Compute the decomposition. Supported for n in {1, 2}.
pub fn lp_blocks(f: &GridFunction, factor: usize) -> Result<LPDecomposition> {
    let n = f.dim();
    if n > 2 {
        return Err(Error::parameter("Littlewood-Paley blocks support n in {1, 2}"));
    }
    if factor < 2 {
        return Err(Error::parameter("torus must be at least 2x the support side"));
    }
    let unit = f.side();
    let side = factor * unit;
    let s_len = factor as f64;
    // embed centrally
    let mut data = vec![Complex64::new(0.0, 0.0); side.pow(n as u32)];
    let off = (factor - 1) / 2 * unit;
    for flat in 0..f.num_cells() {
        let c = DyadicCube::from_flat(f.depth(), n, flat);
        let mut idx = 0usize;
        for d in 0..n {
            idx = idx * side + c.index[d] as usize + off;
        }
        data[idx] = Complex64::new(f.values()[flat], 0.0);
    }
    fft2_all(&mut data, side, n, false);
    let norm = 1.0 / data.len() as f64;
    let coeffs: Vec<Complex64> = data.iter().map(|&z| z * norm).collect();

    let mut rho = vec![0.0f64; coeffs.len()];
    for (idx, r) in rho.iter_mut().enumerate() {
        let mut rem = idx;
        let mut k2 = 0.0;
        for _ in 0..n {
            let kd = rem % side;
            rem /= side;
            let kd = if kd <= side / 2 { kd as f64 } else { kd as f64 - side as f64 };
            let xi = 2.0 * std::f64::consts::PI * kd / s_len;
            k2 += xi * xi;
        }
        *r = k2.sqrt();
    }
    let rho_max = rho.iter().cloned().fold(0.0f64, f64::max);
    let j_max = rho_max.log2().ceil().max(0.0) as usize;

    let torus_measure = s_len.powi(n as i32);
    let mut blocks = Vec::with_capacity(j_max + 1);
    let mut linf = Vec::with_capacity(j_max + 1);
    let mut l2_sq = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let mut spec: Vec<Complex64> = coeffs
            .iter()
            .zip(&rho)
            .map(|(&c, &r)| c * phi(j, r))
            .collect();
        // Plancherel for the L2 norm
        let terms: Vec<f64> = spec.iter().map(|z| torus_measure * z.norm_sqr()).collect();
        l2_sq.push(pairwise_sum(&terms));
        fft2_all(&mut spec, side, n, true);
        let block: Vec<f64> = spec.iter().map(|z| z.re).collect();
        linf.push(block.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
        blocks.push(block);
    }
    Ok(LPDecomposition {
        n,
        j_grid: f.depth(),
        factor,
        side,
        j_max,
        blocks,
        linf,
        l2_sq,
        coeffs,
        rho,
        profile: "quintic-smoothstep bump, annuli [2^{j-1}, 2^{j+1}]",
    })
}

impl LPDecomposition {
    /// Max over the frequency grid of |sum_j phi_j - 1|.
    pub fn partition_of_unity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for &r in &self.rho {
            let s: f64 = (0..=self.j_max).map(|j| phi(j, r)).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Max over torus points of |sum_j Delta_j f - f_embedded| relative to ||f||_inf.
    pub fn reconstruction_defect(&self, f: &GridFunction) -> f64 {
        let mut sum = vec![0.0f64; self.blocks[0].len()];
        for b in &self.blocks {
            for (s, &v) in sum.iter_mut().zip(b) {
                *s += v;
            }
        }
        let unit = f.side();
        let off = (self.factor - 1) / 2 * unit;
        let mut worst = 0.0f64;
        let scale = f.values().iter().fold(1e-300f64, |a, &b| a.max(b.abs()));
        // compare on the embedded support and on the zero exterior
        let mut seen = vec![false; sum.len()];
        for flat in 0..f.num_cells() {
            let c = DyadicCube::from_flat(f.depth(), self.n, flat);
            let mut idx = 0usize;
            for d in 0..self.n {
                idx = idx * self.side + c.index[d] as usize + off;
            }
            worst = worst.max((sum[idx] - f.values()[flat]).abs());
            seen[idx] = true;
        }
        for (i, &s) in sum.iter().enumerate() {
            if !seen[i] {
                worst = worst.max(s.abs());
            }
        }
        worst / scale
    }

    /// Besov norm (sum_j 2^{jsq} ||Delta_j f||_p^q)^{1/q}; p, q in [1, inf].
    pub fn besov_norm(&self, s: f64, p: f64, q: f64) -> f64 {
        let norms: Vec<f64> = (0..=self.j_max)
            .map(|j| {
                if p.is_infinite() {
                    self.linf[j]
                } else if p == 2.0 {
                    self.l2_sq[j].sqrt()
                } else {
                    let cell = (self.factor as f64).powi(self.n as i32)
                        / self.blocks[j].len() as f64;
                    let terms: Vec<f64> =
                        self.blocks[j].iter().map(|v| v.abs().powf(p) * cell).collect();
                    pairwise_sum(&terms).powf(1.0 / p)
                }
            })
            .collect();
        if q.is_infinite() {
            norms
                .iter()
                .enumerate()
                .map(|(j, &v)| (j as f64 * s).exp2() * v)
                .fold(0.0f64, f64::max)
        } else {
            let terms: Vec<f64> = norms
                .iter()
                .enumerate()
                .map(|(j, &v)| ((j as f64 * s).exp2() * v).powf(q))
                .collect();
            pairwise_sum(&terms).powf(1.0 / q)
        }
    }

    /// V_Psi norm: sup_N Psi(N)^{-2} sum_{j>=N} 2^{-2j} ||Delta_j f||_inf,
    /// truncated at j_max (flagged by the caller-visible field).
    pub fn vpsi_norm(&self, psi: &Decay) -> f64 {
        let n_top = self.j_max.min(psi.n_max());
        let mut best = 0.0f64;
        for n in 0..=n_top {
            let terms: Vec<f64> = (n..=self.j_max)
                .map(|j| (-(2.0 * j as f64)).exp2() * self.linf[j])
                .collect();
            best = best.max(pairwise_sum(&terms) / (psi.at(n) * psi.at(n)));
        }
        best
    }

    /// Blockwise and Fourier-integral T_Psi norms.
    pub fn tpsi_norm(&self, psi: &Decay) -> TPsiReport {
        let n_top = self.j_max.min(psi.n_max());
        let mut blockwise_sq = 0.0f64;
        for n in 0..=n_top {
            let terms: Vec<f64> = (n..=self.j_max)
                .map(|j| (-(2.0 * j as f64)).exp2() * self.l2_sq[j])
                .collect();
            blockwise_sq = blockwise_sq.max(pairwise_sum(&terms) / (psi.at(n) * psi.at(n)));
        }
        let torus_measure = (self.factor as f64).powi(self.n as i32);
        let mut fourier_sq = 0.0f64;
        for n in 0..=n_top {
            let cut = (n as f64).exp2() - 1.0;
            let terms: Vec<f64> = self
                .coeffs
                .iter()
                .zip(&self.rho)
                .filter(|(_, &r)| r > cut)
                .map(|(c, &r)| torus_measure * c.norm_sqr() / (1.0 + r * r))
                .collect();
            fourier_sq = fourier_sq.max(pairwise_sum(&terms) / (psi.at(n) * psi.at(n)));
        }
        TPsiReport {
            blockwise: blockwise_sq.sqrt(),
            fourier: fourier_sq.sqrt(),
            truncated_at: self.j_max,
        }
    }

    /// max_j ||Delta_j f||_inf / (2^j ||Delta_j f||_2), zero blocks skipped.
    /// The paper's comparison setting is n = 2.
    pub fn nikolskii_ratio(&self) -> Result<f64> {
        if self.n != 2 {
            return Err(Error::parameter("Nikolskii ratio is defined for n = 2"));
        }
        let mut best = 0.0f64;
        for j in 0..=self.j_max {
            let l2 = self.l2_sq[j].sqrt();
            if l2 < 1e-300 {
                continue;
            }
            best = best.max(self.linf[j] / ((j as f64).exp2() * l2));
        }
        Ok(best)
    }

    /// Plancherel check constant: sum_j ||Delta_j f||_2^2 / ||f||_2^2.
    pub fn plancherel_ratio(&self, f: &GridFunction) -> f64 {
        let total = pairwise_sum(&self.l2_sq);
        let l2 = f.l2_norm_sq();
        if l2 == 0.0 {
            return 1.0;
        }
        total / l2
    }

    /// CSV of per-block norms: j, linf, l2.
    pub fn block_norms_csv(&self) -> String {
        let mut out = String::from("j,linf,l2\n");
        for j in 0..=self.j_max {
            out.push_str(&format!("{j},{},{}\n", self.linf[j], self.l2_sq[j].sqrt()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TPsiReport {
    pub blockwise: f64,
    pub fourier: f64,
    pub truncated_at: usize,
}

/// Orthonormal Haar coefficients lambda_{N,l,G} = 2^{Nn/2} (f, Upsilon_{N,l,G}),
/// exact for piecewise-constant f. Scales N = 0..J-1; G indexes the 2^n - 1
/// detail orientations. n in {1, 2}.
#[derive(Debug, Clone)]
pub struct HaarCoeffs {
    pub n: usize,
    pub j: usize,
    /// (f, scaling function) = mean of f over Q0
    pub scaling: f64,
    /// detail[N][g][l]: scale N, orientation g, position l (flat)
    pub detail: Vec<Vec<Vec<f64>>>,
}

pub fn haar_coeffs(f: &GridFunction) -> Result<HaarCoeffs> {
    let n = f.dim();
    if n > 2 {
        return Err(Error::parameter("Haar transform supports n in {1, 2}"));
    }
    let j = f.depth();
    // cell averages per level, coarsened from the finest
    let mut avgs: Vec<Vec<f64>> = vec![f.values().to_vec()];
    for k in (0..j).rev() {
        let finer = &avgs[avgs.len() - 1];
        let count = 1usize << (n * k);
        let mut level = vec![0.0; count];
        for (flat, lv) in level.iter_mut().enumerate() {
            let cube = DyadicCube::from_flat(k, n, flat);
            let mut s = 0.0;
            for ch in cube.children(n) {
                s += finer[ch.flat_index(n)];
            }
            *lv = s / (1 << n) as f64;
        }
        avgs.push(level);
    }
    avgs.reverse(); // avgs[k] = averages at level k

    let orientations = (1usize << n) - 1;
    let mut detail = Vec::with_capacity(j);
    for nn in 0..j {
        let count = 1usize << (n * nn);
        let mut per_g: Vec<Vec<f64>> = vec![vec![0.0; count]; orientations];
        for flat in 0..count {
            let cube = DyadicCube::from_flat(nn, n, flat);
            let kids = cube.children(n);
            // child averages in corner order
            let a: Vec<f64> = kids.iter().map(|c| avgs[nn + 1][c.flat_index(n)]).collect();
            // tensor Haar: orientation g has sign pattern (-1)^{<g, corner>};
            // (f, Upsilon_{N,l,G}) = 2^{-Nn/2} * mean of signed child averages;
            // lambda = 2^{Nn/2} (f, Upsilon) = mean of signed child averages
            for g in 1..=orientations {
                let mut s = 0.0;
                for (corner, &av) in a.iter().enumerate() {
                    let sign = if (corner & g).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    s += sign * av;
                }
                per_g[g - 1][flat] = s / (1 << n) as f64;
            }
        }
        detail.push(per_g);
    }
    Ok(HaarCoeffs { n, j, scaling: avgs[0][0], detail })
}

impl HaarCoeffs {
    /// The stored mean at (N, G, l) is exactly lambda_{N,l,G} in the
    /// 2^{Nn/2}(f, Upsilon) normalization; the inner product itself is
    /// 2^{-Nn/2} lambda.
    pub fn lambda(&self, scale: usize, g: usize, flat: usize) -> f64 {
        self.detail[scale][g - 1][flat]
    }

    /// Parseval energy: scaling^2 + sum over details of 2^{-nN} lambda^2;
    /// equals ||f||_2^2 for the orthonormal basis.
    pub fn energy(&self) -> f64 {
        let mut terms = vec![self.scaling * self.scaling];
        for (nn, per_g) in self.detail.iter().enumerate() {
            let w = (-((self.n * nn) as f64)).exp2();
            for g in per_g {
                for &lam in g {
                    terms.push(w * lam * lam);
                }
            }
        }
        pairwise_sum(&terms)
    }
}

/// Grid realization of the orthonormal Haar wavelet Upsilon_{K,l,G}:
/// values +-2^{Kn/2} on the 2^n corners of the level-K cube at position l.
/// Requires J >= K + 1.
pub fn haar_atom(n: usize, j: usize, scale: usize, pos: [u32; 3], g: usize) -> Result<GridFunction> {
    if scale + 1 > j {
        return Err(Error::parameter(format!("Haar atom at scale {scale} needs J >= {}", scale + 1)));
    }
    if g == 0 || g >= (1usize << n) {
        return Err(Error::parameter("orientation g must be in 1..2^n"));
    }
    let amp = ((n * scale) as f64 / 2.0).exp2();
    let mut values = vec![0.0; 1usize << (n * j)];
    let cube = DyadicCube::new(scale, pos);
    for (corner, child) in cube.children(n).iter().enumerate() {
        let sign = if (corner & g).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        // fill all finest cells of this child
        let shift = j - (scale + 1);
        let side = 1usize << shift;
        let total = 1usize << (n * shift);
        for t in 0..total {
            let mut rem = t;
            let mut idx = [0u32; 3];
            for d in (0..n).rev() {
                idx[d] = (child.index[d] as usize * side + rem % side) as u32;
                rem /= side;
            }
            values[DyadicCube::new(j, idx).flat_index(n)] = sign * amp;
        }
    }
    GridFunction::new(n, j, values, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn partition_of_unity_is_exact_on_grid() {
        let f = GridFunction::constant(2, 4, 1.0);
        let lp = lp_blocks(&f, 2).unwrap();
        assert!(lp.partition_of_unity_defect() < 1e-12);
    }

    #[test]
    fn reconstruction_to_1e10() {
        let f = GridFunction::from_fn(2, 5, |x| {
            (7.0 * x[0]).sin() * (3.0 * x[1]).cos() + 0.3 * (13.0 * x[0] * x[1]).sin()
        });
        let lp = lp_blocks(&f, 2).unwrap();
        assert!(lp.reconstruction_defect(&f) < 1e-10);
    }

    #[test]
    fn constant_on_torus_lives_in_block_zero() {
        // f = 1 embedded in a 2x torus is not constant on the torus, but a
        // true constant has only the zero frequency: feed the full torus by
        // taking factor 2 with a function equal to 1 and checking that the
        // nonzero-block mass is concentrated where the embedding jumps
        let f = GridFunction::constant(1, 6, 1.0);
        let lp = lp_blocks(&f, 2).unwrap();
        // zero frequency alone reconstructs the mean; block 0 carries it
        assert!(lp.linf[0] > 0.4);
    }

    #[test]
    fn single_frequency_sine_hits_one_block() {
        // frequency rho = pi * k for k = 8 on the 2-torus: rho = 25.13,
        // inside the annulus of j = 5 (16 < rho < 64, peak weight at ~2^j)
        let f = GridFunction::from_fn(1, 6, |x| (2.0 * std::f64::consts::PI * 8.0 * x[0]).sin());
        let lp = lp_blocks(&f, 2).unwrap();
        let dominant = (0..=lp.j_max).max_by(|&a, &b| lp.l2_sq[a].total_cmp(&lp.l2_sq[b])).unwrap();
        let total: f64 = lp.l2_sq.iter().sum();
        assert!(lp.l2_sq[dominant] / total > 0.6, "energy spread too wide");
    }

    #[test]
    fn plancherel_ratio_in_band() {
        let f = GridFunction::from_fn(2, 5, |x| (9.0 * x[0]).sin() + (17.0 * x[1]).cos());
        let lp = lp_blocks(&f, 2).unwrap();
        // blocks overlap, so sum of block energies sits in [c, 1] relative
        // to the embedded L2 mass... compare against the torus L2 of f
        let r = lp.plancherel_ratio(&f);
        assert!(r > 0.3 && r < 1.01, "plancherel ratio {r}");
    }

    #[test]
    fn zero_function_norms_vanish() {
        let f = GridFunction::constant(2, 3, 0.0);
        let lp = lp_blocks(&f, 2).unwrap();
        let psi = Decay::power(0.5, 32).unwrap();
        assert_eq!(lp.vpsi_norm(&psi), 0.0);
        let t = lp.tpsi_norm(&psi);
        assert_eq!(t.blockwise, 0.0);
        assert_eq!(t.fourier, 0.0);
    }

    #[test]
    fn haar_of_constant_has_only_scaling() {
        let f = GridFunction::constant(2, 3, 5.0);
        let h = haar_coeffs(&f).unwrap();
        assert_relative_eq!(h.scaling, 5.0);
        for per_g in &h.detail {
            for g in per_g {
                for &c in g {
                    assert_relative_eq!(c, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn haar_atom_roundtrip_single_coefficient() {
        let f = haar_atom(2, 4, 1, [1, 0, 0], 3).unwrap();
        let h = haar_coeffs(&f).unwrap();
        // mean is zero
        assert_relative_eq!(h.scaling, 0.0, epsilon = 1e-12);
        // exactly one nonzero detail: scale 1, orientation g=3, position (1,0);
        // lambda = 2^{Nn/2} since the inner product is 1 by orthonormality
        let mut nonzero = 0;
        for (nn, per_g) in h.detail.iter().enumerate() {
            for (gi, g) in per_g.iter().enumerate() {
                for (flat, &c) in g.iter().enumerate() {
                    if c.abs() > 1e-12 {
                        nonzero += 1;
                        assert_eq!((nn, gi + 1, flat), (1, 3, 2));
                        assert_relative_eq!(c, 2.0, epsilon = 1e-12);
                    }
                }
            }
        }
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn haar_parseval_random() {
        let mut s = 0x9e37u64;
        let mut rand = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 40) as f64 / (1u64 << 24) as f64 - 0.5
        };
        let vals: Vec<f64> = (0..64).map(|_| rand()).collect();
        let f = GridFunction::new(2, 3, vals, false).unwrap();
        let h = haar_coeffs(&f).unwrap();
        assert_relative_eq!(h.energy(), f.l2_norm_sq(), max_relative = 1e-10);
    }

    #[test]
    fn nikolskii_requires_2d() {
        let f = GridFunction::constant(1, 4, 1.0);
        let lp = lp_blocks(&f, 2).unwrap();
        assert!(lp.nikolskii_ratio().is_err());
    }
}
