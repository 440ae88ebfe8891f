//! Weighted dyadic maximal operators, shifted-grid fractional maximal
//! functions, and discrete Riesz potentials.
//!
//! The dyadic operator is exact on the tree: one root-to-leaf sweep after
//! the integral table is built. The all-cubes (fractional) operator and the
//! Riesz potential live on a zero-padded domain, since compact support plus
//! padding is how the whole-space norms are approximated here.

use crate::error::{Error, Result};
use crate::grid::{DyadicCube, GridFunction, IntegralTable, MAX_DIM};
use crate::numeric::{gamma, pairwise_sum};
use crate::par::map_indexed;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Parameters of the maximal operator: weight |Q|^{lambda/n - 1} (1 + ln(1/|Q|))^alpha.
///
/// The (p, q) convention is lambda = n (1/p - 1/q).
#[derive(Debug, Clone, Copy)]
pub struct MaximalParams {
    pub lambda: f64,
    pub alpha: f64,
}

impl MaximalParams {
    pub fn new(lambda: f64, alpha: f64, n: usize) -> Result<Self> {
        if !(0.0..(n as f64)).contains(&lambda) {
            return Err(Error::parameter(format!(
                "lambda = {lambda} outside [0, n) with n = {n}"
            )));
        }
        Ok(MaximalParams { lambda, alpha })
    }

    pub fn from_pq(p: f64, q: f64, alpha: f64, n: usize) -> Result<Self> {
        MaximalParams::new(n as f64 * (1.0 / p - 1.0 / q), alpha, n)
    }
}

/// Log weight (1 - (log|Q|)_-)^alpha for measure 2^{-kn}; equals
/// (1 + kn ln 2)^alpha, natural logarithm throughout.
pub fn log_weight(level: usize, n: usize, alpha: f64) -> f64 {
    (1.0 + (level * n) as f64 * std::f64::consts::LN_2).powf(alpha)
}

/// Weight of a level-k cube in the maximal operator.
fn maximal_weight(level: usize, n: usize, params: &MaximalParams) -> f64 {
    // |Q|^{lambda/n - 1} = 2^{k (n - lambda)}
    (level as f64 * (n as f64 - params.lambda)).exp2() * log_weight(level, n, params.alpha)
}

/// Pointwise M_{lambda,alpha,Q0} f: max over dyadic cubes containing x of
/// the weighted integral of |f|. Constant on finest cells.
pub fn dyadic_maximal(f: &GridFunction, table: &IntegralTable, params: &MaximalParams) -> GridFunction {
    let n = f.dim();
    let j = f.depth();
    let mut best: Vec<f64> = vec![maximal_weight(0, n, params) * table.cube_integral(&DyadicCube::root())];
    for k in 1..=j {
        let w = maximal_weight(k, n, params);
        let level = table.level_abs(k);
        let prev = best;
        best = map_indexed(level.len(), |flat| {
            let q = DyadicCube::from_flat(k, n, flat);
            let parent = q.parent().unwrap().flat_index(n);
            prev[parent].max(w * level[flat])
        });
    }
    GridFunction::new(n, j, best, true).unwrap()
}

/// A field on the zero-padded domain: `factor` copies of Q0 per side, the
/// original function occupying the central block.
#[derive(Debug, Clone)]
pub struct PaddedField {
    pub n: usize,
    pub j: usize,
    /// cells per unit side, 2^J
    pub unit: usize,
    /// padded side in units (3 or 5)
    pub factor: usize,
    /// row-major over the padded grid, first coordinate slowest
    pub values: Vec<f64>,
}

impl PaddedField {
    pub fn side(&self) -> usize {
        self.factor * self.unit
    }

    pub fn cell_measure(&self) -> f64 {
        let h = 1.0 / self.unit as f64;
        h.powi(self.n as i32)
    }

    /// Embed |f| centered: Q0 sits at unit offset (factor-1)/2 per axis.
    pub fn embed_abs(f: &GridFunction, factor: usize) -> PaddedField {
        assert!(factor % 2 == 1 && factor >= 3, "padding factor must be odd and >= 3");
        let n = f.dim();
        let unit = f.side();
        let side = factor * unit;
        let off = (factor - 1) / 2 * unit;
        let mut values = vec![0.0; side.pow(n as u32)];
        for flat in 0..f.num_cells() {
            let c = DyadicCube::from_flat(f.depth(), n, flat);
            let mut idx = 0usize;
            for d in 0..n {
                idx = idx * side + (c.index[d] as usize + off);
            }
            values[idx] = f.values()[flat].abs();
        }
        PaddedField { n, j: f.depth(), unit, factor, values }
    }

    /// Restrict the central block back to a GridFunction on Q0.
    pub fn restrict_center(&self) -> GridFunction {
        let side = self.side();
        let off = (self.factor - 1) / 2 * self.unit;
        let mut values = vec![0.0; self.unit.pow(self.n as u32)];
        for flat in 0..values.len() {
            let c = DyadicCube::from_flat(self.j, self.n, flat);
            let mut idx = 0usize;
            for d in 0..self.n {
                idx = idx * side + (c.index[d] as usize + off);
            }
            values[flat] = self.values[idx];
        }
        GridFunction::new(self.n, self.j, values, true).unwrap()
    }

    /// L^q norm over the padded domain.
    pub fn lq_norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.values.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
        }
        let cell = self.cell_measure();
        let terms: Vec<f64> = self.values.iter().map(|v| v.abs().powf(q) * cell).collect();
        pairwise_sum(&terms).powf(1.0 / q)
    }
}

/// Summed-area table over the padded grid for O(1) box sums.
struct Sat {
    n: usize,
    side: usize,
    data: Vec<f64>,
}

impl Sat {
    fn build(field: &PaddedField) -> Sat {
        let n = field.n;
        let side = field.side();
        let ext = side + 1;
        let mut data = vec![0.0; ext.pow(n as u32)];
        match n {
            1 => {
                for x in 0..side {
                    data[x + 1] = data[x] + field.values[x];
                }
            }
            2 => {
                for x in 0..side {
                    for y in 0..side {
                        data[(x + 1) * ext + y + 1] = field.values[x * side + y]
                            + data[x * ext + y + 1]
                            + data[(x + 1) * ext + y]
                            - data[x * ext + y];
                    }
                }
            }
            3 => {
                for x in 0..side {
                    for y in 0..side {
                        for z in 0..side {
                            let at = |a: usize, b: usize, c: usize| data[(a * ext + b) * ext + c];
                            data[((x + 1) * ext + y + 1) * ext + z + 1] = field.values
                                [(x * side + y) * side + z]
                                + at(x, y + 1, z + 1)
                                + at(x + 1, y, z + 1)
                                + at(x + 1, y + 1, z)
                                - at(x, y, z + 1)
                                - at(x, y + 1, z)
                                - at(x + 1, y, z)
                                + at(x, y, z);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Sat { n, side, data }
    }

    /// Sum of cell values over the box with corner `lo` (cells) and side `w` (cells).
    fn box_sum(&self, lo: &[usize], w: usize) -> f64 {
        let ext = self.side + 1;
        match self.n {
            1 => self.data[lo[0] + w] - self.data[lo[0]],
            2 => {
                let (x0, y0, x1, y1) = (lo[0], lo[1], lo[0] + w, lo[1] + w);
                self.data[x1 * ext + y1] - self.data[x0 * ext + y1] - self.data[x1 * ext + y0]
                    + self.data[x0 * ext + y0]
            }
            3 => {
                let at = |a: usize, b: usize, c: usize| self.data[(a * ext + b) * ext + c];
                let (x0, y0, z0) = (lo[0], lo[1], lo[2]);
                let (x1, y1, z1) = (lo[0] + w, lo[1] + w, lo[2] + w);
                at(x1, y1, z1) - at(x0, y1, z1) - at(x1, y0, z1) - at(x1, y1, z0)
                    + at(x0, y0, z1)
                    + at(x0, y1, z0)
                    + at(x1, y0, z0)
                    - at(x0, y0, z0)
            }
            _ => unreachable!(),
        }
    }
}

fn for_each_multi(n: usize, bound: usize, f: impl FnMut(&[usize; MAX_DIM])) {
    for_each_multi_bounds(n, &[bound; MAX_DIM], f);
}

fn for_each_multi_bounds(n: usize, bounds: &[usize; MAX_DIM], mut f: impl FnMut(&[usize; MAX_DIM])) {
    let mut idx = [0usize; MAX_DIM];
    let total: usize = bounds[..n].iter().product();
    for _ in 0..total {
        f(&idx);
        for d in (0..n).rev() {
            idx[d] += 1;
            if idx[d] < bounds[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Shifted-grid approximation of the all-cubes fractional maximal function
/// M_lambda on the padded domain.
///
/// The supremum runs over 3^n dyadic systems translated by multiples of 1/3
/// of the unit side (snapped to the cell grid, since 1/3 is not dyadic),
/// plus the side-2 super-cubes of each system and the full padded box. Every
/// competitor is a genuine grid-aligned cube, so the result is dominated by
/// the exhaustive all-cubes maximum and dominates the unshifted dyadic one.
pub fn fractional_maximal_padded(f: &GridFunction, lambda: f64, factor: usize) -> Result<PaddedField> {
    let n = f.dim();
    if !(0.0..(n as f64)).contains(&lambda) {
        return Err(Error::parameter(format!("lambda = {lambda} outside [0, n)")));
    }
    let field = PaddedField::embed_abs(f, factor);
    let sat = Sat::build(&field);
    let unit = field.unit;
    let side = field.side();
    let h = 1.0 / unit as f64;
    let shift_cells = ((unit as f64) / 3.0).round().max(1.0) as usize;
    let mut best = vec![0.0_f64; field.values.len()];

    let weight = |w_cells: usize| -> f64 {
        let sl = w_cells as f64 * h;
        sl.powi(n as i32).powf(lambda / n as f64 - 1.0)
    };

    // whole padded box
    {
        let total = sat.box_sum(&[0usize; MAX_DIM][..n], side) * field.cell_measure();
        let v = weight(side) * total;
        for b in best.iter_mut() {
            *b = v;
        }
    }

    let cellm = field.cell_measure();
    for sigma in 0..3usize.pow(n as u32) {
        let mut off = [0usize; MAX_DIM];
        let mut s = sigma;
        for d in 0..n {
            off[d] = (s % 3) * shift_cells;
            s /= 3;
        }
        // cube sides 2^{J-k} cells for k = J..0, then the side-2-unit level
        for w_cells in (0..=f.depth()).map(|k| unit >> k).chain(std::iter::once(2 * unit)) {
            let w = weight(w_cells) * cellm;
            // cubes anchored at off + w_cells * Z^n, clipped to the domain
            let mut counts = [0usize; MAX_DIM];
            for d in 0..n {
                counts[d] = (side - off[d]) / w_cells;
            }
            if counts[..n].iter().any(|&c| c == 0) {
                continue;
            }
            for_each_multi_bounds(n, &counts, |c| {
                let mut lo = [0usize; MAX_DIM];
                for d in 0..n {
                    lo[d] = off[d] + c[d] * w_cells;
                }
                let v = w * sat.box_sum(&lo[..n], w_cells);
                // write the max into every covered cell
                for_each_multi(n, w_cells, |u| {
                    let mut idx = 0usize;
                    for d in 0..n {
                        idx = idx * side + lo[d] + u[d];
                    }
                    if v > best[idx] {
                        best[idx] = v;
                    }
                });
            });
        }
    }
    Ok(PaddedField { n, j: f.depth(), unit, factor, values: best })
}

/// Restriction of the shifted-grid maximal function to Q0.
pub fn fractional_maximal(f: &GridFunction, lambda: f64) -> Result<GridFunction> {
    Ok(fractional_maximal_padded(f, lambda, 3)?.restrict_center())
}

/// Exhaustive all-cubes maximal function over every grid-aligned cube of the
/// padded domain. O(side^{n+1}) cube evaluations; test oracle only.
pub fn all_cubes_maximal_padded(f: &GridFunction, lambda: f64, factor: usize) -> Result<PaddedField> {
    let n = f.dim();
    if !(0.0..(n as f64)).contains(&lambda) {
        return Err(Error::parameter(format!("lambda = {lambda} outside [0, n)")));
    }
    let field = PaddedField::embed_abs(f, factor);
    let sat = Sat::build(&field);
    let side = field.side();
    let h = 1.0 / field.unit as f64;
    let cellm = field.cell_measure();
    let mut best = vec![0.0_f64; field.values.len()];
    for w_cells in 1..=side {
        let sl = w_cells as f64 * h;
        let w = sl.powi(n as i32).powf(lambda / n as f64 - 1.0) * cellm;
        let count = side - w_cells + 1;
        for_each_multi(n, count, |lo| {
            let v = w * sat.box_sum(&lo[..n], w_cells);
            for_each_multi(n, w_cells, |u| {
                let mut idx = 0usize;
                for d in 0..n {
                    idx = idx * side + lo[d] + u[d];
                }
                if v > best[idx] {
                    best[idx] = v;
                }
            });
        });
    }
    Ok(PaddedField { n, j: f.depth(), unit: field.unit, factor, values: best })
}

/// Exact average of |z|^{lambda - n} over one grid cell centered at the
/// origin; regularizes the kernel diagonal.
///
/// 1D is closed-form; 2D/3D reduce to smooth 1D profiles integrated by
/// Gauss-Legendre with interval doubling until 1e-10 relative.
pub fn kernel_cell_average(n: usize, lambda: f64, h: f64) -> f64 {
    let a = h / 2.0;
    match n {
        1 => {
            // (1/h) * 2 * a^lambda / lambda
            2.0 * a.powf(lambda) / (lambda * h)
        }
        2 => {
            // 8/(h^2 lambda) * a^lambda * int_0^{pi/4} sec^lambda(theta) d(theta)
            let integrand = |t: f64| (1.0 / t.cos()).powf(lambda);
            let i = adaptive_gauss(&integrand, 0.0, std::f64::consts::FRAC_PI_4);
            8.0 * a.powf(lambda) * i / (h * h * lambda)
        }
        3 => {
            // radial in the double integral over the cube face directions:
            // reduce to the 2D set by integrating the polar angle numerically.
            // integral over [-a,a]^3 of |z|^{lambda-3} dz via spherical sectors:
            // 48 * int over the fundamental wedge; done as nested Gauss.
            let inner = |phi: f64, theta: f64| {
                // max radius to the cube boundary along (theta, phi), z-face wedge
                let r = a / (phi.cos() * theta.cos().max(1e-300)).max(1e-300);
                (r.powf(lambda) / lambda) * phi.cos()
            };
            // fundamental wedge: theta in [0, pi/4], phi in [0, atan(cos theta ... )]
            let outer = |theta: f64| {
                let phi_max = (1.0 / (theta.cos())).atan();
                adaptive_gauss(&|phi: f64| inner(phi, theta), 0.0, phi_max)
            };
            let i = adaptive_gauss(&outer, 0.0, std::f64::consts::FRAC_PI_4);
            48.0 * i / (h * h * h)
        }
        _ => unreachable!(),
    }
}

/// Gauss-Legendre with panel doubling to 1e-10 relative.
fn adaptive_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    // 8-point nodes/weights on [-1, 1]
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_328_99,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_2,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_361_98,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_47,
        0.101_228_536_290_376_26,
    ];
    let panel = |lo: f64, hi: f64| -> f64 {
        let c = 0.5 * (lo + hi);
        let r = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for i in 0..4 {
            acc += W[i] * (f(c + r * X[i]) + f(c - r * X[i]));
        }
        acc * r
    };
    let mut parts = 1usize;
    let mut prev = panel(a, b);
    loop {
        parts *= 2;
        let width = (b - a) / parts as f64;
        let vals: Vec<f64> = (0..parts)
            .map(|i| panel(a + i as f64 * width, a + (i + 1) as f64 * width))
            .collect();
        let cur = pairwise_sum(&vals);
        if (cur - prev).abs() <= 1e-10 * cur.abs().max(1e-300) || parts > 4096 {
            return cur;
        }
        prev = cur;
    }
}

/// Discrete Riesz potential I_lambda(|f|) on the padded domain: linear
/// convolution of cell masses with K(z) = |z|^{lambda-n}, the diagonal
/// replaced by the exact cell average of the kernel.
pub fn riesz_potential_padded(f: &GridFunction, lambda: f64, factor: usize) -> Result<PaddedField> {
    let n = f.dim();
    if !(lambda > 0.0 && lambda < n as f64) {
        return Err(Error::parameter(format!("lambda = {lambda} outside (0, n)")));
    }
    let field = PaddedField::embed_abs(f, factor);
    let side = field.side();
    let h = 1.0 / field.unit as f64;
    let diag = kernel_cell_average(n, lambda, h);
    // circular FFT size: sources live in the center block (unit cells), so
    // L >= side + unit avoids wraparound in the linear convolution
    let l = (side + field.unit + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(l);
    let ifft = planner.plan_fft_inverse(l);

    let kernel_1d_offsets: Vec<i64> = (0..l as i64)
        .map(|i| if i <= (l / 2) as i64 { i } else { i - l as i64 })
        .collect();

    // kernel on the offset grid
    let kval = |offs: &[i64]| -> f64 {
        let d2: f64 = offs.iter().map(|&o| (o as f64 * h) * (o as f64 * h)).sum();
        if d2 == 0.0 {
            diag
        } else {
            d2.sqrt().powf(lambda - n as f64)
        }
    };

    // forward transforms of source (zero-extended to l^n) and kernel
    let ln = l.pow(n as u32);
    let mut src = vec![Complex64::new(0.0, 0.0); ln];
    for flat in 0..field.values.len() {
        let v = field.values[flat];
        if v != 0.0 {
            let mut rem = flat;
            let mut idx = 0usize;
            let mut coords = [0usize; MAX_DIM];
            for d in (0..n).rev() {
                coords[d] = rem % side;
                rem /= side;
            }
            for d in 0..n {
                idx = idx * l + coords[d];
            }
            src[idx] = Complex64::new(v, 0.0);
        }
    }
    let mut ker = vec![Complex64::new(0.0, 0.0); ln];
    for idx in 0..ln {
        let mut rem = idx;
        let mut offs = [0i64; MAX_DIM];
        for d in (0..n).rev() {
            offs[d] = kernel_1d_offsets[rem % l];
            rem /= l;
        }
        ker[idx] = Complex64::new(kval(&offs[..n]), 0.0);
    }

    fftn(&mut src, l, n, &*fft);
    fftn(&mut ker, l, n, &*fft);
    for i in 0..ln {
        src[i] *= ker[i];
    }
    fftn(&mut src, l, n, &*ifft);
    let norm = 1.0 / (ln as f64);

    let cellm = field.cell_measure();
    let mut out = vec![0.0; field.values.len()];
    for flat in 0..out.len() {
        let mut rem = flat;
        let mut coords = [0usize; MAX_DIM];
        for d in (0..n).rev() {
            coords[d] = rem % side;
            rem /= side;
        }
        let mut idx = 0usize;
        for d in 0..n {
            idx = idx * l + coords[d];
        }
        out[flat] = src[idx].re * norm * cellm;
    }
    Ok(PaddedField { n, j: f.depth(), unit: field.unit, factor, values: out })
}

/// n-dimensional FFT as repeated 1D passes (rows along each axis).
fn fftn(data: &mut [Complex64], l: usize, n: usize, fft: &dyn rustfft::Fft<f64>) {
    match n {
        1 => fft.process(data),
        2 => {
            for row in data.chunks_exact_mut(l) {
                fft.process(row);
            }
            // columns: transpose, process, transpose back
            transpose_square(data, l);
            for row in data.chunks_exact_mut(l) {
                fft.process(row);
            }
            transpose_square(data, l);
        }
        3 => {
            for row in data.chunks_exact_mut(l) {
                fft.process(row);
            }
            let mut buf = vec![Complex64::new(0.0, 0.0); l];
            for x in 0..l {
                for z in 0..l {
                    for y in 0..l {
                        buf[y] = data[(x * l + y) * l + z];
                    }
                    fft.process(&mut buf);
                    for y in 0..l {
                        data[(x * l + y) * l + z] = buf[y];
                    }
                }
            }
            for y in 0..l {
                for z in 0..l {
                    for x in 0..l {
                        buf[x] = data[(x * l + y) * l + z];
                    }
                    fft.process(&mut buf);
                    for x in 0..l {
                        data[(x * l + y) * l + z] = buf[x];
                    }
                }
            }
        }
        _ => unreachable!(),
    }
}

fn transpose_square(data: &mut [Complex64], l: usize) {
    for i in 0..l {
        for j in (i + 1)..l {
            data.swap(i * l + j, j * l + i);
        }
    }
}

/// Direct O(N^2) Riesz potential; oracle for the FFT route.
pub fn riesz_potential_direct(f: &GridFunction, lambda: f64, factor: usize) -> Result<PaddedField> {
    let n = f.dim();
    if !(lambda > 0.0 && lambda < n as f64) {
        return Err(Error::parameter(format!("lambda = {lambda} outside (0, n)")));
    }
    let field = PaddedField::embed_abs(f, factor);
    let side = field.side();
    let h = 1.0 / field.unit as f64;
    let diag = kernel_cell_average(n, lambda, h);
    let cellm = field.cell_measure();
    let coords_of = |mut flat: usize| {
        let mut c = [0i64; MAX_DIM];
        for d in (0..n).rev() {
            c[d] = (flat % side) as i64;
            flat /= side;
        }
        c
    };
    let sources: Vec<(usize, f64)> = field
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| (i, v))
        .collect();
    let values = map_indexed(field.values.len(), |tflat| {
        let tc = coords_of(tflat);
        let terms: Vec<f64> = sources
            .iter()
            .map(|&(sflat, v)| {
                let sc = coords_of(sflat);
                let d2: f64 = (0..n)
                    .map(|d| {
                        let o = (tc[d] - sc[d]) as f64 * h;
                        o * o
                    })
                    .sum();
                let k = if d2 == 0.0 { diag } else { d2.sqrt().powf(lambda - n as f64) };
                v * k * cellm
            })
            .collect();
        pairwise_sum(&terms)
    });
    Ok(PaddedField { n, j: f.depth(), unit: field.unit, factor, values })
}

/// Report for the negative-Sobolev lattice norm ||I_lambda(|f|)||_{L^q}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SobolevReport {
    pub value: f64,
    pub lambda: f64,
    pub q: f64,
    pub pad_factor: usize,
    /// Plancherel route with multiplier gamma(lambda,n) |xi|^{-lambda} on the
    /// padded torus, zero frequency dropped; only for q = 2.
    pub fourier_diagnostic: Option<f64>,
}

/// L^q norm of the Riesz potential over the padded domain.
pub fn sobolev_negative_norm(f: &GridFunction, lambda: f64, q: f64, factor: usize) -> Result<SobolevReport> {
    if !(1.0..f64::INFINITY).contains(&q) {
        return Err(Error::parameter(format!("q = {q} outside [1, inf)")));
    }
    let pot = riesz_potential_padded(f, lambda, factor)?;
    let value = pot.lq_norm(q);
    let fourier_diagnostic = if q == 2.0 { Some(fourier_sobolev(f, lambda, factor)) } else { None };
    Ok(SobolevReport { value, lambda, q, pad_factor: factor, fourier_diagnostic })
}

/// Riesz symbol constant: I_lambda has Fourier symbol c(n,lambda) |xi|^{-lambda}.
fn riesz_symbol_constant(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    std::f64::consts::PI.powf(nf / 2.0) * (lambda).exp2() * gamma(lambda / 2.0)
        / gamma((nf - lambda) / 2.0)
}

fn fourier_sobolev(f: &GridFunction, lambda: f64, factor: usize) -> f64 {
    let n = f.dim();
    let field = PaddedField::embed_abs(f, factor);
    let side = field.side();
    let s_len = factor as f64; // padded torus side in units
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(side);
    let ln = side.pow(n as u32);
    let mut data: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fftn(&mut data, side, n, &*fft);
    let c = riesz_symbol_constant(n, lambda);
    let torus_measure = s_len.powi(n as i32);
    // coefficients c_k = FFT / side^n; Plancherel: ||g||_2^2 = |T| sum |c_k|^2
    let mut terms = Vec::with_capacity(ln);
    for idx in 0..ln {
        let mut rem = idx;
        let mut k2 = 0.0f64;
        for _ in 0..n {
            let kd = rem % side;
            rem /= side;
            let kd = if kd <= side / 2 { kd as f64 } else { kd as f64 - side as f64 };
            let xi = 2.0 * std::f64::consts::PI * kd / s_len;
            k2 += xi * xi;
        }
        if k2 == 0.0 {
            continue; // zero frequency dropped
        }
        let ck = data[idx] / (ln as f64);
        terms.push(torus_measure * ck.norm_sqr() * (c * k2.sqrt().powf(-lambda)).powi(2));
    }
    pairwise_sum(&terms).sqrt()
}
