//! Grid functions on the unit cube, the dyadic cube tree, and exact
//! cube integrals.
//!
//! A [`GridFunction`] is piecewise constant on the cells of a uniform
//! 2^J-per-side grid over Q0 = [0,1)^n. Every integral over a dyadic cube is
//! then a finite sum of cell values and is computed exactly (up to a fixed
//! pairwise summation order), which lets the norm identities downstream be
//! asserted with tight tolerances instead of discretization slack.

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use std::io::{Read, Write};

pub const MAX_DIM: usize = 3;

/// Piecewise-constant real field (or nonnegative measure) on [0,1)^n at
/// dyadic resolution 2^J cells per side.
///
/// Cell values are stored row-major with the first coordinate slowest: for
/// n = 2 the cell (x1, x2) lives at index `x1 * 2^J + x2`. When `nonneg` is
/// set the object is read as a measure with cell masses `value * 2^{-nJ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    n: usize,
    j: usize,
    values: Vec<f64>,
    nonneg: bool,
}

/// A node of the dyadic tree: side 2^{-level}, lower corner at
/// `index * 2^{-level}` componentwise. Only the first `n` entries of
/// `index` are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub level: usize,
    pub index: [u32; MAX_DIM],
}

impl DyadicCube {
    pub fn root() -> Self {
        DyadicCube { level: 0, index: [0; MAX_DIM] }
    }

    pub fn new(level: usize, index: [u32; MAX_DIM]) -> Self {
        DyadicCube { level, index }
    }

    /// Lebesgue measure 2^{-level*n}.
    pub fn measure(&self, n: usize) -> f64 {
        (-((self.level * n) as f64)).exp2()
    }

    pub fn side_length(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        if self.level == 0 {
            return None;
        }
        let mut idx = [0u32; MAX_DIM];
        for d in 0..MAX_DIM {
            idx[d] = self.index[d] / 2;
        }
        Some(DyadicCube { level: self.level - 1, index: idx })
    }

    /// The 2^n children, in lexicographic corner order.
    pub fn children(&self, n: usize) -> Vec<DyadicCube> {
        let mut out = Vec::with_capacity(1 << n);
        for bits in 0..(1u32 << n) {
            let mut idx = [0u32; MAX_DIM];
            for d in 0..n {
                idx[d] = 2 * self.index[d] + ((bits >> d) & 1);
            }
            out.push(DyadicCube { level: self.level + 1, index: idx });
        }
        out
    }

    pub fn contains(&self, other: &DyadicCube) -> bool {
        if other.level < self.level {
            return false;
        }
        let shift = other.level - self.level;
        (0..MAX_DIM).all(|d| (other.index[d] >> shift) == self.index[d])
    }

    /// Flat index of this cube within its level (row-major, first axis slowest).
    pub fn flat_index(&self, n: usize) -> usize {
        let side = 1usize << self.level;
        let mut acc = 0usize;
        for d in 0..n {
            acc = acc * side + self.index[d] as usize;
        }
        acc
    }

    pub fn from_flat(level: usize, n: usize, mut flat: usize) -> DyadicCube {
        let side = 1usize << level;
        let mut index = [0u32; MAX_DIM];
        for d in (0..n).rev() {
            index[d] = (flat % side) as u32;
            flat /= side;
        }
        DyadicCube { level, index }
    }
}

impl GridFunction {
    pub fn new(n: usize, j: usize, values: Vec<f64>, nonneg: bool) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::parameter(format!("dimension n = {n} outside 1..=3")));
        }
        if j > 15 {
            return Err(Error::parameter(format!("depth J = {j} too large")));
        }
        let expected = 1usize << (n * j);
        if values.len() != expected {
            return Err(Error::input(format!(
                "value array has length {} but 2^(nJ) = {expected}",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::input("non-finite cell value"));
        }
        if nonneg && values.iter().any(|&v| v < 0.0) {
            return Err(Error::input("nonneg flag set but a cell value is negative"));
        }
        Ok(GridFunction { n, j, values, nonneg })
    }

    pub fn constant(n: usize, j: usize, c: f64) -> Self {
        GridFunction::new(n, j, vec![c; 1usize << (n * j)], c >= 0.0).unwrap()
    }

    /// Indicator of a single finest cell, scaled so the total mass is 1.
    pub fn unit_atom(n: usize, j: usize, cell: [u32; MAX_DIM]) -> Self {
        let mut values = vec![0.0; 1usize << (n * j)];
        let cube = DyadicCube::new(j, cell);
        values[cube.flat_index(n)] = ((n * j) as f64).exp2();
        GridFunction { n, j, values, nonneg: true }
    }

    /// Build from a function of the cell-center coordinates.
    pub fn from_fn(n: usize, j: usize, f: impl Fn(&[f64]) -> f64) -> Self {
        let side = 1usize << j;
        let h = (-(j as f64)).exp2();
        let count = 1usize << (n * j);
        let mut values = Vec::with_capacity(count);
        let mut coords = [0usize; MAX_DIM];
        for _ in 0..count {
            let x: Vec<f64> = (0..n).map(|d| (coords[d] as f64 + 0.5) * h).collect();
            values.push(f(&x));
            for d in (0..n).rev() {
                coords[d] += 1;
                if coords[d] < side {
                    break;
                }
                coords[d] = 0;
            }
        }
        let nonneg = values.iter().all(|&v| v >= 0.0);
        GridFunction { n, j, values, nonneg }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.j
    }

    pub fn side(&self) -> usize {
        1 << self.j
    }

    pub fn num_cells(&self) -> usize {
        self.values.len()
    }

    pub fn cell_measure(&self) -> f64 {
        (-((self.n * self.j) as f64)).exp2()
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, cell: &DyadicCube) -> f64 {
        debug_assert_eq!(cell.level, self.j);
        self.values[cell.flat_index(self.n)]
    }

    /// Pointwise map; recomputes the nonneg flag.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        let nonneg = values.iter().all(|&v| v >= 0.0);
        GridFunction { n: self.n, j: self.j, values, nonneg }
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    /// Exact L^p norm of the piecewise-constant function, p in [1, inf].
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::parameter(format!("p = {p} outside [1, inf]")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0_f64, |a, &v| a.max(v.abs())));
        }
        let cell = self.cell_measure();
        let terms: Vec<f64> = self.values.iter().map(|v| v.abs().powf(p) * cell).collect();
        Ok(pairwise_sum(&terms).powf(1.0 / p))
    }

    /// Exact squared L^2 norm.
    pub fn l2_norm_sq(&self) -> f64 {
        let cell = self.cell_measure();
        let terms: Vec<f64> = self.values.iter().map(|v| v * v * cell).collect();
        pairwise_sum(&terms)
    }

    /// Mean over Q0.
    pub fn mean(&self) -> f64 {
        let cell = self.cell_measure();
        let terms: Vec<f64> = self.values.iter().map(|v| v * cell).collect();
        pairwise_sum(&terms)
    }

    /// l2-aggregated forward-difference gradient with periodic wrap,
    /// scaled to per-unit-length by 2^J. Restricted to n in {1, 2}.
    pub fn discrete_gradient_l2(&self) -> Result<f64> {
        if self.n > 2 {
            return Err(Error::parameter("gradient is implemented for n in {1, 2}"));
        }
        let side = self.side();
        let scale = (self.j as f64).exp2();
        let cell = self.cell_measure();
        let mut terms = Vec::with_capacity(self.values.len() * self.n);
        if self.n == 1 {
            for x in 0..side {
                let d = self.values[(x + 1) % side] - self.values[x];
                terms.push(d * d * scale * scale * cell);
            }
        } else {
            for x1 in 0..side {
                for x2 in 0..side {
                    let v = self.values[x1 * side + x2];
                    let d1 = self.values[((x1 + 1) % side) * side + x2] - v;
                    let d2 = self.values[x1 * side + (x2 + 1) % side] - v;
                    terms.push((d1 * d1 + d2 * d2) * scale * scale * cell);
                }
            }
        }
        Ok(pairwise_sum(&terms).sqrt())
    }
}

/// Per-level cumulative sums giving O(1) exact integrals of |f| (and of f)
/// over every dyadic cube up to depth J.
///
/// Level k holds one entry per cube of that level; a parent entry is the sum
/// of its 2^n children in a fixed order, so the additivity invariant
/// `cube_integral(Q) = sum over children` holds exactly in floating point.
#[derive(Debug, Clone)]
pub struct IntegralTable {
    n: usize,
    j: usize,
    /// abs[k][flat] = integral of |f| over the cube (k, flat)
    abs: Vec<Vec<f64>>,
    /// signed[k][flat] = integral of f over the cube (k, flat)
    signed: Vec<Vec<f64>>,
}

pub fn build_table(f: &GridFunction) -> IntegralTable {
    let n = f.dim();
    let j = f.depth();
    let cell = f.cell_measure();
    let mut abs: Vec<Vec<f64>> = Vec::with_capacity(j + 1);
    let mut signed: Vec<Vec<f64>> = Vec::with_capacity(j + 1);
    abs.push(f.values().iter().map(|v| v.abs() * cell).collect());
    signed.push(f.values().iter().map(|v| v * cell).collect());
    // levels J-1 down to 0; abs/signed are built finest-first then reversed
    for k in (0..j).rev() {
        let child_abs = &abs[abs.len() - 1];
        let child_signed = &signed[signed.len() - 1];
        let count = 1usize << (n * k);
        let mut la = vec![0.0; count];
        let mut ls = vec![0.0; count];
        for flat in 0..count {
            let cube = DyadicCube::from_flat(k, n, flat);
            let mut sa = 0.0;
            let mut ss = 0.0;
            for ch in cube.children(n) {
                let ci = ch.flat_index(n);
                sa += child_abs[ci];
                ss += child_signed[ci];
            }
            la[flat] = sa;
            ls[flat] = ss;
        }
        abs.push(la);
        signed.push(ls);
    }
    abs.reverse();
    signed.reverse();
    IntegralTable { n, j, abs, signed }
}

impl IntegralTable {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.j
    }

    /// Integral of |f| over Q.
    pub fn cube_integral(&self, q: &DyadicCube) -> f64 {
        self.abs[q.level][q.flat_index(self.n)]
    }

    /// Integral of f over Q (signed).
    pub fn cube_integral_signed(&self, q: &DyadicCube) -> f64 {
        self.signed[q.level][q.flat_index(self.n)]
    }

    /// Raw per-level slice of |f|-integrals, flat-indexed.
    pub fn level_abs(&self, k: usize) -> &[f64] {
        &self.abs[k]
    }

    pub fn level_signed(&self, k: usize) -> &[f64] {
        &self.signed[k]
    }

    /// f_Q = |Q|^{-1} * integral of f over Q.
    pub fn cube_average(&self, q: &DyadicCube) -> f64 {
        self.cube_integral_signed(q) / q.measure(self.n)
    }
}

/// Integral of |f - f_Q| over Q, exact for the piecewise-constant f.
pub fn oscillation_integral(f: &GridFunction, table: &IntegralTable, q: &DyadicCube) -> f64 {
    let n = f.dim();
    let avg = table.cube_average(q);
    let cell = f.cell_measure();
    let shift = f.depth() - q.level;
    let side = 1usize << shift;
    let mut terms = Vec::with_capacity(1 << (n * shift));
    let mut offs = [0usize; MAX_DIM];
    for _ in 0..(1usize << (n * shift)) {
        let mut idx = [0u32; MAX_DIM];
        for d in 0..n {
            idx[d] = (q.index[d] as usize * side + offs[d]) as u32;
        }
        let c = DyadicCube::new(f.depth(), idx);
        terms.push((f.value_at(&c) - avg).abs() * cell);
        for d in (0..n).rev() {
            offs[d] += 1;
            if offs[d] < side {
                break;
            }
            offs[d] = 0;
        }
    }
    pairwise_sum(&terms)
}

/// Nonincreasing rearrangement f* and its running average f** on (0,1],
/// both exact step functions with breakpoints at multiples of 2^{-nJ}.
#[derive(Debug, Clone)]
pub struct Rearrangement {
    /// sorted descending values of |f|
    pub star: Vec<f64>,
    /// cum[i] = integral of f* over (0, (i+1)/M]
    pub cum: Vec<f64>,
    /// breakpoint width 1/M
    pub step: f64,
}

pub fn rearrangement(f: &GridFunction) -> Rearrangement {
    let mut star: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    star.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let step = 1.0 / star.len() as f64;
    let mut cum = Vec::with_capacity(star.len());
    let mut acc = 0.0;
    for &v in &star {
        acc += v * step;
        cum.push(acc);
    }
    Rearrangement { star, cum, step }
}

impl Rearrangement {
    pub fn f_star(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.star.first().copied().unwrap_or(0.0);
        }
        let i = ((t / self.step).ceil() as usize).clamp(1, self.star.len());
        self.star[i - 1]
    }

    /// f**(t) = t^{-1} * integral of f* over (0, t], exact on each step.
    pub fn f_double_star(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return f64::INFINITY;
        }
        let t = t.min(1.0);
        let i = (t / self.step).ceil() as usize;
        let i = i.clamp(1, self.star.len());
        let below = if i >= 2 { self.cum[i - 2] } else { 0.0 };
        (below + self.star[i - 1] * (t - (i - 1) as f64 * self.step)) / t
    }

    pub fn l1(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }
}

const SPGF_MAGIC: &[u8; 4] = b"SPGF";
const SPGF_VERSION: u32 = 1;

/// Serialize in the SPGF binary format: magic `SPGF`, version u32 LE = 1,
/// n as u8, J as u8, flags u16 LE (bit 0 = nonneg), then 2^{nJ} f64 LE
/// cell values, row-major.
pub fn write_spgf<W: Write>(f: &GridFunction, w: &mut W) -> Result<()> {
    w.write_all(SPGF_MAGIC)?;
    w.write_all(&SPGF_VERSION.to_le_bytes())?;
    w.write_all(&[f.dim() as u8, f.depth() as u8])?;
    let flags: u16 = if f.is_nonneg() { 1 } else { 0 };
    w.write_all(&flags.to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_spgf<R: Read>(r: &mut R) -> Result<GridFunction> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)?;
    if &head[0..4] != SPGF_MAGIC {
        return Err(Error::input("bad SPGF magic"));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != SPGF_VERSION {
        return Err(Error::input(format!("unsupported SPGF version {version}")));
    }
    let n = head[8] as usize;
    let j = head[9] as usize;
    let flags = u16::from_le_bytes(head[10..12].try_into().unwrap());
    if n == 0 || n > MAX_DIM {
        return Err(Error::input(format!("SPGF dimension {n} outside 1..=3")));
    }
    if j > 15 {
        return Err(Error::input(format!("SPGF depth {j} too large")));
    }
    let count = 1usize << (n * j);
    let mut buf = vec![0u8; count * 8];
    r.read_exact(&mut buf)?;
    // reject trailing bytes: the cell count is pinned by (n, J)
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::input("SPGF payload longer than 2^(nJ) cells"));
    }
    let values: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridFunction::new(n, j, values, flags & 1 == 1)
}

pub fn write_spgf_file(f: &GridFunction, path: &std::path::Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_spgf(f, &mut file)
}

pub fn read_spgf_file(path: &std::path::Path) -> Result<GridFunction> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    read_spgf(&mut file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_function_table() {
        // f = 1 on n=2, J=2: every level-k cube integrates to 4^{-k}
        let f = GridFunction::constant(2, 2, 1.0);
        let t = build_table(&f);
        for k in 0..=2usize {
            for flat in 0..(1usize << (2 * k)) {
                let q = DyadicCube::from_flat(k, 2, flat);
                assert_relative_eq!(t.cube_integral(&q), 0.25f64.powi(k as i32));
            }
        }
    }

    #[test]
    fn unit_atom_table() {
        let f = GridFunction::unit_atom(2, 2, [0, 0, 0]);
        let t = build_table(&f);
        // integral 1 on every ancestor of cell(0,0), else 0
        for k in 0..=2usize {
            for flat in 0..(1usize << (2 * k)) {
                let q = DyadicCube::from_flat(k, 2, flat);
                let expect = if q.index[0] == 0 && q.index[1] == 0 { 1.0 } else { 0.0 };
                assert_relative_eq!(t.cube_integral(&q), expect);
            }
        }
    }

    #[test]
    fn averages_and_oscillation() {
        // 1 on the left half of [0,1), 0 on the right
        let f = GridFunction::new(1, 2, vec![1.0, 1.0, 0.0, 0.0], true).unwrap();
        let t = build_table(&f);
        let root = DyadicCube::root();
        assert_relative_eq!(t.cube_average(&root), 0.5);
        assert_relative_eq!(oscillation_integral(&f, &t, &root), 0.5);

        let c = GridFunction::constant(2, 2, 3.25);
        let tc = build_table(&c);
        for flat in 0..4 {
            let q = DyadicCube::from_flat(1, 2, flat);
            assert_relative_eq!(oscillation_integral(&c, &tc, &q), 0.0);
        }
    }

    #[test]
    fn rearrangement_single_atom() {
        let f = GridFunction::unit_atom(2, 2, [0, 0, 0]);
        let r = rearrangement(&f);
        assert_relative_eq!(r.f_star(1.0 / 16.0), 16.0);
        assert_relative_eq!(r.f_star(0.5), 0.0);
        assert_relative_eq!(r.f_double_star(1.0 / 16.0), 16.0);
        assert_relative_eq!(r.f_double_star(0.5), 2.0);
        assert_relative_eq!(r.f_double_star(1.0), 1.0);
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let f = GridFunction::constant(2, 3, 7.0);
        assert_eq!(f.discrete_gradient_l2().unwrap(), 0.0);
    }

    #[test]
    fn gradient_converges_to_analytic_value() {
        // f(x) = sin(2 pi x1): ||grad f||_{L2} = 2 pi / sqrt(2)
        let target = 2.0 * std::f64::consts::PI / 2.0_f64.sqrt();
        let mut errs = Vec::new();
        for j in [4usize, 6, 8] {
            let f = GridFunction::from_fn(2, j, |x| (2.0 * std::f64::consts::PI * x[0]).sin());
            errs.push((f.discrete_gradient_l2().unwrap() - target).abs());
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
        assert!(errs[2] < 0.02 * target);
    }

    #[test]
    fn atom_gradient_direct() {
        // single-cell atom at n=1, J=2: value 2^J = 4 in one of 4 cells.
        // two jumps of height 4 (one wrapping), scaled by 2^J = 4, cell
        // measure 1/4: sqrt(2 * 16^2 / 4)
        let f = GridFunction::unit_atom(1, 2, [0, 0, 0]);
        let g = f.discrete_gradient_l2().unwrap();
        assert_relative_eq!(g, (2.0f64 * 16.0 * 16.0 / 4.0).sqrt());
    }

    #[test]
    fn spgf_rejects_length_mismatch() {
        let f = GridFunction::constant(1, 2, 1.0);
        let mut buf = Vec::new();
        write_spgf(&f, &mut buf).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(read_spgf(&mut buf.as_slice()).is_err());
        let mut long = Vec::new();
        write_spgf(&f, &mut long).unwrap();
        long.extend_from_slice(&[0u8; 8]);
        assert!(read_spgf(&mut long.as_slice()).is_err());
    }

    proptest! {
        #[test]
        fn table_matches_direct_summation(values in proptest::collection::vec(-10.0f64..10.0, 8)) {
            // random f, n=1, J=3: table values equal per-cell summation
            let f = GridFunction::new(1, 3, values.clone(), false).unwrap();
            let t = build_table(&f);
            for k in 0..=3usize {
                let w = 1usize << (3 - k);
                for m in 0..(1usize << k) {
                    let direct: f64 = values[m*w..(m+1)*w].iter().map(|v| v.abs() / 8.0).sum();
                    let q = DyadicCube::from_flat(k, 1, m);
                    prop_assert!((t.cube_integral(&q) - direct).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn additivity_exact(values in proptest::collection::vec(-5.0f64..5.0, 16)) {
            let f = GridFunction::new(2, 2, values, false).unwrap();
            let t = build_table(&f);
            for k in 0..2usize {
                for flat in 0..(1usize << (2*k)) {
                    let q = DyadicCube::from_flat(k, 2, flat);
                    let kids: f64 = q.children(2).iter().map(|c| t.cube_integral(c)).sum();
                    // bitwise: the table is built by exactly this summation
                    prop_assert_eq!(t.cube_integral(&q), kids);
                }
            }
        }

        #[test]
        fn rearrangement_preserves_l1_and_multiset(values in proptest::collection::vec(-3.0f64..3.0, 16)) {
            let f = GridFunction::new(2, 2, values.clone(), false).unwrap();
            let r = rearrangement(&f);
            let l1: f64 = values.iter().map(|v| v.abs() / 16.0).sum();
            prop_assert!((r.l1() - l1).abs() < 1e-13);
            let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            prop_assert_eq!(sorted, r.star);
        }

        #[test]
        fn oscillation_vs_any_constant(values in proptest::collection::vec(-3.0f64..3.0, 8), c in -3.0f64..3.0) {
            // integral |f - f_Q| <= 2 * integral |f - c| for any constant c
            let f = GridFunction::new(1, 3, values.clone(), false).unwrap();
            let t = build_table(&f);
            let root = DyadicCube::root();
            let osc = oscillation_integral(&f, &t, &root);
            let vs_c: f64 = values.iter().map(|v| (v - c).abs() / 8.0).sum();
            prop_assert!(osc <= 2.0 * vs_c + 1e-12);
        }

        #[test]
        fn spgf_roundtrip(values in proptest::collection::vec(-8.0f64..8.0, 16)) {
            let f = GridFunction::new(2, 2, values, false).unwrap();
            let mut buf = Vec::new();
            write_spgf(&f, &mut buf).unwrap();
            let g = read_spgf(&mut buf.as_slice()).unwrap();
            prop_assert_eq!(f, g);
        }
    }
}
