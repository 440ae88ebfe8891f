//! Classical norms the sparse theory is measured against: Lebesgue, Morrey,
//! RMT via exact antichain dynamic programming, the congruent (full-level)
//! variant, and Lorentz / Lorentz-Zygmund norms from the rearrangement.

use crate::error::{Error, Result};
use crate::grid::{rearrangement, DyadicCube, GridFunction, IntegralTable};
use crate::numeric::{max_or_zero, pairwise_sum};
use crate::sparse::SRParams;

/// How a norm value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormRoute {
    Exact,
    Dp,
    Rearrangement,
}

/// A computed classical norm with an optional witness that re-evaluates to
/// the reported value.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NormReport {
    pub space: String,
    pub p: f64,
    pub q: Option<f64>,
    pub alpha: f64,
    pub value: f64,
    pub route: NormRoute,
    /// witness cubes as (level, index) tuples
    pub witness: Vec<(usize, Vec<u32>)>,
}

fn witness_of(cubes: &[DyadicCube], n: usize) -> Vec<(usize, Vec<u32>)> {
    cubes.iter().map(|c| (c.level, c.index[..n].to_vec())).collect()
}

/// Exact L^p norm.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    f.lp_norm(p)
}

/// Morrey norm: max over all dyadic cubes of the weighted average, with the
/// attaining cube as witness. Equals the RMT norm at q = infinity.
pub fn morrey_norm(f: &GridFunction, table: &IntegralTable, p: f64, alpha: f64) -> Result<NormReport> {
    if !(p >= 1.0) {
        return Err(Error::parameter(format!("p = {p} must be >= 1")));
    }
    let n = f.dim();
    let params = SRParams::new(p, 1.0, alpha)?;
    let mut best = f64::NEG_INFINITY;
    let mut arg = DyadicCube::root();
    for k in 0..=f.depth() {
        let w = params.sr_weight(k, n);
        for (flat, &s) in table.level_abs(k).iter().enumerate() {
            let v = w * s;
            if v > best {
                best = v;
                arg = DyadicCube::from_flat(k, n, flat);
            }
        }
    }
    Ok(NormReport {
        space: "morrey".into(),
        p,
        q: None,
        alpha,
        value: best,
        route: NormRoute::Exact,
        witness: witness_of(&[arg], n),
    })
}

/// RMT norm: exact supremum over packings (antichains of dyadic cubes) by
/// the tree recursion best(Q) = max(c(Q)^q, sum over children best), with
/// the attaining antichain reconstructed as witness.
pub fn rmt_norm(f: &GridFunction, table: &IntegralTable, p: f64, q: f64, alpha: f64) -> Result<NormReport> {
    if q.is_infinite() {
        let mut r = morrey_norm(f, table, p, alpha)?;
        r.space = "rmt".into();
        r.q = Some(f64::INFINITY);
        return Ok(r);
    }
    let params = SRParams::new(p, q, alpha)?;
    let n = f.dim();
    let j = f.depth();
    // best[k][flat], filled finest level first
    let mut best: Vec<Vec<f64>> = (0..=j)
        .map(|k| {
            let w = params.sr_weight(k, n);
            table.level_abs(k).iter().map(|&s| (w * s).powf(q)).collect()
        })
        .collect();
    for k in (0..j).rev() {
        for flat in 0..best[k].len() {
            let cube = DyadicCube::from_flat(k, n, flat);
            let kids: Vec<f64> =
                cube.children(n).iter().map(|c| best[k + 1][c.flat_index(n)]).collect();
            let split = pairwise_sum(&kids);
            if split > best[k][flat] {
                best[k][flat] = split;
            }
        }
    }
    // reconstruct the attaining antichain
    let mut witness = Vec::new();
    let mut stack = vec![DyadicCube::root()];
    while let Some(cube) = stack.pop() {
        let own = (params.sr_weight(cube.level, n) * table.cube_integral(&cube)).powf(q);
        let stored = best[cube.level][cube.flat_index(n)];
        if cube.level == j || own >= stored {
            if own > 0.0 {
                witness.push(cube);
            }
        } else {
            stack.extend(cube.children(n));
        }
    }
    witness.sort();
    Ok(NormReport {
        space: "rmt".into(),
        p,
        q: Some(q),
        alpha,
        value: best[0][0].powf(1.0 / q),
        route: NormRoute::Dp,
        witness: witness_of(&witness, n),
    })
}

/// Congruent RMT norm: max over levels of the full-level l^q sum.
pub fn crmt_norm(f: &GridFunction, table: &IntegralTable, p: f64, q: f64, alpha: f64) -> Result<NormReport> {
    if q.is_infinite() {
        let mut r = morrey_norm(f, table, p, alpha)?;
        r.space = "crmt".into();
        r.q = Some(f64::INFINITY);
        return Ok(r);
    }
    let params = SRParams::new(p, q, alpha)?;
    let n = f.dim();
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0usize;
    for k in 0..=f.depth() {
        let w = params.sr_weight(k, n);
        let terms: Vec<f64> = table.level_abs(k).iter().map(|&s| (w * s).powf(q)).collect();
        let v = pairwise_sum(&terms).powf(1.0 / q);
        if v > best {
            best = v;
            arg = k;
        }
    }
    let witness: Vec<DyadicCube> =
        (0..(1usize << (n * arg))).map(|flat| DyadicCube::from_flat(arg, n, flat)).collect();
    Ok(NormReport {
        space: "crmt".into(),
        p,
        q: Some(q),
        alpha,
        value: best,
        route: NormRoute::Exact,
        witness: witness_of(&witness, n),
    })
}

/// Full-level l^q sum at one level (the congruent building block).
pub fn level_sum(table: &IntegralTable, params: &SRParams, n: usize, k: usize) -> f64 {
    let w = params.sr_weight(k, n);
    let terms: Vec<f64> = table.level_abs(k).iter().map(|&s| (w * s).powf(params.q)).collect();
    pairwise_sum(&terms)
}

/// Lorentz L^{(1,2)} and Lorentz-Zygmund L^{(1,inf)}(log L)^{1/2} norms,
/// evaluated in closed form on the step function f**.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LorentzReport {
    /// [ int_0^1 (t f**(t))^2 dt/t ]^{1/2}
    pub l12: f64,
    /// sup_{0<t<1} t (1 - ln t)^{1/2} f**(t)
    pub l1inf_log_half: f64,
}

pub fn lorentz_norms(f: &GridFunction) -> LorentzReport {
    let r = rearrangement(f);
    let m = r.star.len();
    let step = r.step;
    // On ((i-1)/M, i/M]: t f**(t) = a_i + v_i t with v_i = star[i-1],
    // a_i = cum[i-2] - v_i (i-1) step.
    let mut l12_terms = Vec::with_capacity(m);
    let mut sup = 0.0f64;
    for i in 1..=m {
        let v = r.star[i - 1];
        let below = if i >= 2 { r.cum[i - 2] } else { 0.0 };
        let t0 = (i - 1) as f64 * step;
        let t1 = i as f64 * step;
        let a = below - v * t0;
        // integral of (a + v t)^2 / t dt = a^2 ln t + 2 a v t + v^2 t^2 / 2
        let anti = |t: f64| {
            let mut s = 2.0 * a * v * t + 0.5 * v * v * t * t;
            if a != 0.0 {
                s += a * a * t.ln();
            }
            s
        };
        if a == 0.0 && t0 == 0.0 {
            l12_terms.push(anti(t1));
        } else {
            l12_terms.push(anti(t1) - anti(t0));
        }
        // sup over the piece of (a + v t)(1 - ln t)^{1/2}
        sup = sup.max(piece_sup(a, v, t0.max(1e-300), t1));
    }
    LorentzReport { l12: pairwise_sum(&l12_terms).max(0.0).sqrt(), l1inf_log_half: sup }
}

/// sup over [t0, t1] of g(t) = (a + v t)(1 - ln t)^{1/2}, with the interior
/// critical point of the closed-form derivative located by bisection.
/// Critical equation: v t (1 - 2 ln t) = a.
fn piece_sup(a: f64, v: f64, t0: f64, t1: f64) -> f64 {
    let g = |t: f64| (a + v * t) * (1.0 - t.ln()).sqrt();
    let mut best = g(t0).max(g(t1));
    if v > 0.0 {
        let phi = |t: f64| v * t * (1.0 - 2.0 * t.ln()) - a;
        let (mut lo, mut hi) = (t0, t1);
        if phi(lo) * phi(hi) < 0.0 {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if phi(lo) * phi(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            best = best.max(g(0.5 * (lo + hi)));
        }
    }
    best
}

/// Max single-cube evaluation at exactly the Morrey weight; used in tests
/// against the exhaustive scan.
pub fn best_single_cube(table: &IntegralTable, params: &SRParams, n: usize, j: usize) -> f64 {
    let mut vals = Vec::with_capacity(j + 1);
    for k in 0..=j {
        let w = params.sr_weight(k, n);
        vals.push(w * max_or_zero(table.level_abs(k)));
    }
    max_or_zero(&vals)
}
