//! The floor sum S_Λ(x) = Σ_{n≤x} Λ(⌊x/n⌋), its main constant
//! C = Σ_{d≥1} Λ(d)/(d(d+1)), the dyadic ψ-sums 𝔖_δ(x, D) and R_δ(x), and the
//! error curve E(x) = S_Λ(x) − Cx.

use crate::arith::{
    for_each_segment, isqrt, mangoldt_point, psi_frac, segment_sieve, sieve_mangoldt, CompensatedAccumulator,
    Neumaier,
};
use crate::error::{check_budget, Error, Result};

pub const DIRECT_BUDGET: u64 = 10_000_000;
pub const BLOCKED_BUDGET: u64 = 1_000_000_000_000;
/// Cutoff for the reference main constant.
pub const C_BEST_CUTOFF: u64 = 100_000_000;
const CONSTANT_SEGMENT: u64 = 1 << 22;

/// Σ_{n≤x} Λ(⌊x/n⌋) term by term.
pub fn s_lambda_direct(x: u64) -> Result<f64> {
    if x > DIRECT_BUDGET {
        return Err(Error::Capacity {
            what: "direct floor sum (use the blocked method)",
            requested: x as u128,
            budget: DIRECT_BUDGET as u128,
        });
    }
    if x == 0 {
        return Ok(0.0);
    }
    let table = sieve_mangoldt(x)?;
    let acc = CompensatedAccumulator::default();
    Ok(acc.sum(1..x + 1, |n| table.at(x / n)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockedSum {
    pub value: f64,
    /// Number of distinct blocks visited.
    pub blocks: u64,
}

/// Σ_{n≤x} Λ(⌊x/n⌋) over the O(√x) distinct values of ⌊x/n⌋.
///
/// With n₀ = ⌊√x⌋, the terms n ≤ n₀ are evaluated pointwise; every n > n₀
/// has d = ⌊x/n⌋ ≤ x/(n₀+1), and such a d is hit by the n in
/// (max(x/(d+1), n₀), x/d], i.e. ⌊x/d⌋ − max(⌊x/(d+1)⌋, n₀) times.
pub fn s_lambda_blocked(x: u64) -> Result<BlockedSum> {
    check_budget("blocked floor sum x", x as u128, BLOCKED_BUDGET as u128)?;
    if x == 0 {
        return Ok(BlockedSum { value: 0.0, blocks: 0 });
    }
    let n0 = isqrt(x);
    let d_max = x / (n0 + 1);
    let acc = CompensatedAccumulator::new(256);
    let small_n = acc.sum(1..n0 + 1, |n| mangoldt_point(x / n));
    let table = sieve_mangoldt(d_max.max(1))?;
    let large_n = acc.sum(1..d_max + 1, |d| {
        let l = table.at(d);
        if l == 0.0 {
            return 0.0;
        }
        let count = (x / d).saturating_sub((x / (d + 1)).max(n0));
        l * count as f64
    });
    Ok(BlockedSum {
        value: small_n + large_n,
        blocks: n0 + d_max,
    })
}

/// Partial sum of the main constant with a certified tail bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MainConstant {
    pub cutoff: u64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Σ_{d>T} Λ(d)/(d(d+1)) ≤ (ln T + 1)/T.
///
/// Λ(d) ≤ ln d and 1/(d(d+1)) < 1/d², and ln t/t² is decreasing for t ≥ 2,
/// so the sum is at most ∫_T^∞ ln t/t² dt = (ln T + 1)/T.
pub fn tail_bound(t: u64) -> f64 {
    let t = t as f64;
    (t.ln() + 1.0) / t
}

/// Σ_{d≤T} Λ(d)/(d(d+1)), sieved in fixed segments.
pub fn main_constant(t: u64) -> Result<MainConstant> {
    if t < 2 {
        return Err(Error::Domain(format!("main constant cutoff must be >= 2, got {t}")));
    }
    check_budget("main constant cutoff", t as u128, 4 * C_BEST_CUTOFF as u128)?;
    let acc = CompensatedAccumulator::default();
    let mut total = Neumaier::new();
    for_each_segment(t, CONSTANT_SEGMENT, |seg| {
        let lo = seg.lo();
        let vals = seg.values();
        total.add(acc.sum(0..vals.len() as u64, |i| {
            let l = vals[i as usize];
            if l == 0.0 {
                return 0.0;
            }
            let d = (lo + 1 + i) as f64;
            l / (d * (d + 1.0))
        }));
    });
    Ok(MainConstant {
        cutoff: t,
        value: total.value(),
        tail_bound: tail_bound(t),
    })
}

/// Σ_{lo<d≤hi} Λ(d)ψ(x/(d+δ)).
fn lambda_psi(x: f64, lo: u64, hi: u64, delta: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let table = segment_sieve(lo, hi)?;
    let acc = CompensatedAccumulator::default();
    Ok(acc.sum(lo + 1..hi + 1, |d| {
        let l = table.at(d);
        if l == 0.0 {
            0.0
        } else {
            l * psi_frac(x / (d as f64 + delta))
        }
    }))
}

fn check_x_delta(x: f64, delta: f64) -> Result<()> {
    if !x.is_finite() || !(delta >= 0.0) {
        return Err(Error::Domain(format!("need finite x and delta >= 0 (x={x}, delta={delta})")));
    }
    Ok(())
}

/// 𝔖_δ(x, D) = Σ_{D<d≤2D} Λ(d)ψ(x/(d+δ)).
pub fn frak_s(x: f64, d: u64, delta: f64) -> Result<f64> {
    check_x_delta(x, delta)?;
    if d == 0 {
        return Err(Error::Domain("D must be positive".into()));
    }
    lambda_psi(x, d, 2 * d, delta)
}

/// (1/2)·Σ_{D<d≤2D} Λ(d), the trivial bound for |𝔖_δ(x, D)|.
pub fn frak_s_trivial_bound(d: u64) -> Result<f64> {
    let table = segment_sieve(d, 2 * d)?;
    let mut acc = Neumaier::new();
    acc.extend(table.values().iter().copied());
    Ok(0.5 * acc.value())
}

/// The integer range (⌊E⌋, ⌊x/E⌋] of R_δ.
pub fn r_delta_range(x: f64, e: f64) -> (u64, u64) {
    let lo = e.floor() as u64;
    let hi = (x / e).floor() as u64;
    (lo, hi.max(lo))
}

/// R_δ(x) = Σ_{E<d≤x/E} Λ(d)ψ(x/(d+δ)).
pub fn r_delta(x: f64, e: f64, delta: f64) -> Result<f64> {
    check_x_delta(x, delta)?;
    if !(e >= 1.0) {
        return Err(Error::Domain(format!("E must be >= 1, got {e}")));
    }
    let (lo, hi) = r_delta_range(x, e);
    check_budget("R_delta range x/E", hi as u128, BLOCKED_BUDGET as u128)?;
    lambda_psi(x, lo, hi, delta)
}

/// One dyadic piece of R_δ over (lo, hi].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DyadicPiece {
    pub j: u32,
    pub lo: u64,
    pub hi: u64,
    pub value: f64,
}

/// Split R_δ into pieces (⌊x/(2^{j+1}E)⌋, ⌊x/(2^j E)⌋], the last one clipped
/// at ⌊E⌋, so the pieces tile the range of R_δ exactly.
pub fn r_delta_dyadic(x: f64, e: f64, delta: f64) -> Result<Vec<DyadicPiece>> {
    check_x_delta(x, delta)?;
    if !(e >= 1.0) {
        return Err(Error::Domain(format!("E must be >= 1, got {e}")));
    }
    let (floor_e, top) = r_delta_range(x, e);
    let mut pieces = Vec::new();
    let mut hi = top;
    let mut j = 0u32;
    while hi > floor_e {
        let next = ((x / (2f64.powi(j as i32 + 1) * e)).floor() as u64).max(floor_e);
        pieces.push(DyadicPiece {
            j,
            lo: next,
            hi,
            value: lambda_psi(x, next, hi, delta)?,
        });
        hi = next;
        j += 1;
    }
    Ok(pieces)
}

/// One point of the error curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: u64,
    pub s: f64,
    pub e: f64,
    /// x·tail_bound: how far E can move because C is truncated.
    pub band: f64,
    /// False when |E| ≤ band, so the point is left out of the fit.
    pub used: bool,
    pub method: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    pub constant: MainConstant,
    pub points: Vec<CurvePoint>,
    pub fit: SlopeFit,
}

/// Least-squares line through (ln x, ln |y|).
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && y.abs() > 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} usable points, need at least 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
    })
}

/// Geometric grid of `count` integers from `lo` to `hi`.
pub fn geometric_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count < 2 {
        return vec![lo];
    }
    let ratio = (hi as f64 / lo as f64).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                (lo as f64 * (ratio * i as f64).exp()).round() as u64
            }
        })
        .collect()
}

/// E(x) = S_Λ(x) − x·C on a grid, with the slope of ln|E| against ln x.
pub fn error_curve(grid: &[u64], constant: &MainConstant) -> Result<ErrorCurve> {
    let mut points = Vec::with_capacity(grid.len());
    for &x in grid {
        let (s, method) = if x <= 1_000 {
            (s_lambda_direct(x)?, "direct")
        } else {
            (s_lambda_blocked(x)?.value, "blocked")
        };
        let xf = x as f64;
        let e = s - xf * constant.value;
        let band = xf * constant.tail_bound;
        points.push(CurvePoint {
            x,
            s,
            e,
            band,
            used: e.abs() > band,
            method,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().filter(|p| p.used).map(|p| (p.x as f64, p.e)).unzip();
    let fit = fit_loglog(&xs, &ys)?;
    Ok(ErrorCurve {
        constant: *constant,
        points,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn direct_examples() {
        assert_eq!(s_lambda_direct(1).unwrap(), 0.0);
        assert_abs_diff_eq!(s_lambda_direct(4).unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(s_lambda_direct(10).unwrap(), 60f64.ln(), epsilon = 1e-12);
        assert!(matches!(s_lambda_direct(DIRECT_BUDGET + 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn blocked_examples() {
        assert_eq!(s_lambda_blocked(1).unwrap().value, 0.0);
        assert_abs_diff_eq!(s_lambda_blocked(10).unwrap().value, 60f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn blocked_matches_direct() {
        for x in [2u64, 3, 15, 16, 17, 99, 100, 101, 1000, 10_000, 100_000] {
            let b = s_lambda_blocked(x).unwrap();
            let d = s_lambda_direct(x).unwrap();
            assert!(rel(b.value, d) <= 1e-10, "x={x}: {} vs {d}", b.value);
            assert!(b.blocks <= 2 * (x as f64).sqrt().ceil() as u64 + 2);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let x = rng.random_range(2..200_000u64);
            assert!(rel(s_lambda_blocked(x).unwrap().value, s_lambda_direct(x).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn constant_examples() {
        let l2 = 2f64.ln();
        assert_abs_diff_eq!(main_constant(2).unwrap().value, l2 / 6.0, epsilon = 1e-16);
        let c4 = l2 / 6.0 + 3f64.ln() / 12.0 + l2 / 20.0;
        assert_abs_diff_eq!(main_constant(4).unwrap().value, c4, epsilon = 1e-16);
        assert!(main_constant(1).is_err());
    }

    #[test]
    fn constant_cauchy_and_monotone() {
        let mut last = 0.0;
        for t in [10u64, 100, 1000, 10_000, 100_000] {
            let c = main_constant(t).unwrap();
            let c2 = main_constant(2 * t).unwrap();
            assert!(c.value >= last);
            assert!(c2.value - c.value <= c.tail_bound);
            last = c.value;
        }
    }

    #[test]
    fn constant_segments_agree_with_flat_sum() {
        // crosses several segment boundaries
        let t = 3 * CONSTANT_SEGMENT + 17;
        let table = sieve_mangoldt(t).unwrap();
        let mut acc = Neumaier::new();
        for (d, l) in table.iter() {
            let d = d as f64;
            acc.add(l / (d * (d + 1.0)));
        }
        assert!(rel(main_constant(t).unwrap().value, acc.value()) < 1e-14);
    }

    #[test]
    fn frak_s_example() {
        let expected = 7f64.ln() * (2.0 / 7.0 - 0.5) + 3f64.ln() * (1.0 / 9.0 - 0.5);
        assert_abs_diff_eq!(frak_s(100.0, 5, 0.0).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn frak_s_trivially_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let d = rng.random_range(1..5000u64);
            let x = rng.random_range(3.0..1e7);
            let delta = rng.random_range(0.0..2.0);
            assert!(frak_s(x, d, delta).unwrap().abs() <= frak_s_trivial_bound(d).unwrap() + 1e-12);
        }
    }

    #[test]
    fn r_delta_pieces_tile() {
        assert_eq!(r_delta(100.0, 60.0, 0.0).unwrap(), 0.0);
        let x: f64 = 1e5;
        let e = x.powf(8.0 / 17.0);
        for delta in [0.0, 1.0] {
            let whole = r_delta(x, e, delta).unwrap();
            let pieces = r_delta_dyadic(x, e, delta).unwrap();
            let (lo, hi) = r_delta_range(x, e);
            assert_eq!(pieces.first().unwrap().hi, hi);
            assert_eq!(pieces.last().unwrap().lo, lo);
            assert!(pieces.windows(2).all(|w| w[0].lo == w[1].hi));
            let sum: f64 = pieces.iter().map(|p| p.value).sum();
            assert!((sum - whole).abs() < 1e-9 * (1.0 + whole.abs()));
        }
    }

    #[test]
    fn synthetic_fits() {
        let xs: Vec<f64> = (0..8).map(|i| 10f64.powi(i + 2)).collect();
        let half: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        assert_abs_diff_eq!(fit_loglog(&xs, &half).unwrap().slope, 0.5, epsilon = 1e-9);
        let flat = vec![3.0; xs.len()];
        assert_abs_diff_eq!(fit_loglog(&xs, &flat).unwrap().slope, 0.0, epsilon = 1e-9);
        assert!(matches!(fit_loglog(&xs[..2], &half[..2]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn grid_shape() {
        let g = geometric_grid(10_000, 1_000_000_000, 11);
        assert_eq!(g.len(), 11);
        assert_eq!((g[0], g[10]), (10_000, 1_000_000_000));
        assert_eq!(g[2], 100_000);
    }
}
