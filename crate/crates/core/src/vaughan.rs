//! Vaughan's identity on a dyadic block (D, 2D] with both cut parameters
//! equal to ⌊D^{1/3}⌋.
//!
//! For n > U, with U = V = cut,
//!
//! Λ(n) = (μ_{≤V} ∗ log)(n) − (β ∗ 1)(n) + (Λ_{>U} ∗ (μ_{>V} ∗ 1))(n),
//! β = Λ_{≤U} ∗ μ_{≤V} supported on [1, cut²].
//!
//! Summing Λ(d)g(d) over D < d ≤ 2D gives
//!
//! * S₁ = Σ_{m≤cut} α₁(m) Σ_{D<mn≤2D} g(mn), α₁ = −β on [1, cut]
//! * S₂ = Σ_{m≤cut} α₂(m) Σ_{D<mn≤2D} g(mn)·log n, α₂ = μ
//! * S₃ = Σ_{m,n} α₃(m)α₄(n) g(mn), α₃ = −Λ, α₄(n) = Σ_{e|n, e≤cut} μ(e)
//! * S₄ = Σ_{m,n} α₅(m)α₆(n) g(mn), α₅ = −β on (cut, cut²], α₆ = 1
//!
//! with m, n > cut and D < mn ≤ 2D in S₃, S₄. Both type II variables then
//! range over (cut, ⌊2D/(cut+1)⌋], which is wider than (D^{1/3}, D^{2/3}]:
//! no choice of coefficients supported on the narrower range can reproduce
//! Λ exactly (d = 1111 at D = 1000 has no factorization there).

use crate::arith::{iroot, mobius_sieve, segment_sieve, sieve_mangoldt, CompensatedAccumulator, Neumaier};
use crate::error::{check_budget, Error, Result};
use crate::floor::frak_s;

/// Largest D accepted by the decomposition.
pub const VAUGHAN_BUDGET: u64 = 100_000_000;

/// Values of an arithmetic function on `first..first + values.len()`; zero
/// elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTable {
    first: u64,
    values: Vec<f64>,
}

impl CoeffTable {
    fn zeros(first: u64, last: u64) -> Self {
        let len = if last >= first { (last - first + 1) as usize } else { 0 };
        Self {
            first,
            values: vec![0.0; len],
        }
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    /// Last tabulated index (`first − 1` when empty).
    pub fn last(&self) -> u64 {
        self.first + self.values.len() as u64 - 1
    }

    #[inline]
    pub fn get(&self, n: u64) -> f64 {
        if n < self.first {
            return 0.0;
        }
        self.values.get((n - self.first) as usize).copied().unwrap_or(0.0)
    }

    fn slot(&mut self, n: u64) -> &mut f64 {
        &mut self.values[(n - self.first) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.first + i as u64, v))
    }

    /// Largest |value| over `(lo, hi]`.
    pub fn sup_abs(&self, lo: u64, hi: u64) -> f64 {
        self.iter()
            .filter(|&(n, _)| n > lo && n <= hi)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// The six coefficient functions for one block.
#[derive(Clone, Debug)]
pub struct VaughanCoefficients {
    pub d: u64,
    pub cut: u64,
    /// Upper end of the type II ranges, ⌊2D/(cut+1)⌋.
    pub type_two_end: u64,
    pub alpha: [CoeffTable; 6],
}

impl VaughanCoefficients {
    pub fn new(d: u64) -> Result<Self> {
        if d <= 100 {
            return Err(Error::Domain(format!("the decomposition needs D > 100, got {d}")));
        }
        check_budget("Vaughan block D", d as u128, VAUGHAN_BUDGET as u128)?;
        let cut = iroot(d, 3);
        let end = 2 * d / (cut + 1);
        let mu = mobius_sieve(cut);
        let lam = sieve_mangoldt(end)?;

        // β(b) = Σ_{de=b, d≤cut, e≤cut} Λ(d)μ(e)
        let mut beta = CoeffTable::zeros(1, cut * cut);
        for a in 2..=cut {
            let l = lam.at(a);
            if l == 0.0 {
                continue;
            }
            for e in 1..=cut {
                if mu[e as usize] != 0 {
                    *beta.slot(a * e) += l * f64::from(mu[e as usize]);
                }
            }
        }

        let mut a1 = CoeffTable::zeros(1, cut);
        let mut a2 = CoeffTable::zeros(1, cut);
        for m in 1..=cut {
            *a1.slot(m) = -beta.get(m);
            *a2.slot(m) = f64::from(mu[m as usize]);
        }

        let mut a3 = CoeffTable::zeros(cut + 1, end);
        let mut a4 = CoeffTable::zeros(cut + 1, end);
        let mut a5 = CoeffTable::zeros(cut + 1, end);
        let mut a6 = CoeffTable::zeros(cut + 1, end);
        for n in cut + 1..=end {
            *a3.slot(n) = -lam.at(n);
            *a5.slot(n) = -beta.get(n);
            *a6.slot(n) = 1.0;
        }
        for e in 1..=cut {
            let m = mu[e as usize];
            if m == 0 {
                continue;
            }
            let mut k = (cut / e + 1) * e;
            while k <= end {
                *a4.slot(k) += f64::from(m);
                k += e;
            }
        }
        Ok(Self {
            d,
            cut,
            type_two_end: end,
            alpha: [a1, a2, a3, a4, a5, a6],
        })
    }

    /// α_k for k in 1..=6.
    pub fn alpha(&self, k: usize) -> &CoeffTable {
        &self.alpha[k - 1]
    }

    /// The four sums for a given g on (D, 2D].
    pub fn sums<G>(&self, g: G) -> [f64; 4]
    where
        G: Fn(u64) -> f64 + Sync,
    {
        let d = self.d;
        let gv: Vec<f64> = (d + 1..=2 * d).map(&g).collect();
        let at = |k: u64| gv[(k - d - 1) as usize];
        let acc = CompensatedAccumulator::new(64);
        let type_one = |alpha: &CoeffTable, with_log: bool| {
            acc.sum(1..self.cut + 1, |m| {
                let a = alpha.get(m);
                if a == 0.0 {
                    return 0.0;
                }
                let mut inner = Neumaier::new();
                for n in d / m + 1..=2 * d / m {
                    let w = if with_log { (n as f64).ln() } else { 1.0 };
                    inner.add(w * at(m * n));
                }
                a * inner.value()
            })
        };
        let type_two = |am: &CoeffTable, an: &CoeffTable| {
            let lo = self.cut + 1;
            acc.sum(lo..self.type_two_end + 1, |m| {
                let a = am.get(m);
                if a == 0.0 {
                    return 0.0;
                }
                let n_lo = (d / m + 1).max(lo);
                let n_hi = (2 * d / m).min(self.type_two_end);
                let mut inner = Neumaier::new();
                for n in n_lo..=n_hi {
                    inner.add(an.get(n) * at(m * n));
                }
                a * inner.value()
            })
        };
        [
            type_one(self.alpha(1), false),
            type_one(self.alpha(2), true),
            type_two(self.alpha(3), self.alpha(4)),
            type_two(self.alpha(5), self.alpha(6)),
        ]
    }
}

/// Coefficients together with the four sums for one g.
#[derive(Clone, Debug)]
pub struct VaughanSplit {
    pub coeffs: VaughanCoefficients,
    pub s: [f64; 4],
}

impl VaughanSplit {
    pub fn total(&self) -> f64 {
        let mut acc = Neumaier::new();
        acc.extend(self.s);
        acc.value()
    }
}

pub fn vaughan_split<G>(d: u64, g: G) -> Result<VaughanSplit>
where
    G: Fn(u64) -> f64 + Sync,
{
    let coeffs = VaughanCoefficients::new(d)?;
    let s = coeffs.sums(g);
    Ok(VaughanSplit { coeffs, s })
}

/// Σ_{D<d≤2D} Λ(d)g(d) straight from the sieve.
pub fn direct_sum<G>(d: u64, g: G) -> Result<f64>
where
    G: Fn(u64) -> f64 + Sync,
{
    let table = segment_sieve(d, 2 * d)?;
    let acc = CompensatedAccumulator::default();
    Ok(acc.sum(d + 1..2 * d + 1, |k| {
        let l = table.at(k);
        if l == 0.0 {
            0.0
        } else {
            l * g(k)
        }
    }))
}

/// 𝔖_δ(x, D) split into its four Vaughan pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct FrakSParts {
    pub parts: [f64; 4],
    pub total: f64,
}

/// Vaughan decomposition of Σ_{D<d≤2D} Λ(d)ψ(x/(d+δ)).
pub fn frak_s_decomposed(x: f64, d: u64, delta: f64) -> Result<FrakSParts> {
    if !(x >= 3.0) || !(delta >= 0.0) {
        return Err(Error::Domain(format!("need x >= 3 and delta >= 0 (x={x}, delta={delta})")));
    }
    let split = vaughan_split(d, |k| crate::arith::psi_frac(x / (k as f64 + delta)))?;
    Ok(FrakSParts {
        parts: split.s,
        total: split.total(),
    })
}

/// 𝔖_δ(x, D) as (Vaughan total, direct sieve sum).
pub fn frak_s_pair(x: f64, d: u64, delta: f64) -> Result<(f64, f64)> {
    Ok((frak_s_decomposed(x, d, delta)?.total, frak_s(x, d, delta)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisor_count, psi_frac};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * (1.0 + b.abs())
    }

    #[test]
    fn small_d_rejected() {
        assert!(matches!(VaughanCoefficients::new(100), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_g_gives_zero() {
        let s = vaughan_split(500, |_| 0.0).unwrap();
        assert_eq!(s.s, [0.0; 4]);
    }

    #[test]
    fn unit_g_matches_chebyshev_difference() {
        for d in [101u64, 343, 1000, 4096] {
            let split = vaughan_split(d, |_| 1.0).unwrap();
            let direct = direct_sum(d, |_| 1.0).unwrap();
            assert!(close(split.total(), direct), "D={d}: {} vs {direct}", split.total());
        }
    }

    #[test]
    fn identity_for_random_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [101u64, 1000] {
            for _ in 0..5 {
                let vals: Vec<f64> = (0..=2 * d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let g = |k: u64| vals[k as usize];
                let split = vaughan_split(d, g).unwrap();
                let direct = direct_sum(d, g).unwrap();
                assert!(close(split.total(), direct));
            }
        }
    }

    #[test]
    fn single_point_g_recovers_lambda() {
        // g = indicator of one d isolates Λ(d)
        let d = 1000;
        for target in [1009u64, 1024, 1111, 1331, 1999, 2000] {
            let split = vaughan_split(d, |k| if k == target { 1.0 } else { 0.0 }).unwrap();
            let expected = crate::arith::mangoldt_point(target);
            assert!((split.total() - expected).abs() < 1e-12, "{target}");
        }
    }

    #[test]
    fn coefficient_growth() {
        for d in [101u64, 1000, 10_000] {
            let c = VaughanCoefficients::new(d).unwrap();
            for k in 1..=6 {
                for (n, v) in c.alpha(k).iter() {
                    if n > 1 {
                        let cap = divisor_count(n) as f64 * (2.0 * n as f64).ln();
                        assert!(v.abs() <= cap + 1e-12, "alpha_{k}({n}) = {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn type_two_support() {
        let c = VaughanCoefficients::new(1000).unwrap();
        assert_eq!(c.cut, 10);
        assert_eq!(c.type_two_end, 181);
        for k in 3..=6 {
            let t = c.alpha(k);
            assert_eq!(t.first(), 11);
            assert_eq!(t.get(10), 0.0);
            assert_eq!(t.get(182), 0.0);
        }
        assert_eq!(c.alpha(1).get(11), 0.0);
        assert_eq!(c.alpha(2).get(11), 0.0);
    }

    #[test]
    fn psi_g_and_frak_s() {
        let x = 1e5;
        let (dec, direct) = frak_s_pair(x, 1000, 0.0).unwrap();
        assert!(close(dec, direct));
        let (dec, direct) = frak_s_pair(3.0, 101, 0.0).unwrap();
        assert!(close(dec, direct));
        let split = vaughan_split(1000, |k| psi_frac(1e6 / (k as f64 + 1.0))).unwrap();
        let direct = direct_sum(1000, |k| psi_frac(1e6 / (k as f64 + 1.0))).unwrap();
        assert!(close(split.total(), direct));
    }
}
