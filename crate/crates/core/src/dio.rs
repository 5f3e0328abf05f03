//! Brute-force Diophantine correlation counts 𝔅₀–𝔅₃ and their upper bounds.
//!
//! Every comparison |v| ≤ 1/X is done in double precision; tuples with
//! ||v| − 1/X| ≤ 1e−12 are also reported as boundary cases so threshold
//! coincidences stay visible.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};

pub const DIO_BUDGET: u64 = 4_000_000_000;
pub const DEFAULT_DIO_EPSILON: f64 = 0.1;
const GUARD: f64 = 1e-12;
/// Largest count/(c·bound) accepted at larger sizes of a ladder.
pub const LADDER_SLACK: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DioKind {
    B0,
    B1,
    B2,
    B3,
}

impl DioKind {
    pub const ALL: [DioKind; 4] = [Self::B0, Self::B1, Self::B2, Self::B3];
}

impl fmt::Display for DioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for DioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "B0" => Ok(Self::B0),
            "B1" => Ok(Self::B1),
            "B2" => Ok(Self::B2),
            "B3" => Ok(Self::B3),
            _ => Err(Error::Parse(format!("unknown count kind `{s}`"))),
        }
    }
}

/// How the sup over m₁, m₂ ∼ M is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupMode {
    /// Only m ∈ {M+1, 2M}; exact because μ(m) = δm^{−β} is monotone.
    Endpoints,
    /// Every pair (m₁, m₂).
    FullScan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationKind {
    Mu,
    Nu,
}

/// μ(m) (or ν(m)) = δ·m^{−β} on m ∼ M, with 0 < μ(m) < U = δM^{−β} ≤ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub beta: f64,
    pub delta: f64,
    pub m: u64,
    pub kind: PerturbationKind,
}

impl PerturbationSpec {
    pub fn new(beta: f64, delta: f64, m: u64, kind: PerturbationKind) -> Result<Self> {
        if !(beta > 0.0) || !(delta >= 0.0) || m == 0 {
            return Err(Error::Domain(format!("need beta > 0, delta >= 0, M >= 1 (beta={beta}, delta={delta}, M={m})")));
        }
        let spec = Self { beta, delta, m, kind };
        if delta > 0.0 && !(spec.upper() <= 1.0) {
            return Err(Error::Domain(format!("U = delta M^-beta = {} exceeds 1", spec.upper())));
        }
        Ok(spec)
    }

    pub fn value(&self, m: u64) -> f64 {
        self.delta * (m as f64).powf(-self.beta)
    }

    /// U (or V) = δM^{−β}.
    pub fn upper(&self) -> f64 {
        self.delta * (self.m as f64).powf(-self.beta)
    }

    fn m_range(&self, mode: SupMode) -> Vec<u64> {
        match mode {
            SupMode::Endpoints => {
                if self.m + 1 == 2 * self.m {
                    vec![2 * self.m]
                } else {
                    vec![self.m + 1, 2 * self.m]
                }
            }
            SupMode::FullScan => (self.m + 1..=2 * self.m).collect(),
        }
    }
}

/// φ_{n_s,n_t}(m) = N^γ/(n_s^γ + μ(m)) − N^γ/(n_t^γ + μ(m)).
pub fn phi_pair(ns: u64, nt: u64, m: u64, spec: &PerturbationSpec, n: u64, gamma: f64) -> f64 {
    let mu = spec.value(m);
    let ng = (n as f64).powf(gamma);
    ng / ((ns as f64).powf(gamma) + mu) - ng / ((nt as f64).powf(gamma) + mu)
}

/// ψ_n(m) = N^γ/(n^γ + ν(m)).
pub fn psi_single(k: u64, m: u64, spec: &PerturbationSpec, n: u64, gamma: f64) -> f64 {
    (n as f64).powf(gamma) / ((k as f64).powf(gamma) + spec.value(m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DioCount {
    pub count: u64,
    /// Tuples whose statistic lies within 1e−12 of 1/X.
    pub boundary: u64,
    /// False when the count is taken outside the regime of its bound
    /// (B2: X ≤ U^{−1}N^γ, B3: X ≤ V^{−1}N^γ).
    pub in_regime: bool,
}

fn classify(v: f64, thr: f64) -> (u64, u64) {
    (u64::from(v <= thr), u64::from((v - thr).abs() <= GUARD))
}

/// Counts |v_i − v_j| ≤ thr over ordered pairs of a value list.
fn pair_count(vals: &[f64], thr: f64) -> (u64, u64) {
    vals.par_iter()
        .map(|&a| {
            vals.iter().fold((0, 0), |(c, b), &v| {
                let (dc, db) = classify((a - v).abs(), thr);
                (c + dc, b + db)
            })
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1))
}

fn check_x(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("X must be positive, got {x}")));
    }
    Ok(1.0 / x)
}

/// 𝔅₁: quadruples (h₁,h₂,m₁,m₂) with |h₁^α m₁^β − h₂^α m₂^β|/(H^α M^β) ≤ 1/X.
pub fn count_b1(h: u64, m: u64, alpha: f64, beta: f64, x: f64) -> Result<DioCount> {
    let thr = check_x(x)?;
    if h == 0 || m == 0 || alpha == 0.0 || beta == 0.0 {
        return Err(Error::Domain("B1 needs H, M >= 1 and nonzero alpha, beta".into()));
    }
    let p = h as u128 * m as u128;
    check_budget("B1 quadruples (HM)^2", p * p, DIO_BUDGET as u128)?;
    let norm = (h as f64).powf(alpha) * (m as f64).powf(beta);
    let mut vals = Vec::with_capacity(p as usize);
    for hh in h + 1..=2 * h {
        for mm in m + 1..=2 * m {
            vals.push((hh as f64).powf(alpha) * (mm as f64).powf(beta) / norm);
        }
    }
    let (count, boundary) = pair_count(&vals, thr);
    Ok(DioCount {
        count,
        boundary,
        in_regime: true,
    })
}

/// 𝔅₀: quadruples with |n₁^β + n₂^β − n₃^β − n₄^β|/N^β ≤ 1/X.
pub fn count_b0(n: u64, beta: f64, x: f64) -> Result<DioCount> {
    let thr = check_x(x)?;
    if n == 0 || beta == 0.0 || beta == 1.0 {
        return Err(Error::Domain("B0 needs N >= 1 and beta not in {0, 1}".into()));
    }
    check_budget("B0 quadruples N^4", (n as u128).pow(4), DIO_BUDGET as u128)?;
    let norm = (n as f64).powf(beta);
    let pw: Vec<f64> = (n + 1..=2 * n).map(|k| (k as f64).powf(beta)).collect();
    let mut sums = Vec::with_capacity((n * n) as usize);
    for a in &pw {
        for b in &pw {
            sums.push((a + b) / norm);
        }
    }
    let (count, boundary) = pair_count(&sums, thr);
    Ok(DioCount {
        count,
        boundary,
        in_regime: true,
    })
}

/// Range [min, max] of f over the m values.
fn value_range<F: Fn(u64) -> f64>(ms: &[u64], f: F) -> (f64, f64) {
    ms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &m| {
        let v = f(m);
        (lo.min(v), hi.max(v))
    })
}

/// sup over m₁, m₂ of |f(m₁) − g(m₂)| from per-function value lists.
fn sup_distance(f: &[f64], g: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for a in f {
        for b in g {
            best = best.max((a - b).abs());
        }
    }
    best
}

/// 𝔅₂: quadruples with sup_{m₁,m₂∼M} |φ_{n₁,n₂}(m₁) − φ_{n₃,n₄}(m₂)| ≤ 1/X.
pub fn count_b2(n: u64, gamma: f64, x: f64, spec: &PerturbationSpec, mode: SupMode) -> Result<DioCount> {
    let thr = check_x(x)?;
    if n == 0 || !(gamma > 0.0) {
        return Err(Error::Domain("B2 needs N >= 1 and gamma > 0".into()));
    }
    let ms = spec.m_range(mode);
    let quads = (n as u128).pow(4);
    check_budget("B2 quadruples x m-pairs", quads * (ms.len() as u128).pow(2), DIO_BUDGET as u128)?;
    // one row of φ values per ordered pair (n₁, n₂)
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity((n * n) as usize);
    for a in n + 1..=2 * n {
        for b in n + 1..=2 * n {
            rows.push(ms.iter().map(|&m| phi_pair(a, b, m, spec, n, gamma)).collect());
        }
    }
    let (count, boundary) = count_rows(&rows, thr, mode);
    let in_regime = spec.upper() == 0.0 || x <= (n as f64).powf(gamma) / spec.upper();
    Ok(DioCount {
        count,
        boundary,
        in_regime,
    })
}

/// 𝔅₃: pairs with sup_{m₁,m₂∼M} |ψ_{n₁}(m₁) − ψ_{n₂}(m₂)| ≤ 1/X.
pub fn count_b3(n: u64, gamma: f64, x: f64, spec: &PerturbationSpec, mode: SupMode) -> Result<DioCount> {
    let thr = check_x(x)?;
    if n == 0 || !(gamma > 0.0) {
        return Err(Error::Domain("B3 needs N >= 1 and gamma > 0".into()));
    }
    let ms = spec.m_range(mode);
    check_budget(
        "B3 pairs x m-pairs",
        (n as u128).pow(2) * (ms.len() as u128).pow(2),
        DIO_BUDGET as u128,
    )?;
    let rows: Vec<Vec<f64>> = (n + 1..=2 * n)
        .map(|k| ms.iter().map(|&m| psi_single(k, m, spec, n, gamma)).collect())
        .collect();
    let (count, boundary) = count_rows(&rows, thr, mode);
    let in_regime = spec.upper() == 0.0 || x <= (n as f64).powf(gamma) / spec.upper();
    Ok(DioCount {
        count,
        boundary,
        in_regime,
    })
}

/// Ordered pairs of rows whose sup-distance is ≤ thr. Endpoint mode uses
/// max(max f − min g, max g − min f); the full scan visits every (m₁, m₂).
fn count_rows(rows: &[Vec<f64>], thr: f64, mode: SupMode) -> (u64, u64) {
    let ranges: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| value_range(&(0..r.len() as u64).collect::<Vec<_>>(), |i| r[i as usize]))
        .collect();
    (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let mut c = 0;
            let mut b = 0;
            for j in 0..rows.len() {
                let d = match mode {
                    SupMode::Endpoints => {
                        let (lo_i, hi_i) = ranges[i];
                        let (lo_j, hi_j) = ranges[j];
                        (hi_i - lo_j).max(hi_j - lo_i)
                    }
                    SupMode::FullScan => sup_distance(&rows[i], &rows[j]),
                };
                let (dc, db) = classify(d, thr);
                c += dc;
                b += db;
            }
            (c, b)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1))
}

/// Sizes entering a bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DioSize {
    pub h: u64,
    pub m: u64,
    pub n: u64,
    pub x: f64,
}

/// The stated bound with implied constant 1:
/// B1 (HM)^{2+ε}(1/(HM) + 1/X); B0, B2 N^{4+ε}(1/N² + 1/X); B3 N²(1/N + 1/X).
pub fn dio_bound(kind: DioKind, size: &DioSize, eps: f64) -> f64 {
    let x = size.x;
    match kind {
        DioKind::B1 => {
            let hm = size.h as f64 * size.m as f64;
            hm.powf(2.0 + eps) * (1.0 / hm + 1.0 / x)
        }
        DioKind::B0 | DioKind::B2 => {
            let n = size.n as f64;
            n.powf(4.0 + eps) * (1.0 / (n * n) + 1.0 / x)
        }
        DioKind::B3 => {
            let n = size.n as f64;
            n * n * (1.0 / n + 1.0 / x)
        }
    }
}

/// A constant fitted at the smallest size of a ladder, and the worst slack
/// count/(c·bound) at the larger sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderFit {
    pub constant: f64,
    pub slacks: Vec<f64>,
    pub max_slack: f64,
    pub holds: bool,
}

pub fn fit_ladder(counts: &[u64], bounds: &[f64]) -> Result<LadderFit> {
    if counts.len() != bounds.len() || counts.is_empty() {
        return Err(Error::Structural("ladder needs matching nonempty count and bound lists".into()));
    }
    let constant = counts[0] as f64 / bounds[0];
    let slacks: Vec<f64> = counts
        .iter()
        .zip(bounds)
        .map(|(&c, &b)| c as f64 / (constant * b))
        .collect();
    let max_slack = slacks.iter().copied().fold(0.0, f64::max);
    Ok(LadderFit {
        constant,
        holds: max_slack <= LADDER_SLACK,
        slacks,
        max_slack,
    })
}
