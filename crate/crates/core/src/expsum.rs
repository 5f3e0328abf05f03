//! The perturbed triple sum
//!
//! S_δ(H,M,N) = Σ_{h∼H} Σ_{m∼M} Σ_{n∼N} a(h,m) b(n) e(X·(M^βN^γ/H^α)·h^α/(m^βn^γ + δ)),
//!
//! where a ∼ A means A < a ≤ 2A, together with the literature bounds it is
//! compared against and the instances that arise from the floor sum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{e, CompensatedAccumulator};
use crate::error::{check_budget, Error, Result};
use crate::exponent::ExponentPair;
use crate::report::{BoundKind, SuiteReport, VerificationReport};
use crate::vaaler::vaaler_phi;
use crate::vaughan::VaughanCoefficients;

pub const TERM_BUDGET: u64 = 100_000_000;
/// Phases beyond this lose too many fractional bits to be trusted.
pub const PHASE_GUARD: f64 = (1u64 << 46) as f64;
pub const DEFAULT_EPSILON: f64 = 0.05;
const COEFF_SLACK: f64 = 1e-12;

/// Which (m, n) pairs enter the sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IndexMode {
    Rectangle,
    /// Only pairs with lo < mn ≤ hi.
    HyperbolaClipped { lo: u64, hi: u64 },
}

#[derive(Clone, Debug)]
pub struct ExpSumInstance {
    pub h: u64,
    pub m: u64,
    pub n: u64,
    pub x: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub k: f64,
    pub epsilon: f64,
    pub mode: IndexMode,
    /// a(h, m) for h in (H, 2H], m in (M, 2M], row-major in h.
    coeff_a: Vec<Complex64>,
    /// b(n) for n in (N, 2N].
    coeff_b: Vec<Complex64>,
    pub seed: u64,
}

impl ExpSumInstance {
    /// An instance with a ≡ b ≡ 1, δ = 0, K = 1 and α = β = γ = 1.
    pub fn unit(h: u64, m: u64, n: u64, x: f64) -> Result<Self> {
        if h == 0 || m == 0 || n == 0 {
            return Err(Error::Domain("H, M, N must be positive".into()));
        }
        check_budget("coefficient table H*M", h as u128 * m as u128, TERM_BUDGET as u128)?;
        Ok(Self {
            h,
            m,
            n,
            x,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 0.0,
            k: 1.0,
            epsilon: DEFAULT_EPSILON,
            mode: IndexMode::Rectangle,
            coeff_a: vec![Complex64::new(1.0, 0.0); (h * m) as usize],
            coeff_b: vec![Complex64::new(1.0, 0.0); n as usize],
            seed: 0,
        })
    }

    pub fn exponents(mut self, alpha: f64, beta: f64, gamma: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self.gamma = gamma;
        self
    }

    pub fn perturbation(mut self, delta: f64, k: f64) -> Self {
        self.delta = delta;
        self.k = k;
        self
    }

    pub fn epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn mode(mut self, mode: IndexMode) -> Self {
        self.mode = mode;
        self
    }

    /// Tabulate a(h, m) and b(n) from generators, checking |·| ≤ 1.
    pub fn with_coeffs<A, B>(mut self, fa: A, fb: B) -> Result<Self>
    where
        A: Fn(u64, u64) -> Complex64,
        B: Fn(u64) -> Complex64,
    {
        let mut a = Vec::with_capacity((self.h * self.m) as usize);
        for h in self.h + 1..=2 * self.h {
            for m in self.m + 1..=2 * self.m {
                let v = fa(h, m);
                if !(v.norm() <= 1.0 + COEFF_SLACK) {
                    return Err(Error::Domain(format!("|a({h},{m})| = {} > 1", v.norm())));
                }
                a.push(v);
            }
        }
        let mut b = Vec::with_capacity(self.n as usize);
        for n in self.n + 1..=2 * self.n {
            let v = fb(n);
            if !(v.norm() <= 1.0 + COEFF_SLACK) {
                return Err(Error::Domain(format!("|b({n})| = {} > 1", v.norm())));
            }
            b.push(v);
        }
        self.coeff_a = a;
        self.coeff_b = b;
        Ok(self)
    }

    /// Unimodular coefficients with phases drawn from a seeded ChaCha8 stream
    /// (all of a in row order, then b).
    pub fn with_random_unimodular(self, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Complex64> = (0..self.h * self.m)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let b: Vec<Complex64> = (0..self.n)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let (h0, m0, n0, mm) = (self.h, self.m, self.n, self.m);
        let mut out = self.with_coeffs(
            |h, m| a[((h - h0 - 1) * mm + (m - m0 - 1)) as usize],
            |n| b[(n - n0 - 1) as usize],
        )?;
        out.seed = seed;
        Ok(out)
    }

    pub fn coeff_a(&self, h: u64, m: u64) -> Complex64 {
        self.coeff_a[((h - self.h - 1) * self.m + (m - self.m - 1)) as usize]
    }

    pub fn coeff_b(&self, n: u64) -> Complex64 {
        self.coeff_b[(n - self.n - 1) as usize]
    }

    pub fn terms(&self) -> u128 {
        self.h as u128 * self.m as u128 * self.n as u128
    }

    /// X·(M^βN^γ/H^α).
    pub fn scale(&self) -> f64 {
        self.x * (self.m as f64).powf(self.beta) * (self.n as f64).powf(self.gamma) / (self.h as f64).powf(self.alpha)
    }

    pub fn phase(&self, h: u64, m: u64, n: u64) -> f64 {
        let den = (m as f64).powf(self.beta) * (n as f64).powf(self.gamma) + self.delta;
        self.scale() * (h as f64).powf(self.alpha) / den
    }

    fn includes(&self, m: u64, n: u64) -> bool {
        match self.mode {
            IndexMode::Rectangle => true,
            IndexMode::HyperbolaClipped { lo, hi } => {
                let p = m * n;
                p > lo && p <= hi
            }
        }
    }

    /// Number of (h, m, n) actually summed.
    pub fn lattice_points(&self) -> u64 {
        let mut pairs = 0;
        for m in self.m + 1..=2 * self.m {
            for n in self.n + 1..=2 * self.n {
                pairs += u64::from(self.includes(m, n));
            }
        }
        pairs * self.h
    }

    /// Whether X ≤ K·M^β N^γ/(8δ); always true for δ = 0.
    pub fn thm1_regime(&self) -> bool {
        self.delta == 0.0 || self.x <= self.thm1_x_limit()
    }

    pub fn thm1_x_limit(&self) -> f64 {
        self.k * (self.m as f64).powf(self.beta) * (self.n as f64).powf(self.gamma) / (8.0 * self.delta)
    }

    pub fn params(&self, report: VerificationReport) -> VerificationReport {
        report
            .param("H", self.h as f64)
            .param("M", self.m as f64)
            .param("N", self.n as f64)
            .param("X", self.x)
            .param("alpha", self.alpha)
            .param("beta", self.beta)
            .param("gamma", self.gamma)
            .param("delta", self.delta)
            .param("K", self.k)
            .param("eps", self.epsilon)
    }

    fn validate(&self) -> Result<()> {
        let positive = [self.alpha, self.beta, self.gamma, self.k, self.epsilon];
        if !self.x.is_finite() || self.x == 0.0 || positive.iter().any(|v| !(*v > 0.0)) || !(self.delta >= 0.0) {
            return Err(Error::Domain(
                "X must be finite and nonzero, alpha, beta, gamma, K, eps positive and delta >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Direct evaluation of S_δ by a deterministic reduction over (h, m, n).
pub fn eval_exp_sum(inst: &ExpSumInstance) -> Result<Complex64> {
    eval_exp_sum_with_budget(inst, TERM_BUDGET)
}

pub fn eval_exp_sum_with_budget(inst: &ExpSumInstance, budget: u64) -> Result<Complex64> {
    inst.validate()?;
    check_budget("exponential sum terms HMN", inst.terms(), budget as u128)?;
    // the phase grows with h and shrinks with m, n
    let peak = inst.phase(2 * inst.h, inst.m + 1, inst.n + 1).abs();
    if !(peak <= PHASE_GUARD) {
        return Err(Error::Rejected(format!(
            "phase {peak:e} exceeds 2^46; fractional part unreliable"
        )));
    }
    let scale = inst.scale();
    let hp: Vec<f64> = (inst.h + 1..=2 * inst.h).map(|h| (h as f64).powf(inst.alpha)).collect();
    let mp: Vec<f64> = (inst.m + 1..=2 * inst.m).map(|m| (m as f64).powf(inst.beta)).collect();
    let np: Vec<f64> = (inst.n + 1..=2 * inst.n).map(|n| (n as f64).powf(inst.gamma)).collect();
    let (mm, nn) = (inst.m, inst.n);
    let acc = CompensatedAccumulator::default();
    Ok(acc.sum_complex(0..inst.h * mm * nn, |i| {
        let hi = i / (mm * nn);
        let mi = (i / nn) % mm;
        let ni = i % nn;
        if !inst.includes(mm + 1 + mi, nn + 1 + ni) {
            return Complex64::new(0.0, 0.0);
        }
        let phase = scale * hp[hi as usize] / (mp[mi as usize] * np[ni as usize] + inst.delta);
        inst.coeff_a[(hi * mm + mi) as usize] * inst.coeff_b[ni as usize] * e(phase)
    }))
}

/// Right-hand side of the selected bound, implied constant 1 and the
/// instance's ε.
pub fn bound_value(inst: &ExpSumInstance, which: BoundKind, pair: Option<&ExponentPair>) -> Result<f64> {
    inst.validate()?;
    if !(inst.x > 0.0) {
        return Err(Error::Domain(format!("bounds need X > 0, got {}", inst.x)));
    }
    let (h, m, n, x, k, eps) = (inst.h as f64, inst.m as f64, inst.n as f64, inst.x, inst.k, inst.epsilon);
    let hmn = h * m * n;
    let lead = hmn.powf(1.0 + eps);
    let v = match which {
        BoundKind::Thm1 => {
            if !inst.thm1_regime() {
                return Err(Error::Rejected(format!(
                    "X <= K M^beta N^gamma / (8 delta) fails: X = {x}, limit = {}",
                    inst.thm1_x_limit()
                )));
            }
            lead * ((k * x / (h * m * n * n)).powf(0.25)
                + (k * k / (h * m)).powf(0.25)
                + (k / n).sqrt()
                + k / x.sqrt())
        }
        BoundKind::Fi89 => {
            lead * ((x / (h * m * n * n)).powf(0.25) + n.powf(-0.3) + (h * m).powf(-0.25) + n.powf(0.1) / x.powf(0.25))
        }
        BoundKind::Rs06 => lead * ((x / (h * m * n * n)).powf(0.25) + (h * m).powf(-0.25) + n.powf(-0.5) + x.powf(-0.5)),
        BoundKind::Sw => {
            lead * ((x.powi(4) / (h.powi(4) * m.powi(4) * n.powi(11))).powf(1.0 / 26.0)
                + (x / (h * m * n * n)).powf(0.25)
                + n.powf(-7.0 / 18.0)
                + (h * m).powf(-0.25)
                + x.powf(-0.5))
        }
        BoundKind::Lwy => {
            let pair = pair.ok_or_else(|| Error::Domain("the lwy bound needs an exponent pair".into()))?;
            let limit = m.powf(inst.beta - 1.0) * n.powf(inst.gamma);
            if h > limit {
                return Err(Error::Rejected(format!("H <= M^(beta-1) N^gamma fails: H = {h}, limit = {limit}")));
            }
            if inst.delta > 1.0 / eps {
                return Err(Error::Rejected(format!(
                    "0 <= delta <= 1/eps fails: delta = {}, 1/eps = {}",
                    inst.delta,
                    1.0 / eps
                )));
            }
            let (kap, lam) = (pair.kappa.to_f64(), pair.lambda.to_f64());
            let first = (x.powf(kap) * h.powf(2.0 + kap) * m.powf(2.0 + kap) * n.powf(1.0 + kap + lam))
                .powf(1.0 / (2.0 + 2.0 * kap));
            (first + h * m * n.sqrt() + (h * m).sqrt() * n + hmn / x.sqrt()) * x.powf(eps)
        }
    };
    Ok(v)
}

/// |S_δ| against the selected bound for every instance of a grid.
pub fn ratio_scan(grid: &[ExpSumInstance], which: BoundKind, pair: Option<&ExponentPair>) -> Result<SuiteReport> {
    let mut report = SuiteReport::new(format!("ratio_scan_{which}"));
    for inst in grid {
        let rhs = bound_value(inst, which, pair)?;
        let lhs = eval_exp_sum(inst)?.norm();
        let row = inst.params(VerificationReport::new(report.suite.clone(), lhs, rhs, inst.seed)).bound(which);
        // the trivial bound |S| ≤ #terms is the only thing asserted per row
        let holds = lhs <= inst.lattice_points() as f64 * (1.0 + 1e-12);
        report.push(row.verdict(holds));
    }
    if let Some((i, r)) = report.max_ratio() {
        report.summarize("max_ratio", r);
        report.summarize("argmax", i as f64);
    }
    Ok(report)
}

/// Builds the type II instances of the floor-sum argument: α = β = γ = 1,
/// X = x·H'/(MN), so the phase is hx/(mn + δ).
#[derive(Clone, Copy, Debug)]
pub struct FloorScenario {
    pub x: f64,
    pub d: u64,
    pub delta: f64,
    pub h_prime: u64,
    pub h_max: u64,
    pub m: u64,
    pub n: u64,
    pub clip: bool,
}

/// a(h, m) = (H'/h)·Φ(h/(H_max+1))·α₃(m)/sup|α₃| (zero for h > H_max) and
/// b(n) = α₄(n)/sup|α₄| (zero when α₄ vanishes on the block).
pub fn build_floor_scenario(s: &FloorScenario) -> Result<ExpSumInstance> {
    let mn = s.m as u128 * s.n as u128;
    let d = s.d as u128;
    if mn * 4 < d || mn > 4 * d {
        return Err(Error::Structural(format!("MN = {mn} is not within a factor 4 of D = {d}")));
    }
    if s.h_prime == 0 || s.h_prime > s.h_max {
        return Err(Error::Structural(format!(
            "need 1 <= H' <= H_max (H' = {}, H_max = {})",
            s.h_prime, s.h_max
        )));
    }
    let vc = VaughanCoefficients::new(s.d)?;
    let a3 = vc.alpha(3);
    let a4 = vc.alpha(4);
    let sup3 = a3.sup_abs(s.m, 2 * s.m);
    let sup4 = a4.sup_abs(s.n, 2 * s.n);
    let norm = |v: f64, sup: f64| if sup > 0.0 { v / sup } else { 0.0 };
    let x_param = s.x * s.h_prime as f64 / (s.m as f64 * s.n as f64);
    let mode = if s.clip {
        IndexMode::HyperbolaClipped { lo: s.d, hi: 2 * s.d }
    } else {
        IndexMode::Rectangle
    };
    let denom = (s.h_max + 1) as f64;
    let hp = s.h_prime as f64;
    let inst = ExpSumInstance::unit(s.h_prime, s.m, s.n, x_param)?
        .perturbation(s.delta, 1.0)
        .mode(mode);
    let mut phi = Vec::with_capacity(s.h_prime as usize);
    for h in s.h_prime + 1..=2 * s.h_prime {
        phi.push(if h <= s.h_max { vaaler_phi(h as f64 / denom)? } else { 0.0 });
    }
    inst.with_coeffs(
        |h, m| {
            let w = hp / h as f64 * phi[(h - s.h_prime - 1) as usize];
            Complex64::new(w * norm(a3.get(m), sup3), 0.0)
        },
        |n| Complex64::new(norm(a4.get(n), sup4), 0.0),
    )
}
