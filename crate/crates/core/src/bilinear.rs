//! Bilinear forms Σ_φ Σ_y a(φ) b(y) e(φ(y)·y) over a family of functions and
//! a point set, the spacing correlation counts that bound them, and checks of
//! the two large-sieve inequalities.
//!
//! Functions are tabulated on the points of the companion [`PointSet`]; the
//! sup-distance |φ − φ*| = sup_{y₁,y₂} |φ(y₁) − φ*(y₂)| is taken over the
//! tabulated points. Correlation counts run over ordered pairs, diagonal
//! included.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{e, CompensatedAccumulator, Neumaier};
use crate::error::{Error, Result};
use crate::report::VerificationReport;

/// Slack allowed on |b| ≤ 1 and |φ| ≤ X when validating inputs.
const BOUND_SLACK: f64 = 1e-12;

/// Finite point set 𝒴 with coefficients b(y), |y| ≤ Y.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<f64>,
    coeffs: Vec<Complex64>,
    y_bound: f64,
}

impl PointSet {
    pub fn new(points: Vec<f64>, coeffs: Vec<Complex64>, y_bound: f64) -> Result<Self> {
        if points.len() != coeffs.len() {
            return Err(Error::Structural(format!(
                "{} points but {} coefficients",
                points.len(),
                coeffs.len()
            )));
        }
        if !(y_bound > 0.0) {
            return Err(Error::Domain(format!("Y must be positive, got {y_bound}")));
        }
        if let Some((i, y)) = points.iter().enumerate().find(|(_, y)| !(y.abs() <= y_bound)) {
            return Err(Error::Domain(format!("point {i} = {y} exceeds Y = {y_bound}")));
        }
        if let Some(i) = coeffs.iter().position(|b| b.norm() > 1.0 + BOUND_SLACK) {
            return Err(Error::Domain(format!("|b| > 1 at point {i}")));
        }
        Ok(Self {
            points,
            coeffs,
            y_bound,
        })
    }

    /// Points with b ≡ 1.
    pub fn unit(points: Vec<f64>, y_bound: f64) -> Result<Self> {
        let coeffs = vec![Complex64::new(1.0, 0.0); points.len()];
        Self::new(points, coeffs, y_bound)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn y_bound(&self) -> f64 {
        self.y_bound
    }
}

/// Finite family 𝒳 of real functions, each tabulated on a point set.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    /// Row-major: member `k` occupies `values[k * n_points .. (k + 1) * n_points]`.
    values: Vec<f64>,
    n_points: usize,
    coeffs: Vec<Complex64>,
    x_bound: f64,
    max: Vec<f64>,
    min: Vec<f64>,
}

impl FunctionFamily {
    pub fn from_tables(tables: Vec<Vec<f64>>, coeffs: Vec<Complex64>, x_bound: f64) -> Result<Self> {
        if tables.len() != coeffs.len() {
            return Err(Error::Structural(format!(
                "{} members but {} coefficients",
                tables.len(),
                coeffs.len()
            )));
        }
        let n_points = tables.first().map_or(0, Vec::len);
        if let Some(k) = tables.iter().position(|t| t.len() != n_points) {
            return Err(Error::Structural(format!(
                "member {k} tabulated on {} points, expected {n_points}",
                tables[k].len()
            )));
        }
        let values = tables.into_iter().flatten().collect();
        Self::from_flat(values, n_points, coeffs, x_bound)
    }

    /// Tabulate `f(member, y)` on the points of `points`.
    pub fn tabulate<F>(points: &PointSet, coeffs: Vec<Complex64>, x_bound: f64, f: F) -> Result<Self>
    where
        F: Fn(usize, f64) -> f64,
    {
        let n = points.len();
        let mut values = Vec::with_capacity(coeffs.len() * n);
        for k in 0..coeffs.len() {
            values.extend(points.points().iter().map(|&y| f(k, y)));
        }
        Self::from_flat(values, n, coeffs, x_bound)
    }

    fn from_flat(values: Vec<f64>, n_points: usize, coeffs: Vec<Complex64>, x_bound: f64) -> Result<Self> {
        if !(x_bound > 0.0) {
            return Err(Error::Domain(format!("X must be positive, got {x_bound}")));
        }
        if let Some(k) = coeffs.iter().position(|a| a.norm() > 1.0 + BOUND_SLACK) {
            return Err(Error::Domain(format!("|a| > 1 for member {k}")));
        }
        let members = coeffs.len();
        let mut max = Vec::with_capacity(members);
        let mut min = Vec::with_capacity(members);
        for k in 0..members {
            let row = &values[k * n_points..(k + 1) * n_points];
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("member {k} takes non-finite value {v}")));
            }
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            if hi.abs().max(lo.abs()) > x_bound * (1.0 + BOUND_SLACK) {
                return Err(Error::Domain(format!(
                    "member {k} has sup |φ| = {} > X = {x_bound}",
                    hi.abs().max(lo.abs())
                )));
            }
            max.push(hi);
            min.push(lo);
        }
        Ok(Self {
            values,
            n_points,
            coeffs,
            x_bound,
            max,
            min,
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn member(&self, k: usize) -> &[f64] {
        &self.values[k * self.n_points..(k + 1) * self.n_points]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn x_bound(&self) -> f64 {
        self.x_bound
    }

    /// max φ − min φ over the tabulation (0 for an empty tabulation).
    pub fn osc(&self, k: usize) -> f64 {
        if self.n_points == 0 {
            0.0
        } else {
            self.max[k] - self.min[k]
        }
    }

    pub fn max_osc(&self) -> f64 {
        (0..self.len()).map(|k| self.osc(k)).fold(0.0, f64::max)
    }

    /// sup_{y₁,y₂} |φ_j(y₁) − φ_k(y₂)|.
    pub fn sup_distance(&self, j: usize, k: usize) -> f64 {
        (self.max[j] - self.min[k]).max(self.max[k] - self.min[j])
    }
}

/// Σ_φ Σ_y a(φ) b(y) e(φ(y)·y).
pub fn bilinear_form(family: &FunctionFamily, points: &PointSet) -> Result<Complex64> {
    if family.n_points() != points.len() {
        return Err(Error::Structural(format!(
            "family tabulated on {} points but the point set has {}",
            family.n_points(),
            points.len()
        )));
    }
    let n = points.len() as u64;
    let total = family.len() as u64 * n;
    let ys = points.points();
    let bs = points.coeffs();
    let acc = CompensatedAccumulator::default();
    Ok(acc.sum_complex(0..total, |i| {
        let k = (i / n) as usize;
        let j = (i % n) as usize;
        let phi = family.values[k * family.n_points + j];
        family.coeffs[k] * bs[j] * e(phi * ys[j])
    }))
}

/// Σ over ordered pairs (y, y*) with |y − y*| ≤ η of |b(y) b(y*)|.
pub fn correlation_points(points: &PointSet, eta: f64) -> f64 {
    let ys = points.points();
    let mods: Vec<f64> = points.coeffs().iter().map(|b| b.norm()).collect();
    let mut order: Vec<usize> = (0..ys.len()).collect();
    order.sort_by(|&i, &j| ys[i].total_cmp(&ys[j]).then(i.cmp(&j)));
    let sorted_y: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let sorted_b: Vec<f64> = order.iter().map(|&i| mods[i]).collect();
    let acc = CompensatedAccumulator::default();
    acc.sum(0..sorted_y.len() as u64, |i| {
        let i = i as usize;
        let yi = sorted_y[i];
        // fl(y_j - y_i) is monotone in j, so the qualifying j form a window
        let mut inner = Neumaier::new();
        inner.add(sorted_b[i]);
        for j in (0..i).rev() {
            if (sorted_y[j] - yi).abs() > eta {
                break;
            }
            inner.add(sorted_b[j]);
        }
        for j in i + 1..sorted_y.len() {
            if (sorted_y[j] - yi).abs() > eta {
                break;
            }
            inner.add(sorted_b[j]);
        }
        sorted_b[i] * inner.value()
    })
}

/// Σ over ordered pairs (φ, φ*) with |φ − φ*| ≤ threshold of |a(φ) a(φ*)|.
///
/// |φ − φ*| is the sup over both arguments, so the diagonal pair counts only
/// when osc(φ) ≤ threshold.
pub fn correlation_functions(family: &FunctionFamily, threshold: f64) -> f64 {
    let mods: Vec<f64> = family.coeffs().iter().map(|a| a.norm()).collect();
    let k = family.len();
    let acc = CompensatedAccumulator::new(16);
    acc.sum(0..k as u64, |j| {
        let j = j as usize;
        let mut inner = Neumaier::new();
        for (l, &w) in mods.iter().enumerate() {
            if family.sup_distance(j, l) <= threshold {
                inner.add(w);
            }
        }
        mods[j] * inner.value()
    })
}

/// The kernel ∫_{−T}^{T} e(ut) dt = sin(2πTu)/(πu), equal to 2T at u = 0.
fn fourier_box(u: f64, t: f64) -> f64 {
    if u == 0.0 {
        2.0 * t
    } else {
        (2.0 * PI * t * u).sin() / (PI * u)
    }
}

/// ∫_{−T}^{T} |Σ_y b(y) e(yt)|² dt, evaluated exactly by expanding the square.
pub fn mean_square_integral(points: &PointSet, t: f64) -> f64 {
    let ys = points.points();
    let bs = points.coeffs();
    let acc = CompensatedAccumulator::new(64);
    acc.sum(0..ys.len() as u64, |j| {
        let j = j as usize;
        let mut inner = Neumaier::new();
        for k in 0..ys.len() {
            let w = (bs[j] * bs[k].conj()).re;
            inner.add(w * fourier_box(ys[j] - ys[k], t));
        }
        inner.value()
    })
}

/// Relative slack allowed on the mean-square inequality.
pub const LEMMA21_TOLERANCE: f64 = 1e-9;

/// Mean-square inequality: ∫_{−T}^{T}|Σ b(y)e(yt)|² ≤ (2T + 1/η)·B(b; η).
pub fn lemma21_check(points: &PointSet, t: f64, eta: f64) -> Result<VerificationReport> {
    if !(t > 0.0 && eta > 0.0) {
        return Err(Error::Domain(format!("T and eta must be positive (T={t}, eta={eta})")));
    }
    let lhs = mean_square_integral(points, t);
    let rhs = (2.0 * t + 1.0 / eta) * correlation_points(points, eta);
    let holds = lhs <= rhs * (1.0 + LEMMA21_TOLERANCE);
    Ok(VerificationReport::new("lemma21", lhs, rhs, 0)
        .param("T", t)
        .param("eta", eta)
        .param("points", points.len() as f64)
        .verdict(holds))
}

/// Explicit constant in |ℬ(a,b;𝒳,𝒴)|² ≤ C·(1 + KXY)·ℬ(b;𝒳)·ℬ(a;𝒴).
///
/// Tracking the smoothing argument with ε = 1/(4Y), T = X + ε and η = 1/X:
///
/// * first Cauchy factor: t ranges over a set of measure at most
///   K/Y = 4Kε for each pair (φ, φ*), giving (K/Y)·ℬ(a;𝒴);
/// * second factor: the mean-square inequality with the weight
///   |ω(y)| = |πy / sin(2πεy)| ≤ πY gives (2T + X)(πY)²·ℬ(b;𝒳)
///   = (3X + 1/(2Y))(πY)²·ℬ(b;𝒳).
///
/// The product is π²K(3XY + 1/2)·ℬ(b;𝒳)·ℬ(a;𝒴), and
/// K(3XY + 1/2) ≤ max(3, K/2)·(1 + KXY), so C = π²·max(3, K/2).
pub fn dls_constant(k: f64) -> f64 {
    PI * PI * (3.0f64).max(k / 2.0)
}

/// The proof-level right-hand side π²K(3XY + 1/2)·ℬ(b;𝒳)·ℬ(a;𝒴) relative
/// to (1 + KXY)·ℬ(b;𝒳)·ℬ(a;𝒴); never exceeds [`dls_constant`].
pub fn dls_proof_factor(k: f64, x: f64, y: f64) -> f64 {
    PI * PI * k * (3.0 * x * y + 0.5) / (1.0 + k * x * y)
}

/// Generalized double large sieve: compares |ℬ|² with
/// (1 + KXY)·ℬ(b;𝒳)·ℬ(a;𝒴) and passes when the ratio is at most
/// [`dls_constant`]`(K)`.
pub fn dls_check(family: &FunctionFamily, points: &PointSet, k: f64) -> Result<VerificationReport> {
    if !(k >= 1.0) {
        return Err(Error::Domain(format!("K must be >= 1, got {k}")));
    }
    let x = family.x_bound();
    let y = points.y_bound();
    let limit = k / (4.0 * y);
    for m in 0..family.len() {
        let osc = family.osc(m);
        if !(osc < limit) {
            return Err(Error::Rejected(format!(
                "member φ_{m} has oscillation {osc} >= K/(4Y) = {limit}"
            )));
        }
    }
    let form = bilinear_form(family, points)?;
    let lhs = form.norm_sqr();
    let b_points = correlation_points(points, 1.0 / x);
    let b_funcs = correlation_functions(family, k / y);
    let rhs = (1.0 + k * x * y) * b_points * b_funcs;
    let c = dls_constant(k);
    let report = VerificationReport::new("dls", lhs, rhs, 0)
        .param("K", k)
        .param("X", x)
        .param("Y", y)
        .param("members", family.len() as f64)
        .param("points", points.len() as f64)
        .param("C_dls", c);
    let holds = report.ratio <= c;
    Ok(report.verdict(holds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn unimodular(rng: &mut ChaCha8Rng) -> Complex64 {
        Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
    }

    fn random_instance(seed: u64, members: usize, n: usize) -> (FunctionFamily, PointSet) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let bs: Vec<Complex64> = (0..n).map(|_| unimodular(&mut rng) * rng.random_range(0.0..1.0)).collect();
        let points = PointSet::new(ys, bs, 3.0).unwrap();
        let tables: Vec<Vec<f64>> = (0..members)
            .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let coeffs = (0..members).map(|_| unimodular(&mut rng)).collect();
        (FunctionFamily::from_tables(tables, coeffs, 2.0).unwrap(), points)
    }

    #[test]
    fn single_term_form() {
        let points = PointSet::unit(vec![0.5], 1.0).unwrap();
        let family = FunctionFamily::from_tables(vec![vec![0.5]], vec![one()], 1.0).unwrap();
        let b = bilinear_form(&family, &points).unwrap();
        assert!((b - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_functions_factorize() {
        let points = PointSet::new(
            vec![0.1, -0.7, 2.0],
            vec![Complex64::new(0.5, 0.1), Complex64::new(-0.2, 0.3), one()],
            2.0,
        )
        .unwrap();
        let a = vec![Complex64::new(0.3, -0.4), Complex64::new(0.0, 1.0)];
        let family = FunctionFamily::tabulate(&points, a.clone(), 1.0, |_, _| 0.0).unwrap();
        let expected = a.iter().sum::<Complex64>() * points.coeffs().iter().sum::<Complex64>();
        assert!((bilinear_form(&family, &points).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn form_matches_double_loop() {
        let (family, points) = random_instance(42, 8, 16);
        let mut naive = Complex64::new(0.0, 0.0);
        for k in 0..family.len() {
            for j in 0..points.len() {
                let phase = family.member(k)[j] * points.points()[j];
                naive += family.coeffs()[k]
                    * points.coeffs()[j]
                    * Complex64::from_polar(1.0, 2.0 * PI * phase);
            }
        }
        assert!((bilinear_form(&family, &points).unwrap() - naive).norm() < 1e-12);
    }

    #[test]
    fn tabulation_mismatch() {
        let points = PointSet::unit(vec![0.0, 1.0], 1.0).unwrap();
        let family = FunctionFamily::from_tables(vec![vec![0.0]], vec![one()], 1.0).unwrap();
        assert!(matches!(bilinear_form(&family, &points), Err(Error::Structural(_))));
        assert!(FunctionFamily::from_tables(vec![vec![0.0], vec![1.0, 2.0]], vec![one(), one()], 5.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(PointSet::unit(vec![2.0], 1.0).is_err());
        assert!(PointSet::new(vec![0.0], vec![Complex64::new(2.0, 0.0)], 1.0).is_err());
        assert!(FunctionFamily::from_tables(vec![vec![3.0]], vec![one()], 1.0).is_err());
    }

    #[test]
    fn point_correlation_examples() {
        let p = PointSet::unit(vec![0.3], 1.0).unwrap();
        assert_eq!(correlation_points(&p, 1e-9), 1.0);
        let p = PointSet::unit(vec![0.0, 1.0], 1.0).unwrap();
        assert_eq!(correlation_points(&p, 0.5), 2.0);
        assert_eq!(correlation_points(&p, 1.0), 4.0);
    }

    #[test]
    fn point_correlation_matches_quadratic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ys: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..1.0)).collect();
        let unit = PointSet::unit(ys.clone(), 1.0).unwrap();
        let weights: Vec<Complex64> = (0..100).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
        let weighted = PointSet::new(ys.clone(), weights.clone(), 1.0).unwrap();
        let mut count = 0.0;
        let mut mass = 0.0;
        for i in 0..100 {
            for j in 0..100 {
                if (ys[i] - ys[j]).abs() <= 0.1 {
                    count += 1.0;
                    mass += weights[i].norm() * weights[j].norm();
                }
            }
        }
        assert_eq!(correlation_points(&unit, 0.1), count);
        assert!((correlation_points(&weighted, 0.1) - mass).abs() <= 1e-12 * mass);
    }

    #[test]
    fn function_correlation_examples() {
        let p = PointSet::unit(vec![-1.0, 0.0, 1.0], 1.0).unwrap();
        let single = FunctionFamily::tabulate(&p, vec![one()], 1.0, |_, _| 0.4).unwrap();
        assert_eq!(correlation_functions(&single, 1e-6), 1.0);
        let two = FunctionFamily::tabulate(&p, vec![one(), one()], 1.0, |k, _| k as f64 * 0.5).unwrap();
        assert_eq!(correlation_functions(&two, 0.25), 2.0);
        // a non-constant member misses its own diagonal below its oscillation
        let slope = FunctionFamily::tabulate(&p, vec![one()], 1.0, |_, y| 0.3 * y).unwrap();
        assert_eq!(correlation_functions(&slope, 0.5), 0.0);
        assert_eq!(correlation_functions(&slope, 0.6), 1.0);
    }

    #[test]
    fn function_correlation_matches_quadruple_loop() {
        let (family, _) = random_instance(5, 8, 12);
        for &thr in &[0.5, 2.0, 3.5, 4.0] {
            let mut oracle = 0.0;
            for j in 0..family.len() {
                for l in 0..family.len() {
                    let mut sup: f64 = 0.0;
                    for &u in family.member(j) {
                        for &v in family.member(l) {
                            sup = sup.max((u - v).abs());
                        }
                    }
                    if sup <= thr {
                        oracle += family.coeffs()[j].norm() * family.coeffs()[l].norm();
                    }
                }
            }
            assert!((correlation_functions(&family, thr) - oracle).abs() <= 1e-12 * oracle.max(1.0));
        }
    }

    #[test]
    fn correlations_monotone_in_threshold() {
        let (family, points) = random_instance(77, 10, 30);
        let mut last = (0.0, 0.0);
        for i in 1..40 {
            let thr = i as f64 * 0.1;
            let now = (correlation_points(&points, thr), correlation_functions(&family, thr));
            assert!(now.0 >= last.0 && now.1 >= last.1);
            last = now;
        }
    }

    #[test]
    fn mean_square_matches_quadrature() {
        let (_, points) = random_instance(3, 1, 6);
        let t = 1.3;
        let steps = 200_000;
        let h = 2.0 * t / steps as f64;
        let f = |s: f64| {
            points
                .points()
                .iter()
                .zip(points.coeffs())
                .map(|(&y, &b)| b * Complex64::from_polar(1.0, 2.0 * PI * frac(y * s)))
                .sum::<Complex64>()
                .norm_sqr()
        };
        // composite Simpson
        let mut quad = f(-t) + f(t);
        for i in 1..steps {
            let s = -t + i as f64 * h;
            quad += if i % 2 == 1 { 4.0 } else { 2.0 } * f(s);
        }
        quad *= h / 3.0;
        let exact = mean_square_integral(&points, t);
        assert!((quad - exact).abs() < 1e-8 * exact.max(1.0), "{quad} vs {exact}");
    }

    #[test]
    fn lemma21_examples() {
        let p = PointSet::unit(vec![0.0], 1.0).unwrap();
        let r = lemma21_check(&p, 2.0, 0.5).unwrap();
        assert_eq!(r.lhs, 4.0);
        assert_eq!(r.rhs, 6.0);
        assert!(r.holds);
        let p = PointSet::unit(vec![0.0, 0.5], 1.0).unwrap();
        let r = lemma21_check(&p, 1.0, 0.1).unwrap();
        assert_eq!(r.rhs, 12.0 * 2.0);
        assert!(r.lhs <= 4.0 + 1.0 && r.holds);
    }

    #[test]
    fn dls_singleton() {
        let p = PointSet::unit(vec![0.5], 0.5).unwrap();
        let f = FunctionFamily::tabulate(&p, vec![one()], 1.0, |_, _| 0.0).unwrap();
        let r = dls_check(&f, &p, 1.0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 1.0 + 0.5);
        assert!(r.ratio <= 1.0 && r.holds);
    }

    #[test]
    fn dls_rejects_large_oscillation() {
        let p = PointSet::unit(vec![-1.0, 1.0], 1.0).unwrap();
        let f = FunctionFamily::tabulate(&p, vec![one(), one()], 1.0, |k, y| k as f64 * y * 0.3).unwrap();
        match dls_check(&f, &p, 1.0) {
            Err(Error::Rejected(msg)) => assert!(msg.contains("φ_1"), "{msg}"),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn proof_factor_below_constant() {
        for &k in &[1.0, 2.0, 6.0, 10.0, 50.0] {
            for &xy in &[1e-6, 0.01, 1.0, 100.0, 1e6] {
                assert!(dls_proof_factor(k, xy, 1.0) <= dls_constant(k) * (1.0 + 1e-12));
            }
        }
    }
}
