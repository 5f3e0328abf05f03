use super::{BoundExpr, ExponentPair, Monomial, Rational};
use crate::error::{Error, Result};

/// Replace `var` in every term of `expr`.
pub fn substitute(expr: &BoundExpr, var: &str, replacement: &Monomial) -> Result<BoundExpr> {
    expr.substitute(var, replacement)
}

/// An affine exponent c + s·t.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Affine {
    pub constant: Rational,
    pub slope: Rational,
}

impl Affine {
    pub fn at(&self, t: Rational) -> Rational {
        self.constant + self.slope * t
    }

    /// Where two forms meet, if they are not parallel.
    pub fn meet(&self, other: &Affine) -> Option<Rational> {
        let ds = self.slope - other.slope;
        (!ds.is_zero()).then(|| (other.constant - self.constant) / ds)
    }
}

/// Reads `m` as x^{c + s·t} where `param` stands for x^t. Any other
/// remaining variable is an unsupported structure.
pub fn affine_in(m: &Monomial, param: &str) -> Result<Affine> {
    if let Some(v) = m.vars().find(|&v| v != "x" && v != param) {
        return Err(Error::Unsupported(format!(
            "`{m}` still depends on {v}; only x and {param} may remain"
        )));
    }
    Ok(Affine {
        constant: m.exp("x"),
        slope: m.exp(param),
    })
}

/// A closed interval of exponents t with `param` = x^t.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamRange {
    pub param: String,
    pub lo: Rational,
    pub hi: Rational,
}

impl ParamRange {
    pub fn new(param: &str, lo: Rational, hi: Rational) -> Result<Self> {
        super::check_variable(param)?;
        if lo > hi {
            return Err(Error::Domain(format!("empty range [{lo}, {hi}]")));
        }
        Ok(Self {
            param: param.to_string(),
            lo,
            hi,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dominance {
    pub holds: bool,
    /// The t of largest excess of the left side over the right (the first
    /// such t in increasing order on ties).
    pub witness: Rational,
    /// Exponent excess at the witness; ≤ 0 exactly when `holds`.
    pub excess: Rational,
}

/// Is `a` ≤ max(terms of `b`) for every t in `range`, as powers of x?
///
/// The right side is a convex piecewise-linear function of t, so the check
/// visits both endpoints and every pairwise breakpoint of `b` inside the
/// range. ε flags do not take part.
pub fn dominance_check(a: &Monomial, b: &BoundExpr, range: &ParamRange) -> Result<Dominance> {
    let fa = affine_in(a, &range.param)?;
    let fb: Vec<Affine> = b.terms().iter().map(|t| affine_in(t, &range.param)).collect::<Result<_>>()?;
    let mut points = vec![range.lo, range.hi];
    for i in 0..fb.len() {
        for j in i + 1..fb.len() {
            if let Some(t) = fb[i].meet(&fb[j]) {
                if t > range.lo && t < range.hi {
                    points.push(t);
                }
            }
        }
    }
    points.sort();
    points.dedup();
    let mut best: Option<(Rational, Rational)> = None;
    for t in points {
        let rhs = fb.iter().map(|f| f.at(t)).max().expect("nonempty");
        let excess = fa.at(t) - rhs;
        if best.is_none_or(|(_, e)| excess > e) {
            best = Some((t, excess));
        }
    }
    let (witness, excess) = best.expect("range has endpoints");
    Ok(Dominance {
        holds: excess <= Rational::ZERO,
        witness,
        excess,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Balance {
    /// Optimal exponent e* with the balanced variable equal to x^{e*}.
    pub point: Rational,
    /// Optimal value as an x-exponent.
    pub value: Rational,
    /// Indices of the terms attaining the value at e*.
    pub active: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BalanceOutcome {
    Optimum(Balance),
    /// The infimum is approached only as e runs off to ±∞.
    Unbounded { toward_positive: bool },
}

/// Minimize max_i (c_i + s_i e) over e in [lo, hi] (either end may be open
/// to infinity). Terms must be powers of x and `var` only.
///
/// Candidates are the finite endpoints and all pairwise intersections; the
/// smallest minimizing e is returned.
pub fn minimax_balance(
    terms: &BoundExpr,
    var: &str,
    lo: Option<Rational>,
    hi: Option<Rational>,
) -> Result<BalanceOutcome> {
    super::check_variable(var)?;
    if let (Some(a), Some(b)) = (lo, hi) {
        if a > b {
            return Err(Error::Domain(format!("empty range [{a}, {b}]")));
        }
    }
    let forms: Vec<Affine> = terms.terms().iter().map(|t| affine_in(t, var)).collect::<Result<_>>()?;
    let max_slope = forms.iter().map(|f| f.slope).max().expect("nonempty");
    let min_slope = forms.iter().map(|f| f.slope).min().expect("nonempty");
    if hi.is_none() && max_slope.is_negative() {
        return Ok(BalanceOutcome::Unbounded { toward_positive: true });
    }
    if lo.is_none() && min_slope.is_positive() {
        return Ok(BalanceOutcome::Unbounded { toward_positive: false });
    }
    let inside = |t: Rational| lo.is_none_or(|a| t >= a) && hi.is_none_or(|b| t <= b);
    let mut cands: Vec<Rational> = lo.into_iter().chain(hi).collect();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            if let Some(t) = forms[i].meet(&forms[j]) {
                if inside(t) {
                    cands.push(t);
                }
            }
        }
    }
    if cands.is_empty() {
        // every form has slope zero here; any point is optimal
        cands.push(Rational::ZERO);
    }
    cands.sort();
    cands.dedup();
    let value_at = |t: Rational| forms.iter().map(|f| f.at(t)).max().expect("nonempty");
    let mut best = cands[0];
    let mut best_val = value_at(best);
    for &t in &cands[1..] {
        let v = value_at(t);
        if v < best_val {
            best = t;
            best_val = v;
        }
    }
    let active = forms
        .iter()
        .enumerate()
        .filter(|(_, f)| f.at(best) == best_val)
        .map(|(i, _)| i)
        .collect();
    Ok(BalanceOutcome::Optimum(Balance {
        point: best,
        value: best_val,
        active,
    }))
}

/// The result of balancing A·V^{−a} against B·V^{b} over V ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTermBalance {
    /// V at the balance point, or `None` when the increasing side does not
    /// depend on V (the optimum is V → ∞).
    pub optimum: Option<Monomial>,
    /// Balanced value (A^b B^a)^{1/(a+b)}, or B in the degenerate case.
    pub value: Monomial,
    /// B evaluated at V = 1, which the constraint V ≥ 1 adds to the bound.
    pub at_one: Monomial,
    pub boundary: bool,
}

/// Symbolic balance of a decreasing and an increasing power of `var`.
pub fn balance_two_terms(decreasing: &Monomial, increasing: &Monomial, var: &str) -> Result<TwoTermBalance> {
    let a = -decreasing.exp(var);
    let b = increasing.exp(var);
    if !a.is_positive() {
        return Err(Error::Unsupported(format!("`{decreasing}` is not decreasing in {var}")));
    }
    if b.is_negative() {
        return Err(Error::Unsupported(format!("`{increasing}` is decreasing in {var}")));
    }
    let big_a = decreasing.mul(&Monomial::power(var, a));
    let big_b = increasing.mul(&Monomial::power(var, -b));
    if b.is_zero() {
        return Ok(TwoTermBalance {
            optimum: None,
            value: big_b.clone(),
            at_one: big_b,
            boundary: true,
        });
    }
    let s = (a + b).recip();
    let optimum = big_a.mul(&big_b.recip()).pow(s);
    let value = big_a.pow(b * s).mul(&big_b.pow(a * s));
    Ok(TwoTermBalance {
        optimum: Some(optimum),
        value,
        at_one: big_b,
        boundary: false,
    })
}

/// First monomial of the exponent-pair bound:
/// (X^κ H^{2+κ} M^{2+κ} N^{1+κ+λ})^{1/(2+2κ)}.
pub fn lwy_first_term(pair: &ExponentPair) -> Monomial {
    let (k, l) = (pair.kappa, pair.lambda);
    let one = Rational::ONE;
    let two = Rational::integer(2);
    let s = (two + two * k).recip();
    Monomial::from_pairs([
        ("X", k * s),
        ("H", (two + k) * s),
        ("M", (two + k) * s),
        ("N", (one + k + l) * s),
    ])
}

/// Type I bound x^{κ'} D^{(−5κ'+2λ'+1)/3} L^{κ'} + x^{−1} D², with the
/// D·L^{−1} remainder term appended when `with_remainder` is set.
pub fn type_one_bound(pair: &ExponentPair, with_remainder: bool) -> BoundExpr {
    let (k, l) = (pair.kappa, pair.lambda);
    let main = Monomial::from_pairs([
        ("x", k),
        ("D", (Rational::integer(-5) * k + Rational::integer(2) * l + Rational::ONE) / Rational::integer(3)),
        ("L", k),
    ]);
    let far = Monomial::from_pairs([("x", -Rational::ONE), ("D", Rational::integer(2))]);
    let mut terms = vec![main, far];
    if with_remainder {
        terms.push(Monomial::from_pairs([("D", Rational::ONE), ("L", -Rational::ONE)]));
    }
    BoundExpr::new(terms).expect("nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeOneBalance {
    /// The bound after optimizing L ≥ 1, in x and D.
    pub bound: BoundExpr,
    pub optimal_l: Option<Monomial>,
    pub boundary: bool,
}

/// Optimize L ≥ 1 in the type I bound with its remainder term.
pub fn type_one_balanced(pair: &ExponentPair) -> Result<TypeOneBalance> {
    let expr = type_one_bound(pair, true);
    let main = &expr.terms()[0];
    let far = &expr.terms()[1];
    let rem = &expr.terms()[2];
    let bal = balance_two_terms(rem, main, "L")?;
    let mut terms = vec![bal.value.clone()];
    if !bal.boundary {
        terms.push(bal.at_one.clone());
    }
    terms.push(far.clone());
    Ok(TypeOneBalance {
        bound: BoundExpr::new(terms)?,
        optimal_l: bal.optimum,
        boundary: bal.boundary,
    })
}

/// The largest value of each term over D = x^t with t between two
/// exponents given as monomials in the remaining variables. An affine
/// exponent peaks at an endpoint, so both endpoint substitutions are kept.
pub fn max_over_interval(expr: &BoundExpr, var: &str, lo: &Monomial, hi: &Monomial) -> Result<BoundExpr> {
    let mut terms = Vec::new();
    for t in expr.terms() {
        if t.contains(var) {
            terms.push(t.substitute(var, lo));
            terms.push(t.substitute(var, hi));
        } else {
            terms.push(t.clone());
        }
    }
    BoundExpr::new(terms)
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Exponents behind the bound D^{17/19} + x^{1/6}D^{329/570} for the
/// type II sums, for a given θ, H = D^{h} and K = D^{k}:
/// (DH^{-1}, x^{1/4}D^{3/8}K^{1/4}, D^{1−θ/4}K^{1/2}, x^{1/6}D^{1/2+θ/6}, D^{8/9}).
pub fn type_two_terms(theta: Rational, h: Rational, k: Rational) -> BoundExpr {
    let d = |e: Rational| Monomial::power("D", e);
    let one = Rational::ONE;
    BoundExpr::new(vec![
        d(one - h),
        Monomial::from_pairs([("x", r(1, 4)), ("D", r(3, 8) + k * r(1, 4))]),
        d(one - theta * r(1, 4) + k * r(1, 2)),
        Monomial::from_pairs([("x", r(1, 6)), ("D", r(1, 2) + theta * r(1, 6))]),
        d(r(8, 9)),
    ])
    .expect("nonempty")
}

/// Side condition for applying the perturbed bound to the type II pieces:
/// xH'/(MN) = o(DK) with H' ≤ H = D^{h}, MN ≍ D and K = D^{k}, i.e.
/// 1 + (h − 1)t < t(1 + k) for D = x^t. Checked strictly at both endpoints
/// of the t-range (the gap constant is not quantified).
pub fn side_condition_holds(h: Rational, k: Rational, t_lo: Rational, t_hi: Rational) -> bool {
    let lhs = |t: Rational| Rational::ONE + (h - Rational::ONE) * t;
    let rhs = |t: Rational| t * (Rational::ONE + k);
    lhs(t_lo) < rhs(t_lo) && lhs(t_hi) < rhs(t_hi)
}

/// Smallest t for which the side condition holds: t > 1/(2 + k − h).
pub fn side_condition_threshold(h: Rational, k: Rational) -> Rational {
    (Rational::integer(2) + k - h).recip()
}

/// The whole balancing argument for the floor sum, in exponents of x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloorPipeline {
    /// Terms of the bound as functions of E before minimizing.
    pub terms: BoundExpr,
    pub balance: Balance,
}

/// Compose the small-D bound (x²D⁷)^{1/12} on D ∈ [E, x^{11/21}], the
/// large-D bound D^{17/19} + x^{1/6}D^{329/570} on D ∈ [x^{11/21}, x/E] and
/// the trivial E, then minimize over E ∈ [x^{8/17}, x^{1/2}].
pub fn floor_pipeline() -> Result<FloorPipeline> {
    let e = Monomial::var("E");
    let x_split = Monomial::power("x", r(11, 21));
    let x_over_e = Monomial::from_pairs([("x", Rational::ONE), ("E", -Rational::ONE)]);
    let small: BoundExpr = "(x^2*D^7)^{1/12}".parse()?;
    let large: BoundExpr = "D^{17/19}, x^{1/6}*D^{329/570}".parse()?;
    let small_max = max_over_interval(&small, "D", &e, &x_split)?;
    let large_max = max_over_interval(&large, "D", &x_split, &x_over_e)?;
    let mut terms = BoundExpr::single(e);
    for t in small_max.terms().iter().chain(large_max.terms()) {
        terms.push(t.clone());
    }
    match minimax_balance(&terms, "E", Some(r(8, 17)), Some(r(1, 2)))? {
        BalanceOutcome::Optimum(balance) => Ok(FloorPipeline { terms, balance }),
        BalanceOutcome::Unbounded { .. } => Err(Error::Unsupported("bounded range cannot be unbounded".into())),
    }
}
