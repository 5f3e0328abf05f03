//! Vaaler's trigonometric polynomial for ψ(x) = {x} − 1/2 and the Fejér-kernel
//! majorant of its pointwise error.

use std::f64::consts::PI;

use crate::arith::frac;
use crate::error::{Error, Result};

/// Below this |t| the factor πt·cot(πt) is taken from its Taylor series.
const PHI_TAYLOR_CUTOFF: f64 = 1e-4;
/// Below this |sin(πx)| the majorant is summed term by term.
const FEJER_SERIES_CUTOFF: f64 = 1e-6;

/// Φ(t) = πt(1 − |t|)cot(πt) + |t| on (−1, 1), with Φ(0) = 1.
pub fn vaaler_phi(t: f64) -> Result<f64> {
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!("vaaler_phi needs |t| < 1, got {t}")));
    }
    let a = t.abs();
    let pt_cot = if a < PHI_TAYLOR_CUTOFF {
        let u2 = (PI * a) * (PI * a);
        1.0 - u2 / 3.0 - u2 * u2 / 45.0 - 2.0 * u2 * u2 * u2 / 945.0 - u2 * u2 * u2 * u2 / 4725.0
    } else {
        PI * a / (PI * a).tan()
    };
    Ok((1.0 - a) * pt_cot + a)
}

/// The degree-H polynomial with coefficients c_h = Φ(h/(H+1))/(πh).
#[derive(Clone, Debug)]
pub struct VaalerPolynomial {
    degree: usize,
    coeffs: Vec<f64>,
}

impl VaalerPolynomial {
    pub fn new(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Domain("Vaaler degree H must be >= 1".into()));
        }
        let denom = (degree + 1) as f64;
        let coeffs = (1..=degree)
            .map(|h| vaaler_phi(h as f64 / denom).map(|phi| phi / (PI * h as f64)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// c_1, ..., c_H.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// −Σ_{h≤H} c_h sin(2πhx).
    pub fn eval(&self, x: f64) -> f64 {
        let r = frac(x);
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let h = (i + 1) as f64;
            acc += c * (2.0 * PI * frac(h * r)).sin();
        }
        -acc
    }

    pub fn error_majorant(&self, x: f64) -> f64 {
        error_majorant_raw(x, self.degree)
    }
}

/// Vaaler's approximation to ψ(x) of degree `h`.
pub fn psi_approx(x: f64, h: usize) -> Result<f64> {
    Ok(VaalerPolynomial::new(h)?.eval(x))
}

/// (1/(2H+2)) Σ_{|h|≤H} (1 − |h|/(H+1)) e(hx), in the closed form
/// (sin(π(H+1)x)/sin(πx))² / (2(H+1)²).
pub fn error_majorant(x: f64, h: usize) -> Result<f64> {
    if h == 0 {
        return Err(Error::Domain("Vaaler degree H must be >= 1".into()));
    }
    Ok(error_majorant_raw(x, h))
}

fn error_majorant_raw(x: f64, h: usize) -> f64 {
    let n = (h + 1) as f64;
    // reduce to r in [-1/2, 1/2]; the kernel has period 1
    let mut r = frac(x);
    if r > 0.5 {
        r -= 1.0;
    }
    let s = (PI * r).sin();
    let v = if s.abs() < FEJER_SERIES_CUTOFF {
        fejer_series(r, h)
    } else {
        let q = (PI * n * r).sin() / s;
        q * q / (2.0 * n * n)
    };
    v.max(0.0)
}

/// Term-by-term Fejér sum; the fallback near integers.
pub(crate) fn fejer_series(x: f64, h: usize) -> f64 {
    let n = (h + 1) as f64;
    let mut acc = 1.0;
    for k in 1..=h {
        let kf = k as f64;
        acc += 2.0 * (1.0 - kf / n) * (2.0 * PI * kf * x).cos();
    }
    acc / (2.0 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::psi_frac;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn phi_examples() {
        assert_abs_diff_eq!(vaaler_phi(0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(vaaler_phi(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(vaaler_phi(-0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert!(vaaler_phi(1.0).is_err());
        assert!(vaaler_phi(-1.5).is_err());
        assert!(vaaler_phi(f64::NAN).is_err());
    }

    #[test]
    fn phi_taylor_branch_is_continuous() {
        let below = vaaler_phi(PHI_TAYLOR_CUTOFF * (1.0 - 1e-9)).unwrap();
        let above = vaaler_phi(PHI_TAYLOR_CUTOFF * (1.0 + 1e-9)).unwrap();
        assert_abs_diff_eq!(below, above, epsilon = 1e-12);
    }

    #[test]
    fn coefficients_positive_and_decreasing() {
        let p = VaalerPolynomial::new(200).unwrap();
        let c = p.coeffs();
        assert!(c.iter().all(|&v| v > 0.0));
        assert!(c.windows(2).all(|w| w[0] > w[1]));
        for h in 1..=200 {
            let phi = vaaler_phi(h as f64 / 201.0).unwrap();
            assert!(phi > 0.0 && phi <= 1.0);
        }
    }

    #[test]
    fn approx_examples() {
        assert_eq!(psi_approx(0.0, 7).unwrap(), 0.0);
        assert_abs_diff_eq!(psi_approx(0.25, 1).unwrap(), -1.0 / (2.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(psi_approx(0.5, 13).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn majorant_examples() {
        assert_abs_diff_eq!(error_majorant(0.0, 1).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(error_majorant(0.5, 1).unwrap(), 0.0, epsilon = 1e-15);
        // direct 21-term oracle for H = 10, x = 0.3
        let direct: f64 = (-10i32..=10)
            .map(|h| (1.0 - h.abs() as f64 / 11.0) * (2.0 * PI * h as f64 * 0.3).cos())
            .sum::<f64>()
            / 22.0;
        assert_abs_diff_eq!(error_majorant(0.3, 10).unwrap(), direct, epsilon = 1e-12);
        assert!(error_majorant(0.1, 0).is_err());
    }

    #[test]
    fn majorant_near_integers_uses_series() {
        for &x in &[1e-9, -1e-9, 1.0 - 1e-9, 3.0 + 1e-8] {
            let closed = error_majorant(x, 50).unwrap();
            let mut r = frac(x);
            if r > 0.5 {
                r -= 1.0;
            }
            assert_abs_diff_eq!(closed, fejer_series(r, 50), epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn vaaler_error_bound(x in 0.0f64..1.0, h in 1usize..=200) {
            let p = VaalerPolynomial::new(h).unwrap();
            let err = (psi_frac(x) - p.eval(x)).abs();
            prop_assert!(err <= p.error_majorant(x) + 1e-12);
            prop_assert!(p.eval(x).abs() <= 1.0);
        }

        #[test]
        fn majorant_periodic_and_symmetric(x in 0.0f64..1.0, h in 1usize..=200) {
            let m = error_majorant(x, h).unwrap();
            prop_assert!((m - error_majorant(x + 1.0, h).unwrap()).abs() <= 1e-12);
            prop_assert!((m - error_majorant(1.0 - x, h).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn psi_is_periodic(t in -1e6f64..1e6) {
            prop_assert!((psi_frac(t + 1.0) - psi_frac(t)).abs() <= 1e-9);
        }
    }
}
