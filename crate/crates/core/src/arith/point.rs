//! Pointwise number theory on `u64`: deterministic Miller-Rabin, integer
//! k-th roots and Λ(d) via perfect-power extraction.

/// Witness set that makes Miller-Rabin deterministic below 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `r^k`, or `None` on overflow.
fn checked_pow(r: u64, k: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(r)?;
    }
    Some(acc)
}

/// Largest `r` with `r^k <= n`, by binary search.
pub fn iroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let bits = 64 - n.leading_zeros();
    let mut lo = 1u64;
    let mut hi = 1u64 << (bits / k + 1).min(63);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match checked_pow(mid, k) {
            Some(v) if v <= n => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

pub fn isqrt(n: u64) -> u64 {
    iroot(n, 2)
}

/// The prime `p` with `d = p^k` for some `k >= 1`, if any.
pub fn prime_power_base(d: u64) -> Option<u64> {
    if d < 2 {
        return None;
    }
    // a small prime factor settles the question by repeated division
    for &p in &SMALL_PRIMES {
        if d.is_multiple_of(p) {
            let mut r = d;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return (r == 1).then_some(p);
        }
    }
    if is_prime(d) {
        return Some(d);
    }
    let max_k = 63 - d.leading_zeros();
    for k in 2..=max_k {
        let r = iroot(d, k);
        if r < 2 {
            break;
        }
        if checked_pow(r, k) == Some(d) && is_prime(r) {
            return Some(r);
        }
    }
    None
}

/// Λ(d): `ln p` when `d = p^k`, else 0.
pub fn mangoldt_point(d: u64) -> f64 {
    match prime_power_base(d) {
        Some(p) => (p as f64).ln(),
        None => 0.0,
    }
}

/// The centred sawtooth ψ(t) = {t} − 1/2 with {t} = t − ⌊t⌋ ∈ [0, 1).
#[inline]
pub fn psi_frac(t: f64) -> f64 {
    frac(t) - 0.5
}

/// Fractional part in [0, 1), also for negative arguments.
#[inline]
pub fn frac(t: f64) -> f64 {
    let f = t - t.floor();
    // t a tiny negative number rounds t - floor(t) up to 1.0
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Divisor count d(n) by trial division.
pub fn divisor_count(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut count = 1;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        count *= e + 1;
        p += 1;
    }
    if m > 1 {
        count *= 2;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), naive_prime(n), "n = {n}");
        }
    }

    #[test]
    fn known_large_primes() {
        assert!(is_prime(1_000_000_007));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn iroot_edges() {
        assert_eq!(iroot(u64::MAX, 2), 4_294_967_295);
        assert_eq!(iroot(u64::MAX, 63), 2);
        assert_eq!(iroot(26, 3), 2);
        assert_eq!(iroot(27, 3), 3);
        assert_eq!(iroot(1, 5), 1);
        assert_eq!(isqrt(10u64.pow(12)), 1_000_000);
        assert_eq!(isqrt(10u64.pow(12) - 1), 999_999);
    }

    #[test]
    fn mangoldt_examples() {
        assert_eq!(mangoldt_point(1), 0.0);
        assert_eq!(mangoldt_point(2), 2f64.ln());
        assert_eq!(mangoldt_point(2187), 3f64.ln());
        assert_eq!(mangoldt_point(1_000_000_007), (1_000_000_007f64).ln());
        assert_eq!(mangoldt_point(12), 0.0);
        // 101^2 * 103 and a prime square without small factors
        assert_eq!(mangoldt_point(101 * 101 * 103), 0.0);
        assert_eq!(mangoldt_point(1_000_003 * 1_000_003), (1_000_003f64).ln());
        assert_eq!(mangoldt_point(1u64 << 63), 2f64.ln());
    }

    #[test]
    fn psi_frac_examples() {
        assert_eq!(psi_frac(0.0), -0.5);
        assert_eq!(psi_frac(0.25), -0.25);
        assert_eq!(psi_frac(-0.25), 0.25);
        assert_eq!(psi_frac(-1e-300), -0.5);
        let v = psi_frac(-1e-20);
        assert!((-0.5..0.5).contains(&v));
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(97), 2);
        assert_eq!(divisor_count(360), 24);
    }
}
