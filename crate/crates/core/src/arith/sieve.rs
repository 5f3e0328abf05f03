//! Segmented Eratosthenes sieves for Λ and μ.

use std::io::{Read, Write};

use crate::error::{check_budget, Error, Result};

use super::point::isqrt;

/// Default cap on the number of entries of one table (8 bytes each).
pub const DEFAULT_SEGMENT_CAPACITY: u64 = 1 << 27;

/// Λ tabulated on the integer range `(lo, hi]`; entry `i` holds Λ(lo + 1 + i).
#[derive(Clone, Debug, PartialEq)]
pub struct MangoldtTable {
    lo: u64,
    values: Vec<f64>,
}

impl MangoldtTable {
    /// Exclusive lower end of the covered range.
    pub fn lo(&self) -> u64 {
        self.lo
    }

    /// Inclusive upper end of the covered range.
    pub fn hi(&self) -> u64 {
        self.lo + self.values.len() as u64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn contains(&self, d: u64) -> bool {
        d > self.lo && d <= self.hi()
    }

    /// Λ(d) for `d` in `(lo, hi]`.
    pub fn get(&self, d: u64) -> Option<f64> {
        self.contains(d).then(|| self.values[(d - self.lo - 1) as usize])
    }

    /// Λ(d), panicking outside the table.
    #[inline]
    pub fn at(&self, d: u64) -> f64 {
        debug_assert!(self.contains(d), "{d} outside ({}, {}]", self.lo, self.hi());
        self.values[(d - self.lo - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.lo + 1 + i as u64, v))
    }

    /// Flat segment format: `lo` and `hi` as little-endian u64, then one
    /// little-endian f64 per entry.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi().to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R, capacity: u64) -> Result<Self> {
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let lo = u64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let hi = u64::from_le_bytes(word);
        if hi < lo {
            return Err(Error::Structural(format!("segment header hi {hi} < lo {lo}")));
        }
        check_budget("segment capacity", (hi - lo) as u128, capacity as u128)?;
        let mut values = Vec::with_capacity((hi - lo) as usize);
        for _ in lo..hi {
            r.read_exact(&mut word)?;
            values.push(f64::from_le_bytes(word));
        }
        Ok(Self { lo, values })
    }
}

/// Primes up to `limit` (inclusive), plain Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Λ on `[1, limit]`.
pub fn sieve_mangoldt(limit: u64) -> Result<MangoldtTable> {
    sieve_mangoldt_with_capacity(limit, DEFAULT_SEGMENT_CAPACITY)
}

pub fn sieve_mangoldt_with_capacity(limit: u64, capacity: u64) -> Result<MangoldtTable> {
    if limit == 0 {
        return Err(Error::Domain("sieve limit must be >= 1".into()));
    }
    segment_sieve_with_capacity(0, limit, capacity)
}

/// Λ on `(lo, hi]`.
pub fn segment_sieve(lo: u64, hi: u64) -> Result<MangoldtTable> {
    segment_sieve_with_capacity(lo, hi, DEFAULT_SEGMENT_CAPACITY)
}

pub fn segment_sieve_with_capacity(lo: u64, hi: u64, capacity: u64) -> Result<MangoldtTable> {
    if hi <= lo {
        return Err(Error::Domain(format!("empty segment ({lo}, {hi}]")));
    }
    check_budget("segment capacity", (hi - lo) as u128, capacity as u128)?;
    let root = isqrt(hi);
    let primes = primes_up_to(root);
    Ok(sieve_segment_with_primes(lo, hi, &primes))
}

/// Sieve `(lo, hi]` given every prime up to `sqrt(hi)`.
pub(crate) fn sieve_segment_with_primes(lo: u64, hi: u64, primes: &[u64]) -> MangoldtTable {
    let len = (hi - lo) as usize;
    let start = lo + 1;
    let mut composite = vec![false; len];
    if start == 1 {
        composite[0] = true;
    }
    for &p in primes {
        if p * p > hi {
            break;
        }
        let first = (p * p).max(start.div_ceil(p) * p);
        let mut j = first;
        while j <= hi {
            composite[(j - start) as usize] = true;
            j += p;
        }
    }
    let mut values = vec![0.0; len];
    for (i, &c) in composite.iter().enumerate() {
        if !c {
            values[i] = ((start + i as u64) as f64).ln();
        }
    }
    // proper prime powers p^k, k >= 2; their base is at most sqrt(hi)
    for &p in primes {
        if p * p > hi {
            break;
        }
        let log_p = (p as f64).ln();
        let mut q = p * p;
        loop {
            if q >= start && q <= hi {
                values[(q - start) as usize] = log_p;
            }
            match q.checked_mul(p) {
                Some(next) if next <= hi => q = next,
                _ => break,
            }
        }
    }
    MangoldtTable { lo, values }
}

/// Visit Λ on `[1, limit]` one segment at a time, in increasing order.
pub fn for_each_segment<F>(limit: u64, segment: u64, mut visit: F)
where
    F: FnMut(&MangoldtTable),
{
    let primes = primes_up_to(isqrt(limit));
    let mut lo = 0;
    while lo < limit {
        let hi = (lo + segment).min(limit);
        let table = sieve_segment_with_primes(lo, hi, &primes);
        visit(&table);
        lo = hi;
    }
}

/// Möbius function on `[0, limit]` (index 0 unused, set to 0).
pub fn mobius_sieve(limit: u64) -> Vec<i8> {
    let n = limit as usize;
    let mut mu = vec![1i8; n + 1];
    let mut composite = vec![false; n + 1];
    mu[0] = 0;
    for i in 2..=n {
        if !composite[i] {
            let mut j = i;
            while j <= n {
                if j > i {
                    composite[j] = true;
                }
                mu[j] = -mu[j];
                j += i;
            }
            let sq = i.saturating_mul(i);
            let mut j = sq;
            while j <= n {
                mu[j] = 0;
                j += sq;
            }
        }
    }
    mu
}

#[cfg(test)]
mod tests {
    use super::super::point::mangoldt_point;
    use super::*;

    #[test]
    fn small_table() {
        let t = sieve_mangoldt(12).unwrap();
        assert_eq!(t.at(1), 0.0);
        assert_eq!(t.at(8), 2f64.ln());
        assert_eq!(t.at(12), 0.0);
        let t = sieve_mangoldt(2).unwrap();
        assert_eq!(t.at(2), 2f64.ln());
        assert_eq!(t.get(3), None);
    }

    #[test]
    fn segments() {
        let t = segment_sieve(10, 20).unwrap();
        assert_eq!(t.at(11), 11f64.ln());
        assert_eq!(t.at(16), 2f64.ln());
        assert_eq!(t.at(15), 0.0);
        assert_eq!(t.get(10), None);
        let t = segment_sieve(5, 10).unwrap();
        assert_eq!(t.at(6), 0.0);
        assert_eq!(t.at(7), 7f64.ln());
        assert_eq!(t.at(8), 2f64.ln());
        assert_eq!(t.at(9), 3f64.ln());
        assert_eq!(t.at(10), 0.0);
    }

    #[test]
    fn sieve_matches_pointwise_exactly() {
        let t = sieve_mangoldt(50_000).unwrap();
        for (d, v) in t.iter() {
            assert_eq!(v.to_bits(), mangoldt_point(d).to_bits(), "d = {d}");
        }
    }

    #[test]
    fn capacity_error_names_budget() {
        let err = segment_sieve_with_capacity(0, 1000, 10).unwrap_err();
        assert!(err.to_string().contains("budget 10"), "{err}");
        assert!(sieve_mangoldt(0).is_err());
        assert!(segment_sieve(5, 5).is_err());
    }

    #[test]
    fn segment_streaming_covers_range() {
        let mut seen = Vec::new();
        for_each_segment(1000, 97, |t| seen.extend(t.iter()));
        let whole = sieve_mangoldt(1000).unwrap();
        assert_eq!(seen, whole.iter().collect::<Vec<_>>());
    }

    #[test]
    fn binary_round_trip() {
        let t = segment_sieve(100, 164).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 64 * 8);
        assert_eq!(&buf[..8], &100u64.to_le_bytes());
        assert_eq!(&buf[8..16], &164u64.to_le_bytes());
        let back = MangoldtTable::read_from(&buf[..], 1 << 20).unwrap();
        assert_eq!(back, t);
        assert!(MangoldtTable::read_from(&buf[..], 10).is_err());
    }

    #[test]
    fn mobius_values() {
        let mu = mobius_sieve(30);
        let expected = [
            0, 1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0, -1, 1, 1, 0, -1, 0, -1, 0, 1, 1, -1, 0,
            0, 1, 0, 0, -1, -1,
        ];
        assert_eq!(mu, expected);
    }
}
