//! Factorization, Euler's totient (single and sieved), pure-phi iteration.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use once_cell::race::OnceBox;

/// Trial division handles all prime factors up to this bound; survivors go to
/// the primality test / rho splitter.
pub const TRIAL_BOUND: u64 = 1_000_000;

/// Default ceiling for sieve allocations (entries, not bytes). A full phi
/// sieve costs 12 bytes per entry transiently, 8 bytes per entry retained.
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TotientError {
    /// Zero where a positive integer is required.
    ZeroInput,
    /// Input below the operation's documented minimum.
    BelowMinimum { min: u64, got: u64 },
    /// Requested sieve exceeds the configured entry cap.
    SieveCapExceeded { limit: u64, cap: u64 },
}

impl fmt::Display for TotientError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TotientError::ZeroInput => write!(f, "input must be positive"),
            TotientError::BelowMinimum { min, got } => {
                write!(f, "input {got} is below the minimum {min}")
            }
            TotientError::SieveCapExceeded { limit, cap } => write!(
                f,
                "sieve limit {limit} exceeds the cap of {cap} entries; raise the cap if enough memory is available"
            ),
        }
    }
}

impl core::error::Error for TotientError {}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// a + b mod m for a, b < m, without leaving 64 bits.
#[inline]
fn addmod(a: u64, b: u64, m: u64) -> u64 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin(n: u64, base: u64) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = powmod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality test for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // this base set decides primality for every n < 2^64
    const BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
    BASES.iter().all(|&a| miller_rabin(n, a))
}

/// Brent-cycle rho with a fixed, input-derived parameter schedule, so repeated
/// runs split the same composite the same way. `n` must be odd, composite,
/// and free of factors below [`TRIAL_BOUND`].
fn rho_split(n: u64) -> u64 {
    let mut sm = n ^ 0x9e37_79b9_7f4a_7c15;
    loop {
        let y0 = splitmix64(&mut sm) % n;
        let c = 1 + splitmix64(&mut sm) % (n - 3); // avoid the degenerate c = 0, c = n-2
        if let Some(d) = brent_attempt(n, y0, c) {
            return d;
        }
    }
}

fn brent_attempt(n: u64, y0: u64, c: u64) -> Option<u64> {
    let step = |y: u64| addmod(mulmod(y, y, n), c, n);
    let mut y = y0;
    let mut r: u64 = 1;
    let mut q: u64 = 1;
    let mut x = y;
    let mut ys = y;
    let mut g: u64 = 1;
    const BATCH: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = step(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = num_integer::gcd(q, n);
            k += BATCH;
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
    if g == n {
        // the batched gcd overshot; replay single steps from the last checkpoint
        loop {
            ys = step(ys);
            g = num_integer::gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

static TRIAL_PRIMES: OnceBox<Vec<u64>> = OnceBox::new();

fn trial_primes() -> &'static [u64] {
    TRIAL_PRIMES.get_or_init(|| Box::new(crate::primes::simple_sieve(TRIAL_BOUND)))
}

/// A positive integer together with its full prime factorization, sorted by
/// prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn phi(&self) -> u64 {
        let mut acc = self.value;
        for &(p, _) in &self.factors {
            acc = acc / p * (p - 1);
        }
        acc
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Factors any n in `1..2^64`. Rejects 0.
pub fn factor(n: u64) -> Result<FactoredInteger, TotientError> {
    if n == 0 {
        return Err(TotientError::ZeroInput);
    }
    let mut rem = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in trial_primes() {
        if p * p > rem {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut e = 0u32;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rem > 1 {
        if rem < TRIAL_BOUND * TRIAL_BOUND || is_prime(rem) {
            // no divisor up to TRIAL_BOUND and rem < TRIAL_BOUND^2 forces primality
            factors.push((rem, 1));
        } else {
            let mut big = Vec::new();
            split_composite(rem, &mut big);
            big.sort_unstable();
            let mut i = 0;
            while i < big.len() {
                let p = big[i];
                let mut e = 0u32;
                while i < big.len() && big[i] == p {
                    e += 1;
                    i += 1;
                }
                factors.push((p, e));
            }
        }
    }
    Ok(FactoredInteger { value: n, factors })
}

fn split_composite(n: u64, out: &mut Vec<u64>) {
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_split(n);
    split_composite(d, out);
    split_composite(n / d, out);
}

/// Euler's totient, exact, via factorization. Rejects 0.
pub fn phi(n: u64) -> Result<u64, TotientError> {
    Ok(factor(n)?.phi())
}

/// phi for every index `1..=limit` via a linear sieve; index 0 is unused.
/// Honors [`DEFAULT_SIEVE_CAP`]; use [`phi_sieve_with_cap`] to override.
pub fn phi_sieve(limit: u64) -> Result<Vec<u64>, TotientError> {
    phi_sieve_with_cap(limit, DEFAULT_SIEVE_CAP)
}

pub fn phi_sieve_with_cap(limit: u64, cap: u64) -> Result<Vec<u64>, TotientError> {
    if limit == 0 {
        return Err(TotientError::ZeroInput);
    }
    // lpf entries are u32, so the cap can never meaningfully exceed u32 range
    let cap = cap.min(u32::MAX as u64 - 1);
    if limit > cap {
        return Err(TotientError::SieveCapExceeded { limit, cap });
    }
    let n = limit as usize;
    let mut phi = vec![0u64; n + 1];
    let mut lpf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    phi[1] = 1;
    for i in 2..=n {
        if lpf[i] == 0 {
            lpf[i] = i as u32;
            primes.push(i as u32);
            phi[i] = (i - 1) as u64;
        }
        for &p in &primes {
            let p = p as usize;
            if i * p > n {
                break;
            }
            lpf[i * p] = p as u32;
            if p == lpf[i] as usize {
                phi[i * p] = phi[i] * p as u64;
                break;
            }
            phi[i * p] = phi[i] * (p as u64 - 1);
        }
    }
    Ok(phi)
}

/// Totient provider backed by a sieve table for small arguments and by
/// factorization beyond it. Immutable after construction, so freely shareable.
pub struct PhiCache {
    table: Vec<u64>,
}

impl PhiCache {
    pub fn new(table_limit: u64) -> Result<Self, TotientError> {
        Ok(PhiCache {
            table: phi_sieve(table_limit)?,
        })
    }

    pub fn from_table(table: Vec<u64>) -> Self {
        PhiCache { table }
    }

    pub fn table_limit(&self) -> u64 {
        self.table.len() as u64 - 1
    }

    /// phi(n) for n ≥ 1; panics on 0.
    pub fn phi(&self, n: u64) -> u64 {
        assert!(n > 0, "phi is undefined at 0");
        match self.table.get(n as usize) {
            Some(&v) => v,
            None => factor(n).expect("n > 0").phi(),
        }
    }
}

/// The iteration x1, phi(x1), phi(phi(x1)), ... down to its terminal 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiChain {
    pub start: u64,
    /// `chain[0]` = start; each later entry is phi of its predecessor; the
    /// last entry is the first 1.
    pub chain: Vec<u64>,
    /// 1-based index of the first 1, i.e. chain length.
    pub pillai_n: u64,
}

impl PhiChain {
    /// Number of phi applications to first reach 1; the quantity bracketed by
    /// [`pillai_bounds`]. One application even for start = 1, since phi(1) = 1.
    pub fn iterations(&self) -> u64 {
        (self.pillai_n - 1).max(1)
    }
}

pub fn phi_chain(x1: u64) -> Result<PhiChain, TotientError> {
    if x1 == 0 {
        return Err(TotientError::ZeroInput);
    }
    let mut chain = vec![x1];
    let mut cur = x1;
    while cur != 1 {
        cur = factor(cur)?.phi();
        chain.push(cur);
    }
    let pillai_n = chain.len() as u64;
    Ok(PhiChain {
        start: x1,
        chain,
        pillai_n,
    })
}

/// Bracket on the number of phi applications needed to reach 1 from x1
/// (minimal n ≥ 1 with the n-fold iterate equal to 1, so chain length − 1
/// for x1 ≥ 2 and exactly 1 for x1 = 1):
/// floor(log3(x1/2)) + 1 ≤ N ≤ floor(log2(x1)) + 1.
/// Both floors are taken by integer power comparison and clamped at 0. The
/// bracket does not hold for the 1-based chain index of the first 1: that
/// index is N + 1, and e.g. x1 = 3 reaches 1 at chain index 3 while the
/// upper bound is 2.
pub fn pillai_bounds(x1: u64) -> (u64, u64) {
    assert!(x1 > 0, "pillai_bounds is undefined at 0");
    let mut m = 0u64;
    let mut pow3: u128 = 3;
    while 2 * pow3 <= x1 as u128 {
        m += 1;
        pow3 *= 3;
    }
    (m + 1, x1.ilog2() as u64 + 1)
}

/// Chain lengths N(i) for every i ≤ limit of `phi_table`, computed by dynamic
/// programming over the table (phi(i) < i for i ≥ 2). Index 0 is unused.
pub fn pillai_n_table(phi_table: &[u64]) -> Vec<u32> {
    let mut out = vec![0u32; phi_table.len()];
    if out.len() > 1 {
        out[1] = 1;
    }
    for i in 2..phi_table.len() {
        out[i] = out[phi_table[i] as usize] + 1;
    }
    out
}

/// A composite q with phi(q) dividing q − 1, plus the quotient r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LehmerHit {
    pub q: u64,
    pub r: u64,
}

/// Scans composites q ≤ limit for phi(q) | q − 1. No hit has ever been found;
/// any non-empty result would answer Lehmer's question.
pub fn lehmer_scan(limit: u64) -> Result<Vec<LehmerHit>, TotientError> {
    lehmer_scan_with_cap(limit, DEFAULT_SIEVE_CAP)
}

pub fn lehmer_scan_with_cap(limit: u64, cap: u64) -> Result<Vec<LehmerHit>, TotientError> {
    if limit < 2 {
        return Err(TotientError::BelowMinimum { min: 2, got: limit });
    }
    let table = phi_sieve_with_cap(limit, cap)?;
    let mut hits = Vec::new();
    for q in 2..=limit {
        let ph = table[q as usize];
        // composite exactly when phi(q) != q - 1
        if ph != q - 1 && (q - 1) % ph == 0 {
            hits.push(LehmerHit { q, r: (q - 1) / ph });
        }
    }
    Ok(hits)
}

/// Mean of phi over 1..=n as an exact fraction, against the asymptotic slope
/// 3n/pi^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgPhiReport {
    pub n: u64,
    /// mean = mean_num / mean_den, reduced.
    pub mean_num: u128,
    pub mean_den: u128,
    pub reference: f64,
    pub abs_error: f64,
}

impl AvgPhiReport {
    pub fn mean_f64(&self) -> f64 {
        self.mean_num as f64 / self.mean_den as f64
    }

    /// mean / n, comparable against 3/pi^2 ≈ 0.30396.
    pub fn normalized_mean(&self) -> f64 {
        self.mean_f64() / self.n as f64
    }
}

pub fn avg_phi_check(n: u64) -> Result<AvgPhiReport, TotientError> {
    if n < 2 {
        return Err(TotientError::BelowMinimum { min: 2, got: n });
    }
    let table = phi_sieve(n)?;
    let sum: u128 = table[1..].iter().map(|&v| v as u128).sum();
    let g = num_integer::gcd(sum, n as u128);
    let reference = 3.0 * n as f64 / (core::f64::consts::PI * core::f64::consts::PI);
    let mean = sum as f64 / n as f64;
    Ok(AvgPhiReport {
        n,
        mean_num: sum / g,
        mean_den: n as u128 / g,
        reference,
        abs_error: libm::fabs(mean - reference),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn oracle_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                let mut e = 0;
                while n.is_multiple_of(d) {
                    n /= d;
                    e += 1;
                }
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn oracle_phi(n: u64) -> u64 {
        (1..=n).filter(|&i| num_integer::gcd(i, n) == 1).count() as u64
    }

    #[test]
    fn primality_matches_sieve() {
        let primes = crate::primes::simple_sieve(10_000);
        let mut idx = 0;
        for n in 0..=10_000u64 {
            let expect = idx < primes.len() && primes[idx] == n;
            if expect {
                idx += 1;
            }
            assert_eq!(is_prime(n), expect, "n = {n}");
        }
    }

    #[test]
    fn primality_large_known() {
        assert!(is_prime((1 << 61) - 1));
        assert!(is_prime(u64::MAX - 58)); // 2^64 - 59
        assert!(!is_prime(u64::MAX));
        // strong pseudoprime to base 2
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(0), Err(TotientError::ZeroInput));
        assert_eq!(factor(1).unwrap().factors, vec![]);
        assert_eq!(factor(360).unwrap().factors, vec![(2, 3), (3, 2), (5, 1)]);
        let m61 = (1u64 << 61) - 1;
        assert_eq!(factor(m61).unwrap().factors, vec![(m61, 1)]);
    }

    #[test]
    fn factor_needs_rho() {
        // both prime factors exceed the trial division bound
        let n = 1_000_000_007u64 * 998_244_353;
        assert_eq!(
            factor(n).unwrap().factors,
            vec![(998_244_353, 1), (1_000_000_007, 1)]
        );
        let p = 1_000_003u64;
        assert_eq!(factor(p * p).unwrap().factors, vec![(p, 2)]);
        assert_eq!(
            factor(p * 1_000_033).unwrap().factors,
            vec![(p, 1), (1_000_033, 1)]
        );
        assert_eq!(factor(u64::MAX - 58).unwrap().factors.len(), 1);
    }

    #[test]
    fn factor_matches_oracle() {
        for n in 1..=2_000u64 {
            assert_eq!(factor(n).unwrap().factors, oracle_factor(n), "n = {n}");
        }
    }

    #[test]
    fn phi_examples_and_oracle() {
        assert_eq!(phi(0), Err(TotientError::ZeroInput));
        assert_eq!(phi(1).unwrap(), 1);
        assert_eq!(phi(7).unwrap(), 6);
        assert_eq!(phi(12).unwrap(), 4);
        for n in 1..=300 {
            assert_eq!(phi(n).unwrap(), oracle_phi(n), "n = {n}");
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(phi_sieve(0), Err(TotientError::ZeroInput));
        assert_eq!(phi_sieve(1).unwrap(), vec![0, 1]);
        assert_eq!(phi_sieve(10).unwrap()[1..], [1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
        assert!(matches!(
            phi_sieve_with_cap(100, 10),
            Err(TotientError::SieveCapExceeded {
                limit: 100,
                cap: 10
            })
        ));
    }

    #[test]
    fn sieve_agrees_with_phi_pointwise() {
        let table = phi_sieve(100_000).unwrap();
        for n in 1..=100_000u64 {
            assert_eq!(table[n as usize], phi(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn sieve_million_prime_entry() {
        let table = phi_sieve(1_000_000).unwrap();
        assert_eq!(table[999_983], 999_982);
    }

    #[test]
    fn phi_structure_to_a_million() {
        let table = phi_sieve(1_000_000).unwrap();
        for n in 2..=1_000_000u64 {
            let ph = table[n as usize];
            let composite = ph != n - 1;
            assert!(ph < n);
            if composite {
                // phi(n) <= n - sqrt(n), squared to stay in integers
                let gap = n - ph;
                assert!(gap * gap >= n, "n = {n}");
            }
            if n >= 3 {
                assert_eq!(ph % 2, 0, "n = {n}");
            }
        }
    }

    #[test]
    fn cache_spans_table_and_fallback() {
        let cache = PhiCache::new(1000).unwrap();
        assert_eq!(cache.table_limit(), 1000);
        assert_eq!(cache.phi(12), 4);
        assert_eq!(cache.phi(1009), 1008);
        assert_eq!(cache.phi(2 * 1009), 1008);
    }

    #[test]
    fn chain_examples() {
        assert_eq!(phi_chain(0), Err(TotientError::ZeroInput));
        let c = phi_chain(1).unwrap();
        assert_eq!((c.chain.as_slice(), c.pillai_n), ([1].as_slice(), 1));
        let c = phi_chain(2).unwrap();
        assert_eq!((c.chain.as_slice(), c.pillai_n), ([2, 1].as_slice(), 2));
        let c = phi_chain(100).unwrap();
        assert_eq!(c.chain, vec![100, 40, 16, 8, 4, 2, 1]);
        assert_eq!(c.pillai_n, 7);
        assert_eq!(c.start, 100);
    }

    #[test]
    fn chain_strictly_decreasing_past_start() {
        let c = phi_chain(97 * 89).unwrap();
        for w in c.chain[1..].windows(2) {
            assert!(w[1] < w[0]);
        }
        assert_eq!(*c.chain.last().unwrap(), 1);
        assert_eq!(c.chain.iter().filter(|&&v| v == 1).count(), 1);
    }

    #[test]
    fn pillai_bound_examples() {
        assert_eq!(pillai_bounds(1), (1, 1));
        assert_eq!(pillai_bounds(2), (1, 2));
        // lower = floor(log3 50) + 1 = 4; log3 50 ≈ 3.56
        assert_eq!(pillai_bounds(100), (4, 7));
        // exact powers must not misround: 2 * 3^3 = 54, 2^6 = 64
        assert_eq!(pillai_bounds(54), (4, 6));
        assert_eq!(pillai_bounds(53), (3, 6));
        assert_eq!(pillai_bounds(64), (4, 7));
        assert_eq!(pillai_bounds(63), (4, 6));
        // 3 -> 2 -> 1 takes two applications, sitting on the upper bound
        assert_eq!(phi_chain(3).unwrap().iterations(), 2);
        assert_eq!(pillai_bounds(3), (1, 2));
    }

    #[test]
    fn pillai_bounds_bracket_iteration_counts() {
        let table = phi_sieve(1_000_000).unwrap();
        let n_of = pillai_n_table(&table);
        for x1 in 1..=1_000_000u64 {
            let (lo, hi) = pillai_bounds(x1);
            let iters = (n_of[x1 as usize] as u64 - 1).max(1);
            assert!(
                lo <= iters && iters <= hi,
                "x1 = {x1}: {lo} <= {iters} <= {hi}"
            );
        }
        assert_eq!(n_of[100], 7);
    }

    #[test]
    fn lehmer_examples() {
        assert_eq!(
            lehmer_scan(1),
            Err(TotientError::BelowMinimum { min: 2, got: 1 })
        );
        assert_eq!(lehmer_scan(100).unwrap(), vec![]);
        // probe: phi(9) = 6 does not divide 8
        assert_eq!(phi(9).unwrap(), 6);
        assert_ne!(8 % 6, 0);
        assert_eq!(lehmer_scan(1_000_000).unwrap(), vec![]);
    }

    #[test]
    fn avg_phi_examples() {
        assert_eq!(
            avg_phi_check(1),
            Err(TotientError::BelowMinimum { min: 2, got: 1 })
        );
        let r = avg_phi_check(2).unwrap();
        assert_eq!((r.mean_num, r.mean_den), (1, 1));
        let r = avg_phi_check(10).unwrap();
        // sum of phi over 1..=10 is 32
        assert_eq!((r.mean_num, r.mean_den), (16, 5));
        let r = avg_phi_check(1_000_000).unwrap();
        let slope = 3.0 / (core::f64::consts::PI * core::f64::consts::PI);
        assert!(libm::fabs(r.normalized_mean() - slope) < 1e-3);
        assert!(r.abs_error < 1e-3 * r.n as f64);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn factorization_reconstructs(n in 1u64..) {
            let f = factor(n).unwrap();
            let mut prod: u128 = 1;
            let mut last = 0u64;
            for &(p, e) in &f.factors {
                prop_assert!(p > last);
                prop_assert!(e >= 1);
                prop_assert!(is_prime(p));
                prod *= (p as u128).pow(e);
                last = p;
            }
            prop_assert_eq!(prod, n as u128);
        }

        #[test]
        fn phi_multiplicative(a in 1u64..1_000_000, b in 1u64..1_000_000) {
            if num_integer::gcd(a, b) == 1 {
                prop_assert_eq!(phi(a * b).unwrap(), phi(a).unwrap() * phi(b).unwrap());
            }
        }

        #[test]
        fn chain_bracketed(x1 in 1u64..1_000_000_000_000) {
            let c = phi_chain(x1).unwrap();
            let (lo, hi) = pillai_bounds(x1);
            let iters = c.iterations();
            prop_assert!(lo <= iters && iters <= hi);
        }
    }
}
