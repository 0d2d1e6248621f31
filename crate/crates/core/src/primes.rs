//! Prime enumeration: a simple odds-only bit sieve for small limits and a
//! segmented sieve for streaming primes out of large ranges without holding
//! them all in memory.

use alloc::vec;
use alloc::vec::Vec;

/// Primes `<= limit`, ascending. Odds-only bit sieve; fine up to ~10^8.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    // bit i represents the odd number 2i+1
    let words = n / 2 / 64 + 1;
    let mut composite = vec![0u64; words];
    let mut primes = Vec::new();
    primes.push(2);
    let mut i = 1usize; // value 3
    while (2 * i + 1) * (2 * i + 1) <= n {
        if composite[i / 64] & (1 << (i % 64)) == 0 {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j <= n / 2 {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    for i in 1..=(n.saturating_sub(1)) / 2 {
        if composite[i / 64] & (1 << (i % 64)) == 0 {
            primes.push((2 * i + 1) as u64);
        }
    }
    primes
}

/// Calls `visit` with every prime in `[lo, hi]`, ascending.
///
/// Uses segments of ~1M odd candidates so memory stays flat regardless of
/// the range size. Returning `false` from `visit` stops the scan early.
pub fn for_primes_in(lo: u64, hi: u64, mut visit: impl FnMut(u64) -> bool) {
    if hi < 2 || hi < lo {
        return;
    }
    let lo = lo.max(2);
    if lo <= 2 && !visit(2) {
        return;
    }
    // odd candidates only from here on
    let mut start = lo.max(3);
    if start.is_multiple_of(2) {
        start += 1;
    }
    if start > hi {
        return;
    }
    let base = simple_sieve(hi.isqrt());
    const SEGMENT_ODDS: usize = 1 << 20;
    let mut seg = vec![0u64; SEGMENT_ODDS / 64];
    let mut seg_lo = start;
    while seg_lo <= hi {
        // segment covers odd values seg_lo, seg_lo+2, ..., seg_lo + 2*(SEGMENT_ODDS-1)
        let span = 2 * (SEGMENT_ODDS as u64 - 1);
        let seg_hi = seg_lo.saturating_add(span).min(hi);
        let count = ((seg_hi - seg_lo) / 2 + 1) as usize;
        for w in seg.iter_mut() {
            *w = 0;
        }
        for &p in base.iter().skip(1) {
            // first odd multiple of p that is >= max(p*p, seg_lo)
            let mut m = p * p;
            if m < seg_lo {
                m = seg_lo.div_ceil(p) * p;
                if m % 2 == 0 {
                    m += p;
                }
            }
            if p * p > seg_hi {
                break;
            }
            let mut idx = if m >= seg_lo { (m - seg_lo) / 2 } else { 0 };
            while idx < count as u64 {
                seg[(idx / 64) as usize] |= 1 << (idx % 64);
                idx += p;
            }
        }
        for i in 0..count {
            if seg[i / 64] & (1 << (i % 64)) == 0 {
                let v = seg_lo + 2 * i as u64;
                if !visit(v) {
                    return;
                }
            }
        }
        match seg_hi.checked_add(2) {
            Some(next) => seg_lo = next,
            None => return,
        }
    }
}

/// Collects the primes in `[lo, hi]`. Convenience wrapper over [`for_primes_in`].
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_primes_in(lo, hi, |p| {
        out.push(p);
        true
    });
    out
}
