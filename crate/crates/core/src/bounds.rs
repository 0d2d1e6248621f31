//! Inequality checks on computed orbits: the single-term sup bound with its
//! drop-witness claim, the two-term doubly-exponential bound with the parity
//! claim, the decreasing-map harness, and bulk scan campaigns.

use crate::orbit::{
    detect_cycle, trajectory, Guards, OrbitError, OrbitKind, OrbitResult, OrbitSpec, Terminated,
};
use crate::totient::PhiCache;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsError {
    Orbit(OrbitError),
    /// The two-term theorem only covers even shifts.
    OddShift {
        k: u64,
    },
    UnsupportedArity {
        d: usize,
    },
    /// The decreasing-map harness can only certify kinds whose decrease
    /// condition is machine-checkable.
    UnsupportedKind,
}

impl From<OrbitError> for BoundsError {
    fn from(e: OrbitError) -> Self {
        BoundsError::Orbit(e)
    }
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BoundsError::Orbit(e) => write!(f, "{e}"),
            BoundsError::OddShift { k } => write!(f, "shift k = {k} must be even"),
            BoundsError::UnsupportedArity { d } => write!(f, "arity d = {d} is not supported here"),
            BoundsError::UnsupportedKind => {
                write!(
                    f,
                    "only the digit-square-sum kind is supported by the harness"
                )
            }
        }
    }
}

impl core::error::Error for BoundsError {}

/// A checked inequality either gets a verdict or the orbit ran into guards
/// first; the latter is surfaced, never silently retried.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Verdict(T),
    GuardHit(OrbitResult),
}

impl<T> Outcome<T> {
    pub fn verdict(self) -> Option<T> {
        match self {
            Outcome::Verdict(t) => Some(t),
            Outcome::GuardHit(_) => None,
        }
    }
}

/// A witnessed descent: x_{r+i} < x_r with x_r over the k^4 threshold and
/// i in 1..=k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DropWitness {
    pub r: u64,
    pub i: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimCheck {
    pub witnesses: Vec<DropWitness>,
    /// Qualifying r too close to the end of the supplied window.
    pub untested: Vec<u64>,
    /// Qualifying r with a full window and no drop; must stay empty.
    pub failures: Vec<u64>,
}

/// For every index r with x_r >= k^4, the least i in 1..=k with
/// x_{r+i} < x_r. Indices whose probe window is truncated count as untested.
pub fn check_thm1_claim(orbit: &[u64], k: u64) -> ClaimCheck {
    assert!(k >= 2, "the drop claim is stated for k >= 2");
    let threshold = (k as u128).pow(4);
    let mut out = ClaimCheck {
        witnesses: Vec::new(),
        untested: Vec::new(),
        failures: Vec::new(),
    };
    for (r, &xr) in orbit.iter().enumerate() {
        if (xr as u128) < threshold {
            continue;
        }
        let mut found = false;
        for i in 1..=k {
            match orbit.get(r + i as usize) {
                Some(&xi) if xi < xr => {
                    out.witnesses.push(DropWitness { r: r as u64, i });
                    found = true;
                    break;
                }
                Some(_) => {}
                None => {
                    out.untested.push(r as u64);
                    found = true;
                    break;
                }
            }
        }
        if !found {
            out.failures.push(r as u64);
        }
    }
    out
}

/// Crossings into the >= k^4 region from below must land at most k above the
/// threshold; returns the indices where that fails.
pub fn check_threshold_crossings(orbit: &[u64], k: u64) -> Vec<u64> {
    assert!(k >= 2, "the crossing bound is stated for k >= 2");
    let threshold = (k as u128).pow(4);
    let cap = threshold + k as u128;
    let mut bad = Vec::new();
    for r in 1..orbit.len() {
        if (orbit[r - 1] as u128) < threshold
            && (orbit[r] as u128) >= threshold
            && orbit[r] as u128 > cap
        {
            bad.push(r as u64);
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thm1Report {
    pub x1: u64,
    pub k: u64,
    /// max(x1, k^4) + (k+1)^2, saturated at u64::MAX; the verdict itself is
    /// computed without saturation.
    pub bound: u64,
    pub sup_seen: u64,
    pub claim_drops: Vec<DropWitness>,
    pub claim_untested: Vec<u64>,
    pub claim_failures: Vec<u64>,
    /// sup_seen <= bound.
    pub ok: bool,
    pub orbit: OrbitResult,
}

fn thm1_bound(x1: u64, k: u64) -> u128 {
    (x1 as u128).max((k as u128).pow(4)) + (k as u128 + 1).pow(2)
}

/// Runs the single-term orbit and checks sup <= max(x1, k^4) + (k+1)^2,
/// recording every drop witness along the canonical prefix.
pub fn check_thm1(
    cache: &PhiCache,
    x1: u64,
    k: u64,
    guards: Guards,
) -> Result<Outcome<Thm1Report>, BoundsError> {
    let spec = OrbitSpec::phi_sum(alloc::vec![x1], k).with_guards(guards);
    let run = detect_cycle(cache, &spec)?;
    if run.terminated != Terminated::CycleFound {
        return Ok(Outcome::GuardHit(run));
    }
    let bound = thm1_bound(x1, k);
    let prefix = 1 + run.steps_used as usize;
    let (mut drops, mut untested, mut failures) = (Vec::new(), Vec::new(), Vec::new());
    if k >= 2 {
        // probe windows may reach past the prefix; the trajectory is periodic
        // there, so the extra terms are real orbit terms
        let t = trajectory(cache, &spec, prefix + k as usize)?;
        let claim = check_thm1_claim(&t, k);
        drops = claim.witnesses;
        drops.retain(|w| (w.r as usize) < prefix);
        untested = claim.untested;
        untested.retain(|&r| (r as usize) < prefix);
        failures = claim.failures;
        failures.retain(|&r| (r as usize) < prefix);
    }
    let ok = run.sup_seen as u128 <= bound;
    Ok(Outcome::Verdict(Thm1Report {
        x1,
        k,
        bound: u64::try_from(bound).unwrap_or(u64::MAX),
        sup_seen: run.sup_seen,
        claim_drops: drops,
        claim_untested: untested,
        claim_failures: failures,
        ok,
        orbit: run,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thm2Report {
    pub x1: u64,
    pub x2: u64,
    pub k: u64,
    /// X = (3 x1 + 5 x2 + 7 k) / 2 as a reduced fraction.
    pub x_num: u128,
    pub x_den: u32,
    /// log2 of the claimed bound 4^(X^(3^(k+1))): 2 * X^(3^(k+1)), infinity
    /// on float overflow — a finite sup always satisfies an infinite bound.
    pub log2_bound: f64,
    pub sup_seen: u64,
    pub log2_sup: f64,
    /// Terms from the fifth onward are all even.
    pub parity_ok: bool,
    /// When max(x1,x2) <= 2 and k = 0: terms from the third onward are all 2.
    /// Vacuously true otherwise.
    pub base_case_ok: bool,
    /// log2_sup <= log2_bound.
    pub ok: bool,
    pub orbit: OrbitResult,
}

impl Thm2Report {
    pub fn x_f64(&self) -> f64 {
        self.x_num as f64 / self.x_den as f64
    }
}

/// Runs the two-term orbit (k even) and checks the log-form bound, the
/// parity claim, and the small-seed base case.
pub fn check_thm2(
    cache: &PhiCache,
    x1: u64,
    x2: u64,
    k: u64,
    guards: Guards,
) -> Result<Outcome<Thm2Report>, BoundsError> {
    if !k.is_multiple_of(2) {
        return Err(BoundsError::OddShift { k });
    }
    let spec = OrbitSpec::phi_sum(alloc::vec![x1, x2], k).with_guards(guards);
    let run = detect_cycle(cache, &spec)?;
    if run.terminated != Terminated::CycleFound {
        return Ok(Outcome::GuardHit(run));
    }
    let twice_x = 3 * x1 as u128 + 5 * x2 as u128 + 7 * k as u128;
    let (x_num, x_den) = if twice_x.is_multiple_of(2) {
        (twice_x / 2, 1)
    } else {
        (twice_x, 2)
    };
    let xf = twice_x as f64 / 2.0;
    let tower = libm::pow(3.0, (k + 1) as f64);
    let log2_bound = 2.0 * libm::pow(xf, tower);
    let log2_sup = libm::log2(run.sup_seen as f64);
    // cover the canonical prefix plus one further period, so every recurring
    // term is inspected at an index >= 4
    let len = (run.steps_used + run.period) as usize + 2 + 5;
    let t = trajectory(cache, &spec, len)?;
    let parity_ok = t.iter().skip(4).all(|&v| v % 2 == 0);
    let base_case_ok = if x1.max(x2) <= 2 && k == 0 {
        t.iter().skip(2).all(|&v| v == 2)
    } else {
        true
    };
    Ok(Outcome::Verdict(Thm2Report {
        x1,
        x2,
        k,
        x_num,
        x_den,
        log2_bound,
        sup_seen: run.sup_seen,
        log2_sup,
        parity_ok,
        base_case_ok,
        ok: log2_sup <= log2_bound,
        orbit: run,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Seed {
    pub seed: u64,
    pub cycle: Vec<u64>,
    pub cycle_max: u64,
    /// cycle_max <= cap.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Report {
    pub c: u64,
    /// max f(m) over m < c; the limsup cap every orbit must respect.
    pub cap: u64,
    /// f(n) < n verified for all n >= c: exhaustively up to probed_to and
    /// structurally above it (81 * digits < n holds once digits >= 4).
    pub decrease_ok: bool,
    pub probed_to: u64,
    pub seeds: Vec<Prop1Seed>,
    pub ok: bool,
}

fn digit_square(mut n: u64) -> u64 {
    let mut acc = 0;
    while n > 0 {
        acc += (n % 10) * (n % 10);
        n /= 10;
    }
    acc
}

/// Decreasing-map harness for the base-10 digit-square-sum example: verifies
/// the decrease condition at and above the threshold c, then checks that
/// every seed's eventual cycle stays under max{f(m) : m < c}.
pub fn run_prop1_harness(
    cache: &PhiCache,
    kind: OrbitKind,
    seeds: &[u64],
    c: u64,
) -> Result<Prop1Report, BoundsError> {
    if kind != OrbitKind::DigitSquareSum {
        return Err(BoundsError::UnsupportedKind);
    }
    let cap = (1..c).map(digit_square).max().unwrap_or(0);
    // probe every value with at most 3 digits; for d >= 4 digits,
    // f(n) <= 81 d < 10^(d-1) <= n, checked below for every d up to u64 range
    let probed_to = 999.max(c);
    let mut decrease_ok = (c..=probed_to).all(|n| digit_square(n) < n);
    for d in 4..=20u32 {
        if 81 * d as u64 >= 10u64.pow(d - 1) {
            decrease_ok = false;
        }
    }
    let mut out = Vec::with_capacity(seeds.len());
    let mut all_ok = decrease_ok;
    for &seed in seeds {
        let spec = OrbitSpec::new(OrbitKind::DigitSquareSum, alloc::vec![seed], 0);
        let run = detect_cycle(cache, &spec)?;
        let cycle_max = run.cycle.iter().copied().max().unwrap_or(0);
        let ok = run.terminated == Terminated::CycleFound && cycle_max <= cap;
        all_ok &= ok;
        out.push(Prop1Seed {
            seed,
            cycle: run.cycle,
            cycle_max,
            ok,
        });
    }
    Ok(Prop1Report {
        c,
        cap,
        decrease_ok,
        probed_to,
        seeds: out,
        ok: all_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    pub d: usize,
    /// Inclusive shift range.
    pub k_lo: u64,
    pub k_hi: u64,
    /// Inclusive seed range, applied to every seed position.
    pub seed_lo: u64,
    pub seed_hi: u64,
    pub guards: Guards,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub d: usize,
    pub k: u64,
    pub seeds: Vec<u64>,
    pub outcome: Result<ScanOrbit, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOrbit {
    pub preperiod: u64,
    pub period: u64,
    pub sup_seen: u64,
    pub steps_used: u64,
    pub terminated: Terminated,
    /// Sup-bound verdict where a theorem covers the family; None outside.
    pub bound_ok: Option<bool>,
    /// False for d = 2 with odd k: observation only.
    pub in_theorem: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanStats {
    pub records: u64,
    pub cycle_found: u64,
    pub guard_hits: u64,
    pub errors: u64,
    pub bound_failures: u64,
    pub max_sup: u64,
    pub period_hist: BTreeMap<u64, u64>,
    pub preperiod_hist: BTreeMap<u64, u64>,
}

impl ScanStats {
    pub fn absorb(&mut self, record: &ScanRecord) {
        self.records += 1;
        match &record.outcome {
            Ok(o) => {
                if o.terminated == Terminated::CycleFound {
                    self.cycle_found += 1;
                    *self.period_hist.entry(o.period).or_insert(0) += 1;
                    *self.preperiod_hist.entry(o.preperiod).or_insert(0) += 1;
                } else {
                    self.guard_hits += 1;
                }
                if o.bound_ok == Some(false) {
                    self.bound_failures += 1;
                }
                self.max_sup = self.max_sup.max(o.sup_seen);
            }
            Err(_) => self.errors += 1,
        }
    }
}

/// Runs every orbit of the configured family in deterministic order
/// (k ascending, then seeds lexicographically), feeding each record to the
/// sink and aggregating statistics. Per-orbit errors become records, not
/// campaign failures.
pub fn scan_campaign(
    cache: &PhiCache,
    config: &ScanConfig,
    mut sink: impl FnMut(&ScanRecord),
) -> Result<ScanStats, BoundsError> {
    if config.d != 1 && config.d != 2 {
        return Err(BoundsError::UnsupportedArity { d: config.d });
    }
    let mut stats = ScanStats::default();
    for (k, seeds) in scan_grid(config) {
        let record = scan_one(cache, config, k, seeds);
        stats.absorb(&record);
        sink(&record);
    }
    Ok(stats)
}

/// The scan's work items in emission order: k ascending, then seed tuples
/// lexicographically.
pub fn scan_grid(config: &ScanConfig) -> ScanGrid {
    ScanGrid {
        k: config.k_lo,
        k_hi: config.k_hi,
        seed_lo: config.seed_lo,
        seed_hi: config.seed_hi,
        seeds: alloc::vec![config.seed_lo; config.d],
        done: config.k_lo > config.k_hi || config.seed_lo > config.seed_hi || config.d == 0,
    }
}

#[derive(Debug, Clone)]
pub struct ScanGrid {
    k: u64,
    k_hi: u64,
    seed_lo: u64,
    seed_hi: u64,
    seeds: Vec<u64>,
    done: bool,
}

impl Iterator for ScanGrid {
    type Item = (u64, Vec<u64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = (self.k, self.seeds.clone());
        if !odometer(&mut self.seeds, self.seed_lo, self.seed_hi) {
            if self.k == self.k_hi {
                self.done = true;
            } else {
                self.k += 1;
                for s in self.seeds.iter_mut() {
                    *s = self.seed_lo;
                }
            }
        }
        Some(item)
    }
}

/// Lexicographic increment over the seed grid; false once every position has
/// wrapped.
fn odometer(seeds: &mut [u64], lo: u64, hi: u64) -> bool {
    for pos in (0..seeds.len()).rev() {
        if seeds[pos] < hi {
            seeds[pos] += 1;
            for s in seeds[pos + 1..].iter_mut() {
                *s = lo;
            }
            return true;
        }
    }
    false
}

/// A single scan work item, exactly as [`scan_campaign`] would run it.
pub fn scan_one(cache: &PhiCache, config: &ScanConfig, k: u64, seeds: Vec<u64>) -> ScanRecord {
    let spec = OrbitSpec::phi_sum(seeds.clone(), k).with_guards(config.guards);
    let outcome = match detect_cycle(cache, &spec) {
        Err(e) => Err(alloc::format!("{e}")),
        Ok(run) => {
            let in_theorem = config.d == 1 || k.is_multiple_of(2);
            let bound_ok = if run.terminated != Terminated::CycleFound || !in_theorem {
                None
            } else if config.d == 1 {
                Some(run.sup_seen as u128 <= thm1_bound(seeds[0], k))
            } else {
                let twice_x = 3 * seeds[0] as u128 + 5 * seeds[1] as u128 + 7 * k as u128;
                let tower = libm::pow(3.0, (k + 1) as f64);
                let log2_bound = 2.0 * libm::pow(twice_x as f64 / 2.0, tower);
                Some(libm::log2(run.sup_seen as f64) <= log2_bound)
            };
            Ok(ScanOrbit {
                preperiod: run.preperiod,
                period: run.period,
                sup_seen: run.sup_seen,
                steps_used: run.steps_used,
                terminated: run.terminated,
                bound_ok,
                in_theorem,
            })
        }
    };
    ScanRecord {
        d: config.d,
        k,
        seeds,
        outcome,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreRecord {
    pub q: u64,
    pub terminated: Terminated,
    pub preperiod: u64,
    pub period: u64,
    pub sup_seen: u64,
    pub steps_used: u64,
    /// The orbit sits at q forever: q = d phi(q) + k.
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreReport {
    pub d: usize,
    pub k: u64,
    pub records: Vec<ExploreRecord>,
    /// q values with constant orbits.
    pub constants: Vec<u64>,
    /// Constant-orbit q that are composite with phi(q) dividing q - 1 — an
    /// actual totient-divisibility counterexample, not just any composite
    /// constant (q = 6 is a composite constant for d = 3, k = 0 without
    /// being one).
    pub lehmer_flags: Vec<u64>,
    pub cycle_found: u64,
    pub guard_hits: u64,
}

/// Diagonal exploration of d >= 3 orbits seeded (q, ..., q): classifies each
/// as cycle-found or guard-hit and reports constant orbits.
pub fn explore_dterm(
    cache: &PhiCache,
    d: usize,
    k: u64,
    seed_lo: u64,
    seed_hi: u64,
    guards: Guards,
) -> Result<ExploreReport, BoundsError> {
    if d < 3 {
        return Err(BoundsError::UnsupportedArity { d });
    }
    let mut report = ExploreReport {
        d,
        k,
        records: Vec::new(),
        constants: Vec::new(),
        lehmer_flags: Vec::new(),
        cycle_found: 0,
        guard_hits: 0,
    };
    for q in seed_lo..=seed_hi {
        if q == 0 {
            continue;
        }
        let spec = OrbitSpec::phi_sum(alloc::vec![q; d], k).with_guards(guards);
        let run = detect_cycle(cache, &spec)?;
        let constant = run.terminated == Terminated::CycleFound
            && run.preperiod == 0
            && run.period == 1
            && run.cycle == [q];
        if run.terminated == Terminated::CycleFound {
            report.cycle_found += 1;
        } else {
            report.guard_hits += 1;
        }
        if constant {
            report.constants.push(q);
            let ph = cache.phi(q);
            if ph != q - 1 && q > 1 && (q - 1) % ph == 0 {
                report.lehmer_flags.push(q);
            }
        }
        report.records.push(ExploreRecord {
            q,
            terminated: run.terminated,
            preperiod: run.preperiod,
            period: run.period,
            sup_seen: run.sup_seen,
            steps_used: run.steps_used,
            constant,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache() -> PhiCache {
        PhiCache::new(100_000).unwrap()
    }

    #[test]
    fn thm1_examples() {
        let c = cache();
        let g = Guards::default();
        let r = check_thm1(&c, 10, 0, g).unwrap().verdict().unwrap();
        assert_eq!((r.sup_seen, r.bound), (10, 11));
        assert!(r.ok);
        let r = check_thm1(&c, 5, 1, g).unwrap().verdict().unwrap();
        assert_eq!((r.sup_seen, r.bound), (5, 9));
        assert!(r.ok);
        assert_eq!(r.orbit.preperiod, 0);
        let r = check_thm1(&c, 3, 2, g).unwrap().verdict().unwrap();
        assert_eq!((r.sup_seen, r.bound), (4, 25));
        assert!(r.ok && r.claim_failures.is_empty());
    }

    #[test]
    fn thm1_guard_is_a_nonverdict() {
        let c = cache();
        let g = Guards {
            max_steps: 2,
            max_value: 1 << 63,
        };
        match check_thm1(&c, 1000, 3, g).unwrap() {
            Outcome::GuardHit(r) => assert_eq!(r.terminated, Terminated::GuardMaxSteps),
            Outcome::Verdict(_) => panic!("expected a guard hit"),
        }
    }

    #[test]
    fn thm1_sweep_small() {
        let c = cache();
        let g = Guards::default();
        for k in 0..=6 {
            for x1 in 1..=3000 {
                let r = check_thm1(&c, x1, k, g).unwrap().verdict().unwrap();
                assert!(
                    r.ok,
                    "x1 = {x1}, k = {k}: sup {} > bound {}",
                    r.sup_seen, r.bound
                );
                assert!(r.claim_failures.is_empty(), "x1 = {x1}, k = {k}");
            }
        }
    }

    #[test]
    fn claim_check_direct() {
        // k = 2, threshold 16
        let orbit = [20, 21, 18, 30, 17, 40];
        let c = check_thm1_claim(&orbit, 2);
        assert_eq!(
            c.witnesses,
            alloc::vec![
                DropWitness { r: 0, i: 2 },
                DropWitness { r: 1, i: 1 },
                DropWitness { r: 2, i: 2 },
                DropWitness { r: 3, i: 1 },
            ]
        );
        // r = 4 and r = 5 run out of probe window before any drop
        assert_eq!(c.untested, alloc::vec![4, 5]);
        assert!(c.failures.is_empty());
        // windows that never drop are failures; truncated ones are untested
        let c = check_thm1_claim(&[16, 17, 18, 19, 20], 2);
        assert_eq!(c.failures, alloc::vec![0, 1, 2]);
        assert_eq!(c.untested, alloc::vec![3, 4]);
    }

    #[test]
    fn threshold_crossings() {
        // k = 2: threshold 16, crossings must land <= 18
        assert!(check_threshold_crossings(&[10, 17, 30, 12, 18, 30], 2).is_empty());
        assert_eq!(
            check_threshold_crossings(&[10, 19, 5, 17], 2),
            alloc::vec![1]
        );
    }

    #[test]
    fn thm2_examples() {
        let c = cache();
        let g = Guards::default();
        let r = check_thm2(&c, 1, 1, 0, g).unwrap().verdict().unwrap();
        assert!(r.ok && r.parity_ok && r.base_case_ok);
        assert_eq!((r.x_num, r.x_den), (4, 1));
        let r = check_thm2(&c, 3, 5, 0, g).unwrap().verdict().unwrap();
        assert!(r.ok && r.parity_ok && r.base_case_ok);
        assert_eq!((r.x_num, r.x_den), (17, 1));
        assert_eq!(r.sup_seen, 6);
        let r = check_thm2(&c, 2, 2, 2, g).unwrap().verdict().unwrap();
        assert!(r.ok && r.parity_ok);
        assert_eq!((r.x_num, r.x_den), (15, 1));
        assert_eq!(
            check_thm2(&c, 1, 1, 3, g),
            Err(BoundsError::OddShift { k: 3 })
        );
    }

    #[test]
    fn thm2_sweep_small() {
        let c = cache();
        let g = Guards::default();
        for k in [0u64, 2] {
            for x1 in 1..=200 {
                for x2 in 1..=200 {
                    let r = check_thm2(&c, x1, x2, k, g).unwrap().verdict().unwrap();
                    assert!(r.ok && r.parity_ok, "({x1}, {x2}, {k})");
                    assert!(r.base_case_ok, "({x1}, {x2}, {k})");
                }
            }
        }
    }

    #[test]
    fn prop1_harness() {
        let c = cache();
        let seeds: Vec<u64> = (1..=10_000).collect();
        let r = run_prop1_harness(&c, OrbitKind::DigitSquareSum, &seeds, 100).unwrap();
        assert!(r.decrease_ok);
        assert_eq!(r.cap, 162); // f(99)
        assert!(r.ok);
        let eight = [4u64, 16, 37, 58, 89, 145, 42, 20];
        for s in &r.seeds {
            assert!(s.cycle_max <= 162);
            // every orbit lands on 1 or the known 8-cycle
            if s.cycle != [1] {
                assert_eq!(s.cycle.len(), 8, "seed {}", s.seed);
                assert!(eight.contains(&s.cycle[0]));
            }
        }
        assert_eq!(r.seeds[0].cycle, [1]);
        assert_eq!(
            run_prop1_harness(&c, OrbitKind::PhiSum, &[1], 100),
            Err(BoundsError::UnsupportedKind)
        );
    }

    #[test]
    fn prop1_bad_threshold_reported() {
        let c = cache();
        // f(99) = 162 >= 99, so c = 90 cannot satisfy the decrease condition
        let r = run_prop1_harness(&c, OrbitKind::DigitSquareSum, &[4], 90).unwrap();
        assert!(!r.decrease_ok);
        assert!(!r.ok);
    }

    #[test]
    fn scan_single_term() {
        let c = cache();
        let config = ScanConfig {
            d: 1,
            k_lo: 0,
            k_hi: 0,
            seed_lo: 1,
            seed_hi: 10,
            guards: Guards::default(),
        };
        let mut records = Vec::new();
        let stats = scan_campaign(&c, &config, |r| records.push(r.clone())).unwrap();
        assert_eq!(stats.records, 10);
        assert_eq!(stats.cycle_found, 10);
        assert_eq!(stats.bound_failures, 0);
        assert_eq!(records.len(), 10);
        assert_eq!(records[0].seeds, [1]);
        assert_eq!(records[9].seeds, [10]);
        for r in &records {
            let o = r.outcome.as_ref().unwrap();
            assert_eq!(o.period, 1);
            assert_eq!(o.bound_ok, Some(true));
        }
        assert_eq!(stats.period_hist.get(&1), Some(&10));
    }

    #[test]
    fn scan_empty_range() {
        let c = cache();
        let config = ScanConfig {
            d: 1,
            k_lo: 0,
            k_hi: 3,
            seed_lo: 5,
            seed_hi: 4,
            guards: Guards::default(),
        };
        let stats = scan_campaign(&c, &config, |_| panic!("no records expected")).unwrap();
        assert_eq!(stats.records, 0);
    }

    #[test]
    fn scan_two_term_grid_order() {
        let c = cache();
        let config = ScanConfig {
            d: 2,
            k_lo: 0,
            k_hi: 1,
            seed_lo: 3,
            seed_hi: 5,
            guards: Guards::default(),
        };
        let mut records = Vec::new();
        let stats = scan_campaign(&c, &config, |r| records.push(r.clone())).unwrap();
        assert_eq!(stats.records, 18);
        assert_eq!(records[0].seeds, [3, 3]);
        assert_eq!(records[1].seeds, [3, 4]);
        assert_eq!(records[3].seeds, [4, 3]);
        assert_eq!(records[8].seeds, [5, 5]);
        assert_eq!(records[9].k, 1);
        // (3,5) at k = 0 has sup 6
        let r = &records[2];
        assert_eq!(r.seeds, [3, 5]);
        assert_eq!(r.outcome.as_ref().unwrap().sup_seen, 6);
        // odd k is outside the theorem: no verdict, labeled
        for r in &records[9..] {
            let o = r.outcome.as_ref().unwrap();
            assert!(!o.in_theorem);
            assert_eq!(o.bound_ok, None);
        }
    }

    #[test]
    fn explore_examples() {
        let c = cache();
        let g = Guards {
            max_steps: 2_000,
            max_value: 1 << 40,
        };
        assert_eq!(
            explore_dterm(&c, 2, 0, 1, 5, g),
            Err(BoundsError::UnsupportedArity { d: 2 })
        );
        // q = 6, d = 3, k = 0: 3 phi(6) = 6, a composite constant that is
        // not a divisibility counterexample
        let r = explore_dterm(&c, 3, 0, 2, 20, g).unwrap();
        assert!(r.constants.contains(&6));
        assert!(r.lehmer_flags.is_empty());
        // prime q: q = 3 phi(q) = 3(q-1) is impossible for q > 3
        for rec in &r.records {
            if rec.constant && crate::totient::is_prime(rec.q) {
                panic!("prime constant {}", rec.q);
            }
        }
        // d = 4, k = 0, seeds (1,1,1,1): 1,1,1,1,4,... runs to a cycle
        let r = explore_dterm(&c, 4, 0, 1, 1, g).unwrap();
        assert_eq!(r.records.len(), 1);
        let t = trajectory(
            &c,
            &OrbitSpec::phi_sum(alloc::vec![1, 1, 1, 1], 0).with_guards(g),
            5,
        )
        .unwrap();
        assert_eq!(t, alloc::vec![1, 1, 1, 1, 4]);
    }

    #[test]
    fn explore_growth_is_surfaced() {
        let c = cache();
        let g = Guards {
            max_steps: 50,
            max_value: 1 << 40,
        };
        // (2,2,2) with k = 1 grows past any small guard
        let r = explore_dterm(&c, 3, 1, 2, 2, g).unwrap();
        assert_eq!(r.guard_hits, 1);
        assert_eq!(r.records[0].terminated, Terminated::GuardMaxSteps);
        assert!(r.records[0].sup_seen > 1000);
    }
}
