//! Generic d-term recurrence evaluator with cycle detection on d-tuple
//! states.
//!
//! A trajectory is the scalar sequence t_0, t_1, ... where the first d terms
//! are the seeds and each later term is `f` applied to the previous d. The
//! state at index i is the window (t_i, ..., t_{i+d-1}); cycle structure
//! (preperiod, period) always refers to states, while `cycle` reports scalar
//! terms.

use crate::totient::PhiCache;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    /// x_{n+d} = phi(x_n) + ... + phi(x_{n+d-1}) + k.
    PhiSum,
    /// Sum of base-10 digit squares over the window, plus k. For d = 1,
    /// k = 0 this is the classical happy-number map.
    DigitSquareSum,
    /// max(window) + k; a probe whose orbits never descend, so it diverges
    /// for k >= 1 and parks at the largest seed for k = 0.
    MaxPlusC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    /// Largest number of generated terms before giving up.
    pub max_steps: u64,
    /// Largest tolerated term value; one above it ends the run.
    pub max_value: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_steps: 10_000_000,
            max_value: 1 << 63,
        }
    }
}

/// History cap for the naive detector, in stored states.
pub const DEFAULT_MAX_HISTORY: u64 = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSpec {
    pub d: usize,
    pub k: u64,
    pub kind: OrbitKind,
    pub seeds: Vec<u64>,
    pub guards: Guards,
}

impl OrbitSpec {
    pub fn new(kind: OrbitKind, seeds: Vec<u64>, k: u64) -> Self {
        OrbitSpec {
            d: seeds.len(),
            k,
            kind,
            seeds,
            guards: Guards::default(),
        }
    }

    pub fn phi_sum(seeds: Vec<u64>, k: u64) -> Self {
        Self::new(OrbitKind::PhiSum, seeds, k)
    }

    pub fn with_guards(mut self, guards: Guards) -> Self {
        self.guards = guards;
        self
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        if self.d == 0 {
            return Err(OrbitError::ZeroArity);
        }
        if self.seeds.len() != self.d {
            return Err(OrbitError::SeedCount {
                expected: self.d,
                got: self.seeds.len(),
            });
        }
        if self.seeds.contains(&0) {
            return Err(OrbitError::ZeroSeed);
        }
        if self.guards.max_steps == 0 || self.guards.max_value == 0 {
            return Err(OrbitError::ZeroGuard);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminated {
    CycleFound,
    GuardMaxSteps,
    GuardMaxValue,
    /// Naive detector ran out of history budget before the walk guards hit.
    GuardMaxHistory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitResult {
    /// Index of the first state on the cycle.
    pub preperiod: u64,
    /// Minimal state period; 0 on guard outcomes.
    pub period: u64,
    /// One full period of scalar terms starting at term index `preperiod`.
    pub cycle: Vec<u64>,
    /// Max over every term generated, seeds included.
    pub sup_seen: u64,
    /// Terms generated past the seeds: preperiod + period on cycle-found,
    /// the exploration count on guard outcomes.
    pub steps_used: u64,
    pub terminated: Terminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitError {
    ZeroArity,
    SeedCount {
        expected: usize,
        got: usize,
    },
    ZeroSeed,
    ZeroGuard,
    /// A term left the 64-bit range; never wrapped silently.
    ValueOverflow,
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrbitError::ZeroArity => write!(f, "arity d must be at least 1"),
            OrbitError::SeedCount { expected, got } => {
                write!(f, "expected {expected} seeds, got {got}")
            }
            OrbitError::ZeroSeed => write!(f, "seeds must be positive"),
            OrbitError::ZeroGuard => write!(f, "guards must be positive"),
            OrbitError::ValueOverflow => {
                write!(f, "recurrence term exceeded the 64-bit range")
            }
        }
    }
}

impl core::error::Error for OrbitError {}

fn digit_square_sum(mut n: u64) -> u64 {
    let mut acc = 0;
    while n > 0 {
        let d = n % 10;
        acc += d * d;
        n /= 10;
    }
    acc
}

/// One application of f to a full window. Checked: overflow is an error.
pub fn step(cache: &PhiCache, window: &[u64], spec: &OrbitSpec) -> Result<u64, OrbitError> {
    if window.len() != spec.d {
        return Err(OrbitError::SeedCount {
            expected: spec.d,
            got: window.len(),
        });
    }
    let mut acc = spec.k as u128;
    match spec.kind {
        OrbitKind::PhiSum => {
            for &w in window {
                acc += cache.phi(w) as u128;
            }
        }
        OrbitKind::DigitSquareSum => {
            for &w in window {
                acc += digit_square_sum(w) as u128;
            }
        }
        OrbitKind::MaxPlusC => {
            acc += *window.iter().max().expect("window is non-empty") as u128;
        }
    }
    u64::try_from(acc).map_err(|_| OrbitError::ValueOverflow)
}

struct Walker<'a> {
    cache: &'a PhiCache,
    spec: &'a OrbitSpec,
    window: Vec<u64>,
}

impl<'a> Walker<'a> {
    fn new(cache: &'a PhiCache, spec: &'a OrbitSpec) -> Self {
        Walker {
            cache,
            spec,
            window: spec.seeds.clone(),
        }
    }

    fn advance(&mut self) -> Result<u64, OrbitError> {
        let t = step(self.cache, &self.window, self.spec)?;
        self.window.rotate_left(1);
        *self.window.last_mut().expect("window is non-empty") = t;
        Ok(t)
    }
}

/// First `terms` scalar terms of the trajectory (seeds included). `terms` may
/// be smaller than d, truncating the seeds.
pub fn trajectory(
    cache: &PhiCache,
    spec: &OrbitSpec,
    terms: usize,
) -> Result<Vec<u64>, OrbitError> {
    spec.validate()?;
    let mut out = Vec::with_capacity(terms);
    out.extend_from_slice(&spec.seeds[..spec.d.min(terms)]);
    let mut w = Walker::new(cache, spec);
    while out.len() < terms {
        out.push(w.advance()?);
    }
    Ok(out)
}

fn guard_result(terminated: Terminated, sup: u64, steps: u64) -> OrbitResult {
    OrbitResult {
        preperiod: 0,
        period: 0,
        cycle: Vec::new(),
        sup_seen: sup,
        steps_used: steps,
        terminated,
    }
}

/// Replays the trajectory to produce the canonical cycle-found result, so
/// every detector reports identical numbers: steps_used = preperiod + period,
/// sup over the seeds, the preperiod, and one full period.
fn canonical_result(
    cache: &PhiCache,
    spec: &OrbitSpec,
    mu: u64,
    lam: u64,
) -> Result<OrbitResult, OrbitError> {
    let d = spec.d as u64;
    let mut sup = *spec.seeds.iter().max().expect("seeds are non-empty");
    let mut cycle = Vec::with_capacity(lam as usize);
    for idx in mu..(mu + lam).min(d) {
        cycle.push(spec.seeds[idx as usize]);
    }
    let mut w = Walker::new(cache, spec);
    for j in 0..mu + lam {
        let t = w.advance()?;
        sup = sup.max(t);
        let idx = d + j;
        if idx >= mu && idx < mu + lam {
            cycle.push(t);
        }
    }
    Ok(OrbitResult {
        preperiod: mu,
        period: lam,
        cycle,
        sup_seen: sup,
        steps_used: mu + lam,
        terminated: Terminated::CycleFound,
    })
}

/// After a raw candidate (anchor on the cycle, valid period lam): shrink lam
/// to the minimal period, then recompute the minimal mu for it. Exact window
/// comparisons only.
fn minimize(
    cache: &PhiCache,
    spec: &OrbitSpec,
    anchor: u64,
    lam: u64,
) -> Result<(u64, u64), OrbitError> {
    let mut at = Walker::new(cache, spec);
    for _ in 0..anchor {
        at.advance()?;
    }
    // the minimal period divides lam; strip prime factors while the shorter
    // period still closes
    let mut lam = lam;
    let mut rem = lam;
    let mut primes = Vec::new();
    let mut p = 2;
    while p * p <= rem {
        if rem.is_multiple_of(p) {
            primes.push(p);
            while rem.is_multiple_of(p) {
                rem /= p;
            }
        }
        p += 1;
    }
    if rem > 1 {
        primes.push(rem);
    }
    for &p in &primes {
        while lam.is_multiple_of(p) {
            let cand = lam / p;
            let mut probe = Walker {
                cache,
                spec,
                window: at.window.clone(),
            };
            for _ in 0..cand {
                probe.advance()?;
            }
            if probe.window == at.window {
                lam = cand;
            } else {
                break;
            }
        }
    }
    // minimal mu: two walkers lam apart, advance until they meet
    let mut tortoise = Walker::new(cache, spec);
    let mut hare = Walker::new(cache, spec);
    for _ in 0..lam {
        hare.advance()?;
    }
    let mut mu = 0;
    while tortoise.window != hare.window {
        tortoise.advance()?;
        hare.advance()?;
        mu += 1;
    }
    Ok((mu, lam))
}

/// Brent cycle search on states, then an exact minimization pass. Guard
/// outcomes are ordinary returns carrying the partial sup.
pub fn detect_cycle(cache: &PhiCache, spec: &OrbitSpec) -> Result<OrbitResult, OrbitError> {
    spec.validate()?;
    let Guards {
        max_steps,
        max_value,
    } = spec.guards;
    let mut sup = *spec.seeds.iter().max().expect("seeds are non-empty");
    let mut steps: u64 = 0;
    let mut hare = Walker::new(cache, spec);
    let mut tortoise_window = hare.window.clone();
    let mut power: u64 = 1;
    let mut lam: u64 = 0;
    loop {
        if steps == max_steps {
            return Ok(guard_result(Terminated::GuardMaxSteps, sup, steps));
        }
        let t = hare.advance()?;
        steps += 1;
        sup = sup.max(t);
        if t > max_value {
            return Ok(guard_result(Terminated::GuardMaxValue, sup, steps));
        }
        lam += 1;
        if hare.window == tortoise_window {
            break;
        }
        if power == lam {
            tortoise_window.clone_from(&hare.window);
            power *= 2;
            lam = 0;
        }
    }
    // upper bound for mu: the tortoise anchor sits at most steps - lam in
    let (mu, lam) = minimize(cache, spec, steps - lam, lam)?;
    canonical_result(cache, spec, mu, lam)
}

/// History-map detector: stores every visited state, reports the first
/// revisit. Oracle for [`detect_cycle`]; agrees bit-for-bit on cycle-found.
pub fn detect_cycle_naive(cache: &PhiCache, spec: &OrbitSpec) -> Result<OrbitResult, OrbitError> {
    detect_cycle_naive_with_history(cache, spec, DEFAULT_MAX_HISTORY)
}

pub fn detect_cycle_naive_with_history(
    cache: &PhiCache,
    spec: &OrbitSpec,
    max_history: u64,
) -> Result<OrbitResult, OrbitError> {
    spec.validate()?;
    let Guards {
        max_steps,
        max_value,
    } = spec.guards;
    let mut seen = alloc::collections::BTreeMap::new();
    let mut sup = *spec.seeds.iter().max().expect("seeds are non-empty");
    let mut steps: u64 = 0;
    let mut idx: u64 = 0;
    let mut w = Walker::new(cache, spec);
    loop {
        if let Some(&first) = seen.get(&w.window) {
            // first collision in an exhaustive history: (first, idx - first)
            // is already the minimal (preperiod, period), independent of the
            // Brent path
            return canonical_result(cache, spec, first, idx - first);
        }
        if seen.len() as u64 == max_history {
            return Ok(guard_result(Terminated::GuardMaxHistory, sup, steps));
        }
        seen.insert(w.window.clone(), idx);
        if steps == max_steps {
            return Ok(guard_result(Terminated::GuardMaxSteps, sup, steps));
        }
        let t = w.advance()?;
        steps += 1;
        sup = sup.max(t);
        if t > max_value {
            return Ok(guard_result(Terminated::GuardMaxValue, sup, steps));
        }
        idx += 1;
    }
}
