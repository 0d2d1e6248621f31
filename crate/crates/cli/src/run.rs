//! Command dispatch. Every command streams versioned records to the writer;
//! the returned status distinguishes "all verdicts reached" from "a guard
//! preempted at least one verdict", which the binary maps to exit codes.

use crate::checkpoint::{self, Checkpoint};
use crate::config::{config_hash, OutputFormat, ResolvedCommand, ResolvedConfig};
use crate::pool::map_ordered;
use crate::records as rec;
use crate::CliError;
use anyhow::Context;
use std::io::Write;
use torbit_core::bounds;
use torbit_core::mertens;
use torbit_core::orbit::{self, OrbitKind, OrbitSpec, Terminated};
use torbit_core::totient::{self, PhiCache};

pub struct RunStatus {
    /// At least one record carries a guard outcome instead of a verdict.
    pub guard_present: bool,
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Sieve table size heuristic per command, capped by the configured limit;
/// values past the table fall back to direct factorization.
fn sieve_limit(cmd: &ResolvedCommand, cap: u64) -> u64 {
    let wanted = match cmd {
        ResolvedCommand::Orbit {
            seeds,
            k,
            kind: OrbitKind::PhiSum,
            ..
        } => seeds
            .iter()
            .copied()
            .max()
            .unwrap_or(1)
            .saturating_mul(4)
            .saturating_add((k + 1).saturating_mul(k + 1))
            .saturating_add(64),
        ResolvedCommand::Chain { start } => *start,
        ResolvedCommand::Scan { scan, .. } => {
            if scan.d == 1 {
                thm1_need(scan.seed_hi, scan.k_hi)
            } else {
                scan.seed_hi
                    .saturating_mul(2)
                    .saturating_add(scan.k_hi)
                    .saturating_mul(4)
                    .saturating_add(64)
            }
        }
        ResolvedCommand::Thm1 { x1, k, .. } => thm1_need(*x1, *k),
        ResolvedCommand::Thm2 { x1, x2, k, .. } => x1
            .saturating_add(*x2)
            .saturating_add(*k)
            .saturating_mul(4)
            .saturating_add(64),
        ResolvedCommand::Explore { d, k, seed_hi, .. } => seed_hi
            .saturating_mul(*d as u64 + 1)
            .saturating_add(*k)
            .saturating_add(64),
        ResolvedCommand::Lehmer { limit } => *limit,
        _ => 2,
    };
    wanted.clamp(2, cap)
}

fn thm1_need(x1: u64, k: u64) -> u64 {
    let b = (x1 as u128).max((k as u128).pow(4)) + (k as u128 + 1).pow(2);
    u64::try_from(b).unwrap_or(u64::MAX)
}

fn build_cache(cmd: &ResolvedCommand, cap: u64) -> Result<PhiCache, CliError> {
    let limit = sieve_limit(cmd, cap);
    Ok(PhiCache::from_table(
        totient::phi_sieve_with_cap(limit, cap).map_err(input)?,
    ))
}

struct Emitter<'a> {
    w: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn line(&mut self, r: &rec::Record) -> Result<(), CliError> {
        writeln!(self.w, "{}", r.to_line()).context("writing record")?;
        Ok(())
    }

    fn flush(&mut self) -> Result<(), CliError> {
        self.w.flush().context("flushing output")?;
        Ok(())
    }
}

pub fn run(cfg: &ResolvedConfig, w: &mut dyn Write) -> Result<RunStatus, CliError> {
    let mut out = Emitter { w };
    match &cfg.command {
        ResolvedCommand::Orbit {
            d,
            k,
            kind,
            seeds,
            guards,
        } => {
            if *d != seeds.len() {
                return Err(CliError::Input(format!(
                    "orbit: d = {d} but {} seeds were given",
                    seeds.len()
                )));
            }
            let cache = build_cache(&cfg.command, cfg.sieve_cap)?;
            let spec = OrbitSpec::new(*kind, seeds.clone(), *k).with_guards(*guards);
            let run = orbit::detect_cycle(&cache, &spec).map_err(input)?;
            out.line(&rec::Record::Orbit(rec::OrbitRecord {
                version: rec::RECORD_VERSION.into(),
                d: *d,
                k: *k,
                kind: (*kind).into(),
                seeds: seeds.clone(),
                result: (&run).into(),
            }))?;
            Ok(RunStatus {
                guard_present: run.terminated != Terminated::CycleFound,
            })
        }
        ResolvedCommand::Chain { start } => {
            let chain = totient::phi_chain(*start).map_err(input)?;
            let (lower, upper) = totient::pillai_bounds(*start);
            out.line(&rec::Record::Chain(rec::ChainRecord {
                version: rec::RECORD_VERSION.into(),
                start: *start,
                length: chain.pillai_n,
                iterations: chain.iterations(),
                lower,
                upper,
                chain: chain.chain.clone(),
            }))?;
            Ok(RunStatus {
                guard_present: false,
            })
        }
        ResolvedCommand::Scan { scan, max_records } => run_scan(cfg, scan, *max_records, out),
        ResolvedCommand::Thm1 { x1, k, guards } => {
            let cache = build_cache(&cfg.command, cfg.sieve_cap)?;
            let outcome = bounds::check_thm1(&cache, *x1, *k, *guards).map_err(input)?;
            out.line(&rec::Record::Thm1(rec::Thm1Record::from_outcome(
                *x1, *k, &outcome,
            )))?;
            Ok(RunStatus {
                guard_present: matches!(outcome, bounds::Outcome::GuardHit(_)),
            })
        }
        ResolvedCommand::Thm2 { x1, x2, k, guards } => {
            let cache = build_cache(&cfg.command, cfg.sieve_cap)?;
            let outcome = bounds::check_thm2(&cache, *x1, *x2, *k, *guards).map_err(input)?;
            out.line(&rec::Record::Thm2(rec::Thm2Record::from_outcome(
                *x1, *x2, *k, &outcome,
            )))?;
            Ok(RunStatus {
                guard_present: matches!(outcome, bounds::Outcome::GuardHit(_)),
            })
        }
        ResolvedCommand::Prop1 { c, seed_limit } => {
            let cache = build_cache(&cfg.command, cfg.sieve_cap)?;
            let seeds: Vec<u64> = (1..=*seed_limit).collect();
            let report = bounds::run_prop1_harness(&cache, OrbitKind::DigitSquareSum, &seeds, *c)
                .map_err(input)?;
            for s in &report.seeds {
                out.line(&rec::Record::Prop1Seed(s.into()))?;
            }
            out.line(&rec::Record::Prop1(rec::Prop1Record {
                version: rec::RECORD_VERSION.into(),
                c: report.c,
                cap: report.cap,
                decrease_ok: report.decrease_ok,
                probed_to: report.probed_to,
                seeds_checked: report.seeds.len() as u64,
                ok: report.ok,
            }))?;
            Ok(RunStatus {
                guard_present: false,
            })
        }
        ResolvedCommand::MertensSingle { x } => {
            let e = mertens::mertens_product(*x).map_err(mertens_err)?;
            out.line(&rec::Record::Mertens((&e).into()))?;
            Ok(RunStatus {
                guard_present: false,
            })
        }
        ResolvedCommand::MertensSweep {
            lo,
            hi,
            log_samples,
            log_hi,
        } => {
            let mut points: Vec<u64> = (*lo..=*hi).collect();
            points.extend(log_spaced(*hi, *log_hi, *log_samples));
            points.sort_unstable();
            points.dedup();
            let mut lines = Vec::new();
            mertens::mertens_sweep(&points, |e| {
                lines.push(rec::Record::Mertens(e.into()));
            })
            .map_err(mertens_err)?;
            for l in &lines {
                out.line(l)?;
            }
            Ok(RunStatus {
                guard_present: false,
            })
        }
        ResolvedCommand::Corollary { lo, hi } => {
            if lo == hi {
                let c = mertens::check_corollary(*lo).map_err(mertens_err)?;
                out.line(&rec::Record::Corollary((&c).into()))?;
                Ok(RunStatus {
                    guard_present: false,
                })
            } else {
                let sweep = mertens::corollary_sweep(*lo, *hi).map_err(mertens_err)?;
                for &(x, ok) in &sweep {
                    out.line(&rec::Record::Corollary(rec::CorollaryRecord {
                        version: rec::RECORD_VERSION.into(),
                        x,
                        product_num: None,
                        product_den: None,
                        ok,
                    }))?;
                }
                Ok(RunStatus {
                    guard_present: false,
                })
            }
        }
        ResolvedCommand::CrtWitness { x, k, budget } => {
            let witness =
                mertens::build_crt_witness_with_budget(*x, *k, *budget).map_err(mertens_err)?;
            let verify = mertens::verify_crt_witness(&witness).map_err(mertens_err)?;
            let drop = mertens::verify_phi_drop(&witness);
            out.line(&rec::Record::CrtWitness(rec::CrtWitnessRecord::new(
                &witness, &verify, &drop,
            )))?;
            Ok(RunStatus {
                guard_present: matches!(drop.outcome, mertens::PhiDropOutcome::Unverified { .. }),
            })
        }
        ResolvedCommand::Lehmer { limit } => {
            let hits = totient::lehmer_scan_with_cap(*limit, cfg.sieve_cap).map_err(input)?;
            for h in &hits {
                out.line(&rec::Record::LehmerHit(rec::LehmerHitRecord {
                    version: rec::RECORD_VERSION.into(),
                    q: h.q,
                    r: h.r,
                }))?;
            }
            out.line(&rec::Record::Lehmer(rec::LehmerRecord {
                version: rec::RECORD_VERSION.into(),
                limit: *limit,
                hits: hits.len() as u64,
            }))?;
            Ok(RunStatus {
                guard_present: false,
            })
        }
        ResolvedCommand::Explore {
            d,
            k,
            seed_lo,
            seed_hi,
            guards,
        } => {
            let cache = build_cache(&cfg.command, cfg.sieve_cap)?;
            let report = bounds::explore_dterm(&cache, *d, *k, *seed_lo, *seed_hi, *guards)
                .map_err(input)?;
            for r in &report.records {
                out.line(&rec::Record::Explore(rec::ExploreRecordLine {
                    version: rec::RECORD_VERSION.into(),
                    d: *d,
                    k: *k,
                    q: r.q,
                    preperiod: r.preperiod,
                    period: r.period,
                    sup_seen: r.sup_seen,
                    steps_used: r.steps_used,
                    terminated: r.terminated.into(),
                    constant: r.constant,
                }))?;
            }
            out.line(&rec::Record::ExploreSummary(rec::ExploreSummaryRecord {
                version: rec::RECORD_VERSION.into(),
                d: *d,
                k: *k,
                records: report.records.len() as u64,
                constants: report.constants.clone(),
                lehmer_flags: report.lehmer_flags.clone(),
                cycle_found: report.cycle_found,
                guard_hits: report.guard_hits,
            }))?;
            Ok(RunStatus {
                guard_present: report.guard_hits > 0,
            })
        }
    }
}

fn mertens_err(e: mertens::MertensError) -> CliError {
    match e {
        mertens::MertensError::Internal(msg) => {
            CliError::Internal(anyhow::anyhow!("mertens invariant: {msg}"))
        }
        other => CliError::Input(other.to_string()),
    }
}

/// n points from lo to hi with logarithmically even spacing, rounded to
/// integers; duplicates are the caller's to remove.
fn log_spaced(lo: u64, hi: u64, n: u64) -> Vec<u64> {
    if n == 0 || hi <= lo {
        return Vec::new();
    }
    if n == 1 {
        return vec![hi];
    }
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (llo + t * (lhi - llo)).exp().round() as u64
        })
        .collect()
}

fn run_scan(
    cfg: &ResolvedConfig,
    scan: &bounds::ScanConfig,
    max_records: Option<u64>,
    mut out: Emitter<'_>,
) -> Result<RunStatus, CliError> {
    if scan.d != 1 && scan.d != 2 {
        return Err(CliError::Input(format!(
            "scan: d = {} is outside the supported arities 1 and 2",
            scan.d
        )));
    }
    let cache = build_cache(&cfg.command, cfg.sieve_cap)?;
    let hash = config_hash(cfg);
    let mut skip = 0u64;
    let mut stats = bounds::ScanStats::default();
    if let Some(path) = &cfg.checkpoint {
        if let Some(cp) = checkpoint::load(path)? {
            if cp.config_hash != hash {
                return Err(CliError::Input(format!(
                    "checkpoint {} was produced by a different configuration; refusing to resume",
                    path.display()
                )));
            }
            if cp.finished {
                // the scan already completed; nothing is left to emit
                return Ok(RunStatus {
                    guard_present: cp.stats.guard_hits > 0,
                });
            }
            skip = cp.completed;
            stats = (&cp.stats).into();
        }
    }
    let json = cfg.output == OutputFormat::JsonLines;
    let mut grid = bounds::scan_grid(scan).skip(skip as usize);
    let mut emitted = 0u64;
    const BATCH: usize = 1024;
    loop {
        let room = match max_records {
            Some(m) => (m.saturating_sub(emitted)) as usize,
            None => BATCH,
        };
        let take = room.min(BATCH);
        if take == 0 {
            break;
        }
        let batch: Vec<(u64, Vec<u64>)> = grid.by_ref().take(take).collect();
        if batch.is_empty() {
            break;
        }
        let records = map_ordered(&batch, cfg.workers, |(k, seeds)| {
            bounds::scan_one(&cache, scan, *k, seeds.clone())
        });
        for r in &records {
            stats.absorb(r);
            if json {
                out.line(&rec::Record::Scan(r.into()))?;
            }
        }
        emitted += records.len() as u64;
        if let Some(path) = &cfg.checkpoint {
            out.flush()?;
            checkpoint::save(
                path,
                &Checkpoint {
                    version: rec::RECORD_VERSION.into(),
                    config_hash: hash.clone(),
                    completed: skip + emitted,
                    finished: false,
                    stats: (&stats).into(),
                },
            )?;
        }
    }
    let complete = grid.next().is_none();
    if complete {
        if json {
            out.line(&rec::Record::ScanStats(rec::ScanStatsRecord {
                version: rec::RECORD_VERSION.into(),
                stats: (&stats).into(),
            }))?;
        } else {
            write_csv_stats(&mut out, &stats)?;
        }
        if let Some(path) = &cfg.checkpoint {
            out.flush()?;
            checkpoint::save(
                path,
                &Checkpoint {
                    version: rec::RECORD_VERSION.into(),
                    config_hash: hash.clone(),
                    completed: skip + emitted,
                    finished: true,
                    stats: (&stats).into(),
                },
            )?;
        }
    }
    Ok(RunStatus {
        guard_present: stats.guard_hits > 0,
    })
}

fn write_csv_stats(out: &mut Emitter<'_>, stats: &bounds::ScanStats) -> Result<(), CliError> {
    let mut body = String::from("metric,value\n");
    body.push_str(&format!("records,{}\n", stats.records));
    body.push_str(&format!("cycle_found,{}\n", stats.cycle_found));
    body.push_str(&format!("guard_hits,{}\n", stats.guard_hits));
    body.push_str(&format!("errors,{}\n", stats.errors));
    body.push_str(&format!("bound_failures,{}\n", stats.bound_failures));
    body.push_str(&format!("max_sup,{}\n", stats.max_sup));
    for (p, c) in &stats.period_hist {
        body.push_str(&format!("period_hist_{p},{c}\n"));
    }
    for (p, c) in &stats.preperiod_hist {
        body.push_str(&format!("preperiod_hist_{p},{c}\n"));
    }
    out.w.write_all(body.as_bytes()).context("writing csv")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_spacing() {
        assert!(log_spaced(10, 10, 5).is_empty());
        assert!(log_spaced(10, 100, 0).is_empty());
        let pts = log_spaced(10_000, 1_000_000, 20);
        assert_eq!(pts.len(), 20);
        assert_eq!(pts[0], 10_000);
        assert_eq!(pts[19], 1_000_000);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sieve_limits_are_sane() {
        let cmd = ResolvedCommand::Thm1 {
            x1: 100_000,
            k: 20,
            guards: Default::default(),
        };
        let lim = sieve_limit(&cmd, 1 << 26);
        assert_eq!(lim, 160_441);
        assert_eq!(sieve_limit(&cmd, 1000), 1000);
        let cmd = ResolvedCommand::Lehmer { limit: 1_000_000 };
        assert_eq!(sieve_limit(&cmd, 1 << 26), 1_000_000);
    }
}
