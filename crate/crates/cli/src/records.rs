//! Output record types. One JSON object per line, tagged by `record_type`,
//! versioned, and round-trippable: arbitrary-precision integers travel as
//! decimal strings, floats that may be infinite travel as strings formatted
//! by Rust's shortest round-trip repr. Field order in the serialized output
//! matches declaration order here; docs/record-schema.md is the published
//! companion document.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use torbit_core::bounds;
use torbit_core::mertens;
use torbit_core::orbit;

pub const RECORD_VERSION: &str = "1";

fn version() -> String {
    RECORD_VERSION.to_string()
}

/// f64 carried as a string so that infinity survives JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatStr(pub f64);

impl Serialize for FloatStr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:?}", self.0))
    }
}

impl<'de> Deserialize<'de> for FloatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse::<f64>()
            .map(FloatStr)
            .map_err(serde::de::Error::custom)
    }
}

mod big {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        BigUint::parse_bytes(raw.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom("not a decimal integer"))
    }
}

mod bigs {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for item in v {
            seq.serialize_element(&item.to_str_radix(10))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.into_iter()
            .map(|s| {
                BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| serde::de::Error::custom("not a decimal integer"))
            })
            .collect()
    }
}

mod u128_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<u128>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u128>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(raw) => raw
                .parse::<u128>()
                .map(Some)
                .map_err(serde::de::Error::custom),
            None => Ok(None),
        }
    }
}

mod big_opt {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(raw) => BigUint::parse_bytes(raw.as_bytes(), 10)
                .map(Some)
                .ok_or_else(|| serde::de::Error::custom("not a decimal integer")),
            None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminatedTag {
    CycleFound,
    GuardMaxSteps,
    GuardMaxValue,
    GuardMaxHistory,
}

impl From<orbit::Terminated> for TerminatedTag {
    fn from(t: orbit::Terminated) -> Self {
        match t {
            orbit::Terminated::CycleFound => TerminatedTag::CycleFound,
            orbit::Terminated::GuardMaxSteps => TerminatedTag::GuardMaxSteps,
            orbit::Terminated::GuardMaxValue => TerminatedTag::GuardMaxValue,
            orbit::Terminated::GuardMaxHistory => TerminatedTag::GuardMaxHistory,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindTag {
    PhiSum,
    DigitSquareSum,
    MaxPlusC,
}

impl From<orbit::OrbitKind> for KindTag {
    fn from(k: orbit::OrbitKind) -> Self {
        match k {
            orbit::OrbitKind::PhiSum => KindTag::PhiSum,
            orbit::OrbitKind::DigitSquareSum => KindTag::DigitSquareSum,
            orbit::OrbitKind::MaxPlusC => KindTag::MaxPlusC,
        }
    }
}

impl From<KindTag> for orbit::OrbitKind {
    fn from(k: KindTag) -> Self {
        match k {
            KindTag::PhiSum => orbit::OrbitKind::PhiSum,
            KindTag::DigitSquareSum => orbit::OrbitKind::DigitSquareSum,
            KindTag::MaxPlusC => orbit::OrbitKind::MaxPlusC,
        }
    }
}

/// Cycle-detection outcome common to several records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPart {
    pub preperiod: u64,
    pub period: u64,
    pub cycle: Vec<u64>,
    pub sup_seen: u64,
    pub steps_used: u64,
    pub terminated: TerminatedTag,
}

impl From<&orbit::OrbitResult> for OrbitPart {
    fn from(r: &orbit::OrbitResult) -> Self {
        OrbitPart {
            preperiod: r.preperiod,
            period: r.period,
            cycle: r.cycle.clone(),
            sup_seen: r.sup_seen,
            steps_used: r.steps_used,
            terminated: r.terminated.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(default = "version")]
    pub version: String,
    pub d: usize,
    pub k: u64,
    pub kind: KindTag,
    pub seeds: Vec<u64>,
    #[serde(flatten)]
    pub result: OrbitPart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    #[serde(default = "version")]
    pub version: String,
    pub start: u64,
    /// 1-based index of the first 1 in the chain.
    pub length: u64,
    /// Number of phi applications to reach 1; the quantity the log bounds
    /// bracket.
    pub iterations: u64,
    pub lower: u64,
    pub upper: u64,
    pub chain: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    #[serde(default = "version")]
    pub version: String,
    pub d: usize,
    pub k: u64,
    pub seeds: Vec<u64>,
    /// Exactly one of `ok` / `error` is present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ok: Option<ScanOrbitPart>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOrbitPart {
    pub preperiod: u64,
    pub period: u64,
    pub sup_seen: u64,
    pub steps_used: u64,
    pub terminated: TerminatedTag,
    pub bound_ok: Option<bool>,
    pub in_theorem: bool,
}

impl From<&bounds::ScanRecord> for ScanRecord {
    fn from(r: &bounds::ScanRecord) -> Self {
        let (ok, error) = match &r.outcome {
            Ok(o) => (
                Some(ScanOrbitPart {
                    preperiod: o.preperiod,
                    period: o.period,
                    sup_seen: o.sup_seen,
                    steps_used: o.steps_used,
                    terminated: o.terminated.into(),
                    bound_ok: o.bound_ok,
                    in_theorem: o.in_theorem,
                }),
                None,
            ),
            Err(e) => (None, Some(e.clone())),
        };
        ScanRecord {
            version: version(),
            d: r.d,
            k: r.k,
            seeds: r.seeds.clone(),
            ok,
            error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ScanStatsPart {
    pub records: u64,
    pub cycle_found: u64,
    pub guard_hits: u64,
    pub errors: u64,
    pub bound_failures: u64,
    pub max_sup: u64,
    pub period_hist: Vec<(u64, u64)>,
    pub preperiod_hist: Vec<(u64, u64)>,
}

impl From<&bounds::ScanStats> for ScanStatsPart {
    fn from(s: &bounds::ScanStats) -> Self {
        ScanStatsPart {
            records: s.records,
            cycle_found: s.cycle_found,
            guard_hits: s.guard_hits,
            errors: s.errors,
            bound_failures: s.bound_failures,
            max_sup: s.max_sup,
            period_hist: s.period_hist.iter().map(|(&a, &b)| (a, b)).collect(),
            preperiod_hist: s.preperiod_hist.iter().map(|(&a, &b)| (a, b)).collect(),
        }
    }
}

impl From<&ScanStatsPart> for bounds::ScanStats {
    fn from(s: &ScanStatsPart) -> Self {
        bounds::ScanStats {
            records: s.records,
            cycle_found: s.cycle_found,
            guard_hits: s.guard_hits,
            errors: s.errors,
            bound_failures: s.bound_failures,
            max_sup: s.max_sup,
            period_hist: s.period_hist.iter().copied().collect(),
            preperiod_hist: s.preperiod_hist.iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanStatsRecord {
    #[serde(default = "version")]
    pub version: String,
    #[serde(flatten)]
    pub stats: ScanStatsPart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm1Record {
    #[serde(default = "version")]
    pub version: String,
    pub x1: u64,
    pub k: u64,
    /// "ok" when a cycle was found, "guard" when a guard preempted the
    /// verdict; bound fields are absent on guard outcomes.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim_drops: Option<Vec<(u64, u64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim_untested: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim_failures: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ok: Option<bool>,
    pub orbit: OrbitPart,
}

impl Thm1Record {
    pub fn from_outcome(x1: u64, k: u64, out: &bounds::Outcome<bounds::Thm1Report>) -> Self {
        match out {
            bounds::Outcome::Verdict(r) => Thm1Record {
                version: version(),
                x1,
                k,
                status: "ok".into(),
                bound: Some(r.bound),
                claim_drops: Some(r.claim_drops.iter().map(|w| (w.r, w.i)).collect()),
                claim_untested: Some(r.claim_untested.clone()),
                claim_failures: Some(r.claim_failures.clone()),
                ok: Some(r.ok),
                orbit: (&r.orbit).into(),
            },
            bounds::Outcome::GuardHit(run) => Thm1Record {
                version: version(),
                x1,
                k,
                status: "guard".into(),
                bound: None,
                claim_drops: None,
                claim_untested: None,
                claim_failures: None,
                ok: None,
                orbit: run.into(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thm2Record {
    #[serde(default = "version")]
    pub version: String,
    pub x1: u64,
    pub x2: u64,
    pub k: u64,
    pub status: String,
    /// Decimal string: JSON numbers cannot carry the full u128 range.
    #[serde(with = "u128_opt", default, skip_serializing_if = "Option::is_none")]
    pub x_num: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_den: Option<u32>,
    /// log2 of the sup bound; "inf" when the tower overflows f64.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2_bound: Option<FloatStr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log2_sup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_case_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ok: Option<bool>,
    pub orbit: OrbitPart,
}

impl Thm2Record {
    pub fn from_outcome(
        x1: u64,
        x2: u64,
        k: u64,
        out: &bounds::Outcome<bounds::Thm2Report>,
    ) -> Self {
        match out {
            bounds::Outcome::Verdict(r) => Thm2Record {
                version: version(),
                x1,
                x2,
                k,
                status: "ok".into(),
                x_num: Some(r.x_num),
                x_den: Some(r.x_den),
                log2_bound: Some(FloatStr(r.log2_bound)),
                log2_sup: Some(r.log2_sup),
                parity_ok: Some(r.parity_ok),
                base_case_ok: Some(r.base_case_ok),
                ok: Some(r.ok),
                orbit: (&r.orbit).into(),
            },
            bounds::Outcome::GuardHit(run) => Thm2Record {
                version: version(),
                x1,
                x2,
                k,
                status: "guard".into(),
                x_num: None,
                x_den: None,
                log2_bound: None,
                log2_sup: None,
                parity_ok: None,
                base_case_ok: None,
                ok: None,
                orbit: run.into(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1SeedRecord {
    #[serde(default = "version")]
    pub version: String,
    pub seed: u64,
    pub cycle: Vec<u64>,
    pub cycle_max: u64,
    pub ok: bool,
}

impl From<&bounds::Prop1Seed> for Prop1SeedRecord {
    fn from(s: &bounds::Prop1Seed) -> Self {
        Prop1SeedRecord {
            version: version(),
            seed: s.seed,
            cycle: s.cycle.clone(),
            cycle_max: s.cycle_max,
            ok: s.ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop1Record {
    #[serde(default = "version")]
    pub version: String,
    pub c: u64,
    pub cap: u64,
    pub decrease_ok: bool,
    pub probed_to: u64,
    pub seeds_checked: u64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MertensRecord {
    #[serde(default = "version")]
    pub version: String,
    pub x: u64,
    #[serde(with = "big")]
    pub product_num: num_bigint::BigUint,
    #[serde(with = "big")]
    pub product_den: num_bigint::BigUint,
    pub product: f64,
    pub rs_lower: f64,
    pub rs_upper: f64,
    pub margin: f64,
    pub ok: bool,
}

impl From<&mertens::MertensEnvelope> for MertensRecord {
    fn from(e: &mertens::MertensEnvelope) -> Self {
        MertensRecord {
            version: version(),
            x: e.x,
            product_num: e.product_num.clone(),
            product_den: e.product_den.clone(),
            product: e.product,
            rs_lower: e.rs_lower,
            rs_upper: e.rs_upper,
            margin: e.margin,
            ok: e.ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRecord {
    #[serde(default = "version")]
    pub version: String,
    pub x: u64,
    /// Present for single-point checks; sweeps record the verdict only.
    #[serde(with = "big_opt", default, skip_serializing_if = "Option::is_none")]
    pub product_num: Option<num_bigint::BigUint>,
    #[serde(with = "big_opt", default, skip_serializing_if = "Option::is_none")]
    pub product_den: Option<num_bigint::BigUint>,
    pub ok: bool,
}

impl From<&mertens::CorollaryCheck> for CorollaryRecord {
    fn from(c: &mertens::CorollaryCheck) -> Self {
        CorollaryRecord {
            version: version(),
            x: c.x,
            product_num: Some(c.product_num.clone()),
            product_den: Some(c.product_den.clone()),
            ok: c.ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPart {
    pub first_prime: u64,
    pub last_prime: u64,
    pub count: u64,
    #[serde(with = "big")]
    pub ratio_num: num_bigint::BigUint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyPart {
    pub blocks_ok: bool,
    pub minimality_ok: bool,
    pub contiguous_ok: bool,
    pub congruences_ok: bool,
    pub y_ok: bool,
    pub r_ok: bool,
    pub ok: bool,
}

impl From<&mertens::CrtVerify> for VerifyPart {
    fn from(v: &mertens::CrtVerify) -> Self {
        VerifyPart {
            blocks_ok: v.blocks_ok,
            minimality_ok: v.minimality_ok,
            contiguous_ok: v.contiguous_ok,
            congruences_ok: v.congruences_ok,
            y_ok: v.y_ok,
            r_ok: v.r_ok,
            ok: v.ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiDropPart {
    /// "verified" | "unverified" | "violated".
    pub status: String,
    /// The j the non-verified statuses refer to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    pub symbolic: Vec<(u64, bool)>,
    pub sampled_even_ok: bool,
}

impl From<&mertens::PhiDropReport> for PhiDropPart {
    fn from(r: &mertens::PhiDropReport) -> Self {
        let (status, j) = match r.outcome {
            mertens::PhiDropOutcome::Verified => ("verified", None),
            mertens::PhiDropOutcome::Unverified { j } => ("unverified", Some(j)),
            mertens::PhiDropOutcome::Violated { j } => ("violated", Some(j)),
        };
        PhiDropPart {
            status: status.into(),
            j,
            symbolic: r.symbolic.clone(),
            sampled_even_ok: r.sampled_even_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrtWitnessRecord {
    #[serde(default = "version")]
    pub version: String,
    pub x: u64,
    pub k: u64,
    pub r: Vec<u64>,
    pub blocks: Vec<BlockPart>,
    #[serde(with = "bigs")]
    pub q: Vec<num_bigint::BigUint>,
    #[serde(with = "big")]
    pub y: num_bigint::BigUint,
    pub verify: VerifyPart,
    pub phi_drop: PhiDropPart,
}

impl CrtWitnessRecord {
    pub fn new(
        w: &mertens::CrtWitness,
        verify: &mertens::CrtVerify,
        drop: &mertens::PhiDropReport,
    ) -> Self {
        CrtWitnessRecord {
            version: version(),
            x: w.x,
            k: w.k,
            r: w.r.clone(),
            blocks: w
                .blocks
                .iter()
                .map(|b| BlockPart {
                    first_prime: b.first_prime,
                    last_prime: b.last_prime,
                    count: b.count,
                    ratio_num: b.ratio_num.clone(),
                })
                .collect(),
            q: w.q.clone(),
            y: w.y.clone(),
            verify: verify.into(),
            phi_drop: drop.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LehmerHitRecord {
    #[serde(default = "version")]
    pub version: String,
    pub q: u64,
    pub r: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LehmerRecord {
    #[serde(default = "version")]
    pub version: String,
    pub limit: u64,
    pub hits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreRecordLine {
    #[serde(default = "version")]
    pub version: String,
    pub d: usize,
    pub k: u64,
    pub q: u64,
    pub preperiod: u64,
    pub period: u64,
    pub sup_seen: u64,
    pub steps_used: u64,
    pub terminated: TerminatedTag,
    pub constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreSummaryRecord {
    #[serde(default = "version")]
    pub version: String,
    pub d: usize,
    pub k: u64,
    pub records: u64,
    pub constants: Vec<u64>,
    pub lehmer_flags: Vec<u64>,
    pub cycle_found: u64,
    pub guard_hits: u64,
}

/// Every line the harness can emit, dispatched by the `record_type` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record_type", rename_all = "kebab-case")]
pub enum Record {
    Orbit(OrbitRecord),
    Chain(ChainRecord),
    Scan(ScanRecord),
    ScanStats(ScanStatsRecord),
    Thm1(Thm1Record),
    Thm2(Thm2Record),
    Prop1Seed(Prop1SeedRecord),
    Prop1(Prop1Record),
    Mertens(MertensRecord),
    Corollary(CorollaryRecord),
    CrtWitness(CrtWitnessRecord),
    LehmerHit(LehmerHitRecord),
    Lehmer(LehmerRecord),
    Explore(ExploreRecordLine),
    ExploreSummary(ExploreSummaryRecord),
}

impl Record {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    pub fn parse(line: &str) -> Result<Record, serde_json::Error> {
        serde_json::from_str(line)
    }
}
