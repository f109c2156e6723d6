//! Verification engine: machine-checks every stated inequality over
//! configurable index ranges and reports one record per (check, n).
//!
//! Checks run against shared read-only tables (exact Bell values, the
//! Lambert W chain, the running log-factorial) built once per run. A
//! comparison that falls inside the rounding margin is INDETERMINATE and is
//! retried at doubled precision, up to four doublings, before it is
//! reported as such.

use crate::asym::{self, Evaluator};
use crate::bell::BellTable;
use crate::bounds::{self, best_enclosure, digit_count, optimize_epsilon, EpsilonBoundReport};
use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::lambertw::lambert_w;
use rayon::prelude::*;
use serde::Serialize;

/// Maximum number of precision doublings before a comparison is reported
/// INDETERMINATE.
const MAX_ESCALATIONS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INDETERMINATE")]
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every inequality the harness can verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckId {
    /// B_n inside E_n (q_n ± 1.6 e^{-2R}).
    SecondOrder,
    /// |B_n/E_n - 1| <= e^{-R}/11.
    FirstOrder,
    /// B_n <= E_n.
    SaddleUpper,
    /// (1 - ln n/(5n)) E*_n <= B_n <= E*_n.
    StarSandwich,
    /// (n/(e ln n))^n <= B_n.
    ElementaryLower,
    /// B_n <= (3n/(4 ln n))^n.
    ElementaryUpper,
    /// B_n <= (n/(e ln n) (1 + 3 ln ln n/ln n))^n.
    ElementaryRefined,
    /// (1 - 1/(2n)) E*_n <= E_n <= E*_n. Needs no exact Bell values.
    FormSandwich,
    /// -1/W(n) <= E_n/E_{n-1} - e^{W(n)} <= 0. Needs no exact Bell values.
    FormStep,
    /// |B_n/B_{n-1} - e^{W(n)}| <= (8/7)/W(n).
    RatioStep,
    /// 1 - e^{-R}/12 <= q_n <= 1 for W(n+1) >= 5.
    QRange,
    /// q_n + 1.6 e^{-2R} <= 1 for W(n+1) >= 5.
    QSlack,
    /// |q_{n+1} - q_n| <= e^{-R}/(10(n+1)) for W(n+1) >= 5.
    QStep,
    /// B_n <= (0.792 n / ln(n+1))^n.
    PowerUpper,
}

pub const ALL_CHECKS: [CheckId; 14] = [
    CheckId::SecondOrder,
    CheckId::FirstOrder,
    CheckId::SaddleUpper,
    CheckId::StarSandwich,
    CheckId::ElementaryLower,
    CheckId::ElementaryUpper,
    CheckId::ElementaryRefined,
    CheckId::FormSandwich,
    CheckId::FormStep,
    CheckId::RatioStep,
    CheckId::QRange,
    CheckId::QSlack,
    CheckId::QStep,
    CheckId::PowerUpper,
];

impl CheckId {
    pub fn id(self) -> &'static str {
        match self {
            CheckId::SecondOrder => "second-order",
            CheckId::FirstOrder => "first-order",
            CheckId::SaddleUpper => "saddle-upper",
            CheckId::StarSandwich => "star-sandwich",
            CheckId::ElementaryLower => "elementary-lower",
            CheckId::ElementaryUpper => "elementary-upper",
            CheckId::ElementaryRefined => "elementary-refined",
            CheckId::FormSandwich => "form-sandwich",
            CheckId::FormStep => "form-step",
            CheckId::RatioStep => "ratio",
            CheckId::QRange => "q-range",
            CheckId::QSlack => "q-slack",
            CheckId::QStep => "q-step",
            CheckId::PowerUpper => "power-upper",
        }
    }

    /// Smallest index at which the underlying statement applies. Ranges are
    /// clamped here and the clamp is reported.
    pub fn valid_from(self) -> u64 {
        match self {
            CheckId::SecondOrder => 1,
            CheckId::FirstOrder => 11,
            CheckId::SaddleUpper => 311,
            CheckId::StarSandwich => 2,
            CheckId::ElementaryLower | CheckId::ElementaryUpper => 2,
            CheckId::ElementaryRefined => 6,
            CheckId::FormSandwich | CheckId::FormStep => 1,
            CheckId::RatioStep => 1,
            CheckId::QRange | CheckId::QSlack | CheckId::QStep => 742,
            CheckId::PowerUpper => 1,
        }
    }

    /// Whether the check compares against exact Bell values.
    pub fn needs_bell(self) -> bool {
        !matches!(
            self,
            CheckId::FormSandwich
                | CheckId::FormStep
                | CheckId::QRange
                | CheckId::QSlack
                | CheckId::QStep
        )
    }

    /// Whether the check needs ln n! (the saddle form E_n).
    fn needs_lnfact(self) -> bool {
        matches!(
            self,
            CheckId::SecondOrder
                | CheckId::FirstOrder
                | CheckId::SaddleUpper
                | CheckId::FormSandwich
                | CheckId::FormStep
        )
    }

    /// Parse a selector: a check id, a group alias, or `all`.
    pub fn parse_selector(s: &str) -> Result<Vec<CheckId>> {
        let sel: Vec<CheckId> = match s {
            "all" => ALL_CHECKS.to_vec(),
            "elementary" => vec![
                CheckId::ElementaryLower,
                CheckId::ElementaryUpper,
                CheckId::ElementaryRefined,
            ],
            "q-props" => vec![CheckId::QRange, CheckId::QSlack, CheckId::QStep],
            other => match ALL_CHECKS.iter().find(|c| c.id() == other) {
                Some(c) => vec![*c],
                None => {
                    return Err(Error::Config(format!(
                        "unknown check `{other}`; known: all, elementary, q-props, {}",
                        ALL_CHECKS.map(|c| c.id()).join(", ")
                    )))
                }
            },
        };
        Ok(sel)
    }
}

impl std::fmt::Display for CheckId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Per-index outcome of one inequality check.
#[derive(Debug, Clone)]
pub struct VerificationRecord {
    pub check: CheckId,
    pub n: u64,
    pub lo: Option<HPReal>,
    pub value: HPReal,
    pub hi: Option<HPReal>,
    pub verdict: Verdict,
    pub precision_used: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected table, csv or json)"
            ))),
        }
    }
}

/// Configuration of one verification run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub checks: Vec<CheckId>,
    pub from: u64,
    pub to: u64,
    pub precision: u32,
    pub format: OutputFormat,
    /// Worker count; 0 means one per logical CPU.
    pub jobs: usize,
    /// Cap on the largest exactly computed Bell index.
    pub max_exact_index: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            checks: ALL_CHECKS.to_vec(),
            from: 1,
            to: 2000,
            precision: crate::hp::DEFAULT_PRECISION,
            format: OutputFormat::Table,
            jobs: 0,
            max_exact_index: crate::bell::DEFAULT_MAX_INDEX,
        }
    }
}

/// Outcome of a verification run: ordered records plus clamp notes.
#[derive(Debug)]
pub struct RunReport {
    pub records: Vec<VerificationRecord>,
    /// One note per check whose range start was raised to its valid_from.
    pub clamps: Vec<String>,
}

impl RunReport {
    pub fn n_fail(&self) -> usize {
        self.records.iter().filter(|r| r.verdict == Verdict::Fail).count()
    }

    pub fn n_indeterminate(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.verdict == Verdict::Indeterminate)
            .count()
    }

    /// Exit-code contract: 0 all PASS, 1 any FAIL, 3 any INDETERMINATE
    /// without FAIL. (2 is reserved for usage/config errors.)
    pub fn exit_code(&self) -> i32 {
        if self.n_fail() > 0 {
            1
        } else if self.n_indeterminate() > 0 {
            3
        } else {
            0
        }
    }
}

/// Quantities a check reads; either precomputed sweep tables or fresh
/// evaluation at an escalated precision.
enum Source<'a> {
    Tables {
        ev: &'a Evaluator,
        bell: Option<&'a BellTable>,
    },
    Fresh {
        prec: u32,
        bell: Option<&'a BellTable>,
    },
}

impl Source<'_> {
    fn prec(&self) -> u32 {
        match self {
            Source::Tables { ev, .. } => ev.prec(),
            Source::Fresh { prec, .. } => *prec,
        }
    }

    fn bell_table(&self) -> &BellTable {
        match self {
            Source::Tables { bell, .. } | Source::Fresh { bell, .. } => {
                bell.expect("check requires the exact Bell table")
            }
        }
    }

    fn log_bell(&self, n: u64) -> HPReal {
        self.bell_table().log_bell(n, self.prec())
    }

    fn ratio(&self, n: u64) -> HPReal {
        self.bell_table().ratio(n, self.prec())
    }

    fn w(&self, k: u64) -> Result<HPReal> {
        match self {
            Source::Tables { ev, .. } => Ok(ev.w(k).clone()),
            Source::Fresh { prec, .. } => {
                Ok(lambert_w(&HPReal::from_u64(k, prec + 16), prec + 16)?.w)
            }
        }
    }

    fn log_e(&self, n: u64) -> Result<HPReal> {
        match self {
            Source::Tables { ev, .. } => Ok(ev.log_e(n).log_value),
            Source::Fresh { prec, .. } => Ok(asym::log_e(n, *prec)?.log_value),
        }
    }

    fn log_e_star(&self, n: u64) -> Result<HPReal> {
        match self {
            Source::Tables { ev, .. } => Ok(ev.log_e_star(n).log_value),
            Source::Fresh { prec, .. } => Ok(asym::log_e_star(n, *prec)?.log_value),
        }
    }

    fn q(&self, n: u64) -> Result<asym::CorrectionFactor> {
        match self {
            Source::Tables { ev, .. } => Ok(ev.q(n)),
            Source::Fresh { prec, .. } => asym::q_factor(n, *prec),
        }
    }
}

fn side_ok(bound: Option<&HPReal>, value: &HPReal, is_lower: bool) -> Option<bool> {
    let Some(b) = bound else { return Some(true) };
    let (le_ok, violated) = if is_lower {
        (b.certainly_le(value), b.certainly_gt(value))
    } else {
        (value.certainly_le(b), value.certainly_gt(b))
    };
    if le_ok {
        Some(true)
    } else if violated {
        Some(false)
    } else {
        None
    }
}

fn judge(lo: Option<&HPReal>, value: &HPReal, hi: Option<&HPReal>) -> Verdict {
    match (side_ok(lo, value, true), side_ok(hi, value, false)) {
        (Some(true), Some(true)) => Verdict::Pass,
        (Some(false), _) | (_, Some(false)) => Verdict::Fail,
        _ => Verdict::Indeterminate,
    }
}

/// Evaluate one check at one index: returns (lo, value, hi).
fn evaluate(
    check: CheckId,
    n: u64,
    src: &Source<'_>,
) -> Result<(Option<HPReal>, HPReal, Option<HPReal>)> {
    let prec = src.prec();
    match check {
        CheckId::SecondOrder => {
            let e = src.log_e(n)?;
            let qf = src.q(n)?;
            let (lo, hi) = bounds::master_interval(&e, &qf, prec);
            Ok((Some(lo), src.log_bell(n), Some(hi)))
        }
        CheckId::FirstOrder => {
            let e = src.log_e(n)?;
            let r = src.w(n + 1)?;
            let (lo, hi) = bounds::prop_main_interval(&e, &r, n, prec);
            Ok((Some(lo), src.log_bell(n), Some(hi)))
        }
        CheckId::SaddleUpper => Ok((None, src.log_bell(n), Some(src.log_e(n)?))),
        CheckId::StarSandwich => {
            let s = src.log_e_star(n)?;
            let (lo, hi) = bounds::estar_interval(&s, n, prec);
            Ok((Some(lo), src.log_bell(n), Some(hi)))
        }
        CheckId::ElementaryLower => {
            let (lo, _, _) = bounds::elementary_parts(n, prec);
            Ok((Some(lo), src.log_bell(n), None))
        }
        CheckId::ElementaryUpper => {
            let (_, hi, _) = bounds::elementary_parts(n, prec);
            Ok((None, src.log_bell(n), Some(hi)))
        }
        CheckId::ElementaryRefined => {
            let (_, _, refined) = bounds::elementary_parts(n, prec);
            let hi = refined.expect("refined bound defined for n >= 6");
            Ok((None, src.log_bell(n), Some(hi)))
        }
        CheckId::FormSandwich => {
            let value = src.log_e(n)?.sub(&src.log_e_star(n)?);
            let p = prec + 16;
            let lo = HPReal::one(p)
                .sub(&HPReal::from_ratio(1, 2 * n, p))
                .ln()
                .with_prec(prec);
            Ok((Some(lo), value, Some(HPReal::zero(prec))))
        }
        CheckId::FormStep => {
            let p = prec + 16;
            let w = src.w(n)?;
            let step = src.log_e(n)?.sub(&src.log_e(n - 1)?).exp();
            let value = step.sub(&HPReal::from_u64(n, p).div(&w));
            let lo = HPReal::one(p).div(&w).neg().with_prec(prec);
            Ok((Some(lo), value.with_prec(prec), Some(HPReal::zero(prec))))
        }
        CheckId::RatioStep => {
            let w = src.w(n)?;
            let (lo, hi) = bounds::ratio_interval(&w, n, prec);
            Ok((Some(lo), src.ratio(n), Some(hi)))
        }
        CheckId::QRange => {
            let p = prec + 16;
            let qf = src.q(n)?;
            let e_neg_r = qf.r.with_prec(p).div(&HPReal::from_u64(n + 1, p));
            let lo = HPReal::one(p)
                .sub(&e_neg_r.div(&HPReal::from_u64(12, p)))
                .with_prec(prec);
            Ok((Some(lo), qf.q, Some(HPReal::one(prec))))
        }
        CheckId::QSlack => {
            let p = prec + 16;
            let qf = src.q(n)?;
            let e_neg_2r = qf
                .r
                .with_prec(p)
                .div(&HPReal::from_u64(n + 1, p))
                .pow_u32(2);
            let value = qf.q.add(&e_neg_2r.mul(&HPReal::from_ratio(8, 5, p)));
            Ok((None, value.with_prec(prec), Some(HPReal::one(prec))))
        }
        CheckId::QStep => {
            let p = prec + 16;
            let qf = src.q(n)?;
            let qf_next = src.q(n + 1)?;
            let value = qf_next.q.sub(&qf.q).abs();
            let hi = qf
                .r
                .with_prec(p)
                .div(&HPReal::from_u64(n + 1, p))
                .div(&HPReal::from_u64(10 * (n + 1), p));
            Ok((None, value.with_prec(prec), Some(hi.with_prec(prec))))
        }
        CheckId::PowerUpper => {
            let hi = asym::power_upper_estimate(n, prec)?.log_value;
            Ok((None, src.log_bell(n), Some(hi)))
        }
    }
}

/// Run one check at one index with escalation on INDETERMINATE verdicts.
fn run_one(
    check: CheckId,
    n: u64,
    ev: &Evaluator,
    bell: Option<&BellTable>,
    base_prec: u32,
) -> Result<VerificationRecord> {
    let src = Source::Tables { ev, bell };
    let (lo, value, hi) = evaluate(check, n, &src)?;
    let mut verdict = judge(lo.as_ref(), &value, hi.as_ref());
    let mut best = (lo, value, hi, base_prec);
    let mut prec = base_prec;
    let mut doublings = 0;
    while verdict == Verdict::Indeterminate && doublings < MAX_ESCALATIONS {
        doublings += 1;
        prec *= 2;
        let src = Source::Fresh { prec, bell };
        let (lo, value, hi) = evaluate(check, n, &src)?;
        verdict = judge(lo.as_ref(), &value, hi.as_ref());
        best = (lo, value, hi, prec);
    }
    let (lo, value, hi, precision_used) = best;
    Ok(VerificationRecord {
        check,
        n,
        lo,
        value,
        hi,
        verdict,
        precision_used,
    })
}

/// Machine-verify the selected inequalities over `[from, to]`, clamping each
/// check to its validity range. Exact Bell values are computed once and
/// shared; per-(check, n) work is dispatched to a bounded worker pool and
/// records are sorted by (check, n) before they are returned.
pub fn verify_range(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.from > cfg.to {
        return Err(Error::Config(format!(
            "empty range: from = {} exceeds to = {}",
            cfg.from, cfg.to
        )));
    }
    if cfg.checks.is_empty() {
        return Err(Error::Config("no checks selected".into()));
    }
    if cfg.precision < 32 {
        return Err(Error::Config("precision must be at least 32 bits".into()));
    }

    let mut clamps = Vec::new();
    let mut jobs_list: Vec<(CheckId, u64, u64)> = Vec::new(); // (check, lo, hi)
    for &check in &cfg.checks {
        let lo = cfg.from.max(check.valid_from());
        if lo > cfg.to {
            clamps.push(format!(
                "{}: range [{}, {}] entirely below valid_from = {}; skipped",
                check.id(),
                cfg.from,
                cfg.to,
                check.valid_from()
            ));
            continue;
        }
        if lo > cfg.from {
            clamps.push(format!(
                "{}: start clamped from {} to valid_from = {}",
                check.id(),
                cfg.from,
                lo
            ));
        }
        jobs_list.push((check, lo, cfg.to));
    }

    let needs_bell = jobs_list.iter().any(|(c, _, _)| c.needs_bell());
    let bell = if needs_bell {
        Some(BellTable::up_to_with_cap(cfg.to, cfg.max_exact_index)?)
    } else {
        None
    };

    let needs_lnfact = jobs_list.iter().any(|(c, _, _)| c.needs_lnfact());
    let lnfact_max = if needs_lnfact { cfg.to } else { 0 };
    let ev = Evaluator::build(cfg.precision, lnfact_max, cfg.to + 2)?;

    let pairs: Vec<(CheckId, u64)> = jobs_list
        .iter()
        .flat_map(|&(c, lo, hi)| (lo..=hi).map(move |n| (c, n)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let bell_ref = bell.as_ref();
    let ev_ref = &ev;
    let prec = cfg.precision;
    let mut records = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(check, n)| run_one(check, n, ev_ref, bell_ref, prec))
            .collect::<Result<Vec<_>>>()
    })?;

    records.sort_by_key(|r| (r.check, r.n));
    Ok(RunReport { records, clamps })
}

// ---- emission ----

#[derive(Serialize)]
struct RecordRow<'a> {
    theorem: &'a str,
    n: u64,
    lo: Option<String>,
    value: String,
    hi: Option<String>,
    verdict: &'a str,
    precision_bits: u32,
}

fn record_row(r: &VerificationRecord) -> RecordRow<'_> {
    RecordRow {
        theorem: r.check.id(),
        n: r.n,
        lo: r.lo.as_ref().map(|v| v.to_sig_string(12)),
        value: r.value.to_sig_string(12),
        hi: r.hi.as_ref().map(|v| v.to_sig_string(12)),
        verdict: r.verdict.as_str(),
        precision_bits: r.precision_used,
    }
}

/// Fixed columns: theorem,n,lo,value,hi,verdict,precision_bits; magnitudes
/// printed with 12 significant digits. Byte-identical for identical runs.
pub fn records_to_csv(records: &[VerificationRecord]) -> String {
    let mut out = String::from("theorem,n,lo,value,hi,verdict,precision_bits\n");
    for r in records {
        let row = record_row(r);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.theorem,
            row.n,
            row.lo.unwrap_or_default(),
            row.value,
            row.hi.unwrap_or_default(),
            row.verdict,
            row.precision_bits
        ));
    }
    out
}

/// JSON mirror of the CSV fields.
pub fn records_to_json(records: &[VerificationRecord]) -> String {
    let rows: Vec<RecordRow<'_>> = records.iter().map(record_row).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("record serialization");
    s.push('\n');
    s
}

/// Human-oriented aligned table.
pub fn records_to_table(records: &[VerificationRecord]) -> String {
    let mut out = format!(
        "{:<20} {:>7} {:>20} {:>20} {:>20} {:<13} {:>5}\n",
        "theorem", "n", "lo", "value", "hi", "verdict", "bits"
    );
    for r in records {
        let row = record_row(r);
        out.push_str(&format!(
            "{:<20} {:>7} {:>20} {:>20} {:>20} {:<13} {:>5}\n",
            row.theorem,
            row.n,
            row.lo.unwrap_or_default(),
            row.value,
            row.hi.unwrap_or_default(),
            row.verdict,
            row.precision_bits
        ));
    }
    out
}

pub fn emit_records(records: &[VerificationRecord], format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => records_to_table(records),
        OutputFormat::Csv => records_to_csv(records),
        OutputFormat::Json => records_to_json(records),
    }
}

// ---- trend report ----

/// One row of the error-trend table: a_n = (n/ln n)(B_n/E_n - 1), its
/// second-order band, and the distance to the limiting value -1/12.
#[derive(Debug, Clone)]
pub struct TrendRow {
    pub n: u64,
    pub a: HPReal,
    pub band_lo: HPReal,
    pub band_hi: HPReal,
    pub gap_to_limit: HPReal,
}

pub fn trend_report(ns: &[u64], prec: u32, cap: u64) -> Result<Vec<TrendRow>> {
    let max = ns.iter().copied().max().ok_or_else(|| Error::Config("empty index list".into()))?;
    if ns.iter().any(|&n| n < 2) {
        return Err(Error::Config("trend indices must be >= 2".into()));
    }
    let table = BellTable::up_to_with_cap(max, cap)?;
    let p = prec + 16;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let ln_b = table.log_bell(n, p);
        let e = asym::log_e(n, p)?.log_value;
        let qf = asym::q_factor(n, p)?;
        let scale = HPReal::from_u64(n, p).div(&HPReal::from_u64(n, p).ln());
        let a = scale.mul(&ln_b.sub(&e).exp().sub(&HPReal::one(p)));
        let e2 = qf
            .r
            .with_prec(p)
            .div(&HPReal::from_u64(n + 1, p))
            .pow_u32(2);
        let half = e2.mul(&HPReal::from_ratio(8, 5, p));
        let q_dev = qf.q.sub(&HPReal::one(p));
        let band_lo = scale.mul(&q_dev.sub(&half));
        let band_hi = scale.mul(&q_dev.add(&half));
        let gap = a.add(&HPReal::from_ratio(1, 12, p)).abs();
        rows.push(TrendRow {
            n,
            a: a.with_prec(prec),
            band_lo: band_lo.with_prec(prec),
            band_hi: band_hi.with_prec(prec),
            gap_to_limit: gap.with_prec(prec),
        });
    }
    Ok(rows)
}

pub fn trend_to_table(rows: &[TrendRow]) -> String {
    let mut out = format!(
        "{:>7} {:>20} {:>20} {:>20} {:>20}\n",
        "n", "a_n", "band_lo", "band_hi", "gap_to_-1/12"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>7} {:>20} {:>20} {:>20} {:>20}\n",
            r.n,
            r.a.to_sig_string(12),
            r.band_lo.to_sig_string(12),
            r.band_hi.to_sig_string(12),
            r.gap_to_limit.to_sig_string(12)
        ));
    }
    out
}

// ---- epsilon scan ----

/// Optimal epsilon and coefficient for each r on a uniform grid from
/// `r_from` to `r_to` with `steps` rows.
pub fn epsilon_scan(r_from: f64, r_to: f64, steps: u32, prec: u32) -> Result<Vec<EpsilonBoundReport>> {
    if !(r_from >= 5.0) {
        return Err(Error::Config("epsilon scan requires r_from >= 5".into()));
    }
    if r_to < r_from {
        return Err(Error::Config("epsilon scan requires r_to >= r_from".into()));
    }
    if steps == 0 {
        return Err(Error::Config("epsilon scan requires steps >= 1".into()));
    }
    let mut rows = Vec::with_capacity(steps as usize);
    for i in 0..steps {
        let r = if steps == 1 {
            r_from
        } else {
            r_from + (r_to - r_from) * i as f64 / (steps - 1) as f64
        };
        rows.push(optimize_epsilon(&HPReal::from_f64(r, prec), prec)?);
    }
    Ok(rows)
}

pub fn epsilon_scan_to_table(rows: &[EpsilonBoundReport]) -> String {
    let mut out = format!(
        "{:>10} {:>18} {:>14} {:>16} {:>16} {:>16}\n",
        "r", "eps_opt", "eps*e^(r/4)", "j1_coeff", "j234_coeff", "total_coeff"
    );
    for rep in rows {
        let p = rep.r.prec();
        let c = rep
            .eps
            .mul(&rep.r.with_prec(p + 16).div(&HPReal::from_u64(4, p + 16)).exp());
        out.push_str(&format!(
            "{:>10} {:>18} {:>14} {:>16} {:>16} {:>16}\n",
            rep.r.to_sig_string(6),
            rep.eps.to_sig_string(12),
            c.to_sig_string(8),
            rep.j1_term.to_sig_string(10),
            rep.j234_term.to_sig_string(10),
            rep.total_coefficient.to_sig_string(10)
        ));
    }
    out
}

// ---- estimate ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    Enclosure,
    Digits,
}

impl std::str::FromStr for EstimateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(EstimateMode::Exact),
            "enclosure" => Ok(EstimateMode::Enclosure),
            "digits" => Ok(EstimateMode::Digits),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected exact, enclosure or digits)"
            ))),
        }
    }
}

/// One-shot estimate report for a single index.
pub fn estimate(n: u64, mode: EstimateMode, prec: u32, cap: u64) -> Result<String> {
    match mode {
        EstimateMode::Exact => match crate::bell::bell_with_cap(n, cap) {
            Ok(b) => Ok(format!("{b}\n")),
            Err(Error::ResourceLimit { requested, cap }) => Err(Error::Config(format!(
                "n = {requested} exceeds the exact-computation cap {cap}; \
                 use --mode enclosure (or raise the cap)"
            ))),
            Err(e) => Err(e),
        },
        EstimateMode::Enclosure => {
            if n < 1 {
                return Err(Error::Config("enclosure mode requires n >= 1".into()));
            }
            let enc = best_enclosure(n, prec)?;
            Ok(format!(
                "ln B_{n} in [{}, {}]\nproduced by: {}\n",
                enc.lo.to_sig_string(12),
                enc.hi.to_sig_string(12),
                enc.provenance_label()
            ))
        }
        EstimateMode::Digits => {
            if n < 1 {
                return Err(Error::Config("digits mode requires n >= 1".into()));
            }
            let (lo, hi) = digit_count(n, prec)?;
            if lo == hi {
                Ok(format!("B_{n} has exactly {lo} decimal digits\n"))
            } else {
                Ok(format!("B_{n} has between {lo} and {hi} decimal digits\n"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(checks: Vec<CheckId>, from: u64, to: u64) -> RunConfig {
        RunConfig {
            checks,
            from,
            to,
            precision: 192,
            format: OutputFormat::Csv,
            jobs: 2,
            max_exact_index: crate::bell::DEFAULT_MAX_INDEX,
        }
    }

    #[test]
    fn config_validation() {
        let c = cfg(vec![CheckId::SecondOrder], 10, 5);
        assert!(matches!(verify_range(&c), Err(Error::Config(_))));
        let c = cfg(vec![], 1, 5);
        assert!(matches!(verify_range(&c), Err(Error::Config(_))));
    }

    #[test]
    fn selector_parsing() {
        assert_eq!(CheckId::parse_selector("all").unwrap().len(), 14);
        assert_eq!(CheckId::parse_selector("q-props").unwrap().len(), 3);
        assert_eq!(CheckId::parse_selector("elementary").unwrap().len(), 3);
        assert_eq!(
            CheckId::parse_selector("ratio").unwrap(),
            vec![CheckId::RatioStep]
        );
        assert!(CheckId::parse_selector("bogus").is_err());
    }

    #[test]
    fn clamps_are_reported_and_ranges_respected() {
        let c = cfg(vec![CheckId::FirstOrder], 1, 30);
        let rep = verify_range(&c).unwrap();
        assert_eq!(rep.clamps.len(), 1);
        assert!(rep.clamps[0].contains("clamped"));
        assert_eq!(rep.records.first().unwrap().n, 11);
        assert_eq!(rep.records.len(), 20);
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn range_entirely_below_validity_is_skipped() {
        let c = cfg(vec![CheckId::SaddleUpper], 1, 100);
        let rep = verify_range(&c).unwrap();
        assert!(rep.records.is_empty());
        assert_eq!(rep.clamps.len(), 1);
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn small_run_all_checks_passes() {
        let c = cfg(ALL_CHECKS.to_vec(), 1, 60, );
        let rep = verify_range(&c).unwrap();
        assert_eq!(rep.n_fail(), 0, "failures in small run");
        assert_eq!(rep.n_indeterminate(), 0);
        // records sorted by (check, n)
        let mut sorted = rep.records.clone();
        sorted.sort_by_key(|r| (r.check, r.n));
        assert!(rep
            .records
            .iter()
            .zip(&sorted)
            .all(|(a, b)| a.check == b.check && a.n == b.n));
    }

    #[test]
    fn no_bell_checks_run_without_a_table() {
        // q-props above the default exact cap would fail if a table were
        // built; they must not need one.
        let mut c = cfg(
            vec![CheckId::QRange, CheckId::QSlack, CheckId::QStep],
            30_000,
            30_050,
        );
        c.max_exact_index = 100; // would error instantly if a table were built
        let rep = verify_range(&c).unwrap();
        assert_eq!(rep.records.len(), 153);
        assert_eq!(rep.n_fail(), 0);
        assert_eq!(rep.n_indeterminate(), 0);
    }

    #[test]
    fn deterministic_output_across_worker_counts() {
        let mut c1 = cfg(vec![CheckId::StarSandwich, CheckId::RatioStep], 2, 80);
        let mut c2 = c1.clone();
        c1.jobs = 1;
        c2.jobs = 4;
        let r1 = verify_range(&c1).unwrap();
        let r2 = verify_range(&c2).unwrap();
        assert_eq!(records_to_csv(&r1.records), records_to_csv(&r2.records));
        assert_eq!(records_to_json(&r1.records), records_to_json(&r2.records));
    }

    #[test]
    fn csv_shape_is_fixed() {
        let c = cfg(vec![CheckId::PowerUpper], 1, 3);
        let rep = verify_range(&c).unwrap();
        let csv = records_to_csv(&rep.records);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "theorem,n,lo,value,hi,verdict,precision_bits"
        );
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "power-upper");
        assert_eq!(fields[1], "1");
        assert_eq!(fields[2], ""); // one-sided: no lower bound
        assert_eq!(fields[5], "PASS");
    }

    #[test]
    fn json_mirrors_csv_fields() {
        let c = cfg(vec![CheckId::RatioStep], 1, 2);
        let rep = verify_range(&c).unwrap();
        let json = records_to_json(&rep.records);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let row = &parsed[0];
        for key in ["theorem", "n", "lo", "value", "hi", "verdict", "precision_bits"] {
            assert!(row.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(row["theorem"], "ratio");
        assert_eq!(row["n"], 1);
    }

    #[test]
    fn trend_rows_land_inside_their_bands() {
        let rows = trend_report(&[100, 500], 192, 20_000).unwrap();
        for row in &rows {
            assert!(row.band_lo.certainly_le(&row.a));
            assert!(row.a.certainly_le(&row.band_hi));
        }
    }

    #[test]
    fn trend_is_negative_late_and_approaches_the_limit() {
        let rows = trend_report(&[500, 1000, 2000], 192, 20_000).unwrap();
        assert!(rows[2].a.hi() < 0, "a_2000 must be negative");
        // monotone approach toward -1/12 across these indices
        assert!(rows[1].gap_to_limit.certainly_le(&rows[0].gap_to_limit));
        assert!(rows[2].gap_to_limit.certainly_le(&rows[1].gap_to_limit));
    }

    #[test]
    fn exit_code_contract() {
        fn record(verdict: Verdict) -> VerificationRecord {
            VerificationRecord {
                check: CheckId::PowerUpper,
                n: 1,
                lo: None,
                value: HPReal::one(64),
                hi: None,
                verdict,
                precision_used: 64,
            }
        }
        let pass = RunReport {
            records: vec![record(Verdict::Pass)],
            clamps: vec![],
        };
        assert_eq!(pass.exit_code(), 0);
        let indet = RunReport {
            records: vec![record(Verdict::Pass), record(Verdict::Indeterminate)],
            clamps: vec![],
        };
        assert_eq!(indet.exit_code(), 3);
        let fail = RunReport {
            records: vec![record(Verdict::Indeterminate), record(Verdict::Fail)],
            clamps: vec![],
        };
        assert_eq!(fail.exit_code(), 1);
    }

    #[test]
    fn indeterminate_comparisons_escalate_and_resolve() {
        // At 32 bits the second-order band near n = 2000 is narrower than
        // the accumulated budget; the check must escalate (doubling
        // precision) and then certify, never guess.
        let mut c = cfg(vec![CheckId::SecondOrder], 1995, 2000);
        c.precision = 32;
        let rep = verify_range(&c).unwrap();
        assert_eq!(rep.n_fail(), 0);
        assert_eq!(rep.n_indeterminate(), 0);
        assert!(
            rep.records.iter().any(|r| r.precision_used > 32),
            "expected at least one escalated record"
        );
        assert!(rep.records.iter().all(|r| r.verdict == Verdict::Pass));
    }

    #[test]
    fn epsilon_scan_optimal_coefficients_non_increasing() {
        let rows = epsilon_scan(5.0, 40.0, 36, 192).unwrap();
        assert_eq!(rows.len(), 36);
        for pair in rows.windows(2) {
            let a = pair[0].total_coefficient.to_f64();
            let b = pair[1].total_coefficient.to_f64();
            assert!(
                b <= a * (1.0 + 1e-12),
                "coefficient increases between r = {} and r = {}",
                pair[0].r.to_sig_string(6),
                pair[1].r.to_sig_string(6)
            );
        }
    }

    #[test]
    fn estimate_modes() {
        assert_eq!(estimate(10, EstimateMode::Exact, 192, 20_000).unwrap(), "115975\n");
        assert_eq!(estimate(0, EstimateMode::Exact, 192, 20_000).unwrap(), "1\n");
        let s = estimate(10, EstimateMode::Enclosure, 192, 20_000).unwrap();
        assert!(s.contains("ln B_10 in ["));
        assert!(s.contains("second-order"));
        let s = estimate(10, EstimateMode::Digits, 192, 20_000).unwrap();
        assert!(s.contains("exactly 6"));
        // cap exceeded suggests enclosure mode
        match estimate(50_000, EstimateMode::Exact, 192, 20_000) {
            Err(Error::Config(msg)) => assert!(msg.contains("enclosure")),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn digits_mode_handles_huge_indices() {
        // Far beyond any exact computation; the enclosure width at 10^6 is
        // far below one digit. Expected count frozen from an independent
        // 60-digit evaluation of the same enclosure.
        let s = estimate(1_000_000, EstimateMode::Digits, 192, 20_000).unwrap();
        assert_eq!(s, "B_1000000 has exactly 4547586 decimal digits\n");
    }

    #[test]
    fn epsilon_scan_rows() {
        let rows = epsilon_scan(5.0, 6.0, 2, 192).unwrap();
        assert_eq!(rows.len(), 2);
        for rep in &rows {
            assert!(rep.total_coefficient.to_f64() <= 1.6);
        }
        assert!(matches!(epsilon_scan(4.0, 6.0, 2, 192), Err(Error::Config(_))));
        assert!(matches!(epsilon_scan(5.0, 4.0, 2, 192), Err(Error::Config(_))));
    }
}
