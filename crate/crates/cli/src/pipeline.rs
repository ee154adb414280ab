//! Run the reduction chain on one CNF and compare every stage against the
//! satisfying-assignment count.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Result};
use num_traits::{Signed, Zero};
use shortpa_core::apcover::count_apcover;
use shortpa_core::contfrac::ContinuedFraction;
use shortpa_core::encode::{build_sentence3, encode_window, Encoding};
use shortpa_core::geometry::{build_system1, build_system2};
use shortpa_core::gip::{count_gip, default_x_box};
use shortpa_core::optimize::{bilevel_value_semantic, build_bilevel, build_pareto, solve_pareto_brute};
use shortpa_core::presburger::count_certified;
use shortpa_core::satred::{count_sat, reduce_3sat_to_apcover, Cnf3};
use shortpa_core::{Error, Int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Sat,
    Apcover,
    Sentence,
    Gip1,
    Gip2,
    Bilevel,
    Pareto,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Sat,
        Stage::Apcover,
        Stage::Sentence,
        Stage::Gip1,
        Stage::Gip2,
        Stage::Bilevel,
        Stage::Pareto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Sat => "sat",
            Stage::Apcover => "apcover",
            Stage::Sentence => "sentence",
            Stage::Gip1 => "gip1",
            Stage::Gip2 => "gip2",
            Stage::Bilevel => "bilevel",
            Stage::Pareto => "pareto",
        }
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// An exact witness count.
    Count(Int),
    /// An optimal value; only its sign (and, with the parity trick, its
    /// range) is compared.
    Value(Int),
    Skipped(String),
    Mismatch(String),
}

#[derive(Clone, Debug)]
pub struct StageResult {
    pub stage: Stage,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub stages: Vec<StageResult>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        !self.stages.iter().any(|s| matches!(s.outcome, Outcome::Mismatch(_)))
    }

    pub fn skipped(&self) -> bool {
        self.stages.iter().any(|s| matches!(s.outcome, Outcome::Skipped(_)))
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            let (status, detail) = match &s.outcome {
                Outcome::Count(c) => ("ok", format!("count {c}")),
                Outcome::Value(v) => ("ok", format!("value {v}")),
                Outcome::Skipped(why) => ("skip", why.clone()),
                Outcome::Mismatch(why) => ("FAIL", why.clone()),
            };
            writeln!(f, "{:<9} {:<5} {:<40} {:.3}s", s.stage.name(), status, detail, s.elapsed.as_secs_f64())?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Drop the last two partial quotients, so the last progression is no longer
/// encoded. Used to exercise the failure path.
fn corrupt(enc: &Encoding) -> Result<Encoding> {
    let mut terms = enc.cfrac.terms();
    if terms.len() >= 3 {
        terms.truncate(terms.len() - 2);
    }
    Ok(Encoding::from_parts(
        enc.modulus.clone(),
        ContinuedFraction::from_terms(&terms)?,
        enc.source.clone(),
        enc.triples.clone(),
        enc.shift.clone(),
    ))
}

pub struct Options {
    pub stages: Vec<Stage>,
    pub parity_trick: bool,
    pub corrupt_encoding: bool,
    pub max_bits: u64,
}

fn classify(e: anyhow::Error) -> Result<Outcome> {
    match e.downcast_ref::<Error>() {
        Some(Error::ScaleGuard { what, limit, .. }) => Ok(Outcome::Skipped(format!("{what} over limit {limit}"))),
        _ => Err(e),
    }
}

pub fn verify(f: &Cnf3, opts: &Options) -> Result<PipelineReport> {
    let mut stages = opts.stages.clone();
    stages.sort();
    stages.dedup();
    let mut out = vec![];
    let reference = count_sat(f)?;
    let (inst, _) = reduce_3sat_to_apcover(f, opts.parity_trick)?;
    let needs_enc = stages.iter().any(|s| *s >= Stage::Sentence);
    let enc = if needs_enc {
        let e = encode_window(&inst.mu, &inst.nu, &inst.triples)?;
        if e.p.bits() > opts.max_bits {
            return Err(Error::ScaleGuard {
                what: "continued-fraction numerator bits".into(),
                size: e.p.bits().into(),
                limit: opts.max_bits.into(),
            }
            .into());
        }
        Some(if opts.corrupt_encoding { corrupt(&e)? } else { e })
    } else {
        None
    };
    let mut bilevel_value: Option<Int> = None;
    for st in stages {
        let t = Instant::now();
        let res: Result<Outcome> = (|| {
            let enc = || enc.as_ref().ok_or_else(|| anyhow!("encoding missing"));
            Ok(match st {
                Stage::Sat => Outcome::Count(reference.clone()),
                Stage::Apcover => Outcome::Count(count_apcover(&inst)?),
                Stage::Sentence => Outcome::Count(count_certified(&build_sentence3(enc()?))?),
                Stage::Gip1 | Stage::Gip2 => {
                    let g = if st == Stage::Gip1 { build_system1(enc()?)? } else { build_system2(enc()?)? };
                    Outcome::Count(count_gip(&g, &default_x_box(enc()?, g.nx))?)
                }
                Stage::Bilevel => {
                    let v = bilevel_value_semantic(&build_bilevel(enc()?))?;
                    bilevel_value = Some(v.clone());
                    Outcome::Value(v)
                }
                Stage::Pareto => {
                    let (g, _) = solve_pareto_brute(&build_pareto(enc()?, opts.parity_trick))?;
                    Outcome::Value(-g.to_integer())
                }
            })
        })();
        let outcome = match res.or_else(classify)? {
            Outcome::Count(c) if c != reference => {
                Outcome::Mismatch(format!("count {c} vs sat {reference}"))
            }
            Outcome::Value(v) => check_value(st, v, &reference, bilevel_value.as_ref(), opts.parity_trick),
            o => o,
        };
        out.push(StageResult { stage: st, outcome, elapsed: t.elapsed() });
    }
    Ok(PipelineReport { stages: out })
}

fn check_value(st: Stage, v: Int, reference: &Int, bilevel: Option<&Int>, parity: bool) -> Outcome {
    if v.is_positive() != reference.is_positive() {
        return Outcome::Mismatch(format!("value {v} but sat count {reference}"));
    }
    if parity && v > Int::from(1) {
        return Outcome::Mismatch(format!("value {v} outside {{0, 1}}"));
    }
    if v.is_negative() || (reference.is_zero() && !v.is_zero()) {
        return Outcome::Mismatch(format!("value {v} for count {reference}"));
    }
    match (st, bilevel) {
        (Stage::Pareto, Some(b)) if *b != v => Outcome::Mismatch(format!("-min g {v} vs bilevel {b}")),
        _ => Outcome::Value(v),
    }
}
