//! Randomized invariant suites behind `shortpa props`.

use std::path::Path;

use anyhow::{Context, Result};
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use shortpa_core::apcover::{count_apcover, decide_mapcover};
use shortpa_core::contfrac::{chain_points, convergents, ContinuedFraction, LatticePoint};
use shortpa_core::encode::{build_encoding, build_sentence3, check_conditions, encode_window};
use shortpa_core::formats;
use shortpa_core::geometry::parallelogram_lattice_free;
use shortpa_core::kpt::{expected_infeasible, fibonacci_family, infeasible_set, midpoint_free, strictly_convex_chain};
use shortpa_core::presburger::count_certified;
use shortpa_core::sample::{random_apcover, random_cnf, random_qbf};
use shortpa_core::satred::{count_sat, decide_qbf, reduce_3sat_to_apcover, reduce_qbf_to_mapcover};

pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

type Case = fn(&mut StdRng) -> Result<Option<String>>;

/// Returns `Some(description)` on a violated property.
fn parsimony(rng: &mut StdRng) -> Result<Option<String>> {
    let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=5));
    let f = random_cnf(rng, n, m);
    let sat = count_sat(&f)?;
    let (inst, _) = reduce_3sat_to_apcover(&f, false)?;
    let ap = count_apcover(&inst)?;
    let enc = encode_window(&inst.mu, &inst.nu, &inst.triples)?;
    let cert = count_certified(&build_sentence3(&enc))?;
    Ok((sat != ap || ap != cert).then(|| format!("{} clauses: sat {sat}, apcover {ap}, sentence {cert}", f.clauses.len())))
}

fn chain_membership(rng: &mut StdRng) -> Result<Option<String>> {
    let len = 2 * rng.gen_range(0..=3) + 1;
    let mut terms: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=4)).collect();
    terms[0] = rng.gen_range(2..=4);
    let cf = ContinuedFraction::from_i64(&terms)?;
    let ch = convergents(&cf);
    let end = ch.endpoint().clone();
    let (p, q) = (end.y2.clone(), end.y1.clone());
    let g1 = terms[0] as usize;
    let on_chain: std::collections::HashSet<LatticePoint> = chain_points(&ch, g1).into_iter().collect();
    let (pi, qi) = (p.to_i64().unwrap_or(0), q.to_i64().unwrap_or(0));
    for y1 in 0..=qi {
        for y2 in g1 as i64..=(pi * y1) / qi {
            let y = LatticePoint::new(y1, y2);
            if parallelogram_lattice_free(&y, &p, &q) != on_chain.contains(&y) {
                return Ok(Some(format!("{terms:?}: disagreement at {y}")));
            }
        }
    }
    Ok(None)
}

fn conditions(rng: &mut StdRng) -> Result<Option<String>> {
    let inst = random_apcover(rng, 3, 9);
    let enc = build_encoding(&inst)?;
    let rep = check_conditions(&enc);
    Ok((!rep.all_pass()).then(|| format!("{}: conditions {:?} fail", formats::write_apcover(&inst).trim(), rep.failed())))
}

fn mapcover(rng: &mut StdRng) -> Result<Option<String>> {
    let n = rng.gen_range(2..=4);
    let (outer, m) = (rng.gen_range(1..n), rng.gen_range(1..=3));
    let q = random_qbf(rng, n, outer, m);
    let truth = decide_qbf(&q)?;
    let red = decide_mapcover(&reduce_qbf_to_mapcover(&q)?)?;
    Ok((truth != red).then(|| format!("qbf {truth}, mapcover {red}")))
}

fn round_trip(rng: &mut StdRng) -> Result<Option<String>> {
    let inst = random_apcover(rng, 3, 9);
    let enc = encode_window(&inst.mu, &inst.nu, &inst.triples)?;
    let text = formats::write_sentence(&build_sentence3(&enc));
    let again = formats::write_sentence(&formats::parse_sentence(&text)?);
    let ap = formats::write_apcover(&inst);
    let ap_again = formats::write_apcover(&formats::parse_apcover(&ap)?);
    Ok((text != again || ap != ap_again).then(|| "text round trip changed bytes".to_string()))
}

fn kpt(rng: &mut StdRng) -> Result<Option<String>> {
    let s = rng.gen_range(1..=4);
    let fam = fibonacci_family(s)?;
    let set = infeasible_set(&fam)?;
    let ok = set == expected_infeasible(&fam) && strictly_convex_chain(&set) && midpoint_free(&set);
    Ok((!ok).then(|| format!("s = {s}: infeasible set {} points", set.len())))
}

pub const SUITES: [(&str, Case); 6] = [
    ("parsimony", parsimony),
    ("chain-membership", chain_membership),
    ("conditions", conditions),
    ("mapcover", mapcover),
    ("round-trip", round_trip),
    ("kpt", kpt),
];

/// Case `i` of every suite draws from its own generator seeded by
/// `(seed, suite, i)`, so results do not depend on `jobs`.
pub fn run(seed: u64, cases: usize, jobs: usize) -> Result<Vec<SuiteResult>> {
    let mut out = vec![];
    for (si, (name, case)) in SUITES.iter().enumerate() {
        let jobs = jobs.clamp(1, cases.max(1));
        let outcomes: Vec<Result<Option<String>>> = std::thread::scope(|sc| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    sc.spawn(move || {
                        (j..cases)
                            .step_by(jobs)
                            .map(|i| {
                                let mut rng = StdRng::seed_from_u64(seed ^ ((si as u64) << 32) ^ i as u64);
                                (i, case(&mut rng))
                            })
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut all: Vec<(usize, Result<Option<String>>)> =
                handles.into_iter().flat_map(|h| h.join().expect("suite thread panicked")).collect();
            all.sort_by_key(|(i, _)| *i);
            all.into_iter().map(|(_, r)| r).collect()
        });
        let mut failures = vec![];
        for (i, r) in outcomes.into_iter().enumerate() {
            match r {
                Ok(None) => {}
                Ok(Some(msg)) => failures.push(format!("case {i}: {msg}")),
                Err(e) => failures.push(format!("case {i}: error: {e}")),
            }
        }
        out.push(SuiteResult { name, cases, failures });
    }
    Ok(out)
}

/// Every fixture must re-serialize to its own bytes.
pub fn check_fixtures(dir: &Path) -> Result<SuiteResult> {
    let mut failures = vec![];
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("reading fixture directory {}", dir.display()))?
        .collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.path());
    for e in &entries {
        let path = e.path();
        if !path.is_file() {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        match crate::input::reserialize(&text) {
            Ok(Some(again)) if again != text => failures.push(format!("{}: bytes differ after re-parse", path.display())),
            Ok(_) => {}
            Err(e) => failures.push(format!("{}: {e}", path.display())),
        }
    }
    Ok(SuiteResult { name: "fixtures", cases: entries.len(), failures })
}
