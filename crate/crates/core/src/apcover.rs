//! Interval covering by finite arithmetic progressions, the alternating
//! multi-interval variant, input normalization and exhaustive oracles.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{ceil_div, floor_div, Int};
use crate::presburger::Quantifier;

/// Largest window an exhaustive scan will walk.
pub const SCAN_LIMIT: u64 = 10_000_000;

/// The progression `{g + j*e : 0 <= j <= h}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct APTriple {
    pub g: Int,
    pub h: Int,
    pub e: Int,
}

impl APTriple {
    pub fn new(g: impl Into<Int>, h: impl Into<Int>, e: impl Into<Int>) -> Result<Self> {
        let t = APTriple {
            g: g.into(),
            h: h.into(),
            e: e.into(),
        };
        if !t.e.is_positive() || t.h.is_negative() || t.g.is_negative() {
            return Err(Error::InvalidInput(format!(
                "progression ({}, {}, {}) needs g >= 0, h >= 0, e >= 1",
                t.g, t.h, t.e
            )));
        }
        Ok(t)
    }

    pub fn last(&self) -> Int {
        &self.g + &self.h * &self.e
    }

    pub fn contains(&self, z: &Int) -> bool {
        ap_member(z, self)
    }

    /// Index range `j` of members lying in `[lo, hi]`, if any.
    fn index_range(&self, lo: &Int, hi: &Int) -> Option<(Int, Int)> {
        let first = ceil_div(&(lo - &self.g), &self.e).max(Int::zero());
        let last = floor_div(&(hi - &self.g), &self.e).min(self.h.clone());
        (first <= last).then_some((first, last))
    }
}

pub fn ap_member(z: &Int, t: &APTriple) -> bool {
    if *z < t.g {
        return false;
    }
    let (q, r) = (z - &t.g).div_rem(&t.e);
    r.is_zero() && q <= t.h
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APCoverInstance {
    pub mu: Int,
    pub nu: Int,
    pub triples: Vec<APTriple>,
}

impl APCoverInstance {
    pub fn new(mu: impl Into<Int>, nu: impl Into<Int>, triples: Vec<APTriple>) -> Result<Self> {
        let (mu, nu) = (mu.into(), nu.into());
        if mu > nu {
            return Err(Error::InvalidInput(format!("empty interval [{mu}, {nu}]")));
        }
        Ok(APCoverInstance { mu, nu, triples })
    }

    pub fn width(&self) -> Int {
        &self.nu - &self.mu + 1
    }

    pub fn is_covered(&self, z: &Int) -> bool {
        self.triples.iter().any(|t| ap_member(z, t))
    }

    pub fn is_normalized(&self) -> bool {
        self.mu >= Int::one()
            && self
                .triples
                .iter()
                .all(|t| t.g >= Int::from(2) && t.h >= Int::one())
    }
}

/// Result of [`normalize`]: the translated instance, the shift that was
/// added to every point, and the appended right endpoint if one was needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub instance: APCoverInstance,
    pub shift: Int,
    pub appended: Option<Int>,
}

/// Rewrite an instance so that every progression has at least two terms and
/// every first term is at least 2, with `mu >= 1`.
///
/// A singleton `{g}` inside the window becomes `{g, nu + 1}` after the window
/// is extended by the single point `nu + 1`; that point is covered, so the
/// uncovered count is unchanged. Singletons outside the window are dropped.
pub fn normalize(inst: &APCoverInstance) -> Normalized {
    let in_window = |g: &Int| *g >= inst.mu && *g <= inst.nu;
    let appended = inst
        .triples
        .iter()
        .any(|t| t.h.is_zero() && in_window(&t.g));
    let nu = if appended { &inst.nu + 1 } else { inst.nu.clone() };
    let triples: Vec<APTriple> = inst
        .triples
        .iter()
        .filter(|t| !t.h.is_zero() || in_window(&t.g))
        .map(|t| {
            if t.h.is_zero() {
                APTriple {
                    g: t.g.clone(),
                    h: Int::one(),
                    e: &nu - &t.g,
                }
            } else {
                t.clone()
            }
        })
        .collect();
    let mut shift = (Int::one() - &inst.mu).max(Int::zero());
    for t in &triples {
        shift = shift.max(Int::from(2) - &t.g);
    }
    let instance = APCoverInstance {
        mu: &inst.mu + &shift,
        nu: &nu + &shift,
        triples: triples
            .into_iter()
            .map(|t| APTriple {
                g: t.g + &shift,
                ..t
            })
            .collect(),
    };
    Normalized {
        appended: appended.then(|| instance.nu.clone()),
        instance,
        shift,
    }
}

fn window_len(mu: &Int, nu: &Int, what: &str) -> Result<usize> {
    let n: Int = nu - mu + 1;
    if n > Int::from(SCAN_LIMIT) {
        return Err(Error::scale(what, n, SCAN_LIMIT));
    }
    Ok(n.to_usize().unwrap_or(0))
}

/// Coverage bitmap of `[mu, nu]` by the union of `triples`.
fn coverage(mu: &Int, nu: &Int, triples: &[APTriple], what: &str) -> Result<Vec<bool>> {
    let n = window_len(mu, nu, what)?;
    let mut covered = vec![false; n];
    for t in triples {
        if let Some((first, last)) = t.index_range(mu, nu) {
            let start = (&t.g + &first * &t.e - mu).to_usize().unwrap();
            let count = (last - first).to_usize().unwrap() + 1;
            match t.e.to_usize() {
                Some(step) => {
                    for i in 0..count {
                        covered[start + i * step] = true;
                    }
                }
                None => covered[start] = true,
            }
        }
    }
    Ok(covered)
}

pub fn uncovered_points(inst: &APCoverInstance) -> Result<Vec<Int>> {
    let covered = coverage(&inst.mu, &inst.nu, &inst.triples, "AP-COVER window")?;
    Ok(covered
        .iter()
        .enumerate()
        .filter(|(_, c)| !**c)
        .map(|(i, _)| &inst.mu + i)
        .collect())
}

pub fn decide_apcover(inst: &APCoverInstance) -> Result<bool> {
    let covered = coverage(&inst.mu, &inst.nu, &inst.triples, "AP-COVER window")?;
    Ok(covered.iter().any(|c| !c))
}

pub fn count_apcover(inst: &APCoverInstance) -> Result<Int> {
    let covered = coverage(&inst.mu, &inst.nu, &inst.triples, "AP-COVER window")?;
    Ok(Int::from(covered.iter().filter(|c| !**c).count()))
}

/// Alternating instance, listed outermost first. For `t < m - 1` the
/// variable `z_t` ranges over `intervals[t]` minus the union of `groups[t]`;
/// the innermost (existential) `z_{m-1}` ranges over its whole interval, and
/// the matrix asks that `sum taus[t] * z_t` avoid the union of the last group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MAPCoverInstance {
    pub intervals: Vec<(Int, Int)>,
    pub groups: Vec<Vec<APTriple>>,
    pub taus: Vec<Int>,
    pub quantifiers: Vec<Quantifier>,
}

impl MAPCoverInstance {
    pub fn new(
        intervals: Vec<(Int, Int)>,
        groups: Vec<Vec<APTriple>>,
        taus: Vec<Int>,
        quantifiers: Vec<Quantifier>,
    ) -> Result<Self> {
        let inst = MAPCoverInstance {
            intervals,
            groups,
            taus,
            quantifiers,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn m(&self) -> usize {
        self.intervals.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.intervals.len();
        if m == 0 || self.groups.len() != m || self.taus.len() != m || self.quantifiers.len() != m {
            return Err(Error::InvalidInput(
                "interval, group, tau and quantifier lists must have one equal nonzero length".into(),
            ));
        }
        if self.quantifiers.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("quantifiers must alternate".into()));
        }
        if self.quantifiers[m - 1] != Quantifier::Exists {
            return Err(Error::InvalidInput("innermost quantifier must be existential".into()));
        }
        if let Some((lo, hi)) = self.intervals.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Range of the combination `sum taus[t] * z_t` over the box of intervals.
    pub fn combination_range(&self) -> (Int, Int) {
        let mut lo = Int::zero();
        let mut hi = Int::zero();
        for (tau, (a, b)) in self.taus.iter().zip(&self.intervals) {
            let (x, y) = (tau * a, tau * b);
            lo += x.clone().min(y.clone());
            hi += x.max(y);
        }
        (lo, hi)
    }
}

pub fn decide_mapcover(inst: &MAPCoverInstance) -> Result<bool> {
    inst.validate()?;
    let mut volume = Int::one();
    for (lo, hi) in &inst.intervals {
        volume *= hi - lo + 1;
    }
    if volume > Int::from(SCAN_LIMIT) {
        return Err(Error::scale("m-AP-COVER interval product", volume, SCAN_LIMIT));
    }
    let m = inst.m();
    let mut domains = Vec::with_capacity(m - 1);
    for t in 0..m - 1 {
        let (lo, hi) = &inst.intervals[t];
        let covered = coverage(lo, hi, &inst.groups[t], "m-AP-COVER interval")?;
        domains.push(
            covered
                .iter()
                .enumerate()
                .filter(|(_, c)| !**c)
                .map(|(i, _)| lo + i)
                .collect::<Vec<Int>>(),
        );
    }
    Ok(eval_level(inst, &domains, 0, &Int::zero()))
}

fn eval_level(inst: &MAPCoverInstance, domains: &[Vec<Int>], t: usize, acc: &Int) -> bool {
    let m = inst.m();
    if t == m - 1 {
        let (lo, hi) = &inst.intervals[t];
        let mut z = lo.clone();
        while z <= *hi {
            let w = acc + &inst.taus[t] * &z;
            if !inst.groups[t].iter().any(|ap| ap_member(&w, ap)) {
                return true;
            }
            z += 1;
        }
        return false;
    }
    let mut branch = domains[t]
        .iter()
        .map(|z| eval_level(inst, domains, t + 1, &(acc + &inst.taus[t] * z)));
    match inst.quantifiers[t] {
        Quantifier::Exists => branch.any(|b| b),
        Quantifier::Forall => branch.all(|b| b),
    }
}
