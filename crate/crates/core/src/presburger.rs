//! Prenex Presburger sentences over integer vectors: syntax tree, a bounded
//! exhaustive evaluator, and a certified evaluator for the sentences built in
//! [`crate::encode`], whose universal blocks collapse to finite candidate sets.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::contfrac::LatticePoint;
use crate::encode::Encoding;
use crate::error::{Error, Result};
use crate::exactmath::{ceil_div, floor_div, Int};

/// Largest candidate set any single quantifier level may enumerate.
pub const LEVEL_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'E' | 'e' => Some(Quantifier::Exists),
            'A' | 'a' => Some(Quantifier::Forall),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Quantifier::Exists => 'E',
            Quantifier::Forall => 'A',
        }
    }

    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// `coeffs · x <= bound`, dense over the sentence variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearInequality {
    pub coeffs: Vec<Int>,
    pub bound: Int,
}

impl LinearInequality {
    pub fn new(coeffs: Vec<Int>, bound: impl Into<Int>) -> Self {
        LinearInequality {
            coeffs,
            bound: bound.into(),
        }
    }

    pub fn lhs(&self, x: &[Int]) -> Result<Int> {
        let mut acc = Int::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = x.get(i).ok_or(Error::MissingVariable(i))?;
            acc += c * v;
        }
        Ok(acc)
    }

    pub fn holds(&self, x: &[Int]) -> Result<bool> {
        Ok(self.lhs(x)? <= self.bound)
    }

    /// The integer complement `-coeffs · x <= -bound - 1`.
    pub fn negated(&self) -> Self {
        LinearInequality {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            bound: -&self.bound - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolTree {
    And(Vec<BoolTree>),
    Or(Vec<BoolTree>),
    Leaf(LinearInequality),
}

impl BoolTree {
    pub fn eval(&self, x: &[Int]) -> Result<bool> {
        match self {
            BoolTree::Leaf(l) => l.holds(x),
            BoolTree::And(kids) => {
                for k in kids {
                    if !k.eval(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            BoolTree::Or(kids) => {
                for k in kids {
                    if k.eval(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BoolTree::Leaf(_) => 1,
            BoolTree::And(k) | BoolTree::Or(k) => k.iter().map(BoolTree::leaf_count).sum(),
        }
    }

    pub fn leaves(&self) -> Vec<&LinearInequality> {
        match self {
            BoolTree::Leaf(l) => vec![l],
            BoolTree::And(k) | BoolTree::Or(k) => k.iter().flat_map(BoolTree::leaves).collect(),
        }
    }

    /// De Morgan dual with integer-complemented leaves.
    pub fn negated(&self) -> BoolTree {
        match self {
            BoolTree::Leaf(l) => BoolTree::Leaf(l.negated()),
            BoolTree::And(k) => BoolTree::Or(k.iter().map(BoolTree::negated).collect()),
            BoolTree::Or(k) => BoolTree::And(k.iter().map(BoolTree::negated).collect()),
        }
    }
}

pub fn eval_expr(tree: &BoolTree, assignment: &[Int]) -> Result<bool> {
    tree.eval(assignment)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub quantifier: Quantifier,
    pub dim: usize,
}

/// `constant + coeffs · x`, dense over the sentence variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineExpr {
    pub coeffs: Vec<Int>,
    pub constant: Int,
}

impl AffineExpr {
    pub fn eval(&self, x: &[Int]) -> Result<Int> {
        let mut acc = self.constant.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * x.get(i).ok_or(Error::MissingVariable(i))?;
            }
        }
        Ok(acc)
    }
}

/// How the certified evaluator enumerates one group of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    /// A single variable ranging over `[lo, hi]`.
    Interval { lo: Int, hi: Int },
    /// A point of the shortened upper chain of `group`, or the origin.
    Chain { group: usize },
    /// The pair `x` that may witness `target ∉ Δ` against the point `y`:
    /// the residue witness `(⌊(target - y2 - 1)/M⌋, 0)`, a lattice point of
    /// the parallelogram spanned by `y` if one exists, and the origin.
    Witness {
        group: usize,
        target: AffineExpr,
        y: [usize; 2],
    },
    /// A chain point of `group`, or `(z, 0)` with `z` in `[lo, hi]`, or the origin.
    ChainOrInterval { group: usize, lo: Int, hi: Int },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub vars: Range<usize>,
    pub role: Role,
}

/// Encodings and per-block variable roles recorded by the sentence builders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceMeta {
    pub encodings: Vec<Encoding>,
    pub slots: Vec<Vec<Slot>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortSentence {
    pub prefix: Vec<Block>,
    pub matrix: BoolTree,
    pub meta: Option<SentenceMeta>,
}

impl ShortSentence {
    pub fn num_vars(&self) -> usize {
        self.prefix.iter().map(|b| b.dim).sum()
    }

    pub fn num_inequalities(&self) -> usize {
        self.matrix.leaf_count()
    }

    pub fn block_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.prefix[..i].iter().map(|b| b.dim).sum();
        start..start + self.prefix[i].dim
    }

    /// The negation, pushed through the prefix and the matrix.
    pub fn negated(&self) -> ShortSentence {
        ShortSentence {
            prefix: self
                .prefix
                .iter()
                .map(|b| Block {
                    quantifier: b.quantifier.dual(),
                    dim: b.dim,
                })
                .collect(),
            matrix: self.matrix.negated(),
            meta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedBox {
    pub ranges: Vec<(Int, Int)>,
}

impl BoundedBox {
    pub fn new(ranges: Vec<(Int, Int)>) -> Result<Self> {
        if let Some((lo, hi)) = ranges.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::InvalidInput(format!("empty range [{lo}, {hi}]")));
        }
        Ok(BoundedBox { ranges })
    }

    pub fn from_i64(ranges: &[(i64, i64)]) -> Result<Self> {
        Self::new(ranges.iter().map(|&(a, b)| (Int::from(a), Int::from(b))).collect())
    }

    pub fn volume(&self, vars: Range<usize>) -> Int {
        self.ranges[vars]
            .iter()
            .map(|(lo, hi)| hi - lo + 1)
            .product()
    }
}

type Domain<'a> = dyn Fn(usize, &[Int]) -> Result<Vec<Vec<Int>>> + Sync + 'a;

fn product(parts: Vec<Vec<Vec<Int>>>) -> Vec<Vec<Int>> {
    let mut acc: Vec<Vec<Int>> = vec![vec![]];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for a in &acc {
            for p in &part {
                let mut v = a.clone();
                v.extend(p.iter().cloned());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

fn range_values(lo: &Int, hi: &Int) -> Vec<Int> {
    let mut out = vec![];
    let mut v = lo.clone();
    while v <= *hi {
        out.push(v.clone());
        v += 1;
    }
    out
}

fn eval_from(s: &ShortSentence, level: usize, asg: &mut Vec<Int>, dom: &Domain) -> Result<bool> {
    if level == s.prefix.len() {
        return s.matrix.eval(asg);
    }
    let quantifier = s.prefix[level].quantifier;
    for cand in dom(level, asg)? {
        let len = asg.len();
        asg.extend(cand);
        let r = eval_from(s, level + 1, asg, dom);
        asg.truncate(len);
        match (quantifier, r?) {
            (Quantifier::Exists, true) => return Ok(true),
            (Quantifier::Forall, false) => return Ok(false),
            _ => {}
        }
    }
    Ok(quantifier == Quantifier::Forall)
}

/// Decide `s` with every quantifier ranging over the given domains.
pub fn decide_with_domains(s: &ShortSentence, dom: &Domain) -> Result<bool> {
    eval_from(s, 0, &mut Vec::with_capacity(s.num_vars()), dom)
}

/// Values of the outermost block for which the rest of the sentence holds.
pub fn witnesses_with_domains(s: &ShortSentence, dom: &Domain) -> Result<Vec<Vec<Int>>> {
    if s.prefix.is_empty() {
        return Err(Error::InvalidInput("sentence has no quantifier".into()));
    }
    let mut out = vec![];
    for cand in dom(0, &[])? {
        let mut asg = cand.clone();
        if eval_from(s, 1, &mut asg, dom)? {
            out.push(cand);
        }
    }
    Ok(out)
}

fn box_domain<'a>(s: &'a ShortSentence, bx: &'a BoundedBox) -> Result<impl Fn(usize, &[Int]) -> Result<Vec<Vec<Int>>> + Sync + 'a> {
    if bx.ranges.len() != s.num_vars() {
        return Err(Error::InvalidInput(format!(
            "box has {} ranges for {} variables",
            bx.ranges.len(),
            s.num_vars()
        )));
    }
    for i in 0..s.prefix.len() {
        let vol = bx.volume(s.block_range(i));
        if vol > Int::from(LEVEL_LIMIT) {
            return Err(Error::scale(format!("box volume of block {i}"), vol, LEVEL_LIMIT));
        }
    }
    Ok(move |level: usize, _: &[Int]| {
        let parts = s
            .block_range(level)
            .map(|v| range_values(&bx.ranges[v].0, &bx.ranges[v].1).into_iter().map(|x| vec![x]).collect())
            .collect();
        Ok(product(parts))
    })
}

/// Exhaustive evaluation with every variable confined to its box range.
/// Whether the box is large enough to be faithful is the caller's concern.
pub fn decide_bounded(s: &ShortSentence, bx: &BoundedBox) -> Result<bool> {
    let dom = box_domain(s, bx)?;
    decide_with_domains(s, &dom)
}

pub fn count_bounded(s: &ShortSentence, bx: &BoundedBox) -> Result<Int> {
    let dom = box_domain(s, bx)?;
    Ok(Int::from(witnesses_with_domains(s, &dom)?.len()))
}

/// Candidate generator built from a sentence's encoding metadata.
pub struct CertifiedDomains<'a> {
    sentence: &'a ShortSentence,
    meta: &'a SentenceMeta,
    chains: Vec<Vec<LatticePoint>>,
    // parallelogram points of the chain candidates, which do not depend on
    // the outer variables
    cells: Vec<HashMap<LatticePoint, Option<LatticePoint>>>,
}

impl<'a> CertifiedDomains<'a> {
    pub fn new(sentence: &'a ShortSentence) -> Result<Self> {
        let meta = sentence.meta.as_ref().ok_or(Error::MissingMetadata)?;
        if meta.slots.len() != sentence.prefix.len() {
            return Err(Error::InvalidInput("metadata does not match the prefix".into()));
        }
        let chains: Vec<Vec<LatticePoint>> = meta.encodings.iter().map(Encoding::shortened_chain).collect();
        let cells = chains
            .iter()
            .zip(&meta.encodings)
            .map(|(chain, enc)| {
                chain
                    .iter()
                    .map(|y| (y.clone(), parallelogram_point(y, &enc.p, &enc.q)))
                    .collect()
            })
            .collect();
        Ok(CertifiedDomains {
            sentence,
            meta,
            chains,
            cells,
        })
    }

    fn encoding(&self, group: usize) -> Result<&Encoding> {
        self.meta
            .encodings
            .get(group)
            .ok_or_else(|| Error::InvalidInput(format!("no encoding for group {group}")))
    }

    fn chain_candidates(&self, group: usize) -> Vec<Vec<Int>> {
        let mut out: Vec<Vec<Int>> = self.chains[group]
            .iter()
            .map(|p| vec![p.y1.clone(), p.y2.clone()])
            .collect();
        out.push(vec![Int::zero(), Int::zero()]);
        out
    }

    fn slot_candidates(&self, slot: &Slot, asg: &[Int]) -> Result<Vec<Vec<Int>>> {
        Ok(match &slot.role {
            Role::Interval { lo, hi } => range_values(lo, hi).into_iter().map(|z| vec![z]).collect(),
            Role::Chain { group } => self.chain_candidates(*group),
            Role::ChainOrInterval { group, lo, hi } => {
                let mut out = self.chain_candidates(*group);
                out.extend(range_values(lo, hi).into_iter().map(|z| vec![z, Int::zero()]));
                out
            }
            Role::Witness { group, target, y } => {
                let enc = self.encoding(*group)?;
                let zeta = target.eval(asg)?;
                let y1 = asg.get(y[0]).ok_or(Error::MissingVariable(y[0]))?;
                let y2 = asg.get(y[1]).ok_or(Error::MissingVariable(y[1]))?;
                let mut out = vec![vec![floor_div(&(&zeta - y2 - 1), &enc.modulus), Int::zero()]];
                let y = LatticePoint {
                    y1: y1.clone(),
                    y2: y2.clone(),
                };
                let cell = match self.cells[*group].get(&y) {
                    Some(c) => c.clone(),
                    None => parallelogram_point(&y, &enc.p, &enc.q),
                };
                if let Some(x) = cell {
                    out.push(vec![x.y1, x.y2]);
                }
                out.push(vec![Int::zero(), Int::zero()]);
                let mut seen = HashSet::new();
                out.retain(|c| seen.insert(c.clone()));
                out
            }
        })
    }

    pub fn candidates(&self, level: usize, asg: &[Int]) -> Result<Vec<Vec<Int>>> {
        let slots = &self.meta.slots[level];
        let mut parts = Vec::with_capacity(slots.len());
        let mut expect = self.sentence.block_range(level).start;
        for slot in slots {
            if slot.vars.start != expect {
                return Err(Error::InvalidInput(format!("slot layout of block {level} has a gap")));
            }
            expect = slot.vars.end;
            parts.push(self.slot_candidates(slot, asg)?);
        }
        if expect != self.sentence.block_range(level).end {
            return Err(Error::InvalidInput(format!("slot layout of block {level} is incomplete")));
        }
        let size: usize = parts.iter().map(Vec::len).product();
        if size as u64 > LEVEL_LIMIT {
            return Err(Error::scale(format!("candidates of block {level}"), size, LEVEL_LIMIT));
        }
        Ok(product(parts))
    }
}

/// Smallest `x >= 0` with `lo <= a*x mod m <= hi`, for `0 <= lo <= hi < m`
/// and `0 <= a < m`. Euclid-style descent on `(a, m)`.
fn first_residue_in(a: &Int, m: &Int, lo: &Int, hi: &Int) -> Option<Int> {
    if lo.is_zero() {
        return Some(Int::zero());
    }
    if a.is_zero() {
        return None;
    }
    let k = ceil_div(lo, a);
    if a * &k <= *hi {
        return Some(k);
    }
    // no multiple of a lies in [lo, hi]; solve for the wrap count instead
    let y = first_residue_in(&m.mod_floor(a), a, &(-hi).mod_floor(a), &(-lo).mod_floor(a))?;
    Some(ceil_div(&(lo + m * y), a))
}

/// A lattice point of the half-open parallelogram
/// `{x : v·y >= v·x >= 0, y2 > x2 > 0}` with `v = (p, -q)`, or `None` when it
/// is lattice-free. Needs `p >= 1`, `gcd(p, q) = 1`.
///
/// Row `x2` contributes a point iff `-q*x2 mod p <= v·y`, so this asks for
/// the first `x2 >= 1` whose residue lands in `[0, v·y]`.
pub fn parallelogram_point(y: &LatticePoint, p: &Int, q: &Int) -> Option<LatticePoint> {
    let vy = p * &y.y1 - q * &y.y2;
    if vy.is_negative() || y.y2 <= Int::one() {
        return None;
    }
    let a = (-q).mod_floor(p);
    let top = vy.clone().min(p - 1);
    // x2 = x + 1 with x >= 0: a*x mod p in [-a, top - a], possibly wrapping
    let lo = (-&a).mod_floor(p);
    let hi = (&top - &a).mod_floor(p);
    let x = if lo <= hi {
        first_residue_in(&a, p, &lo, &hi)
    } else {
        let left = first_residue_in(&a, p, &Int::zero(), &hi);
        let right = first_residue_in(&a, p, &lo, &(p - 1));
        left.into_iter().chain(right).min()
    }?;
    let x2 = x + 1;
    if x2 >= y.y2 {
        return None;
    }
    let x1 = ceil_div(&(q * &x2), p);
    debug_assert!(p * &x1 - q * &x2 <= vy);
    Some(LatticePoint { y1: x1, y2: x2 })
}

pub fn decide_certified(s: &ShortSentence) -> Result<bool> {
    let cd = CertifiedDomains::new(s)?;
    decide_with_domains(s, &|level, asg| cd.candidates(level, asg))
}

/// Outermost-block values accepted by the certified evaluator.
pub fn witnesses_certified(s: &ShortSentence) -> Result<Vec<Vec<Int>>> {
    let cd = CertifiedDomains::new(s)?;
    if s.prefix.first().map(|b| b.quantifier) != Some(Quantifier::Exists) {
        return Err(Error::InvalidInput("counting needs an existential outer block".into()));
    }
    witnesses_with_domains(s, &|level, asg| cd.candidates(level, asg))
}

pub fn count_certified(s: &ShortSentence) -> Result<Int> {
    Ok(Int::from(witnesses_certified(s)?.len()))
}
