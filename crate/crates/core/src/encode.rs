//! Compile an interval-covering instance into a continued fraction whose
//! upper chain reduces modulo `M` onto the covered set, and from there into
//! short prenex Presburger sentences.

use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::apcover::{normalize, APCoverInstance, APTriple, MAPCoverInstance};
use crate::contfrac::{chain_points, convergents, segment_points, ContinuedFraction, ConvergentChains, LatticePoint};
use crate::error::{Error, Result};
use crate::exactmath::{mod_inverse, Int};
use crate::presburger::{
    AffineExpr, Block, BoolTree, LinearInequality, Quantifier, Role, SentenceMeta, ShortSentence, Slot,
};

pub use crate::presburger::ShortSentence as Sentence;

/// `M = 1 + nu * prod g_i (g_i + h_i e_i)`.
#[allow(non_snake_case)]
pub fn compute_M(inst: &APCoverInstance) -> Result<Int> {
    let mut prod = Int::one();
    for t in &inst.triples {
        prod *= &t.g * t.last();
    }
    let m = Int::one() + &inst.nu * prod;
    let ok = m > inst.nu
        && inst.triples.iter().all(|t| {
            m > t.last() && m.gcd(&t.g).is_one() && m.gcd(&t.last()).is_one()
        });
    if !ok {
        return Err(Error::InvalidInput(format!(
            "modulus {m} fails the size or coprimality requirements (is the instance normalized?)"
        )));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoding {
    pub modulus: Int,
    pub cfrac: ContinuedFraction,
    pub chains: ConvergentChains,
    pub p: Int,
    pub q: Int,
    pub g1: Int,
    /// Normalized instance whose window the sentences range over.
    pub source: APCoverInstance,
    /// Progressions actually encoded (the source's, padded when empty).
    pub triples: Vec<APTriple>,
    /// Translation from the caller's original window to `source`'s.
    pub shift: Int,
}

impl Encoding {
    /// Assemble an encoding from explicit terms without any checks.
    pub fn from_parts(
        modulus: Int,
        cfrac: ContinuedFraction,
        source: APCoverInstance,
        triples: Vec<APTriple>,
        shift: Int,
    ) -> Self {
        let chains = convergents(&cfrac);
        let end = chains.endpoint().clone();
        Encoding {
            modulus,
            g1: cfrac.a_terms()[0].clone(),
            cfrac,
            chains,
            p: end.y2,
            q: end.y1,
            source,
            triples,
            shift,
        }
    }

    /// `v = (p, -q)`.
    pub fn v(&self) -> (Int, Int) {
        (self.p.clone(), -&self.q)
    }

    pub fn dot_v(&self, y: &LatticePoint) -> Int {
        &self.p * &y.y1 - &self.q * &y.y2
    }

    /// The chain with its first `g1` lattice points removed.
    pub fn shortened_chain(&self) -> Vec<LatticePoint> {
        use num_traits::ToPrimitive;
        chain_points(&self.chains, self.g1.to_usize().expect("g1 fits in usize"))
    }

    /// Residues modulo `M` of the heights of the shortened chain.
    pub fn delta(&self) -> BTreeSet<Int> {
        self.shortened_chain()
            .iter()
            .map(|y| y.y2.mod_floor(&self.modulus))
            .collect()
    }

    /// Whether `z` is congruent to the height of some shortened-chain point.
    pub fn covers(&self, z: &Int) -> bool {
        self.delta().contains(&z.mod_floor(&self.modulus))
    }
}

// b with b * c + r ≡ target (mod m), taken in [1, m].
fn solve_term(c: &Int, r: &Int, target: &Int, m: &Int) -> Result<Int> {
    let b = ((target - r) * mod_inverse(c, m)?).mod_floor(m);
    Ok(if b.is_zero() { m.clone() } else { b })
}

/// Encode a normalized instance. An instance without progressions is padded
/// with `{nu + 1, nu + 2}`, which misses the window.
pub fn build_encoding(inst: &APCoverInstance) -> Result<Encoding> {
    if !inst.is_normalized() {
        return Err(Error::InvalidInput(
            "encoding needs a normalized instance (mu >= 1, every g >= 2, every h >= 1)".into(),
        ));
    }
    let mut triples = inst.triples.clone();
    if triples.is_empty() {
        triples.push(APTriple::new(&inst.nu + 1, 1, 1)?);
    }
    let padded = APCoverInstance {
        triples: triples.clone(),
        ..inst.clone()
    };
    let m = compute_M(&padded)?;

    let first = &triples[0];
    let mut a = vec![first.g.clone()];
    let mut b = vec![];
    // heights of the latest C and D convergents, modulo m
    let mut c_height = first.g.mod_floor(&m);
    let mut d_height = Int::one();
    for (i, t) in triples.iter().enumerate() {
        let bi = solve_term(&c_height, &d_height, &t.e, &m)?;
        d_height = (&bi * &c_height + &d_height).mod_floor(&m);
        b.push(bi);
        a.push(t.h.clone());
        c_height = (&t.h * &d_height + &c_height).mod_floor(&m);
        if let Some(next) = triples.get(i + 1) {
            let bi = solve_term(&c_height, &d_height, &(&next.g - t.last()), &m)?;
            d_height = (&bi * &c_height + &d_height).mod_floor(&m);
            b.push(bi);
            a.push(Int::one());
            c_height = (&d_height + &c_height).mod_floor(&m);
        }
    }
    let cfrac = ContinuedFraction::new(a, b)?;
    Ok(Encoding::from_parts(m, cfrac, inst.clone(), triples, Int::zero()))
}

/// Normalize the window `[mu, nu]` with the given progressions and encode it,
/// recording the shift.
pub fn encode_window(mu: &Int, nu: &Int, triples: &[APTriple]) -> Result<Encoding> {
    let n = normalize(&APCoverInstance::new(mu.clone(), nu.clone(), triples.to_vec())?);
    let mut enc = build_encoding(&n.instance)?;
    enc.shift = n.shift;
    Ok(enc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionCheck {
    pub condition: u8,
    pub index: usize,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<u8> {
        let mut f: Vec<u8> = self.checks.iter().filter(|c| !c.pass).map(|c| c.condition).collect();
        f.dedup();
        f
    }

    fn push(&mut self, condition: u8, index: usize, pass: bool, detail: impl Into<String>) {
        self.checks.push(ConditionCheck {
            condition,
            index,
            pass,
            detail: detail.into(),
        });
    }
}

/// Verify the seven structural conditions tying the continued fraction to
/// the encoded progressions.
pub fn check_conditions(enc: &Encoding) -> ConditionReport {
    let mut rep = ConditionReport::default();
    let m = &enc.modulus;
    let a = enc.cfrac.a_terms();
    let c = &enc.chains.c;
    let k = enc.triples.len();

    let in_range = enc.cfrac.terms().iter().all(|t| t.is_positive() && t <= m);
    rep.push(1, 0, in_range, "all terms in [1, M]");
    if a.len() != 2 * k {
        rep.push(1, 0, false, format!("{} a-terms for {} progressions", a.len(), k));
        return rep;
    }
    for i in 1..k {
        rep.push(2, i, a[2 * i].is_one(), format!("a_{} = {}", 2 * i, a[2 * i]));
    }
    for (i, t) in enc.triples.iter().enumerate().map(|(i, t)| (i + 1, t)) {
        rep.push(3, i, a[2 * i - 1] == t.h, format!("a_{} = {}, h = {}", 2 * i - 1, a[2 * i - 1], t.h));
        let lo = &c[2 * i - 1];
        let hi = &c[2 * i];
        rep.push(
            4,
            i,
            lo.y2.mod_floor(m) == t.g.mod_floor(m),
            format!("C_{} height mod M = {}", 2 * i - 1, lo.y2.mod_floor(m)),
        );
        rep.push(
            5,
            i,
            hi.y2.mod_floor(m) == t.last().mod_floor(m),
            format!("C_{} height mod M = {}", 2 * i, hi.y2.mod_floor(m)),
        );
        let seg = segment_points(lo, hi);
        let residues: BTreeSet<Int> = seg.iter().map(|y| y.y2.mod_floor(m)).collect();
        let mut expected = BTreeSet::new();
        let mut j = Int::zero();
        while j <= t.h {
            expected.insert((&t.g + &j * &t.e).mod_floor(m));
            j += 1;
        }
        rep.push(
            6,
            i,
            Int::from(seg.len()) == &t.h + 1 && residues == expected,
            format!("{} points on segment, residues {:?}", seg.len(), residues),
        );
        if i < k {
            let n = segment_points(hi, &c[2 * i + 1]).len();
            rep.push(7, i, n == 2, format!("{n} points on connecting segment"));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Sentence construction. Variables are symbolic ids during construction and
// are renumbered in prefix order at the end.

#[derive(Clone, Debug)]
struct Lin {
    terms: Vec<(usize, Int)>,
    constant: Int,
}

impl Lin {
    fn var(id: usize) -> Lin {
        Lin {
            terms: vec![(id, Int::one())],
            constant: Int::zero(),
        }
    }

    fn zero() -> Lin {
        Lin {
            terms: vec![],
            constant: Int::zero(),
        }
    }

    fn plus(mut self, id: usize, c: Int) -> Lin {
        self.terms.push((id, c));
        self
    }

    fn shifted(mut self, c: &Int) -> Lin {
        self.constant += c;
        self
    }

    fn scaled(&self, k: &Int) -> Lin {
        Lin {
            terms: self.terms.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    fn add(mut self, o: &Lin) -> Lin {
        self.terms.extend(o.terms.iter().cloned());
        self.constant += &o.constant;
        self
    }

    fn rename(&mut self, from: usize, to: usize) {
        for (v, _) in &mut self.terms {
            if *v == from {
                *v = to;
            }
        }
    }
}

/// `expr <= 0`.
fn le0(expr: Lin) -> STree {
    STree::Leaf(expr)
}

#[derive(Clone, Debug)]
enum STree {
    And(Vec<STree>),
    Or(Vec<STree>),
    Leaf(Lin),
}

impl STree {
    fn rename(&mut self, from: usize, to: usize) {
        match self {
            STree::Leaf(l) => l.rename(from, to),
            STree::And(k) | STree::Or(k) => k.iter_mut().for_each(|t| t.rename(from, to)),
        }
    }

    fn negated(&self) -> STree {
        match self {
            // not (e <= 0)  <=>  -e + 1 <= 0
            STree::Leaf(l) => STree::Leaf(l.scaled(&Int::from(-1)).shifted(&Int::one())),
            STree::And(k) => STree::Or(k.iter().map(STree::negated).collect()),
            STree::Or(k) => STree::And(k.iter().map(STree::negated).collect()),
        }
    }
}

#[derive(Clone, Debug)]
enum SRole {
    Interval(Int, Int),
    Chain(usize),
    Witness { group: usize, target: Lin, y: [usize; 2] },
    ChainOrInterval(usize, Int, Int),
}

#[derive(Clone, Debug)]
struct SSlot {
    vars: Vec<usize>,
    role: SRole,
}

#[derive(Clone, Debug)]
struct SBlock {
    quantifier: Quantifier,
    slots: Vec<SSlot>,
}

#[derive(Clone, Debug)]
struct Part {
    blocks: Vec<SBlock>,
    matrix: STree,
}

impl Part {
    fn rename(&mut self, from: usize, to: usize) {
        self.matrix.rename(from, to);
        for b in &mut self.blocks {
            for s in &mut b.slots {
                if let SRole::Witness { target, y, .. } = &mut s.role {
                    target.rename(from, to);
                    for v in y.iter_mut() {
                        if *v == from {
                            *v = to;
                        }
                    }
                }
            }
        }
    }
}

#[derive(Default)]
struct Vars {
    next: usize,
}

impl Vars {
    fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    fn pair(&mut self) -> [usize; 2] {
        [self.fresh(), self.fresh()]
    }
}

fn slot(vars: &[usize], role: SRole) -> SSlot {
    SSlot {
        vars: vars.to_vec(),
        role,
    }
}

/// `lo <= z <= hi` as two rows.
fn in_interval(z: usize, lo: &Int, hi: &Int) -> Vec<STree> {
    vec![
        le0(Lin::zero().plus(z, Int::from(-1)).shifted(lo)),
        le0(Lin::var(z).shifted(&-hi)),
    ]
}

/// `z < lo or z > hi` as two rows.
fn outside_interval(z: usize, lo: &Int, hi: &Int) -> Vec<STree> {
    vec![
        le0(Lin::var(z).shifted(&(Int::one() - lo))),
        le0(Lin::zero().plus(z, Int::from(-1)).shifted(&(hi + 1))),
    ]
}

/// Eight rows saying the pair `x` witnesses that `target` is not congruent
/// to `y2` modulo `M`, or that `y` is not a shortened-chain point of `enc`:
///
/// `1 <= target - y2 - M x1 <= M-1  or  v·y <= -1  or  y2 <= g1-1  or
///  (v·y >= v·x >= 0 and y2-1 >= x2 >= 1)`.
fn avoids_residue(enc: &Encoding, target: &Lin, y: [usize; 2], x: [usize; 2]) -> STree {
    let (m, p, q) = (&enc.modulus, &enc.p, &enc.q);
    let neg = |v: &Int| -v;
    // t = target - y2 - M x1
    let t = target.clone().plus(y[1], Int::from(-1)).plus(x[0], neg(m));
    let vy = Lin::zero().plus(y[0], p.clone()).plus(y[1], neg(q));
    let vx = Lin::zero().plus(x[0], p.clone()).plus(x[1], neg(q));
    STree::Or(vec![
        STree::And(vec![
            le0(t.scaled(&Int::from(-1)).shifted(&Int::one())),
            le0(t.clone().shifted(&(Int::one() - m))),
        ]),
        le0(vy.clone().shifted(&Int::one())),
        le0(Lin::var(y[1]).shifted(&(Int::one() - &enc.g1))),
        STree::And(vec![
            le0(vx.clone().add(&vy.scaled(&Int::from(-1)))),
            le0(vx.scaled(&Int::from(-1))),
            le0(Lin::var(x[1]).plus(y[1], Int::from(-1)).shifted(&Int::one())),
            le0(Lin::zero().plus(x[1], Int::from(-1)).shifted(&Int::one())),
        ]),
    ])
}

fn finish(part: Part, encodings: Vec<Encoding>) -> ShortSentence {
    let mut index: HashMap<usize, usize> = HashMap::new();
    for b in &part.blocks {
        for s in &b.slots {
            for v in &s.vars {
                let n = index.len();
                index.insert(*v, n);
            }
        }
    }
    let n = index.len();
    let dense = |l: &Lin| -> (Vec<Int>, Int) {
        let mut coeffs = vec![Int::zero(); n];
        for (v, c) in &l.terms {
            coeffs[index[v]] += c;
        }
        (coeffs, l.constant.clone())
    };
    fn convert(t: &STree, dense: &dyn Fn(&Lin) -> (Vec<Int>, Int)) -> BoolTree {
        match t {
            STree::Leaf(l) => {
                let (coeffs, c) = dense(l);
                BoolTree::Leaf(LinearInequality::new(coeffs, -c))
            }
            STree::And(k) => BoolTree::And(k.iter().map(|t| convert(t, dense)).collect()),
            STree::Or(k) => BoolTree::Or(k.iter().map(|t| convert(t, dense)).collect()),
        }
    }
    let matrix = convert(&part.matrix, &dense);
    let mut prefix = vec![];
    let mut slots = vec![];
    for b in &part.blocks {
        prefix.push(Block {
            quantifier: b.quantifier,
            dim: b.slots.iter().map(|s| s.vars.len()).sum(),
        });
        slots.push(
            b.slots
                .iter()
                .map(|s| {
                    let start = index[&s.vars[0]];
                    let role = match &s.role {
                        SRole::Interval(lo, hi) => Role::Interval {
                            lo: lo.clone(),
                            hi: hi.clone(),
                        },
                        SRole::Chain(g) => Role::Chain { group: *g },
                        SRole::ChainOrInterval(g, lo, hi) => Role::ChainOrInterval {
                            group: *g,
                            lo: lo.clone(),
                            hi: hi.clone(),
                        },
                        SRole::Witness { group, target, y } => {
                            let (coeffs, constant) = dense(target);
                            Role::Witness {
                                group: *group,
                                target: AffineExpr { coeffs, constant },
                                y: [index[&y[0]], index[&y[1]]],
                            }
                        }
                    };
                    Slot {
                        vars: start..start + s.vars.len(),
                        role,
                    }
                })
                .collect(),
        );
    }
    ShortSentence {
        prefix,
        matrix,
        meta: Some(SentenceMeta { encodings, slots }),
    }
}

/// `exists z forall y exists x`: some `z` of the window is not congruent
/// modulo `M` to the height of any shortened-chain point. Five variables,
/// ten inequalities.
pub fn build_sentence3(enc: &Encoding) -> ShortSentence {
    let mut vars = Vars::default();
    let z = vars.fresh();
    let y = vars.pair();
    let x = vars.pair();
    let target = Lin::var(z);
    let mut rows = in_interval(z, &enc.source.mu, &enc.source.nu);
    rows.push(avoids_residue(enc, &target, y, x));
    let part = Part {
        blocks: vec![
            SBlock {
                quantifier: Quantifier::Exists,
                slots: vec![slot(&[z], SRole::Interval(enc.source.mu.clone(), enc.source.nu.clone()))],
            },
            SBlock {
                quantifier: Quantifier::Forall,
                slots: vec![slot(&y, SRole::Chain(0))],
            },
            SBlock {
                quantifier: Quantifier::Exists,
                slots: vec![slot(&x, SRole::Witness { group: 0, target, y })],
            },
        ],
        matrix: STree::And(rows),
    };
    finish(part, vec![enc.clone()])
}

/// Per-group encodings for an alternating instance. Group `t < m-1` is
/// encoded over its own interval, the last group over the range of the
/// tau-combination.
pub fn encode_groups(inst: &MAPCoverInstance) -> Result<Vec<Encoding>> {
    inst.validate()?;
    let m = inst.m();
    (0..m)
        .map(|t| {
            let (lo, hi) = if t + 1 == m {
                inst.combination_range()
            } else {
                inst.intervals[t].clone()
            };
            encode_window(&lo, &hi, &inst.groups[t])
        })
        .collect()
}

/// Prenex sentence equivalent to the alternating instance.
///
/// Levels are built innermost first. The innermost level is the
/// three-block sentence applied to the tau-combination. A universal level
/// `forall z (z outside J or z in Δ or rest)` writes `z in Δ` as
/// `exists E forall u (not avoids_residue)` and lets `E` double as the
/// leading existential variable of `rest` through `E1`. An existential level
/// `exists z (z in J and z avoids Δ and rest)` merges the universal and
/// existential blocks of `z avoids Δ` into those of `rest`.
/// For two levels this gives 9 variables and 20 inequalities.
pub fn build_sentence_m(inst: &MAPCoverInstance, encodings: &[Encoding]) -> Result<ShortSentence> {
    inst.validate()?;
    if encodings.len() != inst.m() {
        return Err(Error::InvalidInput(format!(
            "{} encodings for {} groups",
            encodings.len(),
            inst.m()
        )));
    }
    let mut vars = Vars::default();
    let part = build_level(inst, encodings, 0, Lin::zero(), &mut vars);
    Ok(finish(part, encodings.to_vec()))
}

fn build_level(inst: &MAPCoverInstance, encs: &[Encoding], t: usize, acc: Lin, vars: &mut Vars) -> Part {
    let m = inst.m();
    let (lo, hi) = inst.intervals[t].clone();
    let z = vars.fresh();
    let enc = &encs[t];
    if t + 1 == m {
        let y = vars.pair();
        let x = vars.pair();
        let target = acc.plus(z, inst.taus[t].clone()).shifted(&enc.shift);
        let mut rows = in_interval(z, &lo, &hi);
        rows.push(avoids_residue(enc, &target, y, x));
        return Part {
            blocks: vec![
                SBlock {
                    quantifier: Quantifier::Exists,
                    slots: vec![slot(&[z], SRole::Interval(lo, hi))],
                },
                SBlock {
                    quantifier: Quantifier::Forall,
                    slots: vec![slot(&y, SRole::Chain(t))],
                },
                SBlock {
                    quantifier: Quantifier::Exists,
                    slots: vec![slot(&x, SRole::Witness { group: t, target, y })],
                },
            ],
            matrix: STree::And(rows),
        };
    }
    let own = Lin::var(z).shifted(&enc.shift);
    let acc = acc.plus(z, inst.taus[t].clone());
    match inst.quantifiers[t] {
        Quantifier::Forall => {
            let shared = vars.pair();
            let u = vars.pair();
            let mut rest = build_level(inst, encs, t + 1, acc, vars);
            // the rest opens with `exists z'` for a single interval variable
            let lead = rest.blocks.remove(0);
            let (next, next_lo, next_hi) = match &lead.slots[..] {
                [SSlot {
                    vars: v,
                    role: SRole::Interval(a, b),
                }] => (v[0], a.clone(), b.clone()),
                _ => unreachable!("inner level opens with one interval variable"),
            };
            rest.rename(next, shared[0]);
            let mut rows = outside_interval(z, &lo, &hi);
            rows.push(avoids_residue(enc, &own, shared, u).negated());
            rows.push(rest.matrix);
            let mut blocks = vec![
                SBlock {
                    quantifier: Quantifier::Forall,
                    slots: vec![slot(&[z], SRole::Interval(lo, hi))],
                },
                SBlock {
                    quantifier: Quantifier::Exists,
                    slots: vec![slot(&shared, SRole::ChainOrInterval(t, next_lo, next_hi))],
                },
            ];
            let mut inner = rest.blocks;
            inner[0].slots.insert(
                0,
                slot(
                    &u,
                    SRole::Witness {
                        group: t,
                        target: own,
                        y: shared,
                    },
                ),
            );
            blocks.extend(inner);
            Part {
                blocks,
                matrix: STree::Or(rows),
            }
        }
        Quantifier::Exists => {
            let y = vars.pair();
            let x = vars.pair();
            let rest = build_level(inst, encs, t + 1, acc, vars);
            let mut rows = in_interval(z, &lo, &hi);
            rows.push(avoids_residue(enc, &own, y, x));
            rows.push(rest.matrix);
            let mut inner = rest.blocks;
            inner[0].slots.insert(0, slot(&y, SRole::Chain(t)));
            inner[1].slots.insert(
                0,
                slot(
                    &x,
                    SRole::Witness {
                        group: t,
                        target: own,
                        y,
                    },
                ),
            );
            let mut blocks = vec![SBlock {
                quantifier: Quantifier::Exists,
                slots: vec![slot(&[z], SRole::Interval(lo, hi))],
            }];
            blocks.extend(inner);
            Part {
                blocks,
                matrix: STree::And(rows),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apcover::{count_apcover, decide_mapcover, uncovered_points};
    use crate::exactmath::int;
    use crate::presburger::{count_certified, decide_bounded, decide_certified, witnesses_certified, BoundedBox};

    fn ap(g: i64, h: i64, e: i64) -> APTriple {
        APTriple::new(g, h, e).unwrap()
    }

    fn reference() -> APCoverInstance {
        APCoverInstance::new(1, 5, vec![ap(2, 1, 3)]).unwrap()
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(compute_M(&APCoverInstance::new(1, 4, vec![ap(2, 1, 1)]).unwrap()).unwrap(), int(25));
        assert_eq!(compute_M(&reference()).unwrap(), int(51));
        assert_eq!(compute_M(&APCoverInstance::new(1, 1, vec![]).unwrap()).unwrap(), int(2));
    }

    #[test]
    fn reference_encoding() {
        let enc = build_encoding(&reference()).unwrap();
        assert_eq!(enc.modulus, int(51));
        assert_eq!(enc.cfrac, ContinuedFraction::from_i64(&[2, 1, 1]).unwrap());
        assert_eq!(enc.chains.c[1], LatticePoint::new(1, 2));
        assert_eq!(enc.chains.d[1], LatticePoint::new(1, 3));
        assert_eq!(enc.chains.c[2], LatticePoint::new(2, 5));
        assert_eq!((enc.p.clone(), enc.q.clone()), (int(5), int(2)));
        assert_eq!(enc.shortened_chain(), vec![LatticePoint::new(1, 2), LatticePoint::new(2, 5)]);
        assert_eq!(enc.delta(), [int(2), int(5)].into_iter().collect());
        assert!(check_conditions(&enc).all_pass());
    }

    #[test]
    fn single_progression_trace() {
        // 3 b0 + 1 ≡ 4 (mod 364) has the solution b0 = 1
        assert_eq!((3 + 1), 4);
        let inst = APCoverInstance::new(1, 11, vec![ap(3, 2, 4)]).unwrap();
        let enc = build_encoding(&inst).unwrap();
        assert_eq!(enc.modulus, int(364));
        assert_eq!(enc.cfrac.b_terms()[0], int(1));
        assert_eq!(enc.delta(), [int(3), int(7), int(11)].into_iter().collect());
    }

    #[test]
    fn two_progressions() {
        let inst = APCoverInstance::new(1, 9, vec![ap(2, 1, 3), ap(3, 2, 2)]).unwrap();
        let enc = build_encoding(&inst).unwrap();
        let rep = check_conditions(&enc);
        assert!(rep.all_pass(), "{rep:?}");
        assert!(rep.checks.iter().any(|c| c.condition == 4 && c.index == 2 && c.pass));
        let c3 = &enc.chains.c[3];
        assert_eq!(c3.y2.mod_floor(&enc.modulus), int(3));
        assert_eq!(enc.delta(), [2, 5, 3, 7].iter().map(|&v| int(v)).collect());
    }

    #[test]
    fn corrupted_term_is_detected() {
        let enc = build_encoding(&reference()).unwrap();
        let mut b = enc.cfrac.b_terms().to_vec();
        b[0] += 1;
        let cf = ContinuedFraction::new(enc.cfrac.a_terms().to_vec(), b).unwrap();
        let bad = Encoding::from_parts(enc.modulus.clone(), cf, enc.source.clone(), enc.triples.clone(), int(0));
        let failed = check_conditions(&bad).failed();
        assert!(failed.contains(&5) || failed.contains(&6), "{failed:?}");
    }

    #[test]
    fn empty_instance_encodes() {
        let inst = APCoverInstance::new(1, 4, vec![]).unwrap();
        let enc = build_encoding(&inst).unwrap();
        assert!(check_conditions(&enc).all_pass());
        assert!((1..=4).all(|z| !enc.covers(&int(z))));
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(build_encoding(&APCoverInstance::new(0, 4, vec![]).unwrap()).is_err());
        assert!(build_encoding(&APCoverInstance::new(1, 4, vec![ap(2, 0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn sentence_shape_and_truth() {
        let enc = build_encoding(&reference()).unwrap();
        let s = build_sentence3(&enc);
        assert_eq!(s.num_vars(), 5);
        assert_eq!(s.num_inequalities(), 10);
        let dims: Vec<usize> = s.prefix.iter().map(|b| b.dim).collect();
        assert_eq!(dims, vec![1, 2, 2]);
        assert!(decide_certified(&s).unwrap());
        assert_eq!(count_certified(&s).unwrap(), int(3));
        let w: Vec<Int> = witnesses_certified(&s).unwrap().into_iter().map(|v| v[0].clone()).collect();
        assert_eq!(w, uncovered_points(&reference()).unwrap());
        let bx = BoundedBox::from_i64(&[(1, 5), (0, 2), (0, 5), (-1, 2), (0, 5)]).unwrap();
        assert!(decide_bounded(&s, &bx).unwrap());
    }

    #[test]
    fn covered_sentence_is_false() {
        let n = normalize(&APCoverInstance::new(2, 2, vec![ap(2, 1, 3)]).unwrap());
        let enc = build_encoding(&n.instance).unwrap();
        let s = build_sentence3(&enc);
        assert!(!decide_certified(&s).unwrap());
        assert_eq!(count_certified(&s).unwrap(), count_apcover(&n.instance).unwrap());

        let covered = APCoverInstance::new(2, 2, vec![ap(2, 1, 3)]).unwrap();
        let enc = build_encoding(&covered).unwrap();
        let s = build_sentence3(&enc);
        let bx = BoundedBox::from_i64(&[(2, 2), (0, enc.q.to_string().parse().unwrap()), (0, 5), (-1, 2), (0, 5)]).unwrap();
        assert!(!decide_bounded(&s, &bx).unwrap());
    }

    fn quant(s: &str) -> Vec<Quantifier> {
        s.chars().map(|c| Quantifier::from_char(c).unwrap()).collect()
    }

    #[test]
    fn two_level_sentence_shape() {
        let inst = MAPCoverInstance::new(
            vec![(int(0), int(2)), (int(0), int(4))],
            vec![vec![ap(2, 0, 1)], vec![ap(1, 1, 3)]],
            vec![int(1), int(1)],
            quant("AE"),
        )
        .unwrap();
        let encs = encode_groups(&inst).unwrap();
        let s = build_sentence_m(&inst, &encs).unwrap();
        assert_eq!(s.num_vars(), 9);
        assert_eq!(s.num_inequalities(), 20);
        let dims: Vec<usize> = s.prefix.iter().map(|b| b.dim).collect();
        assert_eq!(dims, vec![1, 2, 4, 2]);
        assert_eq!(decide_certified(&s).unwrap(), decide_mapcover(&inst).unwrap());
    }

    #[test]
    fn single_level_sentence_matches_three_block_form() {
        let inst = MAPCoverInstance::new(vec![(int(1), int(5))], vec![vec![ap(2, 1, 3)]], vec![int(1)], quant("E")).unwrap();
        let encs = encode_groups(&inst).unwrap();
        let s = build_sentence_m(&inst, &encs).unwrap();
        assert_eq!(s.num_vars(), 5);
        assert_eq!(s.num_inequalities(), 10);
        assert_eq!(s.matrix, build_sentence3(&encs[0]).matrix);
    }
}
