//! CNF and QBF front end with reductions to interval covering by
//! progressions. Variable `j` (1-based) is tied to the `j`-th assigned prime:
//! `z ≡ 1` means true, `z ≡ 0` false, other residues are excluded.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::apcover::{APCoverInstance, APTriple, MAPCoverInstance};
use crate::error::{Error, Result};
use crate::exactmath::{crt_solve, first_primes, floor_div, primes_from, Int};
use crate::presburger::Quantifier;

pub const MAX_SAT_VARS: usize = 24;
pub const MAX_QBF_VARS: usize = 20;
pub const MAX_QBF_BLOCKS: usize = 3;

/// Conjunction of three-literal clauses. Literal `j` is variable `j`,
/// `-j` its negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf3 {
    pub num_vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf3 {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidInput(format!(
                        "literal {l} outside variables 1..{num_vars}"
                    )));
                }
            }
        }
        Ok(Cnf3 { num_vars, clauses })
    }

    /// Evaluate under `assignment[j - 1]` for variable `j`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Per-clause bit masks of positive and negated variables.
    fn masks(&self) -> Vec<(u32, u32)> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter().fold((0, 0), |(pos, neg), &l| {
                    let bit = 1u32 << (l.unsigned_abs() - 1);
                    if l > 0 {
                        (pos | bit, neg)
                    } else {
                        (pos, neg | bit)
                    }
                })
            })
            .collect()
    }
}

/// Number of satisfying assignments, by enumeration.
pub fn count_sat(f: &Cnf3) -> Result<Int> {
    if f.num_vars > MAX_SAT_VARS {
        return Err(Error::scale("#SAT variables", f.num_vars, MAX_SAT_VARS));
    }
    let masks = f.masks();
    let count = (0u32..1 << f.num_vars)
        .filter(|a| masks.iter().all(|(pos, neg)| a & pos != 0 || !a & neg != 0))
        .count();
    Ok(Int::from(count))
}

/// Residue class of the points falsifying a clause, or `None` for a clause
/// containing both a variable and its negation.
fn falsifying_class(clause: &[i32; 3], primes: &[Int]) -> Option<(Int, Int)> {
    let mut parts: Vec<(Int, Int)> = vec![];
    for &l in clause {
        let p = &primes[l.unsigned_abs() as usize - 1];
        let r = if l > 0 { Int::zero() } else { Int::one() };
        match parts.iter().find(|(_, q)| q == p) {
            Some((s, _)) if *s != r => return None,
            Some(_) => {}
            None => parts.push((r, p.clone())),
        }
    }
    let modulus: Int = parts.iter().map(|(_, p)| p).product();
    let e = crt_solve(&parts).expect("distinct primes are coprime");
    Some((e, modulus))
}

/// Members of the residue class `r mod step` inside `[0, max]`.
fn class_in(r: &Int, step: &Int, max: &Int) -> Option<APTriple> {
    let g = r.mod_floor(step);
    if g > *max {
        return None;
    }
    Some(APTriple::new(g.clone(), floor_div(&(max - &g), step), step.clone()).expect("valid class"))
}

/// Progressions removing residues `2..p-1` modulo each prime from `[0, max]`.
fn exclusions(primes: &[Int], max: &Int) -> Vec<APTriple> {
    let mut out = vec![];
    for p in primes {
        let mut r = Int::from(2);
        while r < *p {
            out.extend(class_in(&r, p, max));
            r += 1;
        }
    }
    out
}

/// Maps uncovered points of a reduced instance back to assignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoder {
    pub primes: Vec<Int>,
    /// Whether points are additionally forced odd.
    pub parity: bool,
}

impl Decoder {
    pub fn decode(&self, z: &Int) -> Vec<bool> {
        self.primes.iter().map(|p| z.mod_floor(p).is_one()).collect()
    }

    pub fn encode(&self, assignment: &[bool]) -> Int {
        let mut parts: Vec<(Int, Int)> = self
            .primes
            .iter()
            .zip(assignment)
            .map(|(p, &b)| (Int::from(b as u8), p.clone()))
            .collect();
        if self.parity {
            parts.push((Int::one(), Int::from(2)));
        }
        crt_solve(&parts).expect("distinct primes are coprime")
    }
}

/// Reduce a formula to an interval covering instance whose uncovered points
/// are in bijection with satisfying assignments.
///
/// With `parity_trick` the primes start at 3, the window doubles to
/// `[0, 2 p_1 ... p_l - 1]` and every even point is covered, so uncovered
/// points are odd.
pub fn reduce_3sat_to_apcover(f: &Cnf3, parity_trick: bool) -> Result<(APCoverInstance, Decoder)> {
    if f.num_vars > MAX_SAT_VARS {
        return Err(Error::scale("3SAT reduction variables", f.num_vars, MAX_SAT_VARS));
    }
    let primes = if parity_trick {
        primes_from(1, f.num_vars)
    } else {
        first_primes(f.num_vars)
    };
    let mut size: Int = primes.iter().product();
    if parity_trick {
        size *= 2;
    }
    let max = &size - 1;
    let mut triples = exclusions(&primes, &max);
    for c in &f.clauses {
        if let Some((e, step)) = falsifying_class(c, &primes) {
            triples.extend(class_in(&e, &step, &max));
        }
    }
    if parity_trick {
        triples.extend(class_in(&Int::zero(), &Int::from(2), &max));
    }
    let inst = APCoverInstance::new(0, max, triples)?;
    Ok((
        inst,
        Decoder {
            primes,
            parity: parity_trick,
        },
    ))
}

/// Prenex QBF over a three-literal matrix, blocks listed outermost first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfInstance {
    pub blocks: Vec<(Quantifier, Vec<usize>)>,
    pub matrix: Cnf3,
}

impl QbfInstance {
    pub fn new(blocks: Vec<(Quantifier, Vec<usize>)>, matrix: Cnf3) -> Result<Self> {
        let q = QbfInstance { blocks, matrix };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.matrix.num_vars;
        if self.blocks.is_empty() || self.blocks.iter().any(|(_, v)| v.is_empty()) {
            return Err(Error::InvalidInput("quantifier blocks must be nonempty".into()));
        }
        if self.blocks.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("quantifier blocks must alternate".into()));
        }
        if self.blocks.last().map(|b| b.0) != Some(Quantifier::Exists) {
            return Err(Error::InvalidInput("innermost block must be existential".into()));
        }
        let mut seen = vec![false; n];
        for &v in self.blocks.iter().flat_map(|(_, vs)| vs) {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidInput(format!(
                    "variable {v} is out of range or quantified twice"
                )));
            }
            seen[v - 1] = true;
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidInput(format!("variable {} is not quantified", j + 1)));
        }
        Ok(())
    }
}

/// Truth of a QBF by exhaustive expansion.
pub fn decide_qbf(f: &QbfInstance) -> Result<bool> {
    f.validate()?;
    if f.matrix.num_vars > MAX_QBF_VARS {
        return Err(Error::scale("QBF variables", f.matrix.num_vars, MAX_QBF_VARS));
    }
    let order: Vec<(Quantifier, usize)> = f
        .blocks
        .iter()
        .flat_map(|(q, vs)| vs.iter().map(move |&v| (*q, v)))
        .collect();
    let mut asg = vec![false; f.matrix.num_vars];
    Ok(expand(f, &order, &mut asg))
}

fn expand(f: &QbfInstance, order: &[(Quantifier, usize)], asg: &mut [bool]) -> bool {
    let Some(&(q, v)) = order.first() else {
        return f.matrix.eval(asg);
    };
    let mut branch = [false, true].into_iter().map(|b| {
        asg[v - 1] = b;
        expand(f, &order[1..], asg)
    });
    match q {
        Quantifier::Exists => branch.any(|b| b),
        Quantifier::Forall => branch.all(|b| b),
    }
}

/// Reduce a QBF to an alternating covering instance of equal truth.
///
/// Block `t` gets its own primes (assigned in block order) and the interval
/// `[0, P_t - 1]`, `P_t` their product. `tau_t` is 1 modulo `P_t` and 0
/// modulo every other block product, so the combination agrees with `z_t`
/// modulo each prime of block `t`. Outer groups exclude non-Boolean
/// residues; the innermost group excludes the innermost block's non-Boolean
/// residues and every clause's falsifying class over the combination range.
pub fn reduce_qbf_to_mapcover(f: &QbfInstance) -> Result<MAPCoverInstance> {
    f.validate()?;
    if f.matrix.num_vars > MAX_QBF_VARS {
        return Err(Error::scale("QBF variables", f.matrix.num_vars, MAX_QBF_VARS));
    }
    if f.blocks.len() > MAX_QBF_BLOCKS {
        return Err(Error::scale("QBF blocks", f.blocks.len(), MAX_QBF_BLOCKS));
    }
    let pool = first_primes(f.matrix.num_vars);
    let mut var_prime = vec![Int::zero(); f.matrix.num_vars];
    let mut block_primes: Vec<Vec<Int>> = vec![];
    let mut next = 0;
    for (_, vs) in &f.blocks {
        let ps: Vec<Int> = pool[next..next + vs.len()].to_vec();
        for (v, p) in vs.iter().zip(&ps) {
            var_prime[v - 1] = p.clone();
        }
        next += vs.len();
        block_primes.push(ps);
    }
    let products: Vec<Int> = block_primes.iter().map(|ps| ps.iter().product()).collect();
    let m = f.blocks.len();
    let taus: Vec<Int> = (0..m)
        .map(|t| {
            let parts: Vec<(Int, Int)> = products
                .iter()
                .enumerate()
                .map(|(s, p)| (Int::from((s == t) as u8), p.clone()))
                .collect();
            crt_solve(&parts)
        })
        .collect::<Result<_>>()?;
    let intervals: Vec<(Int, Int)> = products.iter().map(|p| (Int::zero(), p - 1)).collect();
    let combo_max: Int = taus.iter().zip(&intervals).map(|(tau, (_, hi))| tau * hi).sum();

    let mut groups: Vec<Vec<APTriple>> = (0..m - 1)
        .map(|t| exclusions(&block_primes[t], &intervals[t].1))
        .collect();
    let mut last = exclusions(&block_primes[m - 1], &combo_max);
    for c in &f.matrix.clauses {
        if let Some((e, step)) = falsifying_class(c, &var_prime) {
            last.extend(class_in(&e, &step, &combo_max));
        }
    }
    groups.push(last);
    MAPCoverInstance::new(intervals, groups, taus, f.blocks.iter().map(|b| b.0).collect())
}
