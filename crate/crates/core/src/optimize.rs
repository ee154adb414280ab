//! Bilevel max-min and Pareto-minimum instances whose optimal values encode
//! interval covering, with exhaustive solvers and a chain-based oracle.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::contfrac::{chain_points, convergents, lower_chain_points, to_odd_cfrac, LatticePoint};
use crate::encode::Encoding;
use crate::error::{Error, Result};
use crate::exactmath::{ceil_div, floor_div, rat_int, Int, Rat};
use crate::geometry::{triangle_q, HPolytope};
use crate::gip::polygon_points;
use crate::presburger::LinearInequality;

/// Largest lattice enumeration the brute solvers accept.
pub const OPT_LIMIT: u64 = 100_000_000;

/// Whether `u`, `v` straddle `alpha` with determinant one, and if so whether
/// `u` lies on the upper chain and `v` on the lower chain of `alpha`.
pub fn is_weak_convergent_pair(u: &LatticePoint, v: &LatticePoint, alpha: &Rat) -> bool {
    let (p, q) = (alpha.numer(), alpha.denom());
    let below = &u.y2 * q < p * &u.y1;
    let above = &v.y2 * q > p * &v.y1;
    let unimodular = &v.y2 * &u.y1 - &v.y1 * &u.y2 == Int::from(1);
    if !(below && above && unimodular) {
        return false;
    }
    let Ok(cf) = to_odd_cfrac(alpha) else {
        return false;
    };
    let chains = convergents(&cf);
    chain_points(&chains, 0).contains(u) && lower_chain_points(&chains).contains(v)
}

/// `x^T quad x + linear · x + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub quad: Vec<Vec<Rat>>,
    pub linear: Vec<Rat>,
    pub constant: Rat,
}

impl QuadraticForm {
    pub fn zero(n: usize) -> Self {
        QuadraticForm {
            quad: vec![vec![Rat::zero(); n]; n],
            linear: vec![Rat::zero(); n],
            constant: Rat::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    /// Add `c * x_i * x_j`, split symmetrically.
    fn add_product(&mut self, i: usize, j: usize, c: &Int) {
        if i == j {
            self.quad[i][i] += rat_int(c);
        } else {
            let half = rat_int(c) / Rat::from_integer(Int::from(2));
            self.quad[i][j] += &half;
            self.quad[j][i] += half;
        }
    }

    /// Nonzero terms over a common denominator, for repeated evaluation.
    pub fn compile(&self) -> CompiledForm {
        let den = self
            .quad
            .iter()
            .flatten()
            .chain(&self.linear)
            .chain(std::iter::once(&self.constant))
            .fold(Int::from(1), |acc, r| num_integer::Integer::lcm(&acc, r.denom()));
        let scale = |r: &Rat| (r * rat_int(&den)).to_integer();
        let n = self.dim();
        let mut quad = vec![];
        for i in 0..n {
            for j in 0..n {
                if !self.quad[i][j].is_zero() {
                    quad.push((i, j, scale(&self.quad[i][j])));
                }
            }
        }
        let linear = (0..n)
            .filter(|&i| !self.linear[i].is_zero())
            .map(|i| (i, scale(&self.linear[i])))
            .collect();
        CompiledForm {
            quad,
            linear,
            constant: scale(&self.constant),
            den,
        }
    }

    pub fn eval(&self, x: &[Int]) -> Rat {
        let xr: Vec<Rat> = x.iter().map(rat_int).collect();
        let mut acc = self.constant.clone();
        for (i, xi) in xr.iter().enumerate() {
            acc += &self.linear[i] * xi;
            for (j, xj) in xr.iter().enumerate() {
                if !self.quad[i][j].is_zero() {
                    acc += &self.quad[i][j] * xi * xj;
                }
            }
        }
        acc
    }
}

pub struct CompiledForm {
    quad: Vec<(usize, usize, Int)>,
    linear: Vec<(usize, Int)>,
    constant: Int,
    den: Int,
}

impl CompiledForm {
    pub fn eval(&self, x: &[Int]) -> Rat {
        let mut acc = self.constant.clone();
        for (i, c) in &self.linear {
            acc += c * &x[*i];
        }
        for (i, j, c) in &self.quad {
            acc += c * &x[*i] * &x[*j];
        }
        Rat::new(acc, self.den.clone())
    }
}

/// `max_{z in J} min_{w in W} h(z, w)` with `w = (u1, u2, v1, v2, t)`,
/// `W = Q × P × [0, T]` and
/// `h = K (v2 u1 - v1 u2 - 1) + (u2 - z - t M)^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilevelInstance {
    pub j: (Int, Int),
    pub w: HPolytope,
    /// Over `(z, u1, u2, v1, v2, t)`.
    pub h: QuadraticForm,
    pub k: Int,
    pub t_max: Int,
    pub modulus: Int,
    pub encoding: Encoding,
}

fn li(coeffs: &[Int], bound: Int) -> LinearInequality {
    LinearInequality::new(coeffs.to_vec(), bound)
}

/// `P = {v : v2 <= p - 1, v1 >= 1, p v1 - q v2 <= 0}`.
pub fn polygon_p(enc: &Encoding) -> HPolytope {
    let (o, z) = (Int::from(1), Int::zero());
    HPolytope {
        dim: 2,
        rows: vec![
            li(&[z.clone(), o.clone()], &enc.p - 1),
            li(&[-&o, z.clone()], -&o),
            li(&[enc.p.clone(), -&enc.q], z),
        ],
    }
}

pub fn build_bilevel(enc: &Encoding) -> BilevelInstance {
    let m = &enc.modulus;
    let t_max = ceil_div(&enc.p, m);
    let base = Int::from(2) * &t_max * m + &enc.p;
    let k = &base * &base * &base;

    let (o, z) = (Int::from(1), Int::zero());
    let mut rows = vec![];
    for r in triangle_q(enc).rows {
        let mut c = r.coeffs.clone();
        c.extend([z.clone(), z.clone(), z.clone()]);
        rows.push(li(&c, r.bound));
    }
    for r in polygon_p(enc).rows {
        let mut c = vec![z.clone(), z.clone()];
        c.extend(r.coeffs.iter().cloned());
        c.push(z.clone());
        rows.push(li(&c, r.bound));
    }
    rows.push(li(&[z.clone(), z.clone(), z.clone(), z.clone(), o.clone()], t_max.clone()));
    rows.push(li(&[z.clone(), z.clone(), z.clone(), z.clone(), -&o], z.clone()));
    let w = HPolytope { dim: 5, rows };

    // variables (z, u1, u2, v1, v2, t)
    let mut h = QuadraticForm::zero(6);
    h.add_product(4, 1, &k);
    h.add_product(3, 2, &-&k);
    h.constant = -rat_int(&k);
    // (u2 - z - M t)^2
    let sq = [(2usize, o.clone()), (0, -&o), (5, -m)];
    for (i, a) in &sq {
        for (j, b) in &sq {
            if i <= j {
                let c = if i == j { a * b } else { Int::from(2) * a * b };
                h.add_product(*i, *j, &c);
            }
        }
    }
    BilevelInstance {
        j: (enc.source.mu.clone(), enc.source.nu.clone()),
        w,
        h,
        k,
        t_max,
        modulus: m.clone(),
        encoding: enc.clone(),
    }
}

/// `min_{0 <= t <= T} (u2 - z - t M)^2`.
fn best_shift(u2: &Int, z: &Int, m: &Int, t_max: &Int) -> Int {
    let d = u2 - z;
    let lo = floor_div(&d, m).max(Int::zero()).min(t_max.clone());
    let hi: Int = (&lo + 1u32).min(t_max.clone());
    [lo, hi]
        .iter()
        .map(|t| {
            let r = &d - t * m;
            &r * &r
        })
        .min()
        .expect("two candidates")
}

/// Value of the bilevel program and, per `z`, the inner minimum, by exact
/// enumeration of `W`'s lattice points. `h` splits as a `v`-part and a
/// `t`-part, so the `v`-minimum is taken once per `u`.
pub fn bilevel_inner_minima_brute(inst: &BilevelInstance) -> Result<Vec<(Int, Int)>> {
    let enc = &inst.encoding;
    let us = polygon_points(&triangle_q(enc))?;
    let vs = polygon_points(&polygon_p(enc))?;
    let width = &inst.j.1 - &inst.j.0 + 1;
    let size = Int::from(us.len()) * Int::from(vs.len()) * (&inst.t_max + 1) * &width;
    if size > Int::from(OPT_LIMIT) {
        return Err(Error::scale("bilevel lattice", size, OPT_LIMIT));
    }
    if us.is_empty() || vs.is_empty() {
        return Err(Error::Empty);
    }
    let det_min: Vec<Int> = us
        .iter()
        .map(|u| {
            vs.iter()
                .map(|v| &v[1] * &u[0] - &v[0] * &u[1])
                .min()
                .expect("nonempty")
        })
        .collect();
    let mut out = vec![];
    let mut z = inst.j.0.clone();
    while z <= inst.j.1 {
        let best = us
            .iter()
            .zip(&det_min)
            .map(|(u, d)| {
                let mut t = Int::zero();
                let mut sq: Option<Int> = None;
                while t <= inst.t_max {
                    let r = &u[1] - &z - &t * &inst.modulus;
                    let v = &r * &r;
                    sq = Some(sq.map_or(v.clone(), |s: Int| s.min(v)));
                    t += 1;
                }
                &inst.k * (d - 1) + sq.expect("t range nonempty")
            })
            .min()
            .expect("nonempty");
        out.push((z.clone(), best));
        z += 1;
    }
    Ok(out)
}

pub fn solve_bilevel_brute(inst: &BilevelInstance) -> Result<Int> {
    Ok(bilevel_inner_minima_brute(inst)?
        .into_iter()
        .map(|(_, v)| v)
        .max()
        .expect("J is nonempty"))
}

/// Chain-based value: for each `z`, the least `(u2 - z - tM)^2` over the
/// shortened chain and `t` in `[0, T]`, maximized over `z`.
pub fn bilevel_value_semantic(inst: &BilevelInstance) -> Result<Int> {
    let chain = inst.encoding.shortened_chain();
    let width = &inst.j.1 - &inst.j.0 + 1;
    let size = Int::from(chain.len()) * &width;
    if size > Int::from(OPT_LIMIT) {
        return Err(Error::scale("chain scan", size, OPT_LIMIT));
    }
    let mut best: Option<Int> = None;
    let mut z = inst.j.0.clone();
    while z <= inst.j.1 {
        let inner = chain
            .iter()
            .map(|u| best_shift(&u.y2, &z, &inst.modulus, &inst.t_max))
            .min()
            .ok_or(Error::Empty)?;
        best = Some(best.map_or(inner.clone(), |b: Int| b.max(inner)));
        z += 1;
    }
    best.ok_or(Error::Empty)
}

/// Minimize `g` over the Pareto minima of `(f1, f2, f3)(x)`, `x` in `Q6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParetoInstance {
    /// `J × W` over `(z, u1, u2, v1, v2, t)`.
    pub q6: HPolytope,
    pub f1: Vec<Int>,
    pub f2: Vec<Int>,
    pub f3: QuadraticForm,
    /// Over the outcome space.
    pub g: Vec<Int>,
    pub bilevel: BilevelInstance,
    pub parity_trick: bool,
}

/// `f1 = z`, `f2 = -z`, `f3 = h`, `g(y) = -y3`. Since `f1`, `f2` make
/// outcomes with different `z` incomparable, the Pareto minima are the
/// inner minima of the bilevel program, and `min g` is minus its value.
pub fn build_pareto(enc: &Encoding, parity_trick: bool) -> ParetoInstance {
    let bilevel = build_bilevel(enc);
    let (o, z) = (Int::from(1), Int::zero());
    let mut rows = vec![
        li(&[o.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()], bilevel.j.1.clone()),
        li(&[-&o, z.clone(), z.clone(), z.clone(), z.clone(), z.clone()], -&bilevel.j.0),
    ];
    for r in &bilevel.w.rows {
        let mut c = vec![z.clone()];
        c.extend(r.coeffs.iter().cloned());
        rows.push(li(&c, r.bound.clone()));
    }
    let mut f1 = vec![z.clone(); 6];
    f1[0] = o.clone();
    let mut f2 = vec![z.clone(); 6];
    f2[0] = -&o;
    ParetoInstance {
        q6: HPolytope { dim: 6, rows },
        f1,
        f2,
        f3: bilevel.h.clone(),
        g: vec![z.clone(), z, -o],
        bilevel,
        parity_trick,
    }
}

/// Points not dominated by any other (`a <= b` coordinatewise, `a != b`).
pub fn pareto_filter(points: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let sorted: BTreeSet<&Vec<Int>> = points.iter().collect();
    // a dominating point sorts earlier, and a dominated one is dominated by
    // some front member, so checking against the front suffices
    let mut front: Vec<Vec<Int>> = vec![];
    for p in sorted {
        if !front.iter().any(|f| dominates(f, p)) {
            front.push(p.clone());
        }
    }
    front
}

/// Nondominated points seen so far.
#[derive(Default)]
pub struct ParetoFront {
    points: Vec<Vec<Int>>,
}

fn dominates(a: &[Int], b: &[Int]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl ParetoFront {
    /// Add `y` unless some kept point is `<= y`; drop kept points `y` dominates.
    pub fn offer(&mut self, y: Vec<Int>) {
        if self.points.iter().any(|f| dominates(f, &y)) {
            return;
        }
        self.points.retain(|f| !dominates(&y, f));
        self.points.push(y);
    }

    pub fn into_sorted(mut self) -> Vec<Vec<Int>> {
        self.points.sort();
        self.points
    }
}

/// Enumerate every outcome over the lattice points of `Q6`, keep the Pareto
/// minima, and minimize `g` over them.
pub fn solve_pareto_brute(inst: &ParetoInstance) -> Result<(Rat, Vec<Vec<Int>>)> {
    let b = &inst.bilevel;
    let enc = &b.encoding;
    let us = polygon_points(&triangle_q(enc))?;
    let vs = polygon_points(&polygon_p(enc))?;
    let width = &b.j.1 - &b.j.0 + 1;
    let size = Int::from(us.len()) * Int::from(vs.len()) * (&b.t_max + 1) * &width;
    if size > Int::from(OPT_LIMIT / 10) {
        return Err(Error::scale("Pareto outcome enumeration", size, OPT_LIMIT / 10));
    }
    let f3 = inst.f3.compile();
    let mut front = ParetoFront::default();
    let mut z = b.j.0.clone();
    while z <= b.j.1 {
        for u in &us {
            for v in &vs {
                let mut t = Int::zero();
                while t <= b.t_max {
                    let x = [z.clone(), u[0].clone(), u[1].clone(), v[0].clone(), v[1].clone(), t.clone()];
                    let h = f3.eval(&x);
                    if !h.is_integer() {
                        return Err(Error::InvalidInput("f3 takes a non-integer value".into()));
                    }
                    let lin = |f: &[Int]| -> Int { f.iter().zip(&x).map(|(a, b)| a * b).sum() };
                    front.offer(vec![lin(&inst.f1), lin(&inst.f2), h.to_integer()]);
                    t += 1;
                }
            }
        }
        z += 1;
    }
    let front = front.into_sorted();
    let g_of = |y: &Vec<Int>| -> Int { inst.g.iter().zip(y).map(|(a, b)| a * b).sum() };
    let min_g = front.iter().map(g_of).min().ok_or(Error::Empty)?;
    Ok((rat_int(&min_g), front))
}

/// The parity trick leaves every even point covered, so an uncovered
/// point is at squared distance exactly one from the covered set.
pub fn parity_value_ok(value: &Int) -> bool {
    !value.is_negative() && *value <= Int::from(1)
}
