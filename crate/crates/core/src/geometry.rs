//! Exact polytopes in small dimension: H- and V-descriptions, conversions
//! between them, the lifting trick for unions, and the two compilers from
//! the restricted covering disjunction to a single integer system.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::contfrac::LatticePoint;
use crate::encode::Encoding;
use crate::error::{Error, Result};
use crate::exactmath::{binomial, ceil_div, clear_denominators, primitive, rat_int, Int, Rat};
use crate::presburger::LinearInequality;

/// Most rows `vertices_of` will take, and most vertices `facets_of` will take.
pub const MAX_ROWS: usize = 64;
pub const MAX_VERTICES: usize = 128;
/// Largest number of row subsets `vertices_of` will solve.
pub const SUBSET_LIMIT: u64 = 5_000_000;

/// `{x : row · x <= bound for every row}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    pub dim: usize,
    pub rows: Vec<LinearInequality>,
}

impl HPolytope {
    pub fn new(dim: usize, rows: Vec<LinearInequality>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.coeffs.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "row with {} coefficients in dimension {dim}",
                r.coeffs.len()
            )));
        }
        Ok(HPolytope { dim, rows })
    }

    pub fn from_i64(dim: usize, rows: &[(&[i64], i64)]) -> Result<Self> {
        HPolytope::new(
            dim,
            rows.iter()
                .map(|(c, b)| LinearInequality::new(c.iter().map(|&v| Int::from(v)).collect(), *b))
                .collect(),
        )
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.rows.iter().all(|r| dot_rat(&r.coeffs, x) <= rat_int(&r.bound))
    }

    pub fn contains_int(&self, x: &[Int]) -> bool {
        self.rows.iter().all(|r| r.holds(x).unwrap_or(false))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    pub dim: usize,
    pub vertices: Vec<Vec<Rat>>,
}

impl VPolytope {
    pub fn new(dim: usize, vertices: Vec<Vec<Rat>>) -> Result<Self> {
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidInput(format!("vertex of the wrong length in dimension {dim}")));
        }
        Ok(VPolytope { dim, vertices })
    }

    pub fn from_i64(dim: usize, vertices: &[&[i64]]) -> Result<Self> {
        VPolytope::new(
            dim,
            vertices
                .iter()
                .map(|v| v.iter().map(|&c| Rat::from_integer(Int::from(c))).collect())
                .collect(),
        )
    }

    pub fn vertex_set(&self) -> BTreeSet<Vec<Rat>> {
        self.vertices.iter().cloned().collect()
    }
}

fn dot_rat(c: &[Int], x: &[Rat]) -> Rat {
    c.iter().zip(x).map(|(a, b)| rat_int(a) * b).sum()
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Most facets a `d`-polytope with `n` vertices can have.
pub fn mcmullen_f(d: u64, n: u64) -> Result<Int> {
    if d < 1 || n <= d {
        return Err(Error::InvalidInput(format!("need n > d >= 1, got d = {d}, n = {n}")));
    }
    Ok(binomial(n - d.div_ceil(2), n - d) + binomial(n - d / 2 - 1, n - d))
}

/// Solve the square system `a x = b`; `None` when singular.
fn solve(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Option<Vec<Rat>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Indices of a maximal linearly independent prefix-greedy subset of rows.
fn independent_rows(rows: &[Vec<Int>]) -> Vec<usize> {
    let mut echelon: Vec<(usize, Vec<Rat>)> = vec![];
    let mut picked = vec![];
    for (i, r) in rows.iter().enumerate() {
        let mut v: Vec<Rat> = r.iter().map(rat_int).collect();
        for (pc, e) in &echelon {
            if !v[*pc].is_zero() {
                let f = &v[*pc] / &e[*pc];
                for (x, y) in v.iter_mut().zip(e) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            echelon.push((pc, v));
            picked.push(i);
        }
    }
    picked
}

/// A nonzero vector orthogonal to every row, when the rows do not span.
fn null_vector(rows: &[Vec<Int>], n: usize) -> Option<Vec<Int>> {
    let basis = independent_rows(rows);
    if basis.len() >= n {
        return None;
    }
    // complete the basis with unit vectors; the solution for the first unit
    // vector not in the span, orthogonal to the basis rows, is a null vector
    let mut m: Vec<Vec<Int>> = basis.iter().map(|&i| rows[i].clone()).collect();
    for j in 0..n {
        let mut e = vec![Int::zero(); n];
        e[j] = Int::one();
        let mut trial = m.clone();
        trial.push(e);
        if independent_rows(&trial).len() == trial.len() {
            m = trial;
        }
        if m.len() == n {
            break;
        }
    }
    let a: Vec<Vec<Rat>> = m.iter().map(|r| r.iter().map(rat_int).collect()).collect();
    let mut rhs = vec![Rat::zero(); n];
    rhs[basis.len()] = Rat::one();
    let x = solve(a, rhs)?;
    Some(primitive(&clear_denominators(&x)))
}

struct Ray {
    v: Vec<Int>,
    zeros: u128,
}

/// Extreme rays of the cone `{x : row · x <= 0}` by double description.
/// `Err(rank)` when the rows have rank below `n`, i.e. the cone has a
/// nontrivial lineality space.
fn cone_rays(rows: &[Vec<Int>], n: usize) -> std::result::Result<Vec<Vec<Int>>, usize> {
    assert!(rows.len() <= 128, "double description supports at most 128 rows");
    let basis = independent_rows(rows);
    if basis.len() < n {
        return Err(basis.len());
    }
    let a: Vec<Vec<Rat>> = basis.iter().map(|&i| rows[i].iter().map(rat_int).collect()).collect();
    let mut rays = vec![];
    let all_basis: u128 = basis.iter().fold(0, |acc, &i| acc | 1 << i);
    for (j, &bj) in basis.iter().enumerate() {
        let mut rhs = vec![Rat::zero(); n];
        rhs[j] = -Rat::one();
        let x = solve(a.clone(), rhs).expect("basis rows are independent");
        rays.push(Ray {
            v: primitive(&clear_denominators(&x)),
            zeros: all_basis & !(1 << bj),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        if all_basis & 1 << i != 0 {
            continue;
        }
        let s: Vec<Int> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let mut next = vec![];
        for (k, r) in rays.iter().enumerate() {
            if s[k].is_positive() {
                continue;
            }
            for (l, p) in rays.iter().enumerate() {
                if !s[l].is_positive() || !s[k].is_negative() {
                    continue;
                }
                let common = p.zeros & r.zeros;
                if (common.count_ones() as usize) + 2 < n {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(o, other)| o == k || o == l || other.zeros & common != common);
                if adjacent {
                    let v: Vec<Int> = r.v.iter().zip(&p.v).map(|(rm, rp)| &s[l] * rm - &s[k] * rp).collect();
                    next.push(Ray {
                        v: primitive(&v),
                        zeros: common | 1 << i,
                    });
                }
            }
            let zero_bit = if s[k].is_zero() { 1 << i } else { 0 };
            next.push(Ray {
                v: r.v.clone(),
                zeros: r.zeros | zero_bit,
            });
        }
        rays = next;
    }
    Ok(rays.into_iter().map(|r| r.v).collect())
}

fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), f);
    }
}

/// Vertices of a bounded H-polytope by solving every square row subsystem.
pub fn vertices_of(h: &HPolytope) -> Result<VPolytope> {
    let d = h.dim;
    if h.rows.len() > MAX_ROWS {
        return Err(Error::scale("polytope rows", h.rows.len(), MAX_ROWS));
    }
    let subsets = binomial(h.rows.len() as u64, d as u64);
    if subsets > Int::from(SUBSET_LIMIT) {
        return Err(Error::scale("row subsets", subsets, SUBSET_LIMIT));
    }
    let a: Vec<Vec<Int>> = h.rows.iter().map(|r| r.coeffs.clone()).collect();
    match cone_rays(&a, d) {
        Err(_) => {
            let ray = null_vector(&a, d).expect("rank deficient rows have a null vector");
            return Err(Error::Unbounded { ray });
        }
        Ok(rays) if !rays.is_empty() => return Err(Error::Unbounded { ray: rays[0].clone() }),
        Ok(_) => {}
    }
    let mut found = BTreeSet::new();
    combinations(h.rows.len(), d, &mut |idx| {
        let m: Vec<Vec<Rat>> = idx.iter().map(|&i| h.rows[i].coeffs.iter().map(rat_int).collect()).collect();
        let b: Vec<Rat> = idx.iter().map(|&i| rat_int(&h.rows[i].bound)).collect();
        if let Some(x) = solve(m, b) {
            if h.contains(&x) {
                found.insert(x);
            }
        }
    });
    VPolytope::new(d, found.into_iter().collect())
}

/// Affine dimension of a finite point set (`None` when empty).
pub fn affine_dim(points: &[Vec<Rat>]) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<Int>> = points[1..]
        .iter()
        .map(|p| clear_denominators(&p.iter().zip(first).map(|(a, b)| a - b).collect::<Vec<_>>()))
        .collect();
    Some(independent_rows(&diffs).len())
}

/// Irredundant facet description of the hull of a full-dimensional vertex set.
/// Rows are primitive integer vectors, sorted.
pub fn facets_of(v: &VPolytope) -> Result<HPolytope> {
    let d = v.dim;
    if v.vertices.is_empty() {
        return Err(Error::Empty);
    }
    if v.vertices.len() > MAX_VERTICES {
        return Err(Error::scale("hull vertices", v.vertices.len(), MAX_VERTICES));
    }
    // valid inequalities a·x <= beta form the cone {(a, beta) : a·v - beta <= 0}
    let rows: Vec<Vec<Int>> = v
        .vertices
        .iter()
        .map(|p| {
            let mut r = p.clone();
            r.push(-Rat::one());
            clear_denominators(&r)
        })
        .collect();
    let rays = cone_rays(&rows, d + 1).map_err(|rank| Error::Degenerate {
        dim: d,
        affine_dim: rank.saturating_sub(1),
    })?;
    let mut facets: Vec<LinearInequality> = rays
        .into_iter()
        .filter(|r| r[..d].iter().any(|c| !c.is_zero()))
        .map(|mut r| {
            let beta = r.pop().expect("ray has d + 1 entries");
            LinearInequality::new(r, beta)
        })
        .collect();
    facets.sort_by(|a, b| (&a.coeffs, &a.bound).cmp(&(&b.coeffs, &b.bound)));
    facets.dedup();
    HPolytope::new(d, facets)
}

/// `conv(P1 × {0} ∪ P2 × {1})`. Its integer points with last coordinate 0
/// or 1 are exactly the integer points of `P1` and `P2`.
pub fn lift_union(p1: &VPolytope, p2: &VPolytope) -> Result<VPolytope> {
    if p1.dim != p2.dim {
        return Err(Error::InvalidInput(format!(
            "cannot lift polytopes of dimensions {} and {}",
            p1.dim, p2.dim
        )));
    }
    let mut vertices = vec![];
    for (p, t) in [(p1, 0), (p2, 1)] {
        for v in &p.vertices {
            let mut w = v.clone();
            w.push(Rat::from_integer(Int::from(t)));
            vertices.push(w);
        }
    }
    VPolytope::new(p1.dim + 1, vertices)
}

/// Whether `{x : v·y >= v·x >= 0, y2 > x2 > 0}`, `v = (p, -q)`, holds no
/// lattice point. Scans the rows `x2 = 1 .. y2 - 1`.
pub fn parallelogram_lattice_free(y: &LatticePoint, p: &Int, q: &Int) -> bool {
    if let (Some(y1), Some(y2), Some(p), Some(q)) = (y.y1.to_i64(), y.y2.to_i64(), p.to_i64(), q.to_i64()) {
        let (y1, y2, p, q) = (y1 as i128, y2 as i128, p as i128, q as i128);
        let vy = p * y1 - q * y2;
        return !(1..y2).any(|x2| {
            let x1 = Integer::div_ceil(&(q * x2), &p);
            p * x1 - q * x2 <= vy
        });
    }
    let vy = p * &y.y1 - q * &y.y2;
    let mut x2 = Int::one();
    while x2 < y.y2 {
        let x1 = ceil_div(&(q * &x2), p);
        if p * x1 - q * &x2 <= vy {
            return false;
        }
        x2 += 1;
    }
    true
}

/// The triangle `{y : y2 >= g1, y1 <= q, v·y >= 0}` over `(y1, y2)`.
pub fn triangle_q(enc: &Encoding) -> HPolytope {
    let (p, q) = (&enc.p, &enc.q);
    HPolytope {
        dim: 2,
        rows: vec![
            LinearInequality::new(vec![Int::zero(), -Int::one()], -&enc.g1),
            LinearInequality::new(vec![Int::one(), Int::zero()], q.clone()),
            LinearInequality::new(vec![-p, q.clone()], 0),
        ],
    }
}

/// `Ax + By + Cz <= b` with `z` in `r` and `y` in the triangle `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GIPInstance {
    pub a: Vec<Vec<Int>>,
    pub b: Vec<Vec<Int>>,
    pub c: Vec<Int>,
    pub rhs: Vec<Int>,
    pub r: (Int, Int),
    pub q: HPolytope,
    pub nx: usize,
}

impl GIPInstance {
    /// Split rows over `(z, y1, y2, x...)` into the column blocks.
    pub fn from_rows(rows: &[LinearInequality], r: (Int, Int), q: HPolytope) -> Result<Self> {
        let width = rows.first().map_or(3, |row| row.coeffs.len());
        if width < 3 || rows.iter().any(|row| row.coeffs.len() != width) {
            return Err(Error::InvalidInput("rows must share a width of at least 3".into()));
        }
        Ok(GIPInstance {
            c: rows.iter().map(|row| row.coeffs[0].clone()).collect(),
            b: rows.iter().map(|row| row.coeffs[1..3].to_vec()).collect(),
            a: rows.iter().map(|row| row.coeffs[3..].to_vec()).collect(),
            rhs: rows.iter().map(|row| row.bound.clone()).collect(),
            r,
            q,
            nx: width - 3,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_vars(&self) -> usize {
        self.nx + 3
    }

    /// Row `i` as an inequality over `(z, y1, y2, x...)`.
    pub fn row(&self, i: usize) -> LinearInequality {
        let mut coeffs = vec![self.c[i].clone()];
        coeffs.extend(self.b[i].iter().cloned());
        coeffs.extend(self.a[i].iter().cloned());
        LinearInequality::new(coeffs, self.rhs[i].clone())
    }

    pub fn holds(&self, z: &Int, y: &[Int; 2], x: &[Int]) -> bool {
        (0..self.num_rows()).all(|i| {
            let lhs = &self.c[i] * z + dot(&self.b[i], y) + dot(&self.a[i], x);
            lhs <= self.rhs[i]
        })
    }
}

/// `N = (M + p + q)^3`, a bound on every coordinate that matters.
pub fn big_bound(enc: &Encoding) -> Int {
    let s = &enc.modulus + &enc.p + &enc.q;
    &s * &s * &s
}

fn rect(lo1: &Int, hi1: &Int, lo2: &Int, hi2: &Int) -> HPolytope {
    let (o, z) = (Int::one(), Int::zero());
    HPolytope {
        dim: 2,
        rows: vec![
            LinearInequality::new(vec![o.clone(), z.clone()], hi1.clone()),
            LinearInequality::new(vec![-&o, z.clone()], -lo1),
            LinearInequality::new(vec![z.clone(), o.clone()], hi2.clone()),
            LinearInequality::new(vec![z, -o], -lo2),
        ],
    }
}

/// The two `t`-space rectangles `{1 <= t1 <= M-1, |t2| <= B1}` and
/// `{|t1| <= B2, 0 <= t2 <= B1}`, lifted, and the facets of the lift.
pub fn system1_lift(enc: &Encoding) -> Result<(VPolytope, HPolytope)> {
    let n = big_bound(enc);
    let b1 = Int::from(2) * &n * (&enc.p + &enc.q);
    let b2 = Int::from(2) * &n + &enc.modulus * &n;
    let p1 = vertices_of(&rect(&Int::one(), &(&enc.modulus - 1), &-&b1, &b1))?;
    let p2 = vertices_of(&rect(&-&b2, &b2, &Int::zero(), &b1))?;
    let lifted = lift_union(&p1, &p2)?;
    let facets = facets_of(&lifted)?;
    Ok((lifted, facets))
}

/// 24 rows over `(z, y1, y2, x1, x2, t1..t4)`: for each side of the
/// parallelogram, `t1 = z - y2 - M x1` and the side's slack `s` satisfy
/// `(t1, s, t_j)` in the lifted rectangle pair, i.e.
/// `1 <= t1 <= M-1 or s >= 0` inside the big box.
pub fn build_system1(enc: &Encoding) -> Result<GIPInstance> {
    let (_, facets) = system1_lift(enc)?;
    let (m, p, q) = (&enc.modulus, &enc.p, &enc.q);
    let t1: Vec<Int> = vec![Int::one(), Int::zero(), -Int::one(), -m, Int::zero()];
    let (o, z) = (Int::one(), Int::zero());
    // slacks over (z, y1, y2, x1, x2): v·y - v·x, v·x, y2 - 1 - x2, x2 - 1
    let sides: [(Vec<Int>, Int); 4] = [
        (vec![z.clone(), p.clone(), -q, -p, q.clone()], z.clone()),
        (vec![z.clone(), z.clone(), z.clone(), p.clone(), -q], z.clone()),
        (vec![z.clone(), z.clone(), o.clone(), z.clone(), -&o], -&o),
        (vec![z.clone(), z.clone(), z.clone(), z.clone(), o.clone()], -&o),
    ];
    let mut rows = vec![];
    for (j, (s, s0)) in sides.iter().enumerate() {
        for f in &facets.rows {
            let (a1, a2, a3) = (&f.coeffs[0], &f.coeffs[1], &f.coeffs[2]);
            let mut coeffs: Vec<Int> = t1.iter().zip(s).map(|(u, w)| a1 * u + a2 * w).collect();
            coeffs.extend((0..4).map(|k| if k == j { a3.clone() } else { Int::zero() }));
            rows.push(LinearInequality::new(coeffs, &f.bound - a2 * s0));
        }
    }
    GIPInstance::from_rows(&rows, (enc.source.mu.clone(), enc.source.nu.clone()), triangle_q(enc))
}

/// Intermediate polytopes of the single-extra-variable construction.
#[derive(Clone, Debug)]
pub struct System2Parts {
    /// `{1 <= z - y2 - M x1 <= M-1, |z|, |y2|, |x1| <= N}` over `(z, y2, x1)`.
    pub mod_polytope: VPolytope,
    /// `{v·y >= v·x >= 0, y2-1 >= x2 >= 1, y in Q}` over `(y1, y2, x1, x2)`.
    pub cell_polytope: VPolytope,
    /// Both embedded in `(z, y1, y2, x1, x2)`.
    pub p1: VPolytope,
    pub p2: VPolytope,
    pub lifted: VPolytope,
    pub facets: HPolytope,
}

pub fn system2_parts(enc: &Encoding) -> Result<System2Parts> {
    let n = big_bound(enc);
    let (m, p, q) = (&enc.modulus, &enc.p, &enc.q);
    let (o, z) = (Int::one(), Int::zero());
    let li = |c: Vec<Int>, b: Int| LinearInequality::new(c, b);
    let mut mod_rows = vec![
        li(vec![-&o, o.clone(), m.clone()], -&o),
        li(vec![o.clone(), -&o, -m], m - 1),
    ];
    for k in 0..3 {
        let mut e = vec![z.clone(); 3];
        e[k] = o.clone();
        mod_rows.push(li(e.clone(), n.clone()));
        e[k] = -&o;
        mod_rows.push(li(e, n.clone()));
    }
    let mod_polytope = vertices_of(&HPolytope::new(3, mod_rows)?)?;

    let cell_rows = vec![
        li(vec![-p, q.clone(), p.clone(), -q], z.clone()),
        li(vec![z.clone(), z.clone(), -p, q.clone()], z.clone()),
        li(vec![z.clone(), -&o, z.clone(), o.clone()], -&o),
        li(vec![z.clone(), z.clone(), z.clone(), -&o], -&o),
        li(vec![z.clone(), -&o, z.clone(), z.clone()], -&enc.g1),
        li(vec![o.clone(), z.clone(), z.clone(), z.clone()], q.clone()),
        li(vec![-p, q.clone(), z.clone(), z.clone()], z.clone()),
    ];
    let cell_polytope = vertices_of(&HPolytope::new(4, cell_rows)?)?;

    let r = |v: &Int| Rat::from_integer(v.clone());
    let mut v1 = vec![];
    for w in &mod_polytope.vertices {
        for y1 in [-&n, n.clone()] {
            v1.push(vec![w[0].clone(), r(&y1), w[1].clone(), w[2].clone(), Rat::zero()]);
        }
    }
    let zs: BTreeSet<Int> = [enc.source.mu.clone(), enc.source.nu.clone()].into_iter().collect();
    let mut v2 = vec![];
    for w in &cell_polytope.vertices {
        for zv in &zs {
            let mut pt = vec![r(zv)];
            pt.extend(w.iter().cloned());
            v2.push(pt);
        }
    }
    let p1 = VPolytope::new(5, v1)?;
    let p2 = VPolytope::new(5, v2)?;
    let lifted = lift_union(&p1, &p2)?;
    let facets = facets_of(&lifted)?;
    Ok(System2Parts {
        mod_polytope,
        cell_polytope,
        p1,
        p2,
        lifted,
        facets,
    })
}

/// Rows over `(z, y1, y2, x1, x2, t)`: the facets of the lifted union of the
/// mod polytope (at `x2 = 0`) and the parallelogram cells (at `z` in `R`).
pub fn build_system2(enc: &Encoding) -> Result<GIPInstance> {
    let parts = system2_parts(enc)?;
    GIPInstance::from_rows(
        &parts.facets.rows,
        (enc.source.mu.clone(), enc.source.nu.clone()),
        triangle_q(enc),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apcover::{APCoverInstance, APTriple};
    use crate::encode::build_encoding;
    use crate::exactmath::{int, rat};
    use proptest::prelude::*;

    fn reference() -> Encoding {
        let inst = APCoverInstance::new(1, 5, vec![APTriple::new(2, 1, 3).unwrap()]).unwrap();
        build_encoding(&inst).unwrap()
    }

    /// Facets by trying every `d`-subset of vertices.
    fn brute_facets(v: &VPolytope) -> BTreeSet<(Vec<Int>, Int)> {
        let d = v.dim;
        let mut out = BTreeSet::new();
        combinations(v.vertices.len(), d, &mut |idx| {
            let base = &v.vertices[idx[0]];
            let diffs: Vec<Vec<Int>> = idx[1..]
                .iter()
                .map(|&i| clear_denominators(&v.vertices[i].iter().zip(base).map(|(a, b)| a - b).collect::<Vec<_>>()))
                .collect();
            let Some(normal) = null_vector(&diffs, d) else { return };
            if independent_rows(&diffs).len() != d - 1 {
                return;
            }
            let beta = dot_rat(&normal, base);
            for sign in [1, -1] {
                let a: Vec<Int> = normal.iter().map(|c| c * sign).collect();
                let b = &beta * Rat::from_integer(Int::from(sign));
                if v.vertices.iter().all(|w| dot_rat(&a, w) <= b) {
                    let row: Vec<Rat> = a.iter().map(rat_int).chain([b]).collect();
                    let mut r = primitive(&clear_denominators(&row));
                    let bound = r.pop().unwrap();
                    out.insert((r, bound));
                }
            }
        });
        out
    }

    fn facet_set(h: &HPolytope) -> BTreeSet<(Vec<Int>, Int)> {
        h.rows.iter().map(|r| (r.coeffs.clone(), r.bound.clone())).collect()
    }

    #[test]
    fn facet_bound_values() {
        assert_eq!(mcmullen_f(3, 8).unwrap(), int(12));
        assert_eq!(mcmullen_f(6, 40).unwrap(), int(8400));
        for d in 2..=6 {
            assert_eq!(mcmullen_f(d, d + 1).unwrap(), Int::from(d + 1));
        }
        assert!(mcmullen_f(3, 3).is_err());
    }

    #[test]
    fn square_round_trip() {
        let sq = HPolytope::from_i64(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, 1], 1), (&[0, -1], 0)]).unwrap();
        let v = vertices_of(&sq).unwrap();
        assert_eq!(v.vertices.len(), 4);
        assert_eq!(facet_set(&facets_of(&v).unwrap()), facet_set(&sq));
    }

    #[test]
    fn simplex_has_four_facets() {
        let v = VPolytope::from_i64(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        assert_eq!(facets_of(&v).unwrap().rows.len(), 4);
    }

    #[test]
    fn unbounded_and_degenerate_inputs() {
        let half = HPolytope::from_i64(2, &[(&[1, 0], 1), (&[-1, 0], 0), (&[0, -1], 0)]).unwrap();
        match vertices_of(&half) {
            Err(Error::Unbounded { ray }) => assert!(ray[1].is_positive() && ray[0].is_zero()),
            other => panic!("{other:?}"),
        }
        let strip = HPolytope::from_i64(2, &[(&[1, 0], 1), (&[-1, 0], 0)]).unwrap();
        assert!(matches!(vertices_of(&strip), Err(Error::Unbounded { .. })));
        let flat = VPolytope::from_i64(3, &[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0]]).unwrap();
        assert_eq!(facets_of(&flat), Err(Error::Degenerate { dim: 3, affine_dim: 2 }));
    }

    #[test]
    fn reference_triangle() {
        let v = vertices_of(&triangle_q(&reference())).unwrap();
        let expect: BTreeSet<Vec<Rat>> = [
            vec![rat(4, 5), rat(2, 1)],
            vec![rat(2, 1), rat(2, 1)],
            vec![rat(2, 1), rat(5, 1)],
        ]
        .into_iter()
        .collect();
        assert_eq!(v.vertex_set(), expect);
    }

    #[test]
    fn lifted_segments() {
        let a = VPolytope::from_i64(1, &[&[0], &[1]]).unwrap();
        let b = VPolytope::from_i64(1, &[&[2], &[3]]).unwrap();
        let l = lift_union(&a, &b).unwrap();
        let h = facets_of(&l).unwrap();
        assert_eq!(h.rows.len(), 4);
        let mut proj = BTreeSet::new();
        for x in -2..6 {
            for t in -2..4 {
                if h.contains_int(&[int(x), int(t)]) {
                    proj.insert(x);
                }
            }
        }
        assert_eq!(proj, [0, 1, 2, 3].into_iter().collect());
    }

    #[test]
    fn parallelogram_examples() {
        let (p, q) = (int(5), int(2));
        assert!(parallelogram_lattice_free(&LatticePoint::new(1, 2), &p, &q));
        assert!(!parallelogram_lattice_free(&LatticePoint::new(2, 4), &p, &q));
        assert!(parallelogram_lattice_free(&LatticePoint::new(2, 5), &p, &q));
        let big = int(1) << 80;
        assert!(parallelogram_lattice_free(&LatticePoint::new(1, 2), &(&big + 1), &big) == parallelogram_lattice_free(&LatticePoint::new(1, 2), &int(5), &int(4)));
    }

    #[test]
    fn system1_shape() {
        let enc = reference();
        let (lifted, facets) = system1_lift(&enc).unwrap();
        assert_eq!(lifted.vertices.len(), 8);
        assert_eq!(facets.rows.len(), 6);
        assert_eq!(facet_set(&facets), brute_facets(&lifted));
        let g = build_system1(&enc).unwrap();
        assert_eq!((g.num_rows(), g.nx, g.num_vars()), (24, 6, 9));
        assert_eq!(g.r, (int(1), int(5)));
    }

    #[test]
    fn system1_disjunct_scan() {
        // each six-row block: (t1, s) integer-feasible for some t iff
        // t1 in [1, M-1] or s >= 0, inside the big box
        let enc = reference();
        let (_, facets) = system1_lift(&enc).unwrap();
        for t1 in -60..60 {
            for s in -5..5 {
                let lhs = (0..=1).any(|t| facets.contains_int(&[int(t1), int(s), int(t)]))
                    || (-3..=3).any(|t| facets.contains_int(&[int(t1), int(s), int(t)]));
                assert_eq!(lhs, (1..=50).contains(&t1) || s >= 0, "t1 = {t1}, s = {s}");
            }
        }
    }

    #[test]
    fn system2_counts() {
        // the slab cuts four edges of the box per bounding plane; with g1 = 2
        // the sharpened rows collapse the two cells over y2 = g1
        let parts = system2_parts(&reference()).unwrap();
        assert_eq!(parts.mod_polytope.vertices.len(), 8);
        assert_eq!(parts.cell_polytope.vertices.len(), 5);
        assert_eq!(parts.p1.vertices.len(), 16);
        assert_eq!(parts.p2.vertices.len(), 10);
        assert_eq!(parts.lifted.vertices.len(), 26);
        assert!(Int::from(parts.facets.rows.len()) <= mcmullen_f(6, 26).unwrap());
        let g = build_system2(&reference()).unwrap();
        assert_eq!(g.nx, 3);
        assert!(g.num_rows() <= 8400);
    }

    #[test]
    fn system2_cells_with_taller_start() {
        let inst = APCoverInstance::new(1, 11, vec![APTriple::new(3, 2, 4).unwrap()]).unwrap();
        let parts = system2_parts(&build_encoding(&inst).unwrap()).unwrap();
        assert_eq!(parts.cell_polytope.vertices.len(), 8);
        assert_eq!(parts.p2.vertices.len(), 16);
    }

    fn moment_curve(d: usize, ts: &[i64]) -> VPolytope {
        VPolytope::new(
            d,
            ts.iter()
                .map(|&t| (1..=d as u32).map(|k| Rat::from_integer(Int::from(t).pow(k))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cyclic_polytope_facets() {
        // cyclic 4-polytope with 8 vertices attains the upper bound
        let v = moment_curve(4, &[-4, -2, -1, 0, 1, 3, 5, 6]);
        let h = facets_of(&v).unwrap();
        assert_eq!(Int::from(h.rows.len()), mcmullen_f(4, 8).unwrap());
        assert_eq!(facet_set(&h), brute_facets(&v));
        assert_eq!(vertices_of(&h).unwrap().vertex_set(), v.vertex_set());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn hull_round_trip(d in 2usize..=4, pts in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 4), 5..=10)) {
            let v = VPolytope::new(d, pts.iter().map(|p| p[..d].iter().map(|&c| Rat::from_integer(Int::from(c))).collect()).collect()).unwrap();
            prop_assume!(affine_dim(&v.vertices) == Some(d));
            let h = facets_of(&v).unwrap();
            prop_assert_eq!(facet_set(&h), brute_facets(&v));
            prop_assert!(Int::from(h.rows.len()) <= mcmullen_f(d as u64, v.vertices.len() as u64).unwrap());
            prop_assert!(v.vertices.iter().all(|p| h.contains(p)));
            let w = vertices_of(&h).unwrap();
            prop_assert!(w.vertex_set().is_subset(&v.vertex_set()));
            prop_assert_eq!(facet_set(&facets_of(&w).unwrap()), facet_set(&h));
            prop_assert!(Int::from(w.vertices.len()) <= mcmullen_f(d as u64, h.rows.len() as u64).unwrap_or_else(|_| Int::from(w.vertices.len())));
        }

        #[test]
        fn lift_projects_to_union(a in proptest::collection::vec((-3i64..=3, -3i64..=3), 3..=5), b in proptest::collection::vec((-3i64..=3, -3i64..=3), 3..=5)) {
            let to_v = |pts: &Vec<(i64, i64)>| VPolytope::new(2, pts.iter().map(|&(x, y)| vec![Rat::from_integer(Int::from(x)), Rat::from_integer(Int::from(y))]).collect()).unwrap();
            let (va, vb) = (to_v(&a), to_v(&b));
            prop_assume!(affine_dim(&va.vertices) == Some(2) && affine_dim(&vb.vertices) == Some(2));
            let (ha, hb) = (facets_of(&va).unwrap(), facets_of(&vb).unwrap());
            let hl = facets_of(&lift_union(&vertices_of(&ha).unwrap(), &vertices_of(&hb).unwrap()).unwrap()).unwrap();
            for x in -4..=4 {
                for y in -4..=4 {
                    let pt = [int(x), int(y)];
                    let lifted = (-2..=3).any(|t| hl.contains_int(&[int(x), int(y), int(t)]));
                    prop_assert_eq!(lifted, ha.contains_int(&pt) || hb.contains_int(&pt));
                }
            }
        }
    }
}
