//! Parametric integer programs `A x <= f(y)`: the Fibonacci family whose
//! infeasible parameters form a long convex chain, and the parameter
//! flattening / interval splitting transformations.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::contfrac::{chain_points, convergents, ContinuedFraction, LatticePoint};
use crate::error::{Error, Result};
use crate::exactmath::{floor_div, int, rat_int, to_i128, Int, Rat};
use crate::geometry::HPolytope;
use crate::presburger::{BoundedBox, LinearInequality};

/// Largest lattice scan accepted by the helpers here.
pub const KPT_LIMIT: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamDomain {
    /// `[0, r_1) × ... × [0, r_k)`.
    Box(Vec<Int>),
    Polytope(HPolytope),
}

impl ParamDomain {
    pub fn dim(&self) -> usize {
        match self {
            ParamDomain::Box(r) => r.len(),
            ParamDomain::Polytope(h) => h.dim,
        }
    }
}

/// `exists x in Z^n : A x <= F y + f0` for parameters `y` in the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipInstance {
    pub a: Vec<Vec<Int>>,
    pub f_lin: Vec<Vec<Rat>>,
    pub f_const: Vec<Rat>,
    pub domain: ParamDomain,
}

impl PipInstance {
    pub fn new(a: Vec<Vec<Int>>, f_lin: Vec<Vec<Rat>>, f_const: Vec<Rat>, domain: ParamDomain) -> Result<Self> {
        let n = a.first().map_or(0, Vec::len);
        let k = domain.dim();
        if a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("ragged constraint matrix".into()));
        }
        if f_lin.len() != a.len() || f_const.len() != a.len() || f_lin.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput("parameter map does not match the constraint rows".into()));
        }
        if let ParamDomain::Box(r) = &domain {
            if r.iter().any(|x| !x.is_positive()) {
                return Err(Error::InvalidInput("box radices must be positive".into()));
            }
        }
        Ok(PipInstance { a, f_lin, f_const, domain })
    }

    pub fn num_vars(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn num_params(&self) -> usize {
        self.domain.dim()
    }

    pub fn rhs(&self, y: &[Int]) -> Vec<Rat> {
        self.f_lin
            .iter()
            .zip(&self.f_const)
            .map(|(row, c)| row.iter().zip(y).fold(c.clone(), |acc, (f, v)| acc + f * rat_int(v)))
            .collect()
    }

    pub fn satisfied(&self, y: &[Int], x: &[Int]) -> bool {
        holds(&self.a, &int_rhs(&self.rhs(y)), x)
    }

    /// Some `x` in the box solves the system at `y`.
    pub fn feasible_in_box(&self, y: &[Int], x_box: &BoundedBox) -> Result<bool> {
        if x_box.ranges.len() != self.num_vars() {
            return Err(Error::InvalidInput("box dimension differs from variable count".into()));
        }
        let size = x_box
            .ranges
            .iter()
            .fold(Int::one(), |acc, (lo, hi)| acc * (hi - lo + 1));
        if size > Int::from(KPT_LIMIT) {
            return Err(Error::scale("PIP variable box", size, KPT_LIMIT));
        }
        let b = int_rhs(&self.rhs(y));
        let mut x: Vec<Int> = x_box.ranges.iter().map(|(lo, _)| lo.clone()).collect();
        loop {
            if holds(&self.a, &b, &x) {
                return Ok(true);
            }
            let mut i = 0;
            loop {
                if i == x.len() {
                    return Ok(false);
                }
                if x[i] < x_box.ranges[i].1 {
                    x[i] += 1;
                    break;
                }
                x[i] = x_box.ranges[i].0.clone();
                i += 1;
            }
        }
    }
}

// integer left sides make `<= b` equivalent to `<= floor(b)`
fn int_rhs(b: &[Rat]) -> Vec<Int> {
    b.iter().map(|v| v.floor().to_integer()).collect()
}

fn holds(a: &[Vec<Int>], b: &[Int], x: &[Int]) -> bool {
    a.iter().zip(b).all(|(row, bi)| {
        let lhs: Int = row.iter().zip(x).map(|(a, v)| a * v).sum();
        lhs <= *bi
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibonacciFamily {
    pub s: usize,
    pub cfrac: ContinuedFraction,
    pub p: Int,
    pub q: Int,
    /// `{y : y2 >= 2, y1 <= q, q y2 <= p y1}`.
    pub triangle: HPolytope,
    /// Variables `(x1, x2)`, parameters `(y1, y2)`.
    pub pip: PipInstance,
}

/// `alpha_s = [2; 1, ..., 1]` with `2s` ones, equal to `F_{2s+3} / F_{2s+1}`.
pub fn fibonacci_family(s: usize) -> Result<FibonacciFamily> {
    if s == 0 {
        return Err(Error::InvalidInput("s must be at least 1".into()));
    }
    let mut terms = vec![int(2)];
    terms.extend(std::iter::repeat_n(Int::one(), 2 * s));
    let cfrac = ContinuedFraction::from_terms(&terms)?;
    let end = convergents(&cfrac).endpoint().clone();
    let (p, q) = (end.y2, end.y1);
    let z = Int::zero;
    let o = Int::one;
    let triangle = HPolytope {
        dim: 2,
        rows: vec![
            LinearInequality::new(vec![z(), -o()], -int(2)),
            LinearInequality::new(vec![o(), z()], q.clone()),
            LinearInequality::new(vec![-&p, q.clone()], 0),
        ],
    };
    let r = |v: &Int| rat_int(v);
    let zr = || Rat::zero();
    let pip = PipInstance::new(
        vec![
            vec![p.clone(), -&q],
            vec![-&p, q.clone()],
            vec![z(), o()],
            vec![z(), -o()],
        ],
        vec![
            vec![r(&p), -r(&q)],
            vec![zr(), zr()],
            vec![zr(), Rat::one()],
            vec![zr(), zr()],
        ],
        vec![zr(), zr(), -Rat::one(), -Rat::one()],
        ParamDomain::Polytope(triangle.clone()),
    )?;
    Ok(FibonacciFamily { s, cfrac, p, q, triangle, pip })
}

/// Points of the triangle where the family's system has no integer solution.
pub fn infeasible_set(fam: &FibonacciFamily) -> Result<Vec<LatticePoint>> {
    let work = &fam.p * &fam.q;
    if work > Int::from(KPT_LIMIT) {
        return Err(Error::scale("triangle scan", work, KPT_LIMIT));
    }
    let p = to_i128(&fam.p).expect("guarded");
    let q = to_i128(&fam.q).expect("guarded");
    let mut out = vec![];
    for y1 in 0..=q {
        let top = Integer::div_floor(&(p * y1), &q);
        for y2 in 2..=top {
            let vy = p * y1 - q * y2;
            // 0 <= p x1 - q x2 <= vy for some x1, with 1 <= x2 <= y2 - 1
            let feasible = (1..y2).any(|x2| {
                let lo = Integer::div_ceil(&(q * x2), &p);
                let hi = Integer::div_floor(&(q * x2 + vy), &p);
                lo <= hi
            });
            if !feasible {
                out.push(LatticePoint::new(y1, y2));
            }
        }
    }
    Ok(out)
}

/// The chain the infeasible set should equal: upper chain points from
/// `(1, 2)` on.
pub fn expected_infeasible(fam: &FibonacciFamily) -> Vec<LatticePoint> {
    chain_points(&convergents(&fam.cfrac), 2)
}

/// No point is the average of two distinct others.
pub fn midpoint_free(points: &[LatticePoint]) -> bool {
    let set: HashSet<&LatticePoint> = points.iter().collect();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a == b {
                continue;
            }
            let (s1, s2) = (&a.y1 + &b.y1, &a.y2 + &b.y2);
            if s1.is_even() && s2.is_even() {
                let m = LatticePoint::new(s1 / 2, s2 / 2);
                if set.contains(&m) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every consecutive turn of the sorted polyline is strictly clockwise.
pub fn strictly_convex_chain(points: &[LatticePoint]) -> bool {
    points.windows(3).all(|w| {
        let (d1, d2) = (w[1].sub(&w[0]), w[2].sub(&w[1]));
        d1.cross(&d2).is_negative()
    })
}

/// Scale row `i` so its parameter coefficients are integers and move the
/// parameter terms to the left: `L A_i x - L F_i y <= floor(L f0_i)`.
fn integral_row(inst: &PipInstance, i: usize) -> (Vec<Int>, Vec<Int>, Int) {
    let l = inst.f_lin[i]
        .iter()
        .fold(Int::one(), |acc, f| acc.lcm(f.denom()));
    let lr = rat_int(&l);
    let a: Vec<Int> = inst.a[i].iter().map(|v| v * &l).collect();
    let f: Vec<Int> = inst.f_lin[i].iter().map(|v| -(v * &lr).to_integer()).collect();
    let c = (&inst.f_const[i] * &lr).floor().to_integer();
    (a, f, c)
}

fn box_radices(inst: &PipInstance) -> Result<&[Int]> {
    match &inst.domain {
        ParamDomain::Box(r) => Ok(r),
        ParamDomain::Polytope(_) => Err(Error::InvalidInput("box parameter domain required".into())),
    }
}

struct RowBuilder {
    a: Vec<Vec<Int>>,
    f_lin: Vec<Vec<Rat>>,
    f_const: Vec<Rat>,
}

impl RowBuilder {
    fn push(&mut self, a: Vec<Int>, param: i64, c: Int) {
        self.a.push(a);
        self.f_lin.push(vec![Rat::from_integer(int(param))]);
        self.f_const.push(rat_int(&c));
    }

    fn bounds(&mut self, width: usize, j: usize, lo: Int, hi: Int) {
        let mut up = vec![Int::zero(); width];
        up[j] = Int::one();
        let down: Vec<Int> = up.iter().map(|v| -v).collect();
        self.push(up, 0, hi);
        self.push(down, 0, -lo);
    }

    fn finish(self, domain: Int) -> Result<PipInstance> {
        PipInstance::new(self.a, self.f_lin, self.f_const, ParamDomain::Box(vec![domain]))
    }
}

/// One parameter `y'` in `[0, r_1 ⋯ r_k)` and `k` added variables tied to it
/// by `y' = y_1 + y_2 r_1 + y_3 r_1 r_2 + ...`.
pub fn flatten_params(inst: &PipInstance) -> Result<PipInstance> {
    let r = box_radices(inst)?.to_vec();
    if r.len() == 1 {
        return Ok(inst.clone());
    }
    let (n, k) = (inst.num_vars(), r.len());
    let width = n + k;
    let mut rb = RowBuilder { a: vec![], f_lin: vec![], f_const: vec![] };
    for i in 0..inst.a.len() {
        let (mut a, f, c) = integral_row(inst, i);
        a.extend(f);
        rb.push(a, 0, c);
    }
    let mut weights = vec![];
    let mut w = Int::one();
    for (j, rj) in r.iter().enumerate() {
        rb.bounds(width, n + j, Int::zero(), rj - 1);
        weights.push(w.clone());
        w *= rj;
    }
    let mut eq = vec![Int::zero(); n];
    eq.extend(weights);
    let neg: Vec<Int> = eq.iter().map(|v| -v).collect();
    rb.push(eq, 1, Int::zero());
    rb.push(neg, -1, Int::zero());
    rb.finish(w)
}

/// Mixed-radix digits of `y'`.
pub fn flatten_decode(radices: &[Int], y: &Int) -> Vec<Int> {
    let mut rest = y.clone();
    radices
        .iter()
        .map(|r| {
            let (d, m) = rest.div_mod_floor(r);
            rest = d;
            m
        })
        .collect()
}

/// One parameter `y'` in `[0, M N)` and added variables `(y1, y2)` with
/// `N y1 + y2 = y'`, `0 <= y1 < M`, `0 <= y2 < N`; the original system is
/// imposed at `y2`.
pub fn add_interval_split(inst: &PipInstance, n_len: &Int, m_len: &Int) -> Result<PipInstance> {
    let r = box_radices(inst)?;
    if r.len() != 1 || &r[0] != n_len {
        return Err(Error::InvalidInput(format!("expected a one-parameter instance on [0, {n_len})")));
    }
    if !m_len.is_positive() {
        return Err(Error::InvalidInput("split count must be positive".into()));
    }
    let n = inst.num_vars();
    let width = n + 2;
    let mut rb = RowBuilder { a: vec![], f_lin: vec![], f_const: vec![] };
    for i in 0..inst.a.len() {
        let (mut a, f, c) = integral_row(inst, i);
        a.push(Int::zero());
        a.extend(f);
        rb.push(a, 0, c);
    }
    rb.bounds(width, n, Int::zero(), m_len - 1);
    rb.bounds(width, n + 1, Int::zero(), n_len - 1);
    let mut eq = vec![Int::zero(); n];
    eq.extend([n_len.clone(), Int::one()]);
    let neg: Vec<Int> = eq.iter().map(|v| -v).collect();
    rb.push(eq, 1, Int::zero());
    rb.push(neg, -1, Int::zero());
    rb.finish(m_len * n_len)
}

/// The forced `(y1, y2)` for `y'`.
pub fn split_decode(n_len: &Int, y: &Int) -> (Int, Int) {
    (floor_div(y, n_len), y - n_len * floor_div(y, n_len))
}

/// Number of parameter values in a box domain.
pub fn box_size(radices: &[Int]) -> Int {
    radices.iter().fold(Int::one(), |acc, r| acc * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parallelogram_lattice_free;
    use proptest::prelude::*;

    fn fib(n: usize) -> Int {
        let (mut a, mut b) = (Int::zero(), Int::one());
        for _ in 0..n {
            let t = &a + &b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn family_parameters() {
        let f1 = fibonacci_family(1).unwrap();
        assert_eq!((f1.p.clone(), f1.q.clone()), (int(5), int(2)));
        assert_eq!(f1.cfrac.terms(), vec![int(2), int(1), int(1)]);
        let f2 = fibonacci_family(2).unwrap();
        assert_eq!((f2.p.clone(), f2.q.clone()), (int(13), int(5)));
        let ch = convergents(&f2.cfrac);
        assert_eq!(&ch.c[1..], &[LatticePoint::new(1, 2), LatticePoint::new(2, 5), LatticePoint::new(5, 13)]);
        for s in 1..=8 {
            let f = fibonacci_family(s).unwrap();
            assert_eq!(f.cfrac.terms().len(), 2 * s + 1);
            assert_eq!(f.p, fib(2 * s + 3));
            assert_eq!(f.q, fib(2 * s + 1));
            let ch = convergents(&f.cfrac);
            for i in 1..=s + 1 {
                assert_eq!(ch.c[i], LatticePoint::new(fib(2 * i - 1), fib(2 * i + 1)));
            }
        }
        assert!(fibonacci_family(0).is_err());
    }

    #[test]
    fn small_infeasible_sets() {
        let pts = |v: &[(i64, i64)]| v.iter().map(|&(a, b)| LatticePoint::new(a, b)).collect::<Vec<_>>();
        assert_eq!(infeasible_set(&fibonacci_family(1).unwrap()).unwrap(), pts(&[(1, 2), (2, 5)]));
        assert_eq!(infeasible_set(&fibonacci_family(2).unwrap()).unwrap(), pts(&[(1, 2), (2, 5), (5, 13)]));
        let s3 = infeasible_set(&fibonacci_family(3).unwrap()).unwrap();
        assert_eq!(s3.len(), 4);
    }

    #[test]
    fn infeasible_set_is_the_chain() {
        for s in 1..=6 {
            let f = fibonacci_family(s).unwrap();
            let set = infeasible_set(&f).unwrap();
            assert_eq!(set, expected_infeasible(&f), "s = {s}");
            assert_eq!(set.len(), s + 1);
            assert!(strictly_convex_chain(&set));
            assert!(midpoint_free(&set));
        }
    }

    #[test]
    fn scan_agrees_with_parallelogram_test() {
        let f = fibonacci_family(3).unwrap();
        let set: HashSet<LatticePoint> = infeasible_set(&f).unwrap().into_iter().collect();
        let q = to_i128(&f.q).unwrap();
        let p = to_i128(&f.p).unwrap();
        for y1 in 0..=q {
            for y2 in 2..=(p * y1 / q) {
                let y = LatticePoint::new(y1, y2);
                assert_eq!(set.contains(&y), parallelogram_lattice_free(&y, &f.p, &f.q), "{y}");
            }
        }
    }

    #[test]
    fn pip_matches_scan() {
        let f = fibonacci_family(1).unwrap();
        let set = infeasible_set(&f).unwrap();
        let xb = BoundedBox::new(vec![(int(-1), int(3)), (int(-1), int(6))]).unwrap();
        for y1 in 0..=2 {
            for y2 in 2..=5 {
                let y = [int(y1), int(y2)];
                if !f.triangle.contains_int(&y) {
                    continue;
                }
                let feas = f.pip.feasible_in_box(&y, &xb).unwrap();
                assert_eq!(!feas, set.contains(&LatticePoint::new(y1, y2)));
            }
        }
    }

    #[test]
    fn midpoint_examples() {
        let pts = |v: &[(i64, i64)]| v.iter().map(|&(a, b)| LatticePoint::new(a, b)).collect::<Vec<_>>();
        assert!(midpoint_free(&pts(&[(1, 2), (2, 5), (5, 13)])));
        assert!(!midpoint_free(&pts(&[(0, 0), (1, 1), (2, 2)])));
        assert!(midpoint_free(&pts(&[(3, 3)])));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(flatten_decode(&[int(3), int(4)], &int(5)), vec![int(2), int(1)]);
        assert_eq!(split_decode(&int(5), &int(7)), (int(1), int(2)));
        assert_eq!(split_decode(&int(5), &int(0)), (int(0), int(0)));
    }

    #[test]
    fn flatten_one_param_is_identity() {
        let inst = PipInstance::new(
            vec![vec![int(1)]],
            vec![vec![Rat::one()]],
            vec![Rat::zero()],
            ParamDomain::Box(vec![int(4)]),
        )
        .unwrap();
        assert_eq!(flatten_params(&inst).unwrap(), inst);
    }

    fn tiny_instance() -> impl Strategy<Value = PipInstance> {
        let k_radix = prop::collection::vec(2i64..=3, 2);
        (
            prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 3),
            prop::collection::vec(prop::collection::vec((-2i64..=2, 1i64..=2), 2), 3),
            prop::collection::vec(-3i64..=3, 3),
            k_radix,
        )
            .prop_map(|(a, f, c, r)| {
                PipInstance::new(
                    a.iter().map(|row| row.iter().map(|&v| int(v)).collect()).collect(),
                    f.iter()
                        .map(|row| row.iter().map(|&(n, d)| Rat::new(int(n), int(d))).collect())
                        .collect(),
                    c.iter().map(|&v| Rat::from_integer(int(v))).collect(),
                    ParamDomain::Box(r.iter().map(|&v| int(v)).collect()),
                )
                .unwrap()
            })
    }

    fn cube(dim: usize, lo: i64, hi: i64) -> BoundedBox {
        BoundedBox::new(vec![(int(lo), int(hi)); dim]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn flatten_preserves_feasibility(inst in tiny_instance()) {
            let flat = flatten_params(&inst).unwrap();
            let r = box_radices(&inst).unwrap().to_vec();
            let total = box_size(&r);
            prop_assert_eq!(box_radices(&flat).unwrap(), &[total.clone()][..]);
            let mut yp = Int::zero();
            while yp < total {
                let y = flatten_decode(&r, &yp);
                let orig = inst.feasible_in_box(&y, &cube(2, -3, 3)).unwrap();
                // added variables scanned beyond their forced range
                let mut b = vec![(int(-3), int(3)); 2];
                b.extend(r.iter().map(|rj| (int(-1), rj.clone())));
                let lifted = flat.feasible_in_box(&[yp.clone()], &BoundedBox::new(b).unwrap()).unwrap();
                prop_assert_eq!(orig, lifted);
                yp += 1;
            }
        }

        #[test]
        fn split_preserves_feasibility(inst in tiny_instance(), m in 1i64..=3) {
            let flat = flatten_params(&inst).unwrap();
            let n_len = box_radices(&flat).unwrap()[0].clone();
            let split = add_interval_split(&flat, &n_len, &int(m)).unwrap();
            let r = box_radices(&inst).unwrap().to_vec();
            let mut yp = Int::zero();
            while yp < &n_len * m {
                let (y1, y2) = split_decode(&n_len, &yp);
                let orig = inst.feasible_in_box(&flatten_decode(&r, &y2), &cube(2, -3, 3)).unwrap();
                let mut b = vec![(int(-3), int(3)); 2];
                b.extend(r.iter().map(|rj| (int(0), rj - 1)));
                b.push((&y1 - 1, &y1 + 1));
                b.push((&y2 - 1, &y2 + 1));
                let lifted = split.feasible_in_box(&[yp.clone()], &BoundedBox::new(b).unwrap()).unwrap();
                prop_assert_eq!(orig, lifted);
                yp += 1;
            }
        }

        #[test]
        fn split_variables_are_forced(n_len in 1i64..=6, m in 1i64..=4) {
            // trivial system x <= y', so only the split rows matter
            let inst = PipInstance::new(
                vec![vec![int(1)]],
                vec![vec![Rat::one()]],
                vec![Rat::zero()],
                ParamDomain::Box(vec![int(n_len)]),
            ).unwrap();
            let split = add_interval_split(&inst, &int(n_len), &int(m)).unwrap();
            for yp in 0..n_len * m {
                let mut hits = vec![];
                for y1 in -1..=m {
                    for y2 in -1..=n_len {
                        let z = [int(0), int(y1), int(y2)];
                        if split.satisfied(&[int(yp)], &z) {
                            hits.push((int(y1), int(y2)));
                        }
                    }
                }
                prop_assert_eq!(hits, vec![split_decode(&int(n_len), &int(yp))]);
            }
        }
    }
}
