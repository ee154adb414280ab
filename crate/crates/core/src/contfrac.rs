//! Odd-length continued fractions `[a0; b0, a1, ..., b_{k-1}, a_k]` and the
//! two convex chains of lattice points their convergents trace out.
//!
//! Points are written `(y1, y2)` with `y1` horizontal and `y2` vertical, so a
//! convergent `p/q` is the point `(q, p)`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    a: Vec<Int>,
    b: Vec<Int>,
}

impl ContinuedFraction {
    pub fn new(a: Vec<Int>, b: Vec<Int>) -> Result<Self> {
        if a.len() != b.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} a-terms and {} b-terms do not form an odd-length fraction",
                a.len(),
                b.len()
            )));
        }
        if let Some(t) = a.iter().chain(&b).find(|t| !t.is_positive()) {
            return Err(Error::InvalidInput(format!("term {t} is not positive")));
        }
        Ok(ContinuedFraction { a, b })
    }

    /// Build from the interleaved list `a0, b0, a1, ..., a_k`.
    pub fn from_terms(terms: &[Int]) -> Result<Self> {
        if terms.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "continued fraction has even length {}",
                terms.len()
            )));
        }
        let a = terms.iter().step_by(2).cloned().collect();
        let b = terms.iter().skip(1).step_by(2).cloned().collect();
        ContinuedFraction::new(a, b)
    }

    pub fn from_i64(terms: &[i64]) -> Result<Self> {
        let t: Vec<Int> = terms.iter().map(|&x| Int::from(x)).collect();
        Self::from_terms(&t)
    }

    pub fn a_terms(&self) -> &[Int] {
        &self.a
    }

    pub fn b_terms(&self) -> &[Int] {
        &self.b
    }

    /// Number of b-terms.
    pub fn k(&self) -> usize {
        self.b.len()
    }

    pub fn terms(&self) -> Vec<Int> {
        let mut out = Vec::with_capacity(self.a.len() + self.b.len());
        for i in 0..self.a.len() {
            out.push(self.a[i].clone());
            if i < self.b.len() {
                out.push(self.b[i].clone());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub y1: Int,
    pub y2: Int,
}

impl LatticePoint {
    pub fn new(y1: impl Into<Int>, y2: impl Into<Int>) -> Self {
        LatticePoint {
            y1: y1.into(),
            y2: y2.into(),
        }
    }

    pub fn origin() -> Self {
        LatticePoint::new(0, 0)
    }

    pub fn add(&self, o: &LatticePoint) -> LatticePoint {
        LatticePoint {
            y1: &self.y1 + &o.y1,
            y2: &self.y2 + &o.y2,
        }
    }

    pub fn sub(&self, o: &LatticePoint) -> LatticePoint {
        LatticePoint {
            y1: &self.y1 - &o.y1,
            y2: &self.y2 - &o.y2,
        }
    }

    pub fn scale(&self, k: &Int) -> LatticePoint {
        LatticePoint {
            y1: &self.y1 * k,
            y2: &self.y2 * k,
        }
    }

    /// `self.y1 * o.y2 - self.y2 * o.y1`.
    pub fn cross(&self, o: &LatticePoint) -> Int {
        &self.y1 * &o.y2 - &self.y2 * &o.y1
    }

    pub fn is_primitive(&self) -> bool {
        self.y1.gcd(&self.y2).is_one()
    }
}

impl std::fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.y1, self.y2)
    }
}

/// Vertices `C_0..C_{k+1}` of the upper chain and `D_0..D_k` of the lower one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentChains {
    pub c: Vec<LatticePoint>,
    pub d: Vec<LatticePoint>,
}

impl ConvergentChains {
    /// The last convergent `(q, p)`.
    pub fn endpoint(&self) -> &LatticePoint {
        self.c.last().expect("chain has at least C0 and C1")
    }
}

pub fn convergents(cf: &ContinuedFraction) -> ConvergentChains {
    let k = cf.k();
    let mut c = vec![LatticePoint::new(1, 0)];
    let mut d = vec![LatticePoint::new(0, 1)];
    for i in 1..=k + 1 {
        let next = d[i - 1].scale(&cf.a[i - 1]).add(&c[i - 1]);
        c.push(next);
        if i <= k {
            let next = c[i].scale(&cf.b[i - 1]).add(&d[i - 1]);
            d.push(next);
        }
    }
    ConvergentChains { c, d }
}

pub fn eval_cfrac(cf: &ContinuedFraction) -> Rat {
    let terms = cf.terms();
    let mut value = Rat::from_integer(terms.last().unwrap().clone());
    for t in terms.iter().rev().skip(1) {
        value = Rat::from_integer(t.clone()) + value.recip();
    }
    value
}

/// The odd-length expansion of a rational `alpha > 1`.
pub fn to_odd_cfrac(alpha: &Rat) -> Result<ContinuedFraction> {
    if *alpha <= Rat::one() {
        return Err(Error::InvalidInput(format!(
            "{alpha} is not greater than 1"
        )));
    }
    let mut terms = Vec::new();
    let (mut n, mut d) = (alpha.numer().clone(), alpha.denom().clone());
    while !d.is_zero() {
        let (t, r) = n.div_mod_floor(&d);
        terms.push(t);
        n = d;
        d = r;
    }
    if terms.len() % 2 == 0 {
        let last = terms.pop().unwrap();
        if last.is_one() {
            *terms.last_mut().unwrap() += 1;
        } else {
            terms.push(last - 1);
            terms.push(Int::one());
        }
    }
    ContinuedFraction::from_terms(&terms)
}

/// Lattice points of the closed segment `from..to`, in order.
pub fn segment_points(from: &LatticePoint, to: &LatticePoint) -> Vec<LatticePoint> {
    let delta = to.sub(from);
    let steps = delta.y1.gcd(&delta.y2);
    if steps.is_zero() {
        return vec![from.clone()];
    }
    let unit = LatticePoint {
        y1: &delta.y1 / &steps,
        y2: &delta.y2 / &steps,
    };
    let mut out = vec![from.clone()];
    let mut cur = from.clone();
    let mut j = Int::zero();
    while j < steps {
        cur = cur.add(&unit);
        out.push(cur.clone());
        j += 1;
    }
    out
}

fn polyline_points(vertices: &[LatticePoint]) -> Vec<LatticePoint> {
    let mut out = vec![vertices[0].clone()];
    for w in vertices.windows(2) {
        out.extend(segment_points(&w[0], &w[1]).into_iter().skip(1));
    }
    out
}

/// All lattice points on the chain `C_0 .. C_{k+1}`, minus the first
/// `skip_prefix` of them.
pub fn chain_points(chains: &ConvergentChains, skip_prefix: usize) -> Vec<LatticePoint> {
    polyline_points(&chains.c)
        .into_iter()
        .skip(skip_prefix)
        .collect()
}

/// All lattice points on the lower chain `D_0 .. D_k`.
pub fn lower_chain_points(chains: &ConvergentChains) -> Vec<LatticePoint> {
    polyline_points(&chains.d)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainReport {
    pub primitive: bool,
    pub upper_segments: bool,
    pub lower_segments: bool,
    pub upper_convex: bool,
    pub lower_convex: bool,
    pub envelope: bool,
    /// First lattice point found strictly between the chain and the final ray.
    pub envelope_violation: Option<LatticePoint>,
}

impl ChainReport {
    pub fn all_pass(&self) -> bool {
        self.primitive
            && self.upper_segments
            && self.lower_segments
            && self.upper_convex
            && self.lower_convex
            && self.envelope
    }
}

// `to - from` must be a positive multiple of the primitive `dir`.
fn is_step_multiple(from: &LatticePoint, to: &LatticePoint, dir: &LatticePoint) -> bool {
    let delta = to.sub(from);
    if !delta.cross(dir).is_zero() || !dir.is_primitive() {
        return false;
    }
    let lambda = if !dir.y1.is_zero() {
        &delta.y1 / &dir.y1
    } else {
        &delta.y2 / &dir.y2
    };
    lambda.is_positive()
        && dir.scale(&lambda) == delta
        && Int::from(segment_points(from, to).len()) == lambda + 1
}

fn turns(vertices: &[LatticePoint]) -> Vec<Int> {
    vertices
        .windows(3)
        .map(|w| w[1].sub(&w[0]).cross(&w[2].sub(&w[1])))
        .collect()
}

/// Check primitivity, segment structure, convexity of both chains, and
/// (by exhaustive scan of `scan = [(y1_lo, y1_hi), (y2_lo, y2_hi)]`) that no
/// nonzero lattice point of the cone lies strictly between the upper chain
/// and the origin.
pub fn check_chain_properties(chains: &ConvergentChains, scan: &[(Int, Int); 2]) -> ChainReport {
    let c = &chains.c;
    let d = &chains.d;
    let mut report = ChainReport {
        primitive: c.iter().chain(d).all(LatticePoint::is_primitive),
        ..Default::default()
    };
    report.upper_segments = (0..c.len() - 1).all(|i| i < d.len() && is_step_multiple(&c[i], &c[i + 1], &d[i]));
    report.lower_segments =
        (0..d.len().saturating_sub(1)).all(|i| is_step_multiple(&d[i], &d[i + 1], &c[i + 1]));
    report.upper_convex = turns(c).iter().all(Signed::is_negative);
    report.lower_convex = turns(d).iter().all(Signed::is_positive);

    let first = &c[0];
    let last = chains.endpoint();
    let origin = LatticePoint::origin();
    let edges: Vec<(LatticePoint, LatticePoint, Int)> = c
        .windows(2)
        .map(|w| {
            let dir = w[1].sub(&w[0]);
            let origin_side = dir.cross(&origin.sub(&w[0]));
            (w[0].clone(), dir, origin_side)
        })
        .collect();
    let mut y1 = scan[0].0.clone();
    'scan: while y1 <= scan[0].1 {
        let mut y2 = scan[1].0.clone();
        while y2 <= scan[1].1 {
            let w = LatticePoint {
                y1: y1.clone(),
                y2: y2.clone(),
            };
            let in_cone = !first.cross(&w).is_negative() && !w.cross(last).is_negative();
            if in_cone && w != origin {
                for (start, dir, origin_side) in &edges {
                    let side = dir.cross(&w.sub(start));
                    if !origin_side.is_zero() && side.signum() == origin_side.signum() {
                        report.envelope_violation = Some(w);
                        break 'scan;
                    }
                }
            }
            y2 += 1;
        }
        y1 += 1;
    }
    report.envelope = report.envelope_violation.is_none();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    fn pts(v: &[(i64, i64)]) -> Vec<LatticePoint> {
        v.iter().map(|&(a, b)| LatticePoint::new(a, b)).collect()
    }

    // independent evaluation of [t0; t1, ...] as a plain fraction pair
    fn nested_value(terms: &[i64]) -> (i64, i64) {
        let (mut n, mut d) = (*terms.last().unwrap(), 1i64);
        for &t in terms.iter().rev().skip(1) {
            let (nn, nd) = (t * n + d, n);
            n = nn;
            d = nd;
        }
        (n, d)
    }

    #[test]
    fn convergents_of_five_halves() {
        let ch = convergents(&ContinuedFraction::from_i64(&[2, 1, 1]).unwrap());
        assert_eq!(ch.c, pts(&[(1, 0), (1, 2), (2, 5)]));
        assert_eq!(ch.d, pts(&[(0, 1), (1, 3)]));
        assert_eq!(nested_value(&[2, 1, 1]), (5, 2));
    }

    #[test]
    fn convergents_single_term() {
        let ch = convergents(&ContinuedFraction::from_i64(&[1]).unwrap());
        assert_eq!(ch.c, pts(&[(1, 0), (1, 1)]));
        assert_eq!(ch.d, pts(&[(0, 1)]));
    }

    fn fib(n: usize) -> i64 {
        let (mut a, mut b) = (0i64, 1i64);
        for _ in 0..n {
            let t = a + b;
            a = b;
            b = t;
        }
        a
    }

    #[test]
    fn fibonacci_fraction_convergents() {
        for s in 1..6 {
            let terms: Vec<i64> = std::iter::once(2).chain(std::iter::repeat_n(1, 2 * s)).collect();
            let ch = convergents(&ContinuedFraction::from_i64(&terms).unwrap());
            for i in 1..=s + 1 {
                assert_eq!(ch.c[i], LatticePoint::new(fib(2 * i - 1), fib(2 * i + 1)));
            }
        }
    }

    #[test]
    fn evaluation() {
        let cases: [&[i64]; 3] = [&[2, 1, 1], &[3], &[2, 1, 1, 1, 1]];
        for t in cases {
            let (n, d) = nested_value(t);
            assert_eq!(eval_cfrac(&ContinuedFraction::from_i64(t).unwrap()), rat(n, d));
        }
        assert_eq!(nested_value(&[2, 1, 1, 1, 1]), (13, 5));
    }

    #[test]
    fn odd_expansion() {
        assert_eq!(to_odd_cfrac(&rat(5, 2)).unwrap(), ContinuedFraction::from_i64(&[2, 1, 1]).unwrap());
        assert_eq!(to_odd_cfrac(&rat(3, 1)).unwrap(), ContinuedFraction::from_i64(&[3]).unwrap());
        let seven_thirds = to_odd_cfrac(&rat(7, 3)).unwrap();
        assert_eq!(seven_thirds, ContinuedFraction::from_i64(&[2, 2, 1]).unwrap());
        assert_eq!(nested_value(&[2, 2, 1]), (7, 3));
        assert!(to_odd_cfrac(&rat(1, 1)).is_err());
        assert!(to_odd_cfrac(&rat(2, 3)).is_err());
    }

    #[test]
    fn rejects_malformed_fractions() {
        assert!(ContinuedFraction::from_i64(&[2, 1]).is_err());
        assert!(ContinuedFraction::from_i64(&[2, 0, 1]).is_err());
        assert!(ContinuedFraction::new(vec![int(1)], vec![int(1)]).is_err());
    }

    #[test]
    fn chain_point_walk() {
        let ch = convergents(&ContinuedFraction::from_i64(&[2, 1, 1]).unwrap());
        assert_eq!(chain_points(&ch, 2), pts(&[(1, 2), (2, 5)]));
        assert_eq!(chain_points(&ch, 0), pts(&[(1, 0), (1, 1), (1, 2), (2, 5)]));
        let ch = convergents(&ContinuedFraction::from_i64(&[2, 1, 1, 1, 1]).unwrap());
        assert_eq!(chain_points(&ch, 2), pts(&[(1, 2), (2, 5), (5, 13)]));
    }

    #[test]
    fn chain_properties_hold() {
        let ch = convergents(&ContinuedFraction::from_i64(&[2, 1, 1]).unwrap());
        assert!(check_chain_properties(&ch, &[(int(0), int(2)), (int(0), int(5))]).all_pass());
        let ch = convergents(&ContinuedFraction::from_i64(&[2, 1, 1, 1, 1]).unwrap());
        assert!(check_chain_properties(&ch, &[(int(0), int(5)), (int(0), int(13))]).all_pass());
    }

    #[test]
    fn corrupted_chain_breaks_envelope() {
        let mut ch = convergents(&ContinuedFraction::from_i64(&[2, 1, 1]).unwrap());
        ch.c[1].y2 += 1;
        let rep = check_chain_properties(&ch, &[(int(0), int(2)), (int(0), int(5))]);
        assert!(!rep.envelope);
        assert!(rep.envelope_violation.is_some());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn odd_terms() -> impl Strategy<Value = Vec<i64>> {
            (0usize..4).prop_flat_map(|k| proptest::collection::vec(1i64..=9, 2 * k + 1))
        }

        proptest! {
            #[test]
            fn odd_expansion_round_trips(terms in odd_terms()) {
                let cf = ContinuedFraction::from_i64(&terms).unwrap();
                let value = eval_cfrac(&cf);
                prop_assume!(value > Rat::one());
                let back = to_odd_cfrac(&value).unwrap();
                prop_assert_eq!(eval_cfrac(&back), value.clone());
                let (n, d) = nested_value(&terms);
                prop_assert_eq!(value, rat(n, d));
                prop_assert_eq!(back, cf);
            }

            #[test]
            fn adjacent_convergents_are_unimodular(terms in odd_terms()) {
                let cf = ContinuedFraction::from_i64(&terms).unwrap();
                let ch = convergents(&cf);
                let end = ch.endpoint();
                prop_assert_eq!(Rat::new(end.y2.clone(), end.y1.clone()), eval_cfrac(&cf));
                for i in 0..ch.d.len() {
                    prop_assert_eq!(ch.c[i].cross(&ch.d[i]).abs(), int(1));
                    prop_assert_eq!(ch.c[i + 1].cross(&ch.d[i]).abs(), int(1));
                }
            }

            #[test]
            fn chain_slopes_increase(terms in odd_terms()) {
                let ch = convergents(&ContinuedFraction::from_i64(&terms).unwrap());
                let points = chain_points(&ch, 0);
                for w in points[1..].windows(2) {
                    prop_assert!(w[0].cross(&w[1]).is_positive());
                }
            }
        }
    }
}
