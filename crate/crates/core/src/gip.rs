//! Exhaustive oracle for `exists z in R, forall y in Q, exists x:
//! Ax + By + Cz <= b`, with instance-aware bounds on `x`.

use num_traits::{Signed, Zero};

use crate::encode::Encoding;
use crate::error::{Error, Result};
use crate::exactmath::{ceil_div, floor_div, Int};
use crate::geometry::{vertices_of, GIPInstance, HPolytope};
use crate::presburger::{parallelogram_point, BoundedBox};

/// Largest `|R| * |Q| * |x box without x1|` the exhaustive oracle accepts.
pub const GIP_LIMIT: u64 = 100_000_000;

/// Integer points of a bounded polygon.
pub fn polygon_points(q: &HPolytope) -> Result<Vec<[Int; 2]>> {
    let v = vertices_of(q)?;
    if v.vertices.is_empty() {
        return Ok(vec![]);
    }
    let lo = |k: usize| v.vertices.iter().map(|p| p[k].ceil().to_integer()).min().unwrap();
    let hi = |k: usize| v.vertices.iter().map(|p| p[k].floor().to_integer()).max().unwrap();
    let (lo1, hi1, lo2, hi2) = (lo(0), hi(0), lo(1), hi(1));
    let area = (&hi1 - &lo1 + 1) * (&hi2 - &lo2 + 1);
    if area > Int::from(GIP_LIMIT) {
        return Err(Error::scale("polygon bounding box", area, GIP_LIMIT));
    }
    let mut out = vec![];
    let mut y1 = lo1;
    while y1 <= hi1 {
        let mut y2 = lo2.clone();
        while y2 <= hi2 {
            let y = [y1.clone(), y2.clone()];
            if q.contains_int(&y) {
                out.push(y);
            }
            y2 += 1;
        }
        y1 += 1;
    }
    Ok(out)
}

/// Box for the `x`-block of a generated instance: `x1` from the lowest
/// mod-witness `floor((mu - p - 1)/M)` up to `q`, `x2` in `[0, p]`, and every
/// lifting coordinate in `{0, 1}`.
pub fn default_x_box(enc: &Encoding, nx: usize) -> BoundedBox {
    let mut ranges = vec![
        (floor_div(&(&enc.source.mu - &enc.p - 1), &enc.modulus), enc.q.clone()),
        (Int::zero(), enc.p.clone()),
    ];
    ranges.extend((2..nx).map(|_| (Int::zero(), Int::from(1))));
    BoundedBox { ranges }
}

fn range_len(r: &(Int, Int)) -> Int {
    (&r.1 - &r.0 + Int::from(1)).max(Int::zero())
}

/// Whether some `x` in the box satisfies every row at `(z, y)`. The first
/// coordinate is not enumerated: the rows cut it down to an interval.
fn exists_x(inst: &GIPInstance, z: &Int, y: &[Int; 2], bx: &BoundedBox, budget: &mut u64) -> Result<bool> {
    let rows = inst.num_rows();
    let base: Vec<Int> = (0..rows)
        .map(|i| &inst.rhs[i] - &inst.c[i] * z - &inst.b[i][0] * &y[0] - &inst.b[i][1] * &y[1])
        .collect();
    let nx = inst.nx;
    if nx == 0 {
        return Ok(base.iter().all(|r| !r.is_negative()));
    }
    let rest_ranges = &bx.ranges[1..];
    if rest_ranges.iter().any(|r| r.0 > r.1) {
        return Ok(false);
    }
    let mut rest: Vec<Int> = rest_ranges.iter().map(|r| r.0.clone()).collect();
    loop {
        if *budget == 0 {
            return Err(Error::scale("GIP search steps", Int::from(GIP_LIMIT) + 1, GIP_LIMIT));
        }
        *budget -= 1;
        let (mut lo, mut hi) = bx.ranges[0].clone();
        let mut ok = lo <= hi;
        for i in 0..rows {
            if !ok {
                break;
            }
            let mut r = base[i].clone();
            for (a, x) in inst.a[i][1..].iter().zip(&rest) {
                if !a.is_zero() {
                    r -= a * x;
                }
            }
            let a0 = &inst.a[i][0];
            if a0.is_positive() {
                hi = hi.min(floor_div(&r, a0));
            } else if a0.is_negative() {
                lo = lo.max(ceil_div(&r, a0));
            } else if r.is_negative() {
                ok = false;
            }
            ok = ok && lo <= hi;
        }
        if ok {
            return Ok(true);
        }
        // odometer over the remaining coordinates
        let mut k = 0;
        loop {
            if k == rest.len() {
                return Ok(false);
            }
            if rest[k] < rest_ranges[k].1 {
                rest[k] += 1;
                break;
            }
            rest[k] = rest_ranges[k].0.clone();
            k += 1;
        }
    }
}

/// The values `z` in `R` for which every `y` in `Q` has a solution `x` in
/// the box.
pub fn gip_witnesses(inst: &GIPInstance, x_box: &BoundedBox) -> Result<Vec<Int>> {
    if x_box.ranges.len() != inst.nx {
        return Err(Error::InvalidInput(format!(
            "x box has {} ranges for {} x-variables",
            x_box.ranges.len(),
            inst.nx
        )));
    }
    let ys = polygon_points(&inst.q)?;
    // the first x-coordinate is solved for, not enumerated; the scan stops
    // at the first feasible x, so the budget counts steps actually taken
    let mut budget = GIP_LIMIT;
    let mut out = vec![];
    let mut z = inst.r.0.clone();
    'z: while z <= inst.r.1 {
        for y in &ys {
            if !exists_x(inst, &z, y, x_box, &mut budget)? {
                z += 1;
                continue 'z;
            }
        }
        out.push(z.clone());
        z += 1;
    }
    Ok(out)
}

pub fn decide_gip(inst: &GIPInstance, x_box: &BoundedBox) -> Result<bool> {
    Ok(!gip_witnesses(inst, x_box)?.is_empty())
}

pub fn count_gip(inst: &GIPInstance, x_box: &BoundedBox) -> Result<Int> {
    Ok(Int::from(gip_witnesses(inst, x_box)?.len()))
}

/// Count for instances too large to scan. `y` runs over the shortened
/// chain only (every other point of `Q` has a lattice point in its
/// parallelogram), and `x` over the mod-witness and that lattice point,
/// each with every 0/1 choice of lifting coordinates.
pub fn count_gip_certified(inst: &GIPInstance, enc: &Encoding) -> Result<Int> {
    let width = range_len(&inst.r);
    if width > Int::from(GIP_LIMIT) {
        return Err(Error::scale("GIP interval", width, GIP_LIMIT));
    }
    let chain = enc.shortened_chain();
    let cells: Vec<Option<[Int; 2]>> = chain
        .iter()
        .map(|y| parallelogram_point(y, &enc.p, &enc.q).map(|x| [x.y1, x.y2]))
        .collect();
    let lifts = inst.nx.saturating_sub(2);
    let mut count = 0u64;
    let mut z = inst.r.0.clone();
    while z <= inst.r.1 {
        let all = chain.iter().zip(&cells).all(|(y, cell)| {
            let yv = [y.y1.clone(), y.y2.clone()];
            let mut xs = vec![[floor_div(&(&z - &y.y2 - Int::from(1)), &enc.modulus), Int::zero()]];
            xs.extend(cell.iter().cloned());
            xs.iter().any(|x| {
                (0u32..1 << lifts).any(|bits| {
                    let mut full = x.to_vec();
                    full.extend((0..lifts).map(|k| Int::from((bits >> k) & 1)));
                    inst.holds(&z, &yv, &full)
                })
            })
        });
        count += all as u64;
        z += 1;
    }
    Ok(Int::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apcover::{count_apcover, normalize, APCoverInstance, APTriple};
    use crate::encode::build_encoding;
    use crate::exactmath::int;
    use crate::geometry::{build_system1, build_system2, triangle_q};
    use crate::presburger::LinearInequality;

    fn enc_of(mu: i64, nu: i64, t: &[(i64, i64, i64)]) -> Encoding {
        let inst = APCoverInstance::new(mu, nu, t.iter().map(|&(g, h, e)| APTriple::new(g, h, e).unwrap()).collect()).unwrap();
        build_encoding(&normalize(&inst).instance).unwrap()
    }

    #[test]
    fn triangle_points_of_reference() {
        let enc = enc_of(1, 5, &[(2, 1, 3)]);
        let pts = polygon_points(&triangle_q(&enc)).unwrap();
        // y1 = 1: y2 = 2; y1 = 2: y2 = 2..5
        assert_eq!(pts.len(), 5);
    }

    #[test]
    fn system1_reference_count() {
        let enc = enc_of(1, 5, &[(2, 1, 3)]);
        let g = build_system1(&enc).unwrap();
        let bx = default_x_box(&enc, g.nx);
        assert_eq!(gip_witnesses(&g, &bx).unwrap(), vec![int(1), int(3), int(4)]);
        assert_eq!(count_gip_certified(&g, &enc).unwrap(), int(3));
    }

    #[test]
    fn system2_reference_count() {
        let enc = enc_of(1, 5, &[(2, 1, 3)]);
        let g = build_system2(&enc).unwrap();
        let bx = default_x_box(&enc, g.nx);
        assert!(decide_gip(&g, &bx).unwrap());
        assert_eq!(count_gip(&g, &bx).unwrap(), int(3));
        assert_eq!(count_gip_certified(&g, &enc).unwrap(), int(3));
    }

    #[test]
    fn covered_instance_is_false() {
        let enc = enc_of(2, 2, &[(2, 1, 3)]);
        for g in [build_system1(&enc).unwrap(), build_system2(&enc).unwrap()] {
            let bx = default_x_box(&enc, g.nx);
            assert!(!decide_gip(&g, &bx).unwrap());
        }
    }

    #[test]
    fn larger_box_changes_nothing() {
        for (mu, nu, t) in [(1, 5, vec![(2, 1, 3)]), (1, 3, vec![(2, 1, 3)]), (2, 4, vec![(2, 1, 5)])] {
            let enc = enc_of(mu, nu, &t);
            let g = build_system1(&enc).unwrap();
            let tight = default_x_box(&enc, g.nx);
            let wide = BoundedBox {
                ranges: tight.ranges.iter().map(|(a, b)| (a - 1, b + 1)).collect(),
            };
            assert_eq!(gip_witnesses(&g, &tight).unwrap(), gip_witnesses(&g, &wide).unwrap());
            let n = normalize(&APCoverInstance::new(mu, nu, t.iter().map(|&(g, h, e)| APTriple::new(g, h, e).unwrap()).collect()).unwrap());
            assert_eq!(count_gip(&g, &tight).unwrap(), count_apcover(&n.instance).unwrap());
        }
    }

    #[test]
    fn extra_row_never_helps() {
        let enc = enc_of(1, 5, &[(2, 1, 3)]);
        let g = build_system1(&enc).unwrap();
        let bx = default_x_box(&enc, g.nx);
        let before = count_gip(&g, &bx).unwrap();
        let mut rows: Vec<LinearInequality> = (0..g.num_rows()).map(|i| g.row(i)).collect();
        let mut extra = vec![int(0); g.num_vars()];
        extra[0] = int(1);
        rows.push(LinearInequality::new(extra, 3));
        let h = GIPInstance::from_rows(&rows, g.r.clone(), g.q.clone()).unwrap();
        let after = count_gip(&h, &bx).unwrap();
        assert!(after <= before);
        assert_eq!(after, int(2));
    }
}
