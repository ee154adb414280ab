//! Whitespace-separated text formats for every instance type. Lines starting
//! with `#` are comments (DIMACS uses `c`). Writers are deterministic and
//! `write(parse(write(x))) == write(x)` for every format.

use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Signed};

use crate::apcover::{APCoverInstance, APTriple, MAPCoverInstance};
use crate::encode::build_encoding;
use crate::error::{Error, Result};
use crate::exactmath::{Int, Rat};
use crate::geometry::{GIPInstance, HPolytope, VPolytope};
use crate::kpt::{ParamDomain, PipInstance};
use crate::optimize::{BilevelInstance, ParetoInstance, QuadraticForm};
use crate::presburger::{Block, BoolTree, LinearInequality, Quantifier, ShortSentence};
use crate::satred::{Cnf3, QbfInstance};

struct Reader {
    lines: Vec<(usize, Vec<String>)>,
    pos: usize,
}

impl Reader {
    fn new(text: &str, comment: &str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let t = l.trim();
                if t.is_empty() || t.starts_with(comment) {
                    return None;
                }
                Some((i + 1, t.split_whitespace().map(str::to_string).collect()))
            })
            .collect();
        Reader { lines, pos: 0 }
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.0)
    }

    fn peek_key(&self) -> Option<&str> {
        self.lines.get(self.pos).map(|(_, t)| t[0].as_str())
    }

    fn next(&mut self) -> Result<(usize, Vec<String>)> {
        let l = self
            .lines
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::parse(self.last_line(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(l)
    }

    /// Next line, which must start with `key`; returns the remaining tokens.
    fn expect(&mut self, key: &str) -> Result<(usize, Vec<String>)> {
        let (n, toks) = self.next()?;
        if toks[0] != key {
            return Err(Error::parse(n, format!("expected `{key}`, found `{}`", toks[0])));
        }
        Ok((n, toks[1..].to_vec()))
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some((n, t)) => Err(Error::parse(*n, format!("trailing input `{}`", t.join(" ")))),
            None => Ok(()),
        }
    }
}

fn int_tok(line: usize, t: &str) -> Result<Int> {
    t.parse().map_err(|_| Error::parse(line, format!("bad integer `{t}`")))
}

fn usize_tok(line: usize, t: &str) -> Result<usize> {
    t.parse().map_err(|_| Error::parse(line, format!("bad count `{t}`")))
}

fn rat_tok(line: usize, t: &str) -> Result<Rat> {
    let bad = || Error::parse(line, format!("bad rational `{t}`"));
    match t.split_once('/') {
        Some((n, d)) => {
            let (n, d): (Int, Int) = (n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?);
            if !d.is_positive() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

fn ints(line: usize, toks: &[String], want: usize) -> Result<Vec<Int>> {
    if toks.len() != want {
        return Err(Error::parse(line, format!("expected {want} integers, found {}", toks.len())));
    }
    toks.iter().map(|t| int_tok(line, t)).collect()
}

fn rats(line: usize, toks: &[String], want: usize) -> Result<Vec<Rat>> {
    if toks.len() != want {
        return Err(Error::parse(line, format!("expected {want} rationals, found {}", toks.len())));
    }
    toks.iter().map(|t| rat_tok(line, t)).collect()
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn join_rat(v: &[Rat]) -> String {
    v.iter().map(fmt_rat).collect::<Vec<_>>().join(" ")
}

fn invalid(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

// ---------------------------------------------------------------- AP-COVER

/// `J mu nu` then one `AP g h e` line per progression.
pub fn write_apcover(inst: &APCoverInstance) -> String {
    let mut s = format!("J {} {}\n", inst.mu, inst.nu);
    for t in &inst.triples {
        let _ = writeln!(s, "AP {} {} {}", t.g, t.h, t.e);
    }
    s
}

fn read_apcover(r: &mut Reader) -> Result<APCoverInstance> {
    let (n, j) = r.expect("J")?;
    let j = ints(n, &j, 2)?;
    let mut triples = vec![];
    while r.peek_key() == Some("AP") {
        let (n, t) = r.expect("AP")?;
        let t = ints(n, &t, 3)?;
        triples.push(APTriple::new(t[0].clone(), t[1].clone(), t[2].clone()).map_err(|e| invalid(n, e))?);
    }
    APCoverInstance::new(j[0].clone(), j[1].clone(), triples).map_err(|e| invalid(n, e))
}

pub fn parse_apcover(text: &str) -> Result<APCoverInstance> {
    let mut r = Reader::new(text, "#");
    let inst = read_apcover(&mut r)?;
    r.finish()?;
    Ok(inst)
}

/// `PREFIX AE..`, `TAU t_1 .. t_m`, then `J i lo hi` and `AP i g h e` records
/// tagged with their group index (outermost group 0).
pub fn write_mapcover(inst: &MAPCoverInstance) -> String {
    let prefix: String = inst.quantifiers.iter().map(|q| q.as_char()).collect();
    let mut s = format!("PREFIX {prefix}\nTAU {}\n", join(&inst.taus));
    for (i, (lo, hi)) in inst.intervals.iter().enumerate() {
        let _ = writeln!(s, "J {i} {lo} {hi}");
    }
    for (i, g) in inst.groups.iter().enumerate() {
        for t in g {
            let _ = writeln!(s, "AP {i} {} {} {}", t.g, t.h, t.e);
        }
    }
    s
}

pub fn parse_mapcover(text: &str) -> Result<MAPCoverInstance> {
    let mut r = Reader::new(text, "#");
    let (n, p) = r.expect("PREFIX")?;
    if p.len() != 1 {
        return Err(Error::parse(n, "PREFIX takes one word"));
    }
    let quantifiers = p[0]
        .chars()
        .map(|c| Quantifier::from_char(c).ok_or_else(|| Error::parse(n, format!("bad quantifier `{c}`"))))
        .collect::<Result<Vec<_>>>()?;
    let m = quantifiers.len();
    let (n, t) = r.expect("TAU")?;
    let taus = ints(n, &t, m)?;
    let mut intervals = vec![];
    for i in 0..m {
        let (n, j) = r.expect("J")?;
        let j = ints(n, &j, 3)?;
        if j[0] != Int::from(i) {
            return Err(Error::parse(n, format!("expected interval {i}")));
        }
        intervals.push((j[1].clone(), j[2].clone()));
    }
    let mut groups = vec![vec![]; m];
    while r.peek_key() == Some("AP") {
        let (n, t) = r.expect("AP")?;
        let g = usize_tok(n, &t[0])?;
        let t = ints(n, &t[1..], 3)?;
        if g >= m {
            return Err(Error::parse(n, format!("group {g} out of range")));
        }
        groups[g].push(APTriple::new(t[0].clone(), t[1].clone(), t[2].clone()).map_err(|e| invalid(n, e))?);
    }
    r.finish()?;
    MAPCoverInstance::new(intervals, groups, taus, quantifiers).map_err(|e| invalid(1, e))
}

// ---------------------------------------------------------------- sentences

fn write_tree(t: &BoolTree, depth: usize, s: &mut String) {
    let pad = "  ".repeat(depth);
    match t {
        BoolTree::Leaf(l) => {
            let _ = writeln!(s, "{pad}(row {} <= {})", join(&l.coeffs), l.bound);
        }
        BoolTree::And(k) | BoolTree::Or(k) => {
            let op = if matches!(t, BoolTree::And(_)) { "and" } else { "or" };
            let _ = writeln!(s, "{pad}({op}");
            for c in k {
                write_tree(c, depth + 1, s);
            }
            let _ = writeln!(s, "{pad})");
        }
    }
}

/// `SENTENCE`, one `E d` / `A d` line per block, then `MATRIX` and the
/// parenthesized tree. Metadata for the certified evaluator is not stored.
pub fn write_sentence(st: &ShortSentence) -> String {
    let mut s = String::from("SENTENCE\n");
    for b in &st.prefix {
        let _ = writeln!(s, "{} {}", b.quantifier.as_char(), b.dim);
    }
    s.push_str("MATRIX\n");
    write_tree(&st.matrix, 0, &mut s);
    s
}

fn parse_tree(toks: &[(usize, String)], pos: &mut usize, width: usize) -> Result<BoolTree> {
    let end = toks.last().map_or(1, |t| t.0);
    let take = |pos: &mut usize| -> Result<(usize, String)> {
        let t = toks.get(*pos).cloned().ok_or_else(|| Error::parse(end, "unexpected end of matrix"))?;
        *pos += 1;
        Ok(t)
    };
    let (n, open) = take(pos)?;
    if open != "(" {
        return Err(Error::parse(n, format!("expected `(`, found `{open}`")));
    }
    let (n, op) = take(pos)?;
    match op.as_str() {
        "row" => {
            let mut coeffs = vec![];
            for _ in 0..width {
                let (n, c) = take(pos)?;
                coeffs.push(int_tok(n, &c)?);
            }
            let (n, le) = take(pos)?;
            if le != "<=" {
                return Err(Error::parse(n, format!("expected `<=`, found `{le}`")));
            }
            let (n, b) = take(pos)?;
            let bound = int_tok(n, &b)?;
            let (n, close) = take(pos)?;
            if close != ")" {
                return Err(Error::parse(n, "row has the wrong number of coefficients"));
            }
            Ok(BoolTree::Leaf(LinearInequality::new(coeffs, bound)))
        }
        "and" | "or" => {
            let mut kids = vec![];
            while toks.get(*pos).map(|t| t.1.as_str()) == Some("(") {
                kids.push(parse_tree(toks, pos, width)?);
            }
            let (n, close) = take(pos)?;
            if close != ")" {
                return Err(Error::parse(n, format!("expected `)`, found `{close}`")));
            }
            Ok(if op == "and" { BoolTree::And(kids) } else { BoolTree::Or(kids) })
        }
        other => Err(Error::parse(n, format!("unknown node `{other}`"))),
    }
}

pub fn parse_sentence(text: &str) -> Result<ShortSentence> {
    let mut r = Reader::new(&text.replace('(', " ( ").replace(')', " ) "), "#");
    r.expect("SENTENCE")?;
    let mut prefix = vec![];
    while r.peek_key() != Some("MATRIX") {
        let (n, t) = r.next()?;
        let q = match t[0].as_str() {
            "E" => Quantifier::Exists,
            "A" => Quantifier::Forall,
            other => return Err(Error::parse(n, format!("expected a quantifier block, found `{other}`"))),
        };
        if t.len() != 2 {
            return Err(Error::parse(n, "block line is `E d` or `A d`"));
        }
        prefix.push(Block { quantifier: q, dim: usize_tok(n, &t[1])? });
    }
    r.expect("MATRIX")?;
    let width = prefix.iter().map(|b| b.dim).sum();
    let toks: Vec<(usize, String)> = r.lines[r.pos..]
        .iter()
        .flat_map(|(n, t)| t.iter().map(move |s| (*n, s.clone())))
        .collect();
    let mut pos = 0;
    let matrix = parse_tree(&toks, &mut pos, width)?;
    if let Some((n, t)) = toks.get(pos) {
        return Err(Error::parse(*n, format!("trailing input `{t}`")));
    }
    Ok(ShortSentence { prefix, matrix, meta: None })
}

// ---------------------------------------------------------------- polytopes

/// `H d m` then `m` rows `a_1 .. a_d <= b`.
pub fn write_hpolytope(h: &HPolytope) -> String {
    let mut s = format!("H {} {}\n", h.dim, h.rows.len());
    for r in &h.rows {
        let _ = writeln!(s, "{} <= {}", join(&r.coeffs), r.bound);
    }
    s
}

fn read_hpolytope(r: &mut Reader) -> Result<HPolytope> {
    let (n, hd) = r.expect("H")?;
    let hd: Vec<usize> = hd.iter().map(|t| usize_tok(n, t)).collect::<Result<_>>()?;
    if hd.len() != 2 {
        return Err(Error::parse(n, "header is `H d m`"));
    }
    let (d, m) = (hd[0], hd[1]);
    let mut rows = vec![];
    for _ in 0..m {
        let (n, t) = r.next()?;
        if t.len() != d + 2 || t[d] != "<=" {
            return Err(Error::parse(n, format!("row is {d} coefficients, `<=`, bound")));
        }
        let mut v = rats(n, &t[..d], d)?;
        v.push(rat_tok(n, &t[d + 1])?);
        // scale rational rows to integers
        let l = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
        let v: Vec<Int> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
        rows.push(LinearInequality::new(v[..d].to_vec(), v[d].clone()));
    }
    HPolytope::new(d, rows).map_err(|e| invalid(n, e))
}

pub fn parse_hpolytope(text: &str) -> Result<HPolytope> {
    let mut r = Reader::new(text, "#");
    let h = read_hpolytope(&mut r)?;
    r.finish()?;
    Ok(h)
}

/// `V d m` then `m` vertices as rationals `n` or `n/d`.
pub fn write_vpolytope(v: &VPolytope) -> String {
    let mut s = format!("V {} {}\n", v.dim, v.vertices.len());
    for p in &v.vertices {
        let _ = writeln!(s, "{}", join_rat(p));
    }
    s
}

pub fn parse_vpolytope(text: &str) -> Result<VPolytope> {
    let mut r = Reader::new(text, "#");
    let (n, hd) = r.expect("V")?;
    let hd: Vec<usize> = hd.iter().map(|t| usize_tok(n, t)).collect::<Result<_>>()?;
    if hd.len() != 2 {
        return Err(Error::parse(n, "header is `V d m`"));
    }
    let mut vertices = vec![];
    for _ in 0..hd[1] {
        let (n, t) = r.next()?;
        vertices.push(rats(n, &t, hd[0])?);
    }
    r.finish()?;
    VPolytope::new(hd[0], vertices).map_err(|e| invalid(n, e))
}

// ---------------------------------------------------------------- GIP

/// `GIP rows nx`, blocks `A` (rows × nx), `B` (rows × 2), `C` and `b` (one
/// line each), `R lo hi`, then `Q` followed by an H-polytope.
pub fn write_gip(g: &GIPInstance) -> String {
    let mut s = format!("GIP {} {}\nA\n", g.num_rows(), g.nx);
    for row in &g.a {
        let _ = writeln!(s, "{}", join(row));
    }
    s.push_str("B\n");
    for row in &g.b {
        let _ = writeln!(s, "{}", join(row));
    }
    let _ = writeln!(s, "C {}", join(&g.c));
    let _ = writeln!(s, "b {}", join(&g.rhs));
    let _ = writeln!(s, "R {} {}", g.r.0, g.r.1);
    s.push_str("Q\n");
    s.push_str(&write_hpolytope(&g.q));
    s
}

fn matrix(r: &mut Reader, rows: usize, cols: usize) -> Result<Vec<Vec<Int>>> {
    (0..rows)
        .map(|_| {
            let (n, t) = r.next()?;
            ints(n, &t, cols)
        })
        .collect()
}

pub fn parse_gip(text: &str) -> Result<GIPInstance> {
    let mut r = Reader::new(text, "#");
    let (n, hd) = r.expect("GIP")?;
    if hd.len() != 2 {
        return Err(Error::parse(n, "header is `GIP rows nx`"));
    }
    let (m, nx) = (usize_tok(n, &hd[0])?, usize_tok(n, &hd[1])?);
    r.expect("A")?;
    let a = matrix(&mut r, m, nx)?;
    r.expect("B")?;
    let b = matrix(&mut r, m, 2)?;
    let (n, c) = r.expect("C")?;
    let c = ints(n, &c, m)?;
    let (n, rhs) = r.expect("b")?;
    let rhs = ints(n, &rhs, m)?;
    let (n, rr) = r.expect("R")?;
    let rr = ints(n, &rr, 2)?;
    r.expect("Q")?;
    let q = read_hpolytope(&mut r)?;
    r.finish()?;
    if q.dim != 2 {
        return Err(Error::parse(n, "Q must be a polygon"));
    }
    Ok(GIPInstance { a, b, c, rhs, r: (rr[0].clone(), rr[1].clone()), q, nx })
}

// ---------------------------------------------------------------- bilevel / Pareto

/// `QUAD n`, `n` rows of the symmetric matrix, `LINEAR ..`, `CONST c`.
pub fn write_quadratic(f: &QuadraticForm) -> String {
    let mut s = format!("QUAD {}\n", f.dim());
    for row in &f.quad {
        let _ = writeln!(s, "{}", join_rat(row));
    }
    let _ = writeln!(s, "LINEAR {}", join_rat(&f.linear));
    let _ = writeln!(s, "CONST {}", fmt_rat(&f.constant));
    s
}

fn read_quadratic(r: &mut Reader) -> Result<QuadraticForm> {
    let (n, hd) = r.expect("QUAD")?;
    if hd.len() != 1 {
        return Err(Error::parse(n, "header is `QUAD n`"));
    }
    let d = usize_tok(n, &hd[0])?;
    let mut quad = vec![];
    for _ in 0..d {
        let (n, t) = r.next()?;
        quad.push(rats(n, &t, d)?);
    }
    for i in 0..d {
        for j in 0..i {
            if quad[i][j] != quad[j][i] {
                return Err(Error::parse(n, "quadratic matrix is not symmetric"));
            }
        }
    }
    let (n, l) = r.expect("LINEAR")?;
    let linear = rats(n, &l, d)?;
    let (n, c) = r.expect("CONST")?;
    let constant = rats(n, &c, 1)?.remove(0);
    Ok(QuadraticForm { quad, linear, constant })
}

/// The normalized source instance and its shift, then the instance data.
pub fn write_bilevel(b: &BilevelInstance) -> String {
    let mut s = String::from("BILEVEL\nSOURCE\n");
    s.push_str(&write_apcover(&b.encoding.source));
    let _ = writeln!(s, "SHIFT {}", b.encoding.shift);
    let _ = writeln!(s, "Z {} {}", b.j.0, b.j.1);
    let _ = writeln!(s, "K {}", b.k);
    let _ = writeln!(s, "T {}", b.t_max);
    let _ = writeln!(s, "M {}", b.modulus);
    s.push_str("W\n");
    s.push_str(&write_hpolytope(&b.w));
    s.push_str(&write_quadratic(&b.h));
    s
}

fn one_int(r: &mut Reader, key: &str) -> Result<Int> {
    let (n, t) = r.expect(key)?;
    Ok(ints(n, &t, 1)?.remove(0))
}

fn read_bilevel(r: &mut Reader) -> Result<BilevelInstance> {
    let (n0, _) = r.expect("BILEVEL")?;
    r.expect("SOURCE")?;
    let source = read_apcover(r)?;
    let mut encoding = build_encoding(&source).map_err(|e| invalid(n0, e))?;
    encoding.shift = one_int(r, "SHIFT")?;
    let (n, z) = r.expect("Z")?;
    let z = ints(n, &z, 2)?;
    let k = one_int(r, "K")?;
    let t_max = one_int(r, "T")?;
    let modulus = one_int(r, "M")?;
    r.expect("W")?;
    let w = read_hpolytope(r)?;
    let h = read_quadratic(r)?;
    Ok(BilevelInstance {
        j: (z[0].clone(), z[1].clone()),
        w,
        h,
        k,
        t_max,
        modulus,
        encoding,
    })
}

pub fn parse_bilevel(text: &str) -> Result<BilevelInstance> {
    let mut r = Reader::new(text, "#");
    let b = read_bilevel(&mut r)?;
    r.finish()?;
    Ok(b)
}

pub fn write_pareto(p: &ParetoInstance) -> String {
    let mut s = format!("PARETO {}\n", u8::from(p.parity_trick));
    let _ = writeln!(s, "F1 {}", join(&p.f1));
    let _ = writeln!(s, "F2 {}", join(&p.f2));
    let _ = writeln!(s, "G {}", join(&p.g));
    s.push_str("Q6\n");
    s.push_str(&write_hpolytope(&p.q6));
    s.push_str("F3\n");
    s.push_str(&write_quadratic(&p.f3));
    s.push_str(&write_bilevel(&p.bilevel));
    s
}

pub fn parse_pareto(text: &str) -> Result<ParetoInstance> {
    let mut r = Reader::new(text, "#");
    let (n, hd) = r.expect("PARETO")?;
    let parity_trick = match hd.as_slice() {
        [f] if f == "0" => false,
        [f] if f == "1" => true,
        _ => return Err(Error::parse(n, "header is `PARETO 0` or `PARETO 1`")),
    };
    let (n, f1) = r.expect("F1")?;
    let f1 = ints(n, &f1, 6)?;
    let (n, f2) = r.expect("F2")?;
    let f2 = ints(n, &f2, 6)?;
    let (n, g) = r.expect("G")?;
    let g = ints(n, &g, 3)?;
    r.expect("Q6")?;
    let q6 = read_hpolytope(&mut r)?;
    r.expect("F3")?;
    let f3 = read_quadratic(&mut r)?;
    let bilevel = read_bilevel(&mut r)?;
    r.finish()?;
    Ok(ParetoInstance { q6, f1, f2, f3, g, bilevel, parity_trick })
}

// ---------------------------------------------------------------- PIP

/// `PIP m n k`, `A` with `m` rows of `n` integers, `F` with `m` rows of `k`
/// parameter coefficients then the constant, then `DOMAIN BOX r_1 .. r_k` or
/// `DOMAIN H` followed by an H-polytope.
pub fn write_pip(p: &PipInstance) -> String {
    let mut s = format!("PIP {} {} {}\nA\n", p.a.len(), p.num_vars(), p.num_params());
    for row in &p.a {
        let _ = writeln!(s, "{}", join(row));
    }
    s.push_str("F\n");
    for (row, c) in p.f_lin.iter().zip(&p.f_const) {
        let mut v = row.clone();
        v.push(c.clone());
        let _ = writeln!(s, "{}", join_rat(&v));
    }
    match &p.domain {
        ParamDomain::Box(r) => {
            let _ = writeln!(s, "DOMAIN BOX {}", join(r));
        }
        ParamDomain::Polytope(h) => {
            s.push_str("DOMAIN H\n");
            s.push_str(&write_hpolytope(h));
        }
    }
    s
}

pub fn parse_pip(text: &str) -> Result<PipInstance> {
    let mut r = Reader::new(text, "#");
    let (n, hd) = r.expect("PIP")?;
    let hd: Vec<usize> = hd.iter().map(|t| usize_tok(n, t)).collect::<Result<_>>()?;
    if hd.len() != 3 {
        return Err(Error::parse(n, "header is `PIP m n k`"));
    }
    let (m, nv, k) = (hd[0], hd[1], hd[2]);
    r.expect("A")?;
    let a = matrix(&mut r, m, nv)?;
    r.expect("F")?;
    let mut f_lin = vec![];
    let mut f_const = vec![];
    for _ in 0..m {
        let (n, t) = r.next()?;
        let mut v = rats(n, &t, k + 1)?;
        f_const.push(v.pop().expect("k + 1 entries"));
        f_lin.push(v);
    }
    let (n, d) = r.expect("DOMAIN")?;
    let domain = match d.first().map(String::as_str) {
        Some("BOX") => ParamDomain::Box(ints(n, &d[1..], k)?),
        Some("H") if d.len() == 1 => ParamDomain::Polytope(read_hpolytope(&mut r)?),
        _ => return Err(Error::parse(n, "domain is `BOX r..` or `H`")),
    };
    r.finish()?;
    PipInstance::new(a, f_lin, f_const, domain).map_err(|e| invalid(n, e))
}

// ---------------------------------------------------------------- DIMACS

fn clause3(line: usize, lits: &[i32]) -> Result<[i32; 3]> {
    match *lits {
        [a] => Ok([a, a, a]),
        [a, b] => Ok([a, b, b]),
        [a, b, c] => Ok([a, b, c]),
        [] => Err(Error::parse(line, "empty clause")),
        _ => Err(Error::parse(line, "clauses have at most 3 literals")),
    }
}

struct Dimacs {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
    blocks: Vec<(Quantifier, Vec<usize>)>,
}

fn read_dimacs(text: &str, allow_prefix: bool) -> Result<Dimacs> {
    let r = Reader::new(text, "c");
    let mut it = r.lines.into_iter();
    let (n, hd) = it.next().ok_or_else(|| Error::parse(1, "missing `p cnf` header"))?;
    if hd.len() != 4 || hd[0] != "p" || hd[1] != "cnf" {
        return Err(Error::parse(n, "header is `p cnf <vars> <clauses>`"));
    }
    let (num_vars, num_clauses) = (usize_tok(n, &hd[2])?, usize_tok(n, &hd[3])?);
    let mut blocks: Vec<(Quantifier, Vec<usize>)> = vec![];
    let mut clauses = vec![];
    let mut cur: Vec<i32> = vec![];
    let mut last = n;
    for (n, toks) in it {
        last = n;
        let q = Quantifier::from_char(toks[0].chars().next().unwrap_or(' '));
        if toks[0].len() == 1 && q.is_some() {
            if !allow_prefix || !clauses.is_empty() || !cur.is_empty() {
                return Err(Error::parse(n, "unexpected quantifier line"));
            }
            let q = q.expect("checked");
            let mut vars = vec![];
            for t in &toks[1..] {
                let v = usize_tok(n, t)?;
                if v == 0 {
                    break;
                }
                vars.push(v);
            }
            if toks.last().map(String::as_str) != Some("0") {
                return Err(Error::parse(n, "quantifier line must end with 0"));
            }
            match blocks.last_mut() {
                Some((bq, vs)) if *bq == q => vs.extend(vars),
                _ => blocks.push((q, vars)),
            }
            continue;
        }
        for t in &toks {
            let l: i32 = t.parse().map_err(|_| Error::parse(n, format!("bad literal `{t}`")))?;
            if l == 0 {
                clauses.push(clause3(n, &cur)?);
                cur.clear();
            } else {
                if l.unsigned_abs() as usize > num_vars {
                    return Err(Error::parse(n, format!("literal {l} exceeds {num_vars} variables")));
                }
                cur.push(l);
            }
        }
    }
    if !cur.is_empty() {
        return Err(Error::parse(last, "last clause is not terminated by 0"));
    }
    if clauses.len() != num_clauses {
        return Err(Error::parse(last, format!("header promises {num_clauses} clauses, found {}", clauses.len())));
    }
    Ok(Dimacs { num_vars, clauses, blocks })
}

pub fn parse_dimacs(text: &str) -> Result<Cnf3> {
    let d = read_dimacs(text, false)?;
    Cnf3::new(d.num_vars, d.clauses).map_err(|e| invalid(1, e))
}

pub fn write_dimacs(f: &Cnf3) -> String {
    let mut s = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        let _ = writeln!(s, "{} 0", join(c));
    }
    s
}

/// QDIMACS: `a`/`e` lines, outermost first, between header and clauses.
pub fn parse_qdimacs(text: &str) -> Result<QbfInstance> {
    let d = read_dimacs(text, true)?;
    let matrix = Cnf3::new(d.num_vars, d.clauses).map_err(|e| invalid(1, e))?;
    QbfInstance::new(d.blocks, matrix).map_err(|e| invalid(1, e))
}

pub fn write_qdimacs(f: &QbfInstance) -> String {
    let mut s = format!("p cnf {} {}\n", f.matrix.num_vars, f.matrix.clauses.len());
    for (q, vs) in &f.blocks {
        let _ = writeln!(s, "{} {} 0", q.as_char().to_ascii_lowercase(), join(vs));
    }
    for c in &f.matrix.clauses {
        let _ = writeln!(s, "{} 0", join(c));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apcover::normalize;
    use crate::encode::{build_sentence3, build_sentence_m, encode_groups};
    use crate::geometry::{build_system1, build_system2, system1_lift};
    use crate::kpt::{fibonacci_family, flatten_params};
    use crate::optimize::{build_bilevel, build_pareto};
    use crate::satred::reduce_qbf_to_mapcover;
    use proptest::prelude::*;

    fn reference() -> APCoverInstance {
        APCoverInstance::new(1, 5, vec![APTriple::new(2, 1, 3).unwrap()]).unwrap()
    }

    fn enc() -> crate::encode::Encoding {
        build_encoding(&normalize(&reference()).instance).unwrap()
    }

    fn qbf() -> QbfInstance {
        let m = Cnf3::new(3, vec![[1, -2, 3], [-1, 2, 2]]).unwrap();
        QbfInstance::new(vec![(Quantifier::Forall, vec![1]), (Quantifier::Exists, vec![2, 3])], m).unwrap()
    }

    #[test]
    fn apcover_round_trip() {
        let s = write_apcover(&reference());
        assert_eq!(s, "J 1 5\nAP 2 1 3\n");
        assert_eq!(parse_apcover(&s).unwrap(), reference());
    }

    #[test]
    fn mapcover_round_trip() {
        let m = reduce_qbf_to_mapcover(&qbf()).unwrap();
        let s = write_mapcover(&m);
        assert!(s.starts_with("PREFIX AE\nTAU "));
        assert_eq!(parse_mapcover(&s).unwrap(), m);
    }

    #[test]
    fn sentence_round_trips() {
        let s3 = build_sentence3(&enc());
        let t = write_sentence(&s3);
        let back = parse_sentence(&t).unwrap();
        assert_eq!(back.prefix, s3.prefix);
        assert_eq!(back.matrix, s3.matrix);
        assert_eq!(back.num_inequalities(), 10);
        assert_eq!(write_sentence(&back), t);

        let m = reduce_qbf_to_mapcover(&qbf()).unwrap();
        let sm = build_sentence_m(&m, &encode_groups(&m).unwrap()).unwrap();
        let t = write_sentence(&sm);
        assert_eq!(write_sentence(&parse_sentence(&t).unwrap()), t);
    }

    #[test]
    fn polytope_round_trips() {
        let (v, h) = system1_lift(&enc()).unwrap();
        let t = write_hpolytope(&h);
        assert_eq!(parse_hpolytope(&t).unwrap(), h);
        let t = write_vpolytope(&v);
        assert_eq!(parse_vpolytope(&t).unwrap(), v);
        let half = parse_vpolytope("V 2 1\n1/2 -3/4\n").unwrap();
        assert_eq!(write_vpolytope(&half), "V 2 1\n1/2 -3/4\n");
        // rational rows are scaled to integers
        let h = parse_hpolytope("H 2 1\n1/2 1/3 <= 1\n").unwrap();
        assert_eq!(write_hpolytope(&h), "H 2 1\n3 2 <= 6\n");
    }

    #[test]
    fn gip_round_trips() {
        for g in [build_system1(&enc()).unwrap(), build_system2(&enc()).unwrap()] {
            let t = write_gip(&g);
            assert_eq!(parse_gip(&t).unwrap(), g);
        }
    }

    #[test]
    fn bilevel_and_pareto_round_trip() {
        let b = build_bilevel(&enc());
        let t = write_bilevel(&b);
        assert_eq!(parse_bilevel(&t).unwrap(), b);
        for parity in [false, true] {
            let p = build_pareto(&enc(), parity);
            let t = write_pareto(&p);
            assert_eq!(parse_pareto(&t).unwrap(), p);
        }
    }

    #[test]
    fn pip_round_trips() {
        let f = fibonacci_family(3).unwrap();
        let t = write_pip(&f.pip);
        assert_eq!(parse_pip(&t).unwrap(), f.pip);
        let boxed = PipInstance::new(
            vec![vec![Int::from(1), Int::from(-2)]],
            vec![vec![Rat::new(1.into(), 2.into()), Rat::from_integer((-1).into())]],
            vec![Rat::new(3.into(), 4.into())],
            ParamDomain::Box(vec![Int::from(3), Int::from(4)]),
        )
        .unwrap();
        let flat = flatten_params(&boxed).unwrap();
        for p in [boxed, flat] {
            assert_eq!(parse_pip(&write_pip(&p)).unwrap(), p);
        }
    }

    #[test]
    fn dimacs_round_trips() {
        let text = "c a comment\np cnf 3 2\n1 -2 3 0\n-1\n 2 0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.clauses, vec![[1, -2, 3], [-1, 2, 2]]);
        assert_eq!(parse_dimacs(&write_dimacs(&f)).unwrap(), f);
        let q = qbf();
        let t = write_qdimacs(&q);
        assert_eq!(t, "p cnf 3 2\na 1 0\ne 2 3 0\n1 -2 3 0\n-1 2 2 0\n");
        assert_eq!(parse_qdimacs(&t).unwrap(), q);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let line = |r: Result<Cnf3>| match r {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected a parse error, got {other:?}"),
        };
        assert_eq!(line(parse_dimacs("p cnf 2 1\n1 2 x 0\n")), 2);
        assert_eq!(line(parse_dimacs("p cnf 2 1\n1 5 0\n")), 2);
        assert_eq!(line(parse_dimacs("p cnf 2 2\n1 2 0\n")), 2);
        assert_eq!(line(parse_dimacs("p cnf 2 1\n1 2 -1 2 0\n")), 2);
        assert!(matches!(parse_apcover("J 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_apcover("J 1 5\nAP 2 1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            parse_sentence("SENTENCE\nE 1\nMATRIX\n(row 1 2 <= 3)\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(parse_qdimacs("p cnf 2 1\ne 1 0\n1 2 0\n"), Err(Error::Parse { .. })));
    }

    fn arb_apcover() -> impl Strategy<Value = APCoverInstance> {
        (0i64..20, 0i64..20, prop::collection::vec((0i64..30, 0i64..5, 1i64..9), 0..4)).prop_map(|(a, w, t)| {
            APCoverInstance::new(a, a + w, t.into_iter().map(|(g, h, e)| APTriple::new(g, h, e).unwrap()).collect())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn apcover_text_is_lossless(inst in arb_apcover()) {
            let t = write_apcover(&inst);
            let back = parse_apcover(&t).unwrap();
            prop_assert_eq!(write_apcover(&back), t);
            prop_assert_eq!(back, inst);
        }

        #[test]
        fn sentence_text_is_lossless(inst in arb_apcover()) {
            let e = build_encoding(&normalize(&inst).instance).unwrap();
            let s = build_sentence3(&e);
            let t = write_sentence(&s);
            let back = parse_sentence(&t).unwrap();
            prop_assert_eq!(&back.matrix, &s.matrix);
            prop_assert_eq!(write_sentence(&back), t);
        }
    }
}
