//! Exact integer and rational arithmetic helpers: modular inverses, the
//! Chinese remainder theorem, small primes and rounding division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Inverse of `a` modulo `m`, returned as the representative in `[1, m]`.
pub fn mod_inverse(a: &Int, m: &Int) -> Result<Int> {
    if *m < int(2) {
        return Err(Error::InvalidInput(format!("modulus {m} is below 2")));
    }
    let r = a.mod_floor(m);
    let eg = r.extended_gcd(m);
    if !eg.gcd.is_one() {
        return Err(Error::NotInvertible {
            a: a.clone(),
            m: m.clone(),
        });
    }
    let x = eg.x.mod_floor(m);
    Ok(if x.is_zero() { m.clone() } else { x })
}

/// Least non-negative solution of a system of congruences with pairwise
/// coprime moduli. An empty system has solution 0.
pub fn crt_solve(residues: &[(Int, Int)]) -> Result<Int> {
    let mut value = Int::zero();
    let mut modulus = Int::one();
    for (r, m) in residues {
        if !m.is_positive() {
            return Err(Error::InvalidInput(format!("modulus {m} is not positive")));
        }
        if r.is_negative() || r >= m {
            return Err(Error::InvalidInput(format!(
                "remainder {r} outside [0, {m})"
            )));
        }
        let g = modulus.gcd(m);
        if !g.is_one() {
            return Err(Error::NonCoprimeModuli {
                modulus: m.clone(),
                gcd: g,
            });
        }
        if m.is_one() {
            continue;
        }
        // value + modulus * k ≡ r (mod m)
        let inv = mod_inverse(&modulus, m)?;
        let k = ((r - &value) * inv).mod_floor(m);
        value += &modulus * k;
        modulus *= m;
    }
    Ok(value)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<Int> {
    primes_from(0, count)
}

/// `count` consecutive primes starting at the prime with zero-based index
/// `skip`; `primes_from(1, l)` gives 3, 5, 7, ...
pub fn primes_from(skip: usize, count: usize) -> Vec<Int> {
    (2u64..)
        .filter(|&n| is_prime(n))
        .skip(skip)
        .take(count)
        .map(Int::from)
        .collect()
}

pub fn floor_div(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

pub fn ceil_div(a: &Int, b: &Int) -> Int {
    -((-a).div_floor(b))
}

pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    acc
}

/// Scale a rational vector by the lcm of its denominators.
pub fn clear_denominators(v: &[Rat]) -> Vec<Int> {
    let l = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Divide an integer vector by the gcd of its entries (zero vector unchanged).
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn to_i128(v: &Int) -> Option<i128> {
    use num_traits::ToPrimitive;
    v.to_i128()
}
