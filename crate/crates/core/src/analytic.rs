//! Recursions and closed forms for the three families, evaluated in exact
//! integer and rational arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Family;

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

fn pow4(g: u32) -> BigInt {
    BigInt::one() << (2 * g as usize)
}

fn check_generation(g: u32) -> Result<()> {
    if g == 0 {
        Err(Error::InvalidGeneration(g))
    } else {
        Ok(())
    }
}

/// Vertex and edge counts, vertices per creation iteration, and the degree
/// of a vertex created at each iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    pub n: BigInt,
    pub e: BigInt,
    pub lv: BTreeMap<u32, BigInt>,
    pub degree_of: BTreeMap<u32, BigInt>,
}

/// For `S++_g` every vertex is attributed to iteration `g` and has degree 3.
pub fn counts(family: Family, g: u32) -> Result<Counts> {
    check_generation(g)?;
    match family {
        Family::Fractal | Family::Nonfractal => {
            let n = (pow4(g) + 2) * 2 / 3;
            let e = pow4(g);
            let lv = (1..=g)
                .map(|gi| (gi, if gi == 1 { big(4) } else { pow4(gi - 1) * 2 }))
                .collect();
            let degree_of = (1..=g).map(|gi| (gi, BigInt::one() << (g - gi + 1))).collect();
            Ok(Counts { n, e, lv, degree_of })
        }
        Family::Sierpinski => {
            let p = big(3).pow(g - 1);
            let n: BigInt = &p * 4;
            let e: BigInt = &p * 6;
            Ok(Counts {
                lv: BTreeMap::from([(g, n.clone())]),
                degree_of: BTreeMap::from([(g, big(3))]),
                n,
                e,
            })
        }
    }
}

/// Maximum-matching sizes of `F_g ∖ {v1, v2}`, `F_g ∖ {v1}` and `F_g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchingSizeTriple {
    pub a: u128,
    pub b: u128,
    pub c: u128,
}

impl MatchingSizeTriple {
    pub const BASE: MatchingSizeTriple = MatchingSizeTriple { a: 0, b: 1, c: 2 };

    /// One step of the max-recursion. Also reports whether every argument of
    /// each `max` coincided.
    pub fn step(self) -> (MatchingSizeTriple, bool) {
        let MatchingSizeTriple { a, b, c } = self;
        let b_args = [2 * a + b + c, a + 3 * b];
        let c_args = [2 * a + 2 * c, 4 * b, a + 2 * b + c];
        let next = MatchingSizeTriple {
            a: 2 * a + 2 * b,
            b: *b_args.iter().max().unwrap(),
            c: *c_args.iter().max().unwrap(),
        };
        let tied = b_args.iter().all(|&x| x == next.b) && c_args.iter().all(|&x| x == next.c);
        (next, tied)
    }

    /// `((4^g − 4)/6, (4^g + 2)/6, (4^g + 8)/6)`.
    pub fn closed_form(g: u32) -> Result<MatchingSizeTriple> {
        check_generation(g)?;
        if g > 62 {
            return Err(Error::Domain(format!("generation {g} overflows the size triple")));
        }
        let p = 1u128 << (2 * g);
        Ok(MatchingSizeTriple {
            a: (p - 4) / 6,
            b: (p + 2) / 6,
            c: (p + 8) / 6,
        })
    }
}

/// Iterates the max-recursion from `(0, 1, 2)` and checks it against the
/// closed forms and the tie property.
pub fn fractal_matching_sizes(g: u32) -> Result<MatchingSizeTriple> {
    let closed = MatchingSizeTriple::closed_form(g)?;
    let mut t = MatchingSizeTriple::BASE;
    for step in 1..g {
        let (next, tied) = t.step();
        if !tied {
            return Err(Error::Inconsistent(format!(
                "max arguments differ at step {step} -> {}",
                step + 1
            )));
        }
        t = next;
    }
    if t != closed {
        return Err(Error::Inconsistent(format!(
            "recursion gives {t:?}, closed form gives {closed:?}"
        )));
    }
    Ok(t)
}

/// `F_g` matching number `(4^g + 8)/6`.
pub fn fractal_matching_number(g: u32) -> Result<BigInt> {
    check_generation(g)?;
    Ok((pow4(g) + 8) / 6)
}

/// Numbers of maximum matchings of `F_g ∖ {v1, v2}` (`phi`), `F_g ∖ {v1}`
/// (`varphi`) and `F_g` (`theta`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingCountTriple {
    pub phi: BigInt,
    pub varphi: BigInt,
    pub theta: BigInt,
}

impl MatchingCountTriple {
    pub fn base() -> Self {
        MatchingCountTriple {
            phi: big(1),
            varphi: big(2),
            theta: big(2),
        }
    }

    pub fn step(&self) -> Self {
        let (p, v, t) = (&self.phi, &self.varphi, &self.theta);
        let p2 = p * p;
        let v2 = v * v;
        MatchingCountTriple {
            phi: &p2 * &v2 * 4,
            varphi: &p2 * v * t * 4 + p * &v2 * v * 4,
            theta: &p2 * t * t * 2 + &v2 * &v2 * 2 + p * &v2 * t * 12,
        }
    }
}

pub fn fractal_matching_counts(g: u32) -> Result<MatchingCountTriple> {
    check_generation(g)?;
    let mut t = MatchingCountTriple::base();
    for _ in 1..g {
        t = t.step();
    }
    Ok(t)
}

/// `(4^g + 6g − 1)/9`, the base-2 logarithm of the number of perfect
/// matchings of `H_g`.
pub fn nonfractal_pm_exponent(g: u32) -> Result<BigInt> {
    check_generation(g)?;
    let num: BigInt = pow4(g) + big(6 * g as u64) - 1;
    let (q, r) = num.div_rem(&big(9));
    if !r.is_zero() {
        return Err(Error::Inconsistent(format!(
            "exponent numerator {num} is not divisible by 9"
        )));
    }
    Ok(q)
}

fn two_to(exponent: &BigInt) -> Result<BigInt> {
    let e = exponent
        .to_usize()
        .ok_or_else(|| Error::Domain(format!("exponent {exponent} too large to materialize")))?;
    Ok(BigInt::one() << e)
}

pub fn nonfractal_pm_count(g: u32) -> Result<BigInt> {
    two_to(&nonfractal_pm_exponent(g)?)
}

/// `2·3^(g−2) + 1` for `g ≥ 2`.
pub fn sierpinski_pm_exponent(g: u32) -> Result<BigInt> {
    check_generation(g)?;
    if g == 1 {
        return Err(Error::Domain(
            "the S++ count formula starts at g = 2; K4 has 3 perfect matchings by enumeration".into(),
        ));
    }
    Ok(big(3).pow(g - 2) * 2 + 1)
}

pub fn sierpinski_pm_count(g: u32) -> Result<BigInt> {
    two_to(&sierpinski_pm_exponent(g)?)
}

/// `2^(E − N + 1)`: perfect matchings of `L(G)` for connected `G` with
/// maximum degree at most 3 and an even number of edges.
pub fn line_graph_pm_count(n: usize, e: usize) -> Result<BigInt> {
    if e + 1 < n {
        return Err(Error::Domain(format!("E - N + 1 is negative for N={n}, E={e}")));
    }
    if e % 2 == 1 {
        return Err(Error::Domain(format!("line graph of a graph with {e} edges has odd order")));
    }
    Ok(BigInt::one() << (e + 1 - n))
}

/// Entropy of perfect matchings `z = ln ψ / (N/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub ln_psi: f64,
    pub z: f64,
    /// `log2 ψ` when `ψ` is a power of two.
    pub log2_exact: Option<u64>,
}

/// Natural logarithm of a positive big integer, accurate to double precision.
pub fn ln_big(x: &BigInt) -> Result<f64> {
    if !x.is_positive() {
        return Err(Error::ZeroCount);
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift as usize).to_u64().expect("at most 64 bits remain");
    Ok((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
}

pub fn entropy_estimate(count: &BigInt, n: usize) -> Result<EntropyEstimate> {
    if !count.is_positive() {
        return Err(Error::ZeroCount);
    }
    if n == 0 || n % 2 == 1 {
        return Err(Error::Domain(format!("entropy needs a positive even order, got {n}")));
    }
    let half = (n / 2) as f64;
    let tz = count.trailing_zeros().unwrap_or(0);
    let log2_exact = (count.bits() == tz + 1).then_some(tz);
    let ln_psi = match log2_exact {
        Some(k) => k as f64 * std::f64::consts::LN_2,
        None => ln_big(count)?,
    };
    Ok(EntropyEstimate {
        ln_psi,
        z: ln_psi / half,
        log2_exact,
    })
}

/// `ln 2 / 3`, the common entropy limit of `H_g` and `S++_g`.
pub const ENTROPY_LIMIT: f64 = std::f64::consts::LN_2 / 3.0;

/// `z(H_g)` from the exponent and order formulas alone.
pub fn nonfractal_entropy(g: u32) -> Result<EntropyEstimate> {
    let exponent = nonfractal_pm_exponent(g)?;
    let n = counts(Family::Nonfractal, g)?.n;
    entropy_from_exponent(&exponent, &n)
}

/// `z(S++_g)` from the exponent and order formulas alone.
pub fn sierpinski_entropy(g: u32) -> Result<EntropyEstimate> {
    let exponent = sierpinski_pm_exponent(g)?;
    let n = counts(Family::Sierpinski, g)?.n;
    entropy_from_exponent(&exponent, &n)
}

fn entropy_from_exponent(exponent: &BigInt, n: &BigInt) -> Result<EntropyEstimate> {
    let ratio = BigRational::new(exponent * 2, n.clone());
    let r = ratio_to_f64(&ratio);
    Ok(EntropyEstimate {
        ln_psi: exponent.to_f64().unwrap_or(f64::INFINITY) * std::f64::consts::LN_2,
        z: r * std::f64::consts::LN_2,
        log2_exact: exponent.to_u64(),
    })
}

/// `z(H_g) − ln2/3 = ln2 · (2g − 1)/(4^g + 2)`, as the exact rational
/// coefficient of `ln 2`.
pub fn nonfractal_entropy_gap(g: u32) -> Result<BigRational> {
    check_generation(g)?;
    Ok(BigRational::new(big(2 * g as u64 - 1), pow4(g) + 2))
}

/// Converts a rational to the nearest double without overflowing on huge
/// numerators and denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

/// Exact average distance of `F_g` or `H_g`.
pub fn avg_distance_closed(family: Family, g: u32) -> Result<BigRational> {
    check_generation(g)?;
    let p2 = BigInt::one() << g as usize;
    let p4 = pow4(g);
    let p8 = &p2 * &p4;
    let p16 = &p4 * &p4;
    let gg = big(g as u64);
    match family {
        Family::Fractal => {
            let num = &p2 * &p16 * 22 + &p8 * (&gg * 21 + 42) + &p4 * 27 + &p2 * 98;
            let den = &p16 * 42 + &p4 * 105 + 42;
            Ok(BigRational::new(num, den))
        }
        Family::Nonfractal => {
            let num = (&p4 * 16 + &p16 * 3 + &gg * &p16 * 6 + 8) * 2;
            let den = (&p16 * 4 + &p4 * 10 + 4) * 3;
            Ok(BigRational::new(num, den))
        }
        Family::Sierpinski => Err(Error::Domain("no average-distance formula for S++".into())),
    }
}

/// `(g − 1)² / (−3·2^g + g² + 2g + 3)` for `g ≥ 2`.
pub fn pearson_closed_fractal(g: u32) -> Result<BigRational> {
    check_generation(g)?;
    if g == 1 {
        return Err(Error::Domain("Pearson coefficient of F_1 is 0/0 (C4 is regular)".into()));
    }
    let gg = big(g as u64);
    let num = (&gg - 1) * (&gg - 1);
    let den = -(BigInt::one() << g as usize) * 3 + &gg * &gg + &gg * 2 + 3;
    Ok(BigRational::new(num, den))
}

/// Pearson coefficient of `H_g`: `0` for `g ≥ 2`, undefined at `g = 1`.
pub fn pearson_closed_nonfractal(g: u32) -> Result<BigRational> {
    check_generation(g)?;
    if g == 1 {
        return Err(Error::Domain("Pearson coefficient of H_1 is 0/0 (C4 is regular)".into()));
    }
    Ok(BigRational::zero())
}

/// Average neighbour degree for each realized degree `2, 4, ..., 2^g`.
pub fn knn_closed(family: Family, g: u32) -> Result<BTreeMap<u64, BigRational>> {
    check_generation(g)?;
    let degrees = (1..=g).map(|k| 1u64 << k);
    let value = |d: u64| -> u64 {
        match family {
            Family::Fractal if d == 2 => 2 * g as u64,
            Family::Fractal => 2,
            _ => g as u64 + 1,
        }
    };
    if family == Family::Sierpinski {
        return Err(Error::Domain("no k_nn formula for S++".into()));
    }
    Ok(degrees.map(|d| (d, BigRational::from_integer(big(value(d))))).collect())
}
