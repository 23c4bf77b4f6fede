//! Real-rootedness of the hypergeometric probability generating function,
//! decided exactly with integer Sturm sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::HypergeomParams;
use crate::error::{Error, Result};

/// Largest support for which the PGF check runs.
pub const MAX_PGF_SUPPORT: u64 = 64;

/// Whether every root of `Σ_x P(X = x) z^x` is real and strictly negative.
///
/// Coefficients are the integers `C(K, x) C(N−K, n−x)` (the common
/// denominator does not move roots). The forced factor `z^lo`, where `lo` is
/// the support minimum, is divided out first. Returns `Ok(None)` when the
/// question does not apply (`K = 0`, `K = N` or `n = 0`: the PGF is a monomial).
pub fn pgf_real_rooted(params: &HypergeomParams) -> Result<Option<bool>> {
    let (big_n, k, n) = (params.population(), params.successes(), params.draws());
    if k == 0 || k == big_n || n == 0 {
        return Ok(None);
    }
    let len = params.support_len();
    if len > MAX_PGF_SUPPORT {
        return Err(Error::Capacity {
            what: "PGF degree",
            size: len.into(),
            limit: MAX_PGF_SUPPORT.into(),
        });
    }
    let (lo, hi) = params.support();
    let poly: Vec<BigInt> = (lo..=hi)
        .map(|x| binomial(k, x) * binomial(big_n - k, n - x))
        .collect();
    let degree = poly.len() - 1;
    if degree == 0 {
        return Ok(Some(true));
    }
    let seq = sturm_sequence(poly);
    let gcd_degree = seq.last().map_or(0, |p| p.len() - 1);
    let distinct = degree - gcd_degree;
    let at_neg_inf = sign_changes(seq.iter().map(|p| sign_at_neg_infinity(p)));
    let at_zero = sign_changes(seq.iter().map(|p| p[0].signum()));
    let negative_roots = at_neg_inf.saturating_sub(at_zero);
    Ok(Some(negative_roots == distinct))
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

// Polynomials are coefficient vectors, lowest degree first, no trailing zeros.

fn trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    if d.is_empty() {
        d.push(BigInt::zero());
    }
    trim(&mut d);
    d
}

fn make_primitive(p: &mut [BigInt]) {
    let g = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in p.iter_mut() {
            *c /= &g;
        }
    }
}

/// A positive multiple of `a mod b` (pseudo-remainder with sign tracked).
fn positive_scaled_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_b = b[db].clone();
    let mut steps = 0u32;
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lead_r = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lead_b;
        }
        for (i, cb) in b.iter().enumerate() {
            r[i + shift] -= &lead_r * cb;
        }
        r.pop();
        trim(&mut r);
        steps += 1;
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
    }
    // r = lead_b^steps · a − q b, so r has the sign of (a mod b) times sign(lead_b)^steps.
    if lead_b.is_negative() && steps % 2 == 1 {
        for c in r.iter_mut() {
            *c = -c.clone();
        }
    }
    r
}

fn sturm_sequence(p: Vec<BigInt>) -> Vec<Vec<BigInt>> {
    let mut p0 = p;
    make_primitive(&mut p0);
    let mut p1 = derivative(&p0);
    make_primitive(&mut p1);
    let mut seq = vec![p0, p1];
    loop {
        let len = seq.len();
        let last = &seq[len - 1];
        if last.len() == 1 {
            break;
        }
        let mut r = positive_scaled_remainder(&seq[len - 2], last);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        for c in r.iter_mut() {
            *c = -c.clone();
        }
        make_primitive(&mut r);
        seq.push(r);
    }
    seq
}

fn sign_at_neg_infinity(p: &[BigInt]) -> BigInt {
    let lead = p[p.len() - 1].signum();
    if (p.len() - 1) % 2 == 1 {
        -lead
    } else {
        lead
    }
}

fn sign_changes(signs: impl Iterator<Item = BigInt>) -> usize {
    let mut prev: Option<bool> = None;
    let mut count = 0;
    for s in signs {
        if s.is_zero() {
            continue;
        }
        let pos = s.is_positive();
        if prev.is_some_and(|p| p != pos) {
            count += 1;
        }
        prev = Some(pos);
    }
    count
}
