//! Quantitative checks: `2m + 1 ≤ λ^e`, unipotent fold factors, the branch
//! count bound, membership in `Ψ_P` and the tetrahedra bound.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    compare_real, format_rational, AlgebraicNumber, IntPolynomial, Interval, NumberField,
};
use crate::moves::{PeriodicityCertificate, SplittingSequence};
use crate::track::branch_bound;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Number of branches.
    pub e: usize,
    /// Splits in one period.
    pub m: usize,
    pub lambda_minpoly: String,
    pub lambda_decimal: String,
    /// Enclosure of `λ^e - (2m + 1)`.
    pub inequality_margin: [String; 2],
    pub fold_entry_sums: Vec<String>,
    pub genus: i64,
    pub punctures: i64,
    pub branch_bound: i64,
    /// `2g - 2 + 2n/3`.
    pub psi_exponent: String,
}

/// Checks the inequalities of one certified run on a surface of genus `g`
/// with `n` punctures.
pub fn verify_inequality(
    seq: &SplittingSequence,
    cert: &PeriodicityCertificate,
    g: i64,
    n: i64,
) -> Result<BoundReport, BoundsError> {
    let e = seq.states[cert.n].0.num_branches();
    let m = cert.total_splits(seq);
    if m == 0 {
        return Err(BoundsError::BadParameters("empty period".into()));
    }
    let lambda = &cert.dilatation;
    let power = lambda.pow(e as u32);
    let target = lambda.field().from_int(2 * m as i64 + 1);
    let diff = power
        .checked_sub(&target)
        .map_err(|x| BoundsError::BadParameters(x.to_string()))?;
    if diff.signum() == Ordering::Less {
        return Err(BoundsError::BoundViolated(format!(
            "2m+1 = {} exceeds λ^{}",
            2 * m + 1,
            e
        )));
    }
    let margin = diff.approx(64);
    let mut sums = Vec::with_capacity(cert.fold_factors.len());
    for f in &cert.fold_factors {
        let s = f.entry_sum();
        if s != BigInt::from(e + 2) {
            return Err(BoundsError::BoundViolated(format!(
                "fold factor has entry sum {}, expected {}",
                s,
                e + 2
            )));
        }
        sums.push(s.to_string());
    }
    let bound = branch_bound(g, n)
        .map_err(|x| BoundsError::BadParameters(x.to_string()))?
        .branches;
    if e as i64 > bound {
        return Err(BoundsError::BoundViolated(format!(
            "{} branches exceed 18g-18+6n = {}",
            e, bound
        )));
    }
    Ok(BoundReport {
        e,
        m,
        lambda_minpoly: lambda.minimal_polynomial().to_coeff_string(),
        lambda_decimal: lambda.to_decimal(12),
        inequality_margin: [format_rational(&margin.lo), format_rational(&margin.hi)],
        fold_entry_sums: sums,
        genus: g,
        punctures: n,
        branch_bound: bound,
        psi_exponent: format_rational(&psi_exponent(g, n)),
    })
}

pub fn psi_exponent(g: i64, n: i64) -> BigRational {
    BigRational::new(BigInt::from(6 * g - 6 + 2 * n), BigInt::from(3))
}

/// Whether `λ ≤ P^(1/(2g-2+2n/3))`, decided as `λ^(6g-6+2n) ≤ P³`.
pub fn psi_membership(
    lambda: &AlgebraicNumber,
    g: i64,
    n: i64,
    p: &AlgebraicNumber,
) -> Result<bool, BoundsError> {
    let k = 6 * g - 6 + 2 * n;
    if k <= 0 || g < 0 || n < 0 {
        return Err(BoundsError::BadParameters(format!(
            "2g-2+2n/3 must be positive for g={}, n={}",
            g, n
        )));
    }
    if compare_real(p, &p.field().from_int(1)) != Ordering::Greater {
        return Err(BoundsError::BadParameters("P must exceed 1".into()));
    }
    Ok(compare_real(&lambda.pow(k as u32), &p.pow(3)) != Ordering::Greater)
}

/// Floor of an algebraic number, refining its enclosure until it is decided.
pub fn floor(x: &AlgebraicNumber) -> BigInt {
    if let Some(q) = x.as_rational() {
        return q.floor().to_integer();
    }
    let mut bits = 32;
    loop {
        let Interval { lo, hi } = x.approx(bits);
        let (a, b) = (lo.floor().to_integer(), hi.floor().to_integer());
        // irrational values never sit on an integer
        if a == b {
            return a;
        }
        bits *= 2;
    }
}

/// `⌊(P⁹ - 1) / 2⌋`.
pub fn tetrahedra_bound(p: &AlgebraicNumber) -> BigInt {
    let k = p.field();
    let x = p
        .pow(9)
        .checked_sub(&k.from_int(1))
        .expect("same field")
        .scale(&BigRational::new(1.into(), 2.into()));
    floor(&x)
}

/// `2 + √3`, the largest root of `x² - 4x + 1`.
pub fn two_plus_sqrt3() -> AlgebraicNumber {
    field_root(&[1, -4, 1], 3, 4)
}

/// `(2 + √3)² = 7 + 4√3`, the largest root of `x² - 14x + 1`.
pub fn two_plus_sqrt3_squared() -> AlgebraicNumber {
    field_root(&[1, -14, 1], 13, 14)
}

fn field_root(coeffs: &[i64], lo: i64, hi: i64) -> AlgebraicNumber {
    let k: Arc<NumberField> = NumberField::new(
        IntPolynomial::from_i64s(coeffs),
        BigRational::from_integer(lo.into()),
        BigRational::from_integer(hi.into()),
    )
    .expect("isolating interval");
    k.generator()
}

/// Whether `δ^(g-1) ≤ 2 + √3`.
pub fn delta_hypothesis(delta: &AlgebraicNumber, g: i64) -> Result<bool, BoundsError> {
    if g < 2 {
        return Err(BoundsError::BadParameters(format!("genus {} < 2", g)));
    }
    Ok(compare_real(&delta.pow((g - 1) as u32), &two_plus_sqrt3()) != Ordering::Greater)
}
