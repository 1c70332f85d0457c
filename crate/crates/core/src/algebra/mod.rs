//! Exact arithmetic for dilatations: integer/rational polynomials, real
//! number fields, and Perron-Frobenius eigenpairs of integer matrices.

mod field;
mod interval;
mod matrix;
mod poly;

pub use field::{decimal_string, AlgebraicNumber, NumberField};
pub use interval::{format_rational, parse_rational, rational_to_f64, Interval};
pub use matrix::{
    char_poly_rational, largest_real_root_factor, pf_eigenpair, IntegerMatrix, PfEigenpair,
};
pub use poly::{
    isolate_real_roots, refine_root, root_bound, IntPolynomial, RatPolynomial, SturmChain,
};

pub(crate) use matrix::null_vector;

use std::cmp::Ordering;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands belong to different number fields")]
    FieldMismatch,
    #[error("matrix is not primitive: no power is strictly positive")]
    NotPrimitive,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix has a negative entry")]
    NegativeEntry,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field descriptor: {0}")]
    BadField(String),
}

/// Irreducible factors over Q of a nonzero integer polynomial, each made
/// primitive with positive leading coefficient, with multiplicities.
/// Sorted by degree and then coefficients so the output is deterministic.
pub fn factor(p: &IntPolynomial) -> Vec<(IntPolynomial, usize)> {
    use algebraics::polynomial::Polynomial;
    let input: Polynomial<BigInt> = p.coeffs().to_vec().into();
    let mut out: Vec<(IntPolynomial, usize)> = input
        .factor()
        .polynomial_factors
        .into_iter()
        .map(|f| {
            (
                IntPolynomial::new(f.polynomial.iter().collect()).primitive(),
                f.power,
            )
        })
        .filter(|(f, _)| f.degree() > 0)
        .collect();
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    out
}

/// Compares two real algebraic numbers that may live in different fields.
pub fn compare_real(a: &AlgebraicNumber, b: &AlgebraicNumber) -> Ordering {
    if let Ok(o) = a.compare(b) {
        return o;
    }
    let (pa, pb) = (a.minimal_polynomial(), b.minimal_polynomial());
    let same_poly = pa == pb;
    let sturm = SturmChain::new(&pa.to_rational());
    let mut bits = 32;
    loop {
        let (ia, ib) = (a.approx(bits), b.approx(bits));
        if ia.hi < ib.lo {
            return Ordering::Less;
        }
        if ib.hi < ia.lo {
            return Ordering::Greater;
        }
        if same_poly {
            let lo = if ia.lo < ib.lo { &ia.lo } else { &ib.lo };
            let hi = if ia.hi > ib.hi { &ia.hi } else { &ib.hi };
            let pad = hi - lo;
            if sturm.count_roots(&(lo - &pad), &(hi + &pad)) == 1 {
                return Ordering::Equal;
            }
        }
        bits *= 2;
    }
}
