//! Exact arithmetic in a real number field `Q(λ)`.
//!
//! A [`NumberField`] pins down one real root λ of an irreducible integer
//! polynomial by an isolating rational interval. Elements are rational
//! polynomials in λ reduced modulo the minimal polynomial, so equality is
//! structural. Order is decided by refining λ's interval until the interval
//! image of the difference excludes zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{format_rational, Interval};
use super::poly::{refine_root, IntPolynomial, RatPolynomial, SturmChain};
use super::{factor, AlgebraError};

/// Minimal polynomial plus an isolating interval selecting a real root.
pub struct NumberField {
    minpoly: IntPolynomial,
    minpoly_q: RatPolynomial,
    isolating: Interval,
    // narrowest interval computed so far; purely a cache
    refined: Mutex<Interval>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({} in {})", self.minpoly, self.isolating)
    }
}

impl NumberField {
    /// Validates irreducibility and that `(lo, hi)` isolates exactly one root.
    pub fn new(
        minpoly: IntPolynomial,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<Arc<Self>, AlgebraError> {
        let minpoly = minpoly.primitive();
        if minpoly.degree() == 0 {
            return Err(AlgebraError::BadField(
                "minimal polynomial must have degree >= 1".into(),
            ));
        }
        let factors = factor(&minpoly);
        if factors.len() != 1 || factors[0].1 != 1 {
            return Err(AlgebraError::BadField(format!(
                "{} is not irreducible over Q",
                minpoly
            )));
        }
        let minpoly_q = minpoly.to_rational();
        if lo >= hi {
            return Err(AlgebraError::BadField(
                "isolating interval must have lo < hi".into(),
            ));
        }
        let (plo, phi) = (minpoly_q.eval(&lo), minpoly_q.eval(&hi));
        if plo.is_zero() || phi.is_zero() || plo.is_positive() == phi.is_positive() {
            return Err(AlgebraError::BadField(format!(
                "interval [{}, {}] does not bracket a sign change of {}",
                format_rational(&lo),
                format_rational(&hi),
                minpoly
            )));
        }
        if SturmChain::new(&minpoly_q).count_roots(&lo, &hi) != 1 {
            return Err(AlgebraError::BadField(
                "interval contains more than one root".into(),
            ));
        }
        let isolating = Interval::new(lo, hi);
        Ok(Arc::new(NumberField {
            minpoly,
            minpoly_q,
            refined: Mutex::new(isolating.clone()),
            isolating,
        }))
    }

    /// The field `Q` itself, presented as `Q(1)`.
    pub fn rationals() -> Arc<Self> {
        NumberField::new(
            IntPolynomial::from_i64s(&[-1, 1]),
            BigRational::zero(),
            BigRational::from_integer(BigInt::from(2)),
        )
        .expect("x - 1 isolates 1 in (0, 2)")
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    pub fn isolating_interval(&self) -> &Interval {
        &self.isolating
    }

    /// Same minimal polynomial and same selected root.
    pub fn same_as(&self, other: &NumberField) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.minpoly != other.minpoly {
            return false;
        }
        let lo = if self.isolating.lo > other.isolating.lo {
            &self.isolating.lo
        } else {
            &other.isolating.lo
        };
        let hi = if self.isolating.hi < other.isolating.hi {
            &self.isolating.hi
        } else {
            &other.isolating.hi
        };
        lo < hi && SturmChain::new(&self.minpoly_q).count_roots(lo, hi) == 1
    }

    /// Interval around λ of width below `2^-bits`.
    pub fn root_interval(&self, bits: u32) -> Interval {
        let mut cached = self.refined.lock().expect("field cache poisoned");
        if cached.narrower_than_bits(bits) {
            return cached.clone();
        }
        let width = BigRational::new(BigInt::one(), BigInt::from(2u8).pow(bits));
        let (lo, hi) = refine_root(
            &self.minpoly_q,
            cached.lo.clone(),
            cached.hi.clone(),
            &width,
        );
        *cached = Interval::new(lo, hi);
        cached.clone()
    }

    fn reduce(&self, p: &RatPolynomial) -> RatPolynomial {
        if p.degree() < self.degree() {
            p.clone()
        } else {
            p.rem(&self.minpoly_q)
        }
    }

    pub fn generator(self: &Arc<Self>) -> AlgebraicNumber {
        AlgebraicNumber::from_poly(self, RatPolynomial::x())
    }

    pub fn from_rational(self: &Arc<Self>, q: BigRational) -> AlgebraicNumber {
        AlgebraicNumber::from_poly(self, RatPolynomial::constant(q))
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> AlgebraicNumber {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Serialized descriptor: `<coeffs> <lo> <hi>`.
    pub fn descriptor(&self) -> String {
        format!(
            "{} {} {}",
            self.minpoly.to_coeff_string(),
            format_rational(&self.isolating.lo),
            format_rational(&self.isolating.hi)
        )
    }
}

/// An element of a [`NumberField`].
#[derive(Clone)]
pub struct AlgebraicNumber {
    field: Arc<NumberField>,
    repr: RatPolynomial,
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraicNumber({})", self)
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.repr.to_string().replace('x', "λ"))
    }
}

impl AlgebraicNumber {
    pub fn from_poly(field: &Arc<NumberField>, p: RatPolynomial) -> Self {
        AlgebraicNumber {
            repr: field.reduce(&p),
            field: field.clone(),
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    /// Canonical representation: reduced polynomial in λ.
    pub fn repr(&self) -> &RatPolynomial {
        &self.repr
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.repr.degree() == 0
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.repr.coeff(0))
        } else {
            None
        }
    }

    fn check(&self, other: &AlgebraicNumber) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.same_as(&other.field) {
            Ok(())
        } else {
            Err(AlgebraError::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &AlgebraicNumber) -> Result<AlgebraicNumber, AlgebraError> {
        self.check(other)?;
        Ok(AlgebraicNumber {
            field: self.field.clone(),
            repr: self.repr.add(&other.repr),
        })
    }

    pub fn checked_sub(&self, other: &AlgebraicNumber) -> Result<AlgebraicNumber, AlgebraError> {
        self.check(other)?;
        Ok(AlgebraicNumber {
            field: self.field.clone(),
            repr: self.repr.sub(&other.repr),
        })
    }

    pub fn checked_mul(&self, other: &AlgebraicNumber) -> Result<AlgebraicNumber, AlgebraError> {
        self.check(other)?;
        let repr = self.field.reduce(&self.repr.mul(&other.repr));
        Ok(AlgebraicNumber {
            field: self.field.clone(),
            repr,
        })
    }

    pub fn inverse(&self) -> Result<AlgebraicNumber, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let (g, s, _) = self.repr.ext_gcd(&self.field.minpoly_q);
        // minpoly irreducible and repr nonzero of smaller degree: gcd is 1
        debug_assert_eq!(g.degree(), 0);
        Ok(AlgebraicNumber {
            field: self.field.clone(),
            repr: self.field.reduce(&s),
        })
    }

    pub fn checked_div(&self, other: &AlgebraicNumber) -> Result<AlgebraicNumber, AlgebraError> {
        self.checked_mul(&other.inverse()?)
    }

    pub fn scale(&self, q: &BigRational) -> AlgebraicNumber {
        AlgebraicNumber {
            field: self.field.clone(),
            repr: self.repr.scale(q),
        }
    }

    pub fn pow(&self, exp: u32) -> AlgebraicNumber {
        let repr = self.repr.pow_mod(exp, &self.field.minpoly_q);
        AlgebraicNumber {
            field: self.field.clone(),
            repr,
        }
    }

    /// Interval image of the element for a λ interval of width `2^-bits`.
    fn enclosure(&self, bits: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(q);
        }
        self.repr.eval_interval(&self.field.root_interval(bits))
    }

    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut bits = 32;
        loop {
            let iv = self.enclosure(bits);
            if iv.lo.is_positive() {
                return Ordering::Greater;
            }
            if iv.hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    /// Exact comparison; fails only when the fields differ.
    pub fn compare(&self, other: &AlgebraicNumber) -> Result<Ordering, AlgebraError> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Rational interval of width below `2^-bits` containing the value.
    pub fn approx(&self, bits: u32) -> Interval {
        if let Some(q) = self.as_rational() {
            return Interval::point(q);
        }
        let mut b = bits.max(8) + 8;
        loop {
            let iv = self.enclosure(b);
            if iv.narrower_than_bits(bits) {
                return iv;
            }
            b += b / 2 + 8;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.approx(60).midpoint_f64()
    }

    /// Decimal string with `digits` digits after the point, from a certified enclosure.
    pub fn to_decimal(&self, digits: usize) -> String {
        let bits = (digits as f64 * 3.33).ceil() as u32 + 8;
        let iv = self.approx(bits);
        let mid = (&iv.lo + &iv.hi) / BigRational::from_integer(BigInt::from(2));
        decimal_string(&mid, digits)
    }

    /// Coefficients `c0 c1 ...` of the reduced representation as `p/q` tokens.
    pub fn to_coeff_string(&self) -> String {
        if self.repr.is_zero() {
            return "0".into();
        }
        self.repr
            .coeffs()
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Minimal polynomial of this element over Q.
    pub fn minimal_polynomial(&self) -> IntPolynomial {
        if let Some(q) = self.as_rational() {
            return IntPolynomial::new(vec![-q.numer().clone(), q.denom().clone()]).primitive();
        }
        let d = self.field.degree();
        // multiplication-by-self matrix in the basis 1, λ, ..., λ^(d-1)
        let mut cols = Vec::with_capacity(d);
        let mut basis = RatPolynomial::constant(BigRational::one());
        for _ in 0..d {
            let img = self.field.reduce(&basis.mul(&self.repr));
            cols.push((0..d).map(|i| img.coeff(i)).collect::<Vec<_>>());
            basis = basis.mul(&RatPolynomial::x());
        }
        let rows: Vec<Vec<BigRational>> = (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect();
        let cp = super::matrix::char_poly_rational(&rows).to_primitive_integer();
        for (f, _) in factor(&cp) {
            let fq = f.to_rational();
            let mut acc = AlgebraicNumber {
                field: self.field.clone(),
                repr: RatPolynomial::zero(),
            };
            for c in fq.coeffs().iter().rev() {
                acc = &(&acc * self) + &self.field.from_rational(c.clone());
            }
            if acc.is_zero() {
                return f.primitive();
            }
        }
        unreachable!("an element is a root of its characteristic polynomial")
    }
}

pub fn decimal_string(x: &BigRational, digits: usize) -> String {
    let neg = x.is_negative();
    let scale = BigInt::from(10u8).pow(digits as u32);
    let scaled = (x.abs() * BigRational::from_integer(scale.clone()))
        .round()
        .to_integer();
    let int = &scaled / &scale;
    let frac = &scaled % &scale;
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    s
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.check(other).is_ok() && self.repr == other.repr
    }
}

impl Eq for AlgebraicNumber {}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a, 'b> $trait<&'b AlgebraicNumber> for &'a AlgebraicNumber {
            type Output = AlgebraicNumber;
            /// Panics when the operands live in different fields.
            fn $method(self, rhs: &'b AlgebraicNumber) -> AlgebraicNumber {
                self.$checked(rhs)
                    .expect("arithmetic across different number fields")
            }
        }
        impl $trait<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber {
            field: self.field.clone(),
            repr: self.repr.neg(),
        }
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn golden() -> Arc<NumberField> {
        NumberField::new(
            IntPolynomial::from_i64s(&[1, -3, 1]),
            BigRational::from_integer(2.into()),
            BigRational::from_integer(3.into()),
        )
        .unwrap()
    }

    #[test]
    fn golden_root_exceeds_two() {
        let k = golden();
        let l = k.generator();
        assert_eq!(l.compare(&k.from_int(2)).unwrap(), Ordering::Greater);
        assert_eq!(l.compare(&k.from_int(3)).unwrap(), Ordering::Less);
    }

    #[test]
    fn reduction_gives_zero() {
        let k = golden();
        let l = k.generator();
        let z = &(&(&l * &l) - &(&l * &k.from_int(3))) + &k.from_int(1);
        assert!(z.is_zero());
        assert_eq!(z.compare(&k.from_int(0)).unwrap(), Ordering::Equal);
    }

    #[test]
    fn inverse_of_lambda_is_three_minus_lambda() {
        let k = golden();
        let l = k.generator();
        assert_eq!(l.inverse().unwrap(), &k.from_int(3) - &l);
    }

    #[test]
    fn approx_golden_ratio_square() {
        let k = golden();
        let iv = k.generator().approx(30);
        assert!(iv.narrower_than_bits(30));
        let exact = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((iv.midpoint_f64() - exact).abs() < 1e-9);
    }

    #[test]
    fn rational_approx_is_a_point() {
        let k = golden();
        let x = k.from_rational(BigRational::new(3.into(), 2.into()));
        let iv = x.approx(5);
        assert_eq!(iv.lo, iv.hi);
    }

    #[test]
    fn rejects_reducible_and_bad_intervals() {
        assert!(NumberField::new(IntPolynomial::from_i64s(&[-1, 0, 1]), r(0), r(2)).is_err());
        assert!(NumberField::new(IntPolynomial::from_i64s(&[1, -3, 1]), r(0), r(3)).is_err());
    }

    #[test]
    fn mismatch_is_reported() {
        let k = golden();
        let other = NumberField::new(IntPolynomial::from_i64s(&[-2, 0, 1]), r(1), r(2)).unwrap();
        assert!(matches!(
            k.generator().compare(&other.generator()),
            Err(AlgebraError::FieldMismatch)
        ));
    }

    #[test]
    fn minimal_polynomial_of_elements() {
        let k = golden();
        let l = k.generator();
        assert_eq!(
            l.minimal_polynomial(),
            IntPolynomial::from_i64s(&[1, -3, 1])
        );
        // λ - 1 is the golden ratio φ: x^2 - x - 1
        assert_eq!(
            (&l - &k.from_int(1)).minimal_polynomial(),
            IntPolynomial::from_i64s(&[-1, -1, 1])
        );
        assert_eq!(
            k.from_int(5).minimal_polynomial(),
            IntPolynomial::from_i64s(&[-5, 1])
        );
    }

    #[test]
    fn decimal_rendering() {
        let k = golden();
        assert_eq!(k.generator().to_decimal(10), "2.6180339887");
    }
}
