//! Dense univariate polynomials over the integers and the rationals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::Interval;

/// Integer polynomial, coefficients lowest degree first.
///
/// The coefficient vector is kept trimmed: the last entry is nonzero unless
/// the polynomial is zero, in which case the vector is empty.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPolynomial::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn to_rational(&self) -> RatPolynomial {
        RatPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    /// Exact division over the integers, `None` if `divisor` does not divide.
    pub fn exact_div(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        let (q, r) = self.to_rational().div_rem(&divisor.to_rational());
        if !r.is_zero() {
            return None;
        }
        q.to_integer()
    }

    /// Whitespace-separated coefficients, lowest degree first (`"1 -2 0 -2 1"`).
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(
            f,
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone())),
        )
    }
}

/// Rational polynomial, coefficients lowest degree first, trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct RatPolynomial {
    coeffs: Vec<BigRational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RatPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &RatPolynomial) -> RatPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, k: &BigRational) -> RatPolynomial {
        RatPolynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &RatPolynomial) -> RatPolynomial {
        if self.is_zero() || other.is_zero() {
            return RatPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPolynomial::new(out)
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RatPolynomial) -> (RatPolynomial, RatPolynomial) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = divisor.degree();
        let lead = divisor.leading();
        if rem.len() < divisor.coeffs.len() {
            return (RatPolynomial::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (RatPolynomial::new(quot), RatPolynomial::new(rem))
    }

    pub fn rem(&self, divisor: &RatPolynomial) -> RatPolynomial {
        self.div_rem(divisor).1
    }

    pub fn derivative(&self) -> RatPolynomial {
        RatPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> RatPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        RatPolynomial::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn gcd(&self, other: &RatPolynomial) -> RatPolynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &RatPolynomial) -> (RatPolynomial, RatPolynomial, RatPolynomial) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (
            RatPolynomial::constant(BigRational::one()),
            RatPolynomial::zero(),
        );
        let (mut t0, mut t1) = (
            RatPolynomial::zero(),
            RatPolynomial::constant(BigRational::one()),
        );
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let l = r0.leading().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::point(BigRational::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_scalar(c);
        }
        acc
    }

    /// Scales to a primitive integer polynomial with positive leading coefficient.
    pub fn to_primitive_integer(&self) -> IntPolynomial {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
                .collect(),
        )
        .primitive()
    }

    pub fn to_integer(&self) -> Option<IntPolynomial> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPolynomial::new(
                self.coeffs.iter().map(|c| c.to_integer()).collect(),
            ))
        } else {
            None
        }
    }

    pub fn pow_mod(&self, exp: u32, modulus: &RatPolynomial) -> RatPolynomial {
        let mut base = self.rem(modulus);
        let mut acc = RatPolynomial::constant(BigRational::one()).rem(modulus);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, self.coeffs.iter().cloned())
    }
}

fn write_poly(
    f: &mut fmt::Formatter<'_>,
    coeffs: impl DoubleEndedIterator<Item = BigRational> + ExactSizeIterator,
) -> fmt::Result {
    let n = coeffs.len();
    if n == 0 {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.enumerate().collect::<Vec<_>>().into_iter().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let show_coeff = !a.is_one() || i == 0;
        if show_coeff {
            write!(f, "{}", a)?;
        }
        match i {
            0 => {}
            1 => write!(f, "x")?,
            _ => write!(f, "x^{}", i)?,
        }
    }
    Ok(())
}

/// Sturm chain of a square-free polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<RatPolynomial>,
}

impl SturmChain {
    pub fn new(p: &RatPolynomial) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].rem(&chain[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last: Option<Ordering> = None;
        for p in &self.chain {
            let v = p.eval(x);
            let s = v.cmp(&BigRational::zero());
            if s == Ordering::Equal {
                continue;
            }
            if let Some(l) = last {
                if l != s {
                    count += 1;
                }
            }
            last = Some(s);
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

/// Cauchy bound: every complex root has absolute value below the result.
pub fn root_bound(p: &RatPolynomial) -> BigRational {
    let l = p.leading().abs();
    let m = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .map(|c| c.abs() / &l)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    BigRational::one() + m.ceil()
}

/// Isolates the real roots of a square-free polynomial.
///
/// Each returned interval `(lo, hi)` has `p(lo)` and `p(hi)` nonzero of opposite
/// sign and contains exactly one root. Intervals are sorted increasingly.
pub fn isolate_real_roots(p: &RatPolynomial) -> Vec<(BigRational, BigRational)> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let sturm = SturmChain::new(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count_roots(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && !p.eval(&hi).is_zero() && !p.eval(&lo).is_zero() {
            out.push((lo, hi));
            continue;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let mut mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_zero() {
            // shift the cut off the rational root
            let q = (&hi - &lo) / BigRational::from_integer(BigInt::from(3));
            mid = &lo + q;
        }
        if n == 1 && p.eval(&hi).is_zero() {
            // root exactly at hi: isolate it with a small symmetric window
            let root = hi.clone();
            let mut w = (&hi - &lo) / &two;
            while sturm.count_roots(&(&root - &w), &(&root + &w)) > 1
                || p.eval(&(&root + &w)).is_zero()
                || p.eval(&(&root - &w)).is_zero()
            {
                w /= &two;
            }
            out.push((&root - &w, &root + &w));
            continue;
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Bisects an isolating interval of `p` until its width is below `width`.
pub fn refine_root(
    p: &RatPolynomial,
    mut lo: BigRational,
    mut hi: BigRational,
    width: &BigRational,
) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    let lo_sign = p.eval(&lo).is_positive();
    while &(&hi - &lo) >= width {
        let mid = (&lo + &hi) / &two;
        let v = p.eval(&mid);
        if v.is_zero() {
            return (mid.clone(), mid);
        }
        if v.is_positive() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn division_and_gcd() {
        let a = IntPolynomial::from_i64s(&[-1, 0, 1]).to_rational(); // x^2 - 1
        let b = IntPolynomial::from_i64s(&[1, 1]).to_rational(); // x + 1
        let (quo, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(quo, IntPolynomial::from_i64s(&[-1, 1]).to_rational());
        let g = a.gcd(&IntPolynomial::from_i64s(&[1, 2, 1]).to_rational());
        assert_eq!(g, b);
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = IntPolynomial::from_i64s(&[1, -3, 1]).to_rational();
        let b = IntPolynomial::from_i64s(&[2, 5]).to_rational();
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g.degree(), 0);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn sturm_counts_golden_roots() {
        let p = IntPolynomial::from_i64s(&[1, -3, 1]).to_rational();
        let s = SturmChain::new(&p);
        assert_eq!(s.count_roots(&q(0, 1), &q(1, 1)), 1);
        assert_eq!(s.count_roots(&q(2, 1), &q(3, 1)), 1);
        assert_eq!(s.count_roots(&q(-5, 1), &q(5, 1)), 2);
    }

    #[test]
    fn isolation_handles_rational_roots() {
        // (x - 1)(x + 2)(x^2 - 2)
        let p = IntPolynomial::from_i64s(&[-1, 1])
            .mul(&IntPolynomial::from_i64s(&[2, 1]))
            .mul(&IntPolynomial::from_i64s(&[-2, 0, 1]))
            .to_rational();
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 4);
        for (lo, hi) in &roots {
            assert!(lo < hi);
            assert!((p.eval(lo) * p.eval(hi)).is_negative());
        }
    }

    #[test]
    fn display_reads_naturally() {
        assert_eq!(
            IntPolynomial::from_i64s(&[1, -2, 0, -2, 1]).to_string(),
            "x^4 - 2x^3 - 2x + 1"
        );
        assert_eq!(
            IntPolynomial::from_i64s(&[1, -2, 0, -2, 1]).to_coeff_string(),
            "1 -2 0 -2 1"
        );
    }
}
