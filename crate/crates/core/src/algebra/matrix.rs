//! Nonnegative integer matrices, characteristic polynomials and the
//! Perron-Frobenius eigenpair.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::field::{AlgebraicNumber, NumberField};
use super::poly::{isolate_real_roots, IntPolynomial, RatPolynomial};
use super::{factor, AlgebraError};

/// Square matrix with nonnegative integer entries, row-major.
///
/// Acts on weight vectors by `v ↦ M·v`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct IntegerMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self, AlgebraError> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(AlgebraError::NotSquare);
        }
        if entries.iter().any(|e| e.is_negative()) {
            return Err(AlgebraError::NegativeEntry);
        }
        Ok(IntegerMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(AlgebraError::NotSquare);
        }
        Self::new(
            dim,
            rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = IntegerMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        };
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(!v.is_negative());
        self.entries[i * self.dim + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        let e = &mut self.entries[i * self.dim + j];
        *e += v;
        assert!(!e.is_negative());
    }

    pub fn entry_sum(&self) -> BigInt {
        self.entries.iter().sum()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        IntegerMatrix {
            dim: n,
            entries: out,
        }
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Some power `M^k`, `k ≤ (n-1)^2 + 1`, is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.dim;
        let pattern: Vec<bool> = self.entries.iter().map(|e| !e.is_zero()).collect();
        let mut power = pattern.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 0..bound.max(1) {
            if power.iter().all(|&b| b) {
                return true;
            }
            let mut next = vec![false; n * n];
            for i in 0..n {
                for k in 0..n {
                    if power[i * n + k] {
                        for j in 0..n {
                            next[i * n + j] |= pattern[k * n + j];
                        }
                    }
                }
            }
            power = next;
        }
        power.iter().all(|&b| b)
    }

    pub fn char_poly(&self) -> IntPolynomial {
        let rows: Vec<Vec<BigRational>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect();
        char_poly_rational(&rows)
            .to_integer()
            .expect("integer matrices have integer characteristic polynomials")
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rows() {
            let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// `det(xI - A)` by the Faddeev-LeVerrier recurrence.
pub fn char_poly_rational(a: &[Vec<BigRational>]) -> RatPolynomial {
    let n = a.len();
    // coefficients c[k] of x^k; c[n] = 1
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !m[l][j].is_zero() {
                        s += &a[i][l] * &m[l][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &c[n - k + 1];
        }
        m = next;
        // c_{n-k} = -tr(A M_k) / k
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    RatPolynomial::new(c)
}

/// Perron-Frobenius eigenvalue and positive eigenvector (first coordinate 1).
#[derive(Clone, Debug)]
pub struct PfEigenpair {
    pub value: AlgebraicNumber,
    pub vector: Vec<AlgebraicNumber>,
}

impl PfEigenpair {
    pub fn field(&self) -> &Arc<NumberField> {
        self.value.field()
    }
}

/// The irreducible factor of `p` carrying its largest real root, with an
/// isolating interval for that root.
pub fn largest_real_root_factor(
    p: &IntPolynomial,
) -> Option<(IntPolynomial, BigRational, BigRational)> {
    let mut best: Option<(IntPolynomial, BigRational, BigRational)> = None;
    for (f, _) in factor(p) {
        if f.degree() == 0 {
            continue;
        }
        if let Some((lo, hi)) = isolate_real_roots(&f.to_rational()).pop() {
            let better = match &best {
                None => true,
                // isolating intervals of distinct irreducible factors are disjoint after refinement
                Some((bf, blo, bhi)) => root_greater(&f, &lo, &hi, bf, blo, bhi),
            };
            if better {
                best = Some((f, lo, hi));
            }
        }
    }
    best
}

fn root_greater(
    f: &IntPolynomial,
    lo: &BigRational,
    hi: &BigRational,
    g: &IntPolynomial,
    glo: &BigRational,
    ghi: &BigRational,
) -> bool {
    use super::poly::refine_root;
    let (fq, gq) = (f.to_rational(), g.to_rational());
    let (mut a, mut b) = ((lo.clone(), hi.clone()), (glo.clone(), ghi.clone()));
    loop {
        if a.0 >= b.1 {
            return true;
        }
        if a.1 <= b.0 {
            return false;
        }
        let wa = (&a.1 - &a.0) / BigRational::from_integer(BigInt::from(2));
        let wb = (&b.1 - &b.0) / BigRational::from_integer(BigInt::from(2));
        a = refine_root(&fq, a.0, a.1, &wa);
        b = refine_root(&gq, b.0, b.1, &wb);
    }
}

/// Exact Perron-Frobenius eigenpair of a primitive nonnegative matrix.
pub fn pf_eigenpair(m: &IntegerMatrix) -> Result<PfEigenpair, AlgebraError> {
    if !m.is_primitive() {
        return Err(AlgebraError::NotPrimitive);
    }
    let cp = m.char_poly();
    let (minpoly, lo, hi) = largest_real_root_factor(&cp).ok_or(AlgebraError::NotPrimitive)?;
    let field = NumberField::new(minpoly, lo, hi)?;
    let lambda = field.generator();
    let n = m.dim();
    // rows of (M - λI)
    let mut a: Vec<Vec<AlgebraicNumber>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let e = field.from_rational(BigRational::from_integer(m.get(i, j).clone()));
                    if i == j {
                        &e - &lambda
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let vector = null_vector(&mut a).ok_or(AlgebraError::NotPrimitive)?;
    let first = vector[0].clone();
    if first.is_zero() {
        return Err(AlgebraError::NotPrimitive);
    }
    let inv = first.inverse()?;
    let vector: Vec<AlgebraicNumber> = vector.iter().map(|v| v * &inv).collect();
    if vector.iter().any(|v| !v.is_positive()) {
        return Err(AlgebraError::NotPrimitive);
    }
    Ok(PfEigenpair {
        value: lambda,
        vector,
    })
}

/// A nonzero vector in the kernel of `a`, assuming the kernel is one-dimensional.
pub(crate) fn null_vector(a: &mut [Vec<AlgebraicNumber>]) -> Option<Vec<AlgebraicNumber>> {
    let rows = a.len();
    let cols = a.first()?.len();
    let field = a[0][0].field().clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inverse().ok()?;
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return None;
    }
    let f = free[0];
    let mut v = vec![field.from_int(0); cols];
    v[f] = field.from_int(1);
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -&a[row][f];
    }
    Some(v)
}
