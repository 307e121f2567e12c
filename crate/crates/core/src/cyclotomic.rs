//! Exact arithmetic in the cyclotomic field `Q(ζ_N)` for odd `N`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^(d−1)` with
//! `d = φ(N)`, reduced modulo the cyclotomic polynomial `Φ_N`, as an integer
//! numerator vector over one positive common denominator in lowest terms.
//! That form is canonical, so equality is structural. Coefficients live in
//! `i64` while they fit and move to `BigInt` otherwise; every intermediate is
//! checked, never wrapped.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

struct FieldData {
    order: u64,
    degree: usize,
    /// `Φ_N` without its leading 1, low to high.
    phi: Vec<BigInt>,
    /// Nonzero `(index, coefficient)` pairs of `phi` when all fit in `i64`.
    phi_small: Option<Vec<(usize, i64)>>,
}

/// Handle on `Q(ζ_N)`. Cheap to clone.
#[derive(Clone)]
pub struct CyclotomicField(Arc<FieldData>);

impl fmt::Debug for CyclotomicField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(ζ_{})", self.0.order)
    }
}

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.0.order == other.0.order
    }
}

impl Eq for CyclotomicField {}

fn field_cache() -> &'static Mutex<HashMap<u64, CyclotomicField>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, CyclotomicField>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Exact quotient of `num` by a monic polynomial (both low to high).
fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for e in (dd..num.len()).rev() {
        let q = rem[e].clone();
        if q.is_zero() {
            continue;
        }
        quot[e - dd] = q.clone();
        for (i, c) in den.iter().enumerate() {
            rem[e - dd + i] -= &q * c;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// `Φ_n`, low to high, by dividing `x^n − 1` by `Φ_d` for every proper
/// divisor `d`.
fn cyclotomic_polynomial(n: u64, memo: &mut HashMap<u64, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d < n {
            let phi_d = cyclotomic_polynomial(d, memo);
            poly = div_monic(&poly, &phi_d);
        }
    }
    memo.insert(n, poly.clone());
    poly
}

/// Coefficients of `Φ_n`, low to high, including the leading 1.
pub fn cyclotomic_poly_coefficients(n: u64) -> Vec<BigInt> {
    cyclotomic_polynomial(n, &mut HashMap::new())
}

impl CyclotomicField {
    /// `Q(ζ_N)`; `N` must be odd.
    pub fn new(order: u64) -> Result<Self> {
        if order == 0 || order.is_multiple_of(2) {
            return Err(Error::EvenOrder(order));
        }
        let mut cache = field_cache().lock().expect("field cache poisoned");
        if let Some(f) = cache.get(&order) {
            return Ok(f.clone());
        }
        let mut full = cyclotomic_polynomial(order, &mut HashMap::new());
        let degree = full.len() - 1;
        full.truncate(degree);
        let phi_small = full
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| c.to_i64().map(|v| (i, v)))
            .collect::<Option<Vec<_>>>();
        let field = CyclotomicField(Arc::new(FieldData {
            order,
            degree,
            phi: full,
            phi_small,
        }));
        cache.insert(order, field.clone());
        Ok(field)
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// `φ(N)`, the dimension over `Q`.
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn zero(&self) -> CycloElement {
        CycloElement {
            field: self.clone(),
            repr: Repr::Small {
                num: vec![0; self.degree()],
                den: 1,
            },
        }
    }

    pub fn one(&self) -> CycloElement {
        self.from_rational(&BigRational::one())
    }

    pub fn from_rational(&self, q: &BigRational) -> CycloElement {
        let mut num = vec![BigInt::zero(); self.degree()];
        num[0] = q.numer().clone();
        CycloElement::from_big(self.clone(), num, q.denom().clone())
    }

    /// `ζ_N^t`.
    pub fn root(&self, t: i64) -> CycloElement {
        let n = self.order() as i64;
        let e = t.rem_euclid(n) as usize;
        let mut c = vec![BigInt::zero(); e + 1];
        c[e] = BigInt::one();
        self.from_exponent_vector(c, BigInt::one())
    }

    /// `Σ_t weights[t] · ζ^t`, where `weights` is indexed by exponent mod `N`.
    pub fn from_weights(&self, weights: &[BigRational]) -> CycloElement {
        let mut den = BigInt::one();
        for w in weights {
            if !w.is_zero() {
                den = den.lcm(w.denom());
            }
        }
        let scaled: Vec<BigInt> = weights
            .iter()
            .map(|w| {
                if w.is_zero() {
                    BigInt::zero()
                } else {
                    w.numer() * (&den / w.denom())
                }
            })
            .collect();
        self.from_exponent_vector(scaled, den)
    }

    /// `(Σ_t num[t] · ζ^t) / den` for exponents `t` in any range.
    pub fn from_exponent_vector(&self, num: Vec<BigInt>, den: BigInt) -> CycloElement {
        if let (Some(small), Some(d)) = (
            num.iter().map(|c| c.to_i128()).collect::<Option<Vec<_>>>(),
            den.to_i128(),
        ) {
            if let Some(r) = reduce_small(self, small) {
                return CycloElement::from_i128(self.clone(), r, d);
            }
        }
        let r = reduce_big(self, num);
        CycloElement::from_big(self.clone(), r, den)
    }
}

/// Numerator coefficients over a common denominator. `Small` is used exactly
/// when every value fits in `i64`, which keeps the representation canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: Vec<i64>, den: i64 },
    Big { num: Vec<BigInt>, den: BigInt },
}

/// An element of `Q(ζ_N)` in canonical reduced form.
#[derive(Clone)]
pub struct CycloElement {
    field: CyclotomicField,
    repr: Repr,
}

impl PartialEq for CycloElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.repr == other.repr
    }
}

impl Eq for CycloElement {}

impl std::hash::Hash for CycloElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.order().hash(state);
        self.repr.hash(state);
    }
}

/// `ζ_N^t` as a standalone element.
pub fn cyclo(t: i64, order: u64) -> Result<CycloElement> {
    Ok(CyclotomicField::new(order)?.root(t))
}

/// Checked binary and unary operations on [`CycloElement`].
#[derive(Clone, Copy, Debug)]
pub enum CycloOp<'a> {
    Add(&'a CycloElement),
    Mul(&'a CycloElement),
    Conj,
    ScaleByRational(&'a BigRational),
}

fn reduce_small(field: &CyclotomicField, mut c: Vec<i128>) -> Option<Vec<i128>> {
    let n = field.order() as usize;
    let d = field.degree();
    if c.len() > n {
        for e in n..c.len() {
            let v = c[e];
            c[e % n] = c[e % n].checked_add(v)?;
        }
        c.truncate(n);
    }
    let phi = field.0.phi_small.as_ref()?;
    for e in (d..c.len()).rev() {
        let q = c[e];
        if q == 0 {
            continue;
        }
        for &(i, p) in phi {
            let t = q.checked_mul(p as i128)?;
            c[e - d + i] = c[e - d + i].checked_sub(t)?;
        }
        c[e] = 0;
    }
    c.resize(d, 0);
    Some(c)
}

fn reduce_big(field: &CyclotomicField, mut c: Vec<BigInt>) -> Vec<BigInt> {
    let n = field.order() as usize;
    let d = field.degree();
    if c.len() > n {
        let tail = c.split_off(n);
        for (e, v) in tail.into_iter().enumerate() {
            c[(n + e) % n] += v;
        }
    }
    let phi = &field.0.phi;
    for e in (d..c.len()).rev() {
        if c[e].is_zero() {
            continue;
        }
        let q = std::mem::take(&mut c[e]);
        for (i, p) in phi.iter().enumerate() {
            if !p.is_zero() {
                c[e - d + i] -= &q * p;
            }
        }
    }
    c.resize(d, BigInt::zero());
    c
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

impl CycloElement {
    fn from_i128(field: CyclotomicField, mut num: Vec<i128>, mut den: i128) -> Self {
        debug_assert!(den != 0);
        if num.iter().all(|&c| c == 0) {
            return field.zero();
        }
        let mut g = den;
        for &c in &num {
            g = gcd_i128(g, c);
            if g == 1 {
                break;
            }
        }
        if g != 1 {
            for c in num.iter_mut() {
                *c /= g;
            }
            den /= g;
        }
        if den < 0 {
            den = -den;
            for c in num.iter_mut() {
                *c = -*c;
            }
        }
        let small = num
            .iter()
            .map(|&c| i64::try_from(c).ok())
            .collect::<Option<Vec<_>>>()
            .zip(i64::try_from(den).ok());
        let repr = match small {
            Some((num, den)) => Repr::Small { num, den },
            None => Repr::Big {
                num: num.into_iter().map(BigInt::from).collect(),
                den: BigInt::from(den),
            },
        };
        CycloElement { field, repr }
    }

    fn from_big(field: CyclotomicField, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if num.iter().all(Zero::is_zero) {
            return field.zero();
        }
        let mut g = den.abs();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            for c in num.iter_mut() {
                *c = &*c / &g;
            }
            den = &den / &g;
        }
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        let small = num
            .iter()
            .map(|c| c.to_i64())
            .collect::<Option<Vec<_>>>()
            .zip(den.to_i64());
        let repr = match small {
            Some((num, den)) => Repr::Small { num, den },
            None => Repr::Big { num, den },
        };
        CycloElement { field, repr }
    }

    fn big_parts(&self) -> (Vec<BigInt>, BigInt) {
        match &self.repr {
            Repr::Small { num, den } => (
                num.iter().map(|&c| BigInt::from(c)).collect(),
                BigInt::from(*den),
            ),
            Repr::Big { num, den } => (num.clone(), den.clone()),
        }
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.field.order()
    }

    /// Power-basis coefficients as rationals.
    pub fn coefficients(&self) -> Vec<BigRational> {
        let (num, den) = self.big_parts();
        num.into_iter()
            .map(|c| BigRational::new(c, den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small { num, .. } => num.iter().all(|&c| c == 0),
            Repr::Big { num, .. } => num.iter().all(Zero::is_zero),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Small { num, den } => {
                *den == 1 && num[0] == 1 && num[1..].iter().all(|&c| c == 0)
            }
            // Canonical: 1 always fits the small form.
            Repr::Big { .. } => false,
        }
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        let coeffs = self.coefficients();
        if coeffs[1..].iter().all(Zero::is_zero) {
            Some(coeffs[0].clone())
        } else {
            None
        }
    }

    /// Complex conjugation `ζ ↦ ζ^(N−1)`.
    pub fn conj(&self) -> CycloElement {
        let n = self.order() as usize;
        match &self.repr {
            Repr::Small { num, den } => {
                let mut c = vec![0i128; n];
                for (i, &v) in num.iter().enumerate() {
                    c[(n - i) % n] = v as i128;
                }
                if let Some(r) = reduce_small(&self.field, c) {
                    return CycloElement::from_i128(self.field.clone(), r, *den as i128);
                }
                self.conj_big()
            }
            Repr::Big { .. } => self.conj_big(),
        }
    }

    fn conj_big(&self) -> CycloElement {
        let n = self.order() as usize;
        let (num, den) = self.big_parts();
        let mut c = vec![BigInt::zero(); n];
        for (i, v) in num.into_iter().enumerate() {
            c[(n - i) % n] = v;
        }
        CycloElement::from_big(self.field.clone(), reduce_big(&self.field, c), den)
    }

    /// Multiplication by `ζ^t`.
    pub fn mul_root(&self, t: i64) -> CycloElement {
        let n = self.order() as usize;
        let shift = t.rem_euclid(n as i64) as usize;
        if shift == 0 {
            return self.clone();
        }
        if let Repr::Small { num, den } = &self.repr {
            let mut c = vec![0i128; n];
            for (i, &v) in num.iter().enumerate() {
                c[(i + shift) % n] = v as i128;
            }
            if let Some(r) = reduce_small(&self.field, c) {
                return CycloElement::from_i128(self.field.clone(), r, *den as i128);
            }
        }
        let (num, den) = self.big_parts();
        let mut c = vec![BigInt::zero(); n];
        for (i, v) in num.into_iter().enumerate() {
            c[(i + shift) % n] = v;
        }
        CycloElement::from_big(self.field.clone(), reduce_big(&self.field, c), den)
    }

    pub fn scale(&self, q: &BigRational) -> CycloElement {
        let (num, den) = self.big_parts();
        CycloElement::from_big(
            self.field.clone(),
            num.into_iter().map(|c| c * q.numer()).collect(),
            den * q.denom(),
        )
    }

    /// `a · conj(a)`, i.e. `|a|²`.
    pub fn norm_squared(&self) -> CycloElement {
        self * &self.conj()
    }

    /// `|a| = 1`, decided exactly as `a · conj(a) = 1`.
    pub fn is_unit_modulus(&self) -> bool {
        self.norm_squared().is_one()
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Numerical value at `ζ = exp(2πi/N)`. Display and cross-checks only.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.order() as f64;
        let (num, den) = self.big_parts();
        let den = den.to_f64().unwrap_or(f64::INFINITY);
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN) / den;
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n;
            re += v * theta.cos();
            im += v * theta.sin();
        }
        (re, im)
    }

    pub fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    /// Checked arithmetic: fails on mismatched orders.
    pub fn apply(&self, op: CycloOp<'_>) -> Result<CycloElement> {
        let same = |b: &CycloElement| {
            if b.order() == self.order() {
                Ok(())
            } else {
                Err(Error::OrderMismatch(self.order(), b.order()))
            }
        };
        match op {
            CycloOp::Add(b) => {
                same(b)?;
                Ok(self + b)
            }
            CycloOp::Mul(b) => {
                same(b)?;
                Ok(self * b)
            }
            CycloOp::Conj => Ok(self.conj()),
            CycloOp::ScaleByRational(q) => Ok(self.scale(q)),
        }
    }

    fn add_impl(&self, other: &CycloElement, negate: bool) -> CycloElement {
        assert_eq!(self.order(), other.order(), "cyclotomic order mismatch");
        if let (Repr::Small { num: a, den: da }, Repr::Small { num: b, den: db }) =
            (&self.repr, &other.repr)
        {
            let (da, db) = (*da as i128, *db as i128);
            let num: Vec<i128> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| {
                    let l = x as i128 * db;
                    let r = y as i128 * da;
                    if negate {
                        l - r
                    } else {
                        l + r
                    }
                })
                .collect();
            return CycloElement::from_i128(self.field.clone(), num, da * db);
        }
        let (a, da) = self.big_parts();
        let (b, db) = other.big_parts();
        let num = a
            .into_iter()
            .zip(b)
            .map(|(x, y)| {
                if negate {
                    x * &db - y * &da
                } else {
                    x * &db + y * &da
                }
            })
            .collect();
        CycloElement::from_big(self.field.clone(), num, da * db)
    }

    fn mul_small(&self, other: &CycloElement) -> Option<CycloElement> {
        let (Repr::Small { num: a, den: da }, Repr::Small { num: b, den: db }) =
            (&self.repr, &other.repr)
        else {
            return None;
        };
        let d = a.len();
        let mut c = vec![0i128; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as i128;
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    c[i + j] = c[i + j].checked_add(x.checked_mul(y as i128)?)?;
                }
            }
        }
        let r = reduce_small(&self.field, c)?;
        let den = (*da as i128).checked_mul(*db as i128)?;
        Some(CycloElement::from_i128(self.field.clone(), r, den))
    }

    fn mul_impl(&self, other: &CycloElement) -> CycloElement {
        assert_eq!(self.order(), other.order(), "cyclotomic order mismatch");
        if self.is_zero() || other.is_zero() {
            return self.field.zero();
        }
        if let Some(r) = self.mul_small(other) {
            return r;
        }
        let (a, da) = self.big_parts();
        let (b, db) = other.big_parts();
        let d = a.len();
        let mut c = vec![BigInt::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] += x * y;
                }
            }
        }
        CycloElement::from_big(self.field.clone(), reduce_big(&self.field, c), da * db)
    }
}

impl Add for &CycloElement {
    type Output = CycloElement;

    fn add(self, rhs: &CycloElement) -> CycloElement {
        self.add_impl(rhs, false)
    }
}

impl Sub for &CycloElement {
    type Output = CycloElement;

    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self.add_impl(rhs, true)
    }
}

impl Mul for &CycloElement {
    type Output = CycloElement;

    fn mul(self, rhs: &CycloElement) -> CycloElement {
        self.mul_impl(rhs)
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;

    fn neg(self) -> CycloElement {
        self.scale(&-BigRational::one())
    }
}

impl Add for CycloElement {
    type Output = CycloElement;

    fn add(self, rhs: CycloElement) -> CycloElement {
        &self + &rhs
    }
}

impl Sub for CycloElement {
    type Output = CycloElement;

    fn sub(self, rhs: CycloElement) -> CycloElement {
        &self - &rhs
    }
}

impl Mul for CycloElement {
    type Output = CycloElement;

    fn mul(self, rhs: CycloElement) -> CycloElement {
        &self * &rhs
    }
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {:?}", self.field)
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})ζ")?,
                _ => write!(f, "({c})ζ^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn c(t: i64, n: u64) -> CycloElement {
        cyclo(t, n).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| {
            cyclotomic_poly_coefficients(n)
                .iter()
                .map(|c| c.to_i64().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(as_i64(15), vec![1, -1, 0, 1, -1, 1, 0, -1, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(as_i64(105).contains(&-2));
        assert_eq!(as_i64(105).len(), 49);
    }

    #[test]
    fn root_examples() {
        assert!(c(0, 9).is_one());
        let s = &(&c(3, 9) + &c(6, 9)) + &c(0, 9);
        assert!(s.is_zero());
        let (re, im) = (c(3, 9).to_complex(), c(6, 9).to_complex());
        assert!((1.0 + re.0 + im.0).abs() < 1e-12 && (re.1 + im.1).abs() < 1e-12);
        assert!((&c(1, 3) * &c(2, 3)).is_one());
        assert_eq!(c(-1, 9), c(8, 9));
        assert_eq!(c(9, 9), c(0, 9));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(c(1, 9).conj(), c(8, 9));
        let f = CyclotomicField::new(9).unwrap();
        let a = (&c(0, 9) + &c(1, 9)).scale(&q(1, 2));
        assert_eq!(&a + &f.zero(), a);
        let expected = (&(&c(0, 9).scale(&q(2, 1)) + &c(1, 9)) + &c(8, 9)).scale(&q(1, 4));
        let got = a.apply(CycloOp::Mul(&a.conj())).unwrap();
        assert_eq!(got, expected);
        let theta = 2.0 * std::f64::consts::PI / 9.0;
        let abs2 = (2.0 + 2.0 * theta.cos()) / 4.0;
        assert!((got.to_complex().0 - abs2).abs() < 1e-12);
        assert!(got.is_real());
    }

    #[test]
    fn predicate_examples() {
        assert!((&(&c(0, 3) + &c(1, 3)) + &c(2, 3)).is_zero());
        assert!(c(0, 9).is_one());
        let a = (&c(0, 9) + &c(1, 9)).scale(&q(1, 2));
        assert!(!a.is_unit_modulus());
        assert!(a.abs_f64() < 1.0);
        assert!(c(4, 9).is_unit_modulus());
        assert!(c(4, 9).scale(&q(-1, 1)).is_unit_modulus());
    }

    #[test]
    fn to_complex_examples() {
        assert_eq!(c(0, 5).to_complex(), (1.0, 0.0));
        assert_eq!(cyclo(1, 4).unwrap_err(), Error::EvenOrder(4));
        assert_eq!(cyclo(1, 0).unwrap_err(), Error::EvenOrder(0));
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = c(1, 9);
        let b = c(1, 5);
        assert_eq!(a.apply(CycloOp::Add(&b)), Err(Error::OrderMismatch(9, 5)));
        assert!(a.apply(CycloOp::Mul(&b)).is_err());
    }

    #[test]
    fn trivial_field() {
        let f = CyclotomicField::new(1).unwrap();
        assert_eq!(f.degree(), 1);
        assert!(f.root(5).is_one());
        assert!((&f.root(0) + &f.root(0)).as_rational() == Some(q(2, 1)));
    }

    #[test]
    fn big_coefficients_stay_exact() {
        let f = CyclotomicField::new(15).unwrap();
        let huge = BigRational::new(BigInt::from(1u64) << 200, BigInt::from(3));
        let a = &f.from_rational(&huge) + &f.root(1);
        let b = &a * &a;
        let back = &(&b - &(&f.root(1) * &f.root(1))) - &f.root(1).scale(&(&huge * q(2, 1)));
        assert_eq!(back, f.from_rational(&(&huge * &huge)));
        // Small and big paths agree on a value that crosses the threshold.
        let m = f.from_rational(&q(i64::MAX, 1));
        let sq = &m * &m;
        assert_eq!(sq.as_rational().unwrap(), q(i64::MAX, 1) * q(i64::MAX, 1));
        let down = sq.scale(&BigRational::new(
            BigInt::one(),
            BigInt::from(i64::MAX) * BigInt::from(i64::MAX),
        ));
        assert!(down.is_one());
    }

    #[test]
    fn mul_root_matches_mul() {
        let f = CyclotomicField::new(45).unwrap();
        let a = &(&f.root(3) + &f.root(17)).scale(&q(2, 7)) + &f.root(40);
        for t in [-3i64, 0, 1, 22, 44, 90] {
            assert_eq!(a.mul_root(t), &a * &f.root(t));
        }
    }
}
