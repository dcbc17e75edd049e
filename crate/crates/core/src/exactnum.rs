//! Exact rationals, certified square-root enclosures and comparison of sums
//! of square roots.
//!
//! Every length in the crate is a sum of square roots of rationals. Numeric
//! evaluation can separate two such sums but never prove them equal, so
//! equality is only reported when both sides reduce to the same canonical
//! form (coefficient times squarefree kernel), or when both sides are
//! evaluated exactly.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Errors from the numeric layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumError {
    /// A square root or radical sum was asked for a negative value.
    NegativeRadicand(String),
    /// A radical sum was given a negative coefficient.
    NegativeCoefficient(String),
    /// A rational string could not be parsed.
    Parse(String),
    /// Division by zero while building a rational.
    ZeroDenominator,
}

impl fmt::Display for NumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumError::NegativeRadicand(v) => write!(f, "negative radicand {v}"),
            NumError::NegativeCoefficient(v) => write!(f, "negative coefficient {v}"),
            NumError::Parse(s) => write!(f, "cannot parse rational {s:?}"),
            NumError::ZeroDenominator => write!(f, "zero denominator"),
        }
    }
}

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, NumError> {
        if denom.is_zero() {
            return Err(NumError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(numer, denom)))
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    /// `n / d`; panics when `d == 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rat(BigRational::from_integer(v))
    }

    /// `2^exp` for any integer exponent.
    pub fn pow2(exp: i64) -> Self {
        let mag = BigInt::one() << exp.unsigned_abs() as usize;
        if exp >= 0 {
            Rat::from_bigint(mag)
        } else {
            Rat(BigRational::new(BigInt::one(), mag))
        }
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rat)
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn signum(&self) -> Ordering {
        self.0.cmp(&BigRational::zero())
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn square(&self) -> Self {
        Rat(&self.0 * &self.0)
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64` (may underflow to zero for tiny values).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
    }

    /// Bits in numerator plus denominator, a rough size measure.
    pub fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    /// Largest dyadic rational `m / 2^s` that does not exceed `self`, keeping
    /// about `sig_bits` significant bits. Values with fewer significant bits
    /// are returned unchanged.
    pub fn dyadic_floor(&self, sig_bits: u32) -> Self {
        if self.is_zero() {
            return Rat::zero();
        }
        // self ≈ 2^e with e = bits(num) - bits(den)
        let e = self.numer().bits() as i64 - self.denom().bits() as i64;
        let shift = sig_bits as i64 - e;
        let scaled = self * &Rat::pow2(shift);
        let m = scaled.floor();
        let r = &Rat::from_bigint(m) * &Rat::pow2(-shift);
        if r.bit_size() >= self.bit_size() {
            self.clone()
        } else {
            r
        }
    }

    /// Decimal rendering in scientific notation with `digits` significant
    /// digits, e.g. `2.89352e-5`. Works far below the `f64` range.
    pub fn to_scientific(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let neg = self.is_negative();
        let a = self.abs();
        // Estimate the decimal exponent from the bit lengths, then correct.
        let e2 = a.numer().bits() as f64 - a.denom().bits() as f64;
        let mut e10 = num_traits::Float::floor(e2 * core::f64::consts::LOG10_2) as i64;
        let ten = Rat::from_int(10);
        let pow10 = |e: i64| -> Rat {
            let p = num_traits::pow(BigInt::from(10u32), e.unsigned_abs() as usize);
            if e >= 0 {
                Rat::from_bigint(p)
            } else {
                Rat::from_bigint(p).recip()
            }
        };
        let mut mant = &a / &pow10(e10);
        while mant >= ten {
            mant = &mant / &ten;
            e10 += 1;
        }
        while mant < Rat::one() {
            mant = &mant * &ten;
            e10 -= 1;
        }
        let scaled = &mant * &pow10(digits as i64 - 1);
        // round half up
        let mut m = (&scaled + &Rat::frac(1, 2)).floor();
        let limit = num_traits::pow(BigInt::from(10u32), digits);
        if m >= limit {
            m /= 10;
            e10 += 1;
        }
        let s = m.to_string();
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&s[..1]);
        let tail = s[1..].trim_end_matches('0');
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        if e10 != 0 {
            out.push('e');
            out.push_str(&e10.to_string());
        }
        out
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// `num/den`, always with an explicit denominator.
impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Accepts `num/den` or a bare integer.
impl FromStr for Rat {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().replace('\u{2212}', "-");
        let parse = |p: &str| BigInt::from_str(p.trim()).map_err(|_| NumError::Parse(s.to_string()));
        match t.split_once('/') {
            Some((n, d)) => Rat::new(parse(n)?, parse(d)?),
            None => Ok(Rat::from_bigint(parse(&t)?)),
        }
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $f(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$f(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $f(self, rhs: Rat) -> Rat {
                Rat(self.0.$f(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $f(self, rhs: &Rat) -> Rat {
                Rat(self.0.$f(&rhs.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $f(self, rhs: Rat) -> Rat {
                Rat((&self.0).$f(rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl core::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Certified enclosure `lo <= r <= hi` of a real value `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
    pub precision_bits: u32,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat, precision_bits: u32) -> Self {
        assert!(lo <= hi, "interval bounds out of order: {lo} > {hi}");
        Interval { lo, hi, precision_bits }
    }

    pub fn exact(v: Rat) -> Self {
        Interval { lo: v.clone(), hi: v, precision_bits: u32::MAX }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rat) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// `self` lies entirely inside `other`.
    pub fn within(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) * Rat::frac(1, 2)
    }

    /// Strictly above every point of `other`.
    pub fn certainly_greater(&self, other: &Interval) -> bool {
        self.lo > other.hi
    }

    /// The invariant `width <= 2^-precision_bits * max(1, |hi|)`.
    pub fn meets_width_bound(&self) -> bool {
        if self.precision_bits == u32::MAX {
            return self.is_exact();
        }
        let scale = self.hi.abs().max(Rat::one());
        self.width() <= scale * Rat::pow2(-(self.precision_bits as i64))
    }
}

impl Add<&Interval> for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
            precision_bits: self.precision_bits.min(rhs.precision_bits),
        }
    }
}

/// Certified lower end of an enclosure.
pub fn rat_lower_bound(v: &Interval) -> Rat {
    v.lo.clone()
}

/// Certified upper end of an enclosure.
pub fn rat_upper_bound(v: &Interval) -> Rat {
    v.hi.clone()
}

/// `floor(sqrt(q) * 2^bits)` and whether the root is exact at that scale.
pub fn scaled_sqrt_floor(q: &Rat, bits: u32) -> Result<(BigUint, bool), NumError> {
    if q.is_negative() {
        return Err(NumError::NegativeRadicand(q.to_string()));
    }
    let num = q.numer().magnitude() << (2 * bits as usize);
    let den = q.denom().magnitude();
    let (m, rem) = num.div_rem(den);
    let s = m.sqrt();
    let exact = rem.is_zero() && &s * &s == m;
    Ok((s, exact))
}

/// Enclosure of `sqrt(q)` with `width <= 2^-precision_bits`.
pub fn sqrt_interval(q: &Rat, precision_bits: u32) -> Result<Interval, NumError> {
    let (s, exact) = scaled_sqrt_floor(q, precision_bits)?;
    let scale = Rat::pow2(-(precision_bits as i64));
    let lo = Rat::from_bigint(BigInt::from(s.clone())) * &scale;
    let hi = if exact { lo.clone() } else { Rat::from_bigint(BigInt::from(s + 1u32)) * &scale };
    Ok(Interval { lo, hi, precision_bits })
}

/// Precision escalation schedule: start at `start_bits`, double up to
/// `cap_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { start_bits: 64, cap_bits: 16384 }
    }
}

impl PrecisionPolicy {
    pub fn with_cap(cap_bits: u32) -> Self {
        PrecisionPolicy { cap_bits: cap_bits.max(64), ..Default::default() }
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap_bits.max(self.start_bits);
        let mut next = Some(self.start_bits);
        core::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= cap { None } else { Some((cur * 2).min(cap)) };
            Some(cur)
        })
    }
}

/// Outcome of comparing two radical sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RadicalOrdering {
    Less,
    Greater,
    Equal,
    Unresolved,
}

impl RadicalOrdering {
    pub fn reverse(self) -> Self {
        match self {
            RadicalOrdering::Less => RadicalOrdering::Greater,
            RadicalOrdering::Greater => RadicalOrdering::Less,
            o => o,
        }
    }

    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => RadicalOrdering::Less,
            Ordering::Equal => RadicalOrdering::Equal,
            Ordering::Greater => RadicalOrdering::Greater,
        }
    }

    pub fn to_ordering(self) -> Option<Ordering> {
        match self {
            RadicalOrdering::Less => Some(Ordering::Less),
            RadicalOrdering::Greater => Some(Ordering::Greater),
            RadicalOrdering::Equal => Some(Ordering::Equal),
            RadicalOrdering::Unresolved => None,
        }
    }
}

/// A square root with memoized scaled floors, for repeated comparisons
/// over the same edge lengths.
#[derive(Debug)]
pub struct CachedRoot {
    radicand: Rat,
    levels: RefCell<Vec<(u32, BigUint, bool)>>,
    kernel: RefCell<Option<(Rat, BigUint)>>,
}

impl Clone for CachedRoot {
    fn clone(&self) -> Self {
        CachedRoot {
            radicand: self.radicand.clone(),
            levels: RefCell::new(self.levels.borrow().clone()),
            kernel: RefCell::new(self.kernel.borrow().clone()),
        }
    }
}

impl CachedRoot {
    pub fn new(radicand: Rat) -> Result<Self, NumError> {
        if radicand.is_negative() {
            return Err(NumError::NegativeRadicand(radicand.to_string()));
        }
        Ok(CachedRoot { radicand, levels: RefCell::new(Vec::new()), kernel: RefCell::new(None) })
    }

    pub fn radicand(&self) -> &Rat {
        &self.radicand
    }

    /// `floor(sqrt(radicand) * 2^bits)` and exactness.
    pub fn floor_scaled(&self, bits: u32) -> (BigUint, bool) {
        if let Some((_, v, e)) = self.levels.borrow().iter().find(|(b, _, _)| *b == bits) {
            return (v.clone(), *e);
        }
        let (v, e) = scaled_sqrt_floor(&self.radicand, bits).expect("radicand checked at construction");
        self.levels.borrow_mut().push((bits, v.clone(), e));
        (v, e)
    }

    pub fn interval(&self, bits: u32) -> Interval {
        let (s, exact) = self.floor_scaled(bits);
        let scale = Rat::pow2(-(bits as i64));
        let lo = Rat::from_bigint(BigInt::from(s.clone())) * &scale;
        let hi = if exact { lo.clone() } else { Rat::from_bigint(BigInt::from(s + 1u32)) * &scale };
        Interval { lo, hi, precision_bits: bits }
    }

    /// `sqrt(radicand) = coefficient * sqrt(kernel)` with a squarefree-ish
    /// kernel (see [`square_kernel`]).
    pub fn canonical(&self) -> (Rat, BigUint) {
        if let Some(k) = self.kernel.borrow().as_ref() {
            return k.clone();
        }
        let k = canonical_root(&self.radicand);
        *self.kernel.borrow_mut() = Some(k.clone());
        k
    }
}

/// Sum of `n` scaled floors plus the count of inexact terms: the sum lies in
/// `[lo, lo + inexact] * 2^-bits`.
fn scaled_sum(terms: &[&CachedRoot], bits: u32) -> (BigUint, u64) {
    let mut total = BigUint::zero();
    let mut inexact = 0u64;
    for t in terms {
        let (v, e) = t.floor_scaled(bits);
        total += v;
        if !e {
            inexact += 1;
        }
    }
    (total, inexact)
}

/// Enclosure of `sum sqrt(t)` over cached roots, at `bits` per term.
pub fn root_sum_interval(terms: &[&CachedRoot], bits: u32) -> Interval {
    let (lo, inexact) = scaled_sum(terms, bits);
    let scale = Rat::pow2(-(bits as i64));
    let hi = &lo + BigUint::from(inexact);
    Interval {
        lo: Rat::from_bigint(BigInt::from(lo)) * &scale,
        hi: Rat::from_bigint(BigInt::from(hi)) * &scale,
        precision_bits: bits.saturating_sub(64 - (terms.len() as u64).leading_zeros()),
    }
}

/// Compare `sum sqrt(a_i)` with `sum sqrt(b_j)`.
///
/// Identical radicands on both sides cancel first. The remaining sums are
/// separated by interval evaluation under `policy`; equality needs either
/// exact evaluation or matching canonical forms.
pub fn compare_root_sums(a: &[&CachedRoot], b: &[&CachedRoot], policy: &PrecisionPolicy) -> RadicalOrdering {
    let (a, b) = cancel_common(a, b);
    if a.is_empty() && b.is_empty() {
        return RadicalOrdering::Equal;
    }
    let mut tried_canonical = false;
    for bits in policy.levels() {
        let (la, ia) = scaled_sum(&a, bits);
        let (lb, ib) = scaled_sum(&b, bits);
        if la > &lb + ib {
            return RadicalOrdering::Greater;
        }
        if lb > &la + ia {
            return RadicalOrdering::Less;
        }
        if ia == 0 && ib == 0 && la == lb {
            return RadicalOrdering::Equal;
        }
        if !tried_canonical && a.iter().chain(b.iter()).all(|t| t.radicand.bit_size() <= 256) {
            tried_canonical = true;
            if canonical_sum(&a) == canonical_sum(&b) {
                return RadicalOrdering::Equal;
            }
        }
    }
    if !tried_canonical && canonical_sum(&a) == canonical_sum(&b) {
        return RadicalOrdering::Equal;
    }
    RadicalOrdering::Unresolved
}

fn cancel_common<'a>(a: &[&'a CachedRoot], b: &[&'a CachedRoot]) -> (Vec<&'a CachedRoot>, Vec<&'a CachedRoot>) {
    let mut left: Vec<&CachedRoot> = a.iter().copied().filter(|t| !t.radicand.is_zero()).collect();
    let mut right = Vec::with_capacity(b.len());
    for t in b.iter().copied().filter(|t| !t.radicand.is_zero()) {
        if let Some(pos) = left.iter().position(|u| core::ptr::eq(*u, t) || u.radicand == t.radicand) {
            left.swap_remove(pos);
        } else {
            right.push(t);
        }
    }
    (left, right)
}

/// Merged canonical form: kernels sorted, coefficients summed, zeros dropped.
fn canonical_sum(terms: &[&CachedRoot]) -> Vec<(BigUint, Rat)> {
    let mut out: Vec<(BigUint, Rat)> = Vec::new();
    for t in terms {
        let (c, k) = t.canonical();
        match out.iter_mut().find(|(kk, _)| *kk == k) {
            Some((_, cc)) => *cc += &c,
            None => out.push((k, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// `sqrt(q) = c * sqrt(m)` with `m` an integer whose square factors over
/// primes below one million have been removed.
pub fn canonical_root(q: &Rat) -> (Rat, BigUint) {
    if q.is_zero() {
        return (Rat::zero(), BigUint::one());
    }
    // sqrt(u/v) = sqrt(u v) / v
    let u = q.numer().magnitude();
    let v = q.denom().magnitude();
    let (s, m) = square_kernel(&(u * v));
    (Rat::from_bigint(BigInt::from(s)) / Rat::from_bigint(BigInt::from(v.clone())), m)
}

/// Split `n = s^2 * m` by trial division up to 10^6. A leftover cofactor is
/// absorbed into `s` when it is a perfect square and kept in `m` otherwise.
pub fn square_kernel(n: &BigUint) -> (BigUint, BigUint) {
    const LIMIT: u64 = 1_000_000;
    let mut rest = n.clone();
    let mut s = BigUint::one();
    let mut m = BigUint::one();
    let take = |p: u64, rest: &mut BigUint, s: &mut BigUint, m: &mut BigUint| {
        let mut count = 0u32;
        loop {
            let (q, r) = rest.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            *rest = q;
            count += 1;
        }
        for _ in 0..count / 2 {
            *s *= p;
        }
        if count % 2 == 1 {
            *m *= p;
        }
    };
    if rest.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    take(2, &mut rest, &mut s, &mut m);
    take(3, &mut rest, &mut s, &mut m);
    let mut d = 5u64;
    while d <= LIMIT {
        if BigUint::from(d * d) > rest {
            break;
        }
        for p in [d, d + 2] {
            if p <= LIMIT && fast_divides(&rest, p) {
                take(p, &mut rest, &mut s, &mut m);
            }
        }
        d += 6;
    }
    if !rest.is_one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            s *= r;
        } else {
            m *= rest;
        }
    }
    (s, m)
}

fn fast_divides(n: &BigUint, p: u64) -> bool {
    match n.to_u128() {
        Some(v) => v % p as u128 == 0,
        None => (n % p).is_zero(),
    }
}

/// Compare `sum a_i sqrt(r_i)` against `sum b_j sqrt(s_j)` for nonnegative
/// coefficients and radicands.
pub fn compare_radical_sums(
    a: &[(Rat, Rat)],
    b: &[(Rat, Rat)],
    policy: &PrecisionPolicy,
) -> Result<RadicalOrdering, NumError> {
    let fold = |terms: &[(Rat, Rat)]| -> Result<Vec<CachedRoot>, NumError> {
        terms
            .iter()
            .map(|(c, r)| {
                if c.is_negative() {
                    return Err(NumError::NegativeCoefficient(c.to_string()));
                }
                if r.is_negative() {
                    return Err(NumError::NegativeRadicand(r.to_string()));
                }
                CachedRoot::new(c.square() * r)
            })
            .collect()
    };
    let fa = fold(a)?;
    let fb = fold(b)?;
    let ra: Vec<&CachedRoot> = fa.iter().collect();
    let rb: Vec<&CachedRoot> = fb.iter().collect();
    Ok(compare_root_sums(&ra, &rb, policy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    /// Independent digit-by-digit binary square root of an integer.
    fn long_division_isqrt(n: &BigUint) -> BigUint {
        let mut rem = BigUint::zero();
        let mut root = BigUint::zero();
        let bits = n.bits() as usize;
        let pairs = bits.div_ceil(2);
        for i in (0..pairs).rev() {
            let two = (n >> (2 * i)) & BigUint::from(3u32);
            rem = (rem << 2usize) | two;
            let trial = (&root << 2usize) | BigUint::one();
            root <<= 1usize;
            if rem >= trial {
                rem -= trial;
                root |= BigUint::one();
            }
        }
        root
    }

    #[test]
    fn sqrt_of_perfect_square_is_exact() {
        let i = sqrt_interval(&Rat::from_int(4), 64).unwrap();
        assert_eq!(i.lo, Rat::from_int(2));
        assert_eq!(i.hi, Rat::from_int(2));
        let z = sqrt_interval(&Rat::zero(), 64).unwrap();
        assert!(z.lo.is_zero() && z.hi.is_zero());
        let q = sqrt_interval(&r("9/16"), 10).unwrap();
        assert_eq!(q.lo, r("3/4"));
        assert!(q.is_exact());
    }

    #[test]
    fn sqrt_two_against_long_division_oracle() {
        let i = sqrt_interval(&Rat::from_int(2), 64).unwrap();
        // oracle: floor(sqrt(2) * 2^80) by long division
        let oracle = long_division_isqrt(&(BigUint::from(2u32) << 160usize));
        let oracle_lo = Rat::from_bigint(BigInt::from(oracle.clone())) * Rat::pow2(-80);
        let oracle_hi = Rat::from_bigint(BigInt::from(oracle + 1u32)) * Rat::pow2(-80);
        assert!(i.lo <= oracle_lo && oracle_hi <= i.hi);
        assert!(r("141421356/100000000") <= i.lo && i.hi <= r("141421357/100000000"));
        assert!(i.width() <= Rat::pow2(-64) * Rat::from_int(2));
        assert!(i.meets_width_bound());
    }

    #[test]
    fn sqrt_rejects_negative() {
        assert!(matches!(sqrt_interval(&Rat::from_int(-1), 64), Err(NumError::NegativeRadicand(_))));
    }

    #[test]
    fn radical_sum_examples() {
        let p = PrecisionPolicy::default();
        let one = Rat::one();
        let eq = compare_radical_sums(
            &[(one.clone(), Rat::from_int(2)), (one.clone(), Rat::from_int(2))],
            &[(one.clone(), Rat::from_int(8))],
            &p,
        )
        .unwrap();
        assert_eq!(eq, RadicalOrdering::Equal);
        let gt =
            compare_radical_sums(&[(one.clone(), Rat::from_int(9))], &[(one.clone(), Rat::from_int(4))], &p).unwrap();
        assert_eq!(gt, RadicalOrdering::Greater);
        let lt = compare_radical_sums(
            &[(one.clone(), Rat::from_int(2)), (one.clone(), Rat::from_int(3))],
            &[(one.clone(), Rat::from_int(5)), (one.clone(), Rat::from_int(1))],
            &p,
        )
        .unwrap();
        assert_eq!(lt, RadicalOrdering::Less);
    }

    #[test]
    fn coefficients_fold_into_radicands() {
        // 3 sqrt(2) = sqrt(18)
        let p = PrecisionPolicy::default();
        let o = compare_radical_sums(&[(Rat::from_int(3), Rat::from_int(2))], &[(Rat::one(), Rat::from_int(18))], &p)
            .unwrap();
        assert_eq!(o, RadicalOrdering::Equal);
        let o = compare_radical_sums(&[(r("1/2"), Rat::from_int(12))], &[(Rat::one(), Rat::from_int(3))], &p).unwrap();
        assert_eq!(o, RadicalOrdering::Equal);
    }

    #[test]
    fn negative_inputs_rejected() {
        let p = PrecisionPolicy::default();
        assert!(compare_radical_sums(&[(Rat::from_int(-1), Rat::one())], &[], &p).is_err());
        assert!(compare_radical_sums(&[(Rat::one(), Rat::from_int(-1))], &[], &p).is_err());
    }

    #[test]
    fn cap_hit_is_unresolved_not_a_guess() {
        // sqrt(x) vs sqrt(x + tiny) with a tiny cap cannot separate
        let x = Rat::from_int(2);
        let y = &x + &Rat::pow2(-400);
        let p = PrecisionPolicy::with_cap(128);
        let o = compare_radical_sums(&[(Rat::one(), x.clone())], &[(Rat::one(), y.clone())], &p).unwrap();
        assert_eq!(o, RadicalOrdering::Unresolved);
        let o = compare_radical_sums(&[(Rat::one(), x)], &[(Rat::one(), y)], &PrecisionPolicy::default()).unwrap();
        assert_eq!(o, RadicalOrdering::Less);
    }

    #[test]
    fn square_kernel_examples() {
        assert_eq!(square_kernel(&BigUint::from(8u32)), (BigUint::from(2u32), BigUint::from(2u32)));
        assert_eq!(square_kernel(&BigUint::from(72u32)), (BigUint::from(6u32), BigUint::from(2u32)));
        let big_prime = BigUint::from(1_000_003u64);
        let sq = &big_prime * &big_prime * 5u32;
        assert_eq!(square_kernel(&sq), (big_prime, BigUint::from(5u32)));
        let (c, k) = canonical_root(&r("8/9"));
        assert_eq!(c, r("2/3"));
        assert_eq!(k, BigUint::from(2u32));
    }

    #[test]
    fn rat_parse_and_display() {
        assert_eq!(r("-1/24").to_string(), "-1/24");
        assert_eq!(r("5").to_string(), "5/1");
        assert_eq!(r("4/6"), r("2/3"));
        assert_eq!(r("\u{2212}1/24"), r("-1/24"));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("abc".parse::<Rat>().is_err());
    }

    #[test]
    fn bounds_of_intervals() {
        let i = Interval::new(r("3/2"), r("5/3"), 8);
        assert_eq!(rat_lower_bound(&i), r("3/2"));
        assert_eq!(rat_upper_bound(&i), r("5/3"));
        let z = Interval::exact(Rat::zero());
        assert_eq!(rat_lower_bound(&z), Rat::zero());
        let s = sqrt_interval(&Rat::from_int(2), 64).unwrap();
        assert!(rat_lower_bound(&s) <= rat_upper_bound(&s));
    }

    #[test]
    fn scientific_rendering() {
        assert_eq!(r("1/24").to_scientific(6), "4.16667e-2");
        assert_eq!(Rat::from_int(12345678).to_scientific(3), "1.23e7");
        assert_eq!(Rat::from_int(-2).to_scientific(6), "-2");
        let tiny = Rat::pow2(-2000);
        assert!(tiny.to_scientific(6).ends_with("e-603"));
        assert_eq!(r("999999/1000000").to_scientific(3), "1");
    }

    #[test]
    fn dyadic_floor_is_a_lower_bound() {
        let x = r("1/3");
        let d = x.dyadic_floor(20);
        assert!(d <= x);
        assert!(&x - &d < Rat::pow2(-20));
        assert!(d.denom().bits() <= 23);
        assert_eq!(Rat::frac(3, 4).dyadic_floor(20), Rat::frac(3, 4));
    }

    #[test]
    fn precision_levels_double_to_cap() {
        let p = PrecisionPolicy { start_bits: 64, cap_bits: 300 };
        let v: Vec<u32> = p.levels().collect();
        assert_eq!(v, vec![64, 128, 256, 300]);
    }
}
