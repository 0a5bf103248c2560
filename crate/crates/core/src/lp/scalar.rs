use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arithmetic the simplex needs from its number type.
///
/// Sign tests go through [`Scalar::is_pos`] and [`Scalar::is_neg`], which
/// apply a tolerance for floating point and are exact for rationals.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// Exact conversion for rationals (every finite `f64` is a dyadic rational).
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self -= a * b`
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);

    fn is_exact_zero(&self) -> bool;
    /// Strictly positive beyond tolerance.
    fn is_pos(&self) -> bool;
    /// Strictly negative beyond tolerance.
    fn is_neg(&self) -> bool;
    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    /// Large enough in magnitude to pivot on.
    fn pivotable(&self) -> bool;
    fn abs_cmp(&self, o: &Self) -> Ordering;
    fn cmp(&self, o: &Self) -> Ordering;
}

/// Zero tolerance for primal and dual sign tests in floating point.
pub const FLOAT_TOL: f64 = 1e-9;
/// Smallest admissible pivot magnitude in floating point.
pub const PIVOT_TOL: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    #[inline]
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    #[inline]
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    #[inline]
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    #[inline]
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    #[inline]
    fn neg(&self) -> Self {
        -self
    }
    #[inline]
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    #[inline]
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    #[inline]
    fn is_pos(&self) -> bool {
        *self > FLOAT_TOL
    }
    #[inline]
    fn is_neg(&self) -> bool {
        *self < -FLOAT_TOL
    }
    #[inline]
    fn pivotable(&self) -> bool {
        self.abs() > PIVOT_TOL
    }
    fn abs_cmp(&self, o: &Self) -> Ordering {
        self.abs().total_cmp(&o.abs())
    }
    fn cmp(&self, o: &Self) -> Ordering {
        self.total_cmp(o)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn pivotable(&self) -> bool {
        !self.is_zero()
    }
    fn abs_cmp(&self, o: &Self) -> Ordering {
        Ord::cmp(&self.abs(), &o.abs())
    }
    fn cmp(&self, o: &Self) -> Ordering {
        Ord::cmp(self, o)
    }
}

/// Exact rational from an integer.
pub fn ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The exact value of a finite float.
pub fn exact(v: f64) -> BigRational {
    <BigRational as FromPrimitive>::from_f64(v).expect("finite float")
}
