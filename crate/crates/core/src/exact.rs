//! Exact scalars: arbitrary-precision rationals and the field Q(i, √2).
//!
//! Every coefficient in the crate is a [`Scalar`] `a + b·i + c·√2 + d·i·√2`
//! with rational components. The representation is unique, so structural
//! equality is semantic equality.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds a reduced rational `num/den`.
pub fn normalize_rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rational> {
    let den = den.into();
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(num.into(), den))
}

/// Shorthand for small literal rationals; panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Rational {
    normalize_rational(num, den).expect("literal rational with zero denominator")
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q` (always with an explicit denominator).
pub fn rational_to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse {
        line: 1,
        column: 1,
        message: format!("invalid rational literal `{text}`"),
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            normalize_rational(n, d)
        }
        None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// An element `a + b·i + c·√2 + d·i·√2` of Q(i, √2).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Scalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Scalar { a, b, c, d }
    }

    pub fn zero() -> Self {
        Scalar::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::one())
    }

    pub fn i() -> Self {
        Scalar::new(Rational::zero(), Rational::one(), Rational::zero(), Rational::zero())
    }

    pub fn sqrt2() -> Self {
        Scalar::new(Rational::zero(), Rational::zero(), Rational::one(), Rational::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::new(r, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(qi(n))
    }

    /// `re + im·i` with rational parts.
    pub fn complex(re: Rational, im: Rational) -> Self {
        Scalar::new(re, im, Rational::zero(), Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// Fixed by complex conjugation.
    pub fn is_real(&self) -> bool {
        self.b.is_zero() && self.d.is_zero()
    }

    /// Lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.b.is_zero() && self.c.is_zero() && self.d.is_zero()).then_some(&self.a)
    }

    /// Complex conjugation: `i ↦ −i`, `√2` fixed.
    pub fn conj(&self) -> Self {
        Scalar::new(self.a.clone(), -&self.b, self.c.clone(), -&self.d)
    }

    /// The automorphism `√2 ↦ −√2` fixing Q(i).
    fn sqrt2_flip(&self) -> Self {
        Scalar::new(self.a.clone(), self.b.clone(), -&self.c, -&self.d)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Scalar::new(&self.a * r, &self.b * r, &self.c * r, &self.d * r)
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        // x · flip(x) lies in Q(i); invert there by the complex norm.
        let flipped = self.sqrt2_flip();
        let norm_qi = self * &flipped;
        debug_assert!(norm_qi.c.is_zero() && norm_qi.d.is_zero());
        let n2 = &norm_qi.a * &norm_qi.a + &norm_qi.b * &norm_qi.b;
        let inv_qi = Scalar::complex(&norm_qi.a / &n2, -&norm_qi.b / &n2);
        Ok(&flipped * &inv_qi)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign of a real element `a + c√2`; `None` if the element is not real.
    pub fn real_sign(&self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering;
        if !self.is_real() {
            return None;
        }
        let sa = self.a.cmp(&Rational::zero());
        let sc = self.c.cmp(&Rational::zero());
        if sa == Ordering::Equal || sa == sc {
            return Some(if sa == Ordering::Equal { sc } else { sa });
        }
        if sc == Ordering::Equal {
            return Some(sa);
        }
        // opposite signs: compare a² with 2c²
        let a2 = &self.a * &self.a;
        let c2 = &self.c * &self.c * qi(2);
        Some(match a2.cmp(&c2) {
            Ordering::Greater => sa,
            Ordering::Less => sc,
            Ordering::Equal => Ordering::Equal,
        })
    }

    /// Components in basis order `1, i, √2, i√2`.
    pub fn components(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Floating-point approximation `(re, im)`.
    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        let s = std::f64::consts::SQRT_2;
        (f(&self.a) + s * f(&self.c), f(&self.b) + s * f(&self.d))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let two = qi(2);
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&o.a, &o.b, &o.c, &o.d);
        // i² = −1, (√2)² = 2, (i√2)² = −2
        Scalar::new(
            a * e - b * f + &two * (c * g - d * h),
            a * f + b * e + &two * (c * h + d * g),
            a * g + c * e - b * h - d * f,
            a * h + d * e + b * g + c * f,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.a += &o.a;
        self.b += &o.b;
        self.c += &o.c;
        self.d += &o.d;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.a -= &o.a;
        self.b -= &o.b;
        self.c -= &o.c;
        self.d -= &o.d;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

/// Renders in the DSL literal syntax, e.g. `1/2 - 1/2*I + 3*SQRT2`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (coef, unit) in [(&self.a, ""), (&self.b, "I"), (&self.c, "SQRT2"), (&self.d, "I*SQRT2")] {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (unit.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{unit}")?,
                (false, false) => write!(f, "{mag}*{unit}")?,
            }
        }
        Ok(())
    }
}
