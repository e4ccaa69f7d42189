use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Arbitrary-precision rational. `Ratio` keeps values reduced with a
/// positive denominator, which is exactly the canonical form we need.
pub type Rational = num_rational::Ratio<BigInt>;

/// A Gaussian rational `re + im*i` with exact rational components.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational::new(Rational::zero(), Rational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        GaussianRational::new(Rational::from_integer(BigInt::from(n)), Rational::zero())
    }

    /// `a/b + (c/d)i` from machine integers; `b` and `d` must be nonzero.
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational::new(
            Rational::new(BigInt::from(a), BigInt::from(b)),
            Rational::new(BigInt::from(c), BigInt::from(d)),
        )
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational::new(re, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = re^2 + im^2`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Exact square root in Q(i), when one exists. Of the two roots the one
    /// with positive real part (or, on the imaginary axis, positive
    /// imaginary part) is returned.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(GaussianRational::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rational_sqrt(&-self.re.clone()).map(|y| GaussianRational::new(Rational::zero(), y))
            } else {
                rational_sqrt(&self.re).map(GaussianRational::from_rational)
            };
        }
        // x^2 - y^2 = re, 2xy = im, x^2 + y^2 = |z|.
        let norm = rational_sqrt(&self.norm_sqr())?;
        let two = Rational::from_integer(BigInt::from(2));
        let x = rational_sqrt(&((&norm + &self.re) / &two))?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / &(&two * &x);
        let cand = GaussianRational::new(x, y);
        if (&cand * &cand) == *self {
            Some(cand)
        } else {
            None
        }
    }
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer();
    let den = r.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// Parses `a` or `a/b` (optionally signed) as a rational.
pub fn rational_from_str(s: &str) -> Result<Rational, Error> {
    Rational::from_str(s).map_err(|e| Error::ParseValue {
        input: s.to_string(),
        reason: e.to_string(),
    })
}

// ---- arithmetic ----

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    // Division is multiplication by the inverse; the `*` is intentional.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

// ---- text grammar ----
//
// value   := signed-part ( ('+'|'-') part )?
// part    := rational 'i'? | 'i'
// rational:= digits ( '/' digits )?
//
// At most one real and one imaginary part, in that order, e.g. "1",
// "-1/2i", "1/2-1/2i". `Display` emits the same grammar, so parsing and
// printing round-trip exactly.

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&self.re.to_string());
        }
        if !self.im.is_zero() {
            if self.im.is_negative() {
                out.push('-');
            } else if !self.re.is_zero() {
                out.push('+');
            }
            let abs = self.im.abs();
            if !abs.is_one() {
                out.push_str(&abs.to_string());
            }
            out.push('i');
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(std::str::from_utf8(&self.bytes[start..self.pos]).unwrap())
        }
    }

    /// One signed or unsigned term. Returns (value, is_imaginary).
    fn term(&mut self, sign_required: bool) -> Result<(Rational, bool), String> {
        let negative = match self.peek() {
            Some(b'+') => {
                self.bump();
                false
            }
            Some(b'-') => {
                self.bump();
                true
            }
            _ if sign_required => return Err("expected '+' or '-'".into()),
            _ => false,
        };
        // Bare "i" / "-i".
        if self.peek() == Some(b'i') {
            self.bump();
            let one = Rational::one();
            return Ok((if negative { -one } else { one }, true));
        }
        let numer = self.digits().ok_or("expected digits")?;
        let denom = if self.peek() == Some(b'/') {
            self.bump();
            Some(self.digits().ok_or("expected digits after '/'")?)
        } else {
            None
        };
        let imaginary = if self.peek() == Some(b'i') {
            self.bump();
            true
        } else {
            false
        };
        let n: BigInt = numer.parse().map_err(|_| "bad integer".to_string())?;
        let d: BigInt = match denom {
            Some(d) => d.parse().map_err(|_| "bad integer".to_string())?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        let mut value = Rational::new(n, d);
        if negative {
            value = -value;
        }
        Ok((value, imaginary))
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let fail = |reason: &str| Error::ParseValue {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if trimmed.is_empty() {
            return Err(fail("empty input"));
        }
        let mut sc = Scanner {
            bytes: trimmed.as_bytes(),
            pos: 0,
        };
        let (first, first_imag) = sc.term(false).map_err(|e| fail(&e))?;
        if sc.pos == sc.bytes.len() {
            return Ok(if first_imag {
                GaussianRational::new(Rational::zero(), first)
            } else {
                GaussianRational::from_rational(first)
            });
        }
        if first_imag {
            return Err(fail("imaginary part must come last"));
        }
        let (second, second_imag) = sc.term(true).map_err(|e| fail(&e))?;
        if !second_imag {
            return Err(fail("second term must be imaginary"));
        }
        if sc.pos != sc.bytes.len() {
            return Err(fail("trailing characters"));
        }
        Ok(GaussianRational::new(first, second))
    }
}
