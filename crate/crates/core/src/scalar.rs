//! Exact coefficient arithmetic.
//!
//! Every coefficient in the system lives in Q(sqrt2, sqrt3)(i): arbitrary-precision
//! rationals extended by sqrt(2) and sqrt(3), then complexified. The field is
//! closed under all arithmetic the analysis performs, so rank decisions are
//! exact — there is no floating point anywhere.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Arbitrary-precision rational. `num_rational` keeps it reduced with a
/// positive denominator, which is exactly the canonical form we need.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for a rational n/d (d != 0).
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarError {
    DivisionByZero,
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

impl std::error::Error for ScalarError {}

// =============================================================================
// Surd: the real quadratic extension Q(sqrt2, sqrt3)
// =============================================================================

/// An element a + b*sqrt(2) + c*sqrt(3) + d*sqrt(6) of Q(sqrt2, sqrt3).
///
/// The representation over the basis {1, sqrt2, sqrt3, sqrt6} is unique, so
/// structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Surd {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Surd { a, b, c, d }
    }

    pub fn zero() -> Self {
        Surd::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Surd::from_rational(Rational::one())
    }

    pub fn from_rational(a: Rational) -> Self {
        Surd {
            a,
            b: Rational::zero(),
            c: Rational::zero(),
            d: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(rat_int(n))
    }

    pub fn sqrt2() -> Self {
        Surd {
            a: Rational::zero(),
            b: Rational::one(),
            c: Rational::zero(),
            d: Rational::zero(),
        }
    }

    pub fn sqrt3() -> Self {
        Surd {
            a: Rational::zero(),
            b: Rational::zero(),
            c: Rational::one(),
            d: Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    /// True if the element lies in Q (no radical components).
    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Galois conjugate flipping the sign of sqrt(2) (and hence sqrt(6)).
    fn conj_sqrt2(&self) -> Self {
        Surd {
            a: self.a.clone(),
            b: -self.b.clone(),
            c: self.c.clone(),
            d: -self.d.clone(),
        }
    }

    /// Galois conjugate flipping the sign of sqrt(3) (and hence sqrt(6)).
    fn conj_sqrt3(&self) -> Self {
        Surd {
            a: self.a.clone(),
            b: self.b.clone(),
            c: -self.c.clone(),
            d: -self.d.clone(),
        }
    }

    /// Multiplicative inverse. The product of the three nontrivial Galois
    /// conjugates clears the radicals from the denominator.
    pub fn inv(&self) -> Result<Surd, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let s2 = self.conj_sqrt2();
        let s3 = self.conj_sqrt3();
        let s23 = s2.conj_sqrt3();
        let adj = &(&s2 * &s3) * &s23;
        let norm = self * &adj;
        debug_assert!(norm.is_rational(), "field norm must be rational");
        debug_assert!(!norm.a.is_zero(), "nonzero element has nonzero norm");
        let scale = norm.a.recip();
        Ok(adj.scale(&scale))
    }

    pub fn scale(&self, r: &Rational) -> Surd {
        Surd {
            a: &self.a * r,
            b: &self.b * r,
            c: &self.c * r,
            d: &self.d * r,
        }
    }

    /// Float approximation, used by tests as an independent cross-check.
    pub fn approx(&self) -> f64 {
        fn f(r: &Rational) -> f64 {
            let n = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let d = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            n / d
        }
        f(&self.a) + f(&self.b) * 2f64.sqrt() + f(&self.c) * 3f64.sqrt() + f(&self.d) * 6f64.sqrt()
    }

    /// Grammar-compatible atoms: each entry is a product like `-1/2*sqrt(2)`.
    fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (coef, radical) in [
            (&self.a, None),
            (&self.b, Some("sqrt(2)")),
            (&self.c, Some("sqrt(3)")),
            (&self.d, Some("sqrt(2)*sqrt(3)")),
        ] {
            if coef.is_zero() {
                continue;
            }
            out.push(render_atom(coef, radical, false));
        }
        out
    }
}

fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One product atom `q * radical * i`, omitting unit factors.
fn render_atom(coef: &Rational, radical: Option<&str>, imaginary: bool) -> String {
    let mut factors: Vec<String> = Vec::new();
    let abs_one = coef.numer().abs() == BigInt::one() && coef.denom().is_one();
    if !abs_one || (radical.is_none() && !imaginary) {
        factors.push(render_rational(coef));
    } else if coef.is_negative() {
        factors.push("-1".to_string());
    }
    if let Some(r) = radical {
        factors.push(r.to_string());
    }
    if imaginary {
        factors.push("i".to_string());
    }
    let mut s = factors.join("*");
    // fold a leading "-1*" into a simple minus sign
    if let Some(rest) = s.strip_prefix("-1*") {
        s = format!("-{rest}");
    }
    s
}

fn join_atoms(atoms: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (k, atom) in atoms.iter().enumerate() {
        if k == 0 {
            write!(f, "{atom}")?;
        } else if let Some(rest) = atom.strip_prefix('-') {
            write!(f, " - {rest}")?;
        } else {
            write!(f, " + {atom}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        join_atoms(&self.atoms(), f)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        Surd {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            c: &self.c + &rhs.c,
            d: &self.d + &rhs.d,
        }
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        Surd {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            c: &self.c - &rhs.c,
            d: &self.d - &rhs.d,
        }
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            a: -self.a.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: -self.d.clone(),
        }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    /// Basis products: sqrt2*sqrt3 = sqrt6, sqrt2*sqrt6 = 2*sqrt3,
    /// sqrt3*sqrt6 = 3*sqrt2, sqrt6*sqrt6 = 6.
    fn mul(self, rhs: &Surd) -> Surd {
        // radical-free operands dominate in practice
        if self.is_rational() {
            return rhs.scale(&self.a);
        }
        if rhs.is_rational() {
            return self.scale(&rhs.a);
        }
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&rhs.a, &rhs.b, &rhs.c, &rhs.d);
        let two = rat_int(2);
        let three = rat_int(3);
        let six = rat_int(6);
        Surd {
            a: a1 * a2 + &two * (b1 * b2) + &three * (c1 * c2) + &six * (d1 * d2),
            b: a1 * b2 + b1 * a2 + &three * (c1 * d2 + d1 * c2),
            c: a1 * c2 + c1 * a2 + &two * (b1 * d2 + d1 * b2),
            d: a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        }
    }
}

macro_rules! forward_owned_binop {
    ($t:ty, $trait:ident, $method:ident) => {
        impl $trait for $t {
            type Output = $t;
            fn $method(self, rhs: $t) -> $t {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Surd, Add, add);
forward_owned_binop!(Surd, Sub, sub);
forward_owned_binop!(Surd, Mul, mul);

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        -&self
    }
}

// =============================================================================
// Complex: the complexification
// =============================================================================

/// A complex number re + im*i with both parts in Q(sqrt2, sqrt3).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Complex {
    pub re: Surd,
    pub im: Surd,
}

impl Complex {
    pub fn new(re: Surd, im: Surd) -> Self {
        Complex { re, im }
    }

    pub fn zero() -> Self {
        Complex::new(Surd::zero(), Surd::zero())
    }

    pub fn one() -> Self {
        Complex::new(Surd::one(), Surd::zero())
    }

    pub fn i() -> Self {
        Complex::new(Surd::zero(), Surd::one())
    }

    pub fn from_surd(re: Surd) -> Self {
        Complex::new(re, Surd::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        Complex::from_surd(Surd::from_rational(r))
    }

    pub fn from_int(n: i64) -> Self {
        Complex::from_surd(Surd::from_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re.clone(), -&self.im)
    }

    /// x * conj(x); always real.
    pub fn norm_sqr(&self) -> Surd {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Result<Complex, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n_inv = self.norm_sqr().inv()?;
        let c = self.conj();
        Ok(Complex::new(&c.re * &n_inv, &c.im * &n_inv))
    }

    pub fn scale_surd(&self, s: &Surd) -> Complex {
        Complex::new(&self.re * s, &self.im * s)
    }

    /// Float approximation (re, im) for test cross-checks.
    pub fn approx(&self) -> (f64, f64) {
        (self.re.approx(), self.im.approx())
    }

    /// Grammar-compatible product atoms for the expression printer.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = self.re.atoms();
        for (coef, radical) in [
            (&self.im.a, None),
            (&self.im.b, Some("sqrt(2)")),
            (&self.im.c, Some("sqrt(3)")),
            (&self.im.d, Some("sqrt(2)*sqrt(3)")),
        ] {
            if coef.is_zero() {
                continue;
            }
            out.push(render_atom(coef, radical, true));
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_rational() && self.re.a.is_one()
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        join_atoms(&self.atoms(), f)
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        if self.im.is_zero() {
            return Complex::new(&self.re * &rhs.re, &self.re * &rhs.im);
        }
        if rhs.im.is_zero() {
            return Complex::new(&self.re * &rhs.re, &self.im * &rhs.re);
        }
        Complex::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

forward_owned_binop!(Complex, Add, add);
forward_owned_binop!(Complex, Sub, sub);
forward_owned_binop!(Complex, Mul, mul);

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Surd {
        Surd::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
    }

    #[test]
    fn difference_of_squares() {
        // (1 + sqrt2)(-1 + sqrt2) = 1
        let x = surd((1, 1), (1, 1), (0, 1), (0, 1));
        let y = surd((-1, 1), (1, 1), (0, 1), (0, 1));
        assert_eq!(&x * &y, Surd::one());
    }

    #[test]
    fn sqrt2_times_sqrt3_is_sqrt6() {
        let p = &Surd::sqrt2() * &Surd::sqrt3();
        assert_eq!(p, surd((0, 1), (0, 1), (0, 1), (1, 1)));
    }

    #[test]
    fn square_of_one_plus_sqrt2_plus_sqrt3() {
        // (1 + sqrt2 + sqrt3)^2 = 6 + 2*sqrt2 + 2*sqrt3 + 2*sqrt6,
        // cross-checked against the float expansion.
        let x = surd((1, 1), (1, 1), (1, 1), (0, 1));
        let sq = &x * &x;
        assert_eq!(sq, surd((6, 1), (2, 1), (2, 1), (2, 1)));
        let expect = x.approx() * x.approx();
        assert!((sq.approx() - expect).abs() < 1e-9);
    }

    #[test]
    fn inverse_of_sqrt2() {
        let inv = Surd::sqrt2().inv().unwrap();
        assert_eq!(inv, surd((0, 1), (1, 2), (0, 1), (0, 1)));
    }

    #[test]
    fn inverse_of_two() {
        assert_eq!(Surd::from_int(2).inv().unwrap(), surd((1, 2), (0, 1), (0, 1), (0, 1)));
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        let x = surd((1, 1), (1, 1), (0, 1), (0, 1));
        let inv = x.inv().unwrap();
        assert_eq!(inv, surd((-1, 1), (1, 1), (0, 1), (0, 1)));
        assert_eq!(&x * &inv, Surd::one());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(Surd::zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(Complex::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn complex_inverse_of_i() {
        let inv = Complex::i().inv().unwrap();
        assert_eq!(inv, -&Complex::i());
    }

    #[test]
    fn complex_inverse_of_half_over_i() {
        // 1/(2i) = -i/2; its inverse is 2i.
        let half_i = Complex::new(Surd::zero(), Surd::from_rational(rat(-1, 2)));
        let inv = half_i.inv().unwrap();
        assert_eq!(inv, Complex::new(Surd::zero(), Surd::from_int(2)));
    }

    #[test]
    fn complex_inverse_with_radical() {
        // inv(1 + i*sqrt2) = (1 - i*sqrt2)/3
        let x = Complex::new(Surd::one(), Surd::sqrt2());
        let inv = x.inv().unwrap();
        let expect = Complex::new(
            Surd::from_rational(rat(1, 3)),
            Surd::new(rat(0, 1), rat(-1, 3), rat(0, 1), rat(0, 1)),
        );
        assert_eq!(inv, expect);
        assert_eq!(&x * &inv, Complex::one());
    }

    #[test]
    fn conjugation_is_involutive_ring_map() {
        let x = Complex::new(surd((1, 2), (1, 1), (0, 1), (2, 3)), Surd::sqrt3());
        let y = Complex::new(Surd::from_int(-3), surd((0, 1), (1, 5), (1, 1), (0, 1)));
        assert_eq!(x.conj().conj(), x);
        assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
    }

    #[test]
    fn norm_sqr_is_real() {
        let x = Complex::new(surd((1, 2), (1, 1), (0, 1), (2, 3)), Surd::sqrt3());
        let n = &x * &x.conj();
        assert!(n.im.is_zero());
        assert_eq!(n.re, x.norm_sqr());
    }

    #[test]
    fn display_round_trip_examples() {
        assert_eq!(Surd::from_rational(rat(-1, 2)).to_string(), "-1/2");
        assert_eq!(Complex::i().to_string(), "i");
        assert_eq!((-&Complex::i()).to_string(), "-i");
        let x = Complex::new(surd((1, 1), (-1, 2), (0, 1), (0, 1)), Surd::one());
        assert_eq!(x.to_string(), "1 - 1/2*sqrt(2) + i");
    }
}
