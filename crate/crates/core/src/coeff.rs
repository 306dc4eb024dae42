//! Exact coefficient rings: rationals and rational polynomials in the time
//! parameter `t`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::Rng;

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Small random rational with numerator in `-span..=span` and denominator in `1..=den`.
pub fn random_rational<R: Rng>(rng: &mut R, span: i64, den: i64) -> Rational {
    qf(rng.gen_range(-span..=span), rng.gen_range(1..=den))
}

/// Additive group structure shared by ring coefficients and linear forms.
pub trait Additive: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn neg(&self) -> Self;
    fn scale(&self, s: &Rational) -> Self;

    fn sub_assign_ref(&mut self, other: &Self) {
        self.add_assign_ref(&other.neg());
    }
}

/// Commutative ring containing the rationals.
pub trait Coeff: Additive {
    fn one() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_rational(r: Rational) -> Self;
}

impl Additive for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn scale(&self, s: &Rational) -> Self {
        self * s
    }
}

impl Coeff for Rational {
    fn one() -> Self {
        num_traits::One::one()
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
}

/// Polynomial in `t` with rational coefficients, lowest degree first and no
/// trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TPoly {
    coeffs: Vec<Rational>,
}

impl TPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Additive::is_zero) {
            coeffs.pop();
        }
        TPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        TPoly::new(vec![c])
    }

    /// The monomial `c t^d`.
    pub fn monomial(c: Rational, d: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); d + 1];
        coeffs[d] = c;
        TPoly::new(coeffs)
    }

    pub fn t() -> Self {
        TPoly::monomial(q(1), 1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, d: usize) -> Rational {
        self.coeffs.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> TPoly {
        TPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(d, c)| c * q(d as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at `t = 0`.
    pub fn integral(&self) -> TPoly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (d, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / q(d as i64 + 1));
        }
        TPoly::new(coeffs)
    }

    /// `∫_a^b p(s) ds`.
    pub fn definite_integral(&self, a: &Rational, b: &Rational) -> Rational {
        let anti = self.integral();
        anti.eval(b) - anti.eval(a)
    }

    /// Composition `p(s(t))`.
    pub fn compose(&self, inner: &TPoly) -> TPoly {
        let mut acc = TPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner);
            acc.add_assign_ref(&TPoly::constant(c.clone()));
        }
        acc
    }
}

impl Additive for TPoly {
    fn zero() -> Self {
        TPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(Additive::is_zero) {
            self.coeffs.pop();
        }
    }
    fn neg(&self) -> Self {
        TPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
    fn scale(&self, s: &Rational) -> Self {
        if Additive::is_zero(s) {
            return TPoly::zero();
        }
        TPoly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }
}

impl Coeff for TPoly {
    fn one() -> Self {
        TPoly::constant(q(1))
    }
    fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return TPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Additive::is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        TPoly::new(out)
    }
    fn from_rational(r: Rational) -> Self {
        TPoly::constant(r)
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if Additive::is_zero(c) {
                continue;
            }
            if !first {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match d {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}·t")?,
                _ => write!(f, "{a}·t^{d}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_of_t_is_half_t_squared() {
        let p = TPoly::t().integral();
        assert_eq!(p, TPoly::monomial(qf(1, 2), 2));
        assert_eq!(p.derivative(), TPoly::t());
    }

    #[test]
    fn definite_integral_backward() {
        // ∫_t^1 s ds at t = 0 is 1/2
        let p = TPoly::t();
        assert_eq!(p.definite_integral(&q(0), &q(1)), qf(1, 2));
    }

    #[test]
    fn compose_and_eval_agree() {
        let p = TPoly::new(vec![q(1), q(2), q(3)]);
        let s = TPoly::new(vec![qf(1, 2), q(1)]);
        let pc = p.compose(&s);
        for t in [q(0), qf(1, 3), q(2)] {
            assert_eq!(pc.eval(&t), p.eval(&s.eval(&t)));
        }
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let mut a = TPoly::t();
        a.add_assign_ref(&TPoly::t().neg());
        assert!(a.is_zero());
        assert_eq!(a.degree(), None);
    }
}
