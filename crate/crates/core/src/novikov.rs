//! Truncated universal Novikov ring: finite sums `Σ aᵢ T^{λᵢ}` with exact
//! rational exponents, cut off at a fixed energy `E_max`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Signed;

use crate::coeff::{q, Additive, Coeff, Rational, TPoly};
use crate::error::{Error, Result};

/// Nonnegative exact energy (symplectic area of a class).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Energy(Rational);

impl Energy {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Domain(format!("negative energy {value}")));
        }
        Ok(Energy(value))
    }

    pub fn zero() -> Self {
        Energy(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Valuation of a Novikov element; the zero element has infinite valuation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Valuation {
    Finite(Rational),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

/// Submonoid of `ℚ≥0` generated by finitely many positive energies, seen
/// below a truncation level.
#[derive(Clone, PartialEq, Debug)]
pub struct EnergyMonoid {
    generators: Vec<Rational>,
    emax: Rational,
}

impl EnergyMonoid {
    pub fn new(mut generators: Vec<Rational>, emax: Rational) -> Result<Self> {
        if !emax.is_positive() {
            return Err(Error::Config(format!("E_max must be positive, got {emax}")));
        }
        if let Some(g) = generators.iter().find(|g| !g.is_positive()) {
            return Err(Error::Config(format!("monoid generator {g} is not positive")));
        }
        generators.sort();
        generators.dedup();
        Ok(EnergyMonoid { generators, emax })
    }

    pub fn generators(&self) -> &[Rational] {
        &self.generators
    }

    pub fn emax(&self) -> &Rational {
        &self.emax
    }

    /// All monoid elements strictly below `E_max`, sorted, starting at 0.
    pub fn elements(&self) -> Vec<Rational> {
        let mut found = vec![Rational::zero()];
        let mut frontier = vec![Rational::zero()];
        while let Some(e) = frontier.pop() {
            for g in &self.generators {
                let s = &e + g;
                if s < self.emax && !found.contains(&s) {
                    found.push(s.clone());
                    frontier.push(s);
                }
            }
        }
        found.sort();
        found
    }

    pub fn contains(&self, e: &Rational) -> bool {
        self.elements().contains(e)
    }
}

/// Finite Novikov sum `Σ aᵢ T^{λᵢ}` truncated strictly below `emax`.
///
/// Coefficients live in `C` (rationals, or polynomials in `t` for families).
/// Exponents are usually nonnegative (elements of `Λ₀`); negative exponents
/// are allowed so that Laurent evaluations in `Λ` can be represented.
#[derive(Clone, PartialEq)]
pub struct Novikov<C> {
    terms: BTreeMap<Rational, C>,
    emax: Rational,
}

pub type NovikovScalar = Novikov<Rational>;
pub type NovikovPoly = Novikov<TPoly>;

impl<C: Coeff> Novikov<C> {
    pub fn zero(emax: &Rational) -> Self {
        Novikov { terms: BTreeMap::new(), emax: emax.clone() }
    }

    pub fn constant(c: C, emax: &Rational) -> Self {
        Novikov::monomial(c, Rational::zero(), emax)
    }

    pub fn one(emax: &Rational) -> Self {
        Novikov::constant(C::one(), emax)
    }

    /// `c T^{exponent}`, or zero when the exponent is at or above `emax`.
    pub fn monomial(c: C, exponent: Rational, emax: &Rational) -> Self {
        let mut out = Novikov::zero(emax);
        out.add_term(exponent, &c);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, C)>>(terms: I, emax: &Rational) -> Self {
        let mut out = Novikov::zero(emax);
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    pub fn emax(&self) -> &Rational {
        &self.emax
    }

    pub fn terms(&self) -> &BTreeMap<Rational, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `T^e`.
    pub fn coeff(&self, e: &Rational) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    /// Adds `c T^e`, dropping it if `e ≥ emax`.
    pub fn add_term(&mut self, e: Rational, c: &C) {
        if e >= self.emax || c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(e.clone()).or_insert_with(C::zero);
            slot.add_assign_ref(c);
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.keys().next() {
            Some(e) => Valuation::Finite(e.clone()),
            None => Valuation::Infinite,
        }
    }

    /// True when every exponent is nonnegative.
    pub fn in_lambda0(&self) -> bool {
        self.terms.keys().all(|e| !e.is_negative())
    }

    /// True when every exponent is strictly positive.
    pub fn in_lambda_plus(&self) -> bool {
        self.terms.keys().all(|e| e.is_positive())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.emax != other.emax {
            return Err(Error::Config(format!(
                "mixed truncation levels {} and {}",
                self.emax, other.emax
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Novikov::zero(&self.emax);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= self.emax {
                    // exponents are sorted, the rest of this row is above the cut
                    break;
                }
                out.add_term(e, &ca.mul(cb));
            }
        }
        out
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.emax, other.emax, "mixed truncation levels");
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c);
        }
    }

    pub fn neg(&self) -> Self {
        Novikov {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            emax: self.emax.clone(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Novikov::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), c.scale(s))), &self.emax)
    }

    pub fn scale_coeff(&self, s: &C) -> Self {
        Novikov::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), c.mul(s))), &self.emax)
    }

    /// Multiplication by `T^e`.
    pub fn shift(&self, e: &Rational) -> Self {
        Novikov::from_terms(self.terms.iter().map(|(x, c)| (x + e, c.clone())), &self.emax)
    }

    /// Keeps exactly the terms with exponent strictly below `e`.
    pub fn truncate(&self, e: &Rational) -> Self {
        Novikov {
            terms: self.terms.range(..e.clone()).map(|(x, c)| (x.clone(), c.clone())).collect(),
            emax: self.emax.clone(),
        }
    }

    /// Same element viewed with a different truncation level.
    pub fn with_emax(&self, emax: &Rational) -> Self {
        Novikov::from_terms(self.terms.clone(), emax)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Novikov::one(&self.emax);
        for _ in 0..k {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// `Σ_k x^k / k!`; requires strictly positive valuation so the series
    /// terminates below `emax`.
    pub fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Novikov::one(&self.emax));
        }
        let v = self.terms.keys().next().cloned().unwrap_or_default();
        if !v.is_positive() {
            return Err(Error::Domain(format!(
                "exp needs positive valuation, got {v}; split off the constant part"
            )));
        }
        let mut acc = Novikov::one(&self.emax);
        let mut term = Novikov::one(&self.emax);
        let mut k = 1i64;
        loop {
            term = term.mul_unchecked(self).scale(&(q(1) / q(k)));
            if term.is_zero() {
                break;
            }
            acc.add_assign_ref(&term);
            k += 1;
        }
        Ok(acc)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Novikov<D> {
        Novikov::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), f(c))), &self.emax)
    }
}

impl NovikovPoly {
    /// Evaluation of every coefficient at `t`.
    pub fn eval_t(&self, t: &Rational) -> NovikovScalar {
        self.map_coeffs(|p| p.eval(t))
    }

    /// Coefficient-wise `d/dt`.
    pub fn derivative(&self) -> NovikovPoly {
        self.map_coeffs(TPoly::derivative)
    }

    /// True when every coefficient is constant in `t`.
    pub fn is_constant_in_t(&self) -> bool {
        self.terms.values().all(TPoly::is_constant)
    }

    pub fn from_scalar(x: &NovikovScalar) -> NovikovPoly {
        x.map_coeffs(|c| TPoly::constant(c.clone()))
    }
}

impl<C: fmt::Debug> fmt::Debug for Novikov<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(e, c)| (e.to_string(), c))).finish()
    }
}

impl<C: fmt::Display> fmt::Display for Novikov<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_string();
                let c = if c.contains(' ') { format!("({c})") } else { c };
                if e.is_zero() {
                    c
                } else {
                    format!("{c}·T^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a, C: Coeff> $tr<&'a Novikov<C>> for &'a Novikov<C> {
            type Output = Novikov<C>;
            /// Panics on mixed truncation levels; use the `checked_*` methods
            /// when the inputs come from different sources.
            fn $method(self, rhs: &'a Novikov<C>) -> Novikov<C> {
                assert_eq!(self.emax, rhs.emax, "mixed truncation levels");
                let f: fn(&Novikov<C>, &Novikov<C>) -> Novikov<C> = $body;
                f(self, rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let mut out = a.clone();
    out.add_assign_ref(b);
    out
});
binop!(Sub, sub, |a, b| {
    let mut out = a.clone();
    out.add_assign_ref(&b.neg());
    out
});
binop!(Mul, mul, |a, b| a.mul_unchecked(b));

impl<C: Coeff> Neg for &Novikov<C> {
    type Output = Novikov<C>;
    fn neg(self) -> Novikov<C> {
        Novikov::neg(self)
    }
}

/// Vector in `C̄ ⊗ Λ`: one Novikov coefficient per basis element.
#[derive(Clone, PartialEq, Debug)]
pub struct NovVec<C> {
    comps: Vec<Novikov<C>>,
}

pub type NovVecScalar = NovVec<Rational>;
pub type NovVecPoly = NovVec<TPoly>;

impl<C: Coeff> NovVec<C> {
    pub fn zero(dim: usize, emax: &Rational) -> Self {
        NovVec { comps: vec![Novikov::zero(emax); dim] }
    }

    pub fn from_comps(comps: Vec<Novikov<C>>) -> Self {
        NovVec { comps }
    }

    /// `T^e · v` for a plain coefficient vector `v`.
    pub fn from_level(v: &[C], e: &Rational, emax: &Rational) -> Self {
        NovVec {
            comps: v.iter().map(|c| Novikov::monomial(c.clone(), e.clone(), emax)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Novikov<C>] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Novikov<C> {
        &self.comps[i]
    }

    pub fn comp_mut(&mut self, i: usize) -> &mut Novikov<C> {
        &mut self.comps[i]
    }

    pub fn emax(&self) -> &Rational {
        self.comps[0].emax()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Novikov::is_zero)
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.add_assign_ref(b);
        }
    }

    pub fn neg(&self) -> Self {
        NovVec { comps: self.comps.iter().map(Novikov::neg).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        NovVec { comps: self.comps.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn mul_scalar(&self, s: &Novikov<C>) -> Self {
        NovVec { comps: self.comps.iter().map(|c| c * s).collect() }
    }

    pub fn shift(&self, e: &Rational) -> Self {
        NovVec { comps: self.comps.iter().map(|c| c.shift(e)).collect() }
    }

    pub fn truncate(&self, e: &Rational) -> Self {
        NovVec { comps: self.comps.iter().map(|c| c.truncate(e)).collect() }
    }

    pub fn valuation(&self) -> Valuation {
        self.comps.iter().map(Novikov::valuation).min().unwrap_or(Valuation::Infinite)
    }

    /// All exponents occurring in some component, sorted.
    pub fn levels(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> =
            self.comps.iter().flat_map(|c| c.terms().keys().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// The coefficient vector of `T^e`.
    pub fn level(&self, e: &Rational) -> Vec<C> {
        self.comps.iter().map(|c| c.coeff(e)).collect()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> NovVec<D> {
        NovVec { comps: self.comps.iter().map(|c| c.map_coeffs(f)).collect() }
    }
}

impl NovVecPoly {
    pub fn eval_t(&self, t: &Rational) -> NovVecScalar {
        self.map_coeffs(|p| p.eval(t))
    }

    pub fn from_scalar(v: &NovVecScalar) -> NovVecPoly {
        v.map_coeffs(|c| TPoly::constant(c.clone()))
    }

    pub fn derivative(&self) -> NovVecPoly {
        self.map_coeffs(TPoly::derivative)
    }

    pub fn integral(&self) -> NovVecPoly {
        self.map_coeffs(TPoly::integral)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qf;

    fn nov(terms: &[(Rational, Rational)], emax: &Rational) -> NovikovScalar {
        Novikov::from_terms(terms.iter().cloned().map(|(c, e)| (e, c)), emax)
    }

    #[test]
    fn monomial_distribution() {
        let emax = q(10);
        let a = nov(&[(q(2), qf(1, 2))], &emax);
        let b = nov(&[(q(3), qf(1, 2)), (q(1), q(1))], &emax);
        assert_eq!(&a * &b, nov(&[(q(6), q(1)), (q(2), qf(3, 2))], &emax));
    }

    #[test]
    fn additive_inverse() {
        let emax = q(3);
        let x = nov(&[(q(4), q(0)), (qf(-2, 3), qf(1, 2))], &emax);
        assert!((&x + &x.neg()).is_zero());
    }

    #[test]
    fn truncation_drops_top_term() {
        let emax = q(2);
        let a = nov(&[(q(1), q(0)), (q(1), q(1))], &emax);
        assert_eq!(&a * &a, nov(&[(q(1), q(0)), (q(2), q(1))], &emax));
    }

    #[test]
    fn valuation_examples() {
        let emax = q(5);
        let a = nov(&[(q(3), qf(7, 10)), (q(1), qf(6, 5))], &emax);
        assert_eq!(a.valuation(), Valuation::Finite(qf(7, 10)));
        assert_eq!(NovikovScalar::zero(&emax).valuation(), Valuation::Infinite);
        assert_eq!(NovikovScalar::constant(q(5), &emax).valuation(), Valuation::Finite(q(0)));
    }

    #[test]
    fn truncate_examples() {
        let emax = q(5);
        let a = nov(&[(q(6), q(1)), (q(2), qf(3, 2))], &emax);
        assert_eq!(a.truncate(&qf(3, 2)), nov(&[(q(6), q(1))], &emax));
        let x = nov(&[(q(1), qf(1, 3))], &emax);
        assert!(x.truncate(&q(0)).is_zero());
        let c = nov(&[(q(1), q(0)), (q(1), q(2))], &emax);
        assert_eq!(c.truncate(&q(1)), nov(&[(q(1), q(0))], &emax));
    }

    #[test]
    fn exp_examples() {
        let emax = qf(6, 5);
        let x = nov(&[(q(1), qf(1, 2))], &emax);
        assert_eq!(
            x.exp().unwrap(),
            nov(&[(q(1), q(0)), (q(1), qf(1, 2)), (qf(1, 2), q(1))], &emax)
        );
        assert_eq!(NovikovScalar::zero(&emax).exp().unwrap(), NovikovScalar::one(&emax));

        // exp(2T) at E_max = 5/2, Taylor oracle: Σ (2T)^k / k! = 1 + 2T + 2T² + ...
        let emax = qf(5, 2);
        let x = nov(&[(q(2), q(1))], &emax);
        let mut oracle = NovikovScalar::zero(&emax);
        let mut fact = q(1);
        for k in 0..4i64 {
            if k > 0 {
                fact *= q(k);
            }
            oracle.add_term(q(k), &(q(2i64.pow(k as u32)) / &fact));
        }
        assert_eq!(x.exp().unwrap(), oracle);
        assert_eq!(oracle, nov(&[(q(1), q(0)), (q(2), q(1)), (q(2), q(2))], &emax));
    }

    #[test]
    fn exp_rejects_unit_part() {
        let emax = q(2);
        let x = nov(&[(q(1), q(0))], &emax);
        assert!(matches!(x.exp(), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_emax_is_config_error() {
        let a = NovikovScalar::one(&q(1));
        let b = NovikovScalar::one(&q(2));
        assert!(matches!(a.checked_add(&b), Err(Error::Config(_))));
        assert!(matches!(a.checked_mul(&b), Err(Error::Config(_))));
    }

    #[test]
    fn monoid_elements_below_cut() {
        let m = EnergyMonoid::new(vec![q(1), qf(3, 2)], q(3)).unwrap();
        assert_eq!(m.elements(), vec![q(0), q(1), qf(3, 2), q(2), qf(5, 2)]);
        assert!(m.contains(&qf(5, 2)));
        assert!(!m.contains(&qf(1, 2)));
    }
}
