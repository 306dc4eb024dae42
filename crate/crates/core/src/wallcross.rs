//! Wall crossing: sphere counts correct `m₋₁` along a pseudo-isotopy, and the
//! potential jumps by `Σ T^{α∩ω} n(α)`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::ainf::ClassKey;
use crate::coeff::{q, random_rational, Additive, Rational, TPoly};
use crate::error::{Error, Result};
use crate::novikov::{Novikov, NovVecScalar, NovikovScalar};
use crate::pseudoiso::{check_isotopy, transport_mc, TimeFamily};
use crate::superpotential::psi;

/// One sphere class: energy, count, optional time profile and image disc class.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereClass {
    pub name: String,
    pub energy: Rational,
    pub count: Rational,
    /// `n(t)` with `n(0) = 0` and `n(1) = count`; `count·t` when absent.
    pub profile: Option<TPoly>,
    pub target: ClassKey,
}

impl SphereClass {
    pub fn profile(&self) -> TPoly {
        self.profile.clone().unwrap_or_else(|| TPoly::monomial(self.count.clone(), 1))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SphereCountData {
    pub classes: Vec<SphereClass>,
}

impl SphereCountData {
    pub fn new(classes: Vec<SphereClass>) -> Result<Self> {
        let data = SphereCountData { classes };
        let problems = data.validate();
        if !problems.is_empty() {
            return Err(Error::Invalid(problems.join("; ")));
        }
        Ok(data)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.classes {
            if c.energy != c.target.energy {
                out.push(format!("{}: energy {} differs from its image {}", c.name, c.energy, c.target));
            }
            if let Some(p) = &c.profile {
                if !p.eval(&q(0)).is_zero() {
                    out.push(format!("{}: profile does not start at 0", c.name));
                }
                if p.eval(&q(1)) != c.count {
                    out.push(format!("{}: profile ends at {} instead of {}", c.name, p.eval(&q(1)), c.count));
                }
            }
        }
        out
    }

    /// `Δ(β)` for every image class.
    pub fn deltas(&self) -> BTreeMap<ClassKey, Rational> {
        let mut out: BTreeMap<ClassKey, Rational> = BTreeMap::new();
        for c in &self.classes {
            *out.entry(c.target.clone()).or_insert_with(Rational::zero) += &c.count;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// `Σ_α T^{α∩ω} n(α)`.
    pub fn jump(&self, emax: &Rational) -> NovikovScalar {
        let mut out = Novikov::zero(emax);
        for c in &self.classes {
            out.add_term(c.energy.clone(), &c.count);
        }
        out
    }
}

/// `Δ(β) = Σ_{α: i_*(α) = β} n(α)`.
pub fn delta_beta(counts: &SphereCountData, beta: &ClassKey) -> Rational {
    counts
        .classes
        .iter()
        .filter(|c| &c.target == beta)
        .fold(Rational::zero(), |acc, c| acc + &c.count)
}

/// Adds each sphere profile to `m^t₋₁` at its image class.
pub fn corrected_isotopy(f: &TimeFamily, counts: &SphereCountData) -> Result<TimeFamily> {
    let problems = counts.validate();
    if !problems.is_empty() {
        return Err(Error::Invalid(problems.join("; ")));
    }
    let mut out = f.clone();
    for c in &counts.classes {
        if c.target.energy >= *f.emax() || !c.target.energy.is_positive_rational() {
            return Err(Error::Domain(format!("{}: image class {} is outside (0, E_max)", c.name, c.target)));
        }
        let slot = out.minus1_mut().entry(c.target.clone()).or_insert_with(TPoly::zero);
        slot.add_assign_ref(&c.profile());
        if slot.is_zero() {
            out.minus1_mut().remove(&c.target);
        }
    }
    Ok(out)
}

trait PositiveRational {
    fn is_positive_rational(&self) -> bool;
}

impl PositiveRational for Rational {
    fn is_positive_rational(&self) -> bool {
        *self > Rational::zero()
    }
}

/// Checks a corrected family: removing the sphere profiles must leave a
/// pseudo-isotopy, i.e. `dm₋₁/dt` equals the usual source plus `Σ n′(t)`.
pub fn check_corrected(f: &TimeFamily, counts: &SphereCountData) -> Vec<String> {
    let mut plain = f.clone();
    for c in &counts.classes {
        let slot = plain.minus1_mut().entry(c.target.clone()).or_insert_with(TPoly::zero);
        slot.add_assign_ref(&c.profile().neg());
        if slot.is_zero() {
            plain.minus1_mut().remove(&c.target);
        }
    }
    check_isotopy(&plain)
}

/// Both sides of `Ψ(I_*(b), J₁) − Ψ(b, J₀) = Σ T^{α∩ω} n(α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallcrossReport {
    pub psi_start: NovikovScalar,
    pub psi_end: NovikovScalar,
    pub difference: NovikovScalar,
    pub expected: NovikovScalar,
}

impl WallcrossReport {
    pub fn holds(&self) -> bool {
        self.difference == self.expected
    }
}

/// Transports `b` along the corrected family and compares the potential jump
/// with the sphere counts.
pub fn verify_wallcross(f: &TimeFamily, counts: &SphereCountData, b: &NovVecScalar) -> Result<WallcrossReport> {
    let bt = transport_mc(f, b)?;
    let start = f.slice(&q(0))?;
    let end = f.slice(&q(1))?;
    let psi_start = psi(&start, b)?;
    let psi_end = psi(&end, &bt.eval_t(&q(1)))?;
    let mut difference = psi_end.clone();
    difference.add_assign_ref(&psi_start.neg());
    Ok(WallcrossReport { psi_start, psi_end, difference, expected: counts.jump(f.emax()) })
}

/// Random counts on the given image classes, with random polynomial profiles
/// of degree ≤ 3 through `(0, 0)` and `(1, n)`.
pub fn random_counts<R: Rng>(rng: &mut R, targets: &[ClassKey], per_class: usize) -> SphereCountData {
    let mut classes = Vec::new();
    for (i, target) in targets.iter().enumerate() {
        for j in 0..per_class {
            let count = random_rational(rng, 4, 1);
            classes.push(SphereClass {
                name: format!("α{}.{}", i + 1, j + 1),
                energy: target.energy.clone(),
                count: count.clone(),
                profile: Some(random_profile(rng, &count)),
                target: target.clone(),
            });
        }
    }
    SphereCountData { classes }
}

/// `n·t + a·(t² − t) + b·(t³ − t)`.
pub fn random_profile<R: Rng>(rng: &mut R, count: &Rational) -> TPoly {
    let a = random_rational(rng, 3, 2);
    let b = random_rational(rng, 3, 2);
    TPoly::new(vec![q(0), count - &a - &b, a, b])
}
