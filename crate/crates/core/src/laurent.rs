//! Laurent form of the potential on divisor models, coordinate shifts and
//! evaluation inside the convergence window.

use std::collections::BTreeMap;

use num_traits::Signed;
use rand::Rng;

use crate::ainf::{ClassKey, ClassLabel, FilteredAInfinity, OperationTensor};
use crate::coeff::{q, random_rational, Additive, Rational};
use crate::error::{Error, Result};
use crate::graded::{GradedBasis, Pairing};
use crate::novikov::{EnergyMonoid, NovVec, NovVecScalar, Novikov, NovikovScalar, Valuation};

/// `Σ c · T^λ y^n`, truncated below `emax`; keys are `(λ, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentElement {
    terms: BTreeMap<(Rational, Vec<i64>), Rational>,
    b1: usize,
    emax: Rational,
}

impl LaurentElement {
    pub fn zero(b1: usize, emax: &Rational) -> Self {
        LaurentElement { terms: BTreeMap::new(), b1, emax: emax.clone() }
    }

    pub fn add_term(&mut self, energy: Rational, exponent: Vec<i64>, c: &Rational) {
        assert_eq!(exponent.len(), self.b1, "exponent length");
        if energy >= self.emax || c.is_zero() {
            return;
        }
        let key = (energy, exponent);
        let slot = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Rational, Vec<i64>), Rational> {
        &self.terms
    }

    pub fn b1(&self) -> usize {
        self.b1
    }

    pub fn emax(&self) -> &Rational {
        &self.emax
    }

    pub fn truncate(&self, emax: &Rational) -> Self {
        let mut out = LaurentElement::zero(self.b1, &self.emax.clone().min(emax.clone()));
        for ((e, n), c) in &self.terms {
            out.add_term(e.clone(), n.clone(), c);
        }
        out
    }

    /// Largest `|nᵢ|` over all terms, per direction.
    fn spread(&self) -> Vec<i64> {
        let mut out = vec![0; self.b1];
        for (_, n) in self.terms.keys() {
            for (o, x) in out.iter_mut().zip(n) {
                *o = (*o).max(x.abs());
            }
        }
        out
    }

    /// `δ = (least energy) / (max |nᵢ| · b₁)`: every `T^λ y^n` keeps a positive
    /// exponent when `|v(yᵢ)| < δ`. `None` when there is no `y`-dependence.
    pub fn default_window(&self) -> Option<Rational> {
        let nmax = self.spread().into_iter().max().unwrap_or(0);
        let emin = self.terms.keys().map(|(e, _)| e.clone()).min()?;
        if nmax == 0 || self.b1 == 0 {
            return None;
        }
        Some(emin / q(nmax * self.b1 as i64))
    }
}

/// Coordinate change `yᵢ ↦ T^{−cᵢ} yᵢ`, with `|cᵢ| < δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateShift {
    c: Vec<Rational>,
    delta: Rational,
}

impl CoordinateShift {
    pub fn new(c: Vec<Rational>, delta: Rational) -> Result<Self> {
        if !delta.is_positive() {
            return Err(Error::Domain(format!("window δ = {delta} must be positive")));
        }
        if let Some(x) = c.iter().find(|x| x.abs() >= delta) {
            return Err(Error::Domain(format!("shift {x} outside the window δ = {delta}")));
        }
        Ok(CoordinateShift { c, delta })
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn negate(&self) -> Self {
        CoordinateShift { c: self.c.iter().map(|x| -x).collect(), delta: self.delta.clone() }
    }
}

/// Divisor model on `H*(#ᵇ¹ S¹×S²)`: basis `1, θᵢ, σᵢ, vol` with `⟨θᵢ, σᵢ⟩ = 1`,
/// and for each class `(name, β, m₋₁,β)` the fully symmetric tensors
/// `⟨m_{k,β}(θ_{i₁}, …, θ_{i_k}), θ_{i₀}⟩ = m₋₁,β · Π_j ∂_{i_j}β / k!`, `k ≤ kmax`.
/// All composites vanish, so the relations hold by construction.
pub fn divisor_model(
    b1: usize,
    classes: &[(String, ClassKey, Rational)],
    emax: Rational,
    kmax: usize,
) -> Result<FilteredAInfinity> {
    let mut elements = vec![("1".to_string(), 0)];
    elements.extend((1..=b1).map(|i| (format!("θ{i}"), 1)));
    elements.extend((1..=b1).map(|i| (format!("σ{i}"), 2)));
    elements.push(("vol".to_string(), 3));
    let n = elements.len();
    let mut p = vec![vec![Rational::zero(); n]; n];
    p[0][n - 1] = q(1);
    p[n - 1][0] = q(1);
    for i in 1..=b1 {
        // graded symmetry: ⟨σ, θ⟩ = (−1)^{1·2}⟨θ, σ⟩
        p[i][b1 + i] = q(1);
        p[b1 + i][i] = q(1);
    }
    let mut gens: Vec<Rational> = classes.iter().map(|(_, k, _)| k.energy.clone()).collect();
    gens.sort();
    gens.dedup();
    let monoid = EnergyMonoid::new(gens, emax)?;
    let basis = GradedBasis::new(elements, 3)?;
    let mut s = FilteredAInfinity::new(basis, Pairing::new(p), monoid, kmax, b1)?;
    s.make_inhomogeneous();
    for (name, key, m) in classes {
        if key.b1() != b1 {
            return Err(Error::Dimension { expected: b1, got: key.b1() });
        }
        s.add_class(ClassLabel::new(name.clone(), key.clone()))?;
        s.set_minus1(key.clone(), m.clone());
        for k in 0..=kmax {
            let mut entries = BTreeMap::new();
            let mut factorial = q(1);
            for j in 1..=k {
                factorial *= q(j as i64);
            }
            for tuple in tuples(b1, k + 1) {
                let prod = tuple.iter().fold(m.clone(), |acc, &i| acc * q(key.boundary[i]));
                if !prod.is_zero() {
                    entries.insert(tuple.iter().map(|i| i + 1).collect(), prod / &factorial);
                }
            }
            let op = OperationTensor::from_entries(k, entries, s.pairing())?;
            s.set_op(key.clone(), op)?;
        }
    }
    Ok(s)
}

fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |i| {
                    let mut u = t.clone();
                    u.push(i);
                    u
                })
            })
            .collect();
    }
    out
}

/// Random divisor model: `count` classes with energies in `{1, 3/2, 2}`,
/// boundaries in `{−1, 0, 1}^{b₁}` and truncation `levels` times the least energy.
pub fn random_divisor_model<R: Rng>(
    rng: &mut R,
    b1: usize,
    count: usize,
    levels: usize,
    kmax: usize,
) -> Result<FilteredAInfinity> {
    let energies = [q(1), Rational::new(3.into(), 2.into()), q(2)];
    let mut seen = BTreeMap::new();
    for _ in 0..count {
        let e = energies[rng.gen_range(0..energies.len())].clone();
        let boundary: Vec<i64> = (0..b1).map(|_| rng.gen_range(-1..=1)).collect();
        let m = random_rational(rng, 5, 3);
        seen.insert(ClassKey::new(e, boundary), m);
    }
    let emin = seen.keys().map(|k| k.energy.clone()).min().expect("count > 0");
    let classes: Vec<(String, ClassKey, Rational)> = seen
        .into_iter()
        .enumerate()
        .map(|(i, (k, m))| (format!("β{}", i + 1), k, m))
        .collect();
    divisor_model(b1, &classes, emin * q(levels as i64), kmax)
}

/// Degree-one basis elements, which must be `b₁` in number.
fn divisor_directions(s: &FilteredAInfinity) -> Result<Vec<usize>> {
    let dirs = s.basis().of_degree(1);
    if dirs.len() != s.b1() {
        return Err(Error::Dimension { expected: s.b1(), got: dirs.len() });
    }
    Ok(dirs)
}

/// Classes and arities where `⟨m_{k,β}(ρ, …, ρ), ρ⟩ ≠ (ρ∩∂β)^{k+1} m₋₁,β / k!`
/// as polynomials in `ρ ∈ H¹`.
pub fn divisor_violations(s: &FilteredAInfinity) -> Result<Vec<String>> {
    let dirs = divisor_directions(s)?;
    let pos: BTreeMap<usize, usize> = dirs.iter().enumerate().map(|(a, &i)| (i, a)).collect();
    let mut out = Vec::new();
    for beta in s.all_classes() {
        if beta.is_zero() {
            continue;
        }
        let m = s.minus1_of(&beta);
        for k in 0..=s.kmax() {
            // coefficient of each monomial in the ρ-coordinates
            let mut got: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
            if let Some(op) = s.op(&beta, k) {
                for (t, c) in op.entries() {
                    let Some(mut mono) = t.iter().map(|i| pos.get(i).copied()).collect::<Option<Vec<usize>>>() else {
                        continue;
                    };
                    mono.sort_unstable();
                    *got.entry(mono).or_insert_with(Rational::zero) += c;
                }
            }
            let mut want: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
            let mut kfact = q(1);
            for j in 1..=k {
                kfact *= q(j as i64);
            }
            for t in tuples(dirs.len(), k + 1) {
                let c = t.iter().fold(m.clone(), |acc, &i| acc * q(beta.boundary[i])) / &kfact;
                let mut mono = t;
                mono.sort_unstable();
                *want.entry(mono).or_insert_with(Rational::zero) += c;
            }
            got.retain(|_, c| !c.is_zero());
            want.retain(|_, c| !c.is_zero());
            if got != want {
                out.push(format!("class {beta}, arity {k}: divisor identity fails"));
            }
        }
    }
    Ok(out)
}

/// `Ψ = Σ_β T^{E(β)} m₋₁,β y^{∂β}` for a structure with the divisor property.
pub fn psi_laurent(s: &FilteredAInfinity) -> Result<LaurentElement> {
    if s.minus1().is_none() {
        return Err(Error::Missing("m₋₁: the structure is not inhomogeneous".into()));
    }
    let bad = divisor_violations(s)?;
    if !bad.is_empty() {
        return Err(Error::Invalid(bad.join("; ")));
    }
    let mut out = LaurentElement::zero(s.b1(), s.emax());
    for (beta, m) in s.minus1().expect("checked") {
        out.add_term(beta.energy.clone(), beta.boundary.clone(), m);
    }
    Ok(out)
}

/// Same divisor data with `E(β) ↦ E(β) − Σ cᵢ∂ᵢβ`.
pub fn shift_energies(s: &FilteredAInfinity, c: &CoordinateShift) -> Result<FilteredAInfinity> {
    let minus1 = s.minus1().ok_or_else(|| Error::Missing("m₋₁".into()))?;
    let mut classes = Vec::new();
    for (beta, m) in minus1 {
        let e = shifted_energy(&beta.energy, &beta.boundary, c.c());
        if !e.is_positive() {
            return Err(Error::Domain(format!("class {beta} would get energy {e}")));
        }
        let name = s.class_name(beta);
        classes.push((name, ClassKey::new(e, beta.boundary.clone()), m.clone()));
    }
    divisor_model(s.b1(), &classes, s.emax().clone(), s.kmax())
}

fn shifted_energy(e: &Rational, n: &[i64], c: &[Rational]) -> Rational {
    n.iter().zip(c).fold(e.clone(), |acc, (ni, ci)| acc - ci * q(*ni))
}

/// `yᵢ ↦ T^{−cᵢ} yᵢ`: `(λ, n) ↦ (λ − Σ cᵢnᵢ, n)`. The result is truncated
/// at `emax − Σ |cᵢ|·max|nᵢ|`, below which every term is exact.
pub fn substitute_shift(f: &LaurentElement, c: &CoordinateShift) -> Result<LaurentElement> {
    if c.c().len() != f.b1() {
        return Err(Error::Dimension { expected: f.b1(), got: c.c().len() });
    }
    let loss = f.spread().iter().zip(c.c()).fold(Rational::zero(), |acc, (n, ci)| acc + ci.abs() * q(*n));
    let mut out = LaurentElement::zero(f.b1(), &(&f.emax - loss));
    let mut bad = Vec::new();
    for ((e, n), coeff) in &f.terms {
        let e2 = shifted_energy(e, n, c.c());
        if e2.is_negative() {
            bad.push(format!("T^{e}·y^{n:?} ↦ T^{e2}"));
            continue;
        }
        out.add_term(e2, n.clone(), coeff);
    }
    if !bad.is_empty() {
        return Err(Error::Domain(format!("exponents leave the window: {}", bad.join(", "))));
    }
    Ok(out)
}

/// `u⁻¹` for `u = c₀ + w`, `c₀ ≠ 0`, `v(w) > 0`.
fn unit_inverse(u: &NovikovScalar) -> Result<NovikovScalar> {
    let c0 = u.coeff(&Rational::zero());
    if c0.is_zero() || !u.in_lambda0() {
        return Err(Error::Domain("not a unit of Λ₀".into()));
    }
    let emax = u.emax();
    let inv0 = q(1) / &c0;
    let mut w = u.clone();
    w.add_term(Rational::zero(), &-c0);
    let step = w.scale(&-inv0.clone());
    let mut acc = Novikov::one(emax);
    let mut term = Novikov::one(emax);
    loop {
        term = &term * &step;
        if term.is_zero() {
            break;
        }
        acc.add_assign_ref(&term);
    }
    Ok(acc.scale(&inv0))
}

fn unit_power(u: &NovikovScalar, inv: &NovikovScalar, n: i64) -> NovikovScalar {
    let base = if n < 0 { inv } else { u };
    base.pow(n.unsigned_abs() as usize)
}

/// `f(y)` for exact `yᵢ ∈ Λ` with `|v(yᵢ)| < δ`, truncated at `f`'s level.
pub fn eval_window(f: &LaurentElement, y: &[NovikovScalar], delta: &Rational) -> Result<NovikovScalar> {
    if y.len() != f.b1() {
        return Err(Error::Dimension { expected: f.b1(), got: y.len() });
    }
    let mut vals = Vec::with_capacity(y.len());
    for (i, yi) in y.iter().enumerate() {
        match yi.valuation() {
            Valuation::Infinite => return Err(Error::Domain(format!("y{} = 0", i + 1))),
            Valuation::Finite(v) => {
                if v.abs() >= *delta {
                    return Err(Error::Domain(format!("|v(y{})| = {} is not below δ = {delta}", i + 1, v.abs())));
                }
                vals.push(v);
            }
        }
    }
    let spread = f.spread();
    let work = spread.iter().zip(&vals).fold(f.emax.clone(), |acc, (n, v)| acc + v.abs() * q(*n));
    let mut units = Vec::new();
    for (yi, v) in y.iter().zip(&vals) {
        let u = Novikov::from_terms(yi.terms().iter().map(|(e, c)| (e - v, c.clone())), &work);
        let inv = unit_inverse(&u)?;
        units.push((u, inv));
    }
    let mut out = Novikov::zero(&f.emax);
    for ((e, n), c) in &f.terms {
        let shift = n.iter().zip(&vals).fold(e.clone(), |acc, (ni, v)| acc + v * q(*ni));
        if shift.is_negative() {
            return Err(Error::Domain(format!("T^{e}·y^{n:?} evaluates to a negative exponent {shift}")));
        }
        let mut prod = Novikov::constant(c.clone(), &work);
        for ((u, inv), &ni) in units.iter().zip(n) {
            if ni != 0 {
                prod = &prod * &unit_power(u, inv, ni);
            }
        }
        for (pe, pc) in prod.terms() {
            out.add_term(pe + &shift, pc);
        }
    }
    Ok(out)
}

/// `b = Σ xᵢ θᵢ` on a divisor model.
pub fn cochain_from_coordinates(s: &FilteredAInfinity, x: &[NovikovScalar]) -> Result<NovVecScalar> {
    let dirs = divisor_directions(s)?;
    if x.len() != dirs.len() {
        return Err(Error::Dimension { expected: dirs.len(), got: x.len() });
    }
    let mut b = NovVec::zero(s.dim(), s.emax());
    for (&i, xi) in dirs.iter().zip(x) {
        *b.comp_mut(i) = xi.with_emax(s.emax());
    }
    Ok(b)
}

/// `yᵢ = exp(xᵢ)` for `xᵢ ∈ Λ₊`.
pub fn exp_coordinates(x: &[NovikovScalar]) -> Result<Vec<NovikovScalar>> {
    x.iter().map(Novikov::exp).collect()
}
