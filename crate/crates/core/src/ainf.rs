//! Gapped cyclic filtered A∞ structures stored as cyclic tensors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coeff::{Additive, Coeff, Rational};
use crate::error::{Error, Result};
use crate::graded::{validate_pairing, GradedBasis, Pairing};
use crate::multilinear::{insert_all, SparseMap};
use crate::novikov::EnergyMonoid;

/// Additive key of a disc class: energy and boundary vector. Operations and
/// relations only see classes through this key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey {
    pub energy: Rational,
    pub boundary: Vec<i64>,
}

impl ClassKey {
    pub fn new(energy: Rational, boundary: Vec<i64>) -> Self {
        ClassKey { energy, boundary }
    }

    pub fn zero(b1: usize) -> Self {
        ClassKey { energy: Rational::zero(), boundary: vec![0; b1] }
    }

    pub fn is_zero(&self) -> bool {
        self.energy.is_zero() && self.boundary.iter().all(|&b| b == 0)
    }

    pub fn b1(&self) -> usize {
        self.boundary.len()
    }

    pub fn add(&self, other: &ClassKey) -> ClassKey {
        debug_assert_eq!(self.b1(), other.b1());
        ClassKey {
            energy: &self.energy + &other.energy,
            boundary: self.boundary.iter().zip(&other.boundary).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self − other`, if the difference has nonnegative energy.
    pub fn sub(&self, other: &ClassKey) -> Option<ClassKey> {
        let energy = &self.energy - &other.energy;
        if energy < Rational::zero() {
            return None;
        }
        let boundary = self.boundary.iter().zip(&other.boundary).map(|(a, b)| a - b).collect();
        let k = ClassKey { energy, boundary };
        if k.energy.is_zero() && !k.is_zero() {
            return None;
        }
        Some(k)
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boundary.is_empty() {
            write!(f, "E={}", self.energy)
        } else {
            write!(f, "E={} ∂={:?}", self.energy, self.boundary)
        }
    }
}

/// Named disc class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassLabel {
    pub name: String,
    pub key: ClassKey,
    /// Sphere classes pushed forward onto this class.
    pub sphere_preimages: Vec<String>,
}

impl ClassLabel {
    pub fn new(name: impl Into<String>, key: ClassKey) -> Self {
        ClassLabel { name: name.into(), key, sphere_preimages: Vec::new() }
    }
}

/// `(−1)^{deg′x₀·(deg′x₁ + … + deg′x_k)}` as a flag: true means negative.
pub fn cyclic_sign_negative(tuple: &[usize], shifted: &[i32]) -> bool {
    let d0 = shifted[tuple[0]];
    let rest: i32 = tuple[1..].iter().map(|&i| shifted[i]).sum();
    (d0 * rest).rem_euclid(2) == 1
}

/// Orbit of `tuple = (i₀, i₁, …, i_k)` under the rotation
/// `(x₀, …, x_k) ↦ (x_k, x₀, …, x_{k−1})`, with the sign each entry carries
/// relative to the first. `None` when the signs force the orbit to vanish.
pub fn cyclic_orbit(tuple: &[usize], shifted: &[i32]) -> Option<Vec<(Vec<usize>, bool)>> {
    let mut out = Vec::new();
    let mut cur = tuple.to_vec();
    let mut neg = false;
    loop {
        let flip = cyclic_sign_negative(&cur, shifted);
        out.push((cur.clone(), neg));
        let mut next = Vec::with_capacity(cur.len());
        next.push(*cur.last().unwrap());
        next.extend_from_slice(&cur[..cur.len() - 1]);
        neg ^= flip;
        if next == tuple {
            return if neg { None } else { Some(out) };
        }
        cur = next;
    }
}

/// Operation of arity `k` stored as its cyclic tensor
/// `c[i₀, i₁, …, i_k] = ⟨m(e_{i₁}, …, e_{i_k}), e_{i₀}⟩` together with the
/// map recovered through the pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct OperationTensor<C = Rational> {
    arity: usize,
    entries: BTreeMap<Vec<usize>, C>,
    map: SparseMap<C>,
}

impl<C: Coeff> OperationTensor<C> {
    pub fn zero(arity: usize, dim: usize) -> Self {
        OperationTensor { arity, entries: BTreeMap::new(), map: SparseMap::zero(arity, dim) }
    }

    pub fn from_entries(
        arity: usize,
        entries: BTreeMap<Vec<usize>, C>,
        pairing: &Pairing,
    ) -> Result<Self> {
        let dim = pairing.matrix().len();
        let mut rows: BTreeMap<Vec<usize>, Vec<C>> = BTreeMap::new();
        let mut kept = BTreeMap::new();
        for (t, v) in entries {
            if t.len() != arity + 1 {
                return Err(Error::Dimension { expected: arity + 1, got: t.len() });
            }
            if let Some(&bad) = t.iter().find(|&&i| i >= dim) {
                return Err(Error::Invalid(format!("basis index {bad} out of range")));
            }
            if v.is_zero() {
                continue;
            }
            rows.entry(t[1..].to_vec()).or_insert_with(|| vec![C::zero(); dim])[t[0]] = v.clone();
            kept.insert(t, v);
        }
        let mut map = SparseMap::zero(arity, dim);
        for (inputs, row) in rows {
            map.add_vec(inputs, &pairing.raise(&row)?);
        }
        Ok(OperationTensor { arity, entries: kept, map })
    }

    pub fn from_map(map: SparseMap<C>, pairing: &Pairing) -> Self {
        let mut entries = BTreeMap::new();
        for (inputs, out) in map.entries() {
            for (i0, c) in pairing.lower(out).into_iter().enumerate() {
                if !c.is_zero() {
                    let mut t = Vec::with_capacity(inputs.len() + 1);
                    t.push(i0);
                    t.extend_from_slice(inputs);
                    entries.insert(t, c);
                }
            }
        }
        OperationTensor { arity: map.arity(), entries, map }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, C> {
        &self.entries
    }

    pub fn get(&self, tuple: &[usize]) -> C {
        self.entries.get(tuple).cloned().unwrap_or_else(C::zero)
    }

    pub fn map(&self) -> &SparseMap<C> {
        &self.map
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> OperationTensor<D> {
        let entries: BTreeMap<_, _> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        OperationTensor { arity: self.arity, entries, map: self.map.map_coeffs(f) }
    }
}

/// Completes representative entries to full cyclic orbits. Fails if a
/// representative lies on a sign-inconsistent orbit or two representatives
/// disagree.
pub fn cyclic_completion<C: Coeff>(
    reps: &BTreeMap<Vec<usize>, C>,
    shifted: &[i32],
) -> Result<BTreeMap<Vec<usize>, C>> {
    let mut out: BTreeMap<Vec<usize>, C> = BTreeMap::new();
    for (t, v) in reps {
        if v.is_zero() {
            continue;
        }
        let orbit = cyclic_orbit(t, shifted)
            .ok_or_else(|| Error::Invalid(format!("entry {t:?} lies on a vanishing cyclic orbit")))?;
        for (u, neg) in orbit {
            let val = if neg { v.neg() } else { v.clone() };
            if let Some(old) = out.get(&u) {
                if *old != val {
                    return Err(Error::Invalid(format!("conflicting cyclic entries at {u:?}")));
                }
            }
            out.insert(u, val);
        }
    }
    Ok(out)
}

/// Gapped cyclic filtered A∞ structure, optionally inhomogeneous.
#[derive(Clone, Debug)]
pub struct FilteredAInfinity {
    basis: GradedBasis,
    pairing: Pairing,
    monoid: EnergyMonoid,
    kmax: usize,
    b1: usize,
    classes: Vec<ClassLabel>,
    ops: BTreeMap<(ClassKey, usize), OperationTensor>,
    minus1: Option<BTreeMap<ClassKey, Rational>>,
}

impl FilteredAInfinity {
    pub fn new(
        basis: GradedBasis,
        pairing: Pairing,
        monoid: EnergyMonoid,
        kmax: usize,
        b1: usize,
    ) -> Result<Self> {
        let problems = validate_pairing(&basis, &pairing);
        if !problems.is_empty() {
            return Err(Error::Invalid(problems.join("; ")));
        }
        Ok(FilteredAInfinity {
            basis,
            pairing,
            monoid,
            kmax,
            b1,
            classes: Vec::new(),
            ops: BTreeMap::new(),
            minus1: None,
        })
    }

    /// Same data over another monoid; operations and `m₋₁` values at or above
    /// the new truncation are dropped.
    pub fn with_monoid(&self, monoid: EnergyMonoid) -> Self {
        let mut out = self.clone();
        let emax = monoid.emax().clone();
        out.monoid = monoid;
        out.ops.retain(|(b, _), _| b.energy < emax);
        if let Some(m) = &mut out.minus1 {
            m.retain(|b, _| b.energy < emax);
        }
        out
    }

    pub fn clear_ops(&mut self) {
        self.ops.clear();
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn monoid(&self) -> &EnergyMonoid {
        &self.monoid
    }

    pub fn emax(&self) -> &Rational {
        self.monoid.emax()
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn set_kmax(&mut self, kmax: usize) {
        self.kmax = kmax;
    }

    pub fn b1(&self) -> usize {
        self.b1
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn shifted_degrees(&self) -> Vec<i32> {
        (0..self.dim()).map(|i| self.basis.shifted(i)).collect()
    }

    pub fn zero_class(&self) -> ClassKey {
        ClassKey::zero(self.b1)
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    /// Registers a named class; keys must be unique.
    pub fn add_class(&mut self, label: ClassLabel) -> Result<()> {
        if label.key.b1() != self.b1 {
            return Err(Error::Dimension { expected: self.b1, got: label.key.b1() });
        }
        if self.classes.iter().any(|c| c.key == label.key || c.name == label.name) {
            return Err(Error::Invalid(format!("class {} registered twice", label.name)));
        }
        self.classes.push(label);
        Ok(())
    }

    pub fn class_by_name(&self, name: &str) -> Option<&ClassLabel> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn class_name(&self, key: &ClassKey) -> String {
        self.classes
            .iter()
            .find(|c| &c.key == key)
            .map(|c| c.name.clone())
            .unwrap_or_else(|| key.to_string())
    }

    /// Installs `m_{k,β}`, replacing any previous tensor. Zero tensors are dropped.
    pub fn set_op(&mut self, key: ClassKey, op: OperationTensor) -> Result<()> {
        if key.b1() != self.b1 {
            return Err(Error::Dimension { expected: self.b1, got: key.b1() });
        }
        if key.energy >= *self.emax() {
            return Err(Error::Config(format!("class {key} is not below the truncation")));
        }
        let k = op.arity();
        if op.is_zero() {
            self.ops.remove(&(key, k));
        } else {
            self.ops.insert((key, k), op);
        }
        Ok(())
    }

    pub fn op(&self, key: &ClassKey, k: usize) -> Option<&OperationTensor> {
        self.ops.get(&(key.clone(), k))
    }

    pub fn ops(&self) -> &BTreeMap<(ClassKey, usize), OperationTensor> {
        &self.ops
    }

    /// Classes carrying at least one operation (including the zero class).
    pub fn op_classes(&self) -> BTreeSet<ClassKey> {
        self.ops.keys().map(|(b, _)| b.clone()).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.ops.keys().map(|(_, k)| *k).max().unwrap_or(0)
    }

    pub fn set_minus1(&mut self, key: ClassKey, value: Rational) {
        let table = self.minus1.get_or_insert_with(BTreeMap::new);
        if value.is_zero() {
            table.remove(&key);
        } else {
            table.insert(key, value);
        }
    }

    pub fn make_inhomogeneous(&mut self) {
        self.minus1.get_or_insert_with(BTreeMap::new);
    }

    pub fn minus1(&self) -> Option<&BTreeMap<ClassKey, Rational>> {
        self.minus1.as_ref()
    }

    pub fn minus1_of(&self, key: &ClassKey) -> Rational {
        self.minus1.as_ref().and_then(|m| m.get(key).cloned()).unwrap_or_else(Rational::zero)
    }

    /// Every class that carries an operation or an `m₋₁` value.
    pub fn all_classes(&self) -> BTreeSet<ClassKey> {
        let mut out = self.op_classes();
        if let Some(m) = &self.minus1 {
            out.extend(m.keys().cloned());
        }
        out
    }

    /// Keys `β₁ + β₂` of pairs of operation classes, below the truncation.
    pub fn relation_classes(&self) -> BTreeSet<ClassKey> {
        let cls = self.op_classes();
        let mut out = BTreeSet::new();
        for a in &cls {
            for b in &cls {
                let s = a.add(b);
                if s.energy < *self.emax() {
                    out.insert(s);
                }
            }
        }
        out
    }
}

/// `m_{k,β}(args)`; absent operations give zero.
pub fn apply_op(
    s: &FilteredAInfinity,
    k: usize,
    beta: &ClassKey,
    args: &[&[Rational]],
) -> Result<Vec<Rational>> {
    if args.len() != k {
        return Err(Error::Dimension { expected: k, got: args.len() });
    }
    for a in args {
        if a.len() != s.dim() {
            return Err(Error::Dimension { expected: s.dim(), got: a.len() });
        }
    }
    Ok(match s.op(beta, k) {
        Some(op) => op.map().apply_plain(args),
        None => vec![Rational::zero(); s.dim()],
    })
}

/// The A∞ relation at `(k, β)` as a multilinear map:
/// `Σ (−1)^{deg′x₁+…+deg′x_{i−1}} m_{k₁,β₁}(x₁, …, m_{k₂,β₂}(x_i, …), …, x_k)`.
pub fn ainf_residual_map(s: &FilteredAInfinity, k: usize, beta: &ClassKey) -> SparseMap<Rational> {
    let shifted = s.shifted_degrees();
    let mut acc = SparseMap::zero(k, s.dim());
    let one = Rational::from_integer(1.into());
    for ((b1, k1), outer) in s.ops() {
        if *k1 == 0 || *k1 > k + 1 {
            continue;
        }
        let Some(b2) = beta.sub(b1) else { continue };
        let k2 = k + 1 - k1;
        if let Some(inner) = s.op(&b2, k2) {
            insert_all(&mut acc, outer.map(), inner.map(), &shifted, true, &one, |a, b| a * b);
        }
    }
    acc
}

/// Value of the A∞ relation at `(k, β)` on the given arguments.
pub fn ainf_residual(
    s: &FilteredAInfinity,
    k: usize,
    beta: &ClassKey,
    args: &[&[Rational]],
) -> Result<Vec<Rational>> {
    if args.len() != k {
        return Err(Error::Dimension { expected: k, got: args.len() });
    }
    Ok(ainf_residual_map(s, k, beta).apply_plain(args))
}

/// Relations violated for `k ≤ K_max` and all reachable classes; empty
/// means the structure is A∞ up to truncation.
pub fn check_relations(s: &FilteredAInfinity) -> Vec<String> {
    let mut out = Vec::new();
    for beta in s.relation_classes() {
        for k in 0..=s.kmax() {
            let r = ainf_residual_map(s, k, &beta);
            if let Some((inputs, v)) = r.entries().iter().next() {
                let names: Vec<&str> = inputs.iter().map(|&i| s.basis().name(i)).collect();
                out.push(format!(
                    "A∞ relation fails at k={k}, {}: inputs ({}) give {:?}",
                    s.class_name(&beta),
                    names.join(", "),
                    v
                ));
            }
        }
    }
    out
}

/// Cyclic symmetry violations of a tensor, given its shifted degrees.
pub fn tensor_cyclic_violations<C: Coeff>(
    entries: &BTreeMap<Vec<usize>, C>,
    shifted: &[i32],
) -> Vec<(Vec<usize>, C, C)> {
    let mut out = Vec::new();
    for (t, v) in entries {
        let mut next = Vec::with_capacity(t.len());
        next.push(*t.last().unwrap());
        next.extend_from_slice(&t[..t.len() - 1]);
        let expected = if cyclic_sign_negative(t, shifted) { v.neg() } else { v.clone() };
        let actual = entries.get(&next).cloned().unwrap_or_else(C::zero);
        if actual != expected {
            out.push((next, expected, actual));
        }
    }
    out
}

/// Checks cyclic symmetry on tensors rebuilt from the stored maps, so that
/// errors in pairing inversion are caught too.
pub fn check_cyclic(s: &FilteredAInfinity) -> Vec<String> {
    let shifted = s.shifted_degrees();
    let mut out = Vec::new();
    for ((beta, k), op) in s.ops() {
        let rebuilt = OperationTensor::from_map(op.map().clone(), s.pairing());
        if rebuilt.entries() != op.entries() {
            out.push(format!("m_{{{k},{}}}: map and tensor disagree", s.class_name(beta)));
        }
        for (t, expected, actual) in tensor_cyclic_violations(rebuilt.entries(), &shifted) {
            let names: Vec<&str> = t.iter().map(|&i| s.basis().name(i)).collect();
            out.push(format!(
                "m_{{{k},{}}} not cyclic at [{}]: expected {expected}, found {actual}",
                s.class_name(beta),
                names.join(", ")
            ));
        }
    }
    out
}

/// Degree rule for a tensor of an operation with shifted degree `op_degree`:
/// `Σ deg′ = 1 − op_degree` over all slots.
pub fn degree_violations<C: Coeff>(
    entries: &BTreeMap<Vec<usize>, C>,
    shifted: &[i32],
    op_degree: i32,
) -> Vec<Vec<usize>> {
    entries
        .keys()
        .filter(|t| t.iter().map(|&i| shifted[i]).sum::<i32>() != 1 - op_degree)
        .cloned()
        .collect()
}

/// Degree support of every tensor entry and monoid membership of every class.
pub fn check_gapped_degrees(s: &FilteredAInfinity) -> Vec<String> {
    let shifted = s.shifted_degrees();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for ((beta, k), op) in s.ops() {
        for t in degree_violations(op.entries(), &shifted, 1) {
            let names: Vec<&str> = t.iter().map(|&i| s.basis().name(i)).collect();
            out.push(format!(
                "m_{{{k},{}}} entry [{}] breaks the degree rule",
                s.class_name(beta),
                names.join(", ")
            ));
        }
        seen.insert(beta.clone());
    }
    if let Some(m) = s.minus1() {
        seen.extend(m.keys().cloned());
    }
    for beta in seen {
        if !s.monoid().contains(&beta.energy) {
            out.push(format!("class {} has energy outside the monoid", s.class_name(&beta)));
        }
        if beta.energy.is_zero() && !beta.is_zero() {
            out.push(format!("class {} has zero energy but nonzero boundary", s.class_name(&beta)));
        }
    }
    if s.ops().keys().any(|(b, k)| b.is_zero() && *k == 0) {
        out.push("m_{0,0} must vanish".into());
    }
    out
}

/// All structural checks together.
pub fn validate(s: &FilteredAInfinity) -> Vec<String> {
    let mut out = check_gapped_degrees(s);
    out.extend(check_cyclic(s));
    out.extend(check_relations(s));
    out
}
