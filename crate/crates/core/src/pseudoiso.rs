//! Pseudo-isotopies of inhomogeneous cyclic structures with polynomial time
//! dependence: exact integration, validation, MC transport and the invariance
//! of `Ψ′ + Σ T^{E(β)} m₋₁`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::ainf::{
    check_relations, degree_violations, tensor_cyclic_violations, ClassKey, FilteredAInfinity,
    OperationTensor,
};
use crate::coeff::{random_rational, Additive, Coeff, Rational, TPoly};
use crate::complete::{additive_closure, orbit_representatives};
use crate::error::{Error, Result};
use crate::graded::Pairing;
use crate::mc::{mc_residual, picard, sum_ops};
use crate::multilinear::{apply_nov, insert_all, SparseMap};
use crate::novikov::{EnergyMonoid, NovVecPoly, NovVecScalar, Novikov, NovikovPoly, NovikovScalar};

pub type TimeTensor = OperationTensor<TPoly>;
pub type TimeOps = BTreeMap<(ClassKey, usize), TimeTensor>;

/// `(m^t_{k,β}, c^t_{k,β}, m^t_{−1,β})` on a fixed graded space.
#[derive(Clone, Debug)]
pub struct TimeFamily {
    base: FilteredAInfinity,
    m: TimeOps,
    c: TimeOps,
    minus1: BTreeMap<ClassKey, TPoly>,
}

fn constant_ops(s: &FilteredAInfinity) -> TimeOps {
    s.ops()
        .iter()
        .map(|(key, op)| (key.clone(), op.map_coeffs(|c| TPoly::constant(c.clone()))))
        .collect()
}

impl TimeFamily {
    /// Assembles a family without checking it (see [`check_isotopy`]).
    /// `base` supplies the graded space, pairing, monoid and class names.
    pub fn new(base: &FilteredAInfinity, m: TimeOps, c: TimeOps, minus1: BTreeMap<ClassKey, TPoly>) -> Self {
        let mut base = base.clone();
        base.clear_ops();
        TimeFamily { base, m, c, minus1 }
    }

    /// The constant family on `s` with `c = 0`.
    pub fn constant(s: &FilteredAInfinity) -> Self {
        let minus1 = s
            .minus1()
            .map(|m| m.iter().map(|(b, v)| (b.clone(), TPoly::constant(v.clone()))).collect())
            .unwrap_or_default();
        TimeFamily::new(s, constant_ops(s), TimeOps::new(), minus1)
    }

    pub fn base(&self) -> &FilteredAInfinity {
        &self.base
    }

    pub fn emax(&self) -> &Rational {
        self.base.emax()
    }

    pub fn m(&self) -> &TimeOps {
        &self.m
    }

    pub fn c(&self) -> &TimeOps {
        &self.c
    }

    pub fn minus1(&self) -> &BTreeMap<ClassKey, TPoly> {
        &self.minus1
    }

    pub fn m_mut(&mut self) -> &mut TimeOps {
        &mut self.m
    }

    pub fn minus1_mut(&mut self) -> &mut BTreeMap<ClassKey, TPoly> {
        &mut self.minus1
    }

    /// Highest power of `t` among the `m` tensors.
    pub fn m_degree(&self) -> usize {
        self.m
            .values()
            .flat_map(|op| op.entries().values())
            .filter_map(TPoly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn max_arity(&self) -> usize {
        self.m.keys().chain(self.c.keys()).map(|(_, k)| *k).max().unwrap_or(0)
    }

    /// The inhomogeneous structure `(m^t, m^t₋₁)` at a fixed time.
    pub fn slice(&self, t: &Rational) -> Result<FilteredAInfinity> {
        let mut s = self.base.clone();
        s.set_kmax(s.kmax().max(self.max_arity()));
        for ((beta, _), op) in &self.m {
            s.set_op(beta.clone(), op.map_coeffs(|p| p.eval(t)))?;
        }
        s.make_inhomogeneous();
        for (beta, p) in &self.minus1 {
            s.set_minus1(beta.clone(), p.eval(t));
        }
        Ok(s)
    }

    fn maps_at<'a>(ops: &'a TimeOps, beta: &'a ClassKey) -> impl Iterator<Item = (usize, &'a SparseMap<TPoly>)> + 'a {
        ops.iter().filter(move |((b, _), _)| b == beta).map(|((_, k), op)| (*k, op.map()))
    }

    fn classes(&self) -> Vec<ClassKey> {
        let mut gens: BTreeSet<ClassKey> = self.m.keys().chain(self.c.keys()).map(|(b, _)| b.clone()).collect();
        gens.extend(self.minus1.keys().cloned());
        let mut out: BTreeSet<ClassKey> = additive_closure(&gens, self.emax()).into_iter().collect();
        out.extend(self.minus1.keys().cloned());
        out.into_iter().collect()
    }
}

fn tmul(a: &TPoly, b: &TPoly) -> TPoly {
    a.mul(b)
}

/// Right side `−Σ ±c(…m(…)…) + Σ m(…c(…)…)` of `dm_{·,β}/dt`, by arity.
fn m_rhs(base: &FilteredAInfinity, m: &TimeOps, c: &TimeOps, beta: &ClassKey) -> BTreeMap<usize, SparseMap<TPoly>> {
    let shifted = base.shifted_degrees();
    let dim = base.dim();
    let one = Rational::from_integer(1.into());
    let minus = -one.clone();
    let mut out: BTreeMap<usize, SparseMap<TPoly>> = BTreeMap::new();
    for ((gamma, kc), cop) in c {
        let Some(delta) = beta.sub(gamma) else { continue };
        for (km, mmap) in TimeFamily::maps_at(m, &delta) {
            if kc + km == 0 {
                continue;
            }
            let k = kc + km - 1;
            let acc = out.entry(k).or_insert_with(|| SparseMap::zero(k, dim));
            insert_all(acc, cop.map(), mmap, &shifted, true, &minus, tmul);
            insert_all(acc, mmap, cop.map(), &shifted, false, &one, tmul);
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn pair_poly(p: &Pairing, x: &[TPoly], y: &[TPoly]) -> TPoly {
    let mut acc = TPoly::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            let pij = p.get(i, j);
            if !pij.is_zero() && !yj.is_zero() {
                acc.add_assign_ref(&xi.mul(yj).scale(pij));
            }
        }
    }
    acc
}

/// `Σ_{β₁+β₂=β} ⟨c_{0,β₁}(1), m_{0,β₂}(1)⟩` with the pairing of the shifted
/// complex, `⟨x, y⟩′ = (−1)^{deg x}⟨x, y⟩`. Here `x` always has degree one.
fn minus1_source(base: &FilteredAInfinity, m: &TimeOps, c: &TimeOps, beta: &ClassKey) -> TPoly {
    let mut acc = TPoly::zero();
    for ((gamma, kc), cop) in c {
        if *kc != 0 {
            continue;
        }
        let Some(delta) = beta.sub(gamma) else { continue };
        let (Some(cv), Some(mop)) = (cop.map().get(&[]), m.get(&(delta, 0))) else { continue };
        if let Some(mv) = mop.map().get(&[]) {
            acc.add_assign_ref(&pair_poly(base.pairing(), cv, mv).neg());
        }
    }
    acc
}

fn check_c(s: &FilteredAInfinity, c: &TimeOps) -> Result<()> {
    for (beta, _) in c.keys() {
        if beta.energy <= Rational::zero() {
            return Err(Error::Config(format!("c must vanish at energy zero (class {beta})")));
        }
        if beta.energy >= *s.emax() {
            return Err(Error::Config(format!("c class {beta} is not below the truncation")));
        }
    }
    Ok(())
}

/// Integrates `dm/dt` and `dm₋₁/dt` from `m⁰` energy by energy. The right
/// side at `β` only involves `m^t` at strictly lower energy, so each step is
/// an exact antiderivative.
pub fn integrate_isotopy(m0: &FilteredAInfinity, c: TimeOps) -> Result<TimeFamily> {
    check_c(m0, &c)?;
    let mut fam = TimeFamily::new(m0, constant_ops(m0), c, BTreeMap::new());
    if let Some(m) = m0.minus1() {
        fam.minus1 = m.iter().map(|(b, v)| (b.clone(), TPoly::constant(v.clone()))).collect();
    }
    let classes = fam.classes();
    for beta in classes.iter().filter(|b| !b.is_zero()) {
        for (k, rhs) in m_rhs(&fam.base, &fam.m, &fam.c, beta) {
            let mut map = rhs.map_coeffs(TPoly::integral);
            if let Some(old) = fam.m.get(&(beta.clone(), k)) {
                map.add_assign_ref(old.map());
            }
            let op = OperationTensor::from_map(map, m0.pairing());
            if op.is_zero() {
                fam.m.remove(&(beta.clone(), k));
            } else {
                fam.m.insert((beta.clone(), k), op);
            }
        }
    }
    for beta in classes.iter().filter(|b| !b.is_zero()) {
        let src = minus1_source(&fam.base, &fam.m, &fam.c, beta);
        if src.is_zero() {
            continue;
        }
        let entry = fam.minus1.entry(beta.clone()).or_insert_with(TPoly::zero);
        entry.add_assign_ref(&src.integral().neg());
    }
    fam.minus1.retain(|_, p| !p.is_zero());
    Ok(fam)
}

/// Every defining property of a pseudo-isotopy, as polynomial identities in
/// `t`. An empty list means the family is valid.
pub fn check_isotopy(f: &TimeFamily) -> Vec<String> {
    let mut out = Vec::new();
    let shifted = f.base.shifted_degrees();
    for ((beta, k), op) in &f.m {
        if beta.is_zero() && op.entries().values().any(|p| !p.is_constant()) {
            out.push(format!("m_{{{k},0}} depends on t"));
        }
        for v in degree_violations(op.entries(), &shifted, 1) {
            out.push(format!("m_{{{k},{beta}}}: {v:?}"));
        }
    }
    for ((beta, k), op) in &f.c {
        if beta.energy <= Rational::zero() {
            out.push(format!("c_{{{k},{beta}}} present at energy zero"));
        }
        for v in tensor_cyclic_violations(op.entries(), &shifted) {
            out.push(format!("c_{{{k},{beta}}} not cyclic: {v:?}"));
        }
        for v in degree_violations(op.entries(), &shifted, 0) {
            out.push(format!("c_{{{k},{beta}}}: {v:?}"));
        }
    }
    // fixed-t relations have t-degree ≤ 2·deg m, so deg + 1 samples decide them
    let samples = 2 * f.m_degree() + 1;
    for i in 0..samples {
        let t = Rational::from_integer((i as i64).into());
        match f.slice(&t) {
            Ok(s) => out.extend(check_relations(&s).into_iter().map(|v| format!("t={t}: {v}"))),
            Err(e) => out.push(format!("t={t}: {e}")),
        }
    }
    for beta in f.classes().iter().filter(|b| !b.is_zero()) {
        let rhs = m_rhs(&f.base, &f.m, &f.c, beta);
        let arities: BTreeSet<usize> =
            rhs.keys().copied().chain(TimeFamily::maps_at(&f.m, beta).map(|(k, _)| k)).collect();
        for k in arities {
            let mut diff = f
                .m
                .get(&(beta.clone(), k))
                .map(|op| op.map().map_coeffs(TPoly::derivative))
                .unwrap_or_else(|| SparseMap::zero(k, f.base.dim()));
            if let Some(r) = rhs.get(&k) {
                diff.add_assign_ref(&r.neg());
            }
            if !diff.is_zero() {
                out.push(format!("dm/dt equation fails for k={k}, class {}", f.base.class_name(beta)));
            }
        }
        let lhs = f.minus1.get(beta).map(TPoly::derivative).unwrap_or_else(TPoly::zero);
        let mut sum = lhs;
        sum.add_assign_ref(&minus1_source(&f.base, &f.m, &f.c, beta));
        if !sum.is_zero() {
            out.push(format!("dm_{{-1}}/dt equation fails at class {}", f.base.class_name(beta)));
        }
    }
    out
}

fn family_maps(ops: &TimeOps) -> impl Iterator<Item = (&ClassKey, &SparseMap<TPoly>)> {
    ops.iter().map(|((b, _), op)| (b, op.map()))
}

/// MC residual of `b(t)` for `m^t`, as a polynomial family.
pub fn family_mc_residual(f: &TimeFamily, b: &NovVecPoly) -> NovVecPoly {
    sum_ops(family_maps(&f.m), b, f.emax())
}

/// Transport of a bounding cochain along the family: the solution of
/// `db/dt + Σ T^{E(β)} c^t_{k,β}(b, …, b) = 0`, `b(0) = b₀`.
pub fn transport_mc(f: &TimeFamily, b0: &NovVecScalar) -> Result<NovVecPoly> {
    let s0 = f.slice(&Rational::zero())?;
    let r = mc_residual(&s0, b0)?;
    if !r.is_zero() {
        return Err(Error::Domain("initial cochain does not solve MC for m⁰".into()));
    }
    let start = NovVecPoly::from_scalar(b0);
    let b = picard(&start, |b| sum_ops(family_maps(&f.c), b, f.emax()).neg())?;
    let res = family_mc_residual(f, &b);
    if !res.is_zero() {
        return Err(Error::Invalid(format!(
            "transported cochain leaves the MC set (residual valuation {:?})",
            res.valuation()
        )));
    }
    Ok(b)
}

/// `f(t) = Ψ′_{m^t}(b(t)) + Σ T^{E(β)} m^t_{−1,β}` along a transport.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub b: NovVecPoly,
    pub f: NovikovPoly,
}

impl InvarianceReport {
    pub fn is_constant(&self) -> bool {
        self.f.is_constant_in_t()
    }

    pub fn at(&self, t: &Rational) -> NovikovScalar {
        self.f.eval_t(t)
    }
}

/// `Ψ′_{m^t}(b(t))`.
pub fn family_psi_prime(f: &TimeFamily, b: &NovVecPoly) -> NovikovPoly {
    let emax = f.emax();
    let mut out = Novikov::zero(emax);
    for ((beta, k), op) in &f.m {
        let args = vec![b; *k];
        let v = apply_nov(op.map(), &args, emax);
        let w = Rational::new(1.into(), ((*k + 1) as i64).into());
        out.add_assign_ref(&f.base.pairing().eval_nov(&v, b).scale(&w).shift(&beta.energy));
    }
    out
}

pub fn family_constant_term(f: &TimeFamily) -> NovikovPoly {
    let mut out = Novikov::zero(f.emax());
    for (beta, p) in &f.minus1 {
        out.add_term(beta.energy.clone(), p);
    }
    out
}

/// Computes `f(t)`; fails when it is not constant in `t`.
pub fn verify_isotopy_invariance(f: &TimeFamily, b0: &NovVecScalar) -> Result<InvarianceReport> {
    let report = invariance_report(f, b0)?;
    if !report.is_constant() {
        return Err(Error::Invalid(format!("Ψ′ + m₋₁ varies along the isotopy: {}", report.f)));
    }
    Ok(report)
}

/// `f(t)` without the constancy assertion.
pub fn invariance_report(f: &TimeFamily, b0: &NovVecScalar) -> Result<InvarianceReport> {
    let b = transport_mc(f, b0)?;
    let mut val = family_psi_prime(f, &b);
    val.add_assign_ref(&family_constant_term(f));
    Ok(InvarianceReport { b, f: val })
}

/// Extends a family valid modulo `T^{E₀}` to the monoid `monoid` (truncation
/// `E₁`). The `m`, `c` tensors at the new levels are inputs; `m^t₋₁` at a new
/// class is `m¹₋₁ + ∫_t^1 Σ ⟨c_{0,β₁}(1), m_{0,β₂}(1)⟩ ds`.
pub fn extend_truncation(
    f: &TimeFamily,
    monoid: EnergyMonoid,
    m_new: TimeOps,
    c_new: TimeOps,
    m1_minus1: &BTreeMap<ClassKey, Rational>,
) -> Result<TimeFamily> {
    let e0 = f.emax().clone();
    let e1 = monoid.emax().clone();
    if e1 < e0 {
        return Err(Error::Config(format!("new truncation {e1} is below the old one {e0}")));
    }
    let level_ok = |b: &ClassKey| b.energy >= e0 && b.energy < e1;
    for (b, _) in m_new.keys().chain(c_new.keys()) {
        if !level_ok(b) {
            return Err(Error::Config(format!("extension data at class {b} outside [{e0}, {e1})")));
        }
    }
    let base = f.base.with_monoid(monoid);
    let mut m = f.m.clone();
    m.extend(m_new);
    let mut c = f.c.clone();
    c.extend(c_new);
    check_c(&base, &c)?;
    let mut out = TimeFamily::new(&base, m, c, f.minus1.clone());
    let mut classes: BTreeSet<ClassKey> = out.classes().into_iter().filter(|b| level_ok(b)).collect();
    classes.extend(m1_minus1.keys().filter(|b| level_ok(b)).cloned());
    let one = Rational::from_integer(1.into());
    for beta in classes {
        let prim = minus1_source(&out.base, &out.m, &out.c, &beta).integral();
        let mut p = TPoly::constant(m1_minus1.get(&beta).cloned().unwrap_or_else(Rational::zero) + prim.eval(&one));
        p.add_assign_ref(&prim.neg());
        if p.is_zero() {
            out.minus1.remove(&beta);
        } else {
            out.minus1.insert(beta, p);
        }
    }
    Ok(out)
}

/// Random cyclic `c`-family: at each class, up to `ndirs` orbits per arity
/// with coefficients `a + b·t`.
pub fn random_c_family<R: Rng>(
    s: &FilteredAInfinity,
    rng: &mut R,
    classes: &[ClassKey],
    arities: &[usize],
    ndirs: usize,
) -> Result<TimeOps> {
    let shifted = s.shifted_degrees();
    let mut out = TimeOps::new();
    for beta in classes {
        for &k in arities {
            let reps = orbit_representatives(&shifted, k, 0, &[]);
            if reps.is_empty() {
                continue;
            }
            let mut entries: BTreeMap<Vec<usize>, TPoly> = BTreeMap::new();
            for _ in 0..ndirs {
                let orbit = &reps[rng.gen_range(0..reps.len())];
                let p = TPoly::new(vec![random_rational(rng, 3, 1), random_rational(rng, 3, 1)]);
                for (t, neg) in orbit {
                    let v = if *neg { p.neg() } else { p.clone() };
                    entries.entry(t.clone()).or_insert_with(TPoly::zero).add_assign_ref(&v);
                }
            }
            entries.retain(|_, p| !p.is_zero());
            let op = OperationTensor::from_entries(k, entries, s.pairing())?;
            if !op.is_zero() {
                out.insert((beta.clone(), k), op);
            }
        }
    }
    Ok(out)
}
