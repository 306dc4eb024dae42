//! Level-by-level completion of a seed into a filtered A∞ structure.
//!
//! At each class β the A∞ relation is affine-linear in the new tensors
//! `m_{k,β}`: the linear part is the commutator with the `β = 0`
//! operations, the source comes from pairs of lower classes. Unknowns are
//! cyclic orbits of degree-admissible index tuples, so every solution is
//! cyclic by construction.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::ainf::{
    ainf_residual_map, cyclic_orbit, ClassKey, FilteredAInfinity, OperationTensor,
};
use crate::coeff::{random_rational, Additive, Rational};
use crate::error::{Error, Result};
use crate::linalg::{AffineSolution, LinearSystem};
use crate::multilinear::{insert_all, SparseMap};

/// Linear form `Σ a_v x_v` in the unknowns.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LinForm(pub BTreeMap<usize, Rational>);

impl LinForm {
    pub fn var(v: usize) -> Self {
        LinForm(BTreeMap::from([(v, Rational::from_integer(1.into()))]))
    }
}

impl Additive for LinForm {
    fn zero() -> Self {
        LinForm(BTreeMap::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (v, a) in &other.0 {
            let e = self.0.entry(*v).or_insert_with(Rational::zero);
            *e += a;
            if e.is_zero() {
                self.0.remove(v);
            }
        }
    }
    fn neg(&self) -> Self {
        LinForm(self.0.iter().map(|(v, a)| (*v, -a.clone())).collect())
    }
    fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return LinForm::zero();
        }
        LinForm(self.0.iter().map(|(v, a)| (*v, a * s)).collect())
    }
}

/// Class whose tensors are solved for, with the arities left free.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationTarget {
    pub class: ClassKey,
    pub arities: Vec<usize>,
    /// Basis elements kept out of every slot of the new tensors.
    pub excluded: Vec<usize>,
}

/// Canonical representatives of the nonvanishing cyclic orbits of arity `k`
/// tuples obeying `Σ deg′ = 1 − op_degree`.
pub fn orbit_representatives(
    shifted: &[i32],
    k: usize,
    op_degree: i32,
    excluded: &[usize],
) -> Vec<Vec<(Vec<usize>, bool)>> {
    let n = shifted.len();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut t = vec![0usize; k + 1];
    let total = n.pow(k as u32 + 1);
    for code in 0..total {
        let mut c = code;
        for slot in t.iter_mut().rev() {
            *slot = c % n;
            c /= n;
        }
        if t.iter().map(|&i| shifted[i]).sum::<i32>() != 1 - op_degree
            || t.iter().any(|i| excluded.contains(i))
            || seen.contains(&t)
        {
            continue;
        }
        let orbit = cyclic_orbit(&t, shifted);
        let members: Vec<Vec<usize>> = match &orbit {
            Some(o) => o.iter().map(|(u, _)| u.clone()).collect(),
            None => {
                // vanishing orbit: mark all rotations as seen
                let mut u = t.clone();
                let mut all = Vec::new();
                for _ in 0..=k {
                    all.push(u.clone());
                    u.rotate_right(1);
                }
                all
            }
        };
        seen.extend(members);
        if let Some(o) = orbit {
            out.push(o);
        }
    }
    out
}

/// Tensor entries `Σ_v x_v·orbit_v` for a chosen point.
fn assemble(orbits: &[(usize, Vec<(Vec<usize>, bool)>)], x: &[Rational]) -> BTreeMap<Vec<usize>, Rational> {
    let mut out = BTreeMap::new();
    for (v, orbit) in orbits {
        if x[*v].is_zero() {
            continue;
        }
        for (t, neg) in orbit {
            let val = if *neg { -x[*v].clone() } else { x[*v].clone() };
            out.insert(t.clone(), val);
        }
    }
    out
}

/// Classes reachable as sums of the given ones, strictly below `emax`, in
/// increasing energy.
pub fn additive_closure(gens: &BTreeSet<ClassKey>, emax: &Rational) -> Vec<ClassKey> {
    let gens: Vec<ClassKey> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let mut found: BTreeSet<ClassKey> = gens.iter().filter(|g| g.energy < *emax).cloned().collect();
    let mut frontier: Vec<ClassKey> = found.iter().cloned().collect();
    while let Some(c) = frontier.pop() {
        for g in &gens {
            let s = c.add(g);
            if s.energy < *emax && found.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    found.into_iter().collect()
}

/// Solves the A∞ relations level by level. `choose` picks a point of each
/// target's affine solution space (it receives the class and the space).
pub fn complete_structure(
    seed: &FilteredAInfinity,
    targets: &[DeformationTarget],
    choose: &mut dyn FnMut(&ClassKey, &AffineSolution) -> Vec<Rational>,
) -> Result<FilteredAInfinity> {
    let mut s = seed.clone();
    let shifted = s.shifted_degrees();
    let dim = s.dim();
    let zero = s.zero_class();
    let by_class: BTreeMap<ClassKey, &DeformationTarget> =
        targets.iter().map(|t| (t.class.clone(), t)).collect();
    if let Some(t) = targets.iter().find(|t| t.class.is_zero()) {
        return Err(Error::Config(format!("cannot deform the zero class ({})", t.class)));
    }
    let mut gens = s.op_classes();
    gens.extend(by_class.keys().cloned());
    let zero_ops: Vec<(usize, SparseMap<Rational>)> = s
        .ops()
        .iter()
        .filter(|((b, _), _)| b.is_zero())
        .map(|((_, k), op)| (*k, op.map().clone()))
        .collect();
    let one = Rational::from_integer(1.into());

    for beta in additive_closure(&gens, s.emax()) {
        // unknown tensors at β
        let mut orbits_by_arity: BTreeMap<usize, Vec<(usize, Vec<(Vec<usize>, bool)>)>> = BTreeMap::new();
        let mut nvars = 0;
        let target = by_class.get(&beta);
        for &k in target.map(|t| t.arities.as_slice()).unwrap_or(&[]) {
            let reps = orbit_representatives(&shifted, k, 1, &target.unwrap().excluded);
            let tagged = reps
                .into_iter()
                .map(|o| {
                    nvars += 1;
                    (nvars - 1, o)
                })
                .collect();
            orbits_by_arity.insert(k, tagged);
        }
        let mut unknown_maps: BTreeMap<usize, SparseMap<LinForm>> = BTreeMap::new();
        for (&k, orbits) in &orbits_by_arity {
            let mut rows: BTreeMap<Vec<usize>, Vec<LinForm>> = BTreeMap::new();
            for (v, orbit) in orbits {
                for (t, neg) in orbit {
                    let row = rows.entry(t[1..].to_vec()).or_insert_with(|| vec![LinForm::zero(); dim]);
                    let f = if *neg { LinForm::var(*v).neg() } else { LinForm::var(*v) };
                    row[t[0]].add_assign_ref(&f);
                }
            }
            let mut map = SparseMap::zero(k, dim);
            for (inputs, row) in rows {
                map.add_vec(inputs, &s.pairing().raise(&row)?);
            }
            unknown_maps.insert(k, map);
        }

        let mut sys = LinearSystem::new(nvars);
        let mut labels = Vec::new();
        for k in 0..=s.kmax() {
            let known = ainf_residual_map(&s, k, &beta);
            let mut linear: SparseMap<LinForm> = SparseMap::zero(k, dim);
            for (ku, u) in &unknown_maps {
                for (kz, z) in &zero_ops {
                    if ku + kz != k + 1 {
                        continue;
                    }
                    insert_all(&mut linear, z, u, &shifted, true, &one, |a, f: &LinForm| f.scale(a));
                    insert_all(&mut linear, u, z, &shifted, true, &one, |f: &LinForm, a| f.scale(a));
                }
            }
            let keys: BTreeSet<&Vec<usize>> = known.entries().keys().chain(linear.entries().keys()).collect();
            for inputs in keys {
                for out in 0..dim {
                    let rhs = known.get(inputs).map(|v| -v[out].clone()).unwrap_or_else(Rational::zero);
                    let row = linear.get(inputs).map(|v| v[out].0.clone()).unwrap_or_default();
                    if row.is_empty() && rhs.is_zero() {
                        continue;
                    }
                    sys.push(row, rhs);
                    labels.push((k, inputs.clone(), out));
                }
            }
        }
        let sol = sys.solve().map_err(|bad| {
            let (k, inputs, out) = &labels[bad.row];
            let names: Vec<&str> = inputs.iter().map(|&i| s.basis().name(i)).collect();
            Error::Obstruction {
                location: format!("k={k}, class {}", s.class_name(&beta)),
                detail: format!(
                    "relation on ({}) has uncancellable component {} along {}",
                    names.join(", "),
                    -bad.residual.clone(),
                    s.basis().name(*out)
                ),
            }
        })?;
        if nvars == 0 {
            continue;
        }
        let x = choose(&beta, &sol);
        if x.len() != nvars {
            return Err(Error::Dimension { expected: nvars, got: x.len() });
        }
        for (k, orbits) in &orbits_by_arity {
            let mut entries = assemble(orbits, &x);
            if let Some(old) = s.op(&beta, *k) {
                for (t, v) in old.entries() {
                    let e = entries.entry(t.clone()).or_insert_with(Rational::zero);
                    *e += v;
                }
                entries.retain(|_, v| !v.is_zero());
            }
            let op = OperationTensor::from_entries(*k, entries, s.pairing())?;
            s.set_op(beta.clone(), op)?;
        }
        debug_assert!(beta != zero);
    }
    Ok(s)
}

/// Particular solution plus a random combination of at most `ndirs` kernel
/// directions with small integer weights.
pub fn sparse_random_point<R: Rng>(sol: &AffineSolution, rng: &mut R, ndirs: usize) -> Vec<Rational> {
    let mut params = vec![Rational::zero(); sol.kernel.len()];
    if !params.is_empty() {
        for _ in 0..ndirs {
            let i = rng.gen_range(0..params.len());
            params[i] = random_rational(rng, 3, 1);
        }
    }
    sol.point(&params)
}
