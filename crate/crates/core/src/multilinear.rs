//! Sparse multilinear maps on a finite basis and their insertions
//! `m₁(x₁, …, m₂(xᵢ, …), …, x_k)`.

use std::collections::BTreeMap;

use crate::coeff::{Additive, Coeff, Rational, TPoly};
use crate::novikov::{NovVec, Novikov};

/// Multilinear map `C̄^{⊗k} → C̄` stored as input index tuple → dense output
/// vector. Absent tuples map to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMap<C> {
    arity: usize,
    dim: usize,
    entries: BTreeMap<Vec<usize>, Vec<C>>,
}

impl<C: Additive> SparseMap<C> {
    pub fn zero(arity: usize, dim: usize) -> Self {
        SparseMap { arity, dim, entries: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Vec<C>> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, inputs: &[usize]) -> Option<&Vec<C>> {
        self.entries.get(inputs)
    }

    /// Adds `c` to output component `out` of the value at `inputs`.
    pub fn add_at(&mut self, inputs: Vec<usize>, out: usize, c: &C) {
        if c.is_zero() {
            return;
        }
        let dim = self.dim;
        let remove = {
            let v = self.entries.entry(inputs.clone()).or_insert_with(|| vec![C::zero(); dim]);
            v[out].add_assign_ref(c);
            v.iter().all(Additive::is_zero)
        };
        if remove {
            self.entries.remove(&inputs);
        }
    }

    pub fn add_vec(&mut self, inputs: Vec<usize>, v: &[C]) {
        for (i, c) in v.iter().enumerate() {
            self.add_at(inputs.clone(), i, c);
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (k, v) in &other.entries {
            self.add_vec(k.clone(), v);
        }
    }

    pub fn neg(&self) -> Self {
        SparseMap {
            arity: self.arity,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(Additive::neg).collect()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = SparseMap::zero(self.arity, self.dim);
        for (k, v) in &self.entries {
            for (i, c) in v.iter().enumerate() {
                out.add_at(k.clone(), i, &c.scale(s));
            }
        }
        out
    }

    pub fn map_coeffs<D: Additive>(&self, f: impl Fn(&C) -> D) -> SparseMap<D> {
        let mut out = SparseMap::zero(self.arity, self.dim);
        for (k, v) in &self.entries {
            for (i, c) in v.iter().enumerate() {
                out.add_at(k.clone(), i, &f(c));
            }
        }
        out
    }

    /// Entries grouped by output component: `by_out[j]` lists `(inputs, coefficient)`.
    fn by_output(&self) -> Vec<Vec<(&Vec<usize>, &C)>> {
        let mut by_out = vec![Vec::new(); self.dim];
        for (k, v) in &self.entries {
            for (j, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    by_out[j].push((k, c));
                }
            }
        }
        by_out
    }
}

impl<C: Coeff> SparseMap<C> {
    /// Evaluation on plain coefficient vectors.
    pub fn apply_plain(&self, args: &[&[C]]) -> Vec<C> {
        assert_eq!(args.len(), self.arity, "arity mismatch");
        let mut out = vec![C::zero(); self.dim];
        'entries: for (inputs, v) in &self.entries {
            let mut prod = C::one();
            for (slot, &i) in inputs.iter().enumerate() {
                let a = &args[slot][i];
                if a.is_zero() {
                    continue 'entries;
                }
                prod = prod.mul(a);
            }
            for (o, c) in out.iter_mut().zip(v) {
                if !c.is_zero() {
                    o.add_assign_ref(&c.mul(&prod));
                }
            }
        }
        out
    }
}

/// Coefficients that can act on Novikov values with coefficients in `C`.
pub trait ActsOn<C: Coeff>: Additive {
    fn act(&self, x: &Novikov<C>) -> Novikov<C>;
}

impl<C: Coeff> ActsOn<C> for Rational {
    fn act(&self, x: &Novikov<C>) -> Novikov<C> {
        x.scale(self)
    }
}

impl ActsOn<TPoly> for TPoly {
    fn act(&self, x: &Novikov<TPoly>) -> Novikov<TPoly> {
        x.scale_coeff(self)
    }
}

/// Multilinear evaluation on Novikov-valued vectors (no `T`-weight applied).
pub fn apply_nov<M: ActsOn<C>, C: Coeff>(
    map: &SparseMap<M>,
    args: &[&NovVec<C>],
    emax: &Rational,
) -> NovVec<C> {
    assert_eq!(args.len(), map.arity, "arity mismatch");
    let mut out = NovVec::zero(map.dim, emax);
    'entries: for (inputs, v) in &map.entries {
        let mut prod = Novikov::one(emax);
        for (slot, &i) in inputs.iter().enumerate() {
            let a = args[slot].comp(i);
            if a.is_zero() {
                continue 'entries;
            }
            prod = &prod * a;
            if prod.is_zero() {
                continue 'entries;
            }
        }
        for (j, c) in v.iter().enumerate() {
            if !c.is_zero() {
                out.comp_mut(j).add_assign_ref(&c.act(&prod));
            }
        }
    }
    out
}

/// Accumulates `± outer(x₁, …, inner(xᵢ, …), …)` with `inner` inserted at
/// slot `pos` of `outer`, into `acc` (arity `k₁ + k₂ − 1`).
///
/// With `koszul` set the sign is `(−1)^{deg′x₁ + … + deg′x_{pos}}` (the
/// inner map is odd); `shifted` gives `deg′` of each basis element.
#[allow(clippy::too_many_arguments)]
pub fn insert_into<A, B, O>(
    acc: &mut SparseMap<O>,
    outer: &SparseMap<A>,
    pos: usize,
    inner: &SparseMap<B>,
    shifted: &[i32],
    koszul: bool,
    sign: &Rational,
    mul: impl Fn(&A, &B) -> O,
) where
    A: Additive,
    B: Additive,
    O: Additive,
{
    debug_assert!(pos < outer.arity);
    let by_out = inner.by_output();
    for (o_in, o_val) in &outer.entries {
        let slot = o_in[pos];
        if by_out[slot].is_empty() {
            continue;
        }
        let mut s = sign.clone();
        if koszul {
            let pre: i32 = o_in[..pos].iter().map(|&i| shifted[i]).sum();
            if pre.rem_euclid(2) == 1 {
                s = -s;
            }
        }
        for (i_in, i_c) in &by_out[slot] {
            let mut key = Vec::with_capacity(o_in.len() + i_in.len() - 1);
            key.extend_from_slice(&o_in[..pos]);
            key.extend_from_slice(i_in);
            key.extend_from_slice(&o_in[pos + 1..]);
            for (j, a) in o_val.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                acc.add_at(key.clone(), j, &mul(a, i_c).scale(&s));
            }
        }
    }
}

/// Sum over all insertion slots of [`insert_into`].
#[allow(clippy::too_many_arguments)]
pub fn insert_all<A, B, O>(
    acc: &mut SparseMap<O>,
    outer: &SparseMap<A>,
    inner: &SparseMap<B>,
    shifted: &[i32],
    koszul: bool,
    sign: &Rational,
    mul: impl Fn(&A, &B) -> O + Copy,
) where
    A: Additive,
    B: Additive,
    O: Additive,
{
    for pos in 0..outer.arity {
        insert_into(acc, outer, pos, inner, shifted, koszul, sign, mul);
    }
}
