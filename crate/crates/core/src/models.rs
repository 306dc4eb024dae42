//! Small graded models used as seeds and fixtures.

use std::collections::BTreeMap;

use rand::Rng;

use crate::ainf::{ClassKey, ClassLabel, FilteredAInfinity, OperationTensor};
use crate::coeff::{q, random_rational, Additive, Rational};
use crate::complete::{additive_closure, complete_structure, sparse_random_point, DeformationTarget};
use crate::error::Result;
use crate::graded::{GradedBasis, Pairing};
use crate::linalg::Matrix;
use crate::multilinear::SparseMap;
use crate::novikov::EnergyMonoid;

fn zero_matrix(n: usize) -> Matrix {
    vec![vec![Rational::zero(); n]; n]
}

/// Graded basis, pairing and differential assembled piece by piece.
struct Builder {
    elements: Vec<(String, i32)>,
    pairs: Vec<(usize, usize, Rational)>,
    diff: Vec<(usize, usize)>,
}

impl Builder {
    fn new() -> Self {
        Builder { elements: Vec::new(), pairs: Vec::new(), diff: Vec::new() }
    }

    fn push(&mut self, name: &str, deg: i32) -> usize {
        self.elements.push((name.to_string(), deg));
        self.elements.len() - 1
    }

    /// `⟨x, y⟩ = v` together with its graded-symmetric partner.
    fn pair(&mut self, x: usize, y: usize, v: Rational) {
        let (dx, dy) = (self.elements[x].1, self.elements[y].1);
        let w = if (dx * dy) % 2 == 0 { v.clone() } else { -v.clone() };
        self.pairs.push((x, y, v));
        if x != y {
            self.pairs.push((y, x, w));
        }
    }

    /// Block `(a, da)` with `deg a = 1`, `⟨a, da⟩ = 1` and `m₁,₀(a) = da`.
    fn odd_block(&mut self, tag: &str) {
        let a = self.push(&format!("a{tag}"), 1);
        let da = self.push(&format!("da{tag}"), 2);
        self.pair(a, da, q(1));
        self.diff.push((a, da));
    }

    /// Block `(f, df, g, dg)` in degrees 0, 1, 2, 3 with `⟨f, dg⟩ = 1`,
    /// `⟨df, g⟩ = −1` (forced by cyclicity of `m₁,₀`).
    fn even_block(&mut self, tag: &str) {
        let f = self.push(&format!("f{tag}"), 0);
        let df = self.push(&format!("df{tag}"), 1);
        let g = self.push(&format!("g{tag}"), 2);
        let dg = self.push(&format!("dg{tag}"), 3);
        self.pair(f, dg, q(1));
        self.pair(df, g, q(-1));
        self.diff.push((f, df));
        self.diff.push((g, dg));
    }

    fn build(self, monoid: EnergyMonoid, kmax: usize, b1: usize) -> Result<FilteredAInfinity> {
        let n = self.elements.len();
        let mut m = zero_matrix(n);
        for (x, y, v) in self.pairs {
            m[x][y] = v;
        }
        let basis = GradedBasis::new(self.elements, 3)?;
        let pairing = Pairing::new(m);
        let mut s = FilteredAInfinity::new(basis, pairing, monoid, kmax, b1)?;
        if !self.diff.is_empty() {
            let mut d = SparseMap::zero(1, n);
            for (x, y) in self.diff {
                d.add_at(vec![x], y, &q(1));
            }
            let op = OperationTensor::from_map(d, s.pairing());
            s.set_op(s.zero_class(), op)?;
        }
        Ok(s)
    }
}

/// Cohomology of `S³`: `u` in degree 0, `p` in degree 3, `⟨u, p⟩ = 1`.
pub fn s3(monoid: EnergyMonoid, kmax: usize) -> Result<FilteredAInfinity> {
    s3_blocks(0, 0, monoid, kmax)
}

/// `S³` cohomology plus acyclic blocks, giving a non-minimal model with
/// `H¹ = H² = 0`: `odd` blocks `a → da` and `even` blocks `f → df`, `g → dg`.
pub fn s3_blocks(odd: usize, even: usize, monoid: EnergyMonoid, kmax: usize) -> Result<FilteredAInfinity> {
    let mut b = Builder::new();
    let u = b.push("u", 0);
    let p = b.push("p", 3);
    b.pair(u, p, q(1));
    for i in 0..odd {
        b.odd_block(&(i + 1).to_string());
    }
    for i in 0..even {
        b.even_block(&(i + 1).to_string());
    }
    b.build(monoid, kmax, 0)
}

/// Cohomology of `S¹ × S²` (`1, θ, σ, vol`) plus `odd` acyclic blocks.
pub fn s1s2_blocks(odd: usize, monoid: EnergyMonoid, kmax: usize) -> Result<FilteredAInfinity> {
    let mut b = Builder::new();
    let one = b.push("1", 0);
    let th = b.push("θ", 1);
    let si = b.push("σ", 2);
    let vol = b.push("vol", 3);
    b.pair(one, vol, q(1));
    b.pair(th, si, q(1));
    for i in 0..odd {
        b.odd_block(&(i + 1).to_string());
    }
    b.build(monoid, kmax, 1)
}

/// Exterior-algebra basis of `H*(T³)`, ordered by degree, with the
/// Poincaré pairing `⟨x, y⟩ = ∫ x∧y`.
fn t3_basis() -> (Vec<u32>, GradedBasis, Pairing) {
    let mut masks: Vec<u32> = (0..8).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let name = |m: u32| {
        if m == 0 {
            "1".to_string()
        } else {
            (0..3).filter(|i| m >> i & 1 == 1).map(|i| format!("{}", i + 1)).collect::<String>()
        }
    };
    let elements = masks
        .iter()
        .map(|&m| (if m == 0 { name(m) } else { format!("e{}", name(m)) }, m.count_ones() as i32))
        .collect();
    let mut pm = zero_matrix(8);
    for (i, &a) in masks.iter().enumerate() {
        for (j, &b) in masks.iter().enumerate() {
            if let Some((7, s)) = wedge(a, b) {
                pm[i][j] = q(s);
            }
        }
    }
    (masks, GradedBasis::new(elements, 3).expect("T³ basis"), Pairing::new(pm))
}

/// Wedge of exterior monomials given as bit masks, with its sign.
fn wedge(a: u32, b: u32) -> Option<(u32, i64)> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    for i in 0..3 {
        for j in 0..i {
            if a >> i & 1 == 1 && b >> j & 1 == 1 {
                inversions += 1;
            }
        }
    }
    Some((a | b, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// `H*(T³)` with the product of degree-one classes, `m₂,₀(eᵢ, eⱼ) = eᵢ∧eⱼ`.
///
/// The products involving the unit are left out: with a graded-symmetric
/// pairing they cannot be made cyclic and strictly unital at once.
pub fn t3(monoid: EnergyMonoid, kmax: usize) -> Result<FilteredAInfinity> {
    let (masks, basis, pairing) = t3_basis();
    let mut s = FilteredAInfinity::new(basis, pairing, monoid, kmax, 3)?;
    let mut m2 = SparseMap::zero(2, 8);
    let idx = |m: u32| masks.iter().position(|&x| x == m).unwrap();
    for &a in masks.iter().filter(|m| m.count_ones() == 1) {
        for &b in masks.iter().filter(|m| m.count_ones() == 1) {
            if let Some((c, sign)) = wedge(a, b) {
                m2.add_at(vec![idx(a), idx(b)], idx(c), &q(sign));
            }
        }
    }
    let op = OperationTensor::from_map(m2, s.pairing());
    s.set_op(s.zero_class(), op)?;
    Ok(s)
}

/// Settings for random fixtures.
#[derive(Clone, Debug)]
pub struct GenerateConfig {
    pub kind: ModelKind,
    /// Energies of the deformation classes; `None` picks one or two at random.
    pub energies: Option<Vec<Rational>>,
    /// Arities left free at each deformed class.
    pub arities: Vec<usize>,
    pub kmax: usize,
    /// Truncation as a multiple of the smallest class energy.
    pub levels: usize,
    /// Number of kernel directions mixed into each random solution.
    pub directions: usize,
    pub inhomogeneous: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    S3,
    S3Blocks,
    T3,
    S1S2,
}

impl ModelKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "s3" => Some(ModelKind::S3),
            "s3-blocks" => Some(ModelKind::S3Blocks),
            "t3" => Some(ModelKind::T3),
            "s1s2" => Some(ModelKind::S1S2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::S3 => "s3",
            ModelKind::S3Blocks => "s3-blocks",
            ModelKind::T3 => "t3",
            ModelKind::S1S2 => "s1s2",
        }
    }
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            kind: ModelKind::S3Blocks,
            energies: None,
            arities: vec![0, 1, 2],
            kmax: 5,
            levels: 3,
            directions: 3,
            inhomogeneous: true,
        }
    }
}

/// Base model of the given kind below `emax`, with classes generated by `gens`.
pub fn base_model(kind: ModelKind, gens: Vec<Rational>, emax: Rational, kmax: usize) -> Result<FilteredAInfinity> {
    let monoid = EnergyMonoid::new(gens, emax)?;
    match kind {
        ModelKind::S3 => s3(monoid, kmax),
        ModelKind::S3Blocks => s3_blocks(1, 1, monoid, kmax),
        ModelKind::T3 => t3(monoid, kmax),
        ModelKind::S1S2 => s1s2_blocks(1, monoid, kmax),
    }
}

/// Random valid structure: a base model deformed at random classes by
/// `complete_structure`, with random `m₋₁` values when inhomogeneous.
pub fn generate<R: Rng>(rng: &mut R, cfg: &GenerateConfig) -> Result<FilteredAInfinity> {
    let energies = match &cfg.energies {
        Some(e) => e.clone(),
        None => {
            let e1 = Rational::new(rng.gen_range(1..=3).into(), rng.gen_range(1..=2).into());
            if rng.gen_bool(0.5) {
                vec![e1.clone(), &e1 * q(3) / q(2)]
            } else {
                vec![e1]
            }
        }
    };
    let emin = energies.iter().min().cloned().expect("at least one energy");
    let emax = &emin * q(cfg.levels as i64);
    let seed = base_model(cfg.kind, energies.clone(), emax.clone(), cfg.kmax)?;
    let b1 = seed.b1();
    let mut seed = seed;
    // Minimal models have no room to cancel sources at sum classes, so they
    // stay below the first sum. Models with acyclic blocks keep their unit
    // out of the deformation and solve at every reachable class.
    let (emax, excluded) = match cfg.kind {
        ModelKind::S3Blocks => (emax, vec![seed.basis().index_of("u").expect("unit")]),
        ModelKind::S1S2 => (emax, vec![seed.basis().index_of("1").expect("unit")]),
        _ => (emax.min(&emin * q(2)), Vec::new()),
    };
    if emax != *seed.emax() {
        seed = base_model(cfg.kind, energies.clone(), emax.clone(), cfg.kmax)?;
    }
    let mut primary = Vec::new();
    for (i, e) in energies.iter().enumerate() {
        let mut boundary = vec![0; b1];
        if b1 > 0 {
            boundary[i % b1] = if rng.gen_bool(0.5) { 1 } else { -1 };
        }
        let key = ClassKey::new(e.clone(), boundary);
        if key.energy < emax {
            seed.add_class(ClassLabel::new(format!("β{}", i + 1), key.clone()))?;
            primary.push(key);
        }
    }
    let top = cfg.arities.iter().max().copied().unwrap_or(0);
    let sum_arities: Vec<usize> = (0..=(2 * top).saturating_sub(1).max(top)).collect();
    let closure = additive_closure(&primary.iter().cloned().collect(), &emax);
    let targets: Vec<DeformationTarget> = closure
        .into_iter()
        .map(|class| {
            let arities = if primary.contains(&class) { cfg.arities.clone() } else { sum_arities.clone() };
            DeformationTarget { class, arities, excluded: excluded.clone() }
        })
        .collect();
    let ndirs = cfg.directions;
    let mut s = complete_structure(&seed, &targets, &mut |c, sol| {
        if primary.contains(c) {
            sparse_random_point(sol, rng, ndirs)
        } else {
            sol.particular.clone()
        }
    })?;
    if cfg.inhomogeneous {
        s.make_inhomogeneous();
        let classes: Vec<ClassKey> = s.all_classes().into_iter().filter(|c| !c.is_zero()).collect();
        for c in classes {
            s.set_minus1(c, random_rational(rng, 5, 3));
        }
    }
    Ok(s)
}

/// Seed tensors given by representative entries, completed cyclically.
pub fn tensor_from_reps(
    s: &FilteredAInfinity,
    arity: usize,
    reps: &[(Vec<&str>, Rational)],
) -> Result<OperationTensor> {
    let mut map = BTreeMap::new();
    for (names, v) in reps {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                s.basis()
                    .index_of(n)
                    .ok_or_else(|| crate::error::Error::Invalid(format!("unknown basis element {n}")))
            })
            .collect::<Result<_>>()?;
        map.insert(idx, v.clone());
    }
    let entries = crate::ainf::cyclic_completion(&map, &s.shifted_degrees())?;
    OperationTensor::from_entries(arity, entries, s.pairing())
}
