//! Homotopy transfer to a canonical model: harmonic data, tree operators,
//! `m^can`, `m^can₋₁`, the tree potential `Φ` and the pushforward `f_*`.

use std::collections::{BTreeMap, BTreeSet};

use crate::ainf::{ClassKey, FilteredAInfinity, OperationTensor};
use crate::coeff::{q, Additive, Rational};
use crate::complete::additive_closure;
use crate::error::{Error, Result};
use crate::graded::{GradedBasis, Pairing};
use crate::linalg::{invert, kernel, mat_mul, mat_vec, transpose, Matrix};
use crate::multilinear::{apply_nov, insert_into, SparseMap};
use crate::novikov::{NovVec, NovVecScalar, Novikov, NovikovScalar};
use crate::trees::{enum_gr_minus, RibbonTree, RootedTree, TreeClass};

fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = q(1);
    }
    m
}

fn mat_add(a: &Matrix, b: &Matrix, sb: &Rational) -> Matrix {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q * sb).collect()).collect()
}

/// `D[j][i]` = coefficient of `e_j` in `m₁,₀(e_i)`.
fn differential(s: &FilteredAInfinity) -> Matrix {
    let n = s.dim();
    let mut d = zeros(n, n);
    if let Some(op) = s.op(&s.zero_class(), 1) {
        for (inputs, out) in op.map().entries() {
            for (j, c) in out.iter().enumerate() {
                d[j][inputs[0]] = c.clone();
            }
        }
    }
    d
}

/// Harmonic subspace `H ⊂ C`, projection `Π` and propagator `G`.
#[derive(Clone, Debug)]
pub struct HarmonicData {
    basis: GradedBasis,
    pairing: Pairing,
    /// `dim C × dim H`: columns are the basis of `H` inside `C`.
    incl: Matrix,
    /// `dim H × dim C`: `Π` in `H`-coordinates.
    proj: Matrix,
    /// `dim C × dim C`.
    g: Matrix,
}

impl HarmonicData {
    /// Hodge construction for the standard inner product on the basis:
    /// `Δ = DDᵀ + DᵀD`, `H = ker Δ`, `G = −DᵀΔ⁺`.
    pub fn hodge(s: &FilteredAInfinity) -> Result<Self> {
        let n = s.dim();
        let d = differential(s);
        let dt = transpose(&d);
        let lap = mat_add(&mat_mul(&d, &dt), &mat_mul(&dt, &d), &q(1));
        let mut cols: Vec<Vec<Rational>> = Vec::new();
        let mut elements = Vec::new();
        let degrees: BTreeSet<i32> = s.basis().degrees().iter().copied().collect();
        for deg in degrees {
            let idx = s.basis().of_degree(deg);
            let block: Matrix = idx.iter().map(|&i| idx.iter().map(|&j| lap[i][j].clone()).collect()).collect();
            for v in kernel(&block, idx.len()) {
                let mut col = vec![Rational::zero(); n];
                for (a, &i) in idx.iter().enumerate() {
                    col[i] = v[a].clone();
                }
                let support: Vec<usize> = (0..n).filter(|&i| !col[i].is_zero()).collect();
                let name = match support.as_slice() {
                    [i] if col[*i] == q(1) => s.basis().name(*i).to_string(),
                    _ => format!("h{}", cols.len() + 1),
                };
                elements.push((name, deg));
                cols.push(col);
            }
        }
        let h = cols.len();
        let incl: Matrix = (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        let incl_t = cols.clone();
        let gram = mat_mul(&incl_t, &incl);
        let proj = if h == 0 {
            Vec::new()
        } else {
            mat_mul(&invert(&gram).ok_or_else(|| Error::Invalid("singular Gram matrix".into()))?, &incl_t)
        };
        let pi_c = embed_projection(&incl, &proj, n);
        let shifted = mat_add(&lap, &pi_c, &q(1));
        let inv = invert(&shifted).ok_or_else(|| Error::Invalid("Δ + Π is singular".into()))?;
        let lap_plus = mat_add(&inv, &pi_c, &-q(1));
        let g = mat_mul(&dt, &lap_plus).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        let basis = GradedBasis::new(elements, s.basis().dim())?;
        let pairing = Pairing::new(restricted_pairing(s.pairing(), &incl, h));
        let hd = HarmonicData { basis, pairing, incl, proj, g };
        let problems = hd.validate(s);
        if !problems.is_empty() {
            return Err(Error::Invalid(problems.join("; ")));
        }
        Ok(hd)
    }

    /// Harmonic data supplied by hand, validated against `s`.
    pub fn from_parts(
        s: &FilteredAInfinity,
        names: Vec<String>,
        incl: Matrix,
        proj: Matrix,
        g: Matrix,
    ) -> Result<Self> {
        let n = s.dim();
        let h = names.len();
        if incl.len() != n || incl.iter().any(|r| r.len() != h) {
            return Err(Error::Dimension { expected: n * h, got: incl.iter().map(Vec::len).sum() });
        }
        if proj.len() != h || proj.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension { expected: h * n, got: proj.iter().map(Vec::len).sum() });
        }
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension { expected: n * n, got: g.iter().map(Vec::len).sum() });
        }
        let mut elements = Vec::new();
        for (j, name) in names.into_iter().enumerate() {
            let degs: BTreeSet<i32> = (0..n).filter(|&i| !incl[i][j].is_zero()).map(|i| s.basis().degree(i)).collect();
            match degs.len() {
                1 => elements.push((name, *degs.iter().next().expect("one degree"))),
                _ => return Err(Error::Invalid(format!("harmonic vector {name} is not homogeneous"))),
            }
        }
        let basis = GradedBasis::new(elements, s.basis().dim())?;
        let pairing = Pairing::new(restricted_pairing(s.pairing(), &incl, h));
        let hd = HarmonicData { basis, pairing, incl, proj, g };
        let problems = hd.validate(s);
        if !problems.is_empty() {
            return Err(Error::Invalid(problems.join("; ")));
        }
        Ok(hd)
    }

    /// Violations of `m₁,₀G + Gm₁,₀ = Π − id`, `ΠG = 0`, `Π ι = id`,
    /// `⟨Im G, Im G + Im Π⟩ = 0` and perfectness of the pairing on `H`.
    pub fn validate(&self, s: &FilteredAInfinity) -> Vec<String> {
        let n = s.dim();
        let h = self.dim();
        let mut out = Vec::new();
        let d = differential(s);
        let pi_c = self.projection_on_c();
        let lhs = mat_add(&mat_mul(&d, &self.g), &mat_mul(&self.g, &d), &q(1));
        let rhs = mat_add(&pi_c, &identity(n), &-q(1));
        if lhs != rhs {
            out.push("m₁,₀∘G + G∘m₁,₀ ≠ Π − identity".into());
        }
        if h > 0 {
            if mat_mul(&self.proj, &self.incl) != identity(h) {
                out.push("Π does not restrict to the identity on H".into());
            }
            if mat_mul(&self.proj, &self.g).iter().flatten().any(|x| !x.is_zero()) {
                out.push("Π∘G ≠ 0".into());
            }
        }
        let p = s.pairing().matrix();
        let gt = transpose(&self.g);
        let gg = mat_mul(&mat_mul(&gt, p), &self.g);
        let gp = mat_mul(&mat_mul(&gt, p), &pi_c);
        if gg.iter().chain(gp.iter()).flatten().any(|x| !x.is_zero()) {
            out.push("⟨Im G, Im G + Im Π⟩ ≠ 0".into());
        }
        if !self.pairing.is_perfect() {
            out.push("pairing restricted to H is degenerate".into());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn inclusion(&self) -> &Matrix {
        &self.incl
    }

    pub fn projection(&self) -> &Matrix {
        &self.proj
    }

    pub fn propagator(&self) -> &Matrix {
        &self.g
    }

    /// `ι∘Π` as an endomorphism of `C`.
    pub fn projection_on_c(&self) -> Matrix {
        embed_projection(&self.incl, &self.proj, self.incl.len())
    }

    pub fn include(&self, x: &NovVecScalar) -> NovVecScalar {
        lin_nov(&self.incl, x, self.incl.len())
    }

    pub fn project(&self, x: &NovVecScalar) -> NovVecScalar {
        lin_nov(&self.proj, x, self.dim())
    }

    pub fn apply_g(&self, x: &NovVecScalar) -> NovVecScalar {
        lin_nov(&self.g, x, self.g.len())
    }
}

fn embed_projection(incl: &Matrix, proj: &Matrix, n: usize) -> Matrix {
    if proj.is_empty() {
        return zeros(n, n);
    }
    mat_mul(incl, proj)
}

fn restricted_pairing(p: &Pairing, incl: &Matrix, h: usize) -> Matrix {
    let n = incl.len();
    let mut out = zeros(h, h);
    for (a, row) in out.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            let u: Vec<Rational> = (0..n).map(|i| incl[i][a].clone()).collect();
            let v: Vec<Rational> = (0..n).map(|i| incl[i][b].clone()).collect();
            *x = p.eval(&u, &v).expect("dimensions match");
        }
    }
    out
}

/// `M·x` for a rational matrix and a Novikov vector.
fn lin_nov(m: &Matrix, x: &NovVecScalar, rows: usize) -> NovVecScalar {
    let mut out = NovVec::zero(rows, x.emax());
    for (j, row) in m.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            if !c.is_zero() && !x.comp(i).is_zero() {
                out.comp_mut(j).add_assign_ref(&x.comp(i).scale(c));
            }
        }
    }
    out
}

/// `M ∘ map` for a multilinear map with values in `C`.
fn post_compose(m: &Matrix, map: &SparseMap<Rational>, rows: usize) -> SparseMap<Rational> {
    let mut out = SparseMap::zero(map.arity(), rows);
    for (inputs, v) in map.entries() {
        let w = mat_vec(m, v);
        if w.iter().any(|x| !x.is_zero()) {
            out.add_vec(inputs.clone(), &w);
        }
    }
    out
}

/// Key of a transferred operation: class and arity.
type OpKey = (ClassKey, usize);

/// Transfer data: the tree maps `f_{k,β}: H^{⊗k} → C` and the canonical model.
#[derive(Clone, Debug)]
pub struct Transfer {
    s: FilteredAInfinity,
    hd: HarmonicData,
    classes: Vec<ClassKey>,
    labels: Vec<ClassKey>,
    f: BTreeMap<OpKey, SparseMap<Rational>>,
    sums: BTreeMap<OpKey, SparseMap<Rational>>,
}

impl Transfer {
    pub fn new(s: &FilteredAInfinity, hd: HarmonicData) -> Result<Self> {
        let problems = hd.validate(s);
        if !problems.is_empty() {
            return Err(Error::Invalid(problems.join("; ")));
        }
        let emax = s.emax();
        let mut gens = s.all_classes();
        gens.retain(|c| !c.is_zero());
        let mut classes = vec![s.zero_class()];
        classes.extend(additive_closure(&gens, emax));
        let labels: Vec<ClassKey> = gens.into_iter().collect();
        let mut t = Transfer { s: s.clone(), hd, classes, labels, f: BTreeMap::new(), sums: BTreeMap::new() };
        t.build();
        Ok(t)
    }

    /// Hodge harmonic data followed by [`Transfer::new`].
    pub fn hodge(s: &FilteredAInfinity) -> Result<Self> {
        Transfer::new(s, HarmonicData::hodge(s)?)
    }

    pub fn structure(&self) -> &FilteredAInfinity {
        &self.s
    }

    pub fn harmonic(&self) -> &HarmonicData {
        &self.hd
    }

    /// Nonzero classes that may label interior vertices.
    pub fn labels(&self) -> &[ClassKey] {
        &self.labels
    }

    fn build(&mut self) {
        let n = self.s.dim();
        let h = self.hd.dim();
        let mut incl = SparseMap::zero(1, n);
        for a in 0..h {
            let col: Vec<Rational> = (0..n).map(|i| self.hd.incl[i][a].clone()).collect();
            incl.add_vec(vec![a], &col);
        }
        self.f.insert((self.s.zero_class(), 1), incl);
        for beta in self.classes.clone() {
            for k in 0..=self.s.kmax() {
                if beta.is_zero() && k <= 1 {
                    continue;
                }
                let sum = self.tree_sum(k, &beta);
                if sum.is_zero() {
                    continue;
                }
                let f = post_compose(&self.hd.g, &sum, n);
                if !f.is_zero() {
                    self.f.insert((beta.clone(), k), f);
                }
                self.sums.insert((beta.clone(), k), sum);
            }
        }
    }

    /// `Σ_{(ℓ,β₀) ≠ (1,0)} m_{ℓ,β₀}(f_{k₁,β₁} ⊗ … ⊗ f_{k_ℓ,β_ℓ})` over splittings
    /// of `(k, β)`; only already computed `f` are used.
    fn tree_sum(&self, k: usize, beta: &ClassKey) -> SparseMap<Rational> {
        let n = self.s.dim();
        let mut acc = SparseMap::zero(k, n);
        for ((b0, l), op) in self.s.ops() {
            if *l == 1 && b0.is_zero() {
                continue;
            }
            let Some(rest) = beta.sub(b0) else { continue };
            self.fill_slots(&mut acc, op.map().clone(), *l, k, &rest);
        }
        acc
    }

    /// Inserts `f` maps into slots `0..slots` of `partial`, last slot first.
    fn fill_slots(&self, acc: &mut SparseMap<Rational>, partial: SparseMap<Rational>, slots: usize, k: usize, rest: &ClassKey) {
        if slots == 0 {
            if k == 0 && rest.is_zero() {
                acc.add_assign_ref(&partial);
            }
            return;
        }
        let pos = slots - 1;
        for ((bi, ki), fi) in &self.f {
            if *ki > k {
                continue;
            }
            let Some(r) = rest.sub(bi) else { continue };
            let mut next = SparseMap::zero(partial.arity() + ki - 1, partial.dim());
            insert_into(&mut next, &partial, pos, fi, &[], false, &q(1), |a, b| a * b);
            if !next.is_zero() {
                self.fill_slots(acc, next, pos, k - ki, &r);
            }
        }
    }

    /// `f_{k,β}` as a multilinear map `H^{⊗k} → C`.
    pub fn f_map(&self, k: usize, beta: &ClassKey) -> Option<&SparseMap<Rational>> {
        self.f.get(&(beta.clone(), k))
    }

    /// `m^can_{k,β}` as a multilinear map on `H`.
    pub fn m_can_map(&self, k: usize, beta: &ClassKey) -> SparseMap<Rational> {
        let h = self.hd.dim();
        if k == 1 && beta.is_zero() {
            let d = differential(&self.s);
            let mut out = SparseMap::zero(1, h);
            for a in 0..h {
                let col: Vec<Rational> = (0..self.s.dim()).map(|i| self.hd.incl[i][a].clone()).collect();
                let w = mat_vec(&self.hd.proj, &mat_vec(&d, &col));
                if w.iter().any(|x| !x.is_zero()) {
                    out.add_vec(vec![a], &w);
                }
            }
            return out;
        }
        match self.sums.get(&(beta.clone(), k)) {
            Some(sum) => post_compose(&self.hd.proj, sum, h),
            None => SparseMap::zero(k, h),
        }
    }

    /// `m^can_{k,β}` as a cyclic tensor on `H`.
    pub fn m_can(&self, k: usize, beta: &ClassKey) -> OperationTensor {
        OperationTensor::from_map(self.m_can_map(k, beta), &self.hd.pairing)
    }

    /// `m^can₋₁,β = Σ_{Γ ∈ Gr⁻(0,β)} m(Γ)/#Aut(Γ)`; an edgeless tree
    /// contributes `m₋₁,β`.
    pub fn m_can_minus1(&self, beta: &ClassKey) -> Rational {
        let zero = NovVec::zero(self.hd.dim(), self.s.emax());
        let mut total = Rational::zero();
        for tc in enum_gr_minus(0, beta, &self.labels) {
            let v = self.m_of_tree(&tc.tree, &zero);
            total += v.coeff(&Rational::zero()) / Rational::from_integer((tc.aut as i64).into());
        }
        total
    }

    /// The canonical model on `H`, inhomogeneous when the input is.
    pub fn canonical_model(&self) -> Result<FilteredAInfinity> {
        let s = &self.s;
        let mut out = FilteredAInfinity::new(
            self.hd.basis.clone(),
            self.hd.pairing.clone(),
            s.monoid().clone(),
            s.kmax(),
            s.b1(),
        )?;
        for c in s.classes() {
            out.add_class(c.clone())?;
        }
        for beta in &self.classes {
            for k in 0..=s.kmax() {
                let op = self.m_can(k, beta);
                if !op.is_zero() {
                    out.set_op(beta.clone(), op)?;
                }
            }
        }
        if s.minus1().is_some() {
            out.make_inhomogeneous();
            for beta in self.classes.iter().filter(|c| !c.is_zero()) {
                out.set_minus1(beta.clone(), self.m_can_minus1(beta));
            }
        }
        Ok(out)
    }

    /// `f_*(b) = Σ_{k,β} T^{E(β)} f_{k,β}(b, …, b)` for `b` on `H`.
    pub fn f_push(&self, b: &NovVecScalar) -> Result<NovVecScalar> {
        if b.dim() != self.hd.dim() {
            return Err(Error::Dimension { expected: self.hd.dim(), got: b.dim() });
        }
        let emax = b.emax();
        let vb = match b.valuation() {
            crate::novikov::Valuation::Finite(x) => x,
            crate::novikov::Valuation::Infinite => Rational::zero(),
        };
        let mut out = NovVec::zero(self.s.dim(), emax);
        for ((beta, k), map) in &self.f {
            if *k > 0 && b.is_zero() {
                continue;
            }
            if &beta.energy + &vb * q(*k as i64) >= *emax {
                continue;
            }
            let args = vec![b; *k];
            out.add_assign_ref(&apply_nov(map, &args, emax).shift(&beta.energy));
        }
        Ok(out)
    }

    /// `f_Γ(x₁, …, x_k)` with one argument per input of the rooted tree.
    pub fn f_gamma(&self, g: &RootedTree, args: &[&NovVecScalar]) -> Result<NovVecScalar> {
        let inputs = g.inputs().len();
        if args.len() != inputs {
            return Err(Error::Dimension { expected: inputs, got: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.dim() != self.hd.dim()) {
            return Err(Error::Dimension { expected: self.hd.dim(), got: a.dim() });
        }
        let emax = args.first().map_or_else(|| self.s.emax().clone(), |a| a.emax().clone());
        Ok(self.f_gamma_inner(g, args, &emax))
    }

    fn f_gamma_inner(&self, g: &RootedTree, args: &[&NovVecScalar], emax: &Rational) -> NovVecScalar {
        if g.is_trivial() {
            return self.hd.include(args[0]);
        }
        let children = g.children().expect("top vertex is interior");
        let mut vals = Vec::with_capacity(children.len());
        let mut used = 0;
        for c in &children {
            let n = c.inputs().len();
            vals.push(self.f_gamma_inner(c, &args[used..used + n], emax));
            used += n;
        }
        let n = self.s.dim();
        let beta = g.tree.kind(g.top()).class().expect("interior");
        match self.s.op(beta, children.len()) {
            Some(op) => {
                let refs: Vec<&NovVecScalar> = vals.iter().collect();
                self.hd.apply_g(&apply_nov(op.map(), &refs, emax))
            }
            None => NovVec::zero(n, emax),
        }
    }

    /// `m(Γ, v, e; b) = ⟨m_{ℓ,β(v)}(f_{Γ₁}(b…), …, f_{Γ_ℓ}(b…)), f_{Γ₀}(b…)⟩`.
    pub fn m_tree(&self, tree: &RibbonTree, v: usize, w: usize, b: &NovVecScalar) -> Result<NovikovScalar> {
        let parts = tree.split_at_flag(v, w)?;
        if b.dim() != self.hd.dim() {
            return Err(Error::Dimension { expected: self.hd.dim(), got: b.dim() });
        }
        let emax = b.emax().clone();
        let eval = |g: &RootedTree| {
            let args = vec![b; g.inputs().len()];
            self.f_gamma_inner(g, &args, &emax)
        };
        let f0 = eval(&parts[0]);
        let rest: Vec<NovVecScalar> = parts[1..].iter().map(eval).collect();
        let beta = tree.kind(v).class().expect("flag at an interior vertex");
        Ok(match self.s.op(beta, rest.len()) {
            Some(op) => {
                let refs: Vec<&NovVecScalar> = rest.iter().collect();
                self.s.pairing().eval_nov(&apply_nov(op.map(), &refs, &emax), &f0)
            }
            None => Novikov::zero(&emax),
        })
    }

    /// `m(Γ; b)` at the first flag; an edgeless tree gives `m₋₁,β`.
    pub fn m_of_tree(&self, tree: &RibbonTree, b: &NovVecScalar) -> NovikovScalar {
        if tree.len() == 1 {
            let beta = tree.kind(0).class().expect("interior");
            return Novikov::constant(self.s.minus1_of(beta), b.emax());
        }
        let (v, w) = tree.flags()[0];
        self.m_tree(tree, v, w, b).expect("valid flag")
    }

    /// Tree classes of `Gr⁻(k, β)` for every `k` and class `β` that can
    /// contribute below the truncation for this `b`.
    pub fn trees_for(&self, b: &NovVecScalar) -> Vec<(ClassKey, TreeClass)> {
        let emax = b.emax();
        let vb = match b.valuation() {
            crate::novikov::Valuation::Finite(x) => Some(x),
            crate::novikov::Valuation::Infinite => None,
        };
        let mut out = Vec::new();
        for beta in &self.classes {
            for k in 0..=self.s.kmax() + 1 {
                if k > 0 {
                    match &vb {
                        None => break,
                        Some(v) => {
                            if &beta.energy + v * Rational::from_integer((k as i64).into()) >= *emax {
                                break;
                            }
                        }
                    }
                }
                for tc in enum_gr_minus(k, beta, &self.labels) {
                    out.push((beta.clone(), tc));
                }
            }
        }
        out
    }

    /// `Σ_Γ T^{E(β)} w(Γ) m(Γ; b)/#Aut(Γ)` over [`Transfer::trees_for`].
    fn weighted_tree_sum(&self, b: &NovVecScalar, weight: impl Fn(&RibbonTree) -> Rational) -> NovikovScalar {
        let emax = b.emax().clone();
        let mut total = Novikov::zero(&emax);
        for (beta, tc) in self.trees_for(b) {
            let w = weight(&tc.tree);
            if w.is_zero() {
                continue;
            }
            let v = self.m_of_tree(&tc.tree, b);
            let scale = w / Rational::from_integer((tc.aut as i64).into());
            total.add_assign_ref(&v.scale(&scale).shift(&beta.energy));
        }
        total
    }

    /// `Φ(b) = Σ_{k,β} Σ_{Γ ∈ Gr⁻(k,β)} T^{E(β)} m(Γ; b)/#Aut(Γ)`.
    pub fn phi(&self, b: &NovVecScalar) -> NovikovScalar {
        self.weighted_tree_sum(b, |_| q(1))
    }

    /// Both sides of `Σ_{(ℓ,β)≠(1,0)} T^{E(β)}/(ℓ+1) ⟨m_{ℓ,β}(f_*b, …), f_*b⟩
    /// = Σ_Γ T^{E(β)} #C₀^int(Γ) m(Γ; b)/#Aut(Γ)`.
    pub fn interior_vertex_identity(&self, b: &NovVecScalar) -> Result<(NovikovScalar, NovikovScalar)> {
        let x = self.f_push(b)?;
        let emax = b.emax().clone();
        let mut lhs = Novikov::zero(&emax);
        for ((beta, l), op) in self.s.ops() {
            if *l == 1 && beta.is_zero() {
                continue;
            }
            let args = vec![&x; *l];
            let v = self.s.pairing().eval_nov(&apply_nov(op.map(), &args, &emax), &x);
            lhs.add_assign_ref(&v.scale(&Rational::new(1.into(), ((*l + 1) as i64).into())).shift(&beta.energy));
        }
        let rhs = self.weighted_tree_sum(b, |t| {
            if t.len() == 1 {
                Rational::zero()
            } else {
                Rational::from_integer((t.interior_vertices().len() as i64).into())
            }
        });
        Ok((lhs, rhs))
    }

    /// Both sides of `⟨m₁,₀(f_*b), f_*b⟩ = −2 Σ_Γ T^{E(β)} #C₁^int(Γ) m(Γ; b)/#Aut(Γ)`;
    /// they agree when `b` solves the canonical Maurer–Cartan equation.
    pub fn interior_edge_identity(&self, b: &NovVecScalar) -> Result<(NovikovScalar, NovikovScalar)> {
        let x = self.f_push(b)?;
        let emax = b.emax().clone();
        let lhs = match self.s.op(&self.s.zero_class(), 1) {
            Some(op) => self.s.pairing().eval_nov(&apply_nov(op.map(), &[&x], &emax), &x),
            None => Novikov::zero(&emax),
        };
        let rhs = self
            .weighted_tree_sum(b, |t| Rational::from_integer((t.interior_edges().len() as i64).into()))
            .scale(&Rational::from_integer((-2).into()));
        Ok((lhs, rhs))
    }

    /// Both sides of `⟨m^can_{k,β}(b, …, b), b⟩ = (k+1) Σ_{Γ ∈ Gr⁻(k+1,β)} m(Γ; b)/#Aut(Γ)`
    /// for a plain vector `b` on `H`.
    pub fn polarization_identity(&self, k: usize, beta: &ClassKey, b: &[Rational]) -> Result<(Rational, Rational)> {
        let h = self.hd.dim();
        if b.len() != h {
            return Err(Error::Dimension { expected: h, got: b.len() });
        }
        let args = vec![b; k];
        let lhs = self.hd.pairing.eval(&self.m_can_map(k, beta).apply_plain(&args), b)?;
        let bv = NovVec::from_level(b, &Rational::zero(), &q(1));
        let mut rhs = Rational::zero();
        for tc in enum_gr_minus(k + 1, beta, &self.labels) {
            let v = self.m_of_tree(&tc.tree, &bv).coeff(&Rational::zero());
            rhs += v / Rational::from_integer((tc.aut as i64).into());
        }
        Ok((lhs, rhs * Rational::from_integer(((k + 1) as i64).into())))
    }

    /// Flags `(v, w)` of `Γ` whose value `m(Γ, v, w; b)` differs from the first flag's.
    pub fn flag_mismatches(&self, tree: &RibbonTree, b: &NovVecScalar) -> Result<Vec<(usize, usize)>> {
        let flags = tree.flags();
        let Some(&(v0, w0)) = flags.first() else { return Ok(Vec::new()) };
        let reference = self.m_tree(tree, v0, w0, b)?;
        let mut out = Vec::new();
        for &(v, w) in &flags[1..] {
            if self.m_tree(tree, v, w, b)? != reference {
                out.push((v, w));
            }
        }
        Ok(out)
    }
}

/// Report of the transfer theorem `Ψ(f_*(b)) = Ψ^can(b) = Φ(b)` at one `b`.
#[derive(Clone, Debug)]
pub struct TransferCheck {
    pub psi_push: NovikovScalar,
    pub psi_can: NovikovScalar,
    pub phi: NovikovScalar,
}

impl TransferCheck {
    pub fn holds(&self) -> bool {
        self.psi_push == self.psi_can && self.psi_can == self.phi
    }
}

/// Evaluates both sides of the transfer theorem at a canonical MC solution `b`.
pub fn verify_transfer(t: &Transfer, can: &FilteredAInfinity, b: &NovVecScalar) -> Result<TransferCheck> {
    let residual = crate::mc::mc_residual(can, b)?;
    if !residual.is_zero() {
        return Err(Error::Domain("b does not solve the canonical Maurer–Cartan equation".into()));
    }
    let x = t.f_push(b)?;
    Ok(TransferCheck {
        psi_push: crate::superpotential::psi(t.structure(), &x)?,
        psi_can: crate::superpotential::psi(can, b)?,
        phi: t.phi(b),
    })
}

#[cfg(test)]
mod tests;
