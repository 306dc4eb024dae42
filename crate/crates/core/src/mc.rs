//! Maurer–Cartan equation: residuals, level-by-level solving, gauge flows.

use std::collections::BTreeMap;

use rand::Rng;

use crate::ainf::{ClassKey, FilteredAInfinity};
use crate::coeff::{random_rational, Additive, Coeff, Rational, TPoly};
use crate::error::{Error, Result};
use crate::linalg::{AffineSolution, LinearSystem};
use crate::multilinear::{apply_nov, ActsOn, SparseMap};
use crate::novikov::{NovVec, NovVecPoly, NovVecScalar, Valuation};

/// Lower bound for the valuation of the entries of `v` (0 when `v = 0`).
fn min_valuation<C: Coeff>(v: &NovVec<C>) -> Rational {
    match v.valuation() {
        Valuation::Finite(x) => x,
        Valuation::Infinite => Rational::zero(),
    }
}

/// `Σ_{β,k} T^{E(β)} op_{k,β}(b, …, b)` over the given operations.
pub fn sum_ops<'a, M, C, I>(ops: I, b: &NovVec<C>, emax: &Rational) -> NovVec<C>
where
    M: ActsOn<C> + 'a,
    C: Coeff,
    I: IntoIterator<Item = (&'a ClassKey, &'a SparseMap<M>)>,
{
    let vb = min_valuation(b);
    let b_zero = b.is_zero();
    let mut out = NovVec::zero(b.dim(), emax);
    for (beta, map) in ops {
        let k = map.arity();
        if k > 0 && b_zero {
            continue;
        }
        if &beta.energy + &vb * Rational::from_integer((k as i64).into()) >= *emax {
            continue;
        }
        let args: Vec<&NovVec<C>> = vec![b; k];
        out.add_assign_ref(&apply_nov(map, &args, emax).shift(&beta.energy));
    }
    out
}

/// `Σ_{β,k} T^{E(β)} Σ_positions op_{k,β}(b, …, c, …, b)`.
pub fn sum_ops_inserted<'a, M, C, I>(ops: I, b: &NovVec<C>, c: &NovVec<C>, emax: &Rational) -> NovVec<C>
where
    M: ActsOn<C> + 'a,
    C: Coeff,
    I: IntoIterator<Item = (&'a ClassKey, &'a SparseMap<M>)>,
{
    let vb = min_valuation(b);
    let vc = min_valuation(c);
    let mut out = NovVec::zero(b.dim(), emax);
    if c.is_zero() {
        return out;
    }
    for (beta, map) in ops {
        let k = map.arity();
        if k == 0 || (k > 1 && b.is_zero()) {
            continue;
        }
        let floor = &beta.energy + &vc + &vb * Rational::from_integer(((k - 1) as i64).into());
        if floor >= *emax {
            continue;
        }
        for pos in 0..k {
            let args: Vec<&NovVec<C>> = (0..k).map(|i| if i == pos { c } else { b }).collect();
            out.add_assign_ref(&apply_nov(map, &args, emax).shift(&beta.energy));
        }
    }
    out
}

fn structure_ops(s: &FilteredAInfinity) -> impl Iterator<Item = (&ClassKey, &SparseMap<Rational>)> {
    s.ops().iter().map(|((beta, _), op)| (beta, op.map()))
}

/// `Σ_β Σ_k T^{E(β)} m_{k,β}(b, …, b)` for Novikov vectors over any coefficient ring.
pub fn mc_terms<C: Coeff>(s: &FilteredAInfinity, b: &NovVec<C>) -> NovVec<C>
where
    Rational: ActsOn<C>,
{
    sum_ops(structure_ops(s), b, s.emax())
}

/// Maurer–Cartan residual; zero iff `b` is a bounding cochain.
pub fn mc_residual(s: &FilteredAInfinity, b: &NovVecScalar) -> Result<NovVecScalar> {
    check_cochain(s, b)?;
    Ok(mc_terms(s, b))
}

/// `b` must be a degree-one vector with coefficients in `Λ₊`.
pub fn check_cochain<C: Coeff>(s: &FilteredAInfinity, b: &NovVec<C>) -> Result<()> {
    if b.dim() != s.dim() {
        return Err(Error::Dimension { expected: s.dim(), got: b.dim() });
    }
    if b.emax() != s.emax() {
        return Err(Error::Config("cochain truncated at a different level".into()));
    }
    for i in 0..s.dim() {
        let c = b.comp(i);
        if c.is_zero() {
            continue;
        }
        if s.basis().degree(i) != 1 {
            return Err(Error::Domain(format!("b has a component along {} of degree {}", s.basis().name(i), s.basis().degree(i))));
        }
        if !c.in_lambda_plus() {
            return Err(Error::Domain(format!("coefficient of {} is not in Λ₊", s.basis().name(i))));
        }
    }
    Ok(())
}

/// Free directions of the solution space at one energy level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpace {
    pub energy: Rational,
    pub dimension: usize,
}

/// A bounding cochain found level by level, with the dimension of the
/// affine solution space encountered at each level.
#[derive(Clone, Debug, PartialEq)]
pub struct McSolution {
    pub b: NovVecScalar,
    pub levels: Vec<LevelSpace>,
}

/// Matrix of `m₁,₀` restricted to degree one → degree two.
fn linear_part(s: &FilteredAInfinity) -> (Vec<usize>, BTreeMap<usize, Vec<(usize, Rational)>>) {
    let deg1 = s.basis().of_degree(1);
    let mut cols = BTreeMap::new();
    if let Some(m1) = s.op(&s.zero_class(), 1) {
        for (j, &var) in deg1.iter().enumerate() {
            if let Some(out) = m1.map().get(&[var]) {
                let entries: Vec<(usize, Rational)> =
                    out.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
                cols.insert(j, entries);
            }
        }
    }
    (deg1, cols)
}

/// Solves MC energy level by level: at level `λ` the new coefficients `x`
/// enter only through `m₁,₀(x)`, the rest is a source from lower levels.
/// `choose` picks a point in each level's affine solution space.
pub fn solve_mc_with(
    s: &FilteredAInfinity,
    choose: &mut dyn FnMut(&Rational, &AffineSolution) -> Vec<Rational>,
) -> Result<McSolution> {
    let emax = s.emax().clone();
    let n = s.dim();
    let (deg1, cols) = linear_part(s);
    let mut b: NovVecScalar = NovVec::zero(n, &emax);
    let mut levels = Vec::new();
    for lam in s.monoid().elements().into_iter().filter(|e| !e.is_zero()) {
        let source = mc_terms(s, &b).level(&lam);
        let mut sys = LinearSystem::new(deg1.len());
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
        for (j, entries) in &cols {
            for (i, c) in entries {
                rows[*i].insert(*j, c.clone());
            }
        }
        for (i, row) in rows.into_iter().enumerate() {
            sys.push(row, -source[i].clone());
        }
        let sol = sys.solve().map_err(|bad| Error::Obstruction {
            location: format!("energy {lam}"),
            detail: format!(
                "degree-2 residual {} not in the image of m_{{1,0}} (mismatch {})",
                describe(s, &source),
                bad.residual
            ),
        })?;
        levels.push(LevelSpace { energy: lam.clone(), dimension: sol.kernel.len() });
        let x = if sol.kernel.is_empty() { sol.particular.clone() } else { choose(&lam, &sol) };
        for (j, &var) in deg1.iter().enumerate() {
            if !x[j].is_zero() {
                b.comp_mut(var).add_term(lam.clone(), &x[j]);
            }
        }
    }
    let residual = mc_terms(s, &b);
    if !residual.is_zero() {
        let lowest = residual.levels().into_iter().next().expect("nonzero residual");
        return Err(Error::Obstruction {
            location: format!("energy {lowest}"),
            detail: format!("residual {} survives", describe(s, &residual.level(&lowest))),
        });
    }
    Ok(McSolution { b, levels })
}

/// Solution with every free parameter set to zero.
pub fn solve_mc(s: &FilteredAInfinity) -> Result<McSolution> {
    solve_mc_with(s, &mut |_, sol| sol.particular.clone())
}

fn describe(s: &FilteredAInfinity, v: &[Rational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("{c}·{}", s.basis().name(i)))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Picard iteration for `b(t) = b₀ + ∫₀ᵗ rhs(b(s)) ds`, exact because each
/// step fixes at least one more energy level.
pub fn picard(
    b0: &NovVecPoly,
    mut rhs: impl FnMut(&NovVecPoly) -> NovVecPoly,
) -> Result<NovVecPoly> {
    let mut b = b0.clone();
    let limit = 4 + 4 * b0.dim() + 64;
    for _ in 0..limit {
        let mut next = b0.clone();
        next.add_assign_ref(&rhs(&b).integral());
        if next == b {
            return Ok(b);
        }
        b = next;
    }
    Err(Error::Domain("flow did not stabilise; is the generator in Λ₊?".into()))
}

/// Gauge flow `db/dt + Σ T^{E(β)} m_{k,β}(b, …, c(t), …, b) = 0` with `b(0) = b₀`.
pub fn gauge_flow(s: &FilteredAInfinity, b0: &NovVecScalar, c: &NovVecPoly) -> Result<NovVecPoly> {
    check_cochain(s, b0)?;
    if c.dim() != s.dim() {
        return Err(Error::Dimension { expected: s.dim(), got: c.dim() });
    }
    for i in 0..s.dim() {
        if !c.comp(i).is_zero() && (s.basis().degree(i) != 0 || !c.comp(i).in_lambda_plus()) {
            return Err(Error::Domain(format!("gauge generator must be degree 0 in Λ₊ (see {})", s.basis().name(i))));
        }
    }
    let start = NovVecPoly::from_scalar(b0);
    picard(&start, |b| sum_ops_inserted(structure_ops(s), b, c, s.emax()).neg())
}

/// `mc_residual(b(t))` as a family in `t`.
pub fn mc_residual_family(s: &FilteredAInfinity, b: &NovVecPoly) -> NovVecPoly {
    mc_terms::<TPoly>(s, b)
}

/// Random gauge generator: every degree-0 direction gets, at each positive
/// level, a coefficient polynomial in `t` of degree ≤ `tdeg`.
pub fn random_gauge_generator<R: Rng>(s: &FilteredAInfinity, rng: &mut R, tdeg: usize) -> NovVecPoly {
    let mut c = NovVecPoly::zero(s.dim(), s.emax());
    let levels: Vec<Rational> = s.monoid().elements().into_iter().filter(|e| !e.is_zero()).collect();
    for i in s.basis().of_degree(0) {
        for e in &levels {
            let coeffs = (0..=tdeg).map(|_| random_rational(rng, 3, 2)).collect();
            c.comp_mut(i).add_term(e.clone(), &TPoly::new(coeffs));
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::OperationTensor;
    use crate::coeff::{q, qf};
    use crate::models::{s3, s3_blocks, tensor_from_reps};
    use crate::novikov::{EnergyMonoid, Novikov};

    fn monoid() -> EnergyMonoid {
        EnergyMonoid::new(vec![q(1)], q(3)).unwrap()
    }

    #[test]
    fn zero_cochain_without_constants() {
        let s = s3_blocks(1, 1, monoid(), 5).unwrap();
        let b = NovVec::zero(s.dim(), s.emax());
        assert!(mc_residual(&s, &b).unwrap().is_zero());
    }

    #[test]
    fn constant_term_survives_at_b_zero() {
        let mut s = s3_blocks(1, 0, monoid(), 5).unwrap();
        let beta = ClassKey::new(q(1), vec![]);
        let op = tensor_from_reps(&s, 0, &[(vec!["a1"], q(5))]).unwrap();
        s.set_op(beta, op).unwrap();
        let b = NovVec::zero(s.dim(), s.emax());
        let r = mc_residual(&s, &b).unwrap();
        // ⟨m₀(1), a1⟩ = 5 and ⟨da1, a1⟩ = 1, so m₀(1) = 5·da1
        let da = s.basis().index_of("da1").unwrap();
        assert_eq!(r.comp(da), &Novikov::monomial(q(5), q(1), s.emax()));
        // the solver cancels it with a1 at level 1
        let sol = solve_mc(&s).unwrap();
        let a = s.basis().index_of("a1").unwrap();
        assert_eq!(sol.b.comp(a), &Novikov::monomial(q(-5), q(1), s.emax()));
        assert!(mc_residual(&s, &sol.b).unwrap().is_zero());
    }

    #[test]
    fn obstruction_on_minimal_model() {
        // T³-style: m₀ a nonzero degree-2 class with m₁,₀ = 0 cannot be cancelled
        let mut s = crate::models::s1s2_blocks(0, monoid(), 5).unwrap();
        let beta = ClassKey::new(q(1), vec![1]);
        let op = tensor_from_reps(&s, 0, &[(vec!["θ"], q(2))]).unwrap();
        s.set_op(beta, op).unwrap();
        let err = solve_mc(&s).unwrap_err();
        assert!(matches!(err, Error::Obstruction { ref location, .. } if location == "energy 1"), "{err:?}");
    }

    #[test]
    fn linear_gauge_flow() {
        // only m₁,₀: b(1) = b₀ − T^e m₁,₀(c₀)
        let s = s3_blocks(0, 1, monoid(), 5).unwrap();
        let f = s.basis().index_of("f1").unwrap();
        let df = s.basis().index_of("df1").unwrap();
        let mut b0 = NovVec::zero(s.dim(), s.emax());
        b0.comp_mut(df).add_term(qf(1, 2), &q(3));
        let mut c = NovVecPoly::zero(s.dim(), s.emax());
        c.comp_mut(f).add_term(q(1), &TPoly::constant(q(2)));
        let b = gauge_flow(&s, &b0, &c).unwrap();
        let end = b.eval_t(&q(1));
        let mut expected = b0.clone();
        expected.comp_mut(df).add_term(q(1), &q(-2));
        assert_eq!(end, expected);
        assert!(mc_residual_family(&s, &b).is_zero());
    }

    #[test]
    fn s3_has_unique_solution() {
        let s = s3(monoid(), 5).unwrap();
        let sol = solve_mc(&s).unwrap();
        assert!(sol.b.is_zero());
        assert!(sol.levels.iter().all(|l| l.dimension == 0));
        let _ = OperationTensor::<Rational>::zero(0, 2);
    }
}
