//! The potential `Ψ′(b) = Σ T^{E(β)}/(k+1)·⟨m_{k,β}(b, …, b), b⟩`, its
//! inhomogeneous correction `Ψ`, and the formal differential.

use crate::ainf::FilteredAInfinity;
use crate::coeff::{Additive, Coeff, Rational, TPoly};
use crate::error::{Error, Result};
use crate::mc::{check_cochain, mc_residual_family};
use crate::novikov::{NovVec, NovVecPoly, NovVecScalar, Novikov, NovikovScalar};

fn weight(k: usize) -> Rational {
    Rational::new(1.into(), ((k + 1) as i64).into())
}

/// `Σ_t c[t]·b_{t₀}⋯b_{t_k}` over the cyclic tensor entries, i.e. `⟨m(b, …, b), b⟩`.
fn bracket<C: Coeff>(
    entries: &std::collections::BTreeMap<Vec<usize>, Rational>,
    b: &NovVec<C>,
    emax: &Rational,
    skip: Option<(usize, usize)>,
) -> Novikov<C> {
    let mut total = Novikov::zero(emax);
    'entries: for (t, c) in entries {
        let mut prod = Novikov::one(emax);
        for (slot, &i) in t.iter().enumerate() {
            if let Some((s, target)) = skip {
                if slot == s {
                    if i != target {
                        continue 'entries;
                    }
                    continue;
                }
            }
            let x = b.comp(i);
            if x.is_zero() {
                continue 'entries;
            }
            prod = &prod * x;
        }
        total.add_assign_ref(&prod.scale(c));
    }
    total
}

fn psi_prime_generic<C: Coeff>(s: &FilteredAInfinity, b: &NovVec<C>) -> Novikov<C> {
    let emax = s.emax();
    let mut out = Novikov::zero(emax);
    if b.is_zero() {
        return out;
    }
    for ((beta, k), op) in s.ops() {
        let term = bracket(op.entries(), b, emax, None);
        out.add_assign_ref(&term.scale(&weight(*k)).shift(&beta.energy));
    }
    out
}

/// `Ψ′(b)`.
pub fn psi_prime(s: &FilteredAInfinity, b: &NovVecScalar) -> Result<NovikovScalar> {
    check_cochain(s, b)?;
    Ok(psi_prime_generic(s, b))
}

/// `Ψ′(b(t))` for a family.
pub fn psi_prime_family(s: &FilteredAInfinity, b: &NovVecPoly) -> Result<Novikov<TPoly>> {
    check_cochain(s, b)?;
    Ok(psi_prime_generic(s, b))
}

/// `Σ_β T^{E(β)} m_{−1,β}`.
pub fn constant_term(s: &FilteredAInfinity) -> Result<NovikovScalar> {
    let m = s.minus1().ok_or_else(|| Error::Missing("structure has no m_{-1} values".into()))?;
    let mut out = Novikov::zero(s.emax());
    for (beta, v) in m {
        if beta.energy < *s.emax() {
            out.add_term(beta.energy.clone(), v);
        }
    }
    Ok(out)
}

/// `Ψ(b) = Ψ′(b) + Σ_β T^{E(β)} m_{−1,β}`.
pub fn psi(s: &FilteredAInfinity, b: &NovVecScalar) -> Result<NovikovScalar> {
    let mut out = constant_term(s)?;
    out.add_assign_ref(&psi_prime(s, b)?);
    Ok(out)
}

/// Formal partial derivatives `∂Ψ′/∂xᵢ` for `b = Σ xᵢ eᵢ`, by the product rule
/// over every slot of every bracket. Entries off degree one are zero.
pub fn d_psi(s: &FilteredAInfinity, b: &NovVecScalar) -> Result<Vec<NovikovScalar>> {
    check_cochain(s, b)?;
    let emax = s.emax();
    let mut out = vec![Novikov::zero(emax); s.dim()];
    for i in s.basis().of_degree(1) {
        for ((beta, k), op) in s.ops() {
            let w = weight(*k);
            for slot in 0..=*k {
                let term = bracket(op.entries(), b, emax, Some((slot, i)));
                out[i].add_assign_ref(&term.scale(&w).shift(&beta.energy));
            }
        }
    }
    Ok(out)
}

/// `Ψ′` along a family of MC solutions; fails unless the family solves MC for
/// all `t` and `Ψ′(b(t))` is independent of `t`.
pub fn psi_along_path(s: &FilteredAInfinity, b: &NovVecPoly) -> Result<NovikovScalar> {
    let res = mc_residual_family(s, b);
    if !res.is_zero() {
        return Err(Error::Domain(format!(
            "path leaves the MC set (residual valuation {:?})",
            res.valuation()
        )));
    }
    let v = psi_prime_family(s, b)?;
    if !v.is_constant_in_t() {
        return Err(Error::Invalid(format!("Ψ′ varies along the path: {v}")));
    }
    Ok(v.eval_t(&Rational::zero()))
}
