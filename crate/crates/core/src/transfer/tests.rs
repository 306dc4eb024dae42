use super::*;
use crate::ainf::{check_cyclic, check_relations};
use crate::coeff::{q, qf};
use crate::mc::solve_mc;
use crate::models::{s3, s3_blocks, tensor_from_reps, GenerateConfig, ModelKind};
use crate::novikov::EnergyMonoid;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn monoid(emax: i64) -> EnergyMonoid {
    EnergyMonoid::new(vec![q(1)], q(emax)).unwrap()
}

fn beta(e: i64) -> ClassKey {
    ClassKey::new(q(e), vec![])
}

/// One odd block with `m_{0,β}(1) = 5·da1` and `m₋₁,β = 2`, `m₋₁,2β = 3`.
fn one_level() -> FilteredAInfinity {
    let mut s = s3_blocks(1, 0, monoid(3), 5).unwrap();
    s.set_op(beta(1), tensor_from_reps(&s, 0, &[(vec!["a1"], q(5))]).unwrap()).unwrap();
    s.make_inhomogeneous();
    s.set_minus1(beta(1), q(2));
    s.set_minus1(beta(2), q(3));
    s
}

#[test]
fn hodge_data_on_blocks() {
    let s = s3_blocks(1, 1, monoid(3), 5).unwrap();
    let hd = HarmonicData::hodge(&s).unwrap();
    assert_eq!(hd.basis().names(), &["u".to_string(), "p".to_string()]);
    assert!(hd.validate(&s).is_empty());
    let da = s.basis().index_of("da1").unwrap();
    let a = s.basis().index_of("a1").unwrap();
    assert_eq!(hd.propagator()[a][da], q(-1));
}

#[test]
fn broken_propagator_is_rejected() {
    let s = s3_blocks(1, 0, monoid(3), 5).unwrap();
    let hd = HarmonicData::hodge(&s).unwrap();
    let mut g = hd.propagator().clone();
    let a = s.basis().index_of("a1").unwrap();
    let da = s.basis().index_of("da1").unwrap();
    g[a][da] = q(-2);
    let names = hd.basis().names().to_vec();
    let err = HarmonicData::from_parts(&s, names, hd.inclusion().clone(), hd.projection().clone(), g);
    assert!(err.is_err());
}

#[test]
fn minimal_structure_transfers_to_itself() {
    let mut s = s3(monoid(3), 5).unwrap();
    s.set_op(beta(1), tensor_from_reps(&s, 2, &[(vec!["u", "u", "p"], q(1))]).unwrap_or_else(|_| OperationTensor::zero(2, 2))).unwrap();
    let t = Transfer::hodge(&s).unwrap();
    let can = t.canonical_model().unwrap();
    assert_eq!(can.ops(), s.ops());
    let b = NovVec::from_level(&[q(0), q(0)], &q(1), s.emax());
    assert_eq!(t.f_push(&b).unwrap(), b);
}

#[test]
fn one_level_by_hand() {
    let s = one_level();
    let t = Transfer::hodge(&s).unwrap();
    let a = s.basis().index_of("a1").unwrap();
    // f_{0,β}() = G(5·da1) = −5·a1
    let f0 = t.f_map(0, &beta(1)).unwrap();
    assert_eq!(f0.get(&[]).unwrap()[a], q(-5));
    // single vertex at β, then 2β: m₋₁ + ½⟨5da1, −5a1⟩ with ⟨da1, a1⟩ = 1
    assert_eq!(t.m_can_minus1(&beta(1)), q(2));
    assert_eq!(t.m_can_minus1(&beta(2)), q(3) - qf(25, 2));
    let can = t.canonical_model().unwrap();
    let b = solve_mc(&can).unwrap().b;
    let rep = verify_transfer(&t, &can, &b).unwrap();
    assert!(rep.holds(), "{rep:?}");
    let expected = Novikov::from_terms([(q(1), q(2)), (q(2), q(3) - qf(25, 2))], s.emax());
    assert_eq!(rep.psi_can, expected);
}

#[test]
fn edge_tree_is_flag_independent() {
    let s = one_level();
    let t = Transfer::hodge(&s).unwrap();
    let trees = enum_gr_minus(0, &beta(2), t.labels());
    let edge = trees.iter().find(|tc| tc.tree.len() == 2).unwrap();
    assert_eq!(edge.aut, 2);
    let b = NovVec::zero(t.harmonic().dim(), s.emax());
    assert!(t.flag_mismatches(&edge.tree, &b).unwrap().is_empty());
    assert_eq!(t.m_of_tree(&edge.tree, &b).coeff(&q(0)), q(-25));
}

fn generated(seed: u64, energies: Vec<Rational>) -> FilteredAInfinity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GenerateConfig { kind: ModelKind::S3Blocks, energies: Some(energies), levels: 3, ..Default::default() };
    crate::models::generate(&mut rng, &cfg).unwrap()
}

#[test]
fn generated_blocks_satisfy_the_theorem_suite() {
    for (seed, energies) in [(1, vec![q(1)]), (2, vec![q(1), qf(3, 2)])] {
        let s = generated(seed, energies);
        let t = Transfer::hodge(&s).unwrap();
        let can = t.canonical_model().unwrap();
        assert!(check_relations(&can).is_empty(), "{:?}", check_relations(&can));
        assert!(check_cyclic(&can).is_empty(), "{:?}", check_cyclic(&can));
        let b = solve_mc(&can).unwrap().b;
        let rep = verify_transfer(&t, &can, &b).unwrap();
        assert!(rep.holds(), "{rep:?}");
        let (l, r) = t.interior_vertex_identity(&b).unwrap();
        assert_eq!(l, r);
        let (l, r) = t.interior_edge_identity(&b).unwrap();
        assert_eq!(l, r);
        for (_, tc) in t.trees_for(&b) {
            if tc.tree.interior_vertices().len() <= 4 {
                assert!(t.flag_mismatches(&tc.tree, &b).unwrap().is_empty(), "{}", tc.tree);
            }
        }
    }
}



/// S¹×S² fixtures whose canonical model has Maurer–Cartan solutions, with one
/// solution each (all free parameters set to 1).
fn s1s2_fixtures(count: usize) -> Vec<(Transfer, FilteredAInfinity, NovVecScalar)> {
    let mut out = Vec::new();
    for seed in 0.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenerateConfig { kind: ModelKind::S1S2, energies: Some(vec![q(1)]), levels: 3, ..Default::default() };
        let s = crate::models::generate(&mut rng, &cfg).unwrap();
        let t = Transfer::hodge(&s).unwrap();
        let can = t.canonical_model().unwrap();
        let ones = |_: &Rational, sol: &crate::linalg::AffineSolution| sol.point(&vec![q(1); sol.kernel.len()]);
        if let Ok(sol) = crate::mc::solve_mc_with(&can, &mut { ones }) {
            out.push((t, can, sol.b));
            if out.len() == count {
                return out;
            }
        }
    }
    unreachable!()
}

#[test]
fn nontrivial_first_cohomology() {
    for (t, can, b) in s1s2_fixtures(3) {
        assert!(!b.is_zero());
        assert!(check_relations(&can).is_empty(), "{:?}", check_relations(&can));
        assert!(check_cyclic(&can).is_empty(), "{:?}", check_cyclic(&can));
        let x = t.f_push(&b).unwrap();
        assert!(crate::mc::mc_residual(t.structure(), &x).unwrap().is_zero());
        let rep = verify_transfer(&t, &can, &b).unwrap();
        assert!(rep.holds(), "{rep:?}");
        let (l, r) = t.interior_vertex_identity(&b).unwrap();
        assert_eq!(l, r);
        let (l, r) = t.interior_edge_identity(&b).unwrap();
        assert_eq!(l, r);
        for (_, tc) in t.trees_for(&b) {
            if tc.tree.interior_vertices().len() <= 4 {
                assert!(t.flag_mismatches(&tc.tree, &b).unwrap().is_empty(), "{}", tc.tree);
            }
        }
    }
}

#[test]
fn polarization_identity_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (t, _, _) in s1s2_fixtures(2) {
        let hb = t.harmonic().basis().clone();
        let classes: Vec<ClassKey> = t.classes.clone();
        for _ in 0..3 {
            let b: Vec<Rational> = (0..hb.len())
                .map(|i| if hb.degree(i) == 1 { crate::coeff::random_rational(&mut rng, 4, 3) } else { q(0) })
                .collect();
            for beta in &classes {
                for k in 0..=4 {
                    let (l, r) = t.polarization_identity(k, beta, &b).unwrap();
                    assert_eq!(l, r, "k={k}, β={beta}");
                }
            }
        }
    }
}

#[test]
fn off_shell_behaviour() {
    // fixtures whose canonical model is obstructed: b = 0 is not MC there
    let mut seen = 0;
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GenerateConfig { kind: ModelKind::S1S2, energies: Some(vec![q(1)]), levels: 3, ..Default::default() };
        let s = crate::models::generate(&mut rng, &cfg).unwrap();
        let t = Transfer::hodge(&s).unwrap();
        let can = t.canonical_model().unwrap();
        let mut b = NovVec::zero(t.harmonic().dim(), s.emax());
        let th = t.harmonic().basis().of_degree(1)[0];
        b.comp_mut(th).add_term(q(1), &q(7));
        if crate::mc::mc_residual(&can, &b).unwrap().is_zero() {
            continue;
        }
        seen += 1;
        let (l, r) = t.interior_vertex_identity(&b).unwrap();
        assert_eq!(l, r);
        assert_eq!(t.phi(&b), crate::superpotential::psi(&can, &b).unwrap());
        assert!(verify_transfer(&t, &can, &b).is_err());
    }
    assert!(seen >= 3);
}
