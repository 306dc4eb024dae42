//! Property tests for the algebraic invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cyclic_ainf::ainf::{validate, ClassKey};
use cyclic_ainf::cli::document::{emit_structure, parse_structure_json};
use cyclic_ainf::graded::Pairing;
use cyclic_ainf::mc::{gauge_flow, mc_residual, mc_residual_family, random_gauge_generator, solve_mc};
use cyclic_ainf::models::{generate, GenerateConfig, ModelKind};
use cyclic_ainf::novikov::{Novikov, NovikovScalar};
use cyclic_ainf::superpotential::{d_psi, psi, psi_prime};
use cyclic_ainf::trees::enum_gr_minus;
use cyclic_ainf::{q, qf, Rational, TPoly};

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qf(n, d))
}

fn energy() -> impl Strategy<Value = Rational> {
    (0i64..=12).prop_map(|n| qf(n, 4))
}

fn series(min_energy: i64) -> impl Strategy<Value = NovikovScalar> {
    prop::collection::vec(((min_energy..=12).prop_map(|n| qf(n, 4)), rational()), 0..5)
        .prop_map(|terms| Novikov::from_terms(terms, &q(3)))
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::S3Blocks), Just(ModelKind::S1S2), Just(ModelKind::S3), Just(ModelKind::T3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn valuation_laws(a in series(0), b in series(0)) {
        let sum = a.checked_add(&b).unwrap();
        if let (Some(va), Some(vb), Some(vs)) = (a.valuation().finite(), b.valuation().finite(), sum.valuation().finite()) {
            prop_assert!(vs >= va.min(vb));
        }
        let prod = a.checked_mul(&b).unwrap();
        if let (Some(va), Some(vb)) = (a.valuation().finite(), b.valuation().finite()) {
            if va + vb < q(3) {
                prop_assert_eq!(prod.valuation().finite().cloned(), Some(va + vb));
            }
        }
    }

    #[test]
    fn truncation_is_a_ring_map(a in series(0), b in series(0), e in energy()) {
        let lhs = a.checked_mul(&b).unwrap().truncate(&e);
        let rhs = a.truncate(&e).checked_mul(&b.truncate(&e)).unwrap().truncate(&e);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exponential_inverse(x in series(1)) {
        let one = x.exp().unwrap().checked_mul(&x.neg().exp().unwrap()).unwrap();
        prop_assert_eq!(one, Novikov::one(&q(3)));
    }

    #[test]
    fn arithmetic_is_repeatable(a in series(0), b in series(0)) {
        prop_assert_eq!(a.checked_mul(&b).unwrap(), a.checked_mul(&b).unwrap());
        prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
    }

    #[test]
    fn polynomial_calculus(c in prop::collection::vec(rational(), 0..5), t in rational()) {
        let p = TPoly::new(c);
        prop_assert_eq!(p.integral().derivative(), p.clone());
        prop_assert_eq!(p.derivative().definite_integral(&q(0), &t), p.eval(&t) - p.eval(&q(0)));
    }

    #[test]
    fn pairing_round_trip(v in prop::collection::vec(rational(), 4)) {
        // ⟨x, y⟩ = x₀y₃ + x₁y₂ + x₂y₁ − x₃y₀ on a graded space of dimension 4
        let z = q(0);
        let m = vec![
            vec![z.clone(), z.clone(), z.clone(), q(1)],
            vec![z.clone(), z.clone(), q(1), z.clone()],
            vec![z.clone(), q(1), z.clone(), z.clone()],
            vec![q(-1), z.clone(), z.clone(), z.clone()],
        ];
        let p = Pairing::new(m);
        prop_assert!(p.is_perfect());
        prop_assert_eq!(p.raise(&p.lower(&v)).unwrap(), v);
    }

    #[test]
    fn euler_relation(k in 0usize..=4, e in 0i64..=4) {
        let labels: Vec<ClassKey> = (1..=2).map(|l| ClassKey::new(q(l), vec![])).collect();
        for x in enum_gr_minus(k, &ClassKey::new(q(e), vec![]), &labels) {
            prop_assert_eq!(x.tree.interior_vertices().len(), x.tree.interior_edges().len() + 1);
            prop_assert!(x.aut >= 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generated_structures_round_trip(seed in 0u64..1000, kind in kind()) {
        let s = generate(&mut ChaCha8Rng::seed_from_u64(seed), &GenerateConfig { kind, ..Default::default() }).unwrap();
        prop_assert!(validate(&s).is_empty());
        let text = serde_json::to_string(&emit_structure(&s)).unwrap();
        let back = parse_structure_json(&text).unwrap();
        prop_assert_eq!(back.ops(), s.ops());
        prop_assert_eq!(serde_json::to_string(&emit_structure(&back)).unwrap(), text);
    }

    #[test]
    fn solutions_and_gauge_flows(seed in 0u64..1000, kind in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = generate(&mut rng, &GenerateConfig { kind, ..Default::default() }).unwrap();
        if let Ok(sol) = solve_mc(&s) {
            prop_assert!(mc_residual(&s, &sol.b).unwrap().is_zero());
            prop_assert!(d_psi(&s, &sol.b).unwrap().iter().all(Novikov::is_zero));
            let c = random_gauge_generator(&s, &mut rng, 2);
            let path = gauge_flow(&s, &sol.b, &c).unwrap();
            prop_assert!(mc_residual_family(&s, &path).is_zero());
            let end = path.eval_t(&q(1));
            prop_assert_eq!(psi_prime(&s, &end).unwrap(), psi_prime(&s, &sol.b).unwrap());
            // Ψ − Ψ′ does not depend on b
            let mut d0 = psi(&s, &sol.b).unwrap();
            d0.add_assign_ref(&psi_prime(&s, &sol.b).unwrap().neg());
            let mut d1 = psi(&s, &end).unwrap();
            d1.add_assign_ref(&psi_prime(&s, &end).unwrap().neg());
            prop_assert_eq!(d0, d1);
        }
    }
}
