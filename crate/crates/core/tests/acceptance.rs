//! Acceptance criteria, one line each. Every identity is exact equality of
//! rational Novikov coefficients.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclic_ainf::ainf::{check_cyclic, check_relations, validate, ClassKey, FilteredAInfinity};
use cyclic_ainf::coeff::random_rational;
use cyclic_ainf::complete::sparse_random_point;
use cyclic_ainf::laurent::{
    cochain_from_coordinates, divisor_violations, eval_window, exp_coordinates, psi_laurent, random_divisor_model,
    shift_energies, substitute_shift, CoordinateShift,
};
use cyclic_ainf::linalg::AffineSolution;
use cyclic_ainf::mc::{gauge_flow, mc_residual, mc_residual_family, random_gauge_generator, solve_mc, solve_mc_with};
use cyclic_ainf::models::{generate, GenerateConfig, ModelKind};
use cyclic_ainf::novikov::{Novikov, NovVecScalar, NovikovScalar};
use cyclic_ainf::pseudoiso::{check_isotopy, integrate_isotopy, invariance_report, random_c_family};
use cyclic_ainf::superpotential::{d_psi, psi, psi_prime};
use cyclic_ainf::transfer::{verify_transfer, Transfer};
use cyclic_ainf::trees::enum_gr_minus;
use cyclic_ainf::wallcross::{corrected_isotopy, random_counts, random_profile, verify_wallcross};
use cyclic_ainf::{q, qf, Rational};

use common::{brute_aut, brute_force, c, factorial};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn random_mc(s: &FilteredAInfinity, rng: &mut ChaCha8Rng) -> cyclic_ainf::Result<NovVecScalar> {
    let mut choose = |_: &Rational, sol: &AffineSolution| sparse_random_point(sol, rng, 2);
    solve_mc_with(s, &mut choose).map(|sol| sol.b)
}

/// Solvable fixtures of several kinds, each with its seed.
fn mc_fixtures(count: usize) -> Vec<(u64, FilteredAInfinity)> {
    let kinds = [ModelKind::S3Blocks, ModelKind::S1S2, ModelKind::S3, ModelKind::T3];
    let mut out = Vec::new();
    for seed in 0u64.. {
        let kind = kinds[seed as usize % kinds.len()];
        let cfg = match kind {
            ModelKind::S1S2 => GenerateConfig { kind, energies: Some(vec![q(1)]), ..Default::default() },
            _ => GenerateConfig { kind, ..Default::default() },
        };
        let s = generate(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).expect("generator");
        if solve_mc(&s).is_ok() {
            out.push((seed, s));
        }
        if out.len() == count {
            return out;
        }
    }
    unreachable!()
}

fn generator_soundness() -> Outcome {
    let kinds = [ModelKind::S3Blocks, ModelKind::S1S2, ModelKind::S3, ModelKind::T3];
    let mut n = 0;
    for seed in 0..24u64 {
        let kind = kinds[seed as usize % kinds.len()];
        let cfg = GenerateConfig { kind, kmax: 5, levels: 3, ..Default::default() };
        let s = generate(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).map_err(err)?;
        ensure(s.dim() <= 8, || format!("seed {seed}: dimension {}", s.dim()))?;
        ensure(s.kmax() == 5, || format!("seed {seed}: K_max {}", s.kmax()))?;
        let emin = s.monoid().generators().iter().min().cloned().expect("generators");
        ensure(*s.emax() <= emin * q(3), || format!("seed {seed}: more than 3 levels"))?;
        let problems = validate(&s);
        ensure(problems.is_empty(), || format!("seed {seed} ({}): {}", kind.name(), problems[0]))?;
        n += 1;
    }
    Ok(format!("{n} fixtures"))
}

fn critical_points() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut off = 0;
    let fixtures = mc_fixtures(8);
    for (seed, s) in &fixtures {
        let emin = s.monoid().elements().into_iter().find(|e| *e > q(0)).expect("positive level");
        for i in 0..10 {
            let mut b = random_mc(s, &mut rng).map_err(err)?;
            if i >= 5 {
                for j in s.basis().of_degree(1) {
                    b.comp_mut(j).add_term(emin.clone(), &random_rational(&mut rng, 3, 1));
                }
            }
            let on_shell = mc_residual(s, &b).map_err(err)?.is_zero();
            let critical = d_psi(s, &b).map_err(err)?.iter().all(Novikov::is_zero);
            ensure(on_shell == critical, || format!("fixture {seed}, b #{i}: residual zero {on_shell}, dΨ′ zero {critical}"))?;
            off += usize::from(!on_shell);
        }
    }
    ensure(off >= fixtures.len(), || format!("only {off} perturbed cochains left the MC locus"))?;
    Ok(format!("{} fixtures, {off} non-solutions", fixtures.len()))
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fixtures = mc_fixtures(6);
    for (seed, s) in &fixtures {
        let b0 = random_mc(s, &mut rng).map_err(err)?;
        let start = psi_prime(s, &b0).map_err(err)?;
        for i in 0..5 {
            let cgen = random_gauge_generator(s, &mut rng, 3);
            let path = gauge_flow(s, &b0, &cgen).map_err(err)?;
            ensure(mc_residual_family(s, &path).is_zero(), || format!("fixture {seed}, c #{i}: b(t) leaves MC"))?;
            let end = psi_prime(s, &path.eval_t(&q(1))).map_err(err)?;
            ensure(end == start, || format!("fixture {seed}, c #{i}: {start} ≠ {end}"))?;
        }
    }
    Ok(format!("{} fixtures × 5 flows", fixtures.len()))
}

fn nonzero_classes(s: &FilteredAInfinity) -> Vec<ClassKey> {
    s.all_classes().into_iter().filter(|c| !c.is_zero()).collect()
}

/// Sums of nonzero classes below the truncation.
fn class_closure(s: &FilteredAInfinity) -> Vec<ClassKey> {
    let mut out: std::collections::BTreeSet<ClassKey> = nonzero_classes(s).into_iter().collect();
    loop {
        let sums: Vec<ClassKey> = out
            .iter()
            .flat_map(|a| out.iter().map(move |b| a.add(b)))
            .filter(|c| c.energy < *s.emax() && !out.contains(c))
            .collect();
        if sums.is_empty() {
            return out.into_iter().collect();
        }
        out.extend(sums);
    }
}

/// Fixtures with a nontrivial `m₁,₀`, so that `c₀` feeds `m₀` and the
/// `m₋₁` correction is visible.
fn block_fixtures(count: usize) -> Vec<(u64, FilteredAInfinity)> {
    (0u64..)
        .filter_map(|seed| {
            let kind = if seed % 2 == 0 { ModelKind::S3Blocks } else { ModelKind::S1S2 };
            let cfg = GenerateConfig { kind, energies: Some(vec![q(1)]), levels: 3, ..Default::default() };
            let s = generate(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).expect("generator");
            solve_mc(&s).is_ok().then_some((seed, s))
        })
        .take(count)
        .collect()
}

fn isotopy_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut drifted = 0;
    let fixtures = block_fixtures(10);
    for (seed, s) in &fixtures {
        let cfam = random_c_family(s, &mut rng, &class_closure(s), &[0, 1, 2], 2).map_err(err)?;
        let f = integrate_isotopy(s, cfam).map_err(err)?;
        let v = check_isotopy(&f);
        ensure(v.is_empty(), || format!("fixture {seed}: {}", v[0]))?;
        let b0 = solve_mc(s).map_err(err)?.b;
        let rep = invariance_report(&f, &b0).map_err(err)?;
        ensure(rep.is_constant(), || format!("fixture {seed}: f(t) = {}", rep.f))?;

        // negative control: freeze m₋₁ at its t = 0 value
        let mut frozen = f.clone();
        for p in frozen.minus1_mut().values_mut() {
            *p = cyclic_ainf::TPoly::constant(p.eval(&q(0)));
        }
        let bad = invariance_report(&frozen, &b0).map_err(err)?;
        let mut drift = bad.at(&q(1));
        drift.add_assign_ref(&bad.at(&q(0)).neg());
        let mut integral = Novikov::zero(s.emax());
        for (beta, p) in f.minus1() {
            integral.add_term(beta.energy.clone(), &p.derivative().definite_integral(&q(0), &q(1)));
        }
        ensure(drift == integral.neg(), || format!("fixture {seed}: drift {drift} vs −{integral}"))?;
        drifted += usize::from(!drift.is_zero());
    }
    ensure(drifted >= 5, || format!("only {drifted} negative controls moved"))?;
    Ok(format!("{} isotopies, {drifted} controls fail as predicted", fixtures.len()))
}

fn tree_calculus() -> Outcome {
    let labels = [1, 2];
    let keys: Vec<ClassKey> = labels.iter().map(|&l| c(l)).collect();
    let mut checked = 0;
    // every tree in these Gr⁻(k, E) has at most 6 vertices
    for (k, e) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 0), (3, 1), (4, 0)] {
        let listed = enum_gr_minus(k, &c(e), &keys);
        ensure(listed.iter().all(|x| x.tree.len() <= 6), || format!("k={k}, E={e}: tree above 6 vertices"))?;
        for x in &listed {
            let v = x.tree.interior_vertices().len();
            let ed = x.tree.interior_edges().len();
            ensure(v == ed + 1, || format!("Euler relation fails on {}", x.tree))?;
            ensure(brute_aut(&x.tree) == x.aut, || format!("|Aut| of {}", x.tree))?;
        }
        let brute = brute_force(k, e, &labels, 6);
        let found: BTreeMap<_, _> = listed.iter().map(|x| (x.tree.canonical(), x.aut)).collect();
        ensure(found.keys().eq(brute.keys()), || format!("k={k}, E={e}: class sets differ"))?;
        for (canon, aut) in &found {
            let (count, n) = brute[canon];
            ensure(count * aut == factorial(n), || format!("k={k}, E={e}: orbit count"))?;
        }
        checked += found.len();
    }
    // Euler relation on larger enumerations
    for k in 0..=4 {
        for e in 0..=4 {
            for x in enum_gr_minus(k, &c(e), &keys) {
                ensure(x.tree.interior_vertices().len() == x.tree.interior_edges().len() + 1, || format!("{}", x.tree))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} tree classes"))
}

fn transfer_fixtures(count: usize) -> Vec<(u64, Transfer, FilteredAInfinity)> {
    let mut out = Vec::new();
    for seed in 0u64.. {
        let cfg = if seed % 3 == 0 {
            GenerateConfig { kind: ModelKind::S3Blocks, energies: Some(vec![q(1), qf(3, 2)]), levels: 2, ..Default::default() }
        } else {
            GenerateConfig { kind: ModelKind::S1S2, energies: Some(vec![q(1)]), levels: 3, ..Default::default() }
        };
        let s = generate(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).expect("generator");
        let levels = s.monoid().elements().into_iter().filter(|e| *e > q(0)).count();
        assert_eq!(levels, 2);
        let t = Transfer::hodge(&s).expect("harmonic data");
        let can = t.canonical_model().expect("canonical model");
        if solve_mc(&can).is_ok() {
            out.push((seed, t, can));
        }
        if out.len() == count {
            return out;
        }
    }
    unreachable!()
}

fn transfer_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut solutions = 0;
    let mut flags = 0;
    for (seed, t, can) in transfer_fixtures(10) {
        let s = t.structure();
        let m10 = s.op(&s.zero_class(), 1);
        ensure(m10.is_some_and(|m| !m.is_zero()), || format!("fixture {seed}: m₁,₀ = 0"))?;
        let problems: Vec<String> = check_relations(&can).into_iter().chain(check_cyclic(&can)).collect();
        ensure(problems.is_empty(), || format!("fixture {seed}: {}", problems[0]))?;
        for i in 0..3 {
            let b = if i == 0 { solve_mc(&can).map_err(err)?.b } else { random_mc(&can, &mut rng).map_err(err)? };
            let rep = verify_transfer(&t, &can, &b).map_err(err)?;
            ensure(rep.psi_push == rep.psi_can, || format!("fixture {seed}: {} ≠ {}", rep.psi_push, rep.psi_can))?;
            ensure(rep.psi_can == rep.phi, || format!("fixture {seed}: tree sum {} ≠ {}", rep.phi, rep.psi_can))?;
            let (l, r) = t.interior_vertex_identity(&b).map_err(err)?;
            ensure(l == r, || format!("fixture {seed}: vertex identity {l} ≠ {r}"))?;
            let (l, r) = t.interior_edge_identity(&b).map_err(err)?;
            ensure(l == r, || format!("fixture {seed}: edge identity {l} ≠ {r}"))?;
            for (_, tc) in t.trees_for(&b) {
                let bad = t.flag_mismatches(&tc.tree, &b).map_err(err)?;
                ensure(bad.is_empty(), || format!("fixture {seed}: flags of {}", tc.tree))?;
                flags += tc.tree.flags().len();
            }
            solutions += 1;
        }
    }
    Ok(format!("{solutions} solutions, {flags} flags"))
}

fn coordinates(rng: &mut ChaCha8Rng, b1: usize, emin: &Rational, emax: &Rational) -> Vec<NovikovScalar> {
    (0..b1)
        .map(|_| {
            let terms = [qf(1, 2), q(1), qf(3, 2)].map(|e| (e * emin, random_rational(rng, 3, 2)));
            Novikov::from_terms(terms, emax)
        })
        .collect()
}

fn laurent_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut n = 0;
    for b1 in 1..=3 {
        for _ in 0..3 {
            let s = random_divisor_model(&mut rng, b1, 3, 4, 5).map_err(err)?;
            let emin = nonzero_classes(&s).into_iter().map(|c| c.energy).min().expect("classes");
            ensure(*s.emax() <= &emin * q(4), || "truncation above 4·E_min".into())?;
            ensure(validate(&s).is_empty() && divisor_violations(&s).map_err(err)?.is_empty(), || "bad divisor model".into())?;
            let f = psi_laurent(&s).map_err(err)?;
            let x = coordinates(&mut rng, b1, &(s.emax() / q(4)), s.emax());
            let b = cochain_from_coordinates(&s, &x).map_err(err)?;
            let delta = f.default_window().unwrap_or_else(|| q(1));
            let lhs = eval_window(&f, &exp_coordinates(&x).map_err(err)?, &delta).map_err(err)?;
            let rhs = psi(&s, &b).map_err(err)?;
            ensure(lhs == rhs, || format!("b₁ = {b1}: {lhs} ≠ {rhs}"))?;

            let cs: Vec<Rational> = (0..b1).map(|_| &delta * qf(rng.gen_range(-3..=3), 4)).collect();
            let shift = CoordinateShift::new(cs, delta.clone()).map_err(err)?;
            let g = substitute_shift(&f, &shift).map_err(err)?;
            let moved = psi_laurent(&shift_energies(&s, &shift).map_err(err)?).map_err(err)?;
            ensure(g == moved.truncate(g.emax()), || format!("b₁ = {b1}: shift covariance"))?;
            n += 1;
        }
    }
    Ok(format!("{n} divisor models"))
}

fn wall_crossing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fixtures = mc_fixtures(5);
    for (seed, s) in &fixtures {
        let classes = nonzero_classes(s);
        let cfam = random_c_family(s, &mut rng, &classes, &[0, 1, 2], 2).map_err(err)?;
        let f = integrate_isotopy(s, cfam).map_err(err)?;
        let counts = random_counts(&mut rng, &classes, 2);
        let g = corrected_isotopy(&f, &counts).map_err(err)?;
        let b0 = random_mc(s, &mut rng).map_err(err)?;
        let rep = verify_wallcross(&g, &counts, &b0).map_err(err)?;
        ensure(rep.holds(), || format!("fixture {seed}: {} ≠ {}", rep.difference, rep.expected))?;
        let mut other = counts.clone();
        for sc in &mut other.classes {
            sc.profile = Some(random_profile(&mut rng, &sc.count));
        }
        let g2 = corrected_isotopy(&f, &other).map_err(err)?;
        let rep2 = verify_wallcross(&g2, &other, &b0).map_err(err)?;
        ensure(rep2.difference == rep.difference, || format!("fixture {seed}: depends on the profile"))?;
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn rational_homology_sphere() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut n = 0;
    for seed in 0..10u64 {
        let kind = if seed % 2 == 0 { ModelKind::S3Blocks } else { ModelKind::S3 };
        let s = generate(&mut ChaCha8Rng::seed_from_u64(seed), &GenerateConfig { kind, ..Default::default() }).map_err(err)?;
        let t = Transfer::hodge(&s).map_err(err)?;
        let h = t.harmonic().basis();
        ensure(h.of_degree(1).is_empty(), || format!("seed {seed}: H¹ ≠ 0"))?;
        let can = t.canonical_model().map_err(err)?;
        let mut tree_sum = Novikov::zero(s.emax());
        for beta in nonzero_classes(&can) {
            tree_sum.add_term(beta.energy.clone(), &t.m_can_minus1(&beta));
        }
        // every solution lies in the class of f_*(0), so all give the same value
        for i in 0..4 {
            let b = if i == 0 { solve_mc(&s).map_err(err)?.b } else { random_mc(&s, &mut rng).map_err(err)? };
            let value = psi(&s, &b).map_err(err)?;
            ensure(value == tree_sum, || format!("seed {seed}: Ψ(b) = {value}, tree sum {tree_sum}"))?;
        }
        n += 1;
    }
    Ok(format!("{n} fixtures"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 9] = [
        ("generator soundness", generator_soundness, Some(60)),
        ("critical-point equivalence", critical_points, None),
        ("gauge invariance", gauge_invariance, None),
        ("pseudo-isotopy invariance", isotopy_invariance, None),
        ("tree calculus", tree_calculus, Some(120)),
        ("transfer theorem", transfer_theorem, None),
        ("Laurent structure", laurent_structure, None),
        ("wall crossing", wall_crossing, None),
        ("H¹ = 0 invariant", rational_homology_sphere, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if took > Duration::from_secs(*limit) {
                outcome = Err(format!("took {took:.1?}, limit {limit} s"));
            }
        }
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: pass ({detail}; {took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: fail ({why}; {took:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
