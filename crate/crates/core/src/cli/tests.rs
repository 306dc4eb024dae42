use super::document::*;
use super::*;
use crate::coeff::qf;
use num_traits::Zero;

fn cli(args: &[&str]) -> Cli {
    let mut full = vec!["ainf"];
    full.extend_from_slice(args);
    Cli::try_parse_from(full).unwrap()
}

fn fixture(seed: u64) -> FilteredAInfinity {
    generate(&mut ChaCha8Rng::seed_from_u64(seed), &GenerateConfig::default()).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ainf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn rationals_are_integer_pairs() {
    let v = serde_json::to_value(Q(qf(-3, 4))).unwrap();
    assert_eq!(v, json!([-3, 4]));
    let big = Rational::new(num_bigint::BigInt::from(10).pow(30), 7.into());
    let v = serde_json::to_value(Q(big.clone())).unwrap();
    assert_eq!(v, json!(["1000000000000000000000000000000", 7]));
    assert_eq!(serde_json::from_value::<Q>(v).unwrap().0, big);
    assert!(serde_json::from_value::<Q>(json!([1, 0])).is_err());
    assert!(serde_json::from_value::<Q>(json!(0.5)).is_err());
}

#[test]
fn structure_round_trip() {
    for seed in 0..4 {
        let s = fixture(seed);
        let doc = emit_structure(&s);
        let text = serde_json::to_string(&doc).unwrap();
        let back = parse_structure_json(&text).unwrap();
        assert_eq!(emit_structure(&back), doc);
        assert_eq!(back.ops(), s.ops());
        assert_eq!(back.minus1(), s.minus1());
    }
}

#[test]
fn non_cyclic_entry_is_rejected_with_its_path() {
    let mut doc = emit_structure(&fixture(2));
    let (i, j) = doc
        .ops
        .iter()
        .enumerate()
        .find_map(|(i, op)| {
            op.entries.iter().position(|(t, _)| t.len() > 1 && t.iter().any(|x| x != &t[0])).map(|j| (i, j))
        })
        .expect("a tensor with a nontrivial orbit");
    doc.ops[i].entries[j].1 = Q(&doc.ops[i].entries[j].1 .0 + q(1));
    match read_structure(&doc) {
        Err(Error::Parse { path, msg }) => {
            assert_eq!(path, format!("ops[{i}].entries"));
            assert!(msg.contains("not cyclic"), "{msg}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn energy_outside_monoid_is_rejected() {
    let mut doc = emit_structure(&fixture(2));
    let e = doc.generators[0].0.clone() / q(3);
    doc.ops[0].class.energy = Q(e.clone());
    assert!(matches!(read_structure(&doc), Err(Error::Parse { ref path, .. }) if path == "ops[0].class"));
    let mut doc = emit_structure(&fixture(2));
    doc.classes[0].energy = Q(e);
    assert!(matches!(read_structure(&doc), Err(Error::Parse { ref path, .. }) if path == "classes[0]"));
}

#[test]
fn unknown_names_and_broken_relations() {
    let mut doc = emit_structure(&fixture(3));
    doc.ops[0].entries[0].0[0] = "nope".into();
    let err = read_structure(&doc).unwrap_err();
    assert!(err.to_string().contains("unknown basis element"), "{err}");

    // scaling a whole tensor keeps it cyclic but breaks the relations
    let mut doc = emit_structure(&fixture(3));
    let i = doc.ops.iter().position(|op| !op.class.energy.0.is_zero()).unwrap();
    for e in &mut doc.ops[i].entries {
        e.1 = Q(&e.1 .0 * q(2));
    }
    assert!(read_structure(&doc).is_ok());
    assert!(parse_structure(&doc).is_err());
    let p = temp_file("broken.json", &serde_json::to_string(&doc).unwrap());
    let r = run(&cli(&["check", "--fixture", p.to_str().unwrap()])).unwrap();
    assert!(!r.passed());
    assert!(r.text().contains("A∞ relations: fail"));
}

#[test]
fn transfer_report_states_the_theorem() {
    let r = run(&cli(&["transfer", "--seed", "3"])).unwrap();
    assert!(r.passed(), "{}", r.text());
    assert!(r.text().contains("Ψ(f_*(b)) = Ψ^can(b): pass"));
}

#[test]
fn trees_at_twice_the_generator() {
    let r = run(&cli(&["trees", "--k", "0", "--beta", "2e1"])).unwrap();
    assert_eq!(r.values["count"], json!(2));
    let mut auts: Vec<u64> =
        r.values["classes"].as_array().unwrap().iter().map(|c| c["aut"].as_u64().unwrap()).collect();
    auts.sort();
    assert_eq!(auts, vec![1, 2]);
}

#[test]
fn generate_then_check() {
    let p = std::env::temp_dir().join(format!("ainf-gen-{}.json", std::process::id()));
    let g = run(&cli(&["generate", "--seed", "7", "--out", p.to_str().unwrap()])).unwrap();
    assert!(g.passed());
    let r = run(&cli(&["check", "--fixture", p.to_str().unwrap()])).unwrap();
    assert!(r.passed(), "{}", r.text());
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["psi", "--seed", "5"],
        vec!["gauge", "--seed", "5", "--count", "2"],
        vec!["isotopy", "--seed", "5"],
        vec!["wallcross", "--seed", "5"],
        vec!["laurent", "--seed", "5"],
    ] {
        let a = run(&cli(&args)).unwrap();
        let b = run(&cli(&args)).unwrap();
        assert!(a.passed(), "{}", a.text());
        assert_eq!(a.json(), b.json());
        assert_eq!(a.text(), b.text());
    }
}

#[test]
fn c_family_and_counts_files_are_used() {
    let s = fixture(4);
    let f = temp_file("s.json", &serde_json::to_string(&emit_structure(&s)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let classes = nonzero_classes(&s);
    let c = random_c_family(&s, &mut rng, &classes, &[0, 1], 1).unwrap();
    let cdoc = emit_c_family(&s, &c);
    assert_eq!(read_c_family(&s, &cdoc).unwrap(), c);
    let cp = temp_file("c.json", &serde_json::to_string(&cdoc).unwrap());
    let r = run(&cli(&["isotopy", "--fixture", f.to_str().unwrap(), "--c-family", cp.to_str().unwrap()])).unwrap();
    assert!(r.passed(), "{}", r.text());

    let counts = random_counts(&mut rng, &classes[..1], 2);
    let ndoc = emit_counts(&counts);
    assert_eq!(read_counts(&ndoc).unwrap(), counts);
    let np = temp_file("n.json", &serde_json::to_string(&ndoc).unwrap());
    let r = run(&cli(&["wallcross", "--fixture", f.to_str().unwrap(), "--counts", np.to_str().unwrap()])).unwrap();
    assert!(r.passed(), "{}", r.text());
    let expected = counts.jump(s.emax());
    assert_eq!(r.values["difference"], novikov_value(&expected));
}

#[test]
fn overrides_and_argument_parsing() {
    assert_eq!(parse_rational("3/2", &q(1)).unwrap(), qf(3, 2));
    assert_eq!(parse_rational("2e1", &qf(1, 2)).unwrap(), q(1));
    assert!(parse_rational("x", &q(1)).is_err());
    let common = Common { emax: Some("1".into()), kmax: Some(3), seed: 2, fixture: None, report: None };
    let s = load(&common).unwrap();
    assert_eq!(s.emax(), &q(1));
    assert_eq!(s.kmax(), 3);
}
