//! Batch front end: structure files in, verification reports out.

pub mod document;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ainf::{check_cyclic, check_gapped_degrees, check_relations, ClassKey, FilteredAInfinity};
use crate::coeff::{q, Rational};
use crate::error::{Error, Result};
use crate::laurent::{
    cochain_from_coordinates, divisor_violations, eval_window, exp_coordinates, psi_laurent, random_divisor_model,
    shift_energies, substitute_shift, CoordinateShift,
};
use crate::mc::{gauge_flow, mc_residual, mc_residual_family, random_gauge_generator, solve_mc};
use crate::models::{generate, GenerateConfig, ModelKind};
use crate::novikov::{EnergyMonoid, Novikov, NovikovScalar};
use crate::pseudoiso::{check_isotopy, integrate_isotopy, invariance_report, random_c_family};
use crate::superpotential::{d_psi, psi, psi_along_path, psi_prime};
use crate::transfer::{verify_transfer, Transfer};
use crate::trees::enum_gr_minus;
use crate::wallcross::{corrected_isotopy, random_counts, verify_wallcross};

use document::{
    cochain_value, emit_c_family, emit_counts, emit_structure, novikov_value, parse_structure, rational_value,
    read_c_family, read_counts, read_structure, CFamilyDocument, CountsDocument, StructureDocument,
};

#[derive(Debug, Parser)]
#[command(name = "ainf", version, about = "Exact checks for gapped cyclic filtered A-infinity algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Truncation energy; lowers the fixture's truncation when smaller.
    #[arg(long, global = true)]
    pub emax: Option<String>,
    /// Largest arity kept in sums.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Structure document; a fixture is generated from the seed when absent.
    #[arg(long, global = true)]
    pub fixture: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Degree rule, monoid membership, cyclic symmetry and A∞ relations.
    Check,
    /// Solves the Maurer–Cartan equation level by level.
    SolveMc,
    /// The potential at the solver's bounding cochain.
    Psi,
    /// Gauge invariance of Ψ′ along random gauge flows.
    Gauge {
        /// Number of random generators.
        #[arg(long, default_value_t = 3)]
        count: usize,
        /// Degree in t of the generator coefficients.
        #[arg(long, default_value_t = 3)]
        tdeg: usize,
    },
    /// Integrates a pseudo-isotopy and checks invariance of Ψ′ + m₋₁.
    Isotopy {
        /// c-family document; a random one is drawn from the seed when absent.
        #[arg(long)]
        c_family: Option<PathBuf>,
    },
    /// Canonical model by homotopy transfer and the tree formula.
    Transfer,
    /// Lists Gr⁻(k, β) with automorphism orders.
    Trees {
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Total energy, e.g. `2`, `3/2` or `2e1` (a multiple of the first label).
        #[arg(long)]
        beta: String,
        /// Comma-separated label energies; defaults to 1, 2, … up to β.
        #[arg(long)]
        labels: Option<String>,
    },
    /// Wall-crossing jump along a corrected pseudo-isotopy.
    Wallcross {
        /// Sphere count document; random counts when absent.
        #[arg(long)]
        counts: Option<PathBuf>,
    },
    /// Laurent form of the potential on a divisor model.
    Laurent {
        #[arg(long, default_value_t = 2)]
        b1: usize,
        /// Number of random disc classes.
        #[arg(long, default_value_t = 3)]
        classes: usize,
    },
    /// Emits a random valid fixture.
    Generate {
        #[arg(long, default_value = "s3-blocks")]
        kind: String,
        /// Truncation as a multiple of the least energy.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Comma-separated class energies.
        #[arg(long)]
        energies: Option<String>,
        /// Write the fixture here instead of into the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::SolveMc => "solve-mc",
            Command::Psi => "psi",
            Command::Gauge { .. } => "gauge",
            Command::Isotopy { .. } => "isotopy",
            Command::Transfer => "transfer",
            Command::Trees { .. } => "trees",
            Command::Wallcross { .. } => "wallcross",
            Command::Laurent { .. } => "laurent",
            Command::Generate { .. } => "generate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<CheckResult>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip)]
    text_values: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), checks: Vec::new(), values: BTreeMap::new(), text_values: Vec::new() }
    }

    pub fn check(&mut self, name: &str, pass: bool, witness: Option<String>) {
        self.checks.push(CheckResult { name: name.into(), pass, witness: if pass { None } else { witness } });
    }

    /// A check that passes when `problems` is empty; the first one is the witness.
    pub fn check_empty(&mut self, name: &str, problems: &[String]) {
        self.check(name, problems.is_empty(), problems.first().cloned());
    }

    pub fn value(&mut self, name: &str, text: impl ToString, json: Value) {
        self.text_values.push((name.into(), text.to_string()));
        self.values.insert(name.into(), json);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for c in &self.checks {
            let _ = writeln!(out, "{}: {}", c.name, if c.pass { "pass" } else { "fail" });
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "  witness: {w}");
            }
        }
        for (k, v) in &self.text_values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `a`, `a/b`, or `ne1` (`n` copies of `unit`).
pub fn parse_rational(s: &str, unit: &Rational) -> Result<Rational> {
    let err = || Error::Parse { path: "argument".into(), msg: format!("not a rational: {s:?}") };
    let s = s.trim();
    if let Some(n) = s.strip_suffix("e1") {
        let n = if n.is_empty() { q(1) } else { parse_rational(n, unit)? };
        return Ok(n * unit);
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| err())?, d.trim().parse().map_err(|_| err())?);
            if d == 0 {
                return Err(err());
            }
            Ok(Rational::new(n.into(), d.into()))
        }
        None => Ok(q(s.parse().map_err(|_| err())?)),
    }
}

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|x| parse_rational(x, &q(1))).collect()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse { path: path.display().to_string(), msg: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.display().to_string(), msg: e.to_string() })
}

fn rng_for(common: &Common) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(common.seed)
}

fn apply_overrides(mut s: FilteredAInfinity, common: &Common) -> Result<FilteredAInfinity> {
    if let Some(e) = &common.emax {
        let e = parse_rational(e, &q(1))?;
        if e < *s.emax() {
            s = s.with_monoid(EnergyMonoid::new(s.monoid().generators().to_vec(), e)?);
        }
    }
    if let Some(k) = common.kmax {
        s.set_kmax(k);
    }
    Ok(s)
}

/// The `--fixture` document (format checks only) or a generated fixture.
fn load_lenient(common: &Common) -> Result<FilteredAInfinity> {
    let s = match &common.fixture {
        Some(p) => read_structure(&read_json::<StructureDocument>(p)?)?,
        None => generate(&mut rng_for(common), &GenerateConfig::default())?,
    };
    apply_overrides(s, common)
}

/// Like [`load_lenient`] but rejects structures that fail validation.
fn load(common: &Common) -> Result<FilteredAInfinity> {
    let s = match &common.fixture {
        Some(p) => parse_structure(&read_json::<StructureDocument>(p)?)?,
        None => generate(&mut rng_for(common), &GenerateConfig::default())?,
    };
    apply_overrides(s, common)
}

fn nonzero_classes(s: &FilteredAInfinity) -> Vec<ClassKey> {
    s.all_classes().into_iter().filter(|c| !c.is_zero()).collect()
}

fn novikov_entry(r: &mut Report, name: &str, x: &NovikovScalar) {
    r.value(name, x, novikov_value(x));
}

fn structure_checks(r: &mut Report, s: &FilteredAInfinity) {
    r.check_empty("degrees and monoid", &check_gapped_degrees(s));
    r.check_empty("cyclic symmetry", &check_cyclic(s));
    r.check_empty("A∞ relations", &check_relations(s));
}

fn run_check(common: &Common) -> Result<Report> {
    let s = load_lenient(common)?;
    let mut r = Report::new("check");
    structure_checks(&mut r, &s);
    r.value("dimension", s.dim(), json!(s.dim()));
    r.value("operations", s.ops().len(), json!(s.ops().len()));
    Ok(r)
}

fn run_solve_mc(common: &Common) -> Result<Report> {
    let s = load(common)?;
    let mut r = Report::new("solve-mc");
    match solve_mc(&s) {
        Ok(sol) => {
            r.check("Maurer–Cartan solution", mc_residual(&s, &sol.b)?.is_zero(), None);
            let dims: Vec<Value> =
                sol.levels.iter().map(|l| json!({"energy": rational_value(&l.energy), "free": l.dimension})).collect();
            let text: Vec<String> = sol.levels.iter().map(|l| format!("{}:{}", l.energy, l.dimension)).collect();
            r.value("free directions", text.join(" "), Value::Array(dims));
            let btext: Vec<String> = sol
                .b
                .comps()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{}: {}", s.basis().name(i), c))
                .collect();
            r.value("b", btext.join(", "), cochain_value(&s, &sol.b));
        }
        Err(e) => r.check("Maurer–Cartan solution", false, Some(e.to_string())),
    }
    Ok(r)
}

fn run_psi(common: &Common) -> Result<Report> {
    let s = load(common)?;
    let mut r = Report::new("psi");
    let sol = match solve_mc(&s) {
        Ok(sol) => sol,
        Err(e) => {
            r.check("Maurer–Cartan solution", false, Some(e.to_string()));
            return Ok(r);
        }
    };
    r.check("Maurer–Cartan solution", true, None);
    let grad = d_psi(&s, &sol.b)?;
    r.check("dΨ′(b) = 0", grad.iter().all(Novikov::is_zero), None);
    novikov_entry(&mut r, "Ψ′(b)", &psi_prime(&s, &sol.b)?);
    novikov_entry(&mut r, "Ψ(b)", &psi(&s, &sol.b)?);
    Ok(r)
}

fn run_gauge(common: &Common, count: usize, tdeg: usize) -> Result<Report> {
    let s = load(common)?;
    let mut r = Report::new("gauge");
    let b0 = solve_mc(&s)?.b;
    let start = psi_prime(&s, &b0)?;
    let mut rng = rng_for(common);
    let mut end_ok = true;
    let mut residual_ok = true;
    let mut witness = None;
    for i in 0..count {
        let c = random_gauge_generator(&s, &mut rng, tdeg);
        let path = gauge_flow(&s, &b0, &c)?;
        if !mc_residual_family(&s, &path).is_zero() {
            residual_ok = false;
        }
        let end = psi_prime(&s, &path.eval_t(&q(1)))?;
        if end != start || psi_along_path(&s, &path).is_err() {
            end_ok = false;
            witness.get_or_insert(format!("generator {i}: Ψ′(b(1)) = {end}"));
        }
    }
    r.check("mc_residual(b(t)) ≡ 0", residual_ok, None);
    r.check("Ψ′(b(0)) = Ψ′(b(1))", end_ok, witness);
    novikov_entry(&mut r, "Ψ′(b)", &start);
    Ok(r)
}

fn run_isotopy(common: &Common, c_family: Option<&Path>) -> Result<Report> {
    let s = load(common)?;
    let mut r = Report::new("isotopy");
    let c = match c_family {
        Some(p) => read_c_family(&s, &read_json::<CFamilyDocument>(p)?)?,
        None => random_c_family(&s, &mut rng_for(common), &nonzero_classes(&s), &[0, 1, 2], 2)?,
    };
    let f = integrate_isotopy(&s, c)?;
    r.check_empty("pseudo-isotopy equations", &check_isotopy(&f));
    let b0 = solve_mc(&s)?.b;
    let inv = invariance_report(&f, &b0)?;
    r.check("Ψ′ + Σ T^E m₋₁ constant in t", inv.is_constant(), Some(format!("f(t) = {}", inv.f)));
    novikov_entry(&mut r, "invariant", &inv.at(&q(0)));
    let end = f.slice(&q(1))?;
    r.value("m¹", format!("{} tensors", end.ops().len()), serde_json::to_value(emit_structure(&end)).expect("json"));
    r.value("c", format!("{} tensors", f.c().len()), serde_json::to_value(emit_c_family(&s, f.c())).expect("json"));
    Ok(r)
}

fn run_transfer(common: &Common) -> Result<Report> {
    let s = load(common)?;
    let mut r = Report::new("transfer");
    let t = Transfer::hodge(&s)?;
    r.check_empty("harmonic data", &t.harmonic().validate(&s));
    let can = t.canonical_model()?;
    structure_checks(&mut r, &can);
    let b = match solve_mc(&can) {
        Ok(sol) => sol.b,
        Err(e) => {
            r.check("canonical Maurer–Cartan solution", false, Some(e.to_string()));
            return Ok(r);
        }
    };
    let check = verify_transfer(&t, &can, &b)?;
    r.check(
        "Ψ(f_*(b)) = Ψ^can(b)",
        check.psi_push == check.psi_can,
        Some(format!("{} vs {}", check.psi_push, check.psi_can)),
    );
    r.check("Ψ^can(b) = Σ_Γ m(Γ;b)/|Aut Γ|", check.psi_can == check.phi, Some(format!("{} vs {}", check.psi_can, check.phi)));
    let (l, rt) = t.interior_vertex_identity(&b)?;
    r.check("interior vertex identity", l == rt, Some(format!("{l} vs {rt}")));
    let (l, rt) = t.interior_edge_identity(&b)?;
    r.check("interior edge identity", l == rt, Some(format!("{l} vs {rt}")));
    let mut table = serde_json::Map::new();
    let mut text = Vec::new();
    for beta in nonzero_classes(&can) {
        let v = t.m_can_minus1(&beta);
        text.push(format!("{}: {}", beta, v));
        table.insert(beta.to_string(), rational_value(&v));
    }
    r.value("m^can₋₁", text.join(", "), Value::Object(table));
    r.value("harmonic dimension", t.harmonic().dim(), json!(t.harmonic().dim()));
    novikov_entry(&mut r, "Ψ^can(b)", &check.psi_can);
    Ok(r)
}

fn run_trees(k: usize, beta: &str, labels: Option<&str>) -> Result<Report> {
    let labels: Vec<Rational> = match labels {
        Some(l) => parse_list(l)?,
        None => Vec::new(),
    };
    let unit = labels.first().cloned().unwrap_or_else(|| q(1));
    let energy = parse_rational(beta, &unit)?;
    let labels = if labels.is_empty() {
        let mut out = Vec::new();
        let mut e = unit.clone();
        while e <= energy {
            out.push(e.clone());
            e += &unit;
        }
        out
    } else {
        labels
    };
    let keys: Vec<ClassKey> = labels.iter().map(|e| ClassKey::new(e.clone(), vec![])).collect();
    let classes = enum_gr_minus(k, &ClassKey::new(energy.clone(), vec![]), &keys);
    let mut r = Report::new("trees");
    let euler = classes.iter().all(|c| {
        let v = c.tree.interior_vertices().len() as i64;
        let e = c.tree.interior_edges().len() as i64;
        v - e == 1
    });
    r.check("#C₀^int − #C₁^int = 1", euler, None);
    let list: Vec<Value> = classes.iter().map(|c| json!({"tree": c.tree.to_string(), "aut": c.aut})).collect();
    let text: Vec<String> = classes.iter().map(|c| format!("{} (|Aut| = {})", c.tree, c.aut)).collect();
    r.value("count", classes.len(), json!(classes.len()));
    r.value("classes", format!("\n  {}", text.join("\n  ")), Value::Array(list));
    Ok(r)
}

fn run_wallcross(common: &Common, counts: Option<&Path>) -> Result<Report> {
    let s = load(common)?;
    let mut r = Report::new("wallcross");
    let mut rng = rng_for(common);
    let classes = nonzero_classes(&s);
    let c = random_c_family(&s, &mut rng, &classes, &[0, 1, 2], 2)?;
    let f = integrate_isotopy(&s, c)?;
    let counts = match counts {
        Some(p) => read_counts(&read_json::<CountsDocument>(p)?)?,
        None => random_counts(&mut rng, &classes, 2),
    };
    let g = corrected_isotopy(&f, &counts)?;
    r.check_empty("corrected pseudo-isotopy", &crate::wallcross::check_corrected(&g, &counts));
    let b0 = solve_mc(&s)?.b;
    let rep = verify_wallcross(&g, &counts, &b0)?;
    r.check(
        "Ψ(I_*(b)) − Ψ(b) = Σ T^{α∩ω} n(α)",
        rep.holds(),
        Some(format!("{} vs {}", rep.difference, rep.expected)),
    );
    novikov_entry(&mut r, "difference", &rep.difference);
    r.value("counts", format!("{} classes", counts.classes.len()), serde_json::to_value(emit_counts(&counts)).expect("json"));
    Ok(r)
}

fn run_laurent(common: &Common, b1: usize, count: usize) -> Result<Report> {
    let mut rng = rng_for(common);
    let s = match &common.fixture {
        Some(_) => load(common)?,
        None => apply_overrides(random_divisor_model(&mut rng, b1, count, 4, 5)?, common)?,
    };
    let mut r = Report::new("laurent");
    r.check_empty("divisor axiom", &divisor_violations(&s)?);
    let f = psi_laurent(&s)?;
    let emin = s.classes().iter().map(|c| c.key.energy.clone()).min().unwrap_or_else(|| q(1));
    let x: Vec<NovikovScalar> = (0..s.b1())
        .map(|i| Novikov::from_terms([(&emin / q(2), q(i as i64 + 1)), (emin.clone(), q(-1))], s.emax()))
        .collect();
    let b = cochain_from_coordinates(&s, &x)?;
    let delta = f.default_window().unwrap_or_else(|| q(1));
    let lhs = eval_window(&f, &exp_coordinates(&x)?, &delta)?;
    let rhs = psi(&s, &b)?;
    r.check("Ψ_L(exp x) = Ψ(b)", lhs == rhs, Some(format!("{lhs} vs {rhs}")));
    let c: Vec<Rational> = (0..s.b1()).map(|i| &delta * Rational::new((i as i64 + 1).into(), (2 * s.b1() as i64 + 2).into())).collect();
    let shift = CoordinateShift::new(c, delta.clone())?;
    let g = substitute_shift(&f, &shift)?;
    let moved = psi_laurent(&shift_energies(&s, &shift)?)?;
    r.check("shift covariance", g == moved.truncate(g.emax()), None);
    let terms: Vec<Value> = f
        .terms()
        .iter()
        .map(|((e, n), c)| json!({"energy": rational_value(e), "exponent": n, "coeff": rational_value(c)}))
        .collect();
    let text: Vec<String> = f.terms().iter().map(|((e, n), c)| format!("{c}·T^{e}·y^{n:?}")).collect();
    r.value("Ψ_L", text.join(" + "), Value::Array(terms));
    r.value("δ", &delta, rational_value(&delta));
    Ok(r)
}

fn run_generate(common: &Common, kind: &str, levels: usize, energies: Option<&str>, out: Option<&Path>) -> Result<Report> {
    let kind = ModelKind::parse(kind).ok_or_else(|| Error::Config(format!("unknown model kind {kind:?}")))?;
    let cfg = GenerateConfig {
        kind,
        energies: energies.map(parse_list).transpose()?,
        levels,
        kmax: common.kmax.unwrap_or(5),
        ..Default::default()
    };
    let s = generate(&mut rng_for(common), &cfg)?;
    let mut r = Report::new("generate");
    structure_checks(&mut r, &s);
    let doc = serde_json::to_value(emit_structure(&s)).expect("json");
    match out {
        Some(p) => {
            let text = serde_json::to_string_pretty(&doc).expect("json");
            std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            r.value("written", p.display(), json!(p.display().to_string()));
        }
        None => r.value("fixture", "see JSON report", doc),
    }
    Ok(r)
}

/// Runs one command. Errors from the modules become failed checks, so a
/// report is produced whenever the inputs could be read.
pub fn run(cli: &Cli) -> Result<Report> {
    let common = &cli.common;
    let result = match &cli.command {
        Command::Check => run_check(common),
        Command::SolveMc => run_solve_mc(common),
        Command::Psi => run_psi(common),
        Command::Gauge { count, tdeg } => run_gauge(common, *count, *tdeg),
        Command::Isotopy { c_family } => run_isotopy(common, c_family.as_deref()),
        Command::Transfer => run_transfer(common),
        Command::Trees { k, beta, labels } => run_trees(*k, beta, labels.as_deref()),
        Command::Wallcross { counts } => run_wallcross(common, counts.as_deref()),
        Command::Laurent { b1, classes } => run_laurent(common, *b1, *classes),
        Command::Generate { kind, levels, energies, out } => {
            run_generate(common, kind, *levels, energies.as_deref(), out.as_deref())
        }
    };
    match result {
        Err(e @ Error::Parse { .. }) => Err(e),
        Err(e) => {
            let mut r = Report::new(cli.command.name());
            r.check("run", false, Some(e.to_string()));
            Ok(r)
        }
        ok => ok,
    }
}

#[cfg(test)]
mod tests;
