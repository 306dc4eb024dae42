//! JSON documents for structures, c-families and sphere counts. Every rational
//! is a `[numerator, denominator]` pair; integers that do not fit in 64 bits
//! are written as decimal strings.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ainf::{
    degree_violations, tensor_cyclic_violations, validate, ClassKey, ClassLabel, FilteredAInfinity, OperationTensor,
};
use crate::coeff::{Rational, TPoly};
use crate::error::{Error, Result};
use crate::graded::{GradedBasis, Pairing};
use crate::novikov::{EnergyMonoid, NovVec, Novikov};
use crate::pseudoiso::TimeOps;
use crate::wallcross::{SphereClass, SphereCountData};

/// A rational in document form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => json!(n.to_string()),
    }
}

fn parse_int(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn rational_value(x: &Rational) -> Value {
    json!([int_value(x.numer()), int_value(x.denom())])
}

pub fn parse_rational_value(v: &Value) -> Option<Rational> {
    let pair = v.as_array()?;
    if pair.len() != 2 {
        return None;
    }
    let (n, d) = (parse_int(&pair[0])?, parse_int(&pair[1])?);
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_value(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        parse_rational_value(&v)
            .map(Q)
            .ok_or_else(|| de::Error::custom(format!("expected [numerator, denominator], found {v}")))
    }
}

/// `Σ c T^e` as `[[c_num, c_den, e_num, e_den], …]`.
pub fn novikov_value(x: &Novikov<Rational>) -> Value {
    Value::Array(
        x.terms()
            .iter()
            .map(|(e, c)| json!([int_value(c.numer()), int_value(c.denom()), int_value(e.numer()), int_value(e.denom())]))
            .collect(),
    )
}

/// Nonzero components of a cochain, keyed by basis name.
pub fn cochain_value(s: &FilteredAInfinity, b: &NovVec<Rational>) -> Value {
    let mut out = serde_json::Map::new();
    for (i, c) in b.comps().iter().enumerate() {
        if !c.is_zero() {
            out.insert(s.basis().name(i).to_string(), novikov_value(c));
        }
    }
    Value::Object(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyDoc {
    pub energy: Q,
    #[serde(default)]
    pub boundary: Vec<i64>,
}

impl KeyDoc {
    pub fn from_key(k: &ClassKey) -> Self {
        KeyDoc { energy: Q(k.energy.clone()), boundary: k.boundary.clone() }
    }

    pub fn key(&self) -> ClassKey {
        ClassKey::new(self.energy.0.clone(), self.boundary.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassDoc {
    pub name: String,
    pub energy: Q,
    #[serde(default)]
    pub boundary: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spheres: Vec<String>,
}

/// One cyclic tensor; entries are `[[x₀, …, x_k], value]` with basis names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpDoc<V = Q> {
    pub class: KeyDoc,
    pub arity: usize,
    pub entries: Vec<(Vec<String>, V)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minus1Doc {
    pub class: KeyDoc,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureDocument {
    /// Dimension of the underlying manifold.
    pub dim: i32,
    pub basis: Vec<(String, i32)>,
    pub pairing: Vec<Vec<Q>>,
    pub generators: Vec<Q>,
    pub emax: Q,
    pub kmax: usize,
    pub b1: usize,
    #[serde(default)]
    pub classes: Vec<ClassDoc>,
    #[serde(default)]
    pub ops: Vec<OpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus1: Option<Vec<Minus1Doc>>,
}

fn perr(path: impl Into<String>, msg: impl ToString) -> Error {
    Error::Parse { path: path.into(), msg: msg.to_string() }
}

fn tuple_indices(s: &FilteredAInfinity, names: &[String], path: &str) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| s.basis().index_of(n).ok_or_else(|| perr(path, format!("unknown basis element {n:?}"))))
        .collect()
}

fn check_class(s: &FilteredAInfinity, key: &ClassKey, path: &str) -> Result<()> {
    if key.b1() != s.b1() {
        return Err(perr(path, format!("boundary has {} entries, expected {}", key.b1(), s.b1())));
    }
    if !s.monoid().contains(&key.energy) {
        return Err(perr(path, format!("energy {} is not in the monoid below {}", key.energy, s.emax())));
    }
    Ok(())
}

/// Builds the structure, rejecting format errors, unknown names, classes
/// outside the monoid and tensors that break cyclic symmetry or the degree
/// rule. The A∞ relations are not checked here.
pub fn read_structure(doc: &StructureDocument) -> Result<FilteredAInfinity> {
    let basis = GradedBasis::new(doc.basis.clone(), doc.dim).map_err(|e| perr("basis", e))?;
    if doc.pairing.len() != basis.len() || doc.pairing.iter().any(|r| r.len() != basis.len()) {
        return Err(perr("pairing", format!("expected a {0}×{0} matrix", basis.len())));
    }
    let matrix = doc.pairing.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
    let gens = doc.generators.iter().map(|x| x.0.clone()).collect();
    let monoid = EnergyMonoid::new(gens, doc.emax.0.clone()).map_err(|e| perr("generators", e))?;
    let mut s = FilteredAInfinity::new(basis, Pairing::new(matrix), monoid, doc.kmax, doc.b1).map_err(|e| perr("pairing", e))?;
    for (i, c) in doc.classes.iter().enumerate() {
        let path = format!("classes[{i}]");
        let key = ClassKey::new(c.energy.0.clone(), c.boundary.clone());
        check_class(&s, &key, &path)?;
        let mut label = ClassLabel::new(c.name.clone(), key);
        label.sphere_preimages = c.spheres.clone();
        s.add_class(label).map_err(|e| perr(&path, e))?;
    }
    let shifted = s.shifted_degrees();
    for (i, op) in doc.ops.iter().enumerate() {
        let path = format!("ops[{i}]");
        let key = op.class.key();
        check_class(&s, &key, &format!("{path}.class"))?;
        let mut entries = BTreeMap::new();
        for (j, (names, v)) in op.entries.iter().enumerate() {
            let epath = format!("{path}.entries[{j}]");
            if names.len() != op.arity + 1 {
                return Err(perr(epath, format!("{} slots for arity {}", names.len(), op.arity)));
            }
            let t = tuple_indices(&s, names, &epath)?;
            if entries.insert(t, v.0.clone()).is_some() {
                return Err(perr(epath, "duplicate entry"));
            }
        }
        if let Some(t) = degree_violations(&entries, &shifted, 1).first() {
            let j = op.entries.iter().position(|(n, _)| tuple_indices(&s, n, "").ok().as_ref() == Some(t)).unwrap_or(0);
            return Err(perr(format!("{path}.entries[{j}]"), "entry breaks the degree rule"));
        }
        if let Some((t, expected, actual)) = tensor_cyclic_violations(&entries, &shifted).first() {
            let names: Vec<&str> = t.iter().map(|&i| s.basis().name(i)).collect();
            return Err(perr(
                format!("{path}.entries"),
                format!("not cyclic at [{}]: expected {expected}, found {actual}", names.join(", ")),
            ));
        }
        let tensor = OperationTensor::from_entries(op.arity, entries, s.pairing()).map_err(|e| perr(&path, e))?;
        s.set_op(key, tensor).map_err(|e| perr(&path, e))?;
    }
    if let Some(m) = &doc.minus1 {
        s.make_inhomogeneous();
        for (i, e) in m.iter().enumerate() {
            let key = e.class.key();
            check_class(&s, &key, &format!("minus1[{i}].class"))?;
            s.set_minus1(key, e.value.0.clone());
        }
    }
    Ok(s)
}

/// [`read_structure`] followed by the A∞ and cyclicity checks.
pub fn parse_structure(doc: &StructureDocument) -> Result<FilteredAInfinity> {
    let s = read_structure(doc)?;
    let problems = validate(&s);
    if let Some(p) = problems.first() {
        return Err(perr("ops", p));
    }
    Ok(s)
}

pub fn parse_structure_json(text: &str) -> Result<FilteredAInfinity> {
    let doc: StructureDocument = serde_json::from_str(text).map_err(|e| perr("document", e))?;
    parse_structure(&doc)
}

fn names_of(s: &FilteredAInfinity, t: &[usize]) -> Vec<String> {
    t.iter().map(|&i| s.basis().name(i).to_string()).collect()
}

pub fn emit_structure(s: &FilteredAInfinity) -> StructureDocument {
    let q = |x: &Rational| Q(x.clone());
    StructureDocument {
        dim: s.basis().dim(),
        basis: (0..s.dim()).map(|i| (s.basis().name(i).to_string(), s.basis().degree(i))).collect(),
        pairing: s.pairing().matrix().iter().map(|r| r.iter().map(q).collect()).collect(),
        generators: s.monoid().generators().iter().map(q).collect(),
        emax: q(s.emax()),
        kmax: s.kmax(),
        b1: s.b1(),
        classes: s
            .classes()
            .iter()
            .map(|c| ClassDoc {
                name: c.name.clone(),
                energy: q(&c.key.energy),
                boundary: c.key.boundary.clone(),
                spheres: c.sphere_preimages.clone(),
            })
            .collect(),
        ops: s
            .ops()
            .iter()
            .map(|((key, k), op)| OpDoc {
                class: KeyDoc::from_key(key),
                arity: *k,
                entries: op.entries().iter().map(|(t, v)| (names_of(s, t), q(v))).collect(),
            })
            .collect(),
        minus1: s.minus1().map(|m| {
            m.iter().map(|(k, v)| Minus1Doc { class: KeyDoc::from_key(k), value: q(v) }).collect()
        }),
    }
}

/// A `c`-family: tensors whose entries are polynomials in `t`, given by their
/// coefficient lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CFamilyDocument {
    pub ops: Vec<OpDoc<Vec<Q>>>,
}

pub fn read_c_family(s: &FilteredAInfinity, doc: &CFamilyDocument) -> Result<TimeOps> {
    let mut out = TimeOps::new();
    for (i, op) in doc.ops.iter().enumerate() {
        let path = format!("ops[{i}]");
        let key = op.class.key();
        check_class(s, &key, &format!("{path}.class"))?;
        let mut entries = BTreeMap::new();
        for (j, (names, v)) in op.entries.iter().enumerate() {
            let epath = format!("{path}.entries[{j}]");
            if names.len() != op.arity + 1 {
                return Err(perr(epath, format!("{} slots for arity {}", names.len(), op.arity)));
            }
            let t = tuple_indices(s, names, &epath)?;
            entries.insert(t, TPoly::new(v.iter().map(|x| x.0.clone()).collect()));
        }
        let tensor = OperationTensor::from_entries(op.arity, entries, s.pairing()).map_err(|e| perr(&path, e))?;
        out.insert((key, op.arity), tensor);
    }
    Ok(out)
}

pub fn emit_c_family(s: &FilteredAInfinity, c: &TimeOps) -> CFamilyDocument {
    CFamilyDocument {
        ops: c
            .iter()
            .map(|((key, k), op)| OpDoc {
                class: KeyDoc::from_key(key),
                arity: *k,
                entries: op
                    .entries()
                    .iter()
                    .map(|(t, p)| (names_of(s, t), p.coeffs().iter().map(|x| Q(x.clone())).collect()))
                    .collect(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereDoc {
    pub name: String,
    pub energy: Q,
    pub count: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Q>>,
    pub target: KeyDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountsDocument {
    pub spheres: Vec<SphereDoc>,
}

pub fn read_counts(doc: &CountsDocument) -> Result<SphereCountData> {
    let classes = doc
        .spheres
        .iter()
        .map(|d| SphereClass {
            name: d.name.clone(),
            energy: d.energy.0.clone(),
            count: d.count.0.clone(),
            profile: d.profile.as_ref().map(|p| TPoly::new(p.iter().map(|x| x.0.clone()).collect())),
            target: d.target.key(),
        })
        .collect();
    SphereCountData::new(classes).map_err(|e| perr("spheres", e))
}

pub fn emit_counts(c: &SphereCountData) -> CountsDocument {
    CountsDocument {
        spheres: c
            .classes
            .iter()
            .map(|c| SphereDoc {
                name: c.name.clone(),
                energy: Q(c.energy.clone()),
                count: Q(c.count.clone()),
                profile: c.profile.as_ref().map(|p| p.coeffs().iter().map(|x| Q(x.clone())).collect()),
                target: KeyDoc::from_key(&c.target),
            })
            .collect(),
    }
}
