//! Monodromy characters, value modules and the local polydisc model.
//!
//! Branch and coordinate indices are 0-based throughout the Rust API; the
//! serialized forms (CLI reports, golden files) use 1-based indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest supported coordinate count; factor sets are stored as `u32` masks.
pub const MAX_DIM: usize = 31;

/// Monodromy exponents `kappa_i` in `[0, 1)`, one per log branch.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Character(Vec<Rational>);

impl Character {
    pub fn new(kappa: Vec<Rational>) -> Result<Self> {
        for (i, k) in kappa.iter().enumerate() {
            if k.is_negative() || *k >= Rational::one() {
                return Err(Error::Config(format!("kappa[{}] = {k} is outside [0, 1)", i + 1)));
            }
        }
        Ok(Character(kappa))
    }

    /// Convenience constructor from `(num, den)` pairs; panics on invalid input.
    pub fn from_fracs(fracs: &[(i64, i64)]) -> Self {
        Character::new(fracs.iter().map(|&(n, d)| Rational::new(n, d)).collect()).expect("character out of range")
    }

    pub fn trivial(l: usize) -> Self {
        Character(vec![Rational::zero(); l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn kappa(&self, i: usize) -> &Rational {
        &self.0[i]
    }

    pub fn components(&self) -> &[Rational] {
        &self.0
    }

    /// Drops the components listed in `remove` (sorted or not).
    pub fn without(&self, remove: &BTreeSet<usize>) -> Character {
        Character(self.0.iter().enumerate().filter(|(i, _)| !remove.contains(i)).map(|(_, k)| k.clone()).collect())
    }
}

impl TryFrom<Vec<Rational>> for Character {
    type Error = Error;
    fn try_from(v: Vec<Rational>) -> Result<Self> {
        Character::new(v)
    }
}

impl From<Character> for Vec<Rational> {
    fn from(c: Character) -> Self {
        c.0
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Mod-1 sum of two characters together with the integer carries.
///
/// Multiplying the canonical frames of two rank-one summands gives
/// `mu_c1 * mu_c2 = z^carry * mu_(c1 + c2 mod 1)`, so the carry vector is the
/// monomial that a product picks up.
pub fn char_sum(c1: &Character, c2: &Character) -> Result<(Character, Vec<u32>)> {
    if c1.len() != c2.len() {
        return Err(Error::Config(format!("character length mismatch: {} vs {}", c1.len(), c2.len())));
    }
    let mut sum = Vec::with_capacity(c1.len());
    let mut carry = Vec::with_capacity(c1.len());
    for (a, b) in c1.0.iter().zip(&c2.0) {
        let s = a + b;
        let fl = s.floor();
        carry.push(fl.to_i64().expect("carry is 0 or 1") as u32);
        sum.push(s - fl);
    }
    Ok((Character(sum), carry))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueElement {
    pub name: String,
    pub kappa: Character,
}

/// Lie structure constants `[e_a, e_b] = sum_c f_ab^c e_c`, stored sparsely.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureConstants {
    table: BTreeMap<(usize, usize), BTreeMap<usize, Rational>>,
}

impl StructureConstants {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff` to `f_ab^c`; entries that cancel to zero are removed.
    pub fn add(&mut self, a: usize, b: usize, c: usize, coeff: Rational) {
        let row = self.table.entry((a, b)).or_default();
        let e = row.entry(c).or_insert_with(Rational::zero);
        *e += &coeff;
        if e.is_zero() {
            row.remove(&c);
        }
        if row.is_empty() {
            self.table.remove(&(a, b));
        }
    }

    /// Sets both `f_ab^c = coeff` and `f_ba^c = -coeff`.
    pub fn add_antisymmetric(&mut self, a: usize, b: usize, c: usize, coeff: Rational) {
        self.add(b, a, c, -&coeff);
        self.add(a, b, c, coeff);
    }

    pub fn bracket(&self, a: usize, b: usize) -> impl Iterator<Item = (usize, &Rational)> {
        self.table.get(&(a, b)).into_iter().flat_map(|row| row.iter().map(|(c, f)| (*c, f)))
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> Rational {
        self.table.get(&(a, b)).and_then(|row| row.get(&c)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &Rational)> {
        self.table.iter().flat_map(|(&(a, b), row)| row.iter().map(move |(&c, f)| (a, b, c, f)))
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }
}

/// Fibre of the local system: a character-diagonal basis with optional Lie
/// structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawValueModule", into = "RawValueModule")]
pub struct ValueModule {
    basis: Vec<ValueElement>,
    structure: Option<StructureConstants>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBracket {
    pub a: String,
    pub b: String,
    pub c: String,
    pub coeff: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawValueModule {
    pub values: Vec<ValueElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<Vec<RawBracket>>,
}

impl TryFrom<RawValueModule> for ValueModule {
    type Error = Error;
    fn try_from(raw: RawValueModule) -> Result<Self> {
        let lookup = |name: &str| {
            raw.values
                .iter()
                .position(|e| e.name == name)
                .ok_or_else(|| Error::Config(format!("unknown value basis element {name:?}")))
        };
        let structure = match &raw.brackets {
            None => None,
            Some(entries) => {
                let mut s = StructureConstants::new();
                for e in entries {
                    s.add(lookup(&e.a)?, lookup(&e.b)?, lookup(&e.c)?, e.coeff.clone());
                }
                Some(s)
            }
        };
        ValueModule::new(raw.values, structure)
    }
}

impl From<ValueModule> for RawValueModule {
    fn from(vm: ValueModule) -> Self {
        let brackets = vm.structure.as_ref().map(|s| {
            s.entries()
                .map(|(a, b, c, f)| RawBracket {
                    a: vm.basis[a].name.clone(),
                    b: vm.basis[b].name.clone(),
                    c: vm.basis[c].name.clone(),
                    coeff: f.clone(),
                })
                .collect()
        });
        RawValueModule { values: vm.basis, brackets }
    }
}

impl ValueModule {
    pub fn new(basis: Vec<ValueElement>, structure: Option<StructureConstants>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for e in &basis {
            if !names.insert(e.name.as_str()) {
                return Err(Error::Config(format!("duplicate value basis name {:?}", e.name)));
            }
        }
        if let Some(first) = basis.first() {
            if let Some(bad) = basis.iter().find(|e| e.kappa.len() != first.kappa.len()) {
                return Err(Error::Config(format!(
                    "value {:?} has {} monodromy exponents, expected {}",
                    bad.name,
                    bad.kappa.len(),
                    first.kappa.len()
                )));
            }
        }
        if let Some(s) = &structure {
            if let Some((a, b, c, _)) = s.entries().find(|&(a, b, c, _)| a.max(b).max(c) >= basis.len()) {
                return Err(Error::Config(format!("structure constant index ({a}, {b}, {c}) out of range")));
            }
        }
        Ok(ValueModule { basis, structure })
    }

    /// Rank-one module spanned by a single element.
    pub fn rank_one(name: &str, kappa: Character) -> Self {
        ValueModule::new(vec![ValueElement { name: name.into(), kappa }], None).unwrap()
    }

    pub fn with_structure(mut self, structure: StructureConstants) -> Result<Self> {
        self.structure = Some(structure);
        ValueModule::new(self.basis, self.structure)
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[ValueElement] {
        &self.basis
    }

    pub fn element(&self, v: usize) -> &ValueElement {
        &self.basis[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|e| e.name == name)
    }

    pub fn character(&self, v: usize) -> &Character {
        &self.basis[v].kappa
    }

    pub fn structure(&self) -> Option<&StructureConstants> {
        self.structure.as_ref()
    }
}

/// Result of [`validate_value_module`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub antisymmetry: bool,
    pub grading: bool,
    pub jacobi: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry && self.grading && self.jacobi
    }
}

/// Checks antisymmetry, character grading and the carry-adjusted Jacobi
/// identity of the structure constants. A module without structure is valid.
pub fn validate_value_module(vm: &ValueModule) -> ValidationReport {
    let mut report = ValidationReport { antisymmetry: true, grading: true, jacobi: true, failures: Vec::new() };
    let Some(s) = vm.structure() else {
        return report;
    };
    let n = vm.len();
    let name = |i: usize| vm.basis[i].name.as_str();

    for (a, b, c, f) in s.entries() {
        let g = s.get(b, a, c);
        if &(-&g) != f {
            report.antisymmetry = false;
            report.failures.push(format!(
                "antisymmetry: f[{},{}]^{} = {f} but f[{},{}]^{} = {g}",
                name(a),
                name(b),
                name(c),
                name(b),
                name(a),
                name(c)
            ));
        }
        let (sum, _) = char_sum(vm.character(a), vm.character(b)).expect("uniform lengths");
        if &sum != vm.character(c) {
            report.grading = false;
            report.failures.push(format!(
                "grading: [{},{}] has a {} component but chi({}) + chi({}) = {:?}",
                name(a),
                name(b),
                name(c),
                name(a),
                name(b),
                sum
            ));
        }
    }

    // [x,[y,w]] + [y,[w,x]] + [w,[x,y]], each term carrying its accumulated
    // carry monomial; keyed by (target, carry exponents).
    let nested = |x: usize, y: usize, w: usize, acc: &mut BTreeMap<(usize, Vec<u32>), Rational>| {
        let (_, c1) = char_sum(vm.character(y), vm.character(w)).unwrap();
        for (m, f1) in s.bracket(y, w) {
            let (_, c2) = char_sum(vm.character(x), vm.character(m)).unwrap();
            for (e, f2) in s.bracket(x, m) {
                let carry: Vec<u32> = c1.iter().zip(&c2).map(|(p, q)| p + q).collect();
                *acc.entry((e, carry)).or_insert_with(Rational::zero) += &(f1 * f2);
            }
        }
    };
    for x in 0..n {
        for y in 0..n {
            for w in 0..n {
                let mut acc = BTreeMap::new();
                nested(x, y, w, &mut acc);
                nested(y, w, x, &mut acc);
                nested(w, x, y, &mut acc);
                if let Some(((e, carry), coeff)) = acc.iter().find(|(_, c)| !c.is_zero()) {
                    report.jacobi = false;
                    report.failures.push(format!(
                        "jacobi: ({}, {}, {}) leaves {coeff} * z^{carry:?} {}",
                        name(x),
                        name(y),
                        name(w),
                        name(*e)
                    ));
                }
            }
        }
    }
    report
}

/// Local model: polydisc in `C^d` with divisor `z_0 ... z_(l-1) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct ModelConfig {
    d: usize,
    l: usize,
    values: ValueModule,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub d: usize,
    pub l: usize,
    #[serde(flatten)]
    pub values: RawValueModule,
}

impl TryFrom<RawModel> for ModelConfig {
    type Error = Error;
    fn try_from(raw: RawModel) -> Result<Self> {
        ModelConfig::new(raw.d, raw.l, raw.values.try_into()?)
    }
}

impl From<ModelConfig> for RawModel {
    fn from(m: ModelConfig) -> Self {
        RawModel { d: m.d, l: m.l, values: m.values.into() }
    }
}

impl ModelConfig {
    pub fn new(d: usize, l: usize, values: ValueModule) -> Result<Self> {
        if l > d {
            return Err(Error::Config(format!("l = {l} exceeds d = {d}")));
        }
        if d > MAX_DIM {
            return Err(Error::Config(format!("d = {d} exceeds the supported maximum {MAX_DIM}")));
        }
        if let Some(bad) = values.basis().iter().find(|e| e.kappa.len() != l) {
            return Err(Error::Config(format!(
                "value {:?} has {} monodromy exponents but l = {l}",
                bad.name,
                bad.kappa.len()
            )));
        }
        Ok(ModelConfig { d, l, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn values(&self) -> &ValueModule {
        &self.values
    }

    pub fn kappa(&self, v: usize, i: usize) -> &Rational {
        self.values.character(v).kappa(i)
    }
}

/// For each value index of `config`, its index in the stratum model obtained
/// by restricting to the branches `s` (or `None` if it does not survive).
pub fn stratum_value_map(config: &ModelConfig, s: &BTreeSet<usize>) -> Vec<Option<usize>> {
    let mut next = 0;
    config
        .values
        .basis()
        .iter()
        .map(|e| {
            if s.iter().all(|&i| e.kappa.kappa(i).is_zero()) {
                next += 1;
                Some(next - 1)
            } else {
                None
            }
        })
        .collect()
}

/// Local model of the stratum `{z_i = 0 : i in s}`: the coordinates in `s`
/// are deleted and only values invariant under the monodromies around `s`
/// survive.
pub fn restrict_to_stratum(config: &ModelConfig, s: &BTreeSet<usize>) -> Result<ModelConfig> {
    if s.is_empty() {
        return Err(Error::Precondition("stratum index set is empty".into()));
    }
    if let Some(&i) = s.iter().find(|&&i| i >= config.l) {
        return Err(Error::Precondition(format!("branch {} is not a log branch (l = {})", i + 1, config.l)));
    }
    let map = stratum_value_map(config, s);
    let basis: Vec<ValueElement> = config
        .values
        .basis()
        .iter()
        .zip(&map)
        .filter(|(_, m)| m.is_some())
        .map(|(e, _)| ValueElement { name: e.name.clone(), kappa: e.kappa.without(s) })
        .collect();
    let structure = config.values.structure().map(|st| {
        let mut out = StructureConstants::new();
        for (a, b, c, f) in st.entries() {
            if let (Some(a), Some(b), Some(c)) = (map[a], map[b], map[c]) {
                out.add(a, b, c, f.clone());
            }
        }
        out
    });
    ModelConfig::new(config.d - s.len(), config.l - s.len(), ValueModule::new(basis, structure)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn char_sum_examples() {
        let (s, c) = char_sum(&Character::from_fracs(&[(1, 3)]), &Character::from_fracs(&[(2, 3)])).unwrap();
        assert_eq!(s, Character::from_fracs(&[(0, 1)]));
        assert_eq!(c, vec![1]);

        let (s, c) = char_sum(&Character::trivial(2), &Character::trivial(2)).unwrap();
        assert_eq!(s, Character::trivial(2));
        assert_eq!(c, vec![0, 0]);

        let (s, c) =
            char_sum(&Character::from_fracs(&[(1, 3), (0, 1)]), &Character::from_fracs(&[(1, 3), (1, 2)])).unwrap();
        assert_eq!(s, Character::from_fracs(&[(2, 3), (1, 2)]));
        assert_eq!(c, vec![0, 0]);
    }

    #[test]
    fn char_sum_length_mismatch() {
        let e = char_sum(&Character::trivial(1), &Character::trivial(2)).unwrap_err();
        assert!(matches!(e, Error::Config(_)));
    }

    #[test]
    fn character_range_is_enforced() {
        assert!(Character::new(vec![r(3, 2)]).is_err());
        assert!(Character::new(vec![r(-1, 2)]).is_err());
        assert!(Character::new(vec![r(1, 1)]).is_err());
        assert!(Character::new(vec![r(0, 1), r(99, 100)]).is_ok());
    }

    #[test]
    fn abelian_and_gl2_validate() {
        let abelian = ValueModule::rank_one("mu", Character::from_fracs(&[(1, 2)]))
            .with_structure(StructureConstants::new())
            .unwrap();
        assert!(validate_value_module(&abelian).is_valid());
        let gl2 = fixtures::gl2_carry();
        let rep = validate_value_module(gl2.values());
        assert!(rep.is_valid(), "{:?}", rep.failures);
        let gl2b = fixtures::gl2_carry_two_branches();
        assert!(validate_value_module(gl2b.values()).is_valid());
    }

    #[test]
    fn grading_violation_detected() {
        let gl2 = fixtures::gl2_carry();
        let vm = gl2.values().clone();
        let mut s = vm.structure().unwrap().clone();
        let e11 = vm.index_of("E11").unwrap();
        let e12 = vm.index_of("E12").unwrap();
        // [E11, E11] = E12 breaks the grading (0 + 0 != 2/3) but keeps antisymmetry
        // only if mirrored, which it is not, so both checks fire.
        s.add(e11, e11, e12, Rational::one());
        let vm = ValueModule::new(vm.basis().to_vec(), Some(s)).unwrap();
        let rep = validate_value_module(&vm);
        assert!(!rep.grading);
        assert!(!rep.is_valid());
    }

    #[test]
    fn perturbed_tables_rejected() {
        let gl2 = fixtures::gl2_carry();
        let vm = gl2.values().clone();
        let e11 = vm.index_of("E11").unwrap();
        let e12 = vm.index_of("E12").unwrap();

        // Breaks antisymmetry only.
        let mut s = vm.structure().unwrap().clone();
        s.add(e11, e12, e12, Rational::one());
        let rep = validate_value_module(&ValueModule::new(vm.basis().to_vec(), Some(s)).unwrap());
        assert!(!rep.antisymmetry);
        assert!(rep.grading);

        // Antisymmetric, graded, but not a Lie bracket: rescale [E11, E12].
        let mut s = vm.structure().unwrap().clone();
        s.add_antisymmetric(e11, e12, e12, Rational::one());
        let rep = validate_value_module(&ValueModule::new(vm.basis().to_vec(), Some(s)).unwrap());
        assert!(rep.antisymmetry && rep.grading);
        assert!(!rep.jacobi);
    }

    #[test]
    fn restrict_examples() {
        let vm = ValueModule::new(
            vec![
                ValueElement { name: "u".into(), kappa: Character::trivial(2) },
                ValueElement { name: "v".into(), kappa: Character::from_fracs(&[(1, 2), (1, 3)]) },
            ],
            None,
        )
        .unwrap();
        let m = ModelConfig::new(2, 2, vm).unwrap();
        let s = restrict_to_stratum(&m, &BTreeSet::from([0])).unwrap();
        assert_eq!((s.d(), s.l()), (1, 1));
        assert_eq!(s.values().len(), 1);
        assert_eq!(s.values().element(0).name, "u");
        assert_eq!(s.values().character(0), &Character::trivial(1));

        let only_nontrivial =
            ModelConfig::new(1, 1, ValueModule::rank_one("mu", Character::from_fracs(&[(1, 2)]))).unwrap();
        let s = restrict_to_stratum(&only_nontrivial, &BTreeSet::from([0])).unwrap();
        assert!(s.values().is_empty());
        assert_eq!((s.d(), s.l()), (0, 0));

        assert!(matches!(restrict_to_stratum(&m, &BTreeSet::new()), Err(Error::Precondition(_))));
    }

    #[test]
    fn restrict_gl2_two_branches_keeps_trivial_characters() {
        let m = fixtures::gl2_carry_two_branches();
        let s = restrict_to_stratum(&m, &BTreeSet::from([0, 1])).unwrap();
        let names: Vec<_> = s.values().basis().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, vec!["E11", "E22"]);
        // [E11, E22] = 0 in gl2, so the restricted bracket is abelian.
        assert!(s.values().structure().unwrap().is_zero());
    }

    #[test]
    fn model_rejects_bad_shapes() {
        let vm = ValueModule::rank_one("mu", Character::trivial(2));
        assert!(ModelConfig::new(1, 2, vm.clone()).is_err());
        assert!(ModelConfig::new(3, 1, vm).is_err());
    }

    #[test]
    fn model_serde_round_trip() {
        let m = fixtures::gl2_carry();
        let s = toml::to_string(&m).unwrap();
        let back: ModelConfig = toml::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
