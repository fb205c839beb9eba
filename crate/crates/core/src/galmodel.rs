//! Finite quotients of `G_ℚ` carrying a projective representation, the mod-`p`
//! cyclotomic character and optional quadratic characters.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{kronecker, Level};
use crate::error::{Error, Result};
use crate::finite::GroupElement;
use crate::projgroup::ProjMat;

/// A finite group given by its multiplication table. Element 0 is the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// From an explicit table over `names`, with `generators` naming a
    /// generating set. The identity may sit anywhere; it is moved to index 0.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let n = names.len();
        if n == 0 || table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::Dimension(format!("multiplication table must be {n}×{n} over the element list")));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidModel(vec!["table has no identity".into()]))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidModel(vec![format!(
                            "table not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )]));
                    }
                }
            }
        }
        // reorder so the identity is element 0
        let mut order: Vec<usize> = (0..n).collect();
        order.swap(0, e);
        let mut pos = vec![0; n];
        for (i, &o) in order.iter().enumerate() {
            pos[o] = i;
        }
        let names2: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let table2: Vec<Vec<usize>> =
            order.iter().map(|&a| order.iter().map(|&b| pos[table[a][b]]).collect()).collect();
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            inverses[a] = (0..n)
                .find(|&b| table2[a][b] == 0)
                .ok_or_else(|| Error::InvalidModel(vec![format!("{} has no inverse", names2[a])]))?;
        }
        let generators = generators.into_iter().map(|g| pos[g]).collect();
        Ok(FiniteGroup { names: names2, table: table2, inverses, generators })
    }

    /// The group generated by permutations of `{0, …, n−1}`. Elements are
    /// named by shortest words in the generator names, `e` for the identity.
    pub fn from_permutations(gens: &[(String, Vec<usize>)]) -> Result<Self> {
        let degree = gens.first().map(|g| g.1.len()).unwrap_or(0);
        for (name, perm) in gens {
            if perm.len() != degree {
                return Err(Error::Dimension(format!("permutation {name} has degree {}, expected {degree}", perm.len())));
            }
            let mut seen = vec![false; degree];
            for &x in perm {
                if x >= degree || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Parse(format!("{name} is not a permutation of 0..{degree}")));
                }
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut names = vec!["e".to_string()];
        let mut index = BTreeMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        // composition x·g means "apply x, then g"
        let compose = |x: &[usize], g: &[usize]| -> Vec<usize> { x.iter().map(|&i| g[i]).collect() };
        let mut gen_idx = vec![usize::MAX; gens.len()];
        while let Some(i) = queue.pop_front() {
            for (k, (gname, g)) in gens.iter().enumerate() {
                let y = compose(&elems[i], g);
                let j = match index.get(&y) {
                    Some(&j) => j,
                    None => {
                        let j = elems.len();
                        index.insert(y.clone(), j);
                        elems.push(y);
                        names.push(if i == 0 { gname.clone() } else { format!("{}*{gname}", names[i]) });
                        queue.push_back(j);
                        j
                    }
                };
                if i == 0 {
                    gen_idx[k] = j;
                }
            }
        }
        let n = elems.len();
        let table: Vec<Vec<usize>> =
            (0..n).map(|a| (0..n).map(|b| index[&compose(&elems[a], &elems[b])]).collect()).collect();
        let inverses = (0..n).map(|a| (0..n).find(|&b| table[a][b] == 0).unwrap()).collect();
        Ok(FiniteGroup { names, table, inverses, generators: gen_idx })
    }

    pub fn trivial() -> Self {
        FiniteGroup { names: vec!["e".into()], table: vec![vec![0]], inverses: vec![0], generators: vec![] }
    }

    /// `ℤ/n` with generator `g`.
    pub fn cyclic(n: usize) -> Self {
        let perm: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        if n == 1 {
            return FiniteGroup::trivial();
        }
        FiniteGroup::from_permutations(&[("g".into(), perm)]).expect("valid permutation")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Look up an element by name, or by a `*`-separated word of names.
    pub fn parse_element(&self, word: &str) -> Result<usize> {
        if let Some(i) = self.names.iter().position(|n| n == word) {
            return Ok(i);
        }
        word.split('*').map(str::trim).try_fold(0, |acc, part| {
            let i = self
                .names
                .iter()
                .position(|n| n == part)
                .ok_or_else(|| Error::Parse(format!("unknown group element {part:?}")))?;
            Ok(self.mul(acc, i))
        })
    }

    /// Extend values on the generators multiplicatively along a spanning tree
    /// of the Cayley graph. The result is a homomorphism only if the
    /// generator values satisfy the relations; callers re-validate.
    pub fn extend<T: Clone>(&self, identity: T, on_gens: &[T], op: impl Fn(&T, &T) -> T) -> Result<Vec<T>> {
        if on_gens.len() != self.generators.len() {
            return Err(Error::Dimension(format!(
                "{} generator values for {} generators",
                on_gens.len(),
                self.generators.len()
            )));
        }
        let mut vals: Vec<Option<T>> = vec![None; self.order()];
        vals[0] = Some(identity);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, &g) in self.generators.iter().enumerate() {
                let y = self.mul(x, g);
                if vals[y].is_none() {
                    vals[y] = Some(op(vals[x].as_ref().unwrap(), &on_gens[k]));
                    queue.push_back(y);
                }
            }
        }
        vals.into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::InvalidModel(vec![format!("{} not reached from generators", self.names[i])])))
            .collect()
    }

    /// All homomorphisms to `{±1}`, as value vectors.
    pub fn sign_characters(&self) -> Vec<Vec<i8>> {
        let k = self.generators.len();
        let mut out = Vec::new();
        for mask in 0..(1usize << k) {
            let on: Vec<i8> = (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let Ok(vals) = self.extend(1i8, &on, |a, b| a * b) else { continue };
            if is_sign_hom(self, &vals) && !out.contains(&vals) {
                out.push(vals);
            }
        }
        out
    }
}

fn is_sign_hom(g: &FiniteGroup, vals: &[i8]) -> bool {
    g.elements().all(|a| g.elements().all(|b| vals[g.mul(a, b)] == vals[a] * vals[b]))
}

/// A `±1`-valued character, optionally labelled with the square-free integer
/// `a` of the quadratic field `ℚ(√a)` it cuts out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    pub name: String,
    pub field: Option<i64>,
    pub values: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGaloisModel {
    pub p: u64,
    pub group: FiniteGroup,
    pub rho: Vec<ProjMat>,
    /// Cyclotomic character values in `[1, p−1]`.
    pub chi: Vec<u64>,
    pub conj: Option<usize>,
    pub characters: Vec<Character>,
}

impl FiniteGaloisModel {
    /// `ε = (chi/p)`, the character of `ℚ(√±p)`.
    pub fn epsilon(&self) -> Vec<i8> {
        self.chi.iter().map(|&c| kronecker(c as i64, self.p)).collect()
    }

    pub fn det_rho(&self) -> Vec<i8> {
        self.rho.iter().map(|g| g.det_class()).collect()
    }

    pub fn image(&self) -> Vec<ProjMat> {
        let mut im = self.rho.clone();
        im.sort();
        im.dedup();
        im
    }

    pub fn character(&self, name: &str) -> Option<&Character> {
        self.characters.iter().find(|c| c.name == name)
    }
}

pub fn validate_model(m: &FiniteGaloisModel) -> Vec<String> {
    let g = &m.group;
    let n = g.order();
    let mut v = Vec::new();
    if m.rho.len() != n || m.chi.len() != n {
        v.push(format!("maps must have {n} values"));
        return v;
    }
    if m.rho.iter().any(|r| r.p() != m.p) {
        v.push(format!("rho takes values outside PGL2(F_{})", m.p));
        return v;
    }
    if m.chi.iter().any(|&c| c == 0 || c >= m.p) {
        v.push(format!("chi must take values in [1, {}]", m.p - 1));
        return v;
    }
    let pairs = || g.elements().flat_map(|a| g.elements().map(move |b| (a, b)));
    if pairs().any(|(a, b)| m.rho[g.mul(a, b)] != m.rho[a] * m.rho[b]) {
        v.push("rho not a homomorphism".into());
    }
    if pairs().any(|(a, b)| m.chi[g.mul(a, b)] != m.chi[a] * m.chi[b] % m.p) {
        v.push("chi not a homomorphism".into());
    }
    if let Some(c) = m.conj {
        if c >= n {
            v.push("conj is not a group element".into());
        } else {
            if g.element_order(c) > 2 {
                v.push("conj has order greater than 2".into());
            }
            if m.chi[c] != m.p - 1 {
                v.push("chi(conj) must be -1".into());
            }
        }
    }
    for ch in &m.characters {
        if ch.values.len() != n || ch.values.iter().any(|&x| x != 1 && x != -1) {
            v.push(format!("character {} must take {n} values in {{1,-1}}", ch.name));
        } else if !is_sign_hom(g, &ch.values) {
            v.push(format!("character {} not a homomorphism", ch.name));
        }
        if let Some(a) = ch.field {
            if !is_squarefree_field(a) {
                v.push(format!("character {} labelled with {a}, not a square-free integer other than 0, 1", ch.name));
            }
        }
    }
    v
}

fn is_squarefree_field(a: i64) -> bool {
    if a == 0 || a == 1 {
        return false;
    }
    let mut x = a.unsigned_abs();
    let mut q = 2;
    while q * q <= x {
        if x.is_multiple_of(q * q) {
            return false;
        }
        if x.is_multiple_of(q) {
            x /= q;
        }
        q += 1;
    }
    true
}

/// Quadratic fields `ℚ(√a_l)` with isogeny degrees `d_l` and their characters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeData {
    pub entries: Vec<DegreeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeEntry {
    pub a: i64,
    pub d: u64,
    pub values: Vec<i8>,
}

pub fn validate_degree_data(m: &FiniteGaloisModel, dd: &DegreeData) -> Vec<String> {
    let mut v = Vec::new();
    let mut seen = Vec::new();
    for e in &dd.entries {
        if e.values.len() != m.group.order() || !is_sign_hom(&m.group, &e.values) {
            v.push(format!("character of Q(sqrt {}) not a homomorphism", e.a));
        }
        if !is_squarefree_field(e.a) {
            v.push(format!("{} is not a square-free integer other than 0, 1", e.a));
        }
        if seen.contains(&e.a) {
            v.push(format!("field Q(sqrt {}) listed twice", e.a));
        }
        if e.d == 0 {
            v.push("degrees must be positive".into());
        }
        seen.push(e.a);
    }
    v
}

/// Product of the characters whose degree is a non-square mod `p`.
pub fn deg_p_character(m: &FiniteGaloisModel, dd: &DegreeData) -> Vec<i8> {
    let mut out = vec![1i8; m.group.order()];
    for e in dd.entries.iter().filter(|e| kronecker(e.d as i64, m.p) == -1) {
        for (o, x) in out.iter_mut().zip(&e.values) {
            *o *= x;
        }
    }
    out
}

pub fn det_varrho(m: &FiniteGaloisModel, degp: &[i8]) -> Vec<i8> {
    m.epsilon().iter().zip(degp).map(|(a, b)| a * b).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    Cyclotomic,
    NonCyclotomic,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Cyclotomic => "cyclotomic",
            Case::NonCyclotomic => "non-cyclotomic",
        })
    }
}

pub fn classify(level: &Level) -> Case {
    if level.is_cyclotomic() {
        Case::Cyclotomic
    } else {
        Case::NonCyclotomic
    }
}

/// Whether `det ϱ_E(ς) = −1`. A model with `deg_p(ς) = −1` fails; such a
/// model cannot come from a ℚ-curve.
pub fn oddness_check(m: &FiniteGaloisModel, degp: &[i8]) -> Result<bool> {
    let c = m.conj.ok_or_else(|| Error::Precondition("model has no complex conjugation".into()))?;
    Ok(det_varrho(m, degp)[c] == -1)
}

/// An abelian group with trivial Galois action, written multiplicatively.
pub trait AbelianValue: Clone + PartialEq {
    fn one() -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
}

/// `{±1}`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sign(pub i8);

impl AbelianValue for Sign {
    fn one() -> Self {
        Sign(1)
    }
    fn mul(&self, o: &Self) -> Self {
        Sign(self.0 * o.0)
    }
    fn inv(&self) -> Self {
        *self
    }
}

/// Whether `c(σ,τ) = α(σ)α(τ)α(στ)⁻¹` for all pairs. With `degrees`, also
/// whether `σ ↦ α(σ)²/deg(σ)` is a homomorphism.
pub fn verify_splitting<A: AbelianValue>(
    group: &FiniteGroup,
    c: &[Vec<A>],
    alpha: &[A],
    degrees: Option<&[A]>,
) -> Result<bool> {
    let n = group.order();
    if c.len() != n || c.iter().any(|r| r.len() != n) || alpha.len() != n || degrees.is_some_and(|d| d.len() != n) {
        return Err(Error::Dimension(format!("cochains must be indexed by the {n} group elements")));
    }
    for a in group.elements() {
        for b in group.elements() {
            let rhs = alpha[a].mul(&alpha[b]).mul(&alpha[group.mul(a, b)].inv());
            if c[a][b] != rhs {
                return Ok(false);
            }
        }
    }
    if let Some(deg) = degrees {
        let f: Vec<A> = (0..n).map(|s| alpha[s].mul(&alpha[s]).mul(&deg[s].inv())).collect();
        for a in group.elements() {
            for b in group.elements() {
                if f[group.mul(a, b)] != f[a].mul(&f[b]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The 2-cocycle `(σ,τ) ↦ α(σ)α(τ)α(στ)⁻¹`.
pub fn coboundary<A: AbelianValue>(group: &FiniteGroup, alpha: &[A]) -> Vec<Vec<A>> {
    group
        .elements()
        .map(|a| group.elements().map(|b| alpha[a].mul(&alpha[b]).mul(&alpha[group.mul(a, b)].inv())).collect())
        .collect()
}

// --- model files -----------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    p: u64,
    conj: Option<String>,
    group: GroupSpec,
    rho: BTreeMap<String, [[i64; 2]; 2]>,
    chi: BTreeMap<String, i64>,
    #[serde(default)]
    character: Vec<CharacterSpec>,
    #[serde(default)]
    degree: Vec<DegreeSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpec {
    permutations: Option<BTreeMap<String, Vec<usize>>>,
    elements: Option<Vec<String>>,
    table: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CharacterSpec {
    name: String,
    field: Option<i64>,
    values: BTreeMap<String, i8>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeSpec {
    a: i64,
    d: u64,
    values: BTreeMap<String, i8>,
}

/// A parsed model file: the model and any degree data it carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedModel {
    pub model: FiniteGaloisModel,
    pub degrees: Option<DegreeData>,
}

/// Parse a model file. Values given on generators are extended to the whole
/// group; the result is not validated.
///
/// ```toml
/// p = 3
/// conj = "s"
/// [group]
/// permutations = { s = [1, 0, 2], t = [0, 2, 1] }
/// [rho]
/// s = [[0, 1], [1, 0]]
/// t = [[1, 1], [0, 1]]
/// [chi]
/// s = 2
/// t = 1
/// [[character]]
/// name = "k"
/// field = -1
/// values = { s = -1, t = 1 }
/// ```
///
/// Instead of `permutations`, a group may be given by `elements` and a
/// `table` of element names; the generators are then the keys of `rho`.
pub fn parse_model(text: &str) -> Result<ParsedModel> {
    let f: ModelFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if !crate::arith::is_prime(f.p) || f.p == 2 {
        return Err(Error::Parse(format!("p = {} is not an odd prime", f.p)));
    }
    let gen_names: Vec<String> = f.rho.keys().cloned().collect();
    let group = match (&f.group.permutations, &f.group.elements, &f.group.table) {
        (Some(perms), None, None) => {
            if perms.keys().ne(f.rho.keys()) {
                return Err(Error::Parse("rho must be given on exactly the permutation generators".into()));
            }
            let gens: Vec<(String, Vec<usize>)> = perms.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            FiniteGroup::from_permutations(&gens)?
        }
        (None, Some(elements), Some(table)) => {
            let idx = |s: &String| {
                elements.iter().position(|e| e == s).ok_or_else(|| Error::Parse(format!("unknown element {s:?}")))
            };
            let t: Vec<Vec<usize>> =
                table.iter().map(|row| row.iter().map(idx).collect::<Result<_>>()).collect::<Result<_>>()?;
            let gens = gen_names.iter().map(idx).collect::<Result<_>>()?;
            FiniteGroup::from_table(elements.clone(), t, gens)?
        }
        _ => return Err(Error::Parse("group needs either `permutations` or both `elements` and `table`".into())),
    };
    if f.chi.keys().ne(f.rho.keys()) {
        return Err(Error::Parse("chi must be given on the same generators as rho".into()));
    }
    let p = f.p;
    let rho_gens = f
        .rho
        .values()
        .map(|rows| ProjMat::from_rows(p, *rows))
        .collect::<Result<Vec<_>>>()?;
    let rho = group.extend(ProjMat::identity(p), &rho_gens, |a, b| *a * *b)?;
    let chi_gens: Vec<u64> = f.chi.values().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    let chi = group.extend(1u64, &chi_gens, |a, b| a * b % p)?;
    let on_gens = |values: &BTreeMap<String, i8>, what: &str| -> Result<Vec<i8>> {
        if values.keys().ne(f.rho.keys()) {
            return Err(Error::Parse(format!("{what} must be given on every generator")));
        }
        group.extend(1i8, &values.values().copied().collect::<Vec<_>>(), |a, b| a * b)
    };
    let characters = f
        .character
        .iter()
        .map(|c| {
            Ok(Character { name: c.name.clone(), field: c.field, values: on_gens(&c.values, &c.name)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let degrees = if f.degree.is_empty() {
        None
    } else {
        Some(DegreeData {
            entries: f
                .degree
                .iter()
                .map(|d| Ok(DegreeEntry { a: d.a, d: d.d, values: on_gens(&d.values, "degree character")? }))
                .collect::<Result<Vec<_>>>()?,
        })
    };
    let conj = f.conj.as_deref().map(|w| group.parse_element(w)).transpose()?;
    Ok(ParsedModel { model: FiniteGaloisModel { p, group, rho, chi, conj, characters }, degrees })
}

/// Whether `rho` on the group `g` is a homomorphism into `PGL₂(𝔽p)`.
pub fn is_projective_hom(g: &FiniteGroup, rho: &[ProjMat]) -> bool {
    rho.len() == g.order()
        && rho[0].is_identity()
        && g.elements().all(|a| g.elements().all(|b| rho[g.mul(a, b)] == rho[a] * rho[b]))
}
