//! One-cocycles `ξ = ϱ*η`, their cohomology classes, and twist plans.
//!
//! `G_ℚ` acts on `𝒢(N,p)` and `𝒲(N,p)` through `Gal(k_p/ℚ)`: elements
//! outside `G_{k_p}` act by conjugation by `hat(V)`, and fix `w`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::Level;
use crate::curves::{genus_xnp, xplus_verdict, GenusReport};
use crate::error::{Error, Result};
use crate::extgroup::WElem;
use crate::finite::GroupElement;
use crate::galmodel::{
    classify, deg_p_character, det_varrho, validate_degree_data, validate_model, Case, DegreeData,
    FiniteGaloisModel, FiniteGroup,
};
use crate::moduli::{v_for, Variant};
use crate::projgroup::{centralizer, in_psl2, mat_v, pgl2_elements, psl2_elements, ProjMat};

/// Where cocycle values are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    /// `𝒢(N,p) ≅ PSL₂(𝔽p)`
    GNp,
    /// Cyclotomic `𝒲(N,p) = PSL₂(𝔽p) × ⟨w⟩`.
    WNpDirect,
    /// Non-cyclotomic `𝒲(N,p) ≅ PGL₂(𝔽p)`.
    WNpPgl2,
    /// Plain `PGL₂(𝔽p)`, where `η` lives.
    Pgl2,
}

impl Ambient {
    pub fn contains(&self, x: &WElem) -> bool {
        match self {
            Ambient::GNp => !x.w && in_psl2(&x.g),
            Ambient::WNpDirect => in_psl2(&x.g),
            Ambient::WNpPgl2 | Ambient::Pgl2 => !x.w,
        }
    }

    pub fn elements(&self, p: u64) -> Vec<WElem> {
        match self {
            Ambient::GNp => psl2_elements(p).into_iter().map(|g| WElem::new(g, false)).collect(),
            Ambient::WNpDirect => {
                let psl = psl2_elements(p);
                [false, true].into_iter().flat_map(|w| psl.iter().map(move |&g| WElem::new(g, w))).collect()
            }
            Ambient::WNpPgl2 | Ambient::Pgl2 => pgl2_elements(p).into_iter().map(|g| WElem::new(g, false)).collect(),
        }
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ambient::GNp => "G(N,p)",
            Ambient::WNpDirect => "W(N,p) = PSL2 x <w>",
            Ambient::WNpPgl2 => "W(N,p) = PGL2",
            Ambient::Pgl2 => "PGL2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle {
    pub model: FiniteGaloisModel,
    pub values: Vec<WElem>,
    pub ambient: Ambient,
    /// The non-square defining `V`.
    pub v: u64,
    pub valid: bool,
}

impl Cocycle {
    /// Wrap arbitrary values, recording whether they satisfy the cocycle
    /// condition.
    pub fn new(model: FiniteGaloisModel, values: Vec<WElem>, ambient: Ambient, v: u64) -> Result<Self> {
        if values.len() != model.group.order() {
            return Err(Error::Dimension(format!("{} values for a group of order {}", values.len(), model.group.order())));
        }
        if let Some(x) = values.iter().find(|x| x.g.p() != model.p || !ambient.contains(x)) {
            return Err(Error::AmbientMismatch(format!("{x} does not lie in {ambient}")));
        }
        let mut c = Cocycle { model, values, ambient, v, valid: false };
        c.valid = check_cocycle(&c);
        Ok(c)
    }

    fn hat_v(&self) -> ProjMat {
        mat_v(self.model.p, self.v).hat()
    }

    /// `σ` applied to `x`.
    pub fn twist(&self, sigma: usize, x: &WElem) -> WElem {
        galois_twist(self.model.epsilon()[sigma], self.hat_v(), x)
    }
}

fn galois_twist(eps: i8, hv: ProjMat, x: &WElem) -> WElem {
    if eps == 1 {
        *x
    } else {
        WElem::new(hv * x.g * hv, x.w)
    }
}

fn eta_values(m: &FiniteGaloisModel, v: u64) -> Vec<ProjMat> {
    let hv = mat_v(m.p, v).hat();
    m.epsilon().iter().map(|&e| if e == 1 { ProjMat::identity(m.p) } else { hv }).collect()
}

/// `η(σ) = hat(V)` off `G_{k_p}`, the identity on it.
pub fn eta(m: &FiniteGaloisModel, v: u64) -> Result<Cocycle> {
    ensure_valid(m)?;
    let values = eta_values(m, v).into_iter().map(|g| WElem::new(g, false)).collect();
    Cocycle::new(m.clone(), values, Ambient::Pgl2, v)
}

/// `ϱ*(σ) = ᵗϱ(σ⁻¹)`, or `hat(V)·ϱ*(σ)·hat(V)` when primed.
pub fn rho_star(m: &FiniteGaloisModel, variant: Variant, v: u64) -> Vec<ProjMat> {
    let hv = mat_v(m.p, v).hat();
    m.group
        .elements()
        .map(|s| {
            let r = m.rho[m.group.inv(s)].transpose();
            match variant {
                Variant::Plain => r,
                Variant::Primed => hv * r * hv,
            }
        })
        .collect()
}

fn ensure_valid(m: &FiniteGaloisModel) -> Result<()> {
    let violations = validate_model(m);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidModel(violations))
    }
}

/// The case forced on `m` by its determinant: cyclotomic iff `det ϱ = ε`.
pub fn model_case(m: &FiniteGaloisModel) -> Case {
    if m.det_rho() == m.epsilon() {
        Case::Cyclotomic
    } else {
        Case::NonCyclotomic
    }
}

fn check_parity(level: &Level, m: &FiniteGaloisModel) -> Result<Case> {
    let case = classify(level);
    if model_case(m) != case {
        return Err(Error::ParityMismatch(match case {
            Case::Cyclotomic => format!("level {level} is cyclotomic but det rho differs from epsilon"),
            Case::NonCyclotomic => format!("level {level} is non-cyclotomic but det rho equals epsilon"),
        }));
    }
    Ok(case)
}

/// `ξ = ϱ*η` (or `ξ′ = ϱ′*η`), times the formal `w` where `k_char` is `−1`.
///
/// The level fixes the case and `V`. Primed cocycles and `k` characters
/// exist only in the cyclotomic case.
pub fn build_xi(level: &Level, m: &FiniteGaloisModel, variant: Variant, k_char: Option<&[i8]>) -> Result<Cocycle> {
    ensure_valid(m)?;
    if level.p() != m.p {
        return Err(Error::MixedCharacteristic(level.p(), m.p));
    }
    let case = check_parity(level, m)?;
    if case == Case::NonCyclotomic && (variant == Variant::Primed || k_char.is_some()) {
        return Err(Error::AmbientMismatch(
            "non-cyclotomic cocycles take values in W(N,p) = PGL2 with neither a primed variant nor a k character".into(),
        ));
    }
    if let Some(k) = k_char {
        if k.len() != m.group.order() {
            return Err(Error::Dimension("k character must be given on every group element".into()));
        }
    }
    let v = v_for(level);
    let ambient = match (case, k_char) {
        (Case::Cyclotomic, None) => Ambient::GNp,
        (Case::Cyclotomic, Some(_)) => Ambient::WNpDirect,
        (Case::NonCyclotomic, _) => Ambient::WNpPgl2,
    };
    let values = rho_star(m, variant, v)
        .into_iter()
        .zip(eta_values(m, v))
        .enumerate()
        .map(|(s, (r, e))| WElem::new(r * e, k_char.is_some_and(|k| k[s] == -1)))
        .collect();
    Cocycle::new(m.clone(), values, ambient, v)
}

/// `ξ_{στ} = ξ_σ · σ(ξ_τ)` for all pairs.
pub fn check_cocycle(c: &Cocycle) -> bool {
    let g = &c.model.group;
    if c.values.len() != g.order() {
        return false;
    }
    let eps = c.model.epsilon();
    let hv = c.hat_v();
    g.elements().all(|s| {
        g.elements().all(|t| c.values[g.mul(s, t)] == c.values[s].op(&galois_twist(eps[s], hv, &c.values[t])))
    })
}

/// A `b` in the ambient with `c2(σ) = b⁻¹·c1(σ)·σ(b)` for all `σ`.
pub fn cohomologous(c1: &Cocycle, c2: &Cocycle) -> Result<Option<WElem>> {
    if c1.ambient != c2.ambient || c1.v != c2.v {
        return Err(Error::AmbientMismatch(format!("{} against {}", c1.ambient, c2.ambient)));
    }
    if c1.model != c2.model {
        return Err(Error::AmbientMismatch("cocycles over different models".into()));
    }
    let eps = c1.model.epsilon();
    let hv = c1.hat_v();
    let candidates = c1.ambient.elements(c1.model.p);
    Ok(candidates.into_iter().find(|b| {
        let bi = b.inverse();
        // σ(b) depends only on ε(σ); compute both once
        let tw = [*b, galois_twist(-1, hv, b)];
        c1.model
            .group
            .elements()
            .all(|s| c2.values[s] == bi.op(&c1.values[s]).op(&tw[usize::from(eps[s] == -1)]))
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CentralizerVerdict {
    Trivial,
    NontrivialInPSL2,
    NontrivialOutsidePSL2,
}

impl fmt::Display for CentralizerVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CentralizerVerdict::Trivial => "trivial",
            CentralizerVerdict::NontrivialInPSL2 => "nontrivial, inside PSL2",
            CentralizerVerdict::NontrivialOutsidePSL2 => "nontrivial, not inside PSL2",
        })
    }
}

pub fn centralizer_verdict(m: &FiniteGaloisModel) -> Result<CentralizerVerdict> {
    ensure_valid(m)?;
    let c = centralizer(&m.image(), m.p)?;
    Ok(if c.is_trivial() {
        CentralizerVerdict::Trivial
    } else if c.elements().iter().all(in_psl2) {
        CentralizerVerdict::NontrivialInPSL2
    } else {
        CentralizerVerdict::NontrivialOutsidePSL2
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistCurve {
    pub name: String,
    pub ambient: Ambient,
    pub cocycle_valid: bool,
}

/// The character `ε·det ϱ` of the field `k`, with the field when the model's
/// labels determine it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldK {
    pub character: Vec<i8>,
    pub field: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistPlan {
    pub level: Level,
    pub case: Case,
    pub curves: Vec<TwistCurve>,
    pub field_k: Option<FieldK>,
    pub verdict: CentralizerVerdict,
    pub bijective: bool,
    pub genus: GenusReport,
    pub finiteness: String,
}

fn squarefree_part(mut x: i64) -> i64 {
    let sign = x.signum();
    x = x.abs();
    let mut out = 1;
    let mut q = 2;
    while q * q <= x {
        while x % (q * q) == 0 {
            x /= q * q;
        }
        if x % q == 0 {
            out *= q;
            x /= q;
        }
        q += 1;
    }
    sign * out * x
}

/// Fields of all products of labelled characters, `ε` being `ℚ(√p*)`.
fn known_fields(m: &FiniteGaloisModel) -> Vec<(Vec<i8>, i64)> {
    let p_star = if m.p % 4 == 1 { m.p as i64 } else { -(m.p as i64) };
    let mut known: Vec<(Vec<i8>, i64)> = vec![(vec![1; m.group.order()], 1), (m.epsilon(), p_star)];
    let labelled: Vec<(Vec<i8>, i64)> =
        m.characters.iter().filter_map(|c| c.field.map(|f| (c.values.clone(), f))).collect();
    for (vals, f) in labelled {
        let extra: Vec<(Vec<i8>, i64)> = known
            .iter()
            .map(|(kv, kf)| (kv.iter().zip(&vals).map(|(a, b)| a * b).collect(), squarefree_part(kf * f)))
            .collect();
        for e in extra {
            if !known.iter().any(|(kv, _)| *kv == e.0) {
                known.push(e);
            }
        }
    }
    known
}

fn finiteness(level: &Level, case: Case, genus: &GenusReport) -> String {
    match (case, level.n(), level.p()) {
        (Case::Cyclotomic, 4, 3) => "possibly infinite (excluded case N=4, p=3)".into(),
        (Case::NonCyclotomic, 2, 3) => "excluded case N=2, p=3".into(),
        _ => match genus.exact() {
            Some(g) if g <= 1 => format!("genus {g}; finiteness not decided"),
            _ => "finite".into(),
        },
    }
}

/// The twists whose rational points classify `ℚ`-curves of degree `N`
/// realizing `ϱ`. Each `k` must label one of the model's characters.
pub fn twist_plan(level: &Level, m: &FiniteGaloisModel, dd: Option<&DegreeData>, k_list: &[i64]) -> Result<TwistPlan> {
    ensure_valid(m)?;
    if level.p() != m.p {
        return Err(Error::MixedCharacteristic(level.p(), m.p));
    }
    if let Some(dd) = dd {
        let violations = validate_degree_data(m, dd);
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        if det_varrho(m, &deg_p_character(m, dd)) != m.det_rho() {
            return Err(Error::ParityMismatch("det rho differs from epsilon times deg_p".into()));
        }
    }
    let case = check_parity(level, m)?;
    let (n, p) = (level.n(), level.p());
    let verdict = centralizer_verdict(m)?;
    let mut curves = Vec::new();
    let mut push = |name: String, c: Cocycle| curves.push(TwistCurve { name, ambient: c.ambient, cocycle_valid: c.valid });
    let (genus, field_k) = match case {
        Case::Cyclotomic => {
            push(format!("X+({n},{p})_rho"), build_xi(level, m, Variant::Plain, None)?);
            push(format!("X+({n},{p})'_rho"), build_xi(level, m, Variant::Primed, None)?);
            for &k in k_list {
                let ch = m
                    .characters
                    .iter()
                    .find(|c| c.field == Some(k))
                    .ok_or_else(|| Error::Precondition(format!("no model character is labelled with the field Q(sqrt {k})")))?;
                push(format!("X({n},{p})_{{rho,{k}}}"), build_xi(level, m, Variant::Plain, Some(&ch.values))?);
                push(format!("X({n},{p})'_{{rho,{k}}}"), build_xi(level, m, Variant::Primed, Some(&ch.values))?);
            }
            (xplus_verdict(level)?.report, None)
        }
        Case::NonCyclotomic => {
            if !k_list.is_empty() {
                return Err(Error::Precondition("the field k is forced in the non-cyclotomic case".into()));
            }
            push(format!("X({n},{p})_rho"), build_xi(level, m, Variant::Plain, None)?);
            let character: Vec<i8> = m.epsilon().iter().zip(m.det_rho()).map(|(a, b)| a * b).collect();
            let field = known_fields(m).into_iter().find(|(v, _)| *v == character).map(|(_, f)| f);
            (genus_xnp(level), Some(FieldK { character, field }))
        }
    };
    let finiteness = finiteness(level, case, &genus);
    Ok(TwistPlan {
        level: *level,
        case,
        curves,
        field_k,
        verdict,
        bijective: verdict == CentralizerVerdict::Trivial,
        genus,
        finiteness,
    })
}

/// A model of the test corpus, with the level whose parity it matches.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub level: Level,
    pub model: FiniteGaloisModel,
}

fn corpus_groups() -> Vec<(&'static str, FiniteGroup)> {
    let perms = |g: &[(&str, Vec<usize>)]| {
        FiniteGroup::from_permutations(&g.iter().map(|(n, p)| (n.to_string(), p.clone())).collect::<Vec<_>>())
            .expect("valid permutations")
    };
    vec![
        ("Z2", FiniteGroup::cyclic(2)),
        ("Z2xZ2", perms(&[("a", vec![1, 0, 2, 3]), ("b", vec![0, 1, 3, 2])])),
        ("S3", perms(&[("a", vec![1, 0, 2]), ("b", vec![1, 2, 0])])),
        ("S4", perms(&[("a", vec![1, 0, 2, 3]), ("b", vec![1, 2, 3, 0])])),
    ]
}

/// Every homomorphism from `ℤ/2`, `ℤ/2×ℤ/2`, `S₃` and `S₄` into `PGL₂(𝔽p)`,
/// with `ε = det ϱ` (cyclotomic, at level `(4,p)`) and with each other sign
/// character as `ε` (non-cyclotomic, at the least non-square `N`).
/// Intended for `p = 3`; the search is `|PGL₂(𝔽p)|^2` per group.
pub fn corpus(p: u64) -> Result<Vec<CorpusEntry>> {
    let cyc = Level::new(4, p)?;
    let non = Level::new(crate::arith::least_non_square(p), p)?;
    let pgl = pgl2_elements(p);
    let mut out = Vec::new();
    for (gname, group) in corpus_groups() {
        let signs = group.sign_characters();
        let k = group.generators().len();
        let mut seen = BTreeSet::new();
        let total = pgl.len().pow(k as u32);
        for code in 0..total {
            let gens: Vec<ProjMat> = (0..k).map(|i| pgl[code / pgl.len().pow(i as u32) % pgl.len()]).collect();
            let Ok(rho) = group.extend(ProjMat::identity(p), &gens, |a, b| *a * *b) else { continue };
            if !crate::galmodel::is_projective_hom(&group, &rho) || !seen.insert(rho.clone()) {
                continue;
            }
            let det: Vec<i8> = rho.iter().map(|r| r.det_class()).collect();
            for eps in &signs {
                let level = if *eps == det { cyc } else { non };
                let chi: Vec<u64> = eps.iter().map(|&e| if e == 1 { 1 } else { p - 1 }).collect();
                let conj = group.elements().find(|&s| eps[s] == -1 && group.element_order(s) == 2);
                let model = FiniteGaloisModel { p, group: group.clone(), rho: rho.clone(), chi, conj, characters: vec![] };
                let name = format!("{gname}#{} eps={:?}", seen.len() - 1, eps);
                out.push(CorpusEntry { name, level, model });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galmodel::Character;
    use crate::projgroup::{mat_t, pgl2_elements};

    fn lv(n: u64, p: u64) -> Level {
        Level::new(n, p).unwrap()
    }

    fn z2(rho_s: ProjMat, chi_s: u64) -> FiniteGaloisModel {
        let p = rho_s.p();
        FiniteGaloisModel {
            p,
            group: FiniteGroup::cyclic(2),
            rho: vec![ProjMat::identity(p), rho_s],
            chi: vec![1, chi_s],
            conj: (chi_s == p - 1).then_some(1),
            characters: vec![],
        }
    }

    /// `S₄ ≅ PGL₂(𝔽₃)` acting on itself.
    fn surjective_p3(chi_from_det: bool) -> FiniteGaloisModel {
        let p = 3;
        let elems = pgl2_elements(p);
        let n = elems.len();
        let idx = |x: &ProjMat| elems.iter().position(|e| e == x).unwrap();
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| idx(&(elems[a] * elems[b]))).collect()).collect();
        let names: Vec<String> = elems.iter().map(|e| e.to_string()).collect();
        let gens = vec![idx(&mat_t(p)), idx(&mat_v(p, 2)), idx(&ProjMat::from_rows(p, [[1, 0], [0, 2]]).unwrap())];
        let group = FiniteGroup::from_table(names, table, gens).unwrap();
        let rho: Vec<ProjMat> = group.names().iter().map(|nm| elems[elems.iter().position(|e| e.to_string() == *nm).unwrap()]).collect();
        let chi = rho.iter().map(|r| if !chi_from_det || r.det_class() == 1 { 1 } else { 2 }).collect();
        let m = FiniteGaloisModel { p, group, rho, chi, conj: None, characters: vec![] };
        assert!(validate_model(&m).is_empty(), "{:?}", validate_model(&m));
        m
    }

    #[test]
    fn eta_examples() {
        let m = z2(ProjMat::identity(3), 1);
        let e = eta(&m, 2).unwrap();
        assert!(e.values.iter().all(|x| x.is_identity()));
        let m = z2(ProjMat::identity(3), 2);
        let e = eta(&m, 2).unwrap();
        assert_eq!(e.values[1].g, mat_v(3, 2).hat());
        assert!(e.valid && check_cocycle(&e));
    }

    #[test]
    fn rho_star_examples() {
        let m = z2(ProjMat::identity(5), 1);
        assert!(rho_star(&m, Variant::Plain, 2).iter().all(|x| x.is_identity()));
        assert!(rho_star(&m, Variant::Primed, 2).iter().all(|x| x.is_identity()));
        // ℤ/5 with σ ↦ T at p = 5
        let group = FiniteGroup::cyclic(5);
        let t = mat_t(5);
        let rho = group.extend(ProjMat::identity(5), &[t], |a, b| *a * *b).unwrap();
        let m = FiniteGaloisModel { p: 5, group, rho, chi: vec![1; 5], conj: None, characters: vec![] };
        assert!(validate_model(&m).is_empty());
        let g = m.group.generators()[0];
        assert_eq!(rho_star(&m, Variant::Plain, 2)[g], ProjMat::from_rows(5, [[1, 0], [-1, 1]]).unwrap());
        let hv = mat_v(5, 2).hat();
        let primed = rho_star(&m, Variant::Primed, 2);
        let back: Vec<ProjMat> = primed.iter().map(|x| hv * *x * hv).collect();
        assert_eq!(back, rho_star(&m, Variant::Plain, 2));
    }

    #[test]
    fn build_xi_examples() {
        // ϱ trivial, ε trivial: cyclotomic, ξ = η
        let m = z2(ProjMat::identity(3), 1);
        let xi = build_xi(&lv(4, 3), &m, Variant::Plain, None).unwrap();
        assert!(xi.valid);
        assert_eq!(xi.values.iter().map(|x| x.g).collect::<Vec<_>>(), eta(&m, 2).unwrap().values.iter().map(|x| x.g).collect::<Vec<_>>());
        let m = surjective_p3(true);
        let xi = build_xi(&lv(4, 3), &m, Variant::Plain, None).unwrap();
        assert!(xi.valid);
        assert_eq!(xi.ambient, Ambient::GNp);
        let mut bad = xi.values.clone();
        bad[5] = WElem::new(bad[5].g * mat_t(3), false);
        assert!(!Cocycle::new(m.clone(), bad, Ambient::GNp, 2).unwrap().valid);
        // wrong parity
        assert!(matches!(build_xi(&lv(2, 3), &m, Variant::Plain, None), Err(Error::ParityMismatch(_))));
        let m = surjective_p3(false);
        assert!(build_xi(&lv(2, 3), &m, Variant::Plain, None).unwrap().valid);
        assert!(matches!(build_xi(&lv(2, 3), &m, Variant::Primed, None), Err(Error::AmbientMismatch(_))));
    }

    #[test]
    fn check_cocycle_counterexample() {
        // constant non-central value with ε nontrivial
        let m = z2(ProjMat::identity(3), 2);
        let t = WElem::new(mat_t(3), false);
        let c = Cocycle::new(m, vec![t, t], Ambient::Pgl2, 2).unwrap();
        assert!(!c.valid);
    }

    #[test]
    fn cohomologous_examples() {
        let m = surjective_p3(true);
        let l = lv(4, 3);
        let xi = build_xi(&l, &m, Variant::Plain, None).unwrap();
        let xi2 = build_xi(&l, &m, Variant::Primed, None).unwrap();
        assert!(cohomologous(&xi, &xi).unwrap().unwrap().is_identity());
        assert_eq!(cohomologous(&xi, &xi2).unwrap(), None);
        assert_eq!(centralizer_verdict(&m).unwrap(), CentralizerVerdict::Trivial);
        let m = z2(ProjMat::identity(3), 1);
        let xi = build_xi(&l, &m, Variant::Plain, None).unwrap();
        let xi2 = build_xi(&l, &m, Variant::Primed, None).unwrap();
        assert!(cohomologous(&xi, &xi2).unwrap().is_some());
        assert_eq!(centralizer_verdict(&m).unwrap(), CentralizerVerdict::NontrivialOutsidePSL2);
        let e = eta(&m, 2).unwrap();
        assert!(matches!(cohomologous(&xi, &e), Err(Error::AmbientMismatch(_))));
    }

    #[test]
    fn centralizer_of_diagonal_image() {
        // image {1, diag(1,-1)}: centralizer is the diagonal torus with the antidiagonal
        let d = ProjMat::from_rows(3, [[1, 0], [0, 2]]).unwrap();
        let m = z2(d, 2);
        let c = centralizer(&m.image(), 3).unwrap();
        assert_eq!(c.order(), 4);
        let expected = if c.elements().iter().all(in_psl2) {
            CentralizerVerdict::NontrivialInPSL2
        } else {
            CentralizerVerdict::NontrivialOutsidePSL2
        };
        assert_eq!(centralizer_verdict(&m).unwrap(), expected);
        assert_eq!(expected, CentralizerVerdict::NontrivialOutsidePSL2);
    }

    #[test]
    fn twist_plan_examples() {
        let m = surjective_p3(true);
        let plan = twist_plan(&lv(4, 3), &m, None, &[]).unwrap();
        assert_eq!(plan.curves.len(), 2);
        assert!(plan.bijective);
        assert!(plan.curves.iter().all(|c| c.cocycle_valid));
        assert_eq!(plan.finiteness, "possibly infinite (excluded case N=4, p=3)");
        assert!(plan.field_k.is_none());

        let m = surjective_p3(false);
        let plan = twist_plan(&lv(2, 3), &m, None, &[]).unwrap();
        assert_eq!(plan.curves.len(), 1);
        assert_eq!(plan.finiteness, "excluded case N=2, p=3");
        assert_eq!(plan.field_k.as_ref().unwrap().character, m.det_rho());
        let plan = twist_plan(&lv(5, 3), &m, None, &[]).unwrap();
        assert_eq!(plan.curves.len(), 1);
        assert!(plan.bijective);
        assert_eq!(plan.finiteness, "finite");
        assert_eq!(plan.genus.exact(), Some(3));

        assert!(matches!(twist_plan(&lv(4, 3), &m, None, &[]), Err(Error::ParityMismatch(_))));
    }

    #[test]
    fn twist_plan_with_k() {
        let mut m = z2(ProjMat::identity(3), 1);
        m.characters.push(Character { name: "k".into(), field: Some(-1), values: vec![1, -1] });
        let plan = twist_plan(&lv(4, 3), &m, None, &[-1]).unwrap();
        assert_eq!(plan.curves.len(), 4);
        assert!(plan.curves.iter().all(|c| c.cocycle_valid));
        assert_eq!(plan.curves[2].ambient, Ambient::WNpDirect);
        assert!(!plan.bijective);
        assert!(twist_plan(&lv(4, 3), &m, None, &[5]).is_err());
    }

    #[test]
    fn field_k_from_labels() {
        // ε·det ϱ equals the labelled character
        let mut m = z2(mat_v(3, 2), 1);
        m.characters.push(Character { name: "q2".into(), field: Some(2), values: vec![1, -1] });
        let plan = twist_plan(&lv(2, 3), &m, None, &[]).unwrap();
        assert_eq!(plan.field_k.unwrap().field, Some(2));
        // product of ε and a label: ℚ(√−3)·ℚ(√2) gives ℚ(√−6)
        let mut m = z2(ProjMat::identity(3), 2);
        m.conj = Some(1);
        m.characters.push(Character { name: "q2".into(), field: Some(2), values: vec![1, 1] });
        let plan = twist_plan(&lv(2, 3), &m, None, &[]).unwrap();
        assert_eq!(plan.field_k.unwrap().field, Some(-3));
        assert_eq!(squarefree_part(-3 * 2), -6);
        assert_eq!(squarefree_part(12), 3);
    }

    #[test]
    fn twist_plan_degree_data() {
        use crate::galmodel::DegreeEntry;
        let m = surjective_p3(false);
        let dd = DegreeData { entries: vec![DegreeEntry { a: 2, d: 2, values: m.det_rho() }] };
        assert!(twist_plan(&lv(2, 3), &m, Some(&dd), &[]).is_ok());
        let dd = DegreeData { entries: vec![DegreeEntry { a: 2, d: 4, values: m.det_rho() }] };
        assert!(matches!(twist_plan(&lv(2, 3), &m, Some(&dd), &[]), Err(Error::ParityMismatch(_))));
    }

    #[test]
    fn corpus_size() {
        let c = corpus(3).unwrap();
        assert!(c.len() >= 50, "{}", c.len());
        for e in &c {
            assert!(validate_model(&e.model).is_empty(), "{}", e.name);
        }
    }
}
