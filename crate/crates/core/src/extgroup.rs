//! The group `𝒲(N,p)` of automorphisms of `X(N,p)` over `X⁺(N)`, built from
//! integer matrices of determinant 1 or `N` and reduced mod `p`.
//!
//! In the cyclotomic case the reduction of `Z_N` is a scalar, so the group is
//! kept as pairs `(g, w)` with `g ∈ PSL₂(𝔽p)` and `w` a formal involution. In
//! the non-cyclotomic case the reduction is faithful and the `w` flag is
//! always clear.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{lift_sqrt_mod_p2, Level};
use crate::error::{Error, Result};
use crate::finite::{self, GroupElement};
use crate::projgroup::{self, Mat2, ProjMat};

/// An integer 2×2 matrix with positive determinant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMat {
    entries: [BigInt; 4],
}

impl IntMat {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let m = IntMat { entries: [a, b, c, d] };
        if !m.det().is_positive() {
            return Err(Error::Precondition(format!("integer matrix {m} needs positive determinant")));
        }
        Ok(m)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        IntMat::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.entries
    }

    pub fn det(&self) -> BigInt {
        let [a, b, c, d] = &self.entries;
        a * d - b * c
    }

    pub fn reduce_mat(&self, p: u64) -> Mat2 {
        let pb = BigInt::from(p);
        let r = |x: &BigInt| {
            let y = ((x % &pb) + &pb) % &pb;
            y.to_i64().expect("residue fits")
        };
        let [a, b, c, d] = &self.entries;
        Mat2::new(p, r(a), r(b), r(c), r(d))
    }

    /// The class of the reduction in `PGL₂(𝔽p)`.
    pub fn reduce(&self, p: u64) -> Result<ProjMat> {
        ProjMat::new(self.reduce_mat(p))
    }

    pub fn is_scalar_mod(&self, p: u64) -> bool {
        let m = self.reduce_mat(p);
        m.b == 0 && m.c == 0 && m.a == m.d
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// Named integer generators of `𝒲(N,p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generators {
    pub t: IntMat,
    pub u: IntMat,
    /// `Z_N` in the cyclotomic case, `V_N` otherwise.
    pub extra: IntMat,
    pub extra_name: String,
}

impl Generators {
    pub fn named(&self) -> Vec<(String, IntMat)> {
        vec![
            ("T_N".to_string(), self.t.clone()),
            ("U_N".to_string(), self.u.clone()),
            (self.extra_name.clone(), self.extra.clone()),
        ]
    }
}

pub fn build_generators(level: &Level) -> Result<Generators> {
    let (n, p) = (level.n() as i64, level.p() as i64);
    let t = IntMat::from_i64(1, 1, 0, 1)?;
    let u = IntMat::from_i64(1, 0, level.n_inverse() as i64 * n, 1)?;
    if level.is_cyclotomic() {
        let (a, b) = lift_sqrt_mod_p2(level.n(), level.p())?;
        let (nb, pb) = (BigInt::from(n), BigInt::from(p));
        let z = IntMat::new(&a * &nb, &b * &pb, &pb * &nb, &a * &nb)?;
        debug_assert_eq!(z.det(), nb);
        Ok(Generators { t, u, extra: z, extra_name: "Z_N".into() })
    } else {
        Ok(Generators { t, u, extra: IntMat::from_i64(0, -1, n, 0)?, extra_name: "V_N".into() })
    }
}

/// An element of `𝒲(N,p)`: a class in `PGL₂(𝔽p)` and the formal `w` flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WElem {
    pub g: ProjMat,
    pub w: bool,
}

impl WElem {
    pub fn new(g: ProjMat, w: bool) -> Self {
        WElem { g, w }
    }
}

impl GroupElement for WElem {
    fn op(&self, o: &Self) -> Self {
        WElem { g: self.g * o.g, w: self.w ^ o.w }
    }

    fn inverse(&self) -> Self {
        WElem { g: self.g.inverse(), w: self.w }
    }

    fn is_identity(&self) -> bool {
        self.g.is_identity() && !self.w
    }
}

impl fmt::Debug for WElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for WElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.w {
            write!(f, "w·{}", self.g)
        } else {
            write!(f, "{}", self.g)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Structure {
    DirectProduct,
    FullPGL2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WGroupReport {
    pub level: Level,
    pub order: usize,
    pub structure: Structure,
    pub central_involution: Option<WElem>,
    pub generators: Vec<(String, IntMat)>,
    pub reduction_table: BTreeMap<String, ProjMat>,
    /// Order of the subgroup generated by `T_N` and `U_N`.
    pub g_order: usize,
}

/// The images of the generators inside the abstract model of `𝒲(N,p)`.
fn abstract_generators(level: &Level, gens: &Generators) -> Result<Vec<WElem>> {
    let p = level.p();
    let mut out = vec![WElem::new(gens.t.reduce(p)?, false), WElem::new(gens.u.reduce(p)?, false)];
    out.push(if level.is_cyclotomic() {
        WElem::new(gens.extra.reduce(p)?, true)
    } else {
        WElem::new(gens.extra.reduce(p)?, false)
    });
    Ok(out)
}

/// All elements of `𝒲(N,p)` together with the subgroup `𝒢(N,p)`.
pub fn w_elements(level: &Level) -> Result<(BTreeSet<WElem>, BTreeSet<WElem>)> {
    let p = level.p();
    let gens = build_generators(level)?;
    let ag = abstract_generators(level, &gens)?;
    let bound = 2 * (p * (p * p - 1)) as usize;
    let id = WElem::new(ProjMat::identity(p), false);
    let w = finite::closure(id, &ag, bound);
    let g = finite::closure(id, &ag[..2], bound);
    Ok((w, g))
}

pub fn wgroup(level: &Level) -> Result<WGroupReport> {
    let p = level.p();
    let gens = build_generators(level)?;
    let (w, g) = w_elements(level)?;
    let central: Vec<WElem> = finite::normal_subgroups_of_order_two(&w);
    let structure = if central.is_empty() { Structure::FullPGL2 } else { Structure::DirectProduct };
    let central_involution = match central.as_slice() {
        [] => None,
        [x] => Some(*x),
        many => {
            return Err(Error::Precondition(format!(
                "{} central involutions in the group at {level}",
                many.len()
            )))
        }
    };
    let mut reduction_table = BTreeMap::new();
    for (name, m) in gens.named() {
        reduction_table.insert(name, m.reduce(p)?);
    }
    Ok(WGroupReport {
        level: *level,
        order: w.len(),
        structure,
        central_involution,
        generators: gens.named(),
        reduction_table,
        g_order: g.len(),
    })
}

fn require_non_cyclotomic(level: &Level) -> Result<()> {
    if level.is_cyclotomic() {
        return Err(Error::WrongCase { level: level.to_string(), expected: "non-cyclotomic" });
    }
    Ok(())
}

/// `V_N T_N = U_N^(−N) V_N` and `V_N U_N = T_N^(−Ñ) V_N` modulo `p`.
pub fn verify_relations(level: &Level) -> Result<bool> {
    require_non_cyclotomic(level)?;
    let p = level.p();
    let gens = build_generators(level)?;
    let (t, u, v) = (gens.t.reduce(p)?, gens.u.reduce(p)?, gens.extra.reduce(p)?);
    let n = level.n() as i64;
    let ninv = level.n_inverse() as i64;
    Ok(v * t == u.pow(-n) * v && v * u == t.pow(-ninv) * v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionReport {
    pub level: Level,
    pub involutions: Vec<ProjMat>,
    pub single_class: bool,
    /// For each involution, an integer matrix `[[aN, b], [cN, −aN]]` with
    /// `a²N + bc = −1` reducing to it, when one exists in the search box.
    pub witnesses: Vec<Option<IntMat>>,
}

impl InvolutionReport {
    pub fn all_witnessed(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }
}

/// Integer matrices `[[aN, b], [cN, −aN]]` with `a²N + bc = −1` and
/// `|a|, |b| ≤ bound`, keyed by their reduction mod `p`. `c` is determined
/// by `a` and `b` and left unbounded.
fn involution_shapes(level: &Level, bound: i64) -> BTreeMap<ProjMat, IntMat> {
    let (n, p) = (level.n() as i64, level.p());
    let mut found = BTreeMap::new();
    for a in -bound..=bound {
        let target = -1 - a * a * n;
        for b in -bound..=bound {
            if b == 0 || target % b != 0 {
                continue;
            }
            let c = target / b;
            let m = IntMat::from_i64(a * n, b, c * n, -a * n).expect("determinant N");
            if let Ok(r) = m.reduce(p) {
                found.entry(r).or_insert(m);
            }
        }
    }
    found
}

pub fn involutions_extending_wn(level: &Level) -> Result<InvolutionReport> {
    require_non_cyclotomic(level)?;
    let p = level.p();
    let (w, g) = w_elements(level)?;
    let outside: BTreeSet<WElem> =
        finite::involutions(&w).into_iter().filter(|x| !g.contains(x)).collect();
    let classes = finite::conjugacy_classes_of(&w, &outside);
    let shapes = involution_shapes(level, (p * p) as i64);
    let involutions: Vec<ProjMat> = outside.iter().map(|x| x.g).collect();
    let witnesses = involutions.iter().map(|x| shapes.get(x).cloned()).collect();
    Ok(InvolutionReport {
        level: *level,
        single_class: classes.len() == 1,
        involutions,
        witnesses,
    })
}

/// Whether the integer matrix reduces into `PSL₂(𝔽p)`.
pub fn reduces_into_psl2(m: &IntMat, p: u64) -> Result<bool> {
    Ok(projgroup::in_psl2(&m.reduce(p)?))
}

/// Number of elements of `𝒲(N,p)`, as predicted.
pub fn expected_order(p: u64) -> usize {
    (p * (p * p - 1)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;

    fn lv(n: u64, p: u64) -> Level {
        Level::new(n, p).unwrap()
    }

    #[test]
    fn generator_examples() {
        let g = build_generators(&lv(4, 3)).unwrap();
        assert_eq!(g.extra, IntMat::from_i64(16, 21, 12, 16).unwrap());
        assert_eq!(g.extra.det(), BigInt::from(4));
        let g = build_generators(&lv(2, 3)).unwrap();
        assert_eq!(g.extra_name, "V_N");
        assert_eq!(g.extra, IntMat::from_i64(0, -1, 2, 0).unwrap());
        assert_eq!(g.extra.det(), BigInt::from(2));
        let g = build_generators(&lv(5, 3)).unwrap();
        assert_eq!(g.u, IntMat::from_i64(1, 0, 10, 1).unwrap());
    }

    #[test]
    fn wgroup_examples() {
        let r = wgroup(&lv(2, 3)).unwrap();
        assert_eq!((r.order, r.structure, r.central_involution), (24, Structure::FullPGL2, None));
        let r = wgroup(&lv(4, 3)).unwrap();
        assert_eq!((r.order, r.structure), (24, Structure::DirectProduct));
        assert_eq!(r.reduction_table["Z_N"], ProjMat::identity(3));
        assert_eq!(r.central_involution, Some(WElem::new(ProjMat::identity(3), true)));
        let r = wgroup(&lv(4, 5)).unwrap();
        assert_eq!((r.order, r.structure), (120, Structure::DirectProduct));
    }

    #[test]
    fn relation_examples() {
        assert!(verify_relations(&lv(2, 3)).unwrap());
        assert!(verify_relations(&lv(3, 5)).unwrap());
        assert!(matches!(verify_relations(&lv(4, 3)), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn involution_examples() {
        let r = involutions_extending_wn(&lv(2, 3)).unwrap();
        assert_eq!(r.involutions.len(), 6);
        assert!(r.single_class && r.all_witnessed());
        let v = ProjMat::from_rows(3, [[0, -1], [2, 0]]).unwrap();
        assert!(r.involutions.contains(&v));
        let r = involutions_extending_wn(&lv(3, 5)).unwrap();
        assert_eq!(r.involutions.len(), 10);
        assert!(r.single_class && r.all_witnessed());
        assert!(involutions_extending_wn(&lv(4, 5)).is_err());
    }

    #[test]
    fn structural_properties() {
        for p in [3u64, 5] {
            for n in 2..=12 {
                let Ok(level) = Level::new(n, p) else { continue };
                let r = wgroup(&level).unwrap();
                assert_eq!(r.order, expected_order(p), "{level}");
                assert_eq!(r.order, 2 * r.g_order, "{level}");
                let gens = build_generators(&level).unwrap();
                assert!(reduces_into_psl2(&gens.t, p).unwrap());
                assert!(reduces_into_psl2(&gens.u, p).unwrap());
                assert_eq!(gens.extra.reduce(p).unwrap().det_class(), kronecker(n as i64, p));
                assert_eq!(gens.extra.det(), BigInt::from(n));
                if level.is_cyclotomic() {
                    let z = gens.extra.reduce(p).unwrap();
                    assert!(z.commutes_with(&gens.t.reduce(p).unwrap()));
                    assert!(z.commutes_with(&gens.u.reduce(p).unwrap()));
                    assert!(gens.extra.is_scalar_mod(p));
                }
            }
        }
    }
}
