//! 2×2 matrices over `𝔽p`, their classes in `PGL₂(𝔽p)`, and explicit
//! subgroups of `PGL₂(𝔽p)`.
//!
//! A projective class is stored through its canonical representative: the
//! matrix scaled so that its first nonzero entry in row-major order is 1.
//! Equality of classes is then equality of representatives. The square class
//! of the determinant is cached alongside, so membership in `PSL₂(𝔽p)` is a
//! field read.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, kronecker, mul_mod, sqrt_mod};
use crate::error::{Error, Result};
use crate::finite::{self, GroupElement};

/// A 2×2 matrix `[[a, b], [c, d]]` with entries reduced mod `p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub p: u64,
}

impl Mat2 {
    pub fn new(p: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |x: i64| x.rem_euclid(p as i64) as u64;
        Mat2 { a: r(a), b: r(b), c: r(c), d: r(d), p }
    }

    pub fn from_rows(p: u64, rows: [[i64; 2]; 2]) -> Self {
        Mat2::new(p, rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn identity(p: u64) -> Self {
        Mat2::new(p, 1, 0, 0, 1)
    }

    pub fn scalar(p: u64, s: u64) -> Self {
        Mat2::new(p, s as i64, 0, 0, s as i64)
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> u64 {
        let p = self.p;
        (mul_mod(self.a, self.d, p) + p - mul_mod(self.b, self.c, p)) % p
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    pub fn scale(&self, s: u64) -> Self {
        let p = self.p;
        Mat2 {
            a: mul_mod(self.a, s, p),
            b: mul_mod(self.b, s, p),
            c: mul_mod(self.c, s, p),
            d: mul_mod(self.d, s, p),
            p,
        }
    }

    pub fn transpose(&self) -> Self {
        Mat2 { b: self.c, c: self.b, ..*self }
    }

    pub fn inverse(&self) -> Result<Self> {
        let p = self.p;
        let inv = inv_mod(self.det(), p).ok_or(Error::SingularMatrix { p })?;
        let adj = Mat2 { a: self.d, b: (p - self.b) % p, c: (p - self.c) % p, d: self.a, p };
        Ok(adj.scale(inv))
    }

    /// The involution `[[a, b], [c, d]] ↦ [[d, c], [b, a]]`.
    ///
    /// This is conjugation by `J = [[0, 1], [1, 0]]`, so it is multiplicative
    /// in the usual order: `hat(AB) = hat(A)·hat(B)`.
    pub fn hat(&self) -> Self {
        Mat2 { a: self.d, b: self.c, c: self.b, d: self.a, p: self.p }
    }

    pub fn checked_mul(&self, o: &Mat2) -> Result<Mat2> {
        if self.p != o.p {
            return Err(Error::MixedCharacteristic(self.p, o.p));
        }
        let p = self.p;
        let m = |x, y| mul_mod(x, y, p);
        Ok(Mat2 {
            a: (m(self.a, o.a) + m(self.b, o.c)) % p,
            b: (m(self.a, o.b) + m(self.b, o.d)) % p,
            c: (m(self.c, o.a) + m(self.d, o.c)) % p,
            d: (m(self.c, o.b) + m(self.d, o.d)) % p,
            p,
        })
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    /// Panics on mismatched characteristics; use [`Mat2::checked_mul`] when
    /// operands come from untrusted input.
    fn mul(self, o: Mat2) -> Mat2 {
        self.checked_mul(&o).expect("matrices over the same field")
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]] mod {}", self.a, self.b, self.c, self.d, self.p)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// The class of an invertible matrix in `PGL₂(𝔽p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjMat {
    rep: Mat2,
    det_class: i8,
}

impl ProjMat {
    /// Canonical class of `m`: scale so the first nonzero entry is 1.
    pub fn new(m: Mat2) -> Result<Self> {
        let p = m.p;
        let det = m.det();
        if det == 0 {
            return Err(Error::SingularMatrix { p });
        }
        let lead = m.entries().into_iter().find(|&x| x != 0).expect("nonzero matrix");
        let rep = m.scale(inv_mod(lead, p).expect("nonzero residue"));
        let det_class = kronecker(rep.det() as i64, p);
        Ok(ProjMat { rep, det_class })
    }

    pub fn from_rows(p: u64, rows: [[i64; 2]; 2]) -> Result<Self> {
        ProjMat::new(Mat2::from_rows(p, rows))
    }

    pub fn identity(p: u64) -> Self {
        ProjMat::new(Mat2::identity(p)).expect("identity is invertible")
    }

    pub fn rep(&self) -> Mat2 {
        self.rep
    }

    pub fn p(&self) -> u64 {
        self.rep.p
    }

    /// Square class of the determinant, `±1`.
    pub fn det_class(&self) -> i8 {
        self.det_class
    }

    pub fn checked_mul(&self, o: &ProjMat) -> Result<ProjMat> {
        ProjMat::new(self.rep.checked_mul(&o.rep)?)
    }

    pub fn inverse(&self) -> ProjMat {
        ProjMat::new(self.rep.inverse().expect("class of an invertible matrix"))
            .expect("inverse is invertible")
    }

    pub fn hat(&self) -> ProjMat {
        ProjMat::new(self.rep.hat()).expect("hat preserves the determinant")
    }

    pub fn transpose(&self) -> ProjMat {
        ProjMat::new(self.rep.transpose()).expect("transpose preserves the determinant")
    }

    pub fn pow(&self, k: i64) -> ProjMat {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut acc = ProjMat::identity(self.p());
        for _ in 0..k.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }

    /// A determinant-one matrix in this class; defined only for `PSL₂` classes.
    pub fn sl2_lift(&self) -> Option<Mat2> {
        let r = sqrt_mod(self.rep.det(), self.p())?;
        Some(self.rep.scale(inv_mod(r, self.p())?))
    }
}

impl Mul for ProjMat {
    type Output = ProjMat;

    fn mul(self, o: ProjMat) -> ProjMat {
        self.checked_mul(&o).expect("classes over the same field")
    }
}

impl GroupElement for ProjMat {
    fn op(&self, other: &Self) -> Self {
        *self * *other
    }

    fn inverse(&self) -> Self {
        ProjMat::inverse(self)
    }

    fn is_identity(&self) -> bool {
        self.rep == Mat2::identity(self.p())
    }
}

impl fmt::Debug for ProjMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rep)
    }
}

impl fmt::Display for ProjMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

pub fn proj_normalize(m: Mat2) -> Result<ProjMat> {
    ProjMat::new(m)
}

pub fn hat(m: Mat2) -> Mat2 {
    m.hat()
}

pub fn in_psl2(m: &ProjMat) -> bool {
    m.det_class() == 1
}

pub fn mat_t(p: u64) -> ProjMat {
    ProjMat::from_rows(p, [[1, 1], [0, 1]]).unwrap()
}

pub fn mat_u(p: u64) -> ProjMat {
    ProjMat::from_rows(p, [[1, 0], [1, 1]]).unwrap()
}

/// `V = [[0, −v], [1, 0]]`, of order two in `PGL₂(𝔽p)` with determinant `v`.
pub fn mat_v(p: u64, v: u64) -> ProjMat {
    ProjMat::from_rows(p, [[0, -(v as i64)], [1, 0]]).expect("v is a unit")
}

/// `J = [[0, 1], [1, 0]]`.
pub fn mat_j(p: u64) -> ProjMat {
    ProjMat::from_rows(p, [[0, 1], [1, 0]]).unwrap()
}

/// `V·T = U^(−v⁻¹)·V` and `V·U = T^(−v)·V`.
pub fn v_relations_hold(p: u64, v: u64) -> bool {
    let Some(vinv) = inv_mod(v % p, p) else { return false };
    let vm = mat_v(p, v);
    vm * mat_t(p) == mat_u(p).pow(-(vinv as i64)) * vm && vm * mat_u(p) == mat_t(p).pow(-(v as i64)) * vm
}

/// Every element of `PGL₂(𝔽p)`, enumerated by canonical representative.
pub fn pgl2_elements(p: u64) -> Vec<ProjMat> {
    let mut out = Vec::with_capacity((p * (p * p - 1)) as usize);
    for b in 0..p {
        for c in 0..p {
            for d in 0..p {
                let m = Mat2 { a: 1, b, c, d, p };
                if m.is_invertible() {
                    out.push(ProjMat::new(m).unwrap());
                }
            }
        }
    }
    for c in 1..p {
        for d in 0..p {
            out.push(ProjMat::new(Mat2 { a: 0, b: 1, c, d, p }).unwrap());
        }
    }
    out
}

pub fn psl2_elements(p: u64) -> Vec<ProjMat> {
    pgl2_elements(p).into_iter().filter(in_psl2).collect()
}

/// An explicit subgroup of `PGL₂(𝔽p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatGroup {
    p: u64,
    elements: BTreeSet<ProjMat>,
    generators: Vec<ProjMat>,
}

impl MatGroup {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &BTreeSet<ProjMat> {
        &self.elements
    }

    pub fn generators(&self) -> &[ProjMat] {
        &self.generators
    }

    pub fn contains(&self, g: &ProjMat) -> bool {
        self.elements.contains(g)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn full_pgl2(p: u64) -> MatGroup {
        MatGroup {
            p,
            elements: pgl2_elements(p).into_iter().collect(),
            generators: vec![mat_t(p), mat_u(p), mat_v(p, crate::arith::least_non_square(p))],
        }
    }

    pub fn full_psl2(p: u64) -> MatGroup {
        MatGroup {
            p,
            elements: psl2_elements(p).into_iter().collect(),
            generators: vec![mat_t(p), mat_u(p)],
        }
    }
}

fn uniform_p(set: &[ProjMat]) -> Result<u64> {
    let p = set
        .first()
        .map(|g| g.p())
        .ok_or_else(|| Error::Precondition("empty generating set".into()))?;
    if let Some(bad) = set.iter().find(|g| g.p() != p) {
        return Err(Error::MixedCharacteristic(p, bad.p()));
    }
    Ok(p)
}

/// The subgroup generated by `gens`.
pub fn closure(gens: &[ProjMat]) -> Result<MatGroup> {
    let p = uniform_p(gens)?;
    let bound = (p * (p * p - 1)) as usize;
    let elements = finite::closure(ProjMat::identity(p), gens, bound);
    Ok(MatGroup { p, elements, generators: gens.to_vec() })
}

/// Elements of `PGL₂(𝔽p)` commuting with every member of `set`.
pub fn centralizer(set: &[ProjMat], p: u64) -> Result<MatGroup> {
    let q = uniform_p(set)?;
    if q != p {
        return Err(Error::MixedCharacteristic(p, q));
    }
    let all = pgl2_elements(p);
    let elements = finite::centralizer_in(all.iter(), set);
    Ok(MatGroup { p, generators: elements.iter().cloned().collect(), elements })
}

pub fn center(g: &MatGroup) -> MatGroup {
    let elements = finite::center(&g.elements);
    MatGroup { p: g.p, generators: elements.iter().cloned().collect(), elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(
            proj_normalize(Mat2::from_rows(5, [[2, 0], [0, 2]])).unwrap().rep(),
            Mat2::identity(5)
        );
        assert_eq!(
            proj_normalize(Mat2::from_rows(5, [[0, 3], [1, 0]])).unwrap().rep(),
            Mat2::from_rows(5, [[0, 1], [2, 0]])
        );
        assert_eq!(
            proj_normalize(Mat2::from_rows(7, [[1, 1], [0, 1]])).unwrap().rep(),
            Mat2::from_rows(7, [[1, 1], [0, 1]])
        );
        assert_eq!(
            proj_normalize(Mat2::from_rows(5, [[1, 2], [2, 4]])),
            Err(Error::SingularMatrix { p: 5 })
        );
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat(Mat2::identity(7)), Mat2::identity(7));
        assert_eq!(
            hat(Mat2::from_rows(7, [[1, 1], [0, 1]])),
            Mat2::from_rows(7, [[1, 0], [1, 1]])
        );
        let n = 3;
        assert_eq!(
            hat(Mat2::from_rows(7, [[0, -1], [n, 0]])),
            Mat2::from_rows(7, [[0, n], [-1, 0]])
        );
    }

    #[test]
    fn hat_reverses_no_products() {
        // (TU)^ = T^ U^ while U^ T^ is a different matrix
        let (t, u) = (mat_t(5).rep(), mat_u(5).rep());
        assert_eq!((t * u).hat(), t.hat() * u.hat());
        assert_ne!((t * u).hat(), u.hat() * t.hat());
    }

    #[test]
    fn generated_orders() {
        for p in [3u64, 5, 7, 11] {
            let psl = closure(&[mat_t(p), mat_u(p)]).unwrap();
            assert_eq!(psl.order() as u64, p * (p * p - 1) / 2, "PSL2({p})");
            let v = crate::arith::least_non_square(p);
            let pgl = closure(&[mat_t(p), mat_u(p), mat_v(p, v)]).unwrap();
            assert_eq!(pgl.order() as u64, p * (p * p - 1), "PGL2({p})");
            assert_eq!(pgl2_elements(p).len() as u64, p * (p * p - 1));
        }
        assert_eq!(closure(&[ProjMat::identity(5)]).unwrap().order(), 1);
        let v3 = ProjMat::from_rows(3, [[0, -2], [1, 0]]).unwrap();
        assert_eq!(closure(&[mat_t(3), mat_u(3), v3]).unwrap().order(), 24);
    }

    #[test]
    fn closure_rejects_mixed_fields() {
        assert_eq!(closure(&[mat_t(3), mat_t(5)]), Err(Error::MixedCharacteristic(3, 5)));
        assert!(closure(&[]).is_err());
    }

    #[test]
    fn centralizer_examples() {
        let all = centralizer(&[ProjMat::identity(3)], 3).unwrap();
        assert_eq!(all.order(), 24);
        let everything = pgl2_elements(3);
        assert!(centralizer(&everything, 3).unwrap().is_trivial());
        let diag = ProjMat::from_rows(3, [[1, 0], [0, -1]]).unwrap();
        let c = centralizer(&[diag], 3).unwrap();
        assert_eq!(c.order(), 4);
        for g in c.elements() {
            let m = g.rep();
            assert!((m.b == 0 && m.c == 0) || (m.a == 0 && m.d == 0), "{g:?} not monomial");
        }
    }

    #[test]
    fn center_examples() {
        assert!(center(&MatGroup::full_psl2(5)).is_trivial());
        assert!(center(&MatGroup::full_pgl2(3)).is_trivial());
        let inv = ProjMat::from_rows(7, [[0, 1], [1, 0]]).unwrap();
        let cyc = closure(&[inv]).unwrap();
        assert_eq!(center(&cyc).order(), 2);
    }

    #[test]
    fn psl2_membership() {
        assert!(in_psl2(&ProjMat::identity(5)));
        assert!(!in_psl2(&mat_v(5, 2)));
        assert!(in_psl2(&mat_t(5)));
        for p in [3u64, 5] {
            let all = pgl2_elements(p);
            let kernel = all.iter().filter(|g| in_psl2(g)).count();
            assert_eq!(kernel * 2, all.len());
            for x in &all {
                for y in &all {
                    assert_eq!((*x * *y).det_class(), x.det_class() * y.det_class());
                }
            }
        }
    }

    #[test]
    fn v_relations_for_every_non_square() {
        for p in [3u64, 5, 7, 11] {
            for v in (1..p).filter(|&v| kronecker(v as i64, p) == -1) {
                let vm = mat_v(p, v);
                let vinv = inv_mod(v, p).unwrap() as i64;
                assert_eq!(vm * mat_t(p), mat_u(p).pow(-vinv) * vm, "VT at p={p}, v={v}");
                assert_eq!(vm * mat_u(p), mat_t(p).pow(-(v as i64)) * vm, "VU at p={p}, v={v}");
                assert!((vm * vm).is_identity());
                assert!(v_relations_hold(p, v));
            }
            // a square v breaks the relations only through V itself
            assert!(!v_relations_hold(p, 0));
        }
    }

    fn arb_mat(p: u64) -> impl Strategy<Value = Mat2> {
        (0..p, 0..p, 0..p, 0..p)
            .prop_map(move |(a, b, c, d)| Mat2 { a, b, c, d, p })
            .prop_filter("invertible", |m| m.is_invertible())
    }

    fn arb_pair() -> impl Strategy<Value = (Mat2, Mat2)> {
        prop_oneof![Just(3u64), Just(5u64), Just(7u64)]
            .prop_flat_map(|p| (arb_mat(p), arb_mat(p)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn hat_is_conjugation_by_j((x, y) in arb_pair()) {
            let p = x.p;
            let j = Mat2::from_rows(p, [[0, 1], [1, 0]]);
            prop_assert_eq!(x.hat(), j * x * j);
            prop_assert_eq!((x * y).hat(), x.hat() * y.hat());
            prop_assert_eq!(x.hat().hat(), x);
            prop_assert_eq!(x.hat().det(), x.det());
        }

        #[test]
        fn normalization_is_scalar_invariant((x, _y) in arb_pair()) {
            let n = ProjMat::new(x).unwrap();
            prop_assert_eq!(ProjMat::new(n.rep()).unwrap(), n);
            for s in 1..x.p {
                prop_assert_eq!(ProjMat::new(x.scale(s)).unwrap(), n);
            }
            prop_assert_eq!(n.det_class(), kronecker(n.rep().det() as i64, x.p));
        }
    }
}
