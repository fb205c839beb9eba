//! Cusps and genera of `X₀(N)`, `X(N,p)`, `X⁺(N,p)` and Atkin–Lehner
//! quotients of `X₀(M)`.
//!
//! Every closed formula here has an independent counterpart computed from
//! finite data: cusps as orbits on `P¹(ℤ/N)`, the genus of `X(N,p)` from its
//! ramification over the `j`-line, and Atkin–Lehner fixed points by counting
//! positive definite forms.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{
    class_number, divisors, euler_phi, factorize, kronecker, psi_index, reduced_forms,
    Discriminant, Level,
};
use crate::error::{Error, Result};

/// A cusp `m/n` of `X₀(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspData {
    pub n: u64,
    pub m: u64,
    /// `gcd(n, N/n)`
    pub h: u64,
    /// Ramification over `X(1)`, i.e. the width.
    pub ram_degree: u64,
}

impl CuspData {
    pub fn label(&self) -> String {
        format!("{}/{}", self.m, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveId {
    X0(u64),
    XNp(Level),
    XPlus(Level),
    AlQuotient { m: u64, q: u64 },
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveId::X0(n) => write!(f, "X0({n})"),
            CurveId::XNp(l) => write!(f, "X{l}"),
            CurveId::XPlus(l) => write!(f, "X+{l}"),
            CurveId::AlQuotient { m, q } => write!(f, "X0({m})/w{q}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    HurwitzOracle,
    QuotientFormula,
    CoveringFormula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Genus {
    Exact(u64),
    /// Known only to exceed one.
    AboveOne,
}

impl fmt::Display for Genus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Genus::Exact(g) => write!(f, "{g}"),
            Genus::AboveOne => write!(f, "> 1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    pub curve: CurveId,
    pub genus: Genus,
    pub method: Method,
}

impl GenusReport {
    pub fn exact(&self) -> Option<u64> {
        match self.genus {
            Genus::Exact(g) => Some(g),
            Genus::AboveOne => None,
        }
    }
}

pub fn cusps_x0(n: u64) -> Vec<CuspData> {
    let mut out = Vec::new();
    for d in divisors(n) {
        let h = d.gcd(&(n / d));
        for u in (1..=h).filter(|u| u.gcd(&h) == 1) {
            let m = (0..).map(|k| u + k * h).find(|m| m.gcd(&d) == 1).expect("Dirichlet");
            out.push(CuspData { n: d, m, h, ram_degree: n / (d * h) });
        }
    }
    out
}

/// `P¹(ℤ/N)` with an index for every primitive pair `(c, d)` mod `N`.
pub struct P1 {
    n: u64,
    index: Vec<u32>,
    reps: Vec<(u64, u64)>,
}

impl P1 {
    pub fn new(n: u64) -> Self {
        let size = (n * n) as usize;
        let mut index = vec![u32::MAX; size];
        let mut reps = Vec::new();
        let units: Vec<u64> = (1..=n).filter(|u| u.gcd(&n) == 1).map(|u| u % n).collect();
        for c in 0..n {
            for d in 0..n {
                if c.gcd(&d).gcd(&n) != 1 || index[(c * n + d) as usize] != u32::MAX {
                    continue;
                }
                let id = reps.len() as u32;
                reps.push((c, d));
                for &u in &units {
                    index[((u * c % n) * n + u * d % n) as usize] = id;
                }
            }
        }
        P1 { n, index, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> (u64, u64) {
        self.reps[i]
    }

    pub fn id(&self, c: i128, d: i128) -> usize {
        let n = self.n as i128;
        let (c, d) = (c.rem_euclid(n) as u64, d.rem_euclid(n) as u64);
        let i = self.index[(c * self.n + d) as usize];
        assert!(i != u32::MAX, "({c}:{d}) is not primitive mod {}", self.n);
        i as usize
    }
}

/// Orbits of `(c:d) ↦ (c:c+d)` on `P¹(ℤ/N)`, as a map from point to orbit.
fn cusp_orbits(p1: &P1) -> (Vec<usize>, usize) {
    let mut orbit = vec![usize::MAX; p1.len()];
    let mut count = 0;
    for start in 0..p1.len() {
        if orbit[start] != usize::MAX {
            continue;
        }
        let mut i = start;
        while orbit[i] == usize::MAX {
            orbit[i] = count;
            let (c, d) = p1.rep(i);
            i = p1.id(c as i128, (c + d) as i128);
        }
        count += 1;
    }
    (orbit, count)
}

/// Number of cusps of `X₀(N)` by orbit enumeration.
pub fn cusps_oracle(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    cusp_orbits(&P1::new(n)).1 as u64
}

/// Extended gcd on `i128`: returns `(g, x, y)` with `ax + by = g ≥ 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// A matrix in `SL₂(ℤ)` with bottom row congruent to `(c, d)` mod `n`.
fn lift_bottom_row(c: u64, d: u64, n: u64) -> [i128; 4] {
    let c = if c == 0 { n as i128 } else { c as i128 };
    let d = (0..)
        .map(|k| d as i128 + k * n as i128)
        .find(|&d| ext_gcd(c, d).0 == 1)
        .expect("coprime lift");
    // a d - b c = 1
    let (_, x, y) = ext_gcd(d, c);
    [x, -y, c, d]
}

pub fn genus_x0(n: u64) -> GenusReport {
    let f = factorize(n);
    let nu2 = if n.is_multiple_of(4) {
        0
    } else {
        f.iter().map(|&(p, _)| 1 + kronecker(-4, p) as i64).product::<i64>()
    };
    let nu3 = if n.is_multiple_of(9) {
        0
    } else {
        f.iter().map(|&(p, _)| 1 + kronecker(-3, p) as i64).product::<i64>()
    };
    let nuinf = cusps_x0(n).len() as i64;
    let twelve_g = 12 + psi_index(n) as i64 - 3 * nu2 - 4 * nu3 - 6 * nuinf;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0, "genus of X0({n}) not integral");
    GenusReport { curve: CurveId::X0(n), genus: Genus::Exact((twelve_g / 12) as u64), method: Method::ClosedForm }
}

/// `Σ_{n | N} φ(gcd(n, N/n))`, the number of cusps of `X₀(N)`.
fn cusp_count(n: u64) -> u64 {
    divisors(n).into_iter().map(|d| euler_phi(d.gcd(&(n / d)))).sum()
}

pub fn genus_xnp(level: &Level) -> GenusReport {
    let (n, p) = (level.n() as i128, level.p() as i128);
    let q = p * p - 1;
    let num = 24 + psi_index(level.n()) as i128 * p * q - 6 * q * cusp_count(level.n()) as i128;
    assert!(num >= 0 && num % 24 == 0, "closed-form genus of X{level} not integral (N={n})");
    GenusReport { curve: CurveId::XNp(*level), genus: Genus::Exact((num / 24) as u64), method: Method::ClosedForm }
}

/// Ramification data of a covering of curves: degree, base genus and the
/// multiset of ramification indices greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ramification {
    pub degree: u64,
    pub base_genus: u64,
    /// ramification index ↦ number of points with that index
    pub points: BTreeMap<u64, u64>,
}

impl Ramification {
    pub fn total(&self) -> u64 {
        self.points.iter().map(|(e, k)| (e - 1) * k).sum()
    }

    /// Genus of the cover from `2g − 2 = d(2g₀ − 2) + Σ(e − 1)`.
    pub fn cover_genus(&self) -> Result<u64> {
        let rhs = self.degree as i128 * (2 * self.base_genus as i128 - 2) + self.total() as i128;
        if rhs < -2 || rhs % 2 != 0 {
            return Err(Error::Ramification(format!(
                "2g-2 = {rhs} is not an admissible value (degree {}, base genus {}, data {:?})",
                self.degree, self.base_genus, self.points
            )));
        }
        Ok(((rhs + 2) / 2) as u64)
    }
}

/// Ramification of `X(N,p) → X(1)`.
pub fn ramification_xnp(level: &Level) -> Result<Ramification> {
    let (n, p) = (level.n(), level.p());
    let d = psi_index(n) * p * (p * p - 1) / 2;
    if !d.is_multiple_of(6) {
        return Err(Error::Ramification(format!("degree {d} of X{level} not divisible by 6")));
    }
    let mut points = BTreeMap::new();
    *points.entry(2).or_insert(0) += d / 2;
    *points.entry(3).or_insert(0) += d / 3;
    let mut fibre = 0;
    for c in cusps_x0(n) {
        let e = p * c.ram_degree;
        *points.entry(e).or_insert(0) += (p * p - 1) / 2;
        fibre += e * (p * p - 1) / 2;
    }
    if fibre != d {
        return Err(Error::Ramification(format!("cusp fibre of X{level} has size {fibre}, expected {d}")));
    }
    points.remove(&1);
    Ok(Ramification { degree: d, base_genus: 0, points })
}

pub fn genus_xnp_hurwitz(level: &Level) -> Result<GenusReport> {
    let g = ramification_xnp(level)?.cover_genus()?;
    Ok(GenusReport { curve: CurveId::XNp(*level), genus: Genus::Exact(g), method: Method::HurwitzOracle })
}

fn check_al(m: u64, q: u64) -> Result<()> {
    let fail = |reason| Err(Error::InvalidAtkinLehner { m, q, reason });
    if q <= 1 {
        return fail("Q must exceed 1");
    }
    if !m.is_multiple_of(q) {
        return fail("Q must divide M");
    }
    if q.gcd(&(m / q)) != 1 {
        return fail("Q and M/Q must be coprime");
    }
    Ok(())
}

/// `#{x mod 2p^k : x² ≡ D mod 4p^k}`.
fn local_roots(disc: i64, p: u64, k: u32) -> u64 {
    let pk = p.pow(k) as i64;
    let modulus = 4 * pk;
    (0..2 * pk).filter(|x| (x * x - disc).rem_euclid(modulus) == 0).count() as u64
}

/// Local embedding number at `p^k || M/Q` for the order of discriminant `D`.
///
/// Away from the conductor this is the square-root count. The one case with
/// `p` dividing the conductor is `D = −4Q`, `Q ≡ 3 mod 4` at `p = 2`, where
/// it depends on `χ = (−Q/2)` and `k`.
fn local_factor(disc: i64, p: u64, k: u32) -> u64 {
    if p == 2 && disc % 4 == 0 && (-disc / 4) % 4 == 3 {
        let chi = kronecker(disc / 4, 2) as i64;
        return match k {
            1 => 2,
            2 => (3 + chi) as u64,
            _ => (3 * (1 + chi)) as u64,
        };
    }
    local_roots(disc, p, k)
}

fn weighted_class_term(disc: i64, rest: &[(u64, u32)]) -> u64 {
    let h = class_number(Discriminant::new(disc).expect("negative discriminant"));
    h * rest.iter().map(|&(p, k)| local_factor(disc, p, k)).product::<u64>()
}

/// Number of fixed points of `w_Q` on `X₀(M)`.
///
/// For `Q ≥ 5` this is `h(−4Q)·λ(−4Q) + h(−Q)·λ(−Q)`, the second term only
/// when `Q ≡ 3 mod 4`. Here `λ(D)` is a product over `p^k || M/Q` of local
/// embedding numbers, see [`local_factor`]. Small `Q`:
///
/// | Q | discriminants | extra |
/// |---|---------------|-------|
/// | 2 | −8, −4        |       |
/// | 3 | −12, −3       |       |
/// | 4 | −16           | number of cusps of `X₀(M/4)` (all fixed) |
pub fn al_fixed_points(m: u64, q: u64) -> Result<u64> {
    check_al(m, q)?;
    let rest = factorize(m / q);
    let q_i = q as i64;
    let discs: Vec<i64> = match q {
        2 => vec![-8, -4],
        3 => vec![-12, -3],
        4 => vec![-16],
        _ if q % 4 == 3 => vec![-4 * q_i, -q_i],
        _ => vec![-4 * q_i],
    };
    let mut total: u64 = discs.iter().map(|&d| weighted_class_term(d, &rest)).sum();
    if q == 4 {
        total += cusp_count(m / 4);
    }
    Ok(total)
}

/// An Atkin–Lehner matrix `[[Q, y], [M, Qw]]` of determinant `Q`.
fn al_matrix(m: u64, q: u64) -> [i128; 4] {
    let (q_i, mp) = (q as i128, (m / q) as i128);
    // Q w - M' y = 1
    let (_, w, y) = ext_gcd(q_i, mp);
    [q_i, -y, m as i128, q_i * w]
}

/// Cusp orbits of `X₀(M)` fixed by `w_Q`, by acting on cusp representatives.
pub fn al_fixed_cusps(m: u64, q: u64) -> Result<u64> {
    check_al(m, q)?;
    Ok(al_fixed_cusps_filtered(m, q, |_| true))
}

/// Fixed points of `w_Q` on `X₀(M)` by counting positive definite forms
/// `[A, B, C]` of discriminant `t² − 4Q` with `M | A` and `B ≡ t mod 2Q`,
/// up to `Γ₀(M)`, weighted by their stabilizers; plus fixed cusps.
pub fn al_fixed_points_oracle(m: u64, q: u64) -> Result<u64> {
    check_al(m, q)?;
    let p1 = P1::new(m);
    let q_i = q as i128;
    let m_i = m as i128;
    // sum of (good cosets) / weight, accumulated over a common denominator 6
    let mut mass6: i128 = 0;
    let tmax = (2.0 * (q as f64).sqrt()).ceil() as i128 + 1;
    for t in -tmax..=tmax {
        if t % q_i != 0 || t * t >= 4 * q_i {
            continue;
        }
        let disc = (t * t - 4 * q_i) as i64;
        for f in reduced_forms(Discriminant::new(disc)?) {
            let (fa, fb, fc) = (f.a as i128, f.b as i128, f.c as i128);
            let mut good = 0i128;
            for i in 0..p1.len() {
                let (a0, c0) = p1.rep(i);
                // [[x, y], [a, c]] ∈ SL₂(ℤ) gives g = [[a, −x], [c, −y]] with first column (a, c)
                let [x, y, a, c] = lift_bottom_row(a0, c0, m);
                let (ga, gb, gc, gd) = (a, -x, c, -y);
                debug_assert_eq!(ga * gd - gb * gc, 1);
                let aa = fa * ga * ga + fb * ga * gc + fc * gc * gc;
                let bb = 2 * fa * ga * gb + fb * (ga * gd + gb * gc) + 2 * fc * gc * gd;
                if aa % m_i == 0 && (bb - t).rem_euclid(2 * q_i) == 0 {
                    good += 1;
                }
            }
            mass6 += good * (6 / f.automorphism_weight() as i128);
        }
    }
    if mass6 % 6 != 0 {
        return Err(Error::Ramification(format!("fixed-point mass of w{q} on X0({m}) is not integral")));
    }
    Ok((mass6 / 6) as u64 + al_fixed_cusps(m, q)?)
}

pub fn genus_al_quotient(m: u64, q: u64) -> Result<GenusReport> {
    let f = al_fixed_points(m, q)? as i64;
    let g = genus_x0(m).exact().expect("exact") as i64;
    let num = 2 * g + 2 - f;
    if num < 0 || num % 4 != 0 {
        return Err(Error::Ramification(format!(
            "quotient genus (2·{g} + 2 − {f})/4 of X0({m})/w{q} is not a non-negative integer"
        )));
    }
    Ok(GenusReport {
        curve: CurveId::AlQuotient { m, q },
        genus: Genus::Exact((num / 4) as u64),
        method: Method::QuotientFormula,
    })
}

/// Pairs `(N, p)` with `pN ≤ bound` and `X₀(pN)/w_N` of genus zero.
pub fn lemma_pairs(bound: u64) -> Result<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for p in (3..=bound / 2).filter(|&p| crate::arith::is_prime(p)) {
        for n in 2..=bound / p {
            if n % p == 0 {
                continue;
            }
            if genus_al_quotient(p * n, n)?.exact() == Some(0) {
                out.push((n, p));
            }
        }
    }
    out.sort_by_key(|&(n, p)| (p, n));
    Ok(out)
}

/// Levels with `N ≤ max_n`, `p ≤ max_p` and `genus(X(N,p)) ≤ 1`.
pub fn low_genus_xnp(max_n: u64, max_p: u64) -> Vec<(Level, u64)> {
    let mut out = Vec::new();
    for p in (3..=max_p).filter(|&p| crate::arith::is_prime(p)) {
        for n in 2..=max_n {
            let Ok(level) = Level::new(n, p) else { continue };
            let g = genus_xnp(&level).exact().expect("exact");
            if g <= 1 {
                out.push((level, g));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XPlusReport {
    pub report: GenusReport,
    pub quotient_genus: u64,
    /// Ramification of `X⁺(N,p) → X₀(pN)/w_N`, when the quotient has genus 0.
    pub covering: Option<Ramification>,
}

/// Points of `X₀(pN)/w_N` above cusps `m/n` with `p | n`.
fn ramified_base_cusps(m: u64, q: u64, p: u64) -> Result<u64> {
    let p1 = P1::new(m);
    let (orbit, count) = cusp_orbits(&p1);
    let mut denominators = vec![0u64; count];
    let mut reps = vec![None; count];
    for i in 0..p1.len() {
        reps[orbit[i]].get_or_insert(i);
    }
    for (o, rep) in reps.iter().enumerate() {
        let (c, _) = p1.rep(rep.expect("orbit has a point"));
        denominators[o] = c.gcd(&m);
    }
    let with_p = denominators.iter().filter(|&&n| n % p == 0).count() as u64;
    // w_Q preserves the p-part of the denominator, so it permutes these cusps
    let fixed_with_p = {
        al_fixed_cusps_filtered(m, q, |n| n % p == 0)
    };
    Ok((with_p - fixed_with_p) / 2 + fixed_with_p)
}

fn al_fixed_cusps_filtered(m: u64, q: u64, keep: impl Fn(u64) -> bool) -> u64 {
    let p1 = P1::new(m);
    let (orbit, count) = cusp_orbits(&p1);
    let mut reps = vec![None; count];
    for i in 0..p1.len() {
        reps[orbit[i]].get_or_insert(i);
    }
    let [wa, wb, wc, wd] = al_matrix(m, q);
    let mut fixed = 0;
    for (o, rep) in reps.into_iter().enumerate() {
        let (c0, d0) = p1.rep(rep.expect("orbit has a point"));
        if !keep(c0.gcd(&m)) {
            continue;
        }
        let [a, _, c, _] = lift_bottom_row(c0, d0, m);
        let (x, y) = (wa * a + wb * c, wc * a + wd * c);
        let g = ext_gcd(x, y).0;
        let (x, y) = (x / g, y / g);
        let (_, s, _) = ext_gcd(x, y);
        if orbit[p1.id(y, s)] == o {
            fixed += 1;
        }
    }
    fixed
}

/// Ramification of `X⁺(N,p) → X₀(pN)/w_N` of degree `p(p−1)/2`.
///
/// Over the images of cusps `m/n` with `p | n` every point has index `p`.
/// Over the images of non-cuspidal fixed points of `w_N` every point has
/// index 2. Nothing else ramifies.
pub fn xplus_covering(level: &Level) -> Result<Ramification> {
    let (n, p) = (level.n(), level.p());
    let m = p * n;
    let degree = p * (p - 1) / 2;
    let base_genus = genus_al_quotient(m, n)?.exact().expect("exact");
    let cusp_points = ramified_base_cusps(m, n, p)?;
    let fixed_noncusp = al_fixed_points(m, n)? - al_fixed_cusps(m, n)?;
    let mut points = BTreeMap::new();
    if cusp_points > 0 {
        points.insert(p, cusp_points * degree / p);
    }
    if fixed_noncusp > 0 {
        if degree % 2 != 0 {
            return Err(Error::Ramification(format!(
                "odd degree {degree} over {fixed_noncusp} fixed points of w{n} on X0({m})"
            )));
        }
        points.insert(2, fixed_noncusp * degree / 2);
    }
    Ok(Ramification { degree, base_genus, points })
}

pub fn xplus_verdict(level: &Level) -> Result<XPlusReport> {
    if !level.is_cyclotomic() {
        return Err(Error::WrongCase { level: level.to_string(), expected: "cyclotomic" });
    }
    let (n, p) = (level.n(), level.p());
    let quotient_genus = genus_al_quotient(p * n, n)?.exact().expect("exact");
    let curve = CurveId::XPlus(*level);
    if quotient_genus > 0 {
        return Ok(XPlusReport {
            report: GenusReport { curve, genus: Genus::AboveOne, method: Method::QuotientFormula },
            quotient_genus,
            covering: None,
        });
    }
    let covering = xplus_covering(level)?;
    let g = covering.cover_genus()?;
    Ok(XPlusReport {
        report: GenusReport { curve, genus: Genus::Exact(g), method: Method::CoveringFormula },
        quotient_genus,
        covering: Some(covering),
    })
}
