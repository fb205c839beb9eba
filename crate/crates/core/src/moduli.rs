//! Triples `(E, C, [T₁,T₂]_V)` as matrix classes relative to a fixed
//! reference basis whose Weil pairing is `ζ_p`.
//!
//! A basis `R·M` (row vector `R`, matrix `M`) is stored by its normal form:
//! `M = basis` if `det M` is a square, `M = basis·V` otherwise, with `basis`
//! in `PSL₂(𝔽p)`. Curves and points never appear.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{kronecker, least_non_square, Level};
use crate::error::{Error, Result};
use crate::galmodel::{is_projective_hom, FiniteGaloisModel};
use crate::projgroup::{in_psl2, mat_j, mat_t, mat_u, mat_v, pgl2_elements, psl2_elements, Mat2, ProjMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Twist {
    One,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModuliState {
    basis: ProjMat,
    twist: Twist,
    v: u64,
}

impl ModuliState {
    pub fn basis(&self) -> ProjMat {
        self.basis
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    /// The non-square defining `V`.
    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn p(&self) -> u64 {
        self.basis.p()
    }

    /// The full basis matrix, `basis·V^twist`.
    pub fn matrix(&self) -> ProjMat {
        match self.twist {
            Twist::One => self.basis,
            Twist::V => self.basis * mat_v(self.p(), self.v),
        }
    }

    /// All `2·|PSL₂(𝔽p)|` states for the given `v`.
    pub fn all(p: u64, v: u64) -> Result<Vec<ModuliState>> {
        check_v(p, v)?;
        let psl = psl2_elements(p);
        Ok([Twist::One, Twist::V]
            .into_iter()
            .flat_map(|twist| psl.iter().map(move |&basis| ModuliState { basis, twist, v }))
            .collect())
    }
}

impl fmt::Display for ModuliState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.twist {
            Twist::One => write!(f, "({}, 1)", self.basis),
            Twist::V => write!(f, "({}, V)", self.basis),
        }
    }
}

/// `σ` up to its effect on `ζ_p` and on a quadratic field `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisSymbol {
    pub chi: u64,
    pub in_k: bool,
}

impl GaloisSymbol {
    pub fn new(chi: u64, in_k: bool, p: u64) -> Result<Self> {
        if chi.is_multiple_of(p) {
            return Err(Error::Precondition("chi must be a unit mod p".into()));
        }
        Ok(GaloisSymbol { chi: chi % p, in_k })
    }

    /// `+1` on `G_{k_p}`.
    pub fn epsilon(&self, p: u64) -> i8 {
        kronecker(self.chi as i64, p)
    }
}

fn check_v(p: u64, v: u64) -> Result<()> {
    if kronecker(v as i64, p) != -1 {
        return Err(Error::Precondition(format!("v = {v} is not a non-square mod {p}")));
    }
    Ok(())
}

/// The `v` used at a level: `N⁻¹` when `N` is a non-square, the least
/// non-square otherwise.
pub fn v_for(level: &Level) -> u64 {
    if level.is_cyclotomic() {
        least_non_square(level.p())
    } else {
        level.n_inverse()
    }
}

pub fn normal_form(g: ProjMat, v: u64) -> Result<ModuliState> {
    let p = g.p();
    check_v(p, v)?;
    Ok(if in_psl2(&g) {
        ModuliState { basis: g, twist: Twist::One, v }
    } else {
        ModuliState { basis: g * mat_v(p, v).inverse(), twist: Twist::V, v }
    })
}

pub fn normal_form_mat(g: Mat2, v: u64) -> Result<ModuliState> {
    normal_form(ProjMat::new(g)?, v)
}

pub fn act_g(s: &ModuliState, gamma: &ProjMat) -> Result<ModuliState> {
    if gamma.p() != s.p() {
        return Err(Error::MixedCharacteristic(gamma.p(), s.p()));
    }
    if !in_psl2(gamma) {
        return Err(Error::Precondition(format!("{gamma} is not in PSL2")));
    }
    Ok(ModuliState { basis: s.basis * gamma.hat(), ..*s })
}

/// The involution `w`. Scaling by `√N⁻¹` is projectively trivial, so the
/// cyclotomic case returns `s`. Otherwise the basis is multiplied by `V`,
/// which needs `v = N⁻¹`.
pub fn act_w(s: &ModuliState, level: &Level) -> Result<ModuliState> {
    if level.p() != s.p() {
        return Err(Error::MixedCharacteristic(level.p(), s.p()));
    }
    if level.is_cyclotomic() {
        return Ok(*s);
    }
    if s.v != level.n_inverse() {
        return Err(Error::Precondition(format!(
            "non-cyclotomic level {level} needs v = {}, state uses {}",
            level.n_inverse(),
            s.v
        )));
    }
    normal_form(s.matrix() * mat_v(s.p(), s.v), s.v)
}

/// `σ` acting on a state, given the matrix `frame` of `σ` on the reference
/// basis. The frame is free up to its determinant class, which must match
/// `chi`.
pub fn galois_act(s: &ModuliState, sym: &GaloisSymbol, frame: &ProjMat) -> Result<ModuliState> {
    if frame.det_class() != sym.epsilon(s.p()) {
        return Err(Error::Precondition(format!(
            "frame {frame} has determinant class {}, chi = {} has class {}",
            frame.det_class(),
            sym.chi,
            sym.epsilon(s.p())
        )));
    }
    normal_form(*frame * s.matrix(), s.v)
}

/// For every frame, state and `γ`, compares `σ(act_G(s, γ))` with
/// `act_G(σ(s), γ_σ)` and checks that the forced `γ_σ` is `hat(V)·γ·hat(V)`
/// off `G_{k_p}` and `γ` on it.
pub fn verify_galois_conjugation(p: u64, v: u64) -> Result<bool> {
    check_v(p, v)?;
    let hv = mat_v(p, v).hat();
    let psl = psl2_elements(p);
    let chis = [1, v];
    for &chi in &chis {
        let sym = GaloisSymbol::new(chi, true, p)?;
        for frame in pgl2_elements(p).into_iter().filter(|f| f.det_class() == sym.epsilon(p)) {
            for twist in [Twist::One, Twist::V] {
                let s = ModuliState { basis: ProjMat::identity(p), twist, v };
                let base = galois_act(&s, &sym, &frame)?;
                for gamma in &psl {
                    let moved = galois_act(&act_g(&s, gamma)?, &sym, &frame)?;
                    if moved.twist != base.twist {
                        return Ok(false);
                    }
                    let gamma_sigma = (base.basis.inverse() * moved.basis).hat();
                    let expected = if sym.epsilon(p) == -1 { hv * *gamma * hv } else { *gamma };
                    if gamma_sigma != expected || act_g(&base, &gamma_sigma)? != moved {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Checks `σ∘w∘σ⁻¹∘w⁻¹ = id` on every state, for every `chi ∈ 𝔽p*` and a
/// spread of frames per `chi`.
pub fn verify_w_rationality(level: &Level) -> Result<bool> {
    let p = level.p();
    let v = v_for(level);
    let states = ModuliState::all(p, v)?;
    let spread = [ProjMat::identity(p), mat_t(p), mat_u(p), mat_t(p) * mat_u(p), mat_u(p) * mat_t(p) * mat_t(p)];
    for chi in 1..p {
        let sym = GaloisSymbol::new(chi, true, p)?;
        let inv_sym = GaloisSymbol::new(crate::arith::inv_mod(chi, p).expect("unit"), true, p)?;
        let diag = ProjMat::from_rows(p, [[1, 0], [0, chi as i64]])?;
        for g in &spread {
            let frame = diag * *g;
            let frame_inv = frame.inverse();
            for s in &states {
                let t = act_w(s, level)?; // w⁻¹ = w
                let t = galois_act(&t, &inv_sym, &frame_inv)?;
                let t = act_w(&t, level)?;
                let t = galois_act(&t, &sym, &frame)?;
                if t != *s {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Plain,
    Primed,
}

/// Whether `ϱ_E = J·ϱ·J` (plain) or `ϱ_E = V·J·ϱ·J·V` (primed) pointwise.
pub fn rationality_condition(m: &FiniteGaloisModel, rho_e: &[ProjMat], variant: Variant, v: u64) -> Result<bool> {
    let p = m.p;
    check_v(p, v)?;
    if !is_projective_hom(&m.group, rho_e) {
        return Err(Error::InvalidModel(vec!["rhoE not a homomorphism".into()]));
    }
    let j = mat_j(p);
    let vm = mat_v(p, v);
    Ok(m.rho.iter().zip(rho_e).all(|(r, e)| {
        let jrj = j * *r * j;
        *e == match variant {
            Variant::Plain => jrj,
            Variant::Primed => vm * jrj * vm,
        }
    }))
}
