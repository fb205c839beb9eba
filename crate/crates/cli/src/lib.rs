//! Command implementations behind the `modtwist` binary.
//!
//! Exit codes: 0 success, 1 selftest failure, 2 usage or parse error,
//! 3 oracle mismatch, 4 model validation failure, 5 parity mismatch.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use modtwist_core::arith::{kronecker, Level};
use modtwist_core::curves::{
    al_fixed_cusps, al_fixed_points, al_fixed_points_oracle, cusps_oracle, cusps_x0, genus_al_quotient, genus_xnp,
    genus_xnp_hurwitz, lemma_pairs, low_genus_xnp, xplus_verdict,
};
use modtwist_core::extgroup::{involutions_extending_wn, verify_relations, wgroup};
use modtwist_core::galmodel::{classify, parse_model, validate_model, ParsedModel};
use modtwist_core::moduli::{v_for, Variant};
use modtwist_core::projgroup::centralizer;
use modtwist_core::selftest::{self, Fault, Options};
use modtwist_core::twists::{build_xi, centralizer_verdict, twist_plan};
use modtwist_core::Error;

pub mod exit {
    pub const OK: i32 = 0;
    pub const SELFTEST: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const ORACLE: i32 = 3;
    pub const VALIDATION: i32 = 4;
    pub const PARITY: i32 = 5;
}

#[derive(Parser, Debug)]
#[command(name = "modtwist", version, about = "Genera, automorphism groups and twists of the modular curves X(N,p)")]
pub struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Genus of X(N,p), or the X+(N,p) verdict.
    Genus {
        n: u64,
        p: u64,
        #[arg(long)]
        plus: bool,
        /// Cross-check against Riemann–Hurwitz bookkeeping.
        #[arg(long)]
        oracle: bool,
    },
    /// Cusps of X0(N).
    Cusps { n: u64 },
    /// Structure of W(N,p).
    Structure { n: u64, p: u64 },
    /// Scan for the lemma pairs and low-genus levels.
    Scan {
        #[arg(long)]
        lemma: bool,
        #[arg(long)]
        low_genus: bool,
        #[arg(long, default_value_t = 300)]
        max_n: u64,
        #[arg(long, default_value_t = 13)]
        max_p: u64,
        /// Bound on pN for the lemma scan.
        #[arg(long, default_value_t = 71)]
        max: u64,
    },
    /// Fixed points of the Atkin–Lehner involution w_Q on X0(M).
    AlFixed {
        m: u64,
        q: u64,
        #[arg(long)]
        oracle: bool,
    },
    /// Cyclotomic or non-cyclotomic.
    Classify { n: u64, p: u64 },
    /// Twists classifying Q-curves of degree N realizing a model.
    TwistPlan {
        n: u64,
        p: u64,
        file: PathBuf,
        /// Quadratic fields k, as labelled in the model.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        k: Vec<i64>,
    },
    /// Build a cocycle for a model and check the cocycle condition.
    CocycleCheck {
        n: u64,
        p: u64,
        file: PathBuf,
        #[arg(long)]
        primed: bool,
        /// Multiply by the character of this labelled field.
        #[arg(long, allow_negative_numbers = true)]
        k: Option<i64>,
    },
    /// Centralizer of the image of a model's projective representation.
    Centralizer { file: PathBuf },
    /// Run the invariant suites.
    Selftest {
        #[arg(long)]
        quick: bool,
        #[arg(long, hide = true, value_parser = ["class-number"])]
        inject_fault: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub timing_us: u64,
}

/// A finished command: the report, its text rendering and the exit code.
#[derive(Debug)]
pub struct Finished {
    pub report: Report,
    pub text: String,
    pub code: i32,
}

#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: i32,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidModel(_) => exit::VALIDATION,
            Error::ParityMismatch(_) => exit::PARITY,
            _ => exit::USAGE,
        };
        Failure { message: e.to_string(), code }
    }
}

fn level(n: u64, p: u64) -> Result<Level, Failure> {
    Ok(Level::new(n, p)?)
}

fn load_model(file: &PathBuf) -> Result<ParsedModel, Failure> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| Failure { message: format!("{}: {e}", file.display()), code: exit::USAGE })?;
    let parsed = parse_model(&text)?;
    let violations = validate_model(&parsed.model);
    if !violations.is_empty() {
        return Err(Error::InvalidModel(violations).into());
    }
    Ok(parsed)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

struct Out {
    inputs: Value,
    outputs: Value,
    text: String,
    code: i32,
}

impl Out {
    fn ok(inputs: Value, outputs: Value, text: String) -> Self {
        Out { inputs, outputs, text, code: exit::OK }
    }
}

pub fn run(cli: &Cli) -> Result<Finished, Failure> {
    let start = Instant::now();
    let (name, out) = match &cli.command {
        Command::Genus { n, p, plus, oracle } => ("genus", cmd_genus(*n, *p, *plus, *oracle)?),
        Command::Cusps { n } => ("cusps", cmd_cusps(*n)?),
        Command::Structure { n, p } => ("structure", cmd_structure(*n, *p)?),
        Command::Scan { lemma, low_genus, max_n, max_p, max } => {
            ("scan", cmd_scan(*lemma, *low_genus, *max_n, *max_p, *max)?)
        }
        Command::AlFixed { m, q, oracle } => ("al-fixed", cmd_al_fixed(*m, *q, *oracle)?),
        Command::Classify { n, p } => ("classify", cmd_classify(*n, *p)?),
        Command::TwistPlan { n, p, file, k } => ("twist-plan", cmd_twist_plan(*n, *p, file, k)?),
        Command::CocycleCheck { n, p, file, primed, k } => ("cocycle-check", cmd_cocycle_check(*n, *p, file, *primed, *k)?),
        Command::Centralizer { file } => ("centralizer", cmd_centralizer(file)?),
        Command::Selftest { quick, inject_fault } => ("selftest", cmd_selftest(*quick, cli.seed, inject_fault.is_some())),
    };
    Ok(Finished {
        report: Report {
            command: name.into(),
            inputs: out.inputs,
            outputs: out.outputs,
            timing_us: start.elapsed().as_micros() as u64,
        },
        text: out.text,
        code: out.code,
    })
}

fn cmd_genus(n: u64, p: u64, plus: bool, oracle: bool) -> Result<Out, Failure> {
    let l = level(n, p)?;
    let inputs = json!({ "n": n, "p": p, "plus": plus, "oracle": oracle });
    let mut code = exit::OK;
    if plus {
        let r = xplus_verdict(&l)?;
        let mut text = format!("genus of {}: {}\n", r.report.curve, r.report.genus);
        let mut outputs = json!({ "genus": to_value(&r.report), "quotient_genus": r.quotient_genus });
        if let Some(cov) = &r.covering {
            text += &format!("covering of degree {} over a genus-{} base, ramification {:?}\n", cov.degree, cov.base_genus, cov.points);
            outputs["covering"] = to_value(cov);
        }
        if oracle {
            let agrees = match &r.covering {
                Some(cov) => Some(cov.cover_genus()?) == r.report.exact(),
                None => true,
            };
            outputs["oracle_agrees"] = json!(agrees);
            text += &format!("Riemann-Hurwitz cross-check: {}\n", if agrees { "agrees" } else { "MISMATCH" });
            if !agrees {
                code = exit::ORACLE;
            }
        }
        return Ok(Out { inputs, outputs, text, code });
    }
    let r = genus_xnp(&l);
    let mut text = format!("genus of {}: {}\n", r.curve, r.genus);
    let mut outputs = json!({ "genus": to_value(&r) });
    if oracle {
        let h = genus_xnp_hurwitz(&l)?;
        let agrees = h.genus == r.genus;
        outputs["oracle"] = to_value(&h);
        outputs["oracle_agrees"] = json!(agrees);
        text += &format!("Hurwitz oracle: {} ({})\n", h.genus, if agrees { "agrees" } else { "MISMATCH" });
        if !agrees {
            code = exit::ORACLE;
        }
    }
    Ok(Out { inputs, outputs, text, code })
}

fn cmd_cusps(n: u64) -> Result<Out, Failure> {
    if n == 0 {
        return Err(Failure { message: "N must be positive".into(), code: exit::USAGE });
    }
    let cusps = cusps_x0(n);
    let oracle = cusps_oracle(n);
    let mut text = format!("X0({n}) has {} cusps (orbit count {oracle})\n", cusps.len());
    for c in &cusps {
        text += &format!("  {:>6}  width {}\n", c.label(), c.ram_degree);
    }
    Ok(Out::ok(json!({ "n": n }), json!({ "cusps": to_value(&cusps), "oracle_count": oracle }), text))
}

fn cmd_structure(n: u64, p: u64) -> Result<Out, Failure> {
    let l = level(n, p)?;
    let r = wgroup(&l)?;
    let mut text = format!("W{l}: order {}, {:?}, G(N,p) of order {}\n", r.order, r.structure, r.g_order);
    for (name, m) in &r.generators {
        text += &format!("  {name} = {m}  ->  {}\n", r.reduction_table[name]);
    }
    let mut outputs = to_value(&r);
    match r.central_involution {
        Some(w) => text += &format!("central involution: {w}\n"),
        None => {
            let relations = verify_relations(&l)?;
            let inv = involutions_extending_wn(&l)?;
            text += &format!(
                "relations V_N T_N = U_N^(-N) V_N, V_N U_N = T_N^(-N~) V_N: {}\n{} involutions extending w_N, {}\n",
                if relations { "hold" } else { "FAIL" },
                inv.involutions.len(),
                if inv.single_class { "one conjugacy class" } else { "several classes" }
            );
            outputs["relations_hold"] = json!(relations);
            outputs["involutions"] = to_value(&inv);
        }
    }
    Ok(Out::ok(json!({ "n": n, "p": p }), outputs, text))
}

fn cmd_scan(lemma: bool, low_genus: bool, max_n: u64, max_p: u64, max: u64) -> Result<Out, Failure> {
    let (lemma, low_genus) = if lemma || low_genus { (lemma, low_genus) } else { (true, true) };
    let inputs = json!({ "lemma": lemma, "low_genus": low_genus, "max_n": max_n, "max_p": max_p, "max": max });
    let mut outputs = json!({});
    let mut text = String::new();
    if lemma {
        let pairs = lemma_pairs(max)?;
        text += &format!("{} pairs (N,p) with pN <= {max} and X0(pN)/w_N of genus 0:\n ", pairs.len());
        for (n, p) in &pairs {
            text += &format!(" ({n},{p})");
        }
        text += "\n";
        outputs["lemma_pairs"] = to_value(&pairs);
    }
    if low_genus {
        let low = low_genus_xnp(max_n, max_p);
        text += &format!("levels with N <= {max_n}, p <= {max_p} and genus(X(N,p)) <= 1:\n");
        for (l, g) in &low {
            text += &format!("  X{l}: genus {g}\n");
        }
        outputs["low_genus"] = json!(low.iter().map(|(l, g)| json!({ "n": l.n(), "p": l.p(), "genus": g })).collect::<Vec<_>>());
    }
    Ok(Out::ok(inputs, outputs, text))
}

fn cmd_al_fixed(m: u64, q: u64, oracle: bool) -> Result<Out, Failure> {
    let fixed = al_fixed_points(m, q)?;
    let cusps = al_fixed_cusps(m, q)?;
    let g = genus_al_quotient(m, q)?;
    let mut text = format!("w{q} on X0({m}): {fixed} fixed points ({cusps} cusps); {} has genus {}\n", g.curve, g.genus);
    let mut outputs = json!({ "fixed_points": fixed, "fixed_cusps": cusps, "quotient": to_value(&g) });
    let mut code = exit::OK;
    if oracle {
        let count = al_fixed_points_oracle(m, q)?;
        text += &format!("form-counting oracle: {count} ({})\n", if count == fixed { "agrees" } else { "MISMATCH" });
        outputs["oracle"] = json!(count);
        if count != fixed {
            code = exit::ORACLE;
        }
    }
    Ok(Out { inputs: json!({ "m": m, "q": q, "oracle": oracle }), outputs, text, code })
}

fn cmd_classify(n: u64, p: u64) -> Result<Out, Failure> {
    let l = level(n, p)?;
    let case = classify(&l);
    let k = kronecker(n as i64, p);
    let text = format!("{l}: {case} (N/p) = {k}, V uses v = {}\n", v_for(&l));
    Ok(Out::ok(json!({ "n": n, "p": p }), json!({ "case": to_value(&case), "kronecker": k, "v": v_for(&l) }), text))
}

fn cmd_twist_plan(n: u64, p: u64, file: &PathBuf, k: &[i64]) -> Result<Out, Failure> {
    let l = level(n, p)?;
    let parsed = load_model(file)?;
    let plan = twist_plan(&l, &parsed.model, parsed.degrees.as_ref(), k)?;
    let mut text = format!("{l}: {} case\n", plan.case);
    for c in &plan.curves {
        text += &format!("  {}  (cocycle in {}: {})\n", c.name, c.ambient, if c.cocycle_valid { "valid" } else { "INVALID" });
    }
    if let Some(fk) = &plan.field_k {
        match fk.field {
            Some(a) => text += &format!("field k = Q(sqrt {a})\n"),
            None => text += &format!("field k cut out by the character {:?}\n", fk.character),
        }
    }
    text += &format!(
        "centralizer of the image: {}; classification map {}\ngenus of {}: {}; {}\n",
        plan.verdict,
        if plan.bijective { "bijective" } else { "not bijective" },
        plan.genus.curve,
        plan.genus.genus,
        plan.finiteness
    );
    let inputs = json!({ "n": n, "p": p, "file": file.display().to_string(), "k": k });
    Ok(Out::ok(inputs, to_value(&plan), text))
}

fn cmd_cocycle_check(n: u64, p: u64, file: &PathBuf, primed: bool, k: Option<i64>) -> Result<Out, Failure> {
    let l = level(n, p)?;
    let m = load_model(file)?.model;
    let kchar = match k {
        Some(k) => Some(
            m.characters
                .iter()
                .find(|c| c.field == Some(k))
                .ok_or_else(|| Failure { message: format!("no model character is labelled with {k}"), code: exit::USAGE })?
                .values
                .clone(),
        ),
        None => None,
    };
    let variant = if primed { Variant::Primed } else { Variant::Plain };
    let c = build_xi(&l, &m, variant, kchar.as_deref())?;
    let mut text = format!("cocycle in {}: {}\n", c.ambient, if c.valid { "valid" } else { "INVALID" });
    for (s, x) in c.values.iter().enumerate() {
        text += &format!("  {:>12}  {x}\n", m.group.name(s));
    }
    let values: Vec<Value> =
        c.values.iter().enumerate().map(|(s, x)| json!({ "element": m.group.name(s), "value": x.to_string() })).collect();
    let inputs = json!({ "n": n, "p": p, "file": file.display().to_string(), "primed": primed, "k": k });
    Ok(Out::ok(inputs, json!({ "ambient": to_value(&c.ambient), "valid": c.valid, "values": values }), text))
}

fn cmd_centralizer(file: &PathBuf) -> Result<Out, Failure> {
    let m = load_model(file)?.model;
    let verdict = centralizer_verdict(&m)?;
    let c = centralizer(&m.image(), m.p)?;
    let text = format!("image of order {}, centralizer of order {}: {verdict}\n", m.image().len(), c.order());
    let outputs = json!({ "image_order": m.image().len(), "centralizer_order": c.order(), "verdict": to_value(&verdict) });
    Ok(Out::ok(json!({ "file": file.display().to_string() }), outputs, text))
}

fn cmd_selftest(quick: bool, seed: u64, fault: bool) -> Out {
    let r = selftest::run(&Options { quick, seed, fault: fault.then_some(Fault::ClassNumber) });
    let mut text = String::new();
    for s in &r.suites {
        text += &format!("{} {:<14} {:>7} ms  {}\n", if s.passed { "pass" } else { "FAIL" }, s.name, s.millis, s.detail);
    }
    Out {
        inputs: json!({ "quick": quick, "seed": seed }),
        outputs: to_value(&r),
        text,
        code: if r.passed() { exit::OK } else { exit::SELFTEST },
    }
}
