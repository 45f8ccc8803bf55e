//! Command-line interface for the orbifold fusion-rule engine.
//!
//! Exit codes: 0 on success (including "multiplicity is zero" answers),
//! 1 when a verification command finds a failing check, 2 on input or
//! environment errors.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use fusion_core::cocycle::minimal_modulus;
use fusion_core::fock;
use fusion_core::lattice::{validate_lattice, Lattice};
use fusion_core::m1::{self, BilinearSpace, M1Module};
use fusion_core::matrix::{IMat, QMat};
use fusion_core::presets;
use fusion_core::vl::{CheckResult, FusionContext, DEFAULT_DET_BOUND};
use fusion_core::{Int, Rat};
use num::ToPrimitive;
use serde_json::{json, Map, Value};
use std::process::ExitCode;

const SCHEMA: &str = "voa-fusion/1";

#[derive(Parser)]
#[command(
    name = "voa-fusion",
    version,
    about = "Classification, fusion rules and verification for orbifold lattice vertex algebras"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LatticeArg {
    /// Lattice: a preset name (A1, A2, A1+A1, E8, A1(k)), an inline
    /// JSON Gram matrix starting with '[', or a path to a JSON file
    /// with a "gram" field
    #[arg(long)]
    lattice: String,
}

#[derive(Subcommand)]
enum Command {
    /// List the irreducible modules in classification order
    Classify {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Print one fusion multiplicity N(M1, M2; M3)
    Rule {
        #[command(flatten)]
        lattice: LatticeArg,
        m1: String,
        m2: String,
        m3: String,
    },
    /// Print the fusion product M1 x M2 as a sum of modules
    Fuse {
        #[command(flatten)]
        lattice: LatticeArg,
        m1: String,
        m2: String,
    },
    /// Print the whole fusion table
    Table {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Check the fusion ring axioms; with no flags all checks run
    Verify {
        #[command(flatten)]
        lattice: LatticeArg,
        /// Only the associativity check
        #[arg(long)]
        assoc: bool,
        /// Only the duality (contragredient symmetry) check
        #[arg(long)]
        duality: bool,
        /// Only the closed-form product check
        #[arg(long)]
        closed_forms: bool,
    },
    /// Print the contragredient of a module
    Contragredient {
        #[command(flatten)]
        lattice: LatticeArg,
        module: String,
    },
    /// Report the four-module structure of a unimodular lattice
    UnimodularReport {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Show the two-cocycle data backing the fusion signs
    CocycleInfo {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Show the central characters of the twisted sector
    Characters {
        #[command(flatten)]
        lattice: LatticeArg,
    },
    /// Run the verification suite over the built-in lattice corpus
    Corpus,
    /// Fusion rules of the free-boson fixed-point algebra
    #[command(subcommand)]
    M1(M1Command),
    /// Exact vertex-operator expansion checks
    #[command(subcommand)]
    Fock(FockCommand),
}

#[derive(Subcommand)]
enum M1Command {
    /// One multiplicity N(M1, M2; M3) for module labels like M+, M-,
    /// M(1/2,0), Mt+
    Rule {
        /// Optional bilinear form (same formats as --lattice) used to
        /// validate momentum dimensions
        #[arg(long)]
        form: Option<String>,
        m1: String,
        m2: String,
        m3: String,
    },
    /// The fusion product of two modules
    Fuse {
        #[arg(long)]
        form: Option<String>,
        m1: String,
        m2: String,
    },
}

#[derive(Subcommand)]
enum FockCommand {
    /// Print the correction coefficient table through a total degree
    Delta {
        #[arg(long, default_value_t = 4)]
        cutoff: usize,
    },
    /// Verify the frozen expansion tables and the derivative identity
    /// for a direction vector
    Verify {
        /// Direction vector as comma-separated rationals, e.g. "1/2,0"
        #[arg(long)]
        lambda: String,
        /// Bilinear form: preset name, inline JSON, or file path
        #[arg(long)]
        gram: String,
    },
}

/// Restores the default SIGPIPE behavior so piping into tools like
/// `head` terminates the process instead of panicking on write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Classify { lattice } => classify(cli.json, &lattice.lattice),
        Command::Rule { lattice, m1, m2, m3 } => rule(cli.json, &lattice.lattice, m1, m2, m3),
        Command::Fuse { lattice, m1, m2 } => fuse(cli.json, &lattice.lattice, m1, m2),
        Command::Table { lattice } => table(cli.json, &lattice.lattice),
        Command::Verify {
            lattice,
            assoc,
            duality,
            closed_forms,
        } => verify(cli.json, &lattice.lattice, *assoc, *duality, *closed_forms),
        Command::Contragredient { lattice, module } => {
            contragredient(cli.json, &lattice.lattice, module)
        }
        Command::UnimodularReport { lattice } => unimodular_report(cli.json, &lattice.lattice),
        Command::CocycleInfo { lattice } => cocycle_info(cli.json, &lattice.lattice),
        Command::Characters { lattice } => characters(cli.json, &lattice.lattice),
        Command::Corpus => corpus(cli.json),
        Command::M1(cmd) => m1_command(cli.json, cmd),
        Command::Fock(cmd) => fock_command(cli.json, cmd),
    }
}

// ---------------------------------------------------------------------
// input parsing

fn det_bound() -> anyhow::Result<Int> {
    match std::env::var("VOA_FUSION_DET_BOUND") {
        Ok(s) => {
            let n: i64 = s
                .trim()
                .parse()
                .map_err(|_| anyhow!("VOA_FUSION_DET_BOUND must be an integer, got {s:?}"))?;
            if n <= 0 {
                bail!("VOA_FUSION_DET_BOUND must be positive, got {n}");
            }
            Ok(Int::from(n))
        }
        Err(_) => Ok(Int::from(DEFAULT_DET_BOUND)),
    }
}

fn json_integer(v: &Value) -> anyhow::Result<i64> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .ok_or_else(|| anyhow!("matrix entry {n} is not an integer (floats are rejected)")),
        _ => bail!("matrix entry {v} is not an integer"),
    }
}

fn json_rational(v: &Value) -> anyhow::Result<Rat> {
    match v {
        Value::Number(_) => Ok(Rat::from(Int::from(json_integer(v)?))),
        Value::String(s) => Ok(m1::parse_rational(s)?),
        _ => bail!("expected an integer or an \"a/b\" string, got {v}"),
    }
}

fn gram_value(input: &str) -> anyhow::Result<Value> {
    let s = input.trim();
    let text = if s.starts_with('[') {
        s.to_string()
    } else {
        let raw = std::fs::read_to_string(s)
            .with_context(|| format!("reading lattice file {s:?}"))?;
        let doc: Value = serde_json::from_str(&raw)
            .with_context(|| format!("parsing JSON in {s:?}"))?;
        return doc
            .get("gram")
            .cloned()
            .ok_or_else(|| anyhow!("file {s:?} has no \"gram\" field"));
    };
    Ok(serde_json::from_str(&text).context("parsing inline JSON Gram matrix")?)
}

fn value_rows(v: &Value) -> anyhow::Result<Vec<Vec<Value>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| anyhow!("Gram matrix must be an array of arrays"))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .cloned()
                .ok_or_else(|| anyhow!("Gram matrix row {r} is not an array"))
        })
        .collect()
}

/// Loads an even lattice from a preset name, inline JSON, or file.
fn load_lattice(input: &str) -> anyhow::Result<Lattice> {
    let s = input.trim();
    if !s.starts_with('[') && !s.contains('/') && !s.contains('.') {
        if let Ok(l) = presets::by_name(s) {
            return Ok(l);
        }
        if !std::path::Path::new(s).exists() {
            bail!(
                "unknown lattice {s:?}: not a preset (A1, A2, A1+A1, E8, A1(k)), \
                 inline JSON, or readable file"
            );
        }
    }
    let rows = value_rows(&gram_value(s)?)?;
    let n = rows.len();
    let mut gram = IMat::zero(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            bail!("Gram matrix is not square: row {i} has {} entries", row.len());
        }
        for (j, entry) in row.iter().enumerate() {
            *gram.at_mut(i, j) = Int::from(json_integer(entry)?);
        }
    }
    Ok(validate_lattice(gram)?)
}

/// Loads a rational symmetric positive-definite form (presets allowed).
fn load_form(input: &str) -> anyhow::Result<BilinearSpace> {
    let s = input.trim();
    if !s.starts_with('[') && !s.contains('/') && !s.contains('.') {
        if let Ok(l) = presets::by_name(s) {
            return Ok(BilinearSpace::new(l.gram().to_qmat())?);
        }
        if !std::path::Path::new(s).exists() {
            bail!("unknown form {s:?}: not a preset, inline JSON, or readable file");
        }
    }
    let rows = value_rows(&gram_value(s)?)?;
    let n = rows.len();
    let mut form = QMat::zero(n, n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            bail!("form is not square: row {i} has {} entries", row.len());
        }
        for (j, entry) in row.iter().enumerate() {
            *form.at_mut(i, j) = json_rational(entry)?;
        }
    }
    Ok(BilinearSpace::new(form)?)
}

fn load_context(input: &str) -> anyhow::Result<FusionContext> {
    let lattice = load_lattice(input)?;
    Ok(FusionContext::new(lattice, &det_bound()?)?)
}

fn parse_vector(s: &str) -> anyhow::Result<Vec<Rat>> {
    s.split(',')
        .map(|p| Ok(m1::parse_rational(p.trim())?))
        .collect()
}

// ---------------------------------------------------------------------
// output helpers

fn rat_json(r: &Rat) -> Value {
    if r.is_integer() {
        if let Some(n) = r.to_integer().to_i64() {
            return json!(n);
        }
    }
    json!(r.to_string())
}

fn int_json(n: &Int) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn emit(payload: Map<String, Value>) {
    let mut body = Map::new();
    body.insert("schema".into(), json!(SCHEMA));
    for (k, v) in payload {
        body.insert(k, v);
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Value::Object(body)).expect("serializable")
    );
}

fn checks_json(checks: &[CheckResult]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "pass": c.pass,
                    "witness": c.witness,
                })
            })
            .collect(),
    )
}

fn print_checks(checks: &[CheckResult]) {
    for c in checks {
        match (&c.pass, &c.witness) {
            (true, _) => println!("  {:<24} PASS", c.name),
            (false, Some(w)) => println!("  {:<24} FAIL  {w}", c.name),
            (false, None) => println!("  {:<24} FAIL", c.name),
        }
    }
}

// ---------------------------------------------------------------------
// lattice commands

fn classify(json_out: bool, input: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let labels: Vec<String> = ctx
        .modules()
        .iter()
        .map(|m| ctx.display_module(m))
        .collect();
    let (signed, paired, twisted) = ctx.classification_counts();
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("classify"));
        payload.insert("rank".into(), json!(ctx.lattice().rank()));
        payload.insert("determinant".into(), int_json(ctx.lattice().det()));
        payload.insert(
            "counts".into(),
            json!({
                "signed_untwisted": signed,
                "paired_untwisted": paired,
                "twisted": twisted,
                "total": labels.len(),
            }),
        );
        payload.insert("modules".into(), json!(labels));
        emit(payload);
    } else {
        println!(
            "rank {} lattice, determinant {}, {} irreducible modules \
             ({signed} signed untwisted, {paired} paired untwisted, {twisted} twisted):",
            ctx.lattice().rank(),
            ctx.lattice().det(),
            labels.len()
        );
        for l in &labels {
            println!("  {l}");
        }
    }
    Ok(0)
}

fn rule(json_out: bool, input: &str, m1: &str, m2: &str, m3: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let a = ctx.parse_module(m1)?;
    let b = ctx.parse_module(m2)?;
    let c = ctx.parse_module(m3)?;
    let n = ctx.fusion_rule(&a, &b, &c)?;
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("rule"));
        payload.insert("m1".into(), json!(ctx.display_module(&a)));
        payload.insert("m2".into(), json!(ctx.display_module(&b)));
        payload.insert("m3".into(), json!(ctx.display_module(&c)));
        payload.insert("multiplicity".into(), json!(n));
        emit(payload);
    } else {
        println!(
            "N({}, {}; {}) = {n}",
            ctx.display_module(&a),
            ctx.display_module(&b),
            ctx.display_module(&c)
        );
    }
    Ok(0)
}

fn fuse(json_out: bool, input: &str, m1: &str, m2: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let a = ctx.parse_module(m1)?;
    let b = ctx.parse_module(m2)?;
    let product = ctx.fuse(&a, &b)?;
    let labels: Vec<String> = product.iter().map(|m| ctx.display_module(m)).collect();
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("fuse"));
        payload.insert("m1".into(), json!(ctx.display_module(&a)));
        payload.insert("m2".into(), json!(ctx.display_module(&b)));
        payload.insert("product".into(), json!(labels));
        emit(payload);
    } else {
        println!(
            "{} x {} = {}",
            ctx.display_module(&a),
            ctx.display_module(&b),
            if labels.is_empty() {
                "0".to_string()
            } else {
                labels.join(" + ")
            }
        );
    }
    Ok(0)
}

fn table(json_out: bool, input: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let modules = ctx.modules().to_vec();
    let labels: Vec<String> = modules.iter().map(|m| ctx.display_module(m)).collect();
    let mut rows = Vec::new();
    for a in &modules {
        let mut row = Vec::new();
        for b in &modules {
            let product = ctx.fuse(a, b)?;
            row.push(
                product
                    .iter()
                    .map(|m| ctx.display_module(m))
                    .collect::<Vec<_>>(),
            );
        }
        rows.push(row);
    }
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("table"));
        payload.insert("modules".into(), json!(labels));
        payload.insert("products".into(), json!(rows));
        emit(payload);
    } else {
        for (i, row) in rows.iter().enumerate() {
            for (j, product) in row.iter().enumerate() {
                println!(
                    "{} x {} = {}",
                    labels[i],
                    labels[j],
                    if product.is_empty() {
                        "0".to_string()
                    } else {
                        product.join(" + ")
                    }
                );
            }
        }
    }
    Ok(0)
}

fn verify(
    json_out: bool,
    input: &str,
    assoc: bool,
    duality: bool,
    closed_forms: bool,
) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let all = ctx.verify_algebra();
    let selected: Vec<CheckResult> = if assoc || duality || closed_forms {
        all.into_iter()
            .filter(|c| {
                (assoc && c.name == "associativity")
                    || (duality && c.name == "duality")
                    || (closed_forms && c.name == "closed-forms")
            })
            .collect()
    } else {
        all
    };
    let pass = selected.iter().all(|c| c.pass);
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("verify"));
        payload.insert("modules".into(), json!(ctx.modules().len()));
        payload.insert("checks".into(), checks_json(&selected));
        payload.insert("pass".into(), json!(pass));
        emit(payload);
    } else {
        println!(
            "verifying fusion ring on {} modules:",
            ctx.modules().len()
        );
        print_checks(&selected);
        println!("overall: {}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(u8::from(!pass))
}

fn contragredient(json_out: bool, input: &str, module: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let m = ctx.parse_module(module)?;
    let dual = ctx.contragredient(&m);
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("contragredient"));
        payload.insert("module".into(), json!(ctx.display_module(&m)));
        payload.insert("contragredient".into(), json!(ctx.display_module(&dual)));
        emit(payload);
    } else {
        println!(
            "{}' = {}",
            ctx.display_module(&m),
            ctx.display_module(&dual)
        );
    }
    Ok(0)
}

fn unimodular_report(json_out: bool, input: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let r = ctx.unimodular_report();
    let failed = r.unimodular && r.table_ok != Some(true);
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("unimodular-report"));
        payload.insert("unimodular".into(), json!(r.unimodular));
        payload.insert("rank".into(), json!(r.rank));
        payload.insert("determinant".into(), int_json(&r.det));
        payload.insert(
            "rank_multiple_of_eight".into(),
            json!(r.rank_multiple_of_eight),
        );
        if let Some(labels) = &r.module_labels {
            payload.insert("modules".into(), json!(labels));
        }
        if let Some((w_plus, w_minus)) = &r.lowest_twisted_weights {
            payload.insert(
                "lowest_twisted_weights".into(),
                json!({"T0+": rat_json(w_plus), "T0-": rat_json(w_minus)}),
            );
        }
        if let Some(label) = &r.theta_even_label {
            payload.insert("theta_even".into(), json!(label));
        }
        if let Some(table) = &r.table {
            payload.insert("table".into(), json!(table));
        }
        if let Some(ok) = r.table_ok {
            payload.insert("table_ok".into(), json!(ok));
        }
        emit(payload);
    } else if !r.unimodular {
        println!(
            "lattice of rank {} has determinant {}: not unimodular, no special report",
            r.rank, r.det
        );
    } else {
        println!(
            "unimodular lattice of rank {} ({}a multiple of eight)",
            r.rank,
            if r.rank_multiple_of_eight { "" } else { "not " }
        );
        println!(
            "modules: {}",
            r.module_labels.as_deref().unwrap_or_default().join(", ")
        );
        if let Some((w_plus, w_minus)) = &r.lowest_twisted_weights {
            println!("lowest twisted weights: T0+ -> {w_plus}, T0- -> {w_minus}");
        }
        if let Some(label) = &r.theta_even_label {
            println!("integral-weight twisted half: {label}");
        }
        if let Some(table) = &r.table {
            let labels = r.module_labels.as_deref().unwrap_or_default();
            for (i, row) in table.iter().enumerate() {
                for (j, product) in row.iter().enumerate() {
                    println!("{} x {} = {}", labels[i], labels[j], product.join(" + "));
                }
            }
        }
        println!(
            "closed-form table check: {}",
            if r.table_ok == Some(true) { "PASS" } else { "FAIL" }
        );
    }
    Ok(u8::from(failed))
}

fn cocycle_info(json_out: bool, input: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let c = ctx.cocycle();
    let minimal = minimal_modulus(ctx.lattice().gram_inv());
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("cocycle-info"));
        payload.insert("modulus".into(), json!(c.q()));
        payload.insert("minimal_modulus".into(), int_json(&minimal));
        payload.insert("adapted".into(), json!(c.adapted()));
        payload.insert("table".into(), json!(c.table()));
        emit(payload);
    } else {
        println!("cocycle modulus q = {} (minimal admissible {})", c.q(), minimal);
        println!(
            "table basis: {}",
            if c.adapted() {
                "adapted to a diagonalizing basis"
            } else {
                "naive lower-triangular"
            }
        );
        println!("exponent table (values mod q):");
        for row in c.table() {
            println!(
                "  [{}]",
                row.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    Ok(0)
}

fn characters(json_out: bool, input: &str) -> anyhow::Result<u8> {
    let ctx = load_context(input)?;
    let tw = ctx.twisted();
    let gens: Vec<Vec<String>> = tw
        .radical
        .generators
        .iter()
        .map(|g| g.iter().map(|x| x.to_string()).collect())
        .collect();
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("characters"));
        payload.insert("two_q".into(), json!(ctx.cocycle().two_q()));
        payload.insert("num_generators".into(), json!(gens.len()));
        payload.insert("generators".into(), json!(gens));
        payload.insert(
            "twisted_dimension".into(),
            int_json(&tw.twisted_dim()),
        );
        let chars: Vec<Value> = tw
            .characters()
            .iter()
            .map(|ch| {
                json!({
                    "index": ch.index,
                    "exponents": ch.exponents,
                })
            })
            .collect();
        payload.insert("characters".into(), json!(chars));
        emit(payload);
    } else {
        println!(
            "quotient of the radical by doubled lattice: {} generators, \
             twisted module dimension {}",
            gens.len(),
            tw.twisted_dim()
        );
        for (i, g) in gens.iter().enumerate() {
            println!("  generator {i}: ({})", g.join(", "));
        }
        println!(
            "{} central characters; values are powers of a primitive {}-th root of unity:",
            tw.num_characters(),
            ctx.cocycle().two_q()
        );
        for ch in tw.characters() {
            let exps = ch
                .exponents
                .iter()
                .map(|e| format!("zeta^{e}"))
                .collect::<Vec<_>>()
                .join(", ");
            println!(
                "  character {}: [{}]",
                ch.index,
                if exps.is_empty() { "trivial" } else { &exps }
            );
        }
    }
    Ok(0)
}

fn corpus(json_out: bool) -> anyhow::Result<u8> {
    let mut results = Vec::new();
    let mut all_pass = true;
    for (name, lattice) in presets::corpus() {
        let ctx = FusionContext::new(lattice, &det_bound()?)?;
        let checks = ctx.verify_algebra();
        let pass = checks.iter().all(|c| c.pass);
        all_pass &= pass;
        results.push((name, ctx.modules().len(), checks, pass));
    }
    if json_out {
        let mut payload = Map::new();
        payload.insert("command".into(), json!("corpus"));
        let entries: Vec<Value> = results
            .iter()
            .map(|(name, modules, checks, pass)| {
                json!({
                    "lattice": name,
                    "modules": modules,
                    "checks": checks_json(checks),
                    "pass": pass,
                })
            })
            .collect();
        payload.insert("results".into(), json!(entries));
        payload.insert("pass".into(), json!(all_pass));
        emit(payload);
    } else {
        for (name, modules, checks, pass) in &results {
            println!(
                "{name}: {modules} modules, {}",
                if *pass { "PASS" } else { "FAIL" }
            );
            print_checks(checks);
        }
        println!("overall: {}", if all_pass { "PASS" } else { "FAIL" });
    }
    Ok(u8::from(!all_pass))
}

// ---------------------------------------------------------------------
// free-boson commands

fn validate_m1_dims(form: &Option<String>, modules: &[&M1Module]) -> anyhow::Result<()> {
    if let Some(description) = form {
        let space = load_form(description)?;
        for m in modules {
            if let Some(coords) = m.momentum_coords() {
                if coords.len() != space.dim() {
                    bail!(
                        "momentum {} has dimension {}, form has dimension {}",
                        m,
                        coords.len(),
                        space.dim()
                    );
                }
            }
        }
    }
    Ok(())
}

fn m1_command(json_out: bool, cmd: &M1Command) -> anyhow::Result<u8> {
    match cmd {
        M1Command::Rule { form, m1, m2, m3 } => {
            let a = m1::parse_m1_module(m1)?;
            let b = m1::parse_m1_module(m2)?;
            let c = m1::parse_m1_module(m3)?;
            validate_m1_dims(form, &[&a, &b, &c])?;
            let n = m1::rule_m1(&a, &b, &c)?;
            if json_out {
                let mut payload = Map::new();
                payload.insert("command".into(), json!("m1-rule"));
                payload.insert("m1".into(), json!(a.to_string()));
                payload.insert("m2".into(), json!(b.to_string()));
                payload.insert("m3".into(), json!(c.to_string()));
                payload.insert("multiplicity".into(), json!(n));
                emit(payload);
            } else {
                println!("N({a}, {b}; {c}) = {n}");
            }
            Ok(0)
        }
        M1Command::Fuse { form, m1, m2 } => {
            let a = m1::parse_m1_module(m1)?;
            let b = m1::parse_m1_module(m2)?;
            validate_m1_dims(form, &[&a, &b])?;
            let product = m1::fuse_m1(&a, &b)?;
            if json_out {
                let mut payload = Map::new();
                payload.insert("command".into(), json!("m1-fuse"));
                payload.insert("m1".into(), json!(a.to_string()));
                payload.insert("m2".into(), json!(b.to_string()));
                payload.insert(
                    "summands".into(),
                    json!(product
                        .summands
                        .iter()
                        .map(|m| m.to_string())
                        .collect::<Vec<_>>()),
                );
                payload.insert("momentum_family".into(), json!(product.momentum_family));
                emit(payload);
            } else {
                println!("{a} x {b} = {product}");
            }
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------
// expansion commands

fn fock_command(json_out: bool, cmd: &FockCommand) -> anyhow::Result<u8> {
    match cmd {
        FockCommand::Delta { cutoff } => {
            let table = fock::delta_coefficients(*cutoff)?;
            if json_out {
                let mut payload = Map::new();
                payload.insert("command".into(), json!("fock-delta"));
                payload.insert("cutoff".into(), json!(cutoff));
                let entries: Vec<Value> = table
                    .entries()
                    .map(|((m, n), v)| json!({"m": m, "n": n, "value": rat_json(v)}))
                    .collect();
                payload.insert("coefficients".into(), json!(entries));
                emit(payload);
            } else {
                println!("correction coefficients through total degree {cutoff}:");
                for ((m, n), v) in table.entries() {
                    println!("  c[{m}][{n}] = {v}");
                }
            }
            Ok(0)
        }
        FockCommand::Verify { lambda, gram } => {
            let space = load_form(gram)?;
            let lam = parse_vector(lambda)?;
            let report = fock::verify_expansions(&space, &lam)?;
            let pass = report.all_pass();
            if json_out {
                let mut payload = Map::new();
                payload.insert("command".into(), json!("fock-verify"));
                payload.insert("squared_length".into(), rat_json(&report.t));
                payload.insert("checks".into(), checks_json(&report.checks));
                payload.insert("pass".into(), json!(pass));
                emit(payload);
            } else {
                println!("direction vector with squared length {}:", report.t);
                print_checks(&report.checks);
                println!("overall: {}", if pass { "PASS" } else { "FAIL" });
            }
            Ok(u8::from(!pass))
        }
    }
}
