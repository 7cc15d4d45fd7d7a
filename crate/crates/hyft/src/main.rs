//! Command-line front end: parsing, typechecking, normalization, the
//! syntactic translations, and the term constructions, with text or JSON
//! output.
//!
//! Exit codes: 0 success, 1 input error, 2 internal invariant breach.

use std::fmt::Display;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hyft::rewrite::{self, Status};
use hyft::syntax::{self, formula_free_vars, FiniteType, Formula};
use hyft::typing::{self, Context};
use hyft::{alpha, hybrid, retract};

#[derive(Parser)]
#[command(name = "hyft", version, about = "arithmetic in finite types: combinator rewriting and extensionality translations", long_about = None)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Rewrite fuel; overrides the HYFT_FUEL environment variable
    #[arg(long, global = true)]
    fuel: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum TranslateMode {
    Star,
    Ee,
    UnfoldEq,
    Alpha,
    Mr,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck every declaration in a file
    Check { file: String },
    /// Normalize a term and report the step count
    Normalize { expr: String },
    /// Evaluate a closed term of type N to a decimal numeral
    Eval { expr: String },
    /// Apply one of the formula translations
    Translate {
        #[arg(long, value_enum)]
        mode: TranslateMode,
        /// Inline formula; alternatively use --file
        expr: Option<String>,
        #[arg(long, conflicts_with = "expr")]
        file: Option<String>,
    },
    /// Print a type, or its positive/negative translations
    Types {
        #[arg(long)]
        alpha: bool,
        r#type: String,
    },
    /// Print axiom schema instances
    Axioms {
        #[arg(long, value_enum)]
        schema: Schema,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tau: Option<String>,
    },
    /// Exhibit a type as a strong retract of some tau -> N
    Retract { r#type: String },
    /// Print the converse-extensionality witness term
    WitnessCext {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        tau: String,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Schema {
    Hybrid,
    Ext,
    ExtPrime,
    Cext,
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn input(e: impl Display) -> Failure {
        Failure { message: e.to_string(), code: 1 }
    }

    fn internal(e: impl Display) -> Failure {
        Failure { message: format!("internal invariant breach: {e}"), code: 2 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fuel = cli
        .fuel
        .or_else(|| {
            std::env::var("HYFT_FUEL")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(rewrite::DEFAULT_FUEL);
    match run(&cli, fuel) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli, fuel: u64) -> Result<(), Failure> {
    match &cli.command {
        Command::Check { file } => cmd_check(file, cli.format),
        Command::Normalize { expr } => cmd_normalize(expr, fuel, cli.format),
        Command::Eval { expr } => cmd_eval(expr, fuel),
        Command::Translate { mode, expr, file } => {
            let text = match (expr, file) {
                (Some(e), None) => e.clone(),
                (None, Some(f)) => std::fs::read_to_string(f).map_err(Failure::input)?,
                _ => return Err(Failure::input("provide a formula or --file")),
            };
            cmd_translate(*mode, text.trim(), cli.format)
        }
        Command::Types { alpha, r#type } => cmd_types(*alpha, r#type, cli.format),
        Command::Axioms { schema, sigma, tau } => {
            cmd_axioms(*schema, sigma, tau.as_deref(), cli.format)
        }
        Command::Retract { r#type } => cmd_retract(r#type, cli.format),
        Command::WitnessCext { sigma, tau } => cmd_witness_cext(sigma, tau, cli.format),
    }
}

fn parse_type(text: &str) -> Result<FiniteType, Failure> {
    syntax::parse_type(text).map_err(Failure::input)
}

fn cmd_check(path: &str, format: Format) -> Result<(), Failure> {
    let src = std::fs::read_to_string(path).map_err(Failure::input)?;
    let mut ctx = Context::new();
    let mut reports = Vec::new();
    let mut ok = true;
    for (lineno, raw) in src.lines().enumerate() {
        let line = raw.split("--").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let report = check_line(line, &mut ctx);
        match report {
            Ok(msg) => reports.push(json!({ "line": lineno, "ok": true, "detail": msg })),
            Err(msg) => {
                ok = false;
                reports.push(json!({ "line": lineno, "ok": false, "detail": msg }));
            }
        }
    }
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "ok": ok, "declarations": reports }))
                .map_err(Failure::internal)?
        ),
        Format::Text => {
            for r in &reports {
                let status = if r["ok"].as_bool().unwrap() { "ok" } else { "error" };
                println!("{status} line {}: {}", r["line"], r["detail"].as_str().unwrap());
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::input("check failed"))
    }
}

// Declarations: `name : Type = term` or `goal name = formula`.
fn check_line(line: &str, ctx: &mut Context) -> Result<String, String> {
    if let Some(rest) = line.strip_prefix("goal ") {
        let (name, body) = rest
            .split_once('=')
            .ok_or_else(|| "goal declaration needs '='".to_string())?;
        let name = name.trim();
        let phi = syntax::parse_formula(body.trim(), ctx).map_err(|e| e.to_string())?;
        typing::check_formula(&phi, &collect_ctx(ctx, &phi)).map_err(|e| e.to_string())?;
        Ok(format!("goal {name}: {phi}"))
    } else {
        let (sig, body) = line
            .split_once('=')
            .ok_or_else(|| "declaration needs '='".to_string())?;
        let (name, ty_text) = sig
            .split_once(':')
            .ok_or_else(|| "declaration needs 'name : Type'".to_string())?;
        let name = name.trim();
        let declared = syntax::parse_type(ty_text.trim()).map_err(|e| e.to_string())?;
        let term = syntax::parse_term(body.trim(), ctx).map_err(|e| e.to_string())?;
        let inferred = typing::type_of(&term, ctx).map_err(|e| e.to_string())?;
        if inferred != declared {
            return Err(format!(
                "declared {name} : {declared} but the term has type {inferred}"
            ));
        }
        ctx.bind(name, declared.clone());
        Ok(format!("{name} : {declared}"))
    }
}

// Formula variables introduced by ascription are free; give check_formula a
// context that also covers them.
fn collect_ctx(ctx: &Context, phi: &Formula) -> Context {
    let mut out = ctx.clone();
    for (name, ty) in formula_free_vars(phi) {
        if out.get(&name).is_none() {
            out.bind(&name, ty);
        }
    }
    out
}

fn cmd_normalize(expr: &str, fuel: u64, format: Format) -> Result<(), Failure> {
    let term = syntax::parse_term(expr, &Context::new()).map_err(Failure::input)?;
    let out = rewrite::normalize(&term, fuel);
    let status = match out.status {
        Status::NormalForm => "normal form",
        Status::FuelExhausted => "fuel exhausted",
    };
    match format {
        Format::Text => println!("{}  [{} steps, {status}]", out.result, out.steps),
        Format::Json => println!(
            "{}",
            json!({
                "result": out.result.to_string(),
                "ast": out.result,
                "steps": out.steps,
                "status": status,
            })
        ),
    }
    Ok(())
}

fn cmd_eval(expr: &str, fuel: u64) -> Result<(), Failure> {
    let term = syntax::parse_term(expr, &Context::new()).map_err(Failure::input)?;
    if !syntax::term_free_vars(&term).is_empty() {
        return Err(Failure::input("eval needs a closed term"));
    }
    let ty = typing::type_of(&term, &Context::new()).map_err(Failure::input)?;
    if ty != FiniteType::Nat {
        return Err(Failure::input(format!("eval needs a term of type N, got {ty}")));
    }
    let n = rewrite::eval_nat(&term, fuel).map_err(Failure::input)?;
    println!("{n}");
    Ok(())
}

fn cmd_translate(mode: TranslateMode, text: &str, format: Format) -> Result<(), Failure> {
    let phi = syntax::parse_formula(text, &Context::new()).map_err(Failure::input)?;
    let mut extra = None;
    let out = match mode {
        TranslateMode::Star => {
            let st = hybrid::star_translate(&phi).map_err(Failure::input)?;
            st.guarded()
        }
        TranslateMode::Ee => hybrid::ee_translate(&phi),
        TranslateMode::UnfoldEq => hybrid::unfold_exteq_in_formula(&phi),
        TranslateMode::Alpha => {
            let vmap = alpha::AlphaVarMap::for_formula(&phi);
            alpha::alpha_formula(&phi, &vmap).map_err(Failure::input)?
        }
        TranslateMode::Mr => {
            let fv = formula_free_vars(&phi);
            let var = typing::fresh_name("x", &|c: &str| fv.contains_key(c));
            let (ty, f) = hybrid::mr_translate(&var, &phi).map_err(Failure::input)?;
            extra = Some((var, ty));
            f
        }
    };
    match format {
        Format::Text => {
            if let Some((var, ty)) = &extra {
                println!("realizer {var} : {ty}");
            }
            println!("{out}");
        }
        Format::Json => {
            let mut obj = json!({ "formula": out.to_string(), "ast": out });
            if let Some((var, ty)) = &extra {
                obj["realizer"] = json!({ "name": var, "type": ty.to_string() });
            }
            println!("{obj}");
        }
    }
    Ok(())
}

fn cmd_types(alpha_mode: bool, text: &str, format: Format) -> Result<(), Failure> {
    let ty = parse_type(text)?;
    if alpha_mode {
        let plus = alpha::type_plus(&ty);
        let minus = alpha::type_minus(&ty);
        match format {
            Format::Text => println!("plus: {plus}, minus: {minus}"),
            Format::Json => println!(
                "{}",
                json!({
                    "type": ty.to_string(),
                    "plus": plus.to_string(),
                    "minus": minus.to_string(),
                })
            ),
        }
    } else {
        match format {
            Format::Text => println!("{ty}"),
            Format::Json => println!("{}", json!({ "type": ty.to_string(), "ast": ty })),
        }
    }
    Ok(())
}

fn cmd_axioms(
    schema: Schema,
    sigma: &str,
    tau: Option<&str>,
    format: Format,
) -> Result<(), Failure> {
    let sigma = parse_type(sigma)?;
    let tau = match tau {
        Some(t) => parse_type(t)?,
        None => sigma.clone(),
    };
    let axioms: Vec<Formula> = match schema {
        Schema::Hybrid => hybrid::hybrid_axioms(&sigma, &tau),
        Schema::Ext => vec![hybrid::ext_axiom(&sigma, &tau)],
        Schema::ExtPrime => vec![hybrid::ext_prime_axiom(&sigma, &tau)],
        Schema::Cext => vec![hybrid::cext_axiom(&sigma, &tau)],
    };
    for ax in &axioms {
        typing::check_formula(ax, &Context::new()).map_err(Failure::internal)?;
        if !formula_free_vars(ax).is_empty() {
            return Err(Failure::internal(format!("generated axiom is open: {ax}")));
        }
    }
    match format {
        Format::Text => {
            for ax in &axioms {
                println!("{ax}");
            }
        }
        Format::Json => {
            let list: Vec<_> = axioms
                .iter()
                .map(|a| json!({ "formula": a.to_string(), "ast": a }))
                .collect();
            println!("{}", json!(list));
        }
    }
    Ok(())
}

fn cmd_retract(text: &str, format: Format) -> Result<(), Failure> {
    let ty = parse_type(text)?;
    let r = retract::retract_to_fun0(&ty);
    r.validate().map_err(Failure::internal)?;
    match format {
        Format::Text => {
            println!("source:     {}", r.source);
            println!("target:     {}", r.target);
            println!("section:    {}", r.section);
            println!("retraction: {}", r.retraction);
        }
        Format::Json => println!(
            "{}",
            json!({
                "source": r.source.to_string(),
                "target": r.target.to_string(),
                "section": r.section.to_string(),
                "retraction": r.retraction.to_string(),
            })
        ),
    }
    Ok(())
}

fn cmd_witness_cext(sigma: &str, tau: &str, format: Format) -> Result<(), Failure> {
    let sigma = parse_type(sigma)?;
    let tau = parse_type(tau)?;
    let z = alpha::cext_witness(&sigma, &tau);
    let ty = typing::type_of(&z, &Context::new()).map_err(Failure::internal)?;
    let expected = alpha::type_plus(&hybrid::cext_witness_type(&sigma, &tau));
    if ty != expected {
        return Err(Failure::internal(format!(
            "witness has type {ty}, expected {expected}"
        )));
    }
    match format {
        Format::Text => {
            println!("witness: {z}");
            println!("type:    {ty}");
            println!("typecheck: ok");
        }
        Format::Json => println!(
            "{}",
            json!({
                "witness": z.to_string(),
                "type": ty.to_string(),
                "typecheck": "ok",
            })
        ),
    }
    Ok(())
}
