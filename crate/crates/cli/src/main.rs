use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use epi_core::characters::MultChar;
use epi_core::galois_side::{congruence_solutions, imprimitivity_field, parameter_record, twist_order};
use epi_core::gl_side::{descend_tame, enumerate_datums, EpipelagicDatum};
use epi_core::strata_lab::oracle_root_set;
use epi_core::suite::{case_by_name, run_case, Fault, CASES};
use epi_core::wire::{self, WireError};
use epi_core::LocalFieldDesc;

#[derive(Parser, Debug)]
#[command(name = "epi", version, about = "Parameters of epipelagic representations of GL_n over F_q((t))")]
struct Cli {
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Progress notes on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every datum for (p, f, n) with the given central character.
    Enumerate {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        f: u32,
        #[arg(long)]
        n: u32,
        /// `trivial` or `{"onPi": "a/b", "onMu": k}`.
        #[arg(long, default_value = "trivial")]
        omega: String,
    },
    /// Tame descent of a datum whose n is not a power of p.
    Descend {
        /// Path to a datum document, or the JSON itself.
        #[arg(long)]
        datum: String,
    },
    /// The full parameter record of a datum with n = p^r.
    Parameter {
        #[arg(long)]
        datum: String,
    },
    /// Order of the group of twists fixing the datum's parameter over a field.
    Twists {
        #[arg(long)]
        field: String,
        #[arg(long)]
        datum: String,
    },
    /// Matrix-level root set over a field, compared with the polynomial one.
    Oracle {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        f: u32,
        #[arg(long)]
        r: u32,
        #[arg(long = "detAlpha")]
        det_alpha: String,
        /// Defaults to the imprimitivity field.
        #[arg(long)]
        field: Option<String>,
    },
    /// Run the invariant suite.
    Verify {
        /// Every check on every selected case (the default).
        #[arg(long)]
        all: bool,
        /// Restrict to named cases; repeatable.
        #[arg(long = "case")]
        cases: Vec<String>,
        #[arg(long, hide = true)]
        fault: Option<String>,
    },
}

enum Failure {
    /// Bad input shape: exit 2, nothing on stdout.
    Schema(String),
    /// Exit 1 with an error document.
    Domain { kind: &'static str, message: String },
    /// Exit 1 with the computed document, whose named invariants failed.
    Falsified { doc: Value, invariants: Vec<String> },
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Failure {
        match e {
            WireError::Schema(m) => Failure::Schema(m),
            WireError::Domain { kind, message } => Failure::Domain { kind, message },
        }
    }
}

fn domain(kind: &'static str) -> impl Fn(&dyn std::fmt::Display) -> Failure {
    move |e| Failure::Domain {
        kind,
        message: e.to_string(),
    }
}

/// Inline JSON if it looks like a document, otherwise a file path.
fn load(arg: &str) -> Result<Value, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::Domain {
            kind: "io",
            message: format!("{arg}: {e}"),
        })?
    };
    Ok(wire::parse_json(&text)?)
}

fn parse_omega(arg: &str, field: &LocalFieldDesc) -> Result<MultChar, Failure> {
    if arg == "trivial" {
        return Ok(MultChar::trivial(field));
    }
    let mut doc = json!({
        "field": wire::field_to_json(field),
        "n": 2,
        "detAlpha": {"mu": "g^0"},
    });
    doc["omega"] = wire::parse_json(arg)?;
    Ok(wire::parse_datum(&doc)?.omega().clone())
}

fn run(cmd: &Command, verbose: bool) -> Result<Value, Failure> {
    match cmd {
        Command::Enumerate { p, f, n, omega } => {
            let field = LocalFieldDesc::base(*p, *f).map_err(|e| domain("field")(&e))?;
            let omega = parse_omega(omega, &field)?;
            let all = enumerate_datums(&field, *n, &omega).map_err(|e| domain("datum")(&e))?;
            Ok(json!({
                "field": wire::field_summary(&field),
                "n": n,
                "count": all.len(),
                "datums": all.iter().map(wire::datum_to_json).collect::<Vec<_>>(),
            }))
        }
        Command::Descend { datum } => {
            let d = wire::parse_datum(&load(datum)?)?;
            let rec = descend_tame(&d).map_err(|e| domain("descent")(&e))?;
            let doc = wire::descent_to_json(&rec);
            let failed: Vec<String> = rec
                .relations
                .iter()
                .filter(|r| r.holds == Some(false))
                .map(|r| r.name.to_string())
                .collect();
            if failed.is_empty() {
                Ok(doc)
            } else {
                Err(Failure::Falsified { doc, invariants: failed })
            }
        }
        Command::Parameter { datum } => {
            let d = wire::parse_datum(&load(datum)?)?;
            let rec = parameter_record(&d).map_err(|e| domain("parameter")(&e))?;
            Ok(wire::parameter_to_json(&rec))
        }
        Command::Twists { field, datum } => {
            let l = wire::parse_field(&load(field)?)?;
            let d = wire::parse_datum(&load(datum)?)?;
            let order = twist_order(&l, &d).map_err(|e| domain("twists")(&e))?;
            Ok(json!(order))
        }
        Command::Oracle { p, f, r, det_alpha, field } => {
            let base = LocalFieldDesc::base(*p, *f).map_err(|e| domain("field")(&e))?;
            let mu = wire::parse_det(&load(det_alpha)?, &base)?;
            let n = p.pow(*r);
            let d = EpipelagicDatum::new(&base, n, mu, MultChar::trivial(&base), 0)
                .map_err(|e| domain("datum")(&e))?;
            let t = match field {
                Some(s) => wire::parse_field(&load(s)?)?,
                None => imprimitivity_field(&d).map_err(|e| domain("galois")(&e))?.t,
            };
            if verbose {
                eprintln!("oracle over {t}: {} candidates", t.q() - 1);
            }
            let lab = oracle_root_set(&base, *r, mu, &t).map_err(|e| domain("lab")(&e))?;
            let poly = congruence_solutions(&t, &d).map_err(|e| domain("galois")(&e))?;
            let k = t.residue();
            let fmt = |xs: &[epi_core::Fe]| xs.iter().map(|&a| k.format(a)).collect::<Vec<_>>();
            let matches = lab.solutions == poly;
            let doc = json!({
                "field": wire::field_summary(&t),
                "candidates": lab.candidates,
                "solutions": fmt(&lab.solutions),
                "polynomialRoots": fmt(&poly),
                "matchesPolynomial": matches,
            });
            if matches {
                Ok(doc)
            } else {
                Err(Failure::Falsified {
                    doc,
                    invariants: vec!["oracle_equivalence".into()],
                })
            }
        }
        Command::Verify { all: _, cases, fault } => {
            let fault: Option<Fault> = fault
                .as_deref()
                .map(str::parse)
                .transpose()
                .map_err(Failure::Schema)?;
            let selected = if cases.is_empty() {
                CASES.to_vec()
            } else {
                cases
                    .iter()
                    .map(|c| case_by_name(c).ok_or_else(|| Failure::Schema(format!("unknown case {c:?}"))))
                    .collect::<Result<Vec<_>, _>>()?
            };
            let mut reports = Vec::new();
            for case in &selected {
                if verbose {
                    eprintln!("verify {}", case.name);
                }
                reports.push(run_case(case, fault));
            }
            let doc = wire::report_to_json(&reports, fault);
            let failed: Vec<String> = reports
                .iter()
                .flat_map(|r| r.failed().into_iter().map(move |n| format!("{}:{n}", r.case.name)))
                .collect();
            if failed.is_empty() {
                Ok(doc)
            } else {
                Err(Failure::Falsified { doc, invariants: failed })
            }
        }
    }
}

fn emit(cli: &Cli, doc: &Value) -> Result<(), String> {
    let text = wire::render(doc);
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, code) = match run(&cli.command, cli.verbose) {
        Ok(doc) => (doc, 0),
        Err(Failure::Schema(m)) => {
            eprintln!("epi: schema error: {m}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain { kind, message }) => {
            eprintln!("epi: {kind}: {message}");
            (json!({"error": {"kind": kind, "message": message}}), 1)
        }
        Err(Failure::Falsified { doc, invariants }) => {
            eprintln!("epi: invariant failed: {}", invariants.join(", "));
            (doc, 1)
        }
    };
    if let Err(e) = emit(&cli, &doc) {
        eprintln!("epi: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
