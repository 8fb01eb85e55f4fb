//! `martlat`: run scenarios, compute moduli and regular norms, and run the
//! property suites from the command line.
//!
//! Exit status: 0 when every assertion holds, 1 when one fails, 2 when the
//! input cannot be read or does not match the scenario schema.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use martlat_core::corpus::{
    builtin, builtin_ids, generate_random_instance, run_property_suite, run_scenario,
    MartingaleJson, NormJson, Scenario, SuiteName,
};
use martlat_core::lattice::{
    krickeberg_modulus, regular_norm, ModulusResult, DEFAULT_PROBE_HORIZON,
};
use martlat_core::{martingale_norm_in, Rational};

#[derive(Parser)]
#[command(
    name = "martlat",
    version,
    about = "Exact filtrations and martingales on sequence lattices"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Override the scenario horizon.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Sup,
    L1,
    SupLimsup,
}

impl From<NormArg> for NormJson {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Sup => NormJson::Sup,
            NormArg::L1 => NormJson::L1,
            NormArg::SupLimsup => NormJson::SupPlusLimsup,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    OracleEquivalence,
    RegnormAxioms,
    Fatou,
    Ideal,
    LatticeAxioms,
}

impl From<SuiteArg> for SuiteName {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::OracleEquivalence => SuiteName::OracleEquivalence,
            SuiteArg::RegnormAxioms => SuiteName::RegnormAxioms,
            SuiteArg::Fatou => SuiteName::Fatou,
            SuiteArg::Ideal => SuiteName::Ideal,
            SuiteArg::LatticeAxioms => SuiteName::LatticeAxioms,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every assertion of a scenario file.
    Validate { file: PathBuf },
    /// Modulus of each martingale in a scenario file.
    Modulus {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PROBE_HORIZON)]
        probe_horizon: usize,
    },
    /// Martingale and regular norm of each martingale in a scenario file.
    Regnorm {
        file: PathBuf,
        #[arg(long, value_enum)]
        norm: NormArg,
        #[arg(long, default_value_t = DEFAULT_PROBE_HORIZON)]
        probe_horizon: usize,
    },
    /// Run a built-in scenario.
    Demo { id: String },
    /// Run a property suite over random instances.
    Suite {
        #[arg(value_enum)]
        name: SuiteArg,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the built-in scenarios.
    List,
    /// Print a built-in scenario as JSON.
    Export { id: String },
    /// Print a random nested-partition instance as a scenario; the global
    /// `--horizon` sets its horizon (default: `--levels`).
    Generate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
    },
}

/// Errors in the input rather than in the mathematics.
struct InputError(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(InputError(e)) => {
            if cli.format == Format::Json {
                out(json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}

fn input<T>(r: Result<T>) -> Result<T, InputError> {
    r.map_err(InputError)
}

fn load(path: &Path, horizon: Option<usize>) -> Result<Scenario> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let s = Scenario::from_json(&text).with_context(|| format!("loading {}", path.display()))?;
    override_horizon(s, horizon)
}

fn override_horizon(s: Scenario, horizon: Option<usize>) -> Result<Scenario> {
    match horizon {
        Some(h) => Ok(s.with_horizon(h)?),
        None => Ok(s),
    }
}

/// Writes a line to stdout; a closed pipe (`martlat ... | head`) is not an error.
fn out(text: impl std::fmt::Display) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn emit(format: Format, text: impl std::fmt::Display, value: impl FnOnce() -> Value) {
    match format {
        Format::Text => out(text),
        Format::Json => out(serde_json::to_string_pretty(&value()).expect("json values serialize")),
    }
}

fn report(cli: &Cli, s: &Scenario) -> u8 {
    let r = run_scenario(s);
    emit(cli.format, &r, || {
        serde_json::to_value(&r).expect("reports serialize")
    });
    r.exit_code() as u8
}

fn run(cli: &Cli) -> Result<u8, InputError> {
    Ok(match &cli.command {
        Command::Validate { file } => report(cli, &input(load(file, cli.horizon))?),
        Command::Demo { id } => {
            let s = input(
                builtin(id)
                    .map_err(Into::into)
                    .and_then(|s| override_horizon(s, cli.horizon)),
            )?;
            report(cli, &s)
        }
        Command::Modulus {
            file,
            probe_horizon,
        } => {
            let s = input(load(file, cli.horizon))?;
            modulus(cli.format, &s, *probe_horizon)?
        }
        Command::Regnorm {
            file,
            norm,
            probe_horizon,
        } => {
            let s = input(load(file, cli.horizon))?;
            regnorm(cli.format, &s, (*norm).into(), *probe_horizon)?
        }
        Command::Suite { name, count, seed } => {
            if *count == 0 {
                return Err(InputError(anyhow::anyhow!("--count must be at least 1")));
            }
            let r = run_property_suite((*name).into(), *count, *seed);
            emit(cli.format, &r, || {
                serde_json::to_value(&r).expect("reports serialize")
            });
            r.exit_code() as u8
        }
        Command::List => {
            let entries: Vec<(String, String)> = builtin_ids()
                .iter()
                .map(|id| {
                    let citation = builtin(id)
                        .ok()
                        .and_then(|s| s.doc.citation)
                        .unwrap_or_default();
                    (id.to_string(), citation)
                })
                .collect();
            let text = entries
                .iter()
                .map(|(id, c)| format!("{id:<22} {c}"))
                .collect::<Vec<_>>()
                .join("\n");
            emit(cli.format, text, || {
                Value::Array(
                    entries
                        .iter()
                        .map(|(id, c)| json!({ "id": id, "citation": c }))
                        .collect(),
                )
            });
            0
        }
        Command::Export { id } => {
            let s = input(
                builtin(id)
                    .map_err(Into::into)
                    .and_then(|s| override_horizon(s, cli.horizon)),
            )?;
            out(s.to_json());
            0
        }
        Command::Generate { seed, dim, levels } => {
            let horizon = cli.horizon.unwrap_or(*levels);
            if *dim < 2 || *levels == 0 || *levels > horizon {
                return Err(InputError(anyhow::anyhow!(
                    "need --dim >= 2 and 1 <= --levels <= --horizon"
                )));
            }
            out(generate_random_instance(*seed, *dim, *levels, horizon).to_json());
            0
        }
    })
}

fn modulus_json(name: &str, m: &ModulusResult<Rational>) -> Value {
    json!({
        "martingale": name,
        "method": m.method,
        "stabilized": m.stabilized,
        "certified": m.certified().is_some(),
        "mismatch": m.mismatch,
        "unsettled_level": m.unsettled.as_ref().map(|u| u.n),
        "modulus": MartingaleJson::of(&m.modulus),
        "krickeberg_limits": MartingaleJson::of(&m.limits),
    })
}

fn modulus_text(name: &str, m: &ModulusResult<Rational>) -> String {
    let mut out = format!(
        "{name}: method {:?}, stabilized {}\n",
        m.method, m.stabilized
    );
    if let Some(u) = &m.unsettled {
        out.push_str(&format!(
            "  level {} did not settle: {} then {}\n",
            u.n, u.previous, u.last
        ));
    }
    if let Some(msg) = &m.mismatch {
        out.push_str(&format!("  mismatch: {msg}\n"));
    }
    for n in m.modulus.indices() {
        out.push_str(&format!("  |X|_{n} = {}\n", m.modulus.term(n)));
    }
    out
}

fn modulus(format: Format, s: &Scenario, probe_horizon: usize) -> Result<u8, InputError> {
    let mut code = 0;
    let (mut text, mut values) = (String::new(), Vec::new());
    for (name, x) in &s.martingales {
        match krickeberg_modulus(x, &s.filtration, probe_horizon) {
            Ok(m) => {
                if m.certified().is_none() || m.mismatch.is_some() {
                    code = 1;
                }
                text.push_str(&modulus_text(name, &m));
                values.push(modulus_json(name, &m));
            }
            Err(e) => {
                code = 1;
                text.push_str(&format!("{name}: {e}\n"));
                values.push(json!({ "martingale": name, "error": e.to_string() }));
            }
        }
    }
    emit(
        format,
        text.trim_end(),
        || json!({ "scenario": s.id(), "moduli": values }),
    );
    Ok(code)
}

fn regnorm(
    format: Format,
    s: &Scenario,
    norm: NormJson,
    probe_horizon: usize,
) -> Result<u8, InputError> {
    let kind = norm.into();
    let mut code = 0;
    let (mut text, mut values) = (Vec::new(), Vec::new());
    for (name, x) in &s.martingales {
        let plain = martingale_norm_in(x, &s.filtration, kind);
        match regular_norm(x, &s.filtration, kind, probe_horizon) {
            Ok(r) => {
                text.push(format!("{name}: ‖X‖ = {plain}, ‖X‖_r = {r}"));
                values.push(json!({
                    "martingale": name,
                    "norm": plain.value.to_string(),
                    "norm_exact": plain.exact,
                    "regular_norm": r.value().map(|v| v.to_string()),
                }));
            }
            Err(e) => {
                code = 1;
                text.push(format!(
                    "{name}: ‖X‖ = {plain}, regular norm unavailable: {e}"
                ));
                values.push(json!({ "martingale": name, "norm": plain.value.to_string(), "error": e.to_string() }));
            }
        }
    }
    emit(
        format,
        text.join("\n"),
        || json!({ "scenario": s.id(), "norm": norm, "results": values }),
    );
    Ok(code)
}
