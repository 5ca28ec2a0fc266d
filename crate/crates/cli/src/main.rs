//! `goodred verify` runs the full procedure and prints the certificate
//! summary; `goodred inspect STAGE` prints one stage's artifact.
//!
//! Config files (`--config PATH`) hold `key = value` lines with the same
//! names as the long flags (`field`, `ell`, `S`, `odlyzko`, `fixtures`,
//! `modulus-cap`, `wide-places`, `allow-fallback`, `seed`, `json-out`);
//! lists are comma-separated, `#` starts a comment, and flags override the file.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use goodred_core::bounds::OdlyzkoTable;
use goodred_core::classfield::{parse_unit_fixtures, UnitFixture, DEFAULT_SEARCH_CAP};
use goodred_core::verdict::pipeline::{inspect, verify, PipelineInput, StageError};

const ODLYZKO: &str = include_str!("../../../data/odlyzko.csv");
const UNIT_FIXTURES: &str = include_str!("../../../data/units.fixture");
const EXT_FIXTURES: [&str; 2] = [include_str!("../../../data/ext_13.txt"), include_str!("../../../data/ext_17.txt")];

const EXIT_INPUT: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "goodred", version, about = "Certify that no nonzero abelian variety over K has good reduction outside S")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run field → bounds → torsion field → simples → conditions → verdict.
    Verify(RunArgs),
    /// Print the artifact of one stage: bounds, torsion-field, simples or conditions.
    Inspect {
        stage: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Monic integer polynomial defining K, e.g. "x^2-13".
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    ell: Option<u64>,
    /// Primes of S: `p` (all primes above p) or `p.i` (the i-th); repeatable or comma-separated.
    #[arg(long = "S", value_delimiter = ',')]
    s: Vec<String>,
    /// Odlyzko table (CSV of degree, bound); defaults to the bundled table.
    #[arg(long)]
    odlyzko: Option<PathBuf>,
    /// Unit or Ext¹ fixture files, consulted before the bundled ones.
    #[arg(long, value_delimiter = ',')]
    fixtures: Vec<PathBuf>,
    /// Skip the bundled unit and Ext¹ fixtures.
    #[arg(long)]
    no_default_fixtures: bool,
    /// Exponent of the primes above ℓ in the torsion-field cap modulus.
    #[arg(long)]
    modulus_cap: Option<u32>,
    /// Leave the real places out of the cap modulus.
    #[arg(long)]
    wide_places: bool,
    /// Fall back to rank stability when the conditions fail.
    #[arg(long)]
    allow_fallback: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Key-value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, String> {
    v.parse().map_err(|_| format!("config {key}: expected true or false, got {v:?}"))
}

/// Fills unset fields from the config file.
fn merge_config(mut a: RunArgs) -> Result<RunArgs, String> {
    let Some(path) = a.config.clone() else { return Ok(a) };
    let text = read(&path)?;
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let list = || value.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect::<Vec<_>>();
        let num = |what: &str| format!("config {key}: bad {what} {value:?}");
        match key {
            "field" => a.field = a.field.or(Some(value.to_string())),
            "ell" => a.ell = a.ell.or(Some(value.parse().map_err(|_| num("integer"))?)),
            "S" if a.s.is_empty() => a.s = list(),
            "odlyzko" => a.odlyzko = a.odlyzko.or(Some(value.into())),
            "fixtures" if a.fixtures.is_empty() => a.fixtures = list().into_iter().map(PathBuf::from).collect(),
            "modulus-cap" => a.modulus_cap = a.modulus_cap.or(Some(value.parse().map_err(|_| num("integer"))?)),
            "wide-places" => a.wide_places |= parse_bool(key, value)?,
            "allow-fallback" => a.allow_fallback |= parse_bool(key, value)?,
            "seed" => a.seed = a.seed.or(Some(value.parse().map_err(|_| num("integer"))?)),
            "json-out" => a.json_out = a.json_out.or(Some(value.into())),
            "S" | "fixtures" => {}
            _ => return Err(format!("config line {}: unknown key {key:?}", n + 1)),
        }
    }
    Ok(a)
}

fn is_ext_fixture(text: &str) -> bool {
    text.lines().map(str::trim).any(|l| l.starts_with("entry ") || l.starts_with("hypothesis ") || l.starts_with("witness "))
}

fn build_input(a: &RunArgs) -> Result<PipelineInput, String> {
    let field = a.field.clone().ok_or("--field is required")?;
    let ell = a.ell.ok_or("--ell is required")?;
    let odlyzko = match &a.odlyzko {
        Some(p) => OdlyzkoTable::parse(&read(p)?),
        None => OdlyzkoTable::parse(ODLYZKO),
    }
    .map_err(|e| format!("odlyzko table: {e}"))?;
    let mut unit_fixtures: Vec<UnitFixture> = Vec::new();
    let mut ext_fixtures = Vec::new();
    for p in &a.fixtures {
        let text = read(p)?;
        if is_ext_fixture(&text) {
            ext_fixtures.push(text);
        } else {
            unit_fixtures.extend(parse_unit_fixtures(&text).map_err(|e| format!("{}: {e}", p.display()))?);
        }
    }
    if !a.no_default_fixtures {
        unit_fixtures.extend(parse_unit_fixtures(UNIT_FIXTURES).map_err(|e| e.to_string())?);
        ext_fixtures.extend(EXT_FIXTURES.iter().map(|s| s.to_string()));
    }
    Ok(PipelineInput {
        field_poly: field,
        ell,
        s: a.s.clone(),
        odlyzko,
        unit_fixtures,
        ext_fixtures,
        modulus_cap: a.modulus_cap.unwrap_or(6),
        wide_places: a.wide_places,
        seed: a.seed.unwrap_or(0),
        search_cap: DEFAULT_SEARCH_CAP,
    })
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(()),
    }
}

fn stage_failure(e: StageError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_input_error() { EXIT_INPUT } else { EXIT_INCONCLUSIVE })
}

fn input_failure(msg: String) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Verify(args) => {
            let args = match merge_config(args) {
                Ok(a) => a,
                Err(m) => return input_failure(m),
            };
            let input = match build_input(&args) {
                Ok(i) => i,
                Err(m) => return input_failure(m),
            };
            let run = match verify(&input, args.allow_fallback) {
                Ok(r) => r,
                Err(e) => return stage_failure(e),
            };
            let c = &run.certificate;
            let s = if c.s.is_empty() { "∅".to_string() } else { format!("{{{}}}", c.s.join(", ")) };
            println!("field {}  ℓ = {}  S = {s}", c.field, c.ell);
            for step in &c.steps {
                println!("[{}] {}: {}", serde_json::to_value(step.provenance).expect("provenance").as_str().unwrap_or(""), step.id, step.claim);
            }
            println!("verdict: {}", serde_json::to_string(&c.verdict).expect("verdict"));
            println!("flags: {}", c.flags.join(", "));
            if let Err(m) = write_out(&args.json_out, &c.to_json()) {
                return input_failure(m);
            }
            ExitCode::from(c.verdict.exit_code() as u8)
        }
        Command::Inspect { stage, run: args } => {
            let args = match merge_config(args) {
                Ok(a) => a,
                Err(m) => return input_failure(m),
            };
            let input = match build_input(&args) {
                Ok(i) => i,
                Err(m) => return input_failure(m),
            };
            match inspect(&input, &stage) {
                Ok(v) => {
                    let text = serde_json::to_string_pretty(&v).expect("artifact") + "\n";
                    print!("{text}");
                    if let Err(m) = write_out(&args.json_out, &text) {
                        return input_failure(m);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => stage_failure(e),
            }
        }
    }
}

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
    }
}
