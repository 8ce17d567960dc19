//! The `gkp-cluster` command line.
//!
//! Every subcommand writes one [`OutputRecord`] to stdout, as JSON (default) or CSV.
//! Diagnostics go to stderr. Exit codes: 0 success, 2 usage or contract error,
//! 3 numerical failure.
//!
//! ```text
//! gkp-cluster thresholds  [--pft 1e-1,1e-2,...]
//! gkp-cluster curve       [--db-min 10] [--db-max 22] [--points 25]
//! gkp-cluster noise-table [--gate i|p|f|cz] [--symbolic] [--sigma2 X | --db X]
//! gkp-cluster mc          --gate G (--sigma2 X | --db X) [--samples N] [--seed S] [--convention half_cell|exact_modular]
//! gkp-cluster distill     (--sigma2 X | --db X) [--product V] [--truncation S]
//! ```
//!
//! Shared flags: `--format json|csv`, `--out PATH` (same bytes also written to a
//! file), `--config PATH` (JSON object whose keys mirror the long flag names; flags
//! given on the command line win), `--timestamp` (add a wall-clock timestamp to the
//! metadata, which makes output non-reproducible).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use indexmap::IndexMap;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cluster_gates::{propagate, Gate, GateSchedule, Rail};
use crate::error::Error;
use crate::gaussian_core::{NoiseForm, NoiseModel};
use crate::magic_distill::{distill_stats, DistillationConfig};
use crate::shift_mc::{simulate, CountConvention, MCConfig, DEFAULT_SEED};
use crate::threshold::{curve, p_err_gate, sigma2_for_threshold, sigma2_from_db, squeezing_db, DEFAULT_THRESHOLDS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// One row of output: column name → value, in column order.
pub type Row = IndexMap<String, Value>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

/// Machine-readable result of one subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: IndexMap<String, Value>,
    pub rows: Vec<Row>,
    pub metadata: Metadata,
}

impl OutputRecord {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: IndexMap::new(),
            rows: Vec::new(),
            metadata: Metadata { version: env!("CARGO_PKG_VERSION").to_string(), seed: None, timestamp: None },
        }
    }

    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records are always serializable");
        s.push('\n');
        s
    }

    /// Header is the union of row keys in first-seen order; missing cells are empty.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<&str> = Vec::new();
        for row in &self.rows {
            for key in row.keys() {
                if !header.contains(&key.as_str()) {
                    header.push(key);
                }
            }
        }
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let cells: Vec<String> = header.iter().map(|k| row.get(*k).map(csv_cell).unwrap_or_default()).collect();
            wtr.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        // serde_json prints f64 in shortest round-trip form
        other => other.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON file of default flag values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Record a wall-clock timestamp in the metadata.
    #[arg(long, global = true)]
    timestamp: bool,
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = false, multiple = false)]
struct Variance {
    /// Noise variance σ² (δ = ε = σ²; vacuum = 1/2).
    #[arg(long)]
    sigma2: Option<f64>,
    /// Squeezing in dB; σ² = ½·10^(−dB/10).
    #[arg(long)]
    db: Option<f64>,
}

impl Variance {
    fn resolve(&self) -> Option<f64> {
        self.sigma2.or(self.db.map(sigma2_from_db))
    }

    fn require(&self) -> Result<f64, Error> {
        self.resolve().ok_or_else(|| Error::invalid("sigma2", "one of --sigma2 or --db is required"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "gkp-cluster",
    version,
    about = "GKP cluster-state fault-tolerance numerics",
    args_override_self = true
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Squeezing required for each fault-tolerance threshold.
    Thresholds {
        /// Comma-separated thresholds p_FT.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_THRESHOLDS.to_vec())]
        pft: Vec<f64>,
    },
    /// Controlled-Z logical error rate against squeezing.
    Curve {
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        db_min: f64,
        #[arg(long, default_value_t = 22.0, allow_negative_numbers = true)]
        db_max: f64,
        #[arg(long, default_value_t = 25)]
        points: usize,
    },
    /// Evolution of the error matrix through one gate.
    NoiseTable {
        /// Gate: i, p, f or cz (all gates when omitted).
        #[arg(long, value_parser = parse_gate)]
        gate: Option<Gate>,
        /// Emit exact δ/ε coefficients.
        #[arg(long)]
        symbolic: bool,
        #[command(flatten)]
        variance: Variance,
    },
    /// Monte Carlo estimate of a gate's logical error rate.
    Mc {
        #[arg(long, value_parser = parse_gate)]
        gate: Gate,
        #[command(flatten)]
        variance: Variance,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_parser = parse_convention, default_value = "half_cell")]
        convention: CountConvention,
    },
    /// Error and success probabilities of magic-state preparation by photon counting.
    Distill {
        #[command(flatten)]
        variance: Variance,
        /// Blur × envelope variance product (default 3/4).
        #[arg(long)]
        product: Option<f64>,
        /// Lattice bound S_max (raised to the tail bound if too small).
        #[arg(long)]
        truncation: Option<u32>,
    },
}

fn parse_gate(s: &str) -> Result<Gate, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_convention(s: &str) -> Result<CountConvention, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn ratio_value(r: Rational64) -> Value {
    if r.is_integer() {
        json!(r.to_integer())
    } else {
        json!(r.to_string())
    }
}

fn form_columns(row: &mut Row, form: NoiseForm, noise: Option<&NoiseModel>, symbolic: bool) {
    if symbolic || noise.is_none() {
        row.insert("delta".into(), ratio_value(form.delta));
        row.insert("epsilon".into(), ratio_value(form.epsilon));
        row.insert("expr".into(), json!(form.to_string()));
    }
    if let Some(noise) = noise {
        row.insert("value".into(), json!(form.eval(noise)));
    }
}

fn noise_table(
    record: &mut OutputRecord,
    gate: Option<Gate>,
    symbolic: bool,
    sigma2: Option<f64>,
) -> Result<(), Error> {
    let noise = sigma2.map(NoiseModel::symmetric).transpose()?;
    let gates: Vec<Gate> = gate.map_or_else(|| Gate::ALL.to_vec(), |g| vec![g]);
    record.param("gates", gates.iter().map(|g| g.name()).collect::<Vec<_>>());
    record.param("symbolic", symbolic || noise.is_none());
    if let Some(s2) = sigma2 {
        record.param("sigma2", s2);
    }
    for g in gates {
        let trace = propagate(&GateSchedule::new(g))?;
        for (label, eta) in &trace.rows {
            for i in 0..eta.dim() {
                for j in 0..eta.dim() {
                    let mut row = Row::new();
                    row.insert("gate".into(), json!(g.name()));
                    row.insert("label".into(), json!(label.ascii()));
                    row.insert("i".into(), json!(i));
                    row.insert("j".into(), json!(j));
                    form_columns(&mut row, eta.get(i, j), noise.as_ref(), symbolic);
                    record.rows.push(row);
                }
            }
        }
        for ev in &trace.err_vars {
            let k = usize::from(ev.rail == Rail::Bottom);
            let mut row = Row::new();
            row.insert("gate".into(), json!(g.name()));
            row.insert("label".into(), json!(format!("sigma2_err{}_{}", ev.step, ev.rail.name())));
            row.insert("i".into(), json!(k));
            row.insert("j".into(), json!(k));
            form_columns(&mut row, ev.variance, noise.as_ref(), symbolic);
            record.rows.push(row);
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<OutputRecord, Error> {
    let record = match &cli.command {
        Command::Thresholds { pft } => {
            let mut record = OutputRecord::new("thresholds");
            record.param("pft", pft.clone());
            for &p in pft {
                let row = sigma2_for_threshold(p)?;
                record.rows.push(Row::from_iter([
                    ("p_ft".to_string(), json!(row.p_ft)),
                    ("sigma2".to_string(), json!(row.sigma2)),
                    ("squeezing_db".to_string(), json!(row.squeezing_db)),
                ]));
            }
            record
        }
        Command::Curve { db_min, db_max, points } => {
            let mut record = OutputRecord::new("curve");
            record.param("db_min", *db_min);
            record.param("db_max", *db_max);
            record.param("points", *points);
            for pt in curve(*db_min, *db_max, *points)? {
                record.rows.push(Row::from_iter([
                    ("squeezing_db".to_string(), json!(pt.squeezing_db)),
                    ("sigma2".to_string(), json!(sigma2_from_db(pt.squeezing_db))),
                    ("p_err".to_string(), json!(pt.p_err)),
                ]));
            }
            record
        }
        Command::NoiseTable { gate, symbolic, variance } => {
            let mut record = OutputRecord::new("noise-table");
            noise_table(&mut record, *gate, *symbolic, variance.resolve())?;
            record
        }
        Command::Mc { gate, variance, samples, seed, convention } => {
            let sigma2 = variance.require()?;
            let cfg = MCConfig::new(*gate, sigma2, *samples).with_seed(*seed).with_convention(*convention);
            let result = simulate(&cfg)?;
            let analytic_eta = propagate(&GateSchedule::new(*gate))?.last().evaluate(&NoiseModel::symmetric(sigma2)?);

            let mut record = OutputRecord::new("mc");
            record.param("gate", gate.name());
            record.param("sigma2", sigma2);
            record.param("squeezing_db", squeezing_db(sigma2));
            record.param("samples", *samples);
            record.param("convention", convention.name());
            record.metadata.seed = Some(*seed);

            let mut summary = Row::new();
            summary.insert("quantity".into(), json!("p_err"));
            summary.insert("estimate".into(), json!(result.p_err_hat));
            summary.insert("std_err".into(), json!(result.std_err));
            summary.insert("analytic".into(), json!(p_err_gate(*gate, sigma2)?));
            record.rows.push(summary);
            for rate in &result.per_step_fail_rates {
                record.rows.push(Row::from_iter([
                    ("quantity".to_string(), json!("fail_rate")),
                    ("step".to_string(), json!(rate.step)),
                    ("rail".to_string(), json!(rate.rail.name())),
                    ("estimate".to_string(), json!(rate.rate)),
                ]));
            }
            for (i, row) in result.empirical_eta.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    record.rows.push(Row::from_iter([
                        ("quantity".to_string(), json!("eta")),
                        ("i".to_string(), json!(i)),
                        ("j".to_string(), json!(j)),
                        ("estimate".to_string(), json!(v)),
                        ("std_err".to_string(), json!(result.eta_std_err[i][j])),
                        ("analytic".to_string(), json!(analytic_eta[(i, j)])),
                    ]));
                }
            }
            record
        }
        Command::Distill { variance, product, truncation } => {
            let sigma2 = variance.require()?;
            let mut cfg = DistillationConfig::new(sigma2);
            if let Some(v) = product {
                cfg = cfg.with_product(*v);
            }
            if let Some(s) = truncation {
                cfg = cfg.with_truncation(*s);
            }
            let result = distill_stats(&cfg)?;

            let mut record = OutputRecord::new("distill");
            record.param("sigma2", sigma2);
            record.param("blur_variance", cfg.blur_variance);
            record.param("envelope_variance", cfg.envelope_variance);
            record.param("product", cfg.product());
            let mut row = Row::new();
            row.insert("sigma2".into(), json!(sigma2));
            row.insert("squeezing_db".into(), json!(squeezing_db(sigma2)));
            if let Value::Object(fields) = serde_json::to_value(result).expect("result serializes") {
                row.extend(fields);
            }
            record.rows.push(row);
            record
        }
    };
    Ok(record)
}

fn flag_present(args: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    args.iter().any(|a| a.to_str().is_some_and(|s| s == flag || s.starts_with(&eq)))
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(path) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
    }
    None
}

/// Turns config-file keys into flags, skipping any the user already passed.
fn config_tokens(path: &Path, user_args: &[OsString]) -> Result<Vec<OsString>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("--config {}: {e}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("--config {}: {e}", path.display()))?;
    let Value::Object(map) = value else {
        return Err(format!("--config {}: expected a JSON object", path.display()));
    };
    let mut tokens = Vec::new();
    for (key, val) in map {
        let name = key.replace('_', "-");
        if name == "config" {
            continue;
        }
        let flag = format!("--{name}");
        let exclusive = match name.as_str() {
            "sigma2" => Some("--db"),
            "db" => Some("--sigma2"),
            _ => None,
        };
        if flag_present(user_args, &flag) || exclusive.is_some_and(|f| flag_present(user_args, f)) {
            continue;
        }
        match val {
            Value::Bool(true) => tokens.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined: Vec<String> = items.iter().map(csv_cell).collect();
                tokens.push(format!("{flag}={}", joined.join(",")).into());
            }
            other => tokens.push(format!("{flag}={}", csv_cell(&other)).into()),
        }
    }
    Ok(tokens)
}

/// Runs the command line with explicit output streams and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();

    if let Some(path) = find_config(&args) {
        match config_tokens(&path, &args) {
            Ok(tokens) if args.len() >= 2 => {
                let tail = args.split_off(2);
                args.extend(tokens);
                args.extend(tail);
            }
            Ok(_) => {}
            Err(msg) => {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_USAGE;
            }
        }
    }

    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };

    let mut record = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        }
    };
    if cli.common.timestamp {
        record.metadata.timestamp =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs());
    }

    let text = match cli.common.format {
        Format::Json => record.to_json(),
        Format::Csv => record.to_csv(),
    };
    if let Some(path) = &cli.common.out {
        if let Err(e) = std::fs::write(path, &text) {
            let _ = writeln!(stderr, "error: --out {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if stdout.write_all(text.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    EXIT_OK
}

/// Entry point used by the binary.
pub fn main_with_env_args() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
