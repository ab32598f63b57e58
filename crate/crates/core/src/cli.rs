//! Command-line front end. Every subcommand renders a table (CSV or JSON) or
//! a JSON document, to stdout or to `--out`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::distributions::{DistributionSpec, ValueDistribution};
use crate::efficiency::{full_recall_series, no_recall_series};
use crate::error::{Error, Result};
use crate::full_recall::{band, GridConfig};
use crate::no_recall::no_recall_tables;
use crate::oracle::{oracle_spep, oracle_summaries, Variant};
use crate::prophet::{max_feasible_sum, prophet_values};
use crate::simulate::{play, spe_strategy, Strategy, ThresholdStrategy, Which};

#[derive(Debug, Parser)]
#[command(name = "compsel", version, about = "Equilibria of two-player competitive selection games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    #[value(alias = "full_recall", alias = "fr")]
    Fullrecall,
    #[value(alias = "no_recall", alias = "nr")]
    Norecall,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Fullrecall => Variant::FullRecall,
            VariantArg::Norecall => Variant::NoRecall,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Table3,
    Table4,
    Table5,
    Fig2,
    Fig3a,
    Fig3b,
    Fig3c,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `uniform`, an inline JSON spec, or a path to a JSON spec.
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    /// Number of arrivals.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Points per axis of the full-recall grid.
    #[arg(long, default_value_t = GridConfig::default().points)]
    pub grid: usize,
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long)]
    pub quad_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-agent values c_k and the best two-pick sums s_k.
    Prophet(Common),
    /// Worst and best symmetric payoffs with full recall.
    Fullrecall(Common),
    /// Worst single, worst symmetric and best symmetric payoffs without recall.
    Norecall(Common),
    /// Exact equilibrium payoff set for a finite distribution (JSON).
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
    /// Price of anarchy, price of stability and prophet ratio for k = 2..=n.
    Efficiency {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
    /// Monte Carlo play of an equilibrium or threshold strategy (JSON).
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// `best`, `worst`, or a JSON file with `{"thresholds": [...]}` indexed
        /// by arrivals still to come.
        #[arg(long, default_value = "best")]
        strategy: String,
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
    },
    /// Reference tables and figure series.
    Tables {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        which: TableKind,
    },
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(headers: &[&'static str]) -> Self {
        Table { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.headers.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .iter()
                .zip(&self.headers)
                .map(|(v, h)| if *h == "n" { format!("{}", *v as usize) } else { format!("{v}") })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let obj = self.headers.iter().zip(r).map(|(h, v)| {
                        let v = if *h == "n" { json!(*v as usize) } else { json!(v) };
                        (h.to_string(), v)
                    });
                    Value::Object(obj.collect())
                })
                .collect(),
        )
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => pretty(&self.to_json()),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn load_spec(arg: &str) -> Result<DistributionSpec> {
    let trimmed = arg.trim();
    if trimmed.eq_ignore_ascii_case("uniform") {
        return Ok(DistributionSpec::Uniform);
    }
    if trimmed.starts_with('{') {
        return DistributionSpec::from_json(trimmed);
    }
    let text = std::fs::read_to_string(trimmed)
        .map_err(|e| Error::Validation(format!("--dist: cannot read {trimmed}: {e}")))?;
    DistributionSpec::from_json(&text)
}

fn load(common: &Common) -> Result<(DistributionSpec, ValueDistribution)> {
    let spec = load_spec(&common.dist)?;
    let mut d = spec.build()?;
    if let Some(t) = common.quad_tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Validation(format!("--quad-tol must be positive, got {t}")));
        }
        d = d.with_quad_tol(t);
    }
    Ok((spec, d))
}

fn need_n(common: &Common, min: usize, max: usize) -> Result<usize> {
    if common.n < min || common.n > max {
        return Err(Error::Validation(format!("--n must be in {min}..={max}, got {}", common.n)));
    }
    Ok(common.n)
}

pub fn prophet_table(d: &ValueDistribution, n: usize) -> Result<Table> {
    let c = prophet_values(d, n);
    let s = max_feasible_sum(d, n)?;
    let mut t = Table::new(&["n", "c", "s"]);
    for k in 1..=n {
        t.rows.push(vec![k as f64, c.get(k), s.get(k)]);
    }
    Ok(t)
}

pub fn no_recall_table(d: &ValueDistribution, n: usize) -> Result<Table> {
    let tables = no_recall_tables(d, n)?;
    let mut t = Table::new(&["n", "alpha_prime", "alpha", "beta"]);
    for k in 1..=n {
        let s = tables.stage(k);
        t.rows.push(vec![k as f64, s.alpha_prime, s.alpha, s.beta]);
    }
    Ok(t)
}

pub fn full_recall_table(d: &ValueDistribution, n: usize, grid: GridConfig) -> Result<Table> {
    let b = band(d, n, grid)?;
    let mut t = Table::new(&["n", "l", "h"]);
    for k in 1..=n {
        let (l, h) = b.origin(k);
        t.rows.push(vec![k as f64, l, h]);
    }
    Ok(t)
}

pub fn efficiency_table(d: &ValueDistribution, n: usize, variant: Variant, grid: GridConfig) -> Result<Table> {
    let series = match variant {
        Variant::FullRecall => full_recall_series(d, &band(d, n, grid)?)?,
        Variant::NoRecall => no_recall_series(d, &no_recall_tables(d, n)?)?,
    };
    let mut t = Table::new(&["n", "poa", "pos", "pr"]);
    t.rows = series.iter().map(|r| vec![r.n as f64, r.poa, r.pos, r.pr]).collect();
    Ok(t)
}

pub fn comparison_table(d: &ValueDistribution, n: usize, grid: GridConfig) -> Result<Table> {
    let fr = full_recall_table(d, n, grid)?;
    let nr = no_recall_table(d, n)?;
    let mut t = Table::new(&["n", "l", "h", "alpha", "beta"]);
    for (a, b) in fr.rows.iter().zip(&nr.rows) {
        t.rows.push(vec![a[0], a[1], a[2], b[2], b[3]]);
    }
    Ok(t)
}

pub fn both_efficiency_table(d: &ValueDistribution, n: usize, grid: GridConfig) -> Result<Table> {
    let fr = efficiency_table(d, n, Variant::FullRecall, grid)?;
    let nr = efficiency_table(d, n, Variant::NoRecall, grid)?;
    let mut t = Table::new(&["n", "poa_full", "poa_no", "pos_full", "pos_no", "pr_full", "pr_no"]);
    for (a, b) in fr.rows.iter().zip(&nr.rows) {
        t.rows.push(vec![a[0], a[1], b[1], a[2], b[2], a[3], b[3]]);
    }
    Ok(t)
}

/// Figure series: payoff sums (fig2) or one no-recall ratio (fig3a/b/c).
pub fn figure_series(which: TableKind, d: &ValueDistribution, n_max: usize) -> Result<Table> {
    let tables = no_recall_tables(d, n_max)?;
    match which {
        TableKind::Fig2 => {
            let mut t = Table::new(&["n", "best_sum", "worst_sum"]);
            for k in 1..=n_max {
                let s = tables.stage(k);
                t.rows.push(vec![k as f64, 2.0 * s.beta, 2.0 * s.alpha]);
            }
            Ok(t)
        }
        TableKind::Fig3a | TableKind::Fig3b | TableKind::Fig3c => {
            let series = no_recall_series(d, &tables)?;
            let (name, pick): (&'static str, fn(&crate::efficiency::RatioReport) -> f64) = match which {
                TableKind::Fig3a => ("poa", |r| r.poa),
                TableKind::Fig3b => ("pos", |r| r.pos),
                _ => ("pr", |r| r.pr),
            };
            let mut t = Table::new(&["n", name]);
            t.rows = series.iter().map(|r| vec![r.n as f64, pick(r)]).collect();
            Ok(t)
        }
        _ => Err(Error::Validation("not a figure".into())),
    }
}

fn strategy_from(arg: &str, d: &ValueDistribution, n: usize, variant: Variant, grid: GridConfig) -> Result<Box<dyn Strategy>> {
    match arg {
        "best" => Ok(Box::new(spe_strategy(d, n, variant, Which::Best, grid)?)),
        "worst" => Ok(Box::new(spe_strategy(d, n, variant, Which::Worst, grid)?)),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Validation(format!("--strategy: cannot read {path}: {e}")))?;
            let s: ThresholdStrategy = serde_json::from_str(&text)
                .map_err(|e| Error::Validation(format!("--strategy: {e}")))?;
            Ok(Box::new(s))
        }
    }
}

/// Runs one parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Prophet(c) => {
            let (_, d) = load(c)?;
            Ok(prophet_table(&d, need_n(c, 1, 10_000)?)?.render(c.format))
        }
        Command::Fullrecall(c) => {
            let (_, d) = load(c)?;
            Ok(full_recall_table(&d, need_n(c, 1, 50)?, GridConfig::new(c.grid)?)?.render(c.format))
        }
        Command::Norecall(c) => {
            let (_, d) = load(c)?;
            Ok(no_recall_table(&d, need_n(c, 1, 10_000)?)?.render(c.format))
        }
        Command::Oracle { common, variant } => {
            let (spec, _) = load(common)?;
            let set = oracle_spep(&spec.exact_atoms()?, common.n, (*variant).into())?;
            let sums = oracle_summaries(&set)?;
            let payoffs: Vec<Value> =
                set.payoffs.iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect();
            Ok(pretty(&json!({
                "variant": set.variant,
                "n": set.n,
                "payoffs": payoffs,
                "endpoints_only": set.endpoints_only,
                "best_sum": sums.best_sum.to_string(),
                "worst_sum": sums.worst_sum.to_string(),
                "worst_single": sums.worst_single.to_string(),
                "best_single": sums.best_single.to_string(),
            })))
        }
        Command::Efficiency { common, variant } => {
            let (_, d) = load(common)?;
            let n = need_n(common, 2, 50)?;
            Ok(efficiency_table(&d, n, (*variant).into(), GridConfig::new(common.grid)?)?.render(common.format))
        }
        Command::Simulate { common, variant, strategy, runs } => {
            let (_, d) = load(common)?;
            let n = need_n(common, 1, 50)?;
            if *runs == 0 || *runs > 100_000_000 {
                return Err(Error::Resource(format!("--runs {runs} outside 1..=100000000")));
            }
            let v: Variant = (*variant).into();
            let s = strategy_from(strategy, &d, n, v, GridConfig::new(common.grid)?)?;
            let report = play(&d, n, v, s.as_ref(), s.as_ref(), *runs, common.seed)?;
            Ok(pretty(&serde_json::to_value(&report)?))
        }
        Command::Tables { common, which } => {
            let (_, d) = load(common)?;
            let grid = GridConfig::new(common.grid)?;
            let t = match which {
                TableKind::Table3 => no_recall_table(&d, need_n(common, 1, 10_000)?)?,
                TableKind::Table4 => comparison_table(&d, need_n(common, 1, 50)?, grid)?,
                TableKind::Table5 => both_efficiency_table(&d, need_n(common, 2, 50)?, grid)?,
                TableKind::Fig2 => figure_series(*which, &d, need_n(common, 1, 20)?)?,
                _ => figure_series(*which, &d, need_n(common, 2, 20)?)?,
            };
            Ok(t.render(common.format))
        }
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Prophet(c) | Command::Fullrecall(c) | Command::Norecall(c) => c.out.as_ref(),
        Command::Oracle { common, .. }
        | Command::Efficiency { common, .. }
        | Command::Simulate { common, .. }
        | Command::Tables { common, .. } => common.out.as_ref(),
    }
}

/// Parses `argv`, runs the command and writes its output. Returns the process
/// exit code: 0 on success, 2 on invalid input, 3 when a size guard trips.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|text| match out_path(&cli) {
        Some(p) => std::fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<String> {
        let mut argv = vec!["compsel"];
        argv.extend_from_slice(args);
        execute(&Cli::try_parse_from(argv).expect("valid flags"))
    }

    #[test]
    fn table3_csv() {
        let out = exec(&["tables", "--which", "table3", "--n", "4"]).unwrap();
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("n,alpha_prime,alpha,beta"));
        let row4: Vec<f64> = out.lines().nth(4).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(row4[0], 4.0);
        assert!((row4[1] - 0.6419).abs() < 1e-3 && (row4[3] - 0.6533).abs() < 1e-3);
    }

    #[test]
    fn oracle_prints_fractions() {
        let spec = r#"{"type":"discrete","atoms":[{"x":"1/3","p":"1/2"},{"x":"2/3","p":"1/2"}]}"#;
        let out = exec(&["oracle", "--dist", spec, "--n", "2", "--variant", "norecall"]).unwrap();
        for f in ["11/24", "13/24", "23/48"] {
            assert!(out.contains(f), "{out}");
        }
    }

    #[test]
    fn output_is_deterministic() {
        let args = ["simulate", "--variant", "norecall", "--n", "2", "--runs", "2000", "--seed", "9"];
        assert_eq!(exec(&args).unwrap(), exec(&args).unwrap());
    }

    #[test]
    fn bad_input_exits_with_two() {
        assert_eq!(run(["compsel", "norecall", "--dist", r#"{"type":"discrete","atoms":[{"x":2,"p":1}]}"#]), 2);
        assert_eq!(run(["compsel", "bogus"]), 2);
        let err = exec(&["norecall", "--dist", r#"{"type":"piecewise_poly","pieces":[{"lo":0,"hi":1}]}"#]).unwrap_err();
        assert!(err.to_string().contains("coeffs"), "{err}");
    }

    #[test]
    fn guards_exit_with_three() {
        let spec = r#"{"type":"discrete","atoms":[{"x":"1/3","p":"1/2"},{"x":"2/3","p":"1/2"}]}"#;
        assert_eq!(run(["compsel", "oracle", "--dist", spec, "--n", "40", "--variant", "fr"]), 3);
    }

    #[test]
    fn json_tables() {
        let out = exec(&["tables", "--which", "fig3c", "--n", "6", "--format", "json"]).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 5);
        assert_eq!(v[0]["n"], 2);
    }
}
