use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sedf_cli::family::{family_to_json, parse_family};
use sedf_cli::report::{report_json, row_of, rows_to_csv, rows_to_json};
use sedf_cli::scan::{scan_rows, ScanConfig};
use sedf_cli::table::{exclusion_table, render_text, TABLE_RULES};
use sedf_cli::{parse_caps, parse_range};
use sedf_core::groups::GroupSpec;
use sedf_core::rules::{run_battery, GaussLattice, Outcome, RuleConfig, RuleSet, Scope};
use sedf_core::sedf::{search_sedf, sedf_violations, Params, SearchOptions, SearchOutcome};
use sedf_core::spectra::verify_character_identity;

#[derive(Parser)]
#[command(name = "sedf", version, about = "Nonexistence checks and searches for strong external difference families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the rule battery on one parameter tuple.
    /// Exit status: 0 inconclusive, 2 ruled out, 1 input error.
    Check(CheckArgs),
    /// Run the battery over every admissible tuple in a range.
    Scan(ScanArgs),
    /// Reproduce the table of fifteen excluded tuples.
    #[command(alias = "paper-table")]
    ExclusionTable(TableArgs),
    /// Check a family file. Exit status: 0 valid, 2 invalid, 1 input error.
    Verify(VerifyArgs),
    /// Exhaustive search in one group. Exit status: 0 found, 2 none
    /// exists, 3 budget exhausted, 1 input error.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lattice {
    /// All of Z[(1 + sqrt(-p))/2].
    Ring,
    /// Only Z[sqrt(-p)], as in the published tables.
    Published,
}

impl From<Lattice> for GaussLattice {
    fn from(l: Lattice) -> Self {
        match l {
            Lattice::Ring => GaussLattice::RingOfIntegers,
            Lattice::Published => GaussLattice::Published,
        }
    }
}

#[derive(Args)]
struct RuleArgs {
    /// Comma-separated rule ids, or `all`.
    #[arg(long, default_value = "all")]
    rules: String,
    /// Enumeration caps, e.g. `divisor_pairs=100000,groups=500`.
    #[arg(long, default_value = "")]
    caps: String,
    #[arg(long, value_enum, default_value = "ring")]
    gauss_lattice: Lattice,
}

impl RuleArgs {
    fn config(&self) -> Result<RuleConfig> {
        Ok(RuleConfig {
            enabled: self.rules.parse::<RuleSet>()?,
            caps: parse_caps(&self.caps)?,
            lattice: self.gauss_lattice.into(),
        })
    }
}

#[derive(Args)]
struct ScopeArgs {
    /// Invariant factors `d1,d2,...` with each dividing the next.
    #[arg(long, conflicts_with = "all_groups")]
    group: Option<String>,
    /// Every abelian group of order v (the default).
    #[arg(long)]
    all_groups: bool,
}

impl ScopeArgs {
    fn scope(&self) -> Result<Scope> {
        match &self.group {
            Some(g) => Ok(Scope::Group(parse_group(g)?)),
            None => Ok(Scope::AllAbelian),
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    v: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    lambda: u64,
    #[command(flatten)]
    scope: ScopeArgs,
    #[command(flatten)]
    rules: RuleArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// `N`, `A-B` or `A..B`, inclusive.
    #[arg(long)]
    v: String,
    #[arg(long, default_value = "2-1000000")]
    m: String,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[command(flatten)]
    scope: ScopeArgs,
    #[command(flatten)]
    rules: RuleArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "SEDF_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum, default_value = "ring")]
    gauss_lattice: Lattice,
    /// Rules to run; defaults to the four the table is stated for.
    #[arg(long)]
    rules: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    lambda: u64,
    /// Node budget.
    #[arg(long, default_value_t = 50_000_000)]
    budget: u64,
    /// Disable symmetry pruning.
    #[arg(long)]
    no_pruning: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_group(s: &str) -> Result<GroupSpec> {
    s.parse::<GroupSpec>()
        .with_context(|| format!("malformed group literal `{s}`"))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn check(a: &CheckArgs) -> Result<u8> {
    let params = Params::new(a.v, a.m, a.k, a.lambda);
    let report = run_battery(&params, &a.scope.scope()?, &a.rules.config()?)?;
    let text = match a.format {
        Format::Json => serde_json::to_string_pretty(&report_json(&report)?)? + "\n",
        Format::Csv => rows_to_csv(&[row_of(&report)])?,
    };
    emit(&a.out, &text)?;
    Ok(if report.overall == Outcome::RuledOut { 2 } else { 0 })
}

fn scan(a: &ScanArgs) -> Result<u8> {
    let cfg = ScanConfig {
        v: parse_range(&a.v)?,
        m: parse_range(&a.m)?,
        k: a.k.as_deref().map(parse_range).transpose()?,
        lambda: a.lambda.as_deref().map(parse_range).transpose()?,
        scope: a.scope.scope()?,
        rules: a.rules.config()?,
        jobs: a.jobs,
    };
    let rows = scan_rows(&cfg)?;
    let text = match a.format {
        Format::Json => rows_to_json(&rows)?,
        Format::Csv => rows_to_csv(&rows)?,
    };
    emit(&a.out, &text)?;
    Ok(0)
}

fn table(a: &TableArgs) -> Result<u8> {
    let enabled = match &a.rules {
        Some(r) => r.parse::<RuleSet>()?,
        None => RuleSet::only(&TABLE_RULES),
    };
    let cfg = RuleConfig {
        enabled,
        lattice: a.gauss_lattice.into(),
        ..RuleConfig::default()
    };
    let reports = exclusion_table(&cfg)?;
    let text = match a.format {
        TableFormat::Text => render_text(&reports),
        TableFormat::Csv => rows_to_csv(&reports.iter().map(row_of).collect::<Vec<_>>())?,
        TableFormat::Json => {
            let v: Vec<_> = reports.iter().map(report_json).collect::<Result<_>>()?;
            serde_json::to_string_pretty(&v)? + "\n"
        }
    };
    emit(&a.out, &text)?;
    Ok(0)
}

fn verify(a: &VerifyArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&a.file).with_context(|| format!("cannot read {}", a.file.display()))?;
    let f = parse_family(&text).with_context(|| format!("{}", a.file.display()))?;
    let violations = sedf_violations(&f.family, f.lambda);
    let p = Params::new(f.family.group().order(), f.family.m() as u64, f.family.k() as u64, f.lambda);
    let mut out = String::new();
    if violations.is_empty() {
        out += &format!("valid: {p}-SEDF in the group with invariant factors {}\n", f.family.group());
        let ok = verify_character_identity(&f.family, f.lambda);
        out += &format!("character identity: {}\n", if ok { "holds" } else { "FAILS" });
        if !ok {
            bail!("character identity fails on a valid family");
        }
    } else {
        let mut js: Vec<usize> = violations.iter().map(|v| v.set).collect();
        js.dedup();
        out += &format!(
            "invalid: {} violations; violated j = {}\n",
            violations.len(),
            js.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(",")
        );
        for v in &violations {
            out += &format!(
                "  j = {}: element {} covered {} times, expected {}\n",
                v.set,
                format!("{:?}", v.element.residues()),
                v.count,
                v.expected
            );
        }
    }
    print!("{out}");
    Ok(if violations.is_empty() { 0 } else { 2 })
}

fn search(a: &SearchArgs) -> Result<u8> {
    if a.budget == 0 {
        bail!("budget must be at least 1");
    }
    let group = parse_group(&a.group)?;
    let opts = SearchOptions {
        budget: a.budget,
        symmetry_pruning: !a.no_pruning,
    };
    let r = search_sedf(&group, a.m, a.k, a.lambda, opts);
    match r.outcome {
        SearchOutcome::Found(f) => {
            emit(&a.out, &(serde_json::to_string(&family_to_json(&f, a.lambda))? + "\n"))?;
            Ok(0)
        }
        SearchOutcome::Exhausted => {
            println!("exhausted after {} nodes: no such family", r.nodes);
            Ok(2)
        }
        SearchOutcome::BudgetExceeded => {
            println!("budget exceeded after {} nodes", r.nodes);
            Ok(3)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => check(a),
        Command::Scan(a) => scan(a),
        Command::ExclusionTable(a) => table(a),
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
