//! Command-line front end: spectra, ratio and cooling surfaces, figure data
//! and the validation suite.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eitsim::analytic::rho33_exact;
use eitsim::cooling::{scan_cooling, CoolingError, CoolingParams};
use eitsim::discrim::{scan_grid, scan_surface, DiscrimError, DiscriminationScenario, GridSpec, ProbeTuning, SpectralScan};
use eitsim::figures::{self, Table};
use eitsim::obe::{build_liouvillian, excited_population, steady_state};
use eitsim::validation::{run_suite, SuiteSize};
use eitsim::{ConfigError, SystemConfig, Topology, ValidatedConfig};

#[derive(Debug, Parser)]
#[command(name = "eitsim", version, about = "Three-level atom spectra, discrimination ratios and cooling rates")]
struct Cli {
    /// Worker threads for grid scans.
    #[arg(long, global = true, env = "EITSIM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Excited-state population over one or two parameters.
    Profile {
        #[command(flatten)]
        io: ScanIo,
        /// Force the closed form or the Bloch-equation solver.
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Discrimination ratio r over one or two parameters.
    ScanR {
        #[command(flatten)]
        io: ScanIo,
        #[arg(long, value_enum, default_value_t = Scenario::TwoLambda)]
        scenario: Scenario,
        /// Two-photon separation between the B and D manifolds.
        #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
        z: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c1: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c2: f64,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Inverse heating-to-cooling ratio 1/q over one or two parameters.
    ScanCooling {
        #[command(flatten)]
        io: ScanIo,
        /// Trap frequency.
        #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
        eta1: f64,
        #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
        eta2: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha1: f64,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        alpha2: f64,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Runs the self-consistency suite; exits 3 if any check fails.
    Validate {
        /// Full sample counts instead of the reduced ones.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also write the outcomes here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Data behind one of the standard figures.
    Figure {
        /// Figure number.
        #[arg(value_parser = ["2", "3", "6", "7"])]
        id: Option<String>,
        #[arg(long = "figure", value_parser = ["2", "3", "6", "7"], conflicts_with = "id")]
        figure: Option<String>,
        /// Points per axis; defaults to 601 for curves and 60 for surfaces.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct ScanIo {
    /// JSON system configuration.
    #[arg(long)]
    config: PathBuf,
    /// Scan axis, `<name>:<lo>:<hi>:<n>:<log|lin>`; give one or two.
    #[arg(long = "grid", required = true, allow_hyphen_values = true)]
    grids: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct TuningArgs {
    /// How B (or the red sideband) is tuned at each grid point.
    #[arg(long, value_enum, default_value_t = Tuning::Peak)]
    tuning: Tuning,
    /// Raman detuning for `--tuning fixed`.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Exact,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scenario {
    TwoLambda,
    Resonant,
    Degenerate,
    Benchmark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Tuning {
    Peak,
    LightShift,
    Fixed,
    AsConfigured,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numeric(String),
    Validation(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numeric(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numeric(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<DiscrimError> for Failure {
    fn from(e: DiscrimError) -> Self {
        match e {
            DiscrimError::Config(c) => c.into(),
            e @ (DiscrimError::Grid(_) | DiscrimError::Precondition(_)) => Failure::Config(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<CoolingError> for Failure {
    fn from(e: CoolingError) -> Self {
        match e {
            CoolingError::Config(c) => c.into(),
            CoolingError::Discrim(d) => d.into(),
            e @ CoolingError::Precondition(_) => Failure::Config(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("eitsim: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be positive".into()));
        }
        // A pool may already exist when `run` is called more than once in a
        // process; the first size then stays in effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Profile { io, method } => {
            let cfg = load_config(&io.config)?;
            let axes = parse_grids(&io.grids)?;
            let use_exact = match method {
                Method::Exact => true,
                Method::Numeric => false,
                Method::Auto => cfg.topology() == Topology::Lambda && cfg.has_equal_optical_coherence(),
            };
            let metadata = serde_json::json!({
                "method": if use_exact { "exact" } else { "numeric" },
                "axes": io.grids,
                "config": cfg,
            });
            let scan = scan_grid(&cfg, &axes, "rho33", metadata, move |c| {
                let v = if use_exact {
                    rho33_exact(c).ok()?
                } else {
                    excited_population(&steady_state(&build_liouvillian(c)).ok()?)
                };
                Some((v, true))
            })?;
            emit_scan(&scan, &io)
        }
        Command::ScanR { io, scenario, z, c1, c2, tuning } => {
            let cfg = load_config(&io.config)?;
            let axes = parse_grids(&io.grids)?;
            let scenario = match scenario {
                Scenario::TwoLambda => DiscriminationScenario::two_lambda(cfg, z),
                Scenario::Resonant => DiscriminationScenario::resonant(cfg, c1),
                Scenario::Degenerate => DiscriminationScenario::degenerate(cfg, c1, c2),
                Scenario::Benchmark => DiscriminationScenario::benchmark(cfg, z),
            };
            let scan = scan_surface(&scenario, &axes, probe_tuning(&tuning)?)?;
            emit_scan(&scan, &io)
        }
        Command::ScanCooling { io, nu, eta1, eta2, alpha1, alpha2, tuning } => {
            let cfg = load_config(&io.config)?;
            let axes = parse_grids(&io.grids)?;
            let params = CoolingParams { cfg, nu, eta1, eta2, alpha1, alpha2 };
            for w in params.warnings() {
                eprintln!("eitsim: warning: {w}");
            }
            let scan = scan_cooling(&params, &axes, probe_tuning(&tuning)?)?;
            emit_scan(&scan, &io)
        }
        Command::Validate { full, seed, out, format } => {
            let size = if full { SuiteSize::FULL } else { SuiteSize::REDUCED };
            let outcomes = run_suite(size, seed);
            for o in &outcomes {
                println!("{}", o.line());
            }
            if let Some(path) = out {
                let text = match format {
                    Format::Json => serde_json::to_string_pretty(&outcomes).expect("outcomes serialize"),
                    Format::Csv => {
                        let mut s = String::from("criterion,passed,seconds,detail\n");
                        for o in &outcomes {
                            s.push_str(&format!("{},{},{},\"{}\"\n", o.criterion, o.passed, o.seconds, o.detail.replace('"', "'")));
                        }
                        s
                    }
                };
                write_output(Some(&path), &text)?;
            }
            let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.criterion.to_string()).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Validation(format!("failed criteria: {}", failed.join(", "))))
            }
        }
        Command::Figure { id, figure, points, out, format } => {
            let id = id.or(figure).ok_or_else(|| Failure::Config("figure number required".into()))?;
            let text = match id.as_str() {
                "2" => table_text(&figures::figure2(points.unwrap_or(601)).map_err(|e| Failure::Numeric(e.to_string()))?, format),
                "3" => table_text(&figures::figure3(points.unwrap_or(601)).map_err(|e| Failure::Numeric(e.to_string()))?, format),
                "6" => {
                    let n = points.unwrap_or(60);
                    scan_text(&check_scan(figures::figure6(n, n)?)?, format)
                }
                _ => {
                    let n = points.unwrap_or(60);
                    scan_text(&check_scan(figures::figure7(n, n)?)?, format)
                }
            };
            write_output(out.as_deref(), &text)
        }
    }
}

fn load_config(path: &Path) -> Result<ValidatedConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(SystemConfig::from_json(&text)?.validate()?)
}

fn parse_grids(specs: &[String]) -> Result<Vec<GridSpec>, Failure> {
    if specs.len() > 2 {
        return Err(Failure::Config("at most two --grid axes".into()));
    }
    specs.iter().map(|s| s.parse::<GridSpec>().map_err(|e| Failure::Config(e.to_string()))).collect()
}

fn probe_tuning(t: &TuningArgs) -> Result<ProbeTuning, Failure> {
    Ok(match t.tuning {
        Tuning::Peak => ProbeTuning::TrackBrightPeak,
        Tuning::LightShift => ProbeTuning::LightShift,
        Tuning::AsConfigured => ProbeTuning::AsConfigured,
        Tuning::Fixed => {
            ProbeTuning::FixedDelta(t.delta.ok_or_else(|| Failure::Config("--tuning fixed needs --delta".into()))?)
        }
    })
}

/// A scan in which no point could be evaluated is a numerical failure.
fn check_scan(scan: SpectralScan) -> Result<SpectralScan, Failure> {
    if scan.values.iter().all(Option::is_none) {
        return Err(Failure::Numeric(format!("no grid point of `{}` could be evaluated", scan.quantity)));
    }
    Ok(scan)
}

fn emit_scan(scan: &SpectralScan, io: &ScanIo) -> Result<(), Failure> {
    let scan = check_scan(scan.clone())?;
    write_output(io.out.as_deref(), &scan_text(&scan, io.format))
}

fn scan_text(scan: &SpectralScan, format: Format) -> String {
    match format {
        Format::Csv => scan.to_csv(),
        Format::Json => scan.to_json(),
    }
}

fn table_text(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Config(format!("stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: &str = r#"{
        "atom": {"gamma_total": 1.0, "gamma_1": 0.5, "gamma_2": 0.5, "closed": true},
        "drive": {"omega_1": 0.1, "omega_2": 1.0, "delta_1": 3.0, "delta_2": 3.0, "linewidth_1": 0.05, "linewidth_2": 0.05}
    }"#;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("eitsim").chain(args.iter().copied())).unwrap()
    }

    fn config_file(dir: &tempfile::TempDir, text: &str) -> String {
        let p = dir.path().join("cfg.json");
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    #[test]
    fn profile_writes_deterministic_csv() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_file(&dir, LAMBDA);
        let out = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
        for name in ["a.csv", "b.csv"] {
            run(cli(&["profile", "--config", &cfg, "--grid", "delta:-1.5:1.5:31:lin", "--out", &out(name)])).unwrap();
        }
        let a = fs::read_to_string(out("a.csv")).unwrap();
        assert_eq!(a, fs::read_to_string(out("b.csv")).unwrap());
        let mut lines = a.lines();
        assert!(lines.next().unwrap().starts_with("# quantity=rho33 config_sha256="));
        assert_eq!(lines.next().unwrap(), "delta,value,valid");
        assert_eq!(lines.count(), 31);
    }

    #[test]
    fn numeric_and_exact_profiles_agree() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_file(&dir, LAMBDA);
        let mut values = Vec::new();
        for method in ["exact", "numeric"] {
            let out = dir.path().join(format!("{method}.json"));
            run(cli(&[
                "profile", "--config", &cfg, "--grid", "delta:-1:1:5:lin", "--method", method, "--format", "json",
                "--out", out.to_str().unwrap(),
            ]))
            .unwrap();
            let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
            values.push(v["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect::<Vec<_>>());
        }
        for (a, b) in values[0].iter().zip(&values[1]) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1e-12));
        }
    }

    #[test]
    fn bad_config_is_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_file(&dir, &LAMBDA.replace("\"gamma_1\": 0.5", "\"gamma_1\": -0.5"));
        let err = run(cli(&["profile", "--config", &cfg, "--grid", "delta:-1:1:5:lin"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.message().contains("negative"));

        let good = config_file(&dir, LAMBDA);
        let err = run(cli(&["profile", "--config", &good, "--grid", "delta:1:-1:5:lin"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = run(cli(&["profile", "--config", "/nonexistent/cfg.json", "--grid", "delta:-1:1:5:lin"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn figure_two_columns() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("f2.csv");
        run(cli(&["figure", "2", "--points", "11", "--out", out.to_str().unwrap()])).unwrap();
        let text = fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "delta,rho33_gamma_0,rho33_gamma_0.05,rho33_gamma_0.1");
        assert_eq!(text.lines().count(), 13);
        let out3 = dir.path().join("f3.csv");
        run(cli(&["figure", "--figure", "3", "--points", "11", "--out", out3.to_str().unwrap()])).unwrap();
        assert!(fs::read_to_string(out3).unwrap().contains("delta_1,rho33_d,rho33_b"));
    }

    #[test]
    fn small_surfaces() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("f6.json");
        run(cli(&["figure", "6", "--points", "4", "--format", "json", "--out", out.to_str().unwrap()])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
        assert_eq!(v["values"].as_array().unwrap().len(), 16);
        assert_eq!(v["metadata"]["tuning"]["mode"], "track-bright-peak");

        let cfg = config_file(&dir, LAMBDA);
        let out = dir.path().join("q.csv");
        run(cli(&[
            "scan-cooling", "--config", &cfg, "--grid", "delta_2:1:10:3:log", "--grid", "omega_2:0.5:2:2:lin", "--out",
            out.to_str().unwrap(),
        ]))
        .unwrap();
        let text = fs::read_to_string(out).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "delta_2,omega_2,value,valid");
        assert_eq!(text.lines().count(), 8);
    }

    #[test]
    fn scan_r_options() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config_file(&dir, LAMBDA);
        let out = dir.path().join("r.csv");
        run(cli(&[
            "scan-r", "--config", &cfg, "--grid", "omega_2:0.5:4:4:log", "--tuning", "fixed", "--delta", "-0.1",
            "--out", out.to_str().unwrap(),
        ]))
        .unwrap();
        assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 6);
        let err = run(cli(&["scan-r", "--config", &cfg, "--grid", "omega_2:0.5:4:4:log", "--tuning", "fixed"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let err = run(cli(&["scan-r", "--config", &cfg, "--grid", "omega_2:0.5:4:4:log", "--z", "-1"])).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn flag_parsing() {
        assert!(Cli::try_parse_from(["eitsim", "figure", "5"]).is_err());
        assert!(Cli::try_parse_from(["eitsim", "figure", "2", "--figure", "3"]).is_err());
        assert!(Cli::try_parse_from(["eitsim", "profile", "--config", "x.json"]).is_err());
        let c = cli(&["--threads", "2", "validate"]);
        assert_eq!(c.threads, Some(2));
    }
}
