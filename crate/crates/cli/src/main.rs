mod config;
mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixprofile::gelfand::{ehrenfest_exact_tv_rational, ehrenfest_profile_point, ehrenfest_schedule, DistanceChain};
use mixprofile::gibbs::GibbsModel;
use mixprofile::hypercube::{hypercube_exact_tv_rational, hypercube_profile_point, hypercube_schedule};
use mixprofile::montecarlo::{
    chi_square_gate, kcycle_fixed_point_law, simulate_ehrenfest_occupancy, simulate_gibbs,
    simulate_kcycle_fixed_points, Histogram, SimConfig, DEFAULT_SIGNIFICANCE, RNG_ALGORITHM,
};
use mixprofile::special::truncation_level;
use mixprofile::symmetric::{kcycle_profile_point, MAX_CHARACTER_N};
use mixprofile::verify::{run_suite, Suite};
use mixprofile::{Error, ProfilePoint, Scalar};

use config::ConfigFile;
use output::{Format, Header, HistogramRow, Row, RunRecord};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(m) => CliError::Verification(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Exact total-variation profiles, verification suites and simulation.
#[derive(Parser, Debug)]
#[command(name = "mixprofile", version, about)]
struct Cli {
    /// key = value file with defaults for any long flag; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Profile table for one family over a c grid
    Profile {
        #[arg(long, value_parser = ["gibbs", "kcycle", "ehrenfest", "hypercube"])]
        family: Option<String>,
        #[command(flatten)]
        args: FamilyArgs,
    },
    /// Gibbs sampler profile (same as `profile --family gibbs`)
    Gibbs(FamilyArgs),
    /// Random k-cycle walk profile
    Kcycle(FamilyArgs),
    /// (m+1)-urn Ehrenfest profile
    Ehrenfest(FamilyArgs),
    /// Lazy hypercube walk profile
    Hypercube(FamilyArgs),
    /// Run property suites; exit status 1 if any check fails
    Verify {
        #[arg(long, value_parser = Suite::NAMES)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simulate trajectories and gate the histogram against the exact law
    Simulate {
        #[arg(long, value_parser = ["kcycle", "ehrenfest", "gibbs"])]
        family: Option<String>,
        #[command(flatten)]
        args: FamilyArgs,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trajectories: Option<u64>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct FamilyArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    c_from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c_to: Option<f64>,
    #[arg(long)]
    c_step: Option<f64>,
    #[arg(long, value_parser = ["exact", "float"])]
    mode: Option<String>,
    /// target for the truncated error term
    #[arg(long)]
    epsilon: Option<f64>,
}

struct Resolved {
    cfg: ConfigFile,
    params: BTreeMap<String, String>,
}

impl Resolved {
    fn get<T: std::str::FromStr + ToString>(&mut self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        let v = self.cfg.merge(flag, key)?;
        if let Some(x) = &v {
            self.params.insert(key.to_string(), x.to_string());
        }
        Ok(v)
    }

    fn or<T: std::str::FromStr + ToString + Clone>(&mut self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        let v = self.get(flag, key)?.unwrap_or(default);
        self.params.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    fn need<T: std::str::FromStr + ToString>(&mut self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.get(flag, key)?.ok_or_else(|| CliError::Usage(format!("--{key} is required")))
    }
}

fn command_echo() -> String {
    std::env::args()
        .map(|a| if a.contains(char::is_whitespace) { format!("'{a}'") } else { a })
        .collect::<Vec<_>>()
        .join(" ")
}

fn c_grid(from: f64, to: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || from > to {
        return Err(CliError::Usage("need finite c-from <= c-to and c-step > 0".into()));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    if count > 10_000 {
        return Err(CliError::Usage("c grid has more than 10000 points".into()));
    }
    Ok((0..=count).map(|i| from + i as f64 * step).collect())
}

fn profile_rows(family: &str, a: &FamilyArgs, r: &mut Resolved) -> CliResult<(Vec<ProfilePoint>, String)> {
    let cs = c_grid(
        r.or(a.c_from, "c-from", -2.0)?,
        r.or(a.c_to, "c-to", 2.0)?,
        r.or(a.c_step, "c-step", 0.5)?,
    )?;
    let eps = r.or(a.epsilon, "epsilon", 1e-3)?;
    let default_mode = if family == "kcycle" { "exact" } else { "float" };
    let mode = r.or(a.mode.clone(), "mode", default_mode.to_string())?;
    if mode != "exact" && mode != "float" {
        return Err(CliError::Usage(format!("unknown mode '{mode}'")));
    }
    let exact = mode == "exact";
    let level = |c: f64| -> CliResult<usize> { Ok(truncation_level(c, eps)?) };
    let mut rows = Vec::with_capacity(cs.len());
    match family {
        "gibbs" => {
            let n1 = r.need(a.n1, "n1")?;
            let n2 = r.need(a.n2, "n2")?;
            let p = r.or(a.p, "p", 0.5)?;
            let model = GibbsModel::from_f64(n1, n2, p)?;
            if exact && model.n() > 64 {
                return Err(CliError::Usage("exact mode supports n1 + n2 <= 64".into()));
            }
            let ev = model.evolver()?;
            for &c in &cs {
                let mut pt = model.profile_point_with(&ev, c, level(c)?)?;
                if exact {
                    let chain = model.kernel::<mixprofile::Rational>()?;
                    let target = model.stationary::<mixprofile::Rational>()?;
                    let d = chain.evolve(0, pt.t)?;
                    pt.exact_tv = mixprofile::chain::tv_distance(&d, &target)?.to_f64();
                }
                rows.push(pt);
            }
        }
        "kcycle" => {
            let n = r.need(a.n, "n")?;
            let k = r.or(a.k, "k", 2)?;
            if n > MAX_CHARACTER_N {
                return Err(CliError::Usage(format!("k-cycle profiles need n <= {MAX_CHARACTER_N}")));
            }
            for &c in &cs {
                rows.push(kcycle_profile_point(n, k, c, level(c)?.min(n))?);
            }
        }
        "ehrenfest" => {
            let n = r.need(a.n, "n")?;
            let m = r.or(a.m, "m", 1)?;
            if exact && n > 64 {
                return Err(CliError::Usage("exact mode supports n <= 64".into()));
            }
            for &c in &cs {
                let mut pt = ehrenfest_profile_point(n, m, c, eps)?;
                if exact {
                    pt.exact_tv = ehrenfest_exact_tv_rational(n, m, ehrenfest_schedule(n, m, c)?)?.to_f64();
                }
                rows.push(pt);
            }
        }
        "hypercube" => {
            let n = r.need(a.n, "n")?;
            if exact && n > 512 {
                return Err(CliError::Usage("exact mode supports n <= 512".into()));
            }
            for &c in &cs {
                let mut pt = hypercube_profile_point(n, c, eps)?;
                if exact {
                    pt.exact_tv = hypercube_exact_tv_rational(n, hypercube_schedule(n, c)?)?.to_f64();
                }
                rows.push(pt);
            }
        }
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    }
    Ok((rows, mode))
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn evolve_law(step: impl Fn(&[f64]) -> Vec<f64>, size: usize, t: u64) -> Vec<f64> {
    let mut v = vec![0.0; size];
    v[0] = 1.0;
    for _ in 0..t {
        v = step(&v);
    }
    v
}

fn simulate(family: &str, a: &FamilyArgs, t: u64, cfg: &SimConfig, r: &mut Resolved) -> CliResult<(Histogram, Option<Vec<f64>>)> {
    Ok(match family {
        "kcycle" => {
            let n = r.need(a.n, "n")?;
            let k = r.or(a.k, "k", 2)?;
            let h = simulate_kcycle_fixed_points(n, k, t, cfg)?;
            let law = if n <= MAX_CHARACTER_N { Some(kcycle_fixed_point_law(n, k, t)?) } else { None };
            (h, law)
        }
        "ehrenfest" => {
            let n = r.need(a.n, "n")?;
            let m = r.or(a.m, "m", 1)?;
            let h = simulate_ehrenfest_occupancy(n, m, t, cfg)?;
            let dc = DistanceChain::new(n, m)?;
            (h, Some(evolve_law(|v| dc.step(v), n + 1, t)))
        }
        "gibbs" => {
            let n1 = r.need(a.n1, "n1")?;
            let n2 = r.need(a.n2, "n2")?;
            let p = r.or(a.p, "p", 0.5)?;
            let model = GibbsModel::from_f64(n1, n2, p)?;
            let h = simulate_gibbs(&model, t, cfg)?;
            let ev = model.evolver()?;
            (h, Some(evolve_law(|v| ev.step(v), model.n() + 1, t)))
        }
        other => return Err(CliError::Usage(format!("unknown family '{other}'"))),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut r = Resolved { cfg, params: BTreeMap::new() };
    let format: Format = r
        .cfg
        .merge(cli.format.clone(), "format")?
        .unwrap_or_else(|| "csv".to_string())
        .parse()
        .map_err(CliError::Usage)?;
    let header = |mode: String, seed: Option<u64>, params: BTreeMap<String, String>| Header {
        command: command_echo(),
        params,
        build: output::BUILD_ID.to_string(),
        mode,
        seed,
    };
    match &cli.command {
        Command::Verify { suite, seed } => {
            let name = r.or(suite.clone(), "suite", "all".to_string())?;
            let suite: Suite = name.parse()?;
            let seed = r.or(*seed, "seed", 1)?;
            let reports = run_suite(suite, seed)?;
            let passed = reports.iter().all(|s| s.passed());
            let text = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&serde_json::json!({
                        "header": header("exact".into(), Some(seed), r.params.clone()),
                        "passed": passed,
                        "reports": reports,
                    }))
                    .expect("reports serialise");
                    s.push('\n');
                    s
                }
                Format::Csv => {
                    let mut s = String::from("suite,check,cases,failures,passed\n");
                    for rep in &reports {
                        for c in &rep.checks {
                            s.push_str(&format!("{},{},{},{},{}\n", rep.suite, c.name, c.cases, c.failures, c.passed()));
                            for e in &c.counterexamples {
                                s.push_str(&format!("# counterexample,{}\n", output::csv_field(e)));
                            }
                        }
                    }
                    s
                }
            };
            emit(&cli.out, &text)?;
            if !passed {
                return Err(CliError::Verification(format!("suite {suite} has failing checks")));
            }
            Ok(())
        }
        Command::Simulate { family, args, t, seed, trajectories } => {
            let family = r.need(family.clone(), "family")?;
            let t = r.need(*t, "t")?;
            let seed = r.or(*seed, "seed", 1)?;
            let trajectories = r.or(*trajectories, "trajectories", 100_000)?;
            let sim = SimConfig::new(seed, trajectories)?;
            r.params.insert("rng".into(), RNG_ALGORITHM.into());
            let (h, law) = simulate(&family, args, t, &sim, &mut r)?;
            let mut footer = Vec::new();
            let mut gate_failed = false;
            if let Some(law) = &law {
                let g = chi_square_gate(&h.counts, law, DEFAULT_SIGNIFICANCE)?;
                footer.push(format!(
                    "chi-square {}: statistic={} dof={} p={} significance={}",
                    if g.passed { "pass" } else { "fail" },
                    g.statistic,
                    g.dof,
                    g.p_value,
                    g.significance
                ));
                gate_failed = !g.passed;
            } else {
                footer.push("chi-square skipped: no exact law at this size".into());
            }
            let rows = h
                .counts
                .iter()
                .enumerate()
                .map(|(value, &count)| HistogramRow { value, count, expected: law.as_ref().map(|l| l[value]) })
                .collect();
            let rec = RunRecord { header: header("float".into(), Some(seed), r.params.clone()), rows, footer };
            let text = match format {
                Format::Csv => output::histogram_csv(&rec),
                Format::Json => output::to_json(&rec),
            };
            emit(&cli.out, &text)?;
            if gate_failed {
                return Err(CliError::Verification("chi-square gate failed".into()));
            }
            Ok(())
        }
        cmd => {
            let (family, args) = match cmd {
                Command::Profile { family, args } => (r.need(family.clone(), "family")?, args),
                Command::Gibbs(a) => ("gibbs".to_string(), a),
                Command::Kcycle(a) => ("kcycle".to_string(), a),
                Command::Ehrenfest(a) => ("ehrenfest".to_string(), a),
                Command::Hypercube(a) => ("hypercube".to_string(), a),
                _ => unreachable!("handled above"),
            };
            r.params.insert("family".into(), family.clone());
            let (points, mode) = profile_rows(&family, args, &mut r)?;
            let rows = points.iter().map(Row::from).collect();
            let rec = RunRecord { header: header(mode, None, r.params.clone()), rows, footer: Vec::new() };
            let text = match format {
                Format::Csv => output::profile_csv(&rec),
                Format::Json => output::to_json(&rec),
            };
            emit(&cli.out, &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
    }
}
