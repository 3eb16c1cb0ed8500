use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use monotone_gt::codec::{decode_with, simulate_outcomes, thresholds, Outcomes, TestMatrix};
use monotone_gt::design::{bounds_report_with, params_report, DEFAULT_RESOLUTION};
use monotone_gt::estimate::{estimate_d, SimulationTester};
use monotone_gt::oracles::{chain_suite, hypergeom_suite, mc_suite, micro_suite, SuiteOutcome};
use monotone_gt::sim::{
    draw_defectives, format_g12, heatmap, heatmap_svg, minima_csv, records_csv, run_point,
    waterfall, waterfall_svg, ConfigFile, ExperimentConfig, HeatmapAxis, QChoice, Scale, TSweep,
    TestCount,
};
use monotone_gt::{Error, Family, Result, TestFunction};

#[derive(Parser)]
#[command(
    name = "mgt",
    version,
    about = "Group testing with monotone stochastic test functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design parameters, sensitivity and concentration for one instance.
    Params {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        /// Defective count; defaults to the table size for `table:` families.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        json: bool,
    },
    /// Generate a Bernoulli test matrix, optionally with a planted set and outcomes.
    Design {
        #[arg(long)]
        n: usize,
        #[arg(long = "T")]
        t: usize,
        /// A probability, or `auto` / `heuristic` together with --f and --d.
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Write a uniformly drawn defective set here (needs --f).
        #[arg(long)]
        defectives_out: Option<PathBuf>,
        /// Write simulated outcomes here (needs --f).
        #[arg(long)]
        outcomes_out: Option<PathBuf>,
    },
    /// Decode outcomes of a stored matrix.
    Decode {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        outcomes: PathBuf,
        #[arg(long)]
        f: String,
        #[arg(long)]
        d: Option<usize>,
        /// Accepted for symmetry with the other commands; the decision
        /// thresholds do not depend on it.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Success rate at one test count.
    Simulate {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// `120`, `22*dlogn` or `30*d2logn`.
        #[arg(long = "T")]
        t: Option<String>,
    },
    /// Success rate over a range of test counts.
    Waterfall {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Waterfalls over a list of `d` or `n` values.
    Heatmap {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Comma-separated defective counts.
        #[arg(long, conflicts_with = "n_values")]
        d_values: Option<String>,
        /// Comma-separated population sizes.
        #[arg(long)]
        n_values: Option<String>,
        /// Per-column first test count reaching 0.99.
        #[arg(long)]
        minima_out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Adaptive estimation of the number of defectives against a simulated tester.
    EstimateD {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        true_d: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Converse and achievability bounds.
    Bounds {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run an internal cross-check suite.
    #[command(hide = true)]
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Chain,
    Hypergeom,
    Micro,
    Mc,
}

/// Experiment settings; flags override values from --config.
#[derive(clap::Args)]
struct ExperimentArgs {
    /// Flat `key = value` file using the long flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// A probability, `auto` or `heuristic`.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    resolution: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// `tests`, `dlogn` or `d2logn`.
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    max_multiple: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

fn pick<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing --{key}")))
}

fn resolve_d(family: &Family, d: Option<usize>) -> Result<usize> {
    d.or_else(|| family.table_d())
        .ok_or_else(|| Error::Config("missing --d".into()))
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    path.as_deref()
        .map(ConfigFile::read)
        .transpose()
        .map(Option::unwrap_or_default)
}

fn experiment(args: &ExperimentArgs) -> Result<(ExperimentConfig, ConfigFile)> {
    let cfg = load_config(&args.config)?;
    let family = Family::parse(&required(pick(args.f.clone(), &cfg, "f")?, "f")?)?;
    let d = resolve_d(&family, pick(args.d, &cfg, "d")?)?;
    let mut config = ExperimentConfig::new(family, required(pick(args.n, &cfg, "n")?, "n")?, d);
    if let Some(eps) = pick(args.eps, &cfg, "eps")? {
        config.eps = eps;
    }
    if let Some(q) = pick(args.q.clone(), &cfg, "q")? {
        config.q = q.parse()?;
    }
    if let Some(trials) = pick(args.trials, &cfg, "trials")? {
        config.trials = trials;
    }
    if let Some(seed) = pick(args.seed, &cfg, "seed")? {
        config.master_seed = seed;
    }
    if let Some(threads) = pick(args.threads, &cfg, "threads")? {
        config.threads = threads;
    }
    if let Some(resolution) = pick(args.resolution, &cfg, "resolution")? {
        config.resolution = resolution;
    }
    Ok((config, cfg))
}

fn sweep(args: &SweepArgs, cfg: &ConfigFile) -> Result<TSweep> {
    let scale: Scale = pick(args.scale.clone(), cfg, "scale")?
        .unwrap_or_else(|| "dlogn".into())
        .parse()?;
    Ok(TSweep {
        scale,
        max_multiple: required(
            pick(args.max_multiple, cfg, "max-multiple")?,
            "max-multiple",
        )?,
        steps: pick(args.steps, cfg, "steps")?.unwrap_or(100),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid list entry `{v}`")))
        })
        .collect()
}

/// Prints `key=value` lines, or one JSON object.
fn report(fields: Vec<(&str, Value)>, json: bool) {
    if json {
        let map: Map<String, Value> = fields
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        println!("{}", Value::Object(map));
        return;
    }
    for (k, v) in fields {
        let text = match &v {
            Value::Number(num) if num.is_f64() => format_g12(num.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        println!("{k}={text}");
    }
}

/// JSON cannot carry infinities; they are written as strings.
fn real(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format_g12(x)))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Params {
            f,
            n,
            d,
            eps,
            resolution,
            json,
        } => {
            let family = Family::parse(&f)?;
            let tf = family.instantiate(resolve_d(&family, d)?)?;
            let r = params_report(&tf, n, eps, resolution)?;
            report(
                vec![
                    ("noise_class", json!(tf.classify().to_string())),
                    ("q_hat", real(r.point.q)),
                    ("delta", real(r.point.delta)),
                    ("nabla", real(r.point.nabla)),
                    ("p_min", real(r.point.p_min)),
                    ("m", real(r.point.m)),
                    ("s", real(r.point.s)),
                    ("T", json!(r.tests)),
                    ("H", real(r.sensitivity.h)),
                    ("L*", json!(r.sensitivity.l_star)),
                    ("U*", json!(r.sensitivity.u_star)),
                    ("h", real(r.bounds.h)),
                    ("chi*", json!(r.bounds.chi_star)),
                    ("lower_T", real(r.bounds.lower_t)),
                    ("tightness_factor", real(r.bounds.tightness_factor)),
                    ("conjecture_ratio", real(r.bounds.conjecture_ratio)),
                ],
                json,
            );
        }
        Command::Bounds {
            f,
            n,
            d,
            eps,
            resolution,
            json,
        } => {
            let family = Family::parse(&f)?;
            let tf = family.instantiate(resolve_d(&family, d)?)?;
            let b = bounds_report_with(&tf, n, eps, resolution)?;
            report(
                vec![
                    ("lower_T", real(b.lower_t)),
                    ("upper_T", json!(b.upper_t)),
                    ("tightness_factor", real(b.tightness_factor)),
                    ("conjecture_ratio", real(b.conjecture_ratio)),
                    ("q_tests", real(b.q_tests)),
                    ("min_T_of_q", real(b.min_t_of_q)),
                    ("h", real(b.h)),
                    ("chi*", json!(b.chi_star)),
                ],
                json,
            );
        }
        Command::Design {
            n,
            t,
            q,
            seed,
            out,
            f,
            d,
            eps,
            defectives_out,
            outcomes_out,
        } => {
            let tf = match &f {
                Some(spec) => {
                    let family = Family::parse(spec)?;
                    Some((family.clone(), family.instantiate(resolve_d(&family, d)?)?))
                }
                None => None,
            };
            let q = match (q.parse::<QChoice>()?, &tf) {
                (QChoice::Explicit(q), _) => q,
                (choice, Some((family, tf))) => {
                    let mut c = ExperimentConfig::new(family.clone(), n, tf.d());
                    c.q = choice;
                    c.eps = eps;
                    c.resolve_q(tf)?
                }
                (_, None) => return Err(Error::Config("--q auto/heuristic needs --f".into())),
            };
            let matrix = TestMatrix::generate(n, t, q, seed)?;
            emit(&out, &matrix.to_text())?;
            if defectives_out.is_some() || outcomes_out.is_some() {
                let (_, tf) =
                    tf.ok_or_else(|| Error::Config("outcome generation needs --f".into()))?;
                let set = draw_defectives(n, tf.d(), monotone_gt::rng::hash(seed, &[1]));
                if let Some(path) = defectives_out {
                    let text: String = set.iter().map(|i| format!("{i}\n")).collect();
                    write_file(&path, &text)?;
                }
                if let Some(path) = outcomes_out {
                    let y =
                        simulate_outcomes(&matrix, &set, &tf, monotone_gt::rng::hash(seed, &[2]))?;
                    write_file(&path, &y.to_text())?;
                }
            }
        }
        Command::Decode {
            matrix,
            outcomes,
            f,
            d,
            eps: _,
            json,
        } => {
            let family = Family::parse(&f)?;
            let tf: TestFunction = family.instantiate(resolve_d(&family, d)?)?;
            let m = TestMatrix::from_text(&read_file(&matrix)?)?;
            let y = Outcomes::from_text(&read_file(&outcomes)?)?;
            let r = decode_with(&m, &y, thresholds(&tf, m.q())?, false)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?
                );
            } else {
                let items: Vec<String> = r
                    .estimated_defectives
                    .iter()
                    .map(|i| i.to_string())
                    .collect();
                println!("{}", items.join(" "));
                eprintln!("rule={} undefined_items={}", r.rule_used, r.undefined_items);
            }
        }
        Command::Simulate { exp, t } => {
            let (config, cfg) = experiment(&exp)?;
            let tests: TestCount = required(pick(t, &cfg, "T")?, "T")?.parse()?;
            let r = run_point(&config, tests)?;
            emit(&exp.out, &records_csv(&[r]))?;
        }
        Command::Waterfall { exp, sweep: s, svg } => {
            let (config, cfg) = experiment(&exp)?;
            let s = sweep(&s, &cfg)?;
            let records = waterfall(&config, &s)?;
            emit(&exp.out, &records_csv(&records))?;
            if let Some(path) = svg {
                write_file(
                    &path,
                    &waterfall_svg(
                        &records,
                        &match s.scale {
                            Scale::Tests => "T".to_string(),
                            scale => format!("T / {scale}"),
                        },
                    ),
                )?;
            }
        }
        Command::Heatmap {
            mut exp,
            sweep: s,
            d_values,
            n_values,
            minima_out,
            svg,
        } => {
            let file = load_config(&exp.config)?;
            let axis = match (
                pick(d_values, &file, "d-values")?,
                pick(n_values, &file, "n-values")?,
            ) {
                (Some(ds), None) => HeatmapAxis::D(parse_list(&ds)?),
                (None, Some(ns)) => HeatmapAxis::N(parse_list(&ns)?),
                _ => {
                    return Err(Error::Config(
                        "give exactly one of --d-values, --n-values".into(),
                    ))
                }
            };
            // The swept parameter need not be given separately.
            match &axis {
                HeatmapAxis::D(ds) if pick(exp.d, &file, "d")?.is_none() => {
                    exp.d = ds.first().copied()
                }
                HeatmapAxis::N(ns) if pick(exp.n, &file, "n")?.is_none() => {
                    exp.n = ns.first().copied()
                }
                _ => {}
            }
            let (config, cfg) = experiment(&exp)?;
            let s = sweep(&s, &cfg)?;
            let map = heatmap(&config, &axis, &s)?;
            emit(&exp.out, &records_csv(&map.cells))?;
            match minima_out {
                Some(path) => write_file(&path, &minima_csv(&map.minima))?,
                None => eprint!("{}", minima_csv(&map.minima)),
            }
            if let Some(path) = svg {
                write_file(&path, &heatmap_svg(&map, "T"))?;
            }
        }
        Command::EstimateD {
            f,
            n,
            true_d,
            eps,
            seed,
        } => {
            let family = Family::parse(&f)?;
            let mut tester = SimulationTester::new(n, &family, true_d, seed)?;
            let r = estimate_d(
                &mut tester,
                &family,
                n,
                eps,
                monotone_gt::rng::hash(seed, &[2]),
            )?;
            println!("{} {} {}", r.d_estimate, r.stages, r.tests_used);
        }
        Command::Verify { suite, seed } => {
            let outcome: SuiteOutcome = match suite {
                Suite::Chain => chain_suite(1000, seed),
                Suite::Hypergeom => hypergeom_suite(),
                Suite::Micro => micro_suite(50, seed),
                Suite::Mc => {
                    let fs = [
                        "classical",
                        "linear",
                        "threshold:3",
                        "sigmoid",
                        "noisy:0.1,0.9",
                    ]
                    .iter()
                    .map(|s| Family::parse(s)?.instantiate(10))
                    .collect::<Result<Vec<_>>>()?;
                    mc_suite(&fs, &[0.1, 0.5], 100_000, seed)
                }
            };
            return Ok(match outcome.counterexample {
                None => {
                    println!("ok checked={}", outcome.checked);
                    ExitCode::SUCCESS
                }
                Some(msg) => {
                    println!("FAIL after {} checks: {msg}", outcome.checked);
                    ExitCode::FAILURE
                }
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
