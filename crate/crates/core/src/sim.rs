//! Monte Carlo experiments: success probability at one test count, sweeps
//! over the test count, and heatmaps over `d` or `n`.
//!
//! Every trial draws its matrix, defective set and outcomes from seeds
//! derived from `(master_seed, trial, stream)`. Matrix rows depend only on
//! the row index, so one matrix of the largest test count serves every
//! smaller test count of a sweep.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{
    outcome_bit, overlap, pack_items, thresholds, RowGenerator, Tallies, Thresholds,
};
use crate::design::{optimize_q, Objective, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::rng::{chacha, derive_seed, Stream};
use crate::test_functions::{Family, TestFunction};

/// Success rate at which a heatmap column is considered solved.
pub const SOLVED_RATE: f64 = 0.99;

/// How the participation probability of an experiment is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QChoice {
    Explicit(f64),
    /// Minimiser of the surrogate objective.
    Auto,
    /// `l/d` for threshold functions, `1/2` for linear ones.
    Heuristic,
}

impl FromStr for QChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(QChoice::Auto),
            "heuristic" => Ok(QChoice::Heuristic),
            other => other.parse::<f64>().map(QChoice::Explicit).map_err(|_| {
                Error::Parse(format!(
                    "q must be a number, `auto` or `heuristic`, got `{other}`"
                ))
            }),
        }
    }
}

/// Unit in which test counts are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Tests,
    /// `d log2 n`.
    DLogN,
    /// `d^2 log2 n`.
    D2LogN,
}

impl Scale {
    pub fn unit(self, n: usize, d: usize) -> f64 {
        let log_n = (n as f64).log2();
        match self {
            Scale::Tests => 1.0,
            Scale::DLogN => d as f64 * log_n,
            Scale::D2LogN => (d * d) as f64 * log_n,
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Tests => "tests",
            Scale::DLogN => "(d log2 n)",
            Scale::D2LogN => "(d^2 log2 n)",
        })
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tests" | "T" => Ok(Scale::Tests),
            "dlogn" => Ok(Scale::DLogN),
            "d2logn" => Ok(Scale::D2LogN),
            other => Err(Error::Parse(format!(
                "scale must be `tests`, `dlogn` or `d2logn`, got `{other}`"
            ))),
        }
    }
}

/// A test count as a multiple of a scale: `ceil(multiple * unit)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestCount {
    pub multiple: f64,
    pub scale: Scale,
}

impl TestCount {
    pub fn tests(n: u64) -> Self {
        TestCount {
            multiple: n as f64,
            scale: Scale::Tests,
        }
    }

    pub fn resolve(&self, n: usize, d: usize) -> u64 {
        (self.multiple * self.scale.unit(n, d)).ceil() as u64
    }
}

impl FromStr for TestCount {
    type Err = Error;

    /// `120`, `22*dlogn` or `30*d2logn`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid test count `{s}`"));
        match s.split_once('*') {
            Some((m, scale)) => Ok(TestCount {
                multiple: m.trim().parse().map_err(|_| bad())?,
                scale: scale.parse()?,
            }),
            None => Ok(TestCount::tests(s.parse().map_err(|_| bad())?)),
        }
    }
}

/// Test counts `j * floor(T_max / steps)` for `j = 0..=steps`, where
/// `T_max = floor(max_multiple * unit)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TSweep {
    pub scale: Scale,
    pub max_multiple: f64,
    pub steps: usize,
}

impl TSweep {
    pub fn counts(&self, n: usize, d: usize) -> Vec<u64> {
        let t_max = (self.max_multiple * self.scale.unit(n, d)).floor() as u64;
        let step = t_max / self.steps.max(1) as u64;
        (0..=self.steps as u64).map(|j| j * step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub q: QChoice,
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; `0` uses the global pool.
    pub threads: usize,
    pub resolution: usize,
}

impl ExperimentConfig {
    pub fn new(family: Family, n: usize, d: usize) -> Self {
        ExperimentConfig {
            family,
            n,
            d,
            eps: 0.01,
            q: QChoice::Auto,
            trials: 100,
            master_seed: 0,
            threads: 0,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.d == 0 || self.d >= self.n {
            return Err(Error::Config(format!(
                "need 1 <= d < n, got d = {}, n = {}",
                self.d, self.n
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Config(format!(
                "eps must lie in (0, 1), got {}",
                self.eps
            )));
        }
        Ok(())
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        self.family.instantiate(self.d)
    }

    /// The participation probability this experiment uses.
    pub fn resolve_q(&self, f: &TestFunction) -> Result<f64> {
        match self.q {
            QChoice::Explicit(q) if q > 0.0 && q < 1.0 => Ok(q),
            QChoice::Explicit(q) => Err(Error::Config(format!("q must lie in (0, 1), got {q}"))),
            QChoice::Auto => {
                optimize_q(f, self.n, self.eps, Objective::GammaHat, self.resolution).map(|r| r.0)
            }
            QChoice::Heuristic => self.family.heuristic_q(self.d).ok_or_else(|| {
                Error::Config(format!("no heuristic q for the {} family", self.family))
            }),
        }
    }
}

/// Success count at one test count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub t: u64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
}

/// Seeds of the three streams of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub matrix: u64,
    pub defectives: u64,
    pub outcomes: u64,
}

impl TrialSeeds {
    pub fn new(master: u64, trial: usize) -> Self {
        let trial = trial as u64;
        TrialSeeds {
            matrix: derive_seed(master, trial, Stream::Matrix),
            defectives: derive_seed(master, trial, Stream::Defectives),
            outcomes: derive_seed(master, trial, Stream::Outcomes),
        }
    }
}

/// Uniformly random `d`-subset of `0..n`, sorted.
pub fn draw_defectives(n: usize, d: usize, seed: u64) -> Vec<usize> {
    let mut rng = chacha(seed);
    let mut set = rand::seq::index::sample(&mut rng, n, d).into_vec();
    set.sort_unstable();
    set
}

/// Fixed inputs shared by every trial of an experiment.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub f: TestFunction,
    pub n: usize,
    pub q: f64,
    pub thresholds: Thresholds,
}

impl TrialPlan {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let f = config.test_function()?;
        let q = config.resolve_q(&f)?;
        let thresholds = thresholds(&f, q)?;
        Ok(TrialPlan {
            f,
            n: config.n,
            q,
            thresholds,
        })
    }

    /// Exact recovery of one trial at each of the ascending `checkpoints`.
    pub fn run_trial(&self, seeds: TrialSeeds, checkpoints: &[u64]) -> Vec<bool> {
        let defectives = draw_defectives(self.n, self.f.d(), seeds.defectives);
        let mask = pack_items(self.n, &defectives);
        let rows = RowGenerator::new(self.n, self.q, seeds.matrix);
        let mut row = vec![0u64; rows.words()];
        let mut tallies = Tallies::new(self.n);
        let mut done = 0u64;
        checkpoints
            .iter()
            .map(|&t| {
                while done < t {
                    rows.fill(done as usize, &mut row);
                    let y =
                        outcome_bit(&self.f, seeds.outcomes, done as usize, overlap(&row, &mask));
                    tallies.add_row(&row, y);
                    done += 1;
                }
                t > 0 && tallies.decide(self.thresholds, false).estimated_defectives == defectives
            })
            .collect()
    }
}

fn with_threads<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Success counts at every test count in `counts`, using the same trials
/// for all of them.
pub fn run_counts(config: &ExperimentConfig, counts: &[u64]) -> Result<Vec<usize>> {
    let plan = TrialPlan::new(config)?;
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&k| counts[k]);
    let sorted: Vec<u64> = order.iter().map(|&k| counts[k]).collect();
    let per_trial: Vec<Vec<bool>> = with_threads(config.threads, || {
        (0..config.trials)
            .into_par_iter()
            .map(|trial| plan.run_trial(TrialSeeds::new(config.master_seed, trial), &sorted))
            .collect()
    })?;
    let mut successes = vec![0usize; counts.len()];
    for outcome in &per_trial {
        for (pos, &k) in order.iter().enumerate() {
            successes[k] += outcome[pos] as usize;
        }
    }
    Ok(successes)
}

fn record(sweep_value: f64, t: u64, trials: usize, successes: usize) -> TrialRecord {
    TrialRecord {
        sweep_value,
        t,
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
    }
}

/// Success rate at a single test count. The sweep value is the multiple.
pub fn run_point(config: &ExperimentConfig, tests: TestCount) -> Result<TrialRecord> {
    let t = tests.resolve(config.n, config.d);
    let successes = run_counts(config, &[t])?[0];
    Ok(record(tests.multiple, t, config.trials, successes))
}

/// One record per test count of the sweep; the sweep value is the count
/// divided by the sweep's unit.
pub fn waterfall(config: &ExperimentConfig, sweep: &TSweep) -> Result<Vec<TrialRecord>> {
    let counts = sweep.counts(config.n, config.d);
    let unit = sweep.scale.unit(config.n, config.d);
    let successes = run_counts(config, &counts)?;
    Ok(counts
        .iter()
        .zip(successes)
        .map(|(&t, s)| record(t as f64 / unit, t, config.trials, s))
        .collect())
}

/// First record whose success rate reaches `rate`.
pub fn first_reaching(records: &[TrialRecord], rate: f64) -> Option<&TrialRecord> {
    records.iter().find(|r| r.success_rate >= rate)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatmapAxis {
    D(Vec<usize>),
    N(Vec<usize>),
}

/// Per-column first test count reaching [`SOLVED_RATE`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnMinimum {
    pub sweep_value: usize,
    pub first_t: Option<u64>,
    pub first_multiple: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    /// Records with the column value (`d` or `n`) as sweep value.
    pub cells: Vec<TrialRecord>,
    pub minima: Vec<ColumnMinimum>,
}

/// A waterfall per column of the axis.
pub fn heatmap(base: &ExperimentConfig, axis: &HeatmapAxis, sweep: &TSweep) -> Result<Heatmap> {
    let columns: Vec<(usize, ExperimentConfig)> = match axis {
        HeatmapAxis::D(ds) => ds
            .iter()
            .map(|&d| (d, ExperimentConfig { d, ..base.clone() }))
            .collect(),
        HeatmapAxis::N(ns) => ns
            .iter()
            .map(|&n| (n, ExperimentConfig { n, ..base.clone() }))
            .collect(),
    };
    if columns.is_empty() {
        return Err(Error::Config("heatmap sweep is empty".into()));
    }
    let mut cells = Vec::new();
    let mut minima = Vec::new();
    for (value, config) in columns {
        let column = waterfall(&config, sweep)?;
        let first = first_reaching(&column, SOLVED_RATE);
        minima.push(ColumnMinimum {
            sweep_value: value,
            first_t: first.map(|r| r.t),
            first_multiple: first.map(|r| r.sweep_value),
        });
        cells.extend(column.into_iter().map(|r| TrialRecord {
            sweep_value: value as f64,
            ..r
        }));
    }
    Ok(Heatmap { cells, minima })
}

pub const CSV_HEADER: &str = "sweep_value,T,trials,successes,success_rate";

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{:.6},{},{},{},{:.6}",
            r.sweep_value, r.t, r.trials, r.successes, r.success_rate
        );
    }
    out
}

pub fn minima_csv(minima: &[ColumnMinimum]) -> String {
    let mut out = String::from("sweep_value,first_T,first_multiple\n");
    for m in minima {
        let t = m.first_t.map(|t| t.to_string()).unwrap_or_default();
        let mult = m
            .first_multiple
            .map(|x| format!("{x:.6}"))
            .unwrap_or_default();
        let _ = writeln!(out, "{},{t},{mult}", m.sweep_value);
    }
    out
}

/// Success rate against the test count as a line chart.
pub fn waterfall_svg(records: &[TrialRecord], x_label: &str) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let x_max = records
        .iter()
        .map(|r| r.sweep_value)
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let px = |x: f64| pad + (w - 2.0 * pad) * x / x_max;
    let py = |y: f64| h - pad - (h - 2.0 * pad) * y;
    let mut svg = svg_open(w, h);
    axes(&mut svg, w, h, pad, x_label, "success rate");
    let points: Vec<String> = records
        .iter()
        .map(|r| format!("{:.2},{:.2}", px(r.sweep_value), py(r.success_rate)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="11">{x_max:.1}</text>"#,
        w - pad - 10.0,
        h - pad + 15.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Grid of success rates, one column per sweep value, with a red dot at each
/// column's first solved test count.
pub fn heatmap_svg(map: &Heatmap, y_label: &str) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let columns: Vec<f64> = map.minima.iter().map(|m| m.sweep_value as f64).collect();
    let mut by_column: BTreeMap<usize, Vec<&TrialRecord>> = BTreeMap::new();
    for c in &map.cells {
        by_column.entry(c.sweep_value as usize).or_default().push(c);
    }
    let t_max = map.cells.iter().map(|c| c.t).max().unwrap_or(1).max(1) as f64;
    let rows = by_column.values().map(Vec::len).max().unwrap_or(1).max(1);
    let cw = (w - 2.0 * pad) / columns.len().max(1) as f64;
    let ch = (h - 2.0 * pad) / rows as f64;
    let mut svg = svg_open(w, h);
    for (k, cells) in by_column.values().enumerate() {
        for cell in cells {
            let y = h - pad - (h - 2.0 * pad) * cell.t as f64 / t_max - ch;
            let shade = (255.0 * (1.0 - cell.success_rate)).round() as u8;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="rgb({shade},{shade},255)"/>"#,
                pad + k as f64 * cw
            );
        }
    }
    for (k, m) in map.minima.iter().enumerate() {
        if let Some(t) = m.first_t {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="red"/>"#,
                pad + (k as f64 + 0.5) * cw,
                h - pad - (h - 2.0 * pad) * t as f64 / t_max - ch / 2.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            pad + (k as f64 + 0.5) * cw,
            h - pad + 15.0,
            m.sweep_value
        );
    }
    axes(&mut svg, w, h, pad, "", y_label);
    svg.push_str("</svg>\n");
    svg
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

fn axes(svg: &mut String, w: f64, h: f64, pad: f64, x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        r#"<path d="M{pad},{pad} V{:.2} H{:.2}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{x_label}</text>"#,
        w / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {:.2})">{y_label}</text>"#,
        h / 2.0,
        h / 2.0
    );
}

/// Flat `key = value` configuration; `#` starts a comment line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", k + 1)))?;
            entries.insert(key.trim().replace('_', "-"), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        ConfigFile::parse(&std::fs::read_to_string(path)?)
    }

    /// The value of `key` parsed as `T`; keys match the long flag names.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
            })
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// A real with twelve significant digits, in the style of `%.12g`.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    trim_fraction(&format!("{x:.*}", (11 - exp) as usize)).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_formatting() {
        assert_eq!(format_g12(0.0), "0");
        assert_eq!(format_g12(1.0), "1");
        assert_eq!(format_g12(0.275), "0.275");
        assert_eq!(format_g12(20.191919191919192), "20.1919191919");
        assert_eq!(format_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g12(1e-5), "1e-05");
        assert_eq!(format_g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g12(-2.5e-7), "-2.5e-07");
        assert_eq!(format_g12(999999999999.5), "1e+12");
        assert_eq!(format_g12(f64::INFINITY), "inf");
    }

    #[test]
    fn test_count_syntax() {
        let t: TestCount = "22*dlogn".parse().unwrap();
        assert_eq!(t.scale, Scale::DLogN);
        assert_eq!(
            t.resolve(2000, 20),
            (22.0 * 20.0 * 2000f64.log2()).ceil() as u64
        );
        let t: TestCount = "150".parse().unwrap();
        assert_eq!(t.resolve(10, 2), 150);
        assert!("x*dlogn".parse::<TestCount>().is_err());
        assert!("3*logn".parse::<TestCount>().is_err());
    }

    #[test]
    fn sweep_counts() {
        let s = TSweep {
            scale: Scale::Tests,
            max_multiple: 1000.0,
            steps: 100,
        };
        let c = s.counts(50, 2);
        assert_eq!(c.len(), 101);
        assert_eq!((c[0], c[1], c[100]), (0, 10, 1000));
    }

    #[test]
    fn q_choice_syntax() {
        assert_eq!("auto".parse::<QChoice>().unwrap(), QChoice::Auto);
        assert_eq!("heuristic".parse::<QChoice>().unwrap(), QChoice::Heuristic);
        assert_eq!("0.25".parse::<QChoice>().unwrap(), QChoice::Explicit(0.25));
        assert!("most".parse::<QChoice>().is_err());
    }

    #[test]
    fn config_file() {
        let c =
            ConfigFile::parse("# comment\nn = 200\nmaster_seed=9\n\nf = threshold:2\n").unwrap();
        assert_eq!(c.get::<usize>("n").unwrap(), Some(200));
        assert_eq!(c.get::<u64>("master-seed").unwrap(), Some(9));
        assert_eq!(
            c.get::<String>("f").unwrap().as_deref(),
            Some("threshold:2")
        );
        assert_eq!(c.get::<usize>("d").unwrap(), None);
        assert!(c.get::<usize>("f").is_err());
        assert!(ConfigFile::parse("novalue\n").is_err());
    }

    #[test]
    fn zero_tests_never_succeed() {
        let mut c = ExperimentConfig::new(Family::Classical, 50, 2);
        c.q = QChoice::Explicit(0.3);
        c.trials = 5;
        let r = run_point(&c, TestCount::tests(0)).unwrap();
        assert_eq!(r.successes, 0);
    }

    #[test]
    fn csv_layout() {
        let csv = records_csv(&[record(1.5, 10, 4, 3)]);
        assert_eq!(
            csv,
            "sweep_value,T,trials,successes,success_rate\n1.500000,10,4,3,0.750000\n"
        );
    }
}
