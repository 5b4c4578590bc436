//! Benchmark harness: run several pipelines over a set of instances, compare
//! them against the exact optimum where it is affordable (the `ceil(rho/2)`
//! lower bound otherwise) and aggregate the results.
//!
//! Reports are deterministic: rows are keyed by instance id and runtimes are
//! only recorded when asked for.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::Algorithm;
use crate::error::{Error, Result};
use crate::exact::{check_limits, exact_opt, ExactLimits};
use crate::io::parse_matrix;
use crate::matrix::{lower_bound, IntensityMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: String,
    pub matrix: IntensityMatrix,
}

/// An instance that could not be used, and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

/// Reads every regular file of `dir` (sorted by name, hidden files ignored)
/// as a matrix. Unreadable files are reported, not fatal.
pub fn load_instances(dir: &Path) -> std::io::Result<(Vec<Instance>, Vec<Skipped>)> {
    let mut names: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| !n.starts_with('.'))
        .collect();
    names.sort();
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for id in names {
        let parsed = fs::read_to_string(dir.join(&id))
            .map_err(|e| e.to_string())
            .and_then(|text| parse_matrix(&text).map_err(|e| e.to_string()));
        match parsed {
            Ok(matrix) => instances.push(Instance { id, matrix }),
            Err(reason) => skipped.push(Skipped { id, reason }),
        }
    }
    Ok((instances, skipped))
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    /// `None` never calls the exact solver.
    pub exact: Option<ExactLimits>,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    /// Record wall-clock seconds per algorithm. Makes reports
    /// non-reproducible.
    pub timings: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: Algorithm::ALL.to_vec(),
            exact: Some(ExactLimits::default()),
            threads: None,
            timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptStatus {
    Optimal,
    /// Exact search ran out of time.
    Unknown,
    /// Outside the exact limits or exact search disabled.
    Skipped,
}

impl OptStatus {
    fn as_str(self) -> &'static str {
        match self {
            OptStatus::Optimal => "optimal",
            OptStatus::Unknown => "unknown",
            OptStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub id: String,
    pub m: usize,
    pub n: usize,
    pub h: u64,
    #[serde(rename = "D")]
    pub d: u64,
    pub lower_bound: usize,
    pub opt: Option<usize>,
    pub opt_status: OptStatus,
    /// Segmentation size per algorithm name.
    pub sizes: BTreeMap<String, usize>,
    /// Seconds per algorithm name, three decimals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtimes: Option<BTreeMap<String, f64>>,
}

impl InstanceRow {
    /// The value sizes are compared against: the optimum, else the lower
    /// bound.
    pub fn reference(&self) -> usize {
        self.opt.unwrap_or(self.lower_bound)
    }

    pub fn best_size(&self) -> Option<usize> {
        self.sizes.values().copied().min()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub count: usize,
    pub avg: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Stats rounded to `digits` decimals, or `None` for no samples.
    fn of(mut xs: Vec<f64>, digits: i32) -> Option<Stats> {
        if xs.is_empty() {
            return None;
        }
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let median = if n % 2 == 1 {
            xs[n / 2]
        } else {
            (xs[n / 2 - 1] + xs[n / 2]) / 2.0
        };
        Some(Stats {
            count: n,
            avg: round(xs.iter().sum::<f64>() / n as f64, digits),
            median: round(median, digits),
            min: round(xs[0], digits),
            max: round(xs[n - 1], digits),
        })
    }
}

fn round(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WinCount {
    pub algorithm: String,
    pub wins: usize,
    /// `100 * wins / instances`, one decimal.
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRatio {
    pub numerator: String,
    pub denominator: String,
    #[serde(flatten)]
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorStats {
    pub algorithm: String,
    /// Instances compared with a proven optimum.
    pub vs_opt: usize,
    /// Instances compared with the lower bound only.
    pub vs_lower_bound: usize,
    /// `size / reference`, four decimals.
    pub achieved: Option<Stats>,
    /// Proven guarantee on these instances, two decimals.
    pub theoretical_avg: Option<f64>,
    pub theoretical_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestOfAll {
    /// `min over algorithms / reference`, four decimals.
    pub ratio: Option<Stats>,
    /// Instances where the best algorithm meets the reference.
    pub matches_reference: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub instances: usize,
    pub wins: Vec<WinCount>,
    pub pairwise: Vec<PairwiseRatio>,
    pub factors: Vec<FactorStats>,
    pub best_of_all: BestOfAll,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub algorithms: Vec<String>,
    pub rows: Vec<InstanceRow>,
    pub skipped: Vec<Skipped>,
    pub aggregates: Aggregates,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// One line per instance under a fixed header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> =
            ["id", "m", "n", "h", "D", "lower_bound", "opt", "opt_status"]
                .map(String::from)
                .to_vec();
        header.extend(self.algorithms.iter().cloned());
        let timed = self.rows.iter().any(|r| r.runtimes.is_some());
        if timed {
            header.extend(self.algorithms.iter().map(|a| format!("{a}_seconds")));
        }
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![
                r.id.clone(),
                r.m.to_string(),
                r.n.to_string(),
                r.h.to_string(),
                r.d.to_string(),
                r.lower_bound.to_string(),
                r.opt.map(|o| o.to_string()).unwrap_or_default(),
                r.opt_status.as_str().to_string(),
            ];
            rec.extend(self.algorithms.iter().map(|a| r.sizes[a].to_string()));
            if timed {
                let times = r.runtimes.clone().unwrap_or_default();
                rec.extend(
                    self.algorithms
                        .iter()
                        .map(|a| times.get(a).map(|t| format!("{t:.3}")).unwrap_or_default()),
                );
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Instances where a size falls below the optimum or the optimum below
    /// the lower bound. Always empty for a correct build.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            let best = r.best_size().unwrap_or(usize::MAX);
            if let Some(opt) = r.opt {
                if opt < r.lower_bound || best < opt {
                    out.push(format!(
                        "{}: lb {} opt {opt} best {best}",
                        r.id, r.lower_bound
                    ));
                }
            }
            if best < r.lower_bound {
                out.push(format!("{}: best {best} below lb {}", r.id, r.lower_bound));
            }
        }
        out
    }
}

/// Runs every configured algorithm on every instance.
pub fn run_bench(instances: &[Instance], config: &BenchConfig) -> Result<BenchReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        instances
            .par_iter()
            .map(|inst| bench_instance(inst, config))
            .collect::<Vec<_>>()
    });
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for (inst, row) in instances.iter().zip(rows) {
        match row {
            Ok(row) => kept.push(row),
            Err(e) => skipped.push(Skipped {
                id: inst.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    kept.sort_by(|a, b| a.id.cmp(&b.id));
    skipped.sort_by(|a, b| a.id.cmp(&b.id));
    let algorithms: Vec<String> = config
        .algorithms
        .iter()
        .map(|a| a.name().to_string())
        .collect();
    let aggregates = aggregate(&kept, &config.algorithms, instances);
    Ok(BenchReport {
        algorithms,
        rows: kept,
        skipped,
        aggregates,
    })
}

fn bench_instance(inst: &Instance, config: &BenchConfig) -> Result<InstanceRow> {
    let t = &inst.matrix;
    let mut sizes = BTreeMap::new();
    let mut runtimes = BTreeMap::new();
    for alg in &config.algorithms {
        let start = Instant::now();
        let seg = alg.run(t)?;
        runtimes.insert(
            alg.name().to_string(),
            round(start.elapsed().as_secs_f64(), 3),
        );
        sizes.insert(alg.name().to_string(), seg.size());
    }
    let (opt, opt_status) = match config.exact {
        Some(limits) if check_limits(t, &limits).is_ok() => {
            let start = Instant::now();
            let out = exact_opt(t, limits)?;
            runtimes.insert("exact".into(), round(start.elapsed().as_secs_f64(), 3));
            match out.opt() {
                Some(o) => (Some(o), OptStatus::Optimal),
                None => (None, OptStatus::Unknown),
            }
        }
        _ => (None, OptStatus::Skipped),
    };
    Ok(InstanceRow {
        id: inst.id.clone(),
        m: t.rows(),
        n: t.cols(),
        h: t.max_value(),
        d: t.row_difference(),
        lower_bound: lower_bound(t),
        opt,
        opt_status,
        sizes,
        runtimes: config.timings.then_some(runtimes),
    })
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

fn aggregate(rows: &[InstanceRow], algorithms: &[Algorithm], instances: &[Instance]) -> Aggregates {
    let n = rows.len();
    let names: Vec<&str> = algorithms.iter().map(|a| a.name()).collect();

    let wins = names
        .iter()
        .map(|&a| {
            let wins = rows
                .iter()
                .filter(|r| Some(r.sizes[a]) == r.best_size())
                .count();
            WinCount {
                algorithm: a.to_string(),
                wins,
                percent: percent(wins, n),
            }
        })
        .collect();

    let mut pairwise = Vec::new();
    for &a in &names {
        for &b in &names {
            if a == b {
                continue;
            }
            let xs = rows
                .iter()
                .filter_map(|r| ratio(r.sizes[a], r.sizes[b]))
                .collect();
            if let Some(stats) = Stats::of(xs, 4) {
                pairwise.push(PairwiseRatio {
                    numerator: a.to_string(),
                    denominator: b.to_string(),
                    stats,
                });
            }
        }
    }

    let by_id: BTreeMap<&str, &IntensityMatrix> = instances
        .iter()
        .map(|i| (i.id.as_str(), &i.matrix))
        .collect();
    let factors = algorithms
        .iter()
        .map(|alg| {
            let a = alg.name();
            let achieved = rows
                .iter()
                .filter_map(|r| ratio(r.sizes[a], r.reference()))
                .collect();
            let theory: Vec<f64> = rows
                .iter()
                .filter_map(|r| by_id.get(r.id.as_str()))
                .map(|t| alg.theoretical_factor(t))
                .collect();
            FactorStats {
                algorithm: a.to_string(),
                vs_opt: rows.iter().filter(|r| r.opt.is_some()).count(),
                vs_lower_bound: rows.iter().filter(|r| r.opt.is_none()).count(),
                achieved: Stats::of(achieved, 4),
                theoretical_avg: (!theory.is_empty())
                    .then(|| round(theory.iter().sum::<f64>() / theory.len() as f64, 2)),
                theoretical_max: theory.iter().copied().reduce(f64::max).map(|x| round(x, 2)),
            }
        })
        .collect();

    let best = rows
        .iter()
        .filter_map(|r| ratio(r.best_size()?, r.reference()))
        .collect();
    let best_of_all = BestOfAll {
        ratio: Stats::of(best, 4),
        matches_reference: rows
            .iter()
            .filter(|r| r.best_size() == Some(r.reference()))
            .count(),
    };

    Aggregates {
        instances: n,
        wins,
        pairwise,
        factors,
        best_of_all,
    }
}

pub fn percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        round(100.0 * count as f64 / total as f64, 1)
    }
}

/// The renditions of a report: full JSON, per-instance CSV and plain-text
/// tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub json: String,
    pub csv: String,
    pub text: String,
}

pub fn summarize(report: &BenchReport) -> Summary {
    Summary {
        json: report.to_json(),
        csv: report.to_csv(),
        text: render_text(report),
    }
}

fn fmt_opt(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}"))
        .unwrap_or_else(|| "-".into())
}

fn render_text(report: &BenchReport) -> String {
    use std::fmt::Write as _;
    let agg = &report.aggregates;
    let mut s = String::new();
    let _ = writeln!(s, "instances: {}", agg.instances);
    if !report.skipped.is_empty() {
        let _ = writeln!(s, "skipped: {}", report.skipped.len());
        for k in &report.skipped {
            let _ = writeln!(s, "  {}: {}", k.id, k.reason);
        }
    }
    let _ = writeln!(s, "\nsmallest segmentation (ties included)");
    for w in &agg.wins {
        let _ = writeln!(s, "  {:<6} {:>6} ({:.1}%)", w.algorithm, w.wins, w.percent);
    }
    let _ = writeln!(s, "\npairwise size ratios");
    let _ = writeln!(
        s,
        "  {:<12} {:>8} {:>8} {:>8} {:>8}",
        "ratio", "avg", "median", "min", "max"
    );
    for p in &agg.pairwise {
        let st = &p.stats;
        let _ = writeln!(
            s,
            "  {:<12} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            format!("{}/{}", p.numerator, p.denominator),
            st.avg,
            st.median,
            st.min,
            st.max
        );
    }
    let _ = writeln!(
        s,
        "\napproximation factors (vs opt: n_opt, vs lower bound: n_lb)"
    );
    let _ = writeln!(
        s,
        "  {:<6} {:>6} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "alg", "n_opt", "n_lb", "avg", "median", "min", "max", "theo", "theomax"
    );
    for f in &agg.factors {
        let a = f.achieved.as_ref();
        let _ = writeln!(
            s,
            "  {:<6} {:>6} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
            f.algorithm,
            f.vs_opt,
            f.vs_lower_bound,
            fmt_opt(a.map(|x| x.avg), 4),
            fmt_opt(a.map(|x| x.median), 4),
            fmt_opt(a.map(|x| x.min), 4),
            fmt_opt(a.map(|x| x.max), 4),
            fmt_opt(f.theoretical_avg, 2),
            fmt_opt(f.theoretical_max, 2),
        );
    }
    let b = &agg.best_of_all;
    let _ = writeln!(
        s,
        "\nbest of all: avg {} median {} min {} max {}, matches reference on {}",
        fmt_opt(b.ratio.as_ref().map(|x| x.avg), 4),
        fmt_opt(b.ratio.as_ref().map(|x| x.median), 4),
        fmt_opt(b.ratio.as_ref().map(|x| x.min), 4),
        fmt_opt(b.ratio.as_ref().map(|x| x.max), 4),
        b.matches_reference
    );
    s
}
