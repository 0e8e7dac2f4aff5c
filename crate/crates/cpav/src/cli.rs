//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 when a computation
//! would exceed its resource budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use cpav_core::bounds::{block_upper_gap, bound_report, cmp_certificate, lll_lower};
use cpav_core::enumerate::{count_dp, rho_estimates, CountTable};
use cpav_core::overlap::{
    classify, enumerate_overlap_sets, forced_suffix, joint_count, overlap_profile, verify_monotone_lemma,
};
use cpav_core::series::{monotone_lb_quadratic, smallest_root, RootResult, SeriesKind, SeriesSpec};
use cpav_core::stats::{mk_census, SampleReport, BONA_INTERVAL};
use cpav_core::{Error, Pattern};
use serde::Serialize;
use serde_json::Number;

use crate::cache::Cache;
use crate::parallel;
use crate::report::{big, render, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

/// Default `n_max` of `rho --pattern`.
pub const DEFAULT_RHO_N_MAX: usize = 12;
/// Default sample budget of `sample`.
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Largest `m` accepted by `rho --m`.
pub const SERIES_M_LIMIT: usize = 12;

#[derive(Debug, Parser)]
#[command(
    name = "cpav",
    version,
    about = "Consecutive pattern avoidance: counts, overlaps and growth-rate bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Exact number of permutations avoiding a pattern (--pattern with --n or --n-max).
    Count,
    /// Exact counts for every pattern of length --m at length --n (m <= 5).
    Scan,
    /// Overlap profile, forced values and joint counts of --pattern, or the N_k/M_k census for --m.
    Overlap,
    /// Growth-rate bounds for length --m (optionally --k, --pattern, --n).
    Bounds,
    /// Growth-rate estimates from exact counts of --pattern, or series roots for --m.
    Rho,
    /// Monte Carlo: overlap frequencies for --m, or avoidance frequency of --pattern at --n.
    Sample,
    /// Exact M_k census for --m <= 8.
    Census,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Pattern, e.g. 132 or 1,3,2.
    #[arg(long, global = true)]
    pub pattern: Option<String>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub output: Format,
    /// Directory for cached count tables; overrides CPAV_CACHE_DIR.
    #[arg(long = "cache-dir", global = true, env = "CPAV_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Capacity(_) => EXIT_CAPACITY,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(s) | CliError::Capacity(s) => s,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_capacity() {
            CliError::Capacity(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut warnings = Vec::new();
    match dispatch(cli.command, &cli.opts, &mut warnings) {
        Ok(text) => {
            for w in warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INVALID;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command, opts: &Options, warnings: &mut Vec<String>) -> CliResult<String> {
    let cache = opts.cache_dir.as_ref().map(Cache::new);
    let ctx = Context {
        opts,
        cache: cache.as_ref(),
    };
    let format = opts.output;
    match command {
        Command::Count => ctx.count(warnings, format),
        Command::Scan => ctx.scan(warnings, format),
        Command::Overlap => ctx.overlap(format),
        Command::Bounds => ctx.bounds(format),
        Command::Rho => ctx.rho(warnings, format),
        Command::Sample => ctx.sample(format),
        Command::Census => ctx.census(format),
    }
}

struct Context<'a> {
    opts: &'a Options,
    cache: Option<&'a Cache>,
}

impl Context<'_> {
    fn pattern(&self) -> CliResult<Option<Pattern>> {
        self.opts
            .pattern
            .as_deref()
            .map(|s| s.parse::<Pattern>().map_err(CliError::from))
            .transpose()
    }

    fn require_pattern(&self) -> CliResult<Pattern> {
        self.pattern()?.map_or_else(|| invalid("--pattern is required"), Ok)
    }

    fn require_m(&self) -> CliResult<usize> {
        self.opts.m.map_or_else(|| invalid("--m is required"), Ok)
    }

    /// Count table up to `n_max`, from the cache when possible.
    fn table(&self, sigma: &Pattern, n_max: usize, warnings: &mut Vec<String>) -> CliResult<CountTable> {
        if let Some(t) = self.cache.and_then(|c| c.load(sigma, n_max)) {
            return Ok(t);
        }
        let table = count_dp(sigma, n_max)?;
        self.remember(&table, warnings);
        Ok(table)
    }

    fn remember(&self, table: &CountTable, warnings: &mut Vec<String>) {
        if let Some(c) = self.cache {
            if let Err(e) = c.store(table) {
                warnings.push(format!("cache write to {} failed: {e}", c.dir().display()));
            }
        }
    }

    fn count(&self, warnings: &mut Vec<String>, format: Format) -> CliResult<String> {
        let sigma = self.require_pattern()?;
        match (self.opts.n, self.opts.n_max) {
            (Some(n), None) => {
                let table = self.table(&sigma, n, warnings)?;
                Ok(render(
                    &CountJson {
                        pattern: sigma.to_string(),
                        n,
                        alpha: big(table.alpha(n).expect("table reaches n")),
                    },
                    format,
                ))
            }
            (None, Some(n_max)) => {
                let table = self.table(&sigma, n_max, warnings)?;
                let rows = table
                    .counts()
                    .iter()
                    .enumerate()
                    .map(|(n, a)| CountRow { n, alpha: big(a) })
                    .collect();
                Ok(render(
                    &CountTableJson {
                        pattern: sigma.to_string(),
                        n_max,
                        rows,
                    },
                    format,
                ))
            }
            (Some(_), Some(_)) => invalid("give either --n or --n-max, not both"),
            (None, None) => invalid("--n or --n-max is required"),
        }
    }

    fn scan(&self, warnings: &mut Vec<String>, format: Format) -> CliResult<String> {
        let m = self.require_m()?;
        let n = self.opts.n.map_or_else(|| invalid("--n is required"), Ok)?;
        let cache = self.cache;
        let (report, fresh) = parallel::scan(m, n, |rep| cache.and_then(|c| c.load(rep, n)))?;
        for t in &fresh {
            self.remember(t, warnings);
        }
        let names = |v: &[Pattern]| v.iter().map(Pattern::to_string).collect();
        let json = ScanJson {
            m,
            n,
            classes: report.classes,
            max_alpha: big(&report.max_alpha),
            min_alpha: big(&report.min_alpha),
            argmax: names(&report.argmax),
            argmin: names(&report.argmin),
            rows: report
                .rows
                .iter()
                .map(|r| ScanRowJson {
                    pattern: r.pattern.to_string(),
                    alpha: big(&r.alpha),
                    class_rep: r.class_rep.to_string(),
                    is_monotone: r.is_monotone,
                    max_overlap: r.max_overlap,
                })
                .collect(),
        };
        Ok(render(&json, format))
    }

    fn overlap(&self, format: Format) -> CliResult<String> {
        match (self.pattern()?, self.opts.m) {
            (Some(sigma), m) => {
                if m.is_some_and(|m| m != sigma.len()) {
                    return invalid("--m differs from the pattern length");
                }
                self.overlap_pattern(&sigma, format)
            }
            (None, Some(m)) => {
                let census = enumerate_overlap_sets(m)?;
                let lemma = if m >= 3 { Some(verify_monotone_lemma(m)?) } else { None };
                let json = OverlapCensusJson {
                    m,
                    total: census.total,
                    monotone_lemma_holds: lemma.as_ref().map(|l| l.holds()),
                    overlap_at_m_minus_1: lemma
                        .map(|l| {
                            l.patterns_with_overlap_at_m_minus_1
                                .iter()
                                .map(Pattern::to_string)
                                .collect()
                        })
                        .unwrap_or_default(),
                    rows: (1..m)
                        .map(|k| OverlapCensusRow {
                            k,
                            n_size: census.n_size(k),
                            n_fraction: census.n_fraction(k),
                            m_size: census.m_size(k),
                            m_fraction: census.m_fraction(k),
                            max_overlap_size: census.max_overlap_sizes[k - 1],
                        })
                        .collect(),
                };
                Ok(render(&json, format))
            }
            (None, None) => invalid("--pattern or --m is required"),
        }
    }

    fn overlap_pattern(&self, sigma: &Pattern, format: Format) -> CliResult<String> {
        let m = sigma.len();
        let profile = overlap_profile(sigma)?;
        let class = classify(sigma)?;
        let ks: Vec<usize> = match self.opts.k {
            Some(k) if k == 0 || k >= m => return Err(Error::InvalidOverlapPosition { m, k }.into()),
            Some(k) => vec![k],
            None => (1..m).collect(),
        };
        let mut rows = Vec::new();
        for k in ks {
            let overlap = profile.contains(k);
            let joint = joint_count(sigma, k)?;
            let forced = if overlap { forced_suffix(sigma, k)? } else { Vec::new() };
            rows.push(OverlapRow {
                k,
                overlap,
                joint_count: joint.count,
                joint_bound: joint.bound,
                joint_probability: joint.probability(),
                forced_positions: forced.iter().map(|f| f.position).collect(),
                forced_values: forced.iter().map(|f| f.value).collect(),
            });
        }
        let json = OverlapPatternJson {
            pattern: sigma.to_string(),
            m,
            overlaps: profile.overlaps().to_vec(),
            max_overlap: class.max_overlap,
            is_non_overlapping: class.is_non_overlapping,
            is_monotone: class.is_monotone,
            rows,
        };
        Ok(render(&json, format))
    }

    fn bounds(&self, format: Format) -> CliResult<String> {
        let pattern = self.pattern()?;
        let m = match (self.opts.m, &pattern) {
            (Some(m), _) => m,
            (None, Some(p)) => p.len(),
            (None, None) => return invalid("--m or --pattern is required"),
        };
        let r = bound_report(m, self.opts.k, pattern.as_ref(), self.opts.n)?;
        let lll = lll_lower(m)?;
        let cmp = if m >= 3 { Some(cmp_certificate(m)?) } else { None };
        let json = BoundsJson {
            m,
            k: r.k,
            pattern: r.pattern.as_ref().map(Pattern::to_string),
            lower_lll: r.lower_lll,
            lll_weight: lll.weight,
            upper_block: r.upper_block,
            upper_block_gap: block_upper_gap(m)?,
            upper_suen: r.upper_suen,
            upper_mk: r.upper_mk,
            n_used: r.n_used,
            suen_finite: r.suen_finite,
            flags: FlagsJson {
                lll_valid: r.flags.lll_valid,
                lll_condition: r.flags.lll_condition,
                suen_valid: r.flags.suen_valid,
                mk_valid: r.flags.mk_valid,
                suen_finite_informative: r.flags.suen_finite_informative,
            },
            cmp_certificate: cmp.map(|c| CmpJson {
                upper_gap: c.upper_gap,
                lower_gap: c.lower_gap,
                holds: c.holds,
            }),
        };
        Ok(render(&json, format))
    }

    fn rho(&self, warnings: &mut Vec<String>, format: Format) -> CliResult<String> {
        match (self.pattern()?, self.opts.m) {
            (Some(sigma), m) => {
                if m.is_some_and(|m| m != sigma.len()) {
                    return invalid("--m differs from the pattern length");
                }
                if self.opts.n.is_some() {
                    return invalid("rho takes --n-max, not --n");
                }
                let n_max = self.opts.n_max.unwrap_or(DEFAULT_RHO_N_MAX);
                if n_max < 1 {
                    return invalid("--n-max must be at least 1");
                }
                let table = self.table(&sigma, n_max, warnings)?;
                let est = rho_estimates(&table);
                let len = sigma.len();
                let kind = if sigma.is_monotone() && len >= 3 {
                    Some(SeriesKind::MonotoneG)
                } else if len >= 3 && Pattern::nakamura(len).is_ok_and(|p| p == sigma) {
                    Some(SeriesKind::Nakamura)
                } else {
                    None
                };
                let series = match kind {
                    Some(kind) if len <= SERIES_M_LIMIT => {
                        Some(root_json(&smallest_root(&SeriesSpec::new(kind, len)?)?))
                    }
                    _ => None,
                };
                let rows = table
                    .counts()
                    .iter()
                    .enumerate()
                    .map(|(n, a)| RhoRow {
                        n,
                        alpha: big(a),
                        ratio: est.ratio.get(n).copied(),
                        root: est.root[n],
                    })
                    .collect();
                Ok(render(
                    &RhoPatternJson {
                        pattern: sigma.to_string(),
                        n_max,
                        last_ratio: est.last_ratio(),
                        series,
                        rows,
                    },
                    format,
                ))
            }
            (None, Some(m)) => {
                if !(3..=SERIES_M_LIMIT).contains(&m) {
                    return invalid(format!("m = {m} is out of range (3 <= m <= {SERIES_M_LIMIT})"));
                }
                let mut rows = Vec::new();
                for kind in [
                    SeriesKind::MonotoneG,
                    SeriesKind::MonotoneMajorant,
                    SeriesKind::Nakamura,
                ] {
                    rows.push(root_json(&smallest_root(&SeriesSpec::new(kind, m)?)?));
                }
                let q = monotone_lb_quadratic(m)?;
                Ok(render(
                    &RhoSeriesJson {
                        m,
                        quadratic: QuadraticJson {
                            valid: q.valid,
                            discriminant: q.discriminant,
                            epsilon: q.epsilon_prime,
                            rho_lower: q.rho_lower,
                            approx_epsilon: q.approx_epsilon,
                        },
                        rows,
                    },
                    format,
                ))
            }
            (None, None) => invalid("--pattern or --m is required"),
        }
    }

    fn sample(&self, format: Format) -> CliResult<String> {
        let samples = self.opts.samples.unwrap_or(DEFAULT_SAMPLES);
        let seed = self.opts.seed;
        match self.pattern()? {
            Some(sigma) => {
                let n = self
                    .opts
                    .n
                    .map_or_else(|| invalid("--n is required with --pattern"), Ok)?;
                let est = parallel::mc_avoidance(&sigma, n, samples, seed)?;
                Ok(render(
                    &AvoidanceJson {
                        pattern: sigma.to_string(),
                        n,
                        samples,
                        seed,
                        avoiders: est.avoiders,
                        p_hat: est.p_hat,
                        std_err: est.std_err,
                    },
                    format,
                ))
            }
            None => {
                let m = self.require_m()?;
                let d = parallel::sample_overlap_distribution(m, samples, seed)?;
                let json = SampleJson {
                    m,
                    samples,
                    seed,
                    max_overlap_hist: d.max_overlap_hist.clone(),
                    rows: d.reports.iter().map(sample_row).collect(),
                };
                Ok(render(&json, format))
            }
        }
    }

    fn census(&self, format: Format) -> CliResult<String> {
        let m = self.require_m()?;
        let c = mk_census(m)?;
        let rows = (1..m)
            .map(|k| {
                let lemma = c.lemma_rows.iter().find(|r| r.k == k);
                CensusRow {
                    m,
                    k,
                    exact_or_sampled: "exact",
                    n_size: c.n_sizes[k - 1],
                    n_fraction: c.n_sizes[k - 1] as f64 / c.total as f64,
                    m_size: c.m_sizes[k - 1],
                    m_fraction: c.m_fractions[k - 1],
                    lemma_lower_bound: lemma.map(|r| r.lower_bound),
                    lemma_vacuous: lemma.map(|r| r.vacuous),
                    lemma_holds: lemma.map(|r| r.holds),
                }
            })
            .collect();
        Ok(render(
            &CensusJson {
                m,
                total: c.total,
                non_overlapping_fraction: c.non_overlapping_fraction,
                three_minus_e_holds: c.three_minus_e_holds,
                bona_interval: [BONA_INTERVAL.0, BONA_INTERVAL.1],
                in_bona_interval: c.in_bona_interval,
                rows,
            },
            format,
        ))
    }
}

fn root_json(r: &RootResult) -> RootJson {
    RootJson {
        kind: r.kind.name(),
        m: r.m,
        z0: r.z0,
        rho: r.rho,
        bracket_lo: r.bracket.0,
        bracket_hi: r.bracket.1,
        residual: r.residual,
        truncation_terms: r.truncation_terms,
        bisection_steps: r.widths.len(),
    }
}

fn sample_row(r: &SampleReport) -> SampleRow {
    SampleRow {
        m: r.m,
        k: r.k,
        exact_or_sampled: "sampled",
        samples: r.samples,
        hits: r.hits,
        fraction: r.fraction,
        target: r.target,
        target_kind: r.target_kind.name(),
        std_err: r.std_err,
        within_3sigma: r.within_3sigma,
    }
}

#[derive(Serialize)]
struct CountJson {
    pattern: String,
    n: usize,
    alpha: Number,
}

#[derive(Serialize)]
struct CountRow {
    n: usize,
    alpha: Number,
}

#[derive(Serialize)]
struct CountTableJson {
    pattern: String,
    n_max: usize,
    rows: Vec<CountRow>,
}

#[derive(Serialize)]
struct ScanJson {
    m: usize,
    n: usize,
    classes: usize,
    max_alpha: Number,
    min_alpha: Number,
    argmax: Vec<String>,
    argmin: Vec<String>,
    rows: Vec<ScanRowJson>,
}

#[derive(Serialize)]
struct ScanRowJson {
    pattern: String,
    alpha: Number,
    class_rep: String,
    is_monotone: bool,
    max_overlap: usize,
}

#[derive(Serialize)]
struct OverlapPatternJson {
    pattern: String,
    m: usize,
    overlaps: Vec<usize>,
    max_overlap: usize,
    is_non_overlapping: bool,
    is_monotone: bool,
    rows: Vec<OverlapRow>,
}

#[derive(Serialize)]
struct OverlapRow {
    k: usize,
    overlap: bool,
    joint_count: u64,
    joint_bound: u64,
    joint_probability: f64,
    forced_positions: Vec<usize>,
    forced_values: Vec<u32>,
}

#[derive(Serialize)]
struct OverlapCensusJson {
    m: usize,
    total: u64,
    monotone_lemma_holds: Option<bool>,
    overlap_at_m_minus_1: Vec<String>,
    rows: Vec<OverlapCensusRow>,
}

#[derive(Serialize)]
struct OverlapCensusRow {
    k: usize,
    n_size: u64,
    n_fraction: f64,
    m_size: u64,
    m_fraction: f64,
    max_overlap_size: u64,
}

#[derive(Serialize)]
struct BoundsJson {
    m: usize,
    k: Option<usize>,
    pattern: Option<String>,
    lower_lll: f64,
    lll_weight: f64,
    upper_block: f64,
    upper_block_gap: f64,
    upper_suen: Option<f64>,
    upper_mk: Option<f64>,
    n_used: Option<usize>,
    suen_finite: Option<f64>,
    flags: FlagsJson,
    cmp_certificate: Option<CmpJson>,
}

#[derive(Serialize)]
struct FlagsJson {
    lll_valid: bool,
    lll_condition: bool,
    suen_valid: Option<bool>,
    mk_valid: Option<bool>,
    suen_finite_informative: Option<bool>,
}

#[derive(Serialize)]
struct CmpJson {
    upper_gap: f64,
    lower_gap: Option<f64>,
    holds: bool,
}

#[derive(Serialize)]
struct RootJson {
    kind: &'static str,
    m: usize,
    z0: f64,
    rho: f64,
    bracket_lo: f64,
    bracket_hi: f64,
    residual: f64,
    truncation_terms: usize,
    bisection_steps: usize,
}

#[derive(Serialize)]
struct RhoRow {
    n: usize,
    alpha: Number,
    ratio: Option<f64>,
    root: f64,
}

#[derive(Serialize)]
struct RhoPatternJson {
    pattern: String,
    n_max: usize,
    last_ratio: Option<f64>,
    series: Option<RootJson>,
    rows: Vec<RhoRow>,
}

#[derive(Serialize)]
struct QuadraticJson {
    valid: bool,
    discriminant: f64,
    epsilon: Option<f64>,
    rho_lower: Option<f64>,
    approx_epsilon: f64,
}

#[derive(Serialize)]
struct RhoSeriesJson {
    m: usize,
    quadratic: QuadraticJson,
    rows: Vec<RootJson>,
}

#[derive(Serialize)]
struct AvoidanceJson {
    pattern: String,
    n: usize,
    samples: u64,
    seed: u64,
    avoiders: u64,
    p_hat: f64,
    std_err: f64,
}

#[derive(Serialize)]
struct SampleRow {
    m: usize,
    k: usize,
    exact_or_sampled: &'static str,
    samples: u64,
    hits: u64,
    fraction: f64,
    target: f64,
    target_kind: &'static str,
    std_err: f64,
    within_3sigma: bool,
}

#[derive(Serialize)]
struct SampleJson {
    m: usize,
    samples: u64,
    seed: u64,
    max_overlap_hist: Vec<u64>,
    rows: Vec<SampleRow>,
}

#[derive(Serialize)]
struct CensusRow {
    m: usize,
    k: usize,
    exact_or_sampled: &'static str,
    n_size: u64,
    n_fraction: f64,
    m_size: u64,
    m_fraction: f64,
    lemma_lower_bound: Option<f64>,
    lemma_vacuous: Option<bool>,
    lemma_holds: Option<bool>,
}

#[derive(Serialize)]
struct CensusJson {
    m: usize,
    total: u64,
    non_overlapping_fraction: f64,
    three_minus_e_holds: bool,
    bona_interval: [f64; 2],
    in_bona_interval: bool,
    rows: Vec<CensusRow>,
}
