//! Command-line surface: argument parsing, command dispatch, caching,
//! and output formatting.

use std::ffi::OsString;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::brauer::{diamond_constituents, verify_ss_report};
use crate::error::{Error, Result};
use crate::gf::FieldTower;
use crate::invariants::{default_sweep, verify_lemma, LemmaId, LemmaPoint};
use crate::meataxe::composition_factors;
use crate::modrep::{induced_module, WeightLabel};
use crate::morphisms::exceptional_case;
use crate::quadfield::{eisenstein_eigenvalue, make_field, reduced_forms, splitting, Splitting};
use crate::report::{
    apply_config, parse_config, Cache, CacheKey, OutputFormat, Report, ResultEntry, RunConfig,
    Status, CACHE_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brauer,
    Meataxe,
    Both,
}

impl Method {
    fn as_str(self) -> &'static str {
        match self {
            Method::Brauer => "brauer",
            Method::Meataxe => "meataxe",
            Method::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "weightred", version, about = "Finite-level weight-reduction verifier")]
pub struct Cli {
    /// Key=value configuration file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub strict: bool,

    /// Worker count for sweeps; 1 forces serial execution.
    #[arg(long, global = true)]
    pub parallel: Option<u32>,

    #[arg(long, global = true)]
    pub cache_dir: Option<String>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Include wall-clock timing in the report (breaks byte-identical
    /// output across runs by design).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose U^e_d into irreducible constituents.
    Decompose {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        e: u32,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// Character-level semisimplification sweep.
    CheckDiamond {
        #[arg(long)]
        p: u32,
        /// Sweep every d with a fixed e-sample.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long, default_value_t = 0)]
        e: u32,
    },
    /// Fixed-space dimensions against the lemma predictions.
    Invariants {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        lemma: String,
        #[arg(long)]
        f: u32,
        /// Use the built-in deterministic sweep for the lemma.
        #[arg(long)]
        all: bool,
        /// Optional discriminant: its class number scales reported totals.
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<i64>,
    },
    /// The exceptional (r,s) = (1, p-2) construction and its mirror.
    Exceptional {
        #[arg(long)]
        p: u32,
        /// 1 for (1, p-2), 2 for (p-2, 1).
        #[arg(long, default_value_t = 1)]
        case: u8,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value_t = 0)]
        t: u32,
    },
    /// Imaginary quadratic field arithmetic.
    Field {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
    },
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let rendered = match report.config.format {
                OutputFormat::Json => report.to_json().unwrap_or_else(|e| e.to_string()),
                OutputFormat::Csv => report.to_csv(),
                OutputFormat::Text => report.to_text(),
            };
            println!("{rendered}");
            if report.all_passed() {
                0
            } else {
                1
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotPrime(_)
        | Error::TooSmall(_)
        | Error::StrictViolation(_)
        | Error::WeightOutOfRange { .. }
        | Error::DegreeOutOfRange { .. }
        | Error::BadUnitOrder(_)
        | Error::UnknownLemma(_)
        | Error::NonNegative(_)
        | Error::BadResidue(_)
        | Error::NotFundamental(_)
        | Error::Ramified(_)
        | Error::BadConfig(_) => 2,
        _ => 3,
    }
}

/// Builds the effective RunConfig (defaults, then config file, then
/// flags) and runs the command.
pub fn execute(cli: &Cli) -> Result<Report> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        apply_config(&mut cfg, &parse_config(&text)?)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.strict = cfg.strict || cli.strict;
    if let Some(par) = cli.parallel {
        cfg.parallel = par.max(1);
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Text => OutputFormat::Text,
        };
    }

    let start = Instant::now();
    let mut report = match &cli.cmd {
        Command::Decompose { p, d, e, method } => {
            cfg.p = *p;
            cmd_decompose(&cfg, *d, *e, *method)?
        }
        Command::CheckDiamond { p, all, d, e } => {
            cfg.p = *p;
            cmd_check_diamond(&cfg, *all, *d, *e)?
        }
        Command::Invariants {
            p,
            lemma,
            f,
            all,
            disc,
        } => {
            cfg.p = *p;
            cfg.discriminant = disc.or(cfg.discriminant);
            cmd_invariants(&cfg, lemma, *f, *all)?
        }
        Command::Exceptional { p, case, l, t } => {
            cfg.p = *p;
            cmd_exceptional(&cfg, *case, *l, *t)?
        }
        Command::Field { disc, primes } => {
            cfg.discriminant = Some(*disc);
            cmd_field(&cfg, *disc, primes)?
        }
    };
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

fn label_json(l: &WeightLabel) -> serde_json::Value {
    json!({"r": l.r, "s": l.s, "e": l.e, "dim": l.dim()})
}

fn labels_json(labels: &[WeightLabel]) -> serde_json::Value {
    serde_json::Value::Array(labels.iter().map(label_json).collect())
}

fn open_cache(cfg: &RunConfig) -> Result<Option<Cache>> {
    match Cache::resolve(cfg.cache_dir.as_deref()) {
        Some(dir) => Ok(Some(Cache::open(&dir)?)),
        None => Ok(None),
    }
}

pub fn cmd_decompose(cfg: &RunConfig, d: u32, e: u32, method: Method) -> Result<Report> {
    let t = FieldTower::build(cfg.p, cfg.strict)?;
    if d > t.q - 2 {
        return Err(Error::DegreeOutOfRange {
            d: d as i64,
            max: t.q - 2,
        });
    }
    let key = CacheKey {
        p: cfg.p,
        d,
        e,
        method: method.as_str().to_string(),
        seed: cfg.seed,
        version: CACHE_VERSION,
    };
    let cache = open_cache(cfg)?;
    if let Some(cache) = &cache {
        match cache.get(&key) {
            Ok(Some(payload)) => {
                let results: Vec<ResultEntry> = serde_json::from_value(payload)?;
                let mut report = Report::new("decompose", cfg.clone(), results);
                report.cache_hit = true;
                return Ok(report);
            }
            Ok(None) => {}
            Err(err) => {
                eprintln!("warning: {err}; recomputing");
                cache.evict(&key);
            }
        }
    }

    let mut results = Vec::new();
    let (r, s) = (d % t.p, d / t.p);
    let mut by_char: Option<Vec<WeightLabel>> = None;
    let mut by_spin: Option<Vec<WeightLabel>> = None;
    if method != Method::Meataxe {
        let mut labels = diamond_constituents(&t, r, s, e)?;
        labels.sort();
        let failing = verify_ss_report(&t, d, e)?;
        results.push(ResultEntry::check(
            "character_check",
            failing.is_none(),
            match &failing {
                None => json!({"classes_checked": "all p-regular"}),
                Some(c) => json!({"first_failing_class": format!("{c:?}")}),
            },
        ));
        results.push(ResultEntry::new(
            "constituents",
            Status::Pass,
            json!({
                "labels": labels_json(&labels),
                "total_dim": labels.iter().map(|l| l.dim()).sum::<usize>(),
            }),
        ));
        by_char = Some(labels);
    }
    if method != Method::Brauer {
        let m = Arc::new(induced_module(&t, d, e)?);
        let factors = composition_factors(&t, &m, cfg.seed)?;
        results.push(ResultEntry::new(
            "meataxe_factors",
            Status::Pass,
            json!({
                "labels": labels_json(&factors),
                "total_dim": factors.iter().map(|l| l.dim()).sum::<usize>(),
            }),
        ));
        by_spin = Some(factors);
    }
    if let (Some(a), Some(b)) = (&by_char, &by_spin) {
        results.push(ResultEntry::check(
            "agreement",
            a == b,
            json!({"methods": ["brauer", "meataxe"]}),
        ));
    }

    if let Some(cache) = &cache {
        cache.put(&key, &serde_json::to_value(&results)?)?;
    }
    Ok(Report::new("decompose", cfg.clone(), results))
}

/// Runs `job` over `items` preserving order, in parallel when asked.
fn run_sweep<I, O, F>(parallel: u32, items: Vec<I>, job: F) -> Result<Vec<O>>
where
    I: Send + Sync,
    O: Send,
    F: Fn(&I) -> Result<O> + Send + Sync,
{
    use rayon::prelude::*;
    if parallel <= 1 {
        items.iter().map(&job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel as usize)
            .build()
            .map_err(|e| Error::BadConfig(format!("thread pool: {e}")))?;
        pool.install(|| items.par_iter().map(&job).collect())
    }
}

pub fn cmd_check_diamond(cfg: &RunConfig, all: bool, d: Option<u32>, e: u32) -> Result<Report> {
    let t = FieldTower::build(cfg.p, cfg.strict)?;
    let mut cells = Vec::new();
    if all {
        let mut es = vec![0, 1, (t.q - 1) / 3, t.q - 2];
        es.dedup();
        for d in 0..=(t.q - 2) {
            for &e in &es {
                cells.push((d, e));
            }
        }
    } else {
        let d = d.ok_or_else(|| Error::BadConfig("need --d or --all".into()))?;
        if d > t.q - 2 {
            return Err(Error::DegreeOutOfRange {
                d: d as i64,
                max: t.q - 2,
            });
        }
        cells.push((d, e));
    }
    let results = run_sweep(cfg.parallel, cells, |&(d, e)| {
        let failing = verify_ss_report(&t, d, e)?;
        Ok(ResultEntry::check(
            format!("d={d} e={e}"),
            failing.is_none(),
            match &failing {
                None => serde_json::Value::Null,
                Some(c) => json!({"first_failing_class": format!("{c:?}")}),
            },
        ))
    })?;
    Ok(Report::new("check-diamond", cfg.clone(), results))
}

pub fn cmd_invariants(cfg: &RunConfig, lemma: &str, f: u32, all: bool) -> Result<Report> {
    let t = FieldTower::build(cfg.p, cfg.strict)?;
    let case: LemmaId = lemma.parse()?;
    let points = if all {
        default_sweep(&t, case)
    } else {
        // a small smoke subset of the full sweep
        let full = default_sweep(&t, case);
        full.into_iter().take(8).collect()
    };
    let h = match cfg.discriminant {
        Some(d) => make_field(d)?.h,
        None => 1,
    };
    // chunk the sweep so parallel workers stay busy without sharing
    let chunks: Vec<Vec<LemmaPoint>> = points.chunks(16).map(|c| c.to_vec()).collect();
    let nested = run_sweep(cfg.parallel, chunks, |chunk| {
        verify_lemma(&t, case, f, chunk, h, cfg.strict)
    })?;
    let results = nested
        .into_iter()
        .flatten()
        .map(|r| {
            ResultEntry::check(
                format!("{:?} {:?} {}", r.case, r.point, r.group),
                r.matched,
                serde_json::to_value(&r).unwrap_or(serde_json::Value::Null),
            )
        })
        .collect();
    Ok(Report::new("invariants", cfg.clone(), results))
}

pub fn cmd_exceptional(cfg: &RunConfig, case: u8, l: u32, tt: u32) -> Result<Report> {
    let t = FieldTower::build(cfg.p, cfg.strict)?;
    let mut results = Vec::new();
    match case {
        1 => {
            let ex = exceptional_case(&t, l, tt, cfg.strict)?;
            let expect_m = ((t.p - 1) * (t.p - 1) + 1) as usize;
            results.push(ResultEntry::check(
                "monomial_dim",
                ex.dim_m == expect_m,
                json!({"computed": ex.dim_m, "expected": expect_m}),
            ));
            results.push(ResultEntry::check(
                "fixed_class",
                ex.fixed_ok,
                serde_json::Value::Null,
            ));
            results.push(ResultEntry::check(
                "exact_sequence",
                ex.seq.ok,
                json!({
                    "injective": ex.seq.injective,
                    "surjective": ex.seq.surjective,
                    "nodes": ex.seq.nodes,
                    "dims": [ex.m_mod_v.dim + 1, ex.w.dim, ex.tail.dim],
                }),
            ));
            results.push(ResultEntry::new(
                "labels",
                Status::Pass,
                json!({
                    "head": label_json(&ex.head_label),
                    "middle": label_json(&ex.mv_label),
                    "tail": label_json(&ex.tail_label),
                }),
            ));
        }
        2 => {
            // the mirror pattern is covered by its divisibility law
            let points: Vec<LemmaPoint> = (0..(t.q - 1))
                .map(|e| LemmaPoint::WPattern {
                    r: t.p - 2,
                    s: 1,
                    e,
                })
                .collect();
            for r in verify_lemma(&t, LemmaId::Lem2_3_7, 2, &points, 1, cfg.strict)? {
                results.push(ResultEntry::check(
                    format!("{:?} {}", r.point, r.group),
                    r.matched,
                    serde_json::to_value(&r).unwrap_or(serde_json::Value::Null),
                ));
            }
        }
        other => {
            return Err(Error::BadConfig(format!("unknown case {other}")));
        }
    }
    Ok(Report::new("exceptional", cfg.clone(), results))
}

pub fn cmd_field(cfg: &RunConfig, disc: i64, primes: &[u64]) -> Result<Report> {
    let k = make_field(disc)?;
    let mut results = vec![
        ResultEntry::new(
            "class_number",
            Status::Pass,
            json!({"h": k.h, "reduced_forms": reduced_forms(disc)}),
        ),
        ResultEntry::new("unit_order", Status::Pass, json!({"f": k.f})),
    ];
    for &l in primes {
        let s = splitting(&k, l);
        let detail = match s {
            Splitting::Inert => json!({
                "splitting": "inert",
                "norm": l * l,
                "eisenstein": eisenstein_eigenvalue(l * l),
            }),
            Splitting::Split => json!({
                "splitting": "split",
                "norm": l,
                "eisenstein": eisenstein_eigenvalue(l),
            }),
            Splitting::Ramified => json!({"splitting": "ramified"}),
        };
        results.push(ResultEntry::new(format!("l={l}"), Status::Pass, detail));
    }
    Ok(Report::new("field", cfg.clone(), results))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn decompose_small() {
        let cli = parse(&[
            "weightred",
            "decompose",
            "--p",
            "5",
            "--d",
            "0",
            "--e",
            "0",
        ]);
        let report = execute(&cli).unwrap();
        assert!(report.all_passed());
        let dims: Vec<u64> = report
            .results
            .iter()
            .find(|r| r.name == "constituents")
            .unwrap()
            .detail["labels"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| l["dim"].as_u64().unwrap())
            .collect();
        assert_eq!(dims, vec![1, 25]);
        assert!(report
            .results
            .iter()
            .any(|r| r.name == "agreement" && r.status == Status::Pass));
    }

    #[test]
    fn bad_degree_is_usage_error() {
        let cli = parse(&[
            "weightred",
            "decompose",
            "--p",
            "5",
            "--d",
            "99",
        ]);
        let err = execute(&cli).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn cache_hit_on_second_run() {
        let dir = tempfile::tempdir().unwrap();
        let args = [
            "weightred",
            "decompose",
            "--p",
            "5",
            "--d",
            "3",
            "--method",
            "brauer",
            "--cache-dir",
            dir.path().to_str().unwrap(),
        ];
        let first = execute(&parse(&args)).unwrap();
        assert!(!first.cache_hit);
        let second = execute(&parse(&args)).unwrap();
        assert!(second.cache_hit);
        assert_eq!(
            serde_json::to_value(&first.results).unwrap(),
            serde_json::to_value(&second.results).unwrap()
        );
    }

    #[test]
    fn check_diamond_single_cell() {
        let cli = parse(&[
            "weightred",
            "check-diamond",
            "--p",
            "5",
            "--d",
            "7",
        ]);
        let report = execute(&cli).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.results.len(), 1);
    }

    #[test]
    fn field_report() {
        let cli = parse(&[
            "weightred",
            "field",
            "--disc",
            "-23",
            "--primes",
            "2,3,5,7",
        ]);
        let report = execute(&cli).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.results[0].detail["h"], json!(3));
        assert_eq!(report.results.len(), 6);
    }

    #[test]
    fn json_output_is_deterministic() {
        let cli = parse(&[
            "weightred",
            "decompose",
            "--p",
            "5",
            "--d",
            "6",
            "--seed",
            "9",
        ]);
        let a = execute(&cli).unwrap().to_json().unwrap();
        let b = execute(&cli).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("timing_ms"));
    }

    #[test]
    fn invariants_smoke() {
        let cli = parse(&[
            "weightred",
            "invariants",
            "--p",
            "5",
            "--lemma",
            "lem2",
            "--f",
            "2",
        ]);
        let report = execute(&cli).unwrap();
        assert!(report.all_passed());
        assert!(!report.results.is_empty());
    }

    #[test]
    fn parallel_matches_serial() {
        let base = [
            "weightred",
            "check-diamond",
            "--p",
            "5",
            "--all",
        ];
        let serial = execute(&parse(&base)).unwrap();
        let mut par_args: Vec<&str> = base.to_vec();
        par_args.extend(["--parallel", "2"]);
        let mut parallel = execute(&parse(&par_args)).unwrap();
        // configs legitimately differ in the parallel field
        parallel.config.parallel = serial.config.parallel;
        assert_eq!(
            serde_json::to_value(&serial.results).unwrap(),
            serde_json::to_value(&parallel.results).unwrap()
        );
    }
}
