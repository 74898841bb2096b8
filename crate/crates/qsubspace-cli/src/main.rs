//! Command-line front door for the subspace-code toolkit: construct base
//! codes, augment them by clique search, verify distance properties, run
//! the combination construction and its iterated series, and evaluate the
//! bound catalog.
//!
//! Exit codes: 0 on success, 1 when a verification fails (including
//! duplicate codewords), 2 on usage errors. Every run prints its
//! effective configuration as a `#`-prefixed header on stderr; every
//! failure carries a machine-readable error code on stderr. All
//! construction logic lives in the library; this binary only wires files
//! and flags to library calls.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use qsubspace::{
    auto_s_prime, bound_catalog, bound_value, bounds_for, combine, exact_augment, expurgate6,
    expurgate7, gabidulin, greedy_augment, lift, lift_transpose, series, series_base_from_code,
    series_size_formula, standard_base, Augmentation, CombineSpec, ConstantDimensionCode, Error,
    Field, SeriesBase, Strategy, VerifyMode, VerifyReport, DEFAULT_ENUMERATION_CAP,
};

#[derive(Parser)]
#[command(
    name = "qsubspace",
    version,
    about = "constant dimension subspace code toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a base code and write it as a .cdc file.
    Construct {
        /// Construction to run.
        #[arg(long, value_enum)]
        kind: Kind,
        /// Field order (a prime power).
        #[arg(long)]
        q: u64,
        /// Ambient dimension (required for lifted-mrd).
        #[arg(long)]
        v: Option<usize>,
        /// Codeword dimension (required for lifted-mrd).
        #[arg(long)]
        k: Option<usize>,
        /// Minimum subspace distance (required for lifted-mrd; even).
        #[arg(long)]
        d: Option<usize>,
        /// Output .cdc file; polynomial-backed codes also get a .poly sidecar.
        #[arg(long)]
        out: PathBuf,
    },
    /// Grow a code by compatible planes (greedy or exact clique search).
    Augment {
        /// Input .cdc file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Search mode.
        #[arg(long, value_enum)]
        mode: AugmentMode,
        /// RNG seed for greedy restarts.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Greedy restart count.
        #[arg(long, default_value_t = 100)]
        restarts: u32,
        /// Exact-search time budget in seconds.
        #[arg(long, default_value_t = 300)]
        budget: u64,
        /// Output .cdc file (with an audit comment line).
        #[arg(long)]
        out: PathBuf,
    },
    /// Check pairwise subspace distances and report statistics.
    Verify {
        /// Input .cdc file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Maximum allowed pairwise intersection dimension.
        #[arg(long, default_value_t = 1)]
        threshold: usize,
        /// `exhaustive` or `sampled:N`.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// RNG seed for sampled mode.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the combination construction on two codes.
    Combine {
        /// Outer code C1 (.cdc file).
        #[arg(long)]
        c1: PathBuf,
        /// Indices of a pairwise disjoint clique in C1 (text file).
        #[arg(long)]
        clique1: PathBuf,
        /// Inner code C2 (.cdc file).
        #[arg(long)]
        c2: PathBuf,
        /// `auto` (canonical selection) or a C2 codeword index.
        #[arg(long, default_value = "auto")]
        sprime: String,
        /// Copy strategy for clique members.
        #[arg(long, value_enum, default_value_t = CliStrategy::Literal)]
        strategy: CliStrategy,
        /// Output .cdc file.
        #[arg(long)]
        out: PathBuf,
        /// Write the audit log to this file.
        #[arg(long)]
        audit: Option<PathBuf>,
        /// RNG seed for sampled verification of large outputs.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Iterate the combination construction from a base code.
    Series {
        /// Number of combination steps.
        #[arg(long)]
        t: usize,
        /// Field order (a prime power).
        #[arg(long)]
        q: u64,
        /// Base .cdc file; without it the standard base is derived (q=2 only).
        #[arg(long)]
        base: Option<PathBuf>,
        /// Output .cdc file for the final code.
        #[arg(long)]
        out: PathBuf,
        /// RNG seed for sampled verification of large outputs.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Evaluate a named cardinality bound from the catalog.
    Bounds {
        /// Catalog entry name.
        #[arg(long)]
        name: String,
        /// Field order to evaluate at.
        #[arg(long)]
        q: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    LiftedMrd,
    Expurgate6,
    Expurgate7,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::LiftedMrd => "lifted-mrd",
            Kind::Expurgate6 => "expurgate6",
            Kind::Expurgate7 => "expurgate7",
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum AugmentMode {
    Greedy,
    Exact,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum CliStrategy {
    Literal,
    BestPerCodeword,
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type CliResult = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = init_threads();
    match dispatch(cli.command, threads) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error code=Usage {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            let exit = if matches!(e, Error::DuplicateCodeword(_, _)) {
                1
            } else {
                2
            };
            eprintln!("error code={} {e}", e.code());
            ExitCode::from(exit)
        }
    }
}

/// Worker count: QSUBSPACE_THREADS when set, otherwise the machine's
/// available parallelism. All parallelism lives inside the library.
fn init_threads() -> usize {
    let threads = std::env::var("QSUBSPACE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    threads
}

fn dispatch(command: Command, threads: usize) -> CliResult {
    match command {
        Command::Construct {
            kind,
            q,
            v,
            k,
            d,
            out,
        } => run_construct(kind, q, v, k, d, &out, threads),
        Command::Augment {
            input,
            mode,
            seed,
            restarts,
            budget,
            out,
        } => run_augment(&input, mode, seed, restarts, budget, &out, threads),
        Command::Verify {
            input,
            threshold,
            mode,
            seed,
            report,
        } => run_verify(&input, threshold, &mode, seed, report.as_deref(), threads),
        Command::Combine {
            c1,
            clique1,
            c2,
            sprime,
            strategy,
            out,
            audit,
            seed,
        } => run_combine(
            &c1,
            &clique1,
            &c2,
            &sprime,
            strategy,
            &out,
            audit.as_deref(),
            seed,
            threads,
        ),
        Command::Series {
            t,
            q,
            base,
            out,
            seed,
        } => run_series(t, q, base.as_deref(), &out, seed, threads),
        Command::Bounds { name, q } => run_bounds(&name, q, threads),
    }
}

fn field_from_order(q: u64) -> Result<Field, Failure> {
    if !(2..=1 << 20).contains(&q) {
        return Err(usage(format!(
            "q={q} is not a prime power in the supported range"
        )));
    }
    let p = (2..=q)
        .find(|p| q.is_multiple_of(*p))
        .expect("q >= 2 has a divisor");
    let mut e = 0u32;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(usage(format!("q={q} is not a prime power")));
    }
    Ok(Field::new(p as u32, e)?)
}

fn fmt_opt(x: Option<usize>) -> String {
    x.map_or_else(|| "-".into(), |x| x.to_string())
}

fn run_construct(
    kind: Kind,
    q: u64,
    v: Option<usize>,
    k: Option<usize>,
    d: Option<usize>,
    out: &Path,
    threads: usize,
) -> CliResult {
    eprintln!(
        "# qsubspace construct kind={} q={q} v={} k={} d={} out={} threads={threads} cap={}",
        kind.label(),
        fmt_opt(v),
        fmt_opt(k),
        fmt_opt(d),
        out.display(),
        DEFAULT_ENUMERATION_CAP,
    );
    let field = field_from_order(q)?;
    let expect_shape = |v: Option<usize>,
                        k: Option<usize>,
                        d: Option<usize>,
                        shape: (usize, usize, usize)| {
        let (ev, ek, ed) = shape;
        if v.is_some_and(|v| v != ev) || k.is_some_and(|k| k != ek) || d.is_some_and(|d| d != ed) {
            Err(usage(format!(
                "this construction is fixed at v={ev} k={ek} d={ed}"
            )))
        } else {
            Ok(())
        }
    };
    let (code, clique, sidecar) = match kind {
        Kind::LiftedMrd => {
            let (Some(v), Some(k), Some(d)) = (v, k, d) else {
                return Err(usage("lifted-mrd requires --v, --k and --d"));
            };
            if k == 0 || k >= v {
                return Err(usage(format!("need 0 < k < v, got k={k} v={v}")));
            }
            if d == 0 || d % 2 != 0 {
                return Err(usage(format!(
                    "subspace distance must be a positive even number, got d={d}"
                )));
            }
            let dr = d / 2;
            if k <= v - k {
                let gc = lift(&gabidulin(&field, k, v - k, dr)?)?;
                let clique = gc.monomial_clique()?;
                let sidecar = gc.poly_sidecar()?;
                (gc.into_code(), Some(clique), Some(sidecar))
            } else {
                (
                    lift_transpose(&gabidulin(&field, v - k, k, dr)?)?,
                    None,
                    None,
                )
            }
        }
        Kind::Expurgate6 => {
            expect_shape(v, k, d, (6, 3, 4))?;
            let (gc, clique) = expurgate6(&field)?;
            let sidecar = gc.poly_sidecar()?;
            (gc.into_code(), Some(clique), Some(sidecar))
        }
        Kind::Expurgate7 => {
            expect_shape(v, k, d, (7, 3, 4))?;
            let (gc, clique) = expurgate7(&field)?;
            let sidecar = gc.poly_sidecar()?;
            (gc.into_code(), Some(clique), Some(sidecar))
        }
    };
    code.write_file(out)?;
    if let Some(sidecar) = sidecar {
        std::fs::write(out.with_extension("poly"), sidecar).map_err(Error::from)?;
    }
    println!("n={} v={} k={}", code.len(), code.ambient_dim(), code.dim());
    if let Some(clique) = clique {
        println!("clique_size={}", clique.len());
        println!(
            "clique={}",
            clique
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
    }
    Ok(0)
}

fn run_augment(
    input: &Path,
    mode: AugmentMode,
    seed: u64,
    restarts: u32,
    budget: u64,
    out: &Path,
    threads: usize,
) -> CliResult {
    let mode_label = match mode {
        AugmentMode::Greedy => "greedy",
        AugmentMode::Exact => "exact",
    };
    eprintln!(
        "# qsubspace augment in={} mode={mode_label} seed={seed} restarts={restarts} \
         budget={budget} out={} threads={threads} cap={}",
        input.display(),
        out.display(),
        DEFAULT_ENUMERATION_CAP,
    );
    let code = ConstantDimensionCode::read_file(input)?;
    let Augmentation {
        code: augmented,
        added,
        optimal,
    } = match mode {
        AugmentMode::Greedy => greedy_augment(&code, restarts, seed)?,
        AugmentMode::Exact => exact_augment(&code, Duration::from_secs(budget))?,
    };
    let audit = format!(
        "# augmented: base={} added={} optimal={optimal} seed={seed}\n",
        code.len(),
        added.len()
    );
    std::fs::write(out, audit + &augmented.to_cdc_string()).map_err(Error::from)?;
    println!(
        "n={} added={} optimal={optimal}",
        augmented.len(),
        added.len()
    );
    Ok(0)
}

fn parse_verify_mode(mode: &str, seed: u64) -> Result<VerifyMode, Failure> {
    if mode == "exhaustive" {
        return Ok(VerifyMode::Exhaustive);
    }
    if let Some(n) = mode.strip_prefix("sampled:") {
        let pairs: u64 = n
            .parse()
            .map_err(|_| usage(format!("bad sample count {n:?} in --mode")))?;
        return Ok(VerifyMode::Sampled { pairs, seed });
    }
    Err(usage(format!(
        "--mode must be `exhaustive` or `sampled:N`, got {mode:?}"
    )))
}

/// Bound-catalog lines for a verified code: one `bound` line per catalog
/// entry matching the code's `(v, d, k)` at its field order.
fn bound_lines(code: &ConstantDimensionCode, report: &VerifyReport) -> String {
    let k = code.dim();
    if report.threshold >= k {
        return String::new();
    }
    let d = 2 * (k - report.threshold);
    let q = u64::from(code.field().order());
    let mut out = String::new();
    for entry in bounds_for(code.ambient_dim() as u32, d as u32, k as u32) {
        let value = bound_value(entry.name, q).expect("catalog names evaluate");
        out.push_str(&format!(
            "bound {} value={value} code_n={}\n",
            entry.name,
            code.len()
        ));
    }
    out
}

fn run_verify(
    input: &Path,
    threshold: usize,
    mode: &str,
    seed: u64,
    report_path: Option<&Path>,
    threads: usize,
) -> CliResult {
    eprintln!(
        "# qsubspace verify in={} threshold={threshold} mode={mode} seed={seed} \
         threads={threads}",
        input.display(),
    );
    let code = ConstantDimensionCode::read_file(input)?;
    let mode = parse_verify_mode(mode, seed)?;
    let report = code.verify(threshold, mode)?;
    let mut text = report.render();
    text.push_str(&code.stats(&report).render());
    text.push_str(&bound_lines(&code, &report));
    print!("{text}");
    if let Some(path) = report_path {
        std::fs::write(path, &text).map_err(Error::from)?;
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn read_indices(path: &Path) -> Result<Vec<usize>, Failure> {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split([' ', ',', '\t']).filter(|t| !t.is_empty()) {
            let i: usize = tok.parse().map_err(|_| {
                Failure::Lib(Error::ParseError {
                    line: no + 1,
                    msg: format!("bad index {tok:?}"),
                })
            })?;
            out.push(i);
        }
    }
    Ok(out)
}

/// Exhaustive verification up to 10^8 pairs, seeded sampling of 10^7
/// pairs beyond that.
fn output_verify_mode(n: usize, seed: u64) -> VerifyMode {
    let pairs = n as u128 * (n as u128 - 1) / 2;
    if pairs <= 100_000_000 {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled {
            pairs: 10_000_000,
            seed,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_combine(
    c1_path: &Path,
    clique1_path: &Path,
    c2_path: &Path,
    sprime: &str,
    strategy: CliStrategy,
    out: &Path,
    audit_path: Option<&Path>,
    seed: u64,
    threads: usize,
) -> CliResult {
    let strategy = match strategy {
        CliStrategy::Literal => Strategy::Literal,
        CliStrategy::BestPerCodeword => Strategy::BestPerCodeword,
    };
    eprintln!(
        "# qsubspace combine c1={} clique1={} c2={} sprime={sprime} strategy={} out={} \
         seed={seed} threads={threads}",
        c1_path.display(),
        clique1_path.display(),
        c2_path.display(),
        strategy.label(),
        out.display(),
    );
    let c1 = ConstantDimensionCode::read_file(c1_path)?;
    let c2 = ConstantDimensionCode::read_file(c2_path)?;
    let clique1 = read_indices(clique1_path)?;
    let s_index = if sprime == "auto" {
        auto_s_prime(&c2)?
    } else {
        let i: usize = sprime.parse().map_err(|_| {
            usage(format!(
                "--sprime must be `auto` or an index, got {sprime:?}"
            ))
        })?;
        if i >= c2.len() {
            return Err(usage(format!(
                "--sprime index {i} is out of range for a code of {} codewords",
                c2.len()
            )));
        }
        i
    };
    let report = combine(CombineSpec {
        c1,
        clique1,
        c2: c2.clone(),
        s_prime: c2.codeword(s_index).clone(),
        strategy,
    })?;
    report.output.write_file(out)?;
    if let Some(path) = audit_path {
        std::fs::write(path, report.render_audit()).map_err(Error::from)?;
    }
    let check = report
        .output
        .verify(1, output_verify_mode(report.output.len(), seed))?;
    println!(
        "predicted={} actual={} min_distance={}",
        report.predicted, report.actual, check.min_distance
    );
    Ok(if check.ok() { 0 } else { 1 })
}

fn run_series(
    t: usize,
    q: u64,
    base_path: Option<&Path>,
    out: &Path,
    seed: u64,
    threads: usize,
) -> CliResult {
    eprintln!(
        "# qsubspace series t={t} q={q} base={} out={} seed={seed} threads={threads}",
        base_path.map_or_else(|| "-".into(), |p| p.display().to_string()),
        out.display(),
    );
    let field = field_from_order(q)?;
    let base: SeriesBase = match base_path {
        Some(path) => {
            let code = ConstantDimensionCode::read_file(path)?;
            if u64::from(code.field().order()) != q {
                return Err(usage(format!(
                    "base field order {} does not match --q {q}",
                    code.field().order()
                )));
            }
            series_base_from_code(code, None)?
        }
        None => standard_base(&field)?,
    };
    let result = series(t, &base)?;
    result.code.write_file(out)?;
    let check = result
        .code
        .verify(1, output_verify_mode(result.code.len(), seed))?;
    let q128 = q as u128;
    let standard_shape = base.code.len() as u128 == q128.pow(6) + 2 * q128 * q128 + 2 * q128 + 1
        && base.clique.len() as u128 == q128.pow(3) - 1;
    let formula = if standard_shape {
        format!(" formula={}", series_size_formula(t as u32, q as u32))
    } else {
        String::new()
    };
    println!(
        "t={t} n={}{formula} clique={} min_distance={}",
        result.code.len(),
        result.clique.len(),
        check.min_distance
    );
    Ok(if check.ok() { 0 } else { 1 })
}

fn run_bounds(name: &str, q: u64, threads: usize) -> CliResult {
    eprintln!("# qsubspace bounds name={name} q={q} threads={threads}");
    let entry = bound_catalog()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownBound(name.into()))?;
    let value = bound_value(name, q)?;
    println!(
        "name={name} q={q} value={value} v={} d={} k={}",
        entry.v, entry.d, entry.k
    );
    Ok(0)
}
