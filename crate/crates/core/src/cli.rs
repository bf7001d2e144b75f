//! Command-line front end. [`run`] takes the argument list and output
//! streams and returns the process exit code:
//! 0 success, 1 refuted or mismatched, 2 usage, 3 enumeration too large.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::codes::{Family, FiniteFeedbackScheme, SchemeSpec};
use crate::diversity::{certify_full_diversity, CertifyMode, DiversityCertificate, DEFAULT_BUDGET};
use crate::error::Error;
use crate::simulator::{
    estimate_diversity_slope, read_results_csv, resolve_workers, run_ber, write_gplot,
    write_results_csv, SimConfig, SimResult, SlopeWindow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENUMERATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ffs", version, about = "Finite feedback space-time schemes for quasi-static MIMO")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Built-in scheme families.
    Schemes {
        #[command(subcommand)]
        action: SchemesAction,
    },
    /// Certify full diversity of a scheme spec.
    Certify(CertifyArgs),
    /// BER simulation of one scheme.
    Simulate(SimulateArgs),
    /// BER simulation of several schemes at equal bit rate.
    Compare(CompareArgs),
    /// Fit the diversity slope of a results CSV.
    Slope(SlopeArgs),
}

#[derive(Debug, Subcommand)]
enum SchemesAction {
    /// List families with (N_t, N, T, R); an optional substring filters them.
    List { filter: Option<String> },
}

#[derive(Debug, Args)]
struct CertifyArgs {
    spec: PathBuf,
    /// Enumerate every stack (the default).
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Check this many random stacks instead.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest number of stacks an exhaustive run may visit.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Also write the certificate as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimFlags {
    /// SNR sweep `start:stop:step` in dB, inclusive.
    #[arg(long)]
    snr: String,
    #[arg(long)]
    nr: usize,
    #[arg(long)]
    seed: u64,
    /// Maximum trials per SNR point.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Stop an SNR point after this many bit errors (0 disables).
    #[arg(long, default_value_t = 200)]
    target_errors: u64,
    /// Worker threads (default: FFS_WORKERS or all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Results CSV path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write plot data here.
    #[arg(long)]
    gplot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    spec: PathBuf,
    #[command(flatten)]
    sim: SimFlags,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(required = true, num_args = 2..)]
    specs: Vec<PathBuf>,
    #[command(flatten)]
    sim: SimFlags,
}

#[derive(Debug, Args)]
struct SlopeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// BER window `lo:hi`.
    #[arg(long, default_value = "1e-5:1e-3")]
    ber_window: String,
    /// Only fit this scheme.
    #[arg(long)]
    scheme: Option<String>,
}

/// A failed command: message and exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::EnumerationTooLarge { .. } => EXIT_ENUMERATION,
            Error::BitrateMismatch(_) | Error::SlopeUndefined(_) => EXIT_REFUTED,
            _ => EXIT_USAGE,
        };
        let mut message = e.to_string();
        if code == EXIT_ENUMERATION {
            message.push_str("; use --samples N for a sampled check");
        }
        Failure { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Schemes {
            action: SchemesAction::List { filter },
        } => schemes_list(filter.as_deref(), out),
        Command::Certify(a) => certify(&a, out),
        Command::Simulate(a) => simulate(&a, out),
        Command::Compare(a) => compare(&a, out),
        Command::Slope(a) => slope(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// `(family, N_t, N, T, R)` rows for the built-in families.
pub fn scheme_table() -> Vec<[&'static str; 5]> {
    Family::ALL
        .iter()
        .map(|f| match f {
            Family::GoldenThread => ["golden_thread", "2", "2", "1", "2"],
            Family::T1 => ["t1", "Nt", "Nt", "1", "Nt"],
            Family::Threaded => ["threaded", "NT", "N", "T", "NT"],
            Family::AntennaSelection => ["antenna_selection", "Nt", "Nt", "1", "1"],
            Family::Beamforming => ["beamforming", "Nt", "N", "1", "1"],
            Family::Switching => ["switching", "2", "2", "2", "NA"],
            Family::NoFeedback => ["no_feedback", "Nt", "1", "T", "K/T"],
        })
        .collect()
}

fn schemes_list(filter: Option<&str>, out: &mut dyn Write) -> CmdResult {
    writeln!(out, "family Nt N T R")?;
    for row in scheme_table() {
        if filter.is_none_or(|f| row[0].contains(f)) {
            writeln!(out, "{}", row.join(" "))?;
        }
    }
    Ok(EXIT_OK)
}

fn load_scheme(path: &Path) -> Result<FiniteFeedbackScheme, Failure> {
    Ok(SchemeSpec::from_file(path)?.build()?)
}

fn format_counterexample(cert: &DiversityCertificate) -> Option<String> {
    cert.counterexample.as_ref().map(|ce| {
        ce.iter()
            .enumerate()
            .map(|(n, d)| {
                let entries: Vec<String> = d.iter().map(|&(r, i)| format!("{r}{i:+}i")).collect();
                format!("code {}: ({})", n + 1, entries.join(", "))
            })
            .collect::<Vec<_>>()
            .join("; ")
    })
}

fn certify(a: &CertifyArgs, out: &mut dyn Write) -> CmdResult {
    let scheme = load_scheme(&a.spec)?;
    let mode = match a.samples {
        Some(n) if n > 0 => CertifyMode::Sampled(n),
        Some(_) => return Err(usage("--samples must be positive")),
        None => CertifyMode::Exhaustive,
    };
    let seed = match (mode, a.seed) {
        (CertifyMode::Sampled(_), None) => return Err(usage("--samples requires --seed")),
        (_, s) => s.unwrap_or(0),
    };
    let cert = certify_full_diversity(&scheme, mode, a.budget, seed)?;
    let (mode_label, status) = match mode {
        CertifyMode::Exhaustive if cert.full_diversity_certified => ("exhaustive", "certified"),
        CertifyMode::Exhaustive => ("exhaustive", "refuted"),
        CertifyMode::Sampled(_) if cert.counterexample.is_some() => ("sampled", "refuted"),
        CertifyMode::Sampled(_) => ("sampled", "not refuted"),
    };
    writeln!(
        out,
        "scheme={} nt={} n={} t={} mode={mode_label} stacks={}",
        scheme.name(),
        cert.nt,
        cert.n,
        cert.t,
        cert.stacks_checked
    )?;
    writeln!(out, "min_rank={} ft_optimal={}", cert.min_rank, cert.ft_optimal)?;
    writeln!(out, "lambda_star={:.6e}", cert.lambda_star)?;
    if let Some(ce) = format_counterexample(&cert) {
        writeln!(out, "counterexample: {ce}")?;
    }
    writeln!(out, "status: {status}")?;
    if let Some(path) = &a.csv {
        let mut f = BufWriter::new(File::create(path)?);
        for line in manifest("certify", &[a.spec.as_path()], &[format!("seed: {seed}")]) {
            writeln!(f, "# {line}")?;
        }
        writeln!(f, "mode,min_rank,lambda_star,stacks_checked,counterexample_present")?;
        writeln!(
            f,
            "{mode_label},{},{:.6e},{},{}",
            cert.min_rank,
            cert.lambda_star,
            cert.stacks_checked,
            cert.counterexample.is_some()
        )?;
        f.flush()?;
    }
    Ok(if status == "refuted" { EXIT_REFUTED } else { EXIT_OK })
}

/// Parses `start:stop:step` into an inclusive list of SNRs.
pub fn parse_snr_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| format!("bad SNR range `{s}`"))?;
    match nums.as_slice() {
        [a] if a.is_finite() => Ok(vec![*a]),
        [a, b, step] if a.is_finite() && b.is_finite() && *step > 0.0 && b >= a => {
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(format!(
            "bad SNR range `{s}`: expected start:stop:step with step > 0 and stop >= start"
        )),
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("{what} must be `lo:hi`, got `{s}`")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("{what}: bad number `{v}`")))
    };
    Ok((parse(a)?, parse(b)?))
}

fn manifest(command: &str, specs: &[&Path], extra: &[String]) -> Vec<String> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let mut lines = vec![
        format!("ffs {} {command}", env!("CARGO_PKG_VERSION")),
        format!("created_unix: {now}"),
    ];
    lines.extend(specs.iter().map(|p| format!("spec: {}", p.display())));
    lines.extend_from_slice(extra);
    lines.push("snr: E/N0 in dB with E||X||_F^2 = T per codeword".into());
    lines
}

fn sim_config(flags: &SimFlags) -> Result<SimConfig, Failure> {
    let snr = parse_snr_range(&flags.snr).map_err(usage)?;
    if flags.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if flags.nr == 0 {
        return Err(usage("--nr must be at least 1"));
    }
    Ok(SimConfig {
        snr_db: snr,
        max_trials: flags.trials,
        target_bit_errors: flags.target_errors,
        seed: flags.seed,
        workers: flags.workers,
    })
}

fn config_echo(flags: &SimFlags) -> Vec<String> {
    vec![
        format!("seed: {}", flags.seed),
        format!(
            "config: snr={} nr={} trials={} target_errors={} workers={}",
            flags.snr,
            flags.nr,
            flags.trials,
            flags.target_errors,
            resolve_workers(flags.workers)
        ),
    ]
}

fn emit(
    flags: &SimFlags,
    manifest: &[String],
    results: &[SimResult],
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match &flags.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            write_results_csv(&mut f, manifest, results)?;
            f.flush()?;
        }
        None => write_results_csv(out, manifest, results)?,
    }
    if let Some(path) = &flags.gplot {
        let mut f = BufWriter::new(File::create(path)?);
        write_gplot(&mut f, manifest, results)?;
        f.flush()?;
    }
    Ok(())
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let config = sim_config(&a.sim)?;
    let scheme = load_scheme(&a.spec)?;
    let result = run_ber(&scheme, a.sim.nr, &config)?;
    let m = manifest("simulate", &[a.spec.as_path()], &config_echo(&a.sim));
    emit(&a.sim, &m, &[result], out)?;
    Ok(EXIT_OK)
}

fn compare(a: &CompareArgs, out: &mut dyn Write) -> CmdResult {
    let config = sim_config(&a.sim)?;
    let schemes = a
        .specs
        .iter()
        .map(|p| load_scheme(p))
        .collect::<Result<Vec<_>, _>>()?;
    let bpcu = schemes[0].bpcu();
    if schemes.iter().any(|s| s.bpcu() != bpcu) {
        let list: Vec<String> = a
            .specs
            .iter()
            .zip(&schemes)
            .map(|(p, s)| format!("{} ({}): {} bpcu", s.name(), p.display(), s.bpcu()))
            .collect();
        return Err(Error::BitrateMismatch(list.join(", ")).into());
    }
    let results = schemes
        .iter()
        .map(|s| run_ber(s, a.sim.nr, &config))
        .collect::<Result<Vec<_>, _>>()?;
    let specs: Vec<&Path> = a.specs.iter().map(PathBuf::as_path).collect();
    let m = manifest("compare", &specs, &config_echo(&a.sim));
    emit(&a.sim, &m, &results, out)?;
    for line in compare_summary(&results) {
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

/// Per SNR: the scheme with the lowest BER, and whether its confidence
/// interval is separated from every other scheme's.
pub fn compare_summary(results: &[SimResult]) -> Vec<String> {
    let mut lines = Vec::new();
    let Some(first) = results.first() else {
        return lines;
    };
    for (i, p) in first.points.iter().enumerate() {
        let points: Vec<_> = results.iter().map(|r| &r.points[i]).collect();
        let best = (0..points.len())
            .min_by(|&x, &y| points[x].ber.total_cmp(&points[y].ber))
            .expect("non-empty");
        let separated = points
            .iter()
            .enumerate()
            .all(|(j, q)| j == best || points[best].ci95_high < q.ci95_low);
        lines.push(format!(
            "snr_db={} best={} ber={:.3e} {}",
            p.snr_db,
            results[best].scheme,
            points[best].ber,
            if separated { "separated" } else { "inconclusive" }
        ));
    }
    lines
}

fn slope(a: &SlopeArgs, out: &mut dyn Write) -> CmdResult {
    let (lo, hi) = parse_pair(&a.ber_window, "--ber-window")?;
    let file = File::open(&a.input).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let results = read_results_csv(BufReader::new(file))?;
    let selected: Vec<&SimResult> = results
        .iter()
        .filter(|r| a.scheme.as_deref().is_none_or(|s| r.scheme == s))
        .collect();
    if selected.is_empty() {
        return Err(usage("no matching scheme in the CSV"));
    }
    for r in selected {
        let s = estimate_diversity_slope(r, SlopeWindow::Ber(lo, hi))?;
        writeln!(out, "scheme={} nr={} slope={s:.4}", r.scheme, r.nr)?;
    }
    Ok(EXIT_OK)
}
