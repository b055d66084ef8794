//! `polarcm`: capacity tables, labeling search, code construction, rate
//! curves and BLER simulation for polar coded PAM.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use polarcm::channel::{esn0_db_from_sigma, level_capacities, sigma_from_esn0_db, total_capacity};
use polarcm::constellation::{Constellation, Labeling, LabelingFamily};
use polarcm::construction::{
    build_bipcm_code, build_mlc_code, default_design_sigma, max_rate_curve, MlcCodeSpec,
    DEFAULT_DESIGN_MARGIN_BITS,
};
use polarcm::labelsearch::{search_optimal_labeling, SearchOptions};
use polarcm::polar::DecoderKind;
use polarcm::simulator::{
    bipcm_payload_len, csv_row, payload_len, run_bipcm_bler, run_bler, Scheme, SimConfig,
    CSV_HEADER,
};
use polarcm::{Error, Result};

use crate::config::{merge_config, parse_list, write_manifest};

#[derive(Parser, Debug)]
#[command(name = "polarcm", version, about = "Polar coded modulation over PAM/AWGN")]
#[command(args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Master seed for payloads, noise and interleavers.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output file; a `.manifest` is written next to it. Stdout if omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file of flags; flags on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Read SNR values as Eb/N0 per information bit instead of Es/N0.
    #[arg(long, global = true)]
    ebn0: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-level and total symmetric capacities over an SNR list.
    Capacity(CapacityArgs),
    /// Exhaustive search over canonical labelings.
    Search(SearchArgs),
    /// Build a multi-level polar code and write its spec file.
    Construct(ConstructArgs),
    /// Largest rate meeting a target BLER versus BI-AWGN capacity.
    Ratecurve(RatecurveArgs),
    /// Monte Carlo BLER of PCM (multistage) or BIPCM.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct LabelingSource {
    /// Bits per symbol.
    #[arg(long)]
    m: Option<usize>,
    /// natural, gray, canonical:<index> or a dash list like 0-1-3-2.
    #[arg(long)]
    labeling: Option<String>,
    /// Labeling text file; overrides --labeling.
    #[arg(long)]
    labeling_file: Option<PathBuf>,
}

impl LabelingSource {
    fn resolve(&self) -> Result<(Labeling, Option<String>)> {
        if let Some(path) = &self.labeling_file {
            let lab = Labeling::from_text(&std::fs::read_to_string(path)?)?;
            if self.m.is_some_and(|m| m != lab.bits_per_symbol()) {
                return Err(Error::InvalidParameter(format!(
                    "--m disagrees with labeling file {}",
                    path.display()
                )));
            }
            return Ok((lab, Some(path.display().to_string())));
        }
        let family: LabelingFamily = self.labeling.as_deref().unwrap_or("natural").parse()?;
        let m = match (&family, self.m) {
            (LabelingFamily::Explicit(l), _) => l.bits_per_symbol(),
            (_, Some(m)) => m,
            _ => return Err(Error::InvalidParameter("--m is required".into())),
        };
        Ok((family.resolve(m)?, None))
    }
}

#[derive(Args, Debug)]
struct CapacityArgs {
    #[command(flatten)]
    source: LabelingSource,
    /// SNR list, e.g. 0,2,4 or 0:0.5:10.
    #[arg(long, allow_hyphen_values = true)]
    snr: String,
    /// Information bits per symbol, needed to convert --ebn0 values.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Design SNR in dB, or `auto` for I(W) = K/N + 0.4 bits.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    design_snr: String,
    /// Permit the m = 4 search (about 6.4e8 candidates).
    #[arg(long)]
    allow_large: bool,
    /// Where to write the best labeling; defaults to <out>.best.
    #[arg(long)]
    best_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    source: LabelingSource,
    #[arg(long)]
    n: usize,
    /// Information bits over all levels (payload bits with --crc-overhead).
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    design_snr: String,
    /// Count CRC bits on top of K: reserve a CRC on every level that
    /// can hold one, so K payload bits remain under CA-SCL.
    #[arg(long)]
    crc_overhead: bool,
}

#[derive(Args, Debug)]
struct RatecurveArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 1e-3)]
    target: f64,
    /// Capacity grid; defaults to i/(points+1), i = 1..points.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 20)]
    points: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value = "pcm")]
    scheme: Scheme,
    /// Code spec file (PCM).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// BIPCM bits per symbol.
    #[arg(long)]
    m: Option<usize>,
    /// BIPCM symbols per frame.
    #[arg(long)]
    n: Option<usize>,
    /// BIPCM information bits.
    #[arg(long)]
    k: Option<usize>,
    /// BIPCM design SNR in dB or `auto`.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    design_snr: String,
    /// BIPCM interleaver seed.
    #[arg(long, default_value_t = 1)]
    interleaver_seed: u64,
    #[arg(long, default_value = "SC")]
    decoder: DecoderKind,
    #[arg(long, default_value_t = 1)]
    list: usize,
    #[arg(long, allow_hyphen_values = true)]
    snr: String,
    #[arg(long, default_value_t = 100_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 100)]
    target_errors: u64,
    /// Frames between stop-rule checks.
    #[arg(long, default_value_t = 256)]
    batch: u64,
}

/// Converts user SNR values to Es/N0 in dB.
fn to_esn0(values: &[f64], ebn0: bool, rate: Option<f64>) -> Result<Vec<f64>> {
    if !ebn0 {
        return Ok(values.to_vec());
    }
    let rate = rate.ok_or_else(|| Error::InvalidParameter("--ebn0 needs a known information rate".into()))?;
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!("information rate {rate} must be positive")));
    }
    Ok(values.iter().map(|v| v + 10.0 * rate.log10()).collect())
}

fn design_sigma(spec: &str, c: &Constellation, n: usize, k: usize, ebn0: bool) -> Result<f64> {
    if spec == "auto" {
        return default_design_sigma(c, n, k, DEFAULT_DESIGN_MARGIN_BITS);
    }
    let v: f64 = spec
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("--design-snr '{spec}' is neither a number nor auto")))?;
    let esn0 = to_esn0(&[v], ebn0, Some(k as f64 / n as f64))?[0];
    Ok(sigma_from_esn0_db(esn0))
}

struct Output {
    path: Option<PathBuf>,
    writer: Box<dyn Write>,
}

impl Output {
    fn open(path: Option<&Path>) -> Result<Self> {
        Ok(match path {
            Some(p) => Self {
                path: Some(p.to_path_buf()),
                writer: Box::new(BufWriter::new(File::create(p)?)),
            },
            None => Self {
                path: None,
                writer: Box::new(std::io::stdout()),
            },
        })
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.writer, "{s}")?;
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Messages for the user: stdout when the artifact goes to a file.
fn note(common: &Common, msg: &str) {
    if common.out.is_some() {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

fn cmd_capacity(common: &Common, a: &CapacityArgs) -> Result<Vec<PathBuf>> {
    let (lab, _) = a.source.resolve()?;
    let m = lab.bits_per_symbol();
    let c = Constellation::pam(m)?;
    let snrs = to_esn0(&parse_list(&a.snr)?, common.ebn0, a.rate)?;
    let mut out = Output::open(common.out.as_deref())?;
    let levels: Vec<String> = (1..=m).map(|j| format!("I_W{j}")).collect();
    out.line(&format!("esn0_db,sigma,{},I_W", levels.join(",")))?;
    for s in snrs {
        let sigma = sigma_from_esn0_db(s);
        let caps = level_capacities(&lab, &c, sigma)?;
        let total = total_capacity(&lab, &c, sigma)?;
        let cols: Vec<String> = caps.iter().map(|v| v.to_string()).collect();
        out.line(&format!("{s},{sigma},{},{total}", cols.join(",")))?;
    }
    out.flush()?;
    Ok(out.path.into_iter().collect())
}

fn cmd_search(common: &Common, a: &SearchArgs) -> Result<Vec<PathBuf>> {
    let c = Constellation::pam(a.m)?;
    let sigma = design_sigma(&a.design_snr, &c, a.n, a.k, common.ebn0)?;
    let report = search_optimal_labeling(
        a.m,
        a.n,
        a.k,
        sigma,
        SearchOptions {
            allow_large: a.allow_large,
        },
    )
    .map_err(|e| match e {
        Error::InvalidParameter(msg) if a.m == 4 && !a.allow_large => {
            Error::InvalidParameter(format!("{msg} (pass --allow-large to search m=4)"))
        }
        e => e,
    })?;
    let mut out = Output::open(common.out.as_deref())?;
    out.writer.write_all(report.to_csv().as_bytes())?;
    out.flush()?;
    let best = report.best();
    note(common, &format!("evaluated {}", report.evaluated_count));
    note(
        common,
        &format!(
            "best {} predicted_bler={:e} design_esn0_db={}",
            best.labeling.dash_string(),
            best.predicted_bler,
            esn0_db_from_sigma(sigma)
        ),
    );
    let mut paths: Vec<PathBuf> = out.path.into_iter().collect();
    let best_path = a
        .best_out
        .clone()
        .or_else(|| paths.first().map(|p| PathBuf::from(format!("{}.best", p.display()))));
    if let Some(p) = best_path {
        std::fs::write(&p, best.labeling.to_text())?;
        paths.push(p);
    }
    Ok(paths)
}

/// Builds a code whose payload is `k` once each level large enough to hold
/// a CRC carries one.
fn build_with_crc_overhead(lab: &Labeling, c: &Constellation, sigma: f64, n: usize, k: usize) -> Result<MlcCodeSpec> {
    let mut total = k;
    for _ in 0..=lab.bits_per_symbol() + 1 {
        let spec = build_mlc_code(lab, c, sigma, n, total)?;
        let payload = payload_len(&spec, true);
        if payload == k {
            return Ok(spec);
        }
        total = k + (spec.k - payload);
    }
    Err(Error::InvalidParameter(format!(
        "no CRC layout leaves exactly {k} payload bits"
    )))
}

fn cmd_construct(common: &Common, a: &ConstructArgs) -> Result<Vec<PathBuf>> {
    let (lab, file) = a.source.resolve()?;
    let c = Constellation::pam(lab.bits_per_symbol())?;
    let sigma = design_sigma(&a.design_snr, &c, a.n, a.k, common.ebn0)?;
    let mut spec = if a.crc_overhead {
        build_with_crc_overhead(&lab, &c, sigma, a.n, a.k)?
    } else {
        build_mlc_code(&lab, &c, sigma, a.n, a.k)?
    };
    spec.labeling_file = file;
    let mut out = Output::open(common.out.as_deref())?;
    out.writer.write_all(spec.to_text().as_bytes())?;
    out.flush()?;
    note(
        common,
        &format!(
            "K={} frozen={} per-level K={:?} predicted_bler={:e}",
            spec.k,
            spec.levels.len() * spec.n - spec.k,
            spec.info_counts(),
            spec.predicted_bler
        ),
    );
    Ok(out.path.into_iter().collect())
}

fn cmd_ratecurve(common: &Common, a: &RatecurveArgs) -> Result<Vec<PathBuf>> {
    let grid = match &a.grid {
        Some(g) => parse_list(g)?,
        None => (1..=a.points).map(|i| i as f64 / (a.points + 1) as f64).collect(),
    };
    let curve = max_rate_curve(a.n, a.target, &grid)?;
    let mut out = Output::open(common.out.as_deref())?;
    out.line("capacity,rate,predicted_bler")?;
    for p in curve {
        out.line(&format!("{},{},{:e}", p.capacity, p.rate, p.predicted_bler))?;
    }
    out.flush()?;
    Ok(out.path.into_iter().collect())
}

fn cmd_simulate(common: &Common, a: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let snr = parse_list(&a.snr)?;
    let mut cfg = SimConfig {
        decoder: a.decoder,
        list_size: a.list,
        esn0_db: Vec::new(),
        max_frames: a.max_frames,
        target_errors: a.target_errors,
        seed: common.seed,
        workers: 0,
        batch: a.batch,
    };
    let with_crc = a.decoder.uses_crc();
    let mut out = Output::open(common.out.as_deref())?;
    out.line(CSV_HEADER)?;
    out.flush()?;
    let mut emit = |m: usize, n: usize, k: usize, cfg: &SimConfig, p: &polarcm::simulator::BlerPoint| {
        // Flush per point so long sweeps can be watched.
        let _ = writeln!(out.writer, "{}", csv_row(a.scheme, cfg, m, n, k, p));
        let _ = out.writer.flush();
    };
    match a.scheme {
        Scheme::Pcm => {
            let path = a
                .spec
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("PCM simulation needs --spec".into()))?;
            let spec = MlcCodeSpec::from_text(&std::fs::read_to_string(path)?)?;
            let rate = payload_len(&spec, with_crc) as f64 / spec.n as f64;
            cfg.esn0_db = to_esn0(&snr, common.ebn0, Some(rate))?;
            let (m, n, k) = (spec.bits_per_symbol(), spec.n, spec.k);
            let shown = cfg.clone();
            run_bler(&spec, &cfg, |p| emit(m, n, k, &shown, p))?;
        }
        Scheme::Bipcm => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Error::InvalidParameter(format!("BIPCM simulation needs --{name}")))
            };
            let (m, n, k) = (need(a.m, "m")?, need(a.n, "n")?, need(a.k, "k")?);
            let c = Constellation::pam(m)?;
            let sigma = design_sigma(&a.design_snr, &c, n, k, common.ebn0)?;
            let spec = build_bipcm_code(m, n, k, sigma, a.interleaver_seed)?;
            let rate = bipcm_payload_len(&spec, with_crc) as f64 / n as f64;
            cfg.esn0_db = to_esn0(&snr, common.ebn0, Some(rate))?;
            let shown = cfg.clone();
            run_bipcm_bler(&spec, &cfg, |p| emit(m, n, k, &shown, p))?;
        }
    }
    Ok(out.path.into_iter().collect())
}

fn error_line(e: &Error) -> String {
    let (kind, msg) = match e {
        Error::InvalidParameter(m) => ("invalid-parameter", m.clone()),
        Error::Parse { line, msg } => ("parse", format!("line {line}: {msg}")),
        Error::Io(err) => ("io", err.to_string()),
    };
    format!("error: {kind}: {}", msg.replace('\n', " "))
}

fn run(cli: &Cli, matches: &ArgMatches) -> Result<()> {
    if cli.common.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.workers)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let c = &cli.common;
    let outputs = match &cli.command {
        Command::Capacity(a) => cmd_capacity(c, a)?,
        Command::Search(a) => cmd_search(c, a)?,
        Command::Construct(a) => cmd_construct(c, a)?,
        Command::Ratecurve(a) => cmd_ratecurve(c, a)?,
        Command::Simulate(a) => cmd_simulate(c, a)?,
    };
    if !outputs.is_empty() {
        let refs: Vec<&Path> = outputs.iter().map(PathBuf::as_path).collect();
        write_manifest(&Cli::command(), name, sub, &refs)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match merge_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            return ExitCode::from(2);
        }
    };
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("bad arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    let cli = Cli::from_arg_matches(&matches).expect("matches come from the same definition");
    match run(&cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        // Reader went away, e.g. `| head`.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::from(1)
        }
    }
}
