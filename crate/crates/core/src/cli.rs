//! Command-line front end.
//!
//! Streams are CSV with one value per line; wire dumps are raw frame bytes.
//! Every output written to a file gets a JSON manifest next to it
//! (`<out>.manifest.json`, or the `--manifest` path) that echoes the full
//! configuration.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::ewma_filter::EwmaWeights;
use crate::fixed_map::{MapParams, Rounding};
use crate::numfmt::sig9;
use crate::prng_pipeline::{self, GeneratorConfig, Semantics, ZeroPolicy};
use crate::stats_analyzer::{self, as_real};
use crate::wire_codec::{self, BAUD_RATE, DATA_BITS, STOP_BITS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_FRAMING: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {source}")]
    Framing { path: String, source: Error },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Analysis(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Framing { .. } => EXIT_FRAMING,
            CliError::Io { .. } => EXIT_IO,
            CliError::Analysis(_) => EXIT_FAILURE,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "lmap-prng", version, about = "Fixed-point logistic-map PRNG emulator and analysis harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an output stream.
    Generate(GenerateArgs),
    /// Histogram, moments, chi-square fit and normal overlay of a stream.
    Analyze(AnalyzeArgs),
    /// Cycle structure of the fixed-point map over all 65,536 seeds.
    Census(CensusArgs),
    /// Step-by-step divergence between two semantics from the same seed.
    Compare(CompareArgs),
    /// Convert a CSV stream into wire frames.
    Encode(EncodeArgs),
    /// Convert wire frames into a CSV stream.
    Decode(DecodeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsArg {
    Hw,
    Poc,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Hw => Semantics::Hardware,
            SemanticsArg::Poc => Semantics::Poc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroPolicyArg {
    Faithful,
    Perturb,
}

impl From<ZeroPolicyArg> for ZeroPolicy {
    fn from(z: ZeroPolicyArg) -> Self {
        match z {
            ZeroPolicyArg::Faithful => ZeroPolicy::Faithful,
            ZeroPolicyArg::Perturb => ZeroPolicy::PerturbToOne,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Frames,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Raw 16-bit seed; 0 is sanitized to 1.
    #[arg(long, default_value_t = 6000, value_parser = clap::value_parser!(u16))]
    pub seed: u16,
    /// Number of outputs.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Hw)]
    pub semantics: SemanticsArg,
    #[arg(long, value_enum, default_value_t = ZeroPolicyArg::Faithful)]
    pub zero_policy: ZeroPolicyArg,
    /// `csv` (one value per line) or `frames` (two bytes per value, low byte first).
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// EWMA weights as `old,new,denom`.
    #[arg(long, default_value = "40,10,50", value_parser = parse_weights)]
    pub weights: EwmaWeights,
    /// Output path, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input stream, `-` for stdin.
    pub input: PathBuf,
    /// Input is a raw frame dump rather than CSV.
    #[arg(long)]
    pub frames: bool,
    /// Drop consecutive duplicates as the serial receiver does.
    #[arg(long)]
    pub dedupe: bool,
    /// Keep a leading 0 when deduplicating (the receiver drops it).
    #[arg(long)]
    pub no_paper_compat: bool,
    /// Prepend the receiver script's 256-zero block before analysis.
    #[arg(long)]
    pub zero_prefix: bool,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Histogram range as `lo..hi`.
    #[arg(long, default_value = "0..65535", value_parser = parse_range)]
    pub range: (f64, f64),
    /// Points on the fitted normal curve.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Histogram and summary CSV, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub report: PathBuf,
    /// Overlay curve CSV (`x,density`).
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub r: u32,
    #[arg(long, short, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 6000, value_parser = clap::value_parser!(u16))]
    pub seed: u16,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// First semantics.
    #[arg(long, value_enum, default_value_t = SemanticsArg::Hw)]
    pub a: SemanticsArg,
    /// Second semantics.
    #[arg(long, value_enum, default_value_t = SemanticsArg::Poc)]
    pub b: SemanticsArg,
    /// A step diverges when the absolute difference exceeds this.
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    #[arg(long, short, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(after_help = wire_help())]
pub struct EncodeArgs {
    pub input: PathBuf,
    #[arg(long, short, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(after_help = wire_help())]
pub struct DecodeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub dedupe: bool,
    #[arg(long)]
    pub no_paper_compat: bool,
    #[arg(long, short, default_value = "-")]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn wire_help() -> String {
    format!(
        "Frame: value v -> bytes [v & 0xFF, v >> 8]. Link: {BAUD_RATE} baud, {DATA_BITS} data bits, \
         {STOP_BITS} stop bit, no parity."
    )
}

fn parse_weights(s: &str) -> std::result::Result<EwmaWeights, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err("expected old,new,denom".into());
    }
    let mut w = [0u32; 3];
    for (slot, p) in w.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("{p}: {e}"))?;
    }
    EwmaWeights::new(w[0], w[1], w[2]).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("lo ({lo}) must be below hi ({hi})"));
    }
    Ok((lo, hi))
}

/// Parses argv and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("lmap-prng: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Census(a) => cmd_census(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Encode(a) => cmd_encode(&a),
        Command::Decode(a) => cmd_decode(&a),
    }
}

fn is_std(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn io_err(p: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: display(p),
        source,
    }
}

fn write_output(path: &Path, body: &[u8]) -> CliResult<()> {
    if is_std(path) {
        let mut out = io::stdout().lock();
        out.write_all(body).and_then(|_| out.flush()).map_err(io_err(path))
    } else {
        let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
        w.write_all(body).and_then(|_| w.flush()).map_err(io_err(path))
    }
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    if is_std(path) {
        io::stdin().lock().read_to_end(&mut buf).map_err(io_err(path))?;
    } else {
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut buf))
            .map_err(io_err(path))?;
    }
    Ok(buf)
}

/// One value per line; blank lines are skipped.
pub fn parse_values(path: &Path, text: &[u8]) -> CliResult<Vec<u16>> {
    let text = std::str::from_utf8(text).map_err(|e| CliError::Parse {
        path: display(path),
        line: 0,
        msg: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v = t.parse::<u16>().map_err(|e| CliError::Parse {
            path: display(path),
            line: i + 1,
            msg: format!("{t:?}: {e}"),
        })?;
        out.push(v);
    }
    Ok(out)
}

fn values_csv(values: &[u16]) -> Vec<u8> {
    let mut s = String::with_capacity(values.len() * 6);
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s.into_bytes()
}

fn decode_frames(path: &Path, bytes: &[u8]) -> CliResult<Vec<u16>> {
    wire_codec::decode_stream(bytes).map_err(|source| CliError::Framing {
        path: display(path),
        source,
    })
}

fn manifest_path(out: &Path, explicit: &Option<PathBuf>) -> Option<PathBuf> {
    match explicit {
        Some(p) => Some(p.clone()),
        None if is_std(out) => None,
        None => {
            let mut s = out.as_os_str().to_owned();
            s.push(".manifest.json");
            Some(PathBuf::from(s))
        }
    }
}

fn write_manifest(
    primary: &Path,
    explicit: &Option<PathBuf>,
    command: &str,
    config: serde_json::Value,
    outputs: &[&Path],
) -> CliResult<()> {
    let Some(path) = manifest_path(primary, explicit) else {
        return Ok(());
    };
    let manifest = json!({
        "command": command,
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "outputs": outputs.iter().map(|p| display(p)).collect::<Vec<_>>(),
    });
    let mut body = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    body.push(b'\n');
    write_output(&path, &body)
}

fn weights_json(w: &EwmaWeights) -> serde_json::Value {
    json!([w.old_weight(), w.new_weight(), w.denominator()])
}

pub fn cmd_generate(a: &GenerateArgs) -> CliResult<()> {
    let config = GeneratorConfig::new(a.seed, a.n)
        .semantics(a.semantics.into())
        .zero_policy(a.zero_policy.into())
        .weights(a.weights);
    let values = prng_pipeline::generate(&config);
    let body = match a.format {
        FormatArg::Csv => values_csv(&values),
        FormatArg::Frames => wire_codec::encode_stream(&values),
    };
    write_output(&a.out, &body)?;
    write_manifest(
        &a.out,
        &a.manifest,
        "generate",
        json!({
            "seed": a.seed,
            "sanitized_seed": prng_pipeline::sanitize_seed(a.seed).get(),
            "n": a.n,
            "semantics": a.semantics,
            "zero_policy": a.zero_policy,
            "format": a.format,
            "weights": weights_json(&a.weights),
            "r": 4,
        }),
        &[&a.out],
    )
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> CliResult<()> {
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let raw = read_input(&a.input)?;
    let mut values = if a.frames {
        decode_frames(&a.input, &raw)?
    } else {
        parse_values(&a.input, &raw)?
    };
    if a.dedupe {
        values = wire_codec::dedupe_consecutive(&values, !a.no_paper_compat);
    }
    if a.zero_prefix {
        values = wire_codec::with_zero_prefix(&values);
    }

    let reals: Vec<f64> = as_real(&values);
    let report = stats_analyzer::histogram(&reals, a.bins, a.range.0, a.range.1)?;
    let gof = stats_analyzer::chi_square_gof(&report).ok();
    let mut body = Vec::new();
    report
        .write_csv(&mut body, gof.as_ref())
        .expect("writing to memory");
    write_output(&a.report, &body)?;

    let mut outputs = vec![a.report.as_path()];
    if let Some(overlay) = &a.overlay {
        let mut s = String::from("x,density\n");
        // A constant stream has no normal fit; the overlay is header only.
        if let Ok(curve) = stats_analyzer::fit_normal_overlay(&report, a.points) {
            for (x, d) in curve {
                s.push_str(&format!("{},{}\n", sig9(x), sig9(d)));
            }
        }
        write_output(overlay, s.as_bytes())?;
        outputs.push(overlay);
    }

    write_manifest(
        &a.report,
        &a.manifest,
        "analyze",
        json!({
            "input": display(&a.input),
            "frames": a.frames,
            "dedupe": a.dedupe,
            "paper_compat": !a.no_paper_compat,
            "zero_prefix": a.zero_prefix,
            "bins": a.bins,
            "range": [a.range.0, a.range.1],
            "points": a.points,
        }),
        &outputs,
    )
}

pub fn cmd_census(a: &CensusArgs) -> CliResult<()> {
    let params = MapParams::new(a.r, Rounding::HardwareRound)?;
    let census = prng_pipeline::cycle_census(&params);
    let mut s = String::from("representative,cycle_length,basin_size\n");
    for c in &census.cycles {
        s.push_str(&format!("{},{},{}\n", c.representative, c.cycle_len, c.basin_size));
    }
    s.push_str(&format!("total,{},{}\n", census.cycles.len(), census.seeds()));
    write_output(&a.out, s.as_bytes())?;
    eprintln!(
        "census: {} cycles, longest tail {}, {} of seeds absorbed by 0",
        census.cycles.len(),
        census.max_tail(),
        sig9(census.zero_fraction())
    );
    write_manifest(&a.out, &a.manifest, "census", json!({ "r": a.r }), &[&a.out])
}

/// Per-step comparison of two generator runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    pub map_a: Vec<f64>,
    pub map_b: Vec<f64>,
    pub ewma_a: Vec<u16>,
    pub ewma_b: Vec<u16>,
    /// 1-based step of the first map-state difference above the threshold.
    pub first_map_divergence: Option<usize>,
    pub first_ewma_divergence: Option<usize>,
}

fn first_above(mut diffs: impl Iterator<Item = f64>, threshold: f64) -> Option<usize> {
    diffs.position(|d| d > threshold).map(|i| i + 1)
}

pub fn divergence(seed: u16, n: usize, a: Semantics, b: Semantics, threshold: f64) -> Divergence {
    let ta = prng_pipeline::trace(&GeneratorConfig::new(seed, n).semantics(a));
    let tb = prng_pipeline::trace(&GeneratorConfig::new(seed, n).semantics(b));
    let first_map_divergence = first_above(
        ta.map_states.iter().zip(&tb.map_states).map(|(x, y)| (x - y).abs()),
        threshold,
    );
    let first_ewma_divergence = first_above(
        ta.outputs.iter().zip(&tb.outputs).map(|(&x, &y)| f64::from(x.abs_diff(y))),
        threshold,
    );
    Divergence {
        map_a: ta.map_states,
        map_b: tb.map_states,
        ewma_a: ta.outputs,
        ewma_b: tb.outputs,
        first_map_divergence,
        first_ewma_divergence,
    }
}

pub fn cmd_compare(a: &CompareArgs) -> CliResult<()> {
    if !(a.threshold >= 0.0) {
        return Err(CliError::Usage("--threshold must be non-negative".into()));
    }
    let d = divergence(a.seed, a.n, a.a.into(), a.b.into(), a.threshold);
    let mut s = String::from("step,map_a,map_b,map_diff,ewma_a,ewma_b,ewma_diff\n");
    let mut max_map = 0.0f64;
    let mut max_ewma = 0u16;
    for i in 0..d.ewma_a.len() {
        let md = (d.map_a[i] - d.map_b[i]).abs();
        let ed = d.ewma_a[i].abs_diff(d.ewma_b[i]);
        max_map = max_map.max(md);
        max_ewma = max_ewma.max(ed);
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            sig9(d.map_a[i]),
            sig9(d.map_b[i]),
            sig9(md),
            d.ewma_a[i],
            d.ewma_b[i],
            ed
        ));
    }
    let step = |o: Option<usize>| o.map_or_else(|| "none".to_string(), |k| k.to_string());
    s.push_str("\nkey,value\n");
    s.push_str(&format!("n,{}\n", a.n));
    s.push_str(&format!("sanitized_seed,{}\n", prng_pipeline::sanitize_seed(a.seed)));
    s.push_str(&format!("threshold,{}\n", sig9(a.threshold)));
    s.push_str(&format!("first_map_divergence,{}\n", step(d.first_map_divergence)));
    s.push_str(&format!("first_ewma_divergence,{}\n", step(d.first_ewma_divergence)));
    s.push_str(&format!("max_map_diff,{}\n", sig9(max_map)));
    s.push_str(&format!("max_ewma_diff,{max_ewma}\n"));
    write_output(&a.out, s.as_bytes())?;
    write_manifest(
        &a.out,
        &a.manifest,
        "compare",
        json!({
            "seed": a.seed,
            "n": a.n,
            "a": a.a,
            "b": a.b,
            "threshold": a.threshold,
        }),
        &[&a.out],
    )
}

pub fn cmd_encode(a: &EncodeArgs) -> CliResult<()> {
    let values = parse_values(&a.input, &read_input(&a.input)?)?;
    write_output(&a.out, &wire_codec::encode_stream(&values))?;
    write_manifest(
        &a.out,
        &a.manifest,
        "encode",
        json!({ "input": display(&a.input) }),
        &[&a.out],
    )
}

pub fn cmd_decode(a: &DecodeArgs) -> CliResult<()> {
    let mut values = decode_frames(&a.input, &read_input(&a.input)?)?;
    if a.dedupe {
        values = wire_codec::dedupe_consecutive(&values, !a.no_paper_compat);
    }
    write_output(&a.out, &values_csv(&values))?;
    write_manifest(
        &a.out,
        &a.manifest,
        "decode",
        json!({
            "input": display(&a.input),
            "dedupe": a.dedupe,
            "paper_compat": !a.no_paper_compat,
        }),
        &[&a.out],
    )
}
