//! `wavescope` command-line front end.
//!
//! `render` writes waveform and spectrogram figures for each input file;
//! `info` prints header metadata. Diagnostics go to standard error as
//! `LEVEL<TAB>file<TAB>message` lines.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use wavescope_core::dsp::{spectrogram, WindowSpec};
use wavescope_core::render::{
    render_spectrogram_png, render_spectrogram_svg, render_waveform_svg, PlotArea,
};
use wavescope_core::viz::{
    crop_to_range, decimate_range, rasterize_spectrogram, rasterize_waveform, Interval, ViewRange,
};
use wavescope_core::wav::{decode_full, decode_slice_from, read_header, SliceRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FILE_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wavescope", version = wavescope_core::VERSION, about = "Render waveforms and spectrograms of WAV recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render waveform and/or spectrogram figures.
    Render(RenderArgs),
    /// Print header metadata.
    Info {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Waveform,
    Spectrogram,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Png,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Png => "png",
        }
    }
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    /// Start of the time window in seconds.
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    /// Length of the time window in seconds.
    #[arg(long, allow_negative_numbers = true)]
    duration: Option<f64>,
    /// STFT window size in samples.
    #[arg(long, default_value_t = 2048)]
    window: usize,
    /// STFT hop size in samples.
    #[arg(long, default_value_t = 1024)]
    hop: usize,
    #[arg(long, allow_negative_numbers = true)]
    freq_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    freq_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    amp_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    amp_max: Option<f64>,
    /// Waveform buckets (default: twice the width).
    #[arg(long)]
    buckets: Option<usize>,
    #[arg(long, default_value_t = 1024)]
    width: usize,
    #[arg(long, default_value_t = 384)]
    height: usize,
    /// Output format (default: svg for waveforms, png for spectrograms).
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Suppress informational lines.
    #[arg(long)]
    quiet: bool,
}

/// Render settings after validation.
#[derive(Debug, Clone)]
pub struct RenderPlan {
    pub waveform: Option<&'static str>,
    pub spectrogram: Option<&'static str>,
    pub start: Option<f64>,
    pub duration: Option<f64>,
    pub window: WindowSpec,
    pub freq: (Option<f64>, Option<f64>),
    pub amp: (f64, f64),
    pub buckets: usize,
    pub width: usize,
    pub height: usize,
}

struct Diagnostics<'a> {
    err: &'a mut dyn Write,
    quiet: bool,
}

impl Diagnostics<'_> {
    fn line(&mut self, level: &str, file: &str, message: &str) {
        if self.quiet && level == "INFO" {
            return;
        }
        let _ = writeln!(
            self.err,
            "{level}\t{file}\t{}",
            message.replace(['\n', '\t'], " ")
        );
    }
}

/// Run with the process arguments, writing to the real stdout/stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match cli.command {
        Command::Info { paths } => info(&paths, out, &mut Diagnostics { err, quiet: false }),
        Command::Render(args) => {
            let mut diag = Diagnostics {
                err,
                quiet: args.quiet,
            };
            match validate(&args) {
                Ok(plan) => render_all(&args.paths, &args.out, &plan, &mut diag),
                Err(msg) => {
                    diag.line("ERROR", "-", &msg);
                    EXIT_USAGE
                }
            }
        }
    }
}

fn finite(flag: &str, v: f64) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{flag} {v}: must be a finite number"))
    }
}

fn validate(a: &RenderArgs) -> Result<RenderPlan, String> {
    if let Some(s) = a.start {
        if finite("--start", s)? < 0.0 {
            return Err(format!("--start {s}: must be non-negative"));
        }
    }
    if let Some(d) = a.duration {
        if finite("--duration", d)? <= 0.0 {
            return Err(format!("--duration {d}: must be positive"));
        }
    }
    if !a.window.is_power_of_two() || a.window < 2 {
        return Err(format!(
            "--window {}: must be a power of two >= 2",
            a.window
        ));
    }
    if a.hop == 0 || a.hop > a.window {
        return Err(format!(
            "--hop {}: must be between 1 and --window ({})",
            a.hop, a.window
        ));
    }
    let window = WindowSpec::new(a.window, a.hop).map_err(|e| format!("--window/--hop: {e}"))?;
    for (flag, v) in [("--freq-min", a.freq_min), ("--freq-max", a.freq_max)] {
        if let Some(v) = v {
            if finite(flag, v)? < 0.0 {
                return Err(format!("{flag} {v}: must be non-negative"));
            }
        }
    }
    if let (Some(lo), Some(hi)) = (a.freq_min, a.freq_max) {
        if lo >= hi {
            return Err(format!("--freq-min {lo} must be below --freq-max {hi}"));
        }
    }
    let amp = (a.amp_min.unwrap_or(-1.0), a.amp_max.unwrap_or(1.0));
    for (flag, v) in [("--amp-min", amp.0), ("--amp-max", amp.1)] {
        if !(-1.0..=1.0).contains(&finite(flag, v)?) {
            return Err(format!("{flag} {v}: must lie in [-1, 1]"));
        }
    }
    if amp.0 >= amp.1 {
        return Err(format!(
            "--amp-min {} must be below --amp-max {}",
            amp.0, amp.1
        ));
    }
    if a.width == 0 || a.height == 0 {
        return Err(format!(
            "--width/--height {}x{}: must be positive",
            a.width, a.height
        ));
    }
    let buckets = a.buckets.unwrap_or(2 * a.width);
    if buckets == 0 {
        return Err("--buckets 0: must be at least 1".into());
    }
    let waveform = matches!(a.mode, Mode::Waveform | Mode::Both)
        .then(|| a.format.unwrap_or(Format::Svg).ext());
    let spectrogram = matches!(a.mode, Mode::Spectrogram | Mode::Both)
        .then(|| a.format.unwrap_or(Format::Png).ext());
    let needs_axes = waveform == Some("svg") || spectrogram == Some("svg");
    if needs_axes && PlotArea::for_canvas(a.width, a.height).is_err() {
        return Err(format!(
            "--width/--height {}x{}: SVG output needs at least 73x49 pixels",
            a.width, a.height
        ));
    }
    Ok(RenderPlan {
        waveform,
        spectrogram,
        start: a.start,
        duration: a.duration,
        window,
        freq: (a.freq_min, a.freq_max),
        amp,
        buckets,
        width: a.width,
        height: a.height,
    })
}

impl RenderPlan {
    /// The view range for a file of the given duration and sample rate.
    pub fn view_range(&self, duration: f64, sample_rate: u32) -> Result<ViewRange, String> {
        let nyquist = sample_rate as f64 / 2.0;
        let t0 = self.start.unwrap_or(0.0);
        let t1 = self.duration.map_or(duration, |d| t0 + d);
        let f0 = self.freq.0.unwrap_or(0.0);
        let f1 = self.freq.1.unwrap_or(nyquist);
        let interval = |lo, hi, what: &str| {
            Interval::new(lo, hi).map_err(|_| format!("{what} range [{lo}, {hi}] is empty"))
        };
        let range = ViewRange::new(
            interval(t0, t1, "time")?,
            interval(self.amp.0, self.amp.1, "amplitude")?,
            interval(f0, f1, "frequency")?,
        )
        .map_err(|e| e.to_string())?;
        range.clamp_to(duration, nyquist).map_err(|e| {
            format!("view range outside the file ({duration:.3} s, Nyquist {nyquist} Hz): {e}")
        })
    }
}

struct Output {
    path: PathBuf,
    bytes: Vec<u8>,
}

/// Render the waveform figure from the full decode of `bytes`.
pub fn render_waveform(
    bytes: &[u8],
    title: &str,
    plan: &RenderPlan,
    format: &str,
) -> Result<Vec<u8>, String> {
    let clip = decode_full::<f32>(bytes).map_err(|e| e.to_string())?;
    let range = plan.view_range(clip.duration_seconds(), clip.sample_rate())?;
    let summary = decimate_range(&clip, range.time, plan.buckets).map_err(|e| e.to_string())?;
    match format {
        "svg" => render_waveform_svg(&summary, &range, plan.width, plan.height, title)
            .map(String::into_bytes)
            .map_err(|e| e.to_string()),
        _ => {
            let grid = rasterize_waveform(&summary, &range, plan.width, plan.height)
                .map_err(|e| e.to_string())?;
            render_spectrogram_png(&grid).map_err(|e| e.to_string())
        }
    }
}

/// Render the spectrogram figure, decoding only the requested time slice
/// from `path`.
pub fn render_spectrogram(
    path: &Path,
    title: &str,
    plan: &RenderPlan,
    format: &str,
) -> Result<Vec<u8>, String> {
    let mut reader = BufReader::new(File::open(path).map_err(|e| e.to_string())?);
    let fmt = read_header(&mut reader).map_err(|e| e.to_string())?;
    let range = plan.view_range(fmt.duration_seconds(), fmt.sample_rate)?;
    let req = SliceRequest::new(range.time.lo, range.time.span());
    let clip = decode_slice_from::<f32, _>(&mut reader, req).map_err(|e| e.to_string())?;
    let m = spectrogram(&clip, &plan.window).map_err(|e| e.to_string())?;
    let m = crop_to_range(&m, &range).map_err(|e| e.to_string())?;
    match format {
        "svg" => {
            let area = PlotArea::for_canvas(plan.width, plan.height).map_err(|e| e.to_string())?;
            let grid = rasterize_spectrogram(
                &m,
                area.width.round() as usize,
                area.height.round() as usize,
            )
            .map_err(|e| e.to_string())?;
            render_spectrogram_svg(&grid, &m.meta, plan.width, plan.height, title)
                .map(String::into_bytes)
                .map_err(|e| e.to_string())
        }
        _ => {
            let grid =
                rasterize_spectrogram(&m, plan.width, plan.height).map_err(|e| e.to_string())?;
            render_spectrogram_png(&grid).map_err(|e| e.to_string())
        }
    }
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn render_file(path: &Path, out_dir: &Path, plan: &RenderPlan) -> Result<Vec<Output>, String> {
    let title = display_name(path);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| title.clone());
    let mut outputs = Vec::new();
    if let Some(ext) = plan.waveform {
        let bytes = std::fs::read(path).map_err(|e| e.to_string())?;
        outputs.push(Output {
            path: out_dir.join(format!("{stem}.waveform.{ext}")),
            bytes: render_waveform(&bytes, &title, plan, ext)?,
        });
    }
    if let Some(ext) = plan.spectrogram {
        outputs.push(Output {
            path: out_dir.join(format!("{stem}.spectrogram.{ext}")),
            bytes: render_spectrogram(path, &title, plan, ext)?,
        });
    }
    Ok(outputs)
}

/// Write through a temporary file in the same directory and rename, so a
/// failed write never leaves a partial file behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn render_all(paths: &[PathBuf], out_dir: &Path, plan: &RenderPlan, diag: &mut Diagnostics) -> i32 {
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        diag.line(
            "ERROR",
            &out_dir.display().to_string(),
            &format!("cannot create output directory: {e}"),
        );
        return EXIT_FILE_FAILED;
    }
    // Render in parallel; write and report in input order so collisions and
    // diagnostics are deterministic.
    let results: Vec<Result<Vec<Output>, String>> = paths
        .par_iter()
        .map(|p| render_file(p, out_dir, plan))
        .collect();
    let mut written = std::collections::HashSet::new();
    let mut failed = false;
    for (path, result) in paths.iter().zip(results) {
        let name = path.display().to_string();
        match result {
            Ok(outputs) => {
                for o in outputs {
                    if o.path.exists() {
                        let why = if written.contains(&o.path) {
                            "written earlier in this run"
                        } else {
                            "already exists"
                        };
                        diag.line(
                            "WARN",
                            &name,
                            &format!("overwriting {} ({why})", o.path.display()),
                        );
                    }
                    match write_atomic(&o.path, &o.bytes) {
                        Ok(()) => {
                            diag.line("INFO", &name, &format!("wrote {}", o.path.display()));
                            written.insert(o.path);
                        }
                        Err(e) => {
                            failed = true;
                            diag.line(
                                "ERROR",
                                &name,
                                &format!("cannot write {}: {e}", o.path.display()),
                            );
                        }
                    }
                }
            }
            Err(e) => {
                failed = true;
                diag.line("ERROR", &name, &e);
            }
        }
    }
    if failed {
        EXIT_FILE_FAILED
    } else {
        EXIT_OK
    }
}

fn info(paths: &[PathBuf], out: &mut dyn Write, diag: &mut Diagnostics) -> i32 {
    let mut failed = false;
    for path in paths {
        let name = path.display().to_string();
        let header = File::open(path)
            .map_err(|e| e.to_string())
            .and_then(|f| read_header(&mut BufReader::new(f)).map_err(|e| e.to_string()));
        match header {
            Ok(fmt) => {
                let format = if fmt.audio_format_code == 3 {
                    "float"
                } else {
                    "pcm"
                };
                let _ = writeln!(out, "{name}");
                let _ = writeln!(out, "  sample_rate: {}", fmt.sample_rate);
                let _ = writeln!(out, "  channels: {}", fmt.channel_count);
                let _ = writeln!(out, "  bits: {}", fmt.bits_per_sample);
                let _ = writeln!(out, "  format: {format}");
                let _ = writeln!(out, "  frames: {}", fmt.frame_count());
                let _ = writeln!(out, "  duration: {:.6}", fmt.duration_seconds());
                if fmt.is_truncated() {
                    diag.line(
                        "WARN",
                        &name,
                        &format!(
                            "data chunk truncated: {} of {} declared bytes present",
                            fmt.data_length, fmt.declared_data_length
                        ),
                    );
                }
            }
            Err(e) => {
                failed = true;
                diag.line("ERROR", &name, &e);
            }
        }
    }
    if failed {
        EXIT_FILE_FAILED
    } else {
        EXIT_OK
    }
}
