use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use radon_kit::art::{ArtSolver, KaczmarzConfig};
use radon_kit::fbp::filter::{FilterFamily, FilterSpec};
use radon_kit::geometry::{parallel_beam_samples, scattered_samples, SampleLayout};
use radon_kit::image::rmse;
use radon_kit::kernel::{KernelModel, WindowFamily, WindowMode, WindowSpec};
use radon_kit::phantom::{builtin, rasterize, Phantom};
use radon_kit::sinogram::{add_noise, sample, NoiseKind, NoiseSpec};
use radon_kit::sweep::{self, Method, Metric, SweepSpec};
use radon_kit::{Error, ImageGrid, Sinogram};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "radon-kit", version, about = "Phantoms, sinograms and tomographic reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rasterize a builtin phantom.
    Phantom {
        #[arg(long, default_value = "crescent")]
        name: String,
        #[arg(long, default_value_t = 64)]
        size: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the Radon transform of a builtin phantom.
    Sinogram {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Reconstruct an image from a sinogram.
    Reconstruct {
        #[command(subcommand)]
        method: MethodCmd,
    },
    /// Reconstruct once per value of one parameter and tabulate the results.
    Sweep {
        #[command(subcommand)]
        method: SweepCmd,
    },
    /// Compare images.
    Eval {
        #[command(subcommand)]
        what: EvalCmd,
    },
}

#[derive(Subcommand, Debug)]
enum MethodCmd {
    Fbp(Run<FbpArgs>),
    Art(Run<ArtArgs>),
    Kernel(Run<KernelArgs>),
}

#[derive(Subcommand, Debug)]
enum SweepCmd {
    Fbp(SweepRun<FbpArgs>),
    Art(SweepRun<ArtArgs>),
    Kernel(SweepRun<KernelArgs>),
}

#[derive(Subcommand, Debug)]
enum EvalCmd {
    /// Root mean square difference of two CSV images.
    Rmse {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Run<M: Args> {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[command(flatten)]
    method: M,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SweepRun<M: Args> {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[command(flatten)]
    method: M,
    /// eps | nu | rho | L | L2 | h | lambda
    #[arg(long)]
    param: String,
    #[arg(long, allow_negative_numbers = true)]
    start: f64,
    #[arg(long, allow_negative_numbers = true)]
    stop: f64,
    #[arg(long)]
    step: f64,
    /// rmse | rcond | time
    #[arg(long, default_value = "rmse")]
    metric: String,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Source {
    /// Read this sinogram CSV instead of sampling a phantom.
    #[arg(long, conflicts_with_all = ["phantom", "scattered"])]
    sinogram: Option<PathBuf>,
    #[arg(long)]
    phantom: Option<String>,
    #[arg(long, default_value_t = 18)]
    angles: usize,
    #[arg(long, default_value_t = 20)]
    offsets: usize,
    #[arg(long, default_value_t = 0.05)]
    spacing: f64,
    /// Use this many random lines instead of the parallel-beam grid.
    #[arg(long)]
    scattered: Option<usize>,
    /// gaussian:MEAN,VAR | poisson:SCALE | saltpepper:DENSITY[,AMP]
    #[arg(long)]
    noise: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Output {
    /// Images: .csv for raw values, anything else for PGM.
    #[arg(long)]
    out: PathBuf,
    /// Sidecar key=value report; defaults to OUT.report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FbpArgs {
    /// ram-lak | shepp-logan | cosine
    #[arg(long, default_value = "shepp-logan")]
    filter: String,
    /// nearest | linear | cubic
    #[arg(long, default_value = "linear")]
    interp: String,
    /// I | II
    #[arg(long, default_value = "I")]
    algorithm: String,
    /// Band limit; 1/(2d) when omitted.
    #[arg(long)]
    bandlimit: Option<f64>,
}

#[derive(Args, Debug)]
struct ArtArgs {
    /// kaczmarz | lsq; chosen by system shape when omitted.
    #[arg(long)]
    method: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 50)]
    sweeps: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// gaussian | imq | mq | wendland20
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    /// trunc | gauss | compact | none
    #[arg(long, default_value = "gauss")]
    window: String,
    /// all | diag
    #[arg(long, default_value = "all")]
    mode: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// IMQ support, or the truncation radius for other kernels.
    #[arg(long = "L1")]
    l1: Option<f64>,
    /// Truncation window radius.
    #[arg(long = "L2")]
    l2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    nu: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

trait MethodArgs {
    fn method(&self, sino: &Sinogram) -> anyhow::Result<Method>;
    fn options(&self) -> Vec<(&'static str, String)>;
}

impl MethodArgs for FbpArgs {
    fn method(&self, sino: &Sinogram) -> anyhow::Result<Method> {
        let family: FilterFamily = self.filter.parse()?;
        let filter = match (self.bandlimit, sino.samples.layout) {
            (Some(l), _) => FilterSpec::new(family, l)?,
            (None, SampleLayout::Parallel { spacing, .. }) => FilterSpec::for_spacing(family, spacing)?,
            (None, SampleLayout::Scattered) => return Err(Error::ScatteredLayout.into()),
        };
        Ok(Method::Fbp { filter, interp: self.interp.parse()?, algorithm: self.algorithm.parse()? })
    }

    fn options(&self) -> Vec<(&'static str, String)> {
        vec![
            ("filter", self.filter.clone()),
            ("interp", self.interp.clone()),
            ("fbp_algorithm", self.algorithm.clone()),
            ("bandlimit", self.bandlimit.map_or("auto".into(), |v| v.to_string())),
        ]
    }
}

impl MethodArgs for ArtArgs {
    fn method(&self, _: &Sinogram) -> anyhow::Result<Method> {
        let cfg = KaczmarzConfig { lambda: self.lambda, max_sweeps: self.sweeps, tol: self.tol, initial: None };
        cfg.validate()?;
        let solver = match self.method.as_deref() {
            None => ArtSolver::Auto(cfg),
            Some("kaczmarz") => ArtSolver::Kaczmarz(cfg),
            Some("lsq") => ArtSolver::LeastSquares,
            Some(other) => return Err(Error::InvalidArgument(format!("unknown ART method '{other}'")).into()),
        };
        Ok(Method::Art { solver })
    }

    fn options(&self) -> Vec<(&'static str, String)> {
        vec![
            ("art_method", self.method.clone().unwrap_or_else(|| "auto".into())),
            ("lambda", self.lambda.to_string()),
            ("sweeps", self.sweeps.to_string()),
            ("tol", self.tol.to_string()),
        ]
    }
}

impl MethodArgs for KernelArgs {
    fn method(&self, sino: &Sinogram) -> anyhow::Result<Method> {
        let model = match self.kernel.as_str() {
            "gaussian" => KernelModel::Gaussian { eps: self.eps.unwrap_or(30.0) },
            "imq" => {
                let l1 = match self.l1 {
                    Some(l) => l,
                    None => match KernelModel::default_imq(&sino.samples) {
                        KernelModel::InverseMultiquadric { l1, .. } => l1 * self.scale,
                        _ => unreachable!(),
                    },
                };
                KernelModel::InverseMultiquadric { eps: self.eps.unwrap_or(30.0), l1 }
            }
            "mq" => KernelModel::Multiquadric { rho: self.rho, eps: self.eps.unwrap_or(30.0) },
            "wendland20" | "wendland" => KernelModel::Wendland20 { eps: self.eps.unwrap_or(1.1) },
            other => return Err(Error::InvalidArgument(format!("unknown kernel '{other}'")).into()),
        };
        model.validate()?;
        let imq = matches!(model, KernelModel::InverseMultiquadric { .. });
        let family = match self.window.as_str() {
            "trunc" | "truncation" => {
                let own = if imq { None } else { self.l1 };
                WindowFamily::Truncation { l: self.l2.or(own).unwrap_or(std::f64::consts::SQRT_2) }
            }
            "gauss" | "gaussian" => WindowFamily::Gaussian { nu: self.nu },
            "compact" => WindowFamily::Compact { nu: self.nu },
            "none" => WindowFamily::None,
            other => return Err(Error::InvalidArgument(format!("unknown window '{other}'")).into()),
        };
        let mode = match self.mode.as_str() {
            "all" => WindowMode::AllEntries,
            "diag" => WindowMode::DiagonalOnly,
            other => return Err(Error::InvalidArgument(format!("unknown window mode '{other}'")).into()),
        };
        Ok(Method::Kernel { model, window: WindowSpec::new(family, mode)?, scale: self.scale })
    }

    fn options(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map_or("auto".into(), |x| x.to_string());
        vec![
            ("kernel", self.kernel.clone()),
            ("window", self.window.clone()),
            ("mode", self.mode.clone()),
            ("eps", opt(self.eps)),
            ("rho", self.rho.to_string()),
            ("L1", opt(self.l1)),
            ("L2", opt(self.l2)),
            ("nu", self.nu.to_string()),
            ("scale", self.scale.to_string()),
        ]
    }
}

/// key=value lines, written next to the main output.
struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    fn new(command: &str) -> Self {
        let argv: Vec<String> = std::env::args().map(|a| shell_quote(&a)).collect();
        let mut r = Self { lines: Vec::new() };
        r.push("command", command);
        r.push("argv", argv.join(" "));
        r.push("version", env!("CARGO_PKG_VERSION"));
        r
    }

    fn push(&mut self, k: impl Into<String>, v: impl ToString) {
        self.lines.push((k.into(), v.to_string()));
    }

    fn write(&self, path: &Path) -> anyhow::Result<()> {
        let text: String = self.lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        fs::write(path, text).with_context(|| format!("writing report {}", path.display()))
    }
}

fn shell_quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_./:,=+".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "'\\''"))
    }
}

fn report_path(out: &Path, explicit: &Option<PathBuf>) -> PathBuf {
    explicit.clone().unwrap_or_else(|| {
        let mut p = out.as_os_str().to_owned();
        p.push(".report");
        PathBuf::from(p)
    })
}

fn log(stage: &str, start: Instant) {
    eprintln!("[radon-kit] {stage} ({:.3} s)", start.elapsed().as_secs_f64());
}

fn write_image(img: &ImageGrid, path: &Path) -> anyhow::Result<&'static str> {
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let (text, fmt) = if csv { (img.to_csv(), "csv") } else { (img.to_pgm(), "pgm") };
    fs::write(path, text).with_context(|| format!("writing image {}", path.display()))?;
    Ok(fmt)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// The sinogram plus the phantom behind it, when that is a builtin.
fn load_source(src: &Source, report: &mut Report) -> anyhow::Result<(Sinogram, Option<Phantom>)> {
    let t = Instant::now();
    let (sino, phantom) = if let Some(path) = &src.sinogram {
        let text = fs::read_to_string(path).with_context(|| format!("reading sinogram {}", path.display()))?;
        let sino = Sinogram::read_csv(&text)?;
        let ph = match &sino.provenance.phantom {
            Some(name) => builtin(name).ok(),
            None => None,
        };
        report.push("sinogram", path.display());
        (sino, ph)
    } else {
        let name = src.phantom.as_deref().unwrap_or("crescent");
        let ph = builtin(name)?;
        let samples = match src.scattered {
            Some(n) => scattered_samples(n, src.seed)?,
            None => parallel_beam_samples(src.angles, src.offsets, src.spacing)?,
        };
        let mut sino = sample(&ph, &samples);
        if let Some(spec) = &src.noise {
            let kind: NoiseKind = spec.parse()?;
            sino = add_noise(&sino, &NoiseSpec { kind, seed: src.seed })?;
        }
        (sino, Some(ph))
    };
    match sino.samples.layout {
        SampleLayout::Parallel { angles, half_offsets, spacing } => {
            report.push("layout", "parallel");
            report.push("angles", angles);
            report.push("offsets", half_offsets);
            report.push("spacing", spacing);
        }
        SampleLayout::Scattered => {
            report.push("layout", "scattered");
            report.push("lines", sino.len());
        }
    }
    report.push("phantom", sino.provenance.phantom.as_deref().unwrap_or("unknown"));
    report.push("noise", sino.provenance.noise.as_deref().unwrap_or("none"));
    report.push("seed", src.seed);
    report.push("time_sinogram_s", format!("{:.6}", t.elapsed().as_secs_f64()));
    log("sinogram ready", t);
    Ok((sino, phantom))
}

fn reconstruct<M: Args + MethodArgs>(name: &str, run: &Run<M>) -> anyhow::Result<()> {
    let mut report = Report::new(&format!("reconstruct {name}"));
    let (sino, phantom) = load_source(&run.source, &mut report)?;
    let method = run.method.method(&sino)?;
    report.push("algorithm", name);
    report.push("size", run.size);
    for (k, v) in run.method.options() {
        report.push(k, v);
    }
    let t = Instant::now();
    let out = sweep::reconstruct(&method, &sino, run.size, phantom.as_ref())?;
    log(&format!("{name} reconstruction"), t);
    report.push("time_reconstruct_s", format!("{:.6}", t.elapsed().as_secs_f64()));
    report.push("method_detail", &out.method_detail);
    if let Some(rc) = out.rcond {
        report.push("rcond", format!("{rc:e}"));
    }
    if let Some(last) = out.residuals.last() {
        report.push("residual", format!("{last:e}"));
        report.push("iterations", out.residuals.len());
    }
    if let Some(ph) = &phantom {
        let e = rmse(&out.image, &rasterize(ph, run.size)?)?;
        report.push("rmse", format!("{e:e}"));
    }
    let (lo, hi) = out.image.min_max();
    report.push("image_min", lo);
    report.push("image_max", hi);
    report.push("format", write_image(&out.image, &run.output.out)?);
    report.push("out", run.output.out.display());
    report.write(&report_path(&run.output.out, &run.output.report))
}

fn run_sweep<M: Args + MethodArgs>(name: &str, run: &SweepRun<M>) -> anyhow::Result<()> {
    let mut report = Report::new(&format!("sweep {name}"));
    let (sino, phantom) = load_source(&run.source, &mut report)?;
    let Some(phantom) = phantom else {
        bail!(Error::InvalidArgument("a sweep needs a builtin phantom as the RMSE reference".into()));
    };
    let spec = SweepSpec {
        param: run.param.parse()?,
        start: run.start,
        stop: run.stop,
        step: run.step,
        metric: run.metric.parse::<Metric>()?,
        method: run.method.method(&sino)?,
        size: run.size,
    };
    report.push("algorithm", name);
    report.push("size", run.size);
    for (k, v) in run.method.options() {
        report.push(k, v);
    }
    report.push("param", spec.param);
    report.push("range", format!("{}:{}:{}", spec.start, spec.stop, spec.step));
    report.push("metric", spec.metric);
    let t = Instant::now();
    let rows = sweep::run_sweep(&spec, &sino, &phantom)?;
    log(&format!("sweep over {} points", rows.len()), t);
    report.push("points", rows.len());
    report.push("failed", rows.iter().filter(|r| r.error.is_some()).count());
    report.push("time_sweep_s", format!("{:.6}", t.elapsed().as_secs_f64()));
    if let Some(best) = sweep::best_row(&rows, spec.metric) {
        report.push("best_value", best.value);
        report.push(format!("best_{}", spec.metric), format!("{:e}", best.metric(spec.metric).unwrap()));
    }
    let csv = sweep::sweep_csv(spec.param, &rows);
    match &run.out {
        Some(path) => {
            write_text(path, &csv)?;
            report.push("out", path.display());
            report.write(&report_path(path, &run.report))?;
        }
        None => {
            print!("{csv}");
            if let Some(p) = &run.report {
                report.write(p)?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Phantom { name, size, output } => {
            let t = Instant::now();
            let ph = builtin(&name)?;
            let img = rasterize(&ph, size)?;
            let mut report = Report::new("phantom");
            report.push("phantom", &ph.name);
            report.push("size", size);
            report.push("format", write_image(&img, &output.out)?);
            report.push("out", output.out.display());
            report.push("time_s", format!("{:.6}", t.elapsed().as_secs_f64()));
            log("phantom written", t);
            report.write(&report_path(&output.out, &output.report))
        }
        Command::Sinogram { source, output } => {
            if source.sinogram.is_some() {
                bail!(Error::InvalidArgument("sinogram generation samples a phantom; drop --sinogram".into()));
            }
            let mut report = Report::new("sinogram");
            let (sino, _) = load_source(&source, &mut report)?;
            write_text(&output.out, &sino.write_csv())?;
            report.push("out", output.out.display());
            report.write(&report_path(&output.out, &output.report))
        }
        Command::Reconstruct { method } => match method {
            MethodCmd::Fbp(r) => reconstruct("fbp", &r),
            MethodCmd::Art(r) => reconstruct("art", &r),
            MethodCmd::Kernel(r) => reconstruct("kernel", &r),
        },
        Command::Sweep { method } => match method {
            SweepCmd::Fbp(r) => run_sweep("fbp", &r),
            SweepCmd::Art(r) => run_sweep("art", &r),
            SweepCmd::Kernel(r) => run_sweep("kernel", &r),
        },
        Command::Eval { what: EvalCmd::Rmse { a, b, report } } => {
            let read = |p: &Path| -> anyhow::Result<ImageGrid> {
                let text = fs::read_to_string(p).with_context(|| format!("reading image {}", p.display()))?;
                Ok(ImageGrid::from_csv(&text).with_context(|| format!("parsing {}", p.display()))?)
            };
            let e = rmse(&read(&a)?, &read(&b)?)?;
            println!("{e:e}");
            if let Some(p) = report {
                let mut r = Report::new("eval rmse");
                r.push("a", a.display());
                r.push("b", b.display());
                r.push("rmse", format!("{e:e}"));
                r.write(&p)?;
            }
            Ok(())
        }
    }
}

/// 2 for numerical failures, 1 for everything the caller can fix.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Singular { .. } | Error::Quadrature { .. } | Error::Domain(_) | Error::NotUnimodal) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
