//! Batch front-end: `generate`, `pulse`, `corrupt`, `denoise`, `eval`, `render`, `bench`.
//!
//! Every command writes its data outputs deterministically from its flags and seed and leaves a
//! `<file>.prov.json` sidecar next to each artifact. Existing outputs are never replaced unless
//! `--force` is given. Exit codes: 0 success, 2 usage error, 3 data error, 4 partial evaluation
//! failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::{s, Array2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::filters::GaussianConfig;
use crate::dataset::{generate_dataset, DatasetConfig, MANIFEST_FILE};
use crate::io::{manifest::manifest_root, read_tensor, render_heatmap, sidecar_path, write_tensor, DatasetManifest, Provenance, Tensor};
use crate::methods::{build_method, MethodKind, MethodParams};
use crate::metrics::{evaluate_dataset, EvalReport};
use crate::noise::{add_speckle, NoiseKind, NoiseSpec};
use crate::sim::{simulate_pulse, FieldSequence, GaussianPulse, Grid2D};
use crate::spectral::{denoise_field, denoise_sequence, BinInfo, Denoiser};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sfd", version, about = "Sound-field simulation, denoising and evaluation")]
pub struct Cli {
    /// Worker threads (default: logical cores).
    #[arg(long, global = true, env = "SFD_THREADS")]
    pub threads: Option<usize>,
    /// More output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a harmonic point-source dataset.
    Generate(GenerateArgs),
    /// Simulate a Gaussian pressure pulse with the FDTD solver.
    Pulse(PulseArgs),
    /// Add noise to a stored field or sequence.
    Corrupt(CorruptArgs),
    /// Denoise a sequence (3D real) or a single-frequency field (2D complex).
    Denoise(DenoiseArgs),
    /// Score methods on a dataset.
    Eval(EvalArgs),
    /// Render a tensor slice as a PNG heatmap.
    Render(RenderArgs),
    /// Time methods on synthetic fields.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Samples per source count.
    #[arg(long)]
    pub count: usize,
    /// Source counts.
    #[arg(long = "n", value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write noisy twins.
    #[arg(long, value_parser = parse_noise)]
    pub noise: Option<NoiseKind>,
    /// Pixels per side of the unit-square grid.
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PulseArgs {
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Side length of the measurement square.
    #[arg(long, default_value_t = 1.0)]
    pub side: f64,
    /// Sound speed.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Courant number c dt / dx.
    #[arg(long, default_value_t = 0.5)]
    pub cfl: f64,
    #[arg(long, default_value_t = 100)]
    pub frames: usize,
    /// Pulse standard deviation in length units.
    #[arg(long, default_value_t = 0.05)]
    pub width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Pulse center x,y.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
    pub center: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CorruptArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_noise, default_value = "white")]
    pub noise: NoiseKind,
    /// White-noise standard deviation; drawn from the dataset distribution when absent.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Speckle amplitude; drawn when absent.
    #[arg(long)]
    pub speckle_amp: Option<f64>,
    /// Speckle correlation length in pixels; drawn when absent.
    #[arg(long)]
    pub speckle_corr: Option<f64>,
    /// Field amplitude used for the parameter draws.
    #[arg(long, default_value_t = crate::sim::FIELD_AMPLITUDE)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Network weight bundle for the dnn method.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Gaussian and median kernel size.
    #[arg(long, default_value_t = GaussianConfig::default().ksize)]
    pub ksize: usize,
    #[arg(long, default_value_t = GaussianConfig::default().sigma)]
    pub gaussian_sigma: f64,
    #[arg(long, default_value_t = 7)]
    pub nlm_patch: usize,
    #[arg(long, default_value_t = 23)]
    pub nlm_search: usize,
    /// NLM strength h as a multiple of the estimated noise level.
    #[arg(long, default_value_t = 2.0)]
    pub nlm_h_mult: f64,
    #[arg(long, default_value_t = 10.0)]
    pub wff_window: f64,
    #[arg(long, default_value_t = -std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
    pub wff_lo: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
    pub wff_hi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub wff_step: f64,
    #[arg(long, default_value_t = 3.0)]
    pub wff_threshold: f64,
    #[arg(long, default_value_t = 4)]
    pub stbpf_order: u32,
    #[arg(long, default_value_t = 0.5)]
    pub stbpf_lo: f64,
    #[arg(long, default_value_t = 1.2)]
    pub stbpf_hi: f64,
    /// Sound speed.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Pixel pitch; defaults to one over the image width.
    #[arg(long)]
    pub dx: Option<f64>,
}

impl MethodArgs {
    pub fn params(&self, width: usize) -> MethodParams {
        let mut p = MethodParams::default();
        p.weights = self.weights.clone();
        p.gaussian.ksize = self.ksize;
        p.gaussian.sigma = self.gaussian_sigma;
        p.median.ksize = self.ksize;
        p.nlm.patch = self.nlm_patch;
        p.nlm.search = self.nlm_search;
        p.nlm.h_mult = self.nlm_h_mult;
        p.wff.window_sigma = self.wff_window;
        p.wff.freq_lo = self.wff_lo;
        p.wff.freq_hi = self.wff_hi;
        p.wff.freq_step = self.wff_step;
        p.wff.threshold_mult = self.wff_threshold;
        p.stbpf.order = self.stbpf_order;
        p.stbpf.lo_ratio = self.stbpf_lo;
        p.stbpf.hi_ratio = self.stbpf_hi;
        p.stbpf.c = self.c;
        p.stbpf.dx = self.dx.unwrap_or(1.0 / width.max(1) as f64);
        p
    }
}

#[derive(Debug, Clone, Args)]
pub struct DenoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_method)]
    pub method: MethodKind,
    #[command(flatten)]
    pub params: MethodArgs,
    /// Frame interval of a sequence; read from the input's sidecar when absent, else 1.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Wavenumber of a single-frequency field (omega = k c).
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "identity,gaussian,median,stbpf")]
    pub methods: Vec<MethodKind>,
    #[command(flatten)]
    pub params: MethodArgs,
    /// JSON report; the table goes next to it as .txt.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Re,
    Im,
    Abs,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Color range lo,hi.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [-1.0, 1.0], allow_hyphen_values = true)]
    pub range: Vec<f64>,
    /// Frame of a 3D tensor.
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Channel of a complex tensor.
    #[arg(long, value_enum, default_value_t = Channel::Re)]
    pub channel: Channel,
    /// Divide by the slice's largest absolute value first.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "64,128")]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "identity,gaussian,stbpf")]
    pub methods: Vec<MethodKind>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[command(flatten)]
    pub params: MethodArgs,
    /// Also write the table as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

fn parse_method(s: &str) -> Result<MethodKind, String> {
    s.parse()
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    s.parse()
}

/// Refuses to overwrite `path` unless `force`.
pub fn check_output(path: &Path, force: bool) -> Result<(), Error> {
    if path.exists() && !force {
        return Err(Error::Usage(format!("{} exists; pass --force to overwrite", path.display())));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent.display().to_string(), e))?;
    }
    Ok(())
}

fn write_provenance(prov: &Provenance, artifact: &Path) -> Result<(), Error> {
    prov.write_for(artifact)
        .map_err(|e| Error::io(sidecar_path(artifact).display().to_string(), e))
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<DatasetManifest, Error> {
    let grid = Grid2D::square(args.size)?;
    let cfg = DatasetConfig {
        count_per_n: args.count,
        n_values: args.n_values.clone(),
        global_seed: args.seed,
        noise: args.noise,
        grid,
    };
    let manifest_path = args.out.join(MANIFEST_FILE);
    check_output(&manifest_path, args.force)?;
    let manifest = generate_dataset(&cfg, &args.out, args.force)?;
    let mut prov = Provenance::new("generate");
    prov.seed = Some(args.seed);
    prov.params = serde_json::json!({
        "count_per_n": args.count,
        "n_values": args.n_values,
        "noise": args.noise,
        "grid": grid,
    });
    write_provenance(&prov, &manifest_path)?;
    Ok(manifest)
}

pub fn cmd_pulse(args: &PulseArgs) -> Result<FieldSequence, Error> {
    check_output(&args.out, args.force)?;
    let grid = Grid2D::new(args.size, args.size, args.side)?;
    let pulse = GaussianPulse {
        center: (args.center[0], args.center[1]),
        width: args.width,
        amplitude: args.amplitude,
    };
    let run = simulate_pulse(&grid, args.c, args.cfl, args.frames, &pulse)?;
    write_tensor(&args.out, &Tensor::from_real3(&run.sequence.data))?;
    let mut prov = Provenance::new("pulse");
    prov.params = serde_json::json!({
        "grid": grid,
        "c": args.c,
        "cfl": args.cfl,
        "frames": args.frames,
        "width": args.width,
        "amplitude": args.amplitude,
        "center": args.center,
        "dt": run.sequence.dt,
        "dx": grid.dx(),
    });
    write_provenance(&prov, &args.out)?;
    Ok(run.sequence)
}

pub fn cmd_corrupt(args: &CorruptArgs) -> Result<Tensor, Error> {
    check_output(&args.out, args.force)?;
    let input = read_tensor(&args.input)?;
    let mut params = ChaCha8Rng::seed_from_u64(args.seed);
    let mut spec = NoiseSpec::sample(&mut params, args.noise, args.amplitude);
    if let Some(s) = args.sigma {
        spec.white_sigma = s;
    }
    if let Some(a) = args.speckle_amp {
        spec.speckle_amp = a;
    }
    if let Some(c) = args.speckle_corr {
        spec.speckle_corr_len = c;
    }
    if args.noise == NoiseKind::White {
        spec.speckle_amp = 0.0;
        spec.speckle_corr_len = 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    rng.set_stream(1);
    let out = match input.shape().len() {
        2 if input.is_complex() => {
            let field = input.to_complex2()?;
            Tensor::from_complex2(&spec.apply(&field, &mut rng))
        }
        3 if !input.is_complex() => {
            let mut data = input.to_real3()?;
            if spec.white_sigma > 0.0 {
                let normal = Normal::new(0.0, spec.white_sigma).map_err(|e| Error::Usage(e.to_string()))?;
                data.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
            }
            if spec.kind == NoiseKind::WhiteSpeckle && spec.speckle_amp > 0.0 {
                for mut frame in data.outer_iter_mut() {
                    let zero = Array2::<Complex64>::zeros(frame.dim());
                    let pattern = add_speckle(&zero, spec.speckle_amp, spec.speckle_corr_len, &mut rng);
                    frame.zip_mut_with(&pattern, |v, z| *v += z.re);
                }
            }
            Tensor::from_real3(&data)
        }
        _ => {
            return Err(Error::Data(format!(
                "corrupt expects a 2D complex field or a 3D real sequence, got {:?} {}",
                input.shape(),
                input.dtype().name()
            )))
        }
    };
    write_tensor(&args.out, &out)?;
    let mut prov = Provenance::new("corrupt");
    prov.seed = Some(args.seed);
    prov.params = serde_json::to_value(spec).expect("noise spec serializes");
    prov.inputs = vec![args.input.display().to_string()];
    write_provenance(&prov, &args.out)?;
    Ok(out)
}

/// Frame interval recorded in a `pulse` sidecar, if any.
fn sidecar_dt(input: &Path) -> Option<f64> {
    let text = std::fs::read_to_string(sidecar_path(input)).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("params")?.get("dt")?.as_f64()
}

pub fn cmd_denoise(args: &DenoiseArgs) -> Result<Tensor, Error> {
    check_output(&args.out, args.force)?;
    let input = read_tensor(&args.input)?;
    let width = input.shape().last().copied().unwrap_or(1);
    let params = args.params.params(width);
    let method = build_method(args.method, &params)?;
    let mut prov_params = serde_json::json!({ "method_params": params.describe(args.method) });
    let out = match input.shape().len() {
        3 if !input.is_complex() => {
            let data = input.to_real3()?;
            let (_, ny, nx) = data.dim();
            let dx = params.stbpf.dx;
            let dt = args.dt.or_else(|| sidecar_dt(&args.input)).unwrap_or(1.0);
            let grid = Grid2D::new(nx, ny, nx as f64 * dx)?;
            let seq = FieldSequence::new(data, dt, grid)?;
            prov_params["dt"] = serde_json::json!(dt);
            Tensor::from_real3(&denoise_sequence(&seq, method.as_ref())?.data)
        }
        2 if input.is_complex() => {
            let field = input.to_complex2()?;
            let k = match (args.k, args.method) {
                (Some(k), _) => k,
                (None, MethodKind::Stbpf) => {
                    return Err(Error::Usage("stbpf on a single field needs --k".into()));
                }
                (None, _) => 0.0,
            };
            let bin = BinInfo {
                index: 1,
                omega: k * params.stbpf.c,
                first_omega: None,
            };
            prov_params["k"] = serde_json::json!(k);
            Tensor::from_complex2(&denoise_field(&field, &bin, method.as_ref())?)
        }
        _ => {
            return Err(Error::Data(format!(
                "denoise expects a 3D real sequence or a 2D complex field, got {:?} {}",
                input.shape(),
                input.dtype().name()
            )))
        }
    };
    write_tensor(&args.out, &out)?;
    let mut prov = Provenance::new("denoise");
    prov.method = Some(args.method.to_string());
    prov.params = prov_params;
    prov.inputs = vec![args.input.display().to_string()];
    write_provenance(&prov, &args.out)?;
    Ok(out)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<EvalReport, Error> {
    check_output(&args.out, args.force)?;
    let manifest = DatasetManifest::read(&args.manifest)?;
    let root = manifest_root(&args.manifest);
    manifest.validate_paths(&root)?;
    let params = args.params.params(manifest.grid.nx);
    let methods: Vec<Box<dyn Denoiser>> = args
        .methods
        .iter()
        .map(|&m| build_method(m, &params))
        .collect::<Result<_, _>>()?;
    let refs: Vec<&dyn Denoiser> = methods.iter().map(|m| m.as_ref()).collect();
    let config = serde_json::json!({
        "methods": args.methods.iter().map(|m| (m.name().to_string(), params.describe(*m))).collect::<serde_json::Map<_, _>>(),
        "manifest": args.manifest.display().to_string(),
        "samples": manifest.samples.len(),
    });
    let report = evaluate_dataset(&manifest, &root, &refs, config);
    report.write(&args.out)?;
    let mut prov = Provenance::new("eval");
    prov.seed = Some(manifest.global_seed);
    prov.params = report.config.clone();
    prov.inputs = vec![args.manifest.display().to_string()];
    write_provenance(&prov, &args.out)?;
    Ok(report)
}

pub fn cmd_render(args: &RenderArgs) -> Result<(), Error> {
    check_output(&args.out, args.force)?;
    let input = read_tensor(&args.input)?;
    let (lo, hi) = (args.range[0], args.range[1]);
    let mut image: Array2<f64> = match (input.shape().len(), input.is_complex()) {
        (2, false) => input.to_real2()?,
        (3, false) => {
            let data = input.to_real3()?;
            if args.frame >= data.dim().0 {
                return Err(Error::Usage(format!("frame {} out of range 0..{}", args.frame, data.dim().0)));
            }
            data.slice(s![args.frame, .., ..]).to_owned()
        }
        (2, true) => {
            let f = input.to_complex2()?;
            match args.channel {
                Channel::Re => f.mapv(|z| z.re),
                Channel::Im => f.mapv(|z| z.im),
                Channel::Abs => f.mapv(|z| z.norm()),
            }
        }
        _ => return Err(Error::Data(format!("cannot render tensor of shape {:?}", input.shape()))),
    };
    if args.normalize {
        let m = image.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if m > 0.0 {
            image.mapv_inplace(|v| v / m);
        }
    }
    render_heatmap(&image, &args.out, (lo, hi))?;
    let mut prov = Provenance::new("render");
    prov.params = serde_json::json!({
        "range": [lo, hi],
        "frame": args.frame,
        "channel": format!("{:?}", args.channel).to_lowercase(),
        "normalize": args.normalize,
    });
    prov.inputs = vec![args.input.display().to_string()];
    write_provenance(&prov, &args.out)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub size: usize,
    pub reps: usize,
    pub median_ms: f64,
}

/// Median wall time per method and size on a noisy synthetic field.
pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<BenchRow>, Error> {
    if let Some(out) = &args.out {
        check_output(out, args.force)?;
    }
    let reps = args.reps.max(1);
    let mut rows = Vec::new();
    for &size in &args.sizes {
        let grid = Grid2D::square(size)?;
        let sample = crate::dataset::generate_sample("bench".into(), 1, 3, Some(NoiseKind::White), &grid)?;
        let field = sample.noisy.expect("noise requested");
        let bin = BinInfo::harmonic(sample.scene.k);
        let params = args.params.params(size);
        for &kind in &args.methods {
            let method = build_method(kind, &params)?;
            let mut times = Vec::with_capacity(reps);
            for _ in 0..reps {
                let t0 = Instant::now();
                let out = denoise_field(&field, &bin, method.as_ref())?;
                times.push(t0.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(out);
            }
            times.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                method: kind.to_string(),
                size,
                reps,
                median_ms: times[reps / 2],
            });
        }
    }
    if let Some(out) = &args.out {
        let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
        text.push('\n');
        std::fs::write(out, text).map_err(|e| Error::io(out.display().to_string(), e))?;
    }
    Ok(rows)
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = format!("{:<10} {:>6} {:>5} {:>12}\n", "method", "size", "reps", "median_ms");
    for r in rows {
        out.push_str(&format!("{:<10} {:>6} {:>5} {:>12.3}\n", r.method, r.size, r.reps, r.median_ms));
    }
    out
}

/// Exit code for an error: usage problems map to 2, everything else to 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::Dataset(crate::dataset::DatasetError::Exists(_)) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn dispatch(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Generate(a) => {
            let m = cmd_generate(a)?;
            println!("wrote {} samples to {} (seed {})", m.samples.len(), a.out.display(), m.global_seed);
        }
        Command::Pulse(a) => {
            let seq = cmd_pulse(a)?;
            println!("wrote {} frames to {} (dt {:e})", seq.n_frames(), a.out.display(), seq.dt);
        }
        Command::Corrupt(a) => {
            cmd_corrupt(a)?;
            println!("wrote {}", a.out.display());
        }
        Command::Denoise(a) => {
            cmd_denoise(a)?;
            println!("wrote {}", a.out.display());
        }
        Command::Eval(a) => {
            let report = cmd_eval(a)?;
            print!("{}", report.to_table());
            if report.is_partial() {
                for f in &report.failures {
                    eprintln!("{} [{}]: {}", f.id, f.method, f.error);
                }
                return Ok(EXIT_PARTIAL);
            }
        }
        Command::Render(a) => {
            cmd_render(a)?;
            println!("wrote {}", a.out.display());
        }
        Command::Bench(a) => {
            let rows = cmd_bench(a)?;
            print!("{}", bench_table(&rows));
        }
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command line inside a pool of the requested size and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("sfd: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sfd: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (program name first) and runs; clap's own errors exit with 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}
