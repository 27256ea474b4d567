use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pctopo::bosh::{
    bosh_total_loss, BackboneSampler, BackboneSizes, BoshConfig, CompletionMap, CompletionPair, ExternalCommand,
    IdentityMap,
};
use pctopo::degrade::{make_pairs, random_viewpoint, DegradeMode, DegradeSpec, Viewpoint, Weighting};
use pctopo::distance::{ChamferVariant, Reduction};
use pctopo::io::{load_pointcloud, save_pointcloud, write_atomic, Format};
use pctopo::metrics::{aggregate_report, MetricsConfig, PhMetricOptions, PlaneFit, DEFAULT_PH1_BUDGET, DEFAULT_PLANE_K};
use pctopo::ph::{self, parse_diagram_csv, write_diagram_csv, Ph1Algorithm, Ph1Options, DEFAULT_MAX_SIMPLICES};
use pctopo::svg::diagram_svg;
use pctopo::topo::{skeletonize, SkeletonizeOptions, StepSchedule, TopoLossConfig};
use pctopo::{Cloud, Error, FiltrationConvention, Point, Result};

#[derive(Parser)]
#[command(name = "pctopo", version, about = "Topological analysis of 3D point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert between XYZ and ASCII PLY.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value = "auto")]
        from: Format,
        #[arg(long, default_value = "auto")]
        to: Format,
    },
    /// Dataset report over ROOT/<class>/<cloud>.{xyz,ply}.
    Metrics(MetricsArgs),
    /// Persistence diagram of a cloud as CSV.
    Ph(PhArgs),
    /// Render a diagram CSV as SVG.
    DiagramSvg {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "diameter")]
        convention: FiltrationConvention,
        #[arg(long)]
        title: Option<String>,
    },
    /// Degrade a ground-truth cloud and write a manifest next to it.
    Degrade(DegradeArgs),
    /// Minimise the topological loss and write the trajectory.
    Skeletonize(SkeletonizeArgs),
    /// Backbone-augmented completion loss over a list of pairs.
    Bosh(BoshArgs),
}

#[derive(Args)]
struct Budget {
    /// Largest simplex count a dimension-1 computation may build.
    #[arg(long, env = "PCTOPO_MAX_SIMPLICES", default_value_t = DEFAULT_MAX_SIMPLICES)]
    max_simplices: u128,
}

#[derive(Args)]
struct MetricsArgs {
    root: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Table-style report; printed to stdout when neither output is given.
    #[arg(long)]
    text: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PLANE_K)]
    k: usize,
    #[arg(long, default_value = "tls")]
    plane_fit: PlaneFit,
    #[arg(long, default_value = "diameter")]
    convention: FiltrationConvention,
    #[arg(long)]
    max_filtration: Option<f64>,
    #[arg(long, env = "PCTOPO_PH1_BUDGET", default_value_t = DEFAULT_PH1_BUDGET)]
    ph1_budget: usize,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct PhArgs {
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    dims: Vec<u8>,
    #[arg(long, default_value = "diameter")]
    convention: FiltrationConvention,
    /// Cap on dimension-1 filtration values.
    #[arg(long)]
    max_filtration: Option<f64>,
    #[arg(long, default_value = "cohomology")]
    algorithm: Ph1Algorithm,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Args)]
struct DegradeArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Defaults to `<output>.manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    mode: DegradeMode,
    /// Points removed (partial) or kept (nonuniform, uniform).
    #[arg(short)]
    n: usize,
    /// Explicit viewpoint `x,y,z`; drawn from the seed otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    viewpoint: Option<Vec<f64>>,
    #[arg(long, default_value_t = pctopo::degrade::DEFAULT_RADIUS_FACTOR)]
    radius_factor: f64,
    #[arg(long, default_value = "proportional")]
    weighting: Weighting,
    /// Generated and recorded in the manifest when omitted.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SkeletonizeArgs {
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value = "diameter")]
    convention: FiltrationConvention,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    step_size: Option<f64>,
    #[arg(long)]
    lambda_topo: Option<f64>,
    #[arg(long)]
    lambda_fid: Option<f64>,
    #[arg(long)]
    schedule: Option<StepSchedule>,
    #[arg(long)]
    snapshot_every: Option<usize>,
}

#[derive(Args)]
struct BoshArgs {
    /// CSV of `complete,partial` paths, relative to the file's directory.
    pairs: PathBuf,
    #[arg(long, default_value_t = 2)]
    backbones: usize,
    /// Explicit backbone sizes; overrides the halving schedule.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value = "fps")]
    sampler: BackboneSampler,
    #[arg(long, default_value_t = 0)]
    fps_start: usize,
    /// Draw the FPS start point from the seed instead of --fps-start.
    #[arg(long)]
    seeded_start: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "l2")]
    metric: ChamferVariant,
    #[arg(long, default_value = "sum")]
    reduction: Reduction,
    /// Shell command mapping XYZ on stdin to XYZ on stdout; identity if omitted.
    #[arg(long)]
    net_cmd: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
        }
    }
}

fn load(path: &Path) -> Result<Cloud> {
    load_pointcloud(path, Format::Auto)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let io_err = |e| Error::Io { path: dir.display().to_string(), source: e };
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .map_err(io_err)?;
    entries.sort();
    Ok(entries)
}

fn is_cloud_file(p: &Path) -> bool {
    p.is_file()
        && p.extension()
            .map(|e| matches!(e.to_ascii_lowercase().to_str(), Some("xyz" | "ply")))
            .unwrap_or(false)
}

fn cmd_metrics(a: MetricsArgs) -> Result<()> {
    let mut dataset = Vec::new();
    for class_dir in sorted_entries(&a.root)?.into_iter().filter(|p| p.is_dir()) {
        let name = class_dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let clouds = sorted_entries(&class_dir)?
            .into_iter()
            .filter(|p| is_cloud_file(p))
            .map(|p| load(&p))
            .collect::<Result<Vec<_>>>()?;
        dataset.push((name, clouds));
    }
    if dataset.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} has no class subdirectories",
            a.root.display()
        )));
    }
    let cfg = MetricsConfig {
        plane_k: a.k,
        plane_fit: a.plane_fit,
        ph: PhMetricOptions {
            convention: a.convention,
            max_filtration: a.max_filtration,
            ph1_budget: a.ph1_budget,
            max_simplices: a.budget.max_simplices,
        },
    };
    let report = aggregate_report(&dataset, &cfg)?;
    let label = a.label.unwrap_or_else(|| {
        a.root
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "dataset".into())
    });
    if let Some(p) = &a.csv {
        write_atomic(p, report.to_csv().as_bytes())?;
    }
    if a.text.is_some() || a.csv.is_none() {
        emit(a.text.as_deref(), &report.to_text(&label))?;
    }
    Ok(())
}

fn cmd_ph(a: PhArgs) -> Result<()> {
    if a.dims.is_empty() || a.dims.iter().any(|&d| d > 1) {
        return Err(Error::InvalidArgument("--dims takes 0, 1 or 0,1".into()));
    }
    let pc = load(&a.input)?;
    let h0 = a.dims.contains(&0).then(|| ph::ph0(&pc, a.convention)).transpose()?;
    let h1 = if a.dims.contains(&1) {
        let opts = Ph1Options {
            max_filtration: a.max_filtration,
            max_simplices: a.budget.max_simplices,
            algorithm: a.algorithm,
        };
        Some(ph::ph1(&pc, a.convention, opts)?)
    } else {
        None
    };
    let diagram = match (h0, h1) {
        (Some(x), Some(y)) => x.merged(&y)?,
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => unreachable!("dims validated"),
    };
    if let Some(svg) = &a.svg {
        let title = a.input.file_name().unwrap_or_default().to_string_lossy();
        write_atomic(svg, diagram_svg(&diagram, &title).as_bytes())?;
    }
    emit(a.output.as_deref(), &write_diagram_csv(&diagram))
}

fn cmd_diagram_svg(input: PathBuf, output: Option<PathBuf>, convention: FiltrationConvention, title: Option<String>) -> Result<()> {
    let diagram = parse_diagram_csv::<f64>(&read_text(&input)?, convention)?;
    let title = title.unwrap_or_else(|| input.file_name().unwrap_or_default().to_string_lossy().into_owned());
    emit(output.as_deref(), &diagram_svg(&diagram, &title))
}

fn auto_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    pctopo::rng::splitmix64(nanos ^ u64::from(std::process::id()), 0)
}

fn cmd_degrade(a: DegradeArgs) -> Result<()> {
    let gt = load(&a.input)?;
    let seed = a.seed.unwrap_or_else(|| {
        let s = auto_seed();
        eprintln!("seed: {s}");
        s
    });
    let needs_viewpoint = a.mode != DegradeMode::Uniform;
    let viewpoint = match (&a.viewpoint, needs_viewpoint) {
        (_, false) => None,
        (Some(v), true) => match v.as_slice() {
            &[x, y, z] => Some(Viewpoint { position: Point::new(x, y, z) }),
            _ => return Err(Error::InvalidArgument("--viewpoint takes x,y,z".into())),
        },
        (None, true) => Some(random_viewpoint(&gt, seed, a.radius_factor)?),
    };
    let spec = DegradeSpec {
        mode: a.mode,
        n: a.n,
        viewpoint,
        weighting: (a.mode == DegradeMode::Nonuniform).then_some(a.weighting),
        seed,
    };
    let gt_path = a.input.to_string_lossy();
    let pair = make_pairs(&gt, Some(&gt_path), std::slice::from_ref(&spec))?.remove(0);
    let manifest_path = a.manifest.unwrap_or_else(|| {
        let mut s = a.output.clone().into_os_string();
        s.push(".manifest.json");
        PathBuf::from(s)
    });
    save_pointcloud(&pair.degraded, &a.output, Format::Auto)?;
    write_atomic(&manifest_path, pair.manifest.to_json().as_bytes())
}

fn cmd_skeletonize(a: SkeletonizeArgs) -> Result<()> {
    let pc = load(&a.input)?;
    let d = SkeletonizeOptions::<f64>::default();
    let opts = SkeletonizeOptions {
        iterations: a.iterations.unwrap_or(d.iterations),
        step_size: a.step_size.unwrap_or(d.step_size),
        lambda_topo: a.lambda_topo.unwrap_or(d.lambda_topo),
        lambda_fid: a.lambda_fid.unwrap_or(d.lambda_fid),
        schedule: a.schedule.unwrap_or(d.schedule),
        snapshot_every: a.snapshot_every.unwrap_or(d.snapshot_every),
        divergence_patience: d.divergence_patience,
    };
    let cfg = TopoLossConfig { k: a.k, convention: a.convention };
    let trajectory = skeletonize(&pc, &cfg, &opts)?;
    trajectory.write_to(&a.out_dir)?;
    Ok(())
}

fn read_pairs(path: &Path) -> Result<Vec<CompletionPair<f64>>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut pairs = Vec::new();
    for (i, line) in read_text(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.eq_ignore_ascii_case("complete,partial")) {
            continue;
        }
        let (c, p) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "expected 'complete,partial'".into(),
        })?;
        pairs.push(CompletionPair::new(load(&base.join(c.trim()))?, load(&base.join(p.trim()))?)?);
    }
    Ok(pairs)
}

fn cmd_bosh(a: BoshArgs) -> Result<()> {
    let randomized = a.sampler == BackboneSampler::Uniform || a.seeded_start;
    let seed = match (a.seed, randomized) {
        (Some(s), _) => s,
        (None, false) => 0,
        (None, true) => {
            return Err(Error::InvalidArgument(
                "--seed is required with the uniform sampler or --seeded-start".into(),
            ))
        }
    };
    let (backbones, sizes) = match a.sizes {
        Some(s) => (s.len(), BackboneSizes::Explicit(s)),
        None => (a.backbones, BackboneSizes::Halving),
    };
    let cfg = BoshConfig {
        backbones,
        sizes,
        sampler: a.sampler,
        seed,
        fps_start: (!a.seeded_start).then_some(a.fps_start),
    };
    let pairs = read_pairs(&a.pairs)?;
    let external = a.net_cmd.map(ExternalCommand::shell);
    let net: &dyn CompletionMap<f64> = match &external {
        Some(cmd) => cmd,
        None => &IdentityMap,
    };
    let loss = bosh_total_loss(&pairs, net, &cfg, a.metric, a.reduction)?;
    emit(a.output.as_deref(), &loss.to_csv())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert { input, output, from, to } => {
            let pc: Cloud = load_pointcloud(&input, from)?;
            save_pointcloud(&pc, &output, to)
        }
        Command::Metrics(a) => cmd_metrics(a),
        Command::Ph(a) => cmd_ph(a),
        Command::DiagramSvg { input, output, convention, title } => cmd_diagram_svg(input, output, convention, title),
        Command::Degrade(a) => cmd_degrade(a),
        Command::Skeletonize(a) => cmd_skeletonize(a),
        Command::Bosh(a) => cmd_bosh(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {message}", e.code());
            ExitCode::FAILURE
        }
    }
}
