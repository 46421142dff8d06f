mod report;
mod surface;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use maxsurf::catalog::{get_catalog_surface, NAMES};
use maxsurf::graph::{cone_region_test, graph_from_immersion, starlike_report, StarlikeOptions, StarlikeReport};
use maxsurf::minimal::{
    bounded_conjugate_criterion, minimal_starlike_pipeline, MinimalImmersion, MinimalPipelineOptions,
};
use maxsurf::parabolicity::{
    chart_kind, harmonic_measure_sequence, superharmonic_convergence, superharmonic_report, ChartGrid, ChartKind,
    ChartSpec, ExhaustionSpec, SuperharmonicReport, Verdict, DEFAULT_MASK,
};
use maxsurf::weierstrass::{classify_singularity, Site, SurfaceKind, WeierstrassData};
use maxsurf::{Complex64, Error};
use serde::Serialize;
use serde_json::{json, Value};

use report::{emit, error_kind, is_input_error, to_csv, to_json, Envelope, ErrorInfo};
use surface::{load, Loaded, SurfaceFile};

/// Maximal surfaces in Lorentz-Minkowski space: meshes and numerical checks.
#[derive(Parser)]
#[command(name = "maxsurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a surface and export the mesh.
    Mesh(MeshArgs),
    /// Run a numerical check; exit 2 when it fails.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Classify a boundary point or boundary circle.
    Classify(ClassifyArgs),
    /// Emit the dual surface (f -> i f, kind flipped) as JSON.
    Dualize(DualizeArgs),
    /// Built-in surfaces.
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Print the catalog names and kinds.
    List,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Superharmonicity of log ||X||^2 with grid convergence.
    Superharmonic {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        chart: ChartArgs,
    },
    /// Starlike graph conditions along rays.
    Starlike {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        starlike: StarlikeArgs,
    },
    /// Membership of the mesh vertices in the cone region W_alpha.
    Cone {
        #[command(flatten)]
        common: CommonArgs,
        /// Half-angle in (0, pi/4).
        #[arg(long)]
        alpha: f64,
    },
    /// Harmonic measure along an exhaustion.
    Parabolicity {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        exhaustion: ExhaustionArgs,
    },
    /// Bounded harmonic conjugate criterion (minimal data).
    Conjugate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        epsilon: f64,
    },
    /// Starlike, superharmonic and parabolicity checks in one run.
    Pipeline {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        starlike: StarlikeArgs,
        #[command(flatten)]
        chart: ChartArgs,
        #[command(flatten)]
        exhaustion: ExhaustionArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Catalog name or JSON surface file.
    surface: String,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeshFormat {
    Obj,
    Csv,
    Json,
}

#[derive(Args)]
struct ChartArgs {
    /// Lower bound on ||X||^2 for nodes entering the check.
    #[arg(long)]
    mask: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Number of grids, each halving the spacing of the previous one.
    #[arg(long, default_value_t = 3)]
    levels: usize,
}

#[derive(Args)]
struct StarlikeArgs {
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 64)]
    rays: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Parameter mapped to the graph center, as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
}

#[derive(Args)]
struct ExhaustionArgs {
    /// Stage radii, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    inner: Option<f64>,
    #[arg(long)]
    probe: Option<f64>,
    /// Radius approached by the stages.
    #[arg(long)]
    limit: Option<f64>,
    /// Nodes per direction of each annulus grid.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args)]
struct MeshArgs {
    surface: String,
    /// Output file; defaults to `<name>.<ext>` in $MAXSURF_OUT_DIR or the
    /// working directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MeshFormat::Obj)]
    format: MeshFormat,
    #[arg(long)]
    radial: Option<usize>,
    #[arg(long)]
    angular: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SiteKind {
    Loop,
    Point,
}

#[derive(Args)]
struct ClassifyArgs {
    surface: String,
    #[arg(long, value_enum)]
    site: SiteKind,
    /// Radius of the loop, or the point as `re,im`.
    #[arg(allow_hyphen_values = true)]
    at: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DualizeArgs {
    surface: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("maxsurf: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Catalog(CatalogCommand::List) => {
            let mut text = String::new();
            for name in NAMES {
                let e = get_catalog_surface(name)?;
                text.push_str(&format!("{name}\t{}\n", kind_name(e.kind)));
            }
            emit(None, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mesh(args) => mesh(args),
        Command::Dualize(args) => {
            let loaded = load(&args.surface)?;
            let dual = loaded.data.dualize();
            dual.validate()?;
            emit(args.out.as_deref(), &to_json(&SurfaceFile::from_data(&dual))?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify(args) => classify(args),
        Command::Check(check) => run_check(check),
    }
}

fn kind_name(kind: SurfaceKind) -> &'static str {
    match kind {
        SurfaceKind::Maximal => "maximal",
        SurfaceKind::Minimal => "minimal",
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| anyhow!("'{s}' is not a number or a pair re,im"))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("'{s}' is not a number or a pair re,im"),
    }
}

#[derive(Serialize)]
struct VertexRow {
    re: f64,
    im: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    n1: Option<f64>,
    n2: Option<f64>,
    n3: Option<f64>,
    lambda_sq: f64,
    interior: bool,
}

fn mesh(args: MeshArgs) -> Result<ExitCode> {
    let Loaded { name, mut data, .. } = load(&args.surface)?;
    if args.radial.is_some() || args.angular.is_some() {
        let g = data.domain.grid;
        data.domain = data
            .domain
            .clone()
            .with_grid(args.radial.unwrap_or(g.radial), args.angular.unwrap_or(g.angular));
        data.validate()?;
    }
    let mesh = data.integrate_immersion()?;
    let (ext, text) = match args.format {
        MeshFormat::Obj => ("obj", mesh.to_obj()),
        MeshFormat::Csv => (
            "csv",
            to_csv(mesh.vertices.iter().map(|v| VertexRow {
                re: v.param.re,
                im: v.param.im,
                x1: v.position.x1,
                x2: v.position.x2,
                x3: v.position.x3,
                n1: v.normal.map(|n| n.x1),
                n2: v.normal.map(|n| n.x2),
                n3: v.normal.map(|n| n.x3),
                lambda_sq: v.lambda_sq,
                interior: v.interior,
            }))?,
        ),
        MeshFormat::Json => {
            let vertices: Vec<Value> = mesh
                .vertices
                .iter()
                .map(|v| {
                    json!({
                        "param": [v.param.re, v.param.im],
                        "position": [v.position.x1, v.position.x2, v.position.x3],
                        "normal": v.normal.map(|n| [n.x1, n.x2, n.x3]),
                        "lambda_sq": v.lambda_sq,
                        "interior": v.interior,
                    })
                })
                .collect();
            let doc = json!({ "kind": kind_name(mesh.kind), "vertices": vertices, "faces": mesh.faces });
            ("json", to_json(&doc)?)
        }
    };
    let path = args
        .out
        .unwrap_or_else(|| report::default_path(&format!("{name}.{ext}")));
    emit(Some(&path), &text)?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

/// Result of a check that ran to completion.
struct Checked {
    pass: bool,
    report: Value,
    csv: Option<String>,
}

fn finish(
    check: &str,
    surface: &str,
    out: Option<&Path>,
    format: ReportFormat,
    r: maxsurf::Result<Checked>,
) -> Result<ExitCode> {
    let (pass, text) = match r {
        Ok(c) => {
            let text = match format {
                ReportFormat::Csv => c.csv.ok_or_else(|| anyhow!("check {check} has no CSV output"))?,
                ReportFormat::Json => to_json(&Envelope {
                    check,
                    surface,
                    pass: c.pass,
                    report: Some(c.report),
                    error: None,
                })?,
            };
            (c.pass, text)
        }
        Err(e) if is_input_error(&e) => return Err(e.into()),
        Err(e) => {
            let env = Envelope {
                check,
                surface,
                pass: false,
                report: None,
                error: Some(ErrorInfo {
                    kind: error_kind(&e),
                    message: e.to_string(),
                }),
            };
            (false, to_json(&env)?)
        }
    };
    emit(out, &text)?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn value<T: Serialize>(v: &T) -> maxsurf::Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidArgument(format!("report serialization: {e}")))
}

fn chart_spec(data: &WeierstrassData, args: &ChartArgs) -> ChartSpec {
    let base = match chart_kind(&data.domain.shape) {
        ChartKind::LogPolar => ChartSpec::default(),
        ChartKind::Rectangular => ChartSpec {
            nx: 41,
            ny: 41,
            ..ChartSpec::default()
        },
    };
    ChartSpec {
        nx: args.nx.unwrap_or(base.nx),
        ny: args.ny.unwrap_or(base.ny),
        mask_threshold: args.mask.unwrap_or(DEFAULT_MASK),
    }
}

/// The superharmonic report without its per-node table.
fn superharmonic_summary(r: &SuperharmonicReport) -> Value {
    json!({
        "kind": r.kind,
        "hx": r.hx,
        "hy": r.hy,
        "mask_threshold": r.mask_threshold,
        "masked": r.masked,
        "skipped": r.skipped,
        "nodes": r.nodes.len(),
        "max_closed": r.max_closed,
        "closed_nonpositive": r.closed_nonpositive,
        "max_abs_residual": r.max_abs_residual,
    })
}

#[derive(Serialize)]
struct NodeRow {
    index: usize,
    re: f64,
    im: f64,
    norm_sq: f64,
    fd: f64,
    closed: f64,
    residual: f64,
}

fn superharmonic(data: &WeierstrassData, args: &ChartArgs, want_csv: bool) -> maxsurf::Result<Checked> {
    let spec = chart_spec(data, args);
    let conv = superharmonic_convergence(data, &spec, args.levels)?;
    let base = superharmonic_report(&ChartGrid::build(data, &spec)?)?;
    let csv = if want_csv { Some(node_csv(&base)?) } else { None };
    Ok(Checked {
        pass: conv.pass,
        report: json!({ "convergence": value(&conv)?, "base": superharmonic_summary(&base) }),
        csv,
    })
}

fn node_csv(r: &SuperharmonicReport) -> maxsurf::Result<String> {
    to_csv(r.nodes.iter().map(|n| NodeRow {
        index: n.index,
        re: n.param.re,
        im: n.param.im,
        norm_sq: n.norm_sq,
        fd: n.fd,
        closed: n.closed,
        residual: n.residual,
    }))
    .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn graph_center(loaded: &Loaded, args: &StarlikeArgs) -> maxsurf::Result<Complex64> {
    if let Some(c) = &args.center {
        return parse_complex(c).map_err(|e| Error::InvalidArgument(e.to_string()));
    }
    Ok(loaded
        .entry
        .as_ref()
        .and_then(|e| e.graph_center)
        .unwrap_or(loaded.data.basepoint))
}

fn starlike_options(args: &StarlikeArgs) -> StarlikeOptions {
    StarlikeOptions {
        delta: args.delta,
        rays: args.rays,
        samples: args.samples,
        ..StarlikeOptions::default()
    }
}

fn maximal_starlike(loaded: &Loaded, args: &StarlikeArgs) -> maxsurf::Result<StarlikeReport> {
    if loaded.data.kind != SurfaceKind::Maximal {
        return Err(Error::InvalidArgument(
            "starlike checks need maximal data; use `check pipeline` for minimal surfaces".into(),
        ));
    }
    let center = graph_center(loaded, args)?;
    let mesh = loaded.data.integrate_immersion()?;
    let graph = graph_from_immersion(&loaded.data, &mesh, center)?;
    starlike_report(&graph, &starlike_options(args))
}

#[derive(Serialize)]
struct RayRow {
    theta: f64,
    spacelike: bool,
    monotone: bool,
    norm_monotone: bool,
    min_slack: f64,
    min_slack_t: f64,
    worst_drop: f64,
    worst_drop_t: f64,
    flagged: usize,
    f_delta: f64,
}

fn exhaustion(loaded: &Loaded, args: &ExhaustionArgs) -> maxsurf::Result<ExhaustionSpec> {
    let base = loaded.entry.as_ref().and_then(|e| e.exhaustion.clone());
    let missing = |what: &str| Error::InvalidArgument(format!("no catalog exhaustion for this surface; pass --{what}"));
    let mut spec = ExhaustionSpec::new(
        args.inner
            .or(base.as_ref().map(|b| b.inner_radius))
            .ok_or_else(|| missing("inner"))?,
        args.radii
            .clone()
            .or(base.as_ref().map(|b| b.stage_radii.clone()))
            .ok_or_else(|| missing("radii"))?,
        args.probe
            .or(base.as_ref().map(|b| b.probe))
            .ok_or_else(|| missing("probe"))?,
    );
    spec.limit_radius = args.limit.or(base.as_ref().and_then(|b| b.limit_radius));
    if let Some(b) = &base {
        spec = spec.with_grid(b.radial, b.angular);
    }
    if let Some(n) = args.grid {
        spec = spec.with_grid(n, n);
    }
    Ok(spec)
}

#[derive(Serialize)]
struct StageRow {
    radius: f64,
    omega: f64,
    iterations: usize,
    residual: f64,
    max_principle: bool,
}

#[derive(Serialize)]
struct ConeRow {
    x1: f64,
    x2: f64,
    x3: f64,
    inside: bool,
    margin: f64,
    norm_bound: f64,
    lorentz_norm_sq: f64,
}

#[derive(Serialize)]
struct SlackRow {
    index: usize,
    re: f64,
    im: f64,
    slack: f64,
}

fn csv_err(e: anyhow::Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

fn run_check(cmd: CheckCommand) -> Result<ExitCode> {
    let (name, common) = match &cmd {
        CheckCommand::Superharmonic { common, .. } => ("superharmonic", common),
        CheckCommand::Starlike { common, .. } => ("starlike", common),
        CheckCommand::Cone { common, .. } => ("cone", common),
        CheckCommand::Parabolicity { common, .. } => ("parabolicity", common),
        CheckCommand::Conjugate { common, .. } => ("conjugate", common),
        CheckCommand::Pipeline { common, .. } => ("pipeline", common),
    };
    let loaded = load(&common.surface)?;
    let want_csv = common.format == ReportFormat::Csv;
    let data = &loaded.data;
    let result = match &cmd {
        CheckCommand::Superharmonic { chart, .. } => superharmonic(data, chart, want_csv),
        CheckCommand::Starlike { starlike, .. } => maximal_starlike(&loaded, starlike).and_then(|r| {
            let csv = if want_csv {
                Some(
                    to_csv(r.rays.iter().map(|v| RayRow {
                        theta: v.theta,
                        spacelike: v.spacelike,
                        monotone: v.monotone,
                        norm_monotone: v.norm_monotone,
                        min_slack: v.min_slack,
                        min_slack_t: v.min_slack_t,
                        worst_drop: v.worst_drop,
                        worst_drop_t: v.worst_drop_t,
                        flagged: v.flagged,
                        f_delta: v.f_delta,
                    }))
                    .map_err(csv_err)?,
                )
            } else {
                None
            };
            Ok(Checked {
                pass: r.pass,
                report: value(&r)?,
                csv,
            })
        }),
        CheckCommand::Cone { alpha, .. } => data.integrate_immersion().and_then(|mesh| {
            let points: Vec<_> = mesh.vertices.iter().map(|v| v.position).collect();
            let r = cone_region_test(&points, *alpha)?;
            let csv = if want_csv {
                Some(
                    to_csv(r.points.iter().map(|p| ConeRow {
                        x1: p.point.x1,
                        x2: p.point.x2,
                        x3: p.point.x3,
                        inside: p.inside,
                        margin: p.margin,
                        norm_bound: p.norm_bound,
                        lorentz_norm_sq: p.lorentz_norm_sq,
                    }))
                    .map_err(csv_err)?,
                )
            } else {
                None
            };
            Ok(Checked {
                pass: r.all_inside,
                report: value(&r)?,
                csv,
            })
        }),
        CheckCommand::Parabolicity { exhaustion: ex, .. } => exhaustion(&loaded, ex).and_then(|spec| {
            let r = harmonic_measure_sequence(&spec)?;
            let csv = if want_csv {
                Some(
                    to_csv(r.stages.iter().map(|s| StageRow {
                        radius: s.radius,
                        omega: s.omega,
                        iterations: s.iterations,
                        residual: s.residual,
                        max_principle: s.max_principle,
                    }))
                    .map_err(csv_err)?,
                )
            } else {
                None
            };
            Ok(Checked {
                pass: r.verdict == Verdict::ParabolicEvidence,
                report: value(&r)?,
                csv,
            })
        }),
        CheckCommand::Conjugate { epsilon, .. } => conjugate(data, *epsilon, want_csv),
        CheckCommand::Pipeline {
            starlike,
            chart,
            exhaustion: ex,
            ..
        } => {
            if want_csv {
                bail!("check pipeline has no CSV output");
            }
            pipeline(&loaded, starlike, chart, ex)
        }
    };
    finish(name, &loaded.name, common.out.as_deref(), common.format, result)
}

fn conjugate(data: &WeierstrassData, epsilon: f64, want_csv: bool) -> maxsurf::Result<Checked> {
    if data.kind != SurfaceKind::Minimal {
        return Err(Error::InvalidArgument(
            "the conjugate criterion needs minimal data".into(),
        ));
    }
    let imm = MinimalImmersion::new(data.clone())?;
    let r = bounded_conjugate_criterion(&imm, epsilon)?;
    let csv = if want_csv {
        Some(
            to_csv(r.violations.iter().map(|n| SlackRow {
                index: n.index,
                re: n.param.re,
                im: n.param.im,
                slack: n.slack,
            }))
            .map_err(csv_err)?,
        )
    } else {
        None
    };
    Ok(Checked {
        pass: r.pass,
        report: value(&r)?,
        csv,
    })
}

fn pipeline(
    loaded: &Loaded,
    starlike: &StarlikeArgs,
    chart: &ChartArgs,
    ex: &ExhaustionArgs,
) -> maxsurf::Result<Checked> {
    let data = &loaded.data;
    if data.kind == SurfaceKind::Minimal {
        let imm = MinimalImmersion::new(data.clone())?;
        let defaults = MinimalPipelineOptions::default();
        let opts = MinimalPipelineOptions {
            starlike: starlike_options(starlike),
            chart: ChartSpec {
                nx: chart.nx.unwrap_or(defaults.chart.nx),
                ny: chart.ny.unwrap_or(defaults.chart.ny),
                mask_threshold: chart.mask.unwrap_or(defaults.chart.mask_threshold),
            },
        };
        let r = minimal_starlike_pipeline(&imm, &opts)?;
        let report = json!({
            "kind": "minimal",
            "injective": r.injective,
            "starlike": value(&r.starlike)?,
            "superharmonic": superharmonic_summary(&r.superharmonic),
        });
        return Ok(Checked {
            pass: r.pass,
            report,
            csv: None,
        });
    }
    let star = maximal_starlike(loaded, starlike)?;
    let sh = superharmonic(data, chart, false)?;
    let para = harmonic_measure_sequence(&exhaustion(loaded, ex)?)?;
    let pass = star.pass && sh.pass && para.verdict == Verdict::ParabolicEvidence;
    let report = json!({
        "kind": "maximal",
        "starlike": value(&star)?,
        "superharmonic": sh.report,
        "parabolicity": value(&para)?,
    });
    Ok(Checked {
        pass,
        report,
        csv: None,
    })
}

fn classify(args: ClassifyArgs) -> Result<ExitCode> {
    let loaded = load(&args.surface)?;
    let (site, at) = match args.site {
        SiteKind::Loop => {
            let r: f64 = args
                .at
                .trim()
                .parse()
                .map_err(|_| anyhow!("loop radius '{}' is not a number", args.at))?;
            (Site::Loop { radius: r }, json!(r))
        }
        SiteKind::Point => {
            let z = parse_complex(&args.at)?;
            (Site::Point(z), json!([z.re, z.im]))
        }
    };
    let kind = match args.site {
        SiteKind::Loop => "loop",
        SiteKind::Point => "point",
    };
    let result = classify_singularity(&loaded.data, site).and_then(|v| {
        Ok(Checked {
            pass: true,
            report: json!({ "site": kind, "at": at, "classification": value(&v)? }),
            csv: None,
        })
    });
    finish(
        "classify",
        &loaded.name,
        args.out.as_deref(),
        ReportFormat::Json,
        result,
    )
}
