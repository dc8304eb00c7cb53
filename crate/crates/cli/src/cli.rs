//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use chorimap_core::classify::classify_ids;
use chorimap_core::query::{ClusterRelation, DistributionMode, FrequencyRelation, Granularity, QueryEngine};
use chorimap_core::stats::{bench_render, bootstrap_diff, DEFAULT_ITERATIONS, DEFAULT_RESAMPLES};
use chorimap_core::symbolize::{css_gradient, css_rule, raster_stripe_tile, svg_stripe_pattern, RasterMode};
use chorimap_core::{
    render_map, AngleScheme, ClassStyle, IndicatorSeries, MapType, RenderOptions, RenderRequest, Rgb, StyleOptions,
    Viewport, Workspace,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{read_geometry, read_series, WorkspaceConfig};
use crate::error::CliError;
use crate::service::{AppState, DEFAULT_HEIGHT, DEFAULT_WIDTH, FIT_MARGIN};

#[derive(Debug, Parser)]
#[command(name = "chorimap", version, about = "Thematic maps of classed indicator time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render one map as SVG.
    Render(RenderArgs),
    /// Classify one year of a dataset and print the classification as JSON.
    Classify(ClassifyArgs),
    /// Answer a comparison query.
    Query(QueryArgs),
    /// Time repeated renders of every map type.
    Bench(BenchArgs),
    /// Bootstrap the difference of two group means.
    Boot(BootArgs),
    /// Emit a stripe pattern as CSS, SVG or PNG.
    Pattern(PatternArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Country geometry (GeoJSON FeatureCollection).
    #[arg(long)]
    pub countries: PathBuf,
    /// Indicator dataset(s).
    #[arg(long, required = true, num_args = 1..)]
    pub data: Vec<PathBuf>,
    /// Dataset id to use; defaults to the first `--data` file.
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub year: i32,
    #[arg(long = "type", value_parser = parse_with::<MapType>, default_value = "choropleth")]
    pub map_type: MapType,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: u32,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: u32,
    #[arg(long, short = 'k', default_value_t = chorimap_core::classify::DEFAULT_CLASSES)]
    pub classes: usize,
    #[arg(long, value_parser = parse_with::<AngleScheme>, default_value = "spread180")]
    pub scheme: AngleScheme,
    /// Draw the legend.
    #[arg(long)]
    pub legend: bool,
    /// Draw the popup of this country.
    #[arg(long)]
    pub popup: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Classify over these features instead of the dataset's own countries.
    #[arg(long)]
    pub countries: Option<PathBuf>,
    #[arg(long)]
    pub year: i32,
    #[arg(long, short = 'k', default_value_t = chorimap_core::classify::DEFAULT_CLASSES)]
    pub classes: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueryKindArg {
    Clusters,
    Frequency,
    Trend,
    Distribution,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(value_enum)]
    pub kind: QueryKindArg,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub countries: Option<PathBuf>,
    #[arg(long)]
    pub year: Option<i32>,
    /// Reference country (clusters, frequency, trend).
    #[arg(long)]
    pub country: Option<String>,
    /// same|higher|lower for clusters, fewer|same|higher for frequency.
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub from: Option<i32>,
    #[arg(long)]
    pub to: Option<i32>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long, value_parser = parse_with::<DistributionMode>, default_value = "same")]
    pub mode: DistributionMode,
    #[arg(long, short = 'k', default_value_t = chorimap_core::classify::DEFAULT_CLASSES)]
    pub classes: usize,
    #[arg(long, value_parser = parse_with::<Granularity>, default_value = "class")]
    pub granularity: Granularity,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long)]
    pub year: i32,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: usize,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: u32,
    #[arg(long, default_value_t = DEFAULT_HEIGHT)]
    pub height: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BootArgs {
    /// Group A samples, comma separated.
    #[arg(long, value_parser = parse_samples)]
    pub a: Samples,
    /// Group B samples, comma separated.
    #[arg(long, value_parser = parse_samples)]
    pub b: Samples,
    #[arg(long, short = 'n', default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Samples(pub Vec<f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PatternFormat {
    /// A CSS rule with the gradient background.
    Css,
    /// Only the `repeating-linear-gradient(...)` value.
    Gradient,
    /// An SVG `<pattern>` element.
    Svg,
    /// A seamless PNG tile.
    Png,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[arg(long, default_value_t = 45.0)]
    pub angle: f64,
    #[arg(long, value_parser = parse_with::<Rgb>)]
    pub color: Rgb,
    #[arg(long = "line", value_parser = parse_with::<Rgb>, default_value = "000000")]
    pub line: Rgb,
    #[arg(long, default_value_t = 20.0)]
    pub on: f64,
    #[arg(long, default_value_t = 20.0)]
    pub off: f64,
    #[arg(long, value_enum, default_value = "css")]
    pub format: PatternFormat,
    /// CSS selector; defaults to `.striped_pattern_<angle>deg`.
    #[arg(long)]
    pub selector: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub countries: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    pub data: Vec<PathBuf>,
    #[arg(long)]
    pub port: Option<u32>,
    #[arg(long)]
    pub host: Option<String>,
    #[arg(long, short = 'k')]
    pub classes: Option<usize>,
    #[arg(long, value_parser = parse_with::<AngleScheme>)]
    pub scheme: Option<AngleScheme>,
    /// Origin allowed by CORS, or `*`.
    #[arg(long)]
    pub cors_origin: Option<String>,
}

fn parse_with<T: std::str::FromStr<Err = chorimap_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: chorimap_core::Error| e.to_string())
}

fn parse_samples(s: &str) -> Result<Samples, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Samples)
}

fn emit(out: &Output, bytes: &[u8]) -> Result<(), CliError> {
    match &out.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn emit_json<T: serde::Serialize>(out: &Output, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    emit(out, text.as_bytes())
}

fn load_inputs(inputs: &Inputs, style: StyleOptions) -> Result<(Workspace, String), CliError> {
    let features = read_geometry(&inputs.countries)?;
    let series: Vec<IndicatorSeries> = inputs.data.iter().map(|p| read_series(p)).collect::<Result<_, _>>()?;
    let dataset = match &inputs.dataset {
        Some(id) => id.clone(),
        None => series[0].id.clone(),
    };
    Ok((Workspace::new(features, series)?.with_style(style), dataset))
}

/// Universe for classification: the geometry's features when given,
/// otherwise the dataset's own countries.
fn universe(series: &IndicatorSeries, countries: Option<&Path>) -> Result<Vec<String>, CliError> {
    Ok(match countries {
        Some(path) => read_geometry(path)?.ids().map(str::to_owned).collect(),
        None => series.countries().map(str::to_owned).collect(),
    })
}

fn need<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{kind} query needs --{flag}")))
}

fn run_render(args: RenderArgs) -> Result<(), CliError> {
    let style = StyleOptions { scheme: args.scheme, ..StyleOptions::default() };
    let (ws, dataset) = load_inputs(&args.inputs, style)?;
    let req = RenderRequest {
        dataset,
        year: args.year,
        map_type: args.map_type,
        viewport: Viewport::fit(ws.features(), args.width, args.height, FIT_MARGIN)?,
        options: RenderOptions {
            legend: args.legend,
            popup_for: args.popup,
            classes: args.classes,
            ..RenderOptions::default()
        },
    };
    let doc = render_map(&ws, &req)?;
    log::info!("rendered {} features in {:.2} ms", doc.meta.feature_count, doc.meta.render_millis);
    emit(&args.output, doc.bytes.as_bytes())
}

fn run_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let series = read_series(&args.data)?;
    let ids = universe(&series, args.countries.as_deref())?;
    let c = classify_ids(ids.iter().map(String::as_str), &series, args.year, args.classes)?;
    emit_json(&args.output, &c)
}

fn run_query(args: QueryArgs) -> Result<(), CliError> {
    let series = read_series(&args.data)?;
    let ids = universe(&series, args.countries.as_deref())?;
    let q = QueryEngine::new(&series, ids)
        .with_classes(args.classes)
        .with_granularity(args.granularity)
        .with_epsilon(args.epsilon);
    let relation = args.relation.as_deref().unwrap_or("same");
    let result = match args.kind {
        QueryKindArg::Clusters => {
            let rel: ClusterRelation = relation.parse()?;
            q.clusters(need(args.year, "year", "clusters")?, &need(args.country, "country", "clusters")?, rel)?
        }
        QueryKindArg::Frequency => {
            let rel: FrequencyRelation = relation.parse()?;
            q.frequency(need(args.year, "year", "frequency")?, &need(args.country, "country", "frequency")?, rel)?
        }
        QueryKindArg::Trend => q.trend(
            &need(args.country, "country", "trend")?,
            need(args.from, "from", "trend")?,
            need(args.to, "to", "trend")?,
        )?,
        QueryKindArg::Distribution => q.distribution(
            &need(args.a, "a", "distribution")?,
            &need(args.b, "b", "distribution")?,
            need(args.from, "from", "distribution")?,
            need(args.to, "to", "distribution")?,
            args.mode,
        )?,
    };
    emit_json(&args.output, &result)
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let (ws, dataset) = load_inputs(&args.inputs, StyleOptions::default())?;
    let vp = Viewport::fit(ws.features(), args.width, args.height, FIT_MARGIN)?;
    let report = bench_render(&ws, &dataset, args.year, args.iterations, vp)?;
    emit_json(&args.output, &report)
}

fn run_boot(args: BootArgs) -> Result<(), CliError> {
    let r = bootstrap_diff(&args.a.0, &args.b.0, args.resamples, args.seed)?;
    emit_json(&args.output, &r)
}

fn run_pattern(args: PatternArgs) -> Result<(), CliError> {
    let mut style = ClassStyle::stripes(args.color, args.angle, args.on, args.off);
    style.line_hex = args.line;
    let text = |s: String| s.into_bytes();
    let bytes = match args.format {
        PatternFormat::Css => {
            let selector = args
                .selector
                .unwrap_or_else(|| format!(".striped_pattern_{}deg", chorimap_core::symbolize::fmt_num(args.angle)));
            text(css_rule(&selector, &style))
        }
        PatternFormat::Gradient => text(css_gradient(&style) + "\n"),
        PatternFormat::Svg => text(svg_stripe_pattern(&style, args.selector.as_deref().unwrap_or("pattern-class-0")) + "\n"),
        PatternFormat::Png => raster_stripe_tile(&style, RasterMode::Seamless)?.to_png()?,
    };
    emit(&args.output, &bytes)
}

pub fn serve_config(args: &ServeArgs) -> Result<WorkspaceConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => WorkspaceConfig::from_toml_file(path)?,
        None => {
            let geometry = args
                .countries
                .clone()
                .ok_or_else(|| CliError::Usage("serve needs --countries or --config".into()))?;
            WorkspaceConfig::new(geometry, Vec::new())
        }
    };
    if let Some(c) = &args.countries {
        cfg.geometry_path = c.clone();
    }
    if !args.data.is_empty() {
        cfg.dataset_paths = args.data.clone();
    }
    if let Some(p) = args.port {
        cfg.port = p;
    }
    if let Some(h) = &args.host {
        cfg.host = h.clone();
    }
    if let Some(k) = args.classes {
        cfg.default_classes = k;
    }
    if let Some(s) = args.scheme {
        cfg.angle_scheme = s;
    }
    if args.cors_origin.is_some() {
        cfg.cors_origin = args.cors_origin.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_serve(args: ServeArgs) -> Result<(), CliError> {
    let cfg = serve_config(&args)?;
    let state = AppState::new(cfg.load()?, cfg.default_classes)?;
    let app = crate::service::router(state, cfg.cors_origin.as_deref()).map_err(CliError::Config)?;
    let rt = tokio::runtime::Runtime::new().map_err(CliError::Server)?;
    rt.block_on(async move {
        let addr = format!("{}:{}", cfg.host, cfg.port);
        let listener = tokio::net::TcpListener::bind(&addr).await.map_err(CliError::Server)?;
        log::info!("listening on http://{addr}");
        axum::serve(listener, app).await.map_err(CliError::Server)
    })
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Render(a) => run_render(a),
        Command::Classify(a) => run_classify(a),
        Command::Query(a) => run_query(a),
        Command::Bench(a) => run_bench(a),
        Command::Boot(a) => run_boot(a),
        Command::Pattern(a) => run_pattern(a),
        Command::Serve(a) => run_serve(a),
    }
}
