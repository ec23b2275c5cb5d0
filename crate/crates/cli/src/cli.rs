//! Argument parsing and subcommand handlers. Exit status: 0 success,
//! 1 validation failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sword_core::corpus::{build_model, pattern_report, CooccurrenceModel, CorpusStore, Granularity, ReviewStatus};
use sword_core::iswa::{load_catalog, CatalogError, FilterState, GlyphId, RegionKind, Scope};
use sword_core::ogr::{apply_review, overlay, render_page, OgrConfig, RecognitionResult, Recognizer, RenderOptions, ReviewEdit};
use sword_core::prediction::{suggest, suggestions_to_json, DEFAULT_K};
use sword_core::raster::GrayImage;
use sword_core::swml::{parse_swml, serialize_swml, SignSource};
use sword_core::Catalog;

use crate::service::{self, ServiceConfig};

#[derive(Parser, Debug)]
#[command(name = "sword", version, about = "SignWriting catalog, documents, corpus, prediction and glyph recognition")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Glyph catalog checks and lookup.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// SWML document checks and canonical form.
    #[command(subcommand)]
    Swml(SwmlCmd),
    /// Sign corpus maintenance and statistics.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Rank next-glyph suggestions for a partial sign.
    Predict(PredictArgs),
    /// Optical glyph recognition.
    #[command(subcommand)]
    Ogr(OgrCmd),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    Validate { manifest: PathBuf },
    Search(SearchArgs),
}

#[derive(Args, Debug)]
struct SearchArgs {
    manifest: PathBuf,
    /// Anatomic region or signing aspect, e.g. `hand`.
    #[arg(long)]
    region: Option<String>,
    /// Choice-box selection `attribute=option`; needs --region. Repeatable.
    #[arg(long = "filter", value_name = "ATTR=OPTION")]
    filters: Vec<String>,
    /// Category `C` or group `C-GG`.
    #[arg(long, conflicts_with = "region")]
    scope: Option<String>,
}

#[derive(Subcommand, Debug)]
enum SwmlCmd {
    Validate {
        file: PathBuf,
        /// Also require every glyph to exist in this catalog.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    Canonicalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct StoreArgs {
    /// Corpus log file (created when missing).
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value = "base-level")]
    granularity: Granularity,
}

#[derive(Subcommand, Debug)]
enum CorpusCmd {
    Ingest {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, default_value = "import")]
        provenance: SignSource,
        #[arg(long)]
        reviewed: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    Stats {
        #[command(flatten)]
        store: StoreArgs,
        /// Show only the N most frequent glyphs.
        #[arg(long)]
        top: Option<usize>,
    },
    Patterns {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(long)]
        min_support: u64,
    },
    BuildModel {
        #[command(flatten)]
        store: StoreArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Glyph codes already in the sign, comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    placed: Vec<String>,
    #[arg(long)]
    model: PathBuf,
    #[arg(short, default_value_t = DEFAULT_K)]
    k: usize,
}

#[derive(Subcommand, Debug)]
enum OgrCmd {
    Recognize {
        image: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        /// TOML file with recognition settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the JSON report (default: next to the image).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the unreviewed draft as SWML.
        #[arg(long)]
        swml: Option<PathBuf>,
        /// Also write a PNG with the detected boxes drawn in.
        #[arg(long)]
        overlay: Option<PathBuf>,
    },
    Render {
        swml: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Review {
        /// Report written by `ogr recognize`.
        report: PathBuf,
        /// JSON array of edits; none means accept everything as recognized.
        #[arg(long)]
        edits: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, env = "SWORD_CATALOG")]
    catalog: PathBuf,
    #[arg(long, env = "SWORD_STORAGE", default_value = "sword-data")]
    storage: PathBuf,
    #[arg(long, env = "SWORD_MODEL")]
    model: Option<PathBuf>,
    #[arg(long, default_value = "base-level")]
    granularity: Granularity,
    #[arg(long, env = "SWORD_HOST", default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    #[arg(long, env = "SWORD_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(short, env = "SWORD_K", default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, env = "SWORD_OGR_CONFIG")]
    ogr_config: Option<PathBuf>,
}

enum CliError {
    /// Input was read but is invalid (exit 1).
    Invalid(String),
    /// The invocation itself is wrong: bad value, unreadable path (exit 2).
    Usage(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Usage(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// What a command reports: JSON for `--json`, text otherwise. `raw` output
/// (canonical SWML, prediction JSON) is written byte for byte.
enum Output {
    Report { json: Value, text: String },
    Raw { json: Value, bytes: Vec<u8> },
}

type CmdResult = Result<Output, CliError>;

/// Runs the tool and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let json_mode = cli.json;
    let outcome = dispatch(cli.command, json_mode);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match outcome {
        Ok(Output::Report { json, text }) => {
            if json_mode {
                let _ = writeln!(out, "{json}");
            } else if !text.is_empty() {
                let _ = writeln!(out, "{}", text.trim_end());
            }
            0
        }
        Ok(Output::Raw { json, bytes }) => {
            if json_mode && !json.is_null() {
                let _ = writeln!(out, "{json}");
            } else {
                let _ = out.write_all(&bytes);
            }
            0
        }
        Err(e) => {
            if json_mode {
                let kind = if e.code() == 1 { "invalid" } else { "usage" };
                let _ = writeln!(out, "{}", json!({"ok": false, "error": {"kind": kind, "message": e.message()}}));
            } else {
                eprintln!("error: {}", e.message());
            }
            e.code()
        }
    }
}

fn dispatch(command: Command, json_mode: bool) -> CmdResult {
    match command {
        Command::Catalog(CatalogCmd::Validate { manifest }) => catalog_validate(&manifest),
        Command::Catalog(CatalogCmd::Search(args)) => catalog_search(&args),
        Command::Swml(SwmlCmd::Validate { file, catalog }) => swml_validate(&file, catalog.as_deref()),
        Command::Swml(SwmlCmd::Canonicalize { file, output }) => swml_canonicalize(&file, output.as_deref()),
        Command::Corpus(cmd) => corpus(cmd),
        Command::Predict(args) => predict(&args, json_mode),
        Command::Ogr(cmd) => ogr(cmd),
        Command::Serve(args) => serve(args),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn open_catalog(path: &Path) -> Result<Catalog, CliError> {
    load_catalog(path).map_err(|e| match e {
        CatalogError::Io { .. } => usage(e),
        other => invalid(format!("catalog {}: {other}", path.display())),
    })
}

fn open_store(path: &Path) -> Result<CorpusStore, CliError> {
    CorpusStore::open(path).map_err(|e| invalid(format!("corpus {}: {e}", path.display())))
}

fn catalog_validate(manifest: &Path) -> CmdResult {
    let catalog = open_catalog(manifest)?;
    let categories = catalog.categories();
    Ok(Output::Report {
        text: format!(
            "ok: {} glyphs in {} categories (manifest version {})",
            catalog.len(),
            categories.len(),
            catalog.version()
        ),
        json: json!({
            "ok": true,
            "count": catalog.len(),
            "version": catalog.version(),
            "categories": categories,
        }),
    })
}

fn catalog_search(args: &SearchArgs) -> CmdResult {
    let catalog = open_catalog(&args.manifest)?;
    let found = if let Some(region) = &args.region {
        let kind: RegionKind = region.parse().map_err(usage)?;
        let mut state = FilterState::new();
        for f in &args.filters {
            let (k, v) = f.split_once('=').ok_or_else(|| usage(format!("filter {f:?} is not ATTR=OPTION")))?;
            state.choose(k, v);
        }
        catalog.filter_glyphs(kind, &state).map_err(invalid)?
    } else {
        if !args.filters.is_empty() {
            return Err(usage("--filter needs --region"));
        }
        match &args.scope {
            Some(s) => {
                let scope: Scope = s.parse().map_err(usage)?;
                catalog.glyphs_in(scope).map_err(invalid)?
            }
            None => catalog.iter().collect(),
        }
    };
    let text = found.iter().map(|d| format!("{}\t{}\n", d.id, d.name)).collect();
    Ok(Output::Report {
        json: json!({"ok": true, "count": found.len(), "glyphs": found}),
        text,
    })
}

fn swml_validate(file: &Path, catalog: Option<&Path>) -> CmdResult {
    let doc = parse_swml(&read_file(file)?).map_err(|e| invalid(format!("{}: {e}", file.display())))?;
    doc.check().map_err(invalid)?;
    if let Some(path) = catalog {
        let catalog = open_catalog(path)?;
        let mut unknown: Vec<GlyphId> = doc
            .signs()
            .flat_map(|s| s.placements.iter().map(|p| p.glyph))
            .filter(|g| !catalog.contains(g))
            .collect();
        unknown.sort();
        unknown.dedup();
        if !unknown.is_empty() {
            let list: Vec<String> = unknown.iter().map(ToString::to_string).collect();
            return Err(invalid(format!("glyphs not in the catalog: {}", list.join(", "))));
        }
    }
    Ok(Output::Report {
        text: format!("ok: {} columns, {} signs", doc.columns.len(), doc.sign_count()),
        json: json!({"ok": true, "columns": doc.columns.len(), "signs": doc.sign_count()}),
    })
}

fn swml_canonicalize(file: &Path, output: Option<&Path>) -> CmdResult {
    let doc = parse_swml(&read_file(file)?).map_err(|e| invalid(format!("{}: {e}", file.display())))?;
    let bytes = serialize_swml(&doc).map_err(invalid)?;
    match output {
        Some(path) => {
            write_file(path, &bytes)?;
            Ok(Output::Report {
                text: format!("wrote {}", path.display()),
                json: json!({"ok": true, "output": path, "bytes": bytes.len()}),
            })
        }
        None => Ok(Output::Raw {
            json: json!({"ok": true, "swml": String::from_utf8_lossy(&bytes)}),
            bytes,
        }),
    }
}

fn corpus(cmd: CorpusCmd) -> CmdResult {
    match cmd {
        CorpusCmd::Ingest { store, catalog, provenance, reviewed, files } => {
            let catalog = open_catalog(&catalog)?;
            let mut corpus = open_store(&store)?;
            let status = if reviewed { ReviewStatus::Reviewed } else { ReviewStatus::Raw };
            let mut ids = Vec::new();
            for f in &files {
                let doc = parse_swml(&read_file(f)?).map_err(|e| invalid(format!("{}: {e}", f.display())))?;
                ids.extend(
                    corpus
                        .ingest(&catalog, &doc, provenance, status)
                        .map_err(|e| invalid(format!("{}: {e}", f.display())))?,
                );
            }
            Ok(Output::Report {
                text: format!("ingested {} signs; corpus holds {} entries", ids.len(), corpus.len()),
                json: json!({"ok": true, "entry_ids": ids, "entries": corpus.len(), "total_signs": corpus.total_signs()}),
            })
        }
        CorpusCmd::Stats { store, top } => {
            let corpus = open_store(&store.store)?;
            let mut freq: Vec<(GlyphId, u64)> = corpus.stats_frequency(store.granularity).into_iter().collect();
            freq.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            if let Some(n) = top {
                freq.truncate(n);
            }
            let mut text = format!("{} entries, {} signs\n", corpus.len(), corpus.total_signs());
            for (g, n) in &freq {
                text.push_str(&format!("{g}\t{n}\n"));
            }
            Ok(Output::Report {
                text,
                json: json!({
                    "ok": true,
                    "entries": corpus.len(),
                    "total_signs": corpus.total_signs(),
                    "granularity": store.granularity,
                    "frequency": freq.iter().map(|(g, n)| json!({"code": g.to_string(), "count": n})).collect::<Vec<_>>(),
                }),
            })
        }
        CorpusCmd::Patterns { store, min_support } => {
            let corpus = open_store(&store.store)?;
            let model = build_model(&corpus, store.granularity);
            let patterns = pattern_report(&model, min_support).map_err(usage)?;
            let text = patterns
                .iter()
                .map(|p| {
                    let codes: Vec<String> = p.glyphs.iter().map(ToString::to_string).collect();
                    format!("{}\t{}\n", p.support, codes.join(" "))
                })
                .collect();
            Ok(Output::Report {
                text,
                json: json!({"ok": true, "min_support": min_support, "patterns": patterns}),
            })
        }
        CorpusCmd::BuildModel { store, output } => {
            let corpus = open_store(&store.store)?;
            let model = build_model(&corpus, store.granularity);
            let mut bytes = Vec::new();
            model.persist(&mut bytes).map_err(invalid)?;
            write_file(&output, &bytes)?;
            Ok(Output::Report {
                text: format!(
                    "model over {} signs, {} glyph keys written to {}",
                    model.total_signs(),
                    model.contains_map().len(),
                    output.display()
                ),
                json: json!({
                    "ok": true,
                    "output": output,
                    "total_signs": model.total_signs(),
                    "glyphs": model.contains_map().len(),
                    "granularity": model.granularity(),
                }),
            })
        }
    }
}

fn load_model(path: &Path) -> Result<CooccurrenceModel, CliError> {
    let bytes = read_file(path)?;
    CooccurrenceModel::load(&mut bytes.as_slice()).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn predict(args: &PredictArgs, json_mode: bool) -> CmdResult {
    let placed = args
        .placed
        .iter()
        .filter(|c| !c.trim().is_empty())
        .map(|c| c.trim().parse::<GlyphId>().map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    let model = load_model(&args.model)?;
    let ranked = suggest(&placed, &model, args.k).map_err(|e| match e {
        sword_core::prediction::PredictionError::InvalidK => usage(e),
        other => invalid(other),
    })?;
    if json_mode {
        let mut bytes = suggestions_to_json(&ranked).into_bytes();
        bytes.push(b'\n');
        return Ok(Output::Raw { json: Value::Null, bytes });
    }
    let text = ranked
        .iter()
        .map(|s| {
            let tier = serde_json::to_value(s.tier).expect("tier serializes");
            format!("{}\t{}/{}\t{}\n", s.glyph, s.score.numer(), s.score.denom(), tier.as_str().unwrap_or_default())
        })
        .collect();
    Ok(Output::Report { json: Value::Null, text })
}

fn load_ogr_config(path: Option<&Path>) -> Result<OgrConfig, CliError> {
    match path {
        Some(p) => {
            let text = String::from_utf8(read_file(p)?).map_err(|_| usage(format!("{} is not UTF-8", p.display())))?;
            OgrConfig::from_toml_str(&text).map_err(usage)
        }
        None => Ok(OgrConfig::default()),
    }
}

fn decode_page(path: &Path) -> Result<GrayImage, CliError> {
    GrayImage::decode(&read_file(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn ogr(cmd: OgrCmd) -> CmdResult {
    match cmd {
        OgrCmd::Recognize { image, catalog, config, output, swml, overlay: overlay_path } => {
            let config = load_ogr_config(config.as_deref())?;
            let catalog = open_catalog(&catalog)?;
            let page = decode_page(&image)?;
            let recognizer = Recognizer::new(&catalog, config).map_err(usage)?;
            let result = recognizer.recognize(&page).map_err(invalid)?;
            let report = output.unwrap_or_else(|| image.with_extension("ogr.json"));
            write_file(&report, &serde_json::to_vec_pretty(&result).expect("report serializes"))?;
            if let Some(p) = &swml {
                write_file(p, &serialize_swml(&result.document).map_err(invalid)?)?;
            }
            if let Some(p) = &overlay_path {
                overlay(&page, &result).save_png(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            }
            Ok(Output::Report {
                text: format!(
                    "{} blobs: {} glyphs recognized, {} unresolved, {} signs in {} columns; report {}",
                    result.blobs.len(),
                    result.glyphs.len(),
                    result.unresolved.len(),
                    result.document.sign_count(),
                    result.document.columns.len(),
                    report.display()
                ),
                json: json!({
                    "ok": true,
                    "report": report,
                    "blobs": result.blobs.len(),
                    "glyphs": result.glyphs.len(),
                    "unresolved": result.unresolved.len(),
                    "signs": result.document.sign_count(),
                    "columns": result.document.columns.len(),
                    "conserved": result.is_conserved(),
                }),
            })
        }
        OgrCmd::Render { swml, catalog, output, noise, jitter, seed } => {
            let catalog = open_catalog(&catalog)?;
            let doc = parse_swml(&read_file(&swml)?).map_err(|e| invalid(format!("{}: {e}", swml.display())))?;
            let options = RenderOptions { noise_sigma: noise, jitter_degrees: jitter, seed, ..Default::default() };
            let page = render_page(&doc, &catalog, &options).map_err(invalid)?;
            page.image.save_png(&output).map_err(|e| usage(format!("{}: {e}", output.display())))?;
            Ok(Output::Report {
                text: format!("{}x{} page with {} glyphs written to {}", page.image.width(), page.image.height(), page.glyphs.len(), output.display()),
                json: json!({
                    "ok": true,
                    "output": output,
                    "width": page.image.width(),
                    "height": page.image.height(),
                    "glyphs": page.glyphs,
                }),
            })
        }
        OgrCmd::Review { report, edits, output } => {
            let result: RecognitionResult = serde_json::from_slice(&read_file(&report)?)
                .map_err(|e| invalid(format!("{}: {e}", report.display())))?;
            let edits: Vec<ReviewEdit> = match edits {
                Some(p) => serde_json::from_slice(&read_file(&p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
                None => Vec::new(),
            };
            let outcome = apply_review(&result, &edits).map_err(invalid)?;
            write_file(&output, &serialize_swml(&outcome.document).map_err(invalid)?)?;
            let mut text = format!("{} signs written to {}\n", outcome.document.sign_count(), output.display());
            for w in &outcome.warnings {
                text.push_str(&format!("warning: {w}\n"));
            }
            Ok(Output::Report {
                text,
                json: json!({
                    "ok": true,
                    "output": output,
                    "signs": outcome.document.sign_count(),
                    "warnings": outcome.warnings,
                }),
            })
        }
    }
}

fn serve(args: ServeArgs) -> CmdResult {
    let ogr = load_ogr_config(args.ogr_config.as_deref())?;
    if args.k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let config = ServiceConfig {
        catalog: args.catalog,
        storage: args.storage,
        model: args.model,
        granularity: args.granularity,
        k: args.k,
        ogr,
    };
    let addr = SocketAddr::new(args.host, args.port);
    let runtime = tokio::runtime::Runtime::new().map_err(invalid)?;
    runtime
        .block_on(service::serve(config, addr))
        .map_err(|e| invalid(format!("{e:#}")))?;
    Ok(Output::Report { json: json!({"ok": true}), text: String::new() })
}
