//! Command-line frontend: construct, verify, search, classify, transform,
//! and the one-shot enumeration-table reproduction.
//!
//! Exit codes: 0 success / valid / found, 1 invalid / not found,
//! 2 usage or guard errors. Machine-readable output goes to files or
//! stdout; progress and diagnostics go to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use aont::construct;
use aont::equiv;
use aont::field::Field;
use aont::matrix::MatrixGF;
use aont::search::{
    self, partition_search, run_shard, SearchMode, SearchResult, SearchSpec, SearchSummary,
};
use aont::table1;
use aont::transform::{
    aont_to_large_set, extract_oa, linear_aont_to_rf, linear_to_general, verify_resilient, RfBody,
};

#[derive(Parser)]
#[command(name = "aont", version, about = "All-or-nothing transforms over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a matrix from a named construction and print or save it.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Check the linear AONT property of a matrix file.
    Verify {
        /// Matrix file in the standard text format.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive canonical-form search.
    Search {
        #[arg(long)]
        field: String,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Dimension for the general mode.
        #[arg(long)]
        s: Option<usize>,
        /// Strength for the general mode.
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value_t = search::DEFAULT_NODE_CEILING)]
        node_ceiling: f64,
        /// Output directory: one matrix file per result plus summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition a directory of reduced matrices into equivalence classes.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive orthogonal arrays, large sets, or resilient functions.
    Transform {
        /// Matrix file to transform.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long, value_enum)]
        to: TransformTarget,
        /// Output suffix for `oa`, comma-separated element codes.
        #[arg(long)]
        suffix: Option<String>,
        /// Rows to delete for `rf`, comma-separated 1-based indices.
        #[arg(long)]
        delete_rows: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the reduced / inequivalent enumeration table and compare
    /// against the embedded expected values.
    Table1 {
        /// Restrict to one field order.
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    Cauchy {
        #[arg(long)]
        field: String,
        #[arg(long)]
        s: usize,
        /// Comma-separated element codes for the a-sequence.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Vandermonde {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Additive {
        #[arg(long)]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Example {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Reduced,
    TypeQMinus1,
    Symmetric,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformTarget {
    Oa,
    Largeset,
    Rf,
}

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    field: Option<String>,
    deterministic: bool,
    version: String,
    elapsed_ms: u128,
    output_digests: BTreeMap<String, String>,
}

fn sha256_hex(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(data);
    format!("{:x}", h.finalize())
}

/// Write via a temp file in the same directory so readers never observe a
/// partial file.
fn write_atomic(path: &Path, data: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, data)?;
    fs::rename(&tmp, path)
}

fn emit(out: &Option<PathBuf>, data: &str) -> std::io::Result<()> {
    match out {
        Some(path) => write_atomic(path, data),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn parse_codes(spec: &str) -> Result<Vec<u16>, String> {
    spec.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| format!("bad element code {p:?}")))
        .collect()
}

fn fail(msg: impl std::fmt::Display, code: u8) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => fail(msg, 2),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Construct { kind } => cmd_construct(kind),
        Command::Verify { input, t, out } => cmd_verify(&input, t, &out),
        Command::Search {
            field,
            mode,
            s,
            t,
            shards,
            jobs,
            limit,
            node_ceiling,
            out,
        } => cmd_search(&field, mode, s, t, shards, jobs, limit, node_ceiling, &out),
        Command::Classify { input, out } => cmd_classify(&input, &out),
        Command::Transform {
            input,
            t,
            to,
            suffix,
            delete_rows,
            out,
        } => cmd_transform(&input, t, to, &suffix, &delete_rows, &out),
        Command::Table1 { q, jobs, out } => cmd_table1(q, jobs, &out),
    }
}

fn cmd_construct(kind: ConstructKind) -> Result<ExitCode, String> {
    let (matrix, out) = match kind {
        ConstructKind::Cauchy { field, s, a, b, out } => {
            let f = Field::parse(&field).map_err(|e| e.to_string())?;
            let a = a.as_deref().map(parse_codes).transpose()?;
            let b = b.as_deref().map(parse_codes).transpose()?;
            (
                construct::cauchy(&f, s, a, b).map_err(|e| e.to_string())?,
                out,
            )
        }
        ConstructKind::Vandermonde { n, s, out } => (
            construct::vandermonde_aont(n, s).map_err(|e| e.to_string())?,
            out,
        ),
        ConstructKind::Additive { field, out } => {
            let f = Field::parse(&field).map_err(|e| e.to_string())?;
            (construct::additive_matrix(&f), out)
        }
        ConstructKind::Example { name, out } => (
            construct::builtin_example(&name).map_err(|e| e.to_string())?,
            out,
        ),
    };
    emit(&out, &matrix.to_text()).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(input: &Path, t: usize, out: &Option<PathBuf>) -> Result<ExitCode, String> {
    let text = fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let m = MatrixGF::from_text(&text).map_err(|e| e.to_string())?;
    let report = m.is_linear_aont(t).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&report.to_json()).unwrap();
    emit(out, &format!("{json}\n")).map_err(|e| e.to_string())?;
    Ok(if report.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    field: &str,
    mode: ModeArg,
    s: Option<usize>,
    t: usize,
    shards: usize,
    jobs: usize,
    limit: Option<usize>,
    node_ceiling: f64,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let start = Instant::now();
    let f = Field::parse(field).map_err(|e| e.to_string())?;
    let mode = match mode {
        ModeArg::Reduced => SearchMode::Reduced,
        ModeArg::TypeQMinus1 => SearchMode::TypeQMinus1,
        ModeArg::Symmetric => SearchMode::SymmetricReduced,
        ModeArg::General => SearchMode::GeneralLinear {
            s: s.ok_or("--s is required for the general mode")?,
            t,
        },
    };
    let mut spec = SearchSpec::new(f.clone(), mode);
    spec.limit = limit;
    spec.node_ceiling = node_ceiling;

    let result = run_search_with_progress(&spec, shards, jobs)?;

    let mode_name = match &spec.mode {
        SearchMode::Reduced => "reduced".to_string(),
        SearchMode::TypeQMinus1 => "type-q-minus-1".to_string(),
        SearchMode::SymmetricReduced => "symmetric-reduced".to_string(),
        SearchMode::GeneralLinear { s, t } => format!("general-linear(s={s},t={t})"),
    };
    let summary = SearchSummary {
        mode: mode_name,
        field: field.to_string(),
        count: result.count,
        nodes_visited: result.nodes_visited,
        elapsed_ms: result.elapsed.as_millis(),
        shards,
    };

    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        let mut digests = BTreeMap::new();
        for (i, m) in result.matrices.iter().enumerate() {
            let name = format!("matrix_{i:05}.mat");
            let text = m.to_text();
            write_atomic(&dir.join(&name), &text).map_err(|e| e.to_string())?;
            digests.insert(name, sha256_hex(text.as_bytes()));
        }
        let summary_text = serde_json::to_string_pretty(&summary).unwrap();
        write_atomic(&dir.join("summary.json"), &summary_text).map_err(|e| e.to_string())?;
        digests.insert("summary.json".into(), sha256_hex(summary_text.as_bytes()));
        write_manifest(dir, Some(field.to_string()), start, digests)?;
    } else {
        println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    }
    eprintln!(
        "search finished: {} result(s), {} nodes, {:?}",
        result.count, result.nodes_visited, result.elapsed
    );
    Ok(if result.count > 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_search_with_progress(
    spec: &SearchSpec,
    shards: usize,
    jobs: usize,
) -> Result<SearchResult, String> {
    if jobs > 1 {
        #[cfg(feature = "parallel")]
        {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| e.to_string())?;
            // oversubscribe shards: the leading-cell subtrees are far from
            // uniform in size, so fine-grained shards balance the pool
            return pool
                .install(|| search::run_sharded_parallel(spec, shards.max(jobs * 16)))
                .map_err(|e| e.to_string());
        }
        #[cfg(not(feature = "parallel"))]
        eprintln!("built without the parallel feature; running sequentially");
    }
    let start = Instant::now();
    let parts = partition_search(spec, shards).map_err(|e| e.to_string())?;
    let total = parts.len();
    let mut results = Vec::new();
    let mut nodes = 0u64;
    let mut count = 0usize;
    for (i, shard) in parts.iter().enumerate() {
        let r = run_shard(shard).map_err(|e| e.to_string())?;
        nodes += r.nodes_visited;
        count += r.count;
        eprintln!(
            "shard {}/{total}: {} found (running total {count}), {nodes} nodes, {:?} elapsed",
            i + 1,
            r.count,
            start.elapsed()
        );
        results.push(r);
    }
    let mut matrices: Vec<MatrixGF> = results.into_iter().flat_map(|r| r.matrices).collect();
    matrices.sort_by(|a, b| a.entries().cmp(b.entries()));
    if let Some(l) = spec.limit {
        matrices.truncate(l);
    }
    Ok(SearchResult {
        count: matrices.len(),
        matrices,
        nodes_visited: nodes,
        elapsed: start.elapsed(),
    })
}

#[derive(Serialize)]
struct ClassesJson {
    class_count: usize,
    needed_extra_passes: bool,
    classes: Vec<ClassJson>,
}

#[derive(Serialize)]
struct ClassJson {
    representative: String,
    size: usize,
    members: Vec<String>,
}

fn cmd_classify(input: &Path, out: &Path) -> Result<ExitCode, String> {
    let start = Instant::now();
    let mut matrices = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(input)
        .map_err(|e| format!("{}: {e}", input.display()))?
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "mat") {
            let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
            matrices.push(MatrixGF::from_text(&text).map_err(|e| e.to_string())?);
        }
    }
    if matrices.is_empty() {
        return Err("no .mat files found".into());
    }
    let outcome = equiv::classify(&matrices).map_err(|e| e.to_string())?;
    fs::create_dir_all(out).map_err(|e| e.to_string())?;
    let mut digests = BTreeMap::new();
    let mut classes_json = Vec::new();
    for (i, class) in outcome.classes.iter().enumerate() {
        let member_file = format!("class_{i:03}_members.txt");
        let members: Vec<String> = class.members.iter().map(|m| m.to_text()).collect();
        let text = members.join("\n");
        write_atomic(&out.join(&member_file), &text).map_err(|e| e.to_string())?;
        digests.insert(member_file, sha256_hex(text.as_bytes()));
        classes_json.push(ClassJson {
            representative: class.representative.to_text(),
            size: class.members.len(),
            members: class
                .members
                .iter()
                .map(|m| sha256_hex(m.to_text().as_bytes()))
                .collect(),
        });
    }
    let doc = ClassesJson {
        class_count: outcome.classes.len(),
        needed_extra_passes: outcome.needed_extra_passes,
        classes: classes_json,
    };
    let text = serde_json::to_string_pretty(&doc).unwrap();
    write_atomic(&out.join("classes.json"), &text).map_err(|e| e.to_string())?;
    digests.insert("classes.json".into(), sha256_hex(text.as_bytes()));
    write_manifest(out, None, start, digests)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_transform(
    input: &Path,
    t: usize,
    to: TransformTarget,
    suffix: &Option<String>,
    delete_rows: &Option<String>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, String> {
    let text = fs::read_to_string(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let m = MatrixGF::from_text(&text).map_err(|e| e.to_string())?;
    match to {
        TransformTarget::Oa => {
            let phi = linear_to_general(&m).map_err(|e| e.to_string())?;
            let suffix = suffix
                .as_deref()
                .map(parse_codes)
                .transpose()?
                .unwrap_or_else(|| vec![0; m.dim() - t]);
            let oa = extract_oa(&phi, t, &suffix).map_err(|e| e.to_string())?;
            emit(out, &oa.to_text()).map_err(|e| e.to_string())?;
        }
        TransformTarget::Largeset => {
            let phi = linear_to_general(&m).map_err(|e| e.to_string())?;
            let set = aont_to_large_set(&phi, t).map_err(|e| e.to_string())?;
            let dir = out.as_ref().ok_or("--out directory is required for largeset")?;
            fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            for (i, oa) in set.iter().enumerate() {
                write_atomic(&dir.join(format!("oa_{i:05}.arr")), &oa.to_text())
                    .map_err(|e| e.to_string())?;
            }
            eprintln!("wrote {} arrays", set.len());
        }
        TransformTarget::Rf => {
            let deleted = delete_rows
                .as_deref()
                .map(parse_codes)
                .transpose()?
                .map(|v| v.iter().map(|&r| r as usize - 1).collect::<Vec<_>>());
            let rf = linear_aont_to_rf(&m, t, deleted).map_err(|e| e.to_string())?;
            let ok = verify_resilient(&rf).map_err(|e| e.to_string())?;
            let RfBody::Linear { gen, .. } = &rf.body else {
                unreachable!()
            };
            let mut text = format!(
                "n={} m={} t={} v={} resilient={}\n",
                rf.n, rf.m, rf.t, rf.v, ok
            );
            for row in 0..rf.m {
                let cells: Vec<String> = gen[row * rf.n..(row + 1) * rf.n]
                    .iter()
                    .map(|e| e.to_string())
                    .collect();
                text.push_str(&cells.join(" "));
                text.push('\n');
            }
            emit(out, &text).map_err(|e| e.to_string())?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_table1(q: Option<u32>, jobs: usize, out: &Option<PathBuf>) -> Result<ExitCode, String> {
    let qs = q.map(|q| vec![q]);
    let shards = jobs.max(1) * 16;
    let rows = table1::run_table(qs.as_deref(), if jobs > 1 { shards } else { 1 });
    if rows.is_empty() {
        return Err("no matching q; table covers 3, 4, 5, 7, 8, 9, 11".into());
    }
    let mut all_match = true;
    let mut text = String::from("q  reduced  inequivalent\n");
    for row in &rows {
        let mark = if row.matches() { "" } else { "  MISMATCH" };
        all_match &= row.matches();
        text.push_str(&format!(
            "{:<2} {:>7}  {:>12}{mark}\n",
            row.q, row.reduced, row.inequivalent
        ));
        if !row.matches() {
            eprintln!(
                "q={}: got ({}, {}), expected ({}, {})",
                row.q, row.reduced, row.inequivalent, row.expected_reduced, row.expected_inequivalent
            );
        }
    }
    emit(out, &text).map_err(|e| e.to_string())?;
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&rows).unwrap();
        write_atomic(&path.with_extension("json"), &json).map_err(|e| e.to_string())?;
    }
    Ok(if all_match {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_manifest(
    dir: &Path,
    field: Option<String>,
    start: Instant,
    output_digests: BTreeMap<String, String>,
) -> Result<(), String> {
    let manifest = RunManifest {
        command: std::env::args().collect(),
        field,
        deterministic: true, // no randomness anywhere in the pipeline
        version: env!("CARGO_PKG_VERSION").to_string(),
        elapsed_ms: start.elapsed().as_millis(),
        output_digests,
    };
    let text = serde_json::to_string_pretty(&manifest).unwrap();
    write_atomic(&dir.join("manifest.json"), &text).map_err(|e| e.to_string())
}
