//! Command-line front end.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::chord_syntax::Category;
use crate::classes::ChordClass;
use crate::corpus::{corpus_stats, load_corpus, Beats, Corpus};
use crate::embedding::{build_model, CooccurrenceModel};
use crate::error::{Error, Result};
use crate::key::{analyze_song, distance_label, evaluate_estimation, measure_grid, song_key_report, SongKeyReport};
use crate::similarity::{MembraneParams, PathIndex};

pub const THREADS_ENV: &str = "CONTRAFACT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "contrafact", version, about = "Chord-progression embeddings and contrafact search")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct PathOpts {
    /// Co-occurrence model file; built from the corpus when omitted.
    #[arg(long)]
    model: Option<PathBuf>,

    /// Riemann-sum intervals N.
    #[arg(long, default_value_t = 1024)]
    samples: usize,

    /// Duration of the start and end tokens, e.g. `1` or `1/2`.
    #[arg(long, default_value = "1", value_parser = parse_beats)]
    boundary_beats: Beats,

    /// Double N until the distance changes by less than 0.1%.
    #[arg(long)]
    converge: bool,

    /// Divide distances by the mean path length.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Chord-category histogram of a corpus.
    Stats {
        corpus: PathBuf,
        /// Same as `--format csv`.
        #[arg(long)]
        csv: bool,
    },
    /// Per-song key-signature estimates against declared keys.
    EstimateKeys {
        corpus: PathBuf,
        /// Report format (overrides `--format`).
        #[arg(long, value_enum)]
        report: Option<Format>,
    },
    /// Roman-numeral measure grid of one song.
    Roman {
        corpus: PathBuf,
        #[arg(long)]
        song: String,
    },
    /// Build and save the co-occurrence model.
    BuildModel {
        corpus: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Chord classes closest to a class by cosine similarity.
    NearestClass {
        model: PathBuf,
        /// Class label such as `bii7`, `iim`, `<START>`.
        #[arg(long)]
        class: String,
        #[arg(short, default_value_t = 5)]
        k: usize,
    },
    /// Membrane-area distance between two songs.
    Distance {
        corpus: PathBuf,
        #[arg(long)]
        song_a: String,
        #[arg(long)]
        song_b: String,
        #[command(flatten)]
        opts: PathOpts,
    },
    /// Side-by-side Roman-numeral grids with differing measures marked.
    Compare {
        corpus: PathBuf,
        #[arg(long)]
        song_a: String,
        #[arg(long)]
        song_b: String,
    },
    /// Songs closest to a reference song.
    Search {
        corpus: PathBuf,
        #[arg(long)]
        song: String,
        #[arg(short, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        opts: PathOpts,
    },
    /// Full distance matrix.
    Pairwise {
        corpus: PathBuf,
        /// Same as `--format csv`.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        opts: PathOpts,
    },
}

fn parse_beats(s: &str) -> std::result::Result<Beats, String> {
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: u64 = n.trim().parse().map_err(|e| format!("{e}"))?;
            let d: u64 = d.trim().parse().map_err(|e| format!("{e}"))?;
            if d == 0 {
                return Err("zero denominator".into());
            }
            Beats::new(n, d)
        }
        None => Beats::from_integer(s.trim().parse().map_err(|e| format!("{e}"))?),
    };
    if parsed == Beats::from_integer(0) {
        return Err("must be positive".into());
    }
    Ok(parsed)
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus_path: Option<PathBuf>,
    pub model_path: Option<PathBuf>,
    pub params: MembraneParams,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be positive".into()));
        }
        self.params.validate()
    }
}

fn config_for(cli: &Cli) -> RunConfig {
    let (corpus_path, opts) = match &cli.command {
        Command::Stats { corpus, .. }
        | Command::EstimateKeys { corpus, .. }
        | Command::Roman { corpus, .. }
        | Command::BuildModel { corpus, .. }
        | Command::Compare { corpus, .. } => (Some(corpus.clone()), None),
        Command::NearestClass { .. } => (None, None),
        Command::Distance { corpus, opts, .. }
        | Command::Search { corpus, opts, .. }
        | Command::Pairwise { corpus, opts, .. } => (Some(corpus.clone()), Some(opts)),
    };
    let mut params = MembraneParams::default();
    let mut model_path = None;
    if let Some(o) = opts {
        params.samples = o.samples;
        params.boundary_beats = o.boundary_beats;
        params.convergence_check = o.converge;
        params.normalize = o.normalize;
        model_path = o.model.clone();
    }
    if let Command::NearestClass { model, .. } = &cli.command {
        model_path = Some(model.clone());
    }
    let format = match &cli.command {
        Command::Stats { csv: true, .. } | Command::Pairwise { csv: true, .. } => Format::Csv,
        Command::EstimateKeys { report: Some(f), .. } => *f,
        _ => cli.format,
    };
    RunConfig { corpus_path, model_path, params, format, threads: cli.threads }
}

/// Runs the CLI with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let config = config_for(&cli);
    if let Err(e) = config.validate() {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }

    let mut warnings = Vec::new();
    let result = match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &config, &mut warnings)),
            Err(e) => Err(Error::InvalidParameter(e.to_string())),
        },
        None => execute(&cli.command, &config, &mut warnings),
    };
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    match result {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 2;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::UnknownClassLabel(_) => 1,
                _ => 2,
            }
        }
    }
}

fn execute(command: &Command, config: &RunConfig, warnings: &mut Vec<String>) -> Result<String> {
    match command {
        Command::Stats { corpus, .. } => stats(&load_corpus(corpus)?, config.format),
        Command::EstimateKeys { corpus, .. } => estimate_keys(&load_corpus(corpus)?, config.format),
        Command::Roman { corpus, song } => roman(&load_corpus(corpus)?, song, config.format),
        Command::BuildModel { corpus, output } => {
            let corpus = load_corpus(corpus)?;
            let model = build_model(&corpus)?;
            model.save(output)?;
            let seen = 63 - model.zero_rows().count();
            Ok(format!(
                "built model from {} songs ({seen} of 63 classes seen) -> {}\n",
                model.corpus_size(),
                output.display()
            ))
        }
        Command::NearestClass { model, class, k } => {
            let model = CooccurrenceModel::load(model)?;
            nearest_class(&model, ChordClass::from_label(class)?, *k, config.format)
        }
        Command::Distance { corpus, song_a, song_b, .. } => {
            let (_, index) = load_index(corpus, config, warnings)?;
            let d = index.distance(song_a, song_b, &config.params)?;
            Ok(match config.format {
                Format::Json => format!("{}\n", json!({ "song_a": song_a, "song_b": song_b, "distance": d })),
                _ => format!("{d:.6}\n"),
            })
        }
        Command::Compare { corpus, song_a, song_b } => compare(&load_corpus(corpus)?, song_a, song_b, config.format),
        Command::Search { corpus, song, k, .. } => {
            let (_, index) = load_index(corpus, config, warnings)?;
            let result = index.nearest(song, &config.params, *k)?;
            let mut rows = Vec::new();
            for (rank, n) in result.ranked.iter().enumerate() {
                rows.push(vec![(rank + 1).to_string(), n.id.clone(), n.title.clone(), format!("{:.6}", n.distance)]);
            }
            match config.format {
                Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&result).unwrap())),
                Format::Csv => csv_table(&["rank", "id", "title", "distance"], &rows),
                Format::Text => {
                    let title = index.title(song)?;
                    Ok(format!(
                        "closest to {title} ({song}), N = {}\n{}",
                        config.params.samples,
                        text_table(&["rank", "id", "title", "M"], &rows, &[true, false, false, true])
                    ))
                }
            }
        }
        Command::Pairwise { corpus, .. } => {
            let (_, index) = load_index(corpus, config, warnings)?;
            let matrix = index.pairwise(&config.params)?;
            let mut header = vec!["id".to_string()];
            header.extend(matrix.ids.iter().cloned());
            let rows: Vec<Vec<String>> = (0..matrix.len())
                .map(|i| {
                    std::iter::once(matrix.ids[i].clone())
                        .chain((0..matrix.len()).map(|j| format!("{:.6}", matrix.at(i, j))))
                        .collect()
                })
                .collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            match config.format {
                Format::Json => Ok(format!("{}\n", serde_json::to_string(&matrix).unwrap())),
                Format::Csv => csv_table(&header, &rows),
                Format::Text => {
                    let mut right = vec![true; header.len()];
                    right[0] = false;
                    Ok(text_table(&header, &rows, &right))
                }
            }
        }
    }
}

fn load_index(corpus_path: &Path, config: &RunConfig, warnings: &mut Vec<String>) -> Result<(Corpus, PathIndex)> {
    let corpus = load_corpus(corpus_path)?;
    let model = match &config.model_path {
        Some(p) => {
            let model = CooccurrenceModel::load(p)?;
            if model.corpus_fingerprint() != corpus.fingerprint() {
                warnings.push(format!("{} was built from a different corpus", p.display()));
            }
            model
        }
        None => build_model(&corpus)?,
    };
    let index = PathIndex::build(&corpus, &model, config.params.boundary_beats)?;
    Ok((corpus, index))
}

fn stats(corpus: &Corpus, format: Format) -> Result<String> {
    let stats = corpus_stats(corpus);
    let rows: Vec<Vec<String>> = stats
        .rows()
        .into_iter()
        .map(|(c, n, p)| vec![c.label().to_string(), n.to_string(), format!("{p:.3}%")])
        .collect();
    match format {
        Format::Json => {
            let cats: Vec<_> = Category::ALL
                .iter()
                .map(|&c| json!({ "category": c.label(), "count": stats.count(c), "percent": stats.percent(c) }))
                .collect();
            Ok(format!("{}\n", json!({ "songs": corpus.len(), "total": stats.total, "categories": cats })))
        }
        Format::Csv => csv_table(&["category", "count", "percent"], &rows),
        Format::Text => {
            let mut rows = rows;
            let total_pct = if stats.total == 0 { 0.0 } else { 100.0 };
            rows.push(vec!["totals".into(), stats.total.to_string(), format!("{total_pct:.3}%")]);
            Ok(text_table(&["type", "number", "percentage"], &rows, &[false, true, true]))
        }
    }
}

fn estimate_keys(corpus: &Corpus, format: Format) -> Result<String> {
    use rayon::prelude::*;
    let reports: Vec<SongKeyReport> = corpus.songs().par_iter().map(song_key_report).collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.song_id.clone(),
                r.title.clone(),
                r.winners.iter().map(|k| k.name()).collect::<Vec<_>>().join("/"),
                r.resolved.name().to_string(),
                r.declared.map_or("-".into(), |k| k.name().to_string()),
                r.distance.map_or("-".into(), distance_label),
                if r.ambiguous { "yes" } else { "no" }.to_string(),
            ]
        })
        .collect();
    let header = ["id", "title", "estimate", "resolved", "declared", "distance", "ambiguous"];
    let evaluation = evaluate_estimation(corpus);
    match format {
        Format::Json => {
            let value = match evaluation {
                Ok(report) => serde_json::to_value(&report).unwrap(),
                Err(_) => json!({ "songs": reports }),
            };
            Ok(format!("{}\n", value))
        }
        Format::Csv => csv_table(&header, &rows),
        Format::Text => {
            let mut out = text_table(&header, &rows, &[false; 7]);
            out.push('\n');
            match evaluation {
                Ok(report) => {
                    let mut hist = Vec::new();
                    for d in -6..=5 {
                        let n = report.by_distance.get(&d).copied().unwrap_or(0);
                        hist.push(vec![distance_label(d), n.to_string(), format!("{:.1}%", report.percent(n))]);
                    }
                    hist.push(vec![
                        "Ambig.".into(),
                        report.ambiguous.to_string(),
                        format!("{:.1}%", report.percent(report.ambiguous)),
                    ]);
                    if report.no_tonal_content > 0 {
                        hist.push(vec![
                            "no tonal content".into(),
                            report.no_tonal_content.to_string(),
                            format!("{:.1}%", report.percent(report.no_tonal_content)),
                        ]);
                    }
                    out.push_str(&text_table(&["distance", "number", "percent"], &hist, &[false, true, true]));
                }
                Err(Error::MissingDeclaredKey(id)) => {
                    let _ = writeln!(out, "histogram skipped: song `{id}` has no declared key");
                }
                Err(e) => return Err(e),
            }
            Ok(out)
        }
    }
}

fn grid_cells(corpus: &Corpus, id: &str) -> Result<(String, Vec<String>)> {
    let song = corpus.get(id).ok_or_else(|| Error::UnknownSong(id.to_string()))?;
    let analysis = analyze_song(song);
    let cells = measure_grid(&analysis.transposed, song.beats_per_measure)
        .into_iter()
        .map(|m| m.iter().map(|c| c.label()).collect::<Vec<_>>().join(" "))
        .collect();
    Ok((format!("{} ({}), key {}", song.title, song.id, analysis.key), cells))
}

fn roman(corpus: &Corpus, id: &str, format: Format) -> Result<String> {
    let (heading, cells) = grid_cells(corpus, id)?;
    match format {
        Format::Json => Ok(format!("{}\n", json!({ "song": id, "measures": cells }))),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                cells.iter().enumerate().map(|(i, c)| vec![(i + 1).to_string(), c.clone()]).collect();
            csv_table(&["measure", "chords"], &rows)
        }
        Format::Text => {
            let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(0);
            let mut out = format!("{heading}\n");
            for line in cells.chunks(4) {
                out.push('|');
                for cell in line {
                    let _ = write!(out, " {cell:<width$} |");
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn compare(corpus: &Corpus, a: &str, b: &str, format: Format) -> Result<String> {
    let (head_a, cells_a) = grid_cells(corpus, a)?;
    let (head_b, cells_b) = grid_cells(corpus, b)?;
    let n = cells_a.len().max(cells_b.len());
    let cell = |cells: &[String], i: usize| cells.get(i).cloned().unwrap_or_default();
    let mut rows = Vec::with_capacity(n);
    let mut differing = 0;
    for i in 0..n {
        let (x, y) = (cell(&cells_a, i), cell(&cells_b, i));
        let differs = x != y;
        differing += differs as usize;
        rows.push((i + 1, x, y, differs));
    }
    match format {
        Format::Json => {
            let measures: Vec<_> =
                rows.iter().map(|(m, x, y, d)| json!({ "measure": m, "a": x, "b": y, "differs": d })).collect();
            Ok(format!("{}\n", json!({ "song_a": a, "song_b": b, "differing": differing, "measures": measures })))
        }
        Format::Csv => {
            let table: Vec<Vec<String>> =
                rows.iter().map(|(m, x, y, d)| vec![m.to_string(), x.clone(), y.clone(), d.to_string()]).collect();
            csv_table(&["measure", a, b, "differs"], &table)
        }
        Format::Text => {
            let width = rows.iter().map(|r| r.1.chars().count()).max().unwrap_or(0).max(4);
            let mut out = format!("a: {head_a}\nb: {head_b}\n");
            for (m, x, y, d) in &rows {
                let mark = if *d { '*' } else { ' ' };
                let _ = writeln!(out, "{mark} {m:>3} | {x:<width$} | {y}");
            }
            let _ = writeln!(out, "{differing} of {n} measures differ");
            Ok(out)
        }
    }
}

fn nearest_class(model: &CooccurrenceModel, query: ChordClass, k: usize, format: Format) -> Result<String> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if model.is_zero_row(query) {
        return Err(Error::InvalidParameter(format!("class {query} never occurs in the model's corpus")));
    }
    // k neighbours plus the query itself, listed least similar first
    let mut near = model.nearest_classes(query, k + 1);
    near.reverse();
    let rows: Vec<Vec<String>> = near.iter().map(|(c, s)| vec![c.label(), format!("{s:.3}")]).collect();
    match format {
        Format::Json => {
            let items: Vec<_> = near.iter().map(|(c, s)| json!({ "class": c.label(), "similarity": s })).collect();
            Ok(format!("{}\n", json!({ "query": query.label(), "nearest": items })))
        }
        Format::Csv => csv_table(&["class", &query.label()], &rows),
        Format::Text => Ok(text_table(&["class", &query.label()], &rows, &[false, true])),
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidParameter(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn text_table(header: &[&str], rows: &[Vec<String>], right_align: &[bool]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .zip(right_align)
            .map(|((c, &w), &right)| {
                let pad = w.saturating_sub(c.chars().count());
                if right {
                    format!("{}{c}", " ".repeat(pad))
                } else {
                    format!("{c}{}", " ".repeat(pad))
                }
            })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}
