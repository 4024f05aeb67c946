use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use crmodel::algebra::{parse_weight, Weight};
use crmodel::report::{analyze, exit_code, parse_weight_list, report_exit_code, AnalysisReport, AnalyzeOptions, ModelSource};
use crmodel::Error;

/// Infinitesimal automorphisms of model hypersurfaces `Im w = P(z, z̄)`.
#[derive(Parser, Debug)]
#[command(name = "crmodel", version)]
struct Cli {
    /// Model file, or an inline expression such as "Im w = |z1|^2".
    #[arg(required_unless_present = "batch", conflicts_with = "batch")]
    model: Option<String>,

    /// Weights `a/b,c/d,...`, overriding any declared in the file.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<crmodel::model::WeightVector>,

    /// Highest weight searched for holomorphic degeneracy.
    #[arg(long, value_parser = parse_rational_weight, default_value = "1")]
    max_degeneracy_weight: Weight,

    /// Emit the JSON report.
    #[arg(long)]
    json: bool,

    #[arg(long)]
    skip_embedding: bool,

    /// Only solve the graded component of this weight.
    #[arg(long, value_parser = parse_rational_weight, allow_hyphen_values = true)]
    component: Option<Weight>,

    /// Remove pluriharmonic terms instead of rejecting the model.
    #[arg(long)]
    strip_pluriharmonic: bool,

    /// Analyze every `*.model` file in a directory.
    #[arg(long, value_name = "DIR")]
    batch: Option<PathBuf>,
}

fn parse_weights(s: &str) -> Result<crmodel::model::WeightVector, String> {
    parse_weight_list(s).map_err(|e| e.to_string())
}

fn parse_rational_weight(s: &str) -> Result<Weight, String> {
    parse_weight(s.trim()).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn load(arg: &str) -> Result<ModelSource, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Syntax { pos: 0, msg: format!("{}: {e}", path.display()) })?;
        ModelSource::from_file_contents(&text)
    } else {
        Ok(ModelSource::new(arg))
    }
}

struct Outcome {
    code: i32,
    report: Option<AnalysisReport>,
    error: Option<String>,
}

fn run_one(arg: &str, opts: &AnalyzeOptions) -> Outcome {
    match load(arg).and_then(|src| analyze(&src, opts)) {
        Ok(r) => Outcome { code: report_exit_code(&r), report: Some(r), error: None },
        Err(e) => Outcome { code: exit_code(&e), report: None, error: Some(e.to_string()) },
    }
}

fn model_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "model"))
        .collect();
    files.sort();
    Ok(files)
}

fn batch(dir: &Path, opts: &AnalyzeOptions, json: bool) -> i32 {
    let files = match model_files(dir) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}: {e}", dir.display());
            return 2;
        }
    };
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || run_one(&f.to_string_lossy(), opts))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Outcome { code: 4, report: None, error: Some("worker panicked".into()) }))
            .collect()
    });
    if json {
        let items: Vec<serde_json::Value> = files
            .iter()
            .zip(&outcomes)
            .map(|(f, o)| {
                serde_json::json!({
                    "file": f.file_name().map(|n| n.to_string_lossy().into_owned()),
                    "exit_code": o.code,
                    "report": o.report,
                    "error": o.error,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&items).expect("batch serializes"));
    } else {
        for (f, o) in files.iter().zip(&outcomes) {
            println!("== {} (exit {})", f.display(), o.code);
            if let Some(r) = &o.report {
                print!("{}", r.to_text());
            }
            if let Some(e) = &o.error {
                println!("error: {e}");
            }
            println!();
        }
    }
    outcomes.iter().map(|o| o.code).max().unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = AnalyzeOptions {
        weights: cli.weights,
        max_degeneracy_weight: cli.max_degeneracy_weight,
        skip_embedding: cli.skip_embedding,
        component: cli.component,
        strip_pluriharmonic: cli.strip_pluriharmonic,
    };
    let code = if let Some(dir) = &cli.batch {
        batch(dir, &opts, cli.json)
    } else {
        let o = run_one(cli.model.as_deref().unwrap_or_default(), &opts);
        if let Some(r) = &o.report {
            if cli.json {
                println!("{}", r.to_json());
            } else {
                print!("{}", r.to_text());
            }
        }
        if let Some(e) = &o.error {
            eprintln!("error: {e}");
        }
        o.code
    };
    ExitCode::from(code as u8)
}
