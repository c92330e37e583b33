use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use evidal_core::active::{run_active_learning, ALRunResult, CURVE_CSV_HEADER, TIMING_CSV_HEADER};
use evidal_core::datasets::{load_csv, registry, CsvSchema, Manifest, RichDataset};
use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::spec::{load_experiment_spec, ExperimentSpec, ResolvedExperiment};
use crate::VERSION;

pub const RESULTS_FILE: &str = "results.json";
pub const CURVES_FILE: &str = "curves.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Content of `results.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub version: String,
    pub experiment: ResolvedExperiment,
    pub runs: Vec<ALRunResult>,
}

#[derive(Clone, Debug, Default)]
pub struct AlRunArgs {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub parallelism: Option<usize>,
    pub out: Option<PathBuf>,
    pub timings: bool,
}

/// Resolves a dataset name: a CSV path, or a registry / synthetic name.
pub fn load_dataset(name: &str, manifest: &Manifest) -> Result<RichDataset> {
    let path = Path::new(name);
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        && path.is_file()
    {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        return Ok(load_csv(path, &CsvSchema::default())?.with_name(stem));
    }
    Ok(registry::load_named(name, manifest)?)
}

pub fn run(args: AlRunArgs) -> Result<()> {
    let mut spec = load_experiment_spec(&args.config)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(p) = args.parallelism {
        if p == 0 {
            return Err(ValidationError("--parallelism must be at least 1".into()).into());
        }
        spec.parallelism = Some(p);
    }
    if let Some(out) = args.out {
        spec.output = out;
    }
    run_spec(&spec, args.timings)
}

/// Executes every run of `spec`, writing results as they complete.
pub fn run_spec(spec: &ExperimentSpec, timings: bool) -> Result<()> {
    let manifest = Manifest::bundled();
    let mut datasets = Vec::with_capacity(spec.datasets.len());
    for name in &spec.datasets {
        datasets.push(
            load_dataset(name, &manifest).with_context(|| format!("loading dataset `{name}`"))?,
        );
    }
    let plan = spec.plan();
    for (i, (_, config)) in plan.iter().enumerate() {
        let dataset = &datasets[i / spec.strategies.len()];
        config.validate_for(dataset).map_err(|e| {
            ValidationError(format!("{} on {}: {e}", config.strategy, dataset.name()))
        })?;
    }

    std::fs::create_dir_all(&spec.output)
        .map_err(|e| ValidationError(format!("output directory {}: {e}", spec.output.display())))?;
    let threads = spec.threads();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;

    let mut results = ResultsFile {
        version: VERSION.to_string(),
        experiment: spec.resolved(),
        runs: Vec::new(),
    };
    let mut curves = CsvWriter::create(&spec.output.join(CURVES_FILE), CURVE_CSV_HEADER)?;
    let mut timing = timings
        .then(|| CsvWriter::create(&spec.output.join(TIMINGS_FILE), TIMING_CSV_HEADER))
        .transpose()?;

    eprintln!(
        "running {} experiment(s) on {threads} thread(s)",
        plan.len()
    );
    for (i, (_, config)) in plan.iter().enumerate() {
        let dataset = &datasets[i / spec.strategies.len()];
        let start = Instant::now();
        let run = pool.install(|| run_active_learning(dataset, config))?;
        let failed = run.failures().count();
        eprintln!(
            "[{}/{}] {} {}: mean AUAC {:.2} over {} repetition(s){} in {:.1} s",
            i + 1,
            plan.len(),
            run.dataset,
            run.strategy,
            run.mean_auac,
            run.repetitions.len() - failed,
            if failed > 0 {
                format!(" ({failed} failed)")
            } else {
                String::new()
            },
            start.elapsed().as_secs_f64()
        );
        curves.append(&run.curve_rows())?;
        if let Some(t) = timing.as_mut() {
            t.append(&run.timing_rows())?;
        }
        results.runs.push(run);
        write_json_atomic(&spec.output.join(RESULTS_FILE), &results)?;
    }
    eprintln!("results written to {}", spec.output.display());
    Ok(())
}

/// The single writer of one CSV output.
struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvWriter {
    fn create(path: &Path, header: &str) -> Result<Self> {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        out.write_all(header.as_bytes())?;
        Ok(CsvWriter {
            path: path.to_path_buf(),
            out,
        })
    }

    fn append(&mut self, rows: &str) -> Result<()> {
        self.out
            .write_all(rows.as_bytes())
            .with_context(|| format!("writing {}", self.path.display()))?;
        self.out
            .flush()
            .with_context(|| format!("writing {}", self.path.display()))
    }
}

/// Writes pretty JSON through a temporary file so readers never see a partial file.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

/// Reads runs from result files or directories containing `results.json`.
pub fn read_results(paths: &[PathBuf]) -> Result<Vec<ALRunResult>> {
    let mut runs = Vec::new();
    for path in paths {
        let file = if path.is_dir() {
            path.join(RESULTS_FILE)
        } else {
            path.clone()
        };
        let text = std::fs::read_to_string(&file)
            .with_context(|| format!("reading {}", file.display()))?;
        let parsed: ResultsFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
        runs.extend(parsed.runs);
    }
    Ok(runs)
}
