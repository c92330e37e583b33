use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use evidal_core::stats::{
    render_report, render_table, wilcoxon_holm_cd, CDResult, CdParams, ComparisonTable,
};

use super::al_run::{read_results, write_json_atomic};
use crate::error::ValidationError;

pub const REPORT_FILE: &str = "report.md";
pub const CD_CSV_FILE: &str = "cd.csv";
pub const CD_JSON_FILE: &str = "cd.json";

#[derive(Clone, Debug)]
pub struct ReportArgs {
    pub results: Vec<PathBuf>,
    pub out: PathBuf,
    pub cd: CdParams,
}

fn load_table(results: &[PathBuf]) -> Result<ComparisonTable> {
    let runs = read_results(results)?;
    if runs.is_empty() {
        return Err(ValidationError("the result files contain no runs".into()).into());
    }
    Ok(ComparisonTable::from_runs(&runs)?)
}

fn compute_cd(table: &ComparisonTable, params: CdParams) -> Result<CDResult> {
    let scores = table.mean_matrix()?;
    Ok(wilcoxon_holm_cd(&table.strategies, &scores, params)?)
}

/// Writes the mean-AUAC table (`report.md`) and, when at least two datasets are
/// complete, the critical-difference data (`cd.csv`).
pub fn run_report(args: ReportArgs) -> Result<()> {
    let table = load_table(&args.results)?;
    match compute_cd(&table, args.cd) {
        Ok(cd) => {
            let report = render_report(&table, &cd)?;
            let (md, csv) = report.write(&args.out)?;
            print!("{}", report.markdown);
            eprintln!("wrote {} and {}", md.display(), csv.display());
        }
        Err(e) => {
            eprintln!("no critical-difference analysis: {e:#}");
            let markdown = render_table(&table);
            std::fs::create_dir_all(&args.out)?;
            let md = args.out.join(REPORT_FILE);
            std::fs::write(&md, &markdown).with_context(|| format!("writing {}", md.display()))?;
            print!("{markdown}");
            eprintln!("wrote {}", md.display());
        }
    }
    Ok(())
}

/// Writes the critical-difference data (`cd.csv`, `cd.json`) and prints a summary.
pub fn run_cd(args: ReportArgs) -> Result<()> {
    let table = load_table(&args.results)?;
    let cd = compute_cd(&table, args.cd)?;
    let report = render_report(&table, &cd)?;
    write_cd(&args.out, &report.cd_csv, &cd)?;
    println!(
        "Friedman chi2 = {:.4}, p = {:.4e}",
        cd.friedman.statistic, cd.friedman.p_value
    );
    for s in cd.order() {
        println!("{:>8.4}  {}", cd.average_ranks[s], cd.strategies[s]);
    }
    for clique in &cd.cliques {
        let names: Vec<&str> = clique.iter().map(|&s| cd.strategies[s].as_str()).collect();
        println!("clique: {}", names.join(", "));
    }
    Ok(())
}

fn write_cd(dir: &Path, csv: &str, cd: &CDResult) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(CD_CSV_FILE);
    std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    write_json_atomic(&dir.join(CD_JSON_FILE), cd)
}
