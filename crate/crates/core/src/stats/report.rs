use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cd::CDResult;
use super::hypothesis::{paired_t_test, TestResult};
use crate::active::ALRunResult;
use crate::error::{Error, Result};

/// AUAC values of one (dataset, strategy) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub mean: f64,
    /// `(repetition, auac)` of every successful repetition.
    pub auacs: Vec<(usize, f64)>,
}

/// Best-versus-runner-up t-test of one dataset row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowTest {
    pub best: usize,
    pub second: usize,
    /// `None` when fewer than 2 paired repetitions exist or the differences are constant.
    pub test: Option<TestResult>,
}

/// Datasets × strategies table of mean AUAC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub datasets: Vec<String>,
    pub strategies: Vec<String>,
    pub cells: Vec<Vec<Option<Cell>>>,
    /// Cells whose mean, rounded to 2 decimals, equals the row maximum.
    pub winners: Vec<Vec<bool>>,
    pub row_tests: Vec<Option<RowTest>>,
}

impl ComparisonTable {
    /// Builds the table; datasets and strategies keep their first-appearance order.
    pub fn from_runs(runs: &[ALRunResult]) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptyList);
        }
        let mut datasets: Vec<String> = Vec::new();
        let mut strategies: Vec<String> = Vec::new();
        for run in runs {
            if !datasets.contains(&run.dataset) {
                datasets.push(run.dataset.clone());
            }
            if !strategies.contains(&run.strategy) {
                strategies.push(run.strategy.clone());
            }
        }
        let mut cells = vec![vec![None; strategies.len()]; datasets.len()];
        for run in runs {
            let i = datasets
                .iter()
                .position(|d| *d == run.dataset)
                .expect("collected above");
            let j = strategies
                .iter()
                .position(|s| *s == run.strategy)
                .expect("collected above");
            if cells[i][j].is_some() {
                return Err(Error::DegenerateInput(format!(
                    "duplicate result for dataset `{}` and strategy `{}`",
                    run.dataset, run.strategy
                )));
            }
            let auacs: Vec<(usize, f64)> =
                run.successful().map(|r| (r.repetition, r.auac)).collect();
            if auacs.is_empty() {
                continue;
            }
            let mean = auacs.iter().map(|(_, a)| a).sum::<f64>() / auacs.len() as f64;
            cells[i][j] = Some(Cell { mean, auacs });
        }
        let winners = cells.iter().map(|row| winner_flags(row)).collect();
        let row_tests = cells.iter().map(|row| row_test(row)).collect();
        Ok(ComparisonTable {
            datasets,
            strategies,
            cells,
            winners,
            row_tests,
        })
    }

    /// Mean AUAC matrix; errors when a cell has no successful repetition.
    pub fn mean_matrix(&self) -> Result<Vec<Vec<f64>>> {
        self.cells
            .iter()
            .zip(&self.datasets)
            .map(|(row, dataset)| {
                row.iter()
                    .zip(&self.strategies)
                    .map(|(cell, strategy)| {
                        cell.as_ref().map(|c| c.mean).ok_or_else(|| {
                            Error::DegenerateInput(format!(
                                "no result for dataset `{dataset}` and strategy `{strategy}`"
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

fn rounded(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn winner_flags(row: &[Option<Cell>]) -> Vec<bool> {
    let best = row
        .iter()
        .flatten()
        .map(|c| rounded(c.mean))
        .fold(f64::NEG_INFINITY, f64::max);
    row.iter()
        .map(|c| c.as_ref().is_some_and(|c| rounded(c.mean) == best))
        .collect()
}

fn row_test(row: &[Option<Cell>]) -> Option<RowTest> {
    let mut order: Vec<usize> = (0..row.len()).filter(|&j| row[j].is_some()).collect();
    if order.len() < 2 {
        return None;
    }
    let mean = |j: usize| row[j].as_ref().map_or(f64::NEG_INFINITY, |c| c.mean);
    order.sort_by(|&a, &b| mean(b).total_cmp(&mean(a)).then(a.cmp(&b)));
    let (best, second) = (order[0], order[1]);
    let (a, b) = (row[best].as_ref()?, row[second].as_ref()?);
    // Repetitions share their split and initial set, so pair them by index.
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for &(rep, auac) in &a.auacs {
        if let Some(&(_, other)) = b.auacs.iter().find(|(r, _)| *r == rep) {
            x.push(auac);
            y.push(other);
        }
    }
    Some(RowTest {
        best,
        second,
        test: paired_t_test(&x, &y).ok(),
    })
}

/// Rendered report contents.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub markdown: String,
    pub cd_csv: String,
}

pub const CD_CSV_HEADER: &str = "strategy,average_rank,position,cliques\n";

/// Markdown table of mean AUAC: bold winner per row and the best-vs-second
/// t-test columns.
pub fn render_table(table: &ComparisonTable) -> String {
    let mut md = String::new();
    let _ = write!(md, "| Dataset |");
    for s in &table.strategies {
        let _ = write!(md, " {s} |");
    }
    md.push_str(" statistic | p-value |\n|---|");
    md.push_str(&"---:|".repeat(table.strategies.len() + 2));
    md.push('\n');
    for (i, dataset) in table.datasets.iter().enumerate() {
        let _ = write!(md, "| {dataset} |");
        for (j, cell) in table.cells[i].iter().enumerate() {
            match cell {
                Some(c) if table.winners[i][j] => {
                    let _ = write!(md, " **{:.2}** |", c.mean);
                }
                Some(c) => {
                    let _ = write!(md, " {:.2} |", c.mean);
                }
                None => md.push_str(" – |"),
            }
        }
        match table.row_tests[i].as_ref().and_then(|r| r.test) {
            Some(t) => {
                let _ = writeln!(md, " {:.2} | {:.4} |", t.statistic, t.p_value);
            }
            None => md.push_str(" – | – |\n"),
        }
    }
    md
}

/// Markdown table (bold winners, best-vs-second t-test columns) and CD data.
///
/// The CD CSV has one row per strategy in rank order; `cliques` lists the ids of
/// the cliques (bars) the strategy belongs to, separated by `;`. Clique `c`
/// spans the average ranks of its members.
pub fn render_report(table: &ComparisonTable, cd: &CDResult) -> Result<Report> {
    if cd.cliques.is_empty() {
        return Err(Error::DegenerateInput(
            "critical-difference result has no cliques".into(),
        ));
    }
    if cd.strategies.len() != cd.average_ranks.len() {
        return Err(Error::LengthMismatch {
            left: cd.strategies.len(),
            right: cd.average_ranks.len(),
        });
    }

    let mut md = render_table(table);
    let _ = write!(md, "| Average rank |");
    for s in &table.strategies {
        match cd.strategies.iter().position(|c| c == s) {
            Some(k) => {
                let _ = write!(md, " {:.2} |", cd.average_ranks[k]);
            }
            None => md.push_str(" – |"),
        }
    }
    md.push_str(" | |\n");
    let _ = writeln!(
        md,
        "\nFriedman χ² = {:.4}, p = {:.4e}; Wilcoxon–Holm α = {}.",
        cd.friedman.statistic, cd.friedman.p_value, cd.params.alpha
    );

    let mut csv = String::from(CD_CSV_HEADER);
    for (position, s) in cd.order().into_iter().enumerate() {
        let ids: Vec<String> = cd
            .cliques
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&s))
            .map(|(id, _)| id.to_string())
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            cd.strategies[s],
            cd.average_ranks[s],
            position + 1,
            ids.join(";")
        );
    }
    Ok(Report {
        markdown: md,
        cd_csv: csv,
    })
}

impl Report {
    /// Writes `report.md` and `cd.csv` under `dir`; returns their paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        let md = dir.join("report.md");
        let csv = dir.join("cd.csv");
        std::fs::write(&md, &self.markdown).map_err(|e| Error::io(md.display().to_string(), e))?;
        std::fs::write(&csv, &self.cd_csv).map_err(|e| Error::io(csv.display().to_string(), e))?;
        Ok((md, csv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::{ALConfig, RepetitionResult};
    use crate::stats::{wilcoxon_holm_cd, CdParams};

    fn run(dataset: &str, strategy: &str, auacs: &[f64]) -> ALRunResult {
        let repetitions: Vec<RepetitionResult> = auacs
            .iter()
            .enumerate()
            .map(|(i, &a)| RepetitionResult {
                repetition: i,
                curve: vec![a / 100.0],
                labeled_counts: vec![1],
                auac: a,
                initial: vec![],
                queries: vec![],
                full_accuracy: a / 100.0,
                pool_size: 1,
                test_size: 1,
                error: None,
                seconds: 0.0,
            })
            .collect();
        ALRunResult {
            dataset: dataset.into(),
            strategy: strategy.into(),
            config: ALConfig::default(),
            mean_auac: auacs.iter().sum::<f64>() / auacs.len() as f64,
            mean_full_accuracy: 0.0,
            mean_curve: vec![],
            repetitions,
        }
    }

    #[test]
    fn single_row_bolds_winner() {
        let runs = [
            run("d", "random", &[70.0, 72.0, 71.0]),
            run("d", "klir", &[80.0, 81.5, 79.0]),
        ];
        let table = ComparisonTable::from_runs(&runs).unwrap();
        assert_eq!(table.winners, vec![vec![false, true]]);
        let rt = table.row_tests[0].as_ref().unwrap();
        assert_eq!((rt.best, rt.second), (1, 0));
        assert!(rt.test.unwrap().statistic > 0.0);
        let cd = CDResult {
            strategies: table.strategies.clone(),
            average_ranks: vec![2.0, 1.0],
            friedman: TestResult {
                statistic: 1.0,
                p_value: 0.3,
            },
            pairwise: vec![],
            cliques: vec![vec![1, 0]],
            params: CdParams::default(),
        };
        let report = render_report(&table, &cd).unwrap();
        let rows: Vec<&str> = report
            .markdown
            .lines()
            .filter(|l| l.starts_with("| d |"))
            .collect();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].contains("**80.17**") && rows[0].contains(" 71.00 |"));
        assert_eq!(report.cd_csv.lines().nth(1), Some("klir,1,1,0"));
    }

    #[test]
    fn empty_cliques_error_and_no_file() {
        let runs = [run("d", "a", &[1.0, 2.0]), run("d", "b", &[2.0, 3.0])];
        let table = ComparisonTable::from_runs(&runs).unwrap();
        let cd = CDResult {
            strategies: table.strategies.clone(),
            average_ranks: vec![1.5, 1.5],
            friedman: TestResult {
                statistic: 0.0,
                p_value: 1.0,
            },
            pairwise: vec![],
            cliques: vec![],
            params: CdParams::default(),
        };
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report");
        let result = render_report(&table, &cd).and_then(|r| r.write(&out));
        assert!(result.is_err());
        assert!(!out.exists());
    }

    #[test]
    fn fifteen_by_three_table() {
        let strategies = ["random", "least_confidence", "klir(0.2)"];
        let mut runs = Vec::new();
        for d in 0..15 {
            for (s, name) in strategies.iter().enumerate() {
                let base = 70.0 + d as f64 + s as f64;
                runs.push(run(
                    &format!("d{d}"),
                    name,
                    &[base, base + 0.5, base - 0.25],
                ));
            }
        }
        let table = ComparisonTable::from_runs(&runs).unwrap();
        let names: Vec<String> = strategies.iter().map(|s| s.to_string()).collect();
        let cd =
            wilcoxon_holm_cd(&names, &table.mean_matrix().unwrap(), CdParams::default()).unwrap();
        let report = render_report(&table, &cd).unwrap();
        let body = report
            .markdown
            .lines()
            .filter(|l| l.starts_with("| d"))
            .count();
        assert_eq!(body, 15);
        assert_eq!(report.cd_csv.lines().count(), 1 + 3);
        assert!(report
            .cd_csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("klir(0.2),1,1,"));
    }
}
