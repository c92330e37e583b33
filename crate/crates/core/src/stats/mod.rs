//! Statistical comparison of query strategies over datasets.
mod cd;
mod hypothesis;
mod report;

pub use cd::{wilcoxon_holm_cd, CDResult, CdParams, PairwiseTest};
pub use hypothesis::{
    average_ranks, friedman_test, holm_adjust, paired_t_test, rank_ascending, rank_descending,
    rank_matrix, wilcoxon_signed_rank, Alternative, TestResult, WILCOXON_EXACT_MAX,
};
pub use report::{
    render_report, render_table, Cell, ComparisonTable, Report, RowTest, CD_CSV_HEADER,
};
