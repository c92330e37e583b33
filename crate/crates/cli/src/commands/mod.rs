pub mod al_run;
pub mod fetch;
pub mod landscape;
pub mod report;
pub mod selfcheck;
