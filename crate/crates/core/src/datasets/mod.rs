//! Datasets: CSV ingestion with rich labels, the named benchmark registry,
//! synthetic 2-D generators and uncertainty landscapes.

mod csv_io;
mod dataset;
mod landscape;
pub mod registry;
mod synthetic;

pub use csv_io::{
    format_rich_label, load_csv, parse_csv, parse_rich_label, to_csv_string, write_csv, CsvSchema,
    MASS_DECIMALS, RICH_LABEL_TOLERANCE,
};
pub use dataset::RichDataset;
pub use landscape::{landscape, Bounds, LandscapeModel, LandscapeRaster};
pub use registry::{load_named, Manifest, ManifestEntry};
pub use synthetic::{dog2_surrogate, generate_synthetic, SyntheticKind, SyntheticSpec};
