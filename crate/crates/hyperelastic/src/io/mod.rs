//! File formats.

pub mod b64;
pub mod fs;
pub mod model;
pub mod report;
pub mod series;
pub mod trace;

pub use fs::{expand_inputs, partial_path, read_string, write_atomic};
pub use model::{
    checkpoint_to_json, dataset_to_json, model_to_json, parse_dataset, parse_model, read_checkpoint, read_dataset,
    read_model, to_json, write_dataset, write_model,
};
pub use series::{parse_series, read_series, to_csv as series_to_csv, write_series};
pub use trace::trace_to_csv;
