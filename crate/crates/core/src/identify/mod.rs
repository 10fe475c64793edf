//! Parameter identification from session traces.

mod config;
mod data;
mod dm;
mod fit;
mod layout;
mod optim;
mod report;
mod simplify;

pub use config::{Approach, IdentificationConfig};
pub use data::{
    free_run, mse, predict_one_ahead, predict_pairs, split_dataset, train_len, Dataset, Pair, PairSet,
    MIN_SPLIT_ROWS,
};
pub use dm::{identify_dm, DmFit};
pub use fit::{
    assess_identifiability, identify, identify_approach_a, identify_approach_b, identify_conventional,
    identify_with_schedule, warm_start_perception, Assessment, Context, RunRecord, MAX_INIT_DRAWS,
};
pub use layout::{Block, Bounds, Entry, Layout, Slot};
pub use optim::{levenberg_marquardt, optimize, LeastSquares, LmOptions, LmResult};
pub use report::{IdentReport, ParameterRow};
pub use simplify::simplify_model;
