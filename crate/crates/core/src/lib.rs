//! Dynamic model of a human partner's perception, cognition and decisions,
//! with parameter identification from session traces, a synthetic participant
//! simulator and a one-step model-based controller.

pub mod control;
pub mod error;
pub mod identify;
pub mod model;
pub mod simulate;
pub mod trace;

pub use error::{MmmError, Result};
