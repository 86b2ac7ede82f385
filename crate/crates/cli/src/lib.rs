//! Instance-file front end: schema, task runner, and report emission.

pub mod instance;
pub mod report;
pub mod tasks;
