//! File formats, verdict reports and command implementations behind the
//! `lucanon` binary.

pub mod commands;
pub mod files;
pub mod report;
