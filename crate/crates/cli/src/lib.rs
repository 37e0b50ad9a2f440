//! Support code for the `heatlid` command: CSV and manifest output, SVG
//! plots, the built-in figures and the verification suites.

pub mod figures;
pub mod output;
pub mod svg;
pub mod verify;
