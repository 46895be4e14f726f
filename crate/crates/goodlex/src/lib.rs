//! IO companion to `goodlex-core`: file formats and the pipeline driver.
pub mod formats;
