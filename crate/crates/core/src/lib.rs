pub mod dsl;
pub mod error;
pub mod exact;
pub mod fields;
pub mod germs;
pub mod liealg;
pub mod linalg;
pub mod matrixgeo;
pub mod poly;
pub mod ratmap;
pub mod report;
pub mod series;

pub use error::{Error, Result};
