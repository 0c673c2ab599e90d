pub mod commbridge;
pub mod error;
pub mod glueqcoh;
pub mod io;
pub mod latspace;
pub mod localization;
pub mod poly;
pub mod rings;
pub mod scalar;
pub mod sheafspec;
pub mod skewproj;

pub use error::{Error, Result};
