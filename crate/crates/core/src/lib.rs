pub mod catalog;
pub mod error;
pub mod exact;
pub mod genus;
pub mod geometry;
pub mod harness;
pub mod ktheory;
pub mod milnor;
pub mod motivic;
pub mod transforms;

pub use error::{Error, Result};
pub use exact::{Rational, TruncatedSeries, YPoly};
