pub mod arithmetic;
pub mod csp;
pub mod echelon;
pub mod error;
pub mod groups;
pub mod instance;
pub mod poly;
pub mod unity;
pub mod ximp;
pub mod zpm;

pub use error::{Error, Result};
