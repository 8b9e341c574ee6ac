//! Branch-and-price for the two-echelon inventory-routing problem.

pub mod bench;
pub mod branching;
pub mod column;
pub mod duals;
pub mod error;
pub mod first_echelon;
pub mod generate;
pub mod lp;
pub mod master;
pub mod model;
pub mod oracle;
pub mod pricing;
pub mod search;
pub mod solution;

pub use error::{Error, Result};
pub use model::{Instance, InstanceData};
