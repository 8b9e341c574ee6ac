//! Instance data and the quantities derived from it.

mod instance;
pub mod io;
pub mod periods;

pub use instance::{Customer, Fleet, Instance, InstanceData, Point, Satellite, Supplier};
pub use periods::{CustomerPeriods, SubPeriod};
