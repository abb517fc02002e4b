//! Reference instances, random coefficient generators and the acceptance
//! suites built on them.

mod instances;
mod random;
mod suite;

pub use instances::*;
pub use random::*;
pub use suite::*;
