//! Length kernel, nonlinearity bundle, free energy and box projection.

mod bundle;
mod energy;
mod gamma;
mod projection;

pub use bundle::{BundleTable, CustomFns, NonlinearityBundle};
pub use energy::kwc_energy;
pub use gamma::{gamma_eps, grad_gamma_eps, hess_gamma_eps, sgr, Sgr};
pub(crate) use gamma::{gamma2, grad2, hess2};
pub use projection::{project_box, BoxConstraint};
