//! Thermodynamic formalism for subshifts of finite type and their suspension
//! flows: pressure and equilibrium states of locally constant potentials,
//! non-additive potential families, flow equivalence, multifractal spectra of
//! ratios of flow integrals, and an embedding lab for smooth flows.

pub mod cocycle;
pub mod embedding;
pub mod equivalence;
pub mod error;
pub mod io;
pub mod multifractal;
pub mod numeric;
pub mod potential;
pub mod suspension;
pub mod symbolic;
pub mod transfer;

pub use cocycle::MatrixCocycle;
pub use error::{Error, Result};
pub use potential::{LocallyConstantFunction, PotentialFamily};
pub use symbolic::{PeriodicPoint, Sft, Word};
pub use transfer::{gibbs_measure, pressure, GibbsMarkovMeasure};
