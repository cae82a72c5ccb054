pub mod evolve;
pub mod reproduce;
pub mod spectrum;

pub use evolve::{cmd_evolve, RunSummary};
pub use reproduce::{cmd_reproduce, ReproduceReport, Scenario};
pub use spectrum::{cmd_spectrum, SpectrumRequest, SpectrumSummary};
