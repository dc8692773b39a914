//! Runner, reports and command line for `propbridge-core` properties.
//!
//! A [`Registry`] holds named properties. [`run_suite`] checks them under one
//! backend (or an ensemble) with per-property deadlines, and the resulting
//! [`RunReport`] serializes to the JSON report format. The `propbridge`
//! binary drives the built-in [`corpus`]; embedders call [`cli::main_with`]
//! with their own registry.

pub mod cli;
pub mod config;
pub mod corpus;
mod guard;
pub mod history;
pub mod registry;
pub mod report;
pub mod runner;
pub mod waiver;

pub use propbridge_core as core;

pub use registry::{Registry, RegistryError};
pub use report::{profile_report, write_report, Entry, RunReport, Totals};
pub use runner::{
    check_property, run_ensemble, run_suite, Backend, Checker, Deadline, InconsistentBackends,
    RunConfig,
};
