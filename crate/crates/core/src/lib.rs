//! Declarative configuration checks over federated inventory data.
//!
//! Check content (objects, states, tests, definitions) is bound to target
//! definitions that select groups of installed software components from a
//! data source. Groups are planned into system tests using site collectors,
//! then configuration documents are collected through adapters and evaluated.

pub mod cli;
pub mod content;
pub mod datasource;
pub mod model;
pub mod oval;
pub mod planner;
pub mod report;
pub mod resolve;
pub mod xquery;
