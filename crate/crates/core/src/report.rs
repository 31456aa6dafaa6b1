//! Typed JSON rows emitted by the command-line front end. Field order is the
//! struct order, so re-serializing a parsed report reproduces it byte for
//! byte.

use crate::coloring::GroundColoring;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeReport {
    pub witness_free: bool,
}

/// One exact-number table row: `(t, n, distinct, value-or-cap, nodes, seconds)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberReport {
    pub t: u32,
    pub n: usize,
    pub distinct: bool,
    pub cap: u64,
    /// `None` when the value exceeds the cap.
    pub value: Option<u64>,
    pub nodes: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundStep {
    pub n: u64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t: u64,
    pub n: u64,
    /// Values of the recursion at each length from 2 up to `n`, as decimal
    /// strings (they outgrow fixed-width integers quickly).
    pub steps: Vec<BoundStep>,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefuteReport {
    pub set: Vec<u64>,
    pub levels: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub t: u32,
    pub n: usize,
    pub distinct: bool,
    pub n_max: u64,
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coloring: Option<GroundColoring>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub stage: String,
    pub message: String,
}
