//! Property suites, certificates and SVG rendering.
//!
//! A suite runs a group of checks and returns one [`Certificate`] per
//! subject. Certificates are deterministic for fixed inputs, seed and
//! precision; only `timestamp` varies between runs unless it is pinned in
//! the [`SuiteConfig`].

mod suites;
mod svg;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::families::CheeseSpec;
use crate::par::Execution;
use crate::precision::{Precision, Tolerance, Verdict};

pub use suites::{random_admissible_disc, random_admissible_family, run_suite, toy_seed_family, SUITES};
pub use svg::render_svg;

pub const CERTIFICATE_SCHEMA: &str = "cheese-certificate/1";

/// The default seed used whenever none is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub claim_id: String,
    pub suite: String,
    pub subject: String,
    pub inputs_digest: String,
    pub verdict: Verdict,
    /// Smallest relative margin among the constituent strict checks.
    pub margin: String,
    pub precision_bits: u32,
    pub seed: u64,
    pub timestamp: String,
    pub details: Value,
}

impl Certificate {
    /// Canonical JSON with the timestamp blanked, for reproducibility checks.
    pub fn to_canonical_json(&self) -> String {
        let mut c = self.clone();
        c.timestamp = String::new();
        serde_json::to_string(&c).expect("certificate serializes")
    }
}

/// SHA-256 of the compact JSON rendering of `inputs`.
pub fn digest(inputs: &Value) -> String {
    let text = serde_json::to_string(inputs).expect("JSON value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Parameters shared by the suites; each suite reads the fields it needs.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub precision: Precision,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub exec: Execution,
    /// Random discs (sqrt_disc) or random families (sqrt_cheese).
    pub trials: usize,
    /// Accepted inclusion samples per disc (sqrt_disc).
    pub samples: u64,
    /// Orders or family parameters to run, depending on the suite.
    pub orders: Vec<u32>,
    pub depth: u64,
    pub n_max: u32,
    /// Discs per synthetic group.
    pub count: u32,
    /// Random rational functions (descent).
    pub functions: usize,
    /// Seed family for the iterated square-root cheese.
    pub seed_family: Option<CheeseSpec>,
    /// Fixed timestamp; the current UTC time when `None`.
    pub timestamp: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            precision: Precision::default(),
            seed: DEFAULT_SEED,
            tolerance: Tolerance::default(),
            exec: Execution::default(),
            trials: 100,
            samples: 100_000,
            orders: Vec::new(),
            depth: 20,
            n_max: 10,
            count: 8,
            functions: 200,
            seed_family: None,
            timestamp: None,
        }
    }
}

impl SuiteConfig {
    /// Defaults for a suite, with `orders` filled in.
    pub fn for_suite(suite: &str) -> Self {
        let orders = match suite {
            "sqrt_disc" => (1..=8).collect(),
            "sqrt_cheese" => vec![1, 2, 3],
            "road_runner" => vec![2, 3, 4],
            "infinite_order" => vec![1, 2, 3],
            "descent" => vec![1, 2, 3, 4],
            "norm_bound" => vec![3],
            "pipeline_main_theorem" => vec![2],
            "pipeline_m_to_infinity" => (2..=6).collect(),
            _ => Vec::new(),
        };
        let trials = if suite == "sqrt_cheese" { 50 } else { 100 };
        SuiteConfig {
            orders,
            trials,
            ..SuiteConfig::default()
        }
    }

    pub(crate) fn now(&self) -> String {
        self.timestamp
            .clone()
            .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
    }
}

/// Overall verdict of a certificate list: fail dominates truncated-only.
pub fn overall(certs: &[Certificate]) -> Verdict {
    certs.iter().fold(Verdict::Pass, |acc, c| acc.and(c.verdict))
}
