//! Run configuration: JSON ingestion, validation, and default filling.
//!
//! Schema:
//! ```json
//! {
//!   "inner": {"type": "blaschke", "zeros": [{"re": 0.5, "im": 0.0}],
//!             "unimodular": {"re": 1.0, "im": 0.0}},
//!   "truncation": {"N": "auto", "tail_tol": 1e-24},
//!   "diagnostics": {"n_max": "auto", "tol": 1e-6},
//!   "seed": 42
//! }
//! ```
//! `truncation` and `diagnostics` may be omitted; `N` and `n_max` accept
//! either an integer or the string `"auto"`. The same configuration and seed
//! always produce bit-identical outputs.

use std::path::Path;

use serde::Deserialize;

use ktheta::asymptotics::default_iteration_budget;
use ktheta::model_space::{auto_truncation_order, TAIL_TOL_DEFAULT};
use ktheta::{Error, InnerFunctionSpec, ModelSpaceBasis, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum AutoOrInt {
    Int(usize),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruncationSection {
    #[serde(rename = "N")]
    n: Option<AutoOrInt>,
    tail_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagnosticsSection {
    n_max: Option<AutoOrInt>,
    tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    inner: InnerFunctionSpec,
    #[serde(default)]
    truncation: TruncationSection,
    #[serde(default)]
    diagnostics: DiagnosticsSection,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderChoice {
    Auto,
    Explicit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetChoice {
    Auto,
    Explicit(usize),
}

/// Validated configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inner: InnerFunctionSpec,
    pub order: OrderChoice,
    pub tail_tol: f64,
    pub n_max: BudgetChoice,
    pub tol: f64,
    pub seed: u64,
}

fn resolve_auto(value: Option<AutoOrInt>, field: &str) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(AutoOrInt::Int(n)) => Ok(Some(n)),
        Some(AutoOrInt::Text(s)) if s == "auto" => Ok(None),
        Some(AutoOrInt::Text(s)) => Err(Error::Validation(format!(
            "{field}: expected an integer or \"auto\", got \"{s}\""
        ))),
    }
}

/// Parse and validate a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let raw: RawConfig = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    raw.inner.validate()?;

    let order = match resolve_auto(raw.truncation.n, "truncation.N")? {
        Some(n) => {
            if n < 2 {
                return Err(Error::Validation(format!(
                    "truncation.N = {n} must be >= 2"
                )));
            }
            OrderChoice::Explicit(n)
        }
        None => OrderChoice::Auto,
    };
    let tail_tol = raw.truncation.tail_tol.unwrap_or(TAIL_TOL_DEFAULT);
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::Validation(format!(
            "truncation.tail_tol = {tail_tol} must be > 0"
        )));
    }

    let n_max = match resolve_auto(raw.diagnostics.n_max, "diagnostics.n_max")? {
        Some(n) => {
            if n < 1 {
                return Err(Error::Validation("diagnostics.n_max must be >= 1".into()));
            }
            BudgetChoice::Explicit(n)
        }
        None => BudgetChoice::Auto,
    };
    let tol = raw.diagnostics.tol.unwrap_or(1e-6);
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Validation(format!(
            "diagnostics.tol = {tol} must be > 0"
        )));
    }

    Ok(RunConfig {
        inner: raw.inner,
        order,
        tail_tol,
        n_max,
        tol,
        seed: raw.seed,
    })
}

impl RunConfig {
    /// Build the model-space basis at the configured (or automatic) order.
    /// The second value reports an automatic-order estimate failure, which
    /// pairs with the basis truncation warning for singular specs.
    pub fn build_basis(&self) -> Result<(ModelSpaceBasis, bool)> {
        let (order, estimate_failed) = match self.order {
            OrderChoice::Explicit(n) => (n, false),
            OrderChoice::Auto => auto_truncation_order(&self.inner, self.tail_tol)?,
        };
        let basis = ModelSpaceBasis::build(&self.inner, order)?;
        Ok((basis, estimate_failed))
    }

    /// Iteration budget, post-basis: the automatic rule is `max(4 d, 24)`.
    pub fn iteration_budget(&self, dim: usize) -> usize {
        match self.n_max {
            BudgetChoice::Explicit(n) => n,
            BudgetChoice::Auto => default_iteration_budget(dim),
        }
    }
}
