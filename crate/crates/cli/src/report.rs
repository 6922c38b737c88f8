//! Output records shared by every subcommand. JSON keys and the CSV column
//! order below are part of the interface.

use serde::Serialize;

use evograph_core::closedform::{BoundsReport, DeleteriousBound};
use evograph_core::exactchain::ExactFixation;
use evograph_core::montecarlo::EstimateReport;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub placement: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DpCheck {
    pub value: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TBounds {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonsOut {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4_minus: f64,
    pub e4_plus: f64,
    pub e5: f64,
    pub e5_log10: f64,
}

/// `lower`/`upper` are the finite-size bounds.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsOut {
    pub lower: f64,
    pub upper: f64,
    pub lower_asym: f64,
    pub upper_asym: f64,
    pub lower_t_free: f64,
    pub upper_t_free: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeleteriousOut {
    pub gamma: f64,
    pub bound: f64,
    pub bound_log10: f64,
    pub tight: f64,
    pub tight_log10: f64,
    pub note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactOut {
    pub per_node: Vec<f64>,
    pub average: f64,
    pub moran: f64,
    pub residual: f64,
    pub states: usize,
    pub strongly_connected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateOut {
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
    pub successes: u64,
    pub capped: u64,
    pub steps_total: u64,
    pub seed_base: u64,
    pub rng: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub params: Params,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_check: Option<DpCheck>,
    #[serde(rename = "T_bounds", skip_serializing_if = "Option::is_none")]
    pub t_bounds: Option<TBounds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<EpsilonsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deleterious: Option<DeleteriousOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_secs: Option<f64>,
}

impl Report {
    pub fn new(command: &'static str, params: Params) -> Self {
        Self { command, params, ..Self::default() }
    }

    pub fn with_bounds(mut self, rep: &BoundsReport) -> Self {
        let e = rep.ledger.epsilons;
        self.t = Some(rep.ledger.t);
        self.epsilons = Some(EpsilonsOut {
            e0: e.e0,
            e1: e.e1,
            e2: e.e2,
            e3: e.e3,
            e4_minus: e.e4_minus,
            e4_plus: e.e4_plus,
            e5: e.e5,
            e5_log10: e.e5_log10,
        });
        self.gamma = Some(rep.ledger.gamma);
        self.bounds = Some(BoundsOut {
            lower: rep.lower_finite,
            upper: rep.upper_finite,
            lower_asym: rep.asymptotic.lower,
            upper_asym: rep.asymptotic.upper,
            lower_t_free: rep.asymptotic.lower_t_free,
            upper_t_free: rep.asymptotic.upper_t_free,
        });
        self
    }

    pub fn with_deleterious(mut self, d: &DeleteriousBound) -> Self {
        self.t = Some(d.t);
        self.gamma = Some(d.gamma);
        self.deleterious = Some(DeleteriousOut {
            gamma: d.gamma,
            bound: d.bound,
            bound_log10: d.bound_log10,
            tight: d.tight,
            tight_log10: d.tight_log10,
            note: "resident bias from fitness 1/r without finite-size corrections",
        });
        self
    }

    pub fn with_exact(mut self, x: &ExactFixation, moran: f64) -> Self {
        self.exact = Some(ExactOut {
            per_node: x.per_node.clone(),
            average: x.average,
            moran,
            residual: x.residual,
            states: x.states,
            strongly_connected: x.strongly_connected,
        });
        if !x.strongly_connected {
            self.warnings.push("graph is not strongly connected".into());
        }
        self
    }

    pub fn with_estimate(mut self, e: &EstimateReport, timing: bool) -> Self {
        self.estimate = Some(EstimateOut {
            p: e.p,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            trials: e.trials,
            successes: e.successes,
            capped: e.capped,
            steps_total: e.steps_total,
            seed_base: e.seed_base,
            rng: e.rng.clone(),
        });
        self.warnings.extend(e.warning());
        if timing {
            self.wall_clock_secs = Some(e.wall_clock_secs);
        }
        self
    }

    pub fn csv_row(&self) -> Vec<String> {
        fn f(x: Option<f64>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        fn u<T: ToString>(x: Option<T>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        let p = &self.params;
        let eps = self.epsilons.as_ref();
        let bnd = self.bounds.as_ref();
        let est = self.estimate.as_ref();
        vec![
            self.command.to_string(),
            f(p.r),
            u(p.b),
            u(p.l),
            u(p.h),
            u(p.n),
            u(p.delta),
            p.rule.clone().unwrap_or_default(),
            p.placement.clone().unwrap_or_default(),
            p.family.clone().unwrap_or_default(),
            u(p.trials),
            u(p.seed),
            f(self.t),
            f(self.dp_check.as_ref().map(|d| d.value)),
            f(self.t_bounds.as_ref().map(|b| b.lower)),
            f(self.t_bounds.as_ref().map(|b| b.upper)),
            f(eps.map(|e| e.e0)),
            f(eps.map(|e| e.e1)),
            f(eps.map(|e| e.e2)),
            f(eps.map(|e| e.e3)),
            f(eps.map(|e| e.e4_minus)),
            f(eps.map(|e| e.e4_plus)),
            f(eps.map(|e| e.e5)),
            f(eps.map(|e| e.e5_log10)),
            f(self.gamma),
            f(bnd.map(|b| b.lower)),
            f(bnd.map(|b| b.upper)),
            f(bnd.map(|b| b.lower_asym)),
            f(bnd.map(|b| b.upper_asym)),
            f(self.deleterious.as_ref().map(|d| d.bound_log10)),
            f(self.exact.as_ref().map(|x| x.average)),
            f(est.map(|e| e.p)),
            f(est.map(|e| e.ci_lo)),
            f(est.map(|e| e.ci_hi)),
            u(est.map(|e| e.trials)),
            u(est.map(|e| e.successes)),
            u(est.map(|e| e.capped)),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// CSV header; `Report::csv_row` fills the same columns in this order.
pub const CSV_COLUMNS: [&str; 38] = [
    "command",
    "r",
    "B",
    "L",
    "H",
    "N",
    "delta",
    "rule",
    "placement",
    "family",
    "trials_requested",
    "seed",
    "T",
    "T_dp",
    "T_lower",
    "T_upper",
    "e0",
    "e1",
    "e2",
    "e3",
    "e4_minus",
    "e4_plus",
    "e5",
    "e5_log10",
    "gamma",
    "lower",
    "upper",
    "lower_asym",
    "upper_asym",
    "deleterious_log10",
    "exact_average",
    "p",
    "ci_lo",
    "ci_hi",
    "trials",
    "successes",
    "capped",
    "error",
];
