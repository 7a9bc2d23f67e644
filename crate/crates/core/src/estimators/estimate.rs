use alloc::vec::Vec;

use crate::math::exp;

/// Which algorithm produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Is,
    Smc,
    Dpf,
    Combo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Is => "is",
            Method::Smc => "smc",
            Method::Dpf => "dpf",
            Method::Combo => "combo",
        }
    }
}

/// Per-step particle diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    /// Effective sample size after the step's weight update, before any
    /// resampling. Zero when every weight vanished.
    pub ess: f64,
    /// Distinct removal paths (SMC/IS) or distinct states in the support (DPF).
    pub unique: usize,
    pub resampled: bool,
    /// Log of the step's contribution to the likelihood estimate.
    pub log_increment: f64,
}

/// A likelihood estimate with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodEstimate {
    pub method: Method,
    /// Log of the estimate; always the sum of `segments`.
    pub log_value: f64,
    /// Log factors whose product is the estimate: one per inter-resampling
    /// segment for IS/SMC, one per step for the DPF.
    pub segments: Vec<f64>,
    /// Steps after which the particles were resampled.
    pub resample_steps: Vec<usize>,
    pub trace: Vec<StepDiagnostics>,
    /// Effective sample size of the final weights (IS and SMC).
    pub final_ess: Option<f64>,
    /// Every particle reached weight zero.
    pub collapsed: bool,
    /// Wall-clock seconds; filled in by callers that time the run.
    pub seconds: f64,
}

impl LikelihoodEstimate {
    pub(crate) fn from_segments(method: Method, segments: Vec<f64>) -> Self {
        let log_value = segments.iter().sum();
        Self {
            method,
            log_value,
            segments,
            resample_steps: Vec::new(),
            trace: Vec::new(),
            final_ess: None,
            collapsed: false,
            seconds: 0.0,
        }
    }

    pub(crate) fn collapsed(method: Method) -> Self {
        let mut e = Self::from_segments(method, alloc::vec![f64::NEG_INFINITY]);
        e.collapsed = true;
        e
    }

    pub fn value(&self) -> f64 {
        exp(self.log_value)
    }

    /// Largest number of distinct paths or states seen at any step.
    pub fn peak_unique(&self) -> usize {
        self.trace.iter().map(|d| d.unique).max().unwrap_or(0)
    }
}
