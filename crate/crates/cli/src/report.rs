use serde::Serialize;
use trimweight::{AlphaSolution, BootstrapResult, CiMethod, Error, PipelineEstimate, WeightFamily, WeightSpec};

#[derive(Debug, Serialize)]
pub struct EstimateReport {
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<[f64; 2]>,
    pub weight_family: WeightFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub augmented: bool,
    pub n_total: usize,
    /// Sum of the inclusion weights.
    pub n_effective: f64,
    /// Units with weight at most 0.5.
    pub n_trimmed_out: usize,
    pub bootstrap_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_method: Option<CiMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_replicates: Option<usize>,
}

impl EstimateReport {
    pub fn new(spec: &WeightSpec, augmented: bool, fit: &PipelineEstimate, boot: Option<&BootstrapResult>, seed: u64) -> Self {
        let window = spec.window();
        Self {
            estimate: fit.estimate,
            se: boot.map(|b| b.se),
            ci: boot.map(|b| [b.ci_low, b.ci_high]),
            weight_family: spec.family(),
            alpha1: window.map(|w| w.0),
            alpha2: window.map(|w| w.1),
            alpha: spec.att_alpha(),
            epsilon: spec.epsilon(),
            augmented,
            n_total: fit.n_total,
            n_effective: fit.n_effective,
            n_trimmed_out: fit.n_total - fit.n_included,
            bootstrap_b: boot.map_or(0, |b| b.b),
            seed: boot.map(|_| seed),
            ci_method: boot.map(|b| b.method),
            failed_replicates: boot.map(|b| b.failed_replicates),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<18}{v}\n"));
        line("estimate", format!("{:.4}", self.estimate));
        if let (Some(se), Some([lo, hi])) = (self.se, self.ci) {
            line("se", format!("{se:.4}"));
            line("95% ci", format!("({lo:.4}, {hi:.4})"));
        }
        line("weight", self.weight_family.to_string());
        if let (Some(a1), Some(a2)) = (self.alpha1, self.alpha2) {
            line("window", format!("[{a1}, {a2}]"));
        }
        if let Some(a) = self.alpha {
            line("alpha", a.to_string());
        }
        if let Some(e) = self.epsilon {
            line("epsilon", format!("{e:e}"));
        }
        line("augmented", self.augmented.to_string());
        line("n", format!("{} ({} trimmed out, effective {:.1})", self.n_total, self.n_trimmed_out, self.n_effective));
        if let (Some(method), Some(failed), Some(seed)) = (self.ci_method, self.failed_replicates, self.seed) {
            line("bootstrap", format!("B={} {method} seed={seed} failed={failed}", self.bootstrap_b));
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct AlphaReport {
    #[serde(flatten)]
    pub solution: AlphaSolution,
    pub n_total: usize,
    pub n_retained: usize,
}

impl AlphaReport {
    pub fn to_text(&self) -> String {
        format!(
            "alpha             {:.6}\nretained          {} of {} ({:.1}%)\nresidual          {:.2e}\n",
            self.solution.alpha,
            self.n_retained,
            self.n_total,
            100.0 * self.solution.retained_fraction,
            self.solution.residual
        )
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Validation,
    Numeric,
}

impl ErrorReport {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { error: ErrorBody { kind: ErrorKind::Validation, message: message.into() } }
    }

    pub fn exit_code(&self) -> u8 {
        match self.error.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Numeric => 3,
        }
    }
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        let kind = if e.is_validation() { ErrorKind::Validation } else { ErrorKind::Numeric };
        Self { error: ErrorBody { kind, message: e.to_string() } }
    }
}
