//! Declarative experiment configuration, JSON-serializable with a strict
//! round-trip guarantee.

use gbn_core::gen::GeneratorSpec;
use serde::{Deserialize, Serialize};

/// Where the experiment graph comes from: a generator spec or a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Spec(GeneratorSpec),
    File { path: String },
}

/// Signal model of the trial signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SignalModel {
    /// Bandlimited with k coefficients from Normal(1, 0.5²).
    Sm1 { k: usize },
    /// Full-band with exponential spectral rolloff past the eigenvalue of
    /// 1-based rank `ref_index`.
    Sm2 { ref_index: usize },
}

impl SignalModel {
    /// Bandwidth used for reconstruction.
    pub fn reconstruction_bandwidth(&self) -> usize {
        match *self {
            SignalModel::Sm1 { k } => k,
            SignalModel::Sm2 { ref_index } => ref_index,
        }
    }
}

fn default_q() -> u32 {
    1
}

/// One sampling scheme to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum SamplerSpec {
    Random,
    Vac {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        num_iter: Option<usize>,
    },
    Chen {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    Anis {
        #[serde(default = "default_q")]
        q: u32,
    },
}

impl SamplerSpec {
    /// Canonical label used in result rows and seed derivation.
    pub fn label(&self) -> &'static str {
        match self {
            SamplerSpec::Random => "random",
            SamplerSpec::Vac { .. } => "vac",
            SamplerSpec::Chen { .. } => "chen",
            SamplerSpec::Anis { .. } => "anis",
        }
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub signal_model: SignalModel,
    pub samplers: Vec<SamplerSpec>,
    pub sampling_rates: Vec<usize>,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub output_dir: String,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Structural checks that do not need the graph; rate bounds are
    /// checked against the node count when the run starts.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.trials == 0 {
            anyhow::bail!("config field `trials` must be >= 1");
        }
        if self.samplers.is_empty() {
            anyhow::bail!("config field `samplers` must list at least one method");
        }
        for (i, s) in self.samplers.iter().enumerate() {
            if self.samplers[..i].iter().any(|t| t.label() == s.label()) {
                anyhow::bail!(
                    "config field `samplers` lists method `{}` twice; result rows and \
                     seed streams are keyed by method name",
                    s.label()
                );
            }
        }
        if self.sampling_rates.is_empty() {
            anyhow::bail!("config field `sampling_rates` must list at least one rate");
        }
        if self.sampling_rates.contains(&0) {
            anyhow::bail!("config field `sampling_rates` must not contain 0");
        }
        if let SignalModel::Sm1 { k: 0 } | SignalModel::Sm2 { ref_index: 0 } = self.signal_model {
            anyhow::bail!("config field `signal_model` needs a positive bandwidth");
        }
        Ok(())
    }
}
