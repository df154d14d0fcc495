use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::DEFAULT_DISTORTION;
use crate::error::{Error, Result};
use crate::lfw::LfwFormula;
use crate::window::{WindowSchedule, WindowStrategy, DEFAULT_PHASES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cbow,
    SkipGram,
}

impl ModelKind {
    pub fn default_learning_rate(self) -> f64 {
        match self {
            ModelKind::Cbow => 0.05,
            ModelKind::SkipGram => 0.025,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Cbow => "cbow",
            ModelKind::SkipGram => "skipgram",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cbow" => Ok(ModelKind::Cbow),
            "skipgram" | "skip-gram" => Ok(ModelKind::SkipGram),
            other => Err(Error::Config(format!("unknown model `{other}`"))),
        }
    }
}

pub const DEFAULT_DIM: usize = 128;
pub const DEFAULT_WINDOW: usize = 15;
pub const DEFAULT_EPOCHS: usize = 6;
pub const DEFAULT_NEGATIVES: usize = 5;
pub const DEFAULT_LFW_LR_SCALE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub dim: usize,
    pub window: WindowSchedule,
    /// Distance-weight formula for CBOW pooling; `None` is plain averaging.
    pub lfw: Option<LfwFormula>,
    /// Keep the weight parameters at their initial zeros.
    #[serde(default)]
    pub freeze_lfw: bool,
    /// Weight-parameter learning rate as a fraction of the embedding rate.
    pub lfw_lr_scale: f64,
    pub negatives: usize,
    pub learning_rate: f64,
    /// Subsampling threshold; `None` disables subsampling.
    pub subsample: Option<f64>,
    pub distortion: f64,
    pub threads: usize,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults: d = 128, r = 15, 6 epochs, 5 negatives, one thread. CBOW uses
    /// a fixed window, Skip-gram the per-center random window.
    pub fn new(model: ModelKind) -> Self {
        let strategy = match model {
            ModelKind::Cbow => WindowStrategy::Fixed,
            ModelKind::SkipGram => WindowStrategy::RandomDynamic,
        };
        TrainConfig {
            model,
            dim: DEFAULT_DIM,
            window: WindowSchedule {
                strategy,
                max_window: DEFAULT_WINDOW,
                epochs: DEFAULT_EPOCHS,
                phases: DEFAULT_PHASES,
            },
            lfw: None,
            freeze_lfw: false,
            lfw_lr_scale: DEFAULT_LFW_LR_SCALE,
            negatives: DEFAULT_NEGATIVES,
            learning_rate: model.default_learning_rate(),
            subsample: None,
            distortion: DEFAULT_DISTORTION,
            threads: 1,
            seed: 1,
        }
    }

    pub fn epochs(&self) -> usize {
        self.window.epochs
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config(
                "at least one negative sample is required".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if !(self.lfw_lr_scale >= 0.0 && self.lfw_lr_scale.is_finite()) {
            return Err(Error::Config(
                "weight learning-rate scale must be non-negative".into(),
            ));
        }
        if self.threads == 0 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        if let Some(t) = self.subsample {
            if t.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Config(
                    "subsampling threshold must be positive".into(),
                ));
            }
        }
        if self.lfw.is_some() && self.model != ModelKind::Cbow {
            return Err(Error::Config("distance weights apply to CBOW only".into()));
        }
        self.window.validate()
    }
}
