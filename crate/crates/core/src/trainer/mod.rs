//! CBOW and Skip-gram training with negative sampling and lock-free
//! parallel SGD.

mod config;
mod embeddings;
mod hogwild;
pub mod loss;
mod run;
mod sgd;
mod step;

pub use config::{
    ModelKind, TrainConfig, DEFAULT_DIM, DEFAULT_EPOCHS, DEFAULT_LFW_LR_SCALE, DEFAULT_NEGATIVES,
    DEFAULT_WINDOW,
};
pub use embeddings::EmbeddingMatrices;
pub use run::{
    effective_window, train, train_cbow, train_skipgram, EpochLog, TrainOutput, UPDATE_INTERVAL,
};
pub use sgd::{sgd_step, LearningRate, LR_FLOOR_RATIO};
pub use step::{cbow_step, ns_term, skipgram_step, CbowPosition};
