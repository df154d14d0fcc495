//! Word embeddings with CBOW and Skip-gram under negative sampling.
//!
//! Two extensions over the classic models:
//!
//! * learnable distance weights for CBOW context pooling ([`lfw`]), where a
//!   closed-form decay with two or four trainable scalars weights each
//!   context word by its distance to the center;
//! * an epoch-based window schedule for Skip-gram ([`window`]), which grows
//!   the window in equal phases instead of drawing it per center word.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`). Training
//! uses `f32`; the gradient checks run the same kernels in `f64`.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod lfw;
pub mod model_io;
pub mod scalar;
pub mod trainer;
pub mod window;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Single-precision embedding matrices used for training and persistence.
pub type Embeddings = trainer::EmbeddingMatrices<f32>;

/// Double-precision matrices, used for gradient verification.
pub type Embeddings64 = trainer::EmbeddingMatrices<f64>;

/// Weight-formula parameters are kept in double precision.
pub type Params = lfw::LfwParams<f64>;

pub type TrainOutput = trainer::TrainOutput<f32>;
