use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{window_bounds, NegativeSamplingTable, TokenStream, Vocabulary};
use crate::error::{Error, Result};
use crate::lfw::{LfwParams, ParamGrad, WeightTable, MAX_PARAMS};
use crate::scalar::Scalar;
use crate::window::{WindowSchedule, WindowStrategy};

use super::config::{ModelKind, TrainConfig};
use super::embeddings::EmbeddingMatrices;
use super::hogwild::{SharedMatrices, SharedParams};
use super::sgd::LearningRate;
use super::step::{cbow_update, skipgram_update, CbowPosition, Scratch};

/// Positions between learning-rate refreshes and weight-parameter flushes.
pub const UPDATE_INTERVAL: usize = 10_000;

/// One line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub epochs: usize,
    /// Window in effect (upper bound of the per-center draw for the
    /// random-dynamic strategy).
    pub window: usize,
    pub mean_loss: f64,
    pub params: Option<LfwParams<f64>>,
    pub tokens_per_sec: f64,
    pub positions: u64,
    /// Logistic predictions against an observed word (one per CBOW position,
    /// one per center/context pair for Skip-gram).
    pub predictions: u64,
    pub learning_rate: f64,
}

impl fmt::Display for EpochLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epoch {}/{} window {} loss {:.6} lr {:.6}",
            self.epoch, self.epochs, self.window, self.mean_loss, self.learning_rate
        )?;
        if let Some(p) = &self.params {
            for (name, v) in p.formula().param_names().iter().zip(p.values()) {
                write!(f, " {name} {v:.6}")?;
            }
        }
        write!(f, " {:.0} tokens/s", self.tokens_per_sec)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput<F> {
    pub embeddings: EmbeddingMatrices<F>,
    /// Final weight parameters when distance weighting was enabled.
    pub lfw: Option<LfwParams<f64>>,
    pub epochs: Vec<EpochLog>,
}

/// Window used around one center: a fresh draw on `1..=epoch_window` for the
/// random-dynamic strategy, otherwise `epoch_window` itself.
#[inline]
pub fn effective_window<R: Rng + ?Sized>(
    schedule: &WindowSchedule,
    epoch_window: usize,
    rng: &mut R,
) -> usize {
    match schedule.strategy {
        WindowStrategy::RandomDynamic => rng.random_range(1..=epoch_window),
        WindowStrategy::Fixed | WindowStrategy::EpochBased => epoch_window,
    }
}

pub fn train_cbow<F: Scalar>(
    vocab: &Vocabulary,
    stream: &TokenStream,
    config: &TrainConfig,
) -> Result<TrainOutput<F>> {
    if config.model != ModelKind::Cbow {
        return Err(Error::Config(
            "train_cbow called with a non-CBOW config".into(),
        ));
    }
    train(vocab, stream, config)
}

pub fn train_skipgram<F: Scalar>(
    vocab: &Vocabulary,
    stream: &TokenStream,
    config: &TrainConfig,
) -> Result<TrainOutput<F>> {
    if config.model != ModelKind::SkipGram {
        return Err(Error::Config(
            "train_skipgram called with a non-Skip-gram config".into(),
        ));
    }
    train(vocab, stream, config)
}

#[derive(Debug, Default, Clone, Copy)]
struct WorkerStats {
    loss: f64,
    positions: u64,
    predictions: u64,
    last_lr: f64,
}

struct Shared<'a, 'm, F> {
    matrices: &'a SharedMatrices<'m, F>,
    params: Option<&'a SharedParams>,
    noise: &'a NegativeSamplingTable,
    config: &'a TrainConfig,
    lr: LearningRate,
    progress: &'a AtomicU64,
    planned_words: u64,
    abort: &'a AtomicBool,
    epoch: usize,
    epoch_window: usize,
}

impl<F: Scalar> Shared<'_, '_, F> {
    fn current_lr(&self) -> f64 {
        let done = self.progress.load(Ordering::Relaxed) as f64;
        self.lr.at(done / self.planned_words.max(1) as f64)
    }
}

/// Trains on `stream` and returns the matrices, final weight parameters and
/// per-epoch log. Single-threaded runs are bit-reproducible for a seed.
pub fn train<F: Scalar>(
    vocab: &Vocabulary,
    stream: &TokenStream,
    config: &TrainConfig,
) -> Result<TrainOutput<F>> {
    config.validate()?;
    if vocab.len() < 2 {
        return Err(Error::DegenerateVocabulary);
    }
    if stream.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(&bad) = stream.ids().iter().find(|&&w| w as usize >= vocab.len()) {
        return Err(Error::Config(format!("token id {bad} outside vocabulary")));
    }
    let stream = stream.clone().with_subsampling(config.subsample);
    let noise = NegativeSamplingTable::new(vocab, config.distortion)?;
    let mut matrices = EmbeddingMatrices::<F>::new(vocab.len(), config.dim, config.seed)?;
    let shared_params = config.lfw.map(|f| SharedParams::new(&LfwParams::zeros(f)));

    let epochs = config.epochs();
    let planned_words = (epochs * stream.len()) as u64;
    let progress = AtomicU64::new(0);
    let abort = AtomicBool::new(false);
    let ranges = stream.partition(config.threads);
    let mut rngs: Vec<ChaCha8Rng> = (0..config.threads)
        .map(|w| {
            let mut r = ChaCha8Rng::seed_from_u64(config.seed);
            r.set_stream(w as u64 + 1);
            r
        })
        .collect();

    let mut logs = Vec::with_capacity(epochs);
    for epoch in 1..=epochs {
        let epoch_window = config.window.epoch_window(epoch)?;
        let started = Instant::now();
        let results: Vec<Result<WorkerStats>> = {
            let matrices = SharedMatrices::new(&mut matrices);
            let ctx = Shared {
                matrices: &matrices,
                params: shared_params.as_ref(),
                noise: &noise,
                config,
                lr: LearningRate::new(config.learning_rate),
                progress: &progress,
                planned_words,
                abort: &abort,
                epoch,
                epoch_window,
            };
            let stream = &stream;
            let ctx = &ctx;
            std::thread::scope(|s| {
                let handles: Vec<_> = ranges
                    .iter()
                    .cloned()
                    .zip(rngs.iter_mut())
                    .map(|(range, rng)| {
                        s.spawn(move || {
                            let raw_len = range.len();
                            let tokens = stream.subsampled(vocab, range, rng);
                            run_worker(ctx, &tokens, raw_len, rng)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect()
            })
        };
        let mut total = WorkerStats::default();
        for r in results {
            let s = r?;
            total.loss += s.loss;
            total.positions += s.positions;
            total.predictions += s.predictions;
            total.last_lr = total.last_lr.max(s.last_lr);
        }
        if let Some((name, row, col)) = matrices.find_non_finite() {
            return Err(Error::NonFinite {
                epoch,
                position: 0,
                word: row as u32,
                detail: format!("{name} matrix entry ({row}, {col}) is not finite after the epoch"),
            });
        }
        let secs = started.elapsed().as_secs_f64().max(1e-9);
        let log = EpochLog {
            epoch,
            epochs,
            window: epoch_window,
            mean_loss: total.loss / total.predictions.max(1) as f64,
            params: shared_params.as_ref().map(|p| p.snapshot()),
            tokens_per_sec: stream.len() as f64 / secs,
            positions: total.positions,
            predictions: total.predictions,
            learning_rate: total.last_lr,
        };
        log::info!("{log}");
        logs.push(log);
    }

    Ok(TrainOutput {
        embeddings: matrices,
        lfw: shared_params.map(|p| p.snapshot()),
        epochs: logs,
    })
}

fn run_worker<F: Scalar>(
    ctx: &Shared<'_, '_, F>,
    tokens: &[u32],
    raw_len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<WorkerStats> {
    let config = ctx.config;
    let learn_params = ctx.params.is_some() && !config.freeze_lfw;
    let mut params_now = ctx.params.map(|p| p.snapshot());
    let mut weights = match &params_now {
        Some(p) => WeightTable::from_params(p, config.window.max_window),
        None => WeightTable::uniform(config.window.max_window),
    };
    let mut scratch = Scratch::<F>::new(config.dim);
    let mut negatives = vec![0u32; config.negatives];
    let mut param_step: ParamGrad<f64> = [0.0; MAX_PARAMS];
    let mut stats = WorkerStats::default();
    let mut lr = ctx.current_lr();
    let mut reported_raw = 0usize;
    let len = tokens.len();

    for pos in 0..len {
        if pos > 0 && pos % UPDATE_INTERVAL == 0 {
            if ctx.abort.load(Ordering::Relaxed) {
                return Ok(stats);
            }
            sync_worker(
                ctx,
                SyncPoint { pos, len, raw_len },
                &mut reported_raw,
                &mut param_step,
                &mut weights,
                &mut params_now,
                &mut lr,
            );
        }
        let w = effective_window(&config.window, ctx.epoch_window, rng);
        let (left, right) = window_bounds(pos, len, w);
        if left + right == 0 {
            continue;
        }
        let lr_f = F::from_f64_lossy(lr);
        let center = tokens[pos];
        stats.positions += 1;
        let loss = match config.model {
            ModelKind::Cbow => {
                ctx.noise.fill_negatives(&mut negatives, center, rng)?;
                let mut pg: ParamGrad<f64> = [0.0; MAX_PARAMS];
                let at = CbowPosition {
                    tokens,
                    position: pos,
                    left,
                    right,
                    negatives: &negatives,
                };
                // SAFETY: every id was checked against the vocabulary size.
                let l =
                    unsafe { cbow_update(ctx.matrices, at, &weights, lr_f, &mut scratch, &mut pg) };
                if learn_params {
                    let step = config.lfw_lr_scale * lr;
                    for (acc, g) in param_step.iter_mut().zip(pg) {
                        *acc += step * g;
                    }
                }
                stats.predictions += 1;
                l.to_f64_lossy()
            }
            ModelKind::SkipGram => {
                let mut l = 0.0;
                for off in (-(left as i64)..0).chain(1..=right as i64) {
                    let context = tokens[(pos as i64 + off) as usize];
                    ctx.noise.fill_negatives(&mut negatives, context, rng)?;
                    // SAFETY: as above.
                    l += unsafe {
                        skipgram_update(
                            ctx.matrices,
                            center,
                            context,
                            &negatives,
                            lr_f,
                            &mut scratch,
                        )
                    }
                    .to_f64_lossy();
                    stats.predictions += 1;
                }
                l
            }
        };
        if !loss.is_finite() {
            ctx.abort.store(true, Ordering::Relaxed);
            return Err(Error::NonFinite {
                epoch: ctx.epoch,
                position: pos,
                word: center,
                detail: format!(
                    "loss {loss} at lr {lr:.3e}, window {w} ({left} left, {right} right), negatives {negatives:?}, params {:?}",
                    params_now.as_ref().map(|p| p.values().to_vec())
                ),
            });
        }
        stats.loss += loss;
    }
    sync_worker(
        ctx,
        SyncPoint {
            pos: len,
            len,
            raw_len,
        },
        &mut reported_raw,
        &mut param_step,
        &mut weights,
        &mut params_now,
        &mut lr,
    );
    stats.last_lr = lr;
    Ok(stats)
}

struct SyncPoint {
    pos: usize,
    len: usize,
    raw_len: usize,
}

/// Publishes progress, flushes accumulated weight-parameter steps and
/// refreshes the learning rate and weight table.
fn sync_worker<F: Scalar>(
    ctx: &Shared<'_, '_, F>,
    at: SyncPoint,
    reported_raw: &mut usize,
    param_step: &mut ParamGrad<f64>,
    weights: &mut WeightTable<f64>,
    params_now: &mut Option<LfwParams<f64>>,
    lr: &mut f64,
) {
    let raw_done = (at.pos * at.raw_len)
        .checked_div(at.len)
        .unwrap_or(at.raw_len);
    ctx.progress
        .fetch_add((raw_done - *reported_raw) as u64, Ordering::Relaxed);
    *reported_raw = raw_done;
    if let (Some(shared), false) = (ctx.params, ctx.config.freeze_lfw) {
        shared.add(&param_step.map(|g| -g));
        *param_step = [0.0; MAX_PARAMS];
        let snap = shared.snapshot();
        weights.refresh(&snap);
        *params_now = Some(snap);
    }
    *lr = ctx.current_lr();
}
