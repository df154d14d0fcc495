//! Context window size strategies: fixed, per-center random (`r′ ~ U{1..r}`),
//! and the epoch-based schedule that grows the window in equal phases.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PHASES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowStrategy {
    Fixed,
    RandomDynamic,
    EpochBased,
}

impl fmt::Display for WindowStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowStrategy::Fixed => "fixed",
            WindowStrategy::RandomDynamic => "random",
            WindowStrategy::EpochBased => "edws",
        })
    }
}

impl FromStr for WindowStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(WindowStrategy::Fixed),
            "random" | "random-dynamic" => Ok(WindowStrategy::RandomDynamic),
            "edws" | "epoch-based" => Ok(WindowStrategy::EpochBased),
            other => Err(Error::Config(format!("unknown window strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSchedule {
    pub strategy: WindowStrategy,
    pub max_window: usize,
    pub epochs: usize,
    pub phases: usize,
}

impl WindowSchedule {
    pub fn new(
        strategy: WindowStrategy,
        max_window: usize,
        epochs: usize,
        phases: usize,
    ) -> Result<Self> {
        let s = WindowSchedule {
            strategy,
            max_window,
            epochs,
            phases,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn fixed(max_window: usize, epochs: usize) -> Result<Self> {
        Self::new(WindowStrategy::Fixed, max_window, epochs, DEFAULT_PHASES)
    }

    pub fn random_dynamic(max_window: usize, epochs: usize) -> Result<Self> {
        Self::new(
            WindowStrategy::RandomDynamic,
            max_window,
            epochs,
            DEFAULT_PHASES,
        )
    }

    pub fn epoch_based(max_window: usize, epochs: usize) -> Result<Self> {
        Self::new(
            WindowStrategy::EpochBased,
            max_window,
            epochs,
            DEFAULT_PHASES,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_window == 0 {
            return Err(Error::Config("window must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.strategy == WindowStrategy::EpochBased
            && (self.phases == 0
                || !self.epochs.is_multiple_of(self.phases)
                || !self.max_window.is_multiple_of(self.phases))
        {
            return Err(Error::ScheduleNotDivisible {
                epochs: self.epochs,
                window: self.max_window,
                phases: self.phases,
            });
        }
        Ok(())
    }

    /// Per-center draw `r′` uniform on `1..=r`.
    #[inline]
    pub fn window_for_center<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        debug_assert_eq!(self.strategy, WindowStrategy::RandomDynamic);
        rng.random_range(1..=self.max_window)
    }

    /// `r′_k = ceil(P·k/K) · r/P` for 1-based epoch `k`.
    pub fn window_for_epoch(&self, epoch: usize) -> Result<usize> {
        if self.strategy != WindowStrategy::EpochBased {
            return Err(Error::Config(format!(
                "window_for_epoch requires the epoch-based strategy, not `{}`",
                self.strategy
            )));
        }
        self.validate()?;
        if epoch == 0 || epoch > self.epochs {
            return Err(Error::EpochOutOfRange {
                epoch,
                epochs: self.epochs,
            });
        }
        let phase = (self.phases * epoch).div_ceil(self.epochs);
        Ok(phase * self.max_window / self.phases)
    }

    /// Largest window that may be used during epoch `epoch`; random-dynamic
    /// windows are drawn per center below this bound.
    pub fn epoch_window(&self, epoch: usize) -> Result<usize> {
        match self.strategy {
            WindowStrategy::Fixed | WindowStrategy::RandomDynamic => Ok(self.max_window),
            WindowStrategy::EpochBased => self.window_for_epoch(epoch),
        }
    }
}
