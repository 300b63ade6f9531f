use std::fmt;

use serde::{Deserialize, Serialize};

/// A dose level, numbered from 1 (lowest dose) to `m` (highest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Level(usize);

impl Level {
    pub const LOWEST: Level = Level(1);

    /// Panics on 0.
    pub fn new(one_based: usize) -> Self {
        assert!(one_based >= 1, "dose levels are numbered from 1");
        Level(one_based)
    }

    pub fn try_new(one_based: usize, m: usize) -> Option<Self> {
        (1..=m).contains(&one_based).then_some(Level(one_based))
    }

    pub fn from_index(index: usize) -> Self {
        Level(index + 1)
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn up(self, m: usize) -> Self {
        Level((self.0 + 1).min(m))
    }

    pub fn down(self) -> Self {
        Level((self.0 - 1).max(1))
    }

    /// Clamp into `[self - 1, self + 1]`.
    pub fn step_toward(self, target: Level) -> Self {
        Level(target.0.clamp(self.0.saturating_sub(1).max(1), self.0 + 1))
    }
}

impl TryFrom<usize> for Level {
    type Error = String;

    fn try_from(v: usize) -> Result<Self, String> {
        if v == 0 {
            Err("dose levels are numbered from 1".into())
        } else {
            Ok(Level(v))
        }
    }
}

impl From<Level> for usize {
    fn from(l: Level) -> usize {
        l.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
