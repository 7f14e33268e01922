use serde::Serialize;

use super::object::Granularity;
use super::time::Millis;

/// Time resolution of every timestamp, in milliseconds.
pub const TIME_RESOLUTION_MS: u64 = 1;

/// Parameters of one analysis run. Echoed verbatim into every report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AnalysisConfig {
    pub granularity: Granularity,
    /// Largest gap between two disjoint units still reported as `NEAR`.
    pub gap_tolerance: Millis,
    /// Episodes shorter than this are merged into the preceding episode.
    pub min_episode_duration: Millis,
    /// Whether `NEAR` pairs take part in classification and co-occurrence.
    pub include_near: bool,
}

impl Default for AnalysisConfig {
    fn default() -> AnalysisConfig {
        AnalysisConfig {
            granularity: Granularity::Problem,
            gap_tolerance: Millis(1000),
            min_episode_duration: Millis::ZERO,
            include_near: false,
        }
    }
}

impl AnalysisConfig {
    pub fn with_granularity(mut self, granularity: Granularity) -> AnalysisConfig {
        self.granularity = granularity;
        self
    }
}
