use std::io::Read;

use super::FcmState;
use crate::{Error, Result};

/// Column that, when present in a transitions CSV, splits rows into
/// independent episodes.
pub const EPISODE_COLUMN: &str = "episode";

/// Observed concept states. Consecutive states within an episode form the
/// transition pairs used as GA fitness data.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionData {
    concepts: Vec<String>,
    episodes: Vec<Vec<FcmState>>,
}

impl TransitionData {
    /// A single contiguous sequence.
    pub fn new(concepts: Vec<String>, states: Vec<FcmState>) -> Result<Self> {
        Self::from_episodes(concepts, vec![states])
    }

    pub fn from_episodes(concepts: Vec<String>, episodes: Vec<Vec<FcmState>>) -> Result<Self> {
        let n = concepts.len();
        for s in episodes.iter().flatten() {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.len(),
                });
            }
        }
        let data = Self { concepts, episodes };
        if data.pair_count() == 0 {
            return Err(Error::InsufficientData(
                "need at least one pair of consecutive states".into(),
            ));
        }
        Ok(data)
    }

    pub fn concepts(&self) -> &[String] {
        &self.concepts
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&FcmState, &FcmState)> {
        self.episodes
            .iter()
            .flat_map(|ep| ep.windows(2).map(|w| (&w[0], &w[1])))
    }

    pub fn pair_count(&self) -> usize {
        self.episodes.iter().map(|e| e.len().saturating_sub(1)).sum()
    }

    /// One state per row, one concept per column. Without `concepts` every
    /// column except `episode` is used, in header order. An `episode`
    /// column starts a new sequence whenever its value changes.
    pub fn from_csv(reader: impl Read, concepts: Option<&[String]>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let episode_col = headers.iter().position(|h| h == EPISODE_COLUMN);
        let names: Vec<String> = match concepts {
            Some(c) => c.to_vec(),
            None => headers.iter().filter(|h| *h != EPISODE_COLUMN).cloned().collect(),
        };
        let cols = names
            .iter()
            .map(|c| {
                headers
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| Error::InvalidData(format!("missing column `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut episodes: Vec<Vec<FcmState>> = Vec::new();
        let mut last_tag: Option<String> = None;
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = i + 1;
            let tag = episode_col.map(|c| rec.get(c).unwrap_or("").trim().to_string());
            if episodes.is_empty() || tag != last_tag {
                episodes.push(Vec::new());
                last_tag = tag;
            }
            let vals = cols
                .iter()
                .zip(&names)
                .map(|(&c, name)| {
                    let raw = rec.get(c).unwrap_or("");
                    raw.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidData(format!("row {row}, column `{name}`: `{raw}` is not a number")))
                })
                .collect::<Result<Vec<_>>>()?;
            let state = FcmState::new(vals).map_err(|e| Error::InvalidData(format!("row {row}: {e}")))?;
            episodes.last_mut().expect("pushed above").push(state);
        }
        Self::from_episodes(names, episodes)
    }
}
