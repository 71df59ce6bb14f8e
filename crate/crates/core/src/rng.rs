//! Named deterministic random streams.
//!
//! All randomness in a run flows from one master seed. Independent streams
//! are derived by hashing the seed together with a label path, so adding or
//! reordering consumers never perturbs unrelated streams.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Derives an independent stream from the master seed and a label path,
/// e.g. `derive_stream(seed, &["agent", "u07", "plan"])`.
pub fn derive_stream(master_seed: u64, labels: &[&str]) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_le_bytes());
    for label in labels {
        hasher.update([0x1f]);
        hasher.update(label.as_bytes());
    }
    let seed: [u8; 32] = hasher.finalize().into();
    ChaCha12Rng::from_seed(seed)
}

/// The per-agent streams used by the engine. Planning, voting, and tie
/// rating draw from separate streams so concurrent planning cannot change
/// outcomes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgentStreams {
    pub plan: ChaCha12Rng,
    pub vote: ChaCha12Rng,
    pub tie: ChaCha12Rng,
}

impl AgentStreams {
    pub fn for_agent(master_seed: u64, user: &str) -> Self {
        AgentStreams {
            plan: derive_stream(master_seed, &["agent", user, "plan"]),
            vote: derive_stream(master_seed, &["agent", user, "vote"]),
            tie: derive_stream(master_seed, &["agent", user, "tie"]),
        }
    }
}
