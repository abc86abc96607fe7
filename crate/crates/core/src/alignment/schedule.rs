use serde::{Deserialize, Serialize};

use crate::channel::USERS;

/// A precoder block: user and 0-based block index within that user's `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSlot {
    pub user: usize,
    pub block_index: usize,
}

/// Index bookkeeping of the chain scheme for depth `l`.
///
/// Group `g` visits users `(g + k) mod 3` for `k = 0..=l`. Its `l + 2`
/// constraints are, in order:
///
/// * `k = 0`: block 0 lies in the nullspace of receiver `(g + 1) mod 3`;
/// * `1 <= k <= l`: blocks `k` and `k - 1` align at receiver `(g + k + 1) mod 3`;
/// * `k = l + 1`: block `l` lies in the nullspace of receiver `(g + l + 2) mod 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSchedule {
    pub l: usize,
    pub groups: [Vec<BlockSlot>; USERS],
    pub constraint_receivers: [Vec<usize>; USERS],
}

impl ChainSchedule {
    /// Width of the stacked unknown in blocks.
    pub fn blocks_per_group(&self) -> usize {
        self.l + 1
    }
}

pub fn chain_block_schedule(l: usize) -> ChainSchedule {
    let mut seen = [0usize; USERS];
    let groups = std::array::from_fn(|g| {
        (0..=l)
            .map(|k| {
                let user = (g + k) % USERS;
                let block_index = seen[user];
                seen[user] += 1;
                BlockSlot { user, block_index }
            })
            .collect()
    });
    let constraint_receivers = std::array::from_fn(|g| {
        (0..l + 2)
            .map(|k| {
                if k == l + 1 {
                    (g + l + 2) % USERS
                } else {
                    (g + k + 1) % USERS
                }
            })
            .collect()
    });
    ChainSchedule {
        l,
        groups,
        constraint_receivers,
    }
}
