//! Precoder synthesis for every operating regime of the 3-user channel.
//!
//! | `M/N`        | scheme                                   |
//! |--------------|------------------------------------------|
//! | `>= 3`       | [`synth_zero_forcing`]                   |
//! | `[2, 3)`     | [`synth_nullspace_intersection`]         |
//! | `(1, 2)`     | [`solve_chain`] / [`synth_mixed`]        |
//!
//! `M < N` is handled on the reciprocal channel, see [`reverse_link`].

mod chain;
mod nullspace;
mod schedule;

pub use chain::{build_chain_system, solve_chain, solve_chain_xi, synth_mixed, xi_tilde};
pub use nullspace::{reverse_link, synth_nullspace_intersection, synth_zero_forcing};
pub use schedule::{chain_block_schedule, BlockSlot, ChainSchedule};

use serde::{Deserialize, Serialize};

use crate::channel::USERS;
use crate::dofcalc::{chain_nullity, Rational};
use crate::error::{invalid, Result};
use crate::matkit::{hcat, Mat, MatDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ZeroForcing,
    NullspaceIntersection,
    Chain,
    MixedChain,
}

/// One run of the chain scheme: depth `l` with `dtilde` streams per block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainInstance {
    pub l: usize,
    pub dtilde: usize,
}

/// Recipe for a scheme: regime, extension factor and stream allocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemePlan {
    pub regime: Regime,
    pub t: usize,
    pub instances: Vec<ChainInstance>,
    pub per_user_streams: usize,
    pub per_slot_dof_total: Rational,
    /// Designed on the reverse link (`M < N`).
    #[serde(default)]
    pub reciprocal: bool,
}

impl SchemePlan {
    pub fn chain(t: usize, instances: Vec<ChainInstance>) -> Self {
        let per_user: usize = instances.iter().map(|i| (i.l + 1) * i.dtilde).sum();
        SchemePlan {
            regime: if instances.len() > 1 {
                Regime::MixedChain
            } else {
                Regime::Chain
            },
            t,
            instances,
            per_user_streams: per_user,
            per_slot_dof_total: Rational::new(3 * per_user as i64, t as i64),
            reciprocal: false,
        }
    }

    /// `n` is the per-slot receive dimension; each user sends `n t` streams.
    pub fn zero_forcing(n: usize, t: usize) -> Self {
        SchemePlan {
            regime: Regime::ZeroForcing,
            t,
            instances: Vec::new(),
            per_user_streams: n * t,
            per_slot_dof_total: Rational::from_integer(3 * n as i64),
            reciprocal: false,
        }
    }

    pub fn nullspace_intersection(d: usize, t: usize) -> Self {
        SchemePlan {
            regime: Regime::NullspaceIntersection,
            t,
            instances: Vec::new(),
            per_user_streams: d,
            per_slot_dof_total: Rational::new(3 * d as i64, t as i64),
            reciprocal: false,
        }
    }

    pub fn per_user_per_slot(&self) -> Rational {
        Rational::new(self.per_user_streams as i64, self.t as i64)
    }

    /// Checks the chain budget invariants against per-slot antenna counts.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.t == 0 {
            return invalid("plan extension factor must be >= 1");
        }
        let mut used = 0;
        for inst in &self.instances {
            let cap = self.t as i64 * chain_nullity(m, n, inst.l).max(0);
            if inst.dtilde as i64 > cap {
                return invalid(format!(
                    "instance l={} asks for {} streams per block, cap is {cap}",
                    inst.l, inst.dtilde
                ));
            }
            used += (2 * inst.l + 1) * inst.dtilde;
        }
        if used > n * self.t {
            return invalid(format!(
                "plan consumes {used} receive dimensions, only {} available",
                n * self.t
            ));
        }
        Ok(())
    }
}

/// Provenance of a contiguous column range of one user's precoder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub user: usize,
    pub col_start: usize,
    pub width: usize,
    pub instance: usize,
    pub group: Option<usize>,
    pub block_index: Option<usize>,
    pub l: Option<usize>,
}

/// Per-user transmit matrices with block bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecoderSet {
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub v: [Mat; USERS],
    pub block_map: Vec<BlockSpan>,
    pub plan: Option<SchemePlan>,
}

impl PrecoderSet {
    pub fn empty(m: usize, n: usize, t: usize) -> Self {
        PrecoderSet {
            m,
            n,
            t,
            v: std::array::from_fn(|_| Mat::zeros(m * t, 0)),
            block_map: Vec::new(),
            plan: None,
        }
    }

    pub fn streams(&self, user: usize) -> usize {
        self.v[user].ncols()
    }

    pub fn total_streams(&self) -> usize {
        (0..USERS).map(|u| self.streams(u)).sum()
    }

    /// Columns of one block, looked up through the block map.
    pub fn block(&self, instance: usize, group: usize, block_index: usize) -> Option<Mat> {
        self.block_map
            .iter()
            .find(|b| {
                b.instance == instance
                    && b.group == Some(group)
                    && b.block_index == Some(block_index)
            })
            .map(|b| self.v[b.user].columns(b.col_start, b.width).into_owned())
    }

    /// Appends another set's columns user by user, renumbering its instances.
    pub fn append(&mut self, other: PrecoderSet, instance_offset: usize) {
        let starts: [usize; USERS] = std::array::from_fn(|u| self.v[u].ncols());
        for (u, vu) in other.v.into_iter().enumerate() {
            let rows = self.v[u].nrows();
            self.v[u] = hcat(
                rows,
                &[std::mem::replace(&mut self.v[u], Mat::zeros(0, 0)), vu],
            );
        }
        self.block_map
            .extend(other.block_map.into_iter().map(|mut b| {
                b.col_start += starts[b.user];
                b.instance += instance_offset;
                b
            }));
    }

    /// Unit-norm columns, block map partitions every column.
    pub fn validate(&self) -> Result<()> {
        for (u, vu) in self.v.iter().enumerate() {
            if vu.nrows() != self.m * self.t {
                return invalid(format!("user {u} precoder has {} rows", vu.nrows()));
            }
            for (c, col) in vu.column_iter().enumerate() {
                if (col.norm() - 1.0).abs() > 1e-9 {
                    return invalid(format!("user {u} column {c} is not unit norm"));
                }
            }
            let mut spans: Vec<&BlockSpan> =
                self.block_map.iter().filter(|b| b.user == u).collect();
            spans.sort_by_key(|b| b.col_start);
            let mut at = 0;
            for b in spans {
                if b.col_start != at {
                    return invalid(format!(
                        "block map of user {u} has a gap or overlap at {at}"
                    ));
                }
                at += b.width;
            }
            if at != vu.ncols() {
                return invalid(format!(
                    "block map of user {u} covers {at} of {} columns",
                    vu.ncols()
                ));
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> PrecoderDoc {
        PrecoderDoc {
            m: self.m,
            n: self.n,
            t: self.t,
            v: self.v.iter().map(MatDoc::from_mat).collect(),
            block_map: self.block_map.clone(),
            plan: self.plan.clone(),
        }
    }

    pub fn from_doc(doc: &PrecoderDoc) -> Result<Self> {
        if doc.v.len() != USERS {
            return invalid("expected three precoder matrices");
        }
        let mats = doc
            .v
            .iter()
            .map(MatDoc::to_mat)
            .collect::<Result<Vec<_>>>()?;
        let mut it = mats.into_iter();
        let out = PrecoderSet {
            m: doc.m,
            n: doc.n,
            t: doc.t,
            v: std::array::from_fn(|_| it.next().expect("3 matrices")),
            block_map: doc.block_map.clone(),
            plan: doc.plan.clone(),
        };
        out.validate()?;
        Ok(out)
    }
}

/// JSON form of a [`PrecoderSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecoderDoc {
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub v: Vec<MatDoc>,
    pub block_map: Vec<BlockSpan>,
    pub plan: Option<SchemePlan>,
}

/// Normalizes every column; fails on a (numerically) zero column.
pub(crate) fn unit_columns(a: &Mat) -> Result<Mat> {
    let mut out = a.clone();
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm.is_nan() || norm <= 1e-12 {
            return Err(crate::Error::Infeasible(
                "a precoder block collapsed to zero".into(),
            ));
        }
        col.unscale_mut(norm);
    }
    Ok(out)
}

/// Deterministic per-(seed, instance, group) stream for basis mixing.
pub(crate) fn mix_seed(seed: u64, instance: usize, group: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed
        ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(1 + instance as u64)
        ^ 0xBF58_476D_1CE4_E5B9u64.wrapping_mul(1 + group as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
