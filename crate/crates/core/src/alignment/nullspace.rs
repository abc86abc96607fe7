//! Schemes for `M/N >= 2`, plus the reverse-link mapping used for `M < N`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BlockSpan, PrecoderSet, SchemePlan};
use crate::certify::DecoderSet;
use crate::channel::{ChannelSet, USERS};
use crate::error::{Error, Result};
use crate::matkit::{null_of, range_basis, vcat, Mat, Tolerance};

fn whole_user_blocks(v: &[Mat; USERS]) -> Vec<BlockSpan> {
    v.iter()
        .enumerate()
        .filter(|(_, vu)| vu.ncols() > 0)
        .map(|(user, vu)| BlockSpan {
            user,
            col_start: 0,
            width: vu.ncols(),
            instance: 0,
            group: None,
            block_index: None,
            l: None,
        })
        .collect()
}

/// Each user transmits `N t` streams inside the joint nullspace of both of
/// its cross channels.
pub fn synth_zero_forcing(ch: &ChannelSet, tol: &Tolerance) -> Result<PrecoderSet> {
    if ch.m() < 3 * ch.n() {
        return Err(Error::Regime(format!(
            "zero forcing needs M >= 3N (got M={}, N={})",
            ch.m(),
            ch.n()
        )));
    }
    let d = ch.rx_dim();
    let mut out = PrecoderSet::empty(ch.m(), ch.n(), ch.t());
    for u in 0..USERS {
        let stacked = vcat(
            ch.tx_dim(),
            &[
                ch.h((u + 1) % USERS, u).clone(),
                ch.h((u + 2) % USERS, u).clone(),
            ],
        );
        let null = null_of(&stacked, tol);
        if null.ncols() < d {
            return Err(Error::Infeasible(format!(
                "user {u}: cross-channel nullspace has {} < {d} dimensions",
                null.ncols()
            )));
        }
        out.v[u] = null.columns(0, d).into_owned();
    }
    out.block_map = whole_user_blocks(&out.v);
    out.plan = Some(SchemePlan::zero_forcing(ch.n(), ch.t()));
    Ok(out)
}

/// Random decoders first, then `V_i` in the intersection of the nullspaces of
/// `U_j^H H_{j,i}` and `U_l^H H_{l,i}`.
pub fn synth_nullspace_intersection(
    ch: &ChannelSet,
    d: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<(PrecoderSet, DecoderSet)> {
    let (m, n) = (ch.m(), ch.n());
    if !(2 * n <= m && m < 3 * n) {
        return Err(Error::Regime(format!(
            "nullspace intersection needs 2 <= M/N < 3 (got M={m}, N={n})"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidInput("d must be >= 1".into()));
    }
    if d > ch.tx_dim() / 3 || d > ch.rx_dim() {
        return Err(Error::Infeasible(format!(
            "d={d} leaves only {} transmit dimensions after nulling 2d",
            ch.tx_dim().saturating_sub(2 * d)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: [Mat; USERS] = std::array::from_fn(|_| {
        let g = ch.field_mode().gaussian(&mut rng, ch.rx_dim(), d);
        g.qr().q()
    });
    let mut out = PrecoderSet::empty(m, n, ch.t());
    for i in 0..USERS {
        let (j, l) = ((i + 1) % USERS, (i + 2) % USERS);
        let stacked = vcat(
            ch.tx_dim(),
            &[u[j].adjoint() * ch.h(j, i), u[l].adjoint() * ch.h(l, i)],
        );
        let null = null_of(&stacked, tol);
        if null.ncols() < d {
            return Err(Error::Infeasible(format!(
                "user {i}: intersection has {} < {d} dimensions",
                null.ncols()
            )));
        }
        out.v[i] = null.columns(0, d).into_owned();
    }
    out.block_map = whole_user_blocks(&out.v);
    out.plan = Some(SchemePlan::nullspace_intersection(d, ch.t()));
    Ok((out, DecoderSet { u }))
}

/// Maps a design on the reciprocal channel back to the forward link:
/// forward precoders are `conj(U')`, forward decoders span `conj(V')`.
pub fn reverse_link(
    reciprocal_v: &PrecoderSet,
    reciprocal_u: &DecoderSet,
    tol: &Tolerance,
) -> (PrecoderSet, DecoderSet) {
    let (m, n, t) = (reciprocal_v.n, reciprocal_v.m, reciprocal_v.t);
    let mut v = PrecoderSet::empty(m, n, t);
    for (k, uk) in reciprocal_u.u.iter().enumerate() {
        v.v[k] = uk.map(|z| z.conj());
    }
    v.block_map = whole_user_blocks(&v.v);
    v.plan = reciprocal_v.plan.clone().map(|mut p| {
        p.reciprocal = true;
        p
    });
    let u = DecoderSet {
        u: std::array::from_fn(|k| range_basis(&reciprocal_v.v[k].map(|z| z.conj()), tol)),
    };
    (v, u)
}
