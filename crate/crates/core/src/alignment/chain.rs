//! The L-chain alignment scheme, solved two ways.
//!
//! [`solve_chain`] stacks the `l + 2` constraints of a group into one
//! homogeneous system and takes its nullspace. [`solve_chain_xi`] follows the
//! sequential construction: nullspace bases of each cross channel, chained
//! through pseudo-inverses, reduced to a single `Xi * A = 0` system.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    chain_block_schedule, mix_seed, unit_columns, BlockSpan, ChainInstance, ChainSchedule,
    PrecoderSet, Regime, SchemePlan,
};
use crate::channel::{ChannelSet, USERS};
use crate::dofcalc::chain_nullity;
use crate::error::{invalid, Error, Result};
use crate::matkit::{hcat, null_of, pseudo_inverse, rank_of, vcat, Mat, Tolerance};

fn check_wide(ch: &ChannelSet) -> Result<()> {
    if ch.m() <= ch.n() {
        return Err(Error::Regime(format!(
            "chain scheme needs M > N (got M={}, N={}); design on the reciprocal channel",
            ch.m(),
            ch.n()
        )));
    }
    Ok(())
}

/// Stacked constraint matrix `C` of one group: `C (v_0; ...; v_l) = 0` holds
/// exactly when the group's blocks satisfy all `l + 2` constraints.
pub fn build_chain_system(ch: &ChannelSet, sched: &ChainSchedule, group: usize) -> Result<Mat> {
    check_wide(ch)?;
    if group >= USERS {
        return invalid(format!("group {group} out of range"));
    }
    let (rx, tx) = (ch.rx_dim(), ch.tx_dim());
    let l = sched.l;
    let users: Vec<usize> = sched.groups[group].iter().map(|b| b.user).collect();
    let recv = &sched.constraint_receivers[group];
    let mut c = Mat::zeros((l + 2) * rx, (l + 1) * tx);
    c.view_mut((0, 0), (rx, tx))
        .copy_from(ch.h(recv[0], users[0]));
    for k in 1..=l {
        let r = recv[k];
        c.view_mut((k * rx, k * tx), (rx, tx))
            .copy_from(ch.h(r, users[k]));
        c.view_mut((k * rx, (k - 1) * tx), (rx, tx))
            .copy_from(&(-ch.h(r, users[k - 1])));
    }
    c.view_mut(((l + 1) * rx, l * tx), (rx, tx))
        .copy_from(ch.h(recv[l + 1], users[l]));
    Ok(c)
}

/// `count` orthonormal directions from `basis`: the basis itself when all
/// columns are requested, otherwise a seeded Gaussian combination.
fn select_columns(basis: &Mat, count: usize, seed: u64, ch: &ChannelSet) -> Mat {
    if count >= basis.ncols() {
        return basis.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix = ch.field_mode().gaussian(&mut rng, basis.ncols(), count);
    (basis * mix).qr().q()
}

fn check_instance(ch: &ChannelSet, l: usize, dtilde: usize) -> Result<()> {
    check_wide(ch)?;
    if dtilde == 0 {
        return invalid("dtilde must be >= 1");
    }
    let cap = ch.t() as i64 * chain_nullity(ch.m(), ch.n(), l);
    if dtilde as i64 > cap {
        return Err(Error::Infeasible(format!(
            "dtilde={dtilde} exceeds the chain nullspace dimension {} for l={l}",
            cap.max(0)
        )));
    }
    Ok(())
}

fn check_residual(c: &Mat, x: &Mat, tol: &Tolerance) -> Result<()> {
    let res = (c * x).norm();
    let bound = tol.leakage_tol * c.norm() * x.norm();
    if res > bound {
        return Err(Error::NotCertifiable(format!(
            "chain constraint residual {res:.3e} above {bound:.3e}"
        )));
    }
    Ok(())
}

fn split_blocks(x: &Mat, blocks: usize, height: usize) -> Vec<Mat> {
    (0..blocks)
        .map(|k| x.rows(k * height, height).into_owned())
        .collect()
}

fn stacked_group(
    ch: &ChannelSet,
    sched: &ChainSchedule,
    group: usize,
    dtilde: usize,
    instance: usize,
    tol: &Tolerance,
) -> Result<Vec<Mat>> {
    let c = build_chain_system(ch, sched, group)?;
    let null = null_of(&c, tol);
    if null.ncols() < dtilde {
        return Err(Error::Infeasible(format!(
            "group {group}: numeric nullspace dimension {} < dtilde={dtilde}",
            null.ncols()
        )));
    }
    let x = select_columns(&null, dtilde, mix_seed(ch.seed(), instance, group), ch);
    check_residual(&c, &x, tol)?;
    Ok(split_blocks(&x, sched.l + 1, ch.tx_dim()))
}

/// Nullspace basis of a cross channel; must have exactly `(M - N) t` columns.
fn cross_null(ch: &ChannelSet, rx: usize, tx: usize, tol: &Tolerance) -> Result<Mat> {
    let b = null_of(ch.h(rx, tx), tol);
    if b.ncols() != ch.tx_dim() - ch.rx_dim() {
        return Err(Error::NotCertifiable(format!(
            "channel ({rx},{tx}) is rank deficient"
        )));
    }
    Ok(b)
}

/// Pieces of the sequential construction for one group.
struct XiChain {
    /// Free directions of each block: nullspace bases of the constraining channels.
    xi: Vec<Mat>,
    /// `transfer[k] = H_{r,u_k}^+ H_{r,u_(k-1)}`; entry 0 is unused.
    transfer: Vec<Mat>,
    xi_last: Mat,
    /// `[-xi_last, T_l..T_1 xi_0, T_l..T_2 xi_1, ..., xi_l]`
    xi_tilde: Mat,
}

fn xi_chain(
    ch: &ChannelSet,
    sched: &ChainSchedule,
    group: usize,
    tol: &Tolerance,
) -> Result<XiChain> {
    check_wide(ch)?;
    if group >= USERS {
        return invalid(format!("group {group} out of range"));
    }
    let l = sched.l;
    let users: Vec<usize> = sched.groups[group].iter().map(|b| b.user).collect();
    let recv = &sched.constraint_receivers[group];

    let mut xi = vec![cross_null(ch, recv[0], users[0], tol)?];
    let mut transfer = vec![Mat::zeros(0, 0)];
    for k in 1..=l {
        let h_new = ch.h(recv[k], users[k]);
        if rank_of(h_new, tol) < ch.rx_dim() {
            return Err(Error::NotCertifiable(format!(
                "channel ({},{}) has no right inverse",
                recv[k], users[k]
            )));
        }
        xi.push(cross_null(ch, recv[k], users[k], tol)?);
        transfer.push(pseudo_inverse(h_new, tol)? * ch.h(recv[k], users[k - 1]));
    }
    let xi_last = cross_null(ch, recv[l + 1], users[l], tol)?;

    let mut parts = vec![-&xi_last];
    for k in 0..=l {
        let mut p = xi[k].clone();
        for t in &transfer[k + 1..] {
            p = t * p;
        }
        parts.push(p);
    }
    let xi_tilde = hcat(ch.tx_dim(), &parts);
    Ok(XiChain {
        xi,
        transfer,
        xi_last,
        xi_tilde,
    })
}

/// The `M t x (l+2)(M-N) t` matrix whose nullspace parameterizes one group's
/// solutions in the sequential construction.
pub fn xi_tilde(ch: &ChannelSet, l: usize, group: usize, tol: &Tolerance) -> Result<Mat> {
    Ok(xi_chain(ch, &chain_block_schedule(l), group, tol)?.xi_tilde)
}

fn xi_group(
    ch: &ChannelSet,
    sched: &ChainSchedule,
    group: usize,
    dtilde: usize,
    instance: usize,
    tol: &Tolerance,
) -> Result<Vec<Mat>> {
    let l = sched.l;
    let w = ch.tx_dim() - ch.rx_dim();
    let chain = xi_chain(ch, sched, group, tol)?;
    let null = null_of(&chain.xi_tilde, tol);
    if null.ncols() < dtilde {
        return Err(Error::Infeasible(format!(
            "group {group}: Xi nullspace dimension {} < dtilde={dtilde}",
            null.ncols()
        )));
    }
    let coeffs = select_columns(&null, dtilde, mix_seed(ch.seed(), instance, group), ch);
    // a[0] pairs with xi_last, a[k + 1] with xi[k].
    let a = split_blocks(&coeffs, l + 2, w);

    let mut blocks = vec![&chain.xi[0] * &a[1]];
    for k in 1..=l {
        let next = &chain.transfer[k] * &blocks[k - 1] + &chain.xi[k] * &a[k + 1];
        blocks.push(next);
    }
    let closing = (&blocks[l] - &chain.xi_last * &a[0]).norm();
    if closing > tol.leakage_tol * blocks[l].norm().max(1.0) {
        return Err(Error::NotCertifiable(format!(
            "group {group}: closing nullspace constraint off by {closing:.3e}"
        )));
    }
    let c = build_chain_system(ch, sched, group)?;
    check_residual(&c, &vcat(dtilde, &blocks), tol)?;
    Ok(blocks)
}

fn assemble(
    ch: &ChannelSet,
    sched: &ChainSchedule,
    per_group: Vec<Vec<Mat>>,
    instance: usize,
) -> Result<PrecoderSet> {
    let mut owned: [Vec<(usize, usize, Mat)>; USERS] = Default::default();
    for (g, blocks) in per_group.into_iter().enumerate() {
        for (slot, block) in sched.groups[g].iter().zip(blocks) {
            owned[slot.user].push((slot.block_index, g, unit_columns(&block)?));
        }
    }
    let mut out = PrecoderSet::empty(ch.m(), ch.n(), ch.t());
    for (user, mut blocks) in owned.into_iter().enumerate() {
        blocks.sort_by_key(|b| b.0);
        let mut at = 0;
        for (block_index, group, mat) in &blocks {
            out.block_map.push(BlockSpan {
                user,
                col_start: at,
                width: mat.ncols(),
                instance,
                group: Some(*group),
                block_index: Some(*block_index),
                l: Some(sched.l),
            });
            at += mat.ncols();
        }
        let mats: Vec<Mat> = blocks.into_iter().map(|b| b.2).collect();
        out.v[user] = hcat(ch.tx_dim(), &mats);
    }
    Ok(out)
}

pub(crate) fn solve_chain_instance(
    ch: &ChannelSet,
    l: usize,
    dtilde: usize,
    instance: usize,
    tol: &Tolerance,
) -> Result<PrecoderSet> {
    check_instance(ch, l, dtilde)?;
    let sched = chain_block_schedule(l);
    let per_group = (0..USERS)
        .map(|g| stacked_group(ch, &sched, g, dtilde, instance, tol))
        .collect::<Result<Vec<_>>>()?;
    assemble(ch, &sched, per_group, instance)
}

/// Chain scheme of depth `l` with `dtilde` streams per block, via one
/// nullspace computation per group. Each user ends up with `(l+1) dtilde`
/// streams.
pub fn solve_chain(
    ch: &ChannelSet,
    l: usize,
    dtilde: usize,
    tol: &Tolerance,
) -> Result<PrecoderSet> {
    let mut out = solve_chain_instance(ch, l, dtilde, 0, tol)?;
    out.plan = Some(SchemePlan::chain(ch.t(), vec![ChainInstance { l, dtilde }]));
    Ok(out)
}

/// Same scheme through the nullspace/pseudo-inverse chain. When `dtilde`
/// equals the full solution dimension, block spans coincide with
/// [`solve_chain`].
pub fn solve_chain_xi(
    ch: &ChannelSet,
    l: usize,
    dtilde: usize,
    tol: &Tolerance,
) -> Result<PrecoderSet> {
    check_instance(ch, l, dtilde)?;
    let sched = chain_block_schedule(l);
    let per_group = (0..USERS)
        .map(|g| xi_group(ch, &sched, g, dtilde, 0, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut out = assemble(ch, &sched, per_group, 0)?;
    out.plan = Some(SchemePlan::chain(ch.t(), vec![ChainInstance { l, dtilde }]));
    Ok(out)
}

/// Runs every chain instance of `plan` on the same channel and concatenates
/// the per-user columns.
pub fn synth_mixed(ch: &ChannelSet, plan: &SchemePlan, tol: &Tolerance) -> Result<PrecoderSet> {
    if !matches!(plan.regime, Regime::Chain | Regime::MixedChain) {
        return invalid(format!("plan regime {:?} is not a chain plan", plan.regime));
    }
    if plan.t != ch.t() {
        return invalid(format!(
            "plan expects extension t={}, channel has t={}",
            plan.t,
            ch.t()
        ));
    }
    plan.validate(ch.m(), ch.n())?;
    let mut out = PrecoderSet::empty(ch.m(), ch.n(), ch.t());
    for (idx, inst) in plan.instances.iter().enumerate() {
        let part = solve_chain_instance(ch, inst.l, inst.dtilde, idx, tol)?;
        out.append(part, 0);
    }
    out.plan = Some(plan.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certify;
    use crate::channel::FieldMode;
    use crate::matkit::max_principal_angle;
    use proptest::prelude::*;

    fn chan(m: usize, n: usize, seed: u64) -> ChannelSet {
        ChannelSet::generate(m, n, seed, FieldMode::Complex).unwrap()
    }

    #[test]
    fn stacked_system_shapes() {
        let tol = Tolerance::default();
        let c = build_chain_system(&chan(5, 3, 1), &chain_block_schedule(1), 0).unwrap();
        assert_eq!(c.shape(), (9, 10));
        assert_eq!(null_of(&c, &tol).ncols(), 1);
        let c = build_chain_system(&chan(7, 5, 1), &chain_block_schedule(2), 2).unwrap();
        assert_eq!(c.shape(), (20, 21));
        assert_eq!(null_of(&c, &tol).ncols(), 1);
    }

    #[test]
    fn stacked_system_encodes_the_constraints() {
        // Direct evaluation of each constraint on a nullspace vector.
        let tol = Tolerance::default();
        let ch = chan(8, 5, 3);
        let sched = chain_block_schedule(2);
        for g in 0..3 {
            let c = build_chain_system(&ch, &sched, g).unwrap();
            let x = null_of(&c, &tol);
            let v = split_blocks(&x, 3, 8);
            let u: Vec<usize> = sched.groups[g].iter().map(|b| b.user).collect();
            let r = &sched.constraint_receivers[g];
            assert!((ch.h(r[0], u[0]) * &v[0]).norm() < 1e-12);
            for k in 1..=2 {
                let lhs = ch.h(r[k], u[k]) * &v[k];
                let rhs = ch.h(r[k], u[k - 1]) * &v[k - 1];
                assert!((lhs - rhs).norm() < 1e-12);
            }
            assert!((ch.h(r[3], u[2]) * &v[2]).norm() < 1e-12);
        }
    }

    #[test]
    fn square_or_tall_channels_are_rejected() {
        let tol = Tolerance::default();
        assert!(matches!(
            solve_chain(&chan(3, 5, 1), 1, 1, &tol),
            Err(Error::Regime(_))
        ));
        assert!(matches!(
            solve_chain(&chan(4, 4, 1), 1, 1, &tol),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn oversized_dtilde_is_infeasible() {
        let tol = Tolerance::default();
        assert!(matches!(
            solve_chain(&chan(5, 3, 1), 1, 2, &tol),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            solve_chain(&chan(5, 3, 1), 1, 0, &tol),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn xi_has_expected_shape() {
        let tol = Tolerance::default();
        let xi = xi_tilde(&chan(5, 3, 2), 1, 0, &tol).unwrap();
        assert_eq!(xi.shape(), (5, 6));
        assert_eq!(null_of(&xi, &tol).ncols(), 1);
    }

    #[test]
    fn both_constructions_span_the_same_blocks() {
        let tol = Tolerance::default();
        for (m, n, l) in [(5, 3, 1), (8, 5, 1), (7, 5, 2), (11, 9, 4)] {
            let ch = chan(m, n, 11);
            let a = solve_chain(&ch, l, 1, &tol).unwrap();
            let b = solve_chain_xi(&ch, l, 1, &tol).unwrap();
            for g in 0..3 {
                for k in 0..=l {
                    let slot = chain_block_schedule(l).groups[g][k];
                    let pa = a.block(0, g, slot.block_index).unwrap();
                    let pb = b.block(0, g, slot.block_index).unwrap();
                    assert!(max_principal_angle(&pa, &pb, &tol).unwrap() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn block_map_indexes_every_block() {
        let tol = Tolerance::default();
        let v = solve_chain(&chan(7, 5, 4), 2, 1, &tol).unwrap();
        v.validate().unwrap();
        assert_eq!(v.block_map.len(), 9);
        for u in 0..3 {
            let mut idx: Vec<usize> = v
                .block_map
                .iter()
                .filter(|b| b.user == u)
                .map(|b| b.block_index.unwrap())
                .collect();
            idx.sort();
            assert_eq!(idx, vec![0, 1, 2]);
        }
    }

    #[test]
    fn worked_mixed_plan_certifies() {
        let tol = Tolerance::default();
        let plan = SchemePlan::chain(
            1,
            vec![
                ChainInstance { l: 1, dtilde: 3 },
                ChainInstance { l: 2, dtilde: 2 },
            ],
        );
        let ch = chan(30, 19, 5);
        let v = synth_mixed(&ch, &plan, &tol).unwrap();
        assert_eq!(v.streams(0), 12);
        assert!(certify(&ch, &v, &tol).unwrap().pass);
    }

    #[test]
    fn extended_mixed_plan_certifies() {
        let tol = Tolerance::default();
        let plan = SchemePlan::chain(
            5,
            vec![
                ChainInstance { l: 1, dtilde: 5 },
                ChainInstance { l: 2, dtilde: 2 },
            ],
        );
        let ch = chan(8, 5, 2).extend(5).unwrap();
        let v = synth_mixed(&ch, &plan, &tol).unwrap();
        assert_eq!(v.streams(1), 16);
        assert!(certify(&ch, &v, &tol).unwrap().pass);
    }

    #[test]
    fn plan_extension_must_match_channel() {
        let tol = Tolerance::default();
        let plan = SchemePlan::chain(5, vec![ChainInstance { l: 1, dtilde: 1 }]);
        assert!(synth_mixed(&chan(8, 5, 2), &plan, &tol).is_err());
        let zf = SchemePlan::zero_forcing(5, 1);
        assert!(synth_mixed(&chan(8, 5, 2), &zf, &tol).is_err());
    }

    #[test]
    fn empty_plan_gives_no_streams() {
        let tol = Tolerance::default();
        let v = synth_mixed(&chan(8, 5, 2), &SchemePlan::chain(1, vec![]), &tol).unwrap();
        assert_eq!(v.total_streams(), 0);
    }

    // Constant-channel extension keeps the per-slot tensor structure: with a
    // one-dimensional per-slot nullspace each group's blocks share a common
    // slot mixing, which caps the receive span. At (5,4), t=9, L=4 the cap
    // admits dtilde <= 3 but not 4.
    #[test]
    fn constant_extension_caps_depth_four_chain() {
        let tol = Tolerance::default();
        let ch = chan(5, 4, 1).extend(9).unwrap();
        assert!(
            certify(&ch, &solve_chain(&ch, 4, 3, &tol).unwrap(), &tol)
                .unwrap()
                .pass
        );
        let cert = certify(&ch, &solve_chain(&ch, 4, 4, &tol).unwrap(), &tol).unwrap();
        assert!(!cert.pass);
        // Receive span bound: min(t, 3d) + 6d with d = 4.
        let span = cert.receivers[0].signal_rank + cert.receivers[0].interference_rank;
        assert!(span <= 9 + 24);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn nullity_matches_count(seed in 0u64..1000, n in 2usize..6, dm in 1usize..5, l in 1usize..4) {
            prop_assume!(dm < n);
            let m = n + dm;
            let tol = Tolerance::default();
            let ch = chan(m, n, seed);
            let c = build_chain_system(&ch, &chain_block_schedule(l), (seed % 3) as usize).unwrap();
            let expect = chain_nullity(m, n, l).max(0) as usize;
            prop_assert_eq!(null_of(&c, &tol).ncols(), expect);
        }
    }
}
