//! Exact DoF bookkeeping: upperbounds, the reference baseline, per-L chain
//! counts, the greedy mixed-L planner and the sweep tables built from them.
//!
//! No floating point is used for any reported value; everything is a
//! [`Rational`].

mod rational;
mod sweep;

pub use rational::Rational;
pub use sweep::{
    fig1_ratio_grid, sweep_fig1, sweep_fig2, write_fig1_csv, write_fig2_csv, Fig1Row, Fig2Row,
};

use serde::{Deserialize, Serialize};

use crate::alignment::{ChainInstance, Regime, SchemePlan};
use crate::error::{Error, Result};

/// Default search bound on the symbol-extension factor.
pub const DEFAULT_T_MAX: usize = 24;

fn r(n: usize) -> Rational {
    Rational::from(n)
}

/// General upperbound with rational antenna counts, used for normalized curves.
pub fn general_upperbound_ratio(m: Rational, n: Rational) -> Rational {
    let three = Rational::from_integer(3);
    let two = Rational::from_integer(2);
    [
        three * m,
        three * n,
        (two * m).max(n),
        m.max(two * n),
        Rational::new(3, 2) * m.max(n),
    ]
    .into_iter()
    .min()
    .expect("non-empty")
}

/// `min{3M, 3N, max(2M, N), max(M, 2N), 3/2 max(M, N)}`
pub fn general_upperbound(m: usize, n: usize) -> Rational {
    general_upperbound_ratio(r(m), r(n))
}

/// Linear-beamforming limit `3(M + N)/4`.
pub fn beamforming_upperbound(m: usize, n: usize) -> Rational {
    Rational::new(3 * (m + n) as i64, 4)
}

/// Reference achievable value `3MN/(M + N)` for real constant channels.
pub fn baseline_khandani(m: usize, n: usize) -> Rational {
    Rational::new(3 * (m * n) as i64, (m + n) as i64)
}

/// Per-group nullspace dimension `(l+1)M - (l+2)N` of the chain system (may be negative).
pub fn chain_nullity(m: usize, n: usize, l: usize) -> i64 {
    (l as i64 + 1) * m as i64 - (l as i64 + 2) * n as i64
}

/// Total DoF of the single-L chain scheme on an unextended channel.
pub fn chain_dof(m: usize, n: usize, l: usize) -> Rational {
    chain_dof_ratio(r(m), r(n), l)
}

/// Chain DoF for rational antenna counts; with `n = 1` this is the
/// normalized `d/N` curve.
pub fn chain_dof_ratio(m: Rational, n: Rational, l: usize) -> Rational {
    let l1 = Rational::from(l + 1);
    let l2 = Rational::from(l + 2);
    let three = Rational::from_integer(3);
    let by_nullspace = three * l1 * (l1 * m - l2 * n).pos();
    let by_dimensions = three * l1 * n / Rational::from(2 * l + 1);
    by_nullspace.min(by_dimensions)
}

fn check_chain_regime(m: usize, n: usize) -> Result<()> {
    if n == 0 || !(n < m && m < 2 * n) {
        return Err(Error::Regime(format!(
            "chain planning needs 1 < M/N < 2, got M={m}, N={n}"
        )));
    }
    Ok(())
}

/// Smallest `l` with `(l+1)M - (l+2)N >= 1`.
pub fn min_feasible_l(m: usize, n: usize) -> Result<usize> {
    check_chain_regime(m, n)?;
    // (l+1)m - (l+2)n >= 1  <=>  l >= (2n - m + 1) / (m - n)
    Ok((2 * n + 1 - m).div_ceil(m - n))
}

/// Greedy mixed-L allocation for a fixed extension factor `t`.
pub fn plan_for_extension(m: usize, n: usize, t: usize) -> Result<SchemePlan> {
    check_chain_regime(m, n)?;
    if t == 0 {
        return Err(Error::InvalidInput("extension factor must be >= 1".into()));
    }
    let mut remaining = n * t;
    let mut instances = Vec::new();
    let mut l = min_feasible_l(m, n)?;
    loop {
        let need = 2 * l + 1;
        if remaining < need {
            break;
        }
        let cap = t * chain_nullity(m, n, l).max(0) as usize;
        let dtilde = cap.min(remaining / need);
        if dtilde == 0 {
            break;
        }
        instances.push(ChainInstance { l, dtilde });
        remaining -= need * dtilde;
        l += 1;
    }
    Ok(SchemePlan::chain(t, instances))
}

/// Best greedy plan over extension factors `1..=t_max`.
///
/// Ties in per-slot DoF go to the smallest `t`; a single `t` yields a single plan.
pub fn greedy_plan(m: usize, n: usize, t_max: usize) -> Result<SchemePlan> {
    check_chain_regime(m, n)?;
    if t_max == 0 {
        return Err(Error::InvalidInput("t_max must be >= 1".into()));
    }
    let mut best: Option<SchemePlan> = None;
    for t in 1..=t_max {
        let plan = plan_for_extension(m, n, t)?;
        // t ascends, so only a strict improvement replaces the incumbent.
        let better = match &best {
            None => true,
            Some(b) => plan.per_slot_dof_total > b.per_slot_dof_total,
        };
        if better {
            best = Some(plan);
        }
    }
    Ok(best.expect("t_max >= 1"))
}

/// All bounds and the achievable value for one antenna configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub m: usize,
    pub n: usize,
    pub general_ub: Rational,
    pub beamforming_ub: Rational,
    pub baseline: Rational,
    pub achievable: Rational,
    /// `None` for `M = N`, where the value is a known reference that this
    /// crate does not synthesize.
    pub plan: Option<SchemePlan>,
    pub meets_general: bool,
    pub meets_beamforming: bool,
}

/// Regime dispatch for the achievable region.
pub fn achievable(m: usize, n: usize, t_max: usize) -> Result<BoundsReport> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("antenna counts must be >= 1".into()));
    }
    let (value, plan) = if m == n {
        (Rational::new(3 * m as i64, 2), None)
    } else if m < n {
        let rev = achievable(n, m, t_max)?;
        let plan = rev.plan.map(|mut p| {
            p.reciprocal = true;
            p
        });
        (rev.achievable, plan)
    } else if m >= 3 * n {
        let p = SchemePlan::zero_forcing(n, 1);
        (p.per_slot_dof_total, Some(p))
    } else if m >= 2 * n {
        let t = if m.is_multiple_of(3) { 1 } else { 3 };
        let p = SchemePlan::nullspace_intersection(m * t / 3, t);
        (p.per_slot_dof_total, Some(p))
    } else {
        let p = greedy_plan(m, n, t_max)?;
        (p.per_slot_dof_total, Some(p))
    };
    let general_ub = general_upperbound(m, n);
    let beamforming_ub = beamforming_upperbound(m, n);
    debug_assert!(value <= general_ub);
    Ok(BoundsReport {
        m,
        n,
        general_ub,
        beamforming_ub,
        baseline: baseline_khandani(m, n),
        achievable: value,
        plan,
        meets_general: value == general_ub,
        meets_beamforming: value == beamforming_ub,
    })
}

impl SchemePlan {
    pub(crate) fn regime_label(&self) -> &'static str {
        match self.regime {
            Regime::ZeroForcing => "zero_forcing",
            Regime::NullspaceIntersection => "nullspace_intersection",
            Regime::Chain => "chain",
            Regime::MixedChain => "mixed_chain",
        }
    }
}
