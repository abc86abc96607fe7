//! Construction, certification and counting of linear interference-alignment
//! schemes for the 3-user `M x N` MIMO interference channel with constant
//! channel coefficients.
//!
//! The crate is split along the pipeline:
//!
//! * [`matkit`] - tolerance-aware rank, nullspace, pseudo-inverse and subspace angles.
//! * [`channel`] - channel realizations, symbol extension and reciprocity.
//! * [`alignment`] - precoder synthesis (zero forcing, nullspace intersection,
//!   L-chain alignment and mixed-L plans).
//! * [`certify`] - decoder construction, leakage, rank certificates and sum-rate slopes.
//! * [`dofcalc`] - exact rational bounds, achievability and the greedy mixed-L planner.
//! * [`cli`] - the `ia3` command-line surface.
//!
//! ```
//! use ia3::prelude::*;
//!
//! let ch = ChannelSet::generate(5, 3, 7, FieldMode::Complex).unwrap();
//! let tol = Tolerance::default();
//! let v = solve_chain(&ch, 1, 1, &tol).unwrap();
//! let cert = certify(&ch, &v, &tol).unwrap();
//! assert!(cert.pass);
//! assert_eq!(cert.per_slot_dof, Rational::from_integer(6));
//! ```

pub mod alignment;
pub mod certify;
pub mod channel;
pub mod cli;
pub mod dofcalc;
pub mod error;
pub mod matkit;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::alignment::{
        build_chain_system, chain_block_schedule, solve_chain, solve_chain_xi, synth_mixed,
        synth_nullspace_intersection, synth_zero_forcing, ChainInstance, ChainSchedule,
        PrecoderSet, Regime, SchemePlan,
    };
    pub use crate::certify::{
        build_decoders, certify, estimate_dof_slope, leakage, DecoderSet, DofCertificate, RateCurve,
    };
    pub use crate::channel::{ChannelSet, FieldMode, NoiseModel};
    pub use crate::dofcalc::{
        achievable, baseline_khandani, beamforming_upperbound, chain_dof, general_upperbound,
        greedy_plan, min_feasible_l, sweep_fig1, sweep_fig2, BoundsReport, Rational,
    };
    pub use crate::matkit::{
        max_principal_angle, nullspace_basis, pseudo_inverse, rank, Mat, Tolerance, C64,
    };
    pub use crate::{Error, Result};
}
