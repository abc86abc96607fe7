//! Decoders, leakage and rank-based DoF certificates.
//!
//! A certificate is a pure rank statement: at every receiver the desired
//! signal must keep full column rank after projecting out the interference
//! span, and the interference must leave room for it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::alignment::PrecoderSet;
use crate::channel::{ChannelSet, NoiseModel, USERS};
use crate::dofcalc::Rational;
use crate::error::{invalid, Error, Result};
use crate::matkit::{
    complement_scaled, hcat, rank_of, rank_scaled, spectral_norm, Mat, MatDoc, Tolerance, C64,
};

/// Per-receiver post-processing matrices with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderSet {
    pub u: [Mat; USERS],
}

impl DecoderSet {
    pub fn to_docs(&self) -> Vec<MatDoc> {
        self.u.iter().map(MatDoc::from_mat).collect()
    }

    pub fn from_docs(docs: &[MatDoc]) -> Result<Self> {
        if docs.len() != USERS {
            return invalid("expected three decoder matrices");
        }
        let mats = docs
            .iter()
            .map(MatDoc::to_mat)
            .collect::<Result<Vec<_>>>()?;
        let mut it = mats.into_iter();
        Ok(DecoderSet {
            u: std::array::from_fn(|_| it.next().expect("3 matrices")),
        })
    }
}

fn check_shapes(ch: &ChannelSet, v: &PrecoderSet) -> Result<()> {
    if (v.m, v.n, v.t) != (ch.m(), ch.n(), ch.t()) {
        return invalid(format!(
            "precoders are for (M,N,t)=({},{},{}), channel is ({},{},{})",
            v.m,
            v.n,
            v.t,
            ch.m(),
            ch.n(),
            ch.t()
        ));
    }
    for (u, vu) in v.v.iter().enumerate() {
        if vu.nrows() != ch.tx_dim() {
            return invalid(format!(
                "precoder {u} has {} rows, expected {}",
                vu.nrows(),
                ch.tx_dim()
            ));
        }
    }
    Ok(())
}

/// `G_i = [H_{i,j} V_j]` over the two interfering transmitters.
pub fn interference_matrix(ch: &ChannelSet, v: &PrecoderSet, rx: usize) -> Mat {
    let parts: Vec<Mat> = (0..USERS)
        .filter(|&j| j != rx)
        .map(|j| ch.h(rx, j) * &v.v[j])
        .collect();
    hcat(ch.rx_dim(), &parts)
}

/// Operator scale of the links into `rx` from `txs`, the reference for rank
/// decisions on products `H_ij V_j`.
fn link_scale(
    ch: &ChannelSet,
    v: &PrecoderSet,
    rx: usize,
    txs: impl Iterator<Item = usize>,
) -> f64 {
    txs.filter(|&j| v.streams(j) > 0)
        .map(|j| spectral_norm(ch.h(rx, j)) * spectral_norm(&v.v[j]))
        .fold(0.0, f64::max)
}

/// Interference complement at `rx` and the projected direct channel.
fn project_out(ch: &ChannelSet, v: &PrecoderSet, rx: usize, tol: &Tolerance) -> (Mat, usize, Mat) {
    let g = interference_matrix(ch, v, rx);
    let scale = link_scale(ch, v, rx, (0..USERS).filter(|&j| j != rx));
    let q = complement_scaled(&g, tol, scale);
    let rank = rank_scaled(&g, tol, scale);
    let effective = q.adjoint() * ch.h(rx, rx) * &v.v[rx];
    (q, rank, effective)
}

fn signal_rank(
    ch: &ChannelSet,
    v: &PrecoderSet,
    rx: usize,
    effective: &Mat,
    tol: &Tolerance,
) -> usize {
    rank_scaled(effective, tol, link_scale(ch, v, rx, std::iter::once(rx)))
}

/// Top-`d` left singular directions of `a`.
fn dominant_left(a: &Mat, d: usize) -> Mat {
    if d == 0 || a.ncols() == 0 {
        return Mat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| {
        svd.singular_values[y]
            .total_cmp(&svd.singular_values[x])
            .then(x.cmp(&y))
    });
    u.select_columns(idx.iter().take(d))
}

/// Zero-forcing decoders: project onto the complement of the interference
/// span, then keep the `d_i` strongest directions of the projected signal.
pub fn build_decoders(ch: &ChannelSet, v: &PrecoderSet, tol: &Tolerance) -> Result<DecoderSet> {
    check_shapes(ch, v)?;
    let mut u: [Mat; USERS] = std::array::from_fn(|_| Mat::zeros(ch.rx_dim(), 0));
    for (i, ui) in u.iter_mut().enumerate() {
        let d = v.streams(i);
        let (q, _, effective) = project_out(ch, v, i, tol);
        if q.ncols() < d {
            return Err(Error::NotCertifiable(format!(
                "receiver {i}: {} interference-free dimensions for {d} streams",
                q.ncols()
            )));
        }
        if signal_rank(ch, v, i, &effective, tol) < d {
            return Err(Error::NotCertifiable(format!(
                "receiver {i}: projected direct channel is rank deficient"
            )));
        }
        *ui = &q * dominant_left(&effective, d);
    }
    Ok(DecoderSet { u })
}

/// Matched-filter decoders that ignore interference; used to report leakage
/// for schemes that cannot be zero-forced.
pub fn matched_decoders(ch: &ChannelSet, v: &PrecoderSet) -> Result<DecoderSet> {
    check_shapes(ch, v)?;
    Ok(DecoderSet {
        u: std::array::from_fn(|i| dominant_left(&(ch.h(i, i) * &v.v[i]), v.streams(i))),
    })
}

/// Relative leakage `||U_i^H H_ij V_j||_F / (||H_ij||_F ||V_j||_F)`.
///
/// Off-diagonal entries measure interference; the diagonal reports the same
/// ratio for the desired link. Transmitters without streams contribute 0.
pub fn leakage(ch: &ChannelSet, v: &PrecoderSet, u: &DecoderSet) -> Result<[[f64; USERS]; USERS]> {
    check_shapes(ch, v)?;
    let mut out = [[0.0; USERS]; USERS];
    for (i, row) in out.iter_mut().enumerate() {
        if u.u[i].nrows() != ch.rx_dim() {
            return invalid(format!("decoder {i} has {} rows", u.u[i].nrows()));
        }
        for (j, cell) in row.iter_mut().enumerate() {
            if v.v[j].ncols() == 0 || u.u[i].ncols() == 0 {
                continue;
            }
            let vn = v.v[j].norm();
            let hn = ch.h(i, j).norm();
            if vn == 0.0 || hn == 0.0 {
                return invalid(format!("zero precoder or channel on link ({i},{j})"));
            }
            *cell = (u.u[i].adjoint() * ch.h(i, j) * &v.v[j]).norm() / (hn * vn);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderOrigin {
    ZeroForcing,
    MatchedFilter,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReceiverReport {
    pub receiver: usize,
    pub streams: usize,
    pub signal_rank: usize,
    pub interference_rank: usize,
    pub max_leakage: f64,
    pub pass: bool,
}

/// Rank and leakage evidence for a precoder set on a channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DofCertificate {
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub seed: u64,
    pub receivers: Vec<ReceiverReport>,
    pub streams_per_user: [usize; USERS],
    pub total_streams: usize,
    pub per_slot_dof: Rational,
    pub max_leakage: f64,
    pub decoders: DecoderOrigin,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl DofCertificate {
    /// Fixed-order human-readable table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "M={} N={} t={} seed={} decoders={:?}",
            self.m, self.n, self.t, self.seed, self.decoders
        );
        let _ = writeln!(
            s,
            "{:>8} {:>8} {:>12} {:>12} {:>12}  verdict",
            "receiver", "streams", "signal_rank", "interf_rank", "leakage"
        );
        for r in &self.receivers {
            let _ = writeln!(
                s,
                "{:>8} {:>8} {:>12} {:>12} {:>12.3e}  {}",
                r.receiver + 1,
                r.streams,
                r.signal_rank,
                r.interference_rank,
                r.max_leakage,
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            s,
            "total streams {} -> {} DoF per slot: {}",
            self.total_streams,
            self.per_slot_dof,
            if self.pass { "PASS" } else { "FAIL" }
        );
        s
    }
}

/// Certifies `v` on `ch`. Failures are recorded in the certificate; only
/// shape mismatches are errors.
pub fn certify(ch: &ChannelSet, v: &PrecoderSet, tol: &Tolerance) -> Result<DofCertificate> {
    check_shapes(ch, v)?;
    let (decoders, origin) = match build_decoders(ch, v, tol) {
        Ok(u) => (u, DecoderOrigin::ZeroForcing),
        Err(Error::NotCertifiable(_)) => (matched_decoders(ch, v)?, DecoderOrigin::MatchedFilter),
        Err(e) => return Err(e),
    };
    let leak = leakage(ch, v, &decoders)?;
    let nt = ch.rx_dim();
    let receivers: Vec<ReceiverReport> = (0..USERS)
        .map(|i| {
            let d = v.streams(i);
            let (_, interference_rank, effective) = project_out(ch, v, i, tol);
            let signal_rank = signal_rank(ch, v, i, &effective, tol);
            let max_leakage = (0..USERS)
                .filter(|&j| j != i)
                .map(|j| leak[i][j])
                .fold(0.0, f64::max);
            ReceiverReport {
                receiver: i,
                streams: d,
                signal_rank,
                interference_rank,
                max_leakage,
                pass: signal_rank == d
                    && interference_rank + d <= nt
                    && max_leakage <= tol.leakage_tol,
            }
        })
        .collect();
    let streams_per_user = std::array::from_fn(|u| v.streams(u));
    let total_streams = v.total_streams();
    let max_leakage = receivers.iter().map(|r| r.max_leakage).fold(0.0, f64::max);
    let pass = origin == DecoderOrigin::ZeroForcing && receivers.iter().all(|r| r.pass);
    Ok(DofCertificate {
        m: ch.m(),
        n: ch.n(),
        t: ch.t(),
        seed: ch.seed(),
        receivers,
        streams_per_user,
        total_streams,
        per_slot_dof: Rational::new(total_streams as i64, ch.t() as i64),
        max_leakage,
        decoders: origin,
        tolerance: *tol,
        pass,
    })
}

/// Sum rate against SNR with the least-squares slope over the top of the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub snr_db: Vec<f64>,
    /// Bits per channel use (already divided by the extension factor).
    pub sum_rates: Vec<f64>,
    pub fitted_slope: f64,
    pub fit_span_db: f64,
}

fn log2_det_hermitian(a: Mat) -> Result<f64> {
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::NotCertifiable("covariance is not positive definite".into()))?;
    let l = chol.l_dirty();
    Ok(2.0 * (0..l.nrows()).map(|k| l[(k, k)].re.log2()).sum::<f64>())
}

/// Gaussian inputs with equal power per stream, rate per user computed with
/// residual interference treated as noise after projection by `u`.
///
/// The slope is fitted against `log2(SNR)` on the grid points within
/// `fit_span_db` of the highest SNR.
pub fn estimate_dof_slope(
    ch: &ChannelSet,
    v: &PrecoderSet,
    u: &DecoderSet,
    noise: &NoiseModel,
    snr_db: &[f64],
    fit_span_db: f64,
    tol: &Tolerance,
) -> Result<RateCurve> {
    check_shapes(ch, v)?;
    if snr_db.len() < 2 || snr_db.iter().any(|x| !x.is_finite()) {
        return invalid("SNR grid needs at least two finite points");
    }
    for i in 0..USERS {
        let d = v.streams(i);
        if u.u[i].shape() != (ch.rx_dim(), d) {
            return invalid(format!("decoder {i} does not match {d} streams"));
        }
        if d > 0 && rank_of(&(u.u[i].adjoint() * ch.h(i, i) * &v.v[i]), tol) < d {
            return Err(Error::NotCertifiable(format!(
                "receiver {i}: projected direct channel is singular"
            )));
        }
    }
    // Effective d_i x d_j links and their Gram matrices, reused for every SNR point.
    let grams: Vec<Vec<Option<Mat>>> = (0..USERS)
        .map(|i| {
            (0..USERS)
                .map(|j| {
                    (v.streams(i) > 0 && v.streams(j) > 0).then(|| {
                        let a = u.u[i].adjoint() * ch.h(i, j) * &v.v[j];
                        (&a * a.adjoint()).unscale(v.streams(j) as f64)
                    })
                })
                .collect()
        })
        .collect();
    let sigma2 = noise.variance;
    let mut sum_rates = Vec::with_capacity(snr_db.len());
    for &db in snr_db {
        let power = 10f64.powf(db / 10.0) * sigma2;
        let mut total = 0.0;
        for (i, row) in grams.iter().enumerate() {
            let d = v.streams(i);
            if d == 0 {
                continue;
            }
            let mut interf = Mat::identity(d, d) * C64::new(sigma2, 0.0);
            for j in (0..USERS).filter(|&j| j != i) {
                if let Some(g) = &row[j] {
                    interf += g * C64::new(power, 0.0);
                }
            }
            let signal = &interf + row[i].as_ref().expect("d > 0") * C64::new(power, 0.0);
            total += log2_det_hermitian(signal)? - log2_det_hermitian(interf)?;
        }
        sum_rates.push(total / ch.t() as f64);
    }
    let top = snr_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = snr_db
        .iter()
        .zip(&sum_rates)
        .filter(|(db, _)| **db >= top - fit_span_db)
        .map(|(db, r)| (db / 10.0 * 10f64.log2(), *r))
        .unzip();
    if xs.len() < 2 {
        return invalid(format!(
            "fewer than two grid points within {fit_span_db} dB of the top"
        ));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(RateCurve {
        snr_db: snr_db.to_vec(),
        sum_rates,
        fitted_slope: sxy / sxx,
        fit_span_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::{solve_chain, synth_zero_forcing};
    use crate::channel::FieldMode;
    use crate::matkit::range_basis;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_precoders(ch: &ChannelSet, d: usize, seed: u64) -> PrecoderSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = PrecoderSet::empty(ch.m(), ch.n(), ch.t());
        for u in 0..USERS {
            let g = FieldMode::Complex.gaussian(&mut rng, ch.tx_dim(), d);
            v.v[u] = crate::alignment::unit_columns(&g).unwrap();
        }
        v
    }

    #[test]
    fn chain_decoders_are_square_and_invertible() {
        let tol = Tolerance::default();
        for seed in 0..20 {
            let ch = ChannelSet::generate(5, 3, seed, FieldMode::Complex).unwrap();
            let v = solve_chain(&ch, 1, 1, &tol).unwrap();
            let u = build_decoders(&ch, &v, &tol).unwrap();
            for i in 0..3 {
                assert_eq!(u.u[i].shape(), (3, 2));
                let eff = u.u[i].adjoint() * ch.h(i, i) * &v.v[i];
                assert_eq!(rank_of(&eff, &tol), 2, "seed {seed}");
            }
        }
    }

    #[test]
    fn zero_forcing_has_no_interference() {
        let tol = Tolerance::default();
        let ch = ChannelSet::generate(9, 3, 4, FieldMode::Complex).unwrap();
        let v = synth_zero_forcing(&ch, &tol).unwrap();
        for i in 0..3 {
            let g = interference_matrix(&ch, &v, i);
            assert!(g.norm() < 1e-12 * g.ncols() as f64);
            assert_eq!(project_out(&ch, &v, i, &tol).1, 0);
        }
        let cert = certify(&ch, &v, &tol).unwrap();
        assert!(cert.pass);
        assert!(cert.max_leakage <= 1e-8);
    }

    #[test]
    fn oversubscribed_is_not_certifiable() {
        let tol = Tolerance::default();
        let ch = ChannelSet::generate(5, 3, 1, FieldMode::Complex).unwrap();
        let v = random_precoders(&ch, 2, 3);
        assert!(matches!(
            build_decoders(&ch, &v, &tol),
            Err(Error::NotCertifiable(_))
        ));
        let cert = certify(&ch, &v, &tol).unwrap();
        assert!(!cert.pass);
        assert_eq!(cert.decoders, DecoderOrigin::MatchedFilter);
        assert!(cert
            .receivers
            .iter()
            .all(|r| r.interference_rank + r.streams > 3));
    }

    #[test]
    fn leakage_rejects_zero_precoders() {
        let ch = ChannelSet::generate(5, 3, 1, FieldMode::Complex).unwrap();
        let mut v = PrecoderSet::empty(5, 3, 1);
        for u in 0..3 {
            v.v[u] = Mat::zeros(5, 1);
        }
        let u = DecoderSet {
            u: std::array::from_fn(|_| Mat::identity(3, 1)),
        };
        assert!(leakage(&ch, &v, &u).is_err());
    }

    #[test]
    fn passing_certificate_separates_signal_from_interference() {
        let tol = Tolerance::default();
        for seed in 0..5 {
            let ch = ChannelSet::generate(8, 5, seed, FieldMode::Complex).unwrap();
            let v = solve_chain(&ch, 1, 1, &tol).unwrap();
            let cert = certify(&ch, &v, &tol).unwrap();
            assert!(cert.pass);
            for i in 0..3 {
                let g = interference_matrix(&ch, &v, i);
                let joint = hcat(5, &[ch.h(i, i) * &v.v[i], g.clone()]);
                assert_eq!(rank_of(&joint, &tol), v.streams(i) + rank_of(&g, &tol));
            }
        }
    }

    #[test]
    fn scalar_link_slope_is_one() {
        let tol = Tolerance::default();
        let h = std::array::from_fn(|_| std::array::from_fn(|_| Mat::identity(1, 1)));
        let ch = ChannelSet::from_matrices(1, 1, 1, FieldMode::Real, 0, h).unwrap();
        let mut v = PrecoderSet::empty(1, 1, 1);
        v.v[0] = Mat::identity(1, 1);
        let u = DecoderSet {
            u: [Mat::identity(1, 1), Mat::zeros(1, 0), Mat::zeros(1, 0)],
        };
        let grid: Vec<f64> = (0..=10).map(|k| 50.0 + k as f64).collect();
        let curve =
            estimate_dof_slope(&ch, &v, &u, &NoiseModel::default(), &grid, 10.0, &tol).unwrap();
        assert!((curve.fitted_slope - 1.0).abs() < 1e-4);
        // log2(1 + SNR) at 60 dB
        assert!((curve.sum_rates[10] - (1.0 + 1e6f64).log2()).abs() < 1e-9);
    }

    #[test]
    fn decoders_are_orthonormal() {
        let tol = Tolerance::default();
        let ch = ChannelSet::generate(7, 5, 2, FieldMode::Complex).unwrap();
        let v = solve_chain(&ch, 2, 1, &tol).unwrap();
        let u = build_decoders(&ch, &v, &tol).unwrap();
        for ui in &u.u {
            assert!(crate::matkit::orthonormality_defect(ui) < 1e-12);
            assert_eq!(range_basis(ui, &tol).ncols(), ui.ncols());
        }
    }
}
