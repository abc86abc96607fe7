//! Channel realizations for the 3-user interference channel.
//!
//! `h(rx, tx)` is the `(N t) x (M t)` matrix from transmitter `tx` to
//! receiver `rx`; users are indexed `0..3`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matkit::{block_diag, check_finite, from_entries, to_entries, Mat, C64};

pub const USERS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldMode {
    Real,
    Complex,
}

impl FieldMode {
    /// Zero-mean unit-variance sample; circularly symmetric in complex mode.
    pub(crate) fn sample<R: rand::Rng>(self, rng: &mut R) -> C64 {
        match self {
            FieldMode::Real => C64::new(StandardNormal.sample(rng), 0.0),
            FieldMode::Complex => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
        }
    }

    pub fn gaussian<R: rand::Rng>(self, rng: &mut R, rows: usize, cols: usize) -> Mat {
        // from_fn is column-major; draw row-major so the stream order matches the JSON layout.
        let mut a = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                a[(i, j)] = self.sample(rng);
            }
        }
        a
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    m: usize,
    n: usize,
    t: usize,
    field_mode: FieldMode,
    seed: u64,
    h: [[Mat; USERS]; USERS],
}

impl ChannelSet {
    /// Nine i.i.d. Gaussian `n x m` matrices drawn from a ChaCha stream
    /// seeded by `seed`, in receiver-major order.
    pub fn generate(m: usize, n: usize, seed: u64, field_mode: FieldMode) -> Result<Self> {
        if m == 0 || n == 0 {
            return invalid(format!("antenna counts must be positive, got M={m}, N={n}"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h =
            std::array::from_fn(|_| std::array::from_fn(|_| field_mode.gaussian(&mut rng, n, m)));
        Ok(ChannelSet {
            m,
            n,
            t: 1,
            field_mode,
            seed,
            h,
        })
    }

    /// Builds a set from explicit matrices after checking every structural invariant.
    pub fn from_matrices(
        m: usize,
        n: usize,
        t: usize,
        field_mode: FieldMode,
        seed: u64,
        h: [[Mat; USERS]; USERS],
    ) -> Result<Self> {
        if m == 0 || n == 0 || t == 0 {
            return invalid("dimensions and extension factor must be positive");
        }
        for (i, row) in h.iter().enumerate() {
            for (j, hij) in row.iter().enumerate() {
                if hij.shape() != (n * t, m * t) {
                    return invalid(format!(
                        "h[{i}][{j}] is {:?}, expected {:?}",
                        hij.shape(),
                        (n * t, m * t)
                    ));
                }
                check_finite(hij)?;
                if t > 1 {
                    let block = hij.view((0, 0), (n, m)).into_owned();
                    if *hij != block_diag(&block, t) {
                        return invalid(format!(
                            "h[{i}][{j}] is not block-diagonal with {t} identical blocks"
                        ));
                    }
                }
            }
        }
        Ok(ChannelSet {
            m,
            n,
            t,
            field_mode,
            seed,
            h,
        })
    }

    /// Symbol extension over `t` slots of a constant channel.
    pub fn extend(&self, t: usize) -> Result<Self> {
        if self.t != 1 {
            return invalid(format!("channel is already extended (t={})", self.t));
        }
        if t == 0 {
            return invalid("extension factor must be >= 1");
        }
        let mut out = self.clone();
        out.t = t;
        for row in out.h.iter_mut() {
            for hij in row.iter_mut() {
                *hij = block_diag(hij, t);
            }
        }
        Ok(out)
    }

    /// Reverse link: `h'[i][j] = h[j][i]^T`, with `M` and `N` exchanged.
    pub fn reciprocal(&self) -> Self {
        ChannelSet {
            m: self.n,
            n: self.m,
            t: self.t,
            field_mode: self.field_mode,
            seed: self.seed,
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[j][i].transpose())),
        }
    }

    pub fn h(&self, rx: usize, tx: usize) -> &Mat {
        &self.h[rx][tx]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn field_mode(&self) -> FieldMode {
        self.field_mode
    }

    /// Transmit dimensions per user, `M t`.
    pub fn tx_dim(&self) -> usize {
        self.m * self.t
    }

    /// Receive dimensions per user, `N t`.
    pub fn rx_dim(&self) -> usize {
        self.n * self.t
    }

    pub fn to_doc(&self) -> ChannelDoc {
        ChannelDoc {
            m: self.m,
            n: self.n,
            t: self.t,
            field_mode: self.field_mode,
            seed: self.seed,
            h: self
                .h
                .iter()
                .map(|row| row.iter().map(to_entries).collect())
                .collect(),
        }
    }

    pub fn from_doc(doc: &ChannelDoc) -> Result<Self> {
        if doc.h.len() != USERS || doc.h.iter().any(|r| r.len() != USERS) {
            return invalid("h must be a 3x3 array");
        }
        let (rows, cols) = (doc.n * doc.t, doc.m * doc.t);
        let mut mats = Vec::with_capacity(USERS * USERS);
        for row in &doc.h {
            for e in row {
                mats.push(from_entries(rows, cols, e)?);
            }
        }
        let mut it = mats.into_iter();
        let h = std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("9 matrices")));
        Self::from_matrices(doc.m, doc.n, doc.t, doc.field_mode, doc.seed, h)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}

/// Serialized channel: `h[i][j]` holds row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDoc {
    pub m: usize,
    pub n: usize,
    pub t: usize,
    pub field_mode: FieldMode,
    pub seed: u64,
    pub h: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Receiver noise, only used by the rate-slope estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return invalid(format!("noise variance must be positive, got {variance}"));
        }
        Ok(NoiseModel { variance })
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { variance: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkit::{rank, Tolerance};

    #[test]
    fn shape_and_determinism() {
        let a = ChannelSet::generate(5, 3, 7, FieldMode::Complex).unwrap();
        let b = ChannelSet::generate(5, 3, 7, FieldMode::Complex).unwrap();
        assert_eq!(a, b);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.h(i, j).shape(), (3, 5));
            }
        }
        let c = ChannelSet::generate(5, 3, 8, FieldMode::Complex).unwrap();
        assert_ne!(a, c);
        assert!(ChannelSet::generate(0, 3, 1, FieldMode::Real).is_err());
    }

    #[test]
    fn real_mode_has_zero_imaginary_part() {
        let a = ChannelSet::generate(3, 2, 1, FieldMode::Real).unwrap();
        assert!(a.h(1, 2).iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn square_direct_channels_are_full_rank() {
        let tol = Tolerance::default();
        for seed in 0..20 {
            let ch = ChannelSet::generate(4, 4, seed, FieldMode::Complex).unwrap();
            for i in 0..3 {
                assert_eq!(rank(ch.h(i, i), &tol).unwrap(), 4);
            }
        }
    }

    #[test]
    fn extension_shapes_and_rank() {
        let tol = Tolerance::default();
        let ch = ChannelSet::generate(5, 3, 2, FieldMode::Complex).unwrap();
        assert_eq!(ch.extend(1).unwrap(), ch);
        let ext = ch.extend(3).unwrap();
        assert_eq!(ext.h(0, 1).shape(), (9, 15));
        assert_eq!(ext.h(0, 1)[(3, 2)], C64::new(0.0, 0.0));
        assert_eq!(ext.h(0, 1)[(4, 6)], ch.h(0, 1)[(1, 1)]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    rank(ext.h(i, j), &tol).unwrap(),
                    3 * rank(ch.h(i, j), &tol).unwrap()
                );
            }
        }
        assert!(ext.extend(2).is_err());
    }

    #[test]
    fn reciprocal_swaps_roles() {
        let ch = ChannelSet::generate(4, 5, 3, FieldMode::Complex).unwrap();
        let r = ch.reciprocal();
        assert_eq!((r.m(), r.n()), (5, 4));
        assert_eq!(r.h(0, 1)[(2, 3)], ch.h(1, 0)[(3, 2)]);
        assert_eq!(r.reciprocal(), ch);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let ch = ChannelSet::generate(3, 2, 9, FieldMode::Complex)
            .unwrap()
            .extend(2)
            .unwrap();
        let back = ChannelSet::from_json(&ch.to_json().unwrap()).unwrap();
        assert_eq!(back, ch);

        let mut doc = ch.to_doc();
        // Break block-diagonal structure.
        doc.h[0][0][1] = [1.0, 0.0];
        doc.h[0][0][4] = [1.0, 0.0];
        assert!(ChannelSet::from_doc(&doc).is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(0.0).is_err());
        assert!(NoiseModel::new(2.0).is_ok());
    }
}
