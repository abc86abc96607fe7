use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{achievable, chain_dof_ratio, general_upperbound_ratio, Rational};
use crate::error::{Error, Result};

/// One antenna configuration of the fixed-`N` sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub m: usize,
    pub n: usize,
    pub achievable: Rational,
    pub general_ub: Rational,
    pub beamforming_ub: Rational,
    pub baseline: Rational,
    pub scheme: String,
    pub t: usize,
}

/// Achievable DoF and bounds for `M = m_lo..=m_hi` at fixed `N`.
pub fn sweep_fig2(n: usize, m_lo: usize, m_hi: usize, t_max: usize) -> Result<Vec<Fig2Row>> {
    if n == 0 || m_lo == 0 || m_lo > m_hi {
        return Err(Error::InvalidInput(format!(
            "bad sweep range n={n}, m={m_lo}:{m_hi}"
        )));
    }
    (m_lo..=m_hi)
        .map(|m| {
            let rep = achievable(m, n, t_max)?;
            let (scheme, t) = match &rep.plan {
                None => ("reference".to_string(), 1),
                Some(p) if p.reciprocal => (format!("reciprocal_{}", p.regime_label()), p.t),
                Some(p) => (p.regime_label().to_string(), p.t),
            };
            Ok(Fig2Row {
                m,
                n,
                achievable: rep.achievable,
                general_ub: rep.general_ub,
                beamforming_ub: rep.beamforming_ub,
                baseline: rep.baseline,
                scheme,
                t,
            })
        })
        .collect()
}

/// Normalized (`d/N`) curves against `r = M/N` for several chain depths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub ratio: Rational,
    pub per_l: Vec<(usize, Rational)>,
    pub general_ub: Rational,
    pub beamforming_ub: Rational,
}

pub fn sweep_fig1(l_list: &[usize], ratios: &[Rational]) -> Result<Vec<Fig1Row>> {
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    if l_list.contains(&0) {
        return Err(Error::InvalidInput("chain depth must be >= 1".into()));
    }
    ratios
        .iter()
        .map(|&r| {
            if !(r > one && r <= two) {
                return Err(Error::InvalidInput(format!("ratio {r} outside (1, 2]")));
            }
            Ok(Fig1Row {
                ratio: r,
                per_l: l_list
                    .iter()
                    .map(|&l| (l, chain_dof_ratio(r, one, l)))
                    .collect(),
                general_ub: general_upperbound_ratio(r, one),
                beamforming_ub: Rational::new(3, 4) * (r + one),
            })
        })
        .collect()
}

/// Ratio grid `1 + k/steps`, `k = 1..=steps`, merged with the
/// beamforming-corner ratios `(2l+3)/(2l+1)` of every listed depth.
pub fn fig1_ratio_grid(l_list: &[usize], steps: usize) -> Vec<Rational> {
    let one = Rational::from_integer(1);
    let mut grid: Vec<Rational> = (1..=steps)
        .map(|k| one + Rational::new(k as i64, steps as i64))
        .collect();
    grid.extend(
        l_list
            .iter()
            .map(|&l| Rational::new(2 * l as i64 + 3, 2 * l as i64 + 1)),
    );
    grid.sort();
    grid.dedup();
    grid
}

pub fn write_fig2_csv<W: Write>(out: W, rows: &[Fig2Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "m",
        "n",
        "achievable",
        "achievable_dec",
        "general_ub",
        "general_ub_dec",
        "beamforming_ub",
        "beamforming_ub_dec",
        "baseline",
        "baseline_dec",
        "scheme",
        "t",
    ])?;
    for r in rows {
        w.write_record([
            r.m.to_string(),
            r.n.to_string(),
            r.achievable.to_string(),
            r.achievable.decimal(),
            r.general_ub.to_string(),
            r.general_ub.decimal(),
            r.beamforming_ub.to_string(),
            r.beamforming_ub.decimal(),
            r.baseline.to_string(),
            r.baseline.decimal(),
            r.scheme.clone(),
            r.t.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fig1_csv<W: Write>(out: W, rows: &[Fig1Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let Some(first) = rows.first() else {
        w.flush()?;
        return Ok(());
    };
    let mut header = vec!["ratio".to_string(), "ratio_dec".to_string()];
    for (l, _) in &first.per_l {
        header.push(format!("L{l}"));
        header.push(format!("L{l}_dec"));
    }
    header.extend(
        [
            "general_ub",
            "general_ub_dec",
            "beamforming_ub",
            "beamforming_ub_dec",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.ratio.to_string(), r.ratio.decimal()];
        for (_, v) in &r.per_l {
            rec.push(v.to_string());
            rec.push(v.decimal());
        }
        rec.extend([
            r.general_ub.to_string(),
            r.general_ub.decimal(),
            r.beamforming_ub.to_string(),
            r.beamforming_ub.decimal(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn fig2_anchor_rows() {
        let rows = sweep_fig2(5, 1, 16, 24).unwrap();
        assert_eq!(rows.len(), 16);
        let at = |m: usize| &rows[m - 1];
        assert_eq!(at(8).achievable, q(48, 5));
        assert_eq!(at(7).achievable, q(9, 1));
        assert_eq!(at(7).beamforming_ub, q(9, 1));
        for (m, v) in [(2, 5), (3, 6), (9, 10)] {
            assert_eq!(at(m).achievable, q(v, 1));
            assert_eq!(at(m).general_ub, q(v, 1));
        }
    }

    #[test]
    fn fig1_reference_points() {
        let rows = sweep_fig1(&[1], &[q(5, 3)]).unwrap();
        assert_eq!(rows[0].per_l, vec![(1, q(2, 1))]);
        assert_eq!(rows[0].general_ub, q(2, 1));

        let ls = [1, 2, 3, 4];
        let corners: Vec<Rational> = ls.iter().map(|&l| q(2 * l + 3, 2 * l + 1)).collect();
        let rows = sweep_fig1(&[1, 2, 3, 4], &corners).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.per_l[i].1, row.beamforming_ub);
        }

        let near_one = sweep_fig1(&[1, 2, 3], &[q(1001, 1000)]).unwrap();
        assert!(near_one[0]
            .per_l
            .iter()
            .all(|(_, v)| *v == Rational::zero()));
        assert!(sweep_fig1(&[1], &[q(1, 1)]).is_err());
        assert!(sweep_fig1(&[1], &[q(5, 2)]).is_err());
    }

    #[test]
    fn ratio_grid_contains_corners() {
        let g = fig1_ratio_grid(&[1, 2, 3], 10);
        assert!(g.contains(&q(5, 3)) && g.contains(&q(7, 5)) && g.contains(&q(9, 7)));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.last().unwrap(), q(2, 1));
    }

    #[test]
    fn fig2_csv_shape() {
        let rows = sweep_fig2(5, 7, 8, 24).unwrap();
        let mut buf = Vec::new();
        write_fig2_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("8,5,48/5,9.600000,10,"));
        assert!(!text.contains('\r'));
    }
}
