//! Link-to-system mapping: per-MCS SINR to BLER curves and reception draws.
//!
//! A receiver-sensitivity gain of `delta` dB is modelled by reading the curve
//! at `sinr + delta`, so one table serves every shifted variant.

use std::io::{self, Write};

use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

pub const MCS_COUNT: u8 = 15;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("BLER table parse error: {0}")]
    Csv(#[from] csv::Error),
    #[error("BLER table header must be `mcs,snr_db,bler` (got `{0}`)")]
    Header(String),
    #[error("unknown MCS {0} (expected 1..=15)")]
    UnknownMcs(u8),
    #[error("missing MCS 1..15 curves: {0:?}")]
    MissingMcs(Vec<u8>),
    #[error("MCS {mcs}: rows must be sorted by (mcs, snr_db) with strictly increasing snr (at {snr_db} dB)")]
    Unsorted { mcs: u8, snr_db: f64 },
    #[error("MCS {mcs}: bler {bler} at {snr_db} dB outside [0, 1]")]
    BlerRange { mcs: u8, snr_db: f64, bler: f64 },
    #[error("MCS {mcs}: bler increases with snr at {snr_db} dB")]
    NonMonotone { mcs: u8, snr_db: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlerCurve {
    snr_db: Vec<f64>,
    bler: Vec<f64>,
}

impl BlerCurve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.snr_db.iter().copied().zip(self.bler.iter().copied())
    }

    pub fn snr_grid(&self) -> &[f64] {
        &self.snr_db
    }

    /// Linear interpolation with constant extrapolation on both sides.
    pub fn at(&self, snr_db: f64) -> f64 {
        let n = self.snr_db.len();
        if snr_db <= self.snr_db[0] {
            return self.bler[0];
        }
        if snr_db >= self.snr_db[n - 1] {
            return self.bler[n - 1];
        }
        let hi = self.snr_db.partition_point(|&s| s <= snr_db);
        let lo = hi - 1;
        let (x0, x1) = (self.snr_db[lo], self.snr_db[hi]);
        let (y0, y1) = (self.bler[lo], self.bler[hi]);
        y0 + (y1 - y0) * (snr_db - x0) / (x1 - x0)
    }
}

/// Curves for MCS 1..=15.
#[derive(Debug, Clone, PartialEq)]
pub struct BlerTable {
    curves: Vec<BlerCurve>,
}

/// Logistic slope of the built-in curves, per dB.
const DEFAULT_SLOPE: f64 = 1.5;

/// SINR at which the built-in curve for `mcs` crosses 50% BLER.
pub fn default_midpoint_db(mcs: u8) -> f64 {
    -6.0 + 2.0 * f64::from(mcs - 1)
}

impl BlerTable {
    /// Synthetic logistic curves on a 0.1 dB grid over [-10, 30] dB.
    pub fn builtin() -> Self {
        let grid: Vec<f64> = (0..=400).map(|i| f64::from(i - 100) / 10.0).collect();
        let curves = (1..=MCS_COUNT)
            .map(|mcs| {
                let mid = default_midpoint_db(mcs);
                BlerCurve {
                    bler: grid
                        .iter()
                        .map(|&s| 1.0 / (1.0 + (DEFAULT_SLOPE * (s - mid)).exp()))
                        .collect(),
                    snr_db: grid.clone(),
                }
            })
            .collect();
        Self { curves }
    }

    pub fn curve(&self, mcs: u8) -> Result<&BlerCurve, TableError> {
        if (1..=MCS_COUNT).contains(&mcs) {
            Ok(&self.curves[usize::from(mcs - 1)])
        } else {
            Err(TableError::UnknownMcs(mcs))
        }
    }

    pub fn curves(&self) -> impl Iterator<Item = (u8, &BlerCurve)> {
        (1..=MCS_COUNT).zip(self.curves.iter())
    }

    pub fn lookup(&self, mcs: u8, sinr_db: f64, delta_db: f64) -> Result<f64, TableError> {
        Ok(self.curve(mcs)?.at(sinr_db + delta_db))
    }

    /// Writes the table in the `mcs,snr_db,bler` format [`load_table`] reads.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "mcs,snr_db,bler")?;
        for (mcs, curve) in self.curves() {
            for (s, b) in curve.points() {
                writeln!(out, "{mcs},{s},{b}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    mcs: u8,
    snr_db: f64,
    bler: f64,
}

/// Parses and validates a `mcs,snr_db,bler` CSV table.
pub fn load_table(text: &str) -> Result<BlerTable, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if !header.is_empty() && header.iter().collect::<Vec<_>>() != ["mcs", "snr_db", "bler"] {
        return Err(TableError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }

    let mut curves: Vec<Option<BlerCurve>> = vec![None; usize::from(MCS_COUNT)];
    let mut last_mcs = 0u8;
    for row in reader.deserialize::<Row>() {
        let Row { mcs, snr_db, bler } = row?;
        if !(1..=MCS_COUNT).contains(&mcs) {
            return Err(TableError::UnknownMcs(mcs));
        }
        if !(0.0..=1.0).contains(&bler) {
            return Err(TableError::BlerRange { mcs, snr_db, bler });
        }
        if mcs < last_mcs || !snr_db.is_finite() {
            return Err(TableError::Unsorted { mcs, snr_db });
        }
        let slot = &mut curves[usize::from(mcs - 1)];
        match slot {
            Some(curve) => {
                if mcs != last_mcs || snr_db <= *curve.snr_db.last().unwrap() {
                    return Err(TableError::Unsorted { mcs, snr_db });
                }
                if bler > *curve.bler.last().unwrap() {
                    return Err(TableError::NonMonotone { mcs, snr_db });
                }
                curve.snr_db.push(snr_db);
                curve.bler.push(bler);
            }
            None => {
                *slot = Some(BlerCurve {
                    snr_db: vec![snr_db],
                    bler: vec![bler],
                })
            }
        }
        last_mcs = mcs;
    }

    let missing: Vec<u8> = (1..=MCS_COUNT)
        .filter(|&m| curves[usize::from(m - 1)].is_none())
        .collect();
    if !missing.is_empty() {
        return Err(TableError::MissingMcs(missing));
    }
    Ok(BlerTable {
        curves: curves.into_iter().map(Option::unwrap).collect(),
    })
}

/// Free-function form of [`BlerTable::lookup`].
pub fn bler_lookup(table: &BlerTable, mcs: u8, sinr_db: f64, delta_db: f64) -> Result<f64, TableError> {
    table.lookup(mcs, sinr_db, delta_db)
}

/// One Bernoulli reception trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceptionDraw {
    pub bler: f64,
    pub uniform_x: f64,
    /// `uniform_x >= bler`, so reception has probability `1 - bler`.
    pub received: bool,
}

impl ReceptionDraw {
    pub fn sample<R: Rng + ?Sized>(bler: f64, rng: &mut R) -> Self {
        let uniform_x: f64 = rng.gen();
        Self {
            bler,
            uniform_x,
            received: uniform_x >= bler,
        }
    }
}

pub fn reception_draw<R: Rng + ?Sized>(bler: f64, rng: &mut R) -> bool {
    ReceptionDraw::sample(bler, rng).received
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn csv_of(table: &BlerTable) -> String {
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn builtin_covers_all_mcs() {
        let t = BlerTable::builtin();
        assert_eq!(t.curves().count(), 15);
        for (_, c) in t.curves() {
            assert_eq!(c.snr_grid().len(), 401);
            assert_eq!(c.snr_grid()[0], -10.0);
            assert_eq!(c.snr_grid()[400], 30.0);
        }
        // 50% crossing sits on the midpoint
        assert!((t.lookup(1, -6.0, 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((t.lookup(15, 22.0, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dump_and_reload_is_identity() {
        let t = BlerTable::builtin();
        assert_eq!(load_table(&csv_of(&t)).unwrap(), t);
    }

    #[test]
    fn increasing_bler_rejected() {
        let mut text = csv_of(&BlerTable::builtin());
        text = text.replacen("1,-10,", "1,-10,0.1\n1,-10.5,", 1);
        // -10.5 after -10 breaks ordering
        assert!(matches!(load_table(&text), Err(TableError::Unsorted { .. })));

        let bad = "mcs,snr_db,bler\n1,0,0.2\n1,1,0.4\n";
        assert!(matches!(load_table(bad), Err(TableError::NonMonotone { mcs: 1, .. })));
    }

    #[test]
    fn empty_file_rejected() {
        let err = load_table("").unwrap_err();
        assert!(err.to_string().contains("missing MCS 1..15"), "{err}");
        let err = load_table("mcs,snr_db,bler\n").unwrap_err();
        assert!(matches!(err, TableError::MissingMcs(ref m) if m.len() == 15));
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(load_table("a,b,c\n1,2,3\n"), Err(TableError::Header(_))));
        assert!(matches!(load_table("mcs,snr_db,bler\n16,0,0.5\n"), Err(TableError::UnknownMcs(16))));
        assert!(matches!(load_table("mcs,snr_db,bler\n1,0,1.5\n"), Err(TableError::BlerRange { .. })));
        assert!(matches!(load_table("mcs,snr_db,bler\n1,zero,0.5\n"), Err(TableError::Csv(_))));
        let missing_one = csv_of(&BlerTable::builtin())
            .lines()
            .filter(|l| !l.starts_with("7,"))
            .collect::<Vec<_>>()
            .join("\n");
        assert!(matches!(load_table(&missing_one), Err(TableError::MissingMcs(ref m)) if m == &vec![7]));
    }

    #[test]
    fn constant_extrapolation() {
        let t = BlerTable::builtin();
        let c = t.curve(5).unwrap();
        let first = c.points().next().unwrap().1;
        let last = c.points().last().unwrap().1;
        assert_eq!(t.lookup(5, -50.0, 0.0).unwrap(), first);
        assert_eq!(t.lookup(5, 80.0, 0.0).unwrap(), last);
        assert!(first > 0.99 && last < 1e-6);
        assert!(matches!(t.lookup(0, 0.0, 0.0), Err(TableError::UnknownMcs(0))));
        assert!(matches!(t.lookup(16, 0.0, 0.0), Err(TableError::UnknownMcs(16))));
    }

    #[test]
    fn linear_interpolation_between_points() {
        let t = load_table(&{
            let mut s = String::from("mcs,snr_db,bler\n");
            for m in 1..=15 {
                s.push_str(&format!("{m},0,1\n{m},10,0\n"));
            }
            s
        })
        .unwrap();
        assert!((t.lookup(3, 2.5, 0.0).unwrap() - 0.75).abs() < 1e-12);
        assert!((t.lookup(3, 2.5, 5.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn shift_identity_on_grid() {
        let t = BlerTable::builtin();
        for (mcs, curve) in t.curves() {
            for &s in curve.snr_grid() {
                for delta in [3.0, 5.0, 7.0] {
                    assert_eq!(t.lookup(mcs, s, delta).unwrap(), t.lookup(mcs, s + delta, 0.0).unwrap());
                }
            }
        }
    }

    #[test]
    fn delta_and_mcs_dominance() {
        let t = BlerTable::builtin();
        let mut s = -20.0;
        while s <= 35.0 {
            for mcs in 1..=15u8 {
                let b: Vec<f64> = [0.0, 3.0, 5.0, 7.0]
                    .iter()
                    .map(|&d| t.lookup(mcs, s, d).unwrap())
                    .collect();
                assert!(b.windows(2).all(|w| w[1] <= w[0]), "delta order at {s}");
                if mcs > 1 {
                    assert!(t.lookup(mcs, s, 0.0).unwrap() >= t.lookup(mcs - 1, s, 0.0).unwrap());
                }
            }
            s += 0.37;
        }
    }

    #[test]
    fn draw_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            assert!(reception_draw(0.0, &mut rng));
            assert!(!reception_draw(1.0, &mut rng));
        }
    }

    #[test]
    fn draw_frequency_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 100_000;
        let hits = (0..n).filter(|_| reception_draw(0.25, &mut rng)).count();
        let p = hits as f64 / n as f64;
        let sigma = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((p - 0.75).abs() <= 3.0 * sigma, "{p}");
    }

    #[test]
    fn uniform_draws_pass_chi_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let n = 100_000usize;
        let bins = 100usize;
        let mut counts = vec![0u32; bins];
        for _ in 0..n {
            let d = ReceptionDraw::sample(0.5, &mut rng);
            assert_eq!(d.received, d.uniform_x >= 0.5);
            counts[((d.uniform_x * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let expected = n as f64 / bins as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (f64::from(c) - expected).powi(2) / expected)
            .sum();
        let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "chi2 {stat} >= {critical}");
    }
}
