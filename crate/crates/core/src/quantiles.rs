//! Deterministic ε-approximate quantile summary (Greenwald–Khanna).
//!
//! Values are ordered **non-increasingly**: rank 1 is the largest value of the
//! stream and rank `n` the smallest. Equal values are ordered by arrival, so a
//! repeated value occupies an interval of ranks.
//!
//! Each stored [`GkTuple`] carries a `gap` (how much its minimum possible rank
//! exceeds that of the previous tuple) and an `uncertainty` (width of its rank
//! interval). With `band = max(1, ⌊2δn⌋)` the summary keeps
//! `gap + uncertainty ≤ band` for every tuple, which gives
//!
//! * `rmin(i) = Σ_{j ≤ i} gap_j` and `rmax(i) = rmin(i) + uncertainty_i` bound
//!   the true rank of tuple `i`,
//! * `rmax(i+1) − rmax(i) ≤ band`, and
//! * the first and last tuples are the stream maximum and minimum, with exact
//!   ranks 1 and `n`.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GkTuple {
    pub value: f64,
    pub gap: u64,
    pub uncertainty: u64,
}

/// A stored value together with its rank bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedValue {
    pub value: f64,
    pub rank_lower: u64,
    pub rank_upper: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GkSummary {
    precision: f64,
    count: u64,
    tuples: Vec<GkTuple>,
    compress_period: u64,
    since_compress: u64,
    peak_tuples: usize,
}

impl GkSummary {
    pub fn new(precision: f64) -> Result<Self> {
        if !(precision > 0.0 && precision < 1.0) {
            return Err(Error::Config(format!(
                "quantile precision must lie in (0, 1), got {precision}"
            )));
        }
        let compress_period = ((1.0 / (2.0 * precision)).floor() as u64).max(1);
        Ok(Self {
            precision,
            count: 0,
            tuples: Vec::new(),
            compress_period,
            since_compress: 0,
            peak_tuples: 0,
        })
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    /// Number of inserted values `n`.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of stored tuples.
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn peak_len(&self) -> usize {
        self.peak_tuples
    }

    pub fn tuples(&self) -> &[GkTuple] {
        &self.tuples
    }

    /// `max(1, ⌊2δn⌋)`: the bound on `gap + uncertainty` of every tuple.
    pub fn band(&self) -> u64 {
        self.raw_band().max(1)
    }

    /// `⌊2δn⌋`.
    pub fn raw_band(&self) -> u64 {
        (2.0 * self.precision * self.count as f64).floor() as u64
    }

    pub fn insert(&mut self, value: f64) -> Result<()> {
        check_finite(value, "quantile summary value")?;
        // First tuple strictly smaller than `value`; equal values stay in front.
        let pos = self.tuples.partition_point(|t| t.value >= value);
        let uncertainty = if pos == 0 || pos == self.tuples.len() {
            0
        } else {
            let next = &self.tuples[pos];
            next.gap + next.uncertainty - 1
        };
        self.tuples.insert(pos, GkTuple { value, gap: 1, uncertainty });
        self.count += 1;
        self.peak_tuples = self.peak_tuples.max(self.tuples.len());

        self.since_compress += 1;
        if self.since_compress >= self.compress_period {
            self.compress();
        }
        Ok(())
    }

    /// Merges every interior tuple into its successor whenever the merged
    /// tuple still respects the band. The first and last tuples are kept.
    pub fn compress(&mut self) {
        self.since_compress = 0;
        let len = self.tuples.len();
        if len <= 2 {
            return;
        }
        let band = self.band();
        let mut kept: Vec<GkTuple> = Vec::with_capacity(len);
        kept.push(self.tuples[len - 1]);
        for i in (1..len - 1).rev() {
            let cur = self.tuples[i];
            let next = kept.last_mut().expect("kept holds the last tuple");
            if cur.gap + next.gap + next.uncertainty <= band {
                next.gap += cur.gap;
            } else {
                kept.push(cur);
            }
        }
        kept.push(self.tuples[0]);
        kept.reverse();
        self.tuples = kept;
    }

    /// Stored values with their `[rmin, rmax]` rank bounds, largest value first.
    pub fn ranked_values(&self) -> impl Iterator<Item = RankedValue> + '_ {
        let mut rmin = 0;
        self.tuples.iter().map(move |t| {
            rmin += t.gap;
            RankedValue {
                value: t.value,
                rank_lower: rmin,
                rank_upper: rmin + t.uncertainty,
            }
        })
    }

    /// Returns a stored value whose rank is within `δn` of `φn`.
    pub fn query(&self, phi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::RejectedInput(format!("quantile must lie in [0, 1], got {phi}")));
        }
        if self.is_empty() {
            return Err(Error::EmptySummary);
        }
        let n = self.count as f64;
        let target = (phi * n).clamp(1.0, n);
        let mut best = f64::INFINITY;
        let mut best_value = self.tuples[0].value;
        for rv in self.ranked_values() {
            let err = (rv.rank_upper as f64 - target).max(target - rv.rank_lower as f64);
            if err < best {
                best = err;
                best_value = rv.value;
            }
        }
        Ok(best_value)
    }

    /// Stored values `a_1 ≥ … ≥ a_q` with rank upper bounds `u_1 = 1, …, u_q = n`.
    ///
    /// `u_j − ⌊2δn⌋` is a valid lower bound on the rank of `a_j`.
    pub fn extract(&self) -> Result<Vec<(f64, u64)>> {
        if self.is_empty() {
            return Err(Error::EmptySummary);
        }
        Ok(self.ranked_values().map(|rv| (rv.value, rv.rank_upper)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(precision: f64, values: &[f64]) -> GkSummary {
        let mut s = GkSummary::new(precision).unwrap();
        for &v in values {
            s.insert(v).unwrap();
        }
        s
    }

    #[test]
    fn single_insert() {
        let s = filled(0.1, &[0.5]);
        assert_eq!(s.count(), 1);
        assert_eq!(s.tuples(), &[GkTuple { value: 0.5, gap: 1, uncertainty: 0 }]);
    }

    #[test]
    fn keeps_extremes() {
        let values: Vec<f64> = (1..=10).rev().map(|i| i as f64 / 10.0).collect();
        let mut s = filled(0.5, &values);
        s.compress();
        assert_eq!(s.tuples().first().unwrap().value, 1.0);
        assert_eq!(s.tuples().last().unwrap().value, 0.1);
    }

    #[test]
    fn rejects_non_finite_and_bad_precision() {
        let mut s = GkSummary::new(0.1).unwrap();
        assert!(matches!(s.insert(f64::NAN), Err(Error::RejectedInput(_))));
        assert!(matches!(s.insert(f64::INFINITY), Err(Error::RejectedInput(_))));
        assert!(GkSummary::new(0.0).is_err());
        assert!(GkSummary::new(1.0).is_err());
    }

    #[test]
    fn empty_summary_errors() {
        let s = GkSummary::new(0.1).unwrap();
        assert_eq!(s.query(0.5), Err(Error::EmptySummary));
        assert_eq!(s.extract(), Err(Error::EmptySummary));
    }

    #[test]
    fn query_single_and_constant_streams() {
        let s = filled(0.1, &[0.7]);
        for phi in [0.0, 0.3, 1.0] {
            assert_eq!(s.query(phi).unwrap(), 0.7);
        }
        let s = filled(0.05, &[0.3; 100]);
        for phi in [0.0, 0.5, 1.0] {
            assert_eq!(s.query(phi).unwrap(), 0.3);
        }
    }

    #[test]
    fn extract_small_streams() {
        assert_eq!(filled(0.1, &[0.7]).extract().unwrap(), vec![(0.7, 1)]);
        assert_eq!(filled(0.01, &[0.9, 0.5]).extract().unwrap(), vec![(0.9, 1), (0.5, 2)]);
        assert_eq!(filled(0.01, &[0.5, 0.9]).extract().unwrap(), vec![(0.9, 1), (0.5, 2)]);
    }

    #[test]
    fn duplicates_of_minimum_keep_last_rank_exact() {
        let s = filled(0.2, &[0.4, 0.4, 0.4, 0.9, 0.4]);
        let pairs = s.extract().unwrap();
        assert_eq!(pairs.first().unwrap(), &(0.9, 1));
        assert_eq!(pairs.last().unwrap(), &(0.4, 5));
    }

    #[test]
    fn band_floor_is_one() {
        let s = filled(0.01, &[0.1, 0.2, 0.3]);
        assert_eq!(s.raw_band(), 0);
        assert_eq!(s.band(), 1);
        // Lossless regime: every value is stored with an exact rank.
        assert!(s.ranked_values().all(|rv| rv.rank_lower == rv.rank_upper));
        assert_eq!(s.len(), 3);
    }
}
