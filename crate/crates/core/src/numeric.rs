/// Neumaier compensated summation; keeps long running totals of item sizes
/// accurate to a few ulps.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Index `i` of the power-of-`base` bucket `(base^i, base^(i+1)]` holding `x > 0`.
pub(crate) fn power_bucket(x: f64, base: f64) -> i64 {
    debug_assert!(x > 0.0 && base > 1.0);
    let mut i = (x.ln() / base.ln()).ceil() as i64 - 1;
    while base.powi(i as i32) >= x {
        i -= 1;
    }
    while base.powi(i as i32 + 1) < x {
        i += 1;
    }
    i
}

/// `⌈x⌉`, ignoring floating noise of up to `1e-9` above an integer.
pub(crate) fn ceil_tol(x: f64) -> u64 {
    let c = (x - 1e-9).ceil();
    if c <= 0.0 {
        0
    } else {
        c as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_boundaries_are_half_open_from_below() {
        assert_eq!(power_bucket(1.0, 1.1), -1);
        assert_eq!(power_bucket(1.1, 1.1), 0);
        assert_eq!(power_bucket(1.100001, 1.1), 1);
        assert_eq!(power_bucket(0.5, 2.0), -2);
        assert_eq!(power_bucket(0.6, 2.0), -1);
    }

    #[test]
    fn compensated_sum_of_many_small_terms() {
        let mut s = CompensatedSum::default();
        for _ in 0..1_000_000 {
            s.add(0.1);
        }
        assert!((s.value() - 100_000.0).abs() < 1e-8);
    }

    #[test]
    fn ceil_tol_absorbs_noise() {
        assert_eq!(ceil_tol(3.0000000000004), 3);
        assert_eq!(ceil_tol(3.01), 4);
        assert_eq!(ceil_tol(0.0), 0);
        assert_eq!(ceil_tol(10.0 / 0.9), 12);
    }
}
