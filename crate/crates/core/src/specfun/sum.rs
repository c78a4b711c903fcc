//! Compensated (Neumaier) accumulation with a running magnitude total.

/// Running sum that tracks rounding error and the total magnitude of the
/// added terms, so callers can judge cancellation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    magnitude: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.magnitude += x.abs();
    }

    /// Adds a term whose own magnitude bound exceeds `|x|` (the term was itself
    /// produced by a cancelling computation).
    pub fn add_with_magnitude(&mut self, x: f64, magnitude: f64) {
        let m = self.magnitude;
        self.add(x);
        self.magnitude = m + magnitude.max(x.abs());
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        let m = self.magnitude + other.magnitude;
        self.add(other.sum);
        self.add(other.comp);
        self.magnitude = m;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    /// Ratio of summed magnitudes to the magnitude of the result; 1 when no
    /// cancellation occurred, infinite when the result cancels to zero.
    pub fn condition(&self) -> f64 {
        let v = self.value().abs();
        if self.magnitude == 0.0 {
            1.0
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            self.magnitude / v
        }
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_summation() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
        assert!(s.condition() > 1e99);
    }

    #[test]
    fn condition_is_one_for_same_sign_terms() {
        let s: CompensatedSum = [0.5, 0.25, 0.25].into_iter().collect();
        assert_eq!(s.value(), 1.0);
        assert_eq!(s.condition(), 1.0);
    }
}
