//! Deterministic compensated summation used for all global reductions.

use nalgebra::Vector3;

/// Neumaier-compensated accumulator. Summation order is fixed by the caller,
/// so results are reproducible run to run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Componentwise compensated accumulator for 3-vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct VectorAccumulator {
    components: [Accumulator; 3],
}

impl VectorAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Vector3<f64>) {
        self.components[0].add(v.x);
        self.components[1].add(v.y);
        self.components[2].add(v.z);
    }

    pub fn total(&self) -> Vector3<f64> {
        Vector3::new(
            self.components[0].total(),
            self.components[1].total(),
            self.components[2].total(),
        )
    }
}

/// Compensated sum of an iterator of f64 values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        // 1 + 1e100 - 1e100 loses the 1 under naive summation.
        let total = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(total, 2.0);
    }

    #[test]
    fn vector_accumulator_matches_scalar() {
        let mut acc = VectorAccumulator::new();
        for i in 0..100 {
            acc.add(Vector3::new(0.1 * i as f64, -0.1 * i as f64, 1e-3));
        }
        let t = acc.total();
        assert_eq!(t.x, compensated_sum((0..100).map(|i| 0.1 * i as f64)));
        assert_eq!(t.z, compensated_sum((0..100).map(|_| 1e-3)));
    }
}
