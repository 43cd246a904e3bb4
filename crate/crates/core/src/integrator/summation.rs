use serde::{Deserialize, Serialize};

/// How pair contributions are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Summation {
    /// Neumaier-compensated summation.
    #[default]
    Compensated,
    Naive,
}

/// Running sum with an optional Neumaier compensation term.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
    mode: Summation,
}

impl Accumulator {
    pub fn new(mode: Summation) -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
            mode,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        match self.mode {
            Summation::Naive => self.sum += value,
            Summation::Compensated => {
                let t = self.sum + value;
                if self.sum.abs() >= value.abs() {
                    self.compensation += (self.sum - t) + value;
                } else {
                    self.compensation += (value - t) + self.sum;
                }
                self.sum = t;
            }
        }
    }

    /// Folds another partial sum into this one.
    pub fn merge(&mut self, other: &Accumulator) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
