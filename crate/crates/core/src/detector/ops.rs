use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// Instrumented operation counts: two-term real additions, two-term real
/// multiplications and lookup-table accesses (nonlinear functions).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub adds: u64,
    pub mults: u64,
    pub lut: u64,
}

impl OpCounts {
    pub const fn new(adds: u64, mults: u64, lut: u64) -> Self {
        Self { adds, mults, lut }
    }

    #[inline]
    pub(crate) fn tally(&mut self, adds: u64, mults: u64, lut: u64) {
        self.adds += adds;
        self.mults += mults;
        self.lut += lut;
    }

    /// Per-unit averages, e.g. per symbol per iteration.
    pub fn per(&self, units: u64) -> [f64; 3] {
        let u = units.max(1) as f64;
        [self.adds as f64 / u, self.mults as f64 / u, self.lut as f64 / u]
    }
}

impl Add for OpCounts {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.adds + o.adds, self.mults + o.mults, self.lut + o.lut)
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
