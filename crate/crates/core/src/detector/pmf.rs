use smallvec::SmallVec;

/// Probability mass over the constellation alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPmf(SmallVec<[f64; 16]>);

impl SymbolPmf {
    pub fn uniform(m: usize) -> Self {
        Self(SmallVec::from_elem(1.0 / m as f64, m))
    }

    pub fn indicator(m: usize, symbol: usize) -> Self {
        let mut p = SmallVec::from_elem(0.0, m);
        p[symbol] = 1.0;
        Self(p)
    }

    /// Normalize nonnegative masses.
    pub fn from_probs(probs: &[f64]) -> Self {
        let s: f64 = probs.iter().sum();
        Self(probs.iter().map(|p| p / s).collect())
    }

    /// Normalize log-masses with a max shift.
    pub fn from_log(logs: &[f64]) -> Self {
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: SmallVec<[f64; 16]> = logs.iter().map(|l| (l - max).exp()).collect();
        let s: f64 = e.iter().sum();
        Self(e.into_iter().map(|x| x / s).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_prob(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}
