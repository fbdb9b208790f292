//! Flooding sum-product decoding in the LLR domain.

use super::matrix::ParityCheckMatrix;

/// Saturation bound for every LLR leaving the decoder.
pub const LLR_MAX: f64 = 30.0;

/// Edge numbering shared by all decoders of one code: edges are ordered by
/// check, and each variable keeps the list of its edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct EdgeLayout {
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
}

impl EdgeLayout {
    pub(crate) fn new(h: &ParityCheckMatrix) -> Self {
        let mut check_start = Vec::with_capacity(h.m() + 1);
        let mut edge_var = Vec::with_capacity(h.edge_count());
        let mut per_var: Vec<Vec<usize>> = vec![Vec::new(); h.n()];
        check_start.push(0);
        for row in h.rows() {
            for &v in row {
                per_var[v].push(edge_var.len());
                edge_var.push(v);
            }
            check_start.push(edge_var.len());
        }
        let mut var_start = Vec::with_capacity(h.n() + 1);
        let mut var_edges = Vec::with_capacity(edge_var.len());
        var_start.push(0);
        for list in per_var {
            var_edges.extend(list);
            var_start.push(var_edges.len());
        }
        Self {
            check_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    fn n(&self) -> usize {
        self.var_start.len() - 1
    }

    fn edges(&self) -> usize {
        self.edge_var.len()
    }
}

/// `tanh(x / 2)` through one exponential; inputs are already clamped.
#[inline]
fn half_tanh(x: f64) -> f64 {
    let e = x.exp();
    (e - 1.0) / (e + 1.0)
}

/// `2 atanh(p)` through one logarithm.
#[inline]
fn twice_atanh(p: f64) -> f64 {
    ((1.0 + p) / (1.0 - p)).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub hard_bits: Vec<u8>,
    pub llr_posterior: Vec<f64>,
    pub llr_extrinsic: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Per-frame decoder state. Check-to-variable messages survive between
/// [`SpaDecoder::decode`] calls unless [`SpaDecoder::reset`] is called.
#[derive(Debug, Clone)]
pub struct SpaDecoder<'a> {
    layout: &'a EdgeLayout,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> SpaDecoder<'a> {
    pub(crate) fn new(layout: &'a EdgeLayout) -> Self {
        Self {
            layout,
            c2v: vec![0.0; layout.edges()],
            v2c: vec![0.0; layout.edges()],
            scratch: Vec::new(),
        }
    }

    pub fn reset(&mut self) {
        self.c2v.fill(0.0);
    }

    fn var_sum(&self, v: usize) -> f64 {
        let l = self.layout;
        l.var_edges[l.var_start[v]..l.var_start[v + 1]]
            .iter()
            .map(|&e| self.c2v[e])
            .sum()
    }

    fn check_update(&mut self) {
        let l = self.layout;
        for c in 0..l.check_start.len() - 1 {
            let (s, t) = (l.check_start[c], l.check_start[c + 1]);
            let deg = t - s;
            self.scratch.clear();
            self.scratch.extend(self.v2c[s..t].iter().map(|&x| half_tanh(x)));
            // Exclusive products via a forward pass then a backward sweep.
            let mut prefix = 1.0;
            for i in 0..deg {
                self.c2v[s + i] = prefix;
                prefix *= self.scratch[i];
            }
            let mut suffix = 1.0;
            for i in (0..deg).rev() {
                let p = self.c2v[s + i] * suffix;
                suffix *= self.scratch[i];
                self.c2v[s + i] = twice_atanh(p).clamp(-LLR_MAX, LLR_MAX);
            }
        }
    }

    fn syndrome_ok(&self, hard: &[u8]) -> bool {
        let l = self.layout;
        (0..l.check_start.len() - 1).all(|c| {
            l.edge_var[l.check_start[c]..l.check_start[c + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ hard[v])
                == 0
        })
    }

    /// Run up to `max_iter` flooding iterations, stopping at the first zero syndrome.
    pub fn decode(&mut self, llr_in: &[f64], max_iter: usize) -> DecodeOutput {
        let l = self.layout;
        let n = l.n();
        assert_eq!(llr_in.len(), n, "LLR vector length must equal code length");
        let mut hard = vec![0u8; n];
        let mut ext: Vec<f64> = (0..n).map(|v| self.var_sum(v)).collect();
        let mut iterations = 0;
        let mut converged = false;
        for it in 1..=max_iter {
            iterations = it;
            for v in 0..n {
                let total = llr_in[v] + ext[v];
                for &e in &l.var_edges[l.var_start[v]..l.var_start[v + 1]] {
                    self.v2c[e] = (total - self.c2v[e]).clamp(-LLR_MAX, LLR_MAX);
                }
            }
            self.check_update();
            for v in 0..n {
                ext[v] = self.var_sum(v);
                hard[v] = u8::from(llr_in[v] + ext[v] < 0.0);
            }
            if self.syndrome_ok(&hard) {
                converged = true;
                break;
            }
        }
        if max_iter == 0 {
            for v in 0..n {
                hard[v] = u8::from(llr_in[v] + ext[v] < 0.0);
            }
            converged = self.syndrome_ok(&hard);
        }
        let llr_extrinsic: Vec<f64> = ext.iter().map(|x| x.clamp(-LLR_MAX, LLR_MAX)).collect();
        let llr_posterior = llr_in
            .iter()
            .zip(&llr_extrinsic)
            .map(|(a, b)| (a + b).clamp(-LLR_MAX, LLR_MAX))
            .collect();
        DecodeOutput {
            hard_bits: hard,
            llr_posterior,
            llr_extrinsic,
            iterations,
            converged,
        }
    }
}
