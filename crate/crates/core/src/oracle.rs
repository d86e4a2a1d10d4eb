//! Brute-force reference DFT and output-port matching.
//!
//! The forward convention `X_k = sum_n x_n exp(-j 2 pi k n / N)` is fixed
//! here; the rest of the crate defers to it. Nothing in this module may use
//! a fast algorithm.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::photonic::ComplexAmplitude;

/// Largest size for which [`match_ports`] enumerates every permutation.
pub const EXHAUSTIVE_MATCH_LIMIT: usize = 8;

/// Direct O(N^2) forward DFT.
pub fn dft(x: &[ComplexAmplitude]) -> Vec<ComplexAmplitude> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &xi)| {
                    // reduce k*i mod n before scaling to keep the twiddle angle small
                    let angle = -2.0 * PI * ((k * i) % n) as f64 / n as f64;
                    xi * Complex64::from_polar(1.0, angle)
                })
                .sum()
        })
        .collect()
}

/// Assignment of network output ports to DFT bins.
#[derive(Clone, Debug, PartialEq)]
pub struct PortMatch {
    /// `permutation[port]` is the DFT bin carried by `port`.
    pub permutation: Vec<usize>,
    /// Phase `psi` with `outputs[p] ~ exp(j psi) * bins[permutation[p]] / N`.
    pub global_phase: f64,
    /// Largest absolute deviation, in output units.
    pub residual: f64,
}

impl PortMatch {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Finds the port-to-bin bijection and single global phase that best align
/// `outputs` with `bins / N`.
///
/// Exhaustive for `N <= 8`; larger sizes pair ports and bins by magnitude and
/// report whatever residual that assignment leaves.
pub fn match_ports(outputs: &[ComplexAmplitude], bins: &[ComplexAmplitude]) -> Result<PortMatch> {
    let n = bins.len();
    if outputs.len() != n {
        return Err(domain(format!(
            "length mismatch: {} outputs against {} bins",
            outputs.len(),
            n
        )));
    }
    if bins.iter().all(|b| b.norm_sqr() == 0.0) {
        return Err(domain("at least one reference bin must be nonzero"));
    }
    let scaled: Vec<_> = bins.iter().map(|b| b / n as f64).collect();

    if n <= EXHAUSTIVE_MATCH_LIMIT {
        let mut best: Option<PortMatch> = None;
        for_each_permutation(n, |perm| {
            let (phase, residual) = fit(outputs, &scaled, perm);
            if best.as_ref().is_none_or(|b| residual < b.residual) {
                best = Some(PortMatch {
                    permutation: perm.to_vec(),
                    global_phase: phase,
                    residual,
                });
            }
        });
        Ok(best.expect("at least one permutation"))
    } else {
        let mut by_output: Vec<usize> = (0..n).collect();
        let mut by_bin: Vec<usize> = (0..n).collect();
        by_output.sort_by(|&a, &b| outputs[a].norm().total_cmp(&outputs[b].norm()));
        by_bin.sort_by(|&a, &b| scaled[a].norm().total_cmp(&scaled[b].norm()));
        let mut perm = vec![0; n];
        for (&p, &k) in by_output.iter().zip(&by_bin) {
            perm[p] = k;
        }
        let (phase, residual) = fit(outputs, &scaled, &perm);
        Ok(PortMatch {
            permutation: perm,
            global_phase: phase,
            residual,
        })
    }
}

/// Least-squares global phase for a fixed assignment, and the max residual.
fn fit(outputs: &[Complex64], scaled: &[Complex64], perm: &[usize]) -> (f64, f64) {
    let corr: Complex64 = outputs
        .iter()
        .zip(perm)
        .map(|(o, &k)| o * scaled[k].conj())
        .sum();
    let phase = if corr.norm() > 0.0 { corr.arg() } else { 0.0 };
    let rot = Complex64::from_polar(1.0, phase);
    let residual = outputs
        .iter()
        .zip(perm)
        .map(|(o, &k)| (o - rot * scaled[k]).norm())
        .fold(0.0, f64::max);
    (phase, residual)
}

/// Heap's algorithm; the identity is visited first.
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
