use num_complex::Complex64;

use super::OfftNetwork;
use crate::error::{domain, Result};
use crate::photonic::ComplexAmplitude;

/// Output streams of every bin, one sample per `T / N`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeTrace {
    pub sample_period: f64,
    /// Propagation delay common to all ports, not represented in the samples.
    pub latency: f64,
    pub per_port: Vec<Vec<ComplexAmplitude>>,
}

impl TimeTrace {
    pub fn len(&self) -> usize {
        self.per_port.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Runs `input` (time order, oldest first, spacing `T / N`) through the
/// network from a dark initial state.
///
/// At every index `m >= N - 1` the bin outputs equal `DFT(x[m], x[m-1], ...,
/// x[m-N+1]) / N` for the ideal design. Every delay in the network other
/// than the per-cell base delays must lie on the sample grid.
pub fn time_simulate(net: &OfftNetwork, input: &[ComplexAmplitude]) -> Result<TimeTrace> {
    let n = net.n_points();
    if input.len() < n {
        return Err(domain(format!(
            "input has {} samples, need at least N = {n}",
            input.len()
        )));
    }
    let (taps, latency) = net.impulse_taps()?;
    let per_port = taps
        .iter()
        .map(|h| {
            (0..input.len())
                .map(|m| {
                    h.iter()
                        .enumerate()
                        .take(m + 1)
                        .map(|(i, t)| t * input[m - i])
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect();
    Ok(TimeTrace {
        sample_period: net.sample_period(),
        latency,
        per_port,
    })
}

/// Gates the trace once per frame: sample `frame_offset + N - 1 + j N` of
/// every port, as an `N`-vector per complete frame.
pub fn sample_outputs(
    trace: &TimeTrace,
    frame_offset: usize,
) -> Result<Vec<Vec<ComplexAmplitude>>> {
    let n = trace.per_port.len();
    if frame_offset >= n {
        return Err(domain(format!(
            "frame offset {frame_offset} out of range 0..{n}"
        )));
    }
    Ok((frame_offset + n - 1..trace.len())
        .step_by(n)
        .map(|m| trace.per_port.iter().map(|port| port[m]).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{NetworkParams, StageOverride};
    use crate::oracle::dft;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ideal(n: usize) -> OfftNetwork {
        OfftNetwork::build(&NetworkParams::ideal(n, 10e9)).unwrap()
    }

    #[test]
    fn constant_input_exits_dc_port() {
        let trace = time_simulate(&ideal(4), &[c(1.0, 0.0); 12]).unwrap();
        for m in 3..12 {
            assert!((trace.per_port[0][m] - c(1.0, 0.0)).norm() < 1e-12);
            for k in 1..4 {
                assert!(trace.per_port[k][m].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_tone_hits_bin_one() {
        // newest-first window (1, j, -1, -j)
        let input = [c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)];
        let trace = time_simulate(&ideal(4), &input).unwrap();
        let frame = &sample_outputs(&trace, 0).unwrap()[0];
        assert!((frame[1].norm_sqr() - 1.0).abs() < 1e-12);
        for k in [0, 2, 3] {
            assert!(frame[k].norm() < 1e-12);
        }
    }

    #[test]
    fn frames_match_reference() {
        let net = ideal(8);
        let input: Vec<Complex64> = (0..40)
            .map(|i| c((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let trace = time_simulate(&net, &input).unwrap();
        let frames = sample_outputs(&trace, 0).unwrap();
        assert_eq!(frames.len(), 5);
        for (j, frame) in frames.iter().enumerate() {
            let m = 7 + 8 * j;
            let window: Vec<_> = (0..8).map(|i| input[m - i]).collect();
            for (out, bin) in frame.iter().zip(dft(&window)) {
                assert!((out - bin / 8.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sampler_edges() {
        let net = ideal(4);
        let trace = time_simulate(&net, &[c(0.0, 0.0); 6]).unwrap();
        assert!(sample_outputs(&trace, 4).is_err());
        assert!(sample_outputs(&trace, 3).unwrap().is_empty());
        let frames = sample_outputs(&trace, 2).unwrap();
        assert_eq!(frames.len(), 1);
        assert!(frames[0].iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn short_input_rejected() {
        assert!(time_simulate(&ideal(4), &[c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn off_grid_delay_rejected() {
        let mut p = NetworkParams::ideal(4, 10e9);
        p.stage_overrides.push(StageOverride {
            stage: 1,
            delay_offset: 3e-12,
            ..Default::default()
        });
        let net = OfftNetwork::build(&p).unwrap();
        assert!(time_simulate(&net, &[c(1.0, 0.0); 8]).is_err());
    }

    #[test]
    fn losses_scale_outputs() {
        let mut p = NetworkParams::ideal(4, 10e9);
        p.sampler_loss_db = 20.0;
        let trace = time_simulate(&OfftNetwork::build(&p).unwrap(), &[c(1.0, 0.0); 4]).unwrap();
        assert!((trace.per_port[0][3] - c(0.1, 0.0)).norm() < 1e-12);
    }
}
