//! The `N = 2^m` delayed-interferometer butterfly.
//!
//! Stage `s` (1-based) holds `2^(s-1)` cells with differential delay
//! `T / 2^s`. Cell `r` of stage `s` carries the twiddle phase
//! `-2 pi r / 2^s`; its cross output feeds cell `r` of the next stage and its
//! bar output feeds cell `r + 2^(s-1)`. In the last stage, cell `r` drives
//! physical ports `2r` (cross) and `2r + 1` (bar).
//!
//! Every public response is indexed by DFT bin, not by physical port: the
//! bin a physical port carries is found at build time by comparing the ideal
//! design's impulse responses with the reference DFT, and frozen into
//! [`OfftNetwork::port_map`]. Each physical output also gets a fixed phase
//! trim so that the ideal network reproduces `DFT / N` with zero global phase.

mod interferometer;
mod response;
mod time;

use serde::{Deserialize, Serialize};

pub use interferometer::{
    di_response, interference_angle, DelayedInterferometer, DiOutputs, DiPort,
};
pub use response::{
    auto_probe_frequencies, frequency_response, golden_section_max, peak_frequency,
    FrequencyResponse, DEGENERATE_POWER,
};
pub use time::{sample_outputs, time_simulate, TimeTrace};

use crate::error::{domain, OfftError, Result};
use crate::oracle::dft;
use crate::photonic::{length_to_delay, loss_amplitude, ComplexAmplitude, WaveguideContext};

use num_complex::Complex64;
use std::f64::consts::PI;

/// Tolerance, in samples, for a delay to count as lying on the sample grid.
const GRID_TOLERANCE: f64 = 1e-6;

/// Per-stage (or per-cell) deviations from the design.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageOverride {
    /// 1-based stage index.
    pub stage: usize,
    /// Restrict to one cell of the stage; all cells when absent.
    pub cell: Option<usize>,
    #[serde(rename = "phase_offset_rad")]
    pub phase_offset: f64,
    #[serde(rename = "delay_offset_s")]
    pub delay_offset: f64,
    pub long_arm_loss_db: f64,
    pub short_arm_loss_db: f64,
    pub coupler_in_kappa: Option<f64>,
    pub coupler_out_kappa: Option<f64>,
}

/// Everything needed to build an [`OfftNetwork`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkParams {
    pub n_points: usize,
    pub system_frequency_hz: f64,
    pub coupler_in_kappa: f64,
    pub coupler_out_kappa: f64,
    /// Short-arm length per stage; the last entry repeats for deeper stages.
    /// Each adds a delay `n_eff * L / c` common to both arms of the cell.
    pub short_arm_lengths_m: Vec<f64>,
    pub include_base_delay: bool,
    pub waveguide: WaveguideContext,
    pub fanout_loss_db_per_stage: f64,
    pub sampler_loss_db: f64,
    pub stage_overrides: Vec<StageOverride>,
}

impl Default for NetworkParams {
    /// The 4-point, 10 GHz chip with its 3.5 dB samplers.
    fn default() -> Self {
        Self {
            sampler_loss_db: 3.5,
            ..Self::ideal(4, 10e9)
        }
    }
}

impl NetworkParams {
    /// Balanced couplers, no loss anywhere, design phases and delays.
    pub fn ideal(n_points: usize, system_frequency_hz: f64) -> Self {
        Self {
            n_points,
            system_frequency_hz,
            coupler_in_kappa: 0.5,
            coupler_out_kappa: 0.5,
            short_arm_lengths_m: vec![500e-6, 440e-6],
            include_base_delay: true,
            waveguide: WaveguideContext::default(),
            fanout_loss_db_per_stage: 0.0,
            sampler_loss_db: 0.0,
            stage_overrides: Vec::new(),
        }
    }

    fn base_delay(&self, stage: usize) -> Result<f64> {
        if !self.include_base_delay || self.short_arm_lengths_m.is_empty() {
            return Ok(0.0);
        }
        let idx = (stage - 1).min(self.short_arm_lengths_m.len() - 1);
        length_to_delay(self.short_arm_lengths_m[idx], &self.waveguide)
    }
}

/// Number of stages of an `n`-point network; errors unless `n = 2^m`, `m >= 1`.
pub fn stage_count(n_points: usize) -> Result<usize> {
    if n_points < 2 || !n_points.is_power_of_two() {
        return Err(domain(format!(
            "N must be a power of two >= 2, got {n_points}"
        )));
    }
    Ok(n_points.trailing_zeros() as usize)
}

/// Which cell and output a signal traverses in one stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub cell: usize,
    pub port: DiPort,
}

/// Counts of the optical components in the butterfly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentCounts {
    pub interferometers: usize,
    pub couplers: usize,
}

impl ComponentCounts {
    pub fn for_points(n_points: usize) -> Result<Self> {
        stage_count(n_points)?;
        Ok(Self {
            interferometers: n_points - 1,
            couplers: 2 * (n_points - 1),
        })
    }
}

/// A built, immutable butterfly network.
#[derive(Clone, Debug, PartialEq)]
pub struct OfftNetwork {
    n_points: usize,
    system_frequency: f64,
    stages: Vec<Vec<DelayedInterferometer>>,
    fanout_loss_db_per_stage: f64,
    sampler_loss_db: f64,
    /// `port_map[physical] = bin`.
    port_map: Vec<usize>,
    /// `bin_to_port[bin] = physical`.
    bin_to_port: Vec<usize>,
    output_trim: Vec<f64>,
    routes: Vec<Vec<Hop>>,
}

impl OfftNetwork {
    pub fn build(params: &NetworkParams) -> Result<Self> {
        let m = stage_count(params.n_points)?;
        let fs = params.system_frequency_hz;
        if !(fs.is_finite() && fs > 0.0) {
            return Err(domain(format!("system frequency must be > 0, got {fs}")));
        }
        params.waveguide.validate()?;
        for (what, v) in [
            ("fan-out loss", params.fanout_loss_db_per_stage),
            ("sampler loss", params.sampler_loss_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{what} must be >= 0, got {v}")));
            }
        }

        let design = design_stages(params.n_points, fs);
        let routes = routes(m);
        let (port_map, output_trim) = calibrate(params.n_points, fs, &design, &routes)?;
        let mut bin_to_port = vec![0; params.n_points];
        for (port, &bin) in port_map.iter().enumerate() {
            bin_to_port[bin] = port;
        }

        let mut stages = design;
        for (s, cells) in stages.iter_mut().enumerate() {
            let base = params.base_delay(s + 1)?;
            for cell in cells.iter_mut() {
                cell.coupler_in_kappa = params.coupler_in_kappa;
                cell.coupler_out_kappa = params.coupler_out_kappa;
                cell.common_base_delay = base;
            }
        }
        for o in &params.stage_overrides {
            if o.stage == 0 || o.stage > m {
                return Err(OfftError::Locator(format!(
                    "stage {} (network has stages 1..={m})",
                    o.stage
                )));
            }
            let cells = &mut stages[o.stage - 1];
            let range = match o.cell {
                Some(c) if c >= cells.len() => {
                    return Err(OfftError::Locator(format!(
                        "cell {c} of stage {} (stage has {} cells)",
                        o.stage,
                        cells.len()
                    )))
                }
                Some(c) => c..c + 1,
                None => 0..cells.len(),
            };
            for cell in &mut cells[range] {
                cell.static_phase += o.phase_offset;
                cell.arm_delay_long += o.delay_offset;
                cell.arm_loss_long_db += o.long_arm_loss_db;
                cell.arm_loss_short_db += o.short_arm_loss_db;
                if let Some(k) = o.coupler_in_kappa {
                    cell.coupler_in_kappa = k;
                }
                if let Some(k) = o.coupler_out_kappa {
                    cell.coupler_out_kappa = k;
                }
            }
        }

        let net = Self {
            n_points: params.n_points,
            system_frequency: fs,
            stages,
            fanout_loss_db_per_stage: params.fanout_loss_db_per_stage,
            sampler_loss_db: params.sampler_loss_db,
            port_map,
            bin_to_port,
            output_trim,
            routes,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        for (s, cells) in self.stages.iter().enumerate() {
            for (c, cell) in cells.iter().enumerate() {
                cell.validate()
                    .map_err(|e| domain(format!("stage {} cell {c}: {e}", s + 1)))?;
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn system_frequency(&self) -> f64 {
        self.system_frequency
    }

    /// Frame period `T = 1 / f_s`.
    pub fn frame_period(&self) -> f64 {
        1.0 / self.system_frequency
    }

    /// Tap spacing `T / N` of the equivalent FIR system.
    pub fn sample_period(&self) -> f64 {
        self.frame_period() / self.n_points as f64
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn stages(&self) -> &[Vec<DelayedInterferometer>] {
        &self.stages
    }

    /// Cell `cell` of 1-based stage `stage`.
    pub fn cell(&self, stage: usize, cell: usize) -> Result<&DelayedInterferometer> {
        stage
            .checked_sub(1)
            .and_then(|s| self.stages.get(s))
            .and_then(|cells| cells.get(cell))
            .ok_or_else(|| {
                OfftError::Locator(format!(
                    "stage {stage} cell {cell} (network has {} stages, stage s has 2^(s-1) cells)",
                    self.stages.len()
                ))
            })
    }

    /// A copy with one cell modified and re-validated.
    pub fn with_cell(
        &self,
        stage: usize,
        cell: usize,
        edit: impl FnOnce(&mut DelayedInterferometer),
    ) -> Result<Self> {
        self.cell(stage, cell)?;
        let mut next = self.clone();
        edit(&mut next.stages[stage - 1][cell]);
        next.stages[stage - 1][cell]
            .validate()
            .map_err(|e| domain(format!("stage {stage} cell {cell}: {e}")))?;
        Ok(next)
    }

    /// A copy with every cell of every stage passed through `edit(stage, cell)`.
    pub fn with_cells(
        &self,
        mut edit: impl FnMut(usize, &mut DelayedInterferometer),
    ) -> Result<Self> {
        let mut next = self.clone();
        for (s, cells) in next.stages.iter_mut().enumerate() {
            for cell in cells.iter_mut() {
                edit(s + 1, cell);
            }
        }
        next.validate()?;
        Ok(next)
    }

    pub fn fanout_loss_db_per_stage(&self) -> f64 {
        self.fanout_loss_db_per_stage
    }

    pub fn sampler_loss_db(&self) -> f64 {
        self.sampler_loss_db
    }

    /// `port_map()[physical_port]` is the DFT bin that port carries.
    pub fn port_map(&self) -> &[usize] {
        &self.port_map
    }

    pub fn physical_port(&self, bin: usize) -> usize {
        self.bin_to_port[bin]
    }

    /// Fixed output phase trims, radians, by physical port.
    pub fn output_trim(&self) -> &[f64] {
        &self.output_trim
    }

    /// Cells traversed from the input to physical port `port`.
    pub fn route(&self, port: usize) -> &[Hop] {
        &self.routes[port]
    }

    /// Reorders a bin-indexed vector into physical port order.
    pub fn to_physical_order<T: Clone>(&self, by_bin: &[T]) -> Vec<T> {
        self.port_map
            .iter()
            .map(|&bin| by_bin[bin].clone())
            .collect()
    }

    pub fn component_counts(&self) -> ComponentCounts {
        let interferometers = self.stages.iter().map(Vec::len).sum();
        ComponentCounts {
            interferometers,
            couplers: 2 * interferometers,
        }
    }

    /// Field gain shared by every port: fan-out tree and sampler.
    fn lumped_gain(&self) -> f64 {
        loss_amplitude(
            self.fanout_loss_db_per_stage * self.stages.len() as f64 + self.sampler_loss_db,
        )
    }

    /// Complex response of DFT bin `bin` at `frequency`.
    pub fn bin_response(&self, bin: usize, frequency: f64) -> Result<ComplexAmplitude> {
        if bin >= self.n_points {
            return Err(domain(format!(
                "port {bin} out of range 0..{}",
                self.n_points
            )));
        }
        let port = self.bin_to_port[bin];
        let mut h = Complex64::from_polar(self.lumped_gain(), self.output_trim[port]);
        for (s, hop) in self.routes[port].iter().enumerate() {
            h *= self.stages[s][hop.cell].response(frequency)?.get(hop.port);
        }
        Ok(h)
    }

    /// Responses of all bins at one frequency, evaluating each cell once.
    pub fn all_bin_responses(&self, frequency: f64) -> Result<Vec<ComplexAmplitude>> {
        let cell_out: Vec<Vec<DiOutputs>> = self
            .stages
            .iter()
            .map(|cells| {
                cells
                    .iter()
                    .map(|c| c.response(frequency))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let gain = self.lumped_gain();
        Ok((0..self.n_points)
            .map(|bin| {
                let port = self.bin_to_port[bin];
                self.routes[port].iter().enumerate().fold(
                    Complex64::from_polar(gain, self.output_trim[port]),
                    |h, (s, hop)| h * cell_out[s][hop.cell].get(hop.port),
                )
            })
            .collect())
    }

    /// Impulse-response taps of every bin on the `T / N` grid, plus the
    /// latency (s) removed from all of them.
    pub fn impulse_taps(&self) -> Result<(Vec<Vec<ComplexAmplitude>>, f64)> {
        let dt = self.sample_period();
        let to_samples = |delay: f64| -> Result<usize> {
            let x = delay / dt;
            let r = x.round();
            if (x - r).abs() > GRID_TOLERANCE || r < 0.0 {
                return Err(domain(format!(
                    "delay {delay:e} s is not a multiple of the {dt:e} s sample period"
                )));
            }
            Ok(r as usize)
        };
        let latencies: Vec<f64> = self
            .routes
            .iter()
            .map(|route| {
                route
                    .iter()
                    .enumerate()
                    .map(|(s, hop)| self.stages[s][hop.cell].common_base_delay)
                    .sum()
            })
            .collect();
        let latency = latencies.iter().copied().fold(f64::INFINITY, f64::min);
        let gain = self.lumped_gain();

        let mut by_port = Vec::with_capacity(self.n_points);
        for (port, route) in self.routes.iter().enumerate() {
            let mut taps = vec![Complex64::new(0.0, 0.0); to_samples(latencies[port] - latency)?];
            taps.push(Complex64::from_polar(gain, self.output_trim[port]));
            for (s, hop) in route.iter().enumerate() {
                let paths = self.stages[s][hop.cell].paths(hop.port);
                let shifts = [to_samples(paths[0].delay)?, to_samples(paths[1].delay)?];
                let mut next =
                    vec![Complex64::new(0.0, 0.0); taps.len() + shifts[0].max(shifts[1])];
                for (path, &shift) in paths.iter().zip(&shifts) {
                    for (i, &t) in taps.iter().enumerate() {
                        next[i + shift] += path.coefficient * t;
                    }
                }
                taps = next;
            }
            by_port.push(taps);
        }
        let by_bin = (0..self.n_points)
            .map(|bin| by_port[self.bin_to_port[bin]].clone())
            .collect();
        Ok((by_bin, latency))
    }
}

fn design_stages(n_points: usize, fs: f64) -> Vec<Vec<DelayedInterferometer>> {
    let m = n_points.trailing_zeros() as usize;
    let period = 1.0 / fs;
    (1..=m)
        .map(|s| {
            let span = 1usize << s;
            let delay = period / span as f64;
            (0..span / 2)
                .map(|r| DelayedInterferometer::ideal(delay, -2.0 * PI * r as f64 / span as f64))
                .collect()
        })
        .collect()
}

fn routes(m: usize) -> Vec<Vec<Hop>> {
    let n = 1usize << m;
    (0..n)
        .map(|port| {
            let mut hops = vec![
                Hop {
                    cell: port / 2,
                    port: if port % 2 == 0 {
                        DiPort::Cross
                    } else {
                        DiPort::Bar
                    }
                };
                m
            ];
            for s in (1..m).rev() {
                // parent of cell q in stage s+1 (1-based) lives in stage s
                let q = hops[s].cell;
                let half = 1usize << (s - 1);
                hops[s - 1] = Hop {
                    cell: q % half,
                    port: if q < half { DiPort::Cross } else { DiPort::Bar },
                };
            }
            hops
        })
        .collect()
}

/// Matches each physical port of the ideal design to a reference DFT bin via
/// its impulse response, returning the port map and the phase trims.
fn calibrate(
    n_points: usize,
    fs: f64,
    design: &[Vec<DelayedInterferometer>],
    routes: &[Vec<Hop>],
) -> Result<(Vec<usize>, Vec<f64>)> {
    let probe = OfftNetwork {
        n_points,
        system_frequency: fs,
        stages: design.to_vec(),
        fanout_loss_db_per_stage: 0.0,
        sampler_loss_db: 0.0,
        port_map: (0..n_points).collect(),
        bin_to_port: (0..n_points).collect(),
        output_trim: vec![0.0; n_points],
        routes: routes.to_vec(),
    };
    let (taps, _) = probe.impulse_taps()?;
    // rows of the reference DFT matrix, one basis window at a time
    let basis: Vec<Vec<Complex64>> = (0..n_points)
        .map(|i| {
            let mut e = vec![Complex64::new(0.0, 0.0); n_points];
            e[i] = Complex64::new(1.0, 0.0);
            dft(&e)
        })
        .collect();

    let mut port_map = vec![usize::MAX; n_points];
    let mut trim = vec![0.0; n_points];
    let mut used = vec![false; n_points];
    for (port, h) in taps.iter().enumerate() {
        if h.len() > n_points {
            return Err(domain("ideal design is longer than one frame"));
        }
        let (bin, corr) = (0..n_points)
            .map(|k| {
                let c: Complex64 = h
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t * basis[i][k].conj())
                    .sum();
                (k, c)
            })
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("n_points >= 2");
        if used[bin] || (corr.norm() - 1.0).abs() > 1e-9 {
            return Err(domain(format!(
                "port {port} does not reproduce a single DFT bin"
            )));
        }
        used[bin] = true;
        port_map[port] = bin;
        trim[port] = -corr.arg();
    }
    Ok((port_map, trim))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_design() {
        let net = OfftNetwork::build(&NetworkParams::ideal(4, 10e9)).unwrap();
        assert_eq!(net.stage_count(), 2);
        let s1 = net.cell(1, 0).unwrap();
        assert!((s1.arm_delay_long - 50e-12).abs() < 1e-24);
        assert_eq!(s1.static_phase, 0.0);
        let s2: Vec<_> = net.stages()[1]
            .iter()
            .map(|c| (c.arm_delay_long, c.static_phase))
            .collect();
        assert!((s2[0].0 - 25e-12).abs() < 1e-24 && (s2[1].0 - 25e-12).abs() < 1e-24);
        assert_eq!(s2[0].1, 0.0);
        assert!((s2[1].1 + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_is_one_cell() {
        let net = OfftNetwork::build(&NetworkParams::ideal(2, 3e9)).unwrap();
        assert_eq!(
            net.component_counts(),
            ComponentCounts {
                interferometers: 1,
                couplers: 2
            }
        );
        let c = net.cell(1, 0).unwrap();
        assert!((c.arm_delay_long - 1.0 / 6e9).abs() < 1e-24);
        assert_eq!(c.static_phase, 0.0);
    }

    #[test]
    fn eight_point_twiddles() {
        let net = OfftNetwork::build(&NetworkParams::ideal(8, 10e9)).unwrap();
        let phases: Vec<f64> = net.stages()[2].iter().map(|c| c.static_phase).collect();
        let expected = [0.0, -PI / 4.0, -PI / 2.0, -3.0 * PI / 4.0];
        for (p, e) in phases.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn counts_and_permutation() {
        for n in [2, 4, 8, 16, 32] {
            let net = OfftNetwork::build(&NetworkParams::ideal(n, 10e9)).unwrap();
            assert_eq!(
                net.component_counts(),
                ComponentCounts::for_points(n).unwrap()
            );
            assert_eq!(net.component_counts().interferometers, n - 1);
            let mut seen = net.port_map().to_vec();
            seen.sort_unstable();
            assert_eq!(seen, (0..n).collect::<Vec<_>>());
            for (s, cells) in net.stages().iter().enumerate() {
                assert_eq!(cells.len(), 1 << s);
                for c in cells {
                    assert!((c.arm_delay_long - 1e-10 / (1u64 << (s + 1)) as f64).abs() < 1e-24);
                }
            }
        }
    }

    #[test]
    fn port_map_is_the_analytic_interleave() {
        // cross of last-stage cell r carries bin r, bar carries r + N/2
        for n in [2, 4, 8, 16] {
            let net = OfftNetwork::build(&NetworkParams::ideal(n, 10e9)).unwrap();
            for (port, &bin) in net.port_map().iter().enumerate() {
                let expected = port / 2 + if port % 2 == 0 { 0 } else { n / 2 };
                assert_eq!(bin, expected, "N={n} port {port}");
            }
        }
    }

    #[test]
    fn invalid_sizes() {
        for n in [0, 1, 3, 6, 12] {
            assert!(OfftNetwork::build(&NetworkParams::ideal(n, 10e9)).is_err());
        }
        assert!(OfftNetwork::build(&NetworkParams::ideal(4, 0.0)).is_err());
    }

    #[test]
    fn overrides_apply_and_locate() {
        let mut p = NetworkParams::ideal(4, 10e9);
        p.stage_overrides.push(StageOverride {
            stage: 2,
            cell: Some(1),
            phase_offset: 0.1,
            long_arm_loss_db: 1.0,
            ..Default::default()
        });
        let net = OfftNetwork::build(&p).unwrap();
        let c = net.cell(2, 1).unwrap();
        assert!((c.static_phase - (-PI / 2.0 + 0.1)).abs() < 1e-15);
        assert_eq!(c.arm_loss_long_db, 1.0);
        assert_eq!(net.cell(2, 0).unwrap().arm_loss_long_db, 0.0);

        p.stage_overrides[0].stage = 3;
        assert!(matches!(OfftNetwork::build(&p), Err(OfftError::Locator(_))));
        p.stage_overrides[0].stage = 1;
        p.stage_overrides[0].cell = Some(1);
        assert!(matches!(OfftNetwork::build(&p), Err(OfftError::Locator(_))));
    }

    #[test]
    fn base_delay_follows_short_arms() {
        let net = OfftNetwork::build(&NetworkParams::ideal(8, 10e9)).unwrap();
        let b: Vec<f64> = net
            .stages()
            .iter()
            .map(|c| c[0].common_base_delay)
            .collect();
        assert!((b[0] - 2.5 * 500e-6 / 3e8).abs() < 1e-24);
        assert!((b[1] - 2.5 * 440e-6 / 3e8).abs() < 1e-24);
        assert_eq!(b[1], b[2]);
        let mut p = NetworkParams::ideal(4, 10e9);
        p.include_base_delay = false;
        let net = OfftNetwork::build(&p).unwrap();
        assert!(net
            .stages()
            .iter()
            .flatten()
            .all(|c| c.common_base_delay == 0.0));
    }
}
