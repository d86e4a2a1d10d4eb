//! Loss, power and area budget of an `N`-point transform, its figure of merit
//! (transforms per second per watt per mm²) and the comparison against an
//! electronic FFT on a GPU.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::network::{stage_count, ComponentCounts};

/// Component losses and photodetector requirements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossBudget {
    pub coupler_db: f64,
    pub ybranch_db: f64,
    pub modulator_db: f64,
    /// Spiral loss of the first stage; later stages scale with length.
    pub spiral_first_stage_db: f64,
    /// Electrical power per photodetector, W.
    pub pd_power_w: f64,
    /// Minimum optical power needed at a photodetector, W.
    pub pd_min_optical_w: f64,
}

impl Default for LossBudget {
    fn default() -> Self {
        Self {
            coupler_db: 0.9,
            ybranch_db: 3.5,
            modulator_db: 3.5,
            spiral_first_stage_db: 0.7,
            pd_power_w: 2.4e-6,
            pd_min_optical_w: 250e-6,
        }
    }
}

impl LossBudget {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("coupler_db", self.coupler_db),
            ("ybranch_db", self.ybranch_db),
            ("modulator_db", self.modulator_db),
            ("spiral_first_stage_db", self.spiral_first_stage_db),
            ("pd_power_w", self.pd_power_w),
            ("pd_min_optical_w", self.pd_min_optical_w),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Electronic reference. Defaults are NVIDIA P100 (PCIe) datasheet figures:
/// 9.3 TFLOP/s single precision, 250 W board power, 610 mm² die.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpuBaseline {
    pub flops: f64,
    pub power_w: f64,
    pub area_mm2: f64,
}

impl Default for GpuBaseline {
    fn default() -> Self {
        Self {
            flops: 9.3e12,
            power_w: 250.0,
            area_mm2: 610.0,
        }
    }
}

impl GpuBaseline {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("flops", self.flops),
            ("power_w", self.power_w),
            ("area_mm2", self.area_mm2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!(
                    "GPU {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Operations for one `N`-point FFT, `5 N log2 N`.
    pub fn flop_count(n_points: usize) -> Result<f64> {
        let m = stage_count(n_points)?;
        Ok(5.0 * n_points as f64 * m as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreaModel {
    /// Spiral area for a delay of one frame `T` at the reference rate, mm².
    pub spiral_area_t_mm2: f64,
    /// Whole-chip area of the passive `N = 4` design, mm².
    pub base_area_n4_mm2: f64,
    /// Whole-chip area of the `N = 4` design with heaters, mm².
    pub base_area_n4_active_mm2: f64,
    /// Use the design with heaters.
    pub active: bool,
    /// Shrink spirals as `reference_frequency_hz / f_s`.
    pub scale_with_frequency: bool,
    pub reference_frequency_hz: f64,
}

impl Default for AreaModel {
    fn default() -> Self {
        Self {
            spiral_area_t_mm2: 3.9e-3,
            base_area_n4_mm2: 0.012,
            base_area_n4_active_mm2: 0.019,
            active: true,
            scale_with_frequency: false,
            reference_frequency_hz: 10e9,
        }
    }
}

impl AreaModel {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("spiral_area_t_mm2", self.spiral_area_t_mm2),
            ("base_area_n4_mm2", self.base_area_n4_mm2),
            ("base_area_n4_active_mm2", self.base_area_n4_active_mm2),
            ("reference_frequency_hz", self.reference_frequency_hz),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.base_n4() <= self.spiral_area_t_mm2 {
            return Err(domain("N = 4 area must exceed its own spiral area"));
        }
        Ok(())
    }

    fn base_n4(&self) -> f64 {
        if self.active {
            self.base_area_n4_active_mm2
        } else {
            self.base_area_n4_mm2
        }
    }

    /// Area not taken by spirals, from the `N = 4` calibration.
    pub fn fixed_overhead_mm2(&self) -> f64 {
        // the N = 4 design holds spirals of T/2 + 2 x T/4 = T
        self.base_n4() - self.spiral_area_t_mm2
    }
}

/// `log2 N` y-branches, two couplers per stage, one spiral per stage with loss
/// halving along with its length, and one modulator.
pub fn path_insertion_loss(n_points: usize, budget: &LossBudget) -> Result<f64> {
    budget.validate()?;
    let m = stage_count(n_points)?;
    let spirals: f64 = (1..=m)
        .map(|s| budget.spiral_first_stage_db * 2f64.powi(1 - s as i32))
        .sum();
    Ok(m as f64 * budget.ybranch_db
        + 2.0 * m as f64 * budget.coupler_db
        + spirals
        + budget.modulator_db)
}

/// Laser power so that every photodetector receives its minimum, W.
pub fn required_input_power(n_points: usize, budget: &LossBudget) -> Result<f64> {
    let loss = path_insertion_loss(n_points, budget)?;
    Ok(budget.pd_min_optical_w * 10f64.powf(loss / 10.0))
}

/// Chip area, mm²: fixed overhead plus every cell's spiral, which is linear in
/// its delay. Each stage's spirals add up to a delay of `T / 2`.
pub fn area_scaling(n_points: usize, area: &AreaModel, system_frequency_hz: f64) -> Result<f64> {
    area.validate()?;
    let m = stage_count(n_points)?;
    let mut per_stage = area.spiral_area_t_mm2 / 2.0;
    if area.scale_with_frequency {
        check_frequency(system_frequency_hz)?;
        per_stage *= area.reference_frequency_hz / system_frequency_hz;
    }
    Ok(area.fixed_overhead_mm2() + m as f64 * per_stage)
}

fn check_frequency(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "system frequency must be finite and > 0, got {f}"
        )))
    }
}

/// One transform per frame: `f_s / ((P_laser + N P_pd) * area)`.
pub fn offt_figure_of_merit(
    n_points: usize,
    budget: &LossBudget,
    area: &AreaModel,
    system_frequency_hz: f64,
) -> Result<f64> {
    check_frequency(system_frequency_hz)?;
    let power = required_input_power(n_points, budget)? + n_points as f64 * budget.pd_power_w;
    let mm2 = area_scaling(n_points, area, system_frequency_hz)?;
    Ok(system_frequency_hz / (power * mm2))
}

pub fn gpu_figure_of_merit(n_points: usize, gpu: &GpuBaseline) -> Result<f64> {
    gpu.validate()?;
    let rate = gpu.flops / GpuBaseline::flop_count(n_points)?;
    Ok(rate / (gpu.power_w * gpu.area_mm2))
}

/// Every knob of the comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingModel {
    pub budget: LossBudget,
    pub area: AreaModel,
    pub gpu: GpuBaseline,
    pub system_frequency_hz: f64,
}

impl Default for ScalingModel {
    fn default() -> Self {
        Self {
            budget: LossBudget::default(),
            area: AreaModel::default(),
            gpu: GpuBaseline::default(),
            system_frequency_hz: 10e9,
        }
    }
}

impl ScalingModel {
    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        self.area.validate()?;
        self.gpu.validate()?;
        check_frequency(self.system_frequency_hz)
    }

    pub fn row(&self, n_points: usize) -> Result<ScalingRow> {
        let offt_fom =
            offt_figure_of_merit(n_points, &self.budget, &self.area, self.system_frequency_hz)?;
        let gpu_fom = gpu_figure_of_merit(n_points, &self.gpu)?;
        Ok(ScalingRow {
            n_points,
            path_loss_db: path_insertion_loss(n_points, &self.budget)?,
            input_power_w: required_input_power(n_points, &self.budget)?,
            area_mm2: area_scaling(n_points, &self.area, self.system_frequency_hz)?,
            offt_fom,
            gpu_fom,
            ratio: offt_fom / gpu_fom,
        })
    }

    /// Rows for `N = 2, 4, ..., n_max`.
    pub fn table(&self, n_max: usize) -> Result<Vec<ScalingRow>> {
        let m_max = stage_count(n_max)?;
        (1..=m_max).map(|m| self.row(1 << m)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n_points: usize,
    pub path_loss_db: f64,
    pub input_power_w: f64,
    pub area_mm2: f64,
    pub offt_fom: f64,
    pub gpu_fom: f64,
    /// `offt_fom / gpu_fom`.
    pub ratio: f64,
}

/// Largest size searched for a crossover.
pub const CROSSOVER_SEARCH_LIMIT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossoverReport {
    /// Smallest power of two at which the GPU is at least as good.
    pub n_star: Option<usize>,
    /// Crossing point interpolated on log FOM against `log2 N`.
    pub continuous: Option<f64>,
    /// Ratio at `N = 4`.
    pub ratio_n4: f64,
}

pub fn crossover_n(model: &ScalingModel) -> Result<CrossoverReport> {
    model.validate()?;
    let first = model.row(2)?;
    if first.ratio <= 1.0 {
        return Err(domain(format!(
            "the optical design does not win at N = 2 (ratio {})",
            first.ratio
        )));
    }
    let ratio_n4 = model.row(4)?.ratio;
    let mut prev = first;
    let m_max = stage_count(CROSSOVER_SEARCH_LIMIT)?;
    for m in 2..=m_max {
        let row = model.row(1 << m)?;
        if row.ratio <= 1.0 {
            let (a, b) = (prev.ratio.ln(), row.ratio.ln());
            let log2_n = (m - 1) as f64 + a / (a - b);
            return Ok(CrossoverReport {
                n_star: Some(1 << m),
                continuous: Some(log2_n.exp2()),
                ratio_n4,
            });
        }
        prev = row;
    }
    Ok(CrossoverReport {
        n_star: None,
        continuous: None,
        ratio_n4,
    })
}

/// `bits_per_symbol * bandwidth * n_channels`, bit/s.
pub fn channel_capacity(bits_per_symbol: u32, bandwidth_hz: f64, n_channels: usize) -> Result<f64> {
    if bits_per_symbol == 0 {
        return Err(domain("bits per symbol must be >= 1"));
    }
    if !(bandwidth_hz.is_finite() && bandwidth_hz >= 0.0) {
        return Err(domain(format!(
            "bandwidth must be finite and >= 0, got {bandwidth_hz}"
        )));
    }
    Ok(bits_per_symbol as f64 * bandwidth_hz * n_channels as f64)
}

/// Interferometer and coupler count of an `N`-point design.
pub fn component_counts(n_points: usize) -> Result<ComponentCounts> {
    ComponentCounts::for_points(n_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn path_loss_examples() {
        let b = LossBudget::default();
        assert!((path_insertion_loss(4, &b).unwrap() - 15.15).abs() < 1e-12);
        assert!((path_insertion_loss(2, &b).unwrap() - 9.5).abs() < 1e-12);
        assert!((path_insertion_loss(8, &b).unwrap() - 20.625).abs() < 1e-12);
        let zero = LossBudget {
            coupler_db: 0.0,
            ybranch_db: 0.0,
            modulator_db: 0.0,
            spiral_first_stage_db: 0.0,
            ..b
        };
        assert_eq!(path_insertion_loss(64, &zero).unwrap(), 0.0);
        assert!(path_insertion_loss(6, &LossBudget::default()).is_err());
    }

    #[test]
    fn input_power_examples() {
        let b = LossBudget::default();
        assert!(
            rel(
                required_input_power(4, &b).unwrap(),
                250e-6 * 10f64.powf(1.515)
            ) < 1e-12
        );
        assert!((required_input_power(4, &b).unwrap() - 8.18e-3).abs() < 1e-5);
    }

    #[test]
    fn area_examples() {
        let mut a = AreaModel::default();
        assert!((area_scaling(4, &a, 10e9).unwrap() - 0.019).abs() < 1e-15);
        a.active = false;
        assert!((area_scaling(4, &a, 10e9).unwrap() - 0.012).abs() < 1e-15);
        let grows: Vec<f64> = (1..12)
            .map(|m| area_scaling(1 << m, &a, 10e9).unwrap())
            .collect();
        assert!(grows.windows(2).all(|w| w[1] > w[0]));
        a.scale_with_frequency = true;
        let fast = area_scaling(4, &a, 20e9).unwrap();
        assert!((fast - (0.012 - 3.9e-3 / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn golden_figures_of_merit() {
        let m = ScalingModel::default();
        let offt = offt_figure_of_merit(4, &m.budget, &m.area, 10e9).unwrap();
        let power = 250e-6 * 10f64.powf(1.515) + 4.0 * 2.4e-6;
        assert!(rel(offt, 10e9 / (power * 0.019)) < 1e-12);
        assert!(rel(offt, 6.42388e13) < 1e-5, "{offt}");
        let gpu = gpu_figure_of_merit(4, &m.gpu).unwrap();
        assert!(rel(gpu, 9.3e12 / 40.0 / (250.0 * 610.0)) < 1e-12);
        let double = GpuBaseline {
            flops: 2.0 * m.gpu.flops,
            ..m.gpu.clone()
        };
        assert!(rel(gpu_figure_of_merit(4, &double).unwrap(), 2.0 * gpu) < 1e-12);
        let doubled = offt_figure_of_merit(4, &m.budget, &m.area, 20e9).unwrap();
        assert!(rel(doubled, 2.0 * offt) < 1e-12);
    }

    #[test]
    fn ratios_fall_with_size() {
        let t = ScalingModel::default().table(1 << 12).unwrap();
        assert_eq!(t.len(), 12);
        assert!(t
            .windows(2)
            .all(|w| w[1].ratio < w[0].ratio && w[1].gpu_fom < w[0].gpu_fom));
        assert!(t.windows(2).all(|w| w[1].offt_fom < w[0].offt_fom));
    }

    #[test]
    fn crossover_limits() {
        let mut m = ScalingModel::default();
        m.gpu.power_w = 1e-30;
        assert!(crossover_n(&m).is_err());
        m.gpu.power_w = 1e30;
        let r = crossover_n(&m).unwrap();
        assert!(r.n_star.is_none() && r.continuous.is_none());
        // a GPU just good enough to tie somewhere in the middle
        let mut m = ScalingModel::default();
        let target = m.row(64).unwrap().ratio;
        m.gpu.flops *= target;
        let r = crossover_n(&m).unwrap();
        assert_eq!(r.n_star, Some(64));
        assert!((r.continuous.unwrap() - 64.0).abs() < 1e-6);
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(channel_capacity(8, 10e9, 1).unwrap(), 80e9);
        assert_eq!(channel_capacity(8, 10e9, 4).unwrap(), 320e9);
        assert_eq!(channel_capacity(1, 10e9, 1).unwrap(), 10e9);
        assert!(channel_capacity(0, 10e9, 1).is_err());
    }

    #[test]
    fn counts_match_network() {
        let c = component_counts(16).unwrap();
        assert_eq!((c.interferometers, c.couplers), (15, 30));
    }
}
