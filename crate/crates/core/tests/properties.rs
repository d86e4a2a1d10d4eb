//! Randomised invariants of the simulator. The four conservation and
//! linearity suites run 250 cases each.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use offt::network::{
    auto_probe_frequencies, frequency_response, sample_outputs, time_simulate,
    DelayedInterferometer, DiPort, NetworkParams, OfftNetwork, StageOverride,
};
use offt::oracle::{dft, match_ports};
use offt::photonic::coupler_matrix;
use offt::scaling::{path_insertion_loss, LossBudget, ScalingModel};
use offt::sensitivity::{
    analytic_extinction_ratio, di_extinction_ratio, leakage_ratio, perturb, run_sweep,
    LeakageMetric, Locator, ProbeSpec, SweepParameter, SweepSpec,
};
use proptest::prelude::*;

fn sizes() -> impl Strategy<Value = usize> {
    prop_oneof![Just(2usize), Just(4), Just(8), Just(16)]
}

fn amplitude() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn window(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(amplitude(), n)
}

fn sized_window() -> impl Strategy<Value = (usize, Vec<Complex64>)> {
    sizes().prop_flat_map(|n| (Just(n), window(n)))
}

fn ideal(n: usize) -> OfftNetwork {
    OfftNetwork::build(&NetworkParams::ideal(n, 10e9)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn couplers_and_lossless_cells_are_unitary(
        kappa_in in 0.0..=1.0f64,
        kappa_out in 0.0..=1.0f64,
        phase in -PI..PI,
        short_phase in -PI..PI,
        delay in 0.0..200e-12f64,
        f in -50e9..50e9f64,
    ) {
        prop_assert!(coupler_matrix(kappa_in).unwrap().unitarity_error() < 1e-12);
        let di = DelayedInterferometer {
            coupler_in_kappa: kappa_in,
            coupler_out_kappa: kappa_out,
            short_arm_phase: short_phase,
            common_base_delay: 3e-12,
            ..DelayedInterferometer::ideal(delay, phase)
        };
        let t = di.transfer(f).unwrap();
        prop_assert!(t.unitarity_error() < 1e-12);
        let o = di.response(f).unwrap();
        prop_assert!((o.bar.norm_sqr() + o.cross.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lossless_networks_conserve_power(
        n in sizes(),
        f in -100e9..100e9f64,
        phase in -PI..PI,
        kappa in 0.05..0.95f64,
    ) {
        let mut p = NetworkParams::ideal(n, 10e9);
        p.stage_overrides.push(StageOverride {
            stage: 1,
            phase_offset: phase,
            coupler_in_kappa: Some(kappa),
            ..Default::default()
        });
        let net = OfftNetwork::build(&p).unwrap();
        let total: f64 = net.all_bin_responses(f).unwrap().iter().map(|h| h.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12, "total {}", total);
    }

    #[test]
    fn simulator_is_linear(
        (n, x) in sized_window(),
        y in window(16),
        a in amplitude(),
        b in amplitude(),
    ) {
        let net = ideal(n);
        let len = 3 * n;
        let x: Vec<Complex64> = x.iter().cycle().take(len).copied().collect();
        let y: Vec<Complex64> = y.iter().cycle().take(len).copied().collect();
        let mix: Vec<Complex64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let (tx, ty, tm) = (
            time_simulate(&net, &x).unwrap(),
            time_simulate(&net, &y).unwrap(),
            time_simulate(&net, &mix).unwrap(),
        );
        for k in 0..n {
            for m in 0..len {
                let expect = a * tx.per_port[k][m] + b * ty.per_port[k][m];
                prop_assert!((tm.per_port[k][m] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn frequency_and_time_views_agree(n in sizes(), f in -60e9..60e9f64, loss in 0.0..3.0f64) {
        let mut p = NetworkParams::ideal(n, 10e9);
        p.stage_overrides.push(StageOverride { stage: 1, long_arm_loss_db: loss, ..Default::default() });
        let net = OfftNetwork::build(&p).unwrap();
        let mut impulse = vec![Complex64::new(0.0, 0.0); 2 * n];
        impulse[0] = Complex64::new(1.0, 0.0);
        let trace = time_simulate(&net, &impulse).unwrap();
        let resp = frequency_response(&net, &[f]).unwrap();
        for k in 0..n {
            let from_taps: Complex64 = trace.per_port[k]
                .iter()
                .enumerate()
                .map(|(i, h)| h * Complex64::from_polar(1.0, -2.0 * PI * f * i as f64 * trace.sample_period))
                .sum::<Complex64>()
                * Complex64::from_polar(1.0, -2.0 * PI * f * trace.latency);
            prop_assert!((from_taps - resp.per_port[k][0]).norm() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sampled_outputs_are_the_scaled_dft((n, w) in sized_window()) {
        let net = ideal(n);
        let input: Vec<Complex64> = w.iter().rev().copied().collect();
        let frame = sample_outputs(&time_simulate(&net, &input).unwrap(), 0).unwrap().remove(0);
        let m = match_ports(&net.to_physical_order(&frame), &dft(&w)).unwrap();
        prop_assert!(m.residual < 1e-10);
        prop_assert_eq!(&m.permutation[..], net.port_map());
    }

    #[test]
    fn stage_one_phase_is_cyclic(phi in -PI..PI, f in 0.0..40e9f64) {
        let net = ideal(4);
        let a = perturb(&net, &Locator::default(), SweepParameter::Phase, phi, 0.0).unwrap();
        let b = perturb(&net, &Locator::default(), SweepParameter::Phase, phi + 2.0 * PI, 0.0).unwrap();
        let (ha, hb) = (a.all_bin_responses(f).unwrap(), b.all_bin_responses(f).unwrap());
        for (x, y) in ha.iter().zip(&hb) {
            prop_assert!((x.norm_sqr() - y.norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_detuning_is_a_frequency_shift(delta in -PI..PI, f in -20e9..20e9f64, tau in 10e-12..100e-12f64) {
        let base = DelayedInterferometer::ideal(tau, 0.3);
        let detuned = DelayedInterferometer { static_phase: 0.3 + delta, ..base.clone() };
        let a = detuned.response(f).unwrap();
        let b = base.response(f - delta / (2.0 * PI * tau)).unwrap();
        prop_assert!((a.bar.norm_sqr() - b.bar.norm_sqr()).abs() < 1e-10);
        prop_assert!((a.cross.norm_sqr() - b.cross.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn single_cell_er_matches_closed_form(gamma in 0.01..=12.5f64) {
        let di = DelayedInterferometer { arm_loss_long_db: gamma, ..DelayedInterferometer::ideal(50e-12, 0.0) };
        let sim = di_extinction_ratio(&di, DiPort::Bar).unwrap().value().unwrap();
        let exact = analytic_extinction_ratio(gamma).unwrap().value().unwrap();
        prop_assert!(((sim - exact) / exact).abs() < 1e-9, "{} vs {}", sim, exact);
    }

    #[test]
    fn leakage_grows_with_detuning(a in 0.0..FRAC_PI_2, b in 0.0..FRAC_PI_2) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let net = ideal(4);
        let probe = auto_probe_frequencies(4, 10e9).unwrap()[2];
        let leak = |d: f64| {
            let n = perturb(&net, &Locator::default(), SweepParameter::Phase, d, 0.0).unwrap();
            leakage_ratio(&n, 2, probe, LeakageMetric::Aggregate).unwrap()
        };
        prop_assert!(leak(lo) <= leak(hi) + 1e-15);
    }

    #[test]
    fn path_loss_is_additive(c in 0.0..2.0f64, y in 0.0..5.0f64, m in 0.0..5.0f64, s in 0.0..2.0f64, n in sizes()) {
        let zero = LossBudget { coupler_db: 0.0, ybranch_db: 0.0, modulator_db: 0.0, spiral_first_stage_db: 0.0, ..LossBudget::default() };
        let parts = [
            LossBudget { coupler_db: c, ..zero.clone() },
            LossBudget { ybranch_db: y, ..zero.clone() },
            LossBudget { modulator_db: m, ..zero.clone() },
            LossBudget { spiral_first_stage_db: s, ..zero.clone() },
        ];
        let whole = LossBudget { coupler_db: c, ybranch_db: y, modulator_db: m, spiral_first_stage_db: s, ..zero.clone() };
        let sum: f64 = parts.iter().map(|b| path_insertion_loss(n, b).unwrap()).sum();
        prop_assert!((path_insertion_loss(n, &whole).unwrap() - sum).abs() < 1e-9);
    }
}

#[test]
fn degradation_vanishes_only_at_the_design_point() {
    let spec = SweepSpec {
        name: "p".into(),
        center: 0.0,
        half_range: 0.5,
        increment: 0.05,
        probe: ProbeSpec::Auto,
        target_port: 2,
        ..Default::default()
    };
    let r = run_sweep(&ideal(4), &spec).unwrap();
    for (v, m) in r.parameter_values.iter().zip(&r.metrics) {
        if v.abs() < 1e-12 {
            assert_eq!(m.degradation[2], 0.0);
            assert!(m.fom.is_unbounded());
        } else {
            assert!(m.degradation[2] > 0.0, "{v}");
        }
    }
}

#[test]
fn path_loss_and_ratio_are_monotone() {
    let b = LossBudget::default();
    let losses: Vec<f64> = (1..=20)
        .map(|m| path_insertion_loss(1 << m, &b).unwrap())
        .collect();
    assert!(losses.windows(2).all(|w| w[1] > w[0]));
    let rows = ScalingModel::default().table(1 << 20).unwrap();
    assert!(rows.windows(2).all(|w| w[1].ratio < w[0].ratio));
}
