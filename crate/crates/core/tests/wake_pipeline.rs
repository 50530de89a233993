//! End-to-end oracles on the synthetic wake: spectral content of a point
//! probe and the downstream decay of first-mode energy on spanwise planes.

use rustfft::{num_complex::Complex, FftPlanner};

use wakekit::field::{Axis, PlaneSpec, SnapshotSet, StructuredGrid};
use wakekit::pod::{assemble_snapshot_matrix, cumulative_energy, pod_method_of_snapshots};
use wakekit::synth::{generate_wake_snapshot, wake_velocity, WakeModelParams};

#[test]
fn tip_probe_spectrum_peaks_at_blade_passing_frequency() {
    let params = WakeModelParams::default();
    let d = params.rotor_diameter;
    let probe = [0.5 * d, 0.0, params.hub_height + 0.5 * d];

    let n = 256;
    let dt = 0.125;
    let series: Vec<f64> = (0..n)
        .map(|i| wake_velocity(&params, probe, i as f64 * dt)[0])
        .collect();
    let mean = series.iter().sum::<f64>() / n as f64;

    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .map(|&v| Complex::new(v - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mut peak_bin = 1;
    for k in 1..n / 2 {
        if buf[k].norm() > buf[peak_bin].norm() {
            peak_bin = k;
        }
    }
    let f_peak = peak_bin as f64 / (n as f64 * dt);
    let f_blade_passing = 3.0 * params.rotor_rpm / 60.0; // 0.605 Hz
    let bin_width = 1.0 / (n as f64 * dt);
    assert!(
        (f_peak - f_blade_passing).abs() <= bin_width,
        "peak at {f_peak} Hz, expected {f_blade_passing} +- {bin_width}"
    );
}

fn wake_set(params: &WakeModelParams, n_snapshots: usize) -> SnapshotSet {
    // x in [0, 403.2], y in [-126, 126], z in [0, 216]
    let grid = StructuredGrid::new(32, 24, 24, 12.6, 10.5, 9.0, [0.0, -126.0, 0.0]).unwrap();
    let snaps: Vec<_> = (0..n_snapshots)
        .map(|s| generate_wake_snapshot(params, &grid, s as f64).unwrap())
        .collect();
    SnapshotSet::from_snapshots("velocity", snaps).unwrap()
}

fn first_mode_retained_along_planes(params: &WakeModelParams) -> Vec<f64> {
    let set = wake_set(params, 48);
    let d = params.rotor_diameter;
    [0.5, 1.0, 1.5, 2.0, 2.5]
        .iter()
        .map(|&m| {
            let plane = PlaneSpec::new(Axis::X, m * d, format!("x{m}D"));
            let sampled = set.sample_plane_set("velocity", &plane).unwrap();
            let matrix =
                assemble_snapshot_matrix(&sampled, "velocity", Some(0), false, None).unwrap();
            let result = pod_method_of_snapshots(&matrix);
            cumulative_energy(&result, 1).unwrap()
        })
        .collect()
}

#[test]
fn first_mode_energy_decays_downstream_for_the_default_wake() {
    let retained = first_mode_retained_along_planes(&WakeModelParams::default());
    for w in retained.windows(2) {
        assert!(
            w[1] < w[0],
            "retained(1) not strictly decreasing: {retained:?}"
        );
    }
}

#[test]
fn first_mode_energy_decays_downstream_for_the_deficit_only_wake() {
    let params = WakeModelParams {
        tip_vortex_amplitude: 0.0,
        tower_wake_amplitude: 0.0,
        ..WakeModelParams::default()
    };
    let retained = first_mode_retained_along_planes(&params);
    for w in retained.windows(2) {
        assert!(
            w[1] < w[0],
            "retained(1) not strictly decreasing: {retained:?}"
        );
    }
}
