//! Truncated periodization against the closed-form kernel.

use randsamp::experiments::{relative_l2_error, ExperimentConfig};
use randsamp::obs_matrix::{build_poisson, build_truncated, periodized_sinc};
use randsamp::signals::{draw_random_times, sample_at, sample_grid, Grid};

/// Bound on |closed form − P-term sum| for N = 16, P = 10⁴ on a unit grid.
///
/// The symmetric sum keeps p = −P/2+1 ..= P/2. What is left out is the
/// alternating tail beyond |p| ≈ P/2, bounded by 1/(π(PN/2 − N)), plus the
/// unpaired p = P/2 term, bounded by 2/(πN(P/2 − 1)). Together they give
/// 1.194e-5. A brute-force check over 20 random instances peaked at 1.156e-5.
const P_1E4_TOL: f64 = 1.2e-5;

fn instances() -> Vec<Vec<f64>> {
    (0..20)
        .map(|k| draw_random_times(8, 16.0, 0.0, 0xC0FFEE + k).unwrap().times)
        .collect()
}

/// Per-instance max |closed form − P-term sum| over the 20 instances.
fn gaps(p: usize) -> Vec<f64> {
    let grid = Grid::new(0.0, 1.0, 16).unwrap();
    instances()
        .iter()
        .map(|t| {
            let a = build_poisson(t, &grid).unwrap();
            let b = build_truncated(t, &grid, p).unwrap();
            (a.entries() - b.entries())
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .collect()
}

fn max_gap(p: usize) -> f64 {
    gaps(p).into_iter().fold(0.0, f64::max)
}

fn mean_gap(p: usize) -> f64 {
    let g = gaps(p);
    g.iter().sum::<f64>() / g.len() as f64
}

#[test]
fn truncated_converges_to_closed_form() {
    let gap = max_gap(10_000);
    assert!(gap < P_1E4_TOL, "max gap {gap:e}");
}

#[test]
fn gap_shrinks_with_more_terms() {
    let gaps: Vec<f64> = [2, 20, 200, 2000].iter().map(|&p| max_gap(p)).collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
    // the leading term decays like 1/P
    assert!(gaps[3] < gaps[1] / 50.0, "{gaps:?}");

    let means: Vec<f64> = [2, 20, 200, 2000].iter().map(|&p| mean_gap(p)).collect();
    for w in means.windows(2) {
        assert!(w[1] <= w[0], "{means:?}");
    }
}

#[test]
fn closed_form_interpolates_the_trig_signal() {
    // the four tones are periodic over the window and at or below Nyquist,
    // so the periodized kernel reproduces the signal between grid points
    let cfg = ExperimentConfig::trig();
    let grid_values = sample_grid(&cfg.signal, &cfg.grid).values;
    for seed in 0..10 {
        let times = draw_random_times(64, cfg.grid.duration(), 0.0, seed).unwrap();
        let exact = sample_at(&cfg.signal, &times).unwrap().values;
        let m0 = build_poisson(&times.times, &cfg.grid).unwrap();
        let interpolated = m0.apply(&grid_values).unwrap();
        let err = relative_l2_error(&interpolated, &exact).unwrap();
        assert!(err < 1e-10, "seed {seed}: {err:e}");
    }
}

#[test]
fn on_grid_instants_pick_out_grid_values() {
    let cfg = ExperimentConfig::trig();
    let values = sample_grid(&cfg.signal, &cfg.grid).values;
    let picks = [0usize, 3, 17, 128, 255];
    let times: Vec<f64> = picks.iter().map(|&n| cfg.grid.time(n)).collect();
    let m0 = build_poisson(&times, &cfg.grid).unwrap();
    let got = m0.apply(&values).unwrap();
    let want: Vec<f64> = picks.iter().map(|&n| values[n]).collect();
    assert!(relative_l2_error(&got, &want).unwrap() < 1e-12);
}

#[test]
fn kernel_frozen_values() {
    // 40-digit series evaluations of Σ_p sinc(θ + pN)
    let cases = [
        (0.5, 8, 0.628_417_436_515_731),
        (0.0, 16, 1.0),
        (8.0, 16, 0.0),
    ];
    for (theta, n, want) in cases {
        let got = periodized_sinc(theta, n).unwrap();
        assert!((got - want).abs() < 1e-15, "θ={theta}, N={n}: {got}");
    }
}
