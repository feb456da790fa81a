//! Statistical checks on the simulators (fixed seeds, loose tolerances).

use qfcv_core::sim::{
    gen_arma, gen_nonstationary, simulate_linear, ArmaSpec, NonstationarySpec, RngStream, SimSpec,
};

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n)
}

fn autocorr(v: &[f64], lag: usize) -> f64 {
    let (m, var) = mean_var(v);
    let n = v.len();
    let c: f64 = (0..n - lag).map(|i| (v[i] - m) * (v[i + lag] - m)).sum::<f64>() / n as f64;
    c / var
}

#[test]
fn white_noise_variance_and_autocorrelation() {
    let n = 100_000;
    let v = gen_arma(&ArmaSpec::white_noise(), n, &mut RngStream::new(1, 0)).unwrap();
    let (_, var) = mean_var(&v);
    assert!((var - 1.0).abs() < 0.03, "{var}");
    let bound = 4.0 / (n as f64).sqrt();
    for lag in 1..=5 {
        let r = autocorr(&v, lag);
        assert!(r.abs() < bound, "lag {lag}: {r}");
    }
}

#[test]
fn ar1_stationary_variance() {
    let v = gen_arma(&ArmaSpec::ar1(0.5), 100_000, &mut RngStream::new(2, 0)).unwrap();
    let (_, var) = mean_var(&v);
    assert!((var / (4.0 / 3.0) - 1.0).abs() < 0.05, "{var}");
    assert!((autocorr(&v, 1) - 0.5).abs() < 0.02);
}

#[test]
fn wedge_ma_raises_lag_one_autocorrelation() {
    let n = 50_000;
    let a = gen_arma(&ArmaSpec::ar1(0.5), n, &mut RngStream::new(3, 0)).unwrap();
    let b = gen_arma(&ArmaSpec::arma1_20(0.5), n, &mut RngStream::new(3, 0)).unwrap();
    assert!(autocorr(&b, 1) > autocorr(&a, 1), "{} vs {}", autocorr(&b, 1), autocorr(&a, 1));
}

#[test]
fn linear_model_variance_adds_up() {
    let s = simulate_linear(&SimSpec::sparse_linear(100_000, 0.5, 4), 0).unwrap();
    let (_, var) = mean_var(s.outcomes());
    let want = 4.0 + 4.0 / 3.0;
    assert!((var / want - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn zero_signal_and_noise_is_zero() {
    let mut spec = SimSpec::sparse_linear(200, 0.5, 5);
    spec.beta = vec![0.0; 20];
    spec.noise_scale = 0.0;
    let s = simulate_linear(&spec, 3).unwrap();
    assert!(s.outcomes().iter().all(|&y| y == 0.0));
}

#[test]
fn same_seed_and_stream_is_bit_identical() {
    let spec = SimSpec::sparse_linear(500, 0.7, 6);
    assert_eq!(simulate_linear(&spec, 9).unwrap(), simulate_linear(&spec, 9).unwrap());
    assert_ne!(simulate_linear(&spec, 9).unwrap(), simulate_linear(&spec, 10).unwrap());
    let ns = NonstationarySpec::default();
    assert_eq!(
        gen_nonstationary(&ns, 300, &mut RngStream::new(7, 1)).unwrap(),
        gen_nonstationary(&ns, 300, &mut RngStream::new(7, 1)).unwrap()
    );
}

#[test]
fn burn_in_removes_the_zero_start() {
    // First retained AR(1) value, phi = 0.9, over 10^4 streams.
    let reps = 10_000;
    let firsts: Vec<f64> = (0..reps)
        .map(|r| gen_arma(&ArmaSpec::ar1(0.9), 1, &mut RngStream::new(8, r)).unwrap()[0])
        .collect();
    let (m, var) = mean_var(&firsts);
    let se = (var / reps as f64).sqrt();
    assert!(m.abs() < 3.0 * se, "mean {m}, se {se}");
    // The stationary variance 1 / (1 - 0.81) is reached.
    assert!((var / (1.0 / 0.19) - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn random_walk_increments_have_constant_variance() {
    let spec = NonstationarySpec {
        arima_phi: 0.0,
        variance_growth_exponent: 0.0,
        burn_in: 0,
    };
    let v = gen_nonstationary(&spec, 40_000, &mut RngStream::new(9, 0)).unwrap();
    let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let (_, early) = mean_var(&inc[..20_000]);
    let (_, late) = mean_var(&inc[20_000..]);
    // Increment = fresh N(0,1) + difference of iid N(0,1): variance 3.
    assert!((early / 3.0 - 1.0).abs() < 0.05, "{early}");
    assert!((late / early - 1.0).abs() < 0.05, "{early} vs {late}");
}
