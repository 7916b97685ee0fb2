use growlight::growth::{
    evaluate, fit_linear, fit_neural, model_forward, predict_leaf_increase, regression_metrics, sensitivity_grid,
    synthetic_samples, GrowthFeatures, GrowthModel, GrowthSample, Hyperparameters, NormalizationRanges, SampleBox,
    SyntheticGrowth, FEATURE_COUNT,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LO: [f64; FEATURE_COUNT] = [0.0, 0.0, 1600.0, 6.4, 0.0];
const HI: [f64; FEATURE_COUNT] = [200.0, 100.0, 2000.0, 6.7, 15.0];

fn random_features(rng: &mut ChaCha8Rng) -> GrowthFeatures<f64> {
    let v: [f64; FEATURE_COUNT] = std::array::from_fn(|i| LO[i] + (HI[i] - LO[i]) * rng.gen::<f64>());
    GrowthFeatures::new(v[0], v[1], v[2], v[3], v[4])
}

fn scaled(f: &GrowthFeatures<f64>) -> [f64; FEATURE_COUNT] {
    let v = f.to_array();
    std::array::from_fn(|i| (v[i] - LO[i]) / (HI[i] - LO[i]))
}

fn sample_with_target(f: GrowthFeatures<f64>, target: f64, l1: f64, dt: f64) -> GrowthSample<f64> {
    GrowthSample::new(f, dt, l1, l1 + (target * dt).exp()).unwrap()
}

/// Solves `XᵀX β = Xᵀy` by Gauss-Jordan elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let mut m = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                m[i][j] += row[i] * row[j];
            }
            m[i][p] += row[i] * yi;
        }
    }
    for col in 0..p {
        let pivot = (col..p).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let factor = m[r][col] / m[col][col];
                for c in col..=p {
                    m[r][c] -= factor * m[col][c];
                }
            }
        }
    }
    (0..p).map(|i| m[i][p] / m[i][i]).collect()
}

#[test]
fn linear_fit_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let samples: Vec<_> = (0..10)
        .map(|_| {
            sample_with_target(
                random_features(&mut rng),
                -3.0 + rng.gen::<f64>(),
                5.0 + 40.0 * rng.gen::<f64>(),
                1.0 + rng.gen::<f64>(),
            )
        })
        .collect();
    let model = fit_linear(&samples, NormalizationRanges::default()).unwrap();
    let design: Vec<Vec<f64>> =
        samples.iter().map(|s| scaled(&s.features).into_iter().chain([1.0]).collect()).collect();
    let targets: Vec<f64> =
        samples.iter().map(|s| ((s.leaf_area_end - s.leaf_area_start).ln()) / s.delta_t_hours).collect();
    let oracle = normal_equations(&design, &targets);
    for (a, b) in model.parameters.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-8, "{:?} vs {oracle:?}", model.parameters);
    }
}

#[test]
fn linear_fit_recovers_generating_coefficients() {
    let truth = [0.8, -0.3, 0.05, -0.2, 0.4, -2.5];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<_> = (0..40)
        .map(|_| {
            let f = random_features(&mut rng);
            let x = scaled(&f);
            let g = truth[5] + (0..FEATURE_COUNT).map(|i| truth[i] * x[i]).sum::<f64>();
            sample_with_target(f, g, 10.0, 1.0)
        })
        .collect();
    let model = fit_linear(&samples, NormalizationRanges::default()).unwrap();
    for (a, b) in model.parameters.iter().zip(&truth) {
        assert!((a - b).abs() < 1e-6);
    }
    assert!((evaluate(&model, &samples).unwrap().r_squared - 1.0).abs() < 1e-9);
}

#[test]
fn evaluate_matches_direct_formula() {
    let coeffs = vec![0.5, 0.2, -0.1, 0.3, 0.25, -1.0];
    let model = GrowthModel::linear(coeffs.clone(), NormalizationRanges::default()).unwrap();
    let rows = [
        ([100.0, 50.0, 1800.0, 6.5, 3.0], 2.0, 10.0, 11.2),
        ([200.0, 10.0, 1700.0, 6.6, 7.5], 1.0, 20.0, 21.9),
        ([40.0, 90.0, 1950.0, 6.45, 12.0], 3.0, 35.0, 37.0),
        ([0.0, 0.0, 1600.0, 6.4, 0.0], 1.5, 5.0, 5.4),
        ([160.0, 54.0, 2000.0, 6.7, 15.0], 0.5, 48.0, 49.1),
    ];
    let samples: Vec<_> = rows
        .iter()
        .map(|(v, dt, l1, l2)| {
            GrowthSample::new(GrowthFeatures::new(v[0], v[1], v[2], v[3], v[4]), *dt, *l1, *l2).unwrap()
        })
        .collect();
    let predicted: Vec<f64> = rows
        .iter()
        .map(|(v, dt, l1, _)| {
            let f: f64 = (v[0] / 200.0) * 0.5 + (v[1] / 100.0) * 0.2 - 0.1 * (v[2] - 1600.0) / 400.0
                + 0.3 * (v[3] - 6.4) / 0.3
                + 0.25 * v[4] / 15.0
                - 1.0;
            l1 + (f * dt).exp()
        })
        .collect();
    let actual: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let mean = actual.iter().sum::<f64>() / 5.0;
    let ss_res: f64 = actual.iter().zip(&predicted).map(|(a, p)| (a - p).powi(2)).sum();
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    let m = evaluate(&model, &samples).unwrap();
    assert!((m.mse - ss_res / 5.0).abs() < 1e-10);
    assert!((m.r_squared - (1.0 - ss_res / ss_tot)).abs() < 1e-10);
    assert!(regression_metrics(&[1.0, 1.0], &[1.0, 2.0]).is_err());
}

/// Network whose output is `−(|x_red − 0.7| + |x_blue − 0.1|)`, peaking at (140, 10).
fn planted_network() -> GrowthModel<f64> {
    let hyper = Hyperparameters::default();
    let (h1, h2) = (hyper.hidden[0], hyper.hidden[1]);
    let mut w1 = vec![0.0; h1 * FEATURE_COUNT];
    let mut b1 = vec![0.0; h1];
    for (unit, feature, sign, centre) in [(0, 0, 1.0, 0.7), (1, 0, -1.0, 0.7), (2, 1, 1.0, 0.1), (3, 1, -1.0, 0.1)] {
        w1[unit * FEATURE_COUNT + feature] = sign;
        b1[unit] = -sign * centre;
    }
    let mut w2 = vec![0.0; h2 * h1];
    w2[..4].copy_from_slice(&[1.0; 4]);
    let b2 = vec![0.0; h2];
    let mut w3 = vec![0.0; h2];
    w3[0] = -1.0;
    let params = [w1, b1, w2, b2, w3, vec![0.0]].concat();
    GrowthModel::neural(params, NormalizationRanges::default(), hyper).unwrap()
}

#[test]
fn sensitivity_finds_planted_optimum() {
    let m = planted_network();
    let grid = sensitivity_grid(&m, 5.0, 1800.0, 6.5, 21, 11).unwrap();
    assert_eq!(grid.shape(), (21, 11));
    assert_eq!(grid.argmax_ppfd(), (140.0, 10.0));
    assert_eq!(grid.value(14, 1), 1.0);
}

#[test]
fn constant_model_grid_is_uniform() {
    let m = GrowthModel::linear(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.3], NormalizationRanges::default()).unwrap();
    let grid = sensitivity_grid(&m, 2.0, 1800.0, 6.5, 21, 11).unwrap();
    assert!(grid.values.iter().all(|v| *v == 0.3f64.exp()));
    assert_eq!(grid.argmax_ppfd(), (0.0, 0.0));
}

#[test]
fn constant_target_is_learned() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<_> = (0..200).map(|_| sample_with_target(random_features(&mut rng), -1.5, 10.0, 1.0)).collect();
    let fit = fit_neural(&samples, NormalizationRanges::default(), &Hyperparameters::default()).unwrap();
    let mse = *fit.epoch_eval_losses.last().unwrap();
    assert!(mse < 1e-4, "training MSE {mse}");
}

#[test]
fn smoothed_loss_is_non_increasing_without_gradient_noise() {
    let samples = synthetic_samples::<f64>(&SyntheticGrowth::default(), &SampleBox::default(), 500, 3);
    let hyper = Hyperparameters { dropout: 0.0, batch_size: samples.len(), ..Hyperparameters::default() };
    let fit = fit_neural(&samples, NormalizationRanges::default(), &hyper).unwrap();
    let window = 100;
    let avg: Vec<f64> = fit.epoch_losses.windows(window).map(|w| w.iter().sum::<f64>() / window as f64).collect();
    assert_eq!(avg.len(), hyper.epochs - window + 1);
    for (i, w) in avg.windows(2).enumerate() {
        assert!(w[1] <= w[0], "moving average rose at epoch {}: {} -> {}", i + window, w[0], w[1]);
    }
}

#[test]
fn zero_epochs_round_trip_through_json() {
    let samples = synthetic_samples::<f64>(&SyntheticGrowth::default(), &SampleBox::default(), 20, 0);
    let hyper = Hyperparameters { epochs: 0, ..Hyperparameters::default() };
    let a = fit_neural(&samples, NormalizationRanges::default(), &hyper).unwrap().model;
    let b = fit_neural(&samples, NormalizationRanges::default(), &hyper).unwrap().model;
    assert_eq!(a, b);
    let back = GrowthModel::<f64>::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn single_precision_training_runs() {
    let samples = synthetic_samples::<f32>(&SyntheticGrowth::default(), &SampleBox::default(), 300, 1);
    let hyper = Hyperparameters { epochs: 50, ..Hyperparameters::default() };
    let fit = fit_neural(&samples, NormalizationRanges::default(), &hyper).unwrap();
    assert!(fit.epoch_eval_losses.iter().all(|l| l.is_finite()));
    let linear = fit_linear(&samples, NormalizationRanges::default()).unwrap();
    assert!(evaluate(&linear, &samples).unwrap().r_squared > 0.9);
}

fn feature_strategy() -> impl Strategy<Value = GrowthFeatures<f64>> {
    (0.0..=200.0, 0.0..=100.0, 1600.0..=2000.0, 6.4..=6.7, 0.0..=15.0)
        .prop_map(|(r, b, e, p, t)| GrowthFeatures::new(r, b, e, p, t))
}

proptest! {
    #[test]
    fn exponent_and_increase_invert(
        coeffs in proptest::collection::vec(-1.0..1.0f64, 6),
        f in feature_strategy(),
        dt in 0.1..48.0f64,
    ) {
        let m = GrowthModel::linear(coeffs, NormalizationRanges::default()).unwrap();
        let inc = predict_leaf_increase(&m, &f, dt).unwrap();
        prop_assert!(inc > 0.0);
        prop_assert!((inc.ln() / dt - model_forward(&m, &f)).abs() < 1e-10);
    }

    #[test]
    fn inference_is_pure(seed in 0u64..1000, f in feature_strategy()) {
        let samples = synthetic_samples::<f64>(&SyntheticGrowth::default(), &SampleBox::default(), 8, seed);
        let hyper = Hyperparameters { epochs: 0, seed, ..Hyperparameters::default() };
        let m = fit_neural(&samples, NormalizationRanges::default(), &hyper).unwrap().model;
        prop_assert_eq!(m.forward(&f).to_bits(), m.forward(&f).to_bits());
    }
}
