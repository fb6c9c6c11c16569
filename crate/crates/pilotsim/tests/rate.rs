//! Data phase: effective noise, precoders and the rate against dense evaluations.

mod common;

use common::*;
use pilotsim::channel::PathSet;
use pilotsim::linalg::hermitian_evd;
use pilotsim::pilot::{build_scheme, error_cov_closed_form, Scenario};
use pilotsim::random::{complex_gaussian, derive_stream};
use pilotsim::rate::{
    asymptotic_rate_bound, data_precoder, sum_rate_mc, transmit_covariance, zeff_covariance, DataPhaseConfig,
    RateEvaluator,
};
use pilotsim::{CMatrix, C64};
use proptest::prelude::*;

fn log2_det_hpd(a: &CMatrix) -> f64 {
    hermitian_evd(&a.hermitian_part())
        .unwrap()
        .values
        .iter()
        .map(|v| v.log2())
        .sum()
}

#[test]
fn zeff_matches_sampled_error_outer_products() {
    let st = ula_stats(2, 0, 3, 2, 2, &[1.0]);
    let s = build_scheme(Scenario::NPuC, 1, 2, 2, 2, 0.8, &st).unwrap();
    let err = error_cov_closed_form(&s, &st, 1.0, 0).unwrap();
    let factor = err.to_low_rank().unwrap();
    let f = data_precoder(&random_matrix(&mut derive_stream(2, 1, 0), 3, 2), 2).unwrap();
    let a = transmit_covariance(&f, 0.7);
    let exact = zeff_covariance(&[err.to_dense()], &[f], 0.7, 0.0001).unwrap();
    let mut rng = derive_stream(2, 2, 0);
    let draws = 100_000;
    let (m, n) = (3, 2);
    let mut acc = CMatrix::zeros(m, m);
    let fac = factor.factor().scale_real(factor.scale().sqrt());
    for _ in 0..draws {
        let w = CMatrix::from_fn(fac.cols(), 1, |_, _| complex_gaussian(&mut rng, 1.0));
        let v = fac.matmul(&w).unwrap();
        let h = CMatrix::from_fn(m, n, |i, j| v[(i + m * j, 0)]);
        acc.axpy(c(1.0, 0.0), &naive_mul(&naive_mul(&h, &a), &h.adjoint()))
            .unwrap();
    }
    let mut sampled = acc.scale_real(1.0 / draws as f64);
    sampled.add_diagonal(c(0.0001, 0.0));
    let d = sampled.relative_distance(&exact).unwrap();
    assert!(d < 0.03, "relative gap {d}");
}

/// Rate assembled from M × M matrices with the literal precoder of each dense estimate.
fn dense_rate(
    eval_stats: &[pilotsim::Stats],
    scheme: &pilotsim::pilot::PilotScheme<f64>,
    cfg: &DataPhaseConfig<f64>,
    gains: &[Vec<C64>],
) -> f64 {
    let e = cfg.symbol_energy();
    let mut covs = Vec::new();
    let mut precoders = Vec::new();
    let m = eval_stats[0].bs_antennas();
    let mut signal = CMatrix::zeros(m, m);
    for (k, st) in eval_stats.iter().enumerate() {
        let h_hat = st
            .bs_steering()
            .scale_cols(&gains[k])
            .unwrap()
            .mul_adjoint(st.ue_steering())
            .unwrap();
        let f = data_precoder(&h_hat, cfg.streams()).unwrap();
        let hf = naive_mul(&h_hat, &f);
        signal = signal.add(&naive_mul(&hf, &hf.adjoint()).scale_real(e)).unwrap();
        covs.push(
            error_cov_closed_form(scheme, eval_stats, cfg.sigma_z_sq(), k)
                .unwrap()
                .to_dense(),
        );
        precoders.push(f);
    }
    let zeff = zeff_covariance(&covs, &precoders, e, cfg.sigma_z_sq()).unwrap();
    let total = zeff.add(&signal).unwrap();
    cfg.data_fraction() * (log2_det_hpd(&total) - log2_det_hpd(&zeff))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn structured_rate_matches_dense(seed in any::<u64>(), pick in 0usize..3, rho_d in 0.1f64..20.0) {
        let scenario = Scenario::ALL[pick];
        let (k, m, n, l) = (2, 6, 3, 2);
        let st = ula_stats(seed, 0, m, n, l, &[1.0, 0.6]);
        let t = scenario.default_pilot_length(k, n, l);
        let scheme = build_scheme(scenario, k, n, l, t, 1.5, &st).unwrap();
        let cfg = DataPhaseConfig::after_pilots(rho_d, 40, t, 1.0, l).unwrap();
        let eval = RateEvaluator::new(&scheme, &st, cfg).unwrap();
        let mut rng = derive_stream(seed, 1, 0);
        let gains: Vec<Vec<C64>> = (0..k).map(|_| (0..l).map(|_| complex_gaussian(&mut rng, 3.0)).collect()).collect();
        let fast = eval.rate_from_estimates(&gains).unwrap();
        let slow = dense_rate(&st, &scheme, &cfg, &gains);
        prop_assert!(fast >= 0.0);
        prop_assert!((fast - slow).abs() < 1e-8 * (1.0 + slow.abs()), "{} vs {}", fast, slow);
    }

    #[test]
    fn transmit_energy_and_noise_floor(seed in any::<u64>(), pick in 0usize..3, rho_d in 0.0f64..10.0) {
        let scenario = Scenario::ALL[pick];
        let (k, m, n, l) = (2, 5, 3, 2);
        let st = ula_stats(seed, 0, m, n, l, &[1.0, 1.0]);
        let t = scenario.default_pilot_length(k, n, l);
        let scheme = build_scheme(scenario, k, n, l, t, 1.0, &st).unwrap();
        let cfg = DataPhaseConfig::after_pilots(rho_d, 30, t, 0.5, l).unwrap();
        let h = random_matrix(&mut derive_stream(seed, 2, 0), m, n);
        let f = data_precoder(&h, l).unwrap();
        let rx = transmit_covariance(&f, cfg.symbol_energy());
        prop_assert!((rx.trace().re * cfg.data_length() as f64 - rho_d).abs() < 1e-12 * (1.0 + rho_d));
        let covs: Vec<CMatrix> = (0..k).map(|u| error_cov_closed_form(&scheme, &st, 0.5, u).unwrap().to_dense()).collect();
        let zeff = zeff_covariance(&covs, &[f.clone(), f], cfg.symbol_energy(), 0.5).unwrap();
        let evd = hermitian_evd(&zeff).unwrap();
        prop_assert!(evd.min() >= 0.5 * (1.0 - 1e-10));
    }
}

#[test]
fn near_perfect_csi_single_ue_matches_hand_formula() {
    // orthonormal B and U columns
    let (m, n, l) = (8, 4, 2);
    let aoa: Vec<f64> = [0.0f64, 0.25].iter().map(|x| x.asin()).collect();
    let aod: Vec<f64> = [0.0f64, 0.5].iter().map(|x| x.asin()).collect();
    let p = PathSet::new(aoa, aod, vec![c(1.0, 0.0); l], 1.0).unwrap();
    let st = vec![pilotsim::channel::stats_from_paths(
        &pilotsim::channel::ArrayConfig::ula(m),
        &pilotsim::channel::ArrayConfig::ula(n),
        &p,
    )
    .unwrap()];
    assert!(st[0].bs_gram().relative_distance(&CMatrix::identity(l)).unwrap() < 1e-12);
    let scheme = build_scheme(Scenario::PuC, 1, n, l, l, 1e9, &st).unwrap();
    let cfg = DataPhaseConfig::after_pilots(3.0, 20, l, 1.0, l).unwrap();
    let eval = RateEvaluator::new(&scheme, &st, cfg).unwrap();
    let g = vec![c(1.5, -0.5), c(0.3, 0.9)];
    let rate = eval.rate_from_estimates(std::slice::from_ref(&g)).unwrap();
    let e = cfg.symbol_energy();
    let hand: f64 = g
        .iter()
        .map(|x| (1.0 + e * x.norm_sqr() / l as f64).log2())
        .sum::<f64>()
        * cfg.data_fraction();
    assert!((rate - hand).abs() < 1e-6 * hand, "{rate} vs {hand}");
}

#[test]
fn endpoints_of_the_energy_split_give_zero() {
    let st = ula_stats(6, 0, 16, 8, 2, &[1.0, 1.0]);
    for scenario in Scenario::ALL {
        let t = scenario.default_pilot_length(2, 8, 2);
        let none = build_scheme(scenario, 2, 8, 2, t, 0.0, &st).unwrap();
        let cfg = DataPhaseConfig::after_pilots(1.0, 64, t, 1.0, 2).unwrap();
        assert_eq!(
            sum_rate_mc(&none, &st, cfg, 10, &mut derive_stream(1, 0, 1))
                .unwrap()
                .spectral_efficiency,
            0.0
        );
        let all = build_scheme(scenario, 2, 8, 2, t, 1.0, &st).unwrap();
        let cfg0 = DataPhaseConfig::after_pilots(0.0, 64, t, 1.0, 2).unwrap();
        assert_eq!(
            sum_rate_mc(&all, &st, cfg0, 10, &mut derive_stream(1, 0, 1))
                .unwrap()
                .spectral_efficiency,
            0.0
        );
        let mid = sum_rate_mc(&all, &st, cfg, 10, &mut derive_stream(1, 0, 1)).unwrap();
        assert!(mid.spectral_efficiency > 0.0 && mid.trials == 10);
    }
}

#[test]
fn asymptotic_bound_trends() {
    let total = 2.0;
    let split = |rho_tau: f64| {
        let cfg = DataPhaseConfig::after_pilots(total - rho_tau, 128, 8, 1.0, 4).unwrap();
        asymptotic_rate_bound(&[1.0, 1.0], &cfg)
    };
    let taus = [1.5, 1.0, 0.5, 0.1, 0.0];
    assert!(taus.windows(2).all(|w| split(w[1]) > split(w[0])));
    // fixed data block, shrinking overhead
    let block = |tc: usize| asymptotic_rate_bound(&[1.0, 1.0], &DataPhaseConfig::new(1.0, 120, tc, 1.0, 4).unwrap());
    let tcs = [480, 240, 160, 128, 120];
    assert!(tcs.windows(2).all(|w| block(w[1]) > block(w[0])));
}

#[test]
fn sampled_rates_are_finite_and_positive() {
    let st = ula_stats(9, 0, 64, 8, 2, &[1.0, 1.0]);
    for scenario in Scenario::ALL {
        let t = scenario.default_pilot_length(2, 8, 2);
        let s = build_scheme(scenario, 2, 8, 2, t, 5.0, &st).unwrap();
        let cfg = DataPhaseConfig::after_pilots(5.0, 64, t, 1.0, 2).unwrap();
        let eval = RateEvaluator::new(&s, &st, cfg).unwrap();
        let mut rng = derive_stream(9, 1, 1);
        for _ in 0..50 {
            let r = eval.sample(&mut rng).unwrap();
            assert!(r.is_finite() && r >= 0.0);
        }
        let mc = sum_rate_mc(&s, &st, cfg, 200, &mut derive_stream(9, 2, 1)).unwrap();
        assert!(mc.spectral_efficiency > 0.0 && mc.std_error.is_finite());
    }
}
