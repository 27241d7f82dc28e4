//! End-to-end behavior of the public estimators on small planted instances.

use decycle::baselines::{cca_stat, pls_stat};
use decycle::detection::{detect_stat_wigner, detect_stat_wishart, DetectConfig};
use decycle::models::{
    read_pair, sample_null_wigner, sample_null_wishart, sample_wigner_pair, sample_wishart_pair,
    write_pair, ModelParams, WishartPair,
};
use decycle::prior::PriorSpec;
use decycle::recovery::{assemble_estimate, overlap, recovery_scores_wigner, RecoverConfig};
use decycle::rng::derive_seed;

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

#[test]
fn wigner_statistic_separates_strong_signal_from_noise() {
    let params = ModelParams::wigner(2.5, 2.5, 0.9, 60);
    let spec = PriorSpec::rademacher(0.9);
    let cfg = DetectConfig {
        t: 10,
        ..DetectConfig::wigner(3, 0)
    };
    let (mut p, mut q) = (Vec::new(), Vec::new());
    for i in 0..20 {
        let seed = derive_seed(41, i);
        let local = DetectConfig {
            seed: derive_seed(seed, 9),
            ..cfg
        };
        let planted = sample_wigner_pair(&params, &spec, seed).unwrap();
        p.push(
            detect_stat_wigner(&planted, 2.5, 2.5, 0.9, &local)
                .unwrap()
                .value,
        );
        let null = sample_null_wigner(60, seed).unwrap();
        q.push(
            detect_stat_wigner(&null, 2.5, 2.5, 0.9, &local)
                .unwrap()
                .value,
        );
    }
    let ((mp, _), (mq, sq)) = (mean_sd(&p), mean_sd(&q));
    assert!(mp > mq + 3.0 * sq, "planted {mp}, null {mq} ± {sq}");
}

#[test]
fn wishart_statistic_separates_strong_signal_from_noise() {
    let params = ModelParams::wishart(4.0, 4.0, 0.9, 30, 30);
    let spec = PriorSpec::rademacher(0.9);
    let cfg = DetectConfig {
        t: 10,
        ..DetectConfig::wishart(2, 0)
    };
    let (mut p, mut q) = (Vec::new(), Vec::new());
    for i in 0..20 {
        let seed = derive_seed(43, i);
        let local = DetectConfig {
            seed: derive_seed(seed, 9),
            ..cfg
        };
        let planted = sample_wishart_pair(&params, &spec, seed).unwrap();
        p.push(
            detect_stat_wishart(&planted, 4.0, 4.0, 0.9, &local)
                .unwrap()
                .value,
        );
        let null = sample_null_wishart(30, 30, seed).unwrap();
        q.push(
            detect_stat_wishart(&null, 4.0, 4.0, 0.9, &local)
                .unwrap()
                .value,
        );
    }
    let ((mp, _), (mq, sq)) = (mean_sd(&p), mean_sd(&q));
    assert!(mp > mq + 3.0 * sq, "planted {mp}, null {mq} ± {sq}");
}

#[test]
fn recovery_overlap_is_large_for_strong_signal() {
    let params = ModelParams::wigner(3.0, 3.0, 1.0, 80);
    let spec = PriorSpec::rademacher(1.0);
    let overlaps: Vec<f64> = (0..5)
        .map(|i| {
            let seed = derive_seed(47, i);
            let pair = sample_wigner_pair(&params, &spec, seed).unwrap();
            let cfg = RecoverConfig {
                t: 20,
                ..RecoverConfig::wigner(3, derive_seed(seed, 9))
            };
            let row = recovery_scores_wigner(&pair, 3.0, 3.0, 1.0, &cfg).unwrap();
            overlap(&assemble_estimate(&row, &cfg), &pair.spikes.unwrap().x)
        })
        .collect();
    let (m, _) = mean_sd(&overlaps);
    assert!(m > 0.5, "mean overlap {m}");
}

#[test]
fn pls_responds_to_the_planted_pair() {
    let spec = PriorSpec::rademacher(1.0);
    let planted =
        sample_wishart_pair(&ModelParams::wishart(3.0, 3.0, 1.0, 100, 400), &spec, 53).unwrap();
    let null = sample_null_wishart(100, 400, 53).unwrap();
    let pls = |p: &WishartPair| pls_stat(p.x.view(), p.y.view()).unwrap().top_value;
    assert!(
        pls(&planted) > pls(&null),
        "{} vs {}",
        pls(&planted),
        pls(&null)
    );
}

#[test]
fn cca_responds_when_both_matrices_share_a_sample_factor() {
    let (n, big_n, mu) = (100usize, 400usize, 3.0f64);
    let spec = PriorSpec::rademacher(1.0);
    let mut pair =
        sample_wishart_pair(&ModelParams::wishart(3.0, mu, 1.0, n, big_n), &spec, 53).unwrap();
    let null = sample_null_wishart(n, big_n, 53).unwrap();
    let y = pair.spikes.as_ref().unwrap().y.clone();
    let (u, v) = (pair.u.clone().unwrap(), pair.v.clone().unwrap());
    let scale = (mu / n as f64).sqrt();
    for i in 0..n {
        for j in 0..big_n {
            pair.y[[i, j]] += scale * y[i] * (u[j] - v[j]);
        }
    }
    let cca = |p: &WishartPair| cca_stat(p.x.view(), p.y.view()).unwrap().top_value;
    assert!(cca(&pair) > cca(&null), "{} vs {}", cca(&pair), cca(&null));
    assert!(cca(&pair) <= 1.0 + 1e-8);
}

#[test]
fn pairs_survive_a_binary_round_trip() {
    let pair = sample_wishart_pair(
        &ModelParams::wishart(1.0, 1.0, 0.5, 7, 11),
        &PriorSpec::gaussian(0.5),
        59,
    )
    .unwrap();
    let mut buf = Vec::new();
    write_pair(&mut buf, &pair.x, &pair.y).unwrap();
    let (x, y) = read_pair(buf.as_slice()).unwrap();
    assert_eq!(x, pair.x);
    assert_eq!(y, pair.y);
}
