use mixsemble::datagen::preset;
use mixsemble::{
    adjusted_rand_index, gmm_fit, kmeans, sample_gaussian_mixture, CovarianceFamily, GmmConfig, MixtureSpec,
};
use nalgebra::DMatrix;

#[test]
fn kmeans_recovers_six_sigma_blobs() {
    let spec = MixtureSpec {
        weights: vec![1.0 / 3.0; 3],
        means: vec![vec![0.0, 0.0], vec![6.0, 0.0], vec![3.0, 6.0]],
        covariances: vec![DMatrix::identity(2, 2); 3],
        skew: None,
    };
    let ari = |seed: u64| {
        let data = sample_gaussian_mixture(&spec, 300, seed).unwrap();
        let fit = kmeans(&data, 3, seed, 300).unwrap();
        adjusted_rand_index(&fit.partition, data.truth().unwrap()).unwrap()
    };
    assert!(ari(0) >= 0.99);
    // a sample can hold a point past the Bayes boundary, costing ~0.01 ARI
    let scores: Vec<f64> = (0..10).map(ari).collect();
    assert!(scores.iter().sum::<f64>() / 10.0 >= 0.99, "{scores:?}");
    assert!(scores.iter().all(|&a| a >= 0.98), "{scores:?}");
}

#[test]
fn full_covariance_beats_spherical_on_elongated_clusters() {
    for seed in 0..5 {
        let data = preset("anisotropic", seed).unwrap();
        let truth = data.truth().unwrap();
        let start = kmeans(&data, 3, seed, 300).unwrap().partition;
        let config = GmmConfig::default();
        let full = gmm_fit(&data, 3, CovarianceFamily::Full, &start, &config).unwrap();
        let spherical = gmm_fit(&data, 3, CovarianceFamily::Spherical, &start, &config).unwrap();
        let (af, asph) = (
            adjusted_rand_index(&full.partition, truth).unwrap(),
            adjusted_rand_index(&spherical.partition, truth).unwrap(),
        );
        assert!(af >= asph, "seed {seed}: full {af} < spherical {asph}");
        assert!(full.loglik > spherical.loglik);
    }
}

#[test]
fn kmeans_is_seed_deterministic() {
    let data = preset("manly-like", 0).unwrap();
    let a = kmeans(&data, 3, 9, 300).unwrap();
    let b = kmeans(&data, 3, 9, 300).unwrap();
    assert_eq!(a, b);
}
