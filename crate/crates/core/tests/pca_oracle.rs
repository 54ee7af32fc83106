mod common;

use actmap::pca::principal_components;
use actmap::PointCloud;
use common::{covariance, jacobi_eigen, random_matrix, subspace_sine};

#[test]
fn matches_jacobi_on_random_matrices() {
    for seed in 0..100 {
        let rows = random_matrix(seed);
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let all: Vec<usize> = (0..rows.len()).collect();
        let pc = principal_components(&cloud, &all, 2).unwrap();
        let (values, vectors) = jacobi_eigen(covariance(&rows));
        for k in 0..2 {
            let rel = (pc.variances[k] - values[k]).abs() / values[k];
            assert!(rel <= 1e-8, "seed {seed}: eigenvalue {k} off by {rel}");
        }
        let sine = subspace_sine(&vectors[..2], &pc.directions);
        assert!(sine <= 1e-6, "seed {seed}: subspace angle {sine}");
    }
}

#[test]
fn directions_are_orthonormal_and_sign_fixed() {
    for seed in 0..20 {
        let rows = random_matrix(seed);
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let all: Vec<usize> = (0..rows.len()).collect();
        let pc = principal_components(&cloud, &all, 2).unwrap();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        assert!((dot(&pc.directions[0], &pc.directions[0]) - 1.0).abs() < 1e-12);
        assert!(dot(&pc.directions[0], &pc.directions[1]).abs() < 1e-12);
        for dir in &pc.directions {
            let lead = dir.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
            assert!(lead > 0.0);
        }
    }
}

#[test]
fn selection_order_does_not_matter() {
    let rows = random_matrix(4);
    let cloud = PointCloud::from_rows(&rows).unwrap();
    let fwd: Vec<usize> = (0..rows.len()).collect();
    let rev: Vec<usize> = fwd.iter().rev().copied().collect();
    let a = principal_components(&cloud, &fwd, 2).unwrap();
    let b = principal_components(&cloud, &rev, 2).unwrap();
    for k in 0..2 {
        assert!((a.variances[k] - b.variances[k]).abs() <= 1e-10 * a.variances[k]);
        for (x, y) in a.directions[k].iter().zip(&b.directions[k]) {
            assert!((x - y).abs() < 1e-8);
        }
    }
}
