use proptest::prelude::*;
use vocal_bp::metrics::*;

fn labelled_points() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
    (4usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 2), n),
            prop::collection::vec(0usize..3, n),
        )
    })
}

fn centroids(data: &[Vec<f64>], assignments: &[usize], k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|j| {
            let members: Vec<&Vec<f64>> = data.iter().zip(assignments).filter(|(_, &a)| a == j).map(|(p, _)| p).collect();
            let n = members.len().max(1) as f64;
            (0..2).map(|axis| members.iter().map(|p| p[axis]).sum::<f64>() / n).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn scores_stay_in_range((data, assign) in labelled_points(), truth in prop::collection::vec(0usize..3, 30)) {
        let truth = &truth[..assign.len()];
        let (h, c) = homogeneity_completeness(truth, &assign).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h) && (0.0..=1.0 + 1e-12).contains(&c));
        let j = jaccard_similarity(truth, &assign).unwrap();
        prop_assert!((0.0..=1.0).contains(&j));
        if let Ok(s) = silhouette(&data, &assign) {
            prop_assert!((-1.0..=1.0).contains(&s));
        }
        if let Ok(d) = dunn_index(&data, &assign) {
            prop_assert!(d >= 0.0 && d.is_finite());
        }
        if let Ok(db) = davies_bouldin(&data, &assign, &centroids(&data, &assign, 3)) {
            prop_assert!(db >= 0.0 && db.is_finite());
        }
    }

    #[test]
    fn relabelling_clusters_changes_nothing((data, assign) in labelled_points(), truth in prop::collection::vec(0usize..3, 30)) {
        let truth = &truth[..assign.len()];
        let perm = [2usize, 0, 1];
        let relabelled: Vec<usize> = assign.iter().map(|&a| perm[a]).collect();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
        let (h1, c1) = homogeneity_completeness(truth, &assign).unwrap();
        let (h2, c2) = homogeneity_completeness(truth, &relabelled).unwrap();
        prop_assert!(close(h1, h2) && close(c1, c2));
        prop_assert!(close(jaccard_similarity(truth, &assign).unwrap(), jaccard_similarity(truth, &relabelled).unwrap()));
        if let (Ok(a), Ok(b)) = (silhouette(&data, &assign), silhouette(&data, &relabelled)) {
            prop_assert!(close(a, b));
        }
        if let (Ok(a), Ok(b)) = (dunn_index(&data, &assign), dunn_index(&data, &relabelled)) {
            prop_assert!(close(a, b));
        }
    }

    #[test]
    fn swapping_partitions_swaps_scores(truth in prop::collection::vec(0usize..4, 1..40), clusters in prop::collection::vec(0usize..4, 40)) {
        let clusters = &clusters[..truth.len()];
        let (h, c) = homogeneity_completeness(&truth, clusters).unwrap();
        let (h2, c2) = homogeneity_completeness(clusters, &truth).unwrap();
        prop_assert!((h - c2).abs() <= 1e-12 && (c - h2).abs() <= 1e-12);
    }

    #[test]
    fn geometry_scores_are_scale_free((data, assign) in labelled_points(), s in 0.01f64..100.0) {
        let scaled: Vec<Vec<f64>> = data.iter().map(|p| p.iter().map(|v| v * s).collect()).collect();
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        if let (Ok(a), Ok(b)) = (dunn_index(&data, &assign), dunn_index(&scaled, &assign)) {
            prop_assert!(rel(a, b));
        }
        let (ca, cb) = (centroids(&data, &assign, 3), centroids(&scaled, &assign, 3));
        if let (Ok(a), Ok(b)) = (davies_bouldin(&data, &assign, &ca), davies_bouldin(&scaled, &assign, &cb)) {
            prop_assert!(rel(a, b));
        }
        if let (Ok(a), Ok(b)) = (silhouette(&data, &assign), silhouette(&scaled, &assign)) {
            prop_assert!(rel(a, b));
        }
    }

    #[test]
    fn exact_lines_fit_perfectly(a in -10.0f64..10.0, b in -5.0f64..5.0, xs in prop::collection::btree_set(-1000i32..1000, 3..20)) {
        let x: Vec<f64> = xs.iter().map(|&v| f64::from(v) / 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| a + b * v).collect();
        let r = simple_regression(&x, &y).unwrap();
        prop_assert!((r.intercept - a).abs() <= 1e-8 && (r.slopes[0] - b).abs() <= 1e-8);
        prop_assert!(r.standard_error <= 1e-6);
    }
}
