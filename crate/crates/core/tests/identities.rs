use anisoflow::symfunc::{
    binomial, in_gamma_k_plus, sigma_ext, sigma_k, sigma_k_of_matrix, sigma_k_partials, CurvatureVector,
    SymmetricMatrix,
};
use anisoflow::verify::{symfunc_suite, symfunc_suite_with};
use anisoflow::Result;
use proptest::prelude::*;

/// (n, k, kappa) with kappa in Gamma_k^+, built by shifting a raw vector
/// along (1, .., 1) until every sigma_j, j <= k, is positive.
fn cone_point(extra: usize) -> impl Strategy<Value = (usize, usize, CurvatureVector)> {
    (1usize..=3)
        .prop_flat_map(|n| (Just(n), 1..=n, prop::collection::vec(-2.0f64..2.0, n)))
        .prop_filter_map("k + extra must not exceed n", move |(n, k, raw)| {
            let k = k + extra;
            if k > n {
                return None;
            }
            let mut v = raw;
            let mut kv = CurvatureVector::new(&v).unwrap();
            while !in_gamma_k_plus(&kv, k).inside {
                v.iter_mut().for_each(|x| *x += 0.25);
                kv = CurvatureVector::new(&v).unwrap();
            }
            Some((n, k - extra, kv))
        })
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn euler_identity((_, k, kv) in cone_point(0)) {
        let p = sigma_k_partials(&kv, k).unwrap();
        let lhs: f64 = kv.as_slice().iter().zip(&p).map(|(x, d)| x * d).sum();
        let sk = sigma_k(&kv, k).unwrap();
        let scale: f64 = kv.as_slice().iter().zip(&p).map(|(x, d)| (x * d).abs()).sum();
        prop_assert!(rel(lhs, k as f64 * sk, scale) < 1e-12);
    }

    #[test]
    fn quadratic_identity((_, k, kv) in cone_point(0)) {
        let p = sigma_k_partials(&kv, k).unwrap();
        let lhs: f64 = kv.as_slice().iter().zip(&p).map(|(x, d)| x * x * d).sum();
        let rhs = sigma_ext(&kv, 1) * sigma_ext(&kv, k) - (k + 1) as f64 * sigma_ext(&kv, k + 1);
        let scale = kv.as_slice().iter().map(|x| x * x).sum::<f64>() * p.iter().map(|d| d.abs()).sum::<f64>();
        prop_assert!(rel(lhs, rhs, scale) < 1e-12);
    }

    #[test]
    fn newton_maclaurin((n, k, kv) in cone_point(1)) {
        let norm = sigma_ext(&kv, k) / binomial(n, k);
        let upper = binomial(n, k + 1) * norm.powf((k + 1) as f64 / k as f64);
        prop_assert!(sigma_ext(&kv, k + 1) <= upper * (1.0 + 1e-10));
        prop_assert!(sigma_ext(&kv, 1) >= n as f64 * norm.powf(1.0 / k as f64) * (1.0 - 1e-10));
    }

    #[test]
    fn largest_curvature_bound((n, k, kv) in cone_point(0)) {
        let sorted = kv.sorted_desc();
        let p = sigma_k_partials(&sorted, k).unwrap();
        let lhs = p[0] * sorted.as_slice()[0];
        let rhs = k as f64 / n as f64 * sigma_k(&sorted, k).unwrap();
        prop_assert!(lhs >= rhs - 1e-10 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn matrix_sigma_matches_eigenvalues(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, k in 1usize..=2) {
        let m = SymmetricMatrix::new2([[a, b], [b, c]]).unwrap();
        let (value, eig) = sigma_k_of_matrix(&m, k).unwrap();
        let direct = sigma_k(&eig, k).unwrap();
        let scale = match k { 1 => a.abs() + c.abs(), _ => (a * c).abs() + b * b } + 1e-12;
        prop_assert!(rel(value, direct, scale) < 1e-12);
        // eigenvalues are real, descending and reproduce trace and determinant
        let e = eig.as_slice();
        prop_assert!(e[0] >= e[1]);
        prop_assert!(rel(e[0] + e[1], a + c, a.abs() + c.abs() + 1e-12) < 1e-12);
    }

    #[test]
    fn partials_match_finite_differences((_, k, kv) in cone_point(0)) {
        let p = sigma_k_partials(&kv, k).unwrap();
        for i in 0..kv.dim() {
            let h = 1e-6;
            let mut up = kv.as_slice().to_vec();
            let mut dn = up.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (sigma_k(&CurvatureVector::new(&up).unwrap(), k).unwrap()
                - sigma_k(&CurvatureVector::new(&dn).unwrap(), k).unwrap()) / (2.0 * h);
            prop_assert!((fd - p[i]).abs() < 1e-6 * (1.0 + p[i].abs()));
        }
    }
}

#[test]
fn suite_passes_with_ten_thousand_samples() {
    for check in symfunc_suite(10_000, 7) {
        assert!(check.passed, "{check}");
        assert!(check.samples >= 10_000 || check.name.contains("matrix"), "{check}");
    }
}

fn flipped_partials(kv: &CurvatureVector, k: usize) -> Result<Vec<f64>> {
    let mut p = sigma_k_partials(kv, k)?;
    if let Some(last) = p.last_mut() {
        *last = -*last;
    }
    Ok(p)
}

#[test]
fn sign_error_in_partials_is_caught() {
    let checks = symfunc_suite_with(flipped_partials, 2_000, 3);
    let euler = checks.iter().find(|c| c.name == "euler identity").unwrap();
    assert!(!euler.passed, "{euler}");
    assert!(euler.worst > 1e-3);
}
