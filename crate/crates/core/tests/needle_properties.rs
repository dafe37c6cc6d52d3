mod common;

use common::concave_profile;
use needlecomp::comparison::{inradius_comparison_r, ComparisonTriple};
use needlecomp::needle::*;
use proptest::prelude::*;

fn valid_triple() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0f64..1.0, 1.5f64..8.0, 0.3f64..5.0).prop_filter_map("finite radius", |(kappa, n, h)| {
        let k = kappa * (n - 1.0);
        let r = inradius_comparison_r(&ComparisonTriple::new(k, h, n).ok()?);
        (r.is_finite() && r.to_f64() < 4.0).then_some((k, h, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extremal_envelope_is_exact((k, h, n) in valid_triple()) {
        let d = extremal_density(k, h, n, 1.0, 2001).unwrap().reflected();
        let rep = comparison_envelope(&d, k, n, TOL_EXACT).unwrap();
        if n >= 2.0 {
            prop_assert!(rep.max_abs_gap <= 1e-8, "{}", rep.max_abs_gap);
        } else {
            // h = f^(N-1) is not Lipschitz at the zero of f; compare roots.
            for (&r, &v) in d.grid().iter().zip(d.values()) {
                let gap = v.powf(1.0 / (n - 1.0)) - rep.envelope.root(r);
                prop_assert!(gap.abs() <= 1e-8, "{gap} at {r}");
            }
        }
    }

    #[test]
    fn extremal_needles_attain_the_bound((k, h, n) in valid_triple()) {
        let d = extremal_density(k, h, n, 1.0, EXTREMAL_SAMPLES).unwrap();
        let rep = mcp_inradius_bound(&d, k, n, h, 1e-9).unwrap();
        prop_assert!((rep.length - rep.max_length.to_f64()).abs() <= 1e-9);
        prop_assert!(rep.passed);
    }

    #[test]
    fn cd_densities_pass_riccati(p in concave_profile(true)) {
        let d = p.density(201);
        prop_assume!(check_cd_density(&d, p.k(), p.n, TOL_EXACT).unwrap().passed);
        let u = NeedleDensity::new(d.grid().to_vec(), d.values().iter().map(|v| v.powf(1.0 / (p.n - 1.0))).collect()).unwrap();
        let slope = p.df(0.0) / p.f(0.0);
        prop_assert!(riccati_compare(&u, p.kappa, slope, 1e-6).unwrap().comparison.passed);
    }
}

#[test]
fn log_derivative_matches_analytic_gradients() {
    let cases: [(&dyn Fn(f64) -> f64, &dyn Fn(f64) -> f64); 3] = [
        (&|r: f64| (0.7 * r).exp(), &|_| 0.7),
        (&|r: f64| (1.0 + r).powi(3), &|r| 3.0 / (1.0 + r)),
        (&|r: f64| r.cos().powi(2), &|r: f64| -2.0 * r.tan()),
    ];
    for (f, df) in cases {
        let h = NeedleDensity::from_fn(-0.5, 0.5, 1001, f).unwrap();
        for &i in &[200usize, 400, 500, 700, 900] {
            let at = h.grid()[i];
            for side in [Side::Left, Side::Right] {
                let v = one_sided_log_derivative(&h, at, side).unwrap().to_f64();
                assert!((v - df(at)).abs() < 1e-6, "{at} {side:?}: {v} vs {}", df(at));
            }
        }
    }
}
