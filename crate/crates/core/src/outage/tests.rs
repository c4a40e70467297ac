use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mc(link: &LinkSpec, draws: u64) -> McEstimate {
    outage_mc(link, draws, 7).unwrap()
}

fn assert_mc(link: &LinkSpec, value: f64) {
    let est = mc(link, 400_000);
    let tol = (3.0 * est.std_err).max(0.005);
    assert!((value - est.outage).abs() <= tol, "{link:?}: analytic {value} vs mc {} (se {})", est.outage, est.std_err);
}

#[test]
fn ue_without_interference() {
    let link = LinkSpec::ue(2.0, &[], 0.1);
    let want = 1.0 - (-0.05f64).exp();
    assert!((outage_ue(&link).unwrap() - want).abs() < 1e-15);
}

#[test]
fn ue_single_interferer_closed_form() {
    // 1 - e^(-g/s) / (1 + g i / s)
    let (s, i, g): (f64, f64, f64) = (5.0, 3.0, 0.4);
    let want = 1.0 - (-g / s).exp() / (1.0 + g * i / s);
    let got = outage_ue(&LinkSpec::ue(s, &[i], g)).unwrap();
    assert!((got - want).abs() < 1e-14, "{got} vs {want}");
}

#[test]
fn ue_vanishing_interferer() {
    let got = outage_ue(&LinkSpec::ue(3.0, &[1e-12], 0.2)).unwrap();
    assert!((got - (1.0 - (-0.2f64 / 3.0).exp())).abs() < 1e-10);
}

#[test]
fn ue_example_against_sampling() {
    let link = LinkSpec::ue(100.0, &[10.0, 20.0], 0.1);
    assert_mc(&link, outage_ue(&link).unwrap());
}

#[test]
fn uav_example_against_sampling() {
    let link = LinkSpec::uav((200.0, 50.0), &[(20.0, 5.0)], 2, 0.1);
    assert_mc(&link, outage_uav(&link).unwrap());
}

#[test]
fn uav_harder_cases_against_sampling() {
    for link in [
        LinkSpec::uav((2.0, 0.5), &[(0.5, 0.2), (1.0, 0.0), (0.0, 0.7)], 2, 0.5),
        LinkSpec::uav((1.0, 1.0), &[(3.0, 1.0), (3.0, 1.0)], 3, 0.3),
        LinkSpec::uav((10.0, 0.0), &[(1.0, 2.0)], 2, 1.0),
    ] {
        assert_mc(&link, outage_uav(&link).unwrap());
    }
}

#[test]
fn routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.random_range(0..6);
        let m = rng.random_range(1..4);
        let s = (10f64.powf(rng.random_range(-1.0..2.0)), 10f64.powf(rng.random_range(-1.0..2.0)));
        let inter: Vec<(f64, f64)> = (0..n)
            .map(|_| (10f64.powf(rng.random_range(-2.0..1.0)), 10f64.powf(rng.random_range(-2.0..1.0))))
            .collect();
        let g = 10f64.powf(rng.random_range(-2.0..0.5));
        let link = LinkSpec::uav(s, &inter, m, g);
        let a = outage_via(&link, Route::PartialFractions, 32);
        let b = outage_via(&link, Route::Moments, 32).unwrap();
        if let Ok(a) = a {
            assert!((a - b).abs() < 1e-9, "{link:?}: {a} vs {b}");
        }
    }
}

#[test]
fn moments_route_handles_coincident_serving_poles() {
    // m = 1 with equal LoS and NLoS means: serving is Gamma(2, 1)
    let link = LinkSpec::uav((1.0, 1.0), &[(0.0, 0.5)], 1, 0.2);
    let gamma2 = LinkSpec::uav((2.0, 0.0), &[(0.0, 0.5)], 2, 0.2);
    let a = outage_via(&link, Route::Moments, 32).unwrap();
    let b = outage_via(&gamma2, Route::PartialFractions, 32).unwrap();
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    let c = outage_uav(&LinkSpec::uav((1.0, 1.0 + 1e-5), &[(0.0, 0.5)], 1, 0.2)).unwrap();
    assert!((a - c).abs() < 1e-5);
}

#[test]
fn special_case_one_matches_ue() {
    let uav = LinkSpec::uav((0.0, 4.0), &[(0.0, 1.0), (0.0, 2.5)], 2, 0.3);
    let ue = LinkSpec::ue(4.0, &[1.0, 2.5], 0.3);
    let sc = outage_special_case(1, &uav).unwrap();
    assert!((sc - outage_ue(&ue).unwrap()).abs() < 1e-14);
    assert!((outage_uav(&uav).unwrap() - sc).abs() < 1e-12);
}

#[test]
fn special_case_two_matches_general() {
    let uav = LinkSpec::uav((4.0, 0.0), &[(1.0, 0.0), (2.5, 0.0)], 3, 0.3);
    let sc = outage_special_case(2, &uav).unwrap();
    assert!((outage_uav(&uav).unwrap() - sc).abs() < 1e-10);
}

#[test]
fn special_case_three_matches_ue() {
    let uav = LinkSpec::uav((4.0, 0.0), &[(1.0, 0.0)], 1, 0.3);
    let ue = LinkSpec::ue(4.0, &[1.0], 0.3);
    assert!((outage_special_case(3, &uav).unwrap() - outage_ue(&ue).unwrap()).abs() < 1e-14);
}

#[test]
fn special_case_four_matches_general() {
    let uav = LinkSpec::uav((0.0, 4.0), &[(1.0, 0.5), (2.5, 1.0)], 2, 0.3);
    let sc = outage_special_case(4, &uav).unwrap();
    assert!((outage_uav(&uav).unwrap() - sc).abs() < 1e-10);
}

#[test]
fn special_case_preconditions() {
    let uav = LinkSpec::uav((1.0, 4.0), &[], 2, 0.3);
    for case in 1..=4 {
        assert!(matches!(outage_special_case(case, &uav), Err(Error::SpecialCase { .. })));
    }
    assert!(outage_special_case(5, &uav).is_err());
}

#[test]
fn doubling_is_stable() {
    let link = LinkSpec::uav((3.0, 1.0), &[(0.5, 0.5), (1.5, 0.2), (0.1, 0.9)], 2, 0.2);
    let delta = quadrature_doubling_delta(&link, 32).unwrap();
    assert!(delta < 1e-10, "{delta}");
}

#[test]
fn kind_mismatch_rejected() {
    let ue = LinkSpec::ue(1.0, &[], 0.1);
    assert!(outage_uav(&ue).is_err());
    let mut bad = LinkSpec::uav((1.0, 1.0), &[], 2, 0.1);
    assert!(outage_ue(&bad).is_err());
    bad.gamma_th = 0.0;
    assert!(outage_uav(&bad).is_err());
}

#[test]
fn sampling_edge_cases() {
    let strong = LinkSpec::ue(1e12, &[], 0.1);
    assert_eq!(outage_mc(&strong, 10_000, 1).unwrap().outage, 0.0);
    let tiny = LinkSpec::ue(1.0, &[1.0], 1e-12);
    assert_eq!(outage_mc(&tiny, 10_000, 1).unwrap().outage, 0.0);
    let a = outage_mc(&LinkSpec::ue(1.0, &[1.0], 0.5), 100_000, 9).unwrap();
    let b = outage_mc(&LinkSpec::ue(1.0, &[1.0], 0.5), 100_000, 9).unwrap();
    assert_eq!(a, b);
}

