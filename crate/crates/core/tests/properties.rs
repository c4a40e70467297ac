use aerial_alloc::assignment::{evaluate_with_power_control, Assignment};
use aerial_alloc::baselines::random_assignment;
use aerial_alloc::outage::{outage_ue, outage_uav, LinkSpec};
use aerial_alloc::scenario::{generate_scenario, load_scenario, save_scenario};
use aerial_alloc::SimConfig;
use proptest::prelude::*;

fn small_config() -> SimConfig {
    SimConfig { n_bs: 3, n_carriers: 9, n_ues: 5, n_uavs: 4, ..SimConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ue_outage_is_a_probability(
        s in 0.1f64..300.0,
        inter in prop::collection::vec(0.01f64..3.0, 0..5),
        g in 0.01f64..1.0,
    ) {
        let p = outage_ue(&LinkSpec::ue(s, &inter, g)).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn ue_outage_grows_with_threshold(
        s in 0.1f64..300.0,
        inter in prop::collection::vec(0.01f64..3.0, 0..5),
        g in 0.01f64..0.5,
    ) {
        let lo = outage_ue(&LinkSpec::ue(s, &inter, g)).unwrap();
        let hi = outage_ue(&LinkSpec::ue(s, &inter, 2.0 * g)).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn uav_outage_grows_with_interference(
        los in 0.5f64..300.0,
        frac in 0.01f64..1.0,
        a in 0.01f64..3.0,
        g in 0.01f64..1.0,
    ) {
        let serving = (los, los * frac);
        let weak = outage_uav(&LinkSpec::uav(serving, &[(a, 0.1 * a)], 2, g)).unwrap();
        let strong = outage_uav(&LinkSpec::uav(serving, &[(2.0 * a, 0.2 * a)], 2, g)).unwrap();
        prop_assert!(strong >= weak - 1e-10);
    }
}

#[test]
fn scenario_file_round_trip() {
    let scenario = generate_scenario(&small_config(), 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    save_scenario(&scenario, &path).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), scenario);
}

#[test]
fn random_assignment_evaluates() {
    let scenario = generate_scenario(&small_config(), 8).unwrap();
    let a: Assignment = random_assignment(&scenario, 8);
    let ev = evaluate_with_power_control(&scenario, &a).unwrap();
    assert_eq!(ev.report.per_user.len(), scenario.users.len());
    for pv in &ev.powers {
        for &p in &pv.p_w {
            assert!(p <= scenario.config.p_max_w + 1e-12);
        }
    }
}
