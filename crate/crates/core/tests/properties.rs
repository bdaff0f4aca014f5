use proptest::prelude::*;
use sidelink_sim::{run_drop, BlerTable, RetxScheme, SimConfig};

fn small(retx_scheme: RetxScheme, delta: f64) -> SimConfig {
    SimConfig {
        num_gnb: 1,
        highway_length_m: 1732.0,
        ivd_m: 40.0,
        mu: 2,
        bandwidth_mhz: 20.0,
        retx_scheme,
        l2sm_delta_db: delta,
        ..SimConfig::default()
    }
}

#[test]
fn raising_delta_never_lowers_prr_on_fixed_seeds() {
    let tables = BlerTable::builtin();
    for scheme in [RetxScheme::Equal, RetxScheme::Nonequal(2)] {
        for seed in 0..5 {
            let prr: Vec<f64> = [0.0, 3.0, 5.0, 7.0]
                .iter()
                .map(|&d| run_drop(&small(scheme, d), seed, &tables).unwrap().prr_runtime.unwrap())
                .collect();
            assert!(prr.windows(2).all(|w| w[1] >= w[0]), "{scheme} seed {seed}: {prr:?}");
        }
    }
}

#[test]
fn equal_retx_helps_without_overload() {
    let tables = BlerTable::builtin();
    let mean = |scheme| {
        (0..5)
            .map(|seed| run_drop(&small(scheme, 3.0), seed, &tables).unwrap().prr_effective.unwrap())
            .sum::<f64>()
            / 5.0
    };
    assert!(mean(RetxScheme::Equal) > mean(RetxScheme::None));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn effective_prr_is_bounded(
        ivd_m in 8.0f64..150.0,
        mu in 0u8..3,
        tf_hz in prop_oneof![Just(10.0), Just(20.0), Just(30.0)],
        retx in prop_oneof![Just(RetxScheme::None), Just(RetxScheme::Equal), (1u8..=4).prop_map(RetxScheme::Nonequal)],
        delta in prop_oneof![Just(0.0), Just(3.0), Just(5.0), Just(7.0)],
        seed in 0u64..1000,
    ) {
        let cfg = SimConfig {
            num_gnb: 2,
            highway_length_m: 3464.0,
            ivd_m,
            mu,
            tf_hz,
            retx_scheme: retx,
            l2sm_delta_db: delta,
            ..SimConfig::default()
        };
        let r = run_drop(&cfg, seed, &BlerTable::builtin()).unwrap();
        prop_assert!(r.prr_max > 0.0 && r.prr_max <= 1.0);
        if let Some(e) = r.prr_effective {
            prop_assert!((0.0..=r.prr_max + 1e-12).contains(&e));
            prop_assert!(e <= 1.0);
        }
        if let Some(p) = r.prr_runtime {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
