use pedc_core::csa::{make_params, AlphaPolicy, CsaError, SystemParams};
use pedc_core::sim::{
    extract_view, run_protocol, sweep_rates, GridPoint, PartyView, Rate, Role, RunInputs, SimError,
};

fn worked_params() -> SystemParams {
    make_params(7, 2, 3, 1, AlphaPolicy::SmallestValid).unwrap()
}

fn worked_inputs() -> RunInputs {
    RunInputs {
        messages: Some(vec![vec![3], vec![5]]),
        coefficients: Some(vec![1, 1]),
        user_noises: Some(vec![vec![vec![2]], vec![vec![4]]]),
        collector_noise: Some(vec![vec![1, 2]]),
    }
}

#[test]
fn worked_example_transcript() {
    let t = run_protocol(&worked_params(), 42, &worked_inputs()).unwrap();
    let answers: Vec<u64> = t.servers.iter().map(|s| s.answer).collect();
    assert_eq!(answers, vec![2, 2, 1]);
    assert_eq!(t.statistic, vec![1]);
    assert_eq!(t.cost.download_symbols, 3);
    assert_eq!(t.cost.upload_symbols, 2 * 3); // K·N·L
    assert_eq!(t.cost.query_symbols, 3 * 2); // N·L·K
    assert_eq!(t.rate, Rate::new(1, 3));
    assert_eq!(t.servers[0].store, vec![vec![5, 2]]);
    assert_eq!(t.servers[1].store, vec![vec![0, 6]]);
    assert_eq!(t.servers[2].store, vec![vec![2, 3]]);
    assert_eq!(t.servers[0].query, vec![vec![2, 3]]);
    assert_eq!(t.servers[2].query, vec![vec![4, 0]]);
    t.reverify().unwrap();
}

#[test]
fn same_seed_same_transcript() {
    let p = make_params(13, 3, 5, 2, AlphaPolicy::SmallestValid).unwrap();
    let a = run_protocol(&p, 9001, &RunInputs::default()).unwrap();
    let b = run_protocol(&p, 9001, &RunInputs::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = run_protocol(&p, 9002, &RunInputs::default()).unwrap();
    assert_ne!(a.messages, c.messages);
}

#[test]
fn fixing_messages_does_not_perturb_noise_streams() {
    let p = make_params(13, 3, 5, 2, AlphaPolicy::SmallestValid).unwrap();
    let sampled = run_protocol(&p, 5, &RunInputs::default()).unwrap();
    let fixed = run_protocol(
        &p,
        5,
        &RunInputs {
            messages: Some(vec![vec![1, 1], vec![2, 2], vec![3, 3]]),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(sampled.user_noises, fixed.user_noises);
    assert_eq!(sampled.collector_noise, fixed.collector_noise);
    assert_eq!(sampled.coefficients, fixed.coefficients);
}

#[test]
fn adding_users_keeps_existing_users_draws() {
    let small = make_params(13, 2, 5, 2, AlphaPolicy::SmallestValid).unwrap();
    let large = make_params(13, 4, 5, 2, AlphaPolicy::SmallestValid).unwrap();
    let a = run_protocol(&small, 77, &RunInputs::default()).unwrap();
    let b = run_protocol(&large, 77, &RunInputs::default()).unwrap();
    assert_eq!(a.messages[..], b.messages[..2]);
    assert_eq!(a.user_noises[..], b.user_noises[..2]);
}

#[test]
fn larger_configuration_matches_oracle() {
    let p = make_params(11, 4, 5, 2, AlphaPolicy::SmallestValid).unwrap();
    for seed in 0..20 {
        let t = run_protocol(&p, seed, &RunInputs::default()).unwrap();
        let expected: Vec<u64> = (0..2)
            .map(|l| {
                (0..4)
                    .map(|k| t.coefficients[k] * t.messages[k][l])
                    .sum::<u64>()
                    % 11
            })
            .collect();
        assert_eq!(t.statistic, expected);
        assert_eq!(t.rate, Rate::new(2, 5));
    }
}

#[test]
fn run_rejects_malformed_inputs() {
    let p = worked_params();
    let mut inputs = worked_inputs();
    inputs.messages = Some(vec![vec![3]]);
    assert!(matches!(
        run_protocol(&p, 0, &inputs),
        Err(SimError::Input { .. })
    ));
    let mut inputs = worked_inputs();
    inputs.user_noises = Some(vec![vec![vec![2, 2]], vec![vec![4, 4]]]);
    assert!(matches!(
        run_protocol(&p, 0, &inputs),
        Err(SimError::Protocol(CsaError::Dimension { .. }))
    ));
}

#[test]
fn transcript_json_round_trip_and_reverify() {
    let p = make_params(11, 3, 4, 1, AlphaPolicy::SmallestValid).unwrap();
    let t = run_protocol(&p, 3, &RunInputs::default()).unwrap();
    let json = serde_json::to_string_pretty(&t).unwrap();
    let back: pedc_core::sim::Transcript = serde_json::from_str(&json).unwrap();
    assert_eq!(back, t);
    back.reverify().unwrap();
    // integers only
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    fn integers_only(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Number(n) => n.is_u64(),
            serde_json::Value::Array(a) => a.iter().all(integers_only),
            serde_json::Value::Object(o) => o.values().all(integers_only),
            _ => false,
        }
    }
    assert!(integers_only(&value));
    // serialized key order is the struct's declaration order
    let order = [
        "params",
        "master_seed",
        "messages",
        "user_noises",
        "coefficients",
        "collector_noise",
        "servers",
        "statistic",
        "cost",
        "rate",
    ];
    let positions: Vec<usize> = order
        .iter()
        .map(|k| json.find(&format!("\n  \"{k}\":")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
}

#[test]
fn tampered_transcript_fails_reverify() {
    let p = worked_params();
    let mut t = run_protocol(&p, 1, &worked_inputs()).unwrap();
    t.servers[1].answer = (t.servers[1].answer + 1) % 7;
    assert_eq!(t.reverify(), Err(SimError::Inconsistent("servers".into())));
    let mut t = run_protocol(&p, 1, &worked_inputs()).unwrap();
    t.statistic = vec![4];
    assert!(t.reverify().is_err());
}

#[test]
fn views_are_projections() {
    let t = run_protocol(&worked_params(), 42, &worked_inputs()).unwrap();
    assert_eq!(
        extract_view(&t, Role::Server(1)).unwrap(),
        PartyView::Server {
            server: 1,
            store: vec![vec![5, 2]],
            query: vec![vec![2, 3]],
            answer: 2,
        }
    );
    match extract_view(&t, Role::User(2)).unwrap() {
        PartyView::User {
            user,
            message,
            noise,
            uploads,
        } => {
            assert_eq!(user, 2);
            assert_eq!(message, vec![5]);
            assert_eq!(noise, vec![vec![4]]);
            let syms: Vec<Vec<u64>> = uploads.iter().map(|u| u.symbols.clone()).collect();
            assert_eq!(syms, vec![vec![2], vec![6], vec![3]]);
        }
        other => panic!("unexpected view {other:?}"),
    }
    assert!(extract_view(&t, Role::Server(4)).is_err());
    assert!(extract_view(&t, Role::User(0)).is_err());
}

#[test]
fn views_hide_other_parties_secrets() {
    let t = run_protocol(&worked_params(), 42, &worked_inputs()).unwrap();
    let keys = |role| {
        let v = serde_json::to_value(extract_view(&t, role).unwrap()).unwrap();
        v.as_object().unwrap().keys().cloned().collect::<Vec<_>>()
    };
    let collector = keys(Role::Collector);
    assert!(!collector
        .iter()
        .any(|k| k.contains("noise") && k != "collector_noise"));
    assert!(!collector.contains(&"messages".to_string()));
    assert!(!collector.contains(&"store".to_string()));
    let user = keys(Role::User(1));
    assert!(!user.contains(&"coefficients".to_string()));
    assert!(!user.contains(&"collector_noise".to_string()));
    let server = keys(Role::Server(2));
    assert_eq!(server, ["answer", "query", "role", "server", "store"]);
}

#[test]
fn roles_parse() {
    assert_eq!("user:3".parse::<Role>().unwrap(), Role::User(3));
    assert_eq!("server:1".parse::<Role>().unwrap(), Role::Server(1));
    assert_eq!("collector".parse::<Role>().unwrap(), Role::Collector);
    for bad in ["user", "server:x", "admin:1", ""] {
        assert!(bad.parse::<Role>().is_err(), "{bad}");
    }
    assert_eq!(Role::Server(7).to_string(), "server:7");
}

#[test]
fn sweep_reports_rates_and_infeasibility() {
    let grid = [
        GridPoint {
            q: 7,
            users: 2,
            servers: 3,
            colluders: 1,
        },
        GridPoint {
            q: 11,
            users: 2,
            servers: 5,
            colluders: 3,
        },
        GridPoint {
            q: 7,
            users: 2,
            servers: 3,
            colluders: 2,
        },
        GridPoint {
            q: 5,
            users: 2,
            servers: 5,
            colluders: 1,
        },
    ];
    let rows = sweep_rates(&grid, 1);
    assert_eq!(rows[0].rate, Rate::new(1, 3));
    assert_eq!(rows[0].matches, Some(true));
    assert_eq!(rows[1].rate, Rate::new(1, 5));
    assert_eq!(rows[1].matches, Some(true));
    assert_eq!(rows[2].rate, Rate::zero());
    assert_eq!(rows[2].capacity, Rate::zero());
    assert_eq!(rows[2].matches, Some(true));
    assert!(rows[2].reason.as_ref().unwrap().starts_with("E >= N-1"));
    assert_eq!(rows[3].matches, None);
    assert!(rows[3].reason.as_ref().unwrap().contains("field too small"));
}
