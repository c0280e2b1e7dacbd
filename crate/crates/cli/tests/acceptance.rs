//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use pedc_cli::{cmd_run, EXIT_OK};
use pedc_core::audit::{
    audit_collector_privacy_vs_server, audit_user_privacy_vs_collector,
    audit_user_privacy_vs_servers, independent_pairs, AuditOptions, AuditReport, NoiseHook,
    Verdict,
};
use pedc_core::csa::{make_params, AlphaPolicy, CsaError, SystemParams};
use pedc_core::gf::{build_decoding_matrix, solve_linear, FieldVector, GfError};
use pedc_core::sim::{run_protocol, RunInputs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS_PER_CONFIG: u64 = 100;

type Check = fn() -> Result<String, String>;

fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % q as u128) as u64;
        }
        b = (b as u128 * b as u128 % q as u128) as u64;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, q: u64) -> u64 {
    pow_mod(a, q - 2, q)
}

/// Draws N distinct evaluation points with `α + i ≠ 0` for `i` in `1..=L`.
fn random_alphas(rng: &mut impl Rng, q: u64, servers: usize, l: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(servers);
    while out.len() < servers {
        let a = rng.random_range(0..q);
        if !out.contains(&a) && (1..=l as u64).all(|i| (a + i) % q != 0) {
            out.push(a);
        }
    }
    out
}

fn feasible_grid() -> Vec<(usize, usize)> {
    (2..=6usize)
        .flat_map(|n| (1..=n.saturating_sub(2)).map(move |e| (n, e)))
        .collect()
}

fn exact_decodability() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdec0de);
    let (mut configs, mut runs, mut skipped) = (0, 0u64, Vec::new());
    for (n, e) in feasible_grid() {
        let l = n - e - 1;
        for q in [7u64, 11, 13] {
            for k in [2usize, 3, 5] {
                let base = match make_params(q, k, n, e, AlphaPolicy::SmallestValid) {
                    Ok(p) => p,
                    Err(CsaError::FieldTooSmall { .. }) => {
                        skipped.push(format!("q={q},N={n},E={e},K={k}"));
                        continue;
                    }
                    Err(err) => return Err(format!("q={q} K={k} N={n} E={e}: {err}")),
                };
                configs += 1;
                for seed in 0..SEEDS_PER_CONFIG {
                    // odd seeds use randomly drawn evaluation points
                    let params = if seed % 2 == 1 {
                        let alphas = random_alphas(&mut rng, q, n, l);
                        make_params(q, k, n, e, AlphaPolicy::Explicit(alphas))
                            .map_err(|x| x.to_string())?
                    } else {
                        base.clone()
                    };
                    let t = run_protocol(&params, seed, &RunInputs::default())
                        .map_err(|x| format!("q={q} K={k} N={n} E={e} seed={seed}: {x}"))?;
                    let expected: Vec<u64> = (0..l)
                        .map(|sym| {
                            (0..k).fold(0, |acc, user| {
                                (acc + t.coefficients[user] * t.messages[user][sym]) % q
                            })
                        })
                        .collect();
                    if t.statistic != expected {
                        return Err(format!(
                            "q={q} K={k} N={n} E={e} seed={seed}: decoded {:?}, expected {expected:?}",
                            t.statistic
                        ));
                    }
                    runs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{runs} runs over {configs} configs; {} field-too-small configs skipped ({})",
        skipped.len(),
        skipped.join(" ")
    ))
}

fn rate_matches() -> Result<String, String> {
    let mut checked = 0;
    for (n, e) in feasible_grid() {
        for q in [7u64, 11, 13] {
            for k in [2usize, 3, 5] {
                let Ok(params) = make_params(q, k, n, e, AlphaPolicy::SmallestValid) else {
                    continue;
                };
                let t =
                    run_protocol(&params, 7, &RunInputs::default()).map_err(|x| x.to_string())?;
                let measured = (t.statistic.len() as u64, t.cost.download_symbols);
                // a/b == (N-E-1)/N  <=>  a*N == (N-E-1)*b
                let cross_ok = measured.0 * n as u64 == (n - e - 1) as u64 * measured.1;
                let reduced_ok =
                    t.rate.numerator * n as u64 == (n - e - 1) as u64 * t.rate.denominator;
                if !cross_ok || !reduced_ok {
                    return Err(format!(
                        "q={q} K={k} N={n} E={e}: measured {}/{} (reported {}), expected {}/{n}",
                        measured.0,
                        measured.1,
                        t.rate,
                        n - e - 1
                    ));
                }
                checked += 1;
            }
        }
    }
    let mut rejected = 0;
    for n in 2..=6usize {
        for e in n - 1..=n + 1 {
            match make_params(13, 2, n, e, AlphaPolicy::SmallestValid) {
                Err(err @ CsaError::Infeasible { .. })
                    if err
                        .to_string()
                        .contains("correctness and security constraints contradict") =>
                {
                    rejected += 1
                }
                other => {
                    return Err(format!(
                        "N={n} E={e}: expected infeasibility, got {other:?}"
                    ))
                }
            }
        }
    }
    Ok(format!(
        "{checked} feasible configs at exact rate; {rejected} configs with E >= N-1 rejected"
    ))
}

fn zero_distance(r: &AuditReport) -> Result<(), String> {
    match (&r.verdict, &r.distance) {
        (Verdict::Pass, Some(d)) if d.is_zero() => Ok(()),
        _ => Err(format!(
            "{} [{}] verdict {:?} distance {:?}",
            r.constraint, r.scope, r.verdict, r.distance
        )),
    }
}

fn independent(f: &[u64], g: &[u64], q: u64) -> bool {
    (0..f.len())
        .any(|i| (0..f.len()).any(|j| !(f[i] * g[j] + q * q - f[j] * g[i]).is_multiple_of(q)))
}

fn privacy_audits() -> Result<String, String> {
    let opts = AuditOptions::default();
    let mut summary = Vec::new();
    for k in [1usize, 2] {
        let params =
            make_params(5, k, 3, 1, AlphaPolicy::SmallestValid).map_err(|x| x.to_string())?;
        assert_eq!(params.message_len(), 1);

        for n in 1..=3 {
            zero_distance(
                &audit_user_privacy_vs_servers(&params, &[n], &opts).map_err(|x| x.to_string())?,
            )?;
        }

        let mut p3 = 0;
        if k >= 2 {
            let pairs = independent_pairs(&params, 10);
            if pairs.len() < 10 {
                return Err(format!("only {} independent pairs", pairs.len()));
            }
            for (f, g) in &pairs {
                if !independent(f, g, 5) {
                    return Err(format!("pair {f:?} {g:?} is dependent"));
                }
                for n in 1..=3 {
                    zero_distance(
                        &audit_collector_privacy_vs_server(&params, n, f, g, &opts)
                            .map_err(|x| x.to_string())?,
                    )?;
                    p3 += 1;
                }
            }
        }

        let fs: Vec<Vec<u64>> = if k == 1 {
            vec![vec![1], vec![2], vec![3]]
        } else {
            vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 3]]
        };
        for f in &fs {
            zero_distance(
                &audit_user_privacy_vs_collector(&params, f, &opts).map_err(|x| x.to_string())?,
            )?;
        }
        let p3_text = if k == 1 {
            "P3 n/a (no independent pair when K=1)".to_string()
        } else {
            format!("P3 {p3} (pair, server) checks")
        };
        summary.push(format!(
            "K={k}: P1 3 subsets, {p3_text}, P2 {} choices of f",
            fs.len()
        ));
    }
    Ok(summary.join("; "))
}

fn expect_witness(r: AuditReport) -> Result<String, String> {
    match (&r.verdict, &r.witness) {
        (Verdict::Fail, Some(w)) if w.left_probability != w.right_probability => Ok(format!(
            "{} outcome {:?}: {} vs {}",
            r.constraint, w.outcome, w.left_probability, w.right_probability
        )),
        _ => Err(format!(
            "{} [{}] did not fail with a witness: {:?}",
            r.constraint, r.scope, r.verdict
        )),
    }
}

fn audit_power() -> Result<String, String> {
    let params = make_params(5, 2, 3, 1, AlphaPolicy::SmallestValid).map_err(|x| x.to_string())?;
    let with = |hook| AuditOptions {
        hook,
        ..Default::default()
    };
    let p1 = audit_user_privacy_vs_servers(&params, &[2], &with(NoiseHook::ZeroUserNoise))
        .map_err(|x| x.to_string())?;
    let p2 = audit_user_privacy_vs_collector(&params, &[1, 1], &with(NoiseHook::ZeroUserNoise))
        .map_err(|x| x.to_string())?;
    let p3 = audit_collector_privacy_vs_server(
        &params,
        1,
        &[1, 0],
        &[0, 1],
        &with(NoiseHook::ZeroCollectorNoise),
    )
    .map_err(|x| x.to_string())?;
    Ok([
        expect_witness(p1)?,
        expect_witness(p2)?,
        expect_witness(p3)?,
    ]
    .join("; "))
}

const PRIMES: [u64; 12] = [
    3,
    5,
    7,
    11,
    13,
    17,
    31,
    101,
    257,
    7919,
    65537,
    2_147_483_647,
];

fn decoding_matrix_invertible() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a7e);
    let mut draws = 0;
    while draws < 1000 {
        let q = PRIMES[rng.random_range(0..PRIMES.len())];
        let n = rng.random_range(2..=8usize);
        let e = rng.random_range(0..=n - 2);
        let l = n - e - 1;
        if q < (n + l) as u64 {
            continue;
        }
        let k = rng.random_range(1..=3usize);
        let alphas = random_alphas(&mut rng, q, n, l);
        let params: SystemParams = make_params(q, k, n, e, AlphaPolicy::Explicit(alphas.clone()))
            .map_err(|x| format!("q={q} N={n} E={e} {alphas:?}: {x}"))?;
        let a = build_decoding_matrix(&params);

        // rows must follow [1/(1+α) .. 1/(L+α), 1, α, .., α^E]
        for (row, &alpha) in alphas.iter().enumerate() {
            let mut expected: Vec<u64> = (1..=l as u64)
                .map(|i| inv_mod((i + alpha) % q, q))
                .collect();
            expected.extend((0..=e as u64).map(|p| pow_mod(alpha, p, q)));
            if a.row(row) != expected.as_slice() {
                return Err(format!(
                    "q={q} alphas={alphas:?}: row {row} is {:?}",
                    a.row(row)
                ));
            }
        }

        let b: Vec<u64> = (0..n).map(|_| rng.random_range(0..q)).collect();
        let bv = FieldVector::from_values(params.modulus(), &b).map_err(|x| x.to_string())?;
        let x = match solve_linear(&a, &bv) {
            Ok(x) => x,
            Err(GfError::SingularMatrix) => {
                return Err(format!("singular at q={q} N={n} E={e} {alphas:?}"))
            }
            Err(other) => return Err(other.to_string()),
        };
        for (row, &rhs) in b.iter().enumerate() {
            let lhs = a
                .row(row)
                .iter()
                .zip(x.values())
                .fold(0u128, |acc, (&m, &v)| {
                    (acc + m as u128 * v as u128) % q as u128
                });
            if lhs as u64 != rhs {
                return Err(format!("A x != b at q={q} N={n} E={e} row {row}"));
            }
        }
        draws += 1;
    }
    Ok(format!(
        "{draws} random valid draws, all solvable and verified"
    ))
}

fn deterministic_transcripts() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|x| x.to_string())?;
    let configs = [
        r#"{"q":7,"K":2,"N":3,"E":1,"master_seed":99}"#,
        r#"{"q":13,"K":5,"N":6,"E":2,"master_seed":12345}"#,
        r#"{"q":11,"K":3,"N":5,"E":1,"alphas":[6,4,0,2,3],"master_seed":0}"#,
    ];
    let mut bytes = 0;
    for (i, text) in configs.iter().enumerate() {
        let cfg = dir.path().join(format!("c{i}.json"));
        fs::write(&cfg, text).map_err(|x| x.to_string())?;
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("t{i}_{rep}.json"));
            let (mut so, mut se) = (Vec::new(), Vec::new());
            let code = cmd_run(&cfg, None, Some(&out), &mut so, &mut se);
            if code != EXIT_OK {
                return Err(format!(
                    "config {i}: exit {code}: {}",
                    String::from_utf8_lossy(&se)
                ));
            }
            outputs.push(fs::read(&out).map_err(|x| x.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("config {i}: transcripts differ"));
        }
        bytes += outputs[0].len();
    }
    Ok(format!(
        "{} configs, run twice each, {bytes} identical bytes",
        configs.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 6] = [
        ("exact decodability", exact_decodability),
        ("rate equals (N-E-1)/N, E >= N-1 rejected", rate_matches),
        ("privacy audits at distance 0", privacy_audits),
        ("audits fail without noise", audit_power),
        ("decoding matrix invertible", decoding_matrix_invertible),
        ("byte-identical transcripts", deterministic_transcripts),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
