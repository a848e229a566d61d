//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails or exceeds its time budget.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satshare::consensus::MessageKind;
use satshare::geometry::{deviation_angle, EarthModel};
use satshare::ledger::{Block, Validator};
use satshare::market::{best_response_power, optimal_price, Binding, MarketParams};
use satshare::reputation::{trust_triple, InteractionLog, Outcome, ReputationTable};
use satshare::sim::{
    initial_balances, initial_table, run_scenario, scenario_registry, sweep_fig4, sweep_fig5,
};
use satshare::NodeId;

type Check = Result<(), String>;

/// Name, check and time budget in seconds.
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Epochs after which a node that objects to every proposal drops below
/// the default-scenario threshold: 3 operators, prior (3, 0, 0.9), phi 0.5,
/// three negative votes per epoch.
const EXCLUSION_EPOCHS: u64 = 2;

fn fig4_trends() -> Check {
    let cfg = common::default_config();
    let e = &cfg.experiment;
    ensure(
        e.gamma_grid.len() == 10 && e.bandwidth_grid.len() == 10,
        || "grid is not 10x10".into(),
    )?;
    let rows = sweep_fig4(
        &cfg.market,
        cfg.pricing.range(),
        cfg.pricing.grid,
        &e.gamma_grid,
        &e.bandwidth_grid,
    )
    .map_err(|e| e.to_string())?;
    let nb = e.bandwidth_grid.len();
    let at = |gi: usize, bi: usize| rows[gi * nb + bi].pi_star;
    let tol = 1e-6;
    for bi in 0..nb {
        let line: Vec<f64> = (0..e.gamma_grid.len()).map(|gi| at(gi, bi)).collect();
        ensure(line.windows(2).all(|w| w[1] >= w[0] - tol), || {
            format!("pi* falls along gamma at B index {bi}: {line:?}")
        })?;
        ensure(line.windows(2).any(|w| w[1] > w[0] + tol), || {
            format!("pi* flat along gamma at B index {bi}")
        })?;
    }
    for gi in 0..e.gamma_grid.len() {
        let line: Vec<f64> = (0..nb).map(|bi| at(gi, bi)).collect();
        ensure(line.windows(2).all(|w| w[1] <= w[0] + tol), || {
            format!("pi* rises along B at gamma index {gi}: {line:?}")
        })?;
        ensure(line.windows(2).any(|w| w[1] < w[0] - tol), || {
            format!("pi* flat along B at gamma index {gi}")
        })?;
    }
    Ok(())
}

fn fig5_trends() -> Check {
    let cfg = common::default_config();
    let e = &cfg.experiment;
    ensure(e.pi_grid.len() >= 50, || {
        "fewer than 50 price points".into()
    })?;
    let rows = sweep_fig5(&cfg.market, &e.pi_grid, &e.omega_grid).map_err(|e| e.to_string())?;
    let np = e.pi_grid.len();
    for (oi, omega) in e.omega_grid.iter().enumerate() {
        let u: Vec<f64> = rows[oi * np..(oi + 1) * np].iter().map(|r| r.u_s).collect();
        let signs: Vec<i8> = u
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|d| d.abs() > 1e-9)
            .map(|d| if d > 0.0 { 1 } else { -1 })
            .collect();
        let changes = signs.windows(2).filter(|s| s[0] != s[1]).count();
        ensure(changes == 1 && signs[0] == 1, || {
            format!("omega {omega}: U_s not unimodal ({changes} sign changes)")
        })?;
        let sol = optimal_price(
            &MarketParams {
                omega: *omega,
                ..cfg.market.clone()
            },
            cfg.pricing.range(),
            cfg.pricing.grid,
        )
        .map_err(|e| e.to_string())?;
        ensure(
            sol.pi_star > e.pi_grid[0] && sol.pi_star < e.pi_grid[np - 1],
            || {
                format!(
                    "omega {omega}: optimum {} outside the price grid",
                    sol.pi_star
                )
            },
        )?;
    }
    for oi in 1..e.omega_grid.len() {
        for pi in 0..np {
            let (lo, hi) = (rows[(oi - 1) * np + pi].u_s, rows[oi * np + pi].u_s);
            ensure(hi >= lo - 1e-12, || {
                format!("U_s decreases in omega at pi {}", e.pi_grid[pi])
            })?;
        }
    }
    Ok(())
}

fn best_response_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    let mut interior = 0;
    while checked < 100 {
        let p = MarketParams {
            omega: rng.random_range(0.5..2.0),
            f_cs: rng.random_range(0.1..0.5),
            f_ns: rng.random_range(0.05..0.3),
            p_n: rng.random_range(0.5..2.0),
            n0_alpha_c: rng.random_range(1e-4..1e-2),
            n0_alpha_n: rng.random_range(1e-4..1e-2),
            gamma_tar: rng.random_range(0.05..0.8),
            ..MarketParams::default()
        }
        .with_bandwidth(rng.random_range(1.0..20.0));
        let pi = rng.random_range(0.05..20.0);
        let theta = rng.random_range(0.3..2.0);
        let br = best_response_power(&p, pi, theta);
        let Some((grid_p, step)) = common::grid_best_power(&p, pi, theta, 1_000_000) else {
            ensure(!br.feasible, || {
                "library finds a power where the oracle finds none".into()
            })?;
            continue;
        };
        checked += 1;
        ensure(br.feasible, || {
            "library reports infeasible where the oracle finds powers".into()
        })?;
        ensure((br.p_c_star - grid_p).abs() <= step * (1.0 + 1e-9), || {
            format!(
                "best response {} vs grid {grid_p} (step {step})",
                br.p_c_star
            )
        })?;
        if br.binding == Binding::Interior {
            interior += 1;
            let h = 1e-6 * br.p_c_star.max(1e-3);
            let d = (common::utility(&p, pi, theta, br.p_c_star + h)
                - common::utility(&p, pi, theta, br.p_c_star - h))
                / (2.0 * h);
            let scale = pi * theta * p.f_cs;
            ensure(d.abs() <= 1e-5 * scale, || {
                format!("derivative {d} at interior optimum, scale {scale}")
            })?;
        }
    }
    ensure(interior > 10, || {
        format!("only {interior} interior optima sampled")
    })
}

fn reputation_algebra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10_000 {
        let log = InteractionLog {
            positive: rng.random_range(0..1000),
            negative: rng.random_range(0..1000),
            suc: rng.random(),
        };
        let t = trust_triple(&log);
        ensure(
            (t.trusted + t.untrusted + t.indefinite - 1.0).abs() <= 1e-12,
            || format!("{log:?} sums to {}", t.sum()),
        )?;
        let more_pos = trust_triple(&InteractionLog {
            positive: log.positive + 1,
            ..log
        });
        let more_neg = trust_triple(&InteractionLog {
            negative: log.negative + 1,
            ..log
        });
        ensure(
            more_pos.trusted >= t.trusted && more_pos.untrusted <= t.untrusted,
            || format!("positive not monotone at {log:?}"),
        )?;
        ensure(
            more_neg.untrusted >= t.untrusted && more_neg.trusted <= t.trusted,
            || format!("negative not monotone at {log:?}"),
        )?;
        let better = trust_triple(&InteractionLog {
            suc: (log.suc + 0.1).min(1.0),
            ..log
        });
        ensure(better.indefinite <= t.indefinite, || {
            format!("indefinite grows with quality at {log:?}")
        })?;
    }
    for _ in 0..200 {
        let phi = rng.random();
        let mut table = ReputationTable::new(phi, 0.0).map_err(|e| e.to_string())?;
        let node = NodeId::from("n");
        let ops: Vec<String> = (0..rng.random_range(1..8))
            .map(|i| format!("op{i}"))
            .collect();
        for op in &ops {
            for _ in 0..rng.random_range(0..20) {
                let outcome = if rng.random_bool(0.5) {
                    Outcome::Positive
                } else {
                    Outcome::Negative
                };
                table
                    .record_interaction(&op.as_str().into(), &node, outcome, rng.random())
                    .map_err(|e| e.to_string())?;
            }
        }
        for op in &ops {
            let Some(entry) = table.entry(&op.as_str().into(), &node).copied() else {
                continue;
            };
            let before = table.node_reputation(&node).map_err(|e| e.to_string())?;
            table.remove_entry(&op.as_str().into(), &node);
            let after = table.node_reputation(&node).map_err(|e| e.to_string())?;
            let delta = before - after;
            let expected = entry.triple.trusted + phi * entry.triple.indefinite;
            ensure((delta - expected).abs() <= 1e-12, || {
                format!("removal delta {delta} vs entry score {expected}")
            })?;
        }
    }
    Ok(())
}

fn tamper_evidence() -> Check {
    let mut cfg = common::default_config();
    cfg.epochs = 20;
    let report = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let chain = report.chain;
    ensure(chain.len() == 21, || {
        format!("chain has {} blocks", chain.len())
    })?;
    let validator = Validator::new(
        scenario_registry(&cfg),
        cfg.ledger.chain_params(),
        initial_balances(&cfg),
    );
    let genesis = Block::genesis();
    ensure(
        validator.validate_chain(&chain, &genesis).is_valid(),
        || "untouched chain is invalid".into(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..1000 {
        let mut mutated = chain.clone();
        let h = rng.random_range(0..chain.len());
        let field = common::flip_bit(&mut mutated[h], &mut rng);
        let verdict = validator.validate_chain(&mutated, &genesis);
        ensure(verdict.invalid_height() == Some(h as u64), || {
            format!("trial {trial}: flip in {field} at height {h} gave {verdict:?}")
        })?;
    }
    Ok(())
}

fn consensus_exclusion() -> Check {
    let cfg = common::default_config();
    let honest = cfg
        .nodes
        .iter()
        .filter(|n| n.behavior == satshare::consensus::Behavior::Honest)
        .count();
    let malicious: Vec<NodeId> = cfg
        .nodes
        .iter()
        .filter(|n| n.behavior == satshare::consensus::Behavior::MaliciousReject)
        .map(|n| n.node_id.clone())
        .collect();
    ensure(
        honest == 4 && malicious.len() == 2 && cfg.ledger.max_retries == 2 && cfg.epochs == 30,
        || "default scenario is not 4 honest + 2 rejecting, 2 retries, 30 epochs".into(),
    )?;
    let r = run_scenario(&cfg).map_err(|e| e.to_string())?;
    ensure(r.epochs.len() == 30 && r.chain_height == 30, || {
        format!("only {} epochs committed", r.chain_height)
    })?;
    ensure(
        r.epochs
            .iter()
            .enumerate()
            .all(|(i, e)| e.height == i as u64 + 1),
        || "an epoch did not commit".into(),
    )?;
    let digests: Vec<_> = r.honest_digests.values().collect();
    ensure(
        digests.len() == 4 && digests.iter().all(|d| **d == r.chain_digest),
        || "honest replicas diverge".into(),
    )?;
    let threshold = r.threshold;
    let seeded = initial_table(&cfg).map_err(|e| e.to_string())?;
    for node in &malicious {
        let mut prev = seeded.node_reputation(node).map_err(|e| e.to_string())?;
        let mut excluded_at = None;
        for e in &r.epochs {
            let rep = e.reputation_after[node];
            if excluded_at.is_none() {
                ensure(rep < prev, || {
                    format!("{node} reputation did not fall in epoch {}", e.epoch)
                })?;
                if rep < threshold {
                    excluded_at = Some(e.epoch);
                }
            }
            prev = rep;
        }
        ensure(excluded_at == Some(EXCLUSION_EPOCHS), || {
            format!("{node} excluded at {excluded_at:?}")
        })?;
        let late = r
            .trace
            .iter()
            .filter(|t| {
                t.round > EXCLUSION_EPOCHS && t.kind == MessageKind::Propose && &t.receiver == node
            })
            .count();
        ensure(late == 0, || {
            format!("{node} received {late} proposals after exclusion")
        })?;
    }
    Ok(())
}

fn conservation_determinism() -> Check {
    let cfg = common::default_config();
    let a = run_scenario(&cfg).map_err(|e| e.to_string())?;
    let b = run_scenario(&cfg).map_err(|e| e.to_string())?;
    ensure(a.final_total() == a.initial_total + a.minted, || {
        format!(
            "total {} != initial {} + minted {}",
            a.final_total(),
            a.initial_total,
            a.minted
        )
    })?;
    let traded: u128 = a
        .epochs
        .iter()
        .flat_map(|e| &e.trades)
        .map(|t| t.amount as u128)
        .sum();
    let debited: u128 = cfg
        .buyers
        .iter()
        .map(|b| (b.balance - a.balance(&b.id)) as u128)
        .sum();
    let credited = a.balance(&cfg.ledger.satellite_account) as u128;
    ensure(
        traded > 0 && traded == debited && debited == credited,
        || format!("traded {traded}, debited {debited}, credited {credited}"),
    )?;
    ensure(
        a.trace_hash == b.trace_hash && a.chain_digest == b.chain_digest,
        || "runs differ".into(),
    )
}

fn geometry_sanity() -> Check {
    let earth = EarthModel::new(6371.0).map_err(|e| e.to_string())?;
    let centre = deviation_angle(1500.0, 1500.0, 0.0, &earth).map_err(|e| e.to_string())?;
    ensure(centre.abs() <= 1e-6, || format!("centre angle {centre}"))?;
    let flat = EarthModel::new(1e9).map_err(|e| e.to_string())?;
    for (h, x1, x2) in [
        (600.0, 0.0, 40.0),
        (1200.0, 100.0, 130.0),
        (800.0, -50.0, 20.0),
        (35786.0, 300.0, 200.0),
    ] {
        let d_o_s = f64::hypot(h, x1);
        let d_mn_s = f64::hypot(h, x2);
        let got =
            deviation_angle(d_o_s, d_mn_s, (x2 - x1).abs(), &flat).map_err(|e| e.to_string())?;
        let want = common::flat_angle(h, x1, x2);
        ensure((got - want).abs() <= 1e-6, || {
            format!("flat case ({h}, {x1}, {x2}): {got} vs {want}")
        })?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 fig4 trends", fig4_trends, 60),
        ("2 fig5 trends", fig5_trends, 30),
        ("3 best-response oracle", best_response_oracle, 60),
        ("4 reputation algebra", reputation_algebra, 5),
        ("5 tamper evidence", tamper_evidence, 10),
        ("6 consensus exclusion", consensus_exclusion, 10),
        (
            "7 conservation and determinism",
            conservation_determinism,
            10,
        ),
        ("8 geometry sanity", geometry_sanity, 1),
    ];
    let mut failed = Vec::new();
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|()| {
            ensure(took <= Duration::from_secs(budget), || {
                format!("took {took:?}, budget {budget}s")
            })
        });
        match &result {
            Ok(()) => println!("ACCEPTANCE {name}: PASS ({took:.2?})"),
            Err(e) => {
                println!("ACCEPTANCE {name}: FAIL ({took:.2?}) {e}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
