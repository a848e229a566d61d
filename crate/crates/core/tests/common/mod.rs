//! Reference implementations written directly from the model formulas,
//! independent of the library's solver code.
#![allow(dead_code)]

use rand::Rng;
use satshare::ledger::Block;
use satshare::market::{MarketParams, PreferenceDensity};
use satshare::sim::ScenarioConfig;

pub const DEFAULT_SCENARIO: &str = include_str!("../../../../scenarios/default.toml");

pub fn default_config() -> ScenarioConfig {
    ScenarioConfig::from_toml_str(DEFAULT_SCENARIO).expect("default scenario parses")
}

fn disturbance(p: &MarketParams) -> f64 {
    p.p_n * p.f_ns + p.n0_alpha_c * p.bandwidth_c
}

/// Entrant powers meeting both SINR floors, unrounded.
pub fn feasible_powers(p: &MarketParams) -> Option<(f64, f64)> {
    let lo = p.gamma_tar * disturbance(p) / p.f_cs;
    let hi = (p.p_n * p.f_ns / p.gamma_tar - p.n0_alpha_n * p.bandwidth_n) / p.f_cs;
    (hi >= 0.0 && lo <= hi).then_some((lo, hi))
}

pub fn utility(p: &MarketParams, pi: f64, theta: f64, power: f64) -> f64 {
    let sinr = power * p.f_cs / disturbance(p);
    p.omega * (1.0 + sinr).log2() - p.epsilon * p.bandwidth_i - pi * theta * power * p.f_cs
}

/// Argmax of `utility` over `n` evenly spaced powers on the feasible
/// interval, with the grid step.
pub fn grid_best_power(p: &MarketParams, pi: f64, theta: f64, n: usize) -> Option<(f64, f64)> {
    let (lo, hi) = feasible_powers(p)?;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..n {
        let x = if i == n - 1 { hi } else { lo + step * i as f64 };
        let u = utility(p, pi, theta, x);
        if u > best.1 {
            best = (x, u);
        }
    }
    Some((best.0, step))
}

/// Payment of one user, with the best power found by bisection on the
/// derivative instead of the closed form.
pub fn payment(p: &MarketParams, pi: f64, theta: f64) -> f64 {
    let Some((lo, hi)) = feasible_powers(p) else {
        return 0.0;
    };
    let d = disturbance(p);
    let slope =
        |x: f64| p.omega / std::f64::consts::LN_2 * p.f_cs / (d + p.f_cs * x) - pi * theta * p.f_cs;
    let power = if slope(lo) <= 0.0 {
        lo
    } else if slope(hi) >= 0.0 {
        hi
    } else {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if slope(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    if utility(p, pi, theta, power) < 0.0 {
        0.0
    } else {
        pi * theta * power * p.f_cs
    }
}

/// Stratified Monte-Carlo estimate of the satellite profit: one uniform
/// draw per stratum of the preference support.
pub fn satellite_utility_mc<R: Rng>(p: &MarketParams, pi: f64, strata: usize, rng: &mut R) -> f64 {
    let expected = match p.density {
        PreferenceDensity::PointMass { theta } => payment(p, pi, theta),
        PreferenceDensity::Uniform { lo, hi } => {
            let w = (hi - lo) / strata as f64;
            (0..strata)
                .map(|k| payment(p, pi, lo + w * (k as f64 + rng.random::<f64>())))
                .sum::<f64>()
                / strata as f64
        }
        PreferenceDensity::Triangular { lo, mode, hi } => {
            // weight each stratum by the density at its draw
            let w = (hi - lo) / strata as f64;
            let pdf = |t: f64| {
                if t < mode {
                    2.0 * (t - lo) / ((hi - lo) * (mode - lo))
                } else {
                    2.0 * (hi - t) / ((hi - lo) * (hi - mode))
                }
            };
            (0..strata)
                .map(|k| {
                    let t = lo + w * (k as f64 + rng.random::<f64>());
                    payment(p, pi, t) * pdf(t) * w
                })
                .sum()
        }
    };
    p.n_channels as f64 * (expected + p.epsilon * p.bandwidth_i - p.kappa * p.x_loss)
}

/// Angle at the satellite between the cell centre and the user on a flat
/// ground plane, satellite at height `h` above the origin.
pub fn flat_angle(h: f64, cell_x: f64, user_x: f64) -> f64 {
    (user_x.atan2(h) - cell_x.atan2(h)).abs()
}

/// Applies one bit flip chosen by `pick` to a block and returns a label.
pub fn flip_bit<R: Rng>(block: &mut Block, rng: &mut R) -> String {
    fn flip_bytes<R: Rng>(bytes: &mut [u8], rng: &mut R) {
        let i = rng.random_range(0..bytes.len());
        bytes[i] ^= 1 << rng.random_range(0..8);
    }
    // ASCII-preserving flip for identifiers and memos
    fn flip_str<R: Rng>(s: &mut String, rng: &mut R) {
        let mut b = std::mem::take(s).into_bytes();
        let i = rng.random_range(0..b.len());
        b[i] ^= 1 << rng.random_range(0..7);
        *s = String::from_utf8(b).expect("ascii stays ascii");
    }
    fn flip_u64<R: Rng>(v: &mut u64, rng: &mut R) {
        *v ^= 1 << rng.random_range(0..64);
    }
    let h = &mut block.header;
    let n_tx = block.transactions.len();
    loop {
        match rng.random_range(0..9) {
            0 => {
                flip_u64(&mut h.height, rng);
                return "height".into();
            }
            1 => {
                flip_bytes(&mut h.prev_hash.0, rng);
                return "prev_hash".into();
            }
            2 => {
                flip_bytes(&mut h.merkle_root.0, rng);
                return "merkle_root".into();
            }
            3 => {
                flip_u64(&mut h.timestamp, rng);
                return "timestamp".into();
            }
            4 => {
                flip_u64(&mut h.nonce, rng);
                return "nonce".into();
            }
            5 => {
                h.difficulty ^= 1 << rng.random_range(0..32);
                return "difficulty".into();
            }
            6 => {
                flip_str(&mut h.miner_id.0, rng);
                return "miner_id".into();
            }
            7 if !block.miner_signature.is_empty() => {
                flip_bytes(&mut block.miner_signature, rng);
                return "miner_signature".into();
            }
            8 if n_tx > 0 => {
                let tx = &mut block.transactions[rng.random_range(0..n_tx)];
                match rng.random_range(0..7) {
                    0 => flip_bytes(&mut tx.tx_id.0, rng),
                    1 => flip_str(&mut tx.payer.0, rng),
                    2 => flip_str(&mut tx.payee.0, rng),
                    3 => flip_u64(&mut tx.amount, rng),
                    4 => flip_str(&mut tx.memo, rng),
                    5 if !tx.signature.is_empty() => flip_bytes(&mut tx.signature, rng),
                    6 => flip_u64(&mut tx.timestamp, rng),
                    _ => continue,
                }
                return "transaction".into();
            }
            _ => continue,
        }
    }
}
