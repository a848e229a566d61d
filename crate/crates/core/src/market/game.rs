use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::quadrature::adaptive_simpson;
use super::search::grid_then_golden;
use super::{MarketError, MarketParams, PreferenceDensity};

/// Absolute tolerance of the preference quadrature.
pub const SIMPSON_TOL: f64 = 1e-9;

/// Golden-section stopping width relative to the price range.
const PRICE_REL_WIDTH: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Interior,
    QosFloor,
    IncumbentCap,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub p_c_star: f64,
    pub feasible: bool,
    pub binding: Binding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for PriceRange {
    fn default() -> Self {
        Self { lo: 0.01, hi: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingSolution {
    pub pi_star: f64,
    pub u_s_star: f64,
    /// Expected interference payment of one user at `pi_star`.
    pub expected_payment: f64,
}

pub fn user_sinr(params: &MarketParams, p_c: f64) -> f64 {
    p_c * params.f_cs / params.entrant_disturbance()
}

pub fn incumbent_sinr(params: &MarketParams, p_c: f64) -> f64 {
    params.p_n * params.f_ns / (p_c * params.f_cs + params.n0_alpha_n * params.bandwidth_n)
}

pub fn user_utility(params: &MarketParams, pi: f64, theta: f64, p_c: f64) -> f64 {
    let snr = p_c * params.f_cs / params.entrant_disturbance();
    params.omega * snr.ln_1p() / LN_2 - params.bandwidth_charge() - pi * theta * p_c * params.f_cs
}

/// Precomputed pieces of the follower's problem.
struct Follower<'a> {
    params: &'a MarketParams,
    disturbance: f64,
    /// Feasible power interval; `None` when the two SINR floors conflict.
    bounds: Option<(f64, f64)>,
}

impl<'a> Follower<'a> {
    fn new(params: &'a MarketParams) -> Self {
        Self {
            params,
            disturbance: params.entrant_disturbance(),
            bounds: feasible_interval(params),
        }
    }

    fn candidate(&self, pi: f64, theta: f64) -> f64 {
        let price = pi * theta;
        if price <= 0.0 {
            return f64::INFINITY;
        }
        (self.params.omega / (LN_2 * price) - self.disturbance) / self.params.f_cs
    }

    fn respond(&self, pi: f64, theta: f64) -> BestResponse {
        let Some((lo, hi)) = self.bounds else {
            return BestResponse {
                p_c_star: 0.0,
                feasible: false,
                binding: Binding::Infeasible,
            };
        };
        let p = self.candidate(pi, theta);
        let (p_c_star, binding) = if p < lo {
            (lo, Binding::QosFloor)
        } else if p > hi {
            (hi, Binding::IncumbentCap)
        } else {
            (p, Binding::Interior)
        };
        BestResponse {
            p_c_star,
            feasible: true,
            binding,
        }
    }

    /// Utility at the best response, `None` if infeasible.
    fn surplus(&self, pi: f64, theta: f64) -> Option<(BestResponse, f64)> {
        let br = self.respond(pi, theta);
        br.feasible
            .then(|| (br, user_utility(self.params, pi, theta, br.p_c_star)))
    }

    /// Interference payment of a user that trades, without the
    /// participation test.
    fn raw_payment(&self, pi: f64, theta: f64) -> f64 {
        let (lo, hi) = self.bounds.expect("only called on feasible markets");
        let p = self.candidate(pi, theta).clamp(lo, hi);
        pi * theta * p * self.params.f_cs
    }

    fn payment(&self, pi: f64, theta: f64) -> f64 {
        match self.surplus(pi, theta) {
            Some((br, u)) if u >= 0.0 => pi * theta * br.p_c_star * self.params.f_cs,
            _ => 0.0,
        }
    }

    /// Largest preference that still trades. Surplus is non-increasing in
    /// theta, so the trading set is `[a, cutoff]`.
    fn participation_cutoff(&self, pi: f64, a: f64, b: f64) -> Option<f64> {
        let trades = |t: f64| self.surplus(pi, t).is_some_and(|(_, u)| u >= 0.0);
        if !trades(a) {
            return None;
        }
        if trades(b) {
            return Some(b);
        }
        let (mut lo, mut hi) = (a, b);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Some(lo);
            }
            if trades(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    fn expected_payment(&self, pi: f64) -> f64 {
        let density = &self.params.density;
        if let PreferenceDensity::PointMass { theta } = *density {
            return self.payment(pi, theta);
        }
        let Some((lo, hi)) = self.bounds else {
            return 0.0;
        };
        let (a, b) = density.support();
        let Some(end) = self.participation_cutoff(pi, a, b) else {
            return 0.0;
        };
        // Preferences at which the best response switches regime.
        let omega = self.params.omega;
        let f = self.params.f_cs;
        let cap_switch = omega / (LN_2 * pi * (self.disturbance + f * hi));
        let floor_switch = omega / (LN_2 * pi * (self.disturbance + f * lo));
        let mut cuts = vec![a, end];
        cuts.extend(
            [cap_switch, floor_switch]
                .into_iter()
                .chain(density.kinks())
                .filter(|&t| t > a && t < end),
        );
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let tol = SIMPSON_TOL / (cuts.len() - 1).max(1) as f64;
        let integrand = |t: f64| self.raw_payment(pi, t) * density.pdf(t);
        cuts.windows(2)
            .map(|w| adaptive_simpson(&integrand, w[0], w[1], tol))
            .sum()
    }
}

/// Power interval satisfying both SINR floors, nudged by ulps so that the
/// floors hold exactly when re-evaluated.
fn feasible_interval(params: &MarketParams) -> Option<(f64, f64)> {
    let gamma = params.gamma_tar;
    let mut lo = gamma * params.entrant_disturbance() / params.f_cs;
    while user_sinr(params, lo) < gamma {
        lo = lo.next_up();
    }
    let mut hi =
        (params.p_n * params.f_ns / gamma - params.n0_alpha_n * params.bandwidth_n) / params.f_cs;
    if hi < 0.0 {
        return None;
    }
    while hi > 0.0 && incumbent_sinr(params, hi) < gamma {
        hi = hi.next_down();
    }
    if lo > hi || incumbent_sinr(params, hi) < gamma {
        return None;
    }
    Some((lo, hi))
}

/// Utility-maximising entrant power at price `pi` and preference `theta`,
/// clamped to the interval where both the entrant's and the incumbent's
/// SINR meet the target.
pub fn best_response_power(params: &MarketParams, pi: f64, theta: f64) -> BestResponse {
    Follower::new(params).respond(pi, theta)
}

/// Feasible best response with non-negative utility; `None` means the user
/// abstains.
pub fn participates(params: &MarketParams, pi: f64, theta: f64) -> Option<BestResponse> {
    match Follower::new(params).surplus(pi, theta) {
        Some((br, u)) if u >= 0.0 => Some(br),
        _ => None,
    }
}

/// Interference charge paid by one user; zero when it abstains.
pub fn user_payment(params: &MarketParams, pi: f64, theta: f64) -> f64 {
    Follower::new(params).payment(pi, theta)
}

/// Interference charge averaged over the preference density.
pub fn expected_payment(params: &MarketParams, pi: f64) -> f64 {
    Follower::new(params).expected_payment(pi)
}

/// Satellite profit at price `pi`.
pub fn satellite_utility(params: &MarketParams, pi: f64) -> f64 {
    let fixed = params.bandwidth_charge() - params.kappa * params.x_loss;
    params.n_channels as f64 * (expected_payment(params, pi) + fixed)
}

/// Profit-maximising interference price over `range`: grid scan with
/// `grid` points, then golden-section refinement around the best point.
pub fn optimal_price(
    params: &MarketParams,
    range: PriceRange,
    grid: usize,
) -> Result<PricingSolution, MarketError> {
    if !(range.lo > 0.0 && range.hi > range.lo) {
        return Err(MarketError::InvalidParams(format!(
            "price range must be positive and non-empty, got [{}, {}]",
            range.lo, range.hi
        )));
    }
    if grid < 3 {
        return Err(MarketError::InvalidParams(format!(
            "price grid needs >= 3 points, got {grid}"
        )));
    }
    params.validate()?;
    let follower = Follower::new(params);
    let fixed = params.bandwidth_charge() - params.kappa * params.x_loss;
    let n = params.n_channels as f64;
    let best = grid_then_golden(
        |pi| n * (follower.expected_payment(pi) + fixed),
        range.lo,
        range.hi,
        grid,
        PRICE_REL_WIDTH,
    );
    Ok(PricingSolution {
        pi_star: best.x,
        u_s_star: best.value,
        expected_payment: follower.expected_payment(best.x),
    })
}
