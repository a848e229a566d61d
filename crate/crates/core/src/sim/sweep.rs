use serde::{Deserialize, Serialize};

use crate::market::{optimal_price, satellite_utility, MarketError, MarketParams, PriceRange};

pub const FIG4_HEADER: [&str; 4] = ["gamma_tar", "B", "pi_star", "U_s_star"];
pub const FIG5_HEADER: [&str; 3] = ["pi", "omega", "U_s"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig4Row {
    pub gamma_tar: f64,
    pub bandwidth: f64,
    pub pi_star: f64,
    pub u_s_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig5Row {
    pub pi: f64,
    pub omega: f64,
    pub u_s: f64,
}

/// Optimal price over the (gamma, B) cross product, gamma outermost. `B`
/// sets the leased and both noise bandwidths together.
pub fn sweep_fig4(
    base: &MarketParams,
    range: PriceRange,
    grid: usize,
    gamma_grid: &[f64],
    bandwidth_grid: &[f64],
) -> Result<Vec<Fig4Row>, MarketError> {
    let mut rows = Vec::with_capacity(gamma_grid.len() * bandwidth_grid.len());
    for &gamma_tar in gamma_grid {
        for &bandwidth in bandwidth_grid {
            let params = MarketParams {
                gamma_tar,
                ..base.clone()
            }
            .with_bandwidth(bandwidth);
            let sol = optimal_price(&params, range, grid)?;
            rows.push(Fig4Row {
                gamma_tar,
                bandwidth,
                pi_star: sol.pi_star,
                u_s_star: sol.u_s_star,
            });
        }
    }
    Ok(rows)
}

/// Satellite profit over the (omega, pi) cross product, omega outermost.
pub fn sweep_fig5(
    base: &MarketParams,
    pi_grid: &[f64],
    omega_grid: &[f64],
) -> Result<Vec<Fig5Row>, MarketError> {
    let mut rows = Vec::with_capacity(pi_grid.len() * omega_grid.len());
    for &omega in omega_grid {
        let params = MarketParams {
            omega,
            ..base.clone()
        };
        params.validate()?;
        for &pi in pi_grid {
            rows.push(Fig5Row {
                pi,
                omega,
                u_s: satellite_utility(&params, pi),
            });
        }
    }
    Ok(rows)
}

fn csv<const N: usize>(
    header: [&str; N],
    rows: impl Iterator<Item = [f64; N]>,
    delim: char,
) -> String {
    let d = delim.to_string();
    let mut out = header.join(&d);
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(&d));
        out.push('\n');
    }
    out
}

pub fn fig4_csv(rows: &[Fig4Row], delim: char) -> String {
    csv(
        FIG4_HEADER,
        rows.iter()
            .map(|r| [r.gamma_tar, r.bandwidth, r.pi_star, r.u_s_star]),
        delim,
    )
}

pub fn fig5_csv(rows: &[Fig5Row], delim: char) -> String {
    csv(
        FIG5_HEADER,
        rows.iter().map(|r| [r.pi, r.omega, r.u_s]),
        delim,
    )
}
