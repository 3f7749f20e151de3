use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::rng::RandomStream;

use super::SimPath;

/// Brute-force grid approximation of the trawl integral.
///
/// `[0, g(0)] × [−temporal_extension, nΔ]` is cut into `spatial_cells` rows
/// and time cells of width `Δ/time_cells_per_step`; each cell carries one
/// independent draw, and `Y_t` adds `p(t − s)` times the cells whose
/// midpoint lies below `g(t − s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridOracleConfig {
    pub n: usize,
    pub spatial_cells: usize,
    pub temporal_extension: f64,
    pub time_cells_per_step: usize,
}

/// Grid-oracle path `Y_0, …, Y_{nΔ}` with two time cells per step.
pub fn simulate_grid_oracle(
    model: &ModelSpec,
    n: usize,
    spatial_cells: usize,
    temporal_extension: f64,
    master_seed: u64,
) -> Result<SimPath> {
    let cfg = GridOracleConfig { n, spatial_cells, temporal_extension, time_cells_per_step: 2 };
    simulate_grid_oracle_with(model, &cfg, master_seed, 0)
}

pub fn simulate_grid_oracle_with(
    model: &ModelSpec,
    cfg: &GridOracleConfig,
    master_seed: u64,
    replicate: u64,
) -> Result<SimPath> {
    model.validate()?;
    model.kernel.require_kernel()?;
    if cfg.spatial_cells < 100 {
        return Err(Error::Config(format!("the grid oracle needs at least 100 spatial cells, got {}", cfg.spatial_cells)));
    }
    if cfg.time_cells_per_step == 0 || !(cfg.temporal_extension >= 0.0) {
        return Err(Error::Config("invalid grid oracle time discretisation".into()));
    }
    let (n, delta) = (cfg.n, model.delta);
    let g = &model.trawl;
    let height = g.eval(0.0);
    let values = if height <= 0.0 {
        vec![0.0; n + 1]
    } else {
        let hx = height / cfg.spatial_cells as f64;
        let ht = delta / cfg.time_cells_per_step as f64;
        let back = (cfg.temporal_extension / ht).ceil() as usize;
        let cols = back + n * cfg.time_cells_per_step;
        let law = model.seed.slice_law(hx * ht)?;
        let mut rng = RandomStream::for_replicate(master_seed, replicate);
        let rows = cfg.spatial_cells;
        // prefix[c * (rows+1) + m] = sum of the lowest m cells of column c
        let mut prefix = vec![0.0; cols * (rows + 1)];
        for c in 0..cols {
            let base = c * (rows + 1);
            for m in 0..rows {
                prefix[base + m + 1] = prefix[base + m] + law.sample(&mut rng);
            }
        }
        (0..=n)
            .map(|k| {
                let t = k as f64 * delta;
                let last = back + k * cfg.time_cells_per_step;
                (0..last)
                    .map(|c| {
                        let s_mid = (c as f64 + 0.5) * ht - back as f64 * ht;
                        let age = t - s_mid;
                        let m = (g.eval(age) / hx - 0.5).ceil().clamp(0.0, rows as f64) as usize;
                        model.kernel.eval(age) * prefix[c * (rows + 1) + m]
                    })
                    .sum()
            })
            .collect()
    };
    Ok(SimPath { delta, values, burn_in: 0, master_seed, replicate })
}
