use std::ops::RangeInclusive;

use anyhow::{bail, Result};
use rayon::prelude::*;
use sedf_core::rules::{run_battery, BatteryReport, RuleConfig, Scope};
use sedf_core::sedf::Params;

use crate::report::{row_of, Row};

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub v: RangeInclusive<u64>,
    pub m: RangeInclusive<u64>,
    pub k: Option<RangeInclusive<u64>>,
    pub lambda: Option<RangeInclusive<u64>>,
    pub scope: Scope,
    pub rules: RuleConfig,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
}

/// Tuples in range with `lambda = (m - 1) k^2 / (v - 1)` integral, in
/// lexicographic `(v, m, k)` order.
pub fn candidates(cfg: &ScanConfig) -> Vec<Params> {
    let mut out = Vec::new();
    for v in cfg.v.clone() {
        if v < 2 {
            continue;
        }
        if let Scope::Group(g) = &cfg.scope {
            if g.order() != v {
                continue;
            }
        }
        for m in cfg.m.clone() {
            if m < 2 || m > v {
                continue;
            }
            for k in 1..=v / m {
                if cfg.k.as_ref().is_some_and(|r| !r.contains(&k)) {
                    continue;
                }
                let Some(l) = Params::derived_lambda(v, m, k) else {
                    continue;
                };
                if cfg.lambda.as_ref().is_some_and(|r| !r.contains(&l)) {
                    continue;
                }
                out.push(Params::new(v, m, k, l));
            }
        }
    }
    out
}

/// Runs the battery on every candidate. Output order is candidate order
/// whatever the thread count.
pub fn run_scan(cfg: &ScanConfig) -> Result<Vec<BatteryReport>> {
    if cfg.v.is_empty() || cfg.m.is_empty() {
        bail!("scan ranges must be nonempty");
    }
    let cands = candidates(cfg);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    let reports: Result<Vec<_>, _> = pool.install(|| {
        cands
            .par_iter()
            .map(|p| run_battery(p, &cfg.scope, &cfg.rules))
            .collect()
    });
    Ok(reports?)
}

pub fn scan_rows(cfg: &ScanConfig) -> Result<Vec<Row>> {
    Ok(run_scan(cfg)?.iter().map(row_of).collect())
}
