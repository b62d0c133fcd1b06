//! The fifteen tuples excluded by the prime-order character rules.

use anyhow::Result;
use sedf_core::rules::{run_battery, BatteryReport, GaussLattice, RuleConfig, RuleId, RuleSet, Scope};
use sedf_core::sedf::Params;

use crate::report::witness_summary;

pub const EXCLUSION_TABLE: [Params; 15] = [
    Params::new(1540, 77, 18, 16),
    Params::new(1701, 35, 30, 18),
    Params::new(2376, 11, 190, 152),
    Params::new(2500, 35, 42, 24),
    Params::new(2784, 116, 22, 20),
    Params::new(3381, 23, 130, 110),
    Params::new(4564, 163, 26, 24),
    Params::new(4625, 37, 68, 36),
    Params::new(5888, 92, 58, 52),
    Params::new(6400, 80, 54, 36),
    Params::new(6976, 218, 30, 28),
    Params::new(8625, 23, 140, 50),
    Params::new(8625, 23, 280, 200),
    Params::new(8960, 7, 1054, 744),
    Params::new(9801, 101, 70, 50),
];

/// The rules the table is meant to need.
pub const TABLE_RULES: [RuleId; 4] = [
    RuleId::Basic,
    RuleId::AdmissiblePairs,
    RuleId::FieldDescent,
    RuleId::PrimeSpectrum,
];

pub fn table_config(lattice: GaussLattice) -> RuleConfig {
    RuleConfig {
        enabled: RuleSet::only(&TABLE_RULES),
        lattice,
        ..RuleConfig::default()
    }
}

/// All-abelian reports for the table, in table order.
pub fn exclusion_table(config: &RuleConfig) -> Result<Vec<BatteryReport>> {
    EXCLUSION_TABLE
        .iter()
        .map(|p| Ok(run_battery(p, &Scope::AllAbelian, config)?))
        .collect()
}

pub fn render_text(reports: &[BatteryReport]) -> String {
    let mut out = format!("{:<22} {:<12} {:<30} witness\n", "(v,m,k,lambda)", "overall", "rules");
    for r in reports {
        let rules: Vec<&str> = r.firing_rules().iter().map(|r| r.as_str()).collect();
        out += &format!(
            "{:<22} {:<12} {:<30} {}\n",
            r.params.to_string(),
            r.overall.to_string(),
            if rules.is_empty() { "-".into() } else { rules.join(",") },
            witness_summary(r)
        );
    }
    out
}
