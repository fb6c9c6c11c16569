//! Minimum pilot counts for every scenario, direction and antenna regime.

use std::fmt::Write as _;
use std::io::Write;

use super::config::ExperimentConfig;
use crate::pilot::{min_pilot_count, Direction, Regime, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PilotTableEntry {
    pub direction: Direction,
    pub scenario: Scenario,
    pub regime: Regime,
    pub ue_count: usize,
    pub ue_antennas: usize,
    pub bs_antennas: usize,
    pub paths: usize,
    pub pilots: usize,
}

/// Entries for every (K, N, M, L) combination in the configuration.
pub fn pilot_table(cfg: &ExperimentConfig) -> Vec<PilotTableEntry> {
    let mut out = Vec::new();
    for k in cfg.cell.ue_count.to_vec() {
        for n in cfg.arrays.ue_antennas.to_vec() {
            for m in cfg.arrays.bs_antennas.to_vec() {
                for l in cfg.paths.paths.to_vec() {
                    for direction in Direction::ALL {
                        for scenario in cfg.scenarios() {
                            for regime in Regime::ALL {
                                out.push(PilotTableEntry {
                                    direction,
                                    scenario,
                                    regime,
                                    ue_count: k,
                                    ue_antennas: n,
                                    bs_antennas: m,
                                    paths: l,
                                    pilots: min_pilot_count(scenario, direction, regime, k, n, m, l),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// One block per (K, N, M, L): a row per direction and scenario, a column per regime.
pub fn format_pilot_table(entries: &[PilotTableEntry]) -> String {
    let mut s = String::new();
    for block in entries.chunk_by(|a, b| {
        (a.ue_count, a.ue_antennas, a.bs_antennas, a.paths) == (b.ue_count, b.ue_antennas, b.bs_antennas, b.paths)
    }) {
        let e = block[0];
        let _ = writeln!(
            s,
            "K={} N={} M={} L={}",
            e.ue_count, e.ue_antennas, e.bs_antennas, e.paths
        );
        let _ = write!(s, "{:<4} {:<6}", "dir", "scheme");
        for r in Regime::ALL {
            let _ = write!(s, " {:>13}", r.name());
        }
        s.push('\n');
        for row in block.chunks(Regime::ALL.len()) {
            let _ = write!(s, "{:<4} {:<6}", row[0].direction.name(), row[0].scenario.name());
            for cell in row {
                let _ = write!(s, " {:>13}", cell.pilots);
            }
            s.push('\n');
        }
        s.push('\n');
    }
    s
}

pub fn write_pilot_table_csv<W: Write>(entries: &[PilotTableEntry], sink: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["direction", "scenario", "regime", "K", "N", "M", "L", "pilots"])?;
    for e in entries {
        w.write_record([
            e.direction.name().to_string(),
            e.scenario.name().to_string(),
            e.regime.name().to_string(),
            e.ue_count.to_string(),
            e.ue_antennas.to_string(),
            e.bs_antennas.to_string(),
            e.paths.to_string(),
            e.pilots.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::{resolve_config, ExperimentKind};
    use serde_json::json;

    #[test]
    fn text_and_csv() {
        let cfg = resolve_config(
            json!({"cell": {"K": 3}, "arrays": {"N": 16, "M": 64}, "paths": {"L": 4}}),
            ExperimentKind::PilotTable,
            &[],
        )
        .unwrap();
        let t = pilot_table(&cfg);
        assert_eq!(t.len(), 24);
        let text = format_pilot_table(&t);
        assert!(text.starts_with("K=3 N=16 M=64 L=4\n"));
        assert_eq!(text.lines().count(), 1 + 1 + 6 + 1);
        assert!(text.contains("UL   nPuC              48            48            48            48"));
        let mut out = Vec::new();
        write_pilot_table_csv(&t, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 25);
    }
}
