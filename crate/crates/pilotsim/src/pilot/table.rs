//! Minimum number of distinct pilot sequences per scenario, link direction and antenna regime.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PilotError, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "UL")]
    Uplink,
    #[serde(rename = "DL")]
    Downlink,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Uplink, Direction::Downlink];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Uplink => "UL",
            Direction::Downlink => "DL",
        }
    }
}

/// Which antenna counts are taken to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    FiniteFinite,
    #[serde(rename = "N-inf")]
    UeInfinite,
    #[serde(rename = "M-inf")]
    BsInfinite,
    #[serde(rename = "both-inf")]
    BothInfinite,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::FiniteFinite,
        Regime::UeInfinite,
        Regime::BsInfinite,
        Regime::BothInfinite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::FiniteFinite => "finite-finite",
            Regime::UeInfinite => "N-inf",
            Regime::BsInfinite => "M-inf",
            Regime::BothInfinite => "both-inf",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = PilotError;

    fn from_str(s: &str) -> Result<Self, PilotError> {
        match s.to_ascii_uppercase().as_str() {
            "UL" | "UPLINK" => Ok(Direction::Uplink),
            "DL" | "DOWNLINK" => Ok(Direction::Downlink),
            _ => Err(PilotError::InvalidParameter(format!("unknown direction {s:?}"))),
        }
    }
}

impl FromStr for Regime {
    type Err = PilotError;

    fn from_str(s: &str) -> Result<Self, PilotError> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| PilotError::InvalidParameter(format!("unknown regime {s:?}")))
    }
}

/// Minimum number of unique pilots for `ue_count` UEs.
pub fn min_pilot_count(
    scenario: Scenario,
    direction: Direction,
    regime: Regime,
    ue_count: usize,
    ue_antennas: usize,
    bs_antennas: usize,
    paths: usize,
) -> usize {
    use Direction::*;
    use Regime::*;
    use Scenario::*;
    let kl = ue_count * paths;
    match (direction, scenario, regime) {
        (Uplink, NPuC, _) => ue_count * ue_antennas,
        (Uplink, PuC, FiniteFinite | BsInfinite) => kl,
        (Uplink, PuC, UeInfinite | BothInfinite) => ue_count,
        (Uplink, PC, FiniteFinite) => kl,
        (Uplink, PC, UeInfinite) => ue_count,
        (Uplink, PC, BsInfinite) => paths,
        (Uplink, PC, BothInfinite) => 1,
        (Downlink, NPuC, _) => bs_antennas,
        (Downlink, PuC, FiniteFinite | UeInfinite) => kl,
        (Downlink, PuC, BsInfinite | BothInfinite) => ue_count,
        (Downlink, PC, FiniteFinite) => kl,
        (Downlink, PC, UeInfinite) => paths,
        (Downlink, PC, BsInfinite) => ue_count,
        (Downlink, PC, BothInfinite) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries() {
        let (k, n, m, l) = (3, 16, 64, 4);
        let row = |s, d| Regime::ALL.map(|r| min_pilot_count(s, d, r, k, n, m, l));
        assert_eq!(row(Scenario::NPuC, Direction::Uplink), [48; 4]);
        assert_eq!(row(Scenario::PuC, Direction::Uplink), [12, 3, 12, 3]);
        assert_eq!(row(Scenario::PC, Direction::Uplink), [12, 3, 4, 1]);
        assert_eq!(row(Scenario::NPuC, Direction::Downlink), [64; 4]);
        assert_eq!(row(Scenario::PuC, Direction::Downlink), [12, 12, 3, 3]);
        assert_eq!(row(Scenario::PC, Direction::Downlink), [12, 4, 3, 1]);
    }

    #[test]
    fn names_parse() {
        for r in Regime::ALL {
            assert_eq!(r.name().parse::<Regime>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.name()));
        }
        for d in Direction::ALL {
            assert_eq!(d.name().parse::<Direction>().unwrap(), d);
        }
    }
}
