//! The (CSIT, JSIT) availability configurations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Availability of state information at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Availability {
    Perfect,
    Delayed,
    None,
}

/// First letter is CSIT, second JSIT. `DpK` and `DdK` are the K-user
/// delayed-CSIT schemes with perfect and delayed JSIT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Config {
    PP,
    PD,
    PN,
    DP,
    DD,
    DN,
    NP,
    ND,
    NN,
    DpK,
    DdK,
}

impl Config {
    pub const TWO_USER: [Config; 9] = [
        Config::PP,
        Config::PD,
        Config::PN,
        Config::DP,
        Config::DD,
        Config::DN,
        Config::NP,
        Config::ND,
        Config::NN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Config::PP => "PP",
            Config::PD => "PD",
            Config::PN => "PN",
            Config::DP => "DP",
            Config::DD => "DD",
            Config::DN => "DN",
            Config::NP => "NP",
            Config::ND => "ND",
            Config::NN => "NN",
            Config::DpK => "DP-K",
            Config::DdK => "DD-K",
        }
    }

    pub fn csit(self) -> Availability {
        match self {
            Config::PP | Config::PD | Config::PN => Availability::Perfect,
            Config::DP | Config::DD | Config::DN | Config::DpK | Config::DdK => Availability::Delayed,
            Config::NP | Config::ND | Config::NN => Availability::None,
        }
    }

    pub fn jsit(self) -> Availability {
        match self {
            Config::PP | Config::DP | Config::NP | Config::DpK => Availability::Perfect,
            Config::PD | Config::DD | Config::ND | Config::DdK => Availability::Delayed,
            Config::PN | Config::DN | Config::NN => Availability::None,
        }
    }

    /// True for the configurations whose target is a sum-DoF scalar rather
    /// than a region.
    pub fn is_k_user(self) -> bool {
        matches!(self, Config::DpK | Config::DdK)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .collect::<String>()
            .to_ascii_uppercase();
        Ok(match norm.as_str() {
            "PP" => Config::PP,
            "PD" => Config::PD,
            "PN" => Config::PN,
            "DP" => Config::DP,
            "DD" => Config::DD,
            "DN" => Config::DN,
            "NP" => Config::NP,
            "ND" => Config::ND,
            "NN" => Config::NN,
            "DPK" => Config::DpK,
            "DDK" => Config::DdK,
            _ => return Err(Error::InvalidArgument(format!("unknown configuration {s:?}"))),
        })
    }
}

impl TryFrom<String> for Config {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Config> for String {
    fn from(c: Config) -> String {
        c.name().to_string()
    }
}
