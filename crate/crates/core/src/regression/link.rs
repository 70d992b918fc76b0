use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Link `g` mapping a distribution parameter onto the linear predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    Identity,
    /// `log(μ/(1−μ))` on `(0, 1)`.
    Logit,
    /// `log φ` on `(0, ∞)`.
    Log,
}

impl Link {
    pub fn as_str(self) -> &'static str {
        match self {
            Link::Identity => "identity",
            Link::Logit => "logit",
            Link::Log => "log",
        }
    }

    pub fn in_range(self, x: f64) -> bool {
        match self {
            Link::Identity => x.is_finite(),
            Link::Logit => x > 0.0 && x < 1.0,
            Link::Log => x > 0.0 && x.is_finite(),
        }
    }

    pub fn link(self, x: f64) -> f64 {
        match self {
            Link::Identity => x,
            Link::Logit => (x / (1.0 - x)).ln(),
            Link::Log => x.ln(),
        }
    }

    pub fn inverse(self, eta: f64) -> f64 {
        match self {
            Link::Identity => eta,
            Link::Logit => {
                if eta >= 0.0 {
                    1.0 / (1.0 + (-eta).exp())
                } else {
                    let e = eta.exp();
                    e / (1.0 + e)
                }
            }
            Link::Log => eta.exp(),
        }
    }

    /// `g′(x)`
    pub fn d1(self, x: f64) -> f64 {
        match self {
            Link::Identity => 1.0,
            Link::Logit => 1.0 / (x * (1.0 - x)),
            Link::Log => 1.0 / x,
        }
    }

    /// `g″(x)`
    pub fn d2(self, x: f64) -> f64 {
        match self {
            Link::Identity => 0.0,
            Link::Logit => (2.0 * x - 1.0) / (x * x * (1.0 - x) * (1.0 - x)),
            Link::Log => -1.0 / (x * x),
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Link {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Link::Identity),
            "logit" => Ok(Link::Logit),
            "log" => Ok(Link::Log),
            other => Err(Error::Config(format!("unknown link `{other}`"))),
        }
    }
}
