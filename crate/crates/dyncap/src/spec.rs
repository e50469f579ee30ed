//! Channel specifications: `name:key=value[,key=value]` or `kraus:@path`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dyncap_core::channel::{dephasing, erasure, KrausChannel};
use dyncap_core::region::Surface;

use crate::error::CliError;
use crate::formats;

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSpec {
    Dephasing { p: f64 },
    Erasure { eps: f64 },
    Identity { d: usize },
    Kraus { path: PathBuf },
}

fn parse_params(name: &str, body: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for item in body.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("{name}: expected key=value, got '{item}'")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(CliError::usage(format!(
                "{name}: unknown parameter '{k}' (expected {})",
                allowed.join(", ")
            )));
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("{name}: parameter '{k}' given twice")));
        }
    }
    for k in allowed {
        if !out.contains_key(*k) {
            return Err(CliError::usage(format!("{name}: missing parameter '{k}'")));
        }
    }
    Ok(out)
}

fn number<T: FromStr>(name: &str, key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse()
        .map_err(|_| CliError::usage(format!("{name}: '{key}' is not a valid number: '{raw}'")))
}

impl FromStr for ChannelSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "dephasing" => {
                let m = parse_params(name, body, &["p"])?;
                Ok(ChannelSpec::Dephasing {
                    p: number(name, "p", &m["p"])?,
                })
            }
            "erasure" => {
                let m = parse_params(name, body, &["eps"])?;
                Ok(ChannelSpec::Erasure {
                    eps: number(name, "eps", &m["eps"])?,
                })
            }
            "identity" => {
                let m = parse_params(name, body, &["d"])?;
                Ok(ChannelSpec::Identity {
                    d: number(name, "d", &m["d"])?,
                })
            }
            "kraus" => match body.strip_prefix('@') {
                Some(path) if !path.is_empty() => Ok(ChannelSpec::Kraus {
                    path: PathBuf::from(path),
                }),
                _ => Err(CliError::usage("kraus: expected kraus:@path")),
            },
            _ => Err(CliError::usage(format!(
                "unknown channel '{name}' (expected dephasing, erasure, identity or kraus)"
            ))),
        }
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Dephasing { p } => write!(f, "dephasing:p={p}"),
            ChannelSpec::Erasure { eps } => write!(f, "erasure:eps={eps}"),
            ChannelSpec::Identity { d } => write!(f, "identity:d={d}"),
            ChannelSpec::Kraus { path } => write!(f, "kraus:@{}", path.display()),
        }
    }
}

impl ChannelSpec {
    pub fn build(&self) -> Result<KrausChannel, CliError> {
        Ok(match self {
            ChannelSpec::Dephasing { p } => dephasing(*p)?,
            ChannelSpec::Erasure { eps } => erasure(*eps)?,
            ChannelSpec::Identity { d } => KrausChannel::identity(*d)?,
            ChannelSpec::Kraus { path } => formats::read_kraus(path)?,
        })
    }

    /// The closed-form boundary family, for dephasing and erasure only.
    pub fn surface(&self) -> Result<Surface, CliError> {
        match self {
            ChannelSpec::Dephasing { p } => Ok(Surface::dephasing(*p)?),
            ChannelSpec::Erasure { eps } => Ok(Surface::erasure(*eps)?),
            _ => Err(CliError::usage(format!(
                "no closed-form region for '{self}' (use dephasing or erasure)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        assert_eq!(
            "dephasing:p=0.2".parse::<ChannelSpec>().unwrap(),
            ChannelSpec::Dephasing { p: 0.2 }
        );
        assert_eq!(
            "erasure:eps=0.25".parse::<ChannelSpec>().unwrap(),
            ChannelSpec::Erasure { eps: 0.25 }
        );
        assert_eq!(
            "identity:d=3".parse::<ChannelSpec>().unwrap(),
            ChannelSpec::Identity { d: 3 }
        );
        assert_eq!(
            "kraus:@ch.json".parse::<ChannelSpec>().unwrap(),
            ChannelSpec::Kraus { path: "ch.json".into() }
        );
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "dephasing",
            "dephasing:p=",
            "dephasing:q=0.2",
            "dephasing:p=0.1,p=0.2",
            "erasure:eps=abc",
            "kraus:ch.json",
            "amplitude:g=0.1",
        ] {
            assert!(bad.parse::<ChannelSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn out_of_range_is_rejected_on_build() {
        let e = "dephasing:p=1.5".parse::<ChannelSpec>().unwrap().build().unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }
}
