//! Run configuration shared by all subcommands, loadable from a flat
//! `key = value` file whose keys match the long flag names.

use std::fmt::{self, Display};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// A list of parameter values written as `11`, `5,6`, `2..10` or a mix
/// (`1,3..5`). Integer ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamList<T>(pub Vec<T>);

pub trait ListItem: Sized + Copy + FromStr + Display {
    fn expand(lo: Self, hi: Self) -> Option<Vec<Self>>;
}

impl ListItem for usize {
    fn expand(lo: Self, hi: Self) -> Option<Vec<Self>> {
        Some((lo..=hi).collect())
    }
}

impl ListItem for f64 {
    fn expand(_: Self, _: Self) -> Option<Vec<Self>> {
        None
    }
}

impl<T: ListItem> ParamList<T> {
    pub fn single(value: T) -> Self {
        ParamList(vec![value])
    }

    /// The only value, or an error naming `flag` when several were given.
    pub fn one(&self, flag: &str) -> Result<T, CliError> {
        match self.0.as_slice() {
            [v] => Ok(*v),
            _ => Err(CliError::usage(
                flag,
                format!("expected a single value, got {self}"),
            )),
        }
    }
}

impl<T: ListItem> FromStr for ParamList<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for piece in s.split(',').map(str::trim) {
            let parse = |x: &str| {
                x.trim()
                    .parse::<T>()
                    .map_err(|_| format!("cannot parse '{x}'"))
            };
            match piece.split_once("..") {
                Some((lo, hi)) => {
                    let values = T::expand(parse(lo)?, parse(hi)?)
                        .ok_or_else(|| format!("ranges like '{piece}' need integer bounds"))?;
                    if values.is_empty() {
                        return Err(format!("empty range '{piece}'"));
                    }
                    out.extend(values);
                }
                None => out.push(parse(piece)?),
            }
        }
        Ok(ParamList(out))
    }
}

impl<T: ListItem> Display for ParamList<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(T::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl<T: ListItem + Serialize> Serialize for ParamList<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.as_slice() {
            [v] => v.serialize(serializer),
            _ => serializer.serialize_str(&self.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawList<T> {
    One(T),
    Text(String),
}

impl<'de, T: ListItem + DeserializeOwned> Deserialize<'de> for ParamList<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match RawList::<T>::deserialize(deserializer)? {
            RawList::One(v) => Ok(ParamList::single(v)),
            RawList::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Every setting a subcommand can take. Unset fields fall back to the
/// subcommand's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<ParamList<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<ParamList<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<ParamList<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<ParamList<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::usage("config", e.to_string()))
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; n, l, s, j, start, horizon, dt, threshold, out_dir, out, plot, summary, only)
    }
}
