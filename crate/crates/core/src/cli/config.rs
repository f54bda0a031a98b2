//! `key = value` run files and task presets.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::ValueEnum;

use crate::error::{Error, Result};
use crate::lvq::{InitStrategy, Mode};

/// Parses `key = value` lines; `#` starts a comment. Keys are flag names
/// without the leading dashes, `_` and `-` interchangeable.
pub fn parse_config(text: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let mut entries = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected `key = value`",
                origin.display(),
                n + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() || key.starts_with('-') || key.contains(char::is_whitespace) {
            return Err(Error::Config(format!(
                "{}:{}: invalid key `{key}`",
                origin.display(),
                n + 1
            )));
        }
        if key == "config" {
            return Err(Error::Config(format!(
                "{}:{}: config files cannot include other config files",
                origin.display(),
                n + 1
            )));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

/// Flag tokens equivalent to the given entries. `true`/`false` values are
/// treated as switches.
pub fn entries_to_args(entries: &[(String, String)]) -> Vec<OsString> {
    let mut args = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => args.push(format!("--{key}").into()),
            "false" => {}
            _ => args.push(format!("--{key}={value}").into()),
        }
    }
    args
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataKind {
    /// IDX files (`train-images-idx3-ubyte`, `t10k-images-idx3-ubyte`, ...)
    #[value(alias = "idx")]
    Mnist,
    /// Single images, `<dir>/<class>/<image>.pgm`
    Images,
    /// Image sets, `<dir>/<class>/<set>/<frame>.pgm`
    Sets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Protocol {
    /// Train once on all data
    None,
    /// Stratified k-fold cross-validation, repeated
    Folds,
    /// Random split with a fixed number of training items per class, repeated
    Split,
    /// Leave one item out at a time
    LeaveOneOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Mnist,
    Yale,
    Yaleb,
    Eth80,
    Ucf,
}

/// Values a preset supplies when neither a flag nor the config file does.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetValues {
    pub data: DataKind,
    pub mode: Mode,
    pub d: usize,
    pub m: usize,
    pub sets_per_class: usize,
    pub eta: f64,
    pub gamma: f64,
    pub epochs: usize,
    pub init: InitStrategy,
    pub protocol: Protocol,
    pub folds: usize,
    pub repeats: usize,
    pub train_per_class: Option<usize>,
}

impl PresetValues {
    /// Used when no preset is named.
    pub fn fallback() -> Self {
        Self {
            data: DataKind::Sets,
            mode: Mode::Grlgq,
            d: 3,
            m: 20,
            sets_per_class: 100,
            eta: 0.05,
            gamma: 1e-4,
            epochs: 50,
            init: InitStrategy::RandomExample,
            protocol: Protocol::None,
            folds: 4,
            repeats: 10,
            train_per_class: None,
        }
    }
}

impl Preset {
    pub fn values(self) -> PresetValues {
        let sets = PresetValues {
            eta: 0.05,
            gamma: 1e-4,
            epochs: 100,
            init: InitStrategy::RandomExample,
            ..PresetValues::fallback()
        };
        match self {
            Preset::Mnist => PresetValues {
                data: DataKind::Mnist,
                d: 12,
                m: 24,
                sets_per_class: 300,
                eta: 1e-4,
                gamma: 1e-7,
                epochs: 40,
                init: InitStrategy::ClassPca,
                ..PresetValues::fallback()
            },
            Preset::Yale => PresetValues {
                data: DataKind::Images,
                d: 7,
                m: 14,
                sets_per_class: 50,
                eta: 1e-2,
                gamma: 1e-5,
                epochs: 200,
                init: InitStrategy::ClassPca,
                protocol: Protocol::Folds,
                folds: 4,
                repeats: 10,
                ..PresetValues::fallback()
            },
            Preset::Yaleb => PresetValues {
                d: 25,
                protocol: Protocol::Split,
                train_per_class: Some(3),
                ..sets
            },
            Preset::Eth80 => PresetValues {
                d: 5,
                protocol: Protocol::Split,
                train_per_class: Some(5),
                ..sets
            },
            Preset::Ucf => PresetValues {
                d: 22,
                protocol: Protocol::LeaveOneOut,
                ..sets
            },
        }
    }
}

pub fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}
