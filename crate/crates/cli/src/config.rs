//! Run configuration. Values come from command-line flags, then from an
//! optional TOML file, then from built-in defaults.

use std::path::Path;

use anyhow::{bail, Context, Result};
use mixcat_core::{EmConfig, Method, PoolRule};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const DEFAULT_GRID: &str = "0:0.5:0.005";

/// One source of settings. Every field is optional so that sources can be
/// stacked; the same struct is the TOML file schema.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Layer {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_rule: Option<PoolRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

const SCHEME_KEYS: [&str; 3] = ["gamma", "l", "m"];

impl Layer {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config: cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("config: invalid {}", path.display()))
    }

    fn defaults() -> Self {
        let em = EmConfig::default();
        Self {
            eta: Some(em.eta),
            iters: Some(em.max_iterations),
            tol: Some(em.tolerance),
            epsilon: Some(0.0),
            grid: Some(DEFAULT_GRID.into()),
            pool_rule: Some(PoolRule::default()),
            ..Self::default()
        }
    }

    fn to_map(&self) -> Map<String, Value> {
        match serde_json::to_value(self).expect("layer serializes") {
            Value::Object(map) => map,
            _ => unreachable!(),
        }
    }

    fn from_map(map: Map<String, Value>) -> Self {
        serde_json::from_value(Value::Object(map)).expect("layer round-trips")
    }

    pub fn keys(&self) -> Vec<String> {
        self.to_map().keys().cloned().collect()
    }

    /// Fills every unset field from `below`. The clustering scheme is taken
    /// as a unit so that `--l/--m` on the command line replace a `gamma`
    /// from the file and vice versa.
    fn over(&self, below: &Layer) -> Layer {
        let mine = self.to_map();
        let has_scheme = SCHEME_KEYS.iter().any(|k| mine.contains_key(*k));
        let mut merged = mine;
        for (k, v) in below.to_map() {
            if has_scheme && SCHEME_KEYS.contains(&k.as_str()) {
                continue;
            }
            merged.entry(k).or_insert(v);
        }
        Layer::from_map(merged)
    }

    fn restrict(&self, keys: &[&str]) -> Layer {
        let mut map = self.to_map();
        map.retain(|k, _| keys.contains(&k.as_str()));
        Layer::from_map(map)
    }
}

/// The fully resolved settings of one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(flatten)]
    pub values: Layer,
}

impl RunConfig {
    /// Stacks `flags` over `file` over the defaults and keeps only the keys
    /// the command uses. `relevant` sees the merged layer so that it can
    /// depend on the method. Flags that the command would ignore are
    /// rejected; irrelevant file entries are dropped, so one file can serve
    /// several commands.
    pub fn resolve(
        command: &'static str,
        flags: &Layer,
        file: &Layer,
        relevant: impl Fn(&Layer) -> Vec<&'static str>,
    ) -> Result<Self> {
        let merged = flags.over(file);
        let keys = relevant(&merged);
        for key in flags.keys() {
            if !keys.contains(&key.as_str()) {
                match merged.method {
                    Some(method) => {
                        bail!("config: --{key} does not apply to {command} with {method}")
                    }
                    None => bail!("config: --{key} does not apply to {command}"),
                }
            }
        }
        let values = merged.over(&Layer::defaults()).restrict(&keys);
        Ok(Self { command, values })
    }

    /// Single-line JSON rendering, stable for a given configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Comment line that opens every text output.
    pub fn header(&self) -> String {
        format!("# mixcat {}\n", self.to_json())
    }
}

pub fn required<'a, T>(value: &'a Option<T>, key: &str) -> Result<&'a T> {
    value
        .as_ref()
        .with_context(|| format!("config: missing --{key}"))
}

/// `start:stop:step` or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let number = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("config: bad grid value `{s}`"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts[..] {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if step.is_nan() || step <= 0.0 || stop < start {
                bail!("config: grid `{text}` is empty");
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        }
        [_] => text.split(',').map(number).collect::<Result<Vec<_>>>()?,
        _ => bail!("config: grid `{text}` must be start:stop:step or a list"),
    };
    mixcat_core::eval::check_grid(&grid).context("config: grid")?;
    Ok(grid)
}
