//! `--params "key=value,..."` lists.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use kcollapse::scalar::parse_rational;
use kcollapse::Rational;

#[derive(Debug, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn parse(raw: Option<&str>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for item in raw.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {item:?}"))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                bail!("parameter {:?} given twice", k.trim());
            }
        }
        Ok(Params { values })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key).map(|v| v.parse().with_context(|| format!("parameter {key}: not an integer: {v:?}"))).transpose()
    }

    /// The parameter, else the fallback flag, else an error.
    pub fn usize_or(&mut self, key: &str, flag: Option<usize>) -> Result<usize> {
        self.usize(key)?.or(flag).ok_or_else(|| anyhow!("missing parameter {key}"))
    }

    pub fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key).map(|v| v.parse().with_context(|| format!("parameter {key}: not an integer: {v:?}"))).transpose()
    }

    pub fn rational(&mut self, key: &str) -> Result<Option<Rational>> {
        self.take(key)
            .map(|v| parse_rational(&v).ok_or_else(|| anyhow!("parameter {key}: not a rational: {v:?}")))
            .transpose()
    }

    pub fn flag(&mut self, key: &str) -> Result<bool> {
        match self.take(key).as_deref() {
            None | Some("false") | Some("0") => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some(v) => bail!("parameter {key}: expected true or false, got {v:?}"),
        }
    }

    /// Rejects anything not consumed.
    pub fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            Some(k) => bail!("unknown parameter {k:?}"),
            None => Ok(()),
        }
    }
}
