use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mms::DiscreteMMS;

/// Membership of each point in a closed subset `Omega`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSpec {
    membership: Vec<bool>,
}

impl SubsetSpec {
    pub fn new(membership: Vec<bool>) -> Result<Self> {
        if !membership.iter().any(|&b| b) {
            return Err(Error::EmptyClass("inner"));
        }
        if membership.iter().all(|&b| b) {
            return Err(Error::EmptyClass("outer"));
        }
        Ok(Self { membership })
    }

    /// Closed ball `{d(center, .) <= radius}`.
    pub fn ball(space: &DiscreteMMS, center: usize, radius: f64) -> Result<Self> {
        if center >= space.n() {
            return Err(Error::InvalidParameter(format!("center {center} out of range")));
        }
        Self::new((0..space.n()).map(|i| space.dist(center, i) <= radius).collect())
    }

    /// `{field <= c}`.
    pub fn sublevel(field: &[f64], c: f64) -> Result<Self> {
        Self::new(field.iter().map(|&f| f <= c).collect())
    }

    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.membership[i]
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    pub fn inner(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.membership[i]).collect()
    }

    pub fn outer(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.membership[i]).collect()
    }

    pub fn mass(&self, space: &DiscreteMMS) -> f64 {
        self.inner().iter().map(|&i| space.weights()[i]).sum()
    }

    pub fn check_size(&self, space: &DiscreteMMS) -> Result<()> {
        if self.len() != space.n() {
            return Err(Error::InvalidParameter(format!(
                "subset has {} flags for {} points",
                self.len(),
                space.n()
            )));
        }
        Ok(())
    }

    /// One flag per line (`1`/`0` or `true`/`false`), or a JSON array of
    /// booleans.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('[') {
            let flags: Vec<serde_json::Value> = serde_json::from_str(trimmed)?;
            let membership = flags
                .iter()
                .map(|v| match v {
                    serde_json::Value::Bool(b) => Ok(*b),
                    serde_json::Value::Number(n) if n.as_u64() == Some(1) => Ok(true),
                    serde_json::Value::Number(n) if n.as_u64() == Some(0) => Ok(false),
                    other => Err(Error::Parse(format!("bad membership flag {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::new(membership);
        }
        let membership = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| match l {
                "1" | "true" => Ok(true),
                "0" | "false" => Ok(false),
                other => Err(Error::Parse(format!("bad membership flag {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(membership)
    }
}
