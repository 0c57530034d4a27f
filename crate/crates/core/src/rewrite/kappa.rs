use std::collections::BTreeMap;
use std::path::Path;

use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forest::partitions;
use crate::taut::{format_rational, Rational};

/// Values of the degree-`(g-2)` κ monomials on `M_g` relative to `κ_{g-2}`.
///
/// Keys are partitions of `g-2` in non-increasing order; `κ_1^2 κ_2` is `[2, 1, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaTable {
    g: u32,
    values: BTreeMap<Vec<u32>, Rational>,
}

impl KappaTable {
    /// Built-in tables exist for genus 2 and 3, where the top κ group has a single monomial.
    pub fn builtin(g: u32) -> Option<Self> {
        let key = match g {
            2 => vec![],
            3 => vec![1],
            _ => return None,
        };
        Some(KappaTable { g, values: BTreeMap::from([(key, Rational::one())]) })
    }

    /// Parses `partition=rational` lines. Blank lines and `#` comments are skipped.
    pub fn parse(g: u32, text: &str) -> Result<Self> {
        if g < 2 {
            return Err(Error::KappaTable(format!("genus {g} has no kappa table")));
        }
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::KappaTable(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| bad("missing '='"))?;
            let mut key = Vec::new();
            for part in lhs.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let v: u32 = part.parse().map_err(|_| bad("partition parts must be positive integers"))?;
                if v == 0 {
                    return Err(bad("partition parts must be positive integers"));
                }
                key.push(v);
            }
            key.sort_unstable_by(|a, b| b.cmp(a));
            if key.iter().sum::<u32>() != g - 2 {
                return Err(bad(&format!("partition does not sum to {}", g - 2)));
            }
            let value: Rational = rhs.trim().parse().map_err(|_| bad("value is not a rational p/q"))?;
            if values.insert(key, value).is_some() {
                return Err(bad("duplicate partition"));
            }
        }
        let table = KappaTable { g, values };
        table.validate()?;
        Ok(table)
    }

    pub fn load(g: u32, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::KappaTable(format!("reading {}: {e}", path.display())))?;
        Self::parse(g, &text)
    }

    /// Built-in table when one exists, otherwise the file at `path`.
    pub fn resolve(g: u32, path: Option<&Path>) -> Result<Self> {
        match (path, Self::builtin(g)) {
            (Some(p), _) => Self::load(g, p),
            (None, Some(t)) => Ok(t),
            (None, None) => Err(Error::KappaTable(format!(
                "genus {g} needs a kappa table file with entries for {}",
                missing_list(g, &BTreeMap::new())
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        let top = self.g - 2;
        let missing = missing_list(self.g, &self.values);
        if !missing.is_empty() {
            return Err(Error::KappaTable(format!("genus {} table is missing {missing}", self.g)));
        }
        let norm_key = if top == 0 { vec![] } else { vec![top] };
        if self.values.get(&norm_key) != Some(&Rational::one()) {
            return Err(Error::KappaTable(format!(
                "the entry for kappa_{top} must be 1 (found {})",
                self.values.get(&norm_key).map(format_rational).unwrap_or_else(|| "nothing".into())
            )));
        }
        if self.values.values().all(Zero::is_zero) {
            return Err(Error::KappaTable("all entries are zero".into()));
        }
        Ok(())
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    /// Value of the κ monomial with the given parts (any order).
    pub fn value(&self, parts: &[u32]) -> Result<Rational> {
        let mut key = parts.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.values
            .get(&key)
            .cloned()
            .ok_or(Error::MissingKappaEntry { g: self.g, partition: key })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.values.iter()
    }

    /// Canonical text form; `digest` hashes exactly this.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            let key: Vec<String> = k.iter().map(u32::to_string).collect();
            out.push_str(&format!("{}={}\n", key.join(","), format_rational(v)));
        }
        out
    }

    /// Hex SHA-256 of the genus and canonical text, used as a cache key.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("g={}\n", self.g));
        h.update(self.to_text());
        format!("{:x}", h.finalize())
    }
}

fn missing_list(g: u32, have: &BTreeMap<Vec<u32>, Rational>) -> String {
    let top = g.saturating_sub(2);
    let wanted = if top == 0 { vec![vec![]] } else { partitions(top, top) };
    wanted
        .into_iter()
        .filter(|p| !have.contains_key(p))
        .map(|p| {
            if p.is_empty() {
                "<empty>".to_string()
            } else {
                p.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
