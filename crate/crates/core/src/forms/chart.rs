use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Point;

/// Closed coordinate interval; periodic coordinates accept any value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Domain {
    pub const REAL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        periodic: false,
    };

    pub fn interval(lo: f64, hi: f64) -> Self {
        Domain { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Domain { lo, hi, periodic: true }
    }

    pub fn contains(&self, v: f64) -> bool {
        if self.periodic {
            return v.is_finite();
        }
        let slack = 1e-12 * (1.0 + v.abs());
        v >= self.lo - slack && v <= self.hi + slack
    }
}

impl Default for Domain {
    fn default() -> Self {
        Domain::REAL
    }
}

/// Ordered coordinates with the identity metric. The coordinate order is the
/// orientation: `d[c0]^d[c1]^...` is the positive volume form.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    coords: Vec<String>,
    domains: Vec<Domain>,
}

pub type ChartRef = Arc<Chart>;

impl Chart {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Chart> {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        if coords.len() > 63 {
            return Err(Error::Invalid("charts are limited to 63 coordinates".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            let valid = c
                .chars()
                .enumerate()
                .all(|(k, ch)| ch == '_' || ch.is_ascii_alphabetic() || (k > 0 && ch.is_ascii_digit()));
            if c.is_empty() || !valid {
                return Err(Error::Invalid(format!("`{c}` is not a coordinate name")));
            }
            if coords[..i].contains(c) {
                return Err(Error::Invalid(format!("duplicate coordinate `{c}`")));
            }
        }
        let domains = vec![Domain::REAL; coords.len()];
        Ok(Chart { coords, domains })
    }

    /// Parses a comma-separated coordinate list such as `x1,y1,z1`.
    pub fn parse_list(text: &str) -> Result<Chart> {
        let names: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        Chart::new(&names)
    }

    pub fn with_domain(mut self, name: &str, d: Domain) -> Result<Chart> {
        let i = self.index(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        self.domains[i] = d;
        Ok(self)
    }

    pub fn shared(self) -> ChartRef {
        Arc::new(self)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn domain(&self, i: usize) -> Domain {
        self.domains[i]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index(name).is_some()
    }

    /// Values in chart order; checks completeness and domains.
    pub fn values(&self, p: &Point) -> Result<Vec<f64>> {
        self.coords
            .iter()
            .zip(&self.domains)
            .map(|(c, d)| {
                let v = p.get(c).ok_or_else(|| Error::MissingCoordinate(c.clone()))?;
                if !d.contains(v) {
                    return Err(Error::OutsideDomain {
                        coord: c.clone(),
                        value: v,
                        lo: d.lo,
                        hi: d.hi,
                    });
                }
                Ok(v)
            })
            .collect()
    }

    pub fn point(&self, values: &[f64]) -> Point {
        Point(self.coords.iter().cloned().zip(values.iter().copied()).collect())
    }

    /// The chart with the named coordinates removed.
    pub fn without(&self, names: &[&str]) -> Chart {
        let (coords, domains) = self
            .coords
            .iter()
            .zip(&self.domains)
            .filter(|(c, _)| !names.contains(&c.as_str()))
            .map(|(c, d)| (c.clone(), *d))
            .unzip();
        Chart { coords, domains }
    }

    /// Same coordinates in the same order (domains are not compared).
    pub fn same_coords(&self, other: &Chart) -> bool {
        self.coords == other.coords
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.coords.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_basics() {
        let c = Chart::parse_list("x1, y1 ,z1").unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.index("z1"), Some(2));
        assert!(Chart::new(&["x", "x"]).is_err());
        assert!(Chart::new(&["1x"]).is_err());
        let c = c.with_domain("x1", Domain::interval(0.0, 1.0)).unwrap();
        let p = Point::from_pairs([("x1", 2.0), ("y1", 0.0), ("z1", 0.0)]);
        assert!(matches!(c.values(&p), Err(Error::OutsideDomain { .. })));
        let q = Point::from_pairs([("x1", 0.5), ("y1", 0.0)]);
        assert!(matches!(c.values(&q), Err(Error::MissingCoordinate(_))));
        assert_eq!(c.without(&["y1"]).coords(), ["x1", "z1"]);
    }
}
