use std::fmt;

use crate::error::{Error, Result};
use crate::forms::ChartRef;
use crate::Exec;

/// Tensor grid over a chart. Every coordinate has a list of sample values;
/// unlisted coordinates sit at one value (0, or the domain's low end when 0
/// lies outside it). Points are numbered with the last coordinate fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    chart: ChartRef,
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(chart: &ChartRef) -> Self {
        let axes = chart
            .domains()
            .iter()
            .map(|d| {
                let v = if d.contains(0.0) || !d.lo.is_finite() { 0.0 } else { d.lo };
                vec![v]
            })
            .collect();
        Grid { chart: chart.clone(), axes }
    }

    fn slot(&self, name: &str) -> Result<usize> {
        self.chart.index(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    }

    /// `n` evenly spaced values from `lo` to `hi` inclusive.
    pub fn axis(mut self, name: &str, lo: f64, hi: f64, n: usize) -> Result<Self> {
        let i = self.slot(name)?;
        if n == 0 || !(lo <= hi) {
            return Err(Error::Invalid(format!("bad axis {name}={lo}:{hi}:{n}")));
        }
        self.axes[i] = if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        };
        Ok(self)
    }

    pub fn values(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        let i = self.slot(name)?;
        if values.is_empty() {
            return Err(Error::Invalid(format!("axis {name} has no values")));
        }
        self.axes[i] = values;
        Ok(self)
    }

    pub fn fixed(self, name: &str, v: f64) -> Result<Self> {
        self.values(name, vec![v])
    }

    /// Parses `t=-1:1:21, x=0.5`: ranges are `lo:hi:n`, single numbers fix
    /// a coordinate.
    pub fn parse(chart: &ChartRef, text: &str) -> Result<Self> {
        let mut g = Grid::new(chart);
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, spec) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("grid entry `{item}` needs name=value")))?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad number `{s}` in grid entry `{item}`")))
            };
            let parts: Vec<&str> = spec.split(':').collect();
            g = match parts.as_slice() {
                [v] => g.fixed(name.trim(), num(v)?)?,
                [lo, hi, n] => {
                    let n = n.trim().parse().map_err(|_| Error::Invalid(format!("bad count in `{item}`")))?;
                    g.axis(name.trim(), num(lo)?, num(hi)?, n)?
                }
                _ => return Err(Error::Invalid(format!("grid entry `{item}` must be v or lo:hi:n"))),
            };
        }
        Ok(g)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn axis_values(&self, name: &str) -> Option<&[f64]> {
        self.chart.index(name).map(|i| self.axes[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.axes.len()];
        for (slot, axis) in x.iter_mut().zip(&self.axes).rev() {
            *slot = axis[index % axis.len()];
            index /= axis.len();
        }
        x
    }

    /// Spacing of a sampled axis, `None` for fixed coordinates.
    pub fn step(&self, name: &str) -> Option<f64> {
        let a = self.axis_values(name)?;
        (a.len() > 1).then(|| (a[a.len() - 1] - a[0]).abs() / (a.len() - 1) as f64)
    }

    /// Evaluates `f` at every point in index order.
    pub fn map<F>(&self, exec: Exec, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let n = self.len();
        exec.map_chunks(n, 4096, |r| r.map(|i| f(&self.point(i))).collect::<Vec<_>>())
            .into_iter()
            .flatten()
            .collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, axis) in self.chart.coords().iter().zip(&self.axes) {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            match axis.as_slice() {
                [v] => write!(f, "{name}={v}")?,
                a => write!(f, "{name}={}:{}:{}", a[0], a[a.len() - 1], a.len())?,
            }
        }
        Ok(())
    }
}
