//! `start:stop:count` grids with inclusive endpoints, or a single value.

use std::str::FromStr;

use lossqfi_core::text::parse_real;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn single(x: f64) -> Self {
        Grid { start: x, stop: x, count: 1 }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let real = |t: &str| parse_real(t).map_err(|e| e.to_string());
        match parts.as_slice() {
            [x] => Ok(Grid::single(real(x)?)),
            [a, b, n] => {
                let count: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("point count `{n}` is not a positive integer"))?;
                let (start, stop) = (real(a)?, real(b)?);
                if count == 0 {
                    return Err("point count must be at least 1".into());
                }
                if count == 1 && start != stop {
                    return Err(format!("a single point cannot span {start}..{stop}"));
                }
                Ok(Grid { start, stop, count })
            }
            _ => Err(format!("expected `start:stop:count` or a single value, got `{s}`")),
        }
    }
}

/// Comma-separated real values, `pi` forms allowed.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| parse_real(t).map_err(|e| e.to_string()))
        .collect()
}
