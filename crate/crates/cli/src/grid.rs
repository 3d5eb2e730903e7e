use std::fmt;
use std::str::FromStr;

/// A list of numbers given as `a,b,c` or as an inclusive range `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [single] => single.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if !(step > 0.0) || stop < start {
                    return Err(format!("range {s:?} needs step > 0 and stop >= start"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                if n > 10_000_000 {
                    return Err(format!("range {s:?} has too many points"));
                }
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
            _ => return Err(format!("expected a,b,c or start:stop:step, got {s:?}")),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(format!("non-finite value in {s:?}"));
        }
        Ok(Grid(values))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!("0.05,.5, 0.95".parse::<Grid>().unwrap().0, vec![0.05, 0.5, 0.95]);
        let g: Grid = "0.01:0.5:0.01".parse().unwrap();
        assert_eq!(g.0.len(), 50);
        assert!((g.0[49] - 0.5).abs() < 1e-12);
        assert_eq!("2:60:1".parse::<Grid>().unwrap().0.len(), 59);
        assert!("1:0:1".parse::<Grid>().is_err());
        assert!("a,b".parse::<Grid>().is_err());
        assert!("1:2".parse::<Grid>().is_err());
    }
}
