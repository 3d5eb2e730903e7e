pub mod bound;
pub mod data;
pub mod discount;
pub mod frontier;
pub mod oracle;
pub mod withdraw;

use stablewealth::ARule;

use crate::Grid;

pub(crate) fn a_rule(a: &Option<Grid>) -> ARule {
    match a {
        Some(g) => ARule::Fixed(g.0.clone()),
        None => ARule::MaxLocation,
    }
}

pub(crate) fn count(name: &str, v: f64) -> anyhow::Result<usize> {
    anyhow::ensure!(v >= 1.0 && v.fract() == 0.0, "{name} must be a positive integer, got {v}");
    Ok(v as usize)
}
