use std::ops::RangeInclusive;

use anyhow::{anyhow, bail, Result};
use sedf_core::rules::Caps;

/// `N`, `A-B` or `A..B`, both ends inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>> {
    let s = s.trim();
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| anyhow!("`{t}` is not a nonnegative integer"))
    };
    let (lo, hi) = if let Some((a, b)) = s.split_once("..") {
        (num(a)?, num(b.trim_start_matches('='))?)
    } else if let Some((a, b)) = s.split_once('-') {
        (num(a)?, num(b)?)
    } else {
        let n = num(s)?;
        (n, n)
    };
    if lo > hi {
        bail!("empty range `{s}`");
    }
    Ok(lo..=hi)
}

/// `key=value` pairs separated by commas; keys `divisor_pairs` and
/// `groups`. Unspecified keys keep their defaults.
pub fn parse_caps(s: &str) -> Result<Caps> {
    let mut caps = Caps::default();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("cap `{part}` is not of the form key=value"))?;
        let v: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow!("cap `{}` needs a positive integer", k.trim()))?;
        if v == 0 {
            bail!("cap `{}` must be positive", k.trim());
        }
        match k.trim() {
            "divisor_pairs" => caps.max_divisor_pairs = v,
            "groups" => caps.max_groups = v,
            other => bail!("unknown cap `{other}` (expected divisor_pairs or groups)"),
        }
    }
    Ok(caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("5").unwrap(), 5..=5);
        assert_eq!(parse_range("2-50").unwrap(), 2..=50);
        assert_eq!(parse_range("2..50").unwrap(), 2..=50);
        assert_eq!(parse_range("2..=50").unwrap(), 2..=50);
        assert!(parse_range("9-3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn caps() {
        let c = parse_caps("groups=5").unwrap();
        assert_eq!(c.max_groups, 5);
        assert_eq!(c.max_divisor_pairs, Caps::default().max_divisor_pairs);
        assert!(parse_caps("groups=0").is_err());
        assert!(parse_caps("depth=3").is_err());
    }
}
