use std::fmt::Write as _;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::seed;

/// Rounds to the nearest integer, halves away from zero (inputs are non-negative).
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Randomly sets aside `round(fraction * |pool|)` items as validation.
///
/// Both halves keep the pool's original relative order.
pub fn carve_validation<T: Clone>(pool: &[T], fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "validation fraction must lie in (0, 1), got {fraction}"
        )));
    }
    if pool.is_empty() {
        return Err(Error::InvalidArgument("cannot split an empty pool".into()));
    }
    let n_val = round_half_up(fraction * pool.len() as f64).min(pool.len());

    // Fisher-Yates over indices, drawing with the documented ChaCha8 stream.
    let mut rng = seed::rng(seed::derive(seed, "split"));
    let mut order: Vec<usize> = (0..pool.len()).collect();
    for i in (1..order.len()).rev() {
        let j = (rng.gen::<u64>() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let mut is_val = vec![false; pool.len()];
    for &i in &order[..n_val] {
        is_val[i] = true;
    }
    let mut train = Vec::with_capacity(pool.len() - n_val);
    let mut val = Vec::with_capacity(n_val);
    for (item, v) in pool.iter().zip(is_val) {
        if v {
            val.push(item.clone());
        } else {
            train.push(item.clone());
        }
    }
    Ok((train, val))
}

/// Record ids assigned to each split, plus the parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitManifest {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
    pub validation_fraction: f64,
}

const MANIFEST_MAGIC: &str = "# ocular split manifest v1";

impl SplitManifest {
    pub fn build(pool: &[String], test: Vec<String>, fraction: f64, seed: u64) -> Result<Self> {
        let (train, validation) = carve_validation(pool, fraction, seed)?;
        let m = Self {
            train,
            validation,
            test,
            seed,
            validation_fraction: fraction,
        };
        m.check_disjoint()?;
        Ok(m)
    }

    pub fn check_disjoint(&self) -> Result<()> {
        let mut seen = std::collections::HashMap::new();
        for (section, ids) in [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ] {
            for id in ids {
                if let Some(prev) = seen.insert(id.as_str(), section) {
                    return Err(Error::InvalidArgument(format!(
                        "record {id:?} appears in both {prev} and {section}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Plain-text form: header lines, then one id per line under
    /// `[train]`, `[validation]` and `[test]` section markers.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{MANIFEST_MAGIC}").unwrap();
        writeln!(s, "seed={}", self.seed).unwrap();
        writeln!(s, "validation_fraction={}", self.validation_fraction).unwrap();
        for (name, ids) in [
            ("train", &self.train),
            ("validation", &self.validation),
            ("test", &self.test),
        ] {
            writeln!(s, "[{name}]").unwrap();
            for id in ids {
                writeln!(s, "{id}").unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(MANIFEST_MAGIC) {
            return Err(Error::Parse("not a split manifest (bad header)".into()));
        }
        let mut seed = None;
        let mut fraction = None;
        let mut m = SplitManifest {
            train: vec![],
            validation: vec![],
            test: vec![],
            seed: 0,
            validation_fraction: 0.0,
        };
        let mut section: Option<&str> = None;
        for (n, line) in lines.enumerate() {
            let line_no = n + 2;
            if line.is_empty() {
                continue;
            }
            match line {
                "[train]" | "[validation]" | "[test]" => {
                    section = Some(&line[1..line.len() - 1]);
                    continue;
                }
                _ => {}
            }
            match section {
                None => {
                    let (k, v) = line
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("line {line_no}: expected key=value")))?;
                    let bad = || Error::Parse(format!("line {line_no}: bad value for {k}"));
                    match k {
                        "seed" => seed = Some(v.parse().map_err(|_| bad())?),
                        "validation_fraction" => fraction = Some(v.parse().map_err(|_| bad())?),
                        _ => return Err(Error::Parse(format!("line {line_no}: unknown key {k}"))),
                    }
                }
                Some("train") => m.train.push(line.to_string()),
                Some("validation") => m.validation.push(line.to_string()),
                Some(_) => m.test.push(line.to_string()),
            }
        }
        m.seed = seed.ok_or_else(|| Error::Parse("missing seed".into()))?;
        m.validation_fraction =
            fraction.ok_or_else(|| Error::Parse("missing validation_fraction".into()))?;
        m.check_disjoint()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("img{i:05}.png")).collect()
    }

    #[test]
    fn hundred_at_one_percent() {
        let (train, val) = carve_validation(&ids(100), 0.01, 3).unwrap();
        assert_eq!((train.len(), val.len()), (99, 1));
    }

    #[test]
    fn deterministic_for_seed() {
        let pool = ids(250);
        let a = SplitManifest::build(&pool, vec![], 0.1, 11).unwrap();
        let b = SplitManifest::build(&pool, vec![], 0.1, 11).unwrap();
        assert_eq!(a, b);
        let c = SplitManifest::build(&pool, vec![], 0.1, 12).unwrap();
        assert_ne!(a.validation, c.validation);
    }

    #[test]
    fn affectnet_scale_count() {
        // Initial training + validation counts of the original corpus:
        // 410651 + 4149 = 414800 entries; 1% half-up rounds to 4148.
        let pool: Vec<u32> = (0..414_800).collect();
        let (train, val) = carve_validation(&pool, 0.01, 0).unwrap();
        assert_eq!(val.len(), 4148);
        assert_eq!(train.len(), 410_652);
    }

    #[test]
    fn bad_fraction_rejected() {
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(carve_validation(&ids(10), f, 0).is_err());
        }
        assert!(carve_validation::<String>(&[], 0.5, 0).is_err());
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(round_half_up(0.5), 1);
        assert_eq!(round_half_up(2.5), 3);
        assert_eq!(round_half_up(2.49), 2);
    }

    #[test]
    fn manifest_text_round_trip() {
        let m = SplitManifest::build(&ids(40), ids(45)[40..].to_vec(), 0.25, 5).unwrap();
        let back = SplitManifest::from_text(&m.to_text()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn overlapping_sections_rejected() {
        let mut m = SplitManifest::build(&ids(10), vec![], 0.2, 5).unwrap();
        m.test.push(m.train[0].clone());
        assert!(SplitManifest::from_text(&m.to_text()).is_err());
    }

    proptest! {
        #[test]
        fn carve_partitions_pool(n in 1usize..400, fraction in 0.001f64..0.999, seed in any::<u64>()) {
            let pool: Vec<usize> = (0..n).collect();
            let (train, val) = carve_validation(&pool, fraction, seed).unwrap();
            prop_assert_eq!(val.len(), round_half_up(fraction * n as f64).min(n));
            let mut all: Vec<usize> = train.iter().chain(val.iter()).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, pool);
        }
    }
}
