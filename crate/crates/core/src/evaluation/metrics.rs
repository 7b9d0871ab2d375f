//! Precision/recall/F1, Cohen's kappa and McNemar's test.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Counts {
    pub fn support(&self) -> usize {
        self.tp + self.fn_
    }

    fn ratio(num: usize, den: usize) -> f64 {
        if den == 0 {
            0.0
        } else {
            100.0 * num as f64 / den as f64
        }
    }

    /// Percent; 0 when nothing was predicted.
    pub fn precision(&self) -> f64 {
        Self::ratio(self.tp, self.tp + self.fp)
    }

    /// Percent; 0 when there is nothing to find.
    pub fn recall(&self) -> f64 {
        Self::ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        harmonic(self.precision(), self.recall())
    }

    pub fn add(&mut self, other: &Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-label decision counts.
pub type LabelCounts = BTreeMap<String, Counts>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    /// Support-weighted mean of per-label values.
    pub weighted: Prf,
    /// Plain mean over labels that were either gold or predicted.
    pub unweighted: Prf,
    /// From summed counts.
    pub micro: Prf,
}

pub fn totals(counts: &LabelCounts) -> Counts {
    let mut t = Counts::default();
    for c in counts.values() {
        t.add(c);
    }
    t
}

/// Weighted, unweighted and micro averages on a percent scale. Labels with
/// no support get zero weight.
pub fn averages(counts: &LabelCounts) -> Averages {
    let mut weighted = Prf::default();
    let mut total_support = 0usize;
    let mut unweighted = Prf::default();
    let mut active = 0usize;
    for c in counts.values() {
        let s = c.support();
        if s > 0 {
            total_support += s;
            weighted.precision += s as f64 * c.precision();
            weighted.recall += s as f64 * c.recall();
            weighted.f1 += s as f64 * c.f1();
        }
        if s > 0 || c.fp > 0 {
            active += 1;
            unweighted.precision += c.precision();
            unweighted.recall += c.recall();
            unweighted.f1 += c.f1();
        }
    }
    let scale = |p: &mut Prf, n: usize| {
        if n > 0 {
            p.precision /= n as f64;
            p.recall /= n as f64;
            p.f1 /= n as f64;
        }
    };
    scale(&mut weighted, total_support);
    scale(&mut unweighted, active);
    let t = totals(counts);
    Averages {
        weighted,
        unweighted,
        micro: Prf {
            precision: t.precision(),
            recall: t.recall(),
            f1: t.f1(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaReport {
    pub per_label: BTreeMap<String, f64>,
    /// Unweighted mean of the per-label values.
    pub macro_kappa: f64,
}

/// Binary-presence Cohen's kappa per label, macro-averaged.
///
/// Both maps must cover the same items. When chance agreement is 1 the
/// label scores 1 if the annotators agree everywhere and 0 otherwise.
pub fn cohen_kappa_macro(
    a1: &BTreeMap<String, BTreeSet<String>>,
    a2: &BTreeMap<String, BTreeSet<String>>,
    labels: &[String],
) -> Result<KappaReport> {
    let k1: BTreeSet<&String> = a1.keys().collect();
    let k2: BTreeSet<&String> = a2.keys().collect();
    if k1 != k2 {
        return Err(Error::TweetMismatch {
            missing: k1.difference(&k2).map(|s| s.to_string()).collect(),
            extra: k2.difference(&k1).map(|s| s.to_string()).collect(),
        });
    }
    let n = a1.len() as f64;
    let mut per_label = BTreeMap::new();
    for label in labels {
        let (mut agree, mut pos1, mut pos2) = (0usize, 0usize, 0usize);
        for (id, s1) in a1 {
            let x = s1.contains(label);
            let y = a2[id].contains(label);
            agree += usize::from(x == y);
            pos1 += usize::from(x);
            pos2 += usize::from(y);
        }
        let kappa = if a1.is_empty() {
            1.0
        } else {
            let po = agree as f64 / n;
            let (p1, p2) = (pos1 as f64 / n, pos2 as f64 / n);
            let pe = p1 * p2 + (1.0 - p1) * (1.0 - p2);
            if pe >= 1.0 {
                if agree == a1.len() {
                    1.0
                } else {
                    0.0
                }
            } else {
                (po - pe) / (1.0 - pe)
            }
        };
        per_label.insert(label.clone(), kappa);
    }
    let macro_kappa = if per_label.is_empty() {
        0.0
    } else {
        per_label.values().sum::<f64>() / per_label.len() as f64
    };
    Ok(KappaReport {
        per_label,
        macro_kappa,
    })
}

/// Below this many discordant pairs the exact binomial test is used.
pub const EXACT_BELOW: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemar {
    /// X right, Y wrong.
    pub b: usize,
    /// X wrong, Y right.
    pub c: usize,
    /// Continuity-corrected chi-square.
    pub statistic: f64,
    pub p_value: f64,
    /// Whether `p_value` comes from the exact binomial test.
    pub exact: bool,
}

/// McNemar's test from discordant counts.
pub fn mcnemar_counts(b: usize, c: usize) -> McNemar {
    let n = b + c;
    if n == 0 {
        return McNemar {
            b,
            c,
            statistic: 0.0,
            p_value: 1.0,
            exact: true,
        };
    }
    let diff = (b as f64 - c as f64).abs();
    let statistic = (diff - 1.0).max(0.0).powi(2) / n as f64;
    let exact = n < EXACT_BELOW;
    let p_value = if exact {
        let binom = Binomial::new(0.5, n as u64).expect("valid binomial");
        (2.0 * binom.cdf(b.min(c) as u64)).min(1.0)
    } else {
        ChiSquared::new(1.0).expect("valid chi-square").sf(statistic)
    };
    McNemar {
        b,
        c,
        statistic,
        p_value,
        exact,
    }
}

/// McNemar's test on paired per-item correctness.
pub fn mcnemar(x_correct: &[bool], y_correct: &[bool]) -> Result<McNemar> {
    if x_correct.len() != y_correct.len() {
        return Err(Error::Config(format!(
            "paired outcomes differ in length: {} vs {}",
            x_correct.len(),
            y_correct.len()
        )));
    }
    let b = x_correct.iter().zip(y_correct).filter(|(x, y)| **x && !**y).count();
    let c = x_correct.iter().zip(y_correct).filter(|(x, y)| !**x && **y).count();
    Ok(mcnemar_counts(b, c))
}
