//! Cross-seed aggregation and the one-sided Mann-Whitney U test.

use std::fmt::Write as _;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::runner::MetricsRecord;

/// Largest `n·m` for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// Sample `b` is stochastically greater than sample `a`.
    BGreater,
    /// Sample `a` is stochastically greater than sample `b`.
    AGreater,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// U of the sample favoured by the alternative: the number of pairs
    /// in which it is larger, ties counting one half.
    pub u_statistic: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Midranks (1-based) of `values`, ties sharing their average rank.
fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        tie_sizes.push(end - start);
        start = end;
    }
    (ranks, tie_sizes)
}

/// Null distribution of U for tie-free samples: `counts[u]` is the number
/// of orderings of `n` a's and `m` b's in which `U_b = u`.
///
/// Built from `c(i, j, u) = c(i, j−1, u−i) + c(i−1, j, u)`: the largest
/// element is either a b (beating all i a's) or an a.
fn u_null_counts(n: usize, m: usize) -> Vec<u64> {
    // table[i] holds c(i, j, ·) for the current j.
    let mut table: Vec<Vec<u64>> = (0..=n).map(|_| vec![1]).collect();
    for j in 1..=m {
        let mut next: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
        next.push(vec![1]);
        for i in 1..=n {
            let mut c = vec![0u64; i * j + 1];
            for (u, &v) in table[i].iter().enumerate() {
                c[u + i] += v;
            }
            for (u, &v) in next[i - 1].iter().enumerate() {
                c[u] += v;
            }
            next.push(c);
        }
        table = next;
    }
    table.swap_remove(n)
}

/// One-sided Mann-Whitney U test. Exact when `n·m ≤ 400` and there are no
/// ties; otherwise the normal approximation with tie and continuity
/// corrections.
pub fn mann_whitney_one_sided(sample_a: &[f64], sample_b: &[f64], alternative: Alternative) -> Result<MannWhitney> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::InsufficientSamples("Mann-Whitney needs two non-empty samples".into()));
    }
    let (a, b) = match alternative {
        Alternative::BGreater => (sample_a, sample_b),
        Alternative::AGreater => (sample_b, sample_a),
    };
    let (n, m) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if pooled.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("Mann-Whitney samples must not contain NaN"));
    }
    let (ranks, ties) = midranks(&pooled);
    let rank_sum_b: f64 = ranks[n..].iter().sum();
    let u_b = rank_sum_b - (m * (m + 1)) as f64 / 2.0;
    let has_ties = ties.iter().any(|&t| t > 1);

    if n * m <= EXACT_LIMIT && !has_ties {
        let counts = u_null_counts(n, m);
        let total: u64 = counts.iter().sum();
        let observed = u_b.round() as usize;
        let tail: u64 = counts[observed..].iter().sum();
        return Ok(MannWhitney {
            u_statistic: u_b,
            p_value: tail as f64 / total as f64,
            exact: true,
        });
    }
    Ok(MannWhitney {
        u_statistic: u_b,
        p_value: normal_upper_tail(u_b, n, m, &ties),
        exact: false,
    })
}

/// P(U ≥ u) under the normal approximation, tie-corrected, with a
/// continuity correction of one half.
pub fn normal_upper_tail(u: f64, n: usize, m: usize, tie_sizes: &[usize]) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = (u - nf * mf / 2.0 - 0.5) / var.sqrt();
    Normal::standard().sf(z).clamp(0.0, 1.0)
}

/// Metrics that can be aggregated across seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Coverage,
    MaxFitness,
    Alpha,
}

impl Metric {
    pub const NAMES: [&'static str; 3] = ["coverage", "max_fitness", "alpha"];

    pub fn of(&self, r: &MetricsRecord) -> Option<f64> {
        match self {
            Metric::Coverage => Some(r.coverage),
            Metric::MaxFitness => r.max_fitness,
            Metric::Alpha => Some(r.alpha),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverage" => Ok(Metric::Coverage),
            "max_fitness" => Ok(Metric::MaxFitness),
            "alpha" => Ok(Metric::Alpha),
            _ => Err(Error::UnknownMetric {
                name: s.to_string(),
                valid: Metric::NAMES.join(", "),
            }),
        }
    }
}

/// Type-7 quantile (linear interpolation between closest ranks) of sorted
/// data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileRow {
    pub generation: usize,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

/// Per-generation median and interquartile range across seeds. Generations
/// where no seed has a value (empty archives for `max_fitness`) are
/// skipped.
pub fn median_iqr(series: &[Vec<MetricsRecord>], metric: &str) -> Result<Vec<QuantileRow>> {
    let metric: Metric = metric.parse()?;
    let first = series
        .first()
        .ok_or_else(|| Error::InsufficientSamples("median_iqr needs at least one seed".into()))?;
    for s in series {
        let aligned =
            s.len() == first.len() && s.iter().zip(first).all(|(r, f)| r.generation == f.generation);
        if !aligned {
            return Err(Error::invalid("seed series are not aligned by generation"));
        }
    }
    let mut rows = Vec::with_capacity(first.len());
    for (g, rec) in first.iter().enumerate() {
        let mut values: Vec<f64> = series.iter().filter_map(|s| metric.of(&s[g])).collect();
        if values.is_empty() {
            continue;
        }
        values.sort_by(f64::total_cmp);
        rows.push(QuantileRow {
            generation: rec.generation,
            median: quantile_sorted(&values, 0.5),
            q25: quantile_sorted(&values, 0.25),
            q75: quantile_sorted(&values, 0.75),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

/// Medians plus pairwise p-values. `p_values[row][col]` tests the
/// alternative that the column method is better than the row method;
/// the diagonal is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub methods: Vec<String>,
    pub medians: Vec<f64>,
    pub p_values: Vec<Vec<Option<f64>>>,
}

pub fn compare_final(scores_by_method: &[(String, Vec<f64>)], direction: Direction) -> Result<Comparison> {
    if scores_by_method.len() < 2 {
        return Err(Error::InsufficientSamples(format!(
            "comparison needs at least 2 methods, got {}",
            scores_by_method.len()
        )));
    }
    if let Some((name, s)) = scores_by_method.iter().find(|(_, s)| s.len() < 2) {
        return Err(Error::InsufficientSamples(format!(
            "method '{name}' has {} seed(s); at least 2 are required",
            s.len()
        )));
    }
    let medians = scores_by_method
        .iter()
        .map(|(_, s)| {
            let mut v = s.clone();
            v.sort_by(f64::total_cmp);
            quantile_sorted(&v, 0.5)
        })
        .collect();
    let alternative = match direction {
        Direction::HigherIsBetter => Alternative::BGreater,
        Direction::LowerIsBetter => Alternative::AGreater,
    };
    let mut p_values = Vec::with_capacity(scores_by_method.len());
    for (r, (_, row)) in scores_by_method.iter().enumerate() {
        let mut line = Vec::with_capacity(scores_by_method.len());
        for (c, (_, col)) in scores_by_method.iter().enumerate() {
            line.push(if r == c {
                None
            } else {
                Some(mann_whitney_one_sided(row, col, alternative)?.p_value)
            });
        }
        p_values.push(line);
    }
    Ok(Comparison {
        methods: scores_by_method.iter().map(|(n, _)| n.clone()).collect(),
        medians,
        p_values,
    })
}

impl Comparison {
    /// Comma-separated table: method, median, then one p-value column per
    /// comparator (`-` on the diagonal).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,median");
        for m in &self.methods {
            out.push(',');
            out.push_str(m);
        }
        out.push('\n');
        for (i, m) in self.methods.iter().enumerate() {
            let _ = write!(out, "{m},{}", self.medians[i]);
            for p in &self.p_values[i] {
                match p {
                    Some(p) => {
                        let _ = write!(out, ",{p:.3e}");
                    }
                    None => out.push_str(",-"),
                }
            }
            out.push('\n');
        }
        out
    }
}
