use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::DenseSolution;
use crate::stats::{mean, std_dev};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` increasing edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `counts / total`; sums to 1.
    pub frequencies: Vec<f64>,
}

impl Histogram {
    /// Equal-width bins over the data range. A constant sample gets a unit
    /// range centred on its value.
    pub fn from_samples(values: &[f64], n_bins: usize) -> Result<Self> {
        if n_bins == 0 || values.is_empty() {
            return Err(Error::InvalidArgument("need n_bins >= 1 and at least one sample".into()));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let width = (hi - lo) / n_bins as f64;
        let edges: Vec<f64> = (0..=n_bins)
            .map(|i| if i == n_bins { hi } else { lo + i as f64 * width })
            .collect();
        let mut counts = vec![0usize; n_bins];
        for &v in values {
            let b = (((v - lo) / width) as usize).min(n_bins - 1);
            counts[b] += 1;
        }
        let total = values.len() as f64;
        let frequencies = counts.iter().map(|&c| c as f64 / total).collect();
        Ok(Self {
            edges,
            counts,
            frequencies,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatisticsReport {
    pub window: [f64; 2],
    pub n_samples: usize,
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
    /// Zero-based component the histogram describes (the third when present).
    pub histogram_component: usize,
    pub histogram: Histogram,
}

pub const MIN_STATISTICS_SAMPLES: usize = 1000;

/// Time statistics of `solution` from `n_samples` uniform samples of the
/// closed window.
pub fn trajectory_statistics(
    solution: &DenseSolution,
    window: (f64, f64),
    n_bins: usize,
    n_samples: usize,
) -> Result<StatisticsReport> {
    let (ta, tb) = window;
    if n_samples < MIN_STATISTICS_SAMPLES {
        return Err(Error::InvalidArgument(format!("n_samples must be >= {MIN_STATISTICS_SAMPLES}")));
    }
    if !(ta < tb) {
        return Err(Error::InvalidArgument(format!("empty window [{ta}, {tb}]")));
    }
    for t in [ta, tb] {
        if t < solution.t_start() || t > solution.t_end() {
            return Err(Error::OutOfRange {
                t,
                start: solution.t_start(),
                end: solution.t_end(),
            });
        }
    }
    let dim = solution.dim();
    let mut columns = vec![Vec::with_capacity(n_samples); dim];
    let mut buf = vec![0.0; dim];
    for k in 0..n_samples {
        let t = if k + 1 == n_samples {
            tb
        } else {
            ta + (tb - ta) * k as f64 / (n_samples - 1) as f64
        };
        solution.eval_into(t, 0, &mut buf)?;
        for (c, &v) in columns.iter_mut().zip(&buf) {
            c.push(v);
        }
    }
    let histogram_component = 2.min(dim - 1);
    Ok(StatisticsReport {
        window: [ta, tb],
        n_samples,
        means: columns.iter().map(|c| mean(c)).collect(),
        std_devs: columns.iter().map(|c| std_dev(c)).collect(),
        histogram_component,
        histogram: Histogram::from_samples(&columns[histogram_component], n_bins)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{integrate_adaptive, SolverConfig};
    use crate::systems::{LinearSystem, Lorenz};

    #[test]
    fn constant_solution() {
        let sys = LinearSystem::constant(3);
        let sol = integrate_adaptive(&sys, &[1.0, 2.0, 3.0].into(), 0.0, 5.0, &SolverConfig::default()).unwrap();
        let r = trajectory_statistics(&sol, (1.0, 4.0), 10, 1000).unwrap();
        assert_eq!(r.means, vec![1.0, 2.0, 3.0]);
        assert!(r.std_devs.iter().all(|&s| s == 0.0));
        assert_eq!(r.histogram.counts.iter().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn frequencies_sum_to_one() {
        let sys = Lorenz::default();
        let sol = integrate_adaptive(&sys, &[1.0, 0.0, 0.0].into(), 0.0, 20.0, &SolverConfig::tol(1e-8)).unwrap();
        let r = trajectory_statistics(&sol, (5.0, 20.0), 37, 5000).unwrap();
        assert!((r.histogram.frequencies.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(r.histogram.counts.iter().sum::<usize>(), 5000);
        assert_eq!(r.histogram.edges.len(), 38);
        assert!(trajectory_statistics(&sol, (5.0, 20.0), 10, 10).is_err());
        assert!(trajectory_statistics(&sol, (5.0, 25.0), 10, 1000).is_err());
    }
}
