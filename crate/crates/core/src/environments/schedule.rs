use serde::{Deserialize, Serialize};

use super::Distribution;
use crate::problem::TypeRealization;
use crate::rng::{stream, Purpose};
use crate::solvers::SampleGroup;
use crate::{Error, Result};

/// Periods `start..=end` (1-based) drawn from one distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub distribution: Distribution,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Piecewise-stationary plan of per-period distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvironmentSchedule {
    horizon: usize,
    segments: Vec<Segment>,
}

impl EnvironmentSchedule {
    /// Segments must partition `1..=T` in order.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::config("schedule needs at least one segment"));
        }
        let dim = segments[0].distribution.dim();
        let mut next = 1;
        for s in &segments {
            s.distribution.validate()?;
            if s.distribution.dim() != dim {
                return Err(Error::config("segment distributions differ in dimension"));
            }
            if s.start != next || s.end < s.start {
                return Err(Error::config(format!(
                    "segments must partition the horizon; expected a segment starting at {next}"
                )));
            }
            next = s.end + 1;
        }
        Ok(EnvironmentSchedule {
            horizon: next - 1,
            segments,
        })
    }

    pub fn stationary(horizon: usize, distribution: Distribution) -> Result<Self> {
        EnvironmentSchedule::new(vec![Segment {
            start: 1,
            end: horizon,
            distribution,
        }])
    }

    /// Equal-length intervals with `N(k_j μ₀, σ₀)` demand on every resource;
    /// interval `j` ends at period `⌊(j+1) T / K⌋`.
    pub fn from_pattern(horizon: usize, ks: &[f64], mu0: f64, sigma0: f64, n_resources: usize) -> Result<Self> {
        if ks.is_empty() || horizon < ks.len() {
            return Err(Error::config("pattern needs at least one period per interval"));
        }
        let segments = ks
            .iter()
            .enumerate()
            .map(|(j, k)| {
                Ok(Segment {
                    start: j * horizon / ks.len() + 1,
                    end: (j + 1) * horizon / ks.len(),
                    distribution: Distribution::clamped_normal(vec![k * mu0; n_resources], vec![sigma0; n_resources])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EnvironmentSchedule::new(segments)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].distribution.dim()
    }

    /// 0-based segment index of the 1-based period `t`.
    pub fn segment_of(&self, t: usize) -> usize {
        self.segments.partition_point(|s| s.end < t)
    }

    /// Segment index of every period, in order.
    pub fn period_groups(&self) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .flat_map(|(i, s)| std::iter::repeat_n(i, s.len()))
            .collect()
    }

    pub fn sample_horizon(&self, seed: u64) -> Vec<TypeRealization> {
        let mut rng = stream(seed, Purpose::Demand);
        let mut out = Vec::with_capacity(self.horizon);
        for s in &self.segments {
            for _ in 0..s.len() {
                out.push(s.distribution.sample(&mut rng));
            }
        }
        out
    }

    /// One SAA group per segment, each from its own stream.
    pub fn saa_groups(&self, n_samples: usize, seed: u64) -> Vec<SampleGroup> {
        self.segments
            .iter()
            .enumerate()
            .map(|(i, s)| SampleGroup {
                periods: s.len(),
                samples: s.distribution.saa(n_samples, &mut stream(seed, Purpose::Saa(i as u32))),
            })
            .collect()
    }

    /// Same boundaries, every distribution replaced through `f`.
    pub fn map_distributions(&self, f: impl Fn(&Distribution) -> Result<Distribution>) -> Result<Self> {
        EnvironmentSchedule::new(
            self.segments
                .iter()
                .map(|s| {
                    Ok(Segment {
                        start: s.start,
                        end: s.end,
                        distribution: f(&s.distribution)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl<'de> Deserialize<'de> for EnvironmentSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            segments: Vec<Segment>,
        }
        let raw = Raw::deserialize(d)?;
        EnvironmentSchedule::new(raw.segments).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_boundaries() {
        let s = EnvironmentSchedule::from_pattern(10_000, &[1.0, 2.0, 3.0, 2.0, 1.0], 5.0, 10.0 / 3.0, 4).unwrap();
        let bounds: Vec<(usize, usize)> = s.segments().iter().map(|g| (g.start, g.end)).collect();
        assert_eq!(bounds, vec![(1, 2000), (2001, 4000), (4001, 6000), (6001, 8000), (8001, 10_000)]);
        assert_eq!(s.segment_of(2000), 0);
        assert_eq!(s.segment_of(2001), 1);
        assert_eq!(s.segment_of(10_000), 4);
        assert_eq!(s.period_groups().len(), 10_000);
    }

    #[test]
    fn stationary_case_mean() {
        let s = EnvironmentSchedule::from_pattern(100, &[2.0], 5.0, 10.0 / 3.0, 4).unwrap();
        match &s.segments()[0].distribution {
            Distribution::ClampedNormal { mean, .. } => assert_eq!(mean, &vec![10.0; 4]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        let d = Distribution::point(vec![1.0]);
        let seg = |start, end| Segment {
            start,
            end,
            distribution: d.clone(),
        };
        assert!(EnvironmentSchedule::new(vec![seg(1, 3), seg(5, 6)]).is_err());
        assert!(EnvironmentSchedule::new(vec![seg(1, 3), seg(3, 6)]).is_err());
        assert!(EnvironmentSchedule::new(vec![seg(2, 3)]).is_err());
        assert_eq!(EnvironmentSchedule::new(vec![seg(1, 3), seg(4, 6)]).unwrap().horizon(), 6);
    }

    #[test]
    fn sampling_is_seeded() {
        let s = EnvironmentSchedule::from_pattern(50, &[1.0, 3.0], 5.0, 2.0, 2).unwrap();
        assert_eq!(s.sample_horizon(4), s.sample_horizon(4));
        assert_ne!(s.sample_horizon(4), s.sample_horizon(5));
    }

    #[test]
    fn deserializes_and_validates() {
        let ok = r#"{"segments":[{"start":1,"end":4,"distribution":{"kind":"discrete","atoms":[[1.0]],"weights":[1.0]}}]}"#;
        assert_eq!(serde_json::from_str::<EnvironmentSchedule>(ok).unwrap().horizon(), 4);
        let gap = r#"{"segments":[{"start":2,"end":4,"distribution":{"kind":"discrete","atoms":[[1.0]],"weights":[1.0]}}]}"#;
        assert!(serde_json::from_str::<EnvironmentSchedule>(gap).is_err());
    }
}
