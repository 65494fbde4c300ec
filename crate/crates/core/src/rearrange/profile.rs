use serde::Serialize;

use super::samples::WeightedSamples;
use crate::error::{Error, Result};

/// Relative slack used when comparing measures that went through different
/// summation orders.
const MEASURE_RTOL: f64 = 1e-9;

/// Non-increasing step function on `[0, t_n)`: value `values[i]` on
/// `[breakpoints[i], breakpoints[i + 1])`, zero afterwards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepProfile {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepProfile {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    /// `t_n`, the measure of the support of `|f|`.
    pub fn support_measure(&self) -> f64 {
        *self.breakpoints.last().unwrap_or(&0.0)
    }

    /// `f*(t)`, right-continuous.
    pub fn value_at(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        // first breakpoint strictly greater than t
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        if idx == 0 || idx > self.values.len() {
            0.0
        } else {
            self.values[idx - 1]
        }
    }

    /// Length of `{t : f*(t) > s}`.
    pub fn distribution(&self, s: f64) -> f64 {
        let count = self.values.partition_point(|&v| v > s);
        self.breakpoints[count]
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum()
    }

    pub fn scaled(&self, c: f64) -> StepProfile {
        let c = c.abs();
        if c == 0.0 {
            return StepProfile {
                breakpoints: vec![0.0],
                values: vec![],
            };
        }
        StepProfile {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Decreasing rearrangement of `|f|`.
///
/// Cells are sorted by `|value|` descending (ties keep their original order),
/// zero cells are dropped and runs of equal values are merged into one step.
pub fn rearrange(f: &WeightedSamples) -> StepProfile {
    let mut cells: Vec<(f64, f64)> = f
        .entries()
        .iter()
        .filter(|s| s.value != 0.0)
        .map(|s| (s.value.abs(), s.measure))
        .collect();
    // stable sort keeps index order among ties
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut breakpoints = Vec::with_capacity(cells.len() + 1);
    let mut values: Vec<f64> = Vec::with_capacity(cells.len());
    breakpoints.push(0.0);
    let mut t = 0.0;
    for (v, m) in cells {
        t += m;
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = t;
        } else {
            values.push(v);
            breakpoints.push(t);
        }
    }
    StepProfile {
        breakpoints,
        values,
    }
}

/// `t ln(X/t) + t`, the antiderivative of `ln(X/t)` vanishing at 0.
fn log_antiderivative(t: f64, domain: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * (domain / t).ln() + t
    }
}

/// `∫₀^∞ f*(t) ln(X/t) dt` for an already rearranged profile.
pub fn zygmund_norm_of_profile(profile: &StepProfile, domain_measure: f64) -> Result<f64> {
    let support = profile.support_measure();
    if domain_measure < support * (1.0 - MEASURE_RTOL) {
        return Err(Error::DomainSmallerThanSupport {
            domain: domain_measure,
            support,
        });
    }
    let mut acc = 0.0;
    for (v, w) in profile.values.iter().zip(profile.breakpoints.windows(2)) {
        let a = w[0].min(domain_measure);
        let b = w[1].min(domain_measure);
        acc += v * (log_antiderivative(b, domain_measure) - log_antiderivative(a, domain_measure));
    }
    Ok(acc.max(0.0))
}

/// Rearrangement-invariant Zygmund norm `‖f‖*_{L ln L(X)}` with `|X| = domain_measure`,
/// evaluated step by step with the exact antiderivative.
pub fn zygmund_norm(f: &WeightedSamples, domain_measure: f64) -> Result<f64> {
    zygmund_norm_of_profile(&rearrange(f), domain_measure)
}

/// `∫ |f| max(0, ln |f|)`.
pub fn zygmund_modular(f: &WeightedSamples) -> f64 {
    f.entries()
        .iter()
        .map(|s| {
            let a = s.value.abs();
            if a > 1.0 {
                a * a.ln() * s.measure
            } else {
                0.0
            }
        })
        .sum()
}

/// The modular computed from the rearrangement instead of the cells.
pub fn zygmund_modular_of_profile(profile: &StepProfile) -> f64 {
    profile
        .values
        .iter()
        .zip(profile.breakpoints.windows(2))
        .map(|(v, w)| {
            if *v > 1.0 {
                v * v.ln() * (w[1] - w[0])
            } else {
                0.0
            }
        })
        .sum()
}

/// Hardy–Littlewood upper bound `∫₀^∞ f*(t) h*(t) dt`, exact on the merged
/// breakpoint grid of the two profiles.
pub fn pairing_upper(f: &WeightedSamples, h: &WeightedSamples) -> Result<f64> {
    let (mf, mh) = (f.total_measure(), h.total_measure());
    if (mf - mh).abs() > MEASURE_RTOL * mf.max(mh) {
        return Err(Error::MeasureMismatch(mf, mh));
    }
    Ok(profile_pairing(&rearrange(f), &rearrange(h)))
}

pub fn profile_pairing(pf: &StepProfile, ph: &StepProfile) -> f64 {
    let end = pf.support_measure().min(ph.support_measure());
    let (mut i, mut j) = (0usize, 0usize);
    let mut t = 0.0;
    let mut acc = 0.0;
    while t < end && i < pf.values.len() && j < ph.values.len() {
        let next = pf.breakpoints[i + 1].min(ph.breakpoints[j + 1]).min(end);
        acc += pf.values[i] * ph.values[j] * (next - t);
        t = next;
        if pf.breakpoints[i + 1] <= t {
            i += 1;
        }
        if ph.breakpoints[j + 1] <= t {
            j += 1;
        }
    }
    acc
}

/// `∫ |f h|` for two functions sampled on the same cells.
pub fn direct_pairing(f: &WeightedSamples, h: &WeightedSamples) -> Result<f64> {
    if f.len() != h.len() {
        return Err(Error::MeasureMismatch(f.total_measure(), h.total_measure()));
    }
    let mut acc = 0.0;
    for (a, b) in f.entries().iter().zip(h.entries()) {
        if (a.measure - b.measure).abs() > MEASURE_RTOL * a.measure {
            return Err(Error::MeasureMismatch(a.measure, b.measure));
        }
        acc += (a.value * b.value).abs() * a.measure;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn samples(pairs: &[(f64, f64)]) -> WeightedSamples {
        WeightedSamples::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn constant_function_is_one_step() {
        let f = samples(&[(2.0, 0.25), (-2.0, 0.25), (2.0, 0.5)]);
        let p = rearrange(&f);
        assert_eq!(p.values(), &[2.0]);
        assert_eq!(p.breakpoints(), &[0.0, 1.0]);
    }

    #[test]
    fn two_level_sort() {
        let p = rearrange(&samples(&[(1.0, 0.5), (3.0, 0.5)]));
        assert_eq!(p.values(), &[3.0, 1.0]);
        assert_eq!(p.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.value_at(0.0), 3.0);
        assert_eq!(p.value_at(0.5), 1.0);
        assert_eq!(p.value_at(1.0), 0.0);
        assert_eq!(p.distribution(2.0), 0.5);
        assert_eq!(p.distribution(0.0), 1.0);
    }

    #[test]
    fn zeros_drop_out_of_the_support() {
        let p = rearrange(&samples(&[(0.0, 0.7), (5.0, 0.3)]));
        assert_eq!(p.support_measure(), 0.3);
    }

    #[test]
    fn indicator_closed_form() {
        let f = samples(&[(3.0, 0.5), (0.0, 0.5)]);
        let v = zygmund_norm(&f, 1.0).unwrap();
        assert!((v - 1.5 * (1.0 + LN_2)).abs() < 1e-12);
    }

    #[test]
    fn unit_constant_on_full_domain() {
        let m = 2.7;
        let f = samples(&[(1.0, m / 3.0), (1.0, m / 3.0), (1.0, m / 3.0)]);
        assert!((zygmund_norm(&f, m).unwrap() - m).abs() < 1e-12);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let f = samples(&[(0.0, 1.0)]);
        assert_eq!(zygmund_norm(&f, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn small_domain_is_rejected() {
        let f = samples(&[(1.0, 1.0)]);
        assert!(matches!(
            zygmund_norm(&f, 0.5),
            Err(Error::DomainSmallerThanSupport { .. })
        ));
    }

    #[test]
    fn modular_cases() {
        let e = std::f64::consts::E;
        assert!((zygmund_modular(&samples(&[(e, 1.0)])) - e).abs() < 1e-14);
        assert_eq!(zygmund_modular(&samples(&[(1.0, 3.0)])), 0.0);
        assert_eq!(zygmund_modular(&samples(&[(0.5, 3.0)])), 0.0);
    }

    #[test]
    fn indicator_self_pairing() {
        let f = samples(&[(1.0, 1.0)]);
        assert_eq!(pairing_upper(&f, &f).unwrap(), 1.0);
        assert_eq!(direct_pairing(&f, &f).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_indicators() {
        let f = samples(&[(2.0, 0.5), (0.0, 0.5)]);
        let h = samples(&[(0.0, 0.5), (3.0, 0.5)]);
        assert!((pairing_upper(&f, &h).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(direct_pairing(&f, &h).unwrap(), 0.0);
    }

    #[test]
    fn pairing_rejects_mismatched_domains() {
        let f = samples(&[(1.0, 1.0)]);
        let h = samples(&[(1.0, 2.0)]);
        assert!(matches!(
            pairing_upper(&f, &h),
            Err(Error::MeasureMismatch(..))
        ));
    }
}
