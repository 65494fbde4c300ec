//! Deterministic case generators for the corpus studies.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::case::{cell_average, ExperimentCase, FieldSpec};
use super::norms::zygmund_on;
use crate::error::Result;
use crate::pde::DiscreteField;

/// Potential families probed by the interior corpus.
pub const G_FAMILIES: [&str; 4] = ["zero", "bounded", "lq_spikes", "llnl_spikes"];

fn rng_for(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(i as u64))
}

fn point_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 2] {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = rng.gen_range(0.0..TAU);
    [r * t.cos(), r * t.sin()]
}

fn random_g(rng: &mut ChaCha8Rng, family: &str) -> FieldSpec {
    match family {
        "zero" => FieldSpec::Zero,
        "bounded" => FieldSpec::Constant {
            value: rng.gen_range(0.5..5.0),
        },
        "lq_spikes" => FieldSpec::Sum {
            terms: vec![
                FieldSpec::PowerSingularity {
                    amplitude: rng.gen_range(0.5..2.0),
                    alpha: 1.0,
                    center: point_in_disk(rng, 0.5),
                    radius: 0.3,
                },
                FieldSpec::RandomSpikes {
                    count: 2,
                    amplitude: 0.05,
                    k_min: 4.0,
                    k_max: 8.0,
                    radius: 0.6,
                    sign: 1.0,
                    salt: 1,
                },
            ],
        },
        _ => FieldSpec::LlnlSingularity {
            amplitude: rng.gen_range(0.05..0.3),
            center: point_in_disk(rng, 0.5),
            radius: 0.3,
        },
    }
}

/// Interior-estimate corpus: flat and perturbed metrics, `g ≥ 0` from the
/// four families, spiky `f` and smooth boundary data.
pub fn interior_cases(count: usize, seed: u64, n: usize) -> Vec<ExperimentCase> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let metric = if i % 2 == 0 { "flat" } else { "perturbed:0.1" };
            let family = G_FAMILIES[(i / 2) % G_FAMILIES.len()];
            let f = FieldSpec::Sum {
                terms: vec![
                    FieldSpec::RandomSpikes {
                        count: rng.gen_range(1..=3),
                        amplitude: rng.gen_range(0.02..0.2),
                        k_min: 4.0,
                        k_max: 10.0,
                        radius: 0.6,
                        sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                        salt: 0,
                    },
                    FieldSpec::RandomSmooth {
                        modes: 4,
                        amplitude: rng.gen_range(0.5..3.0),
                        max_wavenumber: 4.0,
                        salt: 2,
                    },
                ],
            };
            let boundary = FieldSpec::Sum {
                terms: vec![
                    FieldSpec::Constant {
                        value: rng.gen_range(-1.0..1.0),
                    },
                    FieldSpec::RandomSmooth {
                        modes: 3,
                        amplitude: 1.0,
                        max_wavenumber: 3.0,
                        salt: 3,
                    },
                ],
            };
            ExperimentCase::new(format!("interior-{i:03}"), metric, n, f)
                .with_g(random_g(&mut rng, family))
                .with_boundary(boundary)
                .with_seed(seed.wrapping_add(i as u64))
                .with_family(family)
        })
        .collect()
}

/// Maximum-principle corpus: `g ≥ 0`, `f ≤ 0`, zero boundary data.
pub fn maximum_principle_cases(count: usize, seed: u64, n: usize) -> Vec<ExperimentCase> {
    const METRICS: [&str; 3] = ["flat", "perturbed:0.2", "sphere"];
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed ^ 0x3a3a, i);
            let g = FieldSpec::Sum {
                terms: vec![
                    FieldSpec::Constant {
                        value: rng.gen_range(0.0..10.0),
                    },
                    FieldSpec::RandomSpikes {
                        count: rng.gen_range(0..=4),
                        amplitude: rng.gen_range(0.0..1.0),
                        k_min: 3.0,
                        k_max: 12.0,
                        radius: 0.8,
                        sign: 1.0,
                        salt: 5,
                    },
                ],
            };
            let f = FieldSpec::Sum {
                terms: vec![
                    FieldSpec::Constant {
                        value: -rng.gen_range(0.0..2.0),
                    },
                    FieldSpec::RandomSpikes {
                        count: rng.gen_range(1..=4),
                        amplitude: rng.gen_range(0.01..0.5),
                        k_min: 3.0,
                        k_max: 12.0,
                        radius: 0.8,
                        sign: -1.0,
                        salt: 6,
                    },
                ],
            };
            ExperimentCase::new(format!("maxprinciple-{i:03}"), METRICS[i % 3], n, f)
                .with_g(g)
                .with_seed(seed.wrapping_add(i as u64))
        })
        .collect()
}

/// Harnack spike family `f = −ε k²η(k(x − x_c))` with `ε` fixed by
/// `‖f‖*_{L ln L(B₁)} = 1`, boundary data 1, `g = 0`.
pub fn harnack_spike_cases(ks: &[u32], n: usize, center: [f64; 2]) -> Result<Vec<ExperimentCase>> {
    ks.iter()
        .map(|&k| {
            let spike = FieldSpec::Spike {
                amplitude: -1.0,
                k: k as f64,
                center,
            };
            let base = ExperimentCase::new(format!("harnack-spike-k{k}"), "flat", n, spike.clone());
            let grid = base.grid()?;
            let norm = zygmund_on(&grid, &cell_average(&grid, &spike.resolve(0)), 1.0)?;
            Ok(ExperimentCase {
                f: spike.scaled(1.0 / norm),
                ..base
            }
            .with_boundary(FieldSpec::Constant { value: 1.0 }))
        })
        .collect()
}

/// Global-estimate corpus: `f` supported in `B₁`, zero boundary data.
pub fn global_cases(count: usize, seed: u64, n: usize) -> Vec<ExperimentCase> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed ^ 0x6b6b, i);
            let metric = if i % 2 == 0 { "flat" } else { "perturbed:0.1" };
            let f = FieldSpec::Sum {
                terms: vec![
                    FieldSpec::RandomSpikes {
                        count: rng.gen_range(1..=3),
                        amplitude: rng.gen_range(0.05..0.5),
                        k_min: 4.0,
                        k_max: 10.0,
                        radius: 0.7,
                        sign: if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                        salt: 7,
                    },
                    FieldSpec::Masked {
                        radius: 1.0,
                        inner: Box::new(FieldSpec::RandomSmooth {
                            modes: 3,
                            amplitude: rng.gen_range(0.5..4.0),
                            max_wavenumber: 3.0,
                            salt: 8,
                        }),
                    },
                ],
            };
            ExperimentCase::new(format!("global-{i:03}"), metric, n, f)
                .with_seed(seed.wrapping_add(i as u64))
        })
        .collect()
}

/// Random fields vanishing on the boundary of `grid`:
/// `(1 − r²/R²)·(c + smooth)`.
pub fn zero_boundary_draws(
    grid: &crate::pde::PolarGrid,
    count: usize,
    seed: u64,
) -> Vec<DiscreteField> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed ^ 0x50b0, i);
            let c = rng.gen_range(-1.0..1.0);
            let smooth = FieldSpec::RandomSmooth {
                modes: rng.gen_range(1..=6),
                amplitude: rng.gen_range(0.5..3.0),
                max_wavenumber: rng.gen_range(1.0..8.0),
                salt: 9,
            }
            .resolve(seed.wrapping_add(i as u64));
            let big_r = grid.r_max();
            let mut u = DiscreteField::from_fn(grid, |r, t| {
                (1.0 - (r / big_r).powi(2)) * (c + smooth.eval_polar(r, t))
            });
            for k in 0..grid.len() {
                if grid.is_boundary(k) {
                    u.values[k] = 0.0;
                }
            }
            u
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(interior_cases(8, 3, 16), interior_cases(8, 3, 16));
        assert_ne!(interior_cases(8, 3, 16), interior_cases(8, 4, 16));
        assert_eq!(global_cases(4, 1, 16), global_cases(4, 1, 16));
    }

    #[test]
    fn spike_family_is_normalised() {
        let cases = harnack_spike_cases(&[8, 16], 32, [0.2, 0.1]).unwrap();
        for c in cases {
            let d = c.data().unwrap();
            assert!((zygmund_on(&d.grid, &d.f, 1.0).unwrap() - 1.0).abs() < 1e-9);
        }
    }
}
