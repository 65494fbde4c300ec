use proptest::prelude::*;

use zygmund_lab::estimates::{
    harnack_ratio, interior_corpus, interior_ratio, iterate_recursion, moser_brute_force,
    moser_resolve, ExperimentCase, FieldSpec,
};
use zygmund_lab::pde::{laplace_beltrami_apply, solve_dirichlet, DiscreteField, PolarGrid};
use zygmund_lab::rearrange::{
    direct_pairing, pairing_upper, rearrange, zygmund_norm, Sample, WeightedSamples,
};
use zygmund_lab::surface::{Geometry, MetricProfile};

fn samples_strategy() -> impl Strategy<Value = WeightedSamples> {
    prop::collection::vec(
        (prop_oneof![Just(0.0), -100.0..100.0f64], 0.001..1.0f64),
        1..30,
    )
    .prop_map(|v| WeightedSamples::from_pairs(v).unwrap())
}

/// Two functions on the same cells.
fn pair_strategy() -> impl Strategy<Value = (WeightedSamples, WeightedSamples)> {
    prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64, 0.001..1.0f64), 1..30).prop_map(
        |v| {
            let f = WeightedSamples::new(v.iter().map(|&(a, _, m)| Sample::new(a, m)).collect())
                .unwrap();
            let h = WeightedSamples::new(v.iter().map(|&(_, b, m)| Sample::new(b, m)).collect())
                .unwrap();
            (f, h)
        },
    )
}

fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn equimeasurable(f in samples_strategy(), s in 0.0..120.0f64) {
        let p = rearrange(&f);
        let direct: f64 = f.entries().iter().filter(|e| e.value.abs() > s).map(|e| e.measure).sum();
        prop_assert!(close(p.distribution(s), direct, 1e-12) || (direct == 0.0 && p.distribution(s) == 0.0));
    }

    #[test]
    fn norm_grows_with_domain(f in samples_strategy(), extra in 0.0..10.0f64) {
        let x1 = f.total_measure();
        prop_assert!(zygmund_norm(&f, x1).unwrap() <= zygmund_norm(&f, x1 + extra).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn triangle_and_homogeneity((f, h) in pair_strategy(), c in -50.0..50.0f64) {
        let x = f.total_measure();
        let sum = WeightedSamples::new(
            f.entries().iter().zip(h.entries()).map(|(a, b)| Sample::new(a.value + b.value, a.measure)).collect(),
        ).unwrap();
        let nf = zygmund_norm(&f, x).unwrap();
        let nh = zygmund_norm(&h, x).unwrap();
        prop_assert!(zygmund_norm(&sum, x).unwrap() <= (nf + nh) * (1.0 + 1e-12));
        let scaled = zygmund_norm(&f.map_values(|v| c * v).unwrap(), x).unwrap();
        prop_assert!(close(scaled, c.abs() * nf, 1e-10));
    }

    #[test]
    fn rearrangement_commutes_with_scaling(f in samples_strategy(), c in -50.0..50.0f64) {
        let p = rearrange(&f).scaled(c.abs());
        let q = rearrange(&f.map_values(|v| c * v).unwrap());
        if c == 0.0 {
            prop_assert_eq!(q.steps(), 0);
        } else {
            prop_assert_eq!(p.steps(), q.steps());
            for (a, b) in p.values().iter().zip(q.values()) {
                prop_assert!(close(*a, *b, 1e-12));
            }
            prop_assert_eq!(p.breakpoints(), q.breakpoints());
        }
    }

    #[test]
    fn hardy_littlewood((f, h) in pair_strategy()) {
        prop_assert!(direct_pairing(&f, &h).unwrap() <= pairing_upper(&f, &h).unwrap() * (1.0 + 1e-12));
        prop_assert!(close(direct_pairing(&f, &f).unwrap(), pairing_upper(&f, &f).unwrap(), 1e-12));
    }

    #[test]
    fn moser_closed_form(a in 0.0..100.0f64, b in 0.0..100.0f64, rho0 in 0.001..0.499f64) {
        let closed = moser_resolve(a, b, rho0).unwrap();
        prop_assert!(close(moser_brute_force(a, b, rho0, 60).unwrap(), closed, 1e-12));
        // the recursion started from the resolved tail telescopes back to the same limit
        prop_assert!(close(iterate_recursion(a, b, rho0, 0.0, 61).unwrap(), closed, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn volume_derivative_is_length(eps in -0.5..0.5f64, r in 0.05..0.95f64) {
        let m = MetricProfile::perturbed(eps, 1.0).unwrap();
        let geo = Geometry::new(&m);
        let d = 1e-4;
        let dv = (geo.ball_volume(r + d).unwrap() - geo.ball_volume(r - d).unwrap()) / (2.0 * d);
        prop_assert!(close(dv, geo.boundary_length(r).unwrap(), 1e-6));
    }

    #[test]
    fn bounds_hold_with_admissible_constant(eps in -0.5..0.5f64) {
        let m = MetricProfile::perturbed(eps, 1.0).unwrap();
        let geo = Geometry::new(&m);
        let radii: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let a = geo.isoperimetric_constant(&radii, 2.0).unwrap().admissible_constant();
        let check = geo.geometry_bounds_check(a, 2.0, &radii).unwrap();
        prop_assert!(check.invalid_case.is_none());
        prop_assert!(check.verdicts.iter().all(|v| v.pass));
    }

    #[test]
    fn kernel_weight_below_log_bound(eps in -0.5..0.5f64, d in 0.01..0.99f64) {
        let m = MetricProfile::perturbed(eps, 1.0).unwrap();
        let geo = Geometry::new(&m);
        // A from a fine radius scan covering [d, 1]
        let radii: Vec<f64> = (1..=400).map(|i| i as f64 / 400.0).collect();
        let a = geo.isoperimetric_constant(&radii, 2.0).unwrap().a_iso;
        let h = geo.kernel_weight(1.0, d).unwrap().value;
        let bound = a * (geo.ball_volume(1.0).unwrap() / geo.ball_volume(d).unwrap()).ln();
        prop_assert!(h <= bound * (1.0 + 1e-6), "h = {h}, bound = {bound}");
    }

    #[test]
    fn solver_is_linear(g in 0.0..5.0f64, a1 in -3.0..3.0f64, a2 in -3.0..3.0f64, eps in -0.2..0.2f64) {
        let m = MetricProfile::perturbed(eps, 1.0).unwrap();
        let grid = PolarGrid::new(&m, 16, 32, 1.0).unwrap();
        let gf = DiscreteField::from_fn(&grid, |_, _| g);
        let f1 = DiscreteField::from_fn(&grid, |r, t| a1 * (r * t.cos()).exp());
        let f2 = DiscreteField::from_fn(&grid, |r, t| a2 * r * r * t.sin());
        let zero = vec![0.0; grid.n_theta()];
        let (u1, _) = solve_dirichlet(&grid, &gf, &f1, &zero).unwrap();
        let (u2, _) = solve_dirichlet(&grid, &gf, &f2, &zero).unwrap();
        let (u12, _) = solve_dirichlet(&grid, &gf, &f1.zip_with(&f2, |a, b| a + b), &zero).unwrap();
        let diff = u12.zip_with(&u1.zip_with(&u2, |a, b| a + b), |a, b| a - b).max_abs();
        prop_assert!(diff <= 1e-7 * u12.max_abs().max(1.0), "diff {diff}");
    }

    #[test]
    fn operator_is_self_adjoint(eps in -0.3..0.3f64, k1 in 1.0..4.0f64, k2 in 1.0..4.0f64) {
        let m = MetricProfile::perturbed(eps, 1.0).unwrap();
        let grid = PolarGrid::new(&m, 16, 24, 1.0).unwrap();
        let bump = |k: f64| DiscreteField::from_fn(&grid, move |r, t| (1.0 - r * r) * (k * r * t.cos()).sin() + (1.0 - r));
        let (u, w) = (bump(k1), bump(k2));
        let (lu, lw) = (laplace_beltrami_apply(&grid, &u).unwrap(), laplace_beltrami_apply(&grid, &w).unwrap());
        let inner = |a: &DiscreteField, b: &DiscreteField| -> f64 {
            (0..grid.len()).map(|i| a.values[i] * b.values[i] * grid.measure(i)).sum()
        };
        let (x, y) = (inner(&lu, &w), inner(&u, &lw));
        prop_assert!(close(x, y, 1e-10), "{x} vs {y}");
    }

    #[test]
    fn maximum_principle(g in 0.0..20.0f64, fc in 0.0..5.0f64, k in 3.0..10.0f64, cx in -0.3..0.3f64) {
        let case = ExperimentCase::new("mp", "flat", 24, FieldSpec::Sum { terms: vec![
            FieldSpec::Constant { value: -fc },
            FieldSpec::Spike { amplitude: -0.1, k, center: [cx, 0.1] },
        ]}).with_g(FieldSpec::Constant { value: g });
        let s = case.solve().unwrap();
        prop_assert!(s.u.values.iter().all(|&v| v >= -1e-10 * s.u.max_abs()));
        // Harnack screening keeps every such case
        let positive = case.clone().with_boundary(FieldSpec::Constant { value: 0.5 });
        prop_assert!(harnack_ratio(&positive.solve().unwrap()).unwrap().is_some());
    }

    #[test]
    fn interior_ratio_is_scale_invariant(lambda in 0.01..100.0f64, seed in 0u64..1000) {
        let case = ExperimentCase::new("s", "flat", 16, FieldSpec::RandomSmooth { modes: 3, amplitude: 2.0, max_wavenumber: 3.0, salt: 0 })
            .with_boundary(FieldSpec::Linear { c0: 1.0, cx: 0.5, cy: -0.2 })
            .with_g(FieldSpec::Constant { value: 1.0 })
            .with_seed(seed);
        let base = interior_ratio(&case.solve().unwrap()).unwrap();
        let scaled = interior_ratio(&case.scaled(lambda).solve().unwrap()).unwrap();
        prop_assert!(close(scaled.sup_inner, lambda * base.sup_inner, 1e-8));
        prop_assert!(close(scaled.l1_outer, lambda * base.l1_outer, 1e-8));
        prop_assert!(close(scaled.f_norm, lambda * base.f_norm, 1e-10));
        prop_assert!(close(scaled.ratio, base.ratio, 1e-8));
    }

    #[test]
    fn measured_constant_is_monotone_in_corpus(seed in 0u64..1000, split in 1usize..6) {
        let cases = zygmund_lab::estimates::corpus::interior_cases(6, seed, 12);
        let part = interior_corpus(&cases[..split]);
        let full = interior_corpus(&cases);
        prop_assert!(part.measured_constant <= full.measured_constant);
    }
}
