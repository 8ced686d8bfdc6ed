//! Public-API checks against independent oracles: naive counting, the
//! naive Warnock double sum, closed forms and grid quadrature.

use discrepancy_core::discrepancy::{
    check_interpolation, discrepancy_at, eval_discrepancy, l2_norm_exact, l2_squared_exact,
    lp_norm_mc, luxemburg_norm, orlicz_norm_mc, DiscrepancySample, DominanceCounter,
    EmpiricalMeasure, OrliczSpec,
};
use discrepancy_core::haar::{
    all_coefficients, build_r_function_greedy, eval_r_function, haar_coefficient,
    inner_product_exact, log_level, DyadicRectangle, RFunction, ShapeVector,
};
use discrepancy_core::mc::uniform_points;
use discrepancy_core::pointset::{
    check_counting_bound, corner_collapse, corner_cube_members, generate_faure_net,
    generate_hammersley, generate_random, generate_van_der_corput, verify_net, Generator,
};
use discrepancy_core::PointSet;
use proptest::prelude::*;

fn set(points: &[&[f64]]) -> PointSet {
    let v: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    PointSet::from_points(&v, Generator::named("fixture")).unwrap()
}

fn naive_discrepancy(p: &PointSet, x: &[f64]) -> f64 {
    let count = p
        .points()
        .filter(|q| q.iter().zip(x).all(|(a, b)| a < b))
        .count();
    count as f64 - p.len() as f64 * x.iter().product::<f64>()
}

fn naive_warnock(p: &PointSet) -> f64 {
    let n = p.len() as f64;
    let d = p.dim() as i32;
    let mut cross = 0.0;
    for q in p.points() {
        cross += q.iter().map(|v| 1.0 - v * v).product::<f64>();
    }
    let mut pairs = 0.0;
    for a in p.points() {
        for b in p.points() {
            pairs += a
                .iter()
                .zip(b)
                .map(|(u, v)| 1.0 - u.max(*v))
                .product::<f64>();
        }
    }
    n * n / 3f64.powi(d) - 2.0 * n / 2f64.powi(d) * cross + pairs
}

#[test]
fn pointwise_discrepancy_matches_counting() {
    for d in 1..=4 {
        let p = generate_random(d, 300, d as u64).unwrap();
        let xs = uniform_points(d, 500, 40 + d as u64);
        let counter = DominanceCounter::new(&p);
        let batch = discrepancy_at(&p, &counter, &xs);
        for (i, x) in xs.chunks_exact(d).enumerate() {
            let want = naive_discrepancy(&p, x);
            assert!((eval_discrepancy(&p, x).unwrap() - want).abs() < 1e-9);
            assert!((batch[i] - want).abs() < 1e-9);
        }
    }
}

#[test]
fn pointwise_hand_values() {
    let p = set(&[&[0.5, 0.5]]);
    assert_eq!(eval_discrepancy(&p, &[0.75, 0.75]).unwrap(), 1.0 - 0.5625);
    assert_eq!(eval_discrepancy(&p, &[0.0, 0.0]).unwrap(), 0.0);
    let dead = set(&[&[1.0, 1.0]]);
    assert_eq!(eval_discrepancy(&dead, &[1.0, 0.5]).unwrap(), -0.5);
    assert_eq!(eval_discrepancy(&dead, &[1.0, 1.0]).unwrap(), -1.0);
    assert!(eval_discrepancy(&p, &[0.5]).is_err());
    assert!(eval_discrepancy(&p, &[0.5, 1.5]).is_err());
}

#[test]
fn warnock_matches_naive_double_sum() {
    for d in 1..=5 {
        for n in [1usize, 7, 64, 300] {
            let p = generate_random(d, n, (d * 1000 + n) as u64).unwrap();
            let fast = l2_squared_exact(&p);
            let slow = naive_warnock(&p);
            assert!(
                (fast - slow).abs() <= 1e-9 * slow.abs().max(1.0),
                "d={d} n={n}: {fast} vs {slow}"
            );
        }
    }
    assert!((l2_squared_exact(&set(&[&[0.5]])) - 1.0 / 12.0).abs() < 1e-15);
    assert!((l2_squared_exact(&set(&[&[0.0]])) - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn monte_carlo_norms_against_closed_forms() {
    let half = set(&[&[0.5]]);
    let r = lp_norm_mc(&half, 2.0, 1_000_000, 1).unwrap();
    assert!((r.value - (1.0f64 / 12.0).sqrt()).abs() < 3.0 * r.std_error);
    let dead = set(&[&[1.0, 1.0]]);
    let r = lp_norm_mc(&dead, 1.0, 200_000, 2).unwrap();
    assert!((r.value - 0.25).abs() < 3.0 * r.std_error);
    let p = generate_hammersley(3, 200).unwrap();
    let exact = l2_norm_exact(&p).value;
    let r = lp_norm_mc(&p, 2.0, 1_000_000, 3).unwrap();
    assert!((r.value - exact).abs() < 3.0 * r.std_error);
}

#[test]
fn norms_on_one_sample_set() {
    let p = generate_random(2, 100, 9).unwrap();
    let smp = DiscrepancySample::draw(&p, 20_000, 4).unwrap();
    let mut last = 0.0;
    for q in [1.0, 1.5, 2.0, 3.0, 6.0] {
        let v = smp.lp_norm(q).unwrap().value;
        assert!(v >= last);
        last = v;
    }
    let l1 = smp.lp_norm(1.0).unwrap().value;
    let ll0 = smp
        .orlicz_norm(OrliczSpec::llogl(0.0).unwrap(), 1e-8)
        .unwrap()
        .value;
    assert_eq!(ll0, l1);
    for alpha in [0.5, 1.0, 2.0] {
        let v = smp
            .orlicz_norm(OrliczSpec::llogl(alpha).unwrap(), 1e-8)
            .unwrap()
            .value;
        assert!(v >= l1);
    }
    let via_fn = orlicz_norm_mc(&p, OrliczSpec::llogl(1.0).unwrap(), 20_000, 4, 1e-8).unwrap();
    assert_eq!(
        via_fn.value,
        smp.orlicz_norm(OrliczSpec::llogl(1.0).unwrap(), 1e-8)
            .unwrap()
            .value
    );
}

/// Root of `t ln(e + t)^α = 1` by bisection.
fn llogl_inverse_of_one(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * (std::f64::consts::E + mid).ln().powf(alpha) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn luxemburg_norm_of_constants() {
    let c = 2.5;
    let values = vec![c; 1000];
    let m = EmpiricalMeasure::new(&values);
    let (v, _) = luxemburg_norm(&m, OrliczSpec::ExpL, 1e-10).unwrap();
    assert!((v - c / 2f64.ln()).abs() < 1e-8 * v);
    for alpha in [0.5, 1.0, 3.0] {
        let (v, _) = luxemburg_norm(&m, OrliczSpec::llogl(alpha).unwrap(), 1e-10).unwrap();
        let want = c / llogl_inverse_of_one(alpha);
        assert!(
            (v - want).abs() < 1e-8 * want,
            "alpha={alpha}: {v} vs {want}"
        );
    }
}

#[test]
fn interpolation_examples() {
    let p = generate_random(2, 50, 1).unwrap();
    assert!(check_interpolation(&p, 2.0, 10_000, 5).unwrap().holds);
    let h = generate_hammersley(2, 256).unwrap();
    assert!(check_interpolation(&h, 3.0, 10_000, 5).unwrap().holds);
    let constant = vec![0.7; 500];
    let ic = EmpiricalMeasure::new(&constant).interpolation(3.0).unwrap();
    assert!(ic.holds);
    assert!((ic.lr - ic.rhs).abs() < 1e-12);
}

#[test]
fn generator_examples() {
    let p = generate_random(2, 10_000, 5).unwrap();
    for j in 0..2 {
        let mean = p.points().map(|q| q[j]).sum::<f64>() / 1e4;
        assert!((mean - 0.5).abs() < 0.02);
    }
    let v = generate_van_der_corput(4).unwrap();
    let pts: Vec<Vec<f64>> = v.points().map(<[f64]>::to_vec).collect();
    assert_eq!(
        pts,
        [
            vec![0.0, 0.0],
            vec![0.25, 0.5],
            vec![0.5, 0.25],
            vec![0.75, 0.75]
        ]
    );
    assert_eq!(generate_van_der_corput(1).unwrap().point(0), [0.0, 0.0]);
    for s in 2..=12 {
        let v = generate_van_der_corput(1 << s).unwrap();
        assert!(verify_net(&v, 2, s).unwrap().is_net);
    }
    assert!(
        verify_net(&generate_faure_net(2, 4, 2).unwrap(), 2, 4)
            .unwrap()
            .is_net
    );
    assert!(
        verify_net(&generate_faure_net(3, 3, 3).unwrap(), 3, 3)
            .unwrap()
            .is_net
    );
    assert!(generate_faure_net(2, 2, 3).is_err());
}

#[test]
fn net_verifier_examples() {
    assert!(
        verify_net(&generate_hammersley(2, 16).unwrap(), 2, 4)
            .unwrap()
            .is_net
    );
    let r = verify_net(&generate_random(2, 16, 3).unwrap(), 2, 4).unwrap();
    assert!(!r.is_net);
    assert!(r.violation.is_some());
    let net = generate_faure_net(3, 3, 3).unwrap();
    let mut coords = net.coords().to_vec();
    coords.copy_within(0..3, 3);
    let dup = PointSet::new(3, coords, Generator::named("duplicate")).unwrap();
    assert!(!verify_net(&dup, 3, 3).unwrap().is_net);

    let cb = check_counting_bound(&generate_faure_net(2, 6, 2).unwrap(), 6, 10_000, 1);
    assert!(cb.max_deviation <= 6.0);
    let cb = check_counting_bound(&net, 3, 10_000, 2);
    assert!(cb.max_deviation <= 9.0);
}

#[test]
fn corner_collapse_examples() {
    let p = generate_faure_net(2, 12, 2).unwrap();
    let members = corner_cube_members(&p, 0.25).unwrap();
    // a side of N^{-1/4} = 2^{-3} holds 2^{12-6} = 64 net points
    assert_eq!(members.len(), 64);
    let single = set(&[&[0.999, 0.999], &[0.2, 0.3]]);
    let c = corner_collapse(&single, 0.5).unwrap();
    assert_eq!(c.point(0), [1.0, 1.0]);
    assert_eq!(c.point(1), [0.2, 0.3]);
}

/// `∫ f` for a step function constant on the level-`levels + 1` grid.
fn grid_integral(f: impl Fn(&[f64]) -> f64, levels: &[u32]) -> f64 {
    let sides: Vec<usize> = levels.iter().map(|&l| 1usize << (l + 1)).collect();
    let cells: usize = sides.iter().product();
    let mut x = vec![0.0; levels.len()];
    let mut total = 0.0;
    for c in 0..cells {
        let mut rest = c;
        for (j, &s) in sides.iter().enumerate() {
            x[j] = ((rest % s) as f64 + 0.5) / s as f64;
            rest /= s;
        }
        total += f(&x);
    }
    total / cells as f64
}

#[test]
fn haar_hand_values() {
    let half = set(&[&[0.5]]);
    let whole = DyadicRectangle::new(ShapeVector::new(vec![0]).unwrap(), vec![0]).unwrap();
    assert!((haar_coefficient(&half, &whole).unwrap() - 0.25).abs() < 1e-15);
    let quarter = set(&[&[0.25]]);
    let right = DyadicRectangle::new(ShapeVector::new(vec![1]).unwrap(), vec![1]).unwrap();
    assert!((haar_coefficient(&quarter, &right).unwrap() + 1.0 / 16.0).abs() < 1e-15);
    let dead = set(&[&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]]);
    let cube =
        DyadicRectangle::new(ShapeVector::new(vec![0, 0, 0]).unwrap(), vec![0, 0, 0]).unwrap();
    assert!((haar_coefficient(&dead, &cube).unwrap() + 2.0 / 64.0).abs() < 1e-15);
    let p = generate_random(2, 40, 3).unwrap();
    let zero = ShapeVector::new(vec![0, 0]).unwrap();
    assert_eq!(
        all_coefficients(&p, &zero).unwrap()[0],
        haar_coefficient(&p, &DyadicRectangle::from_index(&zero, 0)).unwrap()
    );
}

#[test]
fn r_function_examples() {
    let s0 = ShapeVector::new(vec![0]).unwrap();
    let f = RFunction::from_signs(s0, &[1]).unwrap();
    assert_eq!(eval_r_function(&f, &[0.75]), 1.0);
    assert_eq!(eval_r_function(&f, &[0.25]), -1.0);

    let shape = ShapeVector::new(vec![2, 3]).unwrap();
    let signs: Vec<i8> = (0..shape.cells())
        .map(|i| if (i * 5 + 1) % 3 == 0 { 1 } else { -1 })
        .collect();
    let g = RFunction::from_signs(shape, &signs).unwrap();
    assert!(grid_integral(|x| g.eval(x), &[2, 3]).abs() < 1e-12);

    let p = generate_hammersley(2, 64).unwrap();
    let n = log_level(p.len());
    for s in ShapeVector::all_of_order(n, 2) {
        let f = build_r_function_greedy(&p, &s).unwrap();
        let value = f.inner_product(&p).unwrap();
        let abs: f64 = all_coefficients(&p, &s)
            .unwrap()
            .iter()
            .map(|c| c.abs())
            .sum();
        assert!((value - abs).abs() < 1e-12);
        assert!(value > 0.0);
    }
    assert_eq!(inner_product_exact(&p, &[]).unwrap(), 0.0);
}

#[test]
fn r_function_inner_product_against_monte_carlo() {
    let p = generate_random(2, 128, 6).unwrap();
    let f = build_r_function_greedy(&p, &ShapeVector::new(vec![3, 4]).unwrap()).unwrap();
    let exact = f.inner_product(&p).unwrap();
    let xs = uniform_points(2, 1_000_000, 17);
    let counter = DominanceCounter::new(&p);
    let d = discrepancy_at(&p, &counter, &xs);
    let prods: Vec<f64> = xs
        .chunks_exact(2)
        .zip(&d)
        .map(|(x, v)| v * f.eval(x))
        .collect();
    let m = prods.len() as f64;
    let mean = prods.iter().sum::<f64>() / m;
    let var = prods.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    assert!(
        (mean - exact).abs() < 3.0 * (var / m).sqrt(),
        "{mean} vs {exact}"
    );
}

#[test]
fn coefficient_sum_matches_quadrature() {
    // Σ_R ⟨D, h_R⟩ = ⟨D, Σ_R h_R⟩; D is integrated per grid cell exactly
    // in its counting part and by the midpoint rule in its linear part.
    let p = generate_random(2, 30, 8).unwrap();
    let shape = ShapeVector::new(vec![2, 1]).unwrap();
    let total: f64 = all_coefficients(&p, &shape).unwrap().iter().sum();
    let plus = RFunction::from_signs(shape.clone(), &vec![1; shape.cells()]).unwrap();
    let grid = 1usize << 10;
    let h = 1.0 / grid as f64;
    // length of {x in cell k : q < x}
    let axis = |k: usize, q: f64| {
        let lo = k as f64 * h;
        (lo + h - lo.max(q)).clamp(0.0, h)
    };
    let mut quad = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let x = [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h];
            let hv = plus.eval(&x);
            let counting: f64 = p.points().map(|q| axis(i, q[0]) * axis(j, q[1])).sum();
            quad += hv * (counting - p.len() as f64 * x[0] * x[1] * h * h);
        }
    }
    assert!((total - quad).abs() < 1e-6, "{total} vs {quad}");
}

proptest! {
    #[test]
    fn discrepancy_is_bounded(seed in 0u64..500, d in 1usize..4, n in 1usize..40) {
        let p = generate_random(d, n, seed).unwrap();
        for x in uniform_points(d, 20, seed + 1).chunks_exact(d) {
            let v = eval_discrepancy(&p, x).unwrap();
            prop_assert!(v >= -(n as f64) && v <= n as f64);
        }
    }

    #[test]
    fn l2_is_nonnegative_and_bounded(seed in 0u64..500, d in 1usize..4, n in 1usize..30) {
        let p = generate_random(d, n, seed).unwrap();
        let v = l2_squared_exact(&p);
        prop_assert!(v >= -1e-12);
        prop_assert!(v <= (n * n) as f64);
    }

    #[test]
    fn greedy_is_maximal_under_single_flips(seed in 0u64..200, a in 0u32..4, b in 0u32..4) {
        let p = generate_random(2, 20, seed).unwrap();
        let f = build_r_function_greedy(&p, &ShapeVector::new(vec![a, b]).unwrap()).unwrap();
        let v = f.inner_product(&p).unwrap();
        prop_assert!(v >= 0.0);
        for i in 0..f.shape().cells() {
            prop_assert!(f.flipped(i).inner_product(&p).unwrap() <= v + 1e-12);
        }
    }
}
