//! Engine invariants: Young's inequality, associativity of the twisted
//! convolution, agreement of the convolution paths, worker-count
//! independence and the degenerate cases of the Abel sum.

use nilproj::engine::{ConvolutionPath, Engine, SliceKernel};
use nilproj::grid::{Grid, SampledFunction};
use nilproj_core::group::examples::{anisotropic_r1, heisenberg};
use nilproj_core::C64;
use proptest::prelude::*;

fn l1(v: &[C64], cell: f64) -> f64 {
    v.iter().map(|z| z.norm()).sum::<f64>() * cell
}

fn l2(v: &[C64], cell: f64) -> f64 {
    (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt()
}

fn bump(grid: &Grid, centre: [f64; 2], width: f64, freq: f64) -> Vec<C64> {
    grid.y_points_all()
        .iter()
        .map(|y| {
            let d2 = (y[0] - centre[0]).powi(2) + (y[1] - centre[1]).powi(2);
            C64::from_polar((-d2 / (width * width)).exp(), freq * y[0])
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn young_inequality(
        f in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        g in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        tau in -3.0f64..3.0,
    ) {
        let grid = Grid::new(2, 2.0, 8, 1, 1.0, 2).unwrap();
        let engine = Engine::new(&heisenberg(), grid, 1).unwrap();
        let f: Vec<C64> = f.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let g: Vec<C64> = g.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let h = grid.y_cell();
        let c = engine.twisted_convolve(&f, &g, &[tau]).unwrap();
        prop_assert!(l2(&c, h) <= l1(&f, h) * l2(&g, h) * (1.0 + 1e-12));
    }
}

#[test]
fn fast_and_direct_paths_agree() {
    let grid = Grid::new(2, 4.0, 32, 1, 1.0, 2).unwrap();
    let mut engine = Engine::new(&heisenberg(), grid, 1).unwrap();
    let f = bump(&grid, [0.5, -0.3], 0.8, 1.3);
    let g = engine.kernel_slice(SliceKernel::Level(2), &[1.7]).unwrap();
    let fast = engine.twisted_convolve(&f, &g, &[1.7]).unwrap();
    engine.path = ConvolutionPath::Direct;
    let direct = engine.twisted_convolve(&f, &g, &[1.7]).unwrap();
    let diff: Vec<C64> = fast.iter().zip(&direct).map(|(a, b)| a - b).collect();
    assert!(l2(&diff, 1.0) <= 1e-10 * l2(&direct, 1.0));
}

#[test]
fn twisted_convolution_is_associative() {
    // Narrow bumps near the centre keep every partial product inside the box.
    let grid = Grid::new(2, 6.0, 64, 1, 1.0, 2).unwrap();
    let engine = Engine::new(&heisenberg(), grid, 1).unwrap();
    let a = bump(&grid, [0.4, 0.0], 0.5, 0.7);
    let b = bump(&grid, [-0.3, 0.5], 0.6, -0.4);
    let c = bump(&grid, [0.0, -0.4], 0.5, 0.2);
    let tau = [0.9];
    let left = engine.twisted_convolve(&engine.twisted_convolve(&a, &b, &tau).unwrap(), &c, &tau).unwrap();
    let right = engine.twisted_convolve(&a, &engine.twisted_convolve(&b, &c, &tau).unwrap(), &tau).unwrap();
    let diff: Vec<C64> = left.iter().zip(&right).map(|(x, y)| x - y).collect();
    assert!(l2(&diff, 1.0) <= 1e-8 * l2(&left, 1.0), "{}", l2(&diff, 1.0) / l2(&left, 1.0));
}

#[test]
fn level_kernels_are_twisted_orthogonal_on_the_heisenberg_group() {
    let grid = Grid::new(2, 6.0, 128, 1, 1.0, 2).unwrap();
    let engine = Engine::new(&heisenberg(), grid, 1).unwrap();
    let h = grid.y_cell();
    let q: Vec<Vec<C64>> = (0..3).map(|m| engine.kernel_slice(SliceKernel::Level(m), &[1.0]).unwrap()).collect();
    for a in 0..3 {
        for b in 0..3 {
            let c = engine.twisted_convolve(&q[a], &q[b], &[1.0]).unwrap();
            let expect: Vec<C64> = if a == b { q[a].clone() } else { vec![C64::new(0.0, 0.0); c.len()] };
            let diff: Vec<C64> = c.iter().zip(&expect).map(|(x, y)| x - y).collect();
            assert!(l2(&diff, h) <= 1e-4 * l2(&q[a], h));
        }
    }
}

fn small_gaussian(grid: Grid) -> SampledFunction {
    SampledFunction::from_fn(grid, |y, t| {
        let s: f64 = y.iter().chain(t).map(|v| v * v).sum();
        C64::from_polar((-0.5 * s).exp(), 0.3 * t[0])
    })
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let grid = Grid::new(2, 5.0, 16, 1, 8.0, 32).unwrap();
    let f = small_gaussian(grid);
    let one = Engine::new(&heisenberg(), grid, 1).unwrap().apply_projection(&f, 1).unwrap();
    let three = Engine::new(&heisenberg(), grid, 3).unwrap().apply_projection(&f, 1).unwrap();
    assert_eq!(one.values, three.values);
}

#[test]
fn abel_sum_at_zero_is_the_first_projection() {
    let grid = Grid::new(2, 5.0, 16, 1, 8.0, 32).unwrap();
    let engine = Engine::new(&heisenberg(), grid, 1).unwrap();
    let f = small_gaussian(grid);
    let p0 = engine.apply_projection(&f, 0).unwrap();
    let n = p0.l2_norm();
    assert!(engine.abel_reconstruct(&f, 0.0, Some(0)).unwrap().l2_distance(&p0).unwrap() <= 1e-14 * n);
    assert!(engine.abel_reconstruct(&f, 0.0, Some(7)).unwrap().l2_distance(&p0).unwrap() <= 1e-14 * n);
    assert!(engine.abel_reconstruct(&f, 0.0, None).unwrap().l2_distance(&p0).unwrap() <= 1e-12 * n);
    assert!(engine.abel_reconstruct(&f, 1.0, None).is_err());
}

#[test]
fn projections_run_in_four_horizontal_dimensions() {
    let grid = Grid::new(4, 3.0, 8, 1, 6.0, 8).unwrap();
    let engine = Engine::new(&anisotropic_r1(), grid, 1).unwrap();
    let f = small_gaussian(grid);
    let parts = engine.project_levels(&f, &[0, 1]).unwrap();
    for (m, part) in parts.iter().enumerate() {
        let single = engine.apply_projection(&f, m).unwrap();
        assert!(part.l2_distance(&single).unwrap() <= 1e-12 * single.l2_norm().max(1e-300));
    }
    assert!(parts.iter().all(|p| p.values.iter().all(|v| v.is_finite())));
}
