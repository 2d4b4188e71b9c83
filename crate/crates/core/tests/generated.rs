//! Structural checks on generated R-MAT inputs.

use std::time::{Duration, Instant};

use gcolor::stats::{average_clustering, degree_stats};
use gcolor::{greedy_color_natural, rmat_generate, verify_coloring, Graph, Preset, RmatParams};

fn generate(preset: Preset, scale: u32, seed: u64) -> Graph {
    rmat_generate(&RmatParams::from_preset(preset, scale, 8, seed)).unwrap()
}

#[test]
fn er_dedup_loss_is_small() {
    let g = generate(Preset::Er, 16, 1);
    let requested = 8.0 * 65536.0;
    let ratio = g.num_edges() as f64 / requested;
    assert!((0.95..=1.0).contains(&ratio), "kept {ratio}");
}

#[test]
fn mean_degree_close_to_twice_edge_factor() {
    for preset in Preset::ALL {
        let s = degree_stats(&generate(preset, 14, 2));
        assert!((s.avg_degree - 16.0).abs() <= 1.6, "{preset}: {}", s.avg_degree);
    }
}

#[test]
fn skewed_presets_have_isolated_vertices() {
    let er = degree_stats(&generate(Preset::Er, 16, 3));
    let b = degree_stats(&generate(Preset::B, 16, 3));
    assert!(b.isolated_pct > 0.0);
    assert!(er.isolated_pct < 0.01, "{}", er.isolated_pct);
}

#[test]
fn skewed_max_degree_dominates() {
    let er = degree_stats(&generate(Preset::Er, 16, 4));
    let g = degree_stats(&generate(Preset::G, 16, 4));
    let b = degree_stats(&generate(Preset::B, 16, 4));
    assert!(
        b.max_degree >= 10 * er.max_degree,
        "B {} vs ER {}",
        b.max_degree,
        er.max_degree
    );
    assert!(b.max_degree > g.max_degree && g.max_degree > er.max_degree);
    assert!(b.variance > g.variance && g.variance > er.variance);
}

#[test]
fn clustering_increases_with_skew() {
    let avg = |p| average_clustering(&generate(p, 16, 5)).unwrap();
    let (er, g, b) = (avg(Preset::Er), avg(Preset::G), avg(Preset::B));
    assert!(b > g && g > er, "B {b} G {g} ER {er}");
}

#[test]
fn greedy_uses_far_fewer_than_max_degree_colors() {
    for preset in Preset::ALL {
        let g = generate(preset, 16, 6);
        let c = greedy_color_natural(&g);
        assert!(verify_coloring(&g, &c).is_empty());
        let colors = c.num_colors().unwrap() as usize;
        let delta = g.max_degree();
        assert!(colors * 2 <= delta + 1, "{preset}: {colors} colors, max degree {delta}");
    }
}

fn best_of(reps: usize, f: impl Fn()) -> Duration {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn greedy_runtime_scales_linearly() {
    let small = generate(Preset::Er, 16, 7);
    let large = generate(Preset::Er, 17, 7);
    assert!(large.num_edges() >= 2 * small.num_edges() - small.num_edges() / 50);
    let t_small = best_of(7, || {
        std::hint::black_box(greedy_color_natural(&small));
    });
    let t_large = best_of(7, || {
        std::hint::black_box(greedy_color_natural(&large));
    });
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    assert!(ratio <= 2.5, "doubling the input took {ratio:.2}x");
}
