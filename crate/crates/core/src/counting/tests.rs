use ndarray::Array2;

use super::*;
use crate::graphfam::{class_weight, enumerate_family, Decoration, DecorationWord, Topology};
use crate::models::gaussian_matrix;

fn sym(n: usize, seed: u64) -> Array2<f64> {
    let g = gaussian_matrix(n, n, seed);
    (&g + &g.t()) / 2.0
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn coloring_examples() {
    let c = random_coloring(20, 1, 3).unwrap();
    assert!(c.colors.iter().all(|&v| v == 0));
    assert_eq!(
        random_coloring(50, 5, 9).unwrap(),
        random_coloring(50, 5, 9).unwrap()
    );
    let big = random_coloring(100_000, 8, 1).unwrap();
    let mut freq = [0usize; 8];
    big.colors.iter().for_each(|&v| freq[v as usize] += 1);
    for f in freq {
        assert!((f as f64 / 1e5 - 0.125).abs() < 0.01);
    }
    assert!(random_coloring(5, 0, 1).is_err());
}

#[test]
fn colorful_probability_examples() {
    assert!((colorful_probability(3, 3) - 6.0 / 27.0).abs() < 1e-15);
    assert_eq!(colorful_probability(1, 1), 1.0);
    let nine: f64 = (1..=9).map(f64::from).product::<f64>() / 9f64.powi(9);
    assert!(rel_close(colorful_probability(9, 9), nine, 1e-13));
    assert!(colorful_probability(30, 30) > 0.0);
}

#[test]
fn exhaustive_enumeration_counts() {
    assert_eq!(all_colorings(4, 3).unwrap().count(), 81);
    assert!(all_colorings(30, 5).is_err());
}

#[test]
fn oracle_counts_triangles_in_complete_graph() {
    let ones = Array2::<f64>::ones((4, 4));
    let t = enumerate_family(FamilyTag::H, 3).unwrap();
    let v = brute_force_sum(ones.view(), ones.view(), &t.classes[0], None, None).unwrap();
    assert_eq!(v, 4.0);
}

#[test]
fn oracle_rejects_short_cycles() {
    let ones = Array2::<f64>::ones((4, 4));
    let bad = DecoratedClass {
        canonical_word: DecorationWord {
            word: vec![Decoration::Bullet; 2],
            topology: Topology::Cycle,
        },
        aut: 4,
        e_bullet: 2,
        e_circ: 0,
        diff: 0,
        family_tag: FamilyTag::H,
        start_side: None,
    };
    assert!(brute_force_sum(ones.view(), ones.view(), &bad, None, None).is_err());
}

#[test]
fn all_ones_triangle_with_recolored_vertex() {
    let ones = Array2::<f64>::ones((4, 4));
    let t = enumerate_family(FamilyTag::H, 3).unwrap();
    let c = Coloring::new(3, vec![0, 1, 2, 1]).unwrap();
    let dp = dp_cycle_sum(ones.view(), ones.view(), &t.classes[0], &c).unwrap();
    let bf = brute_force_sum(ones.view(), ones.view(), &t.classes[0], Some(&c), None).unwrap();
    assert_eq!(dp, bf);
    assert_eq!(dp, 2.0);
}

#[test]
fn cycle_dp_matches_oracle() {
    for seed in 0..6 {
        let (x, y) = (sym(8, seed), sym(8, 100 + seed));
        let c = random_coloring(8, 4, 200 + seed).unwrap();
        for class in enumerate_family(FamilyTag::H, 4).unwrap().classes {
            let dp = dp_cycle_sum(x.view(), y.view(), &class, &c).unwrap();
            let bf = brute_force_sum(x.view(), y.view(), &class, Some(&c), None).unwrap();
            assert!(
                rel_close(dp, bf, 1e-9),
                "{} {dp} {bf}",
                class.canonical_word
            );
        }
    }
}

#[test]
fn bipartite_cycle_dp_matches_oracle() {
    for seed in 0..4 {
        let (n, nn) = (6, 5);
        let x = gaussian_matrix(n, nn, seed);
        let y = gaussian_matrix(n, nn, 50 + seed);
        for ell in [2, 3] {
            let c = random_coloring(n + nn, 2 * ell, 90 + seed).unwrap();
            for class in enumerate_family(FamilyTag::G, ell).unwrap().classes {
                let dp = dp_bipartite_cycle_sum(x.view(), y.view(), &class, &c).unwrap();
                let bf = brute_force_sum(x.view(), y.view(), &class, Some(&c), None).unwrap();
                assert!(
                    rel_close(dp, bf, 1e-9),
                    "{} {dp} {bf}",
                    class.canonical_word
                );
            }
        }
    }
}

#[test]
fn path_dp_matches_oracle() {
    for seed in 0..4 {
        let (x, y) = (sym(8, seed), sym(8, 10 + seed));
        for ell in 1..=3 {
            let c = random_coloring(8, ell + 1, 30 + seed).unwrap();
            for tag in [FamilyTag::J, FamilyTag::Jstar] {
                for class in enumerate_family(tag, ell).unwrap().classes {
                    let row = dp_path_row(x.view(), y.view(), &class, &c, 0).unwrap();
                    for v in 1..8 {
                        let bf =
                            brute_force_sum(x.view(), y.view(), &class, Some(&c), Some((0, v)))
                                .unwrap();
                        assert!(rel_close(row[v], bf, 1e-9) || (row[v] - bf).abs() < 1e-12);
                    }
                    assert_eq!(row[0], 0.0);
                }
            }
        }
    }
}

#[test]
fn single_edge_path_is_the_entry() {
    let (x, y) = (sym(5, 1), sym(5, 2));
    let class = &enumerate_family(FamilyTag::J, 1).unwrap().classes[0];
    let c = Coloring::new(2, vec![0, 1, 0, 1, 1]).unwrap();
    assert_eq!(
        dp_path_sum(x.view(), y.view(), class, &c, 0, 1).unwrap(),
        x[[0, 1]]
    );
    assert_eq!(
        dp_path_sum(x.view(), y.view(), class, &c, 0, 2).unwrap(),
        0.0
    );
    assert!(dp_path_sum(x.view(), y.view(), class, &c, 2, 2).is_err());
}

#[test]
fn single_hat_is_a_common_neighbour_sum() {
    let (n, nn) = (4, 5);
    let x = gaussian_matrix(n, nn, 1);
    let y = gaussian_matrix(n, nn, 2);
    let class = &enumerate_family(FamilyTag::I, 1).unwrap().classes[0];
    let colors = vec![0, 1, 2, 0, 2, 1, 0, 2, 2];
    let c = Coloring::new(3, colors.clone()).unwrap();
    let (u, v) = (0, 1);
    let direct: f64 = (0..nn)
        .filter(|&w| {
            let cw = colors[n + w];
            cw != colors[u] && cw != colors[v] && colors[u] != colors[v]
        })
        .map(|w| x[[u, w]] * x[[v, w]])
        .sum();
    let dp = dp_bipartite_path_sum(x.view(), y.view(), class, &c, u, v).unwrap();
    assert!((dp - direct).abs() < 1e-12);
}

#[test]
fn bipartite_path_dp_matches_oracle() {
    for seed in 0..3 {
        let (n, nn) = (6, 5);
        let x = gaussian_matrix(n, nn, seed);
        let y = gaussian_matrix(n, nn, 7 + seed);
        for ell in [1, 2] {
            let c = random_coloring(n + nn, 2 * ell + 1, 70 + seed).unwrap();
            for tag in [FamilyTag::I, FamilyTag::Istar] {
                for class in enumerate_family(tag, ell).unwrap().classes {
                    let row = dp_bipartite_path_row(x.view(), y.view(), &class, &c, 2).unwrap();
                    for v in (0..n).filter(|&v| v != 2) {
                        let bf =
                            brute_force_sum(x.view(), y.view(), &class, Some(&c), Some((2, v)))
                                .unwrap();
                        assert!(rel_close(row[v], bf, 1e-9) || (row[v] - bf).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn zero_matrices_give_zero() {
    let z = Array2::<f64>::zeros((6, 6));
    let c = random_coloring(6, 3, 1).unwrap();
    for class in enumerate_family(FamilyTag::H, 3).unwrap().classes {
        assert_eq!(dp_cycle_sum(z.view(), z.view(), &class, &c).unwrap(), 0.0);
    }
    let c = random_coloring(12, 4, 1).unwrap();
    for class in enumerate_family(FamilyTag::G, 2).unwrap().classes {
        assert_eq!(
            dp_bipartite_cycle_sum(z.view(), z.view(), &class, &c).unwrap(),
            0.0
        );
    }
}

#[test]
fn aggregated_cycle_kernel_equals_class_sum() {
    let w = Weights {
        lambda: 0.8,
        mu: 1.3,
        rho: 0.6,
    };
    for ell in 3..=5 {
        let (x, y) = (sym(9, ell as u64), sym(9, 40 + ell as u64));
        let c = random_coloring(9, ell, 5).unwrap();
        let agg = weighted_cycle_sum(x.view(), y.view(), w, ell, &c).unwrap();
        let by_class: f64 = enumerate_family(FamilyTag::H, ell)
            .unwrap()
            .classes
            .iter()
            .map(|h| {
                class_weight(h, w.lambda, w.mu, w.rho)
                    * dp_cycle_sum(x.view(), y.view(), h, &c).unwrap()
            })
            .sum();
        assert!(rel_close(agg, by_class, 1e-10), "{agg} {by_class}");
    }
}

#[test]
fn aggregated_bipartite_cycle_kernel_equals_class_sum() {
    let w = Weights {
        lambda: 0.7,
        mu: 1.1,
        rho: 0.4,
    };
    for ell in 2..=3 {
        let x = gaussian_matrix(7, 6, ell as u64);
        let y = gaussian_matrix(7, 6, 9 + ell as u64);
        let c = random_coloring(13, 2 * ell, 2).unwrap();
        let agg = weighted_bipartite_cycle_sum(x.view(), y.view(), w, ell, &c).unwrap();
        let by_class: f64 = enumerate_family(FamilyTag::G, ell)
            .unwrap()
            .classes
            .iter()
            .map(|h| {
                class_weight(h, w.lambda, w.mu, w.rho)
                    * dp_bipartite_cycle_sum(x.view(), y.view(), h, &c).unwrap()
            })
            .sum();
        assert!(rel_close(agg, by_class, 1e-10), "{agg} {by_class}");
    }
}

#[test]
fn aggregated_path_kernels_equal_class_sums() {
    let w = Weights {
        lambda: 0.9,
        mu: 1.2,
        rho: 0.5,
    };
    for ell in 1..=4 {
        let (x, y) = (sym(8, ell as u64), sym(8, 20 + ell as u64));
        let c = random_coloring(8, ell + 1, 3).unwrap();
        let agg = weighted_path_rows(x.view(), y.view(), w, ell, &c, &[3, 5]).unwrap();
        for (i, &u) in [3usize, 5].iter().enumerate() {
            let mut by_class = [0.0; 8];
            for h in enumerate_family(FamilyTag::J, ell).unwrap().classes {
                let row = dp_path_row(x.view(), y.view(), &h, &c, u).unwrap();
                let wt = class_weight(&h, w.lambda, w.mu, w.rho);
                by_class
                    .iter_mut()
                    .zip(&row)
                    .for_each(|(a, b)| *a += wt * b);
            }
            for v in 0..8 {
                assert!((agg[i][v] - by_class[v]).abs() <= 1e-10 * (1.0 + by_class[v].abs()));
            }
        }
    }
    for ell in 1..=3 {
        let x = gaussian_matrix(6, 5, ell as u64);
        let y = gaussian_matrix(6, 5, 30 + ell as u64);
        let c = random_coloring(11, 2 * ell + 1, 4).unwrap();
        let agg = weighted_bipartite_path_rows(x.view(), y.view(), w, ell, &c, &[1]).unwrap();
        let mut by_class = [0.0; 6];
        for h in enumerate_family(FamilyTag::I, ell).unwrap().classes {
            let row = dp_bipartite_path_row(x.view(), y.view(), &h, &c, 1).unwrap();
            let wt = class_weight(&h, w.lambda, w.mu, w.rho);
            by_class
                .iter_mut()
                .zip(&row)
                .for_each(|(a, b)| *a += wt * b);
        }
        for v in 0..6 {
            assert!((agg[0][v] - by_class[v]).abs() <= 1e-10 * (1.0 + by_class[v].abs()));
        }
    }
}

#[test]
fn exhaustive_average_is_unbiased() {
    let n = 5;
    let (x, y) = (sym(n, 3), sym(n, 4));
    let ell = 3;
    let r = colorful_probability(ell, ell);
    for class in enumerate_family(FamilyTag::H, ell).unwrap().classes {
        let mut total = 0.0;
        let mut count = 0usize;
        for c in all_colorings(n, ell).unwrap() {
            total += dp_cycle_sum(x.view(), y.view(), &class, &c).unwrap();
            count += 1;
        }
        let avg = total / count as f64;
        let bf = brute_force_sum(x.view(), y.view(), &class, None, None).unwrap();
        assert!(rel_close(avg, r * bf, 1e-9));
    }
}

#[test]
fn linearity_in_x() {
    let (x, y) = (sym(7, 1), sym(7, 2));
    let c = random_coloring(7, 4, 8).unwrap();
    let alpha = 1.7;
    let xs = &x * alpha;
    for class in enumerate_family(FamilyTag::H, 4).unwrap().classes {
        let a = dp_cycle_sum(x.view(), y.view(), &class, &c).unwrap();
        let b = dp_cycle_sum(xs.view(), y.view(), &class, &c).unwrap();
        assert!(rel_close(b, a * alpha.powi(class.e_bullet as i32), 1e-10) || a.abs() < 1e-14);
    }
}

#[test]
fn permutation_equivariance() {
    let n = 8;
    let (x, y) = (sym(n, 5), sym(n, 6));
    let c = random_coloring(n, 4, 9).unwrap();
    let perm = [3, 7, 0, 5, 1, 6, 2, 4];
    let px = Array2::from_shape_fn((n, n), |(i, j)| x[[perm[i], perm[j]]]);
    let py = Array2::from_shape_fn((n, n), |(i, j)| y[[perm[i], perm[j]]]);
    let pc = Coloring::new(4, (0..n).map(|i| c.colors[perm[i]]).collect()).unwrap();
    for class in enumerate_family(FamilyTag::H, 4).unwrap().classes {
        let a = dp_cycle_sum(x.view(), y.view(), &class, &c).unwrap();
        let b = dp_cycle_sum(px.view(), py.view(), &class, &pc).unwrap();
        assert!(rel_close(a, b, 1e-12) || (a - b).abs() < 1e-14);
    }
}

#[test]
fn palette_must_match() {
    let (x, y) = (sym(6, 1), sym(6, 2));
    let class = &enumerate_family(FamilyTag::H, 3).unwrap().classes[0];
    let c = random_coloring(6, 4, 1).unwrap();
    assert!(dp_cycle_sum(x.view(), y.view(), class, &c).is_err());
    let bad = Array2::<f64>::zeros((5, 5));
    let c3 = random_coloring(6, 3, 1).unwrap();
    assert!(matches!(
        dp_cycle_sum(x.view(), bad.view(), class, &c3),
        Err(Error::Dimension(_))
    ));
}
