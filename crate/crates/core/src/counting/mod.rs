//! Color coding: random colorings, colorful subgraph sums for decorated
//! cycles and paths, and an exhaustive oracle for small instances.
//!
//! Every sum is computed by the walk engine in [`engine`]. Per-class sums
//! drive a rotation automaton for the class word; aggregated sums
//! `Σ_H weight(H) · sum_H` drive a four-state automaton that tracks the first
//! and the latest decoration and attaches the class weight on the fly.
//!
//! A colorful cycle contains exactly one vertex of color 0. Sequences are
//! therefore enumerated only from color-0 starting points, and the rotation
//! of the class word that brings the color-0 vertex to the front is tracked
//! as automaton state.

mod brute;
mod engine;

use ndarray::ArrayView2;
use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::graphfam::{DecoratedClass, FamilyTag};
use crate::rng::{derive_seed, rng_from, STREAM_COLORINGS};

pub use brute::brute_force_sum;
use engine::{closed_walk_sum, open_walk_rows, Automaton, WalkGraph};

/// Largest palette the bitmask dynamic programs support.
pub const MAX_PALETTE: usize = 31;

/// Assignment of a color in `[palette]` to each vertex. For bipartite
/// instances the assignment covers `[n] ⊔ [N]`, the first `n` entries
/// belonging to `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub palette: usize,
    pub colors: Vec<u8>,
}

impl Coloring {
    pub fn new(palette: usize, colors: Vec<u8>) -> Result<Self> {
        if palette == 0 || palette > MAX_PALETTE {
            return domain(format!("palette size {palette} outside [1, {MAX_PALETTE}]"));
        }
        if colors.iter().any(|&c| c as usize >= palette) {
            return domain("color outside the palette");
        }
        Ok(Coloring { palette, colors })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// Independent uniform colors in `[k]`, deterministic per seed.
pub fn random_coloring(n_vertices: usize, k: usize, seed: u64) -> Result<Coloring> {
    if k == 0 || k > MAX_PALETTE {
        return domain(format!("palette size {k} outside [1, {MAX_PALETTE}]"));
    }
    let mut rng = rng_from(seed);
    let colors = (0..n_vertices)
        .map(|_| rng.random_range(0..k) as u8)
        .collect();
    Ok(Coloring { palette: k, colors })
}

/// Largest number of colorings [`all_colorings`] agrees to enumerate.
pub const MAX_EXHAUSTIVE_COLORINGS: u64 = 10_000_000;

/// Every coloring of `n_vertices` vertices with `k` colors, in lexicographic order.
pub fn all_colorings(n_vertices: usize, k: usize) -> Result<impl Iterator<Item = Coloring>> {
    if k == 0 || k > MAX_PALETTE {
        return domain(format!("palette size {k} outside [1, {MAX_PALETTE}]"));
    }
    let total = (k as u64)
        .checked_pow(n_vertices as u32)
        .filter(|&t| t <= MAX_EXHAUSTIVE_COLORINGS);
    let Some(total) = total else {
        return Err(Error::TooLarge(format!("{k}^{n_vertices} colorings")));
    };
    Ok((0..total).map(move |mut idx| {
        let mut colors = vec![0u8; n_vertices];
        for c in colors.iter_mut().rev() {
            *c = (idx % k as u64) as u8;
            idx /= k as u64;
        }
        Coloring { palette: k, colors }
    }))
}

/// Colorings used by one statistic: `t` random colorings, coloring `k`
/// seeded by `derive_seed(derive_seed(seed, STREAM_COLORINGS), k)`, or with
/// `exhaustive` every coloring in lexicographic order.
pub fn coloring_batch(
    n_vertices: usize,
    palette: usize,
    t: usize,
    exhaustive: bool,
    seed: u64,
) -> Result<Vec<Coloring>> {
    if exhaustive {
        return Ok(all_colorings(n_vertices, palette)?.collect());
    }
    if t == 0 {
        return domain("at least one coloring is required");
    }
    let base = derive_seed(seed, STREAM_COLORINGS);
    (0..t)
        .map(|k| random_coloring(n_vertices, palette, derive_seed(base, k as u64)))
        .collect()
}

/// Probability `k!/((k−m)! k^m)` that `m` fixed vertices receive distinct
/// colors; with `k = m` this is `m!/m^m`. Evaluated in log space.
pub fn colorful_probability(m: usize, k: usize) -> f64 {
    if m > k {
        return 0.0;
    }
    let log: f64 = (0..m)
        .map(|i| ((k - i) as f64).ln() - (k as f64).ln())
        .sum();
    log.exp()
}

fn check_square_pair(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<usize> {
    let n = x.nrows();
    if x.ncols() != n || y.dim() != (n, n) {
        return Err(Error::Dimension(format!(
            "expected two square matrices of equal size, got {:?} and {:?}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(n)
}

fn check_rect_pair(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<(usize, usize)> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "expected two matrices of equal shape, got {:?} and {:?}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.dim())
}

fn check_coloring(c: &Coloring, vertices: usize, palette: usize) -> Result<()> {
    if c.len() != vertices {
        return Err(Error::Dimension(format!(
            "coloring covers {} vertices, expected {vertices}",
            c.len()
        )));
    }
    if c.palette != palette {
        return domain(format!("palette {} must equal {palette}", c.palette));
    }
    Ok(())
}

fn check_tag(class: &DecoratedClass, allowed: &[FamilyTag]) -> Result<()> {
    if !allowed.contains(&class.family_tag) {
        return domain(format!(
            "class of family {:?} not accepted here (expected one of {allowed:?})",
            class.family_tag
        ));
    }
    Ok(())
}

fn word_bit(w: u32, len: usize, i: usize) -> usize {
    ((w >> (len - 1 - i)) & 1) as usize
}

/// Rotation automaton: state `j` reads the word starting at symbol `j`;
/// edge `k` reads symbol `(j + hat(k)) mod len`.
fn rotation_automaton(w: u32, len: usize, edges: usize, hat: impl Fn(usize) -> usize) -> Automaton {
    let mut a = Automaton::new(len, edges);
    for j in 0..len {
        a.initial.push((j, 1.0));
        a.accept[j] = 1.0;
        for k in 0..edges {
            a.add(k, j, word_bit(w, len, (j + hat(k)) % len), j, 1.0);
        }
    }
    a
}

/// Two-state automaton reading a path word forward (state 0) and reversed (state 1).
fn path_automaton(w: u32, len: usize, edges: usize, hat: impl Fn(usize) -> usize) -> Automaton {
    let mut a = Automaton::new(2, edges);
    a.initial = vec![(0, 1.0), (1, 1.0)];
    a.accept = vec![1.0, 1.0];
    for k in 0..edges {
        let i = hat(k);
        a.add(k, 0, word_bit(w, len, i), 0, 1.0);
        a.add(k, 1, word_bit(w, len, len - 1 - i), 1, 1.0);
    }
    a
}

/// `Σ` over labeled subgraphs `S ≅ H` with colorful vertex set of
/// `Π_{•} X_e Π_{◦} Y_e`, for a decorated cycle class `H` of length `ℓ`
/// and a coloring with palette `ℓ`.
pub fn dp_cycle_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: &Coloring,
) -> Result<f64> {
    check_tag(class, &[FamilyTag::H])?;
    let n = check_square_pair(x, y)?;
    let ell = class.canonical_word.len();
    check_coloring(coloring, n, ell)?;
    let g = WalkGraph::unipartite(x, y, &coloring.colors, ell);
    let a = rotation_automaton(class.bits(), ell, ell, |k| k);
    Ok(closed_walk_sum(&g, &a, 0, 0) / f64::from(class.aut))
}

/// Bipartite analogue of [`dp_cycle_sum`] for a class of `G(ℓ)`; the
/// coloring covers `[n] ⊔ [N]` with palette `2ℓ`.
pub fn dp_bipartite_cycle_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: &Coloring,
) -> Result<f64> {
    check_tag(class, &[FamilyTag::G])?;
    let (n, big_n) = check_rect_pair(x, y)?;
    let ell = class.canonical_word.len();
    check_coloring(coloring, n + big_n, 2 * ell)?;
    let g = WalkGraph::bipartite(x, y, &coloring.colors, 2 * ell);
    let w = class.bits();
    let from_a = rotation_automaton(w, ell, 2 * ell, |k| k / 2);
    let from_b = rotation_automaton(w, ell, 2 * ell, |k| k.div_ceil(2));
    let total = closed_walk_sum(&g, &from_a, 0, 0) + closed_walk_sum(&g, &from_b, 1, 0);
    Ok(total / f64::from(class.aut))
}

fn check_endpoint(u: usize, n: usize) -> Result<()> {
    if u >= n {
        return domain(format!("endpoint {u} out of range for n = {n}"));
    }
    Ok(())
}

/// Per-endpoint colorful path sums `v ↦ 𝔏_H(u, v)` for a path class of
/// `J(ℓ)` or `J★(ℓ)` and a coloring with palette `ℓ + 1`.
pub fn dp_path_row(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: &Coloring,
    u: usize,
) -> Result<Vec<f64>> {
    check_tag(class, &[FamilyTag::J, FamilyTag::Jstar])?;
    let n = check_square_pair(x, y)?;
    check_endpoint(u, n)?;
    let ell = class.canonical_word.len();
    check_coloring(coloring, n, ell + 1)?;
    let g = WalkGraph::unipartite(x, y, &coloring.colors, ell + 1);
    let a = path_automaton(class.bits(), ell, ell, |k| k);
    let mut row = open_walk_rows(&g, &a, 0, &coloring.colors, &[u])
        .pop()
        .unwrap_or_default();
    let aut = f64::from(class.aut);
    row.iter_mut().for_each(|v| *v /= aut);
    Ok(row)
}

/// Colorful sum over embeddings of a path class with leaf set `{u, v}`.
pub fn dp_path_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: &Coloring,
    u: usize,
    v: usize,
) -> Result<f64> {
    if u == v {
        return domain("path endpoints must differ");
    }
    check_endpoint(v, x.nrows())?;
    Ok(dp_path_row(x, y, class, coloring, u)?[v])
}

/// Per-endpoint colorful sums for a bipartite path class of `I(ℓ)` or
/// `I★(ℓ)` with both leaves in `[n]`; palette `2ℓ + 1` over `[n] ⊔ [N]`.
pub fn dp_bipartite_path_row(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: &Coloring,
    u: usize,
) -> Result<Vec<f64>> {
    check_tag(class, &[FamilyTag::I, FamilyTag::Istar])?;
    let (n, big_n) = check_rect_pair(x, y)?;
    check_endpoint(u, n)?;
    let ell = class.canonical_word.len();
    check_coloring(coloring, n + big_n, 2 * ell + 1)?;
    let g = WalkGraph::bipartite(x, y, &coloring.colors, 2 * ell + 1);
    let a = path_automaton(class.bits(), ell, 2 * ell, |k| k / 2);
    let mut row = open_walk_rows(&g, &a, 0, &coloring.colors[..n], &[u])
        .pop()
        .unwrap_or_default();
    let aut = f64::from(class.aut);
    row.iter_mut().for_each(|v| *v /= aut);
    Ok(row)
}

/// Bipartite analogue of [`dp_path_sum`] with endpoints in `[n]`.
pub fn dp_bipartite_path_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: &Coloring,
    u: usize,
    v: usize,
) -> Result<f64> {
    if u == v {
        return domain("path endpoints must differ");
    }
    check_endpoint(v, x.nrows())?;
    Ok(dp_bipartite_path_row(x, y, class, coloring, u)?[v])
}

/// Signal parameters attached to the aggregated kernels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Weights {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

impl Weights {
    fn of(&self, dec: usize) -> f64 {
        if dec == 0 {
            self.lambda
        } else {
            self.mu
        }
    }

    fn change(&self, a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            self.rho
        }
    }
}

/// State index for (first decoration, current decoration); state 0 is the start.
fn pair_state(first: usize, last: usize) -> usize {
    1 + 2 * first + last
}

/// Aggregated automaton for closed walks. Edge `k ≥ 1` begins a new
/// symbol iff `opens(k)`. With `closing_completes_first` the last edge
/// finishes the symbol begun by edge 0 and must share its decoration.
fn aggregated_cycle_automaton(
    w: Weights,
    edges: usize,
    opens: impl Fn(usize) -> bool,
    closing_completes_first: bool,
) -> Automaton {
    let mut a = Automaton::new(5, edges);
    a.initial.push((0, 1.0));
    for d in 0..2 {
        a.add(0, 0, d, pair_state(d, d), w.of(d));
    }
    for k in 1..edges {
        let last_edge = k + 1 == edges;
        for first in 0..2 {
            for cur in 0..2 {
                let q = pair_state(first, cur);
                a.accept[q] = 1.0;
                if last_edge && closing_completes_first {
                    a.add(k, q, first, pair_state(first, first), w.change(cur, first));
                } else if !opens(k) {
                    let close = if last_edge { w.change(cur, first) } else { 1.0 };
                    a.add(k, q, cur, q, close);
                } else {
                    for d in 0..2 {
                        let mut wt = w.of(d) * w.change(cur, d);
                        if last_edge {
                            wt *= w.change(d, first);
                        }
                        a.add(k, q, d, pair_state(first, d), wt);
                    }
                }
            }
        }
    }
    a
}

/// Aggregated automaton for open walks whose first and last symbols are `•`.
fn aggregated_path_automaton(
    w: Weights,
    edges: usize,
    opens: impl Fn(usize) -> bool,
    last_open: usize,
) -> Automaton {
    let mut a = Automaton::new(3, edges);
    a.initial.push((0, 1.0));
    a.add(0, 0, 0, 1, w.lambda);
    for k in 1..edges {
        for cur in 0..2 {
            let q = 1 + cur;
            a.accept[q] = 1.0;
            if !opens(k) {
                a.add(k, q, cur, q, 1.0);
            } else {
                let choices: &[usize] = if k == last_open { &[0] } else { &[0, 1] };
                for &d in choices {
                    a.add(k, q, d, 1 + d, w.of(d) * w.change(cur, d));
                }
            }
        }
    }
    a.accept[1] = 1.0;
    a.accept[2] = 1.0;
    a
}

/// `Σ_{[H] ∈ H(ℓ)} Ξ(H) 𝔉_H` for one coloring with palette `ℓ`.
pub fn weighted_cycle_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    w: Weights,
    ell: usize,
    coloring: &Coloring,
) -> Result<f64> {
    if ell < 3 {
        return domain("cycles need ell >= 3");
    }
    let n = check_square_pair(x, y)?;
    check_coloring(coloring, n, ell)?;
    let g = WalkGraph::unipartite(x, y, &coloring.colors, ell);
    let a = aggregated_cycle_automaton(w, ell, |_| true, false);
    Ok(closed_walk_sum(&g, &a, 0, 0) / 2.0)
}

/// `Σ_{[H] ∈ G(ℓ)} Υ(H) 𝔊_H` for one coloring with palette `2ℓ` over `[n] ⊔ [N]`.
pub fn weighted_bipartite_cycle_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    w: Weights,
    ell: usize,
    coloring: &Coloring,
) -> Result<f64> {
    if ell < 2 {
        return domain("bipartite cycles need ell >= 2");
    }
    let (n, big_n) = check_rect_pair(x, y)?;
    check_coloring(coloring, n + big_n, 2 * ell)?;
    let g = WalkGraph::bipartite(x, y, &coloring.colors, 2 * ell);
    let from_a = aggregated_cycle_automaton(w, 2 * ell, |k| k % 2 == 0, false);
    let from_b = aggregated_cycle_automaton(w, 2 * ell, |k| k % 2 == 1, true);
    let total = closed_walk_sum(&g, &from_a, 0, 0) + closed_walk_sum(&g, &from_b, 1, 0);
    Ok(total / 2.0)
}

fn check_sources(sources: &[usize], n: usize) -> Result<()> {
    sources.iter().try_for_each(|&u| check_endpoint(u, n))
}

/// Rows `v ↦ Σ_{[H] ∈ J(ℓ)} Ξ(H) 𝔏_H(u, v)` for each source `u`, palette `ℓ + 1`.
pub fn weighted_path_rows(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    w: Weights,
    ell: usize,
    coloring: &Coloring,
    sources: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if ell < 1 {
        return domain("paths need ell >= 1");
    }
    let n = check_square_pair(x, y)?;
    check_sources(sources, n)?;
    check_coloring(coloring, n, ell + 1)?;
    let g = WalkGraph::unipartite(x, y, &coloring.colors, ell + 1);
    let a = aggregated_path_automaton(w, ell, |_| true, ell - 1);
    Ok(open_walk_rows(&g, &a, 0, &coloring.colors, sources))
}

/// Rows `v ↦ Σ_{[H] ∈ I(ℓ)} Υ(H) ℜ_H(u, v)` for each source `u ∈ [n]`,
/// palette `2ℓ + 1` over `[n] ⊔ [N]`.
pub fn weighted_bipartite_path_rows(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    w: Weights,
    ell: usize,
    coloring: &Coloring,
    sources: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if ell < 1 {
        return domain("paths need ell >= 1");
    }
    let (n, big_n) = check_rect_pair(x, y)?;
    check_sources(sources, n)?;
    check_coloring(coloring, n + big_n, 2 * ell + 1)?;
    let g = WalkGraph::bipartite(x, y, &coloring.colors, 2 * ell + 1);
    let a = aggregated_path_automaton(w, 2 * ell, |k| k % 2 == 0, 2 * ell - 2);
    Ok(open_walk_rows(&g, &a, 0, &coloring.colors[..n], sources))
}

#[cfg(test)]
mod tests;
