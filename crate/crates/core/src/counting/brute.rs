//! Exhaustive oracle: enumerates injective vertex assignments realizing a
//! class and keeps each distinct decorated edge set once.

use std::collections::HashSet;

use ndarray::ArrayView2;

use super::Coloring;
use crate::error::{domain, Error, Result};
use crate::graphfam::{DecoratedClass, Decoration, FamilyTag, Side, Topology};

/// Largest number of vertex assignments the oracle enumerates.
pub const MAX_ASSIGNMENTS: f64 = 1e8;

struct Pattern {
    sides: Vec<Side>,
    /// `(p, q, decoration)` with `p` on side `A` for bipartite patterns.
    edges: Vec<(usize, usize, Decoration)>,
    leaves: Option<(usize, usize)>,
    bipartite: bool,
}

fn pattern(class: &DecoratedClass) -> Result<Pattern> {
    let word = &class.canonical_word.word;
    let len = word.len();
    let tag = class.family_tag;
    let (lo, hi) = tag.ell_bounds();
    let ell_ok = match tag {
        FamilyTag::Istarstar => len >= 1 && len <= 2 * hi,
        _ => len >= lo && len <= hi,
    };
    if !ell_ok {
        return domain(format!(
            "word length {len} outside the range of family {tag:?}"
        ));
    }
    let mut p = Pattern {
        sides: Vec::new(),
        edges: Vec::new(),
        leaves: None,
        bipartite: tag.is_bipartite(),
    };
    match (tag, class.canonical_word.topology) {
        (FamilyTag::H, Topology::Cycle) => {
            p.sides = vec![Side::A; len];
            p.edges = (0..len).map(|i| (i, (i + 1) % len, word[i])).collect();
        }
        (FamilyTag::J | FamilyTag::Jstar, Topology::Path) => {
            p.sides = vec![Side::A; len + 1];
            p.edges = (0..len).map(|i| (i, i + 1, word[i])).collect();
            p.leaves = Some((0, len));
        }
        (FamilyTag::G, Topology::Cycle) => {
            p.sides = (0..2 * len)
                .map(|v| if v % 2 == 0 { Side::A } else { Side::B })
                .collect();
            for (i, &d) in word.iter().enumerate() {
                p.edges.push((2 * i, 2 * i + 1, d));
                p.edges.push(((2 * i + 2) % (2 * len), 2 * i + 1, d));
            }
        }
        (FamilyTag::I | FamilyTag::Istar, Topology::Path) => {
            p.sides = (0..=2 * len)
                .map(|v| if v % 2 == 0 { Side::A } else { Side::B })
                .collect();
            for (i, &d) in word.iter().enumerate() {
                p.edges.push((2 * i, 2 * i + 1, d));
                p.edges.push((2 * i + 2, 2 * i + 1, d));
            }
            p.leaves = Some((0, 2 * len));
        }
        (FamilyTag::Istarstar, Topology::Path) => {
            let start = class.start_side.unwrap_or(Side::A);
            p.sides = (0..=len)
                .map(|v| match (start, v % 2) {
                    (s, 0) => s,
                    (Side::A, _) => Side::B,
                    (Side::B, _) => Side::A,
                })
                .collect();
            for (i, &d) in word.iter().enumerate() {
                let (a, b) = if p.sides[i] == Side::A {
                    (i, i + 1)
                } else {
                    (i + 1, i)
                };
                p.edges.push((a, b, d));
            }
            p.leaves = Some((0, len));
        }
        _ => return domain("class topology does not match its family"),
    }
    Ok(p)
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| n.saturating_sub(i) as f64).product()
}

/// Exhaustive colorful sum over subgraphs `S ≅ class`.
///
/// Each distinct decorated edge set contributes `Π_{•} X_e Π_{◦} Y_e` once.
/// With a coloring only colorful vertex sets count; with endpoints `(u, v)`
/// only path embeddings whose leaf set is `{u, v}` count (indices in `[n]`).
/// Bipartite classes read `n x N` matrices and a coloring over `[n] ⊔ [N]`.
pub fn brute_force_sum(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    class: &DecoratedClass,
    coloring: Option<&Coloring>,
    endpoints: Option<(usize, usize)>,
) -> Result<f64> {
    let p = pattern(class)?;
    if x.dim() != y.dim() {
        return Err(Error::Dimension("matrices must have equal shape".into()));
    }
    let (n, big_n) = x.dim();
    if !p.bipartite && n != big_n {
        return Err(Error::Dimension(
            "unipartite classes need square matrices".into(),
        ));
    }
    let host_len = |s: Side| {
        if s == Side::A || !p.bipartite {
            n
        } else {
            big_n
        }
    };
    let offset = |s: Side| if s == Side::B && p.bipartite { n } else { 0 };
    if let Some(c) = coloring {
        let expected = if p.bipartite { n + big_n } else { n };
        if c.len() != expected {
            return Err(Error::Dimension(
                "coloring length does not match the host".into(),
            ));
        }
    }
    if endpoints.is_some() && p.leaves.is_none() {
        return domain("endpoints require a path class");
    }
    let count_a = p
        .sides
        .iter()
        .filter(|s| **s == Side::A || !p.bipartite)
        .count();
    let count_b = p.sides.len() - count_a;
    let work = falling(n, count_a) * falling(host_len(Side::B), count_b);
    if work > MAX_ASSIGNMENTS {
        return Err(Error::TooLarge(format!("{work:.3e} vertex assignments")));
    }

    let mut seen: HashSet<Vec<(usize, usize, Decoration)>> = HashSet::new();
    let mut total = 0.0;
    let mut assign: Vec<usize> = Vec::with_capacity(p.sides.len());
    let mut used: HashSet<(usize, usize)> = HashSet::new();

    fn recurse(
        depth: usize,
        ctx: &mut dyn FnMut(&[usize]),
        p: &Pattern,
        host_len: &dyn Fn(Side) -> usize,
        offset: &dyn Fn(Side) -> usize,
        assign: &mut Vec<usize>,
        used: &mut HashSet<(usize, usize)>,
    ) {
        if depth == p.sides.len() {
            ctx(assign);
            return;
        }
        let side = p.sides[depth];
        for h in 0..host_len(side) {
            let key = (offset(side), h);
            if used.contains(&key) {
                continue;
            }
            used.insert(key);
            assign.push(h);
            recurse(depth + 1, ctx, p, host_len, offset, assign, used);
            assign.pop();
            used.remove(&key);
        }
    }

    let mut visit = |a: &[usize]| {
        if let Some(c) = coloring {
            let mut mask = 0u64;
            for (v, &h) in a.iter().enumerate() {
                let bit = 1u64 << c.colors[offset(p.sides[v]) + h];
                if mask & bit != 0 {
                    return;
                }
                mask |= bit;
            }
        }
        if let (Some((u, w)), Some((l0, l1))) = (endpoints, p.leaves) {
            let (a0, a1) = (a[l0], a[l1]);
            if !((a0 == u && a1 == w) || (a0 == w && a1 == u)) {
                return;
            }
        }
        let mut key: Vec<(usize, usize, Decoration)> = p
            .edges
            .iter()
            .map(|&(s, t, d)| {
                let (gs, gt) = (offset(p.sides[s]) + a[s], offset(p.sides[t]) + a[t]);
                (gs.min(gt), gs.max(gt), d)
            })
            .collect();
        key.sort_unstable();
        if !seen.insert(key) {
            return;
        }
        let mut prod = 1.0;
        for &(s, t, d) in &p.edges {
            let m = if d == Decoration::Bullet { &x } else { &y };
            prod *= m[[a[s], a[t]]];
        }
        total += prod;
    };
    recurse(
        0,
        &mut visit,
        &p,
        &host_len,
        &offset,
        &mut assign,
        &mut used,
    );
    Ok(total)
}
