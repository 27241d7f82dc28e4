//! Layered colorful-walk dynamic program.
//!
//! A walk of `L` edges is driven by a small weighted automaton whose arcs
//! choose the decoration (matrix) of the next edge. The state of the dynamic
//! program after `k` steps is indexed by the set of colors used so far and
//! the color of the current endpoint; for each such pair a dense table holds
//! one row per (automaton state, walk source) and one column per vertex of
//! that color. Vertices are permuted so that each color class is a
//! contiguous block, which turns every transition into a dense block product
//! `table · E_d[block(c), block(c')]`.
//!
//! Closed walks start from every vertex of one anchor color and the final
//! step closes the walk back onto its own source. Open walks start from a
//! chosen set of sources and report per-endpoint sums.

use std::collections::BTreeMap;
use std::ops::Range;

use ndarray::{s, Array2, ArrayView2};

/// One transition of the automaton driving the walk.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Arc {
    /// Index of the matrix read by the edge (0 = `X`, 1 = `Y`).
    pub dec: usize,
    pub to: usize,
    pub weight: f64,
}

/// Weighted automaton over decorations with per-step transition lists.
#[derive(Clone, Debug)]
pub(crate) struct Automaton {
    pub n_states: usize,
    pub initial: Vec<(usize, f64)>,
    /// `steps[k][q]` lists the arcs usable by edge `k` from state `q`.
    pub steps: Vec<Vec<Vec<Arc>>>,
    pub accept: Vec<f64>,
}

impl Automaton {
    pub fn new(n_states: usize, len: usize) -> Self {
        Automaton {
            n_states,
            initial: Vec::new(),
            steps: vec![vec![Vec::new(); n_states]; len],
            accept: vec![0.0; n_states],
        }
    }

    pub fn add(&mut self, k: usize, from: usize, dec: usize, to: usize, weight: f64) {
        if weight != 0.0 {
            self.steps[k][from].push(Arc { dec, to, weight });
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }
}

/// Vertices of one side sorted by color, with contiguous color blocks.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    /// Sorted position → original vertex index.
    pub order: Vec<usize>,
    /// Original vertex index → sorted position.
    pub position: Vec<usize>,
    offsets: Vec<usize>,
}

impl Partition {
    pub fn new(colors: &[u8], palette: usize) -> Self {
        let mut order: Vec<usize> = (0..colors.len()).collect();
        order.sort_by_key(|&v| colors[v]);
        let mut position = vec![0; colors.len()];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        let mut offsets = vec![0; palette + 1];
        for &c in colors {
            offsets[c as usize + 1] += 1;
        }
        for c in 0..palette {
            offsets[c + 1] += offsets[c];
        }
        Partition {
            order,
            position,
            offsets,
        }
    }

    pub fn block(&self, c: usize) -> Range<usize> {
        self.offsets[c]..self.offsets[c + 1]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }
}

/// Host graph with color-sorted vertex sides and one dense matrix per
/// (side, decoration), mapping the side to the following side of a walk.
pub(crate) struct WalkGraph {
    parts: Vec<Partition>,
    mats: Vec<[Array2<f64>; 2]>,
    palette: usize,
}

fn permuted(m: ArrayView2<f64>, rows: &[usize], cols: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| m[[rows[i], cols[j]]])
}

impl WalkGraph {
    /// Single vertex set with symmetric matrices `x`, `y`.
    pub fn unipartite(
        x: ArrayView2<f64>,
        y: ArrayView2<f64>,
        colors: &[u8],
        palette: usize,
    ) -> Self {
        let p = Partition::new(colors, palette);
        let mats = [
            permuted(x, &p.order, &p.order),
            permuted(y, &p.order, &p.order),
        ];
        WalkGraph {
            parts: vec![p],
            mats: vec![mats],
            palette,
        }
    }

    /// Sides `[n]` and `[N]` with `n x N` matrices; `colors` covers `[n] ⊔ [N]`.
    pub fn bipartite(
        x: ArrayView2<f64>,
        y: ArrayView2<f64>,
        colors: &[u8],
        palette: usize,
    ) -> Self {
        let n = x.nrows();
        let pa = Partition::new(&colors[..n], palette);
        let pb = Partition::new(&colors[n..], palette);
        let ab = [
            permuted(x, &pa.order, &pb.order),
            permuted(y, &pa.order, &pb.order),
        ];
        let ba = [
            ab[0].t().as_standard_layout().into_owned(),
            ab[1].t().as_standard_layout().into_owned(),
        ];
        WalkGraph {
            parts: vec![pa, pb],
            mats: vec![ab, ba],
            palette,
        }
    }

    fn next_side(&self, side: usize) -> usize {
        if self.parts.len() == 1 {
            0
        } else {
            1 - side
        }
    }
}

struct Table {
    data: Array2<f64>,
    active: Vec<bool>,
}

type Layer = BTreeMap<(u32, u8), Table>;

struct Walk<'a> {
    g: &'a WalkGraph,
    a: &'a Automaton,
    rows: usize,
}

impl Walk<'_> {
    fn initial_layer(&self, side: usize, color: usize, sources: &[usize]) -> Layer {
        let blk = self.g.parts[side].block(color);
        let q = self.a.n_states;
        let mut data = Array2::zeros((q * self.rows, blk.len()));
        let mut active = vec![false; q];
        for (i, &pos) in sources.iter().enumerate() {
            for &(state, w) in &self.a.initial {
                data[[state * self.rows + i, pos - blk.start]] += w;
                active[state] = true;
            }
        }
        let mut layer = Layer::new();
        layer.insert((1u32 << color, color as u8), Table { data, active });
        layer
    }

    fn step(&self, layer: &Layer, k: usize, side: usize) -> Layer {
        let g = self.g;
        let rows = self.rows;
        let q_total = self.a.n_states;
        let next = g.next_side(side);
        let mut out = Layer::new();
        for (&(mask, c), tab) in layer {
            let rb = g.parts[side].block(c as usize);
            for dec in 0..2 {
                let mut targets: Vec<usize> = Vec::new();
                for (q, arcs) in self.a.steps[k].iter().enumerate() {
                    if tab.active[q] {
                        targets.extend(arcs.iter().filter(|a| a.dec == dec).map(|a| a.to));
                    }
                }
                if targets.is_empty() {
                    continue;
                }
                targets.sort_unstable();
                targets.dedup();
                let mut stacked = Array2::<f64>::zeros((targets.len() * rows, rb.len()));
                for (q, arcs) in self.a.steps[k].iter().enumerate() {
                    if !tab.active[q] {
                        continue;
                    }
                    let src = tab.data.slice(s![q * rows..(q + 1) * rows, ..]);
                    for arc in arcs.iter().filter(|a| a.dec == dec) {
                        let ti = targets.binary_search(&arc.to).expect("target present");
                        stacked
                            .slice_mut(s![ti * rows..(ti + 1) * rows, ..])
                            .scaled_add(arc.weight, &src);
                    }
                }
                for c2 in 0..g.palette {
                    if mask & (1u32 << c2) != 0 {
                        continue;
                    }
                    let cb = g.parts[next].block(c2);
                    if cb.is_empty() {
                        continue;
                    }
                    let e = g.mats[side][dec].slice(s![rb.clone(), cb.clone()]);
                    let prod = stacked.dot(&e);
                    let entry = out
                        .entry((mask | (1u32 << c2), c2 as u8))
                        .or_insert_with(|| Table {
                            data: Array2::zeros((q_total * rows, cb.len())),
                            active: vec![false; q_total],
                        });
                    for (ti, &t) in targets.iter().enumerate() {
                        entry
                            .data
                            .slice_mut(s![t * rows..(t + 1) * rows, ..])
                            .scaled_add(1.0, &prod.slice(s![ti * rows..(ti + 1) * rows, ..]));
                        entry.active[t] = true;
                    }
                }
            }
        }
        out
    }
}

fn side_after(g: &WalkGraph, start: usize, steps: usize) -> usize {
    (0..steps).fold(start, |s, _| g.next_side(s))
}

/// Weighted sum of closed colorful walks whose first vertex carries
/// `anchor` color, summed over every such first vertex on `start_side`.
pub(crate) fn closed_walk_sum(
    g: &WalkGraph,
    a: &Automaton,
    start_side: usize,
    anchor: usize,
) -> f64 {
    let len = a.len();
    let blk0 = g.parts[start_side].block(anchor);
    if blk0.is_empty() || len < 2 {
        return 0.0;
    }
    let sources: Vec<usize> = blk0.clone().collect();
    let walk = Walk {
        g,
        a,
        rows: sources.len(),
    };
    let mut layer = walk.initial_layer(start_side, anchor, &sources);
    let mut side = start_side;
    for k in 0..len - 1 {
        layer = walk.step(&layer, k, side);
        side = g.next_side(side);
    }
    debug_assert_eq!(g.next_side(side), start_side);
    let rows = walk.rows;
    let mut total = 0.0;
    for (&(_, c), tab) in &layer {
        let rb = g.parts[side].block(c as usize);
        for (q, arcs) in a.steps[len - 1].iter().enumerate() {
            if !tab.active[q] {
                continue;
            }
            let t = tab.data.slice(s![q * rows..(q + 1) * rows, ..]);
            for arc in arcs {
                let acc = a.accept[arc.to];
                if acc == 0.0 {
                    continue;
                }
                let e = g.mats[side][arc.dec].slice(s![rb.clone(), blk0.clone()]);
                let s: f64 = t.iter().zip(e.t().iter()).map(|(x, y)| x * y).sum();
                total += arc.weight * acc * s;
            }
        }
    }
    total
}

/// Weighted sums of open colorful walks from each source (original index on
/// `start_side`) to every endpoint. Returns one row per source, indexed by
/// original vertex of the end side.
pub(crate) fn open_walk_rows(
    g: &WalkGraph,
    a: &Automaton,
    start_side: usize,
    colors: &[u8],
    sources: &[usize],
) -> Vec<Vec<f64>> {
    let end_side = side_after(g, start_side, a.len());
    let end_len = g.parts[end_side].len();
    let mut rows_out = vec![vec![0.0; end_len]; sources.len()];
    let part = &g.parts[start_side];
    for color in 0..g.palette {
        let members: Vec<usize> = (0..sources.len())
            .filter(|&i| colors[sources[i]] as usize == color)
            .collect();
        if members.is_empty() {
            continue;
        }
        let positions: Vec<usize> = members.iter().map(|&i| part.position[sources[i]]).collect();
        let walk = Walk {
            g,
            a,
            rows: positions.len(),
        };
        let mut layer = walk.initial_layer(start_side, color, &positions);
        let mut side = start_side;
        for k in 0..a.len() {
            layer = walk.step(&layer, k, side);
            side = g.next_side(side);
        }
        let rows = walk.rows;
        for (&(_, c), tab) in &layer {
            let cb = g.parts[side].block(c as usize);
            for q in 0..a.n_states {
                let acc = a.accept[q];
                if !tab.active[q] || acc == 0.0 {
                    continue;
                }
                for (i, &m) in members.iter().enumerate() {
                    let r = tab.data.row(q * rows + i);
                    for (j, val) in r.iter().enumerate() {
                        rows_out[m][g.parts[side].order[cb.start + j]] += acc * val;
                    }
                }
            }
        }
    }
    rows_out
}
