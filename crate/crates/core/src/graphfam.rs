//! Decorated cycle and path families, their weights, normalizers and the
//! threshold calculus built on them.
//!
//! Words are stored as `u32` bit strings of length `ℓ`, first edge in the
//! most significant position, with `•` encoded as 0 and `◦` as 1. Integer
//! order therefore equals lexicographic order with `•` before `◦`.
//!
//! Bipartite families (`G`, `I`, `Istar`) are stored through their hat word:
//! hat `i` is the pair of equally decorated edges `(a_i, b_i), (b_i, a_{i+1})`.
//! Their edge counts refer to the bipartite graph, so `e_bullet + e_circ = 2ℓ`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::baselines::{cca_condition, pls_threshold};
use crate::error::{domain, Result};

/// Mark telling which observation contributes an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decoration {
    /// Entry read from `X`.
    Bullet,
    /// Entry read from `Y`.
    Circle,
}

impl Decoration {
    pub fn from_bit(bit: u32) -> Self {
        if bit & 1 == 0 {
            Decoration::Bullet
        } else {
            Decoration::Circle
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Decoration::Bullet => 0,
            Decoration::Circle => 1,
        }
    }

    pub fn index(self) -> usize {
        self.bit() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Topology {
    Cycle,
    Path,
}

/// A sequence of edge (or hat) decorations in traversal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecorationWord {
    pub word: Vec<Decoration>,
    pub topology: Topology,
}

impl DecorationWord {
    pub fn from_bits(bits: u32, len: usize, topology: Topology) -> Self {
        let word = (0..len)
            .map(|k| Decoration::from_bit(bits >> (len - 1 - k)))
            .collect();
        DecorationWord { word, topology }
    }

    pub fn bits(&self) -> u32 {
        self.word.iter().fold(0, |acc, d| (acc << 1) | d.bit())
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Parses a string over `{b, c}` (`b` = `•`, `c` = `◦`).
    pub fn parse(s: &str, topology: Topology) -> Result<Self> {
        let word = s
            .chars()
            .map(|ch| match ch {
                'b' | '•' => Ok(Decoration::Bullet),
                'c' | '◦' => Ok(Decoration::Circle),
                other => domain(format!("invalid decoration symbol {other:?}")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DecorationWord { word, topology })
    }
}

impl fmt::Display for DecorationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.word {
            f.write_str(match d {
                Decoration::Bullet => "b",
                Decoration::Circle => "c",
            })?;
        }
        Ok(())
    }
}

impl Serialize for DecorationWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyTag {
    /// Decorated cycles of length ℓ.
    H,
    /// Bipartite cycles of length 2ℓ whose decoration changes lie on the `[n]` side.
    G,
    /// Decorated paths of length ℓ with both end edges `•`.
    J,
    /// All decorated paths of length ℓ.
    Jstar,
    /// Bipartite paths of length 2ℓ with leaves on the `[n]` side and both end edges `•`.
    I,
    /// Bipartite paths of length 2ℓ with leaves on the `[n]` side.
    Istar,
    /// Bipartite paths of length 2ℓ−1 or 2ℓ whose decoration changes lie on the `[n]` side.
    Istarstar,
}

impl FamilyTag {
    pub fn is_bipartite(self) -> bool {
        matches!(
            self,
            FamilyTag::G | FamilyTag::I | FamilyTag::Istar | FamilyTag::Istarstar
        )
    }

    pub fn is_cycle(self) -> bool {
        matches!(self, FamilyTag::H | FamilyTag::G)
    }

    /// Inclusive range of supported ℓ.
    pub fn ell_bounds(self) -> (usize, usize) {
        match self {
            FamilyTag::H => (3, 20),
            FamilyTag::G => (2, 20),
            FamilyTag::J | FamilyTag::Jstar | FamilyTag::I | FamilyTag::Istar => (1, 20),
            FamilyTag::Istarstar => (1, 10),
        }
    }
}

/// Side of a bipartite vertex: `A` indexes `[n]`, `B` indexes `[N]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

/// One isomorphism class of a decorated family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DecoratedClass {
    /// Lexicographically minimal word over the symmetry group. Hat word for
    /// `G`, `I`, `Istar`; edge word for the other tags.
    pub canonical_word: DecorationWord,
    pub aut: u32,
    pub e_bullet: u32,
    pub e_circ: u32,
    pub diff: u32,
    pub family_tag: FamilyTag,
    /// Side of the first vertex of `canonical_word` (`Istarstar` only).
    pub start_side: Option<Side>,
}

impl DecoratedClass {
    /// Number of edges of the underlying graph.
    pub fn edge_count(&self) -> u32 {
        self.e_bullet + self.e_circ
    }

    pub fn bits(&self) -> u32 {
        self.canonical_word.bits()
    }
}

/// Family enumeration, optionally with weights for a fixed `(λ, μ, ρ)`.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyTable {
    pub ell: usize,
    pub tag: FamilyTag,
    pub classes: Vec<DecoratedClass>,
    pub beta: Option<f64>,
    pub weights: Vec<f64>,
}

impl FamilyTable {
    /// Fills per-class weights and `β` for the given signal parameters.
    pub fn weighted(mut self, lambda: f64, mu: f64, rho: f64) -> Self {
        self.weights = self
            .classes
            .iter()
            .map(|c| class_weight(c, lambda, mu, rho))
            .collect();
        self.beta = Some(
            self.classes
                .iter()
                .zip(&self.weights)
                .map(|(c, w)| w * w / f64::from(c.aut))
                .sum(),
        );
        self
    }

    /// Debug export: one record per class with its word as a string over `{b, c}`.
    pub fn export(&self) -> FamilyExport {
        FamilyExport {
            ell: self.ell,
            tag: self.tag,
            beta: self.beta,
            classes: self
                .classes
                .iter()
                .enumerate()
                .map(|(i, c)| ClassExport {
                    canonical_word: c.canonical_word.to_string(),
                    aut: c.aut,
                    diff: c.diff,
                    weight: self.weights.get(i).copied(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyExport {
    pub ell: usize,
    pub tag: FamilyTag,
    pub beta: Option<f64>,
    pub classes: Vec<ClassExport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassExport {
    pub canonical_word: String,
    pub aut: u32,
    pub diff: u32,
    pub weight: Option<f64>,
}

pub(crate) fn mask(len: usize) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

/// Cyclic rotation moving the first `k` symbols to the end.
pub(crate) fn rotl(w: u32, k: usize, len: usize) -> u32 {
    let k = k % len;
    if k == 0 {
        w
    } else {
        ((w << k) | (w >> (len - k))) & mask(len)
    }
}

pub(crate) fn reverse(w: u32, len: usize) -> u32 {
    w.reverse_bits() >> (32 - len)
}

/// Images of `w` under every element of the dihedral group, one per element.
fn dihedral_images(w: u32, len: usize) -> impl Iterator<Item = u32> {
    let r = reverse(w, len);
    (0..len).flat_map(move |k| [rotl(w, k, len), rotl(r, k, len)])
}

fn cycle_canonical(w: u32, len: usize) -> u32 {
    dihedral_images(w, len).min().unwrap_or(w)
}

fn cycle_aut(w: u32, len: usize) -> u32 {
    dihedral_images(w, len).filter(|&v| v == w).count() as u32
}

fn path_aut(w: u32, len: usize) -> u32 {
    if reverse(w, len) == w {
        2
    } else {
        1
    }
}

pub(crate) fn cycle_diff(w: u32, len: usize) -> u32 {
    (w ^ rotl(w, 1, len)).count_ones()
}

pub(crate) fn path_diff(w: u32, len: usize) -> u32 {
    if len < 2 {
        0
    } else {
        ((w ^ (w >> 1)) & mask(len - 1)).count_ones()
    }
}

fn first_bit(w: u32, len: usize) -> u32 {
    (w >> (len - 1)) & 1
}

fn check_ell(tag: FamilyTag, ell: usize) -> Result<()> {
    let (lo, hi) = tag.ell_bounds();
    if ell < lo || ell > hi {
        return domain(format!(
            "ell = {ell} outside [{lo}, {hi}] for family {tag:?}"
        ));
    }
    Ok(())
}

/// Enumerates the isomorphism classes of a family.
pub fn enumerate_family(tag: FamilyTag, ell: usize) -> Result<FamilyTable> {
    check_ell(tag, ell)?;
    let mut classes = Vec::new();
    let words = 0..(1u32 << ell);
    let class = |word: DecorationWord, aut, e_circ: u32, scale: u32, diff| DecoratedClass {
        e_bullet: scale * (ell as u32 - e_circ),
        e_circ: scale * e_circ,
        canonical_word: word,
        aut,
        diff,
        family_tag: tag,
        start_side: None,
    };
    match tag {
        FamilyTag::H | FamilyTag::G => {
            let scale = if tag == FamilyTag::G { 2 } else { 1 };
            for w in words.filter(|&w| cycle_canonical(w, ell) == w) {
                classes.push(class(
                    DecorationWord::from_bits(w, ell, Topology::Cycle),
                    cycle_aut(w, ell),
                    w.count_ones(),
                    scale,
                    cycle_diff(w, ell),
                ));
            }
        }
        FamilyTag::J | FamilyTag::Jstar | FamilyTag::I | FamilyTag::Istar => {
            let scale = if tag.is_bipartite() { 2 } else { 1 };
            let pinned = matches!(tag, FamilyTag::J | FamilyTag::I);
            for w in words.filter(|&w| w <= reverse(w, ell)) {
                if pinned && (w & 1 == 1 || first_bit(w, ell) == 1) {
                    continue;
                }
                classes.push(class(
                    DecorationWord::from_bits(w, ell, Topology::Path),
                    path_aut(w, ell),
                    w.count_ones(),
                    scale,
                    path_diff(w, ell),
                ));
            }
        }
        FamilyTag::Istarstar => classes = enumerate_istarstar(ell),
    }
    Ok(FamilyTable {
        ell,
        tag,
        classes,
        beta: None,
        weights: Vec::new(),
    })
}

/// Side of vertex `k` along a bipartite path starting on `start`.
fn side_at(start: Side, k: usize) -> Side {
    match (start, k % 2) {
        (s, 0) => s,
        (Side::A, _) => Side::B,
        (Side::B, _) => Side::A,
    }
}

fn enumerate_istarstar(ell: usize) -> Vec<DecoratedClass> {
    let mut out = Vec::new();
    let shapes = [
        (Side::A, 2 * ell - 1),
        (Side::A, 2 * ell),
        (Side::B, 2 * ell),
    ];
    for (start, len) in shapes {
        for w in 0..(1u32 << len) {
            let bit = |k: usize| (w >> (len - 1 - k)) & 1;
            let mut diff = 0;
            let mut admissible = true;
            for k in 1..len {
                if bit(k - 1) != bit(k) {
                    match side_at(start, k) {
                        Side::A => diff += 1,
                        Side::B => admissible = false,
                    }
                }
            }
            if !admissible {
                continue;
            }
            let aut = if len % 2 == 1 {
                1
            } else {
                if reverse(w, len) < w {
                    continue;
                }
                path_aut(w, len)
            };
            let e_circ = w.count_ones();
            out.push(DecoratedClass {
                canonical_word: DecorationWord::from_bits(w, len, Topology::Path),
                aut,
                e_bullet: len as u32 - e_circ,
                e_circ,
                diff,
                family_tag: FamilyTag::Istarstar,
                start_side: Some(start),
            });
        }
    }
    out
}

/// `|Aut|` of the class: the stabilizer of its word in the symmetry group.
pub fn aut_count(class: &DecoratedClass) -> u32 {
    let w = class.bits();
    let len = class.canonical_word.len();
    match class.canonical_word.topology {
        Topology::Cycle => cycle_aut(w, len),
        Topology::Path => {
            if class.start_side.is_some() && len % 2 == 1 {
                1
            } else {
                path_aut(w, len)
            }
        }
    }
}

fn pow0(base: f64, exp: u32) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

fn pow0_half(base: f64, exp: u32) -> f64 {
    if exp == 0 {
        1.0
    } else if exp.is_multiple_of(2) {
        base.powi((exp / 2) as i32)
    } else {
        base.powf(f64::from(exp) / 2.0)
    }
}

/// `λ^{|E•|} μ^{|E◦|} ρ^{|diff|}`.
pub fn xi_weight(class: &DecoratedClass, lambda: f64, mu: f64, rho: f64) -> f64 {
    pow0(lambda, class.e_bullet) * pow0(mu, class.e_circ) * pow0(rho, class.diff)
}

/// `λ^{|E•|/2} μ^{|E◦|/2} ρ^{|diff|}`.
pub fn upsilon_weight(class: &DecoratedClass, lambda: f64, mu: f64, rho: f64) -> f64 {
    pow0_half(lambda, class.e_bullet) * pow0_half(mu, class.e_circ) * pow0(rho, class.diff)
}

/// The weight the statistics attach to a class: `Υ` for bipartite families, `Ξ` otherwise.
pub fn class_weight(class: &DecoratedClass, lambda: f64, mu: f64, rho: f64) -> f64 {
    if class.family_tag.is_bipartite() {
        upsilon_weight(class, lambda, mu, rho)
    } else {
        xi_weight(class, lambda, mu, rho)
    }
}

/// Exact class sum `Σ weight² / |Aut|` by enumeration.
pub fn beta(tag: FamilyTag, ell: usize, lambda: f64, mu: f64, rho: f64) -> Result<f64> {
    Ok(enumerate_family(tag, ell)?
        .weighted(lambda, mu, rho)
        .beta
        .unwrap_or(0.0))
}

/// 2x2 transfer matrix `[[λ², λ²ρ²], [μ²ρ², μ²]]` and its eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferMatrix {
    pub m: [[f64; 2]; 2],
    pub a_plus: f64,
    pub a_minus: f64,
}

pub fn transfer_matrix(lambda: f64, mu: f64, rho: f64) -> TransferMatrix {
    let (l2, m2, r2) = (lambda * lambda, mu * mu, rho * rho);
    let disc = (l2 - m2).powi(2) + 4.0 * r2 * r2 * l2 * m2;
    let a_plus = (l2 + m2 + disc.sqrt()) / 2.0;
    let det = l2 * m2 * (1.0 - r2 * r2);
    let a_minus = if a_plus > 0.0 {
        (det / a_plus).max(0.0)
    } else {
        0.0
    };
    TransferMatrix {
        m: [[l2, l2 * r2], [m2 * r2, m2]],
        a_plus,
        a_minus,
    }
}

/// Top eigenvalue of the transfer matrix.
pub fn a_plus(lambda: f64, mu: f64, rho: f64) -> f64 {
    transfer_matrix(lambda, mu, rho).a_plus
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn mat_pow(m: [[f64; 2]; 2], k: usize) -> [[f64; 2]; 2] {
    (0..k).fold([[1.0, 0.0], [0.0, 1.0]], |acc, _| mat_mul(acc, m))
}

/// Closed forms `β_H = (A₊^ℓ + A₋^ℓ)/(2ℓ)` and `β_J = λ²(M^{ℓ−1})₁₁/2`
/// (equal to `β_G` and `β_I` respectively). `None` for other tags.
pub fn beta_closed_form(tag: FamilyTag, ell: usize, lambda: f64, mu: f64, rho: f64) -> Option<f64> {
    let t = transfer_matrix(lambda, mu, rho);
    match tag {
        FamilyTag::H | FamilyTag::G => {
            Some((t.a_plus.powi(ell as i32) + t.a_minus.powi(ell as i32)) / (2.0 * ell as f64))
        }
        FamilyTag::J | FamilyTag::I => {
            Some(lambda * lambda * mat_pow(t.m, ell.saturating_sub(1))[0][0] / 2.0)
        }
        _ => None,
    }
}

/// The 27-point `(λ, μ, ρ)` grid on which the closed forms are checked.
pub fn identity_grid() -> Vec<(f64, f64, f64)> {
    let ls = [0.3, 0.9, 1.4];
    let rs = [0.0, 0.6, 1.0];
    let mut g = Vec::with_capacity(27);
    for &l in &ls {
        for &m in &ls {
            for &r in &rs {
                g.push((l, m, r));
            }
        }
    }
    g
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Whether the closed forms agree with enumeration to relative `1e-9` on the
/// identity grid for ℓ in 3..=12 (computed once per process).
pub fn closed_forms_verified() -> bool {
    static VERIFIED: OnceLock<bool> = OnceLock::new();
    *VERIFIED.get_or_init(|| {
        (3..=12).all(|ell| {
            let h = enumerate_family(FamilyTag::H, ell);
            let j = enumerate_family(FamilyTag::J, ell);
            let (Ok(h), Ok(j)) = (h, j) else { return false };
            identity_grid().into_iter().all(|(l, m, r)| {
                let bh = h.clone().weighted(l, m, r).beta.unwrap_or(f64::NAN);
                let bj = j.clone().weighted(l, m, r).beta.unwrap_or(f64::NAN);
                let ch = beta_closed_form(FamilyTag::H, ell, l, m, r).unwrap_or(f64::NAN);
                let cj = beta_closed_form(FamilyTag::J, ell, l, m, r).unwrap_or(f64::NAN);
                rel_close(bh, ch, 1e-9) && rel_close(bj, cj, 1e-9)
            })
        })
    })
}

/// `β` through the closed form when it has been verified, by enumeration otherwise.
pub fn beta_fast(tag: FamilyTag, ell: usize, lambda: f64, mu: f64, rho: f64) -> Result<f64> {
    check_ell(tag, ell)?;
    if closed_forms_verified() {
        if let Some(b) = beta_closed_form(tag, ell, lambda, mu, rho) {
            return Ok(b);
        }
    }
    beta(tag, ell, lambda, mu, rho)
}

/// `F(λ, μ, ρ, γ)`; a term with a nonpositive denominator counts as `+∞`.
pub fn f_threshold(lambda: f64, mu: f64, rho: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return domain(format!("gamma = {gamma} must be positive"));
    }
    let (l2, m2, r2) = (lambda * lambda, mu * mu, rho * rho);
    let den_l = gamma - l2 + l2 * r2;
    let den_m = gamma - m2 + m2 * r2;
    let third = if den_l <= 0.0 || den_m <= 0.0 {
        f64::INFINITY
    } else {
        l2 * r2 / den_l + m2 * r2 / den_m
    };
    Ok((l2 / gamma).max(m2 / gamma).max(third))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Subgraph,
    Pls,
    Cca,
}

fn method_succeeds(method: Method, lambda: f64, mu: f64, rho: f64, gamma: f64) -> bool {
    match method {
        Method::Subgraph => f_threshold(lambda, mu, rho, gamma).is_ok_and(|f| f > 1.0),
        Method::Pls => pls_threshold(lambda, mu, rho) <= gamma,
        Method::Cca => cca_condition(lambda, mu, rho, gamma),
    }
}

/// Upper end of the μ search range.
pub const MU_MAX: f64 = 10.0;

/// Smallest `μ ≥ 0` for which `method` succeeds, to absolute tolerance `1e-6`
/// (`+∞` if no `μ` in `[0, MU_MAX]` succeeds).
pub fn critical_mu(lambda: f64, rho: f64, gamma: f64, method: Method) -> f64 {
    let ok = |mu: f64| method_succeeds(method, lambda, mu, rho, gamma);
    if ok(0.0) {
        return 0.0;
    }
    let steps = 1000;
    let mut prev = 0.0;
    for k in 1..=steps {
        let mu = MU_MAX * k as f64 / steps as f64;
        if ok(mu) {
            let (mut lo, mut hi) = (prev, mu);
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return hi;
        }
        prev = mu;
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(table: &FamilyTable) -> Vec<String> {
        table
            .classes
            .iter()
            .map(|c| c.canonical_word.to_string())
            .collect()
    }

    /// Burnside count of binary bracelets of length `n`.
    fn bracelets(n: u64) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        let rot: u64 = (0..n).map(|k| 1u64 << gcd(k, n)).sum();
        let refl = if n % 2 == 1 {
            n * (1 << n.div_ceil(2))
        } else {
            (n / 2) * (1 << (n / 2 + 1)) + (n / 2) * (1 << (n / 2))
        };
        (rot + refl) / (2 * n)
    }

    #[test]
    fn triangle_classes() {
        let t = enumerate_family(FamilyTag::H, 3).unwrap();
        assert_eq!(words(&t), ["bbb", "bbc", "bcc", "ccc"]);
    }

    #[test]
    fn pinned_two_paths() {
        let t = enumerate_family(FamilyTag::J, 2).unwrap();
        assert_eq!(words(&t), ["bb"]);
    }

    #[test]
    fn class_counts_match_bracelets() {
        for ell in 3..=14 {
            let t = enumerate_family(FamilyTag::H, ell).unwrap();
            assert_eq!(t.classes.len() as u64, bracelets(ell as u64), "ell = {ell}");
        }
        assert_eq!(enumerate_family(FamilyTag::H, 8).unwrap().classes.len(), 30);
    }

    #[test]
    fn automorphism_examples() {
        let cls = |s: &str, top| DecoratedClass {
            canonical_word: DecorationWord::parse(s, top).unwrap(),
            aut: 0,
            e_bullet: 0,
            e_circ: 0,
            diff: 0,
            family_tag: FamilyTag::H,
            start_side: None,
        };
        assert_eq!(aut_count(&cls("bbbb", Topology::Cycle)), 8);
        assert_eq!(aut_count(&cls("bcbc", Topology::Cycle)), 4);
        assert_eq!(aut_count(&cls("bcb", Topology::Path)), 2);
        assert_eq!(aut_count(&cls("bbc", Topology::Path)), 1);
    }

    /// Stabilizer size by applying every dihedral element to the explicit
    /// vertex cycle and comparing decorated edge sets.
    fn graph_aut(word: &[Decoration]) -> u32 {
        let l = word.len();
        let edges = |perm: &dyn Fn(usize) -> usize| {
            let mut e: Vec<(usize, usize, Decoration)> = (0..l)
                .map(|i| {
                    let (a, b) = (perm(i), perm((i + 1) % l));
                    (a.min(b), a.max(b), word[i])
                })
                .collect();
            e.sort();
            e
        };
        let id = edges(&|i| i);
        let mut count = 0;
        for k in 0..l {
            for refl in [false, true] {
                let f = move |i: usize| if refl { (k + l - i) % l } else { (i + k) % l };
                if edges(&f) == id {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn automorphisms_match_graph_symmetries() {
        for ell in 3..=9 {
            for c in enumerate_family(FamilyTag::H, ell).unwrap().classes {
                assert_eq!(c.aut, graph_aut(&c.canonical_word.word));
                assert_eq!(c.aut, aut_count(&c));
                assert_eq!((2 * ell as u32) % c.aut, 0);
            }
        }
    }

    #[test]
    fn orbit_stabilizer_counts() {
        for ell in 3..=12 {
            let t = enumerate_family(FamilyTag::H, ell).unwrap();
            let s: u64 = t
                .classes
                .iter()
                .map(|c| 2 * ell as u64 / u64::from(c.aut))
                .sum();
            assert_eq!(s, 1 << ell);
        }
        for ell in 1..=12 {
            let js = enumerate_family(FamilyTag::Jstar, ell).unwrap();
            let s: u64 = js.classes.iter().map(|c| 2 / u64::from(c.aut)).sum();
            assert_eq!(s, 1 << ell);
            if ell >= 2 {
                let j = enumerate_family(FamilyTag::J, ell).unwrap();
                let s: u64 = j.classes.iter().map(|c| 2 / u64::from(c.aut)).sum();
                assert_eq!(s, 1 << (ell - 2));
            }
        }
    }

    #[test]
    fn pinned_families_have_bullet_ends() {
        for tag in [FamilyTag::J, FamilyTag::I] {
            for c in enumerate_family(tag, 6).unwrap().classes {
                assert_eq!(c.canonical_word.word[0], Decoration::Bullet);
                assert_eq!(*c.canonical_word.word.last().unwrap(), Decoration::Bullet);
            }
        }
    }

    #[test]
    fn weight_examples() {
        let t = enumerate_family(FamilyTag::H, 5).unwrap();
        let all_b = &t.classes[0];
        assert!((xi_weight(all_b, 0.9, 0.3, 0.5) - 0.59049).abs() < 1e-15);
        let c = DecoratedClass {
            canonical_word: DecorationWord::parse("bbcc", Topology::Cycle).unwrap(),
            aut: 2,
            e_bullet: 2,
            e_circ: 2,
            diff: cycle_diff(0b0011, 4),
            family_tag: FamilyTag::H,
            start_side: None,
        };
        assert_eq!(c.diff, 2);
        assert!((xi_weight(&c, 1.0, 1.0, 0.7) - 0.49).abs() < 1e-15);
        assert_eq!(xi_weight(&c, 1.0, 1.0, 0.0), 0.0);
        assert_eq!(xi_weight(all_b, 1.0, 1.0, 0.0), 1.0);
    }

    #[test]
    fn beta_examples() {
        assert!((beta(FamilyTag::H, 3, 1.0, 0.0, 0.4).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((beta(FamilyTag::H, 4, 1.0, 1.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
        for (l, m, r) in identity_grid() {
            for ell in 3..=8 {
                let h = beta(FamilyTag::H, ell, l, m, r).unwrap();
                let g = beta(FamilyTag::G, ell, l, m, r).unwrap();
                assert!(rel_close(h, g, 1e-12));
                let j = beta(FamilyTag::J, ell, l, m, r).unwrap();
                let i = beta(FamilyTag::I, ell, l, m, r).unwrap();
                assert!(rel_close(j, i, 1e-12));
            }
        }
    }

    #[test]
    fn closed_forms_are_verified() {
        assert!(closed_forms_verified());
        let b = beta_fast(FamilyTag::H, 7, 0.8, 0.6, 0.5).unwrap();
        let e = beta(FamilyTag::H, 7, 0.8, 0.6, 0.5).unwrap();
        assert!(rel_close(b, e, 1e-9));
    }

    #[test]
    fn beta_sandwich() {
        for (l, m, r) in identity_grid() {
            for ell in 3..=10 {
                let b = beta(FamilyTag::H, ell, l, m, r).unwrap();
                let t = transfer_matrix(l, m, r);
                let word_sum = t.a_plus.powi(ell as i32) + t.a_minus.powi(ell as i32);
                assert!(b <= word_sum * (1.0 + 1e-12));
                assert!(b >= word_sum / (2.0 * ell as f64) * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn a_plus_examples() {
        assert!((a_plus(0.7, 1.2, 0.0) - 1.44).abs() < 1e-15);
        assert!((a_plus(0.9, 0.9, 0.9) - 1.4661).abs() < 1e-12);
        assert!((a_plus(1.0, 0.0, 0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn a_plus_is_top_eigenvalue() {
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let (l, m, r) = (2.0 * next(), 2.0 * next(), next());
            let t = transfer_matrix(l, m, r);
            assert!(t.a_plus >= t.a_minus && t.a_minus >= 0.0);
            let tr = t.m[0][0] + t.m[1][1];
            let det = t.m[0][0] * t.m[1][1] - t.m[0][1] * t.m[1][0];
            assert!((t.a_plus + t.a_minus - tr).abs() <= 1e-12 * tr.max(1.0));
            assert!((t.a_plus * t.a_minus - det).abs() <= 1e-12 * tr.max(1.0).powi(2));
            // Eigenvector (m01, a - m00) unless degenerate.
            let v = if t.m[0][1].abs() > 1e-12 {
                [t.m[0][1], t.a_plus - t.m[0][0]]
            } else if t.m[1][0].abs() > 1e-12 {
                [t.a_plus - t.m[1][1], t.m[1][0]]
            } else {
                continue;
            };
            let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
            let r0 = t.m[0][0] * v[0] + t.m[0][1] * v[1] - t.a_plus * v[0];
            let r1 = t.m[1][0] * v[0] + t.m[1][1] * v[1] - t.a_plus * v[1];
            assert!((r0 * r0 + r1 * r1).sqrt() <= 1e-12 * norm * tr.max(1.0));
        }
    }

    #[test]
    fn f_threshold_examples() {
        let f = f_threshold(0.9, 0.9, 0.9, 1.0).unwrap();
        assert!((f - 2.0 * 0.6561 / 0.8461).abs() < 1e-12);
        assert!((f - 1.5509).abs() < 1e-4);
        let g: f64 = 0.3;
        assert!(f_threshold(g.sqrt(), 0.1, 0.4, g).unwrap() >= 1.0);
        assert!((f_threshold(0.4, 0.5, 0.0, 0.5).unwrap() - 0.25 / 0.5).abs() < 1e-15);
        assert!(f_threshold(1.0, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn f_exceeds_one_iff_a_plus_exceeds_gamma() {
        let mut state = 99u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        while checked < 1000 {
            let gamma = 0.05 + 2.0 * next();
            let (l, m, r) = (gamma.sqrt() * next(), gamma.sqrt() * next(), next());
            let f = f_threshold(l, m, r, gamma).unwrap();
            let a = a_plus(l, m, r);
            if (f - 1.0).abs() < 1e-9 || (a - gamma).abs() < 1e-9 {
                continue;
            }
            assert_eq!(f > 1.0, a > gamma, "l={l} m={m} r={r} g={gamma}");
            checked += 1;
        }
    }

    #[test]
    fn critical_mu_properties() {
        assert_eq!(critical_mu(0.6, 0.99, 0.25, Method::Subgraph), 0.0);
        // At λ = 0 the third term is μ²ρ²/(γ − μ² + μ²ρ²), equal to one exactly
        // at μ² = γ, where the second term also reaches one.
        let m0 = critical_mu(0.0, 0.99, 0.25, Method::Subgraph);
        assert!((m0 - 0.5).abs() < 1e-6, "{m0}");
        let mut prev = f64::INFINITY;
        for k in 0..=60 {
            let l = 0.01 * k as f64;
            let m = critical_mu(l, 0.8, 0.25, Method::Subgraph);
            assert!(m <= prev + 1e-6);
            prev = m;
        }
    }

    #[test]
    fn istarstar_structure() {
        for ell in 1..=6 {
            let t = enumerate_family(FamilyTag::Istarstar, ell).unwrap();
            for c in &t.classes {
                let len = c.canonical_word.len();
                assert!(len == 2 * ell || len == 2 * ell - 1);
                assert_eq!(c.aut, aut_count(c));
            }
            // Odd shape: ℓ−1 hats and a free final edge; even shapes: ℓ hats, or
            // ℓ−1 inner hats with two free end edges. Orbit counts add to words.
            let odd = 1u64 << ell;
            let even_a = 1u64 << ell;
            let even_b = 1u64 << (ell + 1);
            let s: u64 = t
                .classes
                .iter()
                .map(|c| {
                    if c.canonical_word.len() % 2 == 1 {
                        1
                    } else {
                        2 / u64::from(c.aut)
                    }
                })
                .sum();
            assert_eq!(s, odd + even_a + even_b);
        }
    }

    #[test]
    fn export_uses_bc_strings() {
        let t = enumerate_family(FamilyTag::H, 3)
            .unwrap()
            .weighted(1.0, 0.5, 0.5);
        let e = t.export();
        assert_eq!(e.classes[1].canonical_word, "bbc");
        assert_eq!(e.classes[0].aut, 6);
        assert!(e.classes[0].weight.is_some());
    }

    #[test]
    fn ell_bounds_enforced() {
        assert!(enumerate_family(FamilyTag::H, 2).is_err());
        assert!(enumerate_family(FamilyTag::H, 21).is_err());
        assert!(enumerate_family(FamilyTag::J, 0).is_err());
    }
}
