//! Independent oracles shared by the integration tests: exact small-matrix
//! determinants, homology through determinantal divisors, random valid flow
//! categories, and brute-force filtered complexes over F2.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use flowcat::flowcat::{BrokenFlow, Component, FlowCategory, FlowObject, ModuliOne, ModuliZero};
use flowcat::linalg::IntMatrix;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn to_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_i64().expect("small entries")).collect()).collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0] as i128,
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] as i128 * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `d_k`: gcd of all `k×k` minors, for `k = 1…min(rows, cols)`.
pub fn determinantal_divisors(m: &[Vec<i64>], cols: usize) -> Vec<i128> {
    let rows = m.len();
    (1..=rows.min(cols))
        .map(|k| {
            let mut g = 0;
            for r in subsets(rows, k) {
                for c in subsets(cols, k) {
                    let sub: Vec<Vec<i64>> = r.iter().map(|&i| c.iter().map(|&j| m[i][j]).collect()).collect();
                    g = gcd(g, det(&sub));
                }
            }
            g
        })
        .collect()
}

/// Rank and invariant factors `d_k / d_{k-1}` from determinantal divisors.
pub fn smith_oracle(m: &[Vec<i64>], cols: usize) -> Vec<i128> {
    let d = determinantal_divisors(m, cols);
    let mut out = Vec::new();
    let mut prev = 1;
    for dk in d {
        if dk == 0 {
            break;
        }
        out.push(dk / prev);
        prev = dk;
    }
    out
}

/// `(free rank, torsion coefficients > 1)` in each degree of a complex given
/// by its boundary maps `∂_n : C_n → C_{n-1}` with ranks `dims[n]`.
pub fn homology_oracle(dims: &[usize], boundary: &[Vec<Vec<i64>>]) -> Vec<(usize, Vec<i128>)> {
    let factors: Vec<Vec<i128>> =
        boundary.iter().enumerate().map(|(n, m)| smith_oracle(m, dims[n])).collect();
    (0..dims.len())
        .map(|n| {
            let out_rank = factors[n].len();
            let (in_rank, torsion) = match factors.get(n + 1) {
                Some(f) => (f.len(), f.iter().copied().filter(|&x| x > 1).collect()),
                None => (0, vec![]),
            };
            (dims[n] - out_rank - in_rank, torsion)
        })
        .collect()
}

/// A random valid flow category on three or four consecutive indices, with
/// interval data for every gap-2 pair.
///
/// Objects at index `j` come as pairs `(u, v)` with equal boundaries and as
/// singles; every boundary out of index `j ≥ 2` is a combination of
/// differences `u − v` one index down, so `∂∂ = 0` by construction. Counts
/// become signed point lists with occasional cancelling pairs, and the
/// broken flows of each gap-2 pair are matched `+` to `−` at random.
pub fn random_category(rng: &mut impl Rng) -> FlowCategory {
    let levels = rng.gen_range(3..=4);
    let base: i64 = rng.gen_range(-1..=1);
    // per level: pair ids and single ids
    let mut pairs: Vec<Vec<(String, String)>> = Vec::new();
    let mut singles: Vec<Vec<String>> = Vec::new();
    let mut objects = Vec::new();
    for j in 0..levels {
        // a pair below the top gives intervals for the level above
        let np = rng.gen_range(if j + 1 < levels && j > 0 { 1 } else { 0 }..=2);
        let ns = rng.gen_range(if np == 0 { 1 } else { 0 }..=2);
        let idx = base + j as i64;
        let p: Vec<(String, String)> = (0..np).map(|i| (format!("u{j}_{i}"), format!("v{j}_{i}"))).collect();
        let s: Vec<String> = (0..ns).map(|i| format!("w{j}_{i}")).collect();
        for (u, v) in &p {
            objects.push(FlowObject::new(u, idx));
            objects.push(FlowObject::new(v, idx));
        }
        for w in &s {
            objects.push(FlowObject::new(w, idx));
        }
        pairs.push(p);
        singles.push(s);
    }
    let ids_at = |j: usize| -> Vec<String> {
        pairs[j].iter().flat_map(|(u, v)| [u.clone(), v.clone()]).chain(singles[j].iter().cloned()).collect()
    };

    let mut counts: BTreeMap<(String, String), i64> = BTreeMap::new();
    for j in 1..levels {
        let below = ids_at(j - 1);
        let column = |rng: &mut dyn rand::RngCore| -> BTreeMap<String, i64> {
            let mut c = BTreeMap::new();
            if j == 1 {
                for b in &below {
                    c.insert(b.clone(), rng.gen_range(-2..=2));
                }
            } else {
                for (u, v) in &pairs[j - 1] {
                    let k: i64 = [-2, -1, 0, 1, 1, 2][rng.gen_range(0..6)];
                    c.insert(u.clone(), k);
                    c.insert(v.clone(), -k);
                }
            }
            c
        };
        for (u, v) in pairs[j].clone() {
            let c = column(rng);
            for (b, n) in &c {
                counts.insert((u.clone(), b.clone()), *n);
                counts.insert((v.clone(), b.clone()), *n);
            }
        }
        for w in singles[j].clone() {
            for (b, n) in column(rng) {
                counts.insert((w.clone(), b), n);
            }
        }
    }

    let mut moduli0 = Vec::new();
    for ((a, b), n) in &counts {
        let mut signs: Vec<i8> = vec![if *n > 0 { 1 } else { -1 }; n.unsigned_abs() as usize];
        if rng.gen_bool(0.2) {
            signs.extend([1, -1]);
        }
        if signs.is_empty() {
            continue;
        }
        signs.shuffle(rng);
        moduli0.push(ModuliZero::new(a, b, signs));
    }
    let mut f = FlowCategory::new(objects, moduli0);

    let mut moduli1 = Vec::new();
    for j in 2..levels {
        for a in ids_at(j) {
            for c in ids_at(j - 2) {
                let ends = f.broken_flows(&a, &c);
                let mut plus: Vec<BrokenFlow> = ends.iter().filter(|(_, s)| *s > 0).map(|(e, _)| e.clone()).collect();
                let mut minus: Vec<BrokenFlow> = ends.iter().filter(|(_, s)| *s < 0).map(|(e, _)| e.clone()).collect();
                assert_eq!(plus.len(), minus.len(), "construction gives d^2 = 0");
                plus.shuffle(rng);
                minus.shuffle(rng);
                let mut components: Vec<Component> =
                    plus.into_iter().zip(minus).map(|(x, y)| Component::interval(x, y)).collect();
                if rng.gen_bool(0.1) {
                    components.push(Component::Circle);
                }
                components.shuffle(rng);
                if !components.is_empty() {
                    moduli1.push(ModuliOne { from: a.clone(), to: c.clone(), components });
                }
            }
        }
    }
    f = f.with_moduli1(moduli1);
    // hide the construction from the ids
    let mut names: Vec<String> = f.objects.iter().map(|o| o.id.clone()).collect();
    names.shuffle(rng);
    let rename: BTreeMap<String, String> =
        names.iter().enumerate().map(|(i, n)| (n.clone(), format!("x{i}"))).collect();
    let mut f = f.relabel(|s| rename[s].clone());
    f.canonicalize();
    f
}

/// `(table, point)` pairs whose sign flip changes the sign of exactly one end
/// of some interval, so the flipped data cannot be consistent.
pub fn detectable_flips(f: &FlowCategory) -> Vec<(usize, usize)> {
    let mut out = BTreeSet::new();
    for m in f.moduli1.iter().flatten() {
        for comp in &m.components {
            let Component::Interval { ends } = comp else { continue };
            // points used by each end: (table position, point)
            let uses = |e: &BrokenFlow| -> Vec<(usize, usize)> {
                let mut v = Vec::new();
                if let Some(i) = f.moduli0.iter().position(|t| t.from == m.from && t.to == e.mid) {
                    v.push((i, e.p));
                }
                if let Some(i) = f.moduli0.iter().position(|t| t.from == e.mid && t.to == m.to) {
                    v.push((i, e.q));
                }
                v
            };
            let (a, b) = (uses(&ends[0]), uses(&ends[1]));
            for x in a.iter().chain(&b) {
                let n = a.iter().filter(|y| *y == x).count() + b.iter().filter(|y| *y == x).count();
                if n % 2 == 1 {
                    out.insert(*x);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Passes both the axiom checks and the d² checks.
pub fn consistent(f: &FlowCategory) -> bool {
    f.validate().passed() && f.d_squared_report().passed()
}

/// A filtered complex over F2 in degrees `0…`, columns as bit masks.
#[derive(Debug, Clone)]
pub struct F2Filtered {
    pub levels: Vec<Vec<i64>>,
    /// `boundary[n][j]`: mask of the image of generator `j` of degree `n`.
    pub boundary: Vec<Vec<u32>>,
}

fn apply(cols: &[u32], v: u32) -> u32 {
    cols.iter().enumerate().filter(|(j, _)| v >> j & 1 == 1).fold(0, |acc, (_, c)| acc ^ c)
}

/// Random filtered complex of total dimension at most 8.
pub fn random_f2_filtered(rng: &mut impl Rng) -> F2Filtered {
    let degrees = rng.gen_range(1..=4);
    let mut dims = Vec::new();
    let mut left = 8;
    for _ in 0..degrees {
        let d = rng.gen_range(0..=left.min(4));
        dims.push(d);
        left -= d;
    }
    let levels: Vec<Vec<i64>> = dims.iter().map(|&d| (0..d).map(|_| rng.gen_range(0..=3)).collect()).collect();
    let mut boundary: Vec<Vec<u32>> = vec![vec![0; dims[0]]];
    for n in 1..degrees {
        let below = dims[n - 1];
        let mut cols = Vec::new();
        for j in 0..dims[n] {
            let lvl = levels[n][j];
            let allowed: Vec<u32> = (0u32..1 << below)
                .filter(|&v| apply(&boundary[n - 1], v) == 0)
                .filter(|&v| (0..below).all(|i| v >> i & 1 == 0 || levels[n - 1][i] <= lvl))
                .collect();
            cols.push(*allowed.choose(rng).unwrap());
        }
        boundary.push(cols);
    }
    F2Filtered { levels, boundary }
}

fn log2_size(set: &BTreeSet<u32>) -> usize {
    set.len().trailing_zeros() as usize
}

/// `dim Gr_p H_n` by enumerating every vector: the image of `H_n(F_p)` in
/// `H_n` is `(Z_n ∩ F_p + B_n) / B_n`.
pub fn associated_graded(c: &F2Filtered) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for n in 0..c.levels.len() {
        let dim = c.levels[n].len();
        let cycles: Vec<u32> = (0u32..1 << dim).filter(|&v| apply(&c.boundary[n], v) == 0).collect();
        let bounds: BTreeSet<u32> = match c.boundary.get(n + 1) {
            Some(up) => (0u32..1 << c.levels[n + 1].len()).map(|w| apply(up, w)).collect(),
            None => BTreeSet::from([0]),
        };
        let image_dim = |p: i64| {
            let zp: Vec<u32> =
                cycles.iter().copied().filter(|&v| (0..dim).all(|i| v >> i & 1 == 0 || c.levels[n][i] <= p)).collect();
            let sum: BTreeSet<u32> = zp.iter().flat_map(|z| bounds.iter().map(move |b| z ^ b)).collect();
            log2_size(&sum) - log2_size(&bounds)
        };
        for p in 0..=3 {
            let g = image_dim(p) - if p == 0 { 0 } else { image_dim(p - 1) };
            if g > 0 {
                out.insert((p, n as i64 - p), g);
            }
        }
    }
    out
}
