//! Test-side oracles, kept independent of the library's linear-algebra path:
//! plain `Vec<Vec<bool>>` row reduction instead of packed bitsets, plus a
//! generator of random legal bifiltered complexes built from elementary
//! pieces and filtered basis changes.

use std::collections::{BTreeMap, BTreeSet};

use floercone::bifilt::{BifiltComplex, BifiltGen};
use floercone::rat::Rat;
use rand::Rng;

/// Row rank over GF(2) by textbook elimination on boolean rows.
pub fn naive_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let (head, tail) = rows.split_at_mut(rank.max(r));
                let (a, b) = if r < rank {
                    (&mut head[r], &tail[0])
                } else {
                    (&mut tail[0], &head[rank])
                };
                for c in 0..cols {
                    a[c] ^= b[c];
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Homology dimensions by Maslov grading of the subquotient selected by
/// `pred`, computed directly from the boundary without reduction.
pub fn oracle_homology_by_maslov(
    complex: &BifiltComplex,
    pred: impl Fn(i64, Rat) -> bool,
) -> BTreeMap<Rat, usize> {
    let selected: Vec<usize> = (0..complex.len())
        .filter(|&i| {
            let g = &complex.gens()[i];
            pred(g.filt_i, g.filt_j)
        })
        .collect();
    let selected_set: BTreeSet<usize> = selected.iter().copied().collect();
    let mut groups: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for &i in &selected {
        groups.entry(complex.gens()[i].maslov).or_default().push(i);
    }
    let matrix = |srcs: &[usize], tgts: &[usize]| -> Vec<Vec<bool>> {
        let pos: BTreeMap<usize, usize> = tgts.iter().enumerate().map(|(c, &t)| (t, c)).collect();
        srcs.iter()
            .map(|&s| {
                let mut row = vec![false; tgts.len()];
                for &t in complex.boundary_of(s) {
                    if selected_set.contains(&t) {
                        if let Some(&c) = pos.get(&t) {
                            row[c] ^= true;
                        }
                    }
                }
                row
            })
            .collect()
    };
    let mut dims = BTreeMap::new();
    for (&m, idxs) in &groups {
        let below = groups.get(&(m - Rat::int(1))).cloned().unwrap_or_default();
        let above = groups.get(&(m + Rat::int(1))).cloned().unwrap_or_default();
        let rank_out = if below.is_empty() {
            0
        } else {
            naive_rank(matrix(idxs, &below))
        };
        let rank_in = if above.is_empty() {
            0
        } else {
            naive_rank(matrix(&above, idxs))
        };
        let d = idxs.len() - rank_out - rank_in;
        if d > 0 {
            dims.insert(m, d);
        }
    }
    dims
}

/// Random legal bifiltered complex: a direct sum of dots and single arrows
/// whose boundary is then scrambled by random filtered basis changes. All
/// invariants hold by construction.
pub fn random_bifilt(rng: &mut impl Rng, max_gens: usize) -> BifiltComplex {
    let target = rng.gen_range(1..=max_gens.max(1));
    let mut gens: Vec<BifiltGen> = Vec::new();
    let mut out: Vec<BTreeSet<usize>> = Vec::new();

    let push = |gens: &mut Vec<BifiltGen>, out: &mut Vec<BTreeSet<usize>>, i, j: Rat, m| {
        let label = format!("g{}", gens.len());
        gens.push(BifiltGen {
            label,
            filt_i: i,
            filt_j: j,
            maslov: Rat::int(m),
        });
        out.push(BTreeSet::new());
        gens.len() - 1
    };

    while gens.len() < target {
        let i0 = rng.gen_range(-3..=3);
        let j0 = Rat::new(rng.gen_range(-6..=6), 2);
        let m0 = rng.gen_range(-4..=4);
        if gens.len() + 1 < target && rng.gen_bool(0.7) {
            let (di, dj) = if rng.gen_bool(0.4) {
                (0, Rat::int(0))
            } else {
                (rng.gen_range(0..=2), Rat::new(rng.gen_range(0..=4), 2))
            };
            let x = push(&mut gens, &mut out, i0, j0, m0);
            let y = push(&mut gens, &mut out, i0 - di, j0 - dj, m0 - 1);
            out[x].insert(y);
        } else {
            push(&mut gens, &mut out, i0, j0, m0);
        }
    }

    // filtered basis changes: v <- v + u needs equal Maslov and
    // (I, J)(u) <= (I, J)(v)
    let n = gens.len();
    for _ in 0..3 * n {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v
            || gens[u].maslov != gens[v].maslov
            || gens[u].filt_i > gens[v].filt_i
            || gens[u].filt_j > gens[v].filt_j
        {
            continue;
        }
        let u_targets: Vec<usize> = out[u].iter().copied().collect();
        for t in u_targets {
            if !out[v].insert(t) {
                out[v].remove(&t);
            }
        }
        for w in 0..n {
            if w != v && out[w].contains(&v) {
                if !out[w].insert(u) {
                    out[w].remove(&u);
                }
            }
        }
    }

    let edges: Vec<(usize, usize)> = out
        .iter()
        .enumerate()
        .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
        .collect();
    BifiltComplex::new(gens, &edges)
}

/// Distinct (I, J) threshold pairs present in a complex.
pub fn thresholds(complex: &BifiltComplex) -> Vec<(i64, Rat)> {
    let is: BTreeSet<i64> = complex.gens().iter().map(|g| g.filt_i).collect();
    let js: BTreeSet<Rat> = complex.gens().iter().map(|g| g.filt_j).collect();
    is.iter()
        .flat_map(|&i| js.iter().map(move |&j| (i, j)))
        .collect()
}
