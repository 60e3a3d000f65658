//! GF(2) chain complexes with an exact double filtration (integer I, rational
//! J) and rational Maslov grading: validation, cancellation-based reduction,
//! and homology of boundary-closed slices.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use crate::gf2::{self, BitVec};
use crate::knot::KnotComplex;
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BifiltGen {
    pub label: String,
    pub filt_i: i64,
    pub filt_j: Rat,
    pub maslov: Rat,
}

#[derive(Debug, Clone)]
pub struct BifiltComplex {
    gens: Vec<BifiltGen>,
    /// out[src] = indices with coefficient 1 in the boundary of src.
    out: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BifiltError {
    #[error("boundary does not square to zero: {src} -> {dst} survives")]
    SquareNonzero { src: String, dst: String },
    #[error("boundary entry {src} -> {dst} raises a filtration level")]
    NotMonotone { src: String, dst: String },
    #[error("boundary entry {src} -> {dst} does not drop Maslov grading by 1")]
    MaslovStep { src: String, dst: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("slice is not closed under the boundary: induced map fails d^2 = 0 at `{witness}`")]
pub struct SliceError {
    pub witness: String,
}

impl BifiltComplex {
    pub fn new(gens: Vec<BifiltGen>, edges: &[(usize, usize)]) -> Self {
        let mut out = vec![BTreeSet::new(); gens.len()];
        for &(s, t) in edges {
            assert!(s < gens.len() && t < gens.len());
            // GF(2): repeated insertion cancels
            if !out[s].insert(t) {
                out[s].remove(&t);
            }
        }
        BifiltComplex { gens, out }
    }

    pub fn gens(&self) -> &[BifiltGen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn boundary_of(&self, src: usize) -> &BTreeSet<usize> {
        &self.out[src]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
    }

    /// Check the structural invariants, reporting every violation.
    pub fn validate(&self) -> Vec<BifiltError> {
        let mut errors = Vec::new();
        for (s, ts) in self.out.iter().enumerate() {
            for &t in ts {
                let (gs, gt) = (&self.gens[s], &self.gens[t]);
                if gt.filt_i > gs.filt_i || gt.filt_j > gs.filt_j {
                    errors.push(BifiltError::NotMonotone {
                        src: gs.label.clone(),
                        dst: gt.label.clone(),
                    });
                }
                if gt.maslov != gs.maslov - Rat::int(1) {
                    errors.push(BifiltError::MaslovStep {
                        src: gs.label.clone(),
                        dst: gt.label.clone(),
                    });
                }
            }
        }
        for s in 0..self.len() {
            let mut acc: BTreeMap<usize, bool> = BTreeMap::new();
            for &m in &self.out[s] {
                for &t in &self.out[m] {
                    *acc.entry(t).or_insert(false) ^= true;
                }
            }
            for (t, odd) in acc {
                if odd {
                    errors.push(BifiltError::SquareNonzero {
                        src: self.gens[s].label.clone(),
                        dst: self.gens[t].label.clone(),
                    });
                }
            }
        }
        errors
    }

    /// Cancellation-based reduction: repeatedly cancel the lexicographically
    /// first boundary arrow (ordered by source label, then target label)
    /// connecting two generators at the same (I, J); afterwards no boundary
    /// entry preserves both filtrations.
    pub fn reduce(&self) -> BifiltComplex {
        let n = self.len();
        let mut alive = vec![true; n];
        let mut out = self.out.clone();
        let mut inc = vec![BTreeSet::new(); n];
        for (s, ts) in out.iter().enumerate() {
            for &t in ts {
                inc[t].insert(s);
            }
        }

        loop {
            let mut best: Option<(usize, usize)> = None;
            for s in (0..n).filter(|&s| alive[s]) {
                for &t in &out[s] {
                    if self.gens[s].filt_i == self.gens[t].filt_i
                        && self.gens[s].filt_j == self.gens[t].filt_j
                    {
                        let cand = (&self.gens[s].label, &self.gens[t].label);
                        if best.is_none_or(|(bs, bt)| {
                            cand < (&self.gens[bs].label, &self.gens[bt].label)
                        }) {
                            best = Some((s, t));
                        }
                    }
                }
            }
            let Some((x, y)) = best else { break };

            let ins: Vec<usize> = inc[y].iter().copied().filter(|&w| w != x).collect();
            let outs: Vec<usize> = out[x].iter().copied().filter(|&z| z != y).collect();
            for &w in &ins {
                for &z in &outs {
                    if out[w].insert(z) {
                        inc[z].insert(w);
                    } else {
                        out[w].remove(&z);
                        inc[z].remove(&w);
                    }
                }
            }
            for &g in &[x, y] {
                alive[g] = false;
                for &t in &out[g].clone() {
                    inc[t].remove(&g);
                }
                for &s in &inc[g].clone() {
                    out[s].remove(&g);
                }
                out[g].clear();
                inc[g].clear();
            }
        }

        let keep: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let gens = keep.iter().map(|&i| self.gens[i].clone()).collect();
        let mut edges = Vec::new();
        for &s in &keep {
            for &t in &out[s] {
                edges.push((pos[&s], pos[&t]));
            }
        }
        BifiltComplex::new(gens, &edges)
    }

    /// The subquotient spanned by generators selected by `pred`, with the
    /// induced boundary. Errors if the induced boundary fails d² = 0.
    pub fn subquotient(
        &self,
        pred: impl Fn(i64, Rat) -> bool,
    ) -> Result<BifiltComplex, SliceError> {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| pred(self.gens[i].filt_i, self.gens[i].filt_j))
            .collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let gens: Vec<BifiltGen> = keep.iter().map(|&i| self.gens[i].clone()).collect();
        let mut edges = Vec::new();
        for &s in &keep {
            for &t in &self.out[s] {
                if let Some(&tp) = pos.get(&t) {
                    edges.push((pos[&s], tp));
                }
            }
        }
        let sliced = BifiltComplex::new(gens, &edges);
        for s in 0..sliced.len() {
            let mut acc: BTreeMap<usize, bool> = BTreeMap::new();
            for &m in &sliced.out[s] {
                for &t in &sliced.out[m] {
                    *acc.entry(t).or_insert(false) ^= true;
                }
            }
            if acc.values().any(|&odd| odd) {
                return Err(SliceError {
                    witness: sliced.gens[s].label.clone(),
                });
            }
        }
        Ok(sliced)
    }

    /// Homology of the slice complex (J collapsed), keyed by Maslov grading.
    pub fn homology_by_maslov(
        &self,
        pred: impl Fn(i64, Rat) -> bool,
    ) -> Result<BTreeMap<Rat, usize>, SliceError> {
        let sliced = self.subquotient(pred)?;
        let mut groups: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
        for (i, g) in sliced.gens.iter().enumerate() {
            groups.entry(g.maslov).or_default().push(i);
        }
        let mut dims = BTreeMap::new();
        for (&m, idxs) in &groups {
            let below = groups.get(&(m - Rat::int(1))).cloned().unwrap_or_default();
            let above = groups.get(&(m + Rat::int(1))).cloned().unwrap_or_default();
            let rank_out = sliced.restricted_rank(idxs, &below, |_, _| true);
            let rank_in = sliced.restricted_rank(&above, idxs, |_, _| true);
            let d = idxs.len() - rank_out - rank_in;
            if d > 0 {
                dims.insert(m, d);
            }
        }
        Ok(dims)
    }

    /// Homology of the J-associated-graded of the slice complex, keyed by
    /// (J, Maslov). Only boundary entries preserving J survive.
    pub fn graded_homology(
        &self,
        pred: impl Fn(i64, Rat) -> bool,
    ) -> Result<BTreeMap<(Rat, Rat), usize>, SliceError> {
        let sliced = self.subquotient(pred)?;
        let mut groups: BTreeMap<(Rat, Rat), Vec<usize>> = BTreeMap::new();
        for (i, g) in sliced.gens.iter().enumerate() {
            groups.entry((g.filt_j, g.maslov)).or_default().push(i);
        }
        let same_j =
            |s: &BifiltGen, t: &BifiltGen| -> bool { s.filt_j == t.filt_j };
        let mut dims = BTreeMap::new();
        for (&(j, m), idxs) in &groups {
            let below = groups
                .get(&(j, m - Rat::int(1)))
                .cloned()
                .unwrap_or_default();
            let above = groups
                .get(&(j, m + Rat::int(1)))
                .cloned()
                .unwrap_or_default();
            let rank_out = sliced.restricted_rank(idxs, &below, same_j);
            let rank_in = sliced.restricted_rank(&above, idxs, same_j);
            let d = idxs.len() - rank_out - rank_in;
            if d > 0 {
                dims.insert((j, m), d);
            }
        }
        Ok(dims)
    }

    fn restricted_rank(
        &self,
        sources: &[usize],
        targets: &[usize],
        edge_ok: impl Fn(&BifiltGen, &BifiltGen) -> bool,
    ) -> usize {
        if sources.is_empty() || targets.is_empty() {
            return 0;
        }
        let pos: BTreeMap<usize, usize> =
            targets.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let rows: Vec<BitVec> = sources
            .iter()
            .map(|&s| {
                let mut row = BitVec::zeros(targets.len());
                for &t in &self.out[s] {
                    if let Some(&col) = pos.get(&t) {
                        if edge_ok(&self.gens[s], &self.gens[t]) {
                            row.flip(col);
                        }
                    }
                }
                row
            })
            .collect();
        gf2::rank(&rows)
    }
}

impl fmt::Display for BifiltComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} generators", self.len())?;
        for (s, g) in self.gens.iter().enumerate() {
            write!(
                f,
                "  {} (I={}, J={}, M={})",
                g.label, g.filt_i, g.filt_j, g.maslov
            )?;
            if !self.out[s].is_empty() {
                let targets: Vec<&str> =
                    self.out[s].iter().map(|&t| self.gens[t].label.as_str()).collect();
                write!(f, " -> {}", targets.join(" + "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The finite window `-depth <= i <= 0` of the (i, j)-plane realization of a
/// knot complex, as a bifiltered complex with (I, J) = (i, j).
pub fn knot_plane_window(k: &KnotComplex, depth: u32) -> BifiltComplex {
    let depth = i64::from(depth);
    let mut gens = Vec::new();
    let mut index = BTreeMap::new();
    for (g, info) in k.generators().iter().enumerate() {
        for i in -depth..=0 {
            index.insert((g, i), gens.len());
            gens.push(BifiltGen {
                label: format!("{}@{}", info.label, i),
                filt_i: i,
                filt_j: Rat::int(i + k.plane_alexander(g)),
                maslov: Rat::int(info.maslov + 2 * i),
            });
        }
    }
    let mut edges = Vec::new();
    for e in k.diff_entries() {
        for i in -depth..=0 {
            let ti = i - i64::from(e.u_power);
            if ti >= -depth {
                edges.push((index[&(e.src, i)], index[&(e.dst, ti)]));
            }
        }
    }
    BifiltComplex::new(gens, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::parse_knot_complex;

    fn gen(label: &str, i: i64, j: i64, m: i64) -> BifiltGen {
        BifiltGen {
            label: label.to_string(),
            filt_i: i,
            filt_j: Rat::int(j),
            maslov: Rat::int(m),
        }
    }

    #[test]
    fn cancelling_pair_reduces_to_empty() {
        let c = BifiltComplex::new(vec![gen("x", 0, 0, 1), gen("y", 0, 0, 0)], &[(0, 1)]);
        assert!(c.validate().is_empty());
        let r = c.reduce();
        assert_eq!(r.len(), 0);
    }

    #[test]
    fn reduced_staircase_is_unchanged() {
        // strict filtration drops everywhere: nothing cancels
        let c = BifiltComplex::new(
            vec![gen("a", 0, 1, 0), gen("b", 0, 0, -1), gen("m", 1, 1, 0)],
            &[(2, 1)],
        );
        let r = c.reduce();
        assert_eq!(r.len(), 3);
        assert_eq!(r.edges().count(), 1);
    }

    #[test]
    fn box_full_slice_has_no_homology() {
        // dw = x + y, dx = z, dy = z; rank 2, dim ker 2, homology 0.
        let c = BifiltComplex::new(
            vec![
                gen("w", 1, 1, 1),
                gen("x", 0, 1, 0),
                gen("y", 1, 0, 0),
                gen("z", 0, 0, -1),
            ],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        assert!(c.validate().is_empty());
        let dims = c.homology_by_maslov(|_, _| true).unwrap();
        assert!(dims.is_empty());
    }

    #[test]
    fn unknot_hat_slice() {
        let k = parse_knot_complex("knot unknot genus 0\ngen u A=0 M=0\n").unwrap();
        let w = knot_plane_window(&k, 2);
        let dims = w.homology_by_maslov(|i, _| i == 0).unwrap();
        assert_eq!(dims.get(&Rat::int(0)), Some(&1));
        assert_eq!(dims.values().sum::<usize>(), 1);
    }

    #[test]
    fn trefoil_hat_slice_has_total_dimension_one() {
        let doc = "\
knot trefoil_rh genus 1
gen a A=1 M=-2
gen b A=0 M=-1
gen c A=-1 M=0
d b -> U^0 a
d b -> U^1 c
";
        let k = parse_knot_complex(doc).unwrap();
        let w = knot_plane_window(&k, 3);
        assert!(w.validate().is_empty());
        let dims = w.homology_by_maslov(|i, _| i == 0).unwrap();
        assert_eq!(dims.values().sum::<usize>(), 1);
        assert_eq!(dims.get(&Rat::int(0)), Some(&1));
    }

    #[test]
    fn reduce_preserves_slice_homology() {
        let doc = "\
knot trefoil_rh genus 1
gen a A=1 M=-2
gen b A=0 M=-1
gen c A=-1 M=0
d b -> U^0 a
d b -> U^1 c
";
        let k = parse_knot_complex(doc).unwrap();
        let w = knot_plane_window(&k, 3);
        let r = w.reduce();
        assert!(r.validate().is_empty());
        for (i0, j0) in [(0, 0), (0, 1), (-1, 0), (-2, -1)] {
            let a = w
                .homology_by_maslov(|i, j| i <= i0 && j <= Rat::int(j0))
                .unwrap();
            let b = r
                .homology_by_maslov(|i, j| i <= i0 && j <= Rat::int(j0))
                .unwrap();
            assert_eq!(a, b, "threshold ({i0}, {j0})");
        }
    }

    #[test]
    fn reduce_is_idempotent() {
        let c = BifiltComplex::new(
            vec![
                gen("w", 1, 1, 1),
                gen("x", 0, 1, 0),
                gen("y", 1, 1, 0),
                gen("z", 0, 0, -1),
            ],
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        );
        let r1 = c.reduce();
        let r2 = r1.reduce();
        assert_eq!(r1.len(), r2.len());
        assert_eq!(
            r1.homology_by_maslov(|_, _| true).unwrap(),
            r2.homology_by_maslov(|_, _| true).unwrap()
        );
    }
}
