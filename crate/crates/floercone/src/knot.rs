//! Finite models of full knot Floer complexes: the bundled-data schema,
//! structural validation, and the graded invariants read off from them.
//!
//! # Data schema
//!
//! Line oriented, whitespace separated, `#` starts a comment:
//!
//! ```text
//! knot <name> genus <g>
//! gen <label> A=<int> M=<int>
//! d <src> -> U^<k> <dst>
//! flip <src> -> <dst> [+ <dst2> ...]
//! ```
//!
//! The header comes first; every other directive may repeat. Unknown
//! directives are rejected. A differential line records that `dst` appears in
//! the boundary of `src` with coefficient U^k, k ≥ 0. Gradings obey
//!
//! * `A(src) − A(dst) ≤ k` (double-filtration legality), and
//! * `M(dst) = M(src) − 1 + 2k`.
//!
//! In the (i, j)-plane realization used by the surgery cones, the generator
//! `x` sits at `(i, j) = (0, −A(x))` and U translates by `(−1, −1)`; with that
//! placement the legality inequality above says exactly that no differential
//! raises either plane coordinate.

use std::collections::BTreeMap;
use std::fmt;

use crate::gf2::{self, BitVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub alexander: i64,
    pub maslov: i64,
}

/// One differential entry `src -> U^u_power dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffEntry {
    pub src: usize,
    pub dst: usize,
    pub u_power: u32,
}

#[derive(Debug, Clone)]
pub struct KnotComplex {
    pub name: String,
    pub genus_hint: Option<u32>,
    generators: Vec<Generator>,
    diff: Vec<DiffEntry>,
    /// flip[src] = sorted generator indices with coefficient 1.
    flip: Option<Vec<Vec<usize>>>,
    label_index: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: missing `knot <name> genus <g>` header before other directives")]
    MissingHeader { line: usize },
    #[error("line {line}: duplicate `knot` header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: malformed `{directive}` line")]
    Malformed { line: usize, directive: String },
    #[error("line {line}: duplicate generator label `{label}`")]
    DuplicateLabel { line: usize, label: String },
    #[error("line {line}: unknown generator label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: negative U-power")]
    NegativeUPower { line: usize },
    #[error("line {line}: duplicate differential entry")]
    DuplicateDiffEntry { line: usize },
    #[error("line {line}: duplicate flip row for `{label}`")]
    DuplicateFlipRow { line: usize, label: String },
    #[error("line {line}: value exceeds the supported magnitude {max}")]
    ValueOutOfRange { line: usize, max: i64 },
    #[error("document has no generators")]
    Empty,
}

/// Bound on gradings, genus, and U-powers accepted by the parser; keeps the
/// grading arithmetic downstream safely inside i64.
pub const GRADING_LIMIT: i64 = 1_000_000;

/// A violated structural invariant, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SquareNonzero {
        src: String,
        dst: String,
        u_power: i64,
    },
    FiltrationIllegal {
        src: String,
        dst: String,
        u_power: u32,
    },
    MaslovMismatch {
        src: String,
        dst: String,
        u_power: u32,
    },
    HatRankNotOne {
        total: usize,
        at_maslov_zero: usize,
    },
    AlexanderAsymmetry {
        alexander: i64,
        dim: usize,
        mirror_dim: usize,
    },
    GenusHintMismatch {
        hint: u32,
        computed: u32,
    },
    FlipRowMissing {
        label: String,
    },
    FlipNotInvertible,
    FlipNotChainMap {
        src: String,
    },
    FlipFiltrationIllegal {
        src: String,
        dst: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SquareNonzero { src, dst, u_power } => write!(
                f,
                "differential does not square to zero: U^{u_power} {dst} survives in boundary^2 of {src}"
            ),
            Violation::FiltrationIllegal { src, dst, u_power } => write!(
                f,
                "entry {src} -> U^{u_power} {dst} raises a filtration level (needs A({src}) - A({dst}) <= {u_power})"
            ),
            Violation::MaslovMismatch { src, dst, u_power } => write!(
                f,
                "entry {src} -> U^{u_power} {dst} violates M(dst) = M(src) - 1 + 2k"
            ),
            Violation::HatRankNotOne {
                total,
                at_maslov_zero,
            } => write!(
                f,
                "hat homology rank != 1: total {total}, at Maslov 0: {at_maslov_zero}"
            ),
            Violation::AlexanderAsymmetry {
                alexander,
                dim,
                mirror_dim,
            } => write!(
                f,
                "hat knot Floer dims asymmetric: A={alexander} has dim {dim} but A={} has dim {mirror_dim}",
                -alexander
            ),
            Violation::GenusHintMismatch { hint, computed } => {
                write!(f, "header genus {hint} but computed genus {computed}")
            }
            Violation::FlipRowMissing { label } => write!(f, "flip row missing for `{label}`"),
            Violation::FlipNotInvertible => write!(f, "flip matrix is not invertible"),
            Violation::FlipNotChainMap { src } => {
                write!(f, "flip fails the chain-map identity on `{src}`")
            }
            Violation::FlipFiltrationIllegal { src, dst } => write!(
                f,
                "flip entry {src} -> {dst} violates filtration exchange (needs A({src}) + A({dst}) >= 0)"
            ),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for (k, v) in self.violations.iter().enumerate() {
                if k > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Parse a document in the bundled-data schema.
pub fn parse_knot_complex(text: &str) -> Result<KnotComplex, ParseError> {
    let mut name: Option<String> = None;
    let mut genus_hint: Option<u32> = None;
    let mut generators: Vec<Generator> = Vec::new();
    let mut label_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut diff: Vec<DiffEntry> = Vec::new();
    let mut flip_rows: Vec<(usize, Vec<usize>, usize)> = Vec::new(); // (src, targets, line)

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let directive = tokens[0];
        let malformed = || ParseError::Malformed {
            line,
            directive: directive.to_string(),
        };
        let in_range = |v: i64| -> Result<i64, ParseError> {
            if v.checked_abs().is_none_or(|a| a > GRADING_LIMIT) {
                Err(ParseError::ValueOutOfRange {
                    line,
                    max: GRADING_LIMIT,
                })
            } else {
                Ok(v)
            }
        };
        match directive {
            "knot" => {
                if name.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                if tokens.len() != 4 || tokens[2] != "genus" {
                    return Err(malformed());
                }
                let g: u32 = tokens[3].parse().map_err(|_| malformed())?;
                in_range(i64::from(g))?;
                name = Some(tokens[1].to_string());
                genus_hint = Some(g);
            }
            "gen" => {
                if name.is_none() {
                    return Err(ParseError::MissingHeader { line });
                }
                if tokens.len() != 4 {
                    return Err(malformed());
                }
                let label = tokens[1].to_string();
                let alexander =
                    in_range(parse_assignment(tokens[2], "A").ok_or_else(malformed)?)?;
                let maslov = in_range(parse_assignment(tokens[3], "M").ok_or_else(malformed)?)?;
                if label_index.contains_key(&label) {
                    return Err(ParseError::DuplicateLabel { line, label });
                }
                label_index.insert(label.clone(), generators.len());
                generators.push(Generator {
                    label,
                    alexander,
                    maslov,
                });
            }
            "d" => {
                if name.is_none() {
                    return Err(ParseError::MissingHeader { line });
                }
                // d <src> -> U^<k> <dst>
                if tokens.len() != 5 || tokens[2] != "->" {
                    return Err(malformed());
                }
                let src = lookup(&label_index, tokens[1], line)?;
                let power = tokens[3].strip_prefix("U^").ok_or_else(malformed)?;
                if power.starts_with('-') {
                    return Err(ParseError::NegativeUPower { line });
                }
                let u_power: u32 = power.parse().map_err(|_| malformed())?;
                in_range(i64::from(u_power))?;
                let dst = lookup(&label_index, tokens[4], line)?;
                let entry = DiffEntry { src, dst, u_power };
                if diff.contains(&entry) {
                    return Err(ParseError::DuplicateDiffEntry { line });
                }
                diff.push(entry);
            }
            "flip" => {
                if name.is_none() {
                    return Err(ParseError::MissingHeader { line });
                }
                // flip <src> -> <dst> [+ <dst2> ...]
                if tokens.len() < 4 || tokens[2] != "->" {
                    return Err(malformed());
                }
                let src = lookup(&label_index, tokens[1], line)?;
                let mut targets = Vec::new();
                let mut expect_label = true;
                for &tok in &tokens[3..] {
                    if expect_label {
                        targets.push(lookup(&label_index, tok, line)?);
                    } else if tok != "+" {
                        return Err(malformed());
                    }
                    expect_label = !expect_label;
                }
                if expect_label {
                    return Err(malformed());
                }
                targets.sort_unstable();
                targets.dedup();
                if flip_rows.iter().any(|(s, _, _)| *s == src) {
                    return Err(ParseError::DuplicateFlipRow {
                        line,
                        label: generators[src].label.clone(),
                    });
                }
                flip_rows.push((src, targets, line));
            }
            other => {
                return Err(ParseError::UnknownDirective {
                    line,
                    directive: other.to_string(),
                });
            }
        }
    }

    let name = name.ok_or(ParseError::MissingHeader { line: 1 })?;
    if generators.is_empty() {
        return Err(ParseError::Empty);
    }
    let flip = if flip_rows.is_empty() {
        None
    } else {
        let mut matrix = vec![Vec::new(); generators.len()];
        for (src, targets, _) in flip_rows {
            matrix[src] = targets;
        }
        Some(matrix)
    };

    Ok(KnotComplex {
        name,
        genus_hint,
        generators,
        diff,
        flip,
        label_index,
    })
}

fn parse_assignment(token: &str, key: &str) -> Option<i64> {
    let rest = token.strip_prefix(key)?.strip_prefix('=')?;
    rest.parse().ok()
}

fn lookup(
    index: &BTreeMap<String, usize>,
    label: &str,
    line: usize,
) -> Result<usize, ParseError> {
    index.get(label).copied().ok_or(ParseError::UnknownLabel {
        line,
        label: label.to_string(),
    })
}

impl KnotComplex {
    /// Programmatic construction; run [`validate`] separately.
    pub fn from_parts(
        name: &str,
        generators: Vec<Generator>,
        diff: Vec<DiffEntry>,
        flip: Option<Vec<Vec<usize>>>,
    ) -> Self {
        let label_index = generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.label.clone(), i))
            .collect();
        KnotComplex {
            name: name.to_string(),
            genus_hint: None,
            generators,
            diff,
            flip,
            label_index,
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn diff_entries(&self) -> &[DiffEntry] {
        &self.diff
    }

    pub fn flip(&self) -> Option<&Vec<Vec<usize>>> {
        self.flip.as_ref()
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Height of the generator in the (i, j)-plane at U-power zero: `j = −A`.
    pub fn plane_alexander(&self, g: usize) -> i64 {
        -self.generators[g].alexander
    }

    /// Hat knot Floer dimensions keyed by (Alexander, Maslov).
    ///
    /// This is the homology of the Alexander-associated-graded of the U = 0
    /// slice: only entries with `u_power = 0` and equal Alexander gradings
    /// survive.
    pub fn hat_knot_floer_dims(&self) -> BTreeMap<(i64, i64), usize> {
        let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            groups.entry((g.alexander, g.maslov)).or_default().push(i);
        }
        let graded: Vec<&DiffEntry> = self
            .diff
            .iter()
            .filter(|e| {
                e.u_power == 0
                    && self.generators[e.src].alexander == self.generators[e.dst].alexander
            })
            .collect();
        let mut dims = BTreeMap::new();
        for (&(a, m), idxs) in &groups {
            let below = groups.get(&(a, m - 1)).cloned().unwrap_or_default();
            let above = groups.get(&(a, m + 1)).cloned().unwrap_or_default();
            let rank_out = restricted_rank(&graded, idxs, &below);
            let rank_in = restricted_rank(&graded, &above, idxs);
            // saturating: on invalid complexes the incoming image need not
            // lie in the kernel
            dims.insert((a, m), idxs.len().saturating_sub(rank_out + rank_in));
        }
        dims.retain(|_, d| *d > 0);
        dims
    }

    /// Homology dimensions of the U = 0 slice keyed by Maslov grading.
    pub fn hat_homology_dims(&self) -> BTreeMap<i64, usize> {
        let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, g) in self.generators.iter().enumerate() {
            groups.entry(g.maslov).or_default().push(i);
        }
        let hat: Vec<&DiffEntry> = self.diff.iter().filter(|e| e.u_power == 0).collect();
        let mut dims = BTreeMap::new();
        for (&m, idxs) in &groups {
            let below = groups.get(&(m - 1)).cloned().unwrap_or_default();
            let above = groups.get(&(m + 1)).cloned().unwrap_or_default();
            let rank_out = restricted_rank(&hat, idxs, &below);
            let rank_in = restricted_rank(&hat, &above, idxs);
            dims.insert(m, idxs.len().saturating_sub(rank_out + rank_in));
        }
        dims.retain(|_, d| *d > 0);
        dims
    }

    /// Genus read off the complex: the largest Alexander grading carrying
    /// nonzero hat knot Floer homology (0 for the trivial complex).
    pub fn genus(&self) -> u32 {
        self.hat_knot_floer_dims()
            .keys()
            .map(|&(a, _)| a)
            .max()
            .map_or(0, |a| a.max(0) as u32)
    }

    /// The flip as a U-equivariant map on generators: `x ↦ Σ F[x,y] U^{A(x)} y`.
    ///
    /// Returns, per source generator, the list of (target, U-power) terms.
    pub fn flip_module_map(&self) -> Option<Vec<Vec<(usize, i64)>>> {
        let flip = self.flip.as_ref()?;
        Some(
            (0..self.generators.len())
                .map(|src| {
                    let shift = self.generators[src].alexander;
                    flip.get(src)
                        .map(|row| row.iter().map(|&dst| (dst, shift)).collect())
                        .unwrap_or_default()
                })
                .collect(),
        )
    }

    /// Check every structural invariant and report all violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        // Per-entry legality and Maslov consistency.
        for e in &self.diff {
            let (s, t) = (&self.generators[e.src], &self.generators[e.dst]);
            if s.alexander - t.alexander > i64::from(e.u_power) {
                violations.push(Violation::FiltrationIllegal {
                    src: s.label.clone(),
                    dst: t.label.clone(),
                    u_power: e.u_power,
                });
            }
            if t.maslov != s.maslov - 1 + 2 * i64::from(e.u_power) {
                violations.push(Violation::MaslovMismatch {
                    src: s.label.clone(),
                    dst: t.label.clone(),
                    u_power: e.u_power,
                });
            }
        }

        // Boundary squares to zero over GF(2), with U-powers adding.
        let mut square: BTreeMap<(usize, usize, i64), bool> = BTreeMap::new();
        for e1 in &self.diff {
            for e2 in self.diff.iter().filter(|e2| e2.src == e1.dst) {
                let key = (
                    e1.src,
                    e2.dst,
                    i64::from(e1.u_power) + i64::from(e2.u_power),
                );
                *square.entry(key).or_insert(false) ^= true;
            }
        }
        for ((src, dst, u_power), odd) in square {
            if odd {
                violations.push(Violation::SquareNonzero {
                    src: self.generators[src].label.clone(),
                    dst: self.generators[dst].label.clone(),
                    u_power,
                });
            }
        }

        // Rank-one hat homology at Maslov 0.
        let hat = self.hat_homology_dims();
        let total: usize = hat.values().sum();
        let at_zero = hat.get(&0).copied().unwrap_or(0);
        if total != 1 || at_zero != 1 {
            violations.push(Violation::HatRankNotOne {
                total,
                at_maslov_zero: at_zero,
            });
        }

        // Alexander-grading symmetry of hat knot Floer dimensions.
        let graded = self.hat_knot_floer_dims();
        let mut by_alexander: BTreeMap<i64, usize> = BTreeMap::new();
        for (&(a, _), &d) in &graded {
            *by_alexander.entry(a).or_insert(0) += d;
        }
        for (&a, &d) in &by_alexander {
            if a < 0 {
                continue;
            }
            let mirror = by_alexander.get(&(-a)).copied().unwrap_or(0);
            if d != mirror {
                violations.push(Violation::AlexanderAsymmetry {
                    alexander: a,
                    dim: d,
                    mirror_dim: mirror,
                });
            }
        }
        for (&a, &d) in &by_alexander {
            if a >= 0 {
                continue;
            }
            if by_alexander.get(&(-a)).is_none() {
                violations.push(Violation::AlexanderAsymmetry {
                    alexander: a,
                    dim: d,
                    mirror_dim: 0,
                });
            }
        }

        if let Some(hint) = self.genus_hint {
            let computed = self.genus();
            if hint != computed {
                violations.push(Violation::GenusHintMismatch { hint, computed });
            }
        }

        if let Some(flip) = &self.flip {
            self.validate_flip(flip, &mut violations);
        }

        ValidationReport { violations }
    }

    fn validate_flip(&self, flip: &[Vec<usize>], violations: &mut Vec<Violation>) {
        let n = self.generators.len();
        for (src, row) in flip.iter().enumerate() {
            if row.is_empty() {
                violations.push(Violation::FlipRowMissing {
                    label: self.generators[src].label.clone(),
                });
            }
            for &dst in row {
                if self.generators[src].alexander + self.generators[dst].alexander < 0 {
                    violations.push(Violation::FlipFiltrationIllegal {
                        src: self.generators[src].label.clone(),
                        dst: self.generators[dst].label.clone(),
                    });
                }
            }
        }

        let rows: Vec<BitVec> = flip
            .iter()
            .map(|row| {
                let mut v = BitVec::zeros(n);
                for &dst in row {
                    v.set(dst, true);
                }
                v
            })
            .collect();
        if gf2::rank(&rows) != n {
            violations.push(Violation::FlipNotInvertible);
        }

        // U-equivariant chain-map identity: ∂ ∘ Φ = Φ ∘ ∂ on every generator,
        // with Φ(x) = Σ F[x,y] U^{A(x)} y.
        for src in 0..n {
            let mut terms: BTreeMap<(usize, i64), bool> = BTreeMap::new();
            let a_src = self.generators[src].alexander;
            // ∂(Φ(src))
            for &mid in &flip[src] {
                for e in self.diff.iter().filter(|e| e.src == mid) {
                    let key = (e.dst, a_src + i64::from(e.u_power));
                    *terms.entry(key).or_insert(false) ^= true;
                }
            }
            // Φ(∂(src))
            for e in self.diff.iter().filter(|e| e.src == src) {
                let a_mid = self.generators[e.dst].alexander;
                for &dst in &flip[e.dst] {
                    let key = (dst, i64::from(e.u_power) + a_mid);
                    *terms.entry(key).or_insert(false) ^= true;
                }
            }
            if terms.values().any(|&odd| odd) {
                violations.push(Violation::FlipNotChainMap {
                    src: self.generators[src].label.clone(),
                });
            }
        }
    }
}

/// Rank of the differential restricted to given source and target index sets.
fn restricted_rank(entries: &[&DiffEntry], sources: &[usize], targets: &[usize]) -> usize {
    if sources.is_empty() || targets.is_empty() {
        return 0;
    }
    let pos: BTreeMap<usize, usize> = targets.iter().enumerate().map(|(k, &t)| (t, k)).collect();
    let rows: Vec<BitVec> = sources
        .iter()
        .map(|&s| {
            let mut row = BitVec::zeros(targets.len());
            for e in entries.iter().filter(|e| e.src == s) {
                if let Some(&col) = pos.get(&e.dst) {
                    row.flip(col);
                }
            }
            row
        })
        .collect();
    gf2::rank(&rows)
}
