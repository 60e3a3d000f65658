//! The dual-knot surgery mapping cone for positive integer surgery
//! coefficients: assembly with exact (I, J) filtrations and rational Maslov
//! gradings, flavored homology extraction, the top Alexander grading of the
//! dual knot, and the top-grading injectivity criterion.
//!
//! For surgery coefficient n >= 1 and a spin^c label s in Z/n, the cone
//! assembles A-pieces indexed by {s + n*l} in [-b+1, b] and B-pieces indexed
//! by {s + n*l} in [-b+n+1, b], where b is large enough that the discarded
//! pieces are contractible (see [`truncation_bound`]). Each piece is a copy of
//! the knot complex; `v`-edges project A_s onto B_s and `h`-edges carry A_s to
//! B_{s+n} through the j = s slice, a U-translation, and the flip map.

use std::collections::{BTreeMap, BTreeSet};

use crate::bifilt::{BifiltComplex, BifiltGen};
use crate::gf2::{self, BitVec};
use crate::knot::{KnotComplex, ValidationReport};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Hat,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeParams {
    pub n: i64,
    /// Canonical representative in [0, n).
    pub spinc: i64,
    pub flavor: Flavor,
    /// Truncation depth for the minus flavor; defaults to 2*genus + n + 4.
    pub u_depth: Option<u32>,
}

/// Largest accepted surgery coefficient; keeps grading arithmetic in i64 and
/// cone sizes sane.
pub const MAX_COEFFICIENT: i64 = 100_000;

impl ConeParams {
    pub fn new(n: i64, spinc: i64, flavor: Flavor) -> Result<Self, ConeError> {
        if n < 1 {
            return Err(ConeError::NonPositiveCoefficient { n });
        }
        if n > MAX_COEFFICIENT {
            return Err(ConeError::CoefficientTooLarge { n });
        }
        Ok(ConeParams {
            n,
            spinc: spinc.rem_euclid(n),
            flavor,
            u_depth: None,
        })
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.u_depth = Some(depth);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("surgery coefficient must be a positive integer, got {n}")]
    NonPositiveCoefficient { n: i64 },
    #[error("surgery coefficient {n} exceeds the supported maximum")]
    CoefficientTooLarge { n: i64 },
    #[error("knot complex fails validation: {report}")]
    InvalidComplex { report: String },
    #[error("flip map required: the cone needs an h-edge out of A_{piece} but the complex has no flip")]
    FlipRequired { piece: i64 },
    #[error("u_depth {provided} is below the required minimum {minimum} (2*genus + n + 4)")]
    DepthTooSmall { provided: u32, minimum: u32 },
    #[error("minus-flavor homology not stable at u_depth {depth}; raise the depth and recompute")]
    Unstable { depth: u32 },
    #[error("operation requires genus >= 1 (complex has genus 0)")]
    GenusZero,
}

fn validated(k: &KnotComplex) -> Result<(), ConeError> {
    let report: ValidationReport = k.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(ConeError::InvalidComplex {
            report: report.to_string(),
        })
    }
}

/// Truncation bound: keeps at least one A-piece in every spin^c class and
/// only discards pieces whose edge maps are quasi-isomorphisms (v for indices
/// above genus, h for indices below -genus).
pub fn truncation_bound(genus: u32, n: i64) -> i64 {
    i64::from(genus).max(1).max((n + 1) / 2)
}

pub fn default_u_depth(genus: u32, n: i64) -> u32 {
    2 * genus + n as u32 + 4
}

/// A- and B-piece indices for the given spin^c class, ascending.
pub fn piece_indices(genus: u32, n: i64, spinc: i64) -> (Vec<i64>, Vec<i64>) {
    let b = truncation_bound(genus, n);
    let class = spinc.rem_euclid(n);
    let in_class = |lo: i64, hi: i64| -> Vec<i64> {
        (lo..=hi).filter(|s| s.rem_euclid(n) == class).collect()
    };
    (in_class(-b + 1, b), in_class(-b + n + 1, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PieceKind {
    A,
    B,
}

#[derive(Debug, Clone)]
pub struct ConePiece {
    pub kind: PieceKind,
    pub index: i64,
    /// The piece with its internal differential only.
    pub block: BifiltComplex,
    /// Positions of this piece's elements inside the assembled complex.
    pub element_range: std::ops::Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    V,
    H,
}

#[derive(Debug, Clone)]
pub struct BlockEdge {
    pub kind: EdgeKind,
    pub from_piece: usize,
    pub to_piece: usize,
    /// Row `r` = image of the from-piece element `r` as a bit vector over the
    /// to-piece elements.
    pub matrix: Vec<BitVec>,
}

/// One element of an assembled cone: a U-translate of a knot generator inside
/// one piece, at plane position (i, j) with j = i − A(gen).
#[derive(Debug, Clone, Copy)]
pub struct ConeElement {
    pub piece: usize,
    pub gen: usize,
    pub plane_i: i64,
}

#[derive(Debug, Clone)]
pub struct MappingCone {
    pub params: ConeParams,
    pub genus: u32,
    pub pieces: Vec<ConePiece>,
    pub edges: Vec<BlockEdge>,
    pub elements: Vec<ConeElement>,
    pub underlying: BifiltComplex,
    /// Lower J-cutoff of reliably computed gradings (minus flavor only).
    pub reported_j_cut: Option<Rat>,
    /// Set for minus cones once the depth-stability recheck has passed.
    pub minus_stable: bool,
}

struct ConeShape {
    n: i64,
    genus: u32,
    a_indices: Vec<i64>,
    b_indices: Vec<i64>,
}

fn shape(k: &KnotComplex, params: &ConeParams) -> Result<ConeShape, ConeError> {
    validated(k)?;
    let genus = k.genus();
    let (a_indices, b_indices) = piece_indices(genus, params.n, params.spinc);
    let needs_h = a_indices
        .iter()
        .find(|&&s| b_indices.contains(&(s + params.n)));
    if let Some(&s) = needs_h {
        if k.flip().is_none() {
            return Err(ConeError::FlipRequired { piece: s });
        }
    }
    Ok(ConeShape {
        n: params.n,
        genus,
        a_indices,
        b_indices,
    })
}

fn j_shift(s: i64, n: i64) -> Rat {
    Rat::new(2 * s + n - 1, 2 * n)
}

fn maslov_shift(s: i64, n: i64, kind: PieceKind) -> Rat {
    let quad = Rat::new((2 * s - n) * (2 * s - n), 4 * n);
    let offset = match kind {
        PieceKind::A => Rat::new(-1, 4),
        PieceKind::B => Rat::new(-5, 4),
    };
    quad + offset
}

fn element_gradings(
    k: &KnotComplex,
    kind: PieceKind,
    s: i64,
    n: i64,
    gen: usize,
    plane_i: i64,
) -> (i64, Rat, Rat) {
    let a_plane = k.plane_alexander(gen);
    let j = plane_i + a_plane;
    let m_tilde = k.generators()[gen].maslov + 2 * plane_i;
    match kind {
        PieceKind::A => {
            let filt_i = plane_i.max(j - s);
            let filt_j = Rat::int((plane_i - 1).max(j - s)) + j_shift(s, n);
            let maslov = Rat::int(m_tilde) + maslov_shift(s, n, kind);
            (filt_i, filt_j, maslov)
        }
        PieceKind::B => {
            let filt_i = plane_i;
            let filt_j = Rat::int(plane_i - 1) + j_shift(s, n);
            let maslov = Rat::int(m_tilde) + maslov_shift(s, n, kind);
            (filt_i, filt_j, maslov)
        }
    }
}

/// Build the flavored cone. Hat realizes each piece as its {I = 0} slice;
/// minus realizes {-depth <= I <= 0} and verifies depth stability.
pub fn build_cone(k: &KnotComplex, params: &ConeParams) -> Result<MappingCone, ConeError> {
    let sh = shape(k, params)?;
    match params.flavor {
        Flavor::Hat => assemble(k, params, &sh, None),
        Flavor::Minus => {
            let minimum = default_u_depth(sh.genus, params.n);
            let depth = params.u_depth.unwrap_or(minimum);
            if depth < minimum {
                return Err(ConeError::DepthTooSmall {
                    provided: depth,
                    minimum,
                });
            }
            let cone = assemble(k, params, &sh, Some(depth))?;
            let deeper = assemble(k, params, &sh, Some(depth + 2))?;
            let cut = cone.reported_j_cut.expect("minus cones carry a cut");
            let dims = graded_dims_above(&cone, cut);
            let dims_deeper = graded_dims_above(&deeper, cut);
            if dims != dims_deeper {
                return Err(ConeError::Unstable { depth });
            }
            let mut cone = cone;
            cone.minus_stable = true;
            Ok(cone)
        }
    }
}

fn graded_dims_above(cone: &MappingCone, cut: Rat) -> BTreeMap<(Rat, Rat), usize> {
    cone.underlying
        .graded_homology(|_, j| j > cut)
        .expect("flavor slices are boundary-closed")
}

fn assemble(
    k: &KnotComplex,
    params: &ConeParams,
    sh: &ConeShape,
    depth: Option<u32>,
) -> Result<MappingCone, ConeError> {
    let n = sh.n;
    let piece_list: Vec<(PieceKind, i64)> = sh
        .a_indices
        .iter()
        .map(|&s| (PieceKind::A, s))
        .chain(sh.b_indices.iter().map(|&s| (PieceKind::B, s)))
        .collect();
    let piece_pos: BTreeMap<(PieceKind, i64), usize> = piece_list
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();

    let mut elements: Vec<ConeElement> = Vec::new();
    let mut gens: Vec<BifiltGen> = Vec::new();
    let mut index: BTreeMap<(usize, usize, i64), usize> = BTreeMap::new();
    let mut ranges: Vec<std::ops::Range<usize>> = Vec::new();

    for (p, &(kind, s)) in piece_list.iter().enumerate() {
        let start = elements.len();
        for (g, info) in k.generators().iter().enumerate() {
            let a_plane = k.plane_alexander(g);
            // I as a function of plane i: i + c with c = max(0, a_plane - s) on
            // A-pieces, c = 0 on B-pieces.
            let c = match kind {
                PieceKind::A => (a_plane - s).max(0),
                PieceKind::B => 0,
            };
            let i_values: Vec<i64> = match depth {
                None => vec![-c],
                Some(d) => {
                    let d = i64::from(d);
                    (-d - c..=-c).rev().collect()
                }
            };
            for plane_i in i_values {
                let (filt_i, filt_j, maslov) = element_gradings(k, kind, s, n, g, plane_i);
                let kind_ch = match kind {
                    PieceKind::A => 'A',
                    PieceKind::B => 'B',
                };
                index.insert((p, g, plane_i), elements.len());
                elements.push(ConeElement {
                    piece: p,
                    gen: g,
                    plane_i,
                });
                gens.push(BifiltGen {
                    label: format!("{kind_ch}{s}:{}@{plane_i}", info.label),
                    filt_i,
                    filt_j,
                    maslov,
                });
            }
        }
        ranges.push(start..elements.len());
    }

    // Internal differentials.
    let mut internal_edges: Vec<(usize, usize)> = Vec::new();
    for (p, _) in piece_list.iter().enumerate() {
        for e in k.diff_entries() {
            for idx in ranges[p].clone() {
                if elements[idx].gen != e.src {
                    continue;
                }
                let ti = elements[idx].plane_i - i64::from(e.u_power);
                if let Some(&t) = index.get(&(p, e.dst, ti)) {
                    internal_edges.push((idx, t));
                }
            }
        }
    }

    // v- and h-edges between pieces.
    let flip = k.flip_module_map();
    let mut edge_maps: Vec<BlockEdge> = Vec::new();
    let mut cross_edges: Vec<(usize, usize)> = Vec::new();
    for (p, &(kind, s)) in piece_list.iter().enumerate() {
        if kind != PieceKind::A {
            continue;
        }
        if let Some(&q) = piece_pos.get(&(PieceKind::B, s)) {
            let mut matrix = Vec::new();
            for idx in ranges[p].clone() {
                let el = elements[idx];
                let mut row = BitVec::zeros(ranges[q].len());
                if let Some(&t) = index.get(&(q, el.gen, el.plane_i)) {
                    row.set(t - ranges[q].start, true);
                    cross_edges.push((idx, t));
                }
                matrix.push(row);
            }
            edge_maps.push(BlockEdge {
                kind: EdgeKind::V,
                from_piece: p,
                to_piece: q,
                matrix,
            });
        }
        if let Some(&q) = piece_pos.get(&(PieceKind::B, s + n)) {
            let flip = flip.as_ref().expect("shape() checked flip presence");
            let mut matrix = Vec::new();
            for idx in ranges[p].clone() {
                let el = elements[idx];
                let mut row = BitVec::zeros(ranges[q].len());
                let j = el.plane_i + k.plane_alexander(el.gen);
                for &(dst, _) in &flip[el.gen] {
                    if let Some(&t) = index.get(&(q, dst, j - s)) {
                        row.set(t - ranges[q].start, true);
                        cross_edges.push((idx, t));
                    }
                }
                matrix.push(row);
            }
            edge_maps.push(BlockEdge {
                kind: EdgeKind::H,
                from_piece: p,
                to_piece: q,
                matrix,
            });
        }
    }

    let mut all_edges = internal_edges.clone();
    all_edges.extend(&cross_edges);
    let underlying = BifiltComplex::new(gens.clone(), &all_edges);
    debug_assert!(underlying.validate().is_empty());

    let pieces: Vec<ConePiece> = piece_list
        .iter()
        .enumerate()
        .map(|(p, &(kind, s))| {
            let range = ranges[p].clone();
            let block_gens: Vec<BifiltGen> = range.clone().map(|i| gens[i].clone()).collect();
            let block_edges: Vec<(usize, usize)> = internal_edges
                .iter()
                .filter(|(a, _)| range.contains(a))
                .map(|&(a, b)| (a - range.start, b - range.start))
                .collect();
            ConePiece {
                kind,
                index: s,
                block: BifiltComplex::new(block_gens, &block_edges),
                element_range: range,
            }
        })
        .collect();

    let reported_j_cut = depth.map(|d| {
        let c_max = piece_list
            .iter()
            .map(|&(_, s)| j_shift(s, n))
            .max()
            .unwrap_or_else(|| Rat::int(0));
        Rat::int(-i64::from(d) - 1) + c_max
    });

    Ok(MappingCone {
        params: *params,
        genus: sh.genus,
        pieces,
        edges: edge_maps,
        elements,
        underlying,
        reported_j_cut,
        minus_stable: false,
    })
}

/// Homology of the hat-flavor cone with the J-filtration collapsed, keyed by
/// Maslov grading. Computes the hat Heegaard Floer homology of the surgered
/// manifold in the given spin^c structure.
pub fn hf_hat_surgery(
    k: &KnotComplex,
    n: i64,
    spinc: i64,
) -> Result<BTreeMap<Rat, usize>, ConeError> {
    let params = ConeParams::new(n, spinc, Flavor::Hat)?;
    let cone = build_cone(k, &params)?;
    Ok(cone
        .underlying
        .homology_by_maslov(|_, _| true)
        .expect("full slice is boundary-closed"))
}

/// Euler characteristic of the hat-flavor cone in the intrinsic Z/2
/// homological grading (knot-generator Maslov parity, shifted by one on
/// B-pieces).
pub fn euler_characteristic(k: &KnotComplex, n: i64, spinc: i64) -> Result<i64, ConeError> {
    let params = ConeParams::new(n, spinc, Flavor::Hat)?;
    let cone = build_cone(k, &params)?;
    let mut chi = 0i64;
    for el in &cone.elements {
        let block = match cone.pieces[el.piece].kind {
            PieceKind::A => 0,
            PieceKind::B => 1,
        };
        let parity = (k.generators()[el.gen].maslov + block).rem_euclid(2);
        chi += if parity == 0 { 1 } else { -1 };
    }
    Ok(chi)
}

/// Dual-knot knot Floer homology of the surgery, per spin^c structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualHomology {
    /// Dimensions keyed by (Alexander grading of the dual knot = J, Maslov).
    pub dims: BTreeMap<(Rat, Rat), usize>,
    /// Minus flavor only: rank of the U-action from each J level to J - 1.
    pub u_ranks: Option<BTreeMap<Rat, usize>>,
    /// Minus flavor only: gradings at or below this cut are not reported.
    pub reported_j_cut: Option<Rat>,
}

/// Homology of the J-associated-graded of the flavor slice: hat uses {I = 0},
/// minus uses {-depth <= I <= 0} with a stability check.
pub fn hfk_dual(
    k: &KnotComplex,
    n: i64,
    spinc: i64,
    flavor: Flavor,
    u_depth: Option<u32>,
) -> Result<DualHomology, ConeError> {
    let mut params = ConeParams::new(n, spinc, flavor)?;
    params.u_depth = u_depth;
    let cone = build_cone(k, &params)?;
    match flavor {
        Flavor::Hat => {
            let dims = cone
                .underlying
                .graded_homology(|_, _| true)
                .expect("full slice is boundary-closed");
            Ok(DualHomology {
                dims,
                u_ranks: None,
                reported_j_cut: None,
            })
        }
        Flavor::Minus => {
            let cut = cone.reported_j_cut.expect("minus cone has a cut");
            let dims = graded_dims_above(&cone, cut);
            let u_ranks = minus_u_ranks(&cone, cut);
            Ok(DualHomology {
                dims,
                u_ranks: Some(u_ranks),
                reported_j_cut: Some(cut),
            })
        }
    }
}

/// Rank of the map induced by U on graded homology, from level J to J - 1,
/// for reported levels.
fn minus_u_ranks(cone: &MappingCone, cut: Rat) -> BTreeMap<Rat, usize> {
    let complex = &cone.underlying;
    // element lookup: (piece, gen, plane_i) -> index
    let mut index: BTreeMap<(usize, usize, i64), usize> = BTreeMap::new();
    for (i, el) in cone.elements.iter().enumerate() {
        index.insert((el.piece, el.gen, el.plane_i), i);
    }
    let mut levels: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for (i, g) in complex.gens().iter().enumerate() {
        levels.entry(g.filt_j).or_default().push(i);
    }

    // graded boundary rows of one level (as a map level -> level)
    let graded_rows = |idxs: &[usize]| -> Vec<BitVec> {
        let pos: BTreeMap<usize, usize> = idxs.iter().enumerate().map(|(c, &i)| (i, c)).collect();
        idxs.iter()
            .map(|&i| {
                let mut row = BitVec::zeros(idxs.len());
                for &t in complex.boundary_of(i) {
                    if complex.gens()[t].filt_j == complex.gens()[i].filt_j {
                        if let Some(&col) = pos.get(&t) {
                            row.flip(col);
                        }
                    }
                }
                row
            })
            .collect()
    };

    let mut ranks = BTreeMap::new();
    for (&level, idxs) in &levels {
        let below_level = level - Rat::int(1);
        if level <= cut || below_level <= cut {
            continue;
        }
        let Some(below) = levels.get(&below_level) else {
            continue;
        };
        let below_pos: BTreeMap<usize, usize> =
            below.iter().enumerate().map(|(c, &i)| (i, c)).collect();

        let cycles = gf2::kernel_basis(&graded_rows(idxs));
        let boundaries: Vec<BitVec> = graded_rows(below)
            .into_iter()
            .filter(|r| !r.is_zero())
            .collect();

        // U sends an element to the same generator one translate down.
        let u_images: Vec<BitVec> = cycles
            .iter()
            .map(|z| {
                let mut img = BitVec::zeros(below.len());
                for bit in z.iter_set() {
                    let el = cone.elements[idxs[bit]];
                    if let Some(&t) = index.get(&(el.piece, el.gen, el.plane_i - 1)) {
                        if let Some(&col) = below_pos.get(&t) {
                            img.flip(col);
                        }
                    }
                }
                img
            })
            .collect();
        ranks.insert(level, gf2::rank_increment(&boundaries, &u_images));
    }
    ranks
}

/// Maximal J with nonzero minus-flavor dual homology in spin^c = genus mod n.
/// For any valid complex of genus g >= 1 this equals (2g + n - 1) / (2n).
pub fn top_alexander(k: &KnotComplex, n: i64) -> Result<Rat, ConeError> {
    validated(k)?;
    let g = k.genus();
    if g == 0 {
        return Err(ConeError::GenusZero);
    }
    let dual = hfk_dual(k, n, i64::from(g), Flavor::Minus, None)?;
    let top = dual
        .dims
        .keys()
        .map(|&(j, _)| j)
        .max()
        .expect("minus homology of a valid complex is nonzero near the top");
    Ok(top)
}

/// Outcome of the top-grading injectivity criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityVerdict {
    pub injective: bool,
    pub top_alexander: Rat,
    /// The offending reduced arrow from (I, J) = (1, top) to (0, top), if any.
    pub witness: Option<ArrowWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowWitness {
    pub src: String,
    pub dst: String,
    pub u_power: i64,
}

/// Decide injectivity at the top Alexander grading of the dual knot in
/// spin^c = genus mod n: build the spin^c = g cone U-equivariantly, reduce it
/// by cancelling filtration-preserving arrows, and look for a surviving arrow
/// from (I, J) = (1, top) to (0, top). A `false` verdict indicates an
/// invariant violation upstream and carries the witness arrow.
pub fn check_top_injectivity(k: &KnotComplex, n: i64) -> Result<InjectivityVerdict, ConeError> {
    validated(k)?;
    let g = k.genus();
    if g == 0 {
        return Err(ConeError::GenusZero);
    }
    let params = ConeParams::new(n, i64::from(g), Flavor::Hat)?;
    let sh = shape(k, &params)?;
    let mut module = ModuleCone::build(k, &sh, params.spinc);
    module.reduce();

    let top = Rat::new(2 * i64::from(g) + n - 1, 2 * n);
    let witness = module.find_arrow(|src, dst, power| {
        let i_drop = src.i0 - (dst.i0 - power);
        let j_drop = src.j0 - (dst.j0 - Rat::int(power));
        i_drop == 1 && j_drop == Rat::int(0) && src.j0 - Rat::int(src.i0) == top - Rat::int(1)
    });

    Ok(InjectivityVerdict {
        injective: witness.is_none(),
        top_alexander: top,
        witness,
    })
}

/// U-equivariant model of the full cone: one generator per (piece, knot
/// generator), differentials carry Laurent U-powers, and the (I, J)
/// bifiltration of the U^0 translate is recorded (U shifts both by -1).
struct ModuleGen {
    label: String,
    i0: i64,
    j0: Rat,
}

struct ModuleCone {
    gens: Vec<ModuleGen>,
    alive: Vec<bool>,
    /// diff[(src, dst)] = set of U-powers with coefficient 1.
    diff: BTreeMap<(usize, usize), BTreeSet<i64>>,
}

impl ModuleCone {
    fn build(k: &KnotComplex, sh: &ConeShape, spinc: i64) -> ModuleCone {
        let n = sh.n;
        let piece_list: Vec<(PieceKind, i64)> = sh
            .a_indices
            .iter()
            .map(|&s| (PieceKind::A, s))
            .chain(sh.b_indices.iter().map(|&s| (PieceKind::B, s)))
            .collect();
        let piece_pos: BTreeMap<(PieceKind, i64), usize> = piece_list
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i))
            .collect();
        let ngens = k.generator_count();
        let _ = spinc;

        let mut gens = Vec::new();
        for &(kind, s) in &piece_list {
            for (g, info) in k.generators().iter().enumerate() {
                let a_plane = k.plane_alexander(g);
                let (i0, j0) = match kind {
                    PieceKind::A => (
                        0i64.max(a_plane - s),
                        Rat::int((-1i64).max(a_plane - s)) + j_shift(s, n),
                    ),
                    PieceKind::B => (0, Rat::int(-1) + j_shift(s, n)),
                };
                let kind_ch = match kind {
                    PieceKind::A => 'A',
                    PieceKind::B => 'B',
                };
                gens.push(ModuleGen {
                    label: format!("{kind_ch}{s}:{}", info.label),
                    i0,
                    j0,
                });
            }
        }

        let mut diff: BTreeMap<(usize, usize), BTreeSet<i64>> = BTreeMap::new();
        let mut toggle = |src: usize, dst: usize, power: i64| {
            let set = diff.entry((src, dst)).or_default();
            if !set.insert(power) {
                set.remove(&power);
            }
        };
        let flip = k.flip_module_map();
        for (p, &(_, s)) in piece_list.iter().enumerate() {
            let base = p * ngens;
            for e in k.diff_entries() {
                toggle(base + e.src, base + e.dst, i64::from(e.u_power));
            }
            if piece_list[p].0 == PieceKind::A {
                if let Some(&q) = piece_pos.get(&(PieceKind::B, s)) {
                    for g in 0..ngens {
                        toggle(base + g, q * ngens + g, 0);
                    }
                }
                if let Some(&q) = piece_pos.get(&(PieceKind::B, s + n)) {
                    let flip = flip.as_ref().expect("flip checked by shape()");
                    for g in 0..ngens {
                        for &(dst, shift) in &flip[g] {
                            toggle(base + g, q * ngens + dst, s + shift);
                        }
                    }
                }
            }
        }
        diff.retain(|_, set| !set.is_empty());

        let alive = vec![true; gens.len()];
        let cone = ModuleCone { gens, alive, diff };
        debug_assert!(cone.square_is_zero());
        cone
    }

    fn square_is_zero(&self) -> bool {
        let mut acc: BTreeMap<(usize, usize, i64), bool> = BTreeMap::new();
        for (&(s, m), powers) in &self.diff {
            for (&(m2, t), powers2) in &self.diff {
                if m2 != m {
                    continue;
                }
                for &p in powers {
                    for &q in powers2 {
                        *acc.entry((s, t, p + q)).or_insert(false) ^= true;
                    }
                }
            }
        }
        acc.values().all(|&odd| !odd)
    }

    /// Cancel the lexicographically first filtration-preserving arrow until
    /// none remain.
    fn reduce(&mut self) {
        loop {
            let mut best: Option<(usize, usize, i64)> = None;
            for (&(s, t), powers) in &self.diff {
                if !self.alive[s] || !self.alive[t] || s == t {
                    continue;
                }
                for &p in powers {
                    if self.gens[s].i0 == self.gens[t].i0 - p
                        && self.gens[s].j0 == self.gens[t].j0 - Rat::int(p)
                    {
                        let cand = (&self.gens[s].label, &self.gens[t].label, p);
                        if best.is_none_or(|(bs, bt, bp)| {
                            cand < (&self.gens[bs].label, &self.gens[bt].label, bp)
                        }) {
                            best = Some((s, t, p));
                        }
                    }
                }
            }
            let Some((x, y, k)) = best else { break };

            let into_y: Vec<(usize, Vec<i64>)> = self
                .diff
                .iter()
                .filter(|(&(s, t), _)| t == y && s != x && self.alive[s])
                .map(|(&(s, _), powers)| (s, powers.iter().copied().collect()))
                .collect();
            let out_of_x: Vec<(usize, Vec<i64>)> = self
                .diff
                .iter()
                .filter(|(&(s, t), _)| s == x && t != y && self.alive[t])
                .map(|(&(_, t), powers)| (t, powers.iter().copied().collect()))
                .collect();
            for (w, wp) in &into_y {
                for (z, zp) in &out_of_x {
                    for &p in wp {
                        for &q in zp {
                            let set = self.diff.entry((*w, *z)).or_default();
                            let power = p + q - k;
                            if !set.insert(power) {
                                set.remove(&power);
                            }
                        }
                    }
                }
            }
            self.alive[x] = false;
            self.alive[y] = false;
            self.diff
                .retain(|&(s, t), set| self.alive[s] && self.alive[t] && !set.is_empty());
        }
    }

    fn find_arrow(
        &self,
        pred: impl Fn(&ModuleGen, &ModuleGen, i64) -> bool,
    ) -> Option<ArrowWitness> {
        for (&(s, t), powers) in &self.diff {
            if !self.alive[s] || !self.alive[t] {
                continue;
            }
            for &p in powers {
                if pred(&self.gens[s], &self.gens[t], p) {
                    return Some(ArrowWitness {
                        src: self.gens[s].label.clone(),
                        dst: self.gens[t].label.clone(),
                        u_power: p,
                    });
                }
            }
        }
        None
    }
}
