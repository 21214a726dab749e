//! Five-tile codes for local backbone structure.
//!
//! A 5-residue fragment of a Cα trace is approximated by a chain of five
//! tetrahedra T[-2]..T[2] grown outward from the middle residue, translating
//! and rotating each arm as it goes to absorb irregularity. The derivative
//! bit of each tetrahedron flips exactly when its gradient differs from its
//! neighbor toward the center; the five bits compress to one character.

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::flow::Derivative;
use crate::geom::{align_rotation, Arm, Branch, EmbeddedTetra, FoldState, Heading, RigidTransform};
use crate::lattice::{Dim, Gradient, Monomial, OrderedSimplex};

const TIE_EPS: f64 = 1e-9;
const DEGENERATE_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EncodeError {
    /// Coincident consecutive positions, or a zero-length alignment
    /// direction while orienting an arm.
    #[error("degenerate fragment: {0}")]
    DegenerateFragment(String),
}

/// Five consecutive Cα positions, ordered AA[-2], AA[-1], AA[0], AA[1], AA[2].
#[derive(Debug, Clone, Copy)]
pub struct Fragment {
    positions: [Vector3<f64>; 5],
}

impl Fragment {
    pub fn new(positions: [Vector3<f64>; 5]) -> Result<Fragment, EncodeError> {
        for p in &positions {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(EncodeError::DegenerateFragment("non-finite coordinate".into()));
            }
        }
        for w in positions.windows(2) {
            if (w[1] - w[0]).norm() < DEGENERATE_EPS {
                return Err(EncodeError::DegenerateFragment(
                    "coincident consecutive positions".into(),
                ));
            }
        }
        Ok(Fragment { positions })
    }

    /// Position of AA[k] for k in -2..=2.
    pub fn aa(&self, k: i32) -> Vector3<f64> {
        self.positions[(k + 2) as usize]
    }
}

/// One 5-tile code: bits C1..C5 with the derived Y value and letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileCode {
    pub bits: [Derivative; 5],
}

impl TileCode {
    /// Y = 16 C1' + 8 C2' + 4 C3' + 2 C4' + C5' with U = 1, D = 0.
    pub fn y(&self) -> u8 {
        self.bits.iter().fold(0u8, |acc, b| (acc << 1) | u8::from(*b == Derivative::U))
    }

    pub fn letter(&self) -> char {
        letter(&self.bits)
    }

    pub fn bits_string(&self) -> String {
        self.bits.iter().map(|b| b.to_char()).collect()
    }

    pub fn from_bits_str(s: &str) -> Option<TileCode> {
        let v: Option<Vec<Derivative>> = s.chars().map(Derivative::from_char).collect();
        let v = v?;
        let bits: [Derivative; 5] = v.try_into().ok()?;
        Some(TileCode { bits })
    }
}

/// One-letter representation: the digit Y when Y < 10, otherwise the
/// (Y - 9)-th uppercase letter.
pub fn letter(bits: &[Derivative; 5]) -> char {
    let y = TileCode { bits: *bits }.y();
    if y < 10 {
        (b'0' + y) as char
    } else {
        (b'A' + (y - 10)) as char
    }
}

/// Encoder parameters.
#[derive(Debug, Clone)]
pub struct EncoderConfig {
    /// Long-edge length in angstroms.
    pub scale: f64,
    /// Ordered axes of the center tetrahedron's lattice simplex (0-based).
    /// The default realizes gradient x1x2x4 with the backward switch
    /// reaching x1x2x3 and the forward switch x2x3x4.
    pub initial_axes: [usize; 3],
    /// Branch returned when a candidate comparison ties within 1e-9.
    pub tie_break: Branch,
}

impl Default for EncoderConfig {
    fn default() -> EncoderConfig {
        EncoderConfig { scale: 3.8, initial_axes: [0, 3, 1], tie_break: Branch::Same }
    }
}

/// Which way a branch choice extends the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSide {
    Forward,
    Backward,
}

/// Pick the branch whose hypothetical next tetrahedron lands nearer to
/// `target`. Both candidates occupy the same position; the choice swings
/// the tetrahedron after them.
pub fn choose_branch(
    state: &FoldState,
    side: ChainSide,
    target: Vector3<f64>,
    tie_break: Branch,
) -> Branch {
    let place = |b: Branch| match side {
        ChainSide::Forward => state.place_successor(b),
        ChainSide::Backward => state.place_predecessor(b),
    };
    let dist = |b: Branch| (place(b).lookahead().tetra.anchor() - target).norm();
    let d_same = dist(Branch::Same);
    let d_switch = dist(Branch::Switch);
    if (d_same - d_switch).abs() <= TIE_EPS {
        tie_break
    } else if d_switch < d_same {
        Branch::Switch
    } else {
        Branch::Same
    }
}

/// Result of encoding one fragment: the code plus the gradient letters of
/// T[-2]..T[2].
#[derive(Debug, Clone, Copy)]
pub struct FragmentCode {
    pub code: TileCode,
    pub gradients: [Gradient; 5],
}

impl FragmentCode {
    pub fn gradient_letters(&self) -> String {
        self.gradients.iter().map(|g| g.letter().unwrap_or('?')).collect()
    }
}

fn unit_toward(
    from: Vector3<f64>,
    to: Vector3<f64>,
    what: &str,
) -> Result<Vector3<f64>, EncodeError> {
    let d = to - from;
    let n = d.norm();
    if n < DEGENERATE_EPS {
        return Err(EncodeError::DegenerateFragment(format!("zero-length {what} direction")));
    }
    Ok(d / n)
}

/// Orient and anchor the center tetrahedron T[0] from the fragment alone:
/// centroid at AA[0], travel diagonal along AA[-1] -> AA[1], and the
/// backward long edge turned into the plane of that diagonal and
/// AA[0] -> AA[1]. Built from relative directions only, so codes are
/// rigid-motion invariant.
fn center_state(f: &Fragment, cfg: &EncoderConfig) -> Result<FoldState, EncodeError> {
    let lattice = OrderedSimplex::new(Monomial::one(Dim::Four), &cfg.initial_axes);
    let flat = EmbeddedTetra::new(lattice, RigidTransform::identity(), cfg.scale);
    let v = flat.realized_vertices();

    let travel = (v[3] - v[0]).normalize();
    let u = unit_toward(f.aa(-1), f.aa(1), "AA[-1] to AA[1]")?;
    let r1 = align_rotation(travel, u);

    // Deterministic completion about the travel axis.
    let other = r1 * (v[2] - v[0]);
    let w = f.aa(1) - f.aa(0);
    let v_perp = other - u * u.dot(&other);
    let mut w_perp = w - u * u.dot(&w);
    if w_perp.norm() < DEGENERATE_EPS {
        // fragment nearly collinear: fall back to the coordinate axis least
        // aligned with the travel direction
        let mut axis = 0;
        for i in 1..3 {
            if u[i].abs() < u[axis].abs() {
                axis = i;
            }
        }
        let mut e = Vector3::zeros();
        e[axis] = 1.0;
        w_perp = e - u * u.dot(&e);
    }
    let angle = u.dot(&v_perp.cross(&w_perp)).atan2(v_perp.dot(&w_perp));
    let r2 =
        nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(u), angle).into_inner();

    let rot = r2 * r1;
    let anchor0 = flat.anchor();
    let transform = RigidTransform::from_parts(rot, f.aa(0) - rot * anchor0);
    Ok(FoldState {
        tetra: EmbeddedTetra::new(lattice, transform, cfg.scale),
        derivative: Derivative::D,
        arm: Arm::Center,
        heading: Heading::Down,
    })
}

/// Grow one arm of the chain from the center state and return the two outer
/// fold states (inner = T[±1], outer = T[±2]).
fn grow_arm(
    center: &FoldState,
    f: &Fragment,
    cfg: &EncoderConfig,
    side: ChainSide,
) -> Result<(FoldState, FoldState), EncodeError> {
    let (near, far) = match side {
        ChainSide::Forward => (f.aa(1), f.aa(2)),
        ChainSide::Backward => (f.aa(-1), f.aa(-2)),
    };
    let place = |s: &FoldState, b: Branch| match side {
        ChainSide::Forward => s.place_successor(b),
        ChainSide::Backward => s.place_predecessor(b),
    };

    // assign gradient to T[±1] by where the tetrahedron after it would land
    let branch = choose_branch(center, side, far, cfg.tie_break);
    let mut inner = place(center, branch);

    // translate T[±1] onto AA[±1]
    inner = inner.moved_by(&RigidTransform::translation(near - inner.tetra.anchor()));

    // rotate T[±1] so its travel diagonal runs parallel to AA[0] -> AA[±2]
    let target_dir = unit_toward(f.aa(0), far, "AA[0] to AA[+-2]")?;
    let rot = align_rotation(inner.travel_direction(), target_dir);
    inner = inner.moved_by(&RigidTransform::rotation_about(inner.tetra.anchor(), rot));

    // assign gradient to T[±2], then translate it onto AA[±2]
    let branch2 = choose_branch(&inner, side, far, cfg.tie_break);
    let mut outer = place(&inner, branch2);
    outer = outer.moved_by(&RigidTransform::translation(far - outer.tetra.anchor()));

    Ok((inner, outer))
}

/// Encode one fragment into its 5-tile code.
pub fn encode_fragment(f: &Fragment, cfg: &EncoderConfig) -> Result<FragmentCode, EncodeError> {
    let center = center_state(f, cfg)?;
    let (fwd1, fwd2) = grow_arm(&center, f, cfg, ChainSide::Forward)?;
    let (bwd1, bwd2) = grow_arm(&center, f, cfg, ChainSide::Backward)?;

    let states = [&bwd2, &bwd1, &center, &fwd1, &fwd2];
    let bits: [Derivative; 5] = states.map(|s| s.derivative);
    let gradients: [Gradient; 5] = states.map(|s| s.tetra.lattice.gradient());
    Ok(FragmentCode { code: TileCode { bits }, gradients })
}

/// The five placed tetrahedra T[-2]..T[2] of a fragment, for export.
pub fn fold_fragment(f: &Fragment, cfg: &EncoderConfig) -> Result<[EmbeddedTetra; 5], EncodeError> {
    let center = center_state(f, cfg)?;
    let (fwd1, fwd2) = grow_arm(&center, f, cfg, ChainSide::Forward)?;
    let (bwd1, bwd2) = grow_arm(&center, f, cfg, ChainSide::Backward)?;
    Ok([bwd2.tetra, bwd1.tetra, center.tetra, fwd1.tetra, fwd2.tetra])
}

/// A chain's residues and the break flags between consecutive residues.
#[derive(Debug, Clone, Default)]
pub struct ChainSites {
    pub residues: Vec<(char, Vector3<f64>)>,
    /// `gap_after[i]` marks a break between residues `i` and `i + 1`.
    pub gap_after: Vec<bool>,
}

impl ChainSites {
    pub fn new(residues: Vec<(char, Vector3<f64>)>, gap_after: Vec<bool>) -> ChainSites {
        assert_eq!(gap_after.len(), residues.len().saturating_sub(1));
        ChainSites { residues, gap_after }
    }
}

/// Per-residue encoder output record.
#[derive(Debug, Clone, Serialize)]
pub struct ResidueRecord {
    pub index: usize,
    pub aa: char,
    pub letter: char,
    pub padded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradients: Option<String>,
}

/// Whole-chain encoder output.
#[derive(Debug, Clone)]
pub struct ChainCode {
    /// One character per residue; '.' where no full window exists.
    pub code: String,
    pub records: Vec<ResidueRecord>,
    pub warnings: Vec<String>,
}

/// Encode every residue of a chain. Residues lacking a full 5-residue
/// window within their contiguous segment (the first two and last two of
/// each segment) emit '.'; degenerate windows emit '.' plus a warning.
pub fn encode_chain(sites: &ChainSites, cfg: &EncoderConfig) -> ChainCode {
    let n = sites.residues.len();
    let mut records = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    let mut code = String::with_capacity(n);

    // contiguous segments, split at gap flags
    let mut segments = Vec::new();
    let mut start = 0usize;
    for i in 0..n.saturating_sub(1) {
        if sites.gap_after[i] {
            segments.push((start, i + 1));
            start = i + 1;
        }
    }
    if n > 0 {
        segments.push((start, n));
    }

    let mut seg_iter = segments.iter().copied().peekable();
    for idx in 0..n {
        while let Some(&(_, end)) = seg_iter.peek() {
            if idx < end {
                break;
            }
            seg_iter.next();
        }
        let (seg_start, seg_end) = *seg_iter.peek().expect("every residue is in a segment");
        let aa = sites.residues[idx].0;
        let interior = idx >= seg_start + 2 && idx + 2 < seg_end;
        let record = if interior {
            let window: [Vector3<f64>; 5] = std::array::from_fn(|j| sites.residues[idx - 2 + j].1);
            match Fragment::new(window).and_then(|f| encode_fragment(&f, cfg)) {
                Ok(fc) => ResidueRecord {
                    index: idx,
                    aa,
                    letter: fc.code.letter(),
                    padded: false,
                    bits: Some(fc.code.bits_string()),
                    gradients: Some(fc.gradient_letters()),
                },
                Err(e) => {
                    warnings.push(format!("residue {}: {}", idx, e));
                    ResidueRecord {
                        index: idx,
                        aa,
                        letter: '.',
                        padded: true,
                        bits: None,
                        gradients: None,
                    }
                }
            }
        } else {
            ResidueRecord { index: idx, aa, letter: '.', padded: true, bits: None, gradients: None }
        };
        code.push(record.letter);
        records.push(record);
    }

    ChainCode { code, records, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_point(rng: &mut ChaCha8Rng, spread: f64) -> Vector3<f64> {
        Vector3::new(
            (rng.random::<f64>() - 0.5) * spread,
            (rng.random::<f64>() - 0.5) * spread,
            (rng.random::<f64>() - 0.5) * spread,
        )
    }

    fn rand_fragment(rng: &mut ChaCha8Rng) -> Fragment {
        // random walk with realistic virtual-bond steps
        let mut p = rand_point(rng, 10.0);
        let mut pos = [Vector3::zeros(); 5];
        for slot in pos.iter_mut() {
            *slot = p;
            let step = rand_point(rng, 2.0).normalize() * 3.8;
            p += step;
        }
        Fragment::new(pos).unwrap()
    }

    /// Analytic alpha-helix trace: rise per residue and rotation per residue
    /// around the z axis.
    pub(crate) fn helix_points(count: usize) -> Vec<Vector3<f64>> {
        let radius = 2.3;
        let rise = 1.5;
        let step = 100.0f64.to_radians();
        (0..count)
            .map(|k| {
                let t = k as f64 * step;
                Vector3::new(radius * t.cos(), radius * t.sin(), rise * k as f64)
            })
            .collect()
    }

    #[test]
    fn letter_table_spot_values() {
        let bits = |s: &str| TileCode::from_bits_str(s).unwrap();
        assert_eq!(bits("DDDUU").letter(), '3');
        assert_eq!(bits("DUDUD").letter(), 'A');
        assert_eq!(bits("DDDDD").letter(), '0');
        assert_eq!(bits("UUUUU").letter(), 'V');
        assert_eq!(bits("DUDUD").y(), 10);
        assert_eq!(bits("UUUUU").y(), 31);
    }

    #[test]
    fn letter_matches_independent_bit_arithmetic() {
        for y in 0u8..32 {
            let bits: [Derivative; 5] = std::array::from_fn(|i| {
                if y >> (4 - i) & 1 == 1 {
                    Derivative::U
                } else {
                    Derivative::D
                }
            });
            let code = TileCode { bits };
            assert_eq!(code.y(), y);
            let want = if y < 10 { (b'0' + y) as char } else { (b'A' + y - 10) as char };
            assert_eq!(code.letter(), want);
        }
    }

    #[test]
    fn center_bit_is_always_down() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = EncoderConfig::default();
        for _ in 0..200 {
            let f = rand_fragment(&mut rng);
            let fc = encode_fragment(&f, &cfg).unwrap();
            assert_eq!(fc.code.bits[2], Derivative::D);
        }
    }

    #[test]
    fn codes_are_rigid_motion_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = EncoderConfig::default();
        for _ in 0..50 {
            let f = rand_fragment(&mut rng);
            let fc = encode_fragment(&f, &cfg).unwrap();
            for _ in 0..4 {
                let rot = align_rotation(
                    rand_point(&mut rng, 1.0).normalize(),
                    rand_point(&mut rng, 1.0).normalize(),
                );
                let shift = rand_point(&mut rng, 30.0);
                let moved: [Vector3<f64>; 5] =
                    std::array::from_fn(|i| rot * f.aa(i as i32 - 2) + shift);
                let fc2 = encode_fragment(&Fragment::new(moved).unwrap(), &cfg).unwrap();
                assert_eq!(fc.code, fc2.code);
                assert_eq!(fc.gradients, fc2.gradients);
            }
        }
    }

    #[test]
    fn codes_are_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cfg = EncoderConfig::default();
        for _ in 0..50 {
            let f = rand_fragment(&mut rng);
            let fc = encode_fragment(&f, &cfg).unwrap();
            let factor = 2.5;
            let scaled: [Vector3<f64>; 5] = std::array::from_fn(|i| f.aa(i as i32 - 2) * factor);
            let cfg2 = EncoderConfig { scale: cfg.scale * factor, ..cfg.clone() };
            let fc2 = encode_fragment(&Fragment::new(scaled).unwrap(), &cfg2).unwrap();
            assert_eq!(fc.code, fc2.code);
        }
    }

    #[test]
    fn flip_rule_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cfg = EncoderConfig::default();
        for _ in 0..100 {
            let fc = encode_fragment(&rand_fragment(&mut rng), &cfg).unwrap();
            // center-outward: bit flips exactly when the gradient changes
            for (a, b) in [(2usize, 3usize), (3, 4), (2, 1), (1, 0)] {
                let flipped = fc.code.bits[a] != fc.code.bits[b];
                let changed = fc.gradients[a] != fc.gradients[b];
                assert_eq!(flipped, changed);
            }
        }
    }

    #[test]
    fn ideal_helix_interior_is_constant() {
        let pts = helix_points(20);
        let cfg = EncoderConfig::default();
        let mut letters = Vec::new();
        for mid in 2..18 {
            let window: [Vector3<f64>; 5] = std::array::from_fn(|j| pts[mid - 2 + j]);
            let fc = encode_fragment(&Fragment::new(window).unwrap(), &cfg).unwrap();
            letters.push(fc.code.letter());
        }
        assert!(letters.windows(2).all(|w| w[0] == w[1]), "letters: {:?}", letters);
    }

    #[test]
    fn degenerate_fragments_are_rejected() {
        let p = Vector3::new(0.0, 0.0, 0.0);
        let q = Vector3::new(3.8, 0.0, 0.0);
        assert!(Fragment::new([p, p, q, q * 2.0, q * 3.0]).is_err());
        assert!(Fragment::new([p, q, q * 2.0, q * 3.0, Vector3::new(f64::NAN, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn tie_break_is_returned_on_symmetric_targets() {
        // A target equidistant from both lookahead anchors must fall back to
        // the configured branch.
        let cfg = EncoderConfig::default();
        let f = Fragment::new([
            Vector3::new(-7.6, 0.0, 0.0),
            Vector3::new(-3.8, 0.0, 0.0),
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(3.8, 0.0, 0.0),
            Vector3::new(7.6, 0.0, 0.0),
        ])
        .unwrap();
        let center = center_state(&f, &cfg).unwrap();
        let a = center.place_successor(Branch::Same).lookahead().tetra.anchor();
        let b = center.place_successor(Branch::Switch).lookahead().tetra.anchor();
        let target = (a + b) / 2.0;
        assert_eq!(choose_branch(&center, ChainSide::Forward, target, Branch::Same), Branch::Same);
        assert_eq!(
            choose_branch(&center, ChainSide::Forward, target, Branch::Switch),
            Branch::Switch
        );
    }

    #[test]
    fn lookahead_options_share_the_bold_edge() {
        // The two hypothetical next tetrahedra hinge on the candidate's bold
        // edge: congruent placements joined along that edge.
        let cfg = EncoderConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let f = rand_fragment(&mut rng);
        let center = center_state(&f, &cfg).unwrap();
        let same = center.place_successor(Branch::Same);
        let switch = center.place_successor(Branch::Switch);
        let la_same = same.lookahead().tetra.realized_vertices();
        let la_switch = switch.lookahead().tetra.realized_vertices();
        let (e0, e1) = same.bold_edge();
        let (f0, f1) = switch.bold_edge();
        for e in [e0, e1] {
            assert!(la_same.iter().any(|p| (p - e).norm() < 1e-9));
        }
        for e in [f0, f1] {
            assert!(la_switch.iter().any(|p| (p - e).norm() < 1e-9));
        }
        // distinct placements
        let coincide = la_same.iter().all(|p| la_switch.iter().any(|q| (p - q).norm() < 1e-9));
        assert!(!coincide);
    }

    #[test]
    fn chain_padding_and_gaps() {
        let pts = helix_points(12);
        let residues: Vec<(char, Vector3<f64>)> = pts.iter().map(|p| ('A', *p)).collect();

        // no gaps: two dots each end
        let sites = ChainSites::new(residues.clone(), vec![false; 11]);
        let out = encode_chain(&sites, &EncoderConfig::default());
        assert_eq!(out.code.len(), 12);
        assert!(out.code.starts_with(".."));
        assert!(out.code.ends_with(".."));
        assert!(!out.code[2..10].contains('.'));

        // a gap after residue 5 pads positions 4..=7
        let mut gaps = vec![false; 11];
        gaps[5] = true;
        let sites = ChainSites::new(residues, gaps);
        let out = encode_chain(&sites, &EncoderConfig::default());
        for i in [4, 5, 6, 7] {
            assert_eq!(out.code.as_bytes()[i], b'.', "code: {}", out.code);
        }
        assert_ne!(out.code.as_bytes()[3], b'.');
        assert_ne!(out.code.as_bytes()[8], b'.');
    }

    #[test]
    fn short_chain_is_all_dots() {
        let pts = helix_points(4);
        let sites = ChainSites::new(pts.iter().map(|p| ('G', *p)).collect(), vec![false; 3]);
        let out = encode_chain(&sites, &EncoderConfig::default());
        assert_eq!(out.code, "....");
    }
}
