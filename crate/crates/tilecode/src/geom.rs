//! Metric tetrahedra in R^3 obtained by projecting lattice tetrahedra, with
//! the long/short edge structure and the rigid-motion machinery used while
//! folding a chain of them onto a point sequence.
//!
//! Every projected lattice tetrahedron has four short edges and two long
//! edges with length ratio sqrt(3)/2; consecutive members of a fold chain
//! share a long edge, around which the chain has rotational freedom.

use nalgebra::{Matrix3, Unit, Vector3};

use crate::flow::Derivative;
use crate::lattice::{project, Dim, OrderedSimplex};

const PARALLEL_EPS: f64 = 1e-9;

/// A realized edge: a pair of endpoints in angstroms.
pub type Edge = (Vector3<f64>, Vector3<f64>);

/// Proper rigid motion of R^3: rotation then translation.
#[derive(Debug, Clone, Copy)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
    // compositions since the last re-orthonormalization
    chain: u8,
}

impl RigidTransform {
    pub fn identity() -> RigidTransform {
        RigidTransform { rotation: Matrix3::identity(), translation: Vector3::zeros(), chain: 0 }
    }

    pub fn from_parts(rotation: Matrix3<f64>, translation: Vector3<f64>) -> RigidTransform {
        RigidTransform { rotation, translation, chain: 0 }
    }

    pub fn translation(v: Vector3<f64>) -> RigidTransform {
        RigidTransform { rotation: Matrix3::identity(), translation: v, chain: 0 }
    }

    /// Rotation by `rot` about the fixed point `center`.
    pub fn rotation_about(center: Vector3<f64>, rot: Matrix3<f64>) -> RigidTransform {
        RigidTransform { rotation: rot, translation: center - rot * center, chain: 0 }
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.rotation
    }

    pub fn translation_vector(&self) -> Vector3<f64> {
        self.translation
    }

    pub fn apply(&self, p: Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        let mut out = RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
            chain: self.chain.max(other.chain).saturating_add(1),
        };
        // keep drift bounded under long composition chains
        if out.chain >= 8 {
            out.rotation = reorthonormalize(&out.rotation);
            out.chain = 0;
        }
        out
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform { rotation: rt, translation: -(rt * self.translation), chain: self.chain }
    }
}

fn reorthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c0: Vector3<f64> = m.column(0).into();
    let c1: Vector3<f64> = m.column(1).into();
    let r0 = c0.normalize();
    let r2 = c0.cross(&c1).normalize();
    let r1 = r2.cross(&r0);
    Matrix3::from_columns(&[r0, r1, r2])
}

/// Minimal rotation taking `current` onto `target` (both normalized
/// internally). Parallel inputs give the identity; anti-parallel inputs
/// rotate by pi about a deterministic perpendicular axis, built from the
/// smallest-index coordinate axis least aligned with `current`.
pub fn align_rotation(current: Vector3<f64>, target: Vector3<f64>) -> Matrix3<f64> {
    let u = current.normalize();
    let w = target.normalize();
    let dot = u.dot(&w).clamp(-1.0, 1.0);
    let cross = u.cross(&w);
    let sin = cross.norm();
    if sin < PARALLEL_EPS {
        if dot > 0.0 {
            return Matrix3::identity();
        }
        // pick coordinate axis least aligned with u, smallest index on ties
        let mut axis = 0;
        for i in 1..3 {
            if u[i].abs() < u[axis].abs() {
                axis = i;
            }
        }
        let mut e = Vector3::zeros();
        e[axis] = 1.0;
        let perp = Unit::new_normalize(e - u * u.dot(&e));
        return nalgebra::Rotation3::from_axis_angle(&perp, std::f64::consts::PI).into_inner();
    }
    let axis = Unit::new_normalize(cross);
    let angle = sin.atan2(dot);
    nalgebra::Rotation3::from_axis_angle(&axis, angle).into_inner()
}

/// A lattice tetrahedron realized in R^3: projected, scaled, then moved by
/// a rigid transform. `scale` is the length of a long edge in angstroms.
#[derive(Debug, Clone, Copy)]
pub struct EmbeddedTetra {
    pub lattice: OrderedSimplex,
    pub transform: RigidTransform,
    pub scale: f64,
}

impl EmbeddedTetra {
    pub fn new(lattice: OrderedSimplex, transform: RigidTransform, scale: f64) -> EmbeddedTetra {
        assert_eq!(lattice.dim(), Dim::Four, "embedded tetrahedra are 4-lattice simplices");
        assert!(scale > 0.0);
        EmbeddedTetra { lattice, transform, scale }
    }

    /// The four vertex positions, in lattice vertex order.
    pub fn realized_vertices(&self) -> [Vector3<f64>; 4] {
        let mut out = [Vector3::zeros(); 4];
        for (slot, v) in out.iter_mut().zip(self.lattice.vertices()) {
            let p = project(&v);
            *slot = self.transform.apply(Vector3::new(p[0], p[1], p[2]) * self.scale);
        }
        out
    }

    /// The two long edges, `(vertex0, vertex2)` and `(vertex1, vertex3)`,
    /// each of length `scale`; the remaining four edges have length
    /// `scale * sqrt(3)/2`.
    pub fn long_edges(&self) -> (Edge, Edge) {
        let v = self.realized_vertices();
        ((v[0], v[2]), (v[1], v[3]))
    }

    /// Centroid of the four realized vertices.
    pub fn anchor(&self) -> Vector3<f64> {
        let v = self.realized_vertices();
        (v[0] + v[1] + v[2] + v[3]) / 4.0
    }

    fn with_lattice(&self, lattice: OrderedSimplex) -> EmbeddedTetra {
        EmbeddedTetra { lattice, ..*self }
    }
}

/// Which arm of the fold chain a tetrahedron belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Backward,
    Center,
    Forward,
}

/// The side on which the chain continues past this tetrahedron. Switch
/// steps flip it: the fold doubles back across the shared face and grows
/// off the opposite long edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heading {
    Down,
    Up,
}

impl Heading {
    fn flip(self) -> Heading {
        match self {
            Heading::Down => Heading::Up,
            Heading::Up => Heading::Down,
        }
    }
}

/// Branch choice when extending the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Same,
    Switch,
}

/// One tetrahedron of a fold chain.
#[derive(Debug, Clone, Copy)]
pub struct FoldState {
    pub tetra: EmbeddedTetra,
    pub derivative: Derivative,
    pub arm: Arm,
    pub heading: Heading,
}

impl FoldState {
    /// The long edge this state chains across in its direction of travel:
    /// `(vertex1, vertex3)` when heading down, `(vertex0, vertex2)` when
    /// heading up. For freshly placed center/forward states that is the
    /// forward edge, for backward states the backward edge.
    pub fn bold_edge(&self) -> Edge {
        let (back, fwd) = self.tetra.long_edges();
        match self.heading {
            Heading::Down => fwd,
            Heading::Up => back,
        }
    }

    fn continuations(&self, heading: Heading) -> (OrderedSimplex, OrderedSimplex) {
        match heading {
            Heading::Down => self.tetra.lattice.forward_successors(),
            Heading::Up => self.tetra.lattice.backward_predecessors(),
        }
    }

    /// The lattice side a step in the given chain direction extends on.
    /// Stepping against a state's own arm walks back toward the center.
    fn chain_side(&self, toward_forward: bool) -> Heading {
        match self.arm {
            Arm::Center => {
                if toward_forward {
                    Heading::Down
                } else {
                    Heading::Up
                }
            }
            Arm::Forward => {
                if toward_forward {
                    self.heading
                } else {
                    self.heading.flip()
                }
            }
            Arm::Backward => {
                if toward_forward {
                    self.heading.flip()
                } else {
                    self.heading
                }
            }
        }
    }

    fn extend(&self, heading: Heading, branch: Branch, arm: Arm) -> FoldState {
        let (same, switch) = self.continuations(heading);
        let (lattice, derivative, heading) = match branch {
            Branch::Same => (same, self.derivative, heading),
            Branch::Switch => (switch, self.derivative.flip(), heading.flip()),
        };
        FoldState { tetra: self.tetra.with_lattice(lattice), derivative, arm, heading }
    }

    /// Lattice-rigid attachment of the next chain member toward the forward
    /// end. Both branches realize the same four points (they share this
    /// tetrahedron's far face, including the full bold edge); they differ
    /// in gradient, derivative, and where the chain grows afterwards.
    pub fn place_successor(&self, branch: Branch) -> FoldState {
        self.extend(self.chain_side(true), branch, Arm::Forward)
    }

    /// Mirror contract of [`Self::place_successor`] toward the backward end.
    pub fn place_predecessor(&self, branch: Branch) -> FoldState {
        self.extend(self.chain_side(false), branch, Arm::Backward)
    }

    /// Continue one more step outward keeping the gradient; the hypothetical
    /// next tetrahedron used when judging a branch against a target.
    pub fn lookahead(&self) -> FoldState {
        let toward_forward = self.arm != Arm::Backward;
        let arm = if toward_forward { Arm::Forward } else { Arm::Backward };
        self.extend(self.chain_side(toward_forward), Branch::Same, arm)
    }

    /// Direction of travel: the projected main diagonal `vertex0 ->
    /// vertex3`, reversed when heading up. The local trajectory leaves a
    /// tetrahedron through the face opposite `vertex0`, so this diagonal
    /// points from the entry side to the exit side. Aligning the chaining
    /// long edge instead would make every outward branch comparison
    /// degenerate: the two candidate continuations mirror across a plane
    /// perpendicular to that edge, so a target along it could never prefer
    /// one side.
    pub fn travel_direction(&self) -> Vector3<f64> {
        let v = self.tetra.realized_vertices();
        match self.heading {
            Heading::Down => (v[3] - v[0]).normalize(),
            Heading::Up => (v[0] - v[3]).normalize(),
        }
    }

    /// Apply an extra rigid motion on top of the current placement.
    pub fn moved_by(&self, extra: &RigidTransform) -> FoldState {
        let tetra = EmbeddedTetra {
            lattice: self.tetra.lattice,
            transform: extra.compose(&self.tetra.transform),
            scale: self.tetra.scale,
        };
        FoldState { tetra, ..*self }
    }
}

/// Wavefront OBJ text for a list of embedded tetrahedra, one group per
/// tetrahedron, coordinates with 6 decimals.
pub fn export_obj(tetras: &[EmbeddedTetra]) -> String {
    let mut out = String::new();
    for (i, t) in tetras.iter().enumerate() {
        out.push_str(&format!("g tetra_{}\n", i));
        for v in t.realized_vertices() {
            out.push_str(&format!("v {:.6} {:.6} {:.6}\n", v.x, v.y, v.z));
        }
        let b = (i * 4) as u32;
        for f in [[1u32, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]] {
            out.push_str(&format!("f {} {} {}\n", b + f[0], b + f[1], b + f[2]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Dim, Monomial};
    use approx::assert_abs_diff_eq;

    fn tetra(base: [i64; 4], axes: &[usize]) -> EmbeddedTetra {
        let lattice = OrderedSimplex::new(Monomial::new(Dim::Four, &base), axes);
        EmbeddedTetra::new(lattice, RigidTransform::identity(), 1.0)
    }

    fn edge_lengths(t: &EmbeddedTetra) -> Vec<f64> {
        let v = t.realized_vertices();
        let mut out = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                out.push((v[i] - v[j]).norm());
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn edge_spectrum_is_four_short_two_long() {
        let t = tetra([0, 0, 0, 0], &[0, 1, 2]);
        let lens = edge_lengths(&t);
        let short = (3.0f64).sqrt() / 2.0;
        for l in &lens[..4] {
            assert_abs_diff_eq!(*l, short, epsilon = 1e-12);
        }
        for l in &lens[4..] {
            assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn long_edges_are_vertex_pairs_02_and_13() {
        let t = tetra([1, -2, 0, 3], &[2, 0, 3]);
        let v = t.realized_vertices();
        let ((a0, a1), (b0, b1)) = t.long_edges();
        assert_abs_diff_eq!((a0 - v[0]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((a1 - v[2]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((b0 - v[1]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((b1 - v[3]).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((a0 - a1).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!((b0 - b1).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn scale_and_translation_behave_rigidly() {
        let t = tetra([0, 0, 0, 0], &[0, 1, 2]);
        let scaled = EmbeddedTetra { scale: 3.8, ..t };
        for (a, b) in edge_lengths(&t).iter().zip(edge_lengths(&scaled)) {
            assert_abs_diff_eq!(a * 3.8, b, epsilon = 1e-12);
        }
        let shift = Vector3::new(1.0, -2.0, 0.5);
        let moved = EmbeddedTetra {
            transform: RigidTransform::translation(shift).compose(&t.transform),
            ..t
        };
        assert_abs_diff_eq!((moved.anchor() - t.anchor() - shift).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn anchor_is_vertex_centroid_and_rotation_fixed_point() {
        let t = tetra([0, 0, 0, 0], &[0, 1, 2]);
        let v = t.realized_vertices();
        let c = (v[0] + v[1] + v[2] + v[3]) / 4.0;
        assert_abs_diff_eq!((t.anchor() - c).norm(), 0.0, epsilon = 1e-15);

        let rot = align_rotation(Vector3::x(), Vector3::new(0.3, 0.4, -0.2));
        let spun = EmbeddedTetra {
            transform: RigidTransform::rotation_about(t.anchor(), rot).compose(&t.transform),
            ..t
        };
        assert_abs_diff_eq!((spun.anchor() - t.anchor()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn align_rotation_basics() {
        let v = Vector3::new(0.2, -0.7, 0.4);
        let id = align_rotation(v, v);
        assert_abs_diff_eq!((id - Matrix3::identity()).norm(), 0.0, epsilon = 1e-12);

        // x to y is a quarter turn about z
        let r = align_rotation(Vector3::x(), Vector3::y());
        let want =
            nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2)
                .into_inner();
        assert_abs_diff_eq!((r - want).norm(), 0.0, epsilon = 1e-12);

        // anti-parallel resolves deterministically and still maps u to -u
        let u = Vector3::new(0.0, 1.0, 0.0);
        let r = align_rotation(u, -u);
        assert_abs_diff_eq!((r * u + u).norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn align_rotation_random_pairs() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let u = Vector3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
            .normalize();
            let w = Vector3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
            .normalize();
            let r = align_rotation(u, w);
            assert_abs_diff_eq!((r * u - w).norm(), 0.0, epsilon = 1e-9);
            let trace = r.trace();
            let angle = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
            assert_abs_diff_eq!(angle, u.dot(&w).clamp(-1.0, 1.0).acos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn successor_placement_shares_face_and_bold_edge() {
        let lattice = OrderedSimplex::new(Monomial::new(Dim::Four, &[0, 0, 0, 0]), &[0, 3, 1]);
        let state = FoldState {
            tetra: EmbeddedTetra::new(lattice, RigidTransform::identity(), 1.0),
            derivative: Derivative::D,
            arm: Arm::Center,
            heading: Heading::Down,
        };
        let v = state.tetra.realized_vertices();
        for branch in [Branch::Same, Branch::Switch] {
            let next = state.place_successor(branch);
            let nv = next.tetra.realized_vertices();
            let mut shared = 0;
            for p in &nv {
                if v.iter().any(|q| (p - q).norm() < 1e-12) {
                    shared += 1;
                }
            }
            assert_eq!(shared, 3);
            // full bold edge (vertex1, vertex3) present exactly
            for e in [v[1], v[3]] {
                assert!(nv.iter().any(|q| (e - q).norm() < 1e-12));
            }
        }
        // both branches realize the same point set
        let a = state.place_successor(Branch::Same).tetra.realized_vertices();
        let b = state.place_successor(Branch::Switch).tetra.realized_vertices();
        for p in &a {
            assert!(b.iter().any(|q| (p - q).norm() < 1e-12));
        }
    }

    #[test]
    fn predecessor_placement_mirrors_successor() {
        let lattice = OrderedSimplex::new(Monomial::new(Dim::Four, &[2, 0, -1, 1]), &[1, 2, 3]);
        let state = FoldState {
            tetra: EmbeddedTetra::new(lattice, RigidTransform::identity(), 2.5),
            derivative: Derivative::D,
            arm: Arm::Center,
            heading: Heading::Down,
        };
        let v = state.tetra.realized_vertices();
        for branch in [Branch::Same, Branch::Switch] {
            let prev = state.place_predecessor(branch);
            let pv = prev.tetra.realized_vertices();
            for e in [v[0], v[2]] {
                assert!(pv.iter().any(|q| (e - q).norm() < 1e-10));
            }
            assert_eq!(prev.derivative == state.derivative, branch == Branch::Same);
        }
        // same-branch round trip reproduces the realized vertices
        let back = state.place_predecessor(Branch::Same);
        let again = back.place_successor(Branch::Same);
        let rv = again.tetra.realized_vertices();
        for (p, q) in rv.iter().zip(&v) {
            assert_abs_diff_eq!((p - q).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_about_shared_edge_preserves_it() {
        let lattice = OrderedSimplex::new(Monomial::new(Dim::Four, &[0, 0, 0, 0]), &[0, 3, 1]);
        let state = FoldState {
            tetra: EmbeddedTetra::new(lattice, RigidTransform::identity(), 1.0),
            derivative: Derivative::D,
            arm: Arm::Center,
            heading: Heading::Down,
        };
        let (a, b) = state.bold_edge();
        let axis = Unit::new_normalize(b - a);
        for angle in [0.3, 1.2, 2.9] {
            let rot = nalgebra::Rotation3::from_axis_angle(&axis, angle).into_inner();
            let spun = state.moved_by(&RigidTransform::rotation_about(a, rot));
            let (a2, b2) = spun.bold_edge();
            assert_abs_diff_eq!((a2 - a).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((b2 - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn placement_commutes_with_global_motion() {
        let lattice = OrderedSimplex::new(Monomial::new(Dim::Four, &[0, 1, 0, -1]), &[2, 0, 3]);
        let state = FoldState {
            tetra: EmbeddedTetra::new(lattice, RigidTransform::identity(), 3.8),
            derivative: Derivative::U,
            arm: Arm::Center,
            heading: Heading::Down,
        };
        let rot = align_rotation(Vector3::x(), Vector3::new(0.1, 0.9, -0.4));
        let global = RigidTransform::from_parts(rot, Vector3::new(5.0, -1.0, 2.0));
        for branch in [Branch::Same, Branch::Switch] {
            let a = state.place_successor(branch).moved_by(&global);
            let b = state.moved_by(&global).place_successor(branch);
            let av = a.tetra.realized_vertices();
            let bv = b.tetra.realized_vertices();
            for (p, q) in av.iter().zip(&bv) {
                assert_abs_diff_eq!((p - q).norm(), 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn long_composition_chains_stay_orthonormal() {
        let mut t = RigidTransform::identity();
        let mut rng_angle = 0.37f64;
        for _ in 0..200 {
            rng_angle = (rng_angle * 7.13).fract() * std::f64::consts::TAU;
            let axis = Unit::new_normalize(Vector3::new(rng_angle.sin(), rng_angle.cos(), 0.4));
            let rot = nalgebra::Rotation3::from_axis_angle(&axis, rng_angle).into_inner();
            t = RigidTransform::from_parts(rot, Vector3::new(0.1, -0.2, 0.3)).compose(&t);
        }
        let r = t.rotation_matrix();
        let gram = r.transpose() * r;
        assert_abs_diff_eq!((gram - Matrix3::identity()).norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn obj_export_counts() {
        let t = tetra([0, 0, 0, 0], &[0, 1, 2]);
        let obj = export_obj(&[t, t]);
        assert_eq!(obj.matches("g tetra_").count(), 2);
        assert_eq!(obj.matches("\nv ").count() + obj.starts_with("v ") as usize, 8);
        assert_eq!(obj.matches("\nf ").count(), 8);
    }
}
