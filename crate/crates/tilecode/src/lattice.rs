//! Integer-lattice model of slant and flat simplices.
//!
//! Points of `Z^n` (n = 3 or 4) are written multiplicatively: the exponent
//! vector `(l, m, n)` stands for the monomial `x1^l x2^m x3^n`. A slant
//! simplex is the convex hull of a chain of lattice points obtained from a
//! base point by multiplying one axis variable at a time, each axis used at
//! most once. Projecting along the all-ones direction maps every slant
//! simplex onto a flat simplex in the hyperplane `x1 + ... + xn = 0`; the
//! flat simplices tile that hyperplane.
//!
//! The fiber of the projection over one flat simplex contains exactly one
//! slant simplex per gradient value and diagonal level. Walking a trajectory
//! across the tiling is governed by the successor/predecessor rules below:
//! from a slant simplex there are exactly two admissible continuations over
//! the adjacent tile on each side, one keeping the gradient and one swapping
//! a single axis for the missing one.

use std::collections::HashSet;
use std::fmt;

/// Ambient dimension; the whole crate supports exactly these two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Three,
    Four,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::Three => 3,
            Dim::Four => 4,
        }
    }

    /// Simplex order (vertex count minus one) for this dimension.
    pub fn k(self) -> usize {
        self.n() - 1
    }

    pub fn from_n(n: usize) -> Option<Dim> {
        match n {
            3 => Some(Dim::Three),
            4 => Some(Dim::Four),
            _ => None,
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n())
    }
}

/// Lattice point of `Z^n`, stored as signed exponents.
///
/// The unused fourth slot is zero when `dim` is [`Dim::Three`], so derived
/// equality and hashing are sound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    dim: Dim,
    exps: [i64; 4],
}

impl Monomial {
    pub fn new(dim: Dim, exps: &[i64]) -> Monomial {
        assert_eq!(exps.len(), dim.n(), "exponent count must match dimension");
        let mut e = [0i64; 4];
        e[..exps.len()].copy_from_slice(exps);
        Monomial { dim, exps: e }
    }

    /// The monomial `1`, i.e. the origin.
    pub fn one(dim: Dim) -> Monomial {
        Monomial { dim, exps: [0; 4] }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps[..self.dim.n()]
    }

    /// Multiply by `x_axis` (0-based axis).
    pub fn mul_axis(&self, axis: usize) -> Monomial {
        assert!(axis < self.dim.n());
        let mut m = *self;
        m.exps[axis] += 1;
        m
    }

    /// Divide by `x_axis` (0-based axis).
    pub fn div_axis(&self, axis: usize) -> Monomial {
        assert!(axis < self.dim.n());
        let mut m = *self;
        m.exps[axis] -= 1;
        m
    }

    /// Shift by `t` copies of the all-ones vector.
    pub fn shift_diag(&self, t: i64) -> Monomial {
        let mut m = *self;
        for e in m.exps[..self.dim.n()].iter_mut() {
            *e += t;
        }
        m
    }

    /// Sum of exponents; the diagonal height of the point.
    pub fn degree(&self) -> i64 {
        self.exps().iter().sum()
    }

    /// Representative of the diagonal class with degree in `0..n`.
    pub fn diag_rep(&self) -> Monomial {
        let n = self.dim.n() as i64;
        self.shift_diag(-self.degree().div_euclid(n))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &e) in self.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            wrote = true;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Orthonormal basis rows of the hyperplane `sum = 0`, fixed once so that
/// projected coordinates are bit-for-bit reproducible.
const BASIS3: [[f64; 3]; 2] = [
    [0.7071067811865475, -0.7071067811865475, 0.0],
    [0.408248290463863, 0.408248290463863, -0.816496580927726],
];

const BASIS4: [[f64; 4]; 3] = [
    [0.7071067811865475, -0.7071067811865475, 0.0, 0.0],
    [0.408248290463863, 0.408248290463863, -0.816496580927726, 0.0],
    [0.2886751345948129, 0.2886751345948129, 0.2886751345948129, -0.8660254037844386],
];

/// Orthogonal projection onto the hyperplane `sum = 0`, expressed in the
/// fixed basis above. For n = 3 the third coordinate is always zero.
///
/// The projection is linear, annihilates the all-ones vector, and satisfies
/// `|project(e_i)| = sqrt(1 - 1/n)` for every axis.
pub fn project(m: &Monomial) -> [f64; 3] {
    let mut out = [0.0f64; 3];
    match m.dim() {
        Dim::Three => {
            for (r, row) in BASIS3.iter().enumerate() {
                out[r] = row.iter().zip(m.exps()).map(|(b, &e)| b * e as f64).sum();
            }
        }
        Dim::Four => {
            for (r, row) in BASIS4.iter().enumerate() {
                out[r] = row.iter().zip(m.exps()).map(|(b, &e)| b * e as f64).sum();
            }
        }
    }
    out
}

/// Unordered set of axes attached to a slant simplex; the square-free
/// monomial `x_i x_j (x_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gradient {
    dim: Dim,
    mask: u8,
}

impl Gradient {
    pub fn from_axes(dim: Dim, axes: &[usize]) -> Gradient {
        let mut mask = 0u8;
        for &a in axes {
            assert!(a < dim.n());
            mask |= 1 << a;
        }
        assert_eq!(axes.len(), mask.count_ones() as usize, "axes must be distinct");
        Gradient { dim, mask }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Axes in increasing order (0-based).
    pub fn axes(&self) -> Vec<usize> {
        (0..self.dim.n()).filter(|&i| self.mask & (1 << i) != 0).collect()
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.mask & (1 << axis) != 0
    }

    /// Replace one axis by another.
    pub fn replace(&self, from: usize, to: usize) -> Gradient {
        assert!(self.contains(from) && !self.contains(to));
        Gradient { dim: self.dim, mask: self.mask & !(1 << from) | 1 << to }
    }

    /// Letter name for the four tetrahedron gradients:
    /// K = x2x3x4, L = x1x2x3, M = x1x2x4, N = x1x3x4.
    pub fn letter(&self) -> Option<char> {
        if self.dim != Dim::Four {
            return None;
        }
        match self.mask {
            0b1110 => Some('K'),
            0b0111 => Some('L'),
            0b1011 => Some('M'),
            0b1101 => Some('N'),
            _ => None,
        }
    }
}

impl fmt::Display for Gradient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.axes() {
            write!(f, "x{}", a + 1)?;
        }
        Ok(())
    }
}

/// Slant simplex: a base point plus an ordered tuple of `n - 1` distinct
/// axes. Its vertices are the cumulative products of the base by the axis
/// variables, e.g. `a[x1x2]` has vertices `a`, `a·x1`, `a·x1x2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderedSimplex {
    base: Monomial,
    axes: [u8; 3],
}

impl OrderedSimplex {
    /// Build from a base point and 0-based axis indices. Panics if the axes
    /// are not `n - 1` distinct indices below `n`.
    pub fn new(base: Monomial, axes: &[usize]) -> OrderedSimplex {
        Self::try_new(base, axes).expect("axes must be n-1 distinct indices below n")
    }

    pub fn try_new(base: Monomial, axes: &[usize]) -> Option<OrderedSimplex> {
        let k = base.dim().k();
        if axes.len() != k {
            return None;
        }
        let mut seen = [false; 4];
        for &a in axes {
            if a >= base.dim().n() || seen[a] {
                return None;
            }
            seen[a] = true;
        }
        let mut ax = [0u8; 3];
        for (slot, &a) in ax.iter_mut().zip(axes) {
            *slot = a as u8;
        }
        Some(OrderedSimplex { base, axes: ax })
    }

    pub fn dim(&self) -> Dim {
        self.base.dim()
    }

    pub fn base(&self) -> Monomial {
        self.base
    }

    /// Ordered axes (0-based), length `n - 1`.
    pub fn axes(&self) -> Vec<usize> {
        self.axes[..self.dim().k()].iter().map(|&a| a as usize).collect()
    }

    fn axis(&self, pos: usize) -> usize {
        self.axes[pos] as usize
    }

    /// The unique axis not used by this simplex.
    pub fn missing_axis(&self) -> usize {
        let mut seen = [false; 4];
        for pos in 0..self.dim().k() {
            seen[self.axis(pos)] = true;
        }
        (0..self.dim().n()).find(|&i| !seen[i]).unwrap()
    }

    /// Vertices in cumulative-product order: `a, a·x_i, a·x_i x_j, ...`.
    pub fn vertices(&self) -> Vec<Monomial> {
        let mut out = Vec::with_capacity(self.dim().n());
        let mut cur = self.base;
        out.push(cur);
        for pos in 0..self.dim().k() {
            cur = cur.mul_axis(self.axis(pos));
            out.push(cur);
        }
        out
    }

    pub fn gradient(&self) -> Gradient {
        Gradient::from_axes(self.dim(), &self.axes())
    }

    /// Shift the whole simplex by `t` diagonal steps; stays in the same fiber.
    pub fn shift_diag(&self, t: i64) -> OrderedSimplex {
        OrderedSimplex { base: self.base.shift_diag(t), axes: self.axes }
    }

    /// The next fiber member over the same flat simplex: drop the base
    /// vertex, append the missing axis. Applying this n times returns the
    /// simplex shifted up by one diagonal.
    pub fn fiber_next(&self) -> OrderedSimplex {
        let k = self.dim().k();
        let mut axes = Vec::with_capacity(k);
        axes.extend(self.axes().into_iter().skip(1));
        axes.push(self.missing_axis());
        OrderedSimplex::new(self.base.mul_axis(self.axis(0)), &axes)
    }

    /// The two admissible continuations over the downward neighbor tile:
    /// `same` keeps the gradient, `switch` swaps the leading axis for the
    /// missing one. Both share this simplex's long face, including the
    /// long edge `(a·x_i, a·x_i x_j x_k)`.
    pub fn forward_successors(&self) -> (OrderedSimplex, OrderedSimplex) {
        let k = self.dim().k();
        let i = self.axis(0);
        let l = self.missing_axis();
        let mut same_axes = Vec::with_capacity(k);
        same_axes.extend(self.axes().into_iter().skip(1));
        same_axes.push(i);
        let same = OrderedSimplex::new(self.base.mul_axis(i), &same_axes);
        let mut switch_axes = Vec::with_capacity(k);
        switch_axes.push(l);
        switch_axes.extend(self.axes().into_iter().skip(1));
        let switch = OrderedSimplex::new(self.base.mul_axis(i).div_axis(l), &switch_axes);
        (same, switch)
    }

    /// The two admissible continuations over the upward neighbor tile:
    /// `same` keeps the gradient, `switch` swaps the trailing axis for the
    /// missing one. Both contain the long edge `(a, a·x_i x_j)`.
    pub fn backward_predecessors(&self) -> (OrderedSimplex, OrderedSimplex) {
        let k = self.dim().k();
        let last = self.axis(k - 1);
        let l = self.missing_axis();
        let mut same_axes = Vec::with_capacity(k);
        same_axes.push(last);
        same_axes.extend(self.axes().into_iter().take(k - 1));
        let same = OrderedSimplex::new(self.base.div_axis(last), &same_axes);
        let mut switch_axes: Vec<usize> = self.axes().into_iter().take(k - 1).collect();
        switch_axes.push(l);
        let switch = OrderedSimplex::new(self.base, &switch_axes);
        (same, switch)
    }

    /// Gradients permitted at the downward neighbor: `(same, switch)`.
    pub fn forward_gradients(&self) -> (Gradient, Gradient) {
        let g = self.gradient();
        (g, g.replace(self.axis(0), self.missing_axis()))
    }

    /// Gradients permitted at the upward neighbor: `(same, switch)`.
    pub fn backward_gradients(&self) -> (Gradient, Gradient) {
        let g = self.gradient();
        (g, g.replace(self.axis(self.dim().k() - 1), self.missing_axis()))
    }

    /// The three consecutive flat simplices this slant simplex connects:
    /// `(downward neighbor, own tile, upward neighbor)`.
    pub fn local_trajectory(&self) -> (FlatClass, FlatClass, FlatClass) {
        let down = self.forward_successors().0;
        let up = self.backward_predecessors().0;
        (flat_class(&down), flat_class(self), flat_class(&up))
    }

    pub fn flat_class(&self) -> FlatClass {
        flat_class(self)
    }
}

impl fmt::Display for OrderedSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.base)?;
        for pos in 0..self.dim().k() {
            write!(f, "x{}", self.axis(pos) + 1)?;
        }
        write!(f, "]")
    }
}

/// Canonical representative of a projection fiber: the flat simplex.
///
/// Two slant simplices have equal `FlatClass` exactly when their vertex sets
/// project to the same flat simplex. The representative is the fiber member
/// of level 0 with minimal base degree, where level 0 is anchored at the
/// unique vertex class whose degree is divisible by n; its base degree is -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlatClass {
    canon: OrderedSimplex,
}

impl FlatClass {
    pub fn dim(&self) -> Dim {
        self.canon.dim()
    }

    /// The canonical fiber member standing for this class.
    pub fn canonical(&self) -> OrderedSimplex {
        self.canon
    }

    /// Stable text key, e.g. `|x3^-1[x3x1x2]|`.
    pub fn key(&self) -> String {
        self.to_string()
    }

    /// The n fiber members at diagonal level `level`; level 0 is the
    /// canonical band (base degrees `-1..n-1`), and level m + 1 is level m
    /// with every base multiplied by `x1...xn`. Each member projects back to
    /// this class and all n gradient values occur exactly once per level.
    pub fn fiber(&self, level: i64) -> Vec<OrderedSimplex> {
        let n = self.dim().n();
        let mut out = Vec::with_capacity(n);
        let mut cur = self.canon.shift_diag(level);
        for _ in 0..n {
            out.push(cur);
            cur = cur.fiber_next();
        }
        out
    }

    /// Projected vertex coordinates of the flat simplex, in canonical order.
    pub fn projected_vertices(&self) -> Vec<[f64; 3]> {
        self.canon.vertices().iter().map(project).collect()
    }
}

impl fmt::Display for FlatClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}|", self.canon)
    }
}

/// Map a slant simplex to its flat class.
///
/// The vertex classes modulo the diagonal form a cycle in which consecutive
/// classes differ by one axis step; the walk below recovers that cycle and
/// rebases it at the canonical anchor.
pub fn flat_class(s: &OrderedSimplex) -> FlatClass {
    let n = s.dim().n();
    let reps: Vec<Monomial> = s.vertices().iter().map(Monomial::diag_rep).collect();
    let rep_set: HashSet<Monomial> = reps.iter().copied().collect();
    debug_assert_eq!(rep_set.len(), n);

    // Exactly one vertex class has degree 0 after reduction.
    let anchor = *reps.iter().find(|r| r.degree() == 0).expect("anchor class exists");

    // Walk the cycle from the anchor; each class has a unique single-axis
    // successor within the fiber.
    let mut cycle = Vec::with_capacity(n);
    let mut cur = anchor;
    for _ in 0..n {
        let (axis, next) = (0..n)
            .filter_map(|a| {
                let cand = cur.mul_axis(a).diag_rep();
                (cand != cur.diag_rep() && rep_set.contains(&cand)).then_some((a, cand))
            })
            .next()
            .expect("fiber cycle is connected by single-axis steps");
        cycle.push(axis);
        cur = next;
    }

    // Canonical member: the window starting one step before the anchor.
    let last = cycle[n - 1];
    let mut axes = Vec::with_capacity(n - 1);
    axes.push(last);
    axes.extend(cycle.iter().copied().take(n - 2));
    let base = anchor.div_axis(last);
    FlatClass { canon: OrderedSimplex::new(base, &axes) }
}
