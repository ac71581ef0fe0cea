use nalgebra::DMatrix;

use super::{
    check_ambient, cone_from_columns, AffineForm, AffineFrame, Point, SimplicialCone,
};
use crate::error::{check_dim, Result, SantaloError};
use crate::sampling;

/// Minimum `|v . u| / |v|` for a split direction `v` against the hyperplane
/// normal `u`.
const TRANSVERSAL_TOL: f64 = 1e-9;

/// One level of a Yao-Yao partition.
///
/// A `Split` lives in the affine subspace spanned by `frame`. It cuts that
/// subspace with the hyperplane `F = { last frame coordinate = hyperplane_offset }`
/// and sweeps the two sub-partitions of `F` along `-direction` (minus) and
/// `+direction` (plus). A `Leaf` is the 0-dimensional partition `{point}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf {
        point: Point,
    },
    Split {
        frame: AffineFrame,
        hyperplane_offset: f64,
        direction: Point,
        minus: Box<Node>,
        plus: Box<Node>,
    },
}

impl Node {
    fn leaf_generators(&self) -> Vec<Vec<Point>> {
        match self {
            Node::Leaf { .. } => vec![Vec::new()],
            Node::Split {
                direction,
                minus,
                plus,
                ..
            } => {
                let mut out = Vec::new();
                for (child, v) in [(minus, -direction), (plus, direction.clone())] {
                    for mut gens in child.leaf_generators() {
                        gens.insert(0, v.clone());
                        out.push(gens);
                    }
                }
                out
            }
        }
    }

    fn translated(&self, by: &Point) -> Node {
        match self {
            Node::Leaf { point } => Node::Leaf { point: point + by },
            Node::Split {
                frame,
                hyperplane_offset,
                direction,
                minus,
                plus,
            } => Node::Split {
                frame: frame.translated(by),
                hyperplane_offset: *hyperplane_offset,
                direction: direction.clone(),
                minus: Box::new(minus.translated(by)),
                plus: Box::new(plus.translated(by)),
            },
        }
    }
}

/// A split tree expressed in the coordinates of some frame; turned into a
/// [`YaoYaoTree`] by [`YaoYaoTree::from_local`].
#[derive(Clone, Debug, PartialEq)]
pub enum LocalSplit {
    Point,
    Split {
        /// Hyperplane position along the last frame axis.
        offset: f64,
        /// Sweep direction in frame coordinates (length = frame dimension).
        direction: Vec<f64>,
        minus: Box<LocalSplit>,
        plus: Box<LocalSplit>,
    },
}

impl LocalSplit {
    pub fn split(offset: f64, direction: Vec<f64>, minus: LocalSplit, plus: LocalSplit) -> Self {
        LocalSplit::Split {
            offset,
            direction,
            minus: Box::new(minus),
            plus: Box::new(plus),
        }
    }

    /// Median split of a line at `at`.
    pub fn line(at: f64) -> Self {
        Self::split(at, vec![1.0], LocalSplit::Point, LocalSplit::Point)
    }

    /// Frame coordinates of the center (read from the minus branch).
    pub fn center(&self) -> Vec<f64> {
        match self {
            LocalSplit::Point => Vec::new(),
            LocalSplit::Split { offset, minus, .. } => {
                let mut c = minus.center();
                c.push(*offset);
                c
            }
        }
    }
}

/// A Yao-Yao partition of `R^n` into `2^n` simplicial cones with a common apex.
#[derive(Clone, Debug, PartialEq)]
pub struct YaoYaoTree {
    center: Point,
    root: Node,
}

impl YaoYaoTree {
    /// Validates depth, transversality and the shared-center condition.
    pub fn new(center: Point, root: Node) -> Result<Self> {
        let n = center.len();
        check_ambient(n)?;
        let tol = 1e-9 * (1.0 + center.amax());
        let basis = AffineFrame::standard(n);
        validate(&root, &Point::zeros(n), basis.axes(), &center, tol)?;
        Ok(Self { center, root })
    }

    /// Builds a tree from a frame-local description; the center is read off
    /// the leaves.
    pub fn from_local(frame: &AffineFrame, local: &LocalSplit) -> Result<Self> {
        if frame.dim() != frame.ambient_dim() {
            return Err(SantaloError::MalformedTree("root frame must span the space".into()));
        }
        let root = build(frame, local)?;
        let center = frame.to_ambient(&local.center());
        Self::new(center, root)
    }

    /// The coordinate-orthant partition centered at `center`.
    pub fn orthants(center: Point) -> Result<Self> {
        let n = center.len();
        check_ambient(n)?;
        let mut local = LocalSplit::Point;
        for k in 0..n {
            let mut dir = vec![0.0; k + 1];
            dir[k] = 1.0;
            local = LocalSplit::split(center[k], dir, local.clone(), local);
        }
        Self::from_local(&AffineFrame::standard(n), &local)
    }

    /// A random well-formed tree centered at `center`: random rotated frames
    /// at every level and random transverse directions.
    pub fn random(center: Point, seed: u64) -> Result<Self> {
        let n = center.len();
        check_ambient(n)?;
        let mut rng = sampling::rng(seed);
        let axes = random_basis(&mut rng, AffineFrame::standard(n).axes());
        let frame = AffineFrame::new(Point::zeros(n), axes)?;
        let root = random_node(&mut rng, frame, &center);
        Self::new(center, root)
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.dim()
    }

    /// All `2^n` leaf cones, minus branches first at every level.
    pub fn leaf_cones(&self) -> Result<Vec<SimplicialCone>> {
        self.root
            .leaf_generators()
            .into_iter()
            .map(|gens| {
                if gens.len() != self.dim() {
                    return Err(SantaloError::MalformedTree("leaf depth mismatch".into()));
                }
                cone_from_columns(self.center.clone(), &gens)
            })
            .collect()
    }

    /// Index of a leaf cone on which `form >= 0`.
    ///
    /// Descends into the plus child when `form` is non-negative along the
    /// split direction (ties go to plus), into the minus child otherwise.
    pub fn support_cone(&self, form: &AffineForm) -> Result<usize> {
        check_dim(self.dim(), form.normal().len())?;
        let at_center = form.eval(&self.center);
        if at_center.abs() > 1e-9 {
            return Err(SantaloError::FormNotCentered(at_center));
        }
        let mut node = &self.root;
        let mut index = 0usize;
        while let Node::Split {
            frame,
            direction,
            minus,
            plus,
            ..
        } = node
        {
            let half = 1usize << (frame.dim() - 1);
            if form.normal().dot(direction) >= 0.0 {
                index += half;
                node = plus;
            } else {
                node = minus;
            }
        }
        Ok(index)
    }

    pub fn translated(&self, by: &Point) -> Self {
        Self {
            center: &self.center + by,
            root: self.root.translated(by),
        }
    }

    /// The same partition moved so that its center is the origin.
    pub fn recentered(&self) -> Self {
        let mut t = self.translated(&-&self.center);
        t.center = Point::zeros(self.dim());
        t
    }

    /// Generator matrices of all leaf cones.
    pub fn generator_matrices(&self) -> Result<Vec<DMatrix<f64>>> {
        Ok(self
            .leaf_cones()?
            .into_iter()
            .map(|c| c.generators().clone())
            .collect())
    }
}

fn in_span(v: &Point, basis: &[Point]) -> f64 {
    let mut r = v.clone();
    for a in basis {
        let c = a.dot(&r);
        r.axpy(-c, a, 1.0);
    }
    r.norm()
}

fn validate(node: &Node, origin: &Point, basis: &[Point], center: &Point, tol: f64) -> Result<()> {
    let bad = |msg: &str| Err(SantaloError::MalformedTree(msg.to_string()));
    match node {
        Node::Leaf { point } => {
            check_dim(center.len(), point.len())?;
            if !basis.is_empty() {
                return bad("leaf reached before dimension 0");
            }
            if (point - origin).norm() > tol {
                return bad("leaf point off its subspace");
            }
            if (point - center).norm() > tol {
                return bad("sub-partitions do not share the center");
            }
            Ok(())
        }
        Node::Split {
            frame,
            hyperplane_offset,
            direction,
            minus,
            plus,
        } => {
            check_dim(center.len(), frame.ambient_dim())?;
            check_dim(center.len(), direction.len())?;
            if frame.dim() != basis.len() || basis.is_empty() {
                return bad("split frame dimension does not match its level");
            }
            if frame.axes().iter().any(|a| in_span(a, basis) > tol) {
                return bad("split frame leaves the parent hyperplane");
            }
            if in_span(&(frame.origin() - origin), basis) > tol {
                return bad("split frame origin off the parent hyperplane");
            }
            let vn = direction.norm();
            if vn == 0.0 || in_span(direction, basis) > tol * (1.0 + vn) {
                return bad("split direction leaves the subspace");
            }
            let last = frame.last_axis().expect("non-empty frame");
            if direction.dot(last).abs() <= TRANSVERSAL_TOL * vn {
                return bad("split direction lies in the hyperplane");
            }
            if !hyperplane_offset.is_finite() {
                return bad("non-finite hyperplane offset");
            }
            let f = frame.hyperplane(*hyperplane_offset)?;
            validate(minus, f.origin(), f.axes(), center, tol)?;
            validate(plus, f.origin(), f.axes(), center, tol)
        }
    }
}

fn build(frame: &AffineFrame, local: &LocalSplit) -> Result<Node> {
    match local {
        LocalSplit::Point => {
            if frame.dim() != 0 {
                return Err(SantaloError::MalformedTree("leaf above dimension 0".into()));
            }
            Ok(Node::Leaf {
                point: frame.origin().clone(),
            })
        }
        LocalSplit::Split {
            offset,
            direction,
            minus,
            plus,
        } => {
            if direction.len() != frame.dim() || frame.dim() == 0 {
                return Err(SantaloError::MalformedTree("direction length != frame dimension".into()));
            }
            let f = frame.hyperplane(*offset)?;
            Ok(Node::Split {
                frame: frame.clone(),
                hyperplane_offset: *offset,
                direction: frame.vector_to_ambient(direction),
                minus: Box::new(build(&f, minus)?),
                plus: Box::new(build(&f, plus)?),
            })
        }
    }
}

/// Random orthonormal basis of the span of `axes`.
fn random_basis(rng: &mut sampling::SeededRng, axes: &[Point]) -> Vec<Point> {
    let k = axes.len();
    loop {
        let mut out: Vec<Point> = Vec::with_capacity(k);
        for _ in 0..k {
            let c = sampling::gaussian_vector(rng, k);
            let mut v = Point::zeros(axes[0].len());
            for (a, ci) in axes.iter().zip(c.iter()) {
                v.axpy(*ci, a, 1.0);
            }
            for b in &out {
                let d = b.dot(&v);
                v.axpy(-d, b, 1.0);
            }
            let nv = v.norm();
            if nv < 1e-3 {
                break;
            }
            out.push(v / nv);
        }
        if out.len() == k {
            return out;
        }
    }
}

fn random_node(rng: &mut sampling::SeededRng, frame: AffineFrame, center: &Point) -> Node {
    if frame.dim() == 0 {
        return Node::Leaf {
            point: frame.origin().clone(),
        };
    }
    let last = frame.last_axis().unwrap().clone();
    let offset = (center - frame.origin()).dot(&last);
    let k = frame.dim();
    let direction = loop {
        let c = sampling::gaussian_vector(rng, k);
        if c[k - 1].abs() >= 0.3 * c.norm() {
            break frame.vector_to_ambient(c.as_slice());
        }
    };
    let f = frame.hyperplane(offset).expect("k >= 1");
    let child = |rng: &mut sampling::SeededRng| {
        if f.dim() == 0 {
            return random_node(rng, f.clone(), center);
        }
        let axes = random_basis(rng, f.axes());
        let cf = AffineFrame::new(f.origin().clone(), axes).expect("orthonormal");
        random_node(rng, cf, center)
    };
    let minus = child(rng);
    let plus = child(rng);
    Node::Split {
        frame,
        hyperplane_offset: offset,
        direction,
        minus: Box::new(minus),
        plus: Box::new(plus),
    }
}
