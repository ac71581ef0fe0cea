//! JSON documents for clouds, fields, polytopes, trees and certificates.
//!
//! Every float is written with 17 significant digits so that values
//! re-parse to the identical `f64`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::bodies::ConvexPolytope;
use crate::equipartition::EquipartitionReport;
use crate::error::{Result, SantaloError};
use crate::field::{BoxBounds, ScalarField};
use crate::geometry::{AffineFrame, Node, Point, YaoYaoTree};
use crate::measures::WeightedPointCloud;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudJson {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl From<&WeightedPointCloud> for CloudJson {
    fn from(c: &WeightedPointCloud) -> Self {
        Self {
            dim: c.dim(),
            points: c.points().map(<[f64]>::to_vec).collect(),
            weights: c.weights().to_vec(),
        }
    }
}

impl TryFrom<CloudJson> for WeightedPointCloud {
    type Error = SantaloError;

    fn try_from(j: CloudJson) -> Result<Self> {
        if j.points.iter().any(|p| p.len() != j.dim) {
            return Err(SantaloError::invalid(format!("every point must have {} coordinates", j.dim)));
        }
        WeightedPointCloud::new(j.dim, j.points.concat(), j.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    #[serde(rename = "box")]
    pub bounds: BoxJson,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl From<&ScalarField> for FieldJson {
    fn from(f: &ScalarField) -> Self {
        Self {
            bounds: BoxJson {
                lo: f.bounds().lo.clone(),
                hi: f.bounds().hi.clone(),
            },
            shape: f.shape().to_vec(),
            values: f.values().to_vec(),
        }
    }
}

impl TryFrom<FieldJson> for ScalarField {
    type Error = SantaloError;

    fn try_from(j: FieldJson) -> Result<Self> {
        ScalarField::new(BoxBounds::new(j.bounds.lo, j.bounds.hi)?, j.shape, j.values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<f64>>,
}

impl From<&ConvexPolytope> for PolytopeJson {
    fn from(p: &ConvexPolytope) -> Self {
        Self {
            vertices: p.vertices().to_vec(),
        }
    }
}

impl TryFrom<PolytopeJson> for ConvexPolytope {
    type Error = SantaloError;

    fn try_from(j: PolytopeJson) -> Result<Self> {
        ConvexPolytope::new(j.vertices)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub origin: Vec<f64>,
    pub axes: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeJson {
    Split {
        frame: FrameJson,
        offset: f64,
        direction: Vec<f64>,
        minus: Box<NodeJson>,
        plus: Box<NodeJson>,
    },
    Leaf {
        point: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub center: Vec<f64>,
    pub splits: NodeJson,
}

fn node_to_json(node: &Node) -> NodeJson {
    match node {
        Node::Leaf { point } => NodeJson::Leaf {
            point: point.as_slice().to_vec(),
        },
        Node::Split {
            frame,
            hyperplane_offset,
            direction,
            minus,
            plus,
        } => NodeJson::Split {
            frame: FrameJson {
                origin: frame.origin().as_slice().to_vec(),
                axes: frame.axes().iter().map(|a| a.as_slice().to_vec()).collect(),
            },
            offset: *hyperplane_offset,
            direction: direction.as_slice().to_vec(),
            minus: Box::new(node_to_json(minus)),
            plus: Box::new(node_to_json(plus)),
        },
    }
}

fn node_from_json(node: NodeJson) -> Result<Node> {
    Ok(match node {
        NodeJson::Leaf { point } => Node::Leaf {
            point: Point::from_vec(point),
        },
        NodeJson::Split {
            frame,
            offset,
            direction,
            minus,
            plus,
        } => Node::Split {
            frame: AffineFrame::new(
                Point::from_vec(frame.origin),
                frame.axes.into_iter().map(Point::from_vec).collect(),
            )?,
            hyperplane_offset: offset,
            direction: Point::from_vec(direction),
            minus: Box::new(node_from_json(*minus)?),
            plus: Box::new(node_from_json(*plus)?),
        },
    })
}

impl From<&YaoYaoTree> for TreeJson {
    fn from(t: &YaoYaoTree) -> Self {
        Self {
            center: t.center().as_slice().to_vec(),
            splits: node_to_json(t.root()),
        }
    }
}

impl TryFrom<TreeJson> for YaoYaoTree {
    type Error = SantaloError;

    fn try_from(j: TreeJson) -> Result<Self> {
        YaoYaoTree::new(Point::from_vec(j.center), node_from_json(j.splits)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub tree: TreeJson,
    pub masses: Vec<f64>,
    pub max_imbalance: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl From<&EquipartitionReport> for ReportJson {
    fn from(r: &EquipartitionReport) -> Self {
        Self {
            tree: TreeJson::from(&r.tree),
            masses: r.masses.clone(),
            max_imbalance: r.max_imbalance,
            residual_norm: r.residual_norm,
            iterations: r.iterations,
        }
    }
}

/// Pretty printer that writes floats as `{:.16e}`.
struct Precise<'a> {
    inner: PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for Precise<'_> {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        Precise {
            inner: PrettyFormatter::with_indent(b"  "),
        },
    );
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_cloud(path: &Path) -> Result<WeightedPointCloud> {
    read_json::<CloudJson>(path)?.try_into()
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    read_json::<FieldJson>(path)?.try_into()
}

pub fn read_polytope(path: &Path) -> Result<ConvexPolytope> {
    read_json::<PolytopeJson>(path)?.try_into()
}

pub fn read_tree(path: &Path) -> Result<YaoYaoTree> {
    read_json::<TreeJson>(path)?.try_into()
}
