//! SVG pictures of rank-3 tessellations.
//!
//! The base triangle has mirrors `L1, L2, L3`; the corner where `L_i` and
//! `L_j` meet has angle `π/m_ij`. Hyperbolic systems are drawn in the
//! Poincaré disk with the corner `L1 ∩ L2` at the centre and `L1` along the
//! real axis. Geometry is done on the hyperboloid in `R^{2,1}`, where
//! mirrors are given by unit spacelike normals, so every chamber `w` is the
//! base triangle moved by a 3×3 matrix.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write;

use nalgebra::{Matrix3, Vector3};

use crate::chambers::{self, ChamberSet};
use crate::diagrams::{CoxeterMatrix, Order};
use crate::error::{Error, Result};
use crate::words::{CoxeterGroup, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    PoincareDisk,
    Euclidean,
}

pub const CHAMBER_FILL: &str = "#ffffff";
pub const HIGHLIGHT_FILL: &str = "#e9a23b";
pub const STROKE: &str = "#1f2430";
pub const BOUNDARY_STROKE: &str = "#7a7f8c";

#[derive(Clone, Debug)]
pub struct SceneParams {
    pub model: Model,
    /// Chambers up to this word length are drawn.
    pub depth: usize,
    pub highlight: Option<ChamberSet>,
    /// Width and height of the square canvas in pixels.
    pub canvas: u32,
}

impl SceneParams {
    /// Parameters with the model matching the curvature of `system`.
    pub fn for_system(system: &CoxeterMatrix, depth: usize) -> Result<Self> {
        Ok(Self {
            model: model_for(system)?,
            depth,
            highlight: None,
            canvas: 800,
        })
    }
}

fn angle(m: Order) -> f64 {
    match m {
        Order::Finite(m) => PI / f64::from(m),
        Order::Infinite => 0.0,
    }
}

/// Disk for angle sum below `π`, Euclidean for exactly `π`.
pub fn model_for(system: &CoxeterMatrix) -> Result<Model> {
    if system.rank() != 3 {
        return Err(Error::RankMismatch {
            expected: 3,
            actual: system.rank(),
        });
    }
    let inverse = |m: Order| m.finite().map_or(0.0, |m| 1.0 / f64::from(m));
    let sum = inverse(system.order(0, 1)) + inverse(system.order(0, 2)) + inverse(system.order(1, 2));
    if (sum - 1.0).abs() < 1e-12 {
        Ok(Model::Euclidean)
    } else if sum < 1.0 {
        Ok(Model::PoincareDisk)
    } else {
        Err(Error::Invalid(format!("spherical triangle with angle sum {sum}π cannot be drawn")))
    }
}

/// The base triangle: mirror normals, their reflections, and corners.
/// `corners[k]` is opposite mirror `k`, so it is `L_i ∩ L_j` for `{i,j,k} = {0,1,2}`.
#[derive(Clone, Debug)]
pub struct BaseTriangle {
    pub model: Model,
    pub normals: [Vector3<f64>; 3],
    pub reflections: [Matrix3<f64>; 3],
    pub corners: [Vector3<f64>; 3],
}

const LORENTZ: Matrix3<f64> = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);

/// Side length of the Euclidean base triangle along the real axis.
fn euclidean_side(depth: usize) -> f64 {
    1.0 / (1.0 + depth as f64 / 2.0)
}

pub fn base_triangle(system: &CoxeterMatrix, model: Model, depth: usize) -> Result<BaseTriangle> {
    if model_for(system)? != model {
        return Err(Error::Invalid(format!("{model:?} model does not match the curvature of the system")));
    }
    // two mirrors with a finite angle meet at the origin; `local[k]` is the
    // mirror placed in position k
    let Some(local) = [[0, 1, 2], [0, 2, 1], [1, 2, 0]]
        .into_iter()
        .find(|l| system.order(l[0], l[1]).finite().is_some())
    else {
        return Ok(ideal_triangle());
    };
    let a12 = angle(system.order(local[0], local[1]));
    let a13 = angle(system.order(local[0], local[2]));
    let a23 = angle(system.order(local[1], local[2]));
    let n1 = Vector3::new(0.0, 1.0, 0.0);
    let n2 = Vector3::new(a12.sin(), -a12.cos(), 0.0);
    let a = (-a23.cos() - a13.cos() * a12.cos()) / a12.sin();
    let b = -a13.cos();
    let place = |placed: [Vector3<f64>; 3]| {
        let mut normals = placed;
        for k in 0..3 {
            normals[local[k]] = placed[k];
        }
        normals
    };
    let triangle = match model {
        Model::PoincareDisk => {
            let c = -(a * a + b * b - 1.0).max(0.0).sqrt();
            let normals = place([n1, n2, Vector3::new(a, b, c)]);
            hyperbolic(normals)
        }
        Model::Euclidean => {
            // the line a x + b y = a·side meets the real axis at x = side
            let side = euclidean_side(depth);
            let normals = place([n1, n2, Vector3::new(a, b, -a * side)]);
            let reflections = normals.map(|n| Matrix3::identity() - 2.0 * Vector3::new(n.x, n.y, 0.0) * n.transpose());
            let corner = |i: usize, j: usize| {
                let v = normals[i].cross(&normals[j]);
                v / v.z
            };
            BaseTriangle {
                model,
                normals,
                reflections,
                corners: [corner(1, 2), corner(0, 2), corner(0, 1)],
            }
        }
    };
    Ok(triangle)
}

fn hyperbolic(normals: [Vector3<f64>; 3]) -> BaseTriangle {
    let reflections = normals.map(|n| Matrix3::identity() - 2.0 * n * (LORENTZ * n).transpose());
    let corner = |i: usize, j: usize| {
        let mut v = LORENTZ * normals[i].cross(&normals[j]);
        if v.z < 0.0 {
            v = -v;
        }
        if is_ideal(&v) {
            v
        } else {
            v / (v.z * v.z - v.x * v.x - v.y * v.y).sqrt()
        }
    };
    BaseTriangle {
        model: Model::PoincareDisk,
        normals,
        reflections,
        corners: [corner(1, 2), corner(0, 2), corner(0, 1)],
    }
}

/// All three corners on the boundary, at 90, 210 and 330 degrees.
fn ideal_triangle() -> BaseTriangle {
    let at = |k: usize| {
        let t = std::f64::consts::FRAC_PI_2 + k as f64 * 2.0 * std::f64::consts::FRAC_PI_3;
        Vector3::new(t.cos(), t.sin(), 1.0)
    };
    let mirror = |i: usize, j: usize| {
        let n = LORENTZ * at(i).cross(&at(j));
        n / (n.x * n.x + n.y * n.y - n.z * n.z).sqrt()
    };
    hyperbolic([mirror(1, 2), mirror(0, 2), mirror(0, 1)])
}

impl BaseTriangle {
    /// Position in the unit-disk plane of a homogeneous point.
    pub fn project(&self, v: &Vector3<f64>) -> (f64, f64) {
        match self.model {
            // ideal points have v·v = 0 and land on the unit circle
            Model::PoincareDisk => {
                let d = if is_ideal(v) { v.z } else { 1.0 + v.z };
                (v.x / d, v.y / d)
            }
            Model::Euclidean => (v.x / v.z, v.y / v.z),
        }
    }
}

fn is_ideal(v: &Vector3<f64>) -> bool {
    let q = v.x * v.x + v.y * v.y - v.z * v.z;
    q.abs() <= 1e-9 * v.z * v.z
}

/// A side of a drawn triangle in disk coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Edge {
    Line,
    /// Arc of the circle with this centre and radius.
    Arc { center: (f64, f64), radius: f64 },
}

fn edge_for(model: Model, n: &Vector3<f64>) -> Edge {
    if model == Model::Euclidean {
        return Edge::Line;
    }
    let q = n.x * n.x + n.y * n.y - n.z * n.z;
    if n.z.abs() <= 1e-12 * q.sqrt() {
        return Edge::Line;
    }
    Edge::Arc {
        center: (n.x / n.z, n.y / n.z),
        radius: q.sqrt() / n.z.abs(),
    }
}

/// Fixed 9-significant-digit notation without exponent or negative zero.
pub fn format_number(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

struct Canvas {
    center: f64,
    scale: f64,
}

impl Canvas {
    fn point(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (self.center + self.scale * x, self.center - self.scale * y)
    }
}

fn path(triangle: &BaseTriangle, matrix: &Matrix3<f64>, canvas: &Canvas) -> String {
    let corners = triangle.corners.map(|v| triangle.project(&(matrix * v)));
    // walk corner 2 -> 0 -> 1 -> 2; the side between corners p and q is the
    // mirror opposite the third one
    let order = [(2, 0, 1), (0, 1, 2), (1, 2, 0)];
    let mut d = String::new();
    let start = canvas.point(corners[2]);
    write!(d, "M {} {}", format_number(start.0), format_number(start.1)).unwrap();
    for (p, q, mirror) in order {
        let normal = match triangle.model {
            Model::PoincareDisk => matrix * triangle.normals[mirror],
            // lines transform by the inverse transpose
            Model::Euclidean => matrix.try_inverse().unwrap().transpose() * triangle.normals[mirror],
        };
        let to = canvas.point(corners[q]);
        match edge_for(triangle.model, &normal) {
            Edge::Line => write!(d, " L {} {}", format_number(to.0), format_number(to.1)).unwrap(),
            Edge::Arc { center, radius } => {
                let from = canvas.point(corners[p]);
                let c = canvas.point(center);
                let cross = (from.0 - c.0) * (to.1 - c.1) - (from.1 - c.1) * (to.0 - c.0);
                let sweep = u8::from(cross > 0.0);
                let r = format_number(radius * canvas.scale);
                write!(d, " A {r} {r} 0 0 {sweep} {} {}", format_number(to.0), format_number(to.1)).unwrap();
            }
        }
    }
    d.push_str(" Z");
    d
}

/// Draws every chamber of length at most `params.depth`, filling those in
/// the highlight set. Chambers appear in ShortLex order.
pub fn render_rank3(system: &CoxeterMatrix, params: &SceneParams) -> Result<String> {
    let triangle = base_triangle(system, params.model, params.depth)?;
    let group = CoxeterGroup::new(system.clone());
    let words = chambers::ball(&group, params.depth)?;
    let mut matrices: HashMap<Word, Matrix3<f64>> = HashMap::with_capacity(words.len());
    let size = f64::from(params.canvas);
    let canvas = Canvas {
        center: size / 2.0,
        scale: size / 2.0 * 0.98,
    };

    let mut svg = String::new();
    let w = params.canvas;
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{w}" viewBox="0 0 {w} {w}">"#
    )
    .unwrap();
    if params.model == Model::PoincareDisk {
        let c = format_number(canvas.center);
        writeln!(
            svg,
            r#"<circle cx="{c}" cy="{c}" r="{}" fill="none" stroke="{BOUNDARY_STROKE}" stroke-width="1"/>"#,
            format_number(canvas.scale)
        )
        .unwrap();
    }
    writeln!(svg, r#"<g stroke="{STROKE}" stroke-width="0.6" stroke-linejoin="round">"#).unwrap();
    for word in &words {
        let matrix = match word.letters().split_last() {
            None => Matrix3::identity(),
            Some((&last, rest)) => matrices[&Word::new(rest.to_vec())] * triangle.reflections[last as usize],
        };
        let highlighted = params.highlight.as_ref().is_some_and(|h| h.contains(word));
        let fill = if highlighted { HIGHLIGHT_FILL } else { CHAMBER_FILL };
        writeln!(
            svg,
            r#"<path data-word="{word}" fill="{fill}" d="{}"/>"#,
            path(&triangle, &matrix, &canvas)
        )
        .unwrap();
        matrices.insert(word.clone(), matrix);
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}
