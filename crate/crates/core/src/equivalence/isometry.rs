//! Plane isometries `x ↦ Mx + b` with `M` orthogonal.

use std::fmt;

use nalgebra::{Matrix2, Vector2};

use crate::error::Error;
use crate::model::{LocId, LocSet, ModelDefinition, Point};
use crate::num::g17;

/// Absolute tolerance when matching transformed points to declared locations.
pub const GEOMETRY_TOL: f64 = 1e-6;
const MATRIX_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub linear: Matrix2<f64>,
    pub offset: Vector2<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum IsometryKind {
    Identity,
    Reflection,
    Rotation,
    Translation,
    GlideReflection,
}

impl IsometryKind {
    pub fn name(self) -> &'static str {
        match self {
            IsometryKind::Identity => "identity",
            IsometryKind::Reflection => "reflection",
            IsometryKind::Rotation => "rotation",
            IsometryKind::Translation => "translation",
            IsometryKind::GlideReflection => "glide reflection",
        }
    }

    /// Orders candidates by how much of the plane they fix.
    fn rank(self) -> u8 {
        match self {
            IsometryKind::Identity => 0,
            IsometryKind::Reflection => 1,
            IsometryKind::Rotation => 2,
            IsometryKind::Translation | IsometryKind::GlideReflection => 3,
        }
    }
}

fn v(p: Point) -> Vector2<f64> {
    Vector2::new(p.x, p.y)
}

impl Isometry {
    pub fn new(linear: Matrix2<f64>, offset: Vector2<f64>) -> Result<Self, Error> {
        let gram = linear.transpose() * linear;
        if !linear.iter().chain(offset.iter()).all(|x| x.is_finite())
            || (gram - Matrix2::identity()).amax() > MATRIX_TOL
        {
            return Err(Error::NotAnIsometry(format!(
                "matrix [[{}, {}], [{}, {}]] is not orthogonal",
                g17(linear[(0, 0)]),
                g17(linear[(0, 1)]),
                g17(linear[(1, 0)]),
                g17(linear[(1, 1)])
            )));
        }
        Ok(Isometry { linear, offset })
    }

    pub fn identity() -> Self {
        Isometry {
            linear: Matrix2::identity(),
            offset: Vector2::zeros(),
        }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Isometry {
            linear: Matrix2::identity(),
            offset: Vector2::new(dx, dy),
        }
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Isometry {
            linear: Matrix2::new(c, -s, s, c),
            offset: Vector2::zeros(),
        }
    }

    /// Reflection in the line through the origin at angle `beta` to the x-axis.
    pub fn reflection(beta: f64) -> Self {
        let (s, c) = (2.0 * beta).sin_cos();
        Isometry {
            linear: Matrix2::new(c, s, s, -c),
            offset: Vector2::zeros(),
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        let q = self.linear * v(p) + self.offset;
        Point::new(q.x, q.y)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            linear: self.linear * other.linear,
            offset: self.linear * other.offset + self.offset,
        }
    }

    pub fn invert(&self) -> Isometry {
        let inv = self.linear.transpose();
        Isometry {
            linear: inv,
            offset: -(inv * self.offset),
        }
    }

    pub fn det(&self) -> f64 {
        self.linear.determinant()
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        (self.linear - other.linear).amax() <= tol && (self.offset - other.offset).amax() <= tol
    }

    pub fn kind(&self) -> IsometryKind {
        let still = (self.linear - Matrix2::identity()).amax() <= MATRIX_TOL;
        let moved = self.offset.amax() > MATRIX_TOL;
        if self.det() > 0.0 {
            match (still, moved) {
                (true, false) => IsometryKind::Identity,
                (true, true) => IsometryKind::Translation,
                _ => IsometryKind::Rotation,
            }
        } else {
            // A reflection has a fixed line iff the offset is perpendicular
            // to its mirror, i.e. lies in the -1 eigenspace.
            let along = (self.linear * self.offset + self.offset) / 2.0;
            if along.amax() > MATRIX_TOL {
                IsometryKind::GlideReflection
            } else {
                IsometryKind::Reflection
            }
        }
    }

    /// Image of a declared location, matched back to a declared location.
    pub fn apply_loc(&self, def: &ModelDefinition, l: LocId) -> Option<LocId> {
        match_point(def, self.apply(def.location(l).point))
    }

    /// Image of a location set: declared images, and the points that match
    /// no declared location.
    pub fn apply_set(&self, def: &ModelDefinition, ls: &LocSet) -> (LocSet, Vec<Point>) {
        let mut hit = LocSet::new();
        let mut stray = Vec::new();
        for &l in ls {
            let p = self.apply(def.location(l).point);
            match match_point(def, p) {
                Some(id) => {
                    hit.insert(id);
                }
                None => stray.push(p),
            }
        }
        (hit, stray)
    }
}

pub fn match_point(def: &ModelDefinition, p: Point) -> Option<LocId> {
    def.locations
        .iter()
        .position(|l| l.point.distance(&p) <= GEOMETRY_TOL)
        .map(LocId)
}

fn tidy(x: f64) -> String {
    let r = x.round();
    let x = if (x - r).abs() < 1e-12 { r } else { x };
    g17(if x == 0.0 { 0.0 } else { x })
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.linear;
        write!(
            f,
            "{} x -> [[{}, {}], [{}, {}]] x + ({}, {})",
            self.kind().name(),
            tidy(m[(0, 0)]),
            tidy(m[(0, 1)]),
            tidy(m[(1, 0)]),
            tidy(m[(1, 1)]),
            tidy(self.offset.x),
            tidy(self.offset.y)
        )
    }
}

fn maps_onto(phi: &Isometry, a: &[Point], b: &[Point]) -> bool {
    let mut used = vec![false; b.len()];
    for &p in a {
        let q = phi.apply(p);
        match b.iter().position(|y| y.distance(&q) <= GEOMETRY_TOL) {
            Some(k) if !used[k] => used[k] = true,
            _ => return false,
        }
    }
    true
}

/// Every isometry mapping the point set `a` onto `b`, up to its action on
/// the points. Candidates fixing more of the plane come first.
pub fn candidate_isometries(a: &[Point], b: &[Point]) -> Vec<Isometry> {
    if a.len() != b.len() || a.is_empty() {
        return Vec::new();
    }
    if a.len() == 1 {
        let d = v(b[0]) - v(a[0]);
        return vec![Isometry::translation(d.x, d.y)];
    }
    let mut raw = Vec::new();
    for (i, &a1) in a.iter().enumerate() {
        for (j, &a2) in a.iter().enumerate() {
            if i == j {
                continue;
            }
            let da = v(a2) - v(a1);
            for (k, &b1) in b.iter().enumerate() {
                for (m, &b2) in b.iter().enumerate() {
                    if k == m {
                        continue;
                    }
                    let db = v(b2) - v(b1);
                    if (da.norm() - db.norm()).abs() > GEOMETRY_TOL {
                        continue;
                    }
                    let ta = da.y.atan2(da.x);
                    let tb = db.y.atan2(db.x);
                    for lin in [Isometry::rotation(tb - ta), Isometry::reflection((ta + tb) / 2.0)] {
                        let offset = v(b1) - lin.linear * v(a1);
                        raw.push(Isometry {
                            linear: lin.linear,
                            offset,
                        });
                    }
                }
            }
        }
    }
    let mut out: Vec<Isometry> = Vec::new();
    for phi in raw {
        if maps_onto(&phi, a, b) && !out.iter().any(|o| o.approx_eq(&phi, MATRIX_TOL)) {
            out.push(phi);
        }
    }
    out.sort_by_key(|phi| phi.kind().rank());
    out
}
