//! Inclusion shapes, their exact monomial moments, and Taylor jets of the data.

use crate::poly::{exps_degree, factorial, multi_indices, Exps, Poly};
use crate::{Dim, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Required distance from the origin to the boundary of the reference shape.
pub const ORIGIN_MARGIN: f64 = 1e-9;

/// Reference inclusion ω. The theory assumes a C¹ boundary; polygons and
/// tetrahedral meshes are accepted for moment and potential computations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ball { dim: Dim },
    Polygon { vertices: Vec<[f64; 2]> },
    TetMesh { vertices: Vec<[f64; 3]>, tets: Vec<[usize; 4]> },
}

/// A signed simplex in the decomposition of a shape; points are padded to 3D.
#[derive(Clone, Debug)]
pub struct Simplex {
    pub verts: Vec<[f64; 3]>,
    /// Signed volume (polygon fans can contain negatively oriented triangles).
    pub volume: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn centroid(&self) -> [f64; 3] {
        let n = self.verts.len() as f64;
        let mut c = [0.0; 3];
        for v in &self.verts {
            for i in 0..3 {
                c[i] += v[i] / n;
            }
        }
        c
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.verts {
            for b in &self.verts {
                d = d.max(dist3(a, b));
            }
        }
        d
    }
}

pub(crate) fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1])).clamp(0.0, 1.0);
    ((ap[0] - t * ab[0]).powi(2) + (ap[1] - t * ab[1]).powi(2)).sqrt()
}

fn tri_dist(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    // Project onto the plane; fall back to edge distances outside the face.
    let n = {
        let u = sub3(b, a);
        let v = sub3(c, a);
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
    };
    let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let ap = sub3(p, a);
    let h = (ap[0] * n[0] + ap[1] * n[1] + ap[2] * n[2]) / nn;
    let q = [p[0] - h * n[0] / nn, p[1] - h * n[1] / nn, p[2] - h * n[2] / nn];
    let s1 = det3(sub3(b, a), sub3(q, a), n);
    let s2 = det3(sub3(c, b), sub3(q, b), n);
    let s3 = det3(sub3(a, c), sub3(q, c), n);
    if (s1 >= 0.0 && s2 >= 0.0 && s3 >= 0.0) || (s1 <= 0.0 && s2 <= 0.0 && s3 <= 0.0) {
        return h.abs();
    }
    let seg = |a: [f64; 3], b: [f64; 3]| {
        let ab = sub3(b, a);
        let ap = sub3(p, a);
        let t = ((ap[0] * ab[0] + ap[1] * ab[1] + ap[2] * ab[2])
            / (ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2]))
            .clamp(0.0, 1.0);
        dist3(&p, &[a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]])
    };
    seg(a, b).min(seg(b, c)).min(seg(c, a))
}

impl Shape {
    pub fn unit_ball(dim: Dim) -> Self {
        Shape::Ball { dim }
    }

    pub fn dim(&self) -> Dim {
        match self {
            Shape::Ball { dim } => *dim,
            Shape::Polygon { .. } => Dim::Two,
            Shape::TetMesh { .. } => Dim::Three,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, Shape::Ball { .. })
    }

    /// Polygon vertices in counter-clockwise order.
    fn ccw_polygon(vertices: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let mut v = vertices.to_vec();
        let area: f64 = (0..v.len()).map(|i| det2(v[i], v[(i + 1) % v.len()])).sum();
        if area < 0.0 {
            v.reverse();
        }
        v
    }

    /// Structural checks (without the origin margin).
    fn check_structure(&self) -> Result<()> {
        match self {
            Shape::Ball { .. } => Ok(()),
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::InvalidShape(format!("polygon needs at least 3 vertices, got {n}")));
                }
                let area: f64 = 0.5 * (0..n).map(|i| det2(vertices[i], vertices[(i + 1) % n])).sum::<f64>();
                let scale = self.radius().max(1e-300);
                if area.abs() <= 1e-14 * scale * scale {
                    return Err(Error::DegenerateSimplex(area));
                }
                for i in 0..n {
                    for j in i + 1..n {
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        if segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) {
                            return Err(Error::InvalidShape(format!("polygon edges {i} and {j} intersect")));
                        }
                    }
                }
                Ok(())
            }
            Shape::TetMesh { vertices, tets } => {
                if tets.is_empty() {
                    return Err(Error::InvalidShape("tetrahedral mesh has no cells".into()));
                }
                let scale = self.radius().max(1e-300);
                for t in tets {
                    if t.iter().any(|&i| i >= vertices.len()) {
                        return Err(Error::InvalidShape(format!("tet {t:?} references a missing vertex")));
                    }
                    let vol = det3(
                        sub3(vertices[t[1]], vertices[t[0]]),
                        sub3(vertices[t[2]], vertices[t[0]]),
                        sub3(vertices[t[3]], vertices[t[0]]),
                    ) / 6.0;
                    if vol.abs() <= 1e-14 * scale.powi(3) {
                        return Err(Error::DegenerateSimplex(vol));
                    }
                }
                Ok(())
            }
        }
    }

    /// Full validation, including the requirement that 0 is an interior point.
    pub fn validate(&self) -> Result<()> {
        self.check_structure()?;
        let d = self.origin_distance();
        if !self.contains(&[0.0; 3]) || d < ORIGIN_MARGIN {
            return Err(Error::OriginNotInterior(if self.contains(&[0.0; 3]) { d } else { -d }));
        }
        Ok(())
    }

    /// Largest distance from the origin to a point of ω.
    pub fn radius(&self) -> f64 {
        match self {
            Shape::Ball { .. } => 1.0,
            Shape::Polygon { vertices } => vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
            Shape::TetMesh { vertices, .. } => {
                vertices.iter().map(|v| dist3(v, &[0.0; 3])).fold(0.0, f64::max)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Ball { .. } => 2.0,
            Shape::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for a in vertices {
                    for b in vertices {
                        d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
                    }
                }
                d
            }
            Shape::TetMesh { vertices, .. } => {
                let mut d: f64 = 0.0;
                for a in vertices {
                    for b in vertices {
                        d = d.max(dist3(a, b));
                    }
                }
                d
            }
        }
    }

    /// Point location (closed shape).
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Shape::Ball { dim } => (0..dim.n()).map(|i| x[i] * x[i]).sum::<f64>() <= 1.0,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                let p = [x[0], x[1]];
                if (0..n).any(|i| seg_dist(p, vertices[i], vertices[(i + 1) % n]) == 0.0) {
                    return true;
                }
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let xc = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if p[0] < xc {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
            Shape::TetMesh { .. } => {
                let p = [x[0], x[1], x[2]];
                self.simplices().iter().any(|s| {
                    let v = &s.verts;
                    let tot = det3(sub3(v[1], v[0]), sub3(v[2], v[0]), sub3(v[3], v[0]));
                    let b = [
                        det3(sub3(v[1], p), sub3(v[2], p), sub3(v[3], p)) / tot,
                        det3(sub3(p, v[0]), sub3(v[2], v[0]), sub3(v[3], v[0])) / tot,
                        det3(sub3(v[1], v[0]), sub3(p, v[0]), sub3(v[3], v[0])) / tot,
                        det3(sub3(v[1], v[0]), sub3(v[2], v[0]), sub3(p, v[0])) / tot,
                    ];
                    b.iter().all(|&l| l >= -1e-15)
                })
            }
        }
    }

    /// Distance from the origin to ∂ω.
    pub fn origin_distance(&self) -> f64 {
        match self {
            Shape::Ball { .. } => 1.0,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| seg_dist([0.0, 0.0], vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            Shape::TetMesh { vertices, tets } => {
                // Boundary faces appear in exactly one tetrahedron.
                let mut faces: BTreeMap<[usize; 3], usize> = BTreeMap::new();
                for t in tets {
                    for skip in 0..4 {
                        let mut f: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| t[i]).collect();
                        f.sort_unstable();
                        *faces.entry([f[0], f[1], f[2]]).or_insert(0) += 1;
                    }
                }
                faces
                    .iter()
                    .filter(|(_, &c)| c == 1)
                    .map(|(f, _)| tri_dist([0.0; 3], vertices[f[0]], vertices[f[1]], vertices[f[2]]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Decomposition into signed simplices whose signed volumes sum to |ω|.
    /// Not available for the ball.
    pub fn simplices(&self) -> Vec<Simplex> {
        match self {
            Shape::Ball { .. } => Vec::new(),
            Shape::Polygon { vertices } => {
                let v = Self::ccw_polygon(vertices);
                let p0 = v[0];
                let mut out = Vec::new();
                for i in 1..v.len() - 1 {
                    let (a, b) = (v[i], v[i + 1]);
                    let area = 0.5 * det2([a[0] - p0[0], a[1] - p0[1]], [b[0] - p0[0], b[1] - p0[1]]);
                    if area == 0.0 {
                        continue;
                    }
                    out.push(Simplex {
                        verts: vec![[p0[0], p0[1], 0.0], [a[0], a[1], 0.0], [b[0], b[1], 0.0]],
                        volume: area,
                    });
                }
                out
            }
            Shape::TetMesh { vertices, tets } => tets
                .iter()
                .map(|t| {
                    let mut verts: Vec<[f64; 3]> = t.iter().map(|&i| vertices[i]).collect();
                    let mut vol = det3(
                        sub3(verts[1], verts[0]),
                        sub3(verts[2], verts[0]),
                        sub3(verts[3], verts[0]),
                    ) / 6.0;
                    if vol < 0.0 {
                        verts.swap(2, 3);
                        vol = -vol;
                    }
                    Simplex { verts, volume: vol }
                })
                .collect(),
        }
    }

    /// Invariance under every coordinate sign flip.
    pub fn is_symmetric(&self) -> bool {
        let pts: Vec<[f64; 3]> = match self {
            Shape::Ball { .. } => return true,
            Shape::Polygon { vertices } => vertices.iter().map(|v| [v[0], v[1], 0.0]).collect(),
            Shape::TetMesh { vertices, .. } => vertices.clone(),
        };
        let tol = 1e-12 * self.radius().max(1.0);
        (0..self.dim().n()).all(|axis| {
            pts.iter().all(|p| {
                let mut q = *p;
                q[axis] = -q[axis];
                pts.iter().any(|r| dist3(&q, r) <= tol)
            })
        })
    }
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| det2([q[0] - p[0], q[1] - p[1]], [r[0] - p[0], r[1] - p[1]]);
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Exact moments M_α = ∫_ω x^α dx for |α| ≤ n_max.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentTable {
    pub dim: Dim,
    pub n_max: usize,
    values: BTreeMap<Exps, f64>,
}

/// Γ(m/2) for a positive integer m.
fn gamma_half(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        factorial(m / 2 - 1)
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut k = 1;
        while k < m {
            g *= k as f64 / 2.0;
            k += 2;
        }
        g
    }
}

/// ∫ over the unit ball of x^α.
pub fn ball_moment(dim: usize, e: &Exps) -> f64 {
    if e[..dim].iter().any(|&v| v % 2 == 1) {
        return 0.0;
    }
    let deg = exps_degree(e);
    if deg == 0 {
        // exact |B|, so constant-data coefficients reproduce closed forms bit for bit
        return if dim == 2 { std::f64::consts::PI } else { 4.0 * std::f64::consts::PI / 3.0 };
    }
    let num: f64 = e[..dim].iter().map(|&v| gamma_half(v as usize + 1)).product();
    let sum_beta2: usize = e[..dim].iter().map(|&v| v as usize + 1).sum();
    2.0 * num / gamma_half(sum_beta2) / (deg + dim) as f64
}

/// ∫ over the reference simplex {λ ≥ 0, Σλ ≤ 1} of λ^γ.
fn ref_simplex_monomial(dim: usize, g: &Exps) -> f64 {
    let num: f64 = g[..dim].iter().map(|&v| factorial(v as usize)).product();
    num / factorial(exps_degree(g) + dim)
}

/// Exact ∫_T x^α over a simplex, signed by its stored volume.
pub fn simplex_moment(s: &Simplex, dim: usize, e: &Exps) -> f64 {
    let v0 = s.verts[0];
    let subs: Vec<Poly> = (0..dim)
        .map(|i| {
            let mut p = Poly::constant(dim, v0[i]);
            for j in 0..dim {
                let mut ej = [0u8; 3];
                ej[j] = 1;
                p.add_term(ej, s.verts[j + 1][i] - v0[i]);
            }
            p
        })
        .collect();
    let mono = Poly::monomial(dim, *e, 1.0).compose(&subs);
    let ref_vol = 1.0 / factorial(dim);
    let jac = s.volume / ref_vol;
    jac * mono.terms().map(|(g, c)| c * ref_simplex_monomial(dim, g)).sum::<f64>()
}

/// Moments of `shape` up to total degree `n_max` (at most 12).
pub fn compute_moments(shape: &Shape, n_max: usize) -> Result<MomentTable> {
    if n_max > 12 {
        return Err(Error::OrderTooHigh { order: n_max, max: 12 });
    }
    shape.check_structure()?;
    let dim = shape.dim();
    let d = dim.n();
    let simplices = shape.simplices();
    let mut values = BTreeMap::new();
    for deg in 0..=n_max {
        for e in multi_indices(d, deg) {
            let v = match shape {
                Shape::Ball { .. } => ball_moment(d, &e),
                _ => simplices.iter().map(|s| simplex_moment(s, d, &e)).sum(),
            };
            values.insert(e, v);
        }
    }
    Ok(MomentTable { dim, n_max, values })
}

impl MomentTable {
    pub fn measure(&self) -> f64 {
        self.values[&[0, 0, 0]]
    }

    pub fn get(&self, e: &Exps) -> Result<f64> {
        let deg = exps_degree(e);
        if deg > self.n_max {
            return Err(Error::MomentTableTooSmall { needed: deg, available: self.n_max });
        }
        Ok(self.values[e])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exps, &f64)> {
        self.values.iter()
    }

    /// Σ c_α M_α.
    pub fn weighted_moment(&self, p: &Poly) -> Result<f64> {
        let mut s = 0.0;
        for (e, c) in p.terms() {
            s += c * self.get(e)?;
        }
        Ok(s)
    }

    /// (1/|ω|) Σ c_α M_α, computed from the normalized table so that the
    /// constant monomial contributes its coefficient exactly.
    pub fn mean_moment(&self, p: &Poly) -> Result<f64> {
        let m0 = self.measure();
        let mut s = 0.0;
        for (e, c) in p.terms() {
            let m = if exps_degree(e) == 0 { 1.0 } else { self.get(e)? / m0 };
            s += c * m;
        }
        Ok(s)
    }
}

/// Taylor jets at x0 of the data polynomials.
#[derive(Clone, Debug)]
pub struct DataJet {
    pub dim: Dim,
    pub x0: Vec<f64>,
    /// y ↦ (f1 - f2)(x0 + y)
    pub diff: Poly,
    pub f1: Poly,
    pub f2: Poly,
    pub u_star: Poly,
}

impl DataJet {
    pub fn new(dim: Dim, x0: &[f64], f1: &Poly, f2: &Poly, u_star: &Poly) -> Self {
        let f1s = f1.shift(x0);
        let f2s = f2.shift(x0);
        DataJet {
            dim,
            x0: x0.to_vec(),
            diff: f1s.sub(&f2s),
            f1: f1s,
            f2: f2s,
            u_star: u_star.shift(x0),
        }
    }

    /// F^(k)(y) = ∇^{k-2}(f1 - f2)(x0)[y]^{k-2} / (k-2)!; zero for k < 2.
    pub fn f_polynomial(&self, k: usize) -> Poly {
        if k < 2 {
            return Poly::zero(self.dim.n());
        }
        self.diff.homogeneous_part(k - 2)
    }

    /// a_j(y) = ∇^j(f2 - f1)(x0)[y]^j / j!.
    pub fn a_polynomial(&self, j: usize) -> Poly {
        self.diff.homogeneous_part(j).scale(-1.0)
    }

    /// (f1 - f2)(x0).
    pub fn jump(&self) -> f64 {
        self.diff.coeff(&[0, 0, 0])
    }

    /// Whether f1 and f2 are constants.
    pub fn constant_data(&self) -> bool {
        self.f1.is_constant() && self.f2.is_constant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> Shape {
        Shape::Polygon { vertices: vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]] }
    }

    #[test]
    fn ball_moments_closed_form() {
        let t2 = compute_moments(&Shape::unit_ball(Dim::Two), 4).unwrap();
        assert!((t2.get(&[0, 0, 0]).unwrap() - PI).abs() < 1e-15);
        assert_eq!(t2.get(&[1, 0, 0]).unwrap(), 0.0);
        assert!((t2.get(&[2, 0, 0]).unwrap() - PI / 4.0).abs() < 1e-15);
        let t3 = compute_moments(&Shape::unit_ball(Dim::Three), 4).unwrap();
        assert!((t3.get(&[0, 0, 0]).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((t3.get(&[2, 0, 0]).unwrap() - 4.0 * PI / 15.0).abs() < 1e-15);
        // ∫ x²y² over the unit ball in 3D = 4π/105
        assert!((t3.get(&[2, 2, 0]).unwrap() - 4.0 * PI / 105.0).abs() < 1e-15);
    }

    #[test]
    fn square_moments_are_products() {
        let t = compute_moments(&square(), 6).unwrap();
        let one_d = |p: u8| if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
        for (e, v) in t.iter() {
            assert!((v - one_d(e[0]) * one_d(e[1])).abs() < 1e-14, "{e:?} {v}");
        }
        assert!(square().is_symmetric());
    }

    #[test]
    fn triangle_not_symmetric() {
        let tri = Shape::Polygon { vertices: vec![[-0.2, -0.2], [0.8, -0.2], [-0.2, 0.8]] };
        assert!(!tri.is_symmetric());
        tri.validate().unwrap();
        let bad = Shape::Polygon { vertices: vec![[0.1, 0.1], [1.0, 0.1], [0.1, 1.0]] };
        assert!(matches!(bad.validate(), Err(Error::OriginNotInterior(_))));
    }

    #[test]
    fn cube_tets_match_product_moments() {
        let shape = cube_mesh();
        shape.validate().unwrap();
        assert!(shape.is_symmetric());
        let t = compute_moments(&shape, 4).unwrap();
        assert!((t.measure() - 8.0).abs() < 1e-13);
        assert!((t.get(&[2, 0, 0]).unwrap() - 8.0 / 3.0).abs() < 1e-13);
        assert!((t.get(&[2, 2, 0]).unwrap() - 8.0 / 9.0).abs() < 1e-13);
        assert!(t.get(&[1, 0, 0]).unwrap().abs() < 1e-14);
        assert!((shape.origin_distance() - 1.0).abs() < 1e-14);
    }

    pub(crate) fn cube_mesh() -> Shape {
        let mut vertices = Vec::new();
        for i in 0..8 {
            vertices.push([
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        // Six tetrahedra around the main diagonal 0-7.
        let tets = vec![[0, 1, 3, 7], [0, 3, 2, 7], [0, 2, 6, 7], [0, 6, 4, 7], [0, 4, 5, 7], [0, 5, 1, 7]];
        Shape::TetMesh { vertices, tets }
    }

    #[test]
    fn jets() {
        let f1 = Poly::from_terms(2, [([2, 0, 0], 1.0)]);
        let f2 = Poly::zero(2);
        let jet = DataJet::new(Dim::Two, &[0.0, 0.0], &f1, &f2, &Poly::zero(2));
        assert_eq!(jet.f_polynomial(4), Poly::monomial(2, [2, 0, 0], 1.0));
        assert!(jet.f_polynomial(1).is_zero());
        let jet = DataJet::new(Dim::Two, &[0.5, 0.0], &f1, &f2, &Poly::zero(2));
        assert_eq!(jet.f_polynomial(3), Poly::monomial(2, [1, 0, 0], 1.0));
        assert_eq!(jet.f_polynomial(2), Poly::constant(2, 0.25));
    }
}
