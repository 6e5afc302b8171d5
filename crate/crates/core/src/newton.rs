//! Newton polytopes of Laurent polynomials: hull, faces, Newton function,
//! normalized volume, convenience and Kouchnirenko non-degeneracy.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::groebner::{saturate_torus, Budget, GroebnerError, Ideal, MonomialOrder};
use crate::laurent::{ExponentVector, LaurentPolynomial};
use crate::linalg;
use crate::rational::{int, Rational};

/// Largest arity for which faces are enumerated.
pub const MAX_ARITY: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("the zero polynomial has no Newton polytope")]
    EmptyPolynomial,
    #[error("polynomial has no variables")]
    NoVariables,
    #[error("the origin is not an interior point of the Newton polytope")]
    NotConvenient,
    #[error("Newton polytope is not full-dimensional (dimension {dimension} in arity {arity})")]
    DegeneratePolytope { dimension: usize, arity: usize },
    #[error("face enumeration supports at most {MAX_ARITY} variables, got {arity}")]
    ArityLimitExceeded { arity: usize },
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// Supporting half-space `⟨m, normal⟩ ≤ offset` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facet {
    #[serde(serialize_with = "ser_int_vec")]
    pub normal: Vec<i64>,
    #[serde(with = "crate::rational::serde_str")]
    pub offset: Rational,
}

fn ser_int_vec<S: serde::Serializer>(v: &[i64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// A face, recorded by the support points of `f` lying on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dimension: usize,
    pub points: Vec<ExponentVector>,
    pub vertices: Vec<ExponentVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolytope {
    arity: usize,
    dimension: usize,
    vertices: Vec<ExponentVector>,
    facets: Vec<Facet>,
    #[serde(skip)]
    support: Vec<ExponentVector>,
    /// Proper faces plus the polytope itself (last).
    #[serde(skip)]
    faces: Vec<Face>,
}

fn affine_dimension(points: &[&ExponentVector]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let rows: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(points[0].iter()).map(|(a, b)| int(a - b)).collect())
        .collect();
    linalg::rank(&rows)
}

fn primitive(v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g == 0 {
        v
    } else {
        v.into_iter().map(|x| x / g).collect()
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinates on which the projection is injective over the affine hull.
fn hull_coordinates(points: &[&ExponentVector]) -> Vec<usize> {
    let mut rows: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(points[0].iter()).map(|(a, b)| int(a - b)).collect())
        .collect();
    if rows.is_empty() {
        return Vec::new();
    }
    linalg::rref(&mut rows)
}

/// Candidate outward normals in `d ≤ 3` dimensions from `d`-subsets of points.
fn candidate_normals(pts: &[Vec<i64>], d: usize) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    match d {
        1 => {
            out.insert(vec![1]);
            out.insert(vec![-1]);
        }
        2 => {
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let (dx, dy) = (pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]);
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let u = primitive(vec![-dy, dx]);
                    out.insert(u.iter().map(|x| -x).collect());
                    out.insert(u);
                }
            }
        }
        3 => {
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    for k in j + 1..pts.len() {
                        let a: Vec<i64> = (0..3).map(|c| pts[j][c] - pts[i][c]).collect();
                        let b: Vec<i64> = (0..3).map(|c| pts[k][c] - pts[i][c]).collect();
                        let cross = vec![
                            a[1] * b[2] - a[2] * b[1],
                            a[2] * b[0] - a[0] * b[2],
                            a[0] * b[1] - a[1] * b[0],
                        ];
                        if cross.iter().all(|&x| x == 0) {
                            continue;
                        }
                        let u = primitive(cross);
                        out.insert(u.iter().map(|x| -x).collect());
                        out.insert(u);
                    }
                }
            }
        }
        _ => {}
    }
    out
}

impl NewtonPolytope {
    /// Newton polytope of a nonzero polynomial.
    pub fn of(f: &LaurentPolynomial) -> Result<Self, GeometryError> {
        if f.is_zero() {
            return Err(GeometryError::EmptyPolynomial);
        }
        let n = f.arity();
        if n == 0 {
            return Err(GeometryError::NoVariables);
        }
        if n > MAX_ARITY {
            return Err(GeometryError::ArityLimitExceeded { arity: n });
        }
        Ok(Self::from_points(n, f.support()))
    }

    /// Convex hull of a nonempty point set (arity ≤ 3).
    pub fn from_points(arity: usize, mut support: Vec<ExponentVector>) -> Self {
        support.sort();
        support.dedup();
        let refs: Vec<&ExponentVector> = support.iter().collect();
        let dimension = affine_dimension(&refs);
        let coords = hull_coordinates(&refs);
        let projected: Vec<Vec<i64>> = support
            .iter()
            .map(|p| coords.iter().map(|&c| p[c]).collect())
            .collect();

        // facets of the hull inside its affine span
        let mut facet_sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut facets = Vec::new();
        for u in candidate_normals(&projected, dimension) {
            let values: Vec<i64> = projected.iter().map(|p| dot(p, &u)).collect();
            let max = *values.iter().max().expect("nonempty support");
            let on: BTreeSet<usize> = (0..support.len()).filter(|&i| values[i] == max).collect();
            let on_refs: Vec<&ExponentVector> = on.iter().map(|&i| &support[i]).collect();
            if affine_dimension(&on_refs) + 1 != dimension || facet_sets.contains(&on) {
                continue;
            }
            if dimension == arity {
                facets.push(Facet {
                    normal: u.clone(),
                    offset: int(max),
                });
            }
            facet_sets.push(on);
        }

        // faces: closure of facets under intersection
        let mut sets: BTreeSet<BTreeSet<usize>> = facet_sets.iter().cloned().collect();
        loop {
            let current: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
            let mut grew = false;
            for a in &current {
                for b in &current {
                    let c: BTreeSet<usize> = a.intersection(b).copied().collect();
                    if !c.is_empty() && sets.insert(c) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        if dimension == 0 {
            sets.clear();
        }
        sets.insert((0..support.len()).collect());

        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|s| {
                let pts: Vec<ExponentVector> = s.iter().map(|&i| support[i].clone()).collect();
                let refs: Vec<&ExponentVector> = pts.iter().collect();
                Face {
                    dimension: affine_dimension(&refs),
                    points: pts,
                    vertices: Vec::new(),
                }
            })
            .collect();
        faces.sort_by(|a, b| a.dimension.cmp(&b.dimension).then_with(|| a.points.cmp(&b.points)));
        let vertices: Vec<ExponentVector> = faces
            .iter()
            .filter(|f| f.dimension == 0)
            .map(|f| f.points[0].clone())
            .collect();
        for face in faces.iter_mut() {
            face.vertices = face.points.iter().filter(|p| vertices.contains(p)).cloned().collect();
        }
        facets.sort_by(|a, b| a.normal.cmp(&b.normal));
        Self {
            arity,
            dimension,
            vertices,
            facets,
            support,
            faces,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dimension == self.arity
    }

    /// Extreme points, sorted by the graded lexicographic order.
    pub fn vertices(&self) -> &[ExponentVector] {
        &self.vertices
    }

    /// Facet inequalities (empty unless full-dimensional).
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// All faces including the polytope itself, by increasing dimension.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn support(&self) -> &[ExponentVector] {
        &self.support
    }

    /// Origin strictly inside: full-dimensional with every facet offset positive.
    pub fn is_convenient(&self) -> bool {
        self.is_full_dimensional() && self.facets.iter().all(|f| f.offset.is_positive())
    }

    /// `ν(m) = max(0, max_F ⟨m,u_F⟩/c_F)`.
    pub fn newton_degree(&self, m: &ExponentVector) -> Result<Rational, GeometryError> {
        if !self.is_convenient() {
            return Err(GeometryError::NotConvenient);
        }
        Ok(self
            .facets
            .iter()
            .map(|f| int(m.dot(&f.normal)) / &f.offset)
            .fold(Rational::zero(), |acc, x| if x > acc { x } else { acc }))
    }

    /// Membership `m ∈ t·Γ` by direct facet evaluation.
    pub fn contains_scaled(&self, m: &ExponentVector, t: &Rational) -> bool {
        self.facets.iter().all(|f| int(m.dot(&f.normal)) <= t * &f.offset)
    }

    /// Lattice points of `t·Γ` for an integer `t ≥ 0`, sorted.
    pub fn lattice_points(&self, t: i64) -> Vec<ExponentVector> {
        let n = self.arity;
        let lo: Vec<i64> = (0..n).map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap_or(0) * t).collect();
        let hi: Vec<i64> = (0..n).map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap_or(0) * t).collect();
        let tt = int(t);
        let mut out = Vec::new();
        let mut cur = lo.clone();
        'outer: loop {
            let m = ExponentVector(cur.clone());
            if self.contains_scaled(&m, &tt) {
                out.push(m);
            }
            for i in 0..n {
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    continue 'outer;
                }
                cur[i] = lo[i];
            }
            break;
        }
        out.sort();
        out
    }

    /// `n!·vol(Γ)` through a pulling triangulation of the face lattice.
    pub fn normalized_volume(&self) -> Result<u64, GeometryError> {
        if !self.is_full_dimensional() {
            return Err(GeometryError::DegeneratePolytope {
                dimension: self.dimension,
                arity: self.arity,
            });
        }
        let top = self.faces.len() - 1;
        let mut total = BigInt::zero();
        for simplex in self.triangulate(top) {
            let rows: Vec<Vec<BigInt>> = simplex[1..]
                .iter()
                .map(|p| p.iter().zip(simplex[0].iter()).map(|(a, b)| BigInt::from(a - b)).collect())
                .collect();
            total += determinant(rows).abs();
        }
        Ok(total.to_u64().expect("volume fits in u64"))
    }

    fn triangulate(&self, face: usize) -> Vec<Vec<ExponentVector>> {
        let f = &self.faces[face];
        if f.dimension == 0 {
            return vec![vec![f.points[0].clone()]];
        }
        let apex = f.vertices.iter().min().expect("face has a vertex").clone();
        let mut out = Vec::new();
        for (g, sub) in self.faces.iter().enumerate() {
            if sub.dimension + 1 == f.dimension
                && sub.points.iter().all(|p| f.points.contains(p))
                && !sub.points.contains(&apex)
            {
                for mut s in self.triangulate(g) {
                    s.insert(0, apex.clone());
                    out.push(s);
                }
            }
        }
        out
    }
}

fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::from(1)
    } else {
        &m[n - 1][n - 1] * sign
    }
}

pub fn newton_polytope(f: &LaurentPolynomial) -> Result<NewtonPolytope, GeometryError> {
    NewtonPolytope::of(f)
}

pub fn is_convenient(f: &LaurentPolynomial) -> bool {
    NewtonPolytope::of(f).is_ok_and(|p| p.is_convenient())
}

/// Kouchnirenko non-degeneracy: for every face `σ` of `Γ(f)` not containing
/// the origin, the log-derivatives of `f_σ` have no common zero in the torus.
pub fn is_nondegenerate(f: &LaurentPolynomial) -> Result<bool, GeometryError> {
    is_nondegenerate_with(f, Budget::default())
}

pub fn is_nondegenerate_with(f: &LaurentPolynomial, budget: Budget) -> Result<bool, GeometryError> {
    Ok(degenerate_face(f, budget)?.is_none())
}

/// First face (by dimension) whose truncation has a torus critical point.
pub fn degenerate_face(f: &LaurentPolynomial, budget: Budget) -> Result<Option<Face>, GeometryError> {
    let poly = NewtonPolytope::of(f)?;
    let n = f.arity();
    let origin = ExponentVector::zero(n);
    for face in poly.faces() {
        if face_contains(&poly, face, &origin) {
            continue;
        }
        let f_sigma = f.restrict(|e| face.points.contains(e));
        if f_sigma.len() == 1 {
            // a single nonconstant monomial never vanishes on the torus
            continue;
        }
        let gens: Vec<LaurentPolynomial> = (0..n).map(|i| f_sigma.log_derivative(i)).collect();
        let sat = saturate_torus(&Ideal::from_laurent(n, gens), budget)?;
        if !sat.groebner_basis(MonomialOrder::GrevLex, budget)?.is_unit() {
            return Ok(Some(face.clone()));
        }
    }
    Ok(None)
}

/// Whether `m` lies in the convex hull of a face.
fn face_contains(poly: &NewtonPolytope, face: &Face, m: &ExponentVector) -> bool {
    if face.points.contains(m) {
        return true;
    }
    let refs: Vec<&ExponentVector> = face.points.iter().collect();
    let mut with: Vec<&ExponentVector> = refs.clone();
    with.push(m);
    if affine_dimension(&with) != face.dimension {
        return false;
    }
    let sub = NewtonPolytope::from_points(poly.arity, face.points.iter().cloned().chain([m.clone()]).collect());
    sub.vertices.iter().all(|v| v != m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_laurent;
    use crate::rational::rat;

    fn poly(text: &str) -> LaurentPolynomial {
        let vars: &[&str] = if text.contains('z') {
            &["x", "y", "z"]
        } else if text.contains('y') {
            &["x", "y"]
        } else {
            &["x"]
        };
        parse_laurent(text, vars).unwrap()
    }

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn triangle_of_the_plane_mirror() {
        let p = newton_polytope(&poly("x + y + x^-1*y^-1")).unwrap();
        let mut v = p.vertices().to_vec();
        v.sort();
        let mut expected = vec![ev(&[1, 0]), ev(&[0, 1]), ev(&[-1, -1])];
        expected.sort();
        assert_eq!(v, expected);
        assert_eq!(p.facets().len(), 3);
        assert!(p.is_convenient());
        assert_eq!(p.normalized_volume().unwrap(), 3);
        // 3 vertices + 3 edges + the triangle
        assert_eq!(p.faces().len(), 7);
    }

    #[test]
    fn segments() {
        let p = newton_polytope(&poly("x + x^-1")).unwrap();
        assert_eq!(p.vertices(), &[ev(&[-1]), ev(&[1])]);
        assert_eq!(p.normalized_volume().unwrap(), 2);
        let p = newton_polytope(&poly("x^2 + x^-1")).unwrap();
        assert_eq!(p.newton_degree(&ev(&[1])).unwrap(), rat(1, 2));
        assert_eq!(p.newton_degree(&ev(&[-1])).unwrap(), rat(1, 1));
        assert_eq!(p.newton_degree(&ev(&[0])).unwrap(), rat(0, 1));
        assert_eq!(p.normalized_volume().unwrap(), 3);
    }

    #[test]
    fn convenience() {
        assert!(is_convenient(&poly("x + y + x^-1*y^-1")));
        assert!(is_convenient(&poly("x + x^-1")));
        assert!(!is_convenient(&poly("x + y")));
        assert!(!is_convenient(&poly("x + y + 1")));
        // origin on the boundary
        assert!(!is_convenient(&poly("x + x^-1 + y")));
        let p = newton_polytope(&poly("x + y")).unwrap();
        assert_eq!(p.dimension(), 1);
        assert!(matches!(p.newton_degree(&ev(&[0, 0])), Err(GeometryError::NotConvenient)));
        assert!(matches!(p.normalized_volume(), Err(GeometryError::DegeneratePolytope { .. })));
    }

    #[test]
    fn diamond() {
        let p = newton_polytope(&poly("x + x^-1 + y + y^-1")).unwrap();
        assert_eq!(p.newton_degree(&ev(&[1, 1])).unwrap(), rat(2, 1));
        assert_eq!(p.normalized_volume().unwrap(), 4);
        assert_eq!(p.lattice_points(1).len(), 5);
        assert_eq!(p.lattice_points(2).len(), 13);
    }

    #[test]
    fn interior_support_points_are_not_vertices() {
        let p = newton_polytope(&poly("x^2 + 2*x*y + y^2 + x^-1*y^-1")).unwrap();
        assert_eq!(p.vertices().len(), 3);
        let edge = p
            .faces()
            .iter()
            .find(|f| f.dimension == 1 && f.points.contains(&ev(&[1, 1])))
            .unwrap();
        assert_eq!(edge.points.len(), 3);
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(is_nondegenerate(&poly("x + y + x^-1*y^-1")).unwrap());
        assert!(is_nondegenerate(&poly("x + x^-1")).unwrap());
        assert!(!is_nondegenerate(&poly("x^2 + 2*x*y + y^2 + x^-1*y^-1")).unwrap());
        assert!(is_nondegenerate(&poly("x^2 + 3*x*y + y^2 + x^-1*y^-1")).unwrap());
    }

    #[test]
    fn three_dimensional_simplex() {
        let f = poly("x + y + z + x^-1*y^-1*z^-1");
        let p = newton_polytope(&f).unwrap();
        assert!(p.is_convenient());
        assert_eq!(p.facets().len(), 4);
        assert_eq!(p.normalized_volume().unwrap(), 4);
        assert!(is_nondegenerate(&f).unwrap());
        // the octahedron
        let p = newton_polytope(&poly("x + x^-1 + y + y^-1 + z + z^-1")).unwrap();
        assert_eq!(p.facets().len(), 8);
        assert_eq!(p.normalized_volume().unwrap(), 8);
        // the cube
        let cube: Vec<ExponentVector> = (0..8)
            .map(|k| ev(&[if k & 1 == 0 { -1 } else { 1 }, if k & 2 == 0 { -1 } else { 1 }, if k & 4 == 0 { -1 } else { 1 }]))
            .collect();
        let p = NewtonPolytope::from_points(3, cube);
        assert_eq!(p.facets().len(), 6);
        assert_eq!(p.normalized_volume().unwrap(), 48);
    }

    #[test]
    fn arity_guard() {
        let f = parse_laurent("a + b + c + d", &["a", "b", "c", "d"]).unwrap();
        assert!(matches!(newton_polytope(&f), Err(GeometryError::ArityLimitExceeded { arity: 4 })));
        assert!(matches!(newton_polytope(&LaurentPolynomial::zero(2)), Err(GeometryError::EmptyPolynomial)));
    }
}
