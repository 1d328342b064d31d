//! n-simplices, barycentric coordinates and the evenly spaced lattices used
//! as interpolation centers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::binomial;

/// Relative threshold (against the diameter) below which a simplex counts as
/// degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

pub type Point = Vec<f64>;

/// An n-simplex in `R^n` given by its `n + 1` vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidArgument(
                "a simplex needs at least two vertices".into(),
            ));
        }
        let n = vertices.len() - 1;
        for v in &vertices {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(
                    "non-finite vertex coordinate".into(),
                ));
            }
        }
        let simplex = Simplex { vertices };
        let diameter = simplex.diameter();
        let smallest_sv = simplex
            .edge_matrix()
            .singular_values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if !(diameter > 0.0) || smallest_sv <= DEGENERACY_TOLERANCE * diameter {
            return Err(Error::DegenerateSimplex {
                smallest_sv,
                diameter,
            });
        }
        Ok(simplex)
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Columns are the edge vectors `v_{i+1} - v_1`.
    fn edge_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let v1 = &self.vertices[0];
        DMatrix::from_fn(n, n, |row, col| self.vertices[col + 1][row] - v1[row])
    }

    /// Largest Euclidean distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(distance(a, b));
            }
        }
        best
    }

    /// Barycentric coordinates of `x`. They sum to one and may be negative
    /// when `x` lies outside the simplex.
    pub fn barycentric_coords(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        let v1 = &self.vertices[0];
        let rhs = DVector::from_iterator(n, x.iter().zip(v1).map(|(xi, vi)| xi - vi));
        let tail =
            self.edge_matrix()
                .full_piv_lu()
                .solve(&rhs)
                .ok_or(Error::DegenerateSimplex {
                    smallest_sv: 0.0,
                    diameter: self.diameter(),
                })?;
        let mut coords = Vec::with_capacity(n + 1);
        coords.push(1.0 - tail.iter().sum::<f64>());
        coords.extend(tail.iter());
        Ok(coords)
    }

    /// The point `Σ c_i v_i` for a barycentric coordinate vector.
    pub fn point_from_barycentric(&self, coords: &[f64]) -> Result<Point> {
        if coords.len() != self.vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vertices.len(),
                found: coords.len(),
            });
        }
        let mut p = vec![0.0; self.dim()];
        for (c, v) in coords.iter().zip(&self.vertices) {
            for (pi, vi) in p.iter_mut().zip(v) {
                *pi += c * vi;
            }
        }
        Ok(p)
    }

    /// Evenly spaced points of degree `l`: all points whose barycentric
    /// coordinates are `k_i / l` with non-negative integers summing to `l`.
    pub fn evenly_spaced_points(&self, l: usize) -> Result<CenterSet> {
        if l == 0 {
            return Err(Error::InvalidArgument("lattice degree must be >= 1".into()));
        }
        let n = self.dim();
        let count = binomial((n + l) as u64, n as u64)?;
        let count = usize::try_from(count)
            .map_err(|_| Error::Overflow(format!("lattice size C({}, {n})", n + l)))?;

        let mut indices = Vec::with_capacity(count);
        let mut current = Vec::with_capacity(n + 1);
        compositions(l, n + 1, &mut current, &mut indices);
        debug_assert_eq!(indices.len(), count);

        let points = indices
            .iter()
            .map(|k| {
                let coords: Vec<f64> = k.iter().map(|&ki| ki as f64 / l as f64).collect();
                self.point_from_barycentric(&coords)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(CenterSet {
            simplex: self.clone(),
            degree: l,
            points,
            barycentric_indices: indices,
        })
    }
}

impl TryFrom<Vec<Point>> for Simplex {
    type Error = Error;

    fn try_from(vertices: Vec<Point>) -> Result<Self> {
        Simplex::new(vertices)
    }
}

impl From<Simplex> for Vec<Point> {
    fn from(s: Simplex) -> Self {
        s.vertices
    }
}

// Lexicographically decreasing enumeration of (k_1, ..., k_parts) summing to total.
fn compositions(total: usize, parts: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        current.push(total);
        out.push(current.clone());
        current.pop();
        return;
    }
    for k in (0..=total).rev() {
        current.push(k);
        compositions(total - k, parts - 1, current, out);
        current.pop();
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Regular n-simplex with every edge of length `d`, with its first vertex at
/// the origin.
pub fn regular_simplex(n: usize, d: f64) -> Result<Simplex> {
    if n == 0 || !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "regular_simplex needs n >= 1 and d > 0, got n = {n}, d = {d}"
        )));
    }
    let mut vertices: Vec<Point> = vec![vec![0.0; n]];
    for k in 1..=n {
        // Place the new vertex above the centroid of the k existing ones.
        let mut v = vec![0.0; n];
        for prev in &vertices {
            for (vi, pi) in v.iter_mut().zip(prev).take(k - 1) {
                *vi += pi / k as f64;
            }
        }
        let kf = k as f64;
        v[k - 1] = d * ((kf + 1.0) / (2.0 * kf)).sqrt();
        vertices.push(v);
    }
    Simplex::new(vertices)
}

/// Interpolation centers: the evenly spaced lattice of a given degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterSet {
    pub simplex: Simplex,
    pub degree: usize,
    pub points: Vec<Point>,
    pub barycentric_indices: Vec<Vec<usize>>,
}

impl CenterSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.simplex.dim()
    }

    /// The same centers in a different order. `perm[i]` is the old index
    /// of the new `i`-th center.
    pub fn permuted(&self, perm: &[usize]) -> Result<CenterSet> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: perm.len(),
            });
        }
        for &p in perm {
            if p >= self.len() || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(CenterSet {
            simplex: self.simplex.clone(),
            degree: self.degree,
            points: perm.iter().map(|&i| self.points[i].clone()).collect(),
            barycentric_indices: perm
                .iter()
                .map(|&i| self.barycentric_indices[i].clone())
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_interval() -> Simplex {
        Simplex::new(vec![vec![0.0], vec![1.0]]).unwrap()
    }

    fn right_triangle() -> Simplex {
        Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn barycentric_examples() {
        let t = right_triangle();
        let c = t.barycentric_coords(&[0.0, 0.0]).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && c[1].abs() < 1e-14 && c[2].abs() < 1e-14);

        let centroid = [1.0 / 3.0, 1.0 / 3.0];
        for ci in t.barycentric_coords(&centroid).unwrap() {
            assert!((ci - 1.0 / 3.0).abs() < 1e-14);
        }

        let c = unit_interval().barycentric_coords(&[0.25]).unwrap();
        assert!((c[0] - 0.75).abs() < 1e-15 && (c[1] - 0.25).abs() < 1e-15);

        // outside point gets a negative coordinate
        let c = t.barycentric_coords(&[2.0, 0.0]).unwrap();
        assert!(c[0] < 0.0);
    }

    #[test]
    fn degenerate_simplex_rejected() {
        let err = Simplex::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(matches!(err, Err(Error::DegenerateSimplex { .. })));
        let err = Simplex::new(vec![vec![0.0], vec![0.0]]);
        assert!(matches!(err, Err(Error::DegenerateSimplex { .. })));
        assert!(Simplex::new(vec![vec![0.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn lattice_examples() {
        let cs = unit_interval().evenly_spaced_points(2).unwrap();
        let xs: Vec<f64> = cs.points.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);

        let t = right_triangle();
        let cs = t.evenly_spaced_points(1).unwrap();
        assert_eq!(cs.points, t.vertices().to_vec());

        assert_eq!(t.evenly_spaced_points(3).unwrap().len(), 10);
        assert!(t.evenly_spaced_points(0).is_err());
    }

    #[test]
    fn lattice_order_is_lex_decreasing() {
        let cs = right_triangle().evenly_spaced_points(2).unwrap();
        assert_eq!(
            cs.barycentric_indices,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
    }

    #[test]
    fn lattice_counts_match_binomial() {
        for n in 1..=4 {
            let s = regular_simplex(n, 1.0).unwrap();
            for l in 1..=6 {
                let cs = s.evenly_spaced_points(l).unwrap();
                assert_eq!(cs.len() as u64, binomial((n + l) as u64, n as u64).unwrap());
                for (p, k) in cs.points.iter().zip(&cs.barycentric_indices) {
                    assert_eq!(k.iter().sum::<usize>(), l);
                    let bc = s.barycentric_coords(p).unwrap();
                    for (b, ki) in bc.iter().zip(k) {
                        // exact multiples of 1/l, inside the simplex
                        assert!((b - *ki as f64 / l as f64).abs() < 1e-12);
                        assert!(*b > -1e-12 && *b < 1.0 + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn diameter_examples() {
        let s = Simplex::new(vec![vec![0.0], vec![0.05]]).unwrap();
        assert!((s.diameter() - 0.05).abs() < 1e-17);
        assert!((right_triangle().diameter() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regular_simplex_edges() {
        let s = regular_simplex(1, 1.0).unwrap();
        assert_eq!(s.vertices(), &[vec![0.0], vec![1.0]]);
        for (n, d) in [(2, 1.0), (3, 0.5), (4, 1.0 / 16.0), (6, 2.0)] {
            let s = regular_simplex(n, d).unwrap();
            let v = s.vertices();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    assert!((distance(&v[i], &v[j]) - d).abs() < 1e-12, "n = {n}");
                }
            }
            assert!((s.diameter() - d).abs() < 1e-12);
            assert!(v[0].iter().all(|&x| x == 0.0));
        }
        assert!(regular_simplex(0, 1.0).is_err());
        assert!(regular_simplex(2, 0.0).is_err());
    }

    #[test]
    fn json_is_a_vertex_list() {
        let s = right_triangle();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[[0.0,0.0],[1.0,0.0],[0.0,1.0]]");
        let back: Simplex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Simplex>("[[0.0],[0.0]]").is_err());
    }

    #[test]
    fn permuted_rejects_non_permutations() {
        let cs = unit_interval().evenly_spaced_points(2).unwrap();
        assert!(cs.permuted(&[0, 0, 1]).is_err());
        let p = cs.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.points[0], vec![1.0]);
    }

    proptest::proptest! {
        #[test]
        fn barycentric_round_trip(
            raw in proptest::collection::vec(0.01f64..1.0, 4),
            shift in -0.5f64..0.5,
        ) {
            let s = regular_simplex(3, 0.7).unwrap();
            // coordinates summing to one, possibly negative
            let total: f64 = raw.iter().sum();
            let mut coords: Vec<f64> = raw.iter().map(|r| r / total).collect();
            coords[0] += shift;
            coords[1] -= shift;
            let x = s.point_from_barycentric(&coords).unwrap();
            let back = s.barycentric_coords(&x).unwrap();
            for (a, b) in coords.iter().zip(&back) {
                proptest::prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
