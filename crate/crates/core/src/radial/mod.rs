//! `R^k` under the radial metric.
//!
//! Two points on a common line through the origin are at their Euclidean
//! distance; any other pair is joined through the origin, at distance
//! `‖x‖ + ‖y‖`. The space is a metric tree with uncountably many branches at
//! the origin, so it is never materialized: only pointwise queries and the
//! ball-width argument are implemented.

mod surd;

pub use surd::{SurdSum, Undecided};

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::rational::{format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadialError {
    #[error("radial points need dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ball radius must be positive")]
    NonpositiveRadius,
    #[error("epsilon must satisfy 0 < epsilon < r")]
    EpsilonOutOfRange,
    #[error("n must be at least 1")]
    ZeroN,
    #[error("no ray free of the generators was found")]
    NoFreeRay,
    #[error("lower-bound witness failed verification against generator {0}")]
    WitnessRejected(usize),
    #[error(transparent)]
    Undecided(#[from] Undecided),
}

pub type Result<T, E = RadialError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadialPoint {
    coords: Vec<Rational>,
}

impl RadialPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(RadialError::DimensionTooSmall(coords.len()));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![Rational::zero(); dim])
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(&self) -> Rational {
        dot(&self.coords, &self.coords)
    }

    pub fn norm(&self) -> SurdSum {
        SurdSum::sqrt(self.norm_sq())
    }

    pub fn scaled(&self, t: &Rational) -> RadialPoint {
        RadialPoint {
            coords: self.coords.iter().map(|c| c * t).collect(),
        }
    }

    /// `self + t (other - self)`, the Euclidean interpolation.
    pub fn lerp(&self, other: &RadialPoint, t: &Rational) -> RadialPoint {
        RadialPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
        }
    }

    fn minus(&self, other: &RadialPoint) -> Vec<Rational> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect()
    }
}

impl fmt::Display for RadialPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RadialPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        parts.serialize(s)
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Linear dependence of two vectors: every 2x2 minor vanishes.
fn parallel(a: &[Rational], b: &[Rational]) -> bool {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    true
}

fn check_dims(a: &RadialPoint, b: &RadialPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(RadialError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `x = λ y` for some real `λ` (or `y = 0 = x`): both on one line through the origin.
pub fn on_common_line(x: &RadialPoint, y: &RadialPoint) -> bool {
    parallel(&x.coords, &y.coords)
}

/// Both points on the same closed ray from the origin.
pub fn same_ray(x: &RadialPoint, y: &RadialPoint) -> bool {
    on_common_line(x, y) && !dot(&x.coords, &y.coords).is_negative()
}

/// The radial distance. Points on a common line through the origin use the
/// Euclidean norm of the difference (which for opposite rays already equals
/// `‖x‖ + ‖y‖`); all other pairs route through the origin.
pub fn radial_distance(x: &RadialPoint, y: &RadialPoint) -> Result<SurdSum> {
    check_dims(x, y)?;
    Ok(if on_common_line(x, y) {
        SurdSum::sqrt(dot(&x.minus(y), &x.minus(y)))
    } else {
        x.norm() + y.norm()
    })
}

/// `z` on the Euclidean segment from `p` to `q`.
fn on_euclidean_segment(p: &RadialPoint, q: &RadialPoint, z: &RadialPoint) -> bool {
    let pq = q.minus(p);
    let pz = z.minus(p);
    if pq.iter().all(Zero::is_zero) {
        return pz.iter().all(Zero::is_zero);
    }
    if !parallel(&pq, &pz) {
        return false;
    }
    let t = dot(&pz, &pq);
    !t.is_negative() && t <= dot(&pq, &pq)
}

/// The geodesic `[x, y]` as Euclidean pieces: one piece when `x` and `y`
/// share a line through the origin, otherwise `[x, 0]` and `[0, y]`.
pub fn radial_segment(x: &RadialPoint, y: &RadialPoint) -> Result<Vec<(RadialPoint, RadialPoint)>> {
    check_dims(x, y)?;
    if on_common_line(x, y) {
        Ok(vec![(x.clone(), y.clone())])
    } else {
        let o = RadialPoint::origin(x.dim())?;
        Ok(vec![(x.clone(), o.clone()), (o, y.clone())])
    }
}

/// `xy = xz + zy`, decided from the shape of the geodesic rather than by
/// comparing irrational sums.
pub fn radial_is_between(x: &RadialPoint, z: &RadialPoint, y: &RadialPoint) -> Result<bool> {
    check_dims(x, z)?;
    check_dims(z, y)?;
    Ok(radial_segment(x, y)?
        .iter()
        .any(|(p, q)| on_euclidean_segment(p, q, z)))
}

/// `B_r`, open or closed, in `R^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialBall {
    pub radius: Rational,
    pub open: bool,
    pub dim: usize,
}

impl RadialBall {
    pub fn new(radius: Rational, open: bool, dim: usize) -> Result<Self> {
        if !radius.is_positive() {
            return Err(RadialError::NonpositiveRadius);
        }
        if dim < 2 {
            return Err(RadialError::DimensionTooSmall(dim));
        }
        Ok(Self { radius, open, dim })
    }

    pub fn closed(radius: Rational) -> Result<Self> {
        Self::new(radius, false, 2)
    }

    pub fn contains(&self, p: &RadialPoint) -> bool {
        let r2 = &self.radius * &self.radius;
        let n2 = p.norm_sq();
        if self.open {
            n2 < r2
        } else {
            n2 <= r2
        }
    }
}

/// A width that may be infinite (unbounded sets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WidthValue {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for WidthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WidthValue::Finite(r) => f.write_str(&format_rational(r)),
            WidthValue::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for WidthValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A subset of the radial space whose Tn-widths are known in closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RadialRegion {
    Ball(RadialBall),
    /// Any unbounded set, e.g. the whole space: every Tn-dimensional set is
    /// bounded, so no finite deviation is possible.
    Unbounded,
}

pub fn region_width(region: &RadialRegion, n: usize) -> Result<WidthValue> {
    if n == 0 {
        return Err(RadialError::ZeroN);
    }
    Ok(match region {
        RadialRegion::Ball(b) => WidthValue::Finite(b.radius.clone()),
        RadialRegion::Unbounded => WidthValue::Infinite,
    })
}

/// Both halves of the argument that `δ_n(B_r) = r`.
#[derive(Debug, Clone, Serialize)]
pub struct BallWidthCertificate {
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub n: usize,
    /// Generators of a Tn-dimensional set containing the origin.
    pub generators: Vec<RadialPoint>,
    /// The generators lie on pairwise distinct rays, so no one of them is
    /// between two others.
    pub distinct_rays: bool,
    /// The origin lies in the hull, hence every point of `B_r` is within `r`.
    pub origin_in_hull: bool,
    #[serde(serialize_with = "ser_rational")]
    pub epsilon: Rational,
    /// A point of `B_r` farther than `r - epsilon` from the hull.
    pub lower_witness: RadialPoint,
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Generators on `n` distinct rays through `(1, i)`, scaled by `r`; the
/// single generator for `n = 1` is the origin.
fn upper_bound_generators(ball: &RadialBall, n: usize) -> Result<Vec<RadialPoint>> {
    if n == 1 {
        return Ok(vec![RadialPoint::origin(ball.dim)?]);
    }
    (0..n)
        .map(|i| {
            let mut c = vec![Rational::zero(); ball.dim];
            c[0] = ball.radius.clone();
            c[1] = &ball.radius * int(i as i64);
            RadialPoint::new(c)
        })
        .collect()
}

/// The Tn-width of a radial ball, with a certificate for both inequalities.
pub fn ball_width(ball: &RadialBall, n: usize, epsilon: &Rational) -> Result<BallWidthCertificate> {
    if n == 0 {
        return Err(RadialError::ZeroN);
    }
    let generators = upper_bound_generators(ball, n)?;
    let distinct_rays = generators.iter().enumerate().all(|(i, a)| {
        generators[i + 1..]
            .iter()
            .all(|b| !same_ray(a, b) || a.is_origin() || b.is_origin())
    });
    let origin = RadialPoint::origin(ball.dim)?;
    let origin_in_hull = match generators.as_slice() {
        [only] => only.is_origin(),
        [a, b, ..] => radial_is_between(a, &origin, b)?,
        [] => false,
    };
    let lower_witness = ball_width_lower_bound_witness(ball, &generators, epsilon)?;
    Ok(BallWidthCertificate {
        value: ball.radius.clone(),
        n,
        generators,
        distinct_rays,
        origin_in_hull,
        epsilon: epsilon.clone(),
        lower_witness,
    })
}

fn direction(dim: usize, j: i64) -> RadialPoint {
    let mut c = vec![Rational::zero(); dim];
    c[0] = Rational::one();
    c[1] = int(j);
    RadialPoint { coords: c }
}

/// A point of the ball at distance more than `r - epsilon` from every point
/// of `conv(generators)`.
///
/// The point sits on a ray that carries none of the generators; the hull
/// meets that ray at most in the origin, so its distance to any hull point
/// is at least its norm. The inequality is re-verified exactly against each
/// generator before returning.
pub fn ball_width_lower_bound_witness(
    ball: &RadialBall,
    generators: &[RadialPoint],
    epsilon: &Rational,
) -> Result<RadialPoint> {
    if !epsilon.is_positive() || *epsilon >= ball.radius {
        return Err(RadialError::EpsilonOutOfRange);
    }
    for g in generators {
        check_dims(g, &direction(ball.dim, 0))?;
    }
    // rays through (1, 0), (1, 1), (1, -1), (1, 2), ...
    let limit = 2 * generators.len() as i64 + 2;
    let ray = (0..=limit)
        .map(|k| if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 })
        .map(|j| direction(ball.dim, j))
        .find(|v| {
            generators
                .iter()
                .all(|g| g.is_origin() || !same_ray(g, v))
        })
        .ok_or(RadialError::NoFreeRay)?;

    // scale t with (r - eps)^2 < t^2 |v|^2 < r^2, by bisection on exact rationals
    let v2 = ray.norm_sq();
    let lo2 = (&ball.radius - epsilon) * (&ball.radius - epsilon);
    let hi2 = &ball.radius * &ball.radius;
    let (mut lo, mut hi) = (Rational::zero(), ball.radius.clone());
    let two = int(2);
    let t = loop {
        let mid = (&lo + &hi) / &two;
        let m2 = &mid * &mid * &v2;
        if m2 <= lo2 {
            lo = mid;
        } else if m2 >= hi2 {
            hi = mid;
        } else {
            break mid;
        }
    };
    let p = ray.scaled(&t);
    debug_assert!(ball.contains(&p));

    let bound = SurdSum::rational(&ball.radius - epsilon);
    let origin = RadialPoint::origin(ball.dim)?;
    if radial_distance(&p, &origin)?.try_cmp(&bound)? != Ordering::Greater {
        return Err(RadialError::WitnessRejected(usize::MAX));
    }
    for (i, g) in generators.iter().enumerate() {
        if same_ray(g, &p) && !g.is_origin() {
            return Err(RadialError::WitnessRejected(i));
        }
        if radial_distance(&p, g)?.try_cmp(&bound)? != Ordering::Greater {
            return Err(RadialError::WitnessRejected(i));
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pt(c: &[i64]) -> RadialPoint {
        RadialPoint::from_ints(c).unwrap()
    }

    #[test]
    fn distance_cases() {
        assert_eq!(
            radial_distance(&pt(&[1, 0]), &pt(&[2, 0])).unwrap().as_rational(),
            Some(int(1))
        );
        assert_eq!(
            radial_distance(&pt(&[1, 0]), &pt(&[0, 1])).unwrap().as_rational(),
            Some(int(2))
        );
        assert!(radial_distance(&pt(&[3, 4]), &pt(&[3, 4])).unwrap().is_zero());
        // opposite rays: both formulas agree
        assert_eq!(
            radial_distance(&pt(&[1, 0]), &pt(&[-2, 0])).unwrap().as_rational(),
            Some(int(3))
        );
        let d = radial_distance(&pt(&[1, 1]), &pt(&[1, 0])).unwrap();
        assert!((d.to_f64() - (2f64.sqrt() + 1.0)).abs() < 1e-12);
        assert!(matches!(
            radial_distance(&pt(&[1, 0]), &pt(&[1, 0, 0])),
            Err(RadialError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            RadialPoint::from_ints(&[1]),
            Err(RadialError::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn betweenness_cases() {
        assert!(radial_is_between(&pt(&[1, 0]), &pt(&[0, 0]), &pt(&[0, 1])).unwrap());
        assert!(radial_is_between(&pt(&[2, 0]), &pt(&[1, 0]), &pt(&[0, 0])).unwrap());
        assert!(!radial_is_between(&pt(&[1, 0]), &pt(&[3, 0]), &pt(&[0, 1])).unwrap());
        assert!(radial_is_between(&pt(&[1, 0]), &pt(&[1, 0]), &pt(&[0, 1])).unwrap());
        assert!(!radial_is_between(&pt(&[2, 0]), &pt(&[1, 1]), &pt(&[0, 2])).unwrap());
    }

    #[test]
    fn ball_width_is_radius() {
        for (r, n) in [(int(1), 3), (ratio(5, 2), 1), (int(1), 100)] {
            let ball = RadialBall::closed(r.clone()).unwrap();
            let cert = ball_width(&ball, n, &ratio(1, 1000)).unwrap();
            assert_eq!(cert.value, r);
            assert!(cert.distinct_rays && cert.origin_in_hull);
            assert_eq!(cert.generators.len(), n);
        }
        assert_eq!(
            region_width(&RadialRegion::Unbounded, 2).unwrap(),
            WidthValue::Infinite
        );
    }

    #[test]
    fn lower_witness_avoids_generator_rays() {
        let ball = RadialBall::closed(int(1)).unwrap();
        let gens = [pt(&[1, 0]), pt(&[0, 1])];
        let p = ball_width_lower_bound_witness(&ball, &gens, &ratio(1, 4)).unwrap();
        assert!(ball.contains(&p));
        assert!(p.norm_sq() > ratio(9, 16));
        for g in &gens {
            assert!(!same_ray(g, &p));
        }

        let none = ball_width_lower_bound_witness(&ball, &[], &ratio(1, 2)).unwrap();
        assert!(none.norm_sq() > ratio(1, 4));

        let ball2 = RadialBall::closed(int(2)).unwrap();
        let three = [pt(&[1, 0]), pt(&[1, 1]), pt(&[2, -2])];
        let q = ball_width_lower_bound_witness(&ball2, &three, &ratio(1, 10)).unwrap();
        assert!(q.norm_sq() > ratio(361, 100));
        for g in &three {
            let d = radial_distance(&q, g).unwrap();
            assert_eq!(
                d.try_cmp(&SurdSum::rational(ratio(19, 10))).unwrap(),
                Ordering::Greater
            );
        }
        assert_eq!(
            ball_width_lower_bound_witness(&ball, &gens, &int(1)),
            Err(RadialError::EpsilonOutOfRange)
        );
    }

    #[test]
    fn open_ball_witness_is_inside() {
        let ball = RadialBall::new(int(1), true, 3).unwrap();
        let p = ball_width_lower_bound_witness(&ball, &[], &ratio(1, 1000)).unwrap();
        assert!(ball.contains(&p));
        assert_eq!(p.dim(), 3);
    }
}
