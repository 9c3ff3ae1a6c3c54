//! Unit-sphere primitives.
//!
//! Everything here works on S² = {x ∈ R³ : ‖x‖ = 1}: geodesic and chordal
//! distances, spherical-cap areas, tangent frames, the geodesic
//! parametrization θ(t) = √(1−t²)·x + t·v, and the stereographic
//! correspondence with the complex plane used by the planar samplers.
//!
//! Convention: we project from the north pole (0, 0, 1) onto the equatorial
//! plane, so z = 0 maps to the south pole and the point at infinity maps to
//! the north pole. The energy statistics are rotation invariant, so any fixed
//! convention gives the same distributions.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{PI, TAU};

/// Tolerance on |‖x‖² − 1| for points and on tangency/unit-length checks.
pub const NORM_TOL: f64 = 1e-12;

/// A point on the unit sphere. Construction validates the norm, so a value of
/// this type always satisfies |x² + y² + z² − 1| ≤ `NORM_TOL`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    x: f64,
    y: f64,
    z: f64,
}

impl SpherePoint {
    /// Builds a point from coordinates that must already lie on the sphere.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let dev = (x * x + y * y + z * z - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::OffSphere { deviation: dev });
        }
        Ok(Self { x, y, z })
    }

    /// Builds a point by rescaling an arbitrary non-zero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm > 1e-8) || !norm.is_finite() {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn antipode(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Squared Euclidean distance to another point; the energy kernel runs on
    /// this to avoid a square root per pair.
    #[inline]
    pub fn dist_sq(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub const NORTH_POLE: SpherePoint = SpherePoint {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub const SOUTH_POLE: SpherePoint = SpherePoint {
        x: 0.0,
        y: 0.0,
        z: -1.0,
    };
}

/// A vector in the tangent plane of its base point: ⟨base, v⟩ = 0 up to
/// `NORM_TOL`. `unit` marks vectors of length 1 up to the same tolerance.
#[derive(Debug, Clone, Copy)]
pub struct TangentVector {
    base: SpherePoint,
    v: [f64; 3],
    unit: bool,
}

impl TangentVector {
    pub fn new(base: SpherePoint, v: [f64; 3]) -> Result<Self> {
        let dot = base.x * v[0] + base.y * v[1] + base.z * v[2];
        if dot.abs() > NORM_TOL {
            return Err(Error::NotTangent { dot });
        }
        let norm_sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let unit = (norm_sq.sqrt() - 1.0).abs() <= NORM_TOL;
        Ok(Self { base, v, unit })
    }

    /// Internal constructor for vectors produced by projection, where
    /// orthogonality holds by construction.
    pub(crate) fn new_unchecked(base: SpherePoint, v: [f64; 3], unit: bool) -> Self {
        Self { base, v, unit }
    }

    pub fn base(&self) -> SpherePoint {
        self.base
    }

    pub fn components(&self) -> [f64; 3] {
        self.v
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn norm(&self) -> f64 {
        (self.v[0] * self.v[0] + self.v[1] * self.v[1] + self.v[2] * self.v[2]).sqrt()
    }

    /// The same tangent direction reversed.
    pub fn reversed(&self) -> Self {
        Self {
            base: self.base,
            v: [-self.v[0], -self.v[1], -self.v[2]],
            unit: self.unit,
        }
    }
}

/// A geodesic ball B(center, radius) with the radius in radians.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicBallSpec {
    pub center: SpherePoint,
    radius: f64,
}

impl GeodesicBallSpec {
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&radius) {
            return Err(Error::OutOfRange {
                name: "radius",
                value: radius,
                range: "[0, pi]",
            });
        }
        Ok(Self { center, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// σ(B) for the normalized surface measure.
    pub fn normalized_area(&self) -> f64 {
        cap_normalized_area(self.radius).expect("radius validated at construction")
    }
}

/// A point of the extended complex plane. The point at infinity is tagged
/// explicitly so a vanishing leading polynomial coefficient has a
/// deterministic image on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanePoint {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for PlanePoint {
    fn from(z: Complex64) -> Self {
        PlanePoint::Finite(z)
    }
}

/// Geodesic distance d(a, b) = arccos⟨a, b⟩ ∈ [0, π].
///
/// The inner product is clamped to [−1, 1] before the arccosine so that
/// near-identical or near-antipodal points never produce NaN.
pub fn geodesic_distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Euclidean (chordal) distance ‖a − b‖ ∈ [0, 2]. Always ≤ the geodesic
/// distance.
pub fn chordal_distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    a.dist_sq(b).sqrt()
}

/// Normalized area of a spherical cap of geodesic radius r: σ(B(x, r)) = sin²(r/2).
pub fn cap_normalized_area(radius: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&radius) {
        return Err(Error::OutOfRange {
            name: "radius",
            value: radius,
            range: "[0, pi]",
        });
    }
    let s = (radius / 2.0).sin();
    Ok(s * s)
}

/// Draws a unit tangent vector at `base`, uniform on the unit circle of the
/// tangent plane.
pub fn random_tangent_unit<R: Rng + ?Sized>(base: SpherePoint, rng: &mut R) -> TangentVector {
    let a = base.coords();
    // Frame axis least aligned with the base point keeps the cross product
    // well conditioned.
    let k = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        0
    } else if a[1].abs() <= a[2].abs() {
        1
    } else {
        2
    };
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let u = cross(e, a);
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let u = [u[0] / un, u[1] / un, u[2] / un];
    let w = cross(a, u);
    let phi = rng.random::<f64>() * TAU;
    let (s, c) = phi.sin_cos();
    let v = [
        c * u[0] + s * w[0],
        c * u[1] + s * w[1],
        c * u[2] + s * w[2],
    ];
    TangentVector::new_unchecked(base, v, true)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Moves along the geodesic θ(t) = √(1−t²)·base + t·v for a unit tangent `v`.
///
/// The arrival point sits at geodesic distance arcsin(t) from the base.
pub fn geodesic_step(v: &TangentVector, t: f64) -> Result<SpherePoint> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1]",
        });
    }
    if !v.is_unit() {
        return Err(Error::InvalidParameter(
            "geodesic_step requires a unit tangent vector".into(),
        ));
    }
    let a = v.base().coords();
    let d = v.components();
    let c = (1.0 - t * t).sqrt();
    SpherePoint::normalized(
        c * a[0] + t * d[0],
        c * a[1] + t * d[1],
        c * a[2] + t * d[2],
    )
}

/// Inverse stereographic projection: z ↦ (2 Re z, 2 Im z, |z|² − 1)/(1 + |z|²).
///
/// Zero maps to the south pole, the unit circle to the equator, and the point
/// at infinity to the north pole.
pub fn plane_to_sphere(p: PlanePoint) -> SpherePoint {
    match p {
        PlanePoint::Infinity => SpherePoint::NORTH_POLE,
        PlanePoint::Finite(z) => {
            let q = z.norm_sqr();
            if !q.is_finite() {
                return SpherePoint::NORTH_POLE;
            }
            // For very large |z| the direct formula loses the leading digits;
            // divide through by |z|² instead.
            if q > 1e30 {
                let inv = 1.0 / q;
                return SpherePoint::normalized(2.0 * z.re * inv, 2.0 * z.im * inv, 1.0 - inv)
                    .expect("nonzero by construction");
            }
            let denom = 1.0 + q;
            SpherePoint::normalized(2.0 * z.re / denom, 2.0 * z.im / denom, (q - 1.0) / denom)
                .expect("nonzero by construction")
        }
    }
}

/// Stereographic projection, the inverse of [`plane_to_sphere`]. The north
/// pole maps to the infinity marker.
pub fn sphere_to_plane(p: &SpherePoint) -> PlanePoint {
    let denom = 1.0 - p.z();
    if denom <= 0.0 {
        return PlanePoint::Infinity;
    }
    PlanePoint::Finite(Complex64::new(p.x() / denom, p.y() / denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn north() -> SpherePoint {
        SpherePoint::NORTH_POLE
    }

    #[test]
    fn geodesic_distance_basics() {
        let p = SpherePoint::new(1.0, 0.0, 0.0).unwrap();
        let q = SpherePoint::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(geodesic_distance(&p, &p), 0.0);
        assert!((geodesic_distance(&p, &p.antipode()) - PI).abs() < 1e-15);
        assert!((geodesic_distance(&p, &q) - PI / 2.0).abs() < 1e-15);
        assert_eq!(geodesic_distance(&p, &q), geodesic_distance(&q, &p));
    }

    #[test]
    fn chordal_distance_basics() {
        let p = SpherePoint::new(1.0, 0.0, 0.0).unwrap();
        let q = SpherePoint::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(chordal_distance(&p, &p), 0.0);
        assert!((chordal_distance(&p, &p.antipode()) - 2.0).abs() < 1e-15);
        assert!((chordal_distance(&p, &q) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cap_area_endpoints_and_identity() {
        assert!((cap_normalized_area(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((cap_normalized_area(PI / 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(cap_normalized_area(-0.1).is_err());
        assert!(cap_normalized_area(PI + 0.1).is_err());
        // sin²(arcsin(t)/2) = (1 − √(1−t²))/2 and that quantity is ≥ t²/4.
        for k in 1..1000 {
            let t = k as f64 / 1000.0;
            let area = cap_normalized_area(t.asin()).unwrap();
            let closed = (1.0 - (1.0 - t * t).sqrt()) / 2.0;
            assert!((area - closed).abs() < 1e-14);
            assert!(area >= t * t / 4.0);
        }
    }

    #[test]
    fn tangent_at_pole_is_horizontal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let v = random_tangent_unit(north(), &mut rng);
            assert!(v.components()[2].abs() <= 1e-12);
            assert!(v.is_unit());
        }
    }

    #[test]
    fn tangent_draws_are_deterministic() {
        let base = SpherePoint::normalized(0.3, -1.1, 0.4).unwrap();
        let a = random_tangent_unit(base, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_tangent_unit(base, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a.components(), b.components());
    }

    #[test]
    fn tangent_mean_vanishes() {
        let base = SpherePoint::normalized(0.2, 0.5, -0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut mean = [0.0f64; 3];
        let draws = 100_000;
        for _ in 0..draws {
            let v = random_tangent_unit(base, &mut rng).components();
            for k in 0..3 {
                mean[k] += v[k];
            }
        }
        for m in mean {
            assert!((m / draws as f64).abs() < 0.02);
        }
    }

    #[test]
    fn geodesic_step_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = SpherePoint::normalized(1.0, 2.0, -0.5).unwrap();
        let v = random_tangent_unit(base, &mut rng);
        let at0 = geodesic_step(&v, 0.0).unwrap();
        assert!(chordal_distance(&at0, &base) < 1e-15);
        let at1 = geodesic_step(&v, 1.0).unwrap();
        let d = v.components();
        assert!((at1.x() - d[0]).abs() < 1e-12);
        assert!((at1.y() - d[1]).abs() < 1e-12);
        assert!((at1.z() - d[2]).abs() < 1e-12);
        assert!(geodesic_step(&v, 1.5).is_err());
        assert!(geodesic_step(&v, -0.1).is_err());
    }

    #[test]
    fn geodesic_step_length_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let base = random_point(&mut rng);
            let v = random_tangent_unit(base, &mut rng);
            let t = rng.random::<f64>();
            let p = geodesic_step(&v, t).unwrap();
            assert!((geodesic_distance(&base, &p) - t.asin()).abs() < 1e-10);
        }
        // The half-step example: distance arcsin(1/2) = π/6.
        let base = north();
        let v = random_tangent_unit(base, &mut rng);
        let p = geodesic_step(&v, 0.5).unwrap();
        assert!((geodesic_distance(&base, &p) - PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn stereographic_fixed_points() {
        assert_eq!(
            plane_to_sphere(PlanePoint::Finite(Complex64::new(0.0, 0.0))),
            SpherePoint::SOUTH_POLE
        );
        assert_eq!(plane_to_sphere(PlanePoint::Infinity), north());
        assert_eq!(sphere_to_plane(&north()), PlanePoint::Infinity);
        match sphere_to_plane(&SpherePoint::SOUTH_POLE) {
            PlanePoint::Finite(z) => assert!(z.norm() < 1e-15),
            PlanePoint::Infinity => panic!("south pole must map to zero"),
        }
        // Unit-modulus points land on the equator.
        let p = plane_to_sphere(PlanePoint::Finite(Complex64::from_polar(1.0, 0.83)));
        assert!(p.z().abs() < 1e-15);
    }

    #[test]
    fn stereographic_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..1000 {
            let p = random_point(&mut rng);
            let q = plane_to_sphere(sphere_to_plane(&p));
            assert!(chordal_distance(&p, &q) < 1e-10);
        }
    }

    fn random_point<R: Rng>(rng: &mut R) -> SpherePoint {
        loop {
            let x: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let y: f64 = rng.random::<f64>() * 2.0 - 1.0;
            let z: f64 = rng.random::<f64>() * 2.0 - 1.0;
            if let Ok(p) = SpherePoint::normalized(x, y, z) {
                return p;
            }
        }
    }

    #[test]
    fn sphere_point_validation() {
        assert!(SpherePoint::new(1.0, 1.0, 0.0).is_err());
        assert!(SpherePoint::normalized(0.0, 0.0, 0.0).is_err());
        let p = SpherePoint::normalized(3.0, 4.0, 0.0).unwrap();
        assert!((p.x() - 0.6).abs() < 1e-15);
        assert!((p.y() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn tangent_vector_validation() {
        let base = north();
        assert!(TangentVector::new(base, [0.0, 0.0, 1.0]).is_err());
        let t = TangentVector::new(base, [1.0, 0.0, 0.0]).unwrap();
        assert!(t.is_unit());
        let t2 = TangentVector::new(base, [2.0, 0.0, 0.0]).unwrap();
        assert!(!t2.is_unit());
    }

    #[test]
    fn ball_spec_bounds() {
        assert!(GeodesicBallSpec::new(north(), -0.5).is_err());
        assert!(GeodesicBallSpec::new(north(), 4.0).is_err());
        let b = GeodesicBallSpec::new(north(), PI / 2.0).unwrap();
        assert!((b.normalized_area() - 0.5).abs() < 1e-15);
    }
}
