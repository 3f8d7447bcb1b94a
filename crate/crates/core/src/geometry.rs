//! Points on the unit sphere, rotations of R³ and the maps between them.

use std::ops::Mul;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Below this value of `x² + y²` a point is treated as one of the poles when
/// choosing its base frame.
pub const POLE_TOLERANCE: f64 = 1e-24;

/// A unit vector in R³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    x: f64,
    y: f64,
    z: f64,
}

impl SpherePoint {
    pub const NORTH: SpherePoint = SpherePoint { x: 0.0, y: 0.0, z: 1.0 };
    pub const SOUTH: SpherePoint = SpherePoint { x: 0.0, y: 0.0, z: -1.0 };

    /// Normalizes `(x, y, z)` onto the sphere.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return invalid(format!("cannot normalize ({x}, {y}, {z}) onto the sphere"));
        }
        Ok(SpherePoint { x: x / norm, y: y / norm, z: z / norm })
    }

    /// Point with colatitude `theta` (from the north pole) and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SpherePoint { x: st * cp, y: st * sp, z: ct }
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

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Euclidean (chordal) distance.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// A 3×3 rotation matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };

    /// Checks orthogonality and orientation to within `1e-10` entrywise.
    pub fn from_rows(m: [[f64; 3]; 3]) -> Result<Self> {
        let rot = Rotation3 { m };
        let err = rot.orthogonality_error();
        let det = rot.determinant();
        if !(err <= 1e-10) || !((det - 1.0).abs() <= 1e-10) {
            return invalid(format!("not a rotation: |MᵀM - I|∞ = {err:e}, det = {det}"));
        }
        Ok(rot)
    }

    #[cfg(test)]
    /// Builds from nine row-major entries without validation.
    pub(crate) fn from_rows_unchecked(m: [[f64; 3]; 3]) -> Self {
        Rotation3 { m }
    }

    pub fn from_row_major(v: &[f64; 9]) -> Result<Self> {
        Self::from_rows([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }

    pub fn transpose(&self) -> Rotation3 {
        let m = &self.m;
        Rotation3 { m: [[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]] }
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `|MᵀM - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.transpose() * *self;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.m[i][j] - target).abs());
            }
        }
        worst
    }

    /// Image of a sphere point.
    pub fn apply(&self, p: &SpherePoint) -> [f64; 3] {
        let v = p.to_array();
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Third column, i.e. the image of `e3`.
    pub fn axis(&self) -> [f64; 3] {
        [self.m[0][2], self.m[1][2], self.m[2][2]]
    }

    /// `trace(selfᵀ · other)`, the entrywise inner product.
    pub fn frobenius_inner(&self, other: &Rotation3) -> f64 {
        let (a, b) = (&self.m, &other.m);
        let mut acc = 0.0;
        for i in 0..3 {
            acc += a[i][0] * b[i][0] + a[i][1] * b[i][1] + a[i][2] * b[i][2];
        }
        acc
    }
}

impl Mul for Rotation3 {
    type Output = Rotation3;

    fn mul(self, rhs: Rotation3) -> Rotation3 {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Rotation3 { m }
    }
}

/// A finite complex number or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex64),
    Infinity,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        ComplexPoint::Finite(Complex64::new(re, im))
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ComplexPoint::Finite(z)
        } else {
            ComplexPoint::Infinity
        }
    }
}

/// Rotation by `phi` about the vertical axis.
pub fn rotation_about_z(phi: f64) -> Rotation3 {
    let (s, c) = phi.sin_cos();
    Rotation3 { m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]] }
}

/// A rotation `H` with `H e3 = p`.
///
/// Identity at the north pole, `diag(1, -1, -1)` at the south pole and
/// otherwise the frame whose columns are `(y, -x, 0)/ρ`, `(zx, zy, -ρ²)/ρ`
/// and `p`, with `ρ = sqrt(x² + y²)`.
pub fn base_frame(p: &SpherePoint) -> Rotation3 {
    let (x, y, z) = (p.x, p.y, p.z);
    let rho2 = x * x + y * y;
    if rho2 < POLE_TOLERANCE {
        return if z > 0.0 {
            Rotation3::IDENTITY
        } else {
            Rotation3 { m: [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]] }
        };
    }
    let rho = rho2.sqrt();
    Rotation3 { m: [[y / rho, z * x / rho, x], [-x / rho, z * y / rho, y], [0.0, -rho, z]] }
}

/// Squared Frobenius distance `6 - 2 trace(aᵀb)`.
pub fn so3_dist_sq(a: &Rotation3, b: &Rotation3) -> f64 {
    6.0 - 2.0 * a.frobenius_inner(b)
}

/// Haar-distributed rotation from a normalized Gaussian quaternion.
pub fn haar_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    loop {
        let w: f64 = rng.sample(StandardNormal);
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        let norm2 = w * w + x * x + y * y + z * z;
        if norm2 > 1e-300 {
            let inv = 1.0 / norm2.sqrt();
            return quaternion_to_rotation(w * inv, x * inv, y * inv, z * inv);
        }
    }
}

fn quaternion_to_rotation(w: f64, x: f64, y: f64, z: f64) -> Rotation3 {
    Rotation3 {
        m: [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ],
    }
}

/// Uniform point on the sphere from three normalized Gaussians.
pub fn uniform_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Ok(p) = SpherePoint::new(x, y, z) {
            if x * x + y * y + z * z > 1e-200 {
                return p;
            }
        }
    }
}

/// Inverse stereographic projection with the north pole as the image of
/// infinity: `u + iv ↦ (2u, 2v, |z|² - 1) / (1 + |z|²)`.
pub fn inverse_stereographic(z: ComplexPoint) -> SpherePoint {
    match z {
        ComplexPoint::Infinity => SpherePoint::NORTH,
        ComplexPoint::Finite(z) => {
            let m2 = z.norm_sqr();
            if !m2.is_finite() || m2 > 1e300 {
                return SpherePoint::NORTH;
            }
            if m2 <= 1.0 {
                let d = 1.0 + m2;
                SpherePoint::new(2.0 * z.re / d, 2.0 * z.im / d, (m2 - 1.0) / d).unwrap_or(SpherePoint::SOUTH)
            } else {
                // divide through by |z|² to keep the large-modulus branch exact
                let w = z.inv();
                let wm2 = w.norm_sqr();
                let d = 1.0 + wm2;
                SpherePoint::new(2.0 * w.re / d, -2.0 * w.im / d, (1.0 - wm2) / d).unwrap_or(SpherePoint::NORTH)
            }
        }
    }
}

/// Rotation angle in `[0, π]` of a rotation.
pub fn rotation_angle(r: &Rotation3) -> f64 {
    ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use std::f64::consts::PI;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_rot_eq(a: &Rotation3, b: &Rotation3, eps: f64) {
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(a.get(i, j), b.get(i, j), epsilon = eps);
            }
        }
    }

    #[test]
    fn rotation_about_z_special_angles() {
        assert_rot_eq(&rotation_about_z(0.0), &Rotation3::IDENTITY, 0.0);
        let half = rotation_about_z(PI);
        let expected = Rotation3::from_rows_unchecked([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_rot_eq(&half, &expected, 1e-15);
        assert_rot_eq(&(rotation_about_z(0.3) * rotation_about_z(0.4)), &rotation_about_z(0.7), 1e-14);
    }

    #[test]
    fn rotation_about_z_is_a_homomorphism_on_a_grid() {
        for i in 0..24 {
            for j in 0..24 {
                let a = i as f64 * std::f64::consts::TAU / 24.0 - 1.0;
                let b = j as f64 * 0.77;
                assert_rot_eq(&(rotation_about_z(a) * rotation_about_z(b)), &rotation_about_z(a + b), 1e-13);
            }
        }
    }

    #[test]
    fn base_frame_poles_and_equator() {
        assert_rot_eq(&base_frame(&SpherePoint::NORTH), &Rotation3::IDENTITY, 0.0);
        let south = Rotation3::from_rows_unchecked([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert_rot_eq(&base_frame(&SpherePoint::SOUTH), &south, 0.0);

        let h = base_frame(&SpherePoint::new(1.0, 0.0, 0.0).unwrap());
        // columns (0,-1,0), (0,0,-1), (1,0,0)
        let expected = Rotation3::from_rows_unchecked([[0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]]);
        assert_rot_eq(&h, &expected, 1e-15);
        assert!(h.orthogonality_error() < 1e-15);
        assert_abs_diff_eq!(h.determinant(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn base_frame_near_pole_stays_orthogonal() {
        for eps in [1e-6, 1e-9, 1e-11, 1e-12, 1e-13] {
            for sign in [1.0, -1.0] {
                let p = SpherePoint::new(eps, -eps, sign).unwrap();
                let h = base_frame(&p);
                assert!(h.orthogonality_error() < 1e-12, "eps {eps}");
                assert_abs_diff_eq!(h.determinant(), 1.0, epsilon = 1e-12);
                let axis = h.axis();
                assert_abs_diff_eq!(axis[2], p.z(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let id = Rotation3::IDENTITY;
        assert_eq!(so3_dist_sq(&id, &id), 0.0);
        assert_abs_diff_eq!(so3_dist_sq(&id, &rotation_about_z(PI)), 8.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_routes_agree_for_haar_pairs() {
        let mut rng = stream(11, 0);
        for _ in 0..1000 {
            let a = haar_rotation(&mut rng);
            let b = haar_rotation(&mut rng);
            let direct: f64 = a
                .to_row_major()
                .iter()
                .zip(b.to_row_major().iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            assert_abs_diff_eq!(so3_dist_sq(&a, &b), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn haar_samples_are_rotations_with_zero_mean_trace() {
        let mut rng = stream(5, 1);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let o = haar_rotation(&mut rng);
            assert!(o.orthogonality_error() < 1e-12);
            assert!((o.determinant() - 1.0).abs() < 1e-12);
            let t = o.trace();
            sum += t;
            sum2 += t * t;
        }
        let mean = sum / n as f64;
        let sd = (sum2 / n as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 4.0 * sd / (n as f64).sqrt(), "mean trace {mean}");
    }

    #[test]
    fn stereographic_examples() {
        let south = inverse_stereographic(ComplexPoint::new(0.0, 0.0));
        assert_eq!(south.to_array(), [0.0, 0.0, -1.0]);
        assert_eq!(inverse_stereographic(ComplexPoint::Infinity), SpherePoint::NORTH);
        let eq = inverse_stereographic(ComplexPoint::new(1.0, 0.0));
        assert_abs_diff_eq!(eq.x(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eq.z(), 0.0, epsilon = 1e-15);
        // both branches agree across |z| = 1
        let a = inverse_stereographic(ComplexPoint::new(0.6, 0.8 - 1e-12));
        let b = inverse_stereographic(ComplexPoint::new(0.6, 0.8 + 1e-12));
        assert!(a.chordal_distance(&b) < 1e-11);
        let big = inverse_stereographic(ComplexPoint::new(3.0, -4.0));
        assert_abs_diff_eq!(big.x(), 6.0 / 26.0, epsilon = 1e-15);
        assert_abs_diff_eq!(big.y(), -8.0 / 26.0, epsilon = 1e-15);
        assert_abs_diff_eq!(big.z(), 24.0 / 26.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_rotations() {
        assert!(Rotation3::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]).is_err());
        assert!(Rotation3::from_rows([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        assert!(SpherePoint::new(0.0, 0.0, 0.0).is_err());
    }

    fn unit_vector() -> impl Strategy<Value = SpherePoint> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-3)
            .prop_map(|(x, y, z)| SpherePoint::new(x, y, z).unwrap())
    }

    fn rotation() -> impl Strategy<Value = Rotation3> {
        any::<u64>().prop_map(|seed| haar_rotation(&mut stream(seed, 0)))
    }

    proptest! {
        #[test]
        fn base_frame_maps_e3_to_p(p in unit_vector()) {
            let h = base_frame(&p);
            let axis = h.axis();
            prop_assert!((axis[0] - p.x()).abs() < 1e-12);
            prop_assert!((axis[1] - p.y()).abs() < 1e-12);
            prop_assert!((axis[2] - p.z()).abs() < 1e-12);
            prop_assert!(h.orthogonality_error() < 1e-12);
            prop_assert!((h.determinant() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn distance_is_left_invariant(a in rotation(), b in rotation(), c in rotation()) {
            let d0 = so3_dist_sq(&a, &b);
            let d1 = so3_dist_sq(&(c * a), &(c * b));
            prop_assert!((d0 - d1).abs() < 1e-12);
        }

        #[test]
        fn stereographic_lands_on_sphere(re in -1e6..1e6f64, im in -1e6..1e6f64) {
            let p = inverse_stereographic(ComplexPoint::new(re, im));
            let n = p.dot(&p);
            prop_assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
