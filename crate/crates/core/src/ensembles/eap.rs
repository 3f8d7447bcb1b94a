//! Recursive zonal equal-area partition of the sphere.
//!
//! Two polar caps of area `4π/N`; the band between them is cut into collars
//! of near-square cells. Ideal cell counts per collar are rounded with the
//! rounding error carried into the next collar, and collar boundaries are
//! then placed so that every collar holds exactly its cells' area.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::geometry::SpherePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    Cap,
    CollarCell,
}

/// A colatitude–longitude rectangle `[θ₀, θ₁] × [φ₀, φ₁]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualAreaRegion {
    pub kind: RegionKind,
    pub theta: (f64, f64),
    pub phi: (f64, f64),
}

impl EqualAreaRegion {
    pub fn area(&self) -> f64 {
        (self.phi.1 - self.phi.0) * (self.theta.0.cos() - self.theta.1.cos())
    }

    /// Uniform point by area: `φ` uniform, `cos θ` uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpherePoint {
        let (c0, c1) = (self.theta.0.cos(), self.theta.1.cos());
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let z = c0 + (c1 - c0) * u;
        let phi = self.phi.0 + (self.phi.1 - self.phi.0) * v;
        SpherePoint::from_spherical(z.clamp(-1.0, 1.0).acos(), phi)
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        let theta = p.z().clamp(-1.0, 1.0).acos();
        let phi = p.y().atan2(p.x()).rem_euclid(TAU);
        let eps = 1e-12;
        let in_theta = theta >= self.theta.0 - eps && theta <= self.theta.1 + eps;
        let in_phi = self.kind == RegionKind::Cap || (phi >= self.phi.0 - eps && phi <= self.phi.1 + eps);
        in_theta && in_phi
    }
}

fn cap_area(theta: f64) -> f64 {
    TAU * (1.0 - theta.cos())
}

pub fn equal_area_partition(n: usize) -> Vec<EqualAreaRegion> {
    let full = (0.0, TAU);
    match n {
        0 => return Vec::new(),
        1 => return vec![EqualAreaRegion { kind: RegionKind::Cap, theta: (0.0, PI), phi: full }],
        2 => {
            return vec![
                EqualAreaRegion { kind: RegionKind::Cap, theta: (0.0, PI / 2.0), phi: full },
                EqualAreaRegion { kind: RegionKind::Cap, theta: (PI / 2.0, PI), phi: full },
            ]
        }
        _ => {}
    }
    let nf = n as f64;
    let region_area = 4.0 * PI / nf;
    let theta_c = 2.0 * (1.0 / nf).sqrt().asin();
    let ideal_angle = region_area.sqrt();
    let collars = (((PI - 2.0 * theta_c) / ideal_angle).round() as usize).max(1);
    let fitting = (PI - 2.0 * theta_c) / collars as f64;

    let mut counts = Vec::with_capacity(collars);
    let mut carry = 0.0;
    for i in 1..=collars {
        let lo = theta_c + (i - 1) as f64 * fitting;
        let hi = theta_c + i as f64 * fitting;
        let ideal = (cap_area(hi) - cap_area(lo)) / region_area;
        let m = (ideal + carry).round();
        carry += ideal - m;
        counts.push(m as usize);
    }

    let mut regions = Vec::with_capacity(n);
    let cap_edge = (1.0 - 2.0 / nf).acos();
    regions.push(EqualAreaRegion { kind: RegionKind::Cap, theta: (0.0, cap_edge), phi: full });
    let mut cumulative = 1usize;
    let mut top = cap_edge;
    for &m in &counts {
        if m == 0 {
            continue;
        }
        cumulative += m;
        let bottom = (1.0 - 2.0 * cumulative as f64 / nf).clamp(-1.0, 1.0).acos();
        let width = TAU / m as f64;
        for k in 0..m {
            let phi = (k as f64 * width, if k + 1 == m { TAU } else { (k + 1) as f64 * width });
            regions.push(EqualAreaRegion { kind: RegionKind::CollarCell, theta: (top, bottom), phi });
        }
        top = bottom;
    }
    regions.push(EqualAreaRegion { kind: RegionKind::Cap, theta: (top, PI), phi: full });
    debug_assert_eq!(regions.len(), n);
    regions
}

/// Chordal diameter: exact for caps, from a dense boundary scan for cells.
pub fn region_diameter(region: &EqualAreaRegion) -> f64 {
    if region.kind == RegionKind::Cap {
        let (t0, t1) = region.theta;
        return if t0 == 0.0 {
            if t1 >= PI / 2.0 {
                2.0
            } else {
                2.0 * t1.sin()
            }
        } else if t1 >= PI && t0 <= PI / 2.0 {
            2.0
        } else {
            2.0 * t0.sin()
        };
    }
    let samples = 48;
    let (t0, t1) = region.theta;
    let (p0, p1) = region.phi;
    let mut boundary = Vec::with_capacity(4 * samples);
    for k in 0..=samples {
        let f = k as f64 / samples as f64;
        let th = t0 + (t1 - t0) * f;
        let ph = p0 + (p1 - p0) * f;
        boundary.push(SpherePoint::from_spherical(t0, ph));
        boundary.push(SpherePoint::from_spherical(t1, ph));
        boundary.push(SpherePoint::from_spherical(th, p0));
        boundary.push(SpherePoint::from_spherical(th, p1));
    }
    let mut best: f64 = 0.0;
    for i in 0..boundary.len() {
        for j in i + 1..boundary.len() {
            best = best.max(boundary[i].chordal_distance(&boundary[j]));
        }
    }
    best
}

/// One area-uniform point in each region of the `r`-partition.
pub fn sample_equal_area<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Vec<SpherePoint> {
    equal_area_partition(r).iter().map(|reg| reg.sample(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn small_cases() {
        assert_eq!(equal_area_partition(1).len(), 1);
        let two = equal_area_partition(2);
        assert_eq!(two.len(), 2);
        for reg in &two {
            assert_eq!(reg.kind, RegionKind::Cap);
            assert!((reg.area() - TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn areas_are_equal() {
        for r in [3, 4, 5, 7, 10, 33, 100, 1000, 4321] {
            let regions = equal_area_partition(r);
            assert_eq!(regions.len(), r);
            let target = 4.0 * PI / r as f64;
            for reg in &regions {
                assert!((reg.area() - target).abs() < 1e-9, "r = {r}: {} vs {target}", reg.area());
            }
            let total: f64 = regions.iter().map(EqualAreaRegion::area).sum();
            assert!((total - 4.0 * PI).abs() < 1e-8);
        }
    }

    #[test]
    fn diameters_shrink_like_inverse_sqrt() {
        for r in [2, 10, 100, 1000] {
            let worst = equal_area_partition(r).iter().map(region_diameter).fold(0.0, f64::max);
            assert!(worst <= 7.0 / (r as f64).sqrt(), "r = {r}: {worst}");
        }
    }

    #[test]
    fn samples_land_in_their_regions() {
        let mut rng = stream(12, 0);
        let regions = equal_area_partition(57);
        for reg in &regions {
            for _ in 0..20 {
                assert!(reg.contains(&reg.sample(&mut rng)));
            }
        }
    }

    #[test]
    fn collars_tile_the_band() {
        let regions = equal_area_partition(200);
        // consecutive regions either share a colatitude band or start where the last ended
        for w in regions.windows(2) {
            let (a, b) = (w[0], w[1]);
            assert!(b.theta.0 == a.theta.0 || (b.theta.0 - a.theta.1).abs() < 1e-15);
        }
        assert_eq!(regions.last().unwrap().theta.1, PI);
    }
}
