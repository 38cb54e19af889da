use crate::jet::Jet;
use num_complex::Complex64 as C64;

/// Möbius map `z ↦ (az + b)/(cz + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(c(1.0), c(0.0), c(0.0), c(1.0))
    }

    pub fn affine(a: C64, b: C64) -> Self {
        Self::new(a, b, c(0.0), c(1.0))
    }

    /// `z ↦ 1/(z - p)`.
    pub fn invert_about(p: C64) -> Self {
        Self::new(c(0.0), c(1.0), c(1.0), -p)
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Image of ∞, or `None` when ∞ is fixed.
    pub fn image_of_infinity(&self) -> Option<C64> {
        if self.c == c(0.0) { None } else { Some(self.a / self.c) }
    }

    /// Preimage of ∞, or `None` when ∞ is fixed.
    pub fn pole(&self) -> Option<C64> {
        if self.c == c(0.0) { None } else { Some(-self.d / self.c) }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Mobius) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn jet(&self, z: C64) -> Jet {
        let den = self.c * z + self.d;
        let r = 1.0 / den;
        let d1 = self.det() * r * r;
        let d2 = -2.0 * self.c * d1 * r;
        let d3 = 6.0 * self.c * self.c * d1 * r * r;
        Jet::new((self.a * z + self.b) * r, d1, d2, d3)
    }

    /// Map sending `z1, z2, z3` to `0, 1, ∞`.
    pub fn to_zero_one_inf(z1: C64, z2: C64, z3: C64) -> Self {
        Self::new(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
    }

    /// Map sending `z_k` to `w_k` for three distinct finite points.
    pub fn three_point(z: [C64; 3], w: [C64; 3]) -> Self {
        let a = Self::to_zero_one_inf(z[0], z[1], z[2]);
        let b = Self::to_zero_one_inf(w[0], w[1], w[2]);
        b.inverse().compose(&a)
    }

    /// Disk automorphism (or rotation) `ζ ↦ e^{iθ}(ζ - a)/(1 - āζ)`.
    pub fn disk_automorphism(theta: f64, a: C64) -> Self {
        let r = C64::from_polar(1.0, theta);
        Self::new(r, -r * a, -a.conj(), c(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_interpolates() {
        let z = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0)];
        let w = [C64::new(2.0, 1.0), C64::new(-1.0, 0.5), C64::new(0.3, -2.0)];
        let m = Mobius::three_point(z, w);
        for k in 0..3 {
            assert!((m.apply(z[k]) - w[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn jet_matches_finite_difference() {
        let m = Mobius::new(C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.3, 0.1), C64::new(2.0, -1.0));
        let z = C64::new(0.2, 0.4);
        let h = 1e-5;
        let j = m.jet(z);
        let fd = (m.apply(z + h) - m.apply(z - h)) / (2.0 * h);
        let fd2 = (m.jet(z + h).d1 - m.jet(z - h).d1) / (2.0 * h);
        let fd3 = (m.jet(z + h).d2 - m.jet(z - h).d2) / (2.0 * h);
        assert!((fd - j.d1).norm() < 1e-9);
        assert!((fd2 - j.d2).norm() < 1e-8);
        assert!((fd3 - j.d3).norm() < 1e-7);
        assert!(j.schwarzian().norm() < 1e-12);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let m = Mobius::disk_automorphism(0.7, C64::new(0.2, -0.3));
        let z = C64::new(0.1, 0.5);
        assert!((m.inverse().apply(m.apply(z)) - z).norm() < 1e-14);
        assert!((m.apply(C64::from_polar(1.0, 1.1)).norm() - 1.0).abs() < 1e-14);
    }
}
