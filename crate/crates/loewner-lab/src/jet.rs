//! Third-order complex jets and their composition.

use num_complex::Complex64 as C64;

/// Value and first three complex derivatives of a holomorphic map at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: C64,
    pub d1: C64,
    pub d2: C64,
    pub d3: C64,
}

impl Jet {
    pub fn new(v: C64, d1: C64, d2: C64, d3: C64) -> Self {
        Self { v, d1, d2, d3 }
    }

    pub fn identity(z: C64) -> Self {
        Self::new(z, C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Jet of `outer ∘ self`, where `outer` is the jet of the outer map taken at `self.v`.
    pub fn then(&self, outer: &Jet) -> Jet {
        let (g1, g2, g3) = (self.d1, self.d2, self.d3);
        Jet {
            v: outer.v,
            d1: outer.d1 * g1,
            d2: outer.d2 * g1 * g1 + outer.d1 * g2,
            d3: outer.d3 * g1 * g1 * g1 + 3.0 * outer.d2 * g1 * g2 + outer.d1 * g3,
        }
    }

    pub fn pre_log_derivative(&self) -> C64 {
        self.d2 / self.d1
    }

    /// Schwarzian derivative f'''/f' - 3/2 (f''/f')^2.
    pub fn schwarzian(&self) -> C64 {
        let p = self.d2 / self.d1;
        self.d3 / self.d1 - 1.5 * p * p
    }

    pub fn add_const(mut self, c: C64) -> Jet {
        self.v += c;
        self
    }

    pub fn scale(self, a: C64) -> Jet {
        Jet::new(a * self.v, a * self.d1, a * self.d2, a * self.d3)
    }
}

/// Square root with values in the upper half-plane and branch cut along the positive reals.
pub fn sqrt_sigma(w: C64) -> C64 {
    C64::i() * (-w).sqrt()
}

/// Jet of `sqrt_sigma` at `w`.
pub fn sqrt_sigma_jet(w: C64) -> Jet {
    let s = sqrt_sigma(w);
    let d1 = 0.5 / s;
    let d2 = -0.25 / (s * s * s);
    let d3 = 0.375 / (s * s * s * s * s);
    Jet::new(s, d1, d2, d3)
}

pub fn square_jet(u: C64) -> Jet {
    Jet::new(u * u, 2.0 * u, C64::new(2.0, 0.0), C64::new(0.0, 0.0))
}

pub fn recip_jet(u: C64) -> Jet {
    let r = 1.0 / u;
    let r2 = r * r;
    Jet::new(r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2)
}

/// Jet of the principal power `u^a`.
pub fn pow_jet(u: C64, a: f64) -> Jet {
    let p = u.powf(a);
    let r = 1.0 / u;
    Jet::new(
        p,
        a * p * r,
        a * (a - 1.0) * p * r * r,
        a * (a - 1.0) * (a - 2.0) * p * r * r * r,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_matches_closed_form() {
        // exp(z^2) at z = 0.3 + 0.2i
        let z = C64::new(0.3, 0.2);
        let inner = square_jet(z);
        let e = inner.v.exp();
        let outer = Jet::new(e, e, e, e);
        let j = inner.then(&outer);
        let d1 = 2.0 * z * e;
        let d2 = (2.0 + 4.0 * z * z) * e;
        let d3 = (12.0 * z + 8.0 * z * z * z) * e;
        assert!((j.d1 - d1).norm() < 1e-14);
        assert!((j.d2 - d2).norm() < 1e-13);
        assert!((j.d3 - d3).norm() < 1e-13);
    }

    #[test]
    fn sqrt_branch_lands_in_upper_half_plane() {
        for w in [C64::new(1.0, 1e-12), C64::new(1.0, -1e-12), C64::new(-3.0, 0.0), C64::new(0.2, -5.0)] {
            let s = sqrt_sigma(w);
            assert!(s.im >= 0.0);
            assert!((s * s - w).norm() < 1e-12);
        }
        assert!(sqrt_sigma(C64::new(1.0, -1e-12)).re < 0.0);
    }

    #[test]
    fn schwarzian_of_square() {
        let j = square_jet(C64::new(1.0, 0.0));
        assert!((j.schwarzian() - C64::new(-1.5, 0.0)).norm() < 1e-15);
    }
}
