//! Concrete interior and exterior disk maps.

use super::{ExteriorMap, InteriorMap};
use crate::error::Result;
use crate::jet::{pow_jet, Jet};
use crate::loewner::SlitMapChain;
use crate::mobius::Mobius;
use num_complex::Complex64 as C64;

/// `ζ ↦ c + Rζ` on both sides of the circle `|z − c| = R`.
#[derive(Clone, Copy, Debug)]
pub struct CircleMaps {
    pub center: C64,
    pub radius: f64,
}

impl InteriorMap for CircleMaps {
    fn jet(&self, z: C64) -> Result<Jet> {
        Ok(Jet::identity(z).scale(C64::new(self.radius, 0.0)).add_const(self.center))
    }
}

impl ExteriorMap for CircleMaps {
    fn inverted_jet(&self, xi: C64) -> Result<Jet> {
        // 1/(c + R/ξ) = ξ/(cξ + R)
        let m = Mobius::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), self.center, C64::new(self.radius, 0.0));
        Ok(m.jet(xi))
    }
}

/// Möbius map of the disk, used as an interior map.
impl InteriorMap for Mobius {
    fn jet(&self, z: C64) -> Result<Jet> {
        Ok(Mobius::jet(self, z))
    }
}

/// Joukowski exterior map `g(ζ) = ζ + c/ζ`, whose boundary trace is an ellipse.
#[derive(Clone, Copy, Debug)]
pub struct Joukowski {
    pub c: f64,
}

impl ExteriorMap for Joukowski {
    fn inverted_jet(&self, xi: C64) -> Result<Jet> {
        // ξ/(1 + cξ²)
        let c = self.c;
        let d = 1.0 + c * xi * xi;
        let n2 = -2.0 * c * xi * (3.0 - c * xi * xi);
        let dn2 = -6.0 * c + 6.0 * c * c * xi * xi;
        Ok(Jet::new(
            xi / d,
            (1.0 - c * xi * xi) / (d * d),
            n2 / (d * d * d),
            (dn2 * d - 6.0 * c * xi * n2) / (d * d * d * d),
        ))
    }
}

/// Lens bounded by two circular arcs meeting at `±1` with interior angle `απ`.
#[derive(Clone, Copy, Debug)]
pub struct Lens {
    pub alpha: f64,
}

fn cayley_jet(z: C64) -> Jet {
    Mobius::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0)).jet(z)
}

impl InteriorMap for Lens {
    fn jet(&self, z: C64) -> Result<Jet> {
        let a = cayley_jet(z);
        let p = a.then(&pow_jet(a.v, self.alpha));
        let l = Mobius::new(C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        Ok(p.then(&l.jet(p.v)))
    }
}

impl ExteriorMap for Lens {
    fn inverted_jet(&self, xi: C64) -> Result<Jet> {
        let a = cayley_jet(xi);
        let p = a.then(&pow_jet(a.v, 2.0 - self.alpha)).scale(C64::new(-1.0, 0.0));
        let l = Mobius::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        Ok(p.then(&l.jet(p.v)))
    }
}

/// `ζ ↦ M(φ(C(ζ)))`: a disk map built from a slit-plane chain, a Möbius map `C` of the disk
/// onto a half-plane and a Möbius map `M` back to the curve's plane.
#[derive(Clone, Debug)]
pub struct ChainDiskMap {
    pub chain: SlitMapChain,
    pub to_half_plane: Mobius,
    pub to_plane: Mobius,
}

impl ChainDiskMap {
    fn eval(&self, z: C64) -> Result<Jet> {
        let c = self.to_half_plane.jet(z);
        let w = c.v;
        let phi = self.chain.phi_jet(w, 3)?;
        let out = c.then(&phi);
        Ok(out.then(&self.to_plane.jet(out.v)))
    }
}

/// Interior side of a chain-built pair.
#[derive(Clone, Debug)]
pub struct ChainInterior(pub ChainDiskMap);

/// Exterior side; `to_plane` is the reciprocal of the plane map so that `Ĝ(0) = 0`.
#[derive(Clone, Debug)]
pub struct ChainExterior(pub ChainDiskMap);

impl InteriorMap for ChainInterior {
    fn jet(&self, z: C64) -> Result<Jet> {
        self.0.eval(z)
    }
}

impl ExteriorMap for ChainExterior {
    fn inverted_jet(&self, xi: C64) -> Result<Jet> {
        self.0.eval(xi)
    }
}

/// Pre-composition by a rotation.
#[derive(Clone, Debug)]
pub struct Rotated<M> {
    pub map: M,
    pub rotation: C64,
}

impl<M: InteriorMap> InteriorMap for Rotated<M> {
    fn jet(&self, z: C64) -> Result<Jet> {
        let r = self.rotation;
        let j = self.map.jet(r * z)?;
        Ok(Jet::new(j.v, j.d1 * r, j.d2 * r * r, j.d3 * r * r * r))
    }
}

impl<M: ExteriorMap> ExteriorMap for Rotated<M> {
    fn inverted_jet(&self, xi: C64) -> Result<Jet> {
        let r = self.rotation;
        let j = self.map.inverted_jet(r * xi)?;
        Ok(Jet::new(j.v, j.d1 * r, j.d2 * r * r, j.d3 * r * r * r))
    }
}
