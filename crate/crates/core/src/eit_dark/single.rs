use nalgebra::{Matrix4, Vector4};

use super::{AngleConvention, EitContext, MixingAngle};
use crate::error::Result;

/// Single-atom Hamiltonian restricted to
/// `(|e,n1,n2>, |g2,n1,n2>, |g1,n1+1,n2>, |g1,n1,n2+1>)`, without the constant
/// `n2 * omega2_tilde` that multiplies the identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceMatrix {
    pub matrix: Matrix4<f64>,
    pub shift: f64,
}

pub fn subspace_matrix(n1: usize, n2: usize, ctx: &EitContext) -> SubspaceMatrix {
    let p1 = ctx.g * ctx.u1 * ((n1 + 1) as f64).sqrt();
    let p2 = ctx.g * ctx.u2 * ((n2 + 1) as f64).sqrt();
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        ctx.delta_cap, ctx.xi, p1,  p2,
        ctx.xi,        0.0,    0.0, 0.0,
        p1,            0.0,    0.0, 0.0,
        p2,            0.0,    0.0, ctx.omega2_tilde,
    );
    SubspaceMatrix {
        matrix,
        shift: n2 as f64 * ctx.omega2_tilde,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DarkVector {
    pub vector: Vector4<f64>,
    pub angle: MixingAngle,
}

/// Zero mode `cos(theta)|g1,n1+1,n2> - sin(theta)|g2,n1,n2>` with
/// `tan(theta) = g u1 sqrt(n1+1) / xi`.
pub fn dark_state(n1: usize, _n2: usize, ctx: &EitContext) -> Result<DarkVector> {
    let probe = ctx.g * ctx.u1 * ((n1 + 1) as f64).sqrt();
    let angle = MixingAngle::from_couplings(probe, ctx.xi, AngleConvention::SingleAtom)?;
    let (s, c) = angle.theta.sin_cos();
    Ok(DarkVector {
        vector: Vector4::new(0.0, -s, c, 0.0),
        angle,
    })
}
