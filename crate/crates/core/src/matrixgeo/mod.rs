//! The light-cone tube over symmetric 2×2 matrices and the model hypersurfaces it relates to.

pub mod combinatorics;
pub mod delta;
pub mod maps;
pub mod symmat;
pub mod theta;
pub mod tube;

use crate::exact::{q, Scalar};

/// `tr(e)` for the ordinary trace, used in the definition of the tube.
pub const TUBE_TRACE_OF_IDENTITY: i64 = 2;
/// `tr(e)` for the normalized trace of the invariant map `φ`.
pub const NORMALIZED_TRACE_OF_IDENTITY: i64 = 1;

/// Trace of a 2×2 matrix, scaled so that the identity has trace `trace_of_identity`.
pub fn trace(m: &[[Scalar; 2]; 2], trace_of_identity: i64) -> Scalar {
    &(&m[0][0] + &m[1][1]) * &Scalar::from_rational(q(trace_of_identity, 2))
}
