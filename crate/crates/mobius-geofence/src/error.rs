use thiserror::Error;

/// Errors raised by scene normalization, map construction and the
/// plane-bridge / controller evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("circles touch or intersect (center gap {center_gap}, radii {r_inner} and {r_outer})")]
    TouchingOrIntersectingCircles {
        center_gap: f64,
        r_inner: f64,
        r_outer: f64,
    },

    #[error("circles are disjoint but neither encloses the other; no annular region exists")]
    SeparatedCircles,

    #[error("circles are concentric after normalization (lambda = 0)")]
    ConcentricInput,

    #[error("circle radius must be positive, got {0}")]
    DegenerateRadius(f64),

    #[error("concentrizing quadratic has complex roots (discriminant {discriminant}); circle pair is not disjoint")]
    ComplexRoots { discriminant: f64 },

    #[error(
        "concentrizing quadratic has a unit-magnitude root; a circle passes through the map pole"
    )]
    UnitRoot,

    #[error("point within {tol} of a map pole (distance {distance})")]
    NearPole { distance: f64, tol: f64 },

    #[error("heading offset undefined: direction vector has near-zero magnitude")]
    DegenerateAngle,

    #[error("polar rate undefined at the origin (|r| = {0})")]
    OriginSingularity(f64),

    #[error("barrier violated: |E| = {e_abs} vs bound {delta_t}")]
    BarrierViolated { e_abs: f64, delta_t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
