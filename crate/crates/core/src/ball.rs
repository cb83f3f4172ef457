use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::space::TwoNormSpace;

/// `B_e(a, δ) = {x : ‖x − a, e‖ < δ}` (or `≤ δ` when closed).
///
/// The set is a slab: it is unbounded along `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vector,
    pub direction: Vector,
    pub radius: f64,
    pub open: bool,
}

impl Ball {
    pub fn new(center: Vector, direction: Vector, radius: f64, open: bool) -> Result<Self> {
        if center.len() != direction.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: direction.len(),
            });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("ball radius must be positive, got {radius}")));
        }
        if direction.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidInput("ball direction must be non-zero".into()));
        }
        Ok(Self {
            center,
            direction,
            radius,
            open,
        })
    }

    pub fn open(center: Vector, direction: Vector, radius: f64) -> Result<Self> {
        Self::new(center, direction, radius, true)
    }

    pub fn closed(center: Vector, direction: Vector, radius: f64) -> Result<Self> {
        Self::new(center, direction, radius, false)
    }
}

/// Membership of `x` in the ball.
pub fn in_ball(space: &TwoNormSpace, ball: &Ball, x: &Vector) -> Result<bool> {
    space.check_vector(&ball.center)?;
    space.check_vector(x)?;
    let d = space.two_norm(&(x - &ball.center), &ball.direction)?;
    Ok(if ball.open {
        d < ball.radius
    } else {
        d <= ball.radius
    })
}
