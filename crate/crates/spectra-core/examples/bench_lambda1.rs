//! Quick timing probe for the 2D eigensolve path.

use spectra_core::dirac2d::lambda1_ladder;
use spectra_core::{Mass, RightTriangle};
use std::time::Instant;

fn main() {
    let tri = RightTriangle::new(1.0, 1.0).unwrap();
    for m in [0.0, 50.0] {
        let t0 = Instant::now();
        let ladder = lambda1_ladder(&tri, Mass::new(m).unwrap(), &[24, 48, 96]).unwrap();
        println!(
            "m={m}: points={:?} extrap={:.9} order={:?} err={:.2e} elapsed={:.1?}",
            ladder.points,
            ladder.extrapolation.value,
            ladder.extrapolation.order,
            ladder.extrapolation.error_bound,
            t0.elapsed()
        );
    }
}
