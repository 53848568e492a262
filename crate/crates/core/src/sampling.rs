//! Random parameter sets and interior points for randomized checks.

use rand::Rng;

use crate::params::ModelParams;
use crate::state::PlanarState;

/// Rates log-uniform in `[0.01, 10]`, `p` uniform in `[0.05, 0.95]`; `b` and
/// `b1` are swapped if needed so that `b1 <= b`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> ModelParams {
    let mut rate = || 10f64.powf(rng.gen_range(-2.0..=1.0));
    let (mut b, mut b1) = (rate(), rate());
    if b1 > b {
        std::mem::swap(&mut b, &mut b1);
    }
    let (d, eps, l1, l2, g1, g2) = (rate(), rate(), rate(), rate(), rate(), rate());
    let p = rng.gen_range(0.05..=0.95);
    ModelParams::new(b, b1, d, eps, l1, l2, g1, g2, p).expect("sampled parameters are valid")
}

/// Uniform point of the open triangle `i1, i2 > 0, i1 + i2 < 1`.
pub fn random_interior_point<R: Rng + ?Sized>(rng: &mut R) -> PlanarState {
    loop {
        let a: f64 = rng.gen();
        let b: f64 = rng.gen();
        let (a, b) = if a + b >= 1.0 {
            (1.0 - a, 1.0 - b)
        } else {
            (a, b)
        };
        if a > 0.0 && b > 0.0 && a + b < 1.0 {
            return PlanarState::new(a, b).expect("interior");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn samples_are_valid_and_in_range() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..500 {
            let m = random_params(&mut rng);
            assert!(m.b1() <= m.b());
            assert!((0.05..=0.95).contains(&m.p()));
            assert!((0.01..=10.0).contains(&m.lambda2()));
            assert!(random_interior_point(&mut rng).is_interior());
        }
    }
}
