use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mmm_core::{MmmError, Result};

/// Largest cohort for which all sign patterns are enumerated.
pub const EXACT_LIMIT: usize = 20;
const MONTE_CARLO_DRAWS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedTest {
    /// Mean of `a - b`.
    pub mean_diff: f64,
    /// Two-sided p-value of the sign-flip permutation test.
    pub p_value: f64,
}

/// Two-sided paired permutation test on the mean difference. Exact up to
/// [`EXACT_LIMIT`] pairs, Monte Carlo with a fixed seed above.
pub fn paired_permutation_test(a: &[f64], b: &[f64]) -> Result<PairedTest> {
    if a.len() != b.len() || a.is_empty() {
        return Err(MmmError::Data("paired test needs two equally long, nonempty samples".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().any(|x| !x.is_finite()) {
        return Err(MmmError::Data("paired test on non-finite values".into()));
    }
    let n = d.len();
    let observed: f64 = d.iter().sum::<f64>().abs();
    // relative slack so that sign patterns with equal statistic count as extreme
    let tol = 1e-9 * (1.0 + observed);
    let extreme = |signs: &dyn Fn(usize) -> bool| {
        let s: f64 = (0..n).map(|i| if signs(i) { -d[i] } else { d[i] }).sum();
        s.abs() >= observed - tol
    };
    let p_value = if n <= EXACT_LIMIT {
        let total = 1u64 << n;
        let hits = (0..total).filter(|&mask| extreme(&|i| mask >> i & 1 == 1)).count();
        hits as f64 / total as f64
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut hits = 1usize;
        for _ in 0..MONTE_CARLO_DRAWS {
            let flips: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            if extreme(&|i| flips[i]) {
                hits += 1;
            }
        }
        hits as f64 / (MONTE_CARLO_DRAWS + 1) as f64
    };
    Ok(PairedTest {
        mean_diff: d.iter().sum::<f64>() / n as f64,
        p_value,
    })
}
