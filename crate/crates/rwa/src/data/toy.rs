//! Synthetic two-domain datasets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::{Error, Result};

/// Default per-class sample count for the rotated toy.
pub const DEFAULT_N_PER_CLASS: usize = 100;
/// Default rotation between the source and target generative processes.
pub const DEFAULT_ROTATION_DEGREES: f64 = 45.0;
/// Default per-axis noise. The first axis separates the classes tightly;
/// the second carries large class-irrelevant variation, so a source-trained
/// classifier loses accuracy once the target is rotated.
pub const DEFAULT_NOISE_SCALES: [f64; 2] = [0.15, 1.0];

/// Two-class 2-D Gaussian source/target pair.
///
/// The source draws class c ∈ {0, 1} from N((±1, 0), diag(noise²)); the
/// target draws from the same process and then rotates every point by
/// `rotation_degrees` counterclockwise. Both datasets carry ground-truth
/// labels (the target's are for evaluation only). Output is a pure
/// function of the arguments, including `seed`.
pub fn generate_rotated_toy(
    n_per_class: usize,
    rotation_degrees: f64,
    noise_scales: [f64; 2],
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if n_per_class == 0 {
        return Err(Error::InvalidInput("n_per_class must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise_x = Normal::new(0.0, noise_scales[0])
        .map_err(|e| Error::InvalidInput(format!("noise scale: {e}")))?;
    let noise_y = Normal::new(0.0, noise_scales[1])
        .map_err(|e| Error::InvalidInput(format!("noise scale: {e}")))?;

    let draw = |rng: &mut ChaCha8Rng, rotation: f64| -> Dataset {
        let (sin, cos) = rotation.to_radians().sin_cos();
        let mut rows = Vec::with_capacity(2 * n_per_class);
        let mut labels = Vec::with_capacity(2 * n_per_class);
        for class in 0..2usize {
            let mx = if class == 0 { -1.0 } else { 1.0 };
            for _ in 0..n_per_class {
                let x = mx + noise_x.sample(rng);
                let y = noise_y.sample(rng);
                let (rx, ry) = (x * cos - y * sin, x * sin + y * cos);
                rows.push(vec![(0, rx), (1, ry)]);
                labels.push(class);
            }
        }
        Dataset::labeled(2, rows, labels, 2).expect("generated rows are canonical")
    };

    let source = draw(&mut rng, 0.0);
    let target = draw(&mut rng, rotation_degrees);
    Ok((source, target))
}

/// The four-point 1-D instance: a two-example labeled source at ±8 and an
/// unlabeled target at {−9, −1, 1, 9}.
pub fn generate_line_toy() -> (Dataset, Dataset) {
    let source =
        Dataset::from_raw_labels(1, vec![vec![(0, -8.0)], vec![(0, 8.0)]], vec![-1.0, 1.0])
            .expect("constant source is canonical");
    let target = Dataset::unlabeled(
        1,
        vec![
            vec![(0, -9.0)],
            vec![(0, -1.0)],
            vec![(0, 1.0)],
            vec![(0, 9.0)],
        ],
    )
    .expect("constant target is canonical");
    (source, target)
}
