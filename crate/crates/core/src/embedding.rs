//! Metric multidimensional scaling by stress majorization (SMACOF).
//!
//! The iteration starts from classical (Torgerson) scaling unless a random
//! start is requested, then applies Guttman transforms until the relative
//! stress decrease falls below `eps`. Output is centered and rotated onto
//! its principal axes so that runs are comparable.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::DistanceMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MdsOptions {
    pub dim: usize,
    pub max_iters: usize,
    /// Stop when `(old - new) <= eps * old`.
    pub eps: f64,
    /// Only used with `random_init`.
    pub seed: u64,
    pub random_init: bool,
}

impl Default for MdsOptions {
    fn default() -> Self {
        MdsOptions {
            dim: 2,
            max_iters: 300,
            eps: 1e-6,
            seed: 0,
            random_init: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCoords {
    /// One row of `dim` coordinates per input item.
    pub points: Vec<Vec<f64>>,
    /// Raw stress `sum_{i<j} (D_ij - d_ij)^2` of `points`.
    pub final_stress: f64,
    /// Stress of the start configuration followed by one entry per iteration.
    pub stress_history: Vec<f64>,
    pub iterations: usize,
}

impl EmbeddingCoords {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// CSV with header `id,x,y` (further axes named `x3`, `x4`, ...).
    pub fn to_csv(&self) -> String {
        let mut header = vec!["id".to_string()];
        for a in 0..self.dim() {
            header.push(match a {
                0 => "x".into(),
                1 => "y".into(),
                2 => "z".into(),
                _ => format!("x{}", a + 1),
            });
        }
        let mut s = header.join(",");
        s.push('\n');
        for (i, p) in self.points.iter().enumerate() {
            s.push_str(&i.to_string());
            for c in p {
                s.push(',');
                s.push_str(&c.to_string());
            }
            s.push('\n');
        }
        s
    }
}

/// Euclidean distances between the rows of `x`, row-major `n x n`.
fn pairwise(x: &DMatrix<f64>) -> Vec<f64> {
    let (n, dim) = x.shape();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..dim).map(|a| x[(i, a)]).collect())
        .collect();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            out[i * n + j] = d;
            out[j * n + i] = d;
        }
    }
    out
}

/// Raw stress of a configuration (rows are points).
pub fn stress(d: &DistanceMatrix, x: &DMatrix<f64>) -> f64 {
    let n = d.n();
    let dx = pairwise(x);
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = d.get(i, j) - dx[i * n + j];
            s += r * r;
        }
    }
    s
}

/// Eigenpairs of a symmetric matrix, largest eigenvalue first.
fn sorted_eigen(m: DMatrix<f64>) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..eig.eigenvalues.len())
        .map(|i| {
            (
                eig.eigenvalues[i],
                eig.eigenvectors.column(i).iter().copied().collect(),
            )
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

fn classical(d: &DistanceMatrix, dim: usize) -> DMatrix<f64> {
    let n = d.n();
    let sq = DMatrix::from_fn(n, n, |i, j| d.get(i, j) * d.get(i, j));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand)
    });
    let eig = sorted_eigen(b);
    DMatrix::from_fn(n, dim, |i, a| match eig.get(a) {
        Some((l, v)) if *l > 0.0 => v[i] * l.sqrt(),
        _ => 0.0,
    })
}

fn guttman(d: &DistanceMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let dx = pairwise(x);
    let dim = x.ncols();
    let mut out = DMatrix::zeros(n, dim);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            let dij = dx[i * n + j];
            if i != j && dij > 0.0 {
                let b = -d.get(i, j) / dij;
                diag -= b;
                for a in 0..dim {
                    out[(i, a)] += b * x[(j, a)];
                }
            }
        }
        for a in 0..dim {
            out[(i, a)] += diag * x[(i, a)];
        }
    }
    out / n as f64
}

/// Center, rotate onto principal axes, and fix each axis sign so that the
/// coordinates have nonnegative third moment.
fn align(mut x: DMatrix<f64>) -> DMatrix<f64> {
    let (n, dim) = x.shape();
    for a in 0..dim {
        let mean = x.column(a).sum() / n as f64;
        x.column_mut(a).add_scalar_mut(-mean);
    }
    let cov = x.transpose() * &x;
    let eig = sorted_eigen(cov);
    let rot = DMatrix::from_fn(dim, dim, |r, c| eig[c].1[r]);
    let mut y = x * rot;
    let scale = y
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for a in 0..dim {
        let col = y.column(a);
        let skew: f64 = col.iter().map(|v| v * v * v).sum();
        let flip = if skew.abs() > 1e-9 * scale.powi(3) {
            skew < 0.0
        } else {
            // symmetric axis: make the first clearly nonzero coordinate positive
            col.iter()
                .find(|v| v.abs() > 1e-9 * scale)
                .is_some_and(|v| *v < 0.0)
        };
        if flip {
            y.column_mut(a).neg_mut();
        }
    }
    y
}

/// Embed a distance matrix into `options.dim` dimensions.
pub fn mds(d: &DistanceMatrix, options: &MdsOptions) -> Result<EmbeddingCoords> {
    if options.dim == 0 {
        return Err(Error::InvalidArgument(
            "embedding dimension must be positive".into(),
        ));
    }
    if options.eps.is_nan() || options.eps < 0.0 {
        return Err(Error::InvalidArgument("eps must be nonnegative".into()));
    }
    let n = d.n();
    // DistanceMatrix construction already guarantees symmetry and nonnegativity.
    let mut x = if options.random_init {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let scale = d.entries().iter().fold(0.0f64, |m, v| m.max(*v)).max(1.0);
        DMatrix::from_fn(n, options.dim, |_, _| rng.gen_range(-scale..scale))
    } else {
        classical(d, options.dim)
    };
    let mut current = stress(d, &x);
    let mut history = vec![current];
    let mut iterations = 0;
    while iterations < options.max_iters && current > 0.0 {
        let next_x = guttman(d, &x);
        let next = stress(d, &next_x);
        iterations += 1;
        // a Guttman step cannot raise stress; a measured rise is rounding noise
        if next > current {
            break;
        }
        history.push(next);
        let improvement = current - next;
        x = next_x;
        current = next;
        if improvement <= options.eps * (current + improvement) {
            break;
        }
    }
    let x = align(x);
    let final_stress = stress(d, &x);
    let points = (0..n).map(|i| x.row(i).iter().copied().collect()).collect();
    Ok(EmbeddingCoords {
        points,
        final_stress,
        stress_history: history,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix_from_points(p: &[Vec<f64>]) -> DistanceMatrix {
        let n = p.len();
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e[i * n + j] = p[i]
                        .iter()
                        .zip(&p[j])
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                }
            }
        }
        DistanceMatrix::from_f64(n, e).unwrap()
    }

    #[test]
    fn two_points_on_a_line() {
        let d = DistanceMatrix::from_f64(2, vec![0.0, 5.0, 5.0, 0.0]).unwrap();
        let e = mds(
            &d,
            &MdsOptions {
                dim: 1,
                ..MdsOptions::default()
            },
        )
        .unwrap();
        let mut xs: Vec<f64> = e.points.iter().map(|p| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 2.5).abs() < 1e-9 && (xs[1] - 2.5).abs() < 1e-9);
        assert!(e.final_stress < 1e-12);
    }

    #[test]
    fn single_point() {
        let d = DistanceMatrix::from_f64(1, vec![0.0]).unwrap();
        let e = mds(&d, &MdsOptions::default()).unwrap();
        assert_eq!(e.points, vec![vec![0.0, 0.0]]);
        assert_eq!(e.final_stress, 0.0);
    }

    #[test]
    fn triangle_embeds_exactly() {
        let d =
            DistanceMatrix::from_f64(3, vec![0.0, 3.0, 4.0, 3.0, 0.0, 5.0, 4.0, 5.0, 0.0]).unwrap();
        let e = mds(&d, &MdsOptions::default()).unwrap();
        assert!(e.final_stress < 1e-8, "{}", e.final_stress);
    }

    #[test]
    fn planar_points_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4, 10, 30, 50] {
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)])
                .collect();
            let e = mds(&matrix_from_points(&pts), &MdsOptions::default()).unwrap();
            assert!(e.final_stress < 1e-8, "n={n}: {}", e.final_stress);
        }
    }

    #[test]
    fn stress_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        for random_init in [false, true] {
            let opts = MdsOptions {
                random_init,
                seed: 11,
                eps: 0.0,
                max_iters: 100,
                ..MdsOptions::default()
            };
            let e = mds(&matrix_from_points(&pts), &opts).unwrap();
            for w in e.stress_history.windows(2) {
                assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn alignment_is_centered_and_deterministic() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![4.0, 0.0],
            vec![4.0, 1.0],
            vec![1.0, 3.0],
            vec![9.0, 2.0],
        ];
        let d = matrix_from_points(&pts);
        let a = mds(&d, &MdsOptions::default()).unwrap();
        let b = mds(&d, &MdsOptions::default()).unwrap();
        assert_eq!(a, b);
        for axis in 0..2 {
            let mean: f64 = a.points.iter().map(|p| p[axis]).sum::<f64>() / 5.0;
            assert!(mean.abs() < 1e-9);
        }
        let csv = a.to_csv();
        assert!(csv.starts_with("id,x,y\n0,"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn rejects_bad_options() {
        let d = DistanceMatrix::from_f64(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(mds(
            &d,
            &MdsOptions {
                dim: 0,
                ..MdsOptions::default()
            }
        )
        .is_err());
        assert!(mds(
            &d,
            &MdsOptions {
                eps: f64::NAN,
                ..MdsOptions::default()
            }
        )
        .is_err());
    }
}
