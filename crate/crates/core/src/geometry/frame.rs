//! Uniformly random orthonormal `j`-frames and projection onto them.

use super::linalg::dot;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// `j` orthonormal vectors in `R^n`, stored row-wise (`j × n`).
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    n: usize,
    rows: Vec<f64>,
}

impl Frame {
    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len() / self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    /// Coordinates of flat `n`-dimensional points in the frame.
    pub fn project(&self, points: &[f64]) -> Vec<f64> {
        let j = self.rank();
        let mut out = Vec::with_capacity(points.len() / self.n * j);
        for p in points.chunks_exact(self.n) {
            for i in 0..j {
                out.push(dot(self.row(i), p));
            }
        }
        out
    }
}

/// Gaussian `j × n` matrix orthonormalized by modified Gram–Schmidt; the
/// row span is uniform on the Grassmannian.
pub fn random_orthonormal_frame(n: usize, j: usize, rng: &mut RngStream) -> Result<Frame> {
    if j == 0 || j > n {
        return Err(Error::arg(format!("frame rank {j} must lie in 1..={n}")));
    }
    let mut rows = vec![0.0; j * n];
    rng.fill_normal(&mut rows);
    for i in 0..j {
        // Gaussian rows are independent almost surely; redraw on the
        // measure-zero failure rather than return a short frame.
        loop {
            for k in 0..i {
                let (done, rest) = rows.split_at_mut(i * n);
                let proj = dot(&done[k * n..(k + 1) * n], &rest[..n]);
                for c in 0..n {
                    rest[c] -= proj * done[k * n + c];
                }
            }
            let row = &mut rows[i * n..(i + 1) * n];
            let len = dot(row, row).sqrt();
            if len > 1e-8 {
                row.iter_mut().for_each(|x| *x /= len);
                break;
            }
            rng.fill_normal(row);
        }
    }
    Ok(Frame { n, rows })
}

pub fn project(points: &[f64], frame: &Frame) -> Vec<f64> {
    frame.project(points)
}
