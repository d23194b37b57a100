//! Small dense helpers for `d ≤ 8`.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Determinant of a row-major `k × k` matrix by LU with partial pivoting.
/// The matrix is overwritten.
pub(crate) fn det_in_place(m: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a * k + col].abs().total_cmp(&m[b * k + col].abs()))
            .unwrap();
        let pv = m[pivot * k + col];
        if pv == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..k {
                m.swap(pivot * k + c, col * k + c);
            }
            det = -det;
        }
        det *= pv;
        for row in col + 1..k {
            let factor = m[row * k + col] / pv;
            if factor != 0.0 {
                for c in col + 1..k {
                    m[row * k + c] -= factor * m[col * k + c];
                }
            }
        }
    }
    det
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `k`-volume of the simplex spanned by `k + 1` points of `R^d`, from the
/// Gram determinant of its edge vectors.
pub fn simplex_measure(vertices: &[&[f64]]) -> f64 {
    let k = vertices.len().saturating_sub(1);
    if k == 0 {
        return 1.0;
    }
    let base = vertices[0];
    let edges: Vec<Vec<f64>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = dot(&edges[i], &edges[j]);
        }
    }
    det_in_place(&mut gram, k).max(0.0).sqrt() / factorial(k)
}

/// Unnormalized normal of the hyperplane through `d` points of `R^d`:
/// the generalized cross product of `v_i − v_0`. Its length is `(d−1)!`
/// times the facet's `(d−1)`-volume.
pub(crate) fn cross_normal(vertices: &[&[f64]], out: &mut [f64]) {
    let d = out.len();
    debug_assert_eq!(vertices.len(), d);
    let base = vertices[0];
    match d {
        1 => out[0] = 1.0,
        2 => {
            let (ex, ey) = (vertices[1][0] - base[0], vertices[1][1] - base[1]);
            out[0] = ey;
            out[1] = -ex;
        }
        3 => {
            let a = [
                vertices[1][0] - base[0],
                vertices[1][1] - base[1],
                vertices[1][2] - base[2],
            ];
            let b = [
                vertices[2][0] - base[0],
                vertices[2][1] - base[1],
                vertices[2][2] - base[2],
            ];
            out[0] = a[1] * b[2] - a[2] * b[1];
            out[1] = a[2] * b[0] - a[0] * b[2];
            out[2] = a[0] * b[1] - a[1] * b[0];
        }
        _ => {
            let rows = d - 1;
            let mut edges = vec![0.0; rows * d];
            for i in 0..rows {
                for c in 0..d {
                    edges[i * d + c] = vertices[i + 1][c] - base[c];
                }
            }
            let mut minor = vec![0.0; rows * rows];
            for (skip, slot) in out.iter_mut().enumerate() {
                for i in 0..rows {
                    let mut cc = 0;
                    for c in 0..d {
                        if c != skip {
                            minor[i * rows + cc] = edges[i * d + c];
                            cc += 1;
                        }
                    }
                }
                let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
                *slot = sign * det_in_place(&mut minor, rows);
            }
        }
    }
}
