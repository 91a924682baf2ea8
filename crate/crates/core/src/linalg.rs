//! Small dense linear-algebra helpers on `Vec<f64>` rows.
//!
//! Everything here works on tiny matrices (ambient dimension ≤ ~10), so the
//! routines favour clarity and partial pivoting over blocking or BLAS.

pub type Matrix = Vec<Vec<f64>>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `y += s * x`
pub fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, x)).collect()
}

/// `mᵀ y`, where `m` has `cols` columns.
pub fn mat_t_vec(m: &[Vec<f64>], y: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (row, &yi) in m.iter().zip(y) {
        axpy(&mut out, yi, row);
    }
    out
}

pub fn transpose(m: &[Vec<f64>], cols: usize) -> Matrix {
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

/// Numerical rank by Gaussian elimination with partial pivoting.
///
/// `tol` is relative to the largest absolute entry of the input.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Matrix = rows.to_vec();
    let cols = m[0].len();
    let scale = m.iter().map(|r| norm_inf(r)).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let thresh = tol * scale;
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let (piv, best) = (r..m.len())
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= thresh {
            continue;
        }
        m.swap(r, piv);
        for i in (r + 1)..m.len() {
            let f = m[i][c] / m[r][c];
            if f != 0.0 {
                let (top, bottom) = m.split_at_mut(i);
                axpy(&mut bottom[0][c..], -f, &top[r][c..]);
            }
        }
        r += 1;
    }
    r
}

/// Affine dimension of a point set (−1 for the empty set, as `isize`).
pub fn affine_dim(points: &[&[f64]], tol: f64) -> isize {
    match points.split_first() {
        None => -1,
        Some((p0, rest)) => {
            let diffs: Matrix = rest.iter().map(|p| sub(p, p0)).collect();
            rank(&diffs, tol) as isize
        }
    }
}

/// Determinant of a square matrix.
pub fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d *= a[c][c];
        for i in (c + 1)..n {
            let f = a[i][c] / a[c][c];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(i);
                axpy(&mut bottom[0][c..], -f, &top[c][c..]);
            }
        }
    }
    d
}

/// Solves the square system `m z = rhs`; `None` when (numerically) singular.
pub fn solve(m: &[Vec<f64>], rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(row, &r)| {
            let mut v = row.clone();
            v.push(r);
            v
        })
        .collect();
    let scale = m.iter().map(|r| norm_inf(r)).fold(0.0_f64, f64::max);
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() <= tol * scale.max(1e-300) {
            return None;
        }
        a.swap(piv, c);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                if f != 0.0 {
                    let pivot_row = a[c].clone();
                    axpy(&mut a[i][c..], -f, &pivot_row[c..]);
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// Orthonormal basis of the null space `{z : rows · z = 0}`.
pub fn null_space(rows: &[Vec<f64>], dim: usize, tol: f64) -> Matrix {
    // Reduced row echelon form, then read off free columns.
    let mut m: Matrix = rows.to_vec();
    let scale = m.iter().map(|r| norm_inf(r)).fold(0.0_f64, f64::max);
    let thresh = tol * scale.max(1e-300);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        if r == m.len() {
            break;
        }
        let piv = (r..m.len())
            .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
            .unwrap();
        if m[piv][c].abs() <= thresh {
            continue;
        }
        m.swap(r, piv);
        let p = m[r][c];
        for v in m[r].iter_mut() {
            *v /= p;
        }
        for i in 0..m.len() {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    let pivot_row = m[r].clone();
                    axpy(&mut m[i], -f, &pivot_row);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0.0; dim];
        v[free] = 1.0;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free];
        }
        basis.push(v);
    }
    gram_schmidt(basis, tol)
}

/// Orthonormalizes `vs`, dropping (numerically) dependent vectors.
pub fn gram_schmidt(vs: Matrix, tol: f64) -> Matrix {
    let mut out: Matrix = Vec::new();
    for mut v in vs {
        for u in &out {
            let p = dot(&v, u);
            axpy(&mut v, -p, u);
        }
        let n = norm(&v);
        if n > tol {
            out.push(scale(&v, 1.0 / n));
        }
    }
    out
}

/// Lexicographic comparison of float vectors.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
