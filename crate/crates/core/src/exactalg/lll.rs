//! Floating-point LLL on a Gram matrix. Only used to pick good search
//! directions; every downstream result is re-verified exactly.

/// Returns a unimodular integer matrix U (rows) such that the lattice basis
/// U·B is LLL-reduced with respect to the Gram matrix `gram` of B.
pub fn lll_gram(gram: &[Vec<f64>], delta: f64) -> Vec<Vec<i64>> {
    let n = gram.len();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    if n <= 1 {
        return u;
    }
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&transformed(gram, &u));
            let r = mu[k][j].round();
            if r != 0.0 && r.abs() < 1e15 {
                let r = r as i64;
                let src = u[j].clone();
                for (x, y) in u[k].iter_mut().zip(src) {
                    *x -= r * y;
                }
            }
        }
        let (mu, b) = gram_schmidt(&transformed(gram, &u));
        if b[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            k += 1;
        } else {
            u.swap(k, k - 1);
            k = k.saturating_sub(1).max(1);
        }
    }
    u
}

/// U G Uᵀ.
pub fn transformed(gram: &[Vec<f64>], u: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = gram.len();
    let ug: Vec<Vec<f64>> = u
        .iter()
        .map(|row| (0..n).map(|j| (0..n).map(|k| row[k] as f64 * gram[k][j]).sum()).collect())
        .collect();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| ug[i][k] * u[j][k] as f64).sum()).collect())
        .collect()
}

/// Gram–Schmidt coefficients μ and squared lengths B from a Gram matrix.
pub fn gram_schmidt(g: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = if b[j] != 0.0 { s / b[j] } else { 0.0 };
        }
        let mut s = g[i][i];
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
        mu[i][i] = 1.0;
    }
    (mu, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_skewed_basis() {
        // basis (1, 0), (100, 1) of Z²
        let g = vec![vec![1.0, 100.0], vec![100.0, 10001.0]];
        let u = lll_gram(&g, 0.99);
        let r = transformed(&g, &u);
        assert!(r[0][0] <= 1.0 + 1e-9 && r[1][1] <= 1.0 + 1e-9);
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert_eq!(det.abs(), 1);
    }
}
