use nalgebra::{DMatrix, SymmetricEigen};

/// Normalized Hermite functions `h_0..h_{m-1}` at `x` with scale `hbar`:
/// `h_n(x) = (pi hbar)^{-1/4} (2^n n!)^{-1/2} H_n(x/sqrt(hbar)) exp(-x^2 / 2hbar)`.
pub fn hermite_functions(m: usize, hbar: f64, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; m];
    if m == 0 {
        return out;
    }
    let u = x / hbar.sqrt();
    let scale = (std::f64::consts::PI * hbar).powf(-0.25);
    out[0] = scale * (-0.5 * u * u).exp();
    if m > 1 {
        out[1] = std::f64::consts::SQRT_2 * u * out[0];
    }
    for n in 1..m.saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * u * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
    out
}

/// Gauss-Hermite rule of order `k` for `int f(x) dx` (weights include `exp(x^2)`),
/// on the unit scale. Nodes by Golub-Welsch, polished by Newton steps.
pub fn gauss_hermite(k: usize) -> (Vec<f64>, Vec<f64>) {
    let jac = DMatrix::from_fn(k, k, |i, j| if i + 1 == j || j + 1 == i { ((i.max(j)) as f64 / 2.0).sqrt() } else { 0.0 });
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            // h_k(x) and derivative h_k' = sqrt(2k) h_{k-1} - x h_k (unit scale)
            let h = hermite_functions(k + 1, 1.0, *x);
            let d = (2.0 * k as f64).sqrt() * h[k - 1] - *x * h[k];
            if d != 0.0 && d.is_finite() {
                let step = h[k] / d;
                if step.abs() < 1e-3 {
                    *x -= step;
                }
            }
        }
    }
    // symmetrize to kill round-off asymmetry
    for i in 0..k / 2 {
        let a = 0.5 * (nodes[k - 1 - i] - nodes[i]);
        nodes[i] = -a;
        nodes[k - 1 - i] = a;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    let weights = nodes.iter().map(|&x| 1.0 / hermite_functions(k, 1.0, x).iter().map(|h| h * h).sum::<f64>()).collect();
    (nodes, weights)
}
