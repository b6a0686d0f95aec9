use nalgebra::DMatrix;
use num_complex::Complex64;

/// Displacement operator `D(beta) = exp(beta a^+ - beta* a)` on the first `m` Fock states.
///
/// Entry `(n + a, n)` is `e^{i a arg beta} f_n^a` with the normalized Laguerre function
/// `f_n^a = sqrt(n!/(n+a)!) x^{a/2} e^{-x/2} L_n^a(x)`, `x = |beta|^2`, run upward in `n`.
/// The plain column recurrence loses all digits once `|beta|` exceeds a few units.
pub fn displacement(m: usize, beta: Complex64) -> DMatrix<Complex64> {
    let mut d = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    let x = beta.norm_sqr();
    let ph = if x > 0.0 { beta / beta.norm() } else { Complex64::new(1.0, 0.0) };
    let mph = -ph.conj();
    let mut f = vec![0.0f64; m];
    let mut pa = Complex64::new(1.0, 0.0);
    let mut ma = Complex64::new(1.0, 0.0);
    for a in 0..m {
        let len = m - a;
        let af = a as f64;
        f[0] = if x > 0.0 {
            (0.5 * af * x.ln() - 0.5 * x - 0.5 * ln_factorial(a)).exp()
        } else if a == 0 {
            1.0
        } else {
            0.0
        };
        if len > 1 {
            f[1] = (1.0 + af - x) * f[0] / (1.0 + af).sqrt();
        }
        for n in 1..len.saturating_sub(1) {
            let nf = n as f64;
            f[n + 1] = ((2.0 * nf + 1.0 + af - x) * f[n] - (nf * (nf + af)).sqrt() * f[n - 1]) / ((nf + 1.0) * (nf + 1.0 + af)).sqrt();
        }
        for n in 0..len {
            d[(n + a, n)] = pa * f[n];
            if a > 0 {
                d[(n, n + a)] = ma * f[n];
            }
        }
        pa *= ph;
        ma *= mph;
    }
    d
}

fn ln_factorial(a: usize) -> f64 {
    (1..=a).map(|k| (k as f64).ln()).sum()
}

/// `2 D(2 alpha) Pi`, the displaced parity scaled by two, with `Pi = diag((-1)^n)`.
pub fn displaced_parity(m: usize, alpha: Complex64) -> DMatrix<Complex64> {
    let mut d = displacement(m, alpha * 2.0);
    for n in 0..m {
        let s = if n % 2 == 0 { 2.0 } else { -2.0 };
        for k in 0..m {
            d[(k, n)] *= s;
        }
    }
    d
}

/// Fock-space label of the phase-space point `(p, q)` in this crate's momentum convention
/// (`P` acts as `+i hbar d/dx`, so `[Q, P] = -i hbar`).
pub fn phase_point_alpha(p: f64, q: f64, hbar: f64) -> Complex64 {
    Complex64::new(q, -p) / (2.0 * hbar).sqrt()
}

/// Grossmann-Royer operator by the displacement recurrence.
pub fn grossmann_royer_fast(m: usize, hbar: f64, p: f64, q: f64) -> DMatrix<Complex64> {
    displaced_parity(m, phase_point_alpha(p, q, hbar))
}

/// `Tr[Omega(p,q) A]` without forming the product.
pub fn trace_with(omega: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> Complex64 {
    let m = omega.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for k in 0..m {
            acc += omega[(i, k)] * a[(k, i)];
        }
    }
    acc
}
