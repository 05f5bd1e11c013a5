//! Quadrature rules: Gauss-Legendre (Newton on the recurrence),
//! Gauss-Hermite for the standard normal weight (Golub-Welsch), and an
//! adaptive Gauss-Kronrod 7/15 integrator, plus pairwise summation.
//!
//! Everything here is deterministic with a fixed evaluation and summation
//! order, which the rest of the crate relies on for bit-reproducibility.

/// Nodes and matching weights of a quadrature rule, nodes ascending.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    /// Apply the rule to `f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let vals: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&vals)
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0_f64;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // valid away from x = +-1, which Gauss nodes never reach
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Quadrature {
    assert!(n >= 1, "empty quadrature rule");
    let mut nodes = vec![0.0_f64; n];
    let mut weights = vec![0.0_f64; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess for the i-th root near +1, descending
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..64 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                x -= p / d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    Quadrature { nodes, weights }
}

/// n-point Gauss-Legendre rule mapped affinely to [lo, hi].
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> Quadrature {
    let base = gauss_legendre(n);
    let c = 0.5 * (hi + lo);
    let h = 0.5 * (hi - lo);
    Quadrature {
        nodes: base.nodes.iter().map(|&x| c + h * x).collect(),
        weights: base.weights.iter().map(|&w| h * w).collect(),
    }
}

/// n-point Gauss-Hermite rule for the standard normal weight
/// (integrates f against exp(-x^2/2)/sqrt(2 pi); the weights sum to 1).
///
/// Golub-Welsch on the probabilists' Jacobi matrix, whose off-diagonal is
/// sqrt(k); nodes are eigenvalues, weights the squared first eigenvector
/// components.
pub fn gauss_hermite(n: usize) -> Quadrature {
    assert!(n >= 1, "empty quadrature rule");
    if n == 1 {
        return Quadrature {
            nodes: vec![0.0],
            weights: vec![1.0],
        };
    }
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n - 1 {
        let b = ((k + 1) as f64).sqrt();
        jac[(k, k + 1)] = b;
        jac[(k + 1, k)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Quadrature {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

// Gauss-Kronrod 7/15 pair on [-1, 1] (positive abscissae; the rule is
// symmetric).  Values from the QUADPACK dqk15 tables.
const GK_XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7/15 panel: returns (kronrod value, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (hi + lo);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut resk = GK_WK[7] * fc;
    let mut resg = GK_WG[3] * fc;
    let mut fv = [0.0_f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = h * GK_XK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        resk += GK_WK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += GK_WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = GK_WK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += GK_WK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let resk_h = resk * h;
    let resasc_h = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc_h != 0.0 && err != 0.0 {
        err = resasc_h * (200.0 * err / resasc_h).powf(1.5).min(1.0);
    }
    (resk_h, err)
}

fn adapt<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64, tol: f64, depth: u32) -> (f64, f64) {
    let (v, e) = gk15(f, lo, hi);
    if e <= tol || depth >= 40 {
        return (v, e);
    }
    let mid = 0.5 * (lo + hi);
    let (v1, e1) = adapt(f, lo, mid, 0.5 * tol, depth + 1);
    let (v2, e2) = adapt(f, mid, hi, 0.5 * tol, depth + 1);
    (v1 + v2, e1 + e2)
}

/// Adaptive Gauss-Kronrod integration of `f` over [lo, hi] to absolute
/// tolerance `abs_tol` (best effort; the returned second value is the
/// accumulated error estimate).  Bisection order is fixed, so the result is
/// deterministic.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, abs_tol: f64) -> (f64, f64) {
    if lo == hi {
        return (0.0, 0.0);
    }
    adapt(&mut f, lo, hi, abs_tol.max(1e-300), 0)
}

/// Pairwise (cascade) summation: O(eps log n) worst-case rounding, same
/// result for any thread count since it is a pure function of the slice.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        let mut s = 0.0;
        for &x in v {
            s += x;
        }
        s
    } else {
        let mid = v.len() / 2;
        pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
    }
}
