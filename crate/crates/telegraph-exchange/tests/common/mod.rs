//! Independent oracles for the acceptance gate: textbook constructions and
//! numerics deliberately written apart from the library's own linear
//! algebra, so agreement is a genuine cross-check.

use ndarray::Array2;
use telegraph_exchange::C64;

fn pauli() -> [Array2<C64>; 3] {
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    [
        Array2::from_shape_vec((2, 2), vec![z, o, o, z]).expect("2x2"),
        Array2::from_shape_vec((2, 2), vec![z, -i, i, z]).expect("2x2"),
        Array2::from_shape_vec((2, 2), vec![o, z, z, -o]).expect("2x2"),
    ]
}

pub fn kron_oracle(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// `sigma_1 . sigma_2` built directly from Pauli matrices.
pub fn heisenberg_oracle() -> Array2<C64> {
    pauli()
        .iter()
        .map(|s| kron_oracle(s, s))
        .fold(Array2::zeros((4, 4)), |acc, m| acc + m)
}

/// Commutator superoperator of the exchange interaction under row-major
/// vectorization: `H (x) I - I (x) H^T`.
pub fn sigma_h_oracle() -> Array2<C64> {
    let h = heisenberg_oracle();
    let eye: Array2<C64> = Array2::eye(4);
    kron_oracle(&h, &eye) - kron_oracle(&eye, &h.t().to_owned())
}

/// Cyclic Jacobi eigenvalues of a real symmetric matrix, ascending.
pub fn jacobi_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt() + 1.0;
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Smallest eigenvalue of a (nearly) Hermitian matrix via the doubled real
/// symmetric embedding `[[Re, -Im], [Im, Re]]`.
pub fn hermitian_min_eigenvalue(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let h = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let mut big = Array2::<f64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)];
            big[(i, j)] = v.re;
            big[(i, j + n)] = -v.im;
            big[(i + n, j)] = v.im;
            big[(i + n, j + n)] = v.re;
        }
    }
    jacobi_eigenvalues(&big)[0]
}

/// Matrix exponential by scaling-and-squaring with a machine-precision
/// Taylor stage.
pub fn expm_oracle(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let bound: f64 = a.iter().map(|c| c.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if bound > 0.5 {
        (bound / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.mapv(|c| c * 2f64.powi(-squarings));
    let mut term: Array2<C64> = Array2::eye(n);
    let mut sum = term.clone();
    for j in 1..=40u32 {
        term = term.dot(&b).mapv(|c| c / j as f64);
        sum += &term;
        if term.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-20 {
            break;
        }
    }
    let mut r = sum;
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    r
}

/// Classic fourth-order Runge-Kutta integration of the pure dissipator
/// `d rho/dt = L rho L^dag - (L^dag L rho + rho L^dag L)/2`.
pub fn rk4_dissipator(l: &Array2<C64>, rho0: &Array2<C64>, t: f64, steps: usize) -> Array2<C64> {
    let ld = l.t().mapv(|c| c.conj());
    let ldl = ld.dot(l);
    let deriv = |rho: &Array2<C64>| -> Array2<C64> {
        l.dot(rho).dot(&ld) - (ldl.dot(rho) + rho.dot(&ldl)).mapv(|c| 0.5 * c)
    };
    let h = t / steps as f64;
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = deriv(&rho);
        let k2 = deriv(&(&rho + &k1.mapv(|c| c * (0.5 * h))));
        let k3 = deriv(&(&rho + &k2.mapv(|c| c * (0.5 * h))));
        let k4 = deriv(&(&rho + &k3.mapv(|c| c * h)));
        rho =
            &rho + &(k1 + k2.mapv(|c| c * 2.0) + k3.mapv(|c| c * 2.0) + k4).mapv(|c| c * (h / 6.0));
    }
    rho
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
