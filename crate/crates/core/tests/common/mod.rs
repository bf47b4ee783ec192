#![allow(clippy::needless_range_loop)]

//! Hand-rolled oracles shared by the integration tests: sign and bar maps,
//! defining-representation matrices built from scratch, and operators
//! turned into matrices by acting on constant spin fields.

#![allow(dead_code)]

use spinalg::arith::RatFunc;
use spinalg::operator::{Operator, SpinField, SpinState};
use spinalg::{Rational, Scalar};

pub type Mat = Vec<Vec<Rational>>;

pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_frac(num, den)
}

pub fn theta(n: usize, theta0: i64, a: usize) -> i64 {
    if n % 2 == 1 || a <= n / 2 {
        1
    } else {
        theta0
    }
}

pub fn bar(n: usize, a: usize) -> usize {
    n + 1 - a
}

pub fn basis(n: usize, theta0: i64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            let keep = if theta0 == 1 { bar(n, a) > b } else { bar(n, a) >= b };
            if keep {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn zeros(n: usize) -> Mat {
    vec![vec![Rational::from_int(0); n]; n]
}

pub fn unit(n: usize, a: usize, b: usize) -> Mat {
    let mut m = zeros(n);
    m[a - 1][b - 1] = Rational::from_int(1);
    m
}

pub fn add(x: &Mat, y: &Mat, c: i64) -> Mat {
    x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(u, v)| u + v * Rational::from_int(c)).collect()).collect()
}

pub fn mul(x: &Mat, y: &Mat) -> Mat {
    let n = x.len();
    let m = y[0].len();
    let mut out = vec![vec![Rational::from_int(0); m]; n];
    for i in 0..n {
        for k in 0..y.len() {
            if x[i][k] == Rational::from_int(0) {
                continue;
            }
            for j in 0..m {
                out[i][j] += &x[i][k] * &y[k][j];
            }
        }
    }
    out
}

pub fn comm(x: &Mat, y: &Mat) -> Mat {
    add(&mul(x, y), &mul(y, x), -1)
}

pub fn trace(x: &Mat) -> Rational {
    (0..x.len()).map(|i| x[i][i].clone()).sum()
}

pub fn kron(x: &Mat, y: &Mat) -> Mat {
    let (n, m) = (x.len(), y.len());
    let mut out = vec![vec![Rational::from_int(0); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &x[i][j] * &y[k][l];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n);
    for i in 0..n {
        m[i][i] = Rational::from_int(1);
    }
    m
}

pub fn scale(x: &Mat, c: &Rational) -> Mat {
    x.iter().map(|r| r.iter().map(|v| v * c).collect()).collect()
}

/// `F^{ab} = E^{ab} - θ_a θ_b E^{b̄ ā}`.
pub fn f_mat(n: usize, theta0: i64, a: usize, b: usize) -> Mat {
    let s = theta(n, theta0, a) * theta(n, theta0, b);
    add(&unit(n, a, b), &unit(n, bar(n, b), bar(n, a)), -s)
}

/// Matrix of a pure spin operator on `(C^n)^{⊗sites}`, rows and columns in
/// lexicographic state order, read off from its action on constant fields.
pub fn op_matrix(op: &Operator<Rational>) -> Mat {
    let shape = op.shape();
    let states = SpinState::all(shape.n, shape.sites);
    let mut m = vec![vec![Rational::from_int(0); states.len()]; states.len()];
    for (col, s) in states.iter().enumerate() {
        let field = SpinField::from_components(shape, [(*s, RatFunc::one())]);
        for (t, v) in op.act(&field).expect("shapes agree").components() {
            let row = states.binary_search(t).expect("state in range");
            m[row][col] = v.as_constant().expect("pure spin operator");
        }
    }
    m
}
