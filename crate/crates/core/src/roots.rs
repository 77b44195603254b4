//! Real roots of low-degree polynomials via companion-matrix eigenvalues.
//!
//! The companion matrix is already upper Hessenberg, so after balancing it
//! goes straight into a Francis double-shift QR iteration.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Coefficients are stored lowest degree first: `c[0] + c[1] x + …`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Drops leading coefficients below `rel_tol · max|c|`.
    pub fn trimmed(&self, rel_tol: f64) -> Poly {
        let scale = self.0.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut c = self.0.clone();
        while let Some(&last) = c.last() {
            if last.abs() <= rel_tol * scale || last == 0.0 {
                c.pop();
            } else {
                break;
            }
        }
        Poly(c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }
}

/// Complex roots `(re, im)` from the eigenvalues of the companion matrix.
pub fn companion_roots(p: &Poly) -> Result<Vec<(f64, f64)>> {
    let p = p.trimmed(0.0);
    let n = match p.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(n) => n,
    };
    let lead = p.0[n];
    if n == 1 {
        return Ok(vec![(-p.0[0] / lead, 0.0)]);
    }
    if n == 2 {
        return Ok(quadratic_roots(p.0[2], p.0[1], p.0[0]));
    }
    // 1-based storage keeps the iteration below close to its textbook form.
    let mut a = vec![vec![0.0; n + 1]; n + 1];
    for i in 2..=n {
        a[i][i - 1] = 1.0;
    }
    for i in 1..=n {
        a[i][n] = -p.0[i - 1] / lead;
    }
    balance(&mut a, n);
    hessenberg_eigenvalues(&mut a, n)
}

const MAX_QR_ITERATIONS: usize = 60;

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of the upper Hessenberg matrix `a[1..=n][1..=n]`, which is
/// destroyed.
fn hessenberg_eigenvalues(a: &mut [Vec<f64>], n: usize) -> Result<Vec<(f64, f64)>> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            // Look for a negligible subdiagonal element.
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nn - 1][nn - 1];
            let mut w = a[nn][nn - 1] * a[nn - 1][nn];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = if z != 0.0 { x - w / z } else { x + z };
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == MAX_QR_ITERATIONS {
                return Err(Error::NoConvergence {
                    iterations: its,
                    gap: a[nn][nn - 1].abs(),
                });
            }
            if its % 10 == 0 && its > 0 {
                // Exceptional shift.
                t += x;
                for i in 1..=nn {
                    a[i][i] -= x;
                }
                let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Find two consecutive small subdiagonal elements.
            let mut m = nn - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }

            // Double QR step on rows l..nn and columns m..nn.
            let mut k = m;
            while k < nn {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nn - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nn - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * a[i][k] + y * a[i][k + 1];
                        if k != nn - 1 {
                            pp += z * a[i][k + 2];
                            a[i][k + 2] -= pp * r;
                        }
                        a[i][k + 1] -= pp * q;
                        a[i][k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// Stable quadratic formula for `a x² + b x + c`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return vec![(0.0, 0.0), (0.0, 0.0)];
        }
        vec![(q / a, 0.0), (c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a);
        vec![(re, im), (re, -im)]
    }
}

/// Parlett–Reinsch diagonal balancing of `a[1..=n][1..=n]` (powers of two,
/// so exact).
fn balance(a: &mut [Vec<f64>], n: usize) {
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 1..=n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 1..=n {
                    a[i][j] /= f;
                }
                for row in a.iter_mut().skip(1) {
                    row[i] *= f;
                }
            }
        }
    }
}
