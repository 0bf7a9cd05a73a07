//! Dense linear algebra kernels: complex Schur decomposition, a
//! structure-exploiting Sylvester solver, right pseudoinverse of a
//! full-row-rank matrix, and a small LU helper used for Gram-matrix solves.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DenseMatrix};

// ---------------------------------------------------------------------------
// LU with partial pivoting (real, square)
// ---------------------------------------------------------------------------

pub(crate) struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

pub(crate) fn lu_factor(m: &DenseMatrix, pivot_tol: f64) -> Result<LuFactors> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "LU needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut piv = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best < pivot_tol {
            return Err(Error::SingularSystem(format!(
                "pivot {best:e} below threshold {pivot_tol:e} at step {k}"
            )));
        }
        if piv != k {
            perm.swap(k, piv);
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            for j in k + 1..n {
                lu[(i, j)] -= f * lu[(k, j)];
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    /// Solves `M X = B` column by column.
    pub(crate) fn solve_columns(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "rhs has {} rows, factorization expects {n}",
                b.rows()
            )));
        }
        let mut x = DenseMatrix::zeros(n, b.cols());
        let mut col = vec![0.0; n];
        for c in 0..b.cols() {
            for i in 0..n {
                col[i] = b[(self.perm[i], c)];
            }
            // forward substitution (unit lower)
            for i in 1..n {
                let mut s = col[i];
                for j in 0..i {
                    s -= self.lu[(i, j)] * col[j];
                }
                col[i] = s;
            }
            // back substitution
            for i in (0..n).rev() {
                let mut s = col[i];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * col[j];
                }
                col[i] = s / self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, c)] = col[i];
            }
        }
        Ok(x)
    }
}

// ---------------------------------------------------------------------------
// Right pseudoinverse
// ---------------------------------------------------------------------------

/// Moore-Penrose right inverse of a full-row-rank `r x n` matrix (`r <= n`):
/// `E^+ = E^T (E E^T)^{-1}`, computed by LU-solving against the Gram matrix
/// rather than forming an explicit inverse.
pub fn right_pseudoinverse(e: &DenseMatrix) -> Result<DenseMatrix> {
    let (r, n) = (e.rows(), e.cols());
    if r == 0 || r > n {
        return Err(Error::ShapeMismatch(format!(
            "right pseudoinverse needs 1 <= rows <= cols, got {r}x{n}"
        )));
    }
    let gram = e.matmul(&e.transpose())?;
    let tol = 1e-12 * gram.sup_norm().max(f64::MIN_POSITIVE);
    let lu = lu_factor(&gram, tol).map_err(|_| {
        Error::RankDeficient(format!("matrix of shape {r}x{n} is not of full row rank"))
    })?;
    // (E E^T) X = E  =>  E^+ = X^T
    Ok(lu.solve_columns(e)?.transpose())
}

// ---------------------------------------------------------------------------
// Complex Schur decomposition
// ---------------------------------------------------------------------------

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` (c real) such that
/// `G [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let r = (na * na + nb * nb).sqrt();
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    (na / r, (a / na) * (b.conj() / r))
}

fn apply_givens_rows(h: &mut ComplexMatrix, k: usize, c: f64, s: Complex64) {
    for j in 0..h.cols() {
        let x = h[(k, j)];
        let y = h[(k + 1, j)];
        h[(k, j)] = c * x + s * y;
        h[(k + 1, j)] = -s.conj() * x + c * y;
    }
}

/// Right-multiplies by the conjugate transpose of the rotation.
fn apply_givens_cols(h: &mut ComplexMatrix, k: usize, c: f64, s: Complex64) {
    for i in 0..h.rows() {
        let x = h[(i, k)];
        let y = h[(i, k + 1)];
        h[(i, k)] = c * x + s.conj() * y;
        h[(i, k + 1)] = -s * x + c * y;
    }
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary
/// similarity in `q`.
fn hessenberg(b: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = b.rows();
    let mut h = b.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm_x: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        let len = n - k - 1;
        // H <- P H
        for j in 0..n {
            let dot: Complex64 = (0..len).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            let f = beta * dot;
            for i in 0..len {
                h[(k + 1 + i, j)] -= f * v[i];
            }
        }
        // H <- H P
        for i in 0..n {
            let dot: Complex64 = (0..len).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            let f = beta * dot;
            for j in 0..len {
                h[(i, k + 1 + j)] -= f * v[j].conj();
            }
        }
        // Q <- Q P
        for i in 0..n {
            let dot: Complex64 = (0..len).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            let f = beta * dot;
            for j in 0..len {
                q[(i, k + 1 + j)] -= f * v[j].conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, h)
}

/// Eigenvalue of the trailing 2x2 block closest to the corner entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let mid = (a + d) * 0.5;
    let e = (a - d) * 0.5;
    let sq = (e * e + b * c).sqrt();
    let l1 = mid + sq;
    let l2 = mid - sq;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition `B = Q T Q^H` with `Q` unitary and `T` upper
/// triangular. Uses Householder Hessenberg reduction followed by single-shift
/// QR sweeps (Wilkinson shift, with an exceptional shift against stagnation);
/// errors out after `100 * n` sweeps.
pub fn schur_decompose(b: &DenseMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = b.rows();
    if b.cols() != n || n == 0 {
        return Err(Error::ShapeMismatch(format!(
            "Schur decomposition needs a nonempty square matrix, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let (mut q, mut h) = hessenberg(&b.to_complex());
    let eps = f64::EPSILON;
    let max_sweeps = 100 * n;
    let mut sweeps = 0usize;
    let mut stagnation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        // locate the start of the trailing unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            if sub <= eps * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm()) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stagnation = 0;
            continue;
        }
        sweeps += 1;
        stagnation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NonConvergence(format!(
                "QR iteration exceeded {max_sweeps} sweeps on a {n}x{n} matrix"
            )));
        }
        let sigma = if stagnation % 15 == 0 {
            h[(hi, hi)] + Complex64::new(1.5 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        for k in lo..=hi {
            h[(k, k)] -= sigma;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            apply_givens_rows(&mut h, k, c, s);
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            apply_givens_cols(&mut h, k, c, s);
            apply_givens_cols(&mut q, k, c, s);
        }
        for k in lo..=hi {
            h[(k, k)] += sigma;
        }
    }
    Ok((q, h))
}

// ---------------------------------------------------------------------------
// Sylvester equation A U + U B = C
// ---------------------------------------------------------------------------

/// The discrete-time operator `A` is lower triangular apart from a single
/// superdiagonal entry at (0, 1); the solver relies on that shape, so the
/// constructor enforces it.
#[derive(Debug, Clone)]
pub struct SylvesterSystem {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
}

impl SylvesterSystem {
    pub fn new(a: DenseMatrix, b: DenseMatrix, c: DenseMatrix) -> Result<Self> {
        let n = a.rows();
        let m = b.rows();
        if a.cols() != n || b.cols() != m {
            return Err(Error::ShapeMismatch(
                "A and B must both be square".into(),
            ));
        }
        if c.rows() != n || c.cols() != m {
            return Err(Error::ShapeMismatch(format!(
                "C must be {n}x{m}, got {}x{}",
                c.rows(),
                c.cols()
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if (i, j) != (0, 1) && a[(i, j)] != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "A must be lower triangular except for entry (0, 1); \
                         found {:e} at ({i}, {j})",
                        a[(i, j)]
                    )));
                }
            }
        }
        Ok(Self { a, b, c })
    }

    /// Sup-norm of `A U + U B - C`, scaled by `max(1, ||U||)`.
    pub fn residual(&self, u: &DenseMatrix) -> Result<f64> {
        let lhs = self.a.matmul(u)?.add(&u.matmul(&self.b)?)?;
        let raw = crate::matrix::inf_error(&lhs, &self.c)?;
        Ok(raw / u.sup_norm().max(1.0))
    }
}

/// Shifted solve `(A + lambda I) x = rhs` where `A` is lower triangular apart
/// from the (0, 1) entry: a 2x2 direct solve for the first two unknowns, then
/// forward substitution.
fn solve_shifted(
    a: &DenseMatrix,
    lambda: Complex64,
    rhs: &[Complex64],
    pivot_tol: f64,
) -> Result<Vec<Complex64>> {
    let n = a.rows();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    if n == 1 {
        let m00 = lambda + a[(0, 0)];
        if m00.norm() < pivot_tol {
            return Err(Error::SingularSystem(
                "shifted diagonal entry below pivot threshold".into(),
            ));
        }
        x[0] = rhs[0] / m00;
        return Ok(x);
    }
    let m00 = lambda + a[(0, 0)];
    let m01 = Complex64::new(a[(0, 1)], 0.0);
    let m10 = Complex64::new(a[(1, 0)], 0.0);
    let m11 = lambda + a[(1, 1)];
    let det = m00 * m11 - m01 * m10;
    let block_scale = m00.norm() + m01.norm() + m10.norm() + m11.norm();
    if det.norm() < pivot_tol * block_scale.max(1.0) {
        return Err(Error::SingularSystem(
            "leading 2x2 block of the shifted system is singular".into(),
        ));
    }
    x[0] = (rhs[0] * m11 - rhs[1] * m01) / det;
    x[1] = (rhs[1] * m00 - rhs[0] * m10) / det;
    for j in 2..n {
        let diag = lambda + a[(j, j)];
        if diag.norm() < pivot_tol {
            return Err(Error::SingularSystem(format!(
                "shifted diagonal entry {j} below pivot threshold"
            )));
        }
        let mut s = rhs[j];
        for l in 0..j {
            let alj = a[(j, l)];
            if alj != 0.0 {
                s -= alj * x[l];
            }
        }
        x[j] = s / diag;
    }
    Ok(x)
}

/// Solves `A U + U B = C` by Schur-factoring only `B` (`B = Q T Q^H`), then
/// back-substituting column by column in `A V + V T = C Q`; each column needs
/// one shifted solve against the structured `A`. The result is demoted to a
/// real matrix; a material imaginary residue is reported as an error.
pub fn solve_sylvester(sys: &SylvesterSystem) -> Result<DenseMatrix> {
    let n = sys.a.rows();
    let m = sys.b.rows();
    let (q, t) = schur_decompose(&sys.b)?;
    let c_tilde = sys.c.to_complex().matmul(&q)?;
    let pivot_tol = 1e-13 * sys.a.sup_norm().max(f64::MIN_POSITIVE);
    let mut v = ComplexMatrix::zeros(n, m);
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..m {
        for r in 0..n {
            rhs[r] = c_tilde[(r, k)];
        }
        for i in 0..k {
            let tik = t[(i, k)];
            if tik.norm() != 0.0 {
                for r in 0..n {
                    rhs[r] -= tik * v[(r, i)];
                }
            }
        }
        let col = solve_shifted(&sys.a, t[(k, k)], &rhs, pivot_tol)?;
        for r in 0..n {
            v[(r, k)] = col[r];
        }
    }
    v.matmul(&q.conj_transpose())?.demote_real(1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Random matrix with the Sylvester `A` structure: lower triangular plus
    /// the (0, 1) entry, with a dominant diagonal so shifted solves stay
    /// well conditioned.
    fn random_structured(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                a[(i, j)] = rng.gen_range(-1.0..1.0);
            }
            a[(i, i)] += 3.0;
        }
        if n > 1 {
            a[(0, 1)] = rng.gen_range(-1.0..1.0);
        }
        a
    }

    fn check_schur(b: &DenseMatrix) {
        let n = b.rows();
        let (q, t) = schur_decompose(b).unwrap();
        // T upper triangular
        for i in 0..n {
            for j in 0..i {
                assert_eq!(t[(i, j)].norm(), 0.0, "T not triangular at ({i},{j})");
            }
        }
        // Q unitary
        let qhq = q.conj_transpose().matmul(&q).unwrap();
        let id = ComplexMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                assert!((qhq[(i, j)] - id[(i, j)]).norm() < 1e-12, "QhQ at ({i},{j})");
            }
        }
        // reconstruction
        let rec = q.matmul(&t).unwrap().matmul(&q.conj_transpose()).unwrap();
        let bc = b.to_complex();
        let scale = b.sup_norm().max(1.0);
        for i in 0..n {
            for j in 0..n {
                assert!(
                    (rec[(i, j)] - bc[(i, j)]).norm() <= 1e-10 * scale,
                    "reconstruction at ({i},{j}): {:e}",
                    (rec[(i, j)] - bc[(i, j)]).norm()
                );
            }
        }
    }

    #[test]
    fn schur_of_diagonal_matrix() {
        let b = DenseMatrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        let (_, t) = schur_decompose(&b).unwrap();
        let mut eigs: Vec<f64> = (0..3).map(|i| t[(i, i)].re).collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eigs[0] + 1.0).abs() < 1e-13);
        assert!((eigs[1] - 0.5).abs() < 1e-13);
        assert!((eigs[2] - 3.0).abs() < 1e-13);
        check_schur(&b);
    }

    #[test]
    fn schur_finds_complex_pair() {
        // rotation generator: eigenvalues +/- i
        let b = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let (_, t) = schur_decompose(&b).unwrap();
        let e0 = t[(0, 0)];
        let e1 = t[(1, 1)];
        assert!(e0.re.abs() < 1e-13 && e1.re.abs() < 1e-13);
        assert!((e0.im.abs() - 1.0).abs() < 1e-13);
        assert!((e0 + e1).norm() < 1e-13);
        check_schur(&b);
    }

    #[test]
    fn schur_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 10, 16] {
            let b = random_matrix(&mut rng, n, n);
            check_schur(&b);
        }
    }

    #[test]
    fn sylvester_scalar_and_identity_cases() {
        // scalar: 2u + 3u = 10 => u = 2
        let sys = SylvesterSystem::new(
            DenseMatrix::from_rows(&[vec![2.0]]).unwrap(),
            DenseMatrix::from_rows(&[vec![3.0]]).unwrap(),
            DenseMatrix::from_rows(&[vec![10.0]]).unwrap(),
        )
        .unwrap();
        let u = solve_sylvester(&sys).unwrap();
        assert!((u[(0, 0)] - 2.0).abs() < 1e-14);

        // A = I_3, B = I_2: U + U = C => U = C / 2
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random_matrix(&mut rng, 3, 2);
        let sys = SylvesterSystem::new(
            DenseMatrix::identity(3),
            DenseMatrix::identity(2),
            c.clone(),
        )
        .unwrap();
        let u = solve_sylvester(&sys).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert!((u[(i, j)] - 0.5 * c[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sylvester_recovers_planted_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 30;
        let m = 6;
        let a = random_structured(&mut rng, n);
        let b = {
            let mut b = random_matrix(&mut rng, m, m);
            for i in 0..m {
                b[(i, i)] += 3.0; // keep spectra of A and -B disjoint
            }
            b
        };
        let u_true = random_matrix(&mut rng, n, m);
        let c = a.matmul(&u_true).unwrap().add(&u_true.matmul(&b).unwrap()).unwrap();
        let sys = SylvesterSystem::new(a, b, c).unwrap();
        let u = solve_sylvester(&sys).unwrap();
        let err = crate::matrix::inf_error(&u, &u_true).unwrap();
        assert!(err <= 1e-9 * u_true.sup_norm().max(1.0), "err = {err:e}");
        assert!(sys.residual(&u).unwrap() <= 1e-8);
    }

    /// Brute-force oracle: solve the Kronecker form
    /// `(A (x) I + I (x) B^T) vec_rows(U) = vec_rows(C)` by LU.
    fn kronecker_solve(a: &DenseMatrix, b: &DenseMatrix, c: &DenseMatrix) -> DenseMatrix {
        let n = a.rows();
        let m = b.rows();
        let dim = n * m;
        let mut big = DenseMatrix::zeros(dim, dim);
        for i in 0..n {
            for j in 0..m {
                let row = i * m + j;
                for k in 0..n {
                    big[(row, k * m + j)] += a[(i, k)];
                }
                for k in 0..m {
                    big[(row, i * m + k)] += b[(k, j)];
                }
            }
        }
        let rhs = DenseMatrix::from_fn(dim, 1, |r, _| c[(r / m, r % m)]);
        let tol = 1e-14 * big.sup_norm();
        let sol = lu_factor(&big, tol).unwrap().solve_columns(&rhs).unwrap();
        DenseMatrix::from_fn(n, m, |i, j| sol[(i * m + j, 0)])
    }

    #[test]
    fn sylvester_matches_kronecker_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (n, m) in [(2usize, 2usize), (5, 4), (12, 8), (25, 16)] {
            assert!(n * m <= 400);
            let a = random_structured(&mut rng, n);
            let mut b = random_matrix(&mut rng, m, m);
            for i in 0..m {
                b[(i, i)] += 3.0;
            }
            let c = random_matrix(&mut rng, n, m);
            let sys = SylvesterSystem::new(a.clone(), b.clone(), c.clone()).unwrap();
            let u = solve_sylvester(&sys).unwrap();
            let oracle = kronecker_solve(&a, &b, &c);
            let err = crate::matrix::inf_error(&u, &oracle).unwrap();
            let scale = oracle.sup_norm().max(1.0);
            assert!(err <= 1e-9 * scale, "n={n}, m={m}: err = {err:e}");
        }
    }

    #[test]
    fn sylvester_rejects_wrong_structure() {
        let mut a = DenseMatrix::identity(3);
        a[(0, 2)] = 1.0; // violates the allowed pattern
        let r = SylvesterSystem::new(a, DenseMatrix::identity(2), DenseMatrix::zeros(3, 2));
        assert!(r.is_err());
    }

    #[test]
    fn pseudoinverse_of_padded_identity() {
        // E = [I_2 | 0] => E^+ = [I_2; 0]
        let e = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let p = right_pseudoinverse(&e).unwrap();
        let expected =
            DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(crate::matrix::inf_error(&p, &expected).unwrap() < 1e-14);
    }

    #[test]
    fn pseudoinverse_satisfies_penrose_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e = random_matrix(&mut rng, 4, 9);
        let p = right_pseudoinverse(&e).unwrap();
        // E E^+ = I_r
        let ep = e.matmul(&p).unwrap();
        assert!(crate::matrix::inf_error(&ep, &DenseMatrix::identity(4)).unwrap() < 1e-12);
        // E^+ E E^+ = E^+
        let pep = p.matmul(&e).unwrap().matmul(&p).unwrap();
        assert!(crate::matrix::inf_error(&pep, &p).unwrap() < 1e-12);
        // E^+ E symmetric
        let pe = p.matmul(&e).unwrap();
        assert!(crate::matrix::inf_error(&pe, &pe.transpose()).unwrap() < 1e-12);
    }

    #[test]
    fn pseudoinverse_detects_rank_deficiency() {
        let e = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert!(matches!(
            right_pseudoinverse(&e),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn lu_solves_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_matrix(&mut rng, 8, 8);
        let x_true = random_matrix(&mut rng, 8, 3);
        let b = m.matmul(&x_true).unwrap();
        let lu = lu_factor(&m, 1e-14 * m.sup_norm()).unwrap();
        let x = lu.solve_columns(&b).unwrap();
        assert!(crate::matrix::inf_error(&x, &x_true).unwrap() < 1e-10);
    }
}
