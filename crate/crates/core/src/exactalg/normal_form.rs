//! Hermite and Smith normal forms with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// Row Hermite normal form: returns `(H, U)` with `U` unimodular and `U·A = H`.
///
/// Pivots are positive, entries above each pivot lie in `[0, pivot)`, zero rows sit at the bottom.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero |entry| in column j at or below row r
            let mut best: Option<usize> = None;
            for i in r..m {
                if !h[(i, j)].is_zero()
                    && best.map_or(true, |b| h[(i, j)].abs() < h[(b, j)].abs())
                {
                    best = Some(i);
                }
            }
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = h[(i, j)].div_floor(&h[(r, j)]);
                let k = -q;
                h.add_row_multiple(i, r, &k);
                u.add_row_multiple(i, r, &k);
                if !h[(i, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, j)].is_zero() {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h[(i, j)].div_floor(&h[(r, j)]);
            if !q.is_zero() {
                let k = -q;
                h.add_row_multiple(i, r, &k);
                u.add_row_multiple(i, r, &k);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Smith normal form with transforms and their inverses.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries d_1 | d_2 | ... (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

/// Smith normal form: returns `(D, U, V)` with `U·A·V = D`, `d_i | d_{i+1}`, `d_i ≥ 0`.
pub fn snf(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let s = smith(a);
    (s.d, s.u, s.v)
}

/// Smallest-pivot elimination, tracking both transforms and their inverses.
pub fn smith(a: &IntMatrix) -> SmithForm {
    let m = a.rows();
    let n = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut ui = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut vi = IntMatrix::identity(n);

    // Row op R: row[dst] += k row[src]  => U <- R U, U^{-1} <- U^{-1} R^{-1} (col[src] -= k col[dst]).
    macro_rules! row_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            let k: BigInt = $k;
            d.add_row_multiple($dst, $src, &k);
            u.add_row_multiple($dst, $src, &k);
            ui.add_col_multiple($src, $dst, &(-&k));
        }};
    }
    macro_rules! col_add {
        ($dst:expr, $src:expr, $k:expr) => {{
            let k: BigInt = $k;
            d.add_col_multiple($dst, $src, &k);
            v.add_col_multiple($dst, $src, &k);
            vi.add_row_multiple($src, $dst, &(-&k));
        }};
    }
    macro_rules! row_swap {
        ($a:expr, $b:expr) => {{
            d.swap_rows($a, $b);
            u.swap_rows($a, $b);
            ui.swap_cols($a, $b);
        }};
    }
    macro_rules! col_swap {
        ($a:expr, $b:expr) => {{
            d.swap_cols($a, $b);
            v.swap_cols($a, $b);
            vi.swap_rows($a, $b);
        }};
    }

    let t_max = m.min(n);
    for t in 0..t_max {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, ui, v, vi);
            };
            row_swap!(t, pi);
            col_swap!(t, pj);
            let mut clean = true;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    row_add!(i, t, -q);
                    if !d[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    col_add!(j, t, -q);
                    if !d[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let mut bad_row = None;
            'outer: for i in t + 1..m {
                for j in t + 1..n {
                    if !d[(i, j)].is_multiple_of(&d[(t, t)]) {
                        bad_row = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad_row {
                Some(i) => row_add!(t, i, BigInt::one()),
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            ui.negate_col(t);
        }
    }
    finish(d, u, ui, v, vi)
}

fn finish(d: IntMatrix, u: IntMatrix, ui: IntMatrix, v: IntMatrix, vi: IntMatrix) -> SmithForm {
    SmithForm {
        d,
        u,
        u_inv: ui,
        v,
        v_inv: vi,
    }
}

/// Basis (as rows) of the integer kernel {x : A·x = 0}.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let n = a.cols();
    let (h, u) = hnf(&a.transpose());
    let zero_rows: Vec<usize> = (0..n).filter(|&i| h.row(i).iter().all(|x| x.is_zero())).collect();
    u.select_rows(&zero_rows)
}

/// Some integer solution of A·x = b, or `None` if there is none.
pub fn solve_integer_system(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let r = a.rows().min(a.cols());
    let mut w = vec![BigInt::zero(); a.cols()];
    for (i, rhs) in ub.iter().enumerate() {
        let di = if i < r { s.d[(i, i)].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !rhs.is_zero() {
                return None;
            }
        } else {
            let (q, rem) = rhs.div_mod_floor(&di);
            if !rem.is_zero() {
                return None;
            }
            w[i] = q;
        }
    }
    Some(s.v.mul_vec(&w))
}

/// Solves A·x ≡ b with row i taken modulo `moduli[i]` (0 meaning exact equality).
pub fn solve_congruences(a: &IntMatrix, moduli: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), moduli.len());
    let nz: Vec<usize> = (0..moduli.len()).filter(|&i| !moduli[i].is_zero()).collect();
    let mut slack = IntMatrix::zeros(a.rows(), nz.len());
    for (c, &i) in nz.iter().enumerate() {
        slack[(i, c)] = moduli[i].clone();
    }
    let full = a.hstack(&slack);
    let sol = solve_integer_system(&full, b)?;
    Some(sol[..a.cols()].to_vec())
}
