//! Structure-constant algebras with one or two multiplications, identity
//! verification, the preset algebras (`gl(n)`, divided powers `O_n(m)`,
//! half-Witt `W_n(m)`) and left-structure computations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linalg::{self, Coeffs, SparseMatrix, SubspaceBasis};
use crate::scalars::{binomial_in_field, FieldSpec, Scalar};
use crate::{Error, Result};

/// Sparse element representation used in the basis-triple loops.
pub type SVec = Vec<(usize, Scalar)>;

fn svec_from_map(m: BTreeMap<usize, Scalar>) -> SVec {
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

pub fn svec_to_dense(field: FieldSpec, dim: usize, v: &SVec) -> Coeffs {
    let mut out = linalg::zero_vec(field, dim);
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

/// Which of the algebra's products to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Product {
    Circ,
    Ast,
}

/// Bookkeeping for divided-power monomials x^(alpha), 0 <= alpha_i < p^{m_i},
/// ranked row-major so that ranks are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DividedPowers {
    pub p: u64,
    pub m: Vec<u32>,
    sizes: Vec<u64>,
    strides: Vec<u64>,
    pub dim: usize,
}

impl DividedPowers {
    pub fn new(p: u64, m: &[u32]) -> Result<DividedPowers> {
        FieldSpec::prime_field(p)?;
        if m.is_empty() || m.iter().any(|&mi| mi == 0) {
            return Err(Error::InvalidParams("heights m_i must be >= 1".into()));
        }
        let mut sizes = Vec::with_capacity(m.len());
        let mut dim: u64 = 1;
        for &mi in m {
            let s = p
                .checked_pow(mi)
                .ok_or_else(|| Error::InvalidParams("p^m overflows".into()))?;
            dim = dim
                .checked_mul(s)
                .filter(|&d| d <= 1_000_000)
                .ok_or_else(|| Error::InvalidParams("divided power dimension too large".into()))?;
            sizes.push(s);
        }
        let mut strides = vec![1u64; m.len()];
        for i in (0..m.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Ok(DividedPowers { p, m: m.to_vec(), sizes, strides, dim: dim as usize })
    }

    pub fn n_vars(&self) -> usize {
        self.m.len()
    }

    pub fn rank(&self, alpha: &[u64]) -> usize {
        alpha.iter().zip(&self.strides).map(|(a, s)| a * s).sum::<u64>() as usize
    }

    pub fn unrank(&self, mut r: usize) -> Vec<u64> {
        let mut alpha = Vec::with_capacity(self.sizes.len());
        for s in &self.strides {
            alpha.push(r as u64 / s);
            r %= *s as usize;
        }
        alpha
    }

    /// x^(alpha) * x^(beta) = prod_i C(alpha_i+beta_i, alpha_i) x^(alpha+beta),
    /// zero when any exponent leaves the truncation range.
    pub fn mul(&self, alpha: &[u64], beta: &[u64]) -> Option<(Vec<u64>, Scalar)> {
        let field = FieldSpec::PrimeField(self.p);
        let mut gamma = Vec::with_capacity(alpha.len());
        let mut coef = field.one();
        for i in 0..alpha.len() {
            let s = alpha[i] + beta[i];
            if s >= self.sizes[i] {
                return None;
            }
            gamma.push(s);
            coef = &coef * &binomial_in_field(s, alpha[i] as i64, field);
            if coef.is_zero() {
                return None;
            }
        }
        Some((gamma, coef))
    }

    /// d_i x^(alpha) = x^(alpha - e_i), or zero.
    pub fn derive(&self, alpha: &[u64], axis: usize) -> Option<Vec<u64>> {
        if alpha[axis] == 0 {
            return None;
        }
        let mut beta = alpha.to_vec();
        beta[axis] -= 1;
        Some(beta)
    }

    pub fn monomial_name(&self, alpha: &[u64]) -> String {
        let exps: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
        format!("x({})", exps.join(","))
    }
}

/// Preset-specific structure retained for module constructions and cocycle
/// families; lost when an algebra is loaded from plain JSON.
#[derive(Debug, Clone)]
pub enum PresetInfo {
    Gl { n: usize },
    DividedPower { dp: DividedPowers },
    Witt { n: usize, dp: DividedPowers },
}

/// A finite-dimensional algebra given by sparse structure constants for the
/// product `circ` (and optionally a second product `ast`).
#[derive(Debug, Clone)]
pub struct Algebra {
    pub field: FieldSpec,
    pub dim: usize,
    pub basis_names: Vec<String>,
    circ: Vec<Vec<SVec>>,
    ast: Option<Vec<Vec<SVec>>>,
    pub grading: Option<Vec<i64>>,
    pub preset: Option<PresetInfo>,
    pub name: String,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.dim == other.dim
            && self.circ == other.circ
            && self.ast == other.ast
            && self.grading == other.grading
    }
}

impl Algebra {
    /// Raw constructor; validates scalar fields and the grading invariant
    /// deg(e_i o e_j) = deg(e_i) + deg(e_j) on every nonzero component.
    pub fn from_table(
        field: FieldSpec,
        basis_names: Vec<String>,
        circ: Vec<Vec<SVec>>,
        ast: Option<Vec<Vec<SVec>>>,
        grading: Option<Vec<i64>>,
        name: String,
    ) -> Result<Algebra> {
        let dim = basis_names.len();
        let check_table = |table: &Vec<Vec<SVec>>| -> Result<()> {
            if table.len() != dim || table.iter().any(|row| row.len() != dim) {
                return Err(Error::InvalidParams("structure constant table shape".into()));
            }
            for row in table {
                for entry in row {
                    for (k, c) in entry {
                        if *k >= dim {
                            return Err(Error::InvalidParams("structure constant index".into()));
                        }
                        if c.field() != field {
                            return Err(Error::FieldMismatch(
                                field.to_string(),
                                c.field().to_string(),
                            ));
                        }
                    }
                }
            }
            Ok(())
        };
        check_table(&circ)?;
        if let Some(t) = &ast {
            check_table(t)?;
        }
        if let Some(g) = &grading {
            if g.len() != dim {
                return Err(Error::InvalidParams("grading length".into()));
            }
            for table in std::iter::once(&circ).chain(ast.iter()) {
                for i in 0..dim {
                    for j in 0..dim {
                        for (k, c) in &table[i][j] {
                            if !c.is_zero() && g[*k] != g[i] + g[j] {
                                return Err(Error::InvalidParams(format!(
                                    "grading violated at e{i} * e{j} -> e{k}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(Algebra { field, dim, basis_names, circ, ast, grading, preset: None, name })
    }

    pub fn has_ast(&self) -> bool {
        self.ast.is_some()
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis_names.iter().position(|n| n == name)
    }

    /// Structure constants of e_i o e_j (sparse).
    pub fn circ_basis(&self, i: usize, j: usize) -> &SVec {
        &self.circ[i][j]
    }

    pub fn ast_basis(&self, i: usize, j: usize) -> Result<&SVec> {
        self.ast.as_ref().map(|t| &t[i][j]).ok_or(Error::NoSecondProduct)
    }

    fn table(&self, which: Product) -> Result<&Vec<Vec<SVec>>> {
        match which {
            Product::Circ => Ok(&self.circ),
            Product::Ast => self.ast.as_ref().ok_or(Error::NoSecondProduct),
        }
    }

    /// Bilinear extension of the structure constants to dense elements.
    pub fn multiply(&self, x: &[Scalar], y: &[Scalar], which: Product) -> Result<Coeffs> {
        let table = self.table(which)?;
        let mut out = linalg::zero_vec(self.field, self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, v) in &table[i][j] {
                    out[*k] = &out[*k] + &(&c * v);
                }
            }
        }
        Ok(out)
    }

    /// Sparse product used by the identity checkers.
    pub fn mul_sparse(&self, x: &SVec, y: &SVec, which: Product) -> SVec {
        let table = self.table(which).expect("product availability checked by caller");
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (i, xi) in x {
            for (j, yj) in y {
                let c = xi * yj;
                for (k, v) in &table[*i][*j] {
                    let cur = acc.remove(k).unwrap_or_else(|| self.field.zero());
                    let next = &cur + &(&c * v);
                    if !next.is_zero() {
                        acc.insert(*k, next);
                    }
                }
            }
        }
        svec_from_map(acc)
    }

    pub fn circ_dense(&self, x: &[Scalar], y: &[Scalar]) -> Coeffs {
        self.multiply(x, y, Product::Circ).expect("circ always present")
    }

    /// [x, y] = x o y - y o x
    pub fn commutator(&self, x: &[Scalar], y: &[Scalar]) -> Coeffs {
        let mut out = self.circ_dense(x, y);
        linalg::sub_assign(&mut out, &self.circ_dense(y, x));
        out
    }

    pub fn commutator_basis(&self, i: usize, j: usize) -> SVec {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (k, v) in &self.circ[i][j] {
            acc.insert(*k, v.clone());
        }
        for (k, v) in &self.circ[j][i] {
            let cur = acc.remove(k).unwrap_or_else(|| self.field.zero());
            let next = &cur - v;
            if !next.is_zero() {
                acc.insert(*k, next);
            }
        }
        svec_from_map(acc)
    }

    /// (x, y, z) = x o (y o z) - (x o y) o z
    pub fn associator(&self, x: &[Scalar], y: &[Scalar], z: &[Scalar]) -> Coeffs {
        let mut out = self.circ_dense(x, &self.circ_dense(y, z));
        linalg::sub_assign(&mut out, &self.circ_dense(&self.circ_dense(x, y), z));
        out
    }

    fn associator_sparse(&self, x: &SVec, y: &SVec, z: &SVec) -> SVec {
        let a = self.mul_sparse(x, &self.mul_sparse(y, z, Product::Circ), Product::Circ);
        let b = self.mul_sparse(&self.mul_sparse(x, y, Product::Circ), z, Product::Circ);
        sub_svec(self.field, &a, &b)
    }

    /// Evaluates every applicable identity on all basis triples.
    pub fn check_identities(&self) -> IdentityReport {
        let unit = |i: usize| vec![(i, self.field.one())];
        let mut report = IdentityReport::default();

        let mut run = |name: &str, f: &dyn Fn(&SVec, &SVec, &SVec) -> SVec| {
            let mut check = IdentityCheck { holds: true, witness: None };
            'outer: for a in 0..self.dim {
                for b in 0..self.dim {
                    for c in 0..self.dim {
                        let defect = f(&unit(a), &unit(b), &unit(c));
                        if !defect.is_empty() {
                            check.holds = false;
                            check.witness = Some(Witness {
                                triple: (a, b, c),
                                defect: svec_to_dense(self.field, self.dim, &defect),
                            });
                            break 'outer;
                        }
                    }
                }
            }
            report.entries.insert(name.to_string(), check);
        };

        run("associative", &|a, b, c| self.associator_sparse(a, b, c));
        run("right_symmetric", &|a, b, c| {
            sub_svec(self.field, &self.associator_sparse(a, b, c), &self.associator_sparse(a, c, b))
        });
        run("novikov", &|a, b, c| {
            // a o (b o c) = b o (a o c)
            let lhs = self.mul_sparse(a, &self.mul_sparse(b, c, Product::Circ), Product::Circ);
            let rhs = self.mul_sparse(b, &self.mul_sparse(a, c, Product::Circ), Product::Circ);
            sub_svec(self.field, &lhs, &rhs)
        });
        run("jacobi", &|a, b, c| {
            let br = |x: &SVec, y: &SVec| {
                sub_svec(
                    self.field,
                    &self.mul_sparse(x, y, Product::Circ),
                    &self.mul_sparse(y, x, Product::Circ),
                )
            };
            let mut acc = br(&br(a, b), c);
            acc = add_svec(self.field, &acc, &br(&br(b, c), a));
            add_svec(self.field, &acc, &br(&br(c, a), b))
        });

        if self.has_ast() {
            let ast = |x: &SVec, y: &SVec| self.mul_sparse(x, y, Product::Ast);
            let circ = |x: &SVec, y: &SVec| self.mul_sparse(x, y, Product::Circ);
            run("ast_novikov", &|a, b, c| {
                // a * (b * c) - b * (a * c) = 0
                sub_svec(self.field, &ast(a, &ast(b, c)), &ast(b, &ast(a, c)))
            });
            run("circ_ast_compat", &|a, b, c| {
                // a o (b * c) - b * (a o c) = 0
                sub_svec(self.field, &circ(a, &ast(b, c)), &ast(b, &circ(a, c)))
            });
            run("ast_commutator", &|a, b, c| {
                // (a*b - b*a - a o b + b o a) * c = 0
                let mut inner = sub_svec(self.field, &ast(a, b), &ast(b, a));
                inner = sub_svec(self.field, &inner, &circ(a, b));
                inner = add_svec(self.field, &inner, &circ(b, a));
                ast(&inner, c)
            });
            run("mixed_compat", &|a, b, c| {
                // (a o b - b o a)*c + a*(c o b) - (a*c) o b - b*(c o a) + (b*c) o a = 0
                let comm = sub_svec(self.field, &circ(a, b), &circ(b, a));
                let mut acc = ast(&comm, c);
                acc = add_svec(self.field, &acc, &ast(a, &circ(c, b)));
                acc = sub_svec(self.field, &acc, &circ(&ast(a, c), b));
                acc = sub_svec(self.field, &acc, &ast(b, &circ(c, a)));
                add_svec(self.field, &acc, &circ(&ast(b, c), a))
            });
        }
        report
    }

    pub fn is_right_symmetric(&self) -> bool {
        self.check_identities().entries["right_symmetric"].holds
    }

    pub fn is_novikov(&self) -> bool {
        let r = self.check_identities();
        r.entries["right_symmetric"].holds && r.entries["novikov"].holds
    }

    /// Left center Z_l = {z : z o a = 0}, left units Q_l = {e : e o a = a}
    /// (an affine set) and the left-associative invariants
    /// A^{l.ass} = {m : (m,a,b) = 0}.
    pub fn left_structure(&self) -> LeftStructure {
        let n = self.dim;
        // rows (j, k): sum_i z_i c[i][j]_k
        let mut m = SparseMatrix::zero(self.field, n * n, n);
        for i in 0..n {
            for j in 0..n {
                for (k, c) in &self.circ[i][j] {
                    m.add_to(j * n + k, i, c);
                }
            }
        }
        let (_, z_l) = m.rank_nullspace();

        let mut rhs = linalg::zero_vec(self.field, n * n);
        for j in 0..n {
            rhs[j * n + j] = self.field.one();
        }
        let q_l = match m.solve(&rhs).expect("shape is consistent") {
            Some((point, directions)) => AffineSubspace { point: Some(point), directions },
            None => AffineSubspace {
                point: None,
                directions: SubspaceBasis::empty(self.field, n),
            },
        };

        let l_ass = self.left_associative_invariants();
        LeftStructure { z_l, q_l, l_ass }
    }

    fn left_associative_invariants(&self) -> SubspaceBasis {
        let n = self.dim;
        let unit = |i: usize| vec![(i, self.field.one())];
        // rows (a, b, k): coefficient of m_i in (e_i, e_a, e_b)_k
        let mut m = SparseMatrix::zero(self.field, n * n * n, n);
        for i in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let defect = self.associator_sparse(&unit(i), &unit(a), &unit(b));
                    for (k, c) in &defect {
                        m.add_to((a * n + b) * n + k, i, c);
                    }
                }
            }
        }
        let (_, basis) = m.rank_nullspace();
        basis
    }

    // ------------------------------------------------------------------
    // Presets
    // ------------------------------------------------------------------

    /// Matrix units over the given field; associative, hence right-symmetric.
    pub fn gl(n: usize, field: FieldSpec) -> Result<Arc<Algebra>> {
        if n == 0 {
            return Err(Error::InvalidParams("gl(n) needs n >= 1".into()));
        }
        let dim = n * n;
        let idx = |r: usize, c: usize| r * n + c;
        let names = (0..n)
            .flat_map(|r| (0..n).map(move |c| format!("E{}{}", r + 1, c + 1)))
            .collect();
        let mut circ = vec![vec![SVec::new(); dim]; dim];
        for r1 in 0..n {
            for c1 in 0..n {
                for r2 in 0..n {
                    for c2 in 0..n {
                        if c1 == r2 {
                            circ[idx(r1, c1)][idx(r2, c2)] = vec![(idx(r1, c2), field.one())];
                        }
                    }
                }
            }
        }
        let mut a = Algebra::from_table(field, names, circ, None, None, format!("gl{n}"))?;
        a.preset = Some(PresetInfo::Gl { n });
        Ok(Arc::new(a))
    }

    /// Divided-power commutative algebra O_n(m) in characteristic p.
    pub fn divided_power(n: usize, m: &[u32], p: u64) -> Result<Arc<Algebra>> {
        if m.len() != n || n == 0 {
            return Err(Error::InvalidParams("O_n(m) needs n >= 1 heights".into()));
        }
        let dp = DividedPowers::new(p, m)?;
        let field = FieldSpec::PrimeField(p);
        let dim = dp.dim;
        let names = (0..dim).map(|r| dp.monomial_name(&dp.unrank(r))).collect();
        let mut circ = vec![vec![SVec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                if let Some((gamma, c)) = dp.mul(&dp.unrank(i), &dp.unrank(j)) {
                    circ[i][j] = vec![(dp.rank(&gamma), c)];
                }
            }
        }
        let grading = (0..dim).map(|r| dp.unrank(r).iter().sum::<u64>() as i64).collect();
        let mut a = Algebra::from_table(
            field,
            names,
            circ,
            None,
            Some(grading),
            format!("O{n}({})", join_heights(m)),
        )?;
        a.preset = Some(PresetInfo::DividedPower { dp });
        Ok(Arc::new(a))
    }

    /// Half-Witt algebra W_n(m): basis x^(alpha) d_i with
    /// u d_i o v d_j = v d_j(u) d_i and u d_i * v d_j = d_i(u) v d_j,
    /// graded by |alpha| - 1.
    pub fn witt(n: usize, m: &[u32], p: u64) -> Result<Arc<Algebra>> {
        if m.len() != n || n == 0 {
            return Err(Error::InvalidParams("W_n(m) needs n >= 1 heights".into()));
        }
        let dp = DividedPowers::new(p, m)?;
        let field = FieldSpec::PrimeField(p);
        let udim = dp.dim;
        let dim = udim * n;
        let idx = |r: usize, i: usize| r * n + i;
        let names = (0..udim)
            .flat_map(|r| {
                let nm = dp.monomial_name(&dp.unrank(r));
                (0..n).map(move |i| format!("{}d{}", nm, i + 1))
            })
            .collect();
        let mut circ = vec![vec![SVec::new(); dim]; dim];
        let mut ast = vec![vec![SVec::new(); dim]; dim];
        for ra in 0..udim {
            let alpha = dp.unrank(ra);
            for i in 0..n {
                for rb in 0..udim {
                    let beta = dp.unrank(rb);
                    for j in 0..n {
                        // circ: x^(beta) * d_j(x^(alpha)) in slot d_i
                        if let Some(da) = dp.derive(&alpha, j) {
                            if let Some((gamma, c)) = dp.mul(&beta, &da) {
                                circ[idx(ra, i)][idx(rb, j)] = vec![(idx(dp.rank(&gamma), i), c)];
                            }
                        }
                        // ast: d_i(x^(alpha)) * x^(beta) in slot d_j
                        if let Some(da) = dp.derive(&alpha, i) {
                            if let Some((gamma, c)) = dp.mul(&da, &beta) {
                                ast[idx(ra, i)][idx(rb, j)] = vec![(idx(dp.rank(&gamma), j), c)];
                            }
                        }
                    }
                }
            }
        }
        let grading = (0..dim)
            .map(|t| dp.unrank(t / n).iter().sum::<u64>() as i64 - 1)
            .collect();
        let mut a = Algebra::from_table(
            field,
            names,
            circ,
            Some(ast),
            Some(grading),
            format!("W{n}({})", join_heights(m)),
        )?;
        a.preset = Some(PresetInfo::Witt { n, dp });
        Ok(Arc::new(a))
    }

    /// W_1(m) with the customary basis labels e_{-1}, ..., e_{p^m - 2},
    /// where e_i = x^(i+1) d.
    pub fn w1m(p: u64, m: u32) -> Result<Arc<Algebra>> {
        let base = Algebra::witt(1, &[m], p)?;
        let mut a = (*base).clone();
        a.basis_names = (0..a.dim).map(|t| format!("e{}", t as i64 - 1)).collect();
        a.name = format!("W1({m},p={p})");
        Ok(Arc::new(a))
    }
}

fn join_heights(m: &[u32]) -> String {
    m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn add_svec(field: FieldSpec, a: &SVec, b: &SVec) -> SVec {
    let mut acc: BTreeMap<usize, Scalar> = a.iter().cloned().collect();
    for (k, v) in b {
        let cur = acc.remove(k).unwrap_or_else(|| field.zero());
        let next = &cur + v;
        if !next.is_zero() {
            acc.insert(*k, next);
        }
    }
    svec_from_map(acc)
}

fn sub_svec(field: FieldSpec, a: &SVec, b: &SVec) -> SVec {
    let mut acc: BTreeMap<usize, Scalar> = a.iter().cloned().collect();
    for (k, v) in b {
        let cur = acc.remove(k).unwrap_or_else(|| field.zero());
        let next = &cur - v;
        if !next.is_zero() {
            acc.insert(*k, next);
        }
    }
    svec_from_map(acc)
}

/// Verdict for one identity: a witness triple with its nonzero defect is
/// recorded exactly when the identity fails.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub triple: (usize, usize, usize),
    pub defect: Coeffs,
}

#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub entries: BTreeMap<String, IdentityCheck>,
}

impl IdentityReport {
    pub fn holds(&self, name: &str) -> bool {
        self.entries.get(name).map(|c| c.holds).unwrap_or(false)
    }
}

/// An affine solution set: `point + span(directions)`, or empty.
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    pub point: Option<Coeffs>,
    pub directions: SubspaceBasis,
}

#[derive(Debug, Clone)]
pub struct LeftStructure {
    pub z_l: SubspaceBasis,
    pub q_l: AffineSubspace,
    pub l_ass: SubspaceBasis,
}
