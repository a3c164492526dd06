//! Right-symmetric modules and comodules as explicit action tensors, the
//! axiom checkers, and the paper's module constructions.
//!
//! Actions are stored extensionally (one sparse matrix per algebra basis
//! element); every constructor materializes its defining formula once and
//! self-checks the axioms of its advertised kind.

use std::sync::Arc;

use crate::algebra::{Algebra, IdentityCheck, IdentityReport, PresetInfo, Witness};
use crate::linalg::{self, Coeffs, LinearMap, SparseMatrix, SubspaceBasis};
use crate::scalars::Scalar;
use crate::{Error, Result};

/// Module (MAA/AAM axioms) or comodule (the transposed pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Module,
    Comodule,
}

/// A right-symmetric module or comodule: `right[a]` is the matrix of
/// `m -> m o e_a`, `left[a]` of `m -> e_a o m`.
#[derive(Debug, Clone)]
pub struct RsModule {
    pub algebra: Arc<Algebra>,
    pub kind: ActionKind,
    pub dim: usize,
    pub right: Vec<LinearMap>,
    pub left: Vec<LinearMap>,
    pub name: String,
}

impl PartialEq for RsModule {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.dim == other.dim
            && *self.algebra == *other.algebra
            && self.right == other.right
            && self.left == other.left
    }
}

impl RsModule {
    pub fn new(
        algebra: Arc<Algebra>,
        kind: ActionKind,
        dim: usize,
        right: Vec<LinearMap>,
        left: Vec<LinearMap>,
        name: String,
    ) -> Result<RsModule> {
        if right.len() != algebra.dim || left.len() != algebra.dim {
            return Err(Error::DimensionMismatch { expected: algebra.dim, got: right.len() });
        }
        for m in right.iter().chain(&left) {
            if m.dim_in != dim || m.dim_out != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m.dim_in });
            }
        }
        Ok(RsModule { algebra, kind, dim, right, left, name })
    }

    /// m o e_a
    pub fn right_basis(&self, m: &[Scalar], a: usize) -> Coeffs {
        self.right[a].apply(m)
    }

    /// e_a o m
    pub fn left_basis(&self, m: &[Scalar], a: usize) -> Coeffs {
        self.left[a].apply(m)
    }

    /// m o x for a general algebra element x.
    pub fn right_act(&self, m: &[Scalar], x: &[Scalar]) -> Coeffs {
        let mut out = linalg::zero_vec(self.algebra.field, self.dim);
        for (a, c) in x.iter().enumerate() {
            self.right[a].apply_into(m, c, &mut out);
        }
        out
    }

    /// x o m for a general algebra element x.
    pub fn left_act(&self, m: &[Scalar], x: &[Scalar]) -> Coeffs {
        let mut out = linalg::zero_vec(self.algebra.field, self.dim);
        for (a, c) in x.iter().enumerate() {
            self.left[a].apply_into(m, c, &mut out);
        }
        out
    }

    /// Right action of an algebra element as a matrix.
    pub fn right_map(&self, x: &[Scalar]) -> LinearMap {
        let mut acc = LinearMap::zero(self.algebra.field, self.dim, self.dim);
        for (a, c) in x.iter().enumerate() {
            if !c.is_zero() {
                for j in 0..self.dim {
                    for (&i, v) in self.right[a].column(j) {
                        acc.add_to(i, j, &(c * v));
                    }
                }
            }
        }
        acc
    }

    pub fn left_map(&self, x: &[Scalar]) -> LinearMap {
        let mut acc = LinearMap::zero(self.algebra.field, self.dim, self.dim);
        for (a, c) in x.iter().enumerate() {
            if !c.is_zero() {
                for j in 0..self.dim {
                    for (&i, v) in self.left[a].column(j) {
                        acc.add_to(i, j, &(c * v));
                    }
                }
            }
        }
        acc
    }

    /// Per-axiom verdict with witnesses. Checks the defining axioms of the
    /// advertised kind plus the `special`, `antisymmetric` and `central`
    /// flags.
    pub fn check_actions(&self) -> IdentityReport {
        let field = self.algebra.field;
        let n = self.algebra.dim;
        let mut report = IdentityReport::default();

        let mut run_pairs = |name: &str, f: &dyn Fn(usize, usize) -> LinearMap| {
            let mut check = IdentityCheck { holds: true, witness: None };
            'outer: for a in 0..n {
                for b in 0..n {
                    let defect = f(a, b);
                    for m in 0..self.dim {
                        if !defect.column(m).is_empty() {
                            check.holds = false;
                            check.witness = Some(Witness {
                                triple: (a, b, m),
                                defect: defect.column_dense(m),
                            });
                            break 'outer;
                        }
                    }
                }
            }
            report.entries.insert(name.to_string(), check);
        };

        let unit = |i: usize| linalg::unit_vec(field, n, i);
        match self.kind {
            ActionKind::Module => {
                // (MAA): m o [a,b] - (m o a) o b + (m o b) o a = 0
                run_pairs("module_maa", &|a, b| {
                    let comm = self.algebra.commutator(&unit(a), &unit(b));
                    self.right_map(&comm)
                        .sub(&self.right[b].compose(&self.right[a]))
                        .add(&self.right[a].compose(&self.right[b]))
                });
                // (AAM): (a o m) o b - a o (m o b) - (a o b) o m + a o (b o m) = 0
                run_pairs("module_aam", &|a, b| {
                    let ab = self.algebra.circ_dense(&unit(a), &unit(b));
                    self.right[b]
                        .compose(&self.left[a])
                        .sub(&self.left[a].compose(&self.right[b]))
                        .sub(&self.left_map(&ab))
                        .add(&self.left[a].compose(&self.left[b]))
                });
                // special: m o (a o b) - (m o a) o b = 0
                run_pairs("special", &|a, b| {
                    let ab = self.algebra.circ_dense(&unit(a), &unit(b));
                    self.right_map(&ab).sub(&self.right[b].compose(&self.right[a]))
                });
            }
            ActionKind::Comodule => {
                // [a,b] o m - a o (b o m) + b o (a o m) = 0
                run_pairs("comodule_lie", &|a, b| {
                    let comm = self.algebra.commutator(&unit(a), &unit(b));
                    self.left_map(&comm)
                        .sub(&self.left[a].compose(&self.left[b]))
                        .add(&self.left[b].compose(&self.left[a]))
                });
                // -b o (m o a) + (b o m) o a - m o (a o b) + (m o a) o b = 0
                run_pairs("comodule_mixed", &|a, b| {
                    let ab = self.algebra.circ_dense(&unit(a), &unit(b));
                    self.right[a]
                        .compose(&self.left[b])
                        .sub(&self.left[b].compose(&self.right[a]))
                        .sub(&self.right_map(&ab))
                        .add(&self.right[b].compose(&self.right[a]))
                });
                // special: (a o b) o m - a o (b o m) = 0
                run_pairs("special", &|a, b| {
                    let ab = self.algebra.circ_dense(&unit(a), &unit(b));
                    self.left_map(&ab).sub(&self.left[a].compose(&self.left[b]))
                });
            }
        }

        // antisymmetric: the secondary action vanishes
        let secondary = match self.kind {
            ActionKind::Module => &self.left,
            ActionKind::Comodule => &self.right,
        };
        let mut anti = IdentityCheck { holds: true, witness: None };
        'anti: for (a, map) in secondary.iter().enumerate() {
            for m in 0..self.dim {
                if !map.column(m).is_empty() {
                    anti.holds = false;
                    anti.witness =
                        Some(Witness { triple: (a, a, m), defect: map.column_dense(m) });
                    break 'anti;
                }
            }
        }
        report.entries.insert("antisymmetric".to_string(), anti);

        // central: the left center acts by zero
        let z_l = self.algebra.left_structure().z_l;
        let mut central = IdentityCheck { holds: true, witness: None };
        'central: for z in z_l.vectors() {
            let map = self.left_map(z);
            for m in 0..self.dim {
                if !map.column(m).is_empty() {
                    central.holds = false;
                    central.witness =
                        Some(Witness { triple: (0, 0, m), defect: map.column_dense(m) });
                    break 'central;
                }
            }
        }
        report.entries.insert("central".to_string(), central);
        report
    }

    /// Errors with AxiomViolation unless the defining axioms of the kind hold.
    fn validated(self) -> Result<RsModule> {
        let report = self.check_actions();
        let axioms: &[&str] = match self.kind {
            ActionKind::Module => &["module_maa", "module_aam"],
            ActionKind::Comodule => &["comodule_lie", "comodule_mixed"],
        };
        for ax in axioms {
            let check = &report.entries[*ax];
            if !check.holds {
                let w = check.witness.as_ref().unwrap();
                return Err(Error::AxiomViolation { axiom: ax.to_string(), witness: w.triple });
            }
        }
        Ok(self)
    }

    /// M^{l.ass} / M^{r.ass} and M^{l.inv} / M^{r.inv} for modules /
    /// comodules respectively; the invariant subspace is contained in the
    /// associative one.
    pub fn invariant_subspaces(&self) -> InvariantSubspaces {
        let field = self.algebra.field;
        let n = self.algebra.dim;
        let unit = |i: usize| linalg::unit_vec(field, n, i);
        let mut ass_rows: Vec<LinearMap> = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let ab = self.algebra.circ_dense(&unit(a), &unit(b));
                let defect = match self.kind {
                    // (m, a, b) = m o (a o b) - (m o a) o b
                    ActionKind::Module => {
                        self.right_map(&ab).sub(&self.right[b].compose(&self.right[a]))
                    }
                    // (a, b, m) = a o (b o m) - (a o b) o m
                    ActionKind::Comodule => {
                        self.left[a].compose(&self.left[b]).sub(&self.left_map(&ab))
                    }
                };
                ass_rows.push(defect);
            }
        }
        let ass = kernel_of_stacked(field, self.dim, &ass_rows);
        let inv_maps = match self.kind {
            ActionKind::Module => &self.right,
            ActionKind::Comodule => &self.left,
        };
        let inv = kernel_of_stacked(field, self.dim, inv_maps);
        for v in inv.vectors() {
            debug_assert!(ass.contains(v), "invariant subspace not inside associative one");
        }
        InvariantSubspaces { ass, inv }
    }
}

/// Kernel of the stack of the given maps.
fn kernel_of_stacked(
    field: crate::scalars::FieldSpec,
    dim: usize,
    maps: &[LinearMap],
) -> SubspaceBasis {
    let mut m = SparseMatrix::zero(field, maps.len() * dim, dim);
    for (r, map) in maps.iter().enumerate() {
        for j in 0..dim {
            for (&i, c) in map.column(j) {
                m.add_to(r * dim + i, j, c);
            }
        }
    }
    let (_, kernel) = m.rank_nullspace();
    kernel
}

#[derive(Debug, Clone)]
pub struct InvariantSubspaces {
    /// M^{l.ass} (modules) or M^{r.ass} (comodules)
    pub ass: SubspaceBasis,
    /// M^{l.inv} (modules) or M^{r.inv} (comodules)
    pub inv: SubspaceBasis,
}

/// A module over the Lie algebra A^{lie}: `act[a]` is `q -> [e_a, q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieModule {
    pub algebra: Arc<Algebra>,
    pub dim: usize,
    pub act: Vec<LinearMap>,
    pub name: String,
}

impl LieModule {
    /// [a, m] = a o m - m o a.
    pub fn from_module(m: &RsModule) -> LieModule {
        let act = (0..m.algebra.dim).map(|a| m.left[a].sub(&m.right[a])).collect();
        LieModule {
            algebra: m.algebra.clone(),
            dim: m.dim,
            act,
            name: format!("lie({})", m.name),
        }
    }

    /// The left action of an antisymmetric comodule is a Lie representation.
    pub fn from_comodule_left(m: &RsModule) -> LieModule {
        LieModule {
            algebra: m.algebra.clone(),
            dim: m.dim,
            act: m.left.clone(),
            name: format!("lie({})", m.name),
        }
    }

    pub fn trivial(algebra: Arc<Algebra>, dim: usize) -> LieModule {
        let act = vec![LinearMap::zero(algebra.field, dim, dim); algebra.dim];
        LieModule { algebra, dim, act, name: "trivialLie".into() }
    }

    /// [x, q] for a general algebra element x.
    pub fn act(&self, x: &[Scalar], q: &[Scalar]) -> Coeffs {
        let mut out = linalg::zero_vec(self.algebra.field, self.dim);
        for (a, c) in x.iter().enumerate() {
            self.act[a].apply_into(q, c, &mut out);
        }
        out
    }

    pub fn act_basis(&self, a: usize, q: &[Scalar]) -> Coeffs {
        self.act[a].apply(q)
    }
}

// ----------------------------------------------------------------------
// Constructors
// ----------------------------------------------------------------------

/// The algebra acting on itself.
pub fn regular(algebra: &Arc<Algebra>) -> RsModule {
    let field = algebra.field;
    let n = algebra.dim;
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for a in 0..n {
        let mut r = LinearMap::zero(field, n, n);
        let mut l = LinearMap::zero(field, n, n);
        for i in 0..n {
            for (k, c) in algebra.circ_basis(i, a) {
                r.set(*k, i, c.clone());
            }
            for (k, c) in algebra.circ_basis(a, i) {
                l.set(*k, i, c.clone());
            }
        }
        right.push(r);
        left.push(l);
    }
    RsModule {
        algebra: algebra.clone(),
        kind: ActionKind::Module,
        dim: n,
        right,
        left,
        name: "regular".into(),
    }
}

/// One-dimensional module with both actions zero.
pub fn trivial(algebra: &Arc<Algebra>) -> RsModule {
    let z = vec![LinearMap::zero(algebra.field, 1, 1); algebra.dim];
    RsModule {
        algebra: algebra.clone(),
        kind: ActionKind::Module,
        dim: 1,
        right: z.clone(),
        left: z,
        name: "trivial".into(),
    }
}

/// Same actions, advertised as a comodule (trivial satisfies both axiom sets).
pub fn trivial_comodule(algebra: &Arc<Algebra>) -> RsModule {
    let mut m = trivial(algebra);
    m.kind = ActionKind::Comodule;
    m
}

/// M_anti: keep the right action, zero the left.
pub fn antisymmetrize(m: &RsModule) -> RsModule {
    let z = vec![LinearMap::zero(m.algebra.field, m.dim, m.dim); m.algebra.dim];
    RsModule {
        algebra: m.algebra.clone(),
        kind: ActionKind::Module,
        dim: m.dim,
        right: m.right.clone(),
        left: z,
        name: format!("anti({})", m.name),
    }
}

/// M-bar: antisymmetric with right action r_a - l_a.
pub fn bar(m: &RsModule) -> RsModule {
    let right = (0..m.algebra.dim).map(|a| m.right[a].sub(&m.left[a])).collect();
    let z = vec![LinearMap::zero(m.algebra.field, m.dim, m.dim); m.algebra.dim];
    RsModule {
        algebra: m.algebra.clone(),
        kind: ActionKind::Module,
        dim: m.dim,
        right,
        left: z,
        name: format!("bar({})", m.name),
    }
}

fn witt_data(algebra: &Arc<Algebra>) -> Result<(usize, crate::algebra::DividedPowers)> {
    match &algebra.preset {
        Some(PresetInfo::Witt { n, dp }) => Ok((*n, dp.clone())),
        _ => Err(Error::PresetUnavailable("requires a W preset algebra".into())),
    }
}

/// U = O_n(m) as antisymmetric module over W_n(m): u o a d_i = a d_i(u).
pub fn functions_u(algebra: &Arc<Algebra>) -> Result<RsModule> {
    let (nv, dp) = witt_data(algebra)?;
    let field = algebra.field;
    let udim = dp.dim;
    let mut right = Vec::with_capacity(algebra.dim);
    for t in 0..algebra.dim {
        let (rb, j) = (t / nv, t % nv);
        let beta = dp.unrank(rb);
        let mut r = LinearMap::zero(field, udim, udim);
        for ra in 0..udim {
            let alpha = dp.unrank(ra);
            if let Some(da) = dp.derive(&alpha, j) {
                if let Some((gamma, c)) = dp.mul(&beta, &da) {
                    r.set(dp.rank(&gamma), ra, c);
                }
            }
        }
        right.push(r);
    }
    let z = vec![LinearMap::zero(field, udim, udim); algebra.dim];
    RsModule {
        algebra: algebra.clone(),
        kind: ActionKind::Module,
        dim: udim,
        right,
        left: z,
        name: "functions_U".into(),
    }
    .validated()
}

/// Top differential forms: (u dx_1...dx_n) o a d_i = d_i(a u) dx_1...dx_n.
pub fn forms_top(algebra: &Arc<Algebra>) -> Result<RsModule> {
    let (nv, dp) = witt_data(algebra)?;
    let field = algebra.field;
    let udim = dp.dim;
    let mut right = Vec::with_capacity(algebra.dim);
    for t in 0..algebra.dim {
        let (rb, i) = (t / nv, t % nv);
        let beta = dp.unrank(rb);
        let mut r = LinearMap::zero(field, udim, udim);
        for ra in 0..udim {
            let alpha = dp.unrank(ra);
            if let Some((prod, c)) = dp.mul(&beta, &alpha) {
                if let Some(d) = dp.derive(&prod, i) {
                    r.set(dp.rank(&d), ra, c);
                }
            }
        }
        right.push(r);
    }
    let z = vec![LinearMap::zero(field, udim, udim); algebra.dim];
    RsModule {
        algebra: algebra.clone(),
        kind: ActionKind::Module,
        dim: udim,
        right,
        left: z,
        name: "forms_top".into(),
    }
    .validated()
}

/// C^1(A, M) with (f o a)(b) = d_rsym f(b, a) = f(b) o a - f(b o a) + b o f(a),
/// left action zero. Basis f_(b,m) sends e_b to e_m; flat index b*dim(M) + m.
pub fn c1_module(m: &RsModule) -> Result<RsModule> {
    let algebra = m.algebra.clone();
    let field = algebra.field;
    let n = algebra.dim;
    let dim = n * m.dim;
    let mut right = Vec::with_capacity(n);
    for a in 0..n {
        let mut r = LinearMap::zero(field, dim, dim);
        for b in 0..n {
            for mm in 0..m.dim {
                let col = b * m.dim + mm;
                // f(b) o a lands at evaluation point b
                for (&i, c) in m.right[a].column(mm) {
                    r.add_to(b * m.dim + i, col, c);
                }
                // -f(c o a) for every evaluation point c with (e_c o e_a)_b != 0
                for c_pt in 0..n {
                    for (k, coef) in algebra.circ_basis(c_pt, a) {
                        if *k == b {
                            r.add_to(c_pt * m.dim + mm, col, &coef.neg());
                        }
                    }
                }
                // + c o f(a): only when b == a
                if b == a {
                    for c_pt in 0..n {
                        for (&i, c) in m.left[c_pt].column(mm) {
                            r.add_to(c_pt * m.dim + i, col, c);
                        }
                    }
                }
            }
        }
        right.push(r);
    }
    let z = vec![LinearMap::zero(field, dim, dim); n];
    RsModule {
        algebra,
        kind: ActionKind::Module,
        dim,
        right,
        left: z,
        name: format!("C1({})", m.name),
    }
    .validated()
}

/// Tensor module M (x) N for a right-symmetric module M and a Lie module N:
/// (m (x) n) o a = m o a (x) n + m (x) [n, a], a o (m (x) n) = a o m (x) n.
/// Flat index m*dim(N) + n.
pub fn tensor(m: &RsModule, nmod: &LieModule) -> Result<RsModule> {
    if *m.algebra != *nmod.algebra {
        return Err(Error::PresetUnavailable("tensor factors over different algebras".into()));
    }
    let algebra = m.algebra.clone();
    let field = algebra.field;
    let dim = m.dim * nmod.dim;
    let idx = |mi: usize, ni: usize| mi * nmod.dim + ni;
    let mut right = Vec::with_capacity(algebra.dim);
    let mut left = Vec::with_capacity(algebra.dim);
    for a in 0..algebra.dim {
        let mut r = LinearMap::zero(field, dim, dim);
        let mut l = LinearMap::zero(field, dim, dim);
        for mi in 0..m.dim {
            for ni in 0..nmod.dim {
                let col = idx(mi, ni);
                for (&i, c) in m.right[a].column(mi) {
                    r.add_to(idx(i, ni), col, c);
                }
                // [n, a] = -[a, n]
                for (&i, c) in nmod.act[a].column(ni) {
                    r.add_to(idx(mi, i), col, &c.neg());
                }
                for (&i, c) in m.left[a].column(mi) {
                    l.add_to(idx(i, ni), col, c);
                }
            }
        }
        right.push(r);
        left.push(l);
    }
    RsModule {
        algebra,
        kind: ActionKind::Module,
        dim,
        right,
        left,
        name: format!("{}(x){}", m.name, nmod.name),
    }
    .validated()
}

/// Coregular comodule A': (a o f)(m) = f(m o a), (f o a)(m) = f(a o m).
pub fn coregular(algebra: &Arc<Algebra>) -> Result<RsModule> {
    let reg = regular(algebra);
    let right = reg.left.iter().map(LinearMap::transpose).collect();
    let left = reg.right.iter().map(LinearMap::transpose).collect();
    RsModule {
        algebra: algebra.clone(),
        kind: ActionKind::Comodule,
        dim: algebra.dim,
        right,
        left,
        name: "coregular".into(),
    }
    .validated()
}

/// The antisymmetric comodule M (x) A with left action
/// b o (m (x) a) = m o a (x) b - m (x) a o b + b o m (x) a.
/// Flat index m*dim(A) + a.
pub fn m_tensor_a(m: &RsModule) -> Result<RsModule> {
    if m.kind != ActionKind::Comodule {
        return Err(Error::PresetUnavailable("m_tensor_a needs a comodule".into()));
    }
    let algebra = m.algebra.clone();
    let field = algebra.field;
    let n = algebra.dim;
    let dim = m.dim * n;
    let idx = |mi: usize, ai: usize| mi * n + ai;
    let mut left = Vec::with_capacity(n);
    for b in 0..n {
        let mut l = LinearMap::zero(field, dim, dim);
        for mi in 0..m.dim {
            for ai in 0..n {
                let col = idx(mi, ai);
                for (&i, c) in m.right[ai].column(mi) {
                    l.add_to(idx(i, b), col, c);
                }
                for (k, c) in algebra.circ_basis(ai, b) {
                    l.add_to(idx(mi, *k), col, &c.neg());
                }
                for (&i, c) in m.left[b].column(mi) {
                    l.add_to(idx(i, ai), col, c);
                }
            }
        }
        left.push(l);
    }
    let z = vec![LinearMap::zero(field, dim, dim); n];
    RsModule {
        algebra,
        kind: ActionKind::Comodule,
        dim,
        right: z,
        left,
        name: format!("{}(x)A", m.name),
    }
    .validated()
}

/// Point module U (x) M0 over a W preset, p > 0:
/// (u (x) m) o a d_i = a d_i(u) (x) m + sum_beta u d^beta(a) (x) [m, x^(beta) d_i].
///
/// M0 must be a module over the nonnegative graded part of W_n(m): the
/// degree -1 generators (the bare d_i) have to act by zero, otherwise the
/// resulting action fails (MAA).
pub fn point_module(algebra: &Arc<Algebra>, m0: &LieModule) -> Result<RsModule> {
    let (nv, dp) = witt_data(algebra)?;
    let grading = algebra.grading.as_ref().expect("W presets are graded");
    for (g, map) in grading.iter().zip(&m0.act) {
        if *g < 0 && !map.is_zero() {
            return Err(Error::PreconditionFailed(
                "point module coefficients must be a module over the nonnegative part".into(),
            ));
        }
    }
    let field = algebra.field;
    let udim = dp.dim;
    let dim = udim * m0.dim;
    let idx = |u: usize, m: usize| u * m0.dim + m;
    let mut right = Vec::with_capacity(algebra.dim);
    for t in 0..algebra.dim {
        let (rb, i) = (t / nv, t % nv);
        let beta_a = dp.unrank(rb); // acting field is a d_i with a = x^(beta_a)
        let mut r = LinearMap::zero(field, dim, dim);
        for ra in 0..udim {
            let alpha = dp.unrank(ra);
            // a d_i(u) (x) m
            if let Some(da) = dp.derive(&alpha, i) {
                if let Some((gamma, c)) = dp.mul(&beta_a, &da) {
                    let g = dp.rank(&gamma);
                    for m in 0..m0.dim {
                        r.add_to(idx(g, m), idx(ra, m), &c);
                    }
                }
            }
            // sum over beta <= beta_a componentwise: u d^beta(a) (x) [m, x^(beta) d_i]
            for rbeta in 0..udim {
                let beta = dp.unrank(rbeta);
                if beta.iter().zip(&beta_a).any(|(x, y)| x > y) {
                    continue;
                }
                let da: Vec<u64> = beta_a.iter().zip(&beta).map(|(x, y)| x - y).collect();
                let Some((gamma, c)) = dp.mul(&alpha, &da) else { continue };
                let g = dp.rank(&gamma);
                let gen = rbeta * nv + i;
                // [m, x^(beta) d_i] = -act[gen](m)
                for m in 0..m0.dim {
                    for (k, v) in m0.act[gen].column(m) {
                        r.add_to(idx(g, *k), idx(ra, m), &(&c.neg() * v));
                    }
                }
            }
        }
        right.push(r);
    }
    let z = vec![LinearMap::zero(field, dim, dim); algebra.dim];
    RsModule {
        algebra: algebra.clone(),
        kind: ActionKind::Module,
        dim,
        right,
        left: z,
        name: format!("point({})", m0.name),
    }
    .validated()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::FieldSpec;

    fn gl2() -> Arc<Algebra> {
        Algebra::gl(2, FieldSpec::Rationals).unwrap()
    }

    fn w1() -> Arc<Algebra> {
        Algebra::w1m(5, 1).unwrap()
    }

    #[test]
    fn regular_gl2_is_special_module() {
        let m = regular(&gl2());
        let report = m.check_actions();
        assert!(report.holds("module_maa"));
        assert!(report.holds("module_aam"));
        assert!(report.holds("special"));
        assert!(!report.holds("antisymmetric"));
    }

    #[test]
    fn regular_w1_is_module_but_not_special() {
        let m = regular(&w1());
        let report = m.check_actions();
        assert!(report.holds("module_maa"));
        assert!(report.holds("module_aam"));
        assert!(!report.holds("special"));
        let w = report.entries["special"].witness.as_ref().unwrap();
        assert!(!linalg::is_zero_vec(&w.defect));
    }

    #[test]
    fn antisymmetrization_is_antisymmetric_module() {
        for a in [gl2(), w1()] {
            let m = antisymmetrize(&regular(&a));
            let report = m.check_actions();
            assert!(report.holds("module_maa"));
            assert!(report.holds("module_aam"));
            assert!(report.holds("antisymmetric"));
        }
    }

    #[test]
    fn bar_module_valid() {
        for a in [gl2(), w1()] {
            let m = bar(&regular(&a));
            let report = m.check_actions();
            assert!(report.holds("module_maa"), "{:?}", report.entries["module_maa"].witness);
            assert!(report.holds("module_aam"));
            assert!(report.holds("antisymmetric"));
        }
    }

    #[test]
    fn c1_module_of_trivial_over_w1() {
        let a = w1();
        let m = c1_module(&trivial(&a)).unwrap();
        assert_eq!(m.dim, 5);
        let report = m.check_actions();
        assert!(report.holds("module_maa"));
        assert!(report.holds("module_aam"));
        assert!(report.holds("antisymmetric"));
    }

    /// C^1(A,M) is a right A^lie-module: f o [a,b] = (f o a) o b - (f o b) o a.
    #[test]
    fn c1_module_is_right_lie_module() {
        for a in [gl2(), w1()] {
            let c1 = c1_module(&regular(&a)).unwrap();
            let field = a.field;
            let unit = |i: usize| linalg::unit_vec(field, a.dim, i);
            for x in 0..a.dim {
                for y in 0..a.dim {
                    let comm = a.commutator(&unit(x), &unit(y));
                    let lhs = c1.right_map(&comm);
                    let rhs =
                        c1.right[y].compose(&c1.right[x]).sub(&c1.right[x].compose(&c1.right[y]));
                    assert_eq!(lhs, rhs, "f o [e{x}, e{y}]");
                }
            }
        }
    }

    #[test]
    fn functions_and_forms_are_antisymmetric_modules() {
        let a = w1();
        let u = functions_u(&a).unwrap();
        assert_eq!(u.dim, 5);
        assert!(u.check_actions().holds("module_maa"));
        let om = forms_top(&a).unwrap();
        assert_eq!(om.dim, 5);
        assert!(om.check_actions().holds("module_maa"));
        // not available off W presets
        assert!(functions_u(&gl2()).is_err());
    }

    #[test]
    fn tensor_with_trivial_lie_module_is_regular_action() {
        let a = gl2();
        let reg = regular(&a);
        let t = tensor(&reg, &LieModule::trivial(a.clone(), 1)).unwrap();
        assert_eq!(t.dim, reg.dim);
        assert_eq!(t.right, reg.right);
        assert_eq!(t.left, reg.left);
    }

    #[test]
    fn tensor_with_adjoint_lie_module() {
        let a = w1();
        let n = LieModule::from_module(&regular(&a));
        let t = tensor(&regular(&a), &n).unwrap();
        assert_eq!(t.dim, 25);
    }

    #[test]
    fn coregular_is_comodule() {
        for a in [gl2(), w1()] {
            let c = coregular(&a).unwrap();
            let report = c.check_actions();
            assert!(report.holds("comodule_lie"));
            assert!(report.holds("comodule_mixed"));
        }
        // coregular of associative algebra is special
        assert!(coregular(&gl2()).unwrap().check_actions().holds("special"));
    }

    #[test]
    fn m_tensor_a_of_coregular_w1() {
        let a = w1();
        let m = m_tensor_a(&coregular(&a).unwrap()).unwrap();
        assert_eq!(m.dim, 25);
        let report = m.check_actions();
        assert!(report.holds("comodule_lie"));
        assert!(report.holds("comodule_mixed"));
        assert!(report.holds("antisymmetric"));
        assert!(m_tensor_a(&regular(&a)).is_err());
    }

    #[test]
    fn invariant_subspaces_examples() {
        let g = regular(&gl2());
        let inv = g.invariant_subspaces();
        assert_eq!(inv.ass.dim(), 4); // associative: everything

        let m = regular(&w1());
        let inv = m.invariant_subspaces();
        assert_eq!(inv.ass.dim(), 2);
        let ls = m.algebra.left_structure();
        assert_eq!(inv.ass.dim(), ls.l_ass.dim());

        let t = trivial(&w1());
        let inv = t.invariant_subspaces();
        assert_eq!(inv.ass.dim(), 1);
        assert_eq!(inv.inv.dim(), 1);
    }

    #[test]
    fn point_module_with_trivial_coefficients_matches_functions() {
        let a = w1();
        let p = point_module(&a, &LieModule::trivial(a.clone(), 1)).unwrap();
        let u = functions_u(&a).unwrap();
        assert_eq!(p.dim, u.dim);
        assert_eq!(p.right, u.right);
        assert!(point_module(&gl2(), &LieModule::trivial(gl2(), 1)).is_err());
    }

    #[test]
    fn point_module_with_parabolic_adjoint_coefficients() {
        let a = w1();
        let adj = LieModule::from_module(&regular(&a));
        // full adjoint is not a module over the nonnegative part
        assert!(point_module(&a, &adj).is_err());
        let g = a.grading.clone().unwrap();
        let act = adj
            .act
            .iter()
            .zip(&g)
            .map(|(m, &deg)| {
                if deg < 0 {
                    LinearMap::zero(a.field, adj.dim, adj.dim)
                } else {
                    m.clone()
                }
            })
            .collect();
        let m0 = LieModule { algebra: a.clone(), dim: adj.dim, act, name: "adj>=0".into() };
        let p = point_module(&a, &m0).unwrap();
        assert_eq!(p.dim, 25);
        assert!(p.check_actions().holds("antisymmetric"));
    }

    #[test]
    fn central_flag() {
        // Z_l(W1) is spanned by e_{-1}, and e_{-1} o a = 0, so the regular
        // module is central.
        let m = regular(&w1());
        assert!(m.check_actions().holds("central"));
    }
}
