//! Cochains, Lie cochains and chains, together with the operator calculus on
//! them: face maps, the right-symmetric and Chevalley-Eilenberg coboundaries,
//! interior products and the rho actions (Cartan's formulas), the comparison
//! maps f and F, cup products, the T operator and the homology boundary.
//!
//! Storage keeps only strictly increasing wedge keys; evaluating at arbitrary
//! argument orders applies the sign of the sorting permutation and returns
//! zero on repeated wedge entries. Every operator produces canonicalized
//! output, so cochains compare with `==` exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::linalg::{self, Coeffs};
use crate::modcomod::{LieModule, RsModule};
use crate::scalars::Scalar;
use crate::{Error, Result};

/// Key of a right-symmetric cochain table: evaluation at
/// `(e_head; e_{wedge[0]} ^ e_{wedge[1]} ^ ...)`, wedge strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CKey {
    pub head: usize,
    pub wedge: Vec<usize>,
}

/// An evaluation argument: a basis index or a general element.
#[derive(Clone, Copy)]
pub enum Arg<'a> {
    Basis(usize),
    Elem(&'a [Scalar]),
}

/// Sorts a wedge list in place; returns None on a repeated entry, otherwise
/// whether the permutation is odd.
pub(crate) fn sort_wedge(w: &mut [usize]) -> Option<bool> {
    let mut odd = false;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            w.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
        if j > 0 && w[j - 1] == w[j] {
            return None;
        }
    }
    Some(odd)
}

/// All strictly increasing k-subsets of 0..n in lexicographic order.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Basis keys of C^degree, head-major then wedge-lexicographic.
pub fn cochain_keys(n: usize, degree: usize) -> Vec<CKey> {
    assert!(degree >= 1);
    let mut keys = Vec::new();
    for head in 0..n {
        for w in increasing_tuples(n, degree - 1) {
            keys.push(CKey { head, wedge: w });
        }
    }
    keys
}

enum Data {
    /// Degree 0: an element of M^{l.ass}.
    Value(Coeffs),
    /// Degree >= 1: sparse table keyed by (head, increasing wedge).
    Table(BTreeMap<CKey, Coeffs>),
}

/// A right-symmetric cochain: degree k >= 1 is a multilinear map
/// A (x) Lambda^{k-1} A -> M; degree 0 is an element of M^{l.ass}.
pub struct Cochain {
    pub algebra: Arc<Algebra>,
    pub module: Arc<RsModule>,
    pub degree: usize,
    data: Data,
}

impl Clone for Cochain {
    fn clone(&self) -> Self {
        Cochain {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            degree: self.degree,
            data: match &self.data {
                Data::Value(v) => Data::Value(v.clone()),
                Data::Table(t) => Data::Table(t.clone()),
            },
        }
    }
}

impl std::fmt::Debug for Cochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cochain(deg {} in {})", self.degree, self.module.name)?;
        match &self.data {
            Data::Value(v) => write!(f, " value {v:?}"),
            Data::Table(t) => {
                for (k, v) in t {
                    write!(f, "\n  ({}, {:?}) -> {:?}", k.head, k.wedge, v)?;
                }
                Ok(())
            }
        }
    }
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && match (&self.data, &other.data) {
                (Data::Value(a), Data::Value(b)) => a == b,
                (Data::Table(a), Data::Table(b)) => a == b,
                _ => false,
            }
    }
}

impl Cochain {
    pub fn zero(algebra: Arc<Algebra>, module: Arc<RsModule>, degree: usize) -> Cochain {
        let data = if degree == 0 {
            Data::Value(linalg::zero_vec(algebra.field, module.dim))
        } else {
            Data::Table(BTreeMap::new())
        };
        Cochain { algebra, module, degree, data }
    }

    /// Degree-0 cochain; the value must lie in M^{l.ass}.
    pub fn constant(
        algebra: Arc<Algebra>,
        module: Arc<RsModule>,
        value: Coeffs,
    ) -> Result<Cochain> {
        let inv = module.invariant_subspaces();
        if !inv.ass.contains(&value) {
            return Err(Error::PreconditionFailed(
                "degree-0 cochains must lie in the left-associative invariants".into(),
            ));
        }
        Ok(Cochain { algebra, module, degree: 0, data: Data::Value(value) })
    }

    /// Builds a degree >= 1 cochain by evaluating `f` at every basis key.
    pub fn from_fn(
        algebra: Arc<Algebra>,
        module: Arc<RsModule>,
        degree: usize,
        mut f: impl FnMut(usize, &[usize]) -> Coeffs,
    ) -> Cochain {
        assert!(degree >= 1);
        let mut table = BTreeMap::new();
        for key in cochain_keys(algebra.dim, degree) {
            let v = f(key.head, &key.wedge);
            if !linalg::is_zero_vec(&v) {
                table.insert(key, v);
            }
        }
        Cochain { algebra, module, degree, data: Data::Table(table) }
    }

    /// Inserts a term at an increasing key (panics otherwise).
    pub fn set_term(&mut self, key: CKey, value: Coeffs) {
        assert!(key.wedge.windows(2).all(|w| w[0] < w[1]), "wedge key must increase");
        assert_eq!(key.wedge.len() + 1, self.degree);
        match &mut self.data {
            Data::Table(t) => {
                if linalg::is_zero_vec(&value) {
                    t.remove(&key);
                } else {
                    t.insert(key, value);
                }
            }
            Data::Value(_) => panic!("set_term on degree-0 cochain"),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CKey, &Coeffs)> {
        match &self.data {
            Data::Table(t) => t.iter(),
            Data::Value(_) => panic!("terms on degree-0 cochain"),
        }
    }

    pub fn value0(&self) -> &Coeffs {
        match &self.data {
            Data::Value(v) => v,
            _ => panic!("value0 on positive-degree cochain"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Value(v) => linalg::is_zero_vec(v),
            Data::Table(t) => t.is_empty(),
        }
    }

    fn zero_value(&self) -> Coeffs {
        linalg::zero_vec(self.algebra.field, self.module.dim)
    }

    /// Evaluation at basis arguments, with alternation handled by sorting.
    pub fn eval_basis(&self, head: usize, wedge: &[usize]) -> Coeffs {
        assert!(self.degree >= 1 && wedge.len() + 1 == self.degree);
        let mut w = wedge.to_vec();
        let Some(odd) = sort_wedge(&mut w) else {
            return self.zero_value();
        };
        let Data::Table(t) = &self.data else { unreachable!() };
        match t.get(&CKey { head, wedge: w }) {
            Some(v) if odd => linalg::neg_vec(v),
            Some(v) => v.clone(),
            None => self.zero_value(),
        }
    }

    /// Multilinear evaluation; general elements are expanded over their
    /// nonzero coordinates.
    pub fn eval(&self, head: Arg, wedge: &[Arg]) -> Coeffs {
        if let Arg::Elem(x) = head {
            let mut acc = self.zero_value();
            for (i, c) in x.iter().enumerate() {
                if !c.is_zero() {
                    let v = self.eval(Arg::Basis(i), wedge);
                    linalg::add_scaled(&mut acc, c, &v);
                }
            }
            return acc;
        }
        for (slot, arg) in wedge.iter().enumerate() {
            if let Arg::Elem(x) = arg {
                let mut acc = self.zero_value();
                for (i, c) in x.iter().enumerate() {
                    if !c.is_zero() {
                        let mut args = wedge.to_vec();
                        args[slot] = Arg::Basis(i);
                        let v = self.eval(head, &args);
                        linalg::add_scaled(&mut acc, c, &v);
                    }
                }
                return acc;
            }
        }
        let h = match head {
            Arg::Basis(i) => i,
            Arg::Elem(_) => unreachable!(),
        };
        let w: Vec<usize> = wedge
            .iter()
            .map(|a| match a {
                Arg::Basis(i) => *i,
                Arg::Elem(_) => unreachable!(),
            })
            .collect();
        self.eval_basis(h, &w)
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        match (&mut out.data, &other.data) {
            (Data::Value(a), Data::Value(b)) => linalg::add_assign(a, b),
            (Data::Table(a), Data::Table(b)) => {
                for (k, v) in b {
                    match a.get_mut(k) {
                        Some(cur) => {
                            linalg::add_assign(cur, v);
                            if linalg::is_zero_vec(cur) {
                                a.remove(k);
                            }
                        }
                        None => {
                            a.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        let mut out = self.clone();
        match &mut out.data {
            Data::Value(v) => *v = linalg::scale_vec(v, c),
            Data::Table(t) => {
                let old = std::mem::take(t);
                for (k, v) in old {
                    let sv = linalg::scale_vec(&v, c);
                    if !linalg::is_zero_vec(&sv) {
                        t.insert(k, sv);
                    }
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Cochain {
        self.scale(&self.algebra.field.integer(-1))
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.add(&other.neg())
    }

    /// Face map D_i, 1 <= i; zero for i > degree; degree must be >= 1.
    ///
    /// D_i psi(a_0,...,a_k) = a_0 o psi(a_i, ..^a_i..)
    ///   - psi(a_0 o a_i, ..^a_i..) + psi(a_0, ..^a_i..) o a_i
    ///   + sum_{j>i} psi(a_0, ..^a_i.., [a_i,a_j]@j, ..).
    pub fn face_map(&self, i: usize) -> Cochain {
        let k = self.degree;
        assert!(k >= 1 && i >= 1);
        if i > k {
            return Cochain::zero(self.algebra.clone(), self.module.clone(), k + 1);
        }
        let algebra = self.algebra.clone();
        let module = self.module.clone();
        let field = algebra.field;
        let unit = |t: usize| linalg::unit_vec(field, algebra.dim, t);
        Cochain::from_fn(algebra.clone(), module.clone(), k + 1, |h, w| {
            let ai = w[i - 1];
            let rest: Vec<usize> =
                w.iter().enumerate().filter(|(p, _)| *p != i - 1).map(|(_, &t)| t).collect();
            let rest_args: Vec<Arg> = rest.iter().map(|&t| Arg::Basis(t)).collect();

            // a_0 o psi(a_i, rest)
            let mut acc = module.left_basis(&self.eval_basis(ai, &rest), h);
            // - psi(a_0 o a_i, rest)
            let ha = algebra.circ_dense(&unit(h), &unit(ai));
            linalg::sub_assign(&mut acc, &self.eval(Arg::Elem(&ha), &rest_args));
            // + psi(a_0, rest) o a_i
            linalg::add_assign(&mut acc, &module.right_basis(&self.eval_basis(h, &rest), ai));
            // + sum_{j>i} psi(a_0, rest with [a_i, a_j] in the j slot)
            for j in i + 1..=k {
                let br = algebra.commutator(&unit(ai), &unit(w[j - 1]));
                let mut args = rest_args.clone();
                // the old a_j sits at position j-2 once a_i is removed
                args[j - 2] = Arg::Elem(&br);
                linalg::add_assign(&mut acc, &self.eval(Arg::Basis(h), &args));
            }
            acc
        })
    }

    /// d_rsym = sum_i (-1)^{i+1} D_i on degree >= 1;
    /// d_rsym m (a) = a o m - m o a on degree 0.
    pub fn d_rsym(&self) -> Cochain {
        if self.degree == 0 {
            let m = self.value0().clone();
            let module = self.module.clone();
            let inner = module.clone();
            return Cochain::from_fn(self.algebra.clone(), module, 1, move |h, _| {
                let mut v = inner.left_basis(&m, h);
                linalg::sub_assign(&mut v, &inner.right_basis(&m, h));
                v
            });
        }
        let mut acc = Cochain::zero(self.algebra.clone(), self.module.clone(), self.degree + 1);
        for i in 1..=self.degree {
            let face = self.face_map(i);
            acc = if i % 2 == 1 { acc.add(&face) } else { acc.sub(&face) };
        }
        acc
    }

    pub fn is_cocycle(&self) -> bool {
        self.d_rsym().is_zero()
    }

    /// Interior product i(x): degree -1; zero on degree <= 1.
    pub fn interior(&self, x: &[Scalar]) -> Cochain {
        let k = self.degree;
        if k <= 1 {
            return Cochain::zero(self.algebra.clone(), self.module.clone(), k.saturating_sub(1));
        }
        Cochain::from_fn(self.algebra.clone(), self.module.clone(), k - 1, |h, w| {
            let mut args: Vec<Arg> = Vec::with_capacity(k - 1);
            args.push(Arg::Elem(x));
            args.extend(w.iter().map(|&t| Arg::Basis(t)));
            self.eval(Arg::Basis(h), &args)
        })
    }

    /// psi o x (the antisymmetric right action on cochains):
    /// (psi o x)(a_0,...,a_k) = a_0 o psi(x, a_1..a_k) - psi(a_0 o x, a_1..a_k)
    ///   + psi(a_0,...,a_k) o x + sum_i psi(a_0,..,[x,a_i],..,a_k).
    pub fn rho_rsym(&self, x: &[Scalar]) -> Result<Cochain> {
        let k = self.degree;
        if k == 0 {
            return Err(Error::DegreeZero);
        }
        let algebra = self.algebra.clone();
        let module = self.module.clone();
        let field = algebra.field;
        let unit = |t: usize| linalg::unit_vec(field, algebra.dim, t);
        Ok(Cochain::from_fn(algebra.clone(), module.clone(), k, |h, w| {
            let args: Vec<Arg> = w.iter().map(|&t| Arg::Basis(t)).collect();
            // a_0 o psi(x, a_1..)
            let mut acc = module.left_basis(&self.eval(Arg::Elem(x), &args), h);
            // - psi(a_0 o x, ...)
            let hx = algebra.circ_dense(&unit(h), x);
            linalg::sub_assign(&mut acc, &self.eval(Arg::Elem(&hx), &args));
            // + psi(a_0, ...) o x
            linalg::add_assign(&mut acc, &module.right_act(&self.eval_basis(h, w), x));
            // + sum_i psi(a_0, .., [x, a_i], ..)
            for i in 0..w.len() {
                let br = algebra.commutator(x, &unit(w[i]));
                let mut a2 = args.clone();
                a2[i] = Arg::Elem(&br);
                linalg::add_assign(&mut acc, &self.eval(Arg::Basis(h), &a2));
            }
            acc
        }))
    }

    /// rho_lie(x) psi = -(psi o x).
    pub fn rho_lie(&self, x: &[Scalar]) -> Result<Cochain> {
        Ok(self.rho_rsym(x)?.neg())
    }

    /// The antisymmetrization f: C^k_rsym -> C^k_lie,
    /// f psi(a_1..a_k) = sum_i (-1)^{i+1} psi(a_i, a_1,..,^a_i,..,a_k).
    pub fn antisymmetrize_f(&self) -> LieCochain {
        let k = self.degree;
        assert!(k >= 1);
        let module = Arc::new(LieModule::from_module(&self.module));
        LieCochain::from_fn(self.algebra.clone(), module, k, |w| {
            let mut acc = self.zero_value();
            for i in 0..k {
                let rest: Vec<usize> =
                    w.iter().enumerate().filter(|(p, _)| *p != i).map(|(_, &t)| t).collect();
                let v = self.eval_basis(w[i], &rest);
                if i % 2 == 0 {
                    linalg::add_assign(&mut acc, &v);
                } else {
                    linalg::sub_assign(&mut acc, &v);
                }
            }
            acc
        })
    }

    /// First-slot insertion: (i_0(x) psi)(a_1..a_k) = psi(x, a_1..a_k),
    /// returned as a Lie cochain over the given value module.
    pub fn insert_first(&self, x: &[Scalar], module: Arc<LieModule>) -> LieCochain {
        assert!(self.degree >= 1);
        assert_eq!(module.dim, self.module.dim);
        let k = self.degree - 1;
        LieCochain::from_fn(self.algebra.clone(), module, k, |w| {
            let args: Vec<Arg> = w.iter().map(|&t| Arg::Basis(t)).collect();
            self.eval(Arg::Elem(x), &args)
        })
    }

    /// T psi(a_0..a_k) = sum_{i=1}^k (-1)^{i+k} a_i * psi(a_0,..,^a_i,..,a_k)
    /// for cochains valued in the regular module of an algebra with `*`.
    pub fn t_operator(&self) -> Result<Cochain> {
        if !self.algebra.has_ast() {
            return Err(Error::NoSecondProduct);
        }
        if self.module.dim != self.algebra.dim {
            return Err(Error::WrongModule {
                expected: "regular coefficients".into(),
                got: self.module.name.clone(),
            });
        }
        let k = self.degree;
        assert!(k >= 1);
        let algebra = self.algebra.clone();
        let field = algebra.field;
        let unit = |t: usize| linalg::unit_vec(field, algebra.dim, t);
        Ok(Cochain::from_fn(algebra.clone(), self.module.clone(), k + 1, |h, w| {
            let mut acc = self.zero_value();
            for i in 1..=k {
                let rest: Vec<usize> =
                    w.iter().enumerate().filter(|(p, _)| *p != i - 1).map(|(_, &t)| t).collect();
                let val = self.eval_basis(h, &rest);
                let term = algebra
                    .multiply(&unit(w[i - 1]), &val, crate::algebra::Product::Ast)
                    .expect("ast presence checked");
                if (i + k) % 2 == 0 {
                    linalg::add_assign(&mut acc, &term);
                } else {
                    linalg::sub_assign(&mut acc, &term);
                }
            }
            acc
        }))
    }
}

// ----------------------------------------------------------------------
// Raw multilinear cochains
// ----------------------------------------------------------------------

/// A raw multilinear map A^(x)arity -> M with no alternation imposed.
///
/// The individual face maps D_i do not preserve alternation; the
/// pre-simplicial identity D_j D_i = D_i D_{j-1} and Cartan's interior
/// formulas hold at this multilinear level. Only the alternating sum d_rsym
/// maps alternating cochains to alternating cochains again.
pub struct MultiCochain {
    pub algebra: Arc<Algebra>,
    pub module: Arc<RsModule>,
    pub arity: usize,
    table: BTreeMap<Vec<usize>, Coeffs>,
}

impl Clone for MultiCochain {
    fn clone(&self) -> Self {
        MultiCochain {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            arity: self.arity,
            table: self.table.clone(),
        }
    }
}

impl PartialEq for MultiCochain {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.table == other.table
    }
}

impl std::fmt::Debug for MultiCochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MultiCochain(arity {} in {})", self.arity, self.module.name)
    }
}

/// All tuples in 0..n of length k, lexicographic.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for i in 0..n {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

impl MultiCochain {
    /// The alternating extension of a degree >= 1 cochain.
    pub fn from_cochain(psi: &Cochain) -> MultiCochain {
        assert!(psi.degree >= 1);
        MultiCochain::from_fn(psi.algebra.clone(), psi.module.clone(), psi.degree, |t| {
            psi.eval_basis(t[0], &t[1..])
        })
    }

    pub fn from_fn(
        algebra: Arc<Algebra>,
        module: Arc<RsModule>,
        arity: usize,
        mut f: impl FnMut(&[usize]) -> Coeffs,
    ) -> MultiCochain {
        assert!(arity >= 1);
        let mut table = BTreeMap::new();
        for t in all_tuples(algebra.dim, arity) {
            let v = f(&t);
            if !linalg::is_zero_vec(&v) {
                table.insert(t, v);
            }
        }
        MultiCochain { algebra, module, arity, table }
    }

    fn zero_value(&self) -> Coeffs {
        linalg::zero_vec(self.algebra.field, self.module.dim)
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn eval_tuple(&self, t: &[usize]) -> Coeffs {
        assert_eq!(t.len(), self.arity);
        self.table.get(t).cloned().unwrap_or_else(|| self.zero_value())
    }

    /// Multilinear evaluation with general elements in some slots.
    pub fn eval_args(&self, args: &[Arg]) -> Coeffs {
        for (slot, arg) in args.iter().enumerate() {
            if let Arg::Elem(x) = arg {
                let mut acc = self.zero_value();
                for (i, c) in x.iter().enumerate() {
                    if !c.is_zero() {
                        let mut a2 = args.to_vec();
                        a2[slot] = Arg::Basis(i);
                        let v = self.eval_args(&a2);
                        linalg::add_scaled(&mut acc, c, &v);
                    }
                }
                return acc;
            }
        }
        let t: Vec<usize> = args
            .iter()
            .map(|a| match a {
                Arg::Basis(i) => *i,
                Arg::Elem(_) => unreachable!(),
            })
            .collect();
        self.eval_tuple(&t)
    }

    /// True when swapping any two of the last arity-1 slots negates values.
    pub fn is_alternating(&self) -> bool {
        let n = self.algebra.dim;
        for t in all_tuples(n, self.arity) {
            for s in 1..self.arity.saturating_sub(1) {
                let mut t2 = t.clone();
                t2.swap(s, s + 1);
                let v = self.eval_tuple(&t);
                if t[s] == t[s + 1] {
                    if !linalg::is_zero_vec(&v) {
                        return false;
                    }
                } else if v != linalg::neg_vec(&self.eval_tuple(&t2)) {
                    return false;
                }
            }
        }
        true
    }

    /// Restriction to increasing keys as an alternating cochain; errors when
    /// the map is not alternating.
    pub fn to_cochain(&self) -> Result<Cochain> {
        if !self.is_alternating() {
            return Err(Error::PreconditionFailed("multilinear map is not alternating".into()));
        }
        Ok(Cochain::from_fn(
            self.algebra.clone(),
            self.module.clone(),
            self.arity,
            |h, w| {
                let mut t = vec![h];
                t.extend_from_slice(w);
                self.eval_tuple(&t)
            },
        ))
    }

    pub fn add(&self, other: &MultiCochain) -> MultiCochain {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (k, v) in &other.table {
            match out.table.get_mut(k) {
                Some(cur) => {
                    linalg::add_assign(cur, v);
                    if linalg::is_zero_vec(cur) {
                        out.table.remove(k);
                    }
                }
                None => {
                    out.table.insert(k.clone(), v.clone());
                }
            }
        }
        out
    }

    pub fn neg(&self) -> MultiCochain {
        let mut out = self.clone();
        for v in out.table.values_mut() {
            *v = linalg::neg_vec(v);
        }
        out
    }

    pub fn sub(&self, other: &MultiCochain) -> MultiCochain {
        self.add(&other.neg())
    }

    /// Face map D_i on raw multilinear cochains (the level at which
    /// D_j D_i = D_i D_{j-1} holds).
    pub fn face_map(&self, i: usize) -> MultiCochain {
        let k = self.arity;
        assert!(i >= 1);
        if i > k {
            return MultiCochain {
                algebra: self.algebra.clone(),
                module: self.module.clone(),
                arity: k + 1,
                table: BTreeMap::new(),
            };
        }
        let algebra = self.algebra.clone();
        let module = self.module.clone();
        let field = algebra.field;
        let unit = |t: usize| linalg::unit_vec(field, algebra.dim, t);
        MultiCochain::from_fn(algebra.clone(), module.clone(), k + 1, |t| {
            let h = t[0];
            let w = &t[1..];
            let ai = w[i - 1];
            let mut rest: Vec<usize> = Vec::with_capacity(k - 1);
            rest.extend(w.iter().enumerate().filter(|(p, _)| *p != i - 1).map(|(_, &x)| x));
            let mut args: Vec<Arg> = Vec::with_capacity(k);
            args.push(Arg::Basis(ai));
            args.extend(rest.iter().map(|&x| Arg::Basis(x)));
            // a_0 o psi(a_i, rest)
            let mut acc = module.left_basis(&self.eval_args(&args), h);
            // - psi(a_0 o a_i, rest)
            let ha = algebra.circ_dense(&unit(h), &unit(ai));
            args[0] = Arg::Elem(&ha);
            linalg::sub_assign(&mut acc, &self.eval_args(&args));
            // + psi(a_0, rest) o a_i
            args[0] = Arg::Basis(h);
            linalg::add_assign(&mut acc, &module.right_basis(&self.eval_args(&args), ai));
            // + sum_{j>i} psi(a_0, rest with [a_i, a_j] at the j slot)
            for j in i + 1..=k {
                let br = algebra.commutator(&unit(ai), &unit(w[j - 1]));
                let mut a2 = args.clone();
                a2[j - 1] = Arg::Elem(&br); // slot j-2 of rest is arg j-1
                linalg::add_assign(&mut acc, &self.eval_args(&a2));
            }
            acc
        })
    }

    /// d = sum_i (-1)^{i+1} D_i.
    pub fn d_rsym(&self) -> MultiCochain {
        let mut acc = MultiCochain {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            arity: self.arity + 1,
            table: BTreeMap::new(),
        };
        for i in 1..=self.arity {
            let face = self.face_map(i);
            acc = if i % 2 == 1 { acc.add(&face) } else { acc.sub(&face) };
        }
        acc
    }

    /// Interior product: insertion of x into the first wedge slot.
    pub fn interior(&self, x: &[Scalar]) -> MultiCochain {
        let k = self.arity;
        assert!(k >= 2, "raw interior product needs arity >= 2");
        MultiCochain::from_fn(self.algebra.clone(), self.module.clone(), k - 1, |t| {
            let mut args: Vec<Arg> = Vec::with_capacity(k);
            args.push(Arg::Basis(t[0]));
            args.push(Arg::Elem(x));
            args.extend(t[1..].iter().map(|&s| Arg::Basis(s)));
            self.eval_args(&args)
        })
    }

    /// psi o x on raw cochains.
    pub fn rho_rsym(&self, x: &[Scalar]) -> MultiCochain {
        let k = self.arity;
        let algebra = self.algebra.clone();
        let module = self.module.clone();
        let field = algebra.field;
        let unit = |t: usize| linalg::unit_vec(field, algebra.dim, t);
        MultiCochain::from_fn(algebra.clone(), module.clone(), k, |t| {
            let h = t[0];
            let w = &t[1..];
            let mut args: Vec<Arg> = Vec::with_capacity(k);
            args.push(Arg::Elem(x));
            args.extend(w.iter().map(|&s| Arg::Basis(s)));
            // a_0 o psi(x, ...)
            let mut acc = module.left_basis(&self.eval_args(&args), h);
            // - psi(a_0 o x, ...)
            let hx = algebra.circ_dense(&unit(h), x);
            args[0] = Arg::Elem(&hx);
            linalg::sub_assign(&mut acc, &self.eval_args(&args));
            // + psi(a_0, ...) o x
            args[0] = Arg::Basis(h);
            linalg::add_assign(&mut acc, &module.right_act(&self.eval_args(&args), x));
            // + sum_i psi(a_0, .., [x, a_i], ..)
            for i in 0..w.len() {
                let br = algebra.commutator(x, &unit(w[i]));
                let mut a2 = args.clone();
                a2[i + 1] = Arg::Elem(&br);
                linalg::add_assign(&mut acc, &self.eval_args(&a2));
            }
            acc
        })
    }
}

// ----------------------------------------------------------------------
// Lie cochains
// ----------------------------------------------------------------------

enum LieData {
    Value(Coeffs),
    Table(BTreeMap<Vec<usize>, Coeffs>),
}

/// A Chevalley-Eilenberg cochain Hom(Lambda^k A, Q) for a Lie module Q.
pub struct LieCochain {
    pub algebra: Arc<Algebra>,
    pub module: Arc<LieModule>,
    pub degree: usize,
    data: LieData,
}

impl Clone for LieCochain {
    fn clone(&self) -> Self {
        LieCochain {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            degree: self.degree,
            data: match &self.data {
                LieData::Value(v) => LieData::Value(v.clone()),
                LieData::Table(t) => LieData::Table(t.clone()),
            },
        }
    }
}

impl std::fmt::Debug for LieCochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieCochain(deg {} in {})", self.degree, self.module.name)?;
        if let LieData::Table(t) = &self.data {
            for (k, v) in t {
                write!(f, "\n  {k:?} -> {v:?}")?;
            }
        }
        Ok(())
    }
}

impl PartialEq for LieCochain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && match (&self.data, &other.data) {
                (LieData::Value(a), LieData::Value(b)) => a == b,
                (LieData::Table(a), LieData::Table(b)) => a == b,
                _ => false,
            }
    }
}

impl LieCochain {
    pub fn zero(algebra: Arc<Algebra>, module: Arc<LieModule>, degree: usize) -> LieCochain {
        let data = if degree == 0 {
            LieData::Value(linalg::zero_vec(algebra.field, module.dim))
        } else {
            LieData::Table(BTreeMap::new())
        };
        LieCochain { algebra, module, degree, data }
    }

    pub fn constant(algebra: Arc<Algebra>, module: Arc<LieModule>, value: Coeffs) -> LieCochain {
        LieCochain { algebra, module, degree: 0, data: LieData::Value(value) }
    }

    pub fn from_fn(
        algebra: Arc<Algebra>,
        module: Arc<LieModule>,
        degree: usize,
        mut f: impl FnMut(&[usize]) -> Coeffs,
    ) -> LieCochain {
        if degree == 0 {
            let v = f(&[]);
            return LieCochain::constant(algebra, module, v);
        }
        let mut table = BTreeMap::new();
        for w in increasing_tuples(algebra.dim, degree) {
            let v = f(&w);
            if !linalg::is_zero_vec(&v) {
                table.insert(w, v);
            }
        }
        LieCochain { algebra, module, degree, data: LieData::Table(table) }
    }

    pub fn set_term(&mut self, wedge: Vec<usize>, value: Coeffs) {
        assert!(wedge.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(wedge.len(), self.degree);
        match &mut self.data {
            LieData::Table(t) => {
                if linalg::is_zero_vec(&value) {
                    t.remove(&wedge);
                } else {
                    t.insert(wedge, value);
                }
            }
            LieData::Value(_) => panic!("set_term on degree-0 Lie cochain"),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Coeffs)> {
        match &self.data {
            LieData::Table(t) => t.iter(),
            LieData::Value(_) => panic!("terms on degree-0 Lie cochain"),
        }
    }

    pub fn value0(&self) -> &Coeffs {
        match &self.data {
            LieData::Value(v) => v,
            _ => panic!("value0 on positive-degree Lie cochain"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            LieData::Value(v) => linalg::is_zero_vec(v),
            LieData::Table(t) => t.is_empty(),
        }
    }

    fn zero_value(&self) -> Coeffs {
        linalg::zero_vec(self.algebra.field, self.module.dim)
    }

    pub fn eval_basis(&self, wedge: &[usize]) -> Coeffs {
        assert_eq!(wedge.len(), self.degree);
        if self.degree == 0 {
            return self.value0().clone();
        }
        let mut w = wedge.to_vec();
        let Some(odd) = sort_wedge(&mut w) else {
            return self.zero_value();
        };
        let LieData::Table(t) = &self.data else { unreachable!() };
        match t.get(&w) {
            Some(v) if odd => linalg::neg_vec(v),
            Some(v) => v.clone(),
            None => self.zero_value(),
        }
    }

    pub fn eval(&self, args: &[Arg]) -> Coeffs {
        for (slot, arg) in args.iter().enumerate() {
            if let Arg::Elem(x) = arg {
                let mut acc = self.zero_value();
                for (i, c) in x.iter().enumerate() {
                    if !c.is_zero() {
                        let mut a2 = args.to_vec();
                        a2[slot] = Arg::Basis(i);
                        let v = self.eval(&a2);
                        linalg::add_scaled(&mut acc, c, &v);
                    }
                }
                return acc;
            }
        }
        let w: Vec<usize> = args
            .iter()
            .map(|a| match a {
                Arg::Basis(i) => *i,
                Arg::Elem(_) => unreachable!(),
            })
            .collect();
        self.eval_basis(&w)
    }

    pub fn add(&self, other: &LieCochain) -> LieCochain {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        match (&mut out.data, &other.data) {
            (LieData::Value(a), LieData::Value(b)) => linalg::add_assign(a, b),
            (LieData::Table(a), LieData::Table(b)) => {
                for (k, v) in b {
                    match a.get_mut(k) {
                        Some(cur) => {
                            linalg::add_assign(cur, v);
                            if linalg::is_zero_vec(cur) {
                                a.remove(k);
                            }
                        }
                        None => {
                            a.insert(k.clone(), v.clone());
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> LieCochain {
        let mut out = self.clone();
        match &mut out.data {
            LieData::Value(v) => *v = linalg::scale_vec(v, c),
            LieData::Table(t) => {
                let old = std::mem::take(t);
                for (k, v) in old {
                    let sv = linalg::scale_vec(&v, c);
                    if !linalg::is_zero_vec(&sv) {
                        t.insert(k, sv);
                    }
                }
            }
        }
        out
    }

    pub fn neg(&self) -> LieCochain {
        self.scale(&self.algebra.field.integer(-1))
    }

    pub fn sub(&self, other: &LieCochain) -> LieCochain {
        self.add(&other.neg())
    }

    /// Chevalley-Eilenberg differential:
    /// d phi(a_1..a_{k+1}) = sum_{i<j} (-1)^i phi(.., ^a_i, .., [a_i,a_j]@j, ..)
    ///   + sum_i (-1)^{i+1} [a_i, phi(.., ^a_i, ..)].
    pub fn d_lie(&self) -> LieCochain {
        let k = self.degree;
        let algebra = self.algebra.clone();
        let module = self.module.clone();
        let field = algebra.field;
        let unit = |t: usize| linalg::unit_vec(field, algebra.dim, t);
        LieCochain::from_fn(algebra.clone(), module.clone(), k + 1, |w| {
            let mut acc = self.zero_value();
            for i in 1..=k + 1 {
                let rest: Vec<usize> =
                    w.iter().enumerate().filter(|(p, _)| *p != i - 1).map(|(_, &t)| t).collect();
                // (-1)^{i+1} [a_i, phi(rest)]
                let v = module.act_basis(w[i - 1], &self.eval_basis(&rest));
                if (i + 1) % 2 == 0 {
                    linalg::add_assign(&mut acc, &v);
                } else {
                    linalg::sub_assign(&mut acc, &v);
                }
                // (-1)^i phi(rest with [a_i, a_j] replacing a_j), j > i
                for j in i + 1..=k + 1 {
                    let br = algebra.commutator(&unit(w[i - 1]), &unit(w[j - 1]));
                    let mut args: Vec<Arg> = rest.iter().map(|&t| Arg::Basis(t)).collect();
                    args[j - 2] = Arg::Elem(&br);
                    let v = self.eval(&args);
                    if i % 2 == 0 {
                        linalg::add_assign(&mut acc, &v);
                    } else {
                        linalg::sub_assign(&mut acc, &v);
                    }
                }
            }
            acc
        })
    }

    pub fn is_cocycle(&self) -> bool {
        self.d_lie().is_zero()
    }
}

/// The comparison isomorphism F: C^k_lie(A, C^1(A,M)) -> C^{k+1}_rsym(A, M),
/// F phi(a_0, a_1..a_k) = (-1)^k phi(a_1..a_k)(a_0).
///
/// `target` is the coefficient module M; phi must be valued in the Lie module
/// of C^1(A, M) with the flat index b*dim(M)+m produced by
/// [`crate::modcomod::c1_module`].
pub fn lift_f(phi: &LieCochain, target: &Arc<RsModule>) -> Result<Cochain> {
    let n = phi.algebra.dim;
    if phi.module.dim != n * target.dim {
        return Err(Error::WrongModule {
            expected: format!("C1({})", target.name),
            got: phi.module.name.clone(),
        });
    }
    let k = phi.degree;
    let dim_m = target.dim;
    let sign = phi.algebra.field.integer(if k % 2 == 0 { 1 } else { -1 });
    Ok(Cochain::from_fn(phi.algebra.clone(), target.clone(), k + 1, |h, w| {
        let f = phi.eval_basis(w);
        linalg::scale_vec(&f[h * dim_m..(h + 1) * dim_m], &sign)
    }))
}

/// Inverse of [`lift_f`]: phi(a_1..a_k)(a_0) = (-1)^k psi(a_0, a_1..a_k).
pub fn lift_f_inverse(psi: &Cochain, c1: &Arc<LieModule>) -> Result<LieCochain> {
    let n = psi.algebra.dim;
    if c1.dim != n * psi.module.dim {
        return Err(Error::WrongModule {
            expected: format!("C1({})", psi.module.name),
            got: c1.name.clone(),
        });
    }
    assert!(psi.degree >= 1);
    let k = psi.degree - 1;
    let dim_m = psi.module.dim;
    let sign = psi.algebra.field.integer(if k % 2 == 0 { 1 } else { -1 });
    Ok(LieCochain::from_fn(psi.algebra.clone(), c1.clone(), k, |w| {
        let mut f = linalg::zero_vec(psi.algebra.field, n * dim_m);
        for h in 0..n {
            let v = psi.eval_basis(h, w);
            for (t, x) in v.iter().enumerate() {
                f[h * dim_m + t] = &sign * x;
            }
        }
        f
    }))
}

// ----------------------------------------------------------------------
// Cup products
// ----------------------------------------------------------------------

/// A cup pairing of an A-module M and a Lie module N into an A-module S:
/// (m u n) o a = (m o a) u n + m u [n, a],  a o (m u n) = (a o m) u n.
pub struct CupPairing {
    pub left: Arc<RsModule>,
    pub right: Arc<LieModule>,
    pub target: Arc<RsModule>,
    map: Vec<Vec<Coeffs>>,
}

impl CupPairing {
    /// Validated constructor: `map[i][j]` is the image of `e_i u e_j` in S.
    pub fn new(
        left: Arc<RsModule>,
        right: Arc<LieModule>,
        target: Arc<RsModule>,
        map: Vec<Vec<Coeffs>>,
    ) -> Result<CupPairing> {
        if map.len() != left.dim || map.iter().any(|r| r.len() != right.dim) {
            return Err(Error::DimensionMismatch { expected: left.dim, got: map.len() });
        }
        let pairing = CupPairing { left, right, target, map };
        pairing.validate()?;
        Ok(pairing)
    }

    fn validate(&self) -> Result<()> {
        let n = self.left.algebra.dim;
        let field = self.left.algebra.field;
        for mi in 0..self.left.dim {
            let m = linalg::unit_vec(field, self.left.dim, mi);
            for ni in 0..self.right.dim {
                let nv = linalg::unit_vec(field, self.right.dim, ni);
                for a in 0..n {
                    // (m u n) o a = (m o a) u n + m u [n, a]
                    let lhs = self.target.right_basis(&self.pair(&m, &nv), a);
                    let mut rhs = self.pair(&self.left.right_basis(&m, a), &nv);
                    let bracket = linalg::neg_vec(&self.right.act_basis(a, &nv));
                    linalg::add_assign(&mut rhs, &self.pair(&m, &bracket));
                    if lhs != rhs {
                        return Err(Error::InvalidPairing(mi, ni));
                    }
                    // a o (m u n) = (a o m) u n
                    let lhs = self.target.left_basis(&self.pair(&m, &nv), a);
                    let rhs = self.pair(&self.left.left_basis(&m, a), &nv);
                    if lhs != rhs {
                        return Err(Error::InvalidPairing(mi, ni));
                    }
                }
            }
        }
        Ok(())
    }

    /// m u n by bilinear extension.
    pub fn pair(&self, m: &[Scalar], n: &[Scalar]) -> Coeffs {
        let mut out = linalg::zero_vec(self.target.algebra.field, self.target.dim);
        for (i, c) in m.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, d) in n.iter().enumerate() {
                if d.is_zero() {
                    continue;
                }
                linalg::add_scaled(&mut out, &(c * d), &self.map[i][j]);
            }
        }
        out
    }

    /// The scalar pairing M x K -> M, m u t = t m.
    pub fn scalar(m: &Arc<RsModule>) -> CupPairing {
        let field = m.algebra.field;
        let right = Arc::new(LieModule::trivial(m.algebra.clone(), 1));
        let map = (0..m.dim).map(|i| vec![linalg::unit_vec(field, m.dim, i)]).collect();
        CupPairing { left: m.clone(), right, target: m.clone(), map }
    }

    /// The bar pairing K x M -> M-bar, t u m = t m.
    pub fn bar_pairing(m: &Arc<RsModule>) -> CupPairing {
        let field = m.algebra.field;
        let left = Arc::new(crate::modcomod::trivial(&m.algebra));
        let right = Arc::new(LieModule::from_module(m));
        let target = Arc::new(crate::modcomod::bar(m));
        let map = vec![(0..m.dim).map(|j| linalg::unit_vec(field, m.dim, j)).collect()];
        CupPairing { left, right, target, map }
    }
}

/// psi u phi for psi in C^{k+1}_rsym(A,M), phi in C^l_lie(A,N):
/// (psi u phi)(a_0, a_1..a_{k+l}) = sum over (k,l)-shuffles sigma of
/// sgn(sigma) psi(a_0, a_sigma(1..k)) u phi(a_sigma(k+1..k+l)).
pub fn cup(psi: &Cochain, phi: &LieCochain, pairing: &CupPairing) -> Result<Cochain> {
    if psi.module.dim != pairing.left.dim {
        return Err(Error::WrongModule {
            expected: pairing.left.name.clone(),
            got: psi.module.name.clone(),
        });
    }
    if phi.module.dim != pairing.right.dim {
        return Err(Error::WrongModule {
            expected: pairing.right.name.clone(),
            got: phi.module.name.clone(),
        });
    }
    assert!(psi.degree >= 1);
    let k = psi.degree - 1;
    let l = phi.degree;
    let out_degree = k + l + 1;
    Ok(Cochain::from_fn(psi.algebra.clone(), pairing.target.clone(), out_degree, |h, w| {
        let mut acc = linalg::zero_vec(psi.algebra.field, pairing.target.dim);
        for subset in increasing_tuples(w.len(), k) {
            let mut in_subset = vec![false; w.len()];
            for &p in &subset {
                in_subset[p] = true;
            }
            let first: Vec<usize> = subset.iter().map(|&p| w[p]).collect();
            let second: Vec<usize> =
                (0..w.len()).filter(|p| !in_subset[*p]).map(|p| w[p]).collect();
            // sign of the block shuffle: inversions across the two blocks
            let mut inv = 0usize;
            for &p in &subset {
                inv += (0..p).filter(|q| !in_subset[*q]).count();
            }
            let lhs = psi.eval_basis(h, &first);
            let rhs = phi.eval_basis(&second);
            let v = pairing.pair(&lhs, &rhs);
            if inv % 2 == 0 {
                linalg::add_assign(&mut acc, &v);
            } else {
                linalg::sub_assign(&mut acc, &v);
            }
        }
        acc
    }))
}

// ----------------------------------------------------------------------
// Chains and the homology boundary
// ----------------------------------------------------------------------

/// Key of a chain table: m (x) a_head (x) wedge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChainKey {
    pub m: usize,
    pub head: usize,
    pub wedge: Vec<usize>,
}

enum ChainData {
    /// Degree 0: an element of M^{r.ass}.
    Value(Coeffs),
    Table(BTreeMap<ChainKey, Scalar>),
}

/// A right-symmetric chain: degree d >= 1 is an element of
/// M (x) A (x) Lambda^{d-1} A; degree 0 an element of M^{r.ass}.
/// The coefficient module is a comodule.
pub struct Chain {
    pub algebra: Arc<Algebra>,
    pub module: Arc<RsModule>,
    pub degree: usize,
    data: ChainData,
}

impl Clone for Chain {
    fn clone(&self) -> Self {
        Chain {
            algebra: self.algebra.clone(),
            module: self.module.clone(),
            degree: self.degree,
            data: match &self.data {
                ChainData::Value(v) => ChainData::Value(v.clone()),
                ChainData::Table(t) => ChainData::Table(t.clone()),
            },
        }
    }
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && match (&self.data, &other.data) {
                (ChainData::Value(a), ChainData::Value(b)) => a == b,
                (ChainData::Table(a), ChainData::Table(b)) => a == b,
                _ => false,
            }
    }
}

impl std::fmt::Debug for Chain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Chain(deg {} in {})", self.degree, self.module.name)
    }
}

/// Basis keys of the degree-d chain space, d >= 1.
pub fn chain_keys(algebra_dim: usize, module_dim: usize, degree: usize) -> Vec<ChainKey> {
    assert!(degree >= 1);
    let mut keys = Vec::new();
    for m in 0..module_dim {
        for head in 0..algebra_dim {
            for w in increasing_tuples(algebra_dim, degree - 1) {
                keys.push(ChainKey { m, head, wedge: w });
            }
        }
    }
    keys
}

impl Chain {
    pub fn zero(algebra: Arc<Algebra>, module: Arc<RsModule>, degree: usize) -> Chain {
        let data = if degree == 0 {
            ChainData::Value(linalg::zero_vec(algebra.field, module.dim))
        } else {
            ChainData::Table(BTreeMap::new())
        };
        Chain { algebra, module, degree, data }
    }

    pub fn set_term(&mut self, key: ChainKey, value: Scalar) {
        assert!(key.wedge.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(key.wedge.len() + 1, self.degree);
        match &mut self.data {
            ChainData::Table(t) => {
                if value.is_zero() {
                    t.remove(&key);
                } else {
                    t.insert(key, value);
                }
            }
            ChainData::Value(_) => panic!("set_term on degree-0 chain"),
        }
    }

    fn add_term(&mut self, m: usize, head: usize, wedge: &[usize], value: &Scalar) {
        if value.is_zero() {
            return;
        }
        let field = self.algebra.field;
        let mut w = wedge.to_vec();
        let Some(odd) = sort_wedge(&mut w) else { return };
        let v = if odd { value.neg() } else { value.clone() };
        let key = ChainKey { m, head, wedge: w };
        let ChainData::Table(t) = &mut self.data else { panic!("add_term on degree-0 chain") };
        let cur = t.remove(&key).unwrap_or_else(|| field.zero());
        let next = &cur + &v;
        if !next.is_zero() {
            t.insert(key, next);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChainKey, &Scalar)> {
        match &self.data {
            ChainData::Table(t) => t.iter(),
            ChainData::Value(_) => panic!("terms on degree-0 chain"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            ChainData::Value(v) => linalg::is_zero_vec(v),
            ChainData::Table(t) => t.is_empty(),
        }
    }

    /// The boundary operator; degree-1 chains map to zero in M^{r.ass}.
    ///
    /// d(m (x) a_0 (x) a_1^..^a_k) =
    ///   sum_i (-1)^{i+1} { m o a_0 (x) a_i (x) ..^a_i..
    ///                    - m (x) a_0 o a_i (x) ..^a_i..
    ///                    + a_i o m (x) a_0 (x) ..^a_i.. }
    /// + sum_{i<j} (-1)^{i+1} m (x) a_0 (x) ..^a_i..[a_i,a_j]@j.. .
    pub fn boundary(&self) -> Chain {
        assert!(self.degree >= 1, "boundary needs degree >= 1");
        let out_degree = self.degree - 1;
        let mut out = Chain::zero(self.algebra.clone(), self.module.clone(), out_degree);
        if self.degree == 1 {
            return out; // the sums are empty
        }
        let field = self.algebra.field;
        let unit_m = |t: usize| linalg::unit_vec(field, self.module.dim, t);
        let unit_a = |t: usize| linalg::unit_vec(field, self.algebra.dim, t);
        let ChainData::Table(table) = &self.data else { unreachable!() };
        for (key, coef) in table {
            let k = key.wedge.len();
            for i in 1..=k {
                let ai = key.wedge[i - 1];
                let rest: Vec<usize> = key
                    .wedge
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != i - 1)
                    .map(|(_, &t)| t)
                    .collect();
                let sign = if (i + 1) % 2 == 0 { coef.clone() } else { coef.neg() };
                // m o a_0 (x) a_i (x) rest
                for (t, c) in self.module.right_basis(&unit_m(key.m), key.head).iter().enumerate()
                {
                    out.add_term(t, ai, &rest, &(&sign * c));
                }
                // - m (x) a_0 o a_i (x) rest
                for (t, c) in self.algebra.circ_basis(key.head, ai).clone() {
                    out.add_term(key.m, t, &rest, &(&sign.neg() * &c));
                }
                // + a_i o m (x) a_0 (x) rest
                for (t, c) in self.module.left_basis(&unit_m(key.m), ai).iter().enumerate() {
                    out.add_term(t, key.head, &rest, &(&sign * c));
                }
                // + sum_{j>i} m (x) a_0 (x) rest with [a_i, a_j] in slot j
                for j in i + 1..=k {
                    let br = self.algebra.commutator(&unit_a(ai), &unit_a(key.wedge[j - 1]));
                    for (t, c) in br.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut w2 = rest.clone();
                        w2[j - 2] = t;
                        out.add_term(key.m, key.head, &w2, &(&sign * c));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Product;
    use crate::modcomod::{self, ActionKind};
    use crate::scalars::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w1() -> Arc<Algebra> {
        Algebra::w1m(5, 1).unwrap()
    }

    fn gl2() -> Arc<Algebra> {
        Algebra::gl(2, FieldSpec::Rationals).unwrap()
    }

    fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
        match field {
            FieldSpec::Rationals => field.integer(rng.gen_range(-4..=4)),
            FieldSpec::PrimeField(p) => field.integer(rng.gen_range(0..p) as i64),
        }
    }

    fn random_cochain(
        rng: &mut ChaCha8Rng,
        algebra: &Arc<Algebra>,
        module: &Arc<RsModule>,
        degree: usize,
    ) -> Cochain {
        let field = algebra.field;
        Cochain::from_fn(algebra.clone(), module.clone(), degree, |_, _| {
            (0..module.dim).map(|_| random_scalar(rng, field)).collect()
        })
    }

    fn random_lie_cochain(
        rng: &mut ChaCha8Rng,
        algebra: &Arc<Algebra>,
        module: &Arc<LieModule>,
        degree: usize,
    ) -> LieCochain {
        let field = algebra.field;
        LieCochain::from_fn(algebra.clone(), module.clone(), degree, |_| {
            (0..module.dim).map(|_| random_scalar(rng, field)).collect()
        })
    }

    #[test]
    fn evaluation_alternation() {
        let a = w1();
        let m = Arc::new(modcomod::regular(&a));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_cochain(&mut rng, &a, &m, 3);
        for h in 0..5 {
            assert!(linalg::is_zero_vec(&psi.eval_basis(h, &[2, 2])));
            let v1 = psi.eval_basis(h, &[1, 3]);
            let v2 = psi.eval_basis(h, &[3, 1]);
            assert_eq!(v1, linalg::neg_vec(&v2));
        }
    }

    #[test]
    fn face_map_degree_one_specialization() {
        // D_1 psi(a0, a1) = a0 o psi(a1) - psi(a0 o a1) + psi(a0) o a1
        let a = w1();
        let m = Arc::new(modcomod::regular(&a));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random_cochain(&mut rng, &a, &m, 1);
        let d1 = psi.face_map(1);
        let field = a.field;
        let unit = |t: usize| linalg::unit_vec(field, a.dim, t);
        for h in 0..a.dim {
            for x in 0..a.dim {
                let mut expect = m.left_basis(&psi.eval_basis(x, &[]), h);
                let hx = a.circ_dense(&unit(h), &unit(x));
                linalg::sub_assign(&mut expect, &psi.eval(Arg::Elem(&hx), &[]));
                linalg::add_assign(&mut expect, &m.right_basis(&psi.eval_basis(h, &[]), x));
                assert_eq!(d1.eval_basis(h, &[x]), expect);
            }
        }
        // i > k rule
        assert!(psi.face_map(2).is_zero());
    }

    /// Individual face maps do not preserve alternation, so the
    /// pre-simplicial identity is a statement about raw multilinear
    /// cochains; the alternating sum d_rsym does land in alternating
    /// cochains again.
    #[test]
    fn presimplicial_identity_spot() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for a in [w1(), gl2()] {
            let module = Arc::new(modcomod::regular(&a));
            for degree in 1..=2 {
                let psi = MultiCochain::from_cochain(&random_cochain(&mut rng, &a, &module, degree));
                for i in 1..=degree + 1 {
                    for j in i + 1..=degree + 2 {
                        let lhs = psi.face_map(i).face_map(j);
                        let rhs = psi.face_map(j - 1).face_map(i);
                        assert_eq!(lhs, rhs, "D_{j} D_{i} on degree {degree}");
                    }
                }
                assert!(psi.d_rsym().is_alternating());
            }
        }
    }

    /// The table-level d_rsym is the restriction of the raw one.
    #[test]
    fn table_d_matches_raw_d() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for a in [w1(), gl2()] {
            let module = Arc::new(modcomod::regular(&a));
            for degree in 1..=3 {
                let psi = random_cochain(&mut rng, &a, &module, degree);
                let raw = MultiCochain::from_cochain(&psi).d_rsym().to_cochain().unwrap();
                assert_eq!(raw, psi.d_rsym(), "degree {degree}");
            }
        }
    }

    #[test]
    fn d_squared_zero_spot() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for a in [w1(), gl2()] {
            let module = Arc::new(modcomod::regular(&a));
            for degree in 1..=3 {
                let psi = random_cochain(&mut rng, &a, &module, degree);
                assert!(psi.d_rsym().d_rsym().is_zero(), "d^2 on degree {degree}");
            }
        }
    }

    #[test]
    fn degree_zero_d_and_standard_cocycle_value() {
        // over W1, m = e2: d(dm)(e0, e0) = m o (e0 o e0) - (m o e0) o e0 = 4 e2
        let a = w1();
        let m = Arc::new(modcomod::regular(&a));
        let e2 = linalg::unit_vec(a.field, a.dim, 3);
        let omega = {
            let m2 = m.clone();
            let e2c = e2.clone();
            Cochain::from_fn(a.clone(), m.clone(), 1, move |h, _| {
                let mut v = m2.left_basis(&e2c, h);
                linalg::sub_assign(&mut v, &m2.right_basis(&e2c, h));
                v
            })
        };
        let d = omega.d_rsym();
        let got = d.eval_basis(1, &[1]); // (e0, e0)
        let e0 = linalg::unit_vec(a.field, a.dim, 1);
        let mut expect = m.right_act(&e2, &a.circ_dense(&e0, &e0));
        linalg::sub_assign(&mut expect, &m.right_act(&m.right_act(&e2, &e0), &e0));
        assert_eq!(got, expect);
        assert!(!linalg::is_zero_vec(&got));
        assert_eq!(got[3], a.field.integer(4));
    }

    #[test]
    fn inner_derivation_is_cocycle_on_gl2() {
        let a = gl2();
        let m = Arc::new(modcomod::regular(&a));
        let x = linalg::unit_vec(a.field, a.dim, 1); // E12
        let omega = Cochain::from_fn(a.clone(), m.clone(), 1, |h, _| {
            let unit = linalg::unit_vec(a.field, a.dim, h);
            a.commutator(&unit, &x)
        });
        assert!(omega.is_cocycle());
    }

    #[test]
    fn degree_zero_cochain_requires_l_ass() {
        let a = w1();
        let m = Arc::new(modcomod::regular(&a));
        let e0 = linalg::unit_vec(a.field, a.dim, 1);
        let e2 = linalg::unit_vec(a.field, a.dim, 3);
        assert!(Cochain::constant(a.clone(), m.clone(), e0.clone()).is_ok());
        assert!(Cochain::constant(a.clone(), m.clone(), e2).is_err());
        let c = Cochain::constant(a.clone(), m, e0).unwrap();
        assert!(c.d_rsym().d_rsym().is_zero());
    }

    #[test]
    fn interior_and_cartan_spot() {
        let a = w1();
        let module = Arc::new(modcomod::regular(&a));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Coeffs = (0..a.dim).map(|_| random_scalar(&mut rng, a.field)).collect();
        let y: Coeffs = (0..a.dim).map(|_| random_scalar(&mut rng, a.field)).collect();

        let psi1 = random_cochain(&mut rng, &a, &module, 1);
        assert!(psi1.interior(&x).is_zero());

        for degree in 2..=3 {
            let psi = random_cochain(&mut rng, &a, &module, degree);
            let raw = MultiCochain::from_cochain(&psi);
            // Cartan (i): i(x) D_l = D_{l-1} i(x) for l > 1, at the raw level
            for l in 2..=degree {
                assert_eq!(raw.face_map(l).interior(&x), raw.interior(&x).face_map(l - 1));
            }
            // Cartan (ii): i(x) D_1 = psi o x, at the raw level
            assert_eq!(raw.face_map(1).interior(&x), raw.rho_rsym(&x));
            // Cartan (v): d i(x) + i(x) d = -rho_lie(x) = psi o x
            let lhs = psi.interior(&x).d_rsym().add(&psi.d_rsym().interior(&x));
            assert_eq!(lhs, psi.rho_rsym(&x).unwrap());
            // and its raw version agrees
            let raw_lhs = raw.interior(&x).d_rsym().add(&raw.d_rsym().interior(&x));
            assert_eq!(raw_lhs, raw.rho_rsym(&x));
            // Cartan (iii): rho_lie[x,y] = [rho_lie(x), rho_lie(y)]
            let comm = a.commutator(&x, &y);
            let lhs = psi.rho_lie(&comm).unwrap();
            let rhs = psi
                .rho_lie(&y)
                .unwrap()
                .rho_lie(&x)
                .unwrap()
                .sub(&psi.rho_lie(&x).unwrap().rho_lie(&y).unwrap());
            assert_eq!(lhs, rhs);
            // Cartan (iv): [i(x), rho_lie(y)] = -i([x,y])
            let lhs =
                psi.rho_lie(&y).unwrap().interior(&x).sub(&psi.interior(&x).rho_lie(&y).unwrap());
            let rhs = psi.interior(&comm).neg();
            assert_eq!(lhs, rhs);
        }

        // repeated interior slot kills degree >= 3 cochains
        let psi = random_cochain(&mut rng, &a, &module, 3);
        assert!(psi.interior(&x).interior(&x).is_zero());
        assert!(matches!(
            Cochain::zero(a.clone(), module.clone(), 0).rho_rsym(&x),
            Err(Error::DegreeZero)
        ));
    }

    #[test]
    fn antisymmetrize_degree_two() {
        let a = w1();
        let module = Arc::new(modcomod::regular(&a));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let psi = random_cochain(&mut rng, &a, &module, 2);
        let f = psi.antisymmetrize_f();
        for w in increasing_tuples(a.dim, 2) {
            let mut expect = psi.eval_basis(w[0], &[w[1]]);
            linalg::sub_assign(&mut expect, &psi.eval_basis(w[1], &[w[0]]));
            assert_eq!(f.eval_basis(&w), expect);
        }
        // the symmetrization of any 2-cochain dies under f
        let symm = Cochain::from_fn(a.clone(), module.clone(), 2, |h, w| {
            let mut v = psi.eval_basis(h, w);
            linalg::add_assign(&mut v, &psi.eval_basis(w[0], &[h]));
            v
        });
        assert!(symm.antisymmetrize_f().is_zero());
    }

    /// The standard representation on Lie cochains:
    /// (rho(x) phi)(a_1..a_k) = [x, phi(..)] - sum_i phi(.., [x,a_i], ..).
    fn lie_rho(phi: &LieCochain, x: &[Scalar]) -> LieCochain {
        let a = phi.algebra.clone();
        let module = phi.module.clone();
        let field = a.field;
        let unit = |t: usize| linalg::unit_vec(field, a.dim, t);
        LieCochain::from_fn(a.clone(), module.clone(), phi.degree, |w| {
            let mut acc = module.act(x, &phi.eval_basis(w));
            for i in 0..w.len() {
                let br = a.commutator(x, &unit(w[i]));
                let mut args: Vec<Arg> = w.iter().map(|&t| Arg::Basis(t)).collect();
                args[i] = Arg::Elem(&br);
                linalg::sub_assign(&mut acc, &phi.eval(&args));
            }
            acc
        })
    }

    #[test]
    fn chain_maps_spot() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in [w1(), gl2()] {
            let module = Arc::new(modcomod::regular(&a));
            let c1 = Arc::new(modcomod::c1_module(&module).unwrap());
            let c1_lie = Arc::new(LieModule::from_module(&c1));
            for degree in 1..=2 {
                // f d_rsym = d_lie f
                let psi = random_cochain(&mut rng, &a, &module, degree);
                assert_eq!(
                    psi.d_rsym().antisymmetrize_f(),
                    psi.antisymmetrize_f().d_lie(),
                    "f chain map, degree {degree}"
                );
            }
            for k in 0..=2usize {
                // F d_lie = d_rsym F with values in C1(A, M)
                let phi = random_lie_cochain(&mut rng, &a, &c1_lie, k);
                let lhs = lift_f(&phi.d_lie(), &module).unwrap();
                let rhs = lift_f(&phi, &module).unwrap().d_rsym();
                assert_eq!(lhs, rhs, "F chain map at k = {k}");
                // F is invertible
                let back = lift_f_inverse(&lift_f(&phi, &module).unwrap(), &c1_lie).unwrap();
                assert_eq!(back, phi);
                // F intertwines the rho actions
                if k >= 1 {
                    let x: Coeffs =
                        (0..a.dim).map(|_| random_scalar(&mut rng, a.field)).collect();
                    let lhs = lift_f(&lie_rho(&phi, &x), &module).unwrap();
                    let rhs = lift_f(&phi, &module).unwrap().rho_lie(&x).unwrap();
                    assert_eq!(lhs, rhs, "F rho intertwine at k = {k}");
                }
            }
        }
    }

    #[test]
    fn d_lie_basics() {
        let a = gl2();
        // trace is a Lie 1-cocycle with trivial coefficients
        let triv = Arc::new(LieModule::trivial(a.clone(), 1));
        let mut trace = LieCochain::zero(a.clone(), triv.clone(), 1);
        trace.set_term(vec![0], vec![a.field.one()]);
        trace.set_term(vec![3], vec![a.field.one()]);
        assert!(trace.is_cocycle());
        // constant over trivial module
        let c = LieCochain::constant(a.clone(), triv, vec![a.field.one()]);
        assert!(c.d_lie().is_zero());
        // d_lie^2 = 0 on random cochains
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let w1a = w1();
        let module = Arc::new(LieModule::from_module(&modcomod::regular(&w1a)));
        for degree in 0..=2 {
            let phi = random_lie_cochain(&mut rng, &w1a, &module, degree);
            assert!(phi.d_lie().d_lie().is_zero(), "d_lie^2 at degree {degree}");
        }
    }

    #[test]
    fn cup_with_scalar_pairing() {
        let a = w1();
        let module = Arc::new(modcomod::regular(&a));
        let pairing = CupPairing::scalar(&module);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // l = 0: psi u t is psi scaled pointwise
        let psi = random_cochain(&mut rng, &a, &module, 2);
        let lambda = a.field.integer(3);
        let phi = LieCochain::constant(a.clone(), pairing.right.clone(), vec![lambda.clone()]);
        assert_eq!(cup(&psi, &phi, &pairing).unwrap(), psi.scale(&lambda));
        // Leibniz: d(psi u phi) = d psi u phi - (-1)^k psi u d phi
        for (deg_psi, deg_phi) in [(1, 1), (2, 1), (1, 2)] {
            let psi = random_cochain(&mut rng, &a, &module, deg_psi);
            let phi = random_lie_cochain(&mut rng, &a, &pairing.right, deg_phi);
            let k = deg_psi - 1;
            let lhs = cup(&psi, &phi, &pairing).unwrap().d_rsym();
            let mut rhs = cup(&psi.d_rsym(), &phi, &pairing).unwrap();
            let term = cup(&psi, &phi.d_lie(), &pairing).unwrap();
            rhs = if k % 2 == 0 { rhs.sub(&term) } else { rhs.add(&term) };
            assert_eq!(lhs, rhs, "cup Leibniz at ({deg_psi}, {deg_phi})");
        }
    }

    #[test]
    fn bar_pairing_and_validation() {
        let a = w1();
        let module = Arc::new(modcomod::regular(&a));
        assert!(CupPairing::bar_pairing(&module).validate().is_ok());
        assert!(CupPairing::scalar(&module).validate().is_ok());
        // a mismatched pairing is rejected: U x K -> A with the index map
        let u = Arc::new(modcomod::functions_u(&a).unwrap());
        let bad = CupPairing::new(
            u.clone(),
            Arc::new(LieModule::trivial(a.clone(), 1)),
            module.clone(),
            (0..u.dim).map(|i| vec![linalg::unit_vec(a.field, module.dim, i)]).collect(),
        );
        assert!(matches!(bad, Err(Error::InvalidPairing(..))));
    }

    #[test]
    fn t_operator_formula_and_commutation() {
        let a = w1();
        let module = Arc::new(modcomod::regular(&a));
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let psi = random_cochain(&mut rng, &a, &module, 1);
        let t = psi.t_operator().unwrap();
        // T psi(a0, a1) = (-1)^{1+1} a1 * psi(a0)
        let unit = |i: usize| linalg::unit_vec(a.field, a.dim, i);
        for h in 0..a.dim {
            for x in 0..a.dim {
                let expect = a.multiply(&unit(x), &psi.eval_basis(h, &[]), Product::Ast).unwrap();
                assert_eq!(t.eval_basis(h, &[x]), expect);
            }
        }
        // T d = d T
        for degree in 1..=2 {
            let psi = random_cochain(&mut rng, &a, &module, degree);
            assert_eq!(psi.d_rsym().t_operator().unwrap(), psi.t_operator().unwrap().d_rsym());
        }
        // no ast on gl2
        let g = gl2();
        let gm = Arc::new(modcomod::regular(&g));
        let psi = random_cochain(&mut rng, &g, &gm, 1);
        assert!(matches!(psi.t_operator(), Err(Error::NoSecondProduct)));
    }

    #[test]
    fn boundary_squares_to_zero_spot() {
        let a = w1();
        let m = Arc::new(modcomod::coregular(&a).unwrap());
        assert_eq!(m.kind, ActionKind::Comodule);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for degree in 2..=3 {
            let mut c = Chain::zero(a.clone(), m.clone(), degree);
            for key in chain_keys(a.dim, m.dim, degree) {
                if rng.gen_bool(0.3) {
                    c.set_term(key, random_scalar(&mut rng, a.field));
                }
            }
            assert!(c.boundary().boundary().is_zero(), "boundary^2 at degree {degree}");
        }
        // degree 1 chains map to zero
        let mut c = Chain::zero(a.clone(), m.clone(), 1);
        c.set_term(ChainKey { m: 2, head: 3, wedge: vec![] }, a.field.one());
        assert!(c.boundary().is_zero());
    }
}
