//! Root data: a root system together with a character lattice sandwiched
//! between the root and weight lattices, plus central directions.
//!
//! Ambient coordinates of a character vector `x` are `(<alpha_1^vee, x>, ...,
//! <alpha_r^vee, x>, <z_1, x>, ..., <z_c, x>)` where the `z_j` are a fixed
//! basis of central cocharacters. In these coordinates the root lattice is
//! spanned by the columns of the Cartan matrix, the weight lattice is `Z^r`,
//! and the Weyl group acts on the first `r` coordinates only.
//!
//! The character lattice is stored by a basis (rows of `basis`). Character
//! points and lattice elements are reported in coordinates with respect to
//! that basis, so reduction modulo the character lattice is reduction of
//! every coordinate modulo 1.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abelian::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::linalg::{hermite_basis, parse_rat, rat, QMatrix, Rat};
use crate::root_system::{build_root_system, CartanType, RootSystem};
use crate::weyl::WeylElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// Root lattice `Q` (adjoint type).
    Root,
    /// Weight lattice `P` (simply connected type).
    Weight,
    /// Explicit generators in ambient coordinates. Rows of length `r` are
    /// padded with the standard central directions; rows of length `r + c`
    /// are taken as they are.
    Intermediate(Vec<Vec<Rat>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub central_free_rank: usize,
}

impl LatticeSpec {
    pub fn root() -> Self {
        LatticeSpec { kind: LatticeKind::Root, central_free_rank: 0 }
    }

    pub fn weight() -> Self {
        LatticeSpec { kind: LatticeKind::Weight, central_free_rank: 0 }
    }

    pub fn with_central_rank(mut self, c: usize) -> Self {
        self.central_free_rank = c;
        self
    }

    pub fn intermediate(rows: &[Vec<i64>]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        LatticeSpec { kind: LatticeKind::Intermediate(rows), central_free_rank: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct RootDatum {
    root_system: Arc<RootSystem>,
    spec: LatticeSpec,
    /// Rows: basis of the character lattice in ambient coordinates.
    basis: Vec<Vec<i64>>,
    /// `(B^T)^{-1}`: ambient column vector -> basis coordinates.
    to_basis: QMatrix,
    /// `to_basis` as an integer matrix over a common denominator.
    to_basis_num: Vec<i64>,
    to_basis_den: i64,
    /// Rows: basis of the cocharacter lattice as functionals in ambient
    /// coordinates (dual basis of `basis`).
    cochar_basis: QMatrix,
    torsion: FiniteAbelianGroup,
    /// Integer action of each simple reflection on basis coordinates.
    simple_actions: Vec<Vec<i64>>,
    /// Per root: the coroot as an integer functional on basis coordinates.
    coroot_functionals: Vec<Vec<i64>>,
    /// Per root: the root in basis coordinates.
    roots_in_basis: Vec<Vec<i64>>,
    /// Representatives of `L_ss / Q` in weight coordinates, where
    /// `L_ss` is the character lattice intersected with the semisimple span.
    semisimple_classes: Vec<Vec<i64>>,
}

impl PartialEq for RootDatum {
    fn eq(&self, other: &Self) -> bool {
        *self.root_system == *other.root_system
            && self.basis == other.basis
            && self.torsion == other.torsion
    }
}

impl Eq for RootDatum {}

/// Builds a root datum from a root system and a lattice choice.
pub fn build_root_datum(rs: RootSystem, spec: LatticeSpec) -> Result<RootDatum> {
    RootDatum::with_torsion(Arc::new(rs), spec, FiniteAbelianGroup::trivial())
}

impl RootDatum {
    pub fn with_torsion(
        rs: Arc<RootSystem>,
        spec: LatticeSpec,
        torsion: FiniteAbelianGroup,
    ) -> Result<RootDatum> {
        let r = rs.rank();
        let c = spec.central_free_rank;
        let n = r + c;
        let a = rs.cartan_matrix();
        let basis: Vec<Vec<i64>> = match &spec.kind {
            LatticeKind::Weight => identity_rows(n),
            LatticeKind::Root => {
                let mut rows: Vec<Vec<i64>> = (0..r)
                    .map(|j| {
                        let mut v: Vec<i64> = (0..r).map(|i| a[i][j]).collect();
                        v.resize(n, 0);
                        v
                    })
                    .collect();
                rows.extend(identity_rows(n).into_iter().skip(r));
                rows
            }
            LatticeKind::Intermediate(gens) => intermediate_basis(gens, r, c)?,
        };
        let bt = QMatrix::from_int_rows(&basis).transpose();
        let to_basis = bt
            .inverse()
            .ok_or_else(|| Error::Lattice("generators are not of full rank".into()))?;

        // roots must lie in the lattice
        let mut roots_in_basis = Vec::with_capacity(rs.num_roots());
        for k in 0..rs.num_roots() {
            let mut amb: Vec<Rat> = rs.root_in_weight_coords(k).into_iter().map(rat).collect();
            amb.resize(n, Rat::zero());
            let p = to_basis.apply(&amb);
            if !p.iter().all(|x| x.denom().is_one()) {
                return Err(Error::Lattice(format!(
                    "root {:?} is not in the character lattice (lattice does not contain Q)",
                    rs.root(k)
                )));
            }
            roots_in_basis.push(p.iter().map(|x| x.numer().try_into().unwrap()).collect());
        }

        let cochar_basis = to_basis.transpose();
        let to_basis_den = crate::linalg::common_denominator(
            &to_basis.to_rows().concat(),
        )?;
        let to_basis_num = to_basis
            .to_rows()
            .concat()
            .iter()
            .map(|x| {
                num_traits::ToPrimitive::to_i64(&(x * rat(to_basis_den)).to_integer())
                    .ok_or_else(|| Error::Overflow("lattice basis".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let simple_actions = (0..r)
            .map(|i| {
                let mut t = QMatrix::identity(n);
                for k in 0..r {
                    t[(k, i)] -= rat(a[k][i]);
                }
                let kmat = to_basis.mul(&t).mul(&bt);
                kmat.to_i64_rows()
                    .map(|rows| rows.concat())
                    .map_err(|_| Error::Lattice("lattice is not Weyl-stable".into()))
            })
            .collect::<Result<Vec<_>>>()?;

        let coroot_functionals = (0..rs.num_roots())
            .map(|k| {
                let cr = rs.coroot(k);
                basis.iter().map(|row| (0..r).map(|i| row[i] * cr[i]).sum()).collect()
            })
            .collect();

        let semisimple_classes = rs
            .fundamental_group_representatives()
            .into_iter()
            .filter(|rep| {
                let mut amb: Vec<Rat> = rep.iter().map(|&x| rat(x)).collect();
                amb.resize(n, Rat::zero());
                to_basis.apply(&amb).iter().all(|x| x.denom().is_one())
            })
            .collect();

        let datum = RootDatum {
            root_system: rs,
            spec,
            basis,
            to_basis,
            to_basis_num,
            to_basis_den,
            cochar_basis,
            torsion,
            simple_actions,
            coroot_functionals,
            roots_in_basis,
            semisimple_classes,
        };
        if !datum.torsion.is_trivial() && datum.is_simply_connected_semisimple() {
            return Err(Error::Lattice(
                "a simply connected semisimple datum has no torsion component".into(),
            ));
        }
        Ok(datum)
    }

    /// Split `GL_n` model: character lattice `Z^n` with basis `e_1..e_n`,
    /// roots `e_i - e_j`, one central direction (the scalar cocharacter).
    pub fn gl(n: usize) -> Result<RootDatum> {
        if n == 0 {
            return Err(Error::Lattice("GL_0 is not supported".into()));
        }
        let rs = if n == 1 {
            RootSystem::empty()
        } else {
            build_root_system(CartanType::new(crate::root_system::Series::A, n - 1)?)
        };
        let rows: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut v: Vec<Rat> = (0..n - 1)
                    .map(|j| {
                        if i == j {
                            Rat::one()
                        } else if i == j + 1 {
                            -Rat::one()
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect();
                v.push(Rat::one());
                v
            })
            .collect();
        build_root_datum(rs, LatticeSpec { kind: LatticeKind::Intermediate(rows), central_free_rank: 1 })
    }

    /// Rank-0 datum with only a Kottwitz torsion component.
    pub fn anisotropic(torsion: FiniteAbelianGroup) -> RootDatum {
        RootDatum::with_torsion(Arc::new(RootSystem::empty()), LatticeSpec::weight(), torsion)
            .expect("the rank-0 datum is always valid")
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn root_system_arc(&self) -> Arc<RootSystem> {
        self.root_system.clone()
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.root_system.rank()
    }

    pub fn central_rank(&self) -> usize {
        self.spec.central_free_rank
    }

    /// Rank of the character lattice (`r + c`).
    pub fn dim(&self) -> usize {
        self.rank() + self.central_rank()
    }

    pub fn torsion(&self) -> &FiniteAbelianGroup {
        &self.torsion
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// Basis of the cocharacter lattice, as rational functionals in ambient
    /// coordinates (rows).
    pub fn cochar_basis(&self) -> Vec<Vec<Rat>> {
        self.cochar_basis.to_rows()
    }

    pub fn is_simply_connected_semisimple(&self) -> bool {
        self.rank() > 0 && self.central_rank() == 0 && self.basis == identity_rows(self.dim())
    }

    pub fn is_adjoint_semisimple(&self) -> bool {
        self.central_rank() == 0 && self.semisimple_classes.len() == 1
    }

    pub(crate) fn simple_action(&self, i: usize) -> &[i64] {
        &self.simple_actions[i]
    }

    pub(crate) fn coroot_functional(&self, k: usize) -> &[i64] {
        &self.coroot_functionals[k]
    }

    pub(crate) fn root_in_basis(&self, k: usize) -> &[i64] {
        &self.roots_in_basis[k]
    }

    pub(crate) fn semisimple_classes(&self) -> &[Vec<i64>] {
        &self.semisimple_classes
    }

    /// Basis coordinates -> ambient coordinates.
    pub fn to_ambient(&self, p: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        (0..n)
            .map(|j| p.iter().zip(&self.basis).map(|(x, row)| x * rat(row[j])).sum())
            .collect()
    }

    /// Ambient coordinates -> basis coordinates.
    pub fn from_ambient(&self, v: &[Rat]) -> Vec<Rat> {
        self.to_basis.apply(v)
    }

    /// Weight-coordinate projection `(<alpha_i^vee, x>)_i` of a point in basis coordinates.
    pub fn semisimple_part(&self, p: &[Rat]) -> Vec<Rat> {
        let mut v = self.to_ambient(p);
        v.truncate(self.rank());
        v
    }

    /// Is the ambient vector in the character lattice?
    pub fn contains_ambient(&self, v: &[Rat]) -> bool {
        self.from_ambient(v).iter().all(|x| x.denom().is_one())
    }

    /// Integer action of `w` on basis coordinates (row-major `n x n`).
    pub fn basis_action(&self, w: &WeylElement) -> Vec<i64> {
        let n = self.dim();
        let mut k = identity_flat(n);
        for &i in w.word() {
            k = flat_mul(n, &k, &self.simple_actions[i]);
        }
        k
    }

    /// Integer action on basis coordinates of the Weyl element with the given
    /// weight matrix (row-major `r x r`).
    pub fn basis_action_from_weight_matrix(&self, m: &[i32]) -> Vec<i64> {
        let n = self.dim();
        let r = self.rank();
        // T * B^T, with T = diag(m, I)
        let mut tb = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                tb[i * n + j] = if i < r {
                    (0..r).map(|k| m[i * r + k] as i64 * self.basis[j][k]).sum()
                } else {
                    self.basis[j][i]
                };
            }
        }
        let mut out = flat_mul(n, &self.to_basis_num, &tb);
        for x in &mut out {
            debug_assert_eq!(*x % self.to_basis_den, 0);
            *x /= self.to_basis_den;
        }
        out
    }

    /// `<alpha^vee, x>` for root `k` and a point in basis coordinates.
    pub fn coroot_pairing(&self, k: usize, p: &[Rat]) -> Rat {
        self.coroot_functionals[k].iter().zip(p).map(|(&u, x)| x * rat(u)).sum()
    }

    pub fn to_doc(&self) -> Value {
        let ty = type_string(&self.root_system);
        let lattice = match &self.spec.kind {
            LatticeKind::Root => json!("root"),
            LatticeKind::Weight => json!("weight"),
            LatticeKind::Intermediate(_) => json!({ "generators": self.basis }),
        };
        let mut doc = json!({
            "type": ty,
            "rank": self.rank(),
            "char_lattice": lattice,
            "central_free_rank": self.central_rank(),
        });
        if !self.torsion.is_trivial() {
            doc["torsion"] = json!(self.torsion.invariant_factors());
        }
        doc
    }

    pub fn from_doc(doc: &Value) -> Result<RootDatum> {
        let d: RootDatumDoc = serde_json::from_value(doc.clone())
            .map_err(|e| Error::Parse(format!("root datum document: {e}")))?;
        d.build()
    }
}

/// Short label for the type: `"A2"`, `"A1xB2"`, or `"anisotropic"`.
pub fn type_string(rs: &RootSystem) -> String {
    if rs.components().is_empty() {
        return "anisotropic".into();
    }
    rs.components().iter().map(ToString::to_string).collect::<Vec<_>>().join("x")
}

/// Dual of a full-rank lattice (rows = generators) under the bilinear form
/// with Gram matrix `pairing`: `{ l : l * pairing * m^T in Z for all m }`.
/// Returns a basis (rows).
pub fn dual_lattice(generators: &[Vec<Rat>], pairing: &QMatrix) -> Result<Vec<Vec<Rat>>> {
    let n = pairing.rows;
    if pairing.inverse().is_none() {
        return Err(Error::Lattice("degenerate pairing".into()));
    }
    let basis = rational_basis(generators, n)?;
    let l = QMatrix::from_rows(&basis);
    let d = pairing
        .mul(&l.transpose())
        .inverse()
        .ok_or_else(|| Error::Lattice("generators are not of full rank".into()))?;
    Ok(d.to_rows())
}

/// Canonical (Hermite) basis of the lattice spanned by rational generators.
pub fn rational_basis(generators: &[Vec<Rat>], n: usize) -> Result<Vec<Vec<Rat>>> {
    if generators.iter().any(|g| g.len() != n) {
        return Err(Error::Lattice(format!("generators must have length {n}")));
    }
    let mut m = num_bigint::BigInt::one();
    for g in generators {
        for x in g {
            m = num_integer::Integer::lcm(&m, x.denom());
        }
    }
    let scale = Rat::from_integer(m);
    let ints: Vec<Vec<i64>> = generators
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| {
                    let y = x * &scale;
                    num_traits::ToPrimitive::to_i64(y.numer())
                        .ok_or_else(|| Error::Overflow("lattice generator".into()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let h = hermite_basis(&ints);
    if h.len() != n {
        return Err(Error::Lattice("generators are not of full rank".into()));
    }
    Ok(h.iter().map(|row| row.iter().map(|&x| rat(x) / &scale).collect()).collect())
}

fn intermediate_basis(gens: &[Vec<Rat>], r: usize, c: usize) -> Result<Vec<Vec<i64>>> {
    let n = r + c;
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let padded = gens.iter().all(|g| g.len() == r) && c > 0;
    for g in gens {
        if g.len() != n && !(g.len() == r && padded) {
            return Err(Error::Lattice(format!(
                "generator of length {} (expected {r} or {n})",
                g.len()
            )));
        }
        let mut v = g.clone();
        v.resize(n, Rat::zero());
        rows.push(v);
    }
    if padded {
        for j in r..n {
            let mut v = vec![Rat::zero(); n];
            v[j] = Rat::one();
            rows.push(v);
        }
    }
    if rows.iter().flatten().any(|x| !x.denom().is_one()) {
        return Err(Error::Lattice(
            "generators lie outside the weight lattice (non-integral coordinates)".into(),
        ));
    }
    let ints: Vec<Vec<i64>> = rows
        .iter()
        .map(|row| row.iter().map(|x| num_traits::ToPrimitive::to_i64(x.numer()).unwrap()).collect())
        .collect();
    // keep a user-supplied square basis as is, so point coordinates follow it
    if ints.len() == n && QMatrix::from_int_rows(&ints).inverse().is_some() {
        return Ok(ints);
    }
    let h = hermite_basis(&ints);
    if h.len() != n {
        return Err(Error::Lattice("generators are not of full rank".into()));
    }
    Ok(h)
}

fn identity_rows(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect()
}

pub(crate) fn identity_flat(n: usize) -> Vec<i64> {
    identity_rows(n).concat()
}

pub(crate) fn flat_mul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(deny_unknown_fields)]
struct RootDatumDoc {
    #[serde(rename = "type")]
    ty: String,
    rank: Option<usize>,
    #[serde(default)]
    char_lattice: Option<LatticeDoc>,
    #[serde(default)]
    central_free_rank: usize,
    #[serde(default)]
    torsion: Vec<u64>,
}

#[derive(Deserialize, Serialize, Debug)]
#[serde(untagged)]
enum LatticeDoc {
    Named(String),
    Generators { generators: Vec<Vec<Value>> },
}

impl RootDatumDoc {
    fn build(&self) -> Result<RootDatum> {
        let torsion = FiniteAbelianGroup::new(self.torsion.clone())?;
        let ty = self.ty.trim();
        if ty.eq_ignore_ascii_case("GL") {
            let n = self.rank.ok_or_else(|| Error::Parse("GL requires a rank".into()))?;
            let d = RootDatum::gl(n)?;
            return RootDatum::with_torsion(d.root_system_arc(), d.spec().clone(), torsion);
        }
        let rs = parse_root_system(ty, self.rank)?;
        let kind = match &self.char_lattice {
            None => LatticeKind::Weight,
            Some(LatticeDoc::Named(s)) => match s.as_str() {
                "weight" | "sc" | "P" => LatticeKind::Weight,
                "root" | "ad" | "Q" => LatticeKind::Root,
                other => return Err(Error::Parse(format!("unknown lattice {other:?}"))),
            },
            Some(LatticeDoc::Generators { generators }) => LatticeKind::Intermediate(
                generators
                    .iter()
                    .map(|row| row.iter().map(json_rat).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?,
            ),
        };
        RootDatum::with_torsion(
            Arc::new(rs),
            LatticeSpec { kind, central_free_rank: self.central_free_rank },
            torsion,
        )
    }
}

/// Accepts `"A"` with an explicit rank, `"A3"`, products `"A1xB2"`, and
/// `"anisotropic"` (rank 0).
pub fn parse_root_system(ty: &str, rank: Option<usize>) -> Result<RootSystem> {
    if ty.eq_ignore_ascii_case("anisotropic") || ty == "0" {
        if rank.unwrap_or(0) != 0 {
            return Err(Error::Parse("anisotropic type has rank 0".into()));
        }
        return Ok(RootSystem::empty());
    }
    if ty.len() == 1 {
        let series = crate::root_system::Series::from_letter(ty.chars().next().unwrap())
            .ok_or_else(|| Error::Parse(format!("unknown Cartan type {ty:?}")))?;
        let rank = rank.ok_or_else(|| Error::Parse(format!("type {ty} requires a rank")))?;
        return Ok(build_root_system(CartanType::new(series, rank)?));
    }
    let comps = ty
        .split(['x', '+'])
        .map(str::parse::<CartanType>)
        .collect::<Result<Vec<_>>>()?;
    let total: usize = comps.iter().map(CartanType::rank).sum();
    if let Some(r) = rank {
        if r != total {
            return Err(Error::Parse(format!("type {ty} has rank {total}, not {r}")));
        }
    }
    Ok(RootSystem::product(&comps))
}

pub(crate) fn json_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(rat)
            .ok_or_else(|| Error::Parse(format!("expected an integer, got {n}"))),
        Value::String(s) => parse_rat(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    fn a1() -> RootSystem {
        build_root_system("A1".parse().unwrap())
    }

    #[test]
    fn a1_adjoint_and_simply_connected() {
        let ad = build_root_datum(a1(), LatticeSpec::root()).unwrap();
        assert_eq!(ad.basis(), &[vec![2]]);
        // cocharacters: omega^vee = alpha^vee / 2
        assert_eq!(ad.cochar_basis(), vec![vec![ratio(1, 2)]]);
        assert!(ad.is_adjoint_semisimple());
        let sc = build_root_datum(a1(), LatticeSpec::weight()).unwrap();
        assert_eq!(sc.cochar_basis(), vec![vec![rat(1)]]);
        assert!(sc.is_simply_connected_semisimple());
        let gl = build_root_datum(a1(), LatticeSpec::weight().with_central_rank(1)).unwrap();
        assert_eq!(gl.dim(), 2);
        assert_eq!(gl.cochar_basis().len(), 2);
    }

    #[test]
    fn gl2_model() {
        let gl2 = RootDatum::gl(2).unwrap();
        assert_eq!(gl2.basis(), &[vec![1, 1], vec![-1, 1]]);
        // alpha = e1 - e2
        assert_eq!(gl2.root_in_basis(0), &[1, -1]);
        assert_eq!(gl2.coroot_functional(0), &[1, -1]);
        assert!(!gl2.is_simply_connected_semisimple());
        // L_ss = Q: only the zero class
        assert_eq!(gl2.semisimple_classes().len(), 1);
    }

    #[test]
    fn lattice_sandwich_validation() {
        let a3 = build_root_system("A3".parse().unwrap());
        // omega_2 generates (with Q) the intermediate lattice of SL_4/mu_2
        let q_rows: Vec<Vec<i64>> = (0..3).map(|j| (0..3).map(|i| a3.cartan_matrix()[i][j]).collect()).collect();
        let mut gens = q_rows.clone();
        gens.push(vec![0, 1, 0]);
        let mid = build_root_datum(a3.clone(), LatticeSpec::intermediate(&gens)).unwrap();
        assert_eq!(mid.semisimple_classes().len(), 2);
        // missing the root lattice
        let err = build_root_datum(a3.clone(), LatticeSpec::intermediate(&[vec![0, 2, 0]])).unwrap_err();
        assert!(matches!(err, Error::Lattice(_)));
        // outside P
        let half = LatticeSpec {
            kind: LatticeKind::Intermediate(vec![
                vec![ratio(1, 2), rat(0), rat(0)],
                vec![rat(0), rat(1), rat(0)],
                vec![rat(0), rat(0), rat(1)],
            ]),
            central_free_rank: 0,
        };
        assert!(build_root_datum(a3.clone(), half).is_err());
        // not full rank
        assert!(build_root_datum(a3, LatticeSpec::intermediate(&q_rows[..2])).is_err());
    }

    #[test]
    fn dual_lattice_examples() {
        let id = QMatrix::identity(2);
        let z2 = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        assert_eq!(dual_lattice(&z2, &id).unwrap(), z2);
        // Q(A_1) under the pairing <alpha^vee, alpha> = 2 has dual (1/2) alpha^vee
        let q = vec![vec![rat(1)]];
        let two = QMatrix::from_int_rows(&[vec![2]]);
        assert_eq!(dual_lattice(&q, &two).unwrap(), vec![vec![ratio(1, 2)]]);
        let zero = QMatrix::from_int_rows(&[vec![0]]);
        assert!(dual_lattice(&q, &zero).is_err());
    }

    #[test]
    fn doc_roundtrip() {
        let doc = json!({"type": "D", "rank": 4, "char_lattice": "weight"});
        let d = RootDatum::from_doc(&doc).unwrap();
        let canon = d.to_doc();
        assert_eq!(canon["type"], "D4");
        assert_eq!(RootDatum::from_doc(&canon).unwrap(), d);
        let gl = RootDatum::from_doc(&json!({"type": "GL", "rank": 3})).unwrap();
        assert_eq!(gl.dim(), 3);
        let aniso = RootDatum::from_doc(&json!({"type": "anisotropic", "rank": 0, "torsion": [2]})).unwrap();
        assert_eq!(aniso.torsion().order(), 2);
        assert!(RootDatum::from_doc(&json!({"type": "A", "rank": 1, "torsion": [2]})).is_err());
        assert!(RootDatum::from_doc(&json!({"type": "E", "rank": 5})).is_err());
        let prod = RootDatum::from_doc(&json!({"type": "A1xA1", "char_lattice": "root"})).unwrap();
        assert_eq!(prod.rank(), 2);
    }

    #[test]
    fn simple_actions_are_integral_involutions() {
        for t in ["B3", "C3", "G2", "D4"] {
            for spec in [LatticeSpec::root(), LatticeSpec::weight(), LatticeSpec::weight().with_central_rank(2)] {
                let d = build_root_datum(build_root_system(t.parse().unwrap()), spec).unwrap();
                let n = d.dim();
                for i in 0..d.rank() {
                    let k = d.simple_action(i);
                    assert_eq!(flat_mul(n, k, k), identity_flat(n));
                }
            }
        }
    }
}
