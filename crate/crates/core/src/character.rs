//! Finite-order weakly unramified characters.
//!
//! A character is a point of the dual torus, recorded as exponent
//! coordinates `p` in the basis of the character lattice (the character sends
//! a cocharacter `lambda` to `exp(2 pi i <lambda, p>)`), together with a
//! character of the Kottwitz torsion group `Z/d_1 x ... x Z/d_k`, recorded as
//! a tuple `(a_1, ..., a_k)` with `a_j` in `Z/d_j` (sending the generator
//! `g_j` to `a_j / d_j`).

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::abelian::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::linalg::{common_denominator, frac, fmt_rat, parse_rat, rat, ratio, Rat};
use crate::root_datum::{dual_lattice, LatticeKind, LatticeSpec, RootDatum};
use crate::weyl::WeylElement;

/// Default cap on the number of grid points visited by [`enumerate_characters`].
pub const DEFAULT_GRID_CAP: u64 = 20_000_000;

/// The group `Z^free_rank (+) torsion` whose characters are modeled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KottwitzLattice {
    pub free_rank: usize,
    pub torsion: FiniteAbelianGroup,
}

impl KottwitzLattice {
    pub fn of(datum: &RootDatum) -> Self {
        KottwitzLattice { free_rank: datum.dim(), torsion: datum.torsion().clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WUCharacter {
    point: Vec<Rat>,
    torsion: Vec<u64>,
}

impl WUCharacter {
    pub fn trivial(datum: &RootDatum) -> Self {
        WUCharacter {
            point: vec![Rat::zero(); datum.dim()],
            torsion: vec![0; datum.torsion().invariant_factors().len()],
        }
    }

    pub fn point(&self) -> &[Rat] {
        &self.point
    }

    pub fn torsion_char(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.point.iter().all(Zero::is_zero) && self.torsion.iter().all(|&a| a == 0)
    }

    /// Least common denominator of the point coordinates.
    pub fn denominator(&self) -> i64 {
        common_denominator(&self.point).expect("point denominators fit in 64 bits")
    }

    /// Order of the character (point denominator combined with the torsion part).
    pub fn order(&self, datum: &RootDatum) -> u64 {
        let mut o = self.denominator() as u64;
        for (&a, &d) in self.torsion.iter().zip(datum.torsion().invariant_factors()) {
            o = o.lcm(&(d / a.gcd(&d)));
        }
        o
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "point": self.point.iter().map(fmt_rat).collect::<Vec<_>>() });
        if !self.torsion.is_empty() {
            v["torsion"] = json!(self.torsion);
        }
        v
    }
}

impl fmt::Display for WUCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.point.iter().map(fmt_rat).collect();
        write!(f, "({})", coords.join(","))?;
        if self.torsion.iter().any(|&a| a != 0) {
            let t: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
            write!(f, "[tors {}]", t.join(","))?;
        }
        Ok(())
    }
}

/// Builds the canonical character with the given point (basis coordinates)
/// and torsion tuple. Coordinates are reduced into `[0, 1)`.
pub fn make_character(datum: &RootDatum, coords: &[Rat], tors: &[u64]) -> Result<WUCharacter> {
    if coords.len() != datum.dim() {
        return Err(Error::DimensionMismatch { expected: datum.dim(), got: coords.len() });
    }
    let factors = datum.torsion().invariant_factors();
    let torsion = if tors.is_empty() {
        vec![0; factors.len()]
    } else {
        if tors.len() != factors.len() {
            return Err(Error::DimensionMismatch { expected: factors.len(), got: tors.len() });
        }
        tors.iter().zip(factors).map(|(&a, &d)| a % d).collect()
    };
    Ok(WUCharacter { point: coords.iter().map(frac).collect(), torsion })
}

/// Parses `"1/2,0,3/4"`, optionally followed by `";tors=i"` where `i` indexes
/// the lexicographic list of torsion characters. A lone `"tors=i"` is
/// accepted on rank-0 data.
pub fn parse_character(datum: &RootDatum, s: &str) -> Result<WUCharacter> {
    let mut coords = Vec::new();
    let mut tors = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some(idx) = part.strip_prefix("tors=") {
            let idx: usize =
                idx.trim().parse().map_err(|_| Error::Parse(format!("bad torsion index {idx:?}")))?;
            let elements = datum.torsion().elements();
            tors = elements
                .get(idx)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "torsion index {idx} out of range (group has {} characters)",
                        elements.len()
                    ))
                })?
                .clone();
        } else {
            coords = part.split(',').map(|c| parse_rat(c.trim())).collect::<Result<Vec<_>>>()?;
        }
    }
    make_character(datum, &coords, &tors)
}

/// Value in `[0, 1)` of the character on a cocharacter (coordinates in the
/// dual basis of the character lattice) plus a torsion element.
pub fn evaluate(datum: &RootDatum, chi: &WUCharacter, lambda: &[i64], tors: &[u64]) -> Result<Rat> {
    if lambda.len() != datum.dim() {
        return Err(Error::DimensionMismatch { expected: datum.dim(), got: lambda.len() });
    }
    let factors = datum.torsion().invariant_factors();
    if !tors.is_empty() && tors.len() != factors.len() {
        return Err(Error::DimensionMismatch { expected: factors.len(), got: tors.len() });
    }
    let mut v: Rat = lambda.iter().zip(&chi.point).map(|(&l, x)| x * rat(l)).sum();
    for ((&g, &a), &d) in tors.iter().zip(&chi.torsion).zip(factors) {
        v += ratio(((g % d) * a % d) as i64, d as i64);
    }
    Ok(frac(&v))
}

/// Evaluates on a cocharacter given as a rational functional in ambient
/// coordinates; rejects vectors outside the cocharacter lattice.
pub fn evaluate_ambient(datum: &RootDatum, chi: &WUCharacter, functional: &[Rat]) -> Result<Rat> {
    if functional.len() != datum.dim() {
        return Err(Error::DimensionMismatch { expected: datum.dim(), got: functional.len() });
    }
    // coordinates in the dual basis: pair with the character basis rows
    let lambda = datum
        .basis()
        .iter()
        .map(|row| {
            let c: Rat = row.iter().zip(functional).map(|(&b, f)| f * rat(b)).sum();
            if c.is_integer() {
                c.to_integer().to_i64().ok_or_else(|| Error::Overflow("cocharacter".into()))
            } else {
                Err(Error::NotInLattice(format!(
                    "functional {} does not pair integrally with the character lattice",
                    crate::linalg::fmt_rat_vec(functional)
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    evaluate(datum, chi, &lambda, &[])
}

/// `<alpha^vee, p>` for root `k`, reduced modulo 1.
pub fn coroot_value(datum: &RootDatum, chi: &WUCharacter, k: usize) -> Rat {
    frac(&datum.coroot_pairing(k, &chi.point))
}

/// `w . chi`: the point moves by the Weyl action; the torsion part is fixed.
pub fn weyl_act(datum: &RootDatum, w: &WeylElement, chi: &WUCharacter) -> WUCharacter {
    let n = datum.dim();
    let k = datum.basis_action_from_weight_matrix(w.weight_matrix());
    let point = (0..n)
        .map(|i| frac(&(0..n).map(|j| &chi.point[j] * rat(k[i * n + j])).sum::<Rat>()))
        .collect();
    WUCharacter { point, torsion: chi.torsion.clone() }
}

pub fn is_unramified(chi: &WUCharacter) -> bool {
    chi.torsion.iter().all(|&a| a == 0)
}

/// A sublattice of the cocharacter lattice lying in the span of the
/// coroots, given by generators in simple-coroot coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    pub generators: Vec<Vec<i64>>,
}

impl Sublattice {
    /// The coroot lattice `Q^vee` (cocharacters of the derived group of a
    /// simply connected cover).
    pub fn coroot_lattice(rank: usize) -> Self {
        let generators = (0..rank)
            .map(|i| (0..rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Sublattice { generators }
    }
}

/// Root datum of the restricted torus: same root system, character lattice
/// dual to the sublattice. Validates that the sublattice contains the
/// coroots and lies in the cocharacter lattice.
pub fn restricted_datum(datum: &RootDatum, sub: &Sublattice) -> Result<RootDatum> {
    let r = datum.rank();
    if r == 0 {
        return Err(Error::Sublattice("restriction needs a nonempty root system".into()));
    }
    if sub.generators.iter().any(|g| g.len() != r) {
        return Err(Error::Sublattice(format!("generators must have length {r}")));
    }
    // inside the cocharacter lattice: integral pairing with every basis row
    for g in &sub.generators {
        let pairs: Vec<Rat> = datum
            .basis()
            .iter()
            .map(|row| (0..r).map(|i| rat(row[i] * g[i])).sum())
            .collect();
        if pairs.iter().any(|x| !x.is_integer()) {
            return Err(Error::Sublattice(format!("{g:?} is not a cocharacter")));
        }
    }
    let gens: Vec<Vec<Rat>> =
        sub.generators.iter().map(|g| g.iter().map(|&x| rat(x)).collect()).collect();
    let basis = crate::root_datum::rational_basis(&gens, r)
        .map_err(|_| Error::Sublattice("sublattice misses a coroot direction".into()))?;
    // simple coroots must be integer combinations of the basis
    let bm = crate::linalg::QMatrix::from_rows(&basis);
    let inv = bm.inverse().ok_or_else(|| Error::Sublattice("degenerate sublattice".into()))?;
    for i in 0..r {
        let mut e = vec![Rat::zero(); r];
        e[i] = rat(1);
        if inv.left_apply(&e).iter().any(|x| !x.is_integer()) {
            return Err(Error::Sublattice(format!("sublattice does not contain the coroot alpha_{}^vee", i + 1)));
        }
    }
    let dual = dual_lattice(&gens, &crate::linalg::QMatrix::identity(r))?;
    RootDatum::with_torsion(
        datum.root_system_arc(),
        LatticeSpec { kind: LatticeKind::Intermediate(dual), central_free_rank: 0 },
        FiniteAbelianGroup::trivial(),
    )
}

/// Restriction to the sublattice: the returned character lives on
/// [`restricted_datum`] and agrees with `chi` on every element of `sub`.
pub fn restrict(datum: &RootDatum, chi: &WUCharacter, sub: &Sublattice) -> Result<(RootDatum, WUCharacter)> {
    let flat = restricted_datum(datum, sub)?;
    let y = datum.semisimple_part(&chi.point);
    let p = flat.from_ambient(&y);
    let chi_flat = make_character(&flat, &p, &[])?;
    Ok((flat, chi_flat))
}

/// Orbit representatives of all characters whose point has denominator
/// dividing `d`, one per Weyl orbit, with every torsion character. The
/// representative is the orbit member with the smallest coordinate vector;
/// output is sorted by (torsion, point).
pub fn enumerate_characters(datum: &RootDatum, d: u64, cap: u64) -> Result<Vec<WUCharacter>> {
    if d == 0 {
        return Err(Error::Parse("denominator must be positive".into()));
    }
    let n = datum.dim();
    let size = (d as u128).checked_pow(n as u32).filter(|&s| s <= cap as u128).ok_or_else(|| {
        Error::Blowup(format!("{d}^{n} grid points exceed the cap {cap}"))
    })? as usize;
    let di = d as i64;
    let decode = |mut idx: usize| -> Vec<i64> {
        let mut v = vec![0; n];
        for c in (0..n).rev() {
            v[c] = (idx % d as usize) as i64;
            idx /= d as usize;
        }
        v
    };
    let encode = |v: &[i64]| -> usize { v.iter().fold(0usize, |acc, &x| acc * d as usize + x as usize) };
    let actions: Vec<&[i64]> = (0..datum.rank()).map(|i| datum.simple_action(i)).collect();
    let mut seen = vec![false; size];
    let mut reps = Vec::new();
    // indices are visited in lexicographic order of coordinates, so the
    // first point of each orbit is its smallest member
    for start in 0..size {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        reps.push(start);
        let mut queue = VecDeque::from([start]);
        while let Some(idx) = queue.pop_front() {
            let v = decode(idx);
            for k in &actions {
                let img: Vec<i64> = (0..n)
                    .map(|i| (0..n).map(|j| k[i * n + j] * v[j]).sum::<i64>().rem_euclid(di))
                    .collect();
                let e = encode(&img);
                if !seen[e] {
                    seen[e] = true;
                    queue.push_back(e);
                }
            }
        }
    }
    let mut out = Vec::new();
    for tors in datum.torsion().elements() {
        for &idx in &reps {
            let point = decode(idx).into_iter().map(|x| ratio(x, di)).collect();
            out.push(WUCharacter { point, torsion: tors.clone() });
        }
    }
    Ok(out)
}

/// Canonical orbit representative of `chi` (smallest point in its Weyl
/// orbit). Explores the orbit, so it is bounded by `cap` orbit points.
pub fn orbit_representative(datum: &RootDatum, chi: &WUCharacter, cap: usize) -> Result<WUCharacter> {
    let n = datum.dim();
    let mut seen: HashSet<Vec<Rat>> = HashSet::from([chi.point.clone()]);
    let mut queue = VecDeque::from([chi.point.clone()]);
    while let Some(p) = queue.pop_front() {
        for i in 0..datum.rank() {
            let k = datum.simple_action(i);
            let img: Vec<Rat> =
                (0..n).map(|a| frac(&(0..n).map(|b| &p[b] * rat(k[a * n + b])).sum::<Rat>())).collect();
            if seen.insert(img.clone()) {
                if seen.len() > cap {
                    return Err(Error::Blowup(format!("orbit larger than {cap} points")));
                }
                queue.push_back(img);
            }
        }
    }
    let point = seen.into_iter().collect::<BTreeSet<_>>().into_iter().next().expect("nonempty orbit");
    Ok(WUCharacter { point, torsion: chi.torsion.clone() })
}
