//! Toric GIT data: anticones, chambers, the wall between two chambers, box
//! elements and the wall-crossing constants.
//!
//! Indices of characters are 0-based internally and 1-based in reports.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cone::{extreme_rays, facet_normals, irredundant, satisfies};
use crate::error::{Error, Result};
use crate::linalg::{det, inverse, mat_vec, nullspace, rank, subsets_of_size, transpose, QMat};
use crate::lp::feasible;
use crate::rational::{dot, frac, fmt_vec, is_integer, is_zero_vec, primitive, q, sub, zero_vec, QVec, Q};

/// Size bounds for the brute-force enumerations.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Largest number of characters for subset enumeration.
    pub max_chars: usize,
    /// Largest `Δ^r` for the box scan.
    pub max_box_scan: u64,
    /// Coordinate bound for the p-basis search.
    pub basis_height: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_chars: 20, max_box_scan: 2_000_000, basis_height: 8 }
    }
}

/// The lattice, characters and the pair of stability conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct GitData {
    rank: usize,
    chars: Vec<QVec>,
    omega_plus: QVec,
    omega_minus: QVec,
}

impl GitData {
    /// Validates the data: characters are nonzero integer vectors of length
    /// `rank` spanning `𝕃^∨ ⊗ ℚ`, and both stability conditions lie in their
    /// non-negative span.
    pub fn new(rank: usize, chars: Vec<QVec>, omega_plus: QVec, omega_minus: QVec) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidData("rank must be positive".into()));
        }
        if chars.is_empty() {
            return Err(Error::InvalidData("no characters".into()));
        }
        for (j, d) in chars.iter().enumerate() {
            if d.len() != rank {
                return Err(Error::InvalidData(format!(
                    "character D_{} has {} entries, expected {}",
                    j + 1,
                    d.len(),
                    rank
                )));
            }
            if !d.iter().all(is_integer) {
                return Err(Error::InvalidData(format!("character D_{} is not integral", j + 1)));
            }
            if is_zero_vec(d) {
                return Err(Error::InvalidData(format!("character D_{} is zero", j + 1)));
            }
        }
        if rank_of(&chars) != rank {
            return Err(Error::InvalidData("characters do not span the dual lattice".into()));
        }
        for (name, w) in [("omega_plus", &omega_plus), ("omega_minus", &omega_minus)] {
            if w.len() != rank {
                return Err(Error::InvalidData(format!("{name} has {} entries, expected {rank}", w.len())));
            }
            if !in_nonnegative_span(&chars, w) {
                return Err(Error::InvalidData(format!(
                    "{name} = {} is not in the non-negative span of the characters",
                    fmt_vec(w)
                )));
            }
        }
        Ok(GitData { rank, chars, omega_plus, omega_minus })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_chars(&self) -> usize {
        self.chars.len()
    }

    pub fn chars(&self) -> &[QVec] {
        &self.chars
    }

    pub fn char(&self, j: usize) -> &QVec {
        &self.chars[j]
    }

    pub fn omega_plus(&self) -> &QVec {
        &self.omega_plus
    }

    pub fn omega_minus(&self) -> &QVec {
        &self.omega_minus
    }

    /// `ρ̂ = Σ_j D_j`.
    pub fn rho_hat(&self) -> QVec {
        self.chars.iter().fold(zero_vec(self.rank), |acc, d| crate::rational::add(&acc, d))
    }

    /// `(D_j · k)_j`.
    pub fn pairings(&self, k: &[Q]) -> QVec {
        self.chars.iter().map(|d| dot(d, k)).collect()
    }

    /// The same data with the two stability conditions exchanged.
    pub fn swapped(&self) -> GitData {
        GitData {
            rank: self.rank,
            chars: self.chars.clone(),
            omega_plus: self.omega_minus.clone(),
            omega_minus: self.omega_plus.clone(),
        }
    }
}

fn rank_of(vs: &[QVec]) -> usize {
    rank(vs)
}

fn in_nonnegative_span(chars: &[QVec], w: &[Q]) -> bool {
    let a = transpose(chars);
    feasible(&a, w).is_some()
}

/// Whether `omega` is a strictly positive combination of `{D_i}_{i ∈ subset}`.
///
/// Decided by the homogeneous LP `Σ a_i D_i = t ω` with `a_i ≥ 1`, `t ≥ 1`,
/// which is feasible exactly when such a combination exists.
pub fn anticone_contains(chars: &[QVec], subset: &[usize], omega: &[Q]) -> bool {
    if subset.is_empty() {
        return is_zero_vec(omega);
    }
    let r = omega.len();
    // variables a'_i = a_i - 1 ≥ 0 and t' = t - 1 ≥ 0:
    // Σ a'_i D_i - t' ω = ω - Σ D_i
    let mut a: QMat = (0..r).map(|_| Vec::with_capacity(subset.len() + 1)).collect();
    let mut b: QVec = omega.to_vec();
    for &i in subset {
        for row in 0..r {
            a[row].push(chars[i][row].clone());
            b[row] -= &chars[i][row];
        }
    }
    for row in 0..r {
        a[row].push(-omega[row].clone());
    }
    feasible(&a, &b).is_some()
}

/// `𝒜_ω`: the subsets whose anticone contains `omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnticoneFamily {
    pub omega: QVec,
    /// Sorted by size, then lexicographically.
    pub members: Vec<Vec<usize>>,
}

impl AnticoneFamily {
    pub fn contains(&self, subset: &[usize]) -> bool {
        self.members.binary_search_by(|m| canonical_cmp(m, subset)).is_ok()
    }

    /// Members not containing a smaller member.
    pub fn minimal(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for m in &self.members {
            if !out.iter().any(|o| o.iter().all(|i| m.contains(i))) {
                out.push(m.clone());
            }
        }
        out
    }

    /// Whether some member is contained in `set`.
    pub fn has_member_within(&self, set: &[usize]) -> bool {
        self.members.iter().any(|m| m.iter().all(|i| set.contains(i)))
    }
}

fn canonical_cmp(a: &[usize], b: &[usize]) -> core::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn compute_anticone_family(data: &GitData, omega: &[Q], limits: &Limits) -> Result<AnticoneFamily> {
    let m = data.num_chars();
    if m > limits.max_chars {
        return Err(Error::InputTooLarge { what: "number of characters", value: m as u64, bound: limits.max_chars as u64 });
    }
    let mut members = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        if anticone_contains(data.chars(), &subset, omega) {
            members.push(subset);
        }
    }
    members.sort_by(|a, b| canonical_cmp(a, b));
    Ok(AnticoneFamily { omega: omega.to_vec(), members })
}

/// The chamber `C_ω` containing a stability condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ChamberData {
    pub family: AnticoneFamily,
    /// Irredundant inequalities `n · x ≥ 0` cutting out the closure of `C_ω`;
    /// they generate the dual cone `C_ω^∨`.
    pub inequalities: Vec<QVec>,
    /// Extreme rays of the closure.
    pub rays: Vec<QVec>,
    pub full_dimensional: bool,
    pub proper: bool,
    pub extended_weak_fano: bool,
}

impl ChamberData {
    pub fn contains_closed(&self, x: &[Q]) -> bool {
        satisfies(&self.inequalities, x)
    }

    /// Whether `k` lies in the dual cone `C^∨`.
    pub fn dual_contains(&self, k: &[Q]) -> bool {
        self.rays.iter().all(|ray| !dot(ray, k).is_negative())
    }

    pub fn ensure_proper(&self) -> Result<()> {
        if self.proper {
            Ok(())
        } else {
            Err(Error::NotProper(format!("fan of the quotient at {} is not complete", fmt_vec(&self.family.omega))))
        }
    }
}

pub fn compute_chamber(data: &GitData, omega: &[Q], limits: &Limits) -> Result<ChamberData> {
    let family = compute_anticone_family(data, omega, limits)?;
    if family.members.is_empty() {
        return Err(Error::InvalidData(format!("no anticone contains {}", fmt_vec(omega))));
    }
    let r = data.rank();
    let not_full = || Error::NotFullDimensional(fmt_vec(omega));
    let mut all_ineqs: Vec<QVec> = Vec::new();
    for member in &family.members {
        let gens: Vec<QVec> = member.iter().map(|&i| data.char(i).clone()).collect();
        if rank(&gens) < r {
            return Err(not_full());
        }
        for n in facet_normals(&gens, r) {
            if !all_ineqs.contains(&n) {
                all_ineqs.push(n);
            }
        }
    }
    let rays = extreme_rays(&all_ineqs, r);
    if rank(&rays) < r {
        return Err(not_full());
    }
    let inequalities = irredundant(&all_ineqs, r);
    let proper = fan_is_complete(data, &family);
    let extended_weak_fano = satisfies(&inequalities, &data.rho_hat());
    Ok(ChamberData { family, inequalities, rays, full_dimensional: true, proper, extended_weak_fano })
}

/// Completeness of the simplicial quotient fan: every maximal cone has
/// `m - r` independent rays and every facet lies in exactly two maximal cones.
fn fan_is_complete(data: &GitData, family: &AnticoneFamily) -> bool {
    let m = data.num_chars();
    let r = data.rank();
    let n = m - r;
    if n == 0 {
        return true;
    }
    // ray generators b_j: columns of a basis of the relation space
    let rel = nullspace(&transpose(data.chars()), m);
    let b: Vec<QVec> = (0..m).map(|j| rel.iter().map(|row| row[j].clone()).collect()).collect();
    let maximal: Vec<Vec<usize>> = family
        .minimal()
        .into_iter()
        .map(|i| (0..m).filter(|j| !i.contains(j)).collect())
        .collect();
    for cone in &maximal {
        if cone.len() != n {
            return false;
        }
        let gens: Vec<QVec> = cone.iter().map(|&j| b[j].clone()).collect();
        if rank(&gens) != n {
            return false;
        }
    }
    for cone in &maximal {
        for skip in 0..n {
            let facet: Vec<usize> = cone.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &j)| j).collect();
            let count = maximal.iter().filter(|c| facet.iter().all(|j| c.contains(j))).count();
            if count != 2 {
                return false;
            }
        }
    }
    true
}

/// A twisted-sector index `f ∈ 𝕂_ω / 𝕃`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoxElement {
    /// Canonical representative with coordinates in `[0, 1)`.
    pub f: QVec,
    /// `I_f = {j : D_j · f ∈ ℤ}`.
    pub support: Vec<usize>,
    pub age: Q,
}

impl BoxElement {
    pub fn new(data: &GitData, f: &[Q]) -> BoxElement {
        let f = canonical(f);
        let pair = data.pairings(&f);
        let support = (0..data.num_chars()).filter(|&j| is_integer(&pair[j])).collect();
        let age = pair.iter().fold(Q::zero(), |acc, x| acc + frac(x));
        BoxElement { f, support, age }
    }

    pub fn is_untwisted(&self) -> bool {
        is_zero_vec(&self.f)
    }
}

/// Reduces modulo `𝕃 = ℤ^r`.
pub fn canonical(f: &[Q]) -> QVec {
    f.iter().map(frac).collect()
}

/// Lcm of the absolute values of the nonzero `r × r` minors of `D`.
pub fn minor_lcm(data: &GitData) -> BigInt {
    let r = data.rank();
    subsets_of_size(data.num_chars(), r)
        .into_iter()
        .map(|s| {
            let m: Vec<QVec> = s.iter().map(|&j| data.char(j).clone()).collect();
            det(&m)
        })
        .filter(|d| !d.is_zero())
        .fold(BigInt::one(), |acc, d| acc.lcm(&d.abs().to_integer()))
}

/// Representatives of `𝕂_ω / 𝕃`, untwisted sector first, then by age and `f`.
pub fn enumerate_boxes(data: &GitData, chamber: &ChamberData, limits: &Limits) -> Result<Vec<BoxElement>> {
    let r = data.rank();
    let delta = minor_lcm(data).to_u64().unwrap_or(u64::MAX);
    let scan = (delta as u128).saturating_pow(r as u32);
    if scan > limits.max_box_scan as u128 {
        return Err(Error::InputTooLarge { what: "box scan size Δ^r", value: scan.min(u64::MAX as u128) as u64, bound: limits.max_box_scan });
    }
    let mut out = Vec::new();
    let mut v = alloc::vec![0u64; r];
    let dq = q(delta as i64);
    loop {
        let f: QVec = v.iter().map(|&x| q(x as i64) / &dq).collect();
        let b = BoxElement::new(data, &f);
        if chamber.family.contains(&b.support) {
            out.push(b);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == r {
                out.sort_by(|a, b| a.age.cmp(&b.age).then_with(|| a.f.cmp(&b.f)));
                return Ok(out);
            }
            v[i] += 1;
            if v[i] < delta {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// The lattice `𝕃̃ ⊂ 𝕃 ⊗ ℚ` generated by `𝕂_ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxLattice {
    /// Non-integral generators beyond `ℤ^r` (canonical box representatives).
    pub extra: Vec<QVec>,
    /// `[𝕃̃ : 𝕃]`, also the covolume of `𝕃̃^∨ ⊂ 𝕃^∨`.
    pub index: u64,
}

impl BoxLattice {
    pub fn from_boxes(boxes: &[BoxElement]) -> BoxLattice {
        let extra: Vec<QVec> = boxes.iter().filter(|b| !b.is_untwisted()).map(|b| b.f.clone()).collect();
        // closure of the generated subgroup of (ℚ/ℤ)^r
        let mut group: BTreeSet<QVec> = BTreeSet::new();
        if let Some(b) = boxes.first() {
            group.insert(zero_vec(b.f.len()));
        }
        let mut frontier: Vec<QVec> = group.iter().cloned().collect();
        while let Some(g) = frontier.pop() {
            for x in &extra {
                let s = canonical(&crate::rational::add(&g, x));
                if group.insert(s.clone()) {
                    frontier.push(s);
                }
            }
        }
        BoxLattice { extra, index: group.len().max(1) as u64 }
    }

    /// Whether an integral covector pairs integrally with all of `𝕃̃`.
    pub fn dual_contains(&self, xi: &[Q]) -> bool {
        xi.iter().all(is_integer) && self.extra.iter().all(|f| is_integer(&dot(xi, f)))
    }

    /// Whether `k` lies in `𝕃̃`, given the p-basis of `𝕃̃^∨`.
    pub fn contains_via_basis(basis: &[QVec], k: &[Q]) -> bool {
        basis.iter().all(|p| is_integer(&dot(p, k)))
    }
}

/// All constants attached to the wall between the two chambers.
#[derive(Debug, Clone, PartialEq)]
pub struct WallCrossing {
    /// Primitive generator of `W^⊥ ∩ 𝕃` with `Σ_j D_j · e > 0`.
    pub e: QVec,
    /// Extreme rays of the wall closure `C̄_W = W ∩ C̄_+`.
    pub wall_rays: Vec<QVec>,
    pub p_plus: Vec<QVec>,
    pub p_minus: Vec<QVec>,
    /// `c = -(p_r^+ · e) / (p_r^- · e)`.
    pub c: Q,
    /// `c_1, …, c_{r-1}` with `p_r^+ = Σ c_i p_i − c p_r^-`.
    pub c_i: Vec<Q>,
    pub discrepancy_sum: Q,
    pub lattice_plus: BoxLattice,
    pub lattice_minus: BoxLattice,
    /// Whether the bases came from the search rather than the caller.
    pub searched: bool,
}

impl WallCrossing {
    pub fn e_pairings(&self, data: &GitData) -> QVec {
        data.pairings(&self.e)
    }

    /// `Σ e_j / (-p_r^- · e)`: the exponent with `ỹ_r = x^s`.
    pub fn regularization_slope(&self) -> Q {
        let r = self.p_minus.len();
        &self.discrepancy_sum / -dot(&self.p_minus[r - 1], &self.e)
    }
}

/// Both chambers, both box sets and the wall data.
#[derive(Debug, Clone)]
pub struct WallSetup {
    pub data: GitData,
    pub chamber_plus: ChamberData,
    pub chamber_minus: ChamberData,
    pub boxes_plus: Vec<BoxElement>,
    pub boxes_minus: Vec<BoxElement>,
    pub wall: WallCrossing,
}

pub fn compute_wall_crossing(
    data: &GitData,
    supplied: Option<(Vec<QVec>, Vec<QVec>)>,
    limits: &Limits,
) -> Result<WallSetup> {
    let r = data.rank();
    let chamber_plus = compute_chamber(data, data.omega_plus(), limits)?;
    let chamber_minus = compute_chamber(data, data.omega_minus(), limits)?;
    let normal = chamber_plus
        .inequalities
        .iter()
        .find(|n| chamber_minus.inequalities.contains(&crate::rational::neg(n)))
        .cloned()
        .ok_or_else(|| Error::InvalidData("chambers do not share a codimension-one wall".into()))?;
    let mut both = chamber_plus.inequalities.clone();
    both.extend(chamber_minus.inequalities.iter().cloned());
    let wall_rays = extreme_rays(&both, r);
    if rank(&wall_rays) + 1 != r {
        return Err(Error::InvalidData("closures of the chambers do not meet in a codimension-one face".into()));
    }
    let n = primitive(&normal);
    let rho = data.rho_hat();
    let disc = dot(&rho, &n);
    if disc.is_zero() {
        return Err(Error::CrepantWall);
    }
    let e = if disc.is_positive() { n } else { crate::rational::neg(&n) };
    let discrepancy_sum = dot(&rho, &e);
    let we = dot(data.omega_plus(), &e);
    if !we.is_positive() {
        return Err(Error::LabelingError(crate::rational::fmt_q(&we)));
    }
    let boxes_plus = enumerate_boxes(data, &chamber_plus, limits)?;
    let boxes_minus = enumerate_boxes(data, &chamber_minus, limits)?;
    let lattice_plus = BoxLattice::from_boxes(&boxes_plus);
    let lattice_minus = BoxLattice::from_boxes(&boxes_minus);

    let ctx = BasisContext { e: &e, chamber_plus: &chamber_plus, chamber_minus: &chamber_minus, lattice_plus: &lattice_plus, lattice_minus: &lattice_minus, r };
    let searched = supplied.is_none();
    let (p_plus, p_minus) = match supplied {
        Some((pp, pm)) => {
            ctx.validate(&pp, &pm)?;
            (pp, pm)
        }
        None => ctx.search(limits.basis_height)?,
    };
    let (c, c_i) = change_of_basis_constants(&p_plus, &p_minus, &e)?;
    Ok(WallSetup {
        data: data.clone(),
        chamber_plus,
        chamber_minus,
        boxes_plus,
        boxes_minus,
        wall: WallCrossing { e, wall_rays, p_plus, p_minus, c, c_i, discrepancy_sum, lattice_plus, lattice_minus, searched },
    })
}

/// `c` and `c_i` from `p_r^+ = Σ_{i<r} c_i p_i^- − c p_r^-`.
pub fn change_of_basis_constants(p_plus: &[QVec], p_minus: &[QVec], e: &[Q]) -> Result<(Q, Vec<Q>)> {
    let r = p_plus.len();
    let pm_t = transpose(p_minus);
    let inv = inverse(&pm_t).ok_or_else(|| Error::BasisRejected("p_minus is not a basis".into()))?;
    let coords = mat_vec(&inv, &p_plus[r - 1]);
    let c = -(dot(&p_plus[r - 1], e) / dot(&p_minus[r - 1], e));
    if coords[r - 1] != -c.clone() {
        return Err(Error::BasisRejected("p_r^+ is not compatible with the wall".into()));
    }
    Ok((c, coords[..r - 1].to_vec()))
}

struct BasisContext<'a> {
    e: &'a QVec,
    chamber_plus: &'a ChamberData,
    chamber_minus: &'a ChamberData,
    lattice_plus: &'a BoxLattice,
    lattice_minus: &'a BoxLattice,
    r: usize,
}

impl BasisContext<'_> {
    fn is_basis(&self, vs: &[QVec], lattice: &BoxLattice) -> bool {
        vs.iter().all(|v| lattice.dual_contains(v)) && det(vs).abs() == q(lattice.index as i64)
    }

    fn validate(&self, pp: &[QVec], pm: &[QVec]) -> Result<()> {
        let r = self.r;
        let reject = |msg: String| Err(Error::BasisRejected(msg));
        if pp.len() != r || pm.len() != r || pp.iter().chain(pm).any(|p| p.len() != r) {
            return reject(format!("each basis needs {r} vectors of length {r}"));
        }
        if !self.is_basis(pp, self.lattice_plus) {
            return reject("p_plus is not a basis of the dual box lattice".into());
        }
        if !self.is_basis(pm, self.lattice_minus) {
            return reject("p_minus is not a basis of the dual box lattice".into());
        }
        for i in 0..r {
            if !self.chamber_plus.contains_closed(&pp[i]) {
                return reject(format!("p_{}^+ = {} is not in the closed plus chamber", i + 1, fmt_vec(&pp[i])));
            }
            if !self.chamber_minus.contains_closed(&pm[i]) {
                return reject(format!("p_{}^- = {} is not in the closed minus chamber", i + 1, fmt_vec(&pm[i])));
            }
        }
        for i in 0..r - 1 {
            if pp[i] != pm[i] || !dot(&pp[i], self.e).is_zero() {
                return reject(format!("p_{} must agree on both sides and lie in the wall", i + 1));
            }
        }
        if !dot(&pp[r - 1], self.e).is_positive() || !dot(&pm[r - 1], self.e).is_negative() {
            return reject("need p_r^+ . e > 0 and p_r^- . e < 0".into());
        }
        Ok(())
    }

    fn search(&self, height: i64) -> Result<(Vec<QVec>, Vec<QVec>)> {
        let r = self.r;
        let mut cands = lattice_box(r, height);
        cands.sort_by(|a, b| height_of(a).cmp(&height_of(b)).then_with(|| a.cmp(b)));
        let wall: Vec<QVec> = cands
            .iter()
            .filter(|v| {
                dot(v, self.e).is_zero()
                    && self.lattice_plus.dual_contains(v)
                    && self.lattice_minus.dual_contains(v)
                    && self.chamber_plus.contains_closed(v)
                    && self.chamber_minus.contains_closed(v)
            })
            .cloned()
            .collect();
        let plus: Vec<&QVec> = cands
            .iter()
            .filter(|v| dot(v, self.e).is_positive() && self.lattice_plus.dual_contains(v) && self.chamber_plus.contains_closed(v))
            .collect();
        let minus: Vec<&QVec> = cands
            .iter()
            .filter(|v| dot(v, self.e).is_negative() && self.lattice_minus.dual_contains(v) && self.chamber_minus.contains_closed(v))
            .collect();
        for subset in subsets_of_size(wall.len(), r - 1) {
            let common: Vec<QVec> = subset.iter().map(|&i| wall[i].clone()).collect();
            if r > 1 && rank(&common) != r - 1 {
                continue;
            }
            let complete = |pool: &[&QVec], lattice: &BoxLattice| {
                pool.iter().find_map(|p| {
                    let mut basis = common.clone();
                    basis.push((*p).clone());
                    self.is_basis(&basis, lattice).then_some(basis)
                })
            };
            if let (Some(pp), Some(pm)) = (complete(&plus, self.lattice_plus), complete(&minus, self.lattice_minus)) {
                return Ok((pp, pm));
            }
        }
        Err(Error::BasisSearchFailed { bound: height })
    }
}

fn height_of(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

fn lattice_box(r: usize, h: i64) -> Vec<QVec> {
    let mut out = Vec::new();
    let mut v = alloc::vec![-h; r];
    loop {
        if v.iter().any(|&x| x != 0) {
            out.push(v.iter().map(|&x| q(x)).collect());
        }
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            v[i] += 1;
            if v[i] <= h {
                break;
            }
            v[i] = -h;
            i += 1;
        }
    }
}

/// `[−k]` as a box element.
pub fn sector_of(data: &GitData, k: &[Q]) -> BoxElement {
    BoxElement::new(data, &crate::rational::neg(k))
}

/// Position of the sector `[f]` in a box list.
pub fn find_box(boxes: &[BoxElement], f: &[Q]) -> Option<usize> {
    let c = canonical(f);
    boxes.iter().position(|b| b.f == c)
}

/// `k - k'` lies in `𝕃`.
pub fn congruent(a: &[Q], b: &[Q]) -> bool {
    sub(a, b).iter().all(is_integer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qr, qvec};

    pub(crate) fn fixture_a() -> GitData {
        GitData::new(
            2,
            alloc::vec![qvec(&[1, 1]), qvec(&[1, 1]), qvec(&[1, 0]), qvec(&[0, -1])],
            qvec(&[2, 1]),
            qvec(&[2, -1]),
        )
        .unwrap()
    }

    fn p2() -> GitData {
        GitData::new(1, alloc::vec![qvec(&[1]), qvec(&[1]), qvec(&[1])], qvec(&[1]), qvec(&[1])).unwrap()
    }

    #[test]
    fn anticone_examples() {
        let p = p2();
        assert!(anticone_contains(p.chars(), &[0], &qvec(&[1])));
        assert!(!anticone_contains(p.chars(), &[], &qvec(&[1])));
        assert!(anticone_contains(p.chars(), &[], &qvec(&[0])));
        let a = fixture_a();
        assert!(!anticone_contains(a.chars(), &[3], &qvec(&[2, 1])));
        assert!(anticone_contains(a.chars(), &[0, 3], &qvec(&[2, 1])));
    }

    #[test]
    fn p2_chamber() {
        let p = p2();
        let ch = compute_chamber(&p, &qvec(&[1]), &Limits::default()).unwrap();
        assert_eq!(ch.family.members.len(), 7);
        assert!(ch.proper && ch.extended_weak_fano);
        assert_eq!(ch.rays, alloc::vec![qvec(&[1])]);
    }

    #[test]
    fn omega_on_wall_is_rejected() {
        let a = fixture_a();
        let err = compute_chamber(&a, &qvec(&[1, 0]), &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::NotFullDimensional(_)));
    }

    #[test]
    fn fixture_a_wall() {
        let a = fixture_a();
        let setup = compute_wall_crossing(&a, None, &Limits::default()).unwrap();
        let w = &setup.wall;
        assert_eq!(w.e, qvec(&[0, 1]));
        assert_eq!(w.discrepancy_sum, q(1));
        assert_eq!(w.p_plus, alloc::vec![qvec(&[1, 0]), qvec(&[1, 1])]);
        assert_eq!(w.p_minus, alloc::vec![qvec(&[1, 0]), qvec(&[0, -1])]);
        assert_eq!(w.c, q(1));
        assert_eq!(w.c_i, alloc::vec![q(1)]);
        assert_eq!(setup.boxes_plus.len(), 1);
        assert_eq!(setup.boxes_minus.len(), 1);
    }

    #[test]
    fn swapped_labels_are_reported() {
        let a = fixture_a().swapped();
        let err = compute_wall_crossing(&a, None, &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::LabelingError(_)));
    }

    #[test]
    fn crepant_wall_rejected() {
        // local P^1 flop-like data: D sums to zero across the wall
        let d = GitData::new(1, alloc::vec![qvec(&[1]), qvec(&[1]), qvec(&[-1]), qvec(&[-1])], qvec(&[1]), qvec(&[-1])).unwrap();
        assert_eq!(compute_wall_crossing(&d, None, &Limits::default()).unwrap_err(), Error::CrepantWall);
    }

    #[test]
    fn supplied_bases_checked() {
        let a = fixture_a();
        let good = (alloc::vec![qvec(&[1, 0]), qvec(&[1, 1])], alloc::vec![qvec(&[1, 0]), qvec(&[0, -1])]);
        let setup = compute_wall_crossing(&a, Some(good), &Limits::default()).unwrap();
        assert_eq!(setup.wall.c, q(1));
        let bad = (alloc::vec![qvec(&[1, 0]), qvec(&[0, 1])], alloc::vec![qvec(&[1, 0]), qvec(&[0, -1])]);
        assert!(matches!(compute_wall_crossing(&a, Some(bad), &Limits::default()), Err(Error::BasisRejected(_))));
    }

    #[test]
    fn box_element_canonicalization() {
        let a = fixture_a();
        let b = BoxElement::new(&a, &[qr(-1, 3), qr(7, 2)]);
        assert_eq!(b.f, alloc::vec![qr(2, 3), qr(1, 2)]);
    }
}
