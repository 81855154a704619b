//! Sector cohomology rings and Chen–Ruan classes.
//!
//! A sector `X^f` is presented as `ℚ[u_j : j ∈ I_f]` modulo linear and
//! Stanley–Reisner relations. Since `{D_j}_{j∈I_f}` spans `𝕃^∨ ⊗ ℚ`, the
//! linear relations identify the degree-one part with `𝕃^∨ ⊗ ℚ` itself, so we
//! work in `Sym(𝕃^∨ ⊗ ℚ) = ℚ[x_1..x_r]` with `u_j = D_j · x`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::git::{AnticoneFamily, BoxElement, GitData};
use crate::linalg::{rank, rref, QMat};
use crate::rational::{fmt_vec, zero_vec, QVec, Q};

type Mono = Vec<u32>;
type Poly = BTreeMap<Mono, Q>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Mono = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = out.entry(m).or_insert_with(Q::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn linear_form(xi: &[Q]) -> Poly {
    let r = xi.len();
    let mut p = Poly::new();
    for (l, c) in xi.iter().enumerate() {
        if !c.is_zero() {
            let mut m = alloc::vec![0u32; r];
            m[l] = 1;
            p.insert(m, c.clone());
        }
    }
    p
}

/// Monomials of total degree `d` in `r` variables, lexicographically.
fn monomials(r: usize, d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0u32; r];
    fn rec(i: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for a in (0..=left).rev() {
            cur[i] = a;
            rec(i + 1, left - a, cur, out);
        }
        cur[i] = 0;
    }
    if r == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Normal-form data for one degree.
#[derive(Debug, Clone, PartialEq)]
struct Reducer {
    index: BTreeMap<Mono, usize>,
    rows: QMat,
    pivots: Vec<usize>,
    /// Columns of the standard monomials, in basis order.
    free: Vec<usize>,
    offset: usize,
}

/// Cohomology ring of a single sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorRing {
    pub sector: BoxElement,
    pub generators: Vec<usize>,
    /// Minimal square-free vanishing monomials, as subsets of `generators`.
    pub sr_monomials: Vec<Vec<usize>>,
    /// Standard monomials in `x_1..x_r`, graded.
    pub basis: Vec<Mono>,
    pub degrees: Vec<u32>,
    chars: Vec<QVec>,
    reducers: Vec<Reducer>,
    table: Vec<Vec<QVec>>,
}

/// An element of a sector ring, as coordinates in its monomial basis.
pub type RingElem = QVec;

pub fn build_sector_ring(data: &GitData, family: &AnticoneFamily, f: &BoxElement) -> Result<SectorRing> {
    if !family.contains(&f.support) {
        return Err(Error::SectorNotInFan(fmt_vec(&f.f)));
    }
    let r = data.rank();
    let gens = f.support.clone();
    let span: Vec<QVec> = gens.iter().map(|&j| data.char(j).clone()).collect();
    if rank(&span) != r {
        return Err(Error::SpanFailure(format!("sector {} does not span", fmt_vec(&f.f))));
    }
    // S ⊆ I_f vanishes iff no anticone fits inside I_f \ S
    let n = gens.len();
    let mut vanishing: Vec<Vec<usize>> = Vec::new();
    let mut subsets: Vec<Vec<usize>> = (0u64..(1u64 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| gens[i]).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for s in subsets {
        if vanishing.iter().any(|v| v.iter().all(|i| s.contains(i))) {
            continue;
        }
        let rest: Vec<usize> = gens.iter().copied().filter(|j| !s.contains(j)).collect();
        if !family.has_member_within(&rest) {
            vanishing.push(s);
        }
    }
    let sr_polys: Vec<(u32, Poly)> = vanishing
        .iter()
        .map(|s| {
            let mut p = Poly::new();
            p.insert(alloc::vec![0u32; r], Q::one());
            for &j in s {
                p = poly_mul(&p, &linear_form(data.char(j)));
            }
            (s.len() as u32, p)
        })
        .collect();

    let mut reducers = Vec::new();
    let mut basis = Vec::new();
    let mut degrees = Vec::new();
    let top_bound = (n - r) as u32 + 1;
    let mut d = 0u32;
    loop {
        let monos = monomials(r, d);
        let index: BTreeMap<Mono, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: QMat = Vec::new();
        for (deg, g) in &sr_polys {
            if *deg > d {
                continue;
            }
            for m in monomials(r, d - deg) {
                let mut mp = Poly::new();
                mp.insert(m, Q::one());
                let prod = poly_mul(&mp, g);
                let mut row = zero_vec(monos.len());
                for (mm, c) in prod {
                    row[index[&mm]] = c;
                }
                rows.push(row);
            }
        }
        let (red, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { rref(&rows) };
        let rows: QMat = red.into_iter().take(pivots.len()).collect();
        let free: Vec<usize> = (0..monos.len()).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            break;
        }
        if d >= top_bound {
            return Err(Error::NotProper(format!("sector {} has an infinite-dimensional ring", fmt_vec(&f.f))));
        }
        let offset = basis.len();
        for &c in &free {
            basis.push(monos[c].clone());
            degrees.push(d);
        }
        reducers.push(Reducer { index, rows, pivots, free, offset });
        d += 1;
    }
    let mut ring = SectorRing {
        sector: f.clone(),
        generators: gens,
        sr_monomials: vanishing,
        basis,
        degrees,
        chars: data.chars().to_vec(),
        reducers,
        table: Vec::new(),
    };
    let dim = ring.dim();
    let mut table = Vec::with_capacity(dim);
    for a in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for b in 0..dim {
            let m: Mono = ring.basis[a].iter().zip(&ring.basis[b]).map(|(x, y)| x + y).collect();
            let mut p = Poly::new();
            p.insert(m, Q::one());
            row.push(ring.normal_form(&p));
        }
        table.push(row);
    }
    ring.table = table;
    Ok(ring)
}

impl SectorRing {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.chars[0].len()
    }

    pub fn top_degree(&self) -> u32 {
        self.degrees.last().copied().unwrap_or(0)
    }

    fn normal_form(&self, p: &Poly) -> RingElem {
        let mut out = zero_vec(self.dim());
        let mut by_deg: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in p {
            let d: u32 = m.iter().sum();
            by_deg.entry(d).or_default().insert(m.clone(), c.clone());
        }
        for (d, part) in by_deg {
            let Some(red) = self.reducers.get(d as usize) else { continue };
            let mut v = zero_vec(red.index.len());
            for (m, c) in part {
                v[red.index[&m]] += c;
            }
            for (row, &p) in red.rows.iter().zip(&red.pivots) {
                if !v[p].is_zero() {
                    let f = v[p].clone();
                    for (x, y) in v.iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
            }
            for (i, &c) in red.free.iter().enumerate() {
                out[red.offset + i] = v[c].clone();
            }
        }
        out
    }

    pub fn zero(&self) -> RingElem {
        zero_vec(self.dim())
    }

    pub fn one(&self) -> RingElem {
        let mut p = Poly::new();
        p.insert(alloc::vec![0u32; self.rank()], Q::one());
        self.normal_form(&p)
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> RingElem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let c = x * y;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &c * t;
                    }
                }
            }
        }
        out
    }

    /// Structure constants: `basis[a] * basis[b]` in coordinates.
    pub fn product_of_basis(&self, a: usize, b: usize) -> &RingElem {
        &self.table[a][b]
    }

    /// `θ(ξ) = Σ a_i u_i` for any solution of `ξ = Σ a_i D_i`.
    pub fn theta(&self, xi: &[Q]) -> RingElem {
        self.normal_form(&linear_form(xi))
    }

    /// The class of the `j`-th coordinate divisor in this sector.
    pub fn restrict_u(&self, j: usize) -> RingElem {
        self.theta(&self.chars[j])
    }

    /// Smallest `n` with `a^n = 0`, or `None` if `a` is not nilpotent.
    pub fn nilpotency_order(&self, a: &[Q]) -> Option<u32> {
        let mut p = self.one();
        for n in 0..=self.top_degree() + 1 {
            if p.iter().all(Zero::is_zero) {
                return Some(n);
            }
            p = self.mul(&p, a);
        }
        None
    }
}

/// `H^*_CR` as the product of its sector rings.
#[derive(Debug, Clone, PartialEq)]
pub struct CrRing {
    pub sectors: Vec<SectorRing>,
    offsets: Vec<usize>,
    dim: usize,
}

/// A Chen–Ruan class as coordinates in the concatenated sector bases.
pub type HcrClass = QVec;

pub fn build_cr_ring(data: &GitData, family: &AnticoneFamily, boxes: &[BoxElement]) -> Result<CrRing> {
    let sectors = boxes.iter().map(|b| build_sector_ring(data, family, b)).collect::<Result<Vec<_>>>()?;
    Ok(CrRing::from_sectors(sectors))
}

impl CrRing {
    pub fn from_sectors(sectors: Vec<SectorRing>) -> CrRing {
        let mut offsets = Vec::new();
        let mut dim = 0;
        for s in &sectors {
            offsets.push(dim);
            dim += s.dim();
        }
        CrRing { sectors, offsets, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self, sector: usize) -> usize {
        self.offsets[sector]
    }

    pub fn sector_index(&self, f: &[Q]) -> Option<usize> {
        let c = crate::git::canonical(f);
        self.sectors.iter().position(|s| s.sector.f == c)
    }

    /// `(sector, local index)` of a global coordinate.
    pub fn locate(&self, idx: usize) -> (usize, usize) {
        let s = self.offsets.iter().rposition(|&o| o <= idx).unwrap_or(0);
        (s, idx - self.offsets[s])
    }

    /// Cohomological degree (in units of 2) of a global coordinate.
    pub fn degree_of(&self, idx: usize) -> u32 {
        let (s, l) = self.locate(idx);
        self.sectors[s].degrees[l]
    }

    pub fn zero(&self) -> HcrClass {
        zero_vec(self.dim)
    }

    /// The identity of the whole product ring.
    pub fn one(&self) -> HcrClass {
        let mut out = self.zero();
        for (i, s) in self.sectors.iter().enumerate() {
            self.embed_into(&mut out, i, &s.one());
        }
        out
    }

    /// `𝟙_f`.
    pub fn unit(&self, sector: usize) -> HcrClass {
        self.embed(sector, &self.sectors[sector].one())
    }

    pub fn embed(&self, sector: usize, a: &[Q]) -> HcrClass {
        let mut out = self.zero();
        self.embed_into(&mut out, sector, a);
        out
    }

    fn embed_into(&self, out: &mut [Q], sector: usize, a: &[Q]) {
        let o = self.offsets[sector];
        for (i, x) in a.iter().enumerate() {
            out[o + i] = x.clone();
        }
    }

    pub fn component<'a>(&self, a: &'a [Q], sector: usize) -> &'a [Q] {
        let o = self.offsets[sector];
        &a[o..o + self.sectors[sector].dim()]
    }

    /// Sector-wise product.
    pub fn mul(&self, a: &[Q], b: &[Q]) -> HcrClass {
        let mut out = self.zero();
        for (i, s) in self.sectors.iter().enumerate() {
            let ca = self.component(a, i);
            if ca.iter().all(Zero::is_zero) {
                continue;
            }
            let cb = self.component(b, i);
            if cb.iter().all(Zero::is_zero) {
                continue;
            }
            self.embed_into(&mut out, i, &s.mul(ca, cb));
        }
        out
    }

    /// `θ(ξ)` in every sector at once.
    pub fn theta(&self, xi: &[Q]) -> HcrClass {
        let mut out = self.zero();
        for (i, s) in self.sectors.iter().enumerate() {
            self.embed_into(&mut out, i, &s.theta(xi));
        }
        out
    }

    pub fn u(&self, j: usize) -> HcrClass {
        let mut out = self.zero();
        for (i, s) in self.sectors.iter().enumerate() {
            self.embed_into(&mut out, i, &s.restrict_u(j));
        }
        out
    }

    pub fn is_nilpotent_part(&self, a: &[Q]) -> bool {
        (0..self.dim).all(|i| a[i].is_zero() || self.degree_of(i) > 0)
    }

    pub fn max_top_degree(&self) -> u32 {
        self.sectors.iter().map(|s| s.top_degree()).max().unwrap_or(0)
    }
}

pub fn hcr_dimension(ring: &CrRing) -> usize {
    ring.dim()
}
