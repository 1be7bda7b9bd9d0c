//! CSS code constructors: rotated surface codes and bivariate bicycle codes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitVec, RowSpace, SparseBinMatrix};

/// A CSS code with its check and logical operator matrices.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub hx: SparseBinMatrix,
    pub hz: SparseBinMatrix,
    pub ox: SparseBinMatrix,
    pub oz: SparseBinMatrix,
    /// Distance as published for the family; recorded, not verified.
    pub distance: Option<usize>,
}

impl CssCode {
    /// Assembles a code from its check matrices, computing logicals and
    /// verifying the CSS identities.
    pub fn from_checks(
        label: impl Into<String>,
        hx: SparseBinMatrix,
        hz: SparseBinMatrix,
        distance: Option<usize>,
    ) -> Result<Self> {
        let (ox, oz) = compute_logicals(&hx, &hz)?;
        let code = CssCode {
            label: label.into(),
            n: hx.cols(),
            k: ox.rows(),
            hx,
            hz,
            ox,
            oz,
            distance,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn mx(&self) -> usize {
        self.hx.rows()
    }

    pub fn mz(&self) -> usize {
        self.hz.rows()
    }

    /// Checks commutation, logical orthogonality, pairing and the dimension count.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("{}: {what}", self.label)));
        if !gf2::mat_mat_t(&self.hz, &self.hx)?.is_zero() {
            return fail("H_Z H_X^T != 0");
        }
        if !gf2::mat_mat_t(&self.oz, &self.hx)?.is_zero() {
            return fail("O_Z H_X^T != 0");
        }
        if !gf2::mat_mat_t(&self.ox, &self.hz)?.is_zero() {
            return fail("O_X H_Z^T != 0");
        }
        let pairing = gf2::mat_mat_t(&self.ox, &self.oz)?;
        if gf2::rank(&pairing) != self.k {
            return fail("O_X O_Z^T is not full rank");
        }
        if self.n - gf2::rank(&self.hx) - gf2::rank(&self.hz) != self.k {
            return fail("k != n - rank(H_X) - rank(H_Z)");
        }
        Ok(())
    }

    pub fn max_check_row_weight(&self) -> usize {
        self.hx.max_row_weight().max(self.hz.max_row_weight())
    }

    pub fn max_check_col_weight(&self) -> usize {
        self.hx.max_col_weight().max(self.hz.max_col_weight())
    }
}

/// Logical operator bases `(O_X, O_Z)` paired so that `O_X · O_Zᵀ = I`.
///
/// `O_Z` rows are kernel vectors of `H_X` independent modulo the row space
/// of `H_Z`; `O_X` symmetrically. No weight minimisation is attempted.
pub fn compute_logicals(
    hx: &SparseBinMatrix,
    hz: &SparseBinMatrix,
) -> Result<(SparseBinMatrix, SparseBinMatrix)> {
    if hx.cols() != hz.cols() {
        return Err(Error::InvalidArgument(format!(
            "H_X has {} columns but H_Z has {}",
            hx.cols(),
            hz.cols()
        )));
    }
    if !gf2::mat_mat_t(hz, hx)?.is_zero() {
        return Err(Error::InvalidArgument("H_Z H_X^T != 0; checks do not commute".into()));
    }
    let lz = coset_basis(hx, hz)?;
    let lx = coset_basis(hz, hx)?;
    let n = hx.cols();
    let k = lz.len();
    if lx.len() != k {
        return Err(Error::Internal("logical X and Z counts disagree".into()));
    }
    let lx = SparseBinMatrix::from_rows(n, &lx)?;
    let lz = SparseBinMatrix::from_rows(n, &lz)?;
    let pairing = gf2::mat_mat_t(&lx, &lz)?;
    let inv = gf2::inverse(&pairing)?
        .ok_or_else(|| Error::Internal("logical pairing matrix is singular".into()))?;
    let ox = inv.mul(&lx)?;
    Ok((ox, lz))
}

/// Kernel vectors of `orth` that are independent modulo the row space of `stab`.
fn coset_basis(orth: &SparseBinMatrix, stab: &SparseBinMatrix) -> Result<Vec<BitVec>> {
    let mut span = RowSpace::new(stab);
    let mut out = Vec::new();
    for v in gf2::nullspace(orth) {
        if span.extend(&v)? {
            out.push(v);
        }
    }
    Ok(out)
}

/// Greedily lowers the weight of `v` by adding rows of `stabilizers` while
/// that strictly helps. The result is in the same coset.
pub fn reduce_weight(v: &BitVec, stabilizers: &SparseBinMatrix) -> Result<BitVec> {
    let mut cur = v.clone();
    loop {
        let mut improved = false;
        for i in 0..stabilizers.rows() {
            let cand = cur.xor(&stabilizers.row_vec(i))?;
            if cand.weight() < cur.weight() {
                cur = cand;
                improved = true;
            }
        }
        if !improved {
            return Ok(cur);
        }
    }
}

/// Rotated surface code `[[d², 1, d]]` on a d×d lattice, qubit `(r, c)` at
/// index `r·d + c`.
///
/// Plaquette `(pr, pc)` covers the data qubits `(pr..=pr+1, pc..=pc+1)`
/// clipped to the lattice, with `pr, pc ∈ -1..d`. Bulk plaquettes alternate X
/// and Z by parity of `pr + pc`; weight-2 X checks sit on the top and bottom
/// edges, Z checks on the left and right.
pub fn build_rotated_surface(d: usize) -> Result<CssCode> {
    let layout = SurfaceLayout::new(d)?;
    let n = d * d;
    let hx = SparseBinMatrix::from_row_supports(n, layout.x_plaquettes.iter().map(|p| p.support()).collect())?;
    let hz = SparseBinMatrix::from_row_supports(n, layout.z_plaquettes.iter().map(|p| p.support()).collect())?;
    let code = CssCode::from_checks(format!("surface-d{d}"), hx, hz, Some(d))?;
    if code.k != 1 {
        return Err(Error::Internal(format!("rotated surface d={d} has k={}", code.k)));
    }
    Ok(code)
}

/// Geometry shared by the code constructor and the syndrome circuit.
#[derive(Clone, Debug)]
pub struct SurfaceLayout {
    pub d: usize,
    pub x_plaquettes: Vec<Plaquette>,
    pub z_plaquettes: Vec<Plaquette>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plaquette {
    pub d: usize,
    pub pr: isize,
    pub pc: isize,
}

impl Plaquette {
    /// Corner qubits in NW, NE, SW, SE order; `None` where off the lattice.
    pub fn corners(&self) -> [Option<usize>; 4] {
        let d = self.d as isize;
        let at = |r: isize, c: isize| {
            (r >= 0 && r < d && c >= 0 && c < d).then(|| (r * d + c) as usize)
        };
        [
            at(self.pr, self.pc),
            at(self.pr, self.pc + 1),
            at(self.pr + 1, self.pc),
            at(self.pr + 1, self.pc + 1),
        ]
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.corners().into_iter().flatten().collect();
        s.sort_unstable();
        s
    }
}

impl SurfaceLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "rotated surface code needs odd d >= 3, got {d}"
            )));
        }
        let di = d as isize;
        let mut x_plaquettes = Vec::new();
        let mut z_plaquettes = Vec::new();
        for pr in -1..di {
            for pc in -1..di {
                let p = Plaquette { d, pr, pc };
                let is_x = (pr + pc).rem_euclid(2) == 0;
                let bulk = pr >= 0 && pr < di - 1 && pc >= 0 && pc < di - 1;
                let top_bottom = (pr == -1 || pr == di - 1) && pc >= 0 && pc < di - 1;
                let left_right = (pc == -1 || pc == di - 1) && pr >= 0 && pr < di - 1;
                if (bulk || top_bottom) && is_x {
                    x_plaquettes.push(p);
                } else if (bulk || left_right) && !is_x {
                    z_plaquettes.push(p);
                }
            }
        }
        Ok(SurfaceLayout {
            d,
            x_plaquettes,
            z_plaquettes,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftVar {
    X,
    Y,
}

/// A power of one of the two commuting shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub var: ShiftVar,
    pub exp: usize,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.var {
            ShiftVar::X => 'x',
            ShiftVar::Y => 'y',
        };
        write!(f, "{v}{}", self.exp)
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let var = match chars.next() {
            Some('x') | Some('X') => ShiftVar::X,
            Some('y') | Some('Y') => ShiftVar::Y,
            _ => return Err(Error::InvalidArgument(format!("monomial {s:?} must start with x or y"))),
        };
        let rest = chars.as_str();
        let exp = if rest.is_empty() {
            1
        } else {
            rest.trim_start_matches('^')
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad exponent in monomial {s:?}")))?
        };
        Ok(Monomial { var, exp })
    }
}

/// Parameters of a bivariate bicycle code: `A = A₁+A₂+A₃`, `B = B₁+B₂+B₃`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BbParams {
    pub l: usize,
    pub m: usize,
    pub a: [Monomial; 3],
    pub b: [Monomial; 3],
}

const TABLE_A: [Monomial; 3] = [
    Monomial { var: ShiftVar::X, exp: 3 },
    Monomial { var: ShiftVar::Y, exp: 1 },
    Monomial { var: ShiftVar::Y, exp: 2 },
];
const TABLE_B: [Monomial; 3] = [
    Monomial { var: ShiftVar::Y, exp: 3 },
    Monomial { var: ShiftVar::X, exp: 1 },
    Monomial { var: ShiftVar::X, exp: 2 },
];

impl BbParams {
    pub fn new(l: usize, m: usize, a: [Monomial; 3], b: [Monomial; 3]) -> Result<Self> {
        let p = BbParams { l, m, a, b };
        p.validate()?;
        Ok(p)
    }

    /// `A = x³ + y + y²`, `B = y³ + x + x²` with the given `(l, m)`.
    pub fn standard(l: usize, m: usize) -> Result<Self> {
        Self::new(l, m, TABLE_A, TABLE_B)
    }

    pub fn bb72() -> Self {
        Self::standard(6, 6).expect("valid table parameters")
    }

    pub fn bb108() -> Self {
        Self::standard(9, 6).expect("valid table parameters")
    }

    pub fn bb144() -> Self {
        Self::standard(12, 6).expect("valid table parameters")
    }

    pub fn parse_monomials(s: &str) -> Result<[Monomial; 3]> {
        let parts: Vec<Monomial> = s
            .split([',', '+'])
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        parts
            .try_into()
            .map_err(|v: Vec<Monomial>| Error::InvalidArgument(format!("expected 3 monomials, got {}", v.len())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.m == 0 {
            return Err(Error::InvalidArgument("l and m must be positive".into()));
        }
        for mono in self.a.iter().chain(&self.b) {
            let bound = match mono.var {
                ShiftVar::X => self.l,
                ShiftVar::Y => self.m,
            };
            if mono.exp >= bound {
                return Err(Error::InvalidArgument(format!(
                    "exponent of {mono} must be reduced below {bound}"
                )));
            }
        }
        for poly in [&self.a, &self.b] {
            if poly[0] == poly[1] || poly[0] == poly[2] || poly[1] == poly[2] {
                return Err(Error::InvalidArgument("monomials within A or B must be distinct".into()));
            }
        }
        Ok(())
    }

    pub fn half(&self) -> usize {
        self.l * self.m
    }

    /// Published distance for the three tabulated codes.
    pub fn known_distance(&self) -> Option<usize> {
        if self.a != TABLE_A || self.b != TABLE_B {
            return None;
        }
        match (self.l, self.m) {
            (6, 6) => Some(6),
            (9, 6) => Some(10),
            (12, 6) => Some(12),
            _ => None,
        }
    }

    /// Permutation `i ↦ j` where the monomial's matrix has a one at `(i, j)`.
    /// Index `i = a·m + b` for `a ∈ 0..l`, `b ∈ 0..m`.
    pub fn perm(&self, mono: Monomial) -> Vec<usize> {
        let (l, m) = (self.l, self.m);
        (0..l * m)
            .map(|i| {
                let (a, b) = (i / m, i % m);
                match mono.var {
                    ShiftVar::X => ((a + mono.exp) % l) * m + b,
                    ShiftVar::Y => a * m + (b + mono.exp) % m,
                }
            })
            .collect()
    }

    pub fn monomial_matrix(&self, mono: Monomial) -> SparseBinMatrix {
        let rows = self.perm(mono).into_iter().map(|j| vec![j]).collect();
        SparseBinMatrix::from_row_supports_unchecked(self.half(), rows)
    }

    pub fn a_terms(&self) -> [SparseBinMatrix; 3] {
        self.a.map(|t| self.monomial_matrix(t))
    }

    pub fn b_terms(&self) -> [SparseBinMatrix; 3] {
        self.b.map(|t| self.monomial_matrix(t))
    }

    pub fn label(&self) -> String {
        let join = |p: &[Monomial; 3]| p.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",");
        format!("bb-l{}-m{}-a{}-b{}", self.l, self.m, join(&self.a), join(&self.b))
    }
}

fn sum3(terms: &[SparseBinMatrix; 3]) -> SparseBinMatrix {
    terms[0]
        .add(&terms[1])
        .and_then(|s| s.add(&terms[2]))
        .expect("equal-shape blocks")
}

/// Bivariate bicycle code with `H_X = [A | B]` and `H_Z = [Bᵀ | Aᵀ]`.
/// Left-block qubits are `0..lm`, right-block qubits `lm..2lm`.
pub fn build_bb(p: &BbParams) -> Result<CssCode> {
    p.validate()?;
    let a = sum3(&p.a_terms());
    let b = sum3(&p.b_terms());
    let hx = SparseBinMatrix::hstack(&[&a, &b])?;
    let hz = SparseBinMatrix::hstack(&[&b.transpose(), &a.transpose()])?;
    let mut code = CssCode::from_checks(p.label(), hx, hz, p.known_distance())?;
    if let Some(d) = code.distance {
        code.label = format!("bb-[[{},{},{d}]]", code.n, code.k);
    }
    Ok(code)
}
