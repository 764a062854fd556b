//! Concrete braided monoidal group families with exact element arithmetic.
//!
//! A family is a groupoid `{G_n}` with block sum, a braiding given by block
//! permutations, and stabilization homomorphisms `G_n -> G_{n+1}`. Three
//! families are built in: symmetric groups acting on finite sets, general
//! linear groups over `Z/m`, and hyperoctahedral (signed permutation)
//! groups. All are symmetric monoidal; the braided-only code paths are
//! still exercised because face maps downstream use explicit inverses of
//! braiding elements.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default cap on `|G_n|` for enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Which concrete family a groupoid models.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Symmetric groups `Sigma_n`, block sum = disjoint union of sets.
    Symmetric,
    /// `GL_n(Z/m)`, block sum = direct sum of free modules.
    GeneralLinear { modulus: u64 },
    /// Signed permutation groups of order `2^n n!`.
    Hyperoctahedral,
}

/// Exact payload of a group element, canonical by construction: two
/// elements are equal iff their payloads compare equal byte for byte.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Payload {
    /// One-indexed image sequence: `images[i-1]` is the image of `i`.
    Perm(Vec<u16>),
    /// Row-major square matrix over `Z/m`, entries reduced to `0..m`.
    Matrix { modulus: u64, entries: Vec<u64> },
    /// Signed permutation: `e_i` maps to `+/- e_{images[i-1]}`, with
    /// `signs[i-1] = true` meaning the negative sign.
    SignedPerm { images: Vec<u16>, signs: Vec<bool> },
}

/// An element of some `G_n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupElement {
    pub kind: FamilyKind,
    pub rank: usize,
    pub payload: Payload,
}

impl GroupElement {
    /// Image sequence for permutation-like payloads.
    pub fn perm_images(&self) -> Option<&[u16]> {
        match &self.payload {
            Payload::Perm(images) => Some(images),
            Payload::SignedPerm { images, .. } => Some(images),
            Payload::Matrix { .. } => None,
        }
    }
}

/// A concrete braided monoidal family.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Family {
    pub kind: FamilyKind,
}

impl Family {
    pub fn symmetric() -> Family {
        Family { kind: FamilyKind::Symmetric }
    }

    pub fn gl(modulus: u64) -> Result<Family> {
        if modulus < 2 {
            return Err(Error::InvalidInput(format!(
                "GL modulus must be at least 2, got {modulus}"
            )));
        }
        Ok(Family { kind: FamilyKind::GeneralLinear { modulus } })
    }

    pub fn hyperoctahedral() -> Family {
        Family { kind: FamilyKind::Hyperoctahedral }
    }

    /// Config-key constructor: `symmetric`, `gl` (with modulus),
    /// `hyperoctahedral`.
    pub fn from_config_key(key: &str, modulus: Option<u64>) -> Result<Family> {
        match key {
            "symmetric" => Ok(Family::symmetric()),
            "gl" => {
                let m = modulus.ok_or_else(|| {
                    Error::InvalidInput("family \"gl\" requires a modulus".into())
                })?;
                Family::gl(m)
            }
            "hyperoctahedral" => Ok(Family::hyperoctahedral()),
            other => Err(Error::InvalidInput(format!("unknown family key {other:?}"))),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            FamilyKind::Symmetric => "symmetric".to_string(),
            FamilyKind::GeneralLinear { modulus } => format!("gl(Z/{modulus})"),
            FamilyKind::Hyperoctahedral => "hyperoctahedral".to_string(),
        }
    }

    /// What one copy of the generating object `X` is.
    pub fn unit_object_label(&self) -> &'static str {
        match self.kind {
            FamilyKind::Symmetric => "one-point set",
            FamilyKind::GeneralLinear { .. } => "rank-1 free module",
            FamilyKind::Hyperoctahedral => "one signed point",
        }
    }

    /// Whether the braiding squares to the identity.
    pub fn symmetry_flag(&self) -> bool {
        // All built-in families are symmetric monoidal.
        true
    }

    pub fn identity(&self, rank: usize) -> GroupElement {
        let payload = match self.kind {
            FamilyKind::Symmetric => Payload::Perm((1..=rank as u16).collect()),
            FamilyKind::GeneralLinear { modulus } => {
                let mut entries = vec![0u64; rank * rank];
                for i in 0..rank {
                    entries[i * rank + i] = 1 % modulus;
                }
                Payload::Matrix { modulus, entries }
            }
            FamilyKind::Hyperoctahedral => Payload::SignedPerm {
                images: (1..=rank as u16).collect(),
                signs: vec![false; rank],
            },
        };
        GroupElement { kind: self.kind, rank, payload }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity(g.rank)
    }

    fn expect_member(&self, g: &GroupElement) -> Result<()> {
        if g.kind != self.kind {
            return Err(Error::FamilyMismatch(format!(
                "element of {:?} used with family {}",
                g.kind,
                self.name()
            )));
        }
        Ok(())
    }

    /// Composition `g o h` (apply `h` first). Errors on family or rank
    /// mismatch.
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.expect_member(g)?;
        self.expect_member(h)?;
        if g.rank != h.rank {
            return Err(Error::InvalidInput(format!(
                "cannot compose ranks {} and {}",
                g.rank, h.rank
            )));
        }
        let n = g.rank;
        let payload = match (&g.payload, &h.payload) {
            (Payload::Perm(a), Payload::Perm(b)) => {
                Payload::Perm(b.iter().map(|&i| a[i as usize - 1]).collect())
            }
            (
                Payload::Matrix { modulus, entries: a },
                Payload::Matrix { entries: b, .. },
            ) => {
                let m = *modulus;
                let mut out = vec![0u64; n * n];
                for i in 0..n {
                    for k in 0..n {
                        let aik = a[i * n + k];
                        if aik == 0 {
                            continue;
                        }
                        for j in 0..n {
                            out[i * n + j] =
                                (out[i * n + j] + aik * b[k * n + j]) % m;
                        }
                    }
                }
                Payload::Matrix { modulus: m, entries: out }
            }
            (
                Payload::SignedPerm { images: ga, signs: gs },
                Payload::SignedPerm { images: ha, signs: hs },
            ) => {
                let mut images = Vec::with_capacity(n);
                let mut signs = Vec::with_capacity(n);
                for i in 0..n {
                    let mid = ha[i] as usize - 1;
                    images.push(ga[mid]);
                    signs.push(hs[i] ^ gs[mid]);
                }
                Payload::SignedPerm { images, signs }
            }
            _ => unreachable!("payload kind fixed by family"),
        };
        Ok(GroupElement { kind: self.kind, rank: n, payload })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.expect_member(g)?;
        let n = g.rank;
        let payload = match &g.payload {
            Payload::Perm(images) => {
                let mut inv = vec![0u16; n];
                for (i, &img) in images.iter().enumerate() {
                    inv[img as usize - 1] = (i + 1) as u16;
                }
                Payload::Perm(inv)
            }
            Payload::Matrix { modulus, entries } => Payload::Matrix {
                modulus: *modulus,
                entries: matrix_inverse_mod(entries, n, *modulus)?,
            },
            Payload::SignedPerm { images, signs } => {
                let mut inv = vec![0u16; n];
                let mut inv_signs = vec![false; n];
                for (i, &img) in images.iter().enumerate() {
                    inv[img as usize - 1] = (i + 1) as u16;
                    inv_signs[img as usize - 1] = signs[i];
                }
                Payload::SignedPerm { images: inv, signs: inv_signs }
            }
        };
        Ok(GroupElement { kind: self.kind, rank: n, payload })
    }

    /// Block sum: `g` acts on the first block, `h` on the second.
    pub fn block_sum(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.expect_member(g)?;
        self.expect_member(h)?;
        let (n, m) = (g.rank, h.rank);
        let rank = n + m;
        let payload = match (&g.payload, &h.payload) {
            (Payload::Perm(a), Payload::Perm(b)) => {
                let mut images = Vec::with_capacity(rank);
                images.extend_from_slice(a);
                images.extend(b.iter().map(|&i| i + n as u16));
                Payload::Perm(images)
            }
            (
                Payload::Matrix { modulus, entries: a },
                Payload::Matrix { entries: b, .. },
            ) => {
                let mut entries = vec![0u64; rank * rank];
                for i in 0..n {
                    for j in 0..n {
                        entries[i * rank + j] = a[i * n + j];
                    }
                }
                for i in 0..m {
                    for j in 0..m {
                        entries[(n + i) * rank + (n + j)] = b[i * m + j];
                    }
                }
                Payload::Matrix { modulus: *modulus, entries }
            }
            (
                Payload::SignedPerm { images: ga, signs: gs },
                Payload::SignedPerm { images: ha, signs: hs },
            ) => {
                let mut images = Vec::with_capacity(rank);
                let mut signs = Vec::with_capacity(rank);
                images.extend_from_slice(ga);
                signs.extend_from_slice(gs);
                images.extend(ha.iter().map(|&i| i + n as u16));
                signs.extend_from_slice(hs);
                Payload::SignedPerm { images, signs }
            }
            _ => unreachable!("payload kind fixed by family"),
        };
        Ok(GroupElement { kind: self.kind, rank, payload })
    }

    /// The image `phi(b_{n,m})` of the block braid: the first `n`-block
    /// moves past the last `m`-block.
    pub fn braiding(&self, n: usize, m: usize) -> GroupElement {
        let rank = n + m;
        // Underlying block permutation: i -> i+m for i <= n, i -> i-n after.
        let block: Vec<u16> = (1..=rank)
            .map(|i| if i <= n { (i + m) as u16 } else { (i - n) as u16 })
            .collect();
        self.from_block_permutation(&block)
    }

    fn from_block_permutation(&self, images: &[u16]) -> GroupElement {
        let rank = images.len();
        let payload = match self.kind {
            FamilyKind::Symmetric => Payload::Perm(images.to_vec()),
            FamilyKind::GeneralLinear { modulus } => {
                let mut entries = vec![0u64; rank * rank];
                for (i, &img) in images.iter().enumerate() {
                    entries[(img as usize - 1) * rank + i] = 1 % modulus;
                }
                Payload::Matrix { modulus, entries }
            }
            FamilyKind::Hyperoctahedral => Payload::SignedPerm {
                images: images.to_vec(),
                signs: vec![false; rank],
            },
        };
        GroupElement { kind: self.kind, rank, payload }
    }

    /// Stabilization `G_n -> G_{n+1}`: block sum with the identity on one
    /// extra copy of `X`.
    pub fn stabilize(&self, g: &GroupElement) -> Result<GroupElement> {
        self.block_sum(g, &self.identity(1))
    }

    /// `|G_n|`.
    pub fn order(&self, n: usize) -> u128 {
        match self.kind {
            FamilyKind::Symmetric => factorial(n),
            FamilyKind::GeneralLinear { modulus } => gl_order(n, modulus),
            FamilyKind::Hyperoctahedral => factorial(n) << n,
        }
    }

    /// Complete, duplicate-free enumeration of `G_n` in lexicographic
    /// payload order, under the default cap.
    pub fn enumerate(&self, n: usize) -> Result<Vec<GroupElement>> {
        self.enumerate_capped(n, DEFAULT_ENUMERATION_CAP)
    }

    pub fn enumerate_capped(&self, n: usize, cap: u128) -> Result<Vec<GroupElement>> {
        let order = self.order(n);
        if order > cap {
            return Err(Error::Resource {
                what: format!("|{}_{}|", self.name(), n),
                size: order,
                cap,
            });
        }
        let elements = match self.kind {
            FamilyKind::Symmetric => enumerate_perms(n)
                .into_iter()
                .map(|images| GroupElement {
                    kind: self.kind,
                    rank: n,
                    payload: Payload::Perm(images),
                })
                .collect::<Vec<_>>(),
            FamilyKind::GeneralLinear { modulus } => {
                let space = (modulus as u128).checked_pow((n * n) as u32);
                match space {
                    Some(s) if s <= 100_000_000 => {}
                    _ => {
                        return Err(Error::Resource {
                            what: format!("matrix search space for {}_{}", self.name(), n),
                            size: space.unwrap_or(u128::MAX),
                            cap: 100_000_000,
                        })
                    }
                }
                enumerate_gl(n, modulus)
                    .into_iter()
                    .map(|entries| GroupElement {
                        kind: self.kind,
                        rank: n,
                        payload: Payload::Matrix { modulus, entries },
                    })
                    .collect()
            }
            FamilyKind::Hyperoctahedral => {
                let mut out = Vec::with_capacity(order as usize);
                for images in enumerate_perms(n) {
                    for mask in 0..(1u64 << n) {
                        let signs = (0..n).map(|i| mask >> i & 1 == 1).collect();
                        out.push(GroupElement {
                            kind: self.kind,
                            rank: n,
                            payload: Payload::SignedPerm { images: images.clone(), signs },
                        });
                    }
                }
                out.sort();
                out
            }
        };
        debug_assert_eq!(elements.len() as u128, order);
        Ok(elements)
    }

    /// A small generating set of `G_n`, used by resolutions and by
    /// declarative coefficient systems.
    pub fn generators(&self, n: usize) -> Vec<GroupElement> {
        match self.kind {
            FamilyKind::Symmetric => {
                let mut gens = Vec::new();
                if n >= 2 {
                    gens.push(self.transposition(n, 1, 2));
                }
                if n >= 3 {
                    gens.push(self.cycle(n));
                }
                gens
            }
            FamilyKind::GeneralLinear { modulus } => {
                let mut gens = Vec::new();
                if n >= 2 {
                    // Elementary transvection E_{12}(1).
                    let mut entries = self.identity(n).payload;
                    if let Payload::Matrix { entries: e, .. } = &mut entries {
                        e[1] = 1 % modulus;
                    }
                    gens.push(GroupElement { kind: self.kind, rank: n, payload: entries });
                    gens.push(self.from_block_permutation(&cycle_images(n)));
                }
                if n >= 1 {
                    for u in unit_group_generators(modulus) {
                        let mut id = self.identity(n);
                        if let Payload::Matrix { entries, .. } = &mut id.payload {
                            entries[0] = u;
                        }
                        gens.push(id);
                    }
                }
                gens.sort();
                gens.dedup();
                gens.retain(|g| !self.is_identity(g));
                gens
            }
            FamilyKind::Hyperoctahedral => {
                let mut gens = Vec::new();
                if n >= 1 {
                    let mut id = self.identity(n);
                    if let Payload::SignedPerm { signs, .. } = &mut id.payload {
                        signs[0] = true;
                    }
                    gens.push(id);
                }
                if n >= 2 {
                    gens.push(self.transposition(n, 1, 2));
                }
                if n >= 3 {
                    gens.push(self.cycle(n));
                }
                gens
            }
        }
    }

    fn transposition(&self, n: usize, a: usize, b: usize) -> GroupElement {
        let mut images = cycle_images(n);
        for (i, v) in images.iter_mut().enumerate() {
            *v = (i + 1) as u16;
        }
        images.swap(a - 1, b - 1);
        self.from_block_permutation(&images)
    }

    fn cycle(&self, n: usize) -> GroupElement {
        self.from_block_permutation(&cycle_images(n))
    }

    /// Exhaustively verify the braid identity, the naturality square and
    /// the conjugation law for all block sizes summing to at most
    /// `n_total`. Failures are report content, not errors.
    pub fn check_braid_axioms(&self, n_total: usize) -> Result<BraidReport> {
        let braiding = |n: usize, m: usize| self.braiding(n, m);
        self.check_braid_axioms_with(n_total, &braiding)
    }

    /// Same as [`check_braid_axioms`](Self::check_braid_axioms) but with an
    /// injectable braiding, so a corrupted braiding can be shown to fail.
    pub fn check_braid_axioms_with(
        &self,
        n_total: usize,
        braiding: &dyn Fn(usize, usize) -> GroupElement,
    ) -> Result<BraidReport> {
        let mut report = BraidReport {
            family: self.name(),
            n_total,
            braid_identity_ok: true,
            naturality_ok: true,
            conjugation_ok: true,
            unit_ok: true,
            symmetry_ok: if self.symmetry_flag() { Some(true) } else { None },
            failures: Vec::new(),
        };

        for n in 0..=n_total {
            if braiding(n, 0) != self.identity(n) || braiding(0, n) != self.identity(n) {
                report.unit_ok = false;
                report.failures.push(format!("unit braiding at rank {n} is not the identity"));
            }
        }

        // Braid identity on three blocks, as elements of G_{a+b+c}.
        for a in 0..=n_total {
            for b in 0..=(n_total - a) {
                for c in 0..=(n_total - a - b) {
                    let id_a = self.identity(a);
                    let id_b = self.identity(b);
                    let id_c = self.identity(c);
                    // sigma_{A,B} sigma_{A,C} sigma_{B,C}, innermost applied first.
                    let s_bc = self.block_sum(&id_a, &braiding(b, c))?;
                    let s_ac = self.block_sum(&braiding(a, c), &id_b)?;
                    let s_ab = self.block_sum(&id_c, &braiding(a, b))?;
                    let lhs = self.compose(&s_ab, &self.compose(&s_ac, &s_bc)?)?;
                    // sigma_{B,C} sigma_{A,C} sigma_{A,B}.
                    let t_ab = self.block_sum(&braiding(a, b), &id_c)?;
                    let t_ac = self.block_sum(&id_b, &braiding(a, c))?;
                    let t_bc = self.block_sum(&braiding(b, c), &id_a)?;
                    let rhs = self.compose(&t_bc, &self.compose(&t_ac, &t_ab)?)?;
                    if lhs != rhs {
                        report.braid_identity_ok = false;
                        report
                            .failures
                            .push(format!("braid identity fails at blocks ({a},{b},{c})"));
                    }
                }
            }
        }

        // Hexagon decompositions: the block braid on a fused block must
        // factor through the smaller block braids.
        for a in 0..=n_total {
            for b in 0..=(n_total - a) {
                for c in 0..=(n_total - a - b) {
                    let id_a = self.identity(a);
                    let id_b = self.identity(b);
                    let id_c = self.identity(c);
                    let fused_left = braiding(a + b, c);
                    let step1 = self.block_sum(&id_a, &braiding(b, c))?;
                    let step2 = self.block_sum(&braiding(a, c), &id_b)?;
                    if self.compose(&step2, &step1)? != fused_left {
                        report.braid_identity_ok = false;
                        report.failures.push(format!(
                            "hexagon fails at blocks ({a},{b},{c}): sigma_({};{}) does not factor",
                            a + b,
                            c
                        ));
                    }
                    let fused_right = braiding(a, b + c);
                    let step1 = self.block_sum(&braiding(a, b), &id_c)?;
                    let step2 = self.block_sum(&id_b, &braiding(a, c))?;
                    if self.compose(&step2, &step1)? != fused_right {
                        report.braid_identity_ok = false;
                        report.failures.push(format!(
                            "hexagon fails at blocks ({a},{b},{c}): sigma_({};{}) does not factor",
                            a,
                            b + c
                        ));
                    }
                }
            }
        }

        // Conjugation law and naturality on all enumerated pairs.
        for n in 0..=n_total {
            for m in 0..=(n_total - n) {
                let b = braiding(n, m);
                let b_inv = self.inverse(&b)?;
                let gs = self.enumerate(n)?;
                let hs = self.enumerate(m)?;
                'outer: for g in &gs {
                    for h in &hs {
                        let sum = self.block_sum(g, h)?;
                        let swapped = self.block_sum(h, g)?;
                        let conj = self.compose(&self.compose(&b, &sum)?, &b_inv)?;
                        if conj != swapped {
                            report.conjugation_ok = false;
                            report.failures.push(format!(
                                "conjugation law fails at blocks ({n},{m}) with witness pair {:?}, {:?}",
                                g.payload, h.payload
                            ));
                            break 'outer;
                        }
                        // Naturality: sigma o (g + h) = (h + g) o sigma.
                        let nat_l = self.compose(&b, &sum)?;
                        let nat_r = self.compose(&swapped, &b)?;
                        if nat_l != nat_r {
                            report.naturality_ok = false;
                            report.failures.push(format!(
                                "naturality square fails at blocks ({n},{m})"
                            ));
                            break 'outer;
                        }
                    }
                }
                if self.symmetry_flag() {
                    let other = braiding(m, n);
                    if self.compose(&other, &b)? != self.identity(n + m) {
                        report.symmetry_ok = Some(false);
                        report
                            .failures
                            .push(format!("braiding does not square to identity at ({n},{m})"));
                    }
                }
            }
        }

        Ok(report)
    }
}

/// Result of [`Family::check_braid_axioms`].
#[derive(Clone, Debug, Serialize)]
pub struct BraidReport {
    pub family: String,
    pub n_total: usize,
    pub braid_identity_ok: bool,
    pub naturality_ok: bool,
    pub conjugation_ok: bool,
    pub unit_ok: bool,
    /// `Some(true)` when the family claims symmetry and it was confirmed.
    pub symmetry_ok: Option<bool>,
    pub failures: Vec<String>,
}

impl BraidReport {
    pub fn passed(&self) -> bool {
        self.braid_identity_ok
            && self.naturality_ok
            && self.conjugation_ok
            && self.unit_ok
            && self.symmetry_ok.unwrap_or(true)
    }
}

fn cycle_images(n: usize) -> Vec<u16> {
    // The n-cycle 1 -> 2 -> ... -> n -> 1.
    (1..=n).map(|i| if i == n { 1 } else { (i + 1) as u16 }).collect()
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn gl_order(n: usize, m: u64) -> u128 {
    if n == 0 {
        return 1;
    }
    let mut order: u128 = 1;
    for (p, e) in factorize(m) {
        let p = p as u128;
        // |GL_n(Z/p^e)| = p^{(e-1) n^2} * prod_{i<n} (p^n - p^i)
        let mut part: u128 = 1;
        for i in 0..n {
            part = part.saturating_mul(p.saturating_pow(n as u32) - p.saturating_pow(i as u32));
        }
        part = part.saturating_mul(p.saturating_pow(((e - 1) as usize * n * n) as u32));
        order = order.saturating_mul(part);
    }
    order
}

fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn enumerate_perms(n: usize) -> Vec<Vec<u16>> {
    let mut current: Vec<u16> = (1..=n as u16).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(seq: &mut [u16]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

fn enumerate_gl(n: usize, m: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let len = n * n;
    let mut entries = vec![0u64; len];
    let mut out = Vec::new();
    loop {
        if is_invertible_mod(&entries, n, m) {
            out.push(entries.clone());
        }
        // Odometer in row-major order; lexicographically sorted output.
        let mut pos = len;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            entries[pos] += 1;
            if entries[pos] < m {
                break;
            }
            entries[pos] = 0;
        }
    }
}

pub(crate) fn is_invertible_mod(entries: &[u64], n: usize, m: u64) -> bool {
    let d = det_mod(entries, n, m);
    gcd_u64(d, m) == 1
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Determinant of an integer lift, reduced mod `m`. Bareiss elimination in
/// `i128`, with a `BigInt` fallback when intermediates overflow.
fn det_mod(entries: &[u64], n: usize, m: u64) -> u64 {
    if n == 0 {
        return 1 % m;
    }
    match det_bareiss_i128(entries, n) {
        Some(d) => d.rem_euclid(m as i128) as u64,
        None => {
            let d = det_bareiss_bigint(entries, n);
            let md = BigInt::from(m);
            let r = ((&d % &md) + &md) % &md;
            r.to_u64().unwrap()
        }
    }
}

fn det_bareiss_i128(entries: &[u64], n: usize) -> Option<i128> {
    let mut a: Vec<i128> = entries.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let pivot = (k + 1..n).find(|&r| a[r * n + k] != 0)?;
            for j in 0..n {
                a.swap(k * n + j, pivot * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = a[i * n + j].checked_mul(a[k * n + k])?;
                let t2 = a[i * n + k].checked_mul(a[k * n + j])?;
                a[i * n + j] = t1.checked_sub(t2)? / prev;
            }
            a[i * n + k] = 0;
        }
        prev = a[k * n + k];
    }
    Some(sign * a[(n - 1) * n + (n - 1)])
}

fn det_bareiss_bigint(entries: &[u64], n: usize) -> BigInt {
    let mut a: Vec<BigInt> = entries.iter().map(|&x| BigInt::from(x)).collect();
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(pivot) => {
                    for j in 0..n {
                        a.swap(k * n + j, pivot * n + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = t / &prev;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = a[k * n + k].clone();
    }
    sign * a[(n - 1) * n + (n - 1)].clone()
}

/// Inverse of a matrix over `Z/m` via the adjugate; requires the
/// determinant to be a unit.
fn matrix_inverse_mod(entries: &[u64], n: usize, m: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let det = det_mod(entries, n, m);
    let det_inv = mod_inverse(det, m).ok_or_else(|| {
        Error::InvalidInput(format!("matrix not invertible mod {m}: det = {det}"))
    })?;
    let mut out = vec![0u64; n * n];
    let mut minor = vec![0u64; (n - 1) * (n - 1)];
    for i in 0..n {
        for j in 0..n {
            // adj(A)[j][i] = (-1)^{i+j} det(minor_{i,j})
            let mut idx = 0;
            for r in 0..n {
                if r == i {
                    continue;
                }
                for c in 0..n {
                    if c == j {
                        continue;
                    }
                    minor[idx] = entries[r * n + c];
                    idx += 1;
                }
            }
            let mut cof = det_mod(&minor, n - 1, m);
            if (i + j) % 2 == 1 && cof != 0 {
                cof = m - cof;
            }
            out[j * n + i] = cof * det_inv % m;
        }
    }
    Ok(out)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

fn unit_group_generators(m: u64) -> Vec<u64> {
    // Greedy generating set of (Z/m)^*, deterministic.
    let units: Vec<u64> = (1..m).filter(|&u| gcd_u64(u, m) == 1).collect();
    let mut span: BTreeSet<u64> = BTreeSet::new();
    span.insert(1 % m);
    let mut gens = Vec::new();
    for &u in &units {
        if span.contains(&u) {
            continue;
        }
        gens.push(u);
        // Close under multiplication.
        let mut frontier: Vec<u64> = vec![u];
        while let Some(x) = frontier.pop() {
            if !span.insert(x) {
                continue;
            }
            for &y in &gens {
                frontier.push(x * y % m);
            }
            for s in span.clone() {
                frontier.push(x * s % m);
            }
        }
    }
    gens
}

/// Validate that an element's payload is a genuine member of its group.
pub fn validate(g: &GroupElement) -> Result<()> {
    match &g.payload {
        Payload::Perm(images) => {
            if images.len() != g.rank || !is_bijection(images) {
                return Err(Error::InvalidInput(format!(
                    "not a permutation of 1..{}: {:?}",
                    g.rank, images
                )));
            }
        }
        Payload::Matrix { modulus, entries } => {
            if entries.len() != g.rank * g.rank
                || entries.iter().any(|&e| e >= *modulus)
                || !is_invertible_mod(entries, g.rank, *modulus)
            {
                return Err(Error::InvalidInput(format!(
                    "not an invertible {0}x{0} matrix mod {1}",
                    g.rank, modulus
                )));
            }
        }
        Payload::SignedPerm { images, signs } => {
            if images.len() != g.rank || signs.len() != g.rank || !is_bijection(images) {
                return Err(Error::InvalidInput("not a signed permutation".into()));
            }
        }
    }
    Ok(())
}

fn is_bijection(images: &[u16]) -> bool {
    let n = images.len();
    let mut seen = vec![false; n];
    for &img in images {
        let i = img as usize;
        if i == 0 || i > n || seen[i - 1] {
            return false;
        }
        seen[i - 1] = true;
    }
    true
}

/// Build a permutation element from one-indexed images, validated.
pub fn perm(images: Vec<u16>) -> Result<GroupElement> {
    let g = GroupElement {
        kind: FamilyKind::Symmetric,
        rank: images.len(),
        payload: Payload::Perm(images),
    };
    validate(&g)?;
    Ok(g)
}

/// Build a GL element from row-major entries, validated.
pub fn gl_element(modulus: u64, rank: usize, entries: Vec<u64>) -> Result<GroupElement> {
    let g = GroupElement {
        kind: FamilyKind::GeneralLinear { modulus },
        rank,
        payload: Payload::Matrix { modulus, entries },
    };
    validate(&g)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_element(family: &Family, n: usize, rng: &mut ChaCha8Rng) -> GroupElement {
        let all = family.enumerate(n).unwrap();
        all[rng.random_range(0..all.len())].clone()
    }

    #[test]
    fn block_sum_places_blocks() {
        let sym = Family::symmetric();
        let swap = perm(vec![2, 1]).unwrap();
        let id1 = sym.identity(1);
        let sum = sym.block_sum(&swap, &id1).unwrap();
        assert_eq!(sum, perm(vec![2, 1, 3]).unwrap());
        // Identities sum to identities.
        let id = sym.block_sum(&sym.identity(2), &sym.identity(3)).unwrap();
        assert_eq!(id, sym.identity(5));
    }

    #[test]
    fn block_sum_is_associative_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in [Family::symmetric(), Family::gl(2).unwrap(), Family::hyperoctahedral()] {
            for _ in 0..100 {
                let a = random_element(&family, rng.random_range(0..=3), &mut rng);
                let b = random_element(&family, rng.random_range(0..=3), &mut rng);
                let c = random_element(&family, rng.random_range(0..=3), &mut rng);
                let left = family.block_sum(&family.block_sum(&a, &b).unwrap(), &c).unwrap();
                let right = family.block_sum(&a, &family.block_sum(&b, &c).unwrap()).unwrap();
                assert_eq!(left, right);
            }
        }
    }

    #[test]
    fn braiding_matches_block_strand_endpoints() {
        let sym = Family::symmetric();
        assert_eq!(sym.braiding(1, 1), perm(vec![2, 1]).unwrap());
        // b_{3,2}: 1->3, 2->4, 3->5, 4->1, 5->2.
        assert_eq!(sym.braiding(3, 2), perm(vec![3, 4, 5, 1, 2]).unwrap());
        assert_eq!(sym.braiding(3, 0), sym.identity(3));
        assert_eq!(sym.braiding(0, 3), sym.identity(3));
    }

    #[test]
    fn braiding_matrix_is_block_permutation_matrix() {
        let gl = Family::gl(2).unwrap();
        let b = gl.braiding(1, 1);
        assert_eq!(
            b,
            gl_element(2, 2, vec![0, 1, 1, 0]).unwrap(),
        );
    }

    #[test]
    fn conjugation_law_exhaustive_symmetric() {
        let sym = Family::symmetric();
        let report = sym.check_braid_axioms(6).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
    }

    #[test]
    fn braid_axioms_gl2_and_hyperoctahedral() {
        let report = Family::gl(2).unwrap().check_braid_axioms(4).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
        assert_eq!(report.symmetry_ok, Some(true));
        let report = Family::hyperoctahedral().check_braid_axioms(4).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
    }

    #[test]
    fn corrupted_braiding_fails_with_witness() {
        let sym = Family::symmetric();
        let corrupted = |n: usize, m: usize| {
            if (n, m) == (1, 1) {
                sym.identity(2)
            } else {
                sym.braiding(n, m)
            }
        };
        let report = sym.check_braid_axioms_with(3, &corrupted).unwrap();
        assert!(!report.passed());
        assert!(report.failures.iter().any(|f| f.contains("1,1")), "{:?}", report.failures);
    }

    #[test]
    fn stabilize_fixes_last_point() {
        let sym = Family::symmetric();
        assert_eq!(sym.stabilize(&sym.identity(2)).unwrap(), sym.identity(3));
        let swap = perm(vec![2, 1]).unwrap();
        assert_eq!(sym.stabilize(&swap).unwrap(), perm(vec![2, 1, 3]).unwrap());
    }

    #[test]
    fn stabilize_is_an_injective_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for family in [Family::symmetric(), Family::gl(3).unwrap()] {
            let elems = family.enumerate(3).unwrap();
            for _ in 0..100 {
                let g = &elems[rng.random_range(0..elems.len())];
                let h = &elems[rng.random_range(0..elems.len())];
                let gh = family.compose(g, h).unwrap();
                let lhs = family.stabilize(&gh).unwrap();
                let rhs = family
                    .compose(&family.stabilize(g).unwrap(), &family.stabilize(h).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
            // Injectivity on an enumerated rank.
            let images: BTreeSet<_> =
                elems.iter().map(|g| family.stabilize(g).unwrap()).collect();
            assert_eq!(images.len(), elems.len());
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(Family::symmetric().enumerate(3).unwrap().len(), 6);
        assert_eq!(Family::gl(2).unwrap().enumerate(2).unwrap().len(), 6);
        // (8-1)(8-2)(8-4) = 168
        assert_eq!(Family::gl(2).unwrap().enumerate(3).unwrap().len(), 168);
        assert_eq!(Family::hyperoctahedral().enumerate(3).unwrap().len(), 48);
        // Composite modulus: |GL_2(Z/4)| = 2^4 * 6 = 96.
        assert_eq!(Family::gl(4).unwrap().enumerate(2).unwrap().len(), 96);
    }

    #[test]
    fn enumerate_cap_exceeded_names_order() {
        let err = Family::symmetric().enumerate_capped(10, 1000).unwrap_err();
        match err {
            Error::Resource { size, .. } => assert_eq!(size, 3628800),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn group_axioms_on_enumerated_ranks() {
        for family in [Family::symmetric(), Family::gl(4).unwrap(), Family::hyperoctahedral()] {
            for n in 0..=2 {
                let elems = family.enumerate(n).unwrap();
                let id = family.identity(n);
                for g in &elems {
                    validate(g).unwrap();
                    assert_eq!(family.compose(g, &id).unwrap(), *g);
                    assert_eq!(family.compose(&id, g).unwrap(), *g);
                    let inv = family.inverse(g).unwrap();
                    assert_eq!(family.compose(g, &inv).unwrap(), id);
                    assert_eq!(family.compose(&inv, g).unwrap(), id);
                }
            }
        }
    }

    #[test]
    fn composition_is_associative_gl3_mod2_sample() {
        let family = Family::gl(2).unwrap();
        let elems = family.enumerate(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = &elems[rng.random_range(0..elems.len())];
            let b = &elems[rng.random_range(0..elems.len())];
            let c = &elems[rng.random_range(0..elems.len())];
            let l = family.compose(&family.compose(a, b).unwrap(), c).unwrap();
            let r = family.compose(a, &family.compose(b, c).unwrap()).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn family_mismatch_is_rejected() {
        let sym = Family::symmetric();
        let gl = Family::gl(2).unwrap();
        let err = sym.compose(&sym.identity(2), &gl.identity(2)).unwrap_err();
        assert!(matches!(err, Error::FamilyMismatch(_)));
        let err = sym.block_sum(&gl.identity(1), &sym.identity(1)).unwrap_err();
        assert!(matches!(err, Error::FamilyMismatch(_)));
    }

    #[test]
    fn generators_generate() {
        for (family, n) in [
            (Family::symmetric(), 4),
            (Family::gl(2).unwrap(), 3),
            (Family::gl(4).unwrap(), 2),
            (Family::hyperoctahedral(), 3),
        ] {
            let gens = family.generators(n);
            let all = family.enumerate(n).unwrap();
            let mut span: BTreeSet<GroupElement> = BTreeSet::new();
            let mut frontier = vec![family.identity(n)];
            while let Some(x) = frontier.pop() {
                if !span.insert(x.clone()) {
                    continue;
                }
                for g in &gens {
                    frontier.push(family.compose(&x, g).unwrap());
                }
            }
            assert_eq!(span.len(), all.len(), "family {} rank {n}", family.name());
        }
    }

    #[test]
    fn config_keys_select_families() {
        assert_eq!(Family::from_config_key("symmetric", None).unwrap(), Family::symmetric());
        assert_eq!(
            Family::from_config_key("gl", Some(5)).unwrap(),
            Family::gl(5).unwrap()
        );
        assert!(Family::from_config_key("gl", None).is_err());
        assert!(Family::from_config_key("nope", None).is_err());
    }
}
