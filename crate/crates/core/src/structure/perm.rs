//! Permutations and permutation groups with orbit-stabilizer order
//! computation (Schreier-Sims). This carrier suits modest degrees; large
//! regular representations are better analyzed directly on the coset table
//! (see [`super::series::TableGroup`]).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::StructureError;

const U32_UNDEF: u32 = u32::MAX;

/// A permutation of `{0, .., n-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from an image list, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Perm, StructureError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            if img as usize >= n || seen[img as usize] {
                return Err(StructureError::InvalidPermutation);
            }
            seen[img as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds from 0-based cycles over `{0, .., degree-1}`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Perm, StructureError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cyc in cycles {
            for k in 0..cyc.len() {
                let from = cyc[k] as usize;
                let to = cyc[(k + 1) % cyc.len()];
                if from >= degree || to as usize >= degree {
                    return Err(StructureError::InvalidPermutation);
                }
                images[from] = to;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self
                .images
                .iter()
                .map(|&v| other.images[v as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u32; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u32;
        }
        Perm { images }
    }

    pub fn commutator(&self, other: &Perm) -> Perm {
        self.inverse()
            .compose(&other.inverse())
            .compose(self)
            .compose(other)
    }

    /// Element order: least common multiple of the cycle lengths.
    pub fn order(&self) -> BigInt {
        let mut seen = vec![false; self.images.len()];
        let mut ord = BigInt::one();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut p = start;
            loop {
                seen[p] = true;
                len += 1;
                p = self.images[p] as usize;
                if p == start {
                    break;
                }
            }
            ord = ord.lcm(&BigInt::from(len));
        }
        ord
    }

    /// Cycle notation with 1-based points; fixed points omitted.
    pub fn cycle_string(&self) -> String {
        use core::fmt::Write as _;
        let mut seen = vec![false; self.images.len()];
        let mut out = String::new();
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut p = start;
            let mut first = true;
            loop {
                seen[p] = true;
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{}", p + 1);
                first = false;
                p = self.images[p] as usize;
                if p == start {
                    break;
                }
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// A group of permutations of a common domain, given by generators.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup, StructureError> {
        for g in &gens {
            if g.degree() != degree {
                return Err(StructureError::DegreeMismatch);
            }
        }
        Ok(PermGroup { degree, gens })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn is_abelian(&self) -> bool {
        for (i, a) in self.gens.iter().enumerate() {
            for b in &self.gens[i + 1..] {
                if !a.commutator(b).is_identity() {
                    return false;
                }
            }
        }
        true
    }

    /// Group order by a base-and-strong-generators chain: orbits with
    /// Schreier vectors per level, verified by sifting every Schreier
    /// generator until no violation remains. The group acting at level `l`
    /// is generated by the strong generators introduced at level `l` and
    /// all deeper ones (they fix the earlier base points but still move
    /// points of this level's orbit).
    pub fn order(&self) -> BigInt {
        let live: Vec<Perm> = self
            .gens
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        if live.is_empty() {
            return BigInt::one();
        }
        let mut chain: Vec<Level> = Vec::new();
        let beta = first_moved(&live[0]);
        chain.push(Level::new(self.degree, beta, live));

        'verify: loop {
            rebuild_chain(&mut chain);
            for lvl in 0..chain.len() {
                let orbit: Vec<u32> = chain[lvl].orbit.clone();
                for &delta in &orbit {
                    let u = chain[lvl].rep(delta);
                    for gi in 0..chain[lvl].act.len() {
                        let s = chain[lvl].act[gi].clone();
                        let eps = s.image(delta as usize) as u32;
                        let v = chain[lvl].rep(eps);
                        let schreier = u.compose(&s).compose(&v.inverse());
                        if let Some((residue, at)) = sift(&chain, lvl + 1, schreier) {
                            if at == chain.len() {
                                let beta = first_moved(&residue);
                                chain.push(Level::new(self.degree, beta, vec![residue]));
                            } else {
                                chain[at].gens.push(residue);
                            }
                            continue 'verify;
                        }
                    }
                }
            }
            break;
        }

        let mut order = BigInt::one();
        for level in &chain {
            order *= BigInt::from(level.orbit.len());
        }
        order
    }
}

struct Level {
    beta: u32,
    /// Strong generators introduced at this level.
    gens: Vec<Perm>,
    /// Acting set for this level: `gens` plus every deeper level's.
    act: Vec<Perm>,
    orbit: Vec<u32>,
    // For each point in the orbit: index into `act` of the permutation
    // whose application reached it (U32_UNDEF at beta and off-orbit points).
    via: Vec<u32>,
}

impl Level {
    fn new(degree: usize, beta: u32, gens: Vec<Perm>) -> Level {
        Level {
            beta,
            gens,
            act: Vec::new(),
            orbit: Vec::new(),
            via: vec![U32_UNDEF; degree],
        }
    }

    fn rebuild_orbit(&mut self) {
        self.via.iter_mut().for_each(|v| *v = U32_UNDEF);
        self.orbit.clear();
        self.orbit.push(self.beta);
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head] as usize;
            head += 1;
            for (gi, g) in self.act.iter().enumerate() {
                let q = g.image(p) as u32;
                if q != self.beta && self.via[q as usize] == U32_UNDEF {
                    self.via[q as usize] = gi as u32;
                    self.orbit.push(q);
                }
            }
        }
    }

    fn in_orbit(&self, p: u32) -> bool {
        p == self.beta || self.via[p as usize] != U32_UNDEF
    }

    /// Transversal representative mapping beta to `p`.
    fn rep(&self, p: u32) -> Perm {
        let mut path: Vec<u32> = Vec::new();
        let mut q = p;
        while q != self.beta {
            let gi = self.via[q as usize];
            path.push(gi);
            q = self.act[gi as usize].inverse().image(q as usize) as u32;
        }
        let degree = self.via.len();
        let mut rep = Perm::identity(degree);
        for &gi in path.iter().rev() {
            rep = rep.compose(&self.act[gi as usize]);
        }
        rep
    }
}

/// Refreshes each level's acting set (own generators plus all deeper
/// levels') and its orbit, deepest level first.
fn rebuild_chain(chain: &mut [Level]) {
    for lvl in (0..chain.len()).rev() {
        let mut act = chain[lvl].gens.clone();
        if lvl + 1 < chain.len() {
            act.extend(chain[lvl + 1].act.iter().cloned());
        }
        chain[lvl].act = act;
        chain[lvl].rebuild_orbit();
    }
}

fn first_moved(g: &Perm) -> u32 {
    (0..g.degree())
        .find(|&p| g.image(p) != p)
        .expect("identity has no moved point") as u32
}

/// Strips `g` through the chain from `from`. `None` means it sifted to the
/// identity; otherwise the residue and the level where it got stuck (equal
/// to `chain.len()` when it fell off the end).
fn sift(chain: &[Level], from: usize, mut g: Perm) -> Option<(Perm, usize)> {
    for (lvl, level) in chain.iter().enumerate().skip(from) {
        if g.is_identity() {
            return None;
        }
        let delta = g.image(level.beta as usize) as u32;
        if !level.in_orbit(delta) {
            return Some((g, lvl));
        }
        g = g.compose(&level.rep(delta).inverse());
    }
    if g.is_identity() {
        None
    } else {
        Some((g, chain.len()))
    }
}

/// Derived subgroup of a permutation group: the normal closure of the
/// generator commutators, returned by a generating set.
pub fn derived_subgroup(
    g: &PermGroup,
    limits: &super::series::StructureLimits,
) -> Result<PermGroup, StructureError> {
    if g.degree() > limits.max_degree {
        return Err(StructureError::DegreeLimitExceeded {
            degree: g.degree(),
            limit: limits.max_degree,
        });
    }
    let mut seeds: Vec<Perm> = Vec::new();
    for (i, a) in g.gens().iter().enumerate() {
        for b in &g.gens()[i + 1..] {
            let c = a.commutator(b);
            if !c.is_identity() {
                seeds.push(c);
            }
        }
    }
    let data = super::series::normal_closure_of(g, &seeds, &g.gens().to_vec(), limits)?;
    PermGroup::new(g.degree(), data.gens)
}

impl super::series::FiniteGroup for PermGroup {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    fn mul(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }

    fn inv(&self, a: &Perm) -> Perm {
        a.inverse()
    }

    fn generators(&self) -> Vec<Perm> {
        self.gens.clone()
    }

    fn order(&self) -> BigInt {
        PermGroup::order(self)
    }

    fn carrier_size(&self) -> usize {
        self.degree
    }
}
