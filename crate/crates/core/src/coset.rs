//! Coset enumeration (Todd-Coxeter) over finite presentations.
//!
//! Two strategies are provided: relator-scanning HLT with lookahead and
//! compaction (the default), and definition-minimal Felsch driven by a
//! deduction stack. Both number cosets in definition order under a fixed
//! scan order, so a completed table is reproducible byte for byte.
//!
//! Exceeding a limit is not a fault: the table comes back with
//! [`TableStatus::Overflowed`] and whatever was built so far. Relators whose
//! letter count already exceeds the coset budget are rejected up front the
//! same way.

use core::fmt::Write as _;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::structure::perm::Perm;
use crate::word::{GenSym, Presentation, Word, WordError};

const UNDEF: u32 = u32::MAX;

/// Generating words for the subgroup whose cosets are enumerated. An empty
/// list means the trivial subgroup (regular enumeration).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub generators: Vec<Word>,
}

impl SubgroupSpec {
    /// The trivial subgroup.
    pub fn trivial() -> SubgroupSpec {
        SubgroupSpec::default()
    }

    pub fn new(generators: Vec<Word>) -> SubgroupSpec {
        SubgroupSpec { generators }
    }
}

/// Resource budget for one enumeration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumLimits {
    /// Maximum number of coset definitions held at once (live plus dead
    /// between compactions).
    pub max_cosets: usize,
    /// Wall-clock budget in seconds. Enforced only when the crate's `std`
    /// feature is enabled; ignored otherwise.
    pub max_seconds: f64,
}

impl Default for EnumLimits {
    fn default() -> EnumLimits {
        EnumLimits {
            max_cosets: 2_000_000,
            max_seconds: 600.0,
        }
    }
}

/// Enumeration strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Relator scanning with gap filling, plus lookahead and compaction
    /// when the coset budget fills up.
    #[default]
    Hlt,
    /// Definition-minimal enumeration with full deduction processing.
    Felsch,
}

/// Whether the enumeration finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableStatus {
    /// The table is closed: every entry defined, every relator satisfied.
    Complete,
    /// A limit was hit; the table is a partial snapshot.
    Overflowed,
}

/// Counters describing the run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    /// Total cosets ever defined (including later-collapsed ones).
    pub cosets_defined: u64,
    /// Cosets removed by coincidence processing.
    pub cosets_collapsed: u64,
    /// Table entries filled by deduction rather than definition.
    pub deductions: u64,
    /// Lookahead passes performed (HLT only).
    pub lookaheads: u32,
    /// Compaction passes performed.
    pub compactions: u32,
}

/// Errors raised for invalid inputs (limit overruns are in-band, see
/// [`TableStatus::Overflowed`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetError {
    /// A word mentions a generator the presentation does not declare.
    Word(WordError),
    /// The operation needs a completed table.
    Incomplete,
    /// The operation needs a regular (trivial-subgroup) table.
    NotRegular,
}

impl core::fmt::Display for CosetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CosetError::Word(e) => write!(f, "{e}"),
            CosetError::Incomplete => write!(f, "operation requires a completed coset table"),
            CosetError::NotRegular => {
                write!(f, "operation requires a regular (trivial-subgroup) enumeration")
            }
        }
    }
}

impl core::error::Error for CosetError {}

impl From<WordError> for CosetError {
    fn from(e: WordError) -> CosetError {
        CosetError::Word(e)
    }
}

/// A coset table produced by [`enumerate`]. Cosets are numbered from zero
/// internally (coset 0 is the subgroup itself); the text dump uses 1-based
/// numbers.
#[derive(Clone, Debug)]
pub struct CosetTable {
    gens: Vec<GenSym>,
    ncols: usize,
    count: usize,
    table: Vec<u32>,
    status: TableStatus,
    stats: EnumStats,
    regular: bool,
}

impl CosetTable {
    pub fn status(&self) -> TableStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == TableStatus::Complete
    }

    /// Number of (live) cosets. For a completed regular enumeration this is
    /// the group order.
    pub fn coset_count(&self) -> usize {
        self.count
    }

    pub fn stats(&self) -> &EnumStats {
        &self.stats
    }

    pub fn gens(&self) -> &[GenSym] {
        &self.gens
    }

    /// True when the enumeration ran over the trivial subgroup.
    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// Raw table entry: image of `coset` under signed generator column
    /// `col` (column `2i` is generator `i`, column `2i+1` its inverse).
    /// `UNDEF` entries only occur in overflowed tables.
    pub(crate) fn entry(&self, coset: u32, col: u32) -> u32 {
        self.table[coset as usize * self.ncols + col as usize]
    }

    pub(crate) fn ncols(&self) -> usize {
        self.ncols
    }

    fn col_of(&self, sym: &GenSym, negative: bool) -> Result<u32, CosetError> {
        let idx = self
            .gens
            .iter()
            .position(|g| g == sym)
            .ok_or_else(|| CosetError::Word(WordError::UndeclaredGenerator(sym.as_str().into())))?;
        Ok((2 * idx + usize::from(negative)) as u32)
    }

    /// The permutation a word induces on the cosets. Requires a completed
    /// table. Arbitrary-size exponents are folded through the cycle
    /// structure of each generator column, so `x^(10^30)` is fine.
    pub fn word_permutation(&self, w: &Word) -> Result<Perm, CosetError> {
        if !self.is_complete() {
            return Err(CosetError::Incomplete);
        }
        let n = self.count;
        let mut images: Vec<u32> = (0..n as u32).collect();
        for syl in w.syllables() {
            let col = self.col_of(&syl.sym, syl.exp.is_negative())?;
            let col_perm = self.column_power(col, &syl.exp.abs());
            for img in images.iter_mut() {
                *img = col_perm[*img as usize];
            }
        }
        Ok(Perm::from_images(images).expect("complete tables act by permutations"))
    }

    /// The image of the full column permutation raised to `k >= 0`,
    /// computed cycle by cycle.
    fn column_power(&self, col: u32, k: &BigInt) -> Vec<u32> {
        let n = self.count;
        let mut out = vec![UNDEF; n];
        let mut cycle: Vec<u32> = Vec::new();
        for start in 0..n as u32 {
            if out[start as usize] != UNDEF {
                continue;
            }
            cycle.clear();
            let mut c = start;
            loop {
                cycle.push(c);
                c = self.entry(c, col);
                if c == start {
                    break;
                }
            }
            let len = cycle.len();
            let shift = k.mod_floor(&BigInt::from(len)).to_usize().unwrap();
            for (i, &from) in cycle.iter().enumerate() {
                out[from as usize] = cycle[(i + shift) % len];
            }
        }
        out
    }

    /// Image of one coset under a word (stepping letter by letter with the
    /// same cycle folding as [`CosetTable::word_permutation`]).
    pub fn trace(&self, coset: usize, w: &Word) -> Result<usize, CosetError> {
        if !self.is_complete() {
            return Err(CosetError::Incomplete);
        }
        let mut c = coset as u32;
        for syl in w.syllables() {
            let col = self.col_of(&syl.sym, syl.exp.is_negative())?;
            let k = syl.exp.abs();
            match k.to_u64() {
                Some(steps) if steps <= self.count as u64 => {
                    for _ in 0..steps {
                        c = self.entry(c, col);
                    }
                }
                _ => {
                    // Fold the exponent through this column's cycle at c.
                    let mut len = 1u64;
                    let mut probe = self.entry(c, col);
                    while probe != c {
                        probe = self.entry(probe, col);
                        len += 1;
                    }
                    let steps = k.mod_floor(&BigInt::from(len)).to_u64().unwrap();
                    for _ in 0..steps {
                        c = self.entry(c, col);
                    }
                }
            }
        }
        Ok(c as usize)
    }

    /// True when the word acts as the identity permutation on the cosets.
    /// For a regular enumeration this says the word is trivial in the
    /// enumerated quotient group.
    pub fn is_trivial_in_quotient(&self, w: &Word) -> Result<bool, CosetError> {
        Ok(self.word_permutation(w)?.is_identity())
    }

    /// Order of the group element a word represents. Only meaningful for
    /// regular enumerations, where the element order is the cycle length of
    /// any coset under the word's permutation.
    pub fn element_order(&self, w: &Word) -> Result<u64, CosetError> {
        if !self.regular {
            return Err(CosetError::NotRegular);
        }
        let perm = self.word_permutation(w)?;
        let mut len = 1u64;
        let mut c = perm.image(0);
        while c != 0 {
            c = perm.image(c);
            len += 1;
        }
        Ok(len)
    }

    /// Text dump: header `cosets: N status: ...`, then one line per coset
    /// with its 1-based images under each signed generator in declaration
    /// order (`-` for entries an overflowed table never filled).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            TableStatus::Complete => "complete",
            TableStatus::Overflowed => "overflowed",
        };
        let _ = writeln!(out, "cosets: {} status: {}", self.count, status);
        for c in 0..self.count {
            let _ = write!(out, "{}:", c + 1);
            for col in 0..self.ncols {
                let e = self.table[c * self.ncols + col];
                if e == UNDEF {
                    let _ = write!(out, " -");
                } else {
                    let _ = write!(out, " {}", e + 1);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Wall-clock budget; inert without the `std` feature.
struct Budget {
    #[cfg(feature = "std")]
    start: std::time::Instant,
    #[cfg(feature = "std")]
    max_seconds: f64,
}

impl Budget {
    #[cfg(feature = "std")]
    fn new(max_seconds: f64) -> Budget {
        Budget {
            start: std::time::Instant::now(),
            max_seconds,
        }
    }

    #[cfg(not(feature = "std"))]
    fn new(_max_seconds: f64) -> Budget {
        Budget {}
    }

    #[cfg(feature = "std")]
    fn expired(&self) -> bool {
        self.start.elapsed().as_secs_f64() > self.max_seconds
    }

    #[cfg(not(feature = "std"))]
    fn expired(&self) -> bool {
        false
    }
}

struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>, // union-find; parent[c] == c iff live
    live: usize,
    max_rows: usize,
    stats: EnumStats,
    deductions: Vec<(u32, u32)>,
    use_deductions: bool,
    budget: Budget,
    ticks: u32,
    expired: bool,
}

enum Full {
    OutOfCosets,
    OutOfTime,
}

impl Enumerator {
    fn new(ncols: usize, max_rows: usize, use_deductions: bool, budget: Budget) -> Enumerator {
        let mut e = Enumerator {
            ncols,
            table: Vec::new(),
            parent: Vec::new(),
            live: 0,
            max_rows,
            stats: EnumStats::default(),
            deductions: Vec::new(),
            use_deductions,
            budget,
            ticks: 0,
            expired: false,
        };
        e.push_row();
        e.stats.cosets_defined = 1;
        e
    }

    fn rows(&self) -> usize {
        self.parent.len()
    }

    fn push_row(&mut self) -> u32 {
        let idx = self.parent.len() as u32;
        self.parent.push(idx);
        self.table.resize(self.table.len() + self.ncols, UNDEF);
        self.live += 1;
        idx
    }

    fn get(&self, c: u32, col: u32) -> u32 {
        self.table[c as usize * self.ncols + col as usize]
    }

    fn set(&mut self, c: u32, col: u32, v: u32) {
        self.table[c as usize * self.ncols + col as usize] = v;
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rep(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let up = self.parent[self.parent[c as usize] as usize];
            self.parent[c as usize] = up;
            c = up;
        }
        c
    }

    /// Periodic time check, amortized over many fast operations.
    fn tick(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks % 0x1_0000 == 0 && self.budget.expired() {
            self.expired = true;
        }
        self.expired
    }

    fn define(&mut self, a: u32, col: u32) -> Result<u32, Full> {
        if self.rows() >= self.max_rows {
            return Err(Full::OutOfCosets);
        }
        if self.tick() {
            return Err(Full::OutOfTime);
        }
        let b = self.push_row();
        self.stats.cosets_defined += 1;
        self.set(a, col, b);
        self.set(b, col ^ 1, a);
        if self.use_deductions {
            self.deductions.push((a, col));
        }
        Ok(b)
    }

    /// Records `a^col = b` (both directions) as a deduced entry.
    fn deduce(&mut self, a: u32, col: u32, b: u32) {
        self.set(a, col, b);
        self.set(b, col ^ 1, a);
        self.stats.deductions += 1;
        if self.use_deductions {
            self.deductions.push((a, col));
        }
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut Vec<u32>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (keep, kill) = if a < b { (a, b) } else { (b, a) };
        self.parent[kill as usize] = keep;
        self.live -= 1;
        self.stats.cosets_collapsed += 1;
        queue.push(kill);
    }

    /// Standard coincidence processing: merge the classes of `a` and `b`,
    /// transferring table entries of dead cosets onto their representatives
    /// and queueing any secondary coincidences discovered on the way.
    fn coincide(&mut self, a: u32, b: u32) {
        let mut queue: Vec<u32> = Vec::new();
        self.merge(a, b, &mut queue);
        let mut idx = 0;
        while idx < queue.len() {
            let dead = queue[idx];
            idx += 1;
            for col in 0..self.ncols as u32 {
                let delta = self.get(dead, col);
                if delta == UNDEF {
                    continue;
                }
                // Remove the mirrored entry so it is not seen again.
                if self.get(delta, col ^ 1) == dead {
                    self.set(delta, col ^ 1, UNDEF);
                }
                let mu = self.rep(dead);
                let nu = self.rep(delta);
                let at_mu = self.get(mu, col);
                if at_mu != UNDEF {
                    self.merge(nu, at_mu, &mut queue);
                } else {
                    let at_nu = self.get(nu, col ^ 1);
                    if at_nu != UNDEF {
                        self.merge(mu, at_nu, &mut queue);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, col ^ 1, mu);
                        if self.use_deductions {
                            self.deductions.push((mu, col));
                        }
                    }
                }
            }
        }
    }

    /// Scans relator `w` at coset `a`. With `fill` it defines cosets to
    /// close the scan (HLT); without, it only applies forced entries and
    /// coincidences (Felsch deduction checking and HLT lookahead).
    fn scan(&mut self, a: u32, w: &[u32], fill: bool) -> Result<(), Full> {
        let mut f = a;
        let mut i = 0usize;
        let mut b = a;
        let mut j = w.len();
        loop {
            while i < j {
                let t = self.get(f, w[i]);
                if t == UNDEF {
                    break;
                }
                f = t;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincide(f, b);
                }
                return Ok(());
            }
            while j > i {
                let t = self.get(b, w[j - 1] ^ 1);
                if t == UNDEF {
                    break;
                }
                b = t;
                j -= 1;
            }
            if j == i {
                if f != b {
                    self.coincide(f, b);
                }
                return Ok(());
            }
            if j == i + 1 {
                self.deduce(f, w[i], b);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    /// Lookahead: a full relator-scanning pass without definitions, hoping
    /// coincidences free space. Returns false if the time budget expired.
    fn lookahead(&mut self, relators: &[Vec<u32>]) -> bool {
        self.stats.lookaheads += 1;
        for c in 0..self.rows() as u32 {
            if !self.is_live(c) {
                continue;
            }
            if self.budget.expired() {
                self.expired = true;
                return false;
            }
            for w in relators {
                let _ = self.scan(c, w, false);
                if !self.is_live(c) {
                    break;
                }
            }
        }
        true
    }

    /// Renumbers live cosets densely, preserving order. Returns the map
    /// from old indices to new ones (`UNDEF` for dead cosets).
    fn compact(&mut self) -> Vec<u32> {
        self.stats.compactions += 1;
        // Resolve all entries to representatives first.
        for c in 0..self.rows() as u32 {
            if !self.is_live(c) {
                continue;
            }
            for col in 0..self.ncols as u32 {
                let e = self.get(c, col);
                if e != UNDEF {
                    let r = self.rep(e);
                    self.set(c, col, r);
                }
            }
        }
        let mut map = vec![UNDEF; self.rows()];
        let mut next = 0u32;
        for c in 0..self.rows() as u32 {
            if self.is_live(c) {
                map[c as usize] = next;
                next += 1;
            }
        }
        for c in 0..self.rows() {
            if map[c] == UNDEF {
                continue;
            }
            let to = map[c] as usize;
            for col in 0..self.ncols {
                let e = self.table[c * self.ncols + col];
                self.table[to * self.ncols + col] = if e == UNDEF { UNDEF } else { map[e as usize] };
            }
        }
        let live = self.live;
        self.table.truncate(live * self.ncols);
        self.parent.clear();
        self.parent.extend(0..live as u32);
        if self.use_deductions {
            let mut remapped: Vec<(u32, u32)> = Vec::with_capacity(self.deductions.len());
            for &(c, col) in &self.deductions {
                if map[c as usize] != UNDEF {
                    remapped.push((map[c as usize], col));
                }
            }
            self.deductions = remapped;
        }
        map
    }

    /// Processes the Felsch deduction stack to exhaustion.
    fn process_deductions(&mut self, conjugates: &[Vec<Vec<u32>>]) -> Result<(), Full> {
        while let Some((a, col)) = self.deductions.pop() {
            if self.tick() {
                return Err(Full::OutOfTime);
            }
            if !self.is_live(a) {
                continue;
            }
            let b = self.get(a, col);
            if b == UNDEF {
                continue;
            }
            for w in &conjugates[col as usize] {
                self.scan(a, w, false)?;
                if !self.is_live(a) {
                    break;
                }
            }
            if !self.is_live(a) || !self.is_live(b) {
                continue;
            }
            let b = self.get(a, col);
            if b == UNDEF {
                continue;
            }
            for w in &conjugates[(col ^ 1) as usize] {
                self.scan(b, w, false)?;
                if !self.is_live(b) {
                    break;
                }
            }
        }
        Ok(())
    }
}

/// Expands a word into a flat sequence of signed-generator columns.
/// `Ok(None)` means the expansion would exceed `cap` letters.
fn word_to_cols(w: &Word, pres: &Presentation, cap: usize) -> Result<Option<Vec<u32>>, WordError> {
    let mut total: usize = 0;
    let mut parts: Vec<(u32, usize)> = Vec::with_capacity(w.syllables().len());
    for syl in w.syllables() {
        let idx = pres
            .gen_index(&syl.sym)
            .ok_or_else(|| WordError::UndeclaredGenerator(syl.sym.as_str().into()))?;
        let col = (2 * idx + usize::from(syl.exp.is_negative())) as u32;
        let reps = match syl.exp.abs().to_usize() {
            Some(r) => r,
            None => return Ok(None),
        };
        total = total.saturating_add(reps);
        if total > cap {
            return Ok(None);
        }
        parts.push((col, reps));
    }
    let mut cols = Vec::with_capacity(total);
    for (col, reps) in parts {
        cols.extend(core::iter::repeat_n(col, reps));
    }
    Ok(Some(cols))
}

/// All distinct cyclic rotations of the relators and their inverses,
/// grouped by leading column (Felsch needs every relator path through a
/// fresh table entry). `None` if the rotation storage would exceed `cap`
/// letters.
fn felsch_conjugates(relators: &[Vec<u32>], ncols: usize, cap: usize) -> Option<Vec<Vec<Vec<u32>>>> {
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut grouped: Vec<Vec<Vec<u32>>> = vec![Vec::new(); ncols];
    let mut stored: usize = 0;
    for r in relators {
        if r.is_empty() {
            continue;
        }
        let inverse: Vec<u32> = r.iter().rev().map(|c| c ^ 1).collect();
        for base in [r, &inverse] {
            for start in 0..base.len() {
                let mut rot = Vec::with_capacity(base.len());
                rot.extend_from_slice(&base[start..]);
                rot.extend_from_slice(&base[..start]);
                if seen.insert(rot.clone()) {
                    stored += rot.len();
                    if stored > cap {
                        return None;
                    }
                    let lead = rot[0] as usize;
                    grouped[lead].push(rot);
                }
            }
        }
    }
    Some(grouped)
}

/// Enumerates the cosets of `sub` in the group presented by `pres` with the
/// default (HLT) strategy.
pub fn enumerate(
    pres: &Presentation,
    sub: &SubgroupSpec,
    limits: &EnumLimits,
) -> Result<CosetTable, WordError> {
    enumerate_with(pres, sub, limits, Strategy::default())
}

/// Enumerates with an explicit strategy choice.
pub fn enumerate_with(
    pres: &Presentation,
    sub: &SubgroupSpec,
    limits: &EnumLimits,
    strategy: Strategy,
) -> Result<CosetTable, WordError> {
    let ncols = 2 * pres.gens().len();
    let max_rows = limits.max_cosets.min(UNDEF as usize - 1).max(1);
    let regular = sub.generators.iter().all(|w| {
        crate::word::free_reduce(w).is_identity()
    });

    let overflowed_stub = |regular: bool| CosetTable {
        gens: pres.gens().to_vec(),
        ncols,
        count: 1,
        table: vec![UNDEF; ncols],
        status: TableStatus::Overflowed,
        stats: EnumStats::default(),
        regular,
    };

    // Expand words; oversize relators are an up-front overflow, not an error.
    let mut relators: Vec<Vec<u32>> = Vec::with_capacity(pres.relators().len());
    for r in pres.relators() {
        match word_to_cols(r, pres, max_rows)? {
            Some(cols) => {
                if !cols.is_empty() {
                    relators.push(cols);
                }
            }
            None => return Ok(overflowed_stub(regular)),
        }
    }
    let mut subwords: Vec<Vec<u32>> = Vec::with_capacity(sub.generators.len());
    for w in &sub.generators {
        match word_to_cols(w, pres, max_rows)? {
            Some(cols) => {
                if !cols.is_empty() {
                    subwords.push(cols);
                }
            }
            None => return Ok(overflowed_stub(regular)),
        }
    }

    let use_deductions = strategy == Strategy::Felsch;
    let conjugates = if use_deductions {
        match felsch_conjugates(&relators, ncols, 50_000_000) {
            Some(c) => c,
            None => return Ok(overflowed_stub(regular)),
        }
    } else {
        Vec::new()
    };

    let mut e = Enumerator::new(
        ncols,
        max_rows,
        use_deductions,
        Budget::new(limits.max_seconds),
    );

    let status = match strategy {
        Strategy::Hlt => run_hlt(&mut e, &relators, &subwords),
        Strategy::Felsch => run_felsch(&mut e, &relators, &conjugates, &subwords),
    };

    e.compact();
    debug_assert!(
        status != TableStatus::Complete || verify_closed(&e, &relators, &subwords),
        "completed table fails relator closure"
    );
    Ok(CosetTable {
        gens: pres.gens().to_vec(),
        ncols,
        count: e.live,
        table: e.table,
        status,
        stats: e.stats,
        regular,
    })
}

fn run_hlt(e: &mut Enumerator, relators: &[Vec<u32>], subwords: &[Vec<u32>]) -> TableStatus {
    // Close the subgroup generators at the base coset first.
    for w in subwords {
        loop {
            match e.scan(0, w, true) {
                Ok(()) => break,
                Err(Full::OutOfTime) => return TableStatus::Overflowed,
                Err(Full::OutOfCosets) => {
                    if !hlt_recover(e, relators, &mut 0) {
                        return TableStatus::Overflowed;
                    }
                }
            }
        }
    }

    let mut alpha: u32 = 0;
    while (alpha as usize) < e.rows() {
        if !e.is_live(alpha) {
            alpha += 1;
            continue;
        }
        let mut ridx = 0;
        while ridx < relators.len() {
            match e.scan(alpha, &relators[ridx], true) {
                Ok(()) => ridx += 1,
                Err(Full::OutOfTime) => return TableStatus::Overflowed,
                Err(Full::OutOfCosets) => {
                    if !hlt_recover(e, relators, &mut alpha) {
                        return TableStatus::Overflowed;
                    }
                    if !e.is_live(alpha) {
                        break;
                    }
                    // retry same relator at the (remapped) coset
                }
            }
            if !e.is_live(alpha) {
                break;
            }
        }
        if e.is_live(alpha) {
            // Guarantee a total row so the final table is closed.
            let mut col = 0u32;
            while (col as usize) < e.ncols {
                if e.get(alpha, col) == UNDEF {
                    match e.define(alpha, col) {
                        Ok(_) => {}
                        Err(Full::OutOfTime) => return TableStatus::Overflowed,
                        Err(Full::OutOfCosets) => {
                            if !hlt_recover(e, relators, &mut alpha) {
                                return TableStatus::Overflowed;
                            }
                            if !e.is_live(alpha) {
                                break;
                            }
                            continue; // retry same column
                        }
                    }
                }
                col += 1;
            }
        }
        alpha += 1;
    }
    TableStatus::Complete
}

/// Out-of-space recovery for HLT: lookahead then compaction. Returns false
/// when not enough space came back (or time ran out). `alpha` is remapped
/// to follow the current coset through compaction; if that coset died, it
/// is set to the first unprocessed new index.
fn hlt_recover(e: &mut Enumerator, relators: &[Vec<u32>], alpha: &mut u32) -> bool {
    if !e.lookahead(relators) {
        return false;
    }
    let survivor = e.rep(*alpha);
    let died = survivor != *alpha;
    let map = e.compact();
    *alpha = map[survivor as usize];
    if died {
        // The representative was processed earlier; resume after it.
        *alpha += 1;
    }
    // Demand at least 10% headroom, else declare overflow.
    e.live + e.max_rows / 10 < e.max_rows
}

fn run_felsch(
    e: &mut Enumerator,
    relators: &[Vec<u32>],
    conjugates: &[Vec<Vec<u32>>],
    subwords: &[Vec<u32>],
) -> TableStatus {
    let _ = relators;
    for w in subwords {
        match e.scan(0, w, true) {
            Ok(()) => {}
            Err(_) => return TableStatus::Overflowed,
        }
        if e.process_deductions(conjugates).is_err() {
            return TableStatus::Overflowed;
        }
    }
    let mut alpha: u32 = 0;
    loop {
        if e.process_deductions(conjugates).is_err() {
            return TableStatus::Overflowed;
        }
        // Find the first undefined entry in scan order.
        let mut found = None;
        'outer: while (alpha as usize) < e.rows() {
            if e.is_live(alpha) {
                for col in 0..e.ncols as u32 {
                    if e.get(alpha, col) == UNDEF {
                        found = Some((alpha, col));
                        break 'outer;
                    }
                }
            }
            alpha += 1;
        }
        let (a, col) = match found {
            Some(pair) => pair,
            None => return TableStatus::Complete,
        };
        match e.define(a, col) {
            Ok(_) => {}
            Err(Full::OutOfTime) => return TableStatus::Overflowed,
            Err(Full::OutOfCosets) => {
                // Compaction helps only if coincidences left dead rows.
                if e.live + e.max_rows / 20 < e.max_rows {
                    let map = e.compact();
                    alpha = map[e.rep(alpha) as usize];
                } else {
                    return TableStatus::Overflowed;
                }
            }
        }
    }
}

/// Integrity check used by debug builds: the table is total, all relators
/// close everywhere, subgroup generators close at the base coset.
fn verify_closed(e: &Enumerator, relators: &[Vec<u32>], subwords: &[Vec<u32>]) -> bool {
    let n = e.live;
    let trace = |start: u32, w: &[u32]| -> Option<u32> {
        let mut c = start;
        for &col in w {
            c = e.get(c, col);
            if c == UNDEF {
                return None;
            }
        }
        Some(c)
    };
    for c in 0..n as u32 {
        for col in 0..e.ncols as u32 {
            let img = e.get(c, col);
            if img == UNDEF || e.get(img, col ^ 1) != c {
                return false;
            }
        }
        for w in relators {
            if trace(c, w) != Some(c) {
                return false;
            }
        }
    }
    subwords.iter().all(|w| trace(0, w) == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::conjugation_relator;

    fn sym(name: &str) -> GenSym {
        GenSym::new(name).unwrap()
    }

    fn pres(gens: &[&str], relators: &[&str]) -> Presentation {
        Presentation::new(
            gens.iter().map(|g| sym(g)).collect(),
            relators.iter().map(|r| r.parse::<Word>().unwrap()).collect(),
        )
        .unwrap()
    }

    fn both_strategies(p: &Presentation, sub: &SubgroupSpec) -> (CosetTable, CosetTable) {
        let limits = EnumLimits {
            max_cosets: 100_000,
            max_seconds: 60.0,
        };
        let hlt = enumerate_with(p, sub, &limits, Strategy::Hlt).unwrap();
        let felsch = enumerate_with(p, sub, &limits, Strategy::Felsch).unwrap();
        (hlt, felsch)
    }

    #[test]
    fn cyclic_group_regular() {
        let p = pres(&["x"], &["x^5"]);
        let (hlt, felsch) = both_strategies(&p, &SubgroupSpec::trivial());
        assert!(hlt.is_complete());
        assert_eq!(hlt.coset_count(), 5);
        assert_eq!(felsch.coset_count(), 5);
        assert_eq!(
            hlt.element_order(&"x^1".parse().unwrap()).unwrap(),
            5
        );
        assert_eq!(
            hlt.element_order(&"x^2".parse().unwrap()).unwrap(),
            5
        );
        assert!(hlt
            .is_trivial_in_quotient(&"x^10".parse().unwrap())
            .unwrap());
        assert!(!hlt
            .is_trivial_in_quotient(&"x^3".parse().unwrap())
            .unwrap());
        // Huge exponents fold through cycle structure.
        assert!(hlt
            .is_trivial_in_quotient(&"x^10000000000000000000000000".parse().unwrap())
            .unwrap());
    }

    #[test]
    fn cyclic_table_dump_is_golden() {
        let p = pres(&["x"], &["x^5"]);
        let t = enumerate(&p, &SubgroupSpec::trivial(), &EnumLimits::default()).unwrap();
        assert_eq!(
            t.dump(),
            "cosets: 5 status: complete\n1: 2 5\n2: 3 1\n3: 4 2\n4: 5 3\n5: 1 4\n"
        );
    }

    #[test]
    fn symmetric_group_s3() {
        // <r,s | r^3, s^2, (rs)^2> = S3.
        let p = pres(&["r", "s"], &["r^3", "s^2", "r^1 s^1 r^1 s^1"]);
        let (hlt, felsch) = both_strategies(&p, &SubgroupSpec::trivial());
        assert_eq!(hlt.coset_count(), 6);
        assert_eq!(felsch.coset_count(), 6);
        assert_eq!(hlt.element_order(&"r^1".parse().unwrap()).unwrap(), 3);
        assert_eq!(hlt.element_order(&"s^1".parse().unwrap()).unwrap(), 2);
        assert_eq!(
            hlt.element_order(&"r^1 s^1".parse().unwrap()).unwrap(),
            2
        );

        // Index of <s> is 3.
        let sub = SubgroupSpec::new(vec!["s^1".parse().unwrap()]);
        let (hlt_sub, felsch_sub) = both_strategies(&p, &sub);
        assert_eq!(hlt_sub.coset_count(), 3);
        assert_eq!(felsch_sub.coset_count(), 3);
        assert!(!hlt_sub.is_regular());
        assert!(hlt_sub.element_order(&"r^1".parse().unwrap()).is_err());
    }

    #[test]
    fn quaternion_group() {
        // <i,j | i^4, i^2 j^-2, j^-1 i j i> = Q8.
        let p = pres(
            &["i", "j"],
            &["i^4", "i^2 j^-2", "j^-1 i^1 j^1 i^1"],
        );
        let (hlt, felsch) = both_strategies(&p, &SubgroupSpec::trivial());
        assert_eq!(hlt.coset_count(), 8);
        assert_eq!(felsch.coset_count(), 8);
        assert_eq!(hlt.element_order(&"i^1".parse().unwrap()).unwrap(), 4);
        assert_eq!(hlt.element_order(&"i^2".parse().unwrap()).unwrap(), 2);
        assert_eq!(
            hlt.element_order(&"i^1 j^1".parse().unwrap()).unwrap(),
            4
        );
    }

    #[test]
    fn infinite_cyclic_overflows_in_band() {
        let p = pres(&["x"], &[]);
        let limits = EnumLimits {
            max_cosets: 500,
            max_seconds: 10.0,
        };
        let t = enumerate(&p, &SubgroupSpec::trivial(), &limits).unwrap();
        assert_eq!(t.status(), TableStatus::Overflowed);
        assert!(t.word_permutation(&"x^1".parse().unwrap()).is_err());
    }

    #[test]
    fn oversize_relator_rejected_up_front() {
        let p = pres(&["x"], &["x^100000"]);
        let limits = EnumLimits {
            max_cosets: 1000,
            max_seconds: 10.0,
        };
        let t = enumerate(&p, &SubgroupSpec::trivial(), &limits).unwrap();
        assert_eq!(t.status(), TableStatus::Overflowed);
        assert_eq!(t.stats().cosets_defined, 0);
    }

    #[test]
    fn undeclared_generator_in_subgroup_is_error() {
        let p = pres(&["x"], &["x^5"]);
        let sub = SubgroupSpec::new(vec!["q^1".parse().unwrap()]);
        assert!(enumerate(&p, &sub, &EnumLimits::default()).is_err());
    }

    #[test]
    fn heavy_collapse_to_trivial_group() {
        // <x,y,z | x^y = x^2, y^z = y^2, z^x = z^2> is trivial.
        let two = BigInt::from(2);
        let one = BigInt::from(1);
        let p = Presentation::new(
            vec![sym("x"), sym("y"), sym("z")],
            vec![
                conjugation_relator(&sym("x"), &one, &sym("y"), &two),
                conjugation_relator(&sym("y"), &one, &sym("z"), &two),
                conjugation_relator(&sym("z"), &one, &sym("x"), &two),
            ],
        )
        .unwrap();
        let (hlt, felsch) = both_strategies(&p, &SubgroupSpec::trivial());
        assert!(hlt.is_complete());
        assert_eq!(hlt.coset_count(), 1);
        assert_eq!(felsch.coset_count(), 1);
        assert!(hlt.stats().cosets_collapsed > 0);
    }

    #[test]
    fn relator_images_are_identity_permutations() {
        let p = pres(&["r", "s"], &["r^3", "s^2", "r^1 s^1 r^1 s^1"]);
        let t = enumerate(&p, &SubgroupSpec::trivial(), &EnumLimits::default()).unwrap();
        for r in p.relators() {
            assert!(t.is_trivial_in_quotient(r).unwrap());
        }
        let perm = t.word_permutation(&"r^1".parse().unwrap()).unwrap();
        assert_eq!(perm.order(), 3u64.into());
    }

    #[test]
    fn subgroup_index_times_order_is_group_order() {
        // S3 again: [G : <r>] * |<r>| = 6.
        let p = pres(&["r", "s"], &["r^3", "s^2", "r^1 s^1 r^1 s^1"]);
        let regular = enumerate(&p, &SubgroupSpec::trivial(), &EnumLimits::default()).unwrap();
        let sub = SubgroupSpec::new(vec!["r^1".parse().unwrap()]);
        let over_r = enumerate(&p, &sub, &EnumLimits::default()).unwrap();
        let r_order = regular.element_order(&"r^1".parse().unwrap()).unwrap();
        assert_eq!(over_r.coset_count() as u64 * r_order, regular.coset_count() as u64);
    }

    #[test]
    fn dump_marks_overflowed_tables() {
        let p = pres(&["x"], &[]);
        let limits = EnumLimits {
            max_cosets: 4,
            max_seconds: 10.0,
        };
        let t = enumerate(&p, &SubgroupSpec::trivial(), &limits).unwrap();
        assert!(t.dump().starts_with("cosets: "));
        assert!(t.dump().contains("status: overflowed"));
    }
}
