//! Parameter tuples `(a,b; c,d; e,f)`, the trivial moves acting on them, and
//! the arithmetic data their defining relations force: collapse relations,
//! order exponents, conjugation relators, order bounds for the universal
//! finite quotient, and finite-order witnesses.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{gcd, guarded_pow, mod_inverse, ArithError, Guarded, SizeGuard};
use crate::word::{conjugation_relator, GenSym, Presentation, Syllable, Word};

/// Errors from parameter handling and the formula constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriangleError {
    /// All six parameters must be nonzero.
    ZeroParameter,
    /// Malformed parameter string.
    Parse(String),
    /// A formula's precondition does not hold; the message names it.
    PreconditionViolated(&'static str),
    /// The requested reduction factor does not divide the selected pair.
    NotADivisor,
    Arith(ArithError),
}

impl fmt::Display for TriangleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriangleError::ZeroParameter => write!(f, "parameters must be nonzero"),
            TriangleError::Parse(msg) => write!(f, "parse error: {msg}"),
            TriangleError::PreconditionViolated(what) => write!(f, "{what}"),
            TriangleError::NotADivisor => write!(f, "factor does not divide the selected pair"),
            TriangleError::Arith(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for TriangleError {}

impl From<ArithError> for TriangleError {
    fn from(e: ArithError) -> TriangleError {
        TriangleError::Arith(e)
    }
}

/// The six defining integers, grouped as partner pairs (a,b), (c,d), (e,f).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TriangleParams {
    pairs: [(BigInt, BigInt); 3],
}

impl TriangleParams {
    pub fn new(pairs: [(BigInt, BigInt); 3]) -> Result<TriangleParams, TriangleError> {
        if pairs.iter().any(|(u, v)| u.is_zero() || v.is_zero()) {
            return Err(TriangleError::ZeroParameter);
        }
        Ok(TriangleParams { pairs })
    }

    pub fn from_i64(values: [i64; 6]) -> Result<TriangleParams, TriangleError> {
        TriangleParams::new([
            (BigInt::from(values[0]), BigInt::from(values[1])),
            (BigInt::from(values[2]), BigInt::from(values[3])),
            (BigInt::from(values[4]), BigInt::from(values[5])),
        ])
    }

    pub fn pairs(&self) -> &[(BigInt, BigInt); 3] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> &(BigInt, BigInt) {
        &self.pairs[i]
    }

    /// The six values in order a, b, c, d, e, f.
    pub fn values(&self) -> [&BigInt; 6] {
        [
            &self.pairs[0].0,
            &self.pairs[0].1,
            &self.pairs[1].0,
            &self.pairs[1].1,
            &self.pairs[2].0,
            &self.pairs[2].1,
        ]
    }
}

impl fmt::Display for TriangleParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{};{},{};{},{}",
            self.pairs[0].0,
            self.pairs[0].1,
            self.pairs[1].0,
            self.pairs[1].1,
            self.pairs[2].0,
            self.pairs[2].1
        )
    }
}

impl FromStr for TriangleParams {
    type Err = TriangleError;

    fn from_str(text: &str) -> Result<TriangleParams, TriangleError> {
        let chunks: Vec<&str> = text.trim().split(';').collect();
        if chunks.len() != 3 {
            return Err(TriangleError::Parse(format!(
                "expected three ';'-separated pairs, got {}",
                chunks.len()
            )));
        }
        let mut pairs = Vec::with_capacity(3);
        for chunk in chunks {
            let nums: Vec<&str> = chunk.split(',').collect();
            if nums.len() != 2 {
                return Err(TriangleError::Parse(format!(
                    "expected `u,v` in pair `{}`",
                    chunk.trim()
                )));
            }
            let u: BigInt = nums[0]
                .trim()
                .parse()
                .map_err(|_| TriangleError::Parse(format!("bad integer `{}`", nums[0].trim())))?;
            let v: BigInt = nums[1]
                .trim()
                .parse()
                .map_err(|_| TriangleError::Parse(format!("bad integer `{}`", nums[1].trim())))?;
            pairs.push((u, v));
        }
        TriangleParams::new([pairs[0].clone(), pairs[1].clone(), pairs[2].clone()])
    }
}

/// One trivial move on parameter tuples. All three kinds preserve the
/// isomorphism type of the presented group.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Move {
    /// Rotate the three pairs left: (a,b; c,d; e,f) -> (c,d; e,f; a,b).
    CyclicPermute,
    /// Exchange the two members of one pair (inverts a generator).
    SwapPartners(usize),
    /// Negate both members of one pair (inverts a relation).
    NegatePair(usize),
}

impl Move {
    pub fn apply(&self, p: &TriangleParams) -> TriangleParams {
        let mut pairs = p.pairs.clone();
        match *self {
            Move::CyclicPermute => pairs.rotate_left(1),
            Move::SwapPartners(i) => {
                assert!(i < 3, "pair index out of range");
                let (u, v) = pairs[i].clone();
                pairs[i] = (v, u);
            }
            Move::NegatePair(i) => {
                assert!(i < 3, "pair index out of range");
                pairs[i] = (-&pairs[i].0, -&pairs[i].1);
            }
        }
        TriangleParams { pairs }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::CyclicPermute => write!(f, "cyc"),
            Move::SwapPartners(i) => write!(f, "swap{i}"),
            Move::NegatePair(i) => write!(f, "neg{i}"),
        }
    }
}

/// An ordered list of moves. The group they generate has 192 elements
/// (3 rotations x 8 swap patterns x 8 negation patterns).
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct MoveSequence(pub Vec<Move>);

impl MoveSequence {
    pub fn apply(&self, p: &TriangleParams) -> TriangleParams {
        self.0.iter().fold(p.clone(), |q, m| m.apply(&q))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn moves(&self) -> &[Move] {
        &self.0
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Visits every element of the move group in a fixed order: rotations
/// outermost, then swap patterns, then negation patterns.
pub(crate) fn enumerate_moves(p: &TriangleParams, mut visit: impl FnMut(&TriangleParams, &[Move])) {
    for rot in 0..3 {
        for swap_mask in 0..8u8 {
            for neg_mask in 0..8u8 {
                let mut q = p.clone();
                let mut moves = Vec::new();
                for _ in 0..rot {
                    q = Move::CyclicPermute.apply(&q);
                    moves.push(Move::CyclicPermute);
                }
                for i in 0..3 {
                    if swap_mask & (1 << i) != 0 {
                        q = Move::SwapPartners(i).apply(&q);
                        moves.push(Move::SwapPartners(i));
                    }
                }
                for i in 0..3 {
                    if neg_mask & (1 << i) != 0 {
                        q = Move::NegatePair(i).apply(&q);
                        moves.push(Move::NegatePair(i));
                    }
                }
                visit(&q, &moves);
            }
        }
    }
}

/// Comparison key: per value (|v|, sign), positive before negative, compared
/// left to right across a, b, c, d, e, f.
fn sort_key(p: &TriangleParams) -> Vec<(BigInt, bool)> {
    p.values()
        .into_iter()
        .map(|v| (v.abs(), v.is_negative()))
        .collect()
}

/// The full orbit of `p` under the move group (at most 192 tuples).
pub fn orbit(p: &TriangleParams) -> BTreeSet<TriangleParams> {
    let mut out = BTreeSet::new();
    enumerate_moves(p, |q, _| {
        out.insert(q.clone());
    });
    out
}

/// The least tuple in the orbit of `p`, with a move sequence that reaches it.
pub fn canonicalize(p: &TriangleParams) -> (TriangleParams, MoveSequence) {
    let mut best: Option<(Vec<(BigInt, bool)>, TriangleParams, Vec<Move>)> = None;
    enumerate_moves(p, |q, moves| {
        let key = sort_key(q);
        let better = match &best {
            None => true,
            Some((k, _, _)) => key < *k,
        };
        if better {
            best = Some((key, q.clone(), moves.to_vec()));
        }
    });
    let (_, q, moves) = best.expect("orbit is nonempty");
    (q, MoveSequence(moves))
}

/// Number of distinct tuples in the orbit of `p` under the move group.
/// Divides 192 (the move group order); smaller for symmetric tuples.
pub fn orbit_size(p: &TriangleParams) -> usize {
    let mut seen: alloc::collections::BTreeSet<Vec<(BigInt, BigInt)>> = Default::default();
    enumerate_moves(p, |q, _| {
        seen.insert(q.pairs.to_vec());
    });
    seen.len()
}

/// The three-generator presentation with relators encoding (x^a)^y = x^b,
/// (y^c)^z = y^d, (z^e)^x = z^f.
pub fn triangle_presentation(p: &TriangleParams) -> Presentation {
    let x = GenSym::new("x").expect("valid name");
    let y = GenSym::new("y").expect("valid name");
    let z = GenSym::new("z").expect("valid name");
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    Presentation::new(
        vec![x.clone(), y.clone(), z.clone()],
        vec![
            conjugation_relator(&x, a, &y, b),
            conjugation_relator(&y, c, &z, d),
            conjugation_relator(&z, e, &x, f),
        ],
    )
    .expect("distinct generators")
}

/// Divides the front pair by `l` and raises the back pair to the `l`-th
/// power: x^l, y, z satisfy the relations of the reduced tuple. `pair`
/// selects which pair plays the front role; labeling is restored afterwards.
pub fn power_reduce(
    p: &TriangleParams,
    pair: usize,
    l: &BigInt,
    guard: &SizeGuard,
) -> Result<Guarded<TriangleParams>, TriangleError> {
    if pair >= 3 {
        return Err(TriangleError::PreconditionViolated("pair index must be 0, 1 or 2"));
    }
    if !l.is_positive() {
        return Err(TriangleError::PreconditionViolated("reduction factor must be positive"));
    }
    let mut q = p.clone();
    for _ in 0..pair {
        q = Move::CyclicPermute.apply(&q);
    }
    let [(a, b), (c, d), (e, f)] = q.pairs;
    if !(&a % l).is_zero() || !(&b % l).is_zero() {
        return Err(TriangleError::NotADivisor);
    }
    let el = guarded_pow(&e, l, guard)?;
    let fl = guarded_pow(&f, l, guard)?;
    let (el, fl) = match (el, fl) {
        (Guarded::Exact(u), Guarded::Exact(v)) => (u, v),
        _ => return Ok(Guarded::Overflow),
    };
    let mut out = TriangleParams {
        pairs: [(a / l, b / l), (c, d), (el, fl)],
    };
    for _ in 0..(3 - pair) % 3 {
        out = Move::CyclicPermute.apply(&out);
    }
    Ok(Guarded::Exact(out))
}

/// (a^2, b^2; c^2, d^2; e^2, f^2): the squares of the generators satisfy the
/// relations of this tuple, which has all parameters positive.
pub fn square_params(p: &TriangleParams) -> TriangleParams {
    let sq = |v: &BigInt| v * v;
    TriangleParams {
        pairs: [
            (sq(&p.pairs[0].0), sq(&p.pairs[0].1)),
            (sq(&p.pairs[1].0), sq(&p.pairs[1].1)),
            (sq(&p.pairs[2].0), sq(&p.pairs[2].1)),
        ],
    }
}

/// Result of stripping the pair gcds: `normalized = (Al, Bl; Cm, Dm; En, Fn)`
/// with the coprime parts satisfying the relations of `reduced`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeReduction {
    /// Sign normalization applied before extracting the gcds (negates pairs
    /// whose members are both negative).
    pub moves: MoveSequence,
    /// The input after `moves`.
    pub normalized: TriangleParams,
    pub l: BigInt,
    pub m: BigInt,
    pub n: BigInt,
    /// The coprime parts (A,B; C,D; E,F).
    pub coprime: TriangleParams,
    /// (A^m, B^m; C^{n^l}, D^{n^l}; E^l, F^l), when it fits the guard.
    pub reduced: Guarded<TriangleParams>,
}

impl CoprimeReduction {
    /// True when all three pairs were already coprime.
    pub fn is_trivial(&self) -> bool {
        self.l.is_one() && self.m.is_one() && self.n.is_one()
    }
}

fn pos_pow(base: &BigInt, exp: &BigInt, guard: &SizeGuard) -> Guarded<BigInt> {
    guarded_pow(base, exp, guard).expect("exponent is positive")
}

/// Strips the gcd from each pair and forms the reduced tuple whose group the
/// powered-up generators satisfy.
pub fn coprime_reduce(p: &TriangleParams, guard: &SizeGuard) -> CoprimeReduction {
    let mut moves = Vec::new();
    let mut q = p.clone();
    for i in 0..3 {
        if q.pairs[i].0.is_negative() && q.pairs[i].1.is_negative() {
            let mv = Move::NegatePair(i);
            q = mv.apply(&q);
            moves.push(mv);
        }
    }
    let l = q.pairs[0].0.gcd(&q.pairs[0].1);
    let m = q.pairs[1].0.gcd(&q.pairs[1].1);
    let n = q.pairs[2].0.gcd(&q.pairs[2].1);
    let coprime = TriangleParams {
        pairs: [
            (&q.pairs[0].0 / &l, &q.pairs[0].1 / &l),
            (&q.pairs[1].0 / &m, &q.pairs[1].1 / &m),
            (&q.pairs[2].0 / &n, &q.pairs[2].1 / &n),
        ],
    };
    let [(pa, pb), (pc, pd), (pe, pf)] = &coprime.pairs;
    let reduced = pos_pow(&n, &l, guard).and_then(|n_l| {
        let parts = [
            pos_pow(pa, &m, guard),
            pos_pow(pb, &m, guard),
            pos_pow(pc, &n_l, guard),
            pos_pow(pd, &n_l, guard),
            pos_pow(pe, &l, guard),
            pos_pow(pf, &l, guard),
        ];
        let mut vals = Vec::with_capacity(6);
        for part in parts {
            match part {
                Guarded::Exact(v) => vals.push(v),
                Guarded::Overflow => return Guarded::Overflow,
            }
        }
        let f2 = vals.pop().expect("six parts");
        let e2 = vals.pop().expect("six parts");
        let d2 = vals.pop().expect("six parts");
        let c2 = vals.pop().expect("six parts");
        let b2 = vals.pop().expect("six parts");
        let a2 = vals.pop().expect("six parts");
        Guarded::Exact(TriangleParams {
            pairs: [(a2, b2), (c2, d2), (e2, f2)],
        })
    });
    CoprimeReduction {
        moves: MoveSequence(moves),
        normalized: q,
        l,
        m,
        n,
        coprime,
        reduced,
    }
}

/// Early-returns `Ok(Guarded::Overflow)` from a function whose success type
/// is `Guarded<_>`.
macro_rules! try_exact {
    ($g:expr) => {
        match $g {
            Guarded::Exact(v) => v,
            Guarded::Overflow => return Ok(Guarded::Overflow),
        }
    };
}

/// One instance of the collapse relation: for parameters with 0<a<=b,
/// 0<c<=d, e=1<=f and positive R, S, T,
///
/// ```text
/// x^{T b^{S c^R} (b^{S(d^R - c^R)} - a^{S(d^R - c^R)})}
///     = z^{-R f^{T a^{S(d^R - c^R)} b^{S c^R}}} y^{-S c^R} z^{R f^{T a^{S d^R}}} y^{S d^R}
/// ```
///
/// holds in the presented group, writing a power of x as a word in y and z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillerRelationInstance {
    pub r: u32,
    pub s: u32,
    pub t: u32,
    /// The exponent of x on the left side.
    pub lhs_exponent: BigInt,
    /// The right side, a word in y and z.
    pub rhs: Word,
    /// T a^{S d^R}, the exponent the final z-power is raised to.
    pub p_exp: BigInt,
    /// S c^R, the first y-exponent.
    pub q_exp: BigInt,
}

impl KillerRelationInstance {
    /// The relation as a single relator: x^{lhs} (rhs)^{-1}.
    pub fn relator(&self) -> Word {
        let x = GenSym::new("x").expect("valid name");
        Word::generator(x, self.lhs_exponent.clone()).concat(&self.rhs.inverse())
    }
}

/// Materializes the collapse relation at (R, S, T).
pub fn killer_relation(
    p: &TriangleParams,
    r: u32,
    s: u32,
    t: u32,
    guard: &SizeGuard,
) -> Result<Guarded<KillerRelationInstance>, TriangleError> {
    if r == 0 || s == 0 || t == 0 {
        return Err(TriangleError::PreconditionViolated("R, S, T must be positive"));
    }
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    if !a.is_positive() || a > b {
        return Err(TriangleError::PreconditionViolated("requires 0 < a <= b"));
    }
    if !c.is_positive() || c > d {
        return Err(TriangleError::PreconditionViolated("requires 0 < c <= d"));
    }
    if !e.is_one() || f < e {
        return Err(TriangleError::PreconditionViolated("requires 1 = e <= f"));
    }
    let (rr, ss, tt) = (BigInt::from(r), BigInt::from(s), BigInt::from(t));
    let c_r = try_exact!(guarded_pow(c, &rr, guard)?);
    let d_r = try_exact!(guarded_pow(d, &rr, guard)?);
    let q_exp = &ss * &c_r;
    let s_d = &ss * &d_r;
    let diff = &s_d - &q_exp;
    let b_q = try_exact!(guarded_pow(b, &q_exp, guard)?);
    let b_diff = try_exact!(guarded_pow(b, &diff, guard)?);
    let a_diff = try_exact!(guarded_pow(a, &diff, guard)?);
    let lhs_exponent = &tt * &b_q * (&b_diff - &a_diff);
    let p_exp = &tt * try_exact!(guarded_pow(a, &s_d, guard)?);
    let z_neg = &rr * try_exact!(guarded_pow(f, &(&tt * &a_diff * &b_q), guard)?);
    let z_pos = &rr * try_exact!(guarded_pow(f, &p_exp, guard)?);
    let y = GenSym::new("y").expect("valid name");
    let z = GenSym::new("z").expect("valid name");
    let rhs = Word::from_syllables(vec![
        Syllable::new(z.clone(), -z_neg),
        Syllable::new(y.clone(), -&q_exp),
        Syllable::new(z, z_pos),
        Syllable::new(y, s_d),
    ]);
    Ok(Guarded::Exact(KillerRelationInstance {
        r,
        s,
        t,
        lhs_exponent,
        rhs,
        p_exp,
        q_exp,
    }))
}

/// v^delta - u^delta, or Overflow.
fn power_gap(
    u: &BigInt,
    v: &BigInt,
    delta: &BigInt,
    guard: &SizeGuard,
) -> Result<Guarded<BigInt>, ArithError> {
    let vp = guarded_pow(v, delta, guard)?;
    let up = guarded_pow(u, delta, guard)?;
    match (vp, up) {
        (Guarded::Exact(vp), Guarded::Exact(up)) => Ok(Guarded::Exact(vp - up)),
        _ => Ok(Guarded::Overflow),
    }
}

fn require_increasing(p: &TriangleParams) -> Result<(), TriangleError> {
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    if a >= b || c >= d || e >= f {
        return Err(TriangleError::PreconditionViolated("requires a < b, c < d, e < f"));
    }
    Ok(())
}

/// Exponents (N_x, N_y, N_z) with x^{N_x} = y^{N_y} = z^{N_z} = 1 in every
/// quotient where x, y, z have finite order:
/// N_x = (b-a)^2 (b^{d-c} - a^{d-c}) and cyclic shifts. Values are returned
/// in absolute value.
pub fn order_exponents(
    p: &TriangleParams,
    guard: &SizeGuard,
) -> Result<Guarded<(BigInt, BigInt, BigInt)>, TriangleError> {
    require_increasing(p)?;
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    let nx = try_exact!(pair_exponent(a, b, &(d - c), guard)?);
    let ny = try_exact!(pair_exponent(c, d, &(f - e), guard)?);
    let nz = try_exact!(pair_exponent(e, f, &(b - a), guard)?);
    Ok(Guarded::Exact((nx, ny, nz)))
}

/// |(v-u)^2 (v^delta - u^delta)|
fn pair_exponent(
    u: &BigInt,
    v: &BigInt,
    delta: &BigInt,
    guard: &SizeGuard,
) -> Result<Guarded<BigInt>, ArithError> {
    let gap = v - u;
    Ok(power_gap(u, v, delta, guard)?.map(|d| ((&gap * &gap) * d).abs()))
}

/// Conjugation data for the universal finite quotient: with N = N_x,
/// alpha the inverse of a mod N, X = x^{b-a}, and D = d-c, the quotient
/// satisfies
///
/// ```text
/// (10)  x^-1 y   x = y   X^-alpha
/// (11)  x^-1 y^D x = y^D X^{-alpha^D (b^D - a^D)/(b-a)}
/// (12)  X^-1 y^D X = y^D X^{-alpha^D (b^D - a^D)}
/// ```
///
/// `relators` stores these three identities as plain words in x and y,
/// rewritten to end on the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugationData {
    /// N = (b-a)^2 (b^{d-c} - a^{d-c}), in absolute value.
    pub modulus: BigInt,
    /// Inverse of a modulo `modulus`; fixed to 1 when a = 1.
    pub alpha: BigInt,
    /// x^{b-a}
    pub big_x: Word,
    /// y^{d-c}
    pub big_y: Word,
    /// z^{f-e}
    pub big_z: Word,
    pub relators: [Word; 3],
}

/// Builds [`ConjugationData`]. The powers of alpha are reduced mod N (the
/// identities hold in quotients where x^N = 1, so only residues matter);
/// for a = 1 the symbolic value alpha = 1 is kept so the relators stay
/// meaningful even when N = 1.
pub fn conjugation_data(
    p: &TriangleParams,
    guard: &SizeGuard,
) -> Result<Guarded<ConjugationData>, TriangleError> {
    require_increasing(p)?;
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    let delta = d - c;
    let gap = b - a;
    let factor = try_exact!(power_gap(a, b, &delta, guard)?);
    let n = ((&gap * &gap) * &factor).abs();
    let alpha = if a.is_one() {
        BigInt::one()
    } else {
        if gcd(a, &n) != BigInt::one() {
            return Err(TriangleError::Arith(ArithError::NotCoprime {
                value: a.clone(),
                modulus: n,
            }));
        }
        mod_inverse(a, &n)?
    };
    let beta = if a.is_one() {
        BigInt::one()
    } else {
        alpha.modpow(&delta, &n)
    };
    let e10 = &alpha * &gap;
    let e11 = &beta * &factor;
    let e12 = &gap * &e11;
    let x = GenSym::new("x").expect("valid name");
    let y = GenSym::new("y").expect("valid name");
    let z = GenSym::new("z").expect("valid name");
    let r10 = Word::from_syllables(vec![
        Syllable::new(x.clone(), -1),
        Syllable::new(y.clone(), 1),
        Syllable::new(x.clone(), BigInt::one() + &e10),
        Syllable::new(y.clone(), -1),
    ]);
    let r11 = Word::from_syllables(vec![
        Syllable::new(x.clone(), -1),
        Syllable::new(y.clone(), delta.clone()),
        Syllable::new(x.clone(), BigInt::one() + &e11),
        Syllable::new(y.clone(), -&delta),
    ]);
    let r12 = Word::from_syllables(vec![
        Syllable::new(x.clone(), -&gap),
        Syllable::new(y.clone(), delta.clone()),
        Syllable::new(x.clone(), &gap + &e12),
        Syllable::new(y.clone(), -&delta),
    ]);
    Ok(Guarded::Exact(ConjugationData {
        modulus: n,
        alpha,
        big_x: Word::generator(x, gap),
        big_y: Word::generator(y, delta),
        big_z: Word::generator(z, f - e),
        relators: [r10, r11, r12],
    }))
}

/// Order bounds for the universal finite quotient Q under a<b, c<d, e<f:
/// `lower` divides |Q| and |Q|/lower divides `modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBounds {
    /// (b^{d-c} - a^{d-c}) (d^{f-e} - c^{f-e}) (f^{b-a} - e^{b-a})
    pub lower: BigInt,
    /// (b-a)^2 (d-c)^2 (f-e)^2
    pub modulus: BigInt,
}

pub fn order_bounds(
    p: &TriangleParams,
    guard: &SizeGuard,
) -> Result<Guarded<OrderBounds>, TriangleError> {
    require_increasing(p)?;
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    let g1 = try_exact!(power_gap(a, b, &(d - c), guard)?);
    let g2 = try_exact!(power_gap(c, d, &(f - e), guard)?);
    let g3 = try_exact!(power_gap(e, f, &(b - a), guard)?);
    let lower = (g1 * g2 * g3).abs();
    let m1 = (b - a) * (d - c) * (f - e);
    Ok(Guarded::Exact(OrderBounds {
        lower,
        modulus: &m1 * &m1,
    }))
}

/// A divisor witnessing that a generator has finite order in the presented
/// group itself (not just a quotient), for parameters 0<a<b, 0<c<d, e=1<=f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteOrderWitness {
    /// f > 1. The collapse relation at R=S=T=1 reads
    /// x^{exp_x} = z^{-exp_z_inv} y^{-exp_y_inv} z^{exp_z} y^{exp_y};
    /// conjugating y^{d^{exp_z_inv}} by that power of x yields
    /// y^g = y^h with g = d^{exp_z_inv} and h = c^{exp_z_inv - exp_z} d^{exp_z},
    /// and iterating bounds the order of y.
    YOrderDivisor {
        exp_x: BigInt,
        exp_z_inv: BigInt,
        exp_y_inv: BigInt,
        exp_z: BigInt,
        exp_y: BigInt,
        g: BigInt,
        h: BigInt,
        /// h d (d^{f^{exp_x} - 1} - c^{f^{exp_x} - 1})
        y_order_divisor: BigInt,
    },
    /// f = 1: commuting z past x turns the collapse relation into
    /// x^{a^{d-c} b^c} = x^{b^d}.
    XOrderDivisor {
        /// b^d - a^{d-c} b^c
        x_order_divisor: BigInt,
    },
}

pub fn finite_order_witness(
    p: &TriangleParams,
    guard: &SizeGuard,
) -> Result<Guarded<FiniteOrderWitness>, TriangleError> {
    let [(a, b), (c, d), (e, f)] = &p.pairs;
    if !a.is_positive() || a >= b {
        return Err(TriangleError::PreconditionViolated("requires 0 < a < b"));
    }
    if !c.is_positive() || c >= d {
        return Err(TriangleError::PreconditionViolated("requires 0 < c < d"));
    }
    if !e.is_one() || f < e {
        return Err(TriangleError::PreconditionViolated("requires 1 = e <= f"));
    }
    let delta = d - c;
    if f.is_one() {
        let bd = try_exact!(guarded_pow(b, d, guard)?);
        let ad = try_exact!(guarded_pow(a, &delta, guard)?);
        let bc = try_exact!(guarded_pow(b, c, guard)?);
        return Ok(Guarded::Exact(FiniteOrderWitness::XOrderDivisor {
            x_order_divisor: bd - ad * bc,
        }));
    }
    let a_dc = try_exact!(guarded_pow(a, &delta, guard)?);
    let b_c = try_exact!(guarded_pow(b, c, guard)?);
    let b_dc = try_exact!(guarded_pow(b, &delta, guard)?);
    let exp_x = &b_c * (&b_dc - &a_dc);
    let exp_z_inv = try_exact!(guarded_pow(f, &(&a_dc * &b_c), guard)?);
    let a_d = try_exact!(guarded_pow(a, d, guard)?);
    let exp_z = try_exact!(guarded_pow(f, &a_d, guard)?);
    // a^{d-c} b^c > a^d because b > a, so the first z-exponent dominates.
    assert!(
        exp_z_inv > exp_z,
        "z-exponent dominance must hold under the preconditions"
    );
    let g = try_exact!(guarded_pow(d, &exp_z_inv, guard)?);
    let h = {
        let c_pow = try_exact!(guarded_pow(c, &(&exp_z_inv - &exp_z), guard)?);
        let d_pow = try_exact!(guarded_pow(d, &exp_z, guard)?);
        c_pow * d_pow
    };
    let fa = try_exact!(guarded_pow(f, &exp_x, guard)?);
    let iter_exp = fa - BigInt::one();
    let d_it = try_exact!(guarded_pow(d, &iter_exp, guard)?);
    let c_it = try_exact!(guarded_pow(c, &iter_exp, guard)?);
    let y_order_divisor = &h * d * (d_it - c_it);
    Ok(Guarded::Exact(FiniteOrderWitness::YOrderDivisor {
        exp_x,
        exp_z_inv,
        exp_y_inv: c.clone(),
        exp_z,
        exp_y: d.clone(),
        g,
        h,
        y_order_divisor,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn params(v: [i64; 6]) -> TriangleParams {
        TriangleParams::from_i64(v).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn guard() -> SizeGuard {
        SizeGuard::default()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["1,2;1,2;1,3", "3,-3;5,-5;7,-7", "-1,2;10,-20;300,4"] {
            let p: TriangleParams = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        let spaced: TriangleParams = " 1 , 2 ; 1,2 ; 1,2 ".parse().unwrap();
        assert_eq!(spaced, params([1, 2, 1, 2, 1, 2]));
        assert!(matches!(
            "1,2;3,4".parse::<TriangleParams>(),
            Err(TriangleError::Parse(_))
        ));
        assert!(matches!(
            "1,2,3;4,5;6,7".parse::<TriangleParams>(),
            Err(TriangleError::Parse(_))
        ));
        assert!(matches!(
            "q,2;1,2;1,2".parse::<TriangleParams>(),
            Err(TriangleError::Parse(_))
        ));
        assert!(matches!(
            "1,0;1,2;1,2".parse::<TriangleParams>(),
            Err(TriangleError::ZeroParameter)
        ));
    }

    #[test]
    fn moves_act_as_documented() {
        let p = params([1, 2, 3, 4, 5, 6]);
        assert_eq!(Move::CyclicPermute.apply(&p), params([3, 4, 5, 6, 1, 2]));
        assert_eq!(Move::SwapPartners(0).apply(&p), params([2, 1, 3, 4, 5, 6]));
        assert_eq!(Move::NegatePair(2).apply(&p), params([1, 2, 3, 4, -5, -6]));
        let seq = MoveSequence(vec![Move::CyclicPermute, Move::SwapPartners(1)]);
        assert_eq!(seq.apply(&p), params([3, 4, 6, 5, 1, 2]));
        assert_eq!(seq.to_string(), "cyc swap1");
        assert_eq!(MoveSequence::default().to_string(), "id");
    }

    #[test]
    fn orbit_sizes() {
        assert_eq!(orbit(&params([1, 1, 1, 1, 1, 1])).len(), 8);
        assert_eq!(orbit(&params([1, 2, 3, 4, 5, 6])).len(), 192);
        let p = params([2, 3, 2, 3, 2, 4]);
        assert!(orbit(&p).contains(&p));
    }

    #[test]
    fn canonicalize_examples() {
        let (c, moves) = canonicalize(&params([1, 2, 1, 2, 1, 2]));
        assert_eq!(c, params([1, 2, 1, 2, 1, 2]));
        assert!(moves.is_empty());

        let (c, moves) = canonicalize(&params([2, 1, 1, 2, 1, 2]));
        assert_eq!(c, params([1, 2, 1, 2, 1, 2]));
        assert_eq!(moves.moves(), &[Move::SwapPartners(0)]);

        let (c, moves) = canonicalize(&params([1, 2, 1, 2, -1, -2]));
        assert_eq!(c, params([1, 2, 1, 2, 1, 2]));
        assert_eq!(moves.moves(), &[Move::NegatePair(2)]);
    }

    #[test]
    fn canonical_prefers_positive_over_sign_flips() {
        // |values| tie: the positive representative wins.
        let (c, _) = canonicalize(&params([-1, 2, 1, -2, 1, 2]));
        for v in c.values() {
            assert!(v.is_positive() || c.values().iter().any(|w| w.is_negative()));
        }
        let key_pos = sort_key(&params([1, 2, 1, 2, 1, 2]));
        let key_neg = sort_key(&params([-1, 2, 1, 2, 1, 2]));
        assert!(key_pos < key_neg);
    }

    #[test]
    fn presentation_relators() {
        let pres = triangle_presentation(&params([1, 2, 1, 2, 1, 3]));
        let texts: Vec<String> = pres.relators().iter().map(|r| r.to_string()).collect();
        assert_eq!(
            texts,
            vec!["y^-1 x^1 y^1 x^-2", "z^-1 y^1 z^1 y^-2", "x^-1 z^1 x^1 z^-3"]
        );
    }

    #[test]
    fn power_reduce_examples() {
        let r = power_reduce(&params([2, 4, 3, 5, 1, 2]), 0, &big(2), &guard()).unwrap();
        assert_eq!(r, Guarded::Exact(params([1, 2, 3, 5, 1, 4])));

        let r = power_reduce(&params([2, 3, 2, 3, 2, 4]), 2, &big(2), &guard()).unwrap();
        assert_eq!(r, Guarded::Exact(params([2, 3, 4, 9, 1, 2])));

        let p = params([2, 4, 3, 5, 1, 2]);
        let r = power_reduce(&p, 1, &big(1), &guard()).unwrap();
        assert_eq!(r, Guarded::Exact(p.clone()));

        assert_eq!(
            power_reduce(&p, 1, &big(2), &guard()),
            Err(TriangleError::NotADivisor)
        );
        assert!(matches!(
            power_reduce(&p, 3, &big(1), &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
        assert!(matches!(
            power_reduce(&p, 0, &big(0), &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn power_reduce_overflow_is_in_band() {
        let huge = BigInt::from(1u128 << 100);
        let p = TriangleParams::new([
            (huge.clone(), huge.clone()),
            (big(3), big(5)),
            (big(2), big(3)),
        ])
        .unwrap();
        let r = power_reduce(&p, 0, &huge, &guard()).unwrap();
        assert_eq!(r, Guarded::Overflow);
    }

    #[test]
    fn square_params_examples() {
        assert_eq!(
            square_params(&params([1, -1, 1, -1, 1, -1])),
            params([1, 1, 1, 1, 1, 1])
        );
        assert_eq!(
            square_params(&params([2, 3, 2, 3, 2, 4])),
            params([4, 9, 4, 9, 4, 16])
        );
        assert_eq!(
            square_params(&params([1, 2, 1, 2, 1, 2])),
            params([1, 4, 1, 4, 1, 4])
        );
    }

    #[test]
    fn coprime_reduce_examples() {
        let r = coprime_reduce(&params([2, 4, 3, 5, 1, 2]), &guard());
        assert_eq!((r.l, r.m, r.n), (big(2), big(1), big(1)));
        assert_eq!(r.coprime, params([1, 2, 3, 5, 1, 2]));
        assert_eq!(r.reduced, Guarded::Exact(params([1, 2, 3, 5, 1, 4])));
        assert!(r.moves.is_empty());

        let p = params([1, 2, 1, 2, 1, 2]);
        let r = coprime_reduce(&p, &guard());
        assert!(r.is_trivial());
        assert_eq!(r.reduced, Guarded::Exact(p.clone()));
        assert_eq!(r.coprime, p);

        let r = coprime_reduce(&params([2, 4, 2, 4, 2, 4]), &guard());
        assert_eq!((r.l, r.m, r.n), (big(2), big(2), big(2)));
        assert_eq!(r.reduced, Guarded::Exact(params([1, 4, 1, 16, 1, 4])));
    }

    #[test]
    fn coprime_reduce_normalizes_negative_pairs() {
        let r = coprime_reduce(&params([-2, -4, 3, 5, 1, 2]), &guard());
        assert_eq!(r.moves.moves(), &[Move::NegatePair(0)]);
        assert_eq!(r.normalized, params([2, 4, 3, 5, 1, 2]));
        assert_eq!(r.l, big(2));
        assert_eq!(r.reduced, Guarded::Exact(params([1, 2, 3, 5, 1, 4])));
    }

    #[test]
    fn coprime_reduce_overflow_is_in_band() {
        let huge = BigInt::from(1u128 << 90);
        let p = TriangleParams::new([
            (huge.clone(), huge.clone()),
            (big(3), big(5)),
            (big(1), big(2)),
        ])
        .unwrap();
        let r = coprime_reduce(&p, &guard());
        assert_eq!(r.l, huge);
        assert_eq!(r.reduced, Guarded::Overflow);
    }

    #[test]
    fn killer_relation_examples() {
        let inst = killer_relation(&params([1, 2, 1, 2, 1, 2]), 1, 1, 1, &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!(inst.lhs_exponent, big(2));
        assert_eq!(inst.rhs.to_string(), "z^-4 y^-1 z^2 y^2");
        assert_eq!(inst.p_exp, big(1));
        assert_eq!(inst.q_exp, big(1));
        assert_eq!(inst.relator().to_string(), "x^2 y^-2 z^-2 y^1 z^4");

        let inst = killer_relation(&params([1, 2, 1, 2, 1, 3]), 1, 1, 1, &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!(inst.lhs_exponent, big(2));
        assert_eq!(inst.rhs.to_string(), "z^-9 y^-1 z^3 y^2");

        assert!(matches!(
            killer_relation(&params([2, 1, 1, 2, 1, 2]), 1, 1, 1, &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
        assert!(matches!(
            killer_relation(&params([1, 2, 1, 2, 2, 4]), 1, 1, 1, &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
        assert!(matches!(
            killer_relation(&params([1, 2, 1, 2, 1, 2]), 0, 1, 1, &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn killer_relation_overflow_is_in_band() {
        let r = killer_relation(&params([2, 3, 2, 3, 1, 2]), 20, 1, 1, &guard()).unwrap();
        assert_eq!(r, Guarded::Overflow);
    }

    #[test]
    fn order_exponent_examples() {
        let (nx, ny, nz) = order_exponents(&params([1, 4, 1, 4, 1, 4]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!((nx, ny, nz), (big(567), big(567), big(567)));

        let (nx, ny, nz) = order_exponents(&params([1, 2, 1, 2, 1, 2]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!((nx, ny, nz), (big(1), big(1), big(1)));

        let (nx, ny, nz) = order_exponents(&params([1, 2, 1, 2, 1, 3]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!((nx, ny, nz), (big(1), big(3), big(8)));

        assert!(matches!(
            order_exponents(&params([2, 1, 1, 2, 1, 3]), &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn conjugation_data_examples() {
        let data = conjugation_data(&params([1, 2, 1, 2, 1, 2]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!(data.modulus, big(1));
        assert_eq!(data.alpha, big(1));
        assert_eq!(data.relators[0].to_string(), "x^-1 y^1 x^2 y^-1");

        let data = conjugation_data(&params([1, 4, 1, 4, 1, 4]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!(data.modulus, big(567));
        assert_eq!(data.alpha, big(1));
        assert_eq!(data.big_x.to_string(), "x^3");
        assert_eq!(data.big_y.to_string(), "y^3");
        assert_eq!(data.big_z.to_string(), "z^3");
        assert_eq!(data.relators[0].to_string(), "x^-1 y^1 x^4 y^-1");
        assert_eq!(data.relators[1].to_string(), "x^-1 y^3 x^64 y^-3");
        assert_eq!(data.relators[2].to_string(), "x^-3 y^3 x^192 y^-3");

        // (b-a)^2 (b^{d-c} - a^{d-c}) = 9 * 3 = 27 and 2 * 14 = 28 = 27 + 1.
        let data = conjugation_data(&params([2, 5, 1, 2, 1, 2]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!(data.modulus, big(27));
        assert_eq!(data.alpha, big(14));
        assert_eq!(data.relators[0].to_string(), "x^-1 y^1 x^43 y^-1");

        assert!(matches!(
            conjugation_data(&params([2, 4, 1, 2, 1, 2]), &guard()),
            Err(TriangleError::Arith(ArithError::NotCoprime { .. }))
        ));
    }

    #[test]
    fn order_bounds_examples() {
        let b = order_bounds(&params([1, 2, 1, 2, 1, 3]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!((b.lower, b.modulus), (big(6), big(4)));

        let b = order_bounds(&params([1, 2, 1, 2, 1, 2]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!((b.lower, b.modulus), (big(1), big(1)));

        let b = order_bounds(&params([1, 4, 1, 4, 1, 4]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!((b.lower, b.modulus), (big(250047), big(729)));

        assert!(matches!(
            order_bounds(&params([1, 2, 1, 2, 3, 2]), &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn finite_order_witness_examples() {
        let w = finite_order_witness(&params([1, 2, 1, 2, 1, 1]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        assert_eq!(
            w,
            FiniteOrderWitness::XOrderDivisor {
                x_order_divisor: big(2)
            }
        );

        let w = finite_order_witness(&params([1, 2, 1, 2, 1, 2]), &guard())
            .unwrap()
            .into_exact()
            .unwrap();
        match w {
            FiniteOrderWitness::YOrderDivisor {
                exp_x,
                exp_z_inv,
                exp_y_inv,
                exp_z,
                exp_y,
                g,
                h,
                y_order_divisor,
            } => {
                assert_eq!(exp_x, big(2));
                assert_eq!(exp_z_inv, big(4));
                assert_eq!(exp_y_inv, big(1));
                assert_eq!(exp_z, big(2));
                assert_eq!(exp_y, big(2));
                assert_eq!(g, big(16));
                assert_eq!(h, big(4));
                assert_eq!(y_order_divisor, big(56));
            }
            other => panic!("expected the f>1 branch, got {other:?}"),
        }

        assert!(matches!(
            finite_order_witness(&params([2, 2, 1, 2, 1, 2]), &guard()),
            Err(TriangleError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn finite_order_witness_overflow_is_in_band() {
        // f^{exp_x} - 1 is about 2^510; d to that power overflows the guard.
        let w = finite_order_witness(&params([1, 2, 1, 9, 1, 2]), &guard()).unwrap();
        assert_eq!(w, Guarded::Overflow);
    }

    fn arb_params() -> impl Strategy<Value = TriangleParams> {
        proptest::array::uniform6(-5i64..=5)
            .prop_filter("nonzero", |v| v.iter().all(|&x| x != 0))
            .prop_map(|v| params(v))
    }

    fn arb_move() -> impl Strategy<Value = Move> {
        (0usize..7).prop_map(|k| match k {
            0 => Move::CyclicPermute,
            1..=3 => Move::SwapPartners(k - 1),
            _ => Move::NegatePair(k - 4),
        })
    }

    proptest! {
        #[test]
        fn canonicalize_is_constant_on_orbits(p in arb_params(), m in arb_move()) {
            let (c1, seq) = canonicalize(&p);
            let (c2, _) = canonicalize(&m.apply(&p));
            prop_assert_eq!(&c1, &c2);
            prop_assert_eq!(seq.apply(&p), c1);
        }

        #[test]
        fn canonical_form_is_least_in_orbit(p in arb_params()) {
            let (c, _) = canonicalize(&p);
            let orb = orbit(&p);
            prop_assert!(orb.contains(&c));
            for q in &orb {
                prop_assert!(sort_key(&c) <= sort_key(q));
            }
            prop_assert!(orb.len() <= 192 && 192 % orb.len() == 0);
        }

        #[test]
        fn power_reduce_unit_factor_is_identity(p in arb_params(), pair in 0usize..3) {
            let r = power_reduce(&p, pair, &BigInt::one(), &SizeGuard::default()).unwrap();
            prop_assert_eq!(r, Guarded::Exact(p));
        }

        #[test]
        fn coprime_reduce_fixes_coprime_positive_tuples(p in arb_params()) {
            let abs = TriangleParams::new([
                (p.pairs[0].0.abs(), p.pairs[0].1.abs()),
                (p.pairs[1].0.abs(), p.pairs[1].1.abs()),
                (p.pairs[2].0.abs(), p.pairs[2].1.abs()),
            ]).unwrap();
            let r = coprime_reduce(&abs, &SizeGuard::default());
            if r.is_trivial() {
                prop_assert_eq!(r.reduced, Guarded::Exact(abs.clone()));
                prop_assert_eq!(r.coprime, abs);
            } else {
                let vals = r.coprime.values().map(|v| v.clone());
                prop_assert_eq!(gcd(&vals[0], &vals[1]), BigInt::one());
                prop_assert_eq!(gcd(&vals[2], &vals[3]), BigInt::one());
                prop_assert_eq!(gcd(&vals[4], &vals[5]), BigInt::one());
            }
        }
    }
}
