//! Words and finite presentations over named generators.
//!
//! Words are kept in syllable form: a sequence of (generator, exponent)
//! pairs with arbitrary-precision exponents. The text format is syllables
//! separated by whitespace with explicit caret exponents, e.g.
//! `x^2 y^-1 z^4`; a bare name means exponent 1 and `1` denotes the empty
//! word. A presentation file is one `gens: x y z` line followed by one
//! relator per line (blank lines and `#` comments are skipped).

use core::fmt;
use core::str::FromStr;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Errors for word and presentation handling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordError {
    /// Generator names start with a letter and continue with letters,
    /// digits or underscores.
    InvalidSymbolName(String),
    /// A word used a generator the presentation does not declare.
    UndeclaredGenerator(String),
    /// A generator was declared twice.
    DuplicateGenerator(String),
    /// Substitution hit a generator with no assigned image.
    UnassignedGenerator(String),
    /// Malformed word or presentation text.
    Parse(String),
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::InvalidSymbolName(s) => write!(f, "invalid generator name `{s}`"),
            WordError::UndeclaredGenerator(s) => write!(f, "undeclared generator `{s}`"),
            WordError::DuplicateGenerator(s) => write!(f, "duplicate generator `{s}`"),
            WordError::UnassignedGenerator(s) => write!(f, "no image assigned for `{s}`"),
            WordError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for WordError {}

/// A named generator symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GenSym(String);

impl GenSym {
    /// Validates and creates a symbol.
    pub fn new(name: impl Into<String>) -> Result<GenSym, WordError> {
        let name = name.into();
        let mut chars = name.chars();
        let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
        let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if head_ok && tail_ok {
            Ok(GenSym(name))
        } else {
            Err(WordError::InvalidSymbolName(name))
        }
    }

    /// The symbol's name.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GenSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One `sym^exp` factor of a word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Syllable {
    pub sym: GenSym,
    pub exp: BigInt,
}

impl Syllable {
    pub fn new(sym: GenSym, exp: impl Into<BigInt>) -> Syllable {
        Syllable {
            sym,
            exp: exp.into(),
        }
    }
}

/// A word in syllable form.
///
/// All operations return freely reduced words (no zero exponents, no equal
/// adjacent symbols); [`Word::raw`] is the only constructor that keeps its
/// input verbatim, so unreduced words can be built for testing
/// normalization itself.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word {
    syllables: Vec<Syllable>,
}

impl Word {
    /// The empty word.
    pub fn identity() -> Word {
        Word::default()
    }

    /// The word `sym^exp` (empty if `exp` is zero).
    pub fn generator(sym: GenSym, exp: impl Into<BigInt>) -> Word {
        let exp = exp.into();
        if exp.is_zero() {
            Word::identity()
        } else {
            Word {
                syllables: alloc::vec![Syllable { sym, exp }],
            }
        }
    }

    /// Builds a word from syllables verbatim, without free reduction.
    pub fn raw(syllables: Vec<Syllable>) -> Word {
        Word { syllables }
    }

    /// Builds the freely reduced word with the given syllable content.
    pub fn from_syllables(syllables: Vec<Syllable>) -> Word {
        free_reduce(&Word::raw(syllables))
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// True when no syllable has exponent zero and adjacent syllables have
    /// distinct symbols.
    pub fn is_reduced(&self) -> bool {
        self.syllables.iter().all(|s| !s.exp.is_zero())
            && self
                .syllables
                .windows(2)
                .all(|pair| pair[0].sym != pair[1].sym)
    }

    /// Freely reduced concatenation `self * other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut syllables = Vec::with_capacity(self.syllables.len() + other.syllables.len());
        syllables.extend_from_slice(&self.syllables);
        syllables.extend_from_slice(&other.syllables);
        Word::from_syllables(syllables)
    }

    /// The inverse word (syllables reversed, exponents negated).
    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable {
                    sym: s.sym.clone(),
                    exp: -&s.exp,
                })
                .collect(),
        }
    }

    /// Total letter count: the sum of absolute exponents.
    pub fn letter_length(&self) -> BigInt {
        self.syllables.iter().map(|s| s.exp.abs()).sum()
    }

    /// Net exponent of `sym` in the word (its abelianized image).
    pub fn exponent_sum(&self, sym: &GenSym) -> BigInt {
        self.syllables
            .iter()
            .filter(|s| &s.sym == sym)
            .map(|s| s.exp.clone())
            .sum()
    }

    /// Applies `f` to every exponent and freely reduces the result. Used to
    /// fold exponents modulo known element orders.
    pub fn map_exponents(&self, mut f: impl FnMut(&GenSym, &BigInt) -> BigInt) -> Word {
        Word::from_syllables(
            self.syllables
                .iter()
                .map(|s| Syllable {
                    sym: s.sym.clone(),
                    exp: f(&s.sym, &s.exp),
                })
                .collect(),
        )
    }
}

/// Free reduction: merges runs of equal symbols and drops zero exponents,
/// cascading across newly adjacent syllables.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Syllable> = Vec::with_capacity(w.syllables.len());
    for syl in &w.syllables {
        if syl.exp.is_zero() {
            continue;
        }
        match stack.last_mut() {
            Some(top) if top.sym == syl.sym => {
                top.exp += &syl.exp;
                if top.exp.is_zero() {
                    stack.pop();
                }
            }
            _ => stack.push(syl.clone()),
        }
    }
    Word { syllables: stack }
}

/// Cyclic reduction: freely reduces, then folds matching first/last
/// syllables together until the word is cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> Word {
    let mut w = free_reduce(w);
    while w.syllables.len() >= 2 {
        let first = &w.syllables[0];
        let last = &w.syllables[w.syllables.len() - 1];
        if first.sym != last.sym {
            break;
        }
        let merged = &first.exp + &last.exp;
        let sym = first.sym.clone();
        w.syllables.pop();
        w.syllables.remove(0);
        if !merged.is_zero() {
            w.syllables.insert(0, Syllable { sym, exp: merged });
        }
    }
    w
}

/// The relator `v^-1 u^p v u^-q`, i.e. the relation `(u^p)^v = u^q`
/// rewritten to end on the identity.
pub fn conjugation_relator(u: &GenSym, p: &BigInt, v: &GenSym, q: &BigInt) -> Word {
    Word::from_syllables(alloc::vec![
        Syllable::new(v.clone(), -BigInt::from(1)),
        Syllable::new(u.clone(), p.clone()),
        Syllable::new(v.clone(), BigInt::from(1)),
        Syllable::new(u.clone(), -q),
    ])
}

/// A generator-to-word substitution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorAssignment {
    images: BTreeMap<GenSym, Word>,
}

impl GeneratorAssignment {
    pub fn new() -> GeneratorAssignment {
        GeneratorAssignment::default()
    }

    /// Assigns `sym -> image`, replacing any previous image.
    pub fn assign(&mut self, sym: GenSym, image: Word) {
        self.images.insert(sym, image);
    }

    pub fn image(&self, sym: &GenSym) -> Option<&Word> {
        self.images.get(sym)
    }
}

/// Applies a substitution to a word: each syllable `g^k` maps to
/// `image(g)^k`, and the result is freely reduced.
///
/// Exponents on multi-syllable images are expanded literally, so they are
/// expected to be of moderate size; single-syllable images are folded by
/// exponent multiplication and cost nothing.
pub fn substitute(w: &Word, assignment: &GeneratorAssignment) -> Result<Word, WordError> {
    let mut out: Vec<Syllable> = Vec::new();
    for syl in w.syllables() {
        let image = assignment
            .image(&syl.sym)
            .ok_or_else(|| WordError::UnassignedGenerator(syl.sym.to_string()))?;
        match image.syllables() {
            [] => {}
            [single] => out.push(Syllable {
                sym: single.sym.clone(),
                exp: &single.exp * &syl.exp,
            }),
            _ => {
                let positive = image.syllables().iter();
                let negative = image.inverse();
                let reps = syl
                    .exp
                    .abs()
                    .try_into()
                    .unwrap_or(usize::MAX);
                for _ in 0..reps {
                    if syl.exp.is_positive() {
                        out.extend(positive.clone().cloned());
                    } else {
                        out.extend_from_slice(negative.syllables());
                    }
                }
            }
        }
    }
    Ok(Word::from_syllables(out))
}

/// A finite presentation: declared generators plus relator words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    gens: Vec<GenSym>,
    relators: Vec<Word>,
}

impl Presentation {
    /// Validates that generators are distinct and every relator only uses
    /// declared symbols. Relators are stored freely reduced.
    pub fn new(gens: Vec<GenSym>, relators: Vec<Word>) -> Result<Presentation, WordError> {
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].contains(g) {
                return Err(WordError::DuplicateGenerator(g.to_string()));
            }
        }
        let relators = relators
            .iter()
            .map(|r| {
                for syl in r.syllables() {
                    if !gens.contains(&syl.sym) {
                        return Err(WordError::UndeclaredGenerator(syl.sym.to_string()));
                    }
                }
                Ok(free_reduce(r))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation { gens, relators })
    }

    pub fn gens(&self) -> &[GenSym] {
        &self.gens
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn gen_index(&self, sym: &GenSym) -> Option<usize> {
        self.gens.iter().position(|g| g == sym)
    }

    /// Returns a copy with extra relators appended (validated).
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Presentation, WordError> {
        let mut relators = self.relators.clone();
        relators.extend(extra);
        Presentation::new(self.gens.clone(), relators)
    }

    /// Serializes to the presentation file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from("gens:");
        for g in &self.gens {
            out.push(' ');
            out.push_str(g.as_str());
        }
        out.push('\n');
        for r in &self.relators {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the presentation file format.
    pub fn parse_file(text: &str) -> Result<Presentation, WordError> {
        let mut gens: Option<Vec<GenSym>> = None;
        let mut relators = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match &mut gens {
                None => {
                    let rest = line
                        .strip_prefix("gens:")
                        .ok_or_else(|| WordError::Parse("first line must start with `gens:`".into()))?;
                    gens = Some(
                        rest.split_whitespace()
                            .map(GenSym::new)
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                Some(_) => relators.push(line.parse::<Word>()?),
            }
        }
        let gens = gens.ok_or_else(|| WordError::Parse("missing `gens:` line".into()))?;
        Presentation::new(gens, relators)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        for (i, syl) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}^{}", syl.sym, syl.exp)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(text: &str) -> Result<Word, WordError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens == ["1"] {
            return Ok(Word::identity());
        }
        let mut syllables = Vec::with_capacity(tokens.len());
        for token in tokens {
            let (name, exp) = match token.split_once('^') {
                Some((name, exp_text)) => {
                    let exp = BigInt::from_str(exp_text)
                        .map_err(|_| WordError::Parse(alloc::format!("bad exponent in `{token}`")))?;
                    (name, exp)
                }
                None => (token, BigInt::from(1)),
            };
            syllables.push(Syllable {
                sym: GenSym::new(name)?,
                exp,
            });
        }
        Ok(Word::from_syllables(syllables))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn sym(name: &str) -> GenSym {
        GenSym::new(name).unwrap()
    }

    fn syl(name: &str, exp: i64) -> Syllable {
        Syllable::new(sym(name), exp)
    }

    #[test]
    fn symbol_validation() {
        assert!(GenSym::new("x").is_ok());
        assert!(GenSym::new("X_2").is_ok());
        assert!(GenSym::new("").is_err());
        assert!(GenSym::new("2x").is_err());
        assert!(GenSym::new("x^2").is_err());
        assert!(GenSym::new("x y").is_err());
    }

    #[test]
    fn free_reduce_merges_and_cancels() {
        let w = Word::raw(vec![syl("x", 2), syl("x", 3)]);
        assert_eq!(free_reduce(&w), Word::generator(sym("x"), 5));

        let w = Word::raw(vec![syl("x", 1), syl("y", 1), syl("y", -1), syl("x", -1)]);
        assert_eq!(free_reduce(&w), Word::identity());

        // Cascade: the inner cancellation exposes an outer merge.
        let w = Word::raw(vec![syl("x", 2), syl("y", 1), syl("y", -1), syl("x", 5)]);
        assert_eq!(free_reduce(&w), Word::generator(sym("x"), 7));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let w = Word::from_syllables(vec![syl("y", -1), syl("x", 3), syl("y", 1)]);
        assert_eq!(cyclic_reduce(&w), Word::generator(sym("x"), 3));

        let w = Word::from_syllables(vec![syl("x", 1), syl("y", 2), syl("x", 3)]);
        assert_eq!(
            cyclic_reduce(&w),
            Word::from_syllables(vec![syl("x", 4), syl("y", 2)])
        );

        let w = Word::from_syllables(vec![syl("x", 1), syl("y", -2), syl("x", -1)]);
        assert_eq!(cyclic_reduce(&w), Word::generator(sym("y"), -2));
    }

    #[test]
    fn conjugation_relator_example() {
        let r = conjugation_relator(&sym("x"), &BigInt::from(2), &sym("y"), &BigInt::from(3));
        assert_eq!(
            r,
            Word::from_syllables(vec![syl("y", -1), syl("x", 2), syl("y", 1), syl("x", -3)])
        );
        assert_eq!(r.to_string(), "y^-1 x^2 y^1 x^-3");
    }

    #[test]
    fn substitute_example() {
        // Relator of <y,z | (y^2)^z = y^3> under y -> y, z -> z^2.
        let w = conjugation_relator(&sym("y"), &BigInt::from(2), &sym("z"), &BigInt::from(3));
        let mut a = GeneratorAssignment::new();
        a.assign(sym("y"), Word::generator(sym("y"), 1));
        a.assign(sym("z"), Word::generator(sym("z"), 2));
        let image = substitute(&w, &a).unwrap();
        assert_eq!(
            image,
            Word::from_syllables(vec![syl("z", -2), syl("y", 2), syl("z", 2), syl("y", -3)])
        );
    }

    #[test]
    fn substitute_multisyllable_image() {
        let w = Word::generator(sym("x"), -2);
        let mut a = GeneratorAssignment::new();
        a.assign(
            sym("x"),
            Word::from_syllables(vec![syl("y", 1), syl("z", 1)]),
        );
        assert_eq!(
            substitute(&w, &a).unwrap(),
            Word::from_syllables(vec![syl("z", -1), syl("y", -1), syl("z", -1), syl("y", -1)])
        );
    }

    #[test]
    fn substitute_rejects_unassigned() {
        let w = Word::generator(sym("x"), 1);
        let a = GeneratorAssignment::new();
        assert!(matches!(
            substitute(&w, &a),
            Err(WordError::UnassignedGenerator(_))
        ));
    }

    #[test]
    fn word_text_round_trip() {
        let w: Word = "x^2 y^-1 z^4".parse().unwrap();
        assert_eq!(w.to_string(), "x^2 y^-1 z^4");
        let identity: Word = "1".parse().unwrap();
        assert!(identity.is_identity());
        assert_eq!(identity.to_string(), "1");
        let bare: Word = "x y^2".parse().unwrap();
        assert_eq!(bare.to_string(), "x^1 y^2");
        assert!("x^".parse::<Word>().is_err());
        assert!("^2".parse::<Word>().is_err());
    }

    #[test]
    fn presentation_validation_and_file_format() {
        let pres = Presentation::new(
            vec![sym("x"), sym("y")],
            vec![conjugation_relator(
                &sym("x"),
                &BigInt::from(2),
                &sym("y"),
                &BigInt::from(3),
            )],
        )
        .unwrap();
        let text = pres.to_file_string();
        assert_eq!(text, "gens: x y\ny^-1 x^2 y^1 x^-3\n");
        assert_eq!(Presentation::parse_file(&text).unwrap(), pres);

        assert!(matches!(
            Presentation::new(vec![sym("x")], vec![Word::generator(sym("q"), 1)]),
            Err(WordError::UndeclaredGenerator(_))
        ));
        assert!(matches!(
            Presentation::new(vec![sym("x"), sym("x")], vec![]),
            Err(WordError::DuplicateGenerator(_))
        ));
        assert!(Presentation::parse_file("gens: x\nq^2\n").is_err());
        assert!(Presentation::parse_file("x^2\n").is_err());
    }

    #[test]
    fn exponent_sums() {
        let w: Word = "x^2 y^-1 x^3".parse().unwrap();
        assert_eq!(w.exponent_sum(&sym("x")), BigInt::from(5));
        assert_eq!(w.exponent_sum(&sym("y")), BigInt::from(-1));
        assert_eq!(w.exponent_sum(&sym("z")), BigInt::from(0));
        assert_eq!(w.letter_length(), BigInt::from(6));
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..3, -4i64..=4), 0..12).prop_map(|pairs| {
            let names = ["x", "y", "z"];
            Word::raw(
                pairs
                    .into_iter()
                    .map(|(i, e)| syl(names[i], e))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn free_reduce_is_idempotent_and_reduced(w in arb_word()) {
            let r = free_reduce(&w);
            prop_assert!(r.is_reduced());
            prop_assert_eq!(free_reduce(&r), r);
        }

        #[test]
        fn inverse_cancels(w in arb_word()) {
            let r = free_reduce(&w);
            prop_assert!(r.concat(&r.inverse()).is_identity());
            prop_assert!(r.inverse().concat(&r).is_identity());
        }

        #[test]
        fn cyclic_reduce_fixed_point(w in arb_word()) {
            let c = cyclic_reduce(&w);
            prop_assert_eq!(cyclic_reduce(&c), c);
        }

        #[test]
        fn parse_print_round_trip(w in arb_word()) {
            let r = free_reduce(&w);
            let text = r.to_string();
            prop_assert_eq!(text.parse::<Word>().unwrap(), r);
        }

        #[test]
        fn substitute_is_functorial(w1 in arb_word(), w2 in arb_word()) {
            // x -> yz, y -> y^2, z -> z^-1 x.
            let mut a = GeneratorAssignment::new();
            a.assign(sym("x"), Word::from_syllables(vec![syl("y", 1), syl("z", 1)]));
            a.assign(sym("y"), Word::generator(sym("y"), 2));
            a.assign(sym("z"), Word::from_syllables(vec![syl("z", -1), syl("x", 1)]));
            let img_concat = substitute(&w1.concat(&w2), &a).unwrap();
            let concat_img = substitute(&w1, &a).unwrap().concat(&substitute(&w2, &a).unwrap());
            prop_assert_eq!(img_concat, concat_img);
            let img_inv = substitute(&free_reduce(&w1).inverse(), &a).unwrap();
            let inv_img = substitute(&w1, &a).unwrap().inverse();
            prop_assert_eq!(img_inv, inv_img);
        }
    }
}
