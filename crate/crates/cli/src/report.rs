//! Serializable report types. Every number is carried as a decimal string:
//! exponents and orders routinely exceed native integer ranges, and decimal
//! strings survive any JSON reader untouched.

use serde::{Deserialize, Serialize};

use bstriangle_core::decide::{
    AffineCheck, AnalysisConfig, BoundCheck, EvidenceStep, PerPrimeSummary, PrimeQuotientReport,
    QuotientReport, RelationCheck, Verdict,
};
use bstriangle_core::structure::{AbelianInvariants, NilpotencyClass, StructureReport};
use bstriangle_core::triangle::{CoprimeReduction, KillerRelationInstance, TriangleParams};
use bstriangle_core::BigInt;

pub const SCHEMA_VERSION: &str = "1";

/// Envelope for one command's machine-readable output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema_version: String,
    pub command: String,
    pub input: String,
    pub limits: LimitsDto,
    pub payload: Payload,
    /// Reserved; kept out of persisted reports so identical runs produce
    /// identical bytes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<String>,
}

impl ReportFile {
    pub fn new(command: &str, input: &str, limits: LimitsDto, payload: Payload) -> ReportFile {
        ReportFile {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            input: input.to_string(),
            limits,
            payload,
            timing: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitsDto {
    pub max_cosets: String,
    pub max_seconds: String,
    pub strategy: String,
    pub max_bits: String,
}

impl LimitsDto {
    pub fn from_config(cfg: &AnalysisConfig) -> LimitsDto {
        LimitsDto {
            max_cosets: cfg.limits.max_cosets.to_string(),
            max_seconds: format!("{}", cfg.limits.max_seconds),
            strategy: format!("{:?}", cfg.strategy).to_lowercase(),
            max_bits: cfg.guard.max_bits.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Verdict(VerdictDto),
    Quotient(QuotientDto),
    PrimeQuotient(PrimeQuotientDto),
    Killer(KillerDto),
    Canon(CanonDto),
    Abelianize(AbelianizeDto),
    Bounds(BoundsDto),
    Reduce(ReduceDto),
    PowerReduce(PowerReduceDto),
    AffineCheck(AffineDto),
    /// A precondition failure, named; not an error exit path for sweeps.
    Refusal(RefusalDto),
    SweepRow(SweepRowDto),
    SweepSummary(SweepSummaryDto),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryDto {
    pub instances: String,
    pub developable: String,
    pub not_developable: String,
    pub unknown: String,
    pub completed_orders: String,
    pub incomplete: String,
    pub refusals: String,
    pub errors: String,
    pub bound_failures: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceDto {
    pub rule: String,
    pub detail: String,
    pub params_after: String,
    pub moves: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub outcome: String,
    pub evidence: Vec<EvidenceDto>,
    pub annotations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleDto {
    pub x: String,
    pub y: String,
    pub z: String,
}

impl TripleDto {
    pub fn from_bigints(t: &(BigInt, BigInt, BigInt)) -> TripleDto {
        TripleDto {
            x: t.0.to_string(),
            y: t.1.to_string(),
            z: t.2.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureDto {
    pub order: String,
    pub derived_series_orders: Vec<String>,
    pub is_derived_abelian: bool,
    pub nilpotency_class_of_derived: String,
    pub second_derived_central_in_derived: bool,
    pub second_derived_central_in_whole: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundDto {
    pub lower: String,
    pub modulus: String,
    pub lower_divides: bool,
    pub ratio: Option<String>,
    pub ratio_divides_modulus: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerPrimeDto {
    pub prime: String,
    pub order: String,
    pub derived_order: String,
    pub derived_abelian: bool,
    pub criterion_expected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckDto {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientDto {
    pub params: String,
    pub moves: String,
    pub exponents: TripleDto,
    pub order: Option<String>,
    pub order_source: String,
    pub abelian_invariants: Vec<String>,
    pub abelian_display: String,
    pub generator_orders: Option<TripleDto>,
    pub structure: Option<StructureDto>,
    pub bound_check: Option<BoundDto>,
    pub per_prime: Vec<PerPrimeDto>,
    pub relation_checks: Vec<CheckDto>,
    pub annotations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeQuotientDto {
    pub prime: String,
    pub params: String,
    pub exponents: TripleDto,
    pub order: String,
    pub abelian_invariants: Vec<String>,
    pub abelian_display: String,
    pub generator_orders: TripleDto,
    pub structure: StructureDto,
    pub relation_checks: Vec<CheckDto>,
    pub criterion_expected: bool,
    /// How the presentation was chosen.
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KillerDto {
    pub params: String,
    pub r: String,
    pub s: String,
    pub t: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: String,
    /// None when the quotient could not be enumerated within limits.
    pub verified: Option<bool>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonDto {
    pub input: String,
    pub canonical: String,
    pub moves: String,
    pub orbit_size: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbelianizeDto {
    pub params: String,
    pub invariants: Vec<String>,
    pub display: String,
    pub free_rank: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsDto {
    pub params: String,
    pub normalized: String,
    pub moves: String,
    pub lower: String,
    pub modulus: String,
    pub exponents: TripleDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceDto {
    pub params: String,
    pub moves: String,
    pub normalized: String,
    pub l: String,
    pub m: String,
    pub n: String,
    pub coprime: String,
    /// None when the powered-up tuple overflows the guard.
    pub reduced: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerReduceDto {
    pub params: String,
    pub pair: String,
    pub factor: String,
    /// None when the result overflows the guard.
    pub result: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineDto {
    pub relations_hold: Vec<bool>,
    pub squares_are_translations: Vec<bool>,
    pub translation_rank_full: bool,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefusalDto {
    pub reason: String,
}

/// One sweep instance: the verdict and, when the preconditions held, the
/// quotient analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRowDto {
    pub params: String,
    pub verdict: VerdictDto,
    pub quotient: Option<QuotientDto>,
    /// Precondition failure: the quotient analysis did not apply.
    pub refusal: Option<String>,
    /// Non-precondition failure recorded without aborting the sweep.
    pub error: Option<String>,
}

fn invariant_strings(inv: &AbelianInvariants) -> Vec<String> {
    inv.factors().iter().map(|f| f.to_string()).collect()
}

pub fn verdict_dto(v: &Verdict) -> VerdictDto {
    VerdictDto {
        outcome: v.outcome.to_string(),
        evidence: v.evidence.iter().map(evidence_dto).collect(),
        annotations: v.annotations.clone(),
    }
}

fn evidence_dto(e: &EvidenceStep) -> EvidenceDto {
    EvidenceDto {
        rule: e.rule.clone(),
        detail: e.note.clone(),
        params_after: e.params.to_string(),
        moves: e.moves.to_string(),
    }
}

fn structure_dto(s: &StructureReport) -> StructureDto {
    StructureDto {
        order: s.order.to_string(),
        derived_series_orders: s.derived_series_orders.iter().map(|o| o.to_string()).collect(),
        is_derived_abelian: s.is_derived_abelian,
        nilpotency_class_of_derived: match s.nilpotency_class_of_derived {
            NilpotencyClass::Class(c) => c.to_string(),
            NilpotencyClass::NotNilpotent => "not-nilpotent".to_string(),
        },
        second_derived_central_in_derived: s.second_derived_central_in_derived,
        second_derived_central_in_whole: s.second_derived_central_in_whole,
    }
}

fn bound_dto(b: &BoundCheck) -> BoundDto {
    BoundDto {
        lower: b.lower.to_string(),
        modulus: b.modulus.to_string(),
        lower_divides: b.lower_divides,
        ratio: b.ratio.as_ref().map(|r| r.to_string()),
        ratio_divides_modulus: b.ratio_divides_modulus,
    }
}

fn per_prime_dto(p: &PerPrimeSummary) -> PerPrimeDto {
    PerPrimeDto {
        prime: p.prime.to_string(),
        order: p.order.to_string(),
        derived_order: p.derived_order.to_string(),
        derived_abelian: p.derived_abelian,
        criterion_expected: p.criterion_expected,
    }
}

fn check_dto(c: &RelationCheck) -> CheckDto {
    CheckDto {
        name: c.name.clone(),
        holds: c.holds,
    }
}

pub fn quotient_dto(r: &QuotientReport) -> QuotientDto {
    QuotientDto {
        params: r.params.to_string(),
        moves: r.moves.to_string(),
        exponents: TripleDto::from_bigints(&r.exponents),
        order: r.order.as_ref().map(|o| o.to_string()),
        order_source: r.order_source.to_string(),
        abelian_invariants: invariant_strings(&r.abelian_invariants),
        abelian_display: r.abelian_invariants.to_string(),
        generator_orders: r.generator_orders.as_ref().map(TripleDto::from_bigints),
        structure: r.structure.as_ref().map(structure_dto),
        bound_check: r.bound_check.as_ref().map(bound_dto),
        per_prime: r.per_prime.iter().map(per_prime_dto).collect(),
        relation_checks: r.relation_checks.iter().map(check_dto).collect(),
        annotations: r.annotations.clone(),
    }
}

pub fn prime_quotient_dto(r: &PrimeQuotientReport) -> PrimeQuotientDto {
    PrimeQuotientDto {
        prime: r.prime.to_string(),
        params: r.params.to_string(),
        exponents: TripleDto::from_bigints(&r.exponents),
        order: r.order.to_string(),
        abelian_invariants: invariant_strings(&r.abelian_invariants),
        abelian_display: r.abelian_invariants.to_string(),
        generator_orders: TripleDto::from_bigints(&r.generator_orders),
        structure: structure_dto(&r.structure),
        relation_checks: r.relation_checks.iter().map(check_dto).collect(),
        criterion_expected: r.criterion_expected,
        note: "recipe: p-part of the generator order exponent".to_string(),
    }
}

pub fn killer_dto(
    p: &TriangleParams,
    inst: &KillerRelationInstance,
    verified: Option<bool>,
    note: Option<String>,
) -> KillerDto {
    KillerDto {
        params: p.to_string(),
        r: inst.r.to_string(),
        s: inst.s.to_string(),
        t: inst.t.to_string(),
        lhs: format!("x^{}", inst.lhs_exponent),
        rhs: inst.rhs.to_string(),
        relation: format!("x^{} = {}", inst.lhs_exponent, inst.rhs),
        verified,
        note,
    }
}

pub fn abelianize_dto(p: &TriangleParams, inv: &AbelianInvariants) -> AbelianizeDto {
    AbelianizeDto {
        params: p.to_string(),
        invariants: invariant_strings(inv),
        display: inv.to_string(),
        free_rank: inv.free_rank().to_string(),
    }
}

pub fn reduce_dto(p: &TriangleParams, r: &CoprimeReduction) -> ReduceDto {
    ReduceDto {
        params: p.to_string(),
        moves: r.moves.to_string(),
        normalized: r.normalized.to_string(),
        l: r.l.to_string(),
        m: r.m.to_string(),
        n: r.n.to_string(),
        coprime: r.coprime.to_string(),
        reduced: r.reduced.exact().map(|q| q.to_string()),
    }
}

pub fn affine_dto(c: &AffineCheck) -> AffineDto {
    AffineDto {
        relations_hold: c.relations_hold.to_vec(),
        squares_are_translations: c.squares_are_translations.to_vec(),
        translation_rank_full: c.translation_rank_full,
        passes: c.passes(),
    }
}
