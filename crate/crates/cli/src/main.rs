//! `bstriangle`: decide developability of triangles of Baumslag-Solitar
//! groups and analyze their universal finite quotients.
//!
//! Exit codes: 0 developable / success, 1 not developable, 2 unknown,
//! 3 usage or parse error, 4 precondition refusal, 5 overflow or incomplete
//! enumeration (partial data is still printed).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bstriangle_cli::parse_params;
use bstriangle_cli::report::{
    self, abelianize_dto, affine_dto, killer_dto, prime_quotient_dto, quotient_dto, reduce_dto,
    verdict_dto, BoundsDto, CanonDto, LimitsDto, Payload, PowerReduceDto, PrimeQuotientDto,
    QuotientDto, RefusalDto, ReportFile, SweepSummaryDto, TripleDto, VerdictDto,
};
use bstriangle_cli::sweep::{parse_strategy, run_sweep, SweepSpec, SweepSummary};
use bstriangle_core::arith::{Guarded, SizeGuard};
use bstriangle_core::coset::{enumerate_with, SubgroupSpec};
use bstriangle_core::decide::{self, AnalysisConfig, DecideError, Outcome};
use bstriangle_core::structure::abelianization;
use bstriangle_core::triangle::{
    canonicalize, coprime_reduce, killer_relation, orbit_size, order_bounds, power_reduce,
    triangle_presentation, TriangleError, TriangleParams,
};
use bstriangle_core::word::Word;
use bstriangle_core::BigInt;

const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_REFUSED: u8 = 4;
const EXIT_OVERFLOW: u8 = 5;

#[derive(Parser)]
#[command(
    name = "bstriangle",
    version,
    about = "Developability and finite quotients of triangles of Baumslag-Solitar groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Cap on coset definitions per enumeration.
    #[arg(long, global = true, value_name = "N")]
    limits_cosets: Option<usize>,

    /// Wall-clock budget per enumeration, in seconds.
    #[arg(long, global = true, value_name = "S")]
    limits_seconds: Option<f64>,

    /// Coset enumeration strategy.
    #[arg(long, global = true, value_name = "hlt|felsch")]
    strategy: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide developability of the triangle `a,b;c,d;e,f`.
    Decide {
        params: String,
        /// Also search for decidable tuples reachable by power substitution.
        #[arg(long, default_value_t = 0, value_name = "D")]
        depth: u32,
    },
    /// Analyze the universal finite quotient; with --prime, one prime-power quotient.
    Quotient {
        params: String,
        #[arg(long, value_name = "P")]
        prime: Option<String>,
    },
    /// Run a batch sweep described by a JSON spec file.
    Sweep { spec: PathBuf, out_dir: PathBuf },
    /// Print the collapse relation at (R, S, T) and verify it in the quotient.
    Killer {
        params: String,
        r: u32,
        s: u32,
        t: u32,
    },
    /// Canonical orbit representative under the parameter moves.
    Canon { params: String },
    /// Abelianization of the triangle group.
    Abelianize { params: String },
    /// Order bound data: the lower bound L, the modulus M, and the generator order exponents.
    Bounds { params: String },
    /// Coprime reduction; with --pair and --factor, a single power-substitution step.
    Reduce {
        params: String,
        /// Pair index 0, 1 or 2 for a single power-substitution step.
        #[arg(long, requires = "factor")]
        pair: Option<usize>,
        /// Divisor of the selected pair.
        #[arg(long, requires = "pair", value_name = "F", allow_hyphen_values = true)]
        factor: Option<String>,
    },
    /// Verify the affine realization of the triangle 1,-1;1,-1;1,-1.
    AffineCheck,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = match Ctx::from_cli(&cli) {
        Ok(ctx) => ctx,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let code = match &cli.command {
        Command::Decide { params, depth } => cmd_decide(&ctx, params, *depth),
        Command::Quotient { params, prime } => cmd_quotient(&ctx, params, prime.as_deref()),
        Command::Sweep { spec, out_dir } => cmd_sweep(&ctx, spec, out_dir),
        Command::Killer { params, r, s, t } => cmd_killer(&ctx, params, *r, *s, *t),
        Command::Canon { params } => cmd_canon(&ctx, params),
        Command::Abelianize { params } => cmd_abelianize(&ctx, params),
        Command::Bounds { params } => cmd_bounds(&ctx, params),
        Command::Reduce { params, pair, factor } => {
            cmd_reduce(&ctx, params, *pair, factor.as_deref())
        }
        Command::AffineCheck => cmd_affine(&ctx),
    };
    ExitCode::from(code)
}

struct Ctx {
    json: bool,
    cfg: AnalysisConfig,
}

impl Ctx {
    fn from_cli(cli: &Cli) -> Result<Ctx, String> {
        let mut cfg = AnalysisConfig::default();
        if let Some(n) = cli.limits_cosets {
            cfg.limits.max_cosets = n;
            cfg.sylow_limits.max_cosets = n;
        }
        if let Some(s) = cli.limits_seconds {
            cfg.limits.max_seconds = s;
            cfg.sylow_limits.max_seconds = s;
        }
        if let Some(name) = &cli.strategy {
            cfg.strategy = parse_strategy(name)
                .ok_or_else(|| format!("unknown strategy `{name}` (expected hlt or felsch)"))?;
        }
        if let Ok(bits) = std::env::var("BS_TRIANGLE_MAX_BITS") {
            let bits: u64 = bits
                .parse()
                .map_err(|_| format!("BS_TRIANGLE_MAX_BITS must be an integer, got `{bits}`"))?;
            if bits < 64 {
                return Err(String::from("BS_TRIANGLE_MAX_BITS must be at least 64"));
            }
            cfg.guard = SizeGuard::new(bits, cfg.guard.max_tower_height);
        }
        Ok(Ctx { json: cli.json, cfg })
    }

    fn emit(&self, command: &str, input: &str, payload: Payload, human: String) {
        if self.json {
            let report = ReportFile::new(command, input, LimitsDto::from_config(&self.cfg), payload);
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
        } else {
            println!("{human}");
        }
    }

    fn refuse(&self, command: &str, input: &str, reason: &str) -> u8 {
        self.emit(
            command,
            input,
            Payload::Refusal(RefusalDto {
                reason: reason.to_string(),
            }),
            format!("refused: {reason}"),
        );
        EXIT_REFUSED
    }

    fn overflow(&self, command: &str, input: &str, reason: &str) -> u8 {
        self.emit(
            command,
            input,
            Payload::Refusal(RefusalDto {
                reason: reason.to_string(),
            }),
            format!("incomplete: {reason}"),
        );
        EXIT_OVERFLOW
    }
}

fn usage(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn parse_or_usage(input: &str) -> Result<TriangleParams, u8> {
    parse_params(input).map_err(|msg| usage(&msg))
}

fn render_verdict(dto: &VerdictDto) -> String {
    let mut out = format!("verdict: {}", dto.outcome);
    if !dto.evidence.is_empty() {
        out.push_str("\nevidence:");
        for e in &dto.evidence {
            out.push_str(&format!(
                "\n  [{}] {} (params {}; moves {})",
                e.rule, e.detail, e.params_after, e.moves
            ));
        }
    }
    for note in &dto.annotations {
        out.push_str(&format!("\nnote: {note}"));
    }
    out
}

fn cmd_decide(ctx: &Ctx, params: &str, depth: u32) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let verdict = decide::decide_with_reduction_search(&p, depth, &ctx.cfg.guard);
    let dto = verdict_dto(&verdict);
    let human = render_verdict(&dto);
    ctx.emit("decide", params, Payload::Verdict(dto), human);
    match verdict.outcome {
        Outcome::Developable => 0,
        Outcome::NotDevelopable => 1,
        Outcome::Unknown => EXIT_UNKNOWN,
    }
}

fn render_triple(t: &TripleDto) -> String {
    format!("x {}, y {}, z {}", t.x, t.y, t.z)
}

fn render_checks(checks: &[report::CheckDto]) -> String {
    let holding = checks.iter().filter(|c| c.holds).count();
    let mut line = format!("checks: {holding}/{} hold", checks.len());
    for c in checks.iter().filter(|c| !c.holds) {
        line.push_str(&format!("\n  FAILED: {}", c.name));
    }
    line
}

fn render_quotient(dto: &QuotientDto) -> String {
    let mut out = format!("params: {} (moves {})", dto.params, dto.moves);
    out.push_str(&format!(
        "\norder exponents: {}",
        render_triple(&dto.exponents)
    ));
    match &dto.order {
        Some(order) => out.push_str(&format!("\norder: {order} ({})", dto.order_source)),
        None => out.push_str(&format!("\norder: not determined ({})", dto.order_source)),
    }
    out.push_str(&format!("\nabelianization: {}", dto.abelian_display));
    if let Some(orders) = &dto.generator_orders {
        out.push_str(&format!("\ngenerator orders: {}", render_triple(orders)));
    }
    if let Some(s) = &dto.structure {
        out.push_str(&format!(
            "\nderived series orders: {}",
            s.derived_series_orders.join(", ")
        ));
        out.push_str(&format!(
            "\nderived subgroup abelian: {}; nilpotency class of derived: {}",
            s.is_derived_abelian, s.nilpotency_class_of_derived
        ));
        out.push_str(&format!(
            "\nsecond derived central in derived: {}; in whole group: {}",
            s.second_derived_central_in_derived, s.second_derived_central_in_whole
        ));
    }
    if let Some(b) = &dto.bound_check {
        let ratio = b.ratio.as_deref().unwrap_or("-");
        out.push_str(&format!(
            "\nbound: L {} divides order: {}; (order/L) {} divides M {}: {}",
            b.lower, b.lower_divides, ratio, b.modulus, b.ratio_divides_modulus
        ));
    }
    for pp in &dto.per_prime {
        out.push_str(&format!(
            "\np={}: order {}, derived order {}, derived abelian {} (expected abelian: {})",
            pp.prime, pp.order, pp.derived_order, pp.derived_abelian, pp.criterion_expected
        ));
    }
    out.push('\n');
    out.push_str(&render_checks(&dto.relation_checks));
    for note in &dto.annotations {
        out.push_str(&format!("\nnote: {note}"));
    }
    out
}

fn render_prime_quotient(dto: &PrimeQuotientDto) -> String {
    let mut out = format!("params: {} at p={}", dto.params, dto.prime);
    out.push_str(&format!("\nexponents: {}", render_triple(&dto.exponents)));
    out.push_str(&format!("\norder: {}", dto.order));
    out.push_str(&format!("\nabelianization: {}", dto.abelian_display));
    out.push_str(&format!(
        "\ngenerator orders: {}",
        render_triple(&dto.generator_orders)
    ));
    out.push_str(&format!(
        "\nderived series orders: {}",
        dto.structure.derived_series_orders.join(", ")
    ));
    out.push_str(&format!(
        "\nderived subgroup abelian: {} (expected abelian: {})",
        dto.structure.is_derived_abelian, dto.criterion_expected
    ));
    out.push_str(&format!(
        "\nnilpotency class of derived: {}",
        dto.structure.nilpotency_class_of_derived
    ));
    out.push('\n');
    out.push_str(&render_checks(&dto.relation_checks));
    out.push_str(&format!("\nnote: {}", dto.note));
    out
}

fn cmd_quotient(ctx: &Ctx, params: &str, prime: Option<&str>) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if let Some(prime_text) = prime {
        let prime: BigInt = match prime_text.trim().parse() {
            Ok(n) => n,
            Err(_) => return usage(&format!("--prime expects an integer, got `{prime_text}`")),
        };
        return match decide::analyze_prime_quotient(&p, &prime, &ctx.cfg) {
            Ok(rep) => {
                let dto = prime_quotient_dto(&rep);
                let human = render_prime_quotient(&dto);
                ctx.emit("quotient", params, Payload::PrimeQuotient(dto), human);
                0
            }
            Err(DecideError::Triangle(TriangleError::Arith(e))) => {
                usage(&format!("--prime {prime_text}: {e}"))
            }
            Err(DecideError::Triangle(TriangleError::PreconditionViolated(msg))) => {
                ctx.refuse("quotient", params, msg)
            }
            Err(DecideError::ExponentOverflow) => ctx.overflow(
                "quotient",
                params,
                "order exponents exceed the size guard",
            ),
            Err(e) => ctx.overflow("quotient", params, &e.to_string()),
        };
    }
    match decide::analyze_quotient(&p, &ctx.cfg) {
        Ok(rep) => {
            let complete = rep.order.is_some();
            let dto = quotient_dto(&rep);
            let human = render_quotient(&dto);
            ctx.emit("quotient", params, Payload::Quotient(dto), human);
            if complete {
                0
            } else {
                EXIT_OVERFLOW
            }
        }
        Err(DecideError::Triangle(TriangleError::PreconditionViolated(msg))) => {
            ctx.refuse("quotient", params, msg)
        }
        Err(DecideError::ExponentOverflow) => ctx.overflow(
            "quotient",
            params,
            "order exponents exceed the size guard",
        ),
        Err(e) => ctx.overflow("quotient", params, &e.to_string()),
    }
}

fn summary_dto(s: &SweepSummary) -> SweepSummaryDto {
    SweepSummaryDto {
        instances: s.instances.to_string(),
        developable: s.developable.to_string(),
        not_developable: s.not_developable.to_string(),
        unknown: s.unknown.to_string(),
        completed_orders: s.completed_orders.to_string(),
        incomplete: s.incomplete.to_string(),
        refusals: s.refusals.to_string(),
        errors: s.errors.to_string(),
        bound_failures: s.bound_failures.to_string(),
    }
}

fn cmd_sweep(ctx: &Ctx, spec_path: &PathBuf, out_dir: &PathBuf) -> u8 {
    let text = match std::fs::read_to_string(spec_path) {
        Ok(t) => t,
        Err(e) => return usage(&format!("cannot read {}: {e}", spec_path.display())),
    };
    let spec: SweepSpec = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => return usage(&format!("invalid sweep spec: {e}")),
    };
    let summary = match run_sweep(&spec, out_dir) {
        Ok(s) => s,
        Err(msg) => return usage(&msg),
    };
    let human = format!(
        "instances: {}\nverdicts: developable {}, not developable {}, unknown {}\n\
         orders: completed {}, incomplete {}\nrefusals: {}, errors: {}\n\
         bound check failures: {}\nwrote {}",
        summary.instances,
        summary.developable,
        summary.not_developable,
        summary.unknown,
        summary.completed_orders,
        summary.incomplete,
        summary.refusals,
        summary.errors,
        summary.bound_failures,
        out_dir.display(),
    );
    ctx.emit(
        "sweep",
        &spec_path.display().to_string(),
        Payload::SweepSummary(summary_dto(&summary)),
        human,
    );
    0
}

fn cmd_killer(ctx: &Ctx, params: &str, r: u32, s: u32, t: u32) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let inst = match killer_relation(&p, r, s, t, &ctx.cfg.guard) {
        Ok(Guarded::Exact(inst)) => inst,
        Ok(Guarded::Overflow) => {
            return ctx.overflow("killer", params, "relation exponents exceed the size guard")
        }
        Err(TriangleError::PreconditionViolated(msg)) => return ctx.refuse("killer", params, msg),
        Err(e) => return ctx.refuse("killer", params, &e.to_string()),
    };
    let (verified, note) = match decide::universal_quotient(&p, &ctx.cfg.guard) {
        Ok(Guarded::Exact(build)) => {
            match enumerate_with(
                &build.presentation,
                &SubgroupSpec::trivial(),
                &ctx.cfg.limits,
                ctx.cfg.strategy,
            ) {
                Ok(table) if table.is_complete() => {
                    let x = build.presentation.gens()[0].clone();
                    let relator =
                        Word::generator(x, inst.lhs_exponent.clone()).concat(&inst.rhs.inverse());
                    match table.is_trivial_in_quotient(&relator) {
                        Ok(holds) => (
                            Some(holds),
                            Some(format!(
                                "checked in the universal finite quotient of order {}",
                                table.coset_count()
                            )),
                        ),
                        Err(e) => (None, Some(e.to_string())),
                    }
                }
                Ok(_) => (
                    None,
                    Some(String::from("quotient enumeration incomplete within limits")),
                ),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        Ok(Guarded::Overflow) => (
            None,
            Some(String::from("quotient exponents exceed the size guard")),
        ),
        Err(e) => (None, Some(format!("quotient not constructed: {e}"))),
    };
    let dto = killer_dto(&p, &inst, verified, note.clone());
    let mut human = dto.relation.clone();
    match verified {
        Some(true) => human.push_str("\nverified: holds"),
        Some(false) => human.push_str("\nverified: FAILS"),
        None => human.push_str("\nverified: not checked"),
    }
    if let Some(note) = &note {
        human.push_str(&format!("\nnote: {note}"));
    }
    ctx.emit("killer", params, Payload::Killer(dto), human);
    match verified {
        Some(false) => EXIT_UNKNOWN,
        _ => 0,
    }
}

fn cmd_canon(ctx: &Ctx, params: &str) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let (canonical, moves) = canonicalize(&p);
    let dto = CanonDto {
        input: p.to_string(),
        canonical: canonical.to_string(),
        moves: moves.to_string(),
        orbit_size: orbit_size(&p).to_string(),
    };
    let human = format!(
        "canonical: {}\nmoves: {}\norbit size: {}",
        dto.canonical, dto.moves, dto.orbit_size
    );
    ctx.emit("canon", params, Payload::Canon(dto), human);
    0
}

fn cmd_abelianize(ctx: &Ctx, params: &str) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let invariants = abelianization(&triangle_presentation(&p));
    let dto = abelianize_dto(&p, &invariants);
    let human = format!(
        "abelianization: {}\nfree rank: {}",
        dto.display, dto.free_rank
    );
    ctx.emit("abelianize", params, Payload::Abelianize(dto), human);
    0
}

fn cmd_bounds(ctx: &Ctx, params: &str) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let build = match decide::universal_quotient(&p, &ctx.cfg.guard) {
        Ok(Guarded::Exact(build)) => build,
        Ok(Guarded::Overflow) => {
            return ctx.overflow("bounds", params, "order exponents exceed the size guard")
        }
        Err(DecideError::Triangle(TriangleError::PreconditionViolated(msg))) => {
            return ctx.refuse("bounds", params, msg)
        }
        Err(e) => return ctx.refuse("bounds", params, &e.to_string()),
    };
    let bounds = match order_bounds(&build.normalized, &ctx.cfg.guard) {
        Ok(Guarded::Exact(b)) => b,
        Ok(Guarded::Overflow) => {
            return ctx.overflow("bounds", params, "bound formulas exceed the size guard")
        }
        Err(e) => return ctx.refuse("bounds", params, &e.to_string()),
    };
    let dto = BoundsDto {
        params: p.to_string(),
        normalized: build.normalized.to_string(),
        moves: build.moves.to_string(),
        lower: bounds.lower.to_string(),
        modulus: bounds.modulus.to_string(),
        exponents: TripleDto::from_bigints(&build.exponents),
    };
    let human = format!(
        "normalized: {} (moves {})\nL (divides the quotient order): {}\n\
         M (multiple of order/L): {}\norder exponents: {}",
        dto.normalized,
        dto.moves,
        dto.lower,
        dto.modulus,
        render_triple(&dto.exponents)
    );
    ctx.emit("bounds", params, Payload::Bounds(dto), human);
    0
}

fn cmd_reduce(ctx: &Ctx, params: &str, pair: Option<usize>, factor: Option<&str>) -> u8 {
    let p = match parse_or_usage(params) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if let (Some(pair), Some(factor_text)) = (pair, factor) {
        let factor: BigInt = match factor_text.trim().parse() {
            Ok(n) => n,
            Err(_) => return usage(&format!("--factor expects an integer, got `{factor_text}`")),
        };
        return match power_reduce(&p, pair, &factor, &ctx.cfg.guard) {
            Ok(Guarded::Exact(q)) => {
                let dto = PowerReduceDto {
                    params: p.to_string(),
                    pair: pair.to_string(),
                    factor: factor.to_string(),
                    result: Some(q.to_string()),
                };
                let human = format!("reduced: {q}");
                ctx.emit("reduce", params, Payload::PowerReduce(dto), human);
                0
            }
            Ok(Guarded::Overflow) => {
                ctx.overflow("reduce", params, "the substituted tuple exceeds the size guard")
            }
            Err(e) => ctx.refuse("reduce", params, &e.to_string()),
        };
    }
    let reduction = coprime_reduce(&p, &ctx.cfg.guard);
    let dto = reduce_dto(&p, &reduction);
    let overflowed = dto.reduced.is_none();
    let human = format!(
        "normalized: {} (moves {})\ncommon factors: l {}, m {}, n {}\ncoprime part: {}\nreduced: {}",
        dto.normalized,
        dto.moves,
        dto.l,
        dto.m,
        dto.n,
        dto.coprime,
        dto.reduced.as_deref().unwrap_or("exceeds the size guard"),
    );
    ctx.emit("reduce", params, Payload::Reduce(dto), human);
    if overflowed {
        EXIT_OVERFLOW
    } else {
        0
    }
}

fn cmd_affine(ctx: &Ctx) -> u8 {
    let check = decide::affine_check();
    let dto = affine_dto(&check);
    let human = format!(
        "relations hold: {:?}\nsquares are translations: {:?}\ntranslation lattice has full rank: {}\npasses: {}",
        dto.relations_hold, dto.squares_are_translations, dto.translation_rank_full, dto.passes
    );
    let passes = dto.passes;
    ctx.emit("affine-check", "1,-1;1,-1;1,-1", Payload::AffineCheck(dto), human);
    if passes {
        0
    } else {
        EXIT_OVERFLOW
    }
}
