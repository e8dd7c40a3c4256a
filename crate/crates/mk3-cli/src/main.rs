use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use mk3::brauer::{obstruction_for_profile, rational_bm_witness, strong_approximation_failure, QuaternionClass, Verdict};
use mk3::census::{admissible_count, hasse_failure_census, CensusMode, CensusOptions, CSV_HEADER, DEFAULT_ROW_BUDGET};
use mk3::frobenius::{frobenius_report, DEFAULT_FIELD_CEILING};
use mk3::hilbert::{hilbert_symbol, parse_rational, Place};
use mk3::lattice::{build_lattice, matrix_dump, verify_picard, GroupAction};
use mk3::local_points::{everywhere_locally_solvable, ProfileId};
use mk3::surfaces::{integral_point_search, rational_point_search, symmetry_group, AffinePoint, FamilyId, Surface};

/// Exit status for a verdict that could not be decided.
const INCONCLUSIVE: u8 = 2;

#[derive(Parser)]
#[command(name = "mk3", version, about = "Exact arithmetic for Markoff-type K3 surfaces")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Bounds {
    /// Primes up to this bound are scanned individually.
    #[arg(long, env = "MK3_PRIME_BOUND", default_value_t = 200)]
    prime_bound: u64,
    /// Residue depth of the local scans.
    #[arg(long, default_value_t = 5)]
    depth: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert symbol (a, b)_v as 0 or 1/2.
    #[command(allow_negative_numbers = true)]
    Hilbert {
        a: String,
        b: String,
        /// A prime or `inf`.
        place: String,
    },
    /// Integral points in a box, or rational points of bounded height.
    Search {
        #[arg(long)]
        family: FamilyId,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long = "box", default_value_t = 1000)]
        search_box: u64,
        #[arg(long)]
        rational: bool,
        #[arg(long, default_value_t = 50)]
        height: u64,
    },
    /// Local solvability at the real place and every prime up to the bound.
    Solvable {
        #[arg(long)]
        family: FamilyId,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, env = "MK3_PRIME_BOUND", default_value_t = 200)]
        prime_bound: u64,
    },
    /// Brauer-Manin obstruction for a parameter profile.
    Obstruction {
        #[arg(long)]
        family: Option<FamilyId>,
        #[arg(long, allow_negative_numbers = true)]
        ell: i64,
        /// thm44, thm45, thm46, prop51 or prop52; defaults to the family's profile.
        #[arg(long)]
        profile: Option<ProfileId>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Two 2-adic integral points with different invariants.
    SaFailure {
        #[arg(long)]
        family: FamilyId,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        /// Box for the integral point whose invariant is compared.
        #[arg(long = "box", default_value_t = 20)]
        search_box: u64,
    },
    /// Local rational points making the invariant sum vanish.
    RationalBm {
        #[arg(long)]
        family: FamilyId,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        /// Prime at which non-integral points are sought (default 2 for f1, 3 otherwise).
        #[arg(long)]
        prime: Option<u64>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Picard lattice checks and Galois cohomology.
    Picard {
        #[arg(long)]
        verify: bool,
        /// Write the Gram and generator matrices as plain text.
        #[arg(long)]
        dump_matrices: Option<PathBuf>,
    },
    /// Point counts over F_{p^n} and the Frobenius polynomial.
    Frobenius {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 3)]
        kmod: i64,
        #[arg(long, default_value_t = 3)]
        max_n: u32,
        #[arg(long, default_value_t = DEFAULT_FIELD_CEILING)]
        ceiling: u64,
    },
    /// Census of the obstruction profile up to |k| <= M.
    Census {
        #[arg(long)]
        family: FamilyId,
        #[arg(long = "max-M")]
        max_m: u64,
        #[arg(long)]
        prime_ell: bool,
        #[arg(long)]
        verify_obstruction: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "MK3_PRIME_BOUND", default_value_t = 50)]
        prime_bound: u64,
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_ROW_BUDGET)]
        row_budget: usize,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    result: T,
}

struct Output {
    json: bool,
    text: String,
}

impl Output {
    fn emit<T: Serialize>(&mut self, command: &str, result: &T) -> Result<()> {
        if self.json {
            self.text = serde_json::to_string_pretty(&Envelope { command, result })?;
            self.text.push('\n');
        }
        Ok(())
    }

    fn line(&mut self, s: impl AsRef<str>) {
        if !self.json {
            self.text.push_str(s.as_ref());
            self.text.push('\n');
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = Output { json: cli.json, text: String::new() };
    let status = run(cli.command, &mut out);
    let mut stdout = io::stdout().lock();
    let _ = stdout.write_all(out.text.as_bytes());
    let _ = stdout.flush();
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn surface_name(s: &Surface) -> String {
    format!("{} with k = {}", s.family, s.k)
}

fn run(cmd: Command, out: &mut Output) -> Result<u8> {
    match cmd {
        Command::Hilbert { a, b, place } => {
            let qa = parse_rational(&a).ok_or_else(|| anyhow!("malformed rational {a:?}"))?;
            let qb = parse_rational(&b).ok_or_else(|| anyhow!("malformed rational {b:?}"))?;
            let v: Place = place.parse()?;
            let value = if hilbert_symbol(&qa, &qb, v)?.is_half() { "1/2" } else { "0" };
            #[derive(Serialize)]
            struct R<'a> {
                a: String,
                b: String,
                place: Place,
                value: &'a str,
            }
            out.emit("hilbert", &R { a: qa.to_string(), b: qb.to_string(), place: v, value })?;
            out.line(value);
            Ok(0)
        }
        Command::Search { family, k, search_box, rational, height } => {
            let s = Surface::new(family, k);
            #[derive(Serialize)]
            struct Line {
                x: String,
                y: String,
                z: String,
                orbit_size: usize,
            }
            let lines: Vec<Line> = if rational {
                rational_point_search(&s, height)
                    .iter()
                    .map(|p| {
                        let [x, y, z] = p.coords();
                        Line { x: x.to_string(), y: y.to_string(), z: z.to_string(), orbit_size: orbit_size(p) }
                    })
                    .collect()
            } else {
                integral_point_search(&s, search_box)
                    .orbits
                    .iter()
                    .map(|o| Line { x: o.point[0].to_string(), y: o.point[1].to_string(), z: o.point[2].to_string(), orbit_size: o.orbit_size })
                    .collect()
            };
            // one JSON object per line in either mode
            for l in &lines {
                out.text.push_str(&serde_json::to_string(l)?);
                out.text.push('\n');
            }
            Ok(0)
        }
        Command::Solvable { family, k, prime_bound } => {
            let s = Surface::new(family, k);
            let r = everywhere_locally_solvable(&s, prime_bound);
            out.emit("solvable", &r)?;
            out.line(format!("{}: {}", surface_name(&s), if r.locally_solvable { "locally solvable up to the bound" } else { "not locally solvable" }));
            for e in r.primes.iter().filter(|e| e.witness.is_none()) {
                match e.no_roots_modulo_power {
                    Some(d) => out.line(format!("  p = {}: no roots modulo p^{d}", e.prime)),
                    None => out.line(format!("  p = {}: undecided at depth {}", e.prime, e.depth_scanned)),
                }
            }
            out.line(format!("  {}", r.tail_certificate));
            let undecided = r.primes.iter().any(|e| e.witness.is_none() && e.no_roots_modulo_power.is_none());
            Ok(if undecided { INCONCLUSIVE } else { 0 })
        }
        Command::Obstruction { family, ell, profile, bounds } => {
            let id = match (profile, family) {
                (Some(p), Some(f)) if p.family() != f => bail!("profile {} belongs to family {}", p.name(), p.family()),
                (Some(p), _) => p,
                (None, Some(f)) => ProfileId::obstruction_for(f),
                (None, None) => bail!("either --family or --profile is required"),
            };
            let r = obstruction_for_profile(id, ell, bounds.prime_bound, bounds.depth)?;
            out.emit("obstruction", &r)?;
            out.line(format!("{} ({}, l = {ell}): {}", surface_name(&r.surface), id.name(), r.verdict));
            for pl in &r.critical_places {
                let vs: Vec<String> = pl.vectors.iter().map(|v| mk3::brauer::format_vector(v)).collect();
                out.line(format!("  {:>4}: {{{}}}{}", pl.place.to_string(), vs.join(", "), if pl.complete { "" } else { " (incomplete)" }));
            }
            for n in &r.tail_notes {
                out.line(format!("  {n}"));
            }
            Ok(if r.verdict == Verdict::Inconclusive { INCONCLUSIVE } else { 0 })
        }
        Command::SaFailure { family, k, depth, search_box } => {
            let cl = match family {
                FamilyId::F1 => QuaternionClass::f1_a(),
                FamilyId::F2 => QuaternionClass::f2_a1(),
                FamilyId::F3 => QuaternionClass::f3_a1(),
            };
            let s = Surface::new(family, k);
            let r = strong_approximation_failure(&s, &cl, depth, search_box)?;
            out.emit("sa-failure", &r)?;
            out.line(format!("{}, class {}: {}", surface_name(&s), cl.label, r.note));
            for w in &r.witnesses {
                out.line(format!("  {:?} mod 2^{} -> {}", w.witness.point, w.witness.exponent, w.invariant));
            }
            Ok(if r.failure_exhibited { 0 } else { INCONCLUSIVE })
        }
        Command::RationalBm { family, k, prime, bounds } => {
            let s = Surface::new(family, k);
            let (classes, p) = match family {
                FamilyId::F1 => (vec![QuaternionClass::f1_a()], prime.unwrap_or(2)),
                f => (QuaternionClass::for_profile(ProfileId::obstruction_for(f)), prime.unwrap_or(3)),
            };
            let r = rational_bm_witness(&s, &classes, p, bounds.prime_bound, bounds.depth)?;
            out.emit("rational-bm", &r)?;
            out.line(format!("{} at p = {p}: {}", surface_name(&s), if r.found { "witness found" } else { "no witness found" }));
            for pt in &r.points {
                out.line(format!("  valuations {:?}: {}", pt.valuations, mk3::brauer::format_vector(&pt.vector)));
            }
            Ok(if r.found { 0 } else { INCONCLUSIVE })
        }
        Command::Picard { verify, dump_matrices } => {
            if let Some(path) = dump_matrices {
                let l = build_lattice()?;
                let a = GroupAction::on_picard(&l)?;
                let mut text = String::new();
                for (name, m) in matrix_dump(&l, &a) {
                    writeln!(text, "# {name} {}x{}", m.rows(), m.cols())?;
                    writeln!(text, "{}", m.to_string().trim_end())?;
                }
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            if !verify {
                return Ok(0);
            }
            let v = verify_picard()?;
            out.emit("picard", &v)?;
            out.line(format!("gram determinant {}", v.determinant));
            out.line(format!("fibration basis determinant {} (index {})", v.fibration_determinant, v.fibration_index));
            out.line(format!("signature ({}, {})", v.signature.0, v.signature.1));
            out.line(format!("quotient by fibers: rank {}, torsion {:?}", v.quotient_by_fibers.rank, v.quotient_by_fibers.torsion));
            out.line(format!("H1(G, Pic W) = {}", v.cohomology.projective));
            out.line(format!("H1(G, Pic U) = {}", v.cohomology.affine));
            out.line(format!("H1(<rho>, Pic W) = {}", v.cohomology.rho_projective));
            let d = &v.discrepancies;
            out.line(format!("displayed sigma block: isometry {}, matches reconstruction {}", d.displayed_sigma_block_is_isometry, d.displayed_sigma_block_matches));
            for r in d.relations.iter().filter(|r| !r.holds) {
                out.line(format!("relation fails: {}", r.relation));
            }
            for h in &v.half_sums {
                out.line(format!("half-sum with E^2 = {}: {:?}", h.self_intersection, h.verdict));
            }
            Ok(0)
        }
        Command::Frobenius { p, kmod, max_n, ceiling } => {
            let r = frobenius_report(p, kmod, max_n, ceiling)?;
            out.emit("frobenius", &r)?;
            for (n, c) in &r.counts.counts {
                out.line(format!("#W(F_{}^{n}) = {c}", p));
            }
            let ts: Vec<String> = r.traces.iter().map(|t| t.to_string()).collect();
            out.line(format!("traces {}", ts.join(", ")));
            out.line(format!("f(t) = {}", r.f));
            out.line(format!("roots of unity: {} of 22", r.unity_roots));
            Ok(0)
        }
        Command::Census { family, max_m, prime_ell, verify_obstruction, out: path, prime_bound, depth, row_budget } => {
            let mode = if prime_ell { CensusMode::PrimeEll } else { CensusMode::AllIntegers };
            let opts = CensusOptions { mode, verify: verify_obstruction, prime_bound, depth, row_budget };
            let c = hasse_failure_census(family, max_m, opts)?;
            let solvable = admissible_count(ProfileId::solvability_for(family), max_m, CensusMode::AllIntegers)?;
            if let Some(path) = path {
                let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
                w.write_record(CSV_HEADER)?;
                for r in &c.rows {
                    w.write_record(r.csv_record())?;
                }
                w.flush()?;
            }
            #[derive(Serialize)]
            struct Summary<'a> {
                census: &'a mk3::census::HasseCensus,
                solvability: &'a mk3::census::ProfileCount,
            }
            // the summary is always JSON
            out.text = serde_json::to_string_pretty(&Envelope { command: "census", result: Summary { census: &c, solvability: &solvable } })?;
            out.text.push('\n');
            Ok(if c.inconclusive > 0 { INCONCLUSIVE } else { 0 })
        }
    }
}

/// Size of the orbit of a point under the symmetry group.
fn orbit_size(p: &AffinePoint) -> usize {
    symmetry_group().iter().map(|g| p.apply(g)).collect::<std::collections::BTreeSet<_>>().len()
}
