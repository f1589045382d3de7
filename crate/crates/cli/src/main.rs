use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coarsekit::actions::{
    cobounded_check, coarse_action_certificate, commuting_equivalence, parse_action, point_finite_check,
    stabilizer_window, uniformly_bornologous_action_check, ActionSpec, DEFAULT_MESH_CAP,
};
use coarsekit::battery::{parse_family, BatteryConfig, DEFAULT_SEED, RANDOM_FAMILIES};
use coarsekit::cert::Certificate;
use coarsekit::coarse::{membership_window, CoarseStructureSpec, Side, Trace};
use coarsekit::gromov::{
    actions_commute, beta_window_check, enumerate_beta_windows, pin_stabilizer, Padding, TransferData,
    DEFAULT_EXPLOSION_CAP,
};
use coarsekit::group::{ball, element_cap, parse_group_spec, set_element_cap, Element, GroupSpec};
use coarsekit::group_coarse::{compare_left_right, dihedral_demo, fc_test, multiplication_bornologous_check};
use coarsekit::maps::{
    check_bornologous, check_coarsely_proper, parse_map, surjective_equivalence_check, MapWindow,
};
use coarsekit::report::{CheckRecord, Report, Verdict};
use coarsekit::{Error, Result};

#[derive(Parser)]
#[command(name = "coarsekit", version, about = "Coarse structures on groups, checked on finite Cayley windows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; JSON is complete, the table is a summary.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for the random part of every battery.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest ball the run may enumerate.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActionStructure {
    Left,
    Right,
    Induced,
}

#[derive(Subcommand)]
enum Command {
    /// Size of the word-metric ball.
    Ball {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Whether every conjugacy class is finite.
    Fc {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Compare the left and right structures.
    CompareLr {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Whether multiplication is bornologous for the left structure.
    MultBorn {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Witness sets of a family, e.g. `left-mult(t)` or `[["1","t"]]`.
    Witness {
        #[arg(long)]
        group: String,
        #[arg(long)]
        family: String,
        #[arg(long, value_enum, default_value_t = StructureArg::Both)]
        structure: StructureArg,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Bornologous, coarsely proper and equivalence checks for a map.
    MapCheck {
        #[arg(long)]
        map: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Coboundedness, properness and uniform bornology of an action.
    ActionCheck {
        #[arg(long)]
        action: String,
        #[arg(long, value_enum, default_value_t = ActionStructure::Left)]
        structure: ActionStructure,
        /// Comma-separated bounded set; found by search when absent.
        #[arg(long)]
        bounded: Option<String>,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Certify a coarse action and its orbit map.
    SvarcMilnor {
        #[arg(long)]
        action: String,
        #[arg(long, value_enum, default_value_t = ActionStructure::Left)]
        structure: ActionStructure,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Equivalence of two groups acting by commuting actions.
    Commuting {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        bounded: Option<String>,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// Transfer sets, cover and function-space windows of a map.
    Gromov {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        /// Radius of the enumerated tables.
        #[arg(long, default_value_t = 2)]
        window: usize,
        #[arg(long)]
        pin: Option<String>,
        /// `f:p1,p2` adds p1, p2 to c(F) whenever f is in F (and inverses).
        #[arg(long)]
        pad: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_EXPLOSION_CAP)]
        explosion_cap: u128,
    },
    /// Every infinite dihedral group example in one report.
    DemoDihedral {
        #[arg(long, default_value_t = 16)]
        radius: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ball { .. } => "ball",
            Command::Fc { .. } => "fc",
            Command::CompareLr { .. } => "compare-lr",
            Command::MultBorn { .. } => "mult-born",
            Command::Witness { .. } => "witness",
            Command::MapCheck { .. } => "map-check",
            Command::ActionCheck { .. } => "action-check",
            Command::SvarcMilnor { .. } => "svarc-milnor",
            Command::Commuting { .. } => "commuting",
            Command::Gromov { .. } => "gromov",
            Command::DemoDihedral { .. } => "demo-dihedral",
        }
    }

    fn radius(&self) -> usize {
        match self {
            Command::Ball { radius, .. }
            | Command::Fc { radius, .. }
            | Command::CompareLr { radius, .. }
            | Command::MultBorn { radius, .. }
            | Command::Witness { radius, .. }
            | Command::MapCheck { radius, .. }
            | Command::ActionCheck { radius, .. }
            | Command::SvarcMilnor { radius, .. }
            | Command::Commuting { radius, .. }
            | Command::Gromov { radius, .. }
            | Command::DemoDihedral { radius } => *radius,
        }
    }

    fn subject(&self) -> String {
        match self {
            Command::Ball { group, .. }
            | Command::Fc { group, .. }
            | Command::CompareLr { group, .. }
            | Command::MultBorn { group, .. }
            | Command::Witness { group, .. } => group.clone(),
            Command::MapCheck { map, .. } | Command::Gromov { map, .. } => map.clone(),
            Command::ActionCheck { action, .. } | Command::SvarcMilnor { action, .. } => action.clone(),
            Command::Commuting { left, right, .. } => format!("{left} / {right}"),
            Command::DemoDihedral { .. } => "DihInf".into(),
        }
    }
}

fn elements(space: &GroupSpec, list: &str) -> Result<Vec<Element>> {
    list.split(',').map(|s| space.parse_element(s.trim())).collect()
}

fn cert_record(check: &str, subject: impl ToString, cert: &Certificate) -> CheckRecord {
    let mut rec = CheckRecord::new(check, subject, cert.radius, Verdict::pass_fail(cert.pass));
    if let Some(f) = cert.first_failure() {
        rec = rec.witness(f.outcome.elements()).trace(f.outcome.trace().clone()).note(format!("fails on {}", f.family));
    }
    for n in &cert.notes {
        rec = rec.note(n.clone());
    }
    rec.details(cert)
}

fn right_note(a: &ActionSpec) -> Option<String> {
    a.to_string().starts_with("right(").then(|| format!("{a} is the left action g.w = w.g^-1"))
}

fn action_structure(a: &ActionSpec, kind: ActionStructure, u: &[Element]) -> Result<CoarseStructureSpec> {
    Ok(match kind {
        ActionStructure::Left => CoarseStructureSpec::LeftGroup(a.space().clone()),
        ActionStructure::Right => CoarseStructureSpec::RightGroup(a.space().clone()),
        ActionStructure::Induced => CoarseStructureSpec::action_induced(a, u)?,
    })
}

fn searched_bounded(a: &ActionSpec, radius: usize) -> Result<Vec<Element>> {
    let cob = cobounded_check(a, radius, DEFAULT_MESH_CAP)?;
    let names: Vec<String> = serde_json::from_value(cob.get("U").cloned().unwrap_or_default()).unwrap_or_default();
    names.iter().map(|n| a.space().parse_element(n)).collect()
}

fn run(cmd: &Command, report: &mut Report, batteries: &BatteryConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    match cmd {
        Command::Ball { group, radius } => {
            let g = parse_group_spec(group)?;
            let b = ball(&g, *radius)?;
            let trace = Trace::from_sizes(&(0..=*radius).map(|r| b.within(r).len()).collect::<Vec<_>>());
            let names: Vec<String> = b.elements().iter().map(Element::to_string).collect();
            out.push(
                CheckRecord::new("ball", &g, *radius, Verdict::Pass)
                    .witness(b.len())
                    .trace(trace)
                    .details(BTreeMap::from([("elements", names)])),
            );
        }
        Command::Fc { group, radius } => {
            let g = parse_group_spec(group)?;
            let v = fc_test(&g, *radius)?;
            let mut rec = CheckRecord::new("fc", &g, *radius, Verdict::pass_fail(v.pass));
            rec = match (&v.witness, &v.trace) {
                (Some(w), Some(t)) => rec.witness(w).trace(t.clone()),
                _ => rec.note(format!("every conjugacy window has at most {} elements", v.bound)),
            };
            out.push(rec.details(&v));
        }
        Command::CompareLr { group, radius } => {
            let g = parse_group_spec(group)?;
            let v = compare_left_right(&g, *radius)?;
            let mut rec = CheckRecord::new("compare-lr", &g, *radius, Verdict::equal_differ(v.equal));
            if let (Some(l), Some(r)) = (&v.left, &v.right) {
                let (bounded, other) = if r.is_bounded() { (r, l) } else { (l, r) };
                rec = rec.witness(bounded.elements()).trace(other.trace().clone());
            }
            if let Some(f) = &v.family {
                rec = rec.note(format!("separating family {f}"));
            }
            out.push(rec.details(&v));
        }
        Command::MultBorn { group, radius } => {
            let g = parse_group_spec(group)?;
            let v = multiplication_bornologous_check(&g, *radius)?;
            let mut rec = CheckRecord::new("mult-born", &g, *radius, Verdict::pass_fail(v.pass));
            if let Some(s) = &v.set {
                rec = rec.witness(s);
            }
            if let Some(o) = &v.outcome {
                rec = rec.trace(o.trace().clone());
            }
            out.push(rec.details(&v));
        }
        Command::Witness { group, family, structure, radius } => {
            let g = parse_group_spec(group)?;
            let fam = parse_family(&g, family)?;
            let specs = match structure {
                StructureArg::Left => vec![CoarseStructureSpec::LeftGroup(g.clone())],
                StructureArg::Right => vec![CoarseStructureSpec::RightGroup(g.clone())],
                StructureArg::Both => {
                    vec![CoarseStructureSpec::LeftGroup(g.clone()), CoarseStructureSpec::RightGroup(g.clone())]
                }
            };
            for spec in specs {
                let m = membership_window(&spec, &fam, *radius)?;
                out.push(
                    CheckRecord::new(format!("witness {spec}"), &g, *radius, Verdict::pass_fail(m.is_bounded()))
                        .witness(m.elements())
                        .trace(m.trace().clone())
                        .note(format!("family {}", fam.tag()))
                        .details(&m),
                );
            }
        }
        Command::MapCheck { map, side, radius } => {
            let m = parse_map(map)?;
            let side = Side::from(*side);
            report.config("side", side.to_string());
            let w = MapWindow::new(
                m.clone(),
                CoarseStructureSpec::side(side, m.source()),
                CoarseStructureSpec::side(side, m.target()),
            )?;
            let battery = batteries.for_spec(&w.source)?;
            out.push(cert_record("bornologous", &m, &check_bornologous(&w, &battery, *radius)?));
            out.push(cert_record("coarsely-proper", &m, &check_coarsely_proper(&w, *radius)?));
            match surjective_equivalence_check(&w, *radius, batteries) {
                Ok(c) => out.push(cert_record("coarse-equivalence", &m, &c)),
                Err(e @ Error::SurjectivityViolation { .. }) => out.push(
                    CheckRecord::new("coarse-equivalence", &m, *radius, Verdict::Fail)
                        .note(format!("{e}"))
                        .note("the equivalence check needs a map onto the window; check a surjective coarse inverse instead")
                        .details(BTreeMap::from([("code", e.code().to_string()), ("message", e.to_string())])),
                ),
                Err(e) => return Err(e),
            }
        }
        Command::ActionCheck { action, structure, bounded, radius } => {
            let a = parse_action(action)?;
            let cob = cobounded_check(&a, *radius, DEFAULT_MESH_CAP)?;
            out.push(cert_record("cobounded", &a, &cob));
            let u = match bounded {
                Some(list) => elements(a.space(), list)?,
                None => searched_bounded(&a, *radius)?,
            };
            report.config("bounded", &u);
            let stab = stabilizer_window(&a, &u, *radius)?;
            let point = point_finite_check(&a, &u, &a.space().identity(), *radius)?;
            out.push(
                CheckRecord::new("coarsely-proper", &a, *radius, Verdict::pass_fail(stab.stable && point.stable))
                    .witness(&stab.elements)
                    .trace(stab.trace.clone())
                    .details(BTreeMap::from([("stabilizer", &stab), ("point-finite", &point)])),
            );
            let spec = action_structure(&a, *structure, &u)?;
            let ub = uniformly_bornologous_action_check(&a, &spec, &batteries.for_spec(&spec)?, *radius)?;
            out.push(cert_record("uniformly-bornologous", &a, &ub));
            if let Some(n) = right_note(&a) {
                report.notes.push(n);
            }
        }
        Command::SvarcMilnor { action, structure, base, radius } => {
            let a = parse_action(action)?;
            let x0 = match base {
                Some(b) => a.space().parse_element(b)?,
                None => a.space().identity(),
            };
            let u = searched_bounded(&a, *radius)?;
            let spec = action_structure(&a, *structure, &u)?;
            let cert = coarse_action_certificate(&a, &spec, &x0, *radius, batteries)?;
            out.push(cert_record("coarse-action", &a, &cert));
            if let Some(n) = right_note(&a) {
                report.notes.push(n);
            }
        }
        Command::Commuting { left, right, bounded, base, radius } => {
            let a1 = parse_action(left)?;
            let a2 = parse_action(right)?;
            let u = match bounded {
                Some(list) => elements(a1.space(), list)?,
                None => searched_bounded(&a1, *radius)?,
            };
            let x0 = match base {
                Some(b) => a1.space().parse_element(b)?,
                None => a1.space().identity(),
            };
            report.config("bounded", &u);
            report.config("base", &x0);
            let cert = commuting_equivalence(&a1, &a2, &u, &x0, *radius, batteries)?;
            out.push(cert_record("commuting-equivalence", format!("{a1} / {a2}"), &cert));
            report.notes.extend([right_note(&a1), right_note(&a2)].into_iter().flatten());
        }
        Command::Gromov { map, radius, window, pin, pad, explosion_cap } => {
            let m = parse_map(map)?;
            let (g, h) = (m.source().clone(), m.target().clone());
            let pin = match pin {
                Some(p) => h.parse_element(p)?,
                None => h.identity(),
            };
            let mut pads = Vec::new();
            for p in pad {
                let (f, extra) =
                    p.split_once(':').ok_or_else(|| Error::Precondition(format!("padding `{p}` is not f:p1,p2")))?;
                pads.push((g.parse_element(f.trim())?, elements(&h, extra)?));
            }
            let padding = Padding::symmetric(&g, &h, &pads)?;
            report.config("window", window);
            report.config("pin", &pin);
            report.config("padding", &padding);
            let td = TransferData::compute(MapWindow::left(m.clone()), *radius, padding)?;
            let stable = td.c_table.iter().chain(&td.d_table).all(|t| t.stable);
            out.push(
                CheckRecord::new("transfer-sets", &m, *radius, Verdict::pass_fail(stable))
                    .note(format!("{} sets F in the source, {} in the target", td.c_table.len(), td.d_table.len()))
                    .details(&td),
            );
            out.push(
                CheckRecord::new("cover", &m, *radius, Verdict::Pass)
                    .witness(&td.cover.elements)
                    .note(format!("cover radius {}, mesh {}", td.cover.cover_radius, td.cover.mesh))
                    .details(&td.cover),
            );
            let alpha = td.alpha_window(*window)?;
            let verdict = beta_window_check(&alpha, &td)?;
            out.push(
                CheckRecord::new("alpha-conditions", &m, *window, Verdict::pass_fail(verdict.pass())).details(&verdict),
            );
            let en = enumerate_beta_windows(&td, *window, &pin, *explosion_cap)?;
            out.push(
                CheckRecord::new("enumeration", &m, *window, Verdict::Pass)
                    .witness(en.count)
                    .note(format!("{} candidate tables before filtering", en.candidates))
                    .details(&en),
            );
            let (mut triples, mut commute, mut proper) = (0usize, true, true);
            let gs = ball(&g, *window)?;
            let hs = ball(&h, 2)?;
            for beta in &en.windows {
                for x in gs.elements() {
                    for y in hs.elements() {
                        triples += 1;
                        commute &= actions_commute(x, y, beta)?;
                    }
                }
                proper &= pin_stabilizer(beta, &td).1;
            }
            out.push(
                CheckRecord::new("beta-actions-commute", &m, *window, Verdict::pass_fail(commute))
                    .witness(triples)
                    .note("g.(h.beta) = h.(g.beta) tablewise for g in Ball_G(window), h in Ball_H(2)"),
            );
            out.push(
                CheckRecord::new("pin-stabilizer", &m, *window, Verdict::pass_fail(proper))
                    .note("{g : beta(g) = beta(1)} lies in d({1}) for every enumerated beta"),
            );
        }
        Command::DemoDihedral { radius } => {
            let demo = dihedral_demo(*radius, batteries)?;
            report.notes.push(format!("reproduced: {}", demo.reproduced));
            out.extend(demo.records);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(cap) = cli.cap {
        set_element_cap(cap);
    }
    let batteries = BatteryConfig::with_seed(cli.seed);
    let mut report = Report::new(std::env::args().skip(1).collect());
    report.config("radius", cli.command.radius());
    report.config("seed", cli.seed);
    report.config("cap", element_cap());
    report.config("random-families", RANDOM_FAMILIES);
    match run(&cli.command, &mut report, &batteries) {
        Ok(records) => report.checks = records,
        Err(e) => report.checks = vec![CheckRecord::error(cli.command.name(), cli.command.subject(), cli.command.radius(), &e)],
    }
    let mut code = report.exit_code();
    if matches!(cli.command, Command::DemoDihedral { .. }) && code != 2 {
        code = if report.notes.iter().any(|n| n == "reproduced: true") { 0 } else { 1 };
    }
    let text = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("coarsekit: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
