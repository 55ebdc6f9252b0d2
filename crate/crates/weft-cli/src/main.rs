//! Batch front end for the weft workbench.
//!
//! Each subcommand reads a JSON description, runs the corresponding
//! computation with its checks, prints a short summary to stdout, and
//! writes a machine-readable JSON report when `--out` is given. Exit codes
//! separate the interesting outcomes: 0 means every check passed, 1 means a
//! mathematical check failed and the report carries the witness, 2 means
//! the input could not be read or violates a precondition, and 3 flags an
//! internal invariant breach.

use std::collections::{BTreeMap, BTreeSet};
use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weft::degeneration::{
    check_factor_containment, check_splitting, check_weight_commutation, degenerate,
    DegenerationError,
};
use weft::fan::{cech_chain_complex, PeriodicFan2D};
use weft::filtration::{
    relative_weight_filtration, verify_relative_axioms, verify_weight_axioms, weight_filtration,
    NilpotentOp, RelativeFiltration,
};
use weft::groupcoh::{
    check_windowed_exactness, cohomology_of_group, free_group_resolution, heisenberg_resolution,
    koszul_resolution, semidirect_resolution, Group,
};
use weft::io::{
    from_json_str, to_json_pretty, AxiomWitnessDto, BoundaryDatumDto, CechCheckInput,
    CechCheckReport, DegenerationTableDto, ExactPositionDto, ExactProbeDto, FanInput,
    FanResReport, FiltrationDto, GroupDto, GroupcohInput, GroupcohReport, IndexPairDto,
    KostantInput, KostantReportDto, LiecohInput, LiecohReport, MatrixDto, MonSubsetDto,
    OrbitCkInput, OrbitCkReport, OrbitDatumDto, OrbitPairDto, PosetSheafDto, PsiComponentDto,
    PsiInput, PsiReport, PsiWeightComponentDto, PsiWeightsInput, PsiWeightsReport, RelfiltInput,
    RelfiltReport, ResolutionDto, StalkVerdictDto, StepWitnessDto, WfiltInput, WfiltReport,
    WindowProbeDto,
};
use weft::liecoh::{kostant_check, lie_cohomology, weight_split_dims, LieModule, RootSystem};
use weft::orbit::{check_cattani_kaplan, random_orbit};
use weft::perverse::{
    check_monodromy_condition, check_nearby_weight_comparison, nearby_cycles, FilteredNCObject,
    NCObject,
};
use weft::poset::{
    check_cech_resolution, random_down_closed_cover, random_poset, random_sheaf, validate_cover,
};

#[derive(Parser)]
#[command(name = "weft", version, about = "Exact-rational homological algebra workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monodromy weight filtration of a nilpotent matrix, with axiom checks.
    Wfilt(CommonArgs),
    /// Weight filtration relative to a given one, or a nonexistence verdict.
    Relfilt(CommonArgs),
    /// Limit object along the first m coordinates of a can/var/N object.
    Psi(CommonArgs),
    /// Weight comparison on every component of the limit object.
    PsiWeights(CommonArgs),
    /// Pairwise compatibility of the weight filtrations of an orbit datum.
    OrbitCk(CommonArgs),
    /// Group cohomology of a module over a supported group.
    Groupcoh(CommonArgs),
    /// Chevalley-Eilenberg cohomology of a nilpotent Lie algebra module.
    Liecoh(CommonArgs),
    /// Highest-weight cohomology against the Weyl-orbit oracle.
    Kostant(CommonArgs),
    /// Free resolution from the star cover of a periodic fan.
    FanRes(CommonArgs),
    /// Stalkwise descent check for a sheaf cover on a finite poset.
    CechCheck(CommonArgs),
    /// Boundary degeneration table, optionally with all three checkers.
    Degenerate(DegenerateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input description, JSON. Relative paths also resolve under WEFT_FIXTURES.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Run the extra cross-checks; the only supported value is "all".
    #[arg(long, value_name = "WHAT")]
    check: Option<String>,
    /// Seed for generated instances (orbit-ck, cech-check).
    #[arg(long)]
    seed: Option<u64>,
    /// Window radius for exactness probes (groupcoh, fan-res).
    #[arg(long)]
    window: Option<i64>,
}

#[derive(Args)]
struct DegenerateArgs {
    /// Boundary datum, JSON. Relative paths also resolve under WEFT_FIXTURES.
    #[arg(long, alias = "in", value_name = "FILE")]
    datum: PathBuf,
    /// Write the degeneration table here, JSON.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Run the splitting, weight-commutation, and containment checkers ("all").
    #[arg(long, value_name = "WHAT")]
    check: Option<String>,
}

/// Unreadable or precondition-violating input; always exits with code 2.
struct InputError(String);

type Outcome = Result<bool, InputError>;

fn fail<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

fn main() -> ExitCode {
    let code = match std::panic::catch_unwind(run) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("weft: internal invariant breach");
            3
        }
    };
    ExitCode::from(code)
}

fn run() -> u8 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Wfilt(a) => cmd_wfilt(&a),
        Command::Relfilt(a) => cmd_relfilt(&a),
        Command::Psi(a) => cmd_psi(&a),
        Command::PsiWeights(a) => cmd_psi_weights(&a),
        Command::OrbitCk(a) => cmd_orbit_ck(&a),
        Command::Groupcoh(a) => cmd_groupcoh(&a),
        Command::Liecoh(a) => cmd_liecoh(&a),
        Command::Kostant(a) => cmd_kostant(&a),
        Command::FanRes(a) => cmd_fan_res(&a),
        Command::CechCheck(a) => cmd_cech_check(&a),
        Command::Degenerate(a) => cmd_degenerate(&a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(InputError(msg)) => {
            eprintln!("weft: {}", msg);
            2
        }
    }
}

/// Try the path as given, then under the fixture directory.
fn resolve_input(path: &Path) -> Result<PathBuf, InputError> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if path.is_relative() {
        if let Ok(root) = env::var("WEFT_FIXTURES") {
            let alt = Path::new(&root).join(path);
            if alt.exists() {
                return Ok(alt);
            }
        }
    }
    fail(format!("input file {} not found", path.display()))
}

fn read_input<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let resolved = resolve_input(path)?;
    let text = fs::read_to_string(&resolved)
        .map_err(|e| InputError(format!("cannot read {}: {}", resolved.display(), e)))?;
    from_json_str(&text).map_err(|e| InputError(format!("{}: {}", resolved.display(), e)))
}

fn require_input(args: &CommonArgs, name: &str) -> Result<PathBuf, InputError> {
    args.input.clone().ok_or_else(|| InputError(format!("{} needs --in FILE", name)))
}

fn write_report<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), InputError> {
    if let Some(path) = out {
        fs::write(path, to_json_pretty(value))
            .map_err(|e| InputError(format!("cannot write {}: {}", path.display(), e)))?;
    }
    Ok(())
}

/// "--check all" turns the optional cross-checks on; other values are typos.
fn check_requested(check: &Option<String>) -> Result<bool, InputError> {
    match check.as_deref() {
        None => Ok(false),
        Some("all") => Ok(true),
        Some(other) => fail(format!("unsupported --check value {:?}, use \"all\"", other)),
    }
}

fn verdict(name: &str, passed: bool) {
    println!("{}: {}", name, if passed { "PASS" } else { "FAIL" });
}

fn invalid(e: impl std::fmt::Display) -> InputError {
    InputError(e.to_string())
}

fn cmd_wfilt(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let input: WfiltInput = read_input(&require_input(args, "wfilt")?)?;
    let n = NilpotentOp::new(input.matrix.to_matrix().map_err(invalid)?).map_err(invalid)?;
    let m = weight_filtration(&n, input.center);
    let axioms = verify_weight_axioms(&n, &m, input.center);
    let passed = axioms.passed();
    let report = WfiltReport {
        subcommand: "wfilt".into(),
        passed,
        center: input.center,
        dim: n.dim(),
        nilpotency_index: n.nilpotency_index(),
        graded_dims: m.graded_dims(),
        filtration: FiltrationDto::from_filtration(&m),
        step_compatibility: axioms.step_compatibility,
        graded_symmetry: axioms.graded_symmetry,
        witness: axioms.witness.as_ref().map(AxiomWitnessDto::from_witness),
    };
    write_report(&args.out, &report)?;
    println!(
        "wfilt: dim {}, nilpotency index {}, steps {}..{}",
        n.dim(),
        n.nilpotency_index(),
        m.min_index(),
        m.max_index()
    );
    verdict("wfilt", passed);
    Ok(passed)
}

fn cmd_relfilt(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let input: RelfiltInput = read_input(&require_input(args, "relfilt")?)?;
    let n = NilpotentOp::new(input.matrix.to_matrix().map_err(invalid)?).map_err(invalid)?;
    let w = input.filtration.to_filtration().map_err(invalid)?;
    let outcome = relative_weight_filtration(&n, &w).map_err(invalid)?;
    let report = match &outcome {
        RelativeFiltration::NonExistent => RelfiltReport {
            subcommand: "relfilt".into(),
            passed: false,
            exists: false,
            relative: None,
            step_compatibility: None,
            graded_weights: None,
            witness: None,
            detail: "no filtration satisfies both relative axioms over the given one".into(),
        },
        RelativeFiltration::Exists(m) => {
            let axioms = verify_relative_axioms(&n, &w, m);
            RelfiltReport {
                subcommand: "relfilt".into(),
                passed: axioms.passed(),
                exists: true,
                relative: Some(FiltrationDto::from_filtration(m)),
                step_compatibility: Some(axioms.step_compatibility),
                graded_weights: Some(axioms.graded_weights),
                witness: axioms.witness.as_ref().map(AxiomWitnessDto::from_witness),
                detail: "relative weight filtration found".into(),
            }
        }
    };
    write_report(&args.out, &report)?;
    println!("relfilt: {}", report.detail);
    verdict("relfilt", report.passed);
    Ok(report.passed)
}

fn set_of(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).collect()
}

fn cmd_psi(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let input: PsiInput = read_input(&require_input(args, "psi")?)?;
    let x: NCObject = match (&input.object, &input.local_system) {
        (Some(dto), None) => dto.to_object().map_err(invalid)?,
        (None, Some(ls)) => ls.to_object().map_err(invalid)?,
        _ => return fail("psi needs exactly one of \"object\" or \"local_system\""),
    };
    let validation = x.validate();
    if !validation.passed() {
        let report = PsiReport {
            subcommand: "psi".into(),
            passed: false,
            m: input.m,
            components: Vec::new(),
            validation_failures: validation.failures.clone(),
            monodromy_failure: None,
        };
        write_report(&args.out, &report)?;
        println!("psi: input object fails validation: {}", validation.failures[0]);
        verdict("psi", false);
        return Ok(false);
    }
    let psi = nearby_cycles(&x, input.m).map_err(invalid)?;
    let n = psi.object.n();
    let components: Vec<PsiComponentDto> = (0..1usize << n)
        .map(|mask| PsiComponentDto {
            component: set_of(mask),
            dim: psi.object.dims()[mask],
            monodromy: MatrixDto::from_matrix(&psi.monodromy[mask]),
        })
        .collect();
    let monodromy_failure = psi.monodromy_commutes();
    let out_validation = psi.object.validate();
    let passed = monodromy_failure.is_none() && out_validation.passed();
    let report = PsiReport {
        subcommand: "psi".into(),
        passed,
        m: input.m,
        components,
        validation_failures: out_validation.failures,
        monodromy_failure,
    };
    write_report(&args.out, &report)?;
    let total: usize = psi.object.dims().iter().sum();
    println!("psi: {} components, total dim {}", 1usize << n, total);
    verdict("psi", passed);
    Ok(passed)
}

fn cmd_psi_weights(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let input: PsiWeightsInput = read_input(&require_input(args, "psi-weights")?)?;
    let logs = input.local_system.to_logs().map_err(invalid)?;
    let x = input.local_system.to_object().map_err(invalid)?;
    let size = 1usize << x.n();
    if input.filtrations.len() != size {
        return fail(format!(
            "psi-weights needs {} filtrations, one per component, got {}",
            size,
            input.filtrations.len()
        ));
    }
    let mut filts = Vec::new();
    for f in &input.filtrations {
        filts.push(f.to_filtration().map_err(invalid)?);
    }
    let v = FilteredNCObject::new(x, filts).map_err(invalid)?;
    let mon = check_monodromy_condition(&logs, input.center, v.filtration(0));
    let monodromy_subsets: Vec<MonSubsetDto> =
        mon.subsets.iter().map(MonSubsetDto::from_report).collect();
    if !mon.passed {
        let report = PsiWeightsReport {
            subcommand: "psi-weights".into(),
            passed: false,
            center: input.center,
            m: input.m,
            monodromy_condition_passed: false,
            monodromy_subsets,
            components: None,
        };
        write_report(&args.out, &report)?;
        let bad = mon.first_failing_subset().expect("a failed check names a subset");
        println!("psi-weights: cone condition fails for subset {:?}", bad.subset);
        verdict("psi-weights", false);
        return Ok(false);
    }
    let comparison = check_nearby_weight_comparison(&v, input.center, input.m).map_err(invalid)?;
    let report = PsiWeightsReport {
        subcommand: "psi-weights".into(),
        passed: comparison.passed,
        center: input.center,
        m: input.m,
        monodromy_condition_passed: true,
        monodromy_subsets,
        components: Some(
            comparison.components.iter().map(PsiWeightComponentDto::from_report).collect(),
        ),
    };
    write_report(&args.out, &report)?;
    println!(
        "psi-weights: cone condition holds, {} components compared",
        comparison.components.len()
    );
    verdict("psi-weights", report.passed);
    Ok(report.passed)
}

fn cmd_orbit_ck(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let (orbit, pairs) = match (&args.input, args.seed) {
        (Some(path), None) => {
            let input: OrbitCkInput = read_input(path)?;
            let orbit = input.orbit.to_orbit().map_err(invalid)?;
            (orbit, input.pairs)
        }
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (random_orbit(&mut rng, 2, 8), None)
        }
        _ => return fail("orbit-ck needs --in FILE or --seed N, not both"),
    };
    let pairs: Vec<IndexPairDto> = match pairs {
        Some(p) => p,
        None => {
            // every ordered pair of disjoint index subsets
            let n = orbit.variables();
            let mut out = Vec::new();
            for m1 in 0..1usize << n {
                for m2 in 0..1usize << n {
                    if m1 & m2 == 0 {
                        out.push(IndexPairDto { i1: set_of(m1), i2: set_of(m2) });
                    }
                }
            }
            out
        }
    };
    let mut results = Vec::new();
    let mut passed = true;
    for pair in &pairs {
        let rep = check_cattani_kaplan(&orbit, &pair.i1, &pair.i2).map_err(invalid)?;
        passed &= rep.passed;
        results.push(OrbitPairDto {
            i1: pair.i1.clone(),
            i2: pair.i2.clone(),
            passed: rep.passed,
            detail: rep.detail,
            witness: rep.witness.as_ref().map(StepWitnessDto::from_pair),
        });
    }
    let report = OrbitCkReport {
        subcommand: "orbit-ck".into(),
        passed,
        dim: orbit.dim(),
        variables: orbit.variables(),
        orbit: OrbitDatumDto::from_orbit(&orbit),
        pairs: results,
    };
    write_report(&args.out, &report)?;
    println!(
        "orbit-ck: dim {}, {} variables, {} pairs checked",
        orbit.dim(),
        orbit.variables(),
        report.pairs.len()
    );
    verdict("orbit-ck", passed);
    Ok(passed)
}

fn cmd_groupcoh(args: &CommonArgs) -> Outcome {
    let run_checks = check_requested(&args.check)?;
    let input: GroupcohInput = read_input(&require_input(args, "groupcoh")?)?;
    let action = input.action.to_action().map_err(invalid)?;
    let resolution = match action.group() {
        Group::FreeAbelian(n) => koszul_resolution(*n),
        Group::Free(n) => free_group_resolution(*n),
        Group::Heisenberg => heisenberg_resolution(),
        Group::LatticeSemidirect { u } => semidirect_resolution(*u).map_err(invalid)?,
    };
    let gc = cohomology_of_group(&resolution, &action).map_err(invalid)?;
    let dims = gc.dims();
    let mut passed = true;
    let exactness = if run_checks {
        let inner = args.window.unwrap_or(1);
        if inner < 1 {
            return fail("--window must be at least 1");
        }
        let rep = check_windowed_exactness(&resolution, inner, inner + 1).map_err(invalid)?;
        passed = rep.passed;
        Some(
            rep.positions
                .iter()
                .map(|&(position, exact)| ExactPositionDto { position, exact })
                .collect(),
        )
    } else {
        None
    };
    let report = GroupcohReport {
        subcommand: "groupcoh".into(),
        passed,
        group: GroupDto::from_group(action.group()),
        module_dim: action.dim(),
        dims: dims.clone(),
        euler_characteristic: gc.complex.euler_characteristic(),
        exactness,
    };
    write_report(&args.out, &report)?;
    println!("groupcoh: dims {:?}", dims);
    verdict("groupcoh", passed);
    Ok(passed)
}

fn cmd_liecoh(args: &CommonArgs) -> Outcome {
    let run_checks = check_requested(&args.check)?;
    let input: LiecohInput = read_input(&require_input(args, "liecoh")?)?;
    let algebra = input.algebra.to_algebra().map_err(invalid)?;
    let module = match &input.module {
        Some(dto) => dto.to_module(&algebra).map_err(invalid)?,
        None => LieModule::trivial(&algebra),
    };
    let lie = lie_cohomology(&algebra, &module).map_err(invalid)?;
    let dims = lie.dims();
    let mut passed = true;
    let weight_split_match = if run_checks {
        let split = weight_split_dims(&algebra, &module).map_err(invalid)?;
        let weights = lie
            .weights
            .as_ref()
            .ok_or_else(|| InputError("weight comparison needs a graded module".into()))?;
        let mut by_degree: Vec<BTreeMap<i64, usize>> = vec![BTreeMap::new(); dims.len()];
        for (&w, per_degree) in &split {
            for (q, &d) in per_degree.iter().enumerate() {
                if d > 0 {
                    by_degree[q].insert(w, d);
                }
            }
        }
        let matches = by_degree == *weights;
        passed = matches;
        Some(matches)
    } else {
        None
    };
    let report = LiecohReport {
        subcommand: "liecoh".into(),
        passed,
        algebra_dim: algebra.dim(),
        module_dim: module.dim(),
        dims: dims.clone(),
        weights: lie.weights.clone(),
        weight_split_match,
    };
    write_report(&args.out, &report)?;
    println!("liecoh: dims {:?}", dims);
    verdict("liecoh", passed);
    Ok(passed)
}

fn cmd_kostant(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let input: KostantInput = read_input(&require_input(args, "kostant")?)?;
    let system = match input.system.as_str() {
        "a1" | "A1" => RootSystem::A1,
        "a2" | "A2" => RootSystem::A2,
        other => return fail(format!("unknown root system {:?}, use \"a1\" or \"a2\"", other)),
    };
    let rep = kostant_check(system, &input.lambda).map_err(invalid)?;
    let report = KostantReportDto {
        subcommand: "kostant".into(),
        passed: rep.passed,
        system: input.system.to_lowercase(),
        lambda: input.lambda.clone(),
        dims: rep.dims.clone(),
        expected_dims: rep.expected_dims.clone(),
        weights: rep.weights.clone(),
        expected_weights: rep.expected_weights.clone(),
    };
    write_report(&args.out, &report)?;
    println!("kostant: dims {:?}, expected {:?}", rep.dims, rep.expected_dims);
    verdict("kostant", rep.passed);
    Ok(rep.passed)
}

fn cmd_fan_res(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let input: FanInput = match &args.input {
        Some(path) => read_input(path)?,
        None => FanInput { coefficient: 3, v0: None, v1: None, period: None },
    };
    let fan = match (input.v0, input.v1, input.period) {
        (None, None, None) => PeriodicFan2D::standard(input.coefficient).map_err(invalid)?,
        (Some(v0), Some(v1), Some(period)) => {
            PeriodicFan2D::new(input.coefficient, v0, v1, period).map_err(invalid)?
        }
        _ => return fail("custom fans need v0, v1, and period together"),
    };
    let cech = cech_chain_complex(&fan).map_err(invalid)?;
    let mut passed = cech.passed;
    let window_probe = match args.window {
        None => None,
        Some(w) => {
            if w < 1 {
                return fail("--window must be at least 1");
            }
            let rep = check_windowed_exactness(&cech.resolution, w, w + 1).map_err(invalid)?;
            passed &= rep.passed;
            Some(WindowProbeDto {
                inner: w,
                outer: w + 1,
                positions: rep
                    .positions
                    .iter()
                    .map(|&(position, exact)| ExactPositionDto { position, exact })
                    .collect(),
                passed: rep.passed,
            })
        }
    };
    let report = FanResReport {
        subcommand: "fan-res".into(),
        passed,
        coefficient: fan.coefficient(),
        period: fan.period(),
        transfer: fan.transfer(),
        ranks: cech.ranks.clone(),
        fixed_point_free: cech.fixed_point_free,
        window_counts_match: cech.window_counts_match,
        probes: cech
            .exactness
            .iter()
            .map(|&(radius, exact)| ExactProbeDto { radius, exact })
            .collect(),
        window_probe,
        resolution: ResolutionDto::from_resolution(&cech.resolution).map_err(invalid)?,
    };
    write_report(&args.out, &report)?;
    println!("fan-res: coefficient {}, ranks {:?}", fan.coefficient(), cech.ranks);
    verdict("fan-res", passed);
    Ok(passed)
}

fn cmd_cech_check(args: &CommonArgs) -> Outcome {
    check_requested(&args.check)?;
    let (sheaf, cover_sets) = match (&args.input, args.seed) {
        (Some(path), None) => {
            let input: CechCheckInput = read_input(path)?;
            let sheaf = input.sheaf.to_sheaf().map_err(invalid)?;
            let cover: Vec<BTreeSet<usize>> =
                input.cover.iter().map(|m| m.iter().copied().collect()).collect();
            validate_cover(sheaf.poset(), &cover).map_err(invalid)?;
            (sheaf, cover)
        }
        (None, Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let poset = random_poset(&mut rng, 5);
            let cover = random_down_closed_cover(&mut rng, &poset, 3);
            let sheaf = random_sheaf(&mut rng, &poset, 3);
            (sheaf, cover)
        }
        _ => return fail("cech-check needs --in FILE or --seed N, not both"),
    };
    let rep = check_cech_resolution(&sheaf, &cover_sets).map_err(invalid)?;
    let report = CechCheckReport {
        subcommand: "cech-check".into(),
        passed: rep.passed,
        sheaf: PosetSheafDto::from_sheaf(&sheaf),
        cover: cover_sets.iter().map(|m| m.iter().copied().collect()).collect(),
        stalks: rep
            .stalk_exact
            .iter()
            .map(|&(element, exact)| StalkVerdictDto { element, exact })
            .collect(),
    };
    write_report(&args.out, &report)?;
    println!(
        "cech-check: {} elements, {} cover members",
        report.sheaf.poset.size,
        report.cover.len()
    );
    verdict("cech-check", rep.passed);
    Ok(rep.passed)
}

/// Refusals are mathematical verdicts with a witness in the message; shape
/// and typing problems are input errors.
fn classify_degeneration(e: DegenerationError) -> Result<String, InputError> {
    match e {
        DegenerationError::WeightSplitRefused | DegenerationError::EquivarianceViolation { .. } => {
            Ok(e.to_string())
        }
        other => Err(invalid(other)),
    }
}

fn cmd_degenerate(args: &DegenerateArgs) -> Outcome {
    let run_checks = check_requested(&args.check)?;
    let dto: BoundaryDatumDto = read_input(&args.datum)?;
    let datum = dto.to_datum().map_err(invalid)?;
    let table = match degenerate(&datum) {
        Ok(t) => t,
        Err(e) => {
            let witness = classify_degeneration(e)?;
            println!("degenerate: refused: {}", witness);
            verdict("degenerate", false);
            return Ok(false);
        }
    };
    write_report(&args.out, &DegenerationTableDto::from_table(&table))?;
    for (&n, cell) in &table.totals {
        println!("degenerate: total degree {} has dim {} weights {:?}", n, cell.dim, cell.weights);
    }
    let mut passed = true;
    if run_checks {
        let splitting = check_splitting(&table, None);
        println!("degenerate: splitting {}", if splitting.passed { "PASS" } else { "FAIL" });
        passed &= splitting.passed;
        match check_weight_commutation(&datum) {
            Ok(rep) => {
                println!(
                    "degenerate: weight commutation {}",
                    if rep.passed { "PASS" } else { "FAIL" }
                );
                passed &= rep.passed;
            }
            Err(e) => {
                let witness = classify_degeneration(e)?;
                println!("degenerate: weight commutation refused: {}", witness);
                passed = false;
            }
        }
        match check_factor_containment(&datum) {
            Ok(rep) => {
                println!(
                    "degenerate: factor containment {}",
                    if rep.passed { "PASS" } else { "FAIL" }
                );
                passed &= rep.passed;
            }
            Err(e) => {
                let witness = classify_degeneration(e)?;
                println!("degenerate: factor containment refused: {}", witness);
                passed = false;
            }
        }
    }
    verdict("degenerate", passed);
    Ok(passed)
}
