//! Regenerates every input fixture and golden report in tests/golden.
//!
//! Kept out of the default run because it rewrites versioned files:
//!
//! ```text
//! cargo test -p weft-cli --test golden_gen -- --ignored
//! ```
//!
//! Input fixtures are emitted through the library's own serializers, and the
//! mathematically delicate ones are checked against the library before being
//! written, so a regenerated set can only differ when behavior really changed.

mod common;

use std::collections::BTreeMap;
use std::fs;

use weft::degeneration::hilbert_example;
use weft::filtration::{
    relative_weight_filtration, Filtration, NilpotentOp, RelativeFiltration,
};
use weft::groupcoh::{Group, GroupAction};
use weft::io::{
    to_json_pretty, BoundaryDatumDto, CechCheckInput, FiltrationDto, GroupActionDto,
    GroupcohInput, KostantInput, LieAlgebraDto, LieModuleDto, LiecohInput, LocalSystemDto,
    MatrixDto, OrbitCkInput, OrbitDatumDto, PsiInput, PsiWeightsInput, RelfiltInput, WfiltInput,
};
use weft::liecoh::{lie_cohomology, LieModule, NilpotentLieAlgebra};
use weft::linalg::{qi, RatMatrix, Subspace};
use weft::orbit::OrbitDatum;
use weft::perverse::{check_monodromy_condition, check_nearby_weight_comparison, FilteredNCObject};
use weft::poset::{Poset, PosetSheaf};

use common::{exit_code, golden_dir, run_case, CASES};

fn write_fixture(name: &str, text: String) {
    fs::write(golden_dir().join(name), text).expect("fixture written");
}

fn wfilt_fixture() {
    let n = NilpotentOp::from_block_sizes(&[3, 2]);
    let input = WfiltInput { matrix: MatrixDto::from_matrix(n.matrix()), center: 0 };
    write_fixture("wfilt_jordan32.in.json", to_json_pretty(&input));
}

fn relfilt_fixtures() {
    let n = NilpotentOp::from_block_sizes(&[2, 1]);
    let w = Filtration::pure(3, 0);
    assert!(
        matches!(relative_weight_filtration(&n, &w), Ok(RelativeFiltration::Exists(_))),
        "the pure-base fixture must admit a relative filtration"
    );
    let input = RelfiltInput {
        matrix: MatrixDto::from_matrix(n.matrix()),
        filtration: FiltrationDto::from_filtration(&w),
    };
    write_fixture("relfilt_pure.in.json", to_json_pretty(&input));

    // Two-step base whose graded pieces cannot carry a common filtration.
    let n = NilpotentOp::new(RatMatrix::from_rows(vec![
        vec![qi(0), qi(1)],
        vec![qi(0), qi(0)],
    ]))
    .expect("strictly upper triangular");
    let mut steps = BTreeMap::new();
    steps.insert(-1, Subspace::zero(2));
    steps.insert(0, Subspace::from_rows(2, vec![vec![qi(1), qi(0)]]));
    steps.insert(1, Subspace::from_rows(2, vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]));
    let w = Filtration::new(2, steps);
    assert!(
        matches!(relative_weight_filtration(&n, &w), Ok(RelativeFiltration::NonExistent)),
        "the obstructed fixture must stay obstructed"
    );
    let input = RelfiltInput {
        matrix: MatrixDto::from_matrix(n.matrix()),
        filtration: FiltrationDto::from_filtration(&w),
    };
    write_fixture("relfilt_obstructed.in.json", to_json_pretty(&input));
}

fn psi_fixture() {
    let log = NilpotentOp::jordan_block(3);
    let input = PsiInput {
        object: None,
        local_system: Some(LocalSystemDto {
            dim: 3,
            logs: vec![MatrixDto::from_matrix(log.matrix())],
        }),
        m: 1,
    };
    write_fixture("psi_block.in.json", to_json_pretty(&input));
}

fn psi_weights_fixtures() {
    let o = OrbitDatum::sl2_block(3, 0).expect("block of size 3");
    let v = FilteredNCObject::from_orbit(&o);
    let logs = vec![o.nilpotent(0).clone()];
    assert!(
        check_monodromy_condition(&logs, o.weight(), v.filtration(0)).passed,
        "the cone condition must hold on the block fixture"
    );
    let report = check_nearby_weight_comparison(&v, o.weight(), 1)
        .expect("local system shape by construction");
    assert!(report.passed, "the weight comparison must pass on the block fixture");
    let input = PsiWeightsInput {
        local_system: LocalSystemDto {
            dim: o.dim(),
            logs: vec![MatrixDto::from_matrix(o.nilpotent(0).matrix())],
        },
        filtrations: vec![
            FiltrationDto::from_filtration(v.filtration(0)),
            FiltrationDto::from_filtration(v.filtration(1)),
        ],
        center: o.weight(),
        m: 1,
    };
    write_fixture("psiw_sl2.in.json", to_json_pretty(&input));

    // Pure filtration on a nontrivial log: the cone condition has to fail,
    // and the run must exit 1 carrying the violating subset.
    let log = NilpotentOp::jordan_block(2);
    let pure = Filtration::pure(2, 0);
    assert!(!check_monodromy_condition(&[log.clone()], 0, &pure).passed);
    let input = PsiWeightsInput {
        local_system: LocalSystemDto { dim: 2, logs: vec![MatrixDto::from_matrix(log.matrix())] },
        filtrations: vec![
            FiltrationDto::from_filtration(&pure),
            FiltrationDto::from_filtration(&pure),
        ],
        center: 0,
        m: 1,
    };
    write_fixture("psiw_violated.in.json", to_json_pretty(&input));
}

fn orbit_fixture() {
    let a = OrbitDatum::sl2_block(2, 0).expect("block of size 2");
    let b = OrbitDatum::sl2_block(3, -1).expect("twisted block of size 3");
    let o = OrbitDatum::tensor(&a, &b, &[0], &[1], 2).expect("disjoint variable assignment");
    let input = OrbitCkInput { orbit: OrbitDatumDto::from_orbit(&o), pairs: None };
    write_fixture("orbitck_tensor.in.json", to_json_pretty(&input));
}

fn groupcoh_fixture() {
    let action = GroupAction::new(
        Group::FreeAbelian(2),
        vec![RatMatrix::identity(1), RatMatrix::identity(1)],
    )
    .expect("identities satisfy any relation");
    let input = GroupcohInput { action: GroupActionDto::from_action(&action) };
    write_fixture("groupcoh_z2.in.json", to_json_pretty(&input));
}

fn liecoh_fixtures() {
    let input = LiecohInput { algebra: LieAlgebraDto::Heisenberg, module: None };
    write_fixture("liecoh_heis.in.json", to_json_pretty(&input));

    // Four-dimensional irreducible of the graded line: one raising operator
    // and the diagonal grading, cohomology one line in degrees 0 and 1.
    let algebra = NilpotentLieAlgebra::abelian_graded(&[2]);
    let mut e = RatMatrix::zero(4, 4);
    e[(0, 1)] = qi(3);
    e[(1, 2)] = qi(4);
    e[(2, 3)] = qi(3);
    let mut y = RatMatrix::zero(4, 4);
    for (i, w) in [3, 1, -1, -3].into_iter().enumerate() {
        y[(i, i)] = qi(w);
    }
    let module = LieModule::new(&algebra, vec![e], Some(y)).expect("graded action");
    let lie = lie_cohomology(&algebra, &module).expect("complex assembles");
    assert_eq!(lie.dims(), vec![1, 1]);
    let input = LiecohInput {
        algebra: LieAlgebraDto::AbelianGraded { weights: vec![2] },
        module: Some(LieModuleDto::from_module(&module)),
    };
    write_fixture("liecoh_sym3.in.json", to_json_pretty(&input));
}

fn kostant_fixture() {
    let input = KostantInput { system: "a1".to_string(), lambda: vec![4] };
    write_fixture("kostant_a1.in.json", to_json_pretty(&input));
}

fn cech_fixture() {
    let sheaf = PosetSheaf::constant(Poset::chain(3), 1);
    let input = CechCheckInput {
        sheaf: weft::io::PosetSheafDto::from_sheaf(&sheaf),
        cover: vec![vec![0], vec![0, 1], vec![0, 1, 2]],
    };
    write_fixture("cech_chain.in.json", to_json_pretty(&input));
}

fn degenerate_fixture() {
    let datum = BoundaryDatumDto::from_datum(&hilbert_example()).expect("coefficients fit i64");
    write_fixture("hilbert.datum.json", to_json_pretty(&datum));
}

#[test]
#[ignore = "rewrites the versioned goldens in place"]
fn regenerate_goldens() {
    fs::create_dir_all(golden_dir()).expect("golden dir exists");
    wfilt_fixture();
    relfilt_fixtures();
    psi_fixture();
    psi_weights_fixtures();
    orbit_fixture();
    groupcoh_fixture();
    liecoh_fixtures();
    kostant_fixture();
    cech_fixture();
    degenerate_fixture();

    for case in CASES {
        let out = golden_dir().join(case.golden);
        let output = run_case(case, &out);
        assert_eq!(
            exit_code(&output),
            case.exit,
            "{} {:?}: stdout={} stderr={}",
            case.sub,
            case.input,
            String::from_utf8_lossy(&output.stdout),
            String::from_utf8_lossy(&output.stderr),
        );
        assert!(out.is_file(), "{} left no report", case.golden);
    }
}
