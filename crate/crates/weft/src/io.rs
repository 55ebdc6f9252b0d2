//! On-disk JSON formats for the command line front end.
//!
//! Every matrix entry travels as an exact rational string ("3", "-5/2"),
//! container orders are fixed by construction, and all emitters funnel
//! through [`to_json_pretty`], so emitting a parsed document reproduces it
//! byte for byte. Parsing is strict: unknown fields, shape mismatches, and
//! unreadable literals are reported as [`IoError`] instead of panicking,
//! which lets the front end separate bad input from internal bugs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::degeneration::{BoundaryDatum, DegenerationTable, TableCell};
use crate::filtration::{AxiomWitness, Filtration, NilpotentOp};
use crate::groupcoh::{FreeResolution, Group, GroupAction, GroupRingElement};
use crate::liecoh::{LieModule, NilpotentLieAlgebra};
use crate::linalg::{Rat, RatMatrix, Subspace};
use crate::orbit::OrbitDatum;
use crate::perverse::{MonSubsetReport, NCObject, PsiComponentReport};
use crate::poset::{Poset, PosetSheaf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IoError {
    /// The bytes are not a document of the expected shape.
    Parse(String),
    /// The document parsed but describes an object that fails validation.
    Invalid(String),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Parse(s) => write!(f, "parse error: {}", s),
            IoError::Invalid(s) => write!(f, "invalid input: {}", s),
        }
    }
}

impl std::error::Error for IoError {}

/// Canonical serializer: pretty JSON plus a trailing newline. Everything
/// written to disk goes through here, which is what makes byte-identical
/// round trips a meaningful promise.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports contain no non-string keys");
    s.push('\n');
    s
}

pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
}

fn parse_rat(s: &str) -> Result<Rat, IoError> {
    Rat::from_str(s.trim()).map_err(|e| IoError::Parse(format!("bad rational {:?}: {}", s, e)))
}

/// Matrix with exact rational entries, row major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDto {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixDto {
    pub fn from_matrix(m: &RatMatrix) -> Self {
        let entries = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect())
            .collect();
        MatrixDto { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_matrix(&self) -> Result<RatMatrix, IoError> {
        if self.entries.len() != self.rows {
            return Err(IoError::Invalid(format!(
                "matrix declares {} rows but lists {}",
                self.rows,
                self.entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.cols {
                return Err(IoError::Invalid(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    self.cols
                )));
            }
            for s in row {
                flat.push(parse_rat(s)?);
            }
        }
        Ok(RatMatrix::from_entries(self.rows, self.cols, flat))
    }
}

/// One step of a filtration: the rows of `basis` span the subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationStepDto {
    pub index: i64,
    pub basis: MatrixDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDto {
    pub ambient_dim: usize,
    pub steps: Vec<FiltrationStepDto>,
}

impl FiltrationDto {
    pub fn from_filtration(f: &Filtration) -> Self {
        let steps = f
            .steps()
            .iter()
            .map(|(&k, s)| FiltrationStepDto { index: k, basis: MatrixDto::from_matrix(s.basis()) })
            .collect();
        FiltrationDto { ambient_dim: f.ambient_dim(), steps }
    }

    pub fn to_filtration(&self) -> Result<Filtration, IoError> {
        if self.steps.is_empty() {
            return Err(IoError::Invalid("filtration needs at least one step".into()));
        }
        let mut steps: BTreeMap<i64, Subspace> = BTreeMap::new();
        for st in &self.steps {
            let m = st.basis.to_matrix()?;
            if m.cols() != self.ambient_dim {
                return Err(IoError::Invalid(format!(
                    "step {} basis has {} columns, ambient is {}",
                    st.index,
                    m.cols(),
                    self.ambient_dim
                )));
            }
            let rows: Vec<Vec<Rat>> = (0..m.rows()).map(|i| m.row(i)).collect();
            let s = Subspace::from_rows(self.ambient_dim, rows);
            if steps.insert(st.index, s).is_some() {
                return Err(IoError::Invalid(format!("duplicate filtration step {}", st.index)));
            }
        }
        // pre-check the constructor's assertions so bad input stays an error
        let listed: Vec<(&i64, &Subspace)> = steps.iter().collect();
        for w in listed.windows(2) {
            if !w[1].1.contains(w[0].1) {
                return Err(IoError::Invalid(format!(
                    "filtration steps are not nested between {} and {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if listed.last().unwrap().1.dim() != self.ambient_dim {
            return Err(IoError::Invalid("highest filtration step must be the full space".into()));
        }
        Ok(Filtration::new(self.ambient_dim, steps))
    }
}

/// Witness subspace attached to a failed step-indexed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepWitnessDto {
    pub step: i64,
    pub basis: MatrixDto,
}

impl StepWitnessDto {
    pub fn from_pair(w: &(i64, Subspace)) -> Self {
        StepWitnessDto { step: w.0, basis: MatrixDto::from_matrix(w.1.basis()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxiomWitnessDto {
    pub axiom: String,
    pub step: i64,
    pub power: i64,
    pub basis: MatrixDto,
}

impl AxiomWitnessDto {
    pub fn from_witness(w: &AxiomWitness) -> Self {
        AxiomWitnessDto {
            axiom: w.axiom.to_string(),
            step: w.step,
            power: w.power,
            basis: MatrixDto::from_matrix(w.subspace.basis()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDto {
    FreeAbelian { rank: usize },
    Free { rank: usize },
    Heisenberg,
    LatticeSemidirect { u: [[i64; 2]; 2] },
}

impl GroupDto {
    pub fn from_group(g: &Group) -> Self {
        match g {
            Group::FreeAbelian(n) => GroupDto::FreeAbelian { rank: *n },
            Group::Free(n) => GroupDto::Free { rank: *n },
            Group::Heisenberg => GroupDto::Heisenberg,
            Group::LatticeSemidirect { u } => GroupDto::LatticeSemidirect { u: *u },
        }
    }

    pub fn to_group(&self) -> Group {
        match self {
            GroupDto::FreeAbelian { rank } => Group::FreeAbelian(*rank),
            GroupDto::Free { rank } => Group::Free(*rank),
            GroupDto::Heisenberg => Group::Heisenberg,
            GroupDto::LatticeSemidirect { u } => Group::LatticeSemidirect { u: *u },
        }
    }
}

/// One monomial of a group ring element; exponent vector in generator order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingTermDto {
    pub coeff: i64,
    pub word: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingElementDto {
    pub terms: Vec<RingTermDto>,
}

impl RingElementDto {
    pub fn from_element(e: &GroupRingElement) -> Result<Self, IoError> {
        let mut terms = Vec::new();
        for (word, c) in e.terms() {
            let coeff = c
                .to_i64()
                .ok_or_else(|| IoError::Invalid("ring coefficient exceeds machine range".into()))?;
            terms.push(RingTermDto { coeff, word: word.clone() });
        }
        Ok(RingElementDto { terms })
    }

    pub fn to_element(&self) -> GroupRingElement {
        let mut acc = GroupRingElement::zero();
        for t in &self.terms {
            acc = acc.add(&GroupRingElement::monomial(t.word.clone(), t.coeff));
        }
        acc
    }
}

/// Free resolution over a group ring: one boundary table per step,
/// `boundaries[i][source][target]` mapping rank `ranks[i+1]` into `ranks[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionDto {
    pub group: GroupDto,
    pub ranks: Vec<usize>,
    pub boundaries: Vec<Vec<Vec<RingElementDto>>>,
    pub augmentation: Vec<i64>,
}

impl ResolutionDto {
    pub fn from_resolution(r: &FreeResolution) -> Result<Self, IoError> {
        let mut boundaries = Vec::new();
        for i in 1..=r.length() {
            let table = r.boundary(i);
            let mut rows = Vec::new();
            for row in table {
                rows.push(row.iter().map(RingElementDto::from_element).collect::<Result<_, _>>()?);
            }
            boundaries.push(rows);
        }
        Ok(ResolutionDto {
            group: GroupDto::from_group(r.group()),
            ranks: r.ranks().to_vec(),
            boundaries,
            augmentation: r.augmentation().to_vec(),
        })
    }

    pub fn to_resolution(&self) -> Result<FreeResolution, IoError> {
        let boundaries = self
            .boundaries
            .iter()
            .map(|table| table.iter().map(|row| row.iter().map(RingElementDto::to_element).collect()).collect())
            .collect();
        FreeResolution::new(self.group.to_group(), self.ranks.clone(), boundaries, self.augmentation.clone())
            .map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Group acting on `Q^dim` through one invertible matrix per generator.
/// An empty generator list is the trivial group acting on `Q^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupActionDto {
    pub group: GroupDto,
    pub dim: usize,
    pub generators: Vec<MatrixDto>,
}

impl GroupActionDto {
    pub fn from_action(a: &GroupAction) -> Self {
        GroupActionDto {
            group: GroupDto::from_group(a.group()),
            dim: a.dim(),
            generators: a.generators().iter().map(MatrixDto::from_matrix).collect(),
        }
    }

    pub fn to_action(&self) -> Result<GroupAction, IoError> {
        let group = self.group.to_group();
        if self.generators.is_empty() {
            if group.generator_count() != 0 {
                return Err(IoError::Invalid(format!(
                    "group needs {} generator matrices",
                    group.generator_count()
                )));
            }
            return Ok(GroupAction::trivial(self.dim));
        }
        let mut mats = Vec::new();
        for (i, m) in self.generators.iter().enumerate() {
            let mat = m.to_matrix()?;
            if mat.rows() != self.dim || mat.cols() != self.dim {
                return Err(IoError::Invalid(format!(
                    "generator {} is {}x{}, expected {}x{}",
                    i,
                    mat.rows(),
                    mat.cols(),
                    self.dim,
                    self.dim
                )));
            }
            mats.push(mat);
        }
        GroupAction::new(group, mats).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LieAlgebraDto {
    Abelian { dim: usize },
    AbelianGraded { weights: Vec<i64> },
    Heisenberg,
    /// `bracket[i][j]` lists the coordinates of [x_i, x_j].
    StructureConstants { bracket: Vec<Vec<Vec<String>>>, grading: Option<Vec<i64>> },
}

impl LieAlgebraDto {
    pub fn from_algebra(a: &NilpotentLieAlgebra) -> Self {
        let n = a.dim();
        let bracket = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| a.bracket(i, j).iter().map(|r| r.to_string()).collect())
                    .collect()
            })
            .collect();
        LieAlgebraDto::StructureConstants { bracket, grading: a.grading().map(|g| g.to_vec()) }
    }

    pub fn to_algebra(&self) -> Result<NilpotentLieAlgebra, IoError> {
        match self {
            LieAlgebraDto::Abelian { dim } => Ok(NilpotentLieAlgebra::abelian(*dim)),
            LieAlgebraDto::AbelianGraded { weights } => {
                Ok(NilpotentLieAlgebra::abelian_graded(weights))
            }
            LieAlgebraDto::Heisenberg => Ok(NilpotentLieAlgebra::heisenberg()),
            LieAlgebraDto::StructureConstants { bracket, grading } => {
                let mut parsed = Vec::new();
                for row in bracket {
                    let mut prow = Vec::new();
                    for cell in row {
                        prow.push(cell.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?);
                    }
                    parsed.push(prow);
                }
                NilpotentLieAlgebra::new(parsed, grading.clone())
                    .map_err(|e| IoError::Invalid(e.to_string()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieModuleDto {
    pub actions: Vec<MatrixDto>,
    #[serde(default)]
    pub grading: Option<MatrixDto>,
}

impl LieModuleDto {
    pub fn from_module(m: &LieModule) -> Self {
        LieModuleDto {
            actions: m.actions().iter().map(MatrixDto::from_matrix).collect(),
            grading: m.grading().map(MatrixDto::from_matrix),
        }
    }

    pub fn to_module(&self, algebra: &NilpotentLieAlgebra) -> Result<LieModule, IoError> {
        let actions = self.actions.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>, _>>()?;
        let grading = self.grading.as_ref().map(|m| m.to_matrix()).transpose()?;
        LieModule::new(algebra, actions, grading).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitDatumDto {
    pub weight: i64,
    pub hodge: FiltrationDto,
    pub weight_filtration: FiltrationDto,
    pub nilpotents: Vec<MatrixDto>,
    pub pairing: MatrixDto,
}

impl OrbitDatumDto {
    pub fn from_orbit(o: &OrbitDatum) -> Self {
        OrbitDatumDto {
            weight: o.weight(),
            hodge: FiltrationDto::from_filtration(o.hodge()),
            weight_filtration: FiltrationDto::from_filtration(o.weight_filt()),
            nilpotents: o.nilpotents().iter().map(|n| MatrixDto::from_matrix(n.matrix())).collect(),
            pairing: MatrixDto::from_matrix(o.pairing()),
        }
    }

    pub fn to_orbit(&self) -> Result<OrbitDatum, IoError> {
        let hodge = self.hodge.to_filtration()?;
        let weight_filt = self.weight_filtration.to_filtration()?;
        let mut nilpotents = Vec::new();
        for m in &self.nilpotents {
            nilpotents
                .push(NilpotentOp::new(m.to_matrix()?).map_err(|e| IoError::Invalid(e.to_string()))?);
        }
        let pairing = self.pairing.to_matrix()?;
        OrbitDatum::new(hodge, weight_filt, nilpotents, pairing, self.weight)
            .map_err(|e| IoError::Invalid(e.to_string()))
    }
}

fn mask_of(component: &[usize], n: usize) -> Result<usize, IoError> {
    let mut mask = 0usize;
    for &i in component {
        if i >= n {
            return Err(IoError::Invalid(format!("variable {} out of range for {} variables", i, n)));
        }
        if mask & (1 << i) != 0 {
            return Err(IoError::Invalid(format!("variable {} repeated in component", i)));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

fn set_of(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|i| mask >> i & 1 == 1).collect()
}

/// One structure map of a can/var/N object, keyed by the acting variable
/// and the component it acts on (a set of variable indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureMapDto {
    pub variable: usize,
    pub component: Vec<usize>,
    pub matrix: MatrixDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NCObjectDto {
    pub variables: usize,
    /// Component dimensions indexed by subset bitmask, lowest variable in
    /// the lowest bit.
    pub dims: Vec<usize>,
    pub can: Vec<StructureMapDto>,
    pub var: Vec<StructureMapDto>,
    pub nop: Vec<StructureMapDto>,
}

impl NCObjectDto {
    pub fn from_object(x: &NCObject) -> Self {
        let n = x.n();
        let mut can = Vec::new();
        let mut var = Vec::new();
        let mut nop = Vec::new();
        for mask in 0..1usize << n {
            for i in 0..n {
                let entry = |m: &RatMatrix| StructureMapDto {
                    variable: i,
                    component: set_of(mask),
                    matrix: MatrixDto::from_matrix(m),
                };
                if mask & (1 << i) == 0 {
                    can.push(entry(x.can(i, mask)));
                } else {
                    var.push(entry(x.var(i, mask)));
                }
                nop.push(entry(x.nop(i, mask)));
            }
        }
        NCObjectDto { variables: n, dims: x.dims().to_vec(), can, var, nop }
    }

    pub fn to_object(&self) -> Result<NCObject, IoError> {
        let n = self.variables;
        let mut maps = [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        for (slot, list) in [&self.can, &self.var, &self.nop].into_iter().enumerate() {
            for entry in list {
                let mask = mask_of(&entry.component, n)?;
                let key = (entry.variable, mask);
                if maps[slot].insert(key, entry.matrix.to_matrix()?).is_some() {
                    return Err(IoError::Invalid(format!(
                        "duplicate structure map for variable {} on {:?}",
                        entry.variable, entry.component
                    )));
                }
            }
        }
        let [can, var, nop] = maps;
        NCObject::new(n, self.dims.clone(), can, var, nop)
            .map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Local system presentation: one space with commuting nilpotent logs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSystemDto {
    pub dim: usize,
    pub logs: Vec<MatrixDto>,
}

impl LocalSystemDto {
    pub fn to_logs(&self) -> Result<Vec<NilpotentOp>, IoError> {
        let mut logs = Vec::new();
        for (i, m) in self.logs.iter().enumerate() {
            let mat = m.to_matrix()?;
            if mat.rows() != self.dim || mat.cols() != self.dim {
                return Err(IoError::Invalid(format!(
                    "log {} is {}x{}, expected {}x{}",
                    i,
                    mat.rows(),
                    mat.cols(),
                    self.dim,
                    self.dim
                )));
            }
            logs.push(NilpotentOp::new(mat).map_err(|e| IoError::Invalid(e.to_string()))?);
        }
        Ok(logs)
    }

    pub fn to_object(&self) -> Result<NCObject, IoError> {
        let logs = self.to_logs()?;
        NCObject::from_local_system(self.dim, &logs).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDto {
    pub size: usize,
    /// Generating relations a <= b; reflexive-transitive closure is taken.
    pub relations: Vec<(usize, usize)>,
}

impl PosetDto {
    pub fn from_poset(p: &Poset) -> Self {
        PosetDto { size: p.size(), relations: p.covering_pairs() }
    }

    pub fn to_poset(&self) -> Result<Poset, IoError> {
        Poset::new(self.size, &self.relations).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafMapDto {
    pub from: usize,
    pub to: usize,
    pub matrix: MatrixDto,
}

/// Sheaf on a finite poset: stalk dimensions plus one restriction matrix
/// per covering pair; composites are derived and checked on construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetSheafDto {
    pub poset: PosetDto,
    pub dims: Vec<usize>,
    pub restrictions: Vec<SheafMapDto>,
}

impl PosetSheafDto {
    pub fn from_sheaf(s: &PosetSheaf) -> Self {
        let poset = PosetDto::from_poset(s.poset());
        let restrictions = s
            .poset()
            .covering_pairs()
            .into_iter()
            .map(|(a, b)| SheafMapDto {
                from: a,
                to: b,
                matrix: MatrixDto::from_matrix(s.restriction(a, b)),
            })
            .collect();
        PosetSheafDto { poset, dims: s.dims().to_vec(), restrictions }
    }

    pub fn to_sheaf(&self) -> Result<PosetSheaf, IoError> {
        let poset = self.poset.to_poset()?;
        let mut maps = BTreeMap::new();
        for r in &self.restrictions {
            if maps.insert((r.from, r.to), r.matrix.to_matrix()?).is_some() {
                return Err(IoError::Invalid(format!(
                    "duplicate restriction {} -> {}",
                    r.from, r.to
                )));
            }
        }
        PosetSheaf::new(poset, self.dims.clone(), maps).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Full input of the boundary degeneration pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryDatumDto {
    pub fiber_algebra: LieAlgebraDto,
    pub module: LieModuleDto,
    pub lattice: GroupActionDto,
    pub twists: Vec<MatrixDto>,
    pub resolution: ResolutionDto,
    pub codimension: i64,
}

impl BoundaryDatumDto {
    pub fn from_datum(d: &BoundaryDatum) -> Result<Self, IoError> {
        Ok(BoundaryDatumDto {
            fiber_algebra: LieAlgebraDto::from_algebra(d.fiber_algebra()),
            module: LieModuleDto::from_module(d.module()),
            lattice: GroupActionDto::from_action(d.lattice_action()),
            twists: d.twists().iter().map(MatrixDto::from_matrix).collect(),
            resolution: ResolutionDto::from_resolution(d.resolution())?,
            codimension: d.codimension(),
        })
    }

    pub fn to_datum(&self) -> Result<BoundaryDatum, IoError> {
        let algebra = self.fiber_algebra.to_algebra()?;
        let module = self.module.to_module(&algebra)?;
        let lattice = self.lattice.to_action()?;
        let twists = self.twists.iter().map(|m| m.to_matrix()).collect::<Result<Vec<_>, _>>()?;
        let resolution = self.resolution.to_resolution()?;
        BoundaryDatum::new(algebra, module, lattice, twists, resolution, self.codimension)
            .map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableCellDto {
    pub dim: usize,
    pub weights: BTreeMap<i64, usize>,
}

impl TableCellDto {
    fn from_cell(c: &TableCell) -> Self {
        TableCellDto { dim: c.dim, weights: c.weights.clone() }
    }

    fn to_cell(&self) -> TableCell {
        TableCell { dim: self.dim, weights: self.weights.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntryDto {
    pub p: usize,
    pub q: usize,
    pub cell: TableCellDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableTotalDto {
    pub degree: i64,
    pub cell: TableCellDto,
}

/// Degeneration table: dims and weight multisets per bigraded slot, plus
/// the totals along `n = p + q - codimension`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegenerationTableDto {
    pub codimension: i64,
    pub entries: Vec<TableEntryDto>,
    pub totals: Vec<TableTotalDto>,
}

impl DegenerationTableDto {
    pub fn from_table(t: &DegenerationTable) -> Self {
        DegenerationTableDto {
            codimension: t.codimension,
            entries: t
                .entries
                .iter()
                .map(|(&(p, q), c)| TableEntryDto { p, q, cell: TableCellDto::from_cell(c) })
                .collect(),
            totals: t
                .totals
                .iter()
                .map(|(&n, c)| TableTotalDto { degree: n, cell: TableCellDto::from_cell(c) })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<DegenerationTable, IoError> {
        let mut entries = BTreeMap::new();
        for e in &self.entries {
            if entries.insert((e.p, e.q), e.cell.to_cell()).is_some() {
                return Err(IoError::Invalid(format!("duplicate table entry ({}, {})", e.p, e.q)));
            }
        }
        let mut totals = BTreeMap::new();
        for t in &self.totals {
            if totals.insert(t.degree, t.cell.to_cell()).is_some() {
                return Err(IoError::Invalid(format!("duplicate table total {}", t.degree)));
            }
        }
        Ok(DegenerationTable { entries, totals, codimension: self.codimension })
    }
}

// ---------------------------------------------------------------------------
// per-subcommand input envelopes

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfiltInput {
    pub matrix: MatrixDto,
    pub center: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelfiltInput {
    pub matrix: MatrixDto,
    pub filtration: FiltrationDto,
}

/// Object for the limit construction: either explicit structure maps or a
/// local system; exactly one of the two fields must be present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiInput {
    #[serde(default)]
    pub object: Option<NCObjectDto>,
    #[serde(default)]
    pub local_system: Option<LocalSystemDto>,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiWeightsInput {
    pub local_system: LocalSystemDto,
    /// One filtration per component bitmask, 2^n in total.
    pub filtrations: Vec<FiltrationDto>,
    pub center: i64,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexPairDto {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitCkInput {
    pub orbit: OrbitDatumDto,
    /// Defaults to every pair of disjoint index subsets.
    #[serde(default)]
    pub pairs: Option<Vec<IndexPairDto>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupcohInput {
    pub action: GroupActionDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiecohInput {
    pub algebra: LieAlgebraDto,
    /// Defaults to the one-dimensional trivial module.
    #[serde(default)]
    pub module: Option<LieModuleDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KostantInput {
    /// "a1" or "a2".
    pub system: String,
    pub lambda: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanInput {
    pub coefficient: i64,
    #[serde(default)]
    pub v0: Option<[i64; 2]>,
    #[serde(default)]
    pub v1: Option<[i64; 2]>,
    #[serde(default)]
    pub period: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CechCheckInput {
    pub sheaf: PosetSheafDto,
    pub cover: Vec<Vec<usize>>,
}

// ---------------------------------------------------------------------------
// per-subcommand report envelopes

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfiltReport {
    pub subcommand: String,
    pub passed: bool,
    pub center: i64,
    pub dim: usize,
    pub nilpotency_index: usize,
    pub graded_dims: BTreeMap<i64, usize>,
    pub filtration: FiltrationDto,
    pub step_compatibility: bool,
    pub graded_symmetry: bool,
    pub witness: Option<AxiomWitnessDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelfiltReport {
    pub subcommand: String,
    pub passed: bool,
    pub exists: bool,
    pub relative: Option<FiltrationDto>,
    pub step_compatibility: Option<bool>,
    pub graded_weights: Option<bool>,
    pub witness: Option<AxiomWitnessDto>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiComponentDto {
    pub component: Vec<usize>,
    pub dim: usize,
    pub monodromy: MatrixDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiReport {
    pub subcommand: String,
    pub passed: bool,
    pub m: usize,
    pub components: Vec<PsiComponentDto>,
    pub validation_failures: Vec<String>,
    pub monodromy_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonSubsetDto {
    pub subset: Vec<usize>,
    pub passed: bool,
    pub witness: Option<StepWitnessDto>,
}

impl MonSubsetDto {
    pub fn from_report(r: &MonSubsetReport) -> Self {
        MonSubsetDto {
            subset: r.subset.clone(),
            passed: r.passed,
            witness: r.witness.as_ref().map(StepWitnessDto::from_pair),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiWeightComponentDto {
    pub component: Vec<usize>,
    pub dim: usize,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<StepWitnessDto>,
}

impl PsiWeightComponentDto {
    pub fn from_report(r: &PsiComponentReport) -> Self {
        PsiWeightComponentDto {
            component: r.component.clone(),
            dim: r.dim,
            passed: r.passed,
            detail: r.detail.clone(),
            witness: r.witness.as_ref().map(StepWitnessDto::from_pair),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiWeightsReport {
    pub subcommand: String,
    pub passed: bool,
    pub center: i64,
    pub m: usize,
    pub monodromy_condition_passed: bool,
    pub monodromy_subsets: Vec<MonSubsetDto>,
    /// Present only when the cone condition holds and the comparison ran.
    pub components: Option<Vec<PsiWeightComponentDto>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitPairDto {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<StepWitnessDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitCkReport {
    pub subcommand: String,
    pub passed: bool,
    pub dim: usize,
    pub variables: usize,
    pub orbit: OrbitDatumDto,
    pub pairs: Vec<OrbitPairDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactPositionDto {
    pub position: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupcohReport {
    pub subcommand: String,
    pub passed: bool,
    pub group: GroupDto,
    pub module_dim: usize,
    pub dims: Vec<usize>,
    pub euler_characteristic: i64,
    /// Windowed exactness of the resolution, present when checked.
    pub exactness: Option<Vec<ExactPositionDto>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiecohReport {
    pub subcommand: String,
    pub passed: bool,
    pub algebra_dim: usize,
    pub module_dim: usize,
    pub dims: Vec<usize>,
    /// Weight multiplicities per degree when the module carries a grading.
    pub weights: Option<Vec<BTreeMap<i64, usize>>>,
    /// Agreement of the weight-split route with the direct one.
    pub weight_split_match: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KostantReportDto {
    pub subcommand: String,
    pub passed: bool,
    pub system: String,
    pub lambda: Vec<i64>,
    pub dims: Vec<usize>,
    pub expected_dims: Vec<usize>,
    pub weights: Vec<BTreeMap<i64, usize>>,
    pub expected_weights: Vec<BTreeMap<i64, usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactProbeDto {
    pub radius: i64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowProbeDto {
    pub inner: i64,
    pub outer: i64,
    pub positions: Vec<ExactPositionDto>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanResReport {
    pub subcommand: String,
    pub passed: bool,
    pub coefficient: i64,
    pub period: usize,
    pub transfer: [[i64; 2]; 2],
    pub ranks: Vec<usize>,
    pub fixed_point_free: bool,
    pub window_counts_match: bool,
    pub probes: Vec<ExactProbeDto>,
    pub window_probe: Option<WindowProbeDto>,
    pub resolution: ResolutionDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StalkVerdictDto {
    pub element: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CechCheckReport {
    pub subcommand: String,
    pub passed: bool,
    pub sheaf: PosetSheafDto,
    pub cover: Vec<Vec<usize>>,
    pub stalks: Vec<StalkVerdictDto>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::{degenerate, hilbert_example};
    use crate::filtration::weight_filtration;
    use crate::groupcoh::heisenberg_resolution;
    use crate::linalg::qi;
    use crate::orbit::OrbitDatum;
    use crate::poset::random_sheaf;
    use rand::SeedableRng;

    #[test]
    fn matrices_round_trip_through_strings() {
        let mut m = RatMatrix::zero(2, 3);
        m[(0, 0)] = qi(1) / qi(3);
        m[(1, 2)] = -qi(7) / qi(2);
        let dto = MatrixDto::from_matrix(&m);
        assert_eq!(dto.entries[0][0], "1/3");
        assert_eq!(dto.entries[1][2], "-7/2");
        assert_eq!(dto.to_matrix().unwrap(), m);

        let bad = MatrixDto { rows: 1, cols: 1, entries: vec![vec!["1/0".into()]] };
        assert!(bad.to_matrix().is_err());
        let short = MatrixDto { rows: 2, cols: 1, entries: vec![vec!["1".into()]] };
        assert!(short.to_matrix().is_err());
    }

    #[test]
    fn filtrations_round_trip_canonically() {
        let n = NilpotentOp::from_block_sizes(&[3, 2]);
        let w = weight_filtration(&n, 0);
        let dto = FiltrationDto::from_filtration(&w);
        assert_eq!(dto.to_filtration().unwrap(), w);
        assert_eq!(FiltrationDto::from_filtration(&dto.to_filtration().unwrap()), dto);
    }

    #[test]
    fn non_nested_steps_are_an_error_not_a_panic() {
        let full = MatrixDto::from_matrix(&RatMatrix::identity(2));
        let e1 = MatrixDto { rows: 1, cols: 2, entries: vec![vec!["1".into(), "0".into()]] };
        let e2 = MatrixDto { rows: 1, cols: 2, entries: vec![vec!["0".into(), "1".into()]] };
        let dto = FiltrationDto {
            ambient_dim: 2,
            steps: vec![
                FiltrationStepDto { index: 0, basis: e1 },
                FiltrationStepDto { index: 1, basis: e2 },
                FiltrationStepDto { index: 2, basis: full },
            ],
        };
        assert!(matches!(dto.to_filtration(), Err(IoError::Invalid(_))));
    }

    #[test]
    fn resolutions_round_trip() {
        let res = heisenberg_resolution();
        let dto = ResolutionDto::from_resolution(&res).unwrap();
        let back = dto.to_resolution().unwrap();
        assert_eq!(ResolutionDto::from_resolution(&back).unwrap(), dto);
    }

    #[test]
    fn nc_objects_round_trip() {
        let logs = vec![NilpotentOp::jordan_block(2), NilpotentOp::zero(2)];
        let x = NCObject::from_local_system(2, &logs).unwrap();
        let dto = NCObjectDto::from_object(&x);
        let back = dto.to_object().unwrap();
        assert_eq!(NCObjectDto::from_object(&back), dto);
    }

    #[test]
    fn orbit_data_round_trip() {
        let a = OrbitDatum::sl2_block(2, 0).unwrap();
        let b = OrbitDatum::sl2_block(3, -1).unwrap();
        let o = OrbitDatum::tensor(&a, &b, &[0], &[1], 2).unwrap();
        let dto = OrbitDatumDto::from_orbit(&o);
        let back = dto.to_orbit().unwrap();
        assert_eq!(OrbitDatumDto::from_orbit(&back), dto);
    }

    #[test]
    fn sheaves_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let poset = crate::poset::random_poset(&mut rng, 5);
        let sheaf = random_sheaf(&mut rng, &poset, 3);
        let dto = PosetSheafDto::from_sheaf(&sheaf);
        let back = dto.to_sheaf().unwrap();
        assert_eq!(PosetSheafDto::from_sheaf(&back), dto);
    }

    #[test]
    fn boundary_datum_and_table_round_trip() {
        let d = hilbert_example();
        let dto = BoundaryDatumDto::from_datum(&d).unwrap();
        let back = dto.to_datum().unwrap();
        assert_eq!(BoundaryDatumDto::from_datum(&back).unwrap(), dto);

        let table = degenerate(&d).unwrap();
        let tdto = DegenerationTableDto::from_table(&table);
        assert_eq!(tdto.to_table().unwrap(), table);
    }

    #[test]
    fn emitted_json_reparses_to_the_same_bytes() {
        let d = hilbert_example();
        let table = degenerate(&d).unwrap();
        let dto = DegenerationTableDto::from_table(&table);
        let text = to_json_pretty(&dto);
        let reparsed: DegenerationTableDto = from_json_str(&text).unwrap();
        assert_eq!(to_json_pretty(&reparsed), text);

        let w = weight_filtration(&NilpotentOp::from_block_sizes(&[2, 1]), 0);
        let report = WfiltReport {
            subcommand: "wfilt".into(),
            passed: true,
            center: 0,
            dim: 3,
            nilpotency_index: 2,
            graded_dims: w.graded_dims(),
            filtration: FiltrationDto::from_filtration(&w),
            step_compatibility: true,
            graded_symmetry: true,
            witness: None,
        };
        let text = to_json_pretty(&report);
        let reparsed: WfiltReport = from_json_str(&text).unwrap();
        assert_eq!(to_json_pretty(&reparsed), text);
    }
}
