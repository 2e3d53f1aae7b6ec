//! Subcommand implementations; each returns a [`Report`].

use std::path::Path;

use mconc::mixed::{prepare, DEFAULT_CUTOFF};
use mconc::states::{self, SchmidtWeights};
use mconc::{
    chi_vectors, eta, evaluate, named_spec, optimize_lower_bound, quasi_pure, roof_direct_search,
    spectral_ensemble, BoundOptions, ConcurrenceSpec, DensityMatrix, NamedConcurrence, RoofOptions,
    SpecFile, StateVector, SystemShape,
};
use rand::Rng;

use crate::files::State;
use crate::report::{Cell, Report};
use crate::Failure;

/// Columns shared by the evaluation commands.
pub const VALUE_COLUMNS: [&str; 8] =
    ["quantity", "value", "spec", "method", "restarts", "converged", "singular_values", "note"];

/// A resolved specification and the identifier it is reported under.
#[derive(Debug, Clone)]
pub struct ResolvedSpec {
    pub spec: ConcurrenceSpec,
    pub id: String,
    pub warnings: Vec<String>,
}

/// A named concurrence (`bipartite`, `C3`, `c4_12`, ...) for the given
/// shape, or else a path to a JSON spec file whose dims must match.
pub fn resolve_spec(arg: &str, shape: &SystemShape) -> Result<ResolvedSpec, Failure> {
    if let Ok(name) = arg.parse::<NamedConcurrence>() {
        let spec = named_spec(name, shape.clone())?;
        return Ok(ResolvedSpec { spec, id: name.to_string(), warnings: vec![] });
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::Usage(format!(
            "--spec {arg}: neither a named concurrence nor an existing spec file"
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {arg}: {e}")))?;
    let file: SpecFile =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{arg}: malformed spec file: {e}")))?;
    let (spec, warnings) = file.into_spec()?;
    spec.shape().ensure_same(shape)?;
    Ok(ResolvedSpec { spec, id: arg.to_owned(), warnings: warnings.iter().map(|w| w.to_string()).collect() })
}

#[derive(Debug, Clone)]
pub struct MixedOptions {
    pub restarts: usize,
    pub seed: u64,
    pub quasi_pure: bool,
    /// `Some(None)` searches with the default number of members.
    pub roof: Option<Option<usize>>,
    pub roof_restarts: usize,
}

impl Default for MixedOptions {
    fn default() -> Self {
        Self { restarts: 32, seed: 0, quasi_pure: false, roof: None, roof_restarts: 8 }
    }
}

impl MixedOptions {
    fn bound(&self) -> BoundOptions {
        BoundOptions { restarts: self.restarts, seed: self.seed, ..Default::default() }
    }

    fn roof(&self, members: Option<usize>, target: Option<f64>) -> RoofOptions {
        RoofOptions { members, restarts: self.roof_restarts, seed: self.seed, target }
    }
}

pub fn eval_pure(state: &State, spec_arg: &str) -> Result<Report, Failure> {
    let State::Pure(psi) = state else {
        return Err(Failure::Usage("eval-pure needs a pure state; use bound-mixed for density matrices".into()));
    };
    let resolved = resolve_spec(spec_arg, psi.shape())?;
    let mut report = Report::new("eval-pure", &VALUE_COLUMNS);
    report.notes.extend(resolved.warnings.iter().cloned());
    report.push(vec![
        ("quantity", "concurrence".into()),
        ("value", evaluate(&resolved.spec, psi)?.into()),
        ("spec", resolved.id.into()),
        ("method", "pure".into()),
    ]);
    Ok(report)
}

/// Lower bound (exact when the operator has rank one) as a report row.
fn lower_bound_row(
    rho: &DensityMatrix,
    spec: &ConcurrenceSpec,
    quantity: &str,
    id: &str,
    opts: &MixedOptions,
) -> Result<Vec<(&'static str, Cell)>, Failure> {
    let (_, chis, t) = prepare(rho, spec)?;
    let report = optimize_lower_bound(&t, &opts.bound())?;
    let method = if chis.len() == 1 { "exact" } else { "optimized" };
    Ok(vec![
        ("quantity", quantity.to_owned().into()),
        ("value", report.lower_bound.into()),
        ("spec", id.to_owned().into()),
        ("method", method.into()),
        ("restarts", report.restarts_used.into()),
        ("converged", report.converged.into()),
        ("singular_values", report.singular_values.into()),
    ])
}

fn quasi_pure_row(rho: &DensityMatrix, spec: &ConcurrenceSpec, id: &str) -> Result<Vec<(&'static str, Cell)>, Failure> {
    let ens = spectral_ensemble(rho, DEFAULT_CUTOFF)?;
    let chis = chi_vectors(spec)?;
    let mut row = vec![
        ("quantity", "quasi_pure".into()),
        ("spec", id.to_owned().into()),
        ("method", "quasi_pure".into()),
    ];
    match quasi_pure(&ens, &chis) {
        Ok(qp) => {
            row.push(("value", qp.value.into()));
            if qp.degenerate {
                row.push(("note", "dominant eigenvalue degenerate".into()));
            }
        }
        Err(mconc::Error::Precondition(msg)) => row.push(("note", msg.into())),
        Err(e) => return Err(e.into()),
    }
    Ok(row)
}

fn roof_row(
    rho: &DensityMatrix,
    spec: &ConcurrenceSpec,
    id: &str,
    members: Option<usize>,
    lower: f64,
    opts: &MixedOptions,
) -> Result<Vec<(&'static str, Cell)>, Failure> {
    let est = roof_direct_search(rho, spec, &opts.roof(members, Some(lower)))?;
    Ok(vec![
        ("quantity", "roof_upper".into()),
        ("value", est.upper_bound.into()),
        ("spec", id.to_owned().into()),
        ("method", "direct_search".into()),
        ("restarts", opts.roof_restarts.into()),
        ("note", format!("{} members", est.isometry.nrows()).into()),
    ])
}

pub fn bound_mixed(state: &State, spec_arg: &str, opts: &MixedOptions) -> Result<Report, Failure> {
    let rho = state.density()?;
    let resolved = resolve_spec(spec_arg, rho.shape())?;
    let mut report = Report::new("bound-mixed", &VALUE_COLUMNS);
    report.notes.extend(resolved.warnings.iter().cloned());
    report.push(lower_bound_row(&rho, &resolved.spec, "lower_bound", &resolved.id, opts)?);
    let lower = report.value("lower_bound").expect("lower bound row");
    if opts.quasi_pure {
        report.push(quasi_pure_row(&rho, &resolved.spec, &resolved.id)?);
    }
    if let Some(members) = opts.roof {
        report.push(roof_row(&rho, &resolved.spec, &resolved.id, members, lower, opts)?);
    }
    Ok(report)
}

/// Every named concurrence for three or four parties.
pub fn fingerprint(state: &State, opts: &MixedOptions) -> Result<Report, Failure> {
    let shape = state.shape().clone();
    let arity = shape.arity();
    if !(3..=4).contains(&arity) {
        return Err(Failure::Usage(format!("fingerprint needs 3 or 4 parties, got {arity}")));
    }
    let mut report = Report::new("fingerprint", &VALUE_COLUMNS);
    for name in NamedConcurrence::family(arity) {
        let spec = named_spec(name, shape.clone())?;
        let id = name.to_string();
        match state {
            State::Pure(psi) => report.push(vec![
                ("quantity", id.clone().into()),
                ("value", evaluate(&spec, psi)?.into()),
                ("spec", id.into()),
                ("method", "pure".into()),
            ]),
            State::Mixed(rho) => report.push(lower_bound_row(rho, &spec, &id, &id, opts)?),
        }
    }
    Ok(report)
}

pub const TABLE_COLUMNS: [&str; 9] =
    ["draw", "row", "state", "quantity", "computed", "tabulated", "expression", "ratio", "status"];

/// Agreement required of the matching cells.
pub const TABLE_TOL: f64 = 1e-10;
/// The middle four-party row differs from the tabulated expression by this
/// factor.
pub const ROW2_RATIO: f64 = 2.0;
pub const ROW2_RATIO_TOL: f64 = 1e-9;

struct Cellref<'a> {
    row: usize,
    state: &'a str,
    quantity: &'a str,
    computed: f64,
    tabulated: f64,
    expression: &'a str,
    /// The tabulated expression is off by [`ROW2_RATIO`].
    scaled: bool,
}

fn push_table_cell(report: &mut Report, draw: usize, c: Cellref<'_>) {
    let ratio = (c.tabulated.abs() > 1e-12).then(|| c.computed / c.tabulated);
    let status = if c.scaled {
        match ratio {
            Some(r) if (r - ROW2_RATIO).abs() <= ROW2_RATIO_TOL => "factor 2",
            _ => "MISMATCH",
        }
    } else if (c.computed - c.tabulated).abs() <= TABLE_TOL {
        "ok"
    } else {
        "MISMATCH"
    };
    if status == "MISMATCH" {
        report.failures += 1;
    }
    report.push(vec![
        ("draw", draw.into()),
        ("row", c.row.into()),
        ("state", c.state.into()),
        ("quantity", c.quantity.into()),
        ("computed", c.computed.into()),
        ("tabulated", c.tabulated.into()),
        ("expression", c.expression.into()),
        ("ratio", ratio.into()),
        ("status", status.into()),
    ]);
}

/// Regenerates the table of tri- and four-partite concurrences for
/// bi-separable and GHZ states from random seeded factors.
pub fn table1(seed: u64, draws: usize) -> Result<Report, Failure> {
    let q = |n| SystemShape::qubits(n).expect("qubits");
    let mut report = Report::new("table1", &TABLE_COLUMNS);
    for draw in 0..draws {
        let mut rng = mconc::rng::stream(seed, draw as u64);
        let mut next = || rng.random::<u64>();
        let phi2 = states::random_pure(q(2), next());
        let zeta1 = states::random_pure(q(1), next());
        let phi3 = states::random_pure(q(3), next());
        let zeta2 = states::random_pure(q(2), next());
        let lambdas = SchmidtWeights::random(2, next())?;

        let bip = named_spec(NamedConcurrence::Bipartite, q(2))?;
        let c_phi = evaluate(&bip, &phi2)?;
        let c_zeta = evaluate(&bip, &zeta2)?;
        let eval = |name: NamedConcurrence, psi: &StateVector| -> Result<f64, Failure> {
            Ok(evaluate(&named_spec(name, psi.shape().clone())?, psi)?)
        };

        // three parties: the entangled pair sits on the parties not named by
        // the spectator position
        let three = [
            ("phi12 x zeta3", [0, 1, 2], 3),
            ("phi13 x zeta2", [0, 2, 1], 2),
            ("zeta1 x phi23", [1, 2, 0], 1),
        ];
        for (row, (label, placement, spectator)) in three.iter().enumerate() {
            let psi = states::biseparable(&phi2, &zeta1, placement)?;
            for k in 1..=3 {
                let tab = if k == *spectator { c_phi } else { 0.0 };
                let expr = if k == *spectator { "c(phi)" } else { "0" };
                let quantity = format!("c3_{k}");
                push_table_cell(&mut report, draw, Cellref {
                    row: row + 1,
                    state: label,
                    quantity: &quantity,
                    computed: eval(NamedConcurrence::C3k(k), &psi)?,
                    tabulated: tab,
                    expression: expr,
                    scaled: false,
                });
            }
            push_table_cell(&mut report, draw, Cellref {
                row: row + 1,
                state: label,
                quantity: "C3",
                computed: eval(NamedConcurrence::C3, &psi)?,
                tabulated: c_phi,
                expression: "c(phi)",
                scaled: false,
            });
        }

        // four parties, row 1
        let psi = states::biseparable(&phi3, &zeta1, &[0, 1, 2, 3])?;
        let c3_3 = eval(NamedConcurrence::C3k(3), &phi3)?;
        let label = "phi123 x zeta4";
        for (quantity, name, tab, expr) in [
            ("c4_12", NamedConcurrence::C4ij(1, 2), 0.0, "0"),
            ("c4_34", NamedConcurrence::C4ij(3, 4), 2.0 * c3_3, "2 c3_3(phi)"),
            ("C4", NamedConcurrence::C4, 0.0, "0"),
        ] {
            let computed = eval(name, &psi)?;
            push_table_cell(&mut report, draw, Cellref {
                row: 1, state: label, quantity, computed, tabulated: tab, expression: expr, scaled: false,
            });
        }

        // row 2
        let psi = states::biseparable(&phi2, &zeta2, &[0, 1, 2, 3])?;
        let eta_phi = eta(&phi2, &bip)?;
        let eta_zeta = eta(&zeta2, &bip)?;
        let label = "phi12 x zeta34";
        for (quantity, name, tab, expr, scaled) in [
            ("c4_12", NamedConcurrence::C4ij(1, 2), c_zeta * eta_phi, "c(zeta) eta(phi)", true),
            ("c4_34", NamedConcurrence::C4ij(3, 4), c_phi * eta_zeta, "c(phi) eta(zeta)", true),
            ("C4", NamedConcurrence::C4, c_phi * c_zeta, "c(phi) c(zeta)", false),
        ] {
            let computed = eval(name, &psi)?;
            push_table_cell(&mut report, draw, Cellref {
                row: 2, state: label, quantity, computed, tabulated: tab, expression: expr, scaled,
            });
        }

        // row 3
        let psi = states::ghz(&lambdas, 4, 2)?;
        let l = lambdas.lambdas();
        let ghz_law = 2.0 * (l[0] * l[1]).sqrt();
        for (quantity, name) in [
            ("c4_12", NamedConcurrence::C4ij(1, 2)),
            ("c4_34", NamedConcurrence::C4ij(3, 4)),
            ("C4", NamedConcurrence::C4),
        ] {
            let computed = eval(name, &psi)?;
            push_table_cell(&mut report, draw, Cellref {
                row: 3,
                state: "GHZ(lambda)",
                quantity,
                computed,
                tabulated: ghz_law,
                expression: "2 sqrt(sum_{i>j} l_i l_j)",
                scaled: false,
            });
        }
    }
    report.notes.push(format!(
        "row 2 c4_12 and c4_34: the operator definition (prefactor 16) gives {ROW2_RATIO} times the tabulated c*eta expression; computed values are not rescaled"
    ));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ghz,
    W,
    Bell,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ghz" => Ok(Family::Ghz),
            "w" => Ok(Family::W),
            "bell" => Ok(Family::Bell),
            _ => Err(format!("unknown family {s} (expected ghz, w or bell)")),
        }
    }
}

/// Reported drops of the lower bound along the grid larger than this
/// become warnings.
pub const MONOTONE_SLACK: f64 = 1e-6;

pub fn default_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

pub fn family_state(family: Family, parties: usize) -> Result<StateVector, Failure> {
    Ok(match family {
        Family::Ghz => states::ghz(&SchmidtWeights::uniform(2)?, parties, 2)?,
        Family::W => states::w_state(parties)?,
        Family::Bell => {
            if parties != 2 {
                return Err(Failure::Usage("the bell family has two parties".into()));
            }
            states::bell()
        }
    })
}

/// Lower bound, quasi-pure value and roof estimate of
/// `v |psi><psi| + (1 - v) I/D` along a visibility grid.
pub fn scan(
    family: Family,
    parties: usize,
    spec_arg: &str,
    grid: &[f64],
    opts: &MixedOptions,
) -> Result<Report, Failure> {
    if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Failure::Usage(format!("visibility {v} outside [0, 1]")));
    }
    let psi = family_state(family, parties)?;
    let resolved = resolve_spec(spec_arg, psi.shape())?;
    let mut report = Report::new(
        "scan",
        &["visibility", "lower_bound", "quasi_pure", "roof_upper", "spec", "converged", "note"],
    );
    report.notes.extend(resolved.warnings.iter().cloned());
    let members = opts.roof.flatten();
    let mut previous: Option<f64> = None;
    for &v in grid {
        let rho = states::white_noise_mix(&psi, v)?;
        let (ens, chis, t) = prepare(&rho, &resolved.spec)?;
        let bound = optimize_lower_bound(&t, &opts.bound())?;
        let (qp, note) = match quasi_pure(&ens, &chis) {
            Ok(qp) => (Some(qp.value), None),
            Err(mconc::Error::Precondition(msg)) => (None, Some(msg)),
            Err(e) => return Err(e.into()),
        };
        let roof = roof_direct_search(&rho, &resolved.spec, &opts.roof(members, Some(bound.lower_bound)))?;
        if let Some(p) = previous {
            if bound.lower_bound < p - MONOTONE_SLACK {
                report.notes.push(format!(
                    "warning: lower bound drops from {p} to {} at visibility {v}",
                    bound.lower_bound
                ));
            }
        }
        previous = Some(bound.lower_bound);
        report.push(vec![
            ("visibility", v.into()),
            ("lower_bound", bound.lower_bound.into()),
            ("quasi_pure", qp.into()),
            ("roof_upper", roof.upper_bound.into()),
            ("spec", resolved.id.clone().into()),
            ("converged", bound.converged.into()),
            ("note", note.map_or(Cell::Empty, Cell::from)),
        ]);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MakeKind {
    Ghz,
    W,
    Bell,
    RandomPure,
    RandomDensity,
}

#[derive(Debug, Clone)]
pub struct MakeSpec {
    pub kind: MakeKind,
    pub parties: usize,
    pub dim: usize,
    /// Schmidt weights for GHZ; uniform over `dim` when absent.
    pub weights: Option<Vec<f64>>,
    /// Local dimensions for the random states; `parties` qubits when absent.
    pub dims: Option<Vec<usize>>,
    pub rank: Option<usize>,
    pub visibility: Option<f64>,
    pub seed: u64,
}

pub fn make(m: &MakeSpec) -> Result<State, Failure> {
    let shape = || -> Result<SystemShape, Failure> {
        Ok(match &m.dims {
            Some(d) => SystemShape::new(d.clone())?,
            None => SystemShape::uniform(m.parties, m.dim)?,
        })
    };
    let pure = match m.kind {
        MakeKind::Ghz => {
            let w = match &m.weights {
                Some(w) => SchmidtWeights::new(w.clone())?,
                None => SchmidtWeights::uniform(m.dim)?,
            };
            states::ghz(&w, m.parties, m.dim)?
        }
        MakeKind::W => states::w_state(m.parties)?,
        MakeKind::Bell => states::bell(),
        MakeKind::RandomPure => states::random_pure(shape()?, m.seed),
        MakeKind::RandomDensity => {
            let shape = shape()?;
            let rank = m.rank.unwrap_or(shape.total_dim());
            let rho = states::random_density(shape, rank, m.seed)?;
            if m.visibility.is_some() {
                return Err(Failure::Usage("--visibility applies to pure families".into()));
            }
            return Ok(State::Mixed(rho));
        }
    };
    Ok(match m.visibility {
        Some(v) => State::Mixed(states::white_noise_mix(&pure, v)?),
        None => State::Pure(pure),
    })
}
