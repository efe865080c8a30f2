//! Bundled experiment templates and data files.

use crate::config::Kind;

/// A bundled template.
pub struct Template {
    pub name: &'static str,
    pub kind: Kind,
    pub description: &'static str,
    pub topic: &'static str,
    pub config: &'static str,
}

pub const TEMPLATES: &[Template] = &[
    Template {
        name: "embedding-coboundary",
        kind: Kind::Embedding,
        description: "Orbit derivative of a trigonometric polynomial with its certificate",
        topic: "coboundaries",
        config: include_str!("../templates/embedding-coboundary.json"),
    },
    Template {
        name: "embedding-log-average",
        kind: Kind::Embedding,
        description: "Time-one average of log x under x -> e^t x",
        topic: "time-one averages",
        config: include_str!("../templates/embedding-log-average.json"),
    },
    Template {
        name: "embedding-power-average",
        kind: Kind::Embedding,
        description: "Time-one average of x^3 under x -> e^t x",
        topic: "time-one averages",
        config: include_str!("../templates/embedding-power-average.json"),
    },
    Template {
        name: "embedding-resolvent",
        kind: Kind::Embedding,
        description: "Resolvent construction for a circle rotation",
        topic: "uniquely ergodic time-one maps",
        config: include_str!("../templates/embedding-resolvent.json"),
    },
    Template {
        name: "embedding-sawtooth-obstruction",
        kind: Kind::Embedding,
        description: "Orbit-derivative test on the sawtooth over a linear torus flow",
        topic: "time-one averages",
        config: include_str!("../templates/embedding-sawtooth-obstruction.json"),
    },
    Template {
        name: "embedding-solve-torus",
        kind: Kind::Embedding,
        description: "Fourier solution of the embedding equation on the two-torus",
        topic: "time-one averages",
        config: include_str!("../templates/embedding-solve-torus.json"),
    },
    Template {
        name: "equivalence-bounded-distortion",
        kind: Kind::Equivalence,
        description: "Additive generator for a bounded-distortion family",
        topic: "almost additive flow families",
        config: include_str!("../templates/equivalence-bounded-distortion.json"),
    },
    Template {
        name: "equivalence-closure",
        kind: Kind::Equivalence,
        description: "Recovery of a lifted generator from its own additive family",
        topic: "flow equivalence",
        config: include_str!("../templates/equivalence-closure.json"),
    },
    Template {
        name: "equivalence-cocycle",
        kind: Kind::Equivalence,
        description: "Additive generator for the log-norm family of a positive matrix cocycle",
        topic: "almost additive flow families",
        config: include_str!("../templates/equivalence-cocycle.json"),
    },
    Template {
        name: "equivalence-linear",
        kind: Kind::Equivalence,
        description: "Additive generator for the linear family a_t = rate t",
        topic: "flow equivalence",
        config: include_str!("../templates/equivalence-linear.json"),
    },
    Template {
        name: "pressure-full-shift",
        kind: Kind::Pressure,
        description: "Topological pressure of the zero potential on the full two-shift (log 2)",
        topic: "topological pressure",
        config: include_str!("../templates/pressure-full-shift.json"),
    },
    Template {
        name: "pressure-golden-mean",
        kind: Kind::Pressure,
        description: "Topological pressure of the zero potential on the golden-mean shift",
        topic: "topological pressure",
        config: include_str!("../templates/pressure-golden-mean.json"),
    },
    Template {
        name: "pressure-normalized-bernoulli",
        kind: Kind::Pressure,
        description: "Pressure of a normalized Bernoulli potential, which is zero",
        topic: "topological pressure",
        config: include_str!("../templates/pressure-normalized-bernoulli.json"),
    },
    Template {
        name: "pressure-sweep-golden",
        kind: Kind::Pressure,
        description: "Pressure, entropy and frequency of symbol 0 along t times an indicator",
        topic: "equilibrium states",
        config: include_str!("../templates/pressure-sweep-golden.json"),
    },
    Template {
        name: "spectrum-bernoulli",
        kind: Kind::Spectrum,
        description: "Level sets of the frequency of symbol 1, both dimension formulas",
        topic: "multifractal spectrum",
        config: include_str!("../templates/spectrum-bernoulli.json"),
    },
    Template {
        name: "spectrum-time-weighted",
        kind: Kind::Spectrum,
        description: "Frequency spectrum measured with the roof as dimension weight",
        topic: "multifractal spectrum",
        config: include_str!("../templates/spectrum-time-weighted.json"),
    },
    Template {
        name: "suspension-constant-roof",
        kind: Kind::Suspension,
        description: "Flow entropy under the constant roof 2 over the golden-mean shift",
        topic: "Abramov formula",
        config: include_str!("../templates/suspension-constant-roof.json"),
    },
    Template {
        name: "suspension-lifted-potential",
        kind: Kind::Suspension,
        description: "Flow pressure and equilibrium of a lifted indicator potential",
        topic: "flow pressure root",
        config: include_str!("../templates/suspension-lifted-potential.json"),
    },
    Template {
        name: "suspension-uneven-roof",
        kind: Kind::Suspension,
        description: "Flow entropy under the roof (1, 2) over the full shift",
        topic: "flow pressure root",
        config: include_str!("../templates/suspension-uneven-roof.json"),
    },
];

const DATA: &[(&str, &str)] = &[
    ("bernoulli-log.table", include_str!("../templates/data/bernoulli-log.table")),
    ("circle.trig", include_str!("../templates/data/circle.trig")),
    ("distortion.table", include_str!("../templates/data/distortion.table")),
    ("full2.sft", include_str!("../templates/data/full2.sft")),
    ("golden-indicator0.table", include_str!("../templates/data/golden-indicator0.table")),
    ("golden-roof2.flow", include_str!("../templates/data/golden-roof2.flow")),
    ("golden.sft", include_str!("../templates/data/golden.sft")),
    ("indicator1.table", include_str!("../templates/data/indicator1.table")),
    ("one.table", include_str!("../templates/data/one.table")),
    ("positive.cocycle", include_str!("../templates/data/positive.cocycle")),
    ("roof12-values.table", include_str!("../templates/data/roof12-values.table")),
    ("roof12.flow", include_str!("../templates/data/roof12.flow")),
    ("torus.trig", include_str!("../templates/data/torus.trig")),
    ("xi.table", include_str!("../templates/data/xi.table")),
];

pub fn template(name: &str) -> Option<&'static Template> {
    TEMPLATES.iter().find(|t| t.name == name)
}

/// Contents of a bundled data file.
pub fn data_file(name: &str) -> Option<&'static str> {
    DATA.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn data_files() -> impl Iterator<Item = (&'static str, &'static str)> {
    DATA.iter().copied()
}

/// Files written by each experiment kind.
pub fn output_schema(kind: Kind) -> &'static str {
    match kind {
        Kind::Pressure => "summary.json; pressure.csv (parameter,pressure,entropy,integral)",
        Kind::Suspension => "summary.json (flow pressure, roof mean, Abramov entropy, equilibrium integral)",
        Kind::Equivalence => "report.json; flow_defect.csv (t,flow_defect,crossing_defect); crossing_defect.csv (t,defect); discrete_defect.csv (n,defect,exact)",
        Kind::Spectrum => "spectrum.json; spectrum.csv (alpha,dim_formula2,dim_formula1,q_star,witness_params)",
        Kind::Embedding => "report.json (mode-specific: obstruction lists, residual tables, derivative samples)",
    }
}
