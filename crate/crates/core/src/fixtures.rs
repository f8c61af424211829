//! Named rule shapes used by the tests, the benchmarks and `flowjoin gen`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::database::Atom;
use crate::ddr::{Cq, Ddr};
use crate::degree::{DegreeConstraints, MonTerm};
use crate::shannon::{IntegralInequality, Multiset, ProofStep, SubTerm, Witness};
use crate::vars::{VarNames, VarSet};

/// Builds a rule from `(name, vars)` pairs, where `vars` is a space-separated
/// list of variable names.
pub fn rule(heads: &[(&str, &str)], body: &[(&str, &str)]) -> Ddr {
    let mut names = VarNames::new();
    let mut atoms = |spec: &[(&str, &str)]| -> Vec<Atom> {
        spec.iter()
            .map(|(n, vs)| {
                let cols = vs.split_whitespace().map(|v| names.intern(v).unwrap()).collect();
                Atom::new(*n, cols).unwrap()
            })
            .collect()
    };
    // Intern body variables first so variable ids follow body order.
    let body = atoms(body);
    let heads = atoms(heads);
    Ddr::new(names, heads, body).expect("fixture rules are valid")
}

/// `U(ABC) ∨ V(BCD) :- R(AB), S(BC), T(CD)`.
pub fn two_targets_path() -> Ddr {
    rule(
        &[("U", "A B C"), ("V", "B C D")],
        &[("R", "A B"), ("S", "B C"), ("T", "C D")],
    )
}

/// `Q(ABCDEF) :- R(ABC), S(CDE), T(EFA), K(BDF)`.
pub fn hexagon() -> Ddr {
    rule(
        &[("Q", "A B C D E F")],
        &[("R", "A B C"), ("S", "C D E"), ("T", "E F A"), ("K", "B D F")],
    )
}

/// Three heads over three two-edge chains, each head reaching into the next
/// chain.
pub fn three_chains() -> Ddr {
    rule(
        &[("U", "A0 A1 A2 B1"), ("V", "B0 B1 B2 C1"), ("W", "C0 C1 C2 A1")],
        &[
            ("R1", "A0 A1"),
            ("R2", "A1 A2"),
            ("S1", "B0 B1"),
            ("S2", "B1 B2"),
            ("T1", "C0 C1"),
            ("T2", "C1 C2"),
        ],
    )
}

/// Cyclic triples over six variables with four overlapping heads.
pub fn cyclic_triples() -> Ddr {
    rule(
        &[
            ("U", "A1 A2 A3 A4 A5"),
            ("V", "A3 A4 A5 A6 A1"),
            ("W", "A5 A6 A1 A2 A3"),
            ("Z", "A2 A4 A6"),
        ],
        &[
            ("R1", "A1 A2 A3"),
            ("R2", "A2 A3 A4"),
            ("R3", "A3 A4 A5"),
            ("R4", "A4 A5 A6"),
            ("R5", "A5 A6 A1"),
            ("R6", "A6 A1 A2"),
        ],
    )
}

/// Two disjoint 4-cycles with five heads mixing them.
pub fn twin_four_cycles() -> Ddr {
    rule(
        &[
            ("U", "A1 A2 A3 A4"),
            ("V", "B1 B2 B3 B4"),
            ("W", "A1 A3 B1 B3"),
            ("Z1", "A2 B2"),
            ("Z2", "A4 B4"),
        ],
        &[
            ("R1", "A1 A2"),
            ("R2", "A2 A3"),
            ("R3", "A3 A4"),
            ("R4", "A4 A1"),
            ("S1", "B1 B2"),
            ("S2", "B2 B3"),
            ("S3", "B3 B4"),
            ("S4", "B4 B1"),
        ],
    )
}

/// `Q(ABCD) :- R(AB), S(BC), T(CD), K(DA)`.
pub fn four_cycle() -> Cq {
    let d = rule(
        &[("Q", "A B C D")],
        &[("R", "A B"), ("S", "B C"), ("T", "C D"), ("K", "D A")],
    );
    Cq::new(d.names, d.heads.into_iter().next().unwrap(), d.body).unwrap()
}

/// The hexagon rule as a full conjunctive query.
pub fn hexagon_cq() -> Cq {
    let d = hexagon();
    Cq::new(d.names, d.heads.into_iter().next().unwrap(), d.body).unwrap()
}

/// The hexagon inequality `2h(ABCDEF) ≤ h(ABC) + h(CDE) + h(AEF) + h(BDF)`
/// with its four-term witness and a ten-step proof that first builds
/// `ABCDE` and `ABDEF`, then extends each to the full set.
pub fn hexagon_proof() -> (Ddr, IntegralInequality, Witness, Vec<ProofStep>) {
    let ddr = hexagon();
    let s = |t: &str| ddr.names.parse_set(t).unwrap();
    let e = VarSet::EMPTY;
    let mut z = Multiset::new();
    z.add(s("ABCDEF"), 2);
    let d: Multiset<MonTerm> = ["ABC", "CDE", "AEF", "BDF"]
        .into_iter()
        .map(|t| MonTerm::unconditional(s(t)))
        .collect();
    let w = Witness {
        m: Multiset::new(),
        s: [
            SubTerm::new(s("DE"), s("AB"), s("C")),
            SubTerm::new(s("BD"), s("AE"), s("F")),
            SubTerm::new(s("ABCDE"), s("F"), e),
            SubTerm::new(s("ABDEF"), s("C"), e),
        ]
        .into_iter()
        .collect(),
    };
    let steps = alloc::vec![
        ProofStep::Decomposition { x: s("C"), y: s("DE") },
        ProofStep::Submodularity { y: s("DE"), x: s("C"), z: s("AB") },
        ProofStep::Composition { x: s("ABC"), y: s("DE") },
        ProofStep::Decomposition { x: s("F"), y: s("BD") },
        ProofStep::Submodularity { y: s("BD"), x: s("F"), z: s("AE") },
        ProofStep::Composition { x: s("AEF"), y: s("BD") },
        ProofStep::Submodularity { y: s("ABCDE"), x: e, z: s("F") },
        ProofStep::Composition { x: s("F"), y: s("ABCDE") },
        ProofStep::Submodularity { y: s("ABDEF"), x: e, z: s("C") },
        ProofStep::Composition { x: s("C"), y: s("ABDEF") },
    ];
    (ddr, IntegralInequality { z, d }, w, steps)
}

/// Every named rule with its exponent under `|body atom| ≤ N`.
pub fn catalog() -> Vec<(&'static str, Ddr, (i64, i64))> {
    alloc::vec![
        ("two-targets-path", two_targets_path(), (3, 2)),
        ("hexagon", hexagon(), (2, 1)),
        ("three-chains", three_chains(), (2, 1)),
        ("cyclic-triples", cyclic_triples(), (3, 2)),
        ("twin-four-cycles", twin_four_cycles(), (8, 5)),
    ]
}

/// Looks a rule up by its catalog name.
pub fn by_name(name: &str) -> Option<Ddr> {
    catalog().into_iter().find(|(n, _, _)| *n == name).map(|(_, d, _)| d)
}

/// `|R| ≤ n` for every body atom.
pub fn body_cardinalities(ddr: &Ddr, n: u64) -> DegreeConstraints {
    ddr.body.iter().map(|a| (MonTerm::unconditional(a.vars()), n)).collect()
}

pub fn names() -> Vec<String> {
    catalog().into_iter().map(|(n, _, _)| String::from(n)).collect()
}
