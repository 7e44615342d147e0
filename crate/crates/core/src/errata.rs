//! Comparison of printed componentwise formulas with the ones generated from
//! quaternion multiplication.
//!
//! Every display in question is a sum of bilinear blocks in two families of
//! real components, e.g. `Σ c_{ij} a_i f_j`. The generated coefficients are the
//! components of products of basis elements under a [`Convention`]. Printed
//! and generated rows are compared on random assignments; when they differ,
//! the coefficient tables give the offending terms.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::quat::{Quaternion, StructuralSet};
use crate::report::{Erratum, VerificationReport};
use crate::sampling::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `v = Σ v_k e_k`
    Standard,
    /// `v = Σ v_k ψ_k`
    Psi,
}

/// How the real components in a display are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    /// Components of functions and coefficients (`f_k`, `g_k`, `K_k`, `A_k`).
    pub components: Basis,
    /// Components of perturbations (`q_k`, `δ_k`).
    pub perturbation: Basis,
    /// Which components of the generated product each row represents.
    pub output: Basis,
    /// Read the display as `ψD f = q f` instead of `ψD f + q f = 0`.
    pub negated_perturbation: bool,
}

impl Convention {
    /// All sixteen conventions, starting with standard components, ψ-coordinate
    /// perturbation, standard output and `ψD f + q f = 0`.
    pub fn all() -> Vec<Convention> {
        use Basis::*;
        let mut out = Vec::new();
        for negated_perturbation in [false, true] {
            for components in [Standard, Psi] {
                for perturbation in [Psi, Standard] {
                    for output in [Standard, Psi] {
                        out.push(Convention {
                            components,
                            perturbation,
                            output,
                            negated_perturbation,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn name(&self) -> String {
        let b = |b: Basis| match b {
            Basis::Standard => "standard",
            Basis::Psi => "psi",
        };
        format!(
            "components:{} perturbation:{}{} output:{}",
            b(self.components),
            if self.negated_perturbation { "-" } else { "" },
            b(self.perturbation),
            b(self.output)
        )
    }
}

/// Role of an index in a bilinear block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Component,
    Perturbation,
    /// Derivative direction `∂/∂x_k`, contributing `ψ_k`.
    Direction,
    /// Boundary form `dx̂_k`, contributing `-sgnψ (-1)^k ψ_k`.
    Form,
}

/// `Σ_{ij} coef · var(i, j)` where `var(i, j)` is named by `pattern` and the
/// generated coefficient is a component of `L(l) R(r)`.
#[derive(Clone, Debug)]
pub struct Block {
    /// Variable name with `{i}` and `{j}` placeholders.
    pub pattern: &'static str,
    /// Quaternion roles of the `(i, j)` indices.
    pub roles: (Role, Role),
    /// When set, the product is `R(j) L(i)` instead of `L(i) R(j)`.
    pub swap: bool,
    /// Conjugate the `i` factor.
    pub conj_first: bool,
    /// Sign of the whole block in the generated row.
    pub sign: f64,
}

impl Block {
    fn var(&self, i: usize, j: usize) -> String {
        self.pattern.replace("{i}", &i.to_string()).replace("{j}", &j.to_string())
    }
}

/// A printed four-row display.
#[derive(Clone, Debug)]
pub struct PrintedFormula {
    pub name: &'static str,
    pub blocks: Vec<Block>,
    /// `rows[r]` lists `(block, coef, i, j)`.
    pub rows: [Vec<(usize, f64, usize, usize)>; 4],
    /// Equations `row = 0` may match up to an overall sign.
    pub sign_free: bool,
}

type Table = Vec<[[f64; 4]; 4]>; // per block, [i][j]

fn basis_element(role: Role, k: usize, conv: &Convention, psi: &StructuralSet) -> Quaternion {
    let pick = |b: Basis| match b {
        Basis::Standard => Quaternion::basis(k),
        Basis::Psi => psi.get(k),
    };
    match role {
        Role::Component => pick(conv.components),
        Role::Perturbation => pick(conv.perturbation),
        Role::Direction => psi.get(k),
        Role::Form => {
            let parity = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            psi.get(k) * (-(psi.sign() as f64) * parity)
        }
    }
}

fn output_component(v: Quaternion, row: usize, conv: &Convention, psi: &StructuralSet) -> f64 {
    match conv.output {
        Basis::Standard => v.to_array()[row],
        Basis::Psi => psi.coords(v).0[row],
    }
}

impl PrintedFormula {
    fn printed_tables(&self) -> [Table; 4] {
        std::array::from_fn(|r| {
            let mut t = vec![[[0.0; 4]; 4]; self.blocks.len()];
            for &(b, c, i, j) in &self.rows[r] {
                t[b][i][j] += c;
            }
            t
        })
    }

    /// Generated coefficient tables under a convention.
    pub fn generated_tables(&self, conv: &Convention, psi: &StructuralSet) -> [Table; 4] {
        std::array::from_fn(|r| {
            self.blocks
                .iter()
                .map(|b| {
                    let mut t = [[0.0; 4]; 4];
                    for (i, row) in t.iter_mut().enumerate() {
                        for (j, cell) in row.iter_mut().enumerate() {
                            let mut l = basis_element(b.roles.0, i, conv, psi);
                            if b.conj_first {
                                l = l.conj();
                            }
                            let rr = basis_element(b.roles.1, j, conv, psi);
                            let p = if b.swap { rr * l } else { l * rr };
                            let flip = conv.negated_perturbation
                                && (b.roles.0 == Role::Perturbation || b.roles.1 == Role::Perturbation);
                            let sign = if flip { -b.sign } else { b.sign };
                            // + 0.0 normalizes -0.0
                            *cell = sign * output_component(p, r, conv, psi) + 0.0;
                        }
                    }
                    t
                })
                .collect()
        })
    }
}

fn evaluate(table: &Table, values: &[[[f64; 4]; 4]]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut mag = 0.0;
    for (t, v) in table.iter().zip(values) {
        for i in 0..4 {
            for j in 0..4 {
                sum += t[i][j] * v[i][j];
                mag += (t[i][j] * v[i][j]).abs();
            }
        }
    }
    (sum, mag)
}

/// Result of comparing one row under one convention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowOutcome {
    pub row: usize,
    pub matches: bool,
    /// Overall sign applied to the generated row (`±1`).
    pub sign: f64,
    /// Terms whose coefficients differ, as `var: printed p, generated g`.
    pub differences: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaOutcome {
    pub formula: String,
    pub convention: Convention,
    pub rows: Vec<RowOutcome>,
    /// Number of conventions under which every row matches.
    pub matching_conventions: usize,
}

impl FormulaOutcome {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.matches).count()
    }

    pub fn errata(&self) -> Vec<Erratum> {
        self.rows
            .iter()
            .filter(|r| !r.matches)
            .map(|r| Erratum {
                formula: self.formula.clone(),
                item: format!("row {}", r.row),
                convention: self.convention.name(),
                detail: r.differences.join("; "),
            })
            .collect()
    }
}

fn compare_rows(
    f: &PrintedFormula,
    conv: &Convention,
    psi: &StructuralSet,
    samples: &[Vec<[[f64; 4]; 4]>],
) -> Vec<RowOutcome> {
    let printed = f.printed_tables();
    let generated = f.generated_tables(conv, psi);
    let signs: &[f64] = if f.sign_free { &[1.0, -1.0] } else { &[1.0] };
    (0..4)
        .map(|r| {
            let mut best: Option<RowOutcome> = None;
            for &s in signs {
                let matches = samples.iter().all(|v| {
                    let (p, pm) = evaluate(&printed[r], v);
                    let (g, gm) = evaluate(&generated[r], v);
                    (p - s * g).abs() <= 1e-12 * (1.0 + pm + gm)
                });
                let mut differences = Vec::new();
                for (b, block) in f.blocks.iter().enumerate() {
                    for i in 0..4 {
                        for j in 0..4 {
                            let (p, g) = (printed[r][b][i][j] + 0.0, s * generated[r][b][i][j] + 0.0);
                            if (p - g).abs() > 1e-12 {
                                differences.push(format!("{}: printed {p:+}, generated {g:+}", block.var(i, j)));
                            }
                        }
                    }
                }
                let cand = RowOutcome {
                    row: r,
                    matches,
                    sign: s,
                    differences,
                };
                if best.as_ref().is_none_or(|b| cand.differences.len() < b.differences.len()) {
                    best = Some(cand);
                }
            }
            best.unwrap()
        })
        .collect()
}

/// Compares a printed display under every convention and keeps the one with
/// the fewest differing terms (earliest on ties).
pub fn compare(f: &PrintedFormula, psi: &StructuralSet, sampler: &mut Sampler, samples: usize) -> FormulaOutcome {
    let values: Vec<Vec<[[f64; 4]; 4]>> = (0..samples)
        .map(|_| {
            f.blocks
                .iter()
                .map(|_| std::array::from_fn(|_| std::array::from_fn(|_| sampler.uniform(-1.0, 1.0))))
                .collect()
        })
        .collect();
    let mut best: Option<(usize, FormulaOutcome)> = None;
    let mut matching = 0;
    for conv in Convention::all() {
        let rows = compare_rows(f, &conv, psi, &values);
        let cost: usize = rows.iter().map(|r| r.differences.len()).sum();
        if rows.iter().all(|r| r.matches) {
            matching += 1;
        }
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((
                cost,
                FormulaOutcome {
                    formula: f.name.to_string(),
                    convention: conv,
                    rows,
                    matching_conventions: 0,
                },
            ));
        }
    }
    let mut out = best.unwrap().1;
    out.matching_conventions = matching;
    out
}

const DERIV: Block = Block {
    pattern: "df{i}/dx{j}",
    roles: (Role::Component, Role::Direction),
    swap: true,
    conj_first: false,
    sign: 1.0,
};

fn perturbation_block(pattern: &'static str) -> Block {
    Block {
        pattern,
        roles: (Role::Perturbation, Role::Component),
        swap: false,
        conj_first: false,
        sign: 1.0,
    }
}

fn product_block(pattern: &'static str, roles: (Role, Role)) -> Block {
    Block {
        pattern,
        roles,
        swap: false,
        conj_first: false,
        sign: 1.0,
    }
}

/// `(coef, i, j)` lists for a single-block display.
fn rows1(rows: [&[(f64, usize, usize)]; 4]) -> [Vec<(usize, f64, usize, usize)>; 4] {
    rows.map(|r| r.iter().map(|&(c, i, j)| (0, c, i, j)).collect())
}

/// Derivative terms `(coef, f index, x index)` and right-hand side
/// `(coef, perturbation index, f index)` of `LHS = RHS`, stored as `LHS - RHS`.
fn system_rows(
    lhs: [&[(f64, usize, usize)]; 4],
    rhs: [&[(f64, usize, usize)]; 4],
) -> [Vec<(usize, f64, usize, usize)>; 4] {
    std::array::from_fn(|r| {
        lhs[r]
            .iter()
            .map(|&(c, i, j)| (0, c, i, j))
            .chain(rhs[r].iter().map(|&(c, i, j)| (1, -c, i, j)))
            .collect()
    })
}

const SYSTEM_LHS: [&[(f64, usize, usize)]; 4] = [
    &[(1.0, 0, 0), (1.0, 2, 2), (-1.0, 1, 1), (-1.0, 3, 3)],
    &[(1.0, 0, 1), (1.0, 1, 0), (-1.0, 2, 3), (1.0, 3, 2)],
    &[(1.0, 0, 2), (1.0, 3, 1), (-1.0, 1, 3), (-1.0, 2, 0)],
    &[(1.0, 0, 3), (1.0, 1, 2), (1.0, 2, 1), (1.0, 3, 0)],
];

/// The inhomogeneous Cimmino system as printed.
pub fn cimmino_system() -> PrintedFormula {
    PrintedFormula {
        name: "cimmino_system",
        blocks: vec![DERIV, perturbation_block("q{i}f{j}")],
        rows: system_rows(
            SYSTEM_LHS,
            [
                &[(1.0, 0, 0), (1.0, 2, 2), (-1.0, 1, 1), (-1.0, 3, 3)],
                &[(1.0, 1, 0), (1.0, 0, 1), (-1.0, 3, 2), (1.0, 2, 3)],
                &[(1.0, 2, 0), (1.0, 1, 3), (-1.0, 3, 1), (-1.0, 0, 3)],
                &[(1.0, 3, 0), (1.0, 2, 1), (1.0, 1, 2), (1.0, 0, 3)],
            ],
        ),
        sign_free: true,
    }
}

/// The system with variable perturbation `δ_{T,r}` as printed.
pub fn delta_cimmino_system() -> PrintedFormula {
    PrintedFormula {
        name: "delta_cimmino_system",
        blocks: vec![DERIV, perturbation_block("delta{i}f{j}")],
        rows: system_rows(
            SYSTEM_LHS,
            [
                &[(1.0, 0, 0), (1.0, 2, 2), (-1.0, 1, 1), (-1.0, 3, 3)],
                &[(1.0, 1, 0), (1.0, 0, 1), (-1.0, 3, 2), (1.0, 2, 3)],
                &[(1.0, 2, 0), (1.0, 1, 3), (-1.0, 3, 1), (-1.0, 0, 2)],
                &[(1.0, 3, 0), (1.0, 2, 1), (1.0, 1, 2), (1.0, 0, 3)],
            ],
        ),
        sign_free: true,
    }
}

/// Real components of `∫ ν_q f = 0` as printed (`s_i` stands for `dx̂_i`).
pub fn integral_theorem_components() -> PrintedFormula {
    PrintedFormula {
        name: "integral_theorem_components",
        blocks: vec![product_block("s{i}f{j}", (Role::Form, Role::Component))],
        rows: rows1([
            &[(1.0, 0, 0), (1.0, 1, 1), (1.0, 2, 2), (1.0, 3, 3)],
            &[(-1.0, 1, 0), (1.0, 0, 1), (1.0, 3, 2), (-1.0, 2, 3)],
            &[(-1.0, 2, 0), (1.0, 1, 3), (1.0, 3, 1), (1.0, 0, 2)],
            &[(-1.0, 3, 0), (1.0, 2, 1), (-1.0, 1, 2), (1.0, 0, 3)],
        ]),
        sign_free: true,
    }
}

/// The table `K^q_{σ,k}` of kernel-times-surface-form components.
pub fn kernel_form_table() -> PrintedFormula {
    PrintedFormula {
        name: "kernel_form_table",
        blocks: vec![product_block("k{i}s{j}", (Role::Component, Role::Form))],
        rows: rows1([
            &[(1.0, 0, 0), (1.0, 1, 1), (1.0, 2, 2), (1.0, 3, 3)],
            &[(-1.0, 0, 1), (1.0, 1, 0), (-1.0, 2, 3), (1.0, 3, 2)],
            &[(-1.0, 0, 2), (1.0, 1, 3), (1.0, 2, 0), (-1.0, 3, 1)],
            &[(-1.0, 0, 3), (-1.0, 1, 2), (1.0, 2, 1), (1.0, 3, 0)],
        ]),
        sign_free: false,
    }
}

/// Integrands of the componentwise reconstruction formula (`c_i` stands for
/// `K^q_{σ,i}`).
pub fn reconstruction_components() -> PrintedFormula {
    PrintedFormula {
        name: "reconstruction_components",
        blocks: vec![product_block("c{i}f{j}", (Role::Component, Role::Component))],
        rows: rows1([
            &[(1.0, 0, 0), (-1.0, 1, 1), (-1.0, 2, 2), (-1.0, 3, 3)],
            &[(1.0, 0, 1), (1.0, 1, 0), (1.0, 2, 3), (-1.0, 3, 2)],
            &[(1.0, 0, 2), (-1.0, 1, 3), (1.0, 2, 0), (1.0, 3, 1)],
            &[(1.0, 0, 3), (1.0, 1, 2), (-1.0, 2, 1), (1.0, 3, 0)],
        ]),
        sign_free: false,
    }
}

/// Components of the pulled-back four-tuple `g = A_T f` (exponential factor
/// dropped).
pub fn pullback_components() -> PrintedFormula {
    PrintedFormula {
        name: "pullback_components",
        blocks: vec![product_block("a{i}f{j}", (Role::Component, Role::Component))],
        rows: rows1([
            &[(1.0, 0, 0), (-1.0, 1, 1), (-1.0, 2, 2), (-1.0, 3, 3)],
            &[(1.0, 1, 0), (1.0, 0, 1), (-1.0, 3, 2), (1.0, 2, 3)],
            &[(1.0, 2, 0), (-1.0, 1, 3), (1.0, 3, 1), (1.0, 0, 2)],
            &[(1.0, 3, 0), (-1.0, 2, 1), (1.0, 1, 2), (1.0, 0, 3)],
        ]),
        sign_free: false,
    }
}

/// The `R^4`-valued bilinear form of the componentwise Bergman spaces.
pub fn cb_form_components() -> PrintedFormula {
    PrintedFormula {
        name: "cb_form_components",
        blocks: vec![Block {
            pattern: "f{i}g{j}",
            roles: (Role::Component, Role::Component),
            swap: false,
            conj_first: true,
            sign: 1.0,
        }],
        rows: rows1([
            &[(1.0, 0, 0), (1.0, 1, 1), (1.0, 2, 2), (1.0, 3, 3)],
            &[(1.0, 0, 1), (-1.0, 1, 0), (1.0, 2, 3), (-1.0, 3, 2)],
            &[(1.0, 0, 2), (1.0, 3, 1), (-1.0, 1, 3), (-1.0, 2, 0)],
            &[(1.0, 0, 3), (-1.0, 1, 2), (1.0, 2, 1), (-1.0, 3, 0)],
        ]),
        sign_free: false,
    }
}

pub fn printed_formulas() -> Vec<PrintedFormula> {
    vec![
        cimmino_system(),
        delta_cimmino_system(),
        integral_theorem_components(),
        kernel_form_table(),
        reconstruction_components(),
        pullback_components(),
        cb_form_components(),
    ]
}

/// Runs every comparison. The report always passes; mismatches are listed in
/// `errata` and the chosen convention per display in `params`.
pub fn errata_report(psi: &StructuralSet, seed: u64, samples: usize) -> (VerificationReport, Vec<FormulaOutcome>) {
    let start = Instant::now();
    let mut sampler = Sampler::new(seed);
    let outcomes: Vec<FormulaOutcome> = printed_formulas()
        .iter()
        .map(|f| compare(f, psi, &mut sampler, samples))
        .collect();
    let mut rep = VerificationReport::new("errata", 0.0);
    rep.param("seed", seed).param("samples", samples).param("psi", psi);
    for o in &outcomes {
        rep.param(
            &o.formula,
            serde_json::json!({
                "convention": o.convention.name(),
                "mismatched_rows": o.mismatches(),
                "matching_conventions": o.matching_conventions,
                "row_signs": o.rows.iter().map(|r| r.sign).collect::<Vec<_>>(),
            }),
        );
        for e in o.errata() {
            rep.erratum(e);
        }
    }
    rep.residual("completed", 0.0);
    (rep.timed(start), outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(f: PrintedFormula) -> FormulaOutcome {
        compare(&f, &StructuralSet::cimmino(), &mut Sampler::new(1), 8)
    }

    #[test]
    fn kernel_and_reconstruction_tables_match() {
        for f in [kernel_form_table(), reconstruction_components(), pullback_components()] {
            let o = outcome(f);
            assert_eq!(o.mismatches(), 0, "{o:?}");
            assert_eq!(o.convention, Convention::all()[0]);
        }
    }

    #[test]
    fn generated_row_reassembles_product() {
        // Row 1 of K σ under the first convention: -k0 s1 + k1 s0 - k2 s3 + k3 s2.
        let t = kernel_form_table().generated_tables(&Convention::all()[0], &StructuralSet::cimmino());
        assert_eq!(t[1][0][0][1], -1.0);
        assert_eq!(t[1][0][2][3], -1.0);
        assert_eq!(t[1][0][3][2], 1.0);
    }

    #[test]
    fn system_perturbation_sign() {
        let o = outcome(cimmino_system());
        assert!(o.mismatches() > 0);
        let row0 = &o.rows[0];
        assert!(row0.differences.iter().all(|d| d.starts_with('q')), "{:?}", row0.differences);
    }

    #[test]
    fn report_always_passes() {
        let (rep, outcomes) = errata_report(&StructuralSet::cimmino(), 7, 4);
        assert!(rep.pass);
        assert_eq!(outcomes.len(), 7);
        assert!(!rep.errata.is_empty());
    }
}
