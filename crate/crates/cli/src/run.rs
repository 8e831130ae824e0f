//! Task execution. Tasks run in order; a failing task is recorded and
//! the rest still run, so one bad reference does not mask every other
//! result.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use indep_core::extension::{CylinderEvent, ExtensionMeasure, FactorMeasure};
use indep_core::independence::{
    check_logical_independence, check_logical_independence_bruteforce,
    check_probabilistic_independence, check_sigma_logical_independence, Violation, Witness,
};
use indep_core::limit::{
    kolmogorov_condition, lindeberg_sum, run_clt, run_lil, run_lln, CoordinateMeasure, Convergence,
    LindebergGate, Mode, RangeSpec, SequenceSpec, VarianceSequence,
};
use indep_core::measure::AtomMeasure;
use indep_core::signed::{check_independence_signed, check_uniform_independence, jordan_decompose, PartOutcome};
use indep_core::space::SigmaAlgebra;
use indep_core::{verify_finite_additivity, EventProbability, SignedMeasure};

use crate::problem::{
    parse_rational, CheckMode, Context, FactorRef, ProblemFile, ResolvedMeasure, RuleSpec,
    TaskSpec,
};

/// Everything a finished task reports.
pub struct TaskOutput {
    pub passed: bool,
    pub detail: Value,
    pub csv: Option<Csv>,
}

/// Raw series a simulation task can export.
pub enum Csv {
    /// `(step, statistic)` rows.
    Steps(Vec<(u64, f64)>),
    /// Sorted statistics with their empirical distribution values.
    Statistics(Vec<f64>),
}

pub struct TaskRun {
    pub index: usize,
    pub kind: &'static str,
    pub outcome: Result<TaskOutput, String>,
}

pub fn run_all(file: &ProblemFile, ctx: &Context) -> Vec<TaskRun> {
    file.tasks
        .iter()
        .enumerate()
        .map(|(index, task)| TaskRun {
            index,
            kind: task.kind(),
            outcome: run_task(task, ctx).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Fixed-width float rendering, so equal bits always print equal bytes.
fn fx(x: f64) -> Value {
    Value::String(format!("{x:.11e}"))
}

fn rat(r: &BigRational) -> Value {
    Value::String(r.to_string())
}

fn err(message: impl Into<String>) -> anyhow::Error {
    anyhow::anyhow!(message.into())
}

fn algebra_list(ctx: &Context, names: &[String]) -> anyhow::Result<Vec<SigmaAlgebra>> {
    names
        .iter()
        .map(|name| {
            ctx.algebras
                .get(name)
                .cloned()
                .ok_or_else(|| err(format!("unknown algebra \"{name}\"")))
        })
        .collect()
}

fn signed_measure(ctx: &Context, name: &str) -> anyhow::Result<SignedMeasure> {
    match ctx.measures.get(name) {
        Some(ResolvedMeasure::Atoms(m)) => Ok(m.clone()),
        Some(ResolvedMeasure::Factor(..)) => Err(err(format!(
            "measure \"{name}\" gives block weights; this task needs atom weights"
        ))),
        None => Err(err(format!("unknown measure \"{name}\""))),
    }
}

fn probability_measure(ctx: &Context, name: &str) -> anyhow::Result<AtomMeasure> {
    let signed = signed_measure(ctx, name)?;
    AtomMeasure::probability(signed.space().clone(), signed.weights().to_vec())
        .map_err(|e| err(format!("measure \"{name}\" is not a probability: {e}")))
}

fn factor_list(ctx: &Context, refs: &[FactorRef]) -> anyhow::Result<Vec<FactorMeasure>> {
    refs.iter()
        .map(|fr| match ctx.measures.get(&fr.measure) {
            Some(ResolvedMeasure::Factor(bound_to, factor)) => {
                if bound_to != &fr.algebra {
                    return Err(err(format!(
                        "measure \"{}\" weighs algebra \"{bound_to}\", not \"{}\"",
                        fr.measure, fr.algebra
                    )));
                }
                if !ctx.algebras.contains_key(&fr.algebra) {
                    return Err(err(format!("unknown algebra \"{}\"", fr.algebra)));
                }
                Ok(factor.clone())
            }
            Some(ResolvedMeasure::Atoms(..)) => Err(err(format!(
                "measure \"{}\" gives atom weights; factors need block weights",
                fr.measure
            ))),
            None => Err(err(format!("unknown measure \"{}\"", fr.measure))),
        })
        .collect()
}

fn identical_sequence(
    support: &[String],
    probs: &[String],
    n: u64,
    mode: Mode,
) -> anyhow::Result<SequenceSpec> {
    let support: Vec<BigRational> = support
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s, &format!("support[{i}]")))
        .collect::<Result<_, _>>()?;
    let probs: Vec<BigRational> = probs
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s, &format!("probs[{i}]")))
        .collect::<Result<_, _>>()?;
    let range = RangeSpec::new(support).map_err(|e| err(format!("support: {e}")))?;
    let measure = CoordinateMeasure::new(probs).map_err(|e| err(format!("probs: {e}")))?;
    let horizon = n.max(1);
    Ok(SequenceSpec::identical_for(range, measure, horizon, mode)?)
}

fn witness_json(witness: &Witness, names: &[String]) -> Value {
    let choice: Vec<Value> = witness
        .choice
        .iter()
        .map(|(i, member)| {
            json!({
                "algebra": names[*i],
                "atoms": member.atom_labels().collect::<Vec<_>>(),
            })
        })
        .collect();
    let violation = match &witness.violation {
        Violation::EmptyIntersection => json!("empty-intersection"),
        Violation::ProductRule { joint, product } => json!({
            "joint": rat(joint),
            "product": rat(product),
        }),
    };
    json!({ "choice": choice, "violation": violation })
}

fn part_outcome_json(outcome: &PartOutcome, names: &[String]) -> Value {
    match outcome {
        PartOutcome::ZeroMass => json!("zero-mass"),
        PartOutcome::Checked(v) => json!({
            "independent": v.independent,
            "witness": v.witness.as_ref().map(|w| witness_json(w, names)),
        }),
    }
}

fn cylinder_json(cylinder: &CylinderEvent, factor_names: &[String]) -> Value {
    match cylinder {
        CylinderEvent::Empty => json!("empty"),
        CylinderEvent::Cylinder(entries) => {
            let map: BTreeMap<String, Vec<String>> = entries
                .iter()
                .map(|(&i, member)| {
                    (
                        factor_names[i].clone(),
                        member.atom_labels().map(str::to_string).collect(),
                    )
                })
                .collect();
            json!(map)
        }
    }
}

fn run_task(task: &TaskSpec, ctx: &Context) -> anyhow::Result<TaskOutput> {
    match task {
        TaskSpec::CheckIndependence { algebras: names, mode, under } => {
            let algebras = algebra_list(ctx, names)?;
            let (verdict, mode_label) = match (under, mode) {
                (Some(_), Some(_)) => {
                    return Err(err("mode and under are mutually exclusive"))
                }
                (Some(measure_name), None) => {
                    let p = probability_measure(ctx, measure_name)?;
                    (
                        check_probabilistic_independence(&algebras, &p)?,
                        format!("under \"{measure_name}\""),
                    )
                }
                (None, mode) => {
                    let mode = mode.unwrap_or(CheckMode::Logical);
                    let verdict = match mode {
                        CheckMode::Logical => check_logical_independence(&algebras)?,
                        CheckMode::Sigma => check_sigma_logical_independence(&algebras)?,
                        CheckMode::BruteForce => {
                            check_logical_independence_bruteforce(&algebras)?
                        }
                    };
                    let label = match mode {
                        CheckMode::Logical => "logical",
                        CheckMode::Sigma => "sigma",
                        CheckMode::BruteForce => "brute-force",
                    };
                    (verdict, label.to_string())
                }
            };
            Ok(TaskOutput {
                passed: verdict.independent,
                detail: json!({
                    "mode": mode_label,
                    "algebras": names,
                    "independent": verdict.independent,
                    "witness": verdict.witness.as_ref().map(|w| witness_json(w, names)),
                }),
                csv: None,
            })
        }

        TaskSpec::Extend { factors } => {
            let factor_names: Vec<String> = factors.iter().map(|f| f.algebra.clone()).collect();
            let extension = ExtensionMeasure::extend(factor_list(ctx, factors)?)?;
            let cells: Vec<Value> = extension
                .join_algebra()
                .blocks()
                .iter()
                .zip(extension.cell_probs())
                .map(|(cell, p)| {
                    json!({
                        "atoms": cell.atom_labels().collect::<Vec<_>>(),
                        "prob": rat(p),
                    })
                })
                .collect();
            let marginals: Vec<Value> = extension
                .factors()
                .iter()
                .zip(&factor_names)
                .map(|(f, name)| {
                    json!({
                        "algebra": name,
                        "blocks": f.block_probs().iter().map(rat).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(TaskOutput {
                passed: true,
                detail: json!({
                    "cells": cells,
                    "factors": marginals,
                    "total": rat(&extension.total()),
                }),
                csv: None,
            })
        }

        TaskSpec::VerifyAdditivity { factors, parts } => {
            let factor_names: Vec<String> = factors.iter().map(|f| f.algebra.clone()).collect();
            let extension = ExtensionMeasure::extend(factor_list(ctx, factors)?)?;
            let space = extension.family().space().clone();
            let cylinders: Vec<CylinderEvent> = parts
                .iter()
                .enumerate()
                .map(|(pi, part)| {
                    let entries = part
                        .iter()
                        .map(|(name, labels)| {
                            let position = factor_names
                                .iter()
                                .position(|n| n == name)
                                .ok_or_else(|| {
                                    err(format!(
                                        "parts[{pi}]: algebra \"{name}\" is not among the factors"
                                    ))
                                })?;
                            let event = space
                                .event_from_labels(labels.iter().map(String::as_str))
                                .map_err(|e| err(format!("parts[{pi}].{name}: {e}")))?;
                            Ok((position, event))
                        })
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    Ok(CylinderEvent::of(entries))
                })
                .collect::<anyhow::Result<_>>()?;
            let report = verify_finite_additivity(&extension, &cylinders)?;
            Ok(TaskOutput {
                passed: report.holds,
                detail: json!({
                    "holds": report.holds,
                    "union": cylinder_json(&report.union_cylinder, &factor_names),
                    "union_prob": rat(&report.union_prob),
                    "parts_sum": rat(&report.parts_sum),
                    "chain_sum": rat(&report.chain_sum),
                    "chain_count": report.chain_count,
                    "chains_in_single_part": report.chains_in_single_part,
                }),
                csv: None,
            })
        }

        TaskSpec::Jordan { measure } => {
            let mu = signed_measure(ctx, measure)?;
            let pair = jordan_decompose(&mu);
            let space = mu.space();
            Ok(TaskOutput {
                passed: true,
                detail: json!({
                    "atoms": space.atom_labels().collect::<Vec<_>>(),
                    "positive": pair.positive.weights().iter().map(rat).collect::<Vec<_>>(),
                    "negative": pair.negative.weights().iter().map(rat).collect::<Vec<_>>(),
                    "hahn_positive_atoms": pair.hahn_positive_set.atom_labels().collect::<Vec<_>>(),
                    "total_variation": rat(&mu.total_variation()),
                }),
                csv: None,
            })
        }

        TaskSpec::SignedIndependence { algebras: names, measure } => {
            let algebras = algebra_list(ctx, names)?;
            let mu = signed_measure(ctx, measure)?;
            let verdict = check_independence_signed(&algebras, &mu)?;
            Ok(TaskOutput {
                passed: verdict.independent,
                detail: json!({
                    "independent": verdict.independent,
                    "positive": part_outcome_json(&verdict.positive, names),
                    "negative": part_outcome_json(&verdict.negative, names),
                }),
                csv: None,
            })
        }

        TaskSpec::UniformIndependence { algebras: names, measures } => {
            let algebras = algebra_list(ctx, names)?;
            let list: Vec<AtomMeasure> = measures
                .iter()
                .map(|name| probability_measure(ctx, name))
                .collect::<anyhow::Result<_>>()?;
            let report = check_uniform_independence(&algebras, &list)?;
            Ok(TaskOutput {
                passed: report.independent,
                detail: json!({
                    "independent": report.independent,
                    "verdicts": report.verdicts.iter().map(|v| v.independent).collect::<Vec<_>>(),
                    "failing": report.failing.as_ref().map(|(i, v)| json!({
                        "measure": measures[*i],
                        "witness": v.witness.as_ref().map(|w| witness_json(w, names)),
                    })),
                }),
                csv: None,
            })
        }

        TaskSpec::Lln { support, probs, n, seed } => {
            let spec = identical_sequence(support, probs, *n, Mode::Lln)?;
            let report = run_lln(&spec, *n, *seed)?;
            Ok(TaskOutput {
                passed: true,
                detail: json!({
                    "n": n,
                    "seed": seed,
                    "coord_mean": rat(&report.coord_mean),
                    "coord_variance": rat(&report.coord_variance),
                    "final_deviation": fx(report.final_statistic),
                    "checkpoints": report.trajectory.len(),
                }),
                csv: Some(Csv::Steps(report.trajectory)),
            })
        }

        TaskSpec::Clt { support, probs, n, replications, seed, epsilon, threshold } => {
            let gate = match (epsilon, threshold) {
                (None, None) => None,
                (Some(e), Some(t)) => Some(LindebergGate {
                    epsilon: parse_rational(e, "epsilon")?,
                    threshold: parse_rational(t, "threshold")?,
                }),
                _ => {
                    return Err(err(
                        "epsilon and threshold must be given together (the Lindeberg gate)",
                    ))
                }
            };
            let spec = identical_sequence(support, probs, *n, Mode::Clt)?;
            let report = run_clt(&spec, *n, *replications, *seed, gate.as_ref())?;
            let mut sorted = report.statistics.clone();
            sorted.sort_unstable_by(f64::total_cmp);
            Ok(TaskOutput {
                passed: true,
                detail: json!({
                    "n": n,
                    "replications": replications,
                    "seed": seed,
                    "ks_distance": fx(report.final_statistic),
                    "stat_mean": report.stat_mean.map(fx),
                    "stat_variance": report.stat_variance.map(fx),
                    "variance_sum": rat(&report.variance_sum),
                    "gated": gate.is_some(),
                }),
                csv: Some(Csv::Statistics(sorted)),
            })
        }

        TaskSpec::Lil { support, probs, n, seed } => {
            let spec = identical_sequence(support, probs, *n, Mode::Lil)?;
            let report = run_lil(&spec, *n, *seed)?;
            Ok(TaskOutput {
                passed: true,
                detail: json!({
                    "n": n,
                    "seed": seed,
                    "coord_variance": rat(&report.coord_variance),
                    "running_max": fx(report.final_statistic),
                    "checkpoints": report.trajectory.len(),
                }),
                csv: Some(Csv::Steps(report.trajectory)),
            })
        }

        TaskSpec::Lindeberg { support, probs, n, epsilon } => {
            let eps = parse_rational(epsilon, "epsilon")?;
            let spec = identical_sequence(support, probs, *n, Mode::Lln)?;
            let value = lindeberg_sum(&spec, *n, &eps)?;
            Ok(TaskOutput {
                passed: true,
                detail: json!({
                    "n": n,
                    "epsilon": rat(&eps),
                    "value": rat(&value),
                }),
                csv: None,
            })
        }

        TaskSpec::Kolmogorov { rule, prefix } => {
            let seq = match rule {
                RuleSpec::Constant { value } => {
                    let v = parse_rational(value, "rule.value")?;
                    if v < BigRational::zero() {
                        return Err(err("rule.value: variances cannot be negative"));
                    }
                    VarianceSequence::constant(v)
                }
                RuleSpec::Linear { slope } => {
                    let s = parse_rational(slope, "rule.slope")?;
                    if s < BigRational::zero() {
                        return Err(err("rule.slope: variances cannot be negative"));
                    }
                    VarianceSequence::linear(s)
                }
            };
            let report = kolmogorov_condition(&seq, *prefix);
            let verdict = match report.verdict {
                Convergence::Convergent => "convergent",
                Convergence::Divergent => "divergent",
                Convergence::Undecided => "undecided",
            };
            Ok(TaskOutput {
                // The task asks for a certificate; an undecided series or
                // a violated declaration is a failure to certify.
                passed: report.verdict != Convergence::Undecided && report.violation.is_none(),
                detail: json!({
                    "verdict": verdict,
                    "prefix_checked": report.prefix_checked,
                    "partial_sum": fx(report.partial_sum),
                    "violation": report.violation,
                }),
                csv: None,
            })
        }
    }
}
