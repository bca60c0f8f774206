// SPDX-License-Identifier: Apache-2.0

//! Writing reports: `report.json` always, plus one CSV per data family and
//! `spectrum.json` in the CSV bundle.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ergodic_core::entropy::nats_to_bits;
use ergodic_core::koopman::GroupComparison;
use ergodic_core::tower::Block;
use serde::Serialize;

use crate::config::Format;
use crate::report::{EntropyMethod, ExperimentReport, Step};

/// One CSV file in memory: header and rows of already formatted fields.
#[derive(Debug)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&str]) -> Self {
        Self {
            name,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// RFC 4180: comma-separated, CRLF line ends, quoted only when needed.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn block_name(b: Block) -> String {
    match b {
        Block::Constant => "constant".into(),
        Block::Chain { length } => format!("chain(length={length})"),
        Block::Row { m } => format!("row(m={m})"),
    }
}

fn method_name(m: EntropyMethod) -> &'static str {
    match m {
        EntropyMethod::Exact => "exact",
        EntropyMethod::MonteCarlo => "monte-carlo",
        EntropyMethod::PlugIn => "plug-in",
    }
}

fn verdict_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

/// The CSV families present in `report`, each stamped with the seed.
pub fn tables(report: &ExperimentReport, bits: bool) -> Vec<Table> {
    let seed = report.seed.to_string();
    let mut tower = Table::new(
        "tower.csv",
        &[
            "system",
            "depth",
            "characters",
            "with_constants",
            "same_as_next",
            "seed",
        ],
    );
    let mut residuals = Table::new(
        "residuals.csv",
        &[
            "system",
            "k",
            "truncation",
            "band",
            "grid",
            "residual",
            "delta_turns",
            "best_block",
            "floor",
            "half_floor",
            "exists",
            "seed",
        ],
    );
    let mut entropy_header = vec![
        "system",
        "partition",
        "n",
        "samples",
        "estimate_nats",
        "stderr",
        "exact",
        "method",
    ];
    if bits {
        entropy_header.push("estimate_bits");
    }
    entropy_header.extend(["note", "seed"]);
    let mut entropy = Table::new("entropy.csv", &entropy_header);
    let mut classification = Table::new(
        "classification.csv",
        &[
            "a",
            "b",
            "entropy_a",
            "entropy_b",
            "spacial",
            "spectrally_isomorphic",
            "seed",
        ],
    );
    let mut intertwiner = Table::new(
        "intertwiner.csv",
        &[
            "source",
            "target",
            "truncation",
            "point_multiplier",
            "entries",
            "checked",
            "boundary",
            "mismatches",
            "max_phase_residual",
            "exact",
            "seed",
        ],
    );
    let mut groups = Table::new(
        "groups.csv",
        &["a", "b", "verdict", "forward", "backward", "bound", "seed"],
    );
    let mut conjugacy = Table::new(
        "conjugacy.csv",
        &["a", "b", "sign", "samples", "residual", "threshold", "seed"],
    );
    let mut correlation = Table::new(
        "correlation.csv",
        &["system", "A", "B", "i", "value", "stderr", "mode", "seed"],
    );
    let mut mixing = Table::new(
        "mixing.csv",
        &[
            "system",
            "A",
            "B",
            "t",
            "value",
            "stderr",
            "mode",
            "verdict",
            "spectral_weak_mixing",
            "seed",
        ],
    );
    let mut birkhoff = Table::new(
        "birkhoff.csv",
        &["system", "observable", "n", "value", "seed"],
    );

    for step in &report.steps {
        match step {
            Step::Spectrum { .. } | Step::TowerComparison { .. } => {}
            Step::Tower { system, tower: t } => {
                for (j, level) in t.levels.iter().enumerate() {
                    let chars = level
                        .characters
                        .generators()
                        .iter()
                        .map(|[k, m]| format!("({k},{m})"))
                        .collect::<Vec<_>>()
                        .join(" ");
                    let next = t.levels.get(j + 1).map(|n| level.same_set(n));
                    tower.rows.push(vec![
                        system.clone(),
                        level.depth.to_string(),
                        chars,
                        level.with_constants.to_string(),
                        opt(next),
                        seed.clone(),
                    ]);
                }
            }
            Step::Residual {
                system,
                floor,
                exists,
                report: r,
            } => residuals.rows.push(vec![
                system.clone(),
                r.k.to_string(),
                r.truncation.to_string(),
                r.band.to_string(),
                r.grid.to_string(),
                r.residual.to_string(),
                r.delta_turns.to_string(),
                block_name(r.best_block),
                opt(*floor),
                opt(floor.map(|f| f / 2.0)),
                opt(*exists),
                seed.clone(),
            ]),
            Step::Entropy {
                system,
                partition,
                method,
                estimate,
                note,
                ..
            } => {
                let mut row = vec![
                    system.clone(),
                    partition.clone(),
                    opt(estimate.as_ref().map(|e| e.block_length)),
                    opt(estimate.as_ref().map(|e| e.samples)),
                    opt(estimate.as_ref().map(|e| e.value)),
                    opt(estimate.as_ref().map(|e| e.stderr)),
                    opt(estimate.as_ref().map(|e| e.exact)),
                    method_name(*method).into(),
                ];
                if bits {
                    row.push(opt(estimate.as_ref().map(|e| nats_to_bits(e.value))));
                }
                row.push(note.clone().unwrap_or_default());
                row.push(seed.clone());
                entropy.rows.push(row);
            }
            Step::Classification {
                a,
                b,
                classification: c,
            } => classification.rows.push(vec![
                a.clone(),
                b.clone(),
                c.entropy_a.to_string(),
                c.entropy_b.to_string(),
                verdict_name(&c.spacial),
                c.spectrally_isomorphic.to_string(),
                seed.clone(),
            ]),
            Step::Intertwiner {
                source,
                target,
                truncation,
                point_multiplier,
                entries,
                verification: v,
            } => intertwiner.rows.push(vec![
                source.clone(),
                target.clone(),
                truncation.to_string(),
                point_multiplier.to_string(),
                entries.to_string(),
                v.checked.to_string(),
                v.boundary.to_string(),
                v.mismatches.to_string(),
                v.max_phase_residual.to_string(),
                v.exact.to_string(),
                seed.clone(),
            ]),
            Step::Groups { a, b, comparison } => {
                let (verdict, forward, backward, bound) = match comparison {
                    GroupComparison::Equal { forward, backward } => {
                        ("equal", Some(*forward), Some(*backward), None)
                    }
                    GroupComparison::NotEqualWithinBound { bound } => {
                        ("not-equal-within-bound", None, None, Some(*bound))
                    }
                };
                groups.rows.push(vec![
                    a.clone(),
                    b.clone(),
                    verdict.into(),
                    opt(forward),
                    opt(backward),
                    opt(bound),
                    seed.clone(),
                ]);
            }
            Step::Conjugacy {
                a,
                b,
                sign,
                samples,
                residual,
                threshold,
            } => conjugacy.rows.push(vec![
                a.clone(),
                b.clone(),
                sign.to_string(),
                samples.to_string(),
                residual.to_string(),
                threshold.to_string(),
                seed.clone(),
            ]),
            Step::Correlation {
                system,
                a,
                b,
                mode,
                point,
            } => correlation.rows.push(vec![
                system.clone(),
                a.label(),
                b.label(),
                point.i.to_string(),
                point.value.to_string(),
                point.stderr.to_string(),
                mode.name().into(),
                seed.clone(),
            ]),
            Step::Mixing {
                system,
                a,
                b,
                mode,
                statistic,
                verdict,
                spectral_weak_mixing,
            } => mixing.rows.push(vec![
                system.clone(),
                a.label(),
                b.label(),
                statistic.t.to_string(),
                statistic.value.to_string(),
                statistic.stderr.to_string(),
                mode.name().into(),
                verdict_name(verdict),
                spectral_weak_mixing.to_string(),
                seed.clone(),
            ]),
            Step::Birkhoff {
                system,
                observable,
                n,
                value,
            } => birkhoff.rows.push(vec![
                system.clone(),
                serde_json::to_string(observable).unwrap_or_default(),
                n.to_string(),
                value.to_string(),
                seed.clone(),
            ]),
        }
    }

    // letter reports always carry both tower and residual tables, even if
    // a system contributes no rows to one of them
    let letter = report.scenario == "letter";
    [
        tower,
        residuals,
        entropy,
        classification,
        intertwiner,
        groups,
        conjugacy,
        correlation,
        mixing,
        birkhoff,
    ]
    .into_iter()
    .filter(|t| !t.rows.is_empty() || (letter && matches!(t.name, "tower.csv" | "residuals.csv")))
    .collect()
}

#[derive(Serialize)]
struct SpectrumFile<'a> {
    seed: u64,
    spectra: Vec<SpectrumEntry<'a>>,
}

#[derive(Serialize)]
struct SpectrumEntry<'a> {
    system: &'a str,
    descriptor: &'a ergodic_core::koopman::SpectrumDescriptor,
}

fn spectrum_json(report: &ExperimentReport) -> Result<Option<String>> {
    let spectra: Vec<_> = report
        .steps
        .iter()
        .filter_map(|s| match s {
            Step::Spectrum { system, descriptor } => Some(SpectrumEntry { system, descriptor }),
            _ => None,
        })
        .collect();
    if spectra.is_empty() {
        return Ok(None);
    }
    let mut text = serde_json::to_string_pretty(&SpectrumFile {
        seed: report.seed,
        spectra,
    })?;
    text.push('\n');
    Ok(Some(text))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    if dir.exists() && !dir.is_dir() {
        bail!(
            "output path {} exists and is not a directory",
            dir.display()
        );
    }
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes the report into `dir` and returns the written paths in order.
pub fn emit_report(
    report: &ExperimentReport,
    format: Format,
    bits: bool,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    prepare_dir(dir)?;
    let mut written = vec![write(dir, "report.json", report.to_json()?.as_bytes())?];
    if format == Format::Csv {
        if let Some(text) = spectrum_json(report)? {
            written.push(write(dir, "spectrum.json", text.as_bytes())?);
        }
        for table in tables(report, bits) {
            written.push(write(dir, table.name, &table.to_csv()?)?);
        }
    }
    Ok(written)
}
