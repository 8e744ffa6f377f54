//! Named experiment registry and executors.
//!
//! Every experiment resolves its configuration (defaults plus CLI
//! overrides), generates its ensembles through the reproducible runner, and
//! returns one CSV table, one structured summary, and a manifest that pins
//! the run well enough to reproduce the CSV byte for byte.

use serde_json::{json, Map, Value};

use dephase_core::interaction::{final_entropy, InteractionSpec};
use dephase_core::measures::entanglement_entropy;
use dephase_core::sampling::{default_energy_delta, EnsembleKind, EnsembleSpec};
use dephase_core::statevec::PureState;
use dephase_core::stats::{max_angle_bound, summarize, BinConfig, RunSummary};
use dephase_core::{Error, Result};
use num_complex::Complex64;

use crate::output::format_float;
use crate::runner::{default_sigma_z, run_ensemble, EnsembleRun, LabeledInteraction, RunConfig};

/// CLI-level overrides applied on top of each experiment's defaults.
#[derive(Debug, Clone)]
pub struct Overrides {
    pub qubits: Option<usize>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub workers: usize,
    pub interacting: Option<usize>,
    pub ensemble: Option<String>,
    pub interaction: Option<String>,
    pub bins: BinConfig,
}

impl Default for Overrides {
    fn default() -> Self {
        Self {
            qubits: None,
            samples: None,
            seed: 7,
            workers: 1,
            interacting: None,
            ensemble: None,
            interaction: None,
            bins: BinConfig::default(),
        }
    }
}

/// Result of one experiment: a CSV table plus summary and manifest documents.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
    pub manifest: Value,
    pub warnings: Vec<String>,
}

/// Catalog entry.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub description: &'static str,
}

/// The experiment catalog.
pub fn registry() -> Vec<ExperimentInfo> {
    vec![
        ExperimentInfo {
            name: "fig1",
            aliases: &[],
            description: "two-qubit state-family curves: final entropy vs initial \
                          entanglement entropy for aligned and rotated couplings (no sampling)",
        },
        ExperimentInfo {
            name: "fig2",
            aliases: &["table600"],
            description: "Haar-random sweep for one register size: scatter, means, \
                          variances, Pearson, two-point line (set --qubits 2..6)",
        },
        ExperimentInfo {
            name: "fig3",
            aliases: &["table602"],
            description: "partial-interaction Haar sweep: only the first k qubits couple \
                          (--interacting k)",
        },
        ExperimentInfo {
            name: "fig4",
            aliases: &[],
            description: "cluster-product ensembles of six qubits: entanglement depth set \
                          by --ensemble clusters=…",
        },
        ExperimentInfo {
            name: "fig5",
            aliases: &[],
            description: "two-qubit states with every qubit's mean excitation pinned near E, \
                          dephased along z and along x (E sweep 0.5, 0.2, 0.1, 0.05)",
        },
        ExperimentInfo {
            name: "fig6",
            aliases: &[],
            description: "three-qubit excitation-pinned ensembles, z and x dephasing \
                          (E sweep 0.5, 0.2, 0.1)",
        },
        ExperimentInfo {
            name: "appC",
            aliases: &[],
            description: "means table over the excitation-pinned ensembles of two and three \
                          qubits",
        },
        ExperimentInfo {
            name: "fig7",
            aliases: &["dicke-table"],
            description: "generalized fixed-excitation ensembles: scatter, regression angles \
                          and correlations for z and x dephasing (--qubits 4 or 6)",
        },
        ExperimentInfo {
            name: "appE",
            aliases: &[],
            description: "means and variances table for fixed-excitation ensembles of four \
                          and six qubits with the full-space reference",
        },
        ExperimentInfo {
            name: "fig8",
            aliases: &[],
            description: "single-excitation scaling study: regression angle and correlation \
                          for z dephasing across register sizes 2..64 (sparse above 12)",
        },
    ]
}

/// Canonical name for an experiment name or alias.
pub fn resolve_name(name: &str) -> Option<&'static str> {
    registry().into_iter().find_map(|info| {
        if info.name.eq_ignore_ascii_case(name)
            || info.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
        {
            Some(info.name)
        } else {
            None
        }
    })
}

/// Runs a named experiment.
pub fn run_experiment(name: &str, ov: &Overrides) -> Result<ExperimentOutput> {
    let canonical = resolve_name(name).ok_or_else(|| {
        Error::Parse(format!(
            "unknown experiment {name:?}; see `dephase-lab list`"
        ))
    })?;
    match canonical {
        "fig1" => fig1(ov),
        "fig2" => haar_sweep("fig2", ov, 2, None),
        "fig3" => {
            let n = ov.qubits.unwrap_or(4);
            let k = ov.interacting.unwrap_or(n);
            haar_sweep("fig3", ov, 4, Some(k))
        }
        "fig4" => fig4(ov),
        "fig5" => energy_scatter("fig5", ov, 2, &[0.5, 0.2, 0.1, 0.05], 2_000),
        "fig6" => energy_scatter("fig6", ov, 3, &[0.5, 0.2, 0.1], 500),
        "appC" => app_c(ov),
        "fig7" => fig7(ov),
        "appE" => app_e(ov),
        "fig8" => fig8(ov),
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

/// Seed for the separately generated product-state anchor ensemble.
fn anchor_seed(seed: u64) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15)
}

fn run_manifest(ensemble: &EnsembleSpec, interactions: &[LabeledInteraction], run: &EnsembleRun) -> Value {
    let inter: Map<String, Value> = interactions
        .iter()
        .map(|li| (li.label.clone(), Value::String(li.spec.to_spec_string())))
        .collect();
    json!({
        "ensemble": ensemble.kind.to_spec_string(),
        "n_qubits": ensemble.n_qubits,
        "samples": ensemble.count,
        "seed": ensemble.seed,
        "interactions": inter,
        "streams": serde_json::to_value(&run.streams).unwrap(),
        "attempts": run.total_attempts(),
        "wall_seconds": run.wall_seconds,
    })
}

fn manifest_value(
    name: &str,
    command: String,
    workers: usize,
    runs: Vec<(String, Value)>,
    summary: &Value,
) -> Value {
    let runs: Map<String, Value> = runs.into_iter().collect();
    json!({
        "tool": "dephase-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": name,
        "command": command,
        "workers": workers,
        "runs": runs,
        "summary": summary,
    })
}

fn summary_or_null(
    run: &EnsembleRun,
    interaction: usize,
    anchor: Option<f64>,
    q_max: f64,
    bins: BinConfig,
) -> Result<Value> {
    if run.len() < 2 {
        return Ok(Value::Null);
    }
    let summary: RunSummary = summarize(&run.scatter(interaction), anchor, q_max, bins)?;
    Ok(serde_json::to_value(summary).unwrap())
}

fn scatter_rows(run: &EnsembleRun) -> Vec<Vec<String>> {
    (0..run.len())
        .map(|i| {
            let mut row = Vec::with_capacity(1 + run.entropies.len());
            row.push(format_float(run.q[i]));
            for series in &run.entropies {
                row.push(format_float(series[i]));
            }
            row
        })
        .collect()
}

fn no_interaction_warning(interactions: &[LabeledInteraction]) -> Vec<String> {
    interactions
        .iter()
        .filter(|li| !li.spec.has_interaction())
        .map(|li| {
            format!(
                "interaction {:?} couples no qubit; the dephasing map is the identity",
                li.label
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// fig1: deterministic state-family curves

fn fig1(ov: &Overrides) -> Result<ExperimentOutput> {
    let steps = ov.samples.unwrap_or(200).max(2);
    // Family 0: g1|00> + g2|11>. Family 1: the same family rotated into the
    // x eigenbasis: g1(|00>+|11>)/sqrt2 + g2(|10>+|01>)/sqrt2.
    let families = ["g1|00>+g2|11>", "g1(|00>+|11>)/sqrt2+g2(|10>+|01>)/sqrt2"];
    let interactions = ["z,i", "z,2z", "x,i", "x,3x"];
    let specs: Vec<InteractionSpec> = interactions
        .iter()
        .map(|t| InteractionSpec::parse(t))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (f, _) in families.iter().enumerate() {
        for g_idx in 0..=steps {
            let g = g_idx as f64 / steps as f64;
            let (a, b) = (g.sqrt(), (1.0 - g).sqrt());
            let amps = match f {
                0 => vec![
                    Complex64::new(a, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(b, 0.0),
                ],
                _ => {
                    let h = 1.0 / 2f64.sqrt();
                    vec![
                        Complex64::new(a * h, 0.0),
                        Complex64::new(b * h, 0.0),
                        Complex64::new(b * h, 0.0),
                        Complex64::new(a * h, 0.0),
                    ]
                }
            };
            let state = PureState::from_dense(2, amps)?;
            let s_e0 = entanglement_entropy(&state)?;
            for (i, spec) in specs.iter().enumerate() {
                let s_inf = final_entropy(&state, spec)?;
                rows.push(vec![
                    f.to_string(),
                    i.to_string(),
                    format_float(g),
                    format_float(s_e0),
                    format_float(s_inf),
                ]);
            }
        }
    }
    let summary = json!({
        "families": families,
        "interactions": interactions,
        "aligned_pairs": [
            {"family": 0, "interactions": ["z,i", "z,2z"],
             "note": "curves lie on the diagonal s_n_inf = s_e0"},
            {"family": 1, "interactions": ["x,i", "x,3x"],
             "note": "curves lie on the diagonal s_n_inf = s_e0"},
        ],
        "grid_points": steps + 1,
    });
    let command = format!(
        "dephase-lab experiment fig1 --samples {} --seed {} --workers {}",
        steps, ov.seed, ov.workers
    );
    let manifest = manifest_value("fig1", command, ov.workers, Vec::new(), &summary);
    Ok(ExperimentOutput {
        name: "fig1".into(),
        columns: vec!["family", "interaction", "gamma1_sq", "s_e0", "s_n_inf"],
        rows,
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// fig2 / fig3 / fig4: Haar-style sweeps with a separable anchor

fn haar_sweep(
    name: &str,
    ov: &Overrides,
    default_qubits: usize,
    interacting: Option<usize>,
) -> Result<ExperimentOutput> {
    let n = ov.qubits.unwrap_or(default_qubits);
    let count = ov.samples.unwrap_or(100_000);
    let spec = match (interacting, &ov.interaction) {
        (_, Some(text)) => InteractionSpec::parse(text)?,
        (Some(k), None) => {
            if k == 0 || k > n {
                return Err(Error::Parse(format!(
                    "--interacting {k} is outside 1..={n}"
                )));
            }
            InteractionSpec::partial_sigma_z(n, k)
        }
        (None, None) => default_sigma_z(n),
    };
    let interactions = vec![LabeledInteraction::new("s", spec)];
    let warnings = no_interaction_warning(&interactions);

    let main_spec = EnsembleSpec::new(EnsembleKind::Haar, n, count, ov.seed)?;
    let main_run = run_ensemble(&RunConfig {
        ensemble: main_spec.clone(),
        interactions: interactions.clone(),
        workers: ov.workers,
    })?;
    let sep_spec = EnsembleSpec::new(EnsembleKind::Separable, n, count, anchor_seed(ov.seed))?;
    let sep_run = run_ensemble(&RunConfig {
        ensemble: sep_spec.clone(),
        interactions: interactions.clone(),
        workers: ov.workers,
    })?;
    let anchor = sep_run.mean_entropy(0);
    let q_max = n as f64 / 2.0;
    let summary = json!({
        "haar": summary_or_null(&main_run, 0, Some(anchor), q_max, ov.bins)?,
        "separable_mean_s": anchor,
        "separable_samples": sep_run.len() as u64,
        "q_max": q_max,
        "max_angle_bound_degrees": max_angle_bound(n),
        "interacting": interacting.unwrap_or(n),
    });
    let mut command = format!(
        "dephase-lab experiment {name} --qubits {n} --samples {count} --seed {} --workers {}",
        ov.seed, ov.workers
    );
    if let Some(k) = interacting {
        command.push_str(&format!(" --interacting {k}"));
    }
    let manifest = manifest_value(
        name,
        command,
        ov.workers,
        vec![
            ("haar".into(), run_manifest(&main_spec, &interactions, &main_run)),
            ("separable".into(), run_manifest(&sep_spec, &interactions, &sep_run)),
        ],
        &summary,
    );
    Ok(ExperimentOutput {
        name: name.into(),
        columns: vec!["q", "s"],
        rows: scatter_rows(&main_run),
        summary,
        manifest,
        warnings,
    })
}

fn fig4(ov: &Overrides) -> Result<ExperimentOutput> {
    let n = ov.qubits.unwrap_or(6);
    let count = ov.samples.unwrap_or(100_000);
    let kind_text = ov.ensemble.clone().unwrap_or_else(|| {
        // Default: three two-qubit clusters (or singletons if n is odd).
        if n.is_multiple_of(2) {
            format!("clusters={}", vec!["2"; n / 2].join("+"))
        } else {
            format!("clusters={}", vec!["1"; n].join("+"))
        }
    });
    let kind = EnsembleKind::parse(&kind_text, n)?;
    if !matches!(kind, EnsembleKind::Clusters(_)) {
        return Err(Error::Parse(format!(
            "fig4 needs a clusters=… ensemble, got {kind_text:?}"
        )));
    }
    let spec = match &ov.interaction {
        Some(text) => InteractionSpec::parse(text)?,
        None => default_sigma_z(n),
    };
    let interactions = vec![LabeledInteraction::new("s", spec)];
    let main_spec = EnsembleSpec::new(kind.clone(), n, count, ov.seed)?;
    let main_run = run_ensemble(&RunConfig {
        ensemble: main_spec.clone(),
        interactions: interactions.clone(),
        workers: ov.workers,
    })?;
    let sep_spec = EnsembleSpec::new(EnsembleKind::Separable, n, count, anchor_seed(ov.seed))?;
    let sep_run = run_ensemble(&RunConfig {
        ensemble: sep_spec.clone(),
        interactions: interactions.clone(),
        workers: ov.workers,
    })?;
    let anchor = sep_run.mean_entropy(0);
    let summary = json!({
        "clusters": kind.to_spec_string(),
        "run": summary_or_null(&main_run, 0, Some(anchor), n as f64 / 2.0, ov.bins)?,
        "separable_mean_s": anchor,
    });
    let command = format!(
        "dephase-lab experiment fig4 --qubits {n} --ensemble {kind_text} --samples {count} \
         --seed {} --workers {}",
        ov.seed, ov.workers
    );
    let manifest = manifest_value(
        "fig4",
        command,
        ov.workers,
        vec![
            ("clusters".into(), run_manifest(&main_spec, &interactions, &main_run)),
            ("separable".into(), run_manifest(&sep_spec, &interactions, &sep_run)),
        ],
        &summary,
    );
    Ok(ExperimentOutput {
        name: "fig4".into(),
        columns: vec!["q", "s"],
        rows: scatter_rows(&main_run),
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// fig5 / fig6 / appC: excitation-pinned ensembles

struct EnergyRun {
    excitation: f64,
    delta: f64,
    run: EnsembleRun,
}

fn energy_runs(
    n: usize,
    excitations: &[f64],
    delta_override: Option<f64>,
    accepted_per_e: u64,
    seed: u64,
    workers: usize,
) -> Result<(Vec<LabeledInteraction>, Vec<EnergyRun>)> {
    let delta = delta_override.unwrap_or_else(|| default_energy_delta(n));
    let interactions = vec![
        LabeledInteraction::new("s_z", InteractionSpec::distinct_sigma_z(n)),
        LabeledInteraction::new("s_x", InteractionSpec::distinct_sigma_x(n)),
    ];
    let mut runs = Vec::new();
    for (i, &e) in excitations.iter().enumerate() {
        let ensemble = EnsembleSpec::new(
            EnsembleKind::EnergyConstrained {
                excitation: e,
                delta,
            },
            n,
            accepted_per_e,
            seed.wrapping_add(i as u64),
        )?;
        let run = run_ensemble(&RunConfig {
            ensemble,
            interactions: interactions.clone(),
            workers,
        })?;
        runs.push(EnergyRun {
            excitation: e,
            delta,
            run,
        });
    }
    Ok((interactions, runs))
}

fn energy_scatter(
    name: &str,
    ov: &Overrides,
    n: usize,
    default_excitations: &[f64],
    default_accepted: u64,
) -> Result<ExperimentOutput> {
    let n = ov.qubits.unwrap_or(n);
    let accepted = ov.samples.unwrap_or(default_accepted);
    // --ensemble energy=E[:delta] narrows the sweep to a single E value.
    let (excitations, delta_override) = match &ov.ensemble {
        Some(text) => match EnsembleKind::parse(text, n)? {
            EnsembleKind::EnergyConstrained { excitation, delta } => {
                (vec![excitation], Some(delta))
            }
            other => {
                return Err(Error::Parse(format!(
                    "{name} needs an energy=… ensemble, got {:?}",
                    other.to_spec_string()
                )))
            }
        },
        None => (default_excitations.to_vec(), None),
    };
    let (interactions, runs) = energy_runs(
        n,
        &excitations,
        delta_override,
        accepted,
        ov.seed,
        ov.workers,
    )?;
    let mut rows = Vec::new();
    let mut summary_map = Map::new();
    let mut manifest_runs = Vec::new();
    for er in &runs {
        for i in 0..er.run.len() {
            rows.push(vec![
                format_float(er.excitation),
                format_float(er.run.q[i]),
                format_float(er.run.entropies[0][i]),
                format_float(er.run.entropies[1][i]),
            ]);
        }
        let attempts = er.run.total_attempts();
        summary_map.insert(
            format!("E={}", er.excitation),
            json!({
                "excitation": er.excitation,
                "delta": er.delta,
                "accepted": er.run.len() as u64,
                "attempts": attempts,
                "acceptance_rate": er.run.len() as f64 / attempts as f64,
                "summary_z": summary_or_null(&er.run, 0, None, n as f64 / 2.0, ov.bins)?,
                "summary_x": summary_or_null(&er.run, 1, None, n as f64 / 2.0, ov.bins)?,
            }),
        );
        let ensemble = EnsembleSpec::new(
            EnsembleKind::EnergyConstrained {
                excitation: er.excitation,
                delta: er.delta,
            },
            n,
            accepted,
            ov.seed,
        )?;
        manifest_runs.push((
            format!("E={}", er.excitation),
            run_manifest(&ensemble, &interactions, &er.run),
        ));
    }
    let summary = Value::Object(summary_map);
    let command = format!(
        "dephase-lab experiment {name} --qubits {n} --samples {accepted} --seed {} --workers {}",
        ov.seed, ov.workers
    );
    let manifest = manifest_value(name, command, ov.workers, manifest_runs, &summary);
    Ok(ExperimentOutput {
        name: name.into(),
        columns: vec!["e", "q", "s_z", "s_x"],
        rows,
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

fn app_c(ov: &Overrides) -> Result<ExperimentOutput> {
    // The tightest window (three qubits at E = 0.1) accepts ~2e-6 of draws;
    // the default keeps the full table under two minutes on one core.
    let accepted = ov.samples.unwrap_or(500);
    let mut rows = Vec::new();
    let mut summary_map = Map::new();
    let mut manifest_runs = Vec::new();
    for (n, es) in [(2usize, vec![0.5, 0.2, 0.1, 0.05]), (3, vec![0.5, 0.2, 0.1])] {
        let (interactions, runs) = energy_runs(n, &es, None, accepted, ov.seed, ov.workers)?;
        for er in &runs {
            let mean_q = er.run.mean_q();
            let mean_sz = er.run.mean_entropy(0);
            let mean_sx = er.run.mean_entropy(1);
            rows.push(vec![
                n.to_string(),
                format_float(er.excitation),
                format_float(er.delta),
                format_float(mean_q),
                format_float(mean_sz),
                format_float(mean_sx),
                er.run.len().to_string(),
                er.run.total_attempts().to_string(),
            ]);
            summary_map.insert(
                format!("{n}q:E={}", er.excitation),
                json!({
                    "mean_q": mean_q,
                    "mean_s_z": mean_sz,
                    "mean_s_x": mean_sx,
                    "delta": er.delta,
                    "accepted": er.run.len() as u64,
                    "attempts": er.run.total_attempts(),
                }),
            );
            let ensemble = EnsembleSpec::new(
                EnsembleKind::EnergyConstrained {
                    excitation: er.excitation,
                    delta: er.delta,
                },
                n,
                accepted,
                ov.seed,
            )?;
            manifest_runs.push((
                format!("{n}q:E={}", er.excitation),
                run_manifest(&ensemble, &interactions, &er.run),
            ));
        }
    }
    let summary = Value::Object(summary_map);
    let command = format!(
        "dephase-lab experiment appC --samples {accepted} --seed {} --workers {}",
        ov.seed, ov.workers
    );
    let manifest = manifest_value("appC", command, ov.workers, manifest_runs, &summary);
    Ok(ExperimentOutput {
        name: "appC".into(),
        columns: vec![
            "n", "e", "delta", "mean_q", "mean_s_z", "mean_s_x", "accepted", "attempts",
        ],
        rows,
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// fig7 / appE / fig8: fixed-excitation ensembles

fn dicke_interactions(n: usize) -> Vec<LabeledInteraction> {
    vec![
        LabeledInteraction::new("s_z", InteractionSpec::distinct_sigma_z(n)),
        LabeledInteraction::new("s_x", InteractionSpec::distinct_sigma_x(n)),
    ]
}

fn fig7(ov: &Overrides) -> Result<ExperimentOutput> {
    let n = ov.qubits.unwrap_or(4);
    if n > 12 {
        return Err(Error::Parse(format!(
            "fig7 computes x-basis entropies densely and supports at most 12 qubits, got {n}"
        )));
    }
    let count = ov.samples.unwrap_or(50_000);
    let excitation_list: Vec<usize> = (1..n).take(3).collect();
    let interactions = dicke_interactions(n);
    let mut rows = Vec::new();
    let mut summary_map = Map::new();
    let mut manifest_runs = Vec::new();
    for (i, &k) in excitation_list.iter().enumerate() {
        let ensemble = EnsembleSpec::new(
            EnsembleKind::Dicke { excitations: k },
            n,
            count,
            ov.seed.wrapping_add(i as u64),
        )?;
        let run = run_ensemble(&RunConfig {
            ensemble: ensemble.clone(),
            interactions: interactions.clone(),
            workers: ov.workers,
        })?;
        for j in 0..run.len() {
            rows.push(vec![
                k.to_string(),
                format_float(run.q[j]),
                format_float(run.entropies[0][j]),
                format_float(run.entropies[1][j]),
            ]);
        }
        summary_map.insert(
            format!("N={k}"),
            json!({
                "summary_z": summary_or_null(&run, 0, None, n as f64 / 2.0, ov.bins)?,
                "summary_x": summary_or_null(&run, 1, None, n as f64 / 2.0, ov.bins)?,
            }),
        );
        manifest_runs.push((format!("N={k}"), run_manifest(&ensemble, &interactions, &run)));
    }
    let summary = Value::Object(summary_map);
    let command = format!(
        "dephase-lab experiment fig7 --qubits {n} --samples {count} --seed {} --workers {}",
        ov.seed, ov.workers
    );
    let manifest = manifest_value("fig7", command, ov.workers, manifest_runs, &summary);
    Ok(ExperimentOutput {
        name: "fig7".into(),
        columns: vec!["n_excitations", "q", "s_z", "s_x"],
        rows,
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

fn population_stats(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var)
}

fn app_e(ov: &Overrides) -> Result<ExperimentOutput> {
    let count = ov.samples.unwrap_or(50_000);
    let mut rows = Vec::new();
    let mut summary_map = Map::new();
    let mut manifest_runs = Vec::new();
    for n in [4usize, 6] {
        let interactions = dicke_interactions(n);
        // excitations = 0 encodes the full-space reference row.
        let mut ensembles = vec![(0usize, EnsembleKind::Haar)];
        for k in 1..n.min(4) {
            ensembles.push((k, EnsembleKind::Dicke { excitations: k }));
        }
        for (i, (k, kind)) in ensembles.into_iter().enumerate() {
            let ensemble =
                EnsembleSpec::new(kind, n, count, ov.seed.wrapping_add((10 * n + i) as u64))?;
            let run = run_ensemble(&RunConfig {
                ensemble: ensemble.clone(),
                interactions: interactions.clone(),
                workers: ov.workers,
            })?;
            let (mean_q, var_q) = population_stats(&run.q);
            let (mean_sz, var_sz) = population_stats(&run.entropies[0]);
            let (mean_sx, var_sx) = population_stats(&run.entropies[1]);
            rows.push(vec![
                n.to_string(),
                k.to_string(),
                format_float(mean_q),
                format_float(mean_sx),
                format_float(mean_sz),
                format_float(var_q),
                format_float(var_sx),
                format_float(var_sz),
            ]);
            let key = if k == 0 {
                format!("{n}q:full")
            } else {
                format!("{n}q:N={k}")
            };
            summary_map.insert(
                key.clone(),
                json!({
                    "mean_q": mean_q, "mean_s_x": mean_sx, "mean_s_z": mean_sz,
                    "var_q": var_q, "var_s_x": var_sx, "var_s_z": var_sz,
                }),
            );
            manifest_runs.push((key, run_manifest(&ensemble, &interactions, &run)));
        }
    }
    let summary = Value::Object(summary_map);
    let command = format!(
        "dephase-lab experiment appE --samples {count} --seed {} --workers {}",
        ov.seed, ov.workers
    );
    let manifest = manifest_value("appE", command, ov.workers, manifest_runs, &summary);
    Ok(ExperimentOutput {
        name: "appE".into(),
        columns: vec![
            "n",
            "n_excitations",
            "mean_q",
            "mean_s_x",
            "mean_s_z",
            "var_q",
            "var_s_x",
            "var_s_z",
        ],
        rows,
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

fn fig8(ov: &Overrides) -> Result<ExperimentOutput> {
    let sizes: Vec<usize> = match ov.qubits {
        Some(n) => vec![n],
        None => vec![2, 4, 8, 16, 32, 64],
    };
    let count = ov.samples.unwrap_or(50_000);
    let mut rows = Vec::new();
    let mut summary_map = Map::new();
    let mut manifest_runs = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let interactions = vec![LabeledInteraction::new("s_z", default_sigma_z(n))];
        let ensemble = EnsembleSpec::new(
            EnsembleKind::Dicke { excitations: 1 },
            n,
            count,
            ov.seed.wrapping_add(i as u64),
        )?;
        let run = run_ensemble(&RunConfig {
            ensemble: ensemble.clone(),
            interactions: interactions.clone(),
            workers: ov.workers,
        })?;
        for j in 0..run.len() {
            rows.push(vec![
                n.to_string(),
                format_float(run.q[j]),
                format_float(run.entropies[0][j]),
            ]);
        }
        let summary = summarize(&run.scatter(0), None, 2.0, ov.bins)?;
        let regression = summary.regression.as_ref();
        summary_map.insert(
            format!("{n}q"),
            json!({
                "angle_degrees": regression.map(|l| l.angle_degrees),
                "pearson": summary.pearson,
                "sparse": n > dephase_core::statevec::SPARSE_QUBIT_THRESHOLD,
                "summary": serde_json::to_value(&summary).unwrap(),
            }),
        );
        manifest_runs.push((format!("{n}q"), run_manifest(&ensemble, &interactions, &run)));
    }
    let summary = Value::Object(summary_map);
    let command = match ov.qubits {
        Some(n) => format!(
            "dephase-lab experiment fig8 --qubits {n} --samples {count} --seed {} --workers {}",
            ov.seed, ov.workers
        ),
        None => format!(
            "dephase-lab experiment fig8 --samples {count} --seed {} --workers {}",
            ov.seed, ov.workers
        ),
    };
    let manifest = manifest_value("fig8", command, ov.workers, manifest_runs, &summary);
    Ok(ExperimentOutput {
        name: "fig8".into(),
        columns: vec!["n", "q", "s_z"],
        rows,
        summary,
        manifest,
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// ad-hoc sampling (the `sample` subcommand)

pub fn run_adhoc(ov: &Overrides) -> Result<ExperimentOutput> {
    let n = ov.qubits.unwrap_or(2);
    let count = ov.samples.unwrap_or(10_000);
    let kind = match &ov.ensemble {
        Some(text) => EnsembleKind::parse(text, n)?,
        None => EnsembleKind::Haar,
    };
    let spec = match &ov.interaction {
        Some(text) => InteractionSpec::parse(text)?,
        None => default_sigma_z(n),
    };
    if spec.n_qubits() != n {
        return Err(Error::Parse(format!(
            "interaction covers {} qubits but --qubits is {n}",
            spec.n_qubits()
        )));
    }
    let interactions = vec![LabeledInteraction::new("s", spec)];
    let warnings = no_interaction_warning(&interactions);
    let ensemble = EnsembleSpec::new(kind, n, count, ov.seed)?;
    let run = run_ensemble(&RunConfig {
        ensemble: ensemble.clone(),
        interactions: interactions.clone(),
        workers: ov.workers,
    })?;
    let summary = json!({
        "mean_q": run.mean_q(),
        "mean_s": run.mean_entropy(0),
        "samples": run.len() as u64,
        "attempts": run.total_attempts(),
        "run": summary_or_null(&run, 0, None, n as f64 / 2.0, ov.bins)?,
    });
    let command = format!(
        "dephase-lab sample --qubits {n} --ensemble {} --interaction {} --samples {count} \
         --seed {} --workers {}",
        ensemble.kind.to_spec_string(),
        interactions[0].spec.to_spec_string(),
        ov.seed,
        ov.workers
    );
    let manifest = manifest_value(
        "sample",
        command,
        ov.workers,
        vec![("sample".into(), run_manifest(&ensemble, &interactions, &run))],
        &summary,
    );
    Ok(ExperimentOutput {
        name: "sample".into(),
        columns: vec!["q", "s"],
        rows: scatter_rows(&run),
        summary,
        manifest,
        warnings,
    })
}
