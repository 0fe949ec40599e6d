use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use ratchet_core::config::RunConfig;
use ratchet_core::integrate::propagate;
use ratchet_core::objective::{recombination_rate, t_bar};
use ratchet_core::presets;
use ratchet_core::sweep::{
    analyze, run_sweep, run_sweep_with_workers, Minimum, ObjectiveKind, Parameter, SurfaceReport,
};
use ratchet_core::units::{energy_to_cm1, time_to_fs};
use ratchet_core::DensityMatrix;
use serde_json::json;

use crate::record::{write_json, Recorder};
use crate::settings::{self, ConfigError};

fn create(path: &Path, rec: &mut Recorder) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    rec.outputs.push(path.to_path_buf());
    Ok(BufWriter::new(f))
}

fn write_echo(out: &Path, config: &RunConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let path = out.join("config.toml");
    std::fs::write(&path, settings::echo(config))?;
    rec.outputs.push(path);
    Ok(())
}

pub fn simulate(
    config: &RunConfig,
    out: &Path,
    rec: &mut Recorder,
) -> anyhow::Result<serde_json::Value> {
    write_echo(out, config, rec)?;
    let traj = propagate(
        &config.model,
        &DensityMatrix::excited(),
        config.t_end,
        &config.integrator,
    )?;
    traj.write_csv(create(&out.join("trajectory.csv"), rec)?)?;

    let tb = t_bar(&config.model, &config.objective, &config.integrator)?;
    let final_state = traj.final_state().expect("trajectory has samples");
    Ok(json!({
        "feedback": config.model.drive.feedback,
        "t0_internal": config.objective.t0,
        "t0_fs": time_to_fs(config.objective.t0),
        "t_bar_internal": tb,
        "t_bar_fs": time_to_fs(tb),
        "recombination_rate": recombination_rate(config.model.dissipation.gamma_minus, tb, &config.objective),
        "samples": traj.len(),
        "final_rho11": final_state.rho11(),
        "final_rho22": final_state.rho22(),
        "final_trace": final_state.trace(),
    }))
}

fn describe_axis_value(param: Parameter, v: f64) -> serde_json::Value {
    if param.is_energy() {
        json!({ "internal": v, "cm1": energy_to_cm1(v) })
    } else {
        json!({ "rad": v })
    }
}

fn describe_minimum(report: &SurfaceReport, m: &Minimum) -> serde_json::Value {
    let axes = &report.surface.spec.axes;
    let location: serde_json::Map<String, serde_json::Value> = axes
        .iter()
        .zip(&m.location)
        .map(|(a, v)| (a.param.key().to_string(), describe_axis_value(a.param, *v)))
        .collect();
    let mut entry = json!({
        "kind": m.kind,
        "index": m.index,
        "location": location,
        "value": m.value,
        "basin_flatness": m.basin_flatness,
        "depth": m.depth,
        "significance": m.significance,
    });
    if report.surface.spec.objective == ObjectiveKind::TBar {
        entry["value_fs"] = json!(time_to_fs(m.value));
    }
    entry
}

fn minima_json(report: &SurfaceReport) -> serde_json::Value {
    json!({
        "objective": report.surface.spec.objective,
        "local": report.minima.local.iter().map(|m| describe_minimum(report, m)).collect::<Vec<_>>(),
        "global": describe_minimum(report, &report.minima.global),
        "global_on_boundary": report.minima.global_on_boundary,
        "profile_dips": report.profile_dips,
        "barriers": report.barriers,
    })
}

fn write_profile(report: &SurfaceReport, path: &Path, rec: &mut Recorder) -> anyhow::Result<()> {
    let Some(profile) = &report.profile else {
        return Ok(());
    };
    let mut w = csv::Writer::from_writer(create(path, rec)?);
    let mut header = profile.axis.columns();
    header.extend(
        profile
            .minimized
            .columns()
            .into_iter()
            .map(|c| format!("argmin_{c}")),
    );
    header.extend(
        report
            .surface
            .spec
            .objective
            .columns()
            .iter()
            .map(|c| c.to_string()),
    );
    w.write_record(&header)?;
    let fs = report.surface.spec.objective == ObjectiveKind::TBar;
    for ((c, v), arg) in profile
        .coords
        .iter()
        .zip(&profile.values)
        .zip(&profile.argmin)
    {
        let mut row = vec![*c];
        if profile.axis.is_energy() {
            row.push(energy_to_cm1(*c));
        }
        row.push(*arg);
        if profile.minimized.is_energy() {
            row.push(energy_to_cm1(*arg));
        }
        row.push(*v);
        if fs {
            row.push(time_to_fs(*v));
        }
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep(
    config: &RunConfig,
    workers: Option<usize>,
    out: &Path,
    rec: &mut Recorder,
) -> anyhow::Result<serde_json::Value> {
    let spec = config.sweep_spec().ok_or_else(|| {
        ConfigError("configuration has no [sweep] section; pick a sweep preset or add one".into())
    })?;
    write_echo(out, config, rec)?;
    let surface = match workers {
        Some(n) => run_sweep_with_workers(&spec, n)?,
        None => run_sweep(&spec)?,
    };
    surface.write_csv(create(&out.join("surface.csv"), rec)?)?;
    let path = out.join("surface.json");
    write_json(&path, &surface)?;
    rec.outputs.push(path);

    let report = analyze(surface);
    write_profile(&report, &out.join("profile.csv"), rec)?;
    let minima = minima_json(&report);
    let path = out.join("minima.json");
    write_json(&path, &minima)?;
    rec.outputs.push(path);
    Ok(json!({ "points": report.surface.values.len(), "minima": minima }))
}

pub fn print_simulation(summary: &serde_json::Value) {
    let f = |k: &str| summary[k].as_f64().unwrap_or(f64::NAN);
    println!(
        "T_bar = {:.6} internal = {:.3} fs over T0 = {:.4} internal ({:.2} fs){}",
        f("t_bar_internal"),
        f("t_bar_fs"),
        f("t0_internal"),
        f("t0_fs"),
        if summary["feedback"].as_bool() == Some(true) {
            " [feedback]"
        } else {
            ""
        }
    );
    println!("R = {:.6}", f("recombination_rate"));
}

pub fn print_sweep(summary: &serde_json::Value) {
    let minima = &summary["minima"];
    println!("{} grid points", summary["points"]);
    let line = |m: &serde_json::Value| {
        let loc: Vec<String> = m["location"]
            .as_object()
            .map(|o| {
                o.iter()
                    .map(|(k, v)| match v.get("cm1") {
                        Some(cm) => format!("{k}={:.1} cm^-1", cm.as_f64().unwrap_or(f64::NAN)),
                        None => format!("{k}={:.3} rad", v["rad"].as_f64().unwrap_or(f64::NAN)),
                    })
                    .collect()
            })
            .unwrap_or_default();
        let mut s = format!(
            "{}  value={:.6}",
            loc.join(" "),
            m["value"].as_f64().unwrap_or(f64::NAN)
        );
        if let Some(fs) = m["value_fs"].as_f64() {
            s += &format!(" ({fs:.2} fs)");
        }
        if let Some(sig) = m["significance"].as_str() {
            s += &format!(" {sig}");
        }
        if let Some(fl) = m["basin_flatness"].as_f64() {
            s += &format!(" flatness={fl:.4}");
        }
        s
    };
    println!("global: {}", line(&minima["global"]));
    if minima["global_on_boundary"].as_bool() == Some(true) {
        println!("  (global minimum lies on the grid boundary)");
    }
    for m in minima["local"].as_array().into_iter().flatten() {
        println!("local:  {}", line(m));
    }
    for b in minima["barriers"].as_array().into_iter().flatten() {
        println!("barrier: {:.6}", b["height"].as_f64().unwrap_or(f64::NAN));
    }
}

pub fn presets(json_out: bool) -> anyhow::Result<()> {
    let catalog = presets::catalog();
    if json_out {
        println!("{}", serde_json::to_string_pretty(&catalog)?);
    } else {
        for p in &catalog {
            println!("{:<16} {:<22} {}", p.name, p.figure, p.description);
        }
    }
    Ok(())
}
