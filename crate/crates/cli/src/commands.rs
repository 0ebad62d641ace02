use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::json;

use squeeze_core::design::{
    suitability, validate_design, write_profile_csv, DesignDescriptor, GammaSpec, ThetaDesign,
};
use squeeze_core::io::{format_number, CsvWriter};
use squeeze_core::mathieu::{
    find_intersections, mathieu_profile, strutt_map, trace_curve_in, CurveKind, MathieuParams, ScanGrid,
    SqueezeCurve,
};
use squeeze_core::packet::{apply_family, write_shadow_csv, write_trajectory_csv, GaussianPacket, ShadowBand};
use squeeze_core::propagate::{propagate_dense, StepControl};
use squeeze_core::units::{required_voltages, trap_to_dimensionless, PhysicalContext, TrapDrive};
use squeeze_core::{classify, AmplitudeProfile, Domain, Error};

use crate::args::{Command, Direction, PacketSpec, Range, Source};
use crate::manifest::{self, RunManifest};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DESIGN: u8 = 3;
pub const EXIT_INTEGRATION: u8 = 4;

const CLASSIFY_TOL: f64 = 1e-6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::IntegrationFailure { .. } | Error::NonSymplectic { .. } => EXIT_INTEGRATION,
            Error::MalformedDesign { .. } | Error::SingularAmplitude { .. } => EXIT_DESIGN,
            _ => EXIT_USAGE,
        };
        Self { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<Error>() {
            Ok(core) => core.into(),
            Err(e) => Self::usage(e),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e)
    }
}

type Outcome = Result<(), Failure>;

/// Output directory plus the files written so far, in order.
struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Outputs<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>, Failure> {
        let path = self.dir.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.files.push(PathBuf::from(name));
        Ok(BufWriter::new(f))
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Outcome {
        let text = serde_json::to_string_pretty(value).map_err(anyhow::Error::from)?;
        let mut w = self.create(name)?;
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }
}

pub fn run(command: &Command, out: &Path) -> Outcome {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut outputs = Outputs {
        dir: out,
        files: Vec::new(),
    };
    let result = match command {
        Command::Scan {
            beta0_range,
            beta1_range,
            grid,
            interval,
            step,
        } => scan(&mut outputs, *beta0_range, *beta1_range, (grid.0, grid.1), *interval, *step),
        Command::Design {
            b,
            c,
            beta_end,
            gamma,
            interval,
            samples,
            step,
        } => design(&mut outputs, (*b, *c, *beta_end, *gamma), *interval, *samples, *step),
        Command::Propagate {
            source,
            interval,
            packets,
            samples,
            step,
        } => propagate(&mut outputs, source, *interval, packets, *samples, *step),
        Command::Shadow {
            source,
            interval,
            packets,
            w,
            samples,
            step,
        } => shadow(&mut outputs, source, *interval, packets, *w, *samples, *step),
        Command::Units {
            context,
            direction,
            values,
        } => units(&mut outputs, context.as_deref(), *direction, *values),
    };
    // rejected designs still get a manifest so the run can be inspected
    if result.is_ok() || matches!(&result, Err(f) if f.code == EXIT_DESIGN) {
        manifest::save(&out.join("manifest.json"), &RunManifest::new(command, outputs.files))?;
    }
    result
}

fn step_control(step: f64) -> Result<StepControl, Failure> {
    let s = StepControl::with_step(step);
    s.validate()?;
    Ok(s)
}

fn write_curve(w: &mut CsvWriter<BufWriter<File>>, c: &SqueezeCurve) -> std::io::Result<()> {
    for p in &c.points {
        w.text_row(&[
            c.kind.as_str().to_string(),
            format_number(p.beta0),
            format_number(p.beta1),
            format_number(p.lambda),
        ])?;
    }
    Ok(())
}

fn scan(out: &mut Outputs, b0: Range, b1: Range, n: (usize, usize), interval: Range, step: f64) -> Outcome {
    let grid = ScanGrid::new((b0.0, b0.1), (b1.0, b1.1), n.0, n.1, (interval.0, interval.1))?;
    let step = step_control(step)?;
    let map = strutt_map(&grid, step)?;

    let mut raster = CsvWriter::new(
        out.create("raster.csv")?,
        &["beta0", "beta1", "u11", "u12", "u21", "u22", "trace", "regime"],
    )?;
    for cell in &map.cells {
        let m = cell.matrix.map_or([[f64::NAN; 2]; 2], |m| m.rows());
        let mut fields: Vec<String> = [cell.params.beta0, cell.params.beta1, m[0][0], m[0][1], m[1][0], m[1][1], cell.trace()]
            .iter()
            .map(|v| format_number(*v))
            .collect();
        fields.push(cell.regime().map_or("flagged", |r| r.as_str()).to_string());
        raster.text_row(&fields)?;
    }
    raster.flush()?;

    let c12 = trace_curve_in(&map, CurveKind::U12Zero);
    let c21 = trace_curve_in(&map, CurveKind::U21Zero);
    let mut curves = CsvWriter::new(out.create("curves.csv")?, &["curve", "beta0", "beta1", "lambda"])?;
    write_curve(&mut curves, &c12)?;
    write_curve(&mut curves, &c21)?;
    curves.flush()?;

    let found = find_intersections(&c12, &c21, &grid, step)?;
    let list: Vec<_> = found
        .iter()
        .map(|ix| json!({"beta0": ix.params.beta0, "beta1": ix.params.beta1, "lambda": ix.lambda(), "matrix": ix.matrix}))
        .collect();
    out.json(
        "summary.json",
        &json!({
            "cells": map.cells.len(),
            "flagged": map.flagged_count(),
            "u12_points": c12.points.len(),
            "u21_points": c21.points.len(),
            "intersections": list,
        }),
    )?;

    if map.flagged_count() > 0 {
        eprintln!("warning: {} cells failed to integrate", map.flagged_count());
    }
    match found.first() {
        Some(ix) => println!(
            "intersection beta0={:.6} beta1={:.6} lambda={:.6} 1/lambda={:.6}",
            ix.params.beta0,
            ix.params.beta1,
            ix.lambda(),
            1.0 / ix.lambda()
        ),
        None => println!("no intersection in the scanned region"),
    }
    Ok(())
}

fn design(out: &mut Outputs, (b, c, beta_end, gamma): (f64, f64, f64, GammaSpec), interval: Range, samples: usize, step: f64) -> Outcome {
    if b == 0.0 || c == 0.0 {
        return Err(Failure::usage(anyhow::anyhow!("--b and --c must be non-zero")));
    }
    let step = step_control(step)?;
    let d = ThetaDesign::solve(b, c, beta_end, gamma)?;
    out.json("design.json", &serde_json::to_value(DesignDescriptor::from(&d)).map_err(anyhow::Error::from)?)?;
    write_profile_csv(&d, interval.0, interval.1, samples, out.create("profile.csv")?)?;

    let report = validate_design(&d, FRAC_PI_2);
    let suit = suitability(&d, FRAC_PI_2, samples.max(1), step);
    let mut eig = CsvWriter::new(out.create("eigen.csv")?, &["tau", "re_plus", "re_minus", "im", "real_pair"])?;
    let verdict = match &suit {
        Ok(s) => {
            for e in &s.eigentrajectory {
                eig.row(&[e.tau, e.re_plus, e.re_minus, e.im, f64::from(u8::from(e.is_real_pair))])?;
            }
            json!({"suitable": s.suitable, "min_beta": s.min_beta, "beta_sign_changes": s.beta_sign_changes})
        }
        Err(e) => json!({"suitable": false, "error": e.to_string()}),
    };
    eig.flush()?;
    out.json("report.json", &json!({"coefficients": d.a, "validation": report, "suitability": verdict}))?;

    println!("coefficients a1={:.12} a3={:.12} a5={:.12} a7={:.12}", d.a[0], d.a[1], d.a[2], d.a[3]);
    println!(
        "conditions: slope {} ({:.2e}), beta' {} ({:.2e}), fourier {} ({:.2e}); endpoint beta residual {:.2e}",
        ok(report.condition1_ok),
        report.condition1_residual,
        ok(report.condition2_ok),
        report.condition2_residual,
        ok(report.condition3_ok),
        report.condition3_residual,
        report.beta_endpoint_residual
    );
    match &suit {
        Ok(s) => println!(
            "verdict: {} (min beta {:.6}, {} sign changes)",
            if s.suitable { "suitable" } else { "unsuitable" },
            s.min_beta,
            s.beta_sign_changes
        ),
        Err(e) => println!("verdict: unsuitable ({e})"),
    }
    if !report.all_ok() {
        return Err(Failure {
            code: EXIT_DESIGN,
            error: anyhow::anyhow!("design violates the regularity conditions"),
        });
    }
    Ok(())
}

/// The amplitude and the default interval for its source.
fn load_source(source: &Source) -> Result<(AmplitudeProfile, Range), Failure> {
    if let Some(path) = &source.design {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let d = DesignDescriptor::from_json(&text)?.to_design()?;
        return Ok((d.profile(Domain::ALL), Range(-FRAC_PI_2, 35.0 * PI / 32.0)));
    }
    if let Some(Range(b0, b1)) = source.mathieu {
        return Ok((mathieu_profile(MathieuParams::new(b0, b1)), Range(FRAC_PI_2, 2.5 * PI)));
    }
    if let Some(beta) = source.beta_const {
        return Ok((AmplitudeProfile::constant(beta), Range(0.0, 1.0)));
    }
    Err(Failure::usage(anyhow::anyhow!("one of --design, --mathieu, --beta-const is required")))
}

fn packets(spec: &PacketSpec) -> Result<Vec<GaussianPacket>, Failure> {
    spec.p0
        .iter()
        .map(|&p| GaussianPacket::new(spec.q0, p, 1.0).map_err(Failure::from))
        .collect()
}

fn propagate(out: &mut Outputs, source: &Source, interval: Option<Range>, spec: &PacketSpec, samples: usize, step: f64) -> Outcome {
    let (profile, default_interval) = load_source(source)?;
    let Range(t0, t1) = interval.unwrap_or(default_interval);
    let step = step_control(step)?;
    let family = propagate_dense(&profile, t0, t1, samples, step)?;
    let trajectories = apply_family(&family, &packets(spec)?)?;
    for (k, t) in trajectories.iter().enumerate() {
        write_trajectory_csv(t, out.create(&format!("trajectory_{k}.csv"))?)?;
    }
    let (_, u) = family.last().expect("dense output has samples");
    let regime = classify(&u, CLASSIFY_TOL).ok();
    out.json(
        "final.json",
        &json!({
            "interval": [t0, t1],
            "matrix": u,
            "lambda": u.u11,
            "det_drift": family.max_det_drift(),
            "classification": regime,
        }),
    )?;
    println!("final u = {u}");
    println!("q-map factor lambda = {:.6}", u.u11);
    if let Some(r) = regime {
        println!("regime {} (trace {:.6})", r.regime, r.gamma_trace);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn shadow(
    out: &mut Outputs,
    source: &Source,
    interval: Option<Range>,
    spec: &PacketSpec,
    w: f64,
    samples: usize,
    step: f64,
) -> Outcome {
    let (profile, default_interval) = load_source(source)?;
    let Range(t0, t1) = interval.unwrap_or(default_interval);
    let step = step_control(step)?;
    let family = propagate_dense(&profile, t0, t1, samples, step)?;
    let pks = packets(spec)?;
    for (k, pk) in pks.iter().enumerate() {
        let band = ShadowBand::from_family(&family, pk, w)?;
        let name = if pks.len() == 1 { "shadow.csv".to_string() } else { format!("shadow_{k}.csv") };
        write_shadow_csv(&band, out.create(&name)?)?;
        let widest = band.widest().expect("band has samples");
        println!(
            "packet q0={} p0={}: max |q| + w dq = {:.6}, widest dq = {:.6} at tau = {:.6}",
            pk.q0,
            pk.p0,
            band.max_extent(),
            widest.dq,
            widest.tau
        );
    }
    Ok(())
}

fn units(out: &mut Outputs, context: Option<&Path>, direction: Direction, values: Range) -> Outcome {
    let ctx = match context {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let ctx: PhysicalContext =
                serde_json::from_str(&text).with_context(|| format!("parsing context {}", path.display()))?;
            ctx.validate()?;
            ctx
        }
        None => PhysicalContext::proton_radio_example(),
    };
    let result = match direction {
        Direction::ToVoltages => {
            let drive = required_voltages(&ctx, MathieuParams::new(values.0, values.1))?;
            println!("phi0 = {:.6} V, phi1 = {:.6} V", drive.phi0, drive.phi1);
            json!({"beta0": values.0, "beta1": values.1, "phi0_volts": drive.phi0, "phi1_volts": drive.phi1})
        }
        Direction::ToParams => {
            let p = trap_to_dimensionless(&ctx, TrapDrive { phi0: values.0, phi1: values.1 })?;
            println!("beta0 = {:.6}, beta1 = {:.6}", p.beta0, p.beta1);
            json!({"phi0_volts": values.0, "phi1_volts": values.1, "beta0": p.beta0, "beta1": p.beta1})
        }
    };
    out.json(
        "units.json",
        &json!({
            "context": ctx,
            "energy_scale_ev": ctx.energy_scale_ev(),
            "volts_per_unit_beta": ctx.volts_per_unit_beta(),
            "result": result,
        }),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

