use std::fs::{self, File};
use std::io::BufWriter;

use misobc_core::capacity::{
    ratio_json, ratio_sweep, write_ratio_csv, EstimatorTag, PowerGrid, RatioRow,
};
use misobc_core::format::{json_num, sig};
use misobc_core::regions::{gap_sweep_with, write_vertices_csv, THEOREM_GAP_BITS};
use misobc_core::scheme::{run_scheme, write_dump};
use misobc_core::{
    achievable_region, c21, c22d, corner_points, ergodic_wyner_rate, outer_region,
    rd_reverse_waterfill, rd_suboptimal, sweep, Corners, Error, GainDistribution, RateRegion,
    SamplingConfig, SchemeConfig, SchemeSummary,
};
use serde_json::{json, Value};

use crate::args::{
    CapacityArgs, Common, GapArgs, NumList, Powers, Quantity, RdArgs, RdMode, RegionArgs, RqArgs,
    SimulateArgs,
};
use crate::report::{emit, write_flat_csv, RunConfig};
use crate::Failure;

fn sampling(common: &Common) -> SamplingConfig {
    SamplingConfig::new(common.samples, common.seed).with_workers(common.workers)
}

fn resolve_grid(powers: &Powers) -> Result<PowerGrid, Error> {
    if let Some(grid) = &powers.grid {
        return Ok(grid.clone());
    }
    if powers.power.is_empty() {
        return Ok(PowerGrid::default());
    }
    PowerGrid::new(powers.power.clone())
        .map_err(|e| Error::Usage(format!("--power values must be increasing and nonnegative: {e}")))
}

pub fn capacity(args: &CapacityArgs) -> Result<(), Failure> {
    let grid = resolve_grid(&args.powers)?;
    let tag = match args.quantity {
        Quantity::C21 => EstimatorTag::C21,
        Quantity::C22d => EstimatorTag::C22d { distortion: args.distortion },
        Quantity::Rq => EstimatorTag::Rq { distortion: args.distortion },
    };
    let table = sweep(tag, &grid, &sampling(&args.common))?;
    let mut config = RunConfig::new("capacity", &args.common);
    config.set("quantity", tag.name());
    if args.quantity != Quantity::C21 {
        config.set_num("distortion", args.distortion);
    }
    config.set_nums("power", grid.points());
    emit(&args.common, &config, |w| table.write_csv(w), "rows", || table.to_json())
}

pub fn rq(args: &RqArgs) -> Result<(), Failure> {
    let grid = resolve_grid(&args.powers)?;
    let rows = ratio_sweep(args.distortion, &grid, &sampling(&args.common))?;
    let mut config = RunConfig::new("rq", &args.common);
    config
        .set_num("distortion", args.distortion)
        .set("assert_le_one", args.assert_le_one)
        .set_nums("power", grid.points());
    emit(&args.common, &config, |w| write_ratio_csv(&rows, w), "rows", || ratio_json(&rows))?;
    if args.assert_le_one {
        let bad: Vec<&RatioRow> = rows.iter().filter(|r| !r.within_unit_bound(3.0)).collect();
        if !bad.is_empty() {
            let list: Vec<String> = bad
                .iter()
                .map(|r| format!("P = {} (ratio {} ± {})", sig(r.power), sig(r.ratio), sig(r.ratio_stderr)))
                .collect();
            return Err(Failure::Assertion(format!(
                "R_Q({})/C21 exceeds 1 + 3 stderr at {}",
                sig(args.distortion),
                list.join(", ")
            )));
        }
    }
    Ok(())
}

fn corners_json(c: &Corners) -> Value {
    let p = |q: &misobc_core::RatePair| json!([json_num(q.r1), json_num(q.r2)]);
    json!({"A": p(&c.a), "B": p(&c.b), "C": p(&c.c), "collapsed": c.collapsed})
}

fn vertices_json(region: &RateRegion) -> Value {
    region.vertices().iter().map(|v| json!([json_num(v.r1), json_num(v.r2)])).collect()
}

fn write_corners_csv<W: std::io::Write>(c: &Corners, mut w: W) -> std::io::Result<()> {
    writeln!(w, "label,R1,R2")?;
    for (label, p) in [("A", c.a), ("B", c.b), ("C", c.c)] {
        writeln!(w, "{label},{},{}", sig(p.r1), sig(p.r2))?;
    }
    Ok(())
}

pub fn region(args: &RegionArgs) -> Result<(), Failure> {
    let mut config = RunConfig::new("region", &args.common);
    config.set_num("distortion", args.distortion);
    if let Some(p) = args.power {
        config.set_num("power", p);
    }
    let mc = sampling(&args.common);
    let estimate = |which: &str| -> Result<f64, Error> {
        let p = args
            .power
            .ok_or_else(|| Error::Usage(format!("--power is required to estimate {which}")))?;
        let est = match which {
            "c21" => c21(p, &mc)?,
            _ => c22d(p, args.distortion, &mc)?,
        };
        Ok(est.value)
    };
    let c21_value = match args.c21 {
        Some(v) => v,
        None => estimate("c21")?,
    };
    let c22d_value = match args.c22d {
        Some(v) => v,
        None => estimate("c22d")?,
    };
    config.set_num("c21", c21_value).set_num("c22d", c22d_value);

    let outer = outer_region(c21_value)?;
    let achievable = achievable_region(c21_value, c22d_value)?;
    let corners = corner_points(&achievable);

    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
        let files: [(&str, &RateRegion); 2] = [("outer_vertices.csv", &outer), ("achievable_vertices.csv", &achievable)];
        for (name, region) in files {
            let mut f = BufWriter::new(File::create(dir.join(name))?);
            config.write_comment(&mut f)?;
            write_vertices_csv(region, &mut f)?;
        }
        let mut f = BufWriter::new(File::create(dir.join("corners.csv"))?);
        config.write_comment(&mut f)?;
        write_corners_csv(&corners, &mut f)?;
        config.set("out_dir", dir.display().to_string());
    }

    let csv = |w: &mut Vec<u8>| -> misobc_core::Result<()> {
        use std::io::Write;
        writeln!(w, "region,point,R1,R2")?;
        for (name, region) in [("outer", &outer), ("achievable", &achievable)] {
            for (i, v) in region.vertices().iter().enumerate() {
                writeln!(w, "{name},{i},{},{}", sig(v.r1), sig(v.r2))?;
            }
        }
        for (label, p) in [("A", corners.a), ("B", corners.b), ("C", corners.c)] {
            writeln!(w, "corner,{label},{},{}", sig(p.r1), sig(p.r2))?;
        }
        Ok(())
    };
    let json = || {
        json!({
            "outer": vertices_json(&outer),
            "achievable": vertices_json(&achievable),
            "corners": corners_json(&corners),
        })
    };
    emit(&args.common, &config, csv, "region", json)
}

pub fn gap(args: &GapArgs) -> Result<(), Failure> {
    let grid = resolve_grid(&args.powers)?;
    let report = gap_sweep_with(args.distortion, &grid, &sampling(&args.common), args.allow_any_distortion)?;
    let mut config = RunConfig::new("gap", &args.common);
    config
        .set_num("distortion", args.distortion)
        .set("assert_theorem", args.assert_theorem)
        .set("allow_any_distortion", args.allow_any_distortion)
        .set_nums("power", grid.points());
    if let Some(max) = report.max_record() {
        config.set("max_tau", json!({"P": json_num(max.power), "tau": json_num(max.tau), "tau_stderr": json_num(max.tau_stderr)}));
    }
    emit(&args.common, &config, |w| report.write_csv(w), "rows", || report.to_json())?;
    if args.assert_theorem {
        let bad = report.violations(THEOREM_GAP_BITS, 3.0);
        if !bad.is_empty() {
            let list: Vec<String> = bad
                .iter()
                .map(|r| format!("P = {} (tau {} ± {})", sig(r.power), sig(r.tau), sig(r.tau_stderr)))
                .collect();
            return Err(Failure::Assertion(format!(
                "per-user gap exceeds {THEOREM_GAP_BITS} + 3 stderr at {}",
                list.join(", ")
            )));
        }
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let cfg = SchemeConfig {
        n: args.n,
        power: args.power,
        distortion: args.distortion,
        epsilon: args.epsilon,
        delta: args.delta,
        seed: args.common.seed,
        reference_samples: args.common.samples,
    };
    let transcript = run_scheme(&cfg)?;
    let summary = SchemeSummary::from_transcript(&transcript)?;
    if let Some(path) = &args.dump {
        write_dump(BufWriter::new(File::create(path)?), &transcript)?;
    }
    let mut config = RunConfig::new("simulate", &args.common);
    config
        .set("n", args.n)
        .set_num("power", args.power)
        .set_num("distortion", args.distortion)
        .set_num("epsilon", args.epsilon)
        .set_num("delta", args.delta)
        .set("assert_stats", args.assert_stats);
    if let Some(path) = &args.dump {
        config.set("dump", path.display().to_string());
    }
    let body = summary.to_json();
    emit(
        &args.common,
        &config,
        |w| write_flat_csv(&body, w).map_err(Error::from),
        "summary",
        || body.clone(),
    )?;
    if args.assert_stats {
        let failures = summary.check_invariants();
        if !failures.is_empty() {
            return Err(Failure::Assertion(failures.join("; ")));
        }
    }
    Ok(())
}

fn gain_of(args: &RdArgs) -> Result<GainDistribution, Error> {
    let pair = |v: &NumList, what: &str| -> Result<(f64, f64), Error> {
        match v.0[..] {
            [a, b] => Ok((a, b)),
            _ => Err(Error::Usage(format!("{what} takes two comma-separated values"))),
        }
    };
    if let Some(value) = args.gain_const {
        return Ok(GainDistribution::Constant { value });
    }
    if let Some(v) = &args.gain_uniform {
        let (low, high) = pair(v, "--gain-uniform")?;
        return Ok(GainDistribution::Uniform { low, high });
    }
    if let Some(v) = &args.gain_normal {
        let (mean, std) = pair(v, "--gain-normal")?;
        return Ok(GainDistribution::Normal { mean, std });
    }
    if let Some(scale) = args.gain_rayleigh {
        return Ok(GainDistribution::Rayleigh { scale });
    }
    Err(Error::Usage("wyner mode needs one of --gain-const, --gain-uniform, --gain-normal, --gain-rayleigh".into()))
}

pub fn rd(args: &RdArgs) -> Result<(), Failure> {
    let mut config = RunConfig::new("rd", &args.common);
    config.set("mode", format!("{:?}", args.mode).to_lowercase()).set_num("budget", args.budget);
    let (rate, stderr) = match args.mode {
        RdMode::Waterfill | RdMode::Suboptimal => {
            let variances = match (&args.sigma2, args.const_sigma2) {
                (Some(v), _) => v.0.clone(),
                (None, Some(s)) => vec![s],
                (None, None) => {
                    return Err(Error::Usage("give --const-sigma2 or --sigma2".into()).into());
                }
            };
            config.set_nums("sigma2", &variances);
            let rate = if args.mode == RdMode::Waterfill {
                rd_reverse_waterfill(&variances, args.budget)?
            } else {
                rd_suboptimal(&variances, args.budget)?
            };
            (rate, 0.0)
        }
        RdMode::Wyner => {
            let gain = gain_of(args)?;
            config
                .set_num("sigx2", args.sigx2)
                .set_num("sigu2", args.sigu2)
                .set("gain", serde_json::to_value(gain).map_err(Error::from)?);
            let est = ergodic_wyner_rate(args.sigx2, args.sigu2, args.budget, &gain, &sampling(&args.common))?;
            (est.value, est.stderr)
        }
    };
    let csv = |w: &mut Vec<u8>| -> misobc_core::Result<()> {
        use std::io::Write;
        writeln!(w, "rate,stderr")?;
        writeln!(w, "{},{}", sig(rate), sig(stderr))?;
        Ok(())
    };
    emit(&args.common, &config, csv, "result", || json!({"rate": json_num(rate), "stderr": json_num(stderr)}))
}
