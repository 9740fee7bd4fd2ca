use qpc_core::analytics::{format_percent, success_probability, success_probability_exact, to_f64, PMuTable};
use qpc_core::bm::Apparatus;
use qpc_core::chain::{
    chain_success_with, cost_with, optimize_with, perfect_bm_cost_ratio, rate_curve, resource_count,
    source_vacuum_threshold, ChainConfig, ChainResult, SearchSpace,
};
use qpc_core::CodeParams;
use serde_json::{json, Value};

use crate::args::ApparatusArg;
use crate::output::{num, Report};
use crate::presets;
use crate::settings::{Eta, Settings};
use crate::CliError;

impl From<ApparatusArg> for Apparatus {
    fn from(a: ApparatusArg) -> Self {
        match a {
            ApparatusArg::Linear => Apparatus::LinearOptics,
            ApparatusArg::Perfect => Apparatus::Perfect,
        }
    }
}

fn apparatus_name(a: Apparatus) -> &'static str {
    match a {
        Apparatus::LinearOptics => "linear",
        Apparatus::Perfect => "perfect",
    }
}

fn code_list(codes: &[CodeParams]) -> Value {
    Value::Array(codes.iter().map(|c| json!([c.n(), c.m()])).collect())
}

fn base_config(s: &Settings, distance_km: f64, spacing_km: f64) -> Result<ChainConfig, CliError> {
    Ok(ChainConfig::new(distance_km, spacing_km)?
        .with_attenuation_km(s.atten_km)?
        .with_eta_missing(s.eta_missing)?
        .with_eta_source(s.eta_source)?)
}

fn single_spacing(s: &Settings) -> Result<f64, CliError> {
    match s.spacings_km.as_slice() {
        [x] => Ok(*x),
        [] => Err(CliError::Input("--spacing-km is required".into())),
        _ => Err(CliError::Input("exactly one --spacing-km is expected".into())),
    }
}

pub fn bm_prob(s: &Settings, paper_table_1: bool, apparatus: Apparatus) -> Result<Report, CliError> {
    let (codes, etas) = if paper_table_1 {
        let etas = presets::TABLE_1_ETAS.iter().map(|t| Eta::parse(t)).collect::<Result<Vec<_>, _>>()?;
        (presets::table_1_codes(), etas)
    } else {
        (s.codes.clone(), s.etas.clone())
    };
    let mut header = vec!["n".to_string(), "m".to_string()];
    header.extend(etas.iter().map(|e| format!("eta={}", e.text)));
    let mut report = Report::new(
        "bm-prob",
        json!({
            "codes": code_list(&codes),
            "eta": etas.iter().map(|e| e.text.clone()).collect::<Vec<_>>(),
            "apparatus": apparatus_name(apparatus),
        }),
        &[],
    );
    report.header = header;
    for code in codes {
        let mut row = vec![code.n().to_string(), code.m().to_string()];
        let mut values = Vec::new();
        for eta in &etas {
            let exact = success_probability_exact(apparatus, code, &eta.exact)?;
            row.push(format_percent(&exact));
            values.push(json!({
                "eta": eta.value,
                "p": success_probability(apparatus, code, eta.value)?,
                "p_exact": exact.to_string(),
                "percent_2dp": format_percent(&exact),
            }));
        }
        report.push(row, json!({"n": code.n(), "m": code.m(), "values": values}));
    }
    Ok(report)
}

pub fn pmu_table(s: &Settings, paper_table_s1: bool) -> Result<Report, CliError> {
    let codes = if paper_table_s1 { presets::table_s1_codes() } else { s.codes.clone() };
    let widest = codes.iter().map(|c| c.max_loss()).max();
    let mut report = Report::new("pmu-table", json!({"codes": code_list(&codes)}), &[]);
    report.header = vec!["n".into(), "m".into()];
    if let Some(widest) = widest {
        report.header.extend((0..=widest).map(|mu| format!("mu={mu}")));
    }
    for code in codes {
        let table = PMuTable::compute(code);
        let mut row = vec![code.n().to_string(), code.m().to_string()];
        row.extend(table.values.iter().map(format_percent));
        row.resize(report.header.len(), String::new());
        let result = json!({
            "n": code.n(),
            "m": code.m(),
            "max_loss": code.max_loss(),
            "p_mu": table.values.iter().map(to_f64).collect::<Vec<_>>(),
            "p_mu_exact": table.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        });
        report.push(row, result);
    }
    Ok(report)
}

fn chain_row(r: &ChainResult) -> Vec<String> {
    vec![
        r.code.n().to_string(),
        r.code.m().to_string(),
        format!("{:.6}", r.spacing_km),
        num(r.success_per_timestep),
        format!("{:.2}", 100.0 * r.success_per_timestep),
        num(r.cost),
    ]
}

fn chain_json(r: &ChainResult) -> Value {
    json!({
        "n": r.code.n(),
        "m": r.code.m(),
        "spacing_km": r.spacing_km,
        "rate": r.success_per_timestep,
        "cost": r.cost,
        "stations": r.stations,
    })
}

const CHAIN_HEADER: [&str; 6] = ["n", "m", "spacing_km", "rate", "rate_pct", "cost"];

pub fn rate(s: &Settings, apparatus: Apparatus) -> Result<Report, CliError> {
    let distance = s.require_distance()?;
    let spacing = single_spacing(s)?;
    let cfg = base_config(s, distance, spacing)?;
    let mut inputs = s.chain_inputs();
    inputs["codes"] = code_list(&s.codes);
    inputs["spacing_km"] = json!(spacing);
    inputs["apparatus"] = json!(apparatus_name(apparatus));
    let mut report = Report::new("rate", inputs, &CHAIN_HEADER);
    for &code in &s.codes {
        let rate = chain_success_with(apparatus, code, &cfg)?;
        let cost = if rate > 0.0 { cost_with(apparatus, code, &cfg)? } else { f64::INFINITY };
        let result = ChainResult {
            code,
            spacing_km: spacing,
            success_per_timestep: rate,
            cost,
            stations: cfg.stations(),
        };
        let mut json = chain_json(&result);
        if !cost.is_finite() {
            json["cost"] = Value::Null;
        }
        report.push(chain_row(&result), json);
    }
    Ok(report)
}

pub fn curve(s: &Settings, paper_fig3: bool, min: f64, max: f64, step: f64) -> Result<Report, CliError> {
    let (codes, distance) = if paper_fig3 {
        (presets::fig3_codes(), s.distance_km.unwrap_or(presets::FIG3_DISTANCE_KM))
    } else {
        (s.codes.clone(), s.require_distance()?)
    };
    let spacings = if !s.spacings_km.is_empty() {
        s.spacings_km.clone()
    } else {
        if !(min > 0.0 && min <= max && step > 0.0) {
            return Err(CliError::Input(format!("bad spacing grid {min}..{max} step {step}")));
        }
        let count = ((max - min) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| min + step * i as f64).collect()
    };
    let base = base_config(s, distance, spacings[0].min(distance))?;
    let points = rate_curve(&codes, distance, &spacings, &base)?;
    let mut inputs = s.chain_inputs();
    inputs["distance_km"] = json!(distance);
    inputs["codes"] = code_list(&codes);
    inputs["spacing_km"] = json!(spacings);
    let mut report = Report::new("curve", inputs, &["n", "m", "spacing_km", "rate"]);
    for p in points {
        report.push(
            vec![p.code.n().to_string(), p.code.m().to_string(), num(p.spacing_km), num(p.success_per_timestep)],
            json!({"n": p.code.n(), "m": p.code.m(), "spacing_km": p.spacing_km, "rate": p.success_per_timestep}),
        );
    }
    Ok(report)
}

pub struct OptimizeRequest {
    pub space: SearchSpace,
    pub top: usize,
    pub apparatus: Apparatus,
    pub compare_perfect: bool,
}

pub fn optimize(s: &Settings, req: &OptimizeRequest) -> Result<Report, CliError> {
    let distance = s.require_distance()?;
    let base = base_config(s, distance, (*req.space.spacing_km.end()).min(distance))?;
    let optimum = optimize_with(req.apparatus, distance, &req.space, &base)?;
    let mut inputs = s.chain_inputs();
    inputs["n_range"] = json!([req.space.n.start(), req.space.n.end()]);
    inputs["m_range"] = json!([req.space.m.start(), req.space.m.end()]);
    inputs["spacing_range_km"] = json!([req.space.spacing_km.start(), req.space.spacing_km.end()]);
    inputs["apparatus"] = json!(apparatus_name(req.apparatus));
    let mut header = vec!["rank"];
    header.extend(CHAIN_HEADER);
    let mut report = Report::new("optimize", inputs, &header);
    let mut ranked = Vec::new();
    for (i, r) in optimum.ranked.iter().take(req.top).enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(chain_row(r));
        report.rows.push(row);
        ranked.push(chain_json(r));
    }
    let mut results = json!({
        "best": chain_json(&optimum.best),
        "ranked": ranked,
        "on_boundary": optimum.on_boundary,
    });
    if req.compare_perfect {
        let cmp = perfect_bm_cost_ratio(distance, &req.space, &base)?;
        results["perfect"] = chain_json(&cmp.perfect);
        results["cost_ratio"] = json!(cmp.ratio);
        report.header.push("cost_ratio_vs_perfect".into());
        for row in &mut report.rows {
            row.push(num(cmp.ratio));
        }
    }
    report.results = results;
    Ok(report)
}

pub fn resources(s: &Settings, sources: u32, target_rate: Option<f64>) -> Result<Report, CliError> {
    let mut inputs = s.chain_inputs();
    inputs["codes"] = code_list(&s.codes);
    inputs["sources"] = json!(sources);
    inputs["target_rate"] = json!(target_rate);
    let threshold_cfg = match target_rate {
        Some(_) => Some(base_config(s, s.require_distance()?, single_spacing(s)?)?),
        None => None,
    };
    let mut report = Report::new(
        "resources",
        inputs,
        &["n", "m", "dopplers", "multiplexed_source_success", "vacuum_threshold"],
    );
    for &code in &s.codes {
        let res = resource_count(code, sources, s.eta_source)?;
        let threshold = match (&threshold_cfg, target_rate) {
            (Some(cfg), Some(target)) => Some(source_vacuum_threshold(code, cfg, target)?),
            _ => None,
        };
        report.push(
            vec![
                code.n().to_string(),
                code.m().to_string(),
                res.dopplers.to_string(),
                format!("{:.4}", res.multiplexed_source_success),
                threshold.map(num).unwrap_or_default(),
            ],
            json!({
                "n": code.n(),
                "m": code.m(),
                "dopplers": res.dopplers,
                "multiplexed_source_success": res.multiplexed_source_success,
                "vacuum_threshold": threshold,
            }),
        );
    }
    Ok(report)
}
