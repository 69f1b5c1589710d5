use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finance::FinanceTerms;
use crate::linalg::Mat3;
use crate::problem::{
    validate_problem, DayField, DfgCandidate, EssCandidate, HouseField, HouseProfile, HvacMode, PlanningProblem,
    RepresentativeDay, ResCandidate, ResKind, Subject, ThermalModel, Violation,
};

pub const CONFIG_FILE: &str = "scenario.toml";
pub const CONFIG_SCHEMA: &str = "mgplan-scenario/1";
pub const SERIES_SCHEMA_LINE: &str = "#schema=mgplan-timeseries/1";

/// Where in a scenario something went wrong. `line` is 1-based within `file`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Location {
    pub file: String,
    pub line: Option<usize>,
    pub column: Option<String>,
}

impl Location {
    fn file(file: &str) -> Self {
        Self {
            file: file.to_string(),
            line: None,
            column: None,
        }
    }

    fn at(file: &str, line: usize, column: Option<&str>) -> Self {
        Self {
            file: file.to_string(),
            line: Some(line),
            column: column.map(str::to_string),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(line) = self.line {
            write!(f, ", row {line}")?;
        }
        if let Some(col) = &self.column {
            write!(f, ", column {col}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocatedViolation {
    pub location: Location,
    pub violation: Violation,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.location, self.violation.kind, self.violation.detail)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{}: file not found", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{location}: {message}")]
    Schema { location: Location, message: String },
    #[error("scenario is invalid:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<LocatedViolation>),
}

impl ScenarioError {
    fn schema(location: Location, message: impl Into<String>) -> Self {
        ScenarioError::Schema {
            location,
            message: message.into(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    schema: String,
    pcc_limit_kw: f64,
    budget: f64,
    pi1: f64,
    pi2: f64,
    mip_rel_gap: f64,
    finance: FinanceTerms,
    days: Vec<DayEntry>,
    houses: Vec<HouseEntry>,
    #[serde(default)]
    res: Vec<ResEntry>,
    #[serde(default)]
    dfg: Vec<DfgCandidate>,
    #[serde(default)]
    ess: Vec<EssCandidate>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DayEntry {
    label: String,
    file: String,
    hvac_mode: HvacMode,
    month_group: u32,
    weight_days: f64,
    months_represented: f64,
    dt_hours: f64,
    demand_charge_per_kw: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HouseEntry {
    a_matrix: Mat3,
    b_matrix: Mat3,
    hvac_rated_power_kw: f64,
    cop: f64,
    discomfort_cost_per_degc: f64,
    shed_penalty_per_kwh: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_state_c: Option<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResEntry {
    name: String,
    kind: ResKind,
    p_max_kw: f64,
    capital_cost_per_kw: f64,
    count_limit: u32,
}

const FIXED_COLUMNS: [&str; 4] = ["interval", "ambient_c", "irradiance_wm2", "price_per_kwh"];

fn house_column(field: HouseField, house: usize) -> String {
    let prefix = match field {
        HouseField::NonHvacLoad => "load_kw",
        HouseField::MaxShed => "shed_max_kw",
        HouseField::DesiredTemp => "t_desired_c",
        HouseField::Band => "band_c",
    };
    format!("{prefix}_h{house}")
}

const HOUSE_FIELDS: [HouseField; 4] = [
    HouseField::NonHvacLoad,
    HouseField::MaxShed,
    HouseField::DesiredTemp,
    HouseField::Band,
];

fn res_column(name: &str) -> String {
    format!("cf_{name}")
}

fn series_columns(houses: usize, res_names: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    for field in HOUSE_FIELDS {
        cols.extend((0..houses).map(|h| house_column(field, h)));
    }
    cols.extend(res_names.iter().map(|n| res_column(n)));
    cols
}

/// Data row `t` sits on this 1-based line: schema marker, header, then rows.
fn line_of(t: usize) -> usize {
    t + 3
}

fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    if s.is_empty() {
        "day".into()
    } else {
        s
    }
}

/// The text of every file in a scenario, keyed by path relative to the scenario root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioFileSet {
    pub files: BTreeMap<String, String>,
}

impl ScenarioFileSet {
    /// Serializes `problem`. The result parses back to an identical problem.
    pub fn from_problem(problem: &PlanningProblem) -> Self {
        let day_files: Vec<String> = problem
            .days
            .iter()
            .enumerate()
            .map(|(d, day)| format!("days/{d:02}-{}.csv", slug(&day.label)))
            .collect();
        let config = ConfigFile {
            schema: CONFIG_SCHEMA.into(),
            pcc_limit_kw: problem.pcc_limit_kw,
            budget: problem.budget,
            pi1: problem.pi1,
            pi2: problem.pi2,
            mip_rel_gap: problem.mip_rel_gap,
            finance: problem.finance,
            days: problem
                .days
                .iter()
                .zip(&day_files)
                .map(|(d, file)| DayEntry {
                    label: d.label.clone(),
                    file: file.clone(),
                    hvac_mode: d.hvac_mode,
                    month_group: d.month_group,
                    weight_days: d.weight_days,
                    months_represented: d.months_represented,
                    dt_hours: d.dt_hours,
                    demand_charge_per_kw: d.demand_charge_per_kw,
                })
                .collect(),
            houses: problem
                .houses
                .iter()
                .map(|h| HouseEntry {
                    a_matrix: h.thermal.a_matrix,
                    b_matrix: h.thermal.b_matrix,
                    hvac_rated_power_kw: h.thermal.hvac_rated_power_kw,
                    cop: h.thermal.cop,
                    discomfort_cost_per_degc: h.thermal.discomfort_cost_per_degc,
                    shed_penalty_per_kwh: h.shed_penalty_per_kwh,
                    initial_state_c: h.initial_state_c,
                })
                .collect(),
            res: problem
                .res
                .iter()
                .map(|r| ResEntry {
                    name: r.name.clone(),
                    kind: r.kind,
                    p_max_kw: r.p_max_kw,
                    capital_cost_per_kw: r.capital_cost_per_kw,
                    count_limit: r.count_limit,
                })
                .collect(),
            dfg: problem.dfg.clone(),
            ess: problem.ess.clone(),
        };
        let mut files = BTreeMap::new();
        files.insert(
            CONFIG_FILE.to_string(),
            toml::to_string(&config).expect("scenario config serializes"),
        );
        let res_names: Vec<&str> = problem.res.iter().map(|r| r.name.as_str()).collect();
        let header = series_columns(problem.houses.len(), &res_names);
        for (d, (day, file)) in problem.days.iter().zip(&day_files).enumerate() {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for t in 0..day.interval_count {
                let mut row = vec![
                    t.to_string(),
                    day.ambient_temp_c[t].to_string(),
                    day.irradiance_wm2[t].to_string(),
                    day.pcc_price_per_kwh[t].to_string(),
                ];
                for field in HOUSE_FIELDS {
                    for h in &problem.houses {
                        let v = match field {
                            HouseField::NonHvacLoad => h.non_hvac_load_kw[d][t],
                            HouseField::MaxShed => h.max_shed_kw[d][t],
                            HouseField::DesiredTemp => h.thermal.desired_temp_c[d][t],
                            HouseField::Band => h.thermal.band_halfwidth_c[d][t],
                        };
                        row.push(v.to_string());
                    }
                }
                for r in &problem.res {
                    row.push(r.capacity_factor[d][t].to_string());
                }
                w.write_record(&row).expect("in-memory write");
            }
            let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8");
            files.insert(file.clone(), format!("{SERIES_SCHEMA_LINE}\n{body}"));
        }
        Self { files }
    }

    /// Parses and validates the file set.
    pub fn to_problem(&self) -> Result<PlanningProblem, ScenarioError> {
        parse(|path| {
            self.files
                .get(path)
                .cloned()
                .ok_or_else(|| ScenarioError::MissingFile(PathBuf::from(path)))
        })
    }

    pub fn write_to(&self, root: &Path) -> Result<(), ScenarioError> {
        for (rel, text) in &self.files {
            let path = root.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|source| ScenarioError::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(&path, text).map_err(|source| ScenarioError::Io { path, source })?;
        }
        Ok(())
    }

    /// Reads the config in `root` and every day file it references.
    pub fn read_from(root: &Path) -> Result<Self, ScenarioError> {
        let read = |rel: &str| -> Result<String, ScenarioError> {
            let path = root.join(rel);
            std::fs::read_to_string(&path).map_err(|source| {
                if source.kind() == std::io::ErrorKind::NotFound {
                    ScenarioError::MissingFile(path)
                } else {
                    ScenarioError::Io { path, source }
                }
            })
        };
        let config_text = read(CONFIG_FILE)?;
        let config = parse_config(&config_text)?;
        let mut files = BTreeMap::new();
        for day in &config.days {
            files.insert(day.file.clone(), read(&day.file)?);
        }
        files.insert(CONFIG_FILE.to_string(), config_text);
        Ok(Self { files })
    }
}

/// Loads and validates the scenario rooted at `root`.
pub fn load_scenario(root: &Path) -> Result<PlanningProblem, ScenarioError> {
    ScenarioFileSet::read_from(root)?.to_problem()
}

/// Writes `problem` as a scenario under `root`, creating directories as needed.
pub fn save_scenario(problem: &PlanningProblem, root: &Path) -> Result<ScenarioFileSet, ScenarioError> {
    let set = ScenarioFileSet::from_problem(problem);
    set.write_to(root)?;
    Ok(set)
}

fn parse_config(text: &str) -> Result<ConfigFile, ScenarioError> {
    let config: ConfigFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start].lines().count().max(1));
        ScenarioError::schema(
            Location {
                file: CONFIG_FILE.into(),
                line,
                column: None,
            },
            e.message().to_string(),
        )
    })?;
    if config.schema != CONFIG_SCHEMA {
        return Err(ScenarioError::schema(
            Location::file(CONFIG_FILE),
            format!("unsupported schema {:?}, expected {CONFIG_SCHEMA:?}", config.schema),
        ));
    }
    let mut names = std::collections::HashSet::new();
    for r in &config.res {
        if r.name.is_empty() || r.name.contains(|c: char| c == ',' || c.is_whitespace()) {
            return Err(ScenarioError::schema(
                Location::file(CONFIG_FILE),
                format!("renewable name {:?} cannot be used as a column suffix", r.name),
            ));
        }
        if !names.insert(r.name.as_str()) {
            return Err(ScenarioError::schema(
                Location::file(CONFIG_FILE),
                format!("duplicate renewable name {:?}", r.name),
            ));
        }
    }
    Ok(config)
}

struct DayTable {
    ambient: Vec<f64>,
    irradiance: Vec<f64>,
    price: Vec<f64>,
    /// `house[field][h][t]`
    house: Vec<Vec<Vec<f64>>>,
    /// `res[candidate][t]`
    res: Vec<Vec<f64>>,
}

fn parse_day(file: &str, text: &str, houses: usize, res_names: &[&str]) -> Result<DayTable, ScenarioError> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    if first.trim_end_matches('\r') != SERIES_SCHEMA_LINE {
        return Err(ScenarioError::schema(
            Location::at(file, 1, None),
            format!("expected schema line {SERIES_SCHEMA_LINE:?}"),
        ));
    }
    let expected = series_columns(houses, res_names);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(rest.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| ScenarioError::schema(Location::at(file, 2, None), e.to_string()))?
        .clone();
    for (i, want) in expected.iter().enumerate() {
        match header.get(i) {
            Some(got) if got.trim() == want => {}
            Some(got) => {
                return Err(ScenarioError::schema(
                    Location::at(file, 2, Some(want)),
                    format!("column {} is {got:?}, expected {want:?}", i + 1),
                ))
            }
            None => {
                return Err(ScenarioError::schema(
                    Location::at(file, 2, Some(want)),
                    format!("missing column {want:?}"),
                ))
            }
        }
    }
    if header.len() > expected.len() {
        return Err(ScenarioError::schema(
            Location::at(file, 2, header.get(expected.len())),
            format!("unexpected extra column; expected {} columns", expected.len()),
        ));
    }

    let mut table = DayTable {
        ambient: Vec::new(),
        irradiance: Vec::new(),
        price: Vec::new(),
        house: vec![vec![Vec::new(); houses]; HOUSE_FIELDS.len()],
        res: vec![Vec::new(); res_names.len()],
    };
    for (t, record) in reader.records().enumerate() {
        let line = line_of(t);
        let record = record.map_err(|e| ScenarioError::schema(Location::at(file, line, None), e.to_string()))?;
        if record.len() != expected.len() {
            return Err(ScenarioError::schema(
                Location::at(file, line, expected.get(record.len()).map(String::as_str)),
                format!("row has {} fields, expected {}", record.len(), expected.len()),
            ));
        }
        let value = |i: usize| -> Result<f64, ScenarioError> {
            let raw = record[i].trim();
            raw.parse::<f64>().map_err(|_| {
                ScenarioError::schema(
                    Location::at(file, line, Some(&expected[i])),
                    format!("{raw:?} is not a number"),
                )
            })
        };
        let interval: usize = record[0].trim().parse().map_err(|_| {
            ScenarioError::schema(Location::at(file, line, Some("interval")), "interval is not an integer")
        })?;
        if interval != t {
            return Err(ScenarioError::schema(
                Location::at(file, line, Some("interval")),
                format!("interval {interval} out of sequence, expected {t}"),
            ));
        }
        table.ambient.push(value(1)?);
        table.irradiance.push(value(2)?);
        table.price.push(value(3)?);
        let mut col = FIXED_COLUMNS.len();
        for field in 0..HOUSE_FIELDS.len() {
            for h in 0..houses {
                table.house[field][h].push(value(col)?);
                col += 1;
            }
        }
        for r in 0..res_names.len() {
            table.res[r].push(value(col)?);
            col += 1;
        }
    }
    if table.ambient.is_empty() {
        return Err(ScenarioError::schema(Location::at(file, 3, None), "no data rows"));
    }
    Ok(table)
}

fn parse(read: impl Fn(&str) -> Result<String, ScenarioError>) -> Result<PlanningProblem, ScenarioError> {
    let config = parse_config(&read(CONFIG_FILE)?)?;
    let res_names: Vec<&str> = config.res.iter().map(|r| r.name.as_str()).collect();
    let houses = config.houses.len();
    let mut tables = Vec::with_capacity(config.days.len());
    for day in &config.days {
        tables.push(parse_day(&day.file, &read(&day.file)?, houses, &res_names)?);
    }

    let days: Vec<RepresentativeDay> = config
        .days
        .iter()
        .zip(&tables)
        .map(|(e, t)| RepresentativeDay {
            label: e.label.clone(),
            hvac_mode: e.hvac_mode,
            month_group: e.month_group,
            weight_days: e.weight_days,
            months_represented: e.months_represented,
            interval_count: t.ambient.len(),
            dt_hours: e.dt_hours,
            ambient_temp_c: t.ambient.clone(),
            irradiance_wm2: t.irradiance.clone(),
            pcc_price_per_kwh: t.price.clone(),
            demand_charge_per_kw: e.demand_charge_per_kw,
        })
        .collect();
    let per_day = |field: usize, h: usize| -> Vec<Vec<f64>> { tables.iter().map(|t| t.house[field][h].clone()).collect() };
    let house_list = config
        .houses
        .iter()
        .enumerate()
        .map(|(h, e)| HouseProfile {
            thermal: ThermalModel {
                a_matrix: e.a_matrix,
                b_matrix: e.b_matrix,
                hvac_rated_power_kw: e.hvac_rated_power_kw,
                cop: e.cop,
                desired_temp_c: per_day(2, h),
                band_halfwidth_c: per_day(3, h),
                discomfort_cost_per_degc: e.discomfort_cost_per_degc,
            },
            non_hvac_load_kw: per_day(0, h),
            max_shed_kw: per_day(1, h),
            shed_penalty_per_kwh: e.shed_penalty_per_kwh,
            initial_state_c: e.initial_state_c,
        })
        .collect();
    let res = config
        .res
        .iter()
        .enumerate()
        .map(|(r, e)| ResCandidate {
            name: e.name.clone(),
            kind: e.kind,
            p_max_kw: e.p_max_kw,
            capacity_factor: tables.iter().map(|t| t.res[r].clone()).collect(),
            capital_cost_per_kw: e.capital_cost_per_kw,
            count_limit: e.count_limit,
        })
        .collect();

    let problem = PlanningProblem {
        houses: house_list,
        dfg: config.dfg,
        res,
        ess: config.ess,
        days,
        pcc_limit_kw: config.pcc_limit_kw,
        budget: config.budget,
        finance: config.finance,
        pi1: config.pi1,
        pi2: config.pi2,
        mip_rel_gap: config.mip_rel_gap,
    };
    let violations = validate_problem(&problem);
    if !violations.is_empty() {
        let day_files: Vec<&str> = config.days.iter().map(|d| d.file.as_str()).collect();
        let located = violations
            .into_iter()
            .map(|v| LocatedViolation {
                location: locate(&v.subject, &day_files, &res_names),
                violation: v,
            })
            .collect();
        return Err(ScenarioError::Validation(located));
    }
    Ok(problem)
}

fn locate(subject: &Subject, day_files: &[&str], res_names: &[&str]) -> Location {
    let in_day = |day: usize, interval: Option<usize>, column: Option<String>| match day_files.get(day) {
        Some(file) => Location {
            file: file.to_string(),
            line: interval.map(line_of),
            column,
        },
        None => Location::file(CONFIG_FILE),
    };
    let config_key = |key: String| Location {
        file: CONFIG_FILE.into(),
        line: None,
        column: Some(key),
    };
    match *subject {
        Subject::Problem => Location::file(CONFIG_FILE),
        Subject::Finance => config_key("finance".into()),
        Subject::House { house } => config_key(format!("houses[{house}]")),
        Subject::Dfg { candidate } => config_key(format!("dfg[{candidate}]")),
        Subject::Res { candidate } => config_key(format!("res[{candidate}]")),
        Subject::Ess { candidate } => config_key(format!("ess[{candidate}]")),
        Subject::HouseSeries {
            house,
            day,
            interval,
            field,
        } => in_day(day, interval, Some(house_column(field, house))),
        Subject::Day { day, interval, field } => match field {
            DayField::Meta => config_key(format!("days[{day}]")),
            DayField::Length => in_day(day, None, None),
            DayField::Ambient => in_day(day, interval, Some("ambient_c".into())),
            DayField::Irradiance => in_day(day, interval, Some("irradiance_wm2".into())),
            DayField::Price => in_day(day, interval, Some("price_per_kwh".into())),
        },
        Subject::ResSeries {
            candidate,
            day,
            interval,
        } => in_day(day, interval, res_names.get(candidate).map(|n| res_column(n))),
    }
}
