//! Price loading, log returns and rank-based quantile discretization.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Default number of discrete states (quartiles).
pub const DEFAULT_BINS: usize = 4;

/// Daily closing prices of one ticker.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries {
    pub ticker: String,
    pub timestamps: Vec<NaiveDate>,
    pub prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(ticker: impl Into<String>, timestamps: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        let ticker = ticker.into();
        if prices.len() != timestamps.len() {
            return Err(Error::invalid(format!(
                "`{ticker}`: {} prices for {} timestamps",
                prices.len(),
                timestamps.len()
            )));
        }
        if prices.len() < 2 {
            return Err(Error::invalid(format!("`{ticker}`: need at least 2 prices")));
        }
        if let Some(p) = prices.iter().find(|p| !p.is_finite() || **p <= 0.0) {
            return Err(Error::invalid(format!("`{ticker}`: non-positive price {p}")));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("`{ticker}`: timestamps not strictly increasing")));
        }
        Ok(Self {
            ticker,
            timestamps,
            prices,
        })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Log returns `r_t = ln(p_t / p_{t-1})` of one ticker.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    pub ticker: String,
    pub returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(ticker: impl Into<String>, returns: Vec<f64>) -> Self {
        Self {
            ticker: ticker.into(),
            returns,
        }
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

/// Returns mapped onto `bins` rank-balanced states `0..bins`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteSeries {
    pub ticker: String,
    pub states: Vec<u8>,
    pub bins: usize,
}

impl DiscreteSeries {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of observations per state.
    pub fn occupancy(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bins];
        for &s in &self.states {
            counts[s as usize] += 1;
        }
        counts
    }
}

/// Ticker to sector label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SectorMap {
    sectors: BTreeMap<String, String>,
}

impl SectorMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ticker: impl Into<String>, sector: impl Into<String>) -> Option<String> {
        self.sectors.insert(ticker.into(), sector.into())
    }

    pub fn get(&self, ticker: &str) -> Option<&str> {
        self.sectors.get(ticker).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.sectors.iter().map(|(t, s)| (t.as_str(), s.as_str()))
    }

    /// Fails if any of `tickers` lacks a sector.
    pub fn require_all<'a>(&self, tickers: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for t in tickers {
            if !self.sectors.contains_key(t) {
                return Err(Error::MissingSector(t.to_string()));
            }
        }
        Ok(())
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for SectorMap {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut map = Self::new();
        for (k, v) in iter {
            map.insert(k, v);
        }
        map
    }
}

/// Why a ticker column was dropped during loading.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclusion {
    pub ticker: String,
    /// 1-based data row of the first offending cell (header is row 0).
    pub row: usize,
    pub reason: String,
}

/// Result of [`load_prices`]: complete tickers plus what was excluded.
#[derive(Clone, Debug, Default)]
pub struct PriceLoad {
    pub series: Vec<PriceSeries>,
    pub exclusions: Vec<Exclusion>,
}

/// Reads a wide price CSV (`date,<TICKER1>,<TICKER2>,...`).
pub fn load_prices(path: impl AsRef<Path>) -> Result<PriceLoad> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_prices(&text)
}

/// Parses the price CSV format from an in-memory string.
///
/// Tickers with a blank, non-positive or non-finite cell are excluded rather than
/// failing the whole load. Structural problems (ragged rows, bad dates,
/// unparseable numbers) are parse errors.
pub fn parse_prices(text: &str) -> Result<PriceLoad> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(0, e))?,
        None => {
            return Err(Error::Parse {
                row: 0,
                column: 0,
                message: "empty file".into(),
            })
        }
    };
    if header.len() < 2 {
        return Err(Error::Parse {
            row: 0,
            column: header.len(),
            message: "header must be `date,<TICKER>,...`".into(),
        });
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    for (i, t) in tickers.iter().enumerate() {
        if t.is_empty() {
            return Err(Error::Parse {
                row: 0,
                column: i + 1,
                message: "empty ticker name".into(),
            });
        }
        if tickers[..i].contains(t) {
            return Err(Error::Parse {
                row: 0,
                column: i + 1,
                message: format!("duplicate ticker `{t}`"),
            });
        }
    }

    let mut dates = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); tickers.len()];
    let mut excluded: Vec<Option<Exclusion>> = vec![None; tickers.len()];

    for (idx, record) in records.enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| csv_error(row, e))?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: record.len().min(header.len()),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| Error::Parse {
            row,
            column: 0,
            message: format!("bad date `{}`: {e}", &record[0]),
        })?;
        if let Some(&prev) = dates.last() {
            if date <= prev {
                return Err(Error::Parse {
                    row,
                    column: 0,
                    message: format!("date {date} does not follow {prev}"),
                });
            }
        }
        dates.push(date);

        for (col, cell) in record.iter().skip(1).enumerate() {
            if excluded[col].is_some() {
                continue;
            }
            if cell.is_empty() {
                excluded[col] = Some(Exclusion {
                    ticker: tickers[col].clone(),
                    row,
                    reason: "missing price".into(),
                });
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: col + 1,
                message: format!("not a number: `{cell}`"),
            })?;
            if !value.is_finite() || value <= 0.0 {
                excluded[col] = Some(Exclusion {
                    ticker: tickers[col].clone(),
                    row,
                    reason: format!("non-positive price {value}"),
                });
                continue;
            }
            columns[col].push(value);
        }
    }

    if dates.len() < 2 {
        return Err(Error::Parse {
            row: dates.len(),
            column: 0,
            message: "need at least 2 data rows".into(),
        });
    }

    let mut load = PriceLoad::default();
    for ((ticker, prices), exclusion) in tickers.into_iter().zip(columns).zip(excluded) {
        match exclusion {
            Some(e) => load.exclusions.push(e),
            None => load.series.push(PriceSeries {
                ticker,
                timestamps: dates.clone(),
                prices,
            }),
        }
    }
    Ok(load)
}

fn csv_error(row: usize, e: csv::Error) -> Error {
    Error::Parse {
        row,
        column: 0,
        message: e.to_string(),
    }
}

/// Reads a `ticker,sector` CSV.
pub fn load_sectors(path: impl AsRef<Path>) -> Result<SectorMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sectors(&text)
}

pub fn parse_sectors(text: &str) -> Result<SectorMap> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| csv_error(0, e))?.clone();
    if headers.len() != 2 || &headers[0] != "ticker" || &headers[1] != "sector" {
        return Err(Error::Parse {
            row: 0,
            column: 0,
            message: "header must be `ticker,sector`".into(),
        });
    }
    let mut map = SectorMap::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| csv_error(row, e))?;
        if record[0].is_empty() || record[1].is_empty() {
            return Err(Error::Parse {
                row,
                column: if record[0].is_empty() { 0 } else { 1 },
                message: "empty field".into(),
            });
        }
        if map.insert(&record[0], &record[1]).is_some() {
            return Err(Error::Parse {
                row,
                column: 0,
                message: format!("ticker `{}` listed twice", &record[0]),
            });
        }
    }
    Ok(map)
}

/// `r_t = ln(p_{t+1} / p_t)`, one element shorter than the prices.
pub fn log_returns(series: &PriceSeries) -> Result<ReturnSeries> {
    if series.prices.len() < 2 {
        return Err(Error::invalid(format!(
            "`{}`: need at least 2 prices for a return",
            series.ticker
        )));
    }
    let returns = series.prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    Ok(ReturnSeries::new(series.ticker.clone(), returns))
}

/// Maps returns onto `bins` equal-occupancy states by rank.
///
/// Rank `r` (0-based, ties broken by earlier time index first) goes to state
/// `floor(r * bins / len)`, so state counts differ by at most one.
pub fn discretize_quartiles(series: &ReturnSeries, bins: usize) -> Result<DiscreteSeries> {
    if !(2..=u8::MAX as usize + 1).contains(&bins) {
        return Err(Error::invalid(format!("bins must be in 2..=256, got {bins}")));
    }
    let n = series.returns.len();
    if n < bins {
        return Err(Error::invalid(format!(
            "`{}`: {n} returns cannot fill {bins} bins",
            series.ticker
        )));
    }
    if series.returns.iter().any(|r| r.is_nan()) {
        return Err(Error::invalid(format!("`{}`: NaN return", series.ticker)));
    }
    let first = series.returns[0];
    if series.returns.iter().all(|&r| r == first) {
        return Err(Error::ZeroInformation {
            ticker: series.ticker.clone(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps time order among equal values
    order.sort_by(|&a, &b| series.returns[a].total_cmp(&series.returns[b]));
    let mut states = vec![0u8; n];
    for (rank, &t) in order.iter().enumerate() {
        states[t] = (rank * bins / n) as u8;
    }
    Ok(DiscreteSeries {
        ticker: series.ticker.clone(),
        states,
        bins,
    })
}

/// Writes aligned columns in the wide layout: `date,<TICKER>,...`.
///
/// `dates` labels the rows; for returns this is the input dates minus the first.
pub fn write_columns<W: Write, T: std::fmt::Display>(
    mut out: W,
    dates: &[NaiveDate],
    tickers: &[&str],
    columns: &[&[T]],
) -> std::io::Result<()> {
    write!(out, "date")?;
    for t in tickers {
        write!(out, ",{t}")?;
    }
    writeln!(out)?;
    for (row, date) in dates.iter().enumerate() {
        write!(out, "{}", date.format("%Y-%m-%d"))?;
        for col in columns {
            write!(out, ",{}", col[row])?;
        }
        writeln!(out)?;
    }
    Ok(())
}
