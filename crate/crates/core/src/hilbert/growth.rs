use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The user-chosen function `F: ℤ⁺ → ℝ⁺` of the strong structure theorems,
/// trading the complexity `M` of the structured part against the
/// pseudorandomness `1/F(M)` of the remainder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFunction {
    /// `F(M) = slope·M + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// `F(M) = 2^M`.
    Exponential,
    /// `F(M) = ε^{-1/4}·2^M`, the choice made for arithmetic regularity.
    ArithmeticRegularity { eps: f64 },
    /// `F(M) = values[M-1]` for `M <= values.len()`, extended beyond the
    /// table by `extension`.
    Table {
        values: Vec<f64>,
        extension: TableExtension,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableExtension {
    /// `F(M) = 2·F(M-1)` past the table.
    Doubling,
    /// `F(M) = F(M-1) + (last step of the table)` past the table.
    LastStep,
}

impl GrowthFunction {
    pub fn linear(c: f64) -> Self {
        GrowthFunction::Affine {
            slope: c,
            intercept: 0.0,
        }
    }

    /// `F(M)` without the `F(M) > M` check. May be `+∞` on overflow.
    pub fn raw(&self, m: u64) -> f64 {
        let mf = m as f64;
        match self {
            GrowthFunction::Affine { slope, intercept } => slope * mf + intercept,
            GrowthFunction::Exponential => 2f64.powf(mf),
            GrowthFunction::ArithmeticRegularity { eps } => eps.powf(-0.25) * 2f64.powf(mf),
            GrowthFunction::Table { values, extension } => {
                let idx = m.max(1) as usize - 1;
                if idx < values.len() {
                    return values[idx];
                }
                let last = *values.last().unwrap_or(&1.0);
                let extra = (idx + 1 - values.len()) as f64;
                match extension {
                    TableExtension::Doubling => last * 2f64.powf(extra),
                    TableExtension::LastStep => {
                        let step = match values.len() {
                            0 | 1 => 1.0,
                            k => values[k - 1] - values[k - 2],
                        };
                        last + step * extra
                    }
                }
            }
        }
    }

    /// `F(M)`, enforcing `F(M) > M`.
    pub fn eval(&self, m: u64) -> Result<f64> {
        let v = self.raw(m);
        if v.is_nan() || v <= m as f64 {
            return Err(Error::GrowthViolation { m, value: v });
        }
        Ok(v)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            GrowthFunction::ArithmeticRegularity { eps } if !(*eps > 0.0 && *eps <= 1.0) => {
                Err(Error::param(format!("arithmetic preset eps = {eps}")))
            }
            GrowthFunction::Table { values, .. } if values.is_empty() => {
                Err(Error::param("empty growth table"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::Affine { slope, intercept } => write!(f, "affine:{slope},{intercept}"),
            GrowthFunction::Exponential => write!(f, "exp"),
            GrowthFunction::ArithmeticRegularity { eps } => write!(f, "arith:{eps}"),
            GrowthFunction::Table { values, extension } => {
                let v: Vec<String> = values.iter().map(|x| x.to_string()).collect();
                let ext = match extension {
                    TableExtension::Doubling => "double",
                    TableExtension::LastStep => "step",
                };
                write!(f, "table-{ext}:{}", v.join(","))
            }
        }
    }
}

/// Parses `linear:C`, `affine:A,B`, `exp`, `arith:EPS`, `table:V1,V2,...`
/// (doubling extension) or `table-step:V1,V2,...`.
impl FromStr for GrowthFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            arg.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("growth argument {x:?}: {e}")))
                })
                .collect()
        };
        let g = match name {
            "exp" | "exponential" => GrowthFunction::Exponential,
            "linear" => GrowthFunction::linear(one(nums()?)?),
            "affine" => match nums()?.as_slice() {
                [a, b] => GrowthFunction::Affine {
                    slope: *a,
                    intercept: *b,
                },
                _ => return Err(Error::Parse("affine needs two numbers".into())),
            },
            "arith" => GrowthFunction::ArithmeticRegularity { eps: one(nums()?)? },
            "table" | "table-double" => GrowthFunction::Table {
                values: nums()?,
                extension: TableExtension::Doubling,
            },
            "table-step" => GrowthFunction::Table {
                values: nums()?,
                extension: TableExtension::LastStep,
            },
            other => return Err(Error::Parse(format!("unknown growth preset {other:?}"))),
        };
        g.validate()?;
        Ok(g)
    }
}

fn one(v: Vec<f64>) -> Result<f64> {
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::Parse("expected one number".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        assert_eq!(GrowthFunction::linear(2.0).eval(3).unwrap(), 6.0);
        assert_eq!(GrowthFunction::Exponential.eval(5).unwrap(), 32.0);
        let a = GrowthFunction::ArithmeticRegularity { eps: 1.0 / 16.0 };
        assert!((a.eval(3).unwrap() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn violation_is_reported() {
        let g = GrowthFunction::Affine {
            slope: 1.0,
            intercept: 0.0,
        };
        assert!(matches!(
            g.eval(4),
            Err(Error::GrowthViolation { m: 4, .. })
        ));
    }

    #[test]
    fn table_extensions() {
        let t: GrowthFunction = "table:3,10".parse().unwrap();
        assert_eq!(t.eval(1).unwrap(), 3.0);
        assert_eq!(t.eval(2).unwrap(), 10.0);
        assert_eq!(t.eval(4).unwrap(), 40.0);
        let s: GrowthFunction = "table-step:3,10".parse().unwrap();
        assert_eq!(s.eval(4).unwrap(), 24.0);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["exp", "affine:2,1", "arith:0.25", "table-double:2,5"] {
            let g: GrowthFunction = s.parse().unwrap();
            let again: GrowthFunction = g.to_string().parse().unwrap();
            assert_eq!(g, again);
        }
        assert!("bogus".parse::<GrowthFunction>().is_err());
    }
}
