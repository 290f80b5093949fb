use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// `u = (sin^2(pi x) sin(2 pi y), -sin(2 pi x) sin^2(pi y))`,
    /// `p = cos(pi x) cos(pi y)`.
    TaylorGreen,
    /// Stream function `x^2 (1-x)^2 y^2 (1-y)^2`, `p = x - 1/2`.
    Polynomial,
    /// `f = 0`: the solution is identically zero.
    Zero,
}

impl CaseId {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::TaylorGreen => "taylor_green",
            CaseId::Polynomial => "polynomial",
            CaseId::Zero => "zero",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor_green" => Ok(CaseId::TaylorGreen),
            "polynomial" => Ok(CaseId::Polynomial),
            "zero" => Ok(CaseId::Zero),
            other => Err(Error::InvalidArgument(format!(
                "unknown case `{other}` (expected taylor_green, polynomial or zero)"
            ))),
        }
    }
}

type Scalar2 = fn(f64, f64) -> f64;

/// Closed-form velocity, pressure and the forcing `f = -lap u + grad p`.
#[derive(Clone, Copy, Debug)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub u: Scalar2,
    pub v: Scalar2,
    pub p: Scalar2,
    pub fx: Scalar2,
    pub fy: Scalar2,
}

pub fn manufactured_case(id: CaseId) -> ManufacturedCase {
    match id {
        CaseId::TaylorGreen => ManufacturedCase {
            id,
            u: tg_u,
            v: tg_v,
            p: tg_p,
            fx: tg_fx,
            fy: tg_fy,
        },
        CaseId::Polynomial => ManufacturedCase {
            id,
            u: poly_u,
            v: poly_v,
            p: poly_p,
            fx: poly_fx,
            fy: poly_fy,
        },
        CaseId::Zero => ManufacturedCase {
            id,
            u: zero,
            v: zero,
            p: zero,
            fx: zero,
            fy: zero,
        },
    }
}

fn zero(_: f64, _: f64) -> f64 {
    0.0
}

fn tg_u(x: f64, y: f64) -> f64 {
    (PI * x).sin().powi(2) * (2.0 * PI * y).sin()
}

fn tg_v(x: f64, y: f64) -> f64 {
    -(2.0 * PI * x).sin() * (PI * y).sin().powi(2)
}

fn tg_p(x: f64, y: f64) -> f64 {
    (PI * x).cos() * (PI * y).cos()
}

// -lap u = 2 pi^2 sin(2 pi y) (1 - 2 cos(2 pi x)),  p_x = -pi sin(pi x) cos(pi y)
fn tg_fx(x: f64, y: f64) -> f64 {
    2.0 * PI * PI * (2.0 * PI * y).sin() * (1.0 - 2.0 * (2.0 * PI * x).cos())
        - PI * (PI * x).sin() * (PI * y).cos()
}

// -lap v = 2 pi^2 sin(2 pi x) (2 cos(2 pi y) - 1),  p_y = -pi cos(pi x) sin(pi y)
fn tg_fy(x: f64, y: f64) -> f64 {
    2.0 * PI * PI * (2.0 * PI * x).sin() * (2.0 * (2.0 * PI * y).cos() - 1.0)
        - PI * (PI * x).cos() * (PI * y).sin()
}

// phi(s) = s^2 (1 - s)^2 and its derivatives
fn phi(s: f64) -> f64 {
    s * s * (1.0 - s) * (1.0 - s)
}

fn phi1(s: f64) -> f64 {
    2.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
}

fn phi2(s: f64) -> f64 {
    2.0 - 12.0 * s + 12.0 * s * s
}

fn phi3(s: f64) -> f64 {
    -12.0 + 24.0 * s
}

fn poly_u(x: f64, y: f64) -> f64 {
    phi(x) * phi1(y)
}

fn poly_v(x: f64, y: f64) -> f64 {
    -phi1(x) * phi(y)
}

fn poly_p(x: f64, _y: f64) -> f64 {
    x - 0.5
}

// -lap u = -(phi''(x) phi'(y) + phi(x) phi'''(y)),  p_x = 1
fn poly_fx(x: f64, y: f64) -> f64 {
    -(phi2(x) * phi1(y) + phi(x) * phi3(y)) + 1.0
}

// -lap v = phi'''(x) phi(y) + phi'(x) phi''(y),  p_y = 0
fn poly_fy(x: f64, y: f64) -> f64 {
    phi3(x) * phi(y) + phi1(x) * phi2(y)
}
