//! Forward map from permittivity to scattered frequency, and its inverse.

use crate::closed_form::{
    paper_beta, paper_energy_shift, paper_scattered_amplitude, scattered_frequency,
    InitialCoefficients,
};
use crate::dipole::{derive_image, positive, DielectricSample, TipDipole};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_pair_delta_h, build_pair_h0, perturbative_guard, RegimeWarning};
use crate::perturbation::rs_pt2;

/// Which energy shift feeds `omega_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForwardPath {
    /// the published closed form
    #[default]
    Paper,
    /// second-order shift from the perturbation engine
    Oracle,
}

impl std::str::FromStr for ForwardPath {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" => Ok(ForwardPath::Paper),
            "oracle" => Ok(ForwardPath::Oracle),
            other => Err(format!(
                "unknown forward path '{other}' (expected paper|oracle)"
            )),
        }
    }
}

impl std::fmt::Display for ForwardPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ForwardPath::Paper => "paper",
            ForwardPath::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardResult {
    pub alpha: f64,
    pub g: f64,
    pub delta_e: f64,
    pub omega_s: f64,
    /// unnormalized `|1>` amplitude from the closed form, ground-state start
    pub amplitude: f64,
    pub warnings: Vec<RegimeWarning>,
}

/// Second-order ground-state shift of the dipole pair from the engine.
/// The photon register is a spectator, so the 4-level block is enough.
pub fn oracle_ground_shift(omega: f64, alpha: f64, g: f64) -> Result<f64> {
    let tip = TipDipole::new(omega, 1.0)?;
    let image = crate::dipole::image_from_alpha(&tip, alpha)?;
    let pt2 = rs_pt2(&build_pair_h0(&tip, &image), &build_pair_delta_h(g), 0)?;
    Ok(pt2.e2)
}

/// Ground-state forward model on the closed-form path.
pub fn forward(epsilon_d: f64, r: f64, omega: f64, kappa: f64) -> Result<ForwardResult> {
    forward_with(ForwardPath::Paper, epsilon_d, r, omega, kappa)
}

pub fn forward_with(
    path: ForwardPath,
    epsilon_d: f64,
    r: f64,
    omega: f64,
    kappa: f64,
) -> Result<ForwardResult> {
    let sample = DielectricSample::new(epsilon_d)?;
    let tip = TipDipole::new(omega, r)?;
    positive("kappa", kappa)?;
    let alpha = sample.alpha();
    let g = kappa * alpha / tip.separation().powi(3);

    let delta_e = match path {
        ForwardPath::Paper => paper_energy_shift(1.0, r, alpha, omega, kappa)?,
        ForwardPath::Oracle => oracle_ground_shift(omega, alpha, g)?,
    };
    let omega_s = scattered_frequency(omega, delta_e)?;
    let beta = paper_beta(&InitialCoefficients::ground(), r, alpha, omega, kappa)?;

    let image = derive_image(&tip, &sample)?;
    let v = build_pair_delta_h(g);
    let warnings = perturbative_guard(&build_pair_h0(&tip, &image), &v, g)
        .into_iter()
        .collect();

    Ok(ForwardResult {
        alpha,
        g,
        delta_e,
        omega_s,
        amplitude: paper_scattered_amplitude(&beta),
        warnings,
    })
}

/// Recover `epsilon_d` from an observed `omega_s` at known `R`, `Omega`, `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionProblem {
    pub observed_omega_s: f64,
    pub r: f64,
    pub omega: f64,
    pub kappa: f64,
    /// `(eps_lo, eps_hi)`
    pub bracket: (f64, f64),
    /// on `|omega_s(eps) - observed| / Omega`
    pub tol_rel: f64,
    pub max_iter: usize,
    pub path: ForwardPath,
}

pub const DEFAULT_BRACKET: (f64, f64) = (1.0 + 1e-9, 1e6);

impl InversionProblem {
    pub fn new(observed_omega_s: f64, r: f64, omega: f64, kappa: f64) -> Self {
        Self {
            observed_omega_s,
            r,
            omega,
            kappa,
            bracket: DEFAULT_BRACKET,
            tol_rel: 1e-10,
            max_iter: 200,
            path: ForwardPath::Paper,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("R", self.r)?;
        positive("omega", self.omega)?;
        positive("kappa", self.kappa)?;
        positive("tol_rel", self.tol_rel)?;
        if !self.observed_omega_s.is_finite() {
            return Err(Error::InvalidParameter {
                field: "observed_omega_s",
                value: self.observed_omega_s,
                reason: "must be finite",
            });
        }
        let (lo, hi) = self.bracket;
        if !lo.is_finite() || lo <= 1.0 {
            return Err(Error::InvalidParameter {
                field: "bracket_lo",
                value: lo,
                reason: "must be finite and > 1",
            });
        }
        if !hi.is_finite() || hi <= lo {
            return Err(Error::InvalidParameter {
                field: "bracket_hi",
                value: hi,
                reason: "must be finite and > bracket_lo",
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                field: "max_iter",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(())
    }

    fn omega_s(&self, epsilon_d: f64) -> Result<f64> {
        Ok(forward_with(self.path, epsilon_d, self.r, self.omega, self.kappa)?.omega_s)
    }

    /// `[omega_s(eps_hi), omega_s(eps_lo)]`, the values the bracket can produce.
    pub fn attainable_range(&self) -> Result<(f64, f64)> {
        Ok((self.omega_s(self.bracket.1)?, self.omega_s(self.bracket.0)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub epsilon_d: f64,
    pub iterations: usize,
    /// `|omega_s(eps) - observed| / Omega`
    pub residual: f64,
}

/// Brent's method on `omega_s(eps) - observed`. The forward map is strictly
/// decreasing in `eps`, so a root inside the bracket is unique.
pub fn invert_permittivity(p: &InversionProblem) -> Result<Inversion> {
    p.validate()?;
    let (lowest, highest) = p.attainable_range()?;
    if !(p.observed_omega_s >= lowest && p.observed_omega_s <= highest) {
        return Err(Error::OutOfBracket {
            observed: p.observed_omega_s,
            lowest,
            highest,
        });
    }
    let f = |eps: f64| -> Result<f64> { Ok(p.omega_s(eps)? - p.observed_omega_s) };
    let done = |eps: f64, fx: f64, iterations: usize| Inversion {
        epsilon_d: eps,
        iterations,
        residual: fx.abs() / p.omega,
    };

    let (mut a, mut b) = p.bracket;
    let (mut fa, mut fb) = (highest - p.observed_omega_s, lowest - p.observed_omega_s);
    if fa == 0.0 {
        return Ok(done(a, fa, 0));
    }
    if fb == 0.0 {
        return Ok(done(b, fb, 0));
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=p.max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs();
        let xm = 0.5 * (c - b);
        if fb == 0.0 || (xm.abs() <= tol1 && fb.abs() / p.omega < p.tol_rel) {
            return Ok(done(b, fb, iter - 1));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, secant when only two points are distinct
            let s = fb / fa;
            let (mut num, mut den) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if num > 0.0 {
                den = -den;
            }
            num = num.abs();
            let min1 = 3.0 * xm * den - (tol1 * den).abs();
            let min2 = (e * den).abs();
            if 2.0 * num < min1.min(min2) {
                e = d;
                d = num / den;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    let residual = fb.abs() / p.omega;
    if residual < p.tol_rel {
        return Ok(done(b, fb, p.max_iter));
    }
    Err(Error::NoConvergence {
        iterations: p.max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_vacuum() {
        let out = forward(1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(out.delta_e, 0.0);
        assert_eq!(out.omega_s, 1.0);
        assert_eq!(out.amplitude, 1.0);
    }

    #[test]
    fn forward_worked_point() {
        let out = forward(3.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(out.alpha, 0.5);
        assert!((out.delta_e + 0.2).abs() < 1e-15);
        assert!((out.omega_s - 0.8).abs() < 1e-15);
        assert!((out.amplitude - 0.92).abs() < 1e-15);
        // g = 0.5 is far outside the perturbative window
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn forward_metal_limit() {
        let (r, omega, kappa) = (0.5, 1.0, 1.0);
        let out = forward(1e8, r, omega, kappa).unwrap();
        let limit = -kappa * kappa / ((2.0 * r).powi(3) * 2.0 * omega);
        assert!((out.delta_e - limit).abs() < 1e-7);
    }

    #[test]
    fn forward_errors() {
        assert_eq!(
            forward(0.5, 1.0, 1.0, 1.0).unwrap_err(),
            Error::UnsupportedPermittivity(0.5)
        );
        // kappa = 10 gives dE = -20 eV
        assert!(matches!(
            forward(3.0, 0.5, 1.0, 10.0),
            Err(Error::ShiftExceedsGap { .. })
        ));
    }

    #[test]
    fn oracle_path_matches_engine() {
        let out = forward_with(ForwardPath::Oracle, 3.0, 1.0, 1.0, 0.05).unwrap();
        let g: f64 = 0.003125;
        assert!((out.delta_e + g * g / 1.25).abs() < 1e-18);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn round_trip() {
        for eps in [1.5, 2.0, 4.0, 11.7, 80.0] {
            for (r, kappa) in [(0.5, 1.0), (1.0, 0.05)] {
                let obs = forward(eps, r, 1.0, kappa).unwrap().omega_s;
                let inv = invert_permittivity(&InversionProblem::new(obs, r, 1.0, kappa)).unwrap();
                assert!(
                    ((inv.epsilon_d - eps) / eps).abs() < 1e-6,
                    "{eps} -> {inv:?}"
                );
                assert!(inv.residual < 1e-10);
                assert!(inv.iterations <= 200);
            }
        }
    }

    #[test]
    fn round_trip_oracle_path() {
        let obs = forward_with(ForwardPath::Oracle, 4.0, 1.0, 1.0, 0.05)
            .unwrap()
            .omega_s;
        let mut p = InversionProblem::new(obs, 1.0, 1.0, 0.05);
        p.path = ForwardPath::Oracle;
        let inv = invert_permittivity(&p).unwrap();
        assert!(((inv.epsilon_d - 4.0) / 4.0).abs() < 1e-6);
    }

    #[test]
    fn vacuum_observation_returns_lower_bracket() {
        let inv = invert_permittivity(&InversionProblem::new(1.0, 0.5, 1.0, 1.0)).unwrap();
        assert!((inv.epsilon_d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn out_of_bracket() {
        let err = invert_permittivity(&InversionProblem::new(1.01, 0.5, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::OutOfBracket { highest, .. } if highest == 1.0));
        let err = invert_permittivity(&InversionProblem::new(0.1, 0.5, 1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::OutOfBracket { .. }));
    }

    #[test]
    fn iteration_cap() {
        let obs = forward(4.0, 0.5, 1.0, 1.0).unwrap().omega_s;
        let mut p = InversionProblem::new(obs, 0.5, 1.0, 1.0);
        p.max_iter = 2;
        p.tol_rel = 1e-15;
        assert!(matches!(
            invert_permittivity(&p),
            Err(Error::NoConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn problem_validation() {
        let mut p = InversionProblem::new(0.9, 0.5, 1.0, 1.0);
        p.tol_rel = 0.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter {
                field: "tol_rel",
                ..
            })
        ));
        let mut p = InversionProblem::new(0.9, 0.5, 1.0, 1.0);
        p.bracket = (1.0, 10.0);
        assert!(p.validate().is_err());
        p.bracket = (5.0, 2.0);
        assert!(p.validate().is_err());
    }
}
