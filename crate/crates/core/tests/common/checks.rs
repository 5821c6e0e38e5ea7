//! Named error-versus-tolerance checks, aggregated per suite.

use torus_harmonic::arbprec::BigReal;

#[derive(Debug)]
pub struct Check {
    pub name: String,
    pub err: BigReal,
    pub tol: BigReal,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.err.is_finite() && self.err <= self.tol
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<40} err {:>12.3e}  tol {:>12.3e}  {}",
            self.name,
            self.err.to_f64(),
            self.tol.to_f64(),
            if self.pass() { "ok" } else { "FAIL" }
        )
    }
}

/// Running worst ratio `err / tol` for one named check.
pub struct Worst {
    name: String,
    err: Option<BigReal>,
    tol: Option<BigReal>,
}

impl Worst {
    pub fn new(name: &str) -> Self {
        Worst {
            name: name.to_string(),
            err: None,
            tol: None,
        }
    }

    pub fn record(&mut self, err: BigReal, tol: BigReal) {
        let worse = match (&self.err, &self.tol) {
            (Some(e), Some(t)) => (&err / &tol) > (e / t) || !err.is_finite(),
            _ => true,
        };
        if worse {
            self.err = Some(err);
            self.tol = Some(tol);
        }
    }

    pub fn finish(self) -> Check {
        Check {
            name: self.name,
            err: self.err.expect("no samples recorded"),
            tol: self.tol.expect("no samples recorded"),
        }
    }
}
