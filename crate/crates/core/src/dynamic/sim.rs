use std::io::Write;
use std::time::{Duration, Instant};

use crate::dynamic::energy::{control_law, energy_rate, separation};
use crate::dynamic::system::SquaredOperator;
use crate::dynamic::DynamicSystem;
use crate::error::{Error, Result};
use crate::mep::{anneal, harden, relax, xlogx, AssociationMatrix};

#[derive(Clone, Debug)]
pub struct SimRecord {
    pub t: f64,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub energy: f64,
    /// `dF/dt` with the associations held fixed.
    pub fdot: f64,
    pub alpha: f64,
    pub norm_u2: f64,
    pub assignment: Vec<usize>,
    /// Sum of `w_e^2` over edges crossing the hardened partition.
    pub cut_sq: f64,
    /// The control law hit its `||u|| -> 0` floor with `alpha > 0`.
    pub clamped: bool,
    pub associations: AssociationMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimStatus {
    Completed,
    /// A step produced a non-finite state; records stop at the last valid one.
    Aborted { t: f64, reason: String },
}

#[derive(Clone, Debug)]
pub struct SimTrace {
    pub records: Vec<SimRecord>,
    /// Wall time spent in the partition solver only (anneals and refreshes).
    pub solver_time: Duration,
    pub full_solves: usize,
    pub refresh_sweeps: usize,
    pub warnings: Vec<String>,
    pub status: SimStatus,
}

impl SimTrace {
    fn new() -> Self {
        SimTrace {
            records: Vec::new(),
            solver_time: Duration::ZERO,
            full_solves: 0,
            refresh_sweeps: 0,
            warnings: Vec::new(),
            status: SimStatus::Completed,
        }
    }
}

/// Per-edge view of the dynamics with the associations frozen.
struct Frozen<'a> {
    sys: &'a DynamicSystem,
    phi: Vec<f64>,
    controlled: bool,
}

struct Rates {
    wdot: Vec<f64>,
    udot: Vec<f64>,
    alpha: f64,
    clamped: bool,
}

impl<'a> Frozen<'a> {
    fn new(sys: &'a DynamicSystem, p: &AssociationMatrix, controlled: bool) -> Self {
        let phi = sys.edges.iter().map(|&(l, m)| separation(p, l, m)).collect();
        Frozen { sys, phi, controlled }
    }

    fn rates(&self, w: &[f64], u: &[f64]) -> Result<Rates> {
        let sys = self.sys;
        let wdot: Vec<f64> = (0..w.len())
            .map(|e| sys.a_diag[e] * w[e] + sys.b_diag[e] * u[e])
            .collect();
        // each undirected edge appears twice in the symmetric matrix
        let alpha = 4.0
            * (0..w.len())
                .map(|e| self.phi[e] * w[e] * wdot[e])
                .sum::<f64>();
        if !self.controlled {
            return Ok(Rates {
                wdot,
                udot: vec![0.0; u.len()],
                alpha,
                clamped: false,
            });
        }
        let upd = control_law(u, alpha, sys.mu, sys.c0, sys.eps)?;
        let udot = upd
            .udot
            .iter()
            .zip(&sys.b_diag)
            .map(|(&d, &b)| if b == 0.0 { 0.0 } else { d })
            .collect();
        Ok(Rates {
            wdot,
            udot,
            alpha,
            clamped: upd.clamped,
        })
    }

    /// `F = sum_e w_e^2 phi_e + 1/beta sum p ln p + mu ||u||^2`.
    fn energy(&self, p: &AssociationMatrix, w: &[f64], u: &[f64]) -> f64 {
        let l1: f64 = (0..w.len()).map(|e| w[e] * w[e] * self.phi[e]).sum();
        let neg_entropy: f64 = p.values().iter().map(|&x| xlogx(x)).sum();
        l1 + neg_entropy / self.sys.beta_track + self.sys.mu * u.iter().map(|x| x * x).sum::<f64>()
    }

    fn rk4(&self, w: &[f64], u: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let shift = |x: &[f64], dx: &[f64], c: f64| -> Vec<f64> {
            x.iter().zip(dx).map(|(a, b)| a + c * b).collect()
        };
        let k1 = self.rates(w, u)?;
        let k2 = self.rates(&shift(w, &k1.wdot, h / 2.0), &shift(u, &k1.udot, h / 2.0))?;
        let k3 = self.rates(&shift(w, &k2.wdot, h / 2.0), &shift(u, &k2.udot, h / 2.0))?;
        let k4 = self.rates(&shift(w, &k3.wdot, h), &shift(u, &k3.udot, h))?;
        let combine = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
            (0..x.len())
                .map(|i| x[i] + h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
                .collect()
        };
        Ok((
            combine(w, &k1.wdot, &k2.wdot, &k3.wdot, &k4.wdot),
            combine(u, &k1.udot, &k2.udot, &k3.udot, &k4.udot),
        ))
    }
}

fn record(sys: &DynamicSystem, t: f64, w: &[f64], u: &[f64], p: &AssociationMatrix, controlled: bool) -> Result<SimRecord> {
    let frozen = Frozen::new(sys, p, controlled);
    let rates = frozen.rates(w, u)?;
    let hard = harden(p, sys.solver.tie_tol);
    let cut_sq = sys
        .edges
        .iter()
        .zip(w)
        .filter(|(&(a, b), _)| hard.assignment[a] != hard.assignment[b])
        .map(|(_, x)| x * x)
        .sum();
    Ok(SimRecord {
        t,
        w: w.to_vec(),
        u: u.to_vec(),
        energy: frozen.energy(p, w, u),
        fdot: energy_rate(rates.alpha, u, &rates.udot, sys.mu),
        alpha: rates.alpha,
        norm_u2: u.iter().map(|x| x * x).sum(),
        assignment: hard.assignment,
        cut_sq,
        clamped: rates.clamped,
        associations: p.clone(),
    })
}

fn free_mask(sys: &DynamicSystem) -> Vec<bool> {
    let mut free = vec![true; sys.n_vertices];
    for &s in &sys.terminals {
        free[s] = false;
    }
    free
}

/// Full cold-start anneal on the squared weights.
fn cold_solve(sys: &DynamicSystem, w: &[f64], trace: &mut SimTrace) -> Result<AssociationMatrix> {
    let squared: Vec<f64> = w.iter().map(|x| x * x).collect();
    let g = sys.skeleton(&squared)?;
    let start = Instant::now();
    let solved = anneal(&g, &sys.solver)?;
    trace.solver_time += start.elapsed();
    trace.full_solves += 1;
    trace.warnings.extend(solved.warnings);
    Ok(solved.associations)
}

fn is_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

/// Controlled trajectory: one full anneal at `t = 0`, then after every RK4
/// step the associations are refreshed by warm-started sweeps at
/// `beta_track` on the new squared weights.
///
/// A horizon shorter than one step yields an empty trace.
pub fn simulate(sys: &DynamicSystem) -> Result<SimTrace> {
    run(sys, Mode::Controlled)
}

/// Baseline with `u = 0`: every `dt` the partition is recomputed by a full
/// cold-start anneal, and held fixed in between.
pub fn frame_by_frame(sys: &DynamicSystem, dt: f64) -> Result<SimTrace> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("frame interval must be positive, got {dt}")));
    }
    run(sys, Mode::Frames(dt))
}

#[derive(Clone, Copy)]
enum Mode {
    Controlled,
    Frames(f64),
}

fn run(sys: &DynamicSystem, mode: Mode) -> Result<SimTrace> {
    sys.validate()?;
    let mut trace = SimTrace::new();
    let steps = sys.n_steps();
    if steps == 0 {
        return Ok(trace);
    }
    let controlled = matches!(mode, Mode::Controlled);
    let mut operator = SquaredOperator::new(sys, free_mask(sys));
    let mut w = sys.w0.clone();
    let mut u = if controlled { sys.u0.clone() } else { vec![0.0; sys.n_edges()] };

    let mut p = cold_solve(sys, &w, &mut trace)?;
    let mut scratch = p.clone();
    let mut frame = 0usize;
    trace.records.push(record(sys, 0.0, &w, &u, &p, controlled)?);

    for step in 1..=steps {
        let t = step as f64 * sys.h;
        let (w_next, u_next) = Frozen::new(sys, &p, controlled).rk4(&w, &u, sys.h)?;
        if !is_finite(&w_next) || !is_finite(&u_next) {
            trace.status = SimStatus::Aborted {
                t,
                reason: "integration step produced a non-finite state".into(),
            };
            return Ok(trace);
        }
        w = w_next;
        u = u_next;

        let refreshed = match mode {
            Mode::Controlled => (|| {
                let start = Instant::now();
                let k = operator.update(&w)?;
                let (sweeps, _) = relax(&mut p, &mut scratch, k, sys.beta_track, &sys.solver)?;
                trace.solver_time += start.elapsed();
                trace.refresh_sweeps += sweeps;
                Ok(())
            })(),
            Mode::Frames(dt) => {
                // small slack so that t = i * dt lands on frame i despite rounding
                let due = (t / dt + 1e-9).floor() as usize;
                if due > frame {
                    frame = due;
                    cold_solve(sys, &w, &mut trace).map(|q| p = q)
                } else {
                    Ok(())
                }
            }
        };
        match refreshed {
            Err(Error::Numeric { row }) => {
                trace.status = SimStatus::Aborted {
                    t,
                    reason: format!("association update produced a non-finite value in row {row}"),
                };
                return Ok(trace);
            }
            Err(e) => return Err(e),
            Ok(()) => {}
        }
        let rec = record(sys, t, &w, &u, &p, controlled)?;
        if rec.clamped {
            trace
                .warnings
                .push(format!("t = {t}: control norm below floor while alpha > 0; descent not guaranteed"));
        }
        trace.records.push(rec);
    }
    Ok(trace)
}

/// One row per record: `t, w_1..w_m, u_1..u_m, F, Fdot, normU2, cut_sq, assignment`,
/// with the assignment as space-separated 1-based labels.
pub fn write_sim_csv<W: Write>(trace: &SimTrace, m: usize, out: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|e| format!("w_{e}")));
    header.extend((1..=m).map(|e| format!("u_{e}")));
    header.extend(["F", "Fdot", "normU2", "cut_sq", "assignment"].map(String::from));
    csv.write_record(&header)?;
    for r in &trace.records {
        let mut row = vec![r.t.to_string()];
        row.extend(r.w.iter().map(f64::to_string));
        row.extend(r.u.iter().map(f64::to_string));
        row.extend([r.energy, r.fdot, r.norm_u2, r.cut_sq].map(|x| x.to_string()));
        row.push(
            r.assignment
                .iter()
                .map(|a| (a + 1).to_string())
                .collect::<Vec<_>>()
                .join(" "),
        );
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}
