use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::{integrate_profile, IntegratedProfile, VvError};
use crate::flux_model::FluxField;
use crate::parabolic::{solve_fv, FvParams, Grid1D, Profile, ViscousSolution};

/// Grid-refinement rule and evaluation window of an ε-sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPolicy {
    /// Evaluation window `[x_min, x_max]`; the computational domain pads it on both sides.
    pub window: (f64, f64),
    /// `dx ≤ dx_per_eps · ε`.
    pub dx_per_eps: f64,
    pub cfl: f64,
    pub samples: usize,
    pub cauchy_ratio: f64,
    /// Padding on each side; `None` uses `L·T + 10√(ε_max T)`.
    pub pad: Option<f64>,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl SweepPolicy {
    pub fn new(x_min: f64, x_max: f64) -> Self {
        Self {
            window: (x_min, x_max),
            dx_per_eps: 0.125,
            cfl: 0.5,
            samples: 64,
            cauchy_ratio: 0.8,
            pad: None,
            jobs: None,
        }
    }
}

/// One sweep member on its padded grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRun {
    pub eps: f64,
    pub solution: ViscousSolution,
    /// First cell of the evaluation window.
    pub offset: usize,
    /// Fine cells per lattice cell.
    pub refine: usize,
}

impl SweepRun {
    /// The run restricted to the evaluation window.
    pub fn windowed(&self, lattice_cells: usize) -> Result<ViscousSolution, VvError> {
        Ok(self
            .solution
            .restrict(self.offset, lattice_cells * self.refine)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpsSequenceReport {
    pub eps_schedule: Vec<f64>,
    /// Lattice edges inside the window, shared by all members.
    pub lattice: Vec<f64>,
    pub times: Vec<f64>,
    /// `sup_{t,x} |U^{ε_i} − U^{ε_j}|` over stored times and lattice edges.
    pub pairwise_gaps: Vec<Vec<f64>>,
    pub consecutive_gaps: Vec<f64>,
    /// `consecutive_gaps[k+1] / consecutive_gaps[k]`.
    pub ratios: Vec<f64>,
    pub cauchy_ratio: f64,
    /// `None` when fewer than two consecutive gaps exist.
    pub cauchy_pass: Option<bool>,
    /// Integrated profile of the smallest ε on the lattice.
    pub limit_estimate: IntegratedProfile,
    pub runs: Vec<SweepRun>,
}

#[derive(Serialize)]
struct Summary<'a> {
    eps_schedule: &'a [f64],
    consecutive_gaps: &'a [f64],
    ratios: &'a [f64],
    cauchy_ratio: f64,
    cauchy_pass: Option<bool>,
    limit_profile: &'a str,
}

impl EpsSequenceReport {
    pub fn lattice_cells(&self) -> usize {
        self.lattice.len() - 1
    }

    pub fn write_gaps_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "eps_i,eps_j,gap")?;
        for (i, row) in self.pairwise_gaps.iter().enumerate() {
            for (j, gap) in row.iter().enumerate() {
                writeln!(w, "{},{},{gap}", self.eps_schedule[i], self.eps_schedule[j])?;
            }
        }
        Ok(())
    }

    /// JSON summary; `limit_profile` names the file holding [`Self::limit_estimate`].
    pub fn write_summary_json<W: Write>(&self, w: W, limit_profile: &str) -> io::Result<()> {
        let s = Summary {
            eps_schedule: &self.eps_schedule,
            consecutive_gaps: &self.consecutive_gaps,
            ratios: &self.ratios,
            cauchy_ratio: self.cauchy_ratio,
            cauchy_pass: self.cauchy_pass,
            limit_profile,
        };
        serde_json::to_writer_pretty(w, &s).map_err(io::Error::other)
    }
}

/// Ratio test on the last three consecutive gaps (fewer when the schedule is short).
fn cauchy(gaps: &[f64], ratio: f64) -> Option<bool> {
    if gaps.len() < 2 {
        return None;
    }
    let tail = &gaps[gaps.len().saturating_sub(3)..];
    Some(tail.windows(2).all(|w| w[1] < w[0] && w[1] <= ratio * w[0]))
}

/// Solves `u_t + f_x = ε u_xx` for every ε of a strictly decreasing schedule and compares the
/// integrated profiles on the lattice of the coarsest run.
///
/// All grids are nested refinements of that lattice over one padded domain, so sampling the
/// fine integrated profile at lattice edges equals cell-averaging down.
pub fn eps_sweep(
    flux: &FluxField,
    u0: &Profile,
    schedule: &[f64],
    t_end: f64,
    policy: &SweepPolicy,
) -> Result<EpsSequenceReport, VvError> {
    if schedule.is_empty()
        || schedule.iter().any(|e| !(*e > 0.0 && e.is_finite()))
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(VvError::InvalidInput(
            "schedule must be positive and strictly decreasing".into(),
        ));
    }
    let (x_min, x_max) = policy.window;
    if !(x_max > x_min) || !(policy.dx_per_eps > 0.0) || !(t_end > 0.0) {
        return Err(VvError::InvalidInput(format!(
            "bad window {:?}, dx ratio {} or horizon {t_end}",
            policy.window, policy.dx_per_eps
        )));
    }
    u0.validate()?;
    let eps_max = schedule[0];
    let len = x_max - x_min;
    let n0 = ((len / (eps_max * policy.dx_per_eps)) - 1e-9)
        .ceil()
        .max(1.0) as usize;
    let dx0 = len / n0 as f64;
    let pad = policy
        .pad
        .unwrap_or(flux.lip() * t_end + 10.0 * (eps_max * t_end).sqrt());
    let k0 = ((pad / dx0) - 1e-9).ceil().max(0.0) as usize;
    let (lo, hi) = (x_min - k0 as f64 * dx0, x_max + k0 as f64 * dx0);
    let params = FvParams {
        cfl: policy.cfl,
        samples: policy.samples,
    };

    let solve_one = |&eps: &f64| -> Result<SweepRun, VvError> {
        let refine = ((dx0 / (eps * policy.dx_per_eps)) - 1e-9).ceil().max(1.0) as usize;
        let grid = Grid1D::new(lo, hi, (n0 + 2 * k0) * refine)?;
        let init = u0.cell_averages(&grid);
        let solution = solve_fv(flux, &grid, &init, eps, t_end, &params)
            .map_err(|source| VvError::Solve { eps, source })?;
        log::debug!(
            "ε={eps}: {} cells, {} steps",
            grid.n_cells(),
            solution.diagnostics.steps
        );
        Ok(SweepRun {
            eps,
            solution,
            offset: k0 * refine,
            refine,
        })
    };
    let results: Vec<Result<SweepRun, VvError>> = match policy.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| VvError::InvalidInput(format!("thread pool: {e}")))?
            .install(|| schedule.par_iter().map(solve_one).collect()),
        None => schedule.par_iter().map(solve_one).collect(),
    };
    let runs: Vec<SweepRun> = results.into_iter().collect::<Result<_, _>>()?;

    // U at the lattice edges x_min + i dx0, i = 0..=n0, per stored time
    let sampled: Vec<Vec<Vec<f64>>> = runs
        .iter()
        .map(|r| {
            let dx = r.solution.grid.dx();
            r.solution
                .profiles
                .iter()
                .map(|p| {
                    let big_u = integrate_profile(p, dx);
                    (0..=n0)
                        .map(|i| {
                            let e = r.offset + i * r.refine;
                            if e == 0 {
                                0.0
                            } else {
                                big_u[e - 1]
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let m = runs.len();
    let mut gaps = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let g = sampled[i]
                .iter()
                .zip(&sampled[j])
                .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
                .fold(0.0, f64::max);
            gaps[i][j] = g;
            gaps[j][i] = g;
        }
    }
    let consecutive_gaps: Vec<f64> = (1..m).map(|i| gaps[i - 1][i]).collect();
    let ratios: Vec<f64> = consecutive_gaps.windows(2).map(|w| w[1] / w[0]).collect();
    let lattice: Vec<f64> = (0..=n0).map(|i| x_min + i as f64 * dx0).collect();
    let times = runs[0].solution.times.clone();
    let limit_estimate = IntegratedProfile {
        x: lattice.clone(),
        times: times.clone(),
        values: sampled[m - 1].clone(),
    };
    Ok(EpsSequenceReport {
        eps_schedule: schedule.to_vec(),
        lattice,
        times,
        cauchy_pass: cauchy(&consecutive_gaps, policy.cauchy_ratio),
        pairwise_gaps: gaps,
        consecutive_gaps,
        ratios,
        cauchy_ratio: policy.cauchy_ratio,
        limit_estimate,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux_model::SmoothFlux;

    fn burgers_sweep(schedule: &[f64]) -> EpsSequenceReport {
        let flux = FluxField::homogeneous(SmoothFlux::burgers());
        let u0 = Profile::Bump {
            center: 0.0,
            radius: 1.0,
            height: 0.5,
        };
        // smooth up to T: the steepest slope is below 1
        let mut p = SweepPolicy::new(-1.5, 2.0);
        p.samples = 16;
        eps_sweep(&flux, &u0, schedule, 0.5, &p).unwrap()
    }

    #[test]
    fn smooth_burgers_gaps_shrink() {
        let r = burgers_sweep(&[0.08, 0.04, 0.02, 0.01]);
        for (i, row) in r.pairwise_gaps.iter().enumerate() {
            assert_eq!(row[i], 0.0);
            for (j, g) in row.iter().enumerate() {
                assert_eq!(*g, r.pairwise_gaps[j][i]);
            }
        }
        assert_eq!(r.cauchy_pass, Some(true), "{:?}", r.consecutive_gaps);
        // roughly linear in ε
        for q in &r.ratios {
            assert!((0.3..0.7).contains(q), "{q}");
        }
        assert_eq!(r.runs[3].refine, 8);
    }

    #[test]
    fn single_member_is_indeterminate() {
        let r = burgers_sweep(&[0.1]);
        assert!(r.consecutive_gaps.is_empty());
        assert_eq!(r.cauchy_pass, None);
        let mut csv = Vec::new();
        r.write_gaps_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "eps_i,eps_j,gap\n0.1,0.1,0\n"
        );
    }

    #[test]
    fn rejects_bad_schedules() {
        let flux = FluxField::homogeneous(SmoothFlux::burgers());
        let u0 = Profile::Riemann {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
        };
        let p = SweepPolicy::new(-1.0, 1.0);
        for s in [&[][..], &[0.1, 0.1], &[0.05, 0.1], &[0.1, -0.1]] {
            assert!(matches!(
                eps_sweep(&flux, &u0, s, 1.0, &p),
                Err(VvError::InvalidInput(_))
            ));
        }
        let bad = SweepPolicy { cfl: 0.9, ..p };
        assert!(matches!(
            eps_sweep(&flux, &u0, &[0.1], 1.0, &bad),
            Err(VvError::Solve { eps, .. }) if eps == 0.1
        ));
    }

    #[test]
    fn cauchy_uses_the_last_three_gaps() {
        assert_eq!(cauchy(&[1.0, 2.0, 0.5, 0.3], 0.8), Some(true));
        assert_eq!(cauchy(&[1.0, 0.5, 0.45], 0.8), Some(false));
        assert_eq!(cauchy(&[1.0], 0.8), None);
    }
}
