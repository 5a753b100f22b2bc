//! Atomic populations, magnetization and grid-aligned channels.
//!
//! Populations trace over photon occupations. Spin labels are aliases:
//! `↑ = a`, `→ = b`, `↓ = c`. Sites are 0-based in the API; channel names
//! are 1-based (`p_c2` is level `c` at site index 1).

use std::{collections::BTreeMap, io, sync::Arc};

use crate::{
    dynamics::{TimeGrid, Trajectory},
    error::{Error, Result},
    hilbert::{AtomicLevels, HilbertSpace, Level, MixtureState, StateVector},
};

/// Anything that carries a (possibly mixed) atomic state.
pub trait Populations {
    fn space(&self) -> &Arc<HilbertSpace>;
    fn weighted(&self) -> Vec<(f64, &StateVector)>;
}

impl Populations for StateVector {
    fn space(&self) -> &Arc<HilbertSpace> {
        StateVector::space(self)
    }

    fn weighted(&self) -> Vec<(f64, &StateVector)> {
        vec![(1.0, self)]
    }
}

impl Populations for MixtureState {
    fn space(&self) -> &Arc<HilbertSpace> {
        MixtureState::space(self)
    }

    fn weighted(&self) -> Vec<(f64, &StateVector)> {
        self.members().iter().map(|(w, s)| (*w, s)).collect()
    }
}

fn check_site(space: &HilbertSpace, site: usize) -> Result<()> {
    if site >= space.n_sites() {
        return Err(Error::InvalidLabel(format!("site {site} out of range for {} sites", space.n_sites())));
    }
    Ok(())
}

/// Probability of finding the atom at `site` in `level`.
pub fn population<P: Populations + ?Sized>(state: &P, site: usize, level: Level) -> Result<f64> {
    let space = state.space();
    check_site(space, site)?;
    if !space.atomic_levels().contains(level) {
        return Err(Error::InvalidLabel(format!("level {level} not in a {}-level space", space.atomic_levels().count())));
    }
    Ok(state
        .weighted()
        .into_iter()
        .map(|(w, s)| {
            w * s
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| space.level_at(*i, site) == level)
                .map(|(_, a)| a.norm_sqr())
                .sum::<f64>()
        })
        .sum())
}

/// Populations of every level at `site`, in `a, b, c (, d, e)` order.
pub fn level_distribution<P: Populations + ?Sized>(state: &P, site: usize) -> Result<Vec<f64>> {
    let space = state.space();
    check_site(space, site)?;
    let mut dist = vec![0.0; space.atomic_levels().count()];
    for (w, s) in state.weighted() {
        for (i, a) in s.amplitudes().iter().enumerate() {
            dist[space.level_at(i, site).index()] += w * a.norm_sqr();
        }
    }
    Ok(dist)
}

/// `<sum_j S_zj>` over a three-level space.
pub fn total_magnetization<P: Populations + ?Sized>(state: &P) -> Result<f64> {
    let space = state.space();
    if space.atomic_levels() != AtomicLevels::Three {
        return Err(Error::InvalidLabel("magnetization is defined on three-level spaces only".into()));
    }
    (0..space.n_sites())
        .map(|j| Ok(population(state, j, Level::A)? - population(state, j, Level::C)?))
        .sum()
}

/// Channel name for a population, e.g. `p_c2`.
pub fn population_channel_name(level: Level, site: usize) -> String {
    format!("p_{}{}", level.label(), site + 1)
}

/// Parses `p_<level><site>` (1-based site) into `(level, 0-based site)`.
pub fn parse_population_channel(name: &str) -> Result<(Level, usize)> {
    let rest = name.strip_prefix("p_").ok_or_else(|| Error::UnknownChannel(name.into()))?;
    let mut chars = rest.chars();
    let level = chars.next().ok_or_else(|| Error::UnknownChannel(name.into()))?;
    let level = Level::parse(&level.to_string()).map_err(|_| Error::UnknownChannel(name.into()))?;
    let site: usize = chars.as_str().parse().map_err(|_| Error::UnknownChannel(name.into()))?;
    if site == 0 {
        return Err(Error::UnknownChannel(name.into()));
    }
    Ok((level, site - 1))
}

/// Population trajectory of one level at one site.
pub fn population_series<P: Populations>(traj: &Trajectory<P>, site: usize, level: Level) -> Result<Vec<f64>> {
    traj.samples.iter().map(|s| population(s, site, level)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named real channels aligned to a time grid, plus run metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    pub channels: Vec<Channel>,
    pub metadata: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid) -> Self {
        Self { grid, times: grid.times(), channels: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.times.len() {
            return Err(Error::InvalidGrid(format!(
                "channel {name} has {} values for {} grid points",
                values.len(),
                self.times.len()
            )));
        }
        if self.channels.iter().any(|c| c.name == name) {
            return Err(Error::Config(format!("duplicate channel {name}")));
        }
        self.channels.push(Channel { name, values });
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Result<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
            .ok_or_else(|| Error::UnknownChannel(name.into()))
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|c| c.name.as_str())
    }

    /// Header `t,<channels...>`, one row per grid point, shortest
    /// round-trip formatting.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(self.channels.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for (k, t) in self.times.iter().enumerate() {
            let mut row = vec![format!("{t:?}")];
            row.extend(self.channels.iter().map(|c| format!("{:?}", c.values[k])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.get(0) != Some("t") {
            return Err(Error::Config("CSV must start with a `t` column".into()));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut times = Vec::new();
        let mut cols = vec![Vec::new(); names.len()];
        for rec in r.records() {
            let rec = rec?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("bad number `{s}`: {e}")));
            times.push(parse(&rec[0])?);
            for (c, field) in cols.iter_mut().zip(rec.iter().skip(1)) {
                c.push(parse(field)?);
            }
        }
        if times.len() < 2 {
            return Err(Error::InvalidGrid("CSV holds fewer than two samples".into()));
        }
        let grid = TimeGrid::new(times[0], *times.last().unwrap(), times.len())?;
        let channels = names.into_iter().zip(cols).map(|(name, values)| Channel { name, values }).collect();
        Ok(Self { grid, times, channels, metadata: BTreeMap::new() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_space, fig2b_mixture, product_state, PhotonTruncation};
    use num_complex::Complex64 as C64;
    use proptest::prelude::*;
    use Level::*;

    fn space() -> Arc<HilbertSpace> {
        build_space(2, AtomicLevels::Three, PhotonTruncation::TotalCap(2)).unwrap()
    }

    #[test]
    fn product_and_superposition_populations() {
        let s = space();
        let bc = product_state(&s, &[B, C], &[0, 0]).unwrap();
        assert_eq!(population(&bc, 1, C).unwrap(), 1.0);
        assert_eq!(level_distribution(&bc, 0).unwrap(), vec![0.0, 1.0, 0.0]);
        let cb = product_state(&s, &[C, B], &[0, 0]).unwrap();
        let h = C64::new(0.5f64.sqrt(), 0.0);
        let sup = StateVector::superpose(&[(h, &bc), (h, &cb)]).unwrap();
        assert!((population(&sup, 1, C).unwrap() - 0.5).abs() < 1e-15);
        assert!(population(&bc, 2, C).is_err());
        assert!(population(&bc, 0, D).is_err());
    }

    #[test]
    fn mixture_populations() {
        let m = fig2b_mixture(&space()).unwrap();
        assert_eq!(population(&m, 1, C).unwrap(), 1.0);
        assert_eq!(population(&m, 0, A).unwrap(), 0.5);
        assert_eq!(population(&m, 0, B).unwrap(), 0.5);
        assert_eq!(total_magnetization(&m).unwrap(), -0.5);
    }

    #[test]
    fn magnetization_cases() {
        let s = space();
        assert_eq!(total_magnetization(&product_state(&s, &[B, C], &[1, 0]).unwrap()).unwrap(), -1.0);
        assert_eq!(total_magnetization(&product_state(&s, &[A, C], &[0, 0]).unwrap()).unwrap(), 0.0);
        let five = build_space(2, AtomicLevels::Five, PhotonTruncation::TotalCap(0)).unwrap();
        assert!(total_magnetization(&product_state(&five, &[B, C], &[0, 0]).unwrap()).is_err());
    }

    #[test]
    fn channel_names() {
        assert_eq!(population_channel_name(C, 1), "p_c2");
        assert_eq!(parse_population_channel("p_c2").unwrap(), (C, 1));
        assert_eq!(parse_population_channel("p_↓2").unwrap(), (C, 1));
        assert!(parse_population_channel("p_c0").is_err());
        assert!(parse_population_channel("q_c1").is_err());
    }

    #[test]
    fn csv_round_trip_preserves_bits() {
        let mut ts = TimeSeries::new(TimeGrid::new(0.0, 1.0, 4).unwrap());
        ts.push("p_c2", vec![1.0, 0.1 + 0.2, 1e-300, std::f64::consts::PI]).unwrap();
        let mut buf = Vec::new();
        ts.write_csv(&mut buf).unwrap();
        let back = TimeSeries::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.channel("p_c2").unwrap(), ts.channel("p_c2").unwrap());
        assert_eq!(back.times, ts.times);
        assert!(ts.push("short", vec![1.0]).is_err());
    }

    fn random_state() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 54)
    }

    proptest! {
        #[test]
        fn distributions_sum_to_one_and_ignore_site_phases(amps in random_state(), phases in prop::collection::vec(0.0f64..6.3, 3)) {
            let s = space();
            let raw: Vec<C64> = amps.iter().map(|&(a, b)| C64::new(a, b)).collect();
            prop_assume!(raw.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6);
            let psi = StateVector::from_amplitudes(s.clone(), raw).unwrap().normalized();
            // site-0 diagonal rotation e^{i phi_l} on |l>
            let rotated: Vec<C64> = psi.amplitudes().iter().enumerate()
                .map(|(i, a)| a * C64::from_polar(1.0, phases[s.level_at(i, 0).index()]))
                .collect();
            let rotated = StateVector::from_amplitudes(s.clone(), rotated).unwrap();
            for site in 0..2 {
                let d = level_distribution(&psi, site).unwrap();
                prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                let r = level_distribution(&rotated, site).unwrap();
                for (x, y) in d.iter().zip(&r) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }
}
