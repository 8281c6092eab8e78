use std::collections::HashMap;

use mmetric::corpus::{self, Payload};
use mmetric::{Error, FiniteMap, FiniteSpace, FunctionalMap64, MapSystem, Rational, Result, Scalar};

use crate::args::SystemArgs;

pub fn corpus_name(spec: &str) -> Option<&str> {
    spec.strip_prefix("corpus:")
}

pub fn load_space(spec: &str) -> Result<FiniteSpace<f64>> {
    match corpus_name(spec) {
        Some(name) => corpus::get(name)?
            .finite_space()
            .cloned()
            .ok_or_else(|| Error::InvalidConfig(format!("corpus entry `{name}` has no finite table"))),
        None => FiniteSpace::read(spec),
    }
}

pub fn load_exact(spec: &str) -> Result<FiniteSpace<Rational>> {
    match corpus_name(spec) {
        Some(name) => corpus::get_exact(name)?
            .finite_space()
            .cloned()
            .ok_or_else(|| Error::InvalidConfig(format!("corpus entry `{name}` has no finite table"))),
        None => FiniteSpace::<f64>::read(spec)?.map(Rational::from_sample),
    }
}

pub enum System {
    Finite(FiniteMap<f64>),
    Functional(FunctionalMap64),
}

fn parse_f64(name: &str, text: &str) -> Result<f64> {
    corpus::parse_scalar(text).map_err(|_| Error::InvalidConfig(format!("--{name}: bad number `{text}`")))
}

fn finite_x0(space: &FiniteSpace<f64>, x0: Option<&str>) -> Result<Option<usize>> {
    x0.map(|l| space.index_of(l)).transpose()
}

fn parse_map(space: &FiniteSpace<f64>, spec: &str) -> Result<Vec<usize>> {
    let mut table: HashMap<usize, usize> = HashMap::new();
    for pair in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let (from, to) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("--map: expected from=to, got `{pair}`")))?;
        let (from, to) = (space.index_of(from.trim())?, space.index_of(to.trim())?);
        if table.insert(from, to).is_some() {
            return Err(Error::InvalidConfig(format!(
                "--map: `{}` mapped twice",
                space.label_of(from)
            )));
        }
    }
    (0..space.len())
        .map(|i| {
            table.get(&i).copied().ok_or_else(|| {
                Error::InvalidConfig(format!("--map: no image for `{}`", space.label_of(i)))
            })
        })
        .collect()
}

pub fn resolve(args: &SystemArgs) -> Result<System> {
    let spec = args.system.as_str();
    let affine = args.alpha.is_some() || args.beta.is_some();

    if let Some(map) = &args.map {
        if affine {
            return Err(Error::InvalidConfig("--map and --alpha/--beta are exclusive".into()));
        }
        let space = load_space(spec)?;
        let images = parse_map(&space, map)?;
        let x0 = finite_x0(&space, args.x0.as_deref())?.unwrap_or(0);
        let name = format!("{spec} with map {map}");
        return Ok(System::Finite(MapSystem::new(name, space, move |x: &usize| images[*x], x0)?));
    }

    let name = corpus_name(spec).unwrap_or(spec);
    let entry = corpus::get(name)?;
    if affine {
        let space = entry
            .functional_space()
            .cloned()
            .ok_or_else(|| Error::InvalidConfig(format!("`{name}` is not a functional space")))?;
        let (alpha, beta) = (args.alpha.unwrap_or(1.0), args.beta.unwrap_or(0.0));
        let x0 = match &args.x0 {
            Some(t) => parse_f64("x0", t)?,
            None => space.bounds().1.unwrap_or(0.0),
        };
        let label = format!("{name} with f(x) = {alpha} x + {beta}");
        return Ok(System::Functional(MapSystem::new(label, space, move |x: &f64| alpha * x + beta, x0)?));
    }

    match entry.payload {
        Payload::FiniteMap(sys) => match finite_x0(sys.space(), args.x0.as_deref())? {
            Some(x0) => Ok(System::Finite(sys.with_x0(x0)?)),
            None => Ok(System::Finite(sys)),
        },
        Payload::FunctionalMap(sys) => match &args.x0 {
            Some(t) => Ok(System::Functional(sys.with_x0(parse_f64("x0", t)?)?)),
            None => Ok(System::Functional(sys)),
        },
        _ => Err(Error::InvalidConfig(format!(
            "`{name}` is not a map system; pass --map (finite) or --alpha/--beta (functional)"
        ))),
    }
}
