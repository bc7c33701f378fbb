use num::BigInt;

use super::operators::con_env_total;
use super::{
    op_con, op_con_env, op_con_ratefree, op_div, op_min, op_mul, op_sum, to_count, CompileError,
    CompileOptions, OUT,
};
use crate::calculus::{Environment, Formula};
use crate::crn::Crs;
use crate::rational::{format_rational, Rational};

/// Facts about a compiled network that the text format alone does not carry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Manifest {
    pub output: String,
    pub leaders: Vec<String>,
    /// Rate separation, present when an environment-dependent choice was built.
    pub rho: Option<Rational>,
    /// Weight scale `N` of each environment-dependent choice, in build order.
    pub scales: Vec<BigInt>,
    pub mass_lost: Option<Rational>,
}

impl Manifest {
    /// Builds the manifest of a single-output network.
    pub fn for_network(crs: &Crs) -> Manifest {
        Manifest {
            output: crs.output_names().join(","),
            leaders: leaders(crs),
            ..Manifest::default()
        }
    }

    /// Key/value lines for the `meta` section of the CRN text format.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("output".to_string(), self.output.clone()),
            ("leaders".to_string(), self.leaders.join(",")),
        ];
        if let Some(rho) = &self.rho {
            out.push(("rho".to_string(), format_rational(rho)));
        }
        if !self.scales.is_empty() {
            let scales: Vec<String> = self.scales.iter().map(BigInt::to_string).collect();
            out.push(("K".to_string(), scales.join(",")));
        }
        if let Some(lost) = &self.mass_lost {
            out.push(("massLost".to_string(), format_rational(lost)));
        }
        out
    }
}

/// Species that start at one and drive a branch: `z` and every prefixed `*.z`.
pub fn leaders(crs: &Crs) -> Vec<String> {
    crs.species()
        .iter()
        .filter(|s| *s == "z" || s.ends_with(".z"))
        .cloned()
        .collect()
}

fn constant(value: u64) -> Result<Crs, CompileError> {
    let mut c = Crs::new();
    c.add_species(OUT, value)?;
    c.add_output(OUT)?;
    Ok(c)
}

/// Compiles a formula into a network whose output `out` settles to
/// `[[f]]_env`: exactly when every choice has a constant weight, up to an
/// error controlled by `opts.rho` otherwise.
pub fn translate(f: &Formula, env: &Environment, opts: &CompileOptions) -> Result<Crs, CompileError> {
    translate_with_manifest(f, env, opts).map(|(c, _)| c)
}

pub fn translate_with_manifest(
    f: &Formula,
    env: &Environment,
    opts: &CompileOptions,
) -> Result<(Crs, Manifest), CompileError> {
    opts.validate()?;
    let mut scales = Vec::new();
    let crs = build(f, env, opts, &mut scales)?;
    let mut manifest = Manifest::for_network(&crs);
    if !scales.is_empty() {
        manifest.rho = Some(opts.rho.clone());
    }
    manifest.scales = scales;
    Ok((crs, manifest))
}

fn build(
    f: &Formula,
    env: &Environment,
    opts: &CompileOptions,
    scales: &mut Vec<BigInt>,
) -> Result<Crs, CompileError> {
    match f {
        Formula::One => constant(1),
        Formula::Zero => constant(0),
        Formula::Sum(a, b) => {
            let (a, b) = (build(a, env, opts, scales)?, build(b, env, opts, scales)?);
            op_sum(&a, OUT, &b, OUT)
        }
        Formula::Min(a, b) => {
            let (a, b) = (build(a, env, opts, scales)?, build(b, env, opts, scales)?);
            op_min(&a, OUT, &b, OUT)
        }
        Formula::Scale(k, p) => {
            let inner = build(p, env, opts, scales)?;
            let k1 = to_count(k.numer())?;
            let k2 = to_count(k.denom())?;
            op_div(&op_mul(&inner, OUT, k1)?, OUT, k2)
        }
        Formula::Choice(a, d, b) => {
            let (a, b) = (build(a, env, opts, scales)?, build(b, env, opts, scales)?);
            if d.is_constant() {
                if opts.rate_free {
                    op_con_ratefree(&a, OUT, &b, OUT, &d.constant)
                } else {
                    op_con(&a, OUT, &b, OUT, &d.constant)
                }
            } else {
                let net = op_con_env(&a, OUT, &b, OUT, d, env, opts)?;
                scales.push(con_env_total(d, env)?);
                Ok(net)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::exact_output;
    use crate::calculus::{eval, parse_formula};
    use crate::pmf::Pmf;
    use crate::rational::{int, rat};

    const CAP: usize = 200_000;

    #[test]
    fn base_cases() {
        let one = translate(&Formula::One, &Environment::new(), &CompileOptions::default()).unwrap();
        assert!(one.reactions().is_empty());
        assert_eq!(one.initial_count(OUT), Ok(1));
        assert_eq!(exact_output(&one, CAP).unwrap(), Pmf::dirac(1));
    }

    #[test]
    fn bernoulli_is_exact() {
        let f = parse_formula("(one)_[1/3]:(zero)").unwrap();
        for rate_free in [false, true] {
            let opts = CompileOptions { rate_free, ..CompileOptions::default() };
            let c = translate(&f, &Environment::new(), &opts).unwrap();
            assert!(c.is_nro());
            assert_eq!(
                exact_output(&c, CAP).unwrap(),
                Pmf::univariate([(0, rat(2, 3)), (1, rat(1, 3))]).unwrap()
            );
        }
    }

    #[test]
    fn scale_goes_through_mul_then_div() {
        let f = parse_formula("3/2 * (one + one)").unwrap();
        let c = translate(&f, &Environment::new(), &CompileOptions::default()).unwrap();
        assert_eq!(exact_output(&c, CAP).unwrap(), Pmf::dirac(3));
        assert_eq!(leaders(&c), Vec::<String>::new());
        let zero = translate(&parse_formula("0 * one").unwrap(), &Environment::new(), &CompileOptions::default())
            .unwrap();
        assert_eq!(exact_output(&zero, CAP).unwrap(), Pmf::dirac(0));
    }

    #[test]
    fn p1_with_environment_is_close() {
        let f = parse_formula("(one + 2 * one)_[c]:(3 * one + (one)_[1/4]:(zero + one)) + one").unwrap();
        let env = Environment::new().with("c", rat(1, 2)).unwrap();
        let (c, m) = translate_with_manifest(&f, &env, &CompileOptions::default()).unwrap();
        assert!(c.is_nro());
        assert_eq!(m.rho, Some(int(1_000_000)));
        assert_eq!(m.scales, vec![BigInt::from(2)]);
        assert!(m.leaders.len() >= 2);
        let target = eval(&f, &env).unwrap();
        let got = exact_output(&c, CAP).unwrap();
        assert!(got.l1_distance(&target).unwrap() <= rat(1, 1000));
    }

    #[test]
    fn manifest_entries() {
        let m = Manifest {
            output: OUT.into(),
            leaders: vec!["z".into(), "l.z".into()],
            rho: Some(int(100)),
            scales: vec![BigInt::from(6)],
            mass_lost: Some(rat(1, 16)),
        };
        let keys: Vec<_> = m.entries().into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys, ["output", "leaders", "rho", "K", "massLost"]);
        assert_eq!(m.entries()[1].1, "z,l.z");
    }
}
