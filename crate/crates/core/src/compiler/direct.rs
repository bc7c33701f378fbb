use num::{One, Zero};

use super::{to_count, CompileError, OUT};
use crate::crn::Crs;
use crate::pmf::{truncate, Pmf, TruncationResult};
use crate::rational::{lcm_of_denominators, Rational};

fn univariate_points(f: &Pmf) -> Result<Vec<(u64, Rational)>, CompileError> {
    f.require_univariate()?;
    if f.is_empty() {
        return Err(CompileError::EmptySupport);
    }
    Ok(f.iter1().map(|(v, p)| (v, p.clone())).collect())
}

/// Leader-race construction: leader `z` picks branch `i` with rate `f(z_i)`;
/// the branch catalyst `sel{i}` then moves all `z_i` molecules of `l{i}`
/// into `out`. 2|J| reactions, 2|J| + 2 species.
pub fn compile_direct(f: &Pmf) -> Result<Crs, CompileError> {
    let points = univariate_points(f)?;
    let branches: Vec<(u64, Rational)> = points;
    build_direct(&branches, None)
}

/// Variant where every reaction has rate 1 and the branch weights live in
/// the initial counts of `w{i}`: `f(z_i)·L` with `L` the least common
/// multiple of the probability denominators.
pub fn compile_direct_ratefree(f: &Pmf) -> Result<Crs, CompileError> {
    let points = univariate_points(f)?;
    let scale = Rational::from_integer(lcm_of_denominators(points.iter().map(|(_, p)| p)));
    let counts = points
        .iter()
        .map(|(_, p)| to_count(&(p * &scale).to_integer()))
        .collect::<Result<Vec<_>, _>>()?;
    build_direct(&points, Some(&counts))
}

fn build_direct(points: &[(u64, Rational)], weights: Option<&[u64]>) -> Result<Crs, CompileError> {
    let mut c = Crs::new();
    for (i, (value, _)) in points.iter().enumerate() {
        c.add_species(&format!("l{}", i + 1), *value)?;
    }
    c.add_species("z", 1)?;
    for i in 0..points.len() {
        c.add_species(&format!("sel{}", i + 1), 0)?;
    }
    if let Some(w) = weights {
        for (i, &count) in w.iter().enumerate() {
            c.add_species(&format!("w{}", i + 1), count)?;
        }
    }
    c.add_species(OUT, 0)?;
    for (i, (_, p)) in points.iter().enumerate() {
        let sel = format!("sel{}", i + 1);
        match weights {
            None => {
                c.add_reaction(&[("z", 1)], &[(&sel, 1)], p.clone())?;
            }
            Some(_) => {
                let w = format!("w{}", i + 1);
                c.add_reaction(&[("z", 1), (&w, 1)], &[(&sel, 1)], Rational::one())?;
            }
        }
    }
    for i in 0..points.len() {
        let (l, sel) = (format!("l{}", i + 1), format!("sel{}", i + 1));
        c.add_reaction(&[(&l, 1), (&sel, 1)], &[(&sel, 1), (OUT, 1)], Rational::one())?;
    }
    c.add_output(OUT)?;
    Ok(c)
}

/// Multidimensional version: the leader picks a selector `sel{i}` with rate
/// `f(z_i)`, which then catalyses the transfer of `z_i[d]` molecules from
/// `l{i}_{d}` into `out{d}` for every coordinate `d`.
pub fn compile_joint(f: &Pmf) -> Result<Crs, CompileError> {
    if f.is_empty() {
        return Err(CompileError::EmptySupport);
    }
    let dim = f.dim();
    let points: Vec<(Vec<u64>, Rational)> = f.iter().map(|(k, p)| (k.clone(), p.clone())).collect();
    let mut c = Crs::new();
    c.add_species("z", 1)?;
    for i in 1..=points.len() {
        c.add_species(&format!("sel{i}"), 0)?;
    }
    for (i, (point, _)) in points.iter().enumerate() {
        for (d, &v) in point.iter().enumerate() {
            c.add_species(&format!("l{}_{}", i + 1, d + 1), v)?;
        }
    }
    for d in 1..=dim {
        c.add_species(&format!("{OUT}{d}"), 0)?;
    }
    for (i, (_, p)) in points.iter().enumerate() {
        c.add_reaction(&[("z", 1)], &[(&format!("sel{}", i + 1), 1)], p.clone())?;
    }
    for i in 1..=points.len() {
        let sel = format!("sel{i}");
        for d in 1..=dim {
            let l = format!("l{i}_{d}");
            let out = format!("{OUT}{d}");
            c.add_reaction(&[(&l, 1), (&sel, 1)], &[(&sel, 1), (&out, 1)], Rational::one())?;
        }
    }
    for d in 1..=dim {
        c.add_output(&format!("{OUT}{d}"))?;
    }
    Ok(c)
}

/// Truncates an infinite-support source, compiles the kept prefix directly,
/// and adds a sink branch (`z → sink`, rate = lost mass) that leaves `out`
/// at zero.
pub fn compile_truncated(
    source: impl IntoIterator<Item = (u64, Rational)>,
    epsilon: &Rational,
) -> Result<(Crs, TruncationResult), CompileError> {
    let t = truncate(source, epsilon)?;
    let points: Vec<(u64, Rational)> = t.kept.iter().map(|(v, p)| (*v, p.clone())).collect();
    let mut c = build_direct(&points, None)?;
    if !t.mass_lost.is_zero() {
        c.add_species("sink", 0)?;
        c.add_reaction(&[("z", 1)], &[("sink", 1)], t.mass_lost.clone())?;
    }
    Ok((c, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crn::format_crn;
    use crate::crn::tests::example_one;
    use crate::rational::{int, rat};

    fn example_pmf() -> Pmf {
        Pmf::univariate([(2, rat(1, 6)), (5, rat(1, 3)), (10, rat(1, 2))]).unwrap()
    }

    #[test]
    fn direct_matches_handwritten_example() {
        let c = compile_direct(&example_pmf()).unwrap();
        assert_eq!(c.reactions().len(), 6);
        assert_eq!(c.species().len(), 8);
        assert!(c.is_nro());
        assert_eq!(c.initial_count("l1"), Ok(2));
        assert_eq!(c.initial_count("l2"), Ok(5));
        assert_eq!(c.initial_count("l3"), Ok(10));
        assert_eq!(c.initial_count("z"), Ok(1));
        // Same network as the hand-written one up to species names.
        let renamed = ["l11", "l22", "l33"]
            .iter()
            .zip(["sel1", "sel2", "sel3"])
            .fold(example_one(), |acc, (old, new)| acc.rename(new, old).unwrap());
        assert_eq!(format_crn(&c, &[]), format_crn(&renamed, &[]));
    }

    #[test]
    fn direct_small_cases() {
        let c = compile_direct(&Pmf::dirac(0)).unwrap();
        assert_eq!(c.reactions().len(), 2);
        assert!(matches!(compile_direct(&Pmf::point_mass(vec![1, 1])), Err(CompileError::Pmf(_))));
    }

    #[test]
    fn ratefree_counts() {
        let c = compile_direct_ratefree(&example_pmf()).unwrap();
        assert_eq!(
            ["w1", "w2", "w3"].map(|w| c.initial_count(w).unwrap()),
            [1, 2, 3]
        );
        assert!(c.reactions().iter().all(|r| r.rate == int(1)));
        let d = compile_direct_ratefree(&Pmf::dirac(0)).unwrap();
        assert_eq!(d.initial_count("w1"), Ok(1));
        let h = compile_direct_ratefree(&Pmf::univariate([(1, rat(1, 2)), (2, rat(1, 2))]).unwrap()).unwrap();
        assert_eq!((h.initial_count("w1"), h.initial_count("w2")), (Ok(1), Ok(1)));
    }

    #[test]
    fn joint_shape() {
        let f = Pmf::new(
            2,
            [(vec![3, 1], rat(1, 6)), (vec![3, 2], rat(1, 3)), (vec![1, 5], rat(1, 2))],
        )
        .unwrap();
        let c = compile_joint(&f).unwrap();
        assert_eq!(c.reactions().len(), 9);
        assert_eq!(c.output_names(), vec!["out1", "out2"]);
        assert!(c.is_nro());
    }

    #[test]
    fn truncated_shape() {
        let (c, t) = compile_truncated(crate::pmf::geometric(rat(1, 2)), &rat(1, 8)).unwrap();
        assert_eq!(t.kept_support(), vec![0, 1, 2, 3]);
        assert_eq!(t.mass_lost, rat(1, 16));
        assert_eq!(c.reactions().len(), 9);
        let f = example_pmf();
        let (d, t) = compile_truncated(f.iter1().map(|(v, p)| (v, p.clone())), &rat(1, 8)).unwrap();
        assert_eq!(t.mass_lost, int(0));
        assert_eq!(d, compile_direct(&f).unwrap());
    }

    #[test]
    fn truncated_poisson_keeps_zero_to_four() {
        let (_, t) = compile_truncated(crate::pmf::poisson_approx(int(1), 100), &rat(1, 100)).unwrap();
        assert_eq!(t.kept_support(), vec![0, 1, 2, 3, 4]);
        let tail = 1.0 - (-1.0f64).exp() * (1.0 + 1.0 + 0.5 + 1.0 / 6.0 + 1.0 / 24.0);
        assert!((crate::rational::to_f64(&t.mass_lost) - tail).abs() < 1e-12);
    }
}
