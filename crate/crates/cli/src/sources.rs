//! Builtin densities and pairs, and the triangular factorization used for
//! the 2×2 example densities.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specfact::bounds::{PairNode, PairSource, SampledPair, SourceInfo};
use specfact::circle::io::read_sampled;
use specfact::circle::{CircleGrid, SampledMatrixFunction, SampledScalarFunction};
use specfact::factorize::{factor_from_parts, scalar_outer_from_modulus, SpectralFactor};
use specfact::families::random::{perturbed_density, random_polynomial_density};
use specfact::families::{ExampleKind, ExamplePair, ExampleParams};

use crate::run::{CliError, RunConfig};

pub const DEFAULT_GRID: usize = 256;
/// Eigenvalue floor added to the random polynomial densities.
const RANDOM_SHIFT: f64 = 0.5;

pub fn example_kind(family: &str) -> Option<ExampleKind> {
    match family {
        "ex1" => Some(ExampleKind::Ex1),
        "ex2" => Some(ExampleKind::Ex2),
        _ => None,
    }
}

pub fn example_pair(
    kind: ExampleKind,
    run: &RunConfig,
    grid_n: Option<usize>,
) -> Result<ExamplePair, CliError> {
    let params = ExampleParams {
        delta: run.delta,
        ..ExampleParams::new(kind, run.p1, run.eps)
    };
    Ok(ExamplePair::new(params, grid_n)?)
}

fn grid(size: usize) -> Result<CircleGrid, CliError> {
    CircleGrid::new(size).map_err(|e| CliError::Parse(format!("--grid-n {size}: {e}")))
}

/// `[[2, ½ + ¼i], [½ − ¼i, 1]]` on every node.
pub fn const_spd(size: usize) -> Result<SampledMatrixFunction, CliError> {
    let c = Complex64::new;
    let m = [c(2.0, 0.0), c(0.5, 0.25), c(0.5, -0.25), c(1.0, 0.0)];
    Ok(SampledMatrixFunction::constant(&grid(size)?, 2, &m))
}

/// `F` and, when `perturb` is set, `G = F + ε·BB*` from the same seed.
pub fn random_densities(
    run: &RunConfig,
    size: usize,
    perturb: bool,
) -> Result<(SampledMatrixFunction, SampledMatrixFunction), CliError> {
    let grid = grid(size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let f = random_polynomial_density(&mut rng, &grid, run.dim, run.degree, RANDOM_SHIFT);
    let g = if perturb {
        perturbed_density(&mut rng, &f, run.degree, run.eps)
    } else {
        f.clone()
    };
    Ok((f, g))
}

/// Either an example pair with known factors or a pair factorized here.
pub enum Source {
    Example(ExamplePair),
    Sampled(SampledPair),
}

impl PairSource for Source {
    fn grid(&self) -> &CircleGrid {
        match self {
            Self::Example(p) => p.grid(),
            Self::Sampled(p) => p.grid(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Self::Example(p) => p.dim(),
            Self::Sampled(p) => p.dim(),
        }
    }

    fn fill(&self, j: usize, node: &mut PairNode) {
        match self {
            Self::Example(p) => p.fill(j, node),
            Self::Sampled(p) => p.fill(j, node),
        }
    }

    fn info(&self) -> SourceInfo {
        match self {
            Self::Example(p) => p.info(),
            Self::Sampled(p) => p.info(),
        }
    }
}

/// Builds the pair of `run` on a grid of `size` nodes (`None` for the
/// family default). File pairs ignore `size`.
pub fn pair_source(run: &RunConfig, size: Option<usize>) -> Result<Source, CliError> {
    let wilson = run.wilson();
    let labelled = |mut pair: SampledPair, label: &str| {
        pair.info.label = label.into();
        pair.info.parameters.insert("eps".into(), run.eps);
        pair.info.parameters.insert("seed".into(), run.seed as f64);
        pair
    };
    match run.family.as_str() {
        "ex1" | "ex2" => {
            let kind = example_kind(&run.family).expect("matched above");
            Ok(Source::Example(example_pair(kind, run, size)?))
        }
        "random" | "identical" => {
            let perturb = run.family == "random";
            let (f, g) = random_densities(run, size.unwrap_or(DEFAULT_GRID), perturb)?;
            let pair = SampledPair::factorize(f, g, &wilson)?;
            Ok(Source::Sampled(labelled(pair, &run.family)))
        }
        "file" => {
            let (Some(f), Some(g)) = (&run.input, &run.input_g) else {
                return Err(CliError::Parse(
                    "the file pair needs both --input and --input-g".into(),
                ));
            };
            let pair = SampledPair::factorize(read_sampled(f)?, read_sampled(g)?, &wilson)?;
            Ok(Source::Sampled(labelled(pair, "file")))
        }
        other => Err(CliError::Parse(format!(
            "unknown pair family `{other}` (expected ex1, ex2, random, identical or file)"
        ))),
    }
}

/// Samples `F` and `G` of an example pair.
pub fn example_densities(pair: &ExamplePair) -> (SampledMatrixFunction, SampledMatrixFunction) {
    let grid = pair.grid().clone();
    let mut f = SampledMatrixFunction::constant(&grid, 2, &[Complex64::new(0.0, 0.0); 4]);
    let mut g = f.clone();
    let mut node = PairNode::zeros(2);
    for j in 0..grid.size() {
        pair.fill(j, &mut node);
        f.node_mut(j).copy_from_slice(&node.f);
        g.node_mut(j).copy_from_slice(&node.g);
    }
    (f, g)
}

/// Factor of a 2×2 density whose off-diagonal quotient `F₂₁/conj(h₁)` is
/// analytic: `h₁` is outer with `|h₁|² = F₁₁`, `l = F₂₁/conj(h₁)` and `h₂` is
/// outer with `|h₂|² = F₂₂ − |l|²`. The result is normalized at the origin.
pub fn triangular_factor(density: &SampledMatrixFunction) -> Result<SpectralFactor, CliError> {
    let grid = density.grid().clone();
    let root = |values: Vec<f64>| -> Result<SampledScalarFunction, CliError> {
        if let Some(index) = values.iter().position(|v| !(*v > 0.0)) {
            return Err(CliError::Precondition(format!(
                "density is not positive definite at node {index}"
            )));
        }
        SampledScalarFunction::from_real(&grid, values.into_iter().map(f64::sqrt).collect())
            .map_err(|e| CliError::Failure(e.to_string()))
    };
    let f11: Vec<f64> = density.nodes().map(|m| m[0].re).collect();
    let (h1, h1_zero) = scalar_outer_from_modulus(&root(f11)?)?;
    let lower: Vec<Complex64> = density
        .nodes()
        .zip(h1.values())
        .map(|(m, h)| m[2] / h.conj())
        .collect();
    let schur: Vec<f64> = density
        .nodes()
        .zip(&lower)
        .map(|(m, l)| m[3].re - l.norm_sqr())
        .collect();
    let (h2, h2_zero) = scalar_outer_from_modulus(&root(schur)?)?;
    let lower_zero = lower.iter().sum::<Complex64>() / grid.size() as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut plus = SampledMatrixFunction::constant(&grid, 2, &[zero; 4]);
    for (j, m) in plus.nodes_mut().enumerate() {
        m.copy_from_slice(&[h1.values()[j], zero, lower[j], h2.values()[j]]);
    }
    let at_zero = vec![
        Complex64::new(h1_zero, 0.0),
        zero,
        lower_zero,
        Complex64::new(h2_zero, 0.0),
    ];
    Ok(factor_from_parts(plus, at_zero, density)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_factor_of_polynomial_density() {
        // F = A A* with A = [[1 − z/2, 0], [z/3, 2]] lower triangular and outer.
        let grid = CircleGrid::new(128).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let a = |t: f64| {
            let z = Complex64::from_polar(1.0, t);
            [1.0 - z * 0.5, zero, z / 3.0, Complex64::new(2.0, 0.0)]
        };
        let f = SampledMatrixFunction::from_fn(&grid, 2, |t, out| {
            let m = a(t);
            specfact::matrix::dense::mul_adjoint(&m, &m, 2, out);
        });
        let factor = triangular_factor(&f).unwrap();
        assert!(factor.residual < 1e-13);
        assert!(factor.det_identity_defect(&f).unwrap() < 1e-13);
        let at_zero = [
            Complex64::new(1.0, 0.0),
            zero,
            zero,
            Complex64::new(2.0, 0.0),
        ];
        for (x, y) in factor.at_zero.iter().zip(at_zero) {
            assert!((x - y).norm() < 1e-12);
        }
        for (j, m) in factor.plus.nodes().enumerate() {
            for (x, y) in m.iter().zip(a(grid.node(j))) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn random_densities_depend_only_on_seed() {
        let run = RunConfig::new("verify", "random", "out".into());
        let (f1, g1) = random_densities(&run, 64, true).unwrap();
        let (f2, g2) = random_densities(&run, 64, true).unwrap();
        assert_eq!(f1.data(), f2.data());
        assert_eq!(g1.data(), g2.data());
        let (f3, _) = random_densities(&run, 128, true).unwrap();
        let coarse: Vec<f64> = f1.nodes().map(|m| m[0].re).collect();
        assert!(
            f3.nodes().all(|m| m[0].re >= 0.5 - 1e-12) && coarse.iter().all(|&v| v >= 0.5 - 1e-12)
        );
    }
}
