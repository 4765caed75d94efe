"""
fit subcommand: multilevel logistic regression by HMC.
"""

import logging
from pathlib import Path
from typing import Any, Dict

from calculations.summary import baseline_probability
from commands.diagnose import write_posterior_reports
from config.loader import RunConfig, require_paths
from data.survey import SurveyDataset, encode_design, parse_survey, response_balance
from models.multilevel_logistic import MultilevelLogisticModel, PriorSpec
from reporting.export import ReportGenerator, write_text
from samplers.hmc import ChainSet, HmcConfig, sample_model
from utils.errors import ConfigurationError, ModelFitError
from utils.helpers import timed_call

logger = logging.getLogger(__name__)


def hmc_config_from(config: RunConfig) -> HmcConfig:
    try:
        return HmcConfig(
            chains=config.chains,
            iterations=config.iterations,
            warmup_fraction=config.warmup_fraction,
            target_accept=config.target_accept,
            leapfrog_steps=config.leapfrog_steps,
            leapfrog_jitter=config.leapfrog_jitter,
            seed=config.seed,
        )
    except ValueError as e:
        raise ConfigurationError(str(e)) from e


def check_response(dataset: SurveyDataset):
    """
    Refuse a constant response and warn about levels that separate it.

    Raises:
        ModelFitError: Every record has the same response
    """
    responses = {record.vaccinated for record in dataset.records}
    if len(responses) == 1:
        value = responses.pop()
        raise ModelFitError(
            f"separation/degenerate response: all {len(dataset)} records have vaccinated = {value}"
        )
    balance = response_balance(dataset)
    separated = balance[(balance['records'] > 0) & balance['vaccinated_share'].isin([0.0, 1.0])]
    for _, row in separated.iterrows():
        logger.warning(
            f"Quasi-separation: every {row['group']}={row['level']} record has vaccinated = "
            f"{int(row['vaccinated_share'])}; its coefficient is driven by the prior"
        )


def fit_dataset(dataset: SurveyDataset, config: RunConfig):
    """Encode, build the model and sample. Returns (model, constrained ChainSet)."""
    check_response(dataset)
    design = encode_design(dataset)
    model = MultilevelLogisticModel(
        design, PriorSpec(config.beta_scale, config.sigma_alpha_hyper_scale)
    )
    chains, elapsed = timed_call(sample_model, model, hmc_config_from(config), config.workers)
    logger.info(f"Sampling finished in {elapsed:.1f} s")
    return model, chains.with_draws(model.constrain_draws(chains.draws))


def run_manifest(config: RunConfig, dataset: SurveyDataset, chains: ChainSet, max_rhat: float) -> Dict[str, Any]:
    return {
        'command': 'fit',
        'config': config.digest_values(),
        'records': len(dataset),
        'dropped_records': dataset.dropped_count,
        'drop_reasons': dict(dataset.drop_reasons),
        'states': list(dataset.states),
        'max_rhat': max_rhat,
        'divergences': chains.divergence_count.tolist(),
        'warmup_divergences': chains.warmup_divergences.tolist(),
        'accept_rate': chains.accept_rate.tolist(),
        'step_size': chains.step_size.tolist(),
    }


def cmd_fit(config: RunConfig) -> int:
    """
    Parse the survey, fit, and write posterior_summary.csv/.txt,
    random_intercepts.csv, diagnostics/, draws.csv and manifest.json.

    Raises:
        ConfigurationError: Survey path unset or missing
        InputDataError: Unusable survey file
        ModelFitError: Degenerate response or sampler failure
    """
    require_paths(config, 'survey')
    dataset = parse_survey(config.survey, schema=config.column_map)
    model, chains = fit_dataset(dataset, config)

    out_dir = Path(config.out_dir)
    generator = ReportGenerator(config.seed, config.digest)
    names = model.parameter_names()
    summary = write_posterior_reports(chains, names, out_dir, generator)

    write_text(
        out_dir / 'draws.csv',
        generator.export_to_csv(generator.draws_frame(chains.draws, names), 'Post-warmup draws'),
    )
    manifest = run_manifest(config, dataset, chains, summary.max_rhat)
    manifest['baseline_probability'] = baseline_probability(summary)
    write_text(out_dir / 'manifest.json', generator.manifest(manifest))

    logger.info(
        f"Fit written to {out_dir}: max split R-hat {summary.max_rhat:.4f}, "
        f"{int(chains.divergence_count.sum())} divergence(s)"
    )
    return 0
