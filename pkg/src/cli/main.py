"""qapca command line: fit, experiment, embed and serve"""
import argparse
import asyncio
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.baselines.pca import l1_bf, l2_pca
from src.cli.config import RunConfig
from src.config import settings
from src.embedding.database import create_engine_for, init_db, session_factory
from src.embedding.store import EmbeddingStore
from src.errors import QapcaError
from src.evaluation.io import SCHEMAS, CsvSchema, load_csv, write_table
from src.experiments.protocols import (
    EXPERIMENT_RESTARTS, EXPERIMENTS, GaussianExperiment, TepExperiment, WbcdExperiment, run_experiment,
)
from src.ising.problem import SolverKind
from src.qapca.core import l1_objective, qapca_multi, qapca_recursive, qapca_single

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    """Flags mirrored onto RunConfig; None means "not given" """
    parser.add_argument("--config", type=Path, help="TOML or JSON run config; flags override it")
    parser.add_argument("--k", type=int, help="Number of components")
    parser.add_argument("--epsilon", type=float, nargs="+", dest="epsilons", help="Orthogonality weight(s)")
    parser.add_argument("--reads", type=int, help="Anneal reads per QAPCA solve")
    parser.add_argument("--reads-per-component", type=int, help="Anneal reads per QAPCA-R component")
    parser.add_argument("--solver", choices=[s.value for s in SolverKind], help="Ising backend")
    parser.add_argument("--remote-url", help="Annealer endpoint for --solver remote")
    parser.add_argument("--seed", type=int, help="Base seed")
    parser.add_argument("--sweeps", type=int, help="SA sweeps per read")
    parser.add_argument("--band-climit", type=int, dest="c_limit", help="Coupler budget C_limit")
    parser.add_argument("--n-limit", type=int, help="Largest fully embeddable N before chain derating")
    parser.add_argument("--restarts", type=int, help="L1-BF initializations")
    parser.add_argument("--out", type=Path, help="Output directory")
    parser.add_argument("--format", choices=["csv", "json"], help="Result table format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qapca", description="L1-PCA through Ising reductions")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Fit components to a CSV of samples")
    fit.add_argument("input", type=Path, help="CSV with one sample per row")
    fit.add_argument("--schema", dest="schema_name", choices=["plain", *SCHEMAS], help="Column layout")
    fit.add_argument("--method", choices=["qapca", "qapca-r", "l1-bf", "svd"], help="Fitting method")
    _add_run_flags(fit)
    fit.set_defaults(handler=cmd_fit)

    experiment = sub.add_parser("experiment", help="Run an experiment protocol")
    experiment.add_argument("name", choices=sorted(EXPERIMENTS), help="Protocol")
    experiment.add_argument("--trials", type=int, help="Independent realizations")
    experiment.add_argument("--n", type=int, nargs="+", dest="ns", help="Training sample count(s)")
    experiment.add_argument("--methods", nargs="+", help="Subset of qapca qapca-r l1-bf svd")
    experiment.add_argument("--dimension", type=int, help="Feature count of synthetic data")
    experiment.add_argument("--data", type=Path, help="WBCD CSV")
    experiment.add_argument("--train", type=Path, help="TEP fault-free training CSV")
    experiment.add_argument("--test", type=Path, help="TEP test CSV")
    experiment.add_argument("--contamination", type=float, help="Fraction of Gaussian training samples to corrupt")
    experiment.add_argument("--sigma", type=float, help="Std of the corrupting noise")
    experiment.add_argument("--workers", type=int, help="Trial worker processes")
    _add_run_flags(experiment)
    experiment.set_defaults(handler=cmd_experiment)

    embed = sub.add_parser("embed", help="Compute or fetch a stored embedding layout")
    embed.add_argument("n", type=int, help="Samples N")
    embed.add_argument("--refresh", action="store_true", help="Rebuild even when stored")
    _add_run_flags(embed)
    embed.set_defaults(handler=cmd_embed)

    serve = sub.add_parser("serve", help="Run the mock annealer service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.set_defaults(handler=cmd_serve)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    overrides = {
        name: value
        for name, value in vars(args).items()
        if name in RunConfig.model_fields
    }
    return RunConfig.load(getattr(args, "config", None), overrides)


def _fit(config: RunConfig, X: np.ndarray) -> tuple[np.ndarray, Optional[np.ndarray], dict]:
    """Basis, assignment and diagnostics for the configured method"""
    if len(config.epsilons) != 1:
        raise ValueError("fit takes a single --epsilon")
    if config.method == "svd":
        return l2_pca(X, config.k), None, {}
    if config.method == "l1-bf":
        result = l1_bf(X, config.k, config.l1bf_config())
        return result.basis, result.assignment.B, {
            "objective": result.objective,
            "restart": result.restart,
            "flips": len(result.history) - 1,
        }
    qcfg = config.qapca_config()
    if config.method == "qapca-r":
        result = qapca_recursive(X, qcfg)
    elif config.k == 1:
        result = qapca_single(X, qcfg)
    else:
        result = qapca_multi(X, qcfg)
    return result.basis, result.assignment.B, result.diagnostics()


def cmd_fit(args: argparse.Namespace) -> int:
    config = _run_config(args)
    if config.k is None:
        config = config.model_copy(update={"k": 1})
    if config.input is None:
        raise ValueError("fit needs an input CSV")
    if not config.input.exists():
        raise FileNotFoundError(f"input file not found: {config.input}")
    schema = SCHEMAS.get(config.schema_name, CsvSchema())
    data = load_csv(config.input, schema)
    X = data.train

    started = time.perf_counter()
    basis, B, diagnostics = _fit(config, X)
    elapsed = time.perf_counter() - started

    out, fmt = config.out, config.format
    components = [f"r{i + 1}" for i in range(basis.shape[1])]
    table = pd.DataFrame(basis, columns=components)
    table.insert(0, "feature", data.feature_names)
    write_table(table, out / f"basis.{fmt}", fmt)
    if B is not None:
        write_table(pd.DataFrame(B, columns=[f"b{i + 1}" for i in range(B.shape[1])]), out / f"assignment.{fmt}", fmt)
        diagnostics.setdefault("objective", l1_objective(X, B))
    diagnostics.update({"method": config.method, "D": int(X.shape[0]), "N": int(X.shape[1]), "elapsed_s": elapsed})
    (out / "diagnostics.json").write_text(json.dumps(diagnostics, indent=2, default=float))
    config.echo(out / "run_config.json")

    logger.info(f"Fitted {basis.shape[1]} component(s) to {X.shape[1]} samples with {config.method}")
    print(f"wrote {out}")
    return EXIT_OK


def experiment_config(name: str, config: RunConfig):
    """Protocol config from the run config"""
    common = {
        "trials": config.trials,
        "seed": config.seed,
        "epsilons": config.epsilons,
        "qapca": config.qapca_config(),
        "l1bf": config.l1bf_config(default_restarts=EXPERIMENT_RESTARTS),
        "workers": config.workers,
    }
    if config.k is not None:
        common["k"] = config.k
    if config.ns is not None:
        common["ns"] = config.ns
    if config.methods is not None:
        common["methods"] = config.methods
    if name == "gaussian":
        extra = {} if config.dimension is None else {"dimension": config.dimension}
        return GaussianExperiment(
            contamination_fraction=config.contamination,
            contamination_sigma=config.sigma,
            **extra,
            **common,
        )
    if name == "wbcd":
        if config.data is None:
            raise ValueError("wbcd needs --data pointing at the WBCD CSV")
        if not config.data.exists():
            raise FileNotFoundError(f"data file not found: {config.data}")
        return WbcdExperiment(data_path=config.data, **common)
    for path in (config.train, config.test):
        if path is not None and not path.exists():
            raise FileNotFoundError(f"data file not found: {path}")
    extra = {} if config.dimension is None else {"dimension": config.dimension}
    return TepExperiment(train_path=config.train, test_path=config.test, noise_sigma=config.sigma, **extra, **common)


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _run_config(args)
    protocol = experiment_config(args.name, config)
    result = run_experiment(args.name, protocol)
    paths = result.write(config.out, config.format)
    config.echo(config.out / "run_config.json")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


async def _embed(n: int, k: int, config: RunConfig, refresh: bool) -> dict:
    engine = create_engine_for(settings.database_url)
    try:
        await init_db(engine)
        store = EmbeddingStore()
        budget = config.budget()
        async with session_factory(engine)() as session:
            if refresh:
                await store.delete(session, n, k, budget.c_limit)
            layout, stored = await store.get_or_build(session, n, k, budget)
    finally:
        await engine.dispose()
    return {
        "N": n,
        "K": k,
        "kappa": layout.kappa,
        "band_offset": layout.band_offset,
        "c_limit": budget.c_limit,
        "coupler_count": layout.coupler_count,
        "from_store": stored,
        "layout": layout.to_dict(),
    }


def cmd_embed(args: argparse.Namespace) -> int:
    config = _run_config(args)
    k = config.k or 1
    summary = asyncio.run(_embed(args.n, k, config, args.refresh))
    if args.out is not None:
        path = config.out / f"embedding_N{args.n}_K{k}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(summary))
        logger.info(f"Wrote layout to {path}")
    print(json.dumps({key: value for key, value in summary.items() if key != "layout"}))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from src.api.main import run
    run(host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        return args.handler(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as e:
        print(f"error: invalid configuration\n{e}", file=sys.stderr)
        return EXIT_USAGE
    except QapcaError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
