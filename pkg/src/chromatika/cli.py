"""Command-line interface.

Exit codes: 0 success, 1 user error (bad usage or bad inputs), 2 internal
error. Training and ingestion are offline batch commands; ``serve`` exposes
the trained model over HTTP for interactive clients.
"""

import json
import sys
import traceback
from pathlib import Path

import click
import numpy as np

from . import jsonutil
from .apps import recolor_pattern, recommend_palettes, rerank_images, select_pixels
from .checkpoint import load_model, save_model
from .clickmodel import (
    load_trials_csv,
    relevance,
    relevance_report,
    save_report_csv,
    save_trials_csv,
    simulate_survey,
)
from .corpus import build_corpus, load_corpus, load_manifest, save_corpus
from .errors import ChromatikaError
from .palette import load_pool, nearest_palettes
from .synthetic import generate_synthetic_corpus
from .topicmodel import HyperParams, train

_MODEL_OPTION = click.option(
    "--model",
    "model_path",
    envvar="CHROMATIKA_MODEL",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Model checkpoint directory (or set CHROMATIKA_MODEL).",
)
_POOL_OPTION = click.option(
    "--pool",
    "pool_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Palette pool JSON file.",
)


@click.group()
def cli():
    """Color-word topic mining and semantic color tools."""


@cli.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def ingest(manifest, output):
    """Build a corpus file from a manifest of images and transcripts."""
    corpus = build_corpus(load_manifest(manifest))
    save_corpus(corpus, output)
    click.echo(
        f"wrote {output}: {len(corpus.documents)} documents, "
        f"vocabulary {corpus.vocabulary.size}, excluded {len(corpus.excluded_ids)}",
        err=True,
    )


def _resolve_hyperparams(config, overrides) -> HyperParams:
    base: dict = {}
    if config and config != "default":
        with open(config, "r", encoding="utf-8") as fh:
            base = json.load(fh)
    base.update({k: v for k, v in overrides.items() if v is not None})
    return HyperParams(**base)


@cli.command(name="train")
@click.argument("corpus_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(file_okay=False))
@click.option("--config", default="default", help="'default' or a JSON file of hyperparameters.")
@click.option("--topics", "n_topics", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=None)
@click.option("--gamma", type=float, default=None)
@click.option("--sweeps", type=int, default=None)
@click.option("--burn-in", "burn_in", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--estimate", type=click.Choice(["final", "average"]), default=None)
def train_cmd(corpus_file, output, config, **overrides):
    """Train the topic model on a corpus file and write a checkpoint."""
    corpus = load_corpus(corpus_file)
    hp = _resolve_hyperparams(config, overrides)
    model = train(corpus, hp)
    save_model(model, output)
    click.echo(f"wrote checkpoint {output} (K={hp.n_topics}, sweeps={hp.sweeps})", err=True)


@cli.command()
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--topics", "n_topics", type=int, default=3)
@click.option("--words", "n_words", type=int, default=30)
@click.option("--colors", "n_colors", type=int, default=30)
@click.option("--docs", "n_docs", type=int, default=50)
@click.option("--tokens-per-doc", type=int, default=100)
@click.option("--sharpness", type=float, default=1.0)
@click.option("--seed", type=int, default=0)
@click.option("--truth-out", type=click.Path(dir_okay=False), default=None,
              help="Also write the planted topics and realized mixtures as JSON.")
def generate(output, n_topics, n_words, n_colors, n_docs, tokens_per_doc, sharpness, seed, truth_out):
    """Generate a synthetic corpus with planted topics."""
    syn = generate_synthetic_corpus(
        n_topics, n_words, n_colors, n_docs, tokens_per_doc, sharpness, seed
    )
    save_corpus(syn.corpus, output)
    if truth_out:
        jsonutil.dump_path(
            {
                "phi_star": syn.phi_star.tolist(),
                "psi_star": syn.psi_star.tolist(),
                "theta_star": syn.theta_star.tolist(),
            },
            truth_out,
        )
    click.echo(f"wrote {output}: {n_docs} synthetic documents", err=True)


def _hits_payload(hits) -> list[dict]:
    return [
        {
            "rank": rank + 1,
            "pool_index": idx,
            "source_id": pal.source_id,
            "colors": [list(c) for c in pal.colors],
            "score": score,
        }
        for rank, (idx, pal, score) in enumerate(hits)
    ]


def _emit(payload: dict, output: str | None) -> None:
    text = jsonutil.dumps(payload, indent=2) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@cli.command()
@_MODEL_OPTION
@_POOL_OPTION
@click.option("--topic", "topic", type=int, required=True)
@click.option("-n", "count", type=int, default=5)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def palettes(model_path, pool_path, topic, count, output):
    """Nearest pool palettes for one color topic."""
    model = load_model(model_path)
    pool = load_pool(pool_path)
    if not 0 <= topic < model.n_topics:
        raise click.UsageError(f"topic {topic} out of range (K={model.n_topics})")
    hits = nearest_palettes(model.phi[topic], pool, count)
    _emit({"topic": topic, "palettes": _hits_payload(hits)}, output)


@cli.command()
@click.argument("text")
@_MODEL_OPTION
@_POOL_OPTION
@click.option("-n", "count", type=int, default=5)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def query(text, model_path, pool_path, count, output):
    """Topic weights and recommended palettes for a text query."""
    model = load_model(model_path)
    pool = load_pool(pool_path)
    q, hits = recommend_palettes(text, model, pool, count)
    _emit(
        {
            "text": text,
            "weights": [float(v) for v in q.weights],
            "dropped_tokens": list(q.dropped),
            "palettes": _hits_payload(hits),
        },
        output,
    )


@cli.command()
@click.argument("text")
@click.argument("images", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@_MODEL_OPTION
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def rerank(text, images, model_path, output):
    """Rank images by color affinity to a text query."""
    model = load_model(model_path)
    ranking = rerank_images(text, [(str(p), p) for p in images], model)
    _emit(
        {
            "text": text,
            "ranking": [
                {"name": name, "score": score, "rank": rank + 1}
                for rank, (name, score) in enumerate(ranking)
            ],
        },
        output,
    )


@cli.command(name="select-pixels")
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.argument("text")
@_MODEL_OPTION
@click.option("--tau", type=float, default=0.5, show_default=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--mask-out", type=click.Path(dir_okay=False), default=None,
              help="Also write the selection mask as a 1-bit PNG.")
def select_pixels_cmd(image, text, model_path, tau, output, mask_out):
    """Keep query-related colors, turn the rest grayscale."""
    from PIL import Image

    model = load_model(model_path)
    out, mask = select_pixels(image, text, model, tau=tau)
    Image.fromarray(out).save(output, format="PNG")
    if mask_out:
        Image.fromarray(mask).convert("1").save(mask_out, format="PNG")
    click.echo(f"wrote {output} ({int(mask.sum())} pixels kept)", err=True)


@cli.command()
@click.argument("image", type=click.Path(exists=True, dir_okay=False))
@click.argument("text")
@_MODEL_OPTION
@_POOL_OPTION
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def recolor(image, text, model_path, pool_path, output):
    """Colorize a grayscale pattern with the query's best palette."""
    from PIL import Image

    model = load_model(model_path)
    pool = load_pool(pool_path)
    out = recolor_pattern(image, text, model, pool)
    Image.fromarray(out).save(output, format="PNG")
    click.echo(f"wrote {output}", err=True)


@cli.command(name="survey-simulate")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--topics", "n_topics", type=int, default=12, show_default=True)
@click.option("--trials-per-palette", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--bias", default="0.33,0.36,0.34", show_default=True,
              help="Position biases b1,b2,b3.")
@click.option("--relevance-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON KxK ground-truth relevance matrix; default draws uniform [0,0.9].")
@click.option("--set-id", type=int, default=1, show_default=True)
@click.option("--truth-out", type=click.Path(dir_okay=False), default=None,
              help="Write the ground-truth r and b used.")
def survey_simulate(output, n_topics, trials_per_palette, seed, bias, relevance_file, set_id, truth_out):
    """Simulate survey trials from a known click model."""
    b = np.array([float(x) for x in bias.split(",")])
    if relevance_file:
        with open(relevance_file, "r", encoding="utf-8") as fh:
            r = np.array(json.load(fh), dtype=np.float64)
    else:
        r = np.random.default_rng(seed).uniform(0.0, 0.9, (n_topics, n_topics))
    trials = simulate_survey(r, b, trials_per_palette, n_topics, seed=seed, set_id=set_id)
    save_trials_csv(trials, output)
    if truth_out:
        jsonutil.dump_path({"r": r.tolist(), "b": b.tolist()}, truth_out)
    click.echo(f"wrote {output}: {len(trials)} trials", err=True)


@cli.command(name="survey-analyze")
@click.argument("trials_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--topics", "n_topics", type=int, required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the relevance matrix as CSV (per question set).")
@click.option("--std-divisor", type=click.Choice(["sample", "population"]),
              default="sample", show_default=True)
@click.option("--biases", default=None,
              help="Override position biases b1,b2,b3 instead of estimating them.")
def survey_analyze(trials_csv, n_topics, output, csv_out, std_divisor, biases):
    """Estimate intrinsic relevance from survey trials, per question set."""
    trials = load_trials_csv(trials_csv)
    if not trials:
        raise click.UsageError(f"{trials_csv} contains no trials")
    override = None
    if biases:
        override = np.array([float(x) for x in biases.split(",")])
    set_ids = sorted({t.set_id for t in trials})
    reports = []
    for sid in set_ids:
        subset = [t for t in trials if t.set_id == sid]
        result = relevance(subset, n_topics, position_biases=override)
        report = relevance_report(result, std_divisor=std_divisor)
        report["set_id"] = sid
        report["n_trials"] = len(subset)
        reports.append(report)
        if csv_out:
            path = Path(csv_out)
            target = (
                path
                if len(set_ids) == 1
                else path.with_name(f"{path.stem}_set{sid}{path.suffix}")
            )
            save_report_csv(result, target, std_divisor=std_divisor)
    _emit({"sets": reports}, output)


@cli.command()
@_MODEL_OPTION
@_POOL_OPTION
@click.option("--bind", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(model_path, pool_path, bind, port):
    """Serve the model over HTTP."""
    from .service import ServiceConfig
    from .service import serve as run_service

    run_service(ServiceConfig(model_path=model_path, pool_path=pool_path, bind=bind, port=port))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ChromatikaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1
    except Exception:
        traceback.print_exc()
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
