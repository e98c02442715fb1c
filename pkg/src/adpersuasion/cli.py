#     Adpersuasion detects persuasive text and analyses political advertising.
#
#     Copyright (C) 2024  Adpersuasion contributors
#
#     This program is free software: you can redistribute it and/or modify
#     it under the terms of the GNU General Public License as published by
#     the Free Software Foundation, either version 3 of the License, or
#     (at your option) any later version.
#
#     This program is distributed in the hope that it will be useful,
#     but WITHOUT ANY WARRANTY; without even the implied warranty of
#     MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#     GNU General Public License for more details.
#
#     You should have received a copy of the GNU General Public License
#     along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Command line front end: ingest, split, train, calibrate, predict, evaluate, score-ads, analyze, synth.

Usage: adpersuasion [global flags] <command> [command flags]

Every command writes the resolved configuration to <out_dir>/run_config.json and embeds its hash
in the JSON reports. Exit codes: 0 success, 1 unexpected failure, 2 configuration, 3 input format,
4 missing or corrupt artifact, 5 stratification, 6 divergence, 7 undefined statistic.
"""

from pathlib import Path
from typing import Any, Callable, Optional, Sequence
import argparse
import json
import sys

import numpy as np
import pandas as pd

from adpersuasion import analytics
from adpersuasion.analytics import Bucket
from adpersuasion.config import RunConfig
from adpersuasion.corpus import (LabelSchema, binarize, corpus_summary, generate_synthetic, generate_synthetic_ads,
                                 load_ads, load_sentences, stratified_split, write_ads, write_sentences)
from adpersuasion.errors import AdPersuasionError, InputFormatError, MissingArtifactError, UndefinedStatisticError
from adpersuasion.features import TfidfFeaturizer
from adpersuasion.log import LogLevel, configure, get_logger
from adpersuasion.log.log_writers.console_writer import ConsoleWriter
from adpersuasion.log.log_writers.jsonl_writer import JsonLinesWriter
from adpersuasion.metrics import binary_accuracy, binary_f1, evaluation_report
from adpersuasion.model import (Target, apply_threshold, calibrate, collapse_to_binary, label_matrix, load_model,
                                predict_texts, save_model, train)

log = get_logger()


def write_json(path: Path, data: dict[str, Any], cfg: RunConfig):
    """Sorted, indented JSON with the config hash of the run."""
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"config_hash": cfg.config_hash(), **data}
    path.write_text(json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def write_csv(path: Path, frame: pd.DataFrame):
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.10g")


def _schema(cfg: RunConfig) -> LabelSchema:
    if cfg.paths.schema:
        return LabelSchema.from_file(cfg.paths.schema)
    local = cfg.paths.out("schema.json")
    if local.exists():
        return LabelSchema.from_file(local)
    return LabelSchema.semeval()


def _input(explicit: Optional[str], configured: Optional[str], default: Optional[Path], what: str) -> Path:
    for candidate in (explicit, configured):
        if candidate:
            return Path(candidate)
    if default is None:
        raise MissingArtifactError(f"no {what} given")
    return default


def _binarized(path: Path, schema: LabelSchema):
    return [binarize(s) for s in load_sentences(path, schema)]


# ---------------------------------------------------------------- commands

def cmd_ingest(args: argparse.Namespace, cfg: RunConfig):
    schema = _schema(cfg)
    path = _input(args.sentences, cfg.paths.sentences, None, "sentence corpus")
    corpus = _binarized(path, schema)
    if not corpus:
        raise InputFormatError("sentence corpus is empty", str(path))
    write_sentences(cfg.paths.out("corpus.jsonl"), corpus, schema)
    schema.to_file(cfg.paths.out("schema.json"))
    summary = corpus_summary(corpus, schema).to_dict()
    summary["schema_id"] = schema.schema_id
    ads_path = args.ads or cfg.paths.ads
    if ads_path:
        summary["n_ads"] = len(load_ads(ads_path))
    write_json(cfg.paths.out("corpus_summary.json"), summary, cfg)
    log.info("ingested corpus", sentences=len(corpus), docs=summary["n_docs"])


def cmd_split(args: argparse.Namespace, cfg: RunConfig):
    schema = _schema(cfg)
    path = _input(args.corpus, None, cfg.paths.out("corpus.jsonl"), "corpus")
    split = stratified_split(_binarized(path, schema), cfg.training.test_fraction, cfg.seed)
    manifest = split.manifest()
    train_side = split.train
    if cfg.training.dev_fraction > 0:
        # the dev set comes out of the training side, test stays untouched
        inner = stratified_split(split.train, cfg.training.dev_fraction, cfg.seed)
        train_side = inner.train
        write_sentences(cfg.paths.out("dev.jsonl"), inner.test, schema)
        manifest["dev"] = {"dev_fraction": cfg.training.dev_fraction, "n_fit": len(inner.train),
                           "n_dev": len(inner.test), "dev_ids": [[s.doc_id, s.sentence_id] for s in inner.test]}
    write_sentences(cfg.paths.out("train.jsonl"), train_side, schema)
    write_sentences(cfg.paths.out("test.jsonl"), split.test, schema)
    write_json(cfg.paths.out("split_manifest.json"), manifest, cfg)


def cmd_train(args: argparse.Namespace, cfg: RunConfig):
    schema = _schema(cfg)
    target = Target(args.target or cfg.training.target)
    path = _input(args.train, None, cfg.paths.out("train.jsonl"), "training split")
    sentences = _binarized(path, schema)
    loss = cfg.loss.resolve(label_matrix(sentences, schema, target))
    featurizer = TfidfFeaturizer(cfg.prep, min_df=cfg.training.min_df, use_bigrams=cfg.training.use_bigrams)
    model = train(sentences, featurizer, schema, loss, cfg.training.lr, cfg.training.epochs, cfg.seed, target,
                  cfg.training.divergence_factor)
    save_model(cfg.paths.model_path(), model)
    write_json(cfg.paths.out("training.json"), {
        "target": target.value,
        "n_train": len(sentences),
        "n_features": model.n_features,
        "loss": loss.to_dict(),
        "final_loss": model.loss_history[-1],
        "loss_history": list(model.loss_history),
        "vocab_hash": model.vocab_hash,
    }, cfg)


def _gold(sentences, schema: LabelSchema, target: Target) -> np.ndarray:
    return label_matrix(sentences, schema, target).astype(np.int64)


def cmd_calibrate(args: argparse.Namespace, cfg: RunConfig):
    schema = _schema(cfg)
    model = load_model(cfg.paths.model_path())
    path = _input(args.dev, None, cfg.paths.out("dev.jsonl"), "development split")
    if not path.exists():
        raise MissingArtifactError(f"development split {path} not found, run split with dev_fraction > 0 "
                                   "or pass --dev")
    sentences = _binarized(path, schema)
    if not sentences:
        raise InputFormatError("development split is empty", str(path))
    P = predict_texts(model, [s.text for s in sentences])
    result = calibrate(P, _gold(sentences, schema, model.target), cfg.calibration.grid,
                       cfg.calibration.threshold, cfg.calibration.include_absent)
    write_json(cfg.paths.out("calibration.json"), {**result.to_dict(), "dev_set": str(path)}, cfg)
    write_csv(cfg.paths.out("calibration_curve.csv"), result.to_frame())


def _threshold(cfg: RunConfig, explicit: bool) -> tuple[float, dict[str, Any]]:
    """
    The --threshold flag wins, then a recommended threshold from calibration.json, then the config.
    :return: threshold and a record of where it came from.
    """
    if explicit:
        return cfg.calibration.threshold, {"source": "flag"}
    calibration = cfg.paths.out("calibration.json")
    if calibration.exists():
        document = json.loads(calibration.read_text(encoding="utf-8"))
        return float(document["recommended_threshold"]), {"source": "calibration",
                                                          "dev_set": document.get("dev_set")}
    return cfg.calibration.threshold, {"source": "config"}


def cmd_predict(args: argparse.Namespace, cfg: RunConfig):
    schema = _schema(cfg)
    model = load_model(cfg.paths.model_path())
    threshold, threshold_source = _threshold(cfg, args.threshold is not None)
    path = _input(args.sentences, cfg.paths.sentences, None, "sentence file")
    sentences = load_sentences(path, schema)
    P = predict_texts(model, [s.text for s in sentences])
    predicted = apply_threshold(P, threshold) if len(sentences) else np.zeros((0, model.n_labels), np.int64)
    out = cfg.paths.out("predictions.jsonl")
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="\n") as f:
        for i, sentence in enumerate(sentences):
            record = {
                "doc_id": sentence.doc_id,
                "sentence_id": sentence.sentence_id,
                "probabilities": {name: float(P[i, j]) for j, name in enumerate(model.label_names)},
                "labels": [name for j, name in enumerate(model.label_names) if predicted[i, j]],
                "persuasive": bool(predicted[i].max(initial=0)),
                "threshold": threshold,
            }
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    log.info("wrote predictions", n=len(sentences), threshold=threshold)


def cmd_evaluate(args: argparse.Namespace, cfg: RunConfig):
    schema = _schema(cfg)
    model = load_model(cfg.paths.model_path())
    threshold, threshold_source = _threshold(cfg, args.threshold is not None)
    path = _input(args.test, None, cfg.paths.out("test.jsonl"), "test split")
    sentences = _binarized(path, schema)
    if not sentences:
        raise InputFormatError("test split is empty", str(path))
    P = predict_texts(model, [s.text for s in sentences])
    gold = _gold(sentences, schema, model.target)
    binary = model.target is Target.BINARY
    report = evaluation_report(apply_threshold(P, threshold), gold, model.label_names, binary,
                               cfg.calibration.include_absent).to_dict()
    report["threshold"] = threshold
    report["threshold_source"] = threshold_source
    report["target"] = model.target.value
    report["n_test"] = len(sentences)
    if not binary:
        flags = collapse_to_binary(P, threshold)
        gold_binary = _gold(sentences, schema, Target.BINARY)[:, 0]
        report["binary_transfer"] = {"accuracy": binary_accuracy(flags, gold_binary),
                                     "f1": binary_f1(flags, gold_binary)}
    curve = calibrate(P, gold, cfg.calibration.grid, cfg.calibration.threshold, cfg.calibration.include_absent)
    write_json(cfg.paths.out("evaluation.json"), report, cfg)
    write_csv(cfg.paths.out("calibration_curve.csv"), curve.to_frame())
    log.info("evaluated model", f1_micro=report["f1_micro"], f1_macro=report["f1_macro"],
             accuracy=report["accuracy"])


def _score(cfg: RunConfig, ads_path: Path, threshold: float) -> list[analytics.ScoredAd]:
    model = load_model(cfg.paths.model_path())
    return analytics.score_ads(load_ads(ads_path), model, threshold, cfg.analysis.thresholds())


def cmd_score_ads(args: argparse.Namespace, cfg: RunConfig):
    ads_path = _input(args.ads, cfg.paths.ads, None, "ad corpus")
    scored = _score(cfg, ads_path, _threshold(cfg, args.threshold is not None)[0])
    analytics.write_scored_ads(cfg.paths.out("scored_ads.csv"), scored)


SUMMARY_ROWS = (
    ("Ads (%)", lambda s: f"{s.pct_of_total:.1f}"),
    ("Avg impressions", lambda s: f"{s.avg_impressions:,.0f}"),
    ("Avg ad spending", lambda s: f"{s.avg_spend:,.1f}"),
    ("Avg ad duration (days)", lambda s: f"{s.avg_duration_days:.1f}"),
    ("Avg sentences", lambda s: f"{s.avg_sentences:.2f}"),
    ("Top funding entity", lambda s: s.top_funder or "-"),
    ("Top words", lambda s: ", ".join(term for term, _ in s.top_words[:5])),
    ("Top bi-grams", lambda s: ", ".join(" ".join(gram) for gram, _ in s.top_bigrams[:3])),
)


def summary_table(stats: dict[Bucket, analytics.BucketStats]) -> pd.DataFrame:
    """Per-bucket statistics as rows of a printable table, one column per non-empty bucket."""
    columns = {bucket.value: [fmt(s) for _, fmt in SUMMARY_ROWS] for bucket, s in stats.items()}
    return pd.DataFrame(columns, index=[name for name, _ in SUMMARY_ROWS])


def cmd_analyze(args: argparse.Namespace, cfg: RunConfig):
    scored_path = Path(args.scored) if args.scored else cfg.paths.out("scored_ads.csv")
    ads_path = args.ads or cfg.paths.ads
    if args.scored or (scored_path.exists() and not args.ads):
        scored = analytics.load_scored_ads(scored_path, cfg.analysis.thresholds())
    elif ads_path:
        scored = _score(cfg, Path(ads_path), _threshold(cfg, args.threshold is not None)[0])
    else:
        raise MissingArtifactError(f"neither {scored_path} nor an ad corpus is available")
    if not scored:
        raise InputFormatError("no scored ads to analyze")

    analysis = cfg.analysis
    stats: dict[Bucket, analytics.BucketStats] = {}
    for bucket in Bucket:
        try:
            stats[bucket] = analytics.bucket_stats(scored, bucket, top_k=analysis.top_k,
                                                   bigrams_after_stopwords=analysis.bigrams_after_stopwords)
        except UndefinedStatisticError:
            log.warning("bucket is empty", bucket=bucket.value)
    write_json(cfg.paths.out("buckets.json"), {
        "n_scored": len(scored),
        "counts": analytics.bucket_counts(scored),
        "avg_sentences": analytics.avg_sentences_per_ad(scored),
        "thresholds": {"high": analysis.high, "low": analysis.low},
        "buckets": {b.value: stats[b].to_dict() if b in stats else {"available": False, "reason": "empty bucket"}
                    for b in Bucket},
    }, cfg)

    if Bucket.HIGH in stats and Bucket.LOW in stats:
        comparison = analytics.compare_buckets(stats[Bucket.HIGH], stats[Bucket.LOW]).to_dict()
    else:
        missing = [b.value for b in (Bucket.HIGH, Bucket.LOW) if b not in stats]
        comparison = {"available": False, "reason": f"empty bucket(s): {', '.join(missing)}"}
    write_json(cfg.paths.out("comparison.json"), comparison, cfg)

    # one shared date range so the bucket series line up
    spans = [(s.ad.start_date, s.ad.end_date) if analysis.attribution == "active" else (s.ad.created, s.ad.created)
             for s in scored]
    start, end = min(a for a, _ in spans), max(b for _, b in spans)
    series = [analytics.daily_series(scored, bucket, analysis.window, analysis.attribution, start, end)
              for bucket in stats]
    series.append(analytics.daily_series(scored, None, analysis.window, analysis.attribution, start, end))
    write_csv(cfg.paths.out("timeseries.csv"), pd.concat([s.to_frame() for s in series], ignore_index=True))
    write_csv(cfg.paths.out("plot.csv"), analytics.plot_frame(series))

    trends = analytics.trend_report(series, analysis.alpha)
    reference = analysis.reference()
    if reference is not None:
        growth = {}
        for daily in series:
            if reference in daily.dates:
                growth[daily.name] = {metric: analytics.growth_ratio(daily.dates, daily.series(metric, True),
                                                                     reference).to_dict()
                                      for metric in ("total_spend", "total_impressions", "ad_count")}
        trends["growth"] = growth
    write_json(cfg.paths.out("trends.json"), trends, cfg)

    print(summary_table(stats).to_string())
    if comparison["available"]:
        for row in comparison["metrics"]:
            delta = row["relative_diff_pct"]
            print(f"{row['metric']}: high vs low {'undefined' if delta is None else f'{delta:+.2f}%'}")


def cmd_synth(args: argparse.Namespace, cfg: RunConfig):
    synth = cfg.synth
    schema = LabelSchema.synthetic(synth.n_labels)
    priors = [synth.label_prior] * synth.n_labels
    sentences = generate_synthetic(synth.n_docs, synth.sentences_per_doc, priors, cfg.seed)
    ads = generate_synthetic_ads(synth.n_ads, priors, cfg.seed, synth.sentences_per_ad, synth.mix)
    schema.to_file(cfg.paths.out("schema.json"))
    write_sentences(cfg.paths.out("sentences.jsonl"), sentences, schema)
    write_ads(cfg.paths.out("ads.csv"), ads.ads)
    write_json(cfg.paths.out("synth_manifest.json"), {
        "n_sentences": len(sentences),
        "n_ads": len(ads.ads),
        "planted": {bucket: ads.planted.count(bucket) for bucket in ("high", "mid", "low")},
        "planted_ids": {ad.ad_id: bucket for ad, bucket in zip(ads.ads, ads.planted)},
    }, cfg)
    log.info("wrote synthetic corpora", sentences=len(sentences), ads=len(ads.ads))


COMMANDS: dict[str, Callable[[argparse.Namespace, RunConfig], None]] = {
    "ingest": cmd_ingest,
    "split": cmd_split,
    "train": cmd_train,
    "calibrate": cmd_calibrate,
    "predict": cmd_predict,
    "evaluate": cmd_evaluate,
    "score-ads": cmd_score_ads,
    "analyze": cmd_analyze,
    "synth": cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adpersuasion",
                                     description="Persuasion technique detection and political ad analytics.")
    parser.add_argument("--config", help="TOML or JSON run configuration")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out-dir")
    parser.add_argument("--threshold", type=float, help="classification threshold, overrides calibration")
    parser.add_argument("--beta", type=float, help="positive-class weight of the loss")
    parser.add_argument("--window", type=int, help="moving average window, odd")
    parser.add_argument("--alpha", type=float, help="significance level of the trend tests")
    parser.add_argument("--log-level", choices=[level.name for level in LogLevel], default="DEBUG",
                        help="most verbose level shown, DEBUG shows everything")
    parser.add_argument("--log-file", help="also write the log as JSON lines")

    commands = parser.add_subparsers(dest="command", required=True)
    ingest = commands.add_parser("ingest", help="validate and binarize a sentence corpus")
    ingest.add_argument("--sentences")
    ingest.add_argument("--ads")
    split = commands.add_parser("split", help="stratified train/test split")
    split.add_argument("--corpus")
    train_cmd = commands.add_parser("train", help="train the linear classifier")
    train_cmd.add_argument("--train")
    train_cmd.add_argument("--target", choices=[t.value for t in Target])
    calibrate_cmd = commands.add_parser("calibrate", help="sweep the decision threshold")
    calibrate_cmd.add_argument("--dev")
    predict = commands.add_parser("predict", help="classify sentences")
    predict.add_argument("--sentences")
    evaluate = commands.add_parser("evaluate", help="score the model on the test split")
    evaluate.add_argument("--test")
    score = commands.add_parser("score-ads", help="score ads by their persuasive sentence share")
    score.add_argument("--ads")
    analyze = commands.add_parser("analyze", help="bucket statistics, time series and trend tests")
    analyze.add_argument("--scored")
    analyze.add_argument("--ads")
    commands.add_parser("synth", help="write synthetic sentence and ad corpora")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    return cfg.with_overrides(seed=args.seed, out_dir=args.out_dir, threshold=args.threshold, beta=args.beta,
                              window=args.window, alpha=args.alpha)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = LogLevel[args.log_level]
    writers = [ConsoleWriter(level)]
    if args.log_file:
        writers.append(JsonLinesWriter(args.log_file, level))
    logger = configure(logging_level=level, log_writers=writers)
    with logger:
        try:
            cfg = resolve_config(args)
            cfg.write(cfg.paths.out("run_config.json"))
            COMMANDS[args.command](args, cfg)
        except AdPersuasionError as ex:
            logger.error(str(ex), error=type(ex).__name__, exit_code=ex.exit_code)
            print(f"adpersuasion: {ex}", file=sys.stderr)
            return ex.exit_code
        except Exception as ex:
            logger.error("unexpected failure", error=repr(ex))
            print(f"adpersuasion: unexpected failure: {ex!r}", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
