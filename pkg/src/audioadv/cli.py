"""Command-line pipeline: transform / train / attack / advtrain / evaluate / report.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 budget
exhaustion. All stochastic components derive from the config seed, so
identical configs replay byte-identically.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .attacks import default_budget
from .config import REPRESENTATIONS, load_project_config
from .dataset import ManifestEntry, load_spectrogram_dataset, read_manifest, train_test_split, write_manifest
from .errors import AudioAdvError, BudgetExhausted, ConfigError, DataError
from .eval import (
    CampaignSpec,
    assemble_report,
    run_campaign,
    save_report,
)
from .model import ModelSpec, TrainConfig, build, evaluate, load_checkpoint, save_checkpoint
from .model.train import train as train_model
from .defense import adversarially_train
from .signal import (
    append_tonnetz,
    dwt_spectrogram,
    load_wav,
    resize_spectrogram,
    stft_spectrogram,
    tonnetz_chromagram,
    write_spectrogram,
)
from .toydata import make_toy_corpus

log = logging.getLogger("audioadv")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="project config JSON")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--jobs", type=int, help="bound internal parallel fan-out")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="audioadv",
        description="Adversarial robustness workbench for 2D audio representations",
    )
    parser.add_argument("--version", action="version", version=f"audioadv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maketoy", help="synthesize the bundled toy corpus")
    _add_common(p)
    p.add_argument("--out", required=True, help="output directory for WAVs + manifest")
    p.add_argument("--clips-per-class", type=int, default=12)

    p = sub.add_parser("transform", help="audio manifest -> spectrogram files + manifest")
    _add_common(p)
    p.add_argument("--representation", choices=REPRESENTATIONS)
    p.add_argument("--manifest", help="override the config WAV manifest path")
    p.add_argument("--out", required=True, help="output directory for ASPC files")

    p = sub.add_parser("train", help="train a clean model on a spectrogram manifest")
    _add_common(p)
    p.add_argument("--manifest", required=True, help="spectrogram manifest")
    p.add_argument("--out", required=True, help="checkpoint output path")

    p = sub.add_parser("advtrain", help="FGSM adversarial training")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--alpha", type=float, help="clean-loss weight in the mixed objective")
    p.add_argument("--eps", type=float, help="FGSM crafting epsilon")

    p = sub.add_parser("attack", help="run an attack campaign against a checkpoint")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True, help="checkpoint path")
    p.add_argument("--out", required=True, help="outcome store (JSON lines)")
    p.add_argument(
        "--attack",
        choices=("fgsm", "bim-a", "bim-b", "jsma", "deepfool", "cw", "pia"),
        help="run only this algorithm (default: config attack list)",
    )
    p.add_argument("--eps", type=float, help="override the attack epsilon")

    p = sub.add_parser("evaluate", help="clean accuracy of a checkpoint on the test split")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--model", required=True)

    p = sub.add_parser("report", help="assemble the robustness report from outcome stores")
    _add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--pre", required=True, help="outcome store of the original model")
    p.add_argument("--post", help="outcome store of the defended model")
    p.add_argument("--pre-model", help="original checkpoint (for clean accuracy)")
    p.add_argument("--post-model", help="defended checkpoint (for the accuracy drop)")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")

    p = sub.add_parser("selftest", help="run the gradient-check and oracle suites")
    _add_common(p)

    return parser


def _config(args, extra: dict | None = None):
    overrides = {"seed": args.seed, "jobs": getattr(args, "jobs", None)}
    if extra:
        overrides.update(extra)
    return load_project_config(args.config, overrides)


def _cmd_maketoy(args) -> int:
    cfg = _config(args)
    manifest = make_toy_corpus(args.out, clips_per_class=args.clips_per_class, seed=cfg.seed)
    print(f"wrote toy corpus: {manifest}")
    return 0


def _representation_name(kind: str) -> str:
    return kind.replace("-", "_")


def _cmd_transform(args) -> int:
    cfg = _config(args, {"representation_kind": args.representation})
    rep = cfg.representation
    manifest_path = cfg.resolve(args.manifest or cfg.manifest)
    entries = read_manifest(manifest_path)
    base_dir = Path(manifest_path).parent
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    out_entries = []
    for e in entries:
        w = load_wav(base_dir / e.path)
        if rep.kind.startswith("stft"):
            sp = stft_spectrogram(w, rep.stft_config(), log_view=rep.log_view)
        else:
            sp = dwt_spectrogram(w, rep.dwt_config())
        sp = resize_spectrogram(sp, rep.target_rows, rep.target_cols)
        if rep.kind.endswith("tonnetz"):
            ch = tonnetz_chromagram(w)
            sp = append_tonnetz(sp, ch, chroma_rows=rep.chroma_rows)
        name = Path(e.path).stem + ".aspc"
        write_spectrogram(sp, out_dir / name)
        out_entries.append(ManifestEntry(name, e.label, e.fold))

    out_manifest = out_dir / "manifest.jsonl"
    write_manifest(out_manifest, out_entries)
    print(f"wrote {len(out_entries)} {rep.kind} spectrograms, manifest: {out_manifest}")
    return 0


def _load_split(cfg, manifest_path):
    dataset = load_spectrogram_dataset(manifest_path)
    train_idx, test_idx = train_test_split(len(dataset), cfg.train.train_fraction, seed=cfg.seed)
    return dataset, [dataset[i] for i in train_idx], [dataset[i] for i in test_idx]


def _model_spec(cfg, dataset) -> ModelSpec:
    shape = dataset[0].features.shape
    return ModelSpec(
        arch=cfg.model.get("arch", "plain_cnn_s"),
        input_shape=(shape[0], shape[1]),
        num_classes=int(cfg.model.get("num_classes", 4)),
        seed=cfg.seed,
    )


def _cmd_train(args) -> int:
    cfg = _config(args)
    dataset, train_set, test_set = _load_split(cfg, args.manifest)
    model = build(_model_spec(cfg, dataset))
    ckpt = train_model(model, train_set, cfg.train)
    save_checkpoint(ckpt, args.out)
    print(
        f"trained {model.spec.arch}: train acc {evaluate(model, train_set):.3f}, "
        f"test acc {evaluate(model, test_set):.3f}, epochs {len(ckpt.history)} -> {args.out}"
    )
    return 0


def _cmd_advtrain(args) -> int:
    cfg = _config(args, {"alpha": args.alpha, "fgsm_eps": args.eps})
    dataset, train_set, test_set = _load_split(cfg, args.manifest)
    model = build(_model_spec(cfg, dataset))
    ckpt = adversarially_train(model, train_set, cfg.train, cfg.defense)
    save_checkpoint(ckpt, args.out)
    print(
        f"adversarially trained {model.spec.arch} (alpha={cfg.defense.alpha}, "
        f"eps={cfg.defense.fgsm_eps}): test acc {evaluate(model, test_set):.3f} -> {args.out}"
    )
    return 0


def _cmd_attack(args) -> int:
    cfg = _config(args)
    if args.attack:
        budgets = [default_budget(args.attack.replace("-", "_"))]
    elif cfg.attacks:
        budgets = list(cfg.attacks)
    else:
        raise ConfigError("no attacks configured: pass --attack or set attacks in the config")
    if args.eps is not None:
        from dataclasses import replace

        budgets = [replace(b, epsilon=args.eps) for b in budgets]

    spec = CampaignSpec(
        checkpoint_path=args.model,
        manifest_path=args.manifest,
        budgets=budgets,
        eps_grid=cfg.eps_grid,
        batch_size=cfg.batch_size,
        num_batches=cfg.num_batches,
        seed=cfg.seed,
        split=cfg.campaign_split,
        train_fraction=cfg.train.train_fraction,
    )
    fresh = run_campaign(spec, store_path=args.out, jobs=max(1, cfg.jobs))
    print(f"campaign wrote {len(fresh)} new outcome records -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _config(args)
    dataset, _, test_set = _load_split(cfg, args.manifest)
    model = load_checkpoint(args.model).restore()
    acc = evaluate(model, test_set)
    print(json.dumps({"test_accuracy": acc, "samples": len(test_set)}))
    return 0


def _cmd_report(args) -> int:
    cfg = _config(args)
    from .eval import load_records

    pre = load_records(args.pre)
    post = load_records(args.post) if args.post else []

    clean_acc = defended_acc = None
    if args.pre_model:
        dataset, _, test_set = _load_split(cfg, args.manifest)
        clean_acc = evaluate(load_checkpoint(args.pre_model).restore(), test_set)
        if args.post_model:
            defended_acc = evaluate(load_checkpoint(args.post_model).restore(), test_set)

    model_name = cfg.model.get("arch", "plain_cnn_s")
    report = assemble_report(
        cfg.dataset_name,
        _representation_name(cfg.representation.kind),
        model_name,
        pre,
        post,
        cfg.eps_grid,
        clean_accuracy=clean_acc,
        defended_accuracy=defended_acc,
    )
    save_report(report, args.out, fmt=args.format)
    print(f"wrote {args.format} report with {len(report.rows)} rows -> {args.out}")
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return run_selftest()


_COMMANDS = {
    "maketoy": _cmd_maketoy,
    "transform": _cmd_transform,
    "train": _cmd_train,
    "advtrain": _cmd_advtrain,
    "attack": _cmd_attack,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config-error code
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except BudgetExhausted as exc:
        log.error("budget exhausted: %s", exc)
        return 4
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return 2
    except (DataError, AudioAdvError, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
