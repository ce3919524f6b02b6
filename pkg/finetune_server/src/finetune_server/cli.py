"""Command line entry points for training and serving."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import TrainConfig, load_train_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finetune-server",
        description="Fine-tune on exported prompt/target pairs and serve generation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("train", help="fine-tune a checkpoint")
    tr.add_argument("--config", help="JSON file of TrainConfig overrides")
    tr.add_argument("--subtask", default="task",
                    help="subtask tag; also selects batch size / learning rate defaults")
    tr.add_argument("--dataset", default="data")
    tr.add_argument("--prefix", default="NoPrefix")
    tr.add_argument("--train-file", required=True)
    tr.add_argument("--val-file", required=True)
    tr.add_argument("--output-dir", required=True)

    sv = sub.add_parser("serve", help="serve a trained checkpoint over HTTP")
    sv.add_argument("--checkpoint", required=True)
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--host", default="127.0.0.1")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "train":
        from .train import train

        if args.config:
            config = load_train_config(args.config)
        else:
            config = TrainConfig.for_subtask(args.subtask)
        try:
            checkpoint = train(
                config, args.train_file, args.val_file, args.output_dir,
                dataset=args.dataset, subtask=args.subtask, prefix=args.prefix,
            )
        except (ValueError, FileNotFoundError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(checkpoint)
        return 0
    from .serve import serve

    try:
        serve(args.checkpoint, args.port, args.host)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
