"""Command-line interface: ``sawtooth-figures render --spec <json>``.

Exit codes follow the dataset-exporting CLI's convention: 0 success,
1 runtime/numerical failure, 2 spec or schema error.
"""

from __future__ import annotations

import argparse
import sys

from .render import SpecError, load_spec, render
from .schemas import SchemaError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sawtooth-figures",
        description="Render figures from datasets exported by the sawtooth-qed CLI.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one figure from a plot spec")
    p_render.add_argument("--spec", required=True, help="path to the plot-spec JSON")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        out = render(spec)
    except (SpecError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
