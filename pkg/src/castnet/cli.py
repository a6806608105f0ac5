"""Command-line entry point: extraction, survey aggregation, comparison,
climax analysis, descriptive metrics, and the collection server.

Outputs are deterministic: the same inputs (and seed, where one applies)
produce byte-identical files, so artifacts can be diffed across runs.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import climax as climax_mod
from . import netops
from .corpus import CharacterRegistry, segment_paragraphs, segment_sentences
from .errors import FormatError, RegistryError, ValidationError
from .extraction import (
    WeightedNetwork,
    extract_network,
    read_edgelist,
    write_edgelist,
    write_events,
)
from .netops import ConstantNetworkError
from .stats import CollinearityError
from .survey import (
    average_network,
    democracy_normalize,
    read_responses,
    respondent_network,
    scale_to_pattern,
    validate_responses,
)

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own code for bad invocations
EXIT_MISSING_INPUT = 3
EXIT_FORMAT = 4
EXIT_REGISTRY = 5
EXIT_VALIDATION = 6
EXIT_COMPUTE = 7

EXIT_CODE_HELP = """\
exit codes:
  0  success
  2  usage error (unknown flag or subcommand)
  3  an input file is missing or unreadable
  4  an input file is malformed (diagnostic names file and line)
  5  character registry failed validation
  6  data or parameter validation failed
  7  computation undefined on these inputs (e.g. constant network)
"""


@dataclass
class RunConfig:
    """Parameters shared by the analysis subcommands."""

    story: Path | None = None
    registry: Path | None = None
    unit: str = "paragraph"
    plus_one: bool = True
    pattern_max: float = 10.0
    sigma_k: float | None = None
    threshold: float | None = None
    n_parts: int = 4
    seed: int = 0
    out_dir: Path = field(default_factory=lambda: Path("."))

    def __post_init__(self):
        if self.unit not in ("paragraph", "sentence"):
            raise ValidationError(f"unit must be paragraph or sentence, got {self.unit!r}")
        for name in ("pattern_max", "sigma_k", "threshold"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValidationError(f"{name} must be non-negative, got {value}")
        if self.n_parts < 1:
            raise ValidationError(f"n_parts must be at least 1, got {self.n_parts}")


def _load_registry(path) -> CharacterRegistry:
    return CharacterRegistry.load(path)


def _read_story_units(config: RunConfig):
    text = Path(config.story).read_text(encoding="utf-8")
    segment = segment_paragraphs if config.unit == "paragraph" else segment_sentences
    return segment(text)


def _extract(config: RunConfig):
    registry = _load_registry(config.registry)
    units = _read_story_units(config)
    net, events = extract_network(units, registry, plus_one=config.plus_one)
    return registry, units, net, events


def cmd_extract(args) -> int:
    config = RunConfig(story=args.story, registry=args.registry, unit=args.unit,
                       plus_one=not args.no_plus_one, out_dir=args.out_dir)
    _, units, net, events = _extract(config)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    network_path = config.out_dir / "network.tsv"
    events_path = config.out_dir / "events.tsv"
    write_edgelist(net, network_path)
    write_events(events, events_path)
    print(f"{len(units)} {config.unit} units, {len(net.nodes)} characters, "
          f"{net.n_links()} links, total weight {net.total():g}")
    print(f"wrote {network_path}")
    print(f"wrote {events_path}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    net = read_edgelist(args.network)
    metrics = netops.graph_metrics(net)
    print(netops.format_metrics_table(metrics))
    if args.out:
        netops.write_metrics_report(metrics, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    net_a = read_edgelist(args.network_a)
    net_b = read_edgelist(args.network_b)
    r = netops.pearson_correlation(net_a, net_b, args.pairs)
    print(f"r = {r:.6f}")
    p_value = None
    if args.permutations:
        p_value = netops.permutation_significance(
            net_a, net_b, n_perm=args.permutations, seed=args.seed)
        print(f"p = {p_value:.6f} ({args.permutations} permutations, seed {args.seed})")
    if args.out:
        n_pairs = len(net_a.nodes) * (len(net_a.nodes) - 1) // 2
        netops.write_correlation_report(
            args.out, r=r, n_pairs=n_pairs, pairs=args.pairs,
            p_value=p_value, n_perm=args.permutations or None,
            seed=args.seed if p_value is not None else None)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_survey_aggregate(args) -> int:
    config = RunConfig(registry=args.registry, pattern_max=args.pattern_max,
                       sigma_k=args.sigma)
    registry = _load_registry(config.registry)
    story_id, responses = read_responses(args.responses)
    validate_responses(responses, registry)

    nets = []
    for response in responses:
        task = response.task1 if args.task == 1 else response.task2
        if task is None:
            warnings.warn(f"respondent {response.respondent_id!r} has no "
                          f"task {args.task} data; skipped")
            continue
        nets.append(respondent_network(task, registry))
    if not nets:
        raise ValidationError(f"no respondent provided task {args.task} data")

    if not args.no_democracy:
        nets = democracy_normalize(nets)
    net = average_network(nets)
    if args.aggregate == "sum":
        net = net.scaled(float(len(nets)))
    if not args.no_pattern_scale:
        net = scale_to_pattern(net, config.pattern_max)
    if config.sigma_k is not None:
        net = netops.sigma_correct(net, config.sigma_k)
    net.provenance = f"survey:task{args.task}:{story_id}:n={len(nets)}"
    write_edgelist(net, args.out)
    print(f"aggregated {len(nets)} respondents: {net.n_links()} links, "
          f"total weight {net.total():g}")
    print(f"wrote {args.out}")

    if args.binarize is not None:
        if not args.binary_out:
            raise ValidationError("--binarize requires --binary-out")
        binary = netops.threshold_binarize(net, args.binarize)
        write_edgelist(binary.to_weighted(f"binarized:t={args.binarize:g}"),
                       args.binary_out)
        print(f"wrote {args.binary_out} ({binary.n_edges()} links at "
              f"threshold {args.binarize:g})")
    return EXIT_OK


def cmd_climax(args) -> int:
    config = RunConfig(story=args.story, registry=args.registry,
                       unit=args.unit, n_parts=args.parts)
    if args.story:
        _, units, _, events = _extract(config)
        curve = climax_mod.computer_climax(units, events, config.n_parts)
    else:
        registry = _load_registry(config.registry)
        _, responses = read_responses(args.responses)
        validate_responses(responses, registry)
        task1 = [r.task1 for r in responses if r.task1 is not None]
        curve = climax_mod.human_climax(task1, config.n_parts)
    shape = climax_mod.classify_shape(curve)
    rendered = ", ".join(f"{v:.4f}" for v in curve.normalized)
    print(f"{curve.source} curve over {curve.n_parts} parts: {rendered}")
    print(f"shape: {shape.value}")
    climax_mod.write_curve(curve, args.out)
    print(f"wrote {args.out}")
    if args.chart:
        climax_mod.write_curve_chart(curve, args.chart)
        print(f"wrote {args.chart}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .collector import create_app

    registries = [_load_registry(path) for path in args.registry]
    app = create_app(registries, data_dir=args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="castnet",
        description="Character interaction networks from prose and from "
                    "reader surveys, and the comparisons between them.",
        epilog=EXIT_CODE_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="build a network from a story text")
    p.add_argument("story", type=Path, help="story text file (UTF-8)")
    p.add_argument("--registry", type=Path, required=True,
                   help="character registry JSON")
    p.add_argument("--unit", choices=("paragraph", "sentence"),
                   default="paragraph", help="co-occurrence window")
    p.add_argument("--no-plus-one", action="store_true",
                   help="use plain frequency products as unit importances")
    p.add_argument("--out-dir", type=Path, default=Path("."),
                   help="directory for network.tsv and events.tsv")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("metrics", help="descriptive metrics of a network file")
    p.add_argument("network", type=Path, help="edge-list network file")
    p.add_argument("--out", type=Path, help="also write a metrics report")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="correlate two network files")
    p.add_argument("network_a", type=Path)
    p.add_argument("network_b", type=Path)
    p.add_argument("--pairs", choices=("all", "union", "intersection"),
                   default="all", help="which node pairs enter the correlation")
    p.add_argument("--permutations", type=int, default=0,
                   help="run a permutation significance test (at least 100)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="also write a correlation report")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("survey-aggregate",
                       help="aggregate collected responses into a network")
    p.add_argument("responses", type=Path, help="bulk responses JSON")
    p.add_argument("--registry", type=Path, required=True)
    p.add_argument("--task", type=int, choices=(1, 2), required=True)
    p.add_argument("--aggregate", choices=("mean", "sum"), default="mean",
                   help="combine respondents by mean or by sum")
    p.add_argument("--no-democracy", action="store_true",
                   help="skip equal-total rescaling across respondents")
    p.add_argument("--pattern-max", type=float, default=10.0,
                   help="rescale so the strongest link equals this")
    p.add_argument("--no-pattern-scale", action="store_true",
                   help="keep aggregated weights unscaled")
    p.add_argument("--sigma", type=float,
                   help="delete links further than K standard deviations from the mean")
    p.add_argument("--binarize", type=float,
                   help="also write a thresholded 0/1 network")
    p.add_argument("--binary-out", type=Path,
                   help="path for the thresholded network")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_survey_aggregate)

    p = sub.add_parser("climax", help="narrative-time importance curve")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--story", type=Path, help="story text (computer arm)")
    source.add_argument("--responses", type=Path,
                        help="bulk responses JSON (human arm)")
    p.add_argument("--registry", type=Path, required=True)
    p.add_argument("--unit", choices=("paragraph", "sentence"),
                   default="paragraph")
    p.add_argument("--parts", type=int, default=4)
    p.add_argument("--out", type=Path, required=True, help="curve file")
    p.add_argument("--chart", type=Path, help="also render a bar chart image")
    p.set_defaults(func=cmd_climax)

    p = sub.add_parser("serve", help="run the survey collection service")
    p.add_argument("--registry", type=Path, action="append", required=True,
                   help="registry JSON; repeat for several stories")
    p.add_argument("--data-dir", type=Path, required=True,
                   help="directory for response stores")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", type=Path,
                   help="directory of static survey client files to serve")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"castnet: cannot read input: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except FormatError as exc:
        print(f"castnet: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except RegistryError as exc:
        print(f"castnet: registry: {exc}", file=sys.stderr)
        return EXIT_REGISTRY
    except ValidationError as exc:
        print(f"castnet: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConstantNetworkError, CollinearityError, ValueError) as exc:
        print(f"castnet: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
