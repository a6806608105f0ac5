#!/usr/bin/env python3
"""Run the full computer arm on one story and write every artifact.

Given a story text and its character registry, this extracts the
paragraph- and sentence-level networks, reports their descriptive
metrics, correlates the two segmentations (with an optional permutation
test), and renders the narrative-time importance curve.

Example:
    python3 scripts/run_story_pipeline.py data/the_teacher.txt \
        --registry data/the_teacher_registry.json --out-dir out/ \
        --permutations 1000 --chart
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from castnet.climax import classify_shape, computer_climax, write_curve, write_curve_chart
from castnet.corpus import CharacterRegistry, segment_paragraphs, segment_sentences
from castnet.extraction import extract_network, write_edgelist, write_events, write_matrix
from castnet.netops import (
    format_metrics_table,
    graph_metrics,
    pearson_correlation,
    permutation_significance,
    write_correlation_report,
    write_metrics_report,
)


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("story", type=Path, help="story text file (UTF-8)")
    parser.add_argument("--registry", type=Path, required=True,
                        help="character registry JSON")
    parser.add_argument("--out-dir", type=Path, default=Path("pipeline_out"))
    parser.add_argument("--no-plus-one", action="store_true",
                        help="use the plain frequency product as the unit weight")
    parser.add_argument("--parts", type=int, default=4,
                        help="number of narrative-time parts (default 4)")
    parser.add_argument("--permutations", type=int, default=0,
                        help="run a permutation test with this many shuffles")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--chart", action="store_true",
                        help="also render the curve as a PNG bar chart")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    registry = CharacterRegistry.load(args.registry)
    text = args.story.read_text(encoding="utf-8")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    plus_one = not args.no_plus_one

    nets = {}
    for kind, segment in (("paragraph", segment_paragraphs),
                          ("sentence", segment_sentences)):
        units = segment(text)
        net, events = extract_network(units, registry, plus_one=plus_one)
        nets[kind] = (units, net, events)
        write_edgelist(net, args.out_dir / f"network_{kind}.tsv")
        write_matrix(net, args.out_dir / f"matrix_{kind}.tsv")
        write_events(events, args.out_dir / f"events_{kind}.tsv")
        metrics = graph_metrics(net)
        write_metrics_report(metrics, args.out_dir / f"metrics_{kind}.tsv")
        print(f"--- {kind} segmentation: {len(units)} units, "
              f"total weight {net.total():g}")
        print(format_metrics_table(metrics))

    net_p = nets["paragraph"][1]
    net_s = nets["sentence"][1]
    r = pearson_correlation(net_p, net_s)
    print(f"paragraph vs sentence: r = {r:.6f}")
    p = None
    if args.permutations:
        p = permutation_significance(net_p, net_s, n_perm=args.permutations,
                                     seed=args.seed)
        print(f"permutation test: p = {p:.6f} "
              f"({args.permutations} permutations, seed {args.seed})")
    n_pairs = len(list(net_p.pairs()))
    write_correlation_report(args.out_dir / "correlation.tsv", r, n_pairs, "all",
                             p_value=p, n_perm=args.permutations or None,
                             seed=args.seed if p is not None else None)

    units, _, events = nets["paragraph"]
    curve = computer_climax(units, events, n_parts=args.parts)
    write_curve(curve, args.out_dir / "curve.tsv")
    if args.chart:
        write_curve_chart(curve, args.out_dir / "curve.png")
    rendered = ", ".join(f"{v:.4f}" for v in curve.normalized)
    print(f"narrative-time curve: {rendered}")
    print(f"shape: {classify_shape(curve).value}")
    print(f"artifacts written to {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
