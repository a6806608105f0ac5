#!/usr/bin/env python3
"""Simulate survey respondents for a story and run the full analysis.

Respondents are synthetic readers whose pair judgments are noisy copies
of the computer-extracted network: each picks some salient pairs in
narrative order for the listing task and fills a sparse matrix for the
rating task. The script writes the bulk responses file, aggregates both
tasks into group networks, correlates them against the computer network,
builds the narrative-time curve from the listing task, and fits the
who-agrees-with-the-machine regression.

Example:
    python3 scripts/simulate_survey.py data/the_teacher.txt \
        --registry data/the_teacher_registry.json \
        --out /tmp/responses.json --respondents 40 --seed 7
"""

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from castnet.climax import classify_shape, human_climax
from castnet.corpus import CharacterRegistry, segment_paragraphs
from castnet.extraction import extract_network, pair_key
from castnet.netops import pearson_correlation, permutation_significance
from castnet.stats import agreement_design, format_fit_table, logistic_fit
from castnet.survey import (
    ACADEMIC_BACKGROUNDS,
    RespondentProfile,
    SurveyResponse,
    Task1Entry,
    Task1Response,
    Task2Response,
    average_network,
    democracy_normalize,
    read_responses,
    respondent_network,
    scale_to_pattern,
    write_responses,
)

GENDERS = ("female", "male")
EDUCATION_LEVELS = ("secondary", "bachelor", "master")


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("story", type=Path, help="story text file (UTF-8)")
    parser.add_argument("--registry", type=Path, required=True)
    parser.add_argument("--out", type=Path, required=True,
                        help="bulk responses JSON to write")
    parser.add_argument("--respondents", type=int, default=40)
    parser.add_argument("--noise", type=float, default=1.5,
                        help="std dev of the judgment noise (default 1.5)")
    parser.add_argument("--permutations", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args(argv)


def noisy_score(rng, weight, max_weight, noise, lo):
    raw = 10.0 * weight / max_weight + rng.normal(0.0, noise)
    return int(np.clip(round(raw), lo, 10))


def simulate_respondent(rng, seq, story_id, net, first_seen, noise):
    """One synthetic reader: pair salience follows the computer weights."""
    rid = f"sim{seq:03d}"
    links = net.links()
    weights = np.array([w for _, w in links])
    max_w = weights.max()

    salience = weights + rng.exponential(scale=noise, size=len(links))
    n_listed = int(rng.integers(3, min(len(links), 12) + 1))
    listed = np.argsort(salience)[::-1][:n_listed]
    # readers list pairs roughly as the story introduces them
    listed = sorted(listed, key=lambda i: first_seen[pair_key(*links[i][0])])
    entries = [
        Task1Entry(links[i][0], noisy_score(rng, links[i][1], max_w, noise, 1), order)
        for order, i in enumerate(listed, start=1)
    ]

    cells = {}
    for pair, w in links:
        if rng.random() < 0.85:
            value = noisy_score(rng, w, max_w, noise, 0)
            if value:
                cells[pair] = float(value)

    profile = RespondentProfile(
        respondent_id=rid,
        gender=str(rng.choice(GENDERS)),
        age=int(rng.integers(18, 70)),
        education_level=str(rng.choice(EDUCATION_LEVELS)),
        academic_background=str(rng.choice(ACADEMIC_BACKGROUNDS)),
    )
    return SurveyResponse(
        respondent_id=rid,
        story_id=story_id,
        task1=Task1Response(rid, story_id, entries),
        task2=Task2Response(rid, story_id, cells),
        profile=profile,
    )


def aggregate(responses, registry, task):
    nets = []
    for r in responses:
        source = r.task1 if task == 1 else r.task2
        nets.append(respondent_network(source, registry))
    group = average_network(democracy_normalize(nets))
    return scale_to_pattern(group, 10.0)


def main(argv=None):
    args = parse_args(argv)
    rng = np.random.default_rng(args.seed)
    registry = CharacterRegistry.load(args.registry)
    units = segment_paragraphs(args.story.read_text(encoding="utf-8"))
    net, events = extract_network(units, registry)
    if net.n_links() == 0:
        print("story yields an empty network; nothing to simulate", file=sys.stderr)
        return 1

    first_seen = {}
    for event in events:
        first_seen.setdefault(event.pair, event.position)

    responses = [
        simulate_respondent(rng, seq, registry.story_id, net, first_seen, args.noise)
        for seq in range(args.respondents)
    ]
    write_responses(responses, registry.story_id, args.out)
    print(f"wrote {len(responses)} simulated responses to {args.out}")

    _, loaded = read_responses(args.out)
    for task in (1, 2):
        group = aggregate(loaded, registry, task)
        r = pearson_correlation(net, group)
        p = permutation_significance(net, group, n_perm=args.permutations,
                                     seed=args.seed)
        print(f"task {task} vs computer: r = {r:.6f}, p = {p:.6f} "
              f"({args.permutations} permutations)")

    curve = human_climax([r.task1 for r in loaded])
    rendered = ", ".join(f"{v:.4f}" for v in curve.normalized)
    print(f"human narrative-time curve: {rendered} "
          f"(shape: {classify_shape(curve).value})")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        design = agreement_design(loaded, registry)
    fit = logistic_fit(design)
    print()
    print(format_fit_table(fit))
    return 0


if __name__ == "__main__":
    sys.exit(main())
