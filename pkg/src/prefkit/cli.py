"""Command-line pipeline driver.

Subcommands cover the full flow: ``validate`` checks survey rows against the
selection quotas, ``synth`` emits a seeded planted-kit population,
``kmeans-sweep`` produces the silhouette-vs-k table, and ``svd`` /
``cluster-signs`` / ``design-kits`` / ``reassign`` / ``pipeline`` run the
factorization route through kit design and loss reporting.

Exit codes: 0 success, 1 strict-mode validation failure, 2 usage error,
3 I/O or numeric failure.  Existing output files are only overwritten under
``--force``.  All commands are deterministic given their flags; randomness
derives from ``--seed`` via :func:`prefkit.seeding.derive_seed`.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .assignment import assignment_from_clusters, reassign
from .errors import PrefkitError
from .io import load_catalog, load_preferences, write_ground_truth, write_preferences
from .kits import Kit, design_all
from .kmeans import KMeansConfig, sweep
from .model import ItemCatalog, PreferenceMatrix, SelectionConstraint, validate_constraint
from .seeding import derive_seed
from .signs import ITEMS, USERS, cluster_count_table, item_sign_clusters, user_sign_clusters
from .svd import scree, svd, truncate
from .synthetic import SyntheticSpec, generate_synthetic, random_kits


class UsageError(Exception):
    """Bad flag combination or a flag value the data cannot satisfy."""


def _fmt(value: object) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list[object]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _prepare_out(args: argparse.Namespace, filenames: list[str]) -> dict[str, Path]:
    """Create the output directory and guard against silent overwrites."""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in filenames}
    if not args.force:
        existing = [str(p) for p in paths.values() if p.exists()]
        if existing:
            raise FileExistsError(
                f"output exists (use --force to overwrite): {', '.join(existing)}"
            )
    return paths


def _load_inputs(args: argparse.Namespace) -> tuple[ItemCatalog, PreferenceMatrix]:
    catalog = load_catalog(args.catalog)
    prefs = load_preferences(args.prefs, catalog)
    return catalog, prefs


def _write_kits(kits: list[Kit], paths: dict[str, Path]) -> None:
    _write_csv(
        paths["kits.csv"],
        ["kit_id", "item_id"],
        [[kit.kit_id, q] for kit in kits for q in kit.sorted_items()],
    )
    payload = {str(kit.kit_id): kit.sorted_items() for kit in kits}
    with open(paths["kits.json"], "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _check_rank(args: argparse.Namespace, prefs: PreferenceMatrix) -> None:
    p = min(prefs.n, prefs.m)
    if not 1 <= args.rank <= p:
        raise UsageError(f"--rank must lie in 1..{p} for this matrix")


def _sign_pipeline(args: argparse.Namespace, catalog: ItemCatalog, prefs: PreferenceMatrix):
    """Shared upstream of the factorization route: svd -> user sign clusters."""
    _check_rank(args, prefs)
    factors = svd(prefs.data)
    clustering = user_sign_clusters(truncate(factors, args.rank))
    return factors, clustering


def cmd_validate(args: argparse.Namespace) -> int:
    catalog, prefs = _load_inputs(args)
    paths = _prepare_out(args, ["violations.csv"])
    violations = validate_constraint(prefs, catalog, SelectionConstraint())
    _write_csv(
        paths["violations.csv"],
        ["row", "user_id", "expensive_count", "cheap_count"],
        [[v.row_index, v.user_id, v.expensive_count, v.cheap_count] for v in violations],
    )
    if violations and args.strict:
        print(f"{len(violations)} rows violate the selection constraint", file=sys.stderr)
        return 1
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    constraint = SelectionConstraint()
    paths = _prepare_out(args, ["preferences.csv", "ground_truth.csv", "planted_kits.json"])
    kits = random_kits(catalog, constraint, args.n_kits, derive_seed(args.seed, "synth", "kits"))
    spec = SyntheticSpec(
        n_users=args.n_users,
        planted_kits=kits,
        noise_swaps=args.noise_swaps,
        seed=derive_seed(args.seed, "synth", "population"),
    )
    prefs, planted = generate_synthetic(spec, catalog, constraint)
    write_preferences(prefs, paths["preferences.csv"])
    write_ground_truth(prefs.user_ids, planted, paths["ground_truth.csv"])
    with open(paths["planted_kits.json"], "w", encoding="utf-8") as fh:
        json.dump({str(kit.kit_id): kit.sorted_items() for kit in kits}, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_kmeans_sweep(args: argparse.Namespace) -> int:
    catalog, prefs = _load_inputs(args)
    if args.k_min < 4 and not args.allow_small_k:
        raise UsageError("--k-min below 4 requires --allow-small-k")
    if not 1 <= args.k_min <= args.k_max:
        raise UsageError("need 1 <= --k-min <= --k-max")
    if args.k_max > prefs.n:
        raise UsageError(f"--k-max {args.k_max} exceeds the {prefs.n} survey rows")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    paths = _prepare_out(args, ["sweep_table.csv", "sweep_points.csv"])
    config = KMeansConfig(
        k=args.k_min,
        damping=args.damping,
        max_iters=args.max_iters,
        k_limit=args.k_max,
        seed=derive_seed(args.seed, "kmeans-sweep"),
    )
    table = sweep(prefs, config, k_min=args.k_min, k_max=args.k_max, trials=args.trials)
    _write_csv(
        paths["sweep_table.csv"],
        ["k"] + [f"trial_{t + 1}" for t in range(table.trials)],
        [[k, *table.scores[row]] for row, k in enumerate(table.k_values)],
    )
    _write_csv(
        paths["sweep_points.csv"],
        ["k", "trial", "silhouette"],
        [
            [k, t + 1, table.scores[row, t]]
            for row, k in enumerate(table.k_values)
            for t in range(table.trials)
        ],
    )
    return 0


def cmd_svd(args: argparse.Namespace) -> int:
    _, prefs = _load_inputs(args)
    paths = _prepare_out(args, ["scree.csv"])
    factors = svd(prefs.data)
    _write_csv(paths["scree.csv"], ["rank", "sigma"], [list(pair) for pair in scree(factors)])
    return 0


def cmd_cluster_signs(args: argparse.Namespace) -> int:
    catalog, prefs = _load_inputs(args)
    _check_rank(args, prefs)
    paths = _prepare_out(
        args,
        [
            "user_cluster_counts.csv",
            "item_cluster_counts.csv",
            "user_membership.csv",
            "item_membership.csv",
        ],
    )
    factors, users = _sign_pipeline(args, catalog, prefs)
    items = item_sign_clusters(truncate(factors, args.rank))
    for axis, name in ((USERS, "user_cluster_counts.csv"), (ITEMS, "item_cluster_counts.csv")):
        _write_csv(
            paths[name],
            ["r", "count"],
            [list(pair) for pair in cluster_count_table(factors, axis, 1, args.rank)],
        )
    user_ids = users.cluster_ids()
    _write_csv(
        paths["user_membership.csv"],
        ["element_id", "cluster_id", "pattern_bits"],
        [[prefs.user_ids[i], user_ids[i], users.patterns[i]] for i in range(prefs.n)],
    )
    item_ids = items.cluster_ids()
    _write_csv(
        paths["item_membership.csv"],
        ["element_id", "cluster_id", "pattern_bits"],
        [[q, item_ids[q], items.patterns[q]] for q in range(catalog.m)],
    )
    return 0


def cmd_design_kits(args: argparse.Namespace) -> int:
    catalog, prefs = _load_inputs(args)
    _check_rank(args, prefs)
    paths = _prepare_out(args, ["kits.csv", "kits.json"])
    _, clustering = _sign_pipeline(args, catalog, prefs)
    kits = design_all(
        prefs, clustering.membership, catalog, SelectionConstraint(), args.constrained_kits
    )
    _write_kits(kits, paths)
    return 0


def _loss_rows(report, phase: str) -> list[list[object]]:
    return [
        [
            j,
            int(report.populations[j]),
            report.per_cluster_normal[j],
            report.per_cluster_exponential[j],
            phase,
        ]
        for j in range(len(report.populations))
    ]


def cmd_reassign(args: argparse.Namespace) -> int:
    catalog, prefs = _load_inputs(args)
    _check_rank(args, prefs)
    paths = _prepare_out(args, ["loss_clusters.csv", "loss_users.csv"])
    _, clustering = _sign_pipeline(args, catalog, prefs)
    kits = design_all(
        prefs, clustering.membership, catalog, SelectionConstraint(), args.constrained_kits
    )
    initial = assignment_from_clusters(clustering.membership, prefs.n)
    final, before, after = reassign(prefs, kits, initial)
    _write_csv(
        paths["loss_clusters.csv"],
        ["kit_id", "population", "normal_loss", "exponential_loss", "phase"],
        _loss_rows(before, "before") + _loss_rows(after, "after"),
    )
    _write_csv(
        paths["loss_users.csv"],
        ["user_id", "kit_before", "kit_after", "loss_before", "loss_after"],
        [
            [
                prefs.user_ids[i],
                int(initial.kit_index[i]),
                int(final.kit_index[i]),
                int(before.per_user_loss[i]),
                int(after.per_user_loss[i]),
            ]
            for i in range(prefs.n)
        ],
    )
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    catalog, prefs = _load_inputs(args)
    constraint = SelectionConstraint()
    violations = validate_constraint(prefs, catalog, constraint)
    if violations and args.strict:
        print(f"{len(violations)} rows violate the selection constraint", file=sys.stderr)
        return 1
    _check_rank(args, prefs)
    paths = _prepare_out(
        args,
        [
            "scree.csv",
            "user_cluster_counts.csv",
            "user_membership.csv",
            "kits.csv",
            "kits.json",
            "loss_clusters.csv",
            "loss_users.csv",
        ],
    )
    factors, clustering = _sign_pipeline(args, catalog, prefs)
    kits = design_all(prefs, clustering.membership, catalog, constraint, args.constrained_kits)
    initial = assignment_from_clusters(clustering.membership, prefs.n)
    final, before, after = reassign(prefs, kits, initial)
    _write_csv(paths["scree.csv"], ["rank", "sigma"], [list(pair) for pair in scree(factors)])
    _write_csv(
        paths["user_cluster_counts.csv"],
        ["r", "count"],
        [list(pair) for pair in cluster_count_table(factors, USERS, 1, args.rank)],
    )
    cluster_ids = clustering.cluster_ids()
    _write_csv(
        paths["user_membership.csv"],
        ["element_id", "cluster_id", "pattern_bits"],
        [[prefs.user_ids[i], cluster_ids[i], clustering.patterns[i]] for i in range(prefs.n)],
    )
    _write_kits(kits, paths)
    _write_csv(
        paths["loss_clusters.csv"],
        ["kit_id", "population", "normal_loss", "exponential_loss", "phase"],
        _loss_rows(before, "before") + _loss_rows(after, "after"),
    )
    _write_csv(
        paths["loss_users.csv"],
        ["user_id", "kit_before", "kit_after", "loss_before", "loss_after"],
        [
            [
                prefs.user_ids[i],
                int(initial.kit_index[i]),
                int(final.kit_index[i]),
                int(before.per_user_loss[i]),
                int(after.per_user_loss[i]),
            ]
            for i in range(prefs.n)
        ],
    )
    return 0


def _add_io_flags(sub: argparse.ArgumentParser, prefs: bool = True) -> None:
    sub.add_argument("--catalog", required=True, help="item catalog CSV")
    if prefs:
        sub.add_argument("--prefs", required=True, help="preference matrix CSV")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--seed", type=int, default=0, help="base seed for all randomness")
    sub.add_argument("--force", action="store_true", help="overwrite existing output files")


def _add_rank_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--rank", type=int, default=4, help="truncation rank r")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefkit",
        description="Cluster binary preference surveys into fixed-size kits.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("validate", help="check rows against the 6/4 selection quotas")
    _add_io_flags(sub)
    sub.add_argument("--strict", action="store_true", help="exit 1 when violations exist")
    sub.set_defaults(func=cmd_validate)

    sub = commands.add_parser("synth", help="generate a seeded planted-kit population")
    _add_io_flags(sub, prefs=False)
    sub.add_argument("--n-users", type=int, default=200)
    sub.add_argument("--n-kits", type=int, default=8)
    sub.add_argument("--noise-swaps", type=int, default=1)
    sub.set_defaults(func=cmd_synth)

    sub = commands.add_parser("kmeans-sweep", help="silhouette table over a range of k")
    _add_io_flags(sub)
    sub.add_argument("--k-min", type=int, default=4)
    sub.add_argument("--k-max", type=int, default=15)
    sub.add_argument("--trials", type=int, default=3)
    sub.add_argument("--lambda", dest="damping", type=float, default=0.3,
                     help="centroid update damping factor in (0, 1]")
    sub.add_argument("--max-iters", type=int, default=100)
    sub.add_argument("--allow-small-k", action="store_true",
                     help="permit --k-min below the default floor of 4")
    sub.set_defaults(func=cmd_kmeans_sweep)

    sub = commands.add_parser("svd", help="emit singular values as scree data")
    _add_io_flags(sub)
    sub.set_defaults(func=cmd_svd)

    sub = commands.add_parser("cluster-signs", help="sign-pattern clusters for users and items")
    _add_io_flags(sub)
    _add_rank_flags(sub)
    sub.set_defaults(func=cmd_cluster_signs)

    sub = commands.add_parser("design-kits", help="one kit per user sign cluster")
    _add_io_flags(sub)
    _add_rank_flags(sub)
    sub.add_argument("--constrained-kits", action="store_true",
                     help="fill each category quota instead of a flat top-N")
    sub.set_defaults(func=cmd_design_kits)

    sub = commands.add_parser("reassign", help="move users to their lowest-loss kit")
    _add_io_flags(sub)
    _add_rank_flags(sub)
    sub.add_argument("--constrained-kits", action="store_true")
    sub.set_defaults(func=cmd_reassign)

    sub = commands.add_parser("pipeline", help="svd route end to end, all artifacts")
    _add_io_flags(sub)
    _add_rank_flags(sub)
    sub.add_argument("--constrained-kits", action="store_true")
    sub.add_argument("--strict", action="store_true",
                     help="abort with exit 1 when rows violate the quotas")
    sub.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, PrefkitError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
